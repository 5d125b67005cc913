"""Figure-eight three-body choreographies from the scale-invariant functional
``F = K**(alpha/(alpha+2)) * V**(2/(alpha+2))``."""

from .dynamics import (
    OrbitCertificate,
    certify,
    geometry_checks,
    integrate_newton,
    multiplier_rho,
    newton_residual,
    rescale_time,
    virial_multiplier,
)
from .errors import (
    CertificationFailed,
    CollisionDetected,
    CollisionDuringIntegration,
    DegenerateLoop,
    SweepBroken,
)
from .functionals import (
    FunctionalReport,
    ProblemParams,
    envelope_constant,
    gradients,
    kinetic,
    potential,
    scale_envelope,
    scale_invariant_F,
)
from .loop import (
    SymmetricLoop,
    check_symmetries,
    derivative,
    evaluate,
    parseval_norms,
    poincare_check,
)
from .minimizer import SolverConfig, SolverState, Status, initial_guess, projected_gradient, solve
from .pipeline import collision_scaling_probe, run_single, run_sweep, write_artifacts

__version__ = "0.1.0"

__all__ = [
    "OrbitCertificate",
    "certify",
    "geometry_checks",
    "integrate_newton",
    "multiplier_rho",
    "newton_residual",
    "rescale_time",
    "virial_multiplier",
    "CertificationFailed",
    "CollisionDetected",
    "CollisionDuringIntegration",
    "DegenerateLoop",
    "SweepBroken",
    "FunctionalReport",
    "ProblemParams",
    "envelope_constant",
    "gradients",
    "kinetic",
    "potential",
    "scale_envelope",
    "scale_invariant_F",
    "SymmetricLoop",
    "check_symmetries",
    "derivative",
    "evaluate",
    "parseval_norms",
    "poincare_check",
    "SolverConfig",
    "SolverState",
    "Status",
    "initial_guess",
    "projected_gradient",
    "solve",
    "collision_scaling_probe",
    "run_single",
    "run_sweep",
    "write_artifacts",
]
