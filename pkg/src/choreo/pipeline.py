"""Seed, solve, certify and export figure-eight choreographies."""

from __future__ import annotations

import logging
import math
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import integrate

from .dynamics import OrbitCertificate, certify
from .errors import CertificationFailed, SweepBroken
from .functionals import ProblemParams
from .loop import TWO_PI, SymmetricLoop, evaluate
from .minimizer import SolverConfig, Status, solve

log = logging.getLogger(__name__)

DEFAULT_MODES = 24
DEFAULT_SAMPLES = 600
DEFAULT_RK4_STEPS = 100_000


@dataclass(frozen=True)
class CertificationBounds:
    virial: float = 1e-6
    newton: float = 1e-4
    closure: float = 1e-5
    energy: float = 1e-8
    min_distance_factor: float = 100.0


def check_certificate(cert: OrbitCertificate, bounds: CertificationBounds, collision_floor: float) -> None:
    """Raise :class:`CertificationFailed` naming the first failing metric."""
    for flag in ("node_ok", "transversal_ok", "orthogonal_crossing_ok"):
        if not getattr(cert, flag):
            raise CertificationFailed(flag, False, True)
    checks = [
        ("virial_residual", cert.virial_residual, bounds.virial),
        ("newton_residual_sup", cert.newton_residual_sup, bounds.newton),
        ("closure_error", cert.closure_error, bounds.closure),
        ("energy_drift", cert.energy_drift, bounds.energy),
    ]
    for name, value, bound in checks:
        if not value <= bound:
            raise CertificationFailed(name, value, bound)
    floor = bounds.min_distance_factor * collision_floor
    if not cert.min_mutual_distance >= floor:
        raise CertificationFailed("min_mutual_distance", cert.min_mutual_distance, floor)


@dataclass(eq=False)
class ChoreographyTrajectory:
    alpha: float
    mass: float
    samples: int
    times: np.ndarray
    body_paths: np.ndarray  # (3, samples, 2)
    gamma_path: np.ndarray  # (samples, 2)
    certificate: OrbitCertificate
    loop: SymmetricLoop
    F: float = float("nan")
    collinear_time: float = float("nan")
    status: str = ""
    iterations: int = 0
    log_lines: list = field(default_factory=list)


def triangle_area(body_paths: np.ndarray) -> np.ndarray:
    """Area of the triangle formed by the three bodies at each sample."""
    u = body_paths[1] - body_paths[0]
    v = body_paths[2] - body_paths[0]
    return 0.5 * np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])


def sample_trajectory(loop: SymmetricLoop, params: ProblemParams, certificate: OrbitCertificate,
                      samples: int = DEFAULT_SAMPLES) -> ChoreographyTrajectory:
    t = TWO_PI * np.arange(samples) / samples
    gamma = evaluate(loop, t)
    if samples % 3 == 0:
        # phase shift of 2 pi / 3 is an exact grid offset
        shift = samples // 3
        bodies = np.stack([np.roll(gamma, -i * shift, axis=0) for i in range(3)])
    else:
        bodies = np.stack([evaluate(loop, t + TWO_PI * i / 3) for i in range(3)])
    area = triangle_area(bodies)
    return ChoreographyTrajectory(
        alpha=params.alpha,
        mass=params.mass,
        samples=samples,
        times=t,
        body_paths=bodies,
        gamma_path=gamma,
        certificate=certificate,
        loop=loop,
        # first sample within rounding of the minimum; exact ties occur every pi/3
        collinear_time=float(t[int(np.argmax(area <= area.min() + 1e-14 * area.max()))]),
    )


def run_single(params: ProblemParams, config: SolverConfig = SolverConfig(), modes: int = DEFAULT_MODES,
               initial: SymmetricLoop | None = None, bounds: CertificationBounds = CertificationBounds(),
               samples: int = DEFAULT_SAMPLES, rk4_steps: int = DEFAULT_RK4_STEPS,
               nc1: bool = False) -> ChoreographyTrajectory:
    """Solve from the seed (or ``initial``), certify, and sample the orbit.

    Raises :class:`CertificationFailed` if any certificate flag is false, any
    residual exceeds ``bounds``, or the solver did not converge.
    """
    if initial is not None and initial.modes != modes:
        initial = initial.resized(modes)
    state, report = solve(params, config, modes=modes, initial=initial, nc1=nc1)
    cert = certify(state.loop, params, steps=rk4_steps, report=report)
    log.info("alpha=%g status=%s F=%.15g cert=%s", params.alpha, state.status.value, report.F, cert)
    check_certificate(cert, bounds, params.collision_floor)
    if state.status is not Status.CONVERGED:
        raise CertificationFailed("solver_status", state.status.value, Status.CONVERGED.value)
    traj = sample_trajectory(state.loop, params, cert, samples)
    traj.F = report.F
    traj.status = state.status.value
    traj.iterations = state.iter
    traj.log_lines = list(state.log_lines)
    return traj


def coefficient_distance(a: SymmetricLoop, b: SymmetricLoop) -> float:
    n = max(a.modes, b.modes)
    return float(np.linalg.norm(a.resized(n).to_vector() - b.resized(n).to_vector()))


@dataclass
class SweepResult:
    trajectories: list
    distances: list
    continuity_bound: float


def run_sweep(alphas, params: ProblemParams, config: SolverConfig = SolverConfig(),
              modes: int = DEFAULT_MODES, continuity_slope: float = 0.25,
              bounds: CertificationBounds = CertificationBounds(),
              samples: int = DEFAULT_SAMPLES, rk4_steps: int = DEFAULT_RK4_STEPS) -> SweepResult:
    """Alpha-continuation: each solve is warm-started from the previous solution.

    Adjacent solutions (both normalised to K = 1) must satisfy
    ``|c(alpha_j) - c(alpha_{j-1})| <= continuity_slope * |alpha_j - alpha_{j-1}|``.
    Raises :class:`SweepBroken` with the partial result at the first failure.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("empty alpha list")
    if any(not 0.0 < a < 2.0 for a in alphas):
        raise ValueError(f"every alpha must lie in (0, 2), got {alphas}")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be strictly increasing")
    result = SweepResult([], [], continuity_slope)
    previous = None
    for a in alphas:
        p = replace(params, alpha=a)
        try:
            traj = run_single(p, config, modes, initial=previous.loop if previous else None,
                              bounds=bounds, samples=samples, rk4_steps=rk4_steps)
        except CertificationFailed as exc:
            raise SweepBroken(a, str(exc), result) from exc
        if previous is not None:
            dist = coefficient_distance(previous.loop, traj.loop)
            result.distances.append(dist)
            bound = continuity_slope * abs(a - previous.alpha)
            if dist > bound:
                result.trajectories.append(traj)
                raise SweepBroken(a, f"coefficient jump {dist:.3e} exceeds {bound:.3e}", result)
        result.trajectories.append(traj)
        previous = traj
    return result


# -- binary-collision scaling ------------------------------------------------

def collision_exponents(alpha: float) -> tuple[float, float]:
    """(exponent of the action density near collision, exponent of the partial action)."""
    return -2.0 * alpha / (2.0 + alpha), (2.0 - alpha) / (2.0 + alpha)


@dataclass
class CollisionProbe:
    alpha: float
    rows: list  # (eps, K_eps, V_eps, action_eps)
    fitted_exponent: float
    expected_exponent: float
    fitted_kinetic_exponent: float

    @property
    def relative_error(self) -> float:
        return abs(self.fitted_exponent - self.expected_exponent) / self.expected_exponent


def collision_scaling_probe(alpha: float, epsilons, c: float = 1.0, mass: float = 1.0) -> CollisionProbe:
    """Partial action of a model binary-collision arc over ``(0, eps)``.

    Two equal masses approach with separation ``r(t) = c t^{2/(2+alpha)}``.
    ``K_eps = int m r'^2 / 4`` and ``V_eps = int m^2 r^-alpha`` are computed by
    adaptive quadrature, and the exponent of ``V_eps`` in ``eps`` is fitted by
    log-log least squares.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")
    eps = np.asarray(epsilons, dtype=float)
    if eps.size < 2 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ValueError("epsilons must be positive and strictly decreasing")
    e = 2.0 / (2.0 + alpha)

    def r(t):
        return c * t**e

    def rdot(t):
        return c * e * t ** (e - 1.0)

    rows = []
    for s in eps:
        kin, _ = integrate.quad(lambda t: 0.25 * mass * rdot(t) ** 2, 0.0, s, limit=200, epsabs=0.0, epsrel=1e-12)
        pot, _ = integrate.quad(lambda t: mass**2 * r(t) ** -alpha, 0.0, s, limit=200, epsabs=0.0, epsrel=1e-12)
        rows.append((float(s), kin, pot, kin + pot))
    arr = np.array(rows)
    slope_v = np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 2]), 1)[0]
    slope_k = np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 1]), 1)[0]
    return CollisionProbe(alpha, rows, float(slope_v), collision_exponents(alpha)[1], float(slope_k))


# -- artifacts ---------------------------------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trajectory_csv(traj: ChoreographyTrajectory) -> str:
    lines = ["t,x0,y0,x1,y1,x2,y2"]
    for j, t in enumerate(traj.times):
        vals = [t, *traj.body_paths[:, j, :].ravel()]
        lines.append(",".join(f"{v:.17g}" for v in vals))
    return "\n".join(lines) + "\n"


def read_trajectory_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def orbit_svg(traj: ChoreographyTrajectory, size: int = 480, margin: int = 24) -> str:
    """The curve and the three bodies at t = 0 as a standalone SVG document."""
    pts = traj.gamma_path
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    scale = (size - 2 * margin) / span
    centre = (lo + hi) / 2

    def xy(p):
        return (size / 2 + scale * (p[0] - centre[0]), size / 2 - scale * (p[1] - centre[1]))

    path = " ".join(f"{x:.3f},{y:.3f}" for x, y in map(xy, pts))
    colours = ("#d62728", "#2ca02c", "#1f77b4")
    dots = "\n".join(
        f'  <circle cx="{x:.3f}" cy="{y:.3f}" r="6" fill="{col}"/>'
        for (x, y), col in zip((xy(traj.body_paths[i, 0]) for i in range(3)), colours)
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">\n'
        f"  <title>choreography alpha={traj.alpha:g}, bodies at t=0</title>\n"
        f'  <rect width="100%" height="100%" fill="white"/>\n'
        f'  <polygon points="{path}" fill="none" stroke="black" stroke-width="1.5"/>\n'
        f"{dots}\n</svg>\n"
    )


def write_artifacts(traj: ChoreographyTrajectory, outdir, extra_log: list | None = None) -> Path:
    """Write loop.json, certificate.json, trajectory.csv, orbit.svg and log.txt."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(out / "loop.json", traj.loop.to_json() + "\n")
    _atomic_write(out / "certificate.json", traj.certificate.to_json() + "\n")
    _atomic_write(out / "trajectory.csv", trajectory_csv(traj))
    _atomic_write(out / "orbit.svg", orbit_svg(traj))
    header = [
        f"# alpha={traj.alpha!r} mass={traj.mass!r} modes={traj.loop.modes}",
        f"# status={traj.status} iterations={traj.iterations} F={traj.F!r}",
        f"# best collinear time={traj.collinear_time!r}",
        "# iter\tf\tgnorm\tstep\tminDist",
    ]
    body = header + list(traj.log_lines) + list(extra_log or [])
    _atomic_write(out / "log.txt", "\n".join(body) + "\n")
    return out


def load_loop(path) -> SymmetricLoop:
    return SymmetricLoop.from_json(Path(path).read_text())


def summary(traj: ChoreographyTrajectory) -> dict:
    d = {"alpha": traj.alpha, "F": traj.F, "status": traj.status, "iterations": traj.iterations,
         "collinear_time": traj.collinear_time}
    d.update(traj.certificate.to_dict())
    return {k: (v if not isinstance(v, float) or math.isfinite(v) else str(v)) for k, v in d.items()}


__all__ = [
    "CertificationBounds",
    "ChoreographyTrajectory",
    "CollisionProbe",
    "SweepResult",
    "check_certificate",
    "collision_exponents",
    "collision_scaling_probe",
    "coefficient_distance",
    "load_loop",
    "orbit_svg",
    "read_trajectory_csv",
    "run_single",
    "run_sweep",
    "sample_trajectory",
    "summary",
    "trajectory_csv",
    "triangle_area",
    "write_artifacts",
]
