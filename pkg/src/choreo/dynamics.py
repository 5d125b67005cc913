"""Certification of a converged loop as a Newtonian periodic orbit.

Sign convention: ``U = m**2 * sum |x_i - x_j|**-alpha`` is positive, the
equations of motion read ``m x'' = grad U`` (attractive, since ``grad U``
points towards the other bodies) and the conserved energy is
``E = 1/2 sum m |x'|**2 - U``. In the usual physics convention the potential
energy is ``-U``.

A critical point of F satisfies ``m x'' = rho grad U`` in the loop's own time
``t`` with ``rho = 2K / (alpha V)``; in ``s = sqrt(rho) t`` this becomes
Newton's equation with period ``2 pi sqrt(rho)``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import CollisionDuringIntegration, DegenerateLoop
from .functionals import (
    FunctionalReport,
    ProblemParams,
    body_positions,
    pair_forces,
    scale_invariant_F,
)
from .loop import TWO_PI, SymmetricLoop, derivative, evaluate, second_derivative

N_BODIES = 3


@dataclass
class OrbitCertificate:
    rho: float
    virial_residual: float
    newton_residual_sup: float
    rescaled_period: float
    closure_error: float
    energy_drift: float
    min_mutual_distance: float
    node_ok: bool
    transversal_ok: bool
    orthogonal_crossing_ok: bool

    def to_dict(self) -> dict:
        return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v)) for k, v in asdict(self).items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "OrbitCertificate":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})

    @classmethod
    def from_json(cls, text: str) -> "OrbitCertificate":
        return cls.from_dict(json.loads(text))


def virial_multiplier(report: FunctionalReport, alpha: float) -> float:
    """``rho = 2K / (alpha V)``."""
    if report.V <= 0.0:
        raise DegenerateLoop("V = 0")
    return 2.0 * report.K / (alpha * report.V)


def multiplier_rho(report: FunctionalReport) -> float:
    """``rho`` recovered from the tangential-projection multiplier of the descent.

    Writing ``grad(V^q) = mu grad_K + tangential part`` gives
    ``rho = -q V^{q-1} / mu``, i.e. ``m c2 / c1`` in terms of the Euler-Lagrange
    coefficients. It coincides with the virial value only at a critical point.
    """
    gk = report.grad_K
    dot = float(gk @ report.grad_V)
    if dot == 0.0:
        raise DegenerateLoop("grad_V orthogonal to grad_K")
    return -float(gk @ gk) / dot


def virial_residual(report: FunctionalReport, rho: float) -> float:
    return abs(2.0 * report.K - report.alpha * rho * report.V) / (2.0 * report.K)


def _nodes(n):
    return TWO_PI * np.arange(n) / n


def _bodies(fn, loop, t):
    shifts = TWO_PI * np.arange(N_BODIES) / N_BODIES
    return np.stack([fn(loop, t + s) for s in shifts])


def newton_residual(loop: SymmetricLoop, params: ProblemParams, rho: float,
                    nodes: int | None = None) -> tuple[float, np.ndarray]:
    """Sup over nodes and bodies of ``|m x_i'' - rho grad_i U|`` and the per-node maximum."""
    n = nodes or params.quad_nodes
    t = _nodes(n)
    pos = _bodies(evaluate, loop, t)
    acc = _bodies(second_derivative, loop, t)
    res = params.mass * acc - rho * pair_forces(pos, params.alpha, params.mass)
    per_node = np.max(np.linalg.norm(res, axis=-1), axis=0)
    return float(per_node.max()), per_node


@dataclass(frozen=True, eq=False)
class RescaledOrbit:
    """The orbit in Newtonian time ``s = sqrt(rho) t``."""

    rho: float
    period: float
    s: np.ndarray
    positions: np.ndarray   # (3, n, 2)
    velocities: np.ndarray  # (3, n, 2), d/ds
    accelerations: np.ndarray


def rescale_time(loop: SymmetricLoop, rho: float, samples: int = 600) -> RescaledOrbit:
    if rho <= 0:
        raise ValueError("rho must be positive")
    t = _nodes(samples)
    w = np.sqrt(rho)
    return RescaledOrbit(
        rho=rho,
        period=TWO_PI * w,
        s=w * t,
        positions=_bodies(evaluate, loop, t),
        velocities=_bodies(derivative, loop, t) / w,
        accelerations=_bodies(second_derivative, loop, t) / rho,
    )


def energy(pos: np.ndarray, vel: np.ndarray, alpha: float, mass: float) -> float:
    """``1/2 sum m |v|^2 - U`` for a single configuration of shape (n, 2)."""
    kin = 0.5 * mass * float(np.sum(vel * vel))
    u = 0.0
    n = pos.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            u += mass**2 * float(np.hypot(*(pos[i] - pos[j]))) ** -alpha
    return kin - u


@dataclass(frozen=True, eq=False)
class IntegrationResult:
    closure_error: float
    energy_drift: float
    min_distance: float
    times: np.ndarray
    positions: np.ndarray  # (len(times), n, 2)
    velocities: np.ndarray


def integrate_newton(positions, velocities, alpha: float, mass: float, period: float,
                     steps: int = 100_000, collision_floor: float = 1e-6,
                     record_every: int | None = None) -> IntegrationResult:
    """Classical RK4 for ``m x'' = grad U`` over ``[0, period]`` with fixed steps.

    Returns the phase-space distance between the final and initial states and
    the largest energy deviation seen at any step.
    """
    x = np.array(positions, dtype=float)
    v = np.array(velocities, dtype=float)
    n = x.shape[0]
    iu, ju = np.triu_indices(n, 1)
    eye = np.eye(n, dtype=bool)
    h = period / steps
    coef = -alpha * mass
    floor2 = collision_floor**2

    def accel(p):
        r = p[:, None, :] - p[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", r, r)
        d2[eye] = np.inf
        a = np.einsum("ij,ijk->ik", coef * d2 ** (-alpha / 2.0 - 1.0), r)
        return a, d2.min()

    def swept_min2(p0, p1):
        # closest approach of each pair along the straight segment between steps,
        # so a fast encounter cannot jump across the floor unseen
        r0 = p0[iu] - p0[ju]
        dr = (p1[iu] - p1[ju]) - r0
        den = np.einsum("ij,ij->i", dr, dr)
        with np.errstate(invalid="ignore", divide="ignore"):
            tau = np.where(den > 0, -np.einsum("ij,ij->i", r0, dr) / den, 0.0)
        r = r0 + np.clip(tau, 0.0, 1.0)[:, None] * dr
        return np.einsum("ij,ij->i", r, r).min()

    def energy_of(p, w):
        r = p[iu] - p[ju]
        d = np.sqrt(np.einsum("ij,ij->i", r, r))
        return 0.5 * mass * np.sum(w * w) - mass**2 * np.sum(d ** (-alpha))

    x0, v0 = x.copy(), v.copy()
    e0 = energy_of(x, v)
    drift = 0.0
    dmin2 = np.inf
    every = record_every or max(1, steps // 1000)
    times, xs, vs = [0.0], [x.copy()], [v.copy()]
    for k in range(steps):
        a1, m1 = accel(x)
        a2, m2 = accel(x + 0.5 * h * v)
        a3, m3 = accel(x + 0.5 * h * v + 0.25 * h * h * a1)
        a4, m4 = accel(x + h * v + 0.5 * h * h * a2)
        # classical RK4 on (x, v) with the velocity stages substituted into the position stages
        x_new = x + h * v + h * h / 6.0 * (a1 + a2 + a3)
        v = v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        dmin2 = min(dmin2, m1, m2, m3, m4, swept_min2(x, x_new))
        x = x_new
        if dmin2 < floor2:
            raise CollisionDuringIntegration(np.sqrt(dmin2), collision_floor)
        drift = max(drift, abs(energy_of(x, v) - e0))
        if (k + 1) % every == 0:
            times.append((k + 1) * h)
            xs.append(x.copy())
            vs.append(v.copy())
    closure = float(np.sqrt(np.sum((x - x0) ** 2) + np.sum((v - v0) ** 2)))
    return IntegrationResult(closure, float(drift), float(np.sqrt(dmin2)),
                             np.array(times), np.array(xs), np.array(vs))


def circular_two_body(alpha: float, mass: float = 1.0, separation: float = 1.0):
    """Initial state and period of the circular relative-equilibrium of two bodies.

    Each body circles the centre of mass at radius ``separation / 2`` with
    ``m w^2 (r/2) = alpha m^2 r^{-alpha-1}``.
    """
    r = separation
    w = np.sqrt(2.0 * alpha * mass * r ** (-alpha - 2.0))
    pos = np.array([[r / 2, 0.0], [-r / 2, 0.0]])
    vel = np.array([[0.0, w * r / 2], [0.0, -w * r / 2]])
    return pos, vel, TWO_PI / w


def geometry_checks(loop: SymmetricLoop, tol: float = 1e-6) -> tuple[bool, bool, bool]:
    """(node_ok, transversal_ok, orthogonal_crossing_ok).

    node: gamma(0) and gamma(pi) at the origin. transversal: nonzero velocity at
    the node and the two branch tangents gamma'(0), gamma'(pi) not parallel.
    orthogonal crossing: x(pi/2) = 0 and y'(pi/2) = 0.
    """
    p = evaluate(loop, np.array([0.0, np.pi, np.pi / 2]))
    v = derivative(loop, np.array([0.0, np.pi, np.pi / 2]))
    node_ok = bool(np.hypot(*p[0]) <= tol and np.hypot(*p[1]) <= tol)
    cross = v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0]
    transversal_ok = bool(np.hypot(*v[0]) >= tol and abs(cross) > tol)
    orthogonal_ok = bool(abs(p[2, 0]) <= tol and abs(v[2, 1]) <= tol)
    return node_ok, transversal_ok, orthogonal_ok


def certify(loop: SymmetricLoop, params: ProblemParams, steps: int = 100_000,
            report: FunctionalReport | None = None, geometry_tol: float = 1e-6) -> OrbitCertificate:
    """Build the full certificate for ``loop``; no thresholds are applied here."""
    report = report or scale_invariant_F(loop, params)
    rho = virial_multiplier(report, params.alpha)
    sup, _ = newton_residual(loop, params, rho)
    w = np.sqrt(rho)
    x0 = _bodies(evaluate, loop, np.array(0.0))
    v0 = _bodies(derivative, loop, np.array(0.0)) / w
    fine = body_positions(loop, max(params.quad_nodes, 4096))
    dmin = min(
        float(np.min(np.hypot(*(fine[i] - fine[j]).T)))
        for i in range(N_BODIES) for j in range(i + 1, N_BODIES)
    )
    try:
        ode = integrate_newton(x0, v0, params.alpha, params.mass, TWO_PI * w, steps, params.collision_floor)
        closure, drift, dmin = ode.closure_error, ode.energy_drift, min(dmin, ode.min_distance)
    except CollisionDuringIntegration as exc:
        # not a genuine orbit; report it through the certificate rather than raising
        closure, drift, dmin = np.inf, np.inf, exc.min_distance
    node_ok, transversal_ok, orth_ok = geometry_checks(loop, geometry_tol)
    return OrbitCertificate(
        rho=rho,
        virial_residual=virial_residual(report, multiplier_rho(report)),
        newton_residual_sup=sup,
        rescaled_period=TWO_PI * w,
        closure_error=closure,
        energy_drift=drift,
        min_mutual_distance=dmin,
        node_ok=node_ok,
        transversal_ok=transversal_ok,
        orthogonal_crossing_ok=orth_ok,
    )
