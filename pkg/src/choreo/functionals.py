"""Kinetic and potential integrals of a three-body choreography, the
scale-invariant functional ``F = K**p * V**q`` and their coefficient gradients.

Bodies follow ``x_i(t) = gamma(t + 2*pi*i/3)``, ``i = 0, 1, 2``, with equal
masses ``m`` and the pair potential ``U = m**2 * sum_{i<j} |x_i - x_j|**-alpha``.
Time integrals use the uniform trapezoid rule on ``[0, 2*pi)``; ``K`` is
evaluated in closed form from the Fourier coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CollisionDetected, DegenerateLoop
from .loop import TWO_PI, SymmetricLoop, x_wavenumbers, y_wavenumbers

N_BODIES = 3
PAIRS = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class ProblemParams:
    alpha: float = 1.0
    mass: float = 1.0
    quad_nodes: int = 512
    collision_floor: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.quad_nodes < 1:
            raise ValueError("quad_nodes must be positive")
        if self.collision_floor <= 0:
            raise ValueError("collision_floor must be positive")

    @property
    def p(self) -> float:
        return self.alpha / (self.alpha + 2.0)

    @property
    def q(self) -> float:
        return 2.0 / (self.alpha + 2.0)

    def check_loop(self, loop: SymmetricLoop) -> None:
        if self.quad_nodes < 4 * loop.modes:
            raise ValueError(
                f"quad_nodes={self.quad_nodes} below 4*modes={4 * loop.modes}"
            )


@dataclass(frozen=True, eq=False)
class _Grid:
    t: np.ndarray
    weight: float
    # sin(k (t + 2 pi i / 3)) per body, shapes (3, nodes, modes)
    sx: np.ndarray
    sy: np.ndarray


@lru_cache(maxsize=32)
def _grid(modes: int, nodes: int) -> _Grid:
    t = TWO_PI * np.arange(nodes) / nodes
    shifts = TWO_PI * np.arange(N_BODIES) / N_BODIES
    phase = t[None, :] + shifts[:, None]
    sx = np.sin(phase[..., None] * x_wavenumbers(modes))
    sy = np.sin(phase[..., None] * y_wavenumbers(modes))
    sx.flags.writeable = False
    sy.flags.writeable = False
    return _Grid(t, TWO_PI / nodes, sx, sy)


def body_positions(loop: SymmetricLoop, nodes: int) -> np.ndarray:
    """Positions of the three bodies at the quadrature nodes, shape (3, nodes, 2)."""
    g = _grid(loop.modes, nodes)
    return np.stack([g.sx @ loop.a, g.sy @ loop.b], axis=-1)


def pair_distances(pos: np.ndarray) -> np.ndarray:
    """|x_i - x_j| for the three pairs, shape (3, nodes)."""
    return np.stack([np.hypot(*(pos[i] - pos[j]).T) for i, j in PAIRS])


def pair_forces(pos: np.ndarray, alpha: float, mass: float) -> np.ndarray:
    """grad_{x_i} U at every sample of ``pos`` (shape (n, ..., 2)), same shape.

    With ``U > 0`` the gradient points from each body towards the others.
    """
    n = pos.shape[0]
    out = np.zeros_like(pos)
    for i in range(n):
        for j in range(i + 1, n):
            r = pos[i] - pos[j]
            d2 = np.sum(r * r, axis=-1, keepdims=True)
            f = -alpha * mass**2 * d2 ** (-alpha / 2.0 - 1.0) * r
            out[i] += f
            out[j] -= f
    return out


def envelope_constant(alpha: float) -> float:
    """Ratio between the minimum of the scale envelope and F."""
    return (alpha + 2.0) / 2.0 * (alpha / 2.0) ** (-alpha / (alpha + 2.0))


def optimal_scale(K: float, V: float, alpha: float) -> float:
    """The homothety factor that minimises ``lam**2 K + lam**-alpha V``."""
    return (alpha * V / (2.0 * K)) ** (1.0 / (alpha + 2.0))


def kinetic(loop: SymmetricLoop, params: ProblemParams) -> float:
    k = loop.wavenumbers
    c = loop.to_vector()
    return float(1.5 * params.mass * np.pi * np.sum(k**2 * c**2))


def _potential_from_positions(pos, params):
    d = pair_distances(pos)
    dmin = float(d.min())
    if not dmin >= params.collision_floor:
        raise CollisionDetected(dmin, params.collision_floor)
    # per-node pair sum, then a fixed-order reduction over nodes
    u = params.mass**2 * np.sum(d ** (-params.alpha), axis=0)
    return float(TWO_PI / pos.shape[1] * np.sum(u)), dmin, d


def potential(loop: SymmetricLoop, params: ProblemParams) -> tuple[float, float]:
    """(V, minimum pair distance over the quadrature nodes)."""
    params.check_loop(loop)
    V, dmin, _ = _potential_from_positions(body_positions(loop, params.quad_nodes), params)
    return V, dmin


def pair_integrals(loop: SymmetricLoop, params: ProblemParams) -> np.ndarray:
    """The three separate pair contributions to V; equal for a choreography."""
    params.check_loop(loop)
    _, _, d = _potential_from_positions(body_positions(loop, params.quad_nodes), params)
    return params.mass**2 * TWO_PI / params.quad_nodes * np.sum(d ** (-params.alpha), axis=1)


def scale_envelope(loop: SymmetricLoop, params: ProblemParams, lam: float) -> float:
    """Action of the rescaled loop ``lam * gamma``: ``lam**2 K + lam**-alpha V``."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    K = kinetic(loop, params)
    V, _ = potential(loop, params)
    return lam**2 * K + lam ** (-params.alpha) * V


def gradients(loop: SymmetricLoop, params: ProblemParams) -> tuple[np.ndarray, np.ndarray]:
    """(grad_K, grad_V) with respect to the flat coefficient vector."""
    grad_K = 3.0 * params.mass * np.pi * loop.wavenumbers**2 * loop.to_vector()
    params.check_loop(loop)
    pos = body_positions(loop, params.quad_nodes)
    _potential_from_positions(pos, params)
    return grad_K, _grad_V(loop, pos, params)


def _grad_V(loop, pos, params):
    g = _grid(loop.modes, params.quad_nodes)
    f = pair_forces(pos, params.alpha, params.mass)
    ga = np.einsum("inm,in->m", g.sx, f[..., 0])
    gb = np.einsum("inm,in->m", g.sy, f[..., 1])
    return g.weight * np.concatenate([ga, gb])


@dataclass(frozen=True, eq=False)
class FunctionalReport:
    K: float
    V: float
    F: float
    lambda_star: float
    C_alpha: float
    grad_F: np.ndarray
    grad_K: np.ndarray
    grad_V: np.ndarray
    min_distance: float
    alpha: float
    mass: float = 1.0
    extra: dict = field(default_factory=dict)

    @property
    def p(self) -> float:
        return self.alpha / (self.alpha + 2.0)

    @property
    def q(self) -> float:
        return 2.0 / (self.alpha + 2.0)

    @property
    def action(self) -> float:
        return self.K + self.V


def scale_invariant_F(loop: SymmetricLoop, params: ProblemParams) -> FunctionalReport:
    """Evaluate K, V, F, the optimal scale and all coefficient gradients."""
    K = kinetic(loop, params)
    if K <= 0.0:
        raise DegenerateLoop("constant loop has K = 0")
    params.check_loop(loop)
    pos = body_positions(loop, params.quad_nodes)
    V, dmin, _ = _potential_from_positions(pos, params)
    p, q = params.p, params.q
    F = K**p * V**q
    grad_K = 3.0 * params.mass * np.pi * loop.wavenumbers**2 * loop.to_vector()
    grad_V = _grad_V(loop, pos, params)
    # dF = p K^{p-1} V^q dK + q K^p V^{q-1} dV, written with F factored out
    grad_F = F * (p / K * grad_K + q / V * grad_V)
    return FunctionalReport(
        K=K,
        V=V,
        F=F,
        lambda_star=optimal_scale(K, V, params.alpha),
        C_alpha=envelope_constant(params.alpha),
        grad_F=grad_F,
        grad_K=grad_K,
        grad_V=grad_V,
        min_distance=dmin,
        alpha=params.alpha,
        mass=params.mass,
    )


def log_F_change(old: SymmetricLoop, new: SymmetricLoop, params: ProblemParams,
                 K_old: float, V_old: float) -> float:
    """``log F(new) - log F(old)`` without cancellation.

    Differences of K and of each pair term of U are formed from the
    coefficient difference directly, so the result keeps full relative
    precision even when the two loops agree to ~1e-10. Raises
    :class:`CollisionDetected` if ``new`` violates the collision floor.
    """
    k = old.wavenumbers
    c0, c1 = old.to_vector(), new.to_vector()
    dK = 1.5 * params.mass * np.pi * np.sum(k**2 * (c1 - c0) * (c1 + c0))
    n = params.quad_nodes
    delta = SymmetricLoop(new.a - old.a, new.b - old.b)
    p0 = body_positions(old, n)
    p1 = body_positions(new, n)
    pd = body_positions(delta, n)
    dmin = np.inf
    total = 0.0
    for i, j in PAIRS:
        r0 = p0[i] - p0[j]
        r1 = p1[i] - p1[j]
        dr = pd[i] - pd[j]
        d0sq = np.sum(r0 * r0, axis=-1)
        d1sq = np.sum(r1 * r1, axis=-1)
        dmin = min(dmin, float(np.sqrt(d1sq.min())))
        if not dmin >= params.collision_floor:
            raise CollisionDetected(dmin, params.collision_floor)
        # |r1|^2 - |r0|^2 = dr . (r1 + r0)
        rel = np.sum(dr * (r1 + r0), axis=-1) / d0sq
        total = total + d0sq ** (-params.alpha / 2) * np.expm1(-params.alpha / 2 * np.log1p(rel))
    dV = params.mass**2 * TWO_PI / n * np.sum(total)
    return float(params.p * np.log1p(dK / K_old) + params.q * np.log1p(dV / V_old))
