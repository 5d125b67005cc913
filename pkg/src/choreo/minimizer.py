"""Descent on F over the symmetric coefficient space.

Two equivalent formulations are supported. With ``renormalize_K`` the iterate
lives on ``{K = 1}`` and the objective is ``f = V**q`` with its tangential
gradient; otherwise ``F`` itself is descended (it is scale invariant, so its
gradient is already orthogonal to the radial direction). In both cases the
objective value equals ``F`` of the iterate.

Search directions default to the Sobolev (H^1) gradient: the Riesz
representative for the inner product ``<u, v> = u^T G v`` with
``G = diag(3 m pi k^2)``, which is the Hessian of ``K``. The convergence test
uses the Euclidean norm of the projected gradient regardless of metric.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import CollisionDetected, DegenerateLoop
from .functionals import (
    FunctionalReport,
    ProblemParams,
    body_positions,
    kinetic,
    log_F_change,
    pair_distances,
    scale_invariant_F,
)
from .loop import SymmetricLoop

log = logging.getLogger(__name__)

MIN_STEP = 1e-14


class Status(enum.Enum):
    RUNNING = "Running"
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    COLLISION_ABORT = "CollisionAbort"
    LINE_SEARCH_FAIL = "LineSearchFail"


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 5000
    grad_tol: float = 1e-8
    eps_schedule: tuple[float, ...] | None = None
    step_init: float = 1.0
    backtrack: float = 0.5
    armijo: float = 1e-4
    renormalize_K: bool = True
    seed_amplitude: float = 1.0
    rng_seed: int | None = None
    metric: str = "h1"
    verbose: bool = False

    def __post_init__(self):
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.grad_tol <= 0 or self.step_init <= 0 or self.seed_amplitude <= 0:
            raise ValueError("grad_tol, step_init and seed_amplitude must be positive")
        if not 0 < self.backtrack < 1 or not 0 < self.armijo < 1:
            raise ValueError("backtrack and armijo must lie in (0, 1)")
        if self.metric not in ("h1", "euclidean"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.eps_schedule is not None:
            e = np.asarray(self.eps_schedule, dtype=float)
            if np.any(e <= 0) or np.any(np.diff(e) >= 0):
                raise ValueError("eps_schedule must be positive and strictly decreasing")

    def epsilon(self, n: int) -> float:
        """Ekeland tolerance for iteration ``n`` (1/(n+1) unless a schedule is given)."""
        if self.eps_schedule is not None:
            return float(self.eps_schedule[min(n, len(self.eps_schedule) - 1)])
        return 1.0 / (n + 1)


@dataclass
class SolverState:
    loop: SymmetricLoop
    report: FunctionalReport
    params: ProblemParams
    iter: int = 0
    step: float = 0.0
    f: float = 0.0
    gnorm: float = np.inf
    f_history: list = field(default_factory=list)
    gnorm_history: list = field(default_factory=list)
    ekeland_history: list = field(default_factory=list)
    status: Status = Status.RUNNING
    log_lines: list = field(default_factory=list)


def initial_guess(modes: int, amplitude: float = 1.0, rng_seed: int | None = None,
                  nc1: bool = False) -> SymmetricLoop:
    """The seed ``amplitude * (sin 2t, sin t)``, optionally jittered.

    With ``nc1`` the first y-harmonic is unavailable and ``(sin 2t, sin 5t)``
    is used instead (``sin 3t`` alone puts all three bodies at one height).
    """
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    if nc1:
        if modes < 3:
            raise ValueError("nc1 seed needs modes >= 3")
        loop = SymmetricLoop.from_modes(modes, {2: amplitude}, {5: amplitude}, nc1=True)
    else:
        loop = SymmetricLoop.from_modes(modes, {2: amplitude}, {1: amplitude})
    if rng_seed is None:
        return loop
    rng = np.random.default_rng(rng_seed)
    c = loop.to_vector() + 1e-3 * amplitude * rng.uniform(-1.0, 1.0, 2 * modes)
    if nc1:
        c[modes] = 0.0
    return SymmetricLoop.from_vector(c, nc1)


def min_mutual_distance(loop: SymmetricLoop, nodes: int = 512) -> float:
    return float(pair_distances(body_positions(loop, nodes)).min())


def _free_mask(loop: SymmetricLoop) -> np.ndarray:
    mask = np.ones(2 * loop.modes)
    if loop.nc1:
        mask[loop.modes] = 0.0
    return mask


def projected_gradient(state: SolverState, renormalize_K: bool = True) -> np.ndarray:
    """Euclidean gradient of the objective restricted to admissible directions.

    On ``{K = 1}``: ``q V^{q-1} grad_V - mu grad_K`` with ``mu`` chosen to make
    the result orthogonal to ``grad_K``. Otherwise ``grad_F``.
    """
    r = state.report
    mask = _free_mask(state.loop)
    if not renormalize_K:
        return mask * r.grad_F
    gf = mask * (r.q * r.V ** (r.q - 1.0) * r.grad_V)
    gk = mask * r.grad_K
    nk = gk @ gk
    if nk == 0.0:
        raise DegenerateLoop("grad_K vanishes")
    return gf - (gf @ gk) / nk * gk


def tangent_multiplier(report: FunctionalReport, loop: SymmetricLoop | None = None) -> float:
    """The Lagrange multiplier ``mu`` of the projection onto ``{K = const}``."""
    mask = _free_mask(loop) if loop is not None else 1.0
    gf = mask * (report.q * report.V ** (report.q - 1.0) * report.grad_V)
    gk = mask * report.grad_K
    return float((gf @ gk) / (gk @ gk))


def _direction(state: SolverState, config: SolverConfig, g: np.ndarray) -> np.ndarray:
    if config.metric == "euclidean":
        return -g
    r = state.report
    mask = _free_mask(state.loop)
    metric = 3.0 * r.mass * np.pi * state.loop.wavenumbers**2
    c = state.loop.to_vector()
    if config.renormalize_K:
        grad = mask * (r.q * r.V ** (r.q - 1.0) * r.grad_V)
    else:
        grad = mask * r.grad_F
    riesz = grad / metric
    # G-orthogonal projection off the radial direction c (the H^1 gradient of K is c)
    cm = mask * c
    riesz = riesz - (grad @ cm) / (cm @ (metric * cm)) * cm
    return -riesz


def _normalized(loop: SymmetricLoop, params: ProblemParams) -> SymmetricLoop:
    return loop.scaled(kinetic(loop, params) ** -0.5)


def new_state(loop: SymmetricLoop, params: ProblemParams, config: SolverConfig) -> SolverState:
    if config.renormalize_K:
        loop = _normalized(loop, params)
    report = scale_invariant_F(loop, params)
    state = SolverState(loop=loop, report=report, params=params, step=config.step_init, f=report.F)
    state.gnorm = float(np.linalg.norm(projected_gradient(state, config.renormalize_K)))
    state.f_history.append(state.f)
    state.gnorm_history.append(state.gnorm)
    state.ekeland_history.append(state.gnorm <= config.epsilon(0))
    if state.gnorm <= config.grad_tol:
        state.status = Status.CONVERGED
    return state


def _emit(state: SolverState, config: SolverConfig) -> None:
    line = f"{state.iter}\t{state.f:.17g}\t{state.gnorm:.6e}\t{state.step:.6e}\t{state.report.min_distance:.6e}"
    state.log_lines.append(line)
    if config.verbose:
        print(line, flush=True)
    log.debug(line)


def step(state: SolverState, config: SolverConfig) -> SolverState:
    """One Armijo-backtracking descent step; terminal states are returned unchanged.

    The sufficient-decrease test is done on ``log F`` with the difference
    formed by :func:`log_F_change`, so it stays meaningful once the decrease
    falls below the rounding level of ``F`` itself.
    """
    if state.status is not Status.RUNNING:
        return state
    params = state.params
    g = projected_gradient(state, config.renormalize_K)
    d = _direction(state, config, g)
    r = state.report
    slope = float(r.grad_F @ d) / r.F  # d/dt log F along d
    if not slope < 0.0:
        state.status = Status.LINE_SEARCH_FAIL
        return state
    c0 = state.loop.to_vector()
    t = min(2.0 * state.step, 1e6) if state.iter else state.step
    collided_everywhere = True
    while True:
        trial = SymmetricLoop.from_vector(c0 + t * d, state.loop.nc1)
        try:
            dlog = log_F_change(state.loop, trial, params, r.K, r.V)
            collided_everywhere = False
            if dlog <= config.armijo * t * slope:
                break
        except CollisionDetected:
            pass
        t *= config.backtrack
        if t < MIN_STEP:
            state.status = Status.COLLISION_ABORT if collided_everywhere else Status.LINE_SEARCH_FAIL
            return state
    if config.renormalize_K:
        trial = _normalized(trial, params)
    state.loop = trial
    state.report = scale_invariant_F(trial, params)
    state.step = t
    state.iter += 1
    # monotone by construction: the accepted log-decrease is strictly negative
    state.f = state.f + state.f * np.expm1(dlog)
    state.gnorm = float(np.linalg.norm(projected_gradient(state, config.renormalize_K)))
    state.f_history.append(state.f)
    state.gnorm_history.append(state.gnorm)
    state.ekeland_history.append(state.gnorm <= config.epsilon(state.iter))
    _emit(state, config)
    if state.gnorm <= config.grad_tol:
        state.status = Status.CONVERGED
    return state


def solve(params: ProblemParams, config: SolverConfig = SolverConfig(), modes: int = 12,
          initial: SymmetricLoop | None = None, nc1: bool = False) -> tuple[SolverState, FunctionalReport]:
    """Run descent from ``initial`` (default: the seed curve) until a terminal status."""
    if initial is None:
        initial = initial_guess(modes, config.seed_amplitude, config.rng_seed, nc1)
    state = new_state(initial, params, config)
    while state.status is Status.RUNNING:
        if state.iter >= config.max_iters:
            state.status = Status.MAX_ITERS
            break
        step(state, config)
    log.info("solve finished: %s after %d iterations, gnorm %.3e", state.status.value, state.iter, state.gnorm)
    return state, state.report


__all__ = [
    "SolverConfig",
    "SolverState",
    "Status",
    "initial_guess",
    "min_mutual_distance",
    "projected_gradient",
    "tangent_multiplier",
    "new_state",
    "step",
    "solve",
]
