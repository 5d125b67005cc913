"""Planar loops in the figure-eight symmetry class.

A loop is ``gamma(t) = (x(t), y(t))`` on ``[0, 2*pi)`` with

    x(t) = sum_{k = 2, 4, ..., 2M}     a_k sin(k t)
    y(t) = sum_{k = 1, 3, ..., 2M - 1} b_k sin(k t)

Every such curve satisfies the semi-antiperiodicity ``gamma(t + pi) = (x, -y)``
and the reflection ``gamma(pi/2 + t) = (-x, y)(pi/2 - t)`` identically, passes
through the origin at ``t = 0`` and ``t = pi``, and ``x`` has zero mean.

The flat coefficient vector used by the optimizer is ``[a_2, ..., a_2M,
b_1, ..., b_{2M-1}]`` (ascending k, x block first).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * np.pi


def x_wavenumbers(modes: int) -> np.ndarray:
    return 2.0 * np.arange(1, modes + 1)


def y_wavenumbers(modes: int) -> np.ndarray:
    return 2.0 * np.arange(1, modes + 1) - 1.0


@dataclass(frozen=True, eq=False)
class SymmetricLoop:
    a: np.ndarray
    b: np.ndarray
    nc1: bool = False

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        if a.size < 1 or a.size != b.size:
            raise ValueError(f"need len(a) == len(b) >= 1, got {a.size} and {b.size}")
        if self.nc1 and b[0] != 0.0:
            raise ValueError("nc1 loop must have b_1 = 0")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def modes(self) -> int:
        return self.a.size

    @property
    def kx(self) -> np.ndarray:
        return x_wavenumbers(self.modes)

    @property
    def ky(self) -> np.ndarray:
        return y_wavenumbers(self.modes)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Wavenumber of each entry of the flat coefficient vector."""
        return np.concatenate([self.kx, self.ky])

    @classmethod
    def zeros(cls, modes: int, nc1: bool = False) -> "SymmetricLoop":
        return cls(np.zeros(modes), np.zeros(modes), nc1)

    @classmethod
    def from_modes(cls, modes: int, x=None, y=None, nc1: bool = False) -> "SymmetricLoop":
        """Build from ``{k: coefficient}`` dicts, e.g. ``from_modes(12, {2: 1.0}, {1: 1.0})``."""
        a = np.zeros(modes)
        b = np.zeros(modes)
        for k, v in (x or {}).items():
            if k % 2 or not 2 <= k <= 2 * modes:
                raise ValueError(f"x admits even k in [2, {2 * modes}], got {k}")
            a[k // 2 - 1] = v
        for k, v in (y or {}).items():
            if k % 2 == 0 or not 1 <= k <= 2 * modes - 1:
                raise ValueError(f"y admits odd k in [1, {2 * modes - 1}], got {k}")
            b[(k - 1) // 2] = v
        return cls(a, b, nc1)

    @classmethod
    def from_vector(cls, c, nc1: bool = False) -> "SymmetricLoop":
        c = np.asarray(c, dtype=float)
        if c.ndim != 1 or c.size % 2:
            raise ValueError("flat coefficient vector must have even length")
        m = c.size // 2
        return cls(c[:m], c[m:], nc1)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.a, self.b])

    def scaled(self, lam: float) -> "SymmetricLoop":
        return SymmetricLoop(lam * self.a, lam * self.b, self.nc1)

    def resized(self, modes: int) -> "SymmetricLoop":
        """Zero-pad or truncate to a different number of modes."""
        a = np.zeros(modes)
        b = np.zeros(modes)
        n = min(modes, self.modes)
        a[:n] = self.a[:n]
        b[:n] = self.b[:n]
        return SymmetricLoop(a, b, self.nc1)

    def to_dict(self) -> dict:
        return {
            "alpha-independent": {
                "modes": self.modes,
                "nc1": bool(self.nc1),
                "a": [float(v) for v in self.a],
                "b": [float(v) for v in self.b],
            }
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SymmetricLoop":
        body = d["alpha-independent"]
        loop = cls(body["a"], body["b"], bool(body["nc1"]))
        if loop.modes != int(body["modes"]):
            raise ValueError(f"modes field {body['modes']} disagrees with {loop.modes} coefficients")
        return loop

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SymmetricLoop":
        return cls.from_dict(json.loads(text))


def _series(coef, k, t, fn):
    t = np.asarray(t, dtype=float)
    return fn(np.multiply.outer(t, k)) @ coef


def evaluate(loop: SymmetricLoop, t) -> np.ndarray:
    """gamma(t); ``t`` may be a scalar or an array, output has a trailing axis of size 2."""
    x = _series(loop.a, loop.kx, t, np.sin)
    y = _series(loop.b, loop.ky, t, np.sin)
    return np.stack([x, y], axis=-1)


def derivative(loop: SymmetricLoop, t) -> np.ndarray:
    x = _series(loop.kx * loop.a, loop.kx, t, np.cos)
    y = _series(loop.ky * loop.b, loop.ky, t, np.cos)
    return np.stack([x, y], axis=-1)


def second_derivative(loop: SymmetricLoop, t) -> np.ndarray:
    x = _series(-loop.kx**2 * loop.a, loop.kx, t, np.sin)
    y = _series(-loop.ky**2 * loop.b, loop.ky, t, np.sin)
    return np.stack([x, y], axis=-1)


@dataclass(frozen=True, eq=False)
class SampledCurve:
    nodes: int
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray


def sample(loop: SymmetricLoop, nodes: int) -> SampledCurve:
    if nodes < 4 * loop.modes:
        raise ValueError(f"nodes={nodes} below the anti-aliasing floor 4*modes={4 * loop.modes}")
    t = TWO_PI * np.arange(nodes) / nodes
    return SampledCurve(nodes, t, evaluate(loop, t), derivative(loop, t))


class SymmetryReport(NamedTuple):
    semi_antiperiodic_x: bool
    semi_antiperiodic_y: bool
    reflection_x: bool
    reflection_y: bool

    @property
    def all(self) -> bool:
        return all(self)


def check_symmetries(curve, samples: int = 64, tol: float = 1e-12) -> SymmetryReport:
    """Check the four symmetry identities on ``samples`` uniform phases.

    ``curve`` is either a :class:`SymmetricLoop` or any callable mapping an
    array of phases to an ``(n, 2)`` array, which lets hand-built curves
    outside the basis be checked too.
    """
    if samples < 8:
        raise ValueError(f"need at least 8 samples, got {samples}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = (lambda t: evaluate(curve, t)) if isinstance(curve, SymmetricLoop) else curve
    t = TWO_PI * np.arange(samples) / samples
    p, shifted = g(t), g(t + np.pi)
    up, down = g(np.pi / 2 + t), g(np.pi / 2 - t)
    return SymmetryReport(
        bool(np.max(np.abs(shifted[:, 0] - p[:, 0])) <= tol),
        bool(np.max(np.abs(shifted[:, 1] + p[:, 1])) <= tol),
        bool(np.max(np.abs(up[:, 0] + down[:, 0])) <= tol),
        bool(np.max(np.abs(up[:, 1] - down[:, 1])) <= tol),
    )


def parseval_norms(loop: SymmetricLoop) -> tuple[float, float]:
    """(int |gamma|^2, int |gamma'|^2) over one period, from the coefficients."""
    c = loop.to_vector()
    k = loop.wavenumbers
    return float(np.pi * np.sum(c**2)), float(np.pi * np.sum(k**2 * c**2))


class PoincareCheck(NamedTuple):
    lhs: float
    rhs: float
    x_pair: tuple[float, float]
    y_pair: tuple[float, float]
    y_nc1_pair: tuple[float, float] | None

    @property
    def holds(self) -> bool:
        pairs = [(self.lhs, self.rhs), self.x_pair, self.y_pair]
        if self.y_nc1_pair is not None:
            pairs.append(self.y_nc1_pair)
        # saturated pairs are equal in exact arithmetic; allow a few ulps
        return all(lo <= hi * (1.0 + 8 * np.finfo(float).eps) for lo, hi in pairs)


def poincare_check(loop: SymmetricLoop) -> PoincareCheck:
    """Both sides of the Poincare bounds of the class.

    ``x_pair = (int x^2, 1/4 int x'^2)``, ``y_pair = (int y^2, int y'^2)``;
    for nc1 loops ``y_nc1_pair = (int y^2, 1/9 int y'^2)``.
    """
    x2 = float(np.pi * np.sum(loop.a**2))
    dx2 = float(np.pi * np.sum(loop.kx**2 * loop.a**2))
    y2 = float(np.pi * np.sum(loop.b**2))
    dy2 = float(np.pi * np.sum(loop.ky**2 * loop.b**2))
    nc1 = (y2, dy2 / 9.0) if loop.nc1 else None
    return PoincareCheck(x2 + y2, dx2 + dy2, (x2, dx2 / 4.0), (y2, dy2), nc1)
