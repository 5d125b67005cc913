import numpy as np
import pytest

from choreo.errors import CollisionDetected, DegenerateLoop
from choreo.functionals import (
    ProblemParams,
    envelope_constant,
    gradients,
    kinetic,
    log_F_change,
    optimal_scale,
    pair_integrals,
    potential,
    scale_envelope,
    scale_invariant_F,
)
from choreo.loop import SymmetricLoop

from conftest import perturbed_seed, seed_loop

P1 = ProblemParams(alpha=1.0)


def fine_grid_V(x_coef, y_coef, alpha, nodes=1_000_000, mass=1.0):
    """Trapezoid on a fine grid, evaluating gamma straight from {k: c} dicts."""
    t = 2 * np.pi * np.arange(nodes) / nodes
    total = 0.0
    bodies = []
    for i in range(3):
        s = t + 2 * np.pi * i / 3
        x = sum(c * np.sin(k * s) for k, c in x_coef.items())
        y = sum(c * np.sin(k * s) for k, c in y_coef.items())
        bodies.append((x, y))
    for i, j in ((0, 1), (0, 2), (1, 2)):
        d = np.hypot(bodies[i][0] - bodies[j][0], bodies[i][1] - bodies[j][1])
        total += np.sum(d**-alpha)
    return mass**2 * 2 * np.pi / nodes * total


def test_params_validation():
    for bad in (0.0, 2.0, -1.0, 2.5):
        with pytest.raises(ValueError):
            ProblemParams(alpha=bad)
    with pytest.raises(ValueError):
        ProblemParams(mass=0.0)
    with pytest.raises(ValueError):
        ProblemParams(collision_floor=0.0)
    with pytest.raises(ValueError):
        potential(seed_loop(12), ProblemParams(quad_nodes=40))


def test_exponents():
    p = ProblemParams(alpha=1.0)
    assert (p.p, p.q) == pytest.approx((1 / 3, 2 / 3))
    assert 2 * p.p - p.alpha * p.q == 0.0


def test_kinetic_seed():
    # Parseval: pi * (4 + 1) = 5 pi, times 3m/2
    assert kinetic(seed_loop(), P1) == pytest.approx(15 * np.pi / 2, rel=1e-15)
    assert kinetic(seed_loop(), ProblemParams(mass=2.0)) == pytest.approx(15 * np.pi, rel=1e-15)
    assert kinetic(SymmetricLoop.zeros(4), P1) == 0.0


@pytest.mark.parametrize("lam", [0.1, 0.7, 3.0, 10.0])
def test_homothety_laws(lam, rng):
    loop = perturbed_seed(rng)
    for alpha in (0.5, 1.0, 1.5):
        p = ProblemParams(alpha=alpha)
        assert kinetic(loop.scaled(lam), p) == pytest.approx(lam**2 * kinetic(loop, p), rel=1e-14)
        V, _ = potential(loop, p)
        Vl, _ = potential(loop.scaled(lam), p)
        assert Vl == pytest.approx(lam**-alpha * V, rel=1e-13)


def test_potential_matches_fine_grid():
    loop = seed_loop().scaled(0.3)
    V, dmin = potential(loop, P1)
    oracle = fine_grid_V({2: 0.3}, {1: 0.3}, 1.0)
    assert abs(V - oracle) / oracle <= 1e-8
    assert dmin > 0


def test_engineered_collision():
    # only multiples of 3 in the wavenumbers: the three bodies coincide at all times
    loop = SymmetricLoop.from_modes(4, {6: 1.0}, {3: 1.0})
    with pytest.raises(CollisionDetected) as info:
        potential(loop, P1)
    assert info.value.min_distance < P1.collision_floor


def test_collision_floor_is_enforced():
    loop = seed_loop().scaled(0.3)
    _, dmin = potential(loop, P1)
    with pytest.raises(CollisionDetected):
        potential(loop, ProblemParams(collision_floor=dmin * 1.01))


def test_pair_integrals_equal(rng):
    loop = perturbed_seed(rng)
    parts = pair_integrals(loop, P1)
    np.testing.assert_allclose(parts, parts.mean(), rtol=1e-12)
    assert parts.sum() == pytest.approx(potential(loop, P1)[0], rel=1e-14)


def test_scale_envelope_at_one_is_action(rng):
    loop = perturbed_seed(rng)
    rep = scale_invariant_F(loop, P1)
    assert scale_envelope(loop, P1, 1.0) == pytest.approx(rep.K + rep.V, rel=1e-15)
    assert rep.action == pytest.approx(rep.K + rep.V)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_scale_envelope_at_optimum(alpha, rng):
    p = ProblemParams(alpha=alpha)
    loop = perturbed_seed(rng)
    rep = scale_invariant_F(loop, p)
    K, V = kinetic(loop, p), potential(loop, p)[0]
    independent = envelope_constant(alpha) * K ** (alpha / (alpha + 2)) * V ** (2 / (alpha + 2))
    phi = scale_envelope(loop, p, rep.lambda_star)
    assert abs(phi - independent) / independent <= 1e-10
    assert rep.lambda_star ** (alpha + 2) == pytest.approx(alpha * V / (2 * K), rel=1e-13)


def test_scale_envelope_convex(rng):
    loop = perturbed_seed(rng)
    for _ in range(50):
        l1, l2 = np.exp(rng.uniform(-3, 3, 2))
        mid = scale_envelope(loop, P1, 0.5 * (l1 + l2))
        assert mid <= 0.5 * (scale_envelope(loop, P1, l1) + scale_envelope(loop, P1, l2)) * (1 + 1e-14)


def test_scale_envelope_rejects_nonpositive_lambda():
    with pytest.raises(ValueError):
        scale_envelope(seed_loop(), P1, 0.0)


@pytest.mark.parametrize("lam", [0.1, 3.0, 10.0])
def test_F_scale_invariant(lam, rng):
    loop = perturbed_seed(rng)
    F = scale_invariant_F(loop, P1).F
    assert scale_invariant_F(loop.scaled(lam), P1).F == pytest.approx(F, rel=1e-12)


def test_C_alpha_at_one():
    # (3/2) * 2^(1/3), written out independently
    assert envelope_constant(1.0) == pytest.approx(1.8898815748423097, rel=1e-15)
    assert envelope_constant(1.0) == pytest.approx(1.5 * 2 ** (1 / 3), rel=1e-15)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_envelope_grid_search(alpha, rng):
    p = ProblemParams(alpha=alpha)
    loop = perturbed_seed(rng)
    rep = scale_invariant_F(loop, p)
    lam = np.logspace(-3, 3, 2000)
    phi = lam**2 * rep.K + lam**-alpha * rep.V
    target = rep.C_alpha * rep.F
    assert phi.min() >= target * (1 - 1e-12)
    assert (phi.min() - target) / target <= 1e-4
    assert lam[np.argmin(phi)] == pytest.approx(rep.lambda_star, rel=0.01)


def test_F_report_fields(rng):
    loop = perturbed_seed(rng)
    rep = scale_invariant_F(loop, P1)
    assert rep.F == pytest.approx(rep.K ** rep.p * rep.V ** rep.q, rel=1e-15)
    assert rep.lambda_star == pytest.approx(optimal_scale(rep.K, rep.V, 1.0))
    assert rep.C_alpha == envelope_constant(1.0)


def test_degenerate_loop():
    with pytest.raises(DegenerateLoop):
        scale_invariant_F(SymmetricLoop.zeros(4), P1)


def _central_fd(fun, c, h):
    g = np.empty_like(c)
    for i in range(c.size):
        e = np.zeros_like(c)
        e[i] = h
        g[i] = (fun(c + e) - fun(c - e)) / (2 * h)
    return g


def _rel_errors(analytic, fd):
    # entries forced to zero by translation invariance get an absolute floor,
    # sized above the ~eps*V/h rounding noise of the difference quotient
    denom = np.maximum(np.abs(analytic), 1e-3 * np.abs(analytic).max())
    return np.abs(analytic - fd) / denom


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_gradients_vs_finite_differences(alpha, rng):
    p = ProblemParams(alpha=alpha)
    for _ in range(3):
        loop = perturbed_seed(rng).scaled(0.7)
        gK, gV = gradients(loop, p)
        c = loop.to_vector()
        fdK = _central_fd(lambda v: kinetic(SymmetricLoop.from_vector(v), p), c, 1e-6)
        fdV = _central_fd(lambda v: potential(SymmetricLoop.from_vector(v), p)[0], c, 1e-6)
        assert _rel_errors(gK, fdK).max() <= 1e-6
        assert _rel_errors(gV, fdV).max() <= 1e-6


def test_grad_K_zero_entries():
    gK, _ = gradients(seed_loop(), P1)
    nz = np.flatnonzero(gK)
    np.testing.assert_array_equal(nz, [0, 12])


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_radial_identities(alpha, rng):
    p = ProblemParams(alpha=alpha)
    for _ in range(5):
        loop = perturbed_seed(rng)
        rep = scale_invariant_F(loop, p)
        c = loop.to_vector()
        assert rep.grad_K @ c == pytest.approx(2 * rep.K, rel=1e-12)
        assert rep.grad_V @ c == pytest.approx(-alpha * rep.V, rel=1e-9)
        scale = np.linalg.norm(rep.grad_F) * np.linalg.norm(c)
        assert abs(rep.grad_F @ c) <= 1e-9 * scale


def test_grad_F_chain_rule(rng):
    loop = perturbed_seed(rng)
    rep = scale_invariant_F(loop, P1)
    direct = rep.p * rep.K ** (rep.p - 1) * rep.V**rep.q * rep.grad_K + rep.q * rep.K**rep.p * rep.V ** (rep.q - 1) * rep.grad_V
    np.testing.assert_allclose(rep.grad_F, direct, rtol=1e-12, atol=1e-14 * np.abs(direct).max())


def test_quadrature_doubling(rng):
    loop = perturbed_seed(rng, modes=12)
    V1, _ = potential(loop, ProblemParams(quad_nodes=512))
    V2, _ = potential(loop, ProblemParams(quad_nodes=1024))
    assert abs(V1 - V2) / V2 <= 1e-10


def test_log_F_change_matches_direct_difference(rng):
    loop = perturbed_seed(rng)
    rep = scale_invariant_F(loop, P1)
    d = rng.normal(size=loop.to_vector().size)
    for t in (1e-2, 1e-4):
        new = SymmetricLoop.from_vector(loop.to_vector() + t * d)
        direct = np.log(scale_invariant_F(new, P1).F / rep.F)
        assert log_F_change(loop, new, P1, rep.K, rep.V) == pytest.approx(direct, rel=1e-9)


def test_log_F_change_resolves_tiny_steps(rng):
    loop = perturbed_seed(rng)
    rep = scale_invariant_F(loop, P1)
    d = -rep.grad_F / np.linalg.norm(rep.grad_F)
    # first-order prediction holds far below the rounding level of F itself
    for t in (1e-9, 1e-11, 1e-13):
        new = SymmetricLoop.from_vector(loop.to_vector() + t * d)
        pred = t * (rep.grad_F @ d) / rep.F
        assert log_F_change(loop, new, P1, rep.K, rep.V) == pytest.approx(pred, rel=1e-3)


def test_log_F_change_collision():
    loop = seed_loop(4).scaled(0.3)
    rep = scale_invariant_F(loop, P1)
    bad = SymmetricLoop.from_modes(4, {6: 1.0}, {3: 1.0})
    with pytest.raises(CollisionDetected):
        log_F_change(loop, bad, P1, rep.K, rep.V)


def test_evaluation_is_deterministic(rng):
    loop = perturbed_seed(rng)
    a = scale_invariant_F(loop, P1)
    b = scale_invariant_F(loop, P1)
    assert a.V == b.V and np.array_equal(a.grad_V, b.grad_V)
