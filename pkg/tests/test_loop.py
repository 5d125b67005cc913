import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choreo.loop import (
    SymmetricLoop,
    check_symmetries,
    derivative,
    evaluate,
    parseval_norms,
    poincare_check,
    sample,
    second_derivative,
)

from conftest import random_loop, seed_loop

DATA = Path(__file__).parent / "data"


def coefficients(modes_max=10, nc1=False):
    @st.composite
    def build(draw):
        m = draw(st.integers(1, modes_max))
        vals = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
        a = draw(st.lists(vals, min_size=m, max_size=m))
        b = draw(st.lists(vals, min_size=m, max_size=m))
        if nc1:
            b[0] = 0.0
        return SymmetricLoop(a, b, nc1)

    return build()


def test_evaluate_seed():
    s = seed_loop()
    np.testing.assert_allclose(evaluate(s, np.pi / 2), [0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(evaluate(s, np.pi / 4), [1.0, np.sqrt(2) / 2], atol=1e-15)
    assert np.all(evaluate(s, 0.0) == 0.0)


def test_evaluate_any_loop_at_zero(rng):
    assert np.all(evaluate(random_loop(rng), 0.0) == 0.0)


def test_derivative_seed():
    s = seed_loop()
    np.testing.assert_allclose(derivative(s, 0.0), [2.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(derivative(s, np.pi / 2), [-2.0, 0.0], atol=1e-15)
    assert np.all(derivative(SymmetricLoop.zeros(5), 1.234) == 0.0)


def test_derivatives_match_finite_differences(rng):
    loop = random_loop(rng, modes=6)
    t = np.linspace(0.1, 6.0, 17)
    h = 1e-5
    fd1 = (evaluate(loop, t + h) - evaluate(loop, t - h)) / (2 * h)
    fd2 = (evaluate(loop, t + h) - 2 * evaluate(loop, t) + evaluate(loop, t - h)) / h**2
    np.testing.assert_allclose(derivative(loop, t), fd1, atol=1e-7)
    np.testing.assert_allclose(second_derivative(loop, t), fd2, atol=1e-3)


def test_evaluate_vectorised_shape():
    s = seed_loop(4)
    assert evaluate(s, np.zeros((3, 5))).shape == (3, 5, 2)
    assert evaluate(s, 0.3).shape == (2,)


def test_check_symmetries_seed_and_zero():
    assert check_symmetries(seed_loop(), 64, 1e-12).all
    assert check_symmetries(SymmetricLoop.zeros(3), 64, 1e-12).all


def test_check_symmetries_detects_cosine_in_x():
    s = seed_loop()

    def curve(t):
        p = evaluate(s, t)
        p[..., 0] += 0.1 * np.cos(t)
        return p

    rep = check_symmetries(curve, 64, 1e-12)
    assert not rep.semi_antiperiodic_x
    assert rep.semi_antiperiodic_y


def test_check_symmetries_rejects_few_samples():
    with pytest.raises(ValueError):
        check_symmetries(seed_loop(), 7, 1e-12)
    with pytest.raises(ValueError):
        check_symmetries(seed_loop(), 8, 0.0)


@settings(max_examples=100, deadline=None)
@given(coefficients())
def test_basis_closure(loop):
    scale = max(1.0, float(np.abs(loop.to_vector()).sum()))
    assert check_symmetries(loop, 256, 1e-12 * scale).all


def test_node_exact(rng):
    for _ in range(20):
        loop = random_loop(rng)
        assert np.all(evaluate(loop, 0.0) == 0.0)
        assert np.all(np.abs(evaluate(loop, np.pi)) <= 1e-14 * np.abs(loop.to_vector()).sum())


def test_zero_mean_of_x(rng):
    loop = random_loop(rng, modes=7)
    cs = sample(loop, 64)
    assert abs(cs.positions[:, 0].mean()) < 1e-15


def test_parseval_examples():
    assert parseval_norms(seed_loop()) == pytest.approx((2 * np.pi, 5 * np.pi), rel=1e-15)
    assert parseval_norms(SymmetricLoop.zeros(4)) == (0.0, 0.0)
    assert parseval_norms(SymmetricLoop.from_modes(4, y={3: 2.0})) == pytest.approx((4 * np.pi, 36 * np.pi), rel=1e-15)


@pytest.mark.parametrize("modes", [1, 3, 8, 12])
def test_parseval_matches_trapezoid(rng, modes):
    loop = random_loop(rng, modes)
    for nodes in (4 * modes + 1, 8 * modes, 512):
        cs = sample(loop, nodes)
        w = 2 * np.pi / nodes
        g2 = w * np.sum(cs.positions**2)
        dg2 = w * np.sum(cs.velocities**2)
        p, dp = parseval_norms(loop)
        assert abs(g2 - p) / p <= 1e-10
        assert abs(dg2 - dp) / dp <= 1e-10


def test_sample_floor_and_grid():
    loop = seed_loop(4)
    with pytest.raises(ValueError):
        sample(loop, 15)
    cs = sample(loop, 16)
    np.testing.assert_allclose(cs.times, 2 * np.pi * np.arange(16) / 16)


def test_poincare_examples():
    pc = poincare_check(seed_loop())
    assert (pc.lhs, pc.rhs) == pytest.approx((2 * np.pi, 5 * np.pi))
    assert pc.x_pair[0] == pytest.approx(pc.x_pair[1], rel=1e-15)  # k = 2 saturates
    assert pc.y_pair[0] == pytest.approx(pc.y_pair[1], rel=1e-15)  # k = 1 saturates
    pc4 = poincare_check(SymmetricLoop.from_modes(4, {4: 1.0}))
    assert pc4.x_pair == pytest.approx((np.pi, 4 * np.pi))


@settings(max_examples=200, deadline=None)
@given(coefficients())
def test_poincare_property(loop):
    assert poincare_check(loop).holds


@settings(max_examples=200, deadline=None)
@given(coefficients(nc1=True))
def test_poincare_nc1_property(loop):
    pc = poincare_check(loop)
    assert pc.y_nc1_pair is not None
    assert pc.holds


def test_poincare_agrees_with_parseval(rng):
    loop = random_loop(rng)
    pc = poincare_check(loop)
    assert (pc.lhs, pc.rhs) == pytest.approx(parseval_norms(loop), rel=1e-14)


def test_nc1_invariant():
    with pytest.raises(ValueError):
        SymmetricLoop([1.0], [1.0], nc1=True)
    loop = SymmetricLoop([1.0, 0.0], [0.0, 1.0], nc1=True)
    assert loop.b[0] == 0.0


def test_from_modes_rejects_wrong_parity():
    with pytest.raises(ValueError):
        SymmetricLoop.from_modes(4, {3: 1.0})
    with pytest.raises(ValueError):
        SymmetricLoop.from_modes(4, y={2: 1.0})
    with pytest.raises(ValueError):
        SymmetricLoop.from_modes(2, {6: 1.0})


def test_flat_vector_order():
    loop = SymmetricLoop.from_modes(3, {2: 1.0, 6: 3.0}, {1: 4.0, 5: 6.0})
    np.testing.assert_array_equal(loop.to_vector(), [1, 0, 3, 4, 0, 6])
    np.testing.assert_array_equal(loop.wavenumbers, [2, 4, 6, 1, 3, 5])
    assert SymmetricLoop.from_vector(loop.to_vector()).to_vector().tolist() == [1, 0, 3, 4, 0, 6]


def test_json_golden():
    loop = SymmetricLoop.from_modes(3, {2: 1.0}, {1: 1.0, 5: -0.25})
    golden = json.loads((DATA / "seed_loop.json").read_text())
    assert loop.to_dict() == golden
    back = SymmetricLoop.from_json((DATA / "seed_loop.json").read_text())
    np.testing.assert_array_equal(back.to_vector(), loop.to_vector())


def test_json_round_trip_exact(rng):
    loop = random_loop(rng, nc1=True)
    back = SymmetricLoop.from_json(loop.to_json())
    np.testing.assert_array_equal(back.to_vector(), loop.to_vector())
    assert back.nc1


def test_json_modes_mismatch():
    d = seed_loop(2).to_dict()
    d["alpha-independent"]["modes"] = 3
    with pytest.raises(ValueError):
        SymmetricLoop.from_dict(d)


def test_loop_is_immutable():
    loop = seed_loop(2)
    with pytest.raises(ValueError):
        loop.a[0] = 3.0


def test_resized():
    loop = seed_loop(3)
    big = loop.resized(5)
    np.testing.assert_array_equal(big.a, [1, 0, 0, 0, 0])
    np.testing.assert_array_equal(big.resized(3).to_vector(), loop.to_vector())
