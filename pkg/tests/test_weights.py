import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dlab.errors import InputError
from dlab.weights import (WeightSpec, check_mean_value, check_superharmonic, eval_weight,
                          eval_weight_gap, inf_estimate, integral_over_disk,
                          random_admissible_circles, superharmonic_sweep, weight_at_eps)

CATALOG = [WeightSpec.constant(1.0), WeightSpec.constant(3.0), WeightSpec.standard_alpha(0.3),
           WeightSpec.standard_alpha(0.5), WeightSpec.standard_alpha(1.0),
           WeightSpec.poisson(1.0), WeightSpec.poisson(np.exp(2.0j)),
           WeightSpec.log_reciprocal(), WeightSpec.one_minus_r2()]
IDS = [f"{w.kind}-{w.c or w.alpha or w.zeta or ''}" for w in CATALOG]


@pytest.mark.parametrize("w, z, expected", [
    (WeightSpec.one_minus_r2(), 0.6, 0.64),
    (WeightSpec.poisson(1.0), 0.0, 1.0),
    (WeightSpec.log_reciprocal(), math.exp(-1), 1.0),
    (WeightSpec.standard_alpha(0.5), 0.6j, 0.8),
])
def test_eval_examples(w, z, expected):
    assert eval_weight(w, z) == pytest.approx(expected, rel=1e-14)


def test_validation():
    with pytest.raises(InputError):
        WeightSpec.standard_alpha(1.5)
    with pytest.raises(InputError):
        WeightSpec.poisson(0.5)
    with pytest.raises(InputError):
        WeightSpec("gaussian")
    with pytest.raises(InputError):
        WeightSpec.constant(0.0)
    with pytest.raises(InputError):
        eval_weight(WeightSpec.one_minus_r2(), 1.0)


@pytest.mark.parametrize("w", CATALOG, ids=IDS)
def test_json_round_trip(w):
    assert WeightSpec.from_json(w.to_json()) == w


@pytest.mark.parametrize("w", CATALOG, ids=IDS)
def test_superharmonic_catalog(w):
    rep = check_superharmonic(w)
    assert rep.passed, rep


def test_superharmonic_examples():
    rep = check_superharmonic(WeightSpec.one_minus_r2())
    assert rep.max_discrete_laplacian == pytest.approx(-4.0, abs=1e-8)
    assert abs(check_superharmonic(WeightSpec.constant(1.0)).max_discrete_laplacian) <= 1e-12
    assert abs(check_superharmonic(WeightSpec.poisson(1.0)).max_extrapolated_laplacian) < 1.0


def test_subharmonic_functions_fail():
    assert not superharmonic_sweep(lambda z: np.abs(z) ** 2, 0.01).passed
    assert not superharmonic_sweep(lambda z: np.exp(z.real), 0.01).passed


def test_discrete_laplacian_matches_analytic_alpha():
    # Laplacian of (1 - r^2)^alpha is -4 alpha (1 - r^2)^(alpha - 2) (1 - alpha r^2)
    alpha, z, h = 0.4, 0.3 + 0.2j, 1e-3
    w = WeightSpec.standard_alpha(alpha)
    lap = (eval_weight(w, z + h) + eval_weight(w, z - h) + eval_weight(w, z + 1j * h)
           + eval_weight(w, z - 1j * h) - 4 * eval_weight(w, z)) / h ** 2
    r2 = abs(z) ** 2
    exact = -4 * alpha * (1 - r2) ** (alpha - 2) * (1 - alpha * r2)
    assert lap == pytest.approx(exact, rel=1e-5)


@pytest.mark.parametrize("w, center, radius, avg, ctr", [
    (WeightSpec.poisson(1.0), 0, 0.5, 1.0, 1.0),
    (WeightSpec.one_minus_r2(), 0, 0.5, 0.75, 1.0),
    (WeightSpec.constant(3.0), 0.2 + 0.1j, 0.3, 3.0, 3.0),
])
def test_mean_value_examples(w, center, radius, avg, ctr):
    rep = check_mean_value(w, center, radius)
    assert rep.passed
    assert rep.circle_average == pytest.approx(avg, abs=1e-12)
    assert rep.center_value == pytest.approx(ctr, abs=1e-12)


@pytest.mark.parametrize("w", CATALOG, ids=IDS)
def test_mean_value_random_circles(w):
    rng = np.random.default_rng(11)
    for c, rho in random_admissible_circles(w, 1000, rng):
        assert check_mean_value(w, c, rho).passed


def test_inf_estimates():
    assert inf_estimate(WeightSpec.constant(1.0)).sampled == pytest.approx(1.0)
    for w in (WeightSpec.one_minus_r2(), WeightSpec.log_reciprocal(), WeightSpec.poisson(1j)):
        est = inf_estimate(w)
        assert est.analytic == 0.0 and est.sampled < 1e-10


@pytest.mark.parametrize("w, expected", [
    (WeightSpec.constant(1.0), 1.0),
    (WeightSpec.one_minus_r2(), 0.5),
    (WeightSpec.standard_alpha(0.5), 2 / 3),
    (WeightSpec.poisson(np.exp(0.7j)), 1.0),
    (WeightSpec.log_reciprocal(), 0.5),
])
def test_integral_over_disk(w, expected):
    assert integral_over_disk(w) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("w", CATALOG, ids=IDS)
def test_positive_on_grid(w):
    x = np.linspace(-0.99, 0.99, 101)
    z = (x[:, None] + 1j * x[None, :]).ravel()
    z = z[(np.abs(z) < 0.995) & (np.abs(z) > 1e-3)]
    assert np.all(eval_weight(w, z) > 0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.001, 0.99), st.floats(0, 2 * np.pi))
def test_rotation_symmetry(r, theta):
    for w in (WeightSpec.constant(2.0), WeightSpec.standard_alpha(0.7), WeightSpec.log_reciprocal()):
        assert eval_weight(w, r * np.exp(1j * theta)) == pytest.approx(eval_weight(w, r), rel=1e-14)


def test_rotated_weight():
    w = WeightSpec.poisson(np.exp(1.0j))
    a = np.exp(0.4j)
    z = 0.3 - 0.5j
    assert eval_weight(w.rotated(a), z) == pytest.approx(eval_weight(w, a * z), rel=1e-13)
    assert w.default_boundary_point() == pytest.approx(-np.exp(1.0j))


def test_gap_evaluation_against_mpmath():
    mpmath.mp.dps = 50
    for w in CATALOG:
        for t in (0.3 + 0.1j, 1e-9 - 2e-10j, 3e-25):
            if w.kind == "poisson" and abs(w.zeta - 1) < 1e-12:
                continue
            zz = 1 - mpmath.mpc(t)
            d = 1 - abs(zz) ** 2
            if w.kind == "constant":
                ref = w.c
            elif w.kind in ("standard_alpha", "one_minus_r2"):
                ref = d ** w.alpha_value
            elif w.kind == "poisson":
                ref = d / abs(mpmath.mpc(w.zeta) - zz) ** 2
            else:
                ref = -mpmath.log(abs(zz))
            assert float(eval_weight_gap(w, t)) == pytest.approx(float(ref), rel=1e-12)
    assert weight_at_eps(WeightSpec.one_minus_r2(), 1e-30) == pytest.approx(2e-30, rel=1e-14)
