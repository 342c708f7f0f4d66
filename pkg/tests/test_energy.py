import math

import numpy as np
import pytest
from scipy.special import beta

from dlab.energy import (composed_weighted_energy, dirichlet_energy, energy_report, h2_norm_sq,
                         h2_norm_sq_boundary, h2_norm_sq_composed, image_area_bound,
                         weighted_energy)
from dlab.errors import InputError
from dlab.mobius import MobiusInvolution
from dlab.series import TaylorPoly, compose_mobius, evaluate
from dlab.weights import WeightSpec, weight_at_eps

H = TaylorPoly([0, 1, -1])
CATALOG = [WeightSpec.constant(1.0), WeightSpec.standard_alpha(0.5), WeightSpec.one_minus_r2(),
           WeightSpec.poisson(-1.0), WeightSpec.poisson(np.exp(2.5j)), WeightSpec.log_reciprocal()]


def test_h2_examples():
    assert h2_norm_sq(TaylorPoly.monomial(7)) == 1.0
    assert h2_norm_sq(TaylorPoly([3, 4j])) == 25.0
    f = TaylorPoly([1, 2 - 1j, 0.5j, -3])
    assert h2_norm_sq_boundary(f) == pytest.approx(h2_norm_sq(f), rel=1e-14)


def test_h2_of_h_composed_closed_form():
    # ||h o phi||^2 = 2 - 2 Re(a conj(a_n)) for h(z) = z (a - z), |a| = 1
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = np.exp(2j * np.pi * rng.uniform())
        an = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        h = TaylorPoly([0, a, -1])
        phi = MobiusInvolution(an)
        exact = 2 - 2 * (a * np.conj(an)).real
        assert h2_norm_sq(compose_mobius(h, phi)) == pytest.approx(exact, abs=1e-12)
        assert h2_norm_sq_composed(h, phi) == pytest.approx(exact, abs=1e-12)
    for eps in (1e-3, 1e-9, 1e-20):
        assert h2_norm_sq_composed(H, MobiusInvolution.from_eps(eps)) == pytest.approx(2 * eps, rel=1e-9)


@pytest.mark.parametrize("coeffs, expected", [([0, 0, 0, 1], 3.0), ([3, 0, 2], 8.0), ([5], 0.0)])
def test_dirichlet_examples(coeffs, expected):
    f = TaylorPoly(coeffs)
    assert dirichlet_energy(f) == expected
    assert dirichlet_energy(f, "quadrature") == pytest.approx(expected, abs=1e-12)


def test_dirichlet_coefficient_vs_quadrature_random():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = int(rng.integers(1, 21))
        f = TaylorPoly(rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1))
        exact = dirichlet_energy(f)
        assert abs(exact - dirichlet_energy(f, "quadrature")) < 1e-8 * (1 + exact)
    with pytest.raises(InputError):
        dirichlet_energy(TaylorPoly([1]), "montecarlo")


@pytest.mark.parametrize("n", [1, 2, 5, 13, 20])
def test_weighted_monomials_against_beta_integrals(n):
    f = TaylorPoly.monomial(n)
    assert weighted_energy(f, WeightSpec.one_minus_r2()) == pytest.approx(n / (n + 1), abs=1e-12)
    for alpha in (0.25, 0.5, 1.0):
        # 2 n^2 int r^(2n-1) (1-r^2)^alpha dr = n^2 B(n, alpha + 1)
        exact = n * n * beta(n, alpha + 1)
        assert weighted_energy(f, WeightSpec.standard_alpha(alpha)) == pytest.approx(exact, rel=1e-10)
    assert weighted_energy(f, WeightSpec.poisson(np.exp(0.3j))) == pytest.approx(n, rel=1e-12)


def test_weighted_examples():
    z = TaylorPoly([0, 1])
    assert weighted_energy(z, WeightSpec.poisson(1j)) == pytest.approx(1.0, abs=1e-12)
    assert weighted_energy(z, WeightSpec.constant(1.0)) == pytest.approx(1.0, abs=1e-12)


def test_log_weight_identity():
    # w = log 1/|z| gives D_w(f) = (||f||^2 - |f(0)|^2) / 2
    rng = np.random.default_rng(9)
    for _ in range(5):
        f = TaylorPoly(rng.normal(size=8) + 1j * rng.normal(size=8))
        exact = (h2_norm_sq(f) - abs(f.coeffs[0]) ** 2) / 2
        assert weighted_energy(f, WeightSpec.log_reciprocal()) == pytest.approx(exact, rel=1e-10)


def test_poisson_against_fourier_series():
    # P_zeta = sum_m r^|m| e^{im(theta - arg zeta)} integrated term by term against |f'|^2
    rng = np.random.default_rng(2)
    for _ in range(5):
        f = TaylorPoly(rng.normal(size=7) + 1j * rng.normal(size=7))
        zeta = np.exp(2j * np.pi * rng.uniform())
        b = f.coeffs[1:] * np.arange(1, 7)
        j, k = np.meshgrid(np.arange(6), np.arange(6), indexing="ij")
        exact = np.sum(b[j] * np.conj(b[k]) * zeta ** (j - k) / (np.maximum(j, k) + 1)).real
        assert weighted_energy(f, WeightSpec.poisson(zeta)) == pytest.approx(exact, rel=1e-10)


def test_area_bound_examples():
    assert image_area_bound(TaylorPoly([0, 1])) == pytest.approx(math.pi)
    assert image_area_bound(TaylorPoly([0, 0, 1])) == pytest.approx(2 * math.pi)
    assert image_area_bound(TaylorPoly([4])) == 0.0


def test_monotone_scaling_and_containment():
    f = TaylorPoly([1, 0.5, -2j, 0.25, 1])
    small, mid, big = WeightSpec.one_minus_r2(), WeightSpec.standard_alpha(0.5), WeightSpec.constant(1.0)
    e = [weighted_energy(f, w) for w in (small, mid, big)]
    assert e[0] <= e[1] + 1e-12 and e[1] <= e[2] + 1e-12
    assert weighted_energy(f, WeightSpec.constant(2.5)) == pytest.approx(2.5 * e[2], rel=1e-15)
    assert e[2] >= 1.0 * dirichlet_energy(f) - 1e-10


@pytest.mark.parametrize("w", CATALOG, ids=lambda w: w.kind)
@pytest.mark.parametrize("eps", [0.3, 0.1])
def test_composed_route_matches_series_route(w, eps):
    phi = MobiusInvolution.from_eps(eps)
    series = weighted_energy(compose_mobius(H, phi), w)
    q = composed_weighted_energy(H, phi, w, full_output=True)
    assert q.converged
    assert q.value == pytest.approx(series, rel=1e-10)


@pytest.mark.parametrize("w", CATALOG[1:], ids=lambda w: w.kind)
def test_composed_route_deep_parameters(w):
    for eps in (1e-6, 1e-15, 1e-40):
        q = composed_weighted_energy(H, MobiusInvolution.from_eps(eps), w, full_output=True)
        assert q.converged
        assert 0 < q.value <= 9 * weight_at_eps(w, eps)


def test_composed_needs_eps_form():
    with pytest.raises(InputError):
        composed_weighted_energy(H, MobiusInvolution(0.5), WeightSpec.one_minus_r2())


def test_energy_report():
    f = TaylorPoly([0, 0, 1])
    rep = energy_report(f, WeightSpec.one_minus_r2())
    assert rep.dirichlet == 2 and rep.h2_norm_sq == 1
    assert rep.weighted_dirichlet == pytest.approx(2 / 3, abs=1e-12)
    assert rep.norm_sq == pytest.approx(1 + 2 / 3)
    assert rep.discrepancy < 1e-12
    assert rep.to_json()["nodes"]["weighted"]["converged"]
    with pytest.raises(InputError):
        weighted_energy(f, WeightSpec.constant(1.0), n_r=8)
    z = 0.1 + 0.2j
    assert evaluate(f, z) == pytest.approx(z * z)
