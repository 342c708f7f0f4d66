import json

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dlab.errors import HypothesisViolated, InputError, NormalizationFailure
from dlab.gkz import (NOT_POINT_EVALUATION, OUTSIDE_DISK, POINT_EVALUATION, CoeffTerm, EvalTerm,
                      ExpWitness, FunctionalSpec, apply_functional, classify_functional,
                      decompose, default_grid, exp_taylor, wco_extract, witness_search)
from dlab.series import TaylorPoly, evaluate
from dlab.zeros import certify_nonvanishing, poly_roots

F0_PLUS_DF0 = FunctionalSpec((CoeffTerm(0, 1.0), CoeffTerm(1, 1.0)))
AVERAGE = FunctionalSpec((EvalTerm(0.2, 0.5), EvalTerm(-0.2, 0.5)))


def _mp_apply(L, p):
    """L(exp p) with 50-digit arithmetic, Taylor coefficients by mpmath differentiation."""
    with mpmath.workdps(50):
        g = lambda z: mpmath.exp(sum(mpmath.mpc(c) * z ** (j + 1) for j, c in enumerate(p)))
        total = mpmath.mpc(0)
        for t in L.terms:
            if isinstance(t, CoeffTerm):
                total += mpmath.mpc(t.c) * mpmath.taylor(g, 0, t.k)[t.k]
            else:
                total += mpmath.mpc(t.c) * g(mpmath.mpc(t.z))
        return complex(total)


def test_apply_examples():
    assert apply_functional(FunctionalSpec((CoeffTerm(0, 1),)), TaylorPoly([7, 3])) == 7
    assert apply_functional(FunctionalSpec((EvalTerm(0.5, 1),)), TaylorPoly([0, 1])) == 0.5
    assert apply_functional(F0_PLUS_DF0, TaylorPoly([1, -1])) == 0
    # coefficient beyond the degree is zero
    assert apply_functional(FunctionalSpec((CoeffTerm(5, 1),)), TaylorPoly([1, 2])) == 0


_cplx = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(st.lists(_cplx, min_size=1, max_size=8), st.lists(_cplx, min_size=1, max_size=8), _cplx, _cplx,
       st.integers(0, 2 ** 31))
def test_apply_linearity(fc, gc, a, b, seed):
    rng = np.random.default_rng(seed)
    z = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    L = FunctionalSpec((CoeffTerm(int(rng.integers(0, 6)), complex(rng.normal(), rng.normal())),
                        EvalTerm(complex(z), complex(rng.normal(), rng.normal()))))
    f, g = TaylorPoly(fc), TaylorPoly(gc)
    lhs = apply_functional(L, f * a + g * b)
    rhs = a * apply_functional(L, f) + b * apply_functional(L, g)
    scale = 1 + sum(abs(t.c) for t in L.terms) * (abs(a) * np.abs(fc).sum() + abs(b) * np.abs(gc).sum())
    assert abs(lhs - rhs) <= 1e-13 * scale


def test_functional_json():
    obj = {"terms": [{"coeff": {"k": 0, "c": [1, 0]}}, {"eval": {"z": [0.2, 0], "c": [0.5, 0]}}]}
    L = FunctionalSpec.from_json(obj)
    assert L.terms == (CoeffTerm(0, 1.0), EvalTerm(0.2, 0.5))
    assert FunctionalSpec.from_json(json.loads(json.dumps(L.to_json()))) == L
    with pytest.raises(InputError, match=r"terms\[0\]\.eval\.z"):
        FunctionalSpec.from_json({"terms": [{"eval": {"z": [1, 0], "c": [1, 0]}}]})
    with pytest.raises(InputError):
        FunctionalSpec.from_json({"terms": [{"coeff": {"k": -1, "c": [1, 0]}}]})
    with pytest.raises(InputError):
        FunctionalSpec.from_json({"terms": []})
    with pytest.raises(InputError):
        EvalTerm(0.6 + 0.8j, 1.0)


def test_classify_examples():
    rep = classify_functional(FunctionalSpec((EvalTerm(0.5, 1),)))
    assert rep.verdict == POINT_EVALUATION and rep.a_hat == 0.5 and rep.max_monomial_residual == 0
    rep = classify_functional(F0_PLUS_DF0)
    assert rep.verdict == OUTSIDE_DISK and rep.a_hat == 1
    rep = classify_functional(AVERAGE)
    assert rep.verdict == NOT_POINT_EVALUATION and rep.failing_degree == 2
    assert rep.a_hat == 0 and rep.residuals[0] == pytest.approx(0.04, rel=1e-14)


def test_classify_scaled_point_evaluation():
    rep = classify_functional(FunctionalSpec((EvalTerm(0.3 - 0.4j, 3 - 1j),)))
    assert rep.verdict == POINT_EVALUATION
    assert rep.lambda_of_one == 3 - 1j and abs(rep.a_hat - (0.3 - 0.4j)) < 1e-15


def test_normalization_failure():
    with pytest.raises(NormalizationFailure):
        classify_functional(FunctionalSpec((CoeffTerm(1, 1.0),)))
    with pytest.raises(NormalizationFailure):
        classify_functional(FunctionalSpec((EvalTerm(0.1, 1.0), EvalTerm(0.2, -1.0))))


def test_point_evaluation_completeness():
    rng = np.random.default_rng(7)
    for _ in range(100):
        a = 0.95 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        rep = classify_functional(FunctionalSpec((EvalTerm(complex(a), 1.0),)))
        assert rep.verdict == POINT_EVALUATION and abs(rep.a_hat - a) < 1e-12


def test_exp_taylor_against_mpmath():
    p = np.array([0, 0.7 - 0.2j, -1.1j])
    g = exp_taylor(p, 12)
    with mpmath.workdps(40):
        ref = mpmath.taylor(lambda z: mpmath.exp(p[1] * z + p[2] * z * z), 0, 12)
    assert np.allclose(g, np.array([complex(c) for c in ref]), rtol=1e-13, atol=1e-15)


def test_witness_f0_plus_df0():
    res = witness_search(F0_PLUS_DF0)
    assert res.found
    assert abs(res.witness.p[0] + 1) < 1e-12 and abs(res.witness.p[1]) < 1e-12
    assert abs(res.value) < 1e-12 and abs(_mp_apply(F0_PLUS_DF0, res.witness.p)) < 1e-12


def test_witness_average():
    res = witness_search(AVERAGE)
    assert res.found and abs(res.value) < 1e-12
    c1, c2 = res.witness.p
    # the two evaluations must be opposite: Im(0.4 c1) is an odd multiple of pi, Re(c1) = 0
    assert abs(c1.real) < 1e-9
    k = c1.imag * 0.4 / np.pi
    assert abs(k - round(k)) < 1e-9 and round(k) % 2 == 1
    assert abs(_mp_apply(AVERAGE, res.witness.p)) < 1e-12
    # the pure exponential e^{i pi z / 0.4} is a witness too
    assert abs(_mp_apply(AVERAGE, [1j * np.pi / 0.4, 0])) < 1e-15


def test_witness_not_found_for_point_evaluation():
    res = witness_search(FunctionalSpec((EvalTerm(0.3, 1.0),)))
    assert not res.found and res.witness is None and res.starts_used == 64


def test_witness_values_agree_with_mpmath():
    rng = np.random.default_rng(3)
    for _ in range(10):
        terms = [CoeffTerm(int(rng.integers(0, 4)), complex(rng.normal(), rng.normal()))
                 for _ in range(2)]
        terms.append(EvalTerm(complex(0.5 * rng.uniform(), 0.3 * rng.uniform()), complex(rng.normal())))
        L = FunctionalSpec(tuple(terms))
        res = witness_search(L, budget=16)
        if res.found:
            assert abs(_mp_apply(L, res.witness.p)) < 1e-12
            assert np.all(np.abs(res.witness(np.linspace(-1, 1, 9))) > 0)


def test_witness_json_and_call():
    w = ExpWitness((-1.0, 0.5j))
    assert w(0.3) == pytest.approx(np.exp(-0.3 + 0.5j * 0.09))
    assert w.to_json() == {"type": "exp_poly", "p": [[-1.0, 0.0], [0.0, 0.5]]}


def test_witness_deterministic():
    assert witness_search(AVERAGE, seed=5).to_json() == witness_search(AVERAGE, seed=5).to_json()


def _dyadic_poly(rng, deg):
    c = (rng.integers(-2048, 2049, deg + 1) + 1j * rng.integers(-2048, 2049, deg + 1)) / 1024
    if c[-1] == 0:
        c[-1] = 1
    return TaylorPoly(c)


def _check_decomposition(f, d):
    assert d.g1 + d.g2 == f
    assert np.array_equal((d.g1 + d.g2).trim().coeffs, f.trim().coeffs)
    assert d.cert1.nonvanishing and d.cert2.nonvanishing
    assert d.g1.degree == 0


def test_decompose_examples():
    f = TaylorPoly([0, 0, 1])
    assert certify_nonvanishing(f - 2.0).nonvanishing
    _check_decomposition(f, decompose(f))
    d = decompose(TaylorPoly([5.0]))
    assert d.g1 == TaylorPoly([2.5]) and d.g2 == TaylorPoly([2.5])
    z = TaylorPoly([0, 1])
    d = decompose(z)
    assert abs(d.lam) > 1 and decompose(z).lam == d.lam
    _check_decomposition(z, d)
    with pytest.raises(InputError):
        decompose(TaylorPoly([0.0, 0.0]))


def test_decompose_random_dyadic():
    rng = np.random.default_rng(11)
    for _ in range(30):
        f = _dyadic_poly(rng, int(rng.integers(1, 11)))
        d = decompose(f, seed=4)
        _check_decomposition(f, d)
        # independent check: g2's roots all sit outside the closed disk
        assert np.all(np.abs(poly_roots(d.g2)) > 1)
        assert abs(d.lam) <= np.sqrt(np.sum(np.arange(f.coeffs.size) * np.abs(f.coeffs) ** 2)) + 1
        assert decompose(f, seed=4).lam == d.lam


def test_wco_examples():
    half = [TaylorPoly.monomial(n, 0.5 ** n) for n in range(6)]
    rep = wco_extract(half)
    assert rep.residual < 1e-15 and rep.self_map and rep.psi_nonvanishing
    assert np.allclose(rep.phi_samples, rep.grid / 2, atol=0, rtol=1e-15)
    table = [TaylorPoly([1, 1]) * TaylorPoly.monomial(2 * n) for n in range(6)]
    rep = wco_extract(table)
    assert rep.residual < 1e-12 and rep.self_map
    with pytest.raises(HypothesisViolated) as exc:
        wco_extract([TaylorPoly.monomial(n, 2.0 ** n) for n in range(4)])
    assert exc.value.report is not None and not exc.value.report.self_map


def test_wco_psi_vanishing():
    table = [TaylorPoly([0, 1]), TaylorPoly([0, 0, 1])]
    with pytest.raises(HypothesisViolated):
        wco_extract(table)
    # psi = z - 0.5 is nonzero on a grid that misses 0.5, but is not zero-free
    rep = wco_extract([TaylorPoly([-0.5, 1]), TaylorPoly([0, -0.5, 1])], default_grid(5, 7))
    assert not rep.psi_nonvanishing


def test_wco_round_trip():
    rng = np.random.default_rng(5)
    grid = default_grid()
    for _ in range(50):
        roots = 1.5 + 3 * rng.uniform(size=2)
        roots = roots * np.exp(2j * np.pi * rng.uniform(size=2))
        psi = TaylorPoly(np.poly(roots)[::-1])
        phi = TaylorPoly(rng.normal(size=3) + 1j * rng.normal(size=3))
        phi = phi * (0.8 / np.abs(evaluate(phi, grid)).max())
        table = [psi]
        power = TaylorPoly([1.0])
        for n in range(1, 6):
            power = power * phi
            table.append(psi * power)
        rep = wco_extract(table, grid)
        assert rep.residual < 1e-9 and rep.self_map and rep.psi_nonvanishing
        assert np.allclose(rep.phi_samples, evaluate(phi, grid), atol=1e-12)


def test_wco_input_errors():
    with pytest.raises(InputError):
        wco_extract([TaylorPoly([1.0])])
    with pytest.raises(InputError):
        wco_extract([TaylorPoly([1.0]), TaylorPoly([0, 1])], grid=[1.0])
