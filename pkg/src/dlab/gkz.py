"""Linear functionals that never vanish on zero-free functions, the
nowhere-vanishing decomposition, and weighted composition operators.

A functional is a finite list of coefficient and point-evaluation terms.
Witnesses are exponentials exp(p) of polynomials with p(0) = 0, which are
zero-free by construction, so a witness never needs a zero search.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .energy import dirichlet_energy
from .errors import HypothesisViolated, InputError, NormalizationFailure, SearchExhausted
from .series import TaylorPoly, evaluate
from .zeros import NonvanishingCertificate, certify_nonvanishing


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _complex_at(obj, path):
    if not (isinstance(obj, list) and len(obj) == 2):
        raise InputError(f"{path} must be a [re, im] pair")
    try:
        return complex(float(obj[0]), float(obj[1]))
    except (TypeError, ValueError):
        raise InputError(f"{path} must hold two numbers") from None


@dataclass(frozen=True)
class CoeffTerm:
    """c * [z^k] f"""
    k: int
    c: complex = 1.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise InputError("CoeffTerm.k must be a nonnegative integer")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "c", complex(self.c))


@dataclass(frozen=True)
class EvalTerm:
    """c * f(z) with |z| < 1"""
    z: complex
    c: complex = 1.0

    def __post_init__(self):
        z = complex(self.z)
        if not abs(z) < 1.0:
            raise InputError(f"EvalTerm.z must satisfy |z| < 1, got |z| = {abs(z)}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "c", complex(self.c))


@dataclass(frozen=True)
class FunctionalSpec:
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise InputError("a functional needs at least one term")
        for t in terms:
            if not isinstance(t, (CoeffTerm, EvalTerm)):
                raise InputError(f"unknown term {t!r}")
        object.__setattr__(self, "terms", terms)

    def __call__(self, f):
        return apply_functional(self, f)

    def to_json(self):
        out = []
        for t in self.terms:
            if isinstance(t, CoeffTerm):
                out.append({"coeff": {"k": t.k, "c": _pair(t.c)}})
            else:
                out.append({"eval": {"z": _pair(t.z), "c": _pair(t.c)}})
        return {"terms": out}

    @classmethod
    def from_json(cls, obj) -> "FunctionalSpec":
        if not isinstance(obj, dict) or not isinstance(obj.get("terms"), list):
            raise InputError('functional file needs a "terms" list')
        terms = []
        for i, item in enumerate(obj["terms"]):
            path = f"terms[{i}]"
            if not isinstance(item, dict) or len(item) != 1:
                raise InputError(f'{path} must be {{"coeff": ...}} or {{"eval": ...}}')
            (kind, body), = item.items()
            if not isinstance(body, dict):
                raise InputError(f"{path}.{kind} must be an object")
            c = _complex_at(body.get("c", [1, 0]), f"{path}.{kind}.c")
            if kind == "coeff":
                k = body.get("k")
                if not isinstance(k, int) or isinstance(k, bool) or k < 0:
                    raise InputError(f"{path}.coeff.k must be a nonnegative integer")
                terms.append(CoeffTerm(k, c))
            elif kind == "eval":
                z = _complex_at(body.get("z"), f"{path}.eval.z")
                if not abs(z) < 1.0:
                    raise InputError(f"{path}.eval.z must satisfy |z| < 1, got |z| = {abs(z)}")
                terms.append(EvalTerm(z, c))
            else:
                raise InputError(f'{path}: unknown term kind "{kind}"')
        return cls(tuple(terms))


def apply_functional(L: FunctionalSpec, f: TaylorPoly) -> complex:
    total = 0j
    for t in L.terms:
        if isinstance(t, CoeffTerm):
            if t.k < f.coeffs.size:
                total += t.c * f.coeffs[t.k]
        else:
            total += t.c * complex(evaluate(f, t.z))
    return total


# classification ------------------------------------------------------------------

POINT_EVALUATION = "PointEvaluation"
NOT_POINT_EVALUATION = "NotPointEvaluation"
OUTSIDE_DISK = "OutsideDisk"


@dataclass(frozen=True)
class ClassifyReport:
    lambda_of_one: complex
    a_hat: complex
    verdict: str
    failing_degree: int | None
    max_monomial_residual: float
    residuals: tuple = ()

    def to_json(self):
        return {"lambda_of_one": _pair(self.lambda_of_one), "a_hat": _pair(self.a_hat),
                "verdict": self.verdict, "failing_degree": self.failing_degree,
                "max_monomial_residual": self.max_monomial_residual,
                "residuals": list(self.residuals)}


def classify_functional(L: FunctionalSpec, max_degree: int = 8, tol: float = 1e-10) -> ClassifyReport:
    """Decide whether L / L(1) acts as f -> f(a) on monomials up to max_degree.

    a is read off as L(u) / L(1) with u(z) = z.  If |a| >= 1 the functional
    cannot be a point evaluation on the disk.
    """
    if max_degree < 1:
        raise InputError("max_degree must be >= 1")
    lam1 = apply_functional(L, TaylorPoly.constant(1.0))
    scale = sum(abs(t.c) for t in L.terms)
    if abs(lam1) <= 1e-14 * scale:
        raise NormalizationFailure("L(1) = 0, so L kills the zero-free function g = 1")
    a_hat = apply_functional(L, TaylorPoly.monomial(1)) / lam1
    if abs(a_hat) >= 1.0:
        return ClassifyReport(lam1, a_hat, OUTSIDE_DISK, None, float("nan"))
    residuals = []
    failing = None
    for n in range(2, max_degree + 1):
        res = abs(apply_functional(L, TaylorPoly.monomial(n)) / lam1 - a_hat ** n)
        residuals.append(res)
        if failing is None and not res < tol:
            failing = n
    verdict = POINT_EVALUATION if failing is None else NOT_POINT_EVALUATION
    return ClassifyReport(lam1, a_hat, verdict, failing, max(residuals, default=0.0), tuple(residuals))


# exp witnesses -----------------------------------------------------------------------

@dataclass(frozen=True)
class ExpWitness:
    """g = exp(p_1 z + p_2 z^2 + ...)"""
    p: tuple

    def poly(self) -> np.ndarray:
        return np.concatenate(([0j], np.asarray(self.p, dtype=complex)))

    def __call__(self, z):
        return np.exp(np.polyval(self.poly()[::-1], np.asarray(z, dtype=complex)))

    def taylor(self, n: int) -> np.ndarray:
        return exp_taylor(self.poly(), n)

    def to_json(self):
        return {"type": "exp_poly", "p": [_pair(c) for c in self.p]}


def exp_taylor(p: np.ndarray, n: int) -> np.ndarray:
    """Coefficients g_0..g_n of exp(p) for p(0) = 0: (k+1) g_{k+1} = sum_j (j+1) p_{j+1} g_{k-j}."""
    dp = np.arange(1, p.size) * p[1:]          # (j+1) p_{j+1}
    g = np.zeros(n + 1, dtype=complex)
    g[0] = 1.0
    for k in range(n):
        j = np.arange(min(k + 1, dp.size))
        g[k + 1] = np.dot(dp[j], g[k - j]) / (k + 1)
    return g


def _exp_value_and_grad(L: FunctionalSpec, p: np.ndarray):
    """L(exp p), d/dp_j L(exp p) = L(z^j exp p), and the sum of |term| sizes."""
    d = p.size - 1
    kmax = max((t.k for t in L.terms if isinstance(t, CoeffTerm)), default=-1)
    g = exp_taylor(p, kmax) if kmax >= 0 else np.zeros(0)
    val, size = 0j, 0.0
    grad = np.zeros(d, dtype=complex)
    for t in L.terms:
        if isinstance(t, CoeffTerm):
            v = t.c * g[t.k]
            for j in range(1, d + 1):
                if t.k - j >= 0:
                    grad[j - 1] += t.c * g[t.k - j]
        else:
            e = np.exp(np.polyval(p[::-1], t.z))
            v = t.c * e
            grad += t.c * e * t.z ** np.arange(1, d + 1)
        val += v
        size += abs(v)
    return val, grad, size


@dataclass(frozen=True)
class WitnessResult:
    found: bool
    witness: ExpWitness | None
    value: complex | None
    cancellation: float | None
    starts_used: int
    truncation_degree: int
    tail_bound: float

    def to_json(self):
        return {"found": self.found,
                "witness": None if self.witness is None else self.witness.to_json(),
                "value": None if self.value is None else _pair(self.value),
                "abs_value": None if self.value is None else abs(self.value),
                "cancellation": self.cancellation, "starts_used": self.starts_used,
                "truncation_degree": self.truncation_degree, "tail_bound": self.tail_bound}


WITNESS_TOL = 1e-12
MAX_COEFF = 20.0


def _starts(budget, rng):
    rings = [(rad * np.exp(2j * np.pi * k / 8), 0j) for rad in (1.0, 4.0, 8.0) for k in range(8)]
    out = [(0j, 0j)] + rings
    while len(out) < budget:
        c1, c2 = (rng.normal(size=2) + 1j * rng.normal(size=2)) * 4.0
        out.append((c1, c2))
    return out[:budget]


def witness_search(L: FunctionalSpec, budget: int = 64, seed: int = 0,
                   max_iter: int = 60) -> WitnessResult:
    """Look for exp(c1 z + c2 z^2) with L(g) = 0 by minimum-norm Newton steps.

    A hit needs |L(g)| < 1e-12 and must be a genuine cancellation,
    |L(g)| < 1e-10 * sum over terms of |term|; decay of every term at once
    (driving Re p to -infinity) does not count.  NotFound is inconclusive.
    """
    if budget < 1:
        raise InputError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    kmax = max((t.k for t in L.terms if isinstance(t, CoeffTerm)), default=0)
    used = 0
    for c1, c2 in _starts(budget, rng):
        used += 1
        p = np.array([0j, c1, c2])
        for _ in range(max_iter):
            val, grad, size = _exp_value_and_grad(L, p)
            if abs(val) < WITNESS_TOL and abs(val) < 1e-10 * size:
                return WitnessResult(True, ExpWitness(tuple(complex(x) for x in p[1:])), val,
                                     abs(val) / size, used, kmax, 0.0)
            gn = float(np.vdot(grad, grad).real)
            if gn == 0 or not np.isfinite(gn):
                break
            step = -val * np.conj(grad) / gn
            sn = np.linalg.norm(step)
            if sn > 2.0:
                step *= 2.0 / sn
            p = p + np.concatenate(([0j], step))
            if np.max(np.abs(p)) > MAX_COEFF:
                break
    return WitnessResult(False, None, None, None, used, kmax, 0.0)


# decomposition ---------------------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    g1: TaylorPoly
    g2: TaylorPoly
    lam: complex
    candidates_tried: int
    cert1: NonvanishingCertificate
    cert2: NonvanishingCertificate

    def to_json(self):
        return {"g1": self.g1.to_json(), "g2": self.g2.to_json(), "lambda": _pair(self.lam),
                "candidates_tried": self.candidates_tried,
                "g1_certificate": self.cert1.to_json(), "g2_certificate": self.cert2.to_json()}


MAX_CANDIDATES = 10_000
QUANTUM = 2.0 ** -20


def _grid_step(x: float) -> float:
    # largest power of two (capped at QUANTUM) dividing x, so x - y is exact for y on the grid
    if x == 0.0:
        return QUANTUM
    fr = Fraction(x)
    return min(float(Fraction(fr.numerator & -fr.numerator, fr.denominator)), QUANTUM)


def _snap(y: float, step: float) -> float:
    return y if abs(y) >= 2.0 ** 52 * step else round(y / step) * step


def decompose(f: TaylorPoly, seed: int = 0, max_candidates: int = MAX_CANDIDATES) -> Decomposition:
    """f = g1 + g2 with g1 = lambda constant and g2 = f - lambda both zero-free on the disk.

    lambda is drawn from a seeded uniform stream on |lambda| <= sqrt(D(f)) + 1;
    the image of the disk has area at most pi D(f), so most of that disk is
    admissible.  Candidates are snapped to a dyadic grid compatible with f(0)
    and kept only if lambda + (f(0) - lambda) == f(0) holds exactly in floating
    point.  Constants split in half.
    """
    f = f.trim()
    if f.is_zero():
        raise InputError("the zero function has no nowhere-vanishing decomposition here")
    if f.degree == 0:
        half = f / 2
        c = certify_nonvanishing(half)
        return Decomposition(half, f - half, complex(half.coeffs[0]), 0, c, c)
    radius = math.sqrt(dirichlet_energy(f)) + 1.0
    rng = np.random.default_rng(seed)
    c0 = complex(f.coeffs[0])
    step_re, step_im = _grid_step(c0.real), _grid_step(c0.imag)
    inexact = 0
    for tried in range(1, max_candidates + 1):
        u, v = rng.uniform(size=2)
        raw = radius * math.sqrt(u) * complex(math.cos(2 * math.pi * v), math.sin(2 * math.pi * v))
        lam = complex(_snap(raw.real, step_re), _snap(raw.imag, step_im))
        rest = c0 - lam
        if lam == 0:
            continue
        if lam + rest != c0:
            inexact += 1
            continue
        g2 = TaylorPoly(np.concatenate(([rest], f.coeffs[1:])))
        cert2 = certify_nonvanishing(g2)
        if cert2.nonvanishing:
            g1 = TaylorPoly.constant(lam)
            return Decomposition(g1, g2, lam, tried, certify_nonvanishing(g1), cert2)
    raise SearchExhausted(f"no admissible lambda among {max_candidates} candidates "
                          f"({inexact} rejected because f(0) - lambda is not exact in floating point)")


# weighted composition operators ---------------------------------------------------------

@dataclass(frozen=True)
class WcoReport:
    grid: np.ndarray
    psi_samples: np.ndarray
    phi_samples: np.ndarray
    residual: float
    self_map: bool
    psi_nonvanishing: bool
    degree_residuals: tuple = field(default=())

    def to_json(self):
        return {"grid": [_pair(z) for z in self.grid],
                "psi_samples": [_pair(z) for z in self.psi_samples],
                "phi_samples": [_pair(z) for z in self.phi_samples],
                "residual": self.residual, "self_map": self.self_map,
                "psi_nonvanishing": self.psi_nonvanishing,
                "max_abs_phi": float(np.max(np.abs(self.phi_samples))),
                "degree_residuals": list(self.degree_residuals)}


def default_grid(n_radii: int = 8, n_angles: int = 32, rmax: float = 0.95) -> np.ndarray:
    r = rmax * (np.arange(n_radii) + 1) / n_radii
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    return np.concatenate([[0j], (r[:, None] * np.exp(1j * theta)[None, :]).ravel()])


def wco_extract(basis_images, grid=None) -> WcoReport:
    """Recover psi = T(1) and phi = T(u)/psi from the images of 1, z, z^2, ...

    residual is the largest |T(z^n) - psi phi^n| over the grid and all n.
    """
    images = list(basis_images)
    if len(images) < 2:
        raise InputError("basis_images needs the images of at least 1 and z")
    grid = default_grid() if grid is None else np.asarray(grid, dtype=complex).ravel()
    if grid.size == 0 or np.any(np.abs(grid) >= 1.0):
        raise InputError("grid points must lie in the open unit disk")
    vals = [np.asarray(evaluate(T, grid), dtype=complex) for T in images]
    psi = vals[0]
    mods = np.abs(psi)
    psi_ok = bool(mods.min() > 1e-12 * max(mods.max(), 1e-300))
    if not psi_ok:
        rep = WcoReport(grid, psi, np.full(grid.shape, np.nan + 0j), float("inf"), False, False)
        raise HypothesisViolated("psi = T(1) vanishes on the grid", rep)
    if images[0].trim().degree >= 1:
        psi_ok = certify_nonvanishing(images[0]).nonvanishing
    phi = vals[1] / psi
    degree_res = tuple(float(np.max(np.abs(v - psi * phi ** n))) for n, v in enumerate(vals))
    self_map = bool(np.all(np.abs(phi) < 1.0))
    rep = WcoReport(grid, psi, phi, max(degree_res), self_map, psi_ok, degree_res)
    if not self_map:
        raise HypothesisViolated(f"phi leaves the disk: max |phi| = {np.abs(phi).max():.4g}", rep)
    return rep
