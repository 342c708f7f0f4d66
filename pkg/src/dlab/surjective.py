"""A surjective function in a weighted Dirichlet space whose weight vanishes
at a boundary point, built term by term and certified on finite targets.

f = sum_n lambda**n * h(phi_n(z)) with h(z) = z (1 - z) and phi_n the
involution swapping 0 and a_n = 1 - eps_n.  All work happens in the frame
where the boundary point is 1; a general unimodular boundary point b enters
through f_b(z) = b**2 f(conj(b) z) and the weight z -> w(b z).

Points near 1 are handled through their gap t = 1 - z, so ladders with
eps far below machine epsilon stay accurate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .energy import composed_weighted_energy
from .errors import (BudgetExceeded, CertificationFailed, InputError, NonConvergent,
                     PrecisionExhausted, WeightNotVanishing)
from .mobius import DiskRegion, MobiusInvolution, _complex_dtype, apply_gap, image_disk
from .series import TaylorPoly
from .weights import WeightSpec, weight_at_eps
from .zeros import WindingCertificate, track_argument

H = TaylorPoly([0.0, 1.0, -1.0])     # z (1 - z)
M_SUP = 2.0
SAFETY = 2.0
EPS_START = 1e-2
EPS_FLOOR = 1e-250
MAX_TERMS = {"standard": 5, "extended": 6}
COMPACT_SAMPLES = 4096


@dataclass(frozen=True)
class Constants:
    m: float
    M_sup: float
    lam: float
    sampled_min: float
    sampled_sup: float

    def to_json(self):
        return {"m": self.m, "M_sup": self.M_sup, "lambda": self.lam,
                "sampled_min": self.sampled_min, "sampled_sup": self.sampled_sup}


def constants(r: float, n_grid: int = 4096) -> Constants:
    """m = min over |z| = r of |h|, M = sup over the disk of |h|, lambda = 2 + M/m."""
    if not 0.0 < r < 1.0:
        raise InputError(f"r must lie in (0, 1), got {r!r}")
    m = r * (1.0 - r)
    lam = 2.0 + M_SUP / m
    theta = 2 * np.pi * np.arange(n_grid) / n_grid
    z = r * np.exp(1j * theta)
    sampled_min = float(np.min(np.abs(z * (1 - z))))
    if abs(sampled_min - m) > 1e-10 * max(m, 1.0):
        raise CertificationFailed(f"sampled min {sampled_min} disagrees with r(1-r) = {m}")
    rr = 0.999 * np.sqrt((np.arange(256) + 1) / 256)
    zz = rr[:, None] * np.exp(1j * theta[None, ::4])
    sampled_sup = float(np.max(np.abs(zz * (1 - zz))))
    return Constants(m, M_SUP, lam, sampled_min, sampled_sup)


def n_rule(abs_w0: float, m: float, lam: float) -> int:
    """Minimal n with |w0| + 1 < lambda**n (m - M/(lambda - 1))."""
    slack = m - M_SUP / (lam - 1.0)
    if slack <= 0:
        raise InputError("m - M/(lambda - 1) must be positive")
    n = 1
    while not abs_w0 + 1.0 < lam ** n * slack:
        n += 1
    return n


def _h_gap(phi_val, gap_val):
    return phi_val * gap_val


def _compact_max(eps: float, disks, precision: str) -> float:
    """max of |h o phi_eps| over the boundary circles of the given gap-form disks."""
    phi = MobiusInvolution.from_eps(eps)
    best = 0.0
    theta = 2 * np.pi * np.arange(COMPACT_SAMPLES) / COMPACT_SAMPLES

    def modulus(th):
        t = d.gap - d.radius * np.exp(1j * np.asarray(th))
        p, g = apply_gap(phi, t, precision)
        return np.abs(_h_gap(p, g)).astype(float)

    for d in disks:
        vals = modulus(theta)
        k = int(np.argmax(vals))
        step = 2 * np.pi / COMPACT_SAMPLES
        res = minimize_scalar(lambda th: -float(modulus(th)), method="bounded",
                              bounds=(theta[k] - step, theta[k] + step),
                              options={"xatol": 1e-12})
        best = max(best, float(vals[k]), -float(res.fun))
    return best


@dataclass(frozen=True)
class LadderEntry:
    eps: float
    bound: float
    h2_norm_sq: float
    energy: float
    norm: float
    margin_norm: float
    compact_max: float | None
    margin_compact: float | None
    weight_at_a: float
    energy_bound: float
    quadrature_nodes: tuple

    def to_json(self):
        return {"eps": self.eps, "bound": self.bound, "h2_norm_sq": self.h2_norm_sq,
                "energy": self.energy, "norm": self.norm, "margin_norm": self.margin_norm,
                "compact_max": self.compact_max, "margin_compact": self.margin_compact,
                "weight_at_a": self.weight_at_a, "energy_bound_9w": self.energy_bound,
                "quadrature_nodes": list(self.quadrature_nodes)}

    @classmethod
    def from_json(cls, obj):
        return cls(float(obj["eps"]), float(obj["bound"]), float(obj["h2_norm_sq"]),
                   float(obj["energy"]), float(obj["norm"]), float(obj["margin_norm"]),
                   obj.get("compact_max"), obj.get("margin_compact"),
                   float(obj["weight_at_a"]), float(obj["energy_bound_9w"]),
                   tuple(obj.get("quadrature_nodes", ())))


@dataclass(frozen=True)
class SurjectiveSeries:
    weight: WeightSpec
    boundary_point: complex
    r: float
    m: float
    M_sup: float
    lam: float
    ladder: tuple
    term_disks: tuple
    precision: str = "standard"

    @property
    def n_terms(self) -> int:
        return len(self.ladder)

    @property
    def eps(self):
        return [e.eps for e in self.ladder]

    def involution(self, n: int) -> MobiusInvolution:
        """phi_n in the normalized frame (1-based index)."""
        return MobiusInvolution.from_eps(self.ladder[n - 1].eps)

    def disk(self, n: int) -> DiskRegion:
        """The n-th term disk in the caller's frame (gap measured from the boundary point)."""
        d = self.term_disks[n - 1]
        return DiskRegion(self.boundary_point * d.center, d.radius, d.gap)

    def to_json(self):
        b = self.boundary_point
        return {"type": "surjective_series", "weight": self.weight.to_json(),
                "boundary_point": [b.real, b.imag], "r": self.r, "m": self.m,
                "M_sup": self.M_sup, "lambda": self.lam, "n_terms": self.n_terms,
                "precision": self.precision,
                "ladder": [e.to_json() for e in self.ladder],
                "term_disks": [d.to_json() for d in self.term_disks]}

    @classmethod
    def from_json(cls, obj) -> "SurjectiveSeries":
        if not isinstance(obj, dict) or obj.get("type") != "surjective_series":
            raise InputError('series file must have "type": "surjective_series"')
        try:
            w = WeightSpec.from_json(obj["weight"])
            b = complex(*map(float, obj["boundary_point"]))
            r = float(obj["r"])
            ladder = tuple(LadderEntry.from_json(e) for e in obj["ladder"])
            disks = tuple(DiskRegion.from_json(d) for d in obj["term_disks"])
            m, M, lam = float(obj["m"]), float(obj["M_sup"]), float(obj["lambda"])
            precision = obj.get("precision", "standard")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed series file: {exc}") from exc
        s = cls(w, b, r, m, M, lam, ladder, disks, precision)
        validate_series(s)
        return s


def validate_series(s: SurjectiveSeries) -> None:
    """Re-check every stored invariant that does not need a quadrature."""
    if abs(abs(s.boundary_point) - 1.0) > 1e-12:
        raise InputError("boundary_point must be unimodular")
    c = constants(s.r)
    if s.m != c.m or s.M_sup != c.M_sup or s.lam != 2.0 + s.M_sup / s.m:
        raise InputError("lambda must equal 2 + M_sup/m with m = r(1 - r)")
    if len(s.ladder) != len(s.term_disks) or not s.ladder:
        raise InputError("ladder and term_disks must be non-empty and of equal length")
    eps = [e.eps for e in s.ladder]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise InputError("eps ladder must be strictly decreasing")
    for n, (e, d) in enumerate(zip(s.ladder, s.term_disks), start=1):
        if e.bound != 0.5 ** n * s.lam ** -n:
            raise InputError(f"ladder[{n - 1}].bound must equal 2^-n lambda^-n")
        if not e.norm * SAFETY <= e.bound:
            raise InputError(f"ladder[{n - 1}] violates the norm bound with margin 2")
        if n > 1 and not (e.compact_max is not None and e.compact_max * SAFETY <= e.bound):
            raise InputError(f"ladder[{n - 1}] violates the compact-set bound with margin 2")
        ref = image_disk(MobiusInvolution.from_eps(e.eps), s.r)
        if not (math.isclose(ref.gap, d.gap, rel_tol=1e-12)
                and math.isclose(ref.radius, d.radius, rel_tol=1e-12)):
            raise InputError(f"term_disks[{n - 1}] is not the image of |z| <= r")


def _check_vanishing(w: WeightSpec) -> None:
    if w.analytic_inf > 0:
        raise WeightNotVanishing(f"inf w = {w.analytic_inf} > 0: no surjective function exists")
    near, far = weight_at_eps(w, 1e-12), weight_at_eps(w, 1e-6)
    if not near < far:
        raise WeightNotVanishing("w does not tend to 0 at the chosen boundary point")


def select_ladder(w: WeightSpec, r: float = 0.5, n_terms: int = 4,
                  boundary_point: complex | None = None, precision: str = "standard",
                  tol: float = 1e-9) -> SurjectiveSeries:
    """Greedy eps ladder: for each n, the first eps = 1e-2 * 2^-k below eps_{n-1}
    such that both selection bounds hold with a factor 2 to spare.

    (i)  ||h o phi_n||_{D_w} <= bound_n / 2, the H^2 part being 2 eps exactly;
    (ii) max of |h o phi_n| over earlier disk boundaries <= bound_n / 2,
    where bound_n = 2^-n lambda^-n.  The estimate 2 eps + 9 w(a_n) is used
    only to skip candidates that cannot pass (i).
    """
    _complex_dtype(precision)
    if n_terms < 1:
        raise InputError("n_terms must be >= 1")
    if n_terms > MAX_TERMS[precision]:
        raise PrecisionExhausted(f"n_terms={n_terms} exceeds the {precision} cap {MAX_TERMS[precision]}")
    b = complex(w.default_boundary_point() if boundary_point is None else boundary_point)
    if abs(abs(b) - 1.0) > 1e-12:
        raise InputError("boundary_point must be unimodular")
    b /= abs(b)
    wn = w.rotated(b)
    _check_vanishing(wn)
    c = constants(r)
    ladder, disks = [], []
    prev = 1.0
    for n in range(1, n_terms + 1):
        bound = 0.5 ** n * c.lam ** -n
        target = bound / SAFETY
        k = 0
        while True:
            eps = EPS_START * 2.0 ** -k
            k += 1
            if eps < EPS_FLOOR:
                raise PrecisionExhausted(f"term {n}: eps fell below {EPS_FLOOR:g}")
            if eps >= prev:
                continue
            wa = weight_at_eps(wn, eps)
            if not 2 * eps + 9 * wa < target ** 2:
                continue
            cmax = _compact_max(eps, disks, precision) if disks else None
            if cmax is not None and not cmax <= target:
                continue
            q = composed_weighted_energy(H, MobiusInvolution.from_eps(eps), wn, tol=tol,
                                         full_output=True)
            if not q.converged:
                raise NonConvergent(f"term {n}: energy quadrature did not converge at eps={eps:g}")
            norm = math.sqrt(2 * eps + q.value)
            if norm <= target:
                break
        ladder.append(LadderEntry(eps, bound, 2 * eps, q.value, norm, bound / norm,
                                  cmax, None if cmax is None else bound / max(cmax, 1e-300),
                                  wa, 9 * wa, (q.n_r, q.n_theta)))
        disks.append(image_disk(MobiusInvolution.from_eps(eps), r))
        prev = eps
    return SurjectiveSeries(w, b, r, c.m, c.M_sup, c.lam, tuple(ladder), tuple(disks), precision)


# evaluation -------------------------------------------------------------------

def eval_partial_sum_gap(s: SurjectiveSeries, t, N: int | None = None):
    """Normalized-frame partial sum at z = 1 - t."""
    N = s.n_terms if N is None else N
    if not 0 <= N <= s.n_terms:
        raise InputError(f"N must lie in [0, {s.n_terms}]")
    dtype = _complex_dtype(s.precision)
    t = np.asarray(t, dtype=dtype)
    out = np.zeros(t.shape, dtype=dtype)
    for n in range(1, N + 1):
        p, g = apply_gap(s.involution(n), t, s.precision)
        out = out + s.lam ** n * _h_gap(p, g)
    return out[()] if out.ndim == 0 else out


def eval_partial_sum(s: SurjectiveSeries, z, N: int | None = None):
    """sum_{n <= N} lambda^n h_b(phi_{b a_n}(z)) by direct Moebius evaluation."""
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) > 1.0 + 4 * np.finfo(float).eps):
        raise InputError("points must satisfy |z| <= 1")
    b = s.boundary_point
    val = eval_partial_sum_gap(s, 1.0 - np.conj(b) * zz, N)
    return b * b * val


# hitting targets ------------------------------------------------------------------

@dataclass(frozen=True)
class HitCertificate:
    target: complex
    n_used: int
    disk: DiskRegion
    winding: WindingCertificate
    rouche_min_F: float
    rouche_max_G: float
    rouche_max_G_bound: float
    truncation_allowance: float
    located_zero: complex | None = None
    located_zero_gap: complex | None = None

    @property
    def margin(self) -> float:
        return self.rouche_min_F - self.rouche_max_G - self.truncation_allowance

    def to_json(self):
        def pair(z):
            return None if z is None else [z.real, z.imag]
        return {"target": pair(self.target), "n_used": self.n_used, "disk": self.disk.to_json(),
                "winding": self.winding.to_json(), "rouche_min_F": self.rouche_min_F,
                "rouche_max_G": self.rouche_max_G,
                "rouche_max_G_bound": self.rouche_max_G_bound,
                "truncation_allowance": self.truncation_allowance, "margin": self.margin,
                "located_zero": pair(self.located_zero),
                "located_zero_gap": pair(self.located_zero_gap)}


def _pulled_back(s: SurjectiveSeries, n: int, zeta):
    """Terms of the partial sum at z = phi_n(zeta): returns (F, rest)."""
    dtype = _complex_dtype(s.precision)
    zeta = np.asarray(zeta, dtype=dtype)
    _, t = apply_gap(s.involution(n), 1 - zeta, s.precision)   # 1 - phi_n(zeta)
    F = s.lam ** n * zeta * (1 - zeta)
    rest = np.zeros(zeta.shape, dtype=dtype)
    for k in range(1, s.n_terms + 1):
        if k != n:
            p, g = apply_gap(s.involution(k), t, s.precision)
            rest = rest + s.lam ** k * _h_gap(p, g)
    return F, rest


def _newton_zero(s, n, w0n, r, max_iter=60):
    def g(zeta):
        F, rest = _pulled_back(s, n, zeta)
        return complex(F + rest) - w0n
    zeta, delta = 0j, 1e-7
    for _ in range(max_iter):
        v = g(zeta)
        if abs(v) < 1e-11 * (s.lam ** n + abs(w0n)):
            break
        d = (g(zeta + delta) - g(zeta - delta)) / (2 * delta)
        zeta = zeta - v / d
        if not abs(zeta) < r:
            return None
    else:
        return None
    return zeta if abs(g(zeta)) < 1e-9 * (s.lam ** n + abs(w0n)) else None


def hit_target(s: SurjectiveSeries, w0: complex, n_samples: int = 1024,
               locate: bool = True) -> HitCertificate:
    """Certify that the partial sum takes the value w0 inside a term disk.

    On the boundary of D_n (parametrized as phi_n(r e^{i theta})) the main
    term F = lambda^n h o phi_n has modulus >= lambda^n m, while everything
    else (earlier and later terms minus w0) stays below it even after adding
    the tail allowance 2^-N.  The winding of the partial sum minus w0 around
    the boundary is computed independently and must be at least 1.
    """
    w0 = complex(w0)
    b = s.boundary_point
    w0n = np.conj(b) ** 2 * w0
    n = n_rule(abs(w0), s.m, s.lam)
    if n > s.n_terms:
        raise BudgetExceeded(f"|w0| = {abs(w0):g} needs n = {n} > n_terms = {s.n_terms}")
    r = s.r
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    F, rest = _pulled_back(s, n, r * np.exp(1j * theta))
    min_F = float(np.min(np.abs(F)))
    expected = s.lam ** n * s.m
    if abs(min_F - expected) > 1e-6 * expected:
        raise CertificationFailed(f"boundary min |F| = {min_F} differs from lambda^n m = {expected}")
    max_G = float(np.max(np.abs(rest - w0n)))
    allowance = 2.0 ** -s.n_terms
    g_bound = s.lam ** n * s.M_sup / (s.lam - 1) + 1 + abs(w0)
    if not min_F > max_G + allowance:
        raise CertificationFailed(f"Rouche margin fails: min|F| = {min_F} <= {max_G} + {allowance}")

    def pulled(th):
        Fv, rv = _pulled_back(s, n, r * np.exp(1j * th))
        return (Fv + rv - w0n).astype(complex)

    total, lo, _, used, refined = track_argument(pulled, n_samples)
    k = int(round(total))
    if abs(total - k) >= 0.1:
        raise NonConvergent(f"argument increment {total:.4f} is not near an integer")
    disk = s.disk(n)
    wc = WindingCertificate(k, disk, used, lo, refined, abs(total - k))
    if k < 1:
        raise CertificationFailed(f"winding {k} < 1 on the boundary of D_{n}")
    zero = gap = None
    if locate:
        zeta = _newton_zero(s, n, w0n, r)
        if zeta is not None:
            p, t = apply_gap(s.involution(n), 1 - zeta)
            gap = complex(t)
            zero = complex(b * p)
    return HitCertificate(w0, n, disk, wc, min_F, max_G, g_bound, allowance, zero, gap)


@dataclass(frozen=True)
class CoverageReport:
    R: float
    grid: int
    n_targets: int
    n_passed: int
    max_n_used: int
    min_rouche_margin: float
    min_winding: int
    failures: tuple
    certificates: tuple

    @property
    def passed(self) -> bool:
        return self.n_passed == self.n_targets and not self.failures

    def to_json(self):
        return {"R": self.R, "grid": self.grid, "n_targets": self.n_targets,
                "n_passed": self.n_passed, "max_n_used": self.max_n_used,
                "min_rouche_margin": self.min_rouche_margin, "min_winding": self.min_winding,
                "pass": self.passed, "failures": list(self.failures),
                "certificates": [c.to_json() for c in self.certificates]}


def cover_targets(R: float, grid: int) -> np.ndarray:
    """grid x grid lattice in the square inscribed in |w| <= R (grid = 1 gives 0)."""
    if grid < 1:
        raise InputError("grid must be >= 1")
    if grid == 1:
        return np.zeros(1, dtype=complex)
    half = R / math.sqrt(2.0)
    x = np.linspace(-half, half, grid)
    return (x[None, :] + 1j * x[:, None]).ravel()


def cover(s: SurjectiveSeries, R: float, grid: int, n_samples: int = 1024) -> CoverageReport:
    if not R >= 0:
        raise InputError("R must be >= 0")
    need = n_rule(R, s.m, s.lam)
    if need > s.n_terms:
        raise BudgetExceeded(f"R = {R:g} needs n = {need} > n_terms = {s.n_terms}")
    certs, failures = [], []
    for w0 in cover_targets(R, grid):
        try:
            certs.append(hit_target(s, complex(w0), n_samples, locate=False))
        except (CertificationFailed, NonConvergent, BudgetExceeded) as exc:
            failures.append({"target": [w0.real, w0.imag], "check": exc.check, "message": str(exc)})
    margins = [c.margin for c in certs]
    return CoverageReport(float(R), grid, grid * grid, len(certs),
                          max((c.n_used for c in certs), default=0),
                          min(margins, default=float("nan")),
                          min((c.winding.winding for c in certs), default=0),
                          tuple(failures), tuple(certs))
