"""Catalog of positive superharmonic weights on the unit disk.

The catalog is closed on purpose: for every member the infimum, the
superharmonicity and the disk integral are known in closed form, so the
numerical checks below always have an exact answer to be compared with.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .quadrature import adaptive_disk_mean

KINDS = ("constant", "standard_alpha", "poisson", "log_reciprocal", "one_minus_r2")
LOG_POLE_RADIUS = 1e-3


@dataclass(frozen=True)
class WeightSpec:
    kind: str
    c: float | None = None
    alpha: float | None = None
    zeta: complex | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown weight kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "constant":
            if self.c is None or not (float(self.c) > 0 and math.isfinite(self.c)):
                raise InputError("constant weight needs c > 0")
            object.__setattr__(self, "c", float(self.c))
        if self.kind == "standard_alpha":
            if self.alpha is None or not (0.0 < float(self.alpha) <= 1.0):
                raise InputError("standard_alpha weight needs alpha in (0, 1]")
            object.__setattr__(self, "alpha", float(self.alpha))
        if self.kind == "poisson":
            if self.zeta is None or abs(abs(complex(self.zeta)) - 1.0) > 1e-12:
                raise InputError("poisson weight needs a unimodular zeta")
            z = complex(self.zeta)
            object.__setattr__(self, "zeta", z / abs(z))

    # constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: float = 1.0):
        return cls("constant", c=c)

    @classmethod
    def standard_alpha(cls, alpha: float):
        return cls("standard_alpha", alpha=alpha)

    @classmethod
    def poisson(cls, zeta: complex = 1.0):
        return cls("poisson", zeta=zeta)

    @classmethod
    def log_reciprocal(cls):
        return cls("log_reciprocal")

    @classmethod
    def one_minus_r2(cls):
        return cls("one_minus_r2")

    # properties ---------------------------------------------------------
    @property
    def alpha_value(self) -> float:
        return 1.0 if self.kind == "one_minus_r2" else float(self.alpha)

    @property
    def analytic_inf(self) -> float:
        return self.c if self.kind == "constant" else 0.0

    @property
    def rotation_invariant(self) -> bool:
        return self.kind != "poisson"

    def default_boundary_point(self) -> complex:
        """A boundary point where w tends to 0 (Poisson: opposite its pole)."""
        return -self.zeta if self.kind == "poisson" else 1.0 + 0j

    def rotated(self, a: complex) -> "WeightSpec":
        """The weight z -> w(a z) for unimodular a."""
        if self.kind == "poisson":
            return WeightSpec.poisson(self.zeta * np.conj(a))
        return self

    def __call__(self, z):
        return eval_weight(self, z)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "constant":
            out["c"] = self.c
        elif self.kind == "standard_alpha":
            out["alpha"] = self.alpha
        elif self.kind == "poisson":
            out["zeta"] = [self.zeta.real, self.zeta.imag]
        return out

    @classmethod
    def from_json(cls, obj) -> "WeightSpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise InputError('weight file needs a "kind" field')
        kind = obj["kind"]
        if kind == "constant":
            return cls.constant(float(obj.get("c", 1.0)))
        if kind == "standard_alpha":
            if "alpha" not in obj:
                raise InputError("standard_alpha weight needs alpha in (0, 1]")
            return cls.standard_alpha(float(obj["alpha"]))
        if kind == "poisson":
            if "zeta" not in obj:
                raise InputError("poisson weight needs a unimodular zeta")
            re, im = obj["zeta"]
            return cls.poisson(complex(float(re), float(im)))
        return cls(kind)


def _one_minus_abs2(z):
    m = np.abs(z)
    return (1.0 - m) * (1.0 + m)


def eval_weight(w: WeightSpec, z):
    """Closed-form w(z) for |z| < 1; log_reciprocal returns inf at 0."""
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) >= 1.0):
        raise InputError("weights are evaluated on the open disk |z| < 1")
    if w.kind == "constant":
        out = np.full(zz.shape, w.c)
    elif w.kind in ("standard_alpha", "one_minus_r2"):
        out = _one_minus_abs2(zz) ** w.alpha_value
    elif w.kind == "poisson":
        out = _one_minus_abs2(zz) / np.abs(w.zeta - zz) ** 2
    else:
        with np.errstate(divide="ignore"):
            out = -np.log(np.abs(zz))
    return out[()] if out.ndim == 0 else out


def eval_weight_gap(w: WeightSpec, t):
    """w(1 - t), accurate when the gap t is tiny."""
    t = np.asarray(t, dtype=complex)
    d = 2.0 * t.real - (t.real ** 2 + t.imag ** 2)   # 1 - |1 - t|^2
    if w.kind == "constant":
        return np.full(t.shape, w.c)
    if w.kind in ("standard_alpha", "one_minus_r2"):
        return d ** w.alpha_value
    if w.kind == "poisson":
        return d / np.abs(w.zeta - 1.0 + t) ** 2
    return -0.5 * np.log1p(-d)


def weight_at_eps(w: WeightSpec, eps: float) -> float:
    """w(1 - eps) for real eps, without cancellation."""
    return float(eval_weight_gap(w, complex(eps)))


# superharmonicity ---------------------------------------------------------

@dataclass(frozen=True)
class SuperharmonicReport:
    max_discrete_laplacian: float
    max_extrapolated_laplacian: float
    max_excess: float
    n_nodes: int
    grid_step: float
    passed: bool

    def to_json(self):
        return {"max_discrete_laplacian": self.max_discrete_laplacian,
                "max_extrapolated_laplacian": self.max_extrapolated_laplacian,
                "max_excess": self.max_excess, "n_nodes": self.n_nodes,
                "grid_step": self.grid_step, "pass": self.passed}


def _laplacian(fn, x, y, h):
    c = fn(x + 1j * y)
    return (fn(x + h + 1j * y) + fn(x - h + 1j * y) + fn(x + 1j * (y + h))
            + fn(x + 1j * (y - h)) - 4.0 * c) / h ** 2, c


def superharmonic_sweep(fn, grid_step, tol=None, rmax=0.95, exclude_radius=0.0):
    """Five-point Laplacian sweep of a real function on the disk grid.

    The per-node tolerance is ``tol`` if given, else 1e-6 (|w| + 1) plus twice
    the Richardson estimate |L_h - L_2h| / 3 of the O(h^2) truncation error.
    Nodes whose 2h-stencil leaves |z| <= rmax or comes within
    ``exclude_radius`` of 0 are skipped.
    """
    h = float(grid_step)
    if not 0.0 < h <= 0.05:
        raise InputError("grid_step must lie in (0, 0.05]")
    k = np.arange(-int(rmax / h) - 1, int(rmax / h) + 2)
    x, y = np.meshgrid(k * h, k * h)
    x, y = x.ravel(), y.ravel()
    r = np.hypot(x, y)
    keep = (r + 2 * h <= rmax) & (r - 2 * h > exclude_radius)
    x, y = x[keep], y[keep]
    lap, val = _laplacian(fn, x, y, h)
    lap2, _ = _laplacian(fn, x, y, 2 * h)
    if tol is None:
        node_tol = 1e-6 * (np.abs(val) + 1.0) + 2.0 * np.abs(lap - lap2) / 3.0
    else:
        node_tol = np.full(lap.shape, float(tol))
    excess = lap - node_tol
    extrapolated = (4.0 * lap - lap2) / 3.0
    return SuperharmonicReport(float(lap.max()), float(extrapolated.max()), float(excess.max()),
                               int(lap.size), h, bool(np.all(excess <= 0.0)))


def check_superharmonic(w: WeightSpec, grid_step: float = 0.01, tol: float | None = None):
    exclude = LOG_POLE_RADIUS if w.kind == "log_reciprocal" else 0.0
    return superharmonic_sweep(lambda z: eval_weight(w, z), grid_step, tol, exclude_radius=exclude)


@dataclass(frozen=True)
class MeanValueReport:
    circle_average: float
    center_value: float
    quad_error: float
    n_samples: int
    passed: bool

    def to_json(self):
        return {"circle_average": self.circle_average, "center_value": self.center_value,
                "quad_error": self.quad_error, "n_samples": self.n_samples, "pass": self.passed}


def circle_average(fn, center, radius, n_samples=64, tol=1e-12, max_samples=2 ** 18):
    """Trapezoid mean of fn over a circle, doubled until it settles."""
    def avg(n):
        theta = 2 * np.pi * np.arange(n) / n
        return float(np.mean(fn(center + radius * np.exp(1j * theta))))

    n = n_samples
    prev = avg(n)
    while True:
        n *= 2
        cur = avg(n)
        err = abs(cur - prev)
        if err <= tol * (1.0 + abs(cur)) or n >= max_samples:
            return cur, err, n
        prev = cur


def check_mean_value(w: WeightSpec, center: complex, radius: float, n_samples: int = 64):
    if n_samples < 64:
        raise InputError("n_samples must be >= 64")
    if not (radius > 0 and abs(center) + radius < 1.0):
        raise InputError("the closed circle disk must lie inside the unit disk")
    center_value = float(eval_weight(w, center))
    average, err, n = circle_average(lambda z: eval_weight(w, z), center, radius, n_samples)
    ok = average <= center_value + err + 1e-12 * (1.0 + abs(center_value))
    return MeanValueReport(average, center_value, err, n, bool(ok))


def random_admissible_circles(w: WeightSpec, n: int, rng, max_abs=0.98):
    """Random circles with closed disk in {|z| <= max_abs}, clear of the log pole."""
    out = []
    while len(out) < n:
        c = np.sqrt(rng.uniform(0, max_abs ** 2)) * np.exp(2j * np.pi * rng.uniform())
        rho = rng.uniform(0.0, max_abs - abs(c))
        if rho <= 1e-6:
            continue
        if w.kind == "log_reciprocal" and abs(abs(c) - rho) < LOG_POLE_RADIUS:
            continue
        out.append((complex(c), float(rho)))
    return out


# infimum and integral --------------------------------------------------------

@dataclass(frozen=True)
class InfEstimate:
    sampled: float
    analytic: float

    def to_json(self):
        return {"sampled": self.sampled, "analytic": self.analytic}


def inf_estimate(w: WeightSpec, n_radii: int = 64, n_angles: int = 64) -> InfEstimate:
    """Grid minimum of w with radii crowding geometrically toward |z| = 1."""
    if n_radii < 16 or n_angles < 16:
        raise InputError("grid parameters must be >= 16")
    gaps = 0.5 * (2e-12) ** (np.arange(n_radii) / (n_radii - 1))
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    z = (1.0 - gaps)[:, None] * np.exp(1j * theta)[None, :]
    vals = eval_weight(w, z)
    if w.kind == "poisson":
        # the grid misses the minimizing direction only by rounding; include it
        vals = np.append(vals.ravel(), eval_weight(w, -(1.0 - gaps) * w.zeta))
    return InfEstimate(float(np.min(vals)), w.analytic_inf)


def integral_over_disk(w: WeightSpec, n_r: int = 128, n_theta: int = 256, tol: float = 1e-12):
    """(1/pi) * integral of w over the disk."""
    res = adaptive_disk_mean(lambda r, th: np.ones(np.broadcast(r, th).shape), w, n_r, n_theta, tol)
    return res.value
