"""H^2 norms, Dirichlet integrals and weighted Dirichlet integrals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import InputError
from .mobius import MobiusInvolution
from .quadrature import DiskQuadrature, adaptive_disk_mean, gauss_legendre01
from .series import TaylorPoly, differentiate, evaluate
from .weights import WeightSpec, eval_weight_gap


def h2_norm_sq(f: TaylorPoly) -> float:
    return float(np.sum(np.abs(f.coeffs) ** 2))


def h2_norm_sq_boundary(f: TaylorPoly, n_samples: int | None = None) -> float:
    """Trapezoid mean of |f|^2 over |z| = 1 (exact once n_samples > 2 deg f)."""
    n = n_samples or max(64, 2 * f.degree + 2)
    theta = 2 * np.pi * np.arange(n) / n
    return float(np.mean(np.abs(evaluate(f, np.exp(1j * theta))) ** 2))


def h2_norm_sq_composed(h: TaylorPoly, phi: MobiusInvolution) -> float:
    """||h o phi||^2_{H^2} as the Poisson integral of |h|^2 at the point a.

    Boundary integral with adaptive quadrature refined at arg(a), where the
    Poisson kernel peaks; works for eps-form parameters however small.
    """
    if phi.eps is not None:
        eps = phi.eps

        def kernel(t):
            # |e^{it} - (1 - eps)|^2 with e^{it} - 1 = 2i sin(t/2) e^{it/2}
            d = 2j * math.sin(t / 2) * complex(math.cos(t / 2), math.sin(t / 2)) + eps
            return phi.one_minus_abs2 / abs(d) ** 2
        peak = 0.0
    else:
        a = phi.a

        def kernel(t):
            return phi.one_minus_abs2 / abs(complex(math.cos(t), math.sin(t)) - a) ** 2
        peak = float(np.angle(a))

    def integrand(t):
        return abs(complex(evaluate(h, complex(math.cos(t), math.sin(t))))) ** 2 * kernel(t)

    lo, hi = peak - math.pi, peak + math.pi
    total = 0.0
    for a_, b_ in ((lo, peak), (peak, hi)):
        val, _ = quad(integrand, a_, b_, limit=400, epsabs=0.0, epsrel=1e-13)
        total += val
    return total / (2 * math.pi)


def dirichlet_energy(f: TaylorPoly, method: str = "coefficient") -> float:
    """(1/pi) * integral of |f'|^2 over the disk."""
    if method == "coefficient":
        k = np.arange(f.coeffs.size)
        return float(np.sum(k * np.abs(f.coeffs) ** 2))
    if method == "quadrature":
        return weighted_energy(f, WeightSpec.constant(1.0))
    raise InputError(f"unknown method {method!r}")


def _derivative_grid(df: TaylorPoly):
    b = df.coeffs
    k = np.arange(b.size)

    def values(r, theta):
        n = theta.size
        vals = np.fft.ifft(b[None, :] * r ** k[None, :], n=n, axis=1) * n
        return np.abs(vals) ** 2
    return values


def weighted_energy(f: TaylorPoly, w: WeightSpec, n_r: int = 128, n_theta: int = 256,
                    tol: float = 1e-9, full_output: bool = False):
    """(1/pi) * integral of |f'|^2 w over the disk by product quadrature.

    Node counts double until the relative change is below ``tol`` (default
    cap 1024 x 2048, raised when the degree of f needs more).  With
    ``full_output`` a :class:`DiskQuadrature` with node counts and the
    convergence flag is returned instead of the bare value.
    """
    if n_r < 32 or n_theta < 64:
        raise InputError("quadrature node counts must be at least 32 x 64")
    df = differentiate(f).trim()
    d = df.degree
    n_r = max(n_r, d + 2)
    while n_theta < 2 * (d + 2):
        n_theta *= 2
    res = adaptive_disk_mean(_derivative_grid(df), w, n_r, n_theta, tol,
                             max_r=max(1024, 2 * n_r), max_theta=max(2048, 2 * n_theta))
    return res if full_output else res.value


def image_area_bound(f: TaylorPoly) -> float:
    """Multiplicity-counted area of f(D), i.e. pi * D(f); bounds the area of the image."""
    return math.pi * dirichlet_energy(f)


# compositions with near-boundary involutions ---------------------------------

_TAIL_PANELS = 30
_ANGLE_LEVELS = 30


def _singular_direction(w: WeightSpec) -> float:
    # ray from z = 1 that ends at the Poisson pole; otherwise the ray through z = 0
    if w.kind == "poisson" and abs(1.0 - w.zeta) > 1e-300:
        return float(np.angle(1.0 - w.zeta))
    return 0.0


def _graded(lo: float, hi: float, levels: int) -> list[float]:
    # breakpoints in (lo, hi) crowding geometrically toward both ends
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    left = [lo + half * 2.0 ** -j for j in range(levels, 0, -1)]
    right = [hi - half * 2.0 ** -j for j in range(1, levels + 1)]
    return left + [mid] + right


def _angle_panels(center: float, eps: float) -> np.ndarray:
    # rays near +-pi/2 graze the circle and vary on the scale eps
    levels = int(min(60, math.ceil(math.log2(1.0 / eps)) + 8))
    inner = _ANGLE_LEVELS
    pts = [-np.pi / 2] + _graded(-np.pi / 2, center, max(levels, inner)) + [center]
    pts += _graded(center, np.pi / 2, max(levels, inner)) + [np.pi / 2]
    return np.unique(np.array(pts))


def _ray_breaks(upper: float, interior: float | None) -> np.ndarray:
    breaks = [0.0]
    s = 2.0 ** -12
    while s < upper / 2:
        breaks.append(s)
        s *= 2
    breaks.append(upper / 2)
    breaks += [upper * (1 - 2.0 ** -j) for j in range(2, _TAIL_PANELS)]
    breaks.append(upper)
    if interior is not None and 0.0 < interior < upper:
        breaks.append(interior)
    return np.unique(np.array(breaks))


def _composed_once(dh: TaylorPoly, eps: float, w: WeightSpec, n_panel: int, n_theta: int) -> float:
    x, wx = gauss_legendre01(n_panel)
    tx, tw = gauss_legendre01(n_theta)
    tb = _angle_panels(_singular_direction(w), eps)
    thetas = (tb[:-1, None] + np.diff(tb)[:, None] * tx[None, :]).ravel()
    th_weights = (np.diff(tb)[:, None] * tw[None, :]).ravel()
    total = 0.0
    for theta, wt in zip(thetas, th_weights):
        c = math.cos(theta)
        # log weight: the ray passes closest to the pole z = 0 at |t| = cos(theta)
        b = _ray_breaks(2.0 * c / eps, c / eps if w.kind == "log_reciprocal" else None)
        lo, width = b[:-1], np.diff(b)
        s = (lo[:, None] + width[:, None] * x[None, :]).ravel()
        ws = (width[:, None] * wx[None, :]).ravel()
        e = complex(c, math.sin(theta))
        t = eps * s * e
        q = 1.0 + s * e * (1.0 - eps)
        phi = 1.0 - (2.0 - t) / q
        dens = np.abs(evaluate(dh, phi)) ** 2 * ((2.0 - eps) / np.abs(q) ** 2) ** 2
        total += wt * float(np.dot(ws, dens * eval_weight_gap(w, t) * s))
    return total / math.pi


def composed_weighted_energy(h: TaylorPoly, phi: MobiusInvolution, w: WeightSpec,
                             n_panel: int = 8, n_theta: int = 4, tol: float = 1e-9,
                             max_panel: int = 32, full_output: bool = False):
    """D_w(h o phi) for an eps-form involution (a = 1 - eps), any eps > 0.

    Polar coordinates centred at the boundary point 1, scaled by eps, with
    panels graded geometrically toward both ends of every ray.  The weight
    must already be expressed in the frame where the boundary point is 1.
    """
    if phi.eps is None:
        raise InputError("composed_weighted_energy needs an eps-form involution")
    dh = differentiate(h)
    prev = _composed_once(dh, phi.eps, w, n_panel, n_theta)
    change = None
    while n_panel < max_panel:
        n_panel, n_theta = 2 * n_panel, 2 * n_theta
        cur = _composed_once(dh, phi.eps, w, n_panel, n_theta)
        change = abs(cur - prev) / max(abs(cur), 1e-300)
        prev = cur
        if change < tol:
            break
    res = DiskQuadrature(prev, n_panel, n_theta, change, change is not None and change < tol)
    return res if full_output else res.value


# reports -------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyReport:
    h2_norm_sq: float
    dirichlet: float
    weighted_dirichlet: float | None
    norm_sq: float
    method: str
    discrepancy: float | None = None
    nodes: dict = field(default_factory=dict)

    def to_json(self):
        return {"h2_norm_sq": self.h2_norm_sq, "dirichlet": self.dirichlet,
                "weighted_dirichlet": self.weighted_dirichlet, "norm_sq": self.norm_sq,
                "method": self.method, "discrepancy": self.discrepancy, "nodes": self.nodes}


def energy_report(f: TaylorPoly, w: WeightSpec | None = None, method: str = "both") -> EnergyReport:
    if method not in ("coefficient", "quadrature", "both"):
        raise InputError(f"unknown method {method!r}")
    h2 = h2_norm_sq(f)
    nodes = {}
    coef = dirichlet_energy(f, "coefficient")
    discrepancy = None
    if method == "coefficient":
        dirichlet = coef
    else:
        q = weighted_energy(f, WeightSpec.constant(1.0), full_output=True)
        nodes["dirichlet"] = {"n_r": q.n_r, "n_theta": q.n_theta, "converged": q.converged}
        dirichlet = coef if method == "both" else q.value
        if method == "both":
            discrepancy = abs(coef - q.value)
    weighted = None
    if w is not None:
        q = weighted_energy(f, w, full_output=True)
        nodes["weighted"] = {"n_r": q.n_r, "n_theta": q.n_theta, "converged": q.converged}
        weighted = q.value
    energy = weighted if weighted is not None else dirichlet
    return EnergyReport(h2, dirichlet, weighted, h2 + energy, method, discrepancy, nodes)
