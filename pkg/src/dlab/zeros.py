"""Zero counting by the argument principle, and polynomial roots."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContourTooClose, InputError, NonConvergent
from .mobius import DiskRegion
from .series import TaylorPoly, evaluate

MIN_SAMPLES = 256
MAX_SAMPLES = 2 ** 20
MAX_STEP = np.pi / 2
RETREAT_FACTOR = 0.999
MAX_RETREATS = 32


@dataclass(frozen=True)
class WindingCertificate:
    winding: int
    contour: DiskRegion
    n_samples: int
    min_modulus_on_contour: float
    refined: bool
    residual: float = 0.0

    def to_json(self):
        return {"winding": self.winding, "contour": self.contour.to_json(),
                "n_samples": self.n_samples,
                "min_modulus_on_contour": self.min_modulus_on_contour,
                "refined": self.refined, "residual": self.residual}


def track_argument(g, n_samples: int = 1024, max_samples: int = MAX_SAMPLES):
    """Unwrap arg g(theta) over [0, 2 pi], bisecting any step larger than pi/2.

    ``g`` maps an array of angles to complex values.  Returns
    (total increment / 2 pi, min modulus, max modulus, samples used, refined).
    """
    theta = np.linspace(0.0, 2 * np.pi, n_samples + 1)
    vals = np.asarray(g(theta), dtype=complex)
    vals[-1] = vals[0]
    refined = False
    while True:
        mods = np.abs(vals)
        lo, hi = float(mods.min()), float(mods.max())
        if not np.isfinite(hi) or lo < 1e-12 * max(hi, 1e-300):
            raise ContourTooClose(f"min modulus {lo:.3e} on contour (scale {hi:.3e})")
        steps = np.angle(vals[1:] / vals[:-1])
        bad = np.flatnonzero(np.abs(steps) > MAX_STEP)
        if bad.size == 0:
            break
        refined = True
        if theta.size + bad.size > max_samples:
            raise NonConvergent(f"argument refinement exceeded {max_samples} samples")
        mid = 0.5 * (theta[bad] + theta[bad + 1])
        theta = np.insert(theta, bad + 1, mid)
        vals = np.insert(vals, bad + 1, np.asarray(g(mid), dtype=complex))
    return float(steps.sum() / (2 * np.pi)), lo, hi, theta.size - 1, refined


def winding_number(f, contour: DiskRegion, n_samples: int = 1024) -> WindingCertificate:
    """Winding number of f(z) about 0 as z runs once around the contour circle.

    Sampling cannot see a full turn hidden between two samples, so n_samples
    must exceed about 4x the fastest local winding rate; polynomial callers
    pass at least 8 (degree + 1).
    """
    if n_samples < MIN_SAMPLES:
        raise InputError(f"n_samples must be >= {MIN_SAMPLES}")
    total, lo, _, used, refined = track_argument(lambda th: f(contour.boundary(th)), n_samples)
    k = int(round(total))
    residual = abs(total - k)
    if residual >= 0.1:
        raise NonConvergent(f"argument increment {total:.4f} is not near an integer")
    return WindingCertificate(k, contour, used, lo, refined, residual)


def _aberth(p: np.ndarray, max_iter: int):
    n = p.size - 1
    dp = np.polyder(p)
    radius = abs(p[-1] / p[0]) ** (1.0 / n)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(max_iter):
        v = np.polyval(p, z)
        dv = np.polyval(dp, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(v == 0, 0.0, v / dv)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(np.abs(z), 1e-300)):
            break
    return z


def poly_roots(f: TaylorPoly, tol: float = 1e-10, max_iter: int = 500) -> np.ndarray:
    """All roots of a polynomial, by Aberth-Ehrlich iteration then Newton polish.

    Each root z satisfies the backward-error test
    |f(z)| <= tol * sum_k |c_k| |z|^k, which is tol * max|c_k| scale for |z| <= 1.
    """
    c = f.trim().coeffs
    if c.size < 2:
        raise InputError("poly_roots needs degree >= 1")
    k0 = int(np.flatnonzero(c)[0])
    p = c[k0:][::-1] / c[-1]
    roots = np.zeros(k0, dtype=complex)
    if p.size > 1:
        z = _aberth(p, max_iter)
        dp = np.polyder(p)
        for _ in range(3):
            v = np.polyval(p, z)
            dv = np.polyval(dp, z)
            with np.errstate(divide="ignore", invalid="ignore"):
                cand = z - v / dv
            better = np.isfinite(cand) & (np.abs(np.polyval(p, cand)) < np.abs(v))
            z = np.where(better, cand, z)
        scale = np.polyval(np.abs(p), np.abs(z))
        resid = np.abs(np.polyval(p, z))
        if np.any(resid > tol * scale):
            raise NonConvergent(f"root residual {resid.max():.3e} exceeds tolerance")
        roots = np.concatenate([roots, z])
    return roots


@dataclass(frozen=True)
class NonvanishingCertificate:
    nonvanishing: bool
    winding: WindingCertificate
    rho: float
    rho_used: float
    roots_inside: int | None

    def __bool__(self):
        return self.nonvanishing

    def to_json(self):
        return {"nonvanishing": self.nonvanishing, "winding": self.winding.to_json(),
                "rho": self.rho, "rho_used": self.rho_used, "roots_inside": self.roots_inside}


def certify_nonvanishing(f: TaylorPoly, rho: float = 1.0, n_samples: int = 1024) -> NonvanishingCertificate:
    """Decide whether f has a zero in |z| < rho.

    The winding number is taken on |z| = rho, retreating the circle by a factor
    0.999 (at most 32 times) when a zero sits on it; for degree >= 1 the count
    is cross-checked against the roots.
    """
    if f.is_zero():
        raise InputError("the zero function vanishes everywhere")
    if not 0.0 < rho <= 1.0:
        raise InputError("rho must lie in (0, 1]")
    roots = poly_roots(f) if f.degree >= 1 else np.zeros(0, dtype=complex)
    mods = np.abs(roots)
    r = rho
    for _ in range(MAX_RETREATS + 1):
        near = roots.size and np.any(np.abs(mods - r) < 1e-8 * r)
        if not near:
            try:
                cert = winding_number(lambda z: evaluate(f, z), DiskRegion(0.0, r),
                                      max(n_samples, 8 * (f.degree + 1)))
                break
            except ContourTooClose:
                pass
        r *= RETREAT_FACTOR
    else:
        raise ContourTooClose(f"could not find a zero-free circle below rho={rho}")
    inside_used = int(np.sum(mods < r))
    if roots.size and inside_used != cert.winding:
        raise NonConvergent(f"winding {cert.winding} disagrees with {inside_used} roots inside |z|<{r}")
    inside = int(np.sum(mods < rho * (1 - 1e-10))) if roots.size else 0
    ok = cert.winding == 0 and inside == 0
    return NonvanishingCertificate(bool(ok), cert, rho, r, inside if roots.size else None)
