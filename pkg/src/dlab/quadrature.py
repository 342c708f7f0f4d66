"""Product rules for (1/pi) * integral over the unit disk of g(z) w(z) dA.

Radial weights (constant, standard_alpha, log_reciprocal) are folded into
the radial rule; the angle is the periodic trapezoid rule.  The Poisson
weight gets band-limited angular weights instead, which makes the rule
exact for trigonometric integrands of degree below half the node count.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

LOG_PANELS = 40


@lru_cache(maxsize=64)
def gauss_legendre01(n: int):
    """n-point Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=64)
def _jacobi01(n: int, alpha: float):
    # weight (1 - r)^alpha on [0, 1]
    x, w = roots_jacobi(n, alpha, 0.0)
    return 0.5 * (x + 1.0), w * 2.0 ** (-alpha - 1.0)


def graded_log_rule(n_per_panel: int, panels: int = LOG_PANELS):
    """Composite Gauss-Legendre on [0,1] with panels halving toward 0."""
    x, w = gauss_legendre01(n_per_panel)
    nodes, weights = [], []
    hi = 1.0
    for _ in range(panels):
        lo = hi / 2
        nodes.append(lo + (hi - lo) * x)
        weights.append((hi - lo) * w)
        hi = lo
    nodes.append(hi * x)
    weights.append(hi * w)
    return np.concatenate(nodes), np.concatenate(weights)


def radial_rule(w, n_r: int):
    """Nodes r_i and weights W_i with sum W_i G(r_i) ~ 2 * int_0^1 G(r) w(r) r dr.

    Only for rotation-invariant weights; the Poisson weight uses the plain
    area rule (w folded into the angular weights).
    """
    kind = w.kind
    if kind in ("constant", "poisson"):
        r, wt = gauss_legendre01(n_r)
        scale = w.c if kind == "constant" else 1.0
        return r, 2.0 * scale * wt * r
    if kind in ("standard_alpha", "one_minus_r2"):
        alpha = w.alpha_value
        r, wt = _jacobi01(n_r, alpha)
        return r, 2.0 * wt * (1.0 + r) ** alpha * r
    if kind == "log_reciprocal":
        r, wt = graded_log_rule(max(4, n_r // 16))
        return r, 2.0 * wt * r * np.log(1.0 / r)
    raise ValueError(f"no radial rule for {kind!r}")


def poisson_angular_weights(r: np.ndarray, theta: np.ndarray, zeta: complex) -> np.ndarray:
    """Weights A[i, j] with sum_j A[i, j] g(theta_j) = mean of g * P(r_i e^{i theta}, zeta).

    Exact for trigonometric polynomials g of degree <= N/2 - 1.
    """
    n = theta.size
    k = n // 2 - 1
    theta0 = np.angle(zeta)
    q = r[:, None] * np.exp(1j * (theta[None, :] - theta0))
    geo = q * (1.0 - q ** k) / (1.0 - q)
    return (1.0 + 2.0 * geo.real) / n


@dataclass(frozen=True)
class DiskQuadrature:
    value: float
    n_r: int
    n_theta: int
    rel_change: float | None
    converged: bool


def disk_mean(values, w, n_r: int, n_theta: int, chunk: int = 64) -> float:
    """One application of the product rule.

    ``values(r, theta)`` receives a column of radii (shape (m, 1)) and a row of
    angles (shape (n_theta,)) and returns the real integrand g on that grid.
    """
    r, wr = radial_rule(w, n_r)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    total = 0.0
    for s in range(0, r.size, chunk):
        rc = r[s:s + chunk]
        g = np.asarray(values(rc[:, None], theta), dtype=float)
        if w.kind == "poisson":
            ang = np.sum(poisson_angular_weights(rc, theta, w.zeta) * g, axis=1)
        else:
            ang = g.mean(axis=1)
        total += float(np.dot(wr[s:s + chunk], ang))
    return total


def adaptive_disk_mean(values, w, n_r=128, n_theta=256, tol=1e-9,
                       max_r=1024, max_theta=2048) -> DiskQuadrature:
    """Double both node counts until the relative change drops below tol."""
    prev = disk_mean(values, w, n_r, n_theta)
    change = None
    while n_r * 2 <= max_r and n_theta * 2 <= max_theta:
        n_r, n_theta = 2 * n_r, 2 * n_theta
        cur = disk_mean(values, w, n_r, n_theta)
        change = abs(cur - prev) / max(abs(cur), 1e-300)
        prev = cur
        if change < tol or cur == 0.0:
            return DiskQuadrature(cur, n_r, n_theta, change, True)
    return DiskQuadrature(prev, n_r, n_theta, change, change is not None and change < tol)
