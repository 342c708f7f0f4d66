"""Involutive disk automorphisms phi_a(z) = (a - z) / (1 - conj(a) z).

Parameters close to the boundary point 1 are carried as ``eps = 1 - a``
and every formula is rearranged in terms of the *gap* ``t = 1 - z`` so that
nothing cancels.  The inverse map is never needed: phi_a is its own inverse.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


def _complex_dtype(precision):
    if precision == "standard":
        return np.complex128
    if precision == "extended":
        return np.clongdouble
    raise InputError(f"unknown precision {precision!r}")


@dataclass(frozen=True)
class MobiusInvolution:
    """phi_a with |a| < 1; ``eps`` set means a = 1 - eps exactly."""

    a: complex
    eps: float | None = None

    def __post_init__(self):
        if self.eps is not None:
            eps = float(self.eps)
            if not (0.0 < eps < 1.0) or not np.isfinite(eps):
                raise InputError(f"eps must lie in (0, 1), got {self.eps!r}")
            object.__setattr__(self, "eps", eps)
            object.__setattr__(self, "a", complex(1.0 - eps))
        else:
            a = complex(self.a)
            if not abs(a) < 1.0:
                raise InputError(f"|a| must be < 1, got |a| = {abs(a)!r}")
            object.__setattr__(self, "a", a)

    @classmethod
    def from_eps(cls, eps: float) -> "MobiusInvolution":
        return cls(a=1.0 - eps, eps=eps)

    @property
    def one_minus_abs2(self) -> float:
        """1 - |a|^2 without cancellation."""
        if self.eps is not None:
            return self.eps * (2.0 - self.eps)
        return 1.0 - abs(self.a) ** 2

    def __call__(self, z, precision="standard"):
        return apply(self, z, precision)

    def to_json(self) -> dict:
        if self.eps is not None:
            return {"eps": self.eps}
        return {"a": [self.a.real, self.a.imag]}

    @classmethod
    def from_json(cls, obj) -> "MobiusInvolution":
        if not isinstance(obj, dict):
            raise InputError("mobius parameter must be an object with 'a' or 'eps'")
        if "eps" in obj:
            return cls.from_eps(float(obj["eps"]))
        if "a" in obj:
            re, im = obj["a"]
            return cls(complex(float(re), float(im)))
        raise InputError("mobius parameter needs 'a' or 'eps'")


@dataclass(frozen=True)
class DiskRegion:
    """Closed disk with the given center and radius.

    ``gap`` optionally stores ``1 - center`` for disks hugging the boundary
    point 1; when present it is the authoritative description of the center.
    """

    center: complex
    radius: float
    gap: float | None = None

    def __post_init__(self):
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise InputError(f"disk radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def inside_unit_disk(self) -> bool:
        if self.gap is not None:
            return self.radius < self.gap
        return abs(self.center) + self.radius < 1.0

    def boundary(self, theta):
        return self.center + self.radius * np.exp(1j * np.asarray(theta))

    def to_json(self) -> dict:
        out = {"center": [self.center.real, self.center.imag], "radius": self.radius}
        if self.gap is not None:
            out["gap"] = self.gap
        return out

    @classmethod
    def from_json(cls, obj) -> "DiskRegion":
        re, im = obj["center"]
        return cls(complex(re, im), float(obj["radius"]), obj.get("gap"))


def _check_closed_disk(z):
    mod = np.abs(z)
    if np.any(mod > 1.0 + 4 * np.finfo(float).eps):
        raise InputError("points must satisfy |z| <= 1")


def apply(phi: MobiusInvolution, z, precision="standard"):
    """Evaluate phi at z (scalar or array) on the closed disk."""
    dtype = _complex_dtype(precision)
    zz = np.asarray(z, dtype=dtype)
    _check_closed_disk(zz)
    if phi.eps is not None:
        eps = np.longdouble(phi.eps) if precision == "extended" else phi.eps
        t = 1 - zz
        out = (t - eps) / (t + eps * zz)
    else:
        a = dtype(phi.a)
        out = (a - zz) / (1 - np.conj(a) * zz)
    return out[()] if out.ndim == 0 else out


def apply_gap(phi: MobiusInvolution, t, precision="standard"):
    """Gap-in, gap-out evaluation for eps-form parameters.

    With z = 1 - t, returns ``(phi(z), 1 - phi(z))`` computed without
    cancellation, valid however small ``t`` and ``eps`` are.
    """
    if phi.eps is None:
        raise InputError("apply_gap needs an eps-form parameter")
    dtype = _complex_dtype(precision)
    t = np.asarray(t, dtype=dtype)
    eps = np.longdouble(phi.eps) if precision == "extended" else phi.eps
    den = t + eps * (1 - t)
    return (t - eps) / den, eps * (2 - t) / den


def derivative(phi: MobiusInvolution, z):
    z = np.asarray(z, dtype=complex)
    return -phi.one_minus_abs2 / (1 - np.conj(phi.a) * z) ** 2


def circumcircle(z1: complex, z2: complex, z3: complex) -> tuple[complex, float]:
    d = 2 * (z1.real * (z2.imag - z3.imag) + z2.real * (z3.imag - z1.imag)
             + z3.real * (z1.imag - z2.imag))
    if d == 0:
        raise InputError("collinear points have no circumcircle")
    s1, s2, s3 = abs(z1) ** 2, abs(z2) ** 2, abs(z3) ** 2
    ux = (s1 * (z2.imag - z3.imag) + s2 * (z3.imag - z1.imag) + s3 * (z1.imag - z2.imag)) / d
    uy = (s1 * (z3.real - z2.real) + s2 * (z1.real - z3.real) + s3 * (z2.real - z1.real)) / d
    c = complex(ux, uy)
    return c, abs(z1 - c)


def image_disk(phi: MobiusInvolution, r: float) -> DiskRegion:
    """The disk phi(D_r), which equals phi^{-1}(D_r)."""
    if not 0.0 < r < 1.0:
        raise InputError(f"r must lie in (0, 1), got {r!r}")
    if phi.eps is not None:
        eps = phi.eps
        a = 1.0 - eps
        one_m_a2 = phi.one_minus_abs2
        den = 1.0 - r * r + one_m_a2 * r * r
        gap = eps * (1.0 + a * r * r) / den
        return DiskRegion(1.0 - gap, r * one_m_a2 / den, gap=gap)

    pts = apply(phi, r * np.exp(1j * np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])))
    center, radius = circumcircle(*(complex(p) for p in pts))
    theta = 2 * np.pi * (np.arange(16) + 0.5) / 16
    dev = np.abs(np.abs(apply(phi, r * np.exp(1j * theta)) - center) - radius)
    if dev.max() > 1e-12 * max(radius, abs(center), 1e-300):
        # ill-conditioned circumcircle (|a| close to 1): use the closed form
        a = phi.a
        den = 1.0 - abs(a) ** 2 * r * r
        center = a * (1.0 - r * r) / den
        radius = r * phi.one_minus_abs2 / den
    return DiskRegion(center, radius)
