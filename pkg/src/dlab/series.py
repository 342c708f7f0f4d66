"""Finite Taylor data for holomorphic functions on the unit disk."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import InputError
from .mobius import MobiusInvolution, _check_closed_disk, _complex_dtype

DEFAULT_COMPOSE_DEGREE = 64
MAX_AUTO_DEGREE = 4096
AUTO_DECAY_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class TaylorPoly:
    """Coefficient vector; ``coeffs[k]`` multiplies z**k."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise InputError("coeffs must be non-empty")
        if not np.all(np.isfinite(c)):
            raise InputError("coeffs must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "TaylorPoly":
        out = np.zeros(n + 1, dtype=complex)
        out[n] = c
        return cls(out)

    @classmethod
    def constant(cls, c: complex) -> "TaylorPoly":
        return cls([c])

    @property
    def degree(self) -> int:
        """Degree after trimming trailing zeros (the zero function has degree 0)."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def trim(self) -> "TaylorPoly":
        return TaylorPoly(self.coeffs[: self.degree + 1])

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, z, precision="standard"):
        return evaluate(self, z, precision)

    def __eq__(self, other):
        if not isinstance(other, TaylorPoly):
            return NotImplemented
        a, b = self.trim().coeffs, other.trim().coeffs
        return a.shape == b.shape and bool(np.all(a == b))

    def __hash__(self):
        return hash(self.trim().coeffs.tobytes())

    def __repr__(self):
        return f"TaylorPoly({self.coeffs.tolist()!r})"

    def _padded(self, n):
        out = np.zeros(n, dtype=complex)
        out[: self.coeffs.size] = self.coeffs
        return out

    def __add__(self, other):
        if not isinstance(other, TaylorPoly):
            other = TaylorPoly([other])
        n = max(self.coeffs.size, other.coeffs.size)
        return TaylorPoly(self._padded(n) + other._padded(n))

    __radd__ = __add__

    def __neg__(self):
        return TaylorPoly(-self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, TaylorPoly):
            other = TaylorPoly([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TaylorPoly):
            return multiply(self, other, self.coeffs.size + other.coeffs.size - 2)
        return TaylorPoly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return TaylorPoly(self.coeffs / complex(scalar))

    def to_json(self) -> dict:
        return {"type": "taylor", "coeffs": [[c.real, c.imag] for c in self.coeffs.tolist()]}

    @classmethod
    def from_json(cls, obj) -> "TaylorPoly":
        if not isinstance(obj, dict) or obj.get("type") != "taylor":
            raise InputError('function file must have "type": "taylor"')
        raw = obj.get("coeffs")
        if not isinstance(raw, list) or not raw:
            raise InputError("coeffs must be non-empty")
        vals = []
        for i, pair in enumerate(raw):
            if not (isinstance(pair, list) and len(pair) == 2):
                raise InputError(f"coeffs[{i}] must be a [re, im] pair")
            vals.append(complex(float(pair[0]), float(pair[1])))
        return cls(vals)


def evaluate(f: TaylorPoly, z, precision="standard"):
    """Horner evaluation on the closed disk; vectorized over z."""
    dtype = _complex_dtype(precision)
    zz = np.asarray(z, dtype=dtype)
    _check_closed_disk(zz)
    coeffs = f.coeffs.astype(dtype)
    acc = np.full(zz.shape, coeffs[-1], dtype=dtype)
    for c in coeffs[-2::-1]:
        acc = acc * zz + c
    return acc[()] if acc.ndim == 0 else acc


def differentiate(f: TaylorPoly) -> TaylorPoly:
    if f.coeffs.size == 1:
        return TaylorPoly([0])
    k = np.arange(1, f.coeffs.size)
    return TaylorPoly(f.coeffs[1:] * k)


def multiply(f: TaylorPoly, g: TaylorPoly, max_degree: int) -> TaylorPoly:
    """Cauchy product truncated after z**max_degree."""
    if max_degree < 0:
        raise InputError("max_degree must be >= 0")
    prod = np.convolve(f.coeffs[: max_degree + 1], g.coeffs[: max_degree + 1])
    return TaylorPoly(prod[: max_degree + 1])


def mobius_coeffs(phi: MobiusInvolution, max_degree: int) -> np.ndarray:
    """Taylor coefficients of phi itself: a, then -(1-|a|^2) conj(a)^(k-1)."""
    out = np.empty(max_degree + 1, dtype=complex)
    out[0] = phi.a
    if max_degree >= 1:
        out[1:] = -phi.one_minus_abs2 * np.conj(phi.a) ** np.arange(max_degree)
    return out


def _times_mobius(s: np.ndarray, phi: MobiusInvolution) -> np.ndarray:
    # phi(z) = a - (1 - |a|^2) z / (1 - conj(a) z); the second factor is a one-pole filter
    shifted = np.concatenate(([0.0], s[:-1]))
    tail = lfilter([1.0], [1.0, -np.conj(phi.a)], shifted)
    if phi.eps is not None:
        head = s - phi.eps * s
    else:
        head = phi.a * s
    return head - phi.one_minus_abs2 * tail


def _compose_fixed(f: TaylorPoly, phi: MobiusInvolution, n: int) -> np.ndarray:
    acc = np.zeros(n + 1, dtype=complex)
    acc[0] = f.coeffs[-1]
    for c in f.coeffs[-2::-1]:
        acc = _times_mobius(acc, phi)
        acc[0] += c
    return acc


def compose_mobius(f: TaylorPoly, phi: MobiusInvolution, max_degree: int | None = None) -> TaylorPoly:
    """Taylor coefficients of f o phi about 0, truncated after z**max_degree.

    Horner's scheme in the ring of truncated series: each step multiplies by
    the series of phi, which is a one-pole recursion in the coefficients.
    With ``max_degree=None`` the degree starts at 64 and doubles until the
    last coefficient is below 1e-14 of the largest (capped at 4096).
    """
    if max_degree is not None:
        if max_degree < 0:
            raise InputError("max_degree must be >= 0")
        return TaylorPoly(_compose_fixed(f, phi, max_degree))
    n = DEFAULT_COMPOSE_DEGREE
    while True:
        c = _compose_fixed(f, phi, n)
        peak = np.abs(c).max()
        if peak == 0 or abs(c[-1]) < AUTO_DECAY_TOL * peak or n >= MAX_AUTO_DEGREE:
            return TaylorPoly(c)
        n *= 2


def linear_combination(terms) -> TaylorPoly:
    """sum of alpha * f over (alpha, f) pairs."""
    out = TaylorPoly([0])
    for alpha, f in terms:
        out = out + alpha * f
    return out
