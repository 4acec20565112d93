"""Truncated Fourier representation of 1-periodic real potentials.

A potential is a finite trigonometric polynomial

    f(x) = sum_m c_m exp(2 pi i m x),    c_{-m} = conj(c_m),

tagged with its behaviour under the half-period shift u(x) -> u(x + 1/2):
``even_harmonic`` functions are invariant, ``odd_harmonic`` ones flip sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import ValidationError

EVEN = "even_harmonic"
ODD = "odd_harmonic"
NONE = "none"
PARITIES = (EVEN, ODD, NONE)

TOL = 1e-12


@dataclass(frozen=True)
class PeriodicFunction:
    coeffs: Mapping[int, complex]
    parity: str

    @property
    def K_pot(self) -> int:
        nonzero = [abs(m) for m, c in self.coeffs.items() if c != 0]
        return max(nonzero, default=0)

    def coefficient(self, m: int) -> complex:
        return self.coeffs.get(int(m), 0j)

    def dense(self, K: int) -> np.ndarray:
        """Coefficients for harmonics -K..K as an array (index m + K)."""
        out = np.zeros(2 * K + 1, dtype=complex)
        for m, c in self.coeffs.items():
            if abs(m) <= K:
                out[m + K] = c
        return out

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other: "PeriodicFunction") -> "PeriodicFunction":
        keys = set(self.coeffs) | set(other.coeffs)
        coeffs = {m: self.coefficient(m) + other.coefficient(m) for m in keys}
        parity = self.parity if self.parity == other.parity else NONE
        return make_potential(coeffs, parity)

    def __neg__(self) -> "PeriodicFunction":
        return self.scale(-1.0)

    def scale(self, a: float) -> "PeriodicFunction":
        if np.iscomplexobj(a) or not np.isreal(a):
            raise ValidationError("only real scaling preserves reality")
        return make_potential({m: a * c for m, c in self.coeffs.items()}, self.parity)

    def __mul__(self, other):
        if not isinstance(other, PeriodicFunction):
            return self.scale(float(other))
        coeffs: dict[int, complex] = {}
        for m, a in self.coeffs.items():
            for n, b in other.coeffs.items():
                coeffs[m + n] = coeffs.get(m + n, 0j) + a * b
        if NONE in (self.parity, other.parity):
            parity = NONE
        else:
            parity = EVEN if self.parity == other.parity else ODD
        return make_potential(coeffs, parity)

    __rmul__ = __mul__


def make_potential(coeffs: Mapping[int, complex], parity: str = NONE) -> PeriodicFunction:
    """Validate a harmonic -> amplitude map and complete it to a real function.

    A missing partner c_{-m} is filled with conj(c_m); a supplied partner must
    already agree with it to 1e-12.
    """
    if parity not in PARITIES:
        raise ValidationError(f"unknown parity class {parity!r}; expected one of {PARITIES}")
    raw = {int(m): complex(c) for m, c in coeffs.items()}
    full: dict[int, complex] = {}
    for m, c in raw.items():
        if m == 0:
            if abs(c.imag) > TOL:
                raise ValidationError(f"reality violation: mean value {c} is not real")
            full[0] = complex(c.real, 0.0)
            continue
        partner = raw.get(-m)
        if partner is not None and abs(partner - np.conj(c)) > TOL:
            raise ValidationError(
                f"reality violation: c[{-m}] = {partner} but conj(c[{m}]) = {np.conj(c)}"
            )
        full[m] = c
        full.setdefault(-m, np.conj(c))
    for m, c in full.items():
        if abs(c) <= TOL:
            continue
        if parity == EVEN and m % 2:
            raise ValidationError(f"parity violation: odd harmonic {m} in an even_harmonic function")
        if parity == ODD and m % 2 == 0:
            raise ValidationError(f"parity violation: even harmonic {m} in an odd_harmonic function")
    return PeriodicFunction(MappingProxyType(dict(sorted(full.items()))), parity)


def evaluate(f: PeriodicFunction, x):
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape, dtype=complex)
    for m, c in f.coeffs.items():
        total += c * np.exp(2j * np.pi * m * x)
    scale = max(1.0, sum(abs(c) for c in f.coeffs.values()))
    if np.any(np.abs(total.imag) > TOL * scale):
        raise ValidationError("imaginary residue in evaluate: coefficient map is corrupted")
    out = total.real
    return float(out) if out.ndim == 0 else out


def half_shift_residual(f: PeriodicFunction) -> float:
    """max |f(x + 1/2) - s f(x)| on 64 points, s = +1 (even) or -1 (odd).

    For parity ``none`` the smaller of the two residuals is reported.
    """
    x = np.arange(64) / 64
    fx = evaluate(f, x)
    fs = evaluate(f, x + 0.5)
    even = float(np.max(np.abs(fs - fx)))
    odd = float(np.max(np.abs(fs + fx)))
    if f.parity == EVEN:
        return even
    if f.parity == ODD:
        return odd
    return min(even, odd)


def zero() -> PeriodicFunction:
    return make_potential({}, EVEN)


def cosine(amplitude: float, harmonic: int) -> PeriodicFunction:
    """amplitude * cos(2 pi harmonic x) with its natural parity tag."""
    c = amplitude / 2
    parity = ODD if harmonic % 2 else EVEN
    return make_potential({harmonic: c, -harmonic: c}, parity)


def sine(amplitude: float, harmonic: int) -> PeriodicFunction:
    c = amplitude / 2j
    parity = ODD if harmonic % 2 else EVEN
    return make_potential({harmonic: c, -harmonic: np.conj(c)}, parity)
