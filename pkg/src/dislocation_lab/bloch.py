"""Floquet-Bloch fibers of P_delta = -d^2/dx^2 + V + delta W in a plane-wave basis.

The fiber at quasimomentum xi acts on functions with f(x + 1) = exp(i xi) f(x);
we expand in exp(i (xi + 2 pi m) x), |m| <= K, which turns the operator into
diagonal kinetic energy plus a Toeplitz matrix of potential coefficients.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .errors import InvariantError, NoGapError, ValidationError
from .fourier import EVEN, ODD, PeriodicFunction

DEFAULT_K = 16
DEFAULT_XI_POINTS = 257
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class FiberMatrix:
    xi: float
    delta: float
    K: int
    entries: np.ndarray

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def hermitian_residual(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


def _toeplitz(f: PeriodicFunction, K: int) -> np.ndarray:
    # entry (m, m') = f_hat[m - m']
    diffs = np.arange(-2 * K, 2 * K + 1)
    col = np.array([f.coefficient(d) for d in diffs[2 * K:]])
    row = np.array([f.coefficient(-d) for d in diffs[2 * K:]])
    return linalg.toeplitz(col, row)


def check_truncation(K: int, *potentials: PeriodicFunction) -> None:
    band = max(p.K_pot for p in potentials)
    if K < 4 * band:
        raise ValidationError(
            f"plane-wave truncation K={K} is below 4x the potential bandwidth ({band})"
        )


def assemble_fiber(V: PeriodicFunction, W: PeriodicFunction, delta: float, xi: float,
                   K: int = DEFAULT_K) -> FiberMatrix:
    if V.parity not in (EVEN,):
        raise ValidationError("V must be even_harmonic")
    if W.parity not in (ODD,):
        raise ValidationError("W must be odd_harmonic")
    check_truncation(K, V, W)
    m = np.arange(-K, K + 1)
    A = _toeplitz(V, K) + delta * _toeplitz(W, K)
    A[np.diag_indices_from(A)] += (xi + 2 * np.pi * m) ** 2
    return FiberMatrix(float(xi), float(delta), K, A)


def fiber_spectrum(M: FiberMatrix) -> np.ndarray:
    if M.hermitian_residual() > HERMITIAN_TOL * max(1.0, np.abs(M.entries).max()):
        raise InvariantError("fiber matrix is not Hermitian")
    try:
        return linalg.eigvalsh(M.entries)
    except linalg.LinAlgError as exc:
        raise InvariantError(f"eigensolver failed at xi={M.xi}: {exc}") from exc


@dataclass
class BandStructure:
    xi_grid: np.ndarray
    curves: np.ndarray  # shape (len(xi_grid), n_bands), curves[:, j-1] is band j
    model: tuple | None = field(default=None, repr=False)  # (V, W, delta, K) for refinement

    @property
    def n_bands(self) -> int:
        return self.curves.shape[1]

    def band(self, j: int) -> np.ndarray:
        """Dispersion curve of band j (1-based)."""
        return self.curves[:, j - 1]

    def header(self) -> list[str]:
        return ["xi"] + [f"band{j}" for j in range(1, self.n_bands + 1)]

    def rows(self) -> np.ndarray:
        return np.column_stack([self.xi_grid, self.curves])


def default_xi_grid(n: int = DEFAULT_XI_POINTS) -> np.ndarray:
    return np.linspace(0.0, 2 * np.pi, n)


def band_structure(V, W, delta, xi_grid=None, K=DEFAULT_K, n_bands=4, threads=1) -> BandStructure:
    xi_grid = default_xi_grid() if xi_grid is None else np.asarray(xi_grid, dtype=float)
    if np.any(np.diff(xi_grid) < 0) or xi_grid.min() < 0 or xi_grid.max() > 2 * np.pi + 1e-12:
        raise ValidationError("xi_grid must be sorted inside [0, 2 pi]")
    if not 1 <= n_bands <= 2 * K + 1:
        raise ValidationError(f"n_bands must lie in [1, {2 * K + 1}]")

    def one(xi):
        return fiber_spectrum(assemble_fiber(V, W, delta, xi, K))[:n_bands]

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(one, xi_grid))  # map preserves grid order
    else:
        values = [one(xi) for xi in xi_grid]
    return BandStructure(xi_grid, np.array(values), (V, W, float(delta), K))


@dataclass(frozen=True)
class SpectralGap:
    lower_edge: float
    upper_edge: float
    j_star: int

    @property
    def width(self) -> float:
        return self.upper_edge - self.lower_edge

    @property
    def center(self) -> float:
        return 0.5 * (self.lower_edge + self.upper_edge)


def _refine_extremum(bands: BandStructure, j: int, k: int, sign: float) -> float:
    """Polish max (sign=-1) or min (sign=+1) of band j near grid index k."""
    V, W, delta, K = bands.model
    xs = bands.xi_grid
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    if hi <= lo:
        return float(bands.band(j)[k])

    def f(xi):
        return sign * fiber_spectrum(assemble_fiber(V, W, delta, xi, K))[j - 1]

    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    return float(sign * min(res.fun, f(xs[k])))


def essential_gap(bands: BandStructure, j_star: int, refine: bool = True,
                  tol: float = 1e-9) -> SpectralGap:
    """Gap between band j_star and j_star + 1, maximised/minimised over xi.

    Raises NoGapError when the bands touch (within ``tol`` relative).
    """
    if j_star + 1 > bands.n_bands:
        raise ValidationError(f"need at least {j_star + 1} bands, have {bands.n_bands}")
    lower_curve = bands.band(j_star)
    upper_curve = bands.band(j_star + 1)
    k_lo, k_hi = int(np.argmax(lower_curve)), int(np.argmin(upper_curve))
    lower, upper = float(lower_curve[k_lo]), float(upper_curve[k_hi])
    if refine and bands.model is not None:
        lower = max(lower, _refine_extremum(bands, j_star, k_lo, -1.0))
        upper = min(upper, _refine_extremum(bands, j_star + 1, k_hi, +1.0))
    if upper - lower <= tol * max(1.0, abs(lower)):
        raise NoGapError(f"no spectral gap above band {j_star}: [{lower}, {upper}]")
    return SpectralGap(lower, upper, j_star)


def two_band_model(nu_star, theta_star, delta, xi, E_star=0.0):
    """Eigenvalues E_star -/+ sqrt(|theta|^2 delta^2 + nu^2 (xi - pi)^2) of the 2x2 model."""
    r = np.sqrt(abs(theta_star) ** 2 * np.square(delta) + nu_star ** 2 * np.square(np.asarray(xi) - np.pi))
    return E_star - r, E_star + r


def gap_of(V, W, delta, j_star, K=DEFAULT_K, xi_grid=None) -> SpectralGap:
    """Convenience: band sweep followed by essential_gap."""
    bands = band_structure(V, W, delta, xi_grid, K, n_bands=j_star + 1)
    return essential_gap(bands, j_star)


__all__ = [
    "FiberMatrix", "BandStructure", "SpectralGap", "assemble_fiber", "fiber_spectrum",
    "band_structure", "essential_gap", "two_band_model", "gap_of", "default_xi_grid",
    "DEFAULT_K",
]
