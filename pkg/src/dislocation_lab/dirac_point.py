"""Dirac points of P_0 at quasimomentum pi and their invariants nu_star, theta_star.

Bloch modes at xi = pi are stored by their plane-wave coefficients d_m on
exp(i (pi + 2 pi m) x), for m in [-K-1, K].  That index range is closed under
m -> -m - 1, which is what complex conjugation does to these plane waves:
conj(exp(i (pi + 2 pi m) x)) = exp(i (pi + 2 pi (-m-1)) x).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import linalg

from .bloch import DEFAULT_K, check_truncation
from .errors import HypothesisError, InvariantError, ValidationError
from .fourier import EVEN, ODD, PeriodicFunction

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

RESIDUAL_TOL = 1e-10
HYPOTHESIS_TOL = 1e-8


def sigma_star(theta_star: complex) -> np.ndarray:
    return np.array([[0, np.conj(theta_star)], [theta_star, 0]], dtype=complex)


@dataclass(frozen=True)
class DiracPoint:
    E_star: float
    j_star: int
    K: int
    phi_plus: np.ndarray  # d_m for m = -K-1 .. K
    nu_star: float | None = None
    theta_star: complex | None = None

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(-self.K - 1, self.K + 1)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.pi + 2 * np.pi * self.harmonics

    @property
    def phi_minus(self) -> np.ndarray:
        # coefficient at m is conj(d_{-m-1}); on this index range that is a reversal
        return np.conj(self.phi_plus[::-1])

    @property
    def sigma_star(self) -> np.ndarray:
        return sigma_star(self.theta_star)

    def evaluate_plus(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        # one harmonic at a time: x can be a multi-million point grid
        for k, d in zip(self.wavenumbers, self.phi_plus):
            if d != 0:
                out += d * np.exp(1j * k * x)
        return out

    def evaluate_minus(self, x):
        return np.conj(self.evaluate_plus(x))


def _pi_block(V: PeriodicFunction, harmonics: np.ndarray) -> np.ndarray:
    """P_0(pi) restricted to the plane waves with the given harmonics."""
    H = np.array([[V.coefficient(m - n) for n in harmonics] for m in harmonics], dtype=complex)
    H[np.diag_indices_from(H)] += (np.pi + 2 * np.pi * harmonics) ** 2
    return H


def find_dirac_points(V: PeriodicFunction, K: int = DEFAULT_K, max_energy: float = 50.0,
                      degeneracy_tol: float | None = None) -> list[tuple[float, int]]:
    """Degenerate pairs of P_0(pi) eigenvalues below ``max_energy``.

    ``degeneracy_tol`` defaults to 1e-9 |E|.  A pair splitting within a factor
    10 of the tolerance is ambiguous and raises.
    """
    if V.parity != EVEN:
        raise ValidationError("V must be even_harmonic for Dirac points at pi")
    check_truncation(K, V)
    # the range -K-1..K is closed under m -> -m-1, so no truncation orphans
    evals = linalg.eigvalsh(_pi_block(V, np.arange(-K - 1, K + 1)))
    n = int(np.sum(evals < max_energy))
    evals = evals[:min(n + 1, len(evals))]

    def tol(E):
        return degeneracy_tol if degeneracy_tol is not None else 1e-9 * max(1.0, abs(E))

    points = []
    i = 0
    while i < n:
        if i + 1 < len(evals):
            gap = evals[i + 1] - evals[i]
            t = tol(evals[i])
            if gap <= t:
                points.append((float(0.5 * (evals[i] + evals[i + 1])), i + 1))
                i += 2
                continue
            if gap <= 10 * t:
                raise InvariantError(
                    f"ambiguous clustering near E={evals[i]:.12g}: pair split {gap:.3g}"
                    f" within 10x of tolerance {t:.3g}; change K or degeneracy_tol"
                )
        raise InvariantError(
            f"unpaired P_0(pi) eigenvalue {evals[i]:.12g}; half-shift symmetry broken or K too small"
        )
    return [p for p in points if p[0] < max_energy]


def _gauge_fix(d: np.ndarray, harmonics: np.ndarray) -> np.ndarray:
    mags = np.abs(d)
    top = mags.max()
    candidates = np.flatnonzero(mags >= top * (1 - 1e-9))
    k = min(candidates, key=lambda i: (abs(harmonics[i]), harmonics[i]))
    return d * (np.conj(d[k]) / abs(d[k]))


def dirac_eigenbasis(V: PeriodicFunction, E_star: float, K: int = DEFAULT_K,
                     tol: float | None = None) -> DiracPoint:
    """Normalized P_0(pi) eigenvector at E_star with S phi = i phi (even harmonics only).

    Gauge: the largest coefficient (smallest |m|, then smallest m, on ties)
    is made real and positive.
    """
    if V.parity != EVEN:
        raise ValidationError("V must be even_harmonic")
    check_truncation(K, V)
    tol = 1e-9 * max(1.0, abs(E_star)) if tol is None else tol
    harmonics = np.arange(-K - 1, K + 1)
    even = harmonics[harmonics % 2 == 0]
    H = _pi_block(V, even)
    evals, evecs = linalg.eigh(H)
    k = int(np.argmin(np.abs(evals - E_star)))
    if abs(evals[k] - E_star) > 1e3 * tol:
        raise InvariantError(f"E_star={E_star} is not an eigenvalue of the even-harmonic block")
    neighbours = np.delete(evals, k)
    if neighbours.size and np.min(np.abs(neighbours - evals[k])) <= 10 * tol:
        raise InvariantError("E_star is not simple in the even-harmonic subspace (truncation failure?)")

    d = np.zeros(len(harmonics), dtype=complex)
    d[harmonics % 2 == 0] = evecs[:, k]
    d = _gauge_fix(d / np.linalg.norm(d), harmonics)

    full = _pi_block(V, harmonics)
    residual = np.linalg.norm(full @ d - evals[k] * d)
    if residual > RESIDUAL_TOL * max(1.0, abs(evals[k])):
        raise InvariantError(f"Dirac eigenvector residual {residual:.3g} too large")
    j_star = 1 + int(np.sum(linalg.eigvalsh(full) < evals[k] - tol))
    return DiracPoint(float(evals[k]), j_star, K, d)


def _multiply(W: PeriodicFunction, c: np.ndarray, harmonics: np.ndarray) -> np.ndarray:
    """Coefficients of W * f on the same index range (f given by c)."""
    out = np.zeros_like(c)
    for p, w in W.coeffs.items():
        shifted = np.zeros_like(c)
        if p >= 0:
            shifted[p:] = c[:len(c) - p]
        else:
            shifted[:p] = c[-p:]
        out += w * shifted
    return out


def _inner(a: np.ndarray, b: np.ndarray) -> complex:
    return complex(np.vdot(a, b))


def compute_invariants(dp: DiracPoint, W: PeriodicFunction) -> DiracPoint:
    if W.parity != ODD:
        raise ValidationError("W must be odd_harmonic")
    d = dp.phi_plus
    nu = float(2 * np.sum(dp.wavenumbers * np.abs(d) ** 2))
    theta = _inner(d, _multiply(W, dp.phi_minus, dp.harmonics))
    if abs(nu) < HYPOTHESIS_TOL:
        raise HypothesisError(f"nu_star = {nu:.3g} vanishes: no transverse crossing")
    if abs(theta) < HYPOTHESIS_TOL:
        raise HypothesisError(f"theta_star = {theta:.3g} vanishes: W does not open a gap")
    return replace(dp, nu_star=nu, theta_star=theta)


def dirac_point(V: PeriodicFunction, W: PeriodicFunction, K: int = DEFAULT_K, index: int = 1,
                max_energy: float | None = None) -> DiracPoint:
    """The ``index``-th Dirac point at pi (1 = lowest) with invariants filled in."""
    if max_energy is None:
        max_energy = (np.pi * (2 * index + 1)) ** 2 + 4 * sum(abs(c) for c in V.coeffs.values())
    points = find_dirac_points(V, K, max_energy)
    if len(points) < index:
        raise ValidationError(f"only {len(points)} Dirac points below {max_energy}")
    E, _ = points[index - 1]
    return compute_invariants(dirac_eigenbasis(V, E, K), W)


def pauli_matrices(dp: DiracPoint, W: PeriodicFunction) -> tuple[np.ndarray, np.ndarray]:
    """The 2x2 matrices <phi_s, D_x phi_t> and <phi_s, W phi_t>.

    Layout follows the Pauli-identity statement: row index t, column index s.
    """
    basis = {"+": dp.phi_plus, "-": dp.phi_minus}
    k = dp.wavenumbers
    MD = np.empty((2, 2), dtype=complex)
    MW = np.empty((2, 2), dtype=complex)
    for r, t in enumerate("+-"):
        for c, s in enumerate("+-"):
            MD[r, c] = _inner(basis[s], k * basis[t])
            MW[r, c] = _inner(basis[s], _multiply(W, basis[t], dp.harmonics))
    return MD, MW


def pauli_identity_residuals(dp: DiracPoint, W: PeriodicFunction) -> tuple[float, float]:
    MD, MW = pauli_matrices(dp, W)
    rD = float(np.max(np.abs(2 * MD - dp.nu_star * SIGMA3)))
    rW = float(np.max(np.abs(MW - dp.sigma_star)))
    return rD, rW


def fermi_velocity_check(bands, dp: DiracPoint, h_xi: float) -> float:
    """Max relative error of the four one-sided slopes at pi against +-|nu_star|.

    Expected signs: the lower band rises to E_star from the left and falls to
    the right; the upper band mirrors it.
    """
    xs = bands.xi_grid
    k = int(np.argmin(np.abs(xs - np.pi)))
    if abs(xs[k] - np.pi) > 1e-12 or k == 0 or k == len(xs) - 1:
        raise ValidationError("band grid must contain pi as an interior point")
    hl, hr = xs[k] - xs[k - 1], xs[k + 1] - xs[k]
    if max(hl, hr) > h_xi * (1 + 1e-12):
        raise ValidationError(f"grid spacing near pi exceeds h_xi={h_xi}")
    vF = abs(dp.nu_star)
    errs = []
    for j, sign in ((dp.j_star, -1.0), (dp.j_star + 1, +1.0)):
        lam = bands.band(j)
        right = (lam[k + 1] - lam[k]) / hr
        left = (lam[k] - lam[k - 1]) / hl
        errs.append(abs(right - sign * vF) / vF)
        errs.append(abs(left + sign * vF) / vF)
    return float(max(errs))
