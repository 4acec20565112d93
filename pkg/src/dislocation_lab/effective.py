"""Effective Dirac operator  nu sigma_3 D_y + sigma_star kappa(y)  and its gap spectrum.

Two independent routes to the eigenvalues in (-|theta|, |theta|):

* Evans function: shoot the solution decaying at +inf (direct system) and the
  adjoint solution decaying at -inf with fixed-step RK4 and pair them.  The
  pairing is x-independent, and vanishes exactly at eigenvalues.
* Grid oracle: the squared operator D^2 - |theta|^2 = nu^2 D_y^2 + M_0 is a
  Schroedinger operator.  It commutes with sigma_3 sigma_star, so in the two
  eigen-directions of that matrix it splits into scalar problems, each a real
  symmetric tridiagonal matrix after central differencing.

D_y = -i d/dy throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numba
import numpy as np
from scipy import integrate, linalg
from scipy.linalg import lapack

from .dirac_point import SIGMA3, DiracPoint, sigma_star
from .errors import InvariantError, ValidationError

SATURATION_TOL = 1e-10
EDGE_MARGIN = 1e-3
DECAY_MARGIN = 12.0


@dataclass(frozen=True)
class DomainWall:
    """kappa(y): tanh(y / width), or a C^2 quintic ramp equal to +-1 beyond |y| = width."""

    shape: str = "tanh"
    width: float = 1.0

    def __post_init__(self):
        if self.shape not in ("tanh", "smoothstep"):
            raise ValidationError(f"unknown wall shape {self.shape!r}")
        if not self.width > 0:
            raise ValidationError("wall width must be positive")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.shape == "tanh":
            return np.tanh(y / self.width)
        t = np.clip((y + self.width) / (2 * self.width), 0.0, 1.0)
        return 2 * t ** 3 * (10 - 15 * t + 6 * t ** 2) - 1

    def derivative(self, y):
        y = np.asarray(y, dtype=float)
        if self.shape == "tanh":
            return 1.0 / (self.width * np.cosh(y / self.width) ** 2)
        t = np.clip((y + self.width) / (2 * self.width), 0.0, 1.0)
        return 30 * t ** 2 * (1 - t) ** 2 / self.width

    def saturation_length(self, tol: float = SATURATION_TOL) -> float:
        """Smallest L with |kappa(y) -+ 1| <= tol for |y| >= L."""
        if self.shape == "smoothstep":
            return self.width
        return float(self.width * np.arctanh(1 - tol))

    def scaled(self, c: float) -> "DomainWall":
        return replace(self, width=self.width * c)


@dataclass(frozen=True)
class EffectiveDiracOperator:
    nu_star: float
    theta_star: complex
    wall: DomainWall

    def __post_init__(self):
        if self.nu_star == 0 or self.theta_star == 0:
            raise ValidationError("nu_star and theta_star must be nonzero")

    @classmethod
    def from_dirac_point(cls, dp: DiracPoint, wall: DomainWall) -> "EffectiveDiracOperator":
        return cls(dp.nu_star, dp.theta_star, wall)

    @property
    def gap(self) -> float:
        return abs(self.theta_star)

    @property
    def decay_length(self) -> float:
        return abs(self.nu_star) / abs(self.theta_star)

    @property
    def sigma_star(self) -> np.ndarray:
        return sigma_star(self.theta_star)

    def apply(self, u: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Central-difference application to samples u (shape (n, 2)) with zero ends."""
        h = y[1] - y[0]
        padded = np.vstack([np.zeros((1, 2)), u, np.zeros((1, 2))])
        du = (padded[2:] - padded[:-2]) / (2 * h)
        kin = -1j * self.nu_star * du * np.array([1.0, -1.0])
        return kin + self.wall(y)[:, None] * (u @ self.sigma_star.T)

    def default_grid_half_width(self) -> float:
        return self.wall.saturation_length() + DECAY_MARGIN * self.decay_length


@dataclass
class DiracSpectrum:
    thetas: np.ndarray
    y: np.ndarray | None = None
    eigenvectors: np.ndarray | None = None  # shape (len(thetas), len(y), 2), L2-normalized
    method: str = ""
    info: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return (len(self.thetas) - 1) // 2

    def eigenvector(self, j: int) -> np.ndarray:
        """Eigenvector for theta_j, j = -N..N."""
        return self.eigenvectors[j + self.N]


# ---------------------------------------------------------------- Evans function

@numba.njit(cache=True)
def _direct(kap, z, c, th, thc, a0, a1):
    # B alpha with B = (i / nu) [[z, -kap conj(th)], [kap th, -z]]
    return c * (z * a0 - kap * thc * a1), c * (kap * th * a0 - z * a1)


@numba.njit(cache=True)
def _adjoint(kap, z, c, th, thc, b0, b1):
    # -beta B for a row vector beta
    return -c * (z * b0 + kap * th * b1), c * (kap * thc * b0 + z * b1)


@numba.njit(cache=True)
def _rk4(kap, z, c, th, h, v0, v1, k_from, k_to, adjoint, out):
    """Integrate from node k_from to node k_to; kap holds kappa on the half-step grid.

    Writes visited nodes into ``out`` when it is non-empty; returns the end state.
    """
    thc = np.conj(th)
    step = 1 if k_to >= k_from else -1
    hs = h * step
    store = out.shape[0] > 0
    if store:
        out[k_from, 0] = v0
        out[k_from, 1] = v1
    k = k_from
    while k != k_to:
        ka = kap[2 * k]
        km = kap[2 * k + step]
        kb = kap[2 * k + 2 * step]
        if adjoint:
            p0, p1 = _adjoint(ka, z, c, th, thc, v0, v1)
            q0, q1 = _adjoint(km, z, c, th, thc, v0 + 0.5 * hs * p0, v1 + 0.5 * hs * p1)
            r0, r1 = _adjoint(km, z, c, th, thc, v0 + 0.5 * hs * q0, v1 + 0.5 * hs * q1)
            s0, s1 = _adjoint(kb, z, c, th, thc, v0 + hs * r0, v1 + hs * r1)
        else:
            p0, p1 = _direct(ka, z, c, th, thc, v0, v1)
            q0, q1 = _direct(km, z, c, th, thc, v0 + 0.5 * hs * p0, v1 + 0.5 * hs * p1)
            r0, r1 = _direct(km, z, c, th, thc, v0 + 0.5 * hs * q0, v1 + 0.5 * hs * q1)
            s0, s1 = _direct(kb, z, c, th, thc, v0 + hs * r0, v1 + hs * r1)
        v0 = v0 + hs / 6 * (p0 + 2 * q0 + 2 * r0 + s0)
        v1 = v1 + hs / 6 * (p1 + 2 * q1 + 2 * r1 + s1)
        k += step
        if store:
            out[k, 0] = v0
            out[k, 1] = v1
    return v0, v1


@numba.njit(cache=True)
def _evans_many(zs, kap, c, th, h, n, f0, f1, g0, g1):
    empty = np.empty((0, 2), dtype=np.complex128)
    mid = n // 2
    out = np.empty(zs.shape[0], dtype=np.complex128)
    for i in range(zs.shape[0]):
        a0, a1 = _rk4(kap, zs[i], c, th, h, f0[i], f1[i], n, mid, False, empty)
        b0, b1 = _rk4(kap, zs[i], c, th, h, g0[i], g1[i], 0, mid, True, empty)
        out[i] = b0 * a0 + b1 * a1
    return out


@dataclass
class EvansState:
    z: complex
    mu: complex
    f_plus: np.ndarray
    g_plus: np.ndarray
    f_minus: np.ndarray
    g_minus: np.ndarray
    X: float
    y: np.ndarray | None = None
    zeta_plus: np.ndarray | None = None
    eta_minus: np.ndarray | None = None


@dataclass
class EvansResult:
    D: complex
    residual: float
    state: EvansState


def mu_of(z, theta_abs):
    """i sqrt(|theta|^2 - z^2), principal square root (real part of the root >= 0)."""
    return 1j * np.sqrt(theta_abs ** 2 - np.asarray(z, dtype=complex) ** 2)


def asymptotic_vectors(op: EffectiveDiracOperator, z):
    """(lam, f_plus, g_plus, f_minus, g_minus) for the decaying exponent lam = mu/|nu|.

    f_plus is the right eigenvector of A_+ and g_minus the left eigenvector of
    A_- for lam; g_plus and f_minus are their duals (g_plus f_plus = 1,
    g_minus f_minus = 1).  All are analytic in z.
    """
    z = np.asarray(z, dtype=complex)
    th, nu, a = op.theta_star, op.nu_star, abs(op.theta_star)
    lam = mu_of(z, a) / abs(nu)
    w = z - nu * lam
    f_plus = np.stack([np.full_like(z, np.conj(th)), w], axis=-1) / a
    g_minus = np.stack([np.full_like(z, -th), -w], axis=-1) / a
    norm = 1 - w ** 2 / a ** 2
    g_plus = np.stack([np.full_like(z, th), -w], axis=-1) / (a * norm[..., None])
    f_minus = np.stack([np.full_like(z, -np.conj(th)), w], axis=-1) / (a * norm[..., None])
    return lam, f_plus, g_plus, f_minus, g_minus


def asymptotic_matrix(op: EffectiveDiracOperator, z, side: int) -> np.ndarray:
    th = op.theta_star
    return np.array([[z, -side * np.conj(th)], [side * th, -z]], dtype=complex) / op.nu_star


def _check_z(op, z):
    a = op.gap
    if abs(np.imag(z)) < 1e-15 and abs(np.real(z)) >= a:
        raise ValidationError(f"z={z} lies on the branch cut |z| >= |theta_star|")
    if min(abs(z - a), abs(z + a)) < 1e-6 * a:
        raise ValidationError("z is within 1e-6 of a gap edge")


def _half_step_kappa(op, X, n_steps):
    y_half = np.linspace(-X, X, 2 * n_steps + 1)
    return y_half, np.ascontiguousarray(op.wall(y_half), dtype=np.float64)


def _prepare(op, X, n_steps):
    X = op.wall.saturation_length() if X is None else float(X)
    if n_steps % 2:
        raise ValidationError("n_steps must be even (D is read at the midpoint y = 0)")
    sat = max(abs(op.wall(X) - 1), abs(op.wall(-X) + 1))
    if sat > SATURATION_TOL * (1 + 1e-4):
        raise ValidationError(f"wall not saturated at X={X}: |kappa(X) - 1| = {sat:.3g}")
    return X, 2 * X / n_steps


def evans_function(op: EffectiveDiracOperator, z, X: float | None = None,
                   n_steps: int = 2 ** 14) -> EvansResult:
    """D(z) = eta_minus(0) . zeta_plus(0) with a conservation check over [-X, X]."""
    _check_z(op, z)
    X, h = _prepare(op, X, n_steps)
    lam, fp, gp, fm, gm = asymptotic_vectors(op, z)
    decay = np.exp(1j * lam * X)
    y_half, kap = _half_step_kappa(op, X, n_steps)
    c = 1j / op.nu_star
    th = complex(op.theta_star)
    zeta = np.zeros((n_steps + 1, 2), dtype=complex)
    eta = np.zeros((n_steps + 1, 2), dtype=complex)
    zc = complex(z)
    _rk4(kap, zc, c, th, h, fp[0] * decay, fp[1] * decay, n_steps, 0, False, zeta)
    _rk4(kap, zc, c, th, h, gm[0] * decay, gm[1] * decay, 0, n_steps, True, eta)
    products = np.sum(eta * zeta, axis=1)
    D = complex(products[n_steps // 2])
    scale = np.max(np.linalg.norm(eta, axis=1) * np.linalg.norm(zeta, axis=1))
    residual = float(np.max(np.abs(products - D)) / scale)
    state = EvansState(zc, complex(mu_of(z, op.gap)), fp, gp, fm, gm, X,
                       y_half[::2], zeta, eta)
    return EvansResult(D, residual, state)


def evans_values(op: EffectiveDiracOperator, zs, X=None, n_steps=2 ** 14) -> np.ndarray:
    """D at many z at once (no trajectories kept)."""
    X, h = _prepare(op, X, n_steps)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    lam, fp, gp, fm, gm = asymptotic_vectors(op, zs)
    decay = np.exp(1j * lam * X)
    _, kap = _half_step_kappa(op, X, n_steps)
    f = fp * decay[:, None]
    g = gm * decay[:, None]
    return _evans_many(zs, kap, 1j / op.nu_star, complex(op.theta_star), h, n_steps,
                       np.ascontiguousarray(f[:, 0]), np.ascontiguousarray(f[:, 1]),
                       np.ascontiguousarray(g[:, 0]), np.ascontiguousarray(g[:, 1]))


def _secant_root(D, z0, z1, tol, max_iter=60):
    d0, d1 = D(z0), D(z1)
    for _ in range(max_iter):
        if d1 == d0:
            break
        z2 = z1 - d1 * (z1 - z0) / (d1 - d0)
        z0, d0 = z1, d1
        z1, d1 = z2, D(z2)
        if abs(z1 - z0) <= tol:
            return z1
    return None


def dirac_spectrum_evans(op: EffectiveDiracOperator, X: float | None = None,
                         n_steps: int = 2 ** 14, scan_points: int = 2001,
                         threshold: float = 1e-6) -> DiracSpectrum:
    """Real zeros of the Evans function in the gap (minus a 1e-3 relative edge margin)."""
    a = op.gap
    zs = np.linspace(-a * (1 - EDGE_MARGIN), a * (1 - EDGE_MARGIN), scan_points)
    vals = evans_values(op, zs, X, n_steps)
    mags = np.abs(vals) ** 2
    scale = float(np.sqrt(mags.max()))
    dz = zs[1] - zs[0]

    def D(z):
        return complex(evans_values(op, [z], X, n_steps)[0])

    minima = [k for k in range(1, scan_points - 1) if mags[k] <= mags[k - 1] and mags[k] <= mags[k + 1]]
    roots, slopes = [], []
    for k in minima:
        lo, hi = zs[k - 1], zs[k + 1]
        z = _secant_root(D, complex(lo), complex(hi), 1e-11 * a)
        if z is None or not (lo - dz <= z.real <= hi + dz) or abs(z.imag) > 1e-8 * a:
            continue
        zr = float(z.real)
        if abs(D(zr)) > threshold * scale:
            continue
        eta = 1e-4 * a
        second = (abs(D(zr + eta)) ** 2 - 2 * abs(D(zr)) ** 2 + abs(D(zr - eta)) ** 2) / eta ** 2
        if second * a ** 2 / scale ** 2 <= 1e-8:
            raise InvariantError(f"Evans root at z={zr:.10g} is not simple")
        roots.append(zr)
        slopes.append(second)
    roots = np.array(sorted(roots))
    if len(roots) > 1 and np.min(np.diff(roots)) < 10 * dz:
        raise InvariantError("unresolved Evans root pair: increase scan_points")
    return DiracSpectrum(roots, method="evans",
                         info={"scan_points": scan_points, "n_steps": n_steps, "scale": scale})


# ---------------------------------------------------------------- grid oracle

def sector_vectors(theta_star: complex) -> dict[int, np.ndarray]:
    """Unit w_s with sigma_3 sigma_star w_s = i s |theta| w_s, s = +-1."""
    a = abs(theta_star)
    return {s: np.array([np.conj(theta_star), 1j * s * a]) / (np.sqrt(2) * a) for s in (1, -1)}


def _sector_matrix(op, y, h, s):
    nu, a = op.nu_star, op.gap
    kap = op.wall(y)
    diag = 2 * nu ** 2 / h ** 2 + a ** 2 * (kap ** 2 - 1) + s * nu * a * op.wall.derivative(y)
    off = np.full(len(y) - 1, -nu ** 2 / h ** 2)
    return diag, off


def dirac_spectrum_grid(op: EffectiveDiracOperator, Y: float | None = None,
                        n: int = 2 ** 13) -> DiracSpectrum:
    """Bound states of the squared operator on [-Y, Y] (Dirichlet), mapped back to D.

    Nonzero eigenvalues come as +-z pairs split across the two sectors; the
    sector ground state without a partner is the zero mode.  Eigenvectors at
    +-|z| are rebuilt from the two sector vectors with the central-difference
    D, which maps one sector onto the other.
    """
    Y = op.default_grid_half_width() if Y is None else float(Y)
    L = op.decay_length
    if Y < DECAY_MARGIN * L * (1 - 1e-12):
        raise ValidationError(f"Y={Y} is below {DECAY_MARGIN} decay lengths ({DECAY_MARGIN * L})")
    h = 2 * Y / n
    y = -Y + (np.arange(n) + 0.5) * h
    a = op.gap
    hd = h / L  # grid step in decay lengths; tolerances below are dimensionless
    edge = 10 * hd ** 2 * a ** 2
    w = sector_vectors(op.theta_star)

    levels: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for s in (1, -1):
        diag, off = _sector_matrix(op, y, h, s)
        lam, vec = linalg.eigh_tridiagonal(diag, off, select="v", select_range=(-2 * a ** 2, 0.0))
        if np.any(lam > -edge):
            raise InvariantError(f"squared-operator eigenvalue within {edge:.3g} of the gap edge")
        levels[s] = (lam, vec / np.sqrt(h))

    # the sector holding the deepest level carries the zero mode
    zs = min(levels, key=lambda s: levels[s][0][0] if len(levels[s][0]) else np.inf)
    other = -zs
    lam_z, vec_z = levels[zs]
    lam_o, vec_o = levels[other]
    if len(lam_z) != len(lam_o) + 1:
        raise InvariantError(
            f"sector level counts {len(lam_z)} and {len(lam_o)} do not pair up (edge ambiguity?)"
        )

    thetas, vectors = [], []
    u0 = vec_z[:, 0][:, None] * w[zs][None, :]
    thetas.append(float(np.real(np.vdot(u0, op.apply(u0, y))) * h))
    vectors.append(u0)
    split = []
    for k in range(len(lam_o)):
        ua = vec_z[:, k + 1][:, None] * w[zs][None, :]
        ub = vec_o[:, k][:, None] * w[other][None, :]
        c = np.vdot(ub, op.apply(ua, y)) * h
        mag = float(np.sqrt(0.5 * (lam_z[k + 1] + lam_o[k]) + a ** 2))
        split.append(abs(lam_z[k + 1] - lam_o[k]))
        if abs(c) < 10 * hd * a:
            raise InvariantError("sign recovery ambiguous for a paired level")
        for sgn in (1.0, -1.0):
            v = (ua + sgn * (c / abs(c)) * ub) / np.sqrt(2)
            thetas.append(sgn * mag)
            vectors.append(v)

    order = np.argsort(thetas)
    thetas = np.array(thetas)[order]
    vectors = np.array(vectors)[order]
    for t, v in zip(thetas, vectors):
        res = np.sqrt(h) * np.linalg.norm(op.apply(v, y) - t * v)
        if res > 10 * hd * a:
            raise InvariantError(f"grid eigenvector residual {res:.3g} at theta={t:.6g}")
    info = {"h": h, "Y": Y, "n": n, "h_dimless": hd, "zero_mode_sector": zs,
            "zero_level": float(lam_z[0]), "levels": {zs: lam_z, other: lam_o}, "max_pair_split": float(max(split, default=0.0))}
    return DiracSpectrum(thetas, y, vectors, method="grid", info=info)


def _sector_inverse_iteration(op, y, s, lam0, rng, iterations=3):
    h = y[1] - y[0]
    diag, off = _sector_matrix(op, y, h, s)
    u = rng.standard_normal(len(y))
    for _ in range(iterations):
        _, _, _, u, info = lapack.dgtsv(off, diag - lam0, off, u)
        if info != 0:
            raise InvariantError("sector solve failed")
        u /= np.linalg.norm(u)
    return u / np.sqrt(h)


def refine_eigenvector(op: EffectiveDiracOperator, spec: DiracSpectrum, j: int, y: np.ndarray,
                       seed: int = 0) -> np.ndarray:
    """Eigenvector for theta_j re-solved on another uniform grid y (Dirichlet beyond its ends).

    The coarse sector levels of a grid spectrum seed inverse iteration on the
    new grid, so the envelope can be sampled as finely as needed without
    interpolation.  Works on the scalar sector profiles to keep memory flat.
    """
    if spec.method != "grid":
        raise ValidationError("refinement needs a grid-oracle spectrum")
    rng = np.random.default_rng(seed)
    w = sector_vectors(op.theta_star)
    zs = spec.info["zero_mode_sector"]
    lam_z, lam_o = spec.info["levels"][zs], spec.info["levels"][-zs]
    h = y[1] - y[0]
    if j == 0:
        pa = _sector_inverse_iteration(op, y, zs, lam_z[0], rng)
        return pa[:, None] * w[zs][None, :]
    k = abs(j) - 1
    pa = _sector_inverse_iteration(op, y, zs, lam_z[k + 1], rng)
    pb = _sector_inverse_iteration(op, y, -zs, lam_o[k], rng)
    wa, wb = w[zs], w[-zs]
    dpa = np.empty_like(pa)
    dpa[1:-1] = (pa[2:] - pa[:-2]) / (2 * h)
    dpa[0], dpa[-1] = pa[1] / (2 * h), -pa[-2] / (2 * h)
    kin = -1j * op.nu_star * np.vdot(wb, SIGMA3 @ wa)
    pot = np.vdot(wb, op.sigma_star @ wa)
    c = h * (kin * np.dot(pb, dpa) + pot * np.dot(pb, op.wall(y) * pa))
    e = np.sign(j) * c / abs(c)
    v = (pa[:, None] * wa[None, :] + e * pb[:, None] * wb[None, :]) / np.sqrt(2)
    return v / np.sqrt(h * np.sum(np.abs(v) ** 2))


def grid_tolerance(spec: DiracSpectrum, op: EffectiveDiracOperator) -> float:
    """max(1e-6, 10 h^2) with h measured in decay lengths, in units of |theta|."""
    return max(1e-6, 10 * spec.info["h_dimless"] ** 2) * op.gap


# ---------------------------------------------------------------- zero mode

def zero_mode(op: EffectiveDiracOperator, y: np.ndarray) -> np.ndarray:
    """exp(-(|theta|/|nu|) int_0^y kappa) w on a uniform grid, L2-normalized.

    w is the eigenvector of sigma_3 sigma_star for -i sgn(nu) |theta|; with
    the other branch the profile would grow at both ends.
    """
    y = np.asarray(y, dtype=float)
    h = y[1] - y[0]
    K = integrate.cumulative_simpson(op.wall(y), x=y, initial=0.0)
    expo = -(op.gap / abs(op.nu_star)) * K
    if expo[0] > expo.max() - 1 or expo[-1] > expo.max() - 1:
        raise InvariantError("zero-mode profile does not decay on the grid")
    prof = np.exp(expo - expo.max())
    w = sector_vectors(op.theta_star)[-int(np.sign(op.nu_star))]
    alpha = prof[:, None] * w[None, :]
    return alpha / np.sqrt(h * np.sum(np.abs(alpha) ** 2))


def spectral_apply(op: EffectiveDiracOperator, u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """D applied with an FFT derivative (u treated as periodic on the grid)."""
    h = y[1] - y[0]
    k = 2 * np.pi * np.fft.fftfreq(len(y), d=h)
    du = np.fft.ifft(1j * k[:, None] * np.fft.fft(u, axis=0), axis=0)
    return -1j * op.nu_star * du * np.array([1.0, -1.0]) + op.wall(y)[:, None] * (u @ op.sigma_star.T)


def zero_mode_residual(op: EffectiveDiracOperator, y: np.ndarray, alpha: np.ndarray | None = None) -> float:
    alpha = zero_mode(op, y) if alpha is None else alpha
    return float(np.linalg.norm(spectral_apply(op, alpha, y)) / np.linalg.norm(alpha))


def conjugate_by_symmetry(op: EffectiveDiracOperator, u: np.ndarray) -> np.ndarray:
    """Apply sigma_3 sigma_star (normalized) pointwise: maps the theta eigenvector to -theta."""
    G = SIGMA3 @ op.sigma_star / op.gap
    return u @ G.T


def posch_teller_thetas(op: EffectiveDiracOperator) -> np.ndarray:
    """Closed-form spectrum for a tanh wall.

    With a = width |theta| / |nu| the sector problems are Poeschl-Teller wells
    of strengths a(a+1) and a(a-1), giving |theta| sqrt(1 - (1 - n/a)^2) for
    integers 0 <= n < a.
    """
    if op.wall.shape != "tanh":
        raise ValidationError("closed form only for tanh walls")
    a = op.wall.width / op.decay_length
    n = np.arange(int(np.ceil(a * (1 - 1e-12))))  # n = a itself is the gap edge, not a bound state
    pos = op.gap * np.sqrt(1 - (1 - n / a) ** 2)
    return np.sort(np.concatenate([-pos[1:], pos]))
