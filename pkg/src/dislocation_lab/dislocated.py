"""The dislocated operator -d^2/dx^2 + V + delta kappa(delta x) W on a truncated line.

Second-order finite differences give a real symmetric tridiagonal matrix with
constant off-diagonal -1/h^2, so eigenvalue counts below a shift follow from
the signs of the LDL^T pivots (Sturm).  Gap eigenvalues are isolated by
bisection on those counts and their vectors obtained by inverse iteration.

The h^2 error of the scheme moves every spectral feature near E_star by
about the same amount (-pi^4 h^2 / 12 for V = 0, i.e. comparable to the gap
itself at desk-scale delta).  Gap windows are therefore taken from the same
discretization applied to the periodic bulk (``discrete_gap``), and continuum
estimates come from Richardson extrapolation in h.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import linalg, optimize
from scipy.linalg import lapack

from .bloch import SpectralGap
from .dirac_point import DiracPoint
from .effective import SATURATION_TOL, DECAY_MARGIN, DomainWall
from .errors import InvariantError, NoGapError, ValidationError
from .fourier import EVEN, ODD, PeriodicFunction, evaluate, zero

MAX_H = 1 / 32
BISECTION_TOL = 1e-11
EIGEN_RESIDUAL_TOL = 1e-8
BOUNDARY_TOL = 1e-6
DEFAULT_MARGIN = 0.02

# the bundled TBB is too old for numba and only produces a warning when probed
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


def required_half_width(wall: DomainWall, delta: float, decay_length: float) -> float:
    """L/delta + 12 |nu|/(|theta| delta): wall saturated plus twelve decay lengths."""
    return (wall.saturation_length() + DECAY_MARGIN * decay_length) / delta


def _check_h(h: float) -> int:
    if not 0 < h <= MAX_H * (1 + 1e-12):
        raise ValidationError(f"grid step h={h} must lie in (0, {MAX_H}]")
    p = int(round(1 / h))
    if abs(p * h - 1) > 1e-12:
        raise ValidationError(f"1/h must be an integer (got h={h})")
    return p


@dataclass
class RealSpaceOperator:
    delta: float
    X: float
    h: float
    x: np.ndarray
    potential_samples: np.ndarray
    wall: DomainWall | None = None

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def diag(self) -> np.ndarray:
        return 2 / self.h ** 2 + self.potential_samples

    @property
    def off(self) -> float:
        return -1 / self.h ** 2

    def matvec(self, u: np.ndarray) -> np.ndarray:
        out = self.diag * u
        out[1:] += self.off * u[:-1]
        out[:-1] += self.off * u[1:]
        return out

    def dense(self) -> np.ndarray:
        """Full matrix; only sensible for small test problems."""
        n = self.n
        return np.diag(self.diag) + np.diag(np.full(n - 1, self.off), 1) + np.diag(np.full(n - 1, self.off), -1)

    def norm(self, u) -> float:
        return float(np.sqrt(self.h) * np.linalg.norm(u))


def cut_phase(dp: DiracPoint, h: float) -> float:
    """Position mod 1 (on the h-grid) for the Dirichlet ends that binds no edge state.

    Near a hard wall at x_b the two Bloch modes must cancel,
    a_+ phi_+(x_b) + a_- phi_-(x_b) = 0.  In the saturated bulk on either side
    the decaying envelope solution fixes a_-/a_+, and an edge state exists iff
    sgn(nu) Im q > 0 with q = -theta phi_+(x_b)^2 / |theta phi_+(x_b)^2|.
    The cut is put where sgn(nu) Im q is most negative.
    """
    p = _check_h(h)
    t = h * np.arange(p)
    phi = dp.evaluate_plus(t)
    q = -dp.theta_star * phi ** 2
    score = np.sign(dp.nu_star) * q.imag / np.maximum(np.abs(q), 1e-300)
    return float(t[int(np.argmin(score))])


def assemble_dislocated(V: PeriodicFunction, W: PeriodicFunction, wall: DomainWall, delta: float,
                        X: float, h: float, dirac: DiracPoint | None = None) -> RealSpaceOperator:
    """Grid x_i = i h covering [-X, X] with Dirichlet ends.

    With ``dirac`` given, X is checked against the saturation-plus-decay rule
    and both ends are moved outward (by less than one period) to the cut
    phase that binds no spurious edge state in the gap.
    """
    if V.parity != EVEN or W.parity != ODD:
        raise ValidationError("need V even_harmonic and W odd_harmonic")
    if delta < 0:
        raise ValidationError("delta must be non-negative")
    p = _check_h(h)
    if delta > 0:
        sat = max(abs(wall(delta * X) - 1), abs(wall(-delta * X) + 1))
        if sat > SATURATION_TOL * (1 + 1e-4):
            raise ValidationError(f"kappa not saturated at +-delta X: deviation {sat:.3g}")
    if dirac is not None:
        if delta > 0:
            need = required_half_width(wall, delta, abs(dirac.nu_star) / abs(dirac.theta_star))
            if X < need * (1 - 1e-12):
                raise ValidationError(f"X={X} below the required half-width {need:.6g}")
        k = int(round(cut_phase(dirac, h) * p))
        # ghost nodes (Dirichlet zeros) at i = -left and i = right, both = k mod p
        right = k + p * int(np.ceil((X / h - k) / p - 1e-9))
        left = -(k + p * int(np.floor((-X / h - k) / p + 1e-9)))
    else:
        right = left = int(np.ceil(X / h - 1e-9))
    x = h * np.arange(-left + 1, right)
    pot = evaluate(V, x) + delta * wall(delta * x) * evaluate(W, x)
    return RealSpaceOperator(float(delta), float(X), float(h), x, np.ascontiguousarray(pot), wall)


# ---------------------------------------------------------------- Sturm counts

@numba.njit(parallel=True, cache=True)
def _count_below(diag, off2, shifts, out):
    n = diag.shape[0]
    for s in numba.prange(shifts.shape[0]):
        sigma = shifts[s]
        d = diag[0] - sigma
        cnt = 1 if d < 0 else 0
        ok = d != 0.0
        for i in range(1, n):
            if d == 0.0:
                ok = False
                break
            d = diag[i] - sigma - off2 / d
            if d < 0:
                cnt += 1
        if d == 0.0 or not np.isfinite(d):
            ok = False
        out[s] = cnt if ok else -1


def counts_below(op: RealSpaceOperator, shifts) -> np.ndarray:
    """Number of eigenvalues strictly below each shift (LDL^T inertia)."""
    shifts = np.array(np.atleast_1d(shifts), dtype=float)
    out = np.empty(len(shifts), dtype=np.int64)
    diag = np.ascontiguousarray(op.diag)
    jitter = 1e-10 * max(1.0, float(np.max(np.abs(shifts))))
    for _ in range(8):
        _count_below(diag, op.off ** 2, shifts, out)
        bad = out < 0
        if not bad.any():
            return out
        # pivot breakdown: the shift sits on an eigenvalue of a leading block
        shifts[bad] += jitter
        jitter *= 2
    raise InvariantError("Sturm count pivot breakdown persists after jitter")


def count_eigs(op: RealSpaceOperator, a: float, b: float) -> int:
    if not a < b:
        raise ValidationError("need a < b")
    ca, cb = counts_below(op, [a, b])
    return int(cb - ca)


def bisect_eigenvalues(op: RealSpaceOperator, a: float, b: float, tol: float = BISECTION_TOL) -> np.ndarray:
    """All eigenvalues in (a, b) to absolute accuracy ``tol``.

    Every pass bisects all unresolved intervals at once, so the matrix is
    swept once per pass however many eigenvalues are being chased.
    """
    ca, cb = counts_below(op, [a, b])
    intervals = [(a, b, int(ca), int(cb))] if cb > ca else []
    found = []
    while intervals:
        mids = np.array([0.5 * (lo + hi) for lo, hi, _, _ in intervals])
        cm = counts_below(op, mids)
        nxt = []
        for (lo, hi, clo, chi), m, c in zip(intervals, mids, cm):
            for piece in ((lo, m, clo, int(c)), (m, hi, int(c), chi)):
                plo, phi, pclo, pchi = piece
                if pchi == pclo:
                    continue
                if phi - plo <= tol:
                    # a cluster narrower than tol counts with its multiplicity
                    found.extend([0.5 * (plo + phi)] * (pchi - pclo))
                else:
                    nxt.append(piece)
        intervals = nxt
    return np.sort(np.array(found))


def inverse_iteration(op: RealSpaceOperator, E: float, rng: np.random.Generator,
                      iterations: int = 2) -> np.ndarray:
    """Eigenvector near E, L2(h)-normalized, from a random start."""
    n = op.n
    u = rng.standard_normal(n)
    sub = np.full(n - 1, op.off)
    for _ in range(iterations):
        _, _, _, u, info = lapack.dgtsv(sub, op.diag - E, sub, u)
        if info != 0:
            raise InvariantError(f"tridiagonal solve failed at E={E} (info={info})")
        u = u / np.linalg.norm(u)
    res = np.linalg.norm(op.matvec(u) - E * u)
    if res > EIGEN_RESIDUAL_TOL:
        raise InvariantError(f"inverse iteration stagnated at E={E}: residual {res:.3g}")
    k = int(np.argmax(np.abs(u)))
    u = u * np.sign(u[k])
    return u / np.sqrt(op.h)


# ---------------------------------------------------------------- discrete bulk

def _cell_matrix(V, W, delta, h, xi):
    p = _check_h(h)
    x = h * np.arange(p)
    pot = evaluate(V, x) + delta * evaluate(W, x)
    A = np.diag(2 / h ** 2 + pot).astype(complex)
    idx = np.arange(p - 1)
    A[idx, idx + 1] = A[idx + 1, idx] = -1 / h ** 2
    # Bloch closure u_{i+p} = e^{i xi} u_i
    A[p - 1, 0] += -np.exp(1j * xi) / h ** 2
    A[0, p - 1] += -np.exp(-1j * xi) / h ** 2
    return A


def discrete_bands(V, W, delta, h, xi, n_bands):
    return linalg.eigvalsh(_cell_matrix(V, W, delta, h, xi), subset_by_index=[0, n_bands - 1])


def discrete_dirac_energy(V: PeriodicFunction, h: float, j_star: int) -> float:
    """E_star of the finite-difference bulk (the pi-degeneracy survives: 1/h is even)."""
    if _check_h(h) % 2:
        raise ValidationError("1/h must be even so the half-period shift maps grid to grid")
    lam = discrete_bands(V, zero(), 0.0, h, np.pi, j_star + 1)
    if abs(lam[j_star] - lam[j_star - 1]) > 1e-8 * max(1.0, abs(lam[j_star])):
        raise InvariantError("discrete bands do not touch at pi")
    return float(0.5 * (lam[j_star - 1] + lam[j_star]))


def discrete_gap(V: PeriodicFunction, W: PeriodicFunction, delta: float, h: float, j_star: int,
                 xi_points: int = 257) -> SpectralGap:
    """Gap between bands j_star and j_star + 1 of the finite-difference bulk at this delta."""
    xs = np.linspace(0, 2 * np.pi, xi_points)
    lam = np.array([discrete_bands(V, W, delta, h, xi, j_star + 1) for xi in xs])
    lower = lam[:, j_star - 1]
    upper = lam[:, j_star]
    edges = []
    for curve, j, sign, k in ((lower, j_star, -1.0, int(np.argmax(lower))),
                              (upper, j_star + 1, 1.0, int(np.argmin(upper)))):
        lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]

        def f(xi, j=j, sign=sign):
            return sign * discrete_bands(V, W, delta, h, xi, j)[j - 1]

        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        edges.append(sign * min(res.fun, sign * curve[k]))
    lo_e, hi_e = edges
    if hi_e - lo_e <= 1e-9 * max(1.0, abs(lo_e)):
        raise NoGapError(f"discrete bulk has no gap above band {j_star} at delta={delta}")
    return SpectralGap(float(lo_e), float(hi_e), j_star)


# ---------------------------------------------------------------- gap states

@dataclass
class GapEigenpair:
    E: float
    vector: np.ndarray
    interval_index: int | None = None
    boundary_amplitude: float = 0.0


@dataclass
class GapSpectrum:
    gap: SpectralGap
    window: tuple[float, float]
    pairs: list[GapEigenpair] = field(default_factory=list)

    @property
    def energies(self) -> np.ndarray:
        return np.array([p.E for p in self.pairs])


def gap_eigs(op: RealSpaceOperator, gap: SpectralGap | None, margin: float = DEFAULT_MARGIN,
             seed: int = 0, vectors: bool = True) -> GapSpectrum | list:
    """Eigenpairs in [lower + margin width, upper - margin width].

    ``gap`` must come from the same discretization (``discrete_gap``); with no
    gap (delta = 0) the result is empty.
    """
    if gap is None or op.delta == 0:
        return []
    if not 0 <= margin < 0.5:
        raise ValidationError("margin must lie in [0, 0.5)")
    a = gap.lower_edge + margin * gap.width
    b = gap.upper_edge - margin * gap.width
    energies = bisect_eigenvalues(op, a, b)
    if len(energies) > 1 and np.min(np.diff(energies)) <= 10 * BISECTION_TOL:
        raise InvariantError("degenerate gap eigenvalues: the problem is not simple")
    rng = np.random.default_rng(seed)
    pairs = []
    for E in energies:
        if not vectors:
            pairs.append(GapEigenpair(float(E), np.empty(0)))
            continue
        u = inverse_iteration(op, E, rng)
        edge = float(max(abs(u[0]), abs(u[-1])))
        if edge > BOUNDARY_TOL:
            raise InvariantError(
                f"gap state at E={E:.12g} has boundary amplitude {edge:.3g} > {BOUNDARY_TOL}: "
                f"increase X beyond {op.X:.6g}"
            )
        pairs.append(GapEigenpair(float(E), u, None, edge))
    return GapSpectrum(gap, (a, b), pairs)


def richardson(E_h, E_h2, order: int = 2):
    """Combine estimates at h and h/2 that carry an h^order error."""
    f = 2 ** order
    return (f * np.asarray(E_h2) - np.asarray(E_h)) / (f - 1)


def richardson_ratio(E_h, E_h2, E_h4):
    return (np.asarray(E_h) - np.asarray(E_h2)) / (np.asarray(E_h2) - np.asarray(E_h4))


def assign_intervals(energies, E_star: float, thetas, delta: float):
    """Nearest-prediction assignment E -> j (j = -N..N).

    Returns (assignment list, conflict flag).  A conflict means two energies
    picked the same j, so the one-per-interval property fails.
    """
    thetas = np.asarray(thetas)
    N = (len(thetas) - 1) // 2
    preds = E_star + thetas * delta
    assignment = [int(np.argmin(np.abs(preds - E))) - N for E in energies]
    conflict = len(set(assignment)) != len(assignment)
    return assignment, conflict
