"""Confronting gap eigenvalues of the dislocated operator with the Dirac predictions.

Predicted gap eigenvalues are E_star + theta_j delta; the matching
eigenfunctions are, to leading order, the two-scale quasimodes
v_0(x) = alpha_+(delta x) phi_+(x) + alpha_-(delta x) phi_-(x).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dirac_point import DiracPoint
from .dislocated import (
    DEFAULT_MARGIN, RealSpaceOperator, assemble_dislocated, assign_intervals, discrete_dirac_energy,
    discrete_gap, gap_eigs, required_half_width, richardson,
)
from .effective import (
    DiracSpectrum, DomainWall, EffectiveDiracOperator, dirac_spectrum_grid, refine_eigenvector,
)
from .errors import InvariantError, ValidationError
from .fourier import PeriodicFunction

GAP_QUANTA = 20


@dataclass
class Quasimode:
    samples: np.ndarray  # complex, on the dislocated grid
    E: float
    j: int
    h: float

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.h) * np.linalg.norm(self.samples))


def physical_envelope(alpha: np.ndarray, theta_star: complex) -> np.ndarray:
    """Map an eigenvector of nu s3 D + sigma_star kappa to the envelope multiplying (phi_+, phi_-).

    Projecting the dislocated operator onto phi_+- gives the coupling
    <phi_s, W phi_t> with phi_+ row / phi_- column equal to theta, i.e. the
    transpose of sigma_star.  The two Dirac operators are conjugate by the
    constant gauge diag(conj(w), w), w = exp(-i arg theta), which maps
    eigenvectors to eigenvectors with the same eigenvalue.
    """
    w = np.exp(-1j * np.angle(theta_star))
    return alpha * np.array([np.conj(w), w])


def build_quasimode(dp: DiracPoint, alpha: np.ndarray, theta_j: float, delta: float,
                    x: np.ndarray, y_alpha: np.ndarray, j: int = 0,
                    E_star: float | None = None) -> Quasimode:
    """Sample v_0 on the grid x, with alpha given on the uniform grid y_alpha.

    alpha is linearly interpolated in y and must be sampled at least as
    finely as delta h.  ``E_star`` overrides dp.E_star for the target energy
    (use the discrete value when the residual is taken with a discretized
    operator).
    """
    h = x[1] - x[0]
    dy = y_alpha[1] - y_alpha[0]
    if dy > delta * h * (1 + 1e-9):
        raise ValidationError(f"alpha grid step {dy:.3g} coarser than delta h = {delta * h:.3g}")
    a = physical_envelope(alpha, dp.theta_star)
    y = delta * x
    ap = np.interp(y, y_alpha, a[:, 0].real, 0, 0) + 1j * np.interp(y, y_alpha, a[:, 0].imag, 0, 0)
    am = np.interp(y, y_alpha, a[:, 1].real, 0, 0) + 1j * np.interp(y, y_alpha, a[:, 1].imag, 0, 0)
    phi = dp.evaluate_plus(x)
    v = ap * phi + am * np.conj(phi)
    nrm = np.sqrt(h) * np.linalg.norm(v)
    if nrm == 0:
        raise ValidationError("quasimode vanishes on the grid")
    E0 = dp.E_star if E_star is None else E_star
    return Quasimode(v / nrm, float(E0 + theta_j * delta), int(j), float(h))


def quasimode_residual(op: RealSpaceOperator, q: Quasimode) -> float:
    """Discrete L2 norm of (P_delta - E) v_0."""
    r = op.matvec(q.samples.real) + 1j * op.matvec(q.samples.imag) - q.E * q.samples
    return float(np.sqrt(op.h) * np.linalg.norm(r))


def overlap(q: Quasimode, u: np.ndarray) -> float:
    return float(abs(np.vdot(q.samples, u)) * q.h)


@dataclass
class GapBoundCheck:
    distance: float
    eps: float
    holds: bool
    vector_bound: float | None = None
    vector_distance: float | None = None
    vector_holds: bool | None = None

    @property
    def margin(self) -> float:
        return self.eps - self.distance


def quasimode_gap_bound(eigenvalues, E: float, eps: float, C: float | None = None,
                        eigenvectors: np.ndarray | None = None, v: np.ndarray | None = None,
                        raise_on_failure: bool = True) -> GapBoundCheck:
    """Check dist(E, spectrum) <= eps and, optionally, the eigenvector bound.

    The second part applies when C > 1 (with C eps inside the gap) and exactly
    one eigenvalue lies in [E - C eps, E + C eps]; then the unit quasimode v
    lies within 1/C of the line spanned by that eigenvector.
    ``eigenvectors`` holds orthonormal columns matching ``eigenvalues``.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    dist = float(np.min(np.abs(lam - E)))
    slack = 1e-12 * max(1.0, abs(E))
    check = GapBoundCheck(dist, float(eps), dist <= eps + slack)
    if C is not None and eigenvectors is not None and v is not None:
        inside = np.flatnonzero(np.abs(lam - E) <= C * eps)
        if C > 1 and len(inside) == 1:
            u = eigenvectors[:, inside[0]]
            d = float(np.linalg.norm(v - np.vdot(u, v) * u))
            check.vector_bound = 1 / C
            check.vector_distance = d
            check.vector_holds = d <= 1 / C + 1e-12
    if raise_on_failure and (not check.holds or check.vector_holds is False):
        raise InvariantError(
            f"quasimode bound violated: dist={dist:.3g} eps={eps:.3g} "
            f"vector={check.vector_distance} bound={check.vector_bound}"
        )
    return check


# ---------------------------------------------------------------- sweeps

@dataclass
class SweepConfig:
    deltas: list[float]
    V: PeriodicFunction
    W: PeriodicFunction
    wall: DomainWall
    h: float = 1 / 64
    richardson: bool = True
    theta_sharp: float = 0.95
    margin: float = DEFAULT_MARGIN
    quasimodes: bool = True
    grid_n: int = 2 ** 13
    Y: float | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        if len(d) == 0 or np.any(d <= 0) or np.any(np.diff(d) >= 0):
            raise ValidationError("deltas must be positive and strictly decreasing")
        if not 0 < self.theta_sharp < 1:
            raise ValidationError("theta_sharp must lie in (0, 1)")


@dataclass
class DeltaResult:
    delta: float
    gap: tuple[float, float]
    window: tuple[float, float]
    E_star_h: float
    energies: np.ndarray           # continuum estimates (Richardson or shift-corrected)
    energies_raw: np.ndarray       # finite-difference eigenvalues at h
    assignments: list[int]
    conflict: bool
    predicted: np.ndarray
    residuals: np.ndarray
    count_window: int
    overlaps: dict[int, float] = field(default_factory=dict)
    quasimode_residuals: dict[int, float] = field(default_factory=dict)
    x: np.ndarray | None = field(default=None, repr=False)
    vectors: list[np.ndarray] | None = field(default=None, repr=False)


@dataclass
class SweepReport:
    E_star: float
    theta_star: complex
    nu_star: float
    thetas: np.ndarray
    theta_sharp: float
    results: list[DeltaResult]
    fits: dict[int, dict] = field(default_factory=dict)

    @property
    def deltas(self) -> np.ndarray:
        return np.array([r.delta for r in self.results])

    def expected_count(self) -> int:
        return int(np.sum(np.abs(self.thetas) < self.theta_sharp * abs(self.theta_star)))

    def branch(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """(deltas, energies) for branch j over the sweep (missing entries skipped)."""
        ds, Es = [], []
        for r in self.results:
            if j in r.assignments:
                ds.append(r.delta)
                Es.append(r.energies[r.assignments.index(j)])
        return np.array(ds), np.array(Es)


def fit_slopes(report: SweepReport, min_points: int = 3) -> dict[int, dict]:
    """Least squares E - E_star = s delta + c delta^2 per branch."""
    fits = {}
    N = (len(report.thetas) - 1) // 2
    for j in range(-N, N + 1):
        ds, Es = report.branch(j)
        entry = {"theta": float(report.thetas[j + N]), "n": len(ds)}
        if any(r.conflict for r in report.results):
            entry["skipped"] = "assignment conflict"
        elif len(ds) < min_points:
            entry["skipped"] = f"only {len(ds)} deltas"
        else:
            A = np.column_stack([ds, ds ** 2])
            (s, c), *_ = np.linalg.lstsq(A, Es - report.E_star, rcond=None)
            entry.update(slope=float(s), curvature=float(c), slope_err=float(abs(s - entry["theta"])))
        fits[j] = entry
    return fits


def solve_delta(cfg: SweepConfig, dp: DiracPoint, spec: DiracSpectrum, eff: EffectiveDiracOperator,
                delta: float, X: float | None = None, keep_vectors: bool = False) -> DeltaResult:
    """Gap spectrum of the dislocated operator at one delta, matched to the Dirac predictions.

    Energies are reported as continuum estimates: Richardson-extrapolated
    offsets from the discrete Dirac energy (or the h-level offsets when
    Richardson is off), added to the plane-wave E_star.
    """
    if X is None:
        X = required_half_width(cfg.wall, delta, eff.decay_length)
    op = assemble_dislocated(cfg.V, cfg.W, cfg.wall, delta, X, cfg.h, dp)
    gap = discrete_gap(cfg.V, cfg.W, delta, cfg.h, dp.j_star)
    if gap.width < GAP_QUANTA * cfg.h ** 2:
        raise ValidationError(f"gap width at delta={delta} is below {GAP_QUANTA} h^2")
    Eh = discrete_dirac_energy(cfg.V, cfg.h, dp.j_star)
    found = gap_eigs(op, gap, cfg.margin, seed=cfg.seed)
    raw = found.energies
    if cfg.richardson:
        op2 = assemble_dislocated(cfg.V, cfg.W, cfg.wall, delta, X, cfg.h / 2, dp)
        gap2 = discrete_gap(cfg.V, cfg.W, delta, cfg.h / 2, dp.j_star)
        fine = gap_eigs(op2, gap2, cfg.margin, vectors=False).energies
        Eh2 = discrete_dirac_energy(cfg.V, cfg.h / 2, dp.j_star)
        if len(fine) != len(raw):
            raise InvariantError(f"gap counts differ between h and h/2 at delta={delta}")
        # pair by offset from the discrete Dirac energy; both lists are sorted
        energies = richardson(raw - Eh, fine - Eh2) + dp.E_star
    else:
        energies = raw - Eh + dp.E_star
    assignment, conflict = assign_intervals(energies, dp.E_star, spec.thetas, delta)
    for pair, j in zip(found.pairs, assignment):
        pair.interval_index = j
    N = spec.N
    predicted = dp.E_star + spec.thetas[np.array(assignment, dtype=int) + N] * delta if len(raw) else np.empty(0)
    half = cfg.theta_sharp * abs(dp.theta_star) * delta
    window = (Eh - half, Eh + half)
    count = int(np.sum((raw > window[0]) & (raw < window[1])))
    res = DeltaResult(delta, (gap.lower_edge, gap.upper_edge), window, Eh, energies, raw,
                      assignment, conflict, predicted, energies - predicted, count)
    if cfg.quasimodes and not conflict:
        y = delta * op.x
        for pair, j in zip(found.pairs, assignment):
            alpha = refine_eigenvector(eff, spec, j, y, seed=cfg.seed)
            q = build_quasimode(dp, alpha, spec.thetas[j + N], delta, op.x, y, j, E_star=Eh)
            res.overlaps[j] = overlap(q, pair.vector)
            res.quasimode_residuals[j] = quasimode_residual(op, q)
    if keep_vectors:
        res.x = op.x
        res.vectors = [p.vector for p in found.pairs]
    return res


def run_sweep(cfg: SweepConfig, dp: DiracPoint) -> SweepReport:
    eff = EffectiveDiracOperator.from_dirac_point(dp, cfg.wall)
    spec = dirac_spectrum_grid(eff, cfg.Y, n=cfg.grid_n)
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            results = list(pool.map(lambda d: solve_delta(cfg, dp, spec, eff, d), cfg.deltas))
    else:
        results = [solve_delta(cfg, dp, spec, eff, d) for d in cfg.deltas]
    report = SweepReport(dp.E_star, dp.theta_star, dp.nu_star, spec.thetas, cfg.theta_sharp, results)
    report.fits = fit_slopes(report)
    return report


def loglog_slope(deltas, values) -> float:
    """Least-squares slope of log(values) against log(deltas)."""
    s, _ = np.polyfit(np.log(np.asarray(deltas)), np.log(np.asarray(values)), 1)
    return float(s)
