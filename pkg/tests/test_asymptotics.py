import numpy as np
import pytest
from hypothesis import given, strategies as st

from dislocation_lab.asymptotics import (
    SweepConfig, build_quasimode, solve_delta, loglog_slope, physical_envelope, quasimode_gap_bound, run_sweep,
)
from dislocation_lab.dirac_point import SIGMA3, sigma_star
from dislocation_lab.effective import DomainWall, EffectiveDiracOperator, dirac_spectrum_grid
from dislocation_lab.errors import InvariantError, ValidationError


def random_symmetric(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 65))
    A = rng.standard_normal((n, n))
    T = (A + A.T) / 2
    v = rng.standard_normal(n)
    return rng, T, v / np.linalg.norm(v)


@given(st.integers(0, 2 ** 32 - 1))
def test_quasimode_bound_distance(seed):
    rng, T, v = random_symmetric(seed)
    lam, U = np.linalg.eigh(T)
    E = float(v @ T @ v) + float(rng.normal(scale=0.1))
    eps = float(np.linalg.norm(T @ v - E * v))
    check = quasimode_gap_bound(lam, E, eps)
    assert check.holds and check.margin >= -1e-12


@given(st.integers(0, 2 ** 32 - 1), st.floats(1e-4, 0.3))
def test_quasimode_bound_eigenvector(seed, noise):
    rng, T, _ = random_symmetric(seed)
    lam, U = np.linalg.eigh(T)
    k = int(rng.integers(len(lam)))
    v = U[:, k] + noise * rng.standard_normal(len(lam))
    v /= np.linalg.norm(v)
    E = float(v @ T @ v)
    eps = float(np.linalg.norm(T @ v - E * v))
    gaps = np.abs(np.delete(lam, k) - E)
    C = 0.99 * gaps.min() / eps if len(gaps) else 10.0
    check = quasimode_gap_bound(lam, E, eps, C=C, eigenvectors=U, v=v)
    assert check.holds
    if C > 1 and np.sum(np.abs(lam - E) <= C * eps) == 1:
        assert check.vector_holds


def test_gap_bound_raises_on_violation():
    with pytest.raises(InvariantError):
        quasimode_gap_bound([0.0, 1.0], 0.5, 0.1)
    assert not quasimode_gap_bound([0.0, 1.0], 0.5, 0.1, raise_on_failure=False).holds


@given(st.floats(-np.pi, np.pi), st.floats(0.1, 3))
def test_physical_envelope_intertwines_the_two_conventions(phase, mag):
    theta = mag * np.exp(1j * phase)
    w = np.exp(-1j * np.angle(theta))
    G = np.diag([np.conj(w), w])
    # G sigma_star G^-1 equals the transposed coupling, and G commutes with sigma_3
    assert np.allclose(G @ sigma_star(theta) @ np.linalg.inv(G), sigma_star(theta).T)
    assert np.allclose(G @ SIGMA3, SIGMA3 @ G)
    alpha = np.array([[1.0 + 0.5j, -0.25j]])
    assert np.allclose(physical_envelope(alpha, theta), alpha @ G.T)


def test_quasimode_needs_a_fine_envelope(reference):
    _, _, dp = reference
    x = np.arange(-100, 100) / 64
    y = np.linspace(-10, 10, 11)
    with pytest.raises(ValidationError, match="coarser"):
        build_quasimode(dp, np.ones((11, 2)), 0.0, 0.04, x, y)


def test_sweep_config_validation():
    wall = DomainWall("tanh", 1.0)
    with pytest.raises(ValidationError):
        SweepConfig([0.01, 0.02], None, None, wall)
    with pytest.raises(ValidationError):
        SweepConfig([0.02], None, None, wall, theta_sharp=1.5)


def test_loglog_slope():
    d = np.array([0.04, 0.02, 0.01])
    assert loglog_slope(d, 3 * d ** 1.5) == pytest.approx(1.5)


@pytest.mark.slow
def test_reference_sweep(reference):
    V, W, dp = reference
    cfg = SweepConfig([0.08, 0.04, 0.02], V, W, DomainWall("tanh", 2 * np.pi))
    rep = run_sweep(cfg, dp)
    eff = EffectiveDiracOperator.from_dirac_point(dp, cfg.wall)
    assert rep.expected_count() == 1
    vec = solve_delta(cfg, dp, dirac_spectrum_grid(eff), eff, 0.04, keep_vectors=True)
    assert len(vec.vectors) == 1 and vec.x is not None
    for r in rep.results:
        assert r.assignments == [0] and not r.conflict
        assert r.count_window == 1
        assert r.overlaps[0] >= 0.99
    fit = rep.fits[0]
    assert abs(fit["slope"]) <= 1e-3
    # leading-order quasimode residual scales linearly: frozen ratio delta / sqrt(3)
    res = np.array([r.quasimode_residuals[0] for r in rep.results])
    assert np.allclose(res / rep.deltas, 1 / np.sqrt(3), rtol=1e-2)
