import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import linalg

from dislocation_lab.dislocated import (
    RealSpaceOperator, assemble_dislocated, assign_intervals, bisect_eigenvalues, count_eigs,
    counts_below, cut_phase, discrete_dirac_energy, discrete_gap, gap_eigs, inverse_iteration,
    required_half_width, richardson, richardson_ratio,
)
from dislocation_lab.effective import DomainWall
from dislocation_lab.errors import ValidationError
from dislocation_lab.fourier import cosine, sine, zero

WALL = DomainWall("tanh", 2 * np.pi)


def small_operator(pot, h=1 / 32):
    n = len(pot)
    return RealSpaceOperator(0.1, n * h / 2, h, h * np.arange(n), np.asarray(pot, dtype=float))


@given(st.lists(st.floats(-50, 50), min_size=3, max_size=40), st.floats(-100, 4200))
def test_sturm_count_matches_dense(pot, shift):
    op = small_operator(pot)
    lam = linalg.eigvalsh(op.dense())
    assert counts_below(op, [shift])[0] == np.sum(lam < shift) or np.min(np.abs(lam - shift)) < 1e-8


@given(st.lists(st.floats(-50, 50), min_size=3, max_size=40))
def test_bisection_matches_dense(pot):
    op = small_operator(pot)
    lam = linalg.eigvalsh(op.dense())
    a, b = lam[0] - 1.0, np.median(lam) + 0.123
    found = bisect_eigenvalues(op, a, b)
    expected = lam[(lam > a) & (lam < b)]
    assert len(found) == len(expected)
    assert np.allclose(found, expected, atol=1e-9)


def test_inverse_iteration_returns_normalized_eigenvector(rng):
    op = small_operator(np.sin(np.arange(30)) * 20)
    lam = linalg.eigvalsh(op.dense())
    u = inverse_iteration(op, lam[3], rng)
    assert op.norm(u) == pytest.approx(1.0)
    assert np.linalg.norm(op.matvec(u) - lam[3] * u) * np.sqrt(op.h) <= 1e-6


def test_discrete_dirac_energy_free_closed_form():
    # V = 0: E = (2 - 2 cos(pi h)) / h^2 for the pi mode
    for h in (1 / 32, 1 / 64, 1 / 128):
        assert discrete_dirac_energy(zero(), h, 1) == pytest.approx((2 - 2 * np.cos(np.pi * h)) / h ** 2, rel=1e-11)
    with pytest.raises(ValidationError):
        discrete_dirac_energy(zero(), 1 / 33, 1)


def test_discrete_gap_follows_width_law():
    g = discrete_gap(zero(), sine(2.0, 1), 0.02, 1 / 64, 1)
    assert g.width == pytest.approx(0.04, rel=1e-3)


def test_grid_step_rules():
    with pytest.raises(ValidationError):
        assemble_dislocated(zero(), sine(2.0, 1), WALL, 0.0, 10.0, 1 / 20.5)
    with pytest.raises(ValidationError):
        assemble_dislocated(zero(), sine(2.0, 1), WALL, 0.0, 10.0, 1 / 16)
    with pytest.raises(ValidationError, match="saturated"):
        assemble_dislocated(zero(), sine(2.0, 1), WALL, 0.04, 100.0, 1 / 64)


def test_cut_phase_and_half_width_rule(reference):
    V, W, dp = reference
    # V = 0: phi_+ = exp(i pi x), the binding-free cut sits at half a period
    assert cut_phase(dp, 1 / 64) == 0.5
    X = required_half_width(WALL, 0.04, 2 * np.pi)
    with pytest.raises(ValidationError, match="required half-width"):
        assemble_dislocated(V, W, WALL, 0.04, 0.9 * X, 1 / 64, dp)
    op = assemble_dislocated(V, W, WALL, 0.04, X, 1 / 64, dp)
    # ghost nodes sit at the cut phase on both ends, within one period of X
    for end in (op.x[0] - op.h, op.x[-1] + op.h):
        assert (end % 1.0) == pytest.approx(0.5)
        assert X <= abs(end) < X + 1


def test_reference_gap_state(reference):
    V, W, dp = reference
    X = required_half_width(WALL, 0.04, 2 * np.pi)
    op = assemble_dislocated(V, W, WALL, 0.04, X, 1 / 64, dp)
    gap = discrete_gap(V, W, 0.04, 1 / 64, 1)
    spec = gap_eigs(op, gap)
    assert len(spec.pairs) == 1
    Eh = discrete_dirac_energy(V, 1 / 64, 1)
    # frozen: the single (zero-branch) state sits within 2e-4 delta of the discrete E_star
    assert abs(spec.energies[0] - Eh) <= 2e-4 * 0.04
    assert spec.pairs[0].boundary_amplitude <= 1e-6
    assert gap_eigs(op, None) == []


def test_richardson_arithmetic():
    assert richardson(1.0 + 4e-4, 1.0 + 1e-4) == pytest.approx(1.0)
    assert richardson_ratio(1 + 16e-4, 1 + 4e-4, 1 + 1e-4) == pytest.approx(4.0)


def test_assignment_and_conflict():
    thetas = np.array([-0.5, 0.0, 0.5])
    a, c = assign_intervals([0.9, 1.0, 1.1], 1.0, thetas, 0.2)
    assert a == [-1, 0, 1] and not c
    a, c = assign_intervals([1.0, 1.01], 1.0, thetas, 0.2)
    assert c


def test_cosine_potential_discrete_energy_converges(cosine_model):
    V, _, dp = cosine_model
    e = [discrete_dirac_energy(V, h, dp.j_star) for h in (1 / 32, 1 / 64, 1 / 128)]
    assert 3.5 <= richardson_ratio(*e) <= 4.5
    assert abs(richardson(e[1], e[2]) - dp.E_star) <= 1e-5
