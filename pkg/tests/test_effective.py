import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dislocation_lab.effective import (
    DomainWall, EffectiveDiracOperator, asymptotic_matrix, asymptotic_vectors, conjugate_by_symmetry,
    dirac_spectrum_evans, dirac_spectrum_grid, evans_function, evans_values, grid_tolerance,
    posch_teller_thetas, refine_eigenvector, spectral_apply, zero_mode, zero_mode_residual,
)
from dislocation_lab.errors import InvariantError, ValidationError

NU, THETA = 2 * np.pi, -1j


def op_of(width_natural, shape="tanh", nu=NU, theta=THETA):
    L = abs(nu) / abs(theta)
    return EffectiveDiracOperator(nu, theta, DomainWall(shape, width_natural * L))


def test_wall_shapes():
    w = DomainWall("smoothstep", 2.0)
    y = np.array([-3.0, -2.0, 0.0, 2.0, 3.0])
    assert np.allclose(w(y), [-1, -1, 0, 1, 1])
    assert np.allclose(w.derivative(y)[[0, 1, 3, 4]], 0)
    t = DomainWall("tanh", 1.5)
    L = t.saturation_length()
    assert abs(t(L) - 1) == pytest.approx(1e-10, rel=1e-4)
    yy = np.linspace(-3, 3, 2001)
    for wall in (w, t):
        assert np.allclose(np.gradient(wall(yy), yy)[5:-5], wall.derivative(yy)[5:-5], atol=1e-4)
    with pytest.raises(ValidationError):
        DomainWall("step", 1.0)


def test_closed_form_count():
    # a = 8 natural widths: 8 levels per sector side, 15 in total
    th = posch_teller_thetas(op_of(8.0))
    assert len(th) == 15
    assert th[7] == 0 and np.allclose(th, -th[::-1])
    assert th[-1] == pytest.approx(np.sqrt(1 - (1 / 8) ** 2))


def test_asymptotic_vectors_are_eigenvectors():
    op = op_of(1.0)
    for z in (0.3, -0.7 + 0.2j):
        lam, fp, gp, fm, gm = asymptotic_vectors(op, z)
        assert np.imag(lam) > 0  # exp(i lam y) decays as y -> +inf
        Ap, Am = asymptotic_matrix(op, z, +1), asymptotic_matrix(op, z, -1)
        assert np.allclose(Ap @ fp, lam * fp)
        assert np.allclose(gm @ Am, lam * gm)
        assert np.allclose(Am @ fm, lam * fm)
        assert np.dot(gp, fp) == pytest.approx(1.0)
        assert np.dot(gm, fm) == pytest.approx(1.0)


@pytest.mark.parametrize("width", [0.05, 1.0, 8.0])
def test_grid_oracle_matches_closed_form(width):
    op = op_of(width)
    spec = dirac_spectrum_grid(op)
    exact = posch_teller_thetas(op)
    assert len(spec.thetas) == len(exact)
    assert np.max(np.abs(spec.thetas - exact)) <= grid_tolerance(spec, op)


def test_evans_matches_closed_form_reference():
    op = op_of(1.0)
    spec = dirac_spectrum_evans(op)
    assert len(spec.thetas) == 1
    assert abs(spec.thetas[0]) <= 1e-10


def test_evans_conserves_the_pairing():
    op = op_of(3.0)
    res = evans_function(op, 0.4)
    assert res.residual <= 1e-10
    assert abs(res.D) > 1e-3
    # D vanishes at the closed-form eigenvalues
    exact = posch_teller_thetas(op)
    vals = evans_values(op, exact[exact > 0])
    assert np.all(np.abs(vals) <= 1e-8 * np.max(np.abs(evans_values(op, np.linspace(-0.9, 0.9, 7)))))


def test_evans_rejects_branch_cut_and_unsaturated_box():
    op = op_of(1.0)
    with pytest.raises(ValidationError):
        evans_function(op, 1.5)
    with pytest.raises(ValidationError):
        evans_function(op, 0.2, X=5.0)


def test_literal_twelve_decay_box_truncates_a_wide_wall():
    op = op_of(8.0)
    with pytest.raises(InvariantError):
        dirac_spectrum_grid(op, Y=12 * op.decay_length)
    with pytest.raises(ValidationError):
        dirac_spectrum_grid(op, Y=5 * op.decay_length)


def test_conjugation_maps_theta_to_minus_theta():
    op = op_of(3.0)
    spec = dirac_spectrum_grid(op)
    y, h = spec.y, spec.info["h"]
    for j in range(1, spec.N + 1):
        u = conjugate_by_symmetry(op, spec.eigenvector(j))
        assert abs(np.vdot(spec.eigenvector(-j), u)) * h == pytest.approx(1.0, abs=1e-6)
        r = np.sqrt(h) * np.linalg.norm(op.apply(u, y) + spec.thetas[j + spec.N] * u)
        assert r <= 10 * spec.info["h_dimless"] * op.gap


def test_zero_mode_closed_form():
    op = op_of(1.0)
    Y = op.default_grid_half_width()
    n = 2 ** 15
    y = -Y + (np.arange(n) + 0.5) * 2 * Y / n
    assert zero_mode_residual(op, y) <= 1e-8
    spec = dirac_spectrum_grid(op)
    a0 = zero_mode(op, spec.y)
    assert abs(np.vdot(a0, spec.eigenvector(0))) * spec.info["h"] >= 1 - 1e-9


def test_refined_vector_is_an_eigenvector_on_a_finer_grid():
    op = op_of(3.0)
    spec = dirac_spectrum_grid(op)
    Y = spec.info["Y"]
    y = np.linspace(-Y, Y, 2 ** 15)
    for j in (-2, 0, 1):
        v = refine_eigenvector(op, spec, j, y)
        r = np.linalg.norm(spectral_apply(op, v, y) - spec.thetas[j + spec.N] * v) / np.linalg.norm(v)
        assert r <= 1e-4


@settings(max_examples=12)
@given(st.floats(-np.pi, np.pi), st.sampled_from([1.0, -1.0]), st.floats(0.5, 2.0))
def test_spectrum_depends_only_on_magnitudes(phase, nu_sign, scale):
    op = EffectiveDiracOperator(nu_sign * scale * NU, scale * np.exp(1j * phase), DomainWall("tanh", 3 * NU))
    spec = dirac_spectrum_grid(op, n=2 ** 12)
    exact = posch_teller_thetas(op)
    assert len(spec.thetas) == len(exact)
    assert np.max(np.abs(spec.thetas - exact)) <= grid_tolerance(spec, op)
    assert np.allclose(spec.thetas, -spec.thetas[::-1], atol=grid_tolerance(spec, op))


@pytest.mark.parametrize("width", [0.05, 1.0, 8.0])
def test_evans_function_vanishes_at_zero(width):
    op = op_of(width)
    scan = np.abs(evans_values(op, np.linspace(-0.999, 0.999, 401)))
    assert abs(evans_values(op, [0.0])[0]) <= 1e-8 * scan.max()
