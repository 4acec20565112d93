import numpy as np
import pytest
from hypothesis import given, strategies as st

from dislocation_lab.bloch import band_structure
from dislocation_lab.dirac_point import (
    SIGMA3, compute_invariants, dirac_eigenbasis, dirac_point, fermi_velocity_check,
    find_dirac_points, pauli_identity_residuals, pauli_matrices,
)
from dislocation_lab.errors import HypothesisError, ValidationError
from dislocation_lab.fourier import EVEN, cosine, make_potential, sine, zero


def test_reference_invariants(reference):
    _, _, dp = reference
    assert dp.E_star == pytest.approx(np.pi ** 2, abs=1e-12)
    assert dp.nu_star == pytest.approx(2 * np.pi, abs=1e-12)
    assert abs(dp.theta_star - (-1j)) <= 1e-12
    assert dp.j_star == 1


def test_cosine_model_frozen(cosine_model):
    # frozen from the K = 16 plane-wave solve; nu is confirmed by band slopes below
    _, _, dp = cosine_model
    assert dp.E_star == pytest.approx(9.852720184786653, abs=1e-9)
    assert dp.nu_star == pytest.approx(6.279603856119187, abs=1e-9)
    assert abs(dp.theta_star - (-1.0252500275465777j)) <= 1e-9


def test_second_dirac_point_has_negative_velocity():
    V, W = cosine(2.0, 2), sine(2.0, 1)
    dp = dirac_point(V, W, index=2)
    assert dp.j_star == 3
    assert dp.nu_star == pytest.approx(-18.84568774908283, abs=1e-8)
    assert abs(dp.theta_star - 0.025321245027240043j) <= 1e-9


@pytest.mark.parametrize("model", ["reference", "cosine_model"])
def test_velocity_matches_band_slopes(model, request):
    V, W, dp = request.getfixturevalue(model)
    hx = 1e-4
    bands = band_structure(V, W, 0.0, np.pi + np.array([-hx, 0.0, hx]), n_bands=3)
    assert fermi_velocity_check(bands, dp, 1.001 * hx) <= 1e-3


@pytest.mark.parametrize("model", ["reference", "cosine_model"])
def test_pauli_identities(model, request):
    V, W, dp = request.getfixturevalue(model)
    rD, rW = pauli_identity_residuals(dp, W)
    assert rD <= 1e-10 and rW <= 1e-10
    MD, _ = pauli_matrices(dp, W)
    assert np.allclose(2 * MD, dp.nu_star * SIGMA3, atol=1e-10)


def test_eigenbasis_is_orthonormal_and_swapped(reference):
    _, _, dp = reference
    assert np.vdot(dp.phi_plus, dp.phi_plus) == pytest.approx(1.0)
    assert abs(np.vdot(dp.phi_plus, dp.phi_minus)) <= 1e-14
    x = np.linspace(0, 1, 9)
    # phi_- = conj(phi_+) pointwise (for even V the pair is exchanged by conjugation)
    assert np.allclose(dp.evaluate_minus(x), np.conj(dp.evaluate_plus(x)))
    # phi_+ picks up exp(i pi) under x -> x + 1
    assert np.allclose(dp.evaluate_plus(x + 1), -dp.evaluate_plus(x))


def test_vanishing_theta_is_a_hypothesis_failure():
    with pytest.raises(HypothesisError, match="theta_star"):
        dirac_point(zero(), sine(2.0, 3))


def test_odd_V_rejected():
    with pytest.raises(ValidationError):
        find_dirac_points(sine(1.0, 1))


@given(st.floats(-3, 3), st.floats(0.2, 3))
def test_invariants_survive_random_even_potentials(a, w):
    V = make_potential({2: a / 2, 4: 0.3 * a}, EVEN)
    W = sine(w, 1)
    pts = find_dirac_points(V)
    assert pts
    dp = compute_invariants(dirac_eigenbasis(V, pts[0][0]), W)
    rD, rW = pauli_identity_residuals(dp, W)
    assert rD <= 1e-10 and rW <= 1e-10
    # theta scales linearly with W
    dp2 = compute_invariants(dirac_eigenbasis(V, pts[0][0]), W.scale(2.0))
    assert abs(dp2.theta_star - 2 * dp.theta_star) <= 1e-10 * (1 + abs(dp.theta_star))
