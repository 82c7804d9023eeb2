import numpy as np
import pytest
from scipy.linalg import expm

from rotor_bands.exceptions import NotUnitary, UnsupportedParams, GridMismatch
from rotor_bands.floquet import UnitaryMatrix, build_G, build_S, build_C, build_V, build_X, exp_hermitian, \
    unitarity_defect, verify_direct_integral
from rotor_bands.resonance import validate_resonance, primitive_resonance, unperturbed_eigenvalues


def test_anti_resonance_free_block():
    G = build_G(validate_resonance(2, 2, 0.0))
    assert np.allclose(G.entries, [[0, 1], [1, 0]], atol=1e-14)


def test_unperturbed_block_is_g():
    params = primitive_resonance(1, 5)
    G = build_G(params)
    assert build_S(params, 0.3, mu=0.0, G=G) is G


def test_blocks_are_unitary():
    params = primitive_resonance(2, 5, mu=1.3)
    for vartheta in np.linspace(0, 2 * np.pi / 5, 7):
        assert build_S(params, vartheta).defect < 1e-12
        assert build_X(params, 5 * vartheta).defect < 1e-12


def test_g_has_the_unperturbed_spectrum():
    params = primitive_resonance(1, 7)
    values = np.linalg.eigvals(build_G(params).entries)
    expected = unperturbed_eigenvalues(params).a
    assert np.allclose(np.sort_complex(values), np.sort_complex(expected), atol=1e-12)


def test_not_unitary():
    with pytest.raises(NotUnitary):
        UnitaryMatrix([[2, 0], [0, 1]])
    assert unitarity_defect(np.eye(3)) == 0


def test_hopping_matrix():
    params = primitive_resonance(1, 3)
    V = build_V(params, 0.7)
    assert np.allclose(V, V.conj().T)
    assert V[0, 2] == pytest.approx(0.5 * np.exp(0.7j))
    assert V[2, 0] == pytest.approx(0.5 * np.exp(-0.7j))
    assert V[0, 1] == pytest.approx(0.5)
    assert V[1, 1] == 0


def test_c_is_diagonal():
    params = primitive_resonance(1, 5)
    C = build_C(params).entries
    assert np.allclose(np.diag(C), unperturbed_eigenvalues(params).a)
    assert np.allclose(build_X(params, 1.0, mu=0.0).entries, C)


@pytest.mark.parametrize("params", [primitive_resonance(1, 2), validate_resonance(2, 4, 0.0)])
def test_hopping_form_unsupported(params):
    with pytest.raises(UnsupportedParams):
        build_C(params)


def test_exp_hermitian_matches_expm():
    params = primitive_resonance(1, 5)
    V = build_V(params, 1.1)
    assert np.allclose(exp_hermitian(V, 0.8), expm(-0.8j * V), atol=1e-12)


@pytest.mark.parametrize("params, size", [
    (validate_resonance(2, 2, 0.0, mu=1.0), 64),
    (primitive_resonance(1, 3, mu=1.0), 96),
    (primitive_resonance(1, 1, mu=0.3), 32),
])
def test_direct_integral(params, size):
    for seed in range(3):
        assert verify_direct_integral(params, size, seed=seed) < 1e-10


def test_direct_integral_grid_mismatch():
    with pytest.raises(GridMismatch):
        verify_direct_integral(primitive_resonance(1, 3, mu=1.0), 100)


def _same_spectrum(first, second, atol):
    left = np.linalg.eigvals(first)
    right = np.linalg.eigvals(second)
    distance = np.abs(left[:, None] - right[None, :])
    return distance.min(axis=1).max() < atol and distance.min(axis=0).max() < atol


def test_hopping_form_has_the_spectrum_of_s():
    rng = np.random.default_rng(7)
    for _ in range(20):
        q = int(rng.choice([3, 5, 7]))
        p = int(rng.choice([k for k in range(1, q) if np.gcd(k, q) == 1]))
        params = primitive_resonance(p, q, beta=0.5)
        vartheta = float(rng.uniform(0, 2 * np.pi / q))
        mu = float(rng.uniform(0.05, 2.0))
        assert _same_spectrum(build_X(params, q * vartheta, mu).entries, build_S(params, vartheta, mu).entries,
                              1e-10)


@pytest.mark.parametrize("theta", [0.0, 0.9, 2.5, -1.3])
def test_hopping_form_is_periodic(theta):
    params = primitive_resonance(2, 5, mu=0.8)
    assert np.allclose(build_X(params, theta + 2 * np.pi).entries, build_X(params, theta).entries, atol=1e-12)


@pytest.mark.parametrize("params", [primitive_resonance(1, 7), primitive_resonance(3, 8), validate_resonance(2, 2, 0.0),
                                    validate_resonance(4, 6, 0.25, nu=1)])
def test_free_block_has_unit_determinant(params):
    assert abs(np.linalg.det(build_G(params).entries)) == pytest.approx(1.0, abs=1e-12)
