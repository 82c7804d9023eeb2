import numpy as np
import pytest

from rotor_bands import bands
from rotor_bands.bands import eigenphases, sweep_bands, track_bands, bloch_grid, band_widths, flatness_test, \
    gd_determinant, spectral_projector
from rotor_bands.exceptions import InvalidInput, NotUnitary, TrackingAmbiguity
from rotor_bands.floquet import UnitaryMatrix, build_S
from rotor_bands.resonance import validate_resonance, primitive_resonance, unperturbed_eigenvalues


def test_eigenphases_sorted_and_accurate():
    params = primitive_resonance(2, 7, mu=0.8)
    solution = eigenphases(build_S(params, 0.2))
    assert np.all(np.diff(solution.phases) >= 0)
    assert np.max(solution.residuals) < 1e-12
    assert np.allclose(np.abs(solution.eigenvalues), 1)


def test_eigenphases_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        eigenphases(np.diag([1.0, 1.5]))


def test_degenerate_eigenvectors_orthonormal():
    solution = eigenphases(UnitaryMatrix(np.eye(4)))
    vectors = solution.eigenvectors
    assert np.allclose(vectors.conj().T @ vectors, np.eye(4))


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_anti_resonance_bands_are_flat(mu):
    structure = sweep_bands(validate_resonance(2, 2, 0.0), 64, mu=mu)
    assert structure.size == 2
    assert max(band_widths(structure)) < 1e-12
    assert all(flatness_test(structure))


@pytest.mark.parametrize("p, mu", [(1, 0.25), (2, 1.0)])
def test_order_one_band(p, mu):
    structure = sweep_bands(primitive_resonance(p, 1), 64, mu=mu)
    assert structure.widths[0] == pytest.approx(2 * mu, abs=1e-10)
    shape = structure.band(1) + mu * np.cos(structure.grid)
    assert np.max(np.abs(shape - shape[0])) < 1e-10


@pytest.mark.parametrize("p, q", [(1, 2), (1, 3), (2, 3), (1, 4), (3, 5)])
def test_no_flat_bands(p, q):
    structure = sweep_bands(primitive_resonance(p, q), 64, mu=1.0)
    assert min(structure.widths) > 1e-9
    assert not any(flatness_test(structure))


def test_bands_continue_unperturbed_eigenvalues():
    params = primitive_resonance(1, 5)
    structure = sweep_bands(params, 32, mu=0.01)
    a = unperturbed_eigenvalues(params).a
    for j in range(1, 6):
        offset = np.angle(np.exp(1j * structure.band(j)) / a[j - 1])
        assert np.max(np.abs(offset)) < 0.05


def test_global_phase_does_not_change_widths():
    params = primitive_resonance(1, 3, mu=0.7)
    grid = bloch_grid(3, 48)
    matrices = [build_S(params, vartheta) for vartheta in grid]
    plain = track_bands(grid, matrices)
    shifted = track_bands(grid, [m.scaled(np.exp(0.9j)) for m in matrices])
    assert np.allclose(sorted(plain.widths), sorted(shifted.widths), atol=1e-10)


def test_phase_tracking_method():
    structure = sweep_bands(validate_resonance(2, 2, 0.0), 32, mu=1.0, method='phase')
    assert max(structure.widths) < 1e-12
    with pytest.raises(InvalidInput):
        sweep_bands(validate_resonance(2, 2, 0.0), 32, mu=1.0, method='nearest')


def test_sweep_bands_small_grid():
    with pytest.raises(InvalidInput):
        sweep_bands(primitive_resonance(1, 3), 4, mu=1.0)


def test_flatness_threshold_must_be_positive():
    structure = sweep_bands(validate_resonance(2, 2, 0.0), 16, mu=1.0)
    with pytest.raises(InvalidInput):
        flatness_test(structure, 0)


def test_gd_determinant():
    assert gd_determinant(validate_resonance(2, 2, 0.0)) < 1e-13
    for p, q in [(1, 3), (2, 5), (1, 8), (5, 12)]:
        assert gd_determinant(primitive_resonance(p, q)) > 1e-10


def test_spectral_projector_for_a_pair():
    params = primitive_resonance(1, 3)
    projector = spectral_projector(params, 0.4, 0.01, 1)
    assert np.allclose(projector @ projector, projector, atol=1e-12)
    assert np.trace(projector).real == pytest.approx(2)
    middle = spectral_projector(params, 0.4, 0.01, 2)
    assert np.trace(middle).real == pytest.approx(1)


@pytest.mark.parametrize("p, q, mu", [(1, 2, 0.3), (1, 2, 0.6), (1, 2, 1.0)])
def test_overlap_and_phase_tracking_agree(p, q, mu):
    params = primitive_resonance(p, q)
    by_overlap = sweep_bands(params, 64, mu=mu)
    by_phase = sweep_bands(params, 64, mu=mu, method='phase')
    assert np.allclose(by_overlap.phases, by_phase.phases, atol=1e-10)


def test_ambiguity_doubles_the_grid(monkeypatch):
    sweep_once = bands._sweep_once
    sizes = []

    def ambiguous_below_32(params, size, method, workers):
        sizes.append(size)
        if size < 32:
            raise TrackingAmbiguity("crowded", grid_index=3, theta=0.1)
        return sweep_once(params, size, method, workers)

    monkeypatch.setattr(bands, "_sweep_once", ambiguous_below_32)
    structure = sweep_bands(primitive_resonance(1, 3), 8, mu=0.5)
    assert sizes == [8, 16, 32]
    assert len(structure.grid) == 32
    with pytest.raises(TrackingAmbiguity):
        sweep_bands(primitive_resonance(1, 3), 8, mu=0.5, max_grid=16)


def test_narrow_band_stays_above_the_residual_floor():
    structure = sweep_bands(primitive_resonance(11, 12), 64, mu=0.5)
    assert structure.residual < 1e-13
    assert min(structure.widths) > 100 * structure.residual


def test_extended_precision_determinant():
    for p, q in [(1, 3), (2, 5), (5, 12)]:
        params = primitive_resonance(p, q)
        assert gd_determinant(params, dps=40) == pytest.approx(gd_determinant(params), rel=1e-8)
    assert gd_determinant(primitive_resonance(1, 50), dps=120) == pytest.approx(9.4355e-59, rel=1e-3)
    assert gd_determinant(validate_resonance(2, 2, 0.0), dps=120) < 1e-110
