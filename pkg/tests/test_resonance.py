import math
from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest

from rotor_bands.exceptions import InvalidInput, NotAResonance
from rotor_bands.resonance import validate_resonance, admissible_nu, primitive_resonance, quadratic_phase, \
    unperturbed_eigenvalues


def test_anti_resonance_reduces_to_order_one():
    params = validate_resonance(2, 2, 0.0)
    assert (params.p, params.q, params.Q) == (1, 1, 2)
    assert not params.primitive
    assert params.tau == pytest.approx(2 * math.pi)


def test_primitive_order_three():
    params = validate_resonance(1, 3, 0.5)
    assert (params.p, params.q) == (1, 3)
    assert params.primitive
    assert params.half_momentum


def test_beta_is_normalized():
    assert validate_resonance(1, 3, 1.5).beta == pytest.approx(0.5)
    assert validate_resonance(1, 3, -0.5).beta == pytest.approx(0.5)


def test_not_a_resonance():
    with pytest.raises(NotAResonance):
        validate_resonance(1, 3, 0.3)


@pytest.mark.parametrize("P, Q", [(0, 3), (1, 0), (-1, 2)])
def test_non_positive_parameters(P, Q):
    with pytest.raises(InvalidInput):
        validate_resonance(P, Q, 0.5)


def test_negative_mu():
    with pytest.raises(InvalidInput):
        validate_resonance(1, 3, 0.5, mu=-1.0)
    with pytest.raises(InvalidInput):
        validate_resonance(1, 3, 0.5).with_mu(-0.1)


def test_admissible_nu():
    assert admissible_nu(2, 2, 0.0) == [0]
    assert admissible_nu(2, 1, 0.0) == [1]
    assert admissible_nu(2, 3, 0.5) == [0]


def test_primitive_resonance_derives_beta():
    assert primitive_resonance(1, 3).beta == pytest.approx(0.5)
    assert primitive_resonance(1, 2).beta == pytest.approx(0.0)
    with pytest.raises(InvalidInput):
        primitive_resonance(2, 4)


def test_quadratic_phase_order_three():
    exponents = quadratic_phase(1, 3, 0.5, [1, 2, 3])
    assert exponents == pytest.approx([1 / 12, 3 / 4, 1 / 12])


def test_quadratic_phase_exact_for_large_powers():
    # a_n ** N has period 8q in N at beta = 1/2
    huge = 10 ** 15
    assert quadratic_phase(1, 7, 0.5, 3, huge) == pytest.approx(quadratic_phase(1, 7, 0.5, 3, huge % 56))


def test_unperturbed_spectrum_order_three():
    spectrum = unperturbed_eigenvalues(primitive_resonance(1, 3))
    expected = np.exp(-1j * np.pi * np.array([1 / 12, 3 / 4, 1 / 12]))
    assert np.allclose(spectrum.a, expected)
    assert spectrum.pairing == ((1, 3), (2,))
    assert spectrum.class_of(3) == (1, 3)
    assert spectrum.value(4) == pytest.approx(spectrum.a[0])


def test_pairing_is_mirror_symmetric():
    spectrum = unperturbed_eigenvalues(primitive_resonance(2, 7))
    pairs = [cls for cls in spectrum.pairing if len(cls) == 2]
    assert sorted(pairs) == [(1, 7), (2, 6), (3, 5)]


def _exact_classes(P, Q, nu):
    g = math.gcd(P, Q)
    p, q = P // g, Q // g
    beta = (Fraction(nu, P) + Fraction(Q, 2)) % 1
    groups = defaultdict(list)
    for r in range(1, Q + 1):
        groups[(p * (r + beta - 1) ** 2 / q) % 2].append(r)
    return sorted(tuple(members) for members in groups.values())


@pytest.mark.parametrize("P, Q, nu", [(67, 101, 1), (97, 199, 3), (33, 35, 1), (4, 6, 1)])
def test_degeneracy_classes_for_large_beta_denominators(P, Q, nu):
    params = validate_resonance(P, Q, (nu / P + Q / 2) % 1, nu)
    assert params.beta_fraction == (Fraction(nu, P) + Fraction(Q, 2)) % 1
    assert sorted(unperturbed_eigenvalues(params).pairing) == _exact_classes(P, Q, nu)


def test_quadratic_phase_accepts_fractions():
    assert quadratic_phase(1, 3, Fraction(1, 2), [1, 2, 3]) == pytest.approx([1 / 12, 3 / 4, 1 / 12])


@pytest.mark.parametrize("P, Q, beta, nu", [
    (1, 3, 0.5, 0), (2, 2, 0.0, 0), (67, 101, 1 / 67 + 0.5, 1), (4, 6, 0.25, 1),
])
def test_validate_resonance_is_idempotent(P, Q, beta, nu):
    params = validate_resonance(P, Q, beta, nu, mu=0.3)
    assert validate_resonance(params.P, params.Q, params.beta, params.nu, params.mu) == params


@pytest.mark.parametrize("q", [3, 5, 7, 11, 13])
def test_middle_band_is_the_only_singleton(q):
    pairing = unperturbed_eigenvalues(primitive_resonance(1, q, beta=0.5)).pairing
    assert [cls for cls in pairing if len(cls) == 1] == [((q + 1) // 2,)]
    assert sorted(cls for cls in pairing if len(cls) == 2) == [(j, q - j + 1) for j in range(1, (q + 1) // 2)]
