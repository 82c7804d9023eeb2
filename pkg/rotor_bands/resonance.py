# coding=utf-8

"""
Resonance parameters and the unperturbed spectrum of the Floquet block.

A resonance is given by a kick period ``tau = 2*pi*P/Q`` together with a
quasi-momentum ``beta`` such that the one-period propagator commutes with
the momentum translation by ``Q``. The unperturbed (``mu = 0``) block has
the Gauss-phase eigenvalues ``a_r = exp(-i*pi*p*(r + beta - 1)**2 / q)``.
"""

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Tuple, Union, Sequence

import numpy as np

from .exceptions import InvalidInput, NotAResonance

logger = logging.getLogger(__name__)

RESONANCE_TOLERANCE = 1e-12
DEGENERACY_TOLERANCE = 1e-12
MAX_BETA_DENOMINATOR = 64

# Above this modulus the exact phase reduction switches to Python integers.
_INT64_SAFE_MODULUS = 2 ** 31


@dataclass(frozen=True)
class ResonanceParams:
    """
    A resonant parameter point ``(P, Q, p, q, nu, beta, mu)``.

    ``P/Q = p/q`` in lowest terms, ``q`` is the order of the resonance and
    ``Q`` its length. ``beta`` is normalized to ``[0, 1)``.
    """
    P: int
    Q: int
    p: int
    q: int
    nu: int
    beta: float
    mu: float = 0.0

    @property
    def tau(self) -> float:
        return 2 * math.pi * self.P / self.Q

    @property
    def primitive(self) -> bool:
        return self.Q == self.q

    @property
    def half_momentum(self) -> bool:
        """Whether ``beta`` is 1/2, the case the perturbative analysis covers."""
        return abs(self.beta - 0.5) < RESONANCE_TOLERANCE

    @property
    def beta_fraction(self) -> Fraction:
        """``beta`` exactly, as ``(2*nu + P*Q) / (2*P)`` modulo 1."""
        return Fraction(2 * self.nu + self.P * self.Q, 2 * self.P) % 1

    def with_mu(self, mu: float) -> 'ResonanceParams':
        return replace(self, mu=_check_mu(mu))


@dataclass(frozen=True)
class UnperturbedSpectrum:
    """Eigenvalues ``a_r`` (``r = 1..Q``) of the unperturbed block and their degeneracy classes."""
    a: np.ndarray
    exponents: np.ndarray
    pairing: Tuple[Tuple[int, ...], ...]

    def class_of(self, r: int) -> Tuple[int, ...]:
        for cls in self.pairing:
            if r in cls:
                return cls
        raise InvalidInput("index %d is outside 1..%d" % (r, len(self.a)))

    def value(self, r: int) -> complex:
        """``a_r`` with 1-based ``r`` taken modulo the block size."""
        return complex(self.a[(r - 1) % len(self.a)])


def _check_integer(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidInput("%s must be an integer, got %r" % (name, value))
    return int(value)


def _check_mu(mu) -> float:
    mu = float(mu)
    if not math.isfinite(mu) or mu < 0:
        raise InvalidInput("kick strength must be a finite non-negative number, got %r" % mu)
    return mu


def _condition_residual(P: int, Q: int, beta: float, nu: int) -> float:
    """Distance of ``beta - nu/P - Q/2`` from the nearest integer."""
    residual = (beta - nu / P - Q / 2) % 1.0
    return min(residual, 1.0 - residual)


def validate_resonance(P: int, Q: int, beta: float, nu: int = 0, mu: float = 0.0) -> ResonanceParams:
    """
    Validate a resonance and reduce it to canonical form.

    Raises:
        InvalidInput: ``P`` or ``Q`` not a positive integer, or bad ``mu``.
        NotAResonance: ``beta`` is not congruent to ``nu/P + Q/2`` modulo 1.
    """
    P = _check_integer("P", P)
    Q = _check_integer("Q", Q)
    nu = _check_integer("nu", nu)
    if P < 1 or Q < 1:
        raise InvalidInput("P and Q must be positive, got P=%d, Q=%d" % (P, Q))
    beta = float(beta)
    if not math.isfinite(beta):
        raise InvalidInput("beta must be finite, got %r" % beta)
    mu = _check_mu(mu)

    if _condition_residual(P, Q, beta, nu) > RESONANCE_TOLERANCE:
        raise NotAResonance("beta=%r is not a resonant quasi-momentum for P=%d, Q=%d, nu=%d "
                            "(expected beta = nu/P + Q/2 mod 1 = %r)"
                            % (beta, P, Q, nu, (nu / P + Q / 2) % 1.0))

    beta = beta % 1.0
    if beta >= 1.0 - RESONANCE_TOLERANCE:
        beta = 0.0
    g = math.gcd(P, Q)
    return ResonanceParams(P=P, Q=Q, p=P // g, q=Q // g, nu=nu, beta=beta, mu=mu)


def admissible_nu(P: int, Q: int, beta: float) -> List[int]:
    """All ``nu`` in ``[0, P)`` for which ``beta`` is resonant."""
    P = _check_integer("P", P)
    Q = _check_integer("Q", Q)
    if P < 1 or Q < 1:
        raise InvalidInput("P and Q must be positive, got P=%d, Q=%d" % (P, Q))
    return [nu for nu in range(P) if _condition_residual(P, Q, float(beta), nu) <= RESONANCE_TOLERANCE]


def primitive_resonance(p: int, q: int, beta: Optional[float] = None, nu: int = 0,
                        mu: float = 0.0) -> ResonanceParams:
    """
    Primitive resonance of order ``q``, i.e. ``(P, Q) = (p, q)``.

    When ``beta`` is omitted it is derived from ``nu``.
    """
    p = _check_integer("p", p)
    q = _check_integer("q", q)
    if p < 1 or q < 1:
        raise InvalidInput("p and q must be positive, got p=%d, q=%d" % (p, q))
    if math.gcd(p, q) != 1:
        raise InvalidInput("p=%d and q=%d are not coprime" % (p, q))
    if beta is None:
        beta = (nu / p + q / 2) % 1.0
    return validate_resonance(p, q, beta, nu, mu)


def rational_beta(beta: Union[float, Fraction]) -> Optional[Fraction]:
    """``beta`` as a fraction with a small denominator, if it is one. Fractions pass through."""
    if isinstance(beta, Fraction):
        return beta
    candidate = Fraction(beta).limit_denominator(MAX_BETA_DENOMINATOR)
    if abs(float(candidate) - beta) < 1e-13:
        return candidate
    return None


def quadratic_phase(p: int, q: int, beta: Union[float, Fraction],
                    n: Union[int, Sequence[int], np.ndarray], N: int = 1) -> np.ndarray:
    """
    Exponents ``x`` in ``[0, 2)`` with ``a_n ** N == exp(-1j * pi * x)``.

    ``beta`` may be passed as a :class:`~fractions.Fraction`; a float is
    snapped to a fraction with denominator at most ``MAX_BETA_DENOMINATOR``.
    For rational ``beta = u/v`` the exponent ``p*N*(v*(n-1) + u)**2 / (v*v*q)``
    is reduced modulo 2 in integer arithmetic, so no precision is lost for
    large ``n`` or ``N``.
    """
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    fraction = rational_beta(beta)
    if fraction is None:
        return np.mod(p * N * (n + float(beta) - 1.0) ** 2 / q, 2.0)

    u, v = fraction.numerator, fraction.denominator
    denominator = v * v * q
    modulus = 2 * denominator
    weight = (p * N) % modulus
    if modulus < _INT64_SAFE_MODULUS:
        base = (v * (n - 1) + u) % modulus
        numerator = (base * base % modulus) * weight % modulus
        return numerator / float(denominator)
    numerators = [((v * (int(k) - 1) + u) ** 2 * weight) % modulus for k in n]
    return np.array([Fraction(k, denominator) for k in numerators], dtype=float)


def degeneracy_classes(exponents: np.ndarray, tolerance: float = DEGENERACY_TOLERANCE) -> Tuple[Tuple[int, ...], ...]:
    """
    Group 1-based indices whose phases ``pi * x`` agree modulo ``2*pi``.

    Classes are ordered by their smallest member.
    """
    size = len(exponents)
    assigned = np.zeros(size, dtype=bool)
    classes: List[Tuple[int, ...]] = []
    for r in range(size):
        if assigned[r]:
            continue
        distance = np.abs(exponents - exponents[r]) % 2.0
        distance = np.minimum(distance, 2.0 - distance) * math.pi
        members = np.flatnonzero((distance < tolerance) & ~assigned)
        assigned[members] = True
        classes.append(tuple(int(i) + 1 for i in members))
    return tuple(classes)


def unperturbed_eigenvalues(params: ResonanceParams) -> UnperturbedSpectrum:
    """The eigenvalues ``a_1 .. a_Q`` of the ``mu = 0`` block, with degeneracy classes."""
    exponents = quadratic_phase(params.p, params.q, params.beta_fraction, np.arange(1, params.Q + 1))
    a = np.exp(-1j * np.pi * exponents)
    pairing = degeneracy_classes(exponents)
    logger.debug("Unperturbed spectrum for %s: %d classes", params, len(pairing))
    return UnperturbedSpectrum(a=a, exponents=exponents, pairing=pairing)
