# coding=utf-8

"""
Leading-order band slopes for primitive resonances of odd prime order at
``beta = 1/2``.

At ``mu = 0`` the eigenvalues pair up as ``a_j = a_{q-j+1}``; the kick
hops between neighbouring sites of a ``q``-site ring, so the pair
``(j, q-j+1)`` is connected by one path going right and one going left
around the ring. The band slope is of order ``mu**alpha_j`` where
``alpha_j`` is the length of the longer of the two paths, and its
coefficient ``s_j`` is a sum over compositions of that length.

Everything that involves cancellations between many terms runs on
:mod:`mpmath` at extended precision.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from mpmath import mp
from sympy import isprime

from .exceptions import InvalidInput, InvalidBand, UnsupportedParams, PoleHit, BudgetExceeded, InsufficientData, \
    DegenerateResidue, TrackingAmbiguity
from .floquet import build_V
from .resonance import ResonanceParams, unperturbed_eigenvalues
from .utils import fit_line

logger = logging.getLogger(__name__)

MAX_ALPHA = 30
ENUMERATION_MAX_ALPHA = 20
COEFFICIENT_DPS = 50
POLE_TOLERANCE = 1e-14
RESIDUE_TOLERANCE = 1e-12

MAX_ORACLE_MU = 1e-2
MIN_STEP, MAX_STEP = 1e-5, 1e-2
DEFAULT_STEP = 1e-3
DEFAULT_ORACLE_MU = 1e-3
ORACLE_TOLERANCE = 0.02
MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class LatticePath:
    """
    Nearest-neighbour walk ``m_0, ..., m_l`` on the ring of ``q`` sites.

    The winding counts ``1 -> q`` jumps minus ``q -> 1`` jumps, so that the
    walk picks up the Bloch phase ``exp(i * winding * theta)`` from the
    corner entries of ``V(theta)``.
    """
    sites: Tuple[int, ...]
    q: int

    def __post_init__(self):
        if not self.sites:
            raise InvalidInput("a path needs at least one site")
        if any(not 1 <= m <= self.q for m in self.sites):
            raise InvalidInput("path %s leaves the sites 1..%d" % (self.sites, self.q))
        if len(self.sites) > 1 and self.q < 3:
            raise InvalidInput("ring walks need q >= 3, got q=%d" % self.q)
        for here, there in zip(self.sites, self.sites[1:]):
            if (there - here) % self.q not in (1, self.q - 1):
                raise InvalidInput("sites %d and %d are not neighbours on the ring of %d" % (here, there, self.q))

    @property
    def length(self) -> int:
        return len(self.sites) - 1

    @property
    def winding(self) -> int:
        steps = list(zip(self.sites, self.sites[1:]))
        return sum(1 for s in steps if s == (1, self.q)) - sum(1 for s in steps if s == (self.q, 1))

    def reversed(self) -> 'LatticePath':
        return LatticePath(tuple(reversed(self.sites)), self.q)


@dataclass(frozen=True)
class Composition:
    """Ordered parts ``r_1, ..., r_n``, all positive."""
    parts: Tuple[int, ...]

    def __post_init__(self):
        if not self.parts or any(r < 1 for r in self.parts):
            raise InvalidInput("composition parts must be positive, got %s" % (self.parts,))

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def partial_sums(self) -> Tuple[int, ...]:
        return tuple(itertools.accumulate(self.parts))

    @property
    def factorial(self) -> int:
        return math.prod(math.factorial(r) for r in self.parts)

    def reversed(self) -> 'Composition':
        return Composition(tuple(reversed(self.parts)))

    @classmethod
    def from_cuts(cls, cuts: Sequence[int], total: int) -> 'Composition':
        """The composition whose partial sums below ``total`` are ``cuts``."""
        edges = [0] + sorted(cuts) + [total]
        return cls(tuple(b - a for a, b in zip(edges, edges[1:])))


def compositions(total: int) -> List[Composition]:
    """All compositions of ``total``, one per subset of cut points ``1..total-1``."""
    found = []
    for mask in range(1 << (total - 1)):
        cuts = [i + 1 for i in range(total - 1) if mask & (1 << i)]
        found.append(Composition.from_cuts(cuts, total))
    return found


@dataclass(frozen=True)
class PathSumCoefficient:
    """Leading slope coefficient ``s_j`` of band ``j`` and its cross-checks."""
    j: int
    alpha: int
    s: complex
    path: LatticePath
    oracle_estimate: Optional[float] = None
    relative_gap: Optional[float] = None
    enumeration_gap: Optional[float] = None
    oracle_mu: Optional[float] = None

    @property
    def magnitude(self) -> float:
        return abs(self.s)


def _check_band(j: int, q: int):
    if not (q > 2 and isprime(q)):
        raise InvalidInput("the band exponents are defined for odd prime q, got q=%d" % q)
    if not 1 <= j <= (q + 1) // 2:
        raise InvalidBand("band %d out of range 1..%d for q=%d" % (j, (q + 1) // 2, q))


def _require_perturbative(params: ResonanceParams):
    if not params.primitive or not params.half_momentum or not (params.q > 2 and isprime(params.q)):
        raise UnsupportedParams("perturbative coefficients need a primitive resonance of odd prime order "
                                "at beta = 1/2, got %s" % (params,))


def nondegenerate_band(q: int) -> int:
    return (q + 1) // 2


def alpha_exponent(j: int, q: int) -> int:
    """Order in ``mu`` of the slope of band ``j``: ``max(2j - 1, q - 2j + 1)``, and ``q`` for the middle band."""
    _check_band(j, q)
    if j == nondegenerate_band(q):
        return q
    return max(2 * j - 1, q - 2 * j + 1)


def splitting_exponent(j: int, q: int) -> int:
    """Order in ``mu`` at which the pair ``(j, q - j + 1)`` splits: the shorter connecting path."""
    _check_band(j, q)
    if j == nondegenerate_band(q):
        raise InvalidBand("band %d is the nondegenerate band of q=%d" % (j, q))
    return min(2 * j - 1, q - 2 * j + 1)


def _walk_left(start: int, stop: int, q: int) -> Tuple[int, ...]:
    sites = [start]
    while True:
        sites.append((sites[-1] - 2) % q + 1)
        if sites[-1] == stop:
            return tuple(sites)


def canonical_path(j: int, q: int) -> LatticePath:
    """
    The path of length ``alpha_j`` that carries the leading slope of band ``j``.

    Rightward ``j .. q-j+1`` when ``j < (q+2)/4``, leftward through the
    ``1 -> q`` bond otherwise, and for the middle band the leftward loop
    around the whole ring.
    """
    _check_band(j, q)
    partner = q - j + 1
    if j == nondegenerate_band(q):
        return LatticePath(_walk_left(j, j, q), q)
    if 4 * j < q + 2:
        return LatticePath(tuple(range(j, partner + 1)), q)
    return LatticePath(_walk_left(j, partner, q), q)


def enumerate_paths(j: int, k: int, length: int, q: int) -> List[LatticePath]:
    """Every ring walk of ``length`` steps from ``j`` to ``k``."""
    found = []
    for steps in itertools.product((1, -1), repeat=length):
        sites = [j]
        for step in steps:
            sites.append((sites[-1] - 1 + step) % q + 1)
        if sites[-1] == k:
            found.append(LatticePath(tuple(sites), q))
    return found


def path_operator_element(params: ResonanceParams, path: LatticePath, comp: Composition, z: complex) -> complex:
    """
    Weight ``g(m_0) g(m_{l_1}) ... g(m_{l_n}) h(m_l)`` of a path cut by a composition.

    ``g(m) = a_m / (a_m - z)`` and ``h(m) = 1 / a_m``.

    Raises:
        InvalidInput: the composition does not add up to the path length.
        PoleHit: ``z`` sits on an eigenvalue the weight needs.
    """
    if comp.total != path.length:
        raise InvalidInput("composition of %d does not match path length %d" % (comp.total, path.length))
    a = unperturbed_eigenvalues(params).a
    value = 1 + 0j
    for index in (0,) + comp.partial_sums:
        am = complex(a[path.sites[index] - 1])
        if abs(am - z) < POLE_TOLERANCE:
            raise PoleHit("z=%r hits a_%d" % (z, path.sites[index]))
        value *= am / (am - z)
    return value / complex(a[path.sites[-1] - 1])


def path_operator_matrix_element(params: ResonanceParams, theta: float, z: complex, comp: Composition,
                                 j: int, k: int) -> complex:
    """``<j|P(theta, z, r)|k>`` as a sum over ring walks, each weighted ``2**-l exp(i nu theta)``."""
    total = 0j
    for path in enumerate_paths(j, k, comp.total, params.q):
        total += np.exp(1j * path.winding * theta) * path_operator_element(params, path, comp, z)
    return total / 2 ** comp.total


def path_operator_matrix(params: ResonanceParams, theta: float, z: complex, comp: Composition) -> np.ndarray:
    """The same operator as a matrix product ``L V^{r_1} L ... L V^{r_n} L C^-1`` with ``L = C (C - z)^-1``."""
    a = unperturbed_eigenvalues(params).a
    if np.min(np.abs(a - z)) < POLE_TOLERANCE:
        raise PoleHit("z=%r hits the unperturbed spectrum" % (z,))
    L = np.diag(a / (a - z))
    V = build_V(params, theta)
    product = L
    for r in comp.parts:
        product = product @ np.linalg.matrix_power(V, r) @ L
    return product @ np.diag(1 / a)


def _mp_unperturbed(params: ResonanceParams) -> List:
    """``a_1 .. a_Q`` at the current working precision."""
    fraction = params.beta_fraction
    values = []
    for r in range(1, params.Q + 1):
        exact = (Fraction(params.p) * (r + fraction - 1) ** 2 / params.q) % 2
        values.append(mp.expjpi(-mp.mpf(exact.numerator) / exact.denominator))
    return values


def _path_weights(a: Sequence, path: LatticePath, j: int) -> List:
    """``b_l = a_{m_l} / (a_{m_l} - a_j)`` for the interior nodes of ``path``."""
    aj = a[j - 1]
    weights = []
    for m in path.sites[1:-1]:
        difference = a[m - 1] - aj
        if abs(difference) < RESIDUE_TOLERANCE:
            raise DegenerateResidue("interior node %d of %s shares the eigenvalue of band %d" % (m, path.sites, j))
        weights.append(a[m - 1] / difference)
    return weights


def composition_sum(weights: Sequence) -> 'mpmath.mpc':
    """
    ``sum over compositions r of l = len(weights) + 1`` of
    ``(-1)**n * prod(b at the cuts) / (r_1! ... r_n!)``, by dynamic programming.

    ``F[l]`` holds the sum over compositions of ``l``; the last part
    ``l - k`` contributes ``-1/(l - k)!`` and the cut at ``k`` its weight.
    """
    total = len(weights) + 1
    inverse_factorial = [1 / mp.factorial(k) for k in range(total + 1)]
    partial = [mp.mpc(1)]
    for l in range(1, total + 1):
        accumulated = mp.fsum(partial[k] * inverse_factorial[l - k] for k in range(l))
        weight = weights[l - 1] if l < total else 1
        partial.append(-weight * accumulated)
    return partial[total]


def composition_sum_enumerated(weights: Sequence) -> 'mpmath.mpc':
    """The same sum by visiting every subset of cut points."""
    total = len(weights) + 1
    terms = []
    for mask in range(1 << (total - 1)):
        cuts = [i + 1 for i in range(total - 1) if mask & (1 << i)]
        comp = Composition.from_cuts(cuts, total)
        term = mp.mpf((-1) ** len(comp.parts)) / comp.factorial
        for cut in cuts:
            term *= weights[cut - 1]
        terms.append(term)
    return mp.fsum(terms)


def path_sum_coefficient(params: ResonanceParams, j: int, oracle: bool = True,
                         oracle_mu: float = DEFAULT_ORACLE_MU, h: float = DEFAULT_STEP) -> PathSumCoefficient:
    """
    Coefficient ``s_j`` of the leading slope ``mu**alpha_j * s_j * sin(theta)``
    (``cos(theta)`` profile for the middle band), from the closed-form
    residues of the path operator along the canonical path.

    The composition sum is done by dynamic programming; for ``alpha_j`` up
    to ``ENUMERATION_MAX_ALPHA`` it is repeated by enumeration and the
    relative difference recorded. With ``oracle`` set, the magnitude is
    compared against the finite-difference slope, retrying at ten and a
    hundred times smaller ``mu`` while the gap exceeds 2%.

    Raises:
        UnsupportedParams: not a primitive odd prime resonance at ``beta = 1/2``.
        BudgetExceeded: ``alpha_j`` above 30.
        DegenerateResidue: an interior node is degenerate with ``a_j``.
    """
    _require_perturbative(params)
    q = params.q
    alpha = alpha_exponent(j, q)
    if alpha > MAX_ALPHA:
        raise BudgetExceeded("alpha_%d = %d exceeds the enumeration budget of %d" % (j, alpha, MAX_ALPHA))
    path = canonical_path(j, q)
    loops = [path, path.reversed()] if j == nondegenerate_band(q) else [path]

    enumeration_gap: Optional[float] = None
    with mpmath.workdps(COEFFICIENT_DPS):
        a = _mp_unperturbed(params)
        total = mp.mpc(0)
        for loop in loops:
            weights = _path_weights(a, loop, j)
            value = composition_sum(weights)
            if alpha <= ENUMERATION_MAX_ALPHA:
                reference = composition_sum_enumerated(weights)
                gap = float(abs(value - reference) / abs(reference))
                enumeration_gap = gap if enumeration_gap is None else max(enumeration_gap, gap)
            total += value
        s = complex(mp.mpc(0, 1) * (-1) ** j * a[j - 1] * total / mp.mpf(2) ** alpha)
    logger.debug("s_%d(p=%d, q=%d) = %r (alpha=%d, enumeration gap %s)", j, params.p, q, s, alpha, enumeration_gap)

    coefficient = PathSumCoefficient(j=j, alpha=alpha, s=s, path=path, enumeration_gap=enumeration_gap)
    if not oracle:
        return coefficient

    theta = oracle_angle(j, q)
    mu = oracle_mu
    estimate, gap = float('nan'), float('inf')
    for attempt in range(3):
        mu = oracle_mu / 10 ** attempt
        slope = numerical_band_derivative(params, j, mu, theta, h)
        estimate = abs(slope) / (mu ** alpha * abs(math.sin(theta)))
        gap = abs(abs(s) - estimate) / estimate if estimate > 0 else float('inf')
        if gap < ORACLE_TOLERANCE:
            break
        logger.info("Oracle gap %.3g for s_%d at mu=%g, retrying at smaller mu", gap, j, mu)
    return PathSumCoefficient(j=j, alpha=alpha, s=s, path=path, oracle_estimate=estimate, relative_gap=gap,
                              enumeration_gap=enumeration_gap, oracle_mu=mu)


def oracle_angle(j: int, q: int) -> float:
    """Where the slope profile is probed: the sine peak, or ``pi/4`` on the cosine profile of the middle band."""
    return math.pi / 4 if j == nondegenerate_band(q) else math.pi / 2


class ExtendedPrecisionBlock:
    """
    ``S(theta / q, mu)`` built and diagonalized at the current mpmath
    precision. Must be used inside the ``workdps`` block it was created in.
    """

    def __init__(self, params: ResonanceParams, mu: float):
        self.params = params
        self.mu = mp.mpf(mu)
        self.a = _mp_unperturbed(params)
        self.classes = unperturbed_eigenvalues(params).pairing
        Q = params.Q
        roots = [mp.expjpi(mp.mpf(2 * m) / Q) for m in range(Q)]
        self.G = mp.matrix(Q, Q)
        for j in range(Q):
            for k in range(Q):
                self.G[j, k] = mp.fsum(roots[s * (j - k) % Q] * self.a[s] for s in range(Q)) / Q

    def leading_determinant(self, d: int) -> 'mpmath.mpc':
        """``det`` of the leading ``d x d`` block of ``G``."""
        block = mp.matrix(d, d)
        for j in range(d):
            for k in range(d):
                block[j, k] = self.G[j, k]
        return mp.det(block)

    def eigenvalues(self, theta) -> List:
        Q = self.params.Q
        vartheta = mp.mpf(theta) / self.params.q
        S = mp.matrix(Q, Q)
        for j in range(Q):
            kick = mp.expj(-self.mu * mp.cos(vartheta + 2 * mp.pi * j / Q))
            for k in range(Q):
                S[j, k] = kick * self.G[j, k]
        if Q == 1:
            return [S[0, 0]]
        return list(mp.eig(S, left=False, right=False))

    def band_value(self, j: int, theta) -> 'mpmath.mpc':
        """
        Eigenvalue of band ``j`` at ``theta``: the member of the cluster
        around ``a_j`` ranked by its phase offset from ``a_j``, largest
        first for the smaller index of a pair.
        """
        cls = next(c for c in self.classes if j in c)
        center = self.a[j - 1]
        others = [abs(self.a[r - 1] - center) for r in range(1, self.params.Q + 1) if r not in cls]
        radius = min(others) / 2 if others else mp.mpf(1)
        cluster = [w for w in self.eigenvalues(theta) if abs(w - center) < radius]
        if len(cluster) != len(cls):
            raise TrackingAmbiguity("found %d eigenvalues near a_%d, expected %d; mu is too large"
                                    % (len(cluster), j, len(cls)))
        ranked = sorted(cluster, key=lambda w: mp.arg(w / center), reverse=True)
        return ranked[cls.index(j)]

    def follow(self, previous, theta) -> 'mpmath.mpc':
        """Eigenvalue at ``theta`` nearest to ``previous``."""
        values = sorted(self.eigenvalues(theta), key=lambda w: abs(w - previous))
        if len(values) > 1 and abs(values[1] - previous) <= 2 * abs(values[0] - previous):
            raise TrackingAmbiguity("two eigenvalues compete for the continuation at theta=%s" % mp.nstr(theta, 8),
                                    theta=float(theta))
        return values[0]


def _oracle_precision(Q: int, mu: float, h: float) -> int:
    return 30 + math.ceil(Q * math.log10(1 / mu)) + math.ceil(math.log10(1 / h))


def numerical_band_derivative(params: ResonanceParams, j: int, mu: float, theta: float,
                              h: float = DEFAULT_STEP) -> float:
    """
    ``d phi_j / d theta`` at ``theta`` (with ``theta = q * vartheta``) by a
    centred difference with one Richardson step.

    The spectrum is computed at a precision large enough to resolve slopes
    of order ``mu**Q``.

    Raises:
        InvalidInput: ``mu`` outside ``(0, 1e-2]`` or ``h`` outside ``[1e-5, 1e-2]``.
        InvalidBand: ``j`` outside ``1..Q``.
        TrackingAmbiguity: the band cannot be followed across the stencil.
    """
    if not 0 < mu <= MAX_ORACLE_MU:
        raise InvalidInput("oracle kick strength must lie in (0, %g], got %r" % (MAX_ORACLE_MU, mu))
    if not MIN_STEP <= h <= MAX_STEP:
        raise InvalidInput("step must lie in [%g, %g], got %r" % (MIN_STEP, MAX_STEP, h))
    if not 1 <= j <= params.Q:
        raise InvalidBand("band %d out of range 1..%d" % (j, params.Q))
    dps = _oracle_precision(params.Q, mu, h)
    with mpmath.workdps(dps):
        block = ExtendedPrecisionBlock(params, mu)
        theta, step = mp.mpf(theta), mp.mpf(h)
        center = block.band_value(j, theta)
        ahead = block.follow(center, theta + step)
        behind = block.follow(center, theta - step)
        ahead2 = block.follow(ahead, theta + 2 * step)
        behind2 = block.follow(behind, theta - 2 * step)
        near = mp.arg(ahead / behind) / (2 * step)
        far = mp.arg(ahead2 / behind2) / (4 * step)
        value = (4 * near - far) / 3
    return float(value)


def derivative_profile(params: ResonanceParams, j: int, mu: float, thetas: Sequence[float],
                       h: float = DEFAULT_STEP) -> List[float]:
    return [numerical_band_derivative(params, j, mu, theta, h) for theta in thetas]


def pair_splitting(params: ResonanceParams, j: int, mu: float, theta: float) -> float:
    """``|w_+ - w_-|`` for the pair around ``a_j``; of order ``mu**splitting_exponent(j, q)``."""
    _require_perturbative(params)
    splitting_exponent(j, params.q)
    if not 0 < mu <= MAX_ORACLE_MU:
        raise InvalidInput("kick strength must lie in (0, %g], got %r" % (MAX_ORACLE_MU, mu))
    with mpmath.workdps(_oracle_precision(params.Q, mu, MAX_STEP)):
        block = ExtendedPrecisionBlock(params, mu)
        upper = block.band_value(j, theta)
        lower = block.band_value(params.q - j + 1, theta)
        return float(abs(upper - lower))


def scaling_fit(params: ResonanceParams, j: int, mu_values: Sequence[float],
                h: float = DEFAULT_STEP) -> float:
    """
    Log-log slope of ``|d phi_j / d theta|`` against ``mu``, probed at the
    sine peak (``pi/4`` for the middle band).

    Raises:
        InsufficientData: fewer than 4 distinct values or less than a decade covered.
    """

    mus = sorted(set(float(mu) for mu in mu_values))
    if len(mus) < MIN_FIT_POINTS:
        raise InsufficientData("need at least %d distinct mu values, got %d" % (MIN_FIT_POINTS, len(mus)))
    if mus[0] <= 0 or mus[-1] > MAX_ORACLE_MU:
        raise InsufficientData("mu values must lie in (0, %g]" % MAX_ORACLE_MU)
    if mus[-1] / mus[0] < 10 * (1 - 1e-9):
        raise InsufficientData("mu values span less than a decade (%g .. %g)" % (mus[0], mus[-1]))
    theta = oracle_angle(j, params.q) if params.q > 2 and isprime(params.q) else math.pi / 2
    slopes = [abs(numerical_band_derivative(params, j, mu, theta, h)) for mu in mus]
    if min(slopes) == 0:
        raise InsufficientData("band %d has a vanishing slope, no exponent to fit" % j)
    exponent, _, stderr = fit_line(np.log(mus), np.log(slopes))
    logger.info("Band %d of %s: fitted exponent %.4f +- %.2g", j, params, exponent, stderr)
    return exponent
