# coding=utf-8

"""
Gauss-type sums of the unperturbed eigenvalues and the estimates built on
them: partial-sum bounds, the log-diagonal product, the ``F(x)``
optimization behind the decay rate, and the empirical decay of ``|s_j|``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize
from sympy import isprime

from .exceptions import InvalidInput, UnsupportedParams, DegenerateFactor, InsufficientData
from .perturbation import alpha_exponent, canonical_path, path_sum_coefficient
from .resonance import ResonanceParams, quadratic_phase, primitive_resonance, unperturbed_eigenvalues
from .utils import fit_line

logger = logging.getLogger(__name__)

MULTIPLE_OF_Q = 'multiple-of-q'
FULL_PERIOD = 'full-period'
PARTIAL = 'partial'

EXACT_CASE_TOLERANCE = 1e-9
FACTOR_TOLERANCE = 1e-12
LAMBDA_RANGE = (0.25, 0.5)
MIN_QUADRATURE_POINTS = 1000
DEFAULT_QUADRATURE_POINTS = 4000
LAMBDA_GRID = 257
DECAY_RATE_ESTIMATE = 0.0016
MIN_DECAY_ORDERS = 5

Rule = Union[int, Mapping[int, int], Callable[[int], int]]


@dataclass(frozen=True)
class GaussSumReport:
    value: complex
    magnitude_squared: float
    case: str
    bound: float
    satisfied: bool


@dataclass(frozen=True)
class GammaBoundResult:
    """Maximum of ``-2 (x - lambda)**2 + F(x)`` over ``[0, 1] x [1/4, 1/2]``."""
    x_star: float
    lambda_star: float
    value: float
    quadrature_error: float


class LogDiagonalProduct(NamedTuple):
    sum: float
    bound_ratio: float


@dataclass(frozen=True)
class LogProductSplit:
    """
    The regularized log product split into its Fourier parts, with the
    bounds each part obeys.
    """
    direct: float
    regularized: float
    sigma_prime: float
    sigma_double_prime: float
    rho: float
    cutoff: int
    sigma_prime_bound: float
    sigma_double_prime_bound: float
    regularization_bound: float


def gauss_partial_sum(p: int, q: int, beta: float, N: int, j: int, T: int) -> GaussSumReport:
    """
    ``sum_{n=j}^{j+T-1} a_n ** N`` and the bound it obeys: ``T**2`` when
    ``q | N``, ``q`` for a full period, ``2q(1 + log q)`` otherwise.

    Raises:
        InvalidInput: ``q`` not prime, ``q | p``, or ``T`` outside ``1..q``.
    """
    if not isprime(q):
        raise InvalidInput("q=%d is not prime" % q)
    if p % q == 0:
        raise InvalidInput("p=%d is a multiple of q=%d" % (p, q))
    if not 1 <= T <= q:
        raise InvalidInput("T=%d outside 1..%d" % (T, q))
    exponents = quadratic_phase(p, q, beta, np.arange(j, j + T), N)
    value = complex(np.sum(np.exp(-1j * np.pi * exponents)))
    magnitude_squared = abs(value) ** 2
    if N % q == 0:
        case, bound = MULTIPLE_OF_Q, float(T * T)
    elif T == q:
        case, bound = FULL_PERIOD, float(q)
    else:
        case, bound = PARTIAL, 2 * q * (1 + math.log(q))
    if case == PARTIAL:
        satisfied = magnitude_squared <= bound
    else:
        satisfied = abs(magnitude_squared - bound) <= EXACT_CASE_TOLERANCE * bound
    return GaussSumReport(value=value, magnitude_squared=magnitude_squared, case=case, bound=bound,
                          satisfied=satisfied)


def _check_rho(rho: float):
    if not 0 < rho < 1:
        raise InvalidInput("rho must lie in (0, 1), got %r" % rho)


def fourier_log_coeff(N: int, rho: float) -> float:
    """``sigma_N(rho) = -rho**|N| / |N|``, and 0 for ``N = 0``."""
    _check_rho(rho)
    if N == 0:
        return 0.0
    return -rho ** abs(N) / abs(N)


def fourier_log_partial_sum(phi: float, rho: float, cutoff: int) -> float:
    """
    ``Re sum_{N=1}^{cutoff} sigma_N(rho) exp(i N phi)``, which converges to
    ``log|1 - rho exp(i phi)|``.
    """
    _check_rho(rho)
    N = np.arange(1, cutoff + 1)
    return float(np.sum(-rho ** N / N * np.cos(N * phi)))


def _require_perturbative(params: ResonanceParams):
    if not params.primitive or not params.half_momentum or not (params.q > 2 and isprime(params.q)):
        raise UnsupportedParams("the diagonal product is defined for primitive odd prime resonances "
                                "at beta = 1/2, got %s" % (params,))


def _product_nodes(j: int, q: int, along_path: bool) -> List[int]:
    """Sites ``j + l`` (``l = 1 .. alpha_j - 1``, modulo ``q``) or the interior of the canonical path."""
    if along_path:
        return list(canonical_path(j, q).sites[1:-1])
    return [(j + l - 1) % q + 1 for l in range(1, alpha_exponent(j, q))]


def _product_factors(params: ResonanceParams, j: int, rho: float, along_path: bool) -> np.ndarray:
    spectrum = unperturbed_eigenvalues(params)
    nodes = _product_nodes(j, params.q, along_path)
    ratios = np.array([spectrum.value(m) for m in nodes]) * np.conj(spectrum.value(j))
    factors = np.abs(rho * ratios - 1)
    if rho == 1 and len(factors) and factors.min() < FACTOR_TOLERANCE:
        collision = nodes[int(np.argmin(factors))]
        raise DegenerateFactor("a_%d equals a_%d, the product vanishes" % (collision, j))
    return factors


def log_diagonal_product(params: ResonanceParams, j: int, along_path: bool = False) -> LogDiagonalProduct:
    """
    ``sum_{l=1}^{alpha_j - 1} log|a_{j+l} conj(a_j) - 1|`` and its ratio to
    ``sqrt(q log(q)**3)``.

    With ``along_path`` the sites are the interior nodes of the canonical
    path instead of ``j + l``; the two coincide for rightward paths.

    Raises:
        DegenerateFactor: one of the sites is the partner of ``j``.
    """
    _require_perturbative(params)
    q = params.q
    total = math.fsum(np.log(_product_factors(params, j, 1.0, along_path)))
    return LogDiagonalProduct(sum=total, bound_ratio=abs(total) / math.sqrt(q * math.log(q) ** 3))


def default_rho(q: int) -> float:
    """``1 - rho = 1 / (q log q)``."""
    return 1 - 1 / (q * math.log(q))


def regularized_log_diagonal_product(params: ResonanceParams, j: int, rho: Optional[float] = None,
                                     along_path: bool = False) -> float:
    """The same sum with every ``a_{j+l} conj(a_j)`` scaled by ``rho``."""
    _require_perturbative(params)
    rho = default_rho(params.q) if rho is None else rho
    _check_rho(rho)
    return math.fsum(np.log(_product_factors(params, j, rho, along_path)))


def log_product_split(params: ResonanceParams, j: int, rho: Optional[float] = None,
                      cutoff: Optional[int] = None, along_path: bool = False) -> LogProductSplit:
    """
    Expand the regularized log product in the Fourier series of
    ``log|1 - rho exp(i phi)|`` and split the frequencies into
    ``N`` in ``q Z`` (``sigma_prime``) and the rest (``sigma_double_prime``).

    The inner sums over sites are Gauss-type partial sums; the series is cut
    where ``rho**N`` drops below double precision unless ``cutoff`` is given.
    """
    _require_perturbative(params)
    q = params.q
    rho = default_rho(q) if rho is None else rho
    _check_rho(rho)
    if cutoff is None:
        cutoff = min(200000, math.ceil(math.log(1e-17) / math.log(rho)))
    nodes = np.array(_product_nodes(j, q, along_path))
    beta = params.beta_fraction
    prime_terms, other_terms = [], []
    for N in range(1, cutoff + 1):
        phases = quadratic_phase(params.p, q, beta, nodes, N) - quadratic_phase(params.p, q, beta, j, N)
        inner = float(np.sum(np.cos(np.pi * phases)))
        term = fourier_log_coeff(N, rho) * inner
        (prime_terms if N % q == 0 else other_terms).append(term)
    direct = math.fsum(np.log(_product_factors(params, j, 1.0, along_path)))
    return LogProductSplit(
        direct=direct,
        regularized=regularized_log_diagonal_product(params, j, rho, along_path),
        sigma_prime=math.fsum(prime_terms),
        sigma_double_prime=math.fsum(other_terms),
        rho=rho,
        cutoff=cutoff,
        sigma_prime_bound=-2 * math.log(1 - rho ** q),
        sigma_double_prime_bound=-math.log(1 - rho) * math.sqrt(2 * q * math.log(q)),
        regularization_bound=16 * q * (1 - rho) * math.log(2 * q),
    )


def _log_cos(t: float) -> float:
    return math.log(math.cos(math.pi * t / 4))


def log_cos_integral(x: float) -> Tuple[float, float]:
    """``F(x) = int_0^x log(cos(pi t / 4)) dt`` with its error estimate."""
    if x == 0:
        return 0.0, 0.0
    value, error = quad(_log_cos, 0.0, x)
    return value, error


def _objective(point: np.ndarray) -> float:
    x, lam = point
    return -(-2 * (x - lam) ** 2 + log_cos_integral(x)[0])


def gamma_bound(quadrature_points: int = DEFAULT_QUADRATURE_POINTS) -> GammaBoundResult:
    """
    Maximize ``-2 (x - lambda)**2 + F(x)`` on a dense grid, then refine locally.

    ``F`` is tabulated on ``quadrature_points`` intervals by adaptive
    quadrature on each interval. The supremum sits on the edge
    ``lambda = 1/4`` of the open interval, which is reported as such.
    """
    if quadrature_points < MIN_QUADRATURE_POINTS:
        raise InvalidInput("need at least %d quadrature points, got %d" % (MIN_QUADRATURE_POINTS, quadrature_points))
    xs = np.linspace(0.0, 1.0, quadrature_points + 1)
    pieces = [quad(_log_cos, a, b)[0] for a, b in zip(xs[:-1], xs[1:])]
    F = np.concatenate([[0.0], np.cumsum(pieces)])
    lambdas = np.linspace(LAMBDA_RANGE[0], LAMBDA_RANGE[1], LAMBDA_GRID)
    surface = -2 * (xs[:, None] - lambdas[None, :]) ** 2 + F[:, None]
    i, k = np.unravel_index(int(np.argmax(surface)), surface.shape)
    logger.debug("Grid maximum %.8g at x=%.6f, lambda=%.6f", surface[i, k], xs[i], lambdas[k])

    result = minimize(_objective, x0=np.array([xs[i], lambdas[k]]), method='L-BFGS-B',
                      bounds=[(0.0, 1.0), LAMBDA_RANGE], options={'ftol': 1e-15, 'gtol': 1e-12})
    x_star, lambda_star = (float(v) for v in result.x)
    value = -float(result.fun)
    if value < surface[i, k]:
        x_star, lambda_star, value = float(xs[i]), float(lambdas[k]), float(surface[i, k])
    _, error = log_cos_integral(x_star)
    return GammaBoundResult(x_star=x_star, lambda_star=lambda_star, value=value, quadrature_error=error)


def _apply(rule: Rule, q: int) -> int:
    if callable(rule):
        return int(rule(q))
    if isinstance(rule, Mapping):
        return int(rule[q])
    return int(rule)


def decay_series(p_rule: Rule, q_list: Sequence[int], j_rule: Rule = 1) -> List[Tuple[int, int, int, float]]:
    """``(q, p, j, |s_j|)`` for each ``q``; ``j_rule`` defaults to the first band."""
    series = []
    for q in q_list:
        p, j = _apply(p_rule, q), _apply(j_rule, q)
        params = primitive_resonance(p, q, beta=0.5)
        coefficient = path_sum_coefficient(params, j, oracle=False)
        series.append((q, p, j, coefficient.magnitude))
        logger.debug("|s_%d(p=%d, q=%d)| = %.6g", j, p, q, coefficient.magnitude)
    return series


def decay_fit(p_rule: Rule, q_list: Sequence[int], j_rule: Rule = 1, base: float = 10.0) -> float:
    """
    Slope of ``log_base |s_j|`` against ``q``; ``base=math.e`` gives the
    rate in the units of :func:`decay_ratio`.

    Raises:
        InsufficientData: fewer than ``MIN_DECAY_ORDERS`` distinct orders.
        BudgetExceeded: propagated from the coefficient evaluation.
    """
    orders = sorted(set(int(q) for q in q_list))
    _check_orders(len(orders))
    return decay_rate(decay_series(p_rule, orders, j_rule), base)


def _check_orders(count: int):
    if count < MIN_DECAY_ORDERS:
        raise InsufficientData("a decay rate needs at least %d orders, got %d" % (MIN_DECAY_ORDERS, count))


def decay_rate(series: Sequence[Tuple[int, int, int, float]], base: float = 10.0) -> float:
    """Slope of ``log_base |s_j|`` against ``q`` for a series from :func:`decay_series`."""
    _check_orders(len(series))
    if not base > 1:
        raise InvalidInput("logarithm base must exceed 1, got %r" % base)
    rate, _, stderr = fit_line([q for q, _, _, _ in series], [math.log(s, base) for _, _, _, s in series])
    logger.info("Decay rate of |s_j| over q=%s: %.4f +- %.2g per unit q (log base %g)", [q for q, _, _, _ in series],
                rate, stderr, base)
    return rate


def decay_ratio(s: float, q: int, gamma: float = DECAY_RATE_ESTIMATE) -> float:
    """
    ``|s_j| exp(gamma q)``, bounded in q if ``|s_j|`` decays at least at rate
    ``gamma``. ``gamma`` is a natural-log rate, as from ``decay_fit(..., base=math.e)``
    with the sign flipped.
    """
    return abs(s) * math.exp(gamma * q)
