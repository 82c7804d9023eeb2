# coding=utf-8

"""
Eigenphases of unitary blocks and quasi-energy bands over the Bloch angle.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from .exceptions import ConvergenceFailure, InvalidInput, TrackingAmbiguity, NotUnitary
from .floquet import UnitaryMatrix, build_G, build_S, build_X, fourier_matrix, unitarity_defect, \
    UNITARITY_TOLERANCE
from .perturbation import ExtendedPrecisionBlock
from .resonance import ResonanceParams, unperturbed_eigenvalues, UnperturbedSpectrum
from .utils import ordered_map

logger = logging.getLogger(__name__)

DEFAULT_GRID = 256
MIN_GRID = 8
MAX_GRID = 4096
FLATNESS_THRESHOLD = 1e-9
AMBIGUITY_MARGIN = 1e-6
HOMOTOPY_START = 1e-4
HOMOTOPY_RATIO = 1.2

TRACKING_METHODS = ('overlap', 'phase')


@dataclass(frozen=True)
class EigenSolution:
    """Eigenvalues sorted by principal phase, with orthonormal eigenvectors as columns."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.eigenvalues)


@dataclass(frozen=True)
class BandStructure:
    """
    Tracked eigenphase curves.

    ``phases[j - 1]`` is the unwrapped band ``j`` sampled on ``grid``.
    ``residual`` is the largest eigenpair residual met along the sweep.
    """
    grid: np.ndarray
    phases: np.ndarray
    labels: Tuple[int, ...]
    widths: np.ndarray
    params: Optional[ResonanceParams] = None
    residual: float = 0.0

    @property
    def size(self) -> int:
        return len(self.labels)

    def band(self, j: int) -> np.ndarray:
        return self.phases[self.labels.index(j)]


def eigenphases(U: UnitaryMatrix) -> EigenSolution:
    """
    Complete eigensystem of a unitary matrix.

    The complex Schur form of a normal matrix is diagonal, so the Schur
    vectors are orthonormal eigenvectors even inside degenerate clusters.

    Raises:
        NotUnitary: the input violates the unitarity tolerance.
        ConvergenceFailure: the Schur decomposition failed.
    """
    entries = U.entries if isinstance(U, UnitaryMatrix) else np.asarray(U, dtype=complex)
    defect = unitarity_defect(entries)
    if defect > UNITARITY_TOLERANCE:
        raise NotUnitary(defect, UNITARITY_TOLERANCE)
    try:
        T, Z = linalg.schur(entries, output='complex')
    except (linalg.LinAlgError, ValueError) as e:
        raise ConvergenceFailure("Schur decomposition failed: %s" % e) from e
    values = np.diag(T)
    values = values / np.abs(values)
    order = np.argsort(np.angle(values), kind='stable')
    values = values[order]
    vectors = Z[:, order]
    residuals = np.linalg.norm(entries @ vectors - vectors * values, axis=0)
    return EigenSolution(eigenvalues=values, eigenvectors=vectors, residuals=residuals)


def _overlap_assignment(reference: np.ndarray, solution: EigenSolution,
                        grid_index: Optional[int] = None, theta: Optional[float] = None) -> np.ndarray:
    """
    Column of ``solution`` continuing each column of ``reference``.

    With ``grid_index`` set, a band whose two best candidates are closer than
    ``AMBIGUITY_MARGIN`` raises :class:`TrackingAmbiguity`.
    """
    overlap = np.abs(reference.conj().T @ solution.eigenvectors) ** 2
    if grid_index is not None and overlap.shape[1] > 1:
        ranked = -np.sort(-overlap, axis=1)
        margins = ranked[:, 0] - ranked[:, 1]
        worst = int(np.argmin(margins))
        if margins[worst] < AMBIGUITY_MARGIN:
            raise TrackingAmbiguity("band %d: best and second-best overlaps differ by %.2e at grid point %d"
                                    % (worst + 1, margins[worst], grid_index),
                                    grid_index=grid_index, theta=theta)
    _, columns = linear_sum_assignment(overlap, maximize=True)
    return columns


def _phase_assignment(previous: np.ndarray, solution: EigenSolution) -> np.ndarray:
    """Column of ``solution`` nearest in phase to each previous eigenvalue."""
    distance = np.abs(np.angle(solution.eigenvalues[None, :] / previous[:, None]))
    _, columns = linear_sum_assignment(distance)
    return columns


def _reference_vectors(cls: Sequence[int], W: np.ndarray) -> np.ndarray:
    """Unperturbed eigenvectors for a degeneracy class; pairs use the even/odd combinations."""
    columns = [W[:, r - 1] for r in cls]
    if len(columns) == 2:
        first, second = columns
        return np.stack([(first + second) / math.sqrt(2), (first - second) / math.sqrt(2)], axis=1)
    return np.stack(columns, axis=1)


def _assign_unperturbed(solution: EigenSolution, spectrum: UnperturbedSpectrum) -> np.ndarray:
    """
    Column of ``solution`` for each band ``j``, matched to ``a_j``.

    Eigenvalues are first matched to the unperturbed eigenvalues by
    distance, then members of a degeneracy class are told apart by overlap
    with the class reference vectors.
    """
    distance = np.abs(solution.eigenvalues[:, None] - spectrum.a[None, :])
    rows, bands = linear_sum_assignment(distance)
    order = np.empty(len(spectrum.a), dtype=int)
    order[bands] = rows
    W = fourier_matrix(len(spectrum.a))
    for cls in spectrum.pairing:
        if len(cls) < 2:
            continue
        members = np.array([r - 1 for r in cls])
        columns = order[members]
        refs = _reference_vectors(cls, W)
        overlap = np.abs(refs.conj().T @ solution.eigenvectors[:, columns]) ** 2
        _, picked = linear_sum_assignment(overlap, maximize=True)
        order[members] = columns[picked]
    return order


def _homotopy_vectors(params: ResonanceParams, vartheta: float, G: UnitaryMatrix,
                      spectrum: UnperturbedSpectrum) -> np.ndarray:
    """
    Band-ordered eigenvectors of ``S(vartheta, mu)``, labelled by continuation in ``mu``.
    """
    start = min(params.mu, HOMOTOPY_START)
    solution = eigenphases(build_S(params, vartheta, start, G=G))
    vectors = solution.eigenvectors[:, _assign_unperturbed(solution, spectrum)]
    if params.mu > start:
        steps = max(1, math.ceil(math.log(params.mu / start) / math.log(HOMOTOPY_RATIO)))
        for mu in np.geomspace(start, params.mu, steps + 1)[1:]:
            solution = eigenphases(build_S(params, vartheta, float(mu), G=G))
            vectors = solution.eigenvectors[:, _overlap_assignment(vectors, solution)]
        logger.debug("Labelled %d bands by %d homotopy steps up to mu=%g", params.Q, steps, params.mu)
    return vectors


def _follow(grid: np.ndarray, solutions: List[EigenSolution], vectors: np.ndarray,
            method: str) -> np.ndarray:
    """Eigenvalues along the grid, one row per band."""
    if method not in TRACKING_METHODS:
        raise InvalidInput("unknown tracking method %r, expected one of %s" % (method, TRACKING_METHODS))
    values = np.empty((vectors.shape[1], len(grid)), dtype=complex)
    columns = _overlap_assignment(vectors, solutions[0], grid_index=0, theta=float(grid[0]))
    values[:, 0] = solutions[0].eigenvalues[columns]
    vectors = solutions[0].eigenvectors[:, columns]
    for k in range(1, len(grid)):
        solution = solutions[k]
        if method == 'overlap':
            columns = _overlap_assignment(vectors, solution, grid_index=k, theta=float(grid[k]))
        else:
            columns = _phase_assignment(values[:, k - 1], solution)
        values[:, k] = solution.eigenvalues[columns]
        vectors = solution.eigenvectors[:, columns]
    return values


def _structure(grid: np.ndarray, values: np.ndarray, params: Optional[ResonanceParams],
               solutions: Sequence[EigenSolution]) -> BandStructure:
    phases = np.unwrap(np.angle(values), axis=1)
    widths = phases.max(axis=1) - phases.min(axis=1)
    labels = tuple(range(1, values.shape[0] + 1))
    residual = max(float(np.max(s.residuals)) for s in solutions)
    return BandStructure(grid=grid, phases=phases, labels=labels, widths=widths, params=params, residual=residual)


def track_bands(grid: Sequence[float], matrices: Sequence[UnitaryMatrix],
                method: str = 'overlap') -> BandStructure:
    """
    Track the eigenphases of an arbitrary unitary family sampled on ``grid``.

    Bands are numbered by the phase order at the first grid point.
    """
    grid = np.asarray(grid, dtype=float)
    if len(grid) != len(matrices) or len(grid) == 0:
        raise InvalidInput("need one matrix per grid point, got %d points and %d matrices"
                           % (len(grid), len(matrices)))
    solutions = ordered_map(eigenphases, matrices)
    return _structure(grid, _follow(grid, solutions, solutions[0].eigenvectors, method), None, solutions)


def bloch_grid(Q: int, size: int) -> np.ndarray:
    """``size`` equally spaced angles covering ``[0, 2*pi/Q)``."""
    return np.arange(size) * (2 * np.pi / Q) / size


def _sweep_once(params: ResonanceParams, size: int, method: str, workers: Optional[int]) -> BandStructure:
    grid = bloch_grid(params.Q, size)
    G = build_G(params)
    spectrum = unperturbed_eigenvalues(params)
    solutions = ordered_map(lambda vartheta: eigenphases(build_S(params, vartheta, G=G)), grid, workers)
    vectors = _homotopy_vectors(params, float(grid[0]), G, spectrum)
    return _structure(grid, _follow(grid, solutions, vectors, method), params, solutions)


def sweep_bands(params: ResonanceParams, grid_size: int = DEFAULT_GRID, mu: Optional[float] = None,
                method: str = 'overlap', max_grid: int = MAX_GRID,
                workers: Optional[int] = None) -> BandStructure:
    """
    Bands of ``S(vartheta, mu)`` over ``[0, 2*pi/Q)``.

    Band ``j`` is the continuation of ``a_j`` from ``mu = 0``. On a
    tracking ambiguity the grid is doubled, up to ``max_grid`` points.

    Raises:
        InvalidInput: ``grid_size`` below 8.
        TrackingAmbiguity: still ambiguous at ``max_grid``.
    """
    if grid_size < MIN_GRID:
        raise InvalidInput("grid needs at least %d points, got %d" % (MIN_GRID, grid_size))
    if mu is not None:
        params = params.with_mu(mu)
    size = grid_size
    while True:
        try:
            return _sweep_once(params, size, method, workers)
        except TrackingAmbiguity as e:
            if size * 2 > max_grid:
                raise
            logger.warning("Band tracking ambiguous at vartheta=%.6g (point %s of %d), refining grid to %d points",
                           e.theta, e.grid_index, size, size * 2)
            size *= 2


def band_widths(bands: BandStructure) -> List[float]:
    """Total extent ``max - min`` of each unwrapped band."""
    return [float(np.max(row) - np.min(row)) for row in bands.phases]


def flatness_test(bands: BandStructure, threshold: float = FLATNESS_THRESHOLD) -> List[bool]:
    """``True`` for each band narrower than ``threshold``."""
    if not threshold > 0:
        raise InvalidInput("flatness threshold must be positive, got %r" % threshold)
    return [width < threshold for width in band_widths(bands)]


def gd_determinant(params: ResonanceParams, dps: Optional[int] = None) -> float:
    """
    ``|det G^(d)|`` of the leading ``d x d`` block of ``G``, ``d = (Q + 1) // 2``.

    With ``dps`` set the block is built and reduced by :mod:`mpmath` at that
    many digits; in double precision the value bottoms out near ``1e-16``.
    """
    d = (params.Q + 1) // 2
    if dps is not None:
        with mpmath.workdps(dps):
            return float(abs(ExtendedPrecisionBlock(params, 0.0).leading_determinant(d)))
    block = build_G(params).entries[:d, :d]
    return float(abs(np.linalg.det(block)))


def spectral_projector(params: ResonanceParams, theta: float, mu: float, j: int) -> np.ndarray:
    """
    Projector onto the eigenvectors of ``X(theta, mu)`` near ``a_j``.

    The circle around ``a_j`` has radius half the distance to the nearest
    distinct unperturbed eigenvalue.
    """
    spectrum = unperturbed_eigenvalues(params)
    if not 1 <= j <= params.Q:
        raise InvalidInput("band %d out of range 1..%d" % (j, params.Q))
    center = spectrum.a[j - 1]
    others = [spectrum.a[r - 1] for r in range(1, params.Q + 1) if r not in spectrum.class_of(j)]
    radius = 0.5 * min(abs(a - center) for a in others) if others else 1.0
    solution = eigenphases(build_X(params, theta, mu))
    inside = np.abs(solution.eigenvalues - center) < radius
    vectors = solution.eigenvectors[:, inside]
    return vectors @ vectors.conj().T
