# coding=utf-8

"""
Floquet blocks of the resonant kicked rotor.

Two conventions are exposed and kept apart:

* ``S(vartheta, mu) = D(vartheta) G`` on the Bloch angle ``vartheta`` in
  ``[0, 2*pi/Q)``, for any resonance;
* ``X(theta, mu) = C exp(-i mu V(theta))`` on ``theta`` in ``[0, 2*pi)``,
  for primitive resonances at ``beta = 1/2``.

Both are unitarily equivalent with ``theta = q * vartheta``.
"""

import logging
from typing import Optional, Union

import numpy as np
from scipy import linalg

from .exceptions import InvalidInput, NotUnitary, UnsupportedParams, GridMismatch
from .resonance import ResonanceParams, unperturbed_eigenvalues

logger = logging.getLogger(__name__)

UNITARITY_TOLERANCE = 1e-12

ArrayLike = Union[np.ndarray, 'UnitaryMatrix']


class UnitaryMatrix:
    """
    A dense square complex matrix checked against the unitarity tolerance.

    The entries are stored read-only.
    """

    __slots__ = ('entries',)

    def __init__(self, entries, tolerance: Optional[float] = UNITARITY_TOLERANCE):
        matrix = np.array(entries, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise InvalidInput("expected a non-empty square matrix, got shape %s" % (matrix.shape,))
        matrix.setflags(write=False)
        self.entries: np.ndarray = matrix
        if tolerance is not None:
            defect = unitarity_defect(matrix)
            if defect > tolerance:
                raise NotUnitary(defect, tolerance)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def defect(self) -> float:
        return unitarity_defect(self.entries)

    def scaled(self, phase: complex) -> 'UnitaryMatrix':
        """This matrix multiplied by a unimodular constant."""
        return UnitaryMatrix(self.entries * phase)

    def __repr__(self) -> str:
        return "<UnitaryMatrix dim=%d>" % self.dim


def unitarity_defect(matrix: ArrayLike) -> float:
    """``max |U^H U - I|`` entrywise."""
    entries = matrix.entries if isinstance(matrix, UnitaryMatrix) else np.asarray(matrix)
    gram = entries.conj().T @ entries
    return float(np.max(np.abs(gram - np.eye(entries.shape[0]))))


def fourier_matrix(size: int) -> np.ndarray:
    """Unitary DFT matrix ``W[j, s] = exp(2*pi*i*j*s/size) / sqrt(size)``."""
    index = np.arange(size)
    return np.exp(2j * np.pi * np.outer(index, index) / size) / np.sqrt(size)


def build_G(params: ResonanceParams) -> UnitaryMatrix:
    """The free-rotation block, the Fourier conjugate of ``diag(a_1 .. a_Q)``."""
    spectrum = unperturbed_eigenvalues(params)
    if params.Q == 1:
        return UnitaryMatrix([[spectrum.a[0]]])
    W = fourier_matrix(params.Q)
    return UnitaryMatrix((W * spectrum.a) @ W.conj().T)


def kick_phases(params: ResonanceParams, vartheta: float, mu: Optional[float] = None) -> np.ndarray:
    """Diagonal of ``D(vartheta)``: ``exp(-i mu cos(vartheta + 2*pi*(j-1)/Q))``."""
    mu = params.mu if mu is None else mu
    angles = vartheta + 2 * np.pi * np.arange(params.Q) / params.Q
    return np.exp(-1j * mu * np.cos(angles))


def build_S(params: ResonanceParams, vartheta: float, mu: Optional[float] = None,
            G: Optional[UnitaryMatrix] = None) -> UnitaryMatrix:
    """
    The Floquet block ``S(vartheta, mu) = D(vartheta) G``.

    ``mu`` defaults to ``params.mu``; a prebuilt ``G`` may be passed in
    sweeps. ``S(vartheta, 0)`` equals ``G`` exactly.
    """
    G = build_G(params) if G is None else G
    mu = params.mu if mu is None else mu
    if mu == 0:
        return G
    return UnitaryMatrix(kick_phases(params, vartheta, mu)[:, None] * G.entries)


def _require_primitive_half(params: ResonanceParams):
    if not params.primitive:
        raise UnsupportedParams("the hopping form needs a primitive resonance, got Q=%d, q=%d"
                                % (params.Q, params.q))
    if not params.half_momentum:
        raise UnsupportedParams("the hopping form is only available at beta = 1/2, got beta=%r"
                                % params.beta)


def build_C(params: ResonanceParams) -> UnitaryMatrix:
    """``C = diag(exp(-i*pi*p*(j - 1/2)**2 / q))``."""
    _require_primitive_half(params)
    return UnitaryMatrix(np.diag(unperturbed_eigenvalues(params).a))


def build_V(params: ResonanceParams, theta: float) -> np.ndarray:
    """
    Hermitian nearest-neighbour hopping on the ``q``-site ring.

    Off-diagonal entries are 1/2; the corner entries carry the Bloch phase,
    ``V[1, q] = exp(i theta)/2`` and ``V[q, 1] = exp(-i theta)/2`` (1-based).
    """
    q = params.q
    V = np.zeros((q, q), dtype=complex)
    for j in range(q - 1):
        V[j, j + 1] += 0.5
        V[j + 1, j] += 0.5
    V[0, q - 1] += 0.5 * np.exp(1j * theta)
    V[q - 1, 0] += 0.5 * np.exp(-1j * theta)
    return V


def exp_hermitian(H: np.ndarray, mu: float) -> np.ndarray:
    """``exp(-i mu H)`` for Hermitian ``H`` through its eigendecomposition."""
    values, vectors = linalg.eigh(H)
    return (vectors * np.exp(-1j * mu * values)) @ vectors.conj().T


def build_X(params: ResonanceParams, theta: float, mu: Optional[float] = None) -> UnitaryMatrix:
    """
    The hopping form ``X(theta, mu) = C exp(-i mu V(theta))``.

    Raises:
        UnsupportedParams: for non-primitive resonances or ``beta != 1/2``.
    """
    C = build_C(params)
    mu = params.mu if mu is None else mu
    if mu == 0:
        return C
    return UnitaryMatrix(C.entries @ exp_hermitian(build_V(params, theta), mu))


def random_state(size: int, seed: int = 0) -> np.ndarray:
    """Normalized complex Gaussian state, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=size) + 1j * rng.normal(size=size)
    return psi / np.linalg.norm(psi)


def propagate_on_grid(params: ResonanceParams, psi: np.ndarray) -> np.ndarray:
    """
    One period of the full propagator on an angle grid of ``len(psi)`` points.

    The free rotation multiplies momentum component ``n`` by
    ``exp(-i tau (n + beta)**2 / 2)``, then the kick multiplies by
    ``exp(-i mu cos(theta))``. This is the ordering encoded by ``S = D G``.
    """
    size = len(psi)
    n = np.rint(np.fft.fftfreq(size, d=1.0 / size))
    free = np.exp(-0.5j * params.tau * (n + params.beta) ** 2)
    rotated = np.fft.ifft(np.fft.fft(psi) * free)
    theta = 2 * np.pi * np.arange(size) / size
    return rotated * np.exp(-1j * params.mu * np.cos(theta))


def propagate_blockwise(params: ResonanceParams, psi: np.ndarray) -> np.ndarray:
    """
    One period through the direct-integral decomposition.

    The grid value at ``vartheta + 2*pi*(j-1)/Q`` is component ``j`` of the
    fibre over ``vartheta``; each fibre is multiplied by ``S(vartheta)``.
    """
    size = len(psi)
    stride = size // params.Q
    G = build_G(params)
    result = np.empty(size, dtype=complex)
    for m in range(stride):
        fibre = psi[m::stride]
        vartheta = 2 * np.pi * m / size
        result[m::stride] = build_S(params, vartheta, G=G).entries @ fibre
    return result


def verify_direct_integral(params: ResonanceParams, grid_points: int,
                           psi: Optional[np.ndarray] = None, seed: int = 0) -> float:
    """
    Largest pointwise difference between the grid propagator and the
    blockwise action of ``S``.

    Raises:
        GridMismatch: ``grid_points`` is not a positive multiple of ``Q``.
    """
    if grid_points < params.Q or grid_points % params.Q:
        raise GridMismatch("grid of %d points is not a multiple of Q=%d" % (grid_points, params.Q))
    if psi is None:
        psi = random_state(grid_points, seed)
    else:
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (grid_points,):
            raise GridMismatch("state has shape %s, expected (%d,)" % (psi.shape, grid_points))
    error = float(np.max(np.abs(propagate_on_grid(params, psi) - propagate_blockwise(params, psi))))
    logger.debug("Direct integral check for %s on %d points: %.3e", params, grid_points, error)
    return error
