# coding=utf-8
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Any, Sequence, Callable, Iterable, List, TypeVar, Optional, Tuple

import numpy as np
from scipy.optimize import curve_fit

T = TypeVar('T')
R = TypeVar('R')

THREADS_ENV = "ROTOR_BANDS_THREADS"

logger = logging.getLogger(__name__)


class SettingsManager:
    """
    Run settings with defaults, overridden by a configuration mapping.

    Keys are the long command line flag names with ``-`` replaced by ``_``.
    """

    DEFAULT_VALUES: Dict[str, Any] = {
        'P': None,
        'Q': None,
        'p': None,
        'q': None,
        'beta': None,
        'nu': 0,
        'mu': 0.0,
        'mu_list': [1e-4, 2e-4, 5e-4, 1e-3],
        'grid': 256,
        'j': None,
        'threshold': 1e-9,
        'N': 1,
        'T': None,
        'h': 1e-3,
        'trials': 1,
        'quadrature_points': 4000,
        'q_list': [3, 5, 7, 11, 13],
        'format': 'csv',
        'output': None,
        'seed': 0,
        'report': False,
        'checks': None,
    }

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config: Dict[str, Any] = SettingsManager.DEFAULT_VALUES.copy()
        for key, value in (config or dict()).items():
            key = str(key).replace('-', '_')
            if key not in self.config:
                logger.warning("Ignoring unknown configuration key %r", key)
                continue
            self.config[key] = value

    def __call__(self, key: str) -> Any:
        if key not in self.config:
            raise ValueError("%s is not a valid setting" % key)
        return self.config[key]

    def update(self, overrides: Dict[str, Any]):
        """Apply explicitly given values; ``None`` means "not given"."""
        for key, value in overrides.items():
            if value is not None:
                self.config[key] = value


def worker_count() -> int:
    """Number of worker threads, capped by ``ROTOR_BANDS_THREADS``."""
    default = min(4, os.cpu_count() or 1)
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", THREADS_ENV, raw)
        return default
    if value < 1:
        logger.warning("Ignoring %s=%r: must be positive", THREADS_ENV, raw)
        return default
    return value


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Map ``func`` over ``items`` on a thread pool.

    Results come back in input order, so the outcome does not depend on
    the number of workers.
    """
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [func(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def _line(x, slope, intercept):
    return slope * x + intercept


def fit_line(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float, float]:
    """
    Least-squares straight line through ``(x, y)``.

    Returns:
        ``(slope, intercept, slope_stderr)``; the error is ``nan`` for two points.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    guess = np.polyfit(xs, ys, 1)
    popt, pcov = curve_fit(_line, xs, ys, p0=guess)
    stderr = float(np.sqrt(pcov[0, 0])) if np.isfinite(pcov[0, 0]) else float('nan')
    return float(popt[0]), float(popt[1]), stderr
