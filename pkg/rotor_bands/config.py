# coding=utf-8

"""
Run configuration: defaults, an optional JSON/YAML file, then command line
flags, frozen into a :class:`RunConfig`.
"""

import logging
from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional, Tuple, Sequence, Union

import yaml

from .exceptions import InvalidInput
from .output import FORMATS
from .resonance import ResonanceParams, primitive_resonance, validate_resonance
from .utils import SettingsManager

logger = logging.getLogger(__name__)

COMMANDS = ('bands', 'flatness', 'detgd', 'coeffs', 'scaling', 'gauss', 'gamma', 'decay', 'decomp-check', 'verify')


@dataclass(frozen=True)
class RunConfig:
    command: str
    P: Optional[int] = None
    Q: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None
    beta: Optional[float] = None
    nu: int = 0
    mu: float = 0.0
    mu_list: Tuple[float, ...] = (1e-4, 2e-4, 5e-4, 1e-3)
    grid: int = 256
    j: Optional[int] = None
    threshold: float = 1e-9
    N: int = 1
    T: Optional[int] = None
    h: float = 1e-3
    trials: int = 1
    quadrature_points: int = 4000
    q_list: Tuple[int, ...] = (3, 5, 7, 11, 13)
    format: str = 'csv'
    output: Optional[str] = None
    seed: int = 0
    report: bool = False
    checks: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInput("unknown command %r" % self.command)
        if self.format not in FORMATS:
            raise InvalidInput("format must be one of %s, got %r" % (FORMATS, self.format))

    def params(self) -> ResonanceParams:
        """
        The resonance named by ``--P/--Q`` or by ``--p/--q`` (``Q = q``).

        Raises:
            InvalidInput: neither or both parameterizations given.
            NotAResonance: ``beta`` is not resonant.
        """
        long_form = self.P is not None or self.Q is not None
        short_form = self.p is not None or self.q is not None
        if long_form and short_form:
            raise InvalidInput("give either --P/--Q or --p/--q, not both")
        if long_form:
            if self.P is None or self.Q is None:
                raise InvalidInput("--P and --Q must be given together")
            beta = self.beta if self.beta is not None else (self.nu / self.P + self.Q / 2) % 1.0
            return validate_resonance(self.P, self.Q, beta, self.nu, self.mu)
        if short_form:
            if self.p is None or self.q is None:
                raise InvalidInput("--p and --q must be given together")
            return primitive_resonance(self.p, self.q, self.beta, self.nu, self.mu)
        raise InvalidInput("a resonance is required: give --P/--Q or --p/--q")

    def as_dict(self) -> Dict[str, Any]:
        """Plain mapping for the ``meta`` block of JSON output."""
        return {key: list(value) if isinstance(value, tuple) else value for key, value in asdict(self).items()}


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read a configuration mapping. JSON is parsed as YAML, of which it is a subset.

    Raises:
        InvalidInput: unreadable file, malformed content, or not a mapping.
    """
    try:
        with open(path, encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise InvalidInput("cannot read configuration file %s: %s" % (path, e)) from e
    except yaml.YAMLError as e:
        raise InvalidInput("configuration file %s is malformed: %s" % (path, e)) from e
    if data is None:
        return dict()
    if not isinstance(data, dict):
        raise InvalidInput("configuration file %s must contain a mapping, got %s" % (path, type(data).__name__))
    logger.debug("Loaded %d configuration keys from %s", len(data), path)
    return data


def _number_list(value: Union[str, Sequence, None], kind: type, name: str) -> Optional[Tuple]:
    if value is None:
        return None
    if isinstance(value, str):
        value = [v for v in value.replace(' ', '').split(',') if v]
    elif not isinstance(value, (list, tuple)):
        value = [value]
    try:
        return tuple(kind(v) for v in value)
    except (TypeError, ValueError) as e:
        raise InvalidInput("%s must be a comma separated list of numbers, got %r" % (name, value)) from e


def _scalar(value: Any, kind: type, name: str) -> Any:
    if value is None:
        return None
    if kind is int and isinstance(value, float) and not value.is_integer():
        raise InvalidInput("%s must be an integer, got %r" % (name, value))
    try:
        return kind(value)
    except (TypeError, ValueError) as e:
        raise InvalidInput("%s must be of type %s, got %r" % (name, kind.__name__, value)) from e


_INTEGERS = ('P', 'Q', 'p', 'q', 'nu', 'grid', 'j', 'N', 'T', 'trials', 'quadrature_points', 'seed')
_REALS = ('beta', 'mu', 'threshold', 'h')


def build_run_config(command: str, flags: Dict[str, Any], config_path: Optional[str] = None) -> RunConfig:
    """
    Merge defaults, the configuration file and the explicit flags (``None``
    meaning "not given"); flags win.
    """
    settings = SettingsManager(load_config_file(config_path) if config_path else None)
    settings.update(flags)
    values: Dict[str, Any] = {key: settings(key) for key in SettingsManager.DEFAULT_VALUES}
    for key in _INTEGERS:
        values[key] = _scalar(values[key], int, key)
    for key in _REALS:
        values[key] = _scalar(values[key], float, key)
    values['mu_list'] = _number_list(values['mu_list'], float, 'mu_list')
    values['q_list'] = _number_list(values['q_list'], int, 'q_list')
    values['checks'] = _number_list(values['checks'], int, 'checks')
    values['report'] = bool(values['report'])
    values['format'] = str(values['format']).lower()
    return RunConfig(command=command, **values)
