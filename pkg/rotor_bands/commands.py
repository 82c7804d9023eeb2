# coding=utf-8

"""
One function per subcommand. Each turns a :class:`RunConfig` into a
:class:`ResultTable` with a one-line summary.
"""

import logging
from gettext import translation
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np
from sympy import isprime

from . import bands, floquet, number_theory, perturbation
from .config import RunConfig
from .exceptions import InsufficientData, InvalidInput
from .output import ResultTable, columns_for_bands
from .verify import VerificationSuite

logger = logging.getLogger(__name__)

translator = translation("rotor_bands", str(Path(__file__).parent / "locale"), fallback=True)
_ = translator.gettext
ngettext = translator.ngettext


def _band_indices(config: RunConfig, q: int, size: int) -> List[int]:
    if config.j is not None:
        return [config.j]
    if q > 2 and isprime(q):
        return list(range(1, perturbation.nondegenerate_band(q) + 1))
    return list(range(1, size + 1))


def run_bands(config: RunConfig) -> ResultTable:
    params = config.params()
    structure = bands.sweep_bands(params, config.grid)
    rows = [[float(theta)] + [float(v) for v in structure.phases[:, i]] for i, theta in enumerate(structure.grid)]
    widths = [float(w) for w in structure.widths]
    return ResultTable(columns=columns_for_bands(params.Q), rows=rows, footer=("widths", widths),
                       summary=_("{0} bands on {1} points, widths from {2:.3e} to {3:.3e}")
                       .format(structure.size, len(structure.grid), min(widths), max(widths)))


def run_flatness(config: RunConfig) -> ResultTable:
    params = config.params()
    structure = bands.sweep_bands(params, config.grid)
    flat = bands.flatness_test(structure, config.threshold)
    rows = [[j, float(w), f] for j, w, f in zip(structure.labels, structure.widths, flat)]
    if all(flat):
        summary = _("all bands flat")
    elif not any(flat):
        summary = _("no flat bands")
    else:
        summary = ngettext("{0} of {1} band flat", "{0} of {1} bands flat", len(flat)).format(sum(flat), len(flat))
    return ResultTable(columns=["band", "width", "flat"], rows=rows, summary=summary)


def run_detgd(config: RunConfig) -> ResultTable:
    params = config.params()
    d = (params.Q + 1) // 2
    value = bands.gd_determinant(params)
    return ResultTable(columns=["d", "abs_det"], rows=[[d, value]],
                       summary=_("|det G^(d)| = {0:.6e} with d = {1}").format(value, d))


def run_coeffs(config: RunConfig) -> ResultTable:
    params = config.params()
    oracle_mu = config.mu if config.mu > 0 else perturbation.DEFAULT_ORACLE_MU
    rows = []
    for j in _band_indices(config, params.q, params.Q):
        c = perturbation.path_sum_coefficient(params, j, oracle=True, oracle_mu=oracle_mu, h=config.h)
        rows.append([c.j, c.alpha, c.s.real, c.s.imag, c.magnitude, c.oracle_estimate, c.relative_gap,
                     c.enumeration_gap, c.oracle_mu])
    gaps = [row[6] for row in rows if row[6] is not None]
    return ResultTable(columns=["j", "alpha", "s_real", "s_imag", "abs_s", "oracle_estimate", "relative_gap",
                                "enumeration_gap", "oracle_mu"], rows=rows,
                       summary=_("{0} coefficients, largest oracle gap {1:.3g}").format(
                           len(rows), max(gaps, default=float("nan"))))


def run_scaling(config: RunConfig) -> ResultTable:
    params = config.params()
    perturbative = params.q > 2 and isprime(params.q)
    rows = []
    for j in _band_indices(config, params.q, params.Q):
        exponent = perturbation.scaling_fit(params, j, config.mu_list, config.h)
        alpha = perturbation.alpha_exponent(j, params.q) if perturbative and j <= (params.q + 1) // 2 else None
        rows.append([j, alpha, exponent])
    return ResultTable(columns=["j", "alpha", "fitted_exponent"], rows=rows,
                       summary=_("fitted exponents: {0}").format(", ".join("%.3f" % row[2] for row in rows)))


def run_gauss(config: RunConfig) -> ResultTable:
    p = config.p if config.p is not None else config.P
    q = config.q if config.q is not None else config.Q
    if p is None or q is None:
        raise InvalidInput("gauss needs --p/--q")
    beta = 0.5 if config.beta is None else config.beta
    j = 1 if config.j is None else config.j
    T = q if config.T is None else config.T
    report = number_theory.gauss_partial_sum(p, q, beta, config.N, j, T)
    row = [p, q, config.N, j, T, report.value.real, report.value.imag, report.magnitude_squared, report.case,
           report.bound, report.satisfied]
    return ResultTable(columns=["p", "q", "N", "j", "T", "value_real", "value_imag", "magnitude_squared", "case",
                                "bound", "satisfied"], rows=[row],
                       summary=_("|sum|^2 = {0:.6g} ({1}, bound {2:.6g})").format(
                           report.magnitude_squared, report.case, report.bound))


def run_gamma(config: RunConfig) -> ResultTable:
    result = number_theory.gamma_bound(config.quadrature_points)
    return ResultTable(columns=["x_star", "lambda_star", "value", "quadrature_error"],
                       rows=[[result.x_star, result.lambda_star, result.value, result.quadrature_error]],
                       summary=_("maximum {0:.6f} at x = {1:.4f}, lambda = {2:.4f}").format(
                           result.value, result.x_star, result.lambda_star))


def run_decay(config: RunConfig) -> ResultTable:
    p_rule = 1 if config.p is None else config.p
    j_rule = 1 if config.j is None else config.j
    orders = sorted(set(config.q_list))
    if len(orders) < number_theory.MIN_DECAY_ORDERS:
        raise InsufficientData("decay needs at least %d orders in --q-list, got %s"
                               % (number_theory.MIN_DECAY_ORDERS, orders))
    series = number_theory.decay_series(p_rule, orders, j_rule)
    rate = number_theory.decay_rate(series)
    rows = [[q, p, j, s, float(np.log10(s))] for q, p, j, s in series]
    return ResultTable(columns=["q", "p", "j", "abs_s", "log10_abs_s"], rows=rows, footer=("rate", [rate]),
                       summary=_("log10 |s_j| changes by {0:.4f} per unit q").format(rate))


def run_decomp_check(config: RunConfig) -> ResultTable:
    params = config.params()
    if config.trials < 1:
        raise InvalidInput("trials must be positive, got %d" % config.trials)
    rows = []
    for trial in range(config.trials):
        seed = config.seed + trial
        rows.append([trial, seed, floquet.verify_direct_integral(params, config.grid, seed=seed)])
    return ResultTable(columns=["trial", "seed", "max_error"], rows=rows,
                       summary=_("largest pointwise error {0:.3e} over {1} states").format(
                           max(row[2] for row in rows), len(rows)))


def run_verify(config: RunConfig) -> ResultTable:
    suite = VerificationSuite(grid=config.grid, seed=config.seed)
    results = suite.run(config.checks)
    rows: List[list] = [[r.criterion, r.name, r.passed, None, r.detail] for r in results]
    if config.report:
        rows += [[None, "%s (q=%d)" % (d.name, d.q), None, d.value, d.detail]
                 for d in suite.diagnostics(config.q_list)]
    failed = [r.criterion for r in results if not r.passed]
    if failed:
        summary = _("{0} of {1} checks failed: {2}").format(len(failed), len(results), failed)
    else:
        summary = ngettext("{0} check passed", "all {0} checks passed", len(results)).format(len(results))
    return ResultTable(columns=["criterion", "name", "passed", "value", "detail"], rows=rows, summary=summary,
                       failed=bool(failed))


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig], ResultTable]] = {
    'bands': run_bands,
    'flatness': run_flatness,
    'detgd': run_detgd,
    'coeffs': run_coeffs,
    'scaling': run_scaling,
    'gauss': run_gauss,
    'gamma': run_gamma,
    'decay': run_decay,
    'decomp-check': run_decomp_check,
    'verify': run_verify,
}
