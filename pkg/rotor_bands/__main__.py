# coding=utf-8

"""
Command line front end: ``rotor-bands <command> [flags]``.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from .__version__ import __version__
from .commands import COMMAND_HANDLERS, _
from .config import COMMANDS, build_run_config
from .exceptions import InvalidInput, RotorBandsException
from .output import FORMATS, emit, writes_to_stdout

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)

HELP = {
    'bands': _("Sweep the Bloch angle and track every band."),
    'flatness': _("Report which bands are flat."),
    'detgd': _("Determinant of the leading block of G."),
    'coeffs': _("Path-sum slope coefficients with the finite-difference check."),
    'scaling': _("Fit the power of mu in the band slopes."),
    'gauss': _("Evaluate one Gauss-type partial sum and its bound."),
    'gamma': _("Optimize the decay constant bound."),
    'decay': _("Fit the decay of |s_j| in q."),
    'decomp-check': _("Compare the grid propagator with its Bloch decomposition."),
    'verify': _("Run the acceptance suite."),
}


def _common_flags() -> argparse.ArgumentParser:
    # Every default is None so that unset flags do not mask the configuration file.
    parser = argparse.ArgumentParser(add_help=False)
    resonance = parser.add_argument_group(_("resonance"))
    resonance.add_argument("--P", type=int, help=_("Numerator of tau / 2pi in the (P, Q) form."))
    resonance.add_argument("--Q", type=int, help=_("Resonance length."))
    resonance.add_argument("--p", type=int, help=_("Numerator in lowest terms; implies Q = q."))
    resonance.add_argument("--q", type=int, help=_("Resonance order."))
    resonance.add_argument("--beta", type=float, help=_("Quasi-momentum; derived from nu when omitted."))
    resonance.add_argument("--nu", type=int, help=_("Branch of the resonance condition."))
    resonance.add_argument("--mu", type=float, help=_("Kick strength."))

    numerics = parser.add_argument_group(_("numerics"))
    numerics.add_argument("--mu-list", help=_("Comma separated kick strengths for fits."))
    numerics.add_argument("--grid", type=int, help=_("Number of Bloch angles (default 256)."))
    numerics.add_argument("--j", type=int, help=_("Band index."))
    numerics.add_argument("--threshold", type=float, help=_("Flatness threshold (default 1e-9)."))
    numerics.add_argument("--N", type=int, help=_("Power of the eigenvalues in a Gauss sum."))
    numerics.add_argument("--T", type=int, help=_("Length of a Gauss partial sum."))
    numerics.add_argument("--h", type=float, help=_("Finite-difference step (default 1e-3)."))
    numerics.add_argument("--trials", type=int, help=_("Number of random states."))
    numerics.add_argument("--quadrature-points", type=int, help=_("Quadrature intervals (default 4000)."))
    numerics.add_argument("--q-list", help=_("Comma separated resonance orders."))
    numerics.add_argument("--checks", help=_("Comma separated check numbers for verify."))
    numerics.add_argument("--report", action='store_true', default=None,
                          help=_("Append the asymptotic diagnostics to verify."))

    run = parser.add_argument_group(_("output"))
    run.add_argument("--format", choices=FORMATS, help=_("Output format (default csv)."))
    run.add_argument("-o", "--output", help=_("Output file; standard output when omitted."))
    run.add_argument("--seed", type=int, help=_("Random seed (default 0)."))
    run.add_argument("--config", help=_("JSON or YAML file whose keys mirror the flags."))
    run.add_argument("-v", "--verbose", action='count', default=0, help=_("Log more; repeat for debug output."))
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotor-bands",
                                     description=_("Quasi-energy bands of the kicked rotor at resonance."))
    parser.add_argument("--version", action='version', version="%(prog)s " + __version__)
    subparsers = parser.add_subparsers(dest='command', metavar="COMMAND")
    subparsers.required = True
    common = _common_flags()
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common], help=HELP[command], description=HELP[command])
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(level=LOG_LEVELS[min(args.verbose, len(LOG_LEVELS) - 1)], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")

    flags = vars(args).copy()
    command = flags.pop('command')
    config_path = flags.pop('config')
    flags.pop('verbose')
    try:
        config = build_run_config(command, flags, config_path)
        logger.debug("Running %s with %s", command, config)
        table = COMMAND_HANDLERS[command](config)
        meta = dict(config.as_dict(), version=__version__)
        emit(table, config.format, config.output, meta)
    except InvalidInput as e:
        print(_("Error: {0}").format(e), file=sys.stderr)
        return EXIT_USAGE
    except (RotorBandsException, OSError) as e:
        logger.debug("Command %s failed", command, exc_info=True)
        print(_("Failed: {0}").format(e), file=sys.stderr)
        return EXIT_FAILURE

    print(table.summary, file=sys.stdout if not writes_to_stdout(config.output) else sys.stderr)
    return EXIT_FAILURE if table.failed else EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
