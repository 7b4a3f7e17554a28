from __future__ import annotations

import argparse
import cmath
import json
import logging
import os
import sys
from datetime import datetime
from datetime import timezone
from typing import Any
from typing import NamedTuple
from typing import TextIO

import numpy as np
from numpy import ndarray

from sis.core.exception.exception import AbstractShapeInvariantStatesException
from sis.core.exception.exception import DivergenceException
from sis.core.exception.exception import InstabilityException
from sis.core.exception.exception import LadderResidualException
from sis.core.exception.exception import NonNormalizableException
from sis.core.exception.exception import TruncationException
from sis.core.exception.exception import UsageException
from sis.core.load_config import DEFAULT_TOL
from sis.core.load_config import RunConfig
from sis.core.load_config import load_run_config
from sis.core.model.algebra import build_spectral_table
from sis.core.model.coherent import DEFAULT_NMAX
from sis.core.model.coherent import CoherentState
from sis.core.model.coherent import action_variable
from sis.core.model.coherent import build_state
from sis.core.model.coherent import energy_expectation
from sis.core.model.coherent import evolve
from sis.core.model.coherent import hn
from sis.core.model.coherent import overlap
from sis.core.model.coherent import overlap_closed
from sis.core.model.family import ETA
from sis.core.model.family import FamilyConfig
from sis.core.model.functional import ZSpec
from sis.core.model.functional import ZVariant
from sis.core.model.functional import z_product_direct
from sis.core.model.measure import MeasureCase
from sis.core.model.measure import MeasureKind
from sis.core.model.measure import verify_moments
from sis.core.model.position import Grid
from sis.core.model.position import GridFn
from sis.core.model.position import default_grid
from sis.core.model.position import eigenfunctions
from sis.core.model.position import evolve_grid
from sis.core.model.position import wavepacket
from sis.core.report import GROUPS
from sis.core.report import report

logger = logging.getLogger(__name__)

''' Environment variable selecting the log level '''
LOG_ENV = 'SIS_LOG'

LOG_LEVELS = {
    'error': logging.ERROR,
    'warn': logging.WARNING,
    'info': logging.INFO,
    'debug': logging.DEBUG,
}

''' Process exit codes '''
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3

''' Exceptions signalling numerical non-convergence '''
NUMERICAL_EXCEPTIONS = (
    DivergenceException,
    TruncationException,
    NonNormalizableException,
    LadderResidualException,
    InstabilityException,
)

''' Options whose values may start with a minus sign '''
SIGNED_VALUE_OPTIONS = ('--z', '--z2', '--grid')

''' 17 significant digits round-trip every double '''
CSV_FORMAT = '%.17g'


class Output(NamedTuple):
    data: dict[str, Any]
    header: str
    rows: ndarray
    code: int = EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> Any:
        raise UsageException(f'\nError: {message}')


def attach_signed_values(argv: list[str]) -> list[str]:
    """
    Rewrite '--z -0.5,0.3' as '--z=-0.5,0.3' so that argparse does not read
     the value as an option.

    :param argv: Arguments without the program name
    :type argv: list[str]
    :return: Arguments with signed values attached to their options
    :rtype: list[str]
    """
    attached: list[str] = []
    pending = False
    for token in argv:
        if pending and len(token) > 1 and token[0] == '-' and token[1] in '0123456789.':
            attached[-1] = f'{attached[-1]}={token}'
        else:
            attached.append(token)
        pending = token in SIGNED_VALUE_OPTIONS
    return attached


def parse_complex(text: str) -> complex:
    """
    Parse a complex literal written as 're,im' or 're'.

    :param text: Literal
    :type text: str
    :return: The number
    :rtype: complex
    """
    parts = text.split(',')
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f'expected re,im but got {text!r}')


def parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(':')
    try:
        xmin, xmax, npoints = parts
        return float(xmin), float(xmax), int(npoints)
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected xmin:xmax:npts but got {text!r}')


def parse_params(text: str) -> dict[str, float]:
    params = {}
    for item in filter(None, text.split(',')):
        key, _, value = item.partition('=')
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f'expected key=value but got {item!r}')
    return params


def _common_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    family = common.add_argument_group('family')
    family.add_argument('--family', default='typeD')
    family.add_argument('--a1', type=float, default=0.0)
    family.add_argument('--beta', type=float, default=ETA)
    family.add_argument('--gamma', type=float, default=0.0)
    family.add_argument('--delta', type=float, default=0.0)
    family.add_argument('--lambda', dest='lam', type=float, default=0.0)
    family.add_argument('--q', type=float)
    family.add_argument('--rscale', type=float)
    functional = common.add_argument_group('functional')
    functional.add_argument(
        '--zfunc', default='const', choices=[variant.value for variant in ZVariant]
    )
    functional.add_argument('--zconst', type=float, default=1.0)
    functional.add_argument('--sigma', type=float)
    functional.add_argument('--cram', type=float, default=0.0)
    functional.add_argument('--alpha', type=float, default=0.0)
    run = common.add_argument_group('run')
    run.add_argument(
        '--z', type=parse_complex, default=0j,
        help="complex label 're,im', e.g. --z=-0.5,0.3"
    )
    run.add_argument('--nmax', type=int, default=DEFAULT_NMAX)
    run.add_argument('--tol', type=float, default=DEFAULT_TOL)
    run.add_argument('--output', choices=['json', 'csv'], default='json')
    run.add_argument('--config', help='JSON run config; overrides flags')
    run.add_argument('--out', help='write output here instead of stdout')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _Parser(
        prog='sis', description='Generalized coherent states of shape-invariant potentials.'
    )
    commands = parser.add_subparsers(dest='command', required=True)

    commands.add_parser('spectrum', parents=[common], help='R(a_n), e_n and P_n')
    commands.add_parser('coeffs', parents=[common], help='orbit products and h_n')
    commands.add_parser('state', parents=[common], help='coefficients c_n')
    overlap_cmd = commands.add_parser('overlap', parents=[common], help='<z|z2>')
    overlap_cmd.add_argument(
        '--z2', type=parse_complex, default=0j, help="second label 're,im'"
    )
    evolve_cmd = commands.add_parser('evolve', parents=[common], help='state at time t')
    evolve_cmd.add_argument('--t', type=float, default=0.0)
    evolve_cmd.add_argument('--omega', type=float, default=1.0)
    action_cmd = commands.add_parser('action', parents=[common], help='<H> and J')
    action_cmd.add_argument('--omega', type=float, default=1.0)
    measure_cmd = commands.add_parser(
        'verify-measure', parents=[common], help='moments of a measure case'
    )
    measure_cmd.add_argument(
        '--case', required=True, choices=[kind.value for kind in MeasureKind]
    )
    measure_cmd.add_argument('--params', type=parse_params, default={})
    measure_cmd.add_argument('--nmoments', type=int, default=8)
    wave_cmd = commands.add_parser(
        'wavefunction', parents=[common], help='eigenfunction or wavepacket on a grid'
    )
    wave_cmd.add_argument('--n', type=int, default=0)
    wave_cmd.add_argument('--packet', action='store_true')
    wave_cmd.add_argument('--grid', type=parse_grid)
    grid_cmd = commands.add_parser(
        'evolve-grid', parents=[common], help='Crank-Nicolson propagation of a wavepacket'
    )
    grid_cmd.add_argument('--t', type=float, default=0.0)
    grid_cmd.add_argument('--dt', type=float, default=1e-3)
    grid_cmd.add_argument('--grid', type=parse_grid)
    report_cmd = commands.add_parser('report', parents=[common], help='acceptance suite')
    report_cmd.add_argument('--only', action='append', choices=list(GROUPS))
    report_cmd.add_argument(
        '--faulty-case', choices=[kind.value for kind in MeasureKind]
    )
    return parser


def configure_logging() -> None:
    name = os.environ.get(LOG_ENV, 'warn').lower()
    level = LOG_LEVELS.get(name, logging.WARNING)
    logging.basicConfig(
        stream=sys.stderr, level=level,
        format='%(levelname)s %(name)s: %(message)s', force=True
    )
    if name not in LOG_LEVELS:
        logger.warning('Unknown %s=%s, using warn', LOG_ENV, name)


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Run configuration from --config when given, else from the flags.

    :param args: Parsed arguments
    :type args: argparse.Namespace
    :return: Run configuration
    :rtype: RunConfig
    """
    if args.config:
        return load_run_config(args.config, {
            'z': _pair(args.z), 'alpha': args.alpha, 'nmax': args.nmax,
            'tol': args.tol, 'output': args.output, 'out_path': args.out,
        })
    variant = ZVariant.parse(args.zfunc)
    c = None
    if variant is ZVariant.CONST:
        c = args.zconst
    elif variant is ZVariant.SS_RAMANUJAN:
        c = args.cram
    family = FamilyConfig(
        args.family, args.a1, args.beta, args.gamma, args.delta, args.lam,
        args.q, args.rscale
    )
    zspec = ZSpec(variant, args.alpha, c, args.sigma)
    return RunConfig(
        family, zspec, args.z, args.nmax, args.tol, args.output, args.out
    )


def _pair(value: complex) -> list[float]:
    return [value.real, value.imag]


def _state_output(rc: RunConfig, s: CoherentState) -> Output:
    levels = np.arange(len(s.c))
    rows = np.column_stack([levels, s.c.real, s.c.imag, np.abs(s.c) ** 2])
    return Output({'run': rc.to_dict(), 'state': s.to_dict()}, 'n,re,im,abs2', rows)


def _grid_output(rc: RunConfig, f: GridFn) -> Output:
    grid = f.grid
    values = f.values
    data = {
        'run': rc.to_dict(),
        'grid': {'xmin': grid.xmin, 'xmax': grid.xmax, 'npoints': grid.npoints},
        'values': [_pair(value) for value in values],
    }
    rows = np.column_stack([grid.x, values.real, values.imag, np.abs(values) ** 2])
    return Output(data, 'x,re,im,abs2', rows)


def _grid(rc: RunConfig, spec: tuple[float, float, int] | None) -> Grid:
    if spec is None:
        return default_grid(rc.family)
    return Grid(*spec)


'''Subcommands'''


def cmd_spectrum(rc: RunConfig, args: argparse.Namespace) -> Output:
    table = build_spectral_table(rc.family, rc.nmax)
    levels = np.arange(1, rc.nmax + 1)
    r_seq = table.r_seq
    energies = table.e[1:]
    products = np.exp(table.ln_p[1:])
    data = {
        'run': rc.to_dict(),
        'spectrum': [
            {'n': int(n), 'R': float(r), 'e': float(e), 'P': float(p)}
            for n, r, e, p in zip(levels, r_seq, energies, products)
        ],
    }
    return Output(data, 'n,R,e,P', np.column_stack([levels, r_seq, energies, products]))


def cmd_coeffs(rc: RunConfig, args: argparse.Namespace) -> Output:
    records = []
    rows = []
    for n in range(rc.nmax + 1):
        product = z_product_direct(rc.zspec, rc.family, n)
        h = hn(rc.family, rc.zspec, n)
        records.append({
            'n': n, 'zprod_abs': abs(product), 'zprod_arg': cmath.phase(product),
            'h': _pair(h),
        })
        rows.append([n, abs(product), cmath.phase(product), h.real, h.imag])
    return Output(
        {'run': rc.to_dict(), 'coeffs': records},
        'n,zprod_abs,zprod_arg,h_re,h_im', np.array(rows)
    )


def cmd_state(rc: RunConfig, args: argparse.Namespace) -> Output:
    return _state_output(rc, build_state(rc.family, rc.zspec, rc.z, rc.nmax))


def cmd_overlap(rc: RunConfig, args: argparse.Namespace) -> Output:
    s1 = build_state(rc.family, rc.zspec, rc.z, rc.nmax)
    s2 = build_state(rc.family, rc.zspec, args.z2, rc.nmax)
    value = overlap(s1, s2)
    closed = overlap_closed(s1, s2)
    data = {
        'run': rc.to_dict(),
        'z2': _pair(complex(args.z2)),
        'overlap': _pair(value),
        'abs': abs(value),
        'closed': None if closed is None else _pair(closed),
    }
    closed_row = [np.nan, np.nan] if closed is None else [closed.real, closed.imag]
    rows = np.array([[value.real, value.imag, abs(value), *closed_row]])
    return Output(data, 're,im,abs,closed_re,closed_im', rows)


def cmd_evolve(rc: RunConfig, args: argparse.Namespace) -> Output:
    s = evolve(build_state(rc.family, rc.zspec, rc.z, rc.nmax), args.t, args.omega)
    evolved = RunConfig(
        rc.family, s.zs, rc.z, rc.nmax, rc.tol, rc.output, rc.out_path
    )
    return _state_output(evolved, s)


def cmd_action(rc: RunConfig, args: argparse.Namespace) -> Output:
    s = build_state(rc.family, rc.zspec, rc.z, rc.nmax)
    series, closed = energy_expectation(s)
    action = action_variable(s, args.omega)
    data = {
        'run': rc.to_dict(),
        'omega': args.omega,
        'energy': series,
        'energy_scalar': closed,
        'action': action,
    }
    row = [series, np.nan if closed is None else closed, action]
    return Output(data, 'energy,energy_scalar,action', np.array([row]))


def cmd_verify_measure(rc: RunConfig, args: argparse.Namespace) -> Output:
    mc = MeasureCase(args.case, args.params)
    cfg, zs = mc.paired_state()
    result = verify_moments(mc, cfg, zs, args.nmoments, rc.tol)
    rows = np.array([
        [
            row.n, np.nan if row.moment is None else row.moment,
            row.target, row.rel_err, int(row.passed),
        ]
        for row in result.rows
    ])
    code = EXIT_OK if result.passed else EXIT_VERIFICATION
    return Output(result.to_dict(), 'n,moment,target,rel_err,pass', rows, code)


def cmd_wavefunction(rc: RunConfig, args: argparse.Namespace) -> Output:
    grid = _grid(rc, args.grid)
    if args.packet:
        f = wavepacket(build_state(rc.family, rc.zspec, rc.z, rc.nmax), grid)
    else:
        f = eigenfunctions(rc.family, grid, args.n)[args.n]
    return _grid_output(rc, f)


def cmd_evolve_grid(rc: RunConfig, args: argparse.Namespace) -> Output:
    grid = _grid(rc, args.grid)
    f = wavepacket(build_state(rc.family, rc.zspec, rc.z, rc.nmax), grid)
    return _grid_output(rc, evolve_grid(rc.family, f, args.t, args.dt))


def cmd_report(rc: RunConfig, args: argparse.Namespace) -> Output:
    result = report(args.only, args.faulty_case)
    rows = np.array([
        [index, np.nan if c.metric is None else c.metric,
         np.nan if c.threshold is None else c.threshold, int(c.passed)]
        for index, c in enumerate(result.criteria)
    ])
    code = EXIT_OK if result.passed else EXIT_VERIFICATION
    return Output(result.to_dict(), 'index,metric,threshold,pass', rows, code)


COMMANDS = {
    'spectrum': cmd_spectrum,
    'coeffs': cmd_coeffs,
    'state': cmd_state,
    'overlap': cmd_overlap,
    'evolve': cmd_evolve,
    'action': cmd_action,
    'verify-measure': cmd_verify_measure,
    'wavefunction': cmd_wavefunction,
    'evolve-grid': cmd_evolve_grid,
    'report': cmd_report,
}


def write_output(output: Output, fmt: str, command: str, stream: TextIO) -> None:
    """
    Write JSON with sorted keys and a meta block, or CSV with 17 significant
     digits.

    :param output: Command result
    :type output: Output
    :param fmt: json or csv
    :type fmt: str
    :param command: Subcommand name, recorded in the meta block
    :type command: str
    :param stream: Destination
    :type stream: TextIO
    """
    if fmt == 'csv':
        np.savetxt(
            stream, np.atleast_2d(output.rows), fmt=CSV_FORMAT, delimiter=',',
            header=output.header, comments=''
        )
        return
    document = dict(output.data)
    document['meta'] = {
        'command': command,
        'created': datetime.now(timezone.utc).isoformat(),
    }
    stream.write(json.dumps(document, sort_keys=True, indent=2) + '\n')


def run(argv: list[str] | None = None) -> int:
    """
    Command line entry point.

    :param argv: Arguments without the program name, sys.argv[1:] when None
    :type argv: list[str] | None
    :return: 0 on success, 1 on usage or config errors, 2 on numerical
     non-convergence, 3 on verification failure
    :rtype: int
    """
    configure_logging()
    try:
        args = build_parser().parse_args(
            attach_signed_values(sys.argv[1:] if argv is None else list(argv))
        )
        rc = run_config_from_args(args)
        output = COMMANDS[args.command](rc, args)
        if rc.out_path:
            with open(rc.out_path, 'w', newline='\n') as out_file:
                write_output(output, rc.output, args.command, out_file)
        else:
            write_output(output, rc.output, args.command, sys.stdout)
        return output.code
    except NUMERICAL_EXCEPTIONS as error:
        logger.error(str(error).strip())
        return EXIT_NUMERICAL
    except AbstractShapeInvariantStatesException as error:
        logger.error(str(error).strip())
        return EXIT_USAGE
    except OSError as error:
        logger.error('Error: %s', error)
        return EXIT_USAGE
    except SystemExit as error:
        return EXIT_OK if error.code in (None, 0) else EXIT_USAGE


if __name__ == '__main__':
    sys.exit(run())
