"""
Command-line interface: parameter derivation, single inversions, convergence
sweeps and contour dumps. Tables are written as CSV, log messages go to stderr.

Exit codes: 0 on success, 1 on usage errors, 2 on numerical failures.
"""

import argparse
import contextlib
import logging
import os
import sys
import warnings

from pathlib import Path

import numpy as np

from ._check import check_n_range, check_node_count, check_roundoff_policy
from .errors import CertificationError, TalbotError
from .params import LITERATURE_RATES, derive_rational, optimize_alpha
from .problems import HEAT_SEED, get_problem
from .quadrature import convergence_sweep, difference_sweep, invert, resolve_contour
from .roundoff import (
    BASE_CONTOURS, MIN_N_STAR, UNIT_ROUNDOFF, RoundoffModel, calibrate, detect_Nstar
)
from .utils import fit_rate, logger, relative_error


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2

OUTPUT_DIR_VARIABLE = 'TALBOTINV_OUTPUT_DIR'

# Node counts used to calibrate the roundoff model with --roundoff-control auto
CALIBRATION_RANGE = (10, 60)

PUBLISHED = {
    'cotangent': {
        'alpha': (0.6407, 5e-4),
        'c': (1.3580, 5e-4),
        'sigma': (0.6122, 1e-3),
        'mu': (0.5017, 1e-3),
        'nu': (0.2645, 1e-3),
        'x_s': (3.4208, 1e-3),
        'y_s': (-2.3438, 1e-3),
    },
    'rational': {
        'a': (0.1446, 5e-3),
        'b': (3.0232, 5e-3),
        'd': (3.0767, 5e-3),
        'e': (0.2339, 5e-3),
        'c': (1.311, 5e-3),
    },
}


class _ArgumentParser(argparse.ArgumentParser):
    """Argument parser that exits with EXIT_USAGE on invalid arguments."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def _node_count(value):
    try:
        return check_node_count(int(value))
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err))


def _positive_float(value):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _build_parser():
    parser = _ArgumentParser(
        prog='talbotinv',
        description='Numerical inversion of Laplace transforms on the Talbot contour.'
    )
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='Increase the verbosity of the log (-v: INFO, -vv: DEBUG).')
    subparsers = parser.add_subparsers(dest='command', required=True)

    contour_options = _ArgumentParser(add_help=False)
    contour_options.add_argument('--contour', choices=list(BASE_CONTOURS),
                                 default='cotangent', help='The contour family.')

    problem_options = _ArgumentParser(add_help=False)
    problem_options.add_argument('problem', choices=['f1', 'f2', 'f3', 'heat'],
                                 help='The transform to invert.')
    problem_options.add_argument('--lambda', dest='lam', type=_positive_float,
                                 default=1.0, help='lambda of F1 (default: 1).')
    problem_options.add_argument('--c', type=_positive_float, default=0.4,
                                 help='c of F3 (default: 0.4).')
    problem_options.add_argument('--r', type=float, default=0.5,
                                 help='r of F3 (default: 0.5).')
    problem_options.add_argument('--m', type=_node_count, default=20,
                                 help='Grid points per dimension of the heat problem (default: 20).')
    problem_options.add_argument('--seed', type=int, default=HEAT_SEED,
                                 help='Seed of the initial condition of the heat problem.')
    problem_options.add_argument('--t', type=_positive_float, default=1.0,
                                 help='The time at which the inverse is evaluated (default: 1).')
    problem_options.add_argument('--roundoff-control', default='k0=1',
                                 help="'off', 'auto' or 'k0=<value>[,from=<N>]' (default: k0=1).")

    derive = subparsers.add_parser('derive-params', help='Derive the optimal contour coefficients.')
    derive.add_argument('kind', nargs='?', choices=list(BASE_CONTOURS), default='cotangent')
    derive.set_defaults(func=cmd_derive_params)

    inv = subparsers.add_parser('invert', parents=[problem_options, contour_options],
                                help='Invert a transform for one value of N.')
    inv.add_argument('--N', type=_node_count, required=True, help='The number of nodes.')
    inv.set_defaults(func=cmd_invert)

    sweep = subparsers.add_parser('sweep', parents=[problem_options, contour_options],
                                  help='Relative errors for a range of N (CSV).')
    sweep.add_argument('--N-start', dest='n_start', type=_node_count, default=6)
    sweep.add_argument('--N-stop', dest='n_stop', type=_node_count, default=60)
    sweep.add_argument('--N-step', dest='n_step', type=_node_count, default=1)
    sweep.add_argument('--output', default='-',
                       help=f"Output file, '-' for stdout. Relative paths are "
                            f"resolved in ${OUTPUT_DIR_VARIABLE} if set.")
    sweep.set_defaults(func=cmd_sweep)

    dump = subparsers.add_parser('dump-contour', parents=[contour_options],
                                 help='Nodes of the contour and the accuracy cutoff (CSV).')
    dump.add_argument('--N', type=_node_count, default=24, help='The number of nodes.')
    dump.add_argument('--t', type=_positive_float, default=1.0, help='The time.')
    dump.add_argument('--output', default='-', help="Output file, '-' for stdout.")
    dump.set_defaults(func=cmd_dump_contour)

    return parser


@contextlib.contextmanager
def _open_output(path):
    if path == '-':
        yield sys.stdout
        return

    path = Path(path)
    if not path.is_absolute():
        path = Path(os.environ.get(OUTPUT_DIR_VARIABLE, '.')) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        yield f
    logger.info(f'Saved {path}')


def _problem(args):
    mode, k0, _ = check_roundoff_policy(args.roundoff_control)
    reference_k0 = {'off': 1.0, 'auto': 'auto', 'fixed': k0}[mode]
    return get_problem(args.problem, lam=args.lam, c=args.c, r=args.r, m=args.m,
                       random_state=args.seed, k0=reference_k0)


def _param_source(args, entry, reference, Ns):
    mode, k0, n_from = check_roundoff_policy(args.roundoff_control)
    if mode == 'off':
        return BASE_CONTOURS[args.contour]

    if mode == 'fixed':
        N_star = None if n_from is None else max(MIN_N_STAR, n_from - 1)
        model = RoundoffModel(k0=k0, N_star=N_star, kind=args.contour)
        if model.N_star >= max(Ns):
            warnings.warn(f"The stabilized parameters are only used for N > "
                          f"{model.N_star}, which is outside of the requested "
                          f"range of N", UserWarning)
        return model

    return calibrate(entry.transform, args.t, Ns, reference=reference, kind=args.contour)


def _describe(contour):
    return 'nan' if contour.c is None else f'{contour.c:.16e}'


def cmd_derive_params(args):
    """Derive the optimal coefficients and compare them with the published ones."""
    if args.kind == 'cotangent':
        solution = optimize_alpha()
        contour = solution.contour
        derived = {
            'alpha': solution.shape, 'c': solution.c,
            'sigma': contour.sigma, 'mu': contour.mu, 'nu': contour.nu,
            'x_s': solution.x_s, 'y_s': solution.y_s,
        }
        formula = (f'zeta(theta) = {-contour.sigma:.4f} + {contour.mu:.4f} theta '
                   f'cot({contour.alpha:.4f} theta) + {contour.nu:.4f} i theta')
    else:
        solution = derive_rational()
        contour = solution.contour
        derived = {
            'a': contour.a, 'b': contour.b, 'd': contour.d, 'e': contour.e,
            'c': solution.c,
        }
        formula = (f'zeta(theta) = {contour.a:.4f} + {contour.b:.4f} theta^2 / '
                   f'(theta^2 - {contour.d:.4f} pi^2) + {contour.e:.4f} i theta')

    matches = True
    lines = [f'contour: {args.kind}']
    for name, value in derived.items():
        published, tol = PUBLISHED[args.kind][name]
        ok = abs(value - published) <= tol
        matches &= ok
        lines.append(f'{name:>5} = {value:.4f}  (published {published:.4f}, '
                     f'{"ok" if ok else "MISMATCH"})')

    lines.append(formula)
    lines.append(f'saddle points: +/-{solution.x_s:.4f} {solution.y_s:+.4f}i')
    lines.append(f'predicted error: O(exp(-{solution.c:.4f} N))')
    lines.append('decay rates of other contours:')
    for name, rate in LITERATURE_RATES.items():
        lines.append(f'  {name:<28} {rate:.3f}')
    lines.append(f'matches published constants: {"yes" if matches else "no"}')
    print('\n'.join(lines))

    if not matches:
        logger.error('The derived constants do not match the published ones')
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_invert(args):
    """Invert one problem for one N and report the error."""
    entry = _problem(args)
    reference = entry.reference(args.t)
    Ns = list(range(CALIBRATION_RANGE[0], CALIBRATION_RANGE[1] + 1))
    contour = resolve_contour(_param_source(args, entry, reference, Ns), args.N)
    result = invert(entry.transform, contour, args.N, args.t)

    value = np.atleast_1d(result.value)
    lines = [
        f'problem: {entry.transform.name}',
        f'contour: {contour.kind} (c = {_describe(contour)})',
        f'N = {result.N}, t = {result.t:g}, evaluations = {result.n_evaluations}',
    ]
    if value.size == 1:
        lines.append(f'value = {value[0]:.16e}')
        lines.append(f'reference = {float(reference):.16e}')
    else:
        lines.append(f'max|value| = {np.max(np.abs(value)):.16e}')
        lines.append(f'max|reference| = {np.max(np.abs(reference)):.16e}')
    lines.append(f'relative_error = {relative_error(value, reference):.16e}')
    print('\n'.join(lines))
    return EXIT_OK


def _sweep_errors(args, entry, Ns):
    try:
        reference = entry.reference(args.t)
    except CertificationError as err:
        warnings.warn(f"No certified reference is available ({err}), the "
                      f"relative_error column holds the differences between "
                      f"consecutive approximations", UserWarning)
        source = _param_source(args, entry, None, Ns)
        extended = Ns + [Ns[-1] + args.n_step]
        return source, difference_sweep(entry.transform, args.t, extended, source)

    source = _param_source(args, entry, reference, Ns)
    return source, convergence_sweep(entry.transform, reference, args.t, Ns, source)


def cmd_sweep(args):
    """Write the relative error for a range of N as CSV."""
    Ns = check_n_range(args.n_start, args.n_stop, args.n_step)
    entry = _problem(args)
    source, errors = _sweep_errors(args, entry, Ns)

    rows = []
    for N, error in errors:
        try:
            contour = resolve_contour(source, N)
            rows.append((N, error, contour.c, contour.zeta0))
        except TalbotError:
            rows.append((N, error, np.nan, np.nan))
    rows = np.array(rows, dtype=float)

    try:
        N_turn = detect_Nstar(errors)
        before = rows[:, 0] <= N_turn
        rate = fit_rate(rows[before, 0], rows[before, 1])
        logger.info(f'The error levels off at N={N_turn}, fitted rate '
                    f'{rate:.4f} before')
    except (TalbotError, ValueError) as err:
        logger.info(f'No critical node count in the requested range: {err}')

    with _open_output(args.output) as f:
        np.savetxt(f, rows, fmt=['%d', '%.16e', '%.16e', '%.16e'], delimiter=',',
                   header='N,relative_error,c_used,zeta0_used', comments='')
    return EXIT_OK


def cmd_dump_contour(args):
    """Write the nodes of the contour and the accuracy cutoff line as CSV."""
    contour = BASE_CONTOURS[args.contour]
    node_set = contour.nodes(args.N, args.t)
    table = np.column_stack([node_set.thetas, node_set.z.real, node_set.z.imag,
                             node_set.dz.real, node_set.dz.imag])

    # exp(z t) drops below the unit roundoff to the left of this line
    cutoff_imag = np.linspace(node_set.z.imag.min(), node_set.z.imag.max(), 25)
    cutoff = np.column_stack([np.full_like(cutoff_imag, np.log(UNIT_ROUNDOFF) / args.t),
                              cutoff_imag])

    with _open_output(args.output) as f:
        np.savetxt(f, table, fmt='%.16e', delimiter=',',
                   header='theta,Re_z,Im_z,Re_dz,Im_dz', comments='')
        f.write('\n')
        np.savetxt(f, cutoff, fmt='%.16e', delimiter=',',
                   header='Re_z,Im_z', comments='')
    return EXIT_OK


def _configure_logging(verbose):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    logger.setLevel(level)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        return args.func(args)
    except (TalbotError, np.linalg.LinAlgError) as err:
        print(f'talbotinv: numerical failure: {err}', file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as err:
        print(f'talbotinv: error: {err}', file=sys.stderr)
        return EXIT_USAGE
