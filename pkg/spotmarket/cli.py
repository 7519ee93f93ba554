import argparse
import dataclasses
import sys
from typing import List, Optional, Sequence
import numpy as np
import pandas as pd

from spotmarket.constants import (
    ALGORITHMS, DRAW_SEED, EXIT_C1_INFEASIBLE, EXIT_DATA_FORMAT, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED
)
from spotmarket.equilibrium import (
    EquilibriumConditionError, baseline_aggregate_utility, equilibrium, equilibrium_spot_floor,
    on_demand_only_equilibrium, utility_profile
)
from spotmarket.ilp import ProblemSizeError
from spotmarket.market import MarketParams
from spotmarket.simulator import ConfigFormatError, TraceFormatError, read_config, read_trace, run
from spotmarket.sweep import SweepSpec, format_frame, format_table, frame_csv, run_sweep, sweep_columns, sweep_row
from spotmarket.util import InvalidParameterError, UsageError, set_verbose, setup_logger
from spotmarket.verify import faulty_equilibrium, run_verification
from spotmarket._version import __version__

logger = setup_logger(__name__)

DEFAULT_PROFILE_POINTS = 101


class CliParser(argparse.ArgumentParser):
    """ArgumentParser reporting usage errors with exit status 64"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def _market_flags(p: argparse.ArgumentParser, qs: float = 30.0, gs: float = 0.5) -> None:
    p.add_argument('--qo', type=float, default=100.0, help='on-demand QoS q_o')
    p.add_argument('--qs', type=float, default=qs, help='spot QoS q_s')
    p.add_argument('--go', type=float, default=0.2, help='on-demand average utilization gamma_o')
    p.add_argument('--gs', type=float, default=gs, help='spot average utilization gamma_s')


def build_parser() -> CliParser:
    parser = CliParser(prog='spotmarket', description='Spot and on-demand instance pricing: equilibrium, sweeps, simulation')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--verbose', action='store_true', help='debug logging')
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('equilibrium', help='equilibrium prices, shares, revenue and utilities')
    _market_flags(p)
    p.add_argument('--output', help='also write the equilibrium as a one-row CSV')

    p = sub.add_parser('sweep', help='equilibrium over a range of q_s or gamma_s, as CSV')
    p.add_argument('--vary', choices=['qs', 'gs'], required=True, help='swept parameter')
    p.add_argument('--start', type=float, required=True)
    p.add_argument('--stop', type=float, required=True)
    p.add_argument('--step', type=float, required=True)
    _market_flags(p, gs=0.3)
    p.add_argument('--output', help='CSV path; CSV goes to stdout when absent')

    p = sub.add_parser('profile', help='per-customer choice and utility per unit resource, as CSV')
    _market_flags(p)
    p.add_argument('--points', type=int, default=DEFAULT_PROFILE_POINTS, help='willingness-to-pay grid points on [0, 1]')
    p.add_argument('--output', help='CSV path; CSV goes to stdout when absent')

    p = sub.add_parser('simulate', help='run the cluster simulator over a request trace')
    p.add_argument('--config', required=True, help='key = value cluster configuration')
    p.add_argument('--trace', required=True, help='CSV trace slot,kind,cpu,ram,bid,lifetime')
    p.add_argument('--output', help='time-series CSV path, overrides the config')
    p.add_argument('--algorithm', choices=list(ALGORITHMS), help='overrides the config')
    p.add_argument('--seed', type=int, help='overrides the config')
    p.add_argument('--derive-floor', action='store_true',
                   help='spot floor from the equilibrium price ratio of --qo/--qs/--go/--gs')
    _market_flags(p)

    p = sub.add_parser('verify', help='closed forms against numeric oracles, solver against enumeration')
    p.add_argument('--seed', type=int, default=DRAW_SEED)
    p.add_argument('--draws', type=int, default=200)
    p.add_argument('--inject-fault', action='store_true', help=argparse.SUPPRESS)

    return parser


def _params(args: argparse.Namespace) -> MarketParams:
    return MarketParams(args.qo, args.qs, args.go, args.gs)


def _write(path: str, text: str) -> None:
    with open(path, 'w', newline='') as f:
        f.write(text)


# #####################################
# Commands

def cmd_equilibrium(args: argparse.Namespace) -> int:
    params = _params(args)
    eq = equilibrium(params)
    base = on_demand_only_equilibrium(params)
    base_u = baseline_aggregate_utility(params)
    print(format_table([
        ('p_o', eq.prices.p_o),
        ('p_s', eq.prices.p_s),
        ('share_o', eq.shares.theta_o.length),
        ('share_s', eq.shares.theta_s.length),
        ('boundary_none_spot', eq.boundaries[0]),
        ('boundary_spot_od', eq.boundaries[1]),
        ('pi_o', eq.revenue_o),
        ('pi_s', eq.revenue_s),
        ('pi', eq.revenue_total),
        ('agg_u_o', eq.agg_utility_o),
        ('agg_u_s', eq.agg_utility_s),
        ('agg_u_total', eq.agg_utility_total),
        ('load', eq.load),
        ('within_capacity', eq.within_capacity),
        ('p_baseline', base.price),
        ('share_baseline', base.share_length),
        ('pi_baseline', base.revenue),
        ('agg_u_baseline', base_u),
        ('delta_p_o', eq.prices.p_o - base.price),
        ('delta_pi', eq.revenue_total - base.revenue),
        ('delta_agg_u', eq.agg_utility_total - base_u),
    ]))
    if args.output:
        _write(args.output, frame_csv(pd.DataFrame([sweep_row(params, 'q_s')], columns=sweep_columns('q_s'))))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = SweepSpec(
        vary='q_s' if args.vary == 'qs' else 'gamma_s',
        start=args.start, stop=args.stop, step=args.step,
        q_o=args.qo, gamma_o=args.go, q_s=args.qs, gamma_s=args.gs)
    df = run_sweep(spec)
    if args.output:
        _write(args.output, frame_csv(df))
        print(format_frame(df))
    else:
        sys.stdout.write(frame_csv(df))
    return EXIT_OK


def cmd_profile(args: argparse.Namespace) -> int:
    if args.points < 2:
        raise UsageError(f'Profile needs at least 2 points, received: {args.points}')
    df = utility_profile(_params(args), np.linspace(0.0, 1.0, args.points))
    if args.output:
        _write(args.output, frame_csv(df))
    else:
        sys.stdout.write(frame_csv(df))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = read_config(args.config, {'algorithm': args.algorithm, 'seed': args.seed, 'output': args.output})
    if args.derive_floor:
        floor = equilibrium_spot_floor(_params(args), config.pricing.on_demand_price)
        logger.debug('Derived spot floor %s', floor)
        config = dataclasses.replace(config, pricing=dataclasses.replace(config.pricing, spot_floor=floor))
    trace = read_trace(args.trace)
    records = run(config, trace)

    print(format_table([
        ('algorithm', config.algorithm),
        ('slots', len(records)),
        ('cum_revenue', records[-1].cum_revenue if records else 0.0),
        ('mean_cpu', float(np.mean([r.avg_cpu for r in records])) if records else 0.0),
        ('mean_ram', float(np.mean([r.avg_ram for r in records])) if records else 0.0),
        ('evictions', sum(r.evictions for r in records)),
        ('rejections', sum(r.rejections for r in records)),
    ]))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_verification(
        args.seed, args.draws,
        equilibrium_fn=faulty_equilibrium if args.inject_fault else equilibrium)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_VERIFY_FAILED


COMMANDS = {
    'equilibrium': cmd_equilibrium,
    'sweep': cmd_sweep,
    'profile': cmd_profile,
    'simulate': cmd_simulate,
    'verify': cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.verbose:
        set_verbose(True)

    try:
        return COMMANDS[args.command](args)
    except EquilibriumConditionError as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_C1_INFEASIBLE
    except (TraceFormatError, ConfigFormatError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_DATA_FORMAT
    except FileNotFoundError as e:
        print(f'error: no such file: {e.filename}', file=sys.stderr)
        return EXIT_DATA_FORMAT
    except ProblemSizeError as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_VERIFY_FAILED
    except (InvalidParameterError, UsageError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_USAGE


def run_cli(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
