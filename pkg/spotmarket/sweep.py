"""
Equilibrium parameter sweeps

One row per swept value of q_s or gamma_s with the equilibrium prices, shares, revenues and aggregate
utilities next to the on-demand-only baseline. Points outside C1 keep their row with c1=false and
blank equilibrium columns.
"""
import io
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple
from typing_extensions import Literal
import pandas as pd

from spotmarket.equilibrium import (
    baseline_aggregate_utility, c1_violation, equilibrium, on_demand_only_equilibrium
)
from spotmarket.market import MarketParams
from spotmarket.constants import TABLE_SIGNIFICANT_DIGITS
from spotmarket.util import UsageError, inclusive_range, setup_logger, significant

logger = setup_logger(__name__)

SweepVariable = Literal['q_s', 'gamma_s']

EQUILIBRIUM_COLUMNS = [
    'p_o', 'p_s', 'share_o', 'share_s', 'pi_o', 'pi_s', 'pi',
]
BASELINE_COLUMNS = ['pi_baseline']
UTILITY_COLUMNS = ['agg_u_o', 'agg_u_s', 'agg_u_total']


def sweep_columns(vary: SweepVariable) -> List[str]:
    return (
        [vary, 'c1'] + EQUILIBRIUM_COLUMNS + BASELINE_COLUMNS + UTILITY_COLUMNS
        + ['agg_u_baseline', 'revenue_gain']
    )


@dataclass(frozen=True)
class SweepSpec:
    """
    :param vary: swept parameter, 'q_s' or 'gamma_s'
    :param start: first swept value
    :param stop: last swept value, inclusive
    :param step: spacing, > 0
    :param q_o: fixed on-demand QoS
    :param gamma_o: fixed on-demand utilization
    :param q_s: fixed spot QoS when sweeping gamma_s
    :param gamma_s: fixed spot utilization when sweeping q_s
    """
    vary: SweepVariable
    start: float
    stop: float
    step: float
    q_o: float = 100.0
    gamma_o: float = 0.2
    q_s: float = 30.0
    gamma_s: float = 0.3

    def __post_init__(self):
        if self.vary not in ('q_s', 'gamma_s'):
            raise UsageError(f'Sweep variable must be q_s or gamma_s, received: "{self.vary}"')
        if not self.step > 0:
            raise UsageError(f'Sweep step must be positive, received: {self.step}')
        if self.stop < self.start:
            raise UsageError(f'Empty sweep range: start {self.start} > stop {self.stop}')
        for v in self.values():
            if self.vary == 'q_s' and not 0 < v < self.q_o:
                raise UsageError(f'Swept q_s must lie in (0, q_o={self.q_o}), received: {v}')
            if self.vary == 'gamma_s' and not v > 0:
                raise UsageError(f'Swept gamma_s must be positive, received: {v}')

    def values(self) -> List[float]:
        return inclusive_range(self.start, self.stop, self.step)

    def params_at(self, v: float) -> MarketParams:
        if self.vary == 'q_s':
            return MarketParams(self.q_o, v, self.gamma_o, self.gamma_s)
        return MarketParams(self.q_o, self.q_s, self.gamma_o, v)


def sweep_row(params: MarketParams, vary: SweepVariable) -> Dict[str, object]:
    base = on_demand_only_equilibrium(params)
    base_u = baseline_aggregate_utility(params)
    row: Dict[str, object] = {
        vary: getattr(params, vary),
        'pi_baseline': base.revenue,
        'agg_u_baseline': base_u,
    }

    err = c1_violation(params)
    if err is not None:
        logger.warning('Sweep point %s=%s outside C1: %s', vary, row[vary], err)
        row['c1'] = False
        for col in EQUILIBRIUM_COLUMNS + UTILITY_COLUMNS + ['revenue_gain']:
            row[col] = math.nan
        return row

    eq = equilibrium(params)
    row.update({
        'c1': True,
        'p_o': eq.prices.p_o,
        'p_s': eq.prices.p_s,
        'share_o': eq.shares.theta_o.length,
        'share_s': eq.shares.theta_s.length,
        'pi_o': eq.revenue_o,
        'pi_s': eq.revenue_s,
        'pi': eq.revenue_total,
        'agg_u_o': eq.agg_utility_o,
        'agg_u_s': eq.agg_utility_s,
        'agg_u_total': eq.agg_utility_total,
        'revenue_gain': eq.revenue_total / base.revenue - 1.0,
    })
    return row


def run_sweep(spec: SweepSpec) -> pd.DataFrame:
    rows = [sweep_row(spec.params_at(v), spec.vary) for v in spec.values()]
    logger.debug('Swept %s over %s points', spec.vary, len(rows))
    return pd.DataFrame(rows, columns=sweep_columns(spec.vary))


def frame_csv(df: pd.DataFrame) -> str:
    """
    Full-precision CSV; booleans as true/false, missing values blank
    """
    out = df.copy()
    for col in out.columns:
        if out[col].dtype == bool:
            out[col] = out[col].map({True: 'true', False: 'false'})
    buf = io.StringIO()
    out.to_csv(buf, index=False, na_rep='')
    return buf.getvalue()


# #####################################
# Console tables

def format_value(v: object, digits: int = TABLE_SIGNIFICANT_DIGITS) -> str:
    if isinstance(v, bool):
        return 'true' if v else 'false'
    if isinstance(v, float):
        return '' if math.isnan(v) else significant(v, digits)
    return str(v)


def format_table(rows: List[Tuple[str, object]], digits: int = TABLE_SIGNIFICANT_DIGITS) -> str:
    """
    Two-column label/value table, labels left-aligned
    """
    width = max([len(label) for label, _ in rows], default=0)
    return '\n'.join(f'{label.ljust(width)}  {format_value(v, digits)}' for label, v in rows)


def format_frame(df: pd.DataFrame, digits: int = TABLE_SIGNIFICANT_DIGITS, limit: Optional[int] = None) -> str:
    cells = [[format_value(v.item() if hasattr(v, 'item') else v, digits) for v in row]
             for row in df.itertuples(index=False)]
    if limit is not None:
        cells = cells[:limit]
    header = [str(c) for c in df.columns]
    widths = [max([len(header[j])] + [len(r[j]) for r in cells]) for j in range(len(header))]
    lines = ['  '.join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ['  '.join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return '\n'.join(lines)
