"""
Executable property suite behind `spotmarket verify`

Every check runs over seeded random parameterizations with an interior equilibrium and compares
the closed forms against the independent numeric oracles.
"""
import dataclasses
from dataclasses import dataclass, field
from typing import Callable, List, Optional
import numpy as np

from spotmarket.constants import ORACLE_PRICE_TOLERANCE, ORACLE_REVENUE_RTOL
from spotmarket.equilibrium import (
    EquilibriumOutcome, compare_markets, denominator, draw_c1_params, equilibrium, equilibrium_revenue,
    first_order_residuals, gradient_step, hessian_check, numeric_aggregate_utilities, numeric_baseline_argmax,
    numeric_revenue, numeric_revenue_argmax, oracle_grid_step, revenue_gradient, revenue_grid_step
)
from spotmarket.ilp import random_problem, solve, solve_exhaustive
from spotmarket.market import MarketParams, PriceVector, check_c0, revenue
from spotmarket.util import InvalidParameterError, UsageError, setup_logger

logger = setup_logger(__name__)

EquilibriumFn = Callable[[MarketParams], EquilibriumOutcome]

BASELINE_GRID_STEP = 1e-3
BASELINE_DRAWS = 20
UTILITY_DRAWS = 50
UTILITY_RTOL = 1e-6
# utilities this small relative to gamma * q are compared in absolute terms
UTILITY_FLOOR = 1e-6
GRADIENT_RTOL = 1e-6
STATIONARITY_RTOL = 1e-10
SCALE_FACTOR = 2.5
SCALE_RTOL = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: int = 0
    failed: int = 0
    counterexample: Optional[str] = None

    def record(self, ok: bool, detail: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.counterexample is None:
                self.counterexample = detail

    @property
    def ok(self) -> bool:
        return self.failed == 0


@dataclass
class VerifyReport:
    seed: int
    draws: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return sum(c.failed for c in self.checks)

    def summary(self) -> str:
        lines = [f'{c.name}: {c.passed} passed, {c.failed} failed' for c in self.checks]
        lines.append(f'total: {self.passed} passed, {self.failed} failed')
        for c in self.checks:
            if c.counterexample is not None:
                lines.append(f'counterexample ({c.name}): {c.counterexample}')
        return '\n'.join(lines)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def faulty_equilibrium(params: MarketParams) -> EquilibriumOutcome:
    """
    Equilibrium with a flipped sign in the on-demand price numerator, for exercising the suite itself
    """
    eq = equilibrium(params)
    d = denominator(params)
    p_o = 2 * params.gamma_o * params.gamma_s * params.q_o * (params.q_o + params.q_s) / d
    return dataclasses.replace(eq, prices=PriceVector(p_o, eq.prices.p_s))


# #####################################
# Checks on the market model

def check_oracle_equivalence(draws: List[MarketParams], equilibrium_fn: EquilibriumFn) -> CheckResult:
    res = CheckResult('oracle equivalence')
    for params in draws:
        eq = equilibrium_fn(params)
        step = oracle_grid_step(params)
        grid = numeric_revenue_argmax(params, step)
        at_grid = revenue(params, grid).pi_total
        if not at_grid > 0:
            res.record(False, f'{params}: grid maximizer {grid} earns no revenue')
            continue
        fine = revenue_grid_step(params, at_grid)
        if fine < step:
            step = fine
            grid = numeric_revenue_argmax(params, step)
            at_grid = revenue(params, grid).pi_total
        target = equilibrium_revenue(params)
        prices_ok = (
            abs(grid.p_o - eq.prices.p_o) <= ORACLE_PRICE_TOLERANCE
            and abs(grid.p_s - eq.prices.p_s) <= ORACLE_PRICE_TOLERANCE
        )
        integrated = numeric_revenue(params, eq.prices)
        revenue_ok = (
            _rel(at_grid, target) <= ORACLE_REVENUE_RTOL
            and _rel(integrated, eq.revenue_total) <= ORACLE_REVENUE_RTOL
        )
        res.record(prices_ok and revenue_ok,
                   f'{params}: closed form {eq.prices} revenue {target}, '
                   f'grid {grid} (step {step}) revenue {at_grid}, integrated revenue at closed form {integrated}')
    return res


def check_baseline(draws: List[MarketParams]) -> CheckResult:
    res = CheckResult('on-demand-only baseline')
    for params in draws[:BASELINE_DRAWS]:
        p = numeric_baseline_argmax(params, BASELINE_GRID_STEP)
        res.record(abs(p - params.q_o / 2) <= BASELINE_GRID_STEP, f'{params}: grid price {p}, expected {params.q_o / 2}')
    return res


def check_market_comparison(draws: List[MarketParams]) -> CheckResult:
    res = CheckResult('spot market vs on-demand only')
    for params in draws:
        report = compare_markets(params)
        res.record(report.all_hold, f'{params}: {report}')
    return res


def utilities_close(numeric: float, exact: float, unit: float) -> bool:
    """
    Relative agreement within UTILITY_RTOL, measured against at least UTILITY_FLOOR * unit
    """
    return abs(numeric - exact) <= UTILITY_RTOL * max(abs(exact), UTILITY_FLOOR * unit)


def check_aggregate_utilities(draws: List[MarketParams], equilibrium_fn: EquilibriumFn) -> CheckResult:
    res = CheckResult('aggregate utilities')
    for params in draws[:UTILITY_DRAWS]:
        eq = equilibrium_fn(params)
        num_o, num_s = numeric_aggregate_utilities(params, eq.prices)
        ok = (
            utilities_close(num_o, eq.agg_utility_o, params.gamma_o * params.q_o)
            and utilities_close(num_s, eq.agg_utility_s, params.gamma_s * params.q_s)
        )
        res.record(ok, f'{params}: closed form ({eq.agg_utility_o}, {eq.agg_utility_s}), numeric ({num_o}, {num_s})')
    return res


def check_price_ordering(draws: List[MarketParams], equilibrium_fn: EquilibriumFn) -> CheckResult:
    res = CheckResult('C0 at equilibrium')
    for params in draws:
        eq = equilibrium_fn(params)
        d = denominator(params)
        res.record(check_c0(params, eq.prices) and d > 0, f'{params}: prices {eq.prices}, D={d}')
    return res


def check_gradient(draws: List[MarketParams], equilibrium_fn: EquilibriumFn) -> CheckResult:
    res = CheckResult('revenue gradient')
    for params in draws:
        eq = equilibrium_fn(params)
        try:
            h = gradient_step(params, eq.prices)
        except InvalidParameterError as e:
            res.record(False, f'{params}: {e}')
            continue
        g = revenue_gradient(params, eq.prices, h)
        pi = revenue(params, eq.prices).pi_total
        res.record(float(np.linalg.norm(g)) <= GRADIENT_RTOL * abs(pi), f'{params}: gradient {g} at {eq.prices}')
    return res


def check_stationarity(draws: List[MarketParams], equilibrium_fn: EquilibriumFn) -> CheckResult:
    res = CheckResult('stationarity identities')
    for params in draws:
        eq = equilibrium_fn(params)
        r_s, r_o = first_order_residuals(params, eq.prices)
        res.record(max(r_s, r_o) <= STATIONARITY_RTOL, f'{params}: residuals ({r_s}, {r_o}) at {eq.prices}')
    return res


def check_concavity(draws: List[MarketParams], equilibrium_fn: EquilibriumFn) -> CheckResult:
    res = CheckResult('revenue concavity')
    for params in draws:
        eq = equilibrium_fn(params)
        report = hessian_check(params, eq.prices)
        res.record(report.negative_definite and report.finite_difference_ok is not False, f'{params}: {report}')
    return res


def check_scale_covariance(draws: List[MarketParams]) -> CheckResult:
    res = CheckResult('QoS scale covariance')
    k = SCALE_FACTOR
    for params in draws:
        eq, scaled = equilibrium(params), equilibrium(params.scaled_qos(k))
        ok = (
            _rel(scaled.prices.p_o, k * eq.prices.p_o) <= SCALE_RTOL
            and _rel(scaled.prices.p_s, k * eq.prices.p_s) <= SCALE_RTOL
            and _rel(scaled.revenue_total, k * eq.revenue_total) <= SCALE_RTOL
            and abs(scaled.boundaries[0] - eq.boundaries[0]) <= SCALE_RTOL
            and abs(scaled.boundaries[1] - eq.boundaries[1]) <= SCALE_RTOL
        )
        res.record(ok, f'{params} scaled by {k}: {scaled.prices} vs {eq.prices}')
    return res


# #####################################
# Checks on the solver

def check_ilp(rng: np.random.Generator, count: int) -> CheckResult:
    res = CheckResult('ilp vs enumeration')
    for _ in range(count):
        p = random_problem(rng)
        bb, ex = solve(p), solve_exhaustive(p)
        ok = bb.status == ex.status and (not ex.optimal or bb.assignment == ex.assignment)
        res.record(ok, f'c={p.c.tolist()}, A={p.A.tolist()}, b={p.b.tolist()}: '
                       f'branch and bound {bb.assignment} {bb.status.value}, enumeration {ex.assignment} {ex.status.value}')
    return res


def run_verification(seed: int, draws: int, equilibrium_fn: EquilibriumFn = equilibrium) -> VerifyReport:
    """
    :param draws: parameterizations per market check and random instances for the solver check, >= 1
    :param equilibrium_fn: closed form under test; checks built on independent oracles compare against it
    """
    if draws < 1:
        raise UsageError(f'Verification needs at least one draw, received: {draws}')

    rng = np.random.default_rng(seed)
    params = draw_c1_params(rng, draws)
    report = VerifyReport(seed, draws)
    report.checks = [
        check_oracle_equivalence(params, equilibrium_fn),
        check_baseline(params),
        check_market_comparison(params),
        check_aggregate_utilities(params, equilibrium_fn),
        check_price_ordering(params, equilibrium_fn),
        check_gradient(params, equilibrium_fn),
        check_stationarity(params, equilibrium_fn),
        check_concavity(params, equilibrium_fn),
        check_scale_covariance(params),
        check_ilp(rng, draws),
    ]
    for c in report.checks:
        logger.debug('%s: %s passed, %s failed', c.name, c.passed, c.failed)
    return report
