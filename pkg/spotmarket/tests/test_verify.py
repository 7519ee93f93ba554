import numpy as np
import pytest

from common import REFERENCE, QuietTestCase
from spotmarket.equilibrium import draw_c1_params, equilibrium
from spotmarket.util import UsageError
from spotmarket.verify import (
    CheckResult, check_gradient, check_ilp, check_price_ordering, check_stationarity, faulty_equilibrium,
    run_verification
)


class TestCheckResult(QuietTestCase):

    def test_keeps_first_counterexample(self):
        res = CheckResult('demo')
        res.record(True, 'a')
        res.record(False, 'b')
        res.record(False, 'c')
        assert (res.passed, res.failed, res.counterexample) == (1, 2, 'b')
        assert not res.ok


class TestSuite(QuietTestCase):

    def test_small_run_passes(self):
        report = run_verification(7, 5)
        assert report.ok, report.summary()
        assert report.failed == 0
        assert report.passed > 0
        assert len(report.checks) == 10

    def test_summary_lists_every_check(self):
        report = run_verification(3, 2)
        lines = report.summary().splitlines()
        assert len(lines) == len(report.checks) + 1
        assert lines[-1] == f'total: {report.passed} passed, 0 failed'

    def test_deterministic(self):
        assert run_verification(11, 3).summary() == run_verification(11, 3).summary()

    def test_needs_draws(self):
        with pytest.raises(UsageError):
            run_verification(7, 0)

    def test_ilp_check(self):
        res = check_ilp(np.random.default_rng(5), 25)
        assert res.ok and res.passed == 25


class TestInjectedFault(QuietTestCase):

    def test_fault_changes_on_demand_price(self):
        assert faulty_equilibrium(REFERENCE).prices.p_o > equilibrium(REFERENCE).prices.p_o
        assert faulty_equilibrium(REFERENCE).prices.p_s == equilibrium(REFERENCE).prices.p_s

    def test_suite_catches_fault(self):
        report = run_verification(7, 3, equilibrium_fn=faulty_equilibrium)
        assert not report.ok
        assert 'counterexample' in report.summary()

    def test_individual_checks_catch_fault(self):
        draws = draw_c1_params(np.random.default_rng(7), 5)
        assert not check_stationarity(draws, faulty_equilibrium).ok
        assert not check_gradient(draws, faulty_equilibrium).ok
        assert check_price_ordering(draws, equilibrium).ok
