import pytest
import numpy as np
from hypothesis import given, settings
import hypothesis.strategies as st

from common import REFERENCE, QuietTestCase
from spotmarket.market import (
    Customer, Interval, MarketParams, MarketShares, PriceVector, ServiceChoice,
    best_response, check_c0, customer_utility, market_shares, per_unit_utility, resource_load, revenue,
    revenue_surface, selection_thresholds, within_capacity
)
from spotmarket.util import InvalidParameterError


class TestTypes(QuietTestCase):

    def test_params_reject_equal_qos(self):
        with pytest.raises(InvalidParameterError, match='q_o == q_s'):
            MarketParams(50.0, 50.0, 0.2, 0.3)

    def test_params_reject_inverted_qos(self):
        with pytest.raises(InvalidParameterError):
            MarketParams(30.0, 50.0, 0.2, 0.3)

    def test_params_reject_nonpositive_gamma(self):
        with pytest.raises(InvalidParameterError):
            MarketParams(100.0, 30.0, 0.0, 0.3)

    def test_params_reject_nan(self):
        with pytest.raises(InvalidParameterError):
            MarketParams(float('nan'), 30.0, 0.2, 0.3)

    def test_eta(self):
        assert REFERENCE.eta == pytest.approx(0.7)

    def test_scaled_qos(self):
        scaled = REFERENCE.scaled_qos(2.0)
        assert (scaled.q_o, scaled.q_s) == (200.0, 60.0)
        assert (scaled.gamma_o, scaled.gamma_s) == (REFERENCE.gamma_o, REFERENCE.gamma_s)

    def test_negative_price(self):
        with pytest.raises(InvalidParameterError):
            PriceVector(-1.0, 2.0)

    def test_customer_theta_range(self):
        with pytest.raises(InvalidParameterError):
            Customer(1.5)

    def test_interval_contains(self):
        i = Interval(0.2, 0.5)
        assert not i.contains(0.2)
        assert i.contains(0.5)
        assert Interval(0.0, 0.2, closed_lower=True).contains(0.0)

    def test_shares_must_partition(self):
        with pytest.raises(InvalidParameterError):
            MarketShares(Interval(0, 0.2, True), Interval(0.2, 0.5), Interval(0.6, 1.0))


class TestSelection(QuietTestCase):

    def test_utility(self):
        prices = PriceVector(50.0, 10.0)
        c = Customer(0.6, 2.0)
        assert customer_utility(c, ServiceChoice.ON_DEMAND, REFERENCE, prices) == pytest.approx(20.0)
        assert customer_utility(c, ServiceChoice.SPOT, REFERENCE, prices) == pytest.approx(16.0)
        assert customer_utility(c, ServiceChoice.NONE, REFERENCE, prices) == 0.0

    def test_utility_can_be_negative(self):
        assert customer_utility(Customer(0.1), ServiceChoice.ON_DEMAND, REFERENCE, PriceVector(50.0, 10.0)) < 0

    def test_c0(self):
        assert check_c0(REFERENCE, PriceVector(50.0, 10.0))
        assert not check_c0(REFERENCE, PriceVector(50.0, 15.0))

    def test_thresholds(self):
        b_ns, b_so = selection_thresholds(REFERENCE, PriceVector(50.0, 12.0))
        assert b_ns == pytest.approx(0.4)
        assert b_so == pytest.approx(38.0 / 70.0)

    def test_thresholds_without_c0(self):
        b_ns, b_so = selection_thresholds(REFERENCE, PriceVector(50.0, 20.0))
        assert b_ns == b_so == pytest.approx(0.5)

    def test_thresholds_clamped(self):
        b_ns, b_so = selection_thresholds(REFERENCE, PriceVector(99.0, 1.0))
        assert 0 <= b_ns <= b_so <= 1

    def test_best_response_bands(self):
        prices = PriceVector(50.0, 12.0)
        assert best_response(0.0, REFERENCE, prices) == ServiceChoice.NONE
        assert best_response(0.3, REFERENCE, prices) == ServiceChoice.NONE
        assert best_response(0.5, REFERENCE, prices) == ServiceChoice.SPOT
        assert best_response(0.9, REFERENCE, prices) == ServiceChoice.ON_DEMAND

    def test_best_response_at_thresholds_takes_lower_service(self):
        prices = PriceVector(50.0, 12.0)
        b_ns, b_so = selection_thresholds(REFERENCE, prices)
        assert best_response(b_ns, REFERENCE, prices) == ServiceChoice.NONE
        assert best_response(b_so, REFERENCE, prices) == ServiceChoice.SPOT

    def test_best_response_without_c0(self):
        prices = PriceVector(50.0, 20.0)
        assert best_response(0.5, REFERENCE, prices) == ServiceChoice.NONE
        assert best_response(0.51, REFERENCE, prices) == ServiceChoice.ON_DEMAND

    def test_best_response_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            best_response(-0.1, REFERENCE, PriceVector(50.0, 12.0))

    def test_market_shares(self):
        shares = market_shares(REFERENCE, PriceVector(50.0, 12.0))
        assert shares.theta_n.length == pytest.approx(0.4)
        assert shares.theta_o.length == pytest.approx(1 - 38.0 / 70.0)
        assert shares.choice_of(0.0) == ServiceChoice.NONE
        assert shares.choice_of(0.45) == ServiceChoice.SPOT

    def test_revenue(self):
        rev = revenue(REFERENCE, PriceVector(50.0, 12.0))
        shares = market_shares(REFERENCE, PriceVector(50.0, 12.0))
        assert rev.pi_o == pytest.approx(50.0 * 0.2 * shares.theta_o.length)
        assert rev.pi_s == pytest.approx(12.0 * 0.5 * shares.theta_s.length)
        assert rev.pi_total == pytest.approx(rev.pi_o + rev.pi_s)

    def test_revenue_surface_matches_revenue(self):
        for p_o, p_s in [(50.0, 12.0), (55.0, 20.0), (0.0, 0.0), (100.0, 30.0), (80.0, 5.0)]:
            surface = revenue_surface(REFERENCE, p_o, p_s)
            assert float(surface) == pytest.approx(revenue(REFERENCE, PriceVector(p_o, p_s)).pi_total, abs=1e-12)

    def test_load_and_capacity(self):
        prices = PriceVector(50.0, 12.0)
        shares = market_shares(REFERENCE, prices)
        expected = 0.2 * shares.theta_o.length + 0.5 * shares.theta_s.length
        assert resource_load(REFERENCE, prices) == pytest.approx(expected)
        assert within_capacity(REFERENCE, prices)
        tight = MarketParams(100.0, 30.0, 0.2, 0.5, capacity=0.01)
        assert not within_capacity(tight, prices)

    def test_per_unit_utility(self):
        choice, u = per_unit_utility(0.9, REFERENCE, PriceVector(50.0, 12.0))
        assert choice == ServiceChoice.ON_DEMAND
        assert u == pytest.approx(40.0)
        assert per_unit_utility(0.1, REFERENCE, PriceVector(50.0, 12.0)) == (ServiceChoice.NONE, 0.0)

    def test_reference_equilibrium_examples(self):
        prices = PriceVector(55.336, 11.621)
        assert customer_utility(Customer(0.8), ServiceChoice.ON_DEMAND, REFERENCE, prices) == pytest.approx(24.664)
        assert customer_utility(Customer(0.5), ServiceChoice.SPOT, REFERENCE, prices) == pytest.approx(3.379)
        assert best_response(0.5, REFERENCE, prices) == ServiceChoice.SPOT
        assert best_response(0.7, REFERENCE, prices) == ServiceChoice.ON_DEMAND
        assert best_response(0.2, REFERENCE, prices) == ServiceChoice.NONE
        shares = market_shares(REFERENCE, prices)
        assert shares.theta_s.length == pytest.approx(0.2372, abs=1e-4)
        assert shares.theta_o.length == pytest.approx(0.3755, abs=1e-4)
        assert revenue(REFERENCE, prices).pi_total == pytest.approx(5.534, abs=1e-3)

    def test_free_prices_give_everyone_on_demand(self):
        prices = PriceVector(0.0, 0.0)
        shares = market_shares(REFERENCE, prices)
        assert (shares.theta_o.lower, shares.theta_o.upper, shares.theta_o.closed_lower) == (0.0, 1.0, False)
        assert shares.theta_s.empty
        assert best_response(0.5, REFERENCE, prices) == ServiceChoice.ON_DEMAND
        assert best_response(0.0, REFERENCE, prices) == ServiceChoice.NONE
        assert revenue(REFERENCE, prices).pi_total == 0.0

    def test_best_response_agrees_with_shares_on_fine_grid(self):
        prices = PriceVector(55.336, 11.621)
        shares = market_shares(REFERENCE, prices)
        for theta in np.linspace(0.0, 1.0, 100001):
            assert best_response(float(theta), REFERENCE, prices) == shares.choice_of(float(theta))


class TestSelectionProperties(object):

    @given(st.floats(0, 1), st.floats(0, 100), st.floats(0, 30))
    @settings(max_examples=300, deadline=None)
    def test_best_response_maximizes_utility(self, theta, p_o, p_s):
        prices = PriceVector(p_o, p_s)
        choice = best_response(theta, REFERENCE, prices)
        c = Customer(theta)
        best = max(customer_utility(c, a, REFERENCE, prices) for a in ServiceChoice)
        assert customer_utility(c, choice, REFERENCE, prices) >= best - 1e-9

    @given(st.floats(0, 100), st.floats(0, 30))
    @settings(max_examples=200, deadline=None)
    def test_shares_partition(self, p_o, p_s):
        shares = market_shares(REFERENCE, PriceVector(p_o, p_s))
        total = shares.theta_n.length + shares.theta_s.length + shares.theta_o.length
        assert total == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(0, 100), st.floats(0, 30), st.lists(st.floats(0, 1), min_size=1, max_size=50))
    @settings(max_examples=200, deadline=None)
    def test_every_theta_lands_in_its_chosen_share(self, p_o, p_s, thetas):
        prices = PriceVector(p_o, p_s)
        shares = market_shares(REFERENCE, prices)
        for theta in thetas:
            choice = best_response(theta, REFERENCE, prices)
            assert [a for a in ServiceChoice if shares.interval(a).contains(theta)] == [choice]
