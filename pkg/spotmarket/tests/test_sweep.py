import math

import numpy as np
import pandas as pd
import pytest

from common import REFERENCE, QuietTestCase
from spotmarket.sweep import (
    SweepSpec, format_frame, format_table, format_value, frame_csv, run_sweep, sweep_columns, sweep_row
)
from spotmarket.util import UsageError, inclusive_range


def strictly_increasing(xs):
    return all(b > a for a, b in zip(xs, xs[1:]))


class TestSweepSpec(QuietTestCase):

    def test_values_inclusive(self):
        assert SweepSpec('q_s', 10, 50, 10).values() == [10, 20, 30, 40, 50]
        assert inclusive_range(0.3, 0.5, 0.1) == [0.3, 0.4, 0.5]

    def test_params_at(self):
        spec = SweepSpec('gamma_s', 0.3, 0.5, 0.1, q_s=20.0)
        p = spec.params_at(0.4)
        assert (p.q_o, p.q_s, p.gamma_o, p.gamma_s) == (100.0, 20.0, 0.2, 0.4)

    def test_empty_range(self):
        with pytest.raises(UsageError):
            SweepSpec('q_s', 50, 10, 10)

    def test_non_positive_step(self):
        with pytest.raises(UsageError):
            SweepSpec('q_s', 10, 50, 0)

    def test_qs_outside_market(self):
        with pytest.raises(UsageError):
            SweepSpec('q_s', 50, 100, 10)

    def test_unknown_variable(self):
        with pytest.raises(UsageError):
            SweepSpec('q_o', 10, 50, 10)  # type: ignore


class TestSweepDirections(QuietTestCase):

    def test_qs_sweep(self):
        for gamma_s in (0.3, 0.5):
            df = run_sweep(SweepSpec('q_s', 10, 50, 10, gamma_s=gamma_s))
            assert list(df.columns) == sweep_columns('q_s')
            assert df['c1'].all()
            for col in ('p_o', 'p_s', 'share_s', 'pi'):
                assert strictly_increasing(list(df[col])), (gamma_s, col)
            assert strictly_increasing(list(-df['share_o']))
            assert (df['pi'] > 5.0).all()
            assert (df['pi_baseline'] == 5.0).all()
            assert (df['revenue_gain'] > 0).all()

    def test_gamma_sweep(self):
        df = run_sweep(SweepSpec('gamma_s', 0.25, 0.5, 0.05))
        assert list(df['gamma_s']) == pytest.approx([0.25, 0.3, 0.35, 0.4, 0.45, 0.5])
        assert df['c1'].all()

    def test_reference_row(self):
        row = sweep_row(REFERENCE, 'q_s')
        assert row['c1'] is True
        assert row['pi'] == pytest.approx(5.534, abs=1e-3)
        assert row['revenue_gain'] == pytest.approx(5.534 / 5.0 - 1, abs=1e-3)


class TestInfeasiblePoints(QuietTestCase):

    def test_row_kept_and_flagged(self):
        df = run_sweep(SweepSpec('q_s', 70, 90, 20, gamma_s=0.3))
        assert list(df['c1']) == [True, False]
        assert math.isnan(df['p_o'].iloc[1])
        assert df['pi_baseline'].iloc[1] == 5.0

    def test_csv_blanks(self):
        text = frame_csv(run_sweep(SweepSpec('q_s', 70, 90, 20, gamma_s=0.3)))
        header, first, second = text.strip().splitlines()
        cols = header.split(',')
        assert cols == sweep_columns('q_s')
        fields = dict(zip(cols, second.split(',')))
        assert fields['c1'] == 'false'
        assert fields['p_o'] == '' and fields['agg_u_total'] == '' and fields['revenue_gain'] == ''
        assert float(fields['pi_baseline']) == 5.0
        assert dict(zip(cols, first.split(',')))['c1'] == 'true'

    def test_csv_stable(self):
        spec = SweepSpec('q_s', 10, 50, 10)
        assert frame_csv(run_sweep(spec)) == frame_csv(run_sweep(spec))


class TestFormatting(QuietTestCase):

    def test_format_value(self):
        assert format_value(True) == 'true'
        assert format_value(float('nan')) == ''
        assert format_value(55.33596837944664) == '55.336'
        assert format_value(3) == '3'
        assert format_value('ilp') == 'ilp'

    def test_format_table(self):
        text = format_table([('p_o', 55.33596837944664), ('within_capacity', True)])
        lines = text.splitlines()
        assert lines[0].split() == ['p_o', '55.336']
        assert lines[1].split() == ['within_capacity', 'true']
        assert lines[0].index('55') == lines[1].index('true')

    def test_format_frame(self):
        df = pd.DataFrame({'q_s': [10.0, 20.0], 'c1': [True, False], 'pi': [5.1234567, np.nan]})
        lines = format_frame(df).splitlines()
        assert lines[0].split() == ['q_s', 'c1', 'pi']
        assert lines[1].split() == ['10', 'true', '5.12346']
        assert lines[2].split() == ['20', 'false']

    def test_frame_csv_full_precision(self):
        df = pd.DataFrame({'x': [1 / 3], 'ok': [True]})
        assert frame_csv(df) == f'x,ok\n{1 / 3!r},true\n'
