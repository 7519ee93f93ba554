import dataclasses
import os
import tempfile
from functools import lru_cache

import numpy as np
import pandas as pd
import pytest

from common import QuietTestCase, data_path, od, spot
from spotmarket.constants import OUTPUT_COLUMNS
from spotmarket.simulator import (
    ConfigFormatError, InstanceKind, InstanceStatus, PricingMode, SimulationComplete, SimulationConfig,
    SimulatorState, ThresholdPolicy, TraceFormatError, config_from_entries, hard_threshold_respected,
    parse_config_text, read_config, read_trace, records_csv, records_frame, run, step, trace_from_frame
)


@lru_cache(maxsize=None)
def mixed_records(algorithm):
    config = dataclasses.replace(read_config(data_path('mixed-load.conf')), algorithm=algorithm)
    return tuple(run(config, read_trace(data_path('mixed-load.csv'))))


@lru_cache(maxsize=None)
def sixty_slot_records(algorithm):
    config = dataclasses.replace(read_config(data_path('sixty-slot.conf')), algorithm=algorithm)
    return tuple(run(config, read_trace(data_path('sixty-slot.csv'))))


@lru_cache(maxsize=None)
def adversarial_records(algorithm):
    config = dataclasses.replace(read_config(data_path('adversarial.conf')), algorithm=algorithm)
    return tuple(run(config, read_trace(data_path('adversarial.csv'))))


def small_config(**kwargs):
    opts = dict(nodes=2, cpu_capacity=100.0, ram_capacity=1000.0, thresholds=ThresholdPolicy(0.5, 0.7), seed=5)
    opts.update(kwargs)
    return SimulationConfig(**opts)


class TestStep(QuietTestCase):

    def test_empty_trace(self):
        records = run(small_config(slots=10), [])
        assert len(records) == 10
        for r in records:
            assert r.revenue == 0.0 and r.cum_revenue == 0.0
            assert r.avg_cpu == 0.0 and r.avg_ram == 0.0

    def test_complete_signal(self):
        sim = SimulatorState(small_config(slots=1), [])
        step(sim)
        with pytest.raises(SimulationComplete):
            step(sim)

    def test_horizon_defaults_to_last_arrival(self):
        records = run(small_config(), [od(0, 10, slot=3)])
        assert [r.slot for r in records] == [0, 1, 2, 3]

    def test_lifetime_completes(self):
        records = run(small_config(slots=4), [od(0, 10, lifetime=2)])
        assert [r.on_demand_running for r in records] == [1, 1, 0, 0]

    def test_revenue_accounting(self):
        trace = [od(0, 20), spot(1, 10, 5.0), spot(2, 10, 1.0, slot=1)]
        records = run(small_config(slots=3), trace)
        assert records[0].revenue == 10.0 + 3.0
        assert records[1].rejections == 1
        assert np.allclose(np.cumsum([r.revenue for r in records]), [r.cum_revenue for r in records])

    def test_auction_price_above_floor(self):
        # one node with room for a single spot instance under th_soft
        trace = [spot(0, 40, 8.0), spot(1, 40, 6.0)]
        records = run(small_config(nodes=1, slots=1), trace)
        assert records[0].spot_price == 6.0
        assert records[0].spot_running == 1
        assert records[0].rejections == 1

    def test_fixed_floor_mode(self):
        config = small_config(nodes=1, slots=1)
        config = dataclasses.replace(config, pricing=dataclasses.replace(config.pricing, mode=PricingMode.FIXED_FLOOR))
        records = run(config, [spot(0, 40, 8.0), spot(1, 40, 6.0)])
        assert records[0].spot_price == config.pricing.spot_floor
        assert records[0].spot_running == 1

    def test_spot_disabled(self):
        records = run(small_config(algorithm='none', slots=2), [od(0, 20), spot(1, 10, 5.0)])
        assert all(r.spot_running == 0 for r in records)
        assert records[0].rejections == 1

    def test_stranded_request(self):
        trace = [od(0, 40), od(1, 30), od(2, 30), od(3, 40)]
        heuristic = run(small_config(slots=1), trace)
        ilp = run(small_config(algorithm='ilp', slots=1), trace)
        assert heuristic[0].rejections == 1
        assert ilp[0].rejections == 0
        assert ilp[-1].cum_revenue > heuristic[-1].cum_revenue

    def test_on_demand_never_evicted(self):
        trace = read_trace(data_path('mixed-load.csv'))
        for algorithm in ('heuristic', 'ilp'):
            config = dataclasses.replace(read_config(data_path('mixed-load.conf')), algorithm=algorithm)
            sim = SimulatorState(config, trace)
            seen = []
            while sim.slot < sim.horizon:
                step(sim)
                seen += [i for node in sim.cluster for i in node.running if i.request.kind == InstanceKind.ON_DEMAND]
            assert seen
            assert all(i.status != InstanceStatus.EVICTED for i in seen)


class TestMixedLoadTrace(QuietTestCase):

    def test_hard_threshold_safety(self):
        for algorithm in ('heuristic', 'ilp', 'none'):
            for r in mixed_records(algorithm):
                assert hard_threshold_respected(r, 0.7)
                assert max(r.node_cpu) <= 1.0 and max(r.node_ram) <= 1.0

    def test_spot_raises_revenue(self):
        base = mixed_records('none')[-1].cum_revenue
        for algorithm in ('heuristic', 'ilp'):
            assert mixed_records(algorithm)[-1].cum_revenue >= 1.1 * base

    def test_cumulative_revenue_non_decreasing(self):
        for algorithm in ('heuristic', 'ilp', 'none'):
            cum = [r.cum_revenue for r in mixed_records(algorithm)]
            assert all(b >= a for a, b in zip(cum, cum[1:]))

    def test_deterministic(self):
        config = read_config(data_path('mixed-load.conf'))
        trace = read_trace(data_path('mixed-load.csv'))
        assert records_csv(run(config, trace)) == records_csv(run(config, trace))

    def test_seed_changes_workloads(self):
        config = read_config(data_path('mixed-load.conf'))
        trace = read_trace(data_path('mixed-load.csv'))
        other = dataclasses.replace(config, seed=config.seed + 1)
        assert records_csv(run(config, trace)) != records_csv(run(other, trace))


class TestAdversarialTrace(QuietTestCase):

    def test_heuristic_falls_below_no_spot(self):
        heuristic, none = adversarial_records('heuristic'), adversarial_records('none')
        assert any(h.cum_revenue < n.cum_revenue for h, n in zip(heuristic, none))

    def test_heuristic_rejects_last_on_demand(self):
        heuristic, none = adversarial_records('heuristic'), adversarial_records('none')
        assert heuristic[4].rejections == 1
        assert none[4].rejections == 0

    def test_safety(self):
        for algorithm in ('heuristic', 'ilp', 'none'):
            assert all(hard_threshold_respected(r, 0.7) for r in adversarial_records(algorithm))


class TestSixtySlotTrace(QuietTestCase):

    def test_full_horizon(self):
        for algorithm in ('heuristic', 'ilp', 'none'):
            records = sixty_slot_records(algorithm)
            assert [r.slot for r in records] == list(range(60))

    def test_hard_threshold_safety(self):
        for algorithm in ('heuristic', 'ilp', 'none'):
            assert all(hard_threshold_respected(r, 0.7) for r in sixty_slot_records(algorithm))

    def test_spot_raises_revenue(self):
        base = sixty_slot_records('none')[-1].cum_revenue
        for algorithm in ('heuristic', 'ilp'):
            assert sixty_slot_records(algorithm)[-1].cum_revenue > base

    def test_bid_below_floor_rejected(self):
        for algorithm in ('heuristic', 'ilp'):
            assert sixty_slot_records(algorithm)[28].rejections >= 1
            assert all(r.spot_price >= 3.0 for r in sixty_slot_records(algorithm))


class TestTraceIO(QuietTestCase):

    def write(self, text):
        fd, path = tempfile.mkstemp(suffix='.csv')
        with os.fdopen(fd, 'w') as f:
            f.write(text)
        self.addCleanup(os.remove, path)
        return path

    def test_bundled_trace(self):
        trace = read_trace(data_path('mixed-load.csv'))
        assert len(trace) == 12
        assert trace[2].kind == InstanceKind.SPOT and trace[2].max_bid == 6.0
        assert trace[9].lifetime == 12
        assert [r.request_id for r in trace] == list(range(12))

    def test_sixty_slot_trace(self):
        trace = read_trace(data_path('sixty-slot.csv'))
        assert len(trace) == 36
        assert [r.request_id for r in trace] == list(range(36))
        assert max(r.arrival_slot for r in trace) < 60
        assert trace[21].max_bid == 2.0 and trace[21].arrival_slot == 28
        assert trace[30].lifetime is None

    def test_bad_kind_line(self):
        path = self.write('slot,kind,cpu,ram,bid,lifetime\n0,od,1,1,,\n1,vm,1,1,,\n')
        with pytest.raises(TraceFormatError) as e:
            read_trace(path)
        assert e.value.line == 3
        assert 'trace line 3' in str(e.value)

    def test_on_demand_with_bid(self):
        path = self.write('slot,kind,cpu,ram,bid,lifetime\n0,od,1,1,4,\n')
        with pytest.raises(TraceFormatError) as e:
            read_trace(path)
        assert e.value.line == 2

    def test_spot_without_bid(self):
        path = self.write('slot,kind,cpu,ram,bid,lifetime\n0,od,1,1,,\n0,spot,1,1,,\n')
        with pytest.raises(TraceFormatError) as e:
            read_trace(path)
        assert e.value.line == 3

    def test_invalid_number(self):
        path = self.write('slot,kind,cpu,ram,bid,lifetime\nx,od,1,1,,\n')
        with pytest.raises(TraceFormatError, match='slot must be an integer'):
            read_trace(path)

    def test_type_invariant_violation(self):
        path = self.write('slot,kind,cpu,ram,bid,lifetime\n0,od,-1,1,,\n')
        with pytest.raises(TraceFormatError) as e:
            read_trace(path)
        assert e.value.line == 2

    def test_bad_header(self):
        path = self.write('slot,kind,cpu\n0,od,1\n')
        with pytest.raises(TraceFormatError) as e:
            read_trace(path)
        assert e.value.line == 1

    def test_empty_file(self):
        with pytest.raises(TraceFormatError):
            read_trace(self.write(''))

    def test_comment_and_blank_lines_keep_file_line(self):
        path = self.write('slot,kind,cpu,ram,bid,lifetime\n# arrivals\n\n0,od,1,1,,\n\n1,vm,1,1,,\n')
        with pytest.raises(TraceFormatError) as e:
            read_trace(path)
        assert e.value.line == 6

    def test_comment_before_header(self):
        path = self.write('# generated\nslot,kind,cpu\n0,od,1\n')
        with pytest.raises(TraceFormatError) as e:
            read_trace(path)
        assert e.value.line == 2

    def test_malformed_row_after_comment(self):
        path = self.write('slot,kind,cpu,ram,bid,lifetime\n# note\n0,od,1,1,,,,\n')
        with pytest.raises(TraceFormatError) as e:
            read_trace(path)
        assert e.value.line == 3

    def test_comments_skipped(self):
        path = self.write('# header next\nslot,kind,cpu,ram,bid,lifetime\n\n0,od,1,1,,\n  # spot\n1,spot,2,2,4.5,3\n')
        trace = read_trace(path)
        assert [(r.request_id, r.arrival_slot) for r in trace] == [(0, 0), (1, 1)]
        assert trace[1].max_bid == 4.5

    def test_only_comments(self):
        with pytest.raises(TraceFormatError) as e:
            read_trace(self.write('# nothing\n\n'))
        assert e.value.line == 1

    def test_from_frame(self):
        df = pd.DataFrame([['2', 'spot', '5', '10', '3.5', '4']], columns=['slot', 'kind', 'cpu', 'ram', 'bid', 'lifetime'])
        (req,) = trace_from_frame(df)
        assert (req.arrival_slot, req.max_bid, req.lifetime) == (2, 3.5, 4)


class TestConfigIO(QuietTestCase):

    TEXT = '\n'.join([
        '# cluster',
        'nodes = 2',
        'cpu_capacity = 100',
        'ram_capacity: 1000',
        'th_soft = 0.5',
        'th_hard = 0.7',
        'on_demand_price = 10',
        'spot_floor = 3',
        'algorithm = heuristic',
        'seed = 1',
    ])

    def test_parse(self):
        config = config_from_entries(parse_config_text(self.TEXT))
        assert config.nodes == 2
        assert config.ram_capacity == 1000.0
        assert config.pricing.mode == PricingMode.AUCTION
        assert config.slots is None

    def test_bundled_config(self):
        config = read_config(data_path('mixed-load.conf'))
        assert (config.nodes, config.seed, config.slots) == (3, 42, 20)

    def test_missing_key(self):
        text = '\n'.join(line for line in self.TEXT.splitlines() if not line.startswith('seed'))
        with pytest.raises(ConfigFormatError) as e:
            config_from_entries(parse_config_text(text))
        assert e.value.key == 'seed'
        assert 'seed' in str(e.value)

    def test_override_supplies_key(self):
        text = '\n'.join(line for line in self.TEXT.splitlines() if not line.startswith('seed'))
        config = config_from_entries(parse_config_text(text), {'seed': 9, 'algorithm': None})
        assert config.seed == 9
        assert config.algorithm == 'heuristic'

    def test_unknown_key(self):
        with pytest.raises(ConfigFormatError) as e:
            parse_config_text(self.TEXT + '\ncolor = blue')
        assert e.value.line == 11

    def test_duplicate_key(self):
        with pytest.raises(ConfigFormatError, match='duplicate'):
            parse_config_text(self.TEXT + '\nnodes = 3')

    def test_invalid_value(self):
        with pytest.raises(ConfigFormatError) as e:
            config_from_entries(parse_config_text(self.TEXT.replace('nodes = 2', 'nodes = two')))
        assert e.value.line == 2

    def test_invalid_thresholds(self):
        with pytest.raises(ConfigFormatError):
            config_from_entries(parse_config_text(self.TEXT.replace('th_hard = 0.7', 'th_hard = 0.4')))

    def test_unknown_algorithm(self):
        with pytest.raises(ConfigFormatError, match='algorithm'):
            config_from_entries(parse_config_text(self.TEXT.replace('heuristic', 'greedy')))

    def test_auction_off(self):
        config = config_from_entries(parse_config_text(self.TEXT + '\nauction = off'))
        assert config.pricing.mode == PricingMode.FIXED_FLOOR


class TestOutput(QuietTestCase):

    def test_frame_columns(self):
        df = records_frame(list(mixed_records('heuristic')))
        assert list(df.columns) == OUTPUT_COLUMNS
        assert len(df) == 20

    def test_written_csv(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, 'out.csv')
            config = read_config(data_path('mixed-load.conf'))
            records = run(config, read_trace(data_path('mixed-load.csv')), output=path)
            with open(path) as f:
                assert f.read() == records_csv(records)
