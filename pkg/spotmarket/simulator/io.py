import io as _io
import re
from typing import Dict, List, Optional, Sequence, Tuple
import pandas as pd

from spotmarket.constants import ALGORITHMS, OUTPUT_COLUMNS, TRACE_COLUMNS
from spotmarket.util import InvalidParameterError, setup_logger
from .cluster import (
    InstanceKind, InstanceRequest, PricingMode, PricingPolicy, SimulationConfig, SlotRecord, ThresholdPolicy
)

logger = setup_logger(__name__)


class TraceFormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f'trace line {line}: {msg}')
        self.line = line


class ConfigFormatError(ValueError):
    def __init__(self, line: Optional[int], key: Optional[str], msg: str):
        where = f'config line {line}' if line is not None else 'config'
        super().__init__(f'{where}: {msg}')
        self.line = line
        self.key = key


# #####################################
# Traces

def _parse_int(v: str, name: str, line: int) -> int:
    try:
        out = int(v)
    except ValueError:
        raise TraceFormatError(line, f'{name} must be an integer, received: "{v}"')
    return out


def _parse_float(v: str, name: str, line: int) -> float:
    try:
        return float(v)
    except ValueError:
        raise TraceFormatError(line, f'{name} must be a number, received: "{v}"')


def trace_from_frame(df: pd.DataFrame, lines: Optional[Sequence[int]] = None) -> List[InstanceRequest]:
    """
    Requests from a frame of string cells with the trace columns

    :param lines: file line of the header followed by the file line of each row; defaults to a file
        with no blank or comment lines
    """
    if lines is None:
        lines = range(1, len(df) + 2)
    if list(df.columns) != TRACE_COLUMNS:
        raise TraceFormatError(lines[0], f'header must be {",".join(TRACE_COLUMNS)}, received: {",".join(map(str, df.columns))}')

    requests = []
    for k, row in enumerate(df.itertuples(index=False)):
        line = lines[k + 1]
        slot_s, kind_s, cpu_s, ram_s, bid_s, lifetime_s = [str(v).strip() for v in row]
        if kind_s not in ('od', 'spot'):
            raise TraceFormatError(line, f'kind must be "od" or "spot", received: "{kind_s}"')
        kind = InstanceKind(kind_s)
        if kind == InstanceKind.ON_DEMAND and bid_s != '':
            raise TraceFormatError(line, 'on-demand rows must leave bid empty')
        if kind == InstanceKind.SPOT and bid_s == '':
            raise TraceFormatError(line, 'spot rows need a bid')
        try:
            requests.append(InstanceRequest(
                request_id=k,
                arrival_slot=_parse_int(slot_s, 'slot', line),
                kind=kind,
                cpu_demand=_parse_float(cpu_s, 'cpu', line),
                ram_demand=_parse_float(ram_s, 'ram', line),
                max_bid=_parse_float(bid_s, 'bid', line) if bid_s != '' else None,
                lifetime=_parse_int(lifetime_s, 'lifetime', line) if lifetime_s != '' else None))
        except InvalidParameterError as e:
            raise TraceFormatError(line, str(e))
    return requests


def _data_lines(text: str) -> Tuple[str, List[int]]:
    """
    Trace text without blank and `#` comment lines, plus the file line of each line kept
    """
    kept, numbers = [], []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if raw.strip() == '' or raw.lstrip().startswith('#'):
            continue
        kept.append(raw)
        numbers.append(line_no)
    return '\n'.join(kept) + '\n', numbers


def read_trace(path: str) -> List[InstanceRequest]:
    """
    Parse a CSV trace with header slot,kind,cpu,ram,bid,lifetime; empty bid for on-demand, empty lifetime for open-ended

    Blank lines and lines starting with `#` are skipped; errors report the line in the file.
    """
    with open(path, 'r') as f:
        text, lines = _data_lines(f.read())
    if not lines:
        raise TraceFormatError(1, 'empty trace file')
    try:
        df = pd.read_csv(_io.StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.ParserError as e:
        raise TraceFormatError(_file_line(_parser_error_line(str(e)), lines), f'malformed CSV: {e}')
    requests = trace_from_frame(df, lines)
    logger.debug('Read %s requests from %s', len(requests), path)
    return requests


def _file_line(parsed_line: int, lines: List[int]) -> int:
    return lines[parsed_line - 1] if 0 < parsed_line <= len(lines) else parsed_line


def _parser_error_line(msg: str) -> int:
    # pandas reports "Expected N fields in line L, saw M"
    m = re.search(r"line (\d+)", msg)
    return int(m.group(1)) if m else 1


# #####################################
# Config

REQUIRED_KEYS = [
    'nodes', 'cpu_capacity', 'ram_capacity', 'th_soft', 'th_hard', 'on_demand_price', 'spot_floor', 'algorithm', 'seed'
]
OPTIONAL_KEYS = ['slots', 'output', 'auction']


def parse_config_text(text: str) -> Dict[str, Tuple[str, int]]:
    """
    Flat `key = value` (or `key: value`) lines, `#` comments; returns key -> (value, line)
    """
    entries: Dict[str, Tuple[str, int]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        sep = '=' if '=' in line else ':' if ':' in line else None
        if sep is None:
            raise ConfigFormatError(line_no, None, f'expected "key = value", received: "{raw.strip()}"')
        key, value = [s.strip() for s in line.split(sep, 1)]
        if key not in REQUIRED_KEYS + OPTIONAL_KEYS:
            raise ConfigFormatError(line_no, key, f'unknown key "{key}"')
        if key in entries:
            raise ConfigFormatError(line_no, key, f'duplicate key "{key}"')
        entries[key] = (value, line_no)
    return entries


def config_from_entries(entries: Dict[str, Tuple[str, int]], overrides: Optional[Dict[str, object]] = None) -> SimulationConfig:
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    for key in REQUIRED_KEYS:
        if key not in entries and key not in overrides:
            raise ConfigFormatError(None, key, f'missing required key "{key}"')

    def get(key: str, cast):
        if key in overrides:
            return overrides[key]
        value, line = entries[key]
        try:
            return cast(value)
        except ValueError:
            raise ConfigFormatError(line, key, f'invalid value for "{key}": "{value}"')

    def line_of(key: str) -> Optional[int]:
        return entries[key][1] if key in entries else None

    algorithm = get('algorithm', str)
    if algorithm not in ALGORITHMS:
        raise ConfigFormatError(line_of('algorithm'), 'algorithm',
                                f'algorithm must be one of {", ".join(ALGORITHMS)}, received: "{algorithm}"')
    auction = get('auction', str) if 'auction' in entries or 'auction' in overrides else 'on'
    if auction not in ('on', 'off'):
        raise ConfigFormatError(line_of('auction'), 'auction', f'auction must be "on" or "off", received: "{auction}"')

    try:
        thresholds = ThresholdPolicy(get('th_soft', float), get('th_hard', float))
    except InvalidParameterError as e:
        raise ConfigFormatError(line_of('th_soft'), 'th_soft', str(e))
    try:
        pricing = PricingPolicy(
            get('on_demand_price', float), get('spot_floor', float),
            PricingMode.AUCTION if auction == 'on' else PricingMode.FIXED_FLOOR)
    except InvalidParameterError as e:
        raise ConfigFormatError(line_of('spot_floor'), 'spot_floor', str(e))
    try:
        return SimulationConfig(
            nodes=get('nodes', int),
            cpu_capacity=get('cpu_capacity', float),
            ram_capacity=get('ram_capacity', float),
            thresholds=thresholds,
            pricing=pricing,
            algorithm=algorithm,
            seed=get('seed', int),
            slots=get('slots', int) if 'slots' in entries or 'slots' in overrides else None,
            output=get('output', str) if 'output' in entries or 'output' in overrides else None)
    except InvalidParameterError as e:
        raise ConfigFormatError(None, None, str(e))


def read_config(path: str, overrides: Optional[Dict[str, object]] = None) -> SimulationConfig:
    """
    :param overrides: values taking precedence over the file, e.g. from command-line flags; None entries are ignored
    """
    with open(path, 'r') as f:
        text = f.read()
    return config_from_entries(parse_config_text(text), overrides)


# #####################################
# Output

def records_frame(records: List[SlotRecord]) -> pd.DataFrame:
    return pd.DataFrame(
        [[r.slot, r.avg_cpu, r.avg_ram, r.spot_price, r.revenue, r.cum_revenue, r.evictions, r.rejections]
         for r in records],
        columns=OUTPUT_COLUMNS)


def records_csv(records: List[SlotRecord]) -> str:
    buf = _io.StringIO()
    records_frame(records).to_csv(buf, index=False)
    return buf.getvalue()


def write_records(records: List[SlotRecord], path: str) -> None:
    with open(path, 'w', newline='') as f:
        f.write(records_csv(records))
    logger.debug('Wrote %s slot records to %s', len(records), path)
