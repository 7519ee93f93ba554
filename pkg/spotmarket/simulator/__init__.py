from .cluster import (
    InstanceKind, InstanceStatus, PricingMode,
    InstanceRequest, InstanceState, NodeState, ThresholdPolicy, PricingPolicy, SimulationConfig,
    PlacementPlan, SlotRecord, apply_plan, eviction_order
)
from .auction import clear_spot_auction, clear_spot_price, first_fit_spot
from .heuristic import heuristic_provision
from .ilp_provisioning import ilp_provision, ProvisioningModel
from .engine import SimulatorState, SimulationComplete, step, run, hard_threshold_respected
from .io import (
    TraceFormatError, ConfigFormatError,
    read_trace, trace_from_frame, read_config, parse_config_text, config_from_entries,
    records_frame, records_csv, write_records
)
