from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from spotmarket.constants import (
    ALGORITHMS, ALGORITHM_HEURISTIC, DEFAULT_ON_DEMAND_PRICE, DEFAULT_SPOT_FLOOR, DEFAULT_TH_HARD, DEFAULT_TH_SOFT,
    FEASIBILITY_TOLERANCE
)
from spotmarket.util import InvalidParameterError, check


class InstanceKind(Enum):
    ON_DEMAND = 'od'
    SPOT = 'spot'


class InstanceStatus(Enum):
    RUNNING = 'running'
    EVICTED = 'evicted'
    COMPLETED = 'completed'


class PricingMode(Enum):
    FIXED_FLOOR = 'fixed'
    AUCTION = 'auction'


@dataclass(frozen=True)
class InstanceRequest:
    """
    One row of a request trace

    :param max_bid: spot only, currency per slot
    :param lifetime: slots the instance runs once placed, None for open-ended
    """
    request_id: int
    arrival_slot: int
    kind: InstanceKind
    cpu_demand: float
    ram_demand: float
    max_bid: Optional[float] = None
    lifetime: Optional[int] = None

    def __post_init__(self):
        check(self.cpu_demand > 0 and self.ram_demand > 0,
              f'Request {self.request_id}: demands must be positive, received cpu={self.cpu_demand}, ram={self.ram_demand}')
        check(self.arrival_slot >= 0, f'Request {self.request_id}: arrival slot must be >= 0')
        if self.kind == InstanceKind.SPOT:
            check(self.max_bid is not None and self.max_bid >= 0,
                  f'Spot request {self.request_id} needs a non-negative bid, received: {self.max_bid}')
        else:
            check(self.max_bid is None, f'On-demand request {self.request_id} cannot carry a bid')
        check(self.lifetime is None or self.lifetime >= 1,
              f'Request {self.request_id}: lifetime must be >= 1 slot, received: {self.lifetime}')

    @property
    def is_spot(self) -> bool:
        return self.kind == InstanceKind.SPOT

    def demand(self, resource: str) -> float:
        return self.cpu_demand if resource == 'cpu' else self.ram_demand


@dataclass
class InstanceState:
    request: InstanceRequest
    node_id: int
    start_slot: int
    workload_cpu: float
    workload_ram: float
    status: InstanceStatus = InstanceStatus.RUNNING

    @property
    def is_spot(self) -> bool:
        return self.request.is_spot

    @property
    def bid(self) -> float:
        return self.request.max_bid if self.request.max_bid is not None else 0.0

    def reserved(self, resource: str) -> float:
        return self.request.demand(resource)


RESOURCES = ('cpu', 'ram')


def eviction_order(instances: List[InstanceState]) -> List[InstanceState]:
    """
    Spot instances in the order they get reclaimed: lowest bid first, then youngest
    """
    return sorted(
        [i for i in instances if i.is_spot],
        key=lambda i: (i.bid, -i.start_slot, -i.request.request_id))


@dataclass
class NodeState:
    node_id: int
    cpu_capacity: float
    ram_capacity: float
    running: List[InstanceState] = field(default_factory=list)

    def __post_init__(self):
        check(self.cpu_capacity > 0 and self.ram_capacity > 0,
              f'Node {self.node_id}: capacities must be positive')

    def capacity(self, resource: str) -> float:
        return self.cpu_capacity if resource == 'cpu' else self.ram_capacity

    @property
    def cpu_used(self) -> float:
        return sum(i.workload_cpu for i in self.running)

    @property
    def ram_used(self) -> float:
        return sum(i.workload_ram for i in self.running)

    def load(self, resource: str, spot: Optional[bool] = None) -> float:
        """
        Reserved (declared) load, optionally restricted to spot (True) or on-demand (False) instances
        """
        return sum(i.reserved(resource) for i in self.running if spot is None or i.is_spot == spot)

    def utilization(self) -> float:
        return max(self.cpu_used / self.cpu_capacity, self.ram_used / self.ram_capacity)

    def spot_instances(self) -> List[InstanceState]:
        return eviction_order(self.running)


@dataclass(frozen=True)
class ThresholdPolicy:
    th_soft: float = DEFAULT_TH_SOFT
    th_hard: float = DEFAULT_TH_HARD

    def __post_init__(self):
        check(0 < self.th_soft < self.th_hard < 1,
              f'Thresholds must satisfy 0 < th_soft < th_hard < 1, received: {self.th_soft}, {self.th_hard}')

    def over_hard(self, utilization: float) -> bool:
        return utilization > self.th_hard + FEASIBILITY_TOLERANCE


@dataclass(frozen=True)
class PricingPolicy:
    on_demand_price: float = DEFAULT_ON_DEMAND_PRICE
    spot_floor: float = DEFAULT_SPOT_FLOOR
    mode: PricingMode = PricingMode.AUCTION

    def __post_init__(self):
        check(0 <= self.spot_floor <= self.on_demand_price,
              f'Prices must satisfy 0 <= spot_floor <= on_demand_price, received: {self.spot_floor}, {self.on_demand_price}')


@dataclass(frozen=True)
class SimulationConfig:
    nodes: int
    cpu_capacity: float
    ram_capacity: float
    thresholds: ThresholdPolicy = ThresholdPolicy()
    pricing: PricingPolicy = PricingPolicy()
    algorithm: str = ALGORITHM_HEURISTIC
    seed: int = 0
    slots: Optional[int] = None
    output: Optional[str] = None

    def __post_init__(self):
        check(self.nodes >= 1, f'Cluster needs at least one node, received: {self.nodes}')
        check(self.cpu_capacity > 0 and self.ram_capacity > 0, 'Node capacities must be positive')
        if self.algorithm not in ALGORITHMS:
            raise InvalidParameterError(f'Unknown algorithm "{self.algorithm}", must be one of: {", ".join(ALGORITHMS)}')
        check(self.seed >= 0, f'Seed must be non-negative, received: {self.seed}')
        check(self.slots is None or self.slots >= 0, f'Slots must be non-negative, received: {self.slots}')

    def build_cluster(self) -> List[NodeState]:
        return [NodeState(n, self.cpu_capacity, self.ram_capacity) for n in range(self.nodes)]


@dataclass
class PlacementPlan:
    placements: List[Tuple[InstanceRequest, int]] = field(default_factory=list)
    evictions: List[InstanceState] = field(default_factory=list)
    rejected: List[InstanceRequest] = field(default_factory=list)


@dataclass(frozen=True)
class SlotRecord:
    slot: int
    node_cpu: Tuple[float, ...]
    node_ram: Tuple[float, ...]
    node_utilization: Tuple[float, ...]
    avg_cpu: float
    avg_ram: float
    spot_price: float
    revenue: float
    cum_revenue: float
    evictions: int
    rejections: int
    on_demand_running: int
    spot_running: int


def apply_plan(cluster: List[NodeState], plan: PlacementPlan, slot: int) -> None:
    """
    Evict, then place; new instances start at their declared demand
    """
    for inst in plan.evictions:
        if not inst.is_spot:
            raise InvalidParameterError(f'On-demand instance {inst.request.request_id} cannot be evicted')
        evict(cluster[inst.node_id], inst)
    for request, node_id in plan.placements:
        cluster[node_id].running.append(
            InstanceState(request, node_id, slot, request.cpu_demand, request.ram_demand))


def evict(node: NodeState, inst: InstanceState) -> None:
    inst.status = InstanceStatus.EVICTED
    node.running = [i for i in node.running if i is not inst]
