from collections import defaultdict
from typing import Dict, List, Optional, Tuple
import numpy as np

from spotmarket.constants import ALGORITHM_ILP, ALGORITHM_NONE, FEASIBILITY_TOLERANCE
from spotmarket.util import setup_logger
from .auction import clear_spot_auction, clear_spot_price
from .cluster import (
    RESOURCES, InstanceRequest, InstanceState, InstanceStatus, NodeState, PlacementPlan, PricingMode, SimulationConfig,
    SlotRecord, apply_plan, evict
)
from .heuristic import heuristic_provision
from .ilp_provisioning import ilp_provision
from .io import write_records

logger = setup_logger(__name__)


class SimulationComplete(Exception):
    """Raised by step() once every slot of the horizon has been simulated"""

    def __init__(self, slot: int):
        super().__init__(f'Simulation complete after {slot} slots')
        self.slot = slot


class SimulatorState(object):

    def __init__(self, config: SimulationConfig, trace: List[InstanceRequest]):
        self.config = config
        self.cluster: List[NodeState] = config.build_cluster()
        self.arrivals: Dict[int, List[InstanceRequest]] = defaultdict(list)
        for req in sorted(trace, key=lambda r: r.request_id):
            self.arrivals[req.arrival_slot].append(req)
        last = max([r.arrival_slot for r in trace], default=-1)
        self.horizon = config.slots if config.slots is not None else last + 1
        self.rng = np.random.default_rng(config.seed)
        self.slot = 0
        self.cum_revenue = 0.0
        self.records: List[SlotRecord] = []


# #####################################
# Slot phases

def complete_expired(sim: SimulatorState) -> None:
    for node in sim.cluster:
        for inst in node.running:
            lifetime = inst.request.lifetime
            if lifetime is not None and inst.start_slot + lifetime <= sim.slot:
                inst.status = InstanceStatus.COMPLETED
        node.running = [i for i in node.running if i.status == InstanceStatus.RUNNING]


def resample_workloads(sim: SimulatorState) -> None:
    """
    Draw Poisson workloads with mean equal to each instance's demand

    On-demand workloads never exceed their reservation; spot workloads are scaled into the physical
    capacity the on-demand instances leave.
    """
    for node in sim.cluster:
        od = [i for i in node.running if not i.is_spot]
        spot = [i for i in node.running if i.is_spot]
        draws = {}
        for inst in od + spot:
            draws[id(inst)] = {r: float(sim.rng.poisson(inst.request.demand(r))) for r in RESOURCES}

        for r in RESOURCES:
            od_used = 0.0
            for inst in od:
                w = min(draws[id(inst)][r], inst.request.demand(r))
                _set_workload(inst, r, w)
                od_used += w

            spot_total = sum(draws[id(i)][r] for i in spot)
            spot_room = max(0.0, node.capacity(r) - od_used)
            spot_scale = min(1.0, spot_room / spot_total) if spot_total > 0 else 1.0
            for inst in spot:
                _set_workload(inst, r, draws[id(inst)][r] * spot_scale)


def _set_workload(inst: InstanceState, resource: str, value: float) -> None:
    if resource == 'cpu':
        inst.workload_cpu = value
    else:
        inst.workload_ram = value


def clear_spot(sim: SimulatorState, spot: List[InstanceRequest]) -> Tuple[float, List[InstanceRequest], List[InstanceRequest]]:
    """
    :returns: (cleared price, admitted requests, rejected requests)
    """
    pricing = sim.config.pricing
    if sim.config.algorithm == ALGORITHM_NONE:
        return pricing.spot_floor, [], list(spot)
    bids = [r.max_bid or 0.0 for r in spot]
    if pricing.mode == PricingMode.FIXED_FLOOR:
        price, admitted = clear_spot_price(bids, len(spot), pricing.spot_floor)
    else:
        price, admitted = clear_spot_auction(spot, sim.cluster, sim.config.thresholds, pricing.spot_floor)
    return (
        price,
        [r for i, r in enumerate(spot) if i in admitted],
        [r for i, r in enumerate(spot) if i not in admitted]
    )


def provision(sim: SimulatorState, requests: List[InstanceRequest], spot_price: float) -> PlacementPlan:
    config = sim.config
    if config.algorithm == ALGORITHM_ILP:
        return ilp_provision(requests, sim.cluster, config.thresholds, config.pricing, spot_price)
    return heuristic_provision(requests, sim.cluster, config.thresholds, config.pricing)


def hard_sweep(sim: SimulatorState) -> int:
    """
    Reclaim spot instances, lowest bid first, on every node whose measured utilization exceeds th_hard
    """
    evicted = 0
    thresholds = sim.config.thresholds
    for node in sim.cluster:
        victims = node.spot_instances()
        while thresholds.over_hard(node.utilization()) and victims:
            evict(node, victims.pop(0))
            evicted += 1
        if thresholds.over_hard(node.utilization()):
            logger.warning('Node %s above th_hard with on-demand load only: %s', node.node_id, node.utilization())
    return evicted


# #####################################

def step(sim: SimulatorState) -> SlotRecord:
    """
    Advance one slot: completions and workloads, arrivals, spot clearing, provisioning, hard sweep, revenue

    :raises SimulationComplete: once the horizon is reached
    """
    if sim.slot >= sim.horizon:
        raise SimulationComplete(sim.slot)
    config = sim.config

    complete_expired(sim)
    resample_workloads(sim)

    arrivals = sim.arrivals.get(sim.slot, [])
    on_demand = [r for r in arrivals if not r.is_spot]
    spot = [r for r in arrivals if r.is_spot]

    price, admitted, lost = clear_spot(sim, spot)
    plan = provision(sim, on_demand + admitted, price)
    apply_plan(sim.cluster, plan, sim.slot)
    evictions = len(plan.evictions) + hard_sweep(sim)

    running = [i for node in sim.cluster for i in node.running]
    od_running = sum(1 for i in running if not i.is_spot)
    spot_running = len(running) - od_running
    revenue = od_running * config.pricing.on_demand_price + spot_running * price
    sim.cum_revenue += revenue

    node_cpu = tuple(node.cpu_used / node.cpu_capacity for node in sim.cluster)
    node_ram = tuple(node.ram_used / node.ram_capacity for node in sim.cluster)
    record = SlotRecord(
        slot=sim.slot,
        node_cpu=node_cpu,
        node_ram=node_ram,
        node_utilization=tuple(node.utilization() for node in sim.cluster),
        avg_cpu=float(np.mean(node_cpu)),
        avg_ram=float(np.mean(node_ram)),
        spot_price=price,
        revenue=revenue,
        cum_revenue=sim.cum_revenue,
        evictions=evictions,
        rejections=len(plan.rejected) + len(lost),
        on_demand_running=od_running,
        spot_running=spot_running
    )
    logger.debug('Slot %s: revenue %s, %s evictions, %s rejections', sim.slot, revenue, evictions, record.rejections)

    sim.records.append(record)
    sim.slot += 1
    return record


def run(config: SimulationConfig, trace: List[InstanceRequest], output: Optional[str] = None) -> List[SlotRecord]:
    """
    Simulate every slot of the horizon; writes the time series as CSV when an output path is configured
    """
    sim = SimulatorState(config, trace)
    while True:
        try:
            step(sim)
        except SimulationComplete:
            break

    path = output if output is not None else config.output
    if path is not None:
        write_records(sim.records, path)
    logger.debug('Simulated %s slots with %s, cumulative revenue %s', sim.horizon, config.algorithm, sim.cum_revenue)
    return sim.records


def hard_threshold_respected(record: SlotRecord, th_hard: float) -> bool:
    return all(u <= th_hard + FEASIBILITY_TOLERANCE for u in record.node_utilization)


