from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from spotmarket.constants import FEASIBILITY_TOLERANCE
from spotmarket.util import setup_logger
from .cluster import (
    RESOURCES, InstanceRequest, InstanceState, NodeState, PlacementPlan, PricingPolicy, ThresholdPolicy
)

logger = setup_logger(__name__)


@dataclass
class NodeLedger:
    """
    Scratch view of a node's reserved load while a slot's plan is being built
    """
    node_id: int
    capacity: Dict[str, float]
    load: Dict[str, float]
    od_load: Dict[str, float]
    spot: List[InstanceState] = field(default_factory=list)
    evicted: bool = False

    @classmethod
    def of(cls, node: NodeState) -> 'NodeLedger':
        return cls(
            node_id=node.node_id,
            capacity={r: node.capacity(r) for r in RESOURCES},
            load={r: node.load(r) for r in RESOURCES},
            od_load={r: node.load(r, spot=False) for r in RESOURCES},
            spot=node.spot_instances()
        )

    def utilization(self) -> float:
        return max(self.load[r] / self.capacity[r] for r in RESOURCES)

    def fits(self, request: InstanceRequest, threshold: float, od_only: bool = False) -> bool:
        base = self.od_load if od_only else self.load
        return all(
            base[r] + request.demand(r) <= threshold * self.capacity[r] + FEASIBILITY_TOLERANCE
            for r in RESOURCES)

    def place(self, request: InstanceRequest) -> None:
        for r in RESOURCES:
            self.load[r] += request.demand(r)
            if not request.is_spot:
                self.od_load[r] += request.demand(r)

    def evict_until(self, done: Callable[['NodeLedger'], bool], plan: PlacementPlan) -> None:
        while self.spot and not done(self):
            inst = self.spot.pop(0)
            for r in RESOURCES:
                self.load[r] -= inst.reserved(r)
            plan.evictions.append(inst)
            self.evicted = True


def least_utilized(ledgers: List[NodeLedger]) -> Optional[NodeLedger]:
    if not ledgers:
        return None
    return min(ledgers, key=lambda led: (led.utilization(), led.node_id))


def heuristic_provision(requests: List[InstanceRequest], cluster: List[NodeState], policy: ThresholdPolicy,
                        pricing: PricingPolicy) -> PlacementPlan:
    """
    Greedy load-balancing placement with on-demand priority

    On-demand requests go first in arrival order to the least-utilized node that fits them under
    th_hard, evicting spot instances (lowest bid first, then youngest) until that node is back under
    th_soft. Failing that, a node that would fit once its spot instances are gone is cleared just
    enough. Spot requests bidding at least the spot floor follow, highest bid first, on the
    least-utilized node that stays under th_soft. They never trigger evictions and skip nodes that
    evicted spot instances in this slot.
    """
    plan = PlacementPlan()
    ledgers = [NodeLedger.of(node) for node in cluster]
    soft, hard = policy.th_soft, policy.th_hard

    on_demand = sorted([r for r in requests if not r.is_spot], key=lambda r: r.request_id)
    spot = sorted([r for r in requests if r.is_spot], key=lambda r: (-(r.max_bid or 0.0), r.request_id))

    for req in on_demand:
        target = least_utilized([led for led in ledgers if led.fits(req, hard)])
        if target is not None:
            target.evict_until(lambda led: led.utilization() <= soft + FEASIBILITY_TOLERANCE, plan)
        else:
            target = least_utilized([led for led in ledgers if led.fits(req, hard, od_only=True)])
            if target is None:
                logger.debug('Rejecting on-demand request %s: no node fits it even without spot', req.request_id)
                plan.rejected.append(req)
                continue
            target.evict_until(
                lambda led: led.fits(req, hard) and led.utilization() <= soft + FEASIBILITY_TOLERANCE,
                plan)
        target.place(req)
        plan.placements.append((req, target.node_id))

    for req in spot:
        if (req.max_bid or 0.0) < pricing.spot_floor:
            plan.rejected.append(req)
            continue
        target = least_utilized([led for led in ledgers if not led.evicted and led.fits(req, soft)])
        if target is None:
            plan.rejected.append(req)
            continue
        target.place(req)
        plan.placements.append((req, target.node_id))

    logger.debug('Heuristic plan: %s placed, %s evicted, %s rejected',
                 len(plan.placements), len(plan.evictions), len(plan.rejected))
    return plan
