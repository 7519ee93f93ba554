from typing import List, Optional, Tuple

from spotmarket.constants import EVICTION_EPSILON, ILP_MAX_VARIABLES, PRIORITY_WEIGHT
from spotmarket.ilp import IlpProblem, ProblemSizeError, solve
from spotmarket.util import setup_logger
from .cluster import (
    RESOURCES, InstanceRequest, InstanceState, NodeState, PlacementPlan, PricingPolicy, ThresholdPolicy
)

logger = setup_logger(__name__)


class ProvisioningModel(object):
    """
    0/1 program for one slot's placement and eviction decisions

    Variables, in order: y[r, n] for on-demand requests, y[r, n] for spot requests, then e[j]
    per node for its spot instances in eviction order.

    Rows:
      - each request placed at most once
      - per node and resource: new load - evicted load <= th_hard * capacity - reserved load
      - on-demand placed on a node: remaining spot load <= max(0, th_soft * capacity - on-demand load)
      - spot placed on a node: reserved + new load <= th_soft * capacity, with no credit for evictions
      - evictions per node follow the eviction order: e[k + 1] <= e[k]
    """

    def __init__(self, requests: List[InstanceRequest], cluster: List[NodeState], policy: ThresholdPolicy,
                 pricing: PricingPolicy, spot_price: float):
        self.nodes = sorted(cluster, key=lambda node: node.node_id)
        self.on_demand = sorted([r for r in requests if not r.is_spot], key=lambda r: r.request_id)
        self.spot = sorted([r for r in requests if r.is_spot], key=lambda r: (-(r.max_bid or 0.0), r.request_id))
        self.requests = self.on_demand + self.spot
        self.evictable: List[Tuple[NodeState, InstanceState]] = [
            (node, inst) for node in self.nodes for inst in node.spot_instances()
        ]
        self.policy = policy
        self.pricing = pricing
        self.spot_price = spot_price

    @property
    def n_variables(self) -> int:
        return len(self.requests) * len(self.nodes) + len(self.evictable)

    def y(self, r: int, n: int) -> int:
        return r * len(self.nodes) + n

    def e(self, j: int) -> int:
        return len(self.requests) * len(self.nodes) + j

    def objective(self) -> List[float]:
        c = [0.0] * self.n_variables
        for r, req in enumerate(self.requests):
            value = self.spot_price if req.is_spot else self.pricing.on_demand_price * PRIORITY_WEIGHT
            for n in range(len(self.nodes)):
                c[self.y(r, n)] = value
        for j in range(len(self.evictable)):
            c[self.e(j)] = -EVICTION_EPSILON
        return c

    def constraints(self) -> List[Tuple[List[float], float]]:
        nv = self.n_variables
        rows: List[Tuple[List[float], float]] = []

        for r in range(len(self.requests)):
            a = [0.0] * nv
            for n in range(len(self.nodes)):
                a[self.y(r, n)] = 1.0
            rows.append((a, 1.0))

        for n, node in enumerate(self.nodes):
            mine = [j for j, (owner, _) in enumerate(self.evictable) if owner is node]
            for res in RESOURCES:
                cap = node.capacity(res)
                load = node.load(res)
                spot_load = node.load(res, spot=True)

                a = [0.0] * nv
                for r, req in enumerate(self.requests):
                    a[self.y(r, n)] = req.demand(res)
                for j in mine:
                    a[self.e(j)] = -self.evictable[j][1].reserved(res)
                rows.append((a, self.policy.th_hard * cap - load))

                if mine:
                    allowance = max(0.0, self.policy.th_soft * cap - node.load(res, spot=False))
                    for r, req in enumerate(self.on_demand):
                        a = [0.0] * nv
                        a[self.y(r, n)] = spot_load
                        for j in mine:
                            a[self.e(j)] = -self.evictable[j][1].reserved(res)
                        rows.append((a, allowance))

                big = 2 * cap
                for s in range(len(self.on_demand), len(self.requests)):
                    a = [0.0] * nv
                    for r, req in enumerate(self.requests):
                        a[self.y(r, n)] = req.demand(res)
                    a[self.y(s, n)] += big
                    rows.append((a, self.policy.th_soft * cap - load + big))

            for prev, nxt in zip(mine, mine[1:]):
                a = [0.0] * nv
                a[self.e(nxt)] = 1.0
                a[self.e(prev)] = -1.0
                rows.append((a, 0.0))

        return rows

    def problem(self) -> IlpProblem:
        return IlpProblem(self.objective(), self.constraints())

    def plan(self, assignment: Tuple[int, ...]) -> PlacementPlan:
        plan = PlacementPlan()
        for j, (_, inst) in enumerate(self.evictable):
            if assignment[self.e(j)]:
                plan.evictions.append(inst)
        for r, req in enumerate(self.requests):
            placed = [n for n in range(len(self.nodes)) if assignment[self.y(r, n)]]
            if placed:
                plan.placements.append((req, self.nodes[placed[0]].node_id))
            else:
                plan.rejected.append(req)
        return plan


def ilp_provision(requests: List[InstanceRequest], cluster: List[NodeState], policy: ThresholdPolicy,
                  pricing: PricingPolicy, spot_price: Optional[float] = None,
                  max_variables: int = ILP_MAX_VARIABLES) -> PlacementPlan:
    """
    Place a slot's requests by solving one 0/1 program over placements and spot evictions

    On-demand placements are worth on_demand_price * PRIORITY_WEIGHT, spot placements the cleared
    spot price, and each eviction costs EVICTION_EPSILON.

    :raises ProblemSizeError: when placements plus candidate evictions exceed max_variables
    """
    if not requests:
        return PlacementPlan()

    model = ProvisioningModel(
        requests, cluster, policy, pricing,
        pricing.spot_floor if spot_price is None else spot_price)
    if model.n_variables > max_variables:
        raise ProblemSizeError(model.n_variables, max_variables)

    solution = solve(model.problem(), max_variables)
    if not solution.optimal:
        # evicting every spot instance always satisfies the rows while on-demand load stays under th_hard
        logger.warning('Provisioning program infeasible, rejecting all %s requests', len(requests))
        return PlacementPlan(rejected=list(model.requests))

    plan = model.plan(solution.assignment)
    od_rejected = [r.request_id for r in plan.rejected if not r.is_spot]
    if od_rejected:
        logger.warning('ILP provisioning rejected on-demand requests %s', od_rejected)
    logger.debug('ILP plan: objective %s, %s nodes explored', solution.objective_value, solution.nodes_explored)
    return plan
