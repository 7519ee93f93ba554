from typing import List, Sequence, Set, Tuple

from spotmarket.constants import FEASIBILITY_TOLERANCE
from spotmarket.util import InvalidParameterError, setup_logger
from .cluster import RESOURCES, InstanceRequest, NodeState, ThresholdPolicy

logger = setup_logger(__name__)


def clear_spot_price(bids: Sequence[float], admit_capacity: int, floor: float) -> Tuple[float, Set[int]]:
    """
    Uniform-price multi-unit clearing bounded below by a floor

    Bids under the floor never clear. The highest admit_capacity remaining bids win and all pay
    the highest losing eligible bid, or the floor when every eligible bid wins.

    :returns: (price, indices of admitted bids)
    """
    if floor < 0:
        raise InvalidParameterError(f'Spot floor must be non-negative, received: {floor}')
    if admit_capacity < 0:
        raise InvalidParameterError(f'Admission capacity must be non-negative, received: {admit_capacity}')

    eligible = sorted(
        [i for i, b in enumerate(bids) if b >= floor],
        key=lambda i: (-bids[i], i))
    admitted = eligible[:admit_capacity]
    losers = eligible[admit_capacity:]
    price = max(floor, bids[losers[0]]) if losers else floor

    logger.debug('Cleared %s of %s bids at %s (capacity %s, floor %s)', len(admitted), len(bids), price, admit_capacity, floor)
    return price, set(admitted)


def first_fit_spot(requests: List[InstanceRequest], cluster: List[NodeState], thresholds: ThresholdPolicy,
                   floor: float) -> List[int]:
    """
    Indices of the eligible spot requests that first-fit into the headroom under th_soft, walking bids
    highest first (ties by request id) and skipping any request that no longer fits anywhere
    """
    headroom = [
        {r: thresholds.th_soft * node.capacity(r) - node.load(r) for r in RESOURCES}
        for node in cluster
    ]
    fitted = []
    for i in _bid_order(requests, floor):
        req = requests[i]
        for room in headroom:
            if all(req.demand(r) <= room[r] + FEASIBILITY_TOLERANCE for r in RESOURCES):
                for r in RESOURCES:
                    room[r] -= req.demand(r)
                fitted.append(i)
                break
    return fitted


def clear_spot_auction(requests: List[InstanceRequest], cluster: List[NodeState], thresholds: ThresholdPolicy,
                       floor: float) -> Tuple[float, Set[int]]:
    """
    Uniform-price clearing where the winners are exactly the requests that fit

    A request too large for the headroom left by higher bids loses without displacing the lower bids
    that do fit. Winners pay the highest eligible bid ranked after the last winner, or the floor.

    :returns: (price, indices of admitted requests)
    """
    if floor < 0:
        raise InvalidParameterError(f'Spot floor must be non-negative, received: {floor}')
    order = _bid_order(requests, floor)
    fitted = first_fit_spot(requests, cluster, thresholds, floor)
    tail = order[order.index(fitted[-1]) + 1:] if fitted else order
    price = max(floor, requests[tail[0]].max_bid or 0.0) if tail else floor

    logger.debug('Auction admitted %s of %s spot requests at %s (floor %s)', len(fitted), len(requests), price, floor)
    return price, set(fitted)


def _bid_order(requests: List[InstanceRequest], floor: float) -> List[int]:
    eligible = [i for i, req in enumerate(requests) if req.max_bid is not None and req.max_bid >= floor]
    return sorted(eligible, key=lambda i: (-(requests[i].max_bid or 0.0), requests[i].request_id))
