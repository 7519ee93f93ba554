import os
import unittest
from typing import List, Optional

from spotmarket.market import MarketParams
from spotmarket.simulator import InstanceKind, InstanceRequest, InstanceState, NodeState
from spotmarket.util import set_verbose

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', '..', 'demos', 'data')

# q_o, q_s, gamma_o, gamma_s used throughout the figures
REFERENCE = MarketParams(100.0, 30.0, 0.2, 0.5)
LOW_SPOT = MarketParams(100.0, 10.0, 0.2, 0.3)


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


def od(request_id: int, cpu: float, slot: int = 0, ram: float = 1.0, lifetime: Optional[int] = None) -> InstanceRequest:
    return InstanceRequest(request_id, slot, InstanceKind.ON_DEMAND, cpu, ram, None, lifetime)


def spot(request_id: int, cpu: float, bid: float, slot: int = 0, ram: float = 1.0,
         lifetime: Optional[int] = None) -> InstanceRequest:
    return InstanceRequest(request_id, slot, InstanceKind.SPOT, cpu, ram, bid, lifetime)


def node_with(node_id: int, requests: List[InstanceRequest], cpu: float = 100.0, ram: float = 1000.0,
              start_slot: int = 0) -> NodeState:
    """
    Node already running the given requests at their declared demand
    """
    node = NodeState(node_id, cpu, ram)
    for req in requests:
        node.running.append(InstanceState(req, node_id, start_slot, req.cpu_demand, req.ram_demand))
    return node


class QuietTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        set_verbose(False)
