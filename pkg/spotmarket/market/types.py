import math
from dataclasses import dataclass
from enum import Enum

from spotmarket.constants import SHARE_TOLERANCE
from spotmarket.util import InvalidParameterError, check


def _finite(name: str, v: float) -> None:
    if not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvalidParameterError(f'{name} must be a finite number, received: {v}')


@dataclass(frozen=True)
class MarketParams:
    """
    Parameterization of one cluster at one time slot

    :param q_o: QoS level of the on-demand service
    :param q_s: QoS level of the spot service, 0 < q_s < q_o
    :param gamma_o: average resource utilization of on-demand customers
    :param gamma_s: average resource utilization of spot customers
    :param capacity: maximum cluster resource
    """
    q_o: float
    q_s: float
    gamma_o: float
    gamma_s: float
    capacity: float = 1.0

    def __post_init__(self):
        for name in ['q_o', 'q_s', 'gamma_o', 'gamma_s', 'capacity']:
            _finite(name, getattr(self, name))
        if self.q_o == self.q_s:
            raise InvalidParameterError(
                f'Invalid QoS ordering: q_o == q_s == {self.q_o}; every threshold divides by q_o - q_s')
        check(self.q_o > self.q_s > 0, f'QoS must satisfy q_o > q_s > 0, received: q_o={self.q_o}, q_s={self.q_s}')
        check(self.gamma_o > 0 and self.gamma_s > 0,
              f'Utilizations must be positive, received: gamma_o={self.gamma_o}, gamma_s={self.gamma_s}')
        check(self.capacity > 0, f'Capacity must be positive, received: {self.capacity}')

    @property
    def eta(self) -> float:
        return self.gamma_o + self.gamma_s

    def scaled_qos(self, k: float) -> 'MarketParams':
        return MarketParams(self.q_o * k, self.q_s * k, self.gamma_o, self.gamma_s, self.capacity)


@dataclass(frozen=True)
class PriceVector:
    p_o: float
    p_s: float

    def __post_init__(self):
        _finite('p_o', self.p_o)
        _finite('p_s', self.p_s)
        check(self.p_o >= 0 and self.p_s >= 0, f'Prices must be non-negative, received: p_o={self.p_o}, p_s={self.p_s}')

    @property
    def p_n(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Customer:
    theta: float
    demand: float = 1.0

    def __post_init__(self):
        _finite('theta', self.theta)
        _finite('demand', self.demand)
        check(0 <= self.theta <= 1, f'Willingness to pay must lie in [0, 1], received: {self.theta}')
        check(self.demand >= 0, f'Demand must be non-negative, received: {self.demand}')


class ServiceChoice(Enum):
    ON_DEMAND = 'o'
    SPOT = 's'
    NONE = 'n'


@dataclass(frozen=True)
class Interval:
    """
    Subset of [0, 1] with an open lower end, (lower, upper]; closed_lower makes it [lower, upper]
    """
    lower: float
    upper: float
    closed_lower: bool = False

    def __post_init__(self):
        check(0 <= self.lower <= self.upper <= 1, f'Interval must lie within [0, 1], received: ({self.lower}, {self.upper}]')

    @property
    def length(self) -> float:
        return self.upper - self.lower

    @property
    def empty(self) -> bool:
        return self.length <= 0 and not self.closed_lower

    def contains(self, theta: float) -> bool:
        if self.closed_lower and theta == self.lower:
            return True
        return self.lower < theta <= self.upper

    def __repr__(self) -> str:
        return f"{'[' if self.closed_lower else '('}{self.lower}, {self.upper}]"


@dataclass(frozen=True)
class MarketShares:
    theta_n: Interval
    theta_s: Interval
    theta_o: Interval

    def __post_init__(self):
        total = self.theta_n.length + self.theta_s.length + self.theta_o.length
        if abs(total - 1.0) > SHARE_TOLERANCE:
            raise InvalidParameterError(f'Market shares must partition [0, 1], lengths sum to {total}')

    def interval(self, choice: ServiceChoice) -> Interval:
        return {
            ServiceChoice.NONE: self.theta_n,
            ServiceChoice.SPOT: self.theta_s,
            ServiceChoice.ON_DEMAND: self.theta_o
        }[choice]

    def choice_of(self, theta: float) -> ServiceChoice:
        for choice in [ServiceChoice.NONE, ServiceChoice.SPOT, ServiceChoice.ON_DEMAND]:
            if self.interval(choice).contains(theta):
                return choice
        raise InvalidParameterError(f'Willingness to pay outside [0, 1]: {theta}')
