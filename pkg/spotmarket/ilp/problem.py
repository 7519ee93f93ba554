from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple
import numpy as np

from spotmarket.constants import FEASIBILITY_TOLERANCE
from spotmarket.util import InvalidParameterError


class ProblemSizeError(ValueError):
    def __init__(self, n: int, max_variables: int):
        super().__init__(f'ILP has {n} variables, solver supports at most {max_variables}')
        self.n = n
        self.max_variables = max_variables


class IlpStatus(Enum):
    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'


@dataclass
class IlpProblem:
    """
    Maximize c.x over x in {0, 1}^n subject to rows a_j.x <= b_j

    Encode >= rows by negation and equalities as a pair of rows.

    :param objective: coefficients c, one per variable
    :param constraints: list of (a_j, b_j)
    """
    objective: Sequence[float]
    constraints: List[Tuple[Sequence[float], float]] = field(default_factory=list)

    def __post_init__(self):
        self.c = np.asarray(self.objective, dtype=float).reshape(-1)
        n = len(self.c)
        for j, (a, _) in enumerate(self.constraints):
            if len(a) != n:
                raise InvalidParameterError(f'Constraint {j} has {len(a)} coefficients, expected {n}')
        if not np.all(np.isfinite(self.c)):
            raise InvalidParameterError('Objective coefficients must be finite')
        self.A = np.array([np.asarray(a, dtype=float) for a, _ in self.constraints]).reshape(len(self.constraints), n)
        self.b = np.array([float(b) for _, b in self.constraints])
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b))):
            raise InvalidParameterError('Constraint coefficients and bounds must be finite')

    @property
    def n(self) -> int:
        return len(self.c)

    def value(self, x: Sequence[int]) -> float:
        return float(np.dot(self.c, np.asarray(x, dtype=float)))

    def is_feasible(self, x: Sequence[int], tolerance: float = FEASIBILITY_TOLERANCE) -> bool:
        if len(self.b) == 0:
            return True
        return bool(np.all(self.A @ np.asarray(x, dtype=float) <= self.b + tolerance))


@dataclass(frozen=True)
class IlpSolution:
    assignment: Tuple[int, ...]
    objective_value: float
    status: IlpStatus
    nodes_explored: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == IlpStatus.OPTIMAL


def infeasible(n: int, nodes_explored: int = 0) -> IlpSolution:
    return IlpSolution(tuple([0] * n), 0.0, IlpStatus.INFEASIBLE, nodes_explored)
