import math
from typing import Dict, List, Optional
import numpy as np

from spotmarket.constants import FEASIBILITY_TOLERANCE, ILP_MAX_VARIABLES, IMPROVEMENT_TOLERANCE
from spotmarket.util import setup_logger
from .problem import IlpProblem, IlpSolution, IlpStatus, ProblemSizeError, infeasible

logger = setup_logger(__name__)


class BranchAndBound(object):
    """
    Depth-first search over variables in index order, 0-branch first

    Visiting assignments in lexicographic order and replacing the incumbent only on strict
    improvement yields the lexicographically smallest maximizer.
    """

    def __init__(self, p: IlpProblem):
        self.p = p
        self.n = p.n
        self.c = p.c
        self.A = p.A
        self.b = p.b
        # min_tail[j, k]: least load row j can still gain from variables k..n-1
        neg = np.minimum(self.A, 0.0)
        tail = np.zeros((len(self.b), self.n + 1))
        tail[:, :self.n] = np.cumsum(neg[:, ::-1], axis=1)[:, ::-1]
        self.min_tail = tail

        # set-packing rows: 0/1 coefficients, bound 1; each variable is grouped under its first such row
        self.group_of: List[int] = [-1] * self.n
        for j in range(len(self.b)):
            row = self.A[j]
            if self.b[j] == 1.0 and np.all((row == 0.0) | (row == 1.0)):
                for i in np.nonzero(row)[0]:
                    if self.group_of[i] == -1:
                        self.group_of[i] = j

        self.best = -math.inf
        self.best_x: Optional[np.ndarray] = None
        self.nodes = 0

    def bound(self, k: int, load: np.ndarray) -> float:
        """
        Upper bound on the objective contribution of variables k..n-1
        """
        residual = self.b - load
        unfixed = range(k, self.n)
        positive = [i for i in unfixed if self.c[i] > 0]
        simple = float(sum(self.c[i] for i in positive))

        groups: Dict[int, float] = {}
        group_bound = 0.0
        for i in positive:
            g = self.group_of[i]
            if g == -1:
                group_bound += self.c[i]
            elif residual[g] >= 1.0 - FEASIBILITY_TOLERANCE:
                groups[g] = max(groups.get(g, 0.0), self.c[i])
        group_bound += sum(groups.values())

        if len(self.b) == 0 or not positive:
            return min(simple, group_bound)

        overload = self.A[:, positive].sum(axis=1) - residual
        j = int(np.argmax(overload))
        if overload[j] <= FEASIBILITY_TOLERANCE:
            return min(simple, group_bound)
        return min(self.row_relaxation(j, k, simple, overload[j]), group_bound)

    def row_relaxation(self, j: int, k: int, start: float, need: float) -> float:
        """
        Fractional optimum of row j alone: repair the overload of the all-positive start by cheapest ratio
        """
        moves = []
        for i in range(k, self.n):
            a, c = self.A[j, i], self.c[i]
            if c > 0 and a > 0:
                moves.append((c / a, i, a))
            elif c <= 0 and a < 0:
                moves.append((c / a, i, -a))
        moves.sort()
        value = start
        for ratio, _, gain in moves:
            take = min(gain, need)
            value -= ratio * take
            need -= take
            if need <= FEASIBILITY_TOLERANCE:
                return value
        return -math.inf

    def search(self, k: int, x: np.ndarray, load: np.ndarray, value: float) -> None:
        self.nodes += 1
        if len(self.b) and np.any(load + self.min_tail[:, k] > self.b + FEASIBILITY_TOLERANCE):
            return
        if k == self.n:
            if value > self.best + IMPROVEMENT_TOLERANCE:
                self.best = value
                self.best_x = x.copy()
                logger.debug('Incumbent %s after %s nodes', value, self.nodes)
            return
        if value + self.bound(k, load) <= self.best + IMPROVEMENT_TOLERANCE:
            return
        self.search(k + 1, x, load, value)
        x[k] = 1
        self.search(k + 1, x, load + self.A[:, k], value + self.c[k])
        x[k] = 0

    def run(self) -> IlpSolution:
        x = np.zeros(self.n, dtype=int)
        self.search(0, x, np.zeros(len(self.b)), 0.0)
        logger.debug('Explored %s nodes for %s variables, %s rows', self.nodes, self.n, len(self.b))
        if self.best_x is None:
            return infeasible(self.n, self.nodes)
        assignment = tuple(int(v) for v in self.best_x)
        return IlpSolution(assignment, self.p.value(assignment), IlpStatus.OPTIMAL, self.nodes)


def solve(p: IlpProblem, max_variables: int = ILP_MAX_VARIABLES) -> IlpSolution:
    """
    Exact 0/1 maximizer of an IlpProblem

    :returns: the lexicographically smallest optimal assignment, or status INFEASIBLE
    :raises ProblemSizeError: when the problem has more than max_variables variables
    """
    if p.n > max_variables:
        raise ProblemSizeError(p.n, max_variables)
    return BranchAndBound(p).run()
