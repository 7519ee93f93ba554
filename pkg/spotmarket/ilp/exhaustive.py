import math
import numpy as np

from spotmarket.constants import EXHAUSTIVE_MAX_VARIABLES, FEASIBILITY_TOLERANCE, IMPROVEMENT_TOLERANCE
from .problem import IlpProblem, IlpSolution, IlpStatus, ProblemSizeError, infeasible


def assignments(n: int) -> np.ndarray:
    """
    All 2^n 0/1 vectors as rows, in lexicographic order
    """
    idx = np.arange(2 ** n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def solve_exhaustive(p: IlpProblem, max_variables: int = EXHAUSTIVE_MAX_VARIABLES) -> IlpSolution:
    """
    Brute-force reference solver with the same tie rule as solve(): scanning assignments in
    lexicographic order, the incumbent changes only on improvement beyond IMPROVEMENT_TOLERANCE
    """
    if p.n > max_variables:
        raise ProblemSizeError(p.n, max_variables)

    X = assignments(p.n)
    values = X @ p.c
    if len(p.b):
        feasible = np.all(X @ p.A.T <= p.b + FEASIBILITY_TOLERANCE, axis=1)
    else:
        feasible = np.ones(len(X), dtype=bool)
    order = np.nonzero(feasible)[0]
    if len(order) == 0:
        return infeasible(p.n, len(X))

    vals = values[order]
    best, best_k, pos = -math.inf, -1, 0
    while pos < len(vals):
        better = vals[pos:] > best + IMPROVEMENT_TOLERANCE
        if not better.any():
            break
        best_k = pos + int(np.argmax(better))
        best = vals[best_k]
        pos = best_k + 1

    assignment = tuple(int(v) for v in X[order[best_k]])
    return IlpSolution(assignment, p.value(assignment), IlpStatus.OPTIMAL, len(X))


def random_problem(rng: np.random.Generator, max_variables: int = 14, max_rows: int = 6) -> IlpProblem:
    """
    Random instance with integer objective in [-10, 10] and integer rows in [-2, 9]

    Bounds are drawn within the attainable range of each row so that both feasible and
    infeasible instances occur.
    """
    n = int(rng.integers(1, max_variables + 1))
    m = int(rng.integers(1, max_rows + 1))
    c = rng.integers(-10, 11, size=n).astype(float)
    constraints = []
    for _ in range(m):
        a = rng.integers(-2, 10, size=n).astype(float)
        lo, hi = int(np.minimum(a, 0).sum()), int(np.maximum(a, 0).sum())
        constraints.append((a.tolist(), float(rng.integers(lo - 1, hi + 1))))
    return IlpProblem(c.tolist(), constraints)
