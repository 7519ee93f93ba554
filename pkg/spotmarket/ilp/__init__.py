from .problem import IlpProblem, IlpSolution, IlpStatus, ProblemSizeError
from .branch_and_bound import solve
from .exhaustive import solve_exhaustive, random_problem
