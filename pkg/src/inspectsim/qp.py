"""Dense 3-variable projection QPs with box bounds and one-sided linear rows.

Problems here are tiny (3 decision variables, up to ~20 rows), so the solver
favors exact termination and verifiable optimality over generality:

  1. fast path: clamp the target to the box; if every row holds, that is the
     projection onto the feasible set;
  2. dual active-set iteration (add most violated row, drop rows with
     negative multipliers), which resolves almost every remaining case in a
     couple of iterations;
  3. certified fallback: enumerate all candidate active sets of size <= 3
     (optimality of a projection implies such a set exists), which also
     decides infeasibility.

Everything is deterministic: identical input gives bit-identical output.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

FEAS_TOL = 1e-8
DUAL_TOL = 1e-8
_ITER_CAP = 30

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"


class QpNumericalError(RuntimeError):
    """Solver could not certify a solution (conditioning / iteration failure)."""


@dataclass(frozen=True)
class QpProblem:
    """min ||x - target||^2  s.t.  lb <= x <= ub  and  a_i . x >= b_i."""

    target: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    ineq_rows: tuple[tuple[np.ndarray, float], ...] = ()

    def __post_init__(self):
        for name in ("target", "lb", "ub"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.lb > self.ub):
            raise ValueError("empty box: lb > ub")
        rows = tuple((np.asarray(a, dtype=float), float(b)) for a, b in self.ineq_rows)
        for a, b in rows:
            if not (np.all(np.isfinite(a)) and np.isfinite(b)):
                raise ValueError("non-finite constraint row")
        object.__setattr__(self, "ineq_rows", rows)


@dataclass(frozen=True)
class QpSolution:
    x: np.ndarray
    status: str
    kkt_residual: float


def _stacked_rows(problem: QpProblem) -> tuple[np.ndarray, np.ndarray]:
    """All constraints as G x >= d (box rows first, then general rows)."""
    eye = np.eye(3)
    g = [eye, -eye]
    d = [problem.lb, -problem.ub]
    if problem.ineq_rows:
        g.append(np.array([a for a, _ in problem.ineq_rows]))
        d.append(np.array([b for _, b in problem.ineq_rows]))
    return np.vstack(g), np.concatenate(d)


def _eq_projection(target, g, d, working):
    """Projection of target onto {g_i x = d_i, i in working}; returns (x, lam)
    or None when the working rows are (near-)dependent."""
    if not working:
        return target.copy(), np.zeros(0)
    a = g[working]
    gram = a @ a.T
    rhs = d[working] - a @ target
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(lam)):
        return None
    # reject badly conditioned active sets; the enumeration fallback will
    # find an independent subset instead
    if np.linalg.cond(gram) > 1e12:
        return None
    return target + a.T @ lam, lam


def _active_set_iteration(target, g, d):
    """Dual active-set loop. Returns (x, working, lam) or None on failure."""
    working: list[int] = []
    x = target.copy()
    for _ in range(_ITER_CAP):
        sol = _eq_projection(target, g, d, working)
        if sol is None:
            return None
        x, lam = sol
        if lam.size and np.min(lam) < -DUAL_TOL:
            working.pop(int(np.argmin(lam)))
            continue
        viol = d - g @ x
        j = int(np.argmax(viol))
        if viol[j] <= FEAS_TOL:
            return x, working, lam
        if j in working or len(working) >= 3:
            return None
        working.append(j)
    return None


def _enumerate(target, g, d):
    """Try every candidate active set of size <= 3; None means infeasible."""
    m = g.shape[0]
    best = None
    for k in range(0, 4):
        for subset in combinations(range(m), k):
            sol = _eq_projection(target, g, d, list(subset))
            if sol is None:
                continue
            x, lam = sol
            if lam.size and np.min(lam) < -DUAL_TOL:
                continue
            if np.max(d - g @ x) > FEAS_TOL:
                continue
            obj = float(np.dot(x - target, x - target))
            if best is None or obj < best[1]:
                best = (x, obj, lam)
        if best is not None:
            # the projection with the smallest active set already found is
            # optimal (larger sets cannot improve a certified KKT point)
            break
    return best


def _residual(x, target, g, d, working, lam):
    feas = float(max(0.0, np.max(d - g @ x)))
    stat = float(np.linalg.norm(x - target - (g[working].T @ lam if working else 0.0)))
    dual = float(max(0.0, -np.min(lam))) if lam.size else 0.0
    return max(feas, stat, dual)


def solve(problem: QpProblem) -> QpSolution:
    """Project the target onto the feasible polytope.

    Returns status "infeasible" (never raises) when the polytope is empty;
    raises QpNumericalError only if certification fails outright.
    """
    g, d = _stacked_rows(problem)

    # fast path: box clamp feasible for all general rows -> done
    x0 = np.clip(problem.target, problem.lb, problem.ub)
    if np.max(d - g @ x0) <= 0.0:
        return QpSolution(x=x0, status=STATUS_OPTIMAL, kkt_residual=0.0)

    result = _active_set_iteration(problem.target, g, d)
    if result is not None:
        x, working, lam = result
        res = _residual(x, problem.target, g, d, working, lam)
        # box bounds are exact by contract; rounding in the equality solve
        # may overshoot them by ~1e-9, which the clip removes
        return QpSolution(x=np.clip(x, problem.lb, problem.ub),
                          status=STATUS_OPTIMAL, kkt_residual=res)

    best = _enumerate(problem.target, g, d)
    if best is None:
        return QpSolution(x=x0, status=STATUS_INFEASIBLE, kkt_residual=float("inf"))
    x, _, lam = best
    feas = float(max(0.0, np.max(d - g @ x)))
    return QpSolution(x=np.clip(x, problem.lb, problem.ub), status=STATUS_OPTIMAL,
                      kkt_residual=max(feas, float(max(0.0, -np.min(lam))) if lam.size else feas))


def least_violating_point(problem: QpProblem) -> np.ndarray:
    """Box-feasible point minimizing the maximum general-row violation.

    Fallback for infeasible filter QPs: solve the minimax LP
    min s  s.t.  b_i - a_i x <= s, lb <= x <= ub, s >= 0
    by bisection on s over box-constrained feasibility subproblems, each of
    which is itself a tiny projection QP (feasible iff its optimum attains
    zero slack violation). Deterministic and self-contained.
    """
    g, d = _stacked_rows(problem)
    lo, hi = 0.0, float(np.max(d - g @ np.clip(problem.target, problem.lb, problem.ub)))
    if hi <= 0.0:
        return np.clip(problem.target, problem.lb, problem.ub)

    def attempt(s):
        relaxed = QpProblem(
            target=problem.target, lb=problem.lb, ub=problem.ub,
            ineq_rows=tuple((a, b - s) for a, b in problem.ineq_rows),
        )
        sol = solve(relaxed)
        return sol.x if sol.status == STATUS_OPTIMAL else None

    best = np.clip(problem.target, problem.lb, problem.ub)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        x = attempt(mid)
        if x is not None:
            best, hi = x, mid
        else:
            lo = mid
        if hi - lo < 1e-12:
            break
    return np.clip(best, problem.lb, problem.ub)
