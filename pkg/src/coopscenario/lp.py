"""Linear programs in ``min c.z  s.t.  G z >= h,  A z = b`` form.

Solved with the HiGHS dual simplex through :func:`scipy.optimize.linprog`, so
optimal points are basic (vertex) solutions and runs are reproducible. Rows
are scaled to unit max-norm before solving; ``tol`` is measured on the scaled
rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import InvalidProgramError, NumericalError

DEFAULT_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

Matrix = Union[np.ndarray, sp.spmatrix, sp.sparray]


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``nonneg`` is a per-variable flag (or one flag for all variables)."""

    c: np.ndarray
    G: Optional[Matrix] = None
    h: Optional[np.ndarray] = None
    A: Optional[Matrix] = None
    b: Optional[np.ndarray] = None
    nonneg: Union[bool, np.ndarray] = True

    @property
    def n_vars(self) -> int:
        return np.asarray(self.c).shape[0]


@dataclass(frozen=True, eq=False)
class LpOutcome:
    status: str
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _as_rows(M, rhs, n: int, name: str):
    if M is None or (not sp.issparse(M) and np.size(M) == 0):
        if rhs is not None and np.size(rhs):
            raise InvalidProgramError(f"{name}: right-hand side given without a matrix")
        return sp.csr_array((0, n)), np.zeros(0)
    M = sp.csr_array(M) if sp.issparse(M) else sp.csr_array(np.atleast_2d(np.asarray(M, dtype=float)))
    rhs = np.atleast_1d(np.asarray(rhs if rhs is not None else [], dtype=float))
    if M.shape[0] == 0:
        M = sp.csr_array((0, n))
    if M.shape[1] != n:
        raise InvalidProgramError(f"{name}: rows have {M.shape[1]} columns, objective has {n}")
    if rhs.shape != (M.shape[0],):
        raise InvalidProgramError(f"{name}: {M.shape[0]} rows but {rhs.shape[0]} right-hand sides")
    if not (np.all(np.isfinite(M.data)) and np.all(np.isfinite(rhs))):
        raise InvalidProgramError(f"{name}: non-finite coefficient")
    return M, rhs


def _normalize(M, rhs):
    scale = np.asarray(abs(M).max(axis=1).todense()).ravel() if M.shape[0] else np.zeros(0)
    zero = scale == 0
    inv = np.where(zero, 1.0, 1.0 / np.where(zero, 1.0, scale))
    return sp.diags_array(inv) @ M, rhs * inv, zero


def _bounds(lp: LinearProgram, n: int):
    flags = np.broadcast_to(np.asarray(lp.nonneg, dtype=bool), (n,))
    return [(0, None) if f else (None, None) for f in flags], flags


def _prepared(lp: LinearProgram):
    c = np.atleast_1d(np.asarray(lp.c, dtype=float))
    if c.ndim != 1 or not np.all(np.isfinite(c)):
        raise InvalidProgramError("objective must be a finite vector")
    n = c.shape[0]
    if np.ndim(lp.nonneg) and np.shape(lp.nonneg) != (n,):
        raise InvalidProgramError(f"nonneg has shape {np.shape(lp.nonneg)}, expected ({n},)")
    G, h = _as_rows(lp.G, lp.h, n, "inequalities")
    A, b = _as_rows(lp.A, lp.b, n, "equalities")
    return c, G, h, A, b


def max_violation(lp: LinearProgram, x: np.ndarray) -> float:
    """Largest constraint violation of ``x`` on unit-max-norm rows."""
    c, G, h, A, b = _prepared(lp)
    x = np.asarray(x, dtype=float)
    worst = 0.0
    Gn, hn, _ = _normalize(G, h)
    An, bn, _ = _normalize(A, b)
    if Gn.shape[0]:
        worst = max(worst, float(np.max(hn - Gn @ x)))
    if An.shape[0]:
        worst = max(worst, float(np.max(np.abs(An @ x - bn))))
    _, flags = _bounds(lp, c.shape[0])
    if flags.any():
        worst = max(worst, float(np.max(-x[flags])))
    return worst


def _highs(c, G, h, A, b, bounds, tol, presolve=True):
    tol = max(tol, 1e-10)
    return linprog(
        c,
        A_ub=-G if G.shape[0] else None,
        b_ub=-h if G.shape[0] else None,
        A_eq=A if A.shape[0] else None,
        b_eq=b if A.shape[0] else None,
        bounds=bounds,
        method="highs-ds",
        options={
            "primal_feasibility_tolerance": tol,
            "dual_feasibility_tolerance": tol,
            "presolve": presolve,
        },
    )


def solve(lp: LinearProgram, tol: float = DEFAULT_TOL) -> LpOutcome:
    """Solve ``lp``; status is one of ``optimal``, ``infeasible``, ``unbounded``."""
    c, G, h, A, b = _prepared(lp)
    n = c.shape[0]
    G, h, gzero = _normalize(G, h)
    A, b, azero = _normalize(A, b)
    # all-zero rows are decided here; HiGHS never sees them
    if np.any(h[gzero] > tol) or np.any(np.abs(b[azero]) > tol):
        return LpOutcome(INFEASIBLE)
    G, h = G[~gzero], h[~gzero]
    A, b = A[~azero], b[~azero]
    bounds, _ = _bounds(lp, n)

    if n == 0:
        return LpOutcome(OPTIMAL, np.zeros(0), 0.0)
    res = _highs(c, G, h, A, b, bounds, tol)
    if res.status == 0:
        x = np.asarray(res.x, dtype=float)
        return LpOutcome(OPTIMAL, x, float(c @ x))
    if res.status in (2, 3):
        # presolve misjudges tightly capped systems now and then; confirm without it
        res = _highs(c, G, h, A, b, bounds, tol, presolve=False)
        if res.status == 0:
            x = np.asarray(res.x, dtype=float)
            return LpOutcome(OPTIMAL, x, float(c @ x))
    if res.status in (2, 3):
        # "infeasible or unbounded" is settled with a pure feasibility solve
        feas = _highs(np.zeros(n), G, h, A, b, bounds, tol, presolve=False)
        if feas.status == 2:
            return LpOutcome(INFEASIBLE)
        if feas.status == 0:
            if res.status == 3 or "unbounded" in res.message.lower():
                return LpOutcome(UNBOUNDED)
            raise NumericalError(f"LP solver disagrees with itself: {res.message}")
        raise NumericalError(f"LP feasibility phase failed: {feas.message}")
    raise NumericalError(f"LP solver failed (status {res.status}): {res.message}")


def check_feasible(lp: LinearProgram, tol: float = DEFAULT_TOL) -> tuple[bool, Optional[np.ndarray]]:
    """Feasibility of the constraint system of ``lp``; returns a witness if feasible."""
    out = solve(LinearProgram(np.zeros(lp.n_vars), lp.G, lp.h, lp.A, lp.b, lp.nonneg), tol)
    if out.status == INFEASIBLE:
        return False, None
    return True, out.x
