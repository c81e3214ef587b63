"""Scenario core polytopes, emptiness, membership and the compression function."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import EmptyCoreError, InvalidProgramError, NumericalError, PreconditionError
from .game import Coalition, ScenarioGame, enumerate_coalitions, incidence_matrix, worst_case_values
from .lp import DEFAULT_TOL, LinearProgram, check_feasible, solve


@dataclass(frozen=True, eq=False)
class CorePolytope:
    """``{x : sum(x) = grand_value, x(S) >= rhs[S] - zeta}``, optionally with ``x >= 0``.

    ``rhs`` follows the canonical coalition order.
    """

    n: int
    grand_value: float
    rhs: np.ndarray
    zeta: float = 0.0
    nonneg: bool = True

    def __post_init__(self):
        if self.zeta < 0:
            raise PreconditionError(f"relaxation zeta must be >= 0, got {self.zeta}")
        rhs = np.array(self.rhs, dtype=float)
        if rhs.shape != (len(enumerate_coalitions(self.n)),):
            raise PreconditionError(f"rhs must have one entry per proper coalition, got shape {rhs.shape}")
        rhs.setflags(write=False)
        object.__setattr__(self, "rhs", rhs)

    @property
    def coalitions(self) -> list[Coalition]:
        return enumerate_coalitions(self.n)

    @property
    def lower_bounds(self) -> np.ndarray:
        """Effective right-hand side ``rhs - zeta`` of every coalition constraint."""
        return self.rhs - self.zeta

    def program(self, objective=None, pinned: Optional[int] = None) -> LinearProgram:
        """Constraint system as an LP; ``pinned`` turns coalition row ``pinned`` into an equality."""
        a = incidence_matrix(self.n)
        eq_rows = [np.ones(self.n)]
        eq_rhs = [self.grand_value]
        if pinned is not None:
            eq_rows.append(a[pinned])
            eq_rhs.append(self.lower_bounds[pinned])
        c = np.zeros(self.n) if objective is None else np.asarray(objective, dtype=float)
        return LinearProgram(c, a, self.lower_bounds, np.array(eq_rows), np.array(eq_rhs), self.nonneg)


def build_core(sg: ScenarioGame, zeta: float = 0.0, nonneg: bool = True) -> CorePolytope:
    """Scenario (zeta-)core of ``sg``: every coalition bounded by its sample-wise maximum."""
    return CorePolytope(sg.n, sg.grand_value, worst_case_values(sg).values, zeta, nonneg)


def is_empty(core: CorePolytope, tol: float = DEFAULT_TOL) -> tuple[bool, Optional[np.ndarray]]:
    feasible, witness = check_feasible(core.program(), tol)
    return (not feasible), witness


def membership(core: CorePolytope, x, tol: float = DEFAULT_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    if x.shape != (core.n,):
        raise InvalidProgramError(f"allocation must have {core.n} entries, got shape {x.shape}")
    if abs(x.sum() - core.grand_value) > tol:
        return False
    if core.nonneg and np.any(x < -tol):
        return False
    return bool(np.all(incidence_matrix(core.n) @ x >= core.lower_bounds - tol))


def apriori_complexity(n: int) -> int:
    """Number of proper nonempty coalitions, the a priori bound on compression size."""
    return len(enumerate_coalitions(n))


class ProbeRecord(NamedTuple):
    coalition: Coalition
    feasible: bool
    attaining: int


@dataclass(frozen=True)
class CompressionResult:
    indices: tuple[int, ...]
    records: tuple[ProbeRecord, ...] = field(repr=False)

    @property
    def cardinality(self) -> int:
        return len(self.indices)


def compression_set(sg: ScenarioGame, nonneg: bool = True, tol: float = DEFAULT_TOL) -> CompressionResult:
    """Samples that define a touching facet of the scenario core.

    For each coalition the constraint is pinned to equality; if the pinned
    system is still feasible, the (first) sample attaining that coalition's
    maximum joins the compression set. Sample indices are 0-based.
    """
    core = build_core(sg, 0.0, nonneg)
    empty, _ = is_empty(core, tol)
    if empty:
        raise EmptyCoreError(
            "scenario core is empty, so no compression set exists; solve the relaxed program instead"
        )
    attaining = worst_case_values(sg).attaining
    chosen: set[int] = set()
    records = []
    for row, mask in enumerate(core.coalitions):
        feasible, _ = check_feasible(core.program(pinned=row), tol)
        if feasible:
            chosen.add(int(attaining[row]))
        records.append(ProbeRecord(mask, feasible, int(attaining[row])))
    return CompressionResult(tuple(sorted(chosen)), tuple(records))


def coalition_minima(core: CorePolytope, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``min x(S)`` over the core for every proper coalition (canonical order)."""
    a = incidence_matrix(core.n)
    out = np.empty(a.shape[0])
    for row in range(a.shape[0]):
        res = solve(core.program(objective=a[row]), tol)
        if res.status == "infeasible":
            raise EmptyCoreError("coalition minima are undefined on an empty core")
        if res.status == "unbounded":
            raise NumericalError(f"coalition row {row} is unbounded below on the core")
        # the LP may undershoot the bound it is constrained by at round-off level
        out[row] = max(res.objective, core.lower_bounds[row])
    return out
