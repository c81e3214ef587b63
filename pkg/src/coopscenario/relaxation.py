"""Least-core allocations from the scenario program with per-sample slack.

The program is

    min  sum_k xi_k
    s.t. sum_i x_i = u(N),  x >= 0,  xi >= 0,
         x(S) >= u(S, d^(k)) - xi_k   for every proper S and sample k,

i.e. the epigraph form ``max_S (u(S, d^(k)) - x(S)) <= xi_k``. Ties between
optimal allocations are broken in two convex stages: first the largest
margin ``t`` by which every scenario row ``x(S) + xi_k - u(S, d^(k)) >= t``
can be met, then lexicographically (smallest ``x_1``, then ``x_2``, ...).
The first stage keeps ``x*`` off the boundary whenever the scenario core has
interior points, so that rounding never turns a tie into a violation; the
second makes the optimizer unique.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .certificates import CertificateReport, risk_interval, theta_bound
from .errors import NumericalError
from .game import ScenarioGame, incidence_matrix
from .lp import DEFAULT_TOL, LinearProgram, solve

_CAP_FACTORS = (1.0, 10.0, 100.0, 1000.0)
_EMPTY_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class RelaxationResult:
    x_star: np.ndarray
    xi_star: np.ndarray
    zeta_star: float
    s_star: int
    core_nonempty: bool
    objective: float

    @property
    def K(self) -> int:
        return self.xi_star.shape[0]

    @property
    def robust_core_empty(self) -> Optional[bool]:
        """``True`` when the data prove the robust core empty, ``None`` when undecided.

        A nonempty scenario core says nothing about the robust core, so this is
        never ``False``.
        """
        return True if not self.core_nonempty else None


def slack_closed_form(sg: ScenarioGame, x) -> np.ndarray:
    """Smallest feasible slack per sample for a fixed allocation."""
    excess = sg.values - (incidence_matrix(sg.n) @ np.asarray(x, dtype=float))[:, None]
    return np.maximum(0.0, excess.max(axis=0))


def relaxed_program(sg: ScenarioGame) -> LinearProgram:
    """Monolithic epigraph LP over ``z = (x, xi)``."""
    n, K = sg.n, sg.K
    a = sp.csr_array(incidence_matrix(n))
    m = a.shape[0]
    # row k*m + r  <->  coalition r, sample k
    x_block = sp.vstack([a] * K, format="csr")
    xi_block = sp.kron(sp.eye_array(K), sp.csr_array(np.ones((m, 1))), format="csr")
    G = sp.hstack([x_block, xi_block], format="csr")
    h = sg.values.T.reshape(-1)
    A = np.concatenate([np.ones(n), np.zeros(K)])[None, :]
    c = np.concatenate([np.zeros(n), np.ones(K)])
    return LinearProgram(c, G, h, A, np.array([sg.grand_value]), True)


def count_active_samples(sg: ScenarioGame, x, tol: float = DEFAULT_TOL) -> int:
    """Samples for which some coalition has ``x(S) <= u(S, d^(k))`` (ties count)."""
    shares = incidence_matrix(sg.n) @ np.asarray(x, dtype=float)
    return int(np.count_nonzero(np.any(shares[:, None] <= sg.values + tol, axis=0)))


def _add_cap(lp: LinearProgram, row: np.ndarray, cap: float) -> LinearProgram:
    # row . z <= cap, written as -row . z >= -cap
    G = sp.vstack([lp.G, sp.csr_array(-row[None, :])], format="csr")
    return LinearProgram(lp.c, G, np.append(lp.h, -cap), lp.A, lp.b, lp.nonneg)


def _tie_break(lp: LinearProgram, n: int, K: int, best: float, tol: float, cap_slack: float):
    """Among slack-optimal points: largest common margin, then smallest ``x_1``, ``x_2``, ...

    Works on ``z = (x, xi, t)`` with every scenario row shifted by the margin
    ``t``. Returns ``None`` if a pass fails.
    """
    G = sp.hstack([lp.G, sp.csr_array(-np.ones((lp.G.shape[0], 1)))], format="csr")
    A = np.hstack([lp.A, np.zeros((1, 1))])
    nonneg = np.concatenate([np.ones(n + K, dtype=bool), [False]])
    lp = LinearProgram(np.zeros(n + K + 1), G, lp.h, A, lp.b, nonneg)
    slack_row = np.concatenate([np.zeros(n), np.ones(K), [0.0]])
    lp = _add_cap(lp, slack_row, best + cap_slack * (1 + abs(best)))

    margin = np.zeros(n + K + 1)
    margin[-1] = -1.0
    step = solve(LinearProgram(margin, lp.G, lp.h, lp.A, lp.b, lp.nonneg), tol)
    if not step.optimal:
        return None
    t = -step.objective
    lp = _add_cap(lp, margin, -(t - cap_slack * (1 + abs(t))))
    z = step.x
    # the efficiency equality pins the last coordinate once the others are fixed
    for j in range(n - 1):
        unit = np.zeros(n + K + 1)
        unit[j] = 1.0
        step = solve(LinearProgram(unit, lp.G, lp.h, lp.A, lp.b, lp.nonneg), tol)
        if not step.optimal:
            return None
        z = step.x
        lp = _add_cap(lp, unit, step.objective + cap_slack * (1 + abs(step.objective)))
    return z[: n + K]


def solve_relaxed(sg: ScenarioGame, tol: float = DEFAULT_TOL, tie_break: bool = True) -> RelaxationResult:
    n, K = sg.n, sg.K
    lp = relaxed_program(sg)
    first = solve(lp, tol)
    if not first.optimal:
        raise NumericalError(f"relaxed scenario program returned status {first.status}")
    z = first.x
    if tie_break:
        # caps at the computed optimum can be a hair too tight for the solver's
        # own tolerance; widen them only when a pass actually fails
        for factor in _CAP_FACTORS:
            tied = _tie_break(lp, n, K, first.objective, tol, factor * tol)
            if tied is not None:
                z = tied
                break
        else:
            raise NumericalError("lexicographic tie-break failed at every cap width")
    x = np.maximum(z[:n], 0.0)
    xi = slack_closed_form(sg, x)
    # slack within solver tolerance is reported as exactly zero
    xi[xi <= _EMPTY_FACTOR * tol * (1.0 + float(np.abs(sg.values).max()))] = 0.0
    return RelaxationResult(
        x_star=x,
        xi_star=xi,
        zeta_star=float(xi.max()),
        s_star=count_active_samples(sg, x, tol),
        core_nonempty=not bool(np.any(xi)),
        objective=float(xi.sum()),
    )


def certify_relaxed(result: RelaxationResult, beta: float) -> CertificateReport:
    lo, hi = risk_interval(result.K, result.s_star, beta)
    return CertificateReport(
        K=result.K,
        beta=beta,
        s=result.s_star,
        risk_lo=lo,
        risk_hi=hi,
        theta=theta_bound(result.K, result.s_star, beta) if result.s_star >= 1 else None,
        assumptions=(
            "unique optimizer (max-margin, then lexicographic tie-break on the allocation)",
            "non-accumulation of the uncertainty (assumed, not checked)",
        ),
    )
