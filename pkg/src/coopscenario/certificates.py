"""Distribution-free violation levels for scenario-based certificates.

All binomial coefficients are handled through ``gammaln`` so that sample
counts in the thousands never overflow.

The risk interval solves, for complexity ``s < K``,

    C(K,s) t^(K-s) - b/(2K) sum_{i=s}^{K-1} C(i,s) t^(i-s)
                   - b/(6K) sum_{i=K+1}^{4K} C(i,s) t^(i-s) = 0

and, for ``s = K``, ``1 - b/(6K) sum_{i=K+1}^{4K} C(i,K) t^(i-K) = 0``. With
``u = log t`` the log-ratio of the positive to the negative part is concave
in ``u``, which gives exactly two roots (one for ``s = K``) and safe brackets.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import NumericalError, PreconditionError

EPSILON_SPLIT = "uniform: each complexity level s < K receives confidence beta/K"

_MAX_BRACKET_STEPS = 200
_MAX_BISECTIONS = 400


def log_binom(n, k):
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _check(K: int, s: int, beta: float):
    if not 0 < beta < 1:
        raise PreconditionError(f"confidence parameter beta must lie in (0, 1), got {beta}")
    if K < 1:
        raise PreconditionError(f"sample count must be >= 1, got K={K}")
    if not 0 <= s <= K:
        raise PreconditionError(f"complexity must lie in [0, K={K}], got s={s}")


def eps_posteriori(K: int, beta: float, s: int) -> float:
    """A posteriori violation level for a compression set of size ``s``.

    ``(1 - eps(s))^(K-s) C(K,s) = beta/K`` for every ``s < K`` so the levels
    sum to ``beta`` exactly; ``eps(K) = 1``.
    """
    _check(K, s, beta)
    if s == K:
        return 1.0
    log_rest = (math.log(beta / K) - float(log_binom(K, s))) / (K - s)
    return -math.expm1(log_rest)


def eps_apriori(K: int, d: int, beta: float) -> float:
    """Level with ``C(K,d) (1 - eps)^(K-d) = beta`` for a complexity bound ``d < K``."""
    if not 0 < beta < 1:
        raise PreconditionError(f"confidence parameter beta must lie in (0, 1), got {beta}")
    if d < 0 or K <= d:
        raise PreconditionError(f"a priori level needs K > d >= 0, got K={K}, d={d}")
    return -math.expm1((math.log(beta) - float(log_binom(K, d))) / (K - d))


class _RiskEquation:
    """Log-ratio ``h(u) = log(positive part) - log(negative part)`` at ``t = exp(u)``."""

    def __init__(self, K: int, s: int, beta: float):
        self.K, self.s = K, s
        hi = np.arange(K + 1, 4 * K + 1)
        neg_c = [math.log(beta / (6 * K)) + log_binom(hi, s)]
        neg_d = [hi - s]
        if s < K:
            lo = np.arange(s, K)
            neg_c.insert(0, math.log(beta / (2 * K)) + log_binom(lo, s))
            neg_d.insert(0, lo - s)
            self.pos_c, self.pos_d = float(log_binom(K, s)), float(K - s)
        else:
            self.pos_c, self.pos_d = 0.0, 0.0
        self.neg_c = np.concatenate(neg_c)
        self.neg_d = np.concatenate(neg_d).astype(float)

    def h(self, u: float) -> float:
        return self.pos_c + self.pos_d * u - float(logsumexp(self.neg_c + self.neg_d * u))

    def slope(self, u: float) -> float:
        z = self.neg_c + self.neg_d * u
        w = np.exp(z - z.max())
        return self.pos_d - float(w @ self.neg_d / w.sum())

    def residual(self, t: float) -> float:
        """``|pos - neg| / max(pos, neg)``; 0 at an exact root."""
        if t <= 0:
            return 1.0 if self.s < self.K else 0.0
        return -math.expm1(-abs(self.h(math.log(t))))


def risk_residual(K: int, s: int, beta: float, t: float) -> float:
    """Relative residual of the risk polynomial at ``t`` (dominant-term scaled)."""
    _check(K, s, beta)
    return _RiskEquation(K, s, beta).residual(t)


def _bisect(f, lo: float, hi: float) -> float:
    """Root of ``f`` with ``f(lo) < 0 < f(hi)`` or the reverse, to float resolution."""
    flo = f(lo)
    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _expand(f, start: float, step: float) -> float:
    """Walk from ``start`` by doubling steps until ``f`` turns negative."""
    u = start
    for _ in range(_MAX_BRACKET_STEPS):
        u += step
        if f(u) < 0:
            return u
        step *= 2
    raise NumericalError("could not bracket a root of the risk polynomial")


def risk_roots(K: int, s: int, beta: float) -> tuple[float, float]:
    """Nonnegative roots ``(t_lo, t_hi)`` of the risk polynomial; ``t_lo = 0`` when ``s = K``."""
    _check(K, s, beta)
    eq = _RiskEquation(K, s, beta)
    if s == K:
        # h is decreasing in u and tends to +inf as t -> 0
        lo = 0.0 if eq.h(0.0) > 0 else _expand(lambda u: -eq.h(u), 0.0, -1.0)
        hi = 0.0 if eq.h(0.0) < 0 else _expand(eq.h, 0.0, 1.0)
        return 0.0, math.exp(_bisect(eq.h, lo, hi))

    # peak of the concave log-ratio: slope falls from K - s > 0 to -3K < 0
    s0 = eq.slope(0.0)
    if s0 == 0:
        peak = 0.0
    else:
        left = 0.0 if s0 > 0 else _expand(lambda u: -eq.slope(u), 0.0, -1.0)
        right = 0.0 if s0 < 0 else _expand(eq.slope, 0.0, 1.0)
        peak = _bisect(eq.slope, left, right)
    if eq.h(peak) <= 0:
        raise NumericalError(
            f"risk polynomial has no positive region for K={K}, s={s}, beta={beta}"
        )
    u_low = _expand(eq.h, peak, -1.0)
    u_high = _expand(eq.h, peak, 1.0)
    return math.exp(_bisect(eq.h, u_low, peak)), math.exp(_bisect(eq.h, peak, u_high))


def risk_interval(K: int, s: int, beta: float) -> tuple[float, float]:
    """Lower and upper violation levels ``(max(0, 1 - t_hi), 1 - t_lo)``."""
    t_lo, t_hi = risk_roots(K, s, beta)
    return max(0.0, 1.0 - t_hi), min(1.0, max(0.0, 1.0 - t_lo))


def theta_bound(K: int, s: int, beta: float) -> float:
    """Explicit, more conservative upper level for ``s >= 1`` (clamped to 1)."""
    _check(K, s, beta)
    if s == 0:
        raise PreconditionError("explicit bound is undefined for s = 0; use risk_interval")
    r = math.sqrt(s)
    lam = math.log(beta / (2 * (s + 1)) + math.exp(1 / r)) + r / (r + 1)
    theta = s / K + (r + 1) / K * (lam + math.log(2 / beta) + math.log(s + 1))
    return min(1.0, theta)


@dataclass(frozen=True)
class CertificateReport:
    K: int
    beta: float
    s: int
    eps_posteriori: Optional[float] = None
    eps_apriori: Optional[float] = None
    risk_lo: Optional[float] = None
    risk_hi: Optional[float] = None
    theta: Optional[float] = None
    epsilon_split: str = EPSILON_SPLIT
    assumptions: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["assumptions"] = list(self.assumptions)
        return d


def core_certificate(K: int, s: int, beta: float, n_agents: Optional[int] = None) -> CertificateReport:
    """Certificate for the whole scenario core given its compression size.

    The a priori level is added when ``n_agents`` is known and ``K > 2^n``.
    """
    apriori = None
    if n_agents is not None and K > 2 ** n_agents:
        apriori = eps_apriori(K, 2 ** n_agents - 2, beta)
    return CertificateReport(
        K=K,
        beta=beta,
        s=s,
        eps_posteriori=eps_posteriori(K, beta, s),
        eps_apriori=apriori,
        assumptions=("scenario core nonempty",),
    )
