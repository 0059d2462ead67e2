"""Exact renewal masses u_n, their extremes, sandwich envelopes and limit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional

from renewal_lab.errors import DegenerateLaw, HorizonTooShort, PeriodicWalk
from renewal_lab.masses import MassVector, period
from renewal_lab.rational import format_rational, format_rational_list


@dataclass(frozen=True)
class RenewalSeq:
    """u_0..u_{n_max} stored as ``u_n = numerators[n] / denominator**n``.

    ``denominator`` is the lcm of the mass denominators, so the recurrence runs
    on Python ints and never reduces a fraction. ``u`` materialises Fractions
    on first access.
    """

    masses: MassVector
    n_max: int
    numerators: tuple[int, ...] = field(repr=False)
    denominator: int

    def value(self, n: int) -> Fraction:
        return Fraction(self.numerators[n], self.denominator**n)

    @cached_property
    def u(self) -> tuple[Fraction, ...]:
        return tuple(self.value(n) for n in range(self.n_max + 1))

    def scaled(self, n: int, horizon: Optional[int] = None) -> int:
        """``u_n * D**horizon`` as an int, for comparisons without division."""
        horizon = self.n_max if horizon is None else horizon
        return self.numerators[n] * self.denominator ** (horizon - n)


def compute_renewal(m: MassVector, n_max: int) -> RenewalSeq:
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    den = math.lcm(*(x.denominator for x in m.p))
    # u_n D^n = sum_l (p_l D) D^(l-1) (u_{n-l} D^(n-l))
    weights = [int(pl * den) * den ** (l - 1) for l, pl in enumerate(m.p, start=1)]
    nums = [1]
    for n in range(1, n_max + 1):
        acc = 0
        for l in range(1, min(n, m.k) + 1):
            w = weights[l - 1]
            if w:
                acc += w * nums[n - l]
        nums.append(acc)
    return RenewalSeq(m, n_max, tuple(nums), den)


def check_recurrence(seq: RenewalSeq) -> Optional[int]:
    """Re-verify the recurrence on the Fraction values; return the first bad index."""
    u, p = seq.u, seq.masses.p
    if u[0] != 1:
        return 0
    for n in range(1, seq.n_max + 1):
        rhs = sum((p[l - 1] * u[n - l] for l in range(1, min(n, len(p)) + 1)), Fraction(0))
        if u[n] != rhs or not 0 <= u[n] <= 1:
            return n
    return None


@dataclass(frozen=True)
class ExtremesReport:
    maximum: Fraction
    argmax: int
    minimum: Fraction
    argmin: int
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "M": format_rational(self.maximum),
            "argmax": self.argmax,
            "m": format_rational(self.minimum),
            "argmin": self.argmin,
            "degenerate": self.degenerate,
        }


def _argbest(values, indices, better) -> int:
    best = indices[0]
    for i in indices[1:]:
        if better(values[i], values[best]):
            best = i
    return best


def extremes(m: MassVector) -> ExtremesReport:
    """M_k = max(u_1..u_k) and m_k = min(u_1..u_{k-1}), smallest attaining indices.

    For k = 1 the walk renews at every integer; M = m = 1 and the report is
    flagged degenerate.
    """
    if m.k == 1:
        return ExtremesReport(Fraction(1), 1, Fraction(1), 1, degenerate=True)
    u = compute_renewal(m, m.k).u
    hi = _argbest(u, list(range(1, m.k + 1)), lambda a, b: a > b)
    lo = _argbest(u, list(range(1, m.k)), lambda a, b: a < b)
    return ExtremesReport(u[hi], hi, u[lo], lo)


@dataclass(frozen=True)
class WindowReport:
    horizon: int
    max_holds: bool
    first_max_violation: Optional[int]
    min_checked: bool
    min_holds: bool
    first_min_violation: Optional[int]

    @property
    def holds(self) -> bool:
        return self.max_holds and self.min_holds

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "holds": self.holds,
            "max_holds": self.max_holds,
            "first_max_violation": self.first_max_violation,
            "min_checked": self.min_checked,
            "min_holds": self.min_holds,
            "first_min_violation": self.first_min_violation,
        }


def verify_extremes_window(m: MassVector, horizon: int) -> WindowReport:
    """Check u_n < M_k for k < n <= horizon and, for aperiodic walks, u_n > m_k for k-1 < n <= horizon.

    The lower check is skipped (``min_checked=False``) for periodic walks.
    Raises DegenerateLaw when some p_j = 1.
    """
    if any(x == 1 for x in m.p):
        raise DegenerateLaw(f"p_{m.k} = 1: the walk is deterministic")
    if horizon <= m.k:
        raise HorizonTooShort(f"horizon must exceed k={m.k}")
    seq = compute_renewal(m, horizon)
    k = m.k
    top = max(seq.scaled(n) for n in range(1, k + 1))
    bad_max = next((n for n in range(k + 1, horizon + 1) if seq.scaled(n) >= top), None)
    min_checked = period(m) == 1
    bad_min = None
    if min_checked:
        bottom = min(seq.scaled(n) for n in range(1, k))
        bad_min = next((n for n in range(k, horizon + 1) if seq.scaled(n) <= bottom), None)
    return WindowReport(horizon, bad_max is None, bad_max, min_checked, bad_min is None, bad_min)


class Envelopes(NamedTuple):
    """Running max ``b`` and min ``c`` of the previous k masses; ``b[i]`` is b_{start+i}."""

    start: int
    b: tuple[Fraction, ...]
    c: tuple[Fraction, ...]

    def at(self, n: int) -> tuple[Fraction, Fraction]:
        return self.b[n - self.start], self.c[n - self.start]


def envelopes(seq: RenewalSeq) -> Envelopes:
    k = seq.masses.k
    if seq.n_max < k:
        raise HorizonTooShort(f"envelopes need n_max >= k={k}")
    u = seq.u
    b, c = [], []
    for n in range(k, seq.n_max + 1):
        window = u[n - k : n]
        b.append(max(window))
        c.append(min(window))
    return Envelopes(k, tuple(b), tuple(c))


def blackwell_limit(m: MassVector) -> Fraction:
    if period(m) != 1:
        raise PeriodicWalk(f"walk has period {period(m)}; u_n has no limit")
    return 1 / m.mean()


@dataclass(frozen=True)
class ConvergenceProfile:
    limit: Fraction
    gaps: tuple[float, ...]
    threshold: Fraction
    converged: bool

    def to_json(self) -> dict:
        return {
            "limit": format_rational(self.limit),
            "gaps": [repr(g) for g in self.gaps],
            "threshold": format_rational(self.threshold),
            "converged": self.converged,
        }


def convergence_profile(
    m: MassVector, n_max: int, threshold: Fraction = Fraction(1, 10**6)
) -> ConvergenceProfile:
    """|u_n - 1/E[X]| for n = 0..n_max; ``converged`` compares the last gap exactly."""
    limit = blackwell_limit(m)
    seq = compute_renewal(m, n_max)
    exact = [abs(seq.value(n) - limit) for n in range(n_max + 1)]
    return ConvergenceProfile(
        limit, tuple(float(g) for g in exact), Fraction(threshold), exact[-1] < threshold
    )


def renewal_report(m: MassVector, n_max: int) -> dict:
    """JSON-ready summary used by the CLI ``compute`` command."""
    seq = compute_renewal(m, n_max)
    ext = extremes(m)
    report = {
        "masses": m.to_json(),
        "n_max": n_max,
        "u": format_rational_list(seq.u),
        **ext.to_json(),
        "period": period(m),
    }
    if n_max >= m.k:
        env = envelopes(seq)
        report["envelope_start"] = env.start
        report["b"] = format_rational_list(env.b)
        report["c"] = format_rational_list(env.c)
    if period(m) == 1:
        report["limit"] = format_rational(blackwell_limit(m))
    else:
        report["limit"] = None
        report["note"] = f"periodic walk (period {period(m)}): no Blackwell limit"
    return report
