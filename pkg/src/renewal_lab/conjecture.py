"""Probes of the lower-envelope conjecture for the renewal minimum m_k.

* a perturbation construction showing that the class of degree <= k-1
  polynomials below m_k has no largest element;
* exact checks of the k = 3 case (m_3 formula, hat-slice constraint and the
  determinant identity that closes the argument);
* an LP dominance search looking for polynomials that sit above Q_k and
  below m_k on a grid, with every float candidate re-checked exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from renewal_lab.errors import (
    BoundaryPoint,
    LPInfeasible,
    LPUnbounded,
    NoPositiveA,
    OutOfRange,
    RequiresTwoRegions,
)
from renewal_lab.masses import SamplePlan, SimplexPoint, sample_simplex
from renewal_lab.polylab import (
    MultiPoly,
    build_P,
    build_Q,
    evaluate_at,
    hat_constraint_rows,
    monomial_basis,
    renewal_minimum,
)
from renewal_lab.rational import format_rational, format_rational_list

MAX_SEARCH_K = 5
BISECTION_STEPS = 32
#: Float LP coefficients are snapped to rationals with at most this denominator.
RATIONALIZE_DENOMINATOR = 1 << 20

DEFAULT_DEMO_POINTS = {
    3: [("1/4", "1/2"), ("3/4", "0")],
}


def region_classify(k: int, pt: SimplexPoint) -> Optional[int]:
    """The l whose P_l is strictly smallest at ``pt``; None on a tie."""
    if k < 3:
        raise OutOfRange("regions are only interesting for k >= 3")
    values = [evaluate_at(build_P(l, k).substituted, pt) for l in range(1, k)]
    low = min(values)
    winners = [l for l, v in enumerate(values, start=1) if v == low]
    return winners[0] if len(winners) == 1 else None


@dataclass(frozen=True)
class PerturbationCertificate:
    """``P_l - a |p - p0|^2`` stays below m_k on ``scan`` and touches it at ``p0``."""

    k: int
    l: int
    p0: SimplexPoint
    a: Fraction
    scan: SamplePlan
    margin: Fraction
    touch_value: Fraction

    def perturbed(self) -> MultiPoly:
        nv = self.k - 1
        well = MultiPoly.zero(nv)
        for j, c in enumerate(self.p0.q, start=1):
            diff = MultiPoly.variable(j, nv) - c
            well = well + diff * diff
        return build_P(self.l, self.k).substituted - well.scale(self.a)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "region": self.l,
            "p0": format_rational_list(self.p0.q),
            "a": format_rational(self.a),
            "scan": self.scan.to_json(),
            "margin": format_rational(self.margin),
            "touch_value": format_rational(self.touch_value),
            "perturbed": self.perturbed().to_text(),
        }


def _squared_distance(pt: SimplexPoint, p0: SimplexPoint) -> Fraction:
    return sum(((x - y) ** 2 for x, y in zip(pt.q, p0.q)), Fraction(0))


def build_perturbation(k: int, pt0: SimplexPoint, scan: SamplePlan) -> PerturbationCertificate:
    """Find a > 0 with ``min_scan (m_k - P_l + a d^2) >= 0``.

    The margin grows with ``a``. Try ``a = 1``; if that fails, double until
    the scan margin is nonnegative and then bisect between the last failing
    and first passing value for ``BISECTION_STEPS`` steps, keeping the passing end.
    """
    l = region_classify(k, pt0)
    if l is None:
        raise BoundaryPoint(f"{pt0.q} lies on a tie between renewal polynomials")
    P = build_P(l, k).substituted
    slack, dist = [], []
    for g in sample_simplex(k, scan):
        slack.append(renewal_minimum(g) - evaluate_at(P, g))
        dist.append(_squared_distance(g, pt0))

    def margin(a: Fraction) -> Fraction:
        return min(s + a * d for s, d in zip(slack, dist))

    a = Fraction(1)
    if margin(a) < 0:
        low = a
        for _ in range(BISECTION_STEPS):
            a *= 2
            if margin(a) >= 0:
                break
            low = a
        else:
            raise NoPositiveA(f"no a up to {a} clears the scan around {pt0.q}")
        high = a
        for _ in range(BISECTION_STEPS):
            mid = (low + high) / 2
            if margin(mid) >= 0:
                high = mid
            else:
                low = mid
        a = high
    touch = evaluate_at(P, pt0)
    return PerturbationCertificate(k, l, pt0, a, scan, margin(a), touch)


def recheck_certificate(cert: PerturbationCertificate) -> bool:
    """Independent exact re-evaluation of a certificate's invariants."""
    perturbed = cert.perturbed()
    if evaluate_at(perturbed, cert.p0) != renewal_minimum(cert.p0):
        return False
    if region_classify(cert.k, cert.p0) != cert.l:
        return False
    worst = min(
        renewal_minimum(g) - evaluate_at(perturbed, g) for g in sample_simplex(cert.k, cert.scan)
    )
    return worst >= 0 and worst == cert.margin


def region_representatives(k: int, resolution: int = 8) -> list[SimplexPoint]:
    """One grid point per region, the one where its P_l wins by the widest margin."""
    best: dict[int, tuple[Fraction, SimplexPoint]] = {}
    for pt in sample_simplex(k, SamplePlan.grid(resolution)):
        values = sorted(
            (evaluate_at(build_P(l, k).substituted, pt), l) for l in range(1, k)
        )
        gap = values[1][0] - values[0][0]
        if gap > 0:
            l = values[0][1]
            if l not in best or gap > best[l][0]:
                best[l] = (gap, pt)
    return [best[l][1] for l in sorted(best)]


@dataclass(frozen=True)
class NoLargestReport:
    k: int
    certificates: tuple[PerturbationCertificate, ...]

    @property
    def regions(self) -> list[int]:
        return sorted({c.l for c in self.certificates})

    def explanation(self) -> str:
        return (
            f"Each perturbed polynomial is a member of the class for k={self.k} and equals "
            f"m_{self.k} at its touch point. A largest member would have to dominate all of "
            f"them, hence agree with m_{self.k} at every touch point; touch points exist in "
            f"regions {self.regions}, and repeating the construction at every regular point "
            f"would force it to equal the piecewise minimum m_{self.k}, which is not a polynomial."
        )

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "regions": self.regions,
            "certificates": [c.to_json() for c in self.certificates],
            "explanation": self.explanation(),
        }


def no_largest_demo(
    k: int, pts: Optional[Sequence[SimplexPoint]] = None, scan: Optional[SamplePlan] = None
) -> NoLargestReport:
    if k < 3:
        raise OutOfRange("the demo needs k >= 3")
    if pts is None:
        if k in DEFAULT_DEMO_POINTS:
            pts = [SimplexPoint.of(k, q) for q in DEFAULT_DEMO_POINTS[k]]
        else:
            pts = region_representatives(k)
    if scan is None:
        scan = SamplePlan.grid(64 if k == 3 else 12)
    regions = {region_classify(k, p) for p in pts}
    regions.discard(None)
    if len(regions) < 2:
        raise RequiresTwoRegions(f"points cover regions {sorted(regions)}; need two")
    certs = tuple(build_perturbation(k, p, scan) for p in pts)
    return NoLargestReport(k, certs)


# ---------------------------------------------------------------------------
# k = 3
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked, "detail": self.detail}


def verify_k3_m3(plan: SamplePlan) -> CheckResult:
    """m_3 from the recurrence equals min(p1, p1^2 + p2) at every sampled point."""
    checked = 0
    for pt in sample_simplex(3, plan):
        p1, p2 = pt.q
        checked += 1
        lhs, rhs = renewal_minimum(pt), min(p1, p1 * p1 + p2)
        if lhs != rhs:
            return CheckResult("k3_m3", False, checked, f"at {pt.q}: {lhs} != {rhs}")
    return CheckResult("k3_m3", True, checked)


COEFF_NAMES = ("a", "b", "c", "d", "e", "f")


@dataclass(frozen=True)
class HatConstraintReport:
    """Symbolic outcome for ``P = a p1^2 + b p1 p2 + c p2^2 + d p1 + e p2 + f``."""

    leading_coefficient: MultiPoly  # coefficient of p1^2 in P(p1, 1 - p1), in (a..f)
    b_solution: MultiPoly  # b expressed through the others
    determinant: MultiPoly  # 4(a-1)c - (b-1)^2 with b eliminated
    square_form: MultiPoly  # -(a - c - 1)^2
    identity_holds: bool

    def to_json(self) -> dict:
        return {
            "leading_coefficient": self.leading_coefficient.to_text(COEFF_NAMES),
            "b": self.b_solution.to_text(COEFF_NAMES),
            "determinant": self.determinant.to_text(COEFF_NAMES),
            "square_form": self.square_form.to_text(COEFF_NAMES),
            "identity_holds": self.identity_holds,
        }


def verify_k3_hat_constraint() -> HatConstraintReport:
    """Derive the degree-1 condition on the first hat slice and the determinant identity.

    The first hat slice of P is ``P(p1, 1 - p1)``; for it to have degree one
    its p1^2 coefficient must vanish. That linear condition is solved for b
    and substituted into ``4 det`` of ``H = P - Q_3``, whose quadratic part
    is ``(a-1) p1^2 + (b-1) p1 p2 + c p2^2``.
    """
    nv = 8  # a b c d e f p1 p2
    a, b, c, d, e, f, p1, p2 = (MultiPoly.variable(j, nv) for j in range(1, nv + 1))
    P = a * p1 * p1 + b * p1 * p2 + c * p2 * p2 + d * p1 + e * p2 + f
    one = MultiPoly.constant(1, nv)
    sliced = P.compose([a, b, c, d, e, f, p1, one - p1])
    lead_terms = {ex[:6]: co for ex, co in sliced.terms.items() if ex[6] == 2 and ex[7] == 0}
    lead = MultiPoly(6, lead_terms)

    # lead is linear in (a..f); solve lead = 0 for b
    b_exp = (0, 1, 0, 0, 0, 0)
    b_coef = lead.coefficient(b_exp)
    rest = lead - MultiPoly(6, {b_exp: b_coef})
    b_sol = rest.scale(-1 / b_coef)

    A, B, C, D, E, F = (MultiPoly.variable(j, 6) for j in range(1, 7))
    det = (A - 1).scale(4) * C - (B - 1) * (B - 1)
    det = det.compose([A, b_sol, C, D, E, F])
    square = -((A - C - 1) * (A - C - 1))
    return HatConstraintReport(lead, b_sol, det, square, det == square)


# ---------------------------------------------------------------------------
# dominance LP
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactRecheck:
    """``clean``: feasible with zero gain; ``refuted``: violates a constraint; ``anomaly``: survives with gain > 0."""

    verdict: str
    plan: SamplePlan
    gain: Fraction
    witness: Optional[SimplexPoint] = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "plan": self.plan.to_json(),
            "gain": format_rational(self.gain),
            "witness": None if self.witness is None else format_rational_list(self.witness.q),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class DominanceProbeResult:
    k: int
    constraint_set: str
    grid: SamplePlan
    objective: float
    raw_coefficients: tuple[float, ...]
    best_candidate: MultiPoly
    exact_recheck: ExactRecheck
    lp_status: str = field(default="optimal")

    def reproduce(self) -> str:
        return f"renewal-lab probe --k {self.k} --class {self.constraint_set} --grid {self.grid.resolution}"

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "class": self.constraint_set,
            "grid": self.grid.to_json(),
            "objective": repr(self.objective),
            "lp_status": self.lp_status,
            "raw_coefficients": [repr(x) for x in self.raw_coefficients],
            "candidate": self.best_candidate.to_text(),
            "q_k": build_Q(self.k, self.k).to_text(),
            "exact_recheck": self.exact_recheck.to_json(),
            "reproduce": self.reproduce(),
        }


def _monomial_values(basis, pt: SimplexPoint) -> list[Fraction]:
    out = []
    for e in basis:
        v = Fraction(1)
        for x, n in zip(pt.q, e):
            if n:
                v *= x**n
        out.append(v)
    return out


def exact_recheck(
    candidate: MultiPoly, k: int, constraint_set: str, plan: SamplePlan
) -> ExactRecheck:
    Qk = build_Q(k, k)
    if constraint_set == "a-hat":
        basis = monomial_basis(k - 1, k - 1)
        coeffs = [candidate.coefficient(e) for e in basis]
        for row in hat_constraint_rows(k):
            if sum((r * c for r, c in zip(row, coeffs)), Fraction(0)) != 0:
                return ExactRecheck("refuted", plan, Fraction(0), detail="hat-slice degree cap violated")
    gain = Fraction(0)
    for pt in sample_simplex(k, plan):
        v = evaluate_at(candidate, pt)
        low, high = evaluate_at(Qk, pt), renewal_minimum(pt)
        if v > high:
            return ExactRecheck("refuted", plan, gain, pt, f"exceeds m_{k} by {v - high}")
        if v < low:
            return ExactRecheck("refuted", plan, gain, pt, f"falls below Q_{k} by {low - v}")
        gain += v - low
    return ExactRecheck("clean" if gain == 0 else "anomaly", plan, gain)


def dominance_search(
    k: int, constraint_set: str, grid: SamplePlan, recheck_factor: int = 2
) -> DominanceProbeResult:
    """LP: maximise sum_g (Q(g) - Q_k(g)) s.t. Q_k(g) <= Q(g) <= m_k(g) on the grid.

    ``constraint_set`` is ``"a"`` (degree <= k-1 only) or ``"a-hat"`` (adds the
    hat-slice degree caps as exact linear equalities). The float optimum is
    snapped to rationals and re-checked exactly on the grid refined by
    ``recheck_factor``.
    """
    if not 3 <= k <= MAX_SEARCH_K:
        raise OutOfRange(f"dominance search supports 3 <= k <= {MAX_SEARCH_K}")
    if constraint_set not in ("a", "a-hat"):
        raise ValueError(f"unknown class {constraint_set!r}")
    basis = monomial_basis(k - 1, k - 1)
    Qk = build_Q(k, k)
    rows, upper, lower = [], [], []
    for pt in sample_simplex(k, grid):
        rows.append([float(v) for v in _monomial_values(basis, pt)])
        upper.append(float(renewal_minimum(pt)))
        lower.append(float(evaluate_at(Qk, pt)))
    M = np.array(rows)
    A_ub = np.vstack([M, -M])
    b_ub = np.concatenate([np.array(upper), -np.array(lower)])
    c = -M.sum(axis=0)
    A_eq = b_eq = None
    if constraint_set == "a-hat":
        eq = hat_constraint_rows(k)
        if eq:
            A_eq = np.array([[float(x) for x in r] for r in eq])
            b_eq = np.zeros(len(eq))
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(None, None), method="highs")
    if res.status == 2:
        raise LPInfeasible("LP infeasible although Q_k is feasible: encoding bug")
    if res.status == 3:
        raise LPUnbounded("LP unbounded: a constraint is missing")
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    x = res.x
    objective = max(0.0, float(M.dot(x).sum() - sum(lower)))
    snapped = MultiPoly(
        k - 1,
        {e: Fraction(float(v)).limit_denominator(RATIONALIZE_DENOMINATOR) for e, v in zip(basis, x)},
    )
    check = exact_recheck(snapped, k, constraint_set, grid.refined(recheck_factor))
    return DominanceProbeResult(
        k, constraint_set, grid, objective, tuple(float(v) for v in x), snapped, check
    )
