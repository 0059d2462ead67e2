"""Property suites run by ``renewal-lab verify-all``.

Each check returns a :class:`~renewal_lab.conjecture.CheckResult`. Sizes come
from a :class:`Budget`; ``full`` matches the acceptance-test scale.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

from renewal_lab.conjecture import (
    CheckResult,
    dominance_search,
    no_largest_demo,
    recheck_certificate,
    verify_k3_hat_constraint,
    verify_k3_m3,
)
from renewal_lab.masses import (
    SamplePlan,
    from_simplex_point,
    grid_size,
    make_masses,
    random_masses,
    sample_simplex,
)
from renewal_lab.mc import cross_check
from renewal_lab.oracles import path_sum
from renewal_lab.polylab import build_P, build_Q, evaluate_at, max_power_check, renewal_minimum
from renewal_lab.renewal import (
    blackwell_limit,
    check_recurrence,
    compute_renewal,
    envelopes,
    verify_extremes_window,
)

BLACKWELL_HORIZON = 64
LP_OBJECTIVE_TOLERANCE = 1e-6

MC_CASES = (
    ("1/2,1/2", 1),
    ("1/3,1/3,1/3", 2),
    ("0,1", 3),
    ("1/4,3/4", 4),
    ("1/2,1/4,1/4", 5),
    ("1/10,0,9/10", 6),
    ("1/5,1/5,1/5,1/5,1/5", 7),
    ("0,1/2,1/2", 8),
    ("2/3,0,0,1/3", 9),
    ("1/6,1/3,1/6,1/3", 10),
)


@dataclass(frozen=True)
class Budget:
    name: str
    recurrence_corpus: int
    extremes_corpus: int
    structure_grid: int
    bounds_grid: int
    m3_grid: int
    lp_grid: int
    demo_scan: int
    mc_cases: int
    mc_walks: int


BUDGETS = {
    "tiny": Budget("tiny", 20, 40, 4, 6, 16, 8, 16, 3, 10_000),
    "default": Budget("default", 200, 200, 8, 16, 64, 32, 64, 10, 100_000),
    "full": Budget("full", 200, 1000, 8, 16, 64, 32, 64, 10, 100_000),
}


def extremes_corpus(count: int, seed: int):
    return random_masses(count, 6, seed, k_min=2, require_p1_in_open_unit=True)


def check_recurrence_oracle(b: Budget, seed: int) -> CheckResult:
    corpus = random_masses(b.recurrence_corpus, 5, seed)
    for m in corpus:
        seq = compute_renewal(m, 12)
        bad = check_recurrence(seq)
        if bad is not None:
            return CheckResult("recurrence_oracle", False, len(corpus), f"{m}: recurrence fails at n={bad}")
        for n in range(13):
            if seq.u[n] != path_sum(m.p, n):
                return CheckResult("recurrence_oracle", False, len(corpus), f"{m}: u_{n} != path sum")
    return CheckResult("recurrence_oracle", True, len(corpus))


def check_extremes(b: Budget, seed: int) -> CheckResult:
    corpus = extremes_corpus(b.extremes_corpus, seed)
    for m in corpus:
        k, H = m.k, 20 * m.k
        seq = compute_renewal(m, H)
        window = [seq.scaled(n) for n in range(H + 1)]
        hi = max(range(1, H + 1), key=lambda n: (window[n], -n))
        lo = min(range(1, H + 1), key=lambda n: (window[n], n))
        if not (1 <= hi <= k and 1 <= lo <= k - 1):
            return CheckResult("extremes_window", False, len(corpus), f"{m}: argmax {hi}, argmin {lo}")
        rep = verify_extremes_window(m, H)
        if not rep.holds:
            return CheckResult("extremes_window", False, len(corpus), f"{m}: {rep.to_json()}")
        rising = all(window[n] <= window[n + 1] for n in range(1, H))
        falling = all(window[n] >= window[n + 1] for n in range(1, H))
        if rising or falling:
            return CheckResult("extremes_window", False, len(corpus), f"{m}: monotone window")
    return CheckResult("extremes_window", True, len(corpus))


def check_envelopes(b: Budget, seed: int) -> CheckResult:
    corpus = extremes_corpus(b.extremes_corpus, seed)
    for m in corpus:
        k, H = m.k, 20 * m.k
        seq = compute_renewal(m, H)
        env = envelopes(seq)
        if any(x < y for x, y in zip(env.b, env.b[1:])) or any(x > y for x, y in zip(env.c, env.c[1:])):
            return CheckResult("sandwich_envelopes", False, len(corpus), f"{m}: envelope not monotone")
        for n in range(k + 1, H + 1):
            bn, cn = env.at(n)
            if not cn < seq.u[n] < bn:
                return CheckResult("sandwich_envelopes", False, len(corpus), f"{m}: sandwich fails at n={n}")
    return CheckResult("sandwich_envelopes", True, len(corpus))


def check_blackwell(b: Budget, seed: int) -> CheckResult:
    """gap(2H) <= gap(H) at H = 64; the 10^-6 level at H = 512 is not a law-free invariant."""
    corpus = extremes_corpus(b.extremes_corpus, seed)
    H = BLACKWELL_HORIZON
    for m in corpus:
        seq = compute_renewal(m, 2 * H)
        limit = blackwell_limit(m)
        gap, gap_double = abs(seq.value(H) - limit), abs(seq.value(2 * H) - limit)
        if gap_double > gap:
            return CheckResult("blackwell", False, len(corpus), f"{m}: gap grows from {float(gap):.3e}")
    return CheckResult("blackwell", True, len(corpus))


def check_structure(b: Budget, seed: int) -> CheckResult:
    checked = 0
    for k in range(2, 6):
        pts = list(sample_simplex(k, SamplePlan.grid(b.structure_grid)))
        for l in range(1, 9):
            entry = build_P(l, k)
            comp = entry.composition_form
            if comp.weighted_degrees() != {l}:
                return CheckResult("polynomial_structure", False, checked, f"weights of R_{l}, k={k}")
            powers = max_power_check(l, k)
            if any(powers[j] != l // j for j in powers):
                return CheckResult("polynomial_structure", False, checked, f"max powers of R_{l}, k={k}")
            if k >= l and comp.evaluate([1] * comp.nvars) != 2 ** (l - 1):
                return CheckResult("polynomial_structure", False, checked, f"R_{l}(1..1), k={k}")
            if l <= k - 1 and entry.substituted.degree() != l:
                return CheckResult("polynomial_structure", False, checked, f"deg P_{l}, k={k}")
            for pt in pts:
                checked += 1
                u = compute_renewal(from_simplex_point(pt), l).u[l]
                if evaluate_at(entry.substituted, pt) != u:
                    return CheckResult("polynomial_structure", False, checked, f"P_{l} at {pt.q}, k={k}")
    return CheckResult("polynomial_structure", True, checked)


def check_bounds(b: Budget, seed: int) -> CheckResult:
    checked = 0
    for k in range(2, 6):
        Qs = [build_Q(n, k) for n in range(1, k + 1)]
        for pt in sample_simplex(k, SamplePlan.grid(b.bounds_grid)):
            checked += 1
            u = compute_renewal(from_simplex_point(pt), k - 1).u
            for n in range(1, k):
                if evaluate_at(Qs[n], pt) > u[n]:
                    return CheckResult("envelope_bounds", False, checked, f"Q_{n + 1} > u_{n} at {pt.q}")
            if evaluate_at(Qs[k - 1], pt) > renewal_minimum(pt):
                return CheckResult("envelope_bounds", False, checked, f"Q_{k} > m_{k} at {pt.q}")
    return CheckResult("envelope_bounds", True, checked)


def check_k3(b: Budget, seed: int) -> CheckResult:
    m3 = verify_k3_m3(SamplePlan.grid(b.m3_grid))
    if not m3.passed:
        return CheckResult("k3_envelope", False, m3.checked, m3.detail)
    if not verify_k3_hat_constraint().identity_holds:
        return CheckResult("k3_envelope", False, m3.checked, "determinant identity fails")
    probe = dominance_search(3, "a-hat", SamplePlan.grid(b.lp_grid))
    ok = probe.objective <= LP_OBJECTIVE_TOLERANCE and probe.exact_recheck.verdict == "clean"
    detail = f"objective {probe.objective!r}, recheck {probe.exact_recheck.verdict}"
    return CheckResult("k3_envelope", ok, m3.checked, detail)


def check_no_largest(b: Budget, seed: int) -> CheckResult:
    report = no_largest_demo(3, scan=SamplePlan.grid(b.demo_scan))
    ok = (
        len(report.regions) >= 2
        and all(c.margin >= 0 for c in report.certificates)
        and all(recheck_certificate(c) for c in report.certificates)
    )
    return CheckResult("no_largest_demo", ok, len(report.certificates), f"regions {report.regions}")


def check_monte_carlo(b: Budget, seed: int) -> CheckResult:
    worst = 0.0
    for text, case_seed in MC_CASES[: b.mc_cases]:
        m = make_masses(text.split(","))
        res = cross_check(m, 20, b.mc_walks, seed * 1000 + case_seed, z=5.0)
        worst = max(worst, res.worst_z)
        if not res.passed:
            return CheckResult("monte_carlo", False, b.mc_cases, f"{text}: z={res.worst_z:.3f}")
    return CheckResult("monte_carlo", True, b.mc_cases, f"worst z {worst:.3f}")


def check_grid_cardinality(b: Budget, seed: int) -> CheckResult:
    checked = 0
    for k in range(2, 7):
        for r in range(1, 11):
            checked += 1
            pts = list(sample_simplex(k, SamplePlan.grid(r)))
            if len(pts) != grid_size(k, r) or len(set(pts)) != len(pts):
                return CheckResult("grid_cardinality", False, checked, f"k={k}, r={r}")
    return CheckResult("grid_cardinality", True, checked)


SUITE: tuple[tuple[str, Callable[[Budget, int], CheckResult]], ...] = (
    ("exact recurrence matches composition path sums", check_recurrence_oracle),
    ("extremes inside the support window; no monotone tail", check_extremes),
    ("monotone sandwich envelopes", check_envelopes),
    ("Blackwell limit reached", check_blackwell),
    ("renewal polynomial structure", check_structure),
    ("Q_{n+1} <= u_n and Q_k <= m_k", check_bounds),
    ("Q_3 is largest in the hat class for k = 3", check_k3),
    ("no largest lower envelope: perturbation certificates", check_no_largest),
    ("Monte Carlo agrees with exact masses", check_monte_carlo),
    ("simplex grid cardinality", check_grid_cardinality),
)


def run_suite(budget: str = "default", seed: int = 42) -> dict:
    b = BUDGETS[budget]
    results = []
    for claim, fn in SUITE:
        res = fn(b, seed)
        results.append({"claim": claim, **res.to_json()})
    return {
        "budget": asdict(b),
        "results": results,
        "passed": all(r["passed"] for r in results),
    }
