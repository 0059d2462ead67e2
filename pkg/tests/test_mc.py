from fractions import Fraction as F

import numpy as np
import pytest
from scipy.stats import chisquare

from renewal_lab import _backend, _walk_py
from renewal_lab.masses import make_masses
from renewal_lab.mc import cross_check, hit_counts, sample_steps, simulate, thresholds
from renewal_lab.renewal import compute_renewal

try:
    from renewal_lab import _walk_kernels
except ImportError:  # extension not built
    _walk_kernels = None

needs_compiled = pytest.mark.skipif(_walk_kernels is None, reason="compiled kernel not built")


def test_thresholds_exact():
    thr = thresholds(make_masses(["1/2", "1/4", "1/4"]))
    assert thr.tolist() == [2**63, 3 * 2**62]


def test_unit_step_hits_everything():
    est = simulate(make_masses([1]), 10, 1000, 1)
    assert est.counts == (1000,) * 11


def test_period_two_never_hits_odd():
    est = simulate(make_masses(["0", "1"]), 10, 500, 1)
    assert all(est.counts[n] == (500 if n % 2 == 0 else 0) for n in range(11))


def test_half_half_within_stderr(half_half):
    res = cross_check(half_half, 10, 20_000, 3)
    row = res.rows[9]
    assert row.n == 10 and row.u_exact == F(683, 1024)
    assert abs(row.u_hat - float(row.u_exact)) <= 5 * row.stderr
    assert res.passed


def test_stderr_formula(half_half):
    est = simulate(half_half, 5, 4000, 2)
    for u, se in zip(est.u_hat, est.stderr):
        assert se == pytest.approx((u * (1 - u) / 4000) ** 0.5)


def test_deterministic_and_seed_sensitive():
    m = make_masses(["1/3", "1/3", "1/3"])
    a = simulate(m, 15, 30_000, 7).counts
    assert a == simulate(m, 15, 30_000, 7).counts
    assert a != simulate(m, 15, 30_000, 8).counts


def test_jobs_do_not_change_result():
    m = make_masses(["1/2", "1/4", "1/4"])
    n_walks = 40_000  # several blocks at n_max = 20
    serial = hit_counts(m, 20, n_walks, 11, jobs=1)
    parallel = hit_counts(m, 20, n_walks, 11, jobs=3)
    assert np.array_equal(serial, parallel)


@needs_compiled
def test_backends_agree():
    m = make_masses(["1/6", "1/3", "1/6", "1/3"])
    a = hit_counts(m, 20, 30_000, 5, kernels=_walk_kernels)
    b = hit_counts(m, 20, 30_000, 5, kernels=_walk_py)
    assert np.array_equal(a, b)


@needs_compiled
def test_draw_steps_backends_agree():
    rng = np.random.PCG64(3)
    draws = rng.random_raw(10_000).astype(np.uint64)
    thr = thresholds(make_masses(["1/10", "0", "2/5", "1/2"]))
    out_c, out_p = np.empty(10_000, np.int64), np.empty(10_000, np.int64)
    _walk_kernels.draw_steps(draws, thr, out_c)
    _walk_py.draw_steps(draws, thr, out_p)
    assert np.array_equal(out_c, out_p)
    assert not np.any(out_c == 2)  # zero mass is never drawn


def test_backend_selected():
    assert _backend.BACKEND in ("compiled", "python")


@pytest.mark.parametrize("p", [["1/2", "1/2"], ["1/10", "0", "9/10"], ["1/5"] * 5, ["1/6", "1/3", "1/6", "1/3"]])
def test_step_frequencies_chi_square(p):
    m = make_masses(p)
    steps = sample_steps(m, 100_000, 17)
    support = [l for l, pl in enumerate(m.p, start=1) if pl > 0]
    assert set(np.unique(steps)) == set(support)
    observed = [int(np.sum(steps == l)) for l in support]
    expected = [float(m.p[l - 1]) * 100_000 for l in support]
    if len(support) > 1:
        assert chisquare(observed, expected).pvalue >= 1e-4


def test_cross_check_matches_exact_rows():
    m = make_masses(["1/4", "3/4"])
    res = cross_check(m, 12, 10_000, 4)
    assert [r.u_exact for r in res.rows] == list(compute_renewal(m, 12).u[1:])
    assert res.csv_rows()[0] == ["n", "u_exact", "u_hat", "stderr", "z_score"]


def test_zero_stderr_rows_carry_no_z():
    res = cross_check(make_masses(["0", "1"]), 6, 1000, 1)
    assert all(r.z is None for r in res.rows)
    assert res.passed and res.worst is None


def test_rejects_no_walks(half_half):
    with pytest.raises(ValueError):
        hit_counts(half_half, 5, 0, 1)
