"""Monte Carlo estimates of u_n by simulating the increasing walk directly.

Increments are drawn by inverse CDF: a raw 64-bit PCG64 output ``x`` selects
step ``l`` when ``T_{l-1} <= x < T_l`` with ``T_l = ceil(2^64 (p_1 + ... + p_l))``
computed exactly from the rational cumulative sums. The only bias is the
2^-64 quantisation of the uniform.

Walks are simulated in fixed-size blocks; block ``b`` draws from its own
stream ``SeedSequence(seed, spawn_key=(b,))``, so the result does not depend
on how blocks are spread over workers.
"""
from __future__ import annotations

import importlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from renewal_lab import _backend
from renewal_lab.masses import MassVector
from renewal_lab.rational import format_rational
from renewal_lab.renewal import compute_renewal

UINT64_MAX = (1 << 64) - 1
#: Upper bound on draws held in memory per block (walks x steps).
BLOCK_DRAWS = 1 << 18


def thresholds(m: MassVector) -> np.ndarray:
    """``T_1..T_{k-1}`` as uint64 (``T_k = 2^64`` is implicit)."""
    out = []
    cum = Fraction(0)
    for pl in m.p[:-1]:
        cum += pl
        scaled = cum * (1 << 64)
        t = -((-scaled.numerator) // scaled.denominator)  # ceil
        out.append(min(t, UINT64_MAX))
    return np.array(out, dtype=np.uint64)


def block_generator(seed: int, block: int) -> np.random.PCG64:
    return np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,)))


def walks_per_block(n_max: int) -> int:
    return max(1, BLOCK_DRAWS // (n_max + 1))


def sample_steps(m: MassVector, size: int, seed: int) -> np.ndarray:
    """``size`` i.i.d. increments drawn with the same inverse CDF the walks use."""
    draws = block_generator(seed, 0).random_raw(size).astype(np.uint64)
    out = np.empty(size, dtype=np.int64)
    _backend.draw_steps(draws, thresholds(m), out)
    return out


def _block_counts(args) -> np.ndarray:
    p, n_max, seed, block, n_walks_block, kernel_module = args
    kernels = importlib.import_module(kernel_module)
    thr = np.asarray(p, dtype=np.uint64)
    bitgen = block_generator(seed, block)
    # a walk takes at most n_max + 1 steps before passing n_max
    draws = bitgen.random_raw(n_walks_block * (n_max + 1)).astype(np.uint64)
    draws = draws.reshape(n_walks_block, n_max + 1)
    counts = np.zeros(n_max + 1, dtype=np.int64)
    kernels.walk_hits(draws, thr, n_max, counts)
    return counts


def hit_counts(
    m: MassVector, n_max: int, n_walks: int, seed: int, jobs: int = 1, kernels=None
) -> np.ndarray:
    """Number of walks (out of ``n_walks``) visiting each n in 0..n_max."""
    if n_walks < 1:
        raise ValueError("n_walks must be positive")
    kernels = _backend.kernels if kernels is None else kernels
    per = walks_per_block(n_max)
    thr = [int(t) for t in thresholds(m)]
    tasks = []
    remaining, block = n_walks, 0
    while remaining > 0:
        size = min(per, remaining)
        tasks.append((thr, n_max, seed, block, size, kernels.__name__))
        remaining -= size
        block += 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_block_counts, tasks))
    else:
        parts = [_block_counts(t) for t in tasks]
    return np.sum(parts, axis=0)


@dataclass(frozen=True)
class McEstimate:
    masses: MassVector
    n_max: int
    n_walks: int
    seed: int
    counts: tuple[int, ...]

    @property
    def u_hat(self) -> tuple[float, ...]:
        return tuple(c / self.n_walks for c in self.counts)

    @property
    def stderr(self) -> tuple[float, ...]:
        return tuple(math.sqrt(u * (1 - u) / self.n_walks) for u in self.u_hat)


def simulate(m: MassVector, n_max: int, n_walks: int, seed: int, jobs: int = 1) -> McEstimate:
    counts = hit_counts(m, n_max, n_walks, seed, jobs=jobs)
    return McEstimate(m, n_max, n_walks, seed, tuple(int(c) for c in counts))


@dataclass(frozen=True)
class CrossCheckRow:
    n: int
    u_exact: Fraction
    u_hat: float
    stderr: float
    z: Optional[float]


@dataclass(frozen=True)
class CrossCheck:
    estimate: McEstimate
    z_max: float
    rows: tuple[CrossCheckRow, ...]

    @property
    def worst(self) -> Optional[CrossCheckRow]:
        scored = [r for r in self.rows if r.z is not None]
        return max(scored, key=lambda r: r.z, default=None)

    @property
    def worst_z(self) -> float:
        w = self.worst
        return 0.0 if w is None else w.z

    @property
    def passed(self) -> bool:
        return self.worst_z <= self.z_max

    def csv_rows(self) -> list[list[str]]:
        out = [["n", "u_exact", "u_hat", "stderr", "z_score"]]
        for r in self.rows:
            out.append(
                [
                    str(r.n),
                    format_rational(r.u_exact),
                    repr(r.u_hat),
                    repr(r.stderr),
                    "" if r.z is None else repr(r.z),
                ]
            )
        return out

    def to_json(self) -> dict:
        est = self.estimate
        return {
            "masses": est.masses.to_json(),
            "n_max": est.n_max,
            "n_walks": est.n_walks,
            "seed": est.seed,
            "z_max": self.z_max,
            "passed": self.passed,
            "worst_z": self.worst_z,
            "worst_n": None if self.worst is None else self.worst.n,
            "rows": [
                {
                    "n": r.n,
                    "u_exact": format_rational(r.u_exact),
                    "u_hat": r.u_hat,
                    "stderr": r.stderr,
                    "z_score": r.z,
                }
                for r in self.rows
            ],
        }


def cross_check(
    m: MassVector, n_max: int, n_walks: int, seed: int, z: float = 5.0, jobs: int = 1
) -> CrossCheck:
    """Compare the simulation with exact u_n; rows with zero stderr carry no z-score."""
    est = simulate(m, n_max, n_walks, seed, jobs=jobs)
    exact = compute_renewal(m, n_max).u
    rows = []
    for n in range(1, n_max + 1):
        uh, se = est.u_hat[n], est.stderr[n]
        score = abs(uh - float(exact[n])) / se if se > 0 else None
        rows.append(CrossCheckRow(n, exact[n], uh, se, score))
    return CrossCheck(est, z, tuple(rows))
