"""Step distributions on {1..k}, the simplex A_k and its samplers."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator, Sequence

import numpy as np

from renewal_lab.errors import (
    EmptySupport,
    NegativeMass,
    NotInSimplex,
    NotNormalized,
    ResolutionZero,
)
from renewal_lab.rational import RationalLike, format_rational_list, parse_rational

#: Denominator of the random simplex sampler (spacings of sorted uniforms).
RANDOM_DENOMINATOR_BITS = 32
RANDOM_DENOMINATOR = 1 << RANDOM_DENOMINATOR_BITS

#: Default grid resolutions by k, chosen for desk-scale cardinalities.
DEFAULT_GRID_RESOLUTION = {2: 64, 3: 32, 4: 8, 5: 8}


@dataclass(frozen=True)
class MassVector:
    """Exact law of one increment: ``p[l-1] = P(X = l)`` for ``l = 1..k``.

    Use :func:`make_masses` to build one; the constructor trusts its input.
    """

    p: tuple[Fraction, ...]

    @property
    def k(self) -> int:
        return len(self.p)

    def mean(self) -> Fraction:
        return sum((l * pl for l, pl in enumerate(self.p, start=1)), Fraction(0))

    def support(self) -> list[int]:
        return [l for l, pl in enumerate(self.p, start=1) if pl > 0]

    def to_simplex_point(self) -> SimplexPoint:
        return SimplexPoint(self.k, self.p[:-1])

    def to_json(self) -> dict:
        return {"k": self.k, "p": format_rational_list(self.p)}

    def __str__(self) -> str:
        return ",".join(format_rational_list(self.p))


@dataclass(frozen=True)
class SimplexPoint:
    """A point ``(p_1, ..., p_{k-1})`` of A_k."""

    k: int
    q: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.k < 1 or len(self.q) != self.k - 1:
            raise NotInSimplex(f"expected {self.k - 1} coordinates, got {len(self.q)}")
        if any(x < 0 for x in self.q) or sum(self.q, Fraction(0)) > 1:
            raise NotInSimplex(f"point {self.q} is outside A_{self.k}")

    @classmethod
    def of(cls, k: int, q: Sequence[RationalLike]) -> SimplexPoint:
        return cls(k, tuple(parse_rational(x) for x in q))

    def to_json(self) -> dict:
        return {"k": self.k, "q": format_rational_list(self.q)}


@dataclass(frozen=True)
class SamplePlan:
    """How to visit A_k: the full lattice of step ``1/resolution`` or ``count`` random points."""

    mode: str
    resolution: int = 0
    count: int = 0
    seed: int = 0

    @classmethod
    def grid(cls, resolution: int) -> SamplePlan:
        return cls("grid", resolution=resolution)

    @classmethod
    def random(cls, count: int, seed: int) -> SamplePlan:
        return cls("random", count=count, seed=seed)

    def refined(self, factor: int = 2) -> SamplePlan:
        if self.mode == "grid":
            return SamplePlan.grid(self.resolution * factor)
        return SamplePlan.random(self.count * factor, self.seed)

    def to_json(self) -> dict:
        if self.mode == "grid":
            return {"mode": "grid", "resolution": self.resolution}
        return {"mode": "random", "count": self.count, "seed": self.seed}


def make_masses(values: Sequence[RationalLike]) -> MassVector:
    """Validate ``values`` as a probability vector and strip trailing zeros."""
    p = [parse_rational(v) for v in values]
    if not p:
        raise EmptySupport("no masses given")
    negative = [i + 1 for i, x in enumerate(p) if x < 0]
    if negative:
        raise NegativeMass(f"negative mass at l={negative[0]}")
    if all(x == 0 for x in p):
        raise EmptySupport("all masses are zero")
    total = sum(p, Fraction(0))
    if total != 1:
        raise NotNormalized(f"masses sum to {total}, not 1")
    while p[-1] == 0:
        p.pop()
    return MassVector(tuple(p))


def from_simplex_point(pt: SimplexPoint) -> MassVector:
    """Complete ``pt`` with ``p_k = 1 - sum(q)``."""
    rest = 1 - sum(pt.q, Fraction(0))
    return make_masses(list(pt.q) + [rest])


def period(m: MassVector) -> int:
    """gcd of the support; 1 exactly when the walk is aperiodic."""
    return reduce(math.gcd, m.support())


def grid_size(k: int, resolution: int) -> int:
    return math.comb(resolution + k - 1, k - 1)


def _compositions_bounded(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # all (a_1..a_parts) >= 0 with sum <= total, lexicographic
    if parts == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in _compositions_bounded(total - first, parts - 1):
            yield (first,) + rest


def random_point(k: int, seed: int, index: int) -> SimplexPoint:
    """The ``index``-th random point of A_k for ``seed``.

    The k-1 coordinates are the first spacings of k-1 sorted uniform integers
    on ``[0, 2^32]``, divided by ``2^32``; the spacings sum to at most one
    exactly, so membership needs no correction.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    cuts = sorted(int(x) for x in rng.integers(0, RANDOM_DENOMINATOR, size=k - 1, endpoint=True))
    prev = 0
    q = []
    for c in cuts:
        q.append(Fraction(c - prev, RANDOM_DENOMINATOR))
        prev = c
    return SimplexPoint(k, tuple(q))


def sample_simplex(k: int, plan: SamplePlan) -> Iterator[SimplexPoint]:
    if k < 2:
        raise ValueError("sampling A_k needs k >= 2")
    if plan.mode == "grid":
        r = plan.resolution
        if r <= 0:
            raise ResolutionZero("grid resolution must be positive")
        for a in _compositions_bounded(r, k - 1):
            yield SimplexPoint(k, tuple(Fraction(x, r) for x in a))
    elif plan.mode == "random":
        if plan.count <= 0:
            raise ResolutionZero("random sample count must be positive")
        for i in range(plan.count):
            yield random_point(k, plan.seed, i)
    else:
        raise ValueError(f"unknown sampling mode {plan.mode!r}")


def random_masses(
    count: int,
    k_max: int,
    seed: int,
    *,
    k_min: int = 1,
    require_p1_in_open_unit: bool = False,
) -> list[MassVector]:
    """A reproducible corpus of dense random step laws with support bound in [k_min, k_max].

    Entry ``i`` depends only on ``(seed, i)``; ``k`` is drawn uniformly and
    the masses come from :func:`random_point`. With ``require_p1_in_open_unit``
    draws with ``p_1`` equal to 0 or 1 are skipped.
    """
    out: list[MassVector] = []
    for i in itertools.count():
        if len(out) == count:
            break
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i, 0))))
        k = int(rng.integers(k_min, k_max, endpoint=True))
        if k == 1:
            m = make_masses([1])
        else:
            m = from_simplex_point(random_point(k, seed, i))
        if require_p1_in_open_unit and not 0 < m.p[0] < 1:
            continue
        out.append(m)
    return out
