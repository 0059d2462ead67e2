"""Brute-force references that share no code path with the recurrence.

u_n is the probability that some partial sum of the walk equals n, i.e. the
sum over all compositions of n (ordered parts <= k) of the product of the
part masses. These helpers enumerate the compositions explicitly.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence


def compositions(n: int, max_part: int) -> Iterator[tuple[int, ...]]:
    """Ordered tuples of positive integers <= max_part summing to n."""
    if n == 0:
        yield ()
        return
    for first in range(1, min(n, max_part) + 1):
        for rest in compositions(n - first, max_part):
            yield (first,) + rest


@lru_cache(maxsize=None)
def composition_exponents(n: int, max_part: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Compositions of n grouped by part multiplicities: ``((e_1..e_max_part), count)`` pairs."""
    counts: Counter = Counter()
    for comp in compositions(n, max_part):
        e = [0] * max_part
        for part in comp:
            e[part - 1] += 1
        counts[tuple(e)] += 1
    return tuple(sorted(counts.items()))


def path_sum(p: Sequence[Fraction], n: int) -> Fraction:
    """u_n by summing path probabilities over every composition of n."""
    k = len(p)
    total = Fraction(0)
    for e, count in composition_exponents(n, k):
        term = Fraction(count)
        for pj, ej in zip(p, e):
            if ej:
                term *= pj**ej
        total += term
    return total


def count_compositions(n: int, max_part: int) -> int:
    return sum(1 for _ in compositions(n, max_part))
