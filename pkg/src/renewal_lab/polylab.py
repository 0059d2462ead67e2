"""Sparse exact multivariate polynomials and the renewal polynomial families.

``P_l`` is u_l written as a polynomial in the masses. It comes in two forms:

* the *composition form* ``R_l`` in ``p_1..p_min(k,l)``: the raw path sum,
  every monomial being one multiset of step sizes summing to ``l``;
* the *substituted form* in ``p_1..p_{k-1}``, obtained from ``R_l`` by
  eliminating ``p_k = 1 - p_1 - ... - p_{k-1}``; it is the function on A_k.

``Q_n = prod_{j<n} (p_1 + ... + p_j)`` is the universal lower envelope.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence, Union

from renewal_lab.errors import ArityMismatch, OutOfRange
from renewal_lab.masses import SamplePlan, SimplexPoint, from_simplex_point, sample_simplex
from renewal_lab.rational import RationalLike, format_rational, parse_rational
from renewal_lab.renewal import compute_renewal

NEG_INF = float("-inf")
MAX_NVARS = 8

Exponent = tuple[int, ...]


def _grlex_key(e: Exponent):
    # descending graded lex: higher total degree first, then p1-heavier first
    return (-sum(e), tuple(-x for x in e))


class MultiPoly:
    """Immutable polynomial with Fraction coefficients keyed by exponent tuples."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Mapping[Exponent, RationalLike]] = None):
        if nvars < 0 or nvars > MAX_NVARS:
            raise ArityMismatch(f"nvars must be in [0, {MAX_NVARS}], got {nvars}")
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise ArityMismatch(f"exponent {e} does not fit {nvars} variables")
            c = parse_rational(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
        self.nvars = nvars
        self._terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Fraction]) -> MultiPoly:
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, nvars: int) -> MultiPoly:
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, c: RationalLike, nvars: int) -> MultiPoly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, j: int, nvars: int) -> MultiPoly:
        """The polynomial ``p_j`` (1-based)."""
        if not 1 <= j <= nvars:
            raise ArityMismatch(f"p{j} does not exist among {nvars} variables")
        e = [0] * nvars
        e[j - 1] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in canonical (descending graded lex) order."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]))

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> Union[int, float]:
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def max_exponent(self, j: int) -> int:
        return max((e[j - 1] for e in self._terms), default=0)

    def weighted_degrees(self) -> set[int]:
        """The set of ``sum_j j * e_j`` over all monomials."""
        return {sum(i * x for i, x in enumerate(e, start=1)) for e in self._terms}

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(other, self.nvars)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def _check(self, other: MultiPoly) -> None:
        if self.nvars != other.nvars:
            raise ArityMismatch(f"{self.nvars} vs {other.nvars} variables")

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiPoly.constant(other, self.nvars)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other) -> MultiPoly:
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> MultiPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> MultiPoly:
        return self._coerce(other) - self

    def scale(self, c: RationalLike) -> MultiPoly:
        c = parse_rational(c)
        if not c:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other) -> MultiPoly:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> MultiPoly:
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def pad(self, nvars: int) -> MultiPoly:
        """Same polynomial viewed in ``nvars >= self.nvars`` variables."""
        if nvars < self.nvars:
            raise ArityMismatch("cannot drop variables with pad")
        extra = (0,) * (nvars - self.nvars)
        return MultiPoly._raw(nvars, {e + extra: c for e, c in self._terms.items()})

    def compose(self, subs: Sequence[MultiPoly]) -> MultiPoly:
        """Substitute ``p_j -> subs[j-1]``; all substitutes share one arity."""
        if len(subs) != self.nvars:
            raise ArityMismatch(f"need {self.nvars} substitutes, got {len(subs)}")
        if not subs:
            return MultiPoly._raw(0, dict(self._terms))
        target = subs[0].nvars
        for s in subs:
            if s.nvars != target:
                raise ArityMismatch("substitutes disagree on arity")
        powers: list[dict[int, MultiPoly]] = [{0: MultiPoly.constant(1, target)} for _ in subs]

        def power(j: int, n: int) -> MultiPoly:
            cache = powers[j]
            if n not in cache:
                cache[n] = power(j, n - 1) * subs[j]
            return cache[n]

        result = MultiPoly.zero(target)
        for e, c in self._terms.items():
            term = MultiPoly.constant(c, target)
            for j, x in enumerate(e):
                if x:
                    term = term * power(j, x)
            result = result + term
        return result

    def substitute_values(self, values: Mapping[int, RationalLike]) -> MultiPoly:
        """Fix some variables (1-based index -> value) and drop them."""
        keep = [j for j in range(1, self.nvars + 1) if j not in values]
        vals = {j: parse_rational(v) for j, v in values.items()}
        out: dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            for j, v in vals.items():
                c = c * v ** e[j - 1]
            if c:
                key = tuple(e[j - 1] for j in keep)
                out[key] = out.get(key, 0) + c
        return MultiPoly._raw(len(keep), {e: c for e, c in out.items() if c})

    def __call__(self, point: Sequence[RationalLike]) -> Fraction:
        return self.evaluate(point)

    def evaluate(self, point: Sequence[RationalLike]) -> Fraction:
        if len(point) != self.nvars:
            raise ArityMismatch(f"point has {len(point)} coordinates, polynomial {self.nvars}")
        xs = [parse_rational(x) for x in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, n in zip(xs, e):
                if n:
                    term *= x**n
            total += term
        return total

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    def to_text(self, names: Optional[Sequence[str]] = None) -> str:
        """Canonical text: ``"1 * p1^2 + 1 * p1 * p2 - 1/2 * p2 + 3"``.

        ``names`` replaces the default variable names ``p1, p2, ...``.
        """
        if not self._terms:
            return "0"
        names = names or [f"p{j}" for j in range(1, self.nvars + 1)]
        pieces = []
        for i, (e, c) in enumerate(self.items()):
            factors = [names[j] if x == 1 else f"{names[j]}^{x}" for j, x in enumerate(e) if x]
            mag = format_rational(abs(c))
            body = " * ".join([mag] + factors)
            if i == 0:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(pieces)

    @classmethod
    def from_text(cls, text: str, nvars: int) -> MultiPoly:
        """Parse the text format produced by :meth:`to_text` (whitespace tolerant)."""
        src = text.strip()
        if src == "0":
            return cls.zero(nvars)
        tokens = re.split(r"\s*([+-])\s*", src)
        if tokens and tokens[0] == "":
            tokens = tokens[1:]
        else:
            tokens = ["+"] + tokens
        if len(tokens) % 2:
            raise ValueError(f"cannot parse polynomial {text!r}")
        out = cls.zero(nvars)
        for sign, body in zip(tokens[0::2], tokens[1::2]):
            if not body:
                raise ValueError(f"dangling sign in {text!r}")
            coeff = Fraction(1)
            e = [0] * nvars
            for factor in (f.strip() for f in body.split("*")):
                m = re.fullmatch(r"p(\d+)(?:\^(\d+))?", factor)
                if m:
                    j = int(m.group(1))
                    if not 1 <= j <= nvars:
                        raise ArityMismatch(f"p{j} does not exist among {nvars} variables")
                    e[j - 1] += int(m.group(2) or 1)
                else:
                    coeff *= parse_rational(factor)
            if sign == "-":
                coeff = -coeff
            out = out + cls(nvars, {tuple(e): coeff})
        return out

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"e": list(e), "c": format_rational(c)} for e, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> MultiPoly:
        return cls(int(data["nvars"]), {tuple(t["e"]): t["c"] for t in data["terms"]})


def variables(nvars: int) -> list[MultiPoly]:
    return [MultiPoly.variable(j, nvars) for j in range(1, nvars + 1)]


def monomial_basis(nvars: int, max_degree: int) -> list[Exponent]:
    """All exponent vectors of total degree <= max_degree, descending graded lex."""
    out = [
        e
        for e in itertools.product(range(max_degree + 1), repeat=nvars)
        if sum(e) <= max_degree
    ]
    return sorted(out, key=_grlex_key)


# ---------------------------------------------------------------------------
# renewal polynomial families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyFamilyEntry:
    l: int
    k: int
    substituted: MultiPoly
    composition_form: MultiPoly


@lru_cache(maxsize=None)
def composition_form(l: int, k: int) -> MultiPoly:
    """R_l: the recurrence run symbolically with free ``p_1..p_min(k,l)``."""
    v = min(k, l)
    ps = variables(v)
    r = [MultiPoly.constant(1, v)]
    for n in range(1, l + 1):
        acc = MultiPoly.zero(v)
        for j in range(1, min(n, k) + 1):
            acc = acc + ps[j - 1] * r[n - j]
        r.append(acc)
    return r[l]


@lru_cache(maxsize=None)
def build_P(l: int, k: int) -> PolyFamilyEntry:
    if l < 1 or k < 2:
        raise OutOfRange(f"build_P needs l >= 1 and k >= 2 (got l={l}, k={k})")
    comp = composition_form(l, k)
    if l <= k - 1:
        sub = comp.pad(k - 1)
    else:
        ps = variables(k - 1)
        last = MultiPoly.constant(1, k - 1) - sum(ps, MultiPoly.zero(k - 1))
        sub = comp.compose(ps + [last])
    return PolyFamilyEntry(l, k, sub, comp)


@lru_cache(maxsize=None)
def build_Q(n: int, k: int) -> MultiPoly:
    """Q_n in the k-1 variables of A_k (the empty product for n = 1 is 1)."""
    if not 1 <= n <= k:
        raise OutOfRange(f"Q_n needs 1 <= n <= k (got n={n}, k={k})")
    nv = k - 1
    ps = variables(nv)
    result = MultiPoly.constant(1, nv)
    partial = MultiPoly.zero(nv)
    for j in range(1, n):
        partial = partial + ps[j - 1]
        result = result * partial
    return result


def evaluate_at(P: MultiPoly, pt: SimplexPoint) -> Fraction:
    if P.nvars != pt.k - 1:
        raise ArityMismatch(f"polynomial in {P.nvars} variables, point of A_{pt.k}")
    return P.evaluate(pt.q)


def min_poly_value(k: int, pt: SimplexPoint) -> tuple[Fraction, int]:
    """min over l in [1, k-1] of P_l(pt), with the smallest attaining l."""
    if k < 2:
        raise OutOfRange("min_poly_value needs k >= 2")
    best_val, best_l = None, 0
    for l in range(1, k):
        val = evaluate_at(build_P(l, k).substituted, pt)
        if best_val is None or val < best_val:
            best_val, best_l = val, l
    return best_val, best_l


def renewal_minimum(pt: SimplexPoint) -> Fraction:
    """m_k at ``pt`` computed from the renewal recurrence, not from polynomials."""
    if pt.k < 2:
        return Fraction(1)
    u = compute_renewal(from_simplex_point(pt), pt.k - 1).u
    return min(u[1 : pt.k])


def weighted_scaling_check(l: int, k: int, s: RationalLike, p: Sequence[RationalLike]) -> bool:
    """Check ``R_l(s p_1, s^2 p_2, ...) == s^l R_l(p_1, p_2, ...)`` exactly.

    Taking ``t = s^l`` keeps every ``t^(j/l) = s^j`` rational. ``p`` supplies
    the first ``min(k, l)`` masses (missing entries count as 0).
    """
    s = parse_rational(s)
    if s <= 0:
        raise ValueError("scale must be positive")
    comp = build_P(l, k).composition_form
    xs = [parse_rational(x) for x in p][: comp.nvars]
    xs += [Fraction(0)] * (comp.nvars - len(xs))
    scaled = [s**j * x for j, x in enumerate(xs, start=1)]
    return comp.evaluate(scaled) == s**l * comp.evaluate(xs)


def max_power_check(l: int, k: int) -> dict[int, int]:
    """Largest exponent of each ``p_j`` (j <= min(k, l)) in the composition form."""
    comp = build_P(l, k).composition_form
    return {j: comp.max_exponent(j) for j in range(1, comp.nvars + 1)}


def hat_transform(P: MultiPoly, k: int) -> MultiPoly:
    """``P(p_1, p_2 - p_1, ..., p_{k-1} - p_{k-2})``."""
    if P.nvars != k - 1:
        raise ArityMismatch(f"hat transform for k={k} needs {k - 1} variables, got {P.nvars}")
    ps = variables(k - 1)
    subs = [ps[0]] + [ps[i] - ps[i - 1] for i in range(1, k - 1)]
    return P.compose(subs)


def hat_slice(P: MultiPoly, j: int) -> MultiPoly:
    """The hat transform of ``P`` with variables ``j+1..`` fixed to 1, in ``p_1..p_j``."""
    k = P.nvars + 1
    if not 1 <= j <= k - 1:
        raise OutOfRange(f"slice index must be in [1, {k - 1}]")
    hat = hat_transform(P, k)
    return hat.substitute_values({i: 1 for i in range(j + 1, k)})


@lru_cache(maxsize=None)
def hat_constraint_rows(k: int) -> tuple[tuple[Fraction, ...], ...]:
    """Linear equations on the degree-(k-1) coefficient vector forcing ``deg(P_hat_j) <= j``.

    Coefficients are indexed by :func:`monomial_basis` ``(k-1, k-1)``. Each row
    is the coefficient of one forbidden monomial of one slice.
    """
    basis = monomial_basis(k - 1, k - 1)
    slices = [
        [hat_slice(MultiPoly(k - 1, {e: 1}), j) for e in basis] for j in range(1, k)
    ]
    rows = []
    for j, polys in enumerate(slices, start=1):
        forbidden = sorted(
            {e for poly in polys for e in poly.terms if sum(e) > j}, key=_grlex_key
        )
        for e in forbidden:
            row = tuple(poly.coefficient(e) for poly in polys)
            if any(row):
                rows.append(row)
    return tuple(rows)


# ---------------------------------------------------------------------------
# class membership by refutation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """``certified-out`` carries an exact reason; ``not-falsified`` never claims membership."""

    status: str
    reason: str = ""
    witness: Optional[SimplexPoint] = None
    points_checked: int = 0

    @property
    def certified_out(self) -> bool:
        return self.status == "certified-out"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "witness": None if self.witness is None else self.witness.to_json(),
            "points_checked": self.points_checked,
        }


def _sampled_refutation(P: MultiPoly, k: int, plan: SamplePlan) -> Verdict:
    checked = 0
    for pt in sample_simplex(k, plan):
        checked += 1
        value, bound = evaluate_at(P, pt), renewal_minimum(pt)
        if value > bound:
            return Verdict(
                "certified-out",
                f"P = {value} exceeds m_{k} = {bound}",
                witness=pt,
                points_checked=checked,
            )
    return Verdict("not-falsified", "", points_checked=checked)


def in_A_class(P: MultiPoly, k: int, plan: SamplePlan) -> Verdict:
    if P.nvars != k - 1:
        raise ArityMismatch(f"class for k={k} needs {k - 1} variables")
    if P.degree() > k - 1:
        return Verdict("certified-out", f"degree {P.degree()} > {k - 1}")
    return _sampled_refutation(P, k, plan)


def in_A_hat_class(P: MultiPoly, k: int, plan: SamplePlan) -> Verdict:
    if P.nvars != k - 1:
        raise ArityMismatch(f"class for k={k} needs {k - 1} variables")
    if P.degree() > k - 1:
        return Verdict("certified-out", f"degree {P.degree()} > {k - 1}")
    for j in range(1, k):
        d = hat_slice(P, j).degree()
        if d > j:
            return Verdict("certified-out", f"hat slice {j} has degree {d} > {j}")
    return _sampled_refutation(P, k, plan)


def family_table(k: int, l_max: int) -> Iterable[PolyFamilyEntry]:
    return (build_P(l, k) for l in range(1, l_max + 1))
