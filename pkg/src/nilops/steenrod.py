"""The mod 2 Steenrod algebra in the admissible basis.

Elements are :class:`AdmissibleSum` values: finite sets of admissible
monomials ``Sq^{i_1} ... Sq^{i_k}`` (``i_j >= 2 i_{j+1}``), each present with
coefficient 1. Arbitrary composites are brought to this form by Adem
rewriting, memoized on ``(Sq^a, admissible monomial)`` left products.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence, Union

from .gf2 import GF2Matrix, Subspace, solve, support

Monomial = tuple[int, ...]


def binom2(n: int, k: int) -> int:
    """``binom(n, k) mod 2`` by Lucas' theorem; zero outside ``0 <= k <= n``."""
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (k & ~n) == 0 else 0


def is_admissible(m: Sequence[int]) -> bool:
    return all(m[j] >= 2 * m[j + 1] for j in range(len(m) - 1)) and all(i >= 1 for i in m)


def degree_of(m: Sequence[int]) -> int:
    return sum(m)


def excess(m: Sequence[int]) -> int:
    """``2 i_1 - deg`` for an admissible monomial; 0 for the unit."""
    if not m:
        return 0
    if not is_admissible(m):
        raise ValueError(f"excess is defined on admissible monomials, got {tuple(m)}")
    e = 2 * m[0] - sum(m)
    assert e >= 0
    return e


def _order_key(m: Monomial) -> tuple:
    # degree ascending, then larger leading indices first
    return (sum(m), tuple(-i for i in m))


def format_monomial(m: Sequence[int]) -> str:
    return " ".join(f"Sq{i}" for i in m) if m else "1"


@dataclass(frozen=True)
class SteenrodExpression:
    """A formal GF(2) sum of composites, not necessarily admissible."""

    terms: tuple[Monomial, ...]

    def __post_init__(self):
        terms = tuple(tuple(int(i) for i in t) for t in self.terms)
        for t in terms:
            if any(i < 1 for i in t):
                raise ValueError(f"indices must be >= 1 (Sq0 is the unit), got {t}")
        object.__setattr__(self, "terms", terms)

    def __str__(self) -> str:
        return " + ".join(format_monomial(t) for t in self.terms) if self.terms else "0"


class AdmissibleSum:
    """An element of the Steenrod algebra in canonical admissible form.

    Supports ``+`` (GF(2) sum), ``*`` (algebra product) and structural
    equality. Mixed-degree sums are allowed.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, monomials: Iterable[Sequence[int]] = (), *, check: bool = True):
        acc: set[Monomial] = set()
        for m in monomials:
            m = tuple(m)
            if check and not is_admissible(m):
                raise ValueError(f"monomial {m} is not admissible; use adem_normalize")
            acc ^= {m}
        self.terms: tuple[Monomial, ...] = tuple(sorted(acc, key=_order_key))
        self._hash = hash(self.terms)

    @classmethod
    def unit(cls) -> AdmissibleSum:
        return cls([()])

    @classmethod
    def zero(cls) -> AdmissibleSum:
        return cls()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AdmissibleSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, m: Sequence[int]) -> bool:
        return tuple(m) in self.terms

    def __add__(self, other: AdmissibleSum) -> AdmissibleSum:
        return AdmissibleSum(self.terms + other.terms, check=False)

    def __mul__(self, other: AdmissibleSum) -> AdmissibleSum:
        return multiply(self, other)

    def __repr__(self) -> str:
        return f"AdmissibleSum({str(self)!r})"

    def __str__(self) -> str:
        return " + ".join(format_monomial(t) for t in self.terms) if self.terms else "0"

    @property
    def degrees(self) -> set[int]:
        return {sum(t) for t in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees) <= 1

    @property
    def degree(self) -> int | None:
        """The common degree of a homogeneous nonzero element, else ``None``."""
        ds = self.degrees
        return ds.pop() if len(ds) == 1 else None


def Sq(*indices: int) -> AdmissibleSum:
    """The normalized composite ``Sq^{i_1} ... Sq^{i_k}``; ``Sq()`` is the unit."""
    return adem_normalize(SteenrodExpression((tuple(i for i in indices if i != 0),)))


@lru_cache(maxsize=None)
def adem_pairs(a: int, b: int) -> tuple[tuple[int, int], ...]:
    """Terms ``(a + b - c, c)`` of the Adem relation for ``Sq^a Sq^b``, ``0 < a < 2b``."""
    if not (0 < a < 2 * b):
        raise ValueError(f"Sq{a} Sq{b} is already admissible")
    return tuple(
        (a + b - c, c) for c in range(a // 2 + 1) if binom2(b - c - 1, a - 2 * c)
    )


_left_memo: dict[tuple[int, Monomial], frozenset[Monomial]] = {}


def _left(a: int, m: Monomial) -> frozenset[Monomial]:
    """Admissible expansion of ``Sq^a * m`` for admissible ``m``."""
    if a == 0:
        return frozenset((m,))
    if not m or a >= 2 * m[0]:
        return frozenset(((a,) + m,))
    key = (a, m)
    hit = _left_memo.get(key)
    if hit is not None:
        return hit
    b, rest = m[0], m[1:]
    acc: set[Monomial] = set()
    for x, y in adem_pairs(a, b):
        inner = _left(y, rest) if y else (rest,)
        for t in inner:
            acc ^= _left(x, t)
    out = frozenset(acc)
    _left_memo[key] = out
    return out


def _normalize_monomial(m: Sequence[int]) -> set[Monomial]:
    acc: set[Monomial] = {()}
    for i in reversed(m):
        nxt: set[Monomial] = set()
        for t in acc:
            nxt ^= _left(i, t)
        acc = nxt
    return acc


ExpressionLike = Union[SteenrodExpression, AdmissibleSum, Iterable[Sequence[int]]]


def _terms(e: ExpressionLike) -> Iterable[Sequence[int]]:
    if isinstance(e, SteenrodExpression):
        return e.terms
    if isinstance(e, AdmissibleSum):
        return e.terms
    return e


def adem_normalize(e: ExpressionLike) -> AdmissibleSum:
    """Rewrite a sum of composites into canonical admissible form."""
    acc: set[Monomial] = set()
    for t in _terms(e):
        t = tuple(i for i in t if i != 0)
        acc ^= _normalize_monomial(t)
    return AdmissibleSum(acc, check=False)


def rewrite(
    monomial: Sequence[int], choose: Callable[[list[int]], int] | random.Random | None = None
) -> AdmissibleSum:
    """Unmemoized Adem rewriting with a caller-chosen redex order.

    ``choose`` picks which inadmissible adjacent pair to rewrite next, given the
    list of candidate positions; a :class:`random.Random` picks uniformly. The
    default takes the leftmost pair. Slow; meant for checking that the canonical
    form does not depend on the order of rewriting.
    """
    if isinstance(choose, random.Random):
        pick = choose.choice
    elif choose is None:
        pick = lambda positions: positions[0]  # noqa: E731
    else:
        pick = choose
    pending: set[Monomial] = {tuple(i for i in monomial if i != 0)}
    done: set[Monomial] = set()
    while pending:
        m = pending.pop()
        positions = [j for j in range(len(m) - 1) if m[j] < 2 * m[j + 1]]
        if not positions:
            done ^= {m}
            continue
        j = pick(positions)
        for x, y in adem_pairs(m[j], m[j + 1]):
            t = m[:j] + ((x, y) if y else (x,)) + m[j + 2:]
            if t in pending:
                pending.remove(t)
            else:
                pending.add(t)
    return AdmissibleSum(done, check=False)


def multiply(a: AdmissibleSum, b: AdmissibleSum) -> AdmissibleSum:
    acc: set[Monomial] = set()
    for s in b.terms:
        for t in a.terms:
            cur: set[Monomial] = {s}
            for i in reversed(t):
                nxt: set[Monomial] = set()
                for m in cur:
                    nxt ^= _left(i, m)
                cur = nxt
            acc ^= cur
    return AdmissibleSum(acc, check=False)


@lru_cache(maxsize=None)
def _chi_sq(n: int) -> AdmissibleSum:
    if n == 0:
        return AdmissibleSum.unit()
    acc = AdmissibleSum.zero()
    for i in range(1, n + 1):
        acc = acc + multiply(AdmissibleSum([(i,)]), _chi_sq(n - i))
    return acc


def conjugate(a: AdmissibleSum) -> AdmissibleSum:
    """The antipode: ``sum_{i+j=n} Sq^i chi(Sq^j) = 0``, extended anti-multiplicatively."""
    acc = AdmissibleSum.zero()
    for t in a.terms:
        term = AdmissibleSum.unit()
        for i in t:
            term = multiply(_chi_sq(i), term)
        acc = acc + term
    return acc


@lru_cache(maxsize=None)
def _admissible(n: int, max_first: int) -> tuple[Monomial, ...]:
    if n == 0:
        return ((),)
    out: list[Monomial] = []
    for first in range(min(n, max_first), 0, -1):
        for tail in _admissible(n - first, first // 2):
            out.append((first,) + tail)
    return tuple(out)


def full_basis(degree: int) -> tuple[Monomial, ...]:
    """All admissible monomials of the given degree, in canonical order."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    return _admissible(degree, degree)


@lru_cache(maxsize=None)
def _basis_index(degree: int) -> dict[Monomial, int]:
    return {m: j for j, m in enumerate(full_basis(degree))}


def coordinates(a: AdmissibleSum, degree: int) -> int:
    """Bit vector of ``a`` in the canonical admissible basis of ``degree``."""
    index = _basis_index(degree)
    v = 0
    for t in a.terms:
        if sum(t) != degree:
            raise ValueError(f"term {format_monomial(t)} is not in degree {degree}")
        v |= 1 << index[t]
    return v


def from_coordinates(v: int, degree: int) -> AdmissibleSum:
    basis = full_basis(degree)
    return AdmissibleSum((basis[j] for j in support(v)), check=False)


@dataclass(frozen=True)
class SubalgebraBasis:
    """Per-degree bases of ``A(n)`` up to ``degree_bound``."""

    n: int
    degree_bound: int
    basis: dict[int, tuple[AdmissibleSum, ...]]

    def dim(self, degree: int) -> int:
        return len(self.basis.get(degree, ()))

    def total_dim(self) -> int:
        return sum(len(b) for b in self.basis.values())


@lru_cache(maxsize=None)
def subalgebra_basis(n: int, degree_bound: int) -> SubalgebraBasis:
    """Span ``A(n)``, generated by ``Sq^1, Sq^2, ..., Sq^{2^n}``, degree by degree.

    A degree-``d`` element of ``A(n)`` is a sum of words in the generators, so
    the degree-``d`` piece is spanned by ``Sq^{2^j} x`` with ``x`` running over
    the basis in degree ``d - 2^j``.
    """
    if n < 0 or degree_bound < 0:
        raise ValueError("n and degree_bound must be non-negative")
    gens = [1 << j for j in range(n + 1)]
    basis: dict[int, tuple[AdmissibleSum, ...]] = {0: (AdmissibleSum.unit(),)}
    for d in range(1, degree_bound + 1):
        span = Subspace()
        for g in gens:
            for x in basis.get(d - g, ()):
                span.add(coordinates(multiply(AdmissibleSum([(g,)]), x), d))
        basis[d] = tuple(from_coordinates(v, d) for v in span.basis)
    return SubalgebraBasis(n, degree_bound, basis)


def ideal_membership(target: AdmissibleSum, n: int) -> list[tuple[AdmissibleSum, AdmissibleSum]] | None:
    """Decide ``target in Abar(n-1) Sq^{2^n} Abar(n-1)``.

    Returns a witness list of pairs ``(a_j, b_j)`` of basis elements of positive
    degree in ``A(n-1)`` with ``sum_j a_j Sq^{2^n} b_j == target``, or ``None``
    when the target is not in the span.

    Raises:
        ValueError: ``n < 1`` or the target is not homogeneous of degree ``2^{n+1}``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    top = 1 << (n + 1)
    if target and target.degrees != {top}:
        raise ValueError(f"target must be homogeneous of degree {top}, got degrees {sorted(target.degrees)}")
    if not target:
        return []
    half = 1 << n
    sub = subalgebra_basis(n - 1, half - 1)
    middle = AdmissibleSum([(half,)])
    pairs: list[tuple[AdmissibleSum, AdmissibleSum]] = []
    columns: list[int] = []
    for p in range(1, half):
        for a in sub.basis[p]:
            left = multiply(a, middle)
            for b in sub.basis[half - p]:
                pairs.append((a, b))
                columns.append(coordinates(multiply(left, b), top))
    nrows = len(full_basis(top))
    x = solve(GF2Matrix.from_columns(columns, nrows), coordinates(target, top))
    if x is None:
        return None
    return [pairs[j] for j in support(x)]


def conjugation_decomposition(n: int) -> list[tuple[AdmissibleSum, AdmissibleSum]]:
    """``Sq^{2^n} Sq^{2^n} = sum_j a_j b_j`` with ``2^n < deg b_j < 2^{n+1}``, via the antipode.

    Expands ``chi(Sq^{2^n} Sq^{2^n})`` in admissibles ``Sq^{i} m'``; each has
    ``i > 2^n`` and length at least 2, and applying ``chi`` again gives the pair
    ``(chi(m'), chi(Sq^i))``.

    Raises:
        ArithmeticError: a term violates the leading-index or length condition.
    """
    half = 1 << n
    c = conjugate(Sq(half, half))
    out = []
    for m in c.terms:
        if len(m) < 2 or m[0] <= half:
            raise ArithmeticError(f"term {format_monomial(m)} breaks the leading-index pattern")
        out.append((conjugate(AdmissibleSum([m[1:]])), _chi_sq(m[0])))
    return out
