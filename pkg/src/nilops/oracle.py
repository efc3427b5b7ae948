"""Evaluation of Steenrod operations on polynomial classes.

An element ``theta`` of degree at most ``d`` is determined by
``theta(u_1 ... u_d)`` in ``F_2[u_1, ..., u_d]`` (the kernel of evaluation on
``u_1 ... u_n`` is spanned by the admissibles of excess greater than ``n``).
That value is a symmetric polynomial, so it is stored as a set of exponent
multisets, each standing for the sum of the distinct monomials in its orbit.
Only the Cartan formula and ``Sq u = u + u^2`` are used; Adem relations are not.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from .steenrod import AdmissibleSum, SteenrodExpression, binom2

# an exponent multiset as sorted ((exponent, count), ...) pairs
Orbit = tuple[tuple[int, int], ...]


def _orbit(exponents: Iterable[int]) -> Orbit:
    return tuple(sorted(Counter(exponents).items()))


@lru_cache(maxsize=None)
def _increments(e: int) -> tuple[int, ...]:
    return tuple(t for t in range(e + 1) if binom2(e, t))


@lru_cache(maxsize=None)
def _group_outcomes(e: int, count: int, budget: int) -> tuple[tuple[int, Orbit], ...]:
    """Ways ``count`` variables of exponent ``e`` can absorb a total increment ``<= budget``."""
    incs = _increments(e)
    out: dict[tuple[int, Orbit], None] = {}

    def rec(j: int, left: int, used: int, acc: list[int]):
        if j == len(incs) - 1:
            t = incs[j]
            total = used + t * left
            if total <= budget:
                out[(total, _orbit(acc + [e + t] * left))] = None
            return
        t = incs[j]
        for n in range(left + 1):
            if used + t * n > budget:
                break
            rec(j + 1, left - n, used + t * n, acc + [e + t] * n)

    rec(0, count, 0, [])
    return tuple(out)


def _targets(lam: Orbit, i: int) -> set[Orbit]:
    partial: dict[int, list[list[int]]] = {0: [[]]}
    for e, c in lam:
        nxt: dict[int, list[list[int]]] = {}
        for used, lists in partial.items():
            for total, orb in _group_outcomes(e, c, i - used):
                flat = [x for x, n in orb for _ in range(n)]
                nxt.setdefault(used + total, []).extend(l + flat for l in lists)
        partial = nxt
    return {_orbit(l) for l in partial.get(i, [])}


@lru_cache(maxsize=None)
def _coefficient(lam: Orbit, mu: Orbit) -> int:
    """Coefficient of one fixed monomial of orbit ``mu`` in ``Sq(m_lam)``.

    Counts, mod 2, the arrangements of ``lam`` over the variables for which
    every factor ``binom(nu_j, mu_j - nu_j)`` is odd. By Frobenius this is the
    coefficient of ``prod_e y_e^{c_e}`` in ``prod_m prod_{2^k in n_m} sum_{e ok} y_e^{2^k}``.
    """
    lam_exps = [e for e, _ in lam]
    need = tuple(c for _, c in lam)
    factors = []
    for m, n in mu:
        allowed = [idx for idx, e in enumerate(lam_exps) if binom2(e, m - e)]
        k = 0
        while n:
            if n & 1:
                factors.append((allowed, 1 << k))
            n >>= 1
            k += 1
    states = {need}
    for allowed, w in factors:
        nxt: set[tuple[int, ...]] = set()
        for s in states:
            for idx in allowed:
                if s[idx] >= w:
                    t = s[:idx] + (s[idx] - w,) + s[idx + 1:]
                    nxt ^= {t}
        states = nxt
        if not states:
            return 0
    return 1 if tuple(0 for _ in need) in states else 0


@lru_cache(maxsize=None)
def _apply_orbit(i: int, lam: Orbit) -> frozenset[Orbit]:
    if i == 0:
        return frozenset((lam,))
    out: set[Orbit] = set()
    for mu in _targets(lam, i):
        if _coefficient(lam, mu):
            out ^= {mu}
    return frozenset(out)


def apply_sq(i: int, poly: frozenset[Orbit]) -> frozenset[Orbit]:
    out: set[Orbit] = set()
    for lam in poly:
        out ^= _apply_orbit(i, lam)
    return frozenset(out)


def evaluate(op: AdmissibleSum | SteenrodExpression | Iterable[Sequence[int]], nvars: int) -> frozenset[Orbit]:
    """``op(u_1 ... u_nvars)`` as a set of monomial-symmetric orbits.

    Composites are applied right to left and need not be admissible.
    """
    terms = op.terms if isinstance(op, (AdmissibleSum, SteenrodExpression)) else op
    start = frozenset((_orbit([1] * nvars),))
    acc: set[Orbit] = set()
    for t in terms:
        poly = start
        for i in reversed(tuple(t)):
            poly = apply_sq(i, poly)
            if not poly:
                break
        acc ^= poly
    return frozenset(acc)


def agree(x, y, degree: int) -> bool:
    """Whether two elements of degree at most ``degree`` act identically (hence are equal)."""
    n = max(degree, 1)
    return evaluate(x, n) == evaluate(y, n)


# -- brute force on explicit monomials, for small cross-checks --

Poly = frozenset  # of exponent tuples


def sq_on_monomial(i: int, exps: tuple[int, ...]) -> set[tuple[int, ...]]:
    """``Sq^i`` of a single monomial by expanding the Cartan formula over all variables."""
    out: set[tuple[int, ...]] = set()
    choices = [_increments(e) for e in exps]
    for incs in product(*choices):
        if sum(incs) == i:
            out ^= {tuple(e + t for e, t in zip(exps, incs))}
    return out


def brute_evaluate(monomial: Sequence[int], exps: tuple[int, ...]) -> frozenset[tuple[int, ...]]:
    poly: set[tuple[int, ...]] = {exps}
    for i in reversed(tuple(monomial)):
        nxt: set[tuple[int, ...]] = set()
        for m in poly:
            nxt ^= sq_on_monomial(i, m)
        poly = nxt
    return frozenset(poly)
