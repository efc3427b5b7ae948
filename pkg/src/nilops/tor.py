"""Tor over a finite unstable algebra via the reduced bar complex.

``Tor^{-s,t}`` is the homology of ``Ā^{⊗s}`` in internal degree ``t`` under
``d[a_1|...|a_s] = sum_i [a_1|...|a_i a_{i+1}|...|a_s]``. Steenrod operations act
on bar elements by the Cartan formula across factors; the action is computed
on cycle representatives and checked to descend to homology.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product as iproduct

from .gf2 import GF2Matrix, GradedVectorSpace, Subquotient, Subspace, kernel, subquotient, support
from .modules import FiniteUnstableAlgebra, FiniteUnstableModule, finite_subquotient
from .nilfilt import DEFAULT_C_MAX, filtration_layer, nilpotence_degree

SUSPENSION_CONVENTION = "E_inf^{-s,*} = Sigma^s(F_{-s}/F_{-s+1})"
DIFFERENTIAL_SHAPE = "d_r: E_r^{s,*} -> Sigma^{r-1} E_r^{s+r,*} (not computed)"
DEFAULT_MAX_DIM = 4096

Cell = tuple[tuple[int, int], ...]  # ((degree, basis index), ...) one pair per bar factor


class TorConsistencyError(AssertionError):
    pass


def entry_key(s: int, t: int) -> str:
    """``"(-s,t)"``; the zeroth column is written ``"(0,t)"``."""
    return f"(-{s},{t})" if s else f"(0,{t})"


class BarComplex:
    """The reduced bar complex of an augmented finite algebra, built lazily per ``(s, t)``."""

    def __init__(self, alg: FiniteUnstableAlgebra):
        self.alg = alg
        self.m = alg.module
        self.degrees = [d for d in range(1, self.m.top_degree + 1) if self.m.dim(d)]
        self._cells: dict[tuple[int, int], tuple[list[Cell], dict[Cell, int]]] = {}
        self._diff: dict[tuple[int, int], list[int]] = {}

    def connectivity(self) -> int:
        """``c`` such that ``Ā`` vanishes below degree ``c + 1``."""
        return (self.degrees[0] - 1) if self.degrees else self.m.top_degree

    def cells(self, s: int, t: int) -> list[Cell]:
        return self._index(s, t)[0]

    def dim(self, s: int, t: int) -> int:
        return len(self._index(s, t)[0])

    def count(self, s: int, t: int) -> int:
        """Dimension of ``Ā^{⊗s}`` in degree ``t`` without enumerating cells."""
        memo: dict[tuple[int, int], int] = {}

        def rec(k: int, r: int) -> int:
            if k == 0:
                return 1 if r == 0 else 0
            if (k, r) not in memo:
                memo[(k, r)] = sum(self.m.dim(d) * rec(k - 1, r - d) for d in self.degrees if d <= r)
            return memo[(k, r)]

        return rec(s, t)

    def _index(self, s: int, t: int):
        hit = self._cells.get((s, t))
        if hit is not None:
            return hit
        out: list[Cell] = []

        def rec(k: int, r: int, acc: list[tuple[int, int]]):
            if k == 0:
                if r == 0:
                    out.append(tuple(acc))
                return
            for d in self.degrees:
                if d > r:
                    break
                for j in range(self.m.dim(d)):
                    acc.append((d, j))
                    rec(k - 1, r - d, acc)
                    acc.pop()

        rec(s, t, [])
        hit = (out, {c: n for n, c in enumerate(out)})
        self._cells[(s, t)] = hit
        return hit

    def differential(self, s: int, t: int) -> list[int]:
        """Columns of ``d: B_s(t) -> B_{s-1}(t)`` as bit vectors."""
        key = (s, t)
        if key in self._diff:
            return self._diff[key]
        cells = self.cells(s, t)
        cols = []
        if s <= 1:
            cols = [0] * len(cells)
        else:
            _, target = self._index(s - 1, t)
            for cell in cells:
                col = 0
                for i in range(s - 1):
                    (d1, a), (d2, b) = cell[i], cell[i + 1]
                    prod = self.alg.product_basis(d1, a, d2, b)
                    for j in support(prod):
                        col ^= 1 << target[cell[:i] + ((d1 + d2, j),) + cell[i + 2:]]
                cols.append(col)
        self._diff[key] = cols
        return cols

    def act(self, i: int, s: int, t: int, v: int) -> int:
        """``Sq^i`` of a bar vector by the Cartan formula across factors."""
        if i == 0:
            return v
        _, target = self._index(s, t + i)
        out = 0
        for n in support(v):
            cell = self.cells(s, t)[n]
            for split in _splits(i, [d for d, _ in cell]):
                factors = []
                for (d, a), r in zip(cell, split):
                    w = self.m.act_basis(r, d, a)
                    if not w:
                        break
                    factors.append([(d + r, j) for j in support(w)])
                else:
                    for combo in iproduct(*factors):
                        out ^= 1 << target[combo]
        return out


def _splits(i: int, caps: list[int]):
    """All ``(i_1, ..., i_s)`` with ``0 <= i_j <= caps[j]`` summing to ``i``."""
    if not caps:
        if i == 0:
            yield ()
        return
    rest = sum(caps[1:])
    for r in range(max(0, i - rest), min(i, caps[0]) + 1):
        for tail in _splits(i - r, caps[1:]):
            yield (r,) + tail


@dataclass(frozen=True)
class TorEntry:
    s: int
    t: int
    dim: int | None  # None when the entry is incomplete
    representatives: tuple[int, ...] = ()
    labels: tuple[str, ...] = ()

    @property
    def complete(self) -> bool:
        return self.dim is not None


@dataclass
class TorPage:
    """``Tor^{-s,t}`` for ``s <= s_max`` and ``t <= t_max`` with the Steenrod action.

    ``action[(s, t, i)]`` is the matrix of ``Sq^i`` from ``(s, t)`` to ``(s, t + i)``.
    """

    algebra: FiniteUnstableAlgebra
    s_max: int
    t_max: int
    entries: dict[tuple[int, int], TorEntry]
    action: dict[tuple[int, int, int], GF2Matrix]
    suspension_convention: str = SUSPENSION_CONVENTION
    metadata: dict = field(default_factory=dict)
    annotations: dict[tuple[int, int], int] = field(default_factory=dict)

    def dim(self, s: int, t: int) -> int | None:
        e = self.entries.get((s, t))
        return 0 if e is None else e.dim

    def column(self, s: int) -> FiniteUnstableModule:
        """Column ``s`` as a module graded by internal degree (validated)."""
        dims = []
        for t in range(self.t_max + 1):
            e = self.entries[(s, t)]
            if not e.complete:
                raise TorConsistencyError(f"entry (-{s},{t}) is incomplete")
            dims.append(e.dim)
        ops: dict[int, dict[int, GF2Matrix]] = {}
        for (ss, t, i), mtx in self.action.items():
            if ss == s:
                ops.setdefault(i, {})[t] = mtx
        labels = {(t, j): lab for t in range(self.t_max + 1) for j, lab in enumerate(self.entries[(s, t)].labels)}
        top_nonzero = s * self.algebra.top_degree
        return FiniteUnstableModule(
            dims, ops, labels=labels, name=f"Tor^-{s}", truncated=self.t_max < top_nonzero
        )

    def to_dict(self) -> dict:
        entries = {}
        for (s, t), e in sorted(self.entries.items()):
            if e.complete and e.dim == 0:
                continue
            item: dict = {"s": s, "t": t, "dim": e.dim, "complete": e.complete}
            if e.complete:
                item["representatives"] = list(e.labels)
                acts = []
                for i in range(1, self.t_max - t + 1):
                    mtx = self.action.get((s, t, i))
                    if mtx is not None and not mtx.is_zero():
                        acts.append({"op": f"Sq{i}", "target": entry_key(s, t + i), "matrix": mtx.to_lists()})
                item["action"] = acts
                if (s, t) in self.annotations:
                    item["nil_at_least"] = self.annotations[(s, t)]
            entries[entry_key(s, t)] = item
        return {
            "algebra": self.algebra.module.name,
            "s_max": self.s_max,
            "t_max": self.t_max,
            "suspension_convention": self.suspension_convention,
            "metadata": self.metadata,
            "entries": entries,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        head = f"# Tor over {self.algebra.module.name}: s_max={self.s_max} t_max={self.t_max}"
        w = 4
        lines = [head, "t\\-s " + "".join(f"{s:>{w}}" for s in range(self.s_max + 1))]
        for t in range(self.t_max + 1):
            row = []
            for s in range(self.s_max + 1):
                e = self.entries[(s, t)]
                row.append("?" if not e.complete else ("." if e.dim == 0 else str(e.dim)))
            lines.append(f"{t:<5}" + "".join(f"{c:>{w}}" for c in row))
        for (s, t), e in sorted(self.entries.items()):
            if e.complete and e.dim:
                lines.append(f"{entry_key(s, t)}: " + ", ".join(e.labels))
        return "\n".join(lines) + "\n"


def _bar_label(m: FiniteUnstableModule, cells: list[Cell], v: int) -> str:
    parts = []
    for n in support(v):
        cell = cells[n]
        parts.append("[" + "|".join(m.label(d, j) for d, j in cell) + "]")
    return " + ".join(parts) if parts else "0"


def bar_tor(
    alg: FiniteUnstableAlgebra, s_max: int, t_max: int, *, max_dim: int = DEFAULT_MAX_DIM
) -> TorPage:
    """Compute ``Tor^{-s,t}`` for ``0 <= s <= s_max``, ``0 <= t <= t_max``.

    Entries whose bar complex pieces exceed ``max_dim`` are marked incomplete.
    Every computed degree is checked for ``d^2 = 0``; the action is checked to
    map cycles to cycles and boundaries to boundaries.

    Raises:
        ValueError: negative bounds.
        TorConsistencyError: a structural check failed.
    """
    if s_max < 0 or t_max < 0:
        raise ValueError("bounds must be non-negative")
    bar = BarComplex(alg)
    entries: dict[tuple[int, int], TorEntry] = {}
    homology: dict[tuple[int, int], Subquotient] = {}
    cycles: dict[tuple[int, int], Subspace] = {}
    bounds: dict[tuple[int, int], Subspace] = {}
    for s in range(s_max + 1):
        for t in range(t_max + 1):
            sizes = [bar.count(s + r, t) for r in (-1, 0, 1) if s + r >= 0]
            if max(sizes) > max_dim:
                entries[(s, t)] = TorEntry(s, t, None)
                continue
            n = bar.dim(s, t)
            d_out = bar.differential(s, t)
            d_in = bar.differential(s + 1, t)
            if s >= 2:
                prev = bar.differential(s - 1, t)
                for col in d_out:
                    acc = 0
                    for j in support(col):
                        acc ^= prev[j]
                    if acc:
                        raise TorConsistencyError(f"d^2 != 0 at (-{s},{t})")
            z = Subspace.span(kernel(GF2Matrix.from_columns(d_out, bar.dim(s - 1, t) if s else 0)))
            b = Subspace.span(d_in)
            space = GradedVectorSpace((n,))
            sq = subquotient(space, {0: z.basis}, {0: b.basis})
            homology[(s, t)], cycles[(s, t)], bounds[(s, t)] = sq, z, b
            reps = sq.representatives[0]
            cells = bar.cells(s, t)
            entries[(s, t)] = TorEntry(s, t, len(reps), tuple(reps), tuple(_bar_label(alg.module, cells, r) for r in reps))
    action: dict[tuple[int, int, int], GF2Matrix] = {}
    for (s, t), sq in homology.items():
        for i in range(1, t_max - t + 1):
            tgt = homology.get((s, t + i))
            if tgt is None:
                continue
            for bv in bounds[(s, t)].basis:
                if bar.act(i, s, t, bv) not in bounds[(s, t + i)]:
                    raise TorConsistencyError(f"Sq{i} does not preserve boundaries at (-{s},{t})")
            cols = []
            for rep in sq.representatives[0]:
                w = bar.act(i, s, t, rep)
                if w not in cycles[(s, t + i)]:
                    raise TorConsistencyError(f"Sq{i} does not preserve cycles at (-{s},{t})")
                cols.append(tgt.project(0, w))
            if sq.representatives[0]:
                action[(s, t, i)] = GF2Matrix.from_columns(cols, len(tgt.representatives[0]))
    page = TorPage(alg, s_max, t_max, entries, action)
    page.metadata = {
        "differential_shape": DIFFERENTIAL_SHAPE,
        "connectivity": bar.connectivity(),
        "max_dim": max_dim,
        "euler_checked_degrees": _euler_check(bar, entries, s_max, t_max),
    }
    return page


def _euler_check(bar: BarComplex, entries, s_max: int, t_max: int) -> list[int]:
    """Compare alternating sums of chain and homology dims where all columns are known."""
    ok = []
    step = bar.connectivity() + 1
    for t in range(t_max + 1):
        top_s = t // step if step else t
        if top_s > s_max or any(not entries[(s, t)].complete for s in range(top_s + 1)):
            continue
        chain = sum((-1) ** s * bar.count(s, t) for s in range(top_s + 1))
        hom = sum((-1) ** s * entries[(s, t)].dim for s in range(top_s + 1))
        # the bar complex is zero past top_s, so the sums must agree
        if chain != hom:
            raise TorConsistencyError(f"Euler characteristic mismatch in internal degree {t}")
        ok.append(t)
    return ok


def augmentation_ideal(alg: FiniteUnstableAlgebra) -> FiniteUnstableModule:
    m = alg.module
    top = m.top_degree
    gens = {d: [1 << j for j in range(m.dim(d))] for d in range(1, top + 1)}
    q, _ = finite_subquotient(m, gens, {}, top, name=f"Ā({m.name})")
    return q


def nilpotence_lower_bound(alg: FiniteUnstableAlgebra, c_max: int = DEFAULT_C_MAX) -> int:
    """The largest ``d`` with ``Ā`` equal to its own ``d``-th filtration layer."""
    a = augmentation_ideal(alg)
    full = [a.dim(t) for t in range(a.top_degree + 1)]
    d = 0
    while d <= a.top_degree and filtration_layer(a, d + 1, a.top_degree, c_max).dims() == full:
        d += 1
    return d


@dataclass(frozen=True)
class ColumnNilpotence:
    s: int
    d: int
    bound: int
    classes: tuple[tuple[int, int, int | None], ...]  # (t, index, certified nilpotence degree)

    @property
    def holds(self) -> bool:
        return all(c is not None and c >= self.bound for _, _, c in self.classes)


def column_nilpotence(page: TorPage, s: int, d: int | None = None, c_max: int = DEFAULT_C_MAX) -> ColumnNilpotence:
    """Certify that every class of column ``s`` is at least ``s * d``-nilpotent.

    The column is recomputed through internal degree ``s * top`` so that it is a
    genuine finite module and each certificate is exact.
    """
    alg = page.algebra
    if d is None:
        d = nilpotence_lower_bound(alg, c_max)
    top = max(page.t_max, s * alg.top_degree)
    full = page if top == page.t_max else bar_tor(alg, s, top)
    col = full.column(s)
    classes = []
    for t in range(col.top_degree + 1):
        for j in range(col.dim(t)):
            cert = nilpotence_degree(col, col.basis_element(t, j), s * d + 1, c_max)
            val = cert.at_least if cert.verdict != "unknown" else None
            classes.append((t, j, val))
            if t <= page.t_max and val is not None:
                page.annotations[(s, t)] = min(page.annotations.get((s, t), val), val)
    return ColumnNilpotence(s, d, s * d, tuple(classes))
