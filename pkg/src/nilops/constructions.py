"""Standard example algebras and a generator of random valid finite modules."""

from __future__ import annotations

import random
from itertools import combinations
from typing import Sequence

from .gf2 import GF2Matrix, Subspace, inverse, support
from .modules import (
    DirectSum,
    FiniteUnstableAlgebra,
    FiniteUnstableModule,
    Free,
    RPInfinity,
    Suspension,
    Tensor,
    UnstableModule,
    finite_subquotient,
    to_finite,
)
from .steenrod import binom2


def trivial_algebra() -> FiniteUnstableAlgebra:
    """``F_2`` concentrated in degree 0."""
    return FiniteUnstableAlgebra(FiniteUnstableModule([1], name="F2"))


def truncated_polynomial(gen_degree: int = 1, height: int = 4) -> FiniteUnstableAlgebra:
    """``F_2[u]/u^height`` with ``|u| = gen_degree`` and total square ``u + u^2``.

    Only powers of two give unstable algebras; other degrees fail validation.
    """
    if gen_degree < 1 or height < 1:
        raise ValueError("gen_degree and height must be positive")
    g = gen_degree
    top = (height - 1) * g
    dims = [1 if d % g == 0 else 0 for d in range(top + 1)]
    ops: dict[int, dict[int, GF2Matrix]] = {}
    for k in range(height):
        for j in range(1, k + 1):
            if k + j < height and binom2(k, j):
                ops.setdefault(j * g, {})[k * g] = GF2Matrix(1, 1, (1,))
    labels = {(k * g, 0): (f"u^{k}" if k > 1 else ("u" if k else "1")) for k in range(height)}
    name = f"F2[u{g}]/u^{height}" if g > 1 else f"F2[u]/u^{height}"
    module = FiniteUnstableModule(dims, ops, labels=labels, name=name)
    products = {}
    for a in range(1, height):
        for b in range(a, height):
            if a + b < height:
                products[(a * g, b * g)] = [[1]]
    return FiniteUnstableAlgebra(module, products)


def exterior_algebra(*degrees: int) -> FiniteUnstableAlgebra:
    """``Λ(x_{d_1}, ...)`` with every operation of positive degree acting as zero."""
    if not degrees or any(d < 1 for d in degrees):
        raise ValueError("need at least one positive generator degree")
    subsets: dict[int, list[tuple[int, ...]]] = {}
    for r in range(len(degrees) + 1):
        for c in combinations(range(len(degrees)), r):
            subsets.setdefault(sum(degrees[i] for i in c), []).append(c)
    top = sum(degrees)
    dims = [len(subsets.get(d, [])) for d in range(top + 1)]
    index = {c: (d, j) for d, cs in subsets.items() for j, c in enumerate(cs)}

    def lab(c):
        return "1" if not c else "".join(f"x{degrees[i]}" + ("" if degrees.count(degrees[i]) == 1 else f"_{i}") for i in c)

    labels = {(d, j): lab(c) for c, (d, j) in index.items()}
    name = "Λ(" + ", ".join(f"x{d}" for d in degrees) + ")"
    module = FiniteUnstableModule(dims, labels=labels, name=name)
    products: dict[tuple[int, int], list[list[int]]] = {}
    for d1 in range(1, top + 1):
        for d2 in range(d1, top + 1 - d1):
            if not dims[d1] or not dims[d2]:
                continue
            t = [[0] * dims[d2] for _ in range(dims[d1])]
            for a, ca in enumerate(subsets[d1]):
                for b, cb in enumerate(subsets[d2]):
                    if not set(ca) & set(cb):
                        t[a][b] = 1 << index[tuple(sorted(ca + cb))][1]
            products[(d1, d2)] = t
    return FiniteUnstableAlgebra(module, products)


def algebra_tensor(a: FiniteUnstableAlgebra, b: FiniteUnstableAlgebra) -> FiniteUnstableAlgebra:
    """``A ⊗ B`` with the Cartan action and the factorwise product."""
    t = Tensor(a.module, b.module)
    top = a.top_degree + b.top_degree
    module = to_finite(t, top, name=f"{a.module.name} ⊗ {b.module.name}")
    products: dict[tuple[int, int], list[list[int]]] = {}
    for d1 in range(1, top + 1):
        for d2 in range(d1, top + 1 - d1):
            n1, n2 = module.dim(d1), module.dim(d2)
            if not n1 or not n2:
                continue
            table = [[0] * n2 for _ in range(n1)]
            for i in range(n1):
                p1, x1, y1 = t.entry(d1, i)
                for j in range(n2):
                    p2, x2, y2 = t.entry(d2, j)
                    xa = a.product_basis(p1, x1, p2, x2)
                    yb = b.product_basis(d1 - p1, y1, d2 - p2, y2)
                    table[i][j] = t.pure(p1 + p2, xa, d1 + d2 - p1 - p2, yb)
            products[(d1, d2)] = table
    return FiniteUnstableAlgebra(module, products)


def rp_truncation(top: int) -> FiniteUnstableModule:
    """``H̃^*(RP^top)``."""
    return to_finite(RPInfinity(), top, name=f"H̃*RP{top}")


def generated_submodule(m: UnstableModule, generators: dict[int, Sequence[int]], top: int) -> dict[int, Subspace]:
    """The submodule generated by homogeneous vectors, in degrees ``0..top``."""
    out: dict[int, Subspace] = {}
    for d in range(top + 1):
        s = Subspace.span(generators.get(d, ()))
        for e in range(d):
            for v in out[e].basis:
                s.add(m.act_vector(d - e, e, v, m.closed_form))
        out[d] = s
    return out


def _random_invertible(rng: random.Random, n: int) -> GF2Matrix:
    while True:
        m = GF2Matrix(n, n, tuple(rng.getrandbits(n) for _ in range(n)))
        if m.rank() == n:
            return m


def change_basis(m: FiniteUnstableModule, rng: random.Random, name: str | None = None) -> FiniteUnstableModule:
    """Conjugate every action block by random invertible matrices (an isomorphic module)."""
    ps = [_random_invertible(rng, n) for n in m.dims]
    pinv = [inverse(p) for p in ps]
    ops = {}
    for i, a in m.actions.items():
        ops[i] = {d: ps[d + i] @ blk @ pinv[d] for d, blk in a.blocks.items()}
    return FiniteUnstableModule(m.dims, ops, name=name or m.name)


def _pieces(top: int) -> list[UnstableModule]:
    return [
        RPInfinity(),
        Free(1, top),
        Free(2, top),
        Free(3, top),
        FiniteUnstableModule([1], name="F2"),
        Tensor(RPInfinity(), Free(1, top)),
    ]


def random_finite_module(
    rng: random.Random, top: int = 10, max_dim: int = 3, name: str = "M"
) -> FiniteUnstableModule:
    """A random valid finite module with top degree ``<= top`` and dims ``<= max_dim``.

    Built from suspensions of standard modules cut off above a random degree,
    then a random submodule or quotient and a random change of basis.
    """
    while True:
        parts = []
        for _ in range(rng.randint(1, 3)):
            base = rng.choice(_pieces(top))
            s = rng.randint(0, top // 2)
            parts.append(Suspension(base, s) if s else base)
        cut = rng.randint(1, top)
        m = to_finite(DirectSum(*parts) if len(parts) > 1 else parts[0], cut)
        mode = rng.random()
        if mode < 0.6 and sum(m.dims):
            gens: dict[int, list[int]] = {}
            for _ in range(rng.randint(1, 3)):
                degs = [d for d in range(cut + 1) if m.dim(d)]
                d = rng.choice(degs)
                v = rng.getrandbits(m.dim(d)) or 1
                gens.setdefault(d, []).append(v)
            sub = generated_submodule(m, gens, cut)
            if mode < 0.3:
                m, _ = finite_subquotient(m, {d: s.basis for d, s in sub.items()}, {}, cut)
            else:
                full = {d: [1 << j for j in range(m.dim(d))] for d in range(cut + 1)}
                m, _ = finite_subquotient(m, full, {d: s.basis for d, s in sub.items()}, cut)
        if max(m.dims) > max_dim or not any(m.dims):
            continue
        # drop trailing zero degrees so the stated top is the real one
        last = max(d for d in range(len(m.dims)) if m.dims[d])
        if last < m.top_degree:
            m = to_finite(m, last)
        return change_basis(m, rng, name=name)


def random_corpus(seed: int, count: int, top: int = 10, max_dim: int = 3) -> list[FiniteUnstableModule]:
    rng = random.Random(seed)
    return [random_finite_module(rng, top, max_dim, name=f"M{j}") for j in range(count)]
