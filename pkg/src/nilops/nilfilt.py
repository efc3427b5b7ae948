"""The nilpotent filtration of unstable modules.

An element ``x`` is ``s``-nilpotent when for every ``k < s`` some iterate
``(Sq_k)^c x`` vanishes. Iterates double degrees, so every search carries an
explicit budget ``c_max``; chains that never vanish are certified only by the
closed-form rules that module shapes register through ``chain_injective``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

from .gf2 import GF2Matrix, Subquotient, Subspace, kernel, preimage, support
from .modules import (
    FiniteUnstableModule,
    ModuleElement,
    ModuleMap,
    Submodule,
    TruncationError,
    UnstableModule,
    finite_subquotient,
)

DEFAULT_C_MAX = 16


class UndeterminedError(ArithmeticError):
    """A verdict could not be reached within the given budget."""

    def __init__(self, message: str, degree: int | None = None, k: int | None = None, budget: int | None = None):
        super().__init__(message)
        self.degree, self.k, self.budget = degree, k, budget


class ConsistencyError(AssertionError):
    """A computed object failed a property that the theory guarantees."""


def _step(m: UnstableModule, k: int, degree: int, v: int) -> tuple[int, int]:
    """One application of ``Sq_k`` to a homogeneous vector: ``(new degree, vector)``."""
    if k > degree or k < 0:
        return 2 * degree - k, 0
    return 2 * degree - k, m.act_vector(degree - k, degree, v, m.closed_form)


@dataclass(frozen=True)
class Obstruction:
    """``(Sq_k)^c x`` never vanishes.

    ``chain`` lists the computed iterates ``(degree, vector)`` starting at ``x``;
    ``tag`` names the rule proving the last one survives forever.
    """

    k: int
    chain: tuple[tuple[int, int], ...]
    tag: str


@dataclass(frozen=True)
class NilpotenceCertificate:
    """Three-valued nilpotence verdict for a homogeneous element.

    ``witnesses[k] = c`` means ``(Sq_k)^c x = 0``; these cover ``0 <= k < at_least``.
    ``obstruction`` (if present) shows ``x`` is not ``(at_least + 1)``-nilpotent.
    ``unknown_k`` is the first ``k`` whose chain neither vanished nor was
    certified within ``c_max`` steps.
    """

    module: UnstableModule
    degree: int
    vector: int
    s_max: int
    c_max: int
    at_least: int
    witnesses: Mapping[int, int]
    obstruction: Obstruction | None = None
    unknown_k: int | None = None

    @property
    def verdict(self) -> str:
        if self.obstruction is not None:
            return "exact"
        if self.unknown_k is not None:
            return "unknown"
        return "at_least"

    @property
    def exact(self) -> int | None:
        """The nilpotence degree when it was pinned down."""
        return self.at_least if self.obstruction is not None else None

    def verify(self) -> bool:
        """Replay every witness and obstruction chain."""
        m = self.module
        for k, c in self.witnesses.items():
            d, v = self.degree, self.vector
            for _ in range(c):
                d, v = _step(m, k, d, v)
            if v:
                return False
        ob = self.obstruction
        if ob is None:
            return True
        d, v = self.degree, self.vector
        if ob.chain[0] != (d, v):
            return False
        for nd, nv in ob.chain[1:]:
            d, v = _step(m, ob.k, d, v)
            if (d, v) != (nd, nv):
                return False
        if not v:
            return False
        if ob.tag == "identity":
            return d == ob.k
        return m.chain_injective(ob.k, d, [v])

    def summary(self) -> dict:
        out = {
            "degree": self.degree,
            "verdict": self.verdict,
            "at_least": self.at_least,
            "witnesses": {str(k): c for k, c in sorted(self.witnesses.items())},
        }
        if self.obstruction is not None:
            out["not_nilpotent"] = {"s": self.at_least + 1, "k": self.obstruction.k, "tag": self.obstruction.tag,
                                    "chain_length": len(self.obstruction.chain)}
        if self.unknown_k is not None:
            out["unknown"] = {"k": self.unknown_k, "c_max": self.c_max}
        return out


def _chain(m: UnstableModule, k: int, degree: int, v: int, c_max: int):
    """Follow the ``Sq_k`` chain of a nonzero vector.

    Returns ``("zero", c)``, ``("survives", chain, tag)`` or ``("unknown", None)``.
    """
    if k > degree:
        return ("zero", 1)
    chain = [(degree, v)]
    d = degree
    for c in range(c_max + 1):
        if d == k:
            return ("survives", tuple(chain), "identity")
        if m.chain_injective(k, d, [v]):
            return ("survives", tuple(chain), "closed-form")
        if c == c_max:
            break
        try:
            d, v = _step(m, k, d, v)
        except TruncationError:
            break
        if not v:
            return ("zero", c + 1)
        chain.append((d, v))
    return ("unknown", None)


def nilpotence_degree(
    m: UnstableModule, x: ModuleElement, s_max: int, c_max: int = DEFAULT_C_MAX
) -> NilpotenceCertificate:
    """Certify how nilpotent a homogeneous element is, testing ``k < s_max``.

    Raises:
        NonHomogeneousError: ``x`` has several degrees.
    """
    d = x.degree
    if d is None:
        return NilpotenceCertificate(m, 0, 0, s_max, c_max, s_max, {k: 0 for k in range(s_max)})
    v = x.vector
    witnesses: dict[int, int] = {}
    for k in range(s_max + 1):
        if k == s_max:
            return NilpotenceCertificate(m, d, v, s_max, c_max, s_max, witnesses)
        res = _chain(m, k, d, v, c_max)
        if res[0] == "zero":
            witnesses[k] = res[1]
        elif res[0] == "survives":
            return NilpotenceCertificate(m, d, v, s_max, c_max, k, witnesses, Obstruction(k, res[1], res[2]))
        else:
            return NilpotenceCertificate(m, d, v, s_max, c_max, k, witnesses, unknown_k=k)
    raise AssertionError("unreachable")


def vanishing_subspace(m: UnstableModule, k: int, degree: int, c_max: int = DEFAULT_C_MAX) -> Subspace:
    """``{x : (Sq_k)^c x = 0 for some c}`` in one degree.

    The kernels of the iterates grow with ``c``; the search stops once the
    surviving image is certified injective along the rest of the chain.

    Raises:
        UndeterminedError: neither happened within ``c_max`` steps.
    """
    n = m.dim(degree)
    full = Subspace.span(1 << j for j in range(n))
    if k > degree or n == 0:
        return full
    if k == degree:
        return Subspace()
    cols = [1 << j for j in range(n)]
    d = degree
    for c in range(c_max + 1):
        nrows = m.dim(d)
        ker = kernel(GF2Matrix.from_columns(cols, nrows))
        image = Subspace.span(cols)
        if image.dim == 0:
            return full
        if d == k or m.chain_injective(k, d, image.basis):
            return Subspace.span(ker)
        if c == c_max:
            break
        try:
            cols = [m.act_vector(d - k, d, w, m.closed_form) if w else 0 for w in cols]
        except TruncationError:
            raise UndeterminedError(
                f"Sq_{k} chain from degree {degree} of {m.name} left the known range", degree, k, c_max
            ) from None
        d = 2 * d - k
    raise UndeterminedError(
        f"Sq_{k} chain from degree {degree} of {m.name} undecided after {c_max} steps", degree, k, c_max
    )


@dataclass(frozen=True)
class Layer:
    """A per-degree basis of ``M_s`` in degrees ``0..degree_bound``."""

    s: int
    degree_bound: int
    spaces: Mapping[int, Subspace]

    def basis(self, degree: int) -> list[int]:
        return self.spaces[degree].basis

    def dim(self, degree: int) -> int:
        return self.spaces[degree].dim

    def dims(self) -> list[int]:
        return [self.spaces[d].dim for d in range(self.degree_bound + 1)]


def filtration_layer(
    m: UnstableModule, s: int, degree_bound: int, c_max: int = DEFAULT_C_MAX
) -> Layer:
    """The largest ``s``-nilpotent submodule of ``m`` within ``degree_bound``.

    Elements are certified degree by degree, then the largest subspace closed
    under every ``Sq^i`` (inside the bound) is extracted. Closure constraints
    only point upward, so one descending pass reaches the fixed point.

    Raises:
        UndeterminedError: some chain was undecided within ``c_max``.
    """
    if s < 0:
        raise ValueError("s must be non-negative")
    cand: dict[int, Subspace] = {}
    for d in range(degree_bound + 1):
        n = m.dim(d)
        space = Subspace.span(1 << j for j in range(n))
        for k in range(min(s, d + 1)):
            if space.dim == 0:
                break
            space = space.intersection(vanishing_subspace(m, k, d, c_max))
        cand[d] = space
    closed: dict[int, Subspace] = {}
    for d in range(degree_bound, -1, -1):
        space = cand[d]
        for i in range(1, degree_bound - d + 1):
            if space.dim == 0:
                break
            basis = space.basis
            try:
                images = [m.act_vector(i, d, v, m.closed_form) for v in basis]
            except TruncationError as exc:
                raise UndeterminedError(str(exc), d) from None
            if all(w in closed[d + i] for w in images):
                continue
            # x = sum a_j basis_j stays iff its image lies in closed[d + i]
            coeffs = preimage(images, closed[d + i], m.dim(d + i))
            space = Subspace.span(_combine(basis, a) for a in coeffs.basis)
        closed[d] = space
    return Layer(s, degree_bound, closed)


def _combine(vectors: Sequence[int], coeffs: int) -> int:
    w = 0
    for j in support(coeffs):
        w ^= vectors[j]
    return w


def is_reduced(m: UnstableModule, degree_bound: int) -> bool:
    """Whether ``Sq_0`` is injective in every degree ``<= degree_bound``.

    Degrees whose top square leaves a truncated or bounded module are skipped.
    """
    return not reducedness_failures(m, degree_bound)


def reducedness_failures(m: UnstableModule, degree_bound: int) -> list[tuple[int, int]]:
    """``(degree, vector)`` pairs with ``Sq_0`` of the vector zero."""
    out = []
    for d in range(1, degree_bound + 1):
        n = m.dim(d)
        if not n:
            continue
        basis = [1 << j for j in range(n)]
        if m.chain_injective(0, d, basis):
            continue
        try:
            cols = [m.act_vector(d, d, v, m.closed_form) for v in basis]
        except TruncationError:
            continue
        for x in kernel(GF2Matrix.from_columns(cols, m.dim(2 * d))):
            out.append((d, x))
            break
    return out


def rs_layer(
    m: UnstableModule, s: int, degree_bound: int, c_max: int = DEFAULT_C_MAX, *, check: bool = True
) -> FiniteUnstableModule:
    """``R_s(M)``: the quotient ``M_s / M_{s+1}`` desuspended ``s`` times.

    The result covers degrees ``0..degree_bound - s``. It is marked truncated
    unless ``m`` is a genuine finite module that the bound covers completely.

    Raises:
        UndeterminedError: propagated from :func:`filtration_layer`.
        ConsistencyError: the layers are not nested or the result is not reduced.
    """
    hi = filtration_layer(m, s, degree_bound, c_max)
    lo = filtration_layer(m, s + 1, degree_bound, c_max)
    return _rs_from_layers(m, hi, lo, check=check)[0]


def rs_map(
    f: ModuleMap, s: int, degree_bound: int, c_max: int = DEFAULT_C_MAX
) -> tuple[FiniteUnstableModule, FiniteUnstableModule, ModuleMap]:
    """The map ``R_s(N) -> R_s(M)`` induced by ``f: N -> M``."""
    parts = []
    for mod in (f.source, f.target):
        hi = filtration_layer(mod, s, degree_bound, c_max)
        lo = filtration_layer(mod, s + 1, degree_bound, c_max)
        parts.append(_rs_from_layers(mod, hi, lo))
    (rn, sq_n), (rm, sq_m) = parts

    def on_basis(e: int, j: int) -> int:
        if sq_n is None:
            return 0
        w = f.apply(e + s, sq_n.representatives[e + s][j])
        return sq_m.project(e + s, w)

    return rn, rm, ModuleMap(rn, rm, on_basis)


def _rs_from_layers(
    m: UnstableModule, hi: Layer, lo: Layer, check: bool = True
) -> tuple[FiniteUnstableModule, Subquotient | None]:
    s, bound = hi.s, hi.degree_bound
    for d in range(bound + 1):
        if not hi.spaces[d].contains_all(lo.spaces[d]):
            raise ConsistencyError(f"M_{s + 1} is not inside M_{s} in degree {d}")
    exact = isinstance(m, FiniteUnstableModule) and not m.truncated and bound >= m.top_degree
    if bound < s:
        return FiniteUnstableModule([0], name=f"R{s}({m.name})", truncated=not exact), None
    r, sq = finite_subquotient(
        m,
        {d: hi.basis(d) for d in range(bound + 1)},
        {d: lo.basis(d) for d in range(bound + 1)},
        bound,
        shift=s,
        name=f"R{s}({m.name})",
        truncated=not exact,
        check=check,
    )
    if check:
        bad = reducedness_failures(r, r.top_degree)
        if bad:
            raise ConsistencyError(f"R_{s}({m.name}) is not reduced: Sq_0 kills a class in degree {bad[0][0]}")
    return r, sq


@dataclass
class FiltrationTable:
    """Layers ``M_s`` and quotients ``R_s`` for ``s <= s_max`` within a degree bound."""

    module: UnstableModule
    s_max: int
    degree_bound: int
    c_max: int
    layers: dict[int, Layer] = field(default_factory=dict)
    quotients: dict[int, FiniteUnstableModule] = field(default_factory=dict)

    def to_dict(self) -> dict:
        rows = []
        for s in range(self.s_max + 1):
            for d in range(self.degree_bound + 1):
                row = {"s": s, "degree": d, "M_s": self.layers[s].dim(d)}
                q = self.quotients.get(s)
                if q is not None:
                    row["R_s"] = q.dim(d) if d <= q.top_degree else 0
                rows.append(row)
        return {
            "module": self.module.name,
            "s_max": self.s_max,
            "degree_bound": self.degree_bound,
            "c_max": self.c_max,
            "rows": rows,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        w = max(3, len(str(self.degree_bound)))
        head = f"# filtration of {self.module.name}: s_max={self.s_max} degree_bound={self.degree_bound} c_max={self.c_max}"
        lines = [head, "dims of M_s (rows s, columns degree)"]
        lines.append("s\\d " + " ".join(f"{d:>{w}}" for d in range(self.degree_bound + 1)))
        for s in range(self.s_max + 1):
            lines.append(f"{s:<3} " + " ".join(f"{n:>{w}}" for n in self.layers[s].dims()))
        lines.append("dims of R_s (rows s, columns degree)")
        lines.append("s\\d " + " ".join(f"{d:>{w}}" for d in range(self.degree_bound + 1)))
        for s in range(self.s_max + 1):
            q = self.quotients.get(s)
            if q is None:
                continue
            dims = [q.dim(d) for d in range(self.degree_bound + 1)]
            lines.append(f"{s:<3} " + " ".join(f"{n:>{w}}" for n in dims))
        return "\n".join(lines) + "\n"


def filtration(m: UnstableModule, s_max: int, degree_bound: int, c_max: int = DEFAULT_C_MAX) -> FiltrationTable:
    """Compute ``M_0 ⊇ ... ⊇ M_{s_max + 1}`` and ``R_0 .. R_{s_max}``."""
    table = FiltrationTable(m, s_max, degree_bound, c_max)
    layers = {s: filtration_layer(m, s, degree_bound, c_max) for s in range(s_max + 2)}
    for s in range(s_max + 1):
        table.quotients[s] = _rs_from_layers(m, layers[s], layers[s + 1])[0]
    table.layers = {s: layers[s] for s in range(s_max + 1)}
    return table


@dataclass(frozen=True)
class StrongFIsoResult:
    verdict: str  # "yes", "no" or "unknown"
    witness: tuple[int, int] | None = None
    reason: str = ""
    # (degree, dim source, dim target) through the bound
    dims: tuple[tuple[int, int, int], ...] = ()

    @property
    def dims_equal(self) -> bool:
        return all(a == b for _, a, b in self.dims)


def strong_f_iso(
    i: ModuleMap, degree_bound: int, c_max: int = DEFAULT_C_MAX, *, check_reduced: bool = True
) -> StrongFIsoResult:
    """Decide, within the bound, whether every nonzero ``x`` in the target has
    a ``Sq_0`` iterate landing (nonzero) in the image of ``i``.

    The result also carries the per-degree dimensions of source and target,
    so a "yes" can be compared against an outright isomorphism.

    Raises:
        ValueError: ``i`` is not injective, or a module is not reduced.
    """
    res = _strong_f_iso(i, degree_bound, c_max, check_reduced)
    dims = tuple((d, i.source.dim(d), i.target.dim(d)) for d in range(degree_bound + 1))
    return replace(res, dims=dims)


def _strong_f_iso(i: ModuleMap, degree_bound: int, c_max: int, check_reduced: bool) -> StrongFIsoResult:
    n_mod, m_mod = i.source, i.target
    for d in range(degree_bound + 1):
        if i.matrix(d).rank() != n_mod.dim(d):
            raise ValueError(f"map is not injective in degree {d}")
    if check_reduced:
        for mod in (n_mod, m_mod):
            bad = reducedness_failures(mod, degree_bound)
            if bad:
                raise ValueError(f"{mod.name} is not reduced (degree {bad[0][0]})")
    unknown: tuple[int, int] | None = None
    for d in range(degree_bound + 1):
        n = m_mod.dim(d)
        if not n:
            continue
        cols = [1 << j for j in range(n)]
        e = d
        settled = False
        for c in range(c_max + 1):
            img = Subspace.span(i.apply(e, 1 << j) for j in range(n_mod.dim(e)))
            # the span of basis vectors already landing in the image
            good = preimage(cols, img, m_mod.dim(e))
            if good.dim == n:
                settled = True
                break
            missing = next(1 << j for j in range(n) if (1 << j) not in good)
            if d == 0:
                return StrongFIsoResult("no", (d, missing), "Sq_0 is the identity in degree 0")
            if n_mod.zero_along_doubling(e):
                return StrongFIsoResult("no", (d, missing), "source vanishes in every degree of the chain")
            if c == c_max:
                break
            try:
                cols = [m_mod.act_vector(e, e, w, m_mod.closed_form) for w in cols]
            except TruncationError:
                break
            e *= 2
            if Subspace.span(cols).dim < n:
                zero = kernel(GF2Matrix.from_columns(cols, m_mod.dim(e)))[0]
                return StrongFIsoResult("no", (d, zero), "Sq_0 iterate vanishes")
        if not settled and unknown is None:
            unknown = (d, next(1 << j for j in range(n)))
    if unknown is not None:
        return StrongFIsoResult("unknown", unknown, f"no verdict within c_max={c_max}")
    return StrongFIsoResult("yes")


@dataclass(frozen=True)
class KernelReport:
    h: int
    spaces: Mapping[int, Subspace]
    violations: tuple[tuple[int, int, int], ...]  # (degree, i, basis vector)

    @property
    def closed(self) -> bool:
        return not self.violations

    def basis(self, degree: int) -> list[int]:
        return self.spaces[degree].basis


def sq_lower_kernel(m: FiniteUnstableModule, h: int) -> KernelReport:
    """``{x : Sq_k x = 0 for 0 <= k <= h}`` per degree, with a closure check."""
    if h < 0:
        raise ValueError("h must be non-negative")
    spaces: dict[int, Subspace] = {}
    top = m.top_degree
    for d in range(top + 1):
        n = m.dim(d)
        space = Subspace.span(1 << j for j in range(n))
        for k in range(min(h, d) + 1):
            cols = [m.act_basis(d - k, d, j) for j in range(n)]
            space = space.intersection(Subspace.span(kernel(GF2Matrix.from_columns(cols, m.dim(2 * d - k))))) if n else space
        spaces[d] = space
    violations = []
    for d in range(top + 1):
        for v in spaces[d].basis:
            for i in range(1, top - d + 1):
                w = m.act_vector(i, d, v)
                if w not in spaces[d + i]:
                    violations.append((d, i, v))
    return KernelReport(h, spaces, tuple(violations))


@dataclass(frozen=True)
class SaturationResult:
    k: int
    spaces: Mapping[int, Subspace]
    chain: tuple[Mapping[int, Subspace], ...]
    strong_f_iso: StrongFIsoResult


def sq0_saturate(
    h_module: UnstableModule,
    j_submodule: Submodule | Callable[[int], Sequence[int]],
    budget: int,
    degree_bound: int,
    c_max: int = DEFAULT_C_MAX,
) -> SaturationResult:
    """Build ``H' = Sq_0^k(H) + J`` where ``J_h = {x : Sq_0^h x ∈ J}`` stabilizes at ``h = k``.

    Both defining properties are re-checked within the bound: ``H' ⊂ H`` is a
    strong F-isomorphism, and ``x ∈ H'`` with ``Sq_0 x ∈ J`` forces ``x ∈ J``.

    Raises:
        UndeterminedError: the chain ``J_h`` did not stabilize within ``budget``.
        ConsistencyError: a re-checked property failed.
    """
    H = h_module
    if isinstance(j_submodule, Submodule):
        jsub = j_submodule

        def j_at(d: int) -> Subspace:
            return Subspace.span(jsub.to_ambient(d, 1 << t) for t in range(jsub.dim(d)))
    else:
        fn = j_submodule

        def j_at(d: int) -> Subspace:
            return Subspace.span(fn(d))

    def sq0_power(d: int, v: int, h: int) -> tuple[int, int]:
        for _ in range(h):
            v = H.act_vector(d, d, v, H.closed_form)
            d *= 2
        return d, v

    def j_h(h: int) -> dict[int, Subspace]:
        out = {}
        for d in range(degree_bound + 1):
            n = H.dim(d)
            cols = []
            e = d
            for t in range(n):
                e, w = sq0_power(d, 1 << t, h)
                cols.append(w)
            out[d] = preimage(cols, j_at(e), H.dim(e)) if n else Subspace()
        return out

    try:
        chain = [j_h(0)]
        k = None
        for h in range(budget):
            nxt = j_h(h + 1)
            chain.append(nxt)
            if all(nxt[d] == chain[h][d] for d in range(degree_bound + 1)):
                k = h
                break
    except TruncationError as exc:
        raise UndeterminedError(f"Sq_0 iterates left the known range: {exc}") from None
    if k is None:
        raise UndeterminedError(f"J_h did not stabilize within budget {budget}", budget=budget)

    cache: dict[int, Subspace] = {}

    def h_prime(d: int) -> Subspace:
        # explicit in every degree, so Sq_0 chains may be followed past the bound
        if d not in cache:
            s = Subspace.span(j_at(d).basis)
            if k == 0 or d == 0:
                s = Subspace.span(1 << t for t in range(H.dim(d)))
            elif d % (1 << k) == 0:
                e = d >> k
                for t in range(H.dim(e)):
                    s.add(sq0_power(e, 1 << t, k)[1])
            cache[d] = s
        return cache[d]

    spaces = {d: h_prime(d) for d in range(degree_bound + 1)}
    sub = Submodule(H, lambda d: h_prime(d).basis, name=f"{H.name}'")
    try:
        verdict = strong_f_iso(sub.inclusion(), degree_bound, c_max, check_reduced=False)
    except TruncationError as exc:
        verdict = StrongFIsoResult("unknown", None, str(exc))
    if verdict.verdict == "no":
        raise ConsistencyError(f"H' is not strongly F-isomorphic to H: witness {verdict.witness}")
    for d in range(1, degree_bound // 2 + 1):
        jd, j2d = j_at(d), j_at(2 * d)
        basis = spaces[d].basis
        cols = [H.act_vector(d, d, v, H.closed_form) for v in basis]
        for a in preimage(cols, j2d, H.dim(2 * d)).basis:
            x = _combine(basis, a)
            if x not in jd:
                raise ConsistencyError(f"x in H' with Sq_0 x in J but x not in J (degree {d})")
    return SaturationResult(k, spaces, tuple(chain), verdict)
