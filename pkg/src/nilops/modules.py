"""Unstable modules and algebras of finite type.

Two kinds of module share one interface (:class:`UnstableModule`):

* :class:`FiniteUnstableModule` stores a matrix for every ``Sq^i`` and is
  validated against instability and the Adem relations when built.
* Structured shapes (:class:`Free`, :class:`RPInfinity`, :class:`Suspension`,
  :class:`Tensor`, :class:`DirectSum`, :class:`Submodule`) compute bases and
  actions on demand, at any degree where the shape allows it.

Vectors in degree ``d`` are bit vectors over the module's basis in that degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .gf2 import GF2Matrix, GradedLinearMap, GradedVectorSpace, Subquotient, Subspace, solve, subquotient, support
from .steenrod import AdmissibleSum, Monomial, adem_normalize, excess, full_basis, multiply


class TruncationError(ArithmeticError):
    """An action or chain left the degree range in which a module is known."""


class NonHomogeneousError(ValueError):
    pass


class SubmoduleClosureError(ArithmeticError):
    """A Steenrod operation carried a submodule element outside the submodule."""


@dataclass(frozen=True)
class Violation:
    kind: str
    degree: int
    op: str
    index: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        where = f"degree {self.degree}" + (f", basis element {self.index}" if self.index is not None else "")
        return f"{self.kind} violation at {where} for {self.op}" + (f": {self.detail}" if self.detail else "")


class ModuleValidationError(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(str(violation))
        self.violation = violation


class ShapeError(ModuleValidationError):
    pass


class InstabilityError(ModuleValidationError):
    pass


class AdemError(ModuleValidationError):
    pass


class AlgebraError(ModuleValidationError):
    pass


_ERRORS = {"shape": ShapeError, "instability": InstabilityError, "adem": AdemError}


def _is_power_of_two(d: int) -> bool:
    return d > 0 and d & (d - 1) == 0


def _submasks(d: int) -> list[int]:
    out = []
    s = d
    while True:
        out.append(s)
        if s == 0:
            break
        s = (s - 1) & d
    return sorted(out)


class UnstableModule:
    """Common interface of every module shape.

    Subclasses provide ``dim``, ``label`` and ``act_basis``. The remaining hooks
    describe closed-form behaviour that the nilpotence engine may rely on.
    """

    name: str = "M"
    #: actions may be evaluated past any stored bound (every leaf has closed forms)
    closed_form: bool = False
    #: nonzero in finitely many degrees
    finite_support: bool = False
    #: ``x -> Sq^{|x|} x`` is known to be injective in every degree
    sq0_injective: bool = False

    def dim(self, degree: int) -> int:
        raise NotImplementedError

    def label(self, degree: int, index: int) -> str:
        return f"{self.name}[{degree}:{index}]"

    def act_basis(self, i: int, degree: int, index: int, unbounded: bool = False) -> int:
        raise NotImplementedError

    def act_vector(self, i: int, degree: int, v: int, unbounded: bool = False) -> int:
        if i == 0:
            return v
        out = 0
        for j in support(v):
            out ^= self.act_basis(i, degree, j, unbounded)
        return out

    def active_ops(self, degree: int) -> Sequence[int]:
        """Indices ``i`` for which ``Sq^i`` may be nonzero on this degree."""
        return range(degree + 1)

    def nonzero_degrees(self, upto: int) -> Iterable[int]:
        return (d for d in range(upto + 1) if self.dim(d))

    def chain_injective(self, k: int, degree: int, vectors: Sequence[int]) -> bool:
        """Whether every iterate of ``Sq_k`` is injective on the span of ``vectors``.

        ``True`` is a proof; ``False`` only means no closed-form rule applies.
        """
        return k == 0 and self.sq0_injective

    def zero_along_doubling(self, degree: int) -> bool | None:
        """Whether the module vanishes in every degree ``degree * 2^c``; ``None`` if unknown."""
        return None

    # -- conveniences --

    def element(self, degree: int, vector: int) -> ModuleElement:
        return ModuleElement.homogeneous(self, degree, vector)

    def basis_element(self, degree: int, index: int) -> ModuleElement:
        if not 0 <= index < self.dim(degree):
            raise IndexError(f"{self.name} has no basis element {index} in degree {degree}")
        return ModuleElement.homogeneous(self, degree, 1 << index)

    def labels(self, degree: int) -> list[str]:
        return [self.label(degree, j) for j in range(self.dim(degree))]

    def format_vector(self, degree: int, v: int) -> str:
        if not v:
            return "0"
        return " + ".join(self.label(degree, j) for j in support(v))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ModuleElement:
    """An element of a module, stored as one bit vector per degree."""

    module: UnstableModule
    components: tuple[tuple[int, int], ...] = ()

    @classmethod
    def homogeneous(cls, module: UnstableModule, degree: int, vector: int) -> ModuleElement:
        if vector < 0 or vector >= 1 << module.dim(degree):
            raise ValueError(f"vector {vector:#b} does not fit degree {degree} of {module.name}")
        return cls(module, ((degree, vector),) if vector else ())

    @classmethod
    def from_components(cls, module: UnstableModule, comps: Mapping[int, int]) -> ModuleElement:
        return cls(module, tuple(sorted((d, v) for d, v in comps.items() if v)))

    def is_zero(self) -> bool:
        return not self.components

    def is_homogeneous(self) -> bool:
        return len(self.components) <= 1

    @property
    def degree(self) -> int | None:
        """Degree of a nonzero homogeneous element; ``None`` for zero."""
        if len(self.components) > 1:
            raise NonHomogeneousError(f"element has components in degrees {[d for d, _ in self.components]}")
        return self.components[0][0] if self.components else None

    @property
    def vector(self) -> int:
        return self.components[0][1] if self.components else 0

    def __add__(self, other: ModuleElement) -> ModuleElement:
        acc = dict(self.components)
        for d, v in other.components:
            acc[d] = acc.get(d, 0) ^ v
        return ModuleElement.from_components(self.module, acc)

    def split(self) -> list[ModuleElement]:
        return [ModuleElement(self.module, (c,)) for c in self.components]

    def __str__(self) -> str:
        if not self.components:
            return "0"
        return " + ".join(self.module.format_vector(d, v) for d, v in self.components)


class FiniteUnstableModule(UnstableModule):
    """A module with explicit action matrices in degrees ``0..top_degree``.

    ``ops[i][d]`` is the matrix of ``Sq^i`` from degree ``d`` to ``d + i``
    (target basis by source basis); missing blocks are zero. A ``truncated``
    module is a window onto a larger module: asking for anything above the top
    raises :class:`TruncationError` instead of answering zero.
    """

    closed_form = True
    finite_support = True

    def __init__(
        self,
        dims: Sequence[int],
        ops: Mapping[int, Mapping[int, GF2Matrix]] | None = None,
        *,
        labels: Mapping[tuple[int, int], str] | None = None,
        name: str = "M",
        truncated: bool = False,
        check: bool = True,
    ):
        self.space = GradedVectorSpace(tuple(dims), dict(labels or {}))
        self.name = name
        self.truncated = truncated
        self.closed_form = not truncated
        top = self.space.top_degree
        ops = ops or {}
        for i in ops:
            if not isinstance(i, int) or i < 1:
                raise ShapeError(Violation("shape", 0, f"Sq{i}", detail="operation index must be >= 1"))
        actions: dict[int, GradedLinearMap] = {}
        for i in range(1, top + 1):
            given = ops.get(i, {})
            blocks = {}
            for d in range(top + 1 - i):
                if self.space.dims[d] == 0:
                    if d in given and given[d].ncols != 0:
                        raise ShapeError(Violation("shape", d, f"Sq{i}", detail="source degree is empty"))
                    continue
                want = (self.space.dims[d + i], self.space.dims[d])
                m = given.get(d)
                if m is None:
                    m = GF2Matrix.zeros(*want)
                if m.shape != want:
                    raise ShapeError(Violation("shape", d, f"Sq{i}", detail=f"matrix shape {m.shape}, expected {want}"))
                blocks[d] = m
            for d in given:
                if d < 0 or d + i > top:
                    if given[d].nrows or given[d].ncols:
                        raise ShapeError(Violation("shape", d, f"Sq{i}", detail="block outside degrees 0..top"))
            actions[i] = GradedLinearMap(self.space, self.space, i, blocks)
        for i in ops:
            if i > top and any(m.nrows and m.ncols for m in ops[i].values()):
                raise ShapeError(Violation("shape", 0, f"Sq{i}", detail="operation exceeds the top degree"))
        self.actions = actions
        self._cols = {(i, d): m.columns() for i, a in actions.items() for d, m in a.blocks.items()}
        if check:
            for v in verify_instability(self):
                raise _ERRORS[v.kind](v)

    @property
    def top_degree(self) -> int:
        return self.space.top_degree

    @property
    def dims(self) -> tuple[int, ...]:
        return self.space.dims

    def dim(self, degree: int) -> int:
        return self.space.dim(degree)

    def label(self, degree: int, index: int) -> str:
        return self.space.label(degree, index)

    def nonzero_degrees(self, upto: int) -> Iterable[int]:
        return (d for d in range(min(upto, self.top_degree) + 1) if self.space.dims[d])

    def active_ops(self, degree: int) -> Sequence[int]:
        return range(max(0, min(degree, self.top_degree - degree) + 1))

    def act_basis(self, i: int, degree: int, index: int, unbounded: bool = False) -> int:
        if i == 0:
            return 1 << index
        if degree + i > self.top_degree:
            if self.truncated:
                raise TruncationError(f"Sq{i} on degree {degree} leaves truncated module {self.name} (top {self.top_degree})")
            return 0
        return self._cols[(i, degree)][index]

    def chain_injective(self, k: int, degree: int, vectors: Sequence[int]) -> bool:
        # Sq_k is the identity on degree k
        return degree == k and not self.truncated

    def zero_along_doubling(self, degree: int) -> bool | None:
        if self.truncated:
            return None
        d = degree
        while d <= self.top_degree:
            if self.space.dim(d):
                return False
            if d == 0:
                return True
            d *= 2
        return True

    def matrix(self, i: int, degree: int) -> GF2Matrix:
        if i == 0:
            return GF2Matrix.identity(self.dim(degree))
        a = self.actions.get(i)
        if a is None or degree not in a.blocks:
            return GF2Matrix.zeros(self.dim(degree + i), self.dim(degree))
        return a.blocks[degree]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteUnstableModule):
            return NotImplemented
        return (
            self.space.dims == other.space.dims
            and dict(self.space.labels) == dict(other.space.labels)
            and self.name == other.name
            and self.truncated == other.truncated
            and {i: dict(a.blocks) for i, a in self.actions.items()}
            == {i: dict(a.blocks) for i, a in other.actions.items()}
        )

    __hash__ = UnstableModule.__hash__

    def __repr__(self) -> str:
        return f"FiniteUnstableModule(name={self.name!r}, dims={list(self.dims)})"


def verify_instability(m: FiniteUnstableModule) -> list[Violation]:
    """Every instability and Adem-consistency violation of a finite module's tables."""
    out: list[Violation] = []
    top = m.top_degree
    for i, a in m.actions.items():
        for d, block in a.blocks.items():
            if i > d and not block.is_zero():
                j = next(j for j, c in enumerate(block.columns()) if c)
                out.append(Violation("instability", d, f"Sq{i}", j, f"Sq{i} is nonzero on a class of degree {d}"))
    for b in range(1, top + 1):
        for a in range(1, 2 * b):
            if a + b > top:
                break
            rel = adem_normalize([(a, b)])
            for d in range(top - a - b + 1):
                for j in range(m.dim(d)):
                    lhs = m.act_vector(a, d + b, m.act_basis(b, d, j))
                    rhs = 0
                    for t in rel.terms:
                        rhs ^= _act_monomial(m, t, d, 1 << j, False)
                    if lhs != rhs:
                        out.append(
                            Violation("adem", d, f"Sq{a} Sq{b}", j, f"composite differs from {rel}")
                        )
    return out


def _act_monomial(m: UnstableModule, mono: Monomial, degree: int, v: int, unbounded: bool) -> int:
    for i in reversed(mono):
        if not v:
            return 0
        v = m.act_vector(i, degree, v, unbounded)
        degree += i
    return v


def make_finite(
    dims: Sequence[int],
    ops: Mapping[int, Mapping[int, GF2Matrix | Sequence[Sequence[int]]]] | None = None,
    *,
    labels: Mapping[tuple[int, int], str] | None = None,
    name: str = "M",
) -> FiniteUnstableModule:
    """Build and validate a finite module from per-degree action matrices.

    Matrices may be given as :class:`GF2Matrix` or as row-major nested lists.

    Raises:
        ShapeError, InstabilityError, AdemError: naming the offending degree,
            operation and basis element.
    """
    conv: dict[int, dict[int, GF2Matrix]] = {}
    for i, blocks in (ops or {}).items():
        conv[i] = {}
        for d, mtx in blocks.items():
            if isinstance(mtx, GF2Matrix):
                conv[i][d] = mtx
                continue
            ncols = dims[d] if 0 <= d < len(dims) else 0
            try:
                conv[i][d] = GF2Matrix.from_lists(mtx, ncols=ncols if not mtx else None)
            except ValueError as exc:
                raise ShapeError(Violation("shape", d, f"Sq{i}", detail=str(exc))) from None
    return FiniteUnstableModule(dims, conv, labels=labels, name=name)


def trivial_module(degree: int = 0, name: str | None = None) -> FiniteUnstableModule:
    """``Sigma^degree F_2``: one class, all operations zero."""
    dims = [0] * degree + [1]
    return FiniteUnstableModule(dims, name=name or (f"Σ^{degree}F2" if degree else "F2"))


def to_finite(m: UnstableModule, top: int, *, name: str | None = None, truncated: bool = False) -> FiniteUnstableModule:
    """Tabulate ``m`` in degrees ``0..top``.

    With ``truncated=False`` the result is the quotient of ``m`` by everything
    above ``top`` (a genuine finite module); otherwise it is a truncated window.
    """
    dims = [m.dim(d) for d in range(top + 1)]
    ops: dict[int, dict[int, GF2Matrix]] = {}
    for i in range(1, top + 1):
        ops[i] = {}
        for d in range(top + 1 - i):
            if dims[d] == 0:
                continue
            cols = [m.act_basis(i, d, j, m.closed_form) for j in range(dims[d])]
            ops[i][d] = GF2Matrix.from_columns(cols, dims[d + i])
    labels = {(d, j): m.label(d, j) for d in range(top + 1) for j in range(dims[d])}
    return FiniteUnstableModule(dims, ops, labels=labels, name=name or m.name, truncated=truncated)


class Free(UnstableModule):
    """The free unstable module ``F(n)`` on one class of degree ``n``.

    The degree ``n + k`` basis is the admissible monomials of degree ``k`` and
    excess at most ``n``. ``F(1)`` is handled in closed form (it is spanned by
    the powers ``u^{2^j}`` inside ``F_2[u]``) and may be evaluated at any degree
    internally; for other ``n``, acting past ``degree_bound`` is an error.
    """

    sq0_injective = True

    def __init__(self, n: int, degree_bound: int):
        if n < 0 or degree_bound < 0:
            raise ValueError("n and degree_bound must be non-negative")
        self.n = n
        self.degree_bound = degree_bound
        self.name = f"F({n})"
        self.closed_form = n == 1
        self._basis: dict[int, tuple[Monomial, ...]] = {}

    def basis(self, degree: int) -> tuple[Monomial, ...]:
        k = degree - self.n
        if k < 0:
            return ()
        if self.n == 1:
            if not _is_power_of_two(degree):
                return ()
            return (tuple(1 << j for j in reversed(range(degree.bit_length() - 1))),)
        if degree not in self._basis:
            self._basis[degree] = tuple(m for m in full_basis(k) if excess(m) <= self.n)
        return self._basis[degree]

    def dim(self, degree: int) -> int:
        return len(self.basis(degree))

    def label(self, degree: int, index: int) -> str:
        if self.n == 1:
            return f"u^{degree}"
        mono = self.basis(degree)[index]
        return (" ".join(f"Sq{i}" for i in mono) + " " if mono else "") + f"ι{self.n}"

    def nonzero_degrees(self, upto: int) -> Iterable[int]:
        if self.n == 1:
            d = 1
            while d <= upto:
                yield d
                d *= 2
        else:
            yield from (d for d in range(self.n, upto + 1) if self.dim(d))

    def active_ops(self, degree: int) -> Sequence[int]:
        if self.n == 1:
            return (0, degree) if degree else (0,)
        return range(degree + 1)

    def act_basis(self, i: int, degree: int, index: int, unbounded: bool = False) -> int:
        if i == 0:
            return 1 << index
        if degree + i > self.degree_bound and not (unbounded and self.closed_form):
            raise TruncationError(f"Sq{i} on degree {degree} exceeds the bound {self.degree_bound} of {self.name}")
        if self.n == 1:
            return 1 if i == degree else 0
        theta = self.basis(degree)[index]
        prod = multiply(AdmissibleSum([(i,)]), AdmissibleSum([theta]))
        target = {m: j for j, m in enumerate(self.basis(degree + i))}
        out = 0
        for t in prod.terms:
            if excess(t) <= self.n:
                out |= 1 << target[t]
        return out

    def chain_injective(self, k: int, degree: int, vectors: Sequence[int]) -> bool:
        if k == 0:
            return True
        return self.n == 1 and degree == k

    def zero_along_doubling(self, degree: int) -> bool | None:
        if self.n == 1:
            return not _is_power_of_two(degree)
        return None


class RPInfinity(UnstableModule):
    """Reduced cohomology of ``RP^infinity``: ``u^k``, ``k >= 1``, with ``Sq^i u^k = binom(k, i) u^{k+i}``."""

    closed_form = True
    sq0_injective = True

    def __init__(self):
        self.name = "H̃*RP∞"

    def dim(self, degree: int) -> int:
        return 1 if degree >= 1 else 0

    def label(self, degree: int, index: int) -> str:
        return f"u^{degree}"

    def active_ops(self, degree: int) -> Sequence[int]:
        return _submasks(degree)

    def act_basis(self, i: int, degree: int, index: int, unbounded: bool = False) -> int:
        if i == 0:
            return 1 << index
        return 1 if (i & ~degree) == 0 and i <= degree else 0

    def chain_injective(self, k: int, degree: int, vectors: Sequence[int]) -> bool:
        if degree < k:
            return False
        r = degree - k
        if r == 0:
            return True
        # the c-th step multiplies by binom(k + 2^c r, k), odd iff k & (2^c r) == 0
        c = 0
        while (1 << c) <= k:
            if k & (r << c):
                return False
            c += 1
        return True

    def zero_along_doubling(self, degree: int) -> bool | None:
        return degree == 0


class Suspension(UnstableModule):
    def __init__(self, inner: UnstableModule, s: int):
        if s < 1:
            raise ValueError("suspension degree must be >= 1")
        self.inner, self.s = inner, s
        self.name = f"Σ^{s}{inner.name}" if s > 1 else f"Σ{inner.name}"
        self.closed_form = inner.closed_form
        self.finite_support = inner.finite_support
        self.sq0_injective = False

    def dim(self, degree: int) -> int:
        return self.inner.dim(degree - self.s) if degree >= self.s else 0

    def label(self, degree: int, index: int) -> str:
        return f"σ^{self.s}{self.inner.label(degree - self.s, index)}"

    def nonzero_degrees(self, upto: int) -> Iterable[int]:
        return (d + self.s for d in self.inner.nonzero_degrees(upto - self.s))

    def active_ops(self, degree: int) -> Sequence[int]:
        return self.inner.active_ops(degree - self.s)

    def act_basis(self, i: int, degree: int, index: int, unbounded: bool = False) -> int:
        return self.inner.act_basis(i, degree - self.s, index, unbounded)

    def chain_injective(self, k: int, degree: int, vectors: Sequence[int]) -> bool:
        if k < self.s:
            return False
        return self.inner.chain_injective(k - self.s, degree - self.s, vectors)


class Tensor(UnstableModule):
    """``left ⊗ right`` with the Cartan diagonal action.

    Basis in degree ``d``: pairs ``(a, b)`` with ``|a| + |b| = d``, grouped by
    ``|a|`` ascending, ``a`` major and ``b`` minor.
    """

    def __init__(self, left: UnstableModule, right: UnstableModule):
        self.left, self.right = left, right
        self.name = f"({left.name} ⊗ {right.name})"
        self.closed_form = left.closed_form and right.closed_form
        self.finite_support = left.finite_support and right.finite_support
        self.sq0_injective = left.sq0_injective and right.sq0_injective
        self._layout: dict[int, tuple[dict[int, int], list[tuple[int, int, int]]]] = {}

    def _blocks(self, degree: int) -> tuple[dict[int, int], list[tuple[int, int, int]]]:
        hit = self._layout.get(degree)
        if hit is not None:
            return hit
        if self.left.finite_support or not self.right.finite_support:
            ps = [p for p in self.left.nonzero_degrees(degree) if self.right.dim(degree - p)]
        else:
            ps = [degree - q for q in self.right.nonzero_degrees(degree) if self.left.dim(degree - q)]
        offsets: dict[int, int] = {}
        entries: list[tuple[int, int, int]] = []
        for p in sorted(ps):
            offsets[p] = len(entries)
            da, db = self.left.dim(p), self.right.dim(degree - p)
            entries.extend((p, a, b) for a in range(da) for b in range(db))
        self._layout[degree] = (offsets, entries)
        return offsets, entries

    def dim(self, degree: int) -> int:
        return len(self._blocks(degree)[1]) if degree >= 0 else 0

    def entry(self, degree: int, index: int) -> tuple[int, int, int]:
        """``(left degree, left index, right index)`` of a basis element."""
        return self._blocks(degree)[1][index]

    def pure(self, p: int, va: int, q: int, vb: int) -> int:
        """The vector of ``x ⊗ y`` for ``x`` (degree ``p``) and ``y`` (degree ``q``)."""
        offsets, _ = self._blocks(p + q)
        if not va or not vb:
            return 0
        base = offsets[p]
        db = self.right.dim(q)
        out = 0
        for a in support(va):
            row = base + a * db
            out ^= vb << row
        return out

    def label(self, degree: int, index: int) -> str:
        p, a, b = self.entry(degree, index)
        return f"{self.left.label(p, a)}⊗{self.right.label(degree - p, b)}"

    def nonzero_degrees(self, upto: int) -> Iterable[int]:
        if self.finite_support:
            degs = {p + q for p in self.left.nonzero_degrees(upto) for q in self.right.nonzero_degrees(upto - p)}
            return sorted(d for d in degs if d <= upto)
        return (d for d in range(upto + 1) if self.dim(d))

    def act_basis(self, i: int, degree: int, index: int, unbounded: bool = False) -> int:
        p, a, b = self.entry(degree, index)
        if i == 0:
            return 1 << index
        q = degree - p
        la, ra = self.left.active_ops(p), self.right.active_ops(q)
        if len(la) <= len(ra):
            splits = [(j, i - j) for j in la if 0 <= i - j <= q]
        else:
            splits = [(i - j, j) for j in ra if 0 <= i - j <= p]
        out = 0
        for j, r in splits:
            va = self.left.act_basis(j, p, a, unbounded)
            if not va:
                continue
            vb = self.right.act_basis(r, q, b, unbounded)
            if vb:
                out ^= self.pure(p + j, va, q + r, vb)
        return out

    def chain_injective(self, k: int, degree: int, vectors: Sequence[int]) -> bool:
        if degree == k or (k == 0 and self.sq0_injective):
            return True
        # X ⊗ F(1): once 2^j > k, Sq_k(x ⊗ u^{2^j}) = Sq_k(x) ⊗ u^{2^{j+1}}, so the
        # chain splits over the blocks and each block follows the chain of X
        if _is_free1(self.right):
            other, other_left = self.left, True
        elif _is_free1(self.left):
            other, other_left = self.right, False
        else:
            return False
        offsets, entries = self._blocks(degree)
        blocks = [(p if other_left else degree - p, a if other_left else b) for p, a, b in entries]
        parts: dict[int, list[int]] = {}
        for v in vectors:
            proj: dict[int, int] = {}
            for idx in support(v):
                e, bit = blocks[idx]
                proj[e] = proj.get(e, 0) | (1 << bit)
            for e, w in proj.items():
                parts.setdefault(e, []).append(w)
        if not parts:
            return False
        if all(degree - e > k for e in parts):
            return all(other.chain_injective(k, e, ws) for e, ws in parts.items())
        # Peel the span: a combination touching the echelon group of the block of
        # largest free degree q keeps Sq_k(x) ⊗ u^{2q} as its only term in free
        # degree 2q; one touching the group of smallest free degree q <= k keeps
        # Sq_{k-q}(x) ⊗ u^q as its only term in free degree q.
        rest = list(vectors)
        while rest:
            e, ws, others = _leading_group(rest, blocks, lambda e: e)
            if other.chain_injective(k, e, ws):
                rest = others
                continue
            e, ws, others = _leading_group(rest, blocks, lambda e: -e)
            if degree - e <= k and other.chain_injective(k - degree + e, e, ws):
                rest = others
                continue
            return False
        return True


def _leading_group(vectors, blocks, key):
    """Echelon form of ``vectors`` with pivots in the leading block (least ``key``).

    Returns the leading block, the independent projections onto it of the
    echelon vectors that lead there, and the remaining echelon vectors.
    """
    order = sorted(range(len(blocks)), key=lambda i: (key(blocks[i][0]), i))
    pos = {i: n for n, i in enumerate(order)}
    basis = Subspace.span(sum(1 << pos[i] for i in support(v)) for v in vectors).basis
    lead = min((blocks[order[(w & -w).bit_length() - 1]][0] for w in basis), key=key)
    group, others = [], []
    for w in basis:
        if blocks[order[(w & -w).bit_length() - 1]][0] != lead:
            others.append(sum(1 << order[n] for n in support(w)))
            continue
        proj = 0
        for n in support(w):
            e, bit = blocks[order[n]]
            if e == lead:
                proj |= 1 << bit
        group.append(proj)
    return lead, group, others


def _is_free1(m: UnstableModule) -> bool:
    if isinstance(m, Free) and m.n == 1:
        return True
    return isinstance(m, Submodule) and _is_free1(m.ambient)


class DirectSum(UnstableModule):
    def __init__(self, *summands: UnstableModule):
        if not summands:
            raise ValueError("need at least one summand")
        self.summands = summands
        self.name = " ⊕ ".join(m.name for m in summands)
        self.closed_form = all(m.closed_form for m in summands)
        self.finite_support = all(m.finite_support for m in summands)
        self.sq0_injective = all(m.sq0_injective for m in summands)

    def _offsets(self, degree: int) -> list[int]:
        out, acc = [], 0
        for m in self.summands:
            out.append(acc)
            acc += m.dim(degree)
        return out

    def dim(self, degree: int) -> int:
        return sum(m.dim(degree) for m in self.summands)

    def locate(self, degree: int, index: int) -> tuple[int, int]:
        for k, m in enumerate(self.summands):
            dm = m.dim(degree)
            if index < dm:
                return k, index
            index -= dm
        raise IndexError(index)

    def inject(self, k: int, degree: int, v: int) -> int:
        return v << self._offsets(degree)[k]

    def component(self, k: int, degree: int, v: int) -> int:
        off = self._offsets(degree)[k]
        return (v >> off) & ((1 << self.summands[k].dim(degree)) - 1)

    def label(self, degree: int, index: int) -> str:
        k, j = self.locate(degree, index)
        return f"{self.summands[k].label(degree, j)}@{k}"

    def act_basis(self, i: int, degree: int, index: int, unbounded: bool = False) -> int:
        k, j = self.locate(degree, index)
        return self.inject(k, degree + i, self.summands[k].act_basis(i, degree, j, unbounded))

    def chain_injective(self, k: int, degree: int, vectors: Sequence[int]) -> bool:
        for n, m in enumerate(self.summands):
            parts = [c for c in (self.component(n, degree, v) for v in vectors) if c]
            if parts and not m.chain_injective(k, degree, parts):
                return False
        return True

    def zero_along_doubling(self, degree: int) -> bool | None:
        verdicts = [m.zero_along_doubling(degree) for m in self.summands]
        if all(v is True for v in verdicts):
            return True
        if any(v is False for v in verdicts):
            return False
        return None


class Submodule(UnstableModule):
    """The submodule of ``ambient`` spanned in each degree by ``spanning(degree)``.

    Closure under the action is checked lazily: an action landing outside
    raises :class:`SubmoduleClosureError`.
    """

    def __init__(self, ambient: UnstableModule, spanning: Callable[[int], Sequence[int]], name: str = "N"):
        self.ambient = ambient
        self._spanning = spanning
        self.name = name
        self.closed_form = ambient.closed_form
        self.finite_support = ambient.finite_support
        self.sq0_injective = ambient.sq0_injective
        self._cache: dict[int, tuple[tuple[int, ...], GF2Matrix]] = {}

    def basis(self, degree: int) -> tuple[int, ...]:
        hit = self._cache.get(degree)
        if hit is None:
            s = Subspace.span(self._spanning(degree))
            b = tuple(s.basis)
            hit = (b, GF2Matrix.from_columns(b, self.ambient.dim(degree)))
            self._cache[degree] = hit
        return hit[0]

    def dim(self, degree: int) -> int:
        return len(self.basis(degree))

    def to_ambient(self, degree: int, v: int) -> int:
        w = 0
        b = self.basis(degree)
        for j in support(v):
            w ^= b[j]
        return w

    def from_ambient(self, degree: int, w: int) -> int:
        self.basis(degree)
        x = solve(self._cache[degree][1], w)
        if x is None:
            raise SubmoduleClosureError(f"vector {w:#b} in degree {degree} is outside {self.name}")
        return x

    def label(self, degree: int, index: int) -> str:
        return self.ambient.format_vector(degree, self.basis(degree)[index])

    def active_ops(self, degree: int) -> Sequence[int]:
        return self.ambient.active_ops(degree)

    def nonzero_degrees(self, upto: int) -> Iterable[int]:
        return (d for d in self.ambient.nonzero_degrees(upto) if self.dim(d))

    def act_basis(self, i: int, degree: int, index: int, unbounded: bool = False) -> int:
        if i == 0:
            return 1 << index
        w = self.ambient.act_vector(i, degree, self.basis(degree)[index], unbounded)
        return self.from_ambient(degree + i, w)

    def chain_injective(self, k: int, degree: int, vectors: Sequence[int]) -> bool:
        return self.ambient.chain_injective(k, degree, [self.to_ambient(degree, v) for v in vectors])

    def zero_along_doubling(self, degree: int) -> bool | None:
        if self.ambient.zero_along_doubling(degree):
            return True
        return None

    def inclusion(self) -> ModuleMap:
        return ModuleMap(self, self.ambient, lambda d, j: self.basis(d)[j])


@dataclass(frozen=True)
class ModuleMap:
    """A degree-preserving module map given on basis elements."""

    source: UnstableModule
    target: UnstableModule
    on_basis: Callable[[int, int], int]

    def apply(self, degree: int, v: int) -> int:
        out = 0
        for j in support(v):
            out ^= self.on_basis(degree, j)
        return out

    def matrix(self, degree: int) -> GF2Matrix:
        cols = [self.on_basis(degree, j) for j in range(self.source.dim(degree))]
        return GF2Matrix.from_columns(cols, self.target.dim(degree))


def suspend(m: UnstableModule, s: int = 1) -> Suspension:
    return Suspension(m, s)


def tensor(a: UnstableModule, b: UnstableModule) -> Tensor:
    return Tensor(a, b)


def act(m: UnstableModule, op: AdmissibleSum, x: ModuleElement) -> ModuleElement:
    """Apply a Steenrod algebra element, respecting the module's degree bounds.

    Raises:
        TruncationError: the result would lie past a stored degree bound.
    """
    acc: dict[int, int] = {}
    for d, v in x.components:
        for t in op.terms:
            w = _act_monomial(m, t, d, v, False)
            if w:
                e = d + sum(t)
                acc[e] = acc.get(e, 0) ^ w
    return ModuleElement.from_components(m, acc)


def sq_lower(m: UnstableModule, k: int, x: ModuleElement, unbounded: bool = False) -> ModuleElement:
    """``Sq_k x = Sq^{|x| - k} x``; zero when ``k > |x|`` or ``k < 0``.

    Raises:
        NonHomogeneousError: ``x`` has components in several degrees.
    """
    d = x.degree
    if d is None or k > d or k < 0:
        return ModuleElement(m)
    return m.element(2 * d - k, m.act_vector(d - k, d, x.vector, unbounded))


def suspend_element(sm: Suspension, x: ModuleElement) -> ModuleElement:
    """``σ^s x`` in ``Σ^s M`` for ``x`` in ``M``."""
    return ModuleElement.from_components(sm, {d + sm.s: v for d, v in x.components})


class FiniteUnstableAlgebra:
    """A finite unstable algebra: a module with a unit in degree 0 and product tables.

    ``products[(d1, d2)][a][b]`` is the bit vector of ``x_a * y_b`` in degree
    ``d1 + d2`` for basis classes of positive degrees ``d1 <= d2``; missing
    entries are zero and products with the unit are implicit.
    """

    def __init__(
        self,
        module: FiniteUnstableModule,
        products: Mapping[tuple[int, int], Sequence[Sequence[int]]] | None = None,
        *,
        check: bool = True,
    ):
        self.module = module
        top = module.top_degree
        if module.dim(0) != 1:
            raise AlgebraError(Violation("shape", 0, "unit", detail=f"degree 0 must have dimension 1, got {module.dim(0)}"))
        self._given = {k: [list(r) for r in t] for k, t in (products or {}).items()}
        tables: dict[tuple[int, int], list[list[int]]] = {}
        for (d1, d2), t in self._given.items():
            if d1 < 1 or d2 < 1:
                raise AlgebraError(Violation("shape", d1, f"product {d1},{d2}", detail="degrees must be positive"))
            if d1 + d2 > top:
                if any(v for row in t for v in row):
                    raise AlgebraError(Violation("shape", d1, f"product {d1},{d2}", detail="product above the top degree"))
                continue
            if len(t) != module.dim(d1) or any(len(r) != module.dim(d2) for r in t):
                raise AlgebraError(Violation("shape", d1, f"product {d1},{d2}", detail="table shape mismatch"))
            limit = 1 << module.dim(d1 + d2)
            if any(v < 0 or v >= limit for r in t for v in r):
                raise AlgebraError(Violation("shape", d1, f"product {d1},{d2}", detail="product vector too wide"))
        for d1 in range(1, top + 1):
            for d2 in range(d1, top + 1 - d1):
                t = self._given.get((d1, d2))
                if t is None and (d2, d1) in self._given:
                    t = [list(col) for col in zip(*self._given[(d2, d1)])] if self._given[(d2, d1)] else [[] for _ in range(module.dim(d1))]
                if t is None:
                    t = [[0] * module.dim(d2) for _ in range(module.dim(d1))]
                tables[(d1, d2)] = t
        self.tables = tables
        if check:
            for v in verify_algebra(self):
                raise AlgebraError(v)

    @property
    def top_degree(self) -> int:
        return self.module.top_degree

    def product_basis(self, d1: int, a: int, d2: int, b: int) -> int:
        if d1 == 0:
            return 1 << b
        if d2 == 0:
            return 1 << a
        if d1 + d2 > self.top_degree:
            return 0
        if d1 <= d2:
            return self.tables[(d1, d2)][a][b]
        return self.tables[(d2, d1)][b][a]

    def product(self, d1: int, x: int, d2: int, y: int) -> int:
        out = 0
        for a in support(x):
            for b in support(y):
                out ^= self.product_basis(d1, a, d2, b)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteUnstableAlgebra):
            return NotImplemented
        return self.module == other.module and self.tables == other.tables

    __hash__ = object.__hash__


def verify_algebra(alg: FiniteUnstableAlgebra) -> list[Violation]:
    """Every violated algebra axiom (plus the module's own violations)."""
    m = alg.module
    top = m.top_degree
    out = list(verify_instability(m))
    # commutativity where both orders were supplied, and on the diagonal
    for (d1, d2), t in alg._given.items():
        if (d2, d1) in alg._given and d1 < d2 and d1 + d2 <= top:
            other = alg._given[(d2, d1)]
            for a in range(m.dim(d1)):
                for b in range(m.dim(d2)):
                    if t[a][b] != other[b][a]:
                        out.append(Violation("commutativity", d1, f"product {d1},{d2}", a))
    for d in range(1, top // 2 + 1):
        t = alg.tables[(d, d)]
        for a in range(m.dim(d)):
            for b in range(a):
                if t[a][b] != t[b][a]:
                    out.append(Violation("commutativity", d, f"product {d},{d}", a))
    for d1 in range(1, top + 1):
        for d2 in range(1, top + 1 - d1):
            for d3 in range(1, top + 1 - d1 - d2):
                for a in range(m.dim(d1)):
                    for b in range(m.dim(d2)):
                        ab = alg.product_basis(d1, a, d2, b)
                        for c in range(m.dim(d3)):
                            lhs = alg.product(d1 + d2, ab, d3, 1 << c)
                            rhs = alg.product(d1, 1 << a, d2 + d3, alg.product_basis(d2, b, d3, c))
                            if lhs != rhs:
                                out.append(Violation("associativity", d1, f"degrees {d1},{d2},{d3}", a))
    for d1 in range(1, top + 1):
        for d2 in range(d1, top + 1 - d1):
            for a in range(m.dim(d1)):
                for b in range(m.dim(d2)):
                    xy = alg.product_basis(d1, a, d2, b)
                    for i in range(1, top - d1 - d2 + 1):
                        lhs = m.act_vector(i, d1 + d2, xy)
                        rhs = 0
                        for j in range(i + 1):
                            sx = m.act_basis(j, d1, a)
                            sy = m.act_basis(i - j, d2, b)
                            rhs ^= alg.product(d1 + j, sx, d2 + i - j, sy)
                        if lhs != rhs:
                            out.append(Violation("cartan", d1, f"Sq{i} on product {d1},{d2}", a))
    for d in range(1, top // 2 + 1):
        for a in range(m.dim(d)):
            if m.act_basis(d, d, a) != alg.product_basis(d, a, d, a):
                out.append(Violation("restriction", d, f"Sq{d}", a, "Sq^|x| x differs from x^2"))
    return out


def finite_subquotient(
    m: UnstableModule,
    generators: Mapping[int, Iterable[int]],
    relations: Mapping[int, Iterable[int]],
    top: int,
    *,
    shift: int = 0,
    name: str = "Q",
    truncated: bool = False,
    check: bool = True,
) -> tuple[FiniteUnstableModule, Subquotient]:
    """The subquotient of ``m`` in degrees ``0..top``, desuspended ``shift`` times.

    The numerator and denominator must be submodules (within the degree range);
    the induced action is read off representatives.

    Raises:
        ValueError: the subquotient is nonzero below degree ``shift``.
    """
    space = GradedVectorSpace(tuple(m.dim(d) for d in range(top + 1)))
    sq = subquotient(space, generators, relations)
    for d in range(min(shift, top + 1)):
        if sq.space.dims[d]:
            raise ValueError(f"subquotient is nonzero in degree {d} < {shift}; cannot desuspend")
    dims = list(sq.space.dims[shift:]) or [0]
    ops: dict[int, dict[int, GF2Matrix]] = {}
    for i in range(1, top - shift + 1):
        ops[i] = {}
        for e in range(top - shift - i + 1):
            d = e + shift
            if not dims[e]:
                continue
            cols = []
            for rep in sq.representatives[d]:
                w = m.act_vector(i, d, rep, m.closed_form)
                cols.append(sq.project(d + i, w))
            ops[i][e] = GF2Matrix.from_columns(cols, dims[e + i])
    labels = {
        (e, j): m.format_vector(e + shift, rep)
        for e in range(len(dims))
        for j, rep in enumerate(sq.representatives.get(e + shift, ()))
    }
    return FiniteUnstableModule(dims, ops, labels=labels, name=name, truncated=truncated, check=check), sq


def indecomposables(alg: FiniteUnstableAlgebra) -> FiniteUnstableModule:
    """``Q(A) = Abar / Abar^2`` with the induced action (re-validated)."""
    m = alg.module
    top = m.top_degree
    gens = {d: [1 << j for j in range(m.dim(d))] for d in range(1, top + 1)}
    rels: dict[int, list[int]] = {d: [] for d in range(top + 1)}
    for d1 in range(1, top + 1):
        for d2 in range(d1, top + 1 - d1):
            for a in range(m.dim(d1)):
                for b in range(m.dim(d2)):
                    v = alg.product_basis(d1, a, d2, b)
                    if v:
                        rels[d1 + d2].append(v)
    q, _ = finite_subquotient(m, gens, rels, top, name=f"Q({m.name})")
    return q
