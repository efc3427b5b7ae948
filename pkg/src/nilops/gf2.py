"""Exact linear algebra over GF(2).

Vectors are Python ints used as bit sets: bit ``j`` holds coordinate ``j``.
A matrix stores one such int per row, so row operations are single XORs
on arbitrary-width words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


def vec(bits: Iterable[int]) -> int:
    """Pack a 0/1 sequence into a bit vector (entry ``j`` -> bit ``j``)."""
    v = 0
    for j, b in enumerate(bits):
        if b & 1:
            v |= 1 << j
    return v


def unvec(v: int, n: int) -> list[int]:
    """Unpack the first ``n`` coordinates of a bit vector."""
    return [(v >> j) & 1 for j in range(n)]


def support(v: int) -> list[int]:
    """Indices of the nonzero coordinates of ``v``, ascending."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def parity(v: int) -> int:
    return bin(v).count("1") & 1


@dataclass(frozen=True)
class GF2Matrix:
    """A dense GF(2) matrix, bit-packed by rows."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ValueError(f"expected {self.nrows} rows, got {len(self.rows)}")
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#b} does not fit in {self.ncols} columns")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> GF2Matrix:
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> GF2Matrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]], ncols: int | None = None) -> GF2Matrix:
        """Build from row-major nested lists; ``ncols`` is needed for 0-row input."""
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(data[0])
        rows = []
        for i, row in enumerate(data):
            if len(row) != ncols:
                raise ValueError(f"row {i} has length {len(row)}, expected {ncols}")
            if any(b not in (0, 1) for b in row):
                raise ValueError(f"row {i} has entries outside {{0, 1}}")
            rows.append(vec(row))
        return cls(len(rows), ncols, tuple(rows))

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> GF2Matrix:
        """Build the matrix whose ``j``-th column is the bit vector ``columns[j]``."""
        rows = [0] * nrows
        for j, c in enumerate(columns):
            for i in support(c):
                if i >= nrows:
                    raise ValueError(f"column {j} has a bit beyond row {nrows - 1}")
                rows[i] |= 1 << j
        return cls(nrows, len(columns), tuple(rows))

    def to_lists(self) -> list[list[int]]:
        return [unvec(r, self.ncols) for r in self.rows]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def column(self, j: int) -> int:
        c = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                c |= 1 << i
        return c

    def columns(self) -> list[int]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> GF2Matrix:
        return GF2Matrix(self.ncols, self.nrows, tuple(self.columns()))

    def apply(self, v: int) -> int:
        """Matrix-vector product ``M v``."""
        out = 0
        for i, r in enumerate(self.rows):
            if parity(r & v):
                out |= 1 << i
        return out

    def __matmul__(self, other: GF2Matrix) -> GF2Matrix:
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        rows = []
        for r in self.rows:
            acc = 0
            for k in support(r):
                acc ^= other.rows[k]
            rows.append(acc)
        return GF2Matrix(self.nrows, other.ncols, tuple(rows))

    def __add__(self, other: GF2Matrix) -> GF2Matrix:
        if self.shape != other.shape:
            raise ValueError(f"cannot add {self.shape} and {other.shape}")
        return GF2Matrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def rank(self) -> int:
        return row_reduce(self)[0]


def row_reduce(m: GF2Matrix) -> tuple[int, GF2Matrix, list[int]]:
    """Reduced row-echelon form over GF(2).

    Returns:
        ``(rank, reduced, pivots)`` where ``pivots`` lists the pivot columns in
        increasing order and the nonzero rows of ``reduced`` come first.
    """
    rows = list(m.rows)
    pivots: list[int] = []
    r = 0
    for col in range(m.ncols):
        bit = 1 << col
        for i in range(r, len(rows)):
            if rows[i] & bit:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        p = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= p
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return r, GF2Matrix(m.nrows, m.ncols, tuple(rows)), pivots


def solve(m: GF2Matrix, b: int) -> int | None:
    """Find ``x`` with ``m @ x == b``, or ``None`` when the system is inconsistent."""
    if b < 0 or b >= 1 << m.nrows:
        raise ValueError(f"right-hand side does not fit a matrix with {m.nrows} rows")
    # augment: column ncols carries b
    aug = GF2Matrix(
        m.nrows,
        m.ncols + 1,
        tuple(r | (((b >> i) & 1) << m.ncols) for i, r in enumerate(m.rows)),
    )
    rank, red, pivots = row_reduce(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = 0
    for i, p in enumerate(pivots):
        if (red.rows[i] >> m.ncols) & 1:
            x |= 1 << p
    return x


def kernel(m: GF2Matrix) -> list[int]:
    """A basis of the null space ``{x : m @ x == 0}``."""
    rank, red, pivots = row_reduce(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivot_set:
            continue
        x = 1 << free
        for i, p in enumerate(pivots):
            if (red.rows[i] >> free) & 1:
                x |= 1 << p
        basis.append(x)
    return basis


@dataclass
class Subspace:
    """A subspace of GF(2)^n held in reduced echelon form.

    Each basis vector is keyed by its pivot (lowest set bit), and no basis vector
    has a bit at another's pivot. Two subspaces are equal iff their ``basis`` lists
    are equal.
    """

    rows: dict[int, int] = field(default_factory=dict)

    @classmethod
    def span(cls, vectors: Iterable[int]) -> Subspace:
        s = cls()
        for v in vectors:
            s.add(v)
        return s

    def reduce(self, v: int) -> int:
        for p, r in self.rows.items():
            if (v >> p) & 1:
                v ^= r
        return v

    def add(self, v: int) -> bool:
        """Insert ``v``; return whether the dimension grew."""
        v = self.reduce(v)
        if not v:
            return False
        p = (v & -v).bit_length() - 1
        for q, r in list(self.rows.items()):
            if (r >> p) & 1:
                self.rows[q] = r ^ v
        self.rows[p] = v
        return True

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> list[int]:
        return [self.rows[p] for p in sorted(self.rows)]

    def coordinates(self, v: int) -> int | None:
        """Coefficients of ``v`` in ``basis`` as a bit vector, or ``None`` if ``v`` is outside."""
        pivots = sorted(self.rows)
        x = 0
        w = v
        for i, p in enumerate(pivots):
            if (w >> p) & 1:
                w ^= self.rows[p]
                x |= 1 << i
        return x if w == 0 else None

    def contains_all(self, other: Subspace) -> bool:
        return all(v in self for v in other.rows.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.rows == other.rows

    def intersection(self, other: Subspace) -> Subspace:
        """Zassenhaus-free intersection via the kernel of ``[A | B]``."""
        a, b = self.basis, other.basis
        if not a or not b:
            return Subspace()
        cols = a + b
        nbits = max(v.bit_length() for v in cols)
        m = GF2Matrix.from_columns(cols, nbits)
        out = Subspace()
        for x in kernel(m):
            w = 0
            for j in support(x):
                if j < len(a):
                    w ^= a[j]
            out.add(w)
        return out


def preimage(columns: Sequence[int], target: Subspace, nrows: int | None = None) -> Subspace:
    """The subspace ``{x : A x in target}`` where ``A`` has the given columns."""
    # x ranges over the source coordinates; stack A with a basis of the target
    tb = target.basis
    ncols = len(columns)
    if nrows is None:
        nrows = max([c.bit_length() for c in list(columns) + tb] + [0])
    m = GF2Matrix.from_columns(list(columns) + tb, nrows)
    out = Subspace()
    mask = (1 << ncols) - 1
    for x in kernel(m):
        out.add(x & mask)
    return out


def image_columns(columns: Sequence[int], vectors: Iterable[int]) -> list[int]:
    """Images ``A v`` of source vectors ``v`` under the matrix with the given columns."""
    out = []
    for v in vectors:
        w = 0
        for j in support(v):
            w ^= columns[j]
        out.append(w)
    return out


@dataclass(frozen=True)
class GradedVectorSpace:
    """Finite graded vector space with homogeneous pieces in degrees ``0..top_degree``."""

    dims: tuple[int, ...]
    labels: Mapping[tuple[int, int], str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        if not self.dims:
            raise ValueError("a graded vector space needs at least degree 0")
        if any(d < 0 for d in self.dims):
            raise ValueError(f"negative dimension in {self.dims}")
        for (deg, idx) in self.labels:
            if not (0 <= deg <= self.top_degree and 0 <= idx < self.dims[deg]):
                raise ValueError(f"label key {(deg, idx)} is not a basis element")

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 1

    def dim(self, degree: int) -> int:
        if 0 <= degree <= self.top_degree:
            return self.dims[degree]
        return 0

    def total_dim(self) -> int:
        return sum(self.dims)

    def label(self, degree: int, index: int) -> str:
        return self.labels.get((degree, index), f"x{degree}_{index}")


@dataclass(frozen=True)
class GradedLinearMap:
    """A degree-``shift`` GF(2)-linear map between graded vector spaces.

    ``blocks[d]`` is the matrix from degree ``d`` to degree ``d + shift``; it is
    present exactly when the source is nonzero in degree ``d`` and ``d + shift``
    lies in the target's range.
    """

    source: GradedVectorSpace
    target: GradedVectorSpace
    shift: int
    blocks: Mapping[int, GF2Matrix]

    def __post_init__(self):
        expected = {
            d
            for d in range(self.source.top_degree + 1)
            if self.source.dims[d] > 0 and 0 <= d + self.shift <= self.target.top_degree
        }
        if set(self.blocks) != expected:
            raise ValueError(
                f"blocks present at {sorted(self.blocks)}, expected exactly {sorted(expected)}"
            )
        for d, m in self.blocks.items():
            want = (self.target.dims[d + self.shift], self.source.dims[d])
            if m.shape != want:
                raise ValueError(f"block at degree {d} has shape {m.shape}, expected {want}")

    @classmethod
    def zero(cls, source: GradedVectorSpace, target: GradedVectorSpace, shift: int) -> GradedLinearMap:
        blocks = {
            d: GF2Matrix.zeros(target.dims[d + shift], source.dims[d])
            for d in range(source.top_degree + 1)
            if source.dims[d] > 0 and 0 <= d + shift <= target.top_degree
        }
        return cls(source, target, shift, blocks)

    def apply(self, degree: int, v: int) -> int:
        m = self.blocks.get(degree)
        return 0 if m is None else m.apply(v)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks.values())


@dataclass(frozen=True)
class Subquotient:
    """``span(generators) / span(relations)`` inside a graded vector space.

    Representatives are canonical: they depend only on the two spans, not on how
    the generating sets were listed.
    """

    ambient: GradedVectorSpace
    space: GradedVectorSpace
    representatives: Mapping[int, tuple[int, ...]]
    _relations: Mapping[int, Subspace]
    _reps: Mapping[int, Subspace]
    _generators: Mapping[int, Subspace]

    def include(self, degree: int, coords: int) -> int:
        """Lift quotient coordinates to an ambient representative."""
        w = 0
        for j in support(coords):
            w ^= self.representatives[degree][j]
        return w

    def project(self, degree: int, v: int) -> int:
        """Quotient coordinates of an ambient vector lying in the generator span."""
        if degree not in self._generators or v not in self._generators[degree]:
            if v == 0:
                return 0
            raise ValueError(f"vector {v:#b} in degree {degree} is outside the generator span")
        r = self._relations[degree].reduce(v)
        x = self._reps[degree].coordinates(r)
        assert x is not None
        return x

    def contains(self, degree: int, v: int) -> bool:
        return degree in self._generators and v in self._generators[degree]


def subquotient(
    space: GradedVectorSpace,
    generators: Mapping[int, Iterable[int]],
    relations: Mapping[int, Iterable[int]] | None = None,
) -> Subquotient:
    """Form the graded subquotient of ``space``.

    Args:
        space: the ambient graded vector space.
        generators: per-degree vectors spanning the numerator.
        relations: per-degree vectors spanning the denominator; each must lie in
            the generator span of its degree.

    Raises:
        ValueError: a vector does not fit its degree, or a relation lies outside
            the generator span.
    """
    relations = relations or {}
    dims = []
    reps: dict[int, tuple[int, ...]] = {}
    rel_spaces: dict[int, Subspace] = {}
    rep_spaces: dict[int, Subspace] = {}
    gen_spaces: dict[int, Subspace] = {}
    for d in range(space.top_degree + 1):
        limit = 1 << space.dims[d]
        gens = list(generators.get(d, ()))
        rels = list(relations.get(d, ()))
        for v in gens + rels:
            if v < 0 or v >= limit:
                raise ValueError(f"vector {v:#b} does not fit degree {d} of dimension {space.dims[d]}")
        g = Subspace.span(gens)
        r = Subspace.span(rels)
        for v in r.basis:
            if v not in g:
                raise ValueError(f"relation {v:#b} in degree {d} lies outside the generator span")
        q = Subspace.span(r.reduce(v) for v in g.basis)
        gen_spaces[d], rel_spaces[d], rep_spaces[d] = g, r, q
        reps[d] = tuple(q.basis)
        dims.append(q.dim)
    return Subquotient(space, GradedVectorSpace(tuple(dims)), reps, rel_spaces, rep_spaces, gen_spaces)


def inverse(m: GF2Matrix) -> GF2Matrix:
    """Inverse of a square matrix.

    Raises:
        ValueError: ``m`` is not square or is singular.
    """
    if m.nrows != m.ncols:
        raise ValueError(f"cannot invert a {m.shape} matrix")
    n = m.nrows
    cols = []
    for j in range(n):
        x = solve(m, 1 << j)
        if x is None:
            raise ValueError("matrix is singular")
        cols.append(x)
    return GF2Matrix.from_columns(cols, n)
