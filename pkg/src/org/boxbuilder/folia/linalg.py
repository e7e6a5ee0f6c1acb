"""
Exact sparse linear algebra over the rationals.

Elimination runs fraction-free on integer rows (rows are scaled by the lcm of
their denominators and divided by their content after every update); the
final reduced echelon form is normalised to pivot 1. Pivots are chosen column
by column, lowest row index first, so every result is deterministic.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from org.boxbuilder.folia.errors import AmbientMismatchError
from org.boxbuilder.folia.ring import Rational, normalize_rational

_LOG = logging.getLogger(__name__)

SparseVector = Dict[int, Rational]
VectorLike = Union[Sequence, Mapping[int, object]]


def to_sparse(vector: VectorLike, length: Optional[int] = None) -> SparseVector:
    """Converts a dense sequence or a {index: value} mapping into a sparse dict without zeros."""
    if isinstance(vector, Mapping):
        items = vector.items()
    else:
        if length is not None and len(vector) != length:
            raise AmbientMismatchError(f"Vector of length {len(vector)} in a space of dimension {length}.")
        items = enumerate(vector)
    out = {}
    for i, v in items:
        v = normalize_rational(v)
        if v:
            if length is not None and not 0 <= i < length:
                raise AmbientMismatchError(f"Coordinate {i} outside a space of dimension {length}.")
            out[int(i)] = v
    return out


def _integer_row(row: Mapping[int, Rational]) -> Dict[int, int]:
    scale = reduce(lcm, (Fraction(v).denominator for v in row.values()), 1)
    ints = {k: int(Fraction(v) * scale) for k, v in row.items()}
    return _primitive(ints)


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    content = reduce(gcd, row.values(), 0)
    if content > 1:
        return {k: v // content for k, v in row.items()}
    return row


@dataclass(frozen=True)
class EchelonForm:
    """Reduced row echelon form: ``rows[t]`` has pivot 1 at column ``pivots[t]``."""

    cols: int
    pivots: Tuple[int, ...]
    rows: Tuple[Dict[int, Rational], ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def row_reduce(rows: Iterable[Mapping[int, Rational]], cols: int) -> EchelonForm:
    """
    Gauss-Jordan elimination of sparse rows with integer arithmetic.

    Parameters:
    rows (Iterable[Mapping[int, Rational]]): sparse rows, zeros omitted.
    cols (int): number of columns.

    Returns:
    EchelonForm: pivots in increasing column order with the matching normalised rows.
    """
    pending = [_integer_row(r) for r in rows if r]
    pivot_rows: Dict[int, Dict[int, int]] = {}
    for c in range(cols):
        pick = next((t for t, r in enumerate(pending) if r.get(c)), None)
        if pick is None:
            continue
        pivot = pending.pop(pick)
        p = pivot[c]
        pending = [_eliminate(r, pivot, p, r[c]) if r.get(c) else r for r in pending]
        pending = [r for r in pending if r]
        for pc in list(pivot_rows):
            f = pivot_rows[pc].get(c)
            if f:
                pivot_rows[pc] = _eliminate(pivot_rows[pc], pivot, p, f)
        pivot_rows[c] = pivot
    pivots = tuple(sorted(pivot_rows))
    normalised = []
    for pc in pivots:
        r = pivot_rows[pc]
        lead = r[pc]
        normalised.append({k: normalize_rational(Fraction(v, lead)) for k, v in r.items()})
    _LOG.debug(f"Row reduction over {cols} columns reached rank {len(pivots)}")
    return EchelonForm(cols=cols, pivots=pivots, rows=tuple(normalised))


def _eliminate(row: Dict[int, int], pivot: Dict[int, int], p: int, f: int) -> Dict[int, int]:
    out = {k: p * v for k, v in row.items()}
    for k, v in pivot.items():
        nv = out.get(k, 0) - f * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return _primitive(out)


class RatMatrix:
    """Sparse rational matrix stored row-wise; zero entries are never stored."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows: int, cols: int, entries: Optional[Mapping[Tuple[int, int], object]] = None):
        self.rows = rows
        self.cols = cols
        self._rows: List[SparseVector] = [{} for _ in range(rows)]
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"Entry ({i}, {j}) outside a {rows}x{cols} matrix.")
            v = normalize_rational(v)
            if v:
                self._rows[i][j] = v

    @classmethod
    def from_rows(cls, rows: Sequence[VectorLike], cols: Optional[int] = None) -> "RatMatrix":
        if cols is None:
            cols = len(rows[0]) if rows and not isinstance(rows[0], Mapping) else 0
        m = cls(len(rows), cols)
        m._rows = [to_sparse(r, cols) for r in rows]
        return m

    @classmethod
    def from_columns(cls, columns: Sequence[VectorLike], rows: int) -> "RatMatrix":
        m = cls(rows, len(columns))
        for j, col in enumerate(columns):
            for i, v in to_sparse(col, rows).items():
                m._rows[i][j] = v
        return m

    @property
    def entries(self) -> Dict[Tuple[int, int], Rational]:
        return {(i, j): v for i, r in enumerate(self._rows) for j, v in r.items()}

    def get(self, i: int, j: int) -> Rational:
        return self._rows[i].get(j, 0)

    def row(self, i: int) -> SparseVector:
        return dict(self._rows[i])

    def transpose(self) -> "RatMatrix":
        t = RatMatrix(self.cols, self.rows)
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                t._rows[j][i] = v
        return t

    def apply(self, vector: VectorLike) -> List[Rational]:
        x = to_sparse(vector, self.cols)
        return [normalize_rational(sum((v * x[j] for j, v in r.items() if j in x), 0)) for r in self._rows]

    def is_zero(self) -> bool:
        return all(not r for r in self._rows)

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def echelon(self) -> EchelonForm:
        return row_reduce(self._rows, self.cols)

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return (self.rows, self.cols, self._rows) == (other.rows, other.cols, other._rows)

    def __repr__(self):
        return f"RatMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


class Subspace:
    """
    Span of rational vectors inside Q^ambient_dim, stored as its canonical
    reduced echelon basis. Equal subspaces have identical bases.
    """

    __slots__ = ("ambient_dim", "_echelon")

    def __init__(self, ambient_dim: int, echelon: EchelonForm):
        self.ambient_dim = ambient_dim
        self._echelon = echelon

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[VectorLike]) -> "Subspace":
        rows = [to_sparse(v, ambient_dim) for v in vectors]
        return cls(ambient_dim, row_reduce(rows, ambient_dim))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, EchelonForm(cols=ambient_dim, pivots=(), rows=()))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls.span(ambient_dim, ({i: 1} for i in range(ambient_dim)))

    @property
    def dim(self) -> int:
        return self._echelon.rank

    @property
    def pivots(self) -> Tuple[int, ...]:
        return self._echelon.pivots

    @property
    def basis(self) -> Tuple[SparseVector, ...]:
        return tuple(dict(r) for r in self._echelon.rows)

    def dense_basis(self) -> List[List[Rational]]:
        return [[r.get(j, 0) for j in range(self.ambient_dim)] for r in self._echelon.rows]

    def _check_ambient(self, other_dim: int):
        if other_dim != self.ambient_dim:
            raise AmbientMismatchError(f"Ambient dimensions differ: {self.ambient_dim} vs {other_dim}.")

    def reduce(self, vector: VectorLike) -> SparseVector:
        """Remainder of ``vector`` after clearing every pivot coordinate."""
        v = dict(to_sparse(vector, self.ambient_dim))
        for pc, row in zip(self._echelon.pivots, self._echelon.rows):
            f = v.get(pc)
            if not f:
                continue
            for k, a in row.items():
                nv = v.get(k, 0) - f * a
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
        return {k: normalize_rational(x) for k, x in v.items()}

    def contains(self, vector: VectorLike) -> bool:
        return not self.reduce(vector)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other.ambient_dim)
        return Subspace.span(self.ambient_dim, list(self._echelon.rows) + list(other._echelon.rows))

    def is_subspace_of(self, other: "Subspace") -> bool:
        self._check_ambient(other.ambient_dim)
        return self.dim <= other.dim and all(other.contains(r) for r in self._echelon.rows)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self._echelon.pivots == other._echelon.pivots
            and self._echelon.rows == other._echelon.rows
        )

    def __hash__(self):
        return hash((self.ambient_dim, self._echelon.pivots))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def rank(M: RatMatrix) -> int:
    return M.echelon().rank


def kernel_basis(M: RatMatrix) -> Subspace:
    """
    Right kernel {x : Mx = 0} read off the reduced echelon form: one vector
    per free column, with -row[free] at each pivot coordinate.
    """
    ech = M.echelon()
    pivot_set = set(ech.pivots)
    vectors = []
    for free in range(M.cols):
        if free in pivot_set:
            continue
        v: SparseVector = {free: 1}
        for pc, row in zip(ech.pivots, ech.rows):
            a = row.get(free)
            if a:
                v[pc] = -a
        vectors.append(v)
    kernel = Subspace.span(M.cols, vectors)
    _LOG.debug(f"Kernel of {M!r} has dimension {kernel.dim}")
    return kernel


def span_sum(U: Subspace, V: Subspace) -> Subspace:
    return U + V


def contains(U: Subspace, v: VectorLike) -> bool:
    return U.contains(v)


def equal(U: Subspace, V: Subspace) -> bool:
    """
    Raises:
        AmbientMismatchError: when U and V live in different spaces.
    """
    U._check_ambient(V.ambient_dim)
    return U == V


def intersection_dim(U: Subspace, V: Subspace) -> int:
    return U.dim + V.dim - span_sum(U, V).dim


def solve(M: RatMatrix, b: VectorLike) -> Optional[List[Rational]]:
    """
    Returns one exact solution x of Mx = b (free variables set to 0), or None
    when the system is inconsistent.
    """
    rhs = to_sparse(b, M.rows)
    augmented = []
    for i in range(M.rows):
        row = M.row(i)
        if i in rhs:
            row[M.cols] = rhs[i]
        augmented.append(row)
    ech = row_reduce(augmented, M.cols + 1)
    if ech.pivots and ech.pivots[-1] == M.cols:
        return None
    x: List[Rational] = [0] * M.cols
    for pc, row in zip(ech.pivots, ech.rows):
        x[pc] = row.get(M.cols, 0)
    return x
