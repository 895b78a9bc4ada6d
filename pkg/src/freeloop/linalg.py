"""Exact linear algebra over a :class:`FieldSpec`.

Vectors are sparse dicts ``{coordinate: raw value}`` with no stored zeros.
Matrices keep one sparse dict per column, which is the natural layout for the
maps of the small complex (each column is the image of one basis element).

Subspaces are held in echelon form with pivot = smallest coordinate.  Reducing
a vector eliminates every pivot coordinate, which gives a canonical remainder
independent of how the subspace was spanned.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from typing import Iterable

from .scalars import FieldSpec, Scalar


def _axpy(field: FieldSpec, y: dict, a, x: dict) -> None:
    """y += a * x in place."""
    p = field.p
    for k, v in x.items():
        t = y.get(k, 0) + a * v
        if p:
            t %= p
        if t:
            y[k] = t
        else:
            y.pop(k, None)


def _scaled(field: FieldSpec, a, x: dict) -> dict:
    p = field.p
    if p:
        return {k: a * v % p for k, v in x.items() if a * v % p}
    return {k: a * v for k, v in x.items()} if a else {}


def clean(field: FieldSpec, vec: dict) -> dict:
    """Coerce values into the field and drop zeros."""
    out = {}
    for k, v in vec.items():
        v = field.coerce(v)
        if v:
            out[k] = v
    return out


class LinalgError(ValueError):
    pass


class Matrix:
    """Sparse exact matrix stored by columns."""

    def __init__(self, field: FieldSpec, rows: int, cols: int, columns: list[dict] | None = None):
        self.field = field
        self.rows = rows
        self.cols = cols
        if columns is None:
            columns = [{} for _ in range(cols)]
        if len(columns) != cols:
            raise LinalgError(f"expected {cols} columns, got {len(columns)}")
        for c in columns:
            for k in c:
                if not 0 <= k < rows:
                    raise LinalgError(f"row index {k} out of range for {rows} rows")
        self.columns = columns

    @classmethod
    def from_dense(cls, field: FieldSpec, data: list[list], cols: int | None = None) -> "Matrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        columns = [{} for _ in range(cols)]
        for i, row in enumerate(data):
            if len(row) != cols:
                raise LinalgError("ragged dense matrix")
            for j, x in enumerate(row):
                v = field.coerce(x)
                if v:
                    columns[j][i] = v
        return cls(field, rows, cols, columns)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls(field, n, n, [{j: field.one} for j in range(n)])

    @classmethod
    def zero(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols)

    def to_dense(self) -> list[list]:
        out = [[self.field.zero] * self.cols for _ in range(self.rows)]
        for j, c in enumerate(self.columns):
            for i, v in c.items():
                out[i][j] = v
        return out

    @property
    def entries(self) -> list[Scalar]:
        """Row-major list of all entries as Scalars."""
        return [Scalar(self.field, v) for row in self.to_dense() for v in row]

    def entry(self, i: int, j: int):
        return self.columns[j].get(i, self.field.zero)

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for j, a in vec.items():
            _axpy(self.field, out, a, self.columns[j])
        return out

    def _same_shape(self, other: "Matrix"):
        if self.field != other.field:
            raise LinalgError("matrices over different fields")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise LinalgError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        cols = []
        for a, b in zip(self.columns, other.columns):
            c = dict(a)
            _axpy(self.field, c, self.field.one, b)
            cols.append(c)
        return Matrix(self.field, self.rows, self.cols, cols)

    def __neg__(self) -> "Matrix":
        m1 = self.field.neg(self.field.one)
        return Matrix(self.field, self.rows, self.cols, [_scaled(self.field, m1, c) for c in self.columns])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, a) -> "Matrix":
        a = self.field.coerce(a)
        return Matrix(self.field, self.rows, self.cols, [_scaled(self.field, a, c) for c in self.columns])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.field != other.field:
            raise LinalgError("matrices over different fields")
        if self.cols != other.rows:
            raise LinalgError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        return Matrix(self.field, self.rows, other.cols, [self.apply(c) for c in other.columns])

    def transpose(self) -> "Matrix":
        cols = [{} for _ in range(self.rows)]
        for j, c in enumerate(self.columns):
            for i, v in c.items():
                cols[i][j] = v
        return Matrix(self.field, self.cols, self.rows, cols)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def nonzero_column(self) -> int | None:
        for j, c in enumerate(self.columns):
            if c:
                return j
        return None

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.field, self.rows, self.cols, self.columns) == (
            other.field, other.rows, other.cols, other.columns)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} over {self.field})"


class Subspace:
    """A subspace of ``field^ambient_dim`` in echelon form.

    ``rows`` maps each pivot coordinate to a basis vector whose smallest
    coordinate is that pivot, with coefficient 1 there.
    """

    def __init__(self, field: FieldSpec, ambient_dim: int | None):
        self.field = field
        self.ambient_dim = ambient_dim
        self.rows: dict[int, dict] = {}
        self._rref = False

    @classmethod
    def span(cls, field: FieldSpec, ambient_dim: int, vectors: Iterable[dict]) -> "Subspace":
        s = cls(field, ambient_dim)
        for v in vectors:
            s.add(v)
        return s

    @classmethod
    def full(cls, field: FieldSpec, ambient_dim: int) -> "Subspace":
        s = cls(field, ambient_dim)
        s.rows = {i: {i: field.one} for i in range(ambient_dim)}
        s._rref = True
        return s

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        """Canonical remainder of ``vec`` modulo this subspace."""
        v = dict(vec)
        rows = self.rows
        heap = [k for k in v if k in rows]
        heapq.heapify(heap)
        while heap:
            k = heapq.heappop(heap)
            a = v.get(k)
            if not a:
                continue
            row = rows[k]
            p = self.field.p
            for kk, x in row.items():
                t = v.get(kk, 0) - a * x
                if p:
                    t %= p
                if t:
                    if kk not in v and kk in rows:
                        heapq.heappush(heap, kk)
                    v[kk] = t
                else:
                    v.pop(kk, None)
        return v

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def add(self, vec: dict) -> bool:
        """Insert ``vec``; returns True if the dimension grew."""
        v = self.reduce(vec)
        if not v:
            return False
        lead = min(v)
        if self.ambient_dim is not None and not 0 <= lead < self.ambient_dim:
            raise LinalgError(f"coordinate {lead} outside ambient dimension {self.ambient_dim}")
        inv = self.field.inv(v[lead])
        self.rows[lead] = _scaled(self.field, inv, v)
        self._rref = False
        return True

    def rref(self) -> "Subspace":
        """Back-substitute so every basis vector vanishes at the other pivots."""
        if not self._rref:
            done: dict[int, dict] = {}
            for k in sorted(self.rows, reverse=True):
                row = dict(self.rows[k])
                for piv in [c for c in row if c != k and c in done]:
                    a = row.get(piv)
                    if a:
                        _axpy(self.field, row, self.field.neg(a), done[piv])
                done[k] = row
            self.rows = {k: done[k] for k in sorted(done)}
            self._rref = True
        return self

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    @property
    def basis(self) -> list[dict]:
        """Reduced echelon basis, ordered by pivot."""
        self.rref()
        return [self.rows[k] for k in self.pivots]

    def dense_basis(self) -> list[list]:
        out = []
        for b in self.basis:
            row = [self.field.zero] * self.ambient_dim
            for k, v in b.items():
                row[k] = v
            out.append(row)
        return out

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.field == other.field and self.ambient_dim == other.ambient_dim
                and self.basis == other.basis)

    def __repr__(self):
        return f"Subspace(dim {self.dim} in {self.ambient_dim} over {self.field})"


def rank(M: Matrix) -> int:
    """Rank by sparse elimination, pivoting on the sparsest available row."""
    field = M.field
    p = field.p
    rowcount: dict[int, int] = defaultdict(int)
    for c in M.columns:
        for k in c:
            rowcount[k] += 1
    pivots: dict[int, dict] = {}
    for c in sorted(M.columns, key=len):
        c = dict(c)
        while True:
            hits = [k for k in c if k in pivots]
            if not hits:
                break
            for k in hits:
                a = c.pop(k, None)
                if a is None:
                    continue
                for kk, x in pivots[k].items():
                    if kk == k:
                        continue
                    t = c.get(kk, 0) - a * x
                    if p:
                        t %= p
                    if t:
                        c[kk] = t
                    else:
                        c.pop(kk, None)
        if not c:
            continue
        k = min(c, key=lambda t: (rowcount[t], t))
        pivots[k] = _scaled(field, field.inv(c[k]), c)
    return len(pivots)


def image_basis(M: Matrix) -> Subspace:
    return Subspace.span(M.field, M.rows, M.columns)


def kernel_basis(M: Matrix) -> Subspace:
    """Basis of {v : Mv = 0} as a Subspace of field^cols."""
    field = M.field
    pivots: dict[int, tuple[dict, dict]] = {}
    kern = []
    for j in range(M.cols - 1, -1, -1):
        v = dict(M.columns[j])
        comb = {j: field.one}
        while v:
            k = next((k for k in v if k in pivots), None)
            if k is None:
                break
            a = field.neg(v[k])
            pv, pc = pivots[k]
            _axpy(field, v, a, pv)
            _axpy(field, comb, a, pc)
        if v:
            k = min(v)
            inv = field.inv(v[k])
            pivots[k] = (_scaled(field, inv, v), _scaled(field, inv, comb))
        else:
            kern.append(comb)
    return Subspace.span(field, M.cols, kern)


def solve(M: Matrix, b: dict) -> dict | None:
    """Some x with Mx = b, or None when b is outside the image."""
    field = M.field
    pivots: dict[int, tuple[dict, dict]] = {}
    for j, col in enumerate(M.columns):
        v = dict(col)
        comb = {j: field.one}
        while v:
            k = next((k for k in v if k in pivots), None)
            if k is None:
                break
            a = field.neg(v[k])
            pv, pc = pivots[k]
            _axpy(field, v, a, pv)
            _axpy(field, comb, a, pc)
        if v:
            k = min(v)
            inv = field.inv(v[k])
            pivots[k] = (_scaled(field, inv, v), _scaled(field, inv, comb))
    v = dict(b)
    x: dict = {}
    while v:
        k = next((k for k in v if k in pivots), None)
        if k is None:
            return None
        a = v[k]
        pv, pc = pivots[k]
        _axpy(field, v, field.neg(a), pv)
        _axpy(field, x, a, pc)
    return x


def quotient_basis(W: Subspace, V: Subspace) -> Subspace:
    """Canonical representatives of a basis of W/V.

    The returned vectors are reduced modulo V, so they span a complement of
    V inside W.
    """
    if W.field != V.field or W.ambient_dim != V.ambient_dim:
        raise LinalgError("subspaces live in different ambient spaces")
    for v in V.basis:
        if not W.contains(v):
            raise LinalgError(f"V is not contained in W; witness {dict(sorted(v.items()))}")
    Q = Subspace.span(W.field, W.ambient_dim, (V.reduce(w) for w in W.basis))
    if Q.dim != W.dim - V.dim:
        raise LinalgError("quotient dimension mismatch")
    return Q
