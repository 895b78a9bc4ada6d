"""The small complex A(0)⊗U -> A(1)⊗U -> A(2)⊗U and its homology.

Here A = H^*(M) = k ⊕ span(x_i) ⊕ k·M and the differential is the graded
commutator with kappa = sum x_i ⊗ u_i.  In closed form

    d1(xi)         = ([u_1, xi], ..., [u_r, xi])
    d0(zeta_1..r)  = sum_{i,j} (-1)^{|x_i|} c_ij [u_j, zeta_i]

Chain coordinates: column 0 and column 2 at weight w use the basis index of
U(w); column 1 at weight w uses ``i * dim U(w) + k`` for the slot x_i and
basis word k.

H_{i,w} denotes homology at A(i)⊗U(w).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .algebra import AlgebraElement, LoopAlgebra, letter_commutator, loop_algebra, word_str
from .linalg import Matrix, Subspace, _axpy, image_basis, kernel_basis, quotient_basis, rank
from .manifold import ManifoldData


class ComplexError(RuntimeError):
    pass


@dataclass
class SmallComplexSlice:
    """d1: U(w) -> A(1)⊗U(w+1) and d0: A(1)⊗U(w+1) -> U(w+2)."""

    w: int
    d1: Matrix
    d0: Matrix


class SmallComplex:
    """Differentials and homology for one manifold, cached by weight."""

    def __init__(self, m: ManifoldData):
        self.manifold = m
        self.algebra: LoopAlgebra = loop_algebra(m)
        self.field = m.field
        self.r = m.r
        self._d1: dict[int, Matrix] = {}
        self._d0: dict[int, Matrix] = {}
        self._spaces: dict = {}
        self._dims: dict = {}
        self._lock = threading.RLock()

    # chain coordinates

    def chain_dim(self, column: int, w: int) -> int:
        if w < 0:
            return 0
        n = self.algebra.dim(w)
        return self.r * n if column == 1 else n

    def split(self, w: int, vec: dict) -> list[dict]:
        """Column-1 coordinates -> per-slot {basis index: value}."""
        n = self.algebra.dim(w)
        slots = [{} for _ in range(self.r)]
        for k, v in vec.items():
            slots[k // n][k % n] = v
        return slots

    def join(self, w: int, slots: list[dict]) -> dict:
        n = self.algebra.dim(w)
        return {i * n + k: v for i, s in enumerate(slots) for k, v in s.items()}

    def loop_degree(self, column: int, w: int, vec: dict) -> int | None:
        """Loop-space degree of a homogeneous chain (None for zero)."""
        if not vec:
            return None
        m = self.manifold
        comp = self.algebra.component(w)
        degs = set()
        for k in vec:
            if column == 1:
                i, b = divmod(k, comp.dim)
                degs.add(self.algebra.degree(comp.basis_words[b]) - m.degrees[i] + m.d)
            elif column == 0:
                degs.add(self.algebra.degree(comp.basis_words[k]) + m.d)
            else:
                degs.add(self.algebra.degree(comp.basis_words[k]))
        if len(degs) != 1:
            raise ComplexError(f"inhomogeneous chain in column {column}, weight {w}")
        return degs.pop()

    # differentials

    def d1(self, w: int) -> Matrix:
        """U(w) -> A(1)⊗U(w+1)."""
        if w not in self._d1:
            alg = self.algebra
            src = alg.component(w)
            tgt = alg.component(w + 1)
            cols = []
            for xi in src.basis_words:
                col: dict = {}
                for i in range(self.r):
                    for wd, v in letter_commutator(alg, i, xi).items():
                        col[i * tgt.dim + tgt.index[wd]] = v
                cols.append(col)
            self._d1[w] = Matrix(self.field, self.r * tgt.dim, src.dim, cols)
        return self._d1[w]

    def d0(self, w: int) -> Matrix:
        """A(1)⊗U(w) -> U(w+1)."""
        if w not in self._d0:
            m = self.manifold
            f = self.field
            alg = self.algebra
            src = alg.component(w)
            tgt = alg.component(w + 1)
            coef = [[f.reduce(f.sign(m.degrees[i]) * m.c(i, j)) for j in range(self.r)]
                    for i in range(self.r)]
            cols = []
            for i in range(self.r):
                for zeta in src.basis_words:
                    col: dict = {}
                    for j in range(self.r):
                        if coef[i][j]:
                            _axpy(f, col, coef[i][j], tgt.coords(letter_commutator(alg, j, zeta)))
                    cols.append(col)
            self._d0[w] = Matrix(self.field, tgt.dim, self.r * src.dim, cols)
        return self._d0[w]

    def build_slice(self, w: int) -> SmallComplexSlice:
        d1 = self.d1(w)
        d0 = self.d0(w + 1)
        comp = d0 @ d1
        bad = comp.nonzero_column()
        if bad is not None:
            raise ComplexError(
                f"d0·d1 != 0 at weight {w}: column {word_str(self.algebra.component(w).basis_words[bad])}")
        return SmallComplexSlice(w, d1, d0)

    # homology

    def dimension(self, column: int, w: int) -> int:
        """dim H_{column,w} by rank counting."""
        key = (column, w)
        if key not in self._dims:
            if key in self._spaces:
                self._dims[key] = self._spaces[key].dim
            elif column == 0:
                self._dims[key] = self.chain_dim(0, w) - rank(self.d1(w))
            elif column == 1:
                rk_in = rank(self.d1(w - 1)) if w >= 1 else 0
                self._dims[key] = self.chain_dim(1, w) - rank(self.d0(w)) - rk_in
            elif column == 2:
                rk_in = rank(self.d0(w - 1)) if w >= 1 else 0
                self._dims[key] = self.chain_dim(2, w) - rk_in
            else:
                raise ValueError(f"column must be 0, 1 or 2, got {column}")
        return self._dims[key]

    def space(self, column: int, w: int) -> "HomologySpace":
        key = (column, w)
        with self._lock:
            if key not in self._spaces:
                self._spaces[key] = self._build_space(column, w)
        return self._spaces[key]

    def _build_space(self, column: int, w: int) -> "HomologySpace":
        n = self.chain_dim(column, w)
        f = self.field
        if column == 0:
            cycles = kernel_basis(self.d1(w))
            bounds = Subspace(f, n)
        elif column == 1:
            cycles = kernel_basis(self.d0(w))
            bounds = image_basis(self.d1(w - 1)) if w >= 1 else Subspace(f, n)
        elif column == 2:
            cycles = Subspace.full(f, n)
            bounds = image_basis(self.d0(w - 1)) if w >= 1 else Subspace(f, n)
        else:
            raise ValueError(f"column must be 0, 1 or 2, got {column}")
        reps = quotient_basis(cycles, bounds)
        return HomologySpace(self, column, w, cycles, bounds, reps)

    def is_cycle(self, column: int, w: int, vec: dict) -> bool:
        if column == 0:
            return not self.d1(w).apply(vec)
        if column == 1:
            return not self.d0(w).apply(vec)
        return True

    def kappa(self) -> "HomologyClass":
        """The class (u_1, ..., u_r) in H_{1,1}."""
        comp = self.algebra.component(1)
        one = self.field.one
        vec = {i * comp.dim + comp.index[(i,)]: one for i in range(self.r)}
        return self.space(1, 1).make(vec)

    def unit(self) -> "HomologyClass":
        return self.space(0, 0).make({0: self.field.one})

    def cyclic_word(self, word) -> "HomologyClass":
        """Class of M ⊗ (word) in H_2; letters are 0-based, any word is reduced first."""
        w = len(word)
        comp = self.algebra.component(w)
        return self.space(2, w).make(comp.coords(self.algebra.normal_form(tuple(word))))


class HomologySpace:
    """H_{column,w} = cycles / boundaries with canonical representatives."""

    def __init__(self, cx: SmallComplex, column: int, w: int,
                 cycles: Subspace, boundaries: Subspace, reps: Subspace):
        self.complex = cx
        self.column = column
        self.w = w
        self.cycles = cycles
        self.boundaries = boundaries
        self.reps = reps.rref()
        self.pivots = self.reps.pivots

    @property
    def dim(self) -> int:
        return self.reps.dim

    def canonical(self, vec: dict) -> dict:
        return self.boundaries.reduce(vec)

    def coordinates(self, vec: dict) -> dict:
        """Coefficients of the class of ``vec`` in the basis of classes."""
        c = self.canonical(vec)
        out = {}
        for k, p in enumerate(self.pivots):
            if p in c:
                out[k] = c[p]
        return out

    def make(self, vec: dict, check: bool = True) -> "HomologyClass":
        if check and not self.complex.is_cycle(self.column, self.w, vec):
            raise ComplexError(f"not a cycle in column {self.column}, weight {self.w}")
        c = self.canonical(vec)
        deg = self.complex.loop_degree(self.column, self.w, c)
        return HomologyClass(self.complex, self.column, self.w, c, deg)

    def classes(self) -> list["HomologyClass"]:
        return [self.make(b, check=False) for b in self.reps.basis]


class HomologyClass:
    """A class of H_{column,w}, stored as its canonical representative."""

    __slots__ = ("complex", "column", "weight", "vector", "loop_degree")

    def __init__(self, cx: SmallComplex, column: int, weight: int, vector: dict, loop_degree: int | None):
        self.complex = cx
        self.column = column
        self.weight = weight
        self.vector = vector
        self.loop_degree = loop_degree

    @property
    def representative(self) -> tuple[AlgebraElement, ...]:
        alg = self.complex.algebra
        comp = alg.component(self.weight)
        if self.column == 1:
            slots = self.complex.split(self.weight, self.vector)
            return tuple(AlgebraElement(alg, self.weight, comp.from_coords(s)) for s in slots)
        return (AlgebraElement(alg, self.weight, comp.from_coords(self.vector)),)

    def is_zero(self) -> bool:
        return not self.vector

    @property
    def degree(self) -> int:
        """Loop degree shifted down by d, the grading of the product."""
        return self.loop_degree - self.complex.manifold.d

    def space(self) -> HomologySpace:
        return self.complex.space(self.column, self.weight)

    def _combine(self, other: "HomologyClass", a) -> "HomologyClass":
        if other.complex is not self.complex:
            raise ValueError("classes of different manifolds")
        if other.is_zero():
            return self
        if self.is_zero():
            return other.scale(a)
        if (other.column, other.weight) != (self.column, self.weight):
            raise ValueError("adding classes from different homology groups")
        if other.loop_degree != self.loop_degree:
            raise ValueError("adding classes of different degrees")
        v = dict(self.vector)
        _axpy(self.complex.field, v, a, other.vector)
        return self.space().make(v, check=False)

    def __add__(self, other):
        return self._combine(other, self.complex.field.one)

    def __sub__(self, other):
        return self._combine(other, self.complex.field.neg(self.complex.field.one))

    def scale(self, a) -> "HomologyClass":
        f = self.complex.field
        a = f.coerce(a)
        v: dict = {}
        _axpy(f, v, a, self.vector)
        if not v:
            return zero_class(self.complex, self.column, self.weight)
        return HomologyClass(self.complex, self.column, self.weight, v, self.loop_degree)

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, HomologyClass):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return (self.complex is other.complex and self.column == other.column
                and self.weight == other.weight and self.vector == other.vector)

    def __hash__(self):
        return hash((self.column, self.weight, tuple(sorted(self.vector.items()))))

    def label(self) -> str:
        rep = self.representative
        if self.column == 1:
            parts = [f"x{i + 1}⊗({e})" for i, e in enumerate(rep) if not e.is_zero()]
            body = " + ".join(parts) or "0"
        elif self.column == 2:
            body = f"M⊗({rep[0]})"
        else:
            body = f"1⊗({rep[0]})"
        return f"H[{self.column},{self.weight}] deg {self.loop_degree}: {body}"

    def __repr__(self):
        return self.label()


def zero_class(cx: SmallComplex, column: int, w: int) -> HomologyClass:
    return HomologyClass(cx, column, w, {}, None)


_COMPLEXES: dict = {}
_COMPLEXES_LOCK = threading.Lock()


def small_complex(m: ManifoldData) -> SmallComplex:
    key = m.key()
    with _COMPLEXES_LOCK:
        cx = _COMPLEXES.get(key)
        if cx is None:
            cx = _COMPLEXES[key] = SmallComplex(m)
    return cx


def build_slice(m: ManifoldData, w: int) -> SmallComplexSlice:
    return small_complex(m).build_slice(w)


def homology(m: ManifoldData, column: int, w: int) -> tuple[list[HomologyClass], int]:
    sp = small_complex(m).space(column, w)
    return sp.classes(), sp.dim


def completeness_bound(m: ManifoldData, max_w: int) -> int:
    """Loop degrees strictly below this are unaffected by weights > max_w.

    A class of U-weight w has loop degree at least w*min|u_i| (column 2),
    w*min|u_i| + d - max|x_i| (column 1) or w*min|u_i| + d (column 0).
    """
    umin = min(m.u_degrees)
    w = max_w + 1
    return min(w * umin, w * umin + m.d - max(m.degrees), w * umin + m.d)


@dataclass
class BettiTable:
    dims: dict[int, int]
    complete_below: int
    max_weight: int

    def rows(self) -> list[tuple[int, int, bool]]:
        return [(k, self.dims[k], k < self.complete_below) for k in sorted(self.dims)]

    def complete_rows(self) -> list[tuple[int, int]]:
        return [(k, v) for k, v, ok in self.rows() if ok]


def graded_dimensions(cx: SmallComplex, column: int, w: int) -> dict[int, int]:
    """dim H_{column,w} split by loop degree (one entry when degrees are equal)."""
    m = cx.manifold
    if len(set(m.degrees)) == 1:
        dim = cx.dimension(column, w)
        if not dim:
            return {}
        deg = w * m.u_degrees[0]
        shift = {0: m.d, 1: m.d - m.degrees[0], 2: 0}[column]
        return {deg + shift: dim}
    out: dict[int, int] = {}
    for c in cx.space(column, w).classes():
        out[c.loop_degree] = out.get(c.loop_degree, 0) + 1
    return out


def betti_table(m: ManifoldData, max_w: int) -> BettiTable:
    """Betti numbers of the free loop space from all H_{i,w} with w <= max_w."""
    cx = small_complex(m)
    dims: dict[int, int] = {}
    for w in range(max_w + 1):
        for column in (0, 1, 2):
            for deg, k in graded_dimensions(cx, column, w).items():
                dims[deg] = dims.get(deg, 0) + k
    bound = completeness_bound(m, max_w)
    return BettiTable(dims, bound, max_w)


# A ⊗ U as a dga, used to check the closed-form differentials.
# A basis labels: 0 is the unit, 1..r are x_1..x_r, r+1 is M.

def _a_degree(m: ManifoldData, a: int) -> int:
    if a == 0:
        return 0
    if a == m.r + 1:
        return m.d
    return m.degrees[a - 1]


def _a_product(m: ManifoldData, a: int, b: int):
    f = m.field
    if a == 0:
        return b, f.one
    if b == 0:
        return a, f.one
    if a <= m.r and b <= m.r:
        c = m.c(a - 1, b - 1)
        return (m.r + 1, c) if c else None
    return None


def tensor_multiply(m: ManifoldData, s: dict, t: dict) -> dict:
    """(a⊗xi)(b⊗eta) = (-1)^{|xi||b|} ab ⊗ xi·eta on {(a, word): coeff}."""
    f = m.field
    alg = loop_algebra(m)
    out: dict = {}
    for (a, x), u in s.items():
        for (b, y), v in t.items():
            ab = _a_product(m, a, b)
            if ab is None:
                continue
            lab, c = ab
            coeff = f.reduce(u * v * c * f.sign(alg.degree(x) * _a_degree(m, b)))
            for wd, z in alg.mul_words(x, y).items():
                _axpy(f, out, coeff, {(lab, wd): z})
    return out


def tensor_degree(m: ManifoldData, a: int, word) -> int:
    return loop_algebra(m).degree(word) - _a_degree(m, a)


def kappa_tensor(m: ManifoldData) -> dict:
    f = m.field
    return {(i + 1, (i,)): f.one for i in range(m.r)}


def kappa_bracket(m: ManifoldData, t: dict) -> dict:
    """[kappa, t] for a homogeneous t in A ⊗ U; kappa has degree -1."""
    f = m.field
    k = kappa_tensor(m)
    if not t:
        return {}
    degs = {tensor_degree(m, a, wd) for a, wd in t}
    if len(degs) != 1:
        raise ComplexError("kappa_bracket needs a homogeneous element")
    out = tensor_multiply(m, k, t)
    _axpy(f, out, f.sign(degs.pop() + 1), tensor_multiply(m, t, k))
    return out
