"""The loop homology algebra U = k<u_1..u_r>/(omega), one weight at a time.

Weight w of U is V^{⊗w}/R(w) with R(w) = R(w-1)⊗V + V^{⊗(w-2)}⊗omega.  We
build it incrementally: prefix-normal words (a normal word of weight w-1
followed by any letter) span V^{⊗w}/(R(w-1)⊗V), and the remaining relations
are b·omega for the normal words b of weight w-2.  Putting those relations in
reduced echelon form with the lexicographically smallest word as pivot gives
rewriting rules ``pivot -> tail``; the normal words of weight w are the
prefix-normal words that are not pivots.  Because lexicographic order weighs
the first letter most, this is the same basis one gets by a reduced echelon
form of the full relation space R(w) with lex pivots.

Words are tuples of 0-based letter indices; they print as ``u1u2...``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field as dc_field
from itertools import product

from .linalg import Subspace, _axpy, quotient_basis
from .manifold import ManifoldData
from .scalars import FieldSpec

Word = tuple


def word_str(word: Word) -> str:
    return "".join(f"u{a + 1}" for a in word) if word else "1"


def relation_coefficients(m: ManifoldData) -> dict[tuple[int, int], object]:
    """omega = sum (-1)^{|x_i|} c_ji u_i u_j as {(i, j): coefficient}."""
    f = m.field
    out = {}
    for i in range(m.r):
        for j in range(m.r):
            v = f.reduce(f.sign(m.degrees[i]) * m.c(j, i))
            if v:
                out[(i, j)] = v
    return out


@dataclass
class WeightComponent:
    """Basis and rewriting rules for U(w)."""

    algebra: "LoopAlgebra"
    w: int
    basis_words: list[Word]
    rules: dict[Word, dict]
    index: dict[Word, int] = dc_field(default_factory=dict)
    _relations: Subspace | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        self.index = {b: k for k, b in enumerate(self.basis_words)}

    @property
    def dim(self) -> int:
        return len(self.basis_words)

    @property
    def free_dim(self) -> int:
        return self.algebra.r ** self.w

    def reduce_word(self, word: Word) -> dict:
        """Normal form of an arbitrary word of this weight."""
        if len(word) != self.w:
            raise ValueError(f"word of length {len(word)} in weight {self.w}")
        return self.algebra.normal_form(word)

    def reduce(self, vec: dict) -> dict:
        """Project a combination of arbitrary words onto span(basis_words)."""
        out: dict = {}
        for word, a in vec.items():
            _axpy(self.algebra.field, out, a, self.reduce_word(word))
        return out

    def coords(self, vec: dict) -> dict:
        """Normal-form combination -> {basis index: value}."""
        return {self.index[wd]: v for wd, v in vec.items()}

    def from_coords(self, vec: dict) -> dict:
        return {self.basis_words[k]: v for k, v in vec.items()}

    @property
    def relation_subspace(self) -> Subspace:
        """R(w) inside V^{⊗w}, spanned by all shifted copies of omega.

        Coordinates are words.  Built directly from the definition, so it is
        an independent check on the incremental rewriting rules.
        """
        if self._relations is None:
            alg = self.algebra
            f = alg.field
            S = Subspace(f, None)
            for k in range(self.w - 1):
                for left in product(range(alg.r), repeat=k):
                    for right in product(range(alg.r), repeat=self.w - 2 - k):
                        S.add({left + (i, j) + right: v for (i, j), v in alg.omega.items()})
            self._relations = S.rref()
        return self._relations


class LoopAlgebra:
    """U for one validated manifold; weights are computed on demand and cached."""

    def __init__(self, m: ManifoldData):
        self.manifold = m
        self.field: FieldSpec = m.field
        self.r = m.r
        self.u_degrees = m.u_degrees
        self.omega = relation_coefficients(m)
        self._components: list[WeightComponent] = []
        self._lmul_memo: dict = {}
        self._lock = threading.RLock()

    def degree(self, word: Word) -> int:
        return sum(self.u_degrees[a] for a in word)

    def component(self, w: int) -> WeightComponent:
        if w < 0:
            raise ValueError("negative weight")
        if w >= len(self._components):
            with self._lock:
                while len(self._components) <= w:
                    self._components.append(self._build_next())
        return self._components[w]

    def dim(self, w: int) -> int:
        return self.component(w).dim if w >= 0 else 0

    def _build_next(self) -> WeightComponent:
        w = len(self._components)
        f = self.field
        if w == 0:
            return WeightComponent(self, 0, [()], {})
        prev = self._components[w - 1]
        rules: dict = {}
        if w >= 2:
            prev_rules = prev.rules
            S = Subspace(f, None)
            for b in self._components[w - 2].basis_words:
                row: dict = {}
                for (i, j), co in self.omega.items():
                    pre = b + (i,)
                    tail = prev_rules.get(pre)
                    if tail is None:
                        _axpy(f, row, co, {pre + (j,): f.one})
                    else:
                        _axpy(f, row, co, {wd + (j,): v for wd, v in tail.items()})
                S.add(row)
            for lead, row in S.rref().rows.items():
                rules[lead] = {k: f.neg(v) for k, v in row.items() if k != lead}
        basis = [b + (a,) for b in prev.basis_words for a in range(self.r) if b + (a,) not in rules]
        return WeightComponent(self, w, basis, rules)

    # rewriting

    def rmul_letter(self, vec: dict, a: int) -> dict:
        """(normal-form combination) · u_a, in normal form."""
        f = self.field
        out: dict = {}
        if not vec:
            return out
        w = len(next(iter(vec))) + 1
        rules = self.component(w).rules
        for wd, v in vec.items():
            nw = wd + (a,)
            tail = rules.get(nw)
            if tail is None:
                _axpy(f, out, v, {nw: f.one})
            else:
                _axpy(f, out, v, tail)
        return out

    def normal_form(self, word: Word) -> dict:
        vec = {(): self.field.one}
        for a in word:
            vec = self.rmul_letter(vec, a)
        return vec

    def lmul_letter(self, a: int, word: Word) -> dict:
        """u_a · (normal word), memoized through prefixes."""
        key = (a, word)
        out = self._lmul_memo.get(key)
        if out is None:
            if not word:
                out = {(a,): self.field.one}
            else:
                out = self.rmul_letter(self.lmul_letter(a, word[:-1]), word[-1])
            self._lmul_memo[key] = out
        return out

    def mul_words(self, x: Word, y: Word) -> dict:
        vec = {x: self.field.one}
        for a in y:
            vec = self.rmul_letter(vec, a)
        return vec

    def element(self, terms: dict, weight: int | None = None) -> "AlgebraElement":
        """Element from {word: scalar}; words are reduced to normal form."""
        f = self.field
        out: dict = {}
        for wd, a in terms.items():
            wd = tuple(wd)
            _axpy(f, out, f.coerce(a), self.normal_form(wd))
            if weight is None:
                weight = len(wd)
        return AlgebraElement(self, 0 if weight is None else weight, out)

    def word(self, *letters: int) -> "AlgebraElement":
        """Element u_{l1}...u_{lk}, letters 1-based."""
        return self.element({tuple(a - 1 for a in letters): 1}, len(letters))

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, 0, {(): self.field.one})

    def basis_element(self, w: int, k: int) -> "AlgebraElement":
        return AlgebraElement(self, w, {self.component(w).basis_words[k]: self.field.one})


class AlgebraElement:
    """Homogeneous element of U in normal form."""

    __slots__ = ("algebra", "weight", "terms", "degree")

    def __init__(self, algebra: LoopAlgebra, weight: int, terms: dict):
        self.algebra = algebra
        self.weight = weight
        self.terms = {k: v for k, v in terms.items() if v}
        degs = {algebra.degree(k) for k in self.terms}
        if any(len(k) != weight for k in self.terms):
            raise ValueError("inhomogeneous weight")
        if len(degs) > 1:
            raise ValueError("inhomogeneous degree")
        self.degree = degs.pop() if degs else None

    def _check(self, other: "AlgebraElement"):
        if other.algebra is not self.algebra:
            raise ValueError("elements of different algebras")

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.weight != self.weight:
            raise ValueError("adding elements of different weights")
        out = dict(self.terms)
        _axpy(self.algebra.field, out, self.algebra.field.one, other.terms)
        return AlgebraElement(self.algebra, self.weight, out)

    def scale(self, a) -> "AlgebraElement":
        f = self.algebra.field
        a = f.coerce(a)
        out: dict = {}
        _axpy(f, out, a, self.terms)
        return AlgebraElement(self.algebra, self.weight, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.algebra is other.algebra and self.weight == other.weight and self.terms == other.terms

    def __repr__(self):
        return f"AlgebraElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*{word_str(k)}" for k, v in sorted(self.terms.items()))


_ALGEBRAS: dict = {}
_ALGEBRAS_LOCK = threading.Lock()


def loop_algebra(m: ManifoldData) -> LoopAlgebra:
    """Shared LoopAlgebra for a validated manifold."""
    key = m.key()
    with _ALGEBRAS_LOCK:
        alg = _ALGEBRAS.get(key)
        if alg is None:
            alg = _ALGEBRAS[key] = LoopAlgebra(m)
    return alg


def relation_omega(m: ManifoldData) -> AlgebraElement:
    """omega as a weight-2 element of the free algebra (not reduced)."""
    alg = loop_algebra(m)
    return AlgebraElement(alg, 2, relation_coefficients(m))


def weight_component(m: ManifoldData, w: int) -> WeightComponent:
    return loop_algebra(m).component(w)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    alg = a.algebra
    f = alg.field
    out: dict = {}
    for y, bv in b.terms.items():
        for x, av in a.terms.items():
            _axpy(f, out, f.reduce(av * bv), alg.mul_words(x, y))
    return AlgebraElement(alg, a.weight + b.weight, out)


def commutator(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """[a, b] = ab - (-1)^{|a||b|} ba."""
    if a.is_zero() or b.is_zero():
        return AlgebraElement(a.algebra, a.weight + b.weight, {})
    s = a.algebra.field.sign(a.degree * b.degree + 1)
    return multiply(a, b) + multiply(b, a).scale(s)


def letter_commutator(alg: LoopAlgebra, i: int, word: Word) -> dict:
    """[u_i, word] for a normal word, as a normal-form combination."""
    f = alg.field
    out = dict(alg.lmul_letter(i, word))
    s = f.sign(alg.u_degrees[i] * alg.degree(word) + 1)
    _axpy(f, out, s, alg.rmul_letter({word: f.one}, i))
    return out


def commutator_subspace(m: ManifoldData, w: int) -> Subspace:
    """[U, U] ∩ U(w) in basis coordinates, spanned by the [u_i, y]."""
    alg = loop_algebra(m)
    comp = alg.component(w)
    S = Subspace(alg.field, comp.dim)
    if w >= 1:
        for y in alg.component(w - 1).basis_words:
            for i in range(alg.r):
                S.add(comp.coords(letter_commutator(alg, i, y)))
    return S


def full_commutator_subspace(m: ManifoldData, w: int) -> Subspace:
    """Span of [x, y] over all pairs of basis words with weights summing to w."""
    alg = loop_algebra(m)
    comp = alg.component(w)
    S = Subspace(alg.field, comp.dim)
    for k in range(w + 1):
        for x in alg.component(k).basis_words:
            for y in alg.component(w - k).basis_words:
                c = commutator(AlgebraElement(alg, k, {x: alg.field.one}),
                               AlgebraElement(alg, w - k, {y: alg.field.one}))
                S.add(comp.coords(c.terms))
    return S


def cyclic_quotient(m: ManifoldData, w: int) -> Subspace:
    """Representatives of U(w)/([U,U] ∩ U(w)) in basis coordinates."""
    comp = weight_component(m, w)
    return quotient_basis(Subspace.full(m.field, comp.dim), commutator_subspace(m, w))
