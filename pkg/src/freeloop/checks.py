"""Exhaustive identity checks for the string-topology operations.

Products, brackets and Delta are evaluated once on pairs of basis classes and
cached as coordinate vectors; general elements are handled bilinearly.  Each
check returns a :class:`CheckResult` with the number of cases and the first
few failures as witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .algebra import _axpy
from .hochschild import SmallComplex, kappa_bracket
from .linalg import Matrix, rank
from .structure import (StructureError, bv_delta, delta_chain, delta_matrix, gerstenhaber_bracket,
                        loop_product, loop_product_eps)

MAX_WITNESSES = 5


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    failures: int = 0
    witnesses: list = dc_field(default_factory=list)
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def tick(self, ok: bool, witness=None):
        self.cases += 1
        if not ok:
            self.failures += 1
            if len(self.witnesses) < MAX_WITNESSES:
                self.witnesses.append(witness)

    def to_json(self) -> dict:
        out = {"name": self.name, "pass": self.passed, "cases": self.cases, "failures": self.failures}
        if self.witnesses:
            out["witnesses"] = self.witnesses
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class Elt:
    """A homogeneous element of some H_{col,w}, in class-basis coordinates."""

    col: int
    w: int
    deg: int | None
    vec: tuple  # sorted (index, value) pairs

    @property
    def is_zero(self) -> bool:
        return not self.vec


def _elt(col, w, deg, vec: dict) -> Elt:
    vec = {k: v for k, v in vec.items() if v}
    if not vec:
        return Elt(col, w, None, ())
    return Elt(col, w, deg, tuple(sorted(vec.items())))


class StructureTables:
    """Cached basis-pair products and brackets on H_{*,w} for w <= max_weight."""

    def __init__(self, cx: SmallComplex, max_weight: int, experimental: bool = False):
        self.cx = cx
        self.experimental = experimental
        self.field = cx.field
        self.max_weight = max_weight
        self.basis: dict[tuple[int, int], list] = {}
        for col in (0, 1, 2):
            for w in range(max_weight + 1):
                self.basis[(col, w)] = cx.space(col, w).classes()
        self._prod: dict = {}
        self._br: dict = {}
        self._delta: dict = {}

    def elements(self, max_weight: int | None = None) -> list[Elt]:
        top = self.max_weight if max_weight is None else max_weight
        out = []
        for (col, w), cl in sorted(self.basis.items()):
            if w <= top:
                out += [_elt(col, w, c.degree, {k: self.field.one}) for k, c in enumerate(cl)]
        return out

    def _coords(self, cls, col, w) -> dict:
        if cls.is_zero():
            return {}
        return self.cx.space(col, w).coordinates(cls.vector)

    def _class(self, col, w, k):
        return self.basis[(col, w)][k] if (col, w) in self.basis else self.cx.space(col, w).classes()[k]

    # basis-level operations

    def _basis_prod(self, ka, kb):
        if (ka, kb) not in self._prod:
            a, b = self._class(*ka), self._class(*kb)
            c = loop_product(a, b)
            col, w = ka[0] + kb[0], ka[1] + kb[1]
            self._prod[(ka, kb)] = self._coords(c, col, w) if col <= 2 else {}
        return self._prod[(ka, kb)]

    def _basis_br(self, ka, kb):
        if (ka, kb) not in self._br:
            a, b = self._class(*ka), self._class(*kb)
            c = gerstenhaber_bracket(a, b)
            self._br[(ka, kb)] = {} if c.is_zero() else self._coords(c, c.column, c.weight)
        return self._br[(ka, kb)]

    def _basis_delta(self, ka):
        if ka not in self._delta:
            c = bv_delta(self._class(*ka), self.experimental)
            self._delta[ka] = {} if c.is_zero() else self._coords(c, c.column, c.weight)
        return self._delta[ka]

    # bilinear extension

    def _bilinear(self, a: Elt, b: Elt, table, col, w, deg) -> Elt:
        if a.is_zero or b.is_zero or col is None or col > 2 or w < 0:
            return _elt(0, 0, None, {})
        f = self.field
        out: dict = {}
        for i, x in a.vec:
            for j, y in b.vec:
                _axpy(f, out, f.reduce(x * y), table((a.col, a.w, i), (b.col, b.w, j)))
        return _elt(col, w, deg, out)

    def prod(self, a: Elt, b: Elt) -> Elt:
        if a.is_zero or b.is_zero:
            return _elt(0, 0, None, {})
        return self._bilinear(a, b, self._basis_prod, a.col + b.col, a.w + b.w, a.deg + b.deg)

    def bracket(self, a: Elt, b: Elt) -> Elt:
        """{a,b} in the BV normalisation."""
        if a.is_zero or b.is_zero:
            return _elt(0, 0, None, {})
        cols = {(1, 1): 1, (1, 2): 2, (2, 1): 2}
        col = cols.get((a.col, b.col))
        return self._bilinear(a, b, self._basis_br, col, a.w + b.w - 1, a.deg + b.deg + 1)

    def sbracket(self, a: Elt, b: Elt) -> Elt:
        """(-1)^|a| {a,b}, the bracket with the usual Gerstenhaber signs."""
        if a.is_zero:
            return a
        return self.scale(self.bracket(a, b), self.field.sign(a.deg))

    def delta(self, a: Elt) -> Elt:
        if a.is_zero:
            return a
        f = self.field
        out: dict = {}
        for i, x in a.vec:
            _axpy(f, out, x, self._basis_delta((a.col, a.w, i)))
        if a.col == 2:
            return _elt(1, a.w - 1, a.deg + 1, out)
        if a.col == 1 and a.w == 1:
            return _elt(0, 0, a.deg + 1, out)
        return _elt(0, 0, None, {})

    def scale(self, a: Elt, s) -> Elt:
        f = self.field
        return _elt(a.col, a.w, a.deg, {k: f.reduce(v * s) for k, v in a.vec})

    def add(self, *terms: Elt) -> Elt:
        f = self.field
        nz = [t for t in terms if not t.is_zero]
        if not nz:
            return _elt(0, 0, None, {})
        shapes = {(t.col, t.w, t.deg) for t in nz}
        if len(shapes) != 1:
            raise StructureError(f"adding elements of different groups {sorted(shapes)}")
        out: dict = {}
        for t in nz:
            _axpy(f, out, f.one, dict(t.vec))
        col, w, deg = shapes.pop()
        return _elt(col, w, deg, out)

    def sub(self, a: Elt, b: Elt) -> Elt:
        return self.add(a, self.scale(b, self.field.neg(self.field.one)))


def _label(e: Elt) -> str:
    return f"H[{e.col},{e.w}]{list(k for k, _ in e.vec)}"


def _pairs(elts, max_combined):
    for a in elts:
        for b in elts:
            if a.w + b.w <= max_combined:
                yield a, b


def check_bv_relation(t: StructureTables, max_combined: int) -> CheckResult:
    """{a,b} = Delta(ab) - Delta(a)b - (-1)^|a| a Delta(b) on basis pairs."""
    res = CheckResult("bv_relation")
    s = t.field.sign
    elts = t.elements()
    for a, b in _pairs(elts, max_combined):
        lhs = t.bracket(a, b)
        rhs = t.add(t.delta(t.prod(a, b)),
                    t.scale(t.prod(t.delta(a), b), -1),
                    t.scale(t.prod(a, t.delta(b)), -s(a.deg)))
        res.tick(lhs.vec == rhs.vec, [_label(a), _label(b)])
    return res


def check_bracket_shortcuts(t: StructureTables, max_combined: int) -> CheckResult:
    """{a,b} = Delta(ab) for column-1 a, b and {c,d} = -Delta(c)d for column-2 c, column-1 d.

    Both follow from the BV relation when the dropped terms vanish, so pairs
    where Delta(a), Delta(b) or Delta(d) is nonzero (only possible in H_{1,1})
    are counted in the note and not compared.
    """
    res = CheckResult("bracket_shortcuts")
    skipped = 0
    for a, b in _pairs(t.elements(), max_combined):
        if a.col == 1 and b.col == 1:
            if not (t.delta(a).is_zero and t.delta(b).is_zero):
                skipped += 1
                continue
            res.tick(t.bracket(a, b).vec == t.delta(t.prod(a, b)).vec, [_label(a), _label(b)])
        elif a.col == 2 and b.col == 1:
            if not t.delta(b).is_zero:
                skipped += 1
                continue
            rhs = t.scale(t.prod(t.delta(a), b), -1)
            res.tick(t.bracket(a, b).vec == rhs.vec, [_label(a), _label(b)])
    res.note = f"{skipped} pairs with a nonzero Delta on H_(1,1) not compared"
    return res


def check_delta_square(t: StructureTables) -> CheckResult:
    res = CheckResult("delta_square_zero")
    for a in t.elements():
        d2 = t.delta(t.delta(a))
        res.tick(d2.is_zero, _label(a))
    return res


def check_gerstenhaber(t: StructureTables, max_combined: int) -> list[CheckResult]:
    """Skew symmetry, Jacobi, Poisson, commutativity and associativity on basis triples."""
    s = t.field.sign
    names = ("skew", "bv_skew", "commutativity", "jacobi", "poisson", "associativity")
    res = {k: CheckResult(k) for k in names}
    elts = t.elements(max_combined)
    br, sb, pr = t.bracket, t.sbracket, t.prod
    for a, b in _pairs(elts, max_combined):
        w = [_label(a), _label(b)]
        res["skew"].tick(sb(a, b).vec == t.scale(sb(b, a), -s((a.deg + 1) * (b.deg + 1))).vec, w)
        res["bv_skew"].tick(br(a, b).vec == t.scale(br(b, a), s(a.deg * b.deg)).vec, w)
        res["commutativity"].tick(pr(a, b).vec == t.scale(pr(b, a), s(a.deg * b.deg)).vec, w)
        ab, sab = pr(a, b), sb(a, b)
        for c in elts:
            if a.w + b.w + c.w > max_combined:
                continue
            w3 = w + [_label(c)]
            lhs = sb(a, sb(b, c))
            rhs = t.add(sb(sab, c), t.scale(sb(b, sb(a, c)), s((a.deg + 1) * (b.deg + 1))))
            res["jacobi"].tick(lhs.vec == rhs.vec, w3)
            lhs = sb(a, pr(b, c))
            rhs = t.add(pr(sab, c), t.scale(pr(b, sb(a, c)), s((a.deg + 1) * b.deg)))
            res["poisson"].tick(lhs.vec == rhs.vec, w3)
            res["associativity"].tick(pr(ab, c).vec == pr(a, pr(b, c)).vec, w3)
    return [res[k] for k in names]


def check_kappa(cx: SmallComplex, max_weight: int, experimental: bool = False) -> list[CheckResult]:
    """kappa^2 = 0 and kappa·Delta(M⊗word) = (-1)^n w M⊗word for basis words."""
    m = cx.manifold
    f = cx.field
    kappa = cx.kappa()
    sq = CheckResult("kappa_square_zero")
    sq.tick(loop_product(kappa, kappa).is_zero(), "kappa")
    act = CheckResult("kappa_delta")
    for w in range(1, max_weight + 1):
        comp = cx.algebra.component(w)
        for k, word in enumerate(comp.basis_words):
            a = cx.space(2, w).make({k: f.one})
            lhs = loop_product(kappa, bv_delta(a, experimental))
            rhs = a.scale(f.reduce(f.sign(m.n) * w))
            act.tick(lhs == rhs, list(word))
    return [sq, act]


def check_delta_bijective(cx: SmallComplex, weights, experimental: bool = False) -> CheckResult:
    """Delta: H_{2,w} -> H_{1,w-1} has rank equal to both dimensions."""
    res = CheckResult("delta_bijective")
    for w in weights:
        cols = delta_matrix(cx, w, experimental)
        src, tgt = cx.space(2, w).dim, cx.space(1, w - 1).dim
        rk = rank(Matrix(cx.field, tgt, src, cols))
        res.tick(rk == src == tgt, {"w": w, "rank": rk, "dim_H2": src, "dim_H1": tgt})
    return res


def check_delta_kappa_span(cx: SmallComplex, experimental: bool = False) -> CheckResult:
    """dim H_{1,1} = rank Delta(H_{2,2}) + 1, with kappa outside the image."""
    res = CheckResult("h11_spanned_by_kappa_and_delta")
    cols = delta_matrix(cx, 2, experimental)
    dim11 = cx.space(1, 1).dim
    rk = rank(Matrix(cx.field, dim11, len(cols), cols))
    kap = cx.space(1, 1).coordinates(cx.kappa().vector)
    rk2 = rank(Matrix(cx.field, dim11, len(cols) + 1, cols + [kap]))
    res.tick(dim11 == rk + 1 == rk2, {"dim_H11": dim11, "rank_delta": rk, "rank_with_kappa": rk2})
    return res


def check_delta_well_defined(cx: SmallComplex, max_weight: int) -> CheckResult:
    """Delta of a boundary [u_i, zeta] in column 2 is a boundary in column 1."""
    res = CheckResult("delta_well_defined")
    for w in range(2, max_weight + 1):
        d0 = cx.d0(w - 1)
        tgt = cx.space(1, w - 1)
        for j, col in enumerate(d0.columns):
            img = delta_chain(cx, w, col)
            res.tick(not tgt.canonical(img), {"w": w, "column": j})
    return res


def check_product_routes(t: StructureTables, max_combined: int) -> CheckResult:
    """The eps-signed column-1 product equals the product of the dga A⊗U."""
    res = CheckResult("product_eps_route")
    for (ca, wa), la in t.basis.items():
        for (cb, wb), lb in t.basis.items():
            if ca != 1 or cb != 1 or wa + wb > max_combined:
                continue
            for a in la:
                for b in lb:
                    res.tick(loop_product(a, b) == loop_product_eps(a, b), [a.label(), b.label()])
    return res


def check_dga_differential(cx: SmallComplex, max_weight: int) -> CheckResult:
    """d0 and d1 equal the commutator [kappa, -] in the dga A⊗U."""
    res = CheckResult("differential_is_kappa_commutator")
    m = cx.manifold
    f = cx.field
    for w in range(max_weight + 1):
        comp = cx.algebra.component(w)
        nxt = cx.algebra.component(w + 1)
        d1, d0 = cx.d1(w), cx.d0(w)
        for k, word in enumerate(comp.basis_words):
            got = kappa_bracket(m, {(0, word): f.one})
            want = {}
            for idx, v in d1.columns[k].items():
                i, b = divmod(idx, nxt.dim)
                want[(i + 1, nxt.basis_words[b])] = v
            res.tick(_clean(got) == want, {"column": 0, "word": list(word)})
            for i in range(cx.r):
                got = kappa_bracket(m, {(i + 1, word): f.one})
                want = {(m.r + 1, nxt.basis_words[b]): v
                        for b, v in d0.columns[i * comp.dim + k].items()}
                res.tick(_clean(got) == want, {"column": 1, "slot": i, "word": list(word)})
    return res



def _clean(vec: dict) -> dict:
    return {k: v for k, v in vec.items() if v}
