"""Loop product, Gerstenhaber bracket and BV operator on H_*(LM).

Gradings: for a class a, ``a.degree`` is its loop degree minus d.  The loop
product has degree 0 in this grading and the bracket degree +1.

A column-1 class with tuple (zeta_1..zeta_r) is read as the derivation theta
of U with theta(u_i) = (-1)^{|theta||u_i|} zeta_i, where |theta| = degree + 1.
With this reading the product of two column-1 classes is the signed sum
sum_{i,j} (-1)^eps c_ij theta(u_i) eta(u_j) and it agrees with the product of
the dga A⊗U, which is what :func:`loop_product` uses.

The bracket comes from derivations: commutators of derivations for two
column-1 classes, and evaluation on the cyclic word for column 1 against
column 2.  Its overall sign is fixed so that it is the deviation of Delta from
being a derivation.

Delta sends M⊗u_{i_1}...u_{i_w} to the signed sum of rotations paired with
c^{-1}.  On H_{1,1} (derivations linear in the u_i) it takes the value
(-1)^n mu·1, where theta(omega) = mu·omega in the free algebra: the dual
derivation of A scales the fundamental class by mu.  It vanishes on every
other class.
"""

from __future__ import annotations

from .algebra import LoopAlgebra, _axpy
from .hochschild import (HomologyClass, SmallComplex, tensor_multiply, zero_class)
from .manifold import ManifoldData, inverse_intersection


class StructureError(ValueError):
    pass


def bracket_sign(m: ManifoldData) -> int:
    """Global sign between the derivation bracket and {,}: -(-1)^{d(d-1)/2}."""
    return 1 if (m.d * (m.d - 1) // 2) % 2 else -1


# chain <-> A⊗U tensor form; A labels: 0 unit, 1..r the x_i, r+1 M

def to_tensor(a: HomologyClass) -> dict:
    cx = a.complex
    comp = cx.algebra.component(a.weight)
    if a.column == 1:
        out = {}
        for i, slot in enumerate(cx.split(a.weight, a.vector)):
            for k, v in slot.items():
                out[(i + 1, comp.basis_words[k])] = v
        return out
    label = 0 if a.column == 0 else cx.r + 1
    return {(label, comp.basis_words[k]): v for k, v in a.vector.items()}


def from_tensor(cx: SmallComplex, t: dict, column: int, w: int) -> HomologyClass:
    """Class of a tensor chain known to lie in A(column)⊗U(w)."""
    comp = cx.algebra.component(w)
    vec: dict = {}
    for (label, word), v in t.items():
        if column == 1:
            if not 1 <= label <= cx.r:
                raise StructureError("tensor is not in column 1")
            vec[(label - 1) * comp.dim + comp.index[word]] = v
        else:
            if label != (0 if column == 0 else cx.r + 1):
                raise StructureError(f"tensor is not in column {column}")
            vec[comp.index[word]] = v
    vec = {k: v for k, v in vec.items() if v}
    if not vec:
        return zero_class(cx, column, w)
    return cx.space(column, w).make(vec)


def _same(a: HomologyClass, b: HomologyClass):
    if a.complex is not b.complex:
        raise StructureError("classes belong to different manifolds or fields")


def loop_product(a: HomologyClass, b: HomologyClass) -> HomologyClass:
    """Product via the dga A⊗U on representatives."""
    _same(a, b)
    cx = a.complex
    col = a.column + b.column
    w = a.weight + b.weight
    if col > 2 or a.is_zero() or b.is_zero():
        return zero_class(cx, min(col, 2), w)
    t = tensor_multiply(cx.manifold, to_tensor(a), to_tensor(b))
    return from_tensor(cx, t, col, w)


# derivations

def derivation_images(a: HomologyClass) -> tuple[int, list[dict]]:
    """(|theta|, [theta(u_1), ..., theta(u_r)]) for a column-1 class."""
    cx = a.complex
    f = cx.field
    comp = cx.algebra.component(a.weight)
    deg = a.degree + 1
    images = []
    for i, slot in enumerate(cx.split(a.weight, a.vector)):
        s = f.sign(deg * cx.manifold.u_degrees[i])
        images.append({comp.basis_words[k]: f.reduce(s * v) for k, v in slot.items()})
    return deg, images


def apply_derivation(alg: LoopAlgebra, deg: int, images: list[dict], terms: dict) -> dict:
    """Leibniz extension theta(ab) = theta(a)b + (-1)^{|a||theta|} a theta(b)."""
    f = alg.field
    out: dict = {}
    for word, c in terms.items():
        pre_deg = 0
        for p, letter in enumerate(word):
            prefix, suffix = word[:p], word[p + 1:]
            s = f.reduce(c * f.sign(deg * pre_deg))
            for z, v in images[letter].items():
                vec = alg.mul_words(prefix, z)
                for a in suffix:
                    vec = alg.rmul_letter(vec, a)
                _axpy(f, out, f.reduce(s * v), vec)
            pre_deg += alg.u_degrees[letter]
    return out


def derivation_bracket(a: HomologyClass, b: HomologyClass) -> HomologyClass:
    """The bracket read off derivations, before the global sign convention.

    column 1 with column 1: the graded commutator of derivations;
    column 1 with column 2: the derivation applied to the cyclic word.
    """
    _same(a, b)
    cx = a.complex
    m = cx.manifold
    f = cx.field
    alg = cx.algebra
    if a.column == 1 and b.column == 1:
        w = a.weight + b.weight - 1
        if a.is_zero() or b.is_zero() or w < 0:
            return zero_class(cx, 1, max(w, 0))
        ta, ia = derivation_images(a)
        tb, ib = derivation_images(b)
        comp = alg.component(w)
        tot = ta + tb
        slots = []
        for i in range(cx.r):
            v = apply_derivation(alg, ta, ia, ib[i])
            _axpy(f, v, f.sign(ta * tb + 1), apply_derivation(alg, tb, ib, ia[i]))
            s = f.sign(tot * m.u_degrees[i])
            slots.append({comp.index[k]: f.reduce(s * x) for k, x in v.items()})
        vec = {k: x for k, x in cx.join(w, slots).items() if x}
        return cx.space(1, w).make(vec) if vec else zero_class(cx, 1, w)
    if a.column == 1 and b.column == 2:
        w = a.weight + b.weight - 1
        if a.is_zero() or b.is_zero() or w < 0:
            return zero_class(cx, 2, max(w, 0))
        ta, ia = derivation_images(a)
        comp_b = alg.component(b.weight)
        v = apply_derivation(alg, ta, ia, comp_b.from_coords(b.vector))
        vec = alg.component(w).coords(v)
        return cx.space(2, w).make(vec) if vec else zero_class(cx, 2, w)
    raise StructureError("derivation_bracket needs a column-1 first argument")


def gerstenhaber_bracket(a: HomologyClass, b: HomologyClass) -> HomologyClass:
    """Bracket normalised so that {a,b} = Delta(ab) - Delta(a)b - (-1)^|a| a Delta(b).

    With beta = bracket_sign(m):
      column 1, column 1:  beta (-1)^|a| [theta, eta]
      column 1, column 2:  -beta (-1)^{d|theta|} (theta(y) - mu(theta) y) on
                           M⊗y; the Koszul sign moves theta past M and the
                           mu term (weight-1 theta only) is theta acting on
                           the dual of the fundamental class
      column 2, column 1:  (-1)^{|a||b|} {b, a}
    and zero when the unit is involved or both classes are cyclic words.
    In this normalisation {a,b} = (-1)^{|a||b|} {b,a}; the bracket obeying the
    usual Gerstenhaber sign rules is :func:`standard_bracket`.
    """
    _same(a, b)
    cx = a.complex
    f = cx.field
    beta = bracket_sign(cx.manifold)
    if a.is_zero() or b.is_zero():
        return zero_class(cx, 2 if a.column == b.column == 2 else max(a.column, b.column),
                          max(a.weight + b.weight - 1, 0))
    if a.column == 1 and b.column == 1:
        c = derivation_bracket(a, b)
        return c if c.is_zero() else c.scale(f.reduce(beta * f.sign(a.degree)))
    if a.column == 1 and b.column == 2:
        c = derivation_bracket(a, b)
        if a.weight == 1 and not b.is_zero():
            mu = omega_scale(a)
            if mu:
                c = c - b.scale(mu)
        return c if c.is_zero() else c.scale(f.reduce(-beta * f.sign(cx.manifold.d * (a.degree + 1))))
    if a.column == 2 and b.column == 1:
        c = gerstenhaber_bracket(b, a)
        return c if c.is_zero() else c.scale(f.sign(a.degree * b.degree))
    # anything with the unit, or two cyclic words
    return zero_class(cx, 2 if a.column == b.column == 2 else max(a.column, b.column),
                      max(a.weight + b.weight - 1, 0))


def standard_bracket(a: HomologyClass, b: HomologyClass) -> HomologyClass:
    """(-1)^|a| {a,b}: skew {a,b} = -(-1)^{(|a|+1)(|b|+1)} {b,a}, usual Jacobi and Poisson."""
    c = gerstenhaber_bracket(a, b)
    return c if c.is_zero() else c.scale(a.complex.field.sign(a.degree))


def loop_product_eps(a: HomologyClass, b: HomologyClass) -> HomologyClass:
    """Column-1 product through the explicit eps-signed sum over theta(u_i) eta(u_j)."""
    _same(a, b)
    if a.column != 1 or b.column != 1:
        return loop_product(a, b)
    cx = a.complex
    m = cx.manifold
    f = cx.field
    alg = cx.algebra
    w = a.weight + b.weight
    if a.is_zero() or b.is_zero():
        return zero_class(cx, 2, w)
    ta, ia = derivation_images(a)
    tb, ib = derivation_images(b)
    ud, xd = m.u_degrees, m.degrees
    out: dict = {}
    for i in range(cx.r):
        for j in range(cx.r):
            c = m.c(i, j)
            if not c:
                continue
            eps = ta * (ud[i] + xd[j]) + tb * ud[j] + xd[j] * ud[i]
            coeff = f.reduce(c * f.sign(eps))
            for x, u in ia[i].items():
                for y, v in ib[j].items():
                    _axpy(f, out, f.reduce(coeff * u * v), alg.mul_words(x, y))
    comp = alg.component(w)
    vec = comp.coords(out)
    return cx.space(2, w).make(vec) if vec else zero_class(cx, 2, w)


# BV operator

def delta_allowed(m: ManifoldData, experimental: bool = False) -> None:
    if not m.equal_degree:
        raise StructureError("Delta is only defined here for equal degrees with d = 2n")
    if not m.field.is_rational and not experimental:
        raise StructureError(
            f"Delta over {m.field} is experimental; enable it explicitly to compute it")


def delta_chain(cx: SmallComplex, w: int, vec: dict) -> dict:
    """Delta on a column-2 chain of weight w, as column-1 coordinates at weight w-1."""
    m = cx.manifold
    f = cx.field
    if w == 0 or not vec:
        return {}
    cinv = _cinv(cx)
    n = m.n
    src = cx.algebra.component(w)
    tgt = cx.algebra.component(w - 1)
    slots = [{} for _ in range(cx.r)]
    for k, coeff in vec.items():
        word = src.basis_words[k]
        for pos in range(w):
            sign = f.sign((n - 1) * (w - 1) * pos)
            rest = word[pos + 1:] + word[:pos]
            nf = cx.algebra.normal_form(rest)
            ik = word[pos]
            for ell in range(cx.r):
                c = cinv[ik][ell]
                if not c:
                    continue
                s = f.reduce(coeff * sign * c)
                _axpy(f, slots[ell], s, tgt.coords(nf))
    return cx.join(w - 1, slots)


def _cinv(cx: SmallComplex):
    cached = getattr(cx, "_cinv", None)
    if cached is None:
        cached = inverse_intersection(cx.manifold)
        cx._cinv = cached
    return cached


def omega_scale(a: HomologyClass):
    """mu with theta(omega) = mu·omega in the free algebra, for a class of H_{1,1}."""
    cx = a.complex
    f = cx.field
    alg = cx.algebra
    deg, images = derivation_images(a)
    image: dict = {}
    for (i, j), co in alg.omega.items():
        s = f.sign(deg * alg.u_degrees[i])
        for (x,), v in images[i].items():
            _axpy(f, image, f.reduce(co * v), {(x, j): f.one})
        for (y,), v in images[j].items():
            _axpy(f, image, f.reduce(co * v * s), {(i, y): f.one})
    (i0, j0), c0 = min(alg.omega.items())
    mu = f.reduce(image.get((i0, j0), f.zero) * f.inv(c0))
    rest = dict(image)
    _axpy(f, rest, f.neg(mu), alg.omega)
    if rest:
        raise StructureError("derivation does not preserve the relation up to scale")
    return mu


def bv_delta(a: HomologyClass, experimental: bool = False) -> HomologyClass:
    """Delta: H_{2,w} -> H_{1,w-1} and H_{1,1} -> H_{0,0}; zero elsewhere."""
    cx = a.complex
    f = cx.field
    delta_allowed(cx.manifold, experimental)
    if a.column == 1 and a.weight == 1 and not a.is_zero():
        mu = f.reduce(f.sign(cx.manifold.n) * omega_scale(a))
        if not mu:
            return zero_class(cx, 0, 0)
        return cx.space(0, 0).make({0: mu})
    if a.column != 2:
        return zero_class(cx, a.column - 1 if a.column else 0, max(a.weight - 1, 0))
    if a.weight == 0 or a.is_zero():
        return zero_class(cx, 1, max(a.weight - 1, 0))
    vec = delta_chain(cx, a.weight, a.vector)
    if not vec:
        return zero_class(cx, 1, a.weight - 1)
    return cx.space(1, a.weight - 1).make(vec)


def delta_matrix(cx: SmallComplex, w: int, experimental: bool = False) -> list[dict]:
    """Columns of Delta: H_{2,w} -> H_{1,w-1} in the class bases."""
    delta_allowed(cx.manifold, experimental)
    src = cx.space(2, w)
    tgt = cx.space(1, w - 1)
    return [tgt.coordinates(delta_chain(cx, w, b)) for b in src.reps.basis]


def bv_pairing_check(cx: SmallComplex, word: tuple, j: int, experimental: bool = False) -> dict:
    """Delta(M⊗word)·(x_j⊗u_j) against the cyclic sum over positions with letter j.

    Multiplying Delta's chain by x_j⊗u_j contracts c^{-1} against c, which
    keeps exactly the positions k where the word has letter j; there the
    result is the rotation of the word that starts after position k, with
    Delta's sign (-1)^{(n-1)(w-1)(k-1)}.  Both sides are compared in H_2.
    Only basis words are checked; others are reported as skipped.
    """
    m = cx.manifold
    try:
        delta_allowed(m, experimental)
    except StructureError as exc:
        return {"status": "skipped", "reason": str(exc)}
    f = cx.field
    alg = cx.algebra
    w = len(word)
    if w == 0:
        return {"status": "skipped", "reason": "Delta vanishes on the empty word"}
    src = alg.component(w)
    if tuple(word) not in src.index:
        # the letter-wise cyclic sum is only meaningful on basis words of U
        return {"status": "skipped", "reason": "not a basis word of U", "word": list(word)}
    vec = delta_chain(cx, w, {src.index[tuple(word)]: f.one})
    tgt_w = w - 1
    comp = alg.component(tgt_w)
    lhs_t: dict = {}
    for i, slot in enumerate(cx.split(tgt_w, vec)):
        for k, v in slot.items():
            lhs_t[(i + 1, comp.basis_words[k])] = v
    lhs_t = tensor_multiply(m, lhs_t, {(j + 1, (j,)): f.one})
    out_comp = alg.component(w)
    lhs = {out_comp.index[wd]: v for (_, wd), v in lhs_t.items() if v}
    rhs: dict = {}
    for pos in range(w):
        if word[pos] != j:
            continue
        rot = tuple(word[pos + 1:]) + tuple(word[:pos]) + (word[pos],)
        sign = f.sign((m.n - 1) * (w - 1) * pos)
        _axpy(f, rhs, sign, out_comp.coords(alg.normal_form(rot)))
    H = cx.space(2, w)
    left, right = H.canonical(lhs), H.canonical(rhs)
    return {"status": "pass" if left == right else "fail",
            "word": list(word), "j": j,
            "lhs": {str(k): str(v) for k, v in sorted(left.items())},
            "rhs": {str(k): str(v) for k, v in sorted(right.items())}}
