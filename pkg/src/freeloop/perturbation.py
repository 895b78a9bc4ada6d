"""The basic perturbation lemma on finite graded complexes.

A contraction (f, g, h) from (C, d_C) to (D, d_D) has f, g chain maps,
d_C h + h d_C = g f - 1, f g = 1 and the side conditions f h = h h = h g = 0.
Differentials have degree -1 and h has degree +1.  A perturbation t of d_C
is transferred by

    Sigma = t (1 - h t)^{-1} = sum_k t (h t)^k
    t' = f Sigma g,  f' = f + f Sigma h,  g' = g + h Sigma g,  h' = h + h Sigma h.

Convergence is made checkable through per-basis filtration degrees: t must
strictly raise filtration, so h t is nilpotent whenever h does not lower it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .linalg import Matrix, rank
from .scalars import FieldSpec, Q


class PerturbationError(ValueError):
    pass


@dataclass
class ContractionData:
    field: FieldSpec
    c_degrees: list[int]
    d_degrees: list[int]
    dC: Matrix
    dD: Matrix
    f: Matrix
    g: Matrix
    h: Matrix
    c_filtration: list[int] | None = None
    d_filtration: list[int] | None = None

    @property
    def dim_c(self) -> int:
        return len(self.c_degrees)

    @property
    def dim_d(self) -> int:
        return len(self.d_degrees)

    def same_maps(self, other: "ContractionData") -> bool:
        return all(getattr(self, k) == getattr(other, k) for k in ("dC", "dD", "f", "g", "h"))


@dataclass
class Perturbation:
    t: Matrix
    filtration: list[int]


@dataclass
class CheckRecord:
    results: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r["pass"] for r in self.results.values())

    def failures(self) -> dict:
        return {k: r for k, r in self.results.items() if not r["pass"]}

    def record(self, name: str, M: Matrix):
        j = M.nonzero_column()
        if j is None:
            self.results[name] = {"pass": True}
        else:
            img = {i: str(v) for i, v in sorted(M.columns[j].items())}
            self.results[name] = {"pass": False, "witness": {"basis": j, "image": img}}


IDENTITIES = ("f_chain", "g_chain", "homotopy", "fg_id", "fh_zero", "hh_zero", "hg_zero")


def _degree_shift_ok(M: Matrix, src: list[int], dst: list[int], shift: int) -> int | None:
    """First column whose image has a degree other than src + shift."""
    for j, col in enumerate(M.columns):
        if any(dst[i] != src[j] + shift for i in col):
            return j
    return None


def check_contraction(c: ContractionData) -> CheckRecord:
    F = c.field
    rec = CheckRecord()
    idC = Matrix.identity(F, c.dim_c)
    idD = Matrix.identity(F, c.dim_d)
    rec.record("f_chain", c.dD @ c.f - c.f @ c.dC)
    rec.record("g_chain", c.dC @ c.g - c.g @ c.dD)
    rec.record("homotopy", c.dC @ c.h + c.h @ c.dC - (c.g @ c.f - idC))
    rec.record("fg_id", c.f @ c.g - idD)
    rec.record("fh_zero", c.f @ c.h)
    rec.record("hh_zero", c.h @ c.h)
    rec.record("hg_zero", c.h @ c.g)
    rec.record("dC_square", c.dC @ c.dC)
    rec.record("dD_square", c.dD @ c.dD)
    for name, M, src, dst, shift in (
        ("dC_degree", c.dC, c.c_degrees, c.c_degrees, -1),
        ("dD_degree", c.dD, c.d_degrees, c.d_degrees, -1),
        ("f_degree", c.f, c.c_degrees, c.d_degrees, 0),
        ("g_degree", c.g, c.d_degrees, c.c_degrees, 0),
        ("h_degree", c.h, c.c_degrees, c.c_degrees, 1),
    ):
        j = _degree_shift_ok(M, src, dst, shift)
        rec.results[name] = {"pass": True} if j is None else {"pass": False, "witness": {"basis": j}}
    return rec


def _raises(M: Matrix, src: list[int], dst: list[int], strict: bool) -> bool:
    for j, col in enumerate(M.columns):
        for i in col:
            if dst[i] < src[j] or (strict and dst[i] == src[j]):
                return False
    return True


def check_perturbation(c: ContractionData, p: Perturbation) -> list[str]:
    """Problems with t as a perturbation of d_C; empty when admissible."""
    errs = []
    if len(p.filtration) != c.dim_c or any(x < 0 for x in p.filtration):
        errs.append("filtration must give a nonnegative degree per basis vector of C")
        return errs
    if _degree_shift_ok(p.t, c.c_degrees, c.c_degrees, -1) is not None:
        errs.append("t must have degree -1")
    if not _raises(p.t, p.filtration, p.filtration, strict=True):
        errs.append("t must strictly raise filtration")
    total = c.dC + p.t
    if not (total @ total).is_zero():
        errs.append("(d_C + t)^2 != 0")
    return errs


def neumann_sigma(c: ContractionData, t: Matrix) -> Matrix:
    """Sigma = sum_k t (h t)^k, failing if h t is not nilpotent within dim C steps."""
    ht = c.h @ t
    term = t
    sigma = Matrix.zero(c.field, c.dim_c, c.dim_c)
    for _ in range(c.dim_c + 1):
        if term.is_zero():
            return sigma
        sigma = sigma + term
        term = term @ ht
    if term.is_zero():
        return sigma
    raise PerturbationError(f"h t is not nilpotent within {c.dim_c} iterations")


def perturb(c: ContractionData, p: Perturbation, check: bool = True) -> ContractionData:
    if check:
        errs = check_perturbation(c, p)
        if errs:
            raise PerturbationError("; ".join(errs))
    s = neumann_sigma(c, p.t)
    return ContractionData(
        field=c.field,
        c_degrees=list(c.c_degrees),
        d_degrees=list(c.d_degrees),
        dC=c.dC + p.t,
        dD=c.dD + c.f @ s @ c.g,
        f=c.f + c.f @ s @ c.h,
        g=c.g + c.h @ s @ c.g,
        h=c.h + c.h @ s @ c.h,
        c_filtration=c.c_filtration,
        d_filtration=c.d_filtration,
    )


def homology_dims(M: Matrix, degrees: list[int]) -> dict[int, int]:
    """dim H_k of a square-zero degree -1 map, per degree k."""
    out = {}
    for k in sorted(set(degrees)):
        cols = [j for j, x in enumerate(degrees) if x == k]
        up = [j for j, x in enumerate(degrees) if x == k + 1]
        sub = Matrix(M.field, M.rows, len(cols), [M.columns[j] for j in cols])
        sub_up = Matrix(M.field, M.rows, len(up), [M.columns[j] for j in up])
        out[k] = len(cols) - rank(sub) - rank(sub_up)
    return {k: v for k, v in out.items() if v}


# random instances

def _random_unipotent(F: FieldSpec, rng: random.Random, degs, filt, strict: bool) -> tuple[Matrix, Matrix]:
    """Degree-preserving 1 + N with N nilpotent and not lowering filtration, plus its inverse."""
    n = len(degs)
    order = sorted(range(n), key=lambda i: (filt[i], i))
    pos = {i: k for k, i in enumerate(order)}
    cols = []
    for j in range(n):
        col = {}
        for i in range(n):
            if i == j or degs[i] != degs[j]:
                continue
            ok = filt[i] > filt[j] if strict else pos[i] > pos[j] and filt[i] >= filt[j]
            if ok and rng.random() < 0.5:
                v = F.coerce(rng.randint(-3, 3))
                if v:
                    col[i] = v
        cols.append(col)
    N = Matrix(F, n, n, cols)
    one = Matrix.identity(F, n)
    inv, term = one, one
    for _ in range(n):
        term = -(term @ N)
        if term.is_zero():
            break
        inv = inv + term
    return one + N, inv


def random_contraction(rng: random.Random, dim_c: int = 8, field: FieldSpec = Q, max_degree: int = 2,
                       max_filtration: int = 3) -> ContractionData:
    """A filtered contraction C = D + B + sB -> D, scrambled by filtered automorphisms."""
    F = field
    if dim_c < 1:
        raise PerturbationError("dim_c must be positive")
    pairs_c = rng.randint(min(1, dim_c // 2), dim_c // 2)
    dim_d = dim_c - 2 * pairs_c
    pairs_d = rng.randint(0, dim_d // 2)
    h_count = dim_d - 2 * pairs_d

    c_deg, c_fil = [], []
    d_cols: list[tuple[int, int]] = []   # (cycle index, bounding index) inside D
    for _ in range(h_count):
        c_deg.append(rng.randint(0, max_degree))
        c_fil.append(rng.randint(0, max_filtration))
    for _ in range(pairs_d):
        k, s = rng.randint(0, max_degree), rng.randint(0, max_filtration)
        d_cols.append((len(c_deg), len(c_deg) + 1))
        c_deg += [k, k + 1]
        c_fil += [s, s]
    n_d = len(c_deg)
    c_pairs = []
    for _ in range(pairs_c):
        k, s = rng.randint(0, max_degree), rng.randint(0, max_filtration)
        c_pairs.append((len(c_deg), len(c_deg) + 1))
        c_deg += [k, k + 1]
        c_fil += [s, s]
    n_c = len(c_deg)
    one, m1 = F.one, F.neg(F.one)

    dD = [{} for _ in range(n_d)]
    for e, se in d_cols:
        dD[se] = {e: one}
    dC = [dict(x) for x in dD] + [{} for _ in range(n_c - n_d)]
    h = [{} for _ in range(n_c)]
    for b, sb in c_pairs:
        dC[sb] = {b: one}
        h[b] = {sb: m1}
    f = [{j: one} if j < n_d else {} for j in range(n_c)]
    g = [{j: one} for j in range(n_d)]

    base = ContractionData(
        F, c_deg, c_deg[:n_d],
        Matrix(F, n_c, n_c, dC), Matrix(F, n_d, n_d, dD),
        Matrix(F, n_d, n_c, f), Matrix(F, n_c, n_d, g), Matrix(F, n_c, n_c, h),
        c_fil, c_fil[:n_d])
    pc, pc_inv = _random_unipotent(F, rng, c_deg, c_fil, strict=False)
    pd, pd_inv = _random_unipotent(F, rng, c_deg[:n_d], c_fil[:n_d], strict=False)
    return ContractionData(
        F, base.c_degrees, base.d_degrees,
        pc @ base.dC @ pc_inv, pd @ base.dD @ pd_inv,
        pd @ base.f @ pc_inv, pc @ base.g @ pd_inv, pc @ base.h @ pc_inv,
        c_fil, c_fil[:n_d])


def random_perturbation(rng: random.Random, c: ContractionData, tries: int = 20) -> Perturbation:
    """t = psi d_C psi^{-1} - d_C with psi - 1 strictly raising filtration.

    Draws psi up to ``tries`` times looking for a nonzero t; t = 0 is returned
    only when no draw produced one (for instance when d_C = 0).
    """
    t = None
    for _ in range(tries):
        psi, psi_inv = _random_unipotent(c.field, rng, c.c_degrees, c.c_filtration, strict=True)
        t = psi @ c.dC @ psi_inv - c.dC
        if not t.is_zero():
            break
    return Perturbation(t, list(c.c_filtration))


def worked_example(field: FieldSpec = Q) -> tuple[ContractionData, Perturbation]:
    """C = D = span{a (deg 1), b (deg 0)}, zero differentials, f = g = 1, h = 0, t(a) = b."""
    F = field
    one = Matrix.identity(F, 2)
    zero = Matrix.zero(F, 2, 2)
    c = ContractionData(F, [1, 0], [1, 0], zero, zero, one, one, zero, [0, 1], [0, 1])
    t = Matrix(F, 2, 2, [{1: F.one}, {}])
    return c, Perturbation(t, [0, 1])
