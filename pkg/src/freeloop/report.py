"""Pipeline orchestration and the JSON report.

A report is a plain dict with ``"schema": 1``.  Everything except the
``"timing"`` section is a deterministic function of (manifold, field,
max_weight, mode, flags).
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor

from . import necklaces
from .algebra import loop_algebra
from .checks import (CheckResult, StructureTables, check_bracket_shortcuts, check_bv_relation,
                     check_delta_bijective,
                     check_delta_kappa_span, check_delta_square, check_delta_well_defined,
                     check_dga_differential, check_gerstenhaber, check_kappa, check_product_routes)
from .hochschild import betti_table, small_complex
from .linalg import Matrix, kernel_basis, rank
from .manifold import ManifoldData, check_invariants, form_parity_check, inverse_intersection
from .perturbation import (check_contraction, homology_dims, perturb, random_contraction,
                           random_perturbation, worked_example)
from .scalars import FieldSpec
from .structure import (StructureError, bv_pairing_check, delta_allowed, delta_matrix,
                        gerstenhaber_bracket, loop_product)

SCHEMA = 1
CHAIN_LIMIT = 1_000_000
CROSSCHECK_PRIME = 32003


class ResourceGuardError(RuntimeError):
    pass


class Timer:
    def __init__(self):
        self.stages: dict[str, float] = {}

    def run(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        self.stages[name] = round(self.stages.get(name, 0.0) + time.perf_counter() - t0, 4)
        return out


def default_max_weight(field: FieldSpec) -> int:
    return 6 if field.is_rational else 8


def guard(m: ManifoldData, max_weight: int) -> None:
    """Refuse runs whose largest chain group would exceed CHAIN_LIMIT."""
    top = m.r * necklaces.dim_u(m.r, max_weight + 1)
    if top > CHAIN_LIMIT:
        raise ResourceGuardError(
            f"max weight {max_weight} needs chain groups of dimension {top} > {CHAIN_LIMIT}")


def _s(v) -> str:
    return str(v)


def _vec(v: dict) -> dict:
    return {str(k): _s(x) for k, x in sorted(v.items())}


class Ledger:
    def __init__(self):
        self.entries: list[dict] = []

    def compare(self, name, module, expected, computed, asserted=True, **extra):
        e = {"name": name, "module": module, "expected": expected, "computed": computed,
             "pass": expected == computed, "asserted": asserted}
        e.update(extra)
        self.entries.append(e)

    def check(self, res: CheckResult, module, asserted=True):
        e = {"name": res.name, "module": module, "expected": 0, "computed": res.failures,
             "pass": res.passed, "asserted": asserted, "cases": res.cases}
        if res.witnesses:
            e["witnesses"] = res.witnesses
        if res.note:
            e["note"] = res.note
        self.entries.append(e)

    def first_failure(self) -> dict | None:
        for e in self.entries:
            if e["asserted"] and not e["pass"]:
                return e
        return None


def homology_dims_table(m: ManifoldData, max_weight: int, jobs: int = 1) -> list[dict]:
    cx = small_complex(m)
    keys = [(c, w) for w in range(max_weight + 1) for c in (0, 1, 2)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            dims = list(pool.map(lambda k: cx.dimension(*k), keys))
    else:
        dims = [cx.dimension(*k) for k in keys]
    return [{"column": c, "weight": w, "dim": d} for (c, w), d in zip(keys, dims)]


def _dims(table: list[dict]) -> dict:
    return {(e["column"], e["weight"]): e["dim"] for e in table}


def structure_samples(m: ManifoldData, max_weight: int, experimental: bool) -> dict:
    cx = small_complex(m)
    out: dict = {"kappa": cx.kappa().label()}
    h11 = cx.space(1, 1).classes()
    h22 = cx.space(2, 2).classes() if max_weight >= 2 else []
    out["products"] = [{"a": a.label(), "b": b.label(), "ab": _vec(loop_product(a, b).vector)}
                       for a in h11 for b in h11]
    out["brackets"] = [{"a": a.label(), "b": b.label(), "bracket": _vec(gerstenhaber_bracket(a, b).vector)}
                       for a in h11 for b in h11 + h22]
    try:
        delta_allowed(m, experimental)
    except StructureError as exc:
        out["delta"] = {"status": "not computed", "reason": str(exc)}
        return out
    mats = {}
    for w in range(1, min(max_weight, 4) + 1):
        cols = delta_matrix(cx, w, experimental)
        rows = cx.space(1, w - 1).dim
        mats[str(w)] = [[_s(c.get(i, 0)) for c in cols] for i in range(rows)]
    out["delta"] = {"status": "experimental" if not m.field.is_rational else "computed",
                    "matrices": mats}
    return out


def _crosscheck_manifold(led: Ledger, m: ManifoldData, max_weight: int):
    f = m.field
    led.compare("manifold_invariants", "manifold", [], check_invariants(m))
    parity = form_parity_check(m)
    if parity is not None:
        led.compare("form_parity", "manifold", True, parity)
    cinv = inverse_intersection(m)
    c = Matrix.from_dense(f, [[m.c(i, j) for j in range(m.r)] for i in range(m.r)])
    prod = c @ Matrix.from_dense(f, cinv)
    led.compare("intersection_inverse", "manifold", True, prod == Matrix.identity(f, m.r))
    a = f.coerce(7)
    led.compare("scalar_inverse", "scalars", _s(f.one), _s(f.reduce(a * f.inv(a))))


def _crosscheck_algebra(led: Ledger, m: ManifoldData, max_weight: int):
    alg = loop_algebra(m)
    dims = [alg.dim(w) for w in range(max_weight + 2)]
    want = necklaces.hilbert_dims(m.r, max_weight + 1)
    led.compare("hilbert_recurrence", "loop-algebra", want, dims)
    if max_weight >= 3:
        led.compare("relation_space_dim_w3", "loop-algebra", 2 * m.r,
                    alg.component(3).free_dim - alg.dim(3))


def _reduce_mod(fp: FieldSpec, col: dict) -> dict:
    out = {}
    for i, v in col.items():
        v = fp.coerce(v)
        if v:
            out[i] = v
    return out


def _crosscheck_complex(led: Ledger, m: ManifoldData, max_weight: int, dims: dict):
    cx = small_complex(m)
    bad = []
    for w in range(max_weight):
        try:
            cx.build_slice(w)
        except Exception as exc:  # reported, not raised
            bad.append(str(exc))
    led.compare("d0_d1_zero", "hochschild-complex", [], bad)
    led.check(check_dga_differential(cx, min(max_weight, 4)), "hochschild-complex")
    nullity_bad = []
    for w in range(max_weight + 1):
        for name, M in (("d1", cx.d1(w)), ("d0", cx.d0(w))):
            if rank(M) + kernel_basis(M).dim != M.cols:
                nullity_bad.append(f"{name}({w})")
    led.compare("rank_nullity", "exact-linalg", [], nullity_bad)
    if m.field.is_rational:
        fp = FieldSpec(CROSSCHECK_PRIME)
        diffs = []
        for w in range(min(max_weight, 6) + 1):
            for name, M in (("d1", cx.d1(w)), ("d0", cx.d0(w))):
                Mp = Matrix(fp, M.rows, M.cols, [_reduce_mod(fp, c) for c in M.columns])
                if rank(M) != rank(Mp):
                    diffs.append(f"{name}({w})")
        led.compare("rank_Q_equals_Fp", "exact-linalg", [], diffs, asserted=False, prime=CROSSCHECK_PRIME)
    r = m.r
    led.compare("dim_H00", "hochschild-complex", 1, dims[(0, 0)])
    led.compare("dim_H20", "hochschild-complex", 1, dims[(2, 0)])
    led.compare("dim_H10", "hochschild-complex", r, dims[(1, 0)])
    if max_weight >= 1:
        led.compare("dim_H21", "hochschild-complex", r, dims[(2, 1)])
        led.compare("trivial_center", "hochschild-complex", [0] * max_weight,
                    [dims[(0, w)] for w in range(1, max_weight + 1)])
    if max_weight >= 2:
        led.compare("dim_H11_eq_H22_plus_1", "hochschild-complex", dims[(2, 2)] + 1, dims[(1, 1)])
    for w in range(3, max_weight + 1):
        led.compare(f"dim_H1_{w - 1}_eq_H2_{w}", "hochschild-complex", dims[(2, w)], dims[(1, w - 1)])


def _crosscheck_necklaces(led: Ledger, m: ManifoldData, max_weight: int, dims: dict):
    for m_, w in ((1, 5), (2, 3), (3, 4), (4, 5)):
        led.compare(f"necklace_oracle_m{m_}_w{w}", "cyclic-words",
                    necklaces.orbit_oracle(m_, w), necklaces.count_necklaces(m_, w))
    led.compare("necklace_summation_orders", "cyclic-words",
                [necklaces.count_necklaces(6, w) for w in range(1, 13)],
                [necklaces.count_necklaces_by_period(6, w) for w in range(1, 13)])
    for d in range(0, 7):
        led.compare(f"s_c_oracle_m{min(m.r, 4)}_d{d}", "cyclic-words",
                    necklaces.word_oracle(min(m.r, 4), d, "avoid12"), necklaces.s_c(min(m.r, 4), d))
    for w in range(3, max_weight + 1):
        if w % 2:
            led.compare(f"exponential_growth_w{w}", "cyclic-words", True,
                        w * dims[(2, w)] >= (m.r - 1) ** w, bound=f"({m.r - 1})^{w}/{w}")
        if not m.equal_degree:
            continue
        led.compare(f"betti_formula_w{w}", "cyclic-words", necklaces.betti_formula(m.r, w, m.n),
                    dims[(2, w)], asserted=m.field.is_rational)


def _crosscheck_structure(led: Ledger, m: ManifoldData, max_weight: int, experimental: bool):
    cx = small_complex(m)
    gw = min(max_weight, 4)
    tables = StructureTables(cx, max_weight, experimental)
    for res in check_gerstenhaber(tables, gw):
        led.check(res, "string-structure")
    led.check(check_product_routes(tables, gw), "string-structure")
    try:
        delta_allowed(m, experimental)
    except StructureError as exc:
        led.entries.append({"name": "bv_suite", "module": "string-structure", "expected": "computed",
                            "computed": "skipped", "pass": True, "asserted": False, "reason": str(exc)})
        return
    asserted = m.field.is_rational
    led.check(check_delta_square(tables), "string-structure", asserted)
    led.check(check_bv_relation(tables, max_weight), "string-structure", asserted)
    led.check(check_bracket_shortcuts(tables, max_weight), "string-structure", asserted)
    for res in check_kappa(cx, min(max_weight, 5), experimental):
        led.check(res, "string-structure", asserted)
    if max_weight >= 3:
        led.check(check_delta_bijective(cx, range(3, max_weight + 1), experimental), "string-structure", asserted)
    if max_weight >= 2:
        led.check(check_delta_kappa_span(cx, experimental), "string-structure", asserted)
    led.check(check_delta_well_defined(cx, max_weight), "string-structure", asserted)
    pair = CheckResult("bv_pairing")
    alg = cx.algebra
    for w in range(1, min(max_weight, 4) + 1):
        for word in alg.component(w).basis_words:
            for j in range(m.r):
                out = bv_pairing_check(cx, word, j, experimental)
                pair.tick(out["status"] == "pass", out)
    led.check(pair, "string-structure", asserted)


def _crosscheck_perturbation(led: Ledger, seed: int = 0, count: int = 20):
    c, p = worked_example()
    out = perturb(c, p)
    led.compare("hpt_worked_example", "perturbation", True,
                out.dD.to_dense() == [[0, 0], [1, 0]] and out.f == c.f and out.g == c.g and out.h.is_zero())
    res = CheckResult("hpt_random_contractions")
    for k in range(count):
        rng = random.Random(seed * 1000 + k)
        c = random_contraction(rng, dim_c=rng.randint(1, 12))
        out = perturb(c, random_perturbation(rng, c))
        rec = check_contraction(out)
        same_h = homology_dims(out.dC, out.c_degrees) == homology_dims(out.dD, out.d_degrees)
        res.tick(rec.passed and same_h, {"instance": k, "failures": sorted(rec.failures())})
    led.check(res, "perturbation")


def build_report(m: ManifoldData, max_weight: int, mode: str = "compute",
                 experimental_delta: bool = False, jobs: int = 1) -> tuple[dict, Ledger | None]:
    if mode not in ("compute", "crosscheck"):
        raise ValueError(f"unknown mode {mode!r}")
    guard(m, max_weight)
    timer = Timer()
    table = timer.run("homology", homology_dims_table, m, max_weight, jobs)
    dims = _dims(table)
    bt = timer.run("betti", betti_table, m, max_weight)
    alg = loop_algebra(m)
    report: dict = {
        "schema": SCHEMA,
        "mode": mode,
        "manifold": m.to_json(),
        "field": m.field.to_json(),
        "max_weight": max_weight,
        "generators": {"u_degrees": list(m.u_degrees), "equal_degree": m.equal_degree},
        "loop_algebra_dims": [alg.dim(w) for w in range(max_weight + 1)],
        "homology": table,
        "betti": {"complete_below": bt.complete_below,
                  "rows": [{"loop_degree": k, "dim": v, "complete": ok} for k, v, ok in bt.rows()]},
    }
    report["structure"] = timer.run("structure", structure_samples, m, max_weight, experimental_delta)
    ledger = None
    if mode == "crosscheck":
        ledger = Ledger()
        timer.run("check_manifold", _crosscheck_manifold, ledger, m, max_weight)
        timer.run("check_algebra", _crosscheck_algebra, ledger, m, max_weight)
        timer.run("check_complex", _crosscheck_complex, ledger, m, max_weight, dims)
        timer.run("check_necklaces", _crosscheck_necklaces, ledger, m, max_weight, dims)
        timer.run("check_structure", _crosscheck_structure, ledger, m, max_weight, experimental_delta)
        timer.run("check_perturbation", _crosscheck_perturbation, ledger)
        report["crosscheck"] = ledger.entries
        first = ledger.first_failure()
        report["status"] = "pass" if first is None else "fail"
        if first is not None:
            report["first_failure"] = first["name"]
    else:
        report["status"] = "pass"
    report["timing"] = timer.stages
    return report, ledger


def hpt_report(seed: int = 0, count: int = 100, max_dim: int = 12) -> dict:
    c0, p0 = worked_example()
    out = perturb(c0, p0)
    instances = []
    ok = True
    for k in range(count):
        rng = random.Random(seed * 100003 + k)
        c = random_contraction(rng, dim_c=rng.randint(1, max_dim))
        before = check_contraction(c)
        t = random_perturbation(rng, c)
        pc = perturb(c, t)
        after = check_contraction(pc)
        same_h = homology_dims(pc.dC, pc.c_degrees) == homology_dims(pc.dD, pc.d_degrees)
        passed = before.passed and after.passed and same_h
        ok = ok and passed
        instances.append({"instance": k, "dim_c": c.dim_c, "dim_d": c.dim_d,
                          "t_nonzero": not t.t.is_zero(), "pass": passed,
                          "failures": sorted(after.failures())})
    worked = {"t_prime": [[_s(x) for x in row] for row in out.dD.to_dense()],
              "f_unchanged": out.f == c0.f,
              "g_unchanged": out.g == c0.g,
              "h_zero": out.h.is_zero(),
              "identities": check_contraction(out).passed}
    worked_ok = (worked["t_prime"] == [["0", "0"], ["1", "0"]] and worked["f_unchanged"]
                 and worked["g_unchanged"] and worked["h_zero"] and worked["identities"])
    return {"schema": SCHEMA, "mode": "hpt-demo", "seed": seed, "worked_example": worked,
            "instances": instances, "status": "pass" if ok and worked_ok else "fail"}


def necklace_report(m: int, w: int, n: int) -> dict:
    return {"schema": SCHEMA, "mode": "necklace", "m": m, "w": w, "n": n,
            "parity_case": necklaces.parity_case(n, w),
            "betti": necklaces.betti_formula(m, w, n),
            "s_c": [necklaces.s_c(m, d) for d in range(w + 1)],
            "necklaces": necklaces.count_necklaces(m, w),
            "even_period_necklaces": necklaces.count_even_period(m, w)}


def dumps(report: dict, with_timing: bool = True) -> str:
    body = report if with_timing else {k: v for k, v in report.items() if k != "timing"}
    return json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def betti_csv(report: dict) -> str:
    lines = ["loop_degree,dim,complete"]
    for row in report["betti"]["rows"]:
        lines.append(f"{row['loop_degree']},{row['dim']},{str(row['complete']).lower()}")
    return "\n".join(lines) + "\n"
