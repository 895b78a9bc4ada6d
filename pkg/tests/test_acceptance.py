"""Acceptance criteria.  Each test prints one PASS/FAIL line; all comparisons are exact."""

import json
import random
import subprocess
import sys
import time
from pathlib import Path

from freeloop import necklaces as nk
from freeloop.algebra import loop_algebra
from freeloop.checks import (StructureTables, check_bv_relation, check_delta_bijective, check_delta_square,
                             check_gerstenhaber, check_kappa)
from freeloop.hochschild import small_complex
from freeloop.manifold import reference_manifolds
from freeloop.perturbation import (check_contraction, perturb, random_contraction, random_perturbation,
                                   worked_example)
from freeloop.scalars import FieldSpec, Q

FP = FieldSpec(32003)
DATA = Path(__file__).resolve().parent.parent / "data"


def _report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {title} ({detail})")
    assert ok, detail


def test_criterion_1_presentation(capsys):
    t0 = time.perf_counter()
    bad = []
    for field in (Q, FP):
        for m in reference_manifolds(field):
            alg = loop_algebra(m)
            dims = [alg.dim(w) for w in range(11)]
            if dims[0] != 1 or dims[1] != m.r:
                bad.append((m.name, str(field), "initial"))
            for w in range(2, 11):
                if dims[w] != m.r * dims[w - 1] - dims[w - 2]:
                    bad.append((m.name, str(field), w))
    secs = time.perf_counter() - t0
    _report(capsys, 1, "dim U(w) = r dim U(w-1) - dim U(w-2), w <= 10, Q and F_32003",
            not bad and secs < 60, f"mismatches={bad}, {secs:.1f}s")


def test_criterion_2_dimension_dictionary(capsys):
    bad = []
    for field in (Q, FP):
        for m in reference_manifolds(field):
            cx = small_complex(m)
            D = cx.dimension
            r = m.r
            checks = [("H00=H20=1", D(0, 0) == D(2, 0) == 1),
                      ("H10=H21=r", D(1, 0) == D(2, 1) == r),
                      ("H11=H22+1", D(1, 1) == D(2, 2) + 1)]
            checks += [(f"H1,{w - 1}=H2,{w}", D(1, w - 1) == D(2, w)) for w in range(3, 9)]
            bad += [(m.name, str(field), name) for name, ok in checks if not ok]
    _report(capsys, 2, "homology dimension dictionary through w = 8, Q and F_32003", not bad, f"failures={bad}")


def test_criterion_3_necklace_formula(capsys):
    bad = []
    regimes = set()
    for m in reference_manifolds(Q):
        cx = small_complex(m)
        for w in range(3, 9):
            regimes.add(nk.parity_case(m.n, w))
            formula = nk.betti_formula(m.r, w, m.n)
            if formula != cx.dimension(2, w):
                bad.append((m.name, w, formula, cx.dimension(2, w)))
    derived = (nk.betti_formula(4, 3, 2), nk.betti_oracle(4, 3, 2), nk.betti_formula(3, 4, 2), nk.betti_oracle(3, 4, 2))
    ok = not bad and derived == (20, 20, 12, 12) and len(regimes) == 2
    _report(capsys, 3, "betti_formula = dim H_{2,w} over Q, m in {3,4}, w in [3,8]", ok,
            f"mismatches={bad}, regimes={sorted(regimes)}, 20/12 formula+oracle={derived}")


def test_criterion_4_bv_suite(capsys):
    lines = []
    ok = True
    for m in reference_manifolds(Q):
        cx = small_complex(m)
        t = StructureTables(cx, 6)
        results = [check_delta_square(t), check_bv_relation(t, 6), *check_kappa(cx, 5),
                   check_delta_bijective(cx, range(3, 7))]
        ok = ok and all(r.passed for r in results)
        lines.append(f"{m.name}: " + ", ".join(f"{r.name} {r.cases - r.failures}/{r.cases}" for r in results))
    _report(capsys, 4, "BV suite over Q (Delta^2, BV relation to combined weight 6, kappa, Delta bijective)",
            ok, "; ".join(lines))


def test_criterion_5_gerstenhaber_suite(capsys):
    lines = []
    ok = True
    for field in (Q, FP):
        for m in reference_manifolds(field):
            t = StructureTables(small_complex(m), 4)
            results = [r for r in check_gerstenhaber(t, 4) if r.name in ("skew", "jacobi", "poisson")]
            ok = ok and all(r.passed for r in results)
            lines.append(f"{m.name}/{field}: " + ", ".join(f"{r.name} {r.cases - r.failures}/{r.cases}"
                                                           for r in results))
    _report(capsys, 5, "skew, Jacobi, Poisson on all basis triples to combined weight 4, Q and F_32003",
            ok, "; ".join(lines))


def test_criterion_6_exponential_growth(capsys):
    bad = []
    for m in reference_manifolds(Q):
        cx = small_complex(m)
        for w in (3, 5, 7):
            if not w * cx.dimension(2, w) >= (m.r - 1) ** w:
                bad.append((m.name, w))
    _report(capsys, 6, "dim H_{2,w} >= (r-1)^w / w for w in {3,5,7}", not bad, f"failures={bad}")


def test_criterion_7_perturbation_lemma(capsys):
    t0 = time.perf_counter()
    failures = []
    nontrivial = 0
    for k in range(100):
        rng = random.Random(k)
        c = random_contraction(rng, dim_c=rng.randint(1, 12))
        p = random_perturbation(rng, c)
        nontrivial += not p.t.is_zero()
        rec = check_contraction(perturb(c, p))
        if not rec.passed:
            failures.append((k, sorted(rec.failures())))
    c, p = worked_example()
    out = perturb(c, p)
    worked = (out.dD.to_dense() == [[0, 0], [1, 0]] and out.f == c.f and out.g == c.g
              and out.h.is_zero() and check_contraction(out).passed)
    secs = time.perf_counter() - t0
    _report(capsys, 7, "100 random filtered contractions perturbed, seven identities exact; worked example",
            not failures and worked and secs < 60,
            f"failures={failures}, nonzero t in {nontrivial}/100, worked example ok={worked}, {secs:.1f}s")


def test_criterion_8_determinism(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        proc = subprocess.run([sys.executable, "-m", "freeloop.cli", "crosscheck", "--input",
                               str(DATA / "cp2_3.json"), "--max-weight", "6", "--no-timing", "--out", str(path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    same = outs[0] == outs[1]
    status = json.loads(outs[0])["status"]
    _report(capsys, 8, "two crosscheck runs give byte-identical reports (timing excluded)",
            same and status == "pass", f"identical={same}, {len(outs[0])} bytes, status={status}")
