import random

import pytest

from freeloop.linalg import Matrix
from freeloop.perturbation import (IDENTITIES, ContractionData, Perturbation, PerturbationError,
                                   check_contraction, check_perturbation, homology_dims, perturb,
                                   random_contraction, random_perturbation, worked_example)
from freeloop.scalars import FieldSpec, Q


def _trivial(n=3):
    one, zero = Matrix.identity(Q, n), Matrix.zero(Q, n, n)
    return ContractionData(Q, [0] * n, [0] * n, zero, zero, one, one, zero, [0] * n, [0] * n)


def test_trivial_contraction_passes():
    rec = check_contraction(_trivial())
    assert rec.passed
    assert set(IDENTITIES) <= set(rec.results)


def test_failure_has_witness():
    c = _trivial(2)
    c.h = Matrix(Q, 2, 2, [{1: Q.one}, {0: Q.one}])
    rec = check_contraction(c)
    assert not rec.passed
    assert rec.results["hh_zero"]["witness"]["basis"] == 0
    assert "hh_zero" in rec.failures()


def test_zero_perturbation_is_identity():
    c = random_contraction(random.Random(3), dim_c=10)
    out = perturb(c, Perturbation(Matrix.zero(Q, c.dim_c, c.dim_c), c.c_filtration))
    assert out.same_maps(c)


def test_worked_example():
    c, p = worked_example()
    out = perturb(c, p)
    assert out.dD.to_dense() == [[0, 0], [1, 0]]
    assert out.f == c.f and out.g == c.g and out.h.is_zero()
    assert check_contraction(out).passed


@pytest.mark.parametrize("field", [Q, FieldSpec(32003)], ids=str)
def test_random_instances(field):
    nontrivial = 0
    for seed in range(100):
        rng = random.Random(seed)
        c = random_contraction(rng, dim_c=8, field=field)
        assert check_contraction(c).passed
        p = random_perturbation(rng, c)
        assert not check_perturbation(c, p)
        nontrivial += not p.t.is_zero()
        out = perturb(c, p)
        rec = check_contraction(out)
        assert rec.passed, rec.failures()
        assert homology_dims(out.dC, out.c_degrees) == homology_dims(out.dD, out.d_degrees)
    assert nontrivial >= 50


def test_bad_perturbations_rejected():
    c, p = worked_example()
    with pytest.raises(PerturbationError):
        perturb(c, Perturbation(p.t, [1, 0]))
    t = Matrix(Q, 2, 2, [{}, {0: Q.one}])
    with pytest.raises(PerturbationError):
        perturb(c, Perturbation(t, [0, 1]))


def test_non_nilpotent_detected():
    # h t = identity on span{a}: no filtration, so the Neumann sum must fail
    zero = Matrix.zero(Q, 2, 2)
    h = Matrix(Q, 2, 2, [{}, {0: Q.one}])
    t = Matrix(Q, 2, 2, [{1: Q.one}, {}])
    c = ContractionData(Q, [0, 0], [0, 0], zero, zero, zero, zero, h, [0, 0], [0, 0])
    with pytest.raises(PerturbationError):
        perturb(c, Perturbation(t, [0, 0]), check=False)
