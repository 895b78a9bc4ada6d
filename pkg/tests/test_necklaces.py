import pytest

from freeloop import necklaces as nk
from freeloop.algebra import loop_algebra
from freeloop.manifold import connected_sum_cp2, hyperbolic


def test_count_examples():
    for w in range(1, 9):
        assert nk.count_necklaces(1, w) == 1
    assert nk.count_necklaces(2, 3) == 4
    assert nk.count_even_period(4, 2) == 6


def test_summation_orders_agree():
    for m in range(1, 7):
        for w in range(1, 13):
            assert nk.count_necklaces(m, w) == nk.count_necklaces_by_period(m, w)


def test_oracle_matches_counts():
    for m in range(1, 5):
        for w in range(1, 9):
            assert nk.orbit_oracle(m, w) == nk.count_necklaces(m, w)
            assert nk.orbit_oracle(m, w, even_period=True) == nk.count_even_period(m, w)


def test_s_c_examples():
    assert nk.s_c(4, 1) == 4 and nk.r_c(4, 1) == 0
    assert nk.s_c(4, 3) == 52 == 64 - (8 + 4)
    assert nk.s_c(3, 2) == 7
    assert nk.word_oracle(2, 2, "contains12") == nk.r_c(2, 2) == 2


def test_s_c_two_paths():
    for m in range(2, 5):
        for d in range(0, 9):
            assert nk.word_oracle(m, d, "avoid12") == nk.s_c(m, d)
            assert nk.word_oracle(m, d, "contains12") == nk.r_c(m, d)
            assert nk.word_oracle(m, d, "factor12") == nk.w_12(m, d)
            assert nk.word_oracle(m, d, "avoid_factor12") == nk.w_not12(m, d)


def test_s_c_from_algebra_dimensions():
    for m in (connected_sum_cp2(), hyperbolic(2)):
        alg = loop_algebra(m)
        for d in range(0, 8):
            below = alg.dim(d - 2) if d >= 2 else 0
            assert alg.dim(d) - below == nk.s_c(m.r, d)


def test_edge_values():
    assert nk.r_c(4, 0) == 0 and nk.s_c(4, 0) == 1
    assert nk.w_not12(4, 0) == 1 and nk.w_not12(4, -1) == 0 and nk.w_not12(4, -2) == 0


def test_betti_formula_examples():
    assert nk.betti_formula(4, 3, 2) == 20
    assert nk.betti_formula(3, 4, 2) == 12
    assert nk.parity_case(2, 4) == "n_and_w_even"
    assert nk.parity_case(3, 4) == "n_or_w_odd"
    with pytest.raises(nk.NecklaceError):
        nk.betti_formula(2, 5, 2)
    with pytest.raises(nk.NecklaceError):
        nk.betti_formula(4, 2, 2)


def test_betti_formula_against_orbits():
    for m in (3, 4):
        for w in range(3, 9):
            for n in (2, 3):
                assert nk.betti_formula(m, w, n) == nk.betti_oracle(m, w, n)


def test_exponential_growth():
    for m in (3, 4, 5):
        for w in (3, 5, 7, 9):
            assert w * nk.betti_formula(m, w, 2) >= (m - 1) ** w


def test_exact_division_guard():
    with pytest.raises(nk.NecklaceError):
        nk.primitive_necklaces(2, 3, values=lambda k: k)


def test_oracle_guard():
    with pytest.raises(nk.ResourceGuardError):
        nk.orbit_oracle(4, 14)
