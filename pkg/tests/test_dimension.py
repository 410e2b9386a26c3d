from fractions import Fraction

import pytest

from weightone.dimension import (BudgetExceeded, DimQuery,
                                 admissible_divisors, default_aux, dim_j1,
                                 estimated_cost, inner_product,
                                 lemma_hypotheses, twisted_pair_inner_products,
                                 umbral_sweep)
from weightone.sl2 import gamma0_image, perm_character, word_for
from weightone.umbral import load_dataset
from weightone.weil import evaluate_character, theta_handle


def test_query_validation():
    with pytest.raises(ValueError):
        DimQuery(2, 8, 3)  # m does not divide M
    with pytest.raises(ValueError):
        DimQuery(2, 64, 2)  # N does not divide 4M
    with pytest.raises(ValueError):
        DimQuery(2, 8, 2, backend="magic")


def test_default_aux():
    assert default_aux(1, 1) == 1
    assert default_aux(3, 144) == 36
    assert default_aux(6, 36) == 18
    assert default_aux(30, 36) == 90
    assert default_aux(8, 32) == 8
    assert default_aux(9, 9) == 9
    for (m, n) in ((3, 144), (6, 36), (9, 9), (2, 8)):
        aux = default_aux(m, n)
        assert aux % m == 0 and (4 * aux) % n == 0


def test_admissible_divisors():
    assert admissible_divisors(8) == [4, 8]
    assert admissible_divisors(36) == [6, 12, 18, 36]
    assert admissible_divisors(90) == [3, 6, 9, 15, 18, 30, 45, 90]


def test_level_one_vanishing_small():
    for m in range(1, 7):
        assert dim_j1(m, 1, m) == 0


def test_m_independence():
    assert dim_j1(2, 8, 2) == dim_j1(2, 8, 4) == dim_j1(2, 8, 8) == 0
    # a positive case whose divisor sum genuinely changes with M
    assert dim_j1(9, 9, 9) == dim_j1(9, 9, 18) == 1


def test_backend_agreement():
    for (m, n, aux) in ((2, 8, 2), (3, 9, 9), (9, 9, 9), (2, 2, 2), (8, 32, 8)):
        exact = dim_j1(m, n, aux, backend="exact")
        flt = dim_j1(m, n, aux, backend="float")
        crt = dim_j1(m, n, aux, backend="crt-float")
        assert exact == flt == crt, (m, n, aux)


def test_positive_controls_small():
    assert dim_j1(9, 9, 9) == 1
    assert dim_j1(8, 32, 8) == 1


def test_monotonicity_in_level():
    # N' | N gives a subspace
    pairs = [((9, 3), (9, 9)), ((8, 16), (8, 32)), ((2, 2), (2, 8))]
    for (m, n1), (_, n2) in pairs:
        assert dim_j1(m, n1) <= dim_j1(m, n2)


def test_budget():
    q = DimQuery(3, 144, 36, "float")
    assert estimated_cost(q) > estimated_cost(DimQuery(3, 144, 36, "exact"))
    with pytest.raises(BudgetExceeded):
        dim_j1(3, 144, 36, backend="float", budget=10)


def test_inner_product_direct_definition_crosscheck():
    # average over the level-N image equals the full-group sum weighted by the
    # induced permutation character, for a small modulus
    h1 = theta_handle(1, -1)
    h2 = theta_handle(1, 1)
    n, q = 4, 4
    frob = inner_product(h1, h2, n, q)
    total = Fraction(0)
    count = 0
    for g in gamma0_image(1, q):
        w = word_for(g)
        prod = evaluate_character(h1, w) * evaluate_character(h2, w)
        total += prod.rational_value() * perm_character(n, g)
        count += 1
    assert frob == total / count
    assert frob == 0  # theta_1^- vanishes identically


def test_inner_product_direct_crosscheck_nontrivial():
    h1 = theta_handle(2, -1)
    h2 = theta_handle(2, 1)
    n, q = 2, 8
    frob = inner_product(h1, h2, n, q)
    total = 0j
    count = 0
    for g in gamma0_image(1, q):
        w = word_for(g)
        prod = evaluate_character(h1, w) * evaluate_character(h2, w)
        total += prod.to_complex() * perm_character(n, g)
        count += 1
    assert abs(complex(frob) - total / count) < 1e-9


def test_inner_product_validation():
    with pytest.raises(ValueError):
        inner_product(theta_handle(2, -1), theta_handle(2, 1), 3, 8)  # N does not divide Q
    with pytest.raises(ValueError):
        inner_product(theta_handle(3, -1), theta_handle(2, 1), 2, 8)  # conductor 12 not | 8


def test_twisted_grid_matches_inner_product():
    vals = twisted_pair_inner_products([2], 2, 8, [(1, 1)])
    direct = inner_product(theta_handle(2, -1), theta_handle(2, 1), 2, 8)
    assert abs(vals[(2, 2, 1, 1)] - complex(direct)) < 1e-9


def test_inner_product_float_backend_generic_handles():
    from weightone.weil import lambda_character
    lam = lambda_character(3, 1, -1)
    exact = inner_product(lam, lam, 1, 3)
    flt = inner_product(lam, lam, 1, 3, backend="float")
    assert abs(complex(exact) - flt) < 1e-9
    flt_theta = inner_product(theta_handle(2, -1), theta_handle(2, 1), 2, 8,
                              backend="float")
    exact_theta = inner_product(theta_handle(2, -1), theta_handle(2, 1), 2, 8)
    assert abs(flt_theta - complex(exact_theta)) < 1e-9


def test_lemma_hypotheses():
    assert lemma_hypotheses(2, 4)
    assert not lemma_hypotheses(9, 9)     # 27 | 81
    assert not lemma_hypotheses(3, 144)   # 27 | 432
    assert lemma_hypotheses(5, 36)
    assert lemma_hypotheses(12, 32)       # m = 4 mod 8
    assert not lemma_hypotheses(32, 32)   # both divisible by 32
    assert lemma_hypotheses(7, 32)        # odd index, 64 does not divide N
    assert not lemma_hypotheses(7, 128)


def test_criterion_dimension_consistency():
    # wherever the exponent criterion proves vanishing, the dimension is 0
    from weightone.vanishing import exponent_criterion
    for m in range(1, 5):
        for aux in range(m, 13):
            if aux % m:
                continue
            if exponent_criterion(m, aux).vanishes:
                assert dim_j1(m, 4 * aux, aux) == 0, (m, aux)


def test_umbral_sweep():
    ds = load_dataset()
    rows = umbral_sweep(ds)
    by_key = {(r.root_system, r.class_name): r for r in rows}
    assert len(rows) == len(ds.class_records)
    # identity classes settle by the syntactic lemma at level 1
    assert by_key[("A1^24", "1A")].method == "lemma"
    assert by_key[("A1^24", "2A")].method == "lemma"
    # exceptional classes are flagged and have nonzero dimension
    for key in (("A8^3", "3A"), ("A8^3", "6A")):
        row = by_key[key]
        assert row.exceptional and row.method == "dimension" and row.value >= 1
    # every non-exceptional class is settled and vanishes
    for row in rows:
        if not row.exceptional:
            assert row.method in ("lemma", "exponent", "dimension")
            assert row.vanishes, (row.root_system, row.class_name)
    # the three-families rows settle through the dimension formula
    assert by_key[("A2^12", "12A")].method == "dimension"
    assert by_key[("A2^12", "12A")].value == 0
    assert by_key[("D4^6", "3C")].method == "dimension"
    assert by_key[("D4^6", "3C")].value == 0
    assert by_key[("E8^3", "3A")].method == "dimension"
    assert by_key[("E8^3", "3A")].value == 0


def test_umbral_sweep_budget_skips():
    ds = load_dataset()
    rows = umbral_sweep(ds, budget=10)
    skipped = [r for r in rows if r.method == "skipped"]
    assert skipped
    for r in skipped:
        assert r.vanishes is None and r.estimated > 10
