import shutil
from fractions import Fraction

import pytest

from weightone.qseries import theta_expansion
from weightone.sl2 import word_decompose
from weightone.umbral import (DataIntegrityError, class_sizes,
                              coefficient_parity_audit,
                              decompose_multiplicities, expected_support,
                              first_xi9_mismatch, load_dataset,
                              block_structure_check, theta_correction,
                              verify_decompositions, verify_xi9_consistency)


@pytest.fixture(scope="module")
def dataset():
    return load_dataset()


def test_load_counts(dataset):
    assert len(dataset.class_records) == 140
    assert len({r.root_system for r in dataset.class_records}) == 21
    assert len(dataset.coefficients.rows) == 302
    assert len(dataset.decompositions.rows) == 98


def test_level_records(dataset):
    recs = {(r.root_system, r.class_name): r for r in dataset.class_records}
    l9 = [r for r in dataset.class_records if r.root_system == "A8^3"]
    assert [(r.class_name, r.n_g, r.h_g, r.level) for r in l9] == [
        ("1A", 1, 1, 1), ("2A", 1, 4, 4), ("2B", 2, 1, 2),
        ("2C", 2, 2, 4), ("3A", 3, 3, 9), ("6A", 3, 12, 36)]
    assert all(r.coxeter == 9 for r in l9)
    assert recs[("A1^24", "2A")].level == 2
    assert recs[("E8^3", "3A")].coxeter == 30
    assert recs[("A5^4D4", "1A")].coxeter == 6
    assert recs[("A7^2D5^2", "2C")].coxeter == 8
    flagged = {(r.root_system, r.class_name)
               for r in dataset.class_records if r.exceptional}
    assert flagged == {("A2^12", "3B"), ("A2^12", "6B"), ("A2^12", "12A"),
                       ("D4^6", "3C"), ("D4^6", "6C"), ("E8^3", "3A"),
                       ("A8^3", "3A"), ("A8^3", "6A")}


def test_class_sizes(dataset):
    assert class_sizes(dataset.character_table) == (1, 1, 3, 3, 2, 2)


def test_decompose_examples(dataset):
    assert decompose_multiplicities(dataset, 1, 71) == (0, 0, 2, 0, 0, 0)
    assert decompose_multiplicities(dataset, 1, -1) == (-2, 0, 0, 0, 0, 0)
    assert decompose_multiplicities(dataset, 1, 35) == (0, 0, 0, 0, 0, 0)
    assert decompose_multiplicities(dataset, 6, 0) == (0, 0, 0, 1, 0, 0)
    assert decompose_multiplicities(dataset, 2, 32) == (0, 0, 0, 0, 0, 2)


def test_all_decomposition_rows_reproduced(dataset):
    assert verify_decompositions(dataset) == []


def test_support_pattern(dataset):
    for (r, d) in dataset.coefficients.rows:
        mults = decompose_multiplicities(dataset, r, d)
        allowed = expected_support(r)
        assert all(v == 0 for i, v in enumerate(mults) if i not in allowed), (r, d)


def test_grading(dataset):
    for r in range(1, 9):
        for d in dataset.coefficients.grades(r):
            assert (-d) % 36 == (r * r) % 36


def test_parity_audit(dataset):
    assert coefficient_parity_audit(dataset) == []


def test_parity_audit_flags_injected_negative(dataset):
    from weightone.umbral import McKayThompsonTable, UmbralDataSet
    rows = dict(dataset.coefficients.rows)
    rows[(1, 71)] = (-4, 4, 0, 0, -2, -2)
    mangled = UmbralDataSet(dataset.class_records, dataset.character_table,
                            McKayThompsonTable(rows), dataset.decompositions)
    problems = coefficient_parity_audit(mangled)
    assert any("(1,71)" in p for p in problems)


def test_corrupted_data_detected(tmp_path):
    import importlib.resources as res
    data = res.files("weightone").joinpath("data")
    for name in ("levels.csv", "character_table.csv", "mckay_thompson.csv",
                 "decompositions.csv", "manifest.json"):
        shutil.copy(str(data.joinpath(name)), tmp_path / name)
    # silent edit: flip one coefficient
    target = tmp_path / "mckay_thompson.csv"
    text = target.read_text().replace("71,4,4,0,0,-2,-2", "71,5,4,0,0,-2,-2")
    target.write_text(text)
    with pytest.raises(DataIntegrityError, match="digest"):
        load_dataset(str(tmp_path))
    # with digests off, the invariant layer still catches the damage
    ds = load_dataset(str(tmp_path), verify_digests=False)
    with pytest.raises(DataIntegrityError):
        decompose_multiplicities(ds, 1, 71)


def test_corrupted_determinant_style_row(tmp_path):
    import importlib.resources as res
    data = res.files("weightone").joinpath("data")
    for name in ("levels.csv", "character_table.csv", "mckay_thompson.csv",
                 "decompositions.csv", "manifest.json"):
        shutil.copy(str(data.joinpath(name)), tmp_path / name)
    target = tmp_path / "levels.csv"
    text = target.read_text().replace("A8^3,3A,3,3,9,1", "A8^3,3A,3,5,9,1")
    target.write_text(text)
    with pytest.raises(DataIntegrityError):
        load_dataset(str(tmp_path), verify_digests=False)


def test_theta_corrections():
    assert theta_correction("3A", 1, 5).is_zero()
    assert theta_correction("3A", 0, 5).is_zero()
    assert theta_correction("3A", 9, 5).is_zero()
    t33 = theta_expansion(3, 3, 8).specialize_y1()
    t30 = theta_expansion(3, 0, 8).specialize_y1()
    assert theta_correction("3A", 3, 8).agrees_with(-t33)
    assert theta_correction("3A", 15, 8).agrees_with(t33)
    assert theta_correction("3A", 6, 8).agrees_with(t30)
    assert theta_correction("6A", 6, 8).agrees_with(-t30)
    assert theta_correction("6A", 3, 8).agrees_with(-t33)
    assert theta_correction("3A", 3, 8).coeff(Fraction(3, 4)) == -2
    assert theta_correction("6A", 6, 8).coeff(0) == -1
    with pytest.raises(ValueError):
        theta_correction("2A", 3, 5)


def test_xi9_consistency():
    assert verify_xi9_consistency(3)
    assert first_xi9_mismatch(3) is None


def test_xi9_consistency_negative_control():
    # a sign flip in the correction must be caught
    t33 = theta_expansion(3, 3, 3).specialize_y1()
    good = theta_correction("3A", 3, 3)
    assert not good.agrees_with(t33)  # flipped sign differs


def test_block_structure():
    words = [word_decompose(m) for m in ((1, 1, 0, 1), (1, 0, 3, 1), (4, 1, 3, 1))]
    assert block_structure_check(words)
    with pytest.raises(ValueError):
        block_structure_check([word_decompose((0, -1, 1, 0))])


def test_block_structure_negative_control():
    # matrices outside the level-3 group genuinely couple the blocks
    from weightone.weil import QuadSpace, get_weil_rep
    rep = get_weil_rep(QuadSpace("D", 9))
    s = rep.evaluate_word(word_decompose((0, -1, 1, 0)))
    assert not s.entry(1, 3).is_zero()
