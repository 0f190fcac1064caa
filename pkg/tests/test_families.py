from __future__ import annotations

import csv
import io
from fractions import Fraction

import pytest

from strandf.families import (
    CSV_COLUMNS, expected_shift_norm, experiment_row, f_element, f_index_word, f_word,
    family_diagram, frak_f, frak_g, frak_h, g_element, g_index_word, g_word, h_element, h_norm, lower_bound,
    records_to_csv, remark_value, right_vine, shift_profile,
)
from strandf.strand_core import LEFT, OUT, RIGHT, SPLIT, inverse, make_trivial, multiply
from strandf.thompson_f import length_exact, parse_word, word_to_element


def test_right_vine():
    assert right_vine(1) == make_trivial(1)
    t = right_vine(5)
    assert t.shape == (1, 5) and t.norm == 4
    # each split hangs off the right output of the previous one
    v = t.succ[(t.sources[0], OUT)][0]
    for i in range(4):
        assert t.kinds[v] == SPLIT
        assert t.succ[(v, LEFT)][0] == t.sinks[i]
        v = t.succ[(v, RIGHT)][0]
    assert v == t.sinks[4]


def test_words():
    assert f_word(2) == "x0 x1^-1 x0^-1 x1 x0^-1 x1^-2 x0 x1 x0 x1^-1"
    assert f_index_word(3) == "x0 x3^2 x7^2 x9^-2 x5^-2 x1^-2"
    assert len(parse_word(f_word(4))) == 8 * 4 - 5
    with pytest.raises(ValueError):
        f_word(1)


def test_word_forms_agree():
    for n in range(2, 7):
        assert word_to_element(f_word(n)) == word_to_element(f_index_word(n)) == f_element(n)
        assert word_to_element(g_word(n)) == word_to_element(g_index_word(n)) == g_element(n)


def test_frak_shapes():
    assert frak_f(5).norm == 20
    assert frak_g(4).shape == (12, 12)
    for n in range(2, 6):
        assert frak_f(n).shape == (2 * n + 1, 2 * n + 1)
        assert frak_g(n).norm == 4 * n


def test_frak_h():
    assert [frak_h(n).norm for n in (2, 3, 4)] == [5, 14, 27]
    for n in range(2, 7):
        h = frak_h(n)
        assert h.shape == (2 * n + 1, 3 * n)
        assert multiply(frak_f(n), h) == multiply(h, frak_g(n))


def test_shift_profile():
    for n in range(2, 8):
        ks = range(-(n + 3), 3)
        prof = shift_profile(n, ks)
        assert prof == {k: expected_shift_norm(n, k) for k in ks}
        low = min(prof.values())
        assert low == n * n - 1 and prof[-(n // 2)] == low


def test_h_element_conjugates():
    for n in range(2, 8):
        h = h_element(n)
        f, g = f_element(n), g_element(n)
        assert multiply(multiply(inverse(h), f), h) == g


def test_norm_lower_bound_on_shifts():
    for n in range(2, 7):
        f, h = f_element(n), h_element(n)
        fi = inverse(f)
        x = h
        for _ in range(n + 3):
            x = multiply(fi, x)
            assert x.norm >= n * (n - 5)
            assert length_exact(x) >= lower_bound(n)


def test_formulas():
    assert remark_value(3) == 15 and remark_value(4) == 26
    assert lower_bound(2) == -5
    assert h_norm(4) == 27
    assert expected_shift_norm(4, 0) == 27 and expected_shift_norm(4, -2) == 15


def test_experiment_row_n2():
    r = experiment_row(2)
    assert r.thm32_lower == Fraction(-5) and r.cd >= 0 and r.match


def test_csv():
    rows = [experiment_row(n) for n in (4, 5)]
    text = records_to_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == CSV_COLUMNS
    assert parsed[1][:4] == ["4", "27", "27", "26"]
    assert parsed[2][3] == "42"


def test_family_specs():
    assert family_diagram("vine:7") == right_vine(7)
    assert family_diagram("fn:3") == f_element(3)
    with pytest.raises(ValueError):
        family_diagram("nope:3")
    with pytest.raises(ValueError):
        family_diagram("fn:x")


def test_vine_conjugate_of_x0():
    t3 = right_vine(3)
    assert multiply(multiply(inverse(t3), word_to_element("x0")), t3).norm == 2
