from __future__ import annotations

import json
import random

import pytest

from conftest import random_word
from strandf.annular import (
    AnnularError, annular_norm, canonical_encoding, closure, closure_encoding, components,
    has_adjacent_loops, is_reduced_annular, reduce_annular, redexes, to_json,
)
from strandf.families import frak_f, frak_g
from strandf.strand_core import inverse, make_trivial, multiply
from strandf.thompson_f import word_to_element


def test_closure_of_trivial():
    A = closure(make_trivial(1))
    assert A.norm == 0 and len(A.loops()) == 1
    assert reduce_annular(A).norm == 0
    assert canonical_encoding(reduce_annular(A)) == "ann-enc/1|L"


def test_trivial_three_strands():
    A = closure(make_trivial(3))
    assert len(components(A)) == 3 and len(A.loops()) == 3
    assert has_adjacent_loops(A)
    R = reduce_annular(A)
    assert len(R.loops()) == 1 and is_reduced_annular(R)


def test_closure_needs_square():
    from strandf.families import right_vine
    with pytest.raises(AnnularError):
        closure(right_vine(3))


def test_unreduced_encoding_rejected():
    A = closure(word_to_element("x0"))
    assert redexes(A)
    with pytest.raises(AnnularError):
        canonical_encoding(A)


def test_frak_f_closure_connected_and_reduced():
    for n in range(2, 7):
        A = closure(frak_f(n))
        assert is_reduced_annular(A)
        assert len(components(A)) == 1
        assert len(A.cut) == 2 * n + 1


def test_frak_closures_agree():
    for n in range(2, 9):
        assert closure_encoding(frak_f(n)) == closure_encoding(frak_g(n))


def test_generators_not_conjugate():
    assert closure_encoding(word_to_element("x0")) != closure_encoding(word_to_element("x1"))
    assert closure_encoding(word_to_element("x0")) != closure_encoding(word_to_element("x0^-1"))


def test_x1_closure_has_loop():
    R = reduce_annular(closure(word_to_element("x1")))
    assert len(components(R)) == 2 and len(R.loops()) == 1


def test_nontrivial_closure_always_reduces(rng):
    for _ in range(200):
        f = word_to_element(random_word(rng, rng.randint(1, 16)))
        if f.norm == 0:
            continue
        A = closure(f)
        assert redexes(A), "closure of a nontrivial element is never reduced"
        assert annular_norm(reduce_annular(A)) <= f.norm - 2


def test_confluence(rng):
    for _ in range(60):
        f = word_to_element(random_word(rng, 18))
        A = closure(f)
        codes = {canonical_encoding(reduce_annular(A, random.Random(s))) for s in range(5)}
        assert len(codes) == 1


def test_idempotent(rng):
    for _ in range(40):
        R = reduce_annular(closure(word_to_element(random_word(rng, 14))))
        assert canonical_encoding(reduce_annular(R)) == canonical_encoding(R)


def test_conjugation_invariance(rng):
    for _ in range(100):
        f = word_to_element(random_word(rng, 12))
        u = word_to_element(random_word(rng, 8))
        g = multiply(multiply(inverse(u), f), u)
        assert closure_encoding(f) == closure_encoding(g)


def test_to_json():
    data = json.loads(to_json(reduce_annular(closure(word_to_element("x0 x1^-1")))))
    assert set(data) == {"nodes", "edges", "cut", "winding", "nesting"}
