from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import random_word
from strandf.annular import closure_encoding
from strandf.conjugacy import (
    CertificateError, NotSameClosure, align_same_closure, are_conjugate,
    centralizer_is_cyclic_certificate, clf_bound, conjugates, conjugator_distance_exact,
    conjugator_norm_bound, element_bound, find_conjugator, is_strongly_cyclically_reduced,
    step_bound, scr_element, strongly_cyclically_reduce,
)
from strandf.families import f_element, frak_f, frak_g
from strandf.strand_core import inverse, make_trivial, multiply
from strandf.thompson_f import length_exact, word_to_element


def test_bounds():
    assert step_bound(4, 1) == 2
    assert element_bound(4) == 2
    assert conjugator_norm_bound(1, 1, 0) == Fraction(14, 8)
    assert clf_bound(2) == 64


def test_scr_trivial_cases():
    r = strongly_cyclically_reduce(make_trivial(1))
    assert r.reduced_diagram == make_trivial(1) and r.conjugator == make_trivial(1)
    r = scr_element(make_trivial(1))
    assert r.conjugator.norm == 0


def test_scr_fixes_frak_f():
    for n in range(2, 6):
        r = strongly_cyclically_reduce(frak_f(n))
        assert r.reduced_diagram == frak_f(n) and r.conjugator.norm == 0 and not r.trace


def test_scr_of_x0():
    r = scr_element(word_to_element("x0"))
    assert r.conjugator.norm <= 2
    assert is_strongly_cyclically_reduced(r.reduced_diagram)
    assert r.reduced_diagram.norm <= 4


def test_scr_of_frak_g_splits_blocks():
    assert not is_strongly_cyclically_reduced(frak_g(2))
    r = strongly_cyclically_reduce(frak_g(2))
    assert r.trace[0].case == "A"
    assert is_strongly_cyclically_reduced(r.reduced_diagram)


def test_scr_traces_respect_budget(rng):
    for _ in range(100):
        f = word_to_element(random_word(rng, rng.randint(1, 20)))
        r = scr_element(f)
        assert r.conjugator.norm <= element_bound(f.norm) or f.norm == 0
        for step in r.trace:
            assert step.realized <= step.bound
        norms = [s.norm for s in r.trace] + [r.reduced_diagram.norm]
        assert norms == sorted(norms, reverse=True)


def test_scr_rejects_non_square():
    from strandf.families import right_vine
    from strandf.strand_core import DiagramError
    with pytest.raises(DiagramError):
        strongly_cyclically_reduce(right_vine(2))


def test_align_same_closure():
    f = frak_f(3)
    h = align_same_closure(f, f)
    assert multiply(f, h) == multiply(h, f)
    h = align_same_closure(f, frak_g(3))
    assert multiply(f, h) == multiply(h, frak_g(3))
    assert h.norm <= Fraction(3, 2) * 12 ** 2


def test_align_rejects_different_closures():
    with pytest.raises(NotSameClosure):
        align_same_closure(frak_f(2), frak_f(3))


def test_not_conjugate():
    assert find_conjugator(word_to_element("x0"), word_to_element("x1")) is None
    assert not are_conjugate(word_to_element("x0"), word_to_element("x1"))


def test_find_conjugator_on_random_pairs(rng):
    for _ in range(60):
        f = word_to_element(random_word(rng, rng.randint(1, 12)))
        u = word_to_element(random_word(rng, rng.randint(0, 10)))
        g = multiply(multiply(inverse(u), f), u)
        cert = find_conjugator(f, g)
        assert cert is not None and cert.verified
        assert conjugates(f, g, cert.conjugator_element)
        assert cert.norm <= cert.norm_bound
        assert cert.length <= clf_bound(length_exact(f) + length_exact(g))
        assert are_conjugate(f, g)


def test_certificate_dict():
    cert = find_conjugator(word_to_element("x0 x1"), word_to_element("x1 x0"))
    d = cert.to_dict()
    assert d["verified"] and d["conjugator_word"] == "x0" and d["length"] == 1


def test_centralizer_certificate():
    assert centralizer_is_cyclic_certificate(word_to_element("x0"))
    assert not centralizer_is_cyclic_certificate(word_to_element("x1"))
    for n in range(2, 9):
        assert centralizer_is_cyclic_certificate(f_element(n))
    with pytest.raises(CertificateError):
        centralizer_is_cyclic_certificate(make_trivial(1))


def test_distance_trivial_cases():
    f = word_to_element("x0")
    r = conjugator_distance_exact(f, f, make_trivial(1))
    assert r.distance == 0 and r.shift == 0
    e = make_trivial(1)
    assert conjugator_distance_exact(e, e, e).distance == 0


def test_distance_of_x0_to_conjugate():
    f = word_to_element("x0")
    u = word_to_element("x1 x1 x0^-1 x1")
    g = multiply(multiply(inverse(u), f), u)
    r = conjugator_distance_exact(f, g, u)
    # every conjugator is x0^k u; the shortest has length at most that of u
    assert r.distance <= 4
    assert closure_encoding(f) == closure_encoding(g)


def test_distance_needs_certificate():
    with pytest.raises(CertificateError):
        conjugator_distance_exact(word_to_element("x1"), word_to_element("x1"), make_trivial(1))
    with pytest.raises(CertificateError):
        conjugator_distance_exact(word_to_element("x0"), word_to_element("x0"),
                                  word_to_element("x1"))
