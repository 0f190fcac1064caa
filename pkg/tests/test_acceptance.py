"""One test per acceptance criterion; a PASS/FAIL line for each is printed in
the terminal summary.

Values tagged "oracle" come from breadth-first search on the Cayley graph and
never touch the caret-weight table.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE, random_word
from strandf.annular import canonical_encoding, closure, closure_encoding, reduce_annular
from strandf.cayley import bfs_length
from strandf.conjugacy import (
    clf_bound, conjugates, conjugator_distance_exact, conjugator_norm_bound, element_bound,
    find_conjugator, step_bound, scr_element,
)
from strandf.families import (
    experiment_row, expected_shift_norm, f_element, frak_f, frak_g, frak_h, g_element,
    h_element, h_norm, lower_bound, remark_value,
)
from strandf.strand_core import concat, inverse, multiply, reduce
from strandf.thompson_f import TreePair, length_bfs, length_exact, word_to_diagram, word_to_element

# upper-bound witnesses x0^2 (x1 x0^-1)^n x1^-1 (x0 x1^-1)^n x0^-1: lengths found
# by breadth-first search, frozen here (the largest takes about a minute)
WITNESS_LENGTHS = {1: 8, 2: 12, 3: 16, 4: 20, 5: 24, 6: 28}


@contextmanager
def criterion(k: int, detail: str):
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE[k] = (False, f"{detail}: {exc}".splitlines()[0][:200])
        raise
    ACCEPTANCE.setdefault(k, (True, detail))


def test_c01_h_norm_identity():
    t = time.perf_counter()
    with criterion(1, "||h_n|| = (n-1)(2n+1), n = 2..12"):
        for n in range(2, 13):
            assert frak_h(n).norm == (n - 1) * (2 * n + 1) == h_norm(n)
        elapsed = time.perf_counter() - t
        assert elapsed < 10, f"took {elapsed:.1f}s"


def test_c02_conjugation_identity():
    with criterion(2, "f_n h_n = h_n g_n as reduced diagrams, n = 2..12"):
        for n in range(2, 13):
            h = frak_h(n)
            assert reduce(concat(frak_f(n), h)) == reduce(concat(h, frak_g(n)))


def test_c03_norm_profile():
    with criterion(3, "norm profile of f_n^-j h_n, j = 1..n+3, n = 2..10"):
        for n in range(2, 11):
            F, x = frak_f(n), frak_h(n)
            norms = {}
            for j in range(1, n + 4):
                x = multiply(inverse(F), x)
                norms[j] = x.norm
                if j <= n - 1:
                    want = h_norm(n) - 2 * j * (2 * n - 2 * j - 1)
                else:
                    want = 4 * n * j - h_norm(n)
                assert norms[j] == want == expected_shift_norm(n, -j), (n, j)
            low = min(norms.values())
            assert low == n * n - 1
            assert norms[n // 2] == low


def test_c04_lengths_oracle(ball):
    with criterion(4, "l(f_n) = l(g_n) = 8n-5: oracle n = 3, 4; table n = 3..10"):
        for n in (3, 4):
            for d in (f_element(n), g_element(n)):
                assert length_bfs(d, 8 * n - 5, ball) == 8 * n - 5
                assert length_bfs(d, 8 * n - 6, ball) is None
        for n in range(3, 11):
            assert length_exact(f_element(n)) == length_exact(g_element(n)) == 8 * n - 5


def _oracle_distance(n: int, ball):
    return conjugator_distance_exact(
        f_element(n), g_element(n), h_element(n),
        length=lambda key, cap: bfs_length(key, cap, ball), upper=remark_value(n))


def test_c05_conjugator_distance(ball):
    detail = "cd(f_n, g_n) closed form; oracle n = 3, 4; table n = 3..8; unique shift -floor(n/2) n = 4..8"
    t = time.perf_counter()
    with criterion(5, detail):
        oracle = {n: _oracle_distance(n, ball) for n in (3, 4)}
        assert oracle[4].distance == 26 and oracle[4].shift == -2 and oracle[4].unique
        rows = {n: experiment_row(n) for n in range(3, 9)}
        for n in range(4, 9):
            r = rows[n]
            assert r.cd == remark_value(n) and r.match
            assert r.unique and r.k_min == -(n // 2)
        assert time.perf_counter() - t < 300
        # n = 3: both routes agree with each other but not with the closed form
        assert oracle[3].distance == rows[3].cd == 14
        ACCEPTANCE[5] = (False, "n = 4..8 agree; at n = 3 the distance is 14 (shift -2), "
                                "not the closed-form 15; see decisions ledger")


@pytest.mark.xfail(strict=True, reason="an explicit conjugator of length 14 exists at n = 3")
def test_c05_closed_form_at_n3():
    assert experiment_row(3).cd == remark_value(3) == 15


def test_c05_short_conjugator_at_n3():
    # witness found by descending the breadth-first distances from f_3^-2 h_3
    w = "x1 x0^-1 x1^-1 x0^-1 x1 x1 x0 x1^-1 x0 x1 x0^-1 x1 x1 x0^-1"
    h = word_to_element(w)
    assert len(w.split()) == 14
    assert conjugates(f_element(3), g_element(3), h)


def test_c06_sandwich():
    with criterion(6, "(n^2-5n-4)/2 <= cd <= CLF bound at l(f)+l(g), n = 2..8"):
        for n in range(2, 9):
            r = experiment_row(n)
            assert lower_bound(n) <= r.cd <= clf_bound(r.len_f + r.len_g)


def test_c07_length_gate(ball):
    with criterion(7, "length table = breadth-first length on the whole radius-12 ball"):
        ball.grow(12)
        checked = bad = 0
        for key, dist in ball.dist.items():
            if dist > 12:
                continue
            checked += 1
            if length_exact(TreePair.from_key(key)) != dist:
                bad += 1
        assert checked == sum(ball.sphere_sizes[:13]) == 676061
        assert bad == 0


def test_c08_norm_length_bounds(ball):
    with criterion(8, "||f||/2-2 <= l <= 2||f||, l <= 2||f||-8 from 6 on, sharp witnesses"):
        rng = random.Random(8)
        for _ in range(1000):
            d = word_to_element(random_word(rng, rng.randint(1, 30)))
            ln = length_exact(d)
            if d.norm:
                assert Fraction(d.norm, 2) - 2 <= ln <= 2 * d.norm
            if d.norm >= 6:
                assert ln <= 2 * d.norm - 8
        for n in range(1, 7):
            low = word_to_element(f"x1^{n}")
            assert length_bfs(low, n, ball) == n == low.norm // 2 - 2
            w = word_to_element(f"x0^2 {'x1 x0^-1 ' * n}x1^-1 {'x0 x1^-1 ' * n}x0^-1")
            assert length_exact(w) == WITNESS_LENGTHS[n] == 2 * w.norm - 8
            if n <= 5:
                assert length_bfs(w, WITNESS_LENGTHS[n], ball) == WITNESS_LENGTHS[n]


def test_c09_conjugator_bounds():
    with criterion(9, "200 random conjugate pairs: verified h within norm and length bounds"):
        rng = random.Random(9)
        for _ in range(200):
            f = word_to_element(random_word(rng, rng.randint(1, 14)))
            u = word_to_element(random_word(rng, rng.randint(0, 10)))
            g = multiply(multiply(inverse(u), f), u)
            if f.norm == 0:
                continue
            cert = find_conjugator(f, g)
            assert cert is not None and conjugates(f, g, cert.conjugator_element)
            k = cert.annular_nodes
            assert cert.norm <= conjugator_norm_bound(f.norm, g.norm, k)
            n = length_exact(f) + length_exact(g)
            assert cert.length <= clf_bound(n)
            for r, d in ((cert.scr_f, f), (cert.scr_g, g)):
                assert r.conjugator.norm <= element_bound(d.norm)
                for step in r.trace:
                    assert step.realized <= step.bound == step_bound(step.norm, step.strands)


def test_c10_rewriting_soundness():
    with criterion(10, "confluence of both reductions; closure encodings are class invariants"):
        rng = random.Random(10)
        for _ in range(100):
            w = random_word(rng, 20)
            d = concat(word_to_diagram(w), inverse(word_to_diagram(random_word(rng, 20))))
            forms = {reduce(d, random.Random(s)).key() for s in range(5)}
            assert len(forms) == 1
            A = closure(reduce(d))
            codes = {canonical_encoding(reduce_annular(A, random.Random(s))) for s in range(5)}
            assert len(codes) == 1
        for _ in range(200):
            f = word_to_element(random_word(rng, rng.randint(1, 16)))
            u = word_to_element(random_word(rng, rng.randint(0, 10)))
            assert closure_encoding(f) == closure_encoding(multiply(multiply(inverse(u), f), u))
