"""The pairs f_n, g_n whose conjugator distance grows quadratically.

f_n and g_n are conjugates of (2n+1)- and (3n)-strand diagrams by right
vines. A canonical conjugating diagram between those is found from the norm
profile of its shifts by powers of the first diagram.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional

from .conjugacy import (
    InvariantViolation, align_same_closure, centralizer_is_cyclic_certificate, clf_bound,
    conjugates, conjugator_distance_exact,
)
from .strand_core import (
    IN, LEFT, OUT, RIGHT, SINK, SOURCE, SPLIT, DiagramError, StrandDiagram, _Builder,
    inverse, make_trivial, multiply,
)
from .thompson_f import length_exact, parse_word, word_to_element


def right_vine(k: int) -> StrandDiagram:
    """(1,k)-diagram: k-1 splits, each hanging off the right output of the last."""
    if k < 1:
        raise DiagramError("a vine needs at least one leaf")
    if k == 1:
        return make_trivial(1)
    b = _Builder()
    src = b.node(SOURCE)
    sinks = [b.node(SINK) for _ in range(k)]
    port = (src, OUT)
    for i in range(k - 1):
        s = b.node(SPLIT)
        b.link(port, (s, IN))
        b.link((s, LEFT), (sinks[i], IN))
        port = (s, RIGHT)
    b.link(port, (sinks[-1], IN))
    return b.freeze([src], sinks)


def _need(n: int) -> None:
    if n < 2:
        raise ValueError("the family starts at n = 2")


def f_word(n: int) -> str:
    _need(n)
    return " ".join(["x0"] + ["x1^-1 x0^-1 x1 x0^-1"] * (n - 1) + ["x1^-2"]
                    + ["x0 x1 x0 x1^-1"] * (n - 1))


def g_word(n: int) -> str:
    _need(n)
    return " ".join(["x0"] + ["x1^-2 x0^-1 x1 x0^-1"] * (n - 1) + ["x1^-2"]
                    + ["x0 x1 x0"] * (n - 1))


def f_index_word(n: int) -> str:
    """x0 x3^2 x7^2 ... x_{4n-5}^2 x_{4n-3}^-2 ... x5^-2 x1^-2"""
    _need(n)
    up = [f"x{k}^2" for k in range(3, 4 * n - 4, 4)]
    down = [f"x{k}^-2" for k in range(4 * n - 3, 0, -4)]
    return " ".join(["x0"] + up + down)


def g_index_word(n: int) -> str:
    """x0 x4^2 x9^2 ... x_{5n-6}^2 x_{5n-4}^-2 ... x6^-2 x1^-2"""
    _need(n)
    up = [f"x{k}^2" for k in range(4, 5 * n - 5, 5)]
    down = [f"x{k}^-2" for k in range(5 * n - 4, 0, -5)]
    return " ".join(["x0"] + up + down)


@lru_cache(maxsize=None)
def f_element(n: int) -> StrandDiagram:
    d = word_to_element(f_word(n))
    if d != word_to_element(f_index_word(n)):
        raise InvariantViolation(f"the two word forms of f_{n} disagree")
    return d


@lru_cache(maxsize=None)
def g_element(n: int) -> StrandDiagram:
    d = word_to_element(g_word(n))
    if d != word_to_element(g_index_word(n)):
        raise InvariantViolation(f"the two word forms of g_{n} disagree")
    return d


def _unvine(x: StrandDiagram, k: int) -> StrandDiagram:
    t = right_vine(k)
    return multiply(multiply(inverse(t), x), t)


@lru_cache(maxsize=None)
def frak_f(n: int) -> StrandDiagram:
    d = _unvine(f_element(n), 2 * n + 1)
    if d.shape != (2 * n + 1, 2 * n + 1) or d.norm != 4 * n:
        raise InvariantViolation(f"unexpected diagram for f_{n}: {d.shape}, norm {d.norm}")
    return d


@lru_cache(maxsize=None)
def frak_g(n: int) -> StrandDiagram:
    d = _unvine(g_element(n), 3 * n)
    if d.shape != (3 * n, 3 * n) or d.norm != 4 * n:
        raise InvariantViolation(f"unexpected diagram for g_{n}: {d.shape}, norm {d.norm}")
    return d


def h_norm(n: int) -> int:
    return (n - 1) * (2 * n + 1)


def expected_shift_norm(n: int, k: int) -> int:
    """Norm of f^k h for the canonical h (k >= 0 grows, k < 0 dips then grows)."""
    if k >= 0:
        return h_norm(n) + 4 * n * k
    j = -k
    if j <= n - 1:
        return h_norm(n) - 2 * j * (2 * n - 2 * j - 1)
    return 4 * n * j - h_norm(n)


def _shift(f: StrandDiagram, h: StrandDiagram, k: int) -> StrandDiagram:
    step = f if k >= 0 else inverse(f)
    for _ in range(abs(k)):
        h = multiply(step, h)
    return h


@lru_cache(maxsize=None)
def frak_h(n: int) -> StrandDiagram:
    """The (2n+1, 3n)-diagram with f h = h g that sits floor(n/2) steps above
    the norm minimum of its shift class."""
    F, G = frak_f(n), frak_g(n)
    h0 = align_same_closure(F, G)
    Finv = inverse(F)
    norms = {0: h0}
    best = h0.norm
    # shifts k with 4n|k| - ||h0|| > best cannot beat the incumbent
    for step, sign in ((F, 1), (Finv, -1)):
        cur, k = h0, 0
        while 4 * n * (abs(k) + 1) - h0.norm <= best:
            k += sign
            cur = multiply(step, cur)
            norms[k] = cur
            best = min(best, cur.norm)
    low = [k for k, d in norms.items() if d.norm == best]
    if best != n * n - 1 or len(low) != 1:
        raise InvariantViolation(f"shift profile minimum {best} at {low}, expected {n * n - 1}")
    h = _shift(F, norms[low[0]], n // 2)
    if h.norm != h_norm(n):
        raise InvariantViolation(f"norm {h.norm} differs from {h_norm(n)}")
    if multiply(F, h) != multiply(h, G):
        raise InvariantViolation("f h = h g fails")
    return h


def shift_profile(n: int, ks: Iterable[int]) -> dict[int, int]:
    """k -> ||f^k h|| for the canonical diagrams."""
    F, h = frak_f(n), frak_h(n)
    return {k: _shift(F, h, k).norm for k in ks}


@lru_cache(maxsize=None)
def h_element(n: int) -> StrandDiagram:
    """The element t_{2n+1} h t_{3n}^-1, verified to conjugate f_n to g_n."""
    h = multiply(multiply(right_vine(2 * n + 1), frak_h(n)), inverse(right_vine(3 * n)))
    if h.shape != (1, 1) or not conjugates(f_element(n), g_element(n), h):
        raise InvariantViolation(f"h_{n} does not conjugate f_{n} to g_{n}")
    return h


def remark_value(n: int) -> int:
    """ceil(2n^2 - 5n/2 + 4)"""
    return math.ceil(Fraction(4 * n * n - 5 * n + 8, 2))


def lower_bound(n: int) -> Fraction:
    return Fraction(n * n - 5 * n - 4, 2)


@dataclass
class ExperimentRecord:
    n: int
    len_f: int
    len_g: int
    cd: int
    k_min: int
    unique: bool
    remark33: int
    thm32_lower: Fraction
    cor25_upper: Fraction
    match: bool

    def row(self) -> list:
        d = asdict(self)
        return [str(d[c]) for c in CSV_COLUMNS]


CSV_COLUMNS = ["n", "len_f", "len_g", "cd", "k_min", "unique", "remark33", "thm32_lower",
               "cor25_upper", "match"]


def experiment_row(n: int, length: Optional[Callable] = None,
                   upper: Optional[int] = None) -> ExperimentRecord:
    f, g = f_element(n), g_element(n)
    if not centralizer_is_cyclic_certificate(f):
        raise InvariantViolation(f"centralizer certificate fails for f_{n}")
    lf, lg = length_exact(f), length_exact(g)
    res = conjugator_distance_exact(f, g, h_element(n), length=length, upper=upper)
    lower = lower_bound(n)
    upper_b = clf_bound(lf + lg)
    target = remark_value(n)
    if n >= 3:
        match = res.distance == target
    else:
        # the closed formula is only claimed from n = 3 on
        match = lower <= res.distance <= upper_b
    return ExperimentRecord(n, lf, lg, res.distance, res.shift, res.unique, target, lower,
                            upper_b, match)


def run_clf_experiment(n_range: Iterable[int]) -> list[ExperimentRecord]:
    return [experiment_row(n) for n in sorted(set(n_range))]


def records_to_csv(records: Iterable[ExperimentRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


FAMILIES = {
    "fn": f_element,
    "gn": g_element,
    "hn": h_element,
    "vine": right_vine,
    "frak_f": frak_f,
    "frak_g": frak_g,
    "frak_h": frak_h,
}


def family_diagram(spec: str) -> StrandDiagram:
    """Resolve specs like ``fn:4`` or ``vine:7``."""
    name, _, arg = spec.partition(":")
    if name not in FAMILIES or not arg.strip().lstrip("-").isdigit():
        raise ValueError(f"unknown family spec {spec!r}; try one of "
                         + ", ".join(f"{k}:N" for k in FAMILIES))
    return FAMILIES[name](int(arg))


def family_word(spec: str) -> Optional[str]:
    name, _, arg = spec.partition(":")
    if name == "fn":
        return f_word(int(arg))
    if name == "gn":
        return g_word(int(arg))
    return None
