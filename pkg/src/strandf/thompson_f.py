"""Elements of Thompson's group F: words, tree pairs, PL maps, word length.

Products are read left to right: ``f g`` applies f first. With this
convention x0 doubles near 0 (slope 2 on [0, 1/4]) and
x_n = x0^(1-n) x1 x0^(n-1) for n >= 2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Optional, Sequence

from . import cayley
from .strand_core import (
    IN, LEFT, MERGE, OUT, RIGHT, SINK, SOURCE, SPLIT, DiagramError, StrandDiagram,
    _Builder, is_reduced, make_trivial, multiply,
)


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NotAnElementError(DiagramError):
    """Diagram is not a reduced (1,1)-diagram."""


# --------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    """A product of generators x_k^(+-1), read left to right."""

    letters: tuple[tuple[int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def expand(self) -> "Word":
        """Rewrite every x_n with n >= 2 over x0, x1."""
        out: list[tuple[int, int]] = []
        for g, e in self.letters:
            if g <= 1:
                out.append((g, e))
                continue
            body = [(0, -1)] * (g - 1) + [(1, e)] + [(0, 1)] * (g - 1)
            out.extend(body)
        return Word(tuple(out))

    def generator_indices(self) -> list[int]:
        """Letters as indices 0..3 into x0, x0^-1, x1, x1^-1."""
        return [2 * g + (0 if e > 0 else 1) for g, e in self.expand().letters]

    def __str__(self) -> str:
        return format_word(self)


_TOKEN = re.compile(r"\s*(?:x_?(\d+)(?:\^\{?(-?\d+)\}?)?)")


def parse_word(text: str, expand: bool = True) -> Word:
    """Parse ``x0 x1^-2 x3``; x_n for n >= 2 is expanded unless told otherwise.

    Also accepts ``1`` or ``e`` (or the empty string) for the identity.
    """
    stripped = text.strip()
    if stripped in ("", "1", "e", "id"):
        return Word()
    letters: list[tuple[int, int]] = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            at = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise WordSyntaxError(f"expected a generator like x0 or x1^-2, found {text[at]!r}", at)
        g = int(m.group(1))
        e = int(m.group(2)) if m.group(2) is not None else 1
        end = m.end()
        if end < n and not text[end].isspace():
            raise WordSyntaxError(f"unexpected {text[end]!r}", end)
        sign = 1 if e > 0 else -1
        letters.extend([(g, sign)] * abs(e))
        pos = end
    w = Word(tuple(letters))
    return w.expand() if expand else w


def format_word(w: Word) -> str:
    """Compact text form with consecutive equal letters collected into powers."""
    if not w.letters:
        return "1"
    parts = []
    runs: list[list[int]] = []
    for g, e in w.letters:
        if runs and runs[-1][0] == g and (runs[-1][1] > 0) == (e > 0):
            runs[-1][1] += e
        else:
            runs.append([g, e])
    for g, e in runs:
        parts.append(f"x{g}" if e == 1 else f"x{g}^{e}")
    return " ".join(parts)


def word_from_indices(idx: Iterable[int]) -> Word:
    return Word(tuple((i // 2, 1 if i % 2 == 0 else -1) for i in idx))


# --------------------------------------------------------------------------
# tree pairs

_S = 256
_P = [1 << (_S - d) for d in range(_S + 1)]


def _valid_depths(depths: Sequence[int]) -> bool:
    total = 0
    for d in depths:
        if d < 0 or d > _S:
            return False
        if total % _P[d]:
            return False
        total += _P[d]
    return total == 1 << _S


@dataclass(frozen=True)
class TreePair:
    """Reduced tree pair given by the leaf depths of both trees, left to right.

    The element maps the k-th leaf interval of the domain tree affinely onto
    the k-th leaf interval of the range tree.
    """

    domain: tuple[int, ...]
    range: tuple[int, ...]

    def __post_init__(self):
        if len(self.domain) != len(self.range):
            raise ValueError("trees have different leaf counts")
        if not (_valid_depths(self.domain) and _valid_depths(self.range)):
            raise ValueError("depth sequence does not describe a binary tree")

    @classmethod
    def from_key(cls, key: bytes) -> "TreePair":
        d, r = cayley.unpack(key)
        return cls(tuple(d), tuple(r))

    @classmethod
    def identity(cls) -> "TreePair":
        return cls((0,), (0,))

    def key(self) -> bytes:
        return cayley.pack(self.domain, self.range)

    @property
    def carets(self) -> int:
        return len(self.domain) - 1

    def is_reduced(self) -> bool:
        return cayley.reduce_pair(self.domain, self.range) == self.key()

    def reduced(self) -> "TreePair":
        return TreePair.from_key(cayley.reduce_pair(self.domain, self.range))

    def inverse(self) -> "TreePair":
        return TreePair(self.range, self.domain)

    def __mul__(self, other: "TreePair") -> "TreePair":
        return TreePair.from_key(cayley.multiply_keys(self.key(), other.key()))

    def __str__(self) -> str:
        return f"{_tree_text(self.domain)} -> {_tree_text(self.range)}"


def _tree_text(depths: Sequence[int]) -> str:
    """Parenthesised form, e.g. depths (2, 2, 1) -> ((..).)"""
    # each stack entry is a partial subtree at some depth; two siblings at
    # equal depth fold into their parent one level up
    stack: list[tuple[str, int]] = []
    for d in depths:
        cur = (".", d)
        while stack and stack[-1][1] == cur[1]:
            left = stack.pop()
            cur = (f"({left[0]}{cur[0]})", cur[1] - 1)
        stack.append(cur)
    return stack[0][0]


def generator_pair(n: int) -> TreePair:
    """Tree pair of x_n: x0's pattern placed on [1 - 2^-n, 1]."""
    if n < 0:
        raise ValueError("generator index must be nonnegative")
    head = tuple(range(1, n + 1))
    return TreePair(head + (n + 2, n + 2, n + 1), head + (n + 1, n + 2, n + 2))


def word_to_treepair(w: Word) -> TreePair:
    return TreePair.from_key(cayley.word_key(w.generator_indices()))


# --------------------------------------------------------------------------
# diagrams <-> tree pairs


def treepair_to_diagram(t: TreePair) -> StrandDiagram:
    """Splits of the domain tree on top, merges of the range tree below."""
    b = _Builder()
    src = b.node(SOURCE)
    snk = b.node(SINK)
    outs = []
    slots = [((src, OUT), 0)]
    for d in t.domain:
        port, sd = slots.pop()
        while sd < d:
            s = b.node(SPLIT)
            b.link(port, (s, IN))
            slots.append(((s, RIGHT), sd + 1))
            port, sd = (s, LEFT), sd + 1
        outs.append(port)
    ins = []
    slots = [((snk, IN), 0)]
    for d in t.range:
        port, sd = slots.pop()
        while sd < d:
            m = b.node(MERGE)
            b.link((m, OUT), port)
            slots.append(((m, RIGHT), sd + 1))
            port, sd = (m, LEFT), sd + 1
        ins.append(port)
    for a, c in zip(outs, ins):
        b.link(a, c)
    return b.freeze([src], [snk])


def _split_leaves(d: StrandDiagram) -> tuple[list[int], list[tuple]]:
    depths, edges = [], []
    stack = [(d.succ[(d.sources[0], OUT)], d.sources[0], OUT, 0)]
    while stack:
        (v, vp), tail, tport, depth = stack.pop()
        if d.kinds[v] == SPLIT:
            stack.append((d.succ[(v, RIGHT)], v, RIGHT, depth + 1))
            stack.append((d.succ[(v, LEFT)], v, LEFT, depth + 1))
        else:
            depths.append(depth)
            edges.append((tail, tport))
    return depths, edges


def _merge_leaves(d: StrandDiagram) -> tuple[list[int], list[tuple]]:
    depths, edges = [], []
    stack = [(d.pred[(d.sinks[0], IN)], 0)]
    while stack:
        (v, vp), depth = stack.pop()
        if d.kinds[v] == MERGE:
            stack.append((d.pred[(v, RIGHT)], depth + 1))
            stack.append((d.pred[(v, LEFT)], depth + 1))
        else:
            depths.append(depth)
            edges.append((v, vp))
    return depths, edges


def diagram_to_treepair(d: StrandDiagram) -> TreePair:
    if d.shape != (1, 1):
        raise NotAnElementError(f"expected a (1,1)-diagram, got {d.shape}")
    dd, de = _split_leaves(d)
    rd, re_ = _merge_leaves(d)
    if de != re_ or not is_reduced(d):
        raise NotAnElementError("diagram is not reduced")
    return TreePair(tuple(dd), tuple(rd))


def element_key(d: StrandDiagram) -> bytes:
    return diagram_to_treepair(d).key()


def key_to_diagram(key: bytes) -> StrandDiagram:
    return treepair_to_diagram(TreePair.from_key(key))


_GEN_DIAGRAMS: dict[int, StrandDiagram] = {}


def generator_diagram(n: int, sign: int = 1) -> StrandDiagram:
    if n not in _GEN_DIAGRAMS:
        _GEN_DIAGRAMS[n] = treepair_to_diagram(generator_pair(n))
    g = _GEN_DIAGRAMS[n]
    return g if sign > 0 else g.__invert__()


def word_to_diagram(w: Word | str) -> StrandDiagram:
    """Multiply generator diagrams letter by letter, reducing as it goes."""
    if isinstance(w, str):
        w = parse_word(w)
    out = make_trivial(1)
    for g, e in w.expand().letters:
        out = multiply(out, generator_diagram(g, e))
    return out


def word_to_element(w: Word | str) -> StrandDiagram:
    """Same element as :func:`word_to_diagram`, via the packed tree-pair product."""
    if isinstance(w, str):
        w = parse_word(w)
    return key_to_diagram(cayley.word_key(w.generator_indices()))


# --------------------------------------------------------------------------
# normal form


def _leaf_exponents(depths: Sequence[int]) -> list[int]:
    """Length of the longest run of left edges up from each leaf that stays
    off the right spine."""
    out = []
    start = 0
    one = 1 << _S
    for d in depths:
        e = 0
        s, dd = start, d
        while dd > 0 and s % _P[dd - 1] == 0 and s + _P[dd - 1] != one:
            e += 1
            dd -= 1
        out.append(e)
        start += _P[d]
    return out


def normal_form(t: TreePair) -> tuple[list[int], list[int]]:
    """Exponent vectors (a, b) with t = x0^a0 x1^a1 ... (x0^b0 x1^b1 ...)^-1."""
    return _leaf_exponents(t.domain), _leaf_exponents(t.range)


def element_to_word(d: StrandDiagram | TreePair, expand: bool = False) -> Word:
    """Normal-form word over the x_k; not geodesic in general."""
    t = d if isinstance(d, TreePair) else diagram_to_treepair(d)
    a, b = normal_form(t)
    letters: list[tuple[int, int]] = []
    for k, e in enumerate(a):
        letters.extend([(k, 1)] * e)
    for k in range(len(b) - 1, -1, -1):
        letters.extend([(k, -1)] * b[k])
    w = Word(tuple(letters))
    return w.expand() if expand else w


# --------------------------------------------------------------------------
# PL maps


@dataclass(frozen=True)
class PLMap:
    """Piecewise-linear homeomorphism of [0,1] with dyadic breakpoints.

    ``breakpoints`` are the interior points where the slope changes and
    ``slopes`` has one entry per piece, so ``len(slopes) == len(breakpoints)+1``.
    """

    breakpoints: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]
    values: tuple[Fraction, ...] = field(repr=False, default=())

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise ValueError("argument outside [0, 1]")
        xs = (Fraction(0),) + self.breakpoints
        i = 0
        while i + 1 < len(xs) and xs[i + 1] <= x:
            i += 1
        return self.values[i] + self.slopes[i] * (x - xs[i])

    def vertices(self) -> list[tuple[Fraction, Fraction]]:
        xs = (Fraction(0),) + self.breakpoints + (Fraction(1),)
        return list(zip(xs, self.values + (Fraction(1),)))

    def is_identity(self) -> bool:
        return not self.breakpoints and self.slopes == (1,)


def element_to_plmap(t: TreePair | StrandDiagram) -> PLMap:
    if isinstance(t, StrandDiagram):
        t = diagram_to_treepair(t)
    xs, ys, ss = [], [], []
    x = y = Fraction(0)
    for a, b in zip(t.domain, t.range):
        s = Fraction(2) ** (a - b)
        if not ss or ss[-1] != s:
            xs.append(x)
            ys.append(y)
            ss.append(s)
        x += Fraction(1, 2 ** a)
        y += Fraction(1, 2 ** b)
    return PLMap(tuple(xs[1:]), tuple(ss), tuple(ys))


def slope_at_0(f: PLMap) -> Fraction:
    return f.slopes[0]


def slope_at_1(f: PLMap) -> Fraction:
    return f.slopes[-1]


def interior_fixed_point_free(f: PLMap) -> bool:
    """True iff f(x) != x on (0,1); the identity returns False."""
    if f.is_identity():
        return False
    gaps = [v - x for x, v in zip(f.breakpoints, f.values[1:])]
    if not gaps:
        return True
    return all(g > 0 for g in gaps) or all(g < 0 for g in gaps)


def log2_exact(q: Fraction) -> int:
    n, d = q.numerator, q.denominator
    if n == 1 and d & (d - 1) == 0:
        return -(d.bit_length() - 1)
    if d == 1 and n & (n - 1) == 0:
        return n.bit_length() - 1
    raise ValueError(f"{q} is not a power of two")


# --------------------------------------------------------------------------
# word length

LL, L0, I0, IR, R0, RNI, RI = "LL", "L0", "I0", "IR", "R0", "RNI", "RI"
CARET_TYPES = (L0, LL, I0, IR, R0, RNI, RI)

_W = {
    (L0, L0): 0,
    (LL, LL): 2, (LL, I0): 2, (LL, IR): 2, (LL, R0): 1, (LL, RNI): 1, (LL, RI): 1,
    (I0, I0): 2, (I0, IR): 4, (I0, RNI): 1, (I0, RI): 3,
    (IR, IR): 4, (IR, RNI): 3, (IR, RI): 3,
    (R0, R0): 0,
    (RNI, RNI): 2, (RNI, RI): 2,
    (RI, RI): 2,
}
CARET_WEIGHTS: dict[tuple[str, str], int] = {}
for (_a, _b), _v in _W.items():
    CARET_WEIGHTS[(_a, _b)] = _v
    CARET_WEIGHTS[(_b, _a)] = _v
del _W, _a, _b, _v


def caret_types(depths: Sequence[int]) -> list[str]:
    """Type of each caret in infix order.

    Caret k sits between leaves k and k+1. Carets on the left spine (the root
    included) are left carets, the first of them being L0; carets on the right
    spine below the root are right carets; the rest are interior. Interior
    carets split by whether their right child is a caret (IR) or a leaf (I0).
    Right carets are R0 for the last caret, RI when the next caret in infix
    order is interior, RNI otherwise.
    """
    ends = list(accumulate(_P[d] for d in depths))
    n = len(depths) - 1
    one = 1 << _S
    kinds: list[Optional[str]] = []
    for k in range(n):
        p = ends[k]
        tz = (p & -p).bit_length() - 1
        if k == 0:
            kinds.append(L0)
        elif p == 1 << tz:
            kinds.append(LL)
        elif p + (1 << tz) == one:
            kinds.append(None)
        else:
            v = _S - 1 - tz
            kinds.append(I0 if depths[k + 1] == v + 1 else IR)
    for k in range(n):
        if kinds[k] is None:
            if k == n - 1:
                kinds[k] = R0
            else:
                kinds[k] = RI if kinds[k + 1] in (I0, IR) else RNI
    return kinds  # type: ignore[return-value]


def caret_pair_weights(t: TreePair) -> list[int]:
    out = []
    for a, b in zip(caret_types(t.domain), caret_types(t.range)):
        try:
            w = CARET_WEIGHTS[(a, b)]
        except KeyError:
            raise AssertionError(f"caret pair ({a}, {b}) cannot occur in a reduced pair")
        assert w <= 4, "caret weights never exceed 4"
        out.append(w)
    return out


def length_exact(d: StrandDiagram | TreePair) -> int:
    """Word length over {x0, x1} as a sum of caret-pair weights."""
    t = d if isinstance(d, TreePair) else diagram_to_treepair(d)
    if not t.is_reduced():
        raise NotAnElementError("tree pair is not reduced")
    return sum(caret_pair_weights(t))


def length_bfs(d: StrandDiagram | TreePair, cap: int,
               ball: Optional[cayley.IdentityBall] = None) -> Optional[int]:
    """Word length by two-sided breadth-first search; None means above cap.

    Independent of the weight table. Pass a shared ``ball`` to reuse the
    identity side between calls.
    """
    t = d if isinstance(d, TreePair) else diagram_to_treepair(d)
    return cayley.bfs_length(t.key(), cap, ball)


def key_length(key: bytes) -> int:
    """length_exact on a packed element."""
    return length_exact(TreePair.from_key(key))
