"""Byte-packed elements of F and breadth-first search on the Cayley graph.

An element is stored as the leaf-depth sequences of its reduced tree pair,
domain then range, concatenated into one ``bytes`` key. Keys are in bijection
with reduced diagrams, so they double as dictionary keys for search. Right
multiplication by a generator refines the range partition at the generator's
breakpoints, shifts depths piecewise, then reduces at the seams.
"""

from __future__ import annotations

from bisect import bisect_left
from itertools import accumulate
from typing import Iterable, Optional

MAX_DEPTH = 255
_SCALE = 256
_P = [1 << (_SCALE - d) for d in range(_SCALE + 1)]
_ONE = 1 << _SCALE

IDENTITY = b"\x00\x00"


def _shift_table(delta: int) -> bytes:
    return bytes(min(max(x + delta, 0), 255) for x in range(256))


_TABLES = {-1: _shift_table(-1), 0: None, 1: _shift_table(1)}


def _frac_scaled(num: int, den_log: int) -> int:
    return num << (_SCALE - den_log)


# Each generator: breakpoints of its domain partition and the depth change
# on each piece. Index order is x0, x0^-1, x1, x1^-1.
GENERATORS = (
    ((_frac_scaled(1, 2), _frac_scaled(1, 1)), (-1, 0, 1)),
    ((_frac_scaled(1, 1), _frac_scaled(3, 2)), (1, 0, -1)),
    ((_frac_scaled(1, 1), _frac_scaled(5, 3), _frac_scaled(3, 2)), (0, -1, 0, 1)),
    ((_frac_scaled(1, 1), _frac_scaled(3, 2), _frac_scaled(7, 3)), (0, 1, 0, -1)),
)
GENERATOR_NAMES = ("x0", "x0^-1", "x1", "x1^-1")
INVERSE_GEN = (1, 0, 3, 2)


def pack(domain: Iterable[int], rng: Iterable[int]) -> bytes:
    d = bytes(domain)
    r = bytes(rng)
    if len(d) != len(r):
        raise ValueError("tree pair halves differ in leaf count")
    return d + r


def unpack(key: bytes) -> tuple[bytes, bytes]:
    h = len(key) // 2
    return key[:h], key[h:]


def key_norm(key: bytes) -> int:
    """Interior node count of the diagram (two carets per leaf beyond the first)."""
    return len(key) - 2


def invert(key: bytes) -> bytes:
    d, r = unpack(key)
    return r + d


def reduce_pair(domain, rng) -> bytes:
    """Cancel caret pairs whose leaves are siblings in both trees."""
    stack: list[list[int]] = []
    sd = sr = 0
    P = _P
    for a, b in zip(domain, rng):
        cur = [a, b, sd, sr]
        sd += P[a]
        sr += P[b]
        while stack:
            top = stack[-1]
            if (top[0] == cur[0] and top[1] == cur[1]
                    and top[2] % P[cur[0] - 1] == 0 and top[3] % P[cur[1] - 1] == 0):
                stack.pop()
                cur = [cur[0] - 1, cur[1] - 1, top[2], top[3]]
            else:
                break
        stack.append(cur)
    return bytes(e[0] for e in stack) + bytes(e[1] for e in stack)


def _sibling_start(seq: bytes, i: int) -> bool:
    """Does leaf i start where a node one level up starts?"""
    d = seq[i]
    return sum(map(_P.__getitem__, seq[:i])) % _P[d - 1] == 0


def mul_gen(key: bytes, g: int) -> bytes:
    """Right-multiply an element by generator g (index into GENERATORS)."""
    h = len(key) // 2
    D, R = key[:h], key[h:]
    bps, deltas = GENERATORS[g]
    cum = list(accumulate(map(_P.__getitem__, R)))
    cuts = []
    for b in bps:
        i = bisect_left(cum, b)
        while cum[i] != b:
            d = R[i] + 1
            e = D[i] + 1
            if d > MAX_DEPTH or e > MAX_DEPTH:
                raise OverflowError("tree depth exceeds the packed representation")
            R = R[:i] + bytes((d, d)) + R[i + 1:]
            D = D[:i] + bytes((e, e)) + D[i + 1:]
            half = _P[d]
            start = cum[i] - 2 * half
            cum[i:i + 1] = [start + half, start + 2 * half]
            if b > start + half:
                i += 1
        cuts.append(i + 1)
    parts = []
    prev = 0
    for c, delta in zip(cuts + [len(R)], deltas):
        seg = R[prev:c]
        t = _TABLES[delta]
        parts.append(seg if t is None else seg.translate(t))
        prev = c
    R2 = b"".join(parts)
    n = len(R2)
    for c in cuts:
        if 0 < c < n and D[c - 1] == D[c] and R2[c - 1] == R2[c]:
            if _sibling_start(D, c - 1) and _sibling_start(R2, c - 1):
                return reduce_pair(D, R2)
    return D + R2


def neighbors(key: bytes):
    return [mul_gen(key, g) for g in range(4)]


def multiply_keys(a: bytes, b: bytes) -> bytes:
    """Product of two packed elements (a first, then b)."""
    Da, Ra = unpack(a)
    Db, Rb = unpack(b)
    ea = list(accumulate(map(_P.__getitem__, Ra)))
    eb = list(accumulate(map(_P.__getitem__, Db)))
    # refine a's range and b's domain to their common partition
    outD, outR = [], []
    i = j = 0
    da = list(Ra)
    db = list(Db)
    pa = list(Da)
    pb = list(Rb)
    while i < len(da):
        if ea[i] == eb[j]:
            outD.append(pa[i])
            outR.append(pb[j])
            i += 1
            j += 1
        elif ea[i] > eb[j]:
            # a's range leaf i is coarser: split it and its domain leaf
            d = da[i] + 1
            start = ea[i] - _P[da[i]]
            da[i:i + 1] = [d, d]
            pa[i:i + 1] = [pa[i] + 1, pa[i] + 1]
            ea[i:i + 1] = [start + _P[d], start + 2 * _P[d]]
        else:
            d = db[j] + 1
            start = eb[j] - _P[db[j]]
            db[j:j + 1] = [d, d]
            pb[j:j + 1] = [pb[j] + 1, pb[j] + 1]
            eb[j:j + 1] = [start + _P[d], start + 2 * _P[d]]
    if max(outD) > MAX_DEPTH or max(outR) > MAX_DEPTH:
        raise OverflowError("tree depth exceeds the packed representation")
    return reduce_pair(outD, outR)


def word_key(letters: Iterable[int]) -> bytes:
    key = IDENTITY
    for g in letters:
        key = mul_gen(key, g)
    return key


class IdentityBall:
    """Exact word lengths of every element within a radius of the identity.

    Grows lazily; ``dist`` maps packed keys to their length.
    """

    def __init__(self) -> None:
        self.dist: dict[bytes, int] = {IDENTITY: 0}
        self._frontier: list[bytes] = [IDENTITY]
        self.radius = 0
        self.sphere_sizes = [1]

    def grow(self, radius: int) -> "IdentityBall":
        dist = self.dist
        while self.radius < radius:
            r = self.radius + 1
            nxt = []
            for k in self._frontier:
                for g in range(4):
                    y = mul_gen(k, g)
                    if y not in dist:
                        dist[y] = r
                        nxt.append(y)
            self._frontier = nxt
            self.radius = r
            self.sphere_sizes.append(len(nxt))
        return self

    def __len__(self) -> int:
        return len(self.dist)


def bfs_length(target: bytes, cap: int, ball: Optional[IdentityBall] = None) -> Optional[int]:
    """Word length of ``target`` by two-sided search, or None when above cap.

    The identity side is an exact ball of radius r (grown to ⌊cap/2⌋ unless
    a larger one is supplied); the target side runs level by level. A vertex
    y at level t on the target side is discarded when ‖y‖/2 − 2 exceeds the
    remaining budget, since no geodesic can pass through it.
    """
    if cap < 0:
        return None
    if ball is None:
        ball = IdentityBall()
    if ball.radius < cap // 2:
        ball.grow(cap // 2)
    r = ball.radius
    dist = ball.dist
    if target in dist:
        d = dist[target]
        return d if d <= cap else None
    if r >= cap:
        return None
    best = None
    seen = {target}
    level = [target]
    t = 0
    while level:
        t += 1
        budget = (cap if best is None else best - 1) - t
        nxt = []
        for k in level:
            for g in range(4):
                y = mul_gen(k, g)
                if y in seen:
                    continue
                seen.add(y)
                if len(y) // 2 - 3 > budget:  # ‖y‖/2 − 2 > budget
                    continue
                d = dist.get(y)
                if d is not None:
                    if best is None or t + d < best:
                        best = t + d
                    continue
                nxt.append(y)
        if best is not None and best <= r + t:
            return best
        if r + t >= cap:
            return best if best is not None and best <= cap else None
        level = nxt
    return best if best is not None and best <= cap else None
