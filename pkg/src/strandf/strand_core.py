"""Strand diagrams and the groupoid operations on them.

A strand diagram is a planar directed acyclic graph whose interior nodes are
merges (two ordered inputs, one output) and splits (one input, two ordered
outputs), with an ordered row of sources on top and sinks on the bottom.
Values are immutable; every operation returns a new diagram.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass
from typing import Iterable, Optional

SOURCE, SINK, MERGE, SPLIT = "source", "sink", "merge", "split"
LEFT, RIGHT, OUT, IN = "left", "right", "out", "in"

OUT_PORTS = {SOURCE: (OUT,), SPLIT: (LEFT, RIGHT), MERGE: (OUT,), SINK: ()}
IN_PORTS = {SOURCE: (), SPLIT: (IN,), MERGE: (LEFT, RIGHT), SINK: (IN,)}

_FLIP_KIND = {SOURCE: SINK, SINK: SOURCE, MERGE: SPLIT, SPLIT: MERGE}
_FLIP_PORT = {OUT: IN, IN: OUT, LEFT: LEFT, RIGHT: RIGHT}
_KIND_CHAR = {SOURCE: "S", SINK: "T", MERGE: "M", SPLIT: "Y"}
_PORT_CHAR = {LEFT: "l", RIGHT: "r", IN: "i", OUT: "o"}

Port = tuple  # (node id, port name)


class DiagramError(ValueError):
    """Structurally invalid diagram or unsupported shape."""


class ArityError(DiagramError):
    """Boundary sizes of two diagrams do not fit together."""


@dataclass(frozen=True)
class Violation:
    """First broken invariant found by :func:`validate`."""

    code: str
    detail: str
    node: Optional[int] = None

    def __str__(self) -> str:
        where = "" if self.node is None else f" (node {self.node})"
        return f"{self.code}: {self.detail}{where}"


class StrandDiagram:
    """An (m, n)-strand diagram.

    ``succ`` maps an output port ``(node, port)`` to the input port it feeds;
    ``pred`` is its inverse. Node ids carry no meaning beyond identity.
    """

    __slots__ = ("kinds", "succ", "pred", "sources", "sinks", "_key")

    def __init__(self, kinds: dict, succ: dict, sources: Iterable[int],
                 sinks: Iterable[int], pred: Optional[dict] = None):
        self.kinds = kinds
        self.succ = succ
        self.pred = pred if pred is not None else {b: a for a, b in succ.items()}
        self.sources = tuple(sources)
        self.sinks = tuple(sinks)
        self._key = None

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.sources), len(self.sinks)

    @property
    def norm(self) -> int:
        return len(self.kinds) - len(self.sources) - len(self.sinks)

    def count(self, kind: str) -> int:
        return sum(1 for k in self.kinds.values() if k == kind)

    def interior(self) -> list[int]:
        return [v for v, k in self.kinds.items() if k in (MERGE, SPLIT)]

    def key(self) -> str:
        """Canonical traversal string; equal keys iff isomorphic diagrams."""
        if self._key is None:
            self._key = _canonical_key(self)
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, StrandDiagram):
            return NotImplemented
        return self.shape == other.shape and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        m, n = self.shape
        return f"<StrandDiagram ({m},{n}) norm={self.norm}>"

    # algebra sugar; ``*`` is the reduced product
    def __mul__(self, other: "StrandDiagram") -> "StrandDiagram":
        return multiply(self, other)

    def __invert__(self) -> "StrandDiagram":
        return inverse(self)

    def __pow__(self, k: int) -> "StrandDiagram":
        return power(self, k)

    def __or__(self, other: "StrandDiagram") -> "StrandDiagram":
        return direct_sum(self, other)


# --------------------------------------------------------------------------
# construction


class _Builder:
    """Mutable scratch space used while assembling a diagram."""

    def __init__(self) -> None:
        self.kinds: dict[int, str] = {}
        self.succ: dict[Port, Port] = {}
        self.pred: dict[Port, Port] = {}
        self.next_id = 0

    def node(self, kind: str) -> int:
        v = self.next_id
        self.next_id += 1
        self.kinds[v] = kind
        return v

    def link(self, a: Port, b: Port) -> None:
        self.succ[a] = b
        self.pred[b] = a

    def freeze(self, sources, sinks) -> StrandDiagram:
        return StrandDiagram(self.kinds, self.succ, sources, sinks, self.pred)


def make_trivial(m: int) -> StrandDiagram:
    """The identity (m, m)-diagram of m parallel strands."""
    if m < 1:
        raise DiagramError("diagrams need at least one strand")
    b = _Builder()
    sources = [b.node(SOURCE) for _ in range(m)]
    sinks = [b.node(SINK) for _ in range(m)]
    for s, t in zip(sources, sinks):
        b.link((s, OUT), (t, IN))
    return b.freeze(sources, sinks)


def single_merge(m: int, j: int) -> StrandDiagram:
    """(m, m-1)-diagram with one merge joining strands j and j+1 (0-based j)."""
    if not 0 <= j < m - 1:
        raise DiagramError(f"no strands {j}, {j + 1} among {m}")
    b = _Builder()
    sources = [b.node(SOURCE) for _ in range(m)]
    sinks = [b.node(SINK) for _ in range(m - 1)]
    mg = b.node(MERGE)
    for t in range(m - 1):
        if t < j:
            b.link((sources[t], OUT), (sinks[t], IN))
        elif t > j:
            b.link((sources[t + 1], OUT), (sinks[t], IN))
    b.link((sources[j], OUT), (mg, LEFT))
    b.link((sources[j + 1], OUT), (mg, RIGHT))
    b.link((mg, OUT), (sinks[j], IN))
    return b.freeze(sources, sinks)


def single_split(m: int, j: int) -> StrandDiagram:
    """(m, m+1)-diagram with one split on strand j (0-based)."""
    return inverse(single_merge(m + 1, j))


def from_edges(nodes: Iterable[tuple[int, str]], edges: Iterable[tuple],
               sources: Iterable[int], sinks: Iterable[int]) -> StrandDiagram:
    """Build from explicit node and edge lists and validate the result."""
    kinds = dict(nodes)
    succ: dict[Port, Port] = {}
    for a, ap, b, bp in edges:
        if (a, ap) in succ:
            raise DiagramError(f"output port {ap} of node {a} used twice")
        succ[(a, ap)] = (b, bp)
    pred: dict[Port, Port] = {}
    for a, b in succ.items():
        if b in pred:
            raise DiagramError(f"input port {b[1]} of node {b[0]} used twice")
        pred[b] = a
    d = StrandDiagram(kinds, succ, sources, sinks, pred)
    issue = validate(d)
    if issue is not None:
        raise DiagramError(str(issue))
    return d


# --------------------------------------------------------------------------
# validation


def validate(f: StrandDiagram) -> Optional[Violation]:
    """Check the structural invariants; return the first violation or None."""
    kinds = f.kinds
    if not f.sources or not f.sinks:
        return Violation("degenerate", "diagrams need at least one source and one sink")
    for role, ids, kind in (("source", f.sources, SOURCE), ("sink", f.sinks, SINK)):
        if len(set(ids)) != len(ids):
            return Violation("boundary", f"repeated {role} id")
        for v in ids:
            if kinds.get(v) != kind:
                return Violation("boundary", f"{role} list names a {kinds.get(v)} node", v)
    listed = set(f.sources) | set(f.sinks)
    for v, k in kinds.items():
        if k not in OUT_PORTS:
            return Violation("kind", f"unknown node kind {k!r}", v)
        if k in (SOURCE, SINK) and v not in listed:
            return Violation("boundary", f"{k} missing from boundary order", v)
    for (a, ap), (b, bp) in f.succ.items():
        if a not in kinds or b not in kinds:
            return Violation("edge", "edge touches an unknown node", a if a not in kinds else b)
        if ap not in OUT_PORTS[kinds[a]]:
            return Violation("degree", f"{kinds[a]} has no output port {ap!r}", a)
        if bp not in IN_PORTS[kinds[b]]:
            return Violation("degree", f"{kinds[b]} has no input port {bp!r}", b)
    for v, k in kinds.items():
        for p in OUT_PORTS[k]:
            if (v, p) not in f.succ:
                return Violation("degree", f"{k} output {p!r} is unconnected", v)
        for p in IN_PORTS[k]:
            if (v, p) not in f.pred:
                return Violation("degree", f"{k} input {p!r} is unconnected", v)
    n_out = sum(len(OUT_PORTS[k]) for k in kinds.values())
    if n_out != len(f.succ):
        return Violation("degree", "edge count does not match port count")

    # acyclicity via Kahn's algorithm
    indeg = {v: len(IN_PORTS[k]) for v, k in kinds.items()}
    ready = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for p in OUT_PORTS[kinds[v]]:
            w = f.succ[(v, p)][0]
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if seen != len(kinds):
        stuck = min(v for v, d in indeg.items() if d > 0)
        return Violation("cycle", "directed cycle present", stuck)

    m, n = f.shape
    if f.count(SPLIT) - f.count(MERGE) != n - m:
        return Violation("balance", "splits minus merges differs from sinks minus sources")

    # Planarity witness: a left-first depth-first walk from the sources of an
    # embedded diagram meets each merge through its left input first and meets
    # the sinks in boundary order.
    order, first_port = _dfs_order(f)
    sink_rank = {t: i for i, t in enumerate(f.sinks)}
    met = [sink_rank[v] for v in order if kinds[v] == SINK]
    if met != sorted(met):
        return Violation("planarity", "sinks are not reached in boundary order")
    for v in order:
        if kinds[v] == MERGE and first_port[v] != LEFT:
            return Violation("planarity", "merge reached through its right input first", v)
    return None


def check(f: StrandDiagram) -> StrandDiagram:
    issue = validate(f)
    if issue is not None:
        raise DiagramError(str(issue))
    return f


def _dfs_order(f: StrandDiagram) -> tuple[list[int], dict[int, str]]:
    """Left-first DFS from the sources; returns visit order and entry ports."""
    order: list[int] = []
    entry: dict[int, str] = {}
    for s in f.sources:
        stack = [(s, OUT)]
        while stack:
            v, vp = stack.pop()
            if v in entry:
                continue
            entry[v] = vp
            order.append(v)
            for p in reversed(OUT_PORTS[f.kinds[v]]):
                w, wp = f.succ[(v, p)]
                if w not in entry:
                    stack.append((w, wp))
    return order, entry


def _canonical_key(f: StrandDiagram) -> str:
    order, _ = _dfs_order(f)
    index = {v: i for i, v in enumerate(order)}
    parts = []
    for v in order:
        k = f.kinds[v]
        token = _KIND_CHAR[k]
        for p in OUT_PORTS[k]:
            w, wp = f.succ[(v, p)]
            token += f"{index[w]}{_PORT_CHAR[wp]}"
        parts.append(token)
    sinks = ",".join(str(index[t]) for t in f.sinks)
    return f"{len(f.sources)}/{len(f.sinks)}|{' '.join(parts)}|{sinks}"


def diagrams_equal(f: StrandDiagram, g: StrandDiagram) -> bool:
    return f.shape == g.shape and f.key() == g.key()


# --------------------------------------------------------------------------
# groupoid operations


def _relabel(b: _Builder, f: StrandDiagram) -> dict[int, int]:
    ids = {}
    for v, k in f.kinds.items():
        ids[v] = b.node(k)
    for (a, ap), (c, cp) in f.succ.items():
        b.link((ids[a], ap), (ids[c], cp))
    return ids


def concat(f: StrandDiagram, g: StrandDiagram) -> StrandDiagram:
    """f on top of g, sinks of f glued to sources of g; not reduced."""
    if len(f.sinks) != len(g.sources):
        raise ArityError(f"cannot stack a {f.shape} diagram on a {g.shape} diagram")
    b = _Builder()
    fi = _relabel(b, f)
    gi = _relabel(b, g)
    for t, s in zip(f.sinks, g.sources):
        t, s = fi[t], gi[s]
        above = b.pred.pop((t, IN))
        below = b.succ.pop((s, OUT))
        del b.kinds[t], b.kinds[s]
        b.link(above, below)
    return b.freeze([fi[s] for s in f.sources], [gi[t] for t in g.sinks])


def direct_sum(f: StrandDiagram, g: StrandDiagram) -> StrandDiagram:
    """g placed to the right of f."""
    b = _Builder()
    fi = _relabel(b, f)
    gi = _relabel(b, g)
    return b.freeze([fi[s] for s in f.sources] + [gi[s] for s in g.sources],
                    [fi[t] for t in f.sinks] + [gi[t] for t in g.sinks])


def inverse(f: StrandDiagram) -> StrandDiagram:
    """Vertical mirror image: sources and sinks, merges and splits swap."""
    kinds = {v: _FLIP_KIND[k] for v, k in f.kinds.items()}
    succ = {(b, _FLIP_PORT[bp]): (a, _FLIP_PORT[ap]) for (a, ap), (b, bp) in f.succ.items()}
    return StrandDiagram(kinds, succ, f.sinks, f.sources)


def _find_redex(kinds, succ, pred, v):
    k = kinds.get(v)
    if k == SPLIT:
        m, lp = succ[(v, LEFT)]
        if lp == LEFT and kinds[m] == MERGE and succ[(v, RIGHT)] == (m, RIGHT):
            return (1, v, m)
        u = pred[(v, IN)][0]
        if kinds[u] == MERGE:
            return (2, u, v)
    elif k == MERGE:
        s = succ[(v, OUT)][0]
        if kinds[s] == SPLIT:
            return (2, v, s)
        a, ap = pred[(v, LEFT)]
        if ap == LEFT and kinds[a] == SPLIT and succ[(a, RIGHT)] == (v, RIGHT):
            return (1, a, v)
    return None


def _drop(kinds, succ, pred, v):
    k = kinds.pop(v)
    for p in OUT_PORTS[k]:
        del succ[(v, p)]
    for p in IN_PORTS[k]:
        del pred[(v, p)]


def reduce(f: StrandDiagram, rng: Optional[random.Random] = None,
           validate_input: bool = True) -> StrandDiagram:
    """Apply the two local moves until none applies.

    Move 1 deletes a split whose two outputs feed the two inputs of one merge
    (in order), leaving a single edge. Move 2 deletes a merge feeding a split,
    leaving two parallel edges. Candidates are taken lowest id first, or in a
    random order when ``rng`` is given.
    """
    if validate_input:
        check(f)
    kinds = dict(f.kinds)
    succ = dict(f.succ)
    pred = dict(f.pred)

    def link(a, b):
        succ[a] = b
        pred[b] = a

    work = [v for v, k in kinds.items() if k in (MERGE, SPLIT)]
    queued = set(work)
    if rng is None:
        heapq.heapify(work)
    while work:
        if rng is None:
            v = heapq.heappop(work)
        else:
            i = rng.randrange(len(work))
            work[i], work[-1] = work[-1], work[i]
            v = work.pop()
        queued.discard(v)
        redex = _find_redex(kinds, succ, pred, v)
        if redex is None:
            continue
        move, a, b = redex
        if move == 1:
            above = pred[(a, IN)]
            below = succ[(b, OUT)]
            _drop(kinds, succ, pred, a)
            _drop(kinds, succ, pred, b)
            link(above, below)
            touched = (above[0], below[0])
        else:
            l_in, r_in = pred[(a, LEFT)], pred[(a, RIGHT)]
            l_out, r_out = succ[(b, LEFT)], succ[(b, RIGHT)]
            _drop(kinds, succ, pred, a)
            _drop(kinds, succ, pred, b)
            link(l_in, l_out)
            link(r_in, r_out)
            touched = (l_in[0], r_in[0], l_out[0], r_out[0])
        for w in touched:
            if w not in queued and kinds.get(w) in (MERGE, SPLIT):
                queued.add(w)
                if rng is None:
                    heapq.heappush(work, w)
                else:
                    work.append(w)
    return StrandDiagram(kinds, succ, f.sources, f.sinks, pred)


def is_reduced(f: StrandDiagram) -> bool:
    return all(_find_redex(f.kinds, f.succ, f.pred, v) is None for v in f.interior())


def multiply(f: StrandDiagram, g: StrandDiagram) -> StrandDiagram:
    """Reduced product: f first, then g."""
    return reduce(concat(f, g), validate_input=False)


def power(f: StrandDiagram, k: int) -> StrandDiagram:
    m, n = f.shape
    if m != n:
        raise ArityError("only square diagrams have powers")
    base = f if k >= 0 else inverse(f)
    out = make_trivial(m)
    for _ in range(abs(k)):
        out = multiply(out, base)
    return out


def conjugate(f: StrandDiagram, h: StrandDiagram) -> StrandDiagram:
    """h^-1 f h, reduced."""
    return multiply(multiply(inverse(h), f), h)


def norm(f: StrandDiagram) -> int:
    return f.norm


def components(f: StrandDiagram) -> list[list[int]]:
    """Connected components as node lists, ordered left to right."""
    parent = {v: v for v in f.kinds}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for (a, _), (b, _) in f.succ.items():
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for v in f.kinds:
        groups.setdefault(find(v), []).append(v)
    rank = {}
    for i, s in enumerate(f.sources):
        rank.setdefault(find(s), i)
    return sorted(groups.values(), key=lambda g: rank[find(g[0])])


def blocks(f: StrandDiagram) -> list[tuple[int, int]]:
    """(sources, sinks) counts of each connected component, left to right."""
    src = set(f.sources)
    snk = set(f.sinks)
    return [(sum(1 for v in c if v in src), sum(1 for v in c if v in snk))
            for c in components(f)]


def split_blocks(f: StrandDiagram, sizes: list[tuple[int, int]]) -> list[StrandDiagram]:
    """Cut f into side-by-side pieces with the given boundary counts."""
    out = []
    si = ti = 0
    for m, n in sizes:
        srcs = f.sources[si:si + m]
        snks = f.sinks[ti:ti + n]
        si += m
        ti += n
        keep = set(srcs)
        stack = list(srcs)
        while stack:
            v = stack.pop()
            for p in OUT_PORTS[f.kinds[v]]:
                w = f.succ[(v, p)][0]
                if w not in keep:
                    keep.add(w)
                    stack.append(w)
            for p in IN_PORTS[f.kinds[v]]:
                w = f.pred[(v, p)][0]
                if w not in keep:
                    keep.add(w)
                    stack.append(w)
        if not keep >= set(snks) or any(t in keep for t in f.sinks if t not in snks):
            raise DiagramError("diagram does not split at the requested boundary")
        kinds = {v: f.kinds[v] for v in keep}
        succ = {a: b for a, b in f.succ.items() if a[0] in keep}
        out.append(StrandDiagram(kinds, succ, srcs, snks))
    return out


# --------------------------------------------------------------------------
# serialization


def canonical_form(f: StrandDiagram) -> StrandDiagram:
    """Same diagram with node ids renumbered in canonical traversal order."""
    order, _ = _dfs_order(f)
    index = {v: i for i, v in enumerate(order)}
    kinds = {index[v]: f.kinds[v] for v in order}
    succ = {(index[a], ap): (index[b], bp) for (a, ap), (b, bp) in f.succ.items()}
    return StrandDiagram(kinds, succ, [index[s] for s in f.sources], [index[t] for t in f.sinks])


def to_dict(f: StrandDiagram) -> dict:
    c = canonical_form(f)
    edges = sorted(c.succ.items(), key=lambda e: (e[0][0], e[0][1]))
    return {
        "sources": list(c.sources),
        "sinks": list(c.sinks),
        "nodes": [{"id": v, "kind": c.kinds[v]} for v in sorted(c.kinds)],
        "edges": [{"from": a, "from_port": ap, "to": b, "to_port": bp}
                  for (a, ap), (b, bp) in edges],
    }


def from_dict(data: dict) -> StrandDiagram:
    nodes = [(int(n["id"]), n["kind"]) for n in data["nodes"]]
    edges = [(int(e["from"]), e["from_port"], int(e["to"]), e["to_port"]) for e in data["edges"]]
    return from_edges(nodes, edges, [int(s) for s in data["sources"]],
                      [int(t) for t in data["sinks"]])


def to_json(f: StrandDiagram) -> str:
    return json.dumps(to_dict(f), sort_keys=True)


def from_json(text: str) -> StrandDiagram:
    return from_dict(json.loads(text))
