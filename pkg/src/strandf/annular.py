"""Closures of square strand diagrams on the annulus.

An annular diagram keeps only merges and splits. Each edge remembers the
ordered list of places where it crosses a fixed radial cut; the cut itself is
the left-to-right list of those crossings (inner boundary first). Free loops
are edges without endpoints. Reduction and encoding work from this data alone.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass
from typing import Optional

from .strand_core import (
    IN, IN_PORTS, LEFT, MERGE, OUT, OUT_PORTS, RIGHT, SINK, SPLIT, DiagramError,
    StrandDiagram,
)

ENCODING_VERSION = "ann-enc/1"

_PORT_CHAR = {LEFT: "l", RIGHT: "r", IN: "i", OUT: "o"}
_KIND_CHAR = {MERGE: "M", SPLIT: "Y"}
_ADJ_PORTS = {SPLIT: (IN, LEFT, RIGHT), MERGE: (LEFT, RIGHT, OUT)}


class AnnularError(DiagramError):
    pass


@dataclass(frozen=True)
class AEdge:
    """Directed edge; ``slots`` are indices into the cut, in travel order."""

    tail: Optional[int]
    tport: Optional[str]
    head: Optional[int]
    hport: Optional[str]
    slots: tuple[int, ...]

    @property
    def is_loop(self) -> bool:
        return self.tail is None

    @property
    def winding(self) -> int:
        return len(self.slots)


class AnnularDiagram:
    __slots__ = ("kinds", "edges", "cut", "out_edge", "in_edge")

    def __init__(self, kinds: dict[int, str], edges: dict[int, AEdge], cut: tuple[int, ...]):
        self.kinds = kinds
        self.edges = edges
        self.cut = cut
        self.out_edge = {(e.tail, e.tport): k for k, e in edges.items() if not e.is_loop}
        self.in_edge = {(e.head, e.hport): k for k, e in edges.items() if not e.is_loop}

    @property
    def norm(self) -> int:
        return len(self.kinds)

    def loops(self) -> list[int]:
        return [k for k, e in self.edges.items() if e.is_loop]

    def winding(self) -> dict[int, int]:
        return {k: e.winding for k, e in self.edges.items()}

    def __repr__(self) -> str:
        return (f"<AnnularDiagram nodes={len(self.kinds)} loops={len(self.loops())} "
                f"cut={len(self.cut)}>")


def _normalize(kinds, edges: dict[int, list], slot_keys) -> AnnularDiagram:
    """Renumber cut positions to 0..W-1 following the sorted slot keys."""
    order = sorted(slot_keys)
    pos = {s: i for i, s in enumerate(order)}
    cut = [0] * len(order)
    out = {}
    for k, (t, tp, h, hp, slots) in edges.items():
        ps = tuple(pos[s] for s in slots)
        for p in ps:
            cut[p] = k
        out[k] = AEdge(t, tp, h, hp, ps)
    return AnnularDiagram(dict(kinds), out, tuple(cut))


def closure(f: StrandDiagram) -> AnnularDiagram:
    """Glue sink t to source t for every t; no reduction is applied."""
    m, n = f.shape
    if m != n:
        raise AnnularError(f"closure needs a square diagram, got {f.shape}")
    sink_pos = {t: i for i, t in enumerate(f.sinks)}
    kinds = {v: k for v, k in f.kinds.items() if k in (MERGE, SPLIT)}
    edges: dict[int, list] = {}
    used = set()
    eid = 0
    for v in sorted(kinds):
        for p in OUT_PORTS[kinds[v]]:
            w, wp = f.succ[(v, p)]
            slots = []
            while f.kinds[w] == SINK:
                t = sink_pos[w]
                slots.append((t,))
                used.add(t)
                w, wp = f.succ[(f.sources[t], OUT)]
            edges[eid] = [v, p, w, wp, slots]
            eid += 1
    for t in range(n):
        if t in used:
            continue
        # a run of trivial strands closing up on itself
        slots = []
        s = t
        while True:
            slots.append((s,))
            used.add(s)
            w, _ = f.succ[(f.sources[s], OUT)]
            if f.kinds[w] != SINK:
                raise AnnularError("strand from a source reached a node without a sink")
            s = sink_pos[w]
            if s == t:
                break
        edges[eid] = [None, None, None, None, slots]
        eid += 1
    return _normalize(kinds, edges, [(t,) for t in range(n)])


# --------------------------------------------------------------------------
# reduction


class _Work:
    """Mutable copy of an annular diagram used during rewriting."""

    def __init__(self, A: AnnularDiagram):
        self.kinds = dict(A.kinds)
        self.edges: dict[int, list] = {
            k: [e.tail, e.tport, e.head, e.hport, [(p,) for p in e.slots]]
            for k, e in A.edges.items()
        }
        self.out_e = dict(A.out_edge)
        self.in_e = dict(A.in_edge)
        self.next_id = max(self.edges, default=-1) + 1

    def redex(self, v):
        k = self.kinds.get(v)
        if k == SPLIT:
            eL = self.edges[self.out_e[(v, LEFT)]]
            eR = self.edges[self.out_e[(v, RIGHT)]]
            if (eL[2] == eR[2] and self.kinds[eL[2]] == MERGE and eL[3] == LEFT
                    and eR[3] == RIGHT and len(eL[4]) == len(eR[4])):
                return (1, v, eL[2])
            e_in = self.edges[self.in_e[(v, IN)]]
            if self.kinds[e_in[0]] == MERGE:
                return (2, e_in[0], v)
        elif k == MERGE:
            e_out = self.edges[self.out_e[(v, OUT)]]
            if self.kinds[e_out[2]] == SPLIT:
                return (2, v, e_out[2])
            eL = self.edges[self.in_e[(v, LEFT)]]
            if self.kinds[eL[0]] == SPLIT and eL[1] == LEFT and self.redex_is_one(eL[0], v):
                return (1, eL[0], v)
        return None

    def redex_is_one(self, s, m) -> bool:
        eL = self.edges[self.out_e[(s, LEFT)]]
        eR = self.edges[self.out_e[(s, RIGHT)]]
        return (eL[2] == m and eR[2] == m and eL[3] == LEFT and eR[3] == RIGHT
                and len(eL[4]) == len(eR[4]))

    def apply(self, move: int, a: int, b: int) -> list[int]:
        """Rewrite and return the surviving nodes next to the change."""
        if move == 1:
            s, m = a, b
            dead = {self.out_e[(s, RIGHT)]}
            joins = {(s, IN): ((s, LEFT), []), (m, LEFT): ((m, OUT), [])}
        else:
            m, s = a, b
            e_mid = self.out_e[(m, OUT)]
            mid = self.edges[e_mid][4]
            dead = {e_mid}
            joins = {(m, LEFT): ((s, LEFT), [k + (0,) for k in mid]),
                     (m, RIGHT): ((s, RIGHT), [k + (1,) for k in mid])}
        gone = (a, b)
        touched = set()
        for v in gone:
            for p in OUT_PORTS[self.kinds[v]]:
                touched.add(self.out_e.pop((v, p)))
            for p in IN_PORTS[self.kinds[v]]:
                touched.add(self.in_e.pop((v, p)))
        touched -= dead
        for e in dead:
            del self.edges[e]
        for v in gone:
            del self.kinds[v]
        old = {e: self.edges.pop(e) for e in touched}
        by_tail = {(x[0], x[1]): e for e, x in old.items()}

        def follow(e0):
            slots = []
            e = e0
            seen = []
            while True:
                seen.append(e)
                t, tp, h, hp, sl = old[e]
                slots.extend(sl)
                if h in gone:
                    nxt, extra = joins[(h, hp)]
                    slots.extend(extra)
                    e = by_tail[nxt]
                    if e == e0:
                        return None, slots, seen
                    continue
                return (h, hp), slots, seen

        neighbours = []
        visited = set()
        for e in sorted(old):
            t, tp = old[e][0], old[e][1]
            if t is None or t in gone:
                continue
            end, slots, seen = follow(e)
            visited.update(seen)
            k = self.next_id
            self.next_id += 1
            self.edges[k] = [t, tp, end[0], end[1], slots]
            self.out_e[(t, tp)] = k
            self.in_e[end] = k
            neighbours += [t, end[0]]
        for e in sorted(old):
            if e in visited:
                continue
            end, slots, seen = follow(e)
            visited.update(seen)
            if end is not None:
                raise AnnularError("dangling strand while rewriting")
            if len(slots) != 1:
                raise AnnularError(f"free loop winds {len(slots)} times")
            k = self.next_id
            self.next_id += 1
            self.edges[k] = [None, None, None, None, slots]
        return neighbours

    def merge_loops(self) -> int:
        """Merge free loops that sit next to each other in the cut."""
        merged = 0
        while True:
            owner = {}
            for k, e in self.edges.items():
                for s in e[4]:
                    owner[s] = k
            order = sorted(owner)
            hit = None
            for s1, s2 in zip(order, order[1:]):
                e1, e2 = owner[s1], owner[s2]
                if e1 != e2 and self.edges[e1][0] is None and self.edges[e2][0] is None:
                    hit = e2
                    break
            if hit is None:
                return merged
            del self.edges[hit]
            merged += 1

    def freeze(self) -> AnnularDiagram:
        keys = [s for e in self.edges.values() for s in e[4]]
        return _normalize(self.kinds, self.edges, keys)


def reduce_annular(A: AnnularDiagram, rng: Optional[random.Random] = None) -> AnnularDiagram:
    """Apply type I, II and III moves to a fixed point."""
    w = _Work(A)
    work = sorted(w.kinds)
    queued = set(work)
    while work:
        if rng is None:
            v = heapq.heappop(work)
        else:
            i = rng.randrange(len(work))
            work[i], work[-1] = work[-1], work[i]
            v = work.pop()
        queued.discard(v)
        if v not in w.kinds:
            continue
        r = w.redex(v)
        if r is None:
            continue
        for u in w.apply(*r):
            if u in w.kinds and u not in queued:
                queued.add(u)
                if rng is None:
                    heapq.heappush(work, u)
                else:
                    work.append(u)
    w.merge_loops()
    out = w.freeze()
    check_windings(out)
    return out


def redexes(A: AnnularDiagram) -> list[tuple[int, int, int]]:
    w = _Work(A)
    found = set()
    for v in w.kinds:
        r = w.redex(v)
        if r is not None:
            found.add(r)
    return sorted(found)


def has_adjacent_loops(A: AnnularDiagram) -> bool:
    n = len(A.cut)
    for p in range(n - 1):
        a, b = A.cut[p], A.cut[p + 1]
        if a != b and A.edges[a].is_loop and A.edges[b].is_loop:
            return True
    return False


def is_reduced_annular(A: AnnularDiagram) -> bool:
    return not redexes(A) and not has_adjacent_loops(A)


def check_windings(A: AnnularDiagram) -> None:
    """Every directed cycle must wind around: winding-0 edges form no cycle."""
    succ: dict[int, list[int]] = {v: [] for v in A.kinds}
    indeg = {v: 0 for v in A.kinds}
    for e in A.edges.values():
        if not e.is_loop and e.winding == 0:
            succ[e.tail].append(e.head)
            indeg[e.head] += 1
    ready = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if seen != len(A.kinds):
        raise AnnularError("a directed cycle does not wind around the annulus")
    for e in A.edges.values():
        if e.is_loop and e.winding != 1:
            raise AnnularError("free loop does not wind exactly once")


# --------------------------------------------------------------------------
# components and encoding


def component_groups(A: AnnularDiagram) -> list[tuple[list[int], list[int]]]:
    """(nodes, edge ids) of each component, in nesting order."""
    parent = {v: v for v in A.kinds}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in A.edges.values():
        if not e.is_loop:
            ra, rb = find(e.tail), find(e.head)
            if ra != rb:
                parent[ra] = rb
    groups: dict = {}
    for k, e in A.edges.items():
        key = ("loop", k) if e.is_loop else find(e.tail)
        groups.setdefault(key, ([], []))[1].append(k)
    for v in A.kinds:
        groups.setdefault(find(v), ([], []))[0].append(v)
    out = []
    for key, (nodes, eids) in groups.items():
        slots = sorted(p for k in eids for p in A.edges[k].slots)
        if not slots:
            raise AnnularError("component does not cross the cut")
        if slots[-1] - slots[0] + 1 != len(slots):
            raise AnnularError("component crossings are not contiguous along the cut")
        out.append((slots[0], sorted(nodes), sorted(eids)))
    out.sort()
    return [(n, e) for _, n, e in out]


def _sub(A: AnnularDiagram, nodes, eids) -> AnnularDiagram:
    slots = sorted(p for k in eids for p in A.edges[k].slots)
    pos = {p: i for i, p in enumerate(slots)}
    edges = {k: AEdge(A.edges[k].tail, A.edges[k].tport, A.edges[k].head, A.edges[k].hport,
                      tuple(pos[p] for p in A.edges[k].slots)) for k in eids}
    cut = tuple(A.cut[p] for p in slots)
    return AnnularDiagram({v: A.kinds[v] for v in nodes}, edges, cut)


def components(A: AnnularDiagram) -> list[AnnularDiagram]:
    """Connected components, innermost first; free loops are node-free components."""
    return [_sub(A, n, e) for n, e in component_groups(A)]


def annular_norm(A: AnnularDiagram) -> int:
    return len(A.kinds)


@dataclass
class Traversal:
    """Canonical walk of one component from a chosen start node."""

    text: str
    order: list[int]
    edge_order: list[int]
    potential: dict[int, int]


def traverse(A: AnnularDiagram, start: int) -> Traversal:
    """Depth-first walk in port order, recording windings normalised so that
    tree edges carry winding 0."""
    index: dict[int, int] = {}
    pot: dict[int, int] = {}
    order: list[int] = []
    stack = [(start, 0)]
    while stack:
        v, p = stack.pop()
        if v in index:
            continue
        index[v] = len(order)
        pot[v] = p
        order.append(v)
        nbrs = []
        for port in _ADJ_PORTS[A.kinds[v]]:
            if port in OUT_PORTS[A.kinds[v]]:
                e = A.edges[A.out_edge[(v, port)]]
                nbrs.append((e.head, p + e.winding))
            else:
                e = A.edges[A.in_edge[(v, port)]]
                nbrs.append((e.tail, p - e.winding))
        for item in reversed(nbrs):
            if item[0] not in index:
                stack.append(item)
    parts = []
    edge_order = []
    for v in order:
        token = _KIND_CHAR[A.kinds[v]]
        for port in OUT_PORTS[A.kinds[v]]:
            k = A.out_edge[(v, port)]
            e = A.edges[k]
            w = e.winding + pot[v] - pot[e.head]
            token += f"{index[e.head]}{_PORT_CHAR[e.hport]}{w}."
            edge_order.append(k)
        parts.append(token)
    return Traversal(" ".join(parts), order, edge_order, pot)


def component_code(A: AnnularDiagram, nodes: list[int]) -> tuple[str, int]:
    """Least traversal string over all start nodes, with a start that gives it."""
    best = None
    for v in nodes:
        t = traverse(A, v).text
        if best is None or t < best[0]:
            best = (t, v)
    return best  # type: ignore[return-value]


def canonical_encoding(A: AnnularDiagram, require_reduced: bool = True) -> str:
    if require_reduced and not is_reduced_annular(A):
        raise AnnularError("canonical encoding needs a reduced annular diagram")
    parts = []
    for nodes, eids in component_groups(A):
        if not nodes:
            parts.append("L")
        else:
            parts.append("C:" + component_code(A, nodes)[0])
    return ENCODING_VERSION + "|" + "|".join(parts)


def reduced_closure(f: StrandDiagram) -> AnnularDiagram:
    return reduce_annular(closure(f))


def closure_encoding(f: StrandDiagram) -> str:
    return canonical_encoding(reduced_closure(f))


def isomorphism(A: AnnularDiagram, B: AnnularDiagram,
                nodes_a: list[int], nodes_b: list[int]) -> Optional[dict[int, int]]:
    """Node map from a component of A onto a component of B, if one exists."""
    if len(nodes_a) != len(nodes_b):
        return None
    code_a, start_a = component_code(A, nodes_a)
    for v in nodes_b:
        tb = traverse(B, v)
        if tb.text == code_a:
            ta = traverse(A, start_a)
            return dict(zip(ta.order, tb.order))
    return None


# --------------------------------------------------------------------------
# serialization


def to_dict(A: AnnularDiagram) -> dict:
    return {
        "nodes": [{"id": v, "kind": A.kinds[v]} for v in sorted(A.kinds)],
        "edges": [{"id": k, "from": e.tail, "from_port": e.tport, "to": e.head,
                   "to_port": e.hport} for k, e in sorted(A.edges.items())],
        "cut": list(A.cut),
        "winding": {str(k): e.winding for k, e in sorted(A.edges.items())},
        "nesting": [{"nodes": n, "edges": e} for n, e in component_groups(A)],
    }


def to_json(A: AnnularDiagram) -> str:
    return json.dumps(to_dict(A), sort_keys=True)
