"""Conjugacy in F through strand and annular diagrams.

Pipeline: bring each element to a strongly cyclically reduced form, compare
the canonical encodings of the reduced closures, then read a conjugator off
the universal cover of the common closure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import annular, cayley
from .annular import closure, is_reduced_annular, reduce_annular
from .strand_core import (
    IN, OUT, SINK, SOURCE, DiagramError, StrandDiagram, _Builder, blocks, check,
    components, concat, direct_sum, inverse, is_reduced, make_trivial, multiply,
    reduce, single_merge, single_split, split_blocks,
)
from .thompson_f import (
    diagram_to_treepair, element_key, element_to_plmap, element_to_word, format_word,
    key_to_diagram, length_exact, log2_exact, slope_at_0, slope_at_1,
)


class InvariantViolation(AssertionError):
    """An internal guarantee failed; this is a bug, never a user error."""


class NotSameClosure(ValueError):
    pass


class CertificateError(ValueError):
    pass


def step_bound(n: int, i: int) -> Fraction:
    """Norm budget for cyclically reducing an (i,i)-diagram of norm n."""
    return 1 + Fraction(n * (n + 4 * i - 6), 8)


def element_bound(n: int) -> Fraction:
    """Same budget specialised to group elements."""
    return Fraction((n - 1) ** 2 + 7, 8)


def conjugator_norm_bound(i: int, j: int, k: int) -> Fraction:
    return Fraction((i - 1) ** 2 + (j - 1) ** 2 + 12 * k * k + 14, 8)


def conjugator_length_bound(li: int, lj: int) -> int:
    i, j = sorted((li, lj))
    return 13 * i * i + j * j + 27 * i + 3 * j + 20


def clf_bound(n: int) -> Fraction:
    return Fraction(7, 2) * n * n + 15 * n + 20


# --------------------------------------------------------------------------
# strong cyclic reduction


@dataclass(frozen=True)
class ScrStep:
    case: str
    strands: int
    norm: int
    kappa_norm: int
    bound: Fraction
    realized: int = 0


@dataclass
class ScrResult:
    reduced_diagram: StrandDiagram
    conjugator: StrandDiagram
    bound: Fraction
    trace: list[ScrStep] = field(default_factory=list)


def is_strongly_cyclically_reduced(f: StrandDiagram) -> bool:
    A = closure(f)
    return is_reduced_annular(A) and len(annular.component_groups(A)) == len(components(f))


def _strand_end(f: StrandDiagram, s: int):
    return f.succ[(f.sources[s], OUT)]


def _sink_start(f: StrandDiagram, t: int):
    return f.pred[(f.sinks[t], IN)]


def _scr_step(f: StrandDiagram):
    """One move of the recursion, or None when f is already done."""
    i = f.shape[0]
    sizes = blocks(f)
    # case A: a side-by-side block with unequal boundary counts
    j = k = 0
    for m, n in sizes:
        j += m
        k += n
        if m != n:
            f1, f2 = split_blocks(f, [(j, k), (i - j, i - k)]) if j < i else (f, None)
            if f2 is None:
                raise InvariantViolation("unbalanced block spans the whole diagram")
            if j < k:
                a = direct_sum(make_trivial(j), f2)
                b = direct_sum(f1, make_trivial(i - k))
            else:
                a = direct_sum(f1, make_trivial(i - j))
                b = direct_sum(make_trivial(k), f2)
            kappa = a if a.norm <= inverse(b).norm else inverse(b)
            nxt = reduce(concat(b, a), validate_input=False)
            return "A", kappa, nxt
    kinds = f.kinds
    # case B: a merge under sources j, j+1 and a split over sinks j, j+1
    for j in range(i - 1):
        (u, up), (w, wp) = _strand_end(f, j), _strand_end(f, j + 1)
        if u == w and kinds[u] == "merge" and up == "left":
            (s, sp), (t, tp) = _sink_start(f, j), _sink_start(f, j + 1)
            if s == t and kinds[s] == "split" and sp == "left":
                kappa = single_merge(i, j)
                return "B", kappa, _conj(f, kappa)
    # case C: source j feeds a split and sink j is fed by a merge
    for j in range(i):
        u, _ = _strand_end(f, j)
        s, _ = _sink_start(f, j)
        if kinds[u] == "split" and kinds[s] == "merge":
            kappa = single_split(i, j)
            return "C", kappa, _conj(f, kappa)
    # case D: two neighbouring strands run straight through
    for j in range(i - 1):
        if _strand_end(f, j)[0] == f.sinks[j] and _strand_end(f, j + 1)[0] == f.sinks[j + 1]:
            kappa = single_merge(i, j)
            return "D", kappa, _conj(f, kappa)
    return None


def _conj(f: StrandDiagram, k: StrandDiagram) -> StrandDiagram:
    return reduce(concat(concat(inverse(k), f), k), validate_input=False)


def strongly_cyclically_reduce(f: StrandDiagram) -> ScrResult:
    m, m2 = f.shape
    if m != m2:
        raise DiagramError(f"expected a square diagram, got {f.shape}")
    n = f.norm
    check(f)
    if not is_reduced(f):
        raise DiagramError("input diagram is not reduced")
    cur = f
    kappas: list[StrandDiagram] = []
    steps: list[tuple[str, int, int, int]] = []
    while True:
        step = _scr_step(cur)
        if step is None:
            break
        case, kappa, nxt = step
        if nxt.norm > cur.norm:
            raise InvariantViolation("cyclic reduction increased the norm")
        steps.append((case, cur.shape[0], cur.norm, kappa.norm))
        kappas.append(kappa)
        cur = nxt
    if not is_strongly_cyclically_reduced(cur):
        raise InvariantViolation("no reduction case applies but the closure is not reduced")
    h = make_trivial(m)
    for kappa in kappas:
        h = multiply(h, kappa)
    trace = []
    tail = 0
    for case, i_s, n_s, kn in reversed(steps):
        tail += kn
        b = step_bound(n_s, i_s)
        if n_s > 0 and tail > b:
            raise InvariantViolation(f"conjugator norm {tail} exceeds budget {b}")
        trace.append(ScrStep(case, i_s, n_s, kn, b, tail))
    trace.reverse()
    bound = step_bound(n, m)
    if n > 0 and h.norm > bound:
        raise InvariantViolation(f"conjugator norm {h.norm} exceeds budget {bound}")
    if multiply(multiply(inverse(h), f), h) != cur:
        raise InvariantViolation("accumulated conjugator does not conjugate")
    return ScrResult(cur, h, bound, trace)


def scr_element(f: StrandDiagram) -> ScrResult:
    if f.shape != (1, 1):
        raise DiagramError("expected an element of F")
    res = strongly_cyclically_reduce(f)
    b = element_bound(f.norm)
    if res.conjugator.norm > b:
        raise InvariantViolation(f"conjugator norm {res.conjugator.norm} exceeds {b}")
    res.bound = b
    return res


# --------------------------------------------------------------------------
# conjugators between diagrams with the same closure


def _align_connected(f: StrandDiagram, g: StrandDiagram) -> StrandDiagram:
    Af, Ag = closure(f), closure(g)
    nodes_f, nodes_g = sorted(Af.kinds), sorted(Ag.kinds)
    phi = annular.isomorphism(Ag, Af, nodes_g, nodes_f)
    if phi is None:
        raise NotSameClosure("closures are not isomorphic")
    # copy index of each node of g inside the strip of copies of f
    c = {nodes_g[0]: 0}
    stack = [nodes_g[0]]
    adj: dict[int, list] = {v: [] for v in nodes_g}
    for e in Ag.edges.values():
        ef = Af.edges[Af.out_edge[(phi[e.tail], e.tport)]]
        delta = ef.winding - e.winding
        adj[e.tail].append((e.head, delta))
        adj[e.head].append((e.tail, -delta))
    while stack:
        u = stack.pop()
        for v, d in adj[u]:
            if v not in c:
                c[v] = c[u] + d
                stack.append(v)
    low = min(c.values())
    cf = {phi[v]: c[v] - low + 1 for v in c}
    for e in Ag.edges.values():
        ef = Af.edges[Af.out_edge[(phi[e.tail], e.tport)]]
        if cf[phi[e.head]] != cf[phi[e.tail]] + ef.winding - e.winding:
            raise InvariantViolation("windings of the two closures are not cohomologous")
    n = f.norm
    strip = math.ceil(3 * n / 2) + 1
    if max(cf.values()) > strip:
        raise InvariantViolation(f"second cut lies beyond {strip} copies")

    inv_phi = {v: u for u, v in phi.items()}
    b = _Builder()
    node = {}
    for v, kind in Af.kinds.items():
        for k in range(1, cf[v]):
            node[(v, k)] = b.node(kind)
    sources: dict[int, int] = {}
    sinks: dict[int, int] = {}
    top = max(cf.values())
    for e in Af.edges.values():
        u, v, w = e.tail, e.head, e.winding
        eg = Ag.edges[Ag.out_edge[(inv_phi[u], e.tport)]]
        for k in range(1 - w, top + 1):
            tail_in = 1 <= k < cf[u]
            head_in = 1 <= k + w < cf[v]
            crosses_top = k <= 0 < k + w
            if tail_in:
                start = (node[(u, k)], e.tport)
            elif crosses_top:
                t = e.slots[-k]
                src = b.node(SOURCE)
                sources[t] = src
                start = (src, OUT)
            else:
                if head_in:
                    raise InvariantViolation("strip region is not closed upward")
                continue
            if head_in:
                end = (node[(v, k + w)], e.hport)
            else:
                m = cf[u] - k
                if not 1 <= m <= eg.winding:
                    raise InvariantViolation("lifted edge misses the second cut")
                snk = b.node(SINK)
                sinks[eg.slots[m - 1]] = snk
                end = (snk, IN)
            b.link(start, end)
    if sorted(sources) != list(range(f.shape[0])) or sorted(sinks) != list(range(g.shape[0])):
        raise InvariantViolation("strip region has the wrong boundary")
    h = b.freeze([sources[t] for t in sorted(sources)], [sinks[t] for t in sorted(sinks)])
    return reduce(h)


def align_same_closure(f: StrandDiagram, g: StrandDiagram) -> StrandDiagram:
    """A reduced h with f h = h g, for reduced square f, g whose reduced
    closures are isomorphic.

    Strongly cyclically reduced inputs are aligned directly, within norm
    3n^2/2. Other inputs are first brought to that form, f' = a^-1 f a and
    g' = b^-1 g b, and the answer is a h' b^-1.
    """
    if not (is_strongly_cyclically_reduced(f) and is_strongly_cyclically_reduced(g)):
        rf, rg = strongly_cyclically_reduce(f), strongly_cyclically_reduce(g)
        h = _align_scr(rf.reduced_diagram, rg.reduced_diagram)
        h = multiply(multiply(rf.conjugator, h), inverse(rg.conjugator))
        if multiply(f, h) != multiply(h, g):
            raise InvariantViolation("assembled conjugator fails f h = h g")
        return h
    return _align_scr(f, g)


def _align_scr(f: StrandDiagram, g: StrandDiagram) -> StrandDiagram:
    if annular.canonical_encoding(closure(f)) != annular.canonical_encoding(closure(g)):
        raise NotSameClosure("closures differ")
    fb, gb = blocks(f), blocks(g)
    if len(fb) != len(gb):
        raise InvariantViolation("block counts differ despite equal closures")
    pieces = []
    for bf, bg in zip(split_blocks(f, fb), split_blocks(g, gb)):
        if annular.canonical_encoding(closure(bf)) != annular.canonical_encoding(closure(bg)):
            raise InvariantViolation("block closures differ despite equal encodings")
        if bf.norm == 0:
            pieces.append(make_trivial(1))
        else:
            pieces.append(_align_connected(bf, bg))
    h = pieces[0]
    for p in pieces[1:]:
        h = direct_sum(h, p)
    n = f.norm
    if h.norm > Fraction(3, 2) * n * n:
        raise InvariantViolation("aligned conjugator exceeds its norm budget")
    if multiply(f, h) != multiply(h, g):
        raise InvariantViolation("aligned conjugator fails f h = h g")
    return h


# --------------------------------------------------------------------------
# conjugator search


@dataclass
class ConjugacyCertificate:
    conjugator_element: StrandDiagram
    verified: bool
    norm_bound: Fraction
    length_bound: Fraction
    norm: int = 0
    length: int = 0
    annular_nodes: int = 0
    scr_f: Optional[ScrResult] = None
    scr_g: Optional[ScrResult] = None

    def conjugator_word(self) -> str:
        return format_word(element_to_word(self.conjugator_element))

    def to_dict(self) -> dict:
        return {
            "conjugator_word": self.conjugator_word(),
            "verified": self.verified,
            "norm": self.norm,
            "norm_bound": str(self.norm_bound),
            "length": self.length,
            "length_bound": str(self.length_bound),
        }


def conjugates(f: StrandDiagram, g: StrandDiagram, h: StrandDiagram) -> bool:
    """Does h^-1 f h equal g?"""
    return multiply(multiply(inverse(h), f), h) == g


def find_conjugator(f: StrandDiagram, g: StrandDiagram) -> Optional[ConjugacyCertificate]:
    """A verified h with g = h^-1 f h, or None when f and g are not conjugate."""
    r1, r2 = scr_element(f), scr_element(g)
    A1 = closure(r1.reduced_diagram)
    A2 = closure(r2.reduced_diagram)
    if annular.canonical_encoding(A1) != annular.canonical_encoding(A2):
        return None
    h3 = _align_scr(r1.reduced_diagram, r2.reduced_diagram)
    h = multiply(multiply(r1.conjugator, h3), inverse(r2.conjugator))
    if h.shape != (1, 1):
        raise InvariantViolation("assembled conjugator is not an element")
    if not conjugates(f, g, h):
        raise InvariantViolation("assembled conjugator fails verification")
    k = A1.norm
    nb = conjugator_norm_bound(f.norm, g.norm, k)
    if h.norm > nb:
        raise InvariantViolation(f"conjugator norm {h.norm} exceeds {nb}")
    lb = Fraction(conjugator_length_bound(length_exact(f), length_exact(g)))
    return ConjugacyCertificate(h, True, nb, lb, h.norm, length_exact(h), k, r1, r2)


def are_conjugate(f: StrandDiagram, g: StrandDiagram) -> bool:
    """Decided by the encodings of the reduced closures alone."""
    return annular.closure_encoding(f) == annular.closure_encoding(g)


def centralizer_is_cyclic_certificate(f: StrandDiagram) -> bool:
    """Sufficient test that the centralizer of f is generated by f.

    Needs a connected reduced closure and an end slope of 2 or 1/2 (a proper
    root would make that exponent a multiple of its order). False means
    inconclusive.
    """
    if f.shape != (1, 1):
        raise DiagramError("expected an element of F")
    if f.norm == 0:
        raise CertificateError("the identity has no such certificate")
    A = reduce_annular(closure(f))
    if len(annular.component_groups(A)) != 1:
        return False
    pl = element_to_plmap(f)
    return abs(log2_exact(slope_at_0(pl))) == 1 or abs(log2_exact(slope_at_1(pl))) == 1


@dataclass
class ShiftSearch:
    distance: int
    shift: int
    unique: bool
    profile: dict[int, tuple[int, Optional[int]]] = field(default_factory=dict)


def conjugator_distance_exact(f: StrandDiagram, g: StrandDiagram, h0: StrandDiagram,
                              length: Optional[Callable[[bytes, int], Optional[int]]] = None,
                              upper: Optional[int] = None) -> ShiftSearch:
    """Least word length over all conjugators f^k h0 from f to g.

    Needs the cyclic-centralizer certificate for f, so these are all the
    conjugators. ``length(key, cap)`` may return None for "more than cap";
    by default the weight-table length is used. A shift is skipped when
    ‖f^k h0‖/2 - 2 already exceeds the incumbent, and a direction is closed
    once the lower bound |k|K - 2‖c‖ - ‖h0‖ on the norm (K the norm of the
    cyclically reduced form of f, c its conjugator) pushes the length bound
    past the incumbent. ``upper``, if given, must bound the answer from above
    and only serves as the initial cap.
    """
    if f.norm == 0 and g.norm == 0:
        return ShiftSearch(0, 0, True, {0: (0, 0)})
    if not centralizer_is_cyclic_certificate(f):
        raise CertificateError("centralizer certificate does not hold for f")
    if not conjugates(f, g, h0):
        raise CertificateError("h0 does not conjugate f to g")
    if length is None:
        def length(key, cap):
            from .thompson_f import key_length
            return key_length(key)

    scr = scr_element(f)
    K = scr.reduced_diagram.norm
    slack = 2 * scr.conjugator.norm + h0.norm
    fk = element_key(f)
    finv = cayley.invert(fk)
    base = element_key(h0)
    best: Optional[int] = None
    winners: list[int] = []
    profile: dict[int, tuple[int, Optional[int]]] = {}

    def visit(k: int, key: bytes) -> None:
        nonlocal best, winners
        nrm = cayley.key_norm(key)
        cap = best if best is not None else upper
        if cap is not None and nrm / 2 - 2 > cap:
            profile[k] = (nrm, None)
            return
        if cap is None:
            cap = 2 * nrm
        ln = length(key, cap)
        profile[k] = (nrm, ln)
        if ln is None:
            return
        if best is None or ln < best:
            best, winners = ln, [k]
        elif ln == best:
            winners.append(k)

    visit(0, base)
    for direction, step in ((1, fk), (-1, finv)):
        key = base
        k = 0
        while True:
            k += direction
            key = cayley.multiply_keys(step, key)
            visit(k, key)
            limit = best if best is not None else upper
            if limit is not None and (abs(k) * K - slack) / 2 - 2 > limit:
                break
    if best is None:
        raise CertificateError("no conjugator within the given upper bound")
    return ShiftSearch(best, min(winners, key=abs), len(winners) == 1, profile)
