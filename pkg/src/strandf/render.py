"""DOT export and matplotlib drawings of strand and annular diagrams.

Layouts are layered by longest-path depth and depend only on the diagram,
so the same input always gives the same picture.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .annular import AnnularDiagram
from .strand_core import (
    IN_PORTS, LEFT, MERGE, OUT, OUT_PORTS, RIGHT, SINK, SOURCE, SPLIT, StrandDiagram,
)

_SHAPE = {SOURCE: "circle", SINK: "doublecircle", MERGE: "triangle", SPLIT: "invtriangle"}
_MARK = {SOURCE: "o", SINK: "s", MERGE: "^", SPLIT: "v"}


@dataclass
class RenderInfo:
    """What ended up on the canvas."""

    interior: int
    sources: int
    sinks: int
    cut_crossings: int = 0
    loops: int = 0


def _dot_id(v) -> str:
    return f"n{v}"


def strand_to_dot(f: StrandDiagram, name: str = "strand") -> str:
    lines = [f"digraph {name} {{", "  rankdir=TB;", "  node [label=\"\", width=0.25];"]
    for i, s in enumerate(f.sources):
        lines.append(f"  {_dot_id(s)} [shape=circle, xlabel=\"s{i + 1}\"];")
    for i, t in enumerate(f.sinks):
        lines.append(f"  {_dot_id(t)} [shape=doublecircle, xlabel=\"t{i + 1}\"];")
    for v in sorted(f.interior()):
        lines.append(f"  {_dot_id(v)} [shape={_SHAPE[f.kinds[v]]}];")
    lines.append("  { rank=source; " + " ".join(_dot_id(s) for s in f.sources) + " }")
    lines.append("  { rank=sink; " + " ".join(_dot_id(t) for t in f.sinks) + " }")
    for (v, p), (w, wp) in sorted(f.succ.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        lines.append(f"  {_dot_id(v)} -> {_dot_id(w)} [taillabel=\"{p[0]}\", headlabel=\"{wp[0]}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def annular_to_dot(A: AnnularDiagram, name: str = "annular") -> str:
    """Edges that cross the cut are dashed and list their cut positions."""
    lines = [f"digraph {name} {{", "  node [label=\"\", width=0.25];"]
    for v in sorted(A.kinds):
        lines.append(f"  {_dot_id(v)} [shape={_SHAPE[A.kinds[v]]}];")
    for k in sorted(A.edges):
        e = A.edges[k]
        if e.is_loop:
            lines.append(f"  loop{k} [shape=point];")
            lines.append(f"  loop{k} -> loop{k} [style=dashed, label=\"cut {list(e.slots)}\"];")
            continue
        style = f", style=dashed, label=\"cut {list(e.slots)}\"" if e.slots else ""
        lines.append(f"  {_dot_id(e.tail)} -> {_dot_id(e.head)} "
                     f"[taillabel=\"{e.tport[0]}\", headlabel=\"{e.hport[0]}\"{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_dot(d: Union[StrandDiagram, AnnularDiagram]) -> str:
    return annular_to_dot(d) if isinstance(d, AnnularDiagram) else strand_to_dot(d)


# --------------------------------------------------------------------------
# layouts


def _layers(nodes, succs) -> dict:
    """Longest-path depth in a DAG given as node -> successor list."""
    indeg = {v: 0 for v in nodes}
    for v in nodes:
        for w in succs[v]:
            indeg[w] += 1
    depth = {v: 0 for v in nodes}
    ready = [v for v in nodes if indeg[v] == 0]
    while ready:
        v = ready.pop()
        for w in succs[v]:
            depth[w] = max(depth[w], depth[v] + 1)
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return depth


def _spread(depth: dict, rank: dict, width: float) -> dict:
    rows: dict[int, list] = {}
    for v, d in depth.items():
        rows.setdefault(d, []).append(v)
    pos = {}
    for d, vs in rows.items():
        vs.sort(key=lambda v: rank[v])
        for i, v in enumerate(vs):
            pos[v] = ((i + 1) * width / (len(vs) + 1), d)
    return pos


def strand_layout(f: StrandDiagram) -> dict:
    """node -> (x, layer); sources on layer 0, sinks on the last layer.

    Each edge carries an interval of the source row: a split halves the
    interval it receives and a merge takes the hull of its two inputs. A node
    sits at the middle of its incoming interval.
    """
    succs = {v: [f.succ[(v, p)][0] for p in OUT_PORTS[k]] for v, k in f.kinds.items()}
    depth = _layers(list(f.kinds), succs)
    bottom = max(max(depth.values(), default=0), 1)
    for t in f.sinks:
        depth[t] = bottom
    m, n = f.shape
    width = float(max(m, n, 2))
    unit = width / m if m else width
    span: dict = {}
    for i, s in enumerate(f.sources):
        span[(s, OUT)] = (i * unit, (i + 1) * unit)
    centre = {}
    for v in sorted(f.kinds, key=lambda v: depth[v]):
        k = f.kinds[v]
        ins = [span[f.pred[(v, p)]] for p in IN_PORTS[k]]
        lo = min(a for a, _ in ins) if ins else span[(v, OUT)][0]
        hi = max(b for _, b in ins) if ins else span[(v, OUT)][1]
        centre[v] = (lo + hi) / 2
        if k == SPLIT:
            span[(v, LEFT)] = (lo, (lo + hi) / 2)
            span[(v, RIGHT)] = ((lo + hi) / 2, hi)
        elif k == MERGE:
            span[(v, OUT)] = (lo, hi)
    return {v: (centre[v], depth[v]) for v in f.kinds}


def annular_layout(A: AnnularDiagram) -> tuple[dict, float, int]:
    """Positions for nodes below the cut, the canvas width and the depth."""
    succs: dict = {v: [] for v in A.kinds}
    for e in A.edges.values():
        if not e.is_loop and not e.slots:
            succs[e.tail].append(e.head)
    depth = {v: d + 1 for v, d in _layers(list(A.kinds), succs).items()}
    rank = {v: v for v in A.kinds}
    width = float(max(len(A.cut), 2, *(list(depth.values()) or [0])))
    bottom = max(depth.values(), default=0) + 1
    return _spread(depth, rank, width), width, bottom


# --------------------------------------------------------------------------
# matplotlib


def _figure(width: float, height: float):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(1.2 + width, 1.2 + 0.8 * height))
    ax.set_axis_off()
    ax.invert_yaxis()
    return fig, ax


def draw_strand(f: StrandDiagram, out: Optional[str] = None):
    """Draw f top to bottom; returns (figure, RenderInfo)."""
    pos = strand_layout(f)
    height = max(y for _, y in pos.values())
    fig, ax = _figure(max(x for x, _ in pos.values()), height)
    for (v, _), (w, _) in f.succ.items():
        (x0, y0), (x1, y1) = pos[v], pos[w]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="-|>", color="0.2", lw=1.0,
                                    shrinkA=4, shrinkB=4))
    for v, k in f.kinds.items():
        x, y = pos[v]
        ax.plot([x], [y], marker=_MARK[k], color="C3" if k == MERGE else "C0", ms=8)
    info = RenderInfo(f.norm, len(f.sources), len(f.sinks))
    if out:
        fig.savefig(out, format=out.rsplit(".", 1)[-1] if "." in out else "svg")
    return fig, info


def draw_annular(A: AnnularDiagram, out: Optional[str] = None):
    """Draw an annular diagram cut open along a dashed line.

    The dashed line at the top and the one at the bottom are the same cut;
    an edge that crosses it leaves through the bottom and comes back in at
    the top in the column of its cut position.
    """
    pos, width, bottom = annular_layout(A)
    fig, ax = _figure(width, bottom)
    for y in (0, bottom):
        ax.plot([0, width], [y, y], ls="--", color="C2", lw=1.0)
    W = len(A.cut)
    col = [(i + 1) * width / (W + 1) for i in range(W)]
    style = dict(color="0.2", lw=1.0)
    for e in A.edges.values():
        if e.is_loop:
            for s in e.slots:
                ax.plot([col[s], col[s]], [0, bottom], **style)
            continue
        start = pos[e.tail]
        for s in e.slots:
            ax.plot([start[0], col[s]], [start[1], bottom], **style)
            start = (col[s], 0)
        ax.annotate("", xy=pos[e.head], xytext=start,
                    arrowprops=dict(arrowstyle="-|>", shrinkA=0, shrinkB=4, **style))
    for v, k in A.kinds.items():
        ax.plot([pos[v][0]], [pos[v][1]], marker=_MARK[k],
                color="C3" if k == MERGE else "C0", ms=8)
    info = RenderInfo(A.norm, 0, 0, cut_crossings=W, loops=len(A.loops()))
    if out:
        fig.savefig(out, format=out.rsplit(".", 1)[-1] if "." in out else "svg")
    return fig, info


def draw(d: Union[StrandDiagram, AnnularDiagram], out: Optional[str] = None):
    if isinstance(d, AnnularDiagram):
        return draw_annular(d, out)
    return draw_strand(d, out)


def plot_clf(records, out: str):
    """cd(f_n, g_n) against n with the closed form and the lower bound."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [r.n for r in records]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, [r.cd for r in records], "o-", label="cd (computed)")
    ax.plot(ns, [r.remark33 for r in records], "s--", label="closed form")
    ax.plot(ns, [float(r.thm32_lower) for r in records], ":", label="lower bound")
    ax.set_xlabel("n")
    ax.set_ylabel("word length")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return out
