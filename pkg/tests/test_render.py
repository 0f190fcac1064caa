from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from strandf.annular import closure  # noqa: E402
from strandf.families import frak_f, right_vine  # noqa: E402
from strandf.render import (  # noqa: E402
    annular_to_dot, draw, strand_layout, strand_to_dot,
)
from strandf.thompson_f import word_to_element  # noqa: E402


def test_x0_picture(tmp_path):
    fig, info = draw(word_to_element("x0"), str(tmp_path / "x0.svg"))
    plt.close(fig)
    assert info.interior == 4 and info.sources == info.sinks == 1


def test_vine_layout():
    t = right_vine(5)
    pos = strand_layout(t)
    splits = [v for v in t.interior()]
    assert len(splits) == 4
    # the spine drifts right, one layer per split
    xs = sorted((pos[v][1], pos[v][0]) for v in splits)
    assert [y for y, _ in xs] == [1, 2, 3, 4]
    assert all(a[1] < b[1] for a, b in zip(xs, xs[1:]))


def test_closure_picture(tmp_path):
    fig, info = draw(closure(frak_f(3)), str(tmp_path / "c.png"))
    plt.close(fig)
    assert info.interior == 12 and info.cut_crossings == 7 and info.loops == 0


def test_dot_is_deterministic():
    d = word_to_element("x0 x1^-1 x0")
    assert strand_to_dot(d) == strand_to_dot(word_to_element("x0 x1^-1 x0"))
    text = annular_to_dot(closure(frak_f(2)))
    assert text.count("style=dashed") == 5
