"""Command-line front end.

    strandf reduce -w "x0 x1 x0^-1"
    strandf len -w fn:3
    strandf conjugate "x0" "x1 x0 x1^-1"
    strandf clf --from 3 --to 6 --csv clf.csv
    strandf render -w frak_f:3 --closure --fmt svg --out f3.svg

Exit codes: 0 ok, 1 bad input, 2 not conjugate, 3 internal invariant
violated, 4 an experiment row disagrees with the closed form.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import annular
from .conjugacy import CertificateError, InvariantViolation, find_conjugator
from .families import FAMILIES, family_diagram, records_to_csv, run_clf_experiment
from .strand_core import DiagramError, StrandDiagram
from .thompson_f import (
    NotAnElementError, WordSyntaxError, diagram_to_treepair, element_to_word, format_word,
    length_bfs, length_exact, word_to_diagram,
)

EXIT_OK, EXIT_USER, EXIT_NOT_CONJUGATE, EXIT_INVARIANT, EXIT_MISMATCH = 0, 1, 2, 3, 4


class UserError(Exception):
    pass


def load(text: str) -> StrandDiagram:
    """A word over x0, x1, ... or a family spec such as ``fn:4``."""
    name = text.partition(":")[0].strip()
    if ":" in text and name in FAMILIES:
        try:
            return family_diagram(text.strip())
        except ValueError as exc:
            raise UserError(str(exc)) from exc
    try:
        return word_to_diagram(text)
    except WordSyntaxError as exc:
        raise UserError(str(exc)) from exc


def _element(text: str) -> StrandDiagram:
    d = load(text)
    if d.shape != (1, 1):
        raise UserError(f"{text!r} is a {d.shape} diagram, not an element of F")
    return d


def _describe(d: StrandDiagram) -> list[str]:
    out = [f"shape: {d.shape}", f"norm: {d.norm}"]
    if d.shape == (1, 1):
        t = diagram_to_treepair(d)
        out.append(f"tree pair: {t}")
        out.append(f"normal form: {format_word(element_to_word(t)) or '1'}")
    else:
        out.append(f"merges: {d.count('merge')}, splits: {d.count('split')}")
    return out


def cmd_reduce(args) -> int:
    d = load(args.word)
    if args.json:
        from .strand_core import to_dict
        print(json.dumps(to_dict(d), sort_keys=True))
    else:
        print("\n".join(_describe(d)))
    return EXIT_OK


def cmd_norm(args) -> int:
    print(load(args.word).norm)
    return EXIT_OK


def cmd_len(args) -> int:
    d = _element(args.word)
    if args.method == "bfs":
        ln = length_bfs(d, args.cap)
        if ln is None:
            print(f"length exceeds cap {args.cap}", file=sys.stderr)
            return EXIT_USER
        print(ln)
    else:
        # the table engine is checked against breadth-first search by the
        # test suite, so "auto" goes straight to it
        print(length_exact(d))
    return EXIT_OK


def cmd_conjugate(args) -> int:
    f, g = _element(args.f), _element(args.g)
    cert = find_conjugator(f, g)
    if cert is None:
        print(json.dumps({"conjugate": False}) if args.json else "not conjugate")
        return EXIT_NOT_CONJUGATE
    if args.json:
        print(json.dumps({"conjugate": True, **cert.to_dict()}, sort_keys=True))
    else:
        print("conjugate")
        print(f"conjugator: {cert.conjugator_word() or '1'}")
        print(f"norm: {cert.norm} (bound {cert.norm_bound})")
        print(f"length: {cert.length} (bound {cert.length_bound})")
    return EXIT_OK


def cmd_clf(args) -> int:
    if not 2 <= args.n_from <= args.n_to:
        raise UserError("need 2 <= --from <= --to")
    records = run_clf_experiment(range(args.n_from, args.n_to + 1))
    text = records_to_csv(records)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
        if not args.no_plot:
            from .render import plot_clf
            fig = args.csv.rsplit(".", 1)[0] + ".svg"
            plot_clf(records, fig)
            print(f"wrote {args.csv} and {fig}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.match for r in records) else EXIT_MISMATCH


def cmd_render(args) -> int:
    from . import render

    d = load(args.word)
    target = annular.closure(d) if args.closure else d
    if args.fmt == "dot":
        text = render.to_dot(target)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    out = args.out or f"diagram.{args.fmt}"
    _, info = render.draw(target, out)
    print(f"wrote {out}: {info.interior} interior nodes, {info.cut_crossings} cut crossings",
          file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="strandf", description="Strand diagrams for Thompson's group F.")
    sub = p.add_subparsers(dest="command", required=True)

    def word_arg(sp):
        sp.add_argument("-w", "--word", required=True, help="word like 'x0 x1^-2' or spec like fn:4")

    sp = sub.add_parser("reduce", help="reduced diagram of a word")
    word_arg(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("norm", help="number of interior nodes")
    word_arg(sp)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("len", help="word length over x0, x1")
    word_arg(sp)
    sp.add_argument("--method", choices=["auto", "bfs", "table"], default="auto")
    sp.add_argument("--cap", type=int, default=20, help="search depth for --method bfs")
    sp.set_defaults(func=cmd_len)

    sp = sub.add_parser("conjugate", help="decide conjugacy and print a conjugator")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_conjugate)

    sp = sub.add_parser("clf", help="conjugator distances of the f_n, g_n family")
    sp.add_argument("--from", dest="n_from", type=int, default=3)
    sp.add_argument("--to", dest="n_to", type=int, default=6)
    sp.add_argument("--csv", help="write CSV here and a plot next to it")
    sp.add_argument("--no-plot", action="store_true")
    sp.set_defaults(func=cmd_clf)

    sp = sub.add_parser("render", help="draw a diagram or its closure")
    word_arg(sp)
    sp.add_argument("--fmt", choices=["dot", "svg", "png", "pdf"], default="dot")
    sp.add_argument("--out")
    sp.add_argument("--closure", action="store_true", help="draw the annular closure")
    sp.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UserError, NotAnElementError, CertificateError, DiagramError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except (InvariantViolation, AssertionError) as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
