"""Strand diagrams, Thompson's group F and conjugator lengths."""

from __future__ import annotations

from .annular import AnnularDiagram, canonical_encoding, closure, closure_encoding, reduce_annular
from .conjugacy import (
    ConjugacyCertificate, are_conjugate, centralizer_is_cyclic_certificate,
    conjugator_distance_exact, find_conjugator, scr_element, strongly_cyclically_reduce,
)
from .families import frak_f, frak_g, frak_h, f_element, g_element, h_element, right_vine
from .strand_core import StrandDiagram, inverse, make_trivial, multiply, reduce
from .thompson_f import (
    TreePair, element_to_plmap, length_bfs, length_exact, parse_word, word_to_element,
)

__version__ = "0.1.0"

__all__ = [
    "AnnularDiagram", "ConjugacyCertificate", "StrandDiagram", "TreePair",
    "are_conjugate", "canonical_encoding", "centralizer_is_cyclic_certificate", "closure",
    "closure_encoding",
    "conjugator_distance_exact", "element_to_plmap", "f_element", "find_conjugator",
    "frak_f", "frak_g", "frak_h", "g_element", "h_element", "inverse", "length_bfs",
    "length_exact", "make_trivial", "multiply", "parse_word", "reduce", "reduce_annular",
    "right_vine", "scr_element", "strongly_cyclically_reduce", "word_to_element",
]
