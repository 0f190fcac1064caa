from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from strandf.cayley import IdentityBall

LETTERS = ["x0", "x0^-1", "x1", "x1^-1"]

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def random_word(rng: random.Random, length: int) -> str:
    return " ".join(rng.choice(LETTERS) for _ in range(length))


words = st.lists(st.sampled_from(LETTERS), max_size=16).map(" ".join)


@pytest.fixture(scope="session")
def ball() -> IdentityBall:
    """Identity side of the breadth-first search, shared across tests."""
    return IdentityBall()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
