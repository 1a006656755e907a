"""Shared fixtures: the generator sets are cached per session.

Construction is cheap (well under a second per rank) but many tests share
the same symbolic generators, and the engine memoises products per basis,
so reusing one ``GeneratorSet`` per rank makes the whole suite faster.
"""

from __future__ import annotations

import sys
from pathlib import Path

SRC = Path(__file__).resolve().parents[1] / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

import pytest

from wsub.subreg import strong_generators


@pytest.fixture(scope="session")
def gens1():
    return strong_generators(1)


@pytest.fixture(scope="session")
def gens2():
    return strong_generators(2)


@pytest.fixture(scope="session")
def gens3():
    return strong_generators(3)
