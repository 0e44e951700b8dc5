import json
import pathlib
import random

import pytest
from hypothesis import settings

from resolvent import Chart, MatrixHom

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

ROOT = pathlib.Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"


def load_raw(name):
    return json.loads((PROBLEMS / name).read_text())


def random_monomial_matrix(rng, names, shape, maxdeg):
    """Entries are monomials of degree 1..maxdeg, about a quarter of them zero."""
    q, p = shape

    def mono():
        if rng.random() < 0.25:
            return "0"
        e = [0] * len(names)
        for _ in range(rng.randint(1, maxdeg)):
            e[rng.randrange(len(names))] += 1
        return "*".join(f"{v}^{k}" for v, k in zip(names, e) if k)

    return [[mono() for _ in range(p)] for _ in range(q)]


@pytest.fixture
def report(capsys):
    """Print a single acceptance line past pytest's capture, then assert."""

    def emit(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] AC{number} {title}"
        if detail:
            line += f" :: {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


@pytest.fixture
def a2():
    return Chart.make(["x", "y"])


@pytest.fixture
def a3():
    return Chart.make(["x", "y", "z"])


def mat(chart, rows):
    return MatrixHom.make(chart, rows)


def rng_for(tag):
    return random.Random(tag)
