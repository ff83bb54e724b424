from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from lpaf.algebra import ComplexPermutation, SsfdAlgebra
from lpaf.bratteli import AlgebraDirectSystem
from lpaf.homs import spatial_from_multiplicity

settings.register_profile("lpaf", max_examples=40, deadline=None)
settings.load_profile("lpaf")


def random_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def system_from_mults(p, sizes, mults):
    levels = [SsfdAlgebra(p, s) for s in sizes]
    maps = [spatial_from_multiplicity(m, levels[i], levels[i + 1]) for i, m in enumerate(mults)]
    return AlgebraDirectSystem(p, levels, maps)


def doubling(p=1.5, levels=3):
    return system_from_mults(p, [[2 ** (i + 1)] for i in range(levels)], [[[2]]] * (levels - 1))


def corner(p=1.5):
    return system_from_mults(p, [[1], [2], [3]], [[[1]], [[1]]])


@st.composite
def complex_permutations(draw, max_size=6):
    d = draw(st.integers(1, max_size))
    sigma = draw(st.permutations(range(d)))
    angles = draw(st.lists(st.floats(-np.pi, np.pi), min_size=d, max_size=d))
    return ComplexPermutation(tuple(sigma), tuple(np.exp(1j * np.array(angles))))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def write_json(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return write


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
