import math

import pytest
from hypothesis import settings

from gkzflop.fixtures import load_fixture
from gkzflop.toric import find_circuit
from gkzflop import wall

settings.register_profile("ci", deadline=None, derandomize=True,
                          max_examples=30)
settings.load_profile("ci")

FIXTURES = ("a1", "conifold")


class Pack:
    """Loaded fixture with its circuit, shared across the session."""

    def __init__(self, name):
        self.name = name
        self.data, self.tris = load_fixture(name)
        self.t_plus = self.tris["plus"]
        self.t_minus = self.tris["minus"]
        self.circuit = find_circuit(self.data, self.t_plus, self.t_minus)

    def path(self, y_abs=0.1):
        h2 = sum(v * v for v in self.circuit.h)
        amp = math.log(1.0 / y_abs ** 2) / h2
        return wall.select_endpoints(self.circuit, amp, y_abs)


@pytest.fixture(scope="session")
def packs():
    return {name: Pack(name) for name in FIXTURES}


@pytest.fixture(scope="session", params=FIXTURES)
def pack(request, packs):
    return packs[request.param]


@pytest.fixture(scope="session")
def a1(packs):
    return packs["a1"]


@pytest.fixture(scope="session")
def conifold(packs):
    return packs["conifold"]


@pytest.fixture(scope="session")
def verify_reports(packs):
    """Full crossing battery, computed once per fixture."""
    out = {}
    for name, p in packs.items():
        out[name] = wall.verify_fm_equals_ac(p.data, p.circuit, p.t_plus,
                                             p.t_minus)
    return out


@pytest.fixture(scope="session")
def oracle_reports(packs):
    """Contour-vs-pole-sum battery, computed once per fixture."""
    out = {}
    for name, p in packs.items():
        out[name] = wall.oracle_report(p.data, p.circuit, p.t_plus,
                                       p.t_minus, eps_values=(1e-2, 1e-3))
    return out
