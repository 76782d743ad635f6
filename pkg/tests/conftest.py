"""Shared fixtures: the two lattice presets and a seeded abstract split."""

import pytest

from fykit.faddeev import FewBodySplit
from fykit.lattice import LatticeModel, PairPotential, hamiltonian_terms


def pytest_terminal_summary(terminalreporter):
    """Print the one-line verdict per acceptance criterion, when they ran."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def tiny3():
    """Three particles on a 6-site open chain with a gaussian attraction."""
    return LatticeModel(
        N=3,
        L=6,
        boundary="box",
        t=1.0,
        potential=PairPotential("gaussian", (-4.0, 1.0)),
    )


@pytest.fixture(scope="session")
def tiny4():
    """Four particles on a 4-site open chain with an onsite attraction."""
    return LatticeModel(
        N=4,
        L=4,
        boundary="box",
        t=1.0,
        potential=PairPotential("onsite", (-6.0,)),
    )


@pytest.fixture(scope="session")
def tiny3_split(tiny3):
    h0, pairs, pots = hamiltonian_terms(tiny3)
    return FewBodySplit(h0=h0, potentials=tuple(pots)), pairs


@pytest.fixture(scope="session")
def tiny4_split(tiny4):
    h0, pairs, pots = hamiltonian_terms(tiny4)
    return FewBodySplit(h0=h0, potentials=tuple(pots)), pairs


def random_symmetric(rng, dim):
    m = rng.standard_normal((dim, dim))
    return 0.5 * (m + m.T)
