import pytest

from kunzwalk.nilsemigroup import ModularNilsemigroup, unit


def build(m, atoms, extra):
    """Nilsemigroup with ``Z(0) = {0}``, ``Z(p_j) = {e_j}`` and the given extra factorization sets."""
    k = len(atoms)
    facts = {0: [(0,) * k]}
    for j, a in enumerate(atoms):
        facts[a] = [unit(k, j)]
    facts.update(extra)
    return ModularNilsemigroup.from_factorizations(m, atoms, facts)


@pytest.fixture
def n_13_53_15_35():
    """Kunz nilsemigroup of <13, 53, 15, 35> over atoms (1, 2, 9)."""
    from kunzwalk.lights import apery_of_generators

    return apery_of_generators([13, 53, 15, 35])[1]


@pytest.fixture
def n_equalities():
    """m = 9, A = (1,2,3,7,8) with trades e1+e3 ~ 2e2 and e7+e8 ~ 2e3."""
    return build(9, (1, 2, 3, 7, 8), {
        4: [(1, 0, 1, 0, 0), (0, 2, 0, 0, 0)],
        5: [(0, 1, 1, 0, 0)],
        6: [(0, 0, 2, 0, 0), (0, 0, 0, 1, 1)],
    })


@pytest.fixture
def n_not_kunz():
    """m = 8, A = (1,2,5,6): staircase whose cone lies in x_2 = x_6."""
    return build(8, (1, 2, 5, 6), {3: [(1, 1, 0, 0)], 4: [(0, 0, 0, 2)], 7: [(0, 1, 1, 0)]})


@pytest.fixture
def m_glued(n_not_kunz):
    """``n_not_kunz`` with e5 + e6 added as a factorization of 3."""
    return build(8, (1, 2, 5, 6), {3: [(1, 1, 0, 0), (0, 0, 1, 1)], 4: [(0, 0, 0, 2)], 7: [(0, 1, 1, 0)]})


@pytest.fixture
def n_inner_minimal():
    """m = 9, A = (1,3,4,6,7) with Z(2) = {e4+e7}, Z(5) = {e1+e4}, Z(8) = {e1+e7}."""
    return build(9, (1, 3, 4, 6, 7), {2: [(0, 0, 1, 0, 1)], 5: [(1, 0, 1, 0, 0)], 8: [(1, 0, 0, 0, 1)]})


@pytest.fixture
def chain2():
    return build(2, (1,), {})
