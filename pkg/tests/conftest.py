import numpy as np
import pytest

import gfourier as gf


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def g2():
    return gf.pair_groupoid(2)


@pytest.fixture(scope="session")
def g3():
    return gf.pair_groupoid(3)


@pytest.fixture(scope="session")
def g4():
    return gf.pair_groupoid(4)


@pytest.fixture(scope="session")
def z2():
    return gf.group_groupoid(gf.cyclic_table(2))


@pytest.fixture(scope="session")
def z3():
    return gf.group_groupoid(gf.cyclic_table(3))


@pytest.fixture(scope="session")
def bundle23():
    return gf.group_bundle([gf.cyclic_table(2), gf.cyclic_table(3)])


@pytest.fixture(scope="session")
def weighted_bundle():
    return gf.group_bundle([gf.cyclic_table(2), gf.cyclic_table(3)], unit_weights=[2.0, 0.5])


@pytest.fixture(scope="session")
def transf():
    # cyclic rotation on three points
    return gf.transformation_groupoid(gf.cyclic_table(3), [[0, 1, 2], [1, 2, 0], [2, 0, 1]])


def no_bisection_structure():
    """Two units whose claimed identity at unit 1 has source 0.

    Not a valid groupoid (validate flags it); both range fibers then share
    source 0, so no bisection exists.  Used for negative-path coverage.
    """
    return gf.FiniteGroupoid(
        range_of=np.array([0, 1]),
        source_of=np.array([0, 0]),
        inverse_of=np.array([0, 1]),
        compose_table=np.array([[0, -1], [1, -1]]),
        unit_arrows=np.array([0, 1]),
        weights=np.ones(2),
    )


def forced_arrow_structure():
    """Three units plus an extra arrow 0 <- 1 with no inverse arrow present.

    Invalid as a groupoid, but the pick combinatorics are well defined: any
    bisection through arrow 3 would need two picks with source 1.
    """
    return gf.FiniteGroupoid(
        range_of=np.array([0, 1, 2, 0]),
        source_of=np.array([0, 1, 2, 1]),
        inverse_of=np.array([0, 1, 2, 3]),
        compose_table=np.array(
            [
                [0, -1, -1, 3],
                [-1, 1, -1, -1],
                [-1, -1, 2, -1],
                [-1, 3, -1, -1],
            ]
        ),
        unit_arrows=np.array([0, 1, 2]),
        weights=np.ones(4),
    )


def random_function(g, rng):
    return rng.standard_normal(g.n_arrows) + 1j * rng.standard_normal(g.n_arrows)


def random_pd(g, rng, mixture=True):
    f = random_function(g, rng)
    phi = gf.regular_coefficient(g, f, f)
    if mixture and rng.random() < 0.5:
        h = random_function(g, rng)
        phi = phi + 0.7 * gf.regular_coefficient(g, h, h)
    return phi
