import numpy as np
import pytest

import crossedqm as cq


@pytest.fixture(scope="session")
def z1():
    return cq.free_abelian(1)


@pytest.fixture(scope="session")
def z2():
    return cq.free_abelian(2)


@pytest.fixture(scope="session")
def heis():
    return cq.heisenberg3()


@pytest.fixture(scope="session")
def c5():
    return cq.finite_cyclic(5)


@pytest.fixture(scope="session")
def two_point():
    return cq.lip_triple(np.array([[0.0, 2.0], [2.0, 0.0]]))


@pytest.fixture(scope="session")
def three_point():
    return cq.lip_triple(np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]))


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)


def swap_crossed(model, distance=2.0, graded=False):
    """Crossed product over a two-point space with the swap action driven
    by the first abelianised coordinate."""
    triple = cq.lip_triple(np.array([[0.0, distance], [distance, 0.0]]), graded=graded)
    n_ab = 2 if model.family in ("z", "heisenberg3") and len(model.identity().coords) > 1 else 1
    if model.family == "z":
        n_ab = model.params[0]
    elif model.family == "heisenberg3":
        n_ab = 2
    else:
        n_ab = 1
    weights = [0] * n_ab
    weights[0] = 1
    action = cq.permutation_action(model, triple, [1, 0], weights)
    return cq.CrossedProduct(model, triple, action)


def m2_inner_crossed(model, with_dirac=True):
    """Crossed product over M_2 with a diagonal-phase inner action."""
    dirac = np.diag([1.0, -1.0]).astype(complex) if with_dirac else None
    triple = cq.matrix_triple(2, dirac)
    if model.family == "z":
        n_ab = model.params[0]
    elif model.family == "heisenberg3":
        n_ab = 2
    else:
        n_ab = 1
    if model.family == "cyclic":
        w = np.exp(2j * np.pi / model.params[0])
        phases = [np.diag([w, w.conjugate()]).astype(complex)]
    else:
        phases = [np.diag([1j, -1j]).astype(complex), np.diag([1.0, -1.0]).astype(complex)]
    unitaries = [phases[i % len(phases)] for i in range(n_ab)]
    action = cq.inner_action(model, triple, unitaries)
    return cq.CrossedProduct(model, triple, action)


def max_coeff_diff(a, b):
    """Largest entrywise difference between two crossed elements."""
    support = set(a.support) | set(b.support)
    if not support:
        return 0.0
    return max(float(np.max(np.abs(a.coefficient(g) - b.coefficient(g)))) for g in support)
