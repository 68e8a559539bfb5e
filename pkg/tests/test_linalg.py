import numpy as np
import pytest

from crossedqm.errors import ValidationError
from crossedqm import linalg


def test_spectral_norm_diagonal():
    assert linalg.spectral_norm(np.diag([1.0, -3.0, 2.0]).astype(complex)) == 3.0


def test_spectral_norm_two_by_two():
    m = np.array([[0.0, 3 + 4j], [3 - 4j, 0.0]])
    assert abs(linalg.spectral_norm(m) - 5.0) < 1e-12


def test_spectral_norm_empty_and_zero():
    assert linalg.spectral_norm(np.zeros((0, 0))) == 0.0
    assert linalg.spectral_norm(np.zeros((4, 4))) == 0.0


def test_spectral_norm_large_matches_dense(rng):
    m = rng.standard_normal((90, 70)) + 1j * rng.standard_normal((90, 70))
    got = linalg.spectral_norm(m, tol=1e-12, seed=3)
    want = np.linalg.norm(m, 2)
    assert abs(got - want) <= 1e-9 * (1 + want)


def test_spectral_norm_deterministic(rng):
    m = rng.standard_normal((80, 80)) + 1j * rng.standard_normal((80, 80))
    a = linalg.spectral_norm(m, tol=1e-11, seed=5)
    b = linalg.spectral_norm(m, tol=1e-11, seed=5)
    assert a == b


def test_spectral_norm_adjoint_and_unitary_invariance(rng):
    m = rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40))
    assert abs(linalg.spectral_norm(m) - linalg.spectral_norm(m.conj().T)) <= 1e-10
    q, _ = np.linalg.qr(rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40)))
    u, _ = np.linalg.qr(rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40)))
    assert abs(linalg.spectral_norm(q @ m @ u) - linalg.spectral_norm(m)) <= 1e-8


def test_spectral_norm_rejects_nan():
    m = np.array([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(ValidationError):
        linalg.spectral_norm(m)


def test_hermitian_eigs_basic():
    assert np.all(linalg.hermitian_eigs(np.zeros((3, 3))) == 0.0)
    got = linalg.hermitian_eigs(np.diag([1.0, -1.0]).astype(complex))
    assert np.allclose(got, [-1.0, 1.0])


def test_hermitian_eigs_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        linalg.hermitian_eigs(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_eigs_trace(rng):
    m = rng.standard_normal((25, 25)) + 1j * rng.standard_normal((25, 25))
    m = (m + m.conj().T) / 2
    eigs = linalg.hermitian_eigs(m)
    assert abs(np.sum(eigs) - np.trace(m).real) <= 1e-8 * 25


def test_smallest_singular_value():
    m = np.diag([3.0, 0.5]).astype(complex)
    assert abs(linalg.smallest_singular_value(m) - 0.5) < 1e-14


def test_top_singular_space_degenerate():
    sigma, pairs = linalg.top_singular_space(np.eye(3, dtype=complex))
    assert abs(sigma - 1.0) < 1e-14
    assert len(pairs) == 3
