import numpy as np
import pytest

import crossedqm as cq
from crossedqm.errors import ModelMismatchError, ValidationError
from crossedqm.linalg import spectral_norm

from conftest import m2_inner_crossed, max_coeff_diff, swap_crossed


@pytest.fixture(scope="module")
def cp_z2():
    return swap_crossed(cq.free_abelian(2))


@pytest.fixture(scope="module")
def cp_heis():
    return m2_inner_crossed(cq.heisenberg3())


def test_unit_is_neutral(cp_z2, rng):
    z = cp_z2.random_element(rng, 2)
    assert max_coeff_diff(z * cp_z2.unit(), z) == 0.0
    assert max_coeff_diff(cp_z2.unit() * z, z) == 0.0


def test_single_term_covariance(cp_z2, rng):
    model = cp_z2.group
    g, h = model.element((1, 0)), model.element((0, -1))
    x = cp_z2.triple.random_element(rng)
    y = cp_z2.triple.random_element(rng)
    lhs = cp_z2.element({g: x}) * cp_z2.element({h: y})
    rhs = cp_z2.element({model.multiply(g, h): x @ cp_z2.action.apply(g, y)})
    assert max_coeff_diff(lhs, rhs) <= 1e-14


def test_covariance_relation(cp_heis, rng):
    model = cp_heis.group
    g = model.element((1, 1, 0))
    x = cp_heis.triple.random_element(rng)
    lhs = cp_heis.lam(g) * cp_heis.embed(x) * cp_heis.lam(model.invert(g))
    rhs = cp_heis.embed(cp_heis.action.apply(g, x))
    assert max_coeff_diff(lhs, rhs) <= 1e-12


def test_associativity_sampled(cp_heis, rng):
    for _ in range(4):
        z = cp_heis.random_element(rng, 2, terms=2)
        w = cp_heis.random_element(rng, 2, terms=2)
        v = cp_heis.random_element(rng, 2, terms=2)
        assert max_coeff_diff((z * w) * v, z * (w * v)) <= 1e-12


def test_adjoint_rules(cp_z2, rng):
    model = cp_z2.group
    g = model.element((2, -1))
    assert max_coeff_diff(cp_z2.lam(g).adjoint(), cp_z2.lam(model.invert(g))) == 0.0
    x = cp_z2.triple.random_element(rng)
    assert max_coeff_diff(cp_z2.embed(x).adjoint(), cp_z2.embed(x.conj().T)) == 0.0
    for _ in range(4):
        z = cp_z2.random_element(rng, 2)
        assert max_coeff_diff(z.adjoint().adjoint(), z) <= 1e-14
        w = cp_z2.random_element(rng, 2)
        assert max_coeff_diff((z * w).adjoint(), w.adjoint() * z.adjoint()) <= 1e-12


def test_coefficient_slices(cp_z2, rng):
    model = cp_z2.group
    g, h = model.element((1, 1)), model.element((0, 2))
    x = cp_z2.triple.random_element(rng)
    z = cp_z2.element({g: x})
    assert np.max(np.abs(z.coefficient(g) - x)) == 0.0
    assert np.max(np.abs(z.coefficient(h))) == 0.0
    y = cp_z2.triple.random_element(rng)
    ze = cp_z2.element({model.identity(): y, g: x})
    assert np.max(np.abs(ze.expectation() - y)) == 0.0


def test_slice_matches_truncation_corner(cp_z2, rng):
    # the identity-site block of z lam_g^{-1} reproduces the coefficient at g
    model = cp_z2.group
    m = cp_z2.triple.dim
    g = model.element((1, -1))
    z = cp_z2.random_element(rng, 2, terms=3)
    moved = z * cp_z2.lam(model.invert(g))
    radius = model.word_length(g) + 1
    trunc = moved.truncated_matrix(radius)
    e_idx = trunc.ball.index[model.identity()]
    block = trunc.matrix[e_idx * m:(e_idx + 1) * m, e_idx * m:(e_idx + 1) * m]
    assert np.max(np.abs(block - z.coefficient(g))) <= 1e-12


def test_truncated_identity_and_shift(cp_z2):
    model = cp_z2.group
    assert np.allclose(cp_z2.unit().truncated_matrix(2).matrix,
                       np.eye(len(model.ball(2)) * cp_z2.triple.dim))
    lam = cp_z2.lam(model.element((1, 0)))
    assert abs(lam.truncated_matrix(3).norm() - 1.0) <= 1e-12


def test_truncation_corner_consistency(cp_heis, rng):
    z = cp_heis.random_element(rng, 2, terms=3)
    small = z.truncated_matrix(2)
    big = z.truncated_matrix(3)
    d = small.matrix.shape[0]
    assert np.max(np.abs(big.matrix[:d, :d] - small.matrix)) == 0.0


def test_product_truncation_interior(cp_z2, rng):
    z = cp_z2.random_element(rng, 1, terms=2)
    w = cp_z2.random_element(rng, 1, terms=2)
    R = 4
    inner = R - z.support_radius() - w.support_radius()
    assert inner >= 1
    m = cp_z2.triple.dim
    cut = len(cp_z2.group.ball(inner)) * m
    prod = (z * w).truncated_matrix(R).matrix
    sep = z.truncated_matrix(R).matrix @ w.truncated_matrix(R).matrix
    assert np.max(np.abs(prod[:, :cut] - sep[:, :cut])) <= 1e-12


def test_finite_group_exactness(rng):
    c5 = cq.finite_cyclic(5)
    cp = m2_inner_crossed(c5)
    z = cp.random_element(rng, 2, terms=3)
    w = cp.random_element(rng, 2, terms=3)
    R = 2  # whole group
    assert len(cp.group.ball(R)) == 5
    prod = (z * w).truncated_matrix(R).matrix
    sep = z.truncated_matrix(R).matrix @ w.truncated_matrix(R).matrix
    assert np.max(np.abs(prod - sep)) <= 1e-12
    adj = z.adjoint().truncated_matrix(R).matrix
    assert np.max(np.abs(adj - z.truncated_matrix(R).matrix.conj().T)) <= 1e-12


def test_operator_norm_reports(cp_z2, rng):
    model = cp_z2.group
    lam = cp_z2.lam(model.element((1, 1)))
    rep = lam.operator_norm([2, 3, 4])
    assert abs(rep.value - 1.0) <= 1e-12 and rep.converged
    x = cp_z2.triple.random_element(rng)
    embedded = cp_z2.embed(x).operator_norm([1, 2])
    assert abs(embedded.value - spectral_norm(x)) <= 1e-10
    payload = rep.to_json()
    assert set(payload) == {"value", "converged", "trace"}


def test_shift_sum_path_graph_spectrum():
    z1 = cq.free_abelian(1)
    cp = cq.CrossedProduct.scalars(z1)
    hop = cp.lam(z1.element((1,))) + cp.lam(z1.element((-1,)))
    for R in (2, 3, 5):
        n_sites = 2 * R + 1
        want = 2.0 * np.cos(np.pi / (n_sites + 1))
        got = hop.truncated_matrix(R).norm(tol=1e-12)
        assert abs(got - want) <= 1e-10
    rep = hop.operator_norm([2, 3, 5, 8])
    vals = [v for _, v in rep.trace]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 2.0


def test_norm_monotone_and_adjoint_invariant(cp_heis, rng):
    z = cp_heis.random_element(rng, 2, terms=3)
    rep = z.operator_norm([1, 2, 3])
    vals = [v for _, v in rep.trace]
    assert all(a <= b + 1e-10 for a, b in zip(vals, vals[1:]))
    rep_star = z.adjoint().operator_norm([1, 2, 3])
    for (_, a), (_, b) in zip(rep.trace, rep_star.trace):
        assert abs(a - b) <= 1e-10


def test_cstar_inequality_with_enlarged_radius(cp_z2, rng):
    z = cp_z2.random_element(rng, 1, terms=2)
    R = 2
    R2 = R + 2 * z.support_radius()
    norm_sq = spectral_norm((z.adjoint() * z).truncated_matrix(R).matrix)
    norm_big = spectral_norm(z.truncated_matrix(R2).matrix)
    assert norm_sq <= norm_big ** 2 + 1e-8


def test_mixed_context_rejected(cp_z2, cp_heis):
    with pytest.raises(ModelMismatchError):
        cp_z2.unit() * cp_heis.unit()


def test_element_validation(cp_z2):
    model = cp_z2.group
    with pytest.raises(ValidationError):
        cp_z2.element({model.identity(): np.eye(3)})  # wrong shape
    z = cp_z2.element({model.identity(): np.zeros((2, 2))})
    assert z.support == ()


def test_scalar_context_cached(z1):
    a = cq.CrossedProduct.scalars(z1)
    b = cq.CrossedProduct.scalars(z1)
    assert a is b
    z = a.lam(z1.element((1,))) + b.lam(z1.element((-1,)))
    assert len(z.support) == 2


def test_schedule_validation(cp_z2):
    with pytest.raises(ValidationError):
        cp_z2.unit().operator_norm([3, 2])
    with pytest.raises(ValidationError):
        cp_z2.unit().operator_norm([])


def test_element_json_roundtrip(cp_heis, rng):
    import json

    z = cp_heis.random_element(rng, 2, terms=3)
    payload = json.loads(json.dumps(z.to_json()))
    back = cp_heis.element_from_json(payload)
    assert max_coeff_diff(z, back) == 0.0
    with pytest.raises(ValidationError):
        cp_heis.element_from_json([{"coords": [0, 0, 0], "matrix": [[1.0, 0.0]]}])
