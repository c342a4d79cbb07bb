import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from secondkind import tensor_core as tc
from secondkind.errors import InvalidInput

from .reference import first_kind_eigs, kn_loops, second_kind_eigs, sphere, tensor_from_abc

dims = st.integers(2, 6)


def sym(n, elements=st.floats(-3, 3, allow_nan=False)):
    return arrays(np.float64, (n, n), elements=elements).map(lambda m: 0.5 * (m + m.T))


@pytest.mark.parametrize("n", range(2, 9))
def test_traceless_dim(n):
    assert tc.traceless_dim(n) == (n - 1) * (n + 2) // 2 == len(tc.traceless_basis(n))


def test_kn_matches_loop_formula(rng):
    A, B = rng.normal(size=(2, 4, 4))
    A, B = A + A.T, B + B.T
    np.testing.assert_allclose(tc.kulkarni_nomizu(A, B).r, kn_loops(A, B), atol=1e-13)


@pytest.mark.parametrize("n", range(2, 9))
def test_half_g_kn_g_is_unit_sphere(n):
    g = np.eye(n)
    R = tc.kulkarni_nomizu(0.5 * g, g)
    inv = tc.invariants_of(R)
    assert all(abs(k - 1) < 1e-14 for k in inv.sectional.values())
    np.testing.assert_allclose(tc.second_kind_matrix(R), np.eye(tc.traceless_dim(n)), atol=1e-13)


def test_kn_of_zero():
    assert not np.any(tc.kulkarni_nomizu(np.zeros((3, 3)), np.eye(3)).r)


def test_kn_schouten_gives_cylinder_first_kind():
    # the 2-form e_p ^ e_q is an eigenvector with eigenvalue mu_p + mu_q
    mu = [-0.5, 0.5, 0.5]
    oracle = sorted(mu[p] + mu[q] for p, q in [(0, 1), (0, 2), (1, 2)])
    R = tc.kulkarni_nomizu(np.diag(mu), np.eye(3))
    np.testing.assert_allclose(np.linalg.eigvalsh(tc.first_kind_matrix(R)), oracle, atol=1e-14)
    np.testing.assert_allclose(oracle, [0, 0, 1])


def test_kn_dimension_mismatch():
    with pytest.raises(InvalidInput):
        tc.kulkarni_nomizu(np.eye(3), np.eye(4))


@given(dims.flatmap(lambda n: st.tuples(sym(n), sym(n))))
def test_kn_symmetries(pair):
    A, B = pair
    R = tc.kn_product_array(A, B)
    defects = tc.symmetry_defects(R)
    assert max(defects.values()) <= 1e-12 * max(1.0, np.abs(R).max())
    np.testing.assert_allclose(R, tc.kn_product_array(B, A), atol=1e-12)


def test_curvtensor_rejects_bianchi_violation():
    # pair symmetries hold but R_0123 + R_1203 + R_2013 = 1 (Bianchi is vacuous in 3D)
    r = np.zeros((4, 4, 4, 4))
    for (i, j, k, l), v in {(0, 1, 2, 3): 1.0}.items():
        for (p, q, s, t), sign in (((i, j, k, l), 1), ((j, i, k, l), -1), ((i, j, l, k), -1), ((j, i, l, k), 1)):
            r[p, q, s, t] = sign * v
            r[s, t, p, q] = sign * v
    with pytest.raises(InvalidInput):
        tc.CurvTensor(r)


def test_curvtensor_rejects_bad_shape():
    with pytest.raises(InvalidInput):
        tc.CurvTensor(np.zeros((3, 3, 3)))
    with pytest.raises(InvalidInput):
        tc.CurvTensor(np.zeros((9, 9, 9, 9)))


def test_round_sphere_from_eigs():
    np.testing.assert_allclose(tc.curvature_from_first_kind_eigs(1, 1, 1).r, sphere(3), atol=1e-15)


def test_cylinder_from_eigs():
    # S^2 x R: the only curved plane is the one tangent to the sphere factor
    R = tc.curvature_from_first_kind_eigs(0, 0, 1)
    inv = tc.invariants_of(R)
    assert sorted(inv.sectional.values()) == [0.0, 0.0, 1.0]
    np.testing.assert_allclose(np.linalg.eigvalsh(inv.ricci), [0, 1, 1], atol=1e-15)
    assert inv.scalar == pytest.approx(2.0)


@pytest.mark.parametrize("abc,ricci,scalar", [
    ((1, 1, 1), (2, 2, 2), 6.0),
    ((0, 0, 1), (0, 1, 1), 2.0),
    ((-1, 1, 1), (0, 0, 2), 2.0),
])
def test_invariants(abc, ricci, scalar):
    inv = tc.invariants_of(tc.curvature_from_first_kind_eigs(*abc))
    a, b, c = abc
    assert sorted(ricci) == sorted([a + b, a + c, b + c])
    np.testing.assert_allclose(np.linalg.eigvalsh(inv.ricci), ricci, atol=1e-14)
    assert inv.scalar == pytest.approx(scalar, abs=1e-14)


def test_unsorted_eigs_rejected():
    with pytest.raises(InvalidInput):
        tc.curvature_from_first_kind_eigs(1, 0, 2)


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3).map(sorted))
def test_first_kind_matrix_is_diag_abc(abc):
    R = tc.curvature_from_first_kind_eigs(*abc)
    M = tc.first_kind_matrix(R)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(M)), abc, atol=1e-12)
    np.testing.assert_allclose(M, np.diag(np.diag(M)), atol=1e-13)
    np.testing.assert_allclose(R.r, tensor_from_abc(*abc), atol=1e-12)


def test_first_kind_of_sphere_and_zero():
    np.testing.assert_allclose(tc.first_kind_matrix(sphere(3)), np.eye(3), atol=1e-15)
    assert not np.any(tc.first_kind_matrix(np.zeros((3, 3, 3, 3))))


@pytest.mark.parametrize("abc,expected", [
    ((0, 0, 1), [-1 / 3, 0, 0, 1, 1]),
    ((-1, 1, 1), [-1, -1, 1, 1, 5 / 3]),
    ((1, 1, 1), [1] * 5),
])
def test_second_kind_examples(abc, expected):
    M = tc.second_kind_matrix(tc.curvature_from_first_kind_eigs(*abc))
    np.testing.assert_allclose(np.linalg.eigvalsh(M), expected, atol=1e-13)
    np.testing.assert_allclose(second_kind_eigs(tensor_from_abc(*abc)), expected, atol=1e-13)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_second_kind_matrix_vs_reference(n, rng):
    A, B = rng.normal(size=(2, n, n))
    R = kn_loops(A + A.T, B + B.T)
    np.testing.assert_allclose(np.linalg.eigvalsh(tc.second_kind_matrix(R)), second_kind_eigs(R), atol=1e-11)
    np.testing.assert_allclose(np.linalg.eigvalsh(tc.first_kind_matrix(R)), first_kind_eigs(R), atol=1e-11)


def test_batched_second_kind_matrices(rng):
    A = rng.normal(size=(4, 3, 3))
    A = A + A.transpose(0, 2, 1)
    stack = tc.kn_product_array(A, np.eye(3))
    batch = tc.second_kind_matrices(stack)
    for R, M in zip(stack, batch):
        np.testing.assert_allclose(M, tc.second_kind_matrix(R), atol=1e-14)


def test_r_bar_and_projection(rng):
    R = tc.curvature_from_first_kind_eigs(-0.3, 0.2, 0.9)
    phi = rng.normal(size=(3, 3))
    phi = tc.project_traceless(phi + phi.T)
    assert abs(np.trace(phi)) < 1e-14
    img = tc.project_traceless(tc.apply_r_bar(R, phi))
    basis = tc.traceless_basis(3)
    coords = np.einsum("aij,ij->a", basis, phi)
    np.testing.assert_allclose(np.einsum("aij,ij->a", basis, img), tc.second_kind_matrix(R) @ coords, atol=1e-13)


def test_bases_are_orthonormal():
    for n in range(2, 9):
        for basis in (tc.two_form_basis(n), tc.traceless_basis(n)):
            gram = np.einsum("aij,bij->ab", basis, basis)
            np.testing.assert_allclose(gram, np.eye(len(basis)) * gram[0, 0], atol=1e-14)
