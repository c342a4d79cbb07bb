import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from secondkind import numerics, spectra
from secondkind.errors import BadBracket, InvalidInput, NoConvergence
from secondkind.numerics import Bracket, bracketed_root, sym_eigenvalues, sym_eigenvalues_batch
from secondkind.tensor_core import curvature_from_first_kind_eigs, second_kind_matrix

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_identity_5x5():
    assert sym_eigenvalues(np.eye(5), 1e-12) == [1.0] * 5


def test_diagonal():
    assert sym_eigenvalues(np.diag([2.0, -1.0, 0.0])) == [-1.0, 0.0, 2.0]


def test_second_kind_matrix_of_cylinder():
    vals = sym_eigenvalues(second_kind_matrix(curvature_from_first_kind_eigs(0, 0, 1)))
    np.testing.assert_allclose(vals, [-1 / 3, 0, 0, 1, 1], atol=1e-12)


def test_non_finite_rejected():
    with pytest.raises(InvalidInput):
        sym_eigenvalues([[1.0, np.nan], [np.nan, 1.0]])


def test_non_square_rejected():
    with pytest.raises(InvalidInput):
        sym_eigenvalues(np.ones((2, 3)))


def test_sweep_budget_exhaustion(monkeypatch):
    monkeypatch.setattr(numerics, "MAX_SWEEPS", 0)
    with pytest.raises(NoConvergence):
        sym_eigenvalues([[1.0, 1.0], [1.0, 2.0]])


def test_batch_matches_single(rng):
    stack = rng.normal(size=(20, 6, 6))
    stack = stack + stack.transpose(0, 2, 1)
    batch = sym_eigenvalues_batch(stack)
    for m, vals in zip(stack, batch):
        np.testing.assert_allclose(vals, sym_eigenvalues(m), atol=1e-12)


@given(arrays(np.float64, (6, 6), elements=finite))
def test_jacobi_agrees_with_lapack(m):
    m = m + m.T
    np.testing.assert_allclose(sym_eigenvalues(m), np.linalg.eigvalsh(m), atol=1e-9 * max(1.0, np.abs(m).max()))


@given(arrays(np.float64, (5, 5), elements=finite), st.integers(0, 2**31))
def test_trace_and_rotation_invariance(m, seed):
    m = m + m.T
    vals = sym_eigenvalues(m)
    scale = max(1.0, np.abs(m).max())
    assert math.isclose(sum(vals), np.trace(m), abs_tol=1e-9 * scale)
    q, _ = np.linalg.qr(np.random.default_rng(seed).normal(size=(5, 5)))
    np.testing.assert_allclose(sym_eigenvalues(q @ m @ q.T), vals, atol=1e-9 * scale)


def test_root_of_identity():
    assert abs(bracketed_root(lambda x: x, Bracket(-1.0, 1.0), 1e-14)) <= 1e-14


def test_root_of_secular_quadratic():
    # (1 - l) + 2 (1 + l) = 3 (1 - l^2)  <=>  3 l^2 + l = 0, roots 0 and -1/3
    oracle = sorted(np.roots([3.0, 1.0, 0.0]))
    f = spectra.secular_function(spectra.SchoutenSpectrum.from_pairs([(-0.5, 1), (0.5, 2)]))
    root = bracketed_root(f, Bracket(-1 + 1e-9, -0.1), 1e-14)
    assert math.isclose(root, oracle[0], abs_tol=1e-12)


def test_secular_roots_of_123_are_lambda_pm():
    oracle = (2 - 2 * math.sqrt(3) / 3, 2 + 2 * math.sqrt(3) / 3)
    s = spectra.SchoutenSpectrum.from_diagonal(spectra.FirstKindEigs3(1, 2, 3).schouten())
    f = spectra.secular_function(s)
    poles = [2 * m for m in s.mu]
    roots = [bracketed_root(f, Bracket(lo + 1e-9, hi - 1e-9), 1e-14) for lo, hi in zip(poles, poles[1:])]
    np.testing.assert_allclose(roots, oracle, atol=1e-12)


def test_bad_bracket():
    with pytest.raises(BadBracket):
        bracketed_root(lambda x: x * x + 1, Bracket(-1.0, 1.0), 1e-12)


@pytest.mark.parametrize("tol", [0.0, -1e-3])
def test_bad_tolerance(tol):
    with pytest.raises(InvalidInput):
        bracketed_root(lambda x: x, Bracket(-1.0, 1.0), tol)


@given(st.floats(-5, 5), st.floats(0.1, 5), st.floats(0.1, 5))
def test_root_is_inside_bracket_and_zero(r, left, right):
    f = lambda x: (x - r) ** 3 + (x - r)
    root = bracketed_root(f, Bracket(r - left, r + right), 1e-13)
    assert r - left <= root <= r + right
    assert abs(root - r) <= 1e-12 * max(1.0, abs(r)) + 1e-13
