"""Algebraic curvature tensors and their two curvature operators as matrices.

Conventions
-----------
* Symmetric two-tensors carry the inner product ``<A, B> = tr(A^T B)``;
  two-forms carry ``<A, B> = tr(A^T B) / 2``.
* ``u (.) v = u (x) v + v (x) u`` and ``u ^ v = u (x) v - v (x) u``.
* ``K(i, j) = R[i, j, i, j]`` is the sectional curvature, so the unit
  sphere is ``kulkarni_nomizu(g, g) / 2``.
* The operator of the second kind is ``R_bar(phi)_ij = sum R[i, k, l, j] phi[k, l]``
  restricted to traceless tensors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidInput

MAX_DIM = 8
SYMMETRY_TOL = 1e-12


def traceless_dim(n: int) -> int:
    """Dimension ``(n - 1)(n + 2) / 2`` of the traceless symmetric two-tensors."""
    return (n - 1) * (n + 2) // 2


def _check_dim(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or not 2 <= n <= MAX_DIM:
        raise InvalidInput(f"dimension must be an integer in [2, {MAX_DIM}], got {n!r}")
    return int(n)


def metric(n: int) -> np.ndarray:
    return np.eye(_check_dim(n))


def sym2(entries) -> np.ndarray:
    """Validate and return a symmetric two-tensor as a float array."""
    arr = np.array(entries, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {arr.shape}")
    _check_dim(arr.shape[0])
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("non-finite entries")
    if not np.allclose(arr, arr.T, rtol=0.0, atol=SYMMETRY_TOL * max(1.0, np.abs(arr).max())):
        raise InvalidInput("two-tensor is not symmetric")
    return 0.5 * (arr + arr.T)


def symmetry_defects(r: np.ndarray) -> dict[str, float]:
    """Largest violation of each curvature-tensor symmetry."""
    return {
        "antisym_12": float(np.abs(r + np.einsum("jikl->ijkl", r)).max()),
        "antisym_34": float(np.abs(r + np.einsum("ijlk->ijkl", r)).max()),
        "pair_swap": float(np.abs(r - np.einsum("klij->ijkl", r)).max()),
        "bianchi": float(
            np.abs(r + np.einsum("jkil->ijkl", r) + np.einsum("kijl->ijkl", r)).max()
        ),
    }


@dataclass(frozen=True)
class CurvTensor:
    """Dense ``R[i, j, k, l]`` with the symmetries of an algebraic curvature tensor.

    The symmetry check is absolute at 1e-12, scaled up by the largest entry when
    that exceeds one.
    """

    r: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.r, dtype=float)
        if arr.ndim != 4 or len(set(arr.shape)) != 1:
            raise InvalidInput(f"expected an (n, n, n, n) array, got shape {arr.shape}")
        _check_dim(arr.shape[0])
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("non-finite entries")
        slack = SYMMETRY_TOL * max(1.0, float(np.abs(arr).max()))
        bad = {k: v for k, v in symmetry_defects(arr).items() if v > slack}
        if bad:
            raise InvalidInput(f"not an algebraic curvature tensor: {bad}")
        arr.setflags(write=False)
        object.__setattr__(self, "r", arr)

    @property
    def dim(self) -> int:
        return self.r.shape[0]


@dataclass(frozen=True)
class CurvatureInvariants:
    ricci: np.ndarray
    scalar: float
    sectional: dict[tuple[int, int], float]


def kn_product_array(a, b) -> np.ndarray:
    """Raw Kulkarni-Nomizu product on (stacks of) arrays; no validation.

    ``(A o B)_ijkl = A_ik B_jl + A_jl B_ik - A_jk B_il - A_il B_jk``
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (
        np.einsum("...ik,...jl->...ijkl", a, b)
        + np.einsum("...jl,...ik->...ijkl", a, b)
        - np.einsum("...jk,...il->...ijkl", a, b)
        - np.einsum("...il,...jk->...ijkl", a, b)
    )


def kulkarni_nomizu(a, b) -> CurvTensor:
    a, b = sym2(a), sym2(b)
    if a.shape != b.shape:
        raise InvalidInput(f"dimension mismatch: {a.shape} vs {b.shape}")
    return CurvTensor(kn_product_array(a, b))


def curvature_from_first_kind_eigs(a: float, b: float, c: float) -> CurvTensor:
    """3D curvature tensor whose operator of the first kind has eigenvalues a <= b <= c.

    Built as ``P o g`` with the Schouten tensor ``P = diag(a+b-c, a+c-b, b+c-a) / 2``.
    """
    a, b, c = float(a), float(b), float(c)
    if not a <= b <= c:
        raise InvalidInput(f"first-kind eigenvalues must be sorted, got ({a}, {b}, {c})")
    schouten = np.diag([a + b - c, a + c - b, b + c - a]) / 2.0
    return kulkarni_nomizu(schouten, np.eye(3))


@lru_cache(maxsize=None)
def _two_form_basis(n: int) -> np.ndarray:
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            w = np.zeros((n, n))
            w[i, j], w[j, i] = 1.0, -1.0
            basis.append(w)
    out = np.array(basis).reshape(-1, n, n)
    out.setflags(write=False)
    return out


def two_form_basis(n: int) -> np.ndarray:
    """``e_i ^ e_j`` for ``i < j`` in lexicographic order, shape ``(n(n-1)/2, n, n)``."""
    return _two_form_basis(_check_dim(n))


@lru_cache(maxsize=None)
def _traceless_basis(n: int) -> np.ndarray:
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            phi = np.zeros((n, n))
            phi[i, j] = phi[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(phi)
    for m in range(1, n):
        d = np.zeros(n)
        d[:m] = 1.0
        d[m] = -float(m)
        basis.append(np.diag(d / np.linalg.norm(d)))
    out = np.array(basis)
    out.setflags(write=False)
    return out


def traceless_basis(n: int) -> np.ndarray:
    """Orthonormal basis of traceless symmetric two-tensors, shape ``(N, n, n)``.

    Off-diagonal elements ``(e_i (.) e_j) / sqrt(2)`` come first in lexicographic
    order, then the diagonal elements proportional to
    ``sum_{p<=m} e_p (.) e_p - m e_{m+1} (.) e_{m+1}`` for ``m = 1 .. n-1``.
    For ``n = 3`` this is phi_1 .. phi_5 in the usual order.
    """
    return _traceless_basis(_check_dim(n))


def _tensor(r) -> np.ndarray:
    return r.r if isinstance(r, CurvTensor) else CurvTensor(r).r


def first_kind_matrix(r) -> np.ndarray:
    """Matrix of ``w -> (1/2) sum R_ijkl w_kl`` in the basis ``e_i ^ e_j``; entries ``R_pqrs``."""
    t = _tensor(r)
    w = two_form_basis(t.shape[0])
    m = 0.25 * np.einsum("aij,ijkl,bkl->ab", w, t, w, optimize=True)
    return 0.5 * (m + m.T)


def second_kind_matrix(r) -> np.ndarray:
    """Matrix ``M_ab = <phi_a, R_bar(phi_b)>`` in :func:`traceless_basis`."""
    t = _tensor(r)
    phi = traceless_basis(t.shape[0])
    m = np.einsum("aij,iklj,bkl->ab", phi, t, phi, optimize=True)
    return 0.5 * (m + m.T)


def second_kind_matrices(r_stack) -> np.ndarray:
    """Batched :func:`second_kind_matrix` for a ``(B, n, n, n, n)`` array of tensors."""
    t = np.asarray(r_stack, dtype=float)
    phi = traceless_basis(t.shape[-1])
    m = np.einsum("xij,biklj,ykl->bxy", phi, t, phi, optimize=True)
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def invariants_of(r) -> CurvatureInvariants:
    t = _tensor(r)
    n = t.shape[0]
    ricci = np.einsum("ijil->jl", t)
    sectional = {(i, j): float(t[i, j, i, j]) for i in range(n) for j in range(i + 1, n)}
    return CurvatureInvariants(ricci=ricci, scalar=float(np.trace(ricci)), sectional=sectional)


def apply_r_bar(r, phi) -> np.ndarray:
    """``R_bar(phi)_ij = sum_kl R_iklj phi_kl`` (no trace projection)."""
    return np.einsum("iklj,kl->ij", _tensor(r), np.asarray(phi, dtype=float))


def project_traceless(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[0]
    return phi - np.trace(phi) / n * np.eye(n)
