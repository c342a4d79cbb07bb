"""Brute-force spectra: build the tensor, materialise the matrix, diagonalise.

Nothing here calls the closed forms in :mod:`secondkind.spectra`; only the
result container type is shared so that the two paths can be compared.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, ShapeMismatch
from .numerics import sym_eigenvalues, sym_eigenvalues_batch
from .spectra import SecondKindSpectrum
from .tensor_core import (
    MAX_DIM,
    apply_r_bar,
    curvature_from_first_kind_eigs,
    kn_product_array,
    kulkarni_nomizu,
    project_traceless,
    second_kind_matrices,
    second_kind_matrix,
)


@dataclass(frozen=True)
class SpectrumComparison:
    analytic: SecondKindSpectrum
    numeric: tuple[float, ...]
    max_abs_gap: float
    passed: bool


def numeric_spectrum_3d(e) -> list[float]:
    a, b, c = e
    return sym_eigenvalues(second_kind_matrix(curvature_from_first_kind_eigs(a, b, c)))


def _schouten_diagonals_3d(triples: np.ndarray) -> np.ndarray:
    a, b, c = triples[:, 0], triples[:, 1], triples[:, 2]
    return np.stack([a + b - c, a + c - b, b + c - a], axis=1) / 2.0


def numeric_spectra_3d(triples) -> np.ndarray:
    """Batched :func:`numeric_spectrum_3d` over a ``(B, 3)`` array of sorted triples."""
    t = np.asarray(triples, dtype=float)
    if t.ndim != 2 or t.shape[1] != 3:
        raise InvalidInput("expected a (B, 3) array")
    if np.any(np.diff(t, axis=1) < 0):
        raise InvalidInput("every triple must be sorted ascending")
    return numeric_spectra_general(_schouten_diagonals_3d(t))


def numeric_spectrum_general(a_diag, n: int) -> list[float]:
    a_diag = [float(v) for v in a_diag]
    if not 2 <= n <= MAX_DIM or len(a_diag) != n:
        raise InvalidInput(f"need 2 <= n <= {MAX_DIM} and len(A_diag) == n")
    r = kulkarni_nomizu(np.diag(a_diag), np.eye(n))
    return sym_eigenvalues(second_kind_matrix(r))


def numeric_spectra_general(a_diags) -> np.ndarray:
    """Batched :func:`numeric_spectrum_general` over a ``(B, n)`` array of diagonals."""
    d = np.asarray(a_diags, dtype=float)
    if d.ndim != 2 or not 2 <= d.shape[1] <= MAX_DIM:
        raise InvalidInput(f"expected a (B, n) array with 2 <= n <= {MAX_DIM}")
    n = d.shape[1]
    a = d[:, :, None] * np.eye(n)
    g = np.broadcast_to(np.eye(n), a.shape)
    return sym_eigenvalues_batch(second_kind_matrices(kn_product_array(a, g)))


def numeric_spectrum_of_matrix(a) -> list[float]:
    """Spectrum for a general (non-diagonal) symmetric ``A``; used for rotation invariance."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    return sym_eigenvalues(second_kind_matrix(kulkarni_nomizu(a, np.eye(n))))


def compare(analytic: SecondKindSpectrum, numeric, tol: float = 1e-8) -> SpectrumComparison:
    expanded = np.asarray(analytic.values(), dtype=float)
    numeric = np.sort(np.asarray(numeric, dtype=float))
    if expanded.shape != numeric.shape:
        raise ShapeMismatch(f"analytic has {expanded.size} eigenvalues, numeric has {numeric.size}")
    gap = float(np.abs(expanded - numeric).max()) if expanded.size else 0.0
    return SpectrumComparison(analytic, tuple(numeric.tolist()), gap, gap < tol)


def _sym_product(n: int, p: int, q: int) -> np.ndarray:
    out = np.zeros((n, n))
    out[p, q] += 1.0
    out[q, p] += 1.0
    return out


def pair_eigentensor_residual(a_diag, p: int, q: int) -> float:
    """``|R_bar(e_p (.) e_q) - (A_p + A_q) e_p (.) e_q|`` for ``R = diag(A) o g``, p != q."""
    a_diag = np.asarray(a_diag, dtype=float)
    n = a_diag.size
    r = kulkarni_nomizu(np.diag(a_diag), np.eye(n))
    phi = _sym_product(n, p, q)
    return float(np.abs(apply_r_bar(r, phi) - (a_diag[p] + a_diag[q]) * phi).max())


def diagonal_eigentensor_residual(mu, mult, lam: float) -> float:
    """Residual of ``sum c_p e_p (.) e_p`` with ``c_p = 1 / (2 mu_block(p) - lam)``.

    Measures ``|pi(R_bar(phi)) - lam * phi| / |phi|``.  When ``lam == 0`` the
    coefficients fall back to ``1 / (2 mu)``, which is the same expression.
    """
    diag = np.repeat(np.asarray(mu, dtype=float), np.asarray(mult, dtype=int))
    n = diag.size
    r = kulkarni_nomizu(np.diag(diag), np.eye(n))
    coeffs = 1.0 / (2.0 * diag - lam)
    phi = 2.0 * np.diag(coeffs)
    out = project_traceless(apply_r_bar(r, phi))
    return float(np.linalg.norm(out - lam * phi) / np.linalg.norm(phi))
