"""Small dense symmetric eigensolver and a bracketed bisection root finder.

The eigensolver is a cyclic Jacobi method that operates on a stack of
matrices at once, so the oracle can diagonalise thousands of small
matrices without a Python-level loop per matrix.
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import BadBracket, InvalidInput, NoConvergence

DEFAULT_TOL = 1e-12
MAX_SWEEPS = 64
MAX_BISECTIONS = 200


class Bracket(NamedTuple):
    lo: float
    hi: float


def as_sym_matrix(m) -> np.ndarray:
    """Return a float copy of ``m`` made exactly symmetric by averaging with its transpose."""
    arr = np.array(m, dtype=float)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2] or arr.shape[-1] == 0:
        raise InvalidInput(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix has non-finite entries")
    return 0.5 * (arr + np.swapaxes(arr, -1, -2))


def _off_norm(a: np.ndarray) -> np.ndarray:
    off = a * (1.0 - np.eye(a.shape[-1]))
    return np.sqrt(np.sum(off * off, axis=(-2, -1)))


def sym_eigenvalues_batch(stack, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues of every matrix in a ``(B, N, N)`` stack, each row sorted ascending.

    Cyclic Jacobi: each sweep visits every (p, q) pair once and zeroes it with
    a plane rotation.  All matrices in the stack receive the same pair order
    but their own rotation angle.  Iteration stops once every matrix satisfies
    ``off(A) <= tol * ||A||_F``.
    """
    if not tol > 0:
        raise InvalidInput("tol must be positive")
    a = as_sym_matrix(stack)
    if a.ndim != 3:
        raise InvalidInput("expected a (B, N, N) stack")
    n = a.shape[-1]
    target = tol * np.sqrt(np.sum(a * a, axis=(-2, -1)))

    for _ in range(MAX_SWEEPS + 1):
        if np.all(_off_norm(a) <= target):
            return np.sort(np.diagonal(a, axis1=-2, axis2=-1), axis=-1)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                active = apq != 0.0
                if not active.any():
                    continue
                safe = np.where(active, apq, 1.0)
                with np.errstate(over="ignore"):
                    # a tiny apq overflows theta to inf, which correctly gives t = 0
                    theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                    t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cc, ss = c[:, None], s[:, None]

                col_p = a[:, :, p].copy()
                col_q = a[:, :, q]
                a[:, :, p] = cc * col_p - ss * col_q
                a[:, :, q] = ss * col_p + cc * col_q
                row_p = a[:, p, :].copy()
                row_q = a[:, q, :]
                a[:, p, :] = cc * row_p - ss * row_q
                a[:, q, :] = ss * row_p + cc * row_q
                a[:, p, q] = np.where(active, 0.0, a[:, p, q])
                a[:, q, p] = a[:, p, q]
    raise NoConvergence(f"Jacobi did not converge within {MAX_SWEEPS} sweeps")


def sym_eigenvalues(m, tol: float = DEFAULT_TOL) -> list[float]:
    """Sorted eigenvalues of a single symmetric matrix."""
    arr = as_sym_matrix(m)
    if arr.ndim != 2:
        raise InvalidInput("expected a single matrix")
    return sym_eigenvalues_batch(arr[None], tol)[0].tolist()


def bracketed_root(f: Callable[[float], float], bracket, tol: float) -> float:
    """Bisection for a sign change of ``f`` inside ``bracket``.

    ``f`` is only evaluated strictly inside or on the bracket endpoints, so
    callers can place the endpoints just inside a pole.  The returned point
    lies strictly between ``lo`` and ``hi``.
    """
    if not tol > 0:
        raise InvalidInput("tol must be positive")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise InvalidInput(f"bracket must satisfy lo < hi, got ({lo}, {hi})")
    f_lo, f_hi = f(lo), f(hi)
    if math.isnan(f_lo) or math.isnan(f_hi):
        raise BadBracket("function is NaN at a bracket endpoint")
    if f_lo * f_hi > 0:
        raise BadBracket(f"no sign change on ({lo}, {hi}): f={f_lo:g}, {f_hi:g}")
    lo_sign = math.copysign(1.0, f_lo) if f_lo != 0 else 0.0

    mid = 0.5 * (lo + hi)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol or not lo < mid < hi:
            break
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        if math.copysign(1.0, f_mid) == lo_sign:
            lo = mid
        else:
            hi = mid
    return mid
