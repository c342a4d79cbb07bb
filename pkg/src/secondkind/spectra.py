"""Closed-form and secular-equation spectra of the curvature operator of the second kind.

In three dimensions the spectrum is ``{lam_minus, a, b, c, lam_plus}`` where
``a <= b <= c`` are the eigenvalues of the operator of the first kind.  In
general dimension, for ``R = A o g`` with ``A`` having distinct eigenvalues
``mu_i`` of multiplicity ``n_i``, the spectrum splits into three families:

* ``mu_i + mu_j`` on ``e_p (.) e_q`` across blocks, multiplicity ``n_i n_j``;
* ``2 mu_i`` on the traceless part of block ``i``, multiplicity
  ``(n_i - 1)(n_i + 2) / 2``;
* the ``k - 1`` roots of the secular equation, one between each pair of
  consecutive poles ``2 mu_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInput
from .numerics import bracketed_root
from .tensor_core import traceless_dim

COALESCE_TOL = 1e-9

CROSS_PAIR = "cross-pair"
BLOCK_PAIR = "block-pair"
BLOCK_DIAGONAL = "block-diagonal"
SECULAR = "secular"
ZERO_SECULAR = "zero-secular"


@dataclass(frozen=True)
class FirstKindEigs3:
    a: float
    b: float
    c: float

    def __post_init__(self):
        vals = tuple(float(v) for v in (self.a, self.b, self.c))
        if not all(math.isfinite(v) for v in vals):
            raise InvalidInput(f"non-finite eigenvalues {vals}")
        if not vals[0] <= vals[1] <= vals[2]:
            raise InvalidInput(f"expected a <= b <= c, got {vals}")
        for name, v in zip("abc", vals):
            object.__setattr__(self, name, v)

    @classmethod
    def of(cls, e) -> "FirstKindEigs3":
        if isinstance(e, cls):
            return e
        a, b, c = e
        return cls(a, b, c)

    @classmethod
    def sorted(cls, values) -> "FirstKindEigs3":
        return cls(*sorted(float(v) for v in values))

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    @property
    def scalar(self) -> float:
        return 2.0 * (self.a + self.b + self.c)

    def schouten(self) -> tuple[float, float, float]:
        a, b, c = self
        return ((a + b - c) / 2, (a + c - b) / 2, (b + c - a) / 2)


@dataclass(frozen=True)
class SchoutenSpectrum:
    """Distinct eigenvalues ``mu`` (strictly increasing) with multiplicities ``mult``."""

    mu: tuple[float, ...]
    mult: tuple[int, ...]

    def __post_init__(self):
        mu = tuple(float(m) for m in self.mu)
        mult = tuple(int(k) for k in self.mult)
        if not mu or len(mu) != len(mult):
            raise InvalidInput("need at least one eigenvalue and one multiplicity per eigenvalue")
        if not all(math.isfinite(m) for m in mu):
            raise InvalidInput("non-finite eigenvalue")
        if any(k < 1 for k in mult):
            raise InvalidInput("multiplicities must be positive")
        if any(x >= y for x, y in zip(mu, mu[1:])):
            raise InvalidInput(f"eigenvalues must be strictly increasing, got {mu}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "mult", mult)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, int]]) -> "SchoutenSpectrum":
        pairs = sorted((float(m), int(k)) for m, k in pairs)
        return cls(tuple(m for m, _ in pairs), tuple(k for _, k in pairs))

    @classmethod
    def from_diagonal(cls, values: Sequence[float], tol: float = 0.0) -> "SchoutenSpectrum":
        """Group eigenvalues that agree within ``tol`` (exact equality by default)."""
        vals = sorted(float(v) for v in values)
        if not vals:
            raise InvalidInput("empty diagonal")
        mu, mult = [vals[0]], [1]
        for v in vals[1:]:
            if v - mu[-1] <= tol:
                mult[-1] += 1
            else:
                mu.append(v)
                mult.append(1)
        return cls(tuple(mu), tuple(mult))

    @property
    def dim(self) -> int:
        return sum(self.mult)

    @property
    def k(self) -> int:
        return len(self.mu)

    def diagonal(self) -> list[float]:
        return [m for m, k in zip(self.mu, self.mult) for _ in range(k)]


@dataclass(frozen=True)
class SpectrumEntry:
    value: float
    multiplicity: int
    provenance: tuple[str, ...]


@dataclass(frozen=True)
class SecondKindSpectrum:
    entries: tuple[SpectrumEntry, ...]

    @property
    def size(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def values(self) -> list[float]:
        """All eigenvalues, ascending, repeated by multiplicity."""
        return [e.value for e in self.entries for _ in range(e.multiplicity)]

    def __len__(self):
        return len(self.entries)


def _coalesce(raw: list[tuple[float, int, str]]) -> SecondKindSpectrum:
    raw = sorted(raw, key=lambda item: item[0])
    merged: list[list] = []
    for value, mult, prov in raw:
        if mult <= 0:
            continue
        if merged and abs(value - merged[-1][0]) <= COALESCE_TOL:
            merged[-1][1] += mult
            if prov not in merged[-1][2]:
                merged[-1][2].append(prov)
        else:
            merged.append([value, mult, [prov]])
    return SecondKindSpectrum(tuple(SpectrumEntry(v, m, tuple(p)) for v, m, p in merged))


def lambda_pm(e) -> tuple[float, float]:
    """The two extreme eigenvalues ``(lam_minus, lam_plus)`` in 3D."""
    a, b, c = FirstKindEigs3.of(e)
    s = a + b + c
    # equals 3(a^2 + b^2 + c^2) - s^2 but cannot go negative or leave residue when a = b = c
    radicand = (a - b) ** 2 + (b - c) ** 2 + (a - c) ** 2
    spread = math.sqrt(2.0) / 3.0 * math.sqrt(radicand)
    return s / 3.0 - spread, s / 3.0 + spread


def spectrum3d(e) -> SecondKindSpectrum:
    e = FirstKindEigs3.of(e)
    lm, lp = lambda_pm(e)
    return _coalesce(
        [(lm, 1, SECULAR), (e.a, 1, CROSS_PAIR), (e.b, 1, CROSS_PAIR), (e.c, 1, CROSS_PAIR), (lp, 1, SECULAR)]
    )


def secular_function(s: SchoutenSpectrum):
    """``f(lam) = sum n_i mu_i / (2 mu_i - lam) - n / 2``."""
    n = s.dim
    pairs = list(zip(s.mu, s.mult))

    def f(lam: float) -> float:
        return sum(k * m / (2.0 * m - lam) for m, k in pairs) - n / 2.0

    return f


def trace_condition(s: SchoutenSpectrum):
    """``g(lam) = sum n_i / (2 mu_i - lam)``; ``f(lam) = (lam / 2) g(lam)``.

    ``g`` is strictly increasing between consecutive poles, running from -inf to
    +inf, so it has exactly one root per gap.  These roots are the nonzero
    secular roots plus, when ``sum n_i / mu_i = 0``, the root ``lam = 0``.
    """
    pairs = list(zip(s.mu, s.mult))

    def g(lam: float) -> float:
        return sum(k / (2.0 * m - lam) for m, k in pairs)

    return g


def cleared_secular(s: SchoutenSpectrum, lam: float) -> float:
    """``g(lam) * prod(2 mu_i - lam)``: the trace condition with denominators cleared."""
    poles = [2.0 * m for m in s.mu]
    total = 0.0
    for i, k in enumerate(s.mult):
        prod = float(k)
        for j, p in enumerate(poles):
            if j != i:
                prod *= p - lam
        total += prod
    return total


def _is_zero_balanced(s: SchoutenSpectrum) -> bool:
    if any(m == 0.0 for m in s.mu):
        return False
    terms = [k / m for m, k in zip(s.mu, s.mult)]
    return abs(sum(terms)) <= 1e-12 * sum(abs(t) for t in terms)


def secular_roots(s: SchoutenSpectrum) -> list[tuple[float, int]]:
    """Roots of the secular equation that are eigenvalues, as ``(root, multiplicity)``.

    One root per gap between consecutive poles ``2 mu_i < 2 mu_{i+1}``.  When
    ``sum n_i / mu_i`` vanishes the gap containing zero contributes the root
    ``0.0`` exactly.
    """
    if not isinstance(s, SchoutenSpectrum):
        raise InvalidInput("expected a SchoutenSpectrum")
    if s.k == 0:
        raise InvalidInput("empty spectrum")
    g = trace_condition(s)
    zero_balanced = _is_zero_balanced(s)
    poles = [2.0 * m for m in s.mu]
    roots = []
    for left, right in zip(poles, poles[1:]):
        if zero_balanced and left < 0.0 < right:
            roots.append((0.0, 1))
            continue
        lo = left + 1e-12 * max(1.0, abs(left))
        hi = right - 1e-12 * max(1.0, abs(right))
        if not lo < hi:
            raise InvalidInput(f"poles {left} and {right} are too close to separate")
        tol = 4.0 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi))
        roots.append((bracketed_root(g, (lo, hi), tol), 1))
    return roots


def spectrum_general(s: SchoutenSpectrum) -> SecondKindSpectrum:
    """Spectrum of the operator of the second kind of ``A o g`` from the eigenvalues of ``A``."""
    raw: list[tuple[float, int, str]] = []
    for i, (mi, ni) in enumerate(zip(s.mu, s.mult)):
        for mj, nj in zip(s.mu[i + 1:], s.mult[i + 1:]):
            raw.append((mi + mj, ni * nj, CROSS_PAIR))
        raw.append((2.0 * mi, ni * (ni - 1) // 2, BLOCK_PAIR))
        raw.append((2.0 * mi, ni - 1, BLOCK_DIAGONAL))
    zero_balanced = _is_zero_balanced(s)
    for root, mult in secular_roots(s):
        raw.append((root, mult, ZERO_SECULAR if zero_balanced and root == 0.0 else SECULAR))
    spectrum = _coalesce(raw)
    assert spectrum.size == traceless_dim(s.dim), (spectrum.size, s)
    return spectrum
