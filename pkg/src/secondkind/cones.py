"""alpha-nonnegativity of the curvature operator of the second kind in 3D.

Eigenvalues of the second kind are ``lam_minus <= a <= b <= c <= lam_plus``;
the weighted partial sum over the smallest ``alpha`` of them decides every
cone condition, and its piecewise closed form is :func:`f_alpha`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import InvalidInput
from .spectra import FirstKindEigs3, SecondKindSpectrum, lambda_pm, spectrum3d

BOUNDARY_TOL = 1e-12


class Mode(str, Enum):
    NONNEG = "nonneg"
    POSITIVE = "positive"
    NONPOS = "nonpos"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class AlphaCondition:
    alpha: float
    mode: Mode = Mode.NONNEG

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not math.isfinite(self.alpha) or self.alpha < 1:
            raise InvalidInput(f"alpha must be >= 1, got {self.alpha}")


@dataclass(frozen=True)
class ConeReport:
    alpha: float
    alpha_value: float
    f_alpha: Optional[float]
    holds: bool
    sec_nonneg: bool
    ric_nonneg: bool
    scal_nonneg: bool
    pinching_ratio: Optional[float]
    closed_form_10_3: bool
    closed_form_4: bool
    closed_forms_agree: bool


def _values(spectrum) -> list[float]:
    if isinstance(spectrum, SecondKindSpectrum):
        return spectrum.values()
    return sorted(float(v) for v in spectrum)


def alpha_partial_sum(spectrum, alpha: float) -> float:
    """``lam_1 + ... + lam_floor(alpha) + (alpha - floor(alpha)) lam_{floor(alpha)+1}``."""
    vals = _values(spectrum)
    n = len(vals)
    alpha = float(alpha)
    if not 1 <= alpha <= n:
        raise InvalidInput(f"alpha must lie in [1, {n}], got {alpha}")
    whole = math.floor(alpha)
    total = sum(vals[:whole])
    if whole < n:
        total += (alpha - whole) * vals[whole]
    return total


def snap(value: float, scale: float) -> float:
    """Zero out ``value`` when it is within rounding of zero relative to ``scale``."""
    return 0.0 if abs(value) <= BOUNDARY_TOL * abs(scale) else value


def condition_holds(spectrum, cond: AlphaCondition, tol: float = 0.0) -> bool:
    """Decide an alpha-condition.

    The partial sum is first snapped to zero when it is rounding noise.
    Non-strict modes then accept values down to ``-tol``; strict modes need a
    positive value.
    """
    vals = _values(spectrum)
    if cond.mode in (Mode.NONPOS, Mode.NEGATIVE):
        vals = sorted(-v for v in vals)
    value = snap(alpha_partial_sum(vals, cond.alpha), max(map(abs, vals)))
    if cond.mode in (Mode.NONNEG, Mode.NONPOS):
        return value >= -tol
    return value > 0


def f_alpha(e, alpha: float) -> float:
    a, b, c = FirstKindEigs3.of(e)
    alpha = float(alpha)
    if not 1 <= alpha <= 5:
        raise InvalidInput(f"alpha must lie in [1, 5], got {alpha}")
    lm, lp = lambda_pm((a, b, c))
    if alpha < 2:
        return lm + (alpha - 1) * a
    if alpha < 3:
        return lm + a + (alpha - 2) * b
    if alpha < 4:
        return lm + a + b + (alpha - 3) * c
    # the [4, 5) branch, continued to alpha = 5
    return lm + a + b + c + (alpha - 4) * lp


def h_alpha(e, alpha: float) -> float:
    """Weighted partial sum for the operator of the first kind, alpha in [1, 3]."""
    a, b, c = FirstKindEigs3.of(e)
    alpha = float(alpha)
    if not 1 <= alpha <= 3:
        raise InvalidInput(f"alpha must lie in [1, 3], got {alpha}")
    if alpha < 2:
        return a + (alpha - 1) * b
    return a + b + (alpha - 2) * c


def f_alpha_array(abc, alpha: float) -> np.ndarray:
    """:func:`f_alpha` over an ``(M, 3)`` array of sorted triples."""
    abc = np.asarray(abc, dtype=float)
    alpha = float(alpha)
    if not 1 <= alpha <= 5:
        raise InvalidInput(f"alpha must lie in [1, 5], got {alpha}")
    a, b, c = abc[:, 0], abc[:, 1], abc[:, 2]
    total = a + b + c
    spread = math.sqrt(2.0) / 3.0 * np.sqrt((a - b) ** 2 + (b - c) ** 2 + (a - c) ** 2)
    lm, lp = total / 3.0 - spread, total / 3.0 + spread
    if alpha < 2:
        return lm + (alpha - 1) * a
    if alpha < 3:
        return lm + a + (alpha - 2) * b
    if alpha < 4:
        return lm + a + b + (alpha - 3) * c
    return lm + a + b + c + (alpha - 4) * lp


def h_alpha_array(abc, alpha: float) -> np.ndarray:
    abc = np.asarray(abc, dtype=float)
    alpha = float(alpha)
    if not 1 <= alpha <= 3:
        raise InvalidInput(f"alpha must lie in [1, 3], got {alpha}")
    a, b, c = abc[:, 0], abc[:, 1], abc[:, 2]
    if alpha < 2:
        return a + (alpha - 1) * b
    return a + b + (alpha - 2) * c


def closed_form_10_3(e) -> bool:
    """Sign test equivalent to ``f_{10/3} >= 0`` without square roots."""
    a, b, c = FirstKindEigs3.of(e)
    return 2 * a + 2 * b + c >= 0 and 12 * a * a + 12 * b * b + 36 * a * b + 20 * a * c + 20 * b * c >= 0


def closed_form_4(e) -> bool:
    """Sign test equivalent to ``f_4 >= 0``."""
    a, b, c = FirstKindEigs3.of(e)
    return a + b + c >= 0 and (a + b) ** 2 + (c * c + a * b) + 3 * (a + b) * c >= 0


def _agrees(verdict: bool, value: float, scale: float) -> bool:
    return verdict == (value >= 0) or abs(value) <= BOUNDARY_TOL * scale


def condition_report(e, alpha: float, mode: Mode | str = Mode.NONNEG, tol: float = 0.0) -> ConeReport:
    e = FirstKindEigs3.of(e)
    a, b, c = e
    cond = AlphaCondition(alpha, Mode(mode))
    spectrum = spectrum3d(e)
    value = alpha_partial_sum(spectrum, alpha)
    f_val = f_alpha(e, alpha) if alpha <= 5 else None
    s = e.scalar
    scale = max(1.0, abs(a), abs(c))
    cf_10_3, cf_4 = closed_form_10_3(e), closed_form_4(e)
    agree = _agrees(cf_10_3, f_alpha(e, 10 / 3), scale) and _agrees(cf_4, f_alpha(e, 4), scale)
    return ConeReport(
        alpha=float(alpha),
        alpha_value=value,
        f_alpha=f_val,
        holds=condition_holds(spectrum, cond, tol),
        sec_nonneg=a >= 0,
        ric_nonneg=a + b >= 0,
        scal_nonneg=a + b + c >= 0,
        pinching_ratio=(a + b) / s if s > 0 else None,
        closed_form_10_3=cf_10_3,
        closed_form_4=cf_4,
        closed_forms_agree=agree,
    )


def pinching_bound(delta: float) -> float:
    """``(1 - 3 delta) / (3 (2 - delta))``, the Ricci-pinching constant as usually quoted.

    This constant is twice too large: ``(a, b, c) = (0.1, 0.1, 1)`` is
    3-nonnegative yet has ``Ric_min / S = 1/12 < 1/6``.  See
    :func:`pinching_bound_attained` for the bound that actually holds.
    """
    delta = float(delta)
    if not 0 <= delta <= 1 / 3 + 1e-15:
        raise InvalidInput(f"delta must lie in [0, 1/3], got {delta}")
    return (1 - 3 * delta) / (3 * (2 - delta))


def pinching_bound_attained(delta: float) -> float:
    """``(1 - 3 delta) / (6 (2 - delta))``: lower bound on ``Ric_min / S`` under (3+delta)-nonnegativity.

    Follows from summing the diagonal entries on phi_2, phi_3, phi_5 plus
    delta times phi_1, which gives ``(2 - delta) Ric_33 >= (1/3 - delta) S / 2``.
    Equality holds at ``a = b = 1/10, c = 1`` for ``delta = 0``.
    """
    return pinching_bound(delta) / 2


def min_ricci(e) -> float:
    a, b, _ = FirstKindEigs3.of(e)
    return a + b


@dataclass(frozen=True)
class SharpnessExample:
    name: str
    eps: float
    abc: tuple[float, float, float]
    lambda_pm: tuple[float, float]
    lambda_pm_closed: tuple[float, float]
    condition: str
    condition_value: float
    condition_holds: bool
    converse: str
    converse_value: float
    converse_violated: bool


def sharpness_examples(eps: float) -> list[SharpnessExample]:
    """The four 3D witnesses showing each implication in the chain is sharp.

    Each entry carries the computed ``(lam_minus, lam_plus)`` next to its closed
    form, the value of the condition it satisfies (zero on the boundary) and the
    value of the converse it violates (negative).
    """
    eps = float(eps)
    if not 0 < eps < 1:
        raise InvalidInput("eps must lie in (0, 1)")
    out = []

    def add(name, abc, closed, cond, cond_val, conv, conv_val):
        e = FirstKindEigs3(*abc)
        out.append(
            SharpnessExample(
                name=name,
                eps=eps,
                abc=tuple(e),
                lambda_pm=lambda_pm(e),
                lambda_pm_closed=closed,
                condition=cond,
                condition_value=cond_val,
                condition_holds=cond_val >= -BOUNDARY_TOL,
                converse=conv,
                converse_value=conv_val,
                converse_violated=conv_val < 0,
            )
        )

    e1 = (-eps, 1.0, 1.0)
    add("1", e1, (-eps, (4 + eps) / 3), f"(2+2eps)-nonneg, alpha={2 + 2 * eps:.6g}",
        f_alpha(e1, 2 + 2 * eps), "sec >= 0 (a)", e1[0])

    e2 = (0.0, 0.0, 1.0)
    add("2", e2, (-1 / 3, 1.0), "sec >= 0 (a)", e2[0],
        f"(10/3-eps)-nonneg, alpha={10 / 3 - eps:.6g}", f_alpha(e2, 10 / 3 - eps))

    e3 = (-eps, 0.0, 1 + eps)
    root = math.sqrt(1 + 3 * eps * eps + 3 * eps)
    delta = 2 / 3 * (root - (1 - eps)) / (1 + eps)
    add("3", e3, (1 / 3 - 2 / 3 * root, 1 / 3 + 2 / 3 * root),
        f"(10/3+delta)-nonneg, alpha={10 / 3 + delta:.6g}", f_alpha(e3, 10 / 3 + delta),
        "Ric >= 0 (a+b)", e3[0] + e3[1])

    e4 = (-1.0, 1.0, 1.0)
    add("4", e4, (-1.0, 5 / 3), "Ric >= 0 (a+b)", e4[0] + e4[1],
        f"(4-eps)-nonneg, alpha={4 - eps:.6g}", f_alpha(e4, 4 - eps))
    return out


def implication_chain(e) -> dict[str, bool]:
    """Truth value of each implication in the 3D chain for one sample.

    Every entry should be ``True``; a ``False`` is a counterexample.
    """
    e = FirstKindEigs3.of(e)
    a, b, c = e
    scale = max(abs(a), abs(c))
    f = {alpha: snap(f_alpha(e, alpha), scale) for alpha in (2, 10 / 3, 4, 5)}
    two, ten_thirds, four, five = (f[k] >= 0 for k in (2, 10 / 3, 4, 5))
    two_pos, ten_thirds_pos, four_pos, five_pos = (f[k] > 0 for k in (2, 10 / 3, 4, 5))
    return {
        "2-nonneg => sec>=0": (not two) or a >= 0,
        "sec>=0 => 10/3-nonneg": (not a >= 0) or ten_thirds,
        "10/3-nonneg => Ric>=0": (not ten_thirds) or a + b >= 0,
        "Ric>=0 => 4-nonneg": (not a + b >= 0) or four,
        "5-nonneg <=> S>=0": five == (a + b + c >= 0),
        "2-pos => sec>0": (not two_pos) or a > 0,
        "sec>0 => 10/3-pos": (not a > 0) or ten_thirds_pos,
        "10/3-pos => Ric>0": (not ten_thirds_pos) or a + b > 0,
        "Ric>0 => 4-pos": (not a + b > 0) or four_pos,
        "5-pos <=> S>0": five_pos == (a + b + c > 0),
    }
