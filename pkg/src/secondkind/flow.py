"""Hamilton's reaction ODE on the eigenvalues of the curvature operator.

In 3D the ODE ``dR/dt = R^2 + R^#`` diagonalises to

    a' = a^2 + b c,   b' = b^2 + a c,   c' = c^2 + a b

and the scale-invariant quantities in :class:`MonotoneQuantities` are
nondecreasing whenever ``S = 2 (a + b + c) > 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .cones import f_alpha, f_alpha_array, h_alpha, h_alpha_array
from .errors import EmptySample, IntegrationUnstable, InvalidInput, Undefined

ORDER_SLACK = 1e-10
ORDER_FAIL = 1e-6
MONOTONE_TOL = 1e-8
PRESERVATION_TOL = 1e-7

QUANTITY_NAMES = (
    "a_over_S",
    "ab_over_S",
    "neg_c_over_S",
    "lm_over_S",
    "neg_lp_over_S",
    "neg_ric2_over_S2",
)


@dataclass(frozen=True)
class FlowState:
    t: float
    a: float
    b: float
    c: float

    @property
    def abc(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class FlowConfig:
    h: float = 1e-3
    t_max: float = 10.0
    blowup_cap: float = 1e6
    sample_every: int = 1

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise InvalidInput(f"step h must be positive, got {self.h}")
        if not self.t_max >= 0:
            raise InvalidInput(f"t_max must be nonnegative, got {self.t_max}")
        if not self.blowup_cap > 0:
            raise InvalidInput(f"blowup_cap must be positive, got {self.blowup_cap}")
        if int(self.sample_every) < 1:
            raise InvalidInput("sample_every must be a positive integer")


@dataclass(frozen=True)
class MonotoneQuantities:
    a_over_S: float
    ab_over_S: float
    neg_c_over_S: float
    lm_over_S: float
    neg_lp_over_S: float
    neg_ric2_over_S2: float
    S: float
    ric2: float
    lm_over_S_identity: float
    lp_over_S_identity: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in QUANTITY_NAMES)


def ode_rhs(s) -> tuple[float, float, float]:
    a, b, c = s.abc if isinstance(s, FlowState) else s
    return (a * a + b * c, b * b + a * c, c * c + a * b)


def _quantity_columns(abc: np.ndarray) -> dict[str, np.ndarray]:
    """Vectorised quantities for an ``(M, 3)`` array; NaN where ``S <= 0``."""
    a, b, c = abc[:, 0], abc[:, 1], abc[:, 2]
    total = a + b + c
    S = 2.0 * total
    ric2 = 2.0 * (a * a + b * b + c * c + a * b + a * c + b * c)
    radicand = (a - b) ** 2 + (b - c) ** 2 + (a - c) ** 2
    spread = math.sqrt(2.0) / 3.0 * np.sqrt(radicand)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(S > 0, 1.0 / np.where(S > 0, S, 1.0), np.nan)
        cols = {
            "a_over_S": a * inv,
            "ab_over_S": (a + b) * inv,
            "neg_c_over_S": -c * inv,
            "lm_over_S": (total / 3.0 - spread) * inv,
            "neg_lp_over_S": -(total / 3.0 + spread) * inv,
            "neg_ric2_over_S2": -ric2 * inv * inv,
        }
    cols["S"] = S
    cols["ric2"] = ric2
    return cols


def monotone_quantities(s) -> MonotoneQuantities:
    a, b, c = s.abc if isinstance(s, FlowState) else s
    S = 2.0 * (a + b + c)
    if not S > 0:
        raise Undefined(f"scalar curvature must be positive, got S={S}")
    cols = _quantity_columns(np.array([[a, b, c]], dtype=float))
    ric2 = float(cols["ric2"][0])
    root = math.sqrt(max(3.0 * ric2 / (S * S) - 1.0, 0.0))
    return MonotoneQuantities(
        **{name: float(cols[name][0]) for name in QUANTITY_NAMES},
        S=S,
        ric2=ric2,
        lm_over_S_identity=1 / 6 - math.sqrt(2.0) / 3.0 * root,
        lp_over_S_identity=1 / 6 + math.sqrt(2.0) / 3.0 * root,
    )


@dataclass
class FlowTrace:
    """Sampled trajectory: times ``t`` (M,) and states ``abc`` (M, 3)."""

    t: np.ndarray
    abc: np.ndarray
    halt_reason: Literal["t_max", "blowup"]
    _cols: Optional[dict] = field(default=None, repr=False)

    def columns(self) -> dict[str, np.ndarray]:
        if self._cols is None:
            self._cols = _quantity_columns(self.abc)
        return self._cols

    @property
    def S(self) -> np.ndarray:
        return self.columns()["S"]

    @property
    def samples(self) -> list[tuple[FlowState, Optional[MonotoneQuantities]]]:
        out = []
        for t, (a, b, c) in zip(self.t.tolist(), self.abc.tolist()):
            state = FlowState(t, a, b, c)
            out.append((state, monotone_quantities(state) if a + b + c > 0 else None))
        return out

    def quantity_matrix(self) -> np.ndarray:
        """``(M, 6)`` array of the monotone quantities (NaN where S <= 0)."""
        cols = self.columns()
        return np.stack([cols[name] for name in QUANTITY_NAMES], axis=1)

    def worst_decrease(self, series: np.ndarray) -> float:
        """Most negative step-to-step change of ``series`` over rows where it is defined."""
        series = np.asarray(series, dtype=float)
        if series.ndim == 1:
            series = series[:, None]
        ok = np.all(np.isfinite(series), axis=1)
        steps = np.diff(series, axis=0)[ok[:-1] & ok[1:]]
        return float(min(0.0, steps.min())) if steps.size else 0.0

    def functional_over_S(self, alpha: float, kind: Literal["f", "h"] = "f") -> np.ndarray:
        """``f_alpha / S`` (or ``h_alpha / S``) per sample; NaN where ``S <= 0``."""
        values = (f_alpha_array if kind == "f" else h_alpha_array)(self.abc, alpha)
        S = self.S
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(S > 0, values / np.where(S > 0, S, 1.0), np.nan)


def _rk4(a: float, b: float, c: float, h: float) -> tuple[float, float, float]:
    k1a, k1b, k1c = a * a + b * c, b * b + a * c, c * c + a * b
    x, y, z = a + 0.5 * h * k1a, b + 0.5 * h * k1b, c + 0.5 * h * k1c
    k2a, k2b, k2c = x * x + y * z, y * y + x * z, z * z + x * y
    x, y, z = a + 0.5 * h * k2a, b + 0.5 * h * k2b, c + 0.5 * h * k2c
    k3a, k3b, k3c = x * x + y * z, y * y + x * z, z * z + x * y
    x, y, z = a + h * k3a, b + h * k3b, c + h * k3c
    k4a, k4b, k4c = x * x + y * z, y * y + x * z, z * z + x * y
    w = h / 6.0
    return (
        a + w * (k1a + 2 * k2a + 2 * k3a + k4a),
        b + w * (k1b + 2 * k2b + 2 * k3b + k4b),
        c + w * (k1c + 2 * k2c + 2 * k3c + k4c),
    )


def integrate(s0, cfg: FlowConfig = FlowConfig()) -> FlowTrace:
    """Fixed-step classical RK4 from ``s0`` until ``t_max`` or blowup.

    A step whose result leaves ``[-blowup_cap, blowup_cap]`` (or is not finite)
    halts the run and is discarded; the trace ends at the last state inside
    the cap.  The final state is always sampled.
    """
    if isinstance(s0, FlowState):
        t0, a, b, c = s0.t, s0.a, s0.b, s0.c
    else:
        t0 = 0.0
        a, b, c = (float(v) for v in s0)
    if not a <= b <= c:
        raise InvalidInput(f"initial state must satisfy a <= b <= c, got {(a, b, c)}")
    h, cap, every = cfg.h, cfg.blowup_cap, int(cfg.sample_every)
    n_steps = max(0, math.ceil(cfg.t_max / h - 1e-9))

    times, states = [t0], [(a, b, c)]
    halt = "t_max"
    last_recorded = 0
    for k in range(1, n_steps + 1):
        step = h if k < n_steps else cfg.t_max - (n_steps - 1) * h
        na, nb, nc = _rk4(a, b, c, step)
        if not (math.isfinite(na) and math.isfinite(nb) and math.isfinite(nc)) or max(
            abs(na), abs(nb), abs(nc)
        ) > cap:
            halt = "blowup"
            break
        scale = max(1.0, abs(na), abs(nc))
        if max(na - nb, nb - nc) > ORDER_FAIL * scale:
            raise IntegrationUnstable(
                f"ordering a <= b <= c lost at t={t0 + k * h:g}: {(na, nb, nc)}; reduce h"
            )
        a, b, c = na, nb, nc
        if k % every == 0 or k == n_steps:
            times.append(t0 + (k * h if k < n_steps else cfg.t_max))
            states.append((a, b, c))
            last_recorded = k
    if halt == "blowup" and last_recorded != k - 1 and k > 1:
        times.append(t0 + (k - 1) * h)
        states.append((a, b, c))
    return FlowTrace(np.array(times), np.array(states, dtype=float).reshape(-1, 3), halt)


def trace_is_monotone(trace: FlowTrace, tol: float = MONOTONE_TOL) -> bool:
    return trace.worst_decrease(trace.quantity_matrix()) >= -tol


@dataclass(frozen=True)
class PreservationReport:
    alpha: float
    kind: str
    n_samples: int
    attempts: int
    trivial: int
    worst_drop: float
    worst_step: float
    passed: bool
    tol: float


def _sample_initial(rng, kind: str, alpha: float, max_attempts: int):
    for attempt in range(1, max_attempts + 1):
        e = tuple(sorted(rng.uniform(-1.0, 1.0, size=3).tolist()))
        if not sum(e) > 0:
            continue
        value = f_alpha(e, alpha) if kind == "f" else h_alpha(e, alpha)
        if value >= 0:
            return e, attempt
    return None, max_attempts


def preservation_experiment(
    alpha: float,
    n_samples: int,
    cfg: FlowConfig = FlowConfig(),
    seed: int = 0,
    kind: Literal["f", "h"] = "f",
    tol: float = PRESERVATION_TOL,
    max_attempts: int = 10_000,
) -> PreservationReport:
    """Integrate initial data inside the cone and track ``functional / S``.

    ``kind="f"`` uses :func:`~secondkind.cones.f_alpha` (alpha in [1, 5]);
    ``kind="h"`` uses :func:`~secondkind.cones.h_alpha` (alpha in [1, 3]).
    Sample ``i`` draws from its own generator seeded with ``(seed, i)``, so
    results do not depend on evaluation order.  Passes iff
    ``min_t (F/S)(t) - (F/S)(0) >= -tol`` for every sample.
    """
    if kind not in ("f", "h"):
        raise InvalidInput(f"kind must be 'f' or 'h', got {kind!r}")
    upper = 5 if kind == "f" else 3
    if not 1 <= alpha <= upper:
        raise InvalidInput(f"alpha must lie in [1, {upper}] for kind={kind!r}")
    worst_drop, worst_step = 0.0, 0.0
    accepted = attempts = trivial = 0
    for i in range(int(n_samples)):
        rng = np.random.default_rng([int(seed), i])
        e, used = _sample_initial(rng, kind, alpha, max_attempts)
        attempts += used
        if e is None:
            continue
        accepted += 1
        if e == (0.0, 0.0, 0.0):
            trivial += 1
            continue
        series = integrate(e, cfg).functional_over_S(alpha, kind)
        series = series[np.isfinite(series)]
        if series.size:
            worst_drop = min(worst_drop, float((series - series[0]).min()))
            if series.size > 1:
                worst_step = min(worst_step, float(np.diff(series).min()))
    if accepted == 0:
        raise EmptySample(f"no initial data with {kind}_alpha >= 0 and S > 0 found")
    return PreservationReport(
        alpha=float(alpha),
        kind=kind,
        n_samples=accepted,
        attempts=attempts,
        trivial=trivial,
        worst_drop=worst_drop,
        worst_step=worst_step,
        passed=worst_drop >= -tol,
        tol=tol,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    h: float
    err_h: float
    err_half: float
    order: float


def central_difference_error(trace: FlowTrace, stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Times and errors of the central difference of ``S`` against ``|Ric|^2``."""
    S, ric2 = trace.S, trace.columns()["ric2"]
    dt = trace.t[stride] - trace.t[0]
    d = (S[2 * stride:] - S[: -2 * stride]) / (2.0 * dt)
    return trace.t[stride:-stride], d - ric2[stride:-stride]


def ds_dt_convergence(s0, h: float = 1e-3, t_end: float = 0.2) -> ConvergenceReport:
    """Observed order of the central-difference estimate of ``dS/dt`` versus ``|Ric|^2``.

    Integrates at ``h`` and ``h/2`` over the same window and compares errors on
    the shared grid of times that are multiples of ``h``.
    """
    coarse = integrate(s0, FlowConfig(h=h, t_max=t_end, blowup_cap=np.inf))
    fine = integrate(s0, FlowConfig(h=h / 2, t_max=t_end, blowup_cap=np.inf))
    if coarse.halt_reason != "t_max" or fine.halt_reason != "t_max":
        raise InvalidInput("trajectory blew up inside the window; shorten t_end")
    _, err_h = central_difference_error(coarse)
    _, err_half_all = central_difference_error(fine)
    # fine interior index j sits at time (j + 1) * h/2; shared times are odd j
    err_half = err_half_all[1::2][: err_h.size]
    e1, e2 = float(np.abs(err_h).max()), float(np.abs(err_half).max())
    return ConvergenceReport(h=h, err_h=e1, err_half=e2, order=math.log2(e1 / e2))
