"""Randomised sweeps that check the library against its oracle and against the 3D theory.

Every sweep is deterministic in ``seed`` and returns :class:`CheckResult`
records; the CLI ``verify`` command and the acceptance tests both consume them.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import cones, flow, oracle, spectra
from .tensor_core import traceless_dim

SPECTRUM_TOL = 1e-8
SECULAR_TOL = 1e-9
PINCHING_SLACK = 1e-10
FLOW_ALPHAS = (1.0, 2.0, 10 / 3, 4.0, 5.0)
FIRST_KIND_ALPHAS = (1.0, 1.5, 2.0, 2.5, 3.0)
PARTIAL_SUM_ALPHAS = (1.0, 1.5, 2.0, 2.5, 3.0, 10 / 3, 3.5, 4.0, 4.5, 5.0)
PINCHING_DELTAS = (0.0, 0.1, 0.2, 1 / 3)


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float = 0.0
    samples: int = 0
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}  {self.name:<44s} worst={self.worst:.3e}  n={self.samples}"


def random_triples(n: int, rng, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    return np.sort(rng.uniform(low, high, size=(n, 3)), axis=1)


def with_degenerate(triples: np.ndarray, rng, fraction: float = 0.1) -> np.ndarray:
    """Overwrite a share of rows with the cases a=b, b=c and a=b=c."""
    t = triples.copy()
    m = len(t)
    idx = rng.permutation(m)
    k = int(fraction * m)
    t[idx[:k], 1] = t[idx[:k], 0]
    t[idx[k:2 * k], 1] = t[idx[k:2 * k], 2]
    t[idx[2 * k:3 * k], :] = t[idx[2 * k:3 * k], :1]
    return t


def random_schouten(n: int, rng, min_gap: float = 1e-2) -> spectra.SchoutenSpectrum:
    """Random composition of ``n`` into multiplicities with well-separated eigenvalues."""
    k = int(rng.integers(1, n + 1))
    cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False)) if k > 1 else np.array([], int)
    mult = np.diff(np.concatenate([[0], cuts, [n]])).astype(int)
    while True:
        mu = np.sort(rng.uniform(-1.0, 1.0, size=k))
        if k == 1 or np.diff(mu).min() > min_gap:
            return spectra.SchoutenSpectrum(tuple(mu.tolist()), tuple(mult.tolist()))


def zero_balanced_schouten(n: int, rng) -> spectra.SchoutenSpectrum:
    """Random spectrum with ``sum n_i / mu_i = 0`` (requires n >= 2)."""
    while True:
        k = int(rng.integers(2, n + 1))
        cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
        mult = np.diff(np.concatenate([[0], cuts, [n]])).astype(int)
        mu = rng.uniform(-1.0, 1.0, size=k - 1)
        if np.abs(mu).min() < 0.05:
            continue
        balance = float(np.sum(mult[:-1] / mu))
        last = -mult[-1] / balance
        values = np.concatenate([mu, [last]])
        order = np.argsort(values)
        values, mult = values[order], mult[order]
        if np.abs(values).max() < 5 and np.diff(values).min() > 1e-2:
            return spectra.SchoutenSpectrum(tuple(values.tolist()), tuple(mult.tolist()))


def zero_eigenvalue_schouten(n: int, rng) -> spectra.SchoutenSpectrum:
    """Random spectrum with one eigenvalue exactly zero (requires n >= 2)."""
    while True:
        s = random_schouten(n, rng)
        if s.k < 2:
            continue
        mu = list(s.mu)
        mu[int(rng.integers(0, s.k))] = 0.0
        if len(set(mu)) == len(mu) and sorted(mu) == mu:
            return spectra.SchoutenSpectrum(tuple(mu), s.mult)


def _timed(fn):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - start
        return result

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def check_spectrum3d_oracle(n_samples: int, seed: int = 0, scale: float = 10.0) -> CheckResult:
    rng = np.random.default_rng(seed)
    triples = with_degenerate(random_triples(n_samples, rng, -scale, scale), rng)
    numeric = oracle.numeric_spectra_3d(triples)
    analytic = np.array([spectra.spectrum3d(tuple(t)).values() for t in triples.tolist()])
    gaps = np.abs(analytic - numeric).max(axis=1)
    worst = float(gaps.max())
    return CheckResult("3D closed form vs dense oracle", worst < SPECTRUM_TOL, worst, n_samples,
                       detail={"worst_triple": triples[int(gaps.argmax())].tolist()})


@_timed
def check_lambda_bounds(n_samples: int, seed: int = 0, scale: float = 10.0) -> CheckResult:
    rng = np.random.default_rng(seed + 1)
    triples = with_degenerate(random_triples(n_samples, rng, -scale, scale), rng)
    worst = 0.0
    for a, b, c in triples.tolist():
        lm, lp = spectra.lambda_pm((a, b, c))
        worst = max(worst, lm - a, c - lp)
    return CheckResult("lam_minus <= a and lam_plus >= c", worst <= 1e-12, max(worst, 0.0), n_samples)


def _general_batch(samples: list[spectra.SchoutenSpectrum]):
    n = samples[0].dim
    diags = np.array([s.diagonal() for s in samples])
    numeric = oracle.numeric_spectra_general(diags)
    worst, count_ok, in_range = 0.0, True, True
    for s, num in zip(samples, numeric):
        spectrum = spectra.spectrum_general(s)
        count_ok &= spectrum.size == traceless_dim(n)
        cmp = oracle.compare(spectrum, num, SPECTRUM_TOL)
        worst = max(worst, cmp.max_abs_gap)
        vals = spectrum.values()
        in_range &= 2 * s.mu[0] - 1e-9 <= vals[0] and vals[-1] <= 2 * s.mu[-1] + 1e-9
    return worst, count_ok, in_range


@_timed
def check_general_oracle(per_dim: int, seed: int = 0, dims=range(2, 8), family: str = "random") -> CheckResult:
    make = {
        "random": random_schouten,
        "zero-balanced": zero_balanced_schouten,
        "zero-eigenvalue": zero_eigenvalue_schouten,
    }[family]
    worst, count_ok, in_range, total = 0.0, True, True, 0
    for n in dims:
        rng = np.random.default_rng([seed, n])
        batch = [make(n, rng) for _ in range(per_dim)]
        w, c, r = _general_batch(batch)
        worst, count_ok, in_range = max(worst, w), count_ok and c, in_range and r
        total += len(batch)
    passed = worst < SPECTRUM_TOL and count_ok and in_range
    return CheckResult(f"general-n families vs oracle ({family})", passed, worst, total,
                       detail={"multiplicity_total_ok": count_ok, "within_[2mu1,2muk]": in_range})


@_timed
def check_secular_matches_lambda_pm(n_samples: int, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    done = 0
    for a, b, c in random_triples(n_samples, rng, -10, 10).tolist():
        e = spectra.FirstKindEigs3(a, b, c)
        mus = sorted(e.schouten())
        if min(mus[1] - mus[0], mus[2] - mus[1]) < 1e-6:
            continue
        roots = spectra.secular_roots(spectra.SchoutenSpectrum(tuple(mus), (1, 1, 1)))
        lm, lp = spectra.lambda_pm(e)
        worst = max(worst, abs(roots[0][0] - lm), abs(roots[1][0] - lp))
        done += 1
    return CheckResult("secular roots equal lam_minus, lam_plus", worst < SECULAR_TOL, worst, done)


def spectra_suite(samples: int, seed: int = 0) -> list[CheckResult]:
    per_dim = max(1, samples // 20)
    return [
        check_spectrum3d_oracle(samples, seed),
        check_lambda_bounds(samples, seed),
        check_general_oracle(per_dim, seed),
        check_general_oracle(max(1, per_dim // 5), seed, family="zero-balanced"),
        check_general_oracle(max(1, per_dim // 5), seed, family="zero-eigenvalue"),
        check_secular_matches_lambda_pm(max(1, samples // 10), seed),
    ]


# -- cones ---------------------------------------------------------------------------------

_CHAIN = (
    "2-nonneg => sec>=0",
    "sec>=0 => 10/3-nonneg",
    "10/3-nonneg => Ric>=0",
    "Ric>=0 => 4-nonneg",
    "5-nonneg <=> S>=0",
)


def chain_violations(triples: np.ndarray) -> dict[str, int]:
    """Vectorised count of counterexamples to each implication and closed-form equivalence."""
    a, b, c = triples[:, 0], triples[:, 1], triples[:, 2]
    scale = np.abs(triples).max(axis=1)
    f = {}
    for alpha in (2, 10 / 3, 4, 5):
        v = cones.f_alpha_array(triples, alpha)
        f[alpha] = np.where(np.abs(v) <= cones.BOUNDARY_TOL * scale, 0.0, v)
    sec, ric, scal = a >= 0, a + b >= 0, a + b + c >= 0
    cf103 = (2 * a + 2 * b + c >= 0) & (12 * a * a + 12 * b * b + 36 * a * b + 20 * a * c + 20 * b * c >= 0)
    cf4 = (a + b + c >= 0) & ((a + b) ** 2 + (c * c + a * b) + 3 * (a + b) * c >= 0)
    boundary103 = np.abs(f[10 / 3]) <= cones.BOUNDARY_TOL * scale
    boundary4 = np.abs(f[4]) <= cones.BOUNDARY_TOL * scale
    out = {
        _CHAIN[0]: int(np.sum((f[2] >= 0) & ~sec)),
        _CHAIN[1]: int(np.sum(sec & ~(f[10 / 3] >= 0))),
        _CHAIN[2]: int(np.sum((f[10 / 3] >= 0) & ~ric)),
        _CHAIN[3]: int(np.sum(ric & ~(f[4] >= 0))),
        _CHAIN[4]: int(np.sum((f[5] >= 0) != scal)),
        "2-pos => sec>0": int(np.sum((f[2] > 0) & ~(a > 0))),
        "sec>0 => 10/3-pos": int(np.sum((a > 0) & ~(f[10 / 3] > 0))),
        "10/3-pos => Ric>0": int(np.sum((f[10 / 3] > 0) & ~(a + b > 0))),
        "Ric>0 => 4-pos": int(np.sum((a + b > 0) & ~(f[4] > 0))),
        "closed form 10/3 <=> f_10/3>=0": int(np.sum((cf103 != (f[10 / 3] >= 0)) & ~boundary103)),
        "closed form 4 <=> f_4>=0": int(np.sum((cf4 != (f[4] >= 0)) & ~boundary4)),
    }
    return out


@_timed
def check_implication_chain(n_samples: int, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng([seed, 3])
    triples = random_triples(n_samples, rng)
    counts = chain_violations(triples)
    sign_flip = chain_violations(-triples[:, ::-1])
    total = sum(counts.values()) + sum(sign_flip.values())
    return CheckResult("implication chain + closed forms", total == 0, float(total), n_samples,
                       detail={"violations": counts, "violations_on_-R": sign_flip})


@_timed
def check_partial_sum_matches_f(n_samples: int, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng([seed, 4])
    worst = 0.0
    for e in random_triples(n_samples, rng).tolist():
        spectrum = spectra.spectrum3d(e)
        for alpha in PARTIAL_SUM_ALPHAS:
            worst = max(worst, abs(cones.f_alpha(e, alpha) - cones.alpha_partial_sum(spectrum, alpha)))
    return CheckResult("f_alpha equals weighted partial sum", worst <= 1e-10, worst, n_samples)


@_timed
def check_sign_symmetry(n_samples: int, seed: int = 0) -> CheckResult:
    """nonneg verdicts on R equal nonpos verdicts on -R."""
    rng = np.random.default_rng([seed, 5])
    mismatches = 0
    for e in random_triples(n_samples, rng).tolist():
        neg = sorted(-v for v in e)
        for alpha in PARTIAL_SUM_ALPHAS:
            for plain, flipped in ((cones.Mode.NONNEG, cones.Mode.NONPOS),
                                   (cones.Mode.POSITIVE, cones.Mode.NEGATIVE)):
                mine = cones.condition_holds(spectra.spectrum3d(e), cones.AlphaCondition(alpha, plain))
                theirs = cones.condition_holds(spectra.spectrum3d(neg), cones.AlphaCondition(alpha, flipped))
                mismatches += mine != theirs
    return CheckResult("sign symmetry nonneg(R) == nonpos(-R)", mismatches == 0, float(mismatches), n_samples)


def pinching_violations(triples: np.ndarray, bound) -> dict[float, tuple[int, float]]:
    """Per delta: (violations, worst shortfall) of ``Ric_min >= bound(delta) S``."""
    a, b, c = triples[:, 0], triples[:, 1], triples[:, 2]
    S = 2 * (a + b + c)
    out = {}
    for delta in PINCHING_DELTAS:
        ok = (cones.f_alpha_array(triples, 3 + delta) >= 0) & (S > 0)
        shortfall = bound(delta) * S[ok] - (a + b)[ok]
        out[delta] = (int(np.sum(shortfall > PINCHING_SLACK)), float(shortfall.max()) if shortfall.size else 0.0)
    return out


@_timed
def check_pinching(n_samples: int, seed: int = 0, attained: bool = False) -> CheckResult:
    rng = np.random.default_rng([seed, 6])
    triples = random_triples(n_samples, rng)
    bound = cones.pinching_bound_attained if attained else cones.pinching_bound
    res = pinching_violations(triples, bound)
    total = sum(v for v, _ in res.values())
    label = "(1-3d)/(6(2-d))" if attained else "(1-3d)/(3(2-d))"
    return CheckResult(f"Ricci pinching Ric >= {label} S", total == 0,
                       max(w for _, w in res.values()), n_samples,
                       detail={f"delta={d:.4g}": {"violations": v, "worst_shortfall": w} for d, (v, w) in res.items()})


@_timed
def check_sharpness_examples() -> CheckResult:
    worst, ok = 0.0, True
    for eps in (0.01, 0.001):
        for ex in cones.sharpness_examples(eps):
            worst = max(worst, *(abs(x - y) for x, y in zip(ex.lambda_pm, ex.lambda_pm_closed)))
            ok &= ex.condition_holds and ex.converse_violated
    return CheckResult("sharpness examples (eps=0.01, 0.001)", ok and worst <= 1e-12, worst, 8)


def cones_suite(samples: int, seed: int = 0) -> list[CheckResult]:
    return [
        check_implication_chain(samples, seed),
        check_partial_sum_matches_f(max(1, samples // 10), seed),
        check_sign_symmetry(max(1, samples // 100), seed),
        check_sharpness_examples(),
        check_pinching(samples, seed),
        check_pinching(samples, seed, attained=True),
    ]


# -- flow ----------------------------------------------------------------------------------


def positive_scalar_triples(n: int, rng) -> list[tuple[float, float, float]]:
    out = []
    while len(out) < n:
        e = tuple(sorted(rng.uniform(-1.0, 1.0, size=3).tolist()))
        if sum(e) > 0:
            out.append(e)
    return out


@_timed
def check_flow_monotone(n_samples: int, seed: int = 0, h: float = 1e-3) -> CheckResult:
    rng = np.random.default_rng([seed, 7])
    cfg = flow.FlowConfig(h=h, t_max=1e3)
    worst, order_worst, blowups = 0.0, 0.0, 0
    for e in positive_scalar_triples(n_samples, rng):
        tr = flow.integrate(e, cfg)
        blowups += tr.halt_reason == "blowup"
        worst = min(worst, tr.worst_decrease(tr.quantity_matrix()))
        order_worst = max(order_worst, float(np.max(np.diff(tr.abc, axis=1) * -1).max()))
    passed = worst >= -flow.MONOTONE_TOL and order_worst <= flow.ORDER_SLACK and blowups == n_samples
    return CheckResult("six monotone quantities nondecreasing", passed, max(0.0, -worst), n_samples,
                       detail={"worst_order_violation": order_worst, "blowups": blowups})


@_timed
def check_round_sphere(h: float = 1e-4, t_end: float = 0.45) -> CheckResult:
    tr = flow.integrate((1.0, 1.0, 1.0), flow.FlowConfig(h=h, t_max=t_end))
    err = float(np.abs(tr.abc - (1.0 / (1.0 - 2.0 * tr.t))[:, None]).max())
    return CheckResult("round sphere a(t) = 1/(1-2t)", err < 1e-6 and tr.halt_reason == "t_max", err, 1)


@_timed
def check_preservation(alpha: float, kind: str, n_samples: int, seed: int = 0) -> CheckResult:
    rep = flow.preservation_experiment(alpha, n_samples, flow.FlowConfig(t_max=1e3), seed, kind)
    name = f"{kind}_alpha/S nondecreasing, alpha={alpha:.4g}"
    return CheckResult(name, rep.passed, max(0.0, -rep.worst_drop), rep.n_samples, detail={"worst_step": rep.worst_step})


@_timed
def check_ds_dt(seed: int = 0, n_traces: int = 5) -> CheckResult:
    rng = np.random.default_rng([seed, 8])
    orders = []
    for e in positive_scalar_triples(n_traces, rng):
        orders.append(flow.ds_dt_convergence(e, 1e-3, 0.1).order)
    worst = min(orders)
    return CheckResult("dS/dt = |Ric|^2, observed order (2 d.p.) >= 2", round(worst, 2) >= 2.0, worst, n_traces,
                       detail={"orders": orders})


def flow_suite(samples: int, seed: int = 0) -> list[CheckResult]:
    results = [check_round_sphere(), check_flow_monotone(samples, seed), check_ds_dt(seed)]
    results += [check_preservation(alpha, "f", samples, seed) for alpha in FLOW_ALPHAS]
    results += [check_preservation(alpha, "h", samples, seed) for alpha in FIRST_KIND_ALPHAS]
    return results


SUITES = {"spectra": spectra_suite, "cones": cones_suite, "flow": flow_suite}


def run_suites(name: str, samples: int, seed: int = 0) -> dict[str, list[CheckResult]]:
    names = list(SUITES) if name == "all" else [name]
    return {n: SUITES[n](samples, seed) for n in names}


def isclose(x: float, y: float, tol: float) -> bool:
    return math.isclose(x, y, rel_tol=0.0, abs_tol=tol)
