"""Cross-validation suite: every closed form against an independent oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analysis, oracles
from .analysis import HypothesisMoments, dc_noise_powers, hypothesis_moments
from .channel import draw_channels
from .config import LNA, NO_LNA, SystemParams
from .errors import ModelValidityError
from .frontend import generate_frame


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def random_moment_tuple(rng: np.random.Generator):
    """A random (beta1, beta3, P, Naw) tuple in the model's valid range."""
    beta1 = rng.uniform(1.0, 100.0)
    p = 10.0 ** rng.uniform(-12, -6)
    # keep |beta3| P << beta1 so the cubic stays perturbative
    beta3 = -rng.uniform(0.0, 0.1) * beta1 / p
    n_aw = 10.0 ** rng.uniform(-14, -8)
    return beta1, beta3, p, n_aw


def check_moments_vs_expansion(seed: int = 0, n_tuples: int = 1000) -> CheckResult:
    """Closed-form moments against the exponential-moment expansion oracle."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_tuples):
        beta1, beta3, p, n_aw = random_moment_tuple(rng)
        n = int(rng.integers(1, 200))
        mean_c, var_c = analysis.lna_moments(p, beta1, beta3, n_aw, n)
        mean_o, var_o = oracles.exp_moment_mean_var(p, beta1, beta3, n_aw, n)
        worst = max(worst, _rel_err(mean_c, mean_o), _rel_err(var_c, var_o))
    return CheckResult(
        "moments_vs_expansion_oracle", worst <= 1e-12,
        f"max relative error {worst:.3e} over {n_tuples} tuples (tol 1e-12)",
    )


def check_moments_vs_montecarlo(
    params: SystemParams, seed: int = 1, n_samples_mc: int = 2_000_000,
    mean_tol: float = 0.02, var_tol: float = 0.08,
) -> CheckResult:
    """Closed-form LNA moments against simulated sample moments at H1."""
    rng = np.random.default_rng(seed)
    real = draw_channels(params, rng)
    n_aw = analysis.noise_power(params, real.htr_abs2, 1, LNA)
    mean_c, var_c = analysis.lna_moments(
        real.p1, params.beta1, params.beta3, n_aw, 1
    )
    # per-sample moments of |y|^2 with d[k] = 1 throughout
    from dataclasses import replace
    p = replace(params, k_symbols=1, n_samples=1, pilot_fraction=0.0)
    sq_sum = 0.0
    quad_sum = 0.0
    done = 0
    chunk = 500_000
    while done < n_samples_mc:
        take = min(chunk, n_samples_mc - done)
        pc = replace(p, k_symbols=take)
        frame = generate_frame(pc, real, np.ones(take, dtype=np.int64), rng, LNA)
        e = np.abs(frame.samples) ** 2
        sq_sum += float(np.sum(e))
        quad_sum += float(np.sum(e * e))
        done += take
    mean_mc = sq_sum / done
    var_mc = quad_sum / done - mean_mc**2
    err_m, err_v = _rel_err(mean_c, mean_mc), _rel_err(var_c, var_mc)
    return CheckResult(
        "moments_vs_montecarlo", err_m <= mean_tol and err_v <= var_tol,
        f"mean rel err {err_m:.3e} (tol {mean_tol}), var rel err {err_v:.3e} (tol {var_tol})",
    )


def check_q_function(seed: int = 2) -> CheckResult:
    rng = np.random.default_rng(seed)
    xs = np.concatenate([[0.0, 1.0, -1.0], rng.uniform(-8, 8, 50)])
    worst = max(
        _rel_err(float(analysis.q_function(x)), oracles.q_integral(float(x))) for x in xs
    )
    return CheckResult(
        "q_function_vs_quadrature", worst <= 1e-12,
        f"max relative error {worst:.3e} (tol 1e-12)",
    )


def random_valid_moments(rng: np.random.Generator) -> HypothesisMoments:
    """Moments shaped like an energy detector's: larger mean, larger variance."""
    d0 = 10.0 ** rng.uniform(-12, -4)
    sep = rng.uniform(0.05, 3.0)
    n = rng.integers(25, 400)
    v0 = (d0 / math.sqrt(n)) ** 2
    d1 = d0 + sep * math.sqrt(v0)
    v1 = v0 * (d1 / d0) ** 2
    if rng.random() < 0.5:
        d0, d1, v0, v1 = d1, d0, v1, v0
    return HypothesisMoments(delta0=d0, delta1=d1, var0=v0, var1=v1)


def check_threshold_near_optimality(seed: int = 3, n_tuples: int = 1000) -> CheckResult:
    """Closed-form threshold against the grid-minimum and the PDF-equality
    residual."""
    rng = np.random.default_rng(seed)
    worst_gap = 0.0
    worst_res = 0.0
    for _ in range(n_tuples):
        m = random_valid_moments(rng)
        t = analysis.near_optimal_threshold(m)
        _, ber_grid = oracles.grid_min_threshold(m)
        gap = analysis.ber_closed_form(m, t) - ber_grid
        worst_gap = max(worst_gap, gap)
        f0 = math.exp(-((t - m.delta0) ** 2) / (2 * m.var0)) / math.sqrt(2 * math.pi * m.var0)
        f1 = math.exp(-((t - m.delta1) ** 2) / (2 * m.var1)) / math.sqrt(2 * math.pi * m.var1)
        worst_res = max(worst_res, abs(f0 - f1) / max(f0, f1))
    ok = worst_gap <= 1e-6 and worst_res <= 1e-9
    return CheckResult(
        "threshold_near_optimality", ok,
        f"max BER gap {worst_gap:.3e} (tol 1e-6), max PDF residual {worst_res:.3e} (tol 1e-9)",
    )


def check_deflection(params: SystemParams, seed: int = 4) -> CheckResult:
    rng = np.random.default_rng(seed)
    n = params.n_samples
    msgs = []
    ok = True
    for _ in range(50):
        real = draw_channels(params, rng)
        n_w, n_aw = dc_noise_powers(params, real.htr_abs2)
        p0, p1 = real.p0, real.p1
        full = analysis.deflection_lna_full(p0, p1, params.beta1, params.beta3, n_aw, n)
        m0 = analysis.lna_moments(p0, params.beta1, params.beta3, n_aw, n)
        m1 = analysis.lna_moments(p1, params.beta1, params.beta3, n_aw, n)
        comp = (m1[0] - m0[0]) ** 2 / m0[1]
        if _rel_err(full, comp) > 1e-12:
            ok = False
            msgs.append(f"full-vs-composition rel err {_rel_err(full, comp):.3e}")
            break
        approx = analysis.deflection_lna_approx(p0, p1, params.beta1, n_aw, n)
        base = analysis.deflection_no_lna(p0, p1, n_w, n)
        if p0 != p1 and n_w > n_aw / params.beta1**2 and not approx > base:
            ok = False
            msgs.append("approx DC did not exceed no-LNA DC")
            break
    # convergence at large power: ratio within 1% when P0 >= 1e6 * max noise scale
    n_w, n_aw = dc_noise_powers(params, params.rtr ** -params.vtr)
    p0 = 1e6 * max(n_w, n_aw / params.beta1**2)
    p1 = 1.5 * p0
    ratio = analysis.deflection_lna_approx(p0, p1, params.beta1, n_aw, params.n_samples) \
        / analysis.deflection_no_lna(p0, p1, n_w, params.n_samples)
    if not (1.0 < ratio < 1.01):
        ok = False
        msgs.append(f"high-power DC ratio {ratio:.6f} not in (1, 1.01)")
    return CheckResult(
        "deflection_identities", ok,
        "; ".join(msgs) if msgs else "composition, ordering, and convergence hold",
    )


def check_linear_reduction(params: SystemParams) -> CheckResult:
    """beta1=1, beta3=0 collapses the LNA forms onto the no-LNA ones."""
    worst = 0.0
    for p in (0.0, 1e-12, 1e-9, 1e-6):
        for n_w in (1e-13, 1e-10):
            m_l = analysis.lna_moments(p, 1.0, 0.0, n_w, params.n_samples)
            m_n = analysis.nolna_moments(p, n_w, params.n_samples)
            worst = max(worst, _rel_err(m_l[0], m_n[0]), _rel_err(m_l[1], m_n[1]))
    return CheckResult(
        "linear_reduction_identity", worst == 0.0,
        f"max relative error {worst:.3e} (exact match required)",
    )


def check_model_validity_guard(params: SystemParams) -> CheckResult:
    """An absurd input power must trip the variance guard, not return junk."""
    for p_huge in (1e20, 1e40, 1e60, 1e80, 1e120):
        try:
            analysis.lna_moments(p_huge, params.beta1, params.beta3, 0.0,
                                 params.n_samples)
        except ModelValidityError as exc:
            return CheckResult("model_validity_guard", True, f"guard raised: {exc}")
    return CheckResult("model_validity_guard", False,
                       "no ModelValidityError raised for out-of-range power")


def run_all_checks(params: SystemParams, seed: int = 0) -> list[CheckResult]:
    return [
        check_moments_vs_expansion(seed=seed),
        check_moments_vs_montecarlo(params, seed=seed + 1),
        check_q_function(seed=seed + 2),
        check_threshold_near_optimality(seed=seed + 3),
        check_deflection(params, seed=seed + 4),
        check_linear_reduction(params),
        check_model_validity_guard(params),
    ]
