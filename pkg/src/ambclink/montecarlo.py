"""Energy detection, end-to-end BER trials, and deterministic parallel sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analysis import HypothesisMoments, ber_closed_form, hypothesis_moments, near_optimal_threshold
from .channel import ChannelRealization, channels_with_bdpr, draw_channels
from .config import MODES, SystemParams
from .errors import AmbclinkError
from .estimation import PilotPlan, estimate_moments, estimated_threshold, relative_threshold_error
from .frontend import generate_frame
from .oracles import grid_min_threshold

CLOSED_FORM_TRUE = "closed_form_true"
ESTIMATED_POLICY = "estimated"
NUMERIC_ORACLE = "numeric_oracle"
POLICIES = (CLOSED_FORM_TRUE, ESTIMATED_POLICY, NUMERIC_ORACLE)

SWEEP_PS = "ps_dbm"
SWEEP_BDPR = "bdpr_db"
SWEEP_PILOT = "pilot_fraction"

_WILSON_Z = 1.959963984540054  # two-sided 95%


def detect(gamma: float, threshold: float, m: HypothesisMoments) -> int:
    """Energy-detector decision for one symbol energy."""
    if m.delta0 > m.delta1:
        return 0 if gamma >= threshold else 1
    return 0 if gamma < threshold else 1


def _detect_many(energies: np.ndarray, threshold: float, m: HypothesisMoments) -> np.ndarray:
    if m.delta0 > m.delta1:
        return (energies < threshold).astype(np.int64)
    return (energies >= threshold).astype(np.int64)


@dataclass(frozen=True)
class TrialResult:
    errors: int
    bits: int
    threshold: float
    ber_closed_form: float
    failed: bool = False


def ber_trial(
    params: SystemParams,
    real: ChannelRealization,
    rng: np.random.Generator,
    mode: str,
    threshold_policy: str = CLOSED_FORM_TRUE,
) -> TrialResult:
    """One frame: draw bits, generate samples, pick a threshold per policy,
    detect, and count errors on data symbols.

    Under the estimated policy the leading pilots are excluded from BER
    counting and the detector orders hypotheses by the estimated moments, so
    it never sees ground truth.
    """
    if threshold_policy not in POLICIES:
        raise ValueError(f"unknown threshold policy {threshold_policy!r}")
    k = params.k_symbols
    true_m = hypothesis_moments(params, real, mode)

    if threshold_policy == ESTIMATED_POLICY:
        plan = PilotPlan(params.k_train)
        bits = np.concatenate([plan.pilot_bits,
                               rng.integers(0, 2, k - plan.k_train)])
    else:
        plan = None
        bits = rng.integers(0, 2, k)

    frame = generate_frame(params, real, bits, rng, mode)

    if threshold_policy == CLOSED_FORM_TRUE:
        decision_m = true_m
        threshold = near_optimal_threshold(true_m)
    elif threshold_policy == NUMERIC_ORACLE:
        decision_m = true_m
        threshold, _ = grid_min_threshold(true_m)
    else:
        try:
            decision_m = estimate_moments(frame.energies, plan)
            threshold = estimated_threshold(decision_m)
        except AmbclinkError:
            return TrialResult(0, 0, math.nan, math.nan, failed=True)

    data_slice = slice(plan.k_train, None) if plan is not None else slice(None)
    decided = _detect_many(frame.energies[data_slice], threshold, decision_m)
    errors = int(np.sum(decided != bits[data_slice]))
    n_bits = int(bits[data_slice].size)
    return TrialResult(
        errors=errors,
        bits=n_bits,
        threshold=threshold,
        ber_closed_form=ber_closed_form(true_m, threshold),
    )


@dataclass(frozen=True)
class SweepSpec:
    """One experiment: a sweep variable, modes, and trial counts."""

    scenario: SystemParams
    sweep_var: str                      # SWEEP_PS or SWEEP_BDPR
    values: tuple
    modes: tuple = MODES
    threshold_policy: str = CLOSED_FORM_TRUE
    n_frames: int = 1
    n_realizations: int = 1
    master_seed: int = 0
    fixed_bdpr_db: float | None = None  # pin BDPR during a ps sweep

    def __post_init__(self):
        if self.sweep_var not in (SWEEP_PS, SWEEP_BDPR):
            raise ValueError(f"unknown sweep variable {self.sweep_var!r}")
        if not self.values:
            raise ValueError("sweep values must be nonempty")
        if not all(m in MODES for m in self.modes):
            raise ValueError(f"modes must be a subset of {MODES}")
        if self.threshold_policy not in POLICIES:
            raise ValueError(f"unknown threshold policy {self.threshold_policy!r}")
        if self.n_frames < 1 or self.n_realizations < 1:
            raise ValueError("n_frames and n_realizations must be >= 1")


@dataclass(frozen=True)
class BerPoint:
    sweep_var: str
    value: float
    mode: str
    threshold_policy: str
    ber_empirical: float
    ber_ci_halfwidth: float
    ber_closed_form: float
    threshold_mean: float
    errors: int
    bits: int
    failures: int
    master_seed: int
    unreliable: bool    # fewer than 10 observed errors


def wilson_halfwidth(errors: int, bits: int, z: float = _WILSON_Z) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    if bits == 0:
        return math.nan
    p = errors / bits
    denom = 1.0 + z * z / bits
    return (z / denom) * math.sqrt(p * (1.0 - p) / bits + z * z / (4.0 * bits * bits))


def _point_params(spec: SweepSpec, value: float) -> SystemParams:
    if spec.sweep_var == SWEEP_PS:
        return replace(spec.scenario, ps_dbm=float(value))
    return spec.scenario


def _draw_point_channel(
    spec: SweepSpec, params: SystemParams, value: float, rng: np.random.Generator
) -> ChannelRealization:
    if spec.sweep_var == SWEEP_BDPR:
        return channels_with_bdpr(params, float(value), rng)
    if spec.fixed_bdpr_db is not None:
        return channels_with_bdpr(params, spec.fixed_bdpr_db, rng)
    return draw_channels(params, rng)


def _realization_task(args):
    """One (sweep point, mode, realization): pure function of the spec and
    indices, so aggregation is order- and worker-count-independent."""
    spec, point_idx, mode_idx, r_idx = args
    value = spec.values[point_idx]
    mode = spec.modes[mode_idx]
    params = _point_params(spec, value)

    # The channel seed excludes the mode and the sweep point: modes are
    # compared on identical fading, and sweep curves are paired across points
    # (common random numbers), so point-to-point wiggle reflects the swept
    # variable rather than fresh fading draws.
    ch_rng = np.random.default_rng(
        np.random.SeedSequence((spec.master_seed, r_idx, 1))
    )
    real = _draw_point_channel(spec, params, value, ch_rng)

    errors = bits = failures = 0
    thr_sum = cf_sum = 0.0
    ok = 0
    for f_idx in range(spec.n_frames):
        rng = np.random.default_rng(
            np.random.SeedSequence((spec.master_seed, point_idx, mode_idx, r_idx, 2, f_idx))
        )
        res = ber_trial(params, real, rng, mode, spec.threshold_policy)
        if res.failed:
            failures += 1
            continue
        errors += res.errors
        bits += res.bits
        thr_sum += res.threshold
        cf_sum += res.ber_closed_form
        ok += 1
    return point_idx, mode_idx, errors, bits, failures, thr_sum, cf_sum, ok


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[BerPoint]:
    """Run all sweep points; deterministic for a fixed master seed regardless
    of worker count."""
    tasks = [
        (spec, pi, mi, ri)
        for pi in range(len(spec.values))
        for mi in range(len(spec.modes))
        for ri in range(spec.n_realizations)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_realization_task, tasks, chunksize=4))
    else:
        results = [_realization_task(t) for t in tasks]

    acc = {}
    for pi, mi, errors, bits, failures, thr_sum, cf_sum, ok in results:
        a = acc.setdefault((pi, mi), [0, 0, 0, 0.0, 0.0, 0])
        a[0] += errors
        a[1] += bits
        a[2] += failures
        a[3] += thr_sum
        a[4] += cf_sum
        a[5] += ok

    points = []
    for pi, value in enumerate(spec.values):
        for mi, mode in enumerate(spec.modes):
            errors, bits, failures, thr_sum, cf_sum, ok = acc[(pi, mi)]
            ber = errors / bits if bits else math.nan
            points.append(BerPoint(
                sweep_var=spec.sweep_var,
                value=float(value),
                mode=mode,
                threshold_policy=spec.threshold_policy,
                ber_empirical=ber,
                ber_ci_halfwidth=wilson_halfwidth(errors, bits),
                ber_closed_form=cf_sum / ok if ok else math.nan,
                threshold_mean=thr_sum / ok if ok else math.nan,
                errors=errors,
                bits=bits,
                failures=failures,
                master_seed=spec.master_seed,
                unreliable=errors < 10,
            ))
    return points


@dataclass(frozen=True)
class PilotPoint:
    pilot_fraction: float
    k_train: int
    r_mean: float
    r_median: float
    r_p90: float
    frames: int
    failures: int
    master_seed: int


def _pilot_task(args):
    params, mode, master_seed, f_idx, r_seed_idx = args
    ch_rng = np.random.default_rng(np.random.SeedSequence((master_seed, r_seed_idx, 1)))
    real = draw_channels(params, ch_rng)
    m_true = hypothesis_moments(params, real, mode)
    t_true = near_optimal_threshold(m_true)
    rng = np.random.default_rng(
        np.random.SeedSequence((master_seed, r_seed_idx, 2, f_idx))
    )
    plan = PilotPlan(params.k_train)
    bits = np.concatenate([plan.pilot_bits, rng.integers(0, 2, params.k_symbols - plan.k_train)])
    frame = generate_frame(params, real, bits, rng, mode)
    try:
        m_hat = estimate_moments(frame.energies, plan)
        t_hat = estimated_threshold(m_hat)
        return relative_threshold_error(t_true, t_hat)
    except AmbclinkError:
        return None


def run_pilot_sweep(
    params: SystemParams,
    fractions,
    mode: str,
    n_realizations: int,
    n_frames: int,
    master_seed: int,
    workers: int = 1,
) -> list[PilotPoint]:
    """Relative threshold-error statistics versus pilot overhead.

    Each fraction reuses the same channel/noise seed schedule so points
    differ only in pilot count.
    """
    points = []
    for frac in fractions:
        p = replace(params, pilot_fraction=float(frac))
        tasks = [
            (p, mode, master_seed, f, r)
            for r in range(n_realizations)
            for f in range(n_frames)
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rs = list(pool.map(_pilot_task, tasks, chunksize=8))
        else:
            rs = [_pilot_task(t) for t in tasks]
        good = np.array([r for r in rs if r is not None], dtype=float)
        failures = len(rs) - good.size
        points.append(PilotPoint(
            pilot_fraction=float(frac),
            k_train=p.k_train,
            r_mean=float(np.mean(good)) if good.size else math.nan,
            r_median=float(np.median(good)) if good.size else math.nan,
            r_p90=float(np.percentile(good, 90)) if good.size else math.nan,
            frames=int(good.size),
            failures=failures,
            master_seed=master_seed,
        ))
    return points
