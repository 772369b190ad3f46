"""Baseband sample generation for a frame of tag symbols and the energy statistic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .config import LNA, MODES, NO_LNA, SystemParams


@dataclass(frozen=True)
class SymbolFrame:
    """A generated frame: K tag bits, K*N complex samples, K energy statistics."""

    bits: np.ndarray        # (K,) int, {0,1}
    samples: np.ndarray     # (K*N,) complex
    energies: np.ndarray    # (K,) float, watts
    mode: str


def symbol_energies(samples: np.ndarray, n_samples: int) -> np.ndarray:
    """Per-symbol average energy: mean |y|^2 over each block of N samples."""
    samples = np.asarray(samples)
    if n_samples < 1 or samples.size % n_samples != 0:
        raise ValueError(
            f"sample count {samples.size} is not a multiple of n_samples={n_samples}"
        )
    blocks = samples.reshape(-1, n_samples)
    return np.mean(np.abs(blocks) ** 2, axis=1)


def _draw_cn_block(rng: np.random.Generator, variance: float, shape) -> np.ndarray:
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_frame(
    params: SystemParams,
    real: ChannelRealization,
    bits: np.ndarray,
    rng: np.random.Generator,
    mode: str,
) -> SymbolFrame:
    """Generate the K*N received samples for one frame, channel held fixed.

    no_lna: y = g*s + (w_ar + w_cov + alpha*htr*d*w_at), g = h0 + alpha*hst*htr*d
    lna:    y = beta1*g*s + beta3*(g*s)|g*s|^2
                + (beta1*w_ar + w_cov + beta1*alpha*htr*d*w_at)
    The cubic distortion acts on the noiseless signal component only.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 1 or bits.size != params.k_symbols:
        raise ValueError(f"bits must have length K={params.k_symbols}, got {bits.size}")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("bits must be 0/1 valued")

    n = params.n_samples
    total = bits.size * n
    d = np.repeat(bits, n)                   # sample-level tag symbol
    alpha = params.alpha_amp
    g = real.h0 + alpha * real.hst * real.htr * d

    s = _draw_cn_block(rng, params.ps, total)
    w_ar = _draw_cn_block(rng, params.n_ar, total)
    w_cov = _draw_cn_block(rng, params.n_cov, total)
    w_at = _draw_cn_block(rng, params.n_at, total)

    if mode == NO_LNA:
        y = g * s + w_ar + w_cov + alpha * real.htr * d * w_at
    else:
        x = g * s
        y = (params.beta1 * x + params.beta3 * x * np.abs(x) ** 2
             + params.beta1 * w_ar + w_cov
             + params.beta1 * alpha * real.htr * d * w_at)

    return SymbolFrame(bits=bits, samples=y, energies=symbol_energies(y, n), mode=mode)
