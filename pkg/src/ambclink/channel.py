"""Quasi-static Rayleigh channel draws with distance-based path loss."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemParams
from .errors import UndefinedRatioError


@dataclass(frozen=True)
class ChannelRealization:
    """One coherence interval's channel state.

    h1 = h0 + alpha_amp * hst * htr; p_i = |h_i|^2 * Ps (watts).
    """

    h0: complex
    hst: complex
    htr: complex
    h1: complex
    p0: float
    p1: float

    @property
    def htr_abs2(self) -> float:
        return abs(self.htr) ** 2


def _compose(params: SystemParams, h0: complex, hst: complex, htr: complex) -> ChannelRealization:
    h1 = h0 + params.alpha_amp * hst * htr
    ps = params.ps
    return ChannelRealization(
        h0=h0, hst=hst, htr=htr, h1=h1,
        p0=abs(h0) ** 2 * ps, p1=abs(h1) ** 2 * ps,
    )


def _draw_cn(rng: np.random.Generator, variance: float) -> complex:
    scale = math.sqrt(variance / 2.0)
    return complex(rng.normal(0.0, scale), rng.normal(0.0, scale))


def draw_channels(params: SystemParams, rng: np.random.Generator) -> ChannelRealization:
    """Draw h0, hst, htr independently from CN(0, r^-v)."""
    h0 = _draw_cn(rng, params.r0 ** -params.v0)
    hst = _draw_cn(rng, params.rst ** -params.vst)
    htr = _draw_cn(rng, params.rtr ** -params.vtr)
    return _compose(params, h0, hst, htr)


def bdpr(real: ChannelRealization, params: SystemParams) -> float:
    """Backscatter-to-direct-link power ratio in dB."""
    direct = abs(real.h0) ** 2
    if direct == 0.0:
        raise UndefinedRatioError("BDPR undefined: |h0| = 0")
    back = params.alpha_amp ** 2 * abs(real.hst) ** 2 * abs(real.htr) ** 2
    return 10.0 * math.log10(back / direct)


def channels_with_bdpr(
    params: SystemParams,
    target_bdpr_db: float,
    rng: np.random.Generator,
    max_retries: int = 16,
) -> ChannelRealization:
    """Draw a realization and rescale hst so bdpr() hits the target exactly.

    Only hst is touched; h0 and htr keep their drawn values.
    """
    if not math.isfinite(target_bdpr_db):
        raise UndefinedRatioError(f"target BDPR must be finite, got {target_bdpr_db!r}")
    for _ in range(max_retries):
        real = draw_channels(params, rng)
        if abs(real.h0) > 0 and abs(real.hst) > 0 and abs(real.htr) > 0:
            break
    else:
        raise UndefinedRatioError("could not draw nonzero channels for BDPR rescaling")
    current = bdpr(real, params)
    scale = 10.0 ** ((target_bdpr_db - current) / 20.0)
    return _compose(params, real.h0, real.hst * scale, real.htr)
