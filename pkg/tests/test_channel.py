import math
from dataclasses import replace

import numpy as np
import pytest

from ambclink import UndefinedRatioError
from ambclink.channel import ChannelRealization, bdpr, channels_with_bdpr, draw_channels

N_DRAWS = 200_000  # 1% tolerance targets leave ~3x headroom at this size


def _draw_many(params, seed, n=N_DRAWS):
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return [draw_channels(params, rng) for _ in range(n)]


@pytest.fixture(scope="module")
def draws(paper_params):
    return _draw_many(paper_params, 101)


class TestDrawChannels:
    def test_variance_matches_path_loss(self, paper_params, draws):
        expected = {
            "h0": paper_params.r0 ** -paper_params.v0,
            "hst": paper_params.rst ** -paper_params.vst,
            "htr": paper_params.rtr ** -paper_params.vtr,
        }
        for name, target in expected.items():
            mean_sq = np.mean([abs(getattr(r, name)) ** 2 for r in draws])
            assert mean_sq == pytest.approx(target, rel=0.01)

    def test_zero_mean(self, paper_params, draws):
        h0 = np.array([r.h0 for r in draws])
        scale = math.sqrt(paper_params.r0 ** -paper_params.v0 / 2 / len(draws))
        assert abs(h0.real.mean()) < 4 * scale
        assert abs(h0.imag.mean()) < 4 * scale

    def test_real_imag_uncorrelated(self, draws):
        h0 = np.array([r.h0 for r in draws])
        corr = np.corrcoef(h0.real, h0.imag)[0, 1]
        assert abs(corr) < 4 / math.sqrt(len(draws))

    def test_composite_gain_identity(self, paper_params, draws):
        for r in draws[:200]:
            expected = r.h0 + paper_params.alpha_amp * r.hst * r.htr
            assert r.h1 == expected
            assert r.p0 == abs(r.h0) ** 2 * paper_params.ps
            assert r.p1 == abs(r.h1) ** 2 * paper_params.ps

    def test_composite_mean_power(self, paper_params, draws):
        p = paper_params
        expected = p.r0 ** -p.v0 + p.alpha_amp ** 2 * p.rst ** -p.vst * p.rtr ** -p.vtr
        mean_sq = np.mean([abs(r.h1) ** 2 for r in draws])
        assert mean_sq == pytest.approx(expected, rel=0.015)

    def test_negligible_tag_coefficient_collapses_hypotheses(self, paper_params):
        p = replace(paper_params, alpha_db=-400.0)
        rng = np.random.default_rng(7)
        for _ in range(100):
            r = draw_channels(p, rng)
            assert r.h1 == pytest.approx(r.h0, rel=1e-12)
            assert r.p1 == pytest.approx(r.p0, rel=1e-12)

    def test_deterministic_for_seed(self, paper_params):
        a = _draw_many(paper_params, 55, n=50)
        b = _draw_many(paper_params, 55, n=50)
        for ra, rb in zip(a, b):
            assert ra == rb


class TestBdpr:
    def _real(self, params, h0, hst, htr):
        h1 = h0 + params.alpha_amp * hst * htr
        return ChannelRealization(
            h0=h0, hst=hst, htr=htr, h1=h1,
            p0=abs(h0) ** 2 * params.ps, p1=abs(h1) ** 2 * params.ps,
        )

    def test_equal_powers_zero_db(self, paper_params):
        a = paper_params.alpha_amp
        r = self._real(paper_params, 1.0 + 0j, 1.0 / a + 0j, 1.0 + 0j)
        assert bdpr(r, paper_params) == pytest.approx(0.0, abs=1e-12)

    def test_ten_times_smaller_amplitude_is_minus_twenty(self, paper_params):
        a = paper_params.alpha_amp
        r = self._real(paper_params, 1.0 + 0j, 0.1 / a + 0j, 1.0 + 0j)
        assert bdpr(r, paper_params) == pytest.approx(-20.0, abs=1e-9)

    def test_zero_direct_gain_errors(self, paper_params):
        r = self._real(paper_params, 0j, 1.0 + 0j, 1.0 + 0j)
        with pytest.raises(UndefinedRatioError):
            bdpr(r, paper_params)


class TestChannelsWithBdpr:
    def test_hits_target(self, paper_params):
        rng = np.random.default_rng(11)
        for target in (-30.0, -20.0, -10.0, 0.0):
            r = channels_with_bdpr(paper_params, target, rng)
            assert bdpr(r, paper_params) == pytest.approx(target, abs=1e-9)

    def test_zero_db_amplitude_identity(self, paper_params):
        rng = np.random.default_rng(12)
        r = channels_with_bdpr(paper_params, 0.0, rng)
        assert paper_params.alpha_amp * abs(r.hst * r.htr) == pytest.approx(
            abs(r.h0), rel=1e-10
        )

    def test_only_hst_rescaled(self, paper_params):
        base = draw_channels(paper_params, np.random.default_rng(13))
        pinned = channels_with_bdpr(paper_params, -20.0, np.random.default_rng(13))
        assert pinned.h0 == base.h0
        assert pinned.htr == base.htr
        assert pinned.hst != base.hst

    def test_non_finite_target_rejected(self, paper_params):
        with pytest.raises(UndefinedRatioError):
            channels_with_bdpr(paper_params, math.inf, np.random.default_rng(1))
