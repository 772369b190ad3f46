import math
from dataclasses import replace

import numpy as np
import pytest

from ambclink import LNA, NO_LNA
from ambclink.analysis import HypothesisMoments
from ambclink.channel import ChannelRealization
from ambclink.errors import EstimationError
from ambclink.montecarlo import (
    CLOSED_FORM_TRUE,
    ESTIMATED_POLICY,
    NUMERIC_ORACLE,
    SWEEP_BDPR,
    SWEEP_PS,
    SweepSpec,
    ber_trial,
    detect,
    run_sweep,
    wilson_halfwidth,
)


def _manual_realization(params, h0, hst, htr):
    h1 = h0 + params.alpha_amp * hst * htr
    return ChannelRealization(h0=h0, hst=hst, htr=htr, h1=h1,
                              p0=abs(h0) ** 2 * params.ps,
                              p1=abs(h1) ** 2 * params.ps)


class TestDetect:
    def test_rule_applications(self):
        up = HypothesisMoments(1.0, 6.0, 1.0, 1.0)
        down = HypothesisMoments(6.0, 1.0, 1.0, 1.0)
        assert detect(5.0, 3.0, up) == 1
        assert detect(5.0, 3.0, down) == 0

    def test_tie_goes_to_the_geq_branch(self):
        up = HypothesisMoments(1.0, 6.0, 1.0, 1.0)
        assert detect(3.0, 3.0, up) == 1
        down = HypothesisMoments(6.0, 1.0, 1.0, 1.0)
        assert detect(3.0, 3.0, down) == 0


class TestWilson:
    def test_known_value(self):
        # p=0.5, n=100: classic Wilson half-width just under 0.1
        hw = wilson_halfwidth(50, 100)
        assert hw == pytest.approx(0.0958, abs=2e-3)

    def test_degenerate(self):
        assert math.isnan(wilson_halfwidth(0, 0))
        assert wilson_halfwidth(0, 1000) > 0


class TestBerTrial:
    def test_noise_free_separated_is_error_free(self, paper_params):
        p = replace(paper_params, beta1=1.0, beta3=0.0, alpha_db=0.0,
                    n_ar_dbm=-400.0, n_cov_dbm=-400.0, n_at_dbm=-400.0,
                    k_symbols=400, pilot_fraction=0.0)
        real = _manual_realization(p, 1e-4 + 0j, 1.0 + 0j, 1.0 + 0j)
        assert real.p1 / real.p0 > 1e6
        res = ber_trial(p, real, np.random.default_rng(3), LNA, CLOSED_FORM_TRUE)
        assert res.errors == 0
        assert res.bits == 400

    def test_no_tag_information_gives_half(self, paper_params):
        # -200 dB keeps the hypotheses formally distinct (so a threshold
        # exists) while carrying no usable tag information
        p = replace(paper_params, alpha_db=-200.0, k_symbols=4000,
                    pilot_fraction=0.0)
        real = _manual_realization(p, 0.001 + 0.001j, 0.01 + 0j, 0.02 + 0j)
        res = ber_trial(p, real, np.random.default_rng(5), LNA, CLOSED_FORM_TRUE)
        ber = res.errors / res.bits
        assert abs(ber - 0.5) < 4 * math.sqrt(0.25 / res.bits)

    def test_estimated_policy_excludes_pilots(self, paper_params, fixed_realization):
        p = replace(paper_params, k_symbols=100, pilot_fraction=0.2)
        res = ber_trial(p, fixed_realization, np.random.default_rng(7), LNA,
                        ESTIMATED_POLICY)
        assert res.failed is False
        assert res.bits == 80

    def test_numeric_oracle_policy_close_to_closed_form(self, paper_params,
                                                        fixed_realization):
        p = replace(paper_params, k_symbols=2000, pilot_fraction=0.0)
        a = ber_trial(p, fixed_realization, np.random.default_rng(9), LNA,
                      CLOSED_FORM_TRUE)
        b = ber_trial(p, fixed_realization, np.random.default_rng(9), LNA,
                      NUMERIC_ORACLE)
        # near-optimality: closed-form threshold is not meaningfully worse
        se = math.sqrt(2 * 0.25 / p.k_symbols)
        assert a.errors / a.bits - b.errors / b.bits <= 3 * se

    def test_degenerate_estimate_is_recorded_not_raised(self, paper_params,
                                                        fixed_realization,
                                                        monkeypatch):
        import ambclink.montecarlo as mc
        def boom(energies, plan):
            raise EstimationError("forced degenerate estimate")
        monkeypatch.setattr(mc, "estimate_moments", boom)
        p = replace(paper_params, k_symbols=100, pilot_fraction=0.2)
        res = ber_trial(p, fixed_realization, np.random.default_rng(11), LNA,
                        ESTIMATED_POLICY)
        assert res.failed is True
        assert res.bits == 0

    def test_unknown_policy_rejected(self, paper_params, fixed_realization):
        with pytest.raises(ValueError):
            ber_trial(paper_params, fixed_realization, np.random.default_rng(1),
                      LNA, "oracle")


class TestSweepSpec:
    def test_validation(self, paper_params):
        good = dict(scenario=paper_params, sweep_var=SWEEP_PS, values=(0.0,))
        SweepSpec(**good)
        with pytest.raises(ValueError):
            SweepSpec(**{**good, "sweep_var": "gain"})
        with pytest.raises(ValueError):
            SweepSpec(**{**good, "values": ()})
        with pytest.raises(ValueError):
            SweepSpec(**{**good, "modes": ("amp",)})
        with pytest.raises(ValueError):
            SweepSpec(**{**good, "threshold_policy": "guess"})
        with pytest.raises(ValueError):
            SweepSpec(**{**good, "n_frames": 0})


@pytest.fixture(scope="module")
def small_spec(paper_params):
    p = replace(paper_params, pilot_fraction=0.0, k_symbols=50, n_samples=25)
    return SweepSpec(scenario=p, sweep_var=SWEEP_PS, values=(0.0, 10.0),
                     modes=(LNA, NO_LNA), n_frames=2, n_realizations=8,
                     master_seed=77)


class TestRunSweep:
    def test_deterministic_rerun(self, small_spec):
        assert run_sweep(small_spec, workers=1) == run_sweep(small_spec, workers=1)

    def test_worker_count_invariance(self, small_spec):
        assert run_sweep(small_spec, workers=1) == run_sweep(small_spec, workers=3)

    def test_point_bookkeeping(self, small_spec):
        points = run_sweep(small_spec, workers=1)
        assert len(points) == 4
        for pt in points:
            assert pt.errors <= pt.bits
            assert 0.0 <= pt.ber_empirical <= 1.0
            assert pt.bits == 50 * 2 * 8
            assert pt.master_seed == 77

    def test_different_seeds_differ(self, small_spec):
        a = run_sweep(small_spec, workers=1)
        b = run_sweep(replace(small_spec, master_seed=78), workers=1)
        assert a != b

    def test_bdpr_sweep_monotone_within_confidence(self, paper_params):
        p = replace(paper_params, pilot_fraction=0.0, ps_dbm=5.0)
        spec = SweepSpec(scenario=p, sweep_var=SWEEP_BDPR,
                         values=(-30.0, -10.0), modes=(LNA,),
                         n_frames=1, n_realizations=60, master_seed=13)
        lo, hi = run_sweep(spec, workers=2)
        assert hi.ber_empirical <= lo.ber_empirical + lo.ber_ci_halfwidth \
            + hi.ber_ci_halfwidth

    def test_pinned_bdpr_ps_sweep(self, paper_params):
        p = replace(paper_params, pilot_fraction=0.0, k_symbols=50, n_samples=25)
        spec = SweepSpec(scenario=p, sweep_var=SWEEP_PS, values=(0.0,),
                         modes=(LNA,), n_frames=1, n_realizations=10,
                         master_seed=3, fixed_bdpr_db=-20.0)
        (pt,) = run_sweep(spec, workers=1)
        assert pt.bits == 500

    def test_estimated_policy_counts_failures(self, paper_params):
        p = replace(paper_params, pilot_fraction=0.2, k_symbols=100,
                    n_samples=25)
        spec = SweepSpec(scenario=p, sweep_var=SWEEP_PS, values=(10.0,),
                         modes=(LNA,), threshold_policy=ESTIMATED_POLICY,
                         n_frames=5, n_realizations=10, master_seed=2)
        (pt,) = run_sweep(spec, workers=1)
        assert pt.bits + 0 == (50 - pt.failures) * 80
        assert pt.failures >= 0
