import math

import pytest

from ambclink import ConfigError, SystemParams, load_scenario, read_scenario
from ambclink.config import (
    PAPER_DEFAULTS,
    db_to_amplitude_gain,
    db_to_power_gain,
    dbm_to_watts,
    watts_to_dbm,
)


class TestUnitConversions:
    def test_dbm_to_watts_known_values(self):
        assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-12)
        assert dbm_to_watts(0.0) == pytest.approx(1.0e-3, rel=1e-12)
        assert dbm_to_watts(-100.0) == pytest.approx(1.0e-13, rel=1e-12)

    def test_db_to_power_gain_known_values(self):
        assert db_to_power_gain(0.0) == 1.0
        assert db_to_power_gain(10.0) == pytest.approx(10.0, rel=1e-12)
        assert db_to_power_gain(-1.1) == pytest.approx(0.77625, rel=1e-4)

    def test_amplitude_gain_is_sqrt_of_power_gain(self):
        for g in (-20.0, -1.1, 0.0, 3.0, 17.5):
            assert db_to_amplitude_gain(g) == pytest.approx(
                math.sqrt(db_to_power_gain(g)), rel=1e-12
            )

    def test_round_trip(self):
        for p in (-200.0, -100.0, -37.5, 0.0, 42.0, 100.0):
            assert watts_to_dbm(dbm_to_watts(p)) == pytest.approx(p, rel=1e-12, abs=1e-12)

    def test_power_gain_strictly_increasing(self):
        xs = [-50.0, -10.0, -1.0, 0.0, 0.5, 10.0, 50.0]
        ys = [db_to_power_gain(x) for x in xs]
        assert all(a < b for a, b in zip(ys, ys[1:]))

    @pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
    def test_non_finite_rejected(self, bad):
        for fn in (dbm_to_watts, db_to_power_gain, db_to_amplitude_gain):
            with pytest.raises(ConfigError):
                fn(bad)
        with pytest.raises(ConfigError):
            watts_to_dbm(bad)

    def test_nonpositive_watts_rejected(self):
        for bad in (0.0, -1.0):
            with pytest.raises(ConfigError):
                watts_to_dbm(bad)


class TestLoadScenario:
    def test_paper_defaults_values(self):
        p = load_scenario({}, paper_defaults=True)
        assert p.beta1 == 56.23
        assert p.beta3 == -7497.33
        assert p.alpha_db == -1.1
        assert p.n_ar_dbm == -100.0
        assert p.n_at_dbm == -100.0
        assert p.n_cov_dbm == -70.0
        assert p.v0 == 4.5 and p.vst == 4.5 and p.vtr == 2.5
        assert p.r0 == 50.0 and p.rst == 50.0 and p.rtr == 10.0
        assert p.k_symbols == 100

    def test_paper_defaults_flag_inside_document(self):
        p = load_scenario({"paper_defaults": True, "ps_dbm": 5.0})
        assert p.ps_dbm == 5.0
        assert p.beta1 == 56.23

    def test_empty_document_lists_all_missing_keys(self):
        with pytest.raises(ConfigError) as ei:
            load_scenario({})
        missing = set(ei.value.fields)
        assert "beta1" in missing and "k_symbols" in missing
        # every mandatory key is named
        assert missing == set(PAPER_DEFAULTS) - {"pilot_fraction"}

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as ei:
            load_scenario({"paper_defaults": True, "beta2": 1.0})
        assert "beta2" in ei.value.fields

    def test_type_mismatch_named(self):
        with pytest.raises(ConfigError) as ei:
            load_scenario({"paper_defaults": True, "beta1": "56.23"})
        assert "beta1" in ei.value.fields

    def test_bool_is_not_a_number(self):
        with pytest.raises(ConfigError):
            load_scenario({"paper_defaults": True, "v0": True})

    def test_integer_fields_reject_fractions(self):
        with pytest.raises(ConfigError) as ei:
            load_scenario({"paper_defaults": True, "n_samples": 75.5})
        assert "n_samples" in ei.value.fields

    def test_pilot_fraction_even_odd(self):
        ok = load_scenario({"paper_defaults": True, "pilot_fraction": 0.3})
        assert ok.k_train == 30
        with pytest.raises(ConfigError) as ei:
            load_scenario({"paper_defaults": True, "pilot_fraction": 0.33})
        assert "pilot_fraction" in ei.value.fields

    def test_deterministic(self):
        doc = {"paper_defaults": True, "ps_dbm": -3.0}
        assert load_scenario(dict(doc)) == load_scenario(dict(doc))

    def test_read_scenario_json(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text('{"paper_defaults": true, "ps_dbm": 7.0}')
        p = read_scenario(str(path))
        assert p.ps_dbm == 7.0

    def test_read_scenario_bad_json(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text("not json")
        with pytest.raises(ConfigError):
            read_scenario(str(path))


class TestSystemParams:
    def test_invariants_enforced(self, paper_params):
        from dataclasses import replace
        for field, bad in (
            ("n_samples", 0), ("k_symbols", 0), ("r0", 0.0), ("v0", -1.0),
            ("pilot_fraction", 1.0), ("pilot_fraction", -0.1),
        ):
            with pytest.raises(ConfigError) as ei:
                replace(paper_params, **{field: bad})
            assert field in ei.value.fields

    def test_derived_linear_quantities(self, paper_params):
        assert paper_params.ps == pytest.approx(dbm_to_watts(paper_params.ps_dbm))
        assert paper_params.n_ar == pytest.approx(1e-13, rel=1e-12)
        assert paper_params.n_cov == pytest.approx(1e-10, rel=1e-12)
        assert paper_params.alpha_amp == pytest.approx(10 ** (-1.1 / 20), rel=1e-12)

    def test_immutable(self, paper_params):
        with pytest.raises(Exception):
            paper_params.beta1 = 1.0

    def test_k_train(self):
        p = load_scenario({"paper_defaults": True, "pilot_fraction": 0.2,
                           "k_symbols": 200})
        assert p.k_train == 40
