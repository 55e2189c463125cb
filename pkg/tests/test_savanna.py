"""Raw-parameter model: config parsing, scaling, and threshold algebra."""

import math
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from pulsefront.savanna import (
    CONFIG_KEYS,
    ConfigError,
    SavannaParams,
    carrying_capacity,
    fire_intensity,
    fire_mortality,
    format_config,
    growth_rate,
    load_config,
    normalize,
    parse_config_text,
    scale_info,
    thresholds_raw,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "demos" / "configs"
FOREST_CFG = CONFIG_DIR / "forest_invasion.cfg"
GRASSLAND_CFG = CONFIG_DIR / "grassland_invasion.cfg"


@pytest.fixture(scope="module")
def forest_params() -> SavannaParams:
    return load_config(FOREST_CFG)


@pytest.fixture(scope="module")
def grassland_params() -> SavannaParams:
    return load_config(GRASSLAND_CFG)


class TestConfigParsing:
    def test_round_trip_through_format(self, forest_params):
        echoed = parse_config_text(format_config(forest_params))
        assert echoed == forest_params

    def test_comments_and_blank_lines_ignored(self):
        text = format_config(load_config(GRASSLAND_CFG))
        decorated = "# leading comment\n\n" + text.replace(
            "eta = ", "# annotation\neta = ", 1
        )
        assert parse_config_text(decorated) == load_config(GRASSLAND_CFG)

    def test_unknown_key_rejected_with_location(self, forest_params):
        text = format_config(forest_params) + "mystery = 1\n"
        lineno = len(text.splitlines())
        with pytest.raises(ConfigError, match=rf":{lineno}: unknown key 'mystery'"):
            parse_config_text(text)

    def test_duplicate_key_rejected(self, forest_params):
        text = format_config(forest_params) + "eta = 0.5\n"
        with pytest.raises(ConfigError, match="duplicate key 'eta'"):
            parse_config_text(text)

    def test_missing_key_named(self, forest_params):
        lines = [
            line
            for line in format_config(forest_params).splitlines()
            if not line.startswith("alpha_G")
        ]
        with pytest.raises(ConfigError, match="missing required key.*alpha_G"):
            parse_config_text("\n".join(lines))

    def test_non_numeric_value_rejected(self, forest_params):
        text = format_config(forest_params).replace("W = 1200.0", "W = plenty")
        with pytest.raises(ConfigError, match="W"):
            parse_config_text(text)

    def test_all_config_keys_unique_and_complete(self):
        assert len(CONFIG_KEYS) == len(set(CONFIG_KEYS)) == 22

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(OSError):
            load_config(tmp_path / "nope.cfg")


class TestValidation:
    def test_eta_must_be_below_one(self, forest_params):
        text = format_config(forest_params).replace("eta = 0.7", "eta = 1.0")
        with pytest.raises(ConfigError, match="eta"):
            parse_config_text(text)

    def test_mortality_bounds_ordered(self, forest_params):
        text = format_config(forest_params).replace(
            "lambda_fT_min = 0.05", "lambda_fT_min = 0.95"
        )
        with pytest.raises(ConfigError, match="lambda_fT"):
            parse_config_text(text)

    def test_nonpositive_rainfall_rejected(self, forest_params):
        text = format_config(forest_params).replace("W = 1200.0", "W = 0")
        with pytest.raises(ConfigError, match="W"):
            parse_config_text(text)

    def test_negative_parameter_rejected(self, forest_params):
        text = format_config(forest_params).replace("delta_G = 0.3", "delta_G = -0.3")
        with pytest.raises(ConfigError):
            parse_config_text(text)


class TestResponseFunctions:
    def test_growth_rate_monod_shape(self):
        # gamma * W / (b + W): saturates at gamma, halves at W = b
        assert growth_rate(2.0, 1000.0, 1000.0) == pytest.approx(1.0)
        assert growth_rate(2.0, 0.0, 500.0) == pytest.approx(2.0)
        assert growth_rate(1.5, 501.0, 1200.0) == pytest.approx(1.5 * 1200 / 1701)

    def test_carrying_capacity_sigmoid(self):
        # c / (1 + d e^{-aW}), increasing in W toward c
        low = carrying_capacity(450.0, 106.7, 0.0045, 300.0)
        high = carrying_capacity(450.0, 106.7, 0.0045, 3000.0)
        assert 0 < low < high < 450.0

    def test_fire_intensity_hill_function(self):
        assert fire_intensity(0.0, 2.0) == 0.0
        assert fire_intensity(2.0, 2.0) == pytest.approx(0.5)
        assert fire_intensity(1e9, 2.0) == pytest.approx(1.0, abs=1e-9)

    def test_fire_mortality_decreases_with_tree_biomass(self, forest_params):
        lo = fire_mortality(0.0, forest_params)
        hi = fire_mortality(1000.0, forest_params)
        assert lo == pytest.approx(forest_params.lambda_fT_max)
        assert forest_params.lambda_fT_min <= hi < lo


class TestScaling:
    def test_reference_capacities(self, forest_params, grassland_params):
        s1 = scale_info(forest_params)
        assert s1.K_T_prime == pytest.approx(273.3955, abs=5e-4)
        assert s1.K_G_prime == pytest.approx(9.8569, abs=5e-4)
        s2 = scale_info(grassland_params)
        assert s2.K_T_prime == pytest.approx(24.3905, abs=5e-4)
        assert s2.K_G_prime == pytest.approx(2.3119, abs=5e-4)

    def test_normalized_season_lengths(self, forest_params, grassland_params):
        assert normalize(forest_params).tau == pytest.approx(1.806689, abs=1e-6)
        assert normalize(grassland_params).tau == pytest.approx(0.896224, abs=1e-6)

    def test_normalization_requires_positive_net_growth(self, forest_params):
        # delta_T above gamma_T(W) leaves trees with no net growth to scale by
        text = format_config(forest_params).replace("delta_T = 0.1", "delta_T = 1.5")
        with pytest.raises(ConfigError):
            normalize(parse_config_text(text))

    def test_diffusion_passes_through(self, forest_params):
        norm = normalize(forest_params)
        assert norm.d_u == forest_params.diff_T
        assert norm.d_v == forest_params.diff_G


class TestThresholds:
    def test_reference_values_forest_scenario(self, forest_params):
        report = thresholds_raw(forest_params)
        assert f"{report.R0:.4f}" == "1.3667"
        assert f"{report.R1:.4f}" == "0.0058"
        assert f"{report.R2:.4f}" == "3.3801"

    def test_reference_values_grassland_scenario(self, grassland_params):
        report = thresholds_raw(grassland_params)
        assert f"{report.R0:.4f}" == "2.0425"
        assert f"{report.R1:.4f}" == "1.2541"
        assert f"{report.R2:.4f}" == "0.9932"

    def test_equilibria_and_verdicts(self, forest_params, grassland_params):
        rep1 = thresholds_raw(forest_params)
        eq1 = dict(rep1.equilibria)
        assert eq1["forest"][0] == pytest.approx(273.3955, rel=1e-3)
        assert eq1["grassland"][1] == pytest.approx(3.3888, rel=1e-3)
        verdicts1 = dict(rep1.verdicts)
        assert verdicts1["forest"] == "LAS"
        assert verdicts1["grassland"] == "unstable"
        rep2 = thresholds_raw(grassland_params)
        eq2 = dict(rep2.equilibria)
        assert eq2["forest"][0] == pytest.approx(24.3905, rel=1e-3)
        assert eq2["grassland"][1] == pytest.approx(2.1096, rel=1e-3)
        verdicts2 = dict(rep2.verdicts)
        assert verdicts2["forest"] == "unstable"
        assert verdicts2["grassland"] == "LAS"

    def test_normalized_thresholds_match_raw_exactly(self, forest_params, grassland_params):
        # the scaling leaves all three threshold expressions invariant
        from pulsefront.homogeneous import thresholds

        for params in (forest_params, grassland_params):
            raw = thresholds_raw(params)
            R0, R1, R2 = thresholds(normalize(params))
            assert R0 == pytest.approx(raw.R0, rel=1e-12)
            assert R1 == pytest.approx(raw.R1, rel=1e-12)
            assert R2 == pytest.approx(raw.R2, rel=1e-12)

    def test_report_serialization_round_trip(self, forest_params):
        report = thresholds_raw(forest_params)
        text = report.to_text()
        assert "R0" in text and "LAS" in text
        rows = report.to_csv_rows()
        labels = [row[0] for row in rows]
        assert len(labels) == len(set(labels))

    def test_grassland_absent_when_grass_cannot_persist(self, forest_params):
        # pushing eta near 1 sends R0 below 1: no grassland equilibrium
        text = format_config(forest_params).replace("eta = 0.7", "eta = 0.999")
        report = thresholds_raw(parse_config_text(text))
        assert "grassland" not in dict(report.equilibria)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(
    eta=st.floats(0.0, 0.95),
    W=st.floats(100.0, 3000.0),
    tau_tilde=st.floats(0.5, 6.0),
    alpha_G=st.floats(0.05, 5.0),
)
def test_threshold_scaling_invariance_property(eta, W, tau_tilde, alpha_G):
    """R0/R1/R2 computed from raw parameters equal the normalized-system
    values for any admissible parameter set, not just the shipped configs."""
    from pulsefront.homogeneous import thresholds

    base = load_config(FOREST_CFG)
    text = format_config(base)
    text = text.replace("eta = 0.7", f"eta = {eta!r}")
    text = text.replace("W = 1200.0", f"W = {W!r}")
    text = text.replace("tau_tilde = 2.0", f"tau_tilde = {tau_tilde!r}")
    text = text.replace("alpha_G = 2.0", f"alpha_G = {alpha_G!r}")
    params = parse_config_text(text)
    try:
        norm = normalize(params)
    except ConfigError:
        return  # growth does not exceed loss at this W; nothing to compare
    raw = thresholds_raw(params)
    R0, R1, R2 = thresholds(norm)
    assert math.isclose(R0, raw.R0, rel_tol=1e-10)
    assert math.isclose(R1, raw.R1, rel_tol=1e-10)
    assert math.isclose(R2, raw.R2, rel_tol=1e-10)
