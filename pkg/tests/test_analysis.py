"""Sweeps, subadditivity experiments, and CSV export."""

import numpy as np
import pytest

from spectral_risk import (
    QuadratureConfig,
    SweepResult,
    WeightSpec,
    convergence_study,
    convergence_to_csv,
    curve_to_csv,
    find_peak,
    load_empirical,
    srm,
    standard_normal,
    subadditivity_check,
    sweep_srm,
    sweep_to_csv,
    var,
    var_subadditivity_counterexample,
    weight,
    weight_curve,
)

FAST = QuadratureConfig(n_points=10_001)


def test_sweep_values_follow_the_parameter():
    src = standard_normal()
    result = sweep_srm("exponential", [1.0, 5.0, 25.0], src, FAST)
    assert result.family == "exponential"
    assert result.params == (1.0, 5.0, 25.0)
    assert result.values[0] < result.values[1] < result.values[2]
    assert result.rows() == list(zip(result.params, result.values))


def test_sweep_matches_pointwise_evaluation():
    src = standard_normal()
    result = sweep_srm("power", [0.3, 0.6], src, FAST)
    for c, v in result.rows():
        assert v == srm(src, WeightSpec.power(c), FAST)


def test_sweep_es_family_uses_alpha():
    src = standard_normal()
    result = sweep_srm("es", [0.9, 0.95], src, FAST)
    assert result.values[0] < result.values[1]


def test_sweep_input_validation():
    src = standard_normal()
    with pytest.raises(ValueError, match="cannot sweep"):
        sweep_srm("flat", [0.5], src, FAST)
    with pytest.raises(ValueError, match="empty"):
        sweep_srm("exponential", [], src, FAST)
    with pytest.raises(ValueError, match="strictly increasing"):
        sweep_srm("exponential", [2.0, 2.0], src, FAST)
    with pytest.raises(ValueError, match="strictly increasing"):
        sweep_srm("exponential", [3.0, 1.0], src, FAST)


def test_find_peak_returns_the_first_maximum():
    result = SweepResult(family="power", params=(0.1, 0.2, 0.3, 0.4),
                         values=(1.0, 3.0, 3.0, 2.0))
    assert find_peak(result) == (0.2, 3.0)
    with pytest.raises(ValueError, match="at least 3"):
        find_peak(SweepResult(family="power", params=(0.1, 0.2), values=(1.0, 2.0)))


def test_weight_curve_samples_the_weight_function():
    spec = WeightSpec.power(0.7)
    rows = weight_curve(spec, n_points=5, p_max=0.8)
    assert len(rows) == 5
    assert rows[0][0] == 0.0
    assert rows[-1][0] == pytest.approx(0.8, abs=1e-15)
    for p, w in rows:
        assert w == pytest.approx(weight(spec, p), rel=1e-15)
        assert np.isfinite(w)


def test_weight_curve_validation():
    with pytest.raises(ValueError, match="n_points"):
        weight_curve(WeightSpec.flat(), n_points=1)
    with pytest.raises(ValueError, match="p_max"):
        weight_curve(WeightSpec.flat(), p_max=1.0)


def test_spectral_measures_pass_the_subadditivity_stress():
    report = subadditivity_check(
        WeightSpec.exponential(a=5.0), sample_size=120, trials=30, seed=0, config=FAST
    )
    assert report.trials == 30
    assert report.violations == 0
    assert report.worst_gap <= 1e-9
    assert report.seed == 0


def test_subadditivity_check_is_deterministic():
    a = subadditivity_check(WeightSpec.power(0.5), sample_size=60, trials=10, seed=9, config=FAST)
    b = subadditivity_check(WeightSpec.power(0.5), sample_size=60, trials=10, seed=9, config=FAST)
    assert a == b


def test_subadditivity_accepts_a_callable_measure():
    report = subadditivity_check(
        lambda src: var(src, 0.99), sample_size=80, trials=12, seed=2
    )
    assert report.trials == 12
    assert report.violations >= 0
    assert report.to_dict()["violations"] == report.violations


def test_subadditivity_check_validation():
    with pytest.raises(ValueError, match="sample_size"):
        subadditivity_check(WeightSpec.flat(), sample_size=1, trials=5)
    with pytest.raises(ValueError, match="trials"):
        subadditivity_check(WeightSpec.flat(), sample_size=10, trials=0)
    with pytest.raises(TypeError, match="WeightSpec or a callable"):
        subadditivity_check("var", sample_size=10, trials=5)


def test_merging_a_position_with_itself_doubles_the_measure_exactly():
    # positive homogeneity of the sample measure makes this gap exactly zero
    rng = np.random.default_rng(31)
    x = rng.normal(size=200)
    spec = WeightSpec.exponential(a=5.0)
    single = srm(load_empirical(x), spec, FAST)
    merged = srm(load_empirical(x + x), spec, FAST)
    assert merged - 2.0 * single == 0.0


def test_var_counterexample_violates_subadditivity():
    result = var_subadditivity_counterexample()
    assert result["violated"] is True
    assert result["gap"] > 0.0
    assert result["var_a"] == 0.0
    assert result["var_b"] == 0.0
    assert result["var_sum"] == result["loss"]
    assert result["gap"] == result["loss"]
    assert result["tail_prob"] == pytest.approx(0.04, abs=1e-12)


def test_var_counterexample_validation():
    with pytest.raises(ValueError, match="alpha"):
        var_subadditivity_counterexample(alpha=1.0)
    with pytest.raises(ValueError, match="tail_prob"):
        var_subadditivity_counterexample(tail_prob=0.0)
    with pytest.raises(ValueError, match="too extreme"):
        var_subadditivity_counterexample(tail_prob=1e-9)


def test_sweep_to_csv_round_trips_floats_exactly(tmp_path):
    result = SweepResult(family="exponential", params=(0.5, 5.0),
                         values=(0.1234567890123456789, 2.0 / 3.0))
    path = tmp_path / "sweep.csv"
    sweep_to_csv(result, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "param,value"
    assert len(lines) == 3
    for line, (p, v) in zip(lines[1:], result.rows()):
        cp, cv = line.split(",")
        assert float(cp) == p
        assert float(cv) == v


def test_curve_and_convergence_csv_headers(tmp_path):
    curve_path = tmp_path / "curve.csv"
    curve_to_csv([(0.0, 1.0), (0.5, 2.0)], curve_path)
    curve_lines = curve_path.read_text(encoding="utf-8").splitlines()
    assert curve_lines[0] == "p,weight"
    assert curve_lines[1] == "0.0,1.0"

    rows = convergence_study(standard_normal(), WeightSpec.flat(), [101, 1001])
    conv_path = tmp_path / "conv.csv"
    convergence_to_csv(rows, conv_path)
    conv_lines = conv_path.read_text(encoding="utf-8").splitlines()
    assert conv_lines[0] == "n,value"
    assert conv_lines[1].startswith("101,")
    n_cell = conv_lines[2].split(",")[0]
    assert n_cell == "1001"
