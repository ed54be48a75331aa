"""Tests for run_sweep.py."""

import csv
import json
import sys

sys.path.insert(0, "skills/dg-multicomponent/scripts")

import pytest

from config import build_config
from errors import ConfigError
from run_sweep import SWEEP_FIELDS, format_text, parse_values, point_config, run_sweep


def base(**overrides):
    return build_config(overrides=overrides)


class TestParseValues:
    def test_grid_values_are_ints(self):
        assert parse_values("grid", "50, 100,200") == [50, 100, 200]

    def test_timestep_values_are_floats(self):
        assert parse_values("timestep", "1e-3,5e-4") == [1e-3, 5e-4]

    def test_scheme_values_are_names(self):
        assert parse_values("scheme", "P1,E2") == ["P1", "E2"]

    def test_bad_number(self):
        with pytest.raises(ConfigError, match="values"):
            parse_values("grid", "50,lots")

    def test_empty(self):
        with pytest.raises(ConfigError):
            parse_values("grid", " , ")


class TestPointConfig:
    def test_timestep_point_turns_off_cfl(self, tmp_path):
        cfg = point_config(base(case="gaussian"), "timestep", 1e-3, tmp_path)
        assert cfg.dt == 1e-3 and cfg.cfl is None
        assert cfg.out == str(tmp_path / "timestep_0.001")

    def test_grid_point(self):
        cfg = point_config(base(case="mms"), "grid", 16, None)
        assert cfg.N == 16 and cfg.out is None

    def test_invalid_point_is_rejected(self):
        with pytest.raises(ConfigError, match="scheme"):
            point_config(base(), "scheme", "P9", None)


class TestRunSweep:
    def test_non_monotone_values(self):
        report = run_sweep(base(case="mms"), "grid", [8, 16, 12])
        assert not report["success"]
        assert "monotone" in report["error"]

    def test_unknown_axis(self):
        report = run_sweep(base(), "degree", [1, 2])
        assert not report["success"]

    def test_scheme_comparison(self):
        cfg = base(case="gaussian", N=6, p=1, t_end=0.002)
        report = run_sweep(cfg, "scheme", ["P1", "P3", "E2"])
        assert report["success"]
        assert [pt["scheme"] for pt in report["points"]] == ["P1", "P3", "E2"]
        assert all(pt["status"] == "completed" for pt in report["points"])
        assert report["scheme"] is None
        assert "rates" not in report

    @pytest.mark.parametrize("p", [2, 3])
    def test_grid_convergence(self, tmp_path, p):
        cfg = base(case="mms", scheme="P1", p=p, t_end=0.02)
        report = run_sweep(cfg, "grid", [8, 16], out=str(tmp_path))
        assert report["success"]
        assert report["rate_metric"] == "l2_combined"
        assert report["mean_rate"] >= p + 0.7
        with open(tmp_path / "sweep.csv", newline="") as f:
            rows = list(csv.DictReader(f))
        assert list(rows[0]) == list(SWEEP_FIELDS)
        assert [r["N"] for r in rows] == ["8", "16"]
        assert json.loads((tmp_path / "sweep.json").read_text())["axis"] == "grid"
        assert (tmp_path / "grid_8" / "summary.json").exists()
        assert "mean rate" in format_text(report)

    def test_truncated_points_give_no_rates(self):
        report = run_sweep(base(case="mms", scheme="P1", p=1, max_steps=2), "grid", [4, 8])
        assert report["success"]
        assert [pt["status"] for pt in report["points"]] == ["truncated", "truncated"]
        assert report["rates"] == []
        assert report["mean_rate"] is None

    def test_timestep_sweep_uses_conservation_metric(self):
        cfg = base(case="gaussian", scheme="P3", N=10, p=2, t_end=0.02)
        report = run_sweep(cfg, "timestep", [2e-3, 1e-3])
        assert report["success"]
        assert report["rate_metric"] == "final_conservation_error_pct"
        assert [pt["dt"] for pt in report["points"]] == [2e-3, 1e-3]

    def test_failed_point_fails_sweep(self):
        report = run_sweep(base(case="gaussian", N=6, p=1, t_end=0.002), "scheme", ["P1", "P9"])
        assert not report["success"]
        assert "P9" in report["error"]


@pytest.fixture(scope="module")
def bubble_schemes():
    """All five schemes on the high-velocity bubble for three advection periods."""
    report = run_sweep(base(case="bubble-600", periods=3.0), "scheme", ["P1", "P2", "P3", "E1", "E2"])
    assert report["success"]
    return {pt["value"]: pt for pt in report["points"]}


class TestSchemeOrdering:
    """Short-horizon version of the bubble-600 pressure-equilibrium comparison."""

    @pytest.mark.parametrize("scheme", ["P1", "P3"])
    def test_equilibrium_schemes_hold_pressure(self, bubble_schemes, scheme):
        assert bubble_schemes[scheme]["status"] == "completed"
        assert bubble_schemes[scheme]["max_pressure_error_pct"] < 1e-8

    def test_original_correction_loses_equilibrium(self, bubble_schemes):
        assert bubble_schemes["P2"]["status"] == "completed"
        assert bubble_schemes["P2"]["max_pressure_error_pct"] >= 100 * bubble_schemes["P3"]["max_pressure_error_pct"]

    def test_overintegrated_energy_scheme_is_worse_but_stable(self, bubble_schemes):
        assert bubble_schemes["E1"]["status"] == "completed"
        assert bubble_schemes["E1"]["max_pressure_error_pct"] >= 10 * bubble_schemes["P2"]["max_pressure_error_pct"]

    def test_colocated_energy_scheme_diverges_first(self, bubble_schemes):
        e2 = bubble_schemes["E2"]
        assert e2["status"] == "diverged"
        assert e2["divergence_time"] < bubble_schemes["E1"]["t_final"]


@pytest.fixture(scope="module")
def timestep_sweeps():
    """Energy conservation against dt on the high-velocity bubble, half a period."""
    reports = {}
    for scheme in ("P1", "P2", "P3"):
        cfg = base(case="bubble-600", scheme=scheme, N=25, p=3, periods=0.5)
        reports[scheme] = run_sweep(cfg, "timestep", [3.14e-6, 1.57e-6])
        assert reports[scheme]["success"]
    return reports


class TestTemporalConservation:
    @pytest.mark.parametrize("scheme", ["P2", "P3"])
    def test_corrected_schemes_converge_third_order(self, timestep_sweeps, scheme):
        report = timestep_sweeps[scheme]
        assert all(pt["status"] == "completed" for pt in report["points"])
        assert 2.5 < report["mean_rate"] < 3.5

    def test_uncorrected_scheme_does_not_converge(self, timestep_sweeps):
        report = timestep_sweeps["P1"]
        assert report["mean_rate"] < 0.5
