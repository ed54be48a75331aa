"""Tests for check_identities.py."""

import json
import subprocess
import sys
from pathlib import Path

sys.path.insert(0, "skills/dg-multicomponent/scripts")

import numpy as np
import pytest

from check_identities import CHECKS, check_identities, format_text, random_states
from cases import get_case

SCRIPT = Path("skills/dg-multicomponent/scripts/check_identities.py")


@pytest.fixture(scope="module")
def report():
    return check_identities(seed=0, samples=200)


class TestChecks:
    def test_all_pass(self, report):
        assert report["success"], report
        assert set(report["checks"]) == set(CHECKS)

    @pytest.mark.parametrize("name", list(CHECKS))
    def test_each_within_tolerance(self, report, name):
        result = report["checks"][name]
        assert result["max_error"] <= result["tolerance"]

    def test_face_check_sees_active_faces(self, report):
        assert report["checks"]["face_compatibility"]["active_faces"] > 0

    def test_seed_is_reproducible(self):
        a = check_identities(seed=3, samples=50, checks=["energy_derivative"])
        b = check_identities(seed=3, samples=50, checks=["energy_derivative"])
        assert a["checks"] == b["checks"]

    def test_unknown_check(self):
        result = check_identities(checks=["entropy"])
        assert not result["success"]
        assert "entropy" in result["error"]

    def test_missing_thermo_file(self, tmp_path):
        result = check_identities(thermo=str(tmp_path / "none.dat"), samples=10)
        assert not result["success"]
        assert result["hint"]

    def test_random_states_are_physical(self):
        mixture = get_case("bubble-600-o2").mixture()
        y = random_states(np.random.default_rng(1), mixture, 100, P=2e6)
        assert np.all(y[:, 1] == 2e6)
        assert np.all(y[:, 2:] >= 0)

    def test_text_format(self, report):
        text = format_text(report)
        assert text.startswith("seed 0, 200 samples")
        assert "FAIL" not in text


class TestCli:
    def test_single_check(self):
        proc = subprocess.run(
            [sys.executable, str(SCRIPT), "--seed", "1", "--samples", "50", "--check", "correction_constraint"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert list(json.loads(proc.stdout)["checks"]) == ["correction_constraint"]
