import ast
import math
from pathlib import Path

import pytest
from pydantic import ValidationError

from app.models.report import AssertionResult, ScenarioReport, ScenarioStatus
from app.models.scenario import ClassicalScanSpec, CouplingSpec, ScenarioConfig, ScenarioType, SweepConfig, TauGridSpec
from utils.identity_utils import IdentityReport


def test_scenario_config_requires_one_squeezing_input():
    with pytest.raises(ValidationError):
        ScenarioConfig(scenario="single-chain")
    with pytest.raises(ValidationError):
        ScenarioConfig.model_validate({"scenario": "single-chain", "gamma": 0.5, "omega": 1.0})
    assert ScenarioConfig(scenario="identities").squeeze.gamma == 0.5


def test_scenario_config_rejects_invalid_fields():
    with pytest.raises(ValidationError):
        ScenarioConfig.model_validate({"scenario": "single-chain", "gamma": 0.5, "cutof": 4})
    with pytest.raises(ValidationError):
        ScenarioConfig(scenario="single-chain", gamma=1.0)
    with pytest.raises(ValidationError):
        ScenarioConfig(scenario="single-chain", gamma=0.5, g=0.0)
    with pytest.raises(ValidationError):
        ScenarioConfig(scenario="teleport", gamma=0.5)
    with pytest.raises(ValidationError):
        ScenarioConfig.model_validate({"scenario": "single-chain", "gamma": 0.5, "schema_version": 2})


def test_omega_alias_sets_gamma():
    config = ScenarioConfig.model_validate({"scenario": "two-chain", "omega": 0.2})
    assert config.squeeze.gamma == pytest.approx(math.exp(-0.2 * math.pi))
    assert config.resolved_label == "two-chain-w0.2"


def test_resolved_label():
    assert ScenarioConfig(scenario="single-chain", gamma=0.5).resolved_label == "single-chain-g0.5"
    assert ScenarioConfig(scenario="single-chain", gamma=0.5, label="mine").resolved_label == "mine"
    assert ScenarioConfig(scenario="coupling").resolved_label == "coupling"


def test_scenario_type_properties():
    assert ScenarioType.UNRUH_MINKOWSKI.chains == 1
    assert ScenarioType.CAVITY_TOY.chains == 2
    assert not ScenarioType.CLASSICAL.needs_squeezing


def test_nested_specs():
    with pytest.raises(ValidationError):
        TauGridSpec(values=[0.0, -1.0])
    with pytest.raises(ValidationError):
        TauGridSpec(points=1)
    with pytest.raises(ValidationError):
        ClassicalScanSpec(k_min=1.5, k_max=0.5)


def test_sweep_expands_scenarios_outermost():
    sweep = SweepConfig(scenarios=["single-chain", "two-chain"], gammas=[0.1, 0.3], base={"tau_grid": {"points": 3}})
    configs = sweep.expand()
    assert [c.resolved_label for c in configs] == [
        "single-chain-g0.1", "single-chain-g0.3", "two-chain-g0.1", "two-chain-g0.3",
    ]
    assert all(c.tau_grid.points == 3 for c in configs)
    assert SweepConfig(scenarios=["single-chain"]).expand() == []


def test_sweep_label_prefix():
    sweep = SweepConfig(scenarios=["two-chain"], gammas=[0.5], label_prefix="scan")
    assert [c.resolved_label for c in sweep.expand()] == ["scan-two-chain-g0.5"]
    assert SweepConfig(scenarios=["two-chain"], gammas=[0.5]).expand()[0].resolved_label == "two-chain-g0.5"


def test_sweep_base_must_not_set_reserved_fields():
    with pytest.raises(ValidationError):
        SweepConfig(scenarios=["single-chain"], gammas=[0.1], base={"gamma": 0.2})


def test_assertion_constructors():
    assert AssertionResult.below("x", 1e-9, 1e-8).passed
    assert not AssertionResult.below("x", 1e-7, 1e-8).passed
    assert AssertionResult.close_to("x", 1.0 + 1e-10, 1.0, 1e-9).passed
    assert AssertionResult.above("x", 12.0, 10.0).passed
    assert not AssertionResult.above("x", 10.0, 10.0).passed


def test_identity_report_clamps_negative_residual():
    report = IdentityReport.evaluate("shift b1", -1e-20, 1e-8, 6)
    assert report.residual_norm == 0.0 and report.passed


def test_persisted_report_drops_wall_clock():
    report = ScenarioReport(label="a", scenario="classical", status=ScenarioStatus.PASSED, wall_clock=1.5)
    data = report.persisted()
    assert "wall_clock" not in data
    assert data["status"] == "passed"


def test_coupling_k_axis_is_all_or_nothing():
    assert CouplingSpec().k_points is None
    assert CouplingSpec(k_min=0.1, k_max=2.0, k_points=50).k_points == 50
    with pytest.raises(ValidationError):
        CouplingSpec(k_min=0.1, k_points=50)
    with pytest.raises(ValidationError):
        CouplingSpec(k_min=2.0, k_max=0.1, k_points=50)


def test_kernels_only_import_app_config():
    for path in sorted((Path(__file__).parent.parent / "utils").glob("*.py")):
        tree = ast.parse(path.read_text(encoding="utf-8"))
        imported = [node.module for node in ast.walk(tree) if isinstance(node, ast.ImportFrom) and node.module]
        app_layer = [name for name in imported if name.startswith(("app.", "workers"))]
        assert set(app_layer) <= {"app.config"}, path.name
