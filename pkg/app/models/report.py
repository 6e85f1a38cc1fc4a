from pydantic import BaseModel, Field
from typing import Optional, List, Dict, Any
from enum import Enum

from utils.identity_utils import IdentityReport


class ScenarioStatus(str, Enum):
    """Enum for scenario outcomes"""
    PASSED = "passed"
    FAILED = "failed"
    REFUSED = "refused"
    ERROR = "error"


class AssertionResult(BaseModel):
    """One checked property: measured value against its tolerance"""
    name: str = Field(..., description="Short name of the checked property")
    measured: float = Field(..., description="Measured value (residual, overlap deficit, ratio, ...)")
    expected: Optional[float] = Field(default=None, description="Reference value, when the check compares against one")
    tolerance: float = Field(..., ge=0.0, description="Bound the measured value was held to, leakage included")
    passed: bool = Field(..., description="Whether the property holds within tolerance")
    source: str = Field(default="", description="Kernel module the property belongs to")

    model_config = {
        "json_schema_extra": {
            "example": {
                "name": "oracle overlap deficit",
                "measured": 3.1e-13,
                "expected": 0.0,
                "tolerance": 1.0e-8,
                "passed": True,
                "source": "closedform"
            }
        }
    }

    @classmethod
    def below(cls, name: str, measured: float, tolerance: float, source: str = "", expected: Optional[float] = None) -> "AssertionResult":
        """Passes when measured <= tolerance"""
        return cls(name=name, measured=float(measured), expected=expected, tolerance=float(tolerance),
                   passed=bool(measured <= tolerance), source=source)

    @classmethod
    def close_to(cls, name: str, measured: float, expected: float, tolerance: float, source: str = "") -> "AssertionResult":
        """Passes when |measured - expected| <= tolerance"""
        return cls(name=name, measured=float(measured), expected=float(expected), tolerance=float(tolerance),
                   passed=bool(abs(measured - expected) <= tolerance), source=source)

    @classmethod
    def above(cls, name: str, measured: float, threshold: float, source: str = "") -> "AssertionResult":
        """Passes when measured > threshold; the threshold is stored as tolerance"""
        return cls(name=name, measured=float(measured), expected=None, tolerance=float(threshold),
                   passed=bool(measured > threshold), source=source)


class ScenarioReport(BaseModel):
    """Outcome of one scenario run"""
    label: str = Field(..., description="Scenario label, used for output file names")
    scenario: str = Field(..., description="Scenario type")
    status: ScenarioStatus = Field(..., description="Overall outcome")
    parameters: Dict[str, Any] = Field(default_factory=dict, description="Resolved run parameters")
    columns: List[str] = Field(default_factory=list, description="Time-series column names")
    time_series: List[List[float]] = Field(default_factory=list, description="Time-series rows in column order")
    assertions: List[AssertionResult] = Field(default_factory=list, description="Checked properties")
    identities: List[IdentityReport] = Field(default_factory=list, description="Identity residuals, when run")
    leakage_budget: float = Field(default=0.0, ge=0.0, description="Largest truncation leakage entering a tolerance")
    cutoff: Optional[int] = Field(default=None, description="Per-mode Fock cutoff used")
    dimension: Optional[int] = Field(default=None, description="Hilbert-space dimension of the register")
    required_dimension: Optional[int] = Field(default=None, description="Dimension a refused run would have needed")
    error: Optional[str] = Field(default=None, description="Refusal or error message")
    wall_clock: Optional[float] = Field(default=None, description="Run time in seconds (not persisted)")

    model_config = {
        "json_schema_extra": {
            "example": {
                "label": "single-chain-g0.5",
                "scenario": "single-chain",
                "status": "passed",
                "parameters": {"gamma": 0.5, "g": 1.0},
                "columns": ["tau", "g_tau", "overlap", "n_sigma", "n_b1", "entropy_field", "entropy_chains", "leakage"],
                "time_series": [],
                "assertions": [],
                "identities": [],
                "leakage_budget": 1.0e-13,
                "cutoff": 20,
                "dimension": 9261
            }
        }
    }

    @property
    def passed(self) -> bool:
        return self.status == ScenarioStatus.PASSED

    def persisted(self) -> Dict[str, Any]:
        """JSON-ready dict without wall-clock time, so repeated runs write identical files"""
        return self.model_dump(mode="json", exclude={"wall_clock"})
