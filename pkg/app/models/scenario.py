from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Optional, List, Dict, Any, Literal
from enum import Enum

from utils.state_utils import SqueezeParam


class ScenarioType(str, Enum):
    """Enum for scenario types"""
    SINGLE_CHAIN = "single-chain"
    UNRUH_MINKOWSKI = "unruh-minkowski"
    TWO_CHAIN = "two-chain"
    DUALITY = "duality"
    CAVITY_TOY = "cavity-toy"
    IDENTITIES = "identities"
    CLASSICAL = "classical"
    COUPLING = "coupling"

    @property
    def needs_squeezing(self) -> bool:
        """Scenarios evolving a quantum state need exactly one of gamma/omega"""
        return self not in (ScenarioType.IDENTITIES, ScenarioType.CLASSICAL, ScenarioType.COUPLING)

    @property
    def chains(self) -> int:
        return 1 if self in (ScenarioType.SINGLE_CHAIN, ScenarioType.UNRUH_MINKOWSKI) else 2


class TauGridSpec(BaseModel):
    """Rindler-time grid: `points` samples over [0, g_tau_max / g], or explicit values"""
    points: int = Field(default=65, ge=2, description="Number of samples")
    g_tau_max: Optional[float] = Field(default=None, gt=0.0, description="Largest g*tau (default: one period of the state)")
    values: Optional[List[float]] = Field(default=None, min_length=1, description="Explicit tau values, overriding points")

    model_config = {"extra": "forbid"}

    @field_validator("values")
    @classmethod
    def _non_negative(cls, values):
        if values is not None and any(v < 0.0 for v in values):
            raise ValueError("tau values must be non-negative")
        return values


class ToleranceSpec(BaseModel):
    """Base tolerances; truncation leakage is added to each where a truncated state is involved"""
    oracle: float = Field(default=1e-8, gt=0.0, description="Closed form vs. exact evolution")
    frame: float = Field(default=1e-7, gt=0.0, description="Constructions through Bogoliubov frames")
    identity: float = Field(default=1e-8, gt=0.0, description="Operator/state identity residuals")
    tail: float = Field(default=1e-12, gt=0.0, lt=1.0, description="Tail weight the cutoff policy leaves out")
    periodicity: float = Field(default=1e-9, gt=0.0, description="State after one period vs. initial state")

    model_config = {"extra": "forbid"}


class ClassicalScanSpec(BaseModel):
    """Parameters of the classical chain/field mode pair"""
    omega: float = Field(default=1.0, gt=0.0, description="Oscillator frequency")
    epsilon: float = Field(default=0.1, ge=0.0, description="Coupling strength")
    c: float = Field(default=1.0, gt=0.0, description="Speed of light")
    k_check: float = Field(default=1.0, gt=0.0, description="Wavenumber of the dispersion check against the ODE oracle")
    k_min: float = Field(default=0.5, gt=0.0, description="Scan start")
    k_max: float = Field(default=1.5, gt=0.0, description="Scan end")
    points: int = Field(default=101, ge=2, description="Scan points")
    dt: float = Field(default=1e-3, gt=0.0, description="RK4 step")
    dispersion_tol: float = Field(default=1e-4, gt=0.0, description="Normal frequencies vs. spectral peaks")
    rabi_tol: float = Field(default=1e-3, gt=0.0, description="Resonant |psi|^2 vs. sin^2(eps tau / 2)")
    min_peak_ratio: float = Field(default=15.0, gt=0.0, description="Resonant over far-detuned amplitude")
    far_k: float = Field(default=1.5, gt=0.0, description="kc/omega of the far-detuned comparison")

    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def _ordered(self):
        if self.k_max <= self.k_min:
            raise ValueError("k_max must exceed k_min")
        return self


class CouplingSpec(BaseModel):
    """Uniform chains whose collective coupling to right-moving Rindler modes is tabulated"""
    sizes: List[int] = Field(default_factory=lambda: [16, 64, 256], min_length=1, description="Chain lengths M")
    spacing: float = Field(default=1.0, gt=0.0, description="Co-moving spacing of the oscillators")
    a: float = Field(default=1.0, gt=0.0, description="Proper acceleration at z-bar = 0")
    c: float = Field(default=1.0, gt=0.0, description="Speed of light")
    omegas: List[float] = Field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0, 2.5, 3.0], min_length=1,
                                description="Rindler frequencies")
    k_min: Optional[float] = Field(default=None, description="Start of a uniform k axis (default: the resonant wavenumbers)")
    k_max: Optional[float] = Field(default=None, description="End of the uniform k axis")
    k_points: Optional[int] = Field(default=None, ge=2, description="Points of the uniform k axis")
    min_dominance: float = Field(default=10.0, gt=0.0,
                                 description="Required dominance for chains of at least table_size; a dense k axis saturates near 4.6")
    table_size: int = Field(default=64, ge=1, description="Chain length whose |S| table becomes the time series")
    phase_tol: float = Field(default=1e-9, gt=0.0, description="Worldline phase fit tolerance")

    model_config = {"extra": "forbid"}

    @field_validator("sizes")
    @classmethod
    def _positive_sizes(cls, sizes):
        if any(m < 1 for m in sizes):
            raise ValueError("chain sizes must be positive")
        return sizes

    @field_validator("omegas")
    @classmethod
    def _positive_omegas(cls, omegas):
        if any(w <= 0.0 for w in omegas):
            raise ValueError("Rindler frequencies must be positive")
        return omegas

    @model_validator(mode="after")
    def _k_axis(self):
        axis = (self.k_min, self.k_max, self.k_points)
        if any(v is None for v in axis) and any(v is not None for v in axis):
            raise ValueError("k_min, k_max and k_points must be given together")
        if self.k_min is not None and self.k_max <= self.k_min:
            raise ValueError("k_max must exceed k_min")
        return self


class ScenarioConfig(BaseModel):
    """One scenario run, read from a JSON file"""
    schema_version: Literal[1] = Field(default=1, description="Config format version")
    scenario: ScenarioType = Field(..., description="Scenario type")
    label: Optional[str] = Field(default=None, min_length=1, description="Output name (default: derived from scenario and gamma)")
    gamma: Optional[float] = Field(default=None, gt=-1.0, lt=1.0, description="Squeezing parameter")
    omega_rindler: Optional[float] = Field(default=None, alias="omega", gt=0.0, description="Rindler frequency, gamma = exp(-pi*omega)")
    g: float = Field(default=1.0, description="Chain/field coupling")
    tau_grid: TauGridSpec = Field(default_factory=TauGridSpec)
    cutoff: Optional[int] = Field(default=None, ge=1, description="Per-mode Fock cutoff override")
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)
    identity_cutoffs: List[int] = Field(default_factory=lambda: [6, 8, 10, 12], min_length=1, description="Cutoffs of the identity suite")
    classical: ClassicalScanSpec = Field(default_factory=ClassicalScanSpec)
    coupling: CouplingSpec = Field(default_factory=CouplingSpec)
    max_dimension: Optional[int] = Field(default=None, ge=1, description="Dimension budget override")

    model_config = {
        "extra": "forbid",
        "populate_by_name": True,
        "json_schema_extra": {
            "example": {
                "schema_version": 1,
                "scenario": "single-chain",
                "label": "single-chain-g0.5",
                "gamma": 0.5,
                "g": 1.0,
                "tau_grid": {"points": 65},
                "tolerances": {"oracle": 1e-8}
            }
        }
    }

    @model_validator(mode="after")
    def _check_squeezing(self):
        if self.g == 0.0:
            raise ValueError("g must be non-zero")
        if self.gamma is not None and self.omega_rindler is not None:
            raise ValueError("Give exactly one of 'gamma' or 'omega', not both")
        if self.scenario.needs_squeezing and self.gamma is None and self.omega_rindler is None:
            raise ValueError(f"Scenario '{self.scenario.value}' needs 'gamma' or 'omega'")
        return self

    @property
    def squeeze(self) -> SqueezeParam:
        """SqueezeParam of the config (gamma 0.5 for scenarios that do not require one)"""
        if self.omega_rindler is not None:
            return SqueezeParam.from_omega(self.omega_rindler)
        return SqueezeParam.from_gamma(0.5 if self.gamma is None else self.gamma)

    @property
    def resolved_label(self) -> str:
        if self.label:
            return self.label
        if self.gamma is not None:
            return f"{self.scenario.value}-g{self.gamma:g}"
        if self.omega_rindler is not None:
            return f"{self.scenario.value}-w{self.omega_rindler:g}"
        return self.scenario.value


class SweepConfig(BaseModel):
    """Cartesian product of scenario types and squeezing values sharing one base config"""
    schema_version: Literal[1] = Field(default=1, description="Config format version")
    scenarios: List[ScenarioType] = Field(..., description="Scenario types, in run order")
    gammas: List[float] = Field(default_factory=list, description="Squeezing values")
    base: Dict[str, Any] = Field(default_factory=dict, description="Fields shared by every expanded ScenarioConfig")
    label_prefix: Optional[str] = Field(default=None, min_length=1, description="Prepended to every expanded label as <prefix>-")

    model_config = {
        "extra": "forbid",
        "json_schema_extra": {
            "example": {
                "schema_version": 1,
                "scenarios": ["single-chain", "two-chain"],
                "gammas": [0.1, 0.3, 0.5, 0.7],
                "base": {"g": 1.0, "tau_grid": {"points": 33}}
            }
        }
    }

    @field_validator("base")
    @classmethod
    def _base_fields(cls, base):
        reserved = {"scenario", "gamma", "omega", "omega_rindler", "label"} & set(base)
        if reserved:
            raise ValueError(f"Sweep base must not set {sorted(reserved)}")
        return base

    def _label(self, scenario: ScenarioType, gamma: float) -> str:
        label = f"{scenario.value}-g{gamma:g}"
        return f"{self.label_prefix}-{label}" if self.label_prefix else label

    def expand(self) -> List[ScenarioConfig]:
        """One ScenarioConfig per (scenario, gamma), scenarios outermost"""
        return [
            ScenarioConfig(**self.base, scenario=scenario, gamma=gamma, label=self._label(scenario, gamma))
            for scenario in self.scenarios
            for gamma in self.gammas
        ]
