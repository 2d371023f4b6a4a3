"""
Pydantic value types shared by every module.
Matrices are stored as read-only float64 numpy arrays.
"""

from enum import Enum
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from backend.app import config
from backend.app.exceptions import ConfigError, DomainError, StructuralError


def _frozen_array(value) -> np.ndarray:
    arr = np.array(value, dtype=float)
    arr.setflags(write=False)
    return arr


class Party(str, Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Party":
        return Party.B if self is Party.A else Party.A


class Direction(str, Enum):
    A_TO_B = "A->B"
    B_TO_A = "B->A"

    @property
    def steering(self) -> Party:
        return Party.A if self is Direction.A_TO_B else Party.B

    @property
    def steered(self) -> Party:
        return self.steering.other


class CovarianceMatrix(BaseModel):
    """
    Real symmetric 2(n+m) x 2(n+m) covariance matrix with an A|B mode partition.
    Quadratures are ordered (x_1, p_1, x_2, p_2, ...) with A's modes first;
    the vacuum CM is the identity.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray
    n_modes_a: int = Field(gt=0)
    n_modes_b: int = Field(gt=0)

    @field_validator("data", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        arr = np.array(value, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"covariance matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("covariance matrix has non-finite entries")
        return arr

    @model_validator(mode="after")
    def _check_partition(self):
        dim = 2 * (self.n_modes_a + self.n_modes_b)
        if self.data.shape != (dim, dim):
            raise ValueError(
                f"partition ({self.n_modes_a}, {self.n_modes_b}) needs a {dim}x{dim} matrix, got {self.data.shape}"
            )
        scale = max(1.0, float(np.max(np.abs(self.data))))
        asym = float(np.max(np.abs(self.data - self.data.T)))
        if asym > config.TOLERANCES["sym"] * scale:
            raise ValueError(f"covariance matrix is not symmetric (max |s - s^T| = {asym:.3e})")
        # Store the exactly symmetric part
        object.__setattr__(self, "data", _frozen_array((self.data + self.data.T) / 2))
        return self

    @classmethod
    def from_array(cls, matrix, n_modes_a: int, n_modes_b: int) -> "CovarianceMatrix":
        try:
            return cls(data=matrix, n_modes_a=n_modes_a, n_modes_b=n_modes_b)
        except ValidationError as e:
            raise StructuralError(str(e)) from e

    @property
    def n_modes(self) -> int:
        return self.n_modes_a + self.n_modes_b

    @property
    def dim(self) -> int:
        return 2 * self.n_modes

    @property
    def split(self) -> int:
        return 2 * self.n_modes_a

    @property
    def a_block(self) -> np.ndarray:
        return self.data[: self.split, : self.split]

    @property
    def b_block(self) -> np.ndarray:
        return self.data[self.split :, self.split :]

    @property
    def c_block(self) -> np.ndarray:
        return self.data[: self.split, self.split :]

    def block(self, party: Party) -> np.ndarray:
        return self.a_block if party is Party.A else self.b_block

    def modes(self, party: Party) -> int:
        return self.n_modes_a if party is Party.A else self.n_modes_b

    def to_json_dict(self) -> dict:
        return {"n_a": self.n_modes_a, "n_b": self.n_modes_b, "matrix": self.data.ravel().tolist()}


class SymplecticForm(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n_modes: int = Field(gt=0)

    @property
    def matrix(self) -> np.ndarray:
        return np.kron(np.eye(self.n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


class GaussianChannelDilation(BaseModel):
    """
    Gaussian channel realised as: attach an ancilla in state ancilla_cm,
    apply `symplectic` to (system, ancilla), trace the ancilla out.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    ancilla_cm: np.ndarray
    symplectic: np.ndarray

    @field_validator("ancilla_cm", "symplectic", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_dilation(self):
        from backend.app.services.symplectic import is_bona_fide_matrix, is_symplectic

        if self.ancilla_cm.ndim != 2 or self.ancilla_cm.shape[0] % 2 or self.ancilla_cm.shape[0] == 0:
            raise ValueError(f"ancilla CM has invalid shape {self.ancilla_cm.shape}")
        if not is_bona_fide_matrix(self.ancilla_cm):
            raise ValueError("ancilla CM violates the bona fide condition")
        if self.symplectic.ndim != 2 or self.symplectic.shape[0] != self.symplectic.shape[1]:
            raise ValueError(f"symplectic must be square, got shape {self.symplectic.shape}")
        if self.symplectic.shape[0] <= self.ancilla_cm.shape[0]:
            raise ValueError("symplectic leaves no room for system modes")
        if not is_symplectic(self.symplectic):
            raise ValueError("dilation matrix is not symplectic")
        return self

    @classmethod
    def build(cls, ancilla_cm, symplectic) -> "GaussianChannelDilation":
        try:
            return cls(ancilla_cm=ancilla_cm, symplectic=symplectic)
        except ValidationError as e:
            raise DomainError(str(e)) from e

    @property
    def ancilla_modes(self) -> int:
        return self.ancilla_cm.shape[0] // 2

    @property
    def system_modes(self) -> int:
        return self.symplectic.shape[0] // 2 - self.ancilla_modes


class MeasurementCM(BaseModel):
    """Seed CM T of a Gaussian (general-dyne) measurement on one party."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: np.ndarray

    @field_validator("t", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_physical(self):
        from backend.app.services.symplectic import is_bona_fide_matrix

        if self.t.ndim != 2 or self.t.shape[0] != self.t.shape[1] or self.t.shape[0] % 2:
            raise ValueError(f"measurement CM has invalid shape {self.t.shape}")
        if not is_bona_fide_matrix(self.t):
            raise ValueError("measurement CM violates T + i Omega >= 0")
        return self

    @classmethod
    def build(cls, t) -> "MeasurementCM":
        try:
            return cls(t=t)
        except ValidationError as e:
            raise DomainError(str(e)) from e

    @classmethod
    def heterodyne(cls, n_modes: int) -> "MeasurementCM":
        return cls.build(np.eye(2 * n_modes))

    @classmethod
    def homodyne(cls, n_modes: int, squeezing: float | None = None) -> "MeasurementCM":
        """x-quadrature homodyne as the finite-squeezing seed diag(t, 1/t) per mode."""
        t = config.HOMODYNE_SQUEEZING if squeezing is None else squeezing
        return cls.build(np.kron(np.eye(n_modes), np.diag([t, 1.0 / t])))

    @property
    def n_modes(self) -> int:
        return self.t.shape[0] // 2


class SteeringReport(BaseModel):
    g_a_to_b: float = Field(ge=0.0)
    g_b_to_a: float = Field(ge=0.0)
    nu_a: list[float]
    nu_b: list[float]
    steerable_a_to_b: bool
    steerable_b_to_a: bool
    reid_product_a: float
    reid_product_b: float
    # eigenvalues in [1 - tol, 1) contribute but are flagged
    marginal_a_to_b: bool = Field(default=False, exclude=True)
    marginal_b_to_a: bool = Field(default=False, exclude=True)

    def to_json(self) -> str:
        return self.model_dump_json()


class StandardFormParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    c: float
    d: float

    @model_validator(mode="after")
    def _check_params(self):
        tol = config.TOLERANCES["psd"]
        if self.a < 1.0 - tol or self.b < 1.0 - tol:
            raise ValueError(f"standard form needs a, b >= 1, got a={self.a}, b={self.b}")
        if self.c < abs(self.d) - tol * max(1.0, abs(self.c)):
            raise ValueError(f"convention c >= |d| violated: c={self.c}, d={self.d}")
        return self


class PurityProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu_a: float = Field(gt=0.0)
    mu_b: float = Field(gt=0.0)
    mu: float = Field(gt=0.0)
    eta: float = Field(gt=0.0)

    @classmethod
    def from_eta(cls, mu_a: float, mu_b: float, eta: float) -> "PurityProfile":
        return cls(mu_a=mu_a, mu_b=mu_b, mu=mu_a * mu_b / eta, eta=eta)


class Physicality(str, Enum):
    PHYSICAL = "physical"
    UNPHYSICAL = "unphysical"


class Separability(str, Enum):
    SEPARABLE = "separable"
    COEXISTENCE = "coexistence"
    ENTANGLED = "entangled"


class RegionLabel(BaseModel):
    physicality: Physicality
    separability: Optional[Separability] = None
    steer_a_to_b: bool = False
    steer_b_to_a: bool = False
    # state-level PPT resolution; only set when an actual CM was classified
    ppt_separable: Optional[bool] = None

    @model_validator(mode="after")
    def _unphysical_has_no_flags(self):
        if self.physicality is Physicality.UNPHYSICAL and (
            self.separability is not None or self.steer_a_to_b or self.steer_b_to_a
        ):
            raise ValueError("unphysical labels carry no other flags")
        return self


class EntanglementFlag(str, Enum):
    EXACT = "exact"
    EXACT_ASYMPTOTIC = "exact-asymptotic"
    BOUNDS_ONLY = "bounds-only"


class EntanglementEstimate(BaseModel):
    flag: EntanglementFlag
    value: Optional[float] = None
    lower: float
    upper: Optional[float] = None


class InequalityCheck(BaseModel):
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool


class BoundsCheck(BaseModel):
    g_a_to_b: float
    g_b_to_a: float
    asymmetry: float
    checks: list[InequalityCheck]
    defect: bool = False

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class KeyRateReport(BaseModel):
    direct: float = Field(ge=0.0)
    reverse: float = Field(ge=0.0)
    units: Literal["nats", "bits"] = "nats"


class SampleBatch(BaseModel):
    """Zero-mean phase-space samples, one row per sample."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    samples: np.ndarray
    seed: int
    count: int = Field(gt=0)
    n_modes_a: int = Field(gt=0)
    n_modes_b: int = Field(gt=0)

    @field_validator("samples", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_batch(self):
        dim = 2 * (self.n_modes_a + self.n_modes_b)
        if self.samples.shape != (self.count, dim):
            raise ValueError(f"expected samples of shape {(self.count, dim)}, got {self.samples.shape}")
        mean_norm = float(np.linalg.norm(self.samples.mean(axis=0)))
        trace = float(np.sum(self.samples**2) / self.count)
        if mean_norm > 5.0 * np.sqrt(trace / self.count):
            raise ValueError(f"sample mean norm {mean_norm:.3e} outside the zero-mean band")
        return self


class SuiteResult(BaseModel):
    name: str
    passed: bool
    checked: int = 0
    violations: int = 0
    max_deviation: float = 0.0
    detail: dict = Field(default_factory=dict)
    error: Optional[str] = None


class GridAxis(BaseModel):
    min: float
    max: float
    steps: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self):
        if self.max < self.min:
            raise ValueError(f"grid max {self.max} is below grid min {self.min}")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        try:
            lo, hi, steps = text.split(":")
            return cls(min=float(lo), max=float(hi), steps=int(steps))
        except (ValueError, ValidationError) as e:
            raise ConfigError(f"invalid grid '{text}', expected MIN:MAX:STEPS ({e})") from e

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)


class RunConfig(BaseModel):
    tolerances: dict[str, float] = Field(default_factory=dict)
    seed: int = 0
    output_path: Optional[Path] = None
    format: Literal["json", "csv"] = "json"
    eta: float = config.SCAN_PARAMS["eta"]
    mu_grid: GridAxis = GridAxis(
        min=config.SCAN_PARAMS["mu_grid"][0], max=config.SCAN_PARAMS["mu_grid"][1], steps=config.SCAN_PARAMS["mu_grid"][2]
    )
    s_grid: GridAxis = GridAxis(
        min=config.SCAN_PARAMS["s_grid"][0], max=config.SCAN_PARAMS["s_grid"][1], steps=config.SCAN_PARAMS["s_grid"][2]
    )
    a: float = config.SCAN_PARAMS["a"]
    samples: int = Field(default=100_000, gt=0)
    workers: int = Field(default=config.SAMPLING_PARAMS["workers"], gt=0)
    bits: bool = False
    suite_params: dict[str, dict] = Field(default_factory=dict)

    @field_validator("tolerances")
    @classmethod
    def _positive_tolerances(cls, value: dict[str, float]):
        for key, tol in value.items():
            if key not in config.TOLERANCES:
                raise ValueError(f"unknown tolerance '{key}'")
            if not tol > 0:
                raise ValueError(f"tolerance '{key}' must be positive, got {tol}")
        return value

    @classmethod
    def build(cls, **fields) -> "RunConfig":
        try:
            return cls(**fields)
        except ValidationError as e:
            raise ConfigError(str(e)) from e

    def suite(self, name: str) -> dict:
        """Suite parameters with per-run overrides applied."""
        return {**config.SUITE_PARAMS.get(name, {}), **self.suite_params.get(name, {})}
