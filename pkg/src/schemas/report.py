# src/schemas/report.py
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

from src.models.chebpoly import as_fraction


class CoefficientFile(BaseModel):
    """Chebyshev coefficients u_0..u_d in the standard convention, as "p/q" strings."""
    convention: str = Field(default="standard", description="coefficient convention")
    coefficients: List[str] = Field(..., min_length=1, description="exact coefficients, index 0 first")
    decimal: List[str] = Field(default_factory=list, description="decimal rendering")
    degree: Optional[int] = Field(default=None, description="requested degree")
    N_used: Optional[int] = Field(default=None, description="start index of the backward recurrence")
    retries: Optional[int] = Field(default=None, description="singular-system retries")
    error_bound: Optional[str] = Field(default=None, description="certified sup-norm error, when known")

    @field_validator("convention")
    @classmethod
    def _convention(cls, v):
        if v != "standard":
            raise ValueError(f"unsupported coefficient convention {v!r}")
        return v

    @field_validator("coefficients")
    @classmethod
    def _coefficients(cls, v):
        for c in v:
            as_fraction(c)
        return v


class ValidationReportFile(BaseModel):
    B: Optional[str] = Field(default=None, description="upper bound, absent when inconclusive")
    b: str
    A: str
    i: int = Field(..., ge=1)
    gamma_i: Optional[str] = None
    delta: str
    D: int
    epsilon: str
    exp_A: str
    kernel_source: str = "default"
    iterate_degree: int = 0
    decimal: Dict[str, str] = Field(default_factory=dict)
    timings: Dict[str, float] = Field(default_factory=dict)
    status: str = Field(default="certified", description="certified or inconclusive")


class SolveReportFile(BaseModel):
    problem: Optional[str] = None
    degree: int
    N_used: int
    retries: int
    singular_indices: List[int] = Field(default_factory=list)
    epsilon_source: str = Field(default="user", description="user or auto")
    validation: Optional[ValidationReportFile] = None
    timings: Dict[str, float] = Field(default_factory=dict)
    heuristics: Dict[str, str] = Field(
        default_factory=dict,
        description="uncertified estimates: tail_estimate, minimax_lower_estimate, near_minimax_factor",
    )
