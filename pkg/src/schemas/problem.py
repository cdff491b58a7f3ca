# src/schemas/problem.py
from typing import List, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from src.models.chebpoly import as_fraction

Rational = Union[str, int]


def _check_rationals(values):
    for value in values:
        as_fraction(value)


class TermSpec(BaseModel):
    """One term mu * y^(order)(point) of a linear condition."""
    weight: Rational = Field(default="1", description="weight mu")
    order: int = Field(..., ge=0, description="derivative order")
    point: Rational = Field(..., description="evaluation point")

    @field_validator("weight", "point")
    @classmethod
    def _rational(cls, v):
        _check_rationals([v])
        return v


class ConditionSpec(BaseModel):
    terms: List[TermSpec] = Field(..., min_length=1, description="terms of the condition")
    target: Rational = Field(..., description="right-hand side")

    @field_validator("target")
    @classmethod
    def _target(cls, v):
        _check_rationals([v])
        return v


class ProblemSpec(BaseModel):
    """Problem file: operator a_0..a_r (monomial, low-to-high) plus conditions."""
    name: Optional[str] = Field(default=None, description="problem name")
    description: Optional[str] = Field(default=None, description="free text")
    operator: List[List[Rational]] = Field(..., min_length=2, description="coefficients a_0..a_r")
    conditions: Optional[List[ConditionSpec]] = Field(default=None, description="general linear conditions")
    initial_values: Optional[List[Rational]] = Field(default=None, description="shorthand for y(0), y'(0), ...")
    interval: List[Rational] = Field(default_factory=lambda: ["-1", "1"], description="interval [a, b]")
    reference: Optional[str] = Field(default=None, description="closed-form solution as an mpmath expression in x")

    @field_validator("operator")
    @classmethod
    def _operator(cls, v):
        for coeffs in v:
            if not coeffs:
                raise ValueError("every operator coefficient needs at least one entry")
            _check_rationals(coeffs)
        return v

    @field_validator("initial_values", "interval")
    @classmethod
    def _rationals(cls, v):
        if v is not None:
            _check_rationals(v)
        return v

    @model_validator(mode="after")
    def _conditions(self):
        if (self.conditions is None) == (self.initial_values is None):
            raise ValueError("give exactly one of 'conditions' or 'initial_values'")
        if len(self.interval) != 2:
            raise ValueError("interval must have two endpoints")
        return self
