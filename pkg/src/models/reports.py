# src/models/reports.py
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

import mpmath

from src.models.chebpoly import ChebPoly, fraction_to_mpf
from src.utils.exceptions import InputError


def render(value: Fraction, digits: int = 6) -> str:
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(fraction_to_mpf(Fraction(value)), digits)


def _optional(value) -> Optional[Fraction]:
    return None if value is None else Fraction(value)


@dataclass
class SolveOutput:
    """Degree-d approximation produced by the backward-recurrence solver."""

    poly: ChebPoly
    N_used: int
    retries: int
    eta: Dict[int, Fraction]
    degree: int
    singular: List[int] = field(default_factory=list)
    tail_estimate: Fraction = Fraction(0)
    # untruncated symmetric-convention coefficients c_0..c_{N-1}, only with keep_full
    full: Optional[List[Fraction]] = None

    def __post_init__(self):
        if self.poly.degree > self.degree:
            raise InputError(f"approximation degree {self.poly.degree} exceeds requested {self.degree}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'degree': self.degree,
            'N_used': self.N_used,
            'retries': self.retries,
            'singular_indices': list(self.singular),
            'eta': {str(k): str(v) for k, v in self.eta.items()},
            'tail_estimate': render(self.tail_estimate),
        }


@dataclass
class ValidationReport:
    """Certified enclosure b <= ||y - p|| <= B and the parameters behind it.

    An inconclusive run has no contraction, so B and gamma_i are None and only b holds.
    """

    B: Optional[Fraction]
    b: Fraction
    A: Fraction
    i: int
    gamma_i: Optional[Fraction]
    delta: Fraction
    D: int
    epsilon: Fraction
    exp_A: Fraction = Fraction(1)
    kernel_source: str = "default"
    iterate_degree: int = 0
    timings: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.b < 0 or (self.B is not None and self.b > self.B):
            raise InputError(f"inconsistent enclosure [{self.b}, {self.B}]")
        if self.i < 1 or self.A < 0:
            raise InputError(f"invalid contraction parameters A={self.A}, i={self.i}")

    def to_dict(self, digits: int = 6) -> Dict[str, Any]:
        exact = {
            'B': self.B, 'b': self.b, 'A': self.A, 'gamma_i': self.gamma_i,
            'delta': self.delta, 'epsilon': self.epsilon, 'exp_A': self.exp_A,
        }
        data: Dict[str, Any] = {k: None if v is None else str(v) for k, v in exact.items()}
        data['decimal'] = {k: render(v, digits) for k, v in exact.items() if v is not None}
        data.update({
            'i': self.i,
            'D': self.D,
            'kernel_source': self.kernel_source,
            'iterate_degree': self.iterate_degree,
            'timings': dict(self.timings),
        })
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ValidationReport":
        return cls(
            B=_optional(data.get('B')), b=Fraction(data['b']), A=Fraction(data['A']),
            i=int(data['i']), gamma_i=_optional(data.get('gamma_i')), delta=Fraction(data['delta']),
            D=int(data['D']), epsilon=Fraction(data['epsilon']),
            exp_A=Fraction(data.get('exp_A', 1)),
            kernel_source=data.get('kernel_source', 'default'),
            iterate_degree=int(data.get('iterate_degree', 0)),
            timings=dict(data.get('timings', {})),
        )
