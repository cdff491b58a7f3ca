# src/services/asymptotics.py
"""Newton polygon of a recurrence and the start-index heuristic of the solver.

Solutions of P u = 0 grow like n!^kappa alpha^n; the polygon slopes give kappa
and the roots of each edge's characteristic polynomial give alpha. Nothing here
is certified; the values only steer the choice of N.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.models.operators import RecOp
from src.services.chebrec import singularities
from src.utils.polynomials import poly_coeffs

logger = logging.getLogger(__name__)

UNIT_CIRCLE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PolygonEdge:
    slope: Fraction
    start: int
    end: int
    # chi(alpha) = sum_{k on edge} lc(b_k) alpha^(k - start), low-to-high
    chi: Tuple[Fraction, ...]

    @property
    def span(self) -> int:
        return self.end - self.start

    def roots(self) -> List[complex]:
        if self.span == 0:
            return []
        return [complex(z) for z in np.roots([float(c) for c in reversed(self.chi)])]


@dataclass(frozen=True)
class NewtonPolygon:
    edges: Tuple[PolygonEdge, ...]
    points: Tuple[Tuple[int, int], ...] = field(default=())

    def slopes(self) -> List[Fraction]:
        return [e.slope for e in self.edges]

    def total_degree(self) -> int:
        return sum(e.span for e in self.edges)

    def summary(self) -> List[dict]:
        out = []
        for e in self.edges:
            out.append({
                "slope": str(e.slope),
                "span": [e.start, e.end],
                "chi": [str(c) for c in e.chi],
                "root_moduli": sorted(abs(z) for z in e.roots()),
            })
        return out


@dataclass(frozen=True)
class GrowthRoot:
    kappa: Fraction
    alpha: complex

    @property
    def modulus(self) -> float:
        return abs(self.alpha)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(P: RecOp) -> NewtonPolygon:
    """Lower convex hull of the points (k, -deg b_k) with exact slopes."""
    degrees = P.degrees()
    points = sorted((k, -d) for k, d in degrees.items())
    hull: List[Tuple[int, int]] = []
    for p in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)

    edges = []
    for left, right in zip(hull, hull[1:]):
        slope = Fraction(right[1] - left[1], right[0] - left[0])
        chi = [Fraction(0)] * (right[0] - left[0] + 1)
        for k, h in points:
            if left[0] <= k <= right[0] and Fraction(h - left[1]) == slope * (k - left[0]):
                chi[k - left[0]] = poly_coeffs(P.b(k))[-1]
        edges.append(PolygonEdge(slope, left[0], right[0], tuple(chi)))
    return NewtonPolygon(tuple(edges), tuple(points))


def growth_roots(P: RecOp) -> List[GrowthRoot]:
    """All 2s growth germs ordered by (kappa, |alpha|); the first s are the convergent ones."""
    roots = []
    for edge in newton_polygon(P).edges:
        roots.extend(GrowthRoot(edge.slope, z) for z in edge.roots())
    roots.sort(key=lambda g: (g.kappa, g.modulus))
    return roots


def convergent_growth(P: RecOp) -> Optional[Tuple[Fraction, float]]:
    """(kappa_1, |alpha_1|) of the slowest decreasing convergent germ, or None when ambiguous."""
    if P.s == 0:
        return None
    roots = growth_roots(P)
    for g in roots:
        if g.kappa == 0 and abs(g.modulus - 1) < UNIT_CIRCLE_TOLERANCE:
            logger.warning(f"characteristic root {g.alpha} lies on the unit circle; N falls back to the default")
            return None
    if len(roots) < P.s:
        return None
    slowest = roots[P.s - 1]
    return slowest.kappa, slowest.modulus


def growth_log(kappa: Fraction, modulus: float, index: int) -> float:
    """log(index!^kappa * modulus^index)."""
    if modulus <= 0:
        return -math.inf
    return float(kappa) * math.lgamma(index + 1) + index * math.log(modulus)


def default_start_index(P: RecOp, d: int, singular: Sequence[int] = None) -> int:
    singular = singularities(P) if singular is None else singular
    return max([d] + list(singular)) + P.s


def log_of(eps) -> float:
    """Natural log of a positive float or rational, valid far below the double range."""
    if isinstance(eps, float):
        return math.log(eps)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"tolerance must be positive, got {eps}")
    return math.log(eps.numerator) - math.log(eps.denominator)


def _first_index_below(P: RecOp, d: int, log_eps: Optional[float], max_index: int) -> int:
    floor = default_start_index(P, d)
    if log_eps is None or log_eps >= 0:
        return floor
    growth = convergent_growth(P)
    if growth is None:
        return floor
    kappa, modulus = growth
    if kappa > 0 or (kappa == 0 and modulus >= 1):
        logger.warning(f"convergent germ does not decay (kappa={kappa}, |alpha|={modulus:.3g})")
        return floor
    N = floor
    while growth_log(kappa, modulus, N) > log_eps and N < max_index:
        N += 1
    logger.info(f"start index N = {N} (floor {floor}, kappa = {kappa}, |alpha| = {modulus:.6g})")
    return N


def choose_N(P: RecOp, d: int, eps=None, max_index: int = 100000) -> int:
    """Smallest N >= max(d, max S) + s with N!^kappa_1 |alpha_1|^N <= eps."""
    return _first_index_below(P, d, None if eps is None else log_of(eps), max_index)


def auto_log_target(P: RecOp, d: int) -> Optional[float]:
    """log of (d!^kappa_1 |alpha_1|^d)^2, or None without usable growth data."""
    growth = convergent_growth(P)
    if growth is None:
        return None
    return 2 * growth_log(growth[0], growth[1], d)


def choose_N_auto(P: RecOp, d: int, max_index: int = 100000) -> int:
    """choose_N at the squared size of the first neglected germ value."""
    return _first_index_below(P, d, auto_log_target(P, d), max_index)
