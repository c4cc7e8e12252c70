"""Null hypothesis parameter sets: closed convex subsets of the unit square.

Supported shapes: the equality diagonal, straight lines theta_b = s + c*theta_a,
the half-planes on either side of such a line, and the one-sided log-odds-ratio
regions.  Construction validates that the set meets the interior of the square,
which the projection theory requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .model import ThetaPair, log_odds_ratio

__all__ = ["NullKind", "NullSpec"]


class NullKind(Enum):
    EQUALITY = "equality"
    LINE = "line"
    HALFPLANE_LE = "halfplane-le"
    HALFPLANE_GE = "halfplane-ge"
    LOG_ODDS_LE = "log-odds-le"
    LOG_ODDS_GE = "log-odds-ge"


def _line_segment(s: float, c: float) -> tuple[float, float]:
    """Open interval of theta_a values for which (theta_a, s + c*theta_a) is interior."""
    if c > 0.0:
        lo, hi = max(0.0, -s / c), min(1.0, (1.0 - s) / c)
    elif c < 0.0:
        lo, hi = max(0.0, (1.0 - s) / c), min(1.0, -s / c)
    else:
        lo, hi = (0.0, 1.0) if 0.0 < s < 1.0 else (0.0, 0.0)
    return lo, hi


@dataclass(frozen=True)
class NullSpec:
    """A closed convex null set of (theta_a, theta_b) pairs.

    Line and half-plane variants use the boundary line theta_b = s + c*theta_a;
    log-odds variants use the bound delta on log_odds_ratio(theta_a, theta_b).
    Unused parameters are kept at 0 so instances compare and hash cleanly.
    """

    kind: NullKind
    s: float = 0.0
    c: float = 0.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.kind in (NullKind.LINE, NullKind.HALFPLANE_LE, NullKind.HALFPLANE_GE):
            if not (math.isfinite(self.s) and math.isfinite(self.c)):
                raise ValueError(f"line parameters must be finite, got s={self.s!r}, c={self.c!r}")
            lo, hi = _line_segment(self.s, self.c)
            if not lo < hi:
                raise ValueError(
                    f"the line theta_b = {self.s} + {self.c}*theta_a does not pass through "
                    "the interior of the unit square"
                )
        elif self.kind in (NullKind.LOG_ODDS_LE, NullKind.LOG_ODDS_GE):
            if not math.isfinite(self.delta):
                raise ValueError(f"delta must be finite, got {self.delta!r}")
            if self.kind is NullKind.LOG_ODDS_LE and self.delta < 0.0:
                raise ValueError(
                    f"log-odds-le needs delta >= 0 (the set is not convex below), got {self.delta!r}"
                )
            if self.kind is NullKind.LOG_ODDS_GE and self.delta > 0.0:
                raise ValueError(
                    f"log-odds-ge needs delta <= 0 (the set is not convex above), got {self.delta!r}"
                )

    @classmethod
    def equality(cls) -> NullSpec:
        """The diagonal theta_a == theta_b."""
        return cls(NullKind.EQUALITY)

    @classmethod
    def line(cls, s: float, c: float) -> NullSpec:
        """The line theta_b = s + c*theta_a (within the unit square)."""
        return cls(NullKind.LINE, s=float(s), c=float(c))

    @classmethod
    def halfplane_le(cls, s: float, c: float) -> NullSpec:
        """All points with theta_b <= s + c*theta_a."""
        return cls(NullKind.HALFPLANE_LE, s=float(s), c=float(c))

    @classmethod
    def halfplane_ge(cls, s: float, c: float) -> NullSpec:
        """All points with theta_b >= s + c*theta_a."""
        return cls(NullKind.HALFPLANE_GE, s=float(s), c=float(c))

    @classmethod
    def log_odds_le(cls, delta: float) -> NullSpec:
        """All points with log odds ratio <= delta; requires delta >= 0 for convexity."""
        return cls(NullKind.LOG_ODDS_LE, delta=float(delta))

    @classmethod
    def log_odds_ge(cls, delta: float) -> NullSpec:
        """All points with log odds ratio >= delta; requires delta <= 0 for convexity."""
        return cls(NullKind.LOG_ODDS_GE, delta=float(delta))

    def line_segment(self) -> tuple[float, float]:
        """Open theta_a interval of the interior part of the boundary line/curve."""
        if self.kind is NullKind.EQUALITY:
            return 0.0, 1.0
        if self.kind in (NullKind.LINE, NullKind.HALFPLANE_LE, NullKind.HALFPLANE_GE):
            return _line_segment(self.s, self.c)
        return 0.0, 1.0

    def boundary_theta_b(self, theta_a: float) -> float:
        """theta_b of the boundary point above theta_a (theta_a must be interior)."""
        if self.kind is NullKind.EQUALITY:
            return theta_a
        if self.kind in (NullKind.LINE, NullKind.HALFPLANE_LE, NullKind.HALFPLANE_GE):
            return self.s + self.c * theta_a
        x = math.log(theta_a) - math.log(1.0 - theta_a)
        return 1.0 / (1.0 + math.exp(-(x + self.delta)))

    def contains(self, theta: ThetaPair) -> bool:
        """Closed-set membership.

        Line membership is exact arithmetic (the line has measure zero, but
        exactly representable cases such as theta_a == theta_b on the s=0, c=1
        line do occur and must short-circuit).  For the log-odds sets the
        corners (0,0) and (1,1) belong to the closure of every boundary curve
        and are therefore members for every delta.
        """
        ta, tb = theta.theta_a, theta.theta_b
        if self.kind is NullKind.EQUALITY:
            return ta == tb
        if self.kind is NullKind.LINE:
            return self.s + self.c * ta == tb
        if self.kind is NullKind.HALFPLANE_LE:
            return tb <= self.s + self.c * ta
        if self.kind is NullKind.HALFPLANE_GE:
            return tb >= self.s + self.c * ta
        if (ta, tb) in ((0.0, 0.0), (1.0, 1.0)):
            return True
        lor = log_odds_ratio(ta, tb)
        if self.kind is NullKind.LOG_ODDS_LE:
            return lor <= self.delta
        return lor >= self.delta

    def describe(self) -> str:
        if self.kind is NullKind.EQUALITY:
            return "theta_a = theta_b"
        if self.kind is NullKind.LINE:
            return f"theta_b = {self.s} + {self.c}*theta_a"
        if self.kind is NullKind.HALFPLANE_LE:
            return f"theta_b <= {self.s} + {self.c}*theta_a"
        if self.kind is NullKind.HALFPLANE_GE:
            return f"theta_b >= {self.s} + {self.c}*theta_a"
        op = "<=" if self.kind is NullKind.LOG_ODDS_LE else ">="
        return f"log-odds-ratio {op} {self.delta}"
