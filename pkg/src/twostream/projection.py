"""Reverse information projection: the KL minimizer theta-circle over a convex null.

For a point alternative strictly inside the unit square and a convex null set,
the minimizer of the block KL divergence over the null is unique and interior.
When the alternative belongs to the null the projection is the alternative
itself; otherwise it sits on the null's boundary and is found numerically:
lines by bisection on the stationarity equation, log-odds curves by
golden-section search after three-point bracketing.  A brute-force grid oracle
is provided for verification and never used on the hot path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import BlockDesign, ThetaPair, kl_block
from .nulls import NullKind, NullSpec

__all__ = [
    "Projection",
    "project",
    "project_equality",
    "project_line",
    "project_halfplane",
    "project_log_odds",
    "grid_oracle_project",
    "line_stationarity",
]

_GOLDEN_TOL = 1e-10
_GOLDEN_EDGE = 1e-9
_BRACKET_POINTS = 65
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Projection:
    """Result of a projection: the minimizer, its block KL value, and whether
    the alternative was already a member of the null (in which case the
    minimizer is the alternative and the KL is exactly 0)."""

    theta: ThetaPair
    kl: float
    interior_hit: bool


def _require_interior(star: ThetaPair) -> None:
    if not star.interior:
        raise ValueError(f"the alternative must lie strictly inside (0,1)^2, got {star}")


def project(null: NullSpec, star: ThetaPair, design: BlockDesign) -> Projection:
    """Dispatch to the projection routine for the null's shape."""
    if null.kind is NullKind.EQUALITY:
        return project_equality(star, design)
    if null.kind is NullKind.LINE:
        return project_line(null.s, null.c, star, design)
    if null.kind in (NullKind.HALFPLANE_LE, NullKind.HALFPLANE_GE):
        return project_halfplane(null, star, design)
    return project_log_odds(null, star, design)


def project_equality(star: ThetaPair, design: BlockDesign) -> Projection:
    """Closed form: both components equal (n_a*theta_a + n_b*theta_b)/n."""
    _require_interior(star)
    if star.theta_a == star.theta_b:
        return Projection(star, 0.0, True)
    t = (design.n_a * star.theta_a + design.n_b * star.theta_b) / design.n
    theta = ThetaPair(t, t)
    return Projection(theta, kl_block(star, theta, design), False)


def line_stationarity(
    s: float, c: float, star: ThetaPair, design: BlockDesign, theta_a: float
) -> float:
    """Value of the line-constrained KL derivative at theta_a (0 at the projection)."""
    tb = s + c * theta_a
    return design.n_a * (
        -star.theta_a / theta_a + (1.0 - star.theta_a) / (1.0 - theta_a)
    ) + design.n_b * c * (-star.theta_b / tb + (1.0 - star.theta_b) / (1.0 - tb))


def project_line(s: float, c: float, star: ThetaPair, design: BlockDesign) -> Projection:
    """Projection onto the line theta_b = s + c*theta_a.

    The unique root of the stationarity equation on the admissible open
    segment is found by bisection to well below 1e-12 absolute on theta_a.
    A horizontal line (c == 0) pins theta_b = s and leaves theta_a at the
    alternative's value.
    """
    null = NullSpec.line(s, c)
    _require_interior(star)
    if null.contains(star):
        return Projection(star, 0.0, True)
    if c == 0.0:
        theta = ThetaPair(star.theta_a, s)
        return Projection(theta, kl_block(star, theta, design), False)
    root = kernels.project_line_root(s, c, star.theta_a, star.theta_b, design.n_a, design.n_b)
    tb = s + c * root
    lo, hi = null.line_segment()
    if not (lo < root < hi and 0.0 < tb < 1.0):
        raise RuntimeError(
            "line projection escaped the admissible segment "
            f"(s={s}, c={c}, star={star}, root={root}, segment=({lo}, {hi}))"
        )
    theta = ThetaPair(root, tb)
    return Projection(theta, kl_block(star, theta, design), False)


def project_halfplane(null: NullSpec, star: ThetaPair, design: BlockDesign) -> Projection:
    """Projection onto a closed half-plane: the alternative itself when it is a
    member, otherwise the projection onto the boundary line."""
    if null.kind not in (NullKind.HALFPLANE_LE, NullKind.HALFPLANE_GE):
        raise ValueError(f"expected a half-plane null, got {null.kind}")
    _require_interior(star)
    if null.contains(star):
        return Projection(star, 0.0, True)
    result = project_line(null.s, null.c, star, design)
    return Projection(result.theta, result.kl, False)


def _logit(t: float) -> float:
    return math.log(t) - math.log(1.0 - t)


def _sigma(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def project_log_odds(null: NullSpec, star: ThetaPair, design: BlockDesign) -> Projection:
    """Projection onto a one-sided log-odds-ratio region.

    Non-member alternatives project onto the boundary curve
    logit(theta_b) = logit(theta_a) + delta.  The curve KL is minimized over
    theta_a by golden-section search after three-point bracketing on a
    logit-spaced scan of (1e-9, 1-1e-9); the result must beat both bracket
    endpoints, which the strictly quasiconvex curve profile guarantees.
    """
    if null.kind not in (NullKind.LOG_ODDS_LE, NullKind.LOG_ODDS_GE):
        raise ValueError(f"expected a log-odds null, got {null.kind}")
    _require_interior(star)
    if null.contains(star):
        return Projection(star, 0.0, True)
    delta = null.delta
    sa, sb = star.theta_a, star.theta_b
    na, nb = design.n_a, design.n_b

    def phi(ta: float) -> float:
        tb = _sigma(_logit(ta) + delta)
        return kernels.kl_block_counts(sa, sb, ta, tb, na, nb)

    edge_lo, edge_hi = _GOLDEN_EDGE, 1.0 - _GOLDEN_EDGE
    xs = np.linspace(_logit(edge_lo), _logit(edge_hi), _BRACKET_POINTS)
    ts = [1.0 / (1.0 + math.exp(-x)) for x in xs]
    vals = [phi(t) for t in ts]
    i = min(range(len(ts)), key=vals.__getitem__)
    a = ts[i - 1] if i > 0 else edge_lo
    b = ts[i + 1] if i + 1 < len(ts) else edge_hi
    phi_a, phi_b = phi(a), phi(b)

    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = phi(x1), phi(x2)
    while b - a > _GOLDEN_TOL:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = phi(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = phi(x2)
    ta = 0.5 * (a + b)
    val = phi(ta)
    slack = 1e-9 * (1.0 + abs(val))
    if val > min(phi_a, phi_b) + slack:
        raise RuntimeError(
            "golden-section result does not beat its bracket "
            f"(delta={delta}, star={star}, bracket=({a}, {b}), "
            f"phi={val}, endpoints=({phi_a}, {phi_b}))"
        )
    theta = ThetaPair(ta, _sigma(_logit(ta) + delta))
    return Projection(theta, kl_block(star, theta, design), False)


def grid_oracle_project(
    null: NullSpec, star: ThetaPair, design: BlockDesign, step: float
) -> Projection:
    """Brute-force verification oracle: exhaustive scan of the null boundary.

    Walks theta_a over a uniform grid of the given step along the boundary
    parametrization and returns the minimal-KL point.  Independent of the
    bisection/golden-section machinery; intended for tests only.
    """
    if not 0.0 < step <= 0.01:
        raise ValueError(f"step must lie in (0, 0.01], got {step!r}")
    _require_interior(star)
    if null.contains(star):
        return Projection(star, 0.0, True)

    lo, hi = null.line_segment()
    ta = np.arange(lo + step, hi, step)
    if ta.size == 0:
        ta = np.array([0.5 * (lo + hi)])
    if null.kind in (NullKind.LINE, NullKind.HALFPLANE_LE, NullKind.HALFPLANE_GE):
        tb = null.s + null.c * ta
    elif null.kind is NullKind.EQUALITY:
        tb = ta
    else:
        tb = 1.0 / (1.0 + np.exp(-(np.log(ta / (1.0 - ta)) + null.delta)))

    sa, sb = star.theta_a, star.theta_b
    kl = np.zeros_like(ta)
    if sa > 0.0:
        kl += design.n_a * sa * np.log(sa / ta)
    if sa < 1.0:
        kl += design.n_a * (1.0 - sa) * np.log((1.0 - sa) / (1.0 - ta))
    if sb > 0.0:
        kl += design.n_b * sb * np.log(sb / tb)
    if sb < 1.0:
        kl += design.n_b * (1.0 - sb) * np.log((1.0 - sb) / (1.0 - tb))
    i = int(np.argmin(kl))
    theta = ThetaPair(float(ta[i]), float(tb[i]))
    return Projection(theta, float(kl[i]), False)
