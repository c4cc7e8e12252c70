"""Pure-Python fallback for the hot numerical kernels.

Mirrors the compiled extension twostream._kernels function for function, with
identical algorithms and iteration counts, so the two backends agree to
floating-point roundoff.  Scalar paths use plain Python arithmetic; the
per-grid-point paths run the same fixed-iteration bisections in lockstep over
numpy arrays.

Kernels assume validated inputs (callers enforce the public contracts):
plug-in probabilities strictly inside (0, 1), line parameters whose boundary
segment meets the interior of the unit square, and finite log-odds bounds.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

# 48 halvings of a bracket of width <= 1 end below 4e-15, well under the
# 1e-12 tolerance the projection contract asks for.
LINE_BISECT_ITERS = 48
# The log-odds stationarity root is bracketed in logit space on [-40, 40];
# 60 halvings leave ~7e-17, far below any representable theta_a resolution.
LOGODDS_BISECT_ITERS = 60
_LOGODDS_X_LO = -40.0
_LOGODDS_X_HI = 40.0

KIND_EQUALITY = 0
KIND_LINE = 1
KIND_HALFPLANE_LE = 2
KIND_HALFPLANE_GE = 3
KIND_LOG_ODDS_LE = 4
KIND_LOG_ODDS_GE = 5


def bern_kl(p: float, q: float) -> float:
    """Bernoulli KL d(p || q); +inf when q has zero mass where p does not."""
    if p == q:
        return 0.0
    out = 0.0
    if p > 0.0:
        if q == 0.0:
            return math.inf
        out += p * math.log(p / q)
    if p < 1.0:
        if q == 1.0:
            return math.inf
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


def kl_block_counts(sa: float, sb: float, ta: float, tb: float, na: int, nb: int) -> float:
    """Block KL divergence from plain floats (na*d(sa||ta) + nb*d(sb||tb))."""
    return na * bern_kl(sa, ta) + nb * bern_kl(sb, tb)


def _line_bounds(s: float, c: float) -> tuple[float, float]:
    if c > 0.0:
        return max(0.0, -s / c), min(1.0, (1.0 - s) / c)
    return max(0.0, (1.0 - s) / c), min(1.0, -s / c)


def project_line_root(s: float, c: float, sa: float, sb: float, na: int, nb: int) -> float:
    """theta_a of the KL minimizer over the line theta_b = s + c*theta_a.

    The stationarity function is strictly increasing on the admissible open
    segment with limits -inf and +inf at its ends, so bisection with those
    virtual endpoint signs always converges; no endpoint is ever evaluated.
    """
    if c == 0.0:
        return sa
    lo, hi = _line_bounds(s, c)
    for _ in range(LINE_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        tb = s + c * mid
        f = na * (-sa / mid + (1.0 - sa) / (1.0 - mid)) + nb * c * (
            -sb / tb + (1.0 - sb) / (1.0 - tb)
        )
        if f < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sigma(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def _logodds_x(delta: float, sa: float, sb: float, na: int, nb: int) -> float:
    """Logit of theta_a at the KL minimizer over the curve logit(theta_b) = logit(theta_a) + delta.

    Along the curve the KL derivative in x = logit(theta_a) is
    na*(sigma(x) - sa) + nb*(sigma(x+delta) - sb): strictly increasing from
    negative to positive, so the unique stationary point is found by bisection.
    """
    lo, hi = _LOGODDS_X_LO, _LOGODDS_X_HI
    for _ in range(LOGODDS_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        g = na * (_sigma(mid) - sa) + nb * (_sigma(mid + delta) - sb)
        if g < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def project_logodds_root(
    delta: float, sa: float, sb: float, na: int, nb: int
) -> tuple[float, float]:
    """(theta_a, theta_b) of the KL minimizer on the log-odds boundary curve."""
    x = _logodds_x(delta, sa, sb, na, nb)
    return _sigma(x), _sigma(x + delta)


def _increment(
    ta: float, tb: float, ca: float, cb: float, ka: int, na: int, kb: int, nb: int
) -> float:
    """Log e-value of one block with ka/kb ones: plug-in (ta, tb) over projection (ca, cb)."""
    return (
        ka * math.log(ta / ca)
        + (na - ka) * math.log((1.0 - ta) / (1.0 - ca))
        + kb * math.log(tb / cb)
        + (nb - kb) * math.log((1.0 - tb) / (1.0 - cb))
    )


def line_grid_increments(s, c, active, ta, tb, ka, kb, na, nb, out):
    """Per-grid-point log e-value increments for line nulls at a shared plug-in.

    Arrays s, c, active (uint8) and out (float64) have one entry per grid
    point; out is written in place (0 for inactive and member points).
    """
    out[:] = 0.0
    idx = np.flatnonzero(active)
    if idx.size == 0:
        return
    si = s[idx]
    ci = c[idx]
    member = si + ci * ta == tb
    horizontal = ci == 0.0
    # lockstep bisection over the admissible segment of every point
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.where(ci > 0.0, np.maximum(0.0, -si / ci), np.maximum(0.0, (1.0 - si) / ci))
        hi = np.where(ci > 0.0, np.minimum(1.0, (1.0 - si) / ci), np.minimum(1.0, -si / ci))
    lo = np.where(horizontal, 0.0, lo)
    hi = np.where(horizontal, 1.0, hi)
    for _ in range(LINE_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        tbn = si + ci * mid
        f = na * (-ta / mid + (1.0 - ta) / (1.0 - mid)) + nb * ci * (
            -tb / tbn + (1.0 - tb) / (1.0 - tbn)
        )
        neg = f < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    root = 0.5 * (lo + hi)
    root = np.where(horizontal, ta, root)
    ca = root
    cb = si + ci * root
    inc = (
        ka * np.log(ta / ca)
        + (na - ka) * np.log((1.0 - ta) / (1.0 - ca))
        + kb * np.log(tb / cb)
        + (nb - kb) * np.log((1.0 - tb) / (1.0 - cb))
    )
    out[idx] = np.where(member, 0.0, inc)


def logodds_grid_increments(delta, is_ge, active, ta, tb, ka, kb, na, nb, out):
    """Per-grid-point increments for one-sided log-odds nulls at a shared plug-in.

    is_ge marks points whose null is log-odds-ratio >= delta (uint8); the rest
    use <= delta.  out is written in place.
    """
    out[:] = 0.0
    idx = np.flatnonzero(active)
    if idx.size == 0:
        return
    di = delta[idx]
    lor = math.log(tb * (1.0 - ta)) - math.log((1.0 - tb) * ta)
    member = np.where(is_ge[idx] != 0, lor >= di, lor <= di)
    lo = np.full(di.shape, _LOGODDS_X_LO)
    hi = np.full(di.shape, _LOGODDS_X_HI)
    for _ in range(LOGODDS_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        g = na * (1.0 / (1.0 + np.exp(-mid)) - ta) + nb * (
            1.0 / (1.0 + np.exp(-(mid + di))) - tb
        )
        neg = g < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    x = 0.5 * (lo + hi)
    ca = 1.0 / (1.0 + np.exp(-x))
    cb = 1.0 / (1.0 + np.exp(-(x + di)))
    inc = (
        ka * np.log(ta / ca)
        + (na - ka) * np.log((1.0 - ta) / (1.0 - ca))
        + kb * np.log(tb / cb)
        + (nb - kb) * np.log((1.0 - tb) / (1.0 - cb))
    )
    out[idx] = np.where(member, 0.0, inc)


def run_stream(kind, p1, p2, ka, kb, na, nb, aa, ba, ab, bb, clamp, out):
    """Run one e-process over a whole stream of per-block one-counts.

    ka, kb are int64 arrays of ones per block; out (float64, same length)
    receives the cumulative log e-value after each block.  The plug-in for
    block j is the beta posterior mean of the first j blocks, clamped into
    [clamp, 1-clamp].  kind selects the null (KIND_* constants) with
    parameters p1, p2 (line: s=p1, c=p2; log-odds: delta=p1).
    """
    m = len(ka)
    cum_a = 0
    cum_b = 0
    total = 0.0
    hi_clamp = 1.0 - clamp
    for j in range(m):
        ta = (aa + cum_a) / (aa + ba + j * na)
        tb = (ab + cum_b) / (ab + bb + j * nb)
        if ta < clamp:
            ta = clamp
        elif ta > hi_clamp:
            ta = hi_clamp
        if tb < clamp:
            tb = clamp
        elif tb > hi_clamp:
            tb = hi_clamp

        inc = 0.0
        if kind == KIND_EQUALITY:
            if ta != tb:
                t0 = (na * ta + nb * tb) / (na + nb)
                inc = _increment(ta, tb, t0, t0, ka[j], na, kb[j], nb)
        elif kind == KIND_LINE:
            if p1 + p2 * ta != tb:
                ca = project_line_root(p1, p2, ta, tb, na, nb)
                inc = _increment(ta, tb, ca, p1 + p2 * ca, ka[j], na, kb[j], nb)
        elif kind == KIND_HALFPLANE_LE or kind == KIND_HALFPLANE_GE:
            edge = p1 + p2 * ta
            member = tb <= edge if kind == KIND_HALFPLANE_LE else tb >= edge
            if not member:
                ca = project_line_root(p1, p2, ta, tb, na, nb)
                inc = _increment(ta, tb, ca, p1 + p2 * ca, ka[j], na, kb[j], nb)
        else:
            lor = math.log(tb * (1.0 - ta)) - math.log((1.0 - tb) * ta)
            member = lor <= p1 if kind == KIND_LOG_ODDS_LE else lor >= p1
            if not member:
                x = _logodds_x(p1, ta, tb, na, nb)
                inc = _increment(ta, tb, _sigma(x), _sigma(x + p1), ka[j], na, kb[j], nb)

        total += inc
        out[j] = total
        cum_a += ka[j]
        cum_b += kb[j]
