"""Shared helpers: random null/alternative configurations and an independent
straight-line reimplementation of the plug-in e-process used as an oracle."""

import math

import numpy as np
import pytest

from twostream import (
    BetaPrior,
    Block,
    BlockDesign,
    GroupCounts,
    NullKind,
    NullSpec,
    ThetaPair,
    bern_log_pmf,
    project,
)


def random_star(rng, lo=0.05, hi=0.95) -> ThetaPair:
    return ThetaPair(float(rng.uniform(lo, hi)), float(rng.uniform(lo, hi)))


def random_null(rng) -> NullSpec:
    """A random null across all variants with comfortably interior parameters."""
    kind = rng.integers(0, 6)
    if kind == 0:
        return NullSpec.equality()
    if kind in (1, 2, 3):
        while True:
            s = float(rng.uniform(-0.5, 0.5))
            c = float(rng.uniform(0.3, 3.0)) * (1 if rng.random() < 0.5 else -1)
            try:
                lo, hi = NullSpec.line(s, c).line_segment()
            except ValueError:
                continue
            if hi - lo > 0.05:
                break
        if kind == 1:
            return NullSpec.line(s, c)
        return NullSpec.halfplane_le(s, c) if kind == 2 else NullSpec.halfplane_ge(s, c)
    if kind == 4:
        return NullSpec.log_odds_le(float(rng.uniform(0.0, 3.0)))
    return NullSpec.log_odds_ge(float(rng.uniform(-3.0, 0.0)))


def boundary_points(null: NullSpec, k: int, inset: float = 1e-6) -> list[ThetaPair]:
    """k points discretizing the null's boundary (interior part)."""
    lo, hi = null.line_segment()
    ta = np.linspace(lo + inset * (hi - lo), hi - inset * (hi - lo), k)
    return [ThetaPair(float(t), float(null.boundary_theta_b(float(t)))) for t in ta]


def block_evalue_factor(star: ThetaPair, circ: ThetaPair, ya: int, yb: int) -> float:
    """e-value of a 1+1 block, computed from raw pmf ratios."""
    pa = star.theta_a if ya else 1.0 - star.theta_a
    pb = star.theta_b if yb else 1.0 - star.theta_b
    qa = circ.theta_a if ya else 1.0 - circ.theta_a
    qb = circ.theta_b if yb else 1.0 - circ.theta_b
    return (pa * pb) / (qa * qb)


def enumeration_mean(star: ThetaPair, circ: ThetaPair, theta: ThetaPair) -> float:
    """E[S] under theta for the 1+1 design, by exact enumeration of 4 outcomes."""
    total = 0.0
    for ya in (0, 1):
        for yb in (0, 1):
            pa = theta.theta_a if ya else 1.0 - theta.theta_a
            pb = theta.theta_b if yb else 1.0 - theta.theta_b
            total += pa * pb * block_evalue_factor(star, circ, ya, yb)
    return total


def eprocess_oracle(
    blocks: list[Block],
    null: NullSpec,
    design: BlockDesign,
    prior: BetaPrior,
    clamp: float = 1e-12,
) -> float:
    """Independent term-by-term recomputation of the plug-in e-process.

    Recomputes every plug-in from scratch counts, projects, and sums raw
    per-outcome log pmf ratios; shares only the projection routines with the
    production path, so it checks the accumulation and no-lookahead logic.
    """
    counts = GroupCounts()
    log_e = 0.0
    for block in blocks:
        ta = (prior.alpha_a + counts.ones_a) / (prior.alpha_a + prior.beta_a + counts.trials_a)
        tb = (prior.alpha_b + counts.ones_b) / (prior.alpha_b + prior.beta_b + counts.trials_b)
        ta = min(max(ta, clamp), 1.0 - clamp)
        tb = min(max(tb, clamp), 1.0 - clamp)
        theta = ThetaPair(ta, tb)
        proj = project(null, theta, design)
        if not proj.interior_hit:
            for y in block.ys_a:
                log_e += bern_log_pmf(ta, y) - bern_log_pmf(proj.theta.theta_a, y)
            for y in block.ys_b:
                log_e += bern_log_pmf(tb, y) - bern_log_pmf(proj.theta.theta_b, y)
        counts = counts.add_block(block)
    return log_e


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
