"""Bernoulli block data model: group probabilities, block designs, counts, KL divergences.

Everything downstream (projections, e-processes, confidence sequences) is built
on the types and the two KL divergences defined here.  All likelihood work is
done in log space so that products over long streams never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ThetaPair",
    "BlockDesign",
    "Block",
    "GroupCounts",
    "bern_log_pmf",
    "kl_bernoulli",
    "kl_block",
    "kl_single",
    "log_odds_ratio",
]


@dataclass(frozen=True)
class ThetaPair:
    """A point (theta_a, theta_b) in the unit square: per-group success probabilities."""

    theta_a: float
    theta_b: float

    def __post_init__(self) -> None:
        for name, value in (("theta_a", self.theta_a), ("theta_b", self.theta_b)):
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ValueError(f"{name} must be a finite probability in [0, 1], got {value!r}")

    @property
    def interior(self) -> bool:
        """True iff both components lie strictly inside (0, 1)."""
        return 0.0 < self.theta_a < 1.0 and 0.0 < self.theta_b < 1.0


@dataclass(frozen=True)
class BlockDesign:
    """Per-block group sizes, fixed for the whole stream."""

    n_a: int
    n_b: int

    def __post_init__(self) -> None:
        for name, value in (("n_a", self.n_a), ("n_b", self.n_b)):
            if not (isinstance(value, int) and value >= 1):
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")

    @property
    def n(self) -> int:
        return self.n_a + self.n_b


@dataclass(frozen=True)
class Block:
    """One block of binary outcomes: n_a draws from group a and n_b from group b."""

    ys_a: tuple[int, ...]
    ys_b: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ys_a", tuple(int(y) for y in self.ys_a))
        object.__setattr__(self, "ys_b", tuple(int(y) for y in self.ys_b))
        for name, ys in (("ys_a", self.ys_a), ("ys_b", self.ys_b)):
            if any(y not in (0, 1) for y in ys):
                raise ValueError(f"{name} entries must be 0 or 1, got {ys!r}")

    def counts(self) -> tuple[int, int]:
        """Number of ones in each group."""
        return sum(self.ys_a), sum(self.ys_b)

    def matches(self, design: BlockDesign) -> bool:
        return len(self.ys_a) == design.n_a and len(self.ys_b) == design.n_b


@dataclass(frozen=True)
class GroupCounts:
    """Running sufficient statistics: ones and trials per group."""

    ones_a: int = 0
    trials_a: int = 0
    ones_b: int = 0
    trials_b: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.ones_a <= self.trials_a and 0 <= self.ones_b <= self.trials_b):
            raise ValueError(f"counts must satisfy 0 <= ones <= trials, got {self!r}")

    def add_block(self, block: Block) -> GroupCounts:
        ka, kb = block.counts()
        return GroupCounts(
            self.ones_a + ka,
            self.trials_a + len(block.ys_a),
            self.ones_b + kb,
            self.trials_b + len(block.ys_b),
        )

    def add(self, ones_a: int, trials_a: int, ones_b: int, trials_b: int) -> GroupCounts:
        return GroupCounts(
            self.ones_a + ones_a,
            self.trials_a + trials_a,
            self.ones_b + ones_b,
            self.trials_b + trials_b,
        )


def bern_log_pmf(theta: float, y: int) -> float:
    """Log pmf of a Bernoulli(theta) outcome.  Returns -inf on zero-mass outcomes."""
    if not (math.isfinite(theta) and 0.0 <= theta <= 1.0):
        raise ValueError(f"theta must be a probability in [0, 1], got {theta!r}")
    if y == 1:
        return math.log(theta) if theta > 0.0 else -math.inf
    if y == 0:
        return math.log(1.0 - theta) if theta < 1.0 else -math.inf
    raise ValueError(f"outcome must be 0 or 1, got {y!r}")


def kl_bernoulli(p: float, q: float) -> float:
    """Single-outcome Bernoulli KL divergence d(p || q) in nats.

    Returns +inf when q puts zero mass where p does not; d(p || p) == 0 exactly.
    """
    for name, value in (("p", p), ("q", q)):
        if not (math.isfinite(value) and 0.0 <= value <= 1.0):
            raise ValueError(f"{name} must be a probability in [0, 1], got {value!r}")
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


def kl_block(star: ThetaPair, theta: ThetaPair, design: BlockDesign) -> float:
    """KL divergence between the product laws of one block under star vs theta.

    By additivity over independent outcomes this equals
    n_a * d(star_a || theta_a) + n_b * d(star_b || theta_b), which matches the
    explicit sum over all 2**(n_a+n_b) outcome combinations.
    """
    return design.n_a * kl_bernoulli(star.theta_a, theta.theta_a) + design.n_b * kl_bernoulli(
        star.theta_b, theta.theta_b
    )


def kl_single(star: ThetaPair, theta: ThetaPair, design: BlockDesign) -> float:
    """Per-single-outcome KL: group KLs weighted by n_g/n.  n * kl_single == kl_block."""
    n = design.n
    return (design.n_a / n) * kl_bernoulli(star.theta_a, theta.theta_a) + (
        design.n_b / n
    ) * kl_bernoulli(star.theta_b, theta.theta_b)


def log_odds_ratio(theta_a: float, theta_b: float) -> float:
    """log[theta_b (1-theta_a) / ((1-theta_b) theta_a)], extended to the boundary by limits.

    Returns +inf / -inf when exactly one of numerator and denominator vanishes.
    At the corners (0,0) and (1,1) the limit does not exist and nan is returned;
    null-set membership treats those corners separately.
    """
    num = theta_b * (1.0 - theta_a)
    den = (1.0 - theta_b) * theta_a
    if num == 0.0 and den == 0.0:
        return math.nan
    if num == 0.0:
        return -math.inf
    if den == 0.0:
        return math.inf
    return math.log(num) - math.log(den)
