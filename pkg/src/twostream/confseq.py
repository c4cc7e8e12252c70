"""Anytime-valid confidence sequences over a grid of candidate effect sizes.

One e-process per candidate value runs against the null set where the effect
equals that candidate.  A candidate leaves the confidence set permanently when
its process reaches 1/alpha (a sticky flag realizes the running intersection).

Risk difference and relative risk use line nulls, one process per candidate.
The log odds ratio needs the one-sided decomposition: candidates delta >= 0
are tested against {log-odds <= delta} (the lower-bound family), candidates
delta <= 0 against {log-odds >= delta} (the upper-bound family), and delta = 0
belongs to both.  Rejecting {log-odds <= d} refutes every candidate whose
boundary curve it contains, i.e. all delta' <= d, so rejections propagate
through the families as two monotone frontiers; this is what empties the
wrong-sign family under a strong effect.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from . import kernels
from .eprocess import DEFAULT_CLAMP, BetaPrior, posterior_mean
from .model import Block, BlockDesign, GroupCounts, ThetaPair, log_odds_ratio
from .nulls import NullSpec

__all__ = [
    "Effect",
    "ConfInterval",
    "ConfidenceSequence",
    "effect_value",
    "default_grid",
    "null_for",
]

# Candidates at the very edge of the risk-difference range denote nulls that
# touch the unit square only at a corner; nudging them keeps the boundary line
# through the interior while changing the tested null by a negligible amount.
_EDGE_NUDGE = 1e-9


class Effect(str, Enum):
    RISK_DIFFERENCE = "risk-difference"
    RELATIVE_RISK = "relative-risk"
    LOG_ODDS_RATIO = "log-odds-ratio"


def effect_value(effect: Effect, theta: ThetaPair) -> float:
    """The effect size of a parameter pair."""
    if effect is Effect.RISK_DIFFERENCE:
        return theta.theta_b - theta.theta_a
    if effect is Effect.RELATIVE_RISK:
        if theta.theta_a == 0.0:
            raise ValueError("relative risk is undefined at theta_a = 0")
        return theta.theta_b / theta.theta_a
    return log_odds_ratio(theta.theta_a, theta.theta_b)


def default_grid(effect: Effect) -> np.ndarray:
    """Default candidate grids: risk difference [-1, 1] step 0.01; relative
    risk 241 log-spaced points on log-delta in [-3, 3]; log odds ratio
    [-6, 6] step 0.05 (symmetric about an exact 0)."""
    if effect is Effect.RISK_DIFFERENCE:
        return np.arange(-100, 101, dtype=np.float64) / 100.0
    if effect is Effect.RELATIVE_RISK:
        return np.exp(np.arange(-120, 121, dtype=np.float64) / 40.0)
    return np.arange(-120, 121, dtype=np.float64) / 20.0


def null_for(effect: Effect, delta: float) -> NullSpec:
    """Null set of parameter pairs whose effect equals the candidate.

    Only defined for the convex-null effects (risk difference, relative risk);
    the log odds ratio uses the one-sided family pair instead.
    """
    if effect is Effect.RISK_DIFFERENCE:
        s = min(max(delta, -1.0 + _EDGE_NUDGE), 1.0 - _EDGE_NUDGE)
        return NullSpec.line(s, 1.0)
    if effect is Effect.RELATIVE_RISK:
        if delta <= 0.0:
            raise ValueError(f"relative risk candidates must be positive, got {delta!r}")
        return NullSpec.line(0.0, delta)
    raise ValueError("log-odds-ratio candidates map to one-sided null pairs, not a single null")


def _validate_grid(effect: Effect, grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d array of candidate effect sizes")
    if not np.all(np.isfinite(grid)):
        raise ValueError(f"grid values must be finite, offending: {grid[~np.isfinite(grid)]}")
    if not np.all(np.diff(grid) > 0.0):
        bad = grid[1:][np.diff(grid) <= 0.0]
        raise ValueError(f"grid must be strictly increasing, offending values: {bad}")
    if effect is Effect.RISK_DIFFERENCE:
        bad = grid[(grid < -1.0) | (grid > 1.0)]
        if bad.size:
            raise ValueError(f"risk-difference candidates must lie in [-1, 1], offending: {bad}")
    elif effect is Effect.RELATIVE_RISK:
        bad = grid[grid <= 0.0]
        if bad.size:
            raise ValueError(f"relative-risk candidates must be positive, offending: {bad}")
    return grid


class ConfInterval:
    """Smallest interval containing a confidence set; may strictly contain it."""

    __slots__ = ("lower", "upper", "empty")

    def __init__(self, lower: float, upper: float, empty: bool = False):
        if not empty and not lower <= upper:
            raise ValueError(f"need lower <= upper, got ({lower}, {upper})")
        self.lower = lower
        self.upper = upper
        self.empty = empty

    def contains(self, value: float) -> bool:
        return (not self.empty) and self.lower <= value <= self.upper

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfInterval):
            return NotImplemented
        if self.empty or other.empty:
            return self.empty == other.empty
        return self.lower == other.lower and self.upper == other.upper

    def issubset(self, other: ConfInterval) -> bool:
        if self.empty:
            return True
        if other.empty:
            return False
        return other.lower <= self.lower and self.upper <= other.upper

    def __repr__(self) -> str:
        return "ConfInterval(empty)" if self.empty else f"ConfInterval({self.lower}, {self.upper})"


class ConfidenceSequence:
    """Grid of e-processes with sticky rejection flags.

    Updates are pure: update/update_counts return a new instance and never
    mutate the receiver, so earlier states can be kept for nesting checks.
    With track_instantaneous=True every process keeps updating after its
    candidate is rejected, so the non-intersected ("instantaneous") set at the
    current block remains available alongside the running intersection.
    """

    def __init__(
        self,
        effect: Effect,
        design: BlockDesign,
        *,
        alpha: float = 0.05,
        prior: BetaPrior | None = None,
        grid: np.ndarray | None = None,
        clamp: float = DEFAULT_CLAMP,
        track_instantaneous: bool = False,
    ):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
        self.effect = Effect(effect)
        self.design = design
        self.alpha = alpha
        self.prior = prior if prior is not None else BetaPrior()
        self.clamp = clamp
        self.track_instantaneous = track_instantaneous
        self.grid = _validate_grid(self.effect, default_grid(self.effect) if grid is None else grid)
        self.m = 0
        self.counts = GroupCounts()

        if self.effect is Effect.LOG_ODDS_RATIO:
            plus = self.grid[self.grid >= 0.0]
            minus = self.grid[self.grid <= 0.0]
            self._proc_delta = np.concatenate([minus, plus])
            self._proc_is_ge = np.concatenate(
                [np.ones(minus.size, dtype=np.uint8), np.zeros(plus.size, dtype=np.uint8)]
            )
            self._proc_s = None
            self._proc_c = None
            # sticky rejection frontiers: candidates <= _kill_le or >= _kill_ge are out
            self._kill_le = -math.inf
            self._kill_ge = math.inf
            self._inst_kill_le = -math.inf
            self._inst_kill_ge = math.inf
        else:
            nulls = [null_for(self.effect, float(d)) for d in self.grid]
            self._proc_delta = self.grid.copy()
            self._proc_is_ge = None
            self._proc_s = np.array([n.s for n in nulls])
            self._proc_c = np.array([n.c for n in nulls])
            self._kill_le = self._kill_ge = None
            self._inst_kill_le = self._inst_kill_ge = None
        self._log_e = np.zeros(self._proc_delta.size, dtype=np.float64)
        self._rejected = np.zeros(self._proc_delta.size, dtype=bool)

    @property
    def n_processes(self) -> int:
        """Number of e-processes (the log-odds effect runs two at delta = 0)."""
        return int(self._proc_delta.size)

    @property
    def threshold(self) -> float:
        """Rejection threshold on the log e-value scale: log(1/alpha)."""
        return -math.log(self.alpha)

    def plugin(self) -> ThetaPair:
        """Shared plug-in estimate: it depends on the data only, not on the candidate."""
        lo, hi = self.clamp, 1.0 - self.clamp
        ta = min(max(posterior_mean(self.prior, self.counts, "a"), lo), hi)
        tb = min(max(posterior_mean(self.prior, self.counts, "b"), lo), hi)
        return ThetaPair(ta, tb)

    def process_log_e(self) -> np.ndarray:
        """Per-process running log e-values (copy)."""
        return self._log_e.copy()

    def _clone(self) -> ConfidenceSequence:
        new = object.__new__(ConfidenceSequence)
        new.__dict__.update(self.__dict__)
        return new

    def update(self, block: Block) -> ConfidenceSequence:
        """Advance by one completed block (pure; returns the new state)."""
        if not block.matches(self.design):
            raise ValueError(f"block {block} does not match design {self.design}")
        ka, kb = block.counts()
        return self.update_counts(ka, kb)

    def update_counts(self, ones_a: int, ones_b: int) -> ConfidenceSequence:
        """Advance by one block given its per-group one-counts (pure)."""
        if not (0 <= ones_a <= self.design.n_a and 0 <= ones_b <= self.design.n_b):
            raise ValueError(
                f"one-counts ({ones_a}, {ones_b}) exceed the block design {self.design}"
            )
        theta = self.plugin()
        active = (
            np.ones_like(self._rejected)
            if self.track_instantaneous
            else ~self._rejected
        )
        inc = np.empty_like(self._log_e)
        if self.effect is Effect.LOG_ODDS_RATIO:
            kernels.logodds_grid_increments(
                self._proc_delta,
                self._proc_is_ge,
                active.view(np.uint8),
                theta.theta_a,
                theta.theta_b,
                ones_a,
                ones_b,
                self.design.n_a,
                self.design.n_b,
                inc,
            )
        else:
            kernels.line_grid_increments(
                self._proc_s,
                self._proc_c,
                active.view(np.uint8),
                theta.theta_a,
                theta.theta_b,
                ones_a,
                ones_b,
                self.design.n_a,
                self.design.n_b,
                inc,
            )
        new = self._clone()
        new._log_e = self._log_e + inc
        crossed = new._log_e >= self.threshold
        new._rejected = self._rejected | crossed
        if self.effect is Effect.LOG_ODDS_RATIO:
            le_cross = crossed & (self._proc_is_ge == 0)
            ge_cross = crossed & (self._proc_is_ge != 0)
            new._inst_kill_le = float(self._proc_delta[le_cross].max()) if le_cross.any() else -math.inf
            new._inst_kill_ge = float(self._proc_delta[ge_cross].min()) if ge_cross.any() else math.inf
            new._kill_le = max(self._kill_le, new._inst_kill_le)
            new._kill_ge = min(self._kill_ge, new._inst_kill_ge)
        new.counts = self.counts.add(
            ones_a, self.design.n_a, ones_b, self.design.n_b
        )
        new.m = self.m + 1
        return new

    def _point_alive(self) -> np.ndarray:
        """Running-intersection survival per grid point."""
        if self.effect is Effect.LOG_ODDS_RATIO:
            return (self.grid > self._kill_le) & (self.grid < self._kill_ge)
        return ~self._rejected

    def current_set(self) -> np.ndarray:
        """Grid points never yet rejected (the running intersection on the grid)."""
        return self.grid[self._point_alive()]

    def covers(self, value: float) -> bool:
        """Whether a candidate effect size is still in the running confidence set.

        For the log-odds effect the rejection frontiers decide membership for
        any value; for the line-null effects the value must be a grid point.
        """
        if self.effect is Effect.LOG_ODDS_RATIO:
            return self._kill_le < value < self._kill_ge
        i = int(np.searchsorted(self.grid, value))
        if i >= self.grid.size or self.grid[i] != value:
            raise ValueError(f"{value!r} is not a grid point; coverage is tracked per point")
        return not bool(self._rejected[i])

    def current_interval(self) -> ConfInterval:
        """Smallest interval containing the surviving set (holes are absorbed)."""
        return self._interval_of(self._point_alive())

    def _interval_of(self, alive: np.ndarray) -> ConfInterval:
        if not alive.any():
            return ConfInterval(math.nan, math.nan, empty=True)
        values = self.grid[alive]
        return ConfInterval(float(values[0]), float(values[-1]))

    def _inst_point_alive(self) -> np.ndarray:
        if not self.track_instantaneous:
            raise ValueError("instantaneous sets require track_instantaneous=True")
        below = self._log_e < self.threshold
        if self.effect is Effect.LOG_ODDS_RATIO:
            alive = np.ones(self.grid.size, dtype=bool)
            for i, d in enumerate(self._proc_delta):
                if not below[i]:
                    alive[self.grid == d] = False
            return alive & (self.grid > self._inst_kill_le) & (self.grid < self._inst_kill_ge)
        return below

    def instantaneous_set(self) -> np.ndarray:
        """Grid points currently below 1/alpha, ignoring past rejections."""
        return self.grid[self._inst_point_alive()]

    def instantaneous_interval(self) -> ConfInterval:
        return self._interval_of(self._inst_point_alive())

    def family_rejected(self) -> dict[str, bool]:
        """For the log-odds effect: whether each one-sided family is fully rejected."""
        if self.effect is not Effect.LOG_ODDS_RATIO:
            raise ValueError("family status only applies to the log-odds-ratio effect")
        alive = self._point_alive()
        return {
            "plus": not bool((alive & (self.grid >= 0.0)).any()),
            "minus": not bool((alive & (self.grid <= 0.0)).any()),
        }

    def _proc_labels(self) -> list[str]:
        if self.effect is Effect.LOG_ODDS_RATIO:
            return [
                f"loge_{'ge' if g else 'le'}_{d:g}"
                for d, g in zip(self._proc_delta, self._proc_is_ge)
            ]
        return [f"loge_{d:g}" for d in self._proc_delta]

    def records_header(self, include_points: bool = False) -> list[str]:
        """Column names of record_row output (documented and stable)."""
        header = ["m", "effect", "lower", "upper", "n_surviving"]
        if include_points:
            header.extend(self._proc_labels())
        return header

    def record_row(self, include_points: bool = False) -> list[str]:
        """One CSV row describing the current state; empty interval fields stay blank."""
        interval = self.current_interval()
        row = [
            str(self.m),
            self.effect.value,
            "" if interval.empty else repr(interval.lower),
            "" if interval.empty else repr(interval.upper),
            str(int(self._point_alive().sum())),
        ]
        if include_points:
            row.extend(repr(v) for v in self._log_e)
        return row
