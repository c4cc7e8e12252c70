"""Reproducible stream generation and Monte Carlo experiments.

Randomness comes from numpy's PCG64 generator seeded through SeedSequence
with documented spawn keys: stream i of an experiment with seed s draws group
a bits from SeedSequence(entropy=s, spawn_key=(i, 0)) and group b bits from
spawn_key=(i, 1).  Identical configurations therefore produce bit-identical
streams on any platform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .confseq import ConfidenceSequence, Effect, effect_value
from .eprocess import DEFAULT_CLAMP, BetaPrior
from .model import Block, BlockDesign, ThetaPair
from .nulls import NullKind, NullSpec

__all__ = [
    "SimConfig",
    "ExperimentResult",
    "generate_stream",
    "run_type1",
    "run_coverage",
    "figure_traces",
    "smoothed_mle",
]

_KIND_CODE = {
    NullKind.EQUALITY: kernels.KIND_EQUALITY,
    NullKind.LINE: kernels.KIND_LINE,
    NullKind.HALFPLANE_LE: kernels.KIND_HALFPLANE_LE,
    NullKind.HALFPLANE_GE: kernels.KIND_HALFPLANE_GE,
    NullKind.LOG_ODDS_LE: kernels.KIND_LOG_ODDS_LE,
    NullKind.LOG_ODDS_GE: kernels.KIND_LOG_ODDS_GE,
}


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one seeded Monte Carlo experiment.

    Exactly one of null (type-I runs) or effect (coverage runs) is required
    by the corresponding experiment.
    """

    star: ThetaPair
    design: BlockDesign
    m_max: int
    n_streams: int
    seed: int
    alpha: float = 0.05
    effect: Effect | None = None
    null: NullSpec | None = None
    prior: BetaPrior = field(default_factory=BetaPrior)
    clamp: float = DEFAULT_CLAMP

    def __post_init__(self) -> None:
        if self.m_max < 1:
            raise ValueError(f"m_max must be >= 1, got {self.m_max!r}")
        if self.n_streams < 1:
            raise ValueError(f"n_streams must be >= 1, got {self.n_streams!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")


def _group_rng(seed, spawn_key: tuple[int, ...]) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=spawn_key))


def _stream_bits(
    star: ThetaPair, design: BlockDesign, m: int, seed, stream: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Bernoulli outcome matrices (m, n_a) and (m, n_b) for one stream."""
    bits_a = _group_rng(seed, (stream, 0)).random((m, design.n_a)) < star.theta_a
    bits_b = _group_rng(seed, (stream, 1)).random((m, design.n_b)) < star.theta_b
    return bits_a, bits_b


def _stream_counts(
    star: ThetaPair, design: BlockDesign, m: int, seed, stream: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Per-block one-counts of the same stream generate_stream would build."""
    bits_a, bits_b = _stream_bits(star, design, m, seed, stream)
    return bits_a.sum(axis=1).astype(np.int64), bits_b.sum(axis=1).astype(np.int64)


def generate_stream(star: ThetaPair, design: BlockDesign, m: int, seed) -> list[Block]:
    """m i.i.d. blocks of Bernoulli outcomes; deterministic given the seed."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m!r}")
    bits_a, bits_b = _stream_bits(star, design, m, seed)
    return [
        Block(tuple(int(y) for y in bits_a[j]), tuple(int(y) for y in bits_b[j]))
        for j in range(m)
    ]


def _null_stream_log_e(
    null: NullSpec,
    ka: np.ndarray,
    kb: np.ndarray,
    design: BlockDesign,
    prior: BetaPrior,
    clamp: float,
) -> np.ndarray:
    """Cumulative log e-value trajectory of one stream against one null."""
    kind = _KIND_CODE[null.kind]
    if null.kind in (NullKind.LOG_ODDS_LE, NullKind.LOG_ODDS_GE):
        p1, p2 = null.delta, 0.0
    else:
        p1, p2 = null.s, null.c
    out = np.empty(len(ka), dtype=np.float64)
    kernels.run_stream(
        kind,
        p1,
        p2,
        ka,
        kb,
        design.n_a,
        design.n_b,
        prior.alpha_a,
        prior.beta_a,
        prior.alpha_b,
        prior.beta_b,
        clamp,
        out,
    )
    return out


@dataclass(frozen=True)
class ExperimentResult:
    """Outcome of a Monte Carlo experiment with its Monte Carlo standard error."""

    experiment: str
    frequency: float
    mc_sigma: float
    bound: float
    n_streams: int
    m_max: int
    alpha: float
    seed: int
    detail: str

    def to_json(self) -> str:
        """Single JSON-lines record (stable key order)."""
        return json.dumps(
            {
                "experiment": self.experiment,
                "detail": self.detail,
                "frequency": self.frequency,
                "mc_sigma": self.mc_sigma,
                "bound": self.bound,
                "n_streams": self.n_streams,
                "m_max": self.m_max,
                "alpha": self.alpha,
                "seed": self.seed,
            },
            sort_keys=True,
        )


def _mc_sigma(alpha: float, n: int) -> float:
    return math.sqrt(alpha * (1.0 - alpha) / n)


def run_type1(config: SimConfig) -> ExperimentResult:
    """Fraction of streams whose e-process ever reaches 1/alpha under a true null."""
    if config.null is None:
        raise ValueError("run_type1 needs a null in the configuration")
    if not config.null.contains(config.star):
        raise ValueError(
            f"type-I runs require the generating star {config.star} to satisfy "
            f"the null ({config.null.describe()})"
        )
    threshold = -math.log(config.alpha)
    rejections = 0
    for i in range(config.n_streams):
        ka, kb = _stream_counts(config.star, config.design, config.m_max, config.seed, i)
        log_e = _null_stream_log_e(
            config.null, ka, kb, config.design, config.prior, config.clamp
        )
        if log_e.max() >= threshold:
            rejections += 1
    sigma = _mc_sigma(config.alpha, config.n_streams)
    return ExperimentResult(
        experiment="type1",
        frequency=rejections / config.n_streams,
        mc_sigma=sigma,
        bound=config.alpha + 3.0 * sigma,
        n_streams=config.n_streams,
        m_max=config.m_max,
        alpha=config.alpha,
        seed=config.seed,
        detail=config.null.describe(),
    )


def _logodds_family_null(delta: float) -> NullSpec:
    return NullSpec.log_odds_le(delta) if delta >= 0.0 else NullSpec.log_odds_ge(delta)


def run_coverage(config: SimConfig) -> ExperimentResult:
    """Fraction of streams whose running confidence set ever drops the true effect.

    For risk difference and relative risk a candidate is excluded exactly when
    its own e-process has crossed 1/alpha, so the event is tracked grid-free on
    the true candidate's process.  The log odds ratio adds cross-family
    rejection propagation, so those streams run the full grid (with the true
    value inserted as a grid point).
    """
    if config.effect is None:
        raise ValueError("run_coverage needs an effect in the configuration")
    effect = config.effect
    true_delta = effect_value(effect, config.star)
    misses = 0
    if effect is Effect.LOG_ODDS_RATIO:
        from .confseq import default_grid

        grid = np.union1d(default_grid(effect), [true_delta])
        base = ConfidenceSequence(
            effect,
            config.design,
            alpha=config.alpha,
            prior=config.prior,
            grid=grid,
            clamp=config.clamp,
        )
        for i in range(config.n_streams):
            ka, kb = _stream_counts(config.star, config.design, config.m_max, config.seed, i)
            state = base
            missed = False
            for j in range(config.m_max):
                state = state.update_counts(int(ka[j]), int(kb[j]))
                if not state.covers(true_delta):
                    missed = True
                    break
            misses += missed
        detail = f"log-odds-ratio delta={true_delta!r}"
    else:
        from .confseq import null_for

        null = null_for(effect, true_delta)
        threshold = -math.log(config.alpha)
        for i in range(config.n_streams):
            ka, kb = _stream_counts(config.star, config.design, config.m_max, config.seed, i)
            log_e = _null_stream_log_e(null, ka, kb, config.design, config.prior, config.clamp)
            if log_e.max() >= threshold:
                misses += 1
        detail = f"{effect.value} delta={true_delta!r}"
    sigma = _mc_sigma(config.alpha, config.n_streams)
    return ExperimentResult(
        experiment="coverage",
        frequency=misses / config.n_streams,
        mc_sigma=sigma,
        bound=config.alpha + 3.0 * sigma,
        n_streams=config.n_streams,
        m_max=config.m_max,
        alpha=config.alpha,
        seed=config.seed,
        detail=detail,
    )


def smoothed_mle(ones: int, trials: int) -> float:
    """Display-only estimate (ones + 0.5) / (trials + 1); never used in inference."""
    return (ones + 0.5) / (trials + 1)


def _sigma_inv_logit(p: float, shift: float) -> float:
    x = math.log(p) - math.log(1.0 - p) + shift
    return 1.0 / (1.0 + math.exp(-x))


_SCENARIOS = {
    "fig2": "risk-difference beam trace",
    "fig3": "one-sided log-odds-ratio trace",
    "figA1": "running vs plain interval trace",
}


def figure_traces(scenario: str, seed: int, out_dir, delta: float = 0.3) -> list[Path]:
    """Write the CSV trace files of one illustration scenario; returns the paths.

    fig2:  single risk-difference stream (star (0.05, 0.35), 200 blocks);
           columns m, delta_lower, delta_upper, mle_a, mle_b.
    fig3:  single log-odds stream (theta_a 0.2, log odds ratio 2.5, 500 blocks);
           columns m, lower, upper, cs_plus_empty, cs_minus_empty.
    figA1: single risk-difference stream (star (0.05, 0.05 + delta), 100
           blocks); columns m, plain_lower, plain_upper, running_lower,
           running_upper.
    """
    if scenario not in _SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; expected one of {sorted(_SCENARIOS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    design = BlockDesign(1, 1)
    alpha = 0.05
    path = out_dir / f"{scenario}.csv"
    rows: list[list[str]] = []

    if scenario == "fig2":
        star = ThetaPair(0.05, 0.35)
        state = ConfidenceSequence(Effect.RISK_DIFFERENCE, design, alpha=alpha)
        ka, kb = _stream_counts(star, design, 200, seed)
        header = ["m", "delta_lower", "delta_upper", "mle_a", "mle_b"]
        for j in range(200):
            state = state.update_counts(int(ka[j]), int(kb[j]))
            interval = state.current_interval()
            rows.append(
                [
                    str(state.m),
                    "" if interval.empty else repr(interval.lower),
                    "" if interval.empty else repr(interval.upper),
                    repr(smoothed_mle(state.counts.ones_a, state.counts.trials_a)),
                    repr(smoothed_mle(state.counts.ones_b, state.counts.trials_b)),
                ]
            )
    elif scenario == "fig3":
        star = ThetaPair(0.2, _sigma_inv_logit(0.2, 2.5))
        state = ConfidenceSequence(Effect.LOG_ODDS_RATIO, design, alpha=alpha)
        ka, kb = _stream_counts(star, design, 500, seed)
        header = ["m", "lower", "upper", "cs_plus_empty", "cs_minus_empty"]
        for j in range(500):
            state = state.update_counts(int(ka[j]), int(kb[j]))
            interval = state.current_interval()
            families = state.family_rejected()
            rows.append(
                [
                    str(state.m),
                    "" if interval.empty else repr(interval.lower),
                    "" if interval.empty else repr(interval.upper),
                    str(int(families["plus"])),
                    str(int(families["minus"])),
                ]
            )
    else:
        star = ThetaPair(0.05, 0.05 + delta)
        state = ConfidenceSequence(
            Effect.RISK_DIFFERENCE, design, alpha=alpha, track_instantaneous=True
        )
        ka, kb = _stream_counts(star, design, 100, seed)
        header = ["m", "plain_lower", "plain_upper", "running_lower", "running_upper"]
        for j in range(100):
            state = state.update_counts(int(ka[j]), int(kb[j]))
            plain = state.instantaneous_interval()
            running = state.current_interval()
            rows.append(
                [
                    str(state.m),
                    "" if plain.empty else repr(plain.lower),
                    "" if plain.empty else repr(plain.upper),
                    "" if running.empty else repr(running.lower),
                    "" if running.empty else repr(running.upper),
                ]
            )

    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    return [path]
