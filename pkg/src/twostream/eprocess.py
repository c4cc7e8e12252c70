"""Plug-in e-processes: running products of per-block e-values.

A block e-value is the likelihood ratio of the plug-in alternative over its
projection onto the null.  The plug-in for block j is the beta posterior mean
of the first j-1 blocks, so no block ever sees its own data.  States are
immutable values; update returns a new state.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace
from typing import Literal

from .model import Block, BlockDesign, GroupCounts, ThetaPair, bern_log_pmf
from .nulls import NullKind, NullSpec
from .projection import project

__all__ = [
    "BetaPrior",
    "EProcessState",
    "posterior_mean",
    "block_evalue",
    "equality_mixture_evalue",
    "to_snapshot",
    "from_snapshot",
]

SNAPSHOT_VERSION = 1
DEFAULT_CLAMP = 1e-12


@dataclass(frozen=True)
class BetaPrior:
    """Independent beta priors on the two group probabilities.

    The default 0.18 on all four parameters is the symmetric choice that
    empirically optimizes worst-case e-value growth for 1+1 block designs.
    """

    alpha_a: float = 0.18
    beta_a: float = 0.18
    alpha_b: float = 0.18
    beta_b: float = 0.18

    def __post_init__(self) -> None:
        for name in ("alpha_a", "beta_a", "alpha_b", "beta_b"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be a positive finite real, got {value!r}")

    @classmethod
    def symmetric(cls, gamma: float = 0.18) -> BetaPrior:
        return cls(gamma, gamma, gamma, gamma)


def posterior_mean(prior: BetaPrior, counts: GroupCounts, group: Literal["a", "b"]) -> float:
    """Beta posterior mean (alpha_g + ones_g) / (alpha_g + beta_g + trials_g)."""
    if group == "a":
        return (prior.alpha_a + counts.ones_a) / (prior.alpha_a + prior.beta_a + counts.trials_a)
    if group == "b":
        return (prior.alpha_b + counts.ones_b) / (prior.alpha_b + prior.beta_b + counts.trials_b)
    raise ValueError(f"group must be 'a' or 'b', got {group!r}")


def block_evalue(star: ThetaPair, circ: ThetaPair, block: Block) -> float:
    """Log e-value of one block: sum of per-outcome log likelihood ratios of
    star over circ.  circ must be interior (a boundary circ divides by zero mass)."""
    if not circ.interior:
        raise ValueError(f"circ must lie strictly inside (0,1)^2, got {circ}")
    out = 0.0
    for y in block.ys_a:
        out += bern_log_pmf(star.theta_a, y) - bern_log_pmf(circ.theta_a, y)
    for y in block.ys_b:
        out += bern_log_pmf(star.theta_b, y) - bern_log_pmf(circ.theta_b, y)
    return out


def equality_mixture_evalue(star: ThetaPair, block: Block, design: BlockDesign) -> float:
    """Log e-value of the equality-null mixture form.

    Every outcome's denominator is the mixture (n_a/n) p_a + (n_b/n) p_b of the
    two group pmfs, regardless of which group produced the outcome.  For
    Bernoulli streams this equals the projected form with both components at
    the n-weighted mean, which tests exploit as a cross-check.
    """
    w_a = design.n_a / design.n
    w_b = design.n_b / design.n
    out = 0.0
    for theta, ys in ((star.theta_a, block.ys_a), (star.theta_b, block.ys_b)):
        for y in ys:
            p_a = star.theta_a if y == 1 else 1.0 - star.theta_a
            p_b = star.theta_b if y == 1 else 1.0 - star.theta_b
            mix = w_a * p_a + w_b * p_b
            if mix == 0.0:
                raise ValueError(
                    f"mixture puts zero mass on observed outcome {y} under star={star}"
                )
            out += bern_log_pmf(theta, y) - math.log(mix)
    return out


@dataclass(frozen=True)
class EProcessState:
    """State of one e-process: counts seen so far, the running log e-value,
    and the number of completed blocks."""

    design: BlockDesign
    null: NullSpec
    prior: BetaPrior = BetaPrior()
    counts: GroupCounts = GroupCounts()
    log_e: float = 0.0
    m: int = 0
    clamp: float = DEFAULT_CLAMP

    def __post_init__(self) -> None:
        if not (0.0 < self.clamp < 0.5):
            raise ValueError(f"clamp must lie in (0, 0.5), got {self.clamp!r}")
        if self.counts.trials_a != self.m * self.design.n_a or (
            self.counts.trials_b != self.m * self.design.n_b
        ):
            raise ValueError(
                f"counts {self.counts} inconsistent with m={self.m} blocks of {self.design}"
            )
        if not math.isfinite(self.log_e):
            raise ValueError(f"log_e must be finite, got {self.log_e!r}")

    def plugin(self) -> ThetaPair:
        """Posterior-mean estimates from the counts seen so far, clamped interior."""
        lo, hi = self.clamp, 1.0 - self.clamp
        ta = min(max(posterior_mean(self.prior, self.counts, "a"), lo), hi)
        tb = min(max(posterior_mean(self.prior, self.counts, "b"), lo), hi)
        return ThetaPair(ta, tb)

    def update(self, block: Block) -> EProcessState:
        """Fold one completed block into the process.

        The plug-in uses only the counts from before this block; when it is a
        member of the null the increment is exactly 0.
        """
        if not block.matches(self.design):
            raise ValueError(f"block {block} does not match design {self.design}")
        theta = self.plugin()
        proj = project(self.null, theta, self.design)
        inc = 0.0 if proj.interior_hit else block_evalue(theta, proj.theta, block)
        return replace(
            self,
            counts=self.counts.add_block(block),
            log_e=self.log_e + inc,
            m=self.m + 1,
        )

    def evalue(self) -> float:
        return math.exp(self.log_e)

    def decision(self, alpha: float) -> Literal["reject", "continue"]:
        """Reject iff the e-value has reached 1/alpha (boundary counts as reject)."""
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
        return "reject" if self.log_e >= -math.log(alpha) else "continue"


_SNAPSHOT_HEADER = "# twostream e-process snapshot"


def _config_hash(design: BlockDesign, null: NullSpec, prior: BetaPrior, clamp: float) -> str:
    text = "|".join(
        repr(v)
        for v in (
            design.n_a,
            design.n_b,
            null.kind.value,
            null.s,
            null.c,
            null.delta,
            prior.alpha_a,
            prior.beta_a,
            prior.alpha_b,
            prior.beta_b,
            clamp,
        )
    )
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def to_snapshot(state: EProcessState) -> str:
    """Serialize a state as key=value lines so a stream can be resumed.

    Keys: version, n_a, n_b, null_kind, null_s, null_c, null_delta,
    prior_alpha_a, prior_beta_a, prior_alpha_b, prior_beta_b, clamp,
    m, log_e, ones_a, trials_a, ones_b, trials_b, config_hash.
    Floats are serialized with repr and round-trip exactly.
    """
    items = [
        ("version", SNAPSHOT_VERSION),
        ("n_a", state.design.n_a),
        ("n_b", state.design.n_b),
        ("null_kind", state.null.kind.value),
        ("null_s", repr(state.null.s)),
        ("null_c", repr(state.null.c)),
        ("null_delta", repr(state.null.delta)),
        ("prior_alpha_a", repr(state.prior.alpha_a)),
        ("prior_beta_a", repr(state.prior.beta_a)),
        ("prior_alpha_b", repr(state.prior.alpha_b)),
        ("prior_beta_b", repr(state.prior.beta_b)),
        ("clamp", repr(state.clamp)),
        ("m", state.m),
        ("log_e", repr(state.log_e)),
        ("ones_a", state.counts.ones_a),
        ("trials_a", state.counts.trials_a),
        ("ones_b", state.counts.ones_b),
        ("trials_b", state.counts.trials_b),
        ("config_hash", _config_hash(state.design, state.null, state.prior, state.clamp)),
    ]
    lines = [_SNAPSHOT_HEADER]
    lines.extend(f"{k}={v}" for k, v in items)
    return "\n".join(lines) + "\n"


def from_snapshot(text: str) -> EProcessState:
    """Parse a snapshot produced by to_snapshot, verifying version and config hash."""
    fields: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        fields[key] = value
    if int(fields["version"]) != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {fields['version']!r}")
    design = BlockDesign(int(fields["n_a"]), int(fields["n_b"]))
    null = NullSpec(
        NullKind(fields["null_kind"]),
        s=float(fields["null_s"]),
        c=float(fields["null_c"]),
        delta=float(fields["null_delta"]),
    )
    prior = BetaPrior(
        float(fields["prior_alpha_a"]),
        float(fields["prior_beta_a"]),
        float(fields["prior_alpha_b"]),
        float(fields["prior_beta_b"]),
    )
    clamp = float(fields["clamp"])
    expected = _config_hash(design, null, prior, clamp)
    if fields["config_hash"] != expected:
        raise ValueError("snapshot config hash mismatch; refusing to resume")
    counts = GroupCounts(
        int(fields["ones_a"]),
        int(fields["trials_a"]),
        int(fields["ones_b"]),
        int(fields["trials_b"]),
    )
    return EProcessState(
        design=design,
        null=null,
        prior=prior,
        counts=counts,
        log_e=float(fields["log_e"]),
        m=int(fields["m"]),
        clamp=clamp,
    )
