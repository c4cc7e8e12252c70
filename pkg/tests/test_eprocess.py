"""Block e-values, the plug-in e-process, decisions, and snapshots."""

import math

import numpy as np
import pytest

from twostream import (
    BetaPrior,
    Block,
    BlockDesign,
    EProcessState,
    GroupCounts,
    NullSpec,
    ThetaPair,
    block_evalue,
    equality_mixture_evalue,
    from_snapshot,
    generate_stream,
    posterior_mean,
    project_equality,
    to_snapshot,
)
from twostream.eprocess import _config_hash

from conftest import enumeration_mean, eprocess_oracle

D11 = BlockDesign(1, 1)


class TestBetaPrior:
    def test_default_is_regrow_value(self):
        prior = BetaPrior()
        assert prior == BetaPrior.symmetric(0.18)

    def test_positive_required(self):
        with pytest.raises(ValueError):
            BetaPrior(alpha_a=0.0)
        with pytest.raises(ValueError):
            BetaPrior(beta_b=-1.0)


class TestPosteriorMean:
    def test_empty_counts_symmetric_prior(self):
        assert posterior_mean(BetaPrior(), GroupCounts(), "a") == 0.5

    def test_hand_value(self):
        counts = GroupCounts(3, 10, 0, 0)
        assert posterior_mean(BetaPrior(), counts, "a") == pytest.approx(
            3.18 / 10.36, rel=1e-14
        )

    def test_uniform_prior(self):
        counts = GroupCounts(0, 0, 5, 8)
        assert posterior_mean(BetaPrior.symmetric(1.0), counts, "b") == pytest.approx(0.6)

    def test_bad_group(self):
        with pytest.raises(ValueError):
            posterior_mean(BetaPrior(), GroupCounts(), "c")


class TestBlockEvalue:
    def test_star_equals_circ_gives_unit_evalue(self):
        star = ThetaPair(0.4, 0.6)
        assert block_evalue(star, star, Block((1,), (0,))) == 0.0

    def test_hand_values(self):
        star, circ = ThetaPair(0.3, 0.7), ThetaPair(0.5, 0.5)
        up = block_evalue(star, circ, Block((0,), (1,)))
        down = block_evalue(star, circ, Block((1,), (0,)))
        assert up == pytest.approx(math.log(1.96), rel=1e-12)
        assert down == pytest.approx(math.log(0.36), rel=1e-12)

    def test_boundary_circ_rejected(self):
        with pytest.raises(ValueError):
            block_evalue(ThetaPair(0.3, 0.7), ThetaPair(0.5, 1.0), Block((0,), (1,)))

    def test_boundary_star_allowed(self):
        value = block_evalue(ThetaPair(1.0, 0.5), ThetaPair(0.5, 0.5), Block((0,), (1,)))
        assert value == -math.inf


class TestEqualityMixture:
    def test_unit_for_symmetric_star(self):
        assert equality_mixture_evalue(ThetaPair(0.5, 0.5), Block((1,), (0,)), D11) == 0.0

    def test_hand_value(self):
        got = equality_mixture_evalue(ThetaPair(0.3, 0.7), Block((0,), (1,)), D11)
        assert got == pytest.approx(math.log(1.96), rel=1e-12)

    def test_matches_projected_form(self, rng):
        """The per-outcome mixture denominator equals the pmf at the projected
        point, so both e-value routes agree (here to 1e-12; the full-scale
        version is an acceptance criterion)."""
        for _ in range(300):
            n_a, n_b = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            design = BlockDesign(n_a, n_b)
            star = ThetaPair(*rng.uniform(0.02, 0.98, 2))
            block = Block(tuple(rng.integers(0, 2, n_a)), tuple(rng.integers(0, 2, n_b)))
            circ = project_equality(star, design).theta
            assert equality_mixture_evalue(star, block, design) == pytest.approx(
                block_evalue(star, circ, block), abs=1e-12
            )

    def test_degenerate_mixture_rejected(self):
        with pytest.raises(ValueError):
            equality_mixture_evalue(ThetaPair(0.0, 0.0), Block((1,), (0,)), D11)


class TestEProcessUpdate:
    def test_first_block_is_member_for_equality(self):
        state = EProcessState(D11, NullSpec.equality())
        after = state.update(Block((1,), (0,)))
        assert after.log_e == 0.0
        assert after.m == 1
        assert after.counts == GroupCounts(1, 1, 0, 1)

    def test_member_blocks_contribute_exactly_zero(self):
        null = NullSpec.halfplane_le(0.6, 1.0)
        state = EProcessState(D11, null)
        # the plug-in starts at (0.5, 0.5), inside theta_b <= 0.6 + theta_a
        after = state.update(Block((0,), (1,)))
        assert after.log_e == 0.0

    def test_block_must_match_design(self):
        state = EProcessState(BlockDesign(2, 1), NullSpec.equality())
        with pytest.raises(ValueError):
            state.update(Block((1,), (0,)))

    def test_oracle_equivalence_100_blocks(self):
        """The state chain reproduces an independent term-by-term recomputation."""
        blocks = generate_stream(ThetaPair(0.2, 0.8), D11, 100, 2024)
        for null in (
            NullSpec.equality(),
            NullSpec.line(0.1, 1.0),
            NullSpec.halfplane_le(0.1, 1.0),
            NullSpec.log_odds_le(1.0),
        ):
            state = EProcessState(D11, null)
            for block in blocks:
                state = state.update(block)
            expected = eprocess_oracle(blocks, null, D11, BetaPrior())
            assert state.log_e == pytest.approx(expected, abs=1e-10)
            assert state.m == 100

    def test_no_lookahead_composition(self):
        """Updating with B1 then B2 adds increments computed with the correctly
        interleaved plug-ins; neither increment may use its own block."""
        b1, b2 = Block((1,), (0,)), Block((1,), (1,))
        null = NullSpec.line(0.1, 1.0)
        s0 = EProcessState(D11, null)
        s1 = s0.update(b1)
        s2 = s1.update(b2)
        inc1 = eprocess_oracle([b1], null, D11, BetaPrior())
        inc2 = eprocess_oracle([b1, b2], null, D11, BetaPrior()) - inc1
        assert s1.log_e == pytest.approx(inc1, abs=1e-12)
        assert s2.log_e == pytest.approx(inc1 + inc2, abs=1e-12)

    def test_state_invariants_enforced(self):
        with pytest.raises(ValueError):
            EProcessState(D11, NullSpec.equality(), counts=GroupCounts(0, 3, 0, 2), m=2)
        with pytest.raises(ValueError):
            EProcessState(D11, NullSpec.equality(), log_e=math.inf)
        with pytest.raises(ValueError):
            EProcessState(D11, NullSpec.equality(), clamp=0.7)


class TestDecision:
    def test_threshold_cases(self):
        state = EProcessState(D11, NullSpec.equality())
        assert state.decision(0.05) == "continue"
        at = EProcessState(D11, NullSpec.equality(), log_e=-math.log(0.05))
        assert at.decision(0.05) == "reject"
        below = EProcessState(D11, NullSpec.equality(), log_e=math.log(19.9))
        assert below.decision(0.05) == "continue"
        above = EProcessState(D11, NullSpec.equality(), log_e=math.log(20.1))
        assert above.decision(0.05) == "reject"

    def test_alpha_domain(self):
        state = EProcessState(D11, NullSpec.equality())
        for alpha in (0.0, 1.0, 1.5, -0.1):
            with pytest.raises(ValueError):
                state.decision(alpha)


class TestEVariableProperty:
    def test_sharpness_at_equality_projection(self):
        """star (0.3, 0.7) against the balanced equality projection: the four
        outcome factors are 0.84, 1.96, 0.36, 0.84 and average exactly 1."""
        star, circ = ThetaPair(0.3, 0.7), ThetaPair(0.5, 0.5)
        factors = [
            math.exp(block_evalue(star, circ, Block((ya,), (yb,))))
            for ya in (0, 1)
            for yb in (0, 1)
        ]
        assert factors == pytest.approx([0.84, 1.96, 0.36, 0.84], rel=1e-12)
        mean = enumeration_mean(star, circ, ThetaPair(0.5, 0.5))
        assert mean == pytest.approx(1.0, abs=1e-12)

    def test_expectation_bounded_on_null_quick(self, rng):
        """E[S] <= 1 for every null point, enumerated exactly (reduced-size cut
        of the acceptance criterion)."""
        from twostream import project
        from conftest import boundary_points, random_null, random_star

        for _ in range(20):
            null = random_null(rng)
            star = random_star(rng)
            circ = project(null, star, D11).theta
            for theta in boundary_points(null, 25):
                assert enumeration_mean(star, circ, theta) <= 1.0 + 1e-9


class TestTypeOneErrorQuick:
    def test_desk_scale(self):
        """Reduced-size any-time rejection frequency check (full scale is an
        acceptance criterion)."""
        from twostream import SimConfig, run_type1

        config = SimConfig(
            star=ThetaPair(0.1, 0.1),
            design=D11,
            m_max=100,
            n_streams=400,
            seed=99,
            null=NullSpec.equality(),
        )
        result = run_type1(config)
        assert result.frequency <= config.alpha + 3 * result.mc_sigma


class TestSnapshot:
    def _state(self):
        state = EProcessState(BlockDesign(2, 1), NullSpec.halfplane_le(0.1, 1.0))
        for block in generate_stream(ThetaPair(0.3, 0.6), BlockDesign(2, 1), 7, 5):
            state = state.update(block)
        return state

    def test_round_trip_is_exact(self):
        state = self._state()
        restored = from_snapshot(to_snapshot(state))
        assert restored == state

    def test_versioned_header(self):
        text = to_snapshot(self._state())
        assert text.splitlines()[0].startswith("#")
        assert "version=1" in text

    def test_tampered_config_detected(self):
        text = to_snapshot(self._state()).replace("null_s=0.1", "null_s=0.2")
        with pytest.raises(ValueError, match="hash"):
            from_snapshot(text)

    def test_unknown_version_rejected(self):
        text = to_snapshot(self._state()).replace("version=1", "version=9")
        with pytest.raises(ValueError, match="version"):
            from_snapshot(text)

    def test_hash_covers_all_config(self):
        base = _config_hash(D11, NullSpec.equality(), BetaPrior(), 1e-12)
        assert base != _config_hash(BlockDesign(2, 1), NullSpec.equality(), BetaPrior(), 1e-12)
        assert base != _config_hash(D11, NullSpec.line(0.0, 1.0), BetaPrior(), 1e-12)
        assert base != _config_hash(D11, NullSpec.equality(), BetaPrior.symmetric(1.0), 1e-12)
        assert base != _config_hash(D11, NullSpec.equality(), BetaPrior(), 1e-6)
