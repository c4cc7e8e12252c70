"""Null set construction and membership."""

import math

import pytest

from twostream import NullKind, NullSpec, ThetaPair


class TestConstruction:
    def test_variants_build(self):
        assert NullSpec.equality().kind is NullKind.EQUALITY
        assert NullSpec.line(0.1, 1.0).kind is NullKind.LINE
        assert NullSpec.halfplane_le(0.1, 1.0).kind is NullKind.HALFPLANE_LE
        assert NullSpec.halfplane_ge(0.1, 1.0).kind is NullKind.HALFPLANE_GE
        assert NullSpec.log_odds_le(2.0).kind is NullKind.LOG_ODDS_LE
        assert NullSpec.log_odds_ge(-2.0).kind is NullKind.LOG_ODDS_GE

    def test_line_must_cross_interior(self):
        with pytest.raises(ValueError):
            NullSpec.line(1.5, 0.0)  # horizontal line above the square
        with pytest.raises(ValueError):
            NullSpec.line(-1.0, 1.0)  # touches only the corner (1, 0)
        with pytest.raises(ValueError):
            NullSpec.line(1.0, 1.0)  # touches only the corner (0, 1)
        with pytest.raises(ValueError):
            NullSpec.halfplane_le(2.0, 0.0)

    def test_horizontal_line_inside_is_fine(self):
        null = NullSpec.line(0.4, 0.0)
        assert null.line_segment() == (0.0, 1.0)

    def test_delta_must_be_finite(self):
        with pytest.raises(ValueError):
            NullSpec.log_odds_le(math.inf)
        with pytest.raises(ValueError):
            NullSpec.log_odds_ge(math.nan)

    def test_log_odds_sides_must_be_convex(self):
        with pytest.raises(ValueError):
            NullSpec.log_odds_le(-0.5)
        with pytest.raises(ValueError):
            NullSpec.log_odds_ge(0.5)
        NullSpec.log_odds_le(0.0)
        NullSpec.log_odds_ge(0.0)

    def test_line_segment_values(self):
        lo, hi = NullSpec.line(0.1, 1.0).line_segment()
        assert lo == 0.0 and hi == pytest.approx(0.9)
        lo, hi = NullSpec.line(0.0, 2.5).line_segment()
        assert lo == 0.0 and hi == pytest.approx(0.4)
        lo, hi = NullSpec.line(0.8, -1.0).line_segment()
        assert lo == pytest.approx(0.0) and hi == pytest.approx(0.8)


class TestMembership:
    def test_equality(self):
        null = NullSpec.equality()
        assert null.contains(ThetaPair(0.4, 0.4))
        assert not null.contains(ThetaPair(0.4, 0.41))

    def test_halfplane_le(self):
        null = NullSpec.halfplane_le(0.1, 1.0)
        assert not null.contains(ThetaPair(0.2, 0.5))  # 0.5 > 0.1 + 0.2
        assert null.contains(ThetaPair(0.2, 0.3))  # boundary is included
        assert null.contains(ThetaPair(0.3, 0.2))

    def test_halfplane_ge(self):
        null = NullSpec.halfplane_ge(0.1, 1.0)
        assert null.contains(ThetaPair(0.2, 0.5))
        assert not null.contains(ThetaPair(0.3, 0.2))
        # exactly representable boundary point: 0.125 + 0.25 == 0.375
        exact = NullSpec.halfplane_ge(0.125, 1.0)
        assert exact.contains(ThetaPair(0.25, 0.375))
        assert NullSpec.halfplane_le(0.125, 1.0).contains(ThetaPair(0.25, 0.375))

    def test_line_membership_is_exact(self):
        null = NullSpec.line(0.0, 1.0)
        assert null.contains(ThetaPair(0.5, 0.5))
        assert not null.contains(ThetaPair(0.5, 0.5 + 1e-15))

    def test_log_odds_zero_case(self):
        assert NullSpec.log_odds_le(2.0).contains(ThetaPair(0.5, 0.5))
        assert not NullSpec.log_odds_le(-2.0).contains(ThetaPair(0.5, 0.5))
        assert NullSpec.log_odds_ge(-2.0).contains(ThetaPair(0.5, 0.5))

    def test_log_odds_boundary_curve(self):
        null = NullSpec.log_odds_le(2.0)
        ta = 0.3
        tb = null.boundary_theta_b(ta)
        assert null.contains(ThetaPair(ta, tb))
        assert not null.contains(ThetaPair(ta, min(1.0, tb + 1e-9)))

    def test_log_odds_edges_resolved_by_limits(self):
        le = NullSpec.log_odds_le(1.0)
        ge = NullSpec.log_odds_ge(1.0)
        # log-odds +inf at (0, .5) and (.5, 1); -inf at (1, .5) and (.5, 0)
        assert not le.contains(ThetaPair(0.0, 0.5))
        assert ge.contains(ThetaPair(0.0, 0.5))
        assert le.contains(ThetaPair(1.0, 0.5))
        assert not ge.contains(ThetaPair(0.5, 0.0))

    def test_log_odds_corners_belong_to_every_set(self):
        for null in (NullSpec.log_odds_le(-3.0), NullSpec.log_odds_ge(3.0)):
            assert null.contains(ThetaPair(0.0, 0.0))
            assert null.contains(ThetaPair(1.0, 1.0))


def test_describe_smoke():
    assert "theta" in NullSpec.equality().describe()
    assert "<=" in NullSpec.halfplane_le(0.1, 1.0).describe()
    assert "log-odds" in NullSpec.log_odds_ge(-2.0).describe()
