"""Parameter containers, the convexity gap, and weighted norms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robinfk.core import (
    ProblemParams,
    Tolerances,
    ball_radius_for_volume,
    ball_volume,
    lindqvist_constant_estimate,
    lindqvist_gap,
    lindqvist_gap_many,
    lp_norm,
    unit_ball_volume,
)


class TestProblemParams:
    def test_valid(self):
        pp = ProblemParams(p=1.5, beta=0.0, dim=3)
        assert pp.p == 1.5 and pp.beta == 0.0 and pp.dim == 3

    @pytest.mark.parametrize("p", [1.0, 0.5, -1.0, float("nan"), float("inf")])
    def test_bad_p(self, p):
        with pytest.raises(ValueError):
            ProblemParams(p=p, beta=1.0)

    @pytest.mark.parametrize("beta", [-0.1, float("nan"), float("inf")])
    def test_bad_beta(self, beta):
        with pytest.raises(ValueError):
            ProblemParams(p=2.0, beta=beta)

    @pytest.mark.parametrize("dim", [1, 0, -2, 2.5])
    def test_bad_dim(self, dim):
        with pytest.raises(ValueError):
            ProblemParams(p=2.0, beta=1.0, dim=dim)

    def test_g_cap(self):
        assert ProblemParams(p=1.5, beta=10.0).g_cap == pytest.approx(100.0)
        assert ProblemParams(p=3.0, beta=4.0).g_cap == pytest.approx(2.0)

    def test_round_trip(self):
        pp = ProblemParams(p=2.5, beta=0.3, dim=2)
        assert ProblemParams.from_dict(pp.to_dict()) == pp


class TestTolerances:
    def test_defaults(self):
        t = Tolerances()
        assert t.ode_step == 1.0 / 4096.0
        assert t.eig_bisect_tol == 1.0e-10
        assert t.descent_rel_tol == 1.0e-10
        assert t.level_rel_tol == 2.0e-2

    @pytest.mark.parametrize(
        "kw",
        [
            {"ode_step": 0.0},
            {"ode_step": -1.0e-3},
            {"ode_step": 0.5},
            {"eig_bisect_tol": 0.0},
            {"descent_rel_tol": float("nan")},
            {"level_rel_tol": -1.0},
        ],
    )
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            Tolerances(**kw)


class TestBallVolume:
    def test_known_values(self):
        assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
        assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-15)
        assert ball_volume(2.0, 2) == pytest.approx(4.0 * math.pi, rel=1e-15)

    def test_radius_inverts_volume(self):
        for dim in (2, 3, 4):
            assert ball_radius_for_volume(ball_volume(1.7, dim), dim) == pytest.approx(1.7, rel=1e-14)

    def test_radius_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            ball_radius_for_volume(0.0, 2)


class TestLindqvistGap:
    def test_hand_value_opposite_unit_vectors(self):
        # xi1=(1,0), xi2=(-1,0), p=2: 1 - 1 - 2*(1,0).(-2,0) = 4
        assert lindqvist_gap([1.0, 0.0], [-1.0, 0.0], 2.0) == pytest.approx(4.0, abs=1e-15)

    def test_zero_xi1_convention(self):
        # gap at xi1 = 0 is |xi2|^p for every p, including p < 2
        assert lindqvist_gap([0.0, 0.0], [2.0, 0.0], 1.5) == pytest.approx(2.0**1.5, rel=1e-15)
        assert lindqvist_gap([0.0], [3.0], 3.0) == pytest.approx(27.0, rel=1e-15)

    def test_equal_arguments_give_zero(self):
        assert lindqvist_gap([0.3, -0.4], [0.3, -0.4], 2.7) == pytest.approx(0.0, abs=1e-15)

    def test_p2_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a, b = rng.standard_normal(3), rng.standard_normal(3)
            assert lindqvist_gap(a, b, 2.0) == pytest.approx(
                float(np.sum((b - a) ** 2)), rel=1e-12, abs=1e-12
            )

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            lindqvist_gap([1.0, 0.0], [1.0], 2.0)

    def test_bad_p(self):
        with pytest.raises(ValueError):
            lindqvist_gap([1.0], [2.0], 1.0)

    @given(
        st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=4),
        st.floats(1.0 + 1e-6, 6.0),
        st.data(),
    )
    @settings(max_examples=300, deadline=None)
    def test_nonnegative_property(self, xi1, p, data):
        xi2 = data.draw(
            st.lists(st.floats(-50, 50, allow_nan=False), min_size=len(xi1), max_size=len(xi1))
        )
        assert lindqvist_gap(xi1, xi2, p) >= -1e-12

    def test_many_matches_scalar(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((64, 2))
        b = rng.standard_normal((64, 2))
        a[::7] = 0.0  # exercise the xi1 = 0 branch
        for p in (1.5, 2.0, 3.0):
            gaps = lindqvist_gap_many(a, b, p)
            for i in range(64):
                assert gaps[i] == pytest.approx(lindqvist_gap(a[i], b[i], p), rel=1e-12, abs=1e-12)

    def test_constant_estimate_positive(self):
        # the normalized gap should be bounded away from zero in both regimes
        assert lindqvist_constant_estimate(3.0, n_samples=20_000) > 0.0
        assert lindqvist_constant_estimate(1.5, n_samples=20_000) > 0.0


class TestLpNorm:
    def test_hand_value(self):
        # single cell of measure pi and value 2 at p = 2: sqrt(4 pi)
        assert lp_norm([2.0], [math.pi], 2.0) == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-15)

    def test_homogeneity(self):
        rng = np.random.default_rng(3)
        v = rng.standard_normal(40)
        w = rng.uniform(0.1, 2.0, 40)
        for p in (1.5, 2.0, 3.0):
            assert lp_norm(3.0 * v, w, p) == pytest.approx(3.0 * lp_norm(v, w, p), rel=1e-12)

    @given(st.floats(1.1, 5.0), st.integers(1, 30), st.integers(0, 10_000))
    @settings(max_examples=100, deadline=None)
    def test_triangle_inequality(self, p, n, seed):
        rng = np.random.default_rng(seed)
        u, v = rng.standard_normal(n), rng.standard_normal(n)
        w = rng.uniform(0.5, 1.5, n)
        assert lp_norm(u + v, w, p) <= lp_norm(u, w, p) + lp_norm(v, w, p) + 1e-10

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            lp_norm([1.0], [0.0], 2.0)
        with pytest.raises(ValueError):
            lp_norm([1.0], [-1.0], 2.0)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            lp_norm([1.0, 2.0], [1.0], 2.0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            lp_norm([], [], 2.0)
