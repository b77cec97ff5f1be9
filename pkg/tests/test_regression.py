"""Beta blocks, closed forms, predictor equivalence and bias sensitivity."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ntkorigin import (
    ANALYTIC,
    AlphaVector,
    BoundaryTooClose,
    Direction,
    FeatureMismatch,
    FeatureSample,
    FeatureSpacePredictor,
    LinearTarget,
    MonteCarlo,
    Point,
    PointWisePredictor,
    Realization,
    SinusoidalTarget,
    TikhonovConfig,
    assemble_gram,
    beta_bias_sensitivity,
    beta_closed_form,
    beta_from_alpha,
    bias_sensitivity_limit,
    closed_form_context,
    predict,
    sample_features,
    shift_set,
    tikhonov_solve,
)

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)


def _training_set(seed=3, n=4, d=2, t=100.0):
    rng = np.random.default_rng(seed)
    phi = Realization(tuple(Point(r) for r in rng.uniform(-1, 1, (n, d))))
    v = Direction([0.6, -0.8])
    g = SinusoidalTarget(u=[0.9, 0.4], phase=0.1)
    return shift_set(phi, v, t, g), phi, v, g


class TestBetaFromAlpha:
    def test_zero_alpha_gives_zero_blocks(self):
        ts, *_ = _training_set()
        fs = sample_features(2, 16, seed=1)
        beta = beta_from_alpha(ts, AlphaVector(values=np.zeros(ts.n), delta=1.0), fs)
        assert np.array_equal(beta.beta1, np.zeros((16, 3)))
        assert np.array_equal(beta.beta2, np.zeros(16))

    def test_single_point_single_feature(self):
        phi = Realization((Point([1.0, 2.0]),))
        ts = shift_set(phi, Direction([1.0, 0.0]), 0.0, LinearTarget(a=[1.0, 0.0]))
        w = np.array([[0.5, 0.5, 0.5]])  # active on [1, 2, 1]
        fs = FeatureSample(weights=w, seed=0)
        a = 0.7
        beta = beta_from_alpha(ts, AlphaVector(values=np.array([a]), delta=1.0), fs)
        np.testing.assert_allclose(beta.beta1[0], a * np.array([1.0, 2.0, 1.0]), rtol=0)
        assert beta.beta2[0] == pytest.approx(a * 2.0, rel=1e-15)

    def test_inactive_feature_zero_block(self):
        phi = Realization((Point([1.0, 2.0]),))
        ts = shift_set(phi, Direction([1.0, 0.0]), 0.0, LinearTarget(a=[1.0, 0.0]))
        fs = FeatureSample(weights=np.array([[-1.0, -1.0, -1.0]]), seed=0)
        beta = beta_from_alpha(ts, AlphaVector(values=np.array([2.0]), delta=1.0), fs)
        assert np.array_equal(beta.beta1, np.zeros((1, 3)))
        assert np.array_equal(beta.beta2, np.zeros(1))

    def test_sample_mismatch_rejected(self):
        ts, *_ = _training_set()
        fs_a = sample_features(2, 8, seed=1)
        fs_b = sample_features(2, 8, seed=2)
        km = assemble_gram(ts, MonteCarlo(fs_a))
        alpha = tikhonov_solve(km, TikhonovConfig(delta=1e-8, mode="relative"), ts.labels)
        with pytest.raises(FeatureMismatch):
            beta_from_alpha(ts, alpha, fs_b)


class TestBetaClosedForm:
    def test_inactive_limit_indicator_zeroes_block(self):
        _, phi, v, g = _training_set()
        fs = sample_features(2, 64, seed=9)
        beta = beta_closed_form(phi, v, t=100.0, delta=0.5, kappa=1.0, g=g, fs=fs)
        inactive = (fs.weights @ -np.append(v.coords, 0.0)) < 0
        assert np.array_equal(beta.beta1[inactive], np.zeros((inactive.sum(), 3)))
        assert np.array_equal(beta.beta2[inactive], np.zeros(inactive.sum()))

    def test_zero_target_zero_blocks(self):
        _, phi, v, _ = _training_set()
        fs = sample_features(2, 16, seed=9)
        beta = beta_closed_form(phi, v, 100.0, 0.5, 1.0, LinearTarget(a=[0.0, 0.0], b=0.0), fs)
        assert np.array_equal(beta.beta1, np.zeros_like(beta.beta1))
        assert np.array_equal(beta.beta2, np.zeros_like(beta.beta2))

    def test_deviation_from_sampled_blocks_shrinks_with_t(self):
        """Oracle: beta blocks from the solved finite-t Monte Carlo gram; the
        closed form is their limit, with delta = t^1.5 keeping the Tikhonov
        term dominant over the order-t gram remainder."""
        _, phi, v, g = _training_set()
        kappa = v.norm**2
        fs = sample_features(2, 2000, seed=99)
        devs = []
        for t in (100.0, 1000.0, 10000.0):
            ts = shift_set(phi, v, t, g)
            delta = t**1.5
            km = assemble_gram(ts, MonteCarlo(fs))
            alpha = tikhonov_solve(km, TikhonovConfig(delta=delta), ts.labels)
            sampled = beta_from_alpha(ts, alpha, fs)
            closed = beta_closed_form(phi, v, t, delta, kappa, g, fs)
            active = np.abs(closed.beta2) > 0
            d1 = np.abs(closed.beta1[active] - sampled.beta1[active]).max() / np.abs(closed.beta1[active]).max()
            d2 = np.abs(closed.beta2[active] - sampled.beta2[active]).max() / np.abs(closed.beta2[active]).max()
            devs.append(max(d1, d2))
        assert devs[2] < devs[1] < devs[0]


class TestPredict:
    def test_zero_labels_zero_everywhere(self):
        ts, *_ = _training_set()
        zero_ts = shift_set(ts.realization, ts.direction, ts.t, LinearTarget(a=[0.0, 0.0], b=0.0))
        alpha = tikhonov_solve(assemble_gram(zero_ts, ANALYTIC), TikhonovConfig(delta=0.5), zero_ts.labels)
        pred = PointWisePredictor(training=zero_ts, alpha=alpha, mode=ANALYTIC)
        for x in ([0.0, 0.0], [1.0, -1.0], [10.0, 3.0]):
            assert predict(pred, Point(x)) == 0.0

    def test_single_point_ridge_identity(self):
        phi = Realization((Point([0.4, -0.3]),))
        g = LinearTarget(a=[0.0, 0.0], b=2.0)
        ts = shift_set(phi, Direction([1.0, 0.0]), 5.0, g)
        delta = 0.25
        km = assemble_gram(ts, ANALYTIC)
        alpha = tikhonov_solve(km, TikhonovConfig(delta=delta), ts.labels)
        pred = PointWisePredictor(training=ts, alpha=alpha, mode=ANALYTIC)
        z = Point(ts.shifted[0])
        kzz = km.entries[0, 0]
        expected = kzz / (kzz + delta) * 2.0
        assert predict(pred, z) == pytest.approx(expected, rel=1e-12)
        assert predict(pred, z) < 2.0

    def test_pointwise_equals_feature_space(self):
        ts, *_ = _training_set(n=8, t=100.0)
        fs = sample_features(2, 10**4, seed=44)
        km = assemble_gram(ts, MonteCarlo(fs))
        alpha = tikhonov_solve(km, TikhonovConfig(delta=1e-8, mode="relative"), ts.labels)
        pw = PointWisePredictor(training=ts, alpha=alpha, mode=MonteCarlo(fs))
        fsp = FeatureSpacePredictor(beta=beta_from_alpha(ts, alpha, fs))
        rng = np.random.default_rng(21)
        for _ in range(100):
            x = Point(rng.uniform(-3, 3, 2))
            a = predict(pw, x)
            b = predict(fsp, x)
            assert abs(a - b) <= 1e-9 * (1.0 + abs(a))


class TestBiasSensitivity:
    @staticmethod
    def _context(t=10.0, delta=0.01, n=2):
        # g_sum = 3 via a constant target of 1.5 per point.
        phi = Realization((Point([0.3, -0.4]), Point([0.1, 0.2]))[:n])
        v = Direction([0.6, -0.8])
        ts = shift_set(phi, v, t, LinearTarget(a=[0.0, 0.0], b=1.5))
        return closed_form_context(ts, kappa=1.0, delta=delta), v

    def test_frozen_two_point_value(self):
        ctx, v = self._context()
        w = np.array([-0.6, 0.8, 0.3])  # <w, -v_hat> = 1 > 0, active
        got = beta_bias_sensitivity(ctx, w, v)
        assert got == pytest.approx(3.0 / 200.01, rel=1e-9)
        assert bias_sensitivity_limit(ctx) == pytest.approx(0.0149992500374981, rel=1e-12)

    def test_inactive_weight_zero(self):
        ctx, v = self._context()
        w = np.array([0.6, -0.8, 0.3])  # <w, -v_hat> = -1 < 0
        assert beta_bias_sensitivity(ctx, w, v) == 0.0

    def test_t_squared_scaling(self):
        ctx_small, v = self._context(t=10.0)
        ctx_big, _ = self._context(t=100.0)
        w = np.array([-0.6, 0.8, 0.3])
        ratio = beta_bias_sensitivity(ctx_small, w, v) / beta_bias_sensitivity(ctx_big, w, v)
        assert ratio == pytest.approx((200.0 * 100.0 + 0.01) / (200.0 + 0.01), rel=1e-9)
        assert ratio == pytest.approx(100.0, rel=5e-2)

    def test_boundary_guard(self):
        ctx, v = self._context()
        w = np.array([-0.6e-9, 0.8e-9, 0.3])  # <w, -v_hat> = 1e-9, inside the guard
        with pytest.raises(BoundaryTooClose):
            beta_bias_sensitivity(ctx, w, v)

    def test_beta1_insensitive_to_bias_coordinate(self):
        ctx, v = self._context(t=100.0, delta=1e-4)
        rng = np.random.default_rng(31)
        checked = 0
        while checked < 20:
            w = rng.standard_normal(3)
            if abs(np.dot(w, -np.append(v.coords, 0.0))) < 1e-2:
                continue
            checked += 1
            h = 1e-4 * (1.0 + abs(w[-1]))
            up, dn = w.copy(), w.copy()
            up[-1] += h
            dn[-1] -= h
            diff = np.abs(ctx.beta1_at(up) - ctx.beta1_at(dn)).max() / (2 * h)
            assert diff <= 1e-10

    def test_sensitivity_matches_law_for_random_weights(self):
        ts, phi, v, g = _training_set(t=1000.0)
        ctx = closed_form_context(ts, kappa=v.norm**2, delta=1e-6 * v.norm**2 * 1000.0**2)
        law = bias_sensitivity_limit(ctx)
        rng = np.random.default_rng(5)
        checked = 0
        while checked < 20:
            w = rng.standard_normal(3)
            try:
                fd = beta_bias_sensitivity(ctx, w, v)
            except BoundaryTooClose:
                continue
            checked += 1
            expected = law if ctx.active(w) else 0.0
            if expected:
                assert fd == pytest.approx(expected, rel=1e-6)
            else:
                assert fd == 0.0


class TestCheckNotationEquivalence:
    @given(
        st.lists(finite, min_size=2, max_size=5),
        st.lists(finite, min_size=2, max_size=5),
    )
    @settings(max_examples=60, deadline=None)
    def test_inner_product_ignores_bias_slot(self, wd, vd):
        # <w_check, v> computed in d coordinates equals <w, v_hat> in d+1.
        d = min(len(wd), len(vd))
        if not any(x != 0.0 for x in vd[:d]):
            return
        w = np.array(wd[:d] + [123.456])
        v = Direction(vd[:d])
        assert float(np.dot(w[:-1], v.coords)) == float(np.dot(w, np.append(v.coords, 0.0)))
