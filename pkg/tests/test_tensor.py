"""
Tests for the tensor core: primitives, naive-loop oracles and gradients.
"""

import math

import numpy as np
import pytest

from src.core.errors import KernelTooLargeError, ShapeError, UninitializedStatisticsError
from src.tensor import (
    Activation,
    BatchNormState,
    Conv3dSpec,
    GradTape,
    Mode,
    Tensor,
    add,
    as_params,
    backward,
    batchnorm,
    conv3d,
    dense,
    dropout,
    flatten,
    grad_check,
    lstm_cell,
    maxpool3d,
    mul,
    relu,
    scale,
    softmax,
    softmax_crossentropy,
    sum_all,
)


def naive_conv3d(x, w, b, stride=(1, 1, 1)):
    T, H, W, C = x.shape
    K, kt, kh, kw, _ = w.shape
    st, sh, sw = stride
    to, ho, wo = (T - kt) // st + 1, (H - kh) // sh + 1, (W - kw) // sw + 1
    out = np.zeros((to, ho, wo, K))
    for t in range(to):
        for i in range(ho):
            for j in range(wo):
                for k in range(K):
                    acc = b[k]
                    for a in range(kt):
                        for p in range(kh):
                            for q in range(kw):
                                for c in range(C):
                                    acc += x[t * st + a, i * sh + p, j * sw + q, c] * w[k, a, p, q, c]
                    out[t, i, j, k] = acc
    return out


def naive_maxpool(x, window):
    wt, wh, ww = window
    T, H, W, C = x.shape
    out = np.zeros((T // wt, H // wh, W // ww, C))
    for t in range(T // wt):
        for i in range(H // wh):
            for j in range(W // ww):
                for c in range(C):
                    out[t, i, j, c] = x[t * wt : (t + 1) * wt, i * wh : (i + 1) * wh, j * ww : (j + 1) * ww, c].max()
    return out


def naive_matmul(x, w, b):
    n, k = x.shape
    m = w.shape[1]
    out = np.zeros((n, m))
    for r in range(n):
        for c in range(m):
            acc = b[c]
            for i in range(k):
                acc += x[r, i] * w[i, c]
            out[r, c] = acc
    return out


class TestTensor:
    """Tests for the Tensor carrier."""

    def test_zero_dim_rejected(self):
        """A zero-length axis is a shape error."""
        with pytest.raises(ShapeError):
            Tensor(np.zeros((0, 3)))

    def test_float64(self):
        """Data is stored as float64."""
        t = Tensor([1, 2, 3])
        assert t.data.dtype == np.float64
        assert t.shape == (3,)

    def test_item_needs_scalar(self):
        """item() on a vector is a shape error."""
        with pytest.raises(ShapeError):
            Tensor([1.0, 2.0]).item()


class TestConv3d:
    """Tests for valid 3D convolution."""

    def test_scaling_identity(self):
        """A 1x1x1 kernel of value 2 doubles the input."""
        spec = Conv3dSpec(1, 1, kernel=(1, 1, 1))
        out = conv3d(
            Tensor(np.ones((4, 4, 4, 1))),
            spec,
            Tensor(np.full((1, 1, 1, 1, 1), 2.0)),
            Tensor(np.zeros(1)),
        )
        assert out.shape == (4, 4, 4, 1)
        np.testing.assert_array_equal(out.data, 2.0)

    def test_output_dims_full_scale(self):
        """Shape arithmetic for 30x128x128x3 with 8 kernels of 3x3x3."""
        spec = Conv3dSpec(3, 8)
        assert spec.output_dims((30, 128, 128)) == (28, 126, 126)
        assert spec.weight_shape == (8, 3, 3, 3, 3)

    def test_matches_naive_oracle_seed7(self):
        """Random 5x6x6x2 input, 3 kernels, seed 7."""
        rng = np.random.default_rng(7)
        x = rng.normal(size=(5, 6, 6, 2))
        w = rng.normal(size=(3, 3, 3, 3, 2))
        b = rng.normal(size=3)
        out = conv3d(Tensor(x), Conv3dSpec(2, 3), Tensor(w), Tensor(b))
        np.testing.assert_allclose(out.data, naive_conv3d(x, w, b), atol=1e-9, rtol=0)

    @pytest.mark.parametrize("seed", range(50))
    def test_random_instances_match_oracle(self, seed):
        """Random shapes agree with the loop oracle."""
        rng = np.random.default_rng(1000 + seed)
        cin, cout = rng.integers(1, 4, size=2)
        kernel = tuple(int(k) for k in rng.integers(1, 4, size=3))
        stride = tuple(int(s) for s in rng.integers(1, 3, size=3))
        dims = tuple(int(rng.integers(k, 7)) for k in kernel)
        x = rng.normal(size=(*dims, cin))
        w = rng.normal(size=(cout, *kernel, cin))
        b = rng.normal(size=cout)
        spec = Conv3dSpec(int(cin), int(cout), kernel, stride)
        out = conv3d(Tensor(x), spec, Tensor(w), Tensor(b))
        np.testing.assert_allclose(out.data, naive_conv3d(x, w, b, stride), atol=1e-9, rtol=0)

    def test_kernel_too_large(self):
        """Kernel larger than the input names the axis."""
        spec = Conv3dSpec(1, 1, kernel=(3, 3, 3))
        with pytest.raises(KernelTooLargeError) as info:
            conv3d(Tensor(np.ones((2, 5, 5, 1))), spec, Tensor(np.ones((1, 3, 3, 3, 1))), Tensor(np.zeros(1)))
        assert info.value.axis == "time"

    def test_channel_mismatch(self):
        """Kernel channels must match the input channels."""
        spec = Conv3dSpec(2, 1)
        with pytest.raises(ShapeError) as info:
            conv3d(Tensor(np.ones((4, 4, 4, 1))), spec, Tensor(np.ones((1, 3, 3, 3, 2))), Tensor(np.zeros(1)))
        assert info.value.axis == "channels"

    def test_only_valid_padding(self):
        """Padding other than valid is refused."""
        with pytest.raises(ValueError):
            Conv3dSpec(1, 1, padding="same")


class TestMaxPool3d:
    """Tests for non-overlapping 3D max pooling."""

    def test_single_window(self):
        """2x2x2 of [1..8] pools to 8."""
        x = np.arange(1.0, 9.0).reshape(2, 2, 2, 1)
        out, argmax = maxpool3d(Tensor(x))
        assert out.shape == (1, 1, 1, 1)
        assert out.data.item() == 8.0
        assert argmax.item() == 7

    def test_constant_input(self):
        """A constant volume pools to the same constant."""
        out, _ = maxpool3d(Tensor(np.full((4, 4, 4, 2), 3.5)))
        np.testing.assert_array_equal(out.data, 3.5)

    def test_ties_go_to_lowest_index(self):
        """Equal values pick the first position."""
        _, argmax = maxpool3d(Tensor(np.zeros((2, 2, 2, 1))))
        assert argmax.item() == 0

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_brute_force(self, seed):
        """Random windows agree with a brute-force max."""
        rng = np.random.default_rng(seed)
        window = tuple(int(k) for k in rng.integers(1, 3, size=3))
        dims = tuple(int(rng.integers(k, 7)) for k in window)
        x = rng.normal(size=(*dims, int(rng.integers(1, 4))))
        out, _ = maxpool3d(Tensor(x), window)
        np.testing.assert_array_equal(out.data, naive_maxpool(x, window))

    def test_window_too_large(self):
        """A window longer than the time axis is refused."""
        with pytest.raises(KernelTooLargeError):
            maxpool3d(Tensor(np.ones((1, 4, 4, 1))), (2, 2, 2))


class TestBatchNorm:
    """Tests for channel-wise batch normalization."""

    def test_train_mode_normalizes(self):
        """Train mode gives zero mean and unit variance per channel."""
        rng = np.random.default_rng(0)
        x = rng.normal(loc=3.0, scale=5.0, size=(6, 5, 5, 3))
        state = BatchNormState.fresh(3)
        out = batchnorm(Tensor(x), Tensor(np.ones(3)), Tensor(np.zeros(3)), state, Mode.TRAIN)
        assert np.all(np.abs(out.data.mean(axis=(0, 1, 2))) < 1e-10)
        np.testing.assert_allclose(out.data.var(axis=(0, 1, 2)), 1.0, atol=1e-6)

    def test_zero_gamma_gives_beta(self):
        """gamma 0 leaves only beta."""
        rng = np.random.default_rng(1)
        state = BatchNormState.fresh(2)
        beta = np.array([0.25, -1.5])
        out = batchnorm(Tensor(rng.normal(size=(4, 2))), Tensor(np.zeros(2)), Tensor(beta), state, Mode.TRAIN)
        np.testing.assert_array_equal(out.data, np.broadcast_to(beta, (4, 2)))

    def test_running_stats_update(self):
        """Two train calls follow the exponential update with momentum 0.1."""
        rng = np.random.default_rng(2)
        x1, x2 = rng.normal(size=(8, 2)), rng.normal(size=(8, 2))
        state = BatchNormState.fresh(2)
        gamma, beta = Tensor(np.ones(2)), Tensor(np.zeros(2))
        batchnorm(Tensor(x1), gamma, beta, state, Mode.TRAIN)
        batchnorm(Tensor(x2), gamma, beta, state, Mode.TRAIN)

        mean = np.zeros(2)
        var = np.ones(2)
        for x in (x1, x2):
            mean = 0.9 * mean + 0.1 * x.mean(axis=0)
            var = 0.9 * var + 0.1 * x.var(axis=0)
        np.testing.assert_allclose(state.running_mean, mean, atol=1e-12)
        np.testing.assert_allclose(state.running_var, var, atol=1e-12)
        assert state.num_updates == 2

    def test_infer_before_training_fails(self):
        """Infer mode needs at least one train update."""
        with pytest.raises(UninitializedStatisticsError):
            batchnorm(Tensor(np.ones((2, 2))), Tensor(np.ones(2)), Tensor(np.zeros(2)), BatchNormState.fresh(2), Mode.INFER)

    def test_infer_uses_running_stats(self):
        """Infer mode reads the running statistics and leaves them alone."""
        state = BatchNormState(np.array([1.0]), np.array([4.0]), 1)
        out = batchnorm(Tensor(np.array([[5.0]])), Tensor(np.ones(1)), Tensor(np.zeros(1)), state, Mode.INFER)
        assert out.data.item() == pytest.approx(4.0 / math.sqrt(4.0 + 1e-5), abs=1e-12)
        assert state.num_updates == 1


class TestDropout:
    """Tests for inverted dropout."""

    def test_rate_zero_is_identity(self):
        """Rate 0 returns the input unchanged."""
        x = Tensor(np.arange(1.0, 6.0))
        assert dropout(x, 0.0, Mode.TRAIN, np.random.default_rng(0)) is x

    def test_infer_is_identity(self):
        """Infer mode returns the input unchanged."""
        x = Tensor(np.arange(1.0, 6.0))
        assert dropout(x, 0.5, Mode.INFER, np.random.default_rng(0)) is x

    def test_rate_and_rescale(self):
        """Rate 0.3 over 10,000 elements, seed 42."""
        x = np.random.default_rng(3).uniform(1.0, 2.0, size=10_000)
        out = dropout(Tensor(x), 0.3, Mode.TRAIN, np.random.default_rng(42)).data
        zeroed = out == 0.0
        assert abs(zeroed.mean() - 0.3) < 0.02
        np.testing.assert_allclose(out[~zeroed], x[~zeroed] / 0.7, rtol=0, atol=1e-15)

    def test_expectation_is_kept(self):
        """Mean over 10,000 masks at rate 0.4 stays at the input."""
        x = np.array([0.5, -1.0, 2.0, 3.0])
        rng = np.random.default_rng(13)
        total = np.zeros_like(x)
        for _ in range(10_000):
            total += dropout(Tensor(x), 0.4, Mode.TRAIN, rng).data
        np.testing.assert_allclose(total / 10_000, x, rtol=0.04, atol=0)

    @pytest.mark.parametrize("rate", [-0.1, 1.0, 1.5])
    def test_rate_out_of_range(self, rate):
        """Rates outside [0, 1) are refused."""
        with pytest.raises(ValueError):
            dropout(Tensor(np.ones(3)), rate, Mode.TRAIN, np.random.default_rng(0))


class TestDense:
    """Tests for dense layers and activations."""

    def test_identity_weights(self):
        """Identity weights with zero bias pass the input through."""
        x = np.array([[1.0, -2.0, 3.0]])
        out = dense(Tensor(x), Tensor(np.eye(3)), Tensor(np.zeros(3)))
        np.testing.assert_array_equal(out.data, x)

    def test_activations(self):
        """ReLU, tanh and sigmoid after the affine step."""
        x = Tensor(np.array([[-1.0, 0.0, 2.0]]))
        w, b = Tensor(np.eye(3)), Tensor(np.zeros(3))
        np.testing.assert_array_equal(dense(x, w, b, Activation.RELU).data, [[0.0, 0.0, 2.0]])
        np.testing.assert_allclose(dense(x, w, b, "tanh").data, np.tanh(x.data), atol=1e-15)
        sig = dense(x, w, b, Activation.SIGMOID).data
        assert sig[0, 1] == 0.5
        np.testing.assert_allclose(sig, 1.0 / (1.0 + np.exp(-x.data)), atol=1e-15)

    def test_matches_loop_oracle_seed11(self):
        """Fixed 3x4 by 4x2 instance against the loop oracle."""
        rng = np.random.default_rng(11)
        x, w, b = rng.normal(size=(3, 4)), rng.normal(size=(4, 2)), rng.normal(size=2)
        out = dense(Tensor(x), Tensor(w), Tensor(b))
        np.testing.assert_allclose(out.data, naive_matmul(x, w, b), atol=1e-12, rtol=0)

    @pytest.mark.parametrize("seed", range(50))
    def test_random_instances_match_oracle(self, seed):
        """Random shapes agree with the loop oracle."""
        rng = np.random.default_rng(500 + seed)
        n, k, m = (int(v) for v in rng.integers(1, 7, size=3))
        x, w, b = rng.normal(size=(n, k)), rng.normal(size=(k, m)), rng.normal(size=m)
        np.testing.assert_allclose(dense(Tensor(x), Tensor(w), Tensor(b)).data, naive_matmul(x, w, b), atol=1e-9, rtol=0)

    def test_width_mismatch(self):
        """Input width must match the weight rows."""
        with pytest.raises(ShapeError):
            dense(Tensor(np.ones((2, 3))), Tensor(np.ones((4, 2))), Tensor(np.zeros(2)))


class TestSoftmaxCrossEntropy:
    """Tests for softmax and cross-entropy."""

    def test_uniform_logits(self):
        """Zero logits give uniform probabilities and loss log(C)."""
        probs, loss = softmax_crossentropy(Tensor(np.zeros(36)), 5)
        np.testing.assert_allclose(probs.data, 1.0 / 36, atol=1e-15)
        assert loss.item() == pytest.approx(math.log(36), abs=1e-12)

    @pytest.mark.parametrize("shift", [-1e3, -1.0, 0.5, 100.0, 1e3])
    def test_shift_invariance(self, shift):
        """Adding a constant to every logit leaves the probabilities alone."""
        logits = np.array([0.3, -1.2, 2.0, 0.0])
        p1, _ = softmax_crossentropy(Tensor(logits), 0)
        p2, _ = softmax_crossentropy(Tensor(logits + shift), 0)
        np.testing.assert_allclose(p1.data, p2.data, atol=1e-12, rtol=0)

    def test_known_values(self):
        """Probabilities and loss for logits 1, 2, 3."""
        probs, loss = softmax_crossentropy(Tensor(np.array([1.0, 2.0, 3.0])), 2)
        np.testing.assert_allclose(probs.data, [0.09003057, 0.24472847, 0.66524096], atol=1e-8)
        assert loss.item() == pytest.approx(0.40760596, abs=1e-8)

    def test_label_out_of_range(self):
        """A label past the last class is refused."""
        with pytest.raises(ValueError):
            softmax_crossentropy(Tensor(np.zeros(3)), 3)

    def test_softmax_sums_to_one(self):
        """Large logits still sum to one."""
        p = softmax(Tensor(np.random.default_rng(4).normal(size=10) * 30)).data
        assert abs(p.sum() - 1.0) < 1e-12


class TestBackward:
    """Tests for reverse-mode gradients."""

    def test_sum_gives_ones(self):
        """Gradient of a sum is all ones."""
        params = as_params(x=np.random.default_rng(0).normal(size=(3, 4)))
        with GradTape() as tape:
            loss = sum_all(params["x"])
        grads = backward(tape, loss, params)
        np.testing.assert_array_equal(grads["x"], np.ones((3, 4)))

    def test_half_square_gives_x(self):
        """Gradient of x*x/2 is x."""
        x = np.random.default_rng(1).normal(size=5)
        params = as_params(x=x.copy())
        with GradTape() as tape:
            loss = scale(sum_all(mul(params["x"], params["x"])), 0.5)
        grads = backward(tape, loss, params)
        np.testing.assert_allclose(grads["x"], x, atol=1e-15)

    def test_non_scalar_loss(self):
        """backward needs a scalar loss."""
        params = as_params(x=np.ones(3))
        with GradTape() as tape:
            y = relu(params["x"])
        with pytest.raises(ShapeError):
            backward(tape, y, params)

    def test_untracked_inputs_not_recorded(self):
        """Ops on untracked tensors leave the tape empty."""
        with GradTape() as tape:
            relu(Tensor(np.ones(3)))
        assert len(tape) == 0

    def test_unused_param_gets_zeros(self):
        """A parameter off the graph gets a zero gradient."""
        params = as_params(x=np.ones(2), unused=np.ones(3))
        with GradTape() as tape:
            loss = sum_all(params["x"])
        grads = backward(tape, loss, params)
        np.testing.assert_array_equal(grads["unused"], np.zeros(3))

    def test_composed_network_matches_finite_differences(self):
        """conv3d -> pool -> dense -> softmax cross-entropy."""
        rng = np.random.default_rng(5)
        x = Tensor(rng.normal(size=(6, 6, 6, 2)))
        spec = Conv3dSpec(2, 2)
        pooled = [d // 2 for d in spec.output_dims((6, 6, 6))]
        width = int(np.prod(pooled)) * spec.out_channels
        assert width == 16
        params = as_params(
            w=rng.normal(size=spec.weight_shape) * 0.5,
            b=rng.normal(size=2) * 0.1,
            dw=rng.normal(size=(width, 3)) * 0.5,
            db=rng.normal(size=3) * 0.1,
        )

        def forward():
            h = conv3d(x, spec, params["w"], params["b"])
            h, _ = maxpool3d(h)
            h = dense(flatten(h), params["dw"], params["db"])
            return softmax_crossentropy(h, 1)[1]

        assert grad_check(forward, params) < 1e-6


class TestGradCheck:
    """Tests for the finite-difference checker on every primitive."""

    def test_quadratic(self):
        """x*x/2 against central differences."""
        params = as_params(x=np.array([0.5, -1.5, 2.0]))

        def forward():
            return scale(sum_all(mul(params["x"], params["x"])), 0.5)

        assert grad_check(forward, params) < 1e-9

    def test_lstm_step(self):
        """One LSTM step, every input tracked."""
        rng = np.random.default_rng(6)
        hidden, n_in = 3, 2
        x = Tensor(rng.normal(size=n_in))
        params = as_params(
            w=rng.normal(size=(4 * hidden, n_in)),
            u=rng.normal(size=(4 * hidden, hidden)),
            b=rng.normal(size=4 * hidden),
            h=rng.normal(size=hidden),
            c=rng.normal(size=hidden),
        )

        def forward():
            h, c = lstm_cell(x, params["h"], params["c"], params["w"], params["u"], params["b"])
            return sum_all(mul(h, c))

        assert grad_check(forward, params, h=1e-5) < 1e-6

    def test_conv_block(self):
        """conv -> batchnorm(train) -> relu -> pool."""
        rng = np.random.default_rng(8)
        x = Tensor(rng.normal(size=(4, 4, 4, 1)))
        spec = Conv3dSpec(1, 2)
        bias = Tensor(rng.normal(size=2))
        params = as_params(
            w=rng.normal(size=spec.weight_shape),
            gamma=rng.uniform(0.5, 1.5, size=2),
            beta=rng.normal(size=2),
        )
        target = Tensor(rng.normal(size=2))

        def forward():
            h = conv3d(x, spec, params["w"], bias)
            h = batchnorm(h, params["gamma"], params["beta"], BatchNormState.fresh(2), Mode.TRAIN)
            h = relu(h)
            h, _ = maxpool3d(h, (1, 2, 2))
            return sum_all(mul(flatten(h), Tensor(np.tile(target.data, h.size // 2))))

        assert grad_check(forward, params) < 1e-6

    def test_dropout_with_fixed_mask(self):
        """Dropout with a seeded mask is differentiable."""
        params = as_params(x=np.random.default_rng(9).normal(size=20))

        def forward():
            return sum_all(mul(dropout(params["x"], 0.5, Mode.TRAIN, np.random.default_rng(1)), params["x"]))

        assert grad_check(forward, params) < 1e-6

    def test_dense_tanh_sigmoid(self):
        """Two dense layers with tanh then sigmoid."""
        rng = np.random.default_rng(10)
        x = Tensor(rng.normal(size=(2, 3)))
        params = as_params(w1=rng.normal(size=(3, 4)), b1=rng.normal(size=4), w2=rng.normal(size=(4, 2)), b2=rng.normal(size=2))

        def forward():
            h = dense(x, params["w1"], params["b1"], Activation.TANH)
            h = dense(h, params["w2"], params["b2"], Activation.SIGMOID)
            return sum_all(h)

        assert grad_check(forward, params) < 1e-6


def readout(out, rng):
    """Weighted sum with fixed random weights, so no gradient is identically small."""
    return sum_all(mul(out, Tensor(rng.normal(size=out.shape))))


class TestGradCheckSeeds:
    """Finite-difference agreement per primitive over 20 seeds."""

    @pytest.mark.parametrize("seed", range(20))
    def test_dense(self, seed):
        """Dense layers with tanh then sigmoid."""
        rng = np.random.default_rng(2000 + seed)
        params = as_params(x=rng.normal(size=(2, 4)), w=rng.normal(size=(4, 3)) * 0.5, b=rng.normal(size=3))
        def forward():
            h = dense(params["x"], params["w"], params["b"], Activation.TANH)
            return readout(dense(h, Tensor(np.eye(3)), Tensor(np.zeros(3)), Activation.SIGMOID), np.random.default_rng(seed))

        assert grad_check(forward, params, h=1e-5) < 1e-6

    @pytest.mark.parametrize("seed", range(20))
    def test_strided_conv3d(self, seed):
        """Input, kernels and bias of a strided convolution."""
        rng = np.random.default_rng(2100 + seed)
        spec = Conv3dSpec(2, 3, kernel=(2, 2, 3), stride=(2, 1, 2))
        params = as_params(x=rng.normal(size=(5, 4, 7, 2)), w=rng.normal(size=spec.weight_shape), b=rng.normal(size=3))

        def forward():
            return readout(conv3d(params["x"], spec, params["w"], params["b"]), np.random.default_rng(seed))

        assert grad_check(forward, params, h=1e-5) < 1e-6

    @pytest.mark.parametrize("seed", range(20))
    def test_maxpool3d(self, seed):
        """Gradient routes to the window maximum."""
        rng = np.random.default_rng(2200 + seed)
        params = as_params(x=rng.normal(size=(4, 4, 6, 2)))

        def forward():
            pooled, _ = maxpool3d(params["x"], (2, 2, 3))
            return readout(pooled, np.random.default_rng(seed))

        assert grad_check(forward, params, h=1e-5) < 1e-6

    @pytest.mark.parametrize("seed", range(20))
    def test_batchnorm_train(self, seed):
        """Batch statistics depend on the input."""
        rng = np.random.default_rng(2300 + seed)
        params = as_params(x=rng.normal(size=(3, 2, 2, 3)), gamma=rng.uniform(0.5, 1.5, size=3), beta=rng.normal(size=3))

        def forward():
            out = batchnorm(params["x"], params["gamma"], params["beta"], BatchNormState.fresh(3), Mode.TRAIN)
            return readout(out, np.random.default_rng(seed))

        assert grad_check(forward, params, h=1e-5) < 1e-6

    @pytest.mark.parametrize("seed", range(20))
    def test_batchnorm_infer(self, seed):
        """Running statistics are constants."""
        rng = np.random.default_rng(2400 + seed)
        params = as_params(x=rng.normal(size=(3, 2, 2, 3)), gamma=rng.uniform(0.5, 1.5, size=3), beta=rng.normal(size=3))
        mean, var = rng.normal(size=3), rng.uniform(0.5, 2.0, size=3)

        def forward():
            state = BatchNormState(mean.copy(), var.copy(), 1)
            out = batchnorm(params["x"], params["gamma"], params["beta"], state, Mode.INFER)
            return readout(out, np.random.default_rng(seed))

        assert grad_check(forward, params, h=1e-5) < 1e-6

    @pytest.mark.parametrize("seed", range(20))
    def test_lstm_cell(self, seed):
        """Every input of one LSTM step."""
        rng = np.random.default_rng(2500 + seed)
        hidden, n_in = 3, 4
        params = as_params(
            x=rng.normal(size=n_in),
            h=rng.uniform(-0.9, 0.9, size=hidden),
            c=rng.normal(size=hidden),
            w=rng.normal(size=(4 * hidden, n_in)) * 0.5,
            u=rng.normal(size=(4 * hidden, hidden)) * 0.5,
            b=rng.normal(size=4 * hidden) * 0.5,
        )

        def forward():
            h, c = lstm_cell(params["x"], params["h"], params["c"], params["w"], params["u"], params["b"])
            r = np.random.default_rng(seed)
            return add(sum_all(mul(h, Tensor(r.normal(size=hidden)))), sum_all(mul(c, Tensor(r.normal(size=hidden)))))

        assert grad_check(forward, params, h=1e-5) < 1e-6

    @pytest.mark.parametrize("seed", range(20))
    def test_softmax_crossentropy(self, seed):
        """Loss gradient with respect to the logits."""
        rng = np.random.default_rng(2600 + seed)
        params = as_params(z=rng.normal(size=7) * 2.0)

        def forward():
            return softmax_crossentropy(params["z"], seed % 7)[1]

        assert grad_check(forward, params, h=1e-5) < 1e-6

    @pytest.mark.parametrize("seed", range(20))
    def test_softmax(self, seed):
        """Softmax probabilities under a weighted readout."""
        rng = np.random.default_rng(2700 + seed)
        params = as_params(z=rng.normal(size=6))

        def forward():
            return readout(softmax(params["z"]), np.random.default_rng(seed))

        assert grad_check(forward, params, h=1e-5) < 1e-6

    @pytest.mark.parametrize("seed", range(20))
    def test_dropout_fixed_mask(self, seed):
        """Seeded mask, input used twice."""
        rng = np.random.default_rng(2800 + seed)
        params = as_params(x=rng.normal(size=12))

        def forward():
            out = dropout(params["x"], 0.3, Mode.TRAIN, np.random.default_rng(seed))
            return sum_all(mul(out, params["x"]))

        assert grad_check(forward, params, h=1e-5) < 1e-6
