import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convlens import ops
from convlens.errors import ShapeError
from convlens.tensor import ConvParams, Tensor

from oracles import bilinear_ref, conv2d_ref, dense_ref, maxpool_ref


def t(x):
    return Tensor(np.asarray(x, dtype=np.float32))


class TestTensor:
    def test_rejects_rank_0_and_5(self):
        with pytest.raises(ShapeError):
            Tensor(np.float32(3.0).reshape(()))
        with pytest.raises(ShapeError):
            Tensor(np.zeros((1, 1, 1, 1, 1), np.float32))

    def test_immutable(self):
        a = t([1.0, 2.0])
        with pytest.raises(ValueError):
            a.data[0] = 5.0

    def test_conv_params_validation(self):
        with pytest.raises(ShapeError):
            ConvParams(0, 0)
        with pytest.raises(ShapeError):
            ConvParams(1, -1)
        with pytest.raises(ShapeError):
            ConvParams(1, 0).out_dim(2, 3)


class TestConv2d:
    def test_identity_kernel(self):
        out = ops.conv2d(t([[[2.0]]]), t(np.ones((1, 1, 1, 1))), t([0.0]),
                         ConvParams(1, 0))
        assert out.tolist() == [[[2.0]]]

    def test_1x1_kernel_is_affine(self):
        x = np.arange(1, 10, dtype=np.float32).reshape(1, 3, 3)
        out = ops.conv2d(t(x), t(np.full((1, 1, 1, 1), 2.0)), t([1.0]),
                         ConvParams(1, 0))
        np.testing.assert_array_equal(out.data, 2 * x + 1)

    def test_matches_bruteforce(self, rng):
        x = rng.standard_normal((2, 4, 4)).astype(np.float32)
        w = rng.standard_normal((3, 2, 3, 3)).astype(np.float32)
        b = rng.standard_normal(3).astype(np.float32)
        out = ops.conv2d(t(x), t(w), t(b), ConvParams(1, 1))
        ref = conv2d_ref(x, w, b, 1, 1)
        assert np.abs(out.data - ref).max() <= 1e-5

    def test_channel_mismatch(self, rng):
        with pytest.raises(ShapeError, match="channel"):
            ops.conv2d(t(np.zeros((2, 3, 3))), t(np.zeros((1, 1, 2, 2))),
                       t([0.0]), ConvParams())

    def test_bias_shape_mismatch(self):
        with pytest.raises(ShapeError, match="bias"):
            ops.conv2d(t(np.zeros((1, 3, 3))), t(np.zeros((2, 1, 2, 2))),
                       t([0.0]), ConvParams())

    def test_output_dim_below_one(self):
        with pytest.raises(ShapeError):
            ops.conv2d(t(np.zeros((1, 2, 2))), t(np.zeros((1, 1, 3, 3))),
                       t([0.0]), ConvParams(1, 0))

    def test_linearity_with_zero_bias(self, rng):
        x = rng.standard_normal((2, 5, 5)).astype(np.float32)
        w = rng.standard_normal((3, 2, 3, 3)).astype(np.float32)
        zb = np.zeros(3, dtype=np.float32)
        for a in (0.5, 1.3, 2.0):
            lhs = ops.conv2d(t(a * x), t(w), t(zb), ConvParams(1, 1)).data
            rhs = a * ops.conv2d(t(x), t(w), t(zb), ConvParams(1, 1)).data
            denom = np.maximum(np.abs(rhs), 1e-3)
            assert (np.abs(lhs - rhs) / denom).max() <= 1e-4

    def test_deterministic_across_repeats(self, rng):
        x = rng.standard_normal((3, 8, 8)).astype(np.float32)
        w = rng.standard_normal((4, 3, 3, 3)).astype(np.float32)
        b = rng.standard_normal(4).astype(np.float32)
        runs = [ops.conv2d(t(x), t(w), t(b), ConvParams(1, 1)).data.tobytes()
                for _ in range(3)]
        assert len(set(runs)) == 1


class TestRelu:
    def test_basic(self):
        assert ops.relu(t([-1.0, 0.0, 2.0])).tolist() == [0.0, 0.0, 2.0]

    def test_all_negative(self):
        out = ops.relu(t(np.full((2, 3), -4.0)))
        assert not out.data.any()

    @given(st.lists(st.floats(-10, 10, width=32), min_size=1, max_size=30))
    def test_idempotent(self, values):
        x = t(values)
        once = ops.relu(x)
        assert ops.relu(once) == once


class TestMaxpool:
    def test_single_window(self):
        out, rec = ops.maxpool2d(t([[[1.0, 2.0], [3.0, 4.0]]]))
        assert out.tolist() == [[[4.0]]]
        assert rec.indices[0, 0, 0] == 3

    def test_tie_breaks_first_rowmajor(self):
        out, rec = ops.maxpool2d(t(np.ones((2, 4, 4))))
        assert (out.data == 1.0).all()
        # top-left of each window
        expected = np.array([[[0, 2], [8, 10]], [[16, 18], [24, 26]]])
        np.testing.assert_array_equal(rec.indices, expected)

    def test_matches_bruteforce(self, rng):
        x = rng.standard_normal((3, 8, 8)).astype(np.float32)
        out, rec = ops.maxpool2d(t(x))
        ref_out, ref_arg = maxpool_ref(x)
        np.testing.assert_array_equal(out.data, ref_out.astype(np.float32))
        np.testing.assert_array_equal(rec.indices, ref_arg)

    def test_odd_dims_rejected(self):
        with pytest.raises(ShapeError):
            ops.maxpool2d(t(np.zeros((1, 3, 4))))

    def test_output_dominates_window_and_argmax_points_at_max(self, rng):
        x = rng.standard_normal((2, 6, 6)).astype(np.float32)
        out, rec = ops.maxpool2d(t(x))
        flat = x.reshape(-1)
        np.testing.assert_array_equal(flat[rec.indices], out.data)
        for c in range(2):
            for y in range(3):
                for xx in range(3):
                    win = x[c, 2 * y:2 * y + 2, 2 * xx:2 * xx + 2]
                    assert out.data[c, y, xx] >= win.max() - 0


class TestDense:
    def test_identity(self):
        out = ops.dense(t([3.0, 5.0]), t(np.eye(2)), t([0.0, 0.0]))
        assert out.tolist() == [3.0, 5.0]

    def test_zero_weight_gives_bias(self):
        out = ops.dense(t([9.0, 9.0]), t(np.zeros((2, 2))), t([1.0, 2.0]))
        assert out.tolist() == [1.0, 2.0]

    def test_matches_bruteforce(self, rng):
        x = rng.standard_normal(6).astype(np.float32)
        w = rng.standard_normal((4, 6)).astype(np.float32)
        b = rng.standard_normal(4).astype(np.float32)
        out = ops.dense(t(x), t(w), t(b))
        assert np.abs(out.data - dense_ref(x, w, b)).max() <= 1e-6

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            ops.dense(t([1.0, 2.0, 3.0]), t(np.zeros((2, 2))), t([0.0, 0.0]))


class TestSoftmax:
    def test_uniform(self):
        out = ops.softmax(t([0.0, 0.0, 0.0, 0.0]))
        np.testing.assert_allclose(out.data, 0.25, atol=1e-7)

    def test_closed_form(self):
        out = ops.softmax(t([0.0, np.log(3.0)]))
        np.testing.assert_allclose(out.data, [0.25, 0.75], atol=1e-6)

    @given(st.lists(st.floats(-30, 30, width=32), min_size=1, max_size=20),
           st.floats(-50, 50, width=32))
    @settings(max_examples=50)
    def test_shift_invariance_and_simplex(self, values, c):
        x = np.asarray(values, dtype=np.float32)
        p = ops.softmax(t(x)).data
        q = ops.softmax(t(x + np.float32(c))).data
        assert np.abs(p - q).max() <= 1e-6
        assert (p >= 0).all()
        assert abs(p.sum() - 1.0) <= 1e-6
        srt = np.sort(x)
        if len(x) == 1 or srt[-1] - srt[-2] > 1e-3:  # near-ties round either way
            assert np.argmax(p) == np.argmax(x)


class TestBilinearResize:
    def test_identity_size(self, rng):
        x = rng.standard_normal((1, 5, 7)).astype(np.float32)
        out = ops.bilinear_resize(t(x), 5, 7)
        assert np.abs(out.data - x).max() <= 1e-6

    def test_constant_extension_from_1x1(self):
        out = ops.bilinear_resize(t([[[7.0]]]), 4, 6)
        np.testing.assert_array_equal(out.data, np.full((1, 4, 6), 7.0))

    def test_matches_scalar_formula(self, rng):
        x = rng.standard_normal((1, 2, 2)).astype(np.float32)
        out = ops.bilinear_resize(t(x), 4, 4)
        ref = bilinear_ref(x[0], 4, 4)
        assert np.abs(out.data[0] - ref).max() <= 1e-6

    def test_preserves_bounds(self, rng):
        x = rng.standard_normal((1, 3, 5)).astype(np.float32)
        out = ops.bilinear_resize(t(x), 11, 9)
        assert out.data.min() >= x.min() - 1e-6
        assert out.data.max() <= x.max() + 1e-6
