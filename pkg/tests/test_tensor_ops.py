import numpy as np
import pytest

from vtrl.errors import DimensionError, NumericsError
from vtrl.numerics import (
    Parameter,
    affine_apply,
    as_tensor,
    constant,
    conv2d_apply,
    grad_eval,
    relu_apply,
)


def param(values, name="p"):
    return Parameter(np.asarray(values, dtype=float), name)


class TestAffine:
    def test_identity_weight(self):
        w = param(np.eye(2), "w")
        b = param([0.0, 0.0], "b")
        y = affine_apply(w, b, as_tensor([3.0, -1.0]))
        np.testing.assert_allclose(y.data, [3.0, -1.0])

    def test_hand_matrix_multiply(self):
        # oracle: [1,1] @ [[1,2],[3,4]] + [1,1] = [1+3+1, 2+4+1]
        w = param([[1.0, 2.0], [3.0, 4.0]], "w")
        b = param([1.0, 1.0], "b")
        y = affine_apply(w, b, as_tensor([1.0, 1.0]))
        np.testing.assert_allclose(y.data, [5.0, 7.0])

    def test_zero_weight_gives_bias(self):
        w = param(np.zeros((3, 2)), "w")
        b = param([4.5, -2.0], "b")
        for x in ([1.0, 2.0, 3.0], [-9.0, 0.0, 7.0]):
            y = affine_apply(w, b, as_tensor(x))
            np.testing.assert_allclose(y.data, [4.5, -2.0])

    def test_batched(self):
        w = param([[1.0, 2.0], [3.0, 4.0]], "w")
        b = param([0.0, 0.0], "b")
        y = affine_apply(w, b, as_tensor([[1.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(y.data, [[4.0, 6.0], [1.0, 2.0]])

    def test_shape_mismatch_names_both_shapes(self):
        w = param(np.zeros((3, 2)), "w")
        b = param(np.zeros(2), "b")
        with pytest.raises(DimensionError) as e:
            affine_apply(w, b, as_tensor([1.0, 2.0]))
        assert "(1, 2)" in str(e.value) and "(3, 2)" in str(e.value)


class TestConv2d:
    def test_one_by_one_identity(self):
        k = param(np.ones((1, 1, 1, 1)), "k")
        b = param([0.0], "b")
        x = np.arange(9.0).reshape(1, 3, 3)
        y = conv2d_apply(k, b, as_tensor(x), stride=1)
        np.testing.assert_allclose(y.data, x)

    def test_sum_kernel(self):
        # oracle: direct summation of the single 2x2 window
        k = param(np.ones((1, 1, 2, 2)), "k")
        b = param([0.0], "b")
        x = np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(1, 2, 2)
        y = conv2d_apply(k, b, as_tensor(x), stride=1)
        np.testing.assert_allclose(y.data, [[[10.0]]])

    def test_zero_input_gives_bias(self):
        rng = np.random.default_rng(0)
        k = param(rng.normal(size=(2, 1, 3, 3)), "k")
        b = param([0.7, -0.3], "b")
        y = conv2d_apply(k, b, as_tensor(np.zeros((1, 5, 5))), stride=1)
        np.testing.assert_allclose(y.data[0], 0.7)
        np.testing.assert_allclose(y.data[1], -0.3)

    def test_stride_output_dims(self):
        k = param(np.ones((1, 1, 3, 3)), "k")
        b = param([0.0], "b")
        y = conv2d_apply(k, b, as_tensor(np.zeros((1, 9, 9))), stride=2)
        assert y.data.shape == (1, 4, 4)

    def test_kernel_larger_than_input(self):
        k = param(np.ones((1, 1, 4, 4)), "k")
        b = param([0.0], "b")
        with pytest.raises(DimensionError):
            conv2d_apply(k, b, as_tensor(np.zeros((1, 3, 3))), stride=1)

    def test_matches_naive_loop(self):
        rng = np.random.default_rng(7)
        kdata = rng.normal(size=(3, 2, 3, 3))
        xdata = rng.normal(size=(2, 2, 7, 8))
        bdata = rng.normal(size=3)
        k, b = param(kdata, "k"), param(bdata, "b")
        y = conv2d_apply(k, b, as_tensor(xdata), stride=2)
        oh, ow = (7 - 3) // 2 + 1, (8 - 3) // 2 + 1
        want = np.zeros((2, 3, oh, ow))
        for n in range(2):
            for f in range(3):
                for i in range(oh):
                    for j in range(ow):
                        patch = xdata[n, :, 2 * i : 2 * i + 3, 2 * j : 2 * j + 3]
                        want[n, f, i, j] = (patch * kdata[f]).sum() + bdata[f]
        np.testing.assert_allclose(y.data, want, rtol=1e-12)


class TestRelu:
    def test_sign_cases(self):
        y = relu_apply(as_tensor([-1.0, 0.0, 2.0]))
        np.testing.assert_allclose(y.data, [0.0, 0.0, 2.0])

    def test_all_negative(self):
        y = relu_apply(as_tensor([-5.0, -0.1, -100.0]))
        np.testing.assert_allclose(y.data, 0.0)

    def test_subgradient(self):
        p = param([-1.0, 0.0, 2.0], "x")
        y = relu_apply(p.leaf()).sum()
        grad_eval(y)
        np.testing.assert_allclose(p.grad, [0.0, 0.0, 1.0])


def test_finite_violation_raises():
    a = as_tensor([1.0, 2.0])
    b = as_tensor([0.0, 1.0])
    with pytest.raises(NumericsError):
        a / b


def test_determinism_of_forward():
    rng = np.random.default_rng(3)
    w = param(rng.normal(size=(4, 4)), "w")
    b = param(rng.normal(size=4), "b")
    x = as_tensor(rng.normal(size=(5, 4)))
    y1 = affine_apply(w, b, x)
    y2 = affine_apply(w, b, x)
    assert np.array_equal(y1.data, y2.data)
