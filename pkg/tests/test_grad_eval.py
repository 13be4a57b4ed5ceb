import numpy as np
import pytest

from vtrl.errors import ContractError
from vtrl.numerics import (
    Parameter,
    as_tensor,
    grad_eval,
    matmul,
    relu_apply,
    tanh,
    zero_grads,
)
from vtrl.numerics import tensor as T


def test_sum_xw_hand_oracle():
    # loss = sum(x W) with x = [1, 1] fixed: dloss/dW = [[1], [1]]
    w = Parameter(np.array([[2.0], [5.0]]), "w")
    x = as_tensor(np.array([[1.0, 1.0]]))
    loss = matmul(x, w.leaf()).sum()
    grad_eval(loss)
    np.testing.assert_allclose(w.grad, [[1.0], [1.0]])


def test_unreachable_parameter_gets_zero():
    w = Parameter(np.ones((2, 2)), "w")
    other = Parameter(np.ones(3), "other")
    loss = matmul(as_tensor(np.ones((1, 2))), w.leaf()).sum()
    grad_eval(loss)
    np.testing.assert_allclose(other.grad, 0.0)


def test_repeated_grad_eval_accumulates():
    w = Parameter(np.array([[1.0], [2.0]]), "w")
    x = as_tensor(np.array([[3.0, 4.0]]))
    loss = matmul(x, w.leaf()).sum()
    grad_eval(loss)
    once = w.grad.copy()
    grad_eval(loss)
    np.testing.assert_array_equal(w.grad, 2.0 * once)


def test_zero_grads_gives_history_independence():
    w = Parameter(np.array([1.0, -2.0]), "w")
    loss1 = (w.leaf() * as_tensor([5.0, 5.0])).sum()
    grad_eval(loss1)
    zero_grads([w])
    loss2 = (w.leaf() * as_tensor([1.0, 1.0])).sum()
    grad_eval(loss2)
    np.testing.assert_allclose(w.grad, [1.0, 1.0])


def test_non_scalar_loss_rejected():
    w = Parameter(np.ones(3), "w")
    with pytest.raises(ContractError):
        grad_eval(w.leaf())


def test_diamond_reuse_accumulates_paths():
    # y = x * x via two references to the same leaf: dy/dx = 2x
    p = Parameter(np.array([3.0]), "p")
    leaf = p.leaf()
    loss = (leaf * leaf).sum()
    grad_eval(loss)
    np.testing.assert_allclose(p.grad, [6.0])


def test_chain_through_nonlinearities():
    # finite check of a small composite: d/dx sum(tanh(relu(x)))
    p = Parameter(np.array([0.5, -0.5]), "p")
    loss = tanh(relu_apply(p.leaf())).sum()
    grad_eval(loss)
    want0 = 1.0 - np.tanh(0.5) ** 2
    np.testing.assert_allclose(p.grad, [want0, 0.0], rtol=1e-12)


def test_detach_blocks_gradient():
    p = Parameter(np.array([2.0]), "p")
    leaf = p.leaf()
    loss = (leaf.detach() * leaf).sum()
    grad_eval(loss)
    np.testing.assert_allclose(p.grad, [2.0])


def test_broadcast_bias_gradient():
    b = Parameter(np.array([1.0, 2.0]), "b")
    x = as_tensor(np.zeros((4, 2)))
    loss = (x + b.leaf()).sum()
    grad_eval(loss)
    np.testing.assert_allclose(b.grad, [4.0, 4.0])


def test_minimum_routes_gradient():
    a = Parameter(np.array([1.0, 5.0]), "a")
    b = Parameter(np.array([2.0, 3.0]), "b")
    loss = T.minimum(a.leaf(), b.leaf()).sum()
    grad_eval(loss)
    np.testing.assert_allclose(a.grad, [1.0, 0.0])
    np.testing.assert_allclose(b.grad, [0.0, 1.0])


def test_clip_gradient_inside_only():
    p = Parameter(np.array([-2.0, 0.5, 2.0]), "p")
    loss = T.clip(p.leaf(), -1.0, 1.0).sum()
    grad_eval(loss)
    np.testing.assert_allclose(p.grad, [0.0, 1.0, 0.0])


def test_concat_splits_gradient():
    a = Parameter(np.ones((2, 2)), "a")
    b = Parameter(np.ones((2, 3)), "b")
    out = T.concat([a.leaf(), b.leaf()], axis=1)
    grad_eval((out * out).sum())
    np.testing.assert_allclose(a.grad, 2.0)
    np.testing.assert_allclose(b.grad, 2.0)


def test_diagonal_gradient():
    a = Parameter(np.arange(9.0).reshape(3, 3), "a")
    grad_eval(T.diagonal(a.leaf()).sum())
    np.testing.assert_allclose(a.grad, np.eye(3))
