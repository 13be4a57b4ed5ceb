from vtrl.numerics.tensor import (
    Parameter,
    Tensor,
    add,
    affine_apply,
    as_tensor,
    clip,
    concat,
    constant,
    conv2d_apply,
    default_dtype,
    diagonal,
    div,
    exp,
    grad_eval,
    log,
    matmul,
    minimum,
    mul,
    neg,
    relu_apply,
    reshape,
    set_default_dtype,
    sqrt,
    sub,
    tanh,
    tmean,
    transpose,
    tsum,
    using_dtype,
    zero_grads,
)
from vtrl.numerics.layers import MLP, Conv2d, Dense
from vtrl.numerics.optim import Adam, AdamState, adam_step
from vtrl.numerics.gradcheck import GradCheckReport, grad_check
from vtrl.numerics.checkpoint import load_checkpoint, save_checkpoint
