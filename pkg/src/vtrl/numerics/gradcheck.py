"""Central finite-difference verification of analytic gradients.

Runs in 64-bit mode only: the default step h=1e-5 would drown in
float32 rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vtrl.errors import ContractError
from vtrl.numerics import tensor as T
from vtrl.numerics.tensor import Parameter, grad_eval, zero_grads


@dataclass
class GradCheckReport:
    max_rel_error: float
    tolerance: float
    per_param: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{status} max_rel_error={self.max_rel_error:.3e} (tol {self.tolerance:.1e})"
        if self.failures:
            line += " offending: " + ", ".join(self.failures)
        return line


def _rel_error(a: float, n: float) -> float:
    return abs(a - n) / max(abs(a) + abs(n), 1e-8)


def grad_check(loss_fn, params, tolerance: float = 1e-4, h: float = 1e-5) -> GradCheckReport:
    """Compare grad_eval output against central differences for every entry.

    loss_fn rebuilds the forward pass from the params' current values and
    returns a scalar Tensor; it must be deterministic so the two perturbed
    evaluations differ only through the perturbed entry.
    """
    if T.default_dtype() is not np.float64:
        raise ContractError("grad_check requires 64-bit mode")
    params = list(params)
    zero_grads(params)
    grad_eval(loss_fn())
    analytic = {p.name: p.grad.copy() for p in params}

    report = GradCheckReport(max_rel_error=0.0, tolerance=tolerance)
    for p in params:
        worst = 0.0
        flat = p.value.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            f_plus = loss_fn().item()
            flat[i] = orig - h
            f_minus = loss_fn().item()
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * h)
            err = _rel_error(analytic[p.name].reshape(-1)[i], numeric)
            worst = max(worst, err)
        report.per_param[p.name] = worst
        report.max_rel_error = max(report.max_rel_error, worst)
        if worst > tolerance:
            report.failures.append(p.name)
    return report
