"""Bound-constrained solvers over axis weights: damped least squares for
outline energies, Adam for image energies.

Weights live in the box [-1, 1]^dim; iterates are projected back after
every update (clamping alone would produce zero-gradient regions). For
energies whose residual set depends on theta through contact detection,
`CompositeEnergy.refresh` is invoked at the top of each outer iteration:
detect, take one damped step, repeat.
"""

import io
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import (
    NonFiniteGradient,
    NonFiniteResidual,
    SingularNormalEquations,
)

MAX_DAMPING = 1e8


@dataclass
class SolverConfig:
    max_iterations: int = 50
    tolerance_grad: float = 1e-8
    tolerance_step: float = 1e-10
    lm_damping_init: float = 1e-3
    lm_damping_up: float = 10.0
    lm_damping_down: float = 0.5
    adam_lr: float = 0.05
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.tolerance_grad <= 0 or self.tolerance_step <= 0:
            raise ValueError("tolerances must be > 0")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("Adam betas must be in (0, 1)")
        if self.lm_damping_up <= 1 or not (0 < self.lm_damping_down < 1):
            raise ValueError("damping up must be > 1 and down in (0, 1)")

    @classmethod
    def from_file(cls, path):
        """Read `key value` (or key=value) lines; '#' starts a comment."""
        values = {}
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, val = line.replace("=", " ").partition(" ")
                values[key.strip()] = val.strip()
        kwargs = {}
        for f in fields(cls):
            if f.name in values:
                cast = int if f.type == "int" else float
                kwargs[f.name] = cast(values.pop(f.name))
        if values:
            raise ValueError(f"unknown solver config keys: {sorted(values)}")
        return cls(**kwargs)


@dataclass
class SolverResult:
    theta: np.ndarray
    iterations: int
    energy: float
    reason: str  # grad | step | max_iter | cancelled
    trace: list = field(default_factory=list)  # accepted-step energies
    trace_rows: list = field(default_factory=list)  # (it, energy, damping, step_norm)

    def trace_csv(self):
        buf = io.StringIO()
        buf.write("iteration,energy,damping,step_norm\n")
        for it, energy, damping, step in self.trace_rows:
            buf.write(f"{it},{energy!r},{damping!r},{step!r}\n")
        return buf.getvalue()


def project_bounds(theta):
    """Componentwise clamp to [-1, 1]; idempotent."""
    return np.clip(np.asarray(theta, dtype=np.float64), -1.0, 1.0)


def _check_finite(arr, exc, what):
    if not np.all(np.isfinite(arr)):
        raise exc(f"{what} is not finite")


def solve_lm(energy, theta0, config=None, should_stop=None):
    """Levenberg-Marquardt with multiplicative damping on diag(J^T J) and
    box projection after every accepted step."""
    config = config or SolverConfig()
    theta = project_bounds(np.asarray(theta0, dtype=np.float64).reshape(-1))
    energy.refresh(theta)
    r = energy.residual(theta)
    _check_finite(r, NonFiniteResidual, "residual")
    value = float(r @ r)
    damping = config.lm_damping_init
    trace = [value]
    rows = [(0, value, damping, 0.0)]
    reason = "max_iter"
    it = 0
    for it in range(1, config.max_iterations + 1):
        if should_stop is not None and should_stop():
            reason = "cancelled"
            it -= 1
            break
        energy.refresh(theta)
        r = energy.residual(theta)
        _check_finite(r, NonFiniteResidual, "residual")
        value = float(r @ r)
        jac = energy.jacobian(theta)
        _check_finite(jac, NonFiniteResidual, "jacobian")
        grad = 2.0 * (jac.T @ r)
        if float(np.linalg.norm(grad)) < config.tolerance_grad:
            reason = "grad"
            it -= 1
            break
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        diag[diag < 1e-12] = 1e-12
        accepted = False
        while True:
            try:
                step = np.linalg.solve(jtj + damping * np.diag(diag), -jac.T @ r)
            except np.linalg.LinAlgError:
                damping *= 10.0
                if damping > MAX_DAMPING:
                    raise SingularNormalEquations(
                        f"normal equations singular at damping {damping:g}"
                    )
                continue
            if not np.all(np.isfinite(step)):
                damping *= 10.0
                if damping > MAX_DAMPING:
                    raise SingularNormalEquations("non-finite step")
                continue
            candidate = project_bounds(theta + step)
            actual_step = candidate - theta
            if not actual_step.any():
                # step fully clamped away: escalate damping so the next
                # attempt turns toward the feasible directions
                damping *= config.lm_damping_up
                if damping > MAX_DAMPING:
                    reason = "step"
                    break
                continue
            r_new = energy.residual(candidate)
            _check_finite(r_new, NonFiniteResidual, "residual")
            value_new = float(r_new @ r_new)
            if value_new < value:
                theta = candidate
                value = value_new
                damping = max(damping * config.lm_damping_down, 1e-16)
                accepted = True
                step_norm = float(np.linalg.norm(actual_step))
                trace.append(value)
                rows.append((it, value, damping, step_norm))
                if step_norm < config.tolerance_step:
                    reason = "step"
                break
            damping *= config.lm_damping_up
            if damping > MAX_DAMPING:
                # No descent at maximal damping: the projected step has
                # stalled; report convergence by step size.
                reason = "step"
                break
        if not accepted and reason == "step":
            break
        if reason == "step":
            break
    return SolverResult(
        theta=theta,
        iterations=it,
        energy=value,
        reason=reason,
        trace=trace,
        trace_rows=rows,
    )


def solve_adam(energy, theta0, config=None, should_stop=None):
    """Adam on grad ||r||^2 = 2 J^T r, projected to the box each update;
    runs the full iteration budget unless the gradient tolerance is met."""
    config = config or SolverConfig(max_iterations=100)
    theta = project_bounds(np.asarray(theta0, dtype=np.float64).reshape(-1))
    energy.refresh(theta)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    r = energy.residual(theta)
    _check_finite(r, NonFiniteResidual, "residual")
    value = float(r @ r)
    trace = [value]
    rows = [(0, value, 0.0, 0.0)]
    reason = "max_iter"
    it = 0
    for it in range(1, config.max_iterations + 1):
        if should_stop is not None and should_stop():
            reason = "cancelled"
            it -= 1
            break
        energy.refresh(theta)
        r = energy.residual(theta)
        jac = energy.jacobian(theta)
        grad = 2.0 * (jac.T @ r)
        _check_finite(grad, NonFiniteGradient, "gradient")
        if float(np.linalg.norm(grad)) < config.tolerance_grad:
            reason = "grad"
            it -= 1
            break
        m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * grad
        v = config.adam_beta2 * v + (1.0 - config.adam_beta2) * grad * grad
        m_hat = m / (1.0 - config.adam_beta1**it)
        v_hat = v / (1.0 - config.adam_beta2**it)
        step = -config.adam_lr * m_hat / (np.sqrt(v_hat) + config.adam_eps)
        theta = project_bounds(theta + step)
        r = energy.residual(theta)
        _check_finite(r, NonFiniteResidual, "residual")
        value = float(r @ r)
        trace.append(value)
        rows.append((it, value, 0.0, float(np.linalg.norm(step))))
    return SolverResult(
        theta=theta,
        iterations=it,
        energy=value,
        reason=reason,
        trace=trace,
        trace_rows=rows,
    )
