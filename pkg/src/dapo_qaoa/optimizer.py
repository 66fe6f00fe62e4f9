"""Quasi-Newton (BFGS) ascent with central-difference gradients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

Objective = Callable[[np.ndarray], float]

_ARMIJO_C1 = 1e-4
_MAX_STEP = 1.0
_MIN_ALPHA = 1e-12


class NonFiniteObjective(ArithmeticError):
    def __init__(self, value: float, params: np.ndarray):
        self.value = value
        self.params = np.array(params)
        super().__init__(f"objective returned {value} at params {self.params.tolist()}")


@dataclass(frozen=True)
class OptimizerConfig:
    max_evals: int = 20000
    grad_step: float = 1e-5
    grad_tol: float = 1e-6
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.max_evals < 1 or self.restarts < 1:
            raise ValueError("max_evals and restarts must be >= 1")
        if self.grad_step <= 0 or self.grad_tol <= 0:
            raise ValueError("grad_step and grad_tol must be positive")


@dataclass
class OptResult:
    best_params: list[float]
    best_value: float
    evals_used: int
    converged: bool


def gradient_fd(f: Objective, theta: Sequence[float], h: float = 1e-5) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for k in range(theta.size):
        e = np.zeros_like(theta)
        e[k] = h
        grad[k] = (f(theta + e) - f(theta - e)) / (2 * h)
    return grad


class _Counted:
    def __init__(self, f: Objective):
        self.f = f
        self.evals = 0

    def __call__(self, theta: np.ndarray) -> float:
        self.evals += 1
        v = float(self.f(theta))
        if not math.isfinite(v):
            raise NonFiniteObjective(v, theta)
        return v


def _bfgs_ascent(f: _Counted, theta0: np.ndarray, cfg: OptimizerConfig) -> OptResult:
    budget = f.evals + cfg.max_evals
    n = theta0.size
    x = theta0.copy()
    fx = f(x)
    if n == 0:
        return OptResult([], fx, f.evals, True)
    grad_cost = 2 * n
    if f.evals + grad_cost > budget:
        return OptResult(x.tolist(), fx, f.evals, False)
    g = gradient_fd(f, x, cfg.grad_step)
    hinv = np.eye(n)
    fresh = True
    converged = False
    while True:
        if np.linalg.norm(g) < cfg.grad_tol:
            converged = True
            break
        d = hinv @ g
        slope = float(d @ g)
        if slope <= 0:
            hinv, d, slope, fresh = np.eye(n), g.copy(), float(g @ g), True
        dn = np.linalg.norm(d)
        if dn > _MAX_STEP:
            d *= _MAX_STEP / dn
            slope *= _MAX_STEP / dn
        alpha = 1.0
        accepted = False
        while alpha > _MIN_ALPHA and f.evals < budget:
            ft = f(x + alpha * d)
            if ft >= fx + _ARMIJO_C1 * alpha * slope and ft > fx:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            if fresh or f.evals >= budget:
                break
            # curvature model went stale; retry once along the gradient
            hinv, fresh = np.eye(n), True
            continue
        s = alpha * d
        x_new = x + s
        if f.evals + grad_cost > budget:
            x, fx = x_new, ft
            break
        g_new = gradient_fd(f, x_new, cfg.grad_step)
        # secant pair for the minimization of -f
        y = g - g_new
        sy = float(s @ y)
        if sy > 1e-12:
            rho = 1.0 / sy
            v = np.eye(n) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
            fresh = False
        x, fx, g = x_new, ft, g_new
    return OptResult(x.tolist(), fx, f.evals, converged)


def maximize(f: Objective, theta0: Sequence[float], cfg: OptimizerConfig | None = None) -> OptResult:
    """Maximize ``f`` from ``theta0``; never returns less than ``f(theta0)``.

    Restart 0 starts at ``theta0``; restart ``k >= 1`` adds seeded uniform noise
    in ``[-0.1, 0.1]``. The best restart wins, earliest index on ties.
    """
    cfg = cfg or OptimizerConfig()
    theta0 = np.asarray(theta0, dtype=float)
    if not np.all(np.isfinite(theta0)):
        raise ValueError("theta0 must be finite")
    counted = _Counted(f)
    rng = np.random.default_rng(cfg.seed)
    best: OptResult | None = None
    for r in range(cfg.restarts):
        start = theta0 if r == 0 else theta0 + rng.uniform(-0.1, 0.1, size=theta0.size)
        res = _bfgs_ascent(counted, start, cfg)
        if best is None or res.best_value > best.best_value:
            best = res
    return OptResult(best.best_params, best.best_value, counted.evals, best.converged)
