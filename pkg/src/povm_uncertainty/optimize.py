"""Seeded multi-start optimizers over pure states and ancilla unitaries.

Every start draws from its own generator seeded with ``(seed, start_index)``
so results do not depend on how starts are scheduled. Among equal final
values the lowest start index wins.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError
from .linalg import expi_hermitian, fix_phase, hermitian_from_params

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    seed: int = 0
    starts: int = 32
    max_iterations: int = 2000
    tolerance: float = 1e-9
    smoothing_schedule: tuple[float, ...] = (8.0, 32.0, 128.0, 512.0)
    fd_step: float = 1e-6

    def __post_init__(self):
        if self.starts < 1:
            raise DomainError("starts must be >= 1")
        if self.tolerance <= 0:
            raise DomainError("tolerance must be positive")
        object.__setattr__(self, "smoothing_schedule", tuple(float(b) for b in self.smoothing_schedule))

    def rng(self, start: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, start])

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "starts": self.starts,
            "max_iterations": self.max_iterations,
            "tolerance": self.tolerance,
            "smoothing_schedule": list(self.smoothing_schedule),
        }


@dataclass
class OptimizationResult:
    best_value: float
    best_point: np.ndarray
    starts_converged: int
    start_values: list[float] = field(default_factory=list)
    best_start: int = 0
    trace: list[float] | None = None


def _fd_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, h: float) -> np.ndarray:
    g = np.empty_like(x)
    for i in range(len(x)):
        step = h * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += step
        xm[i] -= step
        g[i] = (f(xp) - f(xm)) / (2 * step)
    return g


def _descend(f, x0, retract, project, config: OptimizerConfig, record: bool = False):
    """Backtracking steepest descent with a retraction.

    Returns ``(x, value, converged, trace)``; stops after three consecutive
    steps improving by less than ``config.tolerance``.
    """
    x = retract(x0)
    fx = f(x)
    if not np.isfinite(fx):
        return x, fx, False, None
    trace = [fx] if record else None
    t = 0.1
    stalls = 0
    for _ in range(config.max_iterations):
        g = project(x, _fd_gradient(f, x, config.fd_step))
        gg = float(g @ g)
        if not np.isfinite(gg):
            return x, float("nan"), False, trace
        if gg == 0.0:
            return x, fx, True, trace
        t = min(t * 2.0, 1e3)
        while True:
            x_new = retract(x - t * g)
            f_new = f(x_new)
            if np.isfinite(f_new) and f_new <= fx - 1e-4 * t * gg:
                break
            t *= 0.5
            if t < 1e-16:
                return x, fx, True, trace
        improvement = fx - f_new
        x, fx = x_new, f_new
        if record:
            trace.append(fx)
        stalls = stalls + 1 if improvement < config.tolerance else 0
        if stalls >= 3:
            return x, fx, True, trace
    return x, fx, False, trace


def _to_complex(x: np.ndarray) -> np.ndarray:
    d = len(x) // 2
    return x[:d] + 1j * x[d:]


def _to_real(psi: np.ndarray) -> np.ndarray:
    return np.concatenate([psi.real, psi.imag])


def _state_retract(x: np.ndarray) -> np.ndarray:
    psi = _to_complex(x)
    psi = fix_phase(psi / np.linalg.norm(psi))
    return _to_real(psi)


def _state_project(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    # drop the radial and global-phase directions
    phase_dir = _to_real(1j * _to_complex(x))
    for u in (x, phase_dir):
        u = u / np.linalg.norm(u)
        g = g - u * (u @ g)
    return g


def minimize_over_pure_states(objective: Callable[[np.ndarray], float], dim: int,
                              config: OptimizerConfig | None = None, record: bool = False) -> OptimizationResult:
    """Minimize ``objective(psi)`` over unit vectors in C^dim."""
    config = config or OptimizerConfig()

    def f(x):
        psi = _to_complex(x)
        return float(objective(psi / np.linalg.norm(psi)))

    best_value, best_point, best_start = np.inf, None, -1
    converged = 0
    values, best_trace = [], None
    for start in range(config.starts):
        rng = config.rng(start)
        psi0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        x, fx, ok, trace = _descend(f, _to_real(psi0), _state_retract, _state_project, config, record)
        if not np.isfinite(fx):
            log.warning("start %d aborted: objective is not finite", start)
            values.append(float("nan"))
            continue
        converged += ok
        values.append(fx)
        if fx < best_value:
            best_value, best_point, best_start, best_trace = fx, _to_complex(x), start, trace
    if best_point is None:
        raise DomainError("every start produced a non-finite objective")
    return OptimizationResult(best_value, best_point, converged, values, best_start, best_trace)


def unitary_from_params(params: np.ndarray, adim: int) -> np.ndarray:
    return expi_hermitian(hermitian_from_params(params, adim))


def maximize_over_ancilla_unitaries(objective: Callable[[np.ndarray], float], adim: int,
                                    config: OptimizerConfig | None = None,
                                    smoothed: Callable[[np.ndarray, float], float] | None = None,
                                    ) -> OptimizationResult:
    """Maximize ``objective(U)`` over U = exp(iG) acting on an ``adim``-dimensional ancilla.

    When ``smoothed(U, beta)`` is given it is ascended for each sharpness in
    the smoothing schedule before the exact objective is polished with
    Nelder-Mead.
    """
    config = config or OptimizerConfig()
    if adim < 0:
        raise DomainError("ancilla dimension must be non-negative")
    if adim == 0:
        u = np.zeros((0, 0), dtype=complex)
        return OptimizationResult(float(objective(u)), u, config.starts, [float(objective(u))] * config.starts)

    def exact(p):
        return -float(objective(unitary_from_params(p, adim)))

    ident = lambda p: p  # noqa: E731
    flat = lambda p, g: g  # noqa: E731
    best_value, best_params, best_start = -np.inf, None, -1
    converged = 0
    values = []
    for start in range(config.starts):
        rng = config.rng(start)
        p = rng.uniform(-np.pi, np.pi, adim * adim)
        ok = True
        if smoothed is not None:
            for beta in config.smoothing_schedule:
                def soft(q, beta=beta):
                    return -float(smoothed(unitary_from_params(q, adim), beta))
                p, fp, ok, _ = _descend(soft, p, ident, flat, config)
                if not np.isfinite(fp):
                    break
        f0 = exact(p)
        if not np.isfinite(f0):
            log.warning("start %d aborted: objective is not finite", start)
            values.append(float("nan"))
            continue
        res = minimize(exact, p, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": config.tolerance * 1e-3,
                                "maxiter": config.max_iterations * max(1, adim * adim)})
        if np.isfinite(res.fun) and res.fun <= f0:
            p, f0 = res.x, float(res.fun)
        converged += bool(ok)
        value = -f0
        values.append(value)
        if value > best_value:
            best_value, best_params, best_start = value, p, start
    if best_params is None:
        raise DomainError("every start produced a non-finite objective")
    return OptimizationResult(best_value, unitary_from_params(best_params, adim), converged, values, best_start)
