"""Explicit fractional Euler scheme with the exponential kernel.

The update is ``x[j+1] = x[j] + h * g(j) * F(x[j])`` with
``g = (t - s)**(q - 1) * exp(-rho (t - s)) / Gamma(q)``. Two readings of the
kernel argument are supported:

``paper-literal``
    ``t - s = t_kernel - j`` with ``j`` the raw step index.
``time-consistent``
    ``t - s = T - t_j`` with ``t_j = t0 + j h`` and ``T = t0 + (N + 1) h``.

With ``q = 1`` and ``rho = 0`` both reduce to forward Euler.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Tuple

import numpy as np

from . import _pykernels
from ._backend import kernels
from .errors import ConfigError
from .frackernel import as_order, gamma
from .systems import State, SystemKind, SystemSpec

__all__ = [
    "KernelMode",
    "ControlMode",
    "IntegratorConfig",
    "Trajectory",
    "ConvergenceReport",
    "initial_condition",
    "step_weight",
    "euler_step",
    "simulate",
    "convergence_report",
]


class KernelMode(str, enum.Enum):
    PAPER_LITERAL = "paper-literal"
    TIME_CONSISTENT = "time-consistent"


class ControlMode(str, enum.Enum):
    EQ15_OFFSET = "eq15-offset"
    EQ24_LITERAL = "eq24-literal"


@dataclass(frozen=True)
class IntegratorConfig:
    q: float = 0.9
    h: float = 0.01
    N: int = 500
    rho: float = 0.01
    epsilon: float = 0.01
    t_kernel: float = 502.0
    t0: float = 0.0
    kernel_mode: KernelMode = KernelMode.PAPER_LITERAL
    control_mode: ControlMode = ControlMode.EQ15_OFFSET

    def __post_init__(self):
        try:
            object.__setattr__(self, "q", as_order(self.q))
            object.__setattr__(self, "kernel_mode", KernelMode(self.kernel_mode))
            object.__setattr__(self, "control_mode", ControlMode(self.control_mode))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise ConfigError(f"step size h must be positive, got {self.h!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if not self.rho >= 0.0:
            raise ConfigError(f"rho must be >= 0, got {self.rho!r}")
        for name in ("epsilon", "t_kernel", "t0"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.kernel_mode is KernelMode.PAPER_LITERAL and not self.t_kernel > self.N:
            raise ConfigError(
                f"paper-literal kernel needs t_kernel > N (got t_kernel={self.t_kernel}, N={self.N})"
            )

    @property
    def literal(self) -> bool:
        return self.kernel_mode is KernelMode.PAPER_LITERAL


@dataclass
class Trajectory:
    """States ``x[j]`` at times ``t[j] = t0 + j h``.

    Holds ``N + 1`` rows unless the run diverged, in which case it stops at
    the last finite state within the divergence limit.
    """

    j: np.ndarray
    t: np.ndarray
    x: np.ndarray
    config: IntegratorConfig
    system: SystemSpec
    diverged: bool = False

    def __len__(self) -> int:
        return self.x.shape[0]

    def __iter__(self) -> Iterator[Tuple[int, float, State]]:
        for j, t, row in zip(self.j, self.t, self.x):
            yield int(j), float(t), State(*map(float, row))


def initial_condition(x_e, epsilon: float) -> State:
    return State(*(float(v) + epsilon for v in x_e))


def _kernel_args(cfg: IntegratorConfig):
    return (cfg.q, 1.0 / gamma(cfg.q), cfg.h, cfg.N, cfg.rho, float(cfg.t_kernel), cfg.t0, cfg.literal)


def step_weight(j: int, cfg: IntegratorConfig) -> float:
    """``h * g`` for step ``j``; always strictly positive for a valid config."""
    q, inv_gamma, h, n, rho, t_kernel, t0, literal = _kernel_args(cfg)
    return _pykernels.step_weight(j, q, inv_gamma, h, n, rho, t_kernel, t0, literal)


def _rhs_args(sys: SystemSpec, cfg: IntegratorConfig):
    controlled = sys.kind is SystemKind.CONTROLLED
    offset = 0.0
    if controlled and cfg.control_mode is ControlMode.EQ15_OFFSET:
        offset = sys.control.anchor.x2
    b = sys.b if sys.kind is SystemKind.FULL else 0.0
    return sys.a, b, sys.c, sys.k, offset, controlled


def euler_step(x_j, j: int, cfg: IntegratorConfig, sys: SystemSpec) -> State:
    """Single update, evaluated in pure Python."""
    w = step_weight(j, cfg)
    a, b, c, k, offset, controlled = _rhs_args(sys, cfg)
    x1, x2, x3 = map(float, x_j)
    f1, f2, f3 = _pykernels.rhs(x1, x2, x3, a, b, c, k, offset, controlled)
    return State(x1 + w * f1, x2 + w * f2, x3 + w * f3)


def simulate(cfg: IntegratorConfig, sys: SystemSpec, x_e) -> Trajectory:
    """Start from ``x_e + epsilon`` and run ``N`` steps on the selected backend."""
    x0 = initial_condition(x_e, cfg.epsilon)
    out = np.empty((cfg.N + 1, 3), dtype=np.float64)
    q, inv_gamma, h, n, rho, t_kernel, t0, literal = _kernel_args(cfg)
    a, b, c, k, offset, controlled = _rhs_args(sys, cfg)
    count, diverged = kernels.euler_loop(
        np.asarray(x0, dtype=np.float64), a, b, c, k, offset, controlled,
        q, inv_gamma, h, n, rho, t_kernel, t0, literal, out,
    )
    j = np.arange(count)
    return Trajectory(
        j=j,
        t=cfg.t0 + j * cfg.h,
        x=out[:count].copy(),
        config=cfg,
        system=sys,
        diverged=bool(diverged),
    )


@dataclass(frozen=True)
class ConvergenceReport:
    distances: np.ndarray = field(repr=False)
    initial: float
    terminal: float
    minimum: float
    tail_nonincreasing: bool

    @property
    def converging(self) -> bool:
        return self.terminal < self.initial and self.tail_nonincreasing


def convergence_report(traj: Trajectory, x_e, tail: float = 0.2, tol: float = 1e-9) -> ConvergenceReport:
    """Euclidean distance to ``x_e`` per step, with a summary.

    ``tail_nonincreasing`` checks the last ``tail`` fraction of the steps for
    increases larger than ``tol``.
    """
    distances = np.linalg.norm(traj.x - np.asarray(x_e, dtype=np.float64), axis=1)
    start = int(math.floor((1.0 - tail) * (len(distances) - 1)))
    steps = np.diff(distances[start:])
    return ConvergenceReport(
        distances=distances,
        initial=float(distances[0]),
        terminal=float(distances[-1]),
        minimum=float(distances.min()),
        tail_nonincreasing=bool(np.all(steps <= tol)),
    )
