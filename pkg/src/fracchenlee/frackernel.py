"""Fractional-calculus primitives.

Gamma function, the exponential (tempered) fractional kernel, and product
integration rules for the Riemann-Liouville integral and the Caputo derivative
of order ``q`` in ``(0, 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from ._pykernels import product_trapezoid
from .errors import DomainError

__all__ = [
    "FractionalOrder",
    "KernelParams",
    "gamma",
    "kernel_g",
    "rl_integral",
    "caputo_derivative",
    "tempered_integral",
    "as_order",
]

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class FractionalOrder:
    """Derivative order ``q`` restricted to ``0 < q <= 1``."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q <= 1.0):
            raise DomainError(f"fractional order must lie in (0, 1], got {self.q!r}")
        object.__setattr__(self, "q", q)

    def __float__(self) -> float:
        return self.q


def as_order(q: Union[float, FractionalOrder]) -> float:
    """Validate ``q`` as a fractional order and return it as a float."""
    if isinstance(q, FractionalOrder):
        return q.q
    return FractionalOrder(q).q


@dataclass(frozen=True)
class KernelParams:
    """Parameters of ``g(s) = (t - s)**(q - 1) * exp(-rho * (t - s)) / Gamma(q)``."""

    q: float
    rho: float
    t: float

    def __post_init__(self):
        object.__setattr__(self, "q", as_order(self.q))
        if not self.rho >= 0.0:
            raise DomainError(f"kernel decay rho must be >= 0, got {self.rho!r}")
        if not math.isfinite(self.t):
            raise DomainError(f"kernel upper time must be finite, got {self.t!r}")


def gamma(x: float) -> float:
    """Euler's Gamma function for ``x > 0``.

    Positive integers are returned exactly as factorials; everything else goes
    through the Lanczos series, with reflection below 1/2.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"gamma is only defined here for x > 0, got {x!r}")
    if x.is_integer() and x <= 171.0:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (x + 0.5) * math.exp(-t) * acc


def kernel_g(params: KernelParams, s: float) -> float:
    """Evaluate the exponential fractional kernel at ``s < t``."""
    lag = params.t - s
    if not lag > 0.0:
        raise DomainError(f"kernel is singular or undefined for s >= t (t - s = {lag!r})")
    return lag ** (params.q - 1.0) * math.exp(-params.rho * lag) / gamma(params.q)


Samples = Union[Callable[[np.ndarray], np.ndarray], Sequence[float], np.ndarray]


def _sample(f: Samples, t0: float, t: float, nodes: int) -> np.ndarray:
    if callable(f):
        grid = np.linspace(t0, t, nodes)
        values = np.asarray(f(grid), dtype=np.float64)
        if values.shape == ():
            values = np.full(nodes, float(values))
        return values
    values = np.asarray(f, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] != nodes:
        raise DomainError(f"expected {nodes} samples on a uniform grid, got shape {values.shape}")
    return values


def rl_integral(f: Samples, alpha: float, t: float, nodes: int = 1025) -> float:
    """Riemann-Liouville integral of order ``alpha`` of ``f`` at time ``t``.

    ``f`` is either a vectorised callable or ``nodes`` samples on the uniform
    grid over ``[0, t]``. The rule interpolates ``f`` linearly and integrates the
    power-law weight exactly on each panel, so it is exact for linear ``f``.
    """
    if not alpha > 0.0:
        raise DomainError(f"integral order must be > 0, got {alpha!r}")
    if not t > 0.0:
        raise DomainError(f"upper limit must be > 0, got {t!r}")
    if nodes < 2:
        raise DomainError("need at least two quadrature nodes")
    values = _sample(f, 0.0, t, nodes)
    return product_trapezoid(values, float(alpha), float(t)) / gamma(alpha)


def caputo_derivative(fprime: Samples, q: float, t: float, nodes: int = 1025) -> float:
    """Caputo derivative of order ``q`` in ``(0, 1)`` at time ``t``.

    Takes the first derivative of the function, not the function itself: the
    Caputo derivative is the order ``1 - q`` integral of ``f'``.
    """
    q = float(q)
    if not (0.0 < q < 1.0):
        raise DomainError(f"Caputo order must lie in (0, 1), got {q!r}")
    if not t > 0.0:
        raise DomainError(f"time must be > 0, got {t!r}")
    if nodes < 2:
        raise DomainError("need at least two quadrature nodes")
    values = _sample(fprime, 0.0, t, nodes)
    return product_trapezoid(values, 1.0 - q, float(t)) / gamma(1.0 - q)


def tempered_integral(
    f: Callable[[np.ndarray], np.ndarray],
    q: float,
    t: float,
    rho: float = 0.0,
    t0: float = 0.0,
    nodes: int = 1025,
) -> float:
    """Integral of ``f`` against the exponential kernel over ``[t0, t]``.

    With ``rho = 0`` this is the Riemann-Liouville integral started at ``t0``.
    The smooth factor ``exp(-rho (t - s))`` is folded into the samples.
    """
    params = KernelParams(q, rho, t)
    if not t > t0:
        raise DomainError(f"need t > t0, got t={t!r}, t0={t0!r}")
    if nodes < 2:
        raise DomainError("need at least two quadrature nodes")
    grid = np.linspace(t0, t, nodes)
    values = np.asarray(f(grid), dtype=np.float64) * np.exp(-params.rho * (t - grid))
    return product_trapezoid(values, params.q, t - t0) / gamma(params.q)
