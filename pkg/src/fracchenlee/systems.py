"""Chen-Lee vector fields: full, special (b = 0) and controlled variants."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ParameterError

__all__ = [
    "State",
    "ParamsCL",
    "ControlSpec",
    "MatrixForm",
    "SystemKind",
    "SystemSpec",
    "eval_full",
    "eval_special",
    "eval_controlled",
    "matrix_form",
    "lipschitz_bound",
    "ANCHOR_RESIDUAL_TOL",
]

ANCHOR_RESIDUAL_TOL = 1e-12


class State(NamedTuple):
    x1: float
    x2: float
    x3: float


@dataclass(frozen=True)
class ParamsCL:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.b, self.c)):
            raise ParameterError(f"parameters must be finite, got {self}")


def _check_special(a: float, c: float) -> None:
    if a * c == 0.0:
        raise ParameterError(f"the special system needs a*c != 0, got a={a!r}, c={c!r}")


def eval_full(x, p: ParamsCL) -> State:
    x1, x2, x3 = x
    return State(-x2 * x3 + p.a * x1, x1 * x3 - p.b * x2, x1 * x2 / 3.0 - p.c * x3)


def eval_special(x, a: float, c: float) -> State:
    _check_special(a, c)
    x1, x2, x3 = x
    return State(-x2 * x3 + a * x1, x1 * x3, x1 * x2 / 3.0 - c * x3)


@dataclass(frozen=True)
class ControlSpec:
    """Feedback ``k (x2 - anchor2)`` added to the second equation."""

    k: float
    anchor: State = State(0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.k == 0.0 or not math.isfinite(self.k):
            raise ParameterError(f"control gain k must be finite and nonzero, got {self.k!r}")
        object.__setattr__(self, "anchor", State(*map(float, self.anchor)))

    def check_anchor(self, a: float, c: float) -> None:
        """Raise unless the anchor is an equilibrium of the special system."""
        residual = math.hypot(*eval_special(self.anchor, a, c))
        if residual > ANCHOR_RESIDUAL_TOL:
            raise ParameterError(
                f"anchor {tuple(self.anchor)} is not an equilibrium (residual {residual:.3g})"
            )


def eval_controlled(x, a: float, c: float, ctrl: ControlSpec, offset: bool = True) -> State:
    """Right-hand side of the controlled system.

    With ``offset=False`` the control term is ``k x2`` rather than
    ``k (x2 - anchor2)``; the two agree only for anchors with ``x2 = 0``.
    """
    _check_special(a, c)
    if ctrl.k == 0.0:
        raise ParameterError("control gain k must be nonzero")
    x1, x2, x3 = x
    shift = ctrl.anchor.x2 if offset else 0.0
    return State(-x2 * x3 + a * x1, x1 * x3 + ctrl.k * (x2 - shift), x1 * x2 / 3.0 - c * x3)


class SystemKind(str, enum.Enum):
    FULL = "full"
    SPECIAL = "special"
    CONTROLLED = "controlled"


@dataclass(frozen=True)
class SystemSpec:
    """Which member of the family to integrate or linearise, with its parameters."""

    kind: SystemKind
    a: float
    c: float
    b: float = 0.0
    control: Optional[ControlSpec] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SystemKind(self.kind))
        ParamsCL(self.a, self.b, self.c)
        if self.kind is SystemKind.FULL:
            return
        _check_special(self.a, self.c)
        if self.kind is SystemKind.SPECIAL:
            if self.b != 0.0:
                raise ParameterError("the special system has b = 0")
            return
        if self.control is None:
            raise ParameterError("the controlled system needs a ControlSpec")
        if self.b != 0.0:
            raise ParameterError("the controlled system is built on the special one (b = 0)")
        self.control.check_anchor(self.a, self.c)

    @classmethod
    def full(cls, a: float, b: float, c: float) -> "SystemSpec":
        return cls(SystemKind.FULL, a, c, b=b)

    @classmethod
    def special(cls, a: float, c: float) -> "SystemSpec":
        return cls(SystemKind.SPECIAL, a, c)

    @classmethod
    def controlled(cls, a: float, c: float, k: float, anchor=(0.0, 0.0, 0.0)) -> "SystemSpec":
        return cls(SystemKind.CONTROLLED, a, c, control=ControlSpec(k, State(*anchor)))

    @property
    def k(self) -> float:
        return self.control.k if self.control is not None else 0.0

    def rhs(self, x, offset: bool = True) -> State:
        if self.kind is SystemKind.CONTROLLED:
            return eval_controlled(x, self.a, self.c, self.control, offset=offset)
        if self.kind is SystemKind.SPECIAL:
            return eval_special(x, self.a, self.c)
        return eval_full(x, ParamsCL(self.a, self.b, self.c))


@dataclass(frozen=True)
class MatrixForm:
    """Quadratic-plus-linear form ``x1 A x + x2 C x + B x`` of the special system.

    The literal form has only the ``x1 A x + B x`` part; ``C`` carries the
    ``-x2 x3`` term of the first equation, which no ``x1``-scaled matrix can.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return x[0] * (self.A @ x) + x[1] * (self.C @ x) + self.B @ x


def matrix_form(a: float, c: float, literal: bool = False) -> MatrixForm:
    """Matrices of the bilinear representation.

    ``literal=True`` returns the literal ``A`` and ``B`` (with ``B[1, 0] = 1``
    and no ``C`` term). That pair does not reproduce the vector field: the
    result differs from :func:`eval_special` by ``(x2 x3, x1, 0)``. The default
    returns a representation that does.
    """
    A = np.zeros((3, 3))
    A[1, 2] = 1.0
    A[2, 1] = 1.0 / 3.0
    C = np.zeros((3, 3))
    B = np.zeros((3, 3))
    B[0, 0] = a
    B[2, 2] = -c
    if literal:
        B[1, 0] = 1.0
    else:
        C[0, 2] = -1.0
    return MatrixForm(A, B, C)


def lipschitz_bound(a: float, c: float, x0, delta: float, norm: str = "paper") -> float:
    """Lipschitz constant of the special system on the box ``x0 +- delta``.

    ``norm="paper"`` uses ``||B|| = sqrt(1 + c^2)`` (omits ``a``);
    ``norm="frobenius"`` uses the Frobenius norm ``sqrt(a^2 + 1 + c^2)``.
    ``|x0|`` is the Euclidean norm.
    """
    if not delta > 0.0:
        raise ParameterError(f"box half-width delta must be > 0, got {delta!r}")
    if norm == "paper":
        norm_b = math.sqrt(1.0 + c * c)
    elif norm == "frobenius":
        norm_b = math.sqrt(a * a + 1.0 + c * c)
    else:
        raise ParameterError(f"unknown norm {norm!r}")
    norm_a = math.sqrt(10.0) / 3.0
    return 1.0 + norm_a + norm_b + math.sqrt(sum(v * v for v in x0)) + delta
