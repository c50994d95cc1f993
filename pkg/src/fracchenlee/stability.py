"""Equilibria, linearisation and stability of the special Chen-Lee system.

Eigenvalues of 3x3 Jacobians come from a closed-form cubic solver. Stability of
a fractional-order linearisation is decided by the argument test
``|arg(lambda)| > q pi / 2``; :func:`classify_e0` and :func:`classify_e2m`
encode the parameter case tables for the controlled system and must agree
with that test.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import ParameterError
from .frackernel import as_order
from .systems import State, SystemKind, SystemSpec, eval_special

__all__ = [
    "Stability",
    "EigenTriple",
    "StabilityVerdict",
    "EquilibriumFamily",
    "DiscriminantReport",
    "jacobian",
    "char_poly",
    "eigenvalues3",
    "matignon_classify",
    "equilibria_special",
    "discriminant",
    "classify_e0",
    "classify_e2m",
    "controlled_jacobian_at",
    "ZERO_EIG_TOL",
    "BOUNDARY_TOL",
]

ZERO_EIG_TOL = 1e-12
BOUNDARY_TOL = 1e-9


class Stability(str, enum.Enum):
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    MARGINALLY_STABLE = "MarginallyStable"
    UNSTABLE = "Unstable"


# ---------------------------------------------------------------------------
# linearisation


def jacobian(x, spec: SystemSpec) -> np.ndarray:
    x1, x2, x3 = x
    if spec.kind is SystemKind.CONTROLLED:
        j22 = spec.k
    elif spec.kind is SystemKind.FULL:
        j22 = -spec.b
    else:
        j22 = 0.0
    return np.array(
        [
            [spec.a, -x3, -x2],
            [x3, j22, x1],
            [x2 / 3.0, x1 / 3.0, -spec.c],
        ]
    )


def controlled_jacobian_at(a: float, c: float, k: float, m: float) -> np.ndarray:
    """``J_k`` at the equilibrium ``(0, m, 0)``, anchored there."""
    spec = SystemSpec.controlled(a, c, k, anchor=(0.0, m, 0.0))
    return jacobian((0.0, m, 0.0), spec)


def char_poly(J) -> Tuple[float, float, float, float]:
    """Coefficients ``(c3, c2, c1, c0)`` of ``det(J - lambda I)``.

    ``det(J - lambda I) = -lambda^3 + tr(J) lambda^2 - M2 lambda + det(J)``
    with ``M2`` the sum of the principal 2x2 minors.
    """
    J = np.asarray(J, dtype=np.float64)
    (a11, a12, a13), (a21, a22, a23), (a31, a32, a33) = J.tolist()
    trace = a11 + a22 + a33
    minors = (a11 * a22 - a12 * a21) + (a11 * a33 - a13 * a31) + (a22 * a33 - a23 * a32)
    det = (
        a11 * (a22 * a33 - a23 * a32)
        - a12 * (a21 * a33 - a23 * a31)
        + a13 * (a21 * a32 - a22 * a31)
    )
    return (-1.0, trace, -minors, det)


@dataclass(frozen=True)
class EigenTriple:
    lambdas: Tuple[complex, complex, complex]
    cubic: Tuple[float, float, float, float]

    def __iter__(self):
        return iter(self.lambdas)

    def residuals(self) -> Tuple[float, float, float]:
        c3, c2, c1, c0 = self.cubic
        return tuple(abs(((c3 * z + c2) * z + c1) * z + c0) for z in self.lambdas)

    def vieta_gap(self) -> float:
        c3, c2, _, _ = self.cubic
        return abs(sum(self.lambdas) + c2 / c3)


def _polish(z, b, c, d, steps=3):
    """Newton refinement on the monic cubic; keep a step only if it helps."""
    def p(w):
        return ((w + b) * w + c) * w + d

    best, best_res = z, abs(p(z))
    for _ in range(steps):
        dp = (3.0 * best + 2.0 * b) * best + c
        if dp == 0:
            break
        cand = best - p(best) / dp
        res = abs(p(cand))
        if res < best_res:
            best, best_res = cand, res
        else:
            break
    return best


def _quadratic_roots(e1: float, e0: float):
    """Roots of ``z^2 + e1 z + e0`` without cancellation."""
    disc = e1 * e1 - 4.0 * e0
    if disc >= 0.0:
        root = math.sqrt(disc)
        big = -0.5 * (e1 + math.copysign(root, e1))
        if big == 0.0:
            return 0.0, 0.0
        return big, e0 / big
    im = 0.5 * math.sqrt(-disc)
    return complex(-0.5 * e1, im), complex(-0.5 * e1, -im)


def _real_cubic_root(b: float, c: float, d: float) -> float:
    """One real root of ``z^3 + b z^2 + c z + d``; the largest if all are real."""
    shift = b / 3.0
    p = c - b * shift
    r = (2.0 * shift * shift - c) * shift + d
    half_r = 0.5 * r
    third_p = p / 3.0
    disc = half_r * half_r + third_p * third_p * third_p
    if disc <= 0.0:
        if p == 0.0:
            return -shift
        mag = 2.0 * math.sqrt(-third_p)
        cos_arg = max(-1.0, min(1.0, -half_r / (-third_p * math.sqrt(-third_p))))
        phi = math.acos(cos_arg) / 3.0
        roots = [mag * math.cos(phi - 2.0 * math.pi * i / 3.0) for i in range(3)]
        y = max(roots, key=abs)
    else:
        big = -math.copysign(1.0, r) * float(np.cbrt(abs(half_r) + math.sqrt(disc)))
        y = big - third_p / big if big != 0.0 else 0.0
    return y - shift


def eigenvalues3(J) -> EigenTriple:
    """All eigenvalues of a real 3x3 matrix, from its characteristic cubic.

    One real root is found in closed form (trigonometric branch for three real
    roots, Cardano otherwise) and polished by Newton's method; the remaining
    pair comes from the deflated quadratic. Roots are ordered by real part,
    then imaginary part.
    """
    cubic = char_poly(J)
    c3, c2, c1, c0 = cubic
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    if d == 0.0:
        first = 0.0
    else:
        first = _polish(_real_cubic_root(b, c, d), b, c, d)
    e1 = b + first
    e0 = c + first * e1
    second, third = _quadratic_roots(e1, e0)
    if isinstance(second, complex):
        second = _polish(second, b, c, d)
        third = second.conjugate()
    else:
        second = _polish(second, b, c, d)
        third = _polish(third, b, c, d)
    lambdas = sorted(
        (complex(first), complex(second), complex(third)), key=lambda z: (z.real, z.imag)
    )
    return EigenTriple(tuple(lambdas), cubic)


# ---------------------------------------------------------------------------
# fractional-order argument test


@dataclass(frozen=True)
class StabilityVerdict:
    kind: Stability
    critical_q: Optional[float] = None
    margins: Tuple[float, ...] = ()
    simple_roots: bool = True
    clause: str = ""

    @property
    def stable(self) -> bool:
        return self.kind is Stability.ASYMPTOTICALLY_STABLE


def _simple(lambdas, tol=BOUNDARY_TOL) -> bool:
    return all(
        abs(lambdas[i] - lambdas[j]) > tol for i in range(3) for j in range(i + 1, 3)
    )


def matignon_classify(eigs, q, tol: float = BOUNDARY_TOL) -> StabilityVerdict:
    """Classify an equilibrium from the Jacobian eigenvalues and the order ``q``.

    ``margins[i] = |arg(lambda_i)| - q pi / 2``. A (numerically) zero eigenvalue
    has no argument and makes the point unstable outright. Boundary cases are
    reported as marginal; roots are assumed simple, and whether they are is
    recorded in ``simple_roots``.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    q = as_order(q)
    lambdas = tuple(complex(z) for z in eigs)
    half_cone = 0.5 * q * math.pi
    margins = []
    zero = False
    for z in lambdas:
        if abs(z) <= ZERO_EIG_TOL:
            zero = True
            margins.append(-half_cone)
        else:
            margins.append(abs(cmath.phase(z)) - half_cone)

    spirals = [z for z in lambdas if z.real > 0.0 and z.imag != 0.0 and abs(z) > ZERO_EIG_TOL]
    critical = min((2.0 * abs(cmath.phase(z)) / math.pi for z in spirals), default=None)

    if zero or any(m < -tol for m in margins):
        kind = Stability.UNSTABLE
    elif all(m > tol for m in margins):
        kind = Stability.ASYMPTOTICALLY_STABLE
    else:
        kind = Stability.MARGINALLY_STABLE
    return StabilityVerdict(kind, critical, tuple(margins), _simple(lambdas))


# ---------------------------------------------------------------------------
# equilibria and parameter case tables


@dataclass(frozen=True)
class EquilibriumFamily:
    """The line of equilibria ``{(0, m, 0)}`` of the special system."""

    a: float
    c: float
    description: str = field(default="{(0, m, 0) : m real}")

    def sample(self, m: float) -> State:
        return State(0.0, float(m), 0.0)

    def residual(self, m: float) -> float:
        return math.hypot(*eval_special(self.sample(m), self.a, self.c))


def equilibria_special(a: float, c: float) -> EquilibriumFamily:
    if a * c == 0.0:
        raise ParameterError(f"the special system needs a*c != 0, got a={a!r}, c={c!r}")
    return EquilibriumFamily(a, c)


@dataclass(frozen=True)
class DiscriminantReport:
    delta: float
    q2: Optional[float]
    regime: str


def discriminant(a: float, c: float, m: float) -> DiscriminantReport:
    """``(a + c)^2 - 4 m^2 / 3`` and the critical order of the spiral pair.

    The regime names the case of the ``k < 0`` table the triple falls into.
    """
    delta = (a + c) ** 2 - 4.0 * m * m / 3.0
    q2 = None
    if delta < 0.0:
        if a > c:
            q2 = 2.0 / math.pi * math.atan(math.sqrt(-delta) / (a - c))
            regime = "1(ii)"
        elif a < c:
            regime = "1(i)"
        else:
            regime = "1:a=c"
    elif delta > 0.0:
        product = -a * c + m * m / 3.0
        if product < 0.0:
            regime = "2(ii)"
        elif product == 0.0:
            regime = "2:zero-root"
        elif a < c and a * c > 0.0:
            regime = "2(i)"
        elif a < c:
            regime = "2:real-negative"
        else:
            regime = "2:real-positive"
    else:
        regime = "delta=0"
    return DiscriminantReport(delta, q2, regime)


def _validate(a, c, k):
    if a * c == 0.0:
        raise ParameterError(f"need a*c != 0, got a={a!r}, c={c!r}")
    if k == 0.0:
        raise ParameterError("control gain k must be nonzero")


def classify_e0(a: float, c: float, k: float, q) -> StabilityVerdict:
    """Stability of the origin for the controlled system (eigenvalues a, -c, k)."""
    _validate(a, c, k)
    q = as_order(q)
    if k > 0.0:
        return StabilityVerdict(Stability.UNSTABLE, clause="T3.2")
    if a < 0.0 and c > 0.0:
        return StabilityVerdict(Stability.ASYMPTOTICALLY_STABLE, clause="T3.1(i)")
    return StabilityVerdict(Stability.UNSTABLE, clause="T3.1(ii)")


def classify_e2m(a: float, c: float, k: float, m: float, q, tol: float = BOUNDARY_TOL) -> StabilityVerdict:
    """Stability of ``(0, m, 0)``, ``m != 0``, for the controlled system.

    Eigenvalues are ``k`` and the roots of ``z^2 - (a - c) z - ac + m^2/3``.
    Real-root cases beyond the classical case table (mixed-sign ``ac`` and
    ``a > c``) are decided by the same sign rules and tagged accordingly.
    """
    _validate(a, c, k)
    if m == 0.0:
        raise ParameterError("m must be nonzero; use classify_e0 for the origin")
    q = as_order(q)
    if k > 0.0:
        return StabilityVerdict(Stability.UNSTABLE, clause="T4.3")

    rep = discriminant(a, c, m)
    AS, MS, UN = Stability.ASYMPTOTICALLY_STABLE, Stability.MARGINALLY_STABLE, Stability.UNSTABLE
    if rep.delta < 0.0:
        if a < c:
            return StabilityVerdict(AS, clause="T4.1(i)")
        if a > c:
            gap = (rep.q2 - q) * math.pi / 2.0
            if gap > tol:
                kind, clause = AS, "T4.1(ii)(a)"
            elif gap < -tol:
                kind, clause = UN, "T4.1(ii)(b)"
            else:
                kind, clause = MS, "T4.1(ii)(a)"
            return StabilityVerdict(kind, critical_q=rep.q2, clause=clause)
        # a == c: spiral pair on the imaginary axis, critical order 1
        gap = (1.0 - q) * math.pi / 2.0
        return StabilityVerdict(AS if gap > tol else MS, clause="T4.1:a=c")

    total = a - c
    product = -a * c + m * m / 3.0
    if product <= 0.0:
        # one nonnegative real root
        return StabilityVerdict(UN, clause="T4.2(ii)")
    if rep.delta == 0.0:
        return StabilityVerdict(AS if total < 0.0 else UN, clause="T4:delta=0")
    if total < 0.0:
        return StabilityVerdict(AS, clause="T4.2(i)" if a * c > 0.0 else "T4.2:signs")
    return StabilityVerdict(UN, clause="T4.2:signs")
