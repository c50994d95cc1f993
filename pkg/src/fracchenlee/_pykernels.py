"""Pure-Python implementations of the hot kernels.

These mirror ``_ckernels.pyx`` operation for operation, so that both backends
round identically on IEEE-754 hardware.
"""
import math

import numpy as np

DIVERGENCE_LIMIT = 1e12


def product_trapezoid(values, alpha, length):
    """Integrate ``(length - s)**(alpha - 1) * f(s)`` over ``[0, length]``.

    ``values`` are samples of ``f`` on a uniform grid including both ends; ``f``
    is interpolated linearly and the power-law weight is integrated exactly on
    every panel.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    n = values.shape[0] - 1
    h = length / n
    beta = alpha + 1.0
    scale = h**alpha / (alpha * beta)

    # distance index k = n - j for the interior nodes j = 1 .. n-1
    k = np.arange(n - 1, 0, -1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        # log1p(-1) = -inf at k = 1 is intended: expm1(-inf) = -1
        inner = k**beta * (
            np.expm1(beta * np.log1p(1.0 / k)) + np.expm1(beta * np.log1p(-1.0 / k))
        )
    nn = float(n)
    if n == 1:
        first = alpha
    else:
        first = nn**beta * (math.expm1(beta * math.log1p(-1.0 / nn)) + beta / nn)

    total = first * values[0] + values[n]
    total += float(np.dot(inner, values[1:n]))
    return float(scale * total)


def step_weight(j, q, inv_gamma, h, n_steps, rho, t_kernel, t0, literal):
    """Effective step ``h * g`` applied at step ``j``; ``g`` is the exponential kernel."""
    if literal:
        tau = t_kernel - j
    else:
        tau = (t0 + (n_steps + 1) * h) - (t0 + j * h)
    if not tau > 0.0:
        raise ValueError(f"kernel argument must be positive, got {tau!r} at step {j}")
    g = inv_gamma * math.pow(tau, q - 1.0) * math.exp(-rho * tau)
    return h * g


def rhs(x1, x2, x3, a, b, c, k, offset, controlled):
    f1 = -x2 * x3 + a * x1
    if controlled:
        f2 = x1 * x3 + k * (x2 - offset)
    else:
        f2 = x1 * x3 - b * x2
    f3 = x1 * x2 / 3.0 - c * x3
    return f1, f2, f3


def euler_loop(x0, a, b, c, k, offset, controlled, q, inv_gamma, h, n_steps,
               rho, t_kernel, t0, literal, out):
    """Run ``n_steps`` fractional Euler steps, writing states into ``out``.

    Returns ``(count, diverged)`` where ``count`` is the number of rows filled.
    """
    x1, x2, x3 = float(x0[0]), float(x0[1]), float(x0[2])
    out[0, 0] = x1
    out[0, 1] = x2
    out[0, 2] = x3
    for j in range(n_steps):
        w = step_weight(j, q, inv_gamma, h, n_steps, rho, t_kernel, t0, literal)
        f1, f2, f3 = rhs(x1, x2, x3, a, b, c, k, offset, controlled)
        x1 = x1 + w * f1
        x2 = x2 + w * f2
        x3 = x3 + w * f3
        if not (abs(x1) <= DIVERGENCE_LIMIT and abs(x2) <= DIVERGENCE_LIMIT
                and abs(x3) <= DIVERGENCE_LIMIT):
            return j + 1, True
        out[j + 1, 0] = x1
        out[j + 1, 1] = x2
        out[j + 1, 2] = x3
    return n_steps + 1, False
