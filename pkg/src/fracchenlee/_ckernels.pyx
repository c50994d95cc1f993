# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Operation order matches ``_pykernels`` exactly."""
from libc.math cimport exp, fabs, pow

cdef double DIVERGENCE_LIMIT = 1e12


cdef inline double _weight(Py_ssize_t j, double q, double inv_gamma, double h,
                           Py_ssize_t n_steps, double rho, double t_kernel,
                           double t0, bint literal) except? -1.0:
    cdef double tau
    if literal:
        tau = t_kernel - <double>j
    else:
        tau = (t0 + <double>(n_steps + 1) * h) - (t0 + <double>j * h)
    if not tau > 0.0:
        raise ValueError(f"kernel argument must be positive, got {tau!r} at step {j}")
    return h * (inv_gamma * pow(tau, q - 1.0) * exp(-rho * tau))


def step_weight(Py_ssize_t j, double q, double inv_gamma, double h,
                Py_ssize_t n_steps, double rho, double t_kernel, double t0,
                bint literal):
    return _weight(j, q, inv_gamma, h, n_steps, rho, t_kernel, t0, literal)


def euler_loop(x0, double a, double b, double c, double k, double offset,
               bint controlled, double q, double inv_gamma, double h,
               Py_ssize_t n_steps, double rho, double t_kernel, double t0,
               bint literal, double[:, ::1] out):
    cdef double x1 = x0[0], x2 = x0[1], x3 = x0[2]
    cdef double f1, f2, f3, w
    cdef Py_ssize_t j
    out[0, 0] = x1
    out[0, 1] = x2
    out[0, 2] = x3
    for j in range(n_steps):
        w = _weight(j, q, inv_gamma, h, n_steps, rho, t_kernel, t0, literal)
        f1 = -x2 * x3 + a * x1
        if controlled:
            f2 = x1 * x3 + k * (x2 - offset)
        else:
            f2 = x1 * x3 - b * x2
        f3 = x1 * x2 / 3.0 - c * x3
        x1 = x1 + w * f1
        x2 = x2 + w * f2
        x3 = x3 + w * f3
        if not (fabs(x1) <= DIVERGENCE_LIMIT and fabs(x2) <= DIVERGENCE_LIMIT
                and fabs(x3) <= DIVERGENCE_LIMIT):
            return j + 1, True
        out[j + 1, 0] = x1
        out[j + 1, 1] = x2
        out[j + 1, 2] = x3
    return n_steps + 1, False
