# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Rayleigh-Sommerfeld quadrature kernels.

Both routines mirror ``_kernel_py`` exactly; the pure-Python versions are the
reference and the tests compare the two.
"""
import numpy as np

from libc.math cimport sqrt, cos, sin, fabs, M_PI
from scipy.special.cython_special cimport j0


def rs_radial(const double[::1] r, const double[::1] w, const double complex[::1] u,
              const double[::1] rho, double z, double k):
    cdef Py_ssize_t n = r.shape[0], m = rho.shape[0], i, j
    cdef double az = fabs(z), sgn = 1.0 if z > 0 else -1.0
    cdef double R, rr, a, ph, c, s, kr, kre, kim, acc_re, acc_im, rho_j, rho2
    out = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] o = out
    for j in range(m):
        rho_j = rho[j]
        rho2 = z * z + rho_j * rho_j
        acc_re = 0.0
        acc_im = 0.0
        for i in range(n):
            if w[i] == 0.0:
                continue
            rr = r[i]
            R = sqrt(rho2 + rr * rr)
            a = az / (R * R) * w[i] * j0(k * rr * rho_j / R)
            ph = sgn * k * R
            c = cos(ph)
            s = sin(ph)
            kre = a * (c / R + sgn * k * s)
            kim = a * (s / R - sgn * k * c)
            acc_re += kre * u[i].real - kim * u[i].imag
            acc_im += kre * u[i].imag + kim * u[i].real
        o[j] = acc_re + 1j * acc_im
    return out


def rs_planar(const double[::1] x, const double[::1] y, const double[::1] w,
              const double complex[::1] u, const double[::1] X, const double[::1] Y,
              double z, double k):
    cdef Py_ssize_t n = x.shape[0], m = X.shape[0], i, j
    cdef double az = fabs(z), sgn = 1.0 if z > 0 else -1.0
    cdef double dx, dy, R, a, ph, c, s, kre, kim, acc_re, acc_im
    cdef double norm = 1.0 / (2.0 * M_PI)
    out = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] o = out
    for j in range(m):
        acc_re = 0.0
        acc_im = 0.0
        for i in range(n):
            dx = X[j] - x[i]
            dy = Y[j] - y[i]
            R = sqrt(dx * dx + dy * dy + z * z)
            a = az / (R * R) * w[i] * norm
            ph = sgn * k * R
            c = cos(ph)
            s = sin(ph)
            kre = a * (c / R + sgn * k * s)
            kim = a * (s / R - sgn * k * c)
            acc_re += kre * u[i].real - kim * u[i].imag
            acc_im += kre * u[i].imag + kim * u[i].real
        o[j] = acc_re + 1j * acc_im
    return out
