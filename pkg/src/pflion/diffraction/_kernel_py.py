"""NumPy reference implementation of the Rayleigh-Sommerfeld kernels.

Kernel for a propagation distance z (negative z back-propagates with the
conjugate kernel)::

    h(R) = |z|/R * (1/R - i s k) * exp(i s k R) / R,    s = sign(z)

The radial form integrates the azimuth analytically after linearizing R in
r*rho, which turns the azimuthal phase into J0(k r rho / R0).
"""
import numpy as np
from scipy.special import j0

_CHUNK = 1 << 21


def _kernel(R, z, k):
    s = 1.0 if z > 0 else -1.0
    return abs(z) / (R * R) * (1.0 / R - 1j * s * k) * np.exp(1j * s * k * R)


def rs_radial(r, w, u, rho, z, k):
    r = np.asarray(r, float)
    w = np.asarray(w, float)
    u = np.asarray(u, complex)
    rho = np.asarray(rho, float)
    keep = w != 0.0
    r, wu = r[keep], (w * u)[keep]
    out = np.empty(rho.size, complex)
    step = max(1, _CHUNK // max(r.size, 1))
    for j0_ in range(0, rho.size, step):
        rj = rho[j0_:j0_ + step, None]
        R = np.sqrt(z * z + rj * rj + r[None, :] ** 2)
        h = _kernel(R, z, k) * j0(k * r[None, :] * rj / R)
        out[j0_:j0_ + step] = h @ wu
    return out


def rs_planar(x, y, w, u, X, Y, z, k):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    wu = np.asarray(w, float) * np.asarray(u, complex) / (2.0 * np.pi)
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    out = np.empty(X.size, complex)
    step = max(1, _CHUNK // max(x.size, 1))
    for j in range(0, X.size, step):
        dx = X[j:j + step, None] - x[None, :]
        dy = Y[j:j + step, None] - y[None, :]
        R = np.sqrt(dx * dx + dy * dy + z * z)
        out[j:j + step] = _kernel(R, z, k) @ wu
    return out
