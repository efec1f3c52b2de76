"""Levenberg-Marquardt least squares and the focus / micromotion fit models."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .fluorescence import MicromotionParams, Transition, spectrum_fwhm, spectrum_sideband

__all__ = [
    "DataSeries",
    "FitResult",
    "least_squares",
    "hyperbola",
    "linear",
    "MODELS",
    "fit_focus_hyperbola",
    "scalloped_model",
    "fit_scalloped",
    "fwhm_of_series",
]

_logger = logging.getLogger(__name__)

MAX_ITER = 500
PARAM_RTOL = 1e-10
COST_RTOL = 1e-12


@dataclass(frozen=True)
class DataSeries:
    x: np.ndarray
    y: np.ndarray
    y_sigma: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.asarray(self.x, float)
        y = np.asarray(self.y, float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("x and y must be 1-D arrays of equal length")
        if self.y_sigma is not None:
            s = np.asarray(self.y_sigma, float)
            if s.shape != y.shape:
                raise ValueError("y_sigma must match y in length")
            if np.any(s <= 0):
                raise ValueError("y_sigma entries must be > 0")
            object.__setattr__(self, "y_sigma", s)

    def __len__(self):
        return self.x.size


@dataclass
class FitResult:
    parameters: np.ndarray
    parameter_sigmas: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int
    message: str = ""
    covariance: Optional[np.ndarray] = None
    names: Sequence[str] = ()
    extras: dict = field(default_factory=dict)

    def as_dict(self):
        return {n: (float(v), float(s)) for n, v, s in
                zip(self.names, self.parameters, self.parameter_sigmas)}


def linear(x, p):
    return p[0] * x


def hyperbola(x, p):
    """y0 * sqrt(1 + ((x - x0)/w0)^2) with parameters (y0, w0, x0)."""
    y0, w0, x0 = p
    return y0 * np.sqrt(1.0 + ((x - x0) / w0) ** 2)


MODELS: dict[str, Callable] = {"linear": linear, "hyperbola": hyperbola}


def _jacobian(f, x, p, f0, weights, scale):
    """Forward differences d(model)/dp; the step rule acts on the scaled parameters p/scale."""
    J = np.empty((x.size, p.size))
    for j in range(p.size):
        h = max(1e-8, 1e-6 * abs(p[j] / scale[j])) * scale[j]
        q = p.copy()
        q[j] += h
        J[:, j] = (f(x, q) - f0) / (q[j] - p[j]) * weights
    return J


def _stationary(J, r, g, tol=1e-6):
    """Gradient orthogonal to the residual: cosine between J columns and r below tol."""
    denom = np.linalg.norm(J, axis=0) * np.linalg.norm(r)
    return bool(np.all(np.abs(g) <= tol * np.maximum(denom, 1e-300)))


def least_squares(model: Union[str, Callable], data: DataSeries, initial,
                  max_iter: int = MAX_ITER, names: Sequence[str] = ()) -> FitResult:
    """Minimize sum(((y - model(x, p)) / sigma)^2) with Levenberg-Marquardt.

    Parameters are scaled internally by the magnitude of the initial guess
    (1 where it is zero), so the Jacobian step and the additive damping
    (lambda * I) do not depend on units. Damping is raised x2 on a rejected
    step and cut x1/3 on an accepted one. Parameter sigmas come from the inverse normal matrix scaled
    by the reduced chi-square.
    """
    f = MODELS[model] if isinstance(model, str) else model
    p = np.array(initial, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError("initial parameters must be finite")
    n = p.size
    if len(data) < n + 1:
        raise ValueError(f"need at least {n + 1} points for {n} parameters")
    wts = 1.0 / data.y_sigma if data.y_sigma is not None else np.ones_like(data.y)
    # canonical point order, so results do not depend on how the data were listed
    order = np.lexsort((wts, data.y, data.x))
    x, y, wts = data.x[order], data.y[order], wts[order]
    y_norm = float(np.linalg.norm(y * wts))

    scale = np.where(p != 0, np.abs(p), 1.0)

    def resid(q):
        return (y - f(x, q)) * wts

    f0 = f(x, p)
    r = (y - f0) * wts
    if not np.all(np.isfinite(r)):
        raise ValueError("model is not finite at the initial parameters")
    cost = float(r @ r)
    J = _jacobian(f, x, p, f0, wts, scale) * scale
    A = J.T @ J
    g = J.T @ r
    lam = 1e-3 * max(float(np.max(np.diag(A))), 1e-300)
    converged = False
    message = "iteration limit reached"
    it = 0
    for it in range(1, max_iter + 1):
        try:
            step = np.linalg.solve(A + lam * np.eye(n), g)
        except np.linalg.LinAlgError:
            lam *= 2.0
            continue
        trial = p + step * scale
        r_new = resid(trial)
        cost_new = float(r_new @ r_new) if np.all(np.isfinite(r_new)) else math.inf
        if cost_new < cost:
            rel_p = float(np.max(np.abs(step * scale) / np.maximum(np.abs(trial), 1e-300)))
            rel_c = (cost - cost_new) / cost
            p, r, cost = trial, r_new, cost_new
            lam /= 3.0
            if cost == 0.0 or rel_p < PARAM_RTOL or rel_c < COST_RTOL:
                converged = True
                message = "converged"
                break
            f0 = f(x, p)
            J = _jacobian(f, x, p, f0, wts, scale) * scale
            A = J.T @ J
            g = J.T @ r
        else:
            lam *= 2.0
            if lam > 1e16 * max(float(np.max(np.diag(A))), 1e-300):
                converged = _stationary(J, r, g) or math.sqrt(cost) <= 1e-12 * y_norm
                message = "converged (no further descent)" if converged else "damping overflow"
                break

    f0 = f(x, p)
    J = _jacobian(f, x, p, f0, wts, scale)
    N = J.T @ J
    dof = max(len(data) - n, 1)
    cov = None
    sig = np.full(n, math.inf)
    # condition number of the column-equilibrated matrix, so units do not matter
    d = np.sqrt(np.diag(N))
    if np.all(np.isfinite(N)) and np.all(d > 0):
        cond = float(np.linalg.cond(N / np.outer(d, d)))
    else:
        cond = math.inf
    if not np.isfinite(cond) or cond > 1e14:
        converged = False
        message = f"singular normal matrix (cond={cond:.3g}); parameters degenerate"
    else:
        cov = np.linalg.inv(N) * (cost / dof)
        sig = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return FitResult(p, sig, math.sqrt(cost), converged, it, message, cov, tuple(names))


def fit_focus_hyperbola(data: DataSeries) -> FitResult:
    """Fit y(z) = y0 sqrt(1 + ((z - z0)/w0)^2); extras hold the depth of focus 2 w0."""
    names = ("y0", "w0", "z0")
    if len(data) < 4:
        raise ValueError("need at least 4 points")
    order = np.argsort(data.x, kind="stable")
    x, y = data.x[order], data.y[order]
    i = int(np.argmin(y))
    if np.ptp(y) == 0 or i == 0 or i == y.size - 1:
        return FitResult(np.full(3, np.nan), np.full(3, math.inf), math.inf, False, 0,
                         "data have no interior minimum", None, names)
    p0 = [y[i], 0.5 * (x[-1] - x[0]), x[i]]
    res = least_squares(hyperbola, data, p0, names=names)
    res.parameters[1] = abs(res.parameters[1])
    res.extras["depth_of_focus"] = (2 * res.parameters[1], 2 * res.parameter_sigmas[1])
    return res


def scalloped_model(gamma: float, omega: float) -> Callable:
    """amplitude * R(delta - delta0; beta, s) / (Gamma/2) + offset, params (beta, s, delta0, amplitude, offset)."""
    t = Transition(1.0, gamma)

    def f(x, p):
        beta, s, d0, amp, off = p
        mm = MicromotionParams(abs(beta), omega)
        return abs(amp) * spectrum_sideband(t, mm, abs(s), x - d0) / (0.5 * gamma) + off

    return f


def fit_scalloped(data: DataSeries, gamma: float, omega: float, initial=None) -> FitResult:
    """Fit the sideband line shape with Gamma and Omega fixed (same units as data.x)."""
    names = ("beta", "s", "delta0", "amplitude", "offset")
    f = scalloped_model(gamma, omega)
    if initial is None:
        x, y = data.x, data.y
        off = float(np.min(y))
        yy = y - off
        width = fwhm_of_series(DataSeries(x, yy))
        half = yy >= 0.5 * yy.max()
        center = 0.5 * (x[half][0] + x[half][-1])
        beta0 = width / (2 * omega)
        s0 = 1.0
        peak = float(np.max(f(np.linspace(-beta0 * omega - 2 * gamma, beta0 * omega + 2 * gamma, 801),
                              [beta0, s0, 0.0, 1.0, 0.0])))
        initial = [beta0, s0, center, yy.max() / peak, off]
    res = least_squares(f, data, initial, names=names)
    res.parameters[0] = abs(res.parameters[0])
    res.parameters[1] = abs(res.parameters[1])
    res.parameters[3] = abs(res.parameters[3])
    return res


def fwhm_of_series(data: DataSeries) -> float:
    """Width at half maximum of a peaked series, linearly interpolated."""
    order = np.argsort(data.x, kind="stable")
    x, y = data.x[order], data.y[order]
    i = int(np.argmax(y))
    if i == 0 or i == y.size - 1:
        raise ValueError("series has no interior maximum")
    return spectrum_fwhm(x, y)
