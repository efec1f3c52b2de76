"""Two-level scattering rates with RF micromotion broadening.

Angular frequencies (rad/s) throughout. Two line-shape models are provided:

* ``spectrum_sideband`` -- a sum of Lorentzians at the micromotion sidebands
  n*Omega, weighted by J_n(beta)^2, each saturating independently;
* ``spectrum_phase_averaged`` -- the quasi-static limit, averaging the
  Doppler-shifted Lorentzian over the RF phase.

At Omega ~ Gamma neither limit is exact; the spread between them is a model
uncertainty.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import PLANCK, RF_OMEGA, SPEED_OF_LIGHT, YB_GAMMA, YB_WAVELENGTH

__all__ = [
    "Transition",
    "Drive",
    "MicromotionParams",
    "YB_TRANSITION",
    "REFERENCE_MICROMOTION",
    "scatter_rate",
    "saturation_intensity",
    "bessel_weights",
    "spectrum_sideband",
    "spectrum_phase_averaged",
    "spectrum_fwhm",
    "peak_rate_ratio",
    "saturation_scale",
]

BESSEL_TOL = 1e-9


@dataclass(frozen=True)
class Transition:
    wavelength: float
    gamma: float

    def __post_init__(self):
        if not (self.wavelength > 0 and self.gamma > 0):
            raise ValueError("wavelength and linewidth must be positive")


@dataclass(frozen=True)
class Drive:
    detuning: float
    saturation: float

    def __post_init__(self):
        if not self.saturation >= 0:
            raise ValueError("saturation parameter must be >= 0")


@dataclass(frozen=True)
class MicromotionParams:
    beta: float
    rf_omega: float = RF_OMEGA

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValueError("modulation index beta must be >= 0")
        if not self.rf_omega > 0:
            raise ValueError("RF angular frequency must be positive")


YB_TRANSITION = Transition(YB_WAVELENGTH, YB_GAMMA)
REFERENCE_MICROMOTION = MicromotionParams(7.6, RF_OMEGA)


def _lorentz_rate(gamma, s, detuning):
    return 0.5 * gamma * s / (1.0 + s + (2.0 * detuning / gamma) ** 2)


def scatter_rate(t: Transition, d: Drive):
    """Photon scattering rate (Gamma/2) s / (1 + s + (2 delta/Gamma)^2)."""
    return _lorentz_rate(t.gamma, d.saturation, np.asarray(d.detuning, float))


def saturation_intensity(t: Transition) -> float:
    """pi h c Gamma / (3 lambda^3), returned in mW/cm^2."""
    i_si = math.pi * PLANCK * SPEED_OF_LIGHT * t.gamma / (3.0 * t.wavelength**3)
    return i_si * 0.1


def bessel_weights(beta: float, tol: float = BESSEL_TOL):
    """Orders n = -N..N and J_n(beta)^2, truncated once the kept weight >= 1 - tol.

    Uses Miller's downward recurrence normalized with
    J_0 + 2 sum J_2k = 1, which stays stable well past beta = 100.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if beta == 0.0:
        return np.zeros(1, dtype=int), np.ones(1)
    start = int(beta + 30 + 10 * math.sqrt(beta))
    start += start % 2
    J = np.zeros(start + 2)
    J[start] = 1e-300
    for n in range(start, 0, -1):
        J[n - 1] = 2.0 * n / beta * J[n] - J[n + 1]
        if abs(J[n - 1]) > 1e250:
            J[n - 1:] *= 1e-250
    norm = J[0] + 2.0 * J[2::2].sum()
    J /= norm
    w = J**2
    # J_{-n}^2 = J_n^2
    total = w[0]
    N = 0
    while total < 1.0 - tol and N < start:
        N += 1
        total += 2.0 * w[N]
    orders = np.arange(-N, N + 1)
    return orders, w[np.abs(orders)]


def spectrum_sideband(t: Transition, mm: MicromotionParams, s: float, detunings):
    """Resolved-sideband line shape: Gamma/2 * sum_n J_n^2 s / (1 + s + (2(delta - n Omega)/Gamma)^2)."""
    if s < 0:
        raise ValueError("saturation parameter must be >= 0")
    d = np.asarray(detunings, float)
    n, w = bessel_weights(mm.beta)
    shifted = d[..., None] - n * mm.rf_omega
    return np.sum(w * _lorentz_rate(t.gamma, s, shifted), axis=-1)


def spectrum_phase_averaged(t: Transition, mm: MicromotionParams, s: float, detunings,
                            n_phase: int = 512):
    """RF-phase average of the Doppler-shifted two-level rate (periodic midpoint rule)."""
    if s < 0:
        raise ValueError("saturation parameter must be >= 0")
    if n_phase < 256:
        raise ValueError("use at least 256 phase samples")
    d = np.asarray(detunings, float)
    phi = (np.arange(n_phase) + 0.5) * (2 * math.pi / n_phase)
    shift = mm.beta * mm.rf_omega * np.cos(phi)
    return np.mean(_lorentz_rate(t.gamma, s, d[..., None] - shift), axis=-1)


def spectrum_fwhm(detunings, rates) -> float:
    """Full width at half of the global maximum, crossings linearly interpolated."""
    x = np.asarray(detunings, float)
    y = np.asarray(rates, float)
    half = 0.5 * y.max()
    above = y >= half
    if above[0] or above[-1]:
        raise ValueError("no half-maximum crossing inside the detuning range")
    # outermost crossings, so separate sideband lobes above half maximum count
    idx = np.nonzero(above)[0]
    lo, hi = idx[0], idx[-1]
    left = x[lo - 1] + (half - y[lo - 1]) * (x[lo] - x[lo - 1]) / (y[lo] - y[lo - 1])
    right = x[hi] + (half - y[hi]) * (x[hi + 1] - x[hi]) / (y[hi + 1] - y[hi])
    return float(right - left)


def _detuning_grid(t: Transition, mm: MicromotionParams, s: float, step_frac=0.02):
    """Grid over |delta| <= beta Omega + 2 Gamma, where the global peak must lie."""
    half_span = mm.beta * mm.rf_omega + 2 * t.gamma
    step = step_frac * min(t.gamma, mm.rf_omega)
    n = int(math.ceil(half_span / step))
    return np.arange(-n, n + 1) * step


def _peak(f, t, mm, s):
    """Global maximum over detuning: dense scan, then bounded 1-D refinement."""
    from scipy.optimize import minimize_scalar

    grid = _detuning_grid(t, mm, s)
    r = f(t, mm, s, grid)
    i = int(np.argmax(r))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda d: -float(f(t, mm, s, d)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-9 * t.gamma})
    return max(float(r[i]), -float(res.fun))


def peak_rate_ratio(t: Transition, mm: MicromotionParams, s: float, model: str = "sideband") -> float:
    """Peak micromotion-broadened rate over the on-resonance rate of an ion at rest."""
    if s < 0:
        raise ValueError("saturation parameter must be >= 0")
    if s == 0:
        s = 1e-12
    f = _model(model)
    rest = _lorentz_rate(t.gamma, s, 0.0)
    if mm.beta == 0:
        return 1.0
    return _peak(f, t, mm, s) / rest


def _model(name):
    try:
        return {"sideband": spectrum_sideband, "phase_averaged": spectrum_phase_averaged}[name]
    except KeyError:
        raise ValueError(f"unknown line-shape model {name!r}") from None


class ConvergenceError(RuntimeError):
    pass


def saturation_scale(t: Transition, mm: MicromotionParams, model: str = "sideband",
                     s_bounds=(1e-3, 1e6), rtol: float = 1e-6) -> float:
    """Ratio of the saturation parameters that bring the peak rate to Gamma/4.

    The large-s asymptote of the peak rate is Gamma/2 for both the ion at rest
    and the micromotion models, so the at-rest reference is s = 1. The
    micromotion value is found by bisection in log(s).
    """
    if mm.beta == 0:
        return 1.0
    f = _model(model)
    target = 0.25 * t.gamma

    def g(s):
        return _peak(f, t, mm, s) - target

    lo, hi = math.log(s_bounds[0]), math.log(s_bounds[1])
    if g(math.exp(lo)) > 0 or g(math.exp(hi)) < 0:
        raise ConvergenceError("half-saturation point not bracketed by the s bounds")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(math.exp(mid)) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < rtol:
            return math.exp(0.5 * (lo + hi))
    raise ConvergenceError("bisection did not converge")
