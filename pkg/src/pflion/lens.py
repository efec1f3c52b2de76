"""Phase Fresnel lens geometry and scalar efficiency estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Material",
    "FUSED_SILICA",
    "LensPrescription",
    "ZoneSet",
    "sellmeier_index",
    "groove_depth",
    "zone_radii",
    "numerical_aperture",
    "solid_angle_fraction",
    "ideal_multilevel_efficiency",
    "binary_efficiency_vs_phase",
    "reference_prescription",
    "fast_prescription",
    "FAST_SCALE",
    "MATERIALS",
    "zone_count",
]

SELLMEIER_BAND = (0.2e-6, 2.0e-6)


@dataclass(frozen=True)
class Material:
    """Three-term Sellmeier dispersion model; ``C`` terms in um^2."""

    name: str
    sellmeier_coefficients: tuple[tuple[float, float], ...]

    def index(self, wavelength: float) -> float:
        return sellmeier_index(self, wavelength)


# Malitson (1965) fused silica
FUSED_SILICA = Material(
    "fused_silica",
    ((0.6961663, 0.0684043**2), (0.4079426, 0.1162414**2), (0.8974794, 9.896161**2)),
)

MATERIALS = {FUSED_SILICA.name: FUSED_SILICA}


@dataclass(frozen=True)
class LensPrescription:
    design_wavelength: float
    focal_length: float
    aperture_diameter: float
    phase_levels: int = 2
    substrate: Material = field(default=FUSED_SILICA)

    def __post_init__(self):
        for name in ("design_wavelength", "focal_length", "aperture_diameter"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive length, got {v!r}")
        if int(self.phase_levels) != self.phase_levels or self.phase_levels < 2:
            raise ValueError(f"phase_levels must be an integer >= 2, got {self.phase_levels!r}")

    @property
    def aperture_radius(self) -> float:
        return 0.5 * self.aperture_diameter

    def scaled(self, factor: float) -> "LensPrescription":
        """Same NA and wavelength with focal length and aperture scaled by `factor`."""
        return LensPrescription(
            self.design_wavelength,
            self.focal_length * factor,
            self.aperture_diameter * factor,
            self.phase_levels,
            self.substrate,
        )


@dataclass(frozen=True)
class ZoneSet:
    radii: np.ndarray

    def __len__(self):
        return len(self.radii)

    @property
    def outer_zone_width(self) -> float:
        r = np.concatenate(([0.0], self.radii))
        return float(r[-1] - r[-2])


FAST_SCALE = 0.1


def fast_prescription(p: LensPrescription, factor: float = FAST_SCALE) -> LensPrescription:
    """Reduced-aperture stand-in for CI: same NA and wavelength, f and D scaled."""
    return p.scaled(factor)


def reference_prescription() -> LensPrescription:
    """The binary fused-silica lens: 369.5 nm, f = 3 mm, 5 mm aperture."""
    return LensPrescription(369.5e-9, 3e-3, 5e-3, 2, FUSED_SILICA)


def sellmeier_index(material: Material, wavelength: float) -> float:
    lo, hi = SELLMEIER_BAND
    if not lo <= wavelength <= hi:
        raise ValueError(
            f"wavelength {wavelength:g} m outside supported band [{lo:g}, {hi:g}] m"
        )
    lam2 = (wavelength * 1e6) ** 2
    n2 = 1.0 + sum(B * lam2 / (lam2 - C) for B, C in material.sellmeier_coefficients)
    return math.sqrt(n2)


def groove_depth(wavelength: float, index: float) -> float:
    """Etch depth giving a pi phase step: lambda / (2 (n - 1))."""
    if index <= 1.0:
        raise ValueError(f"refractive index must exceed 1, got {index}")
    return wavelength / (2.0 * (index - 1.0))


def zone_count(p: LensPrescription) -> int:
    f, R = p.focal_length, p.aperture_radius
    half = p.design_wavelength / 2.0
    return int(math.floor((math.hypot(f, R) - f) / half))


def zone_radii(p: LensPrescription) -> ZoneSet:
    """Exact point-source zone boundaries r_k = sqrt((f + k lambda/2)^2 - f^2).

    Boundaries are returned for k = 1..K with r_K <= D/2 < r_{K+1}.
    """
    f = p.focal_length
    half = p.design_wavelength / 2.0
    k = np.arange(1, zone_count(p) + 1, dtype=float)
    # (f + kh)^2 - f^2 written to avoid cancellation
    radii = np.sqrt(k * half * (2.0 * f + k * half))
    return ZoneSet(radii)


def numerical_aperture(p: LensPrescription) -> float:
    return math.sin(math.atan2(p.aperture_radius, p.focal_length))


def solid_angle_fraction(na: float) -> float:
    """Fraction of 4 pi collected by a cone with numerical aperture `na`."""
    if not 0.0 <= na <= 1.0:
        raise ValueError(f"numerical aperture must lie in [0, 1], got {na}")
    return (1.0 - math.sqrt(1.0 - na * na)) / 2.0


def ideal_multilevel_efficiency(levels: int) -> float:
    """First-order scalar efficiency [sin(pi/L)/(pi/L)]^2 of an L-level lens."""
    if int(levels) != levels or levels < 2:
        raise ValueError(f"levels must be an integer >= 2, got {levels!r}")
    x = math.pi / levels
    return (math.sin(x) / x) ** 2


def binary_efficiency_vs_phase(phase: float) -> float:
    """First-order efficiency of a 50% duty binary grating with phase step `phase`."""
    if not 0.0 <= phase <= 2.0 * math.pi:
        raise ValueError(f"phase must lie in [0, 2 pi], got {phase}")
    return 4.0 / math.pi**2 * math.sin(phase / 2.0) ** 2
