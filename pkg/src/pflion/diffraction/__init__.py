"""Scalar Rayleigh-Sommerfeld diffraction for axisymmetric and tilted fields."""
from ._backend import BACKEND
from .fields import (LensQuadrature, RadialComplexField, UnderResolvedGrid, gaussian_field,
                     lens_quadrature, lens_transmittance, propagate, propagate_to, radial_weights)
from .psf import (DoublingRange, PSFMetrics, SpotCurve, airy_radius, double_area_range, focal_psf,
                  profile_width, spot_vs_defocus, spot_vs_field_offset)

__all__ = [
    "BACKEND",
    "LensQuadrature",
    "RadialComplexField",
    "UnderResolvedGrid",
    "gaussian_field",
    "lens_quadrature",
    "lens_transmittance",
    "propagate",
    "propagate_to",
    "radial_weights",
    "DoublingRange",
    "PSFMetrics",
    "SpotCurve",
    "airy_radius",
    "double_area_range",
    "focal_psf",
    "profile_width",
    "spot_vs_defocus",
    "spot_vs_field_offset",
]
