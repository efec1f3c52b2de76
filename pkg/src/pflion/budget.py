"""Photon budget from the ion to camera counts, forward and inverse.

Every quantity carries a 1-sigma uncertainty propagated to first order.
Rates are background-corrected and spot-integrated before they enter here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .constants import PLANCK, SPEED_OF_LIGHT
from .fluorescence import YB_TRANSITION, Transition
from .quantities import (DB, DIMENSIONLESS, POWER, RATE, Quantity, db_to_linear, exact, q_div,
                         q_mul, q_prod, q_sum)

__all__ = [
    "EfficiencyError",
    "DetectionChain",
    "CalibrationRun",
    "EmissionModel",
    "photon_rate_from_power",
    "total_attenuation",
    "infer_qe",
    "flux_at_lens",
    "emitted_rate",
    "collection_efficiency",
    "inferred_diffraction_efficiency",
    "forward_detected_rate",
    "projected_efficiency",
    "contrast_ratio",
    "projected_contrast",
    "reference_chain",
    "reference_calibration",
    "reference_emission",
    "reference_report",
    "REFERENCE_DETECTED_RATE",
    "REFERENCE_CONTRAST",
]


class EfficiencyError(ValueError):
    """An efficiency or transmission left [0, 1]."""


def _check_fraction(name: str, q: Quantity, allow_zero: bool = True):
    if q.dim != DIMENSIONLESS:
        raise EfficiencyError(f"{name} must be dimensionless, got {q.dim}")
    lo_ok = q.value >= 0 if allow_zero else q.value > 0
    if not (lo_ok and q.value <= 1.0):
        raise EfficiencyError(f"{name} = {q.value:g} outside [0, 1]")


@dataclass(frozen=True)
class DetectionChain:
    solid_angle_fraction: Quantity
    lens_diffraction_efficiency: Quantity
    window_transmission: Quantity
    filter_transmission: Quantity
    camera_qe: Quantity

    def __post_init__(self):
        for name in ("solid_angle_fraction", "lens_diffraction_efficiency",
                     "window_transmission", "filter_transmission", "camera_qe"):
            _check_fraction(name, getattr(self, name))

    def factors(self):
        return [self.solid_angle_fraction, self.lens_diffraction_efficiency,
                self.window_transmission, self.filter_transmission, self.camera_qe]


@dataclass(frozen=True)
class CalibrationRun:
    laser_power: Quantity
    wavelength: float
    attenuators_db: Sequence[Quantity] = field(default_factory=tuple)
    total_db_override: Optional[Quantity] = None
    measured_rate: Quantity = exact(0.0, RATE)

    def __post_init__(self):
        if self.laser_power.dim != POWER or self.laser_power.value <= 0:
            raise ValueError("laser power must be a positive power quantity")
        if self.measured_rate.dim != RATE or self.measured_rate.value < 0:
            raise ValueError("measured rate must be a non-negative rate")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        for q in list(self.attenuators_db) + ([self.total_db_override] if self.total_db_override else []):
            if q.dim != DB:
                raise ValueError("attenuations must be given in dB")


@dataclass(frozen=True)
class EmissionModel:
    transition: Transition = YB_TRANSITION
    motion_reduction: Quantity = Quantity(0.145, 0.015)
    saturated: bool = True

    def __post_init__(self):
        m = self.motion_reduction
        if m.dim != DIMENSIONLESS or not 0.0 <= m.value <= 1.0:
            raise ValueError("motion_reduction must be a dimensionless fraction in [0, 1]")


def photon_rate_from_power(power: Quantity, wavelength: float) -> Quantity:
    """Photons per second carried by `power` at `wavelength`: P lambda / (h c)."""
    if power.dim != POWER:
        raise ValueError(f"expected a power, got {power.dim}")
    if power.value < 0:
        raise ValueError("power must be >= 0")
    per_photon = PLANCK * SPEED_OF_LIGHT / wavelength
    return Quantity(power.value / per_photon, power.sigma / per_photon, RATE)


def total_attenuation(run: CalibrationRun) -> Quantity:
    """Override if given, else the quadrature sum of the attenuator stack."""
    if run.total_db_override is not None:
        return run.total_db_override
    if not run.attenuators_db:
        return exact(0.0, DB)
    return q_sum(run.attenuators_db)


def infer_qe(run: CalibrationRun) -> Quantity:
    """Detected counts per photon reaching the sensor during calibration."""
    incident = q_mul(photon_rate_from_power(run.laser_power, run.wavelength),
                     db_to_linear(total_attenuation(run)))
    if incident.value == 0:
        raise ZeroDivisionError("attenuated photon rate is zero")
    return q_div(run.measured_rate, incident)


def flux_at_lens(detected_rate: Quantity, chain: DetectionChain) -> Quantity:
    """Photon flux arriving at the lens, undoing QE, filter and window losses.

    The lens efficiency and solid angle stay out: the flux is referred to
    the lens itself.
    """
    losses = q_prod([chain.camera_qe, chain.filter_transmission, chain.window_transmission])
    if losses.value == 0:
        raise ZeroDivisionError("detection chain transmits nothing")
    return q_div(detected_rate, losses)


def emitted_rate(model: EmissionModel) -> Quantity:
    """Saturated emission into 4 pi: (Gamma/2) times the motion reduction."""
    if not model.saturated:
        raise ValueError("unsaturated emission needs an explicit drive; use fluorescence.scatter_rate")
    return q_mul(exact(0.5 * model.transition.gamma, RATE), model.motion_reduction)


def collection_efficiency(flux: Quantity, emitted: Quantity) -> Quantity:
    if emitted.value <= 0:
        raise ZeroDivisionError("emitted rate must be positive")
    eta = q_div(flux, emitted)
    if eta.value > 1:
        raise EfficiencyError(f"inferred collection efficiency {eta.value:g} exceeds 1")
    return eta


def inferred_diffraction_efficiency(collection: Quantity, solid_angle: Quantity) -> Quantity:
    if solid_angle.value <= 0:
        raise ZeroDivisionError("solid angle fraction must be positive")
    eta = q_div(collection, solid_angle)
    if eta.value > 1:
        raise EfficiencyError(f"inferred diffraction efficiency {eta.value:g} exceeds 1")
    return eta


def forward_detected_rate(model: EmissionModel, chain: DetectionChain) -> Quantity:
    return q_prod([emitted_rate(model)] + chain.factors())


def projected_efficiency(solid_angle: Quantity, diffraction_eff: Quantity) -> Quantity:
    _check_fraction("solid_angle", solid_angle)
    _check_fraction("diffraction_eff", diffraction_eff)
    return q_mul(solid_angle, diffraction_eff)


def contrast_ratio(signal: Quantity, background: Quantity) -> Quantity:
    if background.value <= 0:
        raise ZeroDivisionError("background rate must be positive")
    return q_div(signal, background)


def projected_contrast(contrast: Quantity, motion_reduction: Quantity) -> Quantity:
    """Contrast once the ion signal returns to its at-rest rate, background unchanged."""
    return q_div(contrast, motion_reduction)


# reference apparatus --------------------------------------------------------

def reference_chain() -> DetectionChain:
    return DetectionChain(
        solid_angle_fraction=exact(0.12),
        lens_diffraction_efficiency=Quantity(0.35, 0.13),
        window_transmission=exact(0.92),
        filter_transmission=Quantity(0.25, 0.05),
        camera_qe=Quantity(0.28, 0.06),
    )


def reference_calibration() -> CalibrationRun:
    return CalibrationRun(
        laser_power=Quantity(30e-6, 1e-6, POWER),
        wavelength=369.5e-9,
        attenuators_db=tuple(Quantity(v, 0.1, DB) for v in (3.2, 43.2, 27.7, 12.6)),
        total_db_override=Quantity(87.0, 1.0, DB),
        measured_rate=Quantity(33.0e3, 0.3e3, RATE),
    )


def reference_emission() -> EmissionModel:
    return EmissionModel(YB_TRANSITION, Quantity(0.145, 0.015), True)


REFERENCE_DETECTED_RATE = Quantity(22.6e3, 0.3e3, RATE)
REFERENCE_CONTRAST = Quantity(23.0, 4.0)


def reference_report(chain: DetectionChain | None = None, run: CalibrationRun | None = None,
                 emission: EmissionModel | None = None,
                 detected: Quantity = REFERENCE_DETECTED_RATE,
                 contrast: Quantity = REFERENCE_CONTRAST,
                 projected_solid_angle: Quantity = exact(0.28),
                 projected_diffraction: Quantity = exact(0.80),
                 use_inferred_qe: bool = False) -> dict[str, Quantity]:
    """The full calibration and budget chain as an ordered name -> Quantity map.

    The QE inferred from `run` is always reported; it replaces the chain's
    camera QE only with ``use_inferred_qe``.
    """
    chain = chain or reference_chain()
    run = run or reference_calibration()
    emission = emission or reference_emission()
    out: dict[str, Quantity] = {}
    out["total_attenuation_db"] = total_attenuation(run)
    out["stack_attenuation_db"] = q_sum(run.attenuators_db) if run.attenuators_db else exact(0.0, DB)
    out["calibration_photon_rate"] = photon_rate_from_power(run.laser_power, run.wavelength)
    qe = infer_qe(run)
    out["inferred_qe"] = qe
    if use_inferred_qe:
        chain = DetectionChain(chain.solid_angle_fraction, chain.lens_diffraction_efficiency,
                               chain.window_transmission, chain.filter_transmission, qe)
    out["chain_qe"] = chain.camera_qe
    chain_qe = chain
    gamma_half = exact(0.5 * emission.transition.gamma, RATE)
    out["rest_scatter_rate"] = gamma_half
    out["saturated_flux_at_lens_rest"] = q_mul(gamma_half, chain.solid_angle_fraction)
    flux = flux_at_lens(detected, chain_qe)
    out["flux_at_lens"] = flux
    emitted = emitted_rate(emission)
    out["emitted_rate"] = emitted
    coll = collection_efficiency(flux, emitted)
    out["collection_efficiency"] = coll
    out["diffraction_efficiency"] = inferred_diffraction_efficiency(coll, chain.solid_angle_fraction)
    out["forward_detected_rate"] = forward_detected_rate(emission, chain_qe)
    out["detected_rate"] = detected
    out["contrast"] = contrast
    out["projected_contrast"] = projected_contrast(contrast, emission.motion_reduction)
    out["projected_collection_efficiency"] = projected_efficiency(projected_solid_angle,
                                                                  projected_diffraction)
    return out
