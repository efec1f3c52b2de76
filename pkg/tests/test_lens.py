import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pflion.lens import (FUSED_SILICA, LensPrescription, binary_efficiency_vs_phase, groove_depth,
                         ideal_multilevel_efficiency, numerical_aperture, reference_prescription,
                         sellmeier_index, solid_angle_fraction, zone_count, zone_radii)

LAM = 369.5e-9


def test_sellmeier():
    assert sellmeier_index(FUSED_SILICA, 369.5e-9) == pytest.approx(1.4736, abs=5e-4)
    assert sellmeier_index(FUSED_SILICA, 587.6e-9) == pytest.approx(1.4585, abs=5e-4)
    assert sellmeier_index(FUSED_SILICA, 400e-9) == sellmeier_index(FUSED_SILICA, 400e-9)
    with pytest.raises(ValueError):
        sellmeier_index(FUSED_SILICA, 3e-6)


def test_groove_depth():
    assert groove_depth(369.5e-9, 1.4736) == pytest.approx(390.1e-9, abs=0.2e-9)
    assert groove_depth(LAM, 1.5) == pytest.approx(LAM, rel=1e-15)
    assert groove_depth(LAM, 2.0) == pytest.approx(LAM / 2, rel=1e-15)
    n = sellmeier_index(FUSED_SILICA, LAM)
    assert groove_depth(LAM, n) == pytest.approx(390e-9, abs=3e-9)
    with pytest.raises(ValueError):
        groove_depth(LAM, 1.0)


@given(st.floats(1.01, 4.0))
def test_groove_identity(n):
    assert groove_depth(LAM, n) * 2 * (n - 1) == pytest.approx(LAM, rel=1e-15)


def test_zone_radii_reference():
    p = reference_prescription()
    z = zone_radii(p)
    assert z.radii[0] == pytest.approx(33.3e-6, abs=0.05e-6)
    assert len(z) == 4899 == zone_count(p)
    assert z.radii[-1] <= p.aperture_radius
    f, h = p.focal_length, LAM / 2
    assert math.sqrt((f + 4900 * h) ** 2 - f**2) > p.aperture_radius
    r = np.concatenate(([0.0], z.radii))
    assert np.all(np.diff(r) > 0)
    # exact (non-paraxial) zone areas grow slowly toward the rim: h(2f + (2k+1)h)
    areas = np.diff(r**2)
    assert np.all(np.diff(areas) > 0)
    assert areas[-1] / areas[0] - 1 < 2 * 4899 * h / (2 * f)
    # k = 0 boundary
    assert math.sqrt((f + 0 * h) ** 2 - f**2) == 0.0


def test_numerical_aperture():
    assert numerical_aperture(reference_prescription()) == pytest.approx(0.640, abs=5e-4)
    assert numerical_aperture(LensPrescription(LAM, 3e-3, 6e-3)) == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert numerical_aperture(LensPrescription(LAM, 3e-3, 1e-12)) == pytest.approx(0, abs=1e-9)


@given(st.floats(1e-4, 1e-2), st.floats(1e-4, 1e-2), st.floats(1.01, 2))
def test_na_monotone(f, d, k):
    base = numerical_aperture(LensPrescription(LAM, f, d))
    assert numerical_aperture(LensPrescription(LAM, f, d * k)) > base
    assert numerical_aperture(LensPrescription(LAM, f * k, d)) < base


def test_solid_angle():
    assert solid_angle_fraction(0.64) == pytest.approx(0.116, abs=5e-4)
    assert solid_angle_fraction(0.9) == pytest.approx(0.282, abs=5e-4)
    assert solid_angle_fraction(1.0) == 0.5
    assert solid_angle_fraction(0.0) == 0.0
    for bad in (-0.1, 1.1):
        with pytest.raises(ValueError):
            solid_angle_fraction(bad)
    x = np.linspace(0, 1, 101)
    assert np.all(np.diff([solid_angle_fraction(v) for v in x]) > 0)


def test_efficiencies():
    assert ideal_multilevel_efficiency(2) == pytest.approx(4 / math.pi**2, rel=1e-15)
    assert ideal_multilevel_efficiency(2) == pytest.approx(0.4053, abs=5e-5)
    assert ideal_multilevel_efficiency(8) == pytest.approx(0.9496, abs=5e-5)
    e = [ideal_multilevel_efficiency(L) for L in range(2, 200)]
    assert np.all(np.diff(e) > 0) and e[-1] < 1 and e[-1] > 0.9999
    with pytest.raises(ValueError):
        ideal_multilevel_efficiency(1)
    assert binary_efficiency_vs_phase(math.pi) == pytest.approx(0.4053, abs=5e-5)
    assert binary_efficiency_vs_phase(0) == 0
    assert binary_efficiency_vs_phase(math.pi / 2) == pytest.approx(0.2026, abs=5e-5)
    with pytest.raises(ValueError):
        binary_efficiency_vs_phase(7.0)


@pytest.mark.parametrize("kw", [dict(focal_length=0), dict(aperture_diameter=-1),
                                dict(design_wavelength=float("nan")), dict(phase_levels=1)])
def test_prescription_validation(kw):
    args = dict(design_wavelength=LAM, focal_length=3e-3, aperture_diameter=5e-3, phase_levels=2)
    args.update(kw)
    with pytest.raises(ValueError):
        LensPrescription(**args)
