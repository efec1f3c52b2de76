"""Physical constants and default apparatus values (SI)."""
import math

from scipy.constants import c as SPEED_OF_LIGHT, h as PLANCK  # noqa: F401

YB_WAVELENGTH = 369.5e-9
YB_GAMMA = 2 * math.pi * 19.6e6
RF_OMEGA = 2 * math.pi * 20e6
