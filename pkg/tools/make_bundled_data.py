"""Regenerate the synthetic data files shipped in src/pflion/data."""
from pathlib import Path

import numpy as np

from pflion.fitting import hyperbola, scalloped_model

OUT = Path(__file__).resolve().parents[1] / "src" / "pflion" / "data"
SEED = 7


def main():
    rng = np.random.default_rng(SEED)

    # micromotion spectrum: beta = 7.6, s = 0.5, 20 MHz drive, 19.6 MHz line
    d = np.linspace(-300e6, 300e6, 121)
    y = scalloped_model(19.6e6, 20e6)(d, [7.6, 0.5, 0.0, 1000.0, 50.0])
    sig = np.full(d.size, 0.02 * y.max())
    y = y + sig * rng.standard_normal(d.size)
    np.savetxt(OUT / "scalloped_beta7p6.csv", np.column_stack([d, y, sig]), fmt="%.12g",
               delimiter=",", header="detuning_Hz,rate_per_s,sigma", comments="")

    # focus scan: y0 = 3.7 um, w0 = 9.7 um, pixel-quantization errors of 0.2 um
    z = np.linspace(-30e-6, 30e-6, 21)
    y = hyperbola(z, [3.7e-6, 9.7e-6, 0.0])
    sig = np.full(z.size, 0.2e-6)
    y = y + sig * rng.standard_normal(z.size)
    np.savetxt(OUT / "focus_scan.csv", np.column_stack([z, y, sig]), fmt="%.12g",
               delimiter=",", header="z_m,fwhm_m,sigma_m", comments="")


if __name__ == "__main__":
    main()
