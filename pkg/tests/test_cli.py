import csv
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
import yaml

from pflion import cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
LENS = {"design_wavelength": 369.5e-9, "focal_length": 3e-3, "aperture_diameter": 5e-3,
        "phase_levels": 2}


def run(tmp_path, cfg, *flags, name="job.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump({"schema_version": 1, **cfg}))
    out = tmp_path / "out"
    return cli.main(["--config", str(path), "--out", str(out), *flags]), out


def read_report(path, value_col=1):
    with open(path) as fh:
        rows = list(csv.reader(ln for ln in fh if not ln.startswith("#")))
    return {r[0]: float(r[value_col]) for r in rows[1:]}


def read_columns(path):
    a = np.loadtxt(path, delimiter=",", comments="#", skiprows=2)
    return a.T


def test_design_report(tmp_path):
    code, out = run(tmp_path, {"mode": "design", "lens": LENS})
    assert code == 0
    rep = read_report(out / "design_report.csv")
    assert rep["numerical_aperture"] == pytest.approx(0.640, abs=5e-4)
    assert rep["solid_angle_fraction"] == pytest.approx(0.116, abs=5e-4)
    assert rep["groove_depth"] == pytest.approx(390e-9, abs=0.5e-9)
    assert rep["zone_count"] == 4899
    idx, radius = read_columns(out / "zones.csv")
    assert idx.size == 4899 and np.all(np.diff(radius) > 0)


def test_design_eight_levels(tmp_path):
    code, out = run(tmp_path, {"mode": "design", "lens": {**LENS, "phase_levels": 8}})
    assert code == 0
    assert read_report(out / "design_report.csv")["ideal_efficiency"] == pytest.approx(0.9496, abs=1e-4)


def test_missing_field_named(tmp_path, caplog):
    lens = {k: v for k, v in LENS.items() if k != "focal_length"}
    code, out = run(tmp_path, {"mode": "design", "lens": lens})
    assert code == 2
    assert "focal_length" in caplog.text
    assert not out.exists()


@pytest.mark.parametrize("cfg", [
    {"mode": "psf", "lens": LENS, "psf": {"defocus": []}},
    {"mode": "tolerance", "lens": LENS, "tolerance": {"defocus": []}},
    {"mode": "nonsense"},
    {"mode": "design", "lens": LENS, "extra": 1},
    {"mode": "spectrum", "spectrum": {"beta": -1.0, "saturation": 0.1, "detuning_hz": [0.0]}},
    {"mode": "fit", "fit": {"kind": "focus", "data": "missing.csv"}},
    {"mode": "psf", "lens": LENS, "psf": {"radial_step": 1e-6}},
])
def test_validation_errors_leave_no_output(tmp_path, cfg):
    code, out = run(tmp_path, cfg, "--fast")
    assert code == 2
    assert not out.exists()


def test_schema_version_required(tmp_path):
    path = tmp_path / "job.yaml"
    path.write_text("mode: design\n")
    assert cli.main(["--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_missing_config_file(tmp_path):
    assert cli.main(["--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path)]) == 2


def test_io_error_exit_code(tmp_path):
    blocker = tmp_path / "out"
    blocker.write_text("not a directory")
    path = tmp_path / "job.yaml"
    path.write_text(yaml.safe_dump({"schema_version": 1, "mode": "design", "lens": LENS}))
    assert cli.main(["--config", str(path), "--out", str(blocker / "sub")]) == 4


def test_nonconvergence_exit_code(tmp_path):
    data = tmp_path / "flat.csv"
    data.write_text("z,y\n" + "".join(f"{z},1.0\n" for z in range(-5, 6)))
    code, out = run(tmp_path, {"mode": "fit", "fit": {"kind": "focus", "data": str(data)}})
    assert code == 3
    assert not out.exists()


def test_psf_airy_at_na03(tmp_path):
    f = 3e-4
    d = 2 * f * math.tan(math.asin(0.3))
    lens = {"design_wavelength": 369.5e-9, "focal_length": f, "aperture_diameter": d}
    code, out = run(tmp_path, {"mode": "psf", "lens": lens,
                               "psf": {"ideal": True, "source_blur_fwhm": 0.0}})
    assert code == 0
    rep = read_report(out / "psf_metrics.csv")
    assert rep["waist_1e2_radius"] == pytest.approx(rep["airy_waist_1e2_radius"], rel=0.02)


@pytest.mark.xfail(strict=True, reason="convolution model gives 6.9 um for the fast lens; see notes")
def test_fast_defocus_doubling_example(tmp_path):
    code, out = run(tmp_path, {"mode": "tolerance", "lens": LENS, "tolerance": {
        "source_blur_fwhm": 3.7e-6, "defocus": {"start": -15e-6, "stop": 15e-6, "num": 31}}},
        "--fast")
    assert code == 0
    rep = read_report(out / "tolerance_report.csv")
    assert rep["defocus_doubling_range"] == pytest.approx(19.4e-6, rel=0.05)


def test_budget_report(tmp_path):
    code = cli.main(["--config", str(CONFIGS / "budget.yaml"), "--out", str(tmp_path)])
    assert code == 0
    rep = read_report(tmp_path / "budget_report.csv")
    assert rep["flux_at_lens"] == pytest.approx(3.5e5, rel=0.10)
    assert 0.039 <= rep["collection_efficiency"] <= 0.042
    assert rep["diffraction_efficiency"] == pytest.approx(0.35, abs=0.05)
    assert rep["contrast"] == 23
    assert 159 <= round(rep["projected_contrast"], 0) <= 160
    assert rep["projected_collection_efficiency"] == pytest.approx(0.224, abs=1e-12)


def test_spectrum_beta_zero_is_lorentzian(tmp_path):
    det = [-60e6, -10e6, 0.0, 5e6, 40e6]
    code, out = run(tmp_path, {"mode": "spectrum", "spectrum": {
        "beta": 0.0, "saturation": 0.3, "model": "both", "detuning_hz": det}})
    assert code == 0
    x, side, avg = read_columns(out / "spectrum.csv")
    g = 2 * math.pi * 19.6e6
    d = 2 * math.pi * np.array(det)
    ref = 0.5 * g * 0.3 / (1 + 0.3 + (2 * d / g) ** 2)
    np.testing.assert_allclose(side, ref, rtol=1e-10)
    np.testing.assert_allclose(avg, ref, rtol=1e-10)


def test_bundled_scalloped_fit(tmp_path):
    code = cli.main(["--config", str(CONFIGS / "fit_scalloped.yaml"), "--out", str(tmp_path)])
    assert code == 0
    rep = read_report(tmp_path / "fit_report.csv")
    assert abs(rep["beta"] - 7.6) <= 0.5
    mc = np.loadtxt(tmp_path / "fit_montecarlo.csv", delimiter=",", skiprows=2)
    assert mc.shape[0] == 20 and np.all(mc[:, 1] == 1)


def test_bundled_focus_fit(tmp_path):
    code = cli.main(["--config", str(CONFIGS / "fit_focus.yaml"), "--out", str(tmp_path)])
    assert code == 0
    rep = read_report(tmp_path / "fit_report.csv")
    # bundled scan generated with 2 w0 = 19.4 um
    assert abs(rep["depth_of_focus"] - 19.4e-6) <= 2.4e-6


def test_byte_identical_outputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["--config", str(CONFIGS / "fit_scalloped.yaml"), "--out", str(d),
                         "--seed", "5"]) == 0
    for f in sorted(a.iterdir()):
        assert f.read_bytes() == (b / f.name).read_bytes()
    # a different seed changes the Monte-Carlo table and the recorded hash
    c = tmp_path / "c"
    assert cli.main(["--config", str(CONFIGS / "fit_scalloped.yaml"), "--out", str(c),
                     "--seed", "6"]) == 0
    assert (a / "fit_montecarlo.csv").read_bytes() != (c / "fit_montecarlo.csv").read_bytes()


def test_header_comment_and_precision(tmp_path):
    code, out = run(tmp_path, {"mode": "design", "lens": LENS})
    first, header = (out / "design_report.csv").read_text().splitlines()[:2]
    assert first.startswith("# pflion ") and "config_sha256=" in first
    assert header == "name,value,unit"
    na = [ln for ln in (out / "design_report.csv").read_text().splitlines()
          if ln.startswith("numerical_aperture")][0].split(",")[1]
    assert len(na.replace(".", "").lstrip("0")) >= 9


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "pflion.cli", "--config", str(CONFIGS / "design.yaml"),
                        "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0
    assert "design_report.csv" in r.stdout
