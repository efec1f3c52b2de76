"""Command-line front end: ``pflion --config job.yaml --out results/``.

A job is a YAML mapping with ``schema_version: 1``, a ``mode`` and the
section of that mode (``lens`` is shared by design, psf and tolerance).
The whole config is validated before any computation, and outputs are only
written once every table has been computed.

Exit codes: 0 success, 2 config or validation error, 3 numerical failure,
4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml

from . import __version__
from . import budget as bud
from . import fluorescence as fl
from .diffraction import (UnderResolvedGrid, double_area_range, focal_psf, lens_transmittance,
                          spot_vs_defocus, spot_vs_field_offset)
from .diffraction.psf import MEASURED_WAIST_1E2_RADIUS, airy_waist
from .fitting import (DataSeries, FitResult, fit_focus_hyperbola, fit_scalloped, hyperbola,
                      scalloped_model)
from .io import CsvTable, config_hash, read_series, write_tables
from .lens import (MATERIALS, LensPrescription, fast_prescription, groove_depth,
                   ideal_multilevel_efficiency, numerical_aperture,
                   sellmeier_index, solid_angle_fraction, zone_radii)
from .quantities import DB, DIMENSIONLESS, POWER, RATE, Quantity

__all__ = ["main", "ConfigError", "NumericalError", "load_config", "run_job", "MODES"]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
# beyond this the full-aperture off-axis integral is hours long
MAX_FOV_APERTURE_RADIUS = 0.5e-3

_log = logging.getLogger("pflion")


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads YAML 1.2 floats such as 1e-3 and 19.6e6."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                |[-+]?\.(?:inf|Inf|INF)
                |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))


class ConfigError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


# validation helpers -----------------------------------------------------------

def _section(cfg: dict, name: str, required: bool = True) -> dict:
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing section '{name}'")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    return sec


def _number(sec: dict, key: str, where: str, default: Any = ..., positive: bool = False,
            nonneg: bool = False) -> float:
    if key not in sec or sec[key] is None:
        if default is ...:
            raise ConfigError(f"missing field '{where}.{key}'")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"field '{where}.{key}' must be a finite number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"field '{where}.{key}' must be > 0, got {v!r}")
    if nonneg and v < 0:
        raise ConfigError(f"field '{where}.{key}' must be >= 0, got {v!r}")
    return float(v)


def _integer(sec: dict, key: str, where: str, default: Any = ..., minimum: int = 1) -> int:
    v = sec.get(key, default)
    if v is ...:
        raise ConfigError(f"missing field '{where}.{key}'")
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"field '{where}.{key}' must be an integer >= {minimum}, got {v!r}")
    return v


def _flag(sec: dict, key: str, where: str, default: bool = False) -> bool:
    v = sec.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(f"field '{where}.{key}' must be true or false, got {v!r}")
    return v


def _choice(sec: dict, key: str, where: str, options, default: Any = ...) -> str:
    v = sec.get(key, default)
    if v is ...:
        raise ConfigError(f"missing field '{where}.{key}'")
    if v not in options:
        raise ConfigError(f"field '{where}.{key}' must be one of {sorted(options)}, got {v!r}")
    return v


def _number_list(sec: dict, key: str, where: str, required: bool = True):
    if key not in sec:
        if required:
            raise ConfigError(f"missing field '{where}.{key}'")
        return None
    v = sec[key]
    if isinstance(v, dict):
        start = _number(v, "start", f"{where}.{key}")
        stop = _number(v, "stop", f"{where}.{key}")
        num = _integer(v, "num", f"{where}.{key}", minimum=2)
        arr = np.linspace(start, stop, num)
    elif isinstance(v, list):
        if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
            raise ConfigError(f"field '{where}.{key}' must be a list of numbers")
        arr = np.asarray(v, float)
    else:
        raise ConfigError(f"field '{where}.{key}' must be a list or a {{start, stop, num}} range")
    if arr.size == 0:
        raise ConfigError(f"field '{where}.{key}' is empty")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"field '{where}.{key}' has non-finite entries")
    return arr


def _quantity(sec: dict, key: str, where: str, default: Quantity, dim=DIMENSIONLESS) -> Quantity:
    """A value as a number (exact) or [value, sigma]."""
    if key not in sec:
        return default
    v = sec[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        v = [v, 0.0]
    if (not isinstance(v, list) or len(v) != 2
            or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v)):
        raise ConfigError(f"field '{where}.{key}' must be a number or [value, sigma]")
    if v[1] < 0:
        raise ConfigError(f"field '{where}.{key}' has a negative sigma")
    return Quantity(float(v[0]), float(v[1]), dim)


def _check_keys(sec: dict, where: str, allowed):
    extra = sorted(set(sec) - set(allowed))
    if extra:
        raise ConfigError(f"unknown field(s) in '{where}': {', '.join(map(str, extra))}")


# job plans: validate into a closure that computes the tables -------------------

LENS_KEYS = ("design_wavelength", "focal_length", "aperture_diameter", "phase_levels", "substrate")


def _lens(cfg: dict) -> LensPrescription:
    sec = _section(cfg, "lens")
    _check_keys(sec, "lens", LENS_KEYS)
    wl = _number(sec, "design_wavelength", "lens", positive=True)
    f = _number(sec, "focal_length", "lens", positive=True)
    d = _number(sec, "aperture_diameter", "lens", positive=True)
    levels = _integer(sec, "phase_levels", "lens", default=2, minimum=2)
    sub = _choice(sec, "substrate", "lens", MATERIALS, default="fused_silica")
    return LensPrescription(wl, f, d, levels, MATERIALS[sub])


def _plan_design(cfg, ctx) -> Callable[[], list[CsvTable]]:
    p = _lens(cfg)

    def run():
        n = sellmeier_index(p.substrate, p.design_wavelength)
        zones = zone_radii(p)
        na = numerical_aperture(p)
        report = CsvTable("design_report.csv", ("name", "value", "unit"))
        report.add("design_wavelength", p.design_wavelength, "m")
        report.add("focal_length", p.focal_length, "m")
        report.add("aperture_diameter", p.aperture_diameter, "m")
        report.add("phase_levels", p.phase_levels, "1")
        report.add("refractive_index", n, "1")
        report.add("groove_depth", groove_depth(p.design_wavelength, n), "m")
        report.add("numerical_aperture", na, "1")
        report.add("solid_angle_fraction", solid_angle_fraction(na), "1")
        report.add("zone_count", len(zones), "1")
        if len(zones):
            report.add("first_zone_radius", zones.radii[0], "m")
            report.add("outer_zone_width", zones.outer_zone_width, "m")
        report.add("ideal_efficiency", ideal_multilevel_efficiency(p.phase_levels), "1")
        table = CsvTable.from_columns("zones.csv", ("index", "radius_m"),
                                      (np.arange(1, len(zones) + 1), zones.radii))
        return [report, table]

    return run


def _sim_lens(cfg, ctx) -> LensPrescription:
    p = _lens(cfg)
    return fast_prescription(p) if ctx["fast"] else p


def _plan_psf(cfg, ctx):
    p = _sim_lens(cfg, ctx)
    sec = _section(cfg, "psf", required=False)
    _check_keys(sec, "psf", ("ideal", "nodes_per_zone", "radial_step", "source_blur_fwhm", "defocus"))
    ideal = _flag(sec, "ideal", "psf")
    nodes = _integer(sec, "nodes_per_zone", "psf", default=4)
    step = _number(sec, "radial_step", "psf", default=None, positive=True)
    blur = _number(sec, "source_blur_fwhm", "psf", default=0.0, nonneg=True)
    z = _number_list(sec, "defocus", "psf", required=False)
    if z is not None and np.any(p.focal_length + z <= 0):
        raise ConfigError("field 'psf.defocus' moves the plane behind the lens")
    field = None
    if step is not None:
        try:
            field = lens_transmittance(p, step=step, ideal=ideal)
        except UnderResolvedGrid as exc:
            raise ConfigError(str(exc)) from None

    def run():
        m = focal_psf(p, ideal=ideal, nodes_per_zone=nodes, field=field)
        na = numerical_aperture(p)
        rep = CsvTable("psf_metrics.csv", ("name", "value", "unit"))
        rep.add("focal_length", p.focal_length, "m")
        rep.add("aperture_diameter", p.aperture_diameter, "m")
        rep.add("numerical_aperture", na, "1")
        rep.add("waist_1e2_radius", m.waist_1e2_radius, "m")
        rep.add("airy_waist_1e2_radius", airy_waist(p.design_wavelength, na), "m")
        rep.add("measured_waist_1e2_radius", MEASURED_WAIST_1E2_RADIUS[0], "m")
        rep.add("measured_waist_1e2_radius_sigma", MEASURED_WAIST_1E2_RADIUS[1], "m")
        rep.add("fwhm", m.fwhm, "m")
        rep.add("peak_intensity_rel", m.peak_intensity_rel, "1")
        rep.add("pedestal_rel", m.pedestal_rel, "1")
        for r, e in m.encircled_energy.items():
            rep.add(f"encircled_energy_r={r:.6g}", e, "1")
        U = m.amplitude
        out = [rep, CsvTable.from_columns("psf_field.csv", ("radius_m", "re", "im", "intensity"),
                                          (m.radii, U.real, U.imag, m.intensity))]
        if z is not None:
            curve = spot_vs_defocus(p, blur, z, ideal=ideal, nodes_per_zone=nodes, field=field)
            dr = double_area_range(curve)
            _add_doubling(rep, "defocus", dr)
            out.append(CsvTable.from_columns("defocus.csv", ("z_m", "fwhm_m"),
                                             (curve.abscissa, curve.values)))
        return out

    return run


def _add_doubling(table, prefix, dr):
    table.add(f"{prefix}_doubling_range", dr.width, "m")
    table.add(f"{prefix}_doubling_left", dr.left, "m")
    table.add(f"{prefix}_doubling_right", dr.right, "m")
    table.add(f"{prefix}_doubling_lower_bound", dr.lower_bound, "1")


def _plan_tolerance(cfg, ctx):
    p = _sim_lens(cfg, ctx)
    sec = _section(cfg, "tolerance")
    _check_keys(sec, "tolerance", ("ideal", "nodes_per_zone", "source_blur_fwhm", "defocus",
                                   "field_offsets", "points_per_wave"))
    ideal = _flag(sec, "ideal", "tolerance")
    nodes = _integer(sec, "nodes_per_zone", "tolerance", default=4)
    blur = _number(sec, "source_blur_fwhm", "tolerance", default=0.0, nonneg=True)
    ppw = _number(sec, "points_per_wave", "tolerance", default=6.0, positive=True)
    z = _number_list(sec, "defocus", "tolerance", required=False)
    x = _number_list(sec, "field_offsets", "tolerance", required=False)
    if z is None and x is None:
        raise ConfigError("section 'tolerance' needs 'defocus' and/or 'field_offsets'")
    if z is not None and np.any(p.focal_length + z <= 0):
        raise ConfigError("field 'tolerance.defocus' moves the plane behind the lens")
    if x is not None:
        if np.any(np.abs(x) > p.focal_length / 10):
            raise ConfigError("field 'tolerance.field_offsets' exceeds f/10 (small-angle validity)")
        if p.aperture_radius > MAX_FOV_APERTURE_RADIUS:
            raise ConfigError(
                f"field-offset scan needs aperture radius <= {MAX_FOV_APERTURE_RADIUS:g} m "
                "(the 2-D integral grows as the aperture area squared); run with --fast")

    def run():
        rep = CsvTable("tolerance_report.csv", ("name", "value", "unit"))
        rep.add("focal_length", p.focal_length, "m")
        rep.add("aperture_diameter", p.aperture_diameter, "m")
        out = [rep]
        if z is not None:
            curve = spot_vs_defocus(p, blur, z, ideal=ideal, nodes_per_zone=nodes)
            _add_doubling(rep, "defocus", double_area_range(curve))
            out.append(CsvTable.from_columns("defocus.csv", ("z_m", "fwhm_m"),
                                             (curve.abscissa, curve.values)))
        if x is not None:
            curve = spot_vs_field_offset(p, x, points_per_wave=ppw)
            _add_doubling(rep, "field", double_area_range(curve))
            out.append(CsvTable.from_columns("fov.csv", ("x_m", "area_m2"),
                                             (curve.abscissa, curve.values)))
        return out

    return run


def _plan_spectrum(cfg, ctx):
    sec = _section(cfg, "spectrum")
    where = "spectrum"
    _check_keys(sec, where, ("beta", "rf_frequency_hz", "linewidth_hz", "wavelength", "saturation",
                             "model", "detuning_hz", "saturation_scale"))
    beta = _number(sec, "beta", where, nonneg=True)
    rf = _number(sec, "rf_frequency_hz", where, default=20e6, positive=True)
    lw = _number(sec, "linewidth_hz", where, default=19.6e6, positive=True)
    wl = _number(sec, "wavelength", where, default=369.5e-9, positive=True)
    s = _number(sec, "saturation", where, nonneg=True)
    model = _choice(sec, "model", where, ("sideband", "phase_averaged", "both"), default="sideband")
    det = _number_list(sec, "detuning_hz", where)
    want_scale = _flag(sec, "saturation_scale", where)
    t = fl.Transition(wl, 2 * math.pi * lw)
    mm = fl.MicromotionParams(beta, 2 * math.pi * rf)
    models = ("sideband", "phase_averaged") if model == "both" else (model,)

    def run():
        d = 2 * math.pi * det
        cols = [det]
        header = ["detuning_Hz"]
        rep = CsvTable("spectrum_report.csv", ("name", "value", "unit"))
        for name in models:
            f = fl.spectrum_sideband if name == "sideband" else fl.spectrum_phase_averaged
            r = f(t, mm, s, d)
            cols.append(r)
            header.append("rate_per_s" if len(models) == 1 else f"rate_{name}_per_s")
            try:
                rep.add(f"fwhm_{name}", fl.spectrum_fwhm(det, r), "Hz")
            except ValueError:
                rep.add(f"fwhm_{name}", math.nan, "Hz")
            rep.add(f"peak_rate_ratio_{name}", fl.peak_rate_ratio(t, mm, s, name), "1")
            if want_scale:
                rep.add(f"saturation_scale_{name}", fl.saturation_scale(t, mm, name), "1")
        return [CsvTable.from_columns("spectrum.csv", header, cols), rep]

    return run


def _plan_budget(cfg, ctx):
    sec = _section(cfg, "budget", required=False)
    _check_keys(sec, "budget", ("use_inferred_qe", "chain", "calibration", "emission",
                                "detected_rate", "contrast", "projected_solid_angle",
                                "projected_diffraction"))
    use_qe = _flag(sec, "use_inferred_qe", "budget")
    c0 = bud.reference_chain()
    cs = _section(sec, "chain", required=False)
    _check_keys(cs, "budget.chain", ("solid_angle_fraction", "lens_diffraction_efficiency",
                                     "window_transmission", "filter_transmission", "camera_qe"))
    try:
        chain = bud.DetectionChain(*(_quantity(cs, k, "budget.chain", getattr(c0, k)) for k in (
            "solid_angle_fraction", "lens_diffraction_efficiency", "window_transmission",
            "filter_transmission", "camera_qe")))
    except bud.EfficiencyError as exc:
        raise ConfigError(f"budget.chain: {exc}") from None
    r0 = bud.reference_calibration()
    rs = _section(sec, "calibration", required=False)
    _check_keys(rs, "budget.calibration", ("laser_power", "wavelength", "attenuators_db",
                                           "total_db", "measured_rate"))
    stack = r0.attenuators_db
    if "attenuators_db" in rs:
        if not isinstance(rs["attenuators_db"], list):
            raise ConfigError("field 'budget.calibration.attenuators_db' must be a list")
        stack = tuple(_quantity({"a": a}, "a", "budget.calibration.attenuators_db", None, DB)
                      for a in rs["attenuators_db"])
    override = r0.total_db_override
    if "total_db" in rs:
        override = None if rs["total_db"] is None else _quantity(rs, "total_db", "budget.calibration",
                                                                 None, DB)
    try:
        run_cal = bud.CalibrationRun(
            _quantity(rs, "laser_power", "budget.calibration", r0.laser_power, POWER),
            _number(rs, "wavelength", "budget.calibration", default=r0.wavelength, positive=True),
            stack, override,
            _quantity(rs, "measured_rate", "budget.calibration", r0.measured_rate, RATE))
        es = _section(sec, "emission", required=False)
        _check_keys(es, "budget.emission", ("motion_reduction",))
        em = bud.EmissionModel(fl.YB_TRANSITION,
                               _quantity(es, "motion_reduction", "budget.emission",
                                         bud.reference_emission().motion_reduction), True)
    except ValueError as exc:
        raise ConfigError(f"budget: {exc}") from None
    detected = _quantity(sec, "detected_rate", "budget", bud.REFERENCE_DETECTED_RATE, RATE)
    contrast = _quantity(sec, "contrast", "budget", bud.REFERENCE_CONTRAST)
    psa = _quantity(sec, "projected_solid_angle", "budget", Quantity(0.28, 0.0))
    pde = _quantity(sec, "projected_diffraction", "budget", Quantity(0.80, 0.0))

    def run():
        rep = bud.reference_report(chain, run_cal, em, detected, contrast, psa, pde, use_inferred_qe=use_qe)
        t = CsvTable("budget_report.csv", ("name", "value", "sigma", "unit"))
        for k, q in rep.items():
            t.add(k, q.value, q.sigma, q.dim.symbol)
        return [t]

    return run


BUNDLED = {"bundled:scalloped": "scalloped_beta7p6.csv", "bundled:focus": "focus_scan.csv"}


def _resolve_input(path: str, base: Path) -> Path:
    if path in BUNDLED:
        return Path(str(resources.files("pflion") / "data" / BUNDLED[path]))
    p = Path(path)
    return p if p.is_absolute() else base / p


def _plan_fit(cfg, ctx):
    sec = _section(cfg, "fit")
    where = "fit"
    _check_keys(sec, where, ("kind", "data", "linewidth_hz", "rf_frequency_hz", "monte_carlo"))
    kind = _choice(sec, "kind", where, ("scalloped", "focus"))
    if not isinstance(sec.get("data"), str):
        raise ConfigError("missing field 'fit.data' (path or bundled:scalloped / bundled:focus)")
    path = _resolve_input(sec["data"], ctx["base"])
    if not path.is_file():
        raise ConfigError(f"field 'fit.data': file not found: {path}")
    try:
        data = read_series(path)
    except ValueError as exc:
        raise ConfigError(f"field 'fit.data': {exc}") from None
    gamma = _number(sec, "linewidth_hz", where, default=19.6e6, positive=True)
    omega = _number(sec, "rf_frequency_hz", where, default=20e6, positive=True)
    mc = _section(sec, "monte_carlo", required=False)
    _check_keys(mc, "fit.monte_carlo", ("trials", "noise"))
    trials = _integer(mc, "trials", "fit.monte_carlo", default=0, minimum=0)
    noise = _number(mc, "noise", "fit.monte_carlo", default=0.03, positive=True)
    n_par = 5 if kind == "scalloped" else 3
    if len(data) < n_par + 1:
        raise ConfigError(f"field 'fit.data': need at least {n_par + 1} points")

    if kind == "scalloped":
        model = scalloped_model(gamma, omega)

        def fit(d: DataSeries) -> FitResult:
            return fit_scalloped(d, gamma, omega)
    else:
        model = hyperbola

        def fit(d: DataSeries) -> FitResult:
            return fit_focus_hyperbola(d)

    def run():
        res = fit(data)
        if not res.converged:
            raise NumericalError(f"fit did not converge: {res.message}")
        rep = CsvTable("fit_report.csv", ("parameter", "value", "sigma"))
        for n, v, s in zip(res.names, res.parameters, res.parameter_sigmas):
            rep.add(n, v, s)
        if kind == "focus":
            rep.add("depth_of_focus", *res.extras["depth_of_focus"])
        rep.add("residual_norm", res.residual_norm, 0.0)
        rep.add("iterations", res.iterations, 0)
        yfit = model(data.x, res.parameters)
        out = [rep, CsvTable.from_columns("fit_residuals.csv", ("x", "y", "model", "residual"),
                                          (data.x, data.y, yfit, data.y - yfit))]
        if trials:
            out.append(_monte_carlo(fit, data.x, yfit, res, noise, trials, ctx["seed"]))
        return out

    return run


def _monte_carlo(fit, x, yfit, ref: FitResult, noise, trials, seed) -> CsvTable:
    """Refit synthetic copies of the best-fit curve with Gaussian noise of `noise` x peak."""
    rng = np.random.default_rng(seed)
    scale = noise * float(np.max(np.abs(yfit)))
    t = CsvTable("fit_montecarlo.csv", ("trial", "converged") + tuple(
        f"{n}{suffix}" for n in ref.names for suffix in ("", "_sigma")))
    for i in range(trials):
        r = fit(DataSeries(x, yfit + scale * rng.standard_normal(x.size)))
        vals = [v for pair in zip(r.parameters, r.parameter_sigmas) for v in pair]
        t.add(i, r.converged, *vals)
    return t


MODES = {
    "design": _plan_design,
    "psf": _plan_psf,
    "tolerance": _plan_tolerance,
    "spectrum": _plan_spectrum,
    "budget": _plan_budget,
    "fit": _plan_fit,
}


def load_config(path: Path) -> tuple[dict, bytes]:
    raw = Path(path).read_bytes()
    try:
        cfg = yaml.load(raw, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a mapping")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {cfg.get('schema_version')!r}")
    if cfg.get("mode") not in MODES:
        raise ConfigError(f"field 'mode' must be one of {sorted(MODES)}, got {cfg.get('mode')!r}")
    _check_keys(cfg, "config", ("schema_version", "mode", "output_dir", "fast_mode", "seed",
                                "lens", "psf", "tolerance", "spectrum", "budget", "fit"))
    return cfg, raw


def run_job(cfg: dict, raw: bytes, base: Path, out: Path, fast: bool, seed: int) -> list[Path]:
    ctx = {"fast": fast, "seed": seed, "base": base}
    try:
        plan = MODES[cfg["mode"]](cfg, ctx)
    except ConfigError:
        raise
    except ValueError as exc:
        # constructor checks in the domain types
        raise ConfigError(str(exc)) from None
    digest = config_hash(raw + f"\n#fast={int(fast)} seed={seed}\n".encode())
    try:
        tables = plan()
    except (UnderResolvedGrid, OSError):
        raise
    except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        raise NumericalError(f"{type(exc).__name__}: {exc}") from exc
    return write_tables(out, tables, digest)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pflion", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, type=Path, help="YAML job file")
    ap.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    ap.add_argument("--fast", action="store_true", default=None,
                    help="simulate the NA-preserving reduced-aperture lens")
    ap.add_argument("--seed", type=int, default=None, help="seed for Monte-Carlo self-tests")
    ap.add_argument("--version", action="version", version=f"pflion {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="pflion: %(levelname)s: %(message)s")
    try:
        try:
            cfg, raw = load_config(args.config)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None
        fast = args.fast if args.fast is not None else cfg.get("fast_mode", False)
        if not isinstance(fast, bool):
            raise ConfigError("field 'fast_mode' must be true or false")
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        out = args.out
        if out is None:
            if not isinstance(cfg.get("output_dir"), str):
                raise ConfigError("no output directory: pass --out or set 'output_dir'")
            out = args.config.parent / cfg["output_dir"]
        paths = run_job(cfg, raw, args.config.parent, out, fast, seed)
    except ConfigError as exc:
        _log.error("%s", exc)
        return EXIT_CONFIG
    except UnderResolvedGrid as exc:
        _log.error("%s", exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        _log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except OSError as exc:
        _log.error("I/O error: %s", exc)
        return EXIT_IO
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
