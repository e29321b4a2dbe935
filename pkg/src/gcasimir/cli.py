"""Command-line interface.

Subcommands write CSV/JSON files into the configured output directory:

    gcasimir gradient   force gradients and theoretical bands vs separation
    gcasimir thermal    relative thermal corrections (total and implicit)
    gcasimir regime     separations where the zero-frequency term dominates
    gcasimir calibrate  electrostatic calibration of frequency-shift data
    gcasimir compare    experiment-theory differences and exclusion intervals

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""
import argparse
import csv
import json
import logging
import os
import sys
import warnings

import numpy as np

from . import __version__
from . import analysis, calibration
from .config import ConfigError, RunConfig
from .corrections import GradientBand, UncertaintyBudget, build_band
from .graphene import QuadratureError
from .lifshitz import (ConvergenceError, SystemGeometry, effective_temperatures, gradient_finite_T,
                       gradient_zero_T, probe_zero_mode_shares, require_converged,
                       thermal_regime_threshold)
from .sweep import SweepError, default_threads, parallel_map

log = logging.getLogger("gcasimir")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICS, EXIT_IO = 0, 2, 3, 4

GRADIENT_COLUMNS = ("a_nm", "fprime_T", "fprime_0", "band_T_lo", "band_T_hi", "band_0_lo",
                    "band_0_hi")
THERMAL_COLUMNS = ("boundary", "a_nm", "fprime_T", "fprime_0", "delta_T_pct", "delta_T_implicit_pct")
REGIME_COLUMNS = ("boundary_1", "boundary_2", "fraction", "threshold_um", "t_eff_k", "t_eff_gr_k")


def _fmt(x):
    # repr gives the shortest round-tripping form, identical on every run
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
    log.info("wrote %s", path)


def _parse(text):
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path, columns):
    """Rows of a CSV emitted by this tool, checked against ``columns``.

    Numeric fields are returned as floats, others as strings.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != tuple(columns):
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [{k: _parse(v) for k, v in row.items()} for row in reader]


def _out(cfg, args, name):
    d = args.out or cfg.raw["output"]["dir"]
    os.makedirs(d, exist_ok=True)
    return os.path.join(d, cfg.raw["output"]["prefix"] + name)


def _plate_and_sphere(cfg):
    return cfg.boundary("plate"), cfg.boundary("sphere")


# ---------------------------------------------------------------- commands

def cmd_gradient(cfg, args):
    T = cfg.temperature
    policy, rough = cfg.policy(), cfg.roughness()
    plate, sphere = _plate_and_sphere(cfg)
    ideal = cfg.plate_kind == "ideal"
    budget = cfg.budget()
    substrate = None if cfg.plate_kind == "freestanding" else plate.substrate

    def row(a):
        geom = SystemGeometry(cfg.radius, a)
        if ideal:
            # debugging reflector: no roughness, no band
            ft = require_converged(gradient_finite_T(geom, plate, sphere, T, policy), a) if T > 0 \
                else require_converged(gradient_zero_T(geom, plate, sphere, policy), a)
            f0 = require_converged(gradient_zero_T(geom, plate, sphere, policy), a)
            return (a, ft, f0, ft, ft, f0, f0)
        if cfg.plate_kind == "bare":
            b = UncertaintyBudget(0.0, 0.0, budget.radius_err, budget.optical_rel_err,
                                  budget.pfa_lower_factor_enabled)
            band_t = _bare_band(geom, plate, sphere, b, T, policy, rough)
            band_0 = _bare_band(geom, plate, sphere, b, 0.0, policy, rough)
        else:
            kw = dict(substrate=substrate, sphere=sphere.substrate, rough=rough,
                      freestanding=cfg.plate_kind == "freestanding")
            band_t = build_band(geom, plate.sheet, budget, T, policy, **kw)
            band_0 = build_band(geom, plate.sheet, budget, 0.0, policy, **kw)
        return (a, band_t.center, band_0.center, band_t.lower, band_t.upper, band_0.lower,
                band_0.upper)

    rows = parallel_map(row, cfg.separations(), args.threads)
    _write_csv(_out(cfg, args, "gradient.csv"), GRADIENT_COLUMNS, rows)
    return rows


def _bare_band(geom, plate, sphere, budget, T, policy, rough):
    """Band for a plate without graphene: only radius, optical and PFA widening."""
    a = geom.separation
    res = gradient_zero_T(geom, plate, sphere, policy) if T == 0.0 else \
        gradient_finite_T(geom, plate, sphere, T, policy)
    c = require_converged(res, a) * rough.factor(a)
    dr = budget.radius_err / geom.sphere_radius
    hi = c * (1 + dr) * (1 + budget.optical_rel_err)
    lo = c * (1 - dr) * (1 - budget.optical_rel_err)
    if budget.pfa_lower_factor_enabled:
        lo *= 1 - a / geom.sphere_radius
    return GradientBand(lo, hi, T, c)


def cmd_thermal(cfg, args):
    T = cfg.temperature
    if T <= 0.0:
        raise ConfigError("thermal corrections need temperature_k > 0")
    policy = cfg.policy()
    sphere = cfg.boundary("sphere")
    names = cfg.raw["thermal"]["boundaries"]
    jobs = [(n, a) for n in names for a in cfg.separations()]
    bounds = {n: cfg.boundary(n) for n in names}

    def row(job):
        name, a = job
        geom = SystemGeometry(cfg.radius, a)
        b = bounds[name]
        ft = require_converged(gradient_finite_T(geom, b, sphere, T, policy), a)
        f0 = require_converged(gradient_zero_T(geom, b, sphere, policy), a)
        if b.has_sheet:
            fi = require_converged(gradient_finite_T(geom, b, sphere, T, policy, tensor="zero_t"), a)
        else:
            fi = ft
        return (name, a, ft, f0, 100.0 * (ft - f0) / f0, 100.0 * (fi - f0) / f0)

    rows = parallel_map(row, jobs, args.threads)
    _write_csv(_out(cfg, args, "thermal.csv"), THERMAL_COLUMNS, rows)
    return rows


def cmd_regime(cfg, args):
    T = cfg.temperature
    if T <= 0.0:
        raise ConfigError("the thermal regime needs temperature_k > 0")
    policy = cfg.policy()
    reg = cfg.raw["regime"]

    def row(pair):
        b1, b2 = cfg.boundary(pair[0]), cfg.boundary(pair[1])
        probe = probe_zero_mode_shares(b1, b2, T, policy, reg["a_min_um"], reg["a_max_um"],
                                       reg["points"])
        out = []
        for f in reg["fractions"]:
            a_um = thermal_regime_threshold(b1, b2, T, f, policy, probe=probe)
            t_eff, t_gr = effective_temperatures(1e3 * a_um, cfg.sheet().fermi_velocity_ratio)
            out.append((pair[0], pair[1], float(f), a_um, t_eff, t_gr))
        return out

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = [r for chunk in parallel_map(row, [tuple(p) for p in reg["pairs"]], args.threads)
                for r in chunk]
    _write_csv(_out(cfg, args, "regime.csv"), REGIME_COLUMNS, rows)
    return rows


def cmd_calibrate(cfg, args):
    sets = calibration.read_shifts(args.shifts)
    fits = {sid: calibration.fit_calibration(recs, cfg.radius) for sid, recs in sets.items()}
    calibration.write_calibration(_out(cfg, args, "calibration.json"), fits)
    extracted = [calibration.extract_casimir(sets[sid], fits[sid]) for sid in sets]
    lo = max(min(p.a for p in e) for e in extracted)
    hi = min(max(p.a for p in e) for e in extracted)
    grid = np.arange(np.ceil(lo), np.floor(hi) + 0.5, 1.0)
    avg = calibration.average_sets(extracted, grid)
    analysis.MeasurementSeries([analysis.MeasurementPoint(p.a, p.gradient, p.err_gradient, p.err_a)
                                for p in avg]).to_csv(_out(cfg, args, "gradients.csv"))
    return fits, avg


def cmd_compare(cfg, args):
    series = analysis.MeasurementSeries.from_csv(args.measurements)
    T = cfg.temperature
    if T <= 0.0:
        raise ConfigError("compare needs the measurement temperature_k > 0")
    if cfg.plate_kind not in ("coated", "freestanding"):
        raise ConfigError("compare needs a graphene plate")
    step = cfg.raw["geometry"]["a_step_nm"]
    a0, a1 = series.a[0], series.a[-1]
    n = int(np.ceil((a1 - a0) / step))
    grid = a0 + step * np.arange(n + 1)
    if grid.size < 4:
        grid = np.linspace(a0, a1, 4)
    grid[-1] = max(grid[-1], a1)
    plate, sphere = _plate_and_sphere(cfg)
    kw = dict(radius=cfg.radius, budget=cfg.budget(), policy=cfg.policy(), rough=cfg.roughness(),
              substrate=plate.substrate, sphere=sphere.substrate,
              freestanding=cfg.plate_kind == "freestanding", threads=args.threads)
    th_t = analysis.theory_table(grid, plate.sheet, T, **kw)
    th_0 = analysis.theory_table(grid, plate.sheet, 0.0, **kw)
    rep_t = analysis.compare(series, th_t)
    rep_0 = analysis.compare(series, th_0)
    rep_t.write(_out(cfg, args, "compare_T.csv"), _out(cfg, args, "compare_T.json"))
    rep_0.write(_out(cfg, args, "compare_0.csv"), _out(cfg, args, "compare_0.json"))
    dt = analysis.data_thermal_correction(series, th_0, rep_0)
    _write_csv(_out(cfg, args, "thermal_data.csv"), ("a_nm", "delta_T_un_per_m"), dt)
    summary = {
        "schema_version": analysis.SCHEMA_VERSION,
        "temperature_k": T,
        "excluded_T": [list(x) for x in rep_t.excluded_intervals],
        "excluded_0": [list(x) for x in rep_0.excluded_intervals],
    }
    with open(_out(cfg, args, "compare_summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return rep_t, rep_0


COMMANDS = {"gradient": cmd_gradient, "thermal": cmd_thermal, "regime": cmd_regime,
            "calibrate": cmd_calibrate, "compare": cmd_compare}


def build_parser():
    p = argparse.ArgumentParser(prog="gcasimir", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="TOML configuration file")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a configuration value (repeatable)")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default: {default_threads()})")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--freestanding", action="store_true",
                        help="replace the substrate by vacuum (freestanding graphene)")
    common.add_argument("--ideal-metal", action="store_true",
                        help="debug: unit reflection coefficients on both bodies")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("gradient", "thermal", "regime"):
        sub.add_parser(name, parents=[common], help=f"{name} sweep")
    c = sub.add_parser("calibrate", parents=[common], help="calibrate frequency-shift data")
    c.add_argument("shifts", help="CSV with columns " + ", ".join(calibration.SHIFT_COLUMNS))
    m = sub.add_parser("compare", parents=[common], help="compare measurements with theory")
    m.add_argument("measurements", help="CSV with columns " + ", ".join(analysis.MEASUREMENT_COLUMNS))
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        overrides = list(args.set)
        if args.freestanding:
            overrides.append('plate.kind="freestanding"')
        if args.ideal_metal:
            overrides.append('plate.kind="ideal"')
        cfg = RunConfig.load(args.config, overrides)
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
    except ConfigError as exc:
        print(f"gcasimir: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"gcasimir: cannot read configuration: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"gcasimir: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SweepError as exc:
        cause = exc.cause
        if isinstance(cause, (QuadratureError, ConvergenceError, FloatingPointError)):
            print(f"gcasimir: numerical failure at {exc.key}: {cause}", file=sys.stderr)
            return EXIT_NUMERICS
        if isinstance(cause, ConfigError):
            print(f"gcasimir: configuration error: {cause}", file=sys.stderr)
            return EXIT_CONFIG
        if isinstance(cause, ValueError):
            print(f"gcasimir: numerical failure at {exc.key}: {cause}", file=sys.stderr)
            return EXIT_NUMERICS
        raise
    except (QuadratureError, ConvergenceError, calibration.CalibrationError) as exc:
        print(f"gcasimir: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except OSError as exc:
        print(f"gcasimir: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # malformed input files
        print(f"gcasimir: input error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
