"""Comparison of measured force gradients with theory.

The compared quantity is F'_theor(a_i) - F'_expt(a_i) at every measured
separation. Its 67% confidence half-width combines in quadrature the
theoretical half-band, the experimental error and the effect of the
separation error, |dF'/da| * Delta a_i.
"""
import csv
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import calibration as cal
from .corrections import RoughnessParams, UncertaintyBudget, build_band
from .lifshitz import SummationPolicy, SystemGeometry
from .sweep import parallel_map

SCHEMA_VERSION = 1
MEASUREMENT_COLUMNS = ("a_nm", "gradient_un_per_m", "err_gradient_un_per_m", "err_a_nm")


@dataclass(frozen=True)
class MeasurementPoint:
    a: float
    gradient: float
    err_gradient: float
    err_a: float = 0.0


class MeasurementSeries:
    """Mean measured gradients (uN/m) with errors, ordered by separation (nm)."""

    def __init__(self, points):
        pts = tuple(p if isinstance(p, MeasurementPoint) else MeasurementPoint(*p) for p in points)
        if not pts:
            raise ValueError("empty measurement series")
        a = [p.a for p in pts]
        if any(b <= x for x, b in zip(a, a[1:])):
            raise ValueError("separations must be strictly increasing")
        if any(not p.err_gradient > 0.0 or p.err_a < 0.0 for p in pts):
            raise ValueError("gradient errors must be positive and separation errors non-negative")
        self.points = pts

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def a(self):
        return np.array([p.a for p in self.points])

    @property
    def gradient(self):
        return np.array([p.gradient for p in self.points])

    @property
    def err_gradient(self):
        return np.array([p.err_gradient for p in self.points])

    @property
    def err_a(self):
        return np.array([p.err_a for p in self.points])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not set(MEASUREMENT_COLUMNS) <= set(reader.fieldnames):
                raise ValueError(f"{path}: expected columns {', '.join(MEASUREMENT_COLUMNS)}")
            rows = [MeasurementPoint(*(float(r[c]) for c in MEASUREMENT_COLUMNS)) for r in reader]
        return cls(rows)

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(MEASUREMENT_COLUMNS)
            for p in self.points:
                w.writerow([repr(p.a), repr(p.gradient), repr(p.err_gradient), repr(p.err_a)])


class TheoryTable:
    """Theoretical band tabulated on a separation grid and spline-interpolated.

    ``center`` is the nominal (roughness-corrected) gradient, ``lower`` and
    ``upper`` the band edges, all in uN/m.
    """

    def __init__(self, a, lower, upper, center, temperature):
        self.a = np.asarray(a, dtype=float)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.center = np.asarray(center, dtype=float)
        self.temperature = float(temperature)
        if self.a.size < 4:
            raise ValueError("need at least 4 grid points")
        if np.any(self.lower > self.upper):
            raise ValueError("lower band edge above upper edge")
        # interpolate logarithms: the gradient is close to a power law in a
        la = np.log(self.a)
        self._lo = CubicSpline(la, np.log(self.lower))
        self._hi = CubicSpline(la, np.log(self.upper))
        self._c = CubicSpline(la, np.log(self.center))

    @classmethod
    def from_bands(cls, a, bands):
        return cls(a, [b.lower for b in bands], [b.upper for b in bands],
                   [b.center for b in bands], bands[0].center_T)

    def _check(self, a):
        a = np.asarray(a, dtype=float)
        if np.any(a < self.a[0] * (1 - 1e-12)) or np.any(a > self.a[-1] * (1 + 1e-12)):
            raise ValueError("separation outside the tabulated range")
        return np.log(a)

    def value(self, a):
        return np.exp(self._c(self._check(a)))

    def band(self, a):
        la = self._check(a)
        return np.exp(self._lo(la)), np.exp(self._hi(la))

    def midpoint(self, a):
        lo, hi = self.band(a)
        return 0.5 * (lo + hi)

    def half_width(self, a):
        lo, hi = self.band(a)
        return 0.5 * (hi - lo)

    def slope(self, a):
        """dF'/da of the nominal gradient, uN/m per nm."""
        la = self._check(a)
        return np.exp(self._c(la)) * self._c(la, 1) / np.asarray(a, dtype=float)


def theory_table(a_grid, sheet, T, radius=60350.0, budget=UncertaintyBudget(),
                 policy=SummationPolicy(), rough=RoughnessParams(), substrate=None, sphere=None,
                 freestanding=False, threads=None):
    """Bands from :func:`build_band` at every ``a_grid`` point, as a :class:`TheoryTable`."""
    a_grid = [float(x) for x in a_grid]

    def one(a):
        return build_band(SystemGeometry(radius, a), sheet, budget, T, policy, substrate, sphere,
                          rough, freestanding)

    return TheoryTable.from_bands(a_grid, parallel_map(one, a_grid, threads))


@dataclass(frozen=True)
class DiffPoint:
    a: float
    diff: float
    band_halfwidth: float

    @property
    def outside(self):
        return abs(self.diff) > self.band_halfwidth


@dataclass(frozen=True)
class ComparisonReport:
    differences: tuple
    excluded_intervals: tuple
    theory_temperature: float = float("nan")

    @property
    def excluded(self):
        return bool(self.excluded_intervals)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "theory_temperature_k": self.theory_temperature,
            "differences": [asdict(d) for d in self.differences],
            "excluded_intervals": [list(iv) for iv in self.excluded_intervals],
        }

    def write(self, csv_path=None, json_path=None):
        if csv_path is not None:
            with open(csv_path, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(("a_nm", "diff_un_per_m", "band_halfwidth_un_per_m", "outside"))
                for d in self.differences:
                    w.writerow([repr(d.a), repr(d.diff), repr(d.band_halfwidth), int(d.outside)])
        if json_path is not None:
            with open(json_path, "w", encoding="utf-8") as fh:
                json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError("unsupported report schema")
        return cls(tuple(DiffPoint(**d) for d in doc["differences"]),
                   tuple(tuple(iv) for iv in doc["excluded_intervals"]),
                   doc["theory_temperature_k"])


def excluded_runs(a, outside, min_run=3):
    """[a_lo, a_hi] of every maximal run of at least ``min_run`` consecutive True."""
    runs, start = [], None
    for i, flag in enumerate(list(outside) + [False]):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start >= min_run:
                runs.append((float(a[start]), float(a[i - 1])))
            start = None
    return tuple(runs)


def compare_values(a, theory, theory_half, expt, expt_err, slope, err_a, min_run=3,
                   theory_temperature=float("nan")):
    """Difference curve and exclusion runs from plain arrays."""
    a, theory, expt = (np.asarray(x, dtype=float) for x in (a, theory, expt))
    half = np.sqrt(np.asarray(theory_half) ** 2 + np.asarray(expt_err) ** 2
                   + (np.asarray(slope) * np.asarray(err_a)) ** 2)
    diff = theory - expt
    pts = tuple(DiffPoint(float(x), float(d), float(h)) for x, d, h in zip(a, diff, half))
    return ComparisonReport(pts, excluded_runs(a, np.abs(diff) > half, min_run), theory_temperature)


def compare(series, theory, min_run=3):
    """Compare ``series`` against a :class:`TheoryTable`.

    The theoretical value at each a_i is the midpoint of the band and its
    half-width the theoretical error. An excluded interval is a run of at
    least ``min_run`` consecutive points whose difference lies outside the
    combined confidence band.
    """
    a = series.a
    return compare_values(a, theory.midpoint(a), theory.half_width(a), series.gradient,
                          series.err_gradient, theory.slope(a), series.err_a, min_run,
                          theory.temperature)


def data_thermal_correction(series, theory_zero, report):
    """(a, F'_expt(a) - F'_theor(a, 0)) at the points inside excluded intervals."""
    out = []
    for p in series:
        if any(lo <= p.a <= hi for lo, hi in report.excluded_intervals):
            out.append((p.a, float(p.gradient - theory_zero.value(p.a))))
    return out


def synthetic_measurements(a, model, err_gradient, err_a=0.6, rng=None):
    """Measurements drawn from ``model(a)`` with Gaussian gradient noise.

    ``err_gradient`` may be a scalar or an array (uN/m); it is both the noise
    level and the reported error.
    """
    rng = np.random.default_rng(rng)
    a = np.asarray(a, dtype=float)
    mean = np.asarray(model(a), dtype=float)
    err = np.broadcast_to(np.asarray(err_gradient, dtype=float), a.shape)
    g = mean + rng.normal(0.0, 1.0, a.shape) * err
    return MeasurementSeries([MeasurementPoint(float(x), float(y), float(e), float(err_a))
                              for x, y, e in zip(a, g, err)])


#: (V0 in V, z0 in nm, C in s/kg) of the two measurement sets
MEASURED_SETS = ((0.1324, 236.9, 4.599e5), (0.1320, 238.8, 4.712e5))


def simulated_experiment(model, a_grid, radius=60350.0, sets=MEASURED_SETS,
                         noise=cal.PLL_RESOLUTION, rng=None, margin=4.0):
    """Measurement series produced by the full calibration chain.

    For every set, frequency shifts are generated at 1 nm piezo steps with
    PLL noise and the injected gradient ``model(a)`` (uN/m); the set is
    calibrated, gradients are extracted, and the sets are averaged on
    ``a_grid``. ``model`` must be defined ``margin`` nm beyond the grid.
    """
    rng = np.random.default_rng(rng)
    a_grid = np.asarray(a_grid, dtype=float)
    extracted = []
    for sid, (v0, z0, c) in enumerate(sets, start=1):
        z = np.arange(math.floor(a_grid[0] - z0 - margin), math.ceil(a_grid[-1] - z0 + margin) + 1.0)
        recs = cal.synthetic_records(z, radius, v0, z0, c, casimir=lambda x: float(model(x)),
                                     noise=noise, rng=rng, set_id=sid)
        fit = cal.fit_calibration(recs, radius, sigma=noise)
        extracted.append(cal.extract_casimir(recs, fit, sigma=noise))
    avg = cal.average_sets(extracted, a_grid)
    return MeasurementSeries([MeasurementPoint(p.a, p.gradient, p.err_gradient, p.err_a) for p in avg])


__all__ = [
    "MEASURED_SETS", "simulated_experiment",
    "MeasurementPoint", "MeasurementSeries", "TheoryTable", "theory_table", "DiffPoint",
    "ComparisonReport", "compare", "compare_values", "excluded_runs", "data_thermal_correction",
    "synthetic_measurements", "MEASUREMENT_COLUMNS",
]
