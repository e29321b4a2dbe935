"""Electrostatic calibration of the dynamic-AFM frequency-shift measurement.

In the linear regime the resonance shift of the cantilever-sphere system is
proportional to the total force gradient,

    d_omega = -C X'(a, R) (V - V0)^2 - C F'(a, T),

with a = z_piezo + z0. Sweeping the applied voltage V at each piezo
position gives a parabola whose vertex is the residual potential V0 and
whose curvature is -C X'(a, R); a global fit of the curvatures over all
positions returns the contact separation z0 and the calibration constant C.

Units: nm for lengths, V, rad/s for frequency shifts, s/kg for C. The
electrostatic factor X' is in N/(V^2 m) and Casimir gradients in uN/m.
"""
import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .constants import EPS0

SCHEMA_VERSION = 1

#: resolution of the phase-locked loop, rad/s
PLL_RESOLUTION = 55.3e-3

#: 0.083 ... 0.183 V in 0.01 V steps without 0.133 V, plus 11 runs at 0.133 V
MEASURED_VOLTAGES = tuple(
    [round(0.083 + 0.01 * i, 3) for i in range(11) if i != 5] + [0.133] * 11
)

_UN = 1e6  # N/m -> uN/m


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ShiftRecord:
    """One frequency-shift reading at a piezo position and applied voltage."""

    z_piezo: float
    applied_voltage: float
    delta_omega: float
    set_id: int = 1
    run_id: int = 0

    def __post_init__(self):
        for name in ("z_piezo", "applied_voltage", "delta_omega"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class CalibrationFit:
    """Calibration parameters with 1-sigma errors.

    ``v0_line`` is ``(d, theta)`` of the straight-line fit V0(a) = d + theta a
    (a in nm) and ``v0_line_err`` the corresponding errors. ``vertices`` and
    ``curvatures`` are the per-position parabola results, ordered by z_piezo.
    """

    v0: float
    v0_err: float
    z0: float
    z0_err: float
    cal_const: float
    cal_const_err: float
    v0_line: tuple
    v0_line_err: tuple = (0.0, 0.0)
    radius: float = float("nan")
    z_piezo: np.ndarray = field(default=None, repr=False, compare=False)
    vertices: np.ndarray = field(default=None, repr=False, compare=False)
    curvatures: np.ndarray = field(default=None, repr=False, compare=False)
    chi2: float = float("nan")

    def __post_init__(self):
        if min(self.v0_err, self.z0_err, self.cal_const_err) < 0.0:
            raise ValueError("errors must be non-negative")

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "v0_v": self.v0,
            "v0_err_v": self.v0_err,
            "z0_nm": self.z0,
            "z0_err_nm": self.z0_err,
            "c_s_per_kg": self.cal_const,
            "c_err": self.cal_const_err,
            "line_d_v": self.v0_line[0],
            "line_theta_v_per_nm": self.v0_line[1],
            "radius_nm": self.radius,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported calibration schema {d.get('schema_version')!r}")
        return cls(d["v0_v"], d["v0_err_v"], d["z0_nm"], d["z0_err_nm"], d["c_s_per_kg"],
                   d["c_err"], (d["line_d_v"], d["line_theta_v_per_nm"]),
                   radius=d.get("radius_nm", float("nan")))


def electrostatic_gradient_factor(a, R, rtol=1e-12, max_terms=1_000_000):
    """X'(a, R) of a sphere facing a plane, in N/(V^2 m).

    Bispherical-coordinate series with cosh(tau) = 1 + a/R, summed until
    the last term is below ``rtol`` times the partial sum. ``a`` may be an
    array; ``a`` and ``R`` are in nm.

    Raises
    ------
    CalibrationError
        If the series has not converged after ``max_terms`` terms.
    """
    a_arr = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(a_arr <= 0.0) or np.any(a_arr >= R):
        raise ValueError("need 0 < a < R")
    tau = np.arccosh(1.0 + a_arr / R)
    # csch and coth through exp(-x) to stay finite for large n tau
    e2 = np.exp(-2.0 * tau)
    coth_t = (1.0 + e2) / (1.0 - e2)
    csch2_t = 4.0 * e2 / (1.0 - e2) ** 2

    total = np.zeros_like(a_arr)
    done = np.zeros(a_arr.shape, dtype=bool)
    block = min(256, max_terms)
    n0 = 1
    while not done.all():
        if n0 > max_terms:
            raise CalibrationError("electrostatic series did not converge; a/R too small")
        n = np.arange(n0, n0 + block, dtype=float)[:, None]
        x = n * tau[None, :]
        em = np.exp(-x)
        em2 = em * em
        csch = 2.0 * em / (1.0 - em2)
        coth = (1.0 + em2) / (1.0 - em2)
        terms = csch * (n * coth * (n * coth - coth_t) - csch2_t + n * n * csch * csch)
        terms[:, done] = 0.0
        total += terms.sum(axis=0)
        last = np.abs(terms[-1])
        done |= last <= rtol * np.abs(total)
        n0 += block
    a_m = a_arr * 1e-9
    x_prime = 2.0 * math.pi * EPS0 / np.sqrt(a_m * (2.0 * R * 1e-9 + a_m)) * total
    return float(x_prime[0]) if np.ndim(a) == 0 else x_prime


def frequency_shift_forward(a, R, v_applied, v0, cal_const, casimir_gradient):
    """Frequency shift (rad/s) for total gradient X'(V - V0)^2 + F'.

    ``casimir_gradient`` is in uN/m, attractive positive.
    """
    xp = electrostatic_gradient_factor(a, R)
    return -cal_const * (xp * (np.asarray(v_applied) - v0) ** 2 + np.asarray(casimir_gradient) / _UN)


def synthetic_records(z_piezo, R, v0, z0, cal_const, casimir=None, voltages=MEASURED_VOLTAGES,
                      noise=0.0, rng=None, set_id=1):
    """Frequency-shift records generated from the forward model.

    Parameters
    ----------
    z_piezo : array_like
        Piezo positions (nm).
    casimir : callable, optional
        F'(a) in uN/m; defaults to zero.
    noise : float
        Standard deviation of Gaussian noise added to every shift (rad/s).
    rng : numpy.random.Generator, optional
    """
    rng = np.random.default_rng(rng)
    z = np.asarray(z_piezo, dtype=float)
    a = z + z0
    xp = electrostatic_gradient_factor(a, R)
    fc = np.zeros_like(a) if casimir is None else np.array([casimir(x) for x in a], dtype=float)
    v = np.asarray(voltages, dtype=float)
    dw = -cal_const * (xp[:, None] * (v[None, :] - v0) ** 2 + fc[:, None] / _UN)
    if noise > 0.0:
        dw = dw + rng.normal(0.0, noise, dw.shape)
    return [ShiftRecord(float(z[i]), float(v[j]), float(dw[i, j]), set_id, j)
            for i in range(len(z)) for j in range(len(v))]


def _group(records):
    """(z_piezo, V matrix, d_omega matrix) with one row per piezo position."""
    by_z = defaultdict(list)
    for r in records:
        by_z[r.z_piezo].append(r)
    zs = sorted(by_z)
    sizes = {len(by_z[z]) for z in zs}
    if len(sizes) != 1:
        # ragged: pad is not meaningful, return lists instead
        return zs, [np.array([r.applied_voltage for r in by_z[z]]) for z in zs], \
            [np.array([r.delta_omega for r in by_z[z]]) for z in zs]
    v = np.array([[r.applied_voltage for r in by_z[z]] for z in zs])
    w = np.array([[r.delta_omega for r in by_z[z]] for z in zs])
    return zs, v, w


def _parabolas(v_rows, w_rows, sigma):
    """Vertex, curvature and curvature error of d_omega = c0 + c1 V + c2 V^2 per row."""
    n = len(v_rows)
    vert, curv, curv_err, vert_err = (np.empty(n) for _ in range(4))
    for i in range(n):
        v, w = np.asarray(v_rows[i]), np.asarray(w_rows[i])
        if np.unique(v).size < 3:
            raise CalibrationError("need at least 3 distinct voltages per separation")
        vm = v.mean()
        A = np.vander(v - vm, 3, increasing=True)
        coef, *_ = np.linalg.lstsq(A, w, rcond=None)
        cov = np.linalg.inv(A.T @ A) * sigma ** 2
        c0, c1, c2 = coef
        curv[i] = c2
        curv_err[i] = math.sqrt(cov[2, 2])
        vert[i] = vm - c1 / (2.0 * c2)
        # delta-method error of the vertex -c1 / (2 c2)
        g = np.array([0.0, -1.0 / (2.0 * c2), c1 / (2.0 * c2 * c2)])
        vert_err[i] = math.sqrt(max(g @ cov @ g, 0.0))
    return vert, vert_err, curv, curv_err


def fit_calibration(records, R, sigma=PLL_RESOLUTION, max_iter=200):
    """Recover V0, z0 and C from frequency-shift records of one measurement set.

    Each piezo position is fitted by a parabola in V. The curvatures
    kappa(z) = -C X'(z + z0, R) are then fitted globally for (z0, C) by
    Levenberg-Marquardt least squares, weighting each curvature by its
    parabola-fit error for uniform shift errors ``sigma``. V0 is the
    weighted mean of the vertices, which are also fitted to d + theta a.

    Raises
    ------
    CalibrationError
        Fewer than 10 positions or 3 distinct voltages per position, or the
        global fit fails to converge within ``max_iter`` iterations.
    """
    zs, v_rows, w_rows = _group(records)
    if len(zs) < 10:
        raise CalibrationError("need at least 10 separations")
    z = np.asarray(zs, dtype=float)
    vert, vert_err, kappa, kappa_err = _parabolas(v_rows, w_rows, sigma)
    if np.any(kappa >= 0.0):
        raise CalibrationError("non-negative parabola curvature; electrostatic response missing")
    wts = 1.0 / np.where(kappa_err > 0.0, kappa_err, 1.0)

    def residuals(p):
        z0, c = p
        return (kappa + c * electrostatic_gradient_factor(z + z0, R)) * wts

    # starting point from the small a/R limit X' ~ pi eps0 R / a^2, in which
    # 1/sqrt(-kappa) is linear in z with root at z = -z0
    slope, icpt = np.polyfit(z, 1.0 / np.sqrt(-kappa), 1)
    start = [icpt / slope, 1.0 / (slope * slope * math.pi * EPS0 * R * 1e-9) * 1e-18]
    if not (slope > 0.0 and np.all(z + start[0] > 0.0) and np.all(z + start[0] < R)):
        raise CalibrationError("no admissible starting point for z0")

    sol = least_squares(residuals, x0=start, method="lm", x_scale=[1.0, start[1]],
                        max_nfev=max_iter * 3, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if sol.status <= 0:
        raise CalibrationError(f"global calibration fit did not converge: {sol.message}")
    z0, c = sol.x
    J = sol.jac
    try:
        cov = np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError as exc:
        raise CalibrationError("rank-deficient curvature fit") from exc
    chi2 = float(np.sum(sol.fun ** 2))

    a = z + z0
    # vertex errors vanish for noise-free data; fall back to uniform weights
    sw = 1.0 / vert_err if np.all(vert_err > 0.0) else np.ones_like(vert)
    v0 = float(np.sum(sw ** 2 * vert) / np.sum(sw ** 2))
    v0_err = float(math.sqrt(1.0 / np.sum(sw ** 2))) if np.all(vert_err > 0.0) else 0.0
    (theta, d), lcov = np.polyfit(a, vert, 1, w=sw, cov="unscaled")
    if not np.all(vert_err > 0.0):
        lcov = np.zeros((2, 2))
    return CalibrationFit(
        v0, v0_err, float(z0), float(math.sqrt(cov[0, 0])), float(c), float(math.sqrt(cov[1, 1])),
        (float(d), float(theta)), (float(math.sqrt(lcov[1, 1])), float(math.sqrt(lcov[0, 0]))),
        R, z, vert, kappa, chi2,
    )


@dataclass(frozen=True)
class ExtractedGradient:
    a: float
    gradient: float
    err_gradient: float
    err_a: float = 0.0


def extract_casimir(records, fit, sigma=PLL_RESOLUTION):
    """Casimir gradients F' = -d_omega / C - X'(a, R)(V - V0)^2 per piezo position.

    Each position's 21 values are averaged; the random error is the
    standard error of the mean (1 sigma, taken as the 67% level), combined
    in quadrature with the systematic error sigma / C of the PLL. Gradients
    are in uN/m; ``err_a`` carries the z0 error.
    """
    R = fit.radius
    if not math.isfinite(R):
        raise ValueError("calibration carries no sphere radius")
    zs, v_rows, w_rows = _group(records)
    out = []
    sys_err = sigma / fit.cal_const * _UN
    for z, v, w in zip(zs, v_rows, w_rows):
        a = z + fit.z0
        xp = electrostatic_gradient_factor(a, R)
        f = (-np.asarray(w) / fit.cal_const - xp * (np.asarray(v) - fit.v0) ** 2) * _UN
        rand = float(np.std(f, ddof=1) / math.sqrt(f.size)) if f.size > 1 else 0.0
        out.append(ExtractedGradient(float(a), float(f.mean()), math.hypot(rand, sys_err), fit.z0_err))
    return out


def average_sets(sets, grid):
    """Average several extracted series on a common separation grid (nm).

    Each set is linearly interpolated onto ``grid``; gradients and total
    errors are averaged arithmetically, as are the separation errors.
    """
    grid = np.asarray(grid, dtype=float)
    g, e, ea = [], [], []
    for s in sets:
        a = np.array([p.a for p in s])
        if grid.min() < a.min() - 1e-9 or grid.max() > a.max() + 1e-9:
            raise ValueError("grid extends beyond a measured set")
        g.append(np.interp(grid, a, [p.gradient for p in s]))
        e.append(np.interp(grid, a, [p.err_gradient for p in s]))
        ea.append(np.interp(grid, a, [p.err_a for p in s]))
    g, e, ea = (np.mean(x, axis=0) for x in (g, e, ea))
    return [ExtractedGradient(float(x), float(y), float(z), float(w)) for x, y, z, w in zip(grid, g, e, ea)]


# ---------------------------------------------------------------- I/O

SHIFT_COLUMNS = ("z_piezo_nm", "voltage_v", "delta_omega_rad_s", "set_id", "run_id")


def read_shifts(path):
    """Records of ``shifts.csv`` grouped by set id."""
    sets = defaultdict(list)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(SHIFT_COLUMNS) <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns {', '.join(SHIFT_COLUMNS)}")
        for row in reader:
            sid = int(row["set_id"])
            sets[sid].append(ShiftRecord(float(row["z_piezo_nm"]), float(row["voltage_v"]),
                                         float(row["delta_omega_rad_s"]), sid, int(row["run_id"])))
    return dict(sorted(sets.items()))


def write_shifts(path, records):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SHIFT_COLUMNS)
        for r in records:
            w.writerow([repr(r.z_piezo), repr(r.applied_voltage), repr(r.delta_omega), r.set_id, r.run_id])


def write_calibration(path, fits):
    """JSON with one entry per set; a single fit is written at top level."""
    if isinstance(fits, CalibrationFit):
        doc = fits.to_dict()
    else:
        doc = {"schema_version": SCHEMA_VERSION,
               "sets": {str(k): f.to_dict() for k, f in fits.items()}}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_calibration(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "sets" in doc:
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError("unsupported calibration schema")
        return {int(k): CalibrationFit.from_dict(v) for k, v in doc["sets"].items()}
    return CalibrationFit.from_dict(doc)


__all__ = [
    "ShiftRecord", "CalibrationFit", "CalibrationError", "ExtractedGradient", "PLL_RESOLUTION",
    "MEASURED_VOLTAGES", "electrostatic_gradient_factor", "frequency_shift_forward",
    "synthetic_records", "fit_calibration", "extract_casimir", "average_sets", "read_shifts",
    "write_shifts", "write_calibration", "read_calibration", "SHIFT_COLUMNS",
]
