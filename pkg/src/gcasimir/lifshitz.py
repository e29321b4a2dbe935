"""Sphere-plate force gradients and plate-plate pressures from the Lifshitz formula.

The sphere-plate gradient uses the proximity force approximation,
F'(a, T) = 2 pi R P(a, T), with the plate-plate pressure P written as a
Matsubara sum of k_perp integrals. Results are positive for attraction
and reported in uN/m (gradients) or Pa (pressures).
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .constants import EV_NM2_TO_UN_PER_M, EV_NM3_TO_PA, HBAR_C, K_B
from .graphene import QuadratureError, psi, y_bracket
from .materials import PermittivityModel
from .quadrature import adaptive
from .reflection import BoundarySpec

# Outer frequency range of the zero-temperature integral (eV) and the
# number of log-spaced panels per decade.
ZETA_MIN, ZETA_MAX = 1e-5, 1e3
_PANELS_PER_DECADE = 1


@dataclass(frozen=True)
class SystemGeometry:
    """Sphere radius and closest separation, both in nm."""

    sphere_radius: float
    separation: float

    def __post_init__(self):
        if not 0.0 < self.separation < self.sphere_radius:
            raise ValueError("need 0 < separation < sphere_radius")
        if self.separation / self.sphere_radius > 0.1:
            warnings.warn("a/R > 0.1: proximity force approximation is unreliable", stacklevel=2)

    def at(self, separation):
        return SystemGeometry(self.sphere_radius, separation)


@dataclass(frozen=True)
class SummationPolicy:
    """Convergence controls.

    Parameters
    ----------
    rel_tol : float
        Target relative accuracy of the Matsubara sum or frequency integral.
    l_max_cap : int
        Hard limit on the number of Matsubara terms.
    quadrature_tol : float
        Relative tolerance of each k_perp integral.
    tensor : {"exact", "approx"}
        Graphene tensor at l >= 1: full form or the simplified xi >> v_F k form.
    zero_mode_te_metal : {"drude", "plasma"}
        Zero-frequency TE convention for Drude metals.
    """

    rel_tol: float = 1e-8
    l_max_cap: int = 5000
    quadrature_tol: float = 1e-9
    tensor: str = "exact"
    zero_mode_te_metal: str = "drude"

    def __post_init__(self):
        for name in ("rel_tol", "quadrature_tol"):
            v = getattr(self, name)
            if not 0.0 < v < 1e-3:
                raise ValueError(f"{name} must lie in (0, 1e-3)")
        if self.l_max_cap < 1:
            raise ValueError("l_max_cap must be positive")
        if self.tensor not in ("exact", "approx"):
            raise ValueError("tensor must be 'exact' or 'approx'")
        if self.zero_mode_te_metal not in ("drude", "plasma"):
            raise ValueError("zero_mode_te_metal must be 'drude' or 'plasma'")

    def replace(self, **kw):
        d = dict(rel_tol=self.rel_tol, l_max_cap=self.l_max_cap, quadrature_tol=self.quadrature_tol,
                 tensor=self.tensor, zero_mode_te_metal=self.zero_mode_te_metal)
        d.update(kw)
        return SummationPolicy(**d)


@dataclass(frozen=True)
class GradientResult:
    """Force gradient (uN/m) or pressure (Pa) with its error estimate.

    ``zero_mode`` is the l = 0 contribution (zero for T = 0 results) and
    ``l_used`` the number of Matsubara terms (0 for T = 0 results).
    """

    value: float
    achieved_error: float
    l_used: int
    converged: bool = True
    zero_mode: float = 0.0


class ConvergenceError(RuntimeError):
    """A Matsubara sum or frequency integral missed its tolerance."""


def require_converged(result, a):
    """Return ``result.value``, raising :class:`ConvergenceError` if it did not converge."""
    if not result.converged:
        raise ConvergenceError(f"no convergence at a = {a:g} nm (after {result.l_used} terms)")
    return result.value


def _as_boundary(b):
    if isinstance(b, BoundarySpec):
        return b
    if isinstance(b, PermittivityModel):
        return BoundarySpec.bare(b)
    raise TypeError(f"expected BoundarySpec or PermittivityModel, got {type(b).__name__}")


def _side(boundary, zeta, T, mode, policy):
    ypsi = 0.0
    if mode == "approx" and boundary.has_sheet and zeta > 0.0:
        ypsi = psi(boundary.sheet.gap / zeta) + y_bracket(zeta, boundary.sheet, T, policy.quadrature_tol)
    return boundary.side(zeta, mode, ypsi, policy.zero_mode_te_metal)


def _term(zeta, a, T, b1, b2, mode, policy, tm_only=False):
    tm, te, st = kernels.term_integrals(zeta, a, T, _side(b1, zeta, T, mode, policy),
                                        _side(b2, zeta, T, mode, policy), policy.quadrature_tol)
    if st:
        raise QuadratureError(f"k-integral at xi = {zeta:.6g} eV, a = {a:.6g} nm", st)
    return tm if tm_only else tm + te


def matsubara_sum(a, T, b1, b2, policy, mode=None, tm_only=False):
    """Sum' over l of the k_perp integrals (1/nm^3).

    Returns ``(total, zero_term, l_used, converged, tail)`` where
    ``zero_term`` already carries the factor 1/2.
    """
    if T <= 0.0:
        raise ValueError("temperature must be positive")
    mode = mode or policy.tensor
    b1, b2 = _as_boundary(b1), _as_boundary(b2)
    step = 2.0 * math.pi * K_B * T
    total = 0.0
    zero = 0.0
    last = []
    tail = math.inf
    for l in range(policy.l_max_cap + 1):
        t = _term(step * l, a, T, b1, b2, mode, policy, tm_only)
        if l == 0:
            t *= 0.5
            zero = t
        total += t
        last = (last + [t])[-3:]
        if l >= 3:
            tail = _geometric_tail(last)
            if tail + policy.quadrature_tol * abs(total) <= policy.rel_tol * abs(total):
                return total, zero, l + 1, True, tail
    return total, zero, policy.l_max_cap + 1, False, tail


def _geometric_tail(last):
    """Tail estimate sum_{j>l} t_j from the last three terms, assuming geometric decay."""
    t0, t1, t2 = last
    if t2 == 0.0:
        return 0.0
    rho = max(t1 / t0 if t0 else math.inf, t2 / t1 if t1 else math.inf)
    if not 0.0 <= rho < 1.0:
        return math.inf
    return abs(t2) * rho / (1.0 - rho)


def gradient_finite_T(geom, boundary_plate, sphere_material, T, policy=SummationPolicy(), tensor=None):
    """Sphere-plate force gradient F'(a, T) in uN/m.

    ``tensor`` overrides ``policy.tensor``; ``"zero_t"`` inserts the
    zero-temperature graphene tensor into the Matsubara sum (implicit
    thermal effect only).
    """
    a, R = geom.separation, geom.sphere_radius
    total, zero, n, ok, tail = matsubara_sum(a, T, boundary_plate, sphere_material, policy, tensor)
    scale = 2.0 * K_B * T * R * EV_NM2_TO_UN_PER_M
    value = scale * total
    err = scale * (tail + policy.quadrature_tol * abs(total)) if ok else math.inf
    return GradientResult(value, err, n, ok, scale * zero)


def zero_temperature_integral(a, b1, b2, policy, tm_only=False):
    """Integral over zeta (eV) of the k_perp integrals with T = 0 tensors.

    Returns ``(value, error, status)`` in eV/nm^3.
    """
    b1, b2 = _as_boundary(b1), _as_boundary(b2)

    def f_log(t):
        z = math.exp(t)
        return (z * _term(z, a, 1.0, b1, b2, "zero_t", policy, tm_only),)

    def f_lin(z):
        return (_term(z, a, 1.0, b1, b2, "zero_t", policy, tm_only),)

    decades = int(round(math.log10(ZETA_MAX / ZETA_MIN))) * _PANELS_PER_DECADE
    pts = [float(x) for x in np.linspace(math.log(ZETA_MIN), math.log(ZETA_MAX), decades + 1)]
    eps_rel = max(policy.rel_tol, 10.0 * policy.quadrature_tol)
    res, err, st = adaptive(f_log, pts, 1, 0.0, eps_rel)
    # the [0, ZETA_MIN] panel is tiny; it only needs absolute accuracy
    head, herr, hst = adaptive(f_lin, [0.0, ZETA_MIN], 1, eps_rel * abs(res[0]), eps_rel)
    return res[0] + head[0], err[0] + herr[0], max(st, hst)


def gradient_zero_T(geom, boundary_plate, sphere_material, policy=SummationPolicy()):
    """Sphere-plate force gradient F'(a, 0) in uN/m."""
    val, err, st = zero_temperature_integral(geom.separation, boundary_plate, sphere_material, policy)
    scale = geom.sphere_radius / math.pi * EV_NM2_TO_UN_PER_M
    return GradientResult(scale * val, scale * err, 0, st == 0, 0.0)


def thermal_correction(geom, boundary, sphere_material, T, policy=SummationPolicy()):
    """Absolute (uN/m) and relative thermal correction F'(a,T) - F'(a,0)."""
    ft = gradient_finite_T(geom, boundary, sphere_material, T, policy).value
    f0 = gradient_zero_T(geom, boundary, sphere_material, policy).value
    return ft - f0, (ft - f0) / f0


def thermal_correction_implicit(geom, boundary, sphere_material, T, policy=SummationPolicy()):
    """Relative thermal correction with the T = 0 tensor inside the Matsubara sum."""
    ft = gradient_finite_T(geom, boundary, sphere_material, T, policy, tensor="zero_t").value
    f0 = gradient_zero_T(geom, boundary, sphere_material, policy).value
    return (ft - f0) / f0


def pressure_plate_plate(boundary_1, boundary_2, a, T, policy=SummationPolicy(), tm_only=False):
    """Casimir pressure between two plates, ``(total, zero_mode)`` in Pa.

    ``T = 0`` selects the zero-temperature frequency integral, for which the
    zero-mode share is 0.
    """
    if a <= 0.0:
        raise ValueError("separation must be positive")
    if T == 0.0:
        val, _, _ = zero_temperature_integral(a, boundary_1, boundary_2, policy, tm_only)
        return val / (2.0 * math.pi ** 2) * EV_NM3_TO_PA, 0.0
    total, zero, _, _, _ = matsubara_sum(a, T, boundary_1, boundary_2, policy, tm_only=tm_only)
    scale = K_B * T / math.pi * EV_NM3_TO_PA
    return scale * total, scale * zero


def zero_mode_fraction(boundary_1, boundary_2, a, T, policy=SummationPolicy()):
    total, zero = pressure_plate_plate(boundary_1, boundary_2, a, T, policy)
    return zero / total


def probe_zero_mode_shares(boundary_1, boundary_2, T, policy=SummationPolicy(),
                           a_min_um=0.05, a_max_um=20.0, n_probe=41):
    """l = 0 share of the plate-plate pressure on a log grid of separations (um)."""
    grid = np.geomspace(a_min_um, a_max_um, n_probe)
    share = np.array([zero_mode_fraction(boundary_1, boundary_2, 1e3 * x, T, policy) for x in grid])
    return grid, share


def thermal_regime_threshold(boundary_1, boundary_2, T, fraction, policy=SummationPolicy(),
                             probe=None, rel_width=0.01):
    """Smallest separation (um) beyond which the l = 0 term carries ``fraction`` of P.

    The share is probed on a log grid over [0.05, 20] um (or the grid/share
    pair passed as ``probe``); the last crossing is refined by bisection in
    log a until the bracket is narrower than ``rel_width`` relative. A
    warning is issued if the share is not monotone on the probe grid.
    """
    if not 0.5 < fraction < 1.0:
        raise ValueError("fraction must lie in (0.5, 1)")
    grid, share = probe if probe is not None else probe_zero_mode_shares(boundary_1, boundary_2, T, policy)
    if np.any(np.diff(share) < 0.0):
        warnings.warn("zero-mode share is not monotone on the probe grid", stacklevel=2)
    below = np.flatnonzero(share < fraction)
    if below.size == 0 or below[-1] == len(grid) - 1:
        raise ValueError(f"no crossing of {fraction:.3g} within [{grid[0]:g}, {grid[-1]:g}] um")
    i = below[-1]
    lo, hi = grid[i], grid[i + 1]
    while hi / lo - 1.0 > rel_width:
        mid = math.sqrt(lo * hi)
        if zero_mode_fraction(boundary_1, boundary_2, 1e3 * mid, T, policy) >= fraction:
            hi = mid
        else:
            lo = mid
    return math.sqrt(lo * hi)


def effective_temperatures(a, vf_ratio=1.0 / 300.0):
    """(T_eff, T_eff_gr) in K for separation ``a`` in nm."""
    if a <= 0.0:
        raise ValueError("separation must be positive")
    t_eff = HBAR_C / (2.0 * a) / K_B
    return t_eff, t_eff * vf_ratio
