"""Roughness correction and conservative theoretical bands for the force gradient."""
import warnings
from dataclasses import dataclass, field

from .lifshitz import SummationPolicy, gradient_finite_T, gradient_zero_T, require_converged
from .materials import gold_drude, silica
from .reflection import BoundarySpec


@dataclass(frozen=True)
class RoughnessParams:
    """rms roughness (nm) of the sphere and of the plate."""

    delta_sphere: float = 0.9
    delta_plate: float = 1.5

    def __post_init__(self):
        if self.delta_sphere < 0.0 or self.delta_plate < 0.0:
            raise ValueError("roughness amplitudes must be non-negative")

    def factor(self, a):
        """Multiplicative correction 1 + 10 (delta_s^2 + delta_g^2) / a^2."""
        if a <= 0.0:
            raise ValueError("separation must be positive")
        s = (self.delta_sphere ** 2 + self.delta_plate ** 2) / (a * a)
        if s > 0.01:
            warnings.warn("roughness is not small compared to the separation", stacklevel=3)
        return 1.0 + 10.0 * s


@dataclass(frozen=True)
class UncertaintyBudget:
    gap_err: float = 0.05
    mu_err: float = 0.01
    radius_err: float = 50.0
    optical_rel_err: float = 0.005
    pfa_lower_factor_enabled: bool = True

    def __post_init__(self):
        for name in ("gap_err", "mu_err", "radius_err", "optical_rel_err"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, 0.0, 0.0, False)


@dataclass(frozen=True)
class GradientBand:
    """Lower and upper theoretical force gradients (uN/m) at temperature ``center_T``.

    ``center`` is the roughness-corrected gradient for nominal parameters
    and ``provenance`` lists ``(step, lower, upper)`` after each widening.
    """

    lower: float
    upper: float
    center_T: float
    center: float = float("nan")
    provenance: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    @property
    def half_width(self):
        return 0.5 * (self.upper - self.lower)

    def contains(self, value):
        return self.lower <= value <= self.upper


def roughness_correct(value, rough, a):
    return value * rough.factor(a)


def _gradient(geom, plate, sphere, T, policy):
    if T == 0.0:
        res = gradient_zero_T(geom, plate, sphere, policy)
    else:
        res = gradient_finite_T(geom, plate, sphere, T, policy)
    return require_converged(res, geom.separation)


def build_band(geom, sheet, budget, T, policy=SummationPolicy(), substrate=None,
               sphere=None, rough=RoughnessParams(), freestanding=False):
    """Most conservative band for a graphene-coated plate facing the sphere.

    The upper boundary uses mu + mu_err and gap - gap_err, the lower one
    mu - mu_err and gap + gap_err (the gradient grows with mu and falls
    with the gap). Both are roughness corrected, then widened by the
    relative radius error and the optical-data error; the lower boundary is
    finally multiplied by (1 - a/R) when ``budget.pfa_lower_factor_enabled``.
    ``T = 0`` selects the zero-temperature gradient.
    """
    substrate = substrate or silica()
    sphere = sphere or gold_drude()
    a = geom.separation

    def plate(s):
        return BoundarySpec.freestanding(s) if freestanding else BoundarySpec.coated(substrate, s)

    hi_sheet = sheet.replace(gap=max(sheet.gap - budget.gap_err, 0.0),
                             chemical_potential=sheet.chemical_potential + budget.mu_err)
    lo_sheet = sheet.replace(gap=sheet.gap + budget.gap_err,
                             chemical_potential=max(sheet.chemical_potential - budget.mu_err, 0.0))
    f = rough.factor(a)
    center = f * _gradient(geom, plate(sheet), sphere, T, policy)
    if budget.gap_err == 0.0 and budget.mu_err == 0.0:
        upper = lower = center
    else:
        upper = f * _gradient(geom, plate(hi_sheet), sphere, T, policy)
        lower = f * _gradient(geom, plate(lo_sheet), sphere, T, policy)
    steps = [("sheet parameters + roughness", lower, upper)]
    dr = budget.radius_err / geom.sphere_radius
    upper, lower = upper * (1.0 + dr), lower * (1.0 - dr)
    steps.append(("sphere radius", lower, upper))
    upper, lower = upper * (1.0 + budget.optical_rel_err), lower * (1.0 - budget.optical_rel_err)
    steps.append(("optical data", lower, upper))
    if budget.pfa_lower_factor_enabled:
        lower *= 1.0 - a / geom.sphere_radius
        steps.append(("proximity force approximation", lower, upper))
    return GradientBand(lower, upper, T, center, tuple(steps))


__all__ = ["RoughnessParams", "UncertaintyBudget", "GradientBand", "roughness_correct",
           "build_band"]
