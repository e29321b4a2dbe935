"""TM/TE reflection coefficients of bare, graphene-coated and freestanding boundaries."""
import math
from dataclasses import dataclass
from enum import Enum

from ._core import APPROX, BARE, EXACT, GRAPHENE, IDEAL, ORDER0, ZERO_T, kernels
from .constants import DRUDE_STATIC_CAP
from .graphene import (DEFAULT_TOL, GrapheneSheet, QuadratureError, SpectralContext, psi,
                       pt_exact, y_bracket)
from .materials import PermittivityModel, eps_at_imaginary_frequency, eps_k0sq

TENSOR_MODES = {"exact": EXACT, "approx": APPROX, "zero_t": ZERO_T, "order0": ORDER0}


class BoundaryKind(str, Enum):
    BARE = "bare"
    COATED = "coated"
    FREESTANDING = "freestanding"
    IDEAL = "ideal"


@dataclass(frozen=True)
class BoundarySpec:
    """One planar boundary: a substrate half-space, optionally carrying a sheet.

    ``IDEAL`` is a debugging reflector with r_TM = r_TE = 1.
    """

    kind: BoundaryKind
    substrate: PermittivityModel = None
    sheet: GrapheneSheet = None

    def __post_init__(self):
        kind = BoundaryKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is BoundaryKind.BARE and self.substrate is None:
            raise ValueError("bare half-space needs a substrate")
        if kind is BoundaryKind.COATED and (self.substrate is None or self.sheet is None):
            raise ValueError("coated half-space needs a substrate and a sheet")
        if kind is BoundaryKind.FREESTANDING:
            if self.sheet is None:
                raise ValueError("freestanding graphene needs a sheet")
            if self.substrate is not None:
                raise ValueError("freestanding graphene has no substrate")

    @classmethod
    def bare(cls, model):
        return cls(BoundaryKind.BARE, substrate=model)

    @classmethod
    def coated(cls, model, sheet):
        return cls(BoundaryKind.COATED, substrate=model, sheet=sheet)

    @classmethod
    def freestanding(cls, sheet):
        return cls(BoundaryKind.FREESTANDING, sheet=sheet)

    @classmethod
    def ideal(cls):
        return cls(BoundaryKind.IDEAL)

    @property
    def has_sheet(self):
        return self.sheet is not None

    @property
    def effective_substrate(self):
        if self.kind is BoundaryKind.FREESTANDING:
            return PermittivityModel.vacuum()
        return self.substrate

    def side(self, xi_energy, tensor="exact", ypsi=0.0, zero_mode_te="drude"):
        """Packed boundary description consumed by the numerical kernels."""
        if self.kind is BoundaryKind.IDEAL:
            return (IDEAL, 1.0, 0.0, 0.0, 0.0, 0.0, 0, 0.0)
        model = self.effective_substrate
        eps = min(eps_at_imaginary_frequency(model, xi_energy), DRUDE_STATIC_CAP)
        ek2 = eps_k0sq(model, xi_energy, zero_mode_te)
        if not self.has_sheet:
            return (BARE, eps, ek2, 0.0, 0.0, 0.0, 0, 0.0)
        s = self.sheet
        return (GRAPHENE, eps, ek2, s.gap, s.chemical_potential, s.fermi_velocity_ratio,
                TENSOR_MODES[tensor], float(ypsi))


def fresnel(ctx, model, zero_mode_te="drude"):
    """Fresnel (r_TM, r_TE) of a bare half-space.

    At zero frequency a Drude metal uses the capped permittivity for TM and,
    for TE, the convention selected by ``zero_mode_te`` (``"drude"`` gives
    r_TE = 0, ``"plasma"`` the plasma-model value).
    """
    eps = min(eps_at_imaginary_frequency(model, ctx.xi_energy), DRUDE_STATIC_CAP)
    ek2 = eps_k0sq(model, ctx.xi_energy, zero_mode_te)
    kk = math.sqrt(ctx.kperp ** 2 + ek2)
    q = ctx.q
    rtm = (eps * q - kk) / (eps * q + kk)
    rte = (ctx.zq ** 2 - ek2) / ((q + kk) ** 2)
    return rtm, rte


def graphene_dressed(ctx, boundary, pt, zero_mode_te="drude"):
    """(R_TM, R_TE) of a sheet on ``boundary``'s substrate for the tensor ``pt``."""
    model = boundary.effective_substrate
    eps = min(eps_at_imaginary_frequency(model, ctx.xi_energy), DRUDE_STATIC_CAP)
    ek2 = eps_k0sq(model, ctx.xi_energy, zero_mode_te)
    kk = math.sqrt(ctx.kperp ** 2 + ek2)
    k2 = ctx.kperp ** 2
    q = ctx.q
    g = q * kk * pt.pi00
    rtm = (k2 * (eps * q - kk) + g) / (k2 * (eps * q + kk) + g)
    nte = k2 * (ctx.zq ** 2 - ek2) / (q + kk)
    rte = (nte - pt.pi) / (k2 * (q + kk) + pt.pi)
    return rtm, rte


def reflection(ctx, boundary, tensor="exact", tol=DEFAULT_TOL, zero_mode_te="drude"):
    """(r_TM, r_TE) of any boundary at ``ctx`` using the kernels directly."""
    side = boundary.side(ctx.xi_energy, tensor, 0.0, zero_mode_te)
    if tensor == "approx" and boundary.has_sheet and ctx.xi_energy > 0.0:
        s = boundary.sheet
        ypsi = psi(s.gap / ctx.xi_energy) + y_bracket(ctx.xi_energy, s, ctx.temperature, tol)
        side = boundary.side(ctx.xi_energy, tensor, ypsi, zero_mode_te)
    rtm, rte, st = kernels.coefficients(side, ctx.kperp, ctx.q, ctx.zq, ctx.temperature, tol)
    if st:
        raise QuadratureError("reflection coefficient", st)
    return rtm, rte


def te_zero_mode_magnitude(boundary, T, kperp_grid, tol=DEFAULT_TOL):
    """max |R_TE(0, k_perp, T)| over ``kperp_grid`` for a graphene-bearing boundary."""
    if not boundary.has_sheet:
        raise ValueError("boundary carries no graphene sheet")
    worst = 0.0
    for k in kperp_grid:
        ctx = SpectralContext.matsubara(0, T, float(k), boundary.sheet.fermi_velocity_ratio)
        _, rte = graphene_dressed(ctx, boundary, pt_exact(ctx, boundary.sheet, tol))
        worst = max(worst, abs(rte))
    return worst


__all__ = [
    "BoundaryKind", "BoundarySpec", "fresnel", "graphene_dressed", "reflection",
    "te_zero_mode_magnitude", "TENSOR_MODES",
]
