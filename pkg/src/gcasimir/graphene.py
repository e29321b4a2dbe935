"""Polarization tensor of a graphene sheet at imaginary frequencies.

Components are returned divided by hbar: ``pi00`` in 1/nm and ``pi`` in
1/nm^3, so that the reflection coefficients take their hbar-free form.
Wave numbers are in 1/nm, energies in eV and temperatures in K.
"""
import math
from dataclasses import dataclass

from ._core import kernels
from .constants import HBAR_C, K_B, VF_RATIO

#: relative/absolute tolerance used by the u-quadratures unless overridden
DEFAULT_TOL = 1e-9


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not meet its tolerance within the interval budget."""

    def __init__(self, what, status):
        reason = {1: "interval limit reached", 2: "roundoff detected"}.get(status, f"status {status}")
        super().__init__(f"{what}: {reason}")
        self.status = status


@dataclass(frozen=True)
class GrapheneSheet:
    """Dirac-model graphene characterized by gap, chemical potential and v_F/c."""

    gap: float = 0.0
    chemical_potential: float = 0.0
    fermi_velocity_ratio: float = VF_RATIO

    def __post_init__(self):
        if not (self.gap >= 0.0 and math.isfinite(self.gap)):
            raise ValueError("gap must be finite and >= 0")
        if not (self.chemical_potential >= 0.0 and math.isfinite(self.chemical_potential)):
            raise ValueError("chemical_potential must be finite and >= 0")
        if not 0.0 < self.fermi_velocity_ratio < 1.0:
            raise ValueError("fermi_velocity_ratio must lie in (0, 1)")

    @classmethod
    def pristine(cls, fermi_velocity_ratio=VF_RATIO):
        return cls(0.0, 0.0, fermi_velocity_ratio)

    def replace(self, **kw):
        args = dict(gap=self.gap, chemical_potential=self.chemical_potential,
                    fermi_velocity_ratio=self.fermi_velocity_ratio)
        args.update(kw)
        return GrapheneSheet(**args)


@dataclass(frozen=True)
class SpectralContext:
    """Frequency and wave-vector data for one evaluation point.

    Use :meth:`matsubara` or :meth:`at` rather than the raw constructor so
    that ``q`` and ``q_tilde`` are consistent.
    """

    l: int
    xi_energy: float
    kperp: float
    q: float
    q_tilde: float
    temperature: float

    @classmethod
    def at(cls, xi_energy, kperp, temperature=0.0, vf_ratio=VF_RATIO, l=-1):
        if xi_energy < 0.0 or kperp < 0.0:
            raise ValueError("xi_energy and kperp must be non-negative")
        zq = xi_energy / HBAR_C
        q = math.hypot(kperp, zq)
        qt = math.hypot(vf_ratio * kperp, zq)
        return cls(l, float(xi_energy), float(kperp), q, qt, float(temperature))

    @classmethod
    def matsubara(cls, l, temperature, kperp, vf_ratio=VF_RATIO):
        if l < 0 or temperature <= 0.0:
            raise ValueError("need l >= 0 and temperature > 0")
        xi = 2.0 * math.pi * K_B * temperature * l
        return cls.at(xi, kperp, temperature, vf_ratio, l=int(l))

    @property
    def zq(self):
        """xi / c in 1/nm."""
        return self.xi_energy / HBAR_C


@dataclass(frozen=True)
class PolarizationPair:
    pi00: float
    pi: float

    def scaled(self, factor):
        return PolarizationPair(self.pi00 * factor, self.pi * factor)


def psi(x):
    """Psi(x) = 2[x + (1 - x^2) arctan(1/x)], with Psi(0) = pi."""
    return kernels.psi(float(x))


def _check(what, status):
    if status:
        raise QuadratureError(what, status)


def pt_order0(ctx, sheet):
    """Zero-temperature, undoped part of the tensor (any gap)."""
    if ctx.q_tilde <= 0.0:
        raise ValueError("q_tilde must be positive (k_perp = xi = 0 is excluded)")
    return PolarizationPair(*kernels.order0(ctx.kperp, ctx.zq, sheet.gap, sheet.fermi_velocity_ratio))


def pt_thermal(ctx, sheet, tol=DEFAULT_TOL):
    """Temperature- and mu-dependent part of the tensor for l >= 1."""
    if ctx.temperature <= 0.0:
        raise ValueError("temperature must be positive")
    if ctx.xi_energy <= 0.0:
        raise ValueError("use pt_l0 at zero frequency")
    p00, p, st = kernels.thermal_exact(ctx.kperp, ctx.zq, ctx.temperature, sheet.gap,
                                       sheet.chemical_potential, sheet.fermi_velocity_ratio, tol)
    _check("thermal tensor", st)
    return PolarizationPair(p00, p)


def pt_exact(ctx, sheet, tol=DEFAULT_TOL):
    """Full finite-temperature tensor: order-0 plus thermal part, or the l = 0 form."""
    if ctx.xi_energy == 0.0:
        return pt_l0(ctx.kperp, sheet, ctx.temperature, tol)
    a = pt_order0(ctx, sheet)
    b = pt_thermal(ctx, sheet, tol)
    return PolarizationPair(a.pi00 + b.pi00, a.pi + b.pi)


def pt_l0(kperp, sheet, T, tol=DEFAULT_TOL):
    """Tensor at zero Matsubara frequency."""
    if kperp <= 0.0 or T <= 0.0:
        raise ValueError("need kperp > 0 and T > 0")
    p00, p, st = kernels.l0(kperp, T, sheet.gap, sheet.chemical_potential,
                            sheet.fermi_velocity_ratio, tol)
    _check("zero-frequency tensor", st)
    return PolarizationPair(p00, p)


def y_bracket(xi_energy, sheet, T, tol=DEFAULT_TOL):
    """Thermal term Y of the simplified l >= 1 tensor."""
    y, st = kernels.y_approx(xi_energy, T, sheet.gap, sheet.chemical_potential, tol)
    _check("Y integral", st)
    return y


def pt_approx_lgeq1(ctx, sheet, tol=DEFAULT_TOL):
    """Simplified l >= 1 tensor, valid when xi_1 >> v_F / (2a)."""
    if ctx.xi_energy <= 0.0 or ctx.temperature <= 0.0:
        raise ValueError("need xi > 0 and T > 0")
    ypsi = psi(sheet.gap / ctx.xi_energy) + y_bracket(ctx.xi_energy, sheet, ctx.temperature, tol)
    return PolarizationPair(*kernels.approx(ctx.kperp, ctx.zq, ypsi))


def pt_zero_temperature(xi_energy, kperp, sheet):
    """Tensor at T = 0 for any gap and chemical potential."""
    if xi_energy < 0.0 or kperp <= 0.0:
        raise ValueError("need xi_energy >= 0 and kperp > 0")
    return PolarizationPair(*kernels.zero_t(kperp, xi_energy / HBAR_C, sheet.gap,
                                            sheet.chemical_potential, sheet.fermi_velocity_ratio))


def chemical_potential_from_concentration(n_bar, vf_ratio=VF_RATIO, n_err=None):
    """mu = hbar v_F sqrt(pi n) for areal density ``n_bar`` in cm^-2.

    Returns mu in eV, or ``(mu, mu_err)`` when ``n_err`` is given (linear
    error propagation, d mu / mu = d n / (2 n)).
    """
    if n_bar < 0.0:
        raise ValueError("density must be non-negative")
    n_nm2 = n_bar * 1e-14
    mu = HBAR_C * vf_ratio * math.sqrt(math.pi * n_nm2)
    if n_err is None:
        return mu
    err = 0.0 if n_bar == 0.0 else 0.5 * mu * n_err / n_bar
    return mu, err
