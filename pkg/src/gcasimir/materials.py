"""Dielectric permittivities of bulk boundary materials at imaginary frequency.

All frequencies are photon energies ``zeta = hbar * xi`` in eV.
"""
import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .constants import DRUDE_STATIC_CAP, HBAR_C


class Kind(str, Enum):
    VACUUM = "vacuum"
    DRUDE = "drude"
    PLASMA = "plasma"
    OSCILLATOR = "oscillator"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class Oscillator:
    strength: float
    resonance_energy: float
    damping_energy: float = 0.0


@dataclass(frozen=True)
class PermittivityModel:
    """Rule producing eps(i xi) for one bulk material.

    Parameters
    ----------
    kind : Kind
        Model family.
    plasma_energy, relaxation_energy : float
        hbar omega_p and hbar gamma in eV, metal kinds only.
    oscillators : tuple of Oscillator
        Lorentz oscillators for the dielectric kind.
    table : tuple of (float, float)
        ``(xi_energy, eps)`` nodes for the tabulated kind, xi ascending.
    """

    kind: Kind
    plasma_energy: float = 0.0
    relaxation_energy: float = 0.0
    oscillators: tuple = ()
    table: tuple = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (Kind.DRUDE, Kind.PLASMA):
            if not self.plasma_energy > 0.0:
                raise ValueError("metal models need a positive plasma energy")
            if kind is Kind.DRUDE and not self.relaxation_energy > 0.0:
                raise ValueError("Drude model needs a positive relaxation energy")
        elif kind is Kind.OSCILLATOR:
            if not self.oscillators:
                raise ValueError("oscillator model needs at least one oscillator")
            osc = tuple(o if isinstance(o, Oscillator) else Oscillator(*o) for o in self.oscillators)
            for o in osc:
                if o.strength < 0 or o.resonance_energy <= 0 or o.damping_energy < 0:
                    raise ValueError(f"invalid oscillator {o}")
            object.__setattr__(self, "oscillators", osc)
        elif kind is Kind.TABULATED:
            if len(self.table) < 2:
                raise ValueError("tabulated model needs at least two nodes")
            tab = tuple((float(x), float(e)) for x, e in self.table)
            xs = [x for x, _ in tab]
            if any(x <= 0 for x in xs) or any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValueError("table frequencies must be positive and strictly increasing")
            if any(e < 1.0 for _, e in tab):
                raise ValueError("tabulated permittivities must be >= 1")
            object.__setattr__(self, "table", tab)
            object.__setattr__(self, "_logx", np.log(xs))
            object.__setattr__(self, "_loge", np.log([e for _, e in tab]))

    @classmethod
    def vacuum(cls):
        return cls(Kind.VACUUM, name="vacuum")

    @classmethod
    def drude(cls, plasma_energy, relaxation_energy, name="drude"):
        return cls(Kind.DRUDE, plasma_energy, relaxation_energy, name=name)

    @classmethod
    def plasma(cls, plasma_energy, name="plasma"):
        return cls(Kind.PLASMA, plasma_energy, name=name)

    @classmethod
    def oscillator(cls, oscillators, name="oscillator"):
        return cls(Kind.OSCILLATOR, oscillators=tuple(oscillators), name=name)

    @classmethod
    def tabulated(cls, table, name="tabulated"):
        return cls(Kind.TABULATED, table=tuple(table), name=name)

    @classmethod
    def from_csv(cls, path, name=None):
        """Load a two-column ``xi_ev, eps`` table."""
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"xi_ev", "eps"} <= set(reader.fieldnames):
                raise ValueError(f"{path}: expected columns xi_ev, eps")
            for row in reader:
                rows.append((float(row["xi_ev"]), float(row["eps"])))
        return cls.tabulated(rows, name=name or str(path))

    @property
    def is_metal(self):
        return self.kind in (Kind.DRUDE, Kind.PLASMA)


def eps_at_imaginary_frequency(model, xi_energy):
    """Permittivity eps(i xi) of ``model`` at photon energy ``xi_energy`` (eV).

    At zero frequency the Drude model returns ``DRUDE_STATIC_CAP`` and the
    plasma model ``inf``.
    """
    x = float(xi_energy)
    if not math.isfinite(x):
        raise ValueError("xi_energy must be finite")
    if x < 0.0:
        raise ValueError("xi_energy must be non-negative")
    kind = model.kind
    if kind is Kind.VACUUM:
        return 1.0
    if kind is Kind.DRUDE:
        if x == 0.0:
            return DRUDE_STATIC_CAP
        return min(1.0 + model.plasma_energy ** 2 / (x * (x + model.relaxation_energy)), DRUDE_STATIC_CAP)
    if kind is Kind.PLASMA:
        if x == 0.0:
            return math.inf
        return 1.0 + (model.plasma_energy / x) ** 2
    if kind is Kind.OSCILLATOR:
        eps = 1.0
        for o in model.oscillators:
            w = o.resonance_energy
            eps += o.strength / (1.0 + (x / w) ** 2 + o.damping_energy * x / (w * w))
        return eps
    # tabulated: log-log interpolation, clamped beyond the end nodes
    if x <= model.table[0][0]:
        return model.table[0][1]
    if x >= model.table[-1][0]:
        return model.table[-1][1]
    return float(np.exp(np.interp(math.log(x), model._logx, model._loge)))


def eps_k0sq(model, xi_energy, zero_mode_te="drude"):
    """eps(i xi) * (xi/c)^2 in 1/nm^2, with exact zero-frequency limits.

    This is the combination entering k^2 = k_perp^2 + eps (xi/c)^2. For
    metals at xi = 0 it is 0 under the Drude convention and
    (omega_p/c)^2 under the plasma convention (``zero_mode_te``).
    """
    x = float(xi_energy)
    kind = model.kind
    if kind is Kind.PLASMA:
        return (x * x + model.plasma_energy ** 2) / HBAR_C ** 2
    if kind is Kind.DRUDE:
        if x == 0.0:
            return (model.plasma_energy / HBAR_C) ** 2 if zero_mode_te == "plasma" else 0.0
        wp2 = model.plasma_energy ** 2
        return (x * x + wp2 * x / (x + model.relaxation_energy)) / HBAR_C ** 2
    return eps_at_imaginary_frequency(model, x) * (x / HBAR_C) ** 2


def gold_drude():
    return PermittivityModel.drude(9.0, 0.035, name="Au (Drude)")


def gold_plasma():
    return PermittivityModel.plasma(9.0, name="Au (plasma)")


def silica():
    """Two-oscillator SiO2 model (UV and IR resonances), eps(0) = 3.80."""
    return PermittivityModel.oscillator(
        [Oscillator(1.098, 13.38), Oscillator(1.703, 0.1237)], name="SiO2"
    )
