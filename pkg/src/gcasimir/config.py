"""Run configuration: a TOML file merged onto built-in defaults.

Every section and key is validated; unknown keys are rejected so that a
typo cannot silently fall back to a default. ``--set section.key=value``
overrides are applied after the file is read; values are parsed as TOML
and fall back to plain strings.
"""
import copy
import math
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from .constants import VF_RATIO
from .corrections import RoughnessParams, UncertaintyBudget
from .graphene import GrapheneSheet
from .lifshitz import SummationPolicy
from .materials import Oscillator, PermittivityModel
from .reflection import BoundarySpec


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "temperature_k": 294.0,
    "geometry": {"radius_nm": 60350.0, "a_min_nm": 250.0, "a_max_nm": 700.0, "a_step_nm": 10.0},
    "graphene": {"gap_ev": 0.29, "mu_ev": 0.24, "vf_ratio": VF_RATIO},
    "plate": {"kind": "coated", "substrate": "sio2", "sphere": "au"},
    "material": {
        "au": {"kind": "drude", "plasma_energy_ev": 9.0, "relaxation_energy_ev": 0.035},
        "sio2": {"kind": "oscillator", "oscillators": [[1.098, 13.38, 0.0], [1.703, 0.1237, 0.0]]},
    },
    "boundary": {},
    "uncertainty": {"gap_err_ev": 0.05, "mu_err_ev": 0.01, "radius_err_nm": 50.0,
                    "optical_rel_err": 0.005, "pfa_lower_factor": True},
    "roughness": {"delta_sphere_nm": 0.9, "delta_plate_nm": 1.5},
    "policy": {"rel_tol": 1e-8, "l_max_cap": 5000, "quadrature_tol": 1e-9, "tensor": "exact",
               "zero_mode_te_metal": "drude"},
    "thermal": {"boundaries": ["plate"]},
    "regime": {"pairs": [["plate", "sphere"]], "fractions": [0.9, 0.95, 0.99],
               "a_min_um": 0.05, "a_max_um": 20.0, "points": 41},
    "output": {"dir": "out", "prefix": ""},
}

_NUM = (int, float)
_SCHEMA = {
    "geometry": {"radius_nm": _NUM, "a_min_nm": _NUM, "a_max_nm": _NUM, "a_step_nm": _NUM},
    "graphene": {"gap_ev": _NUM, "mu_ev": _NUM, "vf_ratio": _NUM},
    "plate": {"kind": str, "substrate": str, "sphere": str},
    "uncertainty": {"gap_err_ev": _NUM, "mu_err_ev": _NUM, "radius_err_nm": _NUM,
                    "optical_rel_err": _NUM, "pfa_lower_factor": bool},
    "roughness": {"delta_sphere_nm": _NUM, "delta_plate_nm": _NUM},
    "policy": {"rel_tol": _NUM, "l_max_cap": int, "quadrature_tol": _NUM, "tensor": str,
               "zero_mode_te_metal": str},
    "thermal": {"boundaries": list},
    "regime": {"pairs": list, "fractions": list, "a_min_um": _NUM, "a_max_um": _NUM, "points": int},
    "output": {"dir": str, "prefix": str},
}
_MATERIAL_KEYS = {"kind": str, "plasma_energy_ev": _NUM, "relaxation_energy_ev": _NUM,
                  "oscillators": list, "table_file": str}
_BOUNDARY_KEYS = {"kind": str, "substrate": str, "gap_ev": _NUM, "mu_ev": _NUM, "vf_ratio": _NUM}


def _check_keys(where, given, allowed):
    for k, v in given.items():
        if k not in allowed:
            raise ConfigError(f"unknown key '{k}' in [{where}]")
        t = allowed[k]
        if t is _NUM and isinstance(v, bool) or not isinstance(v, t):
            raise ConfigError(f"[{where}] {k}: expected {getattr(t, '__name__', 'number')}, got {v!r}")


def _merge(base, over, where=""):
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(base.get(k), dict):
            _merge(base[k], v, f"{where}{k}.")
        else:
            base[k] = v
    return base


def _parse_value(text):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_override(raw, assignment):
    """Apply one ``section.key=value`` (or ``material.name.key=value``) override."""
    if "=" not in assignment:
        raise ConfigError(f"override '{assignment}' is not of the form key=value")
    path, value = assignment.split("=", 1)
    keys = [k.strip() for k in path.strip().split(".")]
    if not all(keys):
        raise ConfigError(f"bad override key '{path}'")
    node = raw
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override '{path}' does not address a section")
    node[keys[-1]] = _parse_value(value.strip())


class RunConfig:
    """Validated configuration with builders for the physics objects."""

    def __init__(self, raw):
        self.raw = raw
        self._validate()

    @classmethod
    def load(cls, path=None, overrides=()):
        raw = copy.deepcopy(DEFAULTS)
        if path is not None:
            try:
                with open(path, "rb") as fh:
                    user = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
            _merge(raw, user)
        for o in overrides:
            apply_override(raw, o)
        return cls(raw)

    # ------------------------------------------------------------ validation

    def _validate(self):
        r = self.raw
        allowed_top = set(_SCHEMA) | {"temperature_k", "material", "boundary"}
        for k in r:
            if k not in allowed_top:
                raise ConfigError(f"unknown top-level key or section '{k}'")
        if isinstance(r["temperature_k"], bool) or not isinstance(r["temperature_k"], _NUM) \
                or r["temperature_k"] < 0:
            raise ConfigError("temperature_k must be a non-negative number")
        for sec, keys in _SCHEMA.items():
            if not isinstance(r[sec], dict):
                raise ConfigError(f"[{sec}] must be a section")
            _check_keys(sec, r[sec], keys)
        for name, m in r["material"].items():
            _check_keys(f"material.{name}", m, _MATERIAL_KEYS)
        for name, b in r["boundary"].items():
            _check_keys(f"boundary.{name}", b, _BOUNDARY_KEYS)
            if name in ("plate", "sphere"):
                raise ConfigError(f"boundary name '{name}' is reserved")
        g = r["geometry"]
        if not (0 < g["a_min_nm"] < g["a_max_nm"]) or not g["a_step_nm"] > 0:
            raise ConfigError("geometry: need 0 < a_min_nm < a_max_nm and a_step_nm > 0")
        if not g["a_max_nm"] < g["radius_nm"]:
            raise ConfigError("geometry: a_max_nm must be below radius_nm")
        if r["policy"]["tensor"] not in ("exact", "approx"):
            raise ConfigError("policy.tensor must be 'exact' or 'approx'")
        if r["policy"]["zero_mode_te_metal"] not in ("drude", "plasma"):
            raise ConfigError("policy.zero_mode_te_metal must be 'drude' or 'plasma'")
        if r["plate"]["kind"] not in ("bare", "coated", "freestanding", "ideal"):
            raise ConfigError("plate.kind must be bare, coated, freestanding or ideal")
        reg = r["regime"]
        if not all(isinstance(p, list) and len(p) == 2 for p in reg["pairs"]):
            raise ConfigError("regime.pairs must be a list of [boundary, boundary] pairs")
        if not all(isinstance(f, _NUM) and 0 < f < 1 for f in reg["fractions"]):
            raise ConfigError("regime.fractions must lie in (0, 1)")
        # build everything once so that errors surface as config errors
        try:
            self.materials()
            self.sheet()
            self.policy()
            self.budget()
            self.roughness()
            for name in self.boundary_names():
                self.boundary(name)
        except (ValueError, OSError) as exc:
            raise ConfigError(str(exc)) from exc

    # ------------------------------------------------------------ builders

    @property
    def temperature(self):
        return float(self.raw["temperature_k"])

    @property
    def radius(self):
        return float(self.raw["geometry"]["radius_nm"])

    def separations(self):
        g = self.raw["geometry"]
        n = int(math.floor((g["a_max_nm"] - g["a_min_nm"]) / g["a_step_nm"] + 1e-9))
        return [float(x) for x in g["a_min_nm"] + g["a_step_nm"] * np.arange(n + 1)]

    def materials(self):
        out = {}
        for name, m in self.raw["material"].items():
            kind = m.get("kind")
            if kind in ("drude", "plasma"):
                if kind == "drude":
                    out[name] = PermittivityModel.drude(m.get("plasma_energy_ev", 0.0),
                                                        m.get("relaxation_energy_ev", 0.0), name)
                else:
                    out[name] = PermittivityModel.plasma(m.get("plasma_energy_ev", 0.0), name)
            elif kind == "oscillator":
                out[name] = PermittivityModel.oscillator(
                    [Oscillator(*o) for o in m.get("oscillators", [])], name)
            elif kind == "tabulated":
                if "table_file" not in m:
                    raise ConfigError(f"material.{name}: tabulated kind needs table_file")
                out[name] = PermittivityModel.from_csv(m["table_file"], name)
            elif kind == "vacuum":
                out[name] = PermittivityModel.vacuum()
            else:
                raise ConfigError(f"material.{name}: unknown kind {kind!r}")
        return out

    def material(self, name):
        mats = self.materials()
        if name not in mats:
            raise ConfigError(f"material '{name}' is not defined")
        return mats[name]

    def sheet(self, gap=None, mu=None, vf=None):
        g = self.raw["graphene"]
        return GrapheneSheet(float(g["gap_ev"] if gap is None else gap),
                             float(g["mu_ev"] if mu is None else mu),
                             float(g["vf_ratio"] if vf is None else vf))

    def policy(self):
        p = self.raw["policy"]
        return SummationPolicy(float(p["rel_tol"]), int(p["l_max_cap"]), float(p["quadrature_tol"]),
                               p["tensor"], p["zero_mode_te_metal"])

    def budget(self):
        u = self.raw["uncertainty"]
        return UncertaintyBudget(float(u["gap_err_ev"]), float(u["mu_err_ev"]),
                                 float(u["radius_err_nm"]), float(u["optical_rel_err"]),
                                 bool(u["pfa_lower_factor"]))

    def roughness(self):
        r = self.raw["roughness"]
        return RoughnessParams(float(r["delta_sphere_nm"]), float(r["delta_plate_nm"]))

    @property
    def plate_kind(self):
        return self.raw["plate"]["kind"]

    def substrate(self):
        return self.material(self.raw["plate"]["substrate"])

    def sphere(self):
        return self.material(self.raw["plate"]["sphere"])

    def boundary_names(self):
        return ["plate", "sphere"] + list(self.raw["boundary"])

    def boundary(self, name):
        """BoundarySpec for ``plate``, ``sphere`` or a ``[boundary.<name>]`` section."""
        if name == "plate":
            kind, sub, sheet = self.plate_kind, self.raw["plate"]["substrate"], self.sheet()
        elif name == "sphere":
            if self.plate_kind == "ideal":
                return BoundarySpec.ideal()
            return BoundarySpec.bare(self.sphere())
        elif name in self.raw["boundary"]:
            b = self.raw["boundary"][name]
            kind, sub = b.get("kind", "coated"), b.get("substrate")
            sheet = self.sheet(b.get("gap_ev"), b.get("mu_ev"), b.get("vf_ratio"))
        else:
            raise ConfigError(f"boundary '{name}' is not defined")
        if kind == "ideal":
            return BoundarySpec.ideal()
        if kind == "freestanding":
            return BoundarySpec.freestanding(sheet)
        if sub is None:
            raise ConfigError(f"boundary '{name}' needs a substrate")
        model = self.material(sub)
        return BoundarySpec.bare(model) if kind == "bare" else BoundarySpec.coated(model, sheet)


__all__ = ["RunConfig", "ConfigError", "DEFAULTS", "apply_override"]
