"""JSON system configuration.

    {"schema_version": 1,
     "field": "Q" | {"quadratic": d},
     "modulus": {"m0_gens": [elem, ...], "m_inf": [place, ...]},
     "gamma_gens": [{"residue": elem, "signs": [±1, ...]}, ...] | "all",
     "truncation": X,
     "label": "..."}

An element is an integer or a pair [x, y] meaning x + y·ω. A missing
gamma_gens gives the trivial subgroup.
"""
from __future__ import annotations

import json
from pathlib import Path

from .congruence import Modulus, ResidueClass, SystemDescriptor
from .field import Element, Field, make_field
from .ideals import Ideal

SCHEMA_VERSION = 1
KEYS = {"schema_version", "field", "modulus", "gamma_gens", "truncation", "label"}


class ConfigError(ValueError):
    """Malformed configuration (CLI exit status 2)."""


def parse_element(f: Field, raw) -> Element:
    if isinstance(raw, bool):
        raise ConfigError(f"bad element {raw!r}")
    if isinstance(raw, int):
        return f(raw)
    if isinstance(raw, list) and len(raw) == 2 and all(isinstance(v, int) and not isinstance(v, bool)
                                                       for v in raw):
        if f.d is None and raw[1]:
            raise ConfigError("ℚ elements take no ω coordinate")
        return f(raw[0], raw[1]) if f.d is not None else f(raw[0])
    raise ConfigError(f"element must be an integer or [x, y], got {raw!r}")


def _field(raw) -> Field:
    try:
        if isinstance(raw, dict):
            if set(raw) != {"quadratic"}:
                raise ConfigError("field object must be {\"quadratic\": d}")
            return make_field(raw["quadratic"])
        if isinstance(raw, str):
            return make_field(raw)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"field must be \"Q\" or {{\"quadratic\": d}}, got {raw!r}")


def system_from_dict(cfg: dict) -> SystemDescriptor:
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    extra = set(cfg) - KEYS
    if extra:
        raise ConfigError(f"unknown keys {sorted(extra)}")
    version = cfg.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    if "field" not in cfg:
        raise ConfigError("missing 'field'")
    f = _field(cfg["field"])
    mod = cfg.get("modulus", {})
    if not isinstance(mod, dict) or set(mod) - {"m0_gens", "m_inf"}:
        raise ConfigError("modulus must be {\"m0_gens\": [...], \"m_inf\": [...]}")
    gens = [parse_element(f, g) for g in mod.get("m0_gens", [1])]
    if not gens or all(g.is_zero() for g in gens):
        raise ConfigError("m0 must be a nonzero ideal")
    minf = mod.get("m_inf", [])
    if not isinstance(minf, list) or any(not isinstance(i, int) or isinstance(i, bool) for i in minf):
        raise ConfigError("m_inf must be a list of place indices")
    if any(i < 0 or i >= f.real_places for i in minf) or len(set(minf)) != len(minf):
        raise ConfigError(f"m_inf {minf} names places outside 0..{f.real_places - 1}")
    X = cfg.get("truncation", 1000)
    if not isinstance(X, int) or isinstance(X, bool) or X < 1:
        raise ConfigError("truncation must be a positive integer")
    try:
        m0 = Ideal.from_generators(f, gens)
        modulus = Modulus(m0, tuple(sorted(minf)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    gamma = _gamma(f, modulus, cfg.get("gamma_gens"))
    sys = SystemDescriptor(f, modulus, gamma, X, str(cfg.get("label", "")))
    try:
        sys.gamma
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return sys


def _gamma(f: Field, modulus: Modulus, raw):
    if raw is None or raw == "all":
        return raw
    if not isinstance(raw, list):
        raise ConfigError("gamma_gens must be a list or \"all\"")
    from .congruence import ResidueGroup
    G = ResidueGroup(modulus)
    out = []
    for g in raw:
        if not isinstance(g, dict) or "residue" not in g or set(g) - {"residue", "signs"}:
            raise ConfigError(f"gamma generator must be {{\"residue\": elem, \"signs\": [...]}}, got {g!r}")
        signs = tuple(g.get("signs", []))
        if len(signs) != len(modulus.m_inf) or any(s not in (1, -1) for s in signs):
            raise ConfigError(f"signs {list(signs)} do not match m_inf {list(modulus.m_inf)}")
        r = parse_element(f, g["residue"])
        if not modulus.coprime_element(r):
            raise ConfigError(f"residue {g['residue']!r} is not coprime to m0")
        out.append(ResidueClass(signs, G.reduce(r).residue))
    return out


def load_config(path: str | Path) -> SystemDescriptor:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return system_from_dict(cfg)


def describe(sys: SystemDescriptor) -> dict:
    """Reproducibility block embedded in every report."""
    f = sys.field
    return {"schema_version": SCHEMA_VERSION, "label": sys.label, "field": f.name(),
            "m0_hnf": list(sys.modulus.m0.hnf()[:3]), "m_inf": list(sys.modulus.m_inf),
            "gamma_order": sys.gamma.order, "truncation": sys.truncation}
