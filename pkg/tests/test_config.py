import json

import pytest

from congkms.config import ConfigError, describe, load_config, parse_element, system_from_dict
from congkms.field import Field
from conftest import CONFIGS


def cfg(**kw):
    base = {"schema_version": 1, "field": {"quadratic": -1}}
    base.update(kw)
    return base


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    S = load_config(path)
    d = describe(S)
    assert d["schema_version"] == 1 and d["truncation"] == S.truncation
    assert S.class_data.order >= 1


def test_gamma_forms():
    trivial = system_from_dict(cfg(modulus={"m0_gens": [3]}))
    assert trivial.gamma.order == 1
    full = system_from_dict(cfg(modulus={"m0_gens": [3]}, gamma_gens="all"))
    assert full.gamma.order == 8
    # ⟨i⟩ modulo 3 has order 4
    gen = system_from_dict(cfg(modulus={"m0_gens": [3]}, gamma_gens=[{"residue": [0, 1]}]))
    assert gen.gamma.order == 4


def test_signs_over_q():
    S = system_from_dict({"field": "Q", "modulus": {"m0_gens": [5], "m_inf": [0]},
                          "gamma_gens": [{"residue": 4, "signs": [-1]}]})
    assert S.gamma.order == 2


def test_parse_element():
    f = Field(-5)
    assert parse_element(f, [1, 2]) == f(1, 2)
    assert parse_element(Field(None), [3, 0]) == Field(None)(3)
    for bad in (True, "3", [1], [1.5, 2]):
        with pytest.raises(ConfigError):
            parse_element(f, bad)
    with pytest.raises(ConfigError):
        parse_element(Field(None), [1, 1])


@pytest.mark.parametrize("raw", [
    [],
    cfg(colour="red"),
    cfg(schema_version=2),
    {"schema_version": 1},
    cfg(field={"quadratic": 4}),
    cfg(field={"cubic": 2}),
    cfg(field=7),
    cfg(modulus={"m0_gens": [0]}),
    cfg(modulus={"m0": [3]}),
    cfg(modulus={"m0_gens": [3], "m_inf": [0]}),
    {"field": {"quadratic": 10}, "modulus": {"m_inf": [0, 0]}},
    cfg(truncation=0),
    cfg(truncation=True),
    cfg(modulus={"m0_gens": [3]}, gamma_gens=[{"residue": 3}]),
    cfg(modulus={"m0_gens": [3]}, gamma_gens=[{"residue": 1, "signs": [1]}]),
    cfg(modulus={"m0_gens": [3]}, gamma_gens="some"),
])
def test_rejects_malformed(raw):
    with pytest.raises(ConfigError):
        system_from_dict(raw)


def test_load_errors(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(p)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.json")
    p.write_text(json.dumps(cfg(label="ok")))
    assert load_config(p).label == "ok"
