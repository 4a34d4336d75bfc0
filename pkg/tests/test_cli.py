import json
import subprocess
import sys

import pytest

from congkms.cli import COMMANDS, main
from congkms.field import Field, format_element
from conftest import CONFIGS
from oracles import primes_below


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_field_info(capsys):
    d = run_json(capsys, "field-info", "--config", CONFIGS / "q10.json")
    assert d["discriminant"] == 40 and d["fundamental_unit"] == format_element(Field(10)(3, 1))
    assert d["restricted_units"]["torsion_order"] == 2
    assert d["system"]["schema_version"] == 1


def test_classgroup_and_zeta(capsys):
    d = run_json(capsys, "classgroup", "--config", CONFIGS / "q5.json")
    assert d["order"] == 4
    z = run_json(capsys, "zeta", "--config", CONFIGS / "qi.json", "--which", "dedekind", "--bound", "20",
                 "--beta", "3")
    assert z["coefficients"]["2"] == 1 and z["coefficients"]["5"] == 2 and "3" not in z["coefficients"]
    assert float(z["evaluation"]["tail_bound"]) > 0


def test_zeta_partial_class(capsys):
    z = run_json(capsys, "zeta", "--config", CONFIGS / "q5.json", "--which", "partial", "--bound", "40")
    assert sorted(int(n) for n in z["coefficients"]) == [1, 6, 11, 16, 21, 26, 31, 36]


def test_fixed_points_and_orbits(capsys):
    d = run_json(capsys, "fixed-points", "--config", CONFIGS / "qm5.json")
    assert d["solidarity"] and [c["count"] for c in d["classes"]] == [4, 4]
    o = run_json(capsys, "orbits", "--config", CONFIGS / "q2.json", "--bound", "5")
    assert sum(r["size"] for r in o["orbits"]) == 25


def test_orbits_on_trivial_units_is_a_domain_error(capsys):
    code, _, err = run(capsys, "orbits", "--config", CONFIGS / "q5.json")
    assert code == 1 and "trivial" in err


def test_partition(capsys):
    d = run_json(capsys, "partition", "--config", CONFIGS / "q_inf.json", "--bound", "100000")
    row = d["classes"][0]
    assert abs(row["value"] - 1.6449340668482264) <= row["tail_bound"]


def test_kms_check(capsys):
    d = run_json(capsys, "kms-check", "--config", CONFIGS / "qi.json", "--count", "6", "--bound", "80")
    assert d["all_within_tails"] and d["count"] == 6


def test_census_and_invariants(capsys):
    d = run_json(capsys, "census", "--config", CONFIGS / "qi.json")
    assert d["component_count"] == 8 and d["summed_identity_holds"]
    r = run_json(capsys, "invariants", "--config", CONFIGS / "q5.json", "--bound", "500")
    assert r["class_number"] == 4 and r["tor_times_fixed"] == "inf"
    assert r["norm_prime_set"] == [p for p in primes_below(500) if p % 5 == 1]


def test_kronecker_and_compare(capsys):
    k = run_json(capsys, "kronecker", "--config", CONFIGS / "q5.json", "--bound", "100")
    assert k["primes"] == [11, 31, 41, 61, 71]
    c = run_json(capsys, "compare", "--config", CONFIGS / "q2.json", "--config2", CONFIGS / "q3.json",
                 "--bound", "30")
    assert not c["all_agree"] and c["arithmetic_equivalence"]["witness"] == 3


def test_tsv_output(capsys, tmp_path):
    out = tmp_path / "k.tsv"
    code, _, _ = run(capsys, "kronecker", "--config", CONFIGS / "q5.json", "--bound", "50",
                     "--format", "tsv", "--out", out)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# ")
    body = [l for l in lines if not l.startswith("#")]
    assert body == ["p", "11", "31", "41"]


@pytest.mark.parametrize("command,config,extra", [
    ("zeta", "qi.json", ["--bound", "50"]),
    ("census", "q10.json", []),
    ("partition", "qi.json", ["--bound", "300"]),
    ("fixed-points", "q10.json", []),
    ("orbits", "qi.json", ["--bound", "5"]),
    ("kronecker", "q5.json", ["--bound", "200"]),
    ("invariants", "qi.json", ["--bound", "200"]),
])
def test_figure_is_written(capsys, tmp_path, command, config, extra):
    path = tmp_path / f"{command}.png"
    d = run_json(capsys, command, "--config", CONFIGS / config, "--figure", path, *extra)
    assert path.exists() and path.stat().st_size > 1000
    assert d["figure"] == str(path)


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 1, "field": {"quadratic": 4}}))
    assert run(capsys, "field-info", "--config", bad)[0] == 2
    assert run(capsys, "field-info", "--config", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "nonsense", "--config", CONFIGS / "qi.json")[0] == 2
    assert run(capsys, "compare", "--config", CONFIGS / "qi.json")[0] == 2
    assert run(capsys, "zeta", "--config", CONFIGS / "q5.json", "--class", "one")[0] == 2
    # β ≤ 2 is outside the convergent range
    assert run(capsys, "kms-check", "--config", CONFIGS / "qi.json", "--beta", "2")[0] == 1
    assert run(capsys, "kronecker", "--config", CONFIGS / "qi.json", "--bound", "5000")[0] == 1


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "congkms", "field-info", "--config", str(CONFIGS / "q_inf.json"),
                        "--format", "tsv"], capture_output=True, text=True)
    assert p.returncode == 0 and "key\tvalue" in p.stdout


def test_commands_are_all_dispatched():
    from congkms.cli import HANDLERS
    assert set(HANDLERS) == set(COMMANDS)
