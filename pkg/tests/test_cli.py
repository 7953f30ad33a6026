import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from epr_steering.cli import (
    DEMO_SPECS,
    SpecError,
    gen_hz_alpha_closed_form,
    main,
    mc_certify,
    parse_state_spec,
    parse_state_text,
    run_report,
    spec_from_dict,
    sweep_gen_hz,
    sweep_werner,
    to_json,
)

SPECS = Path(__file__).resolve().parent.parent / "demos" / "specs"


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_demo_files_match_builtin_specs():
    for name, text in DEMO_SPECS.items():
        assert parse_state_spec(SPECS / f"{name}.toml") == parse_state_text(text)


def test_parse_asymmetric_demo():
    spec = parse_state_spec(SPECS / "asymmetric_n1.toml")
    assert spec.state["kind"] == "pure"
    assert spec.basis == {"n_max_a": 3, "n_max_b": 3}


def test_parse_errors_have_distinct_codes(tmp_path):
    bad_weights = """schema_version = 1
[basis]
n_max_a = 2
n_max_b = 2
[state]
kind = "mixture"
[[state.components]]
weight = 0.5
kind = "pure"
amplitudes = [[0, 0, 1.0]]
[[state.components]]
weight = 0.4
kind = "pure"
amplitudes = [[1, 0, 1.0]]
"""
    with pytest.raises(SpecError) as e:
        parse_state_text(bad_weights)
    assert e.value.code == "schema-violation" and e.value.exit_status == 11
    with pytest.raises(SpecError) as e:
        parse_state_text('schema_version = 1\n[state]\nkind = "werner"\nd = 3\neta = 1.5\n')
    assert e.value.code == "precondition-failure" and e.value.exit_status == 12
    with pytest.raises(SpecError) as e:
        parse_state_text("schema_version = 1\n[basis\n")
    assert e.value.code == "syntax-error" and e.value.exit_status == 10 and e.value.line == 2
    with pytest.raises(SpecError) as e:
        parse_state_text('schema_version = 1\n[basis]\nn_max_a = 1\nn_max_b = 1\n[state]\nkind = "pure"\n'
                         'amplitudes = [[3, 0, 1.0]]\n')
    assert e.value.exit_status == 12
    with pytest.raises(SpecError) as e:
        parse_state_text('schema_version = 2\n[state]\nkind = "werner"\nd = 3\neta = 0.5\n')
    assert e.value.exit_status == 11
    with pytest.raises(SpecError) as e:
        parse_state_spec(tmp_path / "missing.toml")
    assert e.value.exit_status == 13


def test_schema_field_context():
    with pytest.raises(SpecError) as e:
        parse_state_text('schema_version = 1\n[basis]\nn_max_a = 1\nn_max_b = 1\n[state]\nkind = "tmsv"\nr = "big"\n')
    assert "state.r" in str(e.value)


def test_round_trip_through_echoed_spec():
    for name in DEMO_SPECS:
        spec = parse_state_spec(SPECS / f"{name}.toml")
        doc, _ = run_report(spec)
        again = spec_from_dict(doc["state_spec"])
        assert again == spec
        assert parse_state_text(spec.to_toml()) == spec
    mixed = parse_state_spec(SPECS / "mixed_steerable.toml")
    assert parse_state_text(mixed.to_toml()) == mixed


def test_report_exit_codes():
    code, out, _ = run(["report", str(SPECS / "asymmetric_n1.toml")])
    assert code == 2
    doc = json.loads(out)
    rec = [r for r in doc["records"] if r["name"] == "generalized_hz" and r["steered"] == "B"][0]
    assert rec["value"] == pytest.approx(-0.0625, abs=1e-12)
    assert run(["report", str(SPECS / "separable.toml")])[0] == 4


def test_werner_report():
    code, out, _ = run(["werner", "--d", "3", "--eta", "0.9"])
    doc = json.loads(out)
    assert code == 2
    assert doc["metadata"]["category"] == "Cat3_steerable"
    assert "skipped" in doc["witnesses"]
    assert run(["werner", "--d", "2", "--eta", "0.45"])[0] == 3
    assert run(["werner", "--d", "2", "--eta", "0.25"])[0] == 4
    assert run(["werner", "--d", "3", "--eta", "1.5"])[0] == 12


def test_report_is_byte_identical(tmp_path):
    p = str(SPECS / "mixed_steerable.toml")
    assert run(["report", p])[1] == run(["report", p])[1]
    assert run(["report", p, "--format", "csv"])[1] == run(["report", p, "--format", "csv"])[1]


def test_flags_override_options():
    spec = parse_state_spec(SPECS / "mixed_steerable.toml")
    doc, _ = run_report(spec)
    assert doc["metadata"]["steered"] == ["B"]
    doc, _ = run_report(spec, steered="A", theta_points=8, epsilon=1e-6)
    assert doc["metadata"]["steered"] == ["A"]
    assert doc["metadata"]["theta_points"] == 8 and doc["metadata"]["epsilon"] == 1e-6


def test_csv_table_shape():
    code, out, _ = run(["report", str(SPECS / "symmetric_n1.toml"), "--format", "csv", "--steered", "B"])
    lines = out.strip().splitlines()
    assert lines[0] == "test,steered,value,bound,margin,verdict"
    bloch = [line.split(",") for line in lines if line.startswith("bloch_vector,")][0]
    assert float(bloch[2]) == pytest.approx(0.5, abs=1e-12) and bloch[5] == "steerable"


def test_floats_use_17_digits():
    assert to_json(0.1) == "0.10000000000000001"
    assert to_json({"x": [1, -0.0]}, indent=0) == '{"x":[1,0]}'


def test_sweep_werner_categories():
    rows = sweep_werner(2, [0.25, 0.45, 0.75, 1 / 3])
    assert [r[2] for r in rows[1:]] == ["Cat1_separable", "Cat2_LHS_entangled", "Cat3_or_4_steerable", "boundary"]
    assert rows[-1][3] is True


def test_sweep_gen_hz():
    rows = sweep_gen_hz([math.pi / 6, math.pi / 4, 1.2])
    assert rows[1][1] == pytest.approx(-0.0625, abs=1e-12)
    assert rows[2][1] == pytest.approx(0.0, abs=1e-12) and rows[2][3] == "inconclusive"
    for _, value, closed, _ in rows[1:]:
        assert value == pytest.approx(closed, abs=1e-12)


def test_gen_hz_sign_change_at_half():
    # value < 0 exactly when cos^2 alpha > 1/2
    for a in (0.3, 0.7, 0.8, 1.0, 1.4):
        assert (gen_hz_alpha_closed_form(a) < 0) == (math.cos(a) ** 2 > 0.5)


def test_sweep_cli_outputs():
    code, out, _ = run(["sweep-werner", "--d", "2", "--grid", "0.25,0.45,0.75", "--format", "csv"])
    assert code == 0 and out.splitlines()[0] == "eta,phi,category,boundary"
    code, out, _ = run(["sweep-genhz", "--grid", "0.5,1.0"])
    assert code == 0 and len(json.loads(out)) == 2


def test_mc_certify_small():
    for kind in ("cat1", "cat2"):
        s = mc_certify(kind, 50, 7)
        assert s["bound_violations"] == 0 and s["witness_firings"] == 0
        t = mc_certify(kind, 50, 7)
        assert {k: v for k, v in s.items() if k != "runtime_s"} == {k: v for k, v in t.items() if k != "runtime_s"}


def test_mc_certify_workers_do_not_change_result():
    a = mc_certify("cat2", 40, 3)
    b = mc_certify("cat2", 40, 3, workers=2)
    a.pop("runtime_s"), b.pop("runtime_s")
    assert a == b


def test_mc_certify_single_sample_line():
    code, out, err = run(["mc-certify", "--kind", "cat2", "--samples", "1", "--seed", "7"])
    assert code == 0
    assert len(out.strip().splitlines()) == 1
    assert "runtime" in err and "runtime" not in out


def test_demo_command():
    code, out, _ = run(["demo", "--format", "csv"])
    assert code == 0
    rows = dict(line.split(",")[:2] for line in out.strip().splitlines()[1:])
    assert rows["asymmetric_n1"] == "steerable"
    assert rows["separable"] == "inconclusive"
    assert rows["werner_d3"] == "Cat3_steerable"


def test_help_documents_exit_codes(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "exit codes" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "epr_steering", "werner", "--d", "2", "--eta", "0.45"],
                          capture_output=True, text=True)
    assert proc.returncode == 3
    assert json.loads(proc.stdout)["metadata"]["category"] == "Cat2_LHS_entangled"
