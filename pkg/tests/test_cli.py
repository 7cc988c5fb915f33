import json

import pytest

from homlin.cli import ConfigError, apply_overrides, main, scenario_from_dict, strip_header


def _cfg(tmp_path, **raw):
    raw.setdefault("output_dir", str(tmp_path / "out"))
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(raw))
    return str(p)


def _report(tmp_path, name):
    return json.loads((tmp_path / "out" / name).read_text())


def test_verify_pass(tmp_path, capsys):
    cfg = _cfg(tmp_path, case="kahler-para", n=2, xi={"seed": 7}, geodesics=[{"kind": "null"}])
    assert main(["verify", cfg]) == 0
    assert "PASS" in capsys.readouterr().out
    rep = _report(tmp_path, "kahler-para-n2-s0-report.json")
    assert rep["verdict"] == "pass"
    assert rep["holonomy_dim"] == 1
    assert set(rep["header"]) == {"timestamp", "package_version"}
    assert all(c["pass"] for c in rep["checks"])
    prefixes = {c["name"].split("/")[0] for c in rep["checks"]}
    assert {"theorem", "nomizu", "matrix", "chain", "geodesics"} <= prefixes


def test_verify_failure_exit_code(tmp_path, capsys):
    cfg = _cfg(tmp_path, case="kahler-pseudo", n=2, xi="e1", zeta="e3", stages=["theorem"])
    assert main(["verify", cfg]) == 1
    err = capsys.readouterr().err
    assert "theorem/zeta-vanishes" in err


@pytest.mark.parametrize("raw", [{"case": "kahler-para", "n": 0}, {"case": "octonion", "n": 2},
                                 {"case": "quat-para", "n": 1}, {"case": "kahler-pseudo", "n": 2, "s": 3},
                                 {"case": "kahler-para", "n": 2, "tolerances": {"bogus": 1}},
                                 {"case": "kahler-para", "n": 2, "stages": ["nope"]},
                                 {"case": "kahler-para", "n": 2, "xi": "e9"}])
def test_config_errors(tmp_path, raw, capsys):
    assert main(["verify", _cfg(tmp_path, **raw)]) == 2
    assert "error:" in capsys.readouterr().err


def test_usage_errors(tmp_path):
    assert main(["verify", str(tmp_path / "missing.json")]) == 2
    assert main(["frobnicate", _cfg(tmp_path, case="kahler-para", n=2)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad)]) == 2


def test_overrides():
    raw = {"case": "kahler-para", "n": 2, "tolerances": {"theorem": 1e-9}}
    out = apply_overrides(raw, ["n=3", "tolerances.theorem=1e-8", "xi=[1,0,0,0,0,0]", "name=demo"])
    assert out["n"] == 3 and out["tolerances"]["theorem"] == 1e-8
    assert out["xi"] == [1, 0, 0, 0, 0, 0] and out["name"] == "demo"
    assert raw["n"] == 2
    with pytest.raises(ConfigError):
        apply_overrides(raw, ["n"])
    with pytest.raises(ConfigError):
        apply_overrides(raw, ["n.x=1"])
    assert scenario_from_dict(out).label == "demo"


def test_override_on_command_line(tmp_path):
    cfg = _cfg(tmp_path, case="kahler-para", n=2, stages=["theorem"])
    assert main(["verify", cfg, "--override", "zeta=e2"]) == 1
    assert main(["verify", cfg, "--override", "n=0"]) == 2


def test_export_algebra(tmp_path, capsys):
    assert main(["export-algebra", _cfg(tmp_path, case="quat-para", n=2)]) == 0
    doc = _report(tmp_path, "quat-para-n2-s0-algebra.json")
    assert doc["dim"] == 11
    assert [b["part"] for b in doc["basis"]].count("h") == 3
    assert all(b["i"] < b["j"] for b in doc["brackets"])


def test_export_trajectories(tmp_path, capsys):
    cfg = _cfg(tmp_path, case="kahler-para", n=2, geodesics=[{"kind": "spacelike"}, {"kind": "null"}])
    assert main(["export-trajectories", cfg]) == 0
    files = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert len(files) == 2 and all(f.startswith("trajectory-") for f in files)
    doc = json.loads((tmp_path / "out" / files[0]).read_text())
    assert doc["blowup"]["t_low"] <= 1.0 <= doc["blowup"]["t_high"]
    assert len(doc["points"][0]) == 3


def test_full_suite_deterministic(tmp_path):
    scen = [{"case": "kahler-para", "n": 2, "xi": {"seed": 7}}]
    cfg = _cfg(tmp_path, scenarios=scen)
    assert main(["full-suite", cfg]) == 0
    first = (tmp_path / "out" / "suite-report.json").read_text()
    assert main(["full-suite", cfg]) == 0
    second = (tmp_path / "out" / "suite-report.json").read_text()
    assert strip_header(first) == strip_header(second)
    a = json.loads(first)
    a.pop("header")
    b = json.loads(second)
    b.pop("header")
    assert json.dumps(a, indent=2) == json.dumps(b, indent=2)
    assert a["verdict"] == "pass"
