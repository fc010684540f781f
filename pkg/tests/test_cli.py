import json

import pytest

from finadd.cli import run

PENNIES = {"points": ["x1", "x2"], "functions": [{"name": "f1", "values": [1, -1]}, {"name": "f2", "values": [-1, 1]}]}
UNIT = {
    "points": ["x1", "x2"],
    "functions": [{"name": "f1", "values": [1, 0]}, {"name": "f2", "values": [0, 1]}],
    "targets": [{"name": "g", "values": [1, 1]}],
}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(path)

    return write


def _run(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_minimax_matching_pennies(files, capsys):
    code, out = _run(capsys, ["minimax", files("mp.json", PENNIES)])
    assert code == 0
    p = out["payload"]
    assert p["lower"] == "-1" and p["hull_value"] == "0"
    assert p["optimal_measure"] == {"f1": "1/2", "f2": "1/2"}
    assert p["concave_like"] is False


def test_verify_round_trip_and_tamper(files, capsys, tmp_path):
    inst = files("mp.json", PENNIES)
    cert = str(tmp_path / "cert.json")
    assert run(["minimax", inst, "--output", cert]) == 0
    capsys.readouterr()
    code, out = _run(capsys, ["verify", cert, "--instance", inst])
    assert code == 0 and out["valid"]
    data = json.loads(open(cert).read())
    data["payload"]["hull_value"] = "1/1000"
    bad = files("bad.json", data)
    code, out = _run(capsys, ["verify", bad, "--instance", inst])
    assert code == 1 and not out["valid"]
    other = files("other.json", {**PENNIES, "points": ["y1", "y2"]})
    code, out = _run(capsys, ["verify", cert, "--instance", other])
    assert code == 1 and "different instance" in out["reason"]


def test_dominate_violation_exit_code(files, capsys):
    code, out = _run(capsys, ["dominate", files("u.json", UNIT)])
    assert code == 1 and out["kind"] == "balance_violation"


def test_output_is_deterministic(files, capsys):
    inst = files("u.json", UNIT)
    run(["--oracle", "dominate", inst])
    first = capsys.readouterr().out
    run(["dominate", inst, "--oracle"])
    assert capsys.readouterr().out == first


def test_parse_errors_exit_2(files, capsys):
    assert run(["minimax", files("bad.json", '{"points": [')]) == 2
    err = capsys.readouterr().err
    assert "bad.json:1:" in err
    bad = {"points": ["x"], "functions": [{"name": "f", "values": ["1/0"]}]}
    assert run(["minimax", files("bad2.json", bad)]) == 2
    assert "functions[0].values[0]" in capsys.readouterr().err
    assert run(["minimax", "/nonexistent.json"]) == 2
    assert run(["dominate", files("u.json", UNIT), "--transpose"]) == 2


@pytest.mark.parametrize(
    "argv, instance, expected_code, kind",
    [
        (["hull", "{}", "--target", "1/2,1/2"], UNIT, 0, "in_hull"),
        (["hull", "{}", "--target", "1,1"], UNIT, 1, "not_in_hull"),
        (["fan", "{}", "--rho", "2"], {"points": [[1, 0], [-1, 0]], "values": [1, 1]}, 1, "fan_violation"),
        (["fan", "{}", "--rho", "3", "--norm", "linf"], {"points": [[1, 2]], "values": [2]}, 0, "fan_functional"),
        (["suffice", "{}", "--subset", "x1"], {"points": ["x1", "x2"], "functions": [{"name": "h", "values": [0, 1]}]},
         1, "sufficiency_violation"),
        (["suffice", "{}", "--subset", "x2"], {"points": ["x1", "x2"], "functions": [{"name": "h", "values": [0, 1]}]},
         0, "sufficient"),
        (["strassen", "{}", "--phi", "1/3"], {"functionals": [{"name": "abs", "generators": [[1], [-1]]}]},
         0, "strassen_decomposition"),
        (["strassen", "{}", "--phi", "2"], {"functionals": [{"name": "abs", "generators": [[1], [-1]]}]},
         1, "strassen_violation"),
        (["exhaust", "{}"], UNIT, 0, "exhaustion_report"),
        (["exhaust", "{}", "--pieces", "x1"], UNIT, 1, "exhaustion_report"),
        (["summing", "{}", "--target", "1,1"], UNIT, 0, "summing_witness"),
        (["summing", "{}", "--target", "0,1"], {"points": ["x1", "x2"], "functions": [{"name": "f", "values": [1, 0]}]},
         1, "summing_infinite"),
        (["minimax", "{}", "--transpose", "--subfamilies", "x1;x2"], PENNIES, 0, "minimax_report"),
    ],
)
def test_commands_round_trip(files, capsys, tmp_path, argv, instance, expected_code, kind):
    inst = files("inst.json", instance)
    argv = [inst if a == "{}" else a for a in argv]
    code, out = _run(capsys, argv + ["--oracle"])
    assert code == expected_code and out["kind"] == kind
    assert out["oracle"]["float_check"] is True
    cert = files("cert.json", out)
    code, res = _run(capsys, ["verify", cert, "--instance", inst])
    assert code == 0, res["reason"]


def test_pietsch_command(files, capsys):
    op = files("T.json", {"operator": [[1, 0], [0, 1]]})
    net = files("net.json", [[1, 0], [-1, 0], [0, 1], [0, -1]])
    sample = files("s.json", {"vectors": [[1, 0], [0, 1]]})
    code, out = _run(capsys, ["pietsch", op, "--p", "1", "--net", net, "--sample", sample])
    assert code == 0 and out["payload"]["C"] == "2"
    assert run(["verify", files("c.json", out), "--instance", op]) == 0
    capsys.readouterr()
    code, out = _run(capsys, ["pietsch", op, "--p", "3/2", "--net", net, "--sample", sample])
    assert code == 0 and out["arithmetic"] == "float" and abs(out["payload"]["C"] - 2) < 1e-9
    assert run(["verify", files("c2.json", out), "--instance", op]) == 0
