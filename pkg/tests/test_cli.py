import csv
import io
import json
import subprocess
import sys

import pytest

from cspath.cli import RECORD_FIELDS, main, parse_complex, parse_list

from conftest import Z_BH


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_symbol_default(capsys):
    code, out, _ = run(capsys, "symbol")
    assert code == 0
    table = dict(r.split(",", 1) for r in out.strip().splitlines()[1:])
    assert table["classical_symbol"] == "1/2*U*zeta^2 + (-U - mu)*zeta + 3/8*U + 1/2*mu"
    assert table["recipe_minus_weyl"] == "1/8*U"


def test_symbol_cubic_offset_not_constant(capsys):
    code, out, _ = run(capsys, "symbol", "--hamiltonian", "n^3")
    assert code == 0 and "offset_is_constant,no" in out


def test_partition_records(capsys):
    code, out, _ = run(capsys, "partition", "--slices", "64:256")
    assert code == 0
    recs = rows(out)
    assert list(recs[0]) == list(RECORD_FIELDS)
    exact = next(r for r in recs if r["route"] == "exact")
    assert float(exact["value_re"]) == pytest.approx(Z_BH, rel=1e-12)
    assert [r["control_value"] for r in recs if r["route"] == "transfer"] == ["64", "128", "256"]
    rich = next(r for r in recs if r["route"] == "transfer-richardson")
    assert "fitted_C=" in rich["label"]


def test_negative_control_labelled(capsys):
    _, out, _ = run(capsys, "partition", "--slices", "64")
    pit = next(r for r in rows(out) if r["route"] == "pitfall")
    assert pit["label"] == "negative-control"
    assert float(pit["rel_error"]) > 0.1
    _, out, _ = run(capsys, "pitfall")
    assert all(r["label"] == "negative-control" for r in rows(out))


def test_propagator_routes_agree(capsys):
    code, out, _ = run(capsys, "propagator", "--slices", "16,32", "--za", "0.5+0.5i", "--zb", "1-0.2i")
    assert code == 0
    for r in rows(out):
        if r["route"] in ("series", "quadrature"):
            assert float(r["abs_error"]) < 1e-10


def test_propagator_u0_reroute_note(capsys):
    code, out, err = run(capsys, "propagator", "--param", "U=0", "--slices", "8")
    assert code == 0 and "rerouted" in err


def test_semiclassical_ratios(capsys):
    code, out, _ = run(capsys, "semiclassical", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["subcommand"] == "semiclassical"
    assert doc["meta"]["coefficients"]["b2"] == "1/2*U"
    ratios = [float(r["label"].split("error_ratio=")[1]) for r in doc["records"]
              if "error_ratio=" in r["label"]]
    assert len(ratios) == 2 and all(1.6 <= x <= 2.4 for x in ratios)


def _strip_runtime(text):
    doc = json.loads(text)
    for r in doc["records"]:
        r.pop("runtime_ms")
    return doc


def test_deterministic_output(capsys):
    a = run(capsys, "partition", "--slices", "64,128", "--format", "json")[1]
    b = run(capsys, "partition", "--slices", "64,128", "--format", "json")[1]
    assert _strip_runtime(a) == _strip_runtime(b)


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test\nbeta = 2\nparam = U=2\nslices = 64\nformat = json\n")
    doc = json.loads(run(capsys, "partition", "--config", str(cfg))[1])
    assert doc["meta"]["beta"] == 2.0 and doc["meta"]["params"]["U"] == "2"
    assert doc["meta"]["params"]["mu"] == "1/2"
    doc = json.loads(run(capsys, "partition", "--config", str(cfg), "--beta", "0.5")[1])
    assert doc["meta"]["beta"] == 0.5


def test_out_file(capsys, tmp_path):
    path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "pitfall", "--out", str(path))
    assert code == 0 and out == "" and path.read_text().startswith("route,")


@pytest.mark.parametrize("argv", [
    ["symbol", "--hamiltonian", ""],
    ["symbol", "--hamiltonian", "(*n"],
    ["partition", "--za", "1+"],
    ["partition", "--param", "mu"],
    ["partition", "--slices", "0"],
    ["nosuch"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_parse_error_reports_location(capsys):
    _, _, err = run(capsys, "symbol", "--hamiltonian", "(*n")
    assert "column 2" in err


@pytest.mark.parametrize("argv", [
    ["partition", "--param", "U=-1"],
    ["partition", "--nmax", "5", "--tol", "1e-12"],
])
def test_numerical_errors_exit_3(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3 and "numerical failure" in err


def test_helpers():
    assert parse_complex("0.5-2i") == 0.5 - 2j
    assert parse_list("64:256", int, "slices") == [64, 128, 256]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "cspath", "symbol"], capture_output=True, text=True)
    assert p.returncode == 0 and "classical_symbol" in p.stdout
