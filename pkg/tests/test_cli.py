import csv
import io
import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from polyharm.cli import cli


def run(*args, env=None):
    return CliRunner().invoke(cli, [str(a) for a in args], env=env)


def records(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


def csv_rows(result):
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert lines[0].startswith("# polyharm")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_classify_emits_four_verified_records():
    recs = records(run("classify", "--degree", 3, "--m1", 4, "--r", 20, "--format", "json"))
    assert len(recs) == 4
    for rec in recs:
        out = rec["output"]
        assert abs(out["residual"]) < 1e-9 * out["a2"] ** 2
        assert out["root"] in (-0.5, -0.2)
        assert rec["version"] and rec["provenance"]


def test_thresholds_and_bounds():
    (rec,) = records(run("thresholds", "--m1", 7, "--m2", 8))
    assert (rec["output"]["rstar"], rec["output"]["rstarstar"]) == (38, 47)
    (rec,) = records(run("bounds", "--b", 10000))
    assert (rec["output"]["bound_rstar"], rec["output"]["bound_rstarstar"]) == (9, 400005)


def test_rationals_round_trip_losslessly():
    (rec,) = records(run("thresholds", "--b", "8/7"))
    y0 = rec["output"]["y0"]
    assert Fraction(int(y0["num"]), int(y0["den"])) == Fraction(8, 15)
    assert y0["float"] == float(Fraction(8, 15))
    b = rec["input"]["b"]
    assert (b["num"], b["den"]) == ("8", "7")


def test_reciprocal_ratio_gives_same_orders():
    (a,) = records(run("thresholds", "--m1", 8, "--m2", 7))
    (b,) = records(run("thresholds", "--m1", 7, "--m2", 8))
    assert (a["output"]["rstar"], a["output"]["rstarstar"]) == (b["output"]["rstar"], b["output"]["rstarstar"])


def test_sweep_over_r():
    rows = csv_rows(run("sweep", "--degree", 3, "--r-range", "2:25", "--format", "csv"))
    assert [int(row["r"]) for row in rows] == list(range(2, 26))
    assert all(int(row["count"]) == (4 if int(row["r"]) >= 20 else 0) for row in rows)


def test_sweep_over_b_in_input_order_with_workers():
    blist = "10000,1,8/7,100,2,10"
    serial = run("sweep", "--b-list", blist, "--format", "csv")
    parallel = run("sweep", "--b-list", blist, "--format", "csv", env={"POLYHARM_WORKERS": "3"})
    assert serial.output == parallel.output
    rows = csv_rows(serial)
    assert [row["in_b"] for row in rows] == ["10000", "1", "1.1428571428571428", "100", "2", "10"]
    by_b = {row["in_b"]: (int(row["rstar"]), int(row["rstarstar"])) for row in rows}
    assert by_b["10000"] == (5, 312919) and by_b["1.1428571428571428"] == (38, 47)
    ordered = sorted(rows, key=lambda row: float(row["b"]))
    # r* falls and r** grows as b moves away from 1.
    assert [int(row["rstar"]) for row in ordered] == sorted((int(row["rstar"]) for row in rows), reverse=True)
    assert [int(row["rstarstar"]) for row in ordered] == sorted(int(row["rstarstar"]) for row in rows)


def test_table_headline_numbers():
    recs = records(run("table"))
    values = {(rec["output"]["quantity"], json.dumps(rec["input"], sort_keys=True)): rec["output"]["value"]
              for rec in recs}
    thresholds = [v for (q, _), v in values.items() if q == "threshold"]
    assert thresholds == [20, 42, 110]
    orders = [v for (q, _), v in values.items() if q == "critical_orders"]
    assert orders == [[38, 47], [5, 312919]]
    bounds = [v for (q, _), v in values.items() if q == "upper_bounds"]
    assert [46, 46] in bounds and [41, 51] in bounds and [9, 400005] in bounds


def test_output_is_idempotent(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run("table", "--output", first).exit_code == 0
    assert run("table", "--output", second).exit_code == 0
    assert first.read_bytes() == second.read_bytes()
    a = run("scan", "--degree", 4, "--m1", 1, "--r", 42, "--format", "csv", "--grid", 5000)
    b = run("scan", "--degree", 4, "--m1", 1, "--r", 42, "--format", "csv", "--grid", 5000)
    assert a.output == b.output


@pytest.mark.parametrize("args,code", [
    (("classify", "--degree", 5, "--m1", 1, "--r", 3), 4),
    (("thresholds", "--m1", 7, "--m2", 8, "--b", 2), 2),
    (("sweep", "--degree", 3, "--r-range", "9:2"), 2),
    (("sweep", "--b-list", ""), 2),
    (("classify", "--degree", 3, "--m1", 1), 2),
    (("classify", "--degree", 3, "--m1", 1, "--m2", 2, "--r", 5), 2),
    (("bounds", "--b", "0"), 2),
    (("verify-geom", "--kind", "sphere", "--m", 2), 2),
])
def test_exit_codes(args, code):
    assert run(*args).exit_code == code


def test_verification_failure_exit_code(monkeypatch):
    from polyharm import criterion

    monkeypatch.setattr(criterion, "CLASSIFY_RTOL", 0.0)
    result = run("classify", "--degree", 3, "--m1", 1, "--r", 20)
    assert result.exit_code == 3


def test_verify_geom_sphere_and_torus():
    (rec,) = records(run("verify-geom", "--kind", "sphere", "--m", 2, "--r", 3))
    assert rec["output"]["ok"]
    assert rec["output"]["criterion"] == ["2:False", "3:True", "4:False"]
    (rec,) = records(run("verify-geom", "--kind", "torus", "--m1", 1, "--m2", 2, "--s", 0.4))
    assert rec["output"]["eigenvalue_error"] < 1e-8


def test_roots_and_invariants():
    recs = records(run("roots", "--degree", 4, "--m1", 1, "--r", 42))
    assert [(r["output"]["value"]["num"], r["output"]["value"]["den"]) for r in recs] == [("-1", "3"), ("-1", "7")]
    recs = records(run("roots", "--degree", 4, "--m1", 7, "--m2", 8, "--r", 47))
    assert len(recs) == 4
    (rec,) = records(run("invariants", "--degree", 4, "--m1", 1, "--m2", 2))
    assert abs(rec["output"]["alpha"]) < 1e-12


def test_flat_ambient_reports_no_members():
    (rec,) = records(run("classify", "--degree", 3, "--m1", 1, "--r", 30, "--c", 0))
    assert rec["output"]["count"] == 0


def test_thresholds_brute_force_confirmation():
    (rec,) = records(run("thresholds", "--b", 2, "--confirm", 100))
    assert (rec["output"]["brute_rstar"], rec["output"]["brute_rstarstar"]) == (26, 74)
