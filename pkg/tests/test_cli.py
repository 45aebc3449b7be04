"""Command-line front end: reports, exit codes, determinism."""

import json

import pytest

from gkzflop import cli
from gkzflop import report as reporting


def run_cli(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    status = cli.main(list(argv) + ["--out", str(out)])
    return status, json.loads(out.read_text())


def test_inspect(tmp_path):
    status, rep = run_cli(["inspect", "--fixture", "a1"], tmp_path)
    assert status == 0
    assert rep["schema"] == 1
    assert rep["kind"] == "inspect"
    body = rep["body"]
    assert body["circuit"]["h"] == [1, -2, 1]
    assert body["circuit"]["I_minus"] == [2]
    assert all(v["total"] == 2 for v in body["sector_dims"].values())


def test_box_lists_both_sectors(tmp_path):
    status, rep = run_cli(["box", "--fixture", "a1"], tmp_path)
    assert status == 0
    minus = rep["body"]["minus"]
    coords = {tuple(e["coords"]) for e in minus}
    assert coords == {("0", "0", "0"), ("1/2", "0", "1/2")}
    twisted = next(e for e in minus if e["coords"] == ["1/2", "0", "1/2"])
    assert twisted["point"] == [1, 1]
    assert len(rep["body"]["plus"]) == 1


def test_reports_deterministic_after_stripping_timings(tmp_path):
    _, rep1 = run_cli(["box", "--fixture", "conifold"], tmp_path, "r1.json")
    _, rep2 = run_cli(["box", "--fixture", "conifold"], tmp_path, "r2.json")
    t1 = reporting.render_json(reporting.strip_timings(rep1))
    t2 = reporting.render_json(reporting.strip_timings(rep2))
    assert t1 == t2
    assert rep1["timings"]["total_s"] >= 0.0


def test_text_format(tmp_path):
    out = tmp_path / "r.txt"
    status = cli.main(["essential", "--fixture", "a1", "--format", "text",
                       "--out", str(out)])
    assert status == 0
    text = out.read_text()
    assert "essential" in text
    assert "pass" in text.lower()


def test_unknown_triangulation_label_is_input_error(tmp_path):
    status, rep = run_cli(["box", "--fixture", "a1", "--plus", "nope"],
                          tmp_path)
    assert status == 2
    assert rep["body"]["error"] == "InputError"
    assert "nope" in rep["body"]["message"]


def test_malformed_fixture_is_input_error(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("rank 2\npoints\n0 1\nbogus\n")
    status, rep = run_cli(["inspect", "--fixture", str(bad)], tmp_path)
    assert status == 2
    assert rep["body"]["error"] == "ParseError"


def test_duplicate_eps_rejected(tmp_path):
    status, rep = run_cli(["fm", "--fixture", "a1", "--eps", "1e-2",
                           "--eps", "1e-2"], tmp_path)
    assert status == 2
    assert "distinct" in rep["body"]["message"]


def test_bad_trunc_rejected(tmp_path):
    status, rep = run_cli(["gamma-eval", "--fixture", "a1", "--trunc", "0"],
                          tmp_path)
    assert status == 2


def test_tail_bound_violation_is_runtime_failure(tmp_path):
    status, rep = run_cli(["oracle", "--fixture", "a1", "--contour-t", "3.0",
                           "--eps", "1e-2"], tmp_path)
    assert status == 1
    assert rep["body"]["error"] == "TailBoundViolated"


def test_dual_status(tmp_path):
    status, rep = run_cli(["dual-status", "--fixture", "conifold"], tmp_path)
    assert status == 0
    body = rep["body"]
    assert len(body["implemented"]) == 3
    assert len(body["open"]) == 1
    for slot in body["stub"].values():
        assert slot["raises"] == "UnimplementedPairing"
    assert all(m["dim"] == 2 for m in body["modules"].values())


def test_dual_eval_reduces_to_rank_two(tmp_path):
    status, rep = run_cli(["dual-eval", "--fixture", "a1", "--trunc", "8",
                           "--depth", "1"], tmp_path)
    assert status == 0
    for ev in rep["body"]["evaluations"]:
        assert ev["module_dim"] == 2
        assert sum(len(v) for v in ev["reduced"].values()) == 2


def test_fm_matrix_conifold(tmp_path):
    status, rep = run_cli(["fm", "--fixture", "conifold", "--eps", "1e-2"],
                          tmp_path)
    assert status == 0
    body = rep["body"]
    assert body["samples"][0]["det"] > 1e-6
    limit = body["undeformed_limit"]
    assert limit["principal_ratio"] < 1e-9
    ent = limit["entries"]
    for i in range(2):
        for j in range(2):
            want = 1.0 if i == j else 0.0
            assert abs(ent[i][j]["re"] - want) < 1e-8
            assert abs(ent[i][j]["im"]) < 1e-8


def test_gamma_eval_smoke(tmp_path):
    status, rep = run_cli(["gamma-eval", "--fixture", "a1", "--trunc", "6",
                           "--depth", "0"], tmp_path)
    assert status == 0
    sides = {ev["side"] for ev in rep["body"]["evaluations"]}
    assert sides == {"plus", "minus"}
    minus = next(ev for ev in rep["body"]["evaluations"]
                 if ev["side"] == "minus")
    assert "(1/2,0,1/2)" in minus["components"]
