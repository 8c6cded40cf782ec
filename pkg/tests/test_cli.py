"""Command-line entry points: every subcommand, exit codes, and rendering."""

import json

import pytest

from monotiles import (
    ManagedMatrix,
    ManagedSequence,
    Pattern,
    Pruefer,
    FiniteSubset,
    build_hierarchy,
    build_lattice_ladder,
    build_pruefer_ladder,
    render_pattern,
)
from monotiles.cli import main
from monotiles.errors import RenderUnsupportedError
from monotiles.pipeline import write_json

TERNARY = ManagedMatrix([[1, 1, 1], [2, 1, 1], [0, 1, 1]])


def _write(tmp_path, name, data):
    path = tmp_path / name
    write_json(data, path)
    return str(path)


def _ladder_file(tmp_path, depth=3):
    return _write(tmp_path, "ladder.json", build_lattice_ladder(1, depth).to_json())


def _matrices_file(tmp_path, count=3):
    return _write(tmp_path, "matrices.json", ManagedSequence([TERNARY] * count).to_json())


def _hier_file(tmp_path, depth=3):
    h = build_hierarchy(build_lattice_ladder(1, depth), [TERNARY] * depth)
    return _write(tmp_path, "hier.json", h.to_json())


def test_render_pattern_interval():
    ladder = build_lattice_ladder(1, 1)
    p = Pattern(ladder.levels[1], (2, 1, 2))
    assert render_pattern(p) == "2 1 2"
    as_json = json.loads(render_pattern(p, "json"))
    assert as_json["symbols"] == [2, 1, 2]


def test_render_pattern_box():
    ladder = build_lattice_ladder(2, 1)
    p = Pattern(ladder.levels[1], range(9))
    assert render_pattern(p) == "0 1 2\n3 4 5\n6 7 8"


def test_render_pattern_refuses_non_lattice():
    ladder = build_pruefer_ladder(2, 1)
    p = Pattern(ladder.levels[1], (1, 2))
    with pytest.raises(RenderUnsupportedError):
        render_pattern(p)


def test_render_pattern_refuses_gaps():
    ctx = build_lattice_ladder(1, 1).ctx
    p = Pattern(FiniteSubset(ctx, [(0,), (2,)]), (1, 2))
    with pytest.raises(RenderUnsupportedError):
        render_pattern(p)


def test_folner_build_and_check(tmp_path, capsys):
    out = tmp_path / "art"
    assert main(["--out", str(out), "folner", "build",
                 "--group", '{"kind":"lattice","d":1}', "--depth", "3"]) == 0
    seen = json.loads(capsys.readouterr().out)
    assert seen["levels"] == [1, 3, 9, 27]
    assert main(["folner", "check", str(out / "ladder.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True


def test_folner_check_flags_broken_ladder(tmp_path, capsys):
    ladder = build_lattice_ladder(1, 2)
    data = ladder.to_json()
    data["glue"][0] = [[-1], [1]]  # identity digit removed
    path = _write(tmp_path, "broken.json", data)
    assert main(["folner", "check", path]) == 1
    assert json.loads(capsys.readouterr().out)["reason"] == "identity-missing-in-glue"


def test_folner_check_missing_file_exits_nonzero(tmp_path, capsys):
    assert main(["folner", "check", str(tmp_path / "nope.json")]) == 1
    assert "error" in capsys.readouterr().err.lower()


def test_folner_build_pruefer_route(tmp_path, capsys):
    out = tmp_path / "art"
    assert main(["--out", str(out), "folner", "build",
                 "--group", '{"kind":"pruefer","p":2}', "--depth", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["levels"] == [1, 2, 4, 8, 16]


def test_folner_defect_table(tmp_path, capsys):
    path = _ladder_file(tmp_path)
    assert main(["folner", "defect", path, "--K", "[[1]]"]) == 0
    table = json.loads(capsys.readouterr().out)
    assert table["window_defects"][1]["defect"] == "1/3"


def test_blocks_build_verify_and_render(tmp_path, capsys):
    ladder = _ladder_file(tmp_path)
    matrices = _matrices_file(tmp_path)
    out = tmp_path / "art"
    assert main(["--out", str(out), "blocks", "build",
                 "--ladder", ladder, "--matrices", matrices]) == 0
    capsys.readouterr()
    hier = str(out / "hier.json")
    assert main(["blocks", "verify-c3", hier]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True
    assert main(["blocks", "x0", hier, "--level", "1", "--render", "text"]) == 0
    assert capsys.readouterr().out.strip() == "2 1 2"


def test_blocks_build_honors_depth_cap(tmp_path, capsys):
    out = tmp_path / "art"
    assert main(["--out", str(out), "blocks", "build", "--ladder", _ladder_file(tmp_path),
                 "--matrices", _matrices_file(tmp_path), "--depth", "2"]) == 0
    written = json.loads((out / "hier.json").read_text())
    assert len(written["families"]) == 3


def test_analyze_returns_and_kr(tmp_path, capsys):
    hier = _hier_file(tmp_path)
    assert main(["analyze", "returns", "--hier", hier, "-n", "0", "-m", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["count"] == 9 and data["equal"] is True
    assert main(["analyze", "kr", "--hier", hier, "-n", "0", "-m", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True


def test_analyze_boundary(tmp_path, capsys):
    path = _ladder_file(tmp_path)
    assert main(["analyze", "boundary", "--ladder", path, "-g", "[1]",
                 "--levels", "0..3"]) == 0
    rows = json.loads(capsys.readouterr().out)["masses"]
    assert [r["mass"] for r in rows] == ["1", "1/3", "1/9", "1/27"]


def test_measures_check_limit_lemma8(tmp_path, capsys):
    seq = _write(tmp_path, "seq.json", ManagedSequence([ManagedMatrix([[2, 1], [1, 2]])] * 4).to_json())
    assert main(["measures", "check", seq]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ratios"] == [3, 3, 3, 3] and data["positivity_horizon"] == 0
    assert main(["measures", "limit", seq, "-n", "0", "-d", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ok"] is True and len(data["nesting"]) == 3
    assert main(["measures", "lemma8", seq, "--K", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["boundaries"] == [0, 2, 4]


def test_measures_realize(tmp_path, capsys):
    out = tmp_path / "art"
    assert main(["--out", str(out), "measures", "realize", "--d", "2",
                 "--ladder", _ladder_file(tmp_path, depth=5), "--tol", "1/100"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["depth"] == 5
    assert (out / "realized.json").exists()


def test_pipeline_default_config(capsys):
    assert main(["pipeline", "default-config"]) == 0
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["group"] == {"kind": "lattice", "d": 1}


def test_pipeline_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["--out", str(out), "pipeline", "run"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert all(stage["ok"] for stage in report["stages"])
    for name in ("ladder.json", "matrices.json", "hier.json", "report.json"):
        assert (out / name).exists()


def test_unknown_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
