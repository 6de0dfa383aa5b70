"""Command-line interface tests, run in-process through cli.main."""

import numpy as np
import pytest

from ncstokes import cli
from ncstokes.harness import CSV_HEADER
from conftest import L3_TEXT


def test_solve_unit_square(capsys):
    rc = cli.main(["solve", "--nx", "8", "--ny", "8"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "dims: red 18, black 18, full space 160" in out
    assert "errors vs exact solution" in out
    assert "momentum residual" in out


def test_solve_dense_matches_cg(capsys):
    rc = cli.main(["solve", "--nx", "8", "--ny", "8", "--solver", "dense"])
    assert rc == 0
    assert "errors vs exact solution" in capsys.readouterr().out


def test_solve_masked_domain(tmp_path, capsys):
    mask = tmp_path / "l.mask"
    mask.write_text(L3_TEXT + "\n")
    rc = cli.main(["solve", "--mask", str(mask), "--h", "0.5"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "8 squares" in out
    # not the unit square: no comparison against the reference solution
    assert "errors vs exact solution" not in out


def test_solve_non_unit_spacing_skips_errors(capsys):
    rc = cli.main(["solve", "--nx", "8", "--ny", "8", "--h", "0.1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "errors vs exact solution" not in out


def test_invalid_mesh_exits_1(capsys):
    rc = cli.main(["solve", "--nx", "1", "--ny", "1"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "mesh validation error" in err
    assert "square (0, 0)" in err


def test_mask_with_hole_exits_1(tmp_path, capsys):
    mask = tmp_path / "holed.mask"
    mask.write_text("111\n101\n111\n")
    rc = cli.main(["solve", "--mask", str(mask)])
    err = capsys.readouterr().err
    assert rc == 1
    assert "mesh validation error" in err


def test_solver_failure_exits_2(capsys):
    rc = cli.main(["solve", "--nx", "8", "--ny", "8", "--max-iters", "1"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "solver failure" in err


def test_dump_fields(tmp_path, capsys):
    rc = cli.main(
        ["solve", "--nx", "4", "--ny", "4", "--dump-fields", str(tmp_path)]
    )
    capsys.readouterr()
    assert rc == 0
    velocity = (tmp_path / "velocity.txt").read_text().strip().splitlines()
    pressure = (tmp_path / "pressure.txt").read_text().strip().splitlines()
    assert len(velocity) == 16 and len(pressure) == 16
    assert len(velocity[0].split()) == 8
    assert len(pressure[0].split()) == 3


def test_oracle_cross_check(capsys):
    rc = cli.main(["solve", "--nx", "8", "--ny", "8", "--oracle"])
    out = capsys.readouterr().out
    assert rc == 0
    line = [l for l in out.splitlines() if l.startswith("oracle:")]
    assert len(line) == 1
    # both reported differences sit at solver precision
    for chunk in line[0].split(","):
        value = float(chunk.split("=")[-1])
        assert value <= 1e-8


def test_oracle_too_large_exits_2(capsys):
    rc = cli.main(["solve", "--nx", "64", "--ny", "64", "--oracle"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "oracle" in err


def test_converge_writes_csv(tmp_path, capsys):
    out_file = tmp_path / "table.csv"
    rc = cli.main(["converge", "--levels", "4,8", "--out", str(out_file)])
    capsys.readouterr()
    assert rc == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    assert lines[1].startswith("4x4,") and lines[2].startswith("8x8,")


def test_converge_rejects_unsorted_levels(capsys):
    rc = cli.main(["converge", "--levels", "16,8"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "ascending" in err


def test_converge_rejects_garbage_levels(capsys):
    rc = cli.main(["converge", "--levels", "8,foo"])
    assert rc == 2


def test_check_runs_clean(capsys):
    rc = cli.main(["check"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.count("ok") >= 6
    assert "FAIL" not in out


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
