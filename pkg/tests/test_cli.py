import numpy as np
import pytest

from burkqc.beltrami import constant_mu, write_grid
from burkqc.cli import (COMMANDS, EXIT_ASSERT, EXIT_IO, EXIT_OK, EXIT_USAGE, RunConfig, UsageError,
                        config_from_text, execute, main, parse_complex, parse_levels, parse_matrix,
                        parse_real)
from burkqc.ledger import (append_rows, csv_text, format_cell, git_hash, manifest_text, parse_cell,
                           parse_key_values, read_rows)
from burkqc.algebra import PLUS_INFINITY, ExtReal


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_identity(capsys):
    code, out, err = run_cli(capsys, "eval", "--functional", "W", "--matrix", "1,0,0,1")
    assert code == EXIT_OK
    assert out == "1\n"
    assert "input_hash=" in err  # manifest goes to stderr without an output path


def test_eval_expectation_failure(capsys):
    code, _, _ = run_cli(capsys, "eval", "--functional", "W", "--expect", "2")
    assert code == EXIT_ASSERT


def test_minors_paper_example(capsys, tmp_path):
    out = tmp_path / "m.csv"
    code, _, _ = run_cli(capsys, "minors", "--functional", "W", "--certificate", "paper-ex", "-o", str(out))
    assert code == EXIT_OK
    row = read_rows(out.read_text())[0]
    assert abs(float(row["lhs"]) - 0.78) < 0.01
    assert float(row["rhs"]) == 1.0
    assert row["refuted"] == "true"
    assert (tmp_path / "m.csv.manifest").exists()


def test_radial_and_split(capsys):
    code, out, _ = run_cli(capsys, "radial", "--functional", "W", "--profile", "exp", "--expect", "3")
    assert code == EXIT_OK
    assert abs(float(read_rows(out)[0]["mean"]) - 3) < 1e-8
    code, out, _ = run_cli(capsys, "split", "--G", "log", "--H", "t-log", "--expect", "RANK_ONE_CONVEX")
    row = read_rows(out)[0]
    assert code == EXIT_OK
    assert float(row["G0"]) == pytest.approx(-1) and float(row["c"]) == pytest.approx(1)


def test_solve_area_check(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "solve", "--mu", "const:a=0.3", "--N", "256", "--check", "area")
    assert code == EXIT_OK
    row = read_rows(out)[0]
    assert row["status"] == "CONVERGED" and row["pass"] == "true"
    assert abs(float(row["area_residual"])) < 1e-2


def test_usage_errors(capsys, tmp_path):
    assert run_cli(capsys, "eval", "--nope", "1")[0] == EXIT_USAGE
    assert run_cli(capsys, "eval")[0] == EXIT_USAGE
    assert run_cli(capsys, "eval", "--functional", "Q")[0] == EXIT_USAGE
    assert run_cli(capsys, "solve", "--mu", "const:a=1.5", "--N", "64")[0] == EXIT_USAGE
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("command=eval\nfunctional=W\nbogus=1\n")
    assert run_cli(capsys, "run", str(cfg))[0] == EXIT_USAGE


def test_data_errors(capsys, tmp_path):
    assert run_cli(capsys, "solve", "--mu", f"file:{tmp_path / 'missing.grid'}", "--N", "64")[0] == EXIT_IO
    bad = tmp_path / "bad.grid"
    bad.write_text("8 2.0\n1 2\n")
    assert run_cli(capsys, "solve", "--mu", f"file:{bad}", "--N", "64")[0] == EXIT_IO
    assert run_cli(capsys, "run", str(tmp_path / "none.cfg"))[0] == EXIT_IO


def test_grid_file_input(capsys, tmp_path):
    path = tmp_path / "mu.grid"
    write_grid(str(path), constant_mu(0.2, 64).mu)
    code, out, _ = run_cli(capsys, "solve", "--mu", f"file:{path}", "--N", "64")
    assert code == EXIT_OK
    assert float(read_rows(out)[0]["k"]) == pytest.approx(0.2)


def test_determinism_and_seed(capsys, tmp_path):
    args = ["scan-rank1", "--functional", "burkholder:p=3", "--n", "500"]
    bodies = []
    for i, seed in enumerate(["1", "1", "2"]):
        out = tmp_path / f"s{i}.csv"
        assert run_cli(capsys, *args, "--seed", seed, "-o", str(out))[0] == EXIT_OK
        bodies.append(out.read_bytes())
    assert bodies[0] == bodies[1]
    assert bodies[0] != bodies[2]
    h0 = bodies[0].split(b"\n")[0]
    assert h0 == bodies[2].split(b"\n")[0]  # header unchanged, only sampled rows differ


def test_replay_round_trip(capsys, tmp_path):
    out = tmp_path / "a.csv"
    assert run_cli(capsys, "area-check", "--mu", "const:a=0.3", "--N", "64", "--p", "2,pK",
                   "-o", str(out))[0] == EXIT_OK
    code, body, _ = run_cli(capsys, "replay", str(out) + ".manifest")
    assert code == EXIT_OK
    row = read_rows(body)[0]
    assert row["mismatches"] == "0" and row["hash_match"] == "true"
    # tamper with one numeric cell
    text = out.read_text().splitlines()
    cells = text[1].split(",")
    cells[5] = repr(float(cells[5]) + 1.0)
    text[1] = ",".join(cells)
    out.write_text("\n".join(text) + "\n")
    code, body, _ = run_cli(capsys, "replay", str(out) + ".manifest")
    assert code == EXIT_ASSERT and read_rows(body)[0]["mismatches"] == "1"


def test_run_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\ncommand=eval\nfunctional=F\nmatrix=2,0,0,2\n")
    code, out, _ = run_cli(capsys, "run", str(cfg))
    assert code == EXIT_OK
    assert float(out) == pytest.approx(-8 * np.log(2))
    over = tmp_path / "o.cfg"
    over.write_text("functional=W\nseed=3\n")
    code, out, err = run_cli(capsys, "eval", "--config", str(over), "--matrix", "2,0,0,2")
    assert float(out) == pytest.approx(1 + 2 * np.log(2))
    assert "seed=3" in err


def test_manifest_records(capsys, tmp_path):
    out = tmp_path / "r.csv"
    run_cli(capsys, "llogl", "--profile", "exp", "-o", str(out))
    kv = parse_key_values((tmp_path / "r.csv.manifest").read_text())
    for key in ("command", "seed", "param.profile", "param.tol", "version.burkqc", "version.numpy",
                "wall_time_s", "input_hash", "output_hash", "passed"):
        assert key in kv
    assert kv["output_hash"] == git_hash(out.read_bytes())


def test_every_command_has_defaults_or_required():
    for name, (fn, help_text, spec) in COMMANDS.items():
        assert callable(fn) and help_text
        for k, p in spec.items():
            assert p.required or p.default is not None or k in (
                "expect", "h", "tol", "grid_out", "functional", "backend")


def test_run_config_rejects_unknown():
    with pytest.raises(UsageError):
        RunConfig("eval", {"functional": "W", "x": "1"}).resolved()
    with pytest.raises(UsageError):
        RunConfig("frobnicate").resolved()
    with pytest.raises(UsageError):
        config_from_text("functional=W\n")
    cfg = config_from_text("command=eval\nparam.functional=W\nseed=4\n")
    assert cfg.seed == 4 and execute(cfg).passed


def test_parsers():
    assert parse_real("pi/3") == pytest.approx(np.pi / 3)
    assert parse_complex("0.5+0.2j") == 0.5 + 0.2j
    A = parse_matrix("1,2,3,4")
    assert np.allclose(A.to_real(), [[1, 2], [3, 4]])
    assert parse_levels("12x24,48x96") == [(12, 24), (48, 96)]
    with pytest.raises(ValueError):
        parse_matrix("1,2,3")


def test_ledger_helpers(tmp_path):
    assert format_cell(True) == "true"
    assert format_cell(0.1) == "0.1"
    assert format_cell(np.float64(0.25)) == "0.25"
    assert format_cell(float("inf")) == "inf"
    assert format_cell(PLUS_INFINITY) == "inf"
    assert format_cell(ExtReal(2.5)) == "2.5"
    assert parse_cell(format_cell(1 - 2j)) == 1 - 2j
    assert parse_cell("true") is True and parse_cell("abc") == "abc"
    with pytest.raises(ValueError):
        csv_text(["a", "b"], [[1]])
    path = tmp_path / "l.csv"
    append_rows(str(path), ["a", "b"], [[1, 2]])
    append_rows(str(path), ["a", "b"], [[3, 4]])
    assert path.read_text() == "a,b\n1,2\n3,4\n"
    with pytest.raises(ValueError):
        append_rows(str(path), ["a", "c"], [[1, 2]])
    # git's blob id for "hello\n"
    assert git_hash(b"hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a"
    assert manifest_text({"a": 1, "b": 0.5}) == "a=1\nb=0.5\n"
    with pytest.raises(ValueError):
        parse_key_values("a=1\na=2\n")
    with pytest.raises(ValueError):
        parse_key_values("novalue\n")
