"""CLI tests: exit codes, output formats, env plumbing, long-run wiring."""
import json

import pytest

from rezeta.cli import (CSV_HEADER, LONGRUN_RANGE, LONGRUN_TRIALS,
                        _checkpoint_path, _parser, _threads_default, main)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- exit codes ----------------------------------------------------------------

def test_usage_errors_exit_2(capsys):
    for argv in ([], ["frobnicate"], ["mc", "--sigma", "abc", "--trials", "10"],
                 ["sigma0", "--digits"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2, argv


def test_computation_errors_exit_1(capsys):
    # config violation: low sigma with a small cutoff
    code, out, err = run(capsys, "mc", "--sigma", "1.01", "--trials", "10",
                         "--cutoff", "5000")
    assert code == 1 and "error:" in err and out == ""
    # missing trials without --long-run
    code, _, err = run(capsys, "mc", "--sigma", "2")
    assert code == 1 and "--trials" in err
    # scan range flags are optional in argparse (--long-run fills them),
    # so a half-specified range is a computation error, not usage
    code, _, err = run(capsys, "scan", "--from", "10")
    assert code == 1 and "--from and --to" in err
    # certify below the valid line
    code, _, err = run(capsys, "certify", "--from", "2", "--to", "5")
    assert code == 1 and "error:" in err
    # table rows out of range
    code, _, err = run(capsys, "table", "--rows", "0")
    assert code == 1 and "--rows" in err


# -- sigma0 ----------------------------------------------------------------------

def test_sigma0_text(capsys):
    code, out, _ = run(capsys, "sigma0", "--digits", "12")
    assert code == 0
    assert "1.192347337186" in out
    assert "evaluations" in out


def test_sigma0_json(capsys):
    code, out, _ = run(capsys, "sigma0", "--digits", "10", "--emit", "json")
    assert code == 0
    body = json.loads(out)
    assert body["schema"] == 1
    assert body["value"] == "1.1923473372"
    assert body["digits"] == 10
    assert body["evaluations"] >= 2
    assert float(body["enclosure_width"]) < 1e-10


def test_sigma0_strategy_flags(capsys):
    code, out, _ = run(capsys, "sigma0", "--digits", "6", "--method", "arcsin",
                       "--strategy", "convex")
    assert code == 0 and "1.192347" in out


# -- prime-zeta ------------------------------------------------------------------

def test_prime_zeta(capsys):
    code, out, _ = run(capsys, "prime-zeta", "--sigma", "3", "--digits", "20")
    assert code == 0
    assert "0.1747626392994435364" in out
    code, out, _ = run(capsys, "prime-zeta", "--sigma", "1.04")
    assert code == 1


# -- scan / certify ---------------------------------------------------------------

def test_scan_clean_range_csv(capsys):
    code, out, _ = run(capsys, "scan", "--from", "10", "--to", "12",
                       "--emit", "csv")
    assert code == 0
    assert out.strip() == CSV_HEADER  # header only, no windows


def test_scan_json(capsys):
    code, out, _ = run(capsys, "scan", "--from", "10", "--to", "30",
                       "--emit", "json")
    assert code == 0
    body = json.loads(out)
    assert body["schema"] == 1
    assert body["windows"] == []
    assert body["empirical_d"] == 0.0
    assert body["evaluations"] > 0
    assert len(body["certified"]) == 1
    piece = body["certified"][0]
    assert piece["t_lo"] == 10.0 and piece["t_hi"] == 30.0


def test_scan_checkpoint_file(tmp_path, capsys):
    cp = tmp_path / "w.ckpt"
    code, out, _ = run(capsys, "scan", "--from", "10", "--to", "60",
                       "--checkpoint", str(cp), "--emit", "json")
    assert code == 0
    recs = [json.loads(line) for line in cp.read_text().splitlines()]
    assert recs and all(r["schema"] == 1 for r in recs)
    assert recs[-1]["t_done"] == 60.0


def test_certify_success_json(capsys):
    code, out, _ = run(capsys, "certify", "--from", "10", "--to", "40",
                       "--emit", "json")
    assert code == 0
    body = json.loads(out)
    assert body["certified"] is True and body["steps"] > 50


def test_certify_failure_exit_1(capsys):
    code, out, _ = run(capsys, "certify", "--from", "682112.5",
                       "--to", "682113.5", "--emit", "json")
    assert code == 1
    body = json.loads(out)
    assert body["certified"] is False
    assert 682112.5 < body["t_fail"] < 682113.0
    assert body["reason"] in ("headroom", "step-underflow")


# -- mc ---------------------------------------------------------------------------

def test_mc_json(capsys):
    code, out, _ = run(capsys, "mc", "--sigma", "2", "--trials", "1000",
                       "--seed", "1", "--emit", "json")
    assert code == 0
    body = json.loads(out)
    assert body["negative_hits"] == 0
    assert body["trials"] == 1000
    assert body["ci_method"] == "garwood"
    assert body["ci95"][0] == 0.0
    assert "arg_tail_rms" in body and "prime_cutoff" in body


def test_mc_text(capsys):
    code, out, _ = run(capsys, "mc", "--sigma", "2", "--trials", "500")
    assert code == 0
    assert "negative_hits: 0 / 500" in out


# -- output / env plumbing ---------------------------------------------------------

def test_output_file(tmp_path, capsys):
    dest = tmp_path / "out.json"
    code, out, _ = run(capsys, "sigma0", "--digits", "5", "--emit", "json",
                       "--output", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["value"] == "1.19235"


def test_output_file_error_exits_1(tmp_path, capsys):
    code, _, err = run(capsys, "sigma0", "--digits", "5",
                       "--output", str(tmp_path / "no" / "such" / "dir.txt"))
    assert code == 1 and "error:" in err


def test_threads_default_env(monkeypatch):
    monkeypatch.delenv("REZETA_THREADS", raising=False)
    assert _threads_default() == 1
    monkeypatch.setenv("REZETA_THREADS", "6")
    assert _threads_default() == 6
    monkeypatch.setenv("REZETA_THREADS", "junk")
    assert _threads_default() == 1
    monkeypatch.setenv("REZETA_THREADS", "-3")
    assert _threads_default() == 1


def test_checkpoint_path_env(monkeypatch, tmp_path):
    monkeypatch.delenv("REZETA_CHECKPOINT_DIR", raising=False)
    assert _checkpoint_path(None) is None
    assert _checkpoint_path("x.ckpt") == "x.ckpt"
    monkeypatch.setenv("REZETA_CHECKPOINT_DIR", str(tmp_path))
    assert _checkpoint_path("x.ckpt") == str(tmp_path / "x.ckpt")
    assert _checkpoint_path("/abs/y.ckpt") == "/abs/y.ckpt"


# -- long-run wiring (parse only; execution is cluster-scale) ----------------------

def test_long_run_flags_parse():
    p = _parser()
    ns = p.parse_args(["mc", "--sigma", "1", "--long-run"])
    assert ns.long_run is True and ns.trials is None
    ns = p.parse_args(["scan", "--long-run"])
    assert ns.long_run is True and ns.t_from is None and ns.t_to is None
    ns = p.parse_args(["table", "--long-run"])
    assert ns.long_run is True and ns.rows is None
    assert LONGRUN_TRIALS == 10 ** 9
    assert LONGRUN_RANGE[0] == 10.0 and LONGRUN_RANGE[1] > 1.6e7


def test_table_text_five_rows(capsys):
    # replaying five windows takes minutes; --rows 1 keeps this in module
    # scope and the acceptance suite does rows 1-5
    code, out, _ = run(capsys, "table", "--rows", "1", "--emit", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1].startswith("682112.9169,-0.0028,682112.8913,")
