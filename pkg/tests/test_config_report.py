import json
import subprocess
import sys
from pathlib import Path

import pytest

from gl2d.cli import main as cli_main
from gl2d.config import Config, load_config, parse_config_text
from gl2d.errors import ConfigRejected
from gl2d.report import CheckRecord, Report


def test_default_config_is_the_acceptance_shape():
    cfg = Config().validated()
    assert (cfg.p, cfg.f, cfg.e, cfg.w) == (7, 2, 1, 1)
    assert cfg.r_vec == (3, 3)
    assert cfg.resolved_backend == "exact"
    assert cfg.kappa == 1
    assert cfg.ndigits == 5


def test_config_file_parsing(tmp_path):
    text = """
    # comment
    p = 7
    f = 1
    w = 2
    e = 2
    r = 3,3
    n_max = 1
    suites = arith, coset
    seed = 42
    kappa_mode = paper_literal
    """
    cfg = parse_config_text(text)
    assert cfg.w == 2 and cfg.e == 2
    assert cfg.suites == ("arith", "coset")
    assert cfg.kappa == 2
    assert cfg.resolved_backend == "tracked"
    path = tmp_path / "run.cfg"
    path.write_text(text)
    assert load_config(path) == cfg


def test_config_rejections():
    with pytest.raises(ConfigRejected):
        Config(p=6).validated()
    with pytest.raises(ConfigRejected):
        Config(r_vec=(3,)).validated()
    with pytest.raises(ConfigRejected):
        Config(r_vec=(3, 9)).validated()
    with pytest.raises(ConfigRejected):
        Config(e=2, backend="exact").validated()
    with pytest.raises(ConfigRejected):
        Config(suites=("nope",)).validated()
    with pytest.raises(ConfigRejected):
        parse_config_text("bogus_key = 1")
    with pytest.raises(ConfigRejected):
        parse_config_text("p 7")


def test_theorem_hypothesis_gate():
    # w*f = 1 is outside the enumerated branches
    with pytest.raises(ConfigRejected):
        Config(p=7, f=1, w=1, r_vec=(3,), suites=("theorem",)).validated()
    # r_j outside (2, p-3)
    with pytest.raises(ConfigRejected):
        Config(r_vec=(1, 1), suites=("theorem",)).validated()
    # fine without the theorem suite
    Config(r_vec=(1, 1), suites=("arith",)).validated()


def test_report_json_deterministic_and_timing_free():
    rep = Report({"p": 7, "f": 2, "e": 1, "w": 1, "r_vec": [3, 3],
                  "backend": "exact", "seed": 0}, "numba")
    rep.add(CheckRecord("arith", "x", "law", "pass"))
    rep.add(CheckRecord("arith", "y", "law2", "divergence", {}, "detail"))
    rep.timings["arith"] = 1.23
    blob = rep.to_json()
    assert "1.23" not in blob
    assert json.loads(blob)["counts"] == {"pass": 1, "fail": 0, "divergence": 1, "skip": 0}
    rep2 = Report(rep.config_summary, "numba")
    rep2.add(CheckRecord("arith", "x", "law", "pass"))
    rep2.add(CheckRecord("arith", "y", "law2", "divergence", {}, "detail"))
    rep2.timings["arith"] = 9.87
    assert rep2.to_json() == blob
    assert rep.exit_code(disputed="fail") == 1
    assert rep.exit_code(disputed="divergence") == 0


def test_cli_round_trip(tmp_path):
    out = tmp_path / "rep"
    rc = cli_main([
        "--p", "3", "--f", "1", "--w", "2", "--e", "1", "--r", "1,1",
        "--suite", "weight", "--suite", "coset", "--n-max", "1",
        "--out", str(out), "--seed", "3",
    ])
    assert rc == 0
    data = json.loads((out / "report.json").read_text())
    assert data["config"]["p"] == 3
    assert data["counts"]["fail"] == 0
    assert (out / "report.txt").exists()
    # reports are byte-identical across reruns with the same config and seed
    first = (out / "report.json").read_bytes()
    rc = cli_main([
        "--p", "3", "--f", "1", "--w", "2", "--e", "1", "--r", "1,1",
        "--suite", "weight", "--suite", "coset", "--n-max", "1",
        "--out", str(out), "--seed", "3",
    ])
    assert rc == 0
    assert (out / "report.json").read_bytes() == first


def test_cli_config_error_exit_code():
    assert cli_main(["--p", "6"]) == 2


def test_cli_rejects_malformed_r_length():
    assert cli_main(["--r", "3,3,3"]) == 2
