import csv

import numpy as np
import pytest

from talentrec import reports
from talentrec.benchmark import freeze
from talentrec.cli import main
from talentrec.config import CONFIG_ENV, RunConfig
from talentrec.pipeline import evaluate_seed, fit_seed


@pytest.fixture(scope="module")
def bench(tmp_path_factory, small_package):
    d = tmp_path_factory.mktemp("bench")
    freeze(small_package, d)
    return d


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh, delimiter="\t"))


def test_evaluate_writes_reports(bench, tmp_path, capsys):
    rc = main(["evaluate", str(bench), "--out", str(tmp_path), "--models", "repeat_last,markov,full", "--seeds", "100..109"])
    assert rc == 0
    summary = _rows(tmp_path / "summary.tsv")
    assert [r["model"] for r in summary] == ["repeat_last", "markov", "full"]
    assert " ± " in summary[0]["ndcg_display"]
    metrics = _rows(tmp_path / "metrics.tsv")
    assert sum(r["model"] == "full" for r in metrics) == 10
    tests = _rows(tmp_path / "tests.tsv")
    assert {r["comparison"] for r in tests} == {"full vs repeat_last", "full vs markov"}
    assert (tmp_path / "timings.tsv").exists() and (tmp_path / "selection.tsv").exists()
    out = capsys.readouterr().out
    assert "CF+RL+TOPSIS" in out and "evaluate_seconds" in out


def test_stats_recomputes_tests(bench, tmp_path):
    main(["evaluate", str(bench), "--out", str(tmp_path), "--models", "markov,full", "--seeds", "100..104"])
    assert main(["stats", str(tmp_path / "metrics.tsv"), "--out", str(tmp_path / "again.tsv")]) == 0
    assert (tmp_path / "again.tsv").read_bytes() == (tmp_path / "tests.tsv").read_bytes()


def test_unknown_model_exit_2(bench, tmp_path, capsys):
    assert main(["evaluate", str(bench), "--out", str(tmp_path), "--models", "markov,sasrec"]) == 2
    assert "sasrec" in capsys.readouterr().err


def test_missing_seed_exit_2(bench, tmp_path):
    assert main(["evaluate", str(bench), "--out", str(tmp_path), "--models", "markov", "--seeds", "5"]) == 2


def test_dump_stats(bench, tmp_path):
    assert main(["evaluate", str(bench), "--out", str(tmp_path), "--models", "markov", "--seeds", "100", "--dump-stats"]) == 0
    for f in ("counts", "probs", "sims", "popularity", "criteria"):
        assert (tmp_path / "stats" / f"{f}.tsv").exists()


def test_prepare(tmp_path, bench, capsys):
    args = ["prepare", "--histories", str(bench / "histories.tsv"), "--items", str(bench / "items.tsv")]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    first = capsys.readouterr().out.split()[-1]
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    assert capsys.readouterr().out.split()[-1] == first
    assert len(first) == 64


def test_prepare_missing_file(tmp_path, capsys):
    rc = main(["prepare", "--histories", str(tmp_path / "h"), "--items", str(tmp_path / "i"), "--out", str(tmp_path)])
    assert rc == 2
    assert "not found" in capsys.readouterr().err


def test_prepare_bad_reference(tmp_path):
    (tmp_path / "h.tsv").write_text("u1\tA,X99,A\n")
    (tmp_path / "i.tsv").write_text("A\tweb developer\t\t\n")
    args = ["prepare", "--histories", str(tmp_path / "h.tsv"), "--items", str(tmp_path / "i.tsv"), "--out", str(tmp_path / "o")]
    assert main(args) == 2


def test_synth(tmp_path, capsys):
    assert main(["synth", "regime-jobhop", "--out", str(tmp_path / "a"), "--synth-seed", "4"]) == 0
    assert (tmp_path / "a" / "meta.json").exists()
    assert main(["synth", "regime-jobhop", "--out", str(tmp_path / "b"), "--users", "5"]) == 2


def test_config_env(bench, tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seeds = 100,101\ncomparisons = markov\n")
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    assert main(["evaluate", str(bench), "--out", str(tmp_path / "o"), "--models", "markov,full"]) == 0
    assert len(_rows(tmp_path / "o" / "metrics.tsv")) == 4
    assert [r["comparison"] for r in _rows(tmp_path / "o" / "tests.tsv")] == ["full vs markov"]
    assert main(["evaluate", str(bench), "--out", str(tmp_path / "o"), "--set", "nonsense=1"]) == 2


def test_sensitivity_cli(bench, tmp_path):
    assert main(["sensitivity", str(bench), "--out", str(tmp_path), "--seeds", "100"]) == 0
    rows = _rows(tmp_path / "sensitivity.tsv")
    assert len(rows) == 7 and rows[0]["removed_proxy"] == "(none)"
    assert rows[1]["display"].endswith(")")


def test_explain(bench, small_package, capsys):
    user = small_package.histories[3].user_id
    assert main(["explain", str(bench), "--user", user]) == 0
    out = capsys.readouterr().out
    assert "CF" in out and "TOPSIS" in out and "*" in out
    assert main(["explain", str(bench), "--user", "nobody"]) == 2


def test_explain_table(small_package):
    ctx = fit_seed(small_package, 20260331, RunConfig())
    res = evaluate_seed(ctx, ["markov", "cf_topsis", "rl_topsis", "full"])
    for uid in ctx.data.user_ids[:40]:
        exp = reports.explain_user(ctx, res, uid)
        assert sum(r.is_target for r in exp.rows) == 1
        assert 5 <= len(exp.rows) <= 6
        vals = np.array([[r.cf, r.rl, r.topsis, r.full] for r in exp.rows])
        assert vals.min() >= 0 and vals.max() <= 1
        assert exp.rows[0].full == 1.0
        assert exp.target_ranks["full"] >= 1
        assert abs(exp.mixed_criterion_weights.sum() - 1) < 1e-9
        text = exp.format()
        assert f"{exp.target}*" in text


def test_pm_format():
    assert reports.pm(0.42134, 0.00931) == "0.4213 ± 0.0093"
