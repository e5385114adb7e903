import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ltlab import cli
from ltlab.cli import EXIT_FAIL, EXIT_GUARD, EXIT_OK, EXIT_USAGE, RunConfig


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


# ---------------------------------------------------------------- config


configs = st.builds(
    RunConfig,
    p=st.sampled_from(cli.SUPPORTED_PRIMES),
    prec=st.integers(2, 6),
    wmax=st.none() | st.integers(0, 60),
    ydeg=st.none() | st.integers(3, 700),
    udeg=st.integers(0, 3),
    suites=st.lists(st.sampled_from(cli.SUITES), unique=True).map(tuple),
    output=st.none() | st.from_regex(r"[a-z0-9_/.]{1,20}", fullmatch=True),
    threads=st.none() | st.integers(1, 8),
    method=st.sampled_from(["gauss", "zeta", "both"]),
    module=st.sampled_from(["A", "L", "both"]),
    corrupt_tau=st.booleans(),
    timings=st.booleans(),
)


@given(configs)
def test_config_round_trip(cfg):
    assert RunConfig.from_text(cfg.to_text()) == cfg


def test_config_comments_and_errors():
    cfg = RunConfig.from_text("# run\np = 5  # prime\nsuites = curve, reps\n")
    assert cfg.p == 5 and cfg.suites == ("curve", "reps")
    with pytest.raises(cli.UsageError):
        RunConfig.from_text("bogus=1\n")
    with pytest.raises(cli.UsageError):
        RunConfig.from_text("p 5\n")
    with pytest.raises(cli.UsageError):
        RunConfig.from_text("timings=maybe\n")


def test_threads_env(monkeypatch):
    monkeypatch.setenv("LTLAB_THREADS", "3")
    assert RunConfig().resolved_threads() == 3
    assert RunConfig(threads=2).resolved_threads() == 2


def test_config_file_flag(tmp_path, capsys):
    f = tmp_path / "run.cfg"
    f.write_text(RunConfig(p=5, suites=("curve",)).to_text())
    code, out = run(["verify-all", "--config", str(f), "--json"], capsys)
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["p"] == 5 and all(c["id"].startswith("curve.") for c in rep["checks"])


# ---------------------------------------------------------------- exit codes


def test_curve_ok(capsys):
    code, out = run(["curve", "--p", "3"], capsys)
    assert code == EXIT_OK and "0 fail" in out


def test_corrupt_tau(capsys):
    code, out = run(["curve", "--p", "3", "--corrupt-tau"], capsys)
    assert code == EXIT_FAIL
    assert "FAILED curve.automorphisms" in out and "tau preserves" in out


def test_unknown_flag(capsys):
    assert cli.main(["curve", "--bogus"]) == EXIT_USAGE
    assert cli.main([]) == EXIT_USAGE


def test_empty_suite(capsys):
    assert cli.main(["verify-all", "--p", "3", "--suites", ""]) == EXIT_USAGE
    assert cli.main(["verify-all", "--p", "3", "--suites", "nope"]) == EXIT_USAGE


def test_guard_violations(capsys):
    assert cli.main(["tate", "--p", "3", "--max-w", "70"]) == EXIT_GUARD
    assert cli.main(["tate", "--p", "13"]) == EXIT_GUARD
    assert cli.main(["fgl", "height", "--p", "7"]) == EXIT_GUARD
    assert cli.main(["slopes", "--p", "7", "--method", "zeta"]) == EXIT_GUARD


def test_slopes_both(capsys):
    code, out = run(["slopes", "--p", "5", "--method", "both", "--json"], capsys)
    assert code == EXIT_OK
    rep = json.loads(out)
    assert {c["status"] for c in rep["checks"]} == {"pass"}


def test_tate_p3_full(capsys):
    code, out = run(["tate", "--p", "3", "--max-w", "60", "--json"], capsys)
    assert code == EXIT_OK
    rep = json.loads(out)
    inv = [c for c in rep["checks"] if c["id"] == "tate.invariants"][0]
    assert inv["status"] == "pass" and inv["data"]["mismatches"] == 0


def test_fgl_subcommand(capsys):
    code, out = run(["fgl", "recognize", "--p", "5", "--json"], capsys)
    assert code == EXIT_OK
    assert [c["id"] for c in json.loads(out)["checks"]] == ["fgl.recognize"]


# ---------------------------------------------------------------- reports


def test_report_schema_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify-all", "--p", "3", "--suites", "curve,reps", "--output", str(a)]) == EXIT_OK
    assert cli.main(["verify-all", "--p", "3", "--suites", "curve,reps", "--output", str(b), "--threads", "1"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert set(rep) == {"suite", "p", "version", "summary", "checks"}
    ids = [c["id"] for c in rep["checks"]]
    assert ids == sorted(ids) and len(ids) == len(set(ids))
    for c in rep["checks"]:
        assert set(c) == {"id", "anchor", "status", "data"} and c["anchor"]


def test_timings_flag(capsys):
    code, out = run(["curve", "--p", "3", "--json", "--timings"], capsys)
    assert code == EXIT_OK
    assert all("seconds" in c for c in json.loads(out)["checks"])


def test_p13_skips(capsys):
    code, out = run(["verify-all", "--p", "13", "--json"], capsys)
    assert code == EXIT_OK
    rep = json.loads(out)
    status = {c["id"]: c["status"] for c in rep["checks"]}
    assert all(v == "skipped" for k, v in status.items() if k.startswith(("tate.", "fgl.")))
    assert all(v == "pass" for k, v in status.items() if k.startswith(("curve.", "reps.")))
    assert status["slopes.stickelberger"] == "pass"
    assert rep["summary"]["skipped"] > 0


def test_duplicate_ids_rejected():
    r = cli.CheckRecord("x", "a", "pass")
    with pytest.raises(RuntimeError):
        cli.Report("s", 3, [r, r], "0").as_dict()


def test_check_exceptions_become_failures():
    def boom():
        raise ArithmeticError("broken")

    def guarded():
        from ltlab.tate import GuardError

        raise GuardError("too big")

    recs = cli.run_checks(
        [cli.Check("b", "anchor", boom), cli.Check("a", "anchor", guarded), cli.Check("c", "anchor", lambda: (True, {}))],
        threads=2,
    )
    assert [(r.id, r.status) for r in recs] == [("a", "skipped"), ("b", "fail"), ("c", "pass")]
