import json
from fractions import Fraction as F
from pathlib import Path

from hedgecert.cli import main
from hedgecert.marketio import claim_to_json, dump_market
from markets import (
    binomial_with_free_option,
    spread_option_only_market,
    wide_quote_identical_options_market,
)

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    out = json.loads(captured.out) if captured.out.strip() else None
    err = json.loads(captured.err) if captured.err.strip() else None
    return code, out, err


def test_check_na_holds(capsys):
    code, out, err = run(capsys, "check-na", str(DATA / "m1.json"))
    assert code == 0
    assert out["verdict"] == "holds"
    assert err is None


def test_check_na_missing_file(capsys):
    code, out, err = run(capsys, "check-na", str(DATA / "nosuchfile.json"))
    assert code == 4
    assert out is None
    assert err["error"]["type"] == "io-error"


def test_check_na_and_nar_on_pinned_market(capsys):
    code, out, _ = run(capsys, "check-na", str(DATA / "m2.json"))
    assert code == 0 and out["verdict"] == "holds"
    code, out, _ = run(capsys, "check-nar", str(DATA / "m2.json"))
    assert code == 3
    assert out["verdict"] == "fails"
    assert "blocking" in out["diagnostics"]


def test_check_nar_holds_with_witness(capsys):
    code, out, _ = run(capsys, "check-nar", str(DATA / "m3.json"))
    assert code == 0
    assert out["values"]["slack"] == "1/2"
    witness = out["certificates"]["witness"]
    assert witness["interiorMeasure"]["weights"] == ["1/2", "1/2"]


def test_superhedge_call(capsys):
    code, out, _ = run(
        capsys, "superhedge", str(DATA / "m1.json"), "--claim", str(DATA / "call.json")
    )
    assert code == 0
    assert out["values"]["price"] == "1/3"
    assert out["certificates"]["strategy"]["dynamic"]["0"] == ["2/3"]


def test_dual_call(capsys):
    code, out, _ = run(
        capsys, "dual", str(DATA / "m1.json"), "--claim", str(DATA / "call.json")
    )
    assert code == 0
    assert out["values"]["value"] == "1/3"
    assert out["certificates"]["measure"]["weights"] == ["1/3", "2/3"]


def test_bounds_excluding_named_option(capsys, tmp_path):
    path = tmp_path / "m3.json"
    path.write_text(dump_market(wide_quote_identical_options_market()))
    code, out, _ = run(capsys, "bounds", str(path), "--option", "g2")
    assert code == 0
    assert out["values"] == {"lower": "1", "upper": "2"}


def test_bounds_unknown_option(capsys):
    code, out, err = run(capsys, "bounds", str(DATA / "m3.json"), "--option", "zzz")
    assert code == 4
    assert err["error"]["type"] == "invalid-input"


def test_redundancy_reports_and_exit_code(capsys):
    code, out, _ = run(capsys, "redundancy", str(DATA / "m3.json"))
    assert code == 3
    assert out["verdict"] == "fails"
    replications = out["certificates"]["replications"]
    assert set(replications) == {"g1", "g2"}
    assert replications["g2"]["staticSigned"] == [{"option": "g1", "position": "1"}]


def test_redundancy_all_clear(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(dump_market(spread_option_only_market()))
    code, out, _ = run(capsys, "redundancy", str(path))
    assert code == 0
    assert out["verdict"] == "holds"


def test_sharper_ftap_positive(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(dump_market(spread_option_only_market()))
    code, out, _ = run(capsys, "sharper-ftap", str(path), "--verify")
    assert code == 0
    assert out["verdict"] == "holds"
    assert set(out["certificates"]["dominating"]) == {"P0", "P1"}


def test_sharper_ftap_precondition(capsys):
    code, out, err = run(capsys, "sharper-ftap", str(DATA / "m3.json"))
    assert code == 3
    assert out["verdict"] == "precondition-failed"
    assert err["error"]["type"] == "precondition"


def test_sharper_ftap_arbitrage(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(dump_market(binomial_with_free_option()))
    code, out, _ = run(capsys, "sharper-ftap", str(path))
    assert code == 3
    assert out["certificates"]["arbitrage"]["gains"] == ["1", "0"]


def test_dominate(capsys):
    code, out, _ = run(capsys, "dominate", str(DATA / "m1.json"), "--generator", "up", "--verify")
    assert code == 0
    assert out["certificates"]["measure"]["weights"] == ["1/3", "2/3"]


def test_dominate_fails_without_robustness(capsys):
    code, out, err = run(capsys, "dominate", str(DATA / "m2.json"), "--generator", "w1")
    assert code == 3
    assert out["verdict"] == "fails"
    assert err["error"]["type"] == "arbitrage"


def test_strict_dual(capsys, tmp_path):
    claim = tmp_path / "claim.json"
    m = wide_quote_identical_options_market()
    from hedgecert.model import Claim

    claim.write_text(json.dumps(claim_to_json(m, Claim([F(1), F(0)]))))
    code, out, _ = run(
        capsys,
        "strict-dual",
        str(DATA / "m3.json"),
        "--claim",
        str(claim),
        "--eps",
        "1/4",
        "--verify",
    )
    assert code == 0
    assert out["values"]["value"] == "15/16"
    assert out["certificates"]["measure"]["weights"] == ["15/16", "1/16"]


def test_strict_dual_nonpositive_eps(capsys):
    code, out, err = run(
        capsys,
        "strict-dual",
        str(DATA / "m3.json"),
        "--claim",
        str(DATA / "call.json"),
        "--eps",
        "0",
    )
    assert code == 4
    assert err["error"]["type"] == "invalid-input"


def test_invalid_market_file_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schemaVersion": 1}')
    code, out, err = run(capsys, "check-na", str(bad))
    assert code == 4
    assert err["error"]["type"] == "invalid-input"


def test_superhedge_on_arbitrage_market_exit_3(capsys, tmp_path):
    market = tmp_path / "m.json"
    market.write_text(dump_market(binomial_with_free_option()))
    claim = tmp_path / "f.json"
    claim.write_text(json.dumps({"schemaVersion": 1, "leafOrder": [1, 2], "payoff": ["0", "0"]}))
    code, out, err = run(capsys, "superhedge", str(market), "--claim", str(claim))
    assert code == 3
    assert out["verdict"] == "fails"
    assert err["error"]["type"] == "arbitrage"


def test_output_is_deterministic(capsys):
    _, first, _ = run(capsys, "check-nar", str(DATA / "m3.json"))
    _, second, _ = run(capsys, "check-nar", str(DATA / "m3.json"))
    assert json.dumps(first) == json.dumps(second)


def test_pretty_flag_changes_layout_not_content(capsys):
    code = main(["check-na", str(DATA / "m1.json"), "--pretty"])
    pretty = capsys.readouterr().out
    assert code == 0
    assert "\n  " in pretty
    assert json.loads(pretty)["verdict"] == "holds"


def test_verify_flag_keeps_verdict(capsys):
    code, out, _ = run(capsys, "check-nar", str(DATA / "m3.json"), "--verify")
    assert code == 0
    assert out["verdict"] == "holds"


def test_verify_replay_failure_exits_5(capsys, monkeypatch):
    # simulate a broken certificate to exercise the soundness exit path
    import hedgecert.arbitrage as arbitrage_mod

    monkeypatch.setattr(arbitrage_mod, "verify_nar_witness", lambda m, w: False)
    code, out, err = run(capsys, "check-nar", str(DATA / "m3.json"), "--verify")
    assert code == 5
    assert out is None
    assert err["error"]["type"] == "soundness"


def test_console_script_entrypoint():
    import subprocess
    import sys

    result = subprocess.run(
        [sys.executable, "-m", "hedgecert.cli", "check-na", str(DATA / "m1.json")],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["verdict"] == "holds"
