import json

import pytest

from qmarkov.analyze import analyze_channel, analyze_generator, analyze_schur
from qmarkov.cli import main
from qmarkov.serialize import channel_from_json, schur_to_json
from qmarkov import zoo


def verdicts_of(report):
    return {c["verdict"] for c in report.get("certificates", [])}


# ---------------------------------------------------------------------------
# zoo expectations reproduce under default tolerances
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(zoo.ENTRIES))
def test_zoo_expectations(name):
    entry, params = zoo.parse_zoo_ref(f"zoo:{name}")
    obj = entry.build(params)
    if entry.kind == "channel":
        report = analyze_channel(obj)
    elif entry.kind == "schur":
        report = analyze_schur(obj)
    elif entry.kind == "generator":
        report = analyze_generator(obj)
    else:
        from qmarkov.analyze import analyze_frame

        report = analyze_frame(obj, samples=100, restarts=2)
        for flag in entry.expected_flags:
            assert report["flags"][flag]
        return
    got = verdicts_of(report)
    for expected in entry.expected_verdicts:
        assert expected in got, f"{name}: wanted {expected}, got {got}"


def test_zoo_has_enough_entries():
    assert len(zoo.ENTRIES) >= 8


def test_zoo_param_parsing():
    entry, params = zoo.parse_zoo_ref("zoo:rank2?s=0.5&n=6")
    assert params == {"s": 0.5, "n": 6}
    with pytest.raises(KeyError):
        zoo.parse_zoo_ref("zoo:nope")
    with pytest.raises(ValueError):
        zoo.parse_zoo_ref("zoo:rank2?bad")


def test_rank2_at_one_is_identity():
    entry, params = zoo.parse_zoo_ref("zoo:rank2?s=1")
    report = analyze_schur(entry.build(params))
    assert report["is_identity"]
    assert "INCONCLUSIVE" in verdicts_of(report)


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def test_cli_analyze_expect_pass(capsys):
    assert main(["analyze", "zoo:antisym3", "--expect", "NOT_FACTORIZABLE"]) == 0
    out = capsys.readouterr().out
    assert "not factorizable" in out


def test_cli_analyze_expect_fail(capsys):
    assert main(["analyze", "zoo:fifthroot6", "--expect", "NOT_FACTORIZABLE"]) == 1


def test_cli_input_error(tmp_path):
    assert main(["analyze", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["analyze", str(bad)]) == 2


def test_cli_json_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["analyze", "zoo:rank2", "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["tool"] == "qmarkov"
    assert report["tolerances"]["rank_rel"] == 1e-9
    assert "NOT_FACTORIZABLE" in {c["verdict"] for c in report["certificates"]}


def test_cli_schur_file_round_trip(tmp_path, capsys):
    from qmarkov.schur import rank_two_family

    path = tmp_path / "b.json"
    path.write_text(json.dumps(schur_to_json(rank_two_family(0.5, 5))))
    assert main(["schur", str(path), "--expect", "NOT_FACTORIZABLE"]) == 0


def test_cli_semigroup_scan(capsys):
    assert main(["semigroup", "--generator", "zoo:cyclic4",
                 "--scan", "1e-4,1e-3", "--csv"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("t,g,h,k,margin")
    assert "conditionally negative" in out


def test_cli_semigroup_rejects_bad_generator(tmp_path):
    path = tmp_path / "gen.json"
    path.write_text(json.dumps({"n": 2, "L": [[0, -1], [-1, 0]]}))
    assert main(["semigroup", "--generator", str(path)]) == 1


def test_cli_rota_build_and_reanalyze(tmp_path, capsys):
    out = tmp_path / "channel.json"
    report_path = tmp_path / "report.json"
    assert main(["rota", "build", "--d", "5", "--seed", "7",
                 "--out", str(out), "--json", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["word_rank"] == report["word_count"]
    assert {c["verdict"] for c in report["certificates"]} == {"NOT_FACTORIZABLE"}
    # the emitted channel file reproduces the verdict when re-analyzed
    T = channel_from_json(json.loads(out.read_text()))
    assert T.dim == report["n"]
    inner = analyze_channel(T)
    assert "NOT_FACTORIZABLE" in verdicts_of(inner)


def test_cli_witness_report_reverifies(tmp_path):
    from qmarkov import verify_witness
    from qmarkov.serialize import witness_from_json

    out = tmp_path / "report.json"
    assert main(["analyze", "zoo:fifthroot6", "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert "witness" in report
    witness = witness_from_json(report["witness"])
    entry, params = zoo.parse_zoo_ref("zoo:fifthroot6")
    from qmarkov.schur import real_commuting_kraus
    from qmarkov import Channel

    T = Channel.from_kraus(real_commuting_kraus(entry.build(params)))
    assert verify_witness(T, witness)  # the emitted witness reproduces the verdict


def test_cli_search_failure_exit_code(monkeypatch):
    from qmarkov import SearchFailureError
    import qmarkov.cli as cli_mod

    def boom(*args, **kwargs):
        raise SearchFailureError("budget exhausted")

    monkeypatch.setattr(cli_mod, "build_counterexample", boom)
    assert main(["rota", "build", "--d", "5"]) == 3


def test_cli_grothendieck(capsys):
    assert main(["grothendieck", "--map", "l4", "--k", "2", "--restarts", "2",
                 "--samples", "50"]) == 0
    out = capsys.readouterr().out
    assert "best_value" in out
    value = float(out.strip().splitlines()[-1].split("=")[1].split("(")[0])
    assert 0.5 < value < 1.0


def test_cli_grothendieck_aliases(capsys):
    assert main(["grothendieck", "--map", "T2", "--k", "1", "--restarts", "1",
                 "--samples", "10"]) == 0


def test_cli_zoo_listing(capsys):
    assert main(["zoo"]) == 0
    out = capsys.readouterr().out
    for name in ("antisym3", "fifthroot6", "cyclic4", "ohframe-m3"):
        assert name in out


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
