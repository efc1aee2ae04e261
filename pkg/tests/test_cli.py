import json

import pytest

from davlab import cli, oracles
from davlab.groups import make_metacyclic
from davlab.sequences import parse_sequence


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_group_summary(capsys):
    code, out, _ = run(capsys, "group", "--m", "2", "--n", "3", "--s", "2")
    rec = records(out)[0]
    assert code == 0 and rec["order"] == 6 and rec["star"] is True
    assert rec["element_orders"] == {"1": 1, "2": 3, "3": 2}
    code, out, _ = run(capsys, "group", "--m", "2", "--n", "4", "--s", "3")
    rec = records(out)[0]
    assert code == 0 and rec["order"] == 8 and rec["star"] is False


def test_invalid_presentation_exit_2(capsys):
    code, out, err = run(capsys, "group", "--m", "3", "--n", "5", "--s", "2")
    assert code == 2 and out == "" and "ord" in err


def test_usage_errors_exit_2(capsys):
    assert cli.main(["small", "--m", "2"]) == 2
    assert cli.main(["frobnicate"]) == 2
    assert cli.main(["enumerate", "--m", "2", "--n", "3", "--s", "2"]) == 2
    assert cli.main(["lemmas", "--lemma", "9.9"]) == 2
    capsys.readouterr()


def test_small_payload(capsys):
    code, out, _ = run(capsys, "small", "--m", "2", "--n", "3", "--s", "2")
    rec = records(out)[0]
    assert code == 0
    assert rec["d_computed"] == 3 and rec["d_predicted"] == 3
    assert rec["match"] is True and rec["exhaustive"] is True
    g = make_metacyclic((2, 3, 2))
    assert len(parse_sequence(g, rec["witness"])) == 3


def test_large_payload(capsys):
    code, out, _ = run(capsys, "large", "--m", "2", "--n", "3", "--s", "2")
    assert code == 0 and records(out)[0]["D_computed"] == 6


def test_enumerate_round_trip(capsys):
    code, out, _ = run(capsys, "enumerate", "--m", "2", "--n", "3", "--s", "2", "--length", "3")
    rec = records(out)[0]
    assert code == 0 and rec["count"] == 7 and rec["inverse_ok"] is True
    assert "x x*y x*y^2" in rec["sequences"]
    g = make_metacyclic((2, 3, 2))
    from davlab.sequences import format_sequence
    for text in rec["sequences"]:
        assert format_sequence(g, parse_sequence(g, text)) == text


def test_verify_lines(capsys):
    code, out, _ = run(capsys, "verify", "--max-order", "21")
    recs = records(out)
    assert code == 0 and len(recs) == 8
    assert all(r["match"] is True for r in recs)


def test_cap_exit_3(capsys):
    code, out, _ = run(capsys, "small", "--m", "3", "--n", "7", "--s", "2", "--node-cap", "20")
    rec = records(out)[0]
    assert code == 3 and rec["exhaustive"] is False and rec["match"] is None


def test_mutated_formula_exit_1(capsys, monkeypatch):
    monkeypatch.setattr(oracles, "predicted_d", lambda m, n: m + n - 1)
    code, out, _ = run(capsys, "small", "--m", "2", "--n", "5", "--s", "4")
    assert code == 1 and records(out)[0]["match"] is False
    code, out, _ = run(capsys, "verify", "--max-order", "10")
    assert code == 1 and all(r["match"] is False for r in records(out))


def test_unmutated_never_exit_1(capsys):
    for argv in (["small", "--m", "2", "--n", "5", "--s", "4"],
                 ["enumerate", "--m", "2", "--n", "5", "--s", "4", "--length", "5"],
                 ["lemmas", "--lemma", "quotient-minimal", "--trials", "200"]):
        assert run(capsys, *argv)[0] == 0


def test_cache_byte_identical(capsys, tmp_path):
    cache = str(tmp_path / "results.cache")
    argv = ["small", "--m", "3", "--n", "7", "--s", "2", "--cache", cache]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0 and out1 == out2
    code3, out3, _ = run(capsys, *argv, "--recheck")
    assert code3 == 0 and out3 == out1
    lines = (tmp_path / "results.cache").read_text().splitlines()
    assert lines[0] == "davlab-cache v1" and len(lines) == 2


def test_cache_mismatch_exit_4(capsys, tmp_path):
    path = tmp_path / "results.cache"
    argv = ["small", "--m", "2", "--n", "5", "--s", "4", "--cache", str(path)]
    run(capsys, *argv)
    header, rec = path.read_text().splitlines()
    data = json.loads(rec)
    data["payload"]["d_computed"] = 6
    path.write_text(header + "\n" + json.dumps(data) + "\n")
    code, _, err = run(capsys, *argv)
    assert code == 0
    code, _, err = run(capsys, *argv, "--recheck")
    assert code == 4 and "mismatch" in err


def test_corrupt_cache_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.cache"
    path.write_text("not a cache\n")
    code, _, err = run(capsys, "small", "--m", "2", "--n", "3", "--s", "2", "--cache", str(path))
    assert code == 2 and "davlab-cache" in err


def test_lemma_suite_command(capsys):
    code, out, _ = run(capsys, "lemmas", "--lemma", "set-bound", "--lemma", "coset-translate", "--trials", "300")
    recs = records(out)
    assert code == 0 and [r["lemma"] for r in recs] == ["set-bound", "coset-translate"]
    assert all(r["trials"] == 300 and r["failures"] == 0 for r in recs)


def test_single_lemma_instance(capsys):
    code, out, _ = run(capsys, "lemmas", "--lemma", "normal-part", "--m", "2", "--n", "3", "--s", "2",
                       "--sequence", "x x*y")
    assert code == 0 and records(out)[0]["ok"] is True
    code, out, _ = run(capsys, "lemmas", "--lemma", "coset-translate", "--m", "2", "--n", "3", "--s", "2",
                       "--sequence", "x x*y", "--u", "y")
    assert code == 0 and records(out)[0]["vacuous"] is False
    code, _, _ = run(capsys, "lemmas", "--lemma", "normal-part", "--m", "2", "--n", "3", "--s", "2",
                     "--sequence", "x", "--strict")
    assert code == 2


def test_pretty_table(capsys):
    code, out, _ = run(capsys, "verify", "--max-order", "10", "--pretty")
    lines = out.splitlines()
    assert code == 0 and lines[0].split()[:3] == ["m", "n", "s"] and len(lines) == 3


def test_jobs_flag_same_payload(capsys):
    outs = []
    for jobs in ("1", "2"):
        code, out, _ = run(capsys, "enumerate", "--m", "2", "--n", "5", "--s", "4",
                           "--length", "5", "--jobs", jobs)
        outs.append(cli.payload_core(records(out)[0]))
    assert outs[0] == outs[1]
