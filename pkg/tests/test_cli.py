import csv
import io
import json

import pytest

from cutlab.cli import derive_seed, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    return [json.loads(line) for line in out.splitlines()]


def test_foreach_roundtrip_exact(capsys):
    code, out, _ = run(capsys, "foreach", "roundtrip", "--k", "2", "--beta", "1", "--n", "8", "--oracle", "exact")
    assert code == 0
    (rec,) = records(out)
    assert rec["correct"] == rec["bit_count"] - rec["failures"]
    assert rec["preset"] == "desk" and rec["constants"]["c1"] == 2.0


def test_foreach_infeasible_eps(capsys):
    code, _, err = run(capsys, "foreach", "roundtrip", "--eps", "0.3", "--beta", "1", "--n", "8")
    assert code == 2 and "eps=0.25" in err
    code, _, err = run(capsys, "foreach", "roundtrip", "--k", "1", "--beta", "2", "--n", "8")
    assert code == 2 and "beta=1" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["foreach", "roundtrip", "--bogus"])
    assert e.value.code == 1
    code, _, _ = run(capsys, "foreach", "roundtrip", "--k", "1", "--beta", "1", "--n", "4", "--oracle", "gauss")
    assert code == 1
    code, _, _ = run(capsys, "sweep", "--", "foreach", "roundtrip")
    assert code == 1


def test_twosum_exhaustive(capsys):
    code, out, _ = run(capsys, "twosum", "lemma-check", "--N", "9", "--exhaustive")
    assert code == 0
    assert records(out)[0]["violations"] == 0


def test_twosum_strict_infeasible(capsys):
    code, _, _ = run(capsys, "twosum", "reduce", "--strict")
    assert code == 2


def test_deterministic_replay(capsys):
    argv = ["forall", "roundtrip", "--d", "4", "--beta", "1", "--n", "8", "--trials", "5", "--seed", "77"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second and len(first.splitlines()) == 5
    argv = ["mincut", "estimate", "--family", "cycle-chords", "--n", "200", "--k", "4", "--seed", "3"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_mincut_sweep_rows(capsys):
    code, out, _ = run(capsys, "mincut", "sweep", "--n", "200", "--k", "2,4,8", "--seed", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["k"]) for r in rows] == [2, 4, 8]
    assert {"n", "m", "k", "eps", "k_hat", "degree_q", "neighbor_q", "adjacency_q", "correct"} <= set(rows[0])
    assert all(int(r["degree_q"]) == 200 for r in rows)


def test_generic_sweep(capsys, tmp_path):
    out_file = tmp_path / "grid.csv"
    code, _, _ = run(capsys, "sweep", "--grid", "k=1,2", "--grid", "oracle=exact,noise:0.01", "--seed", "5",
                     "--out", str(out_file), "--", "foreach", "roundtrip", "--beta", "1", "--n", "16")
    assert code == 0
    rows = list(csv.DictReader(out_file.open()))
    assert [r["cell"] for r in rows] == ["0", "1", "2", "3"]
    assert rows[2]["k"] == "2" and rows[1]["oracle"] == "noise:0.01"
    assert rows[0]["seed"] == str(derive_seed(5, 0))


def test_constants_file(capsys, tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("# tweak\nc1 = 3.0\nrepetitions=2\n")
    code, out, _ = run(capsys, "foreach", "roundtrip", "--k", "1", "--beta", "1", "--n", "4", "--constants", str(f))
    assert code == 0
    rec = records(out)[0]
    assert rec["preset"] == "custom(desk)" and rec["constants"]["c1"] == 3.0
    f.write_text("nonsense=1\n")
    code, _, _ = run(capsys, "foreach", "roundtrip", "--k", "1", "--beta", "1", "--n", "4", "--constants", str(f))
    assert code == 1


def test_selftest_quick_subset(capsys):
    code, out, err = run(capsys, "selftest", "--quick", "--only", "1,4,9")
    assert code == 0
    assert [r["criterion"] for r in records(out)] == [1, 4, 9]
    assert err.count("PASS") == 3


def test_derive_seed_spreads():
    seeds = {derive_seed(0, i) for i in range(1000)}
    assert len(seeds) == 1000
