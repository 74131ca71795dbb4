from pathlib import Path

from riesz.cli import main

DATA = Path(__file__).resolve().parent.parent / "scripts" / "data"


def run(capsys, *argv):
    code = main([str(DATA / a) if a.endswith(".txt") else a for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_integrate(capsys):
    code, out, _ = run(capsys, "integrate", "step.txt", "--show")
    assert code == 0
    assert "step { [0, 1): 2, [1, 2): 1, [2, 3): -1 }  ->  2" in out
    assert out.rstrip().endswith("7/6")


def test_r1_ladder_and_budget(capsys, monkeypatch):
    code, out, _ = run(capsys, "r1", "stream.txt")
    assert code == 0 and "100/101" in out and "integral: 1" in out
    monkeypatch.setenv("RIESZ_BUDGET", "7")
    code, out, _ = run(capsys, "r1", "stream.txt", "--all")
    assert code == 0 and "7/8" in out and "100/101" not in out


def test_r2_make(capsys):
    code, out, _ = run(capsys, "r2", "make", "r2.txt")
    assert code == 0 and "integral: 1/2" in out


def test_beppo_levi(capsys):
    code, out, _ = run(capsys, "beppo-levi", "beppo.txt", "--horizon", "5")
    assert code == 0 and "gap at n=5: 1/5" in out and "integral h_n <= 1: yes" in out
    code, out, _ = run(capsys, "beppo-levi", "beppo_streams.txt", "--horizon", "3")
    assert code == 0 and "by integrals only: 2" in out


def test_beppo_levi_rejects_the_sign_sequence(capsys):
    code, out, err = run(capsys, "beppo-levi", "sign.txt", "--horizon", "3")
    assert code == 1 and "rejected" in err and out.count("-inf") == 3


def test_fatou_and_dominated(capsys):
    code, out, _ = run(capsys, "fatou", "escape.txt", "--horizon", "5")
    assert code == 0 and "at most" in out
    code, out, _ = run(capsys, "dominated", "dominated.txt", "--horizon", "5")
    assert code == 0 and "gap at n=5: 2/5" in out


def test_sets(capsys):
    code, out, _ = run(capsys, "measure", "sets.txt")
    assert code == 0 and "step { [0, 3): 1 }" in out
    code, out, _ = run(capsys, "sigma-ops", "sets.txt", "--op", "intersection")
    assert code == 0 and "step { [1, 3): 1 }" in out and "union" not in out


def test_fubini(capsys):
    code, out, _ = run(capsys, "fubini", "product.txt")
    assert code == 0 and "exact-equal" in out and " 10 " in out
    code, out, _ = run(capsys, "fubini", "product_stream.txt", "--horizon", "10")
    assert code == 0
    code, out, _ = run(capsys, "fubini-counterexample", "--window", "2")
    assert code == 0 and "iterated dx dy: 0" in out


def test_gallery(capsys):
    code, out, _ = run(capsys, "gallery", "--list")
    assert code == 0 and "weir-set" in out
    code, out, _ = run(capsys, "gallery", "weir-set", "--depth", "5")
    assert code == 0 and "all claims hold" in out
    first = out
    run(capsys, "gallery", "weir-set", "--depth", "5")
    assert run(capsys, "gallery", "weir-set", "--depth", "5")[1] == first


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "vanishing", "markov")
    assert code == 0 and out.count("PASS") == 2


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("space interval\nstep { [0, 1): 1/0 }\n")
    assert main(["integrate", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["integrate", str(tmp_path / "missing.txt")]) == 2
    assert main(["no-such-command"]) == 2
