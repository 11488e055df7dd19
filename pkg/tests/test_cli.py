import csv
import json
import subprocess
import sys

import pytest

from planarmaps.cli import main
from planarmaps.maps import PlanarMap
from planarmaps.sampling import LabelledTree


def run(*args, stdin=None, env=None):
    return subprocess.run([sys.executable, "-m", "planarmaps", *args], input=stdin,
                          capture_output=True, text=True, env=env)


def test_help_lists_every_subcommand():
    r = run("--help")
    assert r.returncode == 0
    for name in ("sample-tree", "sample-map", "audit", "distances", "convert", "boltzmann",
                 "scaling", "verify"):
        assert name in r.stdout


def test_sample_map_is_byte_identical_across_runs():
    a = run("sample-map", "--preset", "2kappa:2:1000", "--seed", "7")
    b = run("sample-map", "--preset", "2kappa:2:1000", "--seed", "7")
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout
    c = run("sample-map", "--preset", "2kappa:2:1000", "--seed", "8")
    assert c.stdout != a.stdout


def test_usage_errors_exit_2():
    assert run("sample-map", "--preset", "3kappa:2:10").returncode == 2
    assert run("sample-map").returncode == 2
    assert run("nonsense").returncode == 2
    assert run("distances", "--source", "x", stdin="1 0 1\n0 1 0\n1 0 1\n").returncode == 2


def test_audit_exit_codes(tmp_path):
    good = run("sample-map", "--preset", "2kappa:3:20", "--count", "3", "--seed", "1").stdout
    r = run("audit", stdin=good)
    assert r.returncode == 0 and r.stdout.count("euler=ok") == 3
    # a single loop at one vertex: valid permutations, not bipartite
    loop = PlanarMap([1, 0], [1, 0], 0).to_string()
    assert run("audit", stdin=loop).returncode == 1
    f = tmp_path / "maps.txt"
    f.write_text(good + loop)
    assert run("audit", "--in", str(f)).returncode == 1


def test_invalid_map_input_exits_1():
    assert run("audit", stdin="2 0 -1\n0 1 0\n").returncode == 1


def test_sample_tree_formats(capsys, tmp_path):
    deg = tmp_path / "deg.txt"
    deg.write_text("2 3\n1 1\n")
    assert main(["sample-tree", "--degrees", str(deg), "--count", "4", "--seed", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4
    assert all(sorted(map(int, ln.split())).count(2) == 3 for ln in lines)
    assert main(["sample-tree", "--preset", "2kappa:2:5", "--labelled", "--seed", "2"]) == 0
    lt = LabelledTree.from_string(capsys.readouterr().out.strip())
    lt.validate()
    assert lt.tree.n_edges == 10


def test_distances_from_star(capsys):
    assert main(["sample-map", "--preset", "2kappa:2:30", "--seed", "3"]) == 0
    text = capsys.readouterr().out
    m = PlanarMap.from_string(text)
    r = run("distances", "--source", "star", stdin=text)
    assert r.returncode == 0
    got = [int(ln.split()[1]) for ln in r.stdout.splitlines()]
    assert got == m.distances_from(m.star).tolist()


def test_convert_round_trip(tmp_path):
    trees = run("sample-tree", "--preset", "2kappa:2:40", "--labelled", "--count", "3",
                "--seed", "5").stdout
    maps = run("convert", "--from", "tree1", "--to", "map", "--eps", "-1", stdin=trees)
    assert maps.returncode == 0
    assert run("audit", stdin=maps.stdout).returncode == 0
    back = run("convert", "--from", "map", "--to", "tree1", stdin=maps.stdout)
    lines = [ln for ln in back.stdout.splitlines() if not ln.startswith("#")]
    assert lines == trees.splitlines()
    assert back.stdout.count("# eps -1") == 3
    two = run("convert", "--from", "tree1", "--to", "tree2", stdin=trees).stdout
    again = run("convert", "--from", "tree2", "--to", "tree1", stdin=two).stdout
    assert again == trees


def test_boltzmann_solve_presets(capsys):
    assert main(["boltzmann", "solve", "--preset", "all-ones"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["tiltX"] == pytest.approx(0.1875, abs=1e-12)
    assert rec["tilt_rescale"] == pytest.approx(0.5, abs=1e-10)
    assert main(["boltzmann", "solve", "--preset", "quad-critical"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["Zstar"] == pytest.approx(2, abs=1e-10)
    assert rec["Sigma2"] == pytest.approx(1, abs=1e-10)


def test_boltzmann_sample(capsys, tmp_path):
    w = tmp_path / "w.txt"
    w.write_text("2 0.0833333333333333333\n")
    assert main(["boltzmann", "sample", "--weights", str(w), "--cond", "F", "--n", "12",
                 "--count", "2", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    r = run("audit", stdin=out)
    assert r.returncode == 0 and r.stdout.count("F=12") == 2
    assert main(["boltzmann", "sample", "--preset", "quad-critical", "--cond", "E",
                 "--n", "4"]) == 1
    assert main(["boltzmann", "sample", "--preset", "quad-critical", "--cond", "Q",
                 "--n", "4"]) == 2


def test_scaling_run_outputs(tmp_path, monkeypatch):
    monkeypatch.setenv("PLANARMAPS_OUT", str(tmp_path / "env"))
    assert main(["scaling", "run", "--preset", "2kappa:2", "--sizes", "50,2e2",
                 "--replicas", "4", "--seed", "9", "--threads", "1"]) == 0
    d = tmp_path / "env"
    recs = [json.loads(ln) for ln in (d / "records.ndjson").read_text().splitlines()]
    assert len(recs) == 8 and {r["n_faces"] for r in recs} == {50, 200}
    rows = list(csv.DictReader(open(d / "aggregates.csv")))
    assert [int(r["n_faces"]) for r in rows] == [50, 200]
    man = json.loads((d / "manifest.json").read_text())
    assert man["format_version"] and "seed" in json.dumps(man)
    # the explicit directory wins, and the pool gives the same records
    out = tmp_path / "explicit"
    assert main(["scaling", "run", "--preset", "2kappa:2", "--sizes", "50,2e2",
                 "--replicas", "4", "--seed", "9", "--threads", "2", "--out", str(out)]) == 0
    assert (out / "records.ndjson").read_text() == (d / "records.ndjson").read_text()


def test_scaling_ks_identity_lemma_b(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    a.write_text("1 2 3 4 5")
    b.write_text("1 2 3 4 5")
    assert main(["scaling", "ks", str(a), str(b)]) == 0
    assert json.loads(capsys.readouterr().out)["D"] == 0
    assert main(["scaling", "identity", "--preset", "2kappa:2:100", "--replicas", "200",
                 "--seed", "1", "--out", str(tmp_path / "id")]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["replicas"] == 200 and "p_value" in rec
    assert (tmp_path / "id" / "manifest.json").exists()
    assert main(["scaling", "lemma-b", "--count", "2000", "--seed", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["counterexamples"] == 0


def test_verify_small():
    r = run("verify", "--max-edges", "6")
    assert r.returncode == 0, r.stderr
    assert "FAIL" not in r.stderr
