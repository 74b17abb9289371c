import json
import subprocess
import sys
from fractions import Fraction

import pytest

from bmgame.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, main
from bmgame.instance import gen_random, gen_tight_family, save_instance
from bmgame.mechanism import report_to_dict, run_mechanism


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_family(capsys):
    code, out, _ = run(capsys, "gen", "--family", "1,3,1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert len(doc["vertices"]) == 6 and len(doc["edges"]) == 6


def test_gen_rejects_even_cycle(capsys):
    code, _, err = run(capsys, "gen", "--family", "1,4,1")
    assert code == EXIT_INPUT and "l must be odd" in err


def test_gen_random_seeded(capsys):
    a = run(capsys, "gen", "--random", "6,1/2,3,20,bip", "--seed", "42")[1]
    b = run(capsys, "gen", "--random", "6,1/2,3,20,bip", "--seed", "42")[1]
    assert a == b == save_instance(gen_random(6, Fraction(1, 2), 3, 20, 42, True))


def test_allocate_two_triangles(capsys, write):
    path = write("t.json", save_instance(gen_tight_family(1, 3, 1)))
    code, out, _ = run(capsys, "allocate", "--input", path)
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["alpha"] == "2/3" and doc["allocation_total"] == "2"


def test_allocate_matches_library(capsys, write):
    inst = gen_random(8, Fraction(3, 5), 3, 20, 9)
    code, out, _ = run(capsys, "allocate", "-i", write("r.json", save_instance(inst)))
    assert json.loads(out) == json.loads(json.dumps(report_to_dict(run_mechanism(inst))))


def test_allocate_bipartite(capsys, write):
    inst = gen_random(8, Fraction(3, 5), 3, 20, 4, bipartite=True)
    doc = json.loads(run(capsys, "allocate", "-i", write("b.json", save_instance(inst)))[1])
    assert doc["alpha"] == "1" and doc["cycles"] == []


def test_malformed_input(capsys, write):
    path = write("bad.json", json.dumps({"vertices": [{"id": 1, "b": 1}], "edges": [{"u": 1, "v": 1, "w": 3}]}))
    code, _, err = run(capsys, "allocate", "--input", path)
    assert code == EXIT_INPUT and "self-loop" in err
    code, _, err = run(capsys, "allocate", "--input", write("b2.json", '{"vertices": 3}'))
    assert code == EXIT_INPUT and "'vertices'" in err


def test_solve(capsys, write, ):
    path = write("tri.json", json.dumps({"vertices": [{"id": k, "b": 1} for k in "abc"],
                                         "edges": [{"u": "a", "v": "b", "w": 1}, {"u": "b", "v": "c", "w": 1}, {"u": "a", "v": "c", "w": 1}]}))
    doc = json.loads(run(capsys, "solve", "-i", path)[1])
    assert doc["lp_value"] == doc["dual_value"] == "3/2"
    assert {e["x"] for e in doc["x"]} == {"1/2"}


def test_gamma(capsys, write):
    path = write("t.json", save_instance(gen_tight_family(1, 3, 1)))
    assert json.loads(run(capsys, "gamma", "-i", path)[1])["gamma"] == 2
    assert json.loads(run(capsys, "gamma", "-i", path, "--coalition", "0,1,2")[1])["gamma"] == 1
    code, _, _ = run(capsys, "gamma", "-i", path, "--coalition", "0,99")
    assert code == EXIT_INPUT


@pytest.mark.parametrize("n, l, b", [(n, l, b) for n in (1, 2, 3) for l in (3, 5) for b in (1, 3)])
def test_verify_tight_family(capsys, write, n, l, b):
    path = write("t.json", save_instance(gen_tight_family(n, l, b)))
    code, out, _ = run(capsys, "verify", "-i", path)
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["budget_tight"] and doc["in_core"]


def test_verify_doctored_report(capsys, write):
    inst = gen_tight_family(1, 3, 1)
    path = write("t.json", save_instance(inst))
    doc = report_to_dict(run_mechanism(inst))
    doc["allocation"] = {k: "1/5" for k in doc["allocation"]}
    rpath = write("r.json", json.dumps(doc))
    code, out, _ = run(capsys, "verify", "-i", path, "--report", rpath)
    assert code == EXIT_VIOLATION
    assert [0, 1, 2] in [v["coalition"] for v in json.loads(out)["violations"]]


def test_verify_alpha_override(capsys, write):
    path = write("t.json", save_instance(gen_tight_family(1, 3, 1)))
    code, out, _ = run(capsys, "verify", "-i", path, "--alpha", "1")
    assert code == EXIT_VIOLATION
    assert json.loads(out)["alpha"] == "1"


def test_verify_budget(capsys, write):
    path = write("r.json", save_instance(gen_random(10, 1, 3, 20, 1)))
    code, _, err = run(capsys, "verify", "-i", path, "--budget", "100")
    assert code == EXIT_BUDGET and "budget" in err


def test_gap_lines(capsys, write):
    tri = write("tri.json", json.dumps({"vertices": [{"id": k, "b": 1} for k in range(3)],
                                        "edges": [{"u": 0, "v": 1, "w": 1}, {"u": 1, "v": 2, "w": 1}, {"u": 0, "v": 2, "w": 1}]}))
    assert run(capsys, "gap", "-i", tri)[1] == "ip=1 lp=3/2 ratio=2/3\n"
    edge = write("e.json", json.dumps({"vertices": [{"id": 1, "b": 1}, {"id": 2, "b": 1}], "edges": [{"u": 1, "v": 2, "w": 5}]}))
    assert run(capsys, "gap", "-i", edge)[1] == "ip=5 lp=5 ratio=1\n"
    c5 = write("c5.json", json.dumps({"vertices": [{"id": k, "b": 1} for k in range(5)],
                                      "edges": [{"u": k, "v": (k + 1) % 5, "w": 1} for k in range(5)]}))
    assert run(capsys, "gap", "-i", c5)[1] == "ip=2 lp=5/2 ratio=4/5\n"


def test_gap_json_output(capsys, write, tmp_path):
    path = write("t.json", save_instance(gen_tight_family(2, 3, 1)))
    out = tmp_path / "gap.json"
    assert run(capsys, "gap", "-i", path, "-o", str(out))[0] == EXIT_OK
    assert json.loads(out.read_text()) == {"ip_value": 4, "lp_value": "6", "ratio": "2/3"}


def test_generator_flags_only_with_gen(capsys):
    with pytest.raises(SystemExit):
        main(["allocate", "--family", "1,3,1"])


def test_console_entry_point(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(save_instance(gen_tight_family(1, 3, 1)))
    res = subprocess.run([sys.executable, "-m", "bmgame.cli", "gap", "-i", str(path)], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "ip=2 lp=3 ratio=2/3\n"
