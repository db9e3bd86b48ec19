import csv
import json

import pytest

from reflectlab.cli import main


def write(path, text):
    path.write_text(text)
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_csv(tmp_path):
    out = tmp_path / "traj.csv"
    assert main(["simulate", "--steps", "4", "--seed", "0", "-o", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["t", "m", "u", "l", "u_ref", "l_ref", "k", "d", "p"]
    assert len(rows) == 5
    assert (rows[0]["k"], rows[0]["d"], rows[0]["p"]) == ("-1", "1", "0")
    for r in rows:
        r = {k: int(v) for k, v in r.items()}
        assert r["l_ref"] == r["k"] and r["u_ref"] == r["k"] + 2 * r["d"]
        assert r["m"] == r["k"] + 2 * r["p"] + 1


def test_simulate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--steps", "300", "--seed", "42", "-o", str(a)])
    main(["simulate", "--steps", "300", "--seed", "42", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_simulate_json(tmp_path):
    out = tmp_path / "t.json"
    assert main(["simulate", "--steps", "3", "--format", "json", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["config"]["steps"] == 3 and len(data["rows"]) == 4


def test_verify_lemma(tmp_path):
    out = tmp_path / "lemma.json"
    assert main(["verify-lemma", "--n-max", "8", "-o", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["pass"] and rep["config"]["n_max"] == 8
    assert [lv["n"] for lv in rep["lemma"]["levels"]] == list(range(9))
    assert all(lv["pass"] for lv in rep["lemma"]["levels"])
    assert rep["marginal_agreement"]["pass"]


def test_verify_kernel(tmp_path):
    out = tmp_path / "k.json"
    assert main(["verify-kernel", "-o", str(out)]) == 0
    text = out.read_text()
    rep = json.loads(text)
    assert rep["kernel"]["d_max"] == 50 and rep["generator_moments"]["d_max"] == 1000
    # stable key order
    assert text == json.dumps(rep, sort_keys=True, indent=2) + "\n"


def test_reflect_continuous(tmp_path, capsys):
    x = write(tmp_path / "x.csv", "t,value\n0,1\n0.5,-1\n1.0,0\n")
    b = write(tmp_path / "b.csv", "t,value\n0,0\n0.5,0\n1.0,0\n")
    assert main(["reflect", "--path", x, "--barrier", b]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [float(r["reflected"]) for r in rows] == [1.0, 0.0, 1.0]
    assert [r["t"] for r in rows] == ["0", "0.5", "1.0"]


def test_reflect_round_trips_floats(tmp_path):
    x = write(tmp_path / "x.csv", "t,value\n0,0.1\n1,0.30000000000000004\n")
    b = write(tmp_path / "b.csv", "t,value\n0,0.1\n1,0.7\n")
    out = tmp_path / "r.csv"
    main(["reflect", "--path", x, "--barrier", b, "-o", str(out)])
    rows = read_csv(out)
    assert float(rows[1]["reflected"]) == 0.7
    assert float(rows[1]["path"]) == 0.30000000000000004


def test_reflect_discrete_down(tmp_path):
    y = write(tmp_path / "y.csv", "t,value\n0,-1\n1,0\n2,-1\n")
    b = write(tmp_path / "b.csv", "t,value\n0,0\n1,-1\n2,-2\n")
    out = tmp_path / "r.csv"
    assert main(["reflect", "--path", y, "--barrier", b, "--mode", "discrete",
                 "--direction", "down", "-o", str(out)]) == 0
    assert [int(r["reflected"]) for r in read_csv(out)] == [-1, -2, -3]


def test_reflect_mismatched_grids(tmp_path, capsys):
    x = write(tmp_path / "x.csv", "t,value\n0,1\n1,2\n2,1\n")
    b = write(tmp_path / "b.csv", "t,value\n0,0\n1,0\n")
    assert main(["reflect", "--path", x, "--barrier", b]) != 0
    assert "incompatible grids" in capsys.readouterr().err
    assert main(["reflect", "--path", x, "--barrier", b, "--mode", "discrete"]) != 0


def test_reflect_parse_errors(tmp_path, capsys):
    b = write(tmp_path / "b.csv", "t,value\n0,0\n1,0\n2,0\n")
    bad = write(tmp_path / "bad.csv", "t,value\n0,1\n1,oops\n2,1\n")
    assert main(["reflect", "--path", bad, "--barrier", b]) == 1
    assert "bad.csv:3" in capsys.readouterr().err
    gap = write(tmp_path / "gap.csv", "t,value\n0,1\n1,2\n3,1\n")
    assert main(["reflect", "--path", gap, "--barrier", b]) == 1
    assert "gap.csv:4: non-uniform grid" in capsys.readouterr().err
    hdr = write(tmp_path / "hdr.csv", "time,v\n0,1\n")
    assert main(["reflect", "--path", hdr, "--barrier", b]) == 1
    assert "hdr.csv:1" in capsys.readouterr().err
    assert main(["reflect", "--path", str(tmp_path / "missing.csv"), "--barrier", b]) == 1


def test_reflect_order_violation(tmp_path, capsys):
    x = write(tmp_path / "x.csv", "t,value\n0,-1\n1,0\n")
    b = write(tmp_path / "b.csv", "t,value\n0,0\n1,0\n")
    assert main(["reflect", "--path", x, "--barrier", b]) == 1
    assert "initial order violated" in capsys.readouterr().err


def test_unknown_flags_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--steps", "3", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["simulate", "--steps", "3", "--seed", str(2**64)])
    with pytest.raises(SystemExit):
        main(["verify-bessel", "--alpha", "2"])


def test_verify_bessel_small(tmp_path):
    out, samples = tmp_path / "b.json", tmp_path / "s.csv"
    code = main(["verify-bessel", "--steps", "1000", "--trials", "2000", "--seed", "1",
                 "-o", str(out), "--samples", str(samples)])
    rep = json.loads(out.read_text())
    (entry,) = rep["reports"]
    assert {"experiment", "params", "statistic", "critical_value", "alpha", "pass"} <= set(entry)
    assert entry["negative_control"]["oracle"] == "half-normal"
    assert not entry["negative_control"]["pass"]
    assert code == (0 if rep["pass"] else 1)
    assert len(read_csv(samples)) == 2000


def test_verify_reflected_bm_small(tmp_path):
    out = tmp_path / "r.json"
    code = main(["verify-reflected-bm", "--steps", "1000", "--trials", "2000", "-o", str(out)])
    rep = json.loads(out.read_text())
    assert [e["experiment"] for e in rep["reports"]] == ["x_hat", "y_hat"]
    assert rep["config"]["trials"] == 2000
    assert code == (0 if rep["pass"] else 1)


def test_verify_bessel_rejects_small_params(capsys):
    assert main(["verify-bessel", "--steps", "10", "--trials", "2000"]) == 1


def test_emit_dist(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["emit-dist", "--experiment", "y_hat", "--steps", "1000", "--trials", "1000",
                 "-o", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["value", "empirical_cdf", "oracle_cdf"]
    assert float(rows[-1]["empirical_cdf"]) == 1.0
    vals = [float(r["value"]) for r in rows]
    assert vals == sorted(vals)
