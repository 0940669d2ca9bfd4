import json

import pytest

from threeparty.cli import main
from threeparty.formats import dump_instance, read_instance


@pytest.fixture
def example(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(dump_instance(read_instance("example2.json")))
    return path


def test_solve_and_check(example, tmp_path, capsys):
    assert main(["solve", str(example)]) == 0
    cert = capsys.readouterr().out
    assert json.loads(cert)["central_prices"] == [2]
    cpath = tmp_path / "cert.json"
    cpath.write_text(cert)
    assert main(["check", str(example), str(cpath)]) == 0
    out = capsys.readouterr().out
    assert "R4: pass" in out and "info: max local prices" in out


def test_solve_options(example, capsys):
    assert main(["solve", "--trivial", str(example)]) == 0
    assert json.loads(capsys.readouterr().out)["revenues"] == {"A": 0, "B": 0}
    assert main(["--threads", "2", "solve", "--max-prices", "--timings", str(example)]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["central_prices"] == [5] and set(obj["timings"]) == {"solve", "check"}


def test_tampered_certificate_fails(example, tmp_path, capsys):
    main(["solve", str(example)])
    obj = json.loads(capsys.readouterr().out)
    obj["revenues"]["A"] = 2
    cpath = tmp_path / "cert.json"
    cpath.write_text(json.dumps(obj))
    assert main(["check", str(example), str(cpath)]) == 4
    assert "revenue: FAIL" in capsys.readouterr().out


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"num_items": 1, "bidders": [], "mediators": []}))
    assert main(["solve", str(bad)]) == 1
    mismatch = tmp_path / "mismatch.json"
    obj = json.loads(dump_instance(read_instance("example2.json")))
    obj["bidders"][0]["valuation"]["values"] = [5, 1]
    mismatch.write_text(json.dumps(obj))
    assert main(["solve", str(mismatch)]) == 1
    assert main(["solve", str(tmp_path / "missing.json")]) == 1
    assert main(["--threads", "0", "solve", "example2.json"]) == 1
    assert "error" in capsys.readouterr().err


def test_complements_exit_code(capsys):
    assert main(["solve", "complements.json"]) == 2
    assert "no equilibrium" in capsys.readouterr().err


def test_gen_is_deterministic(tmp_path, capsys):
    assert main(["gen", "--seed", "4", "--items", "2", "--bidders", "3", "--mediators", "2"]) == 0
    first = capsys.readouterr().out
    out = tmp_path / "g.json"
    assert main(["gen", "--seed", "4", "--items", "2", "--bidders", "3", "--mediators", "2", "-o", str(out)]) == 0
    assert out.read_text() == first
    assert main(["gen", "--seed", "4", "--mediators", "9", "--bidders", "2"]) == 1


def test_hierarchy_flag(tmp_path, capsys):
    assert main(["gen", "--seed", "1", "--items", "2", "--bidders", "8", "--mediators", "4"]) == 0
    path = tmp_path / "h.json"
    path.write_text(capsys.readouterr().out)
    assert main(["solve", "--hierarchy", "2", str(path)]) == 0
    assert set(json.loads(capsys.readouterr().out)["revenues"]) == {"M0+M1", "M2+M3"}


def test_bench(capsys):
    assert main(["bench", "--items", "2", "--bidders", "2,4"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3 and "MISMATCH" not in lines[1] + lines[2]


def test_check_item_count_mismatch(example, tmp_path, capsys):
    main(["solve", str(example)])
    obj = json.loads(capsys.readouterr().out)
    obj["num_items"] = 2
    obj["central_prices"] = [2, 0]
    cpath = tmp_path / "cert.json"
    cpath.write_text(json.dumps(obj))
    assert main(["check", str(example), str(cpath)]) == 1
    assert "error" in capsys.readouterr().err
