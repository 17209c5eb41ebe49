"""Command-line interface: verdicts, exit codes, file outputs."""

import json
from pathlib import Path

from polybasin.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_invariant_quadratic(capsys):
    code, out, err = run(capsys, "invariant", str(DATA / "quad_plus3.json"))
    assert code == 0
    cert = json.loads(out)
    assert cert["degree"] == 2
    assert len(cert["graph"]) == 1
    assert cert["graph"][0]["position"] == 0.0
    assert cert["graph"][0]["label"]["pair"] == [[1], [1]]


def test_invariant_writes_file(tmp_path, capsys):
    out_file = tmp_path / "cert.json"
    code, out, err = run(capsys, "invariant", str(DATA / "cube_fixed.json"),
                         "-o", str(out_file))
    assert code == 0
    cert = json.loads(out_file.read_text())
    assert cert["degree"] == 3
    assert cert["graph"] == []


def test_invariant_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    code, out, err = run(capsys, "invariant", str(bad))
    assert code == 2
    assert json.loads(err)["error"] == "PARSE"


def test_invariant_missing_file(capsys):
    code, out, err = run(capsys, "invariant", "/nonexistent/poly.json")
    assert code == 2
    assert json.loads(err)["error"] == "PARSE"


def test_equiv_quadratics(capsys):
    code, out, err = run(capsys, "equiv", str(DATA / "quad_plus3.json"),
                         str(DATA / "quad_plus5.json"))
    assert code == 0
    assert out.startswith("EQUIVALENT")


def test_equiv_degree_mismatch(capsys):
    code, out, err = run(capsys, "equiv", str(DATA / "quad_plus3.json"),
                         str(DATA / "cubic_two_level.json"))
    assert code == 1
    assert "degree mismatch" in out


def test_equiv_length_mismatch(capsys):
    code, out, err = run(capsys, "equiv", str(DATA / "quad_plus3.json"),
                         str(DATA / "quad_bounded.json"))
    assert code == 1
    assert "length 1 vs 0" in out


def test_equiv_accepts_certificate_input(tmp_path, capsys):
    cert_file = tmp_path / "cert.json"
    code, _, _ = run(capsys, "invariant", str(DATA / "quad_plus3.json"),
                     "-o", str(cert_file))
    assert code == 0
    code, out, err = run(capsys, "equiv", str(cert_file),
                         str(DATA / "quad_plus5.json"))
    assert code == 0
    assert out.startswith("EQUIVALENT")


def test_equiv_empty_graphs_reason(capsys):
    code, out, err = run(capsys, "equiv", str(DATA / "cube_fixed.json"),
                         str(DATA / "cube_fixed.json"))
    assert code == 0
    assert "both empty" in out


def test_check_symmetric_cubic_genericity(capsys):
    code, out, err = run(capsys, "check", str(DATA / "cubic_symmetric.json"))
    assert code == 1
    assert "VIOLATED" in out


def test_check_quadratic_passes(capsys):
    code, out, err = run(capsys, "check", str(DATA / "quad_plus3.json"))
    assert code == 0
    assert "escaping" in out


def test_check_bounded_empty_portrait(capsys):
    code, out, err = run(capsys, "check", str(DATA / "quad_bounded.json"))
    assert code == 0
    assert "non-escaping" in out
    assert "empty" in out


def test_oracle_quadratic(capsys):
    code, out, err = run(capsys, "oracle", str(DATA / "quad_plus3.json"),
                         "--depth", "2", "--res", "512")
    assert code == 0
    assert "verdict: consistent" in out
    assert "depth 0: regions 1, boundaries 2" in out


def test_oracle_corrupted_cert_flag(tmp_path, capsys):
    cert_file = tmp_path / "cert.json"
    run(capsys, "invariant", str(DATA / "cubic_two_level.json"),
        "-o", str(cert_file))
    cert = json.loads(cert_file.read_text())
    for entry in cert["graph"]:
        if entry["position"] != 0.0:
            entry["label"]["pair"] = [[1, 1], [1, 1]]
    bad_file = tmp_path / "bad_cert.json"
    bad_file.write_text(json.dumps(cert))
    code, out, err = run(capsys, "oracle", str(DATA / "cubic_two_level.json"),
                         "--cert", str(bad_file), "--depth", "3", "--res", "512")
    assert code == 1
    assert "inconsistent" in out


def test_render_equipotentials(tmp_path, capsys):
    out_file = tmp_path / "eq.svg"
    code, out, err = run(capsys, "render", str(DATA / "quad_plus3.json"),
                         "equipotentials", "-o", str(out_file), "--res", "256")
    assert code == 0
    text = out_file.read_text()
    assert text.startswith("<?xml") and "<polyline" in text


def test_render_rays(tmp_path, capsys):
    out_file = tmp_path / "rays.svg"
    code, out, err = run(capsys, "render", str(DATA / "quad_plus3.json"),
                         "rays", "-o", str(out_file), "--res", "256")
    assert code == 0
    assert "<polyline" in out_file.read_text()


def test_render_regions_csv(tmp_path, capsys):
    out_file = tmp_path / "regions.csv"
    code, out, err = run(capsys, "render", str(DATA / "quad_plus3.json"),
                         "regions", "--format", "csv", "-o", str(out_file),
                         "--res", "128", "--depth", "1")
    assert code == 0
    rows = out_file.read_bytes().decode().split("\r\n")
    # one automatic resolution doubling is allowed
    assert len(rows[0].split(",")) in (128, 256)
    assert len(rows) - 1 == len(rows[0].split(","))


def test_render_bounded_poly_fails(capsys):
    code, out, err = run(capsys, "render", str(DATA / "quad_bounded.json"),
                         "equipotentials")
    assert code == 2


def test_exit_codes_only_0_1_2(capsys, tmp_path):
    """No command path may exit with anything outside the contract."""
    codes = set()
    codes.add(run(capsys, "equiv", str(DATA / "quad_plus3.json"),
                  str(DATA / "quad_plus5.json"))[0])
    codes.add(run(capsys, "equiv", str(DATA / "quad_plus3.json"),
                  str(DATA / "cubic_two_level.json"))[0])
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    codes.add(run(capsys, "invariant", str(bad))[0])
    assert codes <= {0, 1, 2}


def test_orientation_flag_bit_identical(tmp_path, capsys):
    a = tmp_path / "ccw.json"
    b = tmp_path / "cw.json"
    run(capsys, "invariant", str(DATA / "cubic_two_level.json"), "-o", str(a))
    run(capsys, "invariant", str(DATA / "cubic_two_level.json"),
        "--orientation", "cw", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()
