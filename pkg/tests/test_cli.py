"""Command-line interface flows."""

import json

import numpy as np

from qcext import serialize as ser
from qcext.cli import main
from qcext.geometry import Body2


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write_body(tmp_path, name, body):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(ser.body_to_json(body)))
    return str(path)


def write_staircase(tmp_path, body, levels):
    bodies = [ser.body_to_json(body.clip([((0.0, 1.0), float(a))]))
              for a in levels]
    fn = {"kind": "staircase", "ambient": ser.body_to_json(body),
          "bodies": bodies, "levels": [float(a) for a in levels],
          "gaps": [float(g) for g in np.append(np.diff(levels), 1.0)]}
    path = tmp_path / "stair.json"
    path.write_text(json.dumps(fn))
    return str(path)


def test_body_make_validate_roundtrip(tmp_path, capsys):
    code, out, _ = run(["body", "make", "disk"], capsys)
    assert code == 0
    path = tmp_path / "disk.json"
    path.write_text(out)
    code, out2, _ = run(["body", "validate", str(path)], capsys)
    assert code == 0
    assert out2 == out


def test_body_make_unknown(capsys):
    code, _, err = run(["body", "make", "dodecahedron"], capsys)
    assert code == 2
    assert "unknown body" in err


def test_body_info_parabola(capsys):
    code, out, _ = run(["body", "make", "parabola"], capsys)
    import tempfile, os

    fd, path = tempfile.mkstemp(suffix=".json")
    os.write(fd, out.encode())
    os.close(fd)
    code, out, _ = run(["body", "info", path], capsys)
    os.unlink(path)
    assert code == 0
    info = json.loads(out)
    assert info["bounded"] is False
    assert info["rotund"] is True
    assert info["asymptotic_direction"] is None


def test_body_validate_nonconvex(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"kind": "polychain",
                                "vertices": [[0, 0], [2, 0], [1, 1], [2, 2], [0, 2]]}))
    code, _, err = run(["body", "validate", str(path)], capsys)
    assert code == 2
    assert "convex" in err


def test_extend_csv_and_tags(tmp_path, capsys):
    par = Body2.epigraph("parabola")
    body_path = write_body(tmp_path, "par", par)
    fn_path = write_staircase(tmp_path, par, np.linspace(0.0, 12.0, 5))
    out_csv = tmp_path / "grid.csv"
    svg = tmp_path / "levels.svg"
    code, _, _ = run(["extend", "--body", body_path, "--function", fn_path,
                      "--grid", "16", "--window-box=-4,4,-4,4",
                      "--out", str(out_csv), "--svg", str(svg)], capsys)
    assert code == 0
    text = out_csv.read_text()
    assert "# regularity: continuous" in text
    assert "x,y,F" in text
    assert svg.read_text().startswith("<svg")


def test_extend_usc_tag(tmp_path, capsys):
    rect = Body2.from_polychain([(0, -1), (1, -1), (1, 1), (0, 1)])
    body_path = write_body(tmp_path, "rect", rect)
    fn_path = write_staircase(tmp_path, rect, np.array([0.0, 0.5, 1.0]))
    out_csv = tmp_path / "rect.csv"
    code, _, _ = run(["extend", "--body", body_path, "--function", fn_path,
                      "--grid", "8", "--window-box=-2,2,-2,2",
                      "--out", str(out_csv)], capsys)
    assert code == 0
    assert "# regularity: usc-only" in out_csv.read_text()


def test_certify_no_lip(tmp_path, capsys):
    disk_path = write_body(tmp_path, "disk", Body2.ball((0, 0), 1.0))
    prefix = tmp_path / "nolip"
    code, out, _ = run(["certify", "--kind", "no-lip", "--body", disk_path,
                        "--kmax", "12", "--out", str(prefix)], capsys)
    assert code == 0
    cert = json.loads((tmp_path / "nolip.json").read_text())
    assert cert["kind"] == "no_lip"
    table = (tmp_path / "nolip_blowup.csv").read_text()
    assert table.splitlines()[1] == "k,secant_gap,alpha_next,product,K_lower"


def test_certify_hypothesis_failure(tmp_path, capsys):
    disk_path = write_body(tmp_path, "disk", Body2.ball((0, 0), 1.0))
    code, _, err = run(["certify", "--kind", "no-uc", "--body", disk_path], capsys)
    assert code == 2
    assert "bounded" in err


def test_certify_usc(tmp_path, capsys):
    prefix = tmp_path / "usc"
    code, _, _ = run(["certify", "--kind", "usc", "--out", str(prefix)], capsys)
    assert code == 0
    data = json.loads((tmp_path / "usc.json").read_text())
    assert data["value_bottom"] == 0.0 and data["value_corner"] == 1.0


def test_characterize_quartet(tmp_path, capsys):
    want = {"disk": "UC_EXTENDABLE", "parabola": "C_EXTENDABLE",
            "square": "QC_EXTENDABLE", "exp_hypograph": "NOT_QC_EXTENDABLE"}
    for name, cls in want.items():
        code, out, _ = run(["body", "make", name], capsys)
        path = tmp_path / f"{name}.json"
        path.write_text(out)
        code, out, _ = run(["characterize", "--body", str(path)], capsys)
        assert code == 0
        assert out.splitlines()[0] == cls


def test_verify_exit_codes(tmp_path, capsys):
    report = tmp_path / "report.json"
    code, out, _ = run(["verify", "--suite", "levelset", "--budget", "small",
                        "--seed", "7", "--out", str(report)], capsys)
    assert code == 0
    assert "PASS" in out
    data = json.loads(report.read_text())
    assert data["failures"] == 0
    code, out, _ = run(["verify", "--suite", "levelset", "--budget", "small",
                        "--seed", "7", "--plant-failure"], capsys)
    assert code == 1
    assert "planted_xy_violation" in out


def test_env_seed_precedence(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QCEXT_SEED", "9")
    code, out, _ = run(["verify", "--suite", "levelset", "--budget", "small"], capsys)
    assert code == 0
    assert "seed 9" in out
    # explicit flag wins over the environment
    code, out, _ = run(["verify", "--suite", "levelset", "--budget", "small",
                        "--seed", "3"], capsys)
    assert "seed 3" in out


def test_plot_body_and_certificate(tmp_path, capsys):
    disk_path = write_body(tmp_path, "disk", Body2.ball((0, 0), 1.0))
    out_svg = tmp_path / "disk.svg"
    code, _, _ = run(["plot", "--body", disk_path, "--window-box=-2,2,-2,2",
                      "--out", str(out_svg)], capsys)
    assert code == 0
    assert out_svg.read_text().startswith("<svg")
    prefix = tmp_path / "nolip"
    run(["certify", "--kind", "no-lip", "--body", disk_path, "--kmax", "10",
         "--out", str(prefix)], capsys)
    cert_svg = tmp_path / "cert.svg"
    code, _, _ = run(["plot", "--certificate", str(tmp_path / "nolip.json"),
                      "--out", str(cert_svg)], capsys)
    assert code == 0
    assert cert_svg.read_text().startswith("<svg")
