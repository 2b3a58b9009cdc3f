import json
import math
import os
import subprocess
import sys

import pytest

FIG1 = "configs/fig1.json"


def run_cli(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    return subprocess.run(
        [sys.executable, "-m", "favlab.cli", *args],
        capture_output=True,
        text=True,
        env=e,
        timeout=120,
    )


def test_dim(tmp_path):
    r = run_cli("dim", "--ifs", FIG1)
    assert r.returncode == 0
    label, value = r.stdout.split()
    assert label == "gamma"
    assert abs(float(value) - 1.0) < 1e-12


def test_config_echoed_to_stderr():
    r = run_cli("dim", "--ifs", FIG1)
    assert "config:" in r.stderr
    assert FIG1 in r.stderr


def test_malformed_json_exit2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    r = run_cli("dim", "--ifs", str(bad))
    assert r.returncode == 2
    assert r.stderr.splitlines()[-1].startswith("ERROR config:")


def test_unknown_flag_exit2():
    r = run_cli("dim", "--ifs", FIG1, "--bogus", "1")
    assert r.returncode == 2


def test_domain_error_exit1():
    r = run_cli("net", "--theta-over-pi", "1/2", "--eps", "0.01",
                "--pmax", "10")
    assert r.returncode == 1
    assert r.stderr.splitlines()[-1].startswith("ERROR no-net:")


def test_favard_csv(tmp_path):
    out = tmp_path / "out.csv"
    r = run_cli("favard", "--ifs", FIG1, "--n", "4", "--angles", "8",
                "--csv", str(out))
    assert r.returncode == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# favlab ")
    assert "config=" in lines[0] and "seed=0" in lines[0]
    assert lines[1] == "n,theta,length"
    assert len(lines) == 2 + 8 + 1  # header comment + columns + rows + summary
    for row in lines[2:]:
        n, theta, length = row.split(",")
        assert int(n) == 4
        float(theta), float(length)


def test_favard_csv_deterministic_across_threads(tmp_path):
    out = tmp_path / "fav.csv"
    outs = []
    for workers in ("1", "3"):
        r = run_cli("favard", "--ifs", FIG1, "--n", "5", "--angles", "16",
                    "--csv", str(out), env={"FAVLAB_THREADS": workers})
        assert r.returncode == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_relclose_roundtrip(tmp_path):
    cert = tmp_path / "cert.json"
    r = run_cli("relclose", "find", "--ifs", FIG1, "--eps", "0.3",
                "--out", str(cert))
    assert r.returncode == 0
    data = json.loads(cert.read_text())
    assert len(data["words"]) == 2
    doubled = tmp_path / "cert2.json"
    r = run_cli("relclose", "double", "--ifs", FIG1, "--cert", str(cert),
                "--eps", "2.0", "--out", str(doubled))
    assert r.returncode == 0
    assert len(json.loads(doubled.read_text())["words"]) == 4


def test_relclose_power_and_density(tmp_path):
    cert = tmp_path / "pow.json"
    r = run_cli("relclose", "power", "--ifs", FIG1, "--u", "2", "--v", "3",
                "--n", "3", "--out", str(cert))
    assert r.returncode == 0
    theta = json.loads(cert.read_text())["theta"]
    r = run_cli("density", "--ifs", FIG1, "--theta", str(theta), "--n", "8",
                "--cert", str(cert))
    assert r.returncode == 0
    fields = dict(zip(r.stdout.split()[::2], r.stdout.split()[1::2]))
    assert float(fields["ratio"]) > 0.0


def test_dioph_output():
    r = run_cli("dioph", "--alpha", "(1+sqrt(5))/2", "--nmax", "1000",
                "--d", "2")
    assert r.returncode == 0
    assert r.stdout.splitlines()[0].startswith("c_hat ")
    r = run_cli("dioph", "--alpha", "3/7", "--nmax", "1000", "--d", "2")
    assert r.returncode == 1
    assert "ERROR rational-alpha" in r.stderr


def test_count_and_schedule():
    r = run_cli("count", "avoid", "--m", "2", "--s", "2", "--blocks", "2")
    assert r.returncode == 0
    assert r.stdout.splitlines()[0] == "exact 9 bound 9"
    r = run_cli("schedule", "--ifs", FIG1, "--n", "1", "--c1", "1",
                "--k", "1", "--d", "2", "--delta", "0.1")
    assert r.returncode == 0
    assert "s_n 54" in r.stdout


def test_visible_csv(tmp_path):
    out = tmp_path / "vis.csv"
    r = run_cli("visible", "--ifs", FIG1, "--ax", "3", "--ay", "0",
                "--s", "1", "--n", "6", "--csv", str(out))
    assert r.returncode == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "n,covering_sum"
    sums = [float(row.split(",")[1]) for row in lines[2:]]
    assert len(sums) == 6
    assert all(b <= a + 1e-12 for a, b in zip(sums, sums[1:]))


def test_render_svg(tmp_path):
    out0 = tmp_path / "a.svg"
    r = run_cli("render", "--ifs", FIG1, "--depth", "0", "--svg", str(out0))
    assert r.returncode == 0
    doc = out0.read_text()
    assert doc.count("<circle") == 1
    out6a, out6b = tmp_path / "b.svg", tmp_path / "c.svg"
    run_cli("render", "--ifs", FIG1, "--depth", "6", "--svg", str(out6a))
    run_cli("render", "--ifs", FIG1, "--depth", "6", "--svg", str(out6b))
    assert out6a.read_bytes() == out6b.read_bytes()  # byte-identical
    assert out6a.read_text().count("<circle") == 729
    import xml.etree.ElementTree as ET

    ET.fromstring(out6a.read_text())  # valid XML


def test_decay_fit_pipeline(tmp_path):
    csv = tmp_path / "series.csv"
    rows = ["# favlab test", "n,theta,length"]
    for n in range(3, 13):
        rows.append(f"{n},0.0,{2.0 / math.log(n) ** 0.5!r}")
    csv.write_text("\n".join(rows) + "\n")
    r = run_cli("decay", "fit", "--csv", str(csv))
    assert r.returncode == 0
    first = r.stdout.splitlines()[0].split()
    fields = dict(zip(first[::2], first[1::2]))
    assert float(fields["A_hat"]) == pytest.approx(2.0, abs=1e-6)
    assert float(fields["B_hat"]) == pytest.approx(0.5, abs=1e-6)
