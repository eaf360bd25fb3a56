import json
import subprocess
import sys

import pytest

from competing_urns import __version__
from competing_urns.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectral_cycle4(capsys):
    code, out, _ = run(capsys, "spectral", "--family", "cycle:4")
    doc = json.loads(out)
    assert code == 0 and doc["lambda"] == pytest.approx(2, abs=1e-10)
    assert doc["header"]["command"] == "spectral"


def test_spectral_graph_file(capsys, tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("n 3\n0 1\n1 2\n")
    code, out, _ = run(capsys, "spectral", "--graph", str(p))
    assert code == 0 and json.loads(out)["lambda"] == pytest.approx(2 ** 0.5, abs=1e-10)


def test_numbers_have_15_digits(capsys):
    _, out, _ = run(capsys, "spectral", "--family", "path:3")
    assert "1.4142135623731" in out and "1.41421356237309505" not in out


def test_domain_error_exit_1(capsys, tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("n 4\n0 1\n2 3\n")
    code, _, err = run(capsys, "spectral", "--graph", str(p))
    assert code == 1 and "error" in err


def test_missing_file_exit_1(capsys):
    code, _, _ = run(capsys, "simulate-growth", "--init", "/nonexistent/seeds.txt",
                     "--max-steps", "5")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["spectral", "--family", "cycle:4", "--bogus"],
    ["no-such-command"],
    ["spectral"],
    ["simulate-urn", "--family", "cycle:4", "--z", "1,0,0,0"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2
    if "--bogus" in argv:
        assert "--bogus" in capsys.readouterr().err


def test_version():
    out = subprocess.run([sys.executable, "-m", "competing_urns.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout and "PCG64" in out.stdout


def test_simulate_urn(capsys, tmp_path):
    csv = tmp_path / "t.csv"
    code, out, _ = run(capsys, "simulate-urn", "--family", "cycle:4", "--z", "3,-3,0,0",
                       "--seed", "4", "--stop-when-monochromatic", "--max-steps", "100000",
                       "--stride", "1", "--out", str(csv))
    doc = json.loads(out)
    assert code == 0 and doc["stop_reason"] == "monochromatic" and doc["header"]["seed"] == 4
    lines = csv.read_text().splitlines()
    assert lines[0] == "step,time,vertex_0,vertex_1,vertex_2,vertex_3"
    assert len(lines) == doc["steps"] + 1


def test_simulate_conservative(capsys):
    code, out, _ = run(capsys, "simulate-conservative", "--family", "risk:3",
                       "--z", "0,2,2,-2,-2,1,1", "--max-steps", "2000", "--marked")
    doc = json.loads(out)
    assert code == 0 and doc["ledger_ok"] and doc["Z_equals_Y_minus_M"]


def test_simulate_growth(capsys, tmp_path):
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("0 0 red\n0 3 blue\n")
    dump = tmp_path / "sites.csv"
    code, out, _ = run(capsys, "simulate-growth", "--init", str(seeds), "--max-steps", "200",
                       "--dump-sites", str(dump))
    doc = json.loads(out)
    assert code == 0 and doc["steps"] == 200
    assert len(dump.read_text().splitlines()) == doc["coloured_sites"] + 1


def test_verify_correspondence(capsys, tmp_path):
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("0 0 red\n0 3 blue\n")
    code, out, _ = run(capsys, "verify-correspondence", "--init", str(seeds), "--events", "1000")
    doc = json.loads(out)
    assert code == 0 and doc["divergences"] == [] and doc["events_checked"] >= 1000


def test_risk(capsys, tmp_path):
    csv = tmp_path / "m.csv"
    code, out, _ = run(capsys, "risk", "--n", "5", "--max-steps", "1000", "--stride", "100",
                       "--out", str(csv))
    assert code == 0 and "T" in json.loads(out)
    assert len(csv.read_text().splitlines()) == 12


def test_sweep_twice_byte_identical(capsys, tmp_path):
    cfg = tmp_path / "risk.cfg"
    cfg.write_text("schema = 1\ntarget = urn\ngraph = risk:3\nmonitors = risk\nn = 5, 20\n"
                   "replicas = 12\nmaster_seed = 3\nmax_steps = 2000\n")
    outs = []
    for i, workers in enumerate(("1", "2")):
        d = tmp_path / f"out{i}"
        code, _, _ = run(capsys, "sweep", "--config", str(cfg), "--workers", workers, "--out", str(d))
        assert code == 0
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1] and set(outs[0]) == {"ensemble.json", "monitors.csv", "replicas.csv"}
