import json
import subprocess
import sys

import pytest

from starforge.cli import main
from starforge.schedule import dump_schedule, parse_schedule, star_schedule


@pytest.fixture
def star_file(tmp_path):
    path = tmp_path / "star.json"
    path.write_text(dump_schedule(star_schedule()))
    return path


def write_config(tmp_path, name, **kw):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(kw))
    return str(path)


def test_gen_block(tmp_path, capsys):
    rc = main(["gen", "block", "--rows", "6", "--cols", "10", "--pin", "6", "--pout", "10", "--out", str(tmp_path)])
    assert rc == 0
    s = parse_schedule((tmp_path / "schedule.json").read_text())
    assert len(s) == 60 and len(s.ports.inputs) == 6 and len(s.ports.outputs) == 10
    assert "60 tokens" in capsys.readouterr().out


def test_gen_linear_and_perm(tmp_path, capsys):
    assert main(["gen", "linear", "--n", "32", "--out", str(tmp_path), "-o", "lin.json"]) == 0
    assert len(parse_schedule((tmp_path / "lin.json").read_text())) == 32
    assert "max_live 32" in capsys.readouterr().out
    assert main(["gen", "perm", "--perm", "2,0,4,1,5,3", "--out", str(tmp_path), "-o", "p.json"]) == 0
    assert len(parse_schedule((tmp_path / "p.json").read_text())) == 6


def test_gen_invalid(tmp_path, capsys):
    assert main(["gen", "perm", "--perm", "0,0,1", "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["gen", "linear", "--n", "4", "--offset", "2", "--out", str(tmp_path)]) == 1


def test_synth_star(tmp_path, star_file, capsys):
    out = tmp_path / "out"
    rc = main(["synth", str(star_file), "--out", str(out), "--emit", "json,dot,rtl,csv"])
    assert rc == 0
    text = capsys.readouterr().out
    assert "slots=5" in text and "saved=1" in text and "ctrl=2" in text and "verify: ok" in text
    report = json.loads((out / "report.json").read_text())
    assert report["verified"] is True
    for name in ("netlist.json", "control.json", "sim.json", "rcg.dot", "arch.dot", "design.vhd.txt", "occupancy.csv"):
        assert (out / name).exists()


def test_synth_registers_only(tmp_path, star_file, capsys):
    rc = main(["synth", str(star_file), "--out", str(tmp_path), "--no-fifo", "--no-lifo"])
    assert rc == 0
    assert "slots=5" in capsys.readouterr().out
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["ctrl"] == 5 and all(s["kind"] == "REG" for s in report["structures"])


def test_synth_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["synth", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["synth", str(tmp_path / "missing.json")]) == 1


def test_synth_config_unknown_key(tmp_path, star_file, capsys):
    cfg = write_config(tmp_path, "typo", min_fifo_lenght=3)
    assert main(["synth", str(star_file), "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "min_fifo_lenght" in capsys.readouterr().err


def test_simulate_roundtrip_and_tamper(tmp_path, star_file, capsys):
    assert main(["synth", str(star_file), "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    args = [str(tmp_path / "netlist.json"), str(tmp_path / "control.json"), str(star_file)]
    assert main(["simulate", *args, "--out", str(tmp_path / "sim"), "--emit", "csv"]) == 0
    assert "ok (12 cycles)" in capsys.readouterr().out
    assert (tmp_path / "sim" / "occupancy.csv").exists()

    control = json.loads((tmp_path / "control.json").read_text())
    pops = [op for row in control for op in row["ops"] if op["op"] == "POP"]
    pops[0]["token"], pops[1]["token"] = pops[1]["token"], pops[0]["token"]
    (tmp_path / "control.json").write_text(json.dumps(control))
    assert main(["simulate", *args]) == 2
    assert "mismatch" in capsys.readouterr().out


def test_simulate_missing_file(tmp_path, star_file):
    assert main(["simulate", str(tmp_path / "n.json"), str(tmp_path / "c.json"), str(star_file)]) == 1


def test_report_table(tmp_path, capsys):
    main(["gen", "block", "--rows", "6", "--cols", "10", "--pin", "6", "--pout", "10", "--out", str(tmp_path)])
    capsys.readouterr()
    cfgs = [
        write_config(tmp_path, "defaults"),
        write_config(tmp_path, "min7", min_fifo_len=7, min_lifo_len=7, fill_threshold=0.95),
        write_config(tmp_path, "nofl", enable_fifo=False, enable_lifo=False),
    ]
    rc = main(["report", str(tmp_path / "schedule.json"), *cfgs, "--out", str(tmp_path / "rep")])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "| config | slots | saved | ctrl | cost | max_live |"
    rows = {r.split("|")[1].strip(): [c.strip() for c in r.split("|")[2:-1]] for r in lines[2:]}
    assert list(rows) == ["defaults", "min7", "nofl"]
    assert int(rows["nofl"][2]) >= int(rows["defaults"][2])
    csv_lines = (tmp_path / "rep" / "report.csv").read_text().splitlines()
    assert csv_lines[0] == "config,slots,saved,ctrl,cost,max_live" and len(csv_lines) == 4


def test_report_star_single(tmp_path, star_file, capsys):
    assert main(["report", str(star_file), write_config(tmp_path, "defaults")]) == 0
    row = capsys.readouterr().out.splitlines()[2]
    assert row == "| defaults | 5 | 1 | 2 | 11.0 | 5 |"


def test_report_invalid_config(tmp_path, star_file):
    bad = tmp_path / "bad.json"
    bad.write_text('{"fill_threshold": 2}')
    assert main(["report", str(star_file), str(bad)]) == 1


def test_dot(tmp_path, star_file, capsys):
    assert main(["dot", str(star_file)]) == 0
    assert capsys.readouterr().out.count("->") == 15
    assert main(["dot", str(star_file), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "rcg.dot").read_text().count("->") == 15


def test_module_entry_point(star_file):
    proc = subprocess.run([sys.executable, "-m", "starforge", "dot", str(star_file)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("digraph")
