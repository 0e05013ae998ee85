import json
import subprocess
import sys

import pytest

from corrwork import cli, sweeps

SMALL = {
    "two-qubit": ["--system", "two-qubit", "--eps", "0,-0.5,-1", "--t", "0.1:0.5:0.2"],
    "fermion": ["--system", "fermion", "--eps-even", "0.5", "--eps-odd", "0.25",
                "--t", "0.2,0.6", "--w-rel", "0.1,0.5,1"],
    "fermion-thermal": ["--system", "fermion", "--kind", "thermal", "--t", "0.01,0.5",
                        "--scale", "0:1:0.5"],
    "boson": ["--system", "boson", "--eps=-0.5,0.5", "--t", "0.2,0.8", "--w", "0.1,0.5"],
}


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_no_arguments_is_usage_error(capsys):
    code, out, err = run([], capsys)
    assert code == 2 and "usage" in err and out == ""


@pytest.mark.parametrize("argv", [
    ["--system", "qutrit"],
    ["--omega", "1"],
    ["--system", "boson", "--w", "0.1", "--w-rel", "0.1"],
    ["--system", "two-qubit", "--eps", "0.3"],
    ["--system", "two-qubit", "--t", "1,0.5"],
    ["--system", "two-qubit", "--alpha-ii", "1.5"],
    ["--system", "boson", "--eps", "1.2"],
    ["--system", "boson", "--w-rel", "0.5"],
    ["--system", "fermion", "--eps", "0.5"],
    ["--system", "fermion", "--eps-odd", "1.5", "--t", "0"],  # W_min = 0
    ["--system", "fermion", "--t", "a:b:c"],
])
def test_usage_errors(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2 and out == "" and "error" in err


def test_parse_round_trip():
    cfg = cli.parse_config(["--system", "fermion", "--eps-even", "1.0", "--eps-odd", "0.5",
                            "--t", "0.1:1:0.1", "--w-rel", "0.05:1:0.05"])
    assert cfg.system == "fermion" and cfg.eps_even == 1.0 and cfg.eps_odd == 0.5
    assert cfg.T_grid == [round(0.1 * k, 12) for k in range(1, 11)]
    assert len(cfg.W_grid) == 20 and cfg.W_grid[-1] == 1.0 and cfg.w_relative
    again = cli.parse_config(["--system", "fermion", "--eps-even", "1", "--eps-odd", "0.5",
                              "--t", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1",
                              "--w-rel", ",".join(f"{0.05 * k:.2f}" for k in range(1, 21))])
    assert again.to_json() == cfg.to_json()


def test_parse_grids():
    assert sweeps.parse_grid("0:-1:-0.25") == [0, -0.25, -0.5, -0.75, -1]
    assert sweeps.parse_grid("0.01,0.05:0.15:0.05") == [0.01, 0.05, 0.1, 0.15]
    for bad in ("", "1:2:0", "1:2:-1", "x"):
        with pytest.raises(ValueError):
            sweeps.parse_grid(bad)


def test_config_file_and_flag_precedence(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"system": "boson", "eps": "0.3", "t": "0.5", "w": "0.2,0.4"}))
    cfg = cli.parse_config(["--config", str(path)])
    assert cfg.system == "boson" and cfg.eps == [0.3] and cfg.W_grid == [0.2, 0.4]
    cfg = cli.parse_config(["--config", str(path), "--eps", "-0.4", "--w", "1"])
    assert cfg.eps == [-0.4] and cfg.W_grid == [1.0] and cfg.T_grid == [0.5]
    path.write_text(json.dumps({"system": "fermion", "w-rel": "0.5", "t": "0.3"}))
    cfg = cli.parse_config(["--config", str(path), "--w", "0.1"])
    assert not cfg.w_relative and cfg.W_grid == [0.1]


def test_config_file_errors(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"system": "boson", "colour": "blue"}))
    assert run(["--config", str(path)], capsys)[0] == 2
    path.write_text("{not json")
    assert run(["--config", str(path)], capsys)[0] == 2
    assert run(["--config", str(tmp_path / "missing.json")], capsys)[0] == 2


@pytest.mark.parametrize("name", sorted(SMALL))
def test_csv_shape(name, capsys, monkeypatch):
    monkeypatch.setenv("CORRWORK_THREADS", "1")
    code, out, err = run(SMALL[name], capsys)
    assert code == 0 and err == ""
    lines = out.split("\n")
    assert out.endswith("\n") and "\r" not in out
    assert lines[0].startswith("# corrwork ")
    json.loads(lines[0][len("# corrwork "):])
    header = lines[1].split(",")
    cfg = cli.parse_config(SMALL[name])
    assert header == sweeps.columns(cfg)
    rows = [l.split(",") for l in lines[2:-1]]
    assert rows and all(len(r) == len(header) for r in rows)
    assert "-0" not in [v for r in rows for v in r]
    T = [float(r[0]) for r in rows]
    assert T == sorted(T)


def test_output_file_and_io_error(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CORRWORK_THREADS", "1")
    out = tmp_path / "t.csv"
    code, stdout, _ = run(SMALL["two-qubit"] + ["-o", str(out)], capsys)
    assert code == 0 and stdout == ""
    assert out.read_text().startswith("# corrwork ")
    code, _, err = run(SMALL["two-qubit"] + ["-o", str(tmp_path / "no" / "t.csv")], capsys)
    assert code == 1 and "cannot write" in err


def test_numerical_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("CORRWORK_THREADS", "1")

    def broken(cfg, T):
        raise sweeps.NumericalFailure(f"fermion cell T={T:g}: budget exceeded")

    monkeypatch.setattr(sweeps, "_fermion_cell", broken)
    code, out, err = run(SMALL["fermion"], capsys)
    assert code == 3 and out == "" and "T=0.2" in err


def test_bad_thread_count(capsys, monkeypatch):
    monkeypatch.setenv("CORRWORK_THREADS", "zero")
    assert run(SMALL["boson"], capsys)[0] == 2
    monkeypatch.setenv("CORRWORK_THREADS", "0")
    assert run(SMALL["boson"], capsys)[0] == 2


@pytest.mark.parametrize("name", ["fermion", "boson"])
def test_output_independent_of_workers(name, monkeypatch):
    cfg = cli.parse_config(SMALL[name])
    text = [sweeps.format_csv(cfg, sweeps.run_sweep(cfg, workers=n)) for n in (1, 3)]
    assert text[0] == text[1]


def test_module_entry_point_is_byte_identical(tmp_path):
    outs = []
    for threads in ("1", "2", "2"):
        p = subprocess.run([sys.executable, "-m", "corrwork"] + SMALL["two-qubit"],
                           capture_output=True, env={"CORRWORK_THREADS": threads, "PATH": ""},
                           check=True)
        outs.append(p.stdout)
    assert outs[0] == outs[1] == outs[2]
