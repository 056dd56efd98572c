import numpy as np
import pytest

from quokka.bench import CSV_COLUMNS, MODE_BLOCK, MODE_GBG, plot_rows, run_bench
from quokka.cli import PASS_MESSAGE, finder_main, main, sim_main
from conftest import EXAMPLE_OPTIMIZED, EXAMPLE_RAW


@pytest.fixture
def raw_file(tmp_path):
    path = tmp_path / "raw.txt"
    path.write_text(EXAMPLE_RAW)
    return str(path)


def _ini(tmp_path, total, rank, buffer_q):
    path = tmp_path / "cfg.ini"
    path.write_text(f"[system]\ntotal_qbit={total} // Total qubit for simulation\n"
                    f"rank_qbit={rank}\nbuffer_qbit={buffer_q}\n")
    return str(path)


def test_finder_emits_example_listing(raw_file, capsys):
    assert finder_main([raw_file, "4", "8", "10", "1", "1", "0", "0"]) == 0
    out = capsys.readouterr().out
    assert out.split() == EXAMPLE_OPTIMIZED.split()


def test_finder_through_subcommand(raw_file, capsys):
    assert main(["finder", raw_file, "4", "8", "10", "1", "1", "0", "0"]) == 0
    assert capsys.readouterr().out.split() == EXAMPLE_OPTIMIZED.split()


def test_finder_usage_error(raw_file):
    with pytest.raises(SystemExit) as err:
        finder_main([raw_file, "4"])
    assert err.value.code != 0


def test_finder_reports_parse_errors(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("H 99 0\n")
    assert finder_main([str(path), "4", "8", "10", "1", "1", "0", "0"]) == 1
    assert "line 1" in capsys.readouterr().err


def test_gen_writes_parseable_file(tmp_path, capsys):
    out = tmp_path / "qft.txt"
    assert main(["gen", "--family", "qft", "--qubits", "8", "--out", str(out)]) == 0
    from quokka.circuit import parse_raw
    assert len(parse_raw(out.read_text(), 8).gates) == 36


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    main(["gen", "--family", "qv", "--qubits", "10", "--seed", "3", "--out", str(a)])
    main(["gen", "--family", "qv", "--qubits", "10", "--seed", "3", "--out", str(b)])
    assert a.read_text() == b.read_text()


def test_sim_runs_example(tmp_path, raw_file, capsys):
    opt_path = tmp_path / "opt.txt"
    opt_path.write_text(EXAMPLE_OPTIMIZED)
    ini = _ini(tmp_path, 10, 2, 6)
    assert sim_main(["-i", ini, "-c", str(opt_path)]) == 0
    out = capsys.readouterr().out
    assert "norm 1.000000000000" in out
    for key in ("gate_seconds", "ims_seconds", "xrs_seconds", "aio_seconds"):
        assert key in out


def test_sim_amplitude_dump(tmp_path, capsys):
    circ = tmp_path / "h.txt"
    circ.write_text("1\nH 0 0\n")
    ini = _ini(tmp_path, 2, 0, 2)
    amps = tmp_path / "amps.txt"
    assert sim_main(["-i", ini, "-c", str(circ), "--amps", "4",
                     "--amps-file", str(amps)]) == 0
    values = [complex(float(a), float(b)) for a, b in
              (line.split() for line in amps.read_text().splitlines())]
    assert np.allclose(values, [2 ** -0.5, 2 ** -0.5, 0, 0])


def test_sim_unknown_config_key(tmp_path, capsys):
    circ = tmp_path / "h.txt"
    circ.write_text("1\nH 0 0\n")
    ini = tmp_path / "bad.ini"
    ini.write_text("[system]\ntotal_qbit=2\nrank_qbit=0\nbuffer_qbit=2\nextra=1\n")
    assert sim_main(["-i", str(ini), "-c", str(circ)]) == 1
    assert "extra" in capsys.readouterr().err


def test_sim_missing_file(tmp_path, capsys):
    ini = _ini(tmp_path, 2, 0, 2)
    assert sim_main(["-i", ini, "-c", str(tmp_path / "nope.txt")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_sim_layout_mismatch(tmp_path, raw_file, capsys):
    # circuit optimized for a single rank cannot run with rank_qbit=4
    opt_path = tmp_path / "opt.txt"
    opt_path.write_text(EXAMPLE_OPTIMIZED)
    ini = _ini(tmp_path, 10, 4, 6)
    assert sim_main(["-i", ini, "-c", str(opt_path)]) == 1
    err = capsys.readouterr().err
    assert "local" in err or "rank" in err


def test_validate_pass_and_fail(tmp_path, raw_file, capsys):
    opt_path = tmp_path / "opt.txt"
    opt_path.write_text(EXAMPLE_OPTIMIZED)
    assert main(["validate", "--raw", raw_file, "--opt", str(opt_path)]) == 0
    assert PASS_MESSAGE in capsys.readouterr().out

    # corrupt one gate line: qubit 3 now sees id 12 before id 6
    bad = EXAMPLE_OPTIMIZED.replace("H 3 6", "H 3 12")
    bad_path = tmp_path / "bad.txt"
    bad_path.write_text(bad)
    assert main(["validate", "--raw", raw_file, "--opt", str(bad_path)]) == 1
    assert "mismatch" in capsys.readouterr().out


def test_bench_rows_and_plot(tmp_path):
    rows = run_bench("qubit", sizes=[6, 7], reps=1)
    assert len(rows) == 4
    assert list(rows[0]) == CSV_COLUMNS
    modes = {r["mode"] for r in rows}
    assert modes == {MODE_BLOCK, MODE_GBG}
    fig = tmp_path / "qubit.png"
    plot_rows(rows, "qubit", str(fig))
    assert fig.stat().st_size > 0


def test_bench_cli_csv(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    assert main(["bench", "--suite", "scaling", "--qubits", "8",
                 "--ranks", "1", "2", "--reps", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3


def test_bench_breakdown_plot(tmp_path):
    rows = run_bench("breakdown", qubits=6, reps=1)
    path = plot_rows(rows, "breakdown", str(tmp_path / "b.pdf"))
    assert (tmp_path / "b.pdf").exists() and path.endswith(".pdf")
