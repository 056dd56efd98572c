"""
Benchmark harness: timed runs of the optimizer and simulator over the
standard gate and circuit workloads, reported as CSV rows with a per-class
breakdown (gate / in-memory swap / cross-rank swap / optimization time)
and optional matplotlib figures next to the delimited output.
"""
from __future__ import annotations

import csv
import io
import os
import time

from .circuit import CrossRankSwap, LayoutParams
from .generators import CIRCUIT_FAMILIES, GATE_FAMILIES, generate
from .optimizer import optimize
from .simulator import Simulator

CSV_COLUMNS = ["suite", "workload", "qubits", "ranks", "chunk_qubits",
               "cacheline_qubits", "buffer_qubits", "mode", "reps",
               "mean_seconds", "gate_seconds", "ims_seconds", "xrs_seconds",
               "aio_seconds", "status"]

MODE_BLOCK = "block-by-block"
MODE_GBG = "gate-by-gate-baseline"

SUITES = ("qubit", "scaling", "gate", "circuit", "breakdown")


def _available_bytes() -> int:
    try:
        return os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_AVPHYS_PAGES")
    except (ValueError, OSError):
        return 1 << 62


def _fits_in_memory(n: int, ranks: int, b: int) -> bool:
    state = (1 << n) * 16
    buffers = ranks * (1 << b) * 16 if ranks > 1 else 0
    return (state + buffers) * 1.3 < _available_bytes()


def _row(suite, workload, n, ranks, mode, reps, layout=None, **kw) -> dict:
    row = {"suite": suite, "workload": workload, "qubits": n, "ranks": ranks,
           "chunk_qubits": layout.c if layout else "",
           "cacheline_qubits": layout.cl if layout else "",
           "buffer_qubits": layout.b if layout else "",
           "mode": mode, "reps": reps, "mean_seconds": "", "gate_seconds": "",
           "ims_seconds": "", "xrs_seconds": "", "aio_seconds": "", "status": "ok"}
    row.update(kw)
    return row


def _time_workload(suite: str, workload: str, n: int, r: int, mode: str,
                   reps: int, seed: int, fusion: bool, workers: int,
                   p: int = 5) -> dict:
    raw = generate(workload, n, seed, p=p)
    c = min(10, n - r)
    b_probe = min(n - r, 20)
    if not _fits_in_memory(n, 1 << r, b_probe):
        return _row(suite, workload, n, 1 << r, mode, reps, status="skipped_oom")

    t0 = time.perf_counter()
    layout = LayoutParams(n=n, c=c, r=r, f=c if fusion else 0, b=b_probe)
    opt = optimize(raw, layout, enable_xrs=(r > 0), enable_fusion=fusion)
    aio = time.perf_counter() - t0
    s_max = max((len(i.local_set) for i in opt.instructions
                 if isinstance(i, CrossRankSwap)), default=0)
    layout = LayoutParams(n=n, c=c, r=r, f=layout.f, b=max(s_max, min(n - r, 20)))

    totals = {"gate": 0.0, "ims": 0.0, "xrs": 0.0}
    wall = 0.0
    with Simulator(layout, workers_per_rank=workers) as sim:
        for _ in range(reps):
            sim.reset()
            t0 = time.perf_counter()
            res = sim.run(opt) if mode == MODE_BLOCK else sim.run_gate_by_gate(raw)
            wall += time.perf_counter() - t0
            for k in totals:
                totals[k] += res.timings[k]
    return _row(suite, workload, n, 1 << r, mode, reps, layout=layout,
                mean_seconds=f"{wall / reps:.6f}",
                gate_seconds=f"{totals['gate'] / reps:.6f}",
                ims_seconds=f"{totals['ims'] / reps:.6f}",
                xrs_seconds=f"{totals['xrs'] / reps:.6f}",
                aio_seconds=f"{aio:.6f}")


def run_bench(suite: str, *, sizes: list[int] | None = None, qubits: int = 20,
              ranks: list[int] | None = None, reps: int = 10, seed: int = 0,
              fusion: bool = False, workers: int = 1) -> list[dict]:
    """Run one suite and return its CSV rows; every run records the layout
    it used through the qubits/ranks/mode columns."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    rows: list[dict] = []
    if suite == "qubit":
        for n in sizes or range(20, 27):
            for mode in (MODE_BLOCK, MODE_GBG):
                rows.append(_time_workload(suite, "h", n, 0, mode, reps, seed, fusion, workers))
    elif suite == "scaling":
        for nr in ranks or (1, 2, 4, 8):
            r = nr.bit_length() - 1
            rows.append(_time_workload(suite, "h", qubits, r, MODE_BLOCK, reps, seed,
                                       fusion, workers))
    elif suite == "gate":
        for fam in GATE_FAMILIES:
            for mode in (MODE_BLOCK, MODE_GBG):
                rows.append(_time_workload(suite, fam, qubits, 0, mode, reps, seed,
                                           fusion, workers))
    elif suite == "circuit":
        for fam in CIRCUIT_FAMILIES:
            for mode in (MODE_BLOCK, MODE_GBG):
                rows.append(_time_workload(suite, fam, qubits, 0, mode, reps, seed,
                                           fusion, workers))
    else:  # breakdown
        for fam in CIRCUIT_FAMILIES:
            rows.append(_time_workload(suite, fam, qubits, 0, MODE_BLOCK, reps, seed,
                                       fusion, workers))
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def plot_rows(rows: list[dict], suite: str, path: str) -> str:
    """Render one figure for the suite's rows to `path` (PNG/PDF by suffix)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = [r for r in rows if r["status"] == "ok"]
    fig, ax = plt.subplots(figsize=(7, 4.2))
    if suite in ("qubit", "scaling"):
        x_key = "qubits" if suite == "qubit" else "ranks"
        for mode in (MODE_BLOCK, MODE_GBG):
            pts = [(int(r[x_key]), float(r["mean_seconds"])) for r in rows if r["mode"] == mode]
            if pts:
                pts.sort()
                ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=mode)
        ax.set_xlabel(x_key)
        ax.set_ylabel("mean seconds")
        ax.set_yscale("log")
        ax.legend()
    elif suite == "breakdown":
        labels = [r["workload"] for r in rows]
        bottom = [0.0] * len(rows)
        for key, color in (("gate_seconds", "#4c72b0"), ("ims_seconds", "#dd8452"),
                           ("xrs_seconds", "#55a868"), ("aio_seconds", "#c44e52")):
            vals = [float(r[key]) for r in rows]
            ax.bar(labels, vals, bottom=bottom, label=key.replace("_seconds", ""), color=color)
            bottom = [b + v for b, v in zip(bottom, vals)]
        ax.set_ylabel("seconds")
        ax.legend()
    else:
        labels = sorted({r["workload"] for r in rows})
        width = 0.4
        for k, mode in enumerate((MODE_BLOCK, MODE_GBG)):
            vals = []
            for lab in labels:
                match = [float(r["mean_seconds"]) for r in rows
                         if r["workload"] == lab and r["mode"] == mode]
                vals.append(match[0] if match else 0.0)
            ax.bar([i + k * width for i in range(len(labels))], vals, width, label=mode)
        ax.set_xticks([i + width / 2 for i in range(len(labels))])
        ax.set_xticklabels(labels)
        ax.set_ylabel("mean seconds")
        ax.legend()
    ax.set_title(f"{suite} suite")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
