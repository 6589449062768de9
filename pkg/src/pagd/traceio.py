"""CSV/JSON serialization of run traces.

CSV columns, in order::

    t, z0 .. z{d-1}, d_norm, cert_residual, nat_residual, tan_residual,
    anchor_dist, bound_thm, bound_d_decay

Floats are written with ``repr`` (shortest round-trip form); undefined
values are empty cells. A ``<name>.json`` sidecar holds the run metadata.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .algorithms import RunTrace

SCALAR_COLUMNS = ("d_norm", "cert_residual", "nat_residual", "tan_residual",
                  "anchor_dist", "bound_thm", "bound_d_decay")


def _cell(x):
    x = float(x)
    return "" if np.isnan(x) else repr(x)


def header(dim):
    return ["t"] + [f"z{i}" for i in range(dim)] + list(SCALAR_COLUMNS)


def trace_rows(trace):
    cols = [getattr(trace, name) for name in SCALAR_COLUMNS]
    for t in range(len(trace.z)):
        yield [str(t)] + [_cell(v) for v in trace.z[t]] + [_cell(col[t]) for col in cols]


def write_trace_csv(trace, path, sidecar=True):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header(trace.z.shape[1]))
        w.writerows(trace_rows(trace))
    if sidecar:
        path.with_suffix(".json").write_text(json.dumps(trace.metadata(), indent=2) + "\n")
    return path


def write_combined_csv(traces, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method"] + header(traces[0].z.shape[1]))
        for tr in traces:
            w.writerows([tr.method] + row for row in trace_rows(tr))
    return path


def read_trace_csv(path, metadata=None):
    """Load a trace written by :func:`write_trace_csv`.

    Metadata comes from the sidecar next to the CSV unless given explicitly.
    """
    path = Path(path)
    if metadata is None:
        side = path.with_suffix(".json")
        metadata = json.loads(side.read_text()) if side.exists() else {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        head = next(reader)
        rows = [[float(c) if c != "" else np.nan for c in r] for r in reader]
    data = np.array(rows, dtype=np.float64).reshape(len(rows), len(head))
    zcols = [i for i, h in enumerate(head) if h.startswith("z")]
    col = {h: data[:, i] for i, h in enumerate(head)}
    sched = metadata.get("schedule") or {}
    return RunTrace(
        method=metadata.get("method", "p-agd"), label=metadata.get("label", path.stem),
        z=data[:, zcols], d_norm=col["d_norm"],
        c=np.full((len(rows), len(zcols)), np.nan),
        cert_residual=col["cert_residual"], nat_residual=col["nat_residual"],
        tan_residual=col["tan_residual"], anchor_dist=col["anchor_dist"],
        bound_thm=col["bound_thm"], bound_d_decay=col["bound_d_decay"],
        gamma=sched.get("gamma"), lipschitz_L=sched.get("L"), step=metadata.get("step"),
        T=int(metadata.get("T", len(rows) - 1)), diverged=bool(metadata.get("diverged", False)),
        stopped_early=bool(metadata.get("stopped_early", False)),
    )
