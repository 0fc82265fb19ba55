"""JSON and CSV renderings of an :class:`~fuzzstat.analyzer.Analysis`.

Both formats carry the same numbers; floats are written with ``repr`` so a
value read back from either file is bit-identical to the computed one.

``profile.csv`` columns: ``mode, epsilon, n, T, count, density, x``.  For
pointwise rows ``x`` is the worst grid point, for equi rows the arg-max of
``S_n``, and it is empty for uniform rows.

``per_x.csv`` columns: ``mode, epsilon, x, n, T, count, density``, one row
per grid point and ``n`` of the pointwise profiles.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .analyzer import VERDICT_NOTE, Analysis

__all__ = ["PROFILE_COLUMNS", "PER_X_COLUMNS", "report_dict", "profile_rows", "per_x_rows", "write_reports"]

PROFILE_COLUMNS = ("mode", "epsilon", "n", "T", "count", "density", "x")
PER_X_COLUMNS = ("mode", "epsilon", "x", "n", "T", "count", "density")


def _num(v) -> str:
    return repr(float(v))


def _row_x(prof, j):
    if prof.mode == "pointwise":
        return prof.x
    if prof.mode == "equi" and "argmax_x" in prof.extra:
        return float(prof.extra["argmax_x"][j])
    return None


def report_dict(analysis: Analysis, scheme: str, weights: str, config: dict | None = None) -> dict:
    reports = []
    for (mode, eps), prof in analysis.profiles.items():
        entries = prof.entries()
        if prof.mode == "equi":
            for j, e in enumerate(entries):
                e["x"] = _row_x(prof, j)
        reports.append({
            "mode": mode,
            "theta": prof.theta,
            "epsilon": eps,
            "index_mode": prof.index_mode,
            "scheme": scheme,
            "weights": weights,
            "x": prof.x,
            "entries": entries,
            "verdict": analysis.eps_verdicts[mode, eps].to_dict(),
        })
    out = {"note": VERDICT_NOTE}
    if config is not None:
        out["config"] = config
    out["reports"] = reports
    out["verdicts"] = {m: v.to_dict() for m, v in analysis.verdicts.items()}
    if analysis.validation is not None:
        out["validation"] = analysis.validation.to_dict()
    return out


def profile_rows(analysis: Analysis):
    for (mode, eps), prof in analysis.profiles.items():
        for j, e in enumerate(prof.entries()):
            x = _row_x(prof, j)
            yield [mode, _num(eps), str(e["n"]), _num(e["T"]), str(e["count"]), _num(e["density"]),
                   "" if x is None else _num(x)]


def per_x_rows(analysis: Analysis):
    for (mode, eps), prof in analysis.profiles.items():
        if prof.per_x is None:
            continue
        xs, counts, dens = prof.per_x["x"], prof.per_x["count"], prof.per_x["density"]
        for i, x in enumerate(xs):
            for j, n in enumerate(prof.n):
                yield [mode, _num(eps), _num(x), str(int(n)), _num(prof.T[j]), str(int(counts[i, j])),
                       _num(dens[i, j])]


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_reports(analysis: Analysis, out: Path, scheme: str, weights: str, config: dict,
                  fmt: str = "both", per_x: bool = False) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        path = out / "report.json"
        path.write_text(json.dumps(report_dict(analysis, scheme, weights, config), indent=1) + "\n")
        written.append(path)
    if fmt in ("csv", "both"):
        path = out / "profile.csv"
        _write_csv(path, PROFILE_COLUMNS, profile_rows(analysis))
        written.append(path)
        if per_x:
            path = out / "per_x.csv"
            _write_csv(path, PER_X_COLUMNS, per_x_rows(analysis))
            written.append(path)
    return written
