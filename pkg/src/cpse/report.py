"""Correlation of the complexity measure against classification
performance, plus serialization of every report type."""

from __future__ import annotations

import csv
import importlib.resources
import io
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .divergence import DEFAULT_LOG_FLOOR, CpseReport, PseSeries
from .errors import ReportError
from .surrogate import TrendReport

_RECORD_COLUMNS = ("architecture", "top1", "top5", "cpse")


@dataclass(frozen=True)
class PerformanceRecord:
    architecture: str
    top1_error: float
    top5_error: float
    cpse: float


@dataclass(frozen=True)
class CorrelationReport:
    group: str
    n: int
    rho_top1: float
    rho_top5: float


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ReportError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < 3:
        raise ReportError(f"need at least 3 points, got {x.size}")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise ReportError("zero variance")
    return float(xc @ yc) / math.sqrt(sxx * syy)


def load_records(text: str) -> list[PerformanceRecord]:
    """Parse a performance CSV with columns architecture,top1,top5,cpse."""
    reader = csv.DictReader(io.StringIO(text))
    fields = tuple(reader.fieldnames or ())
    for col in _RECORD_COLUMNS:
        if col not in fields:
            raise ReportError(f"missing column '{col}'")
    records = []
    for row in reader:
        try:
            rec = PerformanceRecord(
                architecture=row["architecture"],
                top1_error=float(row["top1"]),
                top5_error=float(row["top5"]),
                cpse=float(row["cpse"]),
            )
        except (TypeError, ValueError) as exc:
            raise ReportError(f"bad row {row!r}: {exc}") from None
        for err in (rec.top1_error, rec.top5_error):
            if not 0.0 < err < 100.0:
                raise ReportError(
                    f"'{rec.architecture}': error percentage {err} outside (0, 100)"
                )
        records.append(rec)
    return records


def load_records_file(path) -> list[PerformanceRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return load_records(fh.read())


def load_table1() -> list[PerformanceRecord]:
    """The bundled published performance/complexity table (13 vision models)."""
    text = (
        importlib.resources.files("cpse")
        .joinpath("data", "table1.csv")
        .read_text(encoding="utf-8")
    )
    return load_records(text)


def group_of(architecture: str) -> str:
    """Family key: alphabetic prefix, with a ``_bn`` suffix for batch-norm
    variants (``vgg16bn`` -> ``vgg_bn``, ``resnet50`` -> ``resnet``)."""
    m = re.match(r"^([a-zA-Z]+)", architecture)
    base = m.group(1).lower() if m else architecture.lower()
    if architecture.lower().endswith("bn"):
        return f"{base}_bn"
    return base


def correlate(
    records: list[PerformanceRecord], grouping: str = "prefix"
) -> list[CorrelationReport]:
    """Pearson correlation of the complexity column against each error
    column, per architecture family."""
    if grouping == "prefix":
        keyed: dict[str, list[PerformanceRecord]] = {}
        for rec in records:
            keyed.setdefault(group_of(rec.architecture), []).append(rec)
    elif grouping == "all":
        keyed = {"all": list(records)}
    else:
        raise ReportError(f"unknown grouping '{grouping}'")

    out = []
    for group in sorted(keyed):
        rows = keyed[group]
        if len(rows) < 3:
            raise ReportError(
                f"group '{group}' too small ({len(rows)} records, need >= 3)"
            )
        c = [r.cpse for r in rows]
        out.append(
            CorrelationReport(
                group=group,
                n=len(rows),
                rho_top1=pearson(c, [r.top1_error for r in rows]),
                rho_top5=pearson(c, [r.top5_error for r in rows]),
            )
        )
    return out


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _series_rows(series: PseSeries, floor: float) -> list[dict]:
    return [
        {"l": l, "d_pse": d, "log10_d_pse": math.log10(max(d, floor))}
        for l, d in series.pairs
    ]


def _cpse_report_doc(report: CpseReport) -> dict:
    doc = {
        "cpse": report.cpse,
        "layer_count": report.layer_count,
        "log_floor_hits": report.log_floor_hits,
        "floor": report.floor,
        "skip_first": report.skip_first,
        "config": report.config,
        "series": None,
        "branches": report.branches,
    }
    if report.series is not None:
        s = report.series
        doc["series"] = {
            "bins": s.bins,
            "n": s.n,
            "epsilon": s.epsilon,
            "policy": s.policy,
            "pairs": _series_rows(s, report.floor),
        }
    return doc


def _trend_report_doc(report: TrendReport) -> dict:
    return {
        "cpse": report.cpse,
        "spearman": report.spearman,
        "monotone_fraction": report.monotone_fraction,
        "log_floor_hits": report.log_floor_hits,
        "config": report.config,
        "series": {
            "bins": report.series.bins,
            "n": report.series.n,
            "epsilon": report.series.epsilon,
            "policy": report.series.policy,
            "pairs": _series_rows(report.series, DEFAULT_LOG_FLOOR),
        },
    }


def _series_csv(series: PseSeries, floor: float) -> str:
    lines = ["l,D_pse,log10_D_pse"]
    for l, d in series.pairs:
        lines.append(f"{l},{d!r},{math.log10(max(d, floor))!r}")
    return "\n".join(lines) + "\n"


def _series_tsv(series: PseSeries, floor: float) -> str:
    lines = ["layer\tlog10_D_pse"]
    for l, d in series.pairs:
        lines.append(f"{l}\t{math.log10(max(d, floor))!r}")
    return "\n".join(lines) + "\n"


def _correlations_csv(reports: list[CorrelationReport]) -> str:
    lines = ["group,n,rho_top1,rho_top5"]
    for r in reports:
        lines.append(f"{r.group},{r.n},{r.rho_top1!r},{r.rho_top5!r}")
    return "\n".join(lines) + "\n"


def emit(report, fmt: str) -> bytes:
    """Deterministic serialization of any report type.

    Formats: ``json`` (CpseReport, TrendReport), ``csv`` (PseSeries,
    CpseReport series, CorrelationReport list), ``tsv-plot`` (PseSeries or
    CpseReport, one ``layer<TAB>log10_D_pse`` row per pair).
    """
    if fmt == "json":
        if isinstance(report, CpseReport):
            doc = _cpse_report_doc(report)
        elif isinstance(report, TrendReport):
            doc = _trend_report_doc(report)
        else:
            raise ReportError(f"cannot emit {type(report).__name__} as json")
        return (json.dumps(_json_safe(doc), indent=2, sort_keys=True) + "\n").encode()

    if fmt == "csv":
        if isinstance(report, PseSeries):
            return _series_csv(report, DEFAULT_LOG_FLOOR).encode()
        if isinstance(report, CpseReport) and report.series is not None:
            return _series_csv(report.series, report.floor).encode()
        if isinstance(report, list) and all(
            isinstance(r, CorrelationReport) for r in report
        ):
            return _correlations_csv(report).encode()
        raise ReportError(f"cannot emit {type(report).__name__} as csv")

    if fmt == "tsv-plot":
        if isinstance(report, PseSeries):
            return _series_tsv(report, DEFAULT_LOG_FLOOR).encode()
        if isinstance(report, CpseReport) and report.series is not None:
            return _series_tsv(report.series, report.floor).encode()
        raise ReportError(f"cannot emit {type(report).__name__} as tsv-plot")

    raise ReportError(f"unknown format '{fmt}'")
