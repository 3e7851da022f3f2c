"""File formats shared by the command-line tools.

* data CSV: one value per line, optional single ``value`` header;
  positions are implicitly 1..N.
* labels CSV: header ``start,end,changes``; 1-based inclusive region
  bounds.
* segments CSV: header ``start,end,mean``; changepoints are the
  segment end positions except the last.
* corpus directory: ``<id>.data.csv`` plus ``<id>.labels.csv`` pairs.
* experiment report / ROC / timing CSVs and key=value model files.

Floats are written with 6 significant digits by default; pass a larger
``precision`` (17 round-trips doubles) for full precision.  Parse
errors carry the file name and line number.
"""

from __future__ import annotations

import math
import os
from typing import Iterable, Mapping, Sequence

from .core import DataSequence, LabelSet, Segmentation, validate_labels
from .crossval import CorpusSequence, ReportRow, RocResult
from .metrics import ErrorCounts, LabelOutcome
from .penalty import PenaltyModel

__all__ = [
    "FormatError",
    "fmt",
    "read_data",
    "write_data",
    "read_labels",
    "write_labels",
    "write_segments",
    "read_segments",
    "segments_to_changepoints",
    "write_changepoints",
    "write_evaluation",
    "write_report",
    "read_report",
    "write_roc",
    "write_timing",
    "write_models",
    "read_models",
    "load_corpus",
    "write_corpus",
]


class FormatError(ValueError):
    """A file failed to parse; message names the file and line."""


def fmt(value: float, precision: int = 6) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{precision}g}"
    return str(value)


def _fail(path: str, line_no: int, message: str) -> None:
    raise FormatError(f"{path}:{line_no}: {message}")


def read_data(path: str) -> DataSequence:
    values: list[float] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            if line_no == 1 and text.lower() == "value":
                continue
            try:
                values.append(float(text))
            except ValueError:
                _fail(path, line_no, f"expected a number, got {text!r}")
    if not values:
        raise FormatError(f"{path}:1: no data values found")
    try:
        return DataSequence(values)
    except ValueError as exc:
        raise FormatError(f"{path}:1: {exc}") from exc


def write_data(path: str, seq: DataSequence, precision: int = 17) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("value\n")
        for v in seq.values:
            handle.write(fmt(float(v), precision) + "\n")


def read_labels(path: str, n: int) -> LabelSet:
    raw: list[tuple[int, int, int]] = []
    with open(path, encoding="utf-8") as handle:
        lines = list(enumerate(handle, start=1))
    body = [(no, line.strip()) for no, line in lines if line.strip()]
    if not body or body[0][1].replace(" ", "") != "start,end,changes":
        _fail(path, body[0][0] if body else 1, 'expected header "start,end,changes"')
    line_of: list[int] = []
    for line_no, text in body[1:]:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            _fail(path, line_no, f"expected 3 comma-separated fields, got {text!r}")
        try:
            raw.append((int(parts[0]), int(parts[1]), int(parts[2])))
        except ValueError:
            _fail(path, line_no, f"expected integers, got {text!r}")
        line_of.append(line_no)
    try:
        return validate_labels(raw, n)
    except ValueError as exc:
        index = getattr(exc, "index", None)
        line_no = line_of[index] if index is not None and index < len(line_of) else 1
        raise FormatError(f"{path}:{line_no}: {exc}") from exc


def write_labels(path: str, labels: LabelSet) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("start,end,changes\n")
        for lab in labels.labels:
            handle.write(f"{lab.start},{lab.end},{lab.changes}\n")


def write_segments(
    path: str, segmentation: Segmentation, n: int, precision: int = 6
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("start,end,mean\n")
        for start, end, mean in segmentation.segments(n):
            handle.write(f"{start},{end},{fmt(mean, precision)}\n")


def read_segments(path: str) -> list[tuple[int, int, float]]:
    rows: list[tuple[int, int, float]] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or (line_no == 1 and text.replace(" ", "") == "start,end,mean"):
                continue
            parts = text.split(",")
            if len(parts) != 3:
                _fail(path, line_no, f"expected start,end,mean, got {text!r}")
            try:
                rows.append((int(parts[0]), int(parts[1]), float(parts[2])))
            except ValueError:
                _fail(path, line_no, f"could not parse {text!r}")
    if not rows:
        raise FormatError(f"{path}:1: no segments found")
    return rows


def segments_to_changepoints(rows: Sequence[tuple[int, int, float]]) -> list[int]:
    """Changepoints are every segment end except the final one."""
    return [end for _, end, _ in rows[:-1]]


def write_changepoints(path: str, changepoints: Iterable[int]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("changepoint\n")
        for cp in changepoints:
            handle.write(f"{cp}\n")


def write_evaluation(
    path: str, outcomes: Sequence[LabelOutcome], counts: ErrorCounts
) -> None:
    """Per-label statuses followed by total rows."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("label_index,predicted_changes,status\n")
        for outcome in outcomes:
            handle.write(
                f"{outcome.label_index},{outcome.predicted_changes},{outcome.status}\n"
            )
        handle.write(f"total_fp,{counts.fp},\n")
        handle.write(f"total_fn,{counts.fn},\n")
        handle.write(f"total_tp,{counts.tp},\n")
        handle.write(f"total_labels,{counts.total_labels},\n")
        handle.write(f"total_positive_labels,{counts.positive_labels},\n")


_REPORT_HEADER = (
    "sequence_id,split,algorithm,method,penalty,"
    "train_fp,train_fn,train_tp,train_labels,train_positive,"
    "test_fp,test_fn,test_tp,test_labels,test_positive"
)


def write_report(path: str, rows: Sequence[ReportRow], precision: int = 6) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(_REPORT_HEADER + "\n")
        for r in rows:
            handle.write(
                ",".join(
                    [
                        r.sequence_id,
                        str(r.split),
                        r.algorithm,
                        r.method,
                        fmt(r.penalty, precision),
                        str(r.train.fp),
                        str(r.train.fn),
                        str(r.train.tp),
                        str(r.train.total_labels),
                        str(r.train.positive_labels),
                        str(r.test.fp),
                        str(r.test.fn),
                        str(r.test.tp),
                        str(r.test.total_labels),
                        str(r.test.positive_labels),
                    ]
                )
                + "\n"
            )


def read_report(path: str) -> list[dict[str, str]]:
    with open(path, encoding="utf-8") as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines or lines[0] != _REPORT_HEADER:
        raise FormatError(f"{path}:1: unexpected report header")
    keys = _REPORT_HEADER.split(",")
    return [dict(zip(keys, line.split(","))) for line in lines[1:]]


def write_roc(
    path: str,
    roc: Mapping[tuple[int, str, str], RocResult],
    precision: int = 6,
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("split,method,algorithm,multiplier,fpr,tpr,auc\n")
        for (split, method, algorithm) in sorted(roc):
            points, auc = roc[(split, method, algorithm)]
            auc_text = fmt(auc, precision) if auc is not None else "NA"
            for point in points:
                fpr = fmt(point.fpr, precision) if point.fpr is not None else "NA"
                tpr = fmt(point.tpr, precision) if point.tpr is not None else "NA"
                handle.write(
                    f"{split},{method},{algorithm},"
                    f"{fmt(point.penalty, precision)},{fpr},{tpr},{auc_text}\n"
                )


def write_timing(path: str, rows, precision: int = 6) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("algorithm,n,m,median_seconds,q25,q75\n")
        for r in rows:
            handle.write(
                f"{r.algorithm},{r.n},{r.m},{fmt(r.median_seconds, precision)},"
                f"{fmt(r.q25, precision)},{fmt(r.q75, precision)}\n"
            )


def write_models(path: str, models: Sequence[PenaltyModel], precision: int = 17) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for i, model in enumerate(models):
            if i:
                handle.write("\n")
            handle.write(f"method={model.method}\n")
            handle.write(f"w={fmt(model.w, precision)}\n")
            handle.write(f"b={fmt(model.b, precision)}\n")


def read_models(path: str) -> list[PenaltyModel]:
    models: list[PenaltyModel] = []
    current: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        lines = [*handle, ""]
    for line_no, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            if current:
                try:
                    models.append(
                        PenaltyModel(
                            current["method"],
                            float(current.get("w", 0.0)),
                            float(current.get("b", 0.0)),
                        )
                    )
                except (KeyError, ValueError):
                    _fail(path, line_no, f"incomplete model block {current!r}")
                current = {}
            continue
        if "=" not in text:
            _fail(path, line_no, f"expected key=value, got {text!r}")
        key, _, value = text.partition("=")
        current[key.strip()] = value.strip()
    return models


def load_corpus(directory: str) -> list[CorpusSequence]:
    """Read all ``<id>.data.csv`` / ``<id>.labels.csv`` pairs, sorted by id."""
    try:
        names = sorted(os.listdir(directory))
    except OSError as exc:
        raise FormatError(f"{directory}: cannot list corpus directory: {exc}") from exc
    corpus: list[CorpusSequence] = []
    for name in names:
        if not name.endswith(".data.csv"):
            continue
        sid = name[: -len(".data.csv")]
        data_path = os.path.join(directory, name)
        labels_path = os.path.join(directory, f"{sid}.labels.csv")
        if not os.path.exists(labels_path):
            raise FormatError(f"{labels_path}: missing labels file for {sid!r}")
        seq = read_data(data_path)
        labels = read_labels(labels_path, seq.n)
        corpus.append(CorpusSequence(sid, seq, labels))
    if not corpus:
        raise FormatError(f"{directory}: no '<id>.data.csv' files found")
    return corpus


def write_corpus(directory: str, corpus: Sequence[CorpusSequence]) -> None:
    os.makedirs(directory, exist_ok=True)
    for item in corpus:
        write_data(os.path.join(directory, f"{item.sequence_id}.data.csv"), item.data)
        write_labels(
            os.path.join(directory, f"{item.sequence_id}.labels.csv"), item.labels
        )
