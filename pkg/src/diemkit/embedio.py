"""Ingestion of precomputed embedding vectors and batch comparison.

Collections load from CSV rows (``id,v1,...,vn``) or JSON lines
(``{"id": ..., "vec": [...]}``).  Comparison runs either over index-aligned
pairs of two collections or over all unordered pairs of one collection; the
all-pairs path can stream with memory proportional to the histogram, which
is what makes tens of millions of comparisons practical.

Vectors are compared exactly as loaded.  In particular they are NOT
normalized before DIEM; normalizing would reintroduce the concentration
artifacts DIEM exists to avoid.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_positive_int
from .calibration import DiemCalibration, diem_from_distance
from .errors import (
    CalibrationMismatchError,
    ConstraintViolationError,
    DimensionMismatchError,
    DuplicateIdError,
    ParseError,
)
from .metrics import CosineConvention, MetricKind, cosine_rows, euclidean_rows
from .stats import (
    DistributionSummary,
    Histogram,
    TestResult,
    histogram as make_histogram,
    summarize,
    z_from_moments,
)

DEFAULT_BINS = 100
# pairs counted before compare_all_pairs switches to streaming aggregation
MATERIALIZE_LIMIT = 2_000_000


class FileFormat(Enum):
    CSV_ROWS = "csv"
    JSON_LINES = "jsonl"


@dataclass(frozen=True)
class EmbeddingRecord:
    id: str
    vec: np.ndarray


class EmbeddingCollection:
    """Ordered embedding records sharing one dimension."""

    def __init__(self, ids, matrix):
        ids = tuple(str(i) for i in ids)
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ConstraintViolationError("embedding matrix must be 2-dimensional")
        if len(ids) != matrix.shape[0]:
            raise ConstraintViolationError("id count does not match row count")
        if len(set(ids)) != len(ids):
            raise DuplicateIdError("duplicate ids in collection")
        if not np.all(np.isfinite(matrix)):
            raise ConstraintViolationError("embedding matrix contains non-finite values")
        self.ids = ids
        self.matrix = matrix

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    @property
    def records(self) -> tuple[EmbeddingRecord, ...]:
        return tuple(EmbeddingRecord(i, row) for i, row in zip(self.ids, self.matrix))

    def observed_bounds(self) -> tuple[float, float]:
        """Global coordinate (min, max) across the collection."""
        return float(self.matrix.min()), float(self.matrix.max())


def detect_format(path) -> FileFormat:
    text = str(path).lower()
    if text.endswith(".jsonl") or text.endswith(".json"):
        return FileFormat.JSON_LINES
    return FileFormat.CSV_ROWS


def load_collection(path, format: FileFormat | None = None) -> EmbeddingCollection:
    """Load a collection, preserving file order.

    Raises ParseError with the offending line for ragged dimensions,
    duplicate ids, or non-finite coordinates.
    """
    fmt = format if format is not None else detect_format(path)
    ids: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dim: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if fmt is FileFormat.CSV_ROWS:
                parts = line.split(",")
                if len(parts) < 2:
                    raise ParseError("expected 'id,v1,...'", path=path, line=lineno)
                rec_id = parts[0].strip()
                try:
                    vec = np.array([float(p) for p in parts[1:]], dtype=np.float64)
                except ValueError as exc:
                    raise ParseError(f"bad coordinate: {exc}", path=path, line=lineno) from exc
            else:
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"bad JSON: {exc}", path=path, line=lineno) from exc
                if not isinstance(obj, dict) or "id" not in obj or "vec" not in obj:
                    raise ParseError("expected an object with 'id' and 'vec'",
                                     path=path, line=lineno)
                rec_id = str(obj["id"])
                try:
                    vec = np.array([float(v) for v in obj["vec"]], dtype=np.float64)
                except (TypeError, ValueError) as exc:
                    raise ParseError(f"bad coordinate: {exc}", path=path, line=lineno) from exc
            if vec.size == 0:
                raise ParseError("empty vector", path=path, line=lineno)
            if not np.all(np.isfinite(vec)):
                bad = int(np.nonzero(~np.isfinite(vec))[0][0])
                raise ParseError(f"non-finite coordinate at position {bad + 1}",
                                 path=path, line=lineno)
            if dim is None:
                dim = vec.size
            elif vec.size != dim:
                raise DimensionMismatchError(
                    f"line {lineno} of {path}: vector has dimension {vec.size}, expected {dim}"
                )
            if rec_id in seen:
                raise DuplicateIdError(f"duplicate id {rec_id!r}", path=path, line=lineno)
            seen.add(rec_id)
            ids.append(rec_id)
            rows.append(vec)
    if not rows:
        raise ParseError("file contains no records", path=path)
    return EmbeddingCollection(ids, np.vstack(rows))


def save_collection(collection: EmbeddingCollection, path,
                    format: FileFormat | None = None) -> None:
    """Write a collection; coordinates carry 17 significant digits."""
    fmt = format if format is not None else detect_format(path)
    with open(path, "w", encoding="utf-8") as fh:
        for rec_id, row in zip(collection.ids, collection.matrix):
            if fmt is FileFormat.CSV_ROWS:
                fh.write(rec_id + "," + ",".join(f"{v:.17g}" for v in row) + "\n")
            else:
                vec = "[" + ", ".join(f"{v:.17g}" for v in row) + "]"
                fh.write('{"id": ' + json.dumps(rec_id) + ', "vec": ' + vec + "}\n")


class ComparisonMode(Enum):
    PAIRWISE = "pairwise"
    ALL_PAIRS = "allpairs"


@dataclass(frozen=True)
class PairExtreme:
    id_a: str
    id_b: str
    value: float


@dataclass(frozen=True)
class ComparisonReport:
    mode: ComparisonMode
    metric: MetricKind
    count: int
    dimension: int
    histogram: Histogram
    summary: DistributionSummary
    most_similar: PairExtreme
    most_dissimilar: PairExtreme
    z: TestResult | None
    coordinate_min: float
    coordinate_max: float
    streamed: bool


def _metric_range(metric: MetricKind, cal: DiemCalibration | None) -> tuple[float, float]:
    if metric is MetricKind.COSINE_UNSIGNED:
        return 0.0, 1.0
    if metric is MetricKind.DIEM:
        return cal.diem_min, cal.diem_max
    raise ConstraintViolationError(f"comparison supports cosine-unsigned and diem, got {metric}")


def _check_metric_inputs(metric: MetricKind, dimension: int,
                         cal: DiemCalibration | None) -> None:
    metric = MetricKind(metric)
    if metric is MetricKind.DIEM:
        if cal is None:
            raise CalibrationMismatchError("DIEM comparison requires a calibration")
        if cal.n != dimension:
            raise CalibrationMismatchError(
                f"calibration is for n={cal.n}, collection has dimension {dimension}"
            )
    elif metric is not MetricKind.COSINE_UNSIGNED:
        raise ConstraintViolationError(
            f"comparison supports cosine-unsigned and diem, got {metric}"
        )


def _pair_values(metric: MetricKind, A: np.ndarray, B: np.ndarray,
                 cal: DiemCalibration | None) -> np.ndarray:
    if metric is MetricKind.DIEM:
        return diem_from_distance(euclidean_rows(A, B), cal)
    return cosine_rows(A, B, CosineConvention.UNSIGNED)


def _similarity_order(metric: MetricKind) -> bool:
    """True when lower values mean more similar (distance-like)."""
    return metric is MetricKind.DIEM


def compare_pairwise(left: EmbeddingCollection, right: EmbeddingCollection,
                     metric: MetricKind, cal: DiemCalibration | None = None,
                     bins: int = DEFAULT_BINS,
                     z_reference: tuple[float, float] | None = None) -> ComparisonReport:
    """Compare index-aligned pairs of two equally sized collections."""
    metric = MetricKind(metric)
    if len(left) != len(right):
        raise DimensionMismatchError(
            f"pairwise comparison needs equal sizes, got {len(left)} and {len(right)}"
        )
    if left.dimension != right.dimension:
        raise DimensionMismatchError(
            f"collections have dimensions {left.dimension} and {right.dimension}"
        )
    _check_metric_inputs(metric, left.dimension, cal)
    values = _pair_values(metric, left.matrix, right.matrix, cal)
    if not np.all(np.isfinite(values)):
        raise ConstraintViolationError("comparison produced undefined values (zero-norm vector?)")
    lo, hi = _metric_range(metric, cal)
    lower_is_similar = _similarity_order(metric)
    idx_best = int(np.argmin(values) if lower_is_similar else np.argmax(values))
    idx_worst = int(np.argmax(values) if lower_is_similar else np.argmin(values))
    co_min = min(left.matrix.min(), right.matrix.min())
    co_max = max(left.matrix.max(), right.matrix.max())
    z = None
    if z_reference is not None:
        z = z_from_moments(float(values.mean()), values.size,
                           float(z_reference[0]), float(z_reference[1]))
    return ComparisonReport(
        mode=ComparisonMode.PAIRWISE,
        metric=metric,
        count=values.size,
        dimension=left.dimension,
        histogram=make_histogram(values, bins, bounds=(lo, hi)),
        summary=summarize(values),
        most_similar=PairExtreme(left.ids[idx_best], right.ids[idx_best],
                                 float(values[idx_best])),
        most_dissimilar=PairExtreme(left.ids[idx_worst], right.ids[idx_worst],
                                    float(values[idx_worst])),
        z=z,
        coordinate_min=float(co_min),
        coordinate_max=float(co_max),
        streamed=False,
    )


def _summary_from_stream(count, mean, m2, vmin, vmax, hist: Histogram) -> DistributionSummary:
    """Approximate boxplot fields from a streamed histogram.

    Quartiles are interpolated from the cumulative histogram; outliers are
    not recoverable from a stream and come back empty.
    """
    std = math.sqrt(m2 / (count - 1)) if count > 1 else 0.0
    cum = np.concatenate([[0.0], np.cumsum(hist.counts)])
    edges = hist.bin_edges

    def quantile(q: float) -> float:
        target = q * count
        k = int(np.searchsorted(cum, target, side="left"))
        k = max(1, min(k, len(edges) - 1))
        c0, c1 = cum[k - 1], cum[k]
        frac = 0.5 if c1 == c0 else (target - c0) / (c1 - c0)
        val = edges[k - 1] + frac * (edges[k] - edges[k - 1])
        return float(min(max(val, vmin), vmax))

    q1, med, q3 = quantile(0.25), quantile(0.5), quantile(0.75)
    q1, med, q3 = sorted((q1, med, q3))
    iqr = q3 - q1
    lo = float(max(vmin, q1 - 1.5 * iqr))
    hi = float(min(vmax, q3 + 1.5 * iqr))
    return DistributionSummary(
        count=int(count), mean=float(mean), std=float(std), median=med,
        q1=q1, q3=q3, whisker_low=lo, whisker_high=hi, outliers=(),
        min=float(vmin), max=float(vmax),
    )


def compare_all_pairs(collection: EmbeddingCollection, metric: MetricKind,
                      cal: DiemCalibration | None = None,
                      z_reference: tuple[float, float] | None = None,
                      bins: int = DEFAULT_BINS,
                      materialize: bool | None = None,
                      block_rows: int = 64,
                      max_workers: int | None = None) -> ComparisonReport:
    """Compare every unordered pair within one collection.

    When the pair count is small enough (or materialize=True) all values are
    kept and the summary is exact; otherwise aggregation streams over row
    blocks with O(bins) memory.  Histogram counts and extremes are identical
    between the two paths.
    """
    metric = MetricKind(metric)
    m = len(collection)
    if m < 2:
        raise ConstraintViolationError("all-pairs comparison needs at least 2 records")
    _check_metric_inputs(metric, collection.dimension, cal)
    check_positive_int(bins, "bins", minimum=1)
    total_pairs = m * (m - 1) // 2
    if materialize is None:
        materialize = total_pairs <= MATERIALIZE_LIMIT

    lo, hi = _metric_range(metric, cal)
    edges = np.linspace(lo, hi, bins + 1)
    X = collection.matrix
    ids = collection.ids
    lower_is_similar = _similarity_order(metric)

    def block_values(start: int, stop: int):
        """Values for pairs (i, j) with start <= i < stop, j > i, in scan order."""
        rows = []
        for i in range(start, stop):
            tail = X[i + 1:]
            if metric is MetricKind.DIEM:
                v = diem_from_distance(np.linalg.norm(tail - X[i], axis=1), cal)
            else:
                v = cosine_rows(np.broadcast_to(X[i], tail.shape), tail,
                                CosineConvention.UNSIGNED)
            rows.append(v)
        return rows

    starts = list(range(0, m - 1, block_rows))

    def process(start: int):
        stop = min(start + block_rows, m - 1)
        rows = block_values(start, stop)
        flat = np.concatenate(rows)
        if not np.all(np.isfinite(flat)):
            raise ConstraintViolationError(
                "comparison produced undefined values (zero-norm vector?)"
            )
        counts, _ = np.histogram(np.clip(flat, lo, hi), bins=edges)
        # extremes with first-in-scan-order tie-breaking
        best_val, best_pair = None, None
        worst_val, worst_pair = None, None
        for offset, v in enumerate(rows):
            i = start + offset
            k_best = int(np.argmin(v) if lower_is_similar else np.argmax(v))
            k_worst = int(np.argmax(v) if lower_is_similar else np.argmin(v))
            vb, vw = float(v[k_best]), float(v[k_worst])
            if best_val is None or ((vb < best_val) if lower_is_similar else (vb > best_val)):
                best_val, best_pair = vb, (i, i + 1 + k_best)
            if worst_val is None or ((vw > worst_val) if lower_is_similar else (vw < worst_val)):
                worst_val, worst_pair = vw, (i, i + 1 + k_worst)
        return {
            "counts": counts,
            "sum": float(flat.sum()),
            "sumsq": float(np.dot(flat, flat)),
            "count": flat.size,
            "min": float(flat.min()),
            "max": float(flat.max()),
            "best": (best_val, best_pair),
            "worst": (worst_val, worst_pair),
            "values": flat if materialize else None,
        }

    if max_workers is not None and max_workers == 1:
        parts = [process(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            parts = list(pool.map(process, starts))

    # merge in fixed block order so the result never depends on scheduling
    counts = np.zeros(bins, dtype=np.int64)
    total = 0
    total_sum = 0.0
    total_sumsq = 0.0
    vmin, vmax = math.inf, -math.inf
    best_val, best_pair = None, None
    worst_val, worst_pair = None, None
    kept = []
    for part in parts:
        counts += part["counts"]
        total += part["count"]
        total_sum += part["sum"]
        total_sumsq += part["sumsq"]
        vmin = min(vmin, part["min"])
        vmax = max(vmax, part["max"])
        bv, bp = part["best"]
        if best_val is None or ((bv < best_val) if lower_is_similar else (bv > best_val)):
            best_val, best_pair = bv, bp
        wv, wp = part["worst"]
        if worst_val is None or ((wv > worst_val) if lower_is_similar else (wv < worst_val)):
            worst_val, worst_pair = wv, wp
        if materialize:
            kept.append(part["values"])

    widths = np.diff(edges)
    hist = Histogram(bin_edges=edges, counts=counts,
                     normalized_density=counts / (total * widths))
    if materialize:
        values = np.concatenate(kept)
        summary = summarize(values)
        mean = float(values.mean())
    else:
        mean = total_sum / total
        m2 = max(0.0, total_sumsq - total * mean * mean)
        summary = _summary_from_stream(total, mean, m2, vmin, vmax, hist)
    z = None
    if z_reference is not None:
        z = z_from_moments(mean, total, float(z_reference[0]), float(z_reference[1]))
    return ComparisonReport(
        mode=ComparisonMode.ALL_PAIRS,
        metric=metric,
        count=total,
        dimension=collection.dimension,
        histogram=hist,
        summary=summary,
        most_similar=PairExtreme(ids[best_pair[0]], ids[best_pair[1]], best_val),
        most_dissimilar=PairExtreme(ids[worst_pair[0]], ids[worst_pair[1]], worst_val),
        z=z,
        coordinate_min=float(X.min()),
        coordinate_max=float(X.max()),
        streamed=not materialize,
    )


# --- report serialization ----------------------------------------------------

def format_report(report: ComparisonReport) -> str:
    """Flat key-value document with comma-joined histogram arrays."""
    def real(x: float) -> str:
        return f"{x:.17g}"

    s = report.summary
    lines = [
        ("mode", report.mode.value),
        ("metric", report.metric.value),
        ("count", str(report.count)),
        ("dimension", str(report.dimension)),
        ("streamed", "true" if report.streamed else "false"),
        ("coordinate_min", real(report.coordinate_min)),
        ("coordinate_max", real(report.coordinate_max)),
        ("mean", real(s.mean)),
        ("std", real(s.std)),
        ("median", real(s.median)),
        ("q1", real(s.q1)),
        ("q3", real(s.q3)),
        ("whisker_low", real(s.whisker_low)),
        ("whisker_high", real(s.whisker_high)),
        ("min", real(s.min)),
        ("max", real(s.max)),
        ("outlier_count", str(len(s.outliers))),
        ("most_similar_id_a", report.most_similar.id_a),
        ("most_similar_id_b", report.most_similar.id_b),
        ("most_similar_value", real(report.most_similar.value)),
        ("most_dissimilar_id_a", report.most_dissimilar.id_a),
        ("most_dissimilar_id_b", report.most_dissimilar.id_b),
        ("most_dissimilar_value", real(report.most_dissimilar.value)),
        ("histogram_edges", ",".join(real(v) for v in report.histogram.bin_edges)),
        ("histogram_counts", ",".join(str(int(v)) for v in report.histogram.counts)),
        ("histogram_density", ",".join(real(v) for v in report.histogram.normalized_density)),
    ]
    if report.z is not None:
        lines += [
            ("z_statistic", real(report.z.statistic)),
            ("z_p_value", real(report.z.p_value)),
            ("z_reject_at", real(report.z.reject_at)),
            ("z_rejected", "true" if report.z.rejected else "false"),
        ]
    return "".join(f"{k} = {v}\n" for k, v in lines)


def save_report(report: ComparisonReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_report(report))
