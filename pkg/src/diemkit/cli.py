"""Command-line surface.

Subcommands: calibrate, compare, sweep, normality, embeddings.  Data goes to
stdout (or --out), diagnostics to stderr.  Exit codes: 0 success, 1 usage,
2 data/validation, 3 internal.  The master seed falls back to the DIEM_SEED
environment variable when --seed is absent.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import embedio, simulation
from .calibration import calibrate, diem_value, load_calibration, save_calibration
from .domain import (
    DEFAULT_DOMAINS,
    DomainSpec,
    SeedSpec,
    SignDomain,
    Uniform,
    UnitSphere,
    default_gaussian,
)
from .errors import DiemKitError
from .metrics import (
    CosineConvention,
    MetricKind,
    cosine_similarity,
    euclidean_distance,
    manhattan_distance,
    normalized_euclidean_distance,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

_METRIC_FLAGS = {
    "cosine": MetricKind.COSINE_UNSIGNED,
    "cosine-signed": MetricKind.COSINE_SIGNED,
    "euclid": MetricKind.EUCLIDEAN,
    "norm-euclid": MetricKind.NORMALIZED_EUCLIDEAN,
    "manhattan": MetricKind.MANHATTAN,
    "diem": MetricKind.DIEM,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for data errors
    def error(self, message):
        raise _UsageError(message)


def _real(x: float) -> str:
    return f"{x:.17g}"


def _resolve_seed(value: int | None) -> SeedSpec:
    if value is not None:
        return SeedSpec(value)
    env = os.environ.get("DIEM_SEED")
    if env is not None:
        try:
            return SeedSpec(int(env))
        except ValueError as exc:
            raise _UsageError(f"DIEM_SEED must be an integer, got {env!r}") from exc
    return SeedSpec(0)


def _resolve_domain(name: str, vmin: float | None, vmax: float | None) -> DomainSpec:
    sign = SignDomain(name)
    base = DEFAULT_DOMAINS[sign]
    if vmin is None and vmax is None:
        return base
    return DomainSpec(base.v_min if vmin is None else vmin,
                      base.v_max if vmax is None else vmax, sign)


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise _UsageError(f"--dims must be a comma-separated integer list, got {text!r}") from exc
    if not dims:
        raise _UsageError("--dims is empty")
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise _UsageError(f"--dims must be strictly increasing, got {text!r}")
    return dims


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _emit(path, text: str) -> None:
    stream, owned = _open_out(path)
    try:
        stream.write(text)
    finally:
        if owned:
            stream.close()


def build_parser() -> _Parser:
    parser = _Parser(prog="diemkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="estimate DIEM constants for one (n, domain)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--vmin", type=float, default=None)
    p.add_argument("--vmax", type=float, default=None)
    p.add_argument("--domain", choices=[d.value for d in SignDomain], default="positive")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", help="metric values for index-aligned vector files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--metric", choices=sorted(_METRIC_FLAGS), default="cosine")
    p.add_argument("--calibration", default=None)
    p.add_argument("--format", choices=[f.value for f in embedio.FileFormat], default=None)

    p = sub.add_parser("sweep", help="dimension sweep of one metric")
    p.add_argument("--metric", choices=sorted(_METRIC_FLAGS), default="cosine")
    p.add_argument("--domain", choices=[d.value for d in SignDomain], default="positive")
    p.add_argument("--vmin", type=float, default=None)
    p.add_argument("--vmax", type=float, default=None)
    p.add_argument("--dist", choices=["uniform", "gaussian", "sphere"], default="uniform")
    p.add_argument("--dims", default=",".join(str(d) for d in simulation.DEFAULT_DIMS))
    p.add_argument("--trials", type=int, default=simulation.DEFAULT_TRIALS_PER_DIM)
    p.add_argument("--calibration-trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("normality", help="KS normality test per dimension")
    p.add_argument("--domain", choices=[d.value for d in SignDomain], default="positive")
    p.add_argument("--vmin", type=float, default=None)
    p.add_argument("--vmax", type=float, default=None)
    p.add_argument("--dims", default="2,3,4,5,6,7,8,9,10,11,12")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("embeddings", help="pairwise or all-pairs comparison report")
    p.add_argument("--input", action="append", required=True,
                   help="vector file; give twice for pairwise mode")
    p.add_argument("--mode", choices=["pairwise", "allpairs"], required=True)
    p.add_argument("--metric", choices=["cosine", "diem"], default="cosine")
    p.add_argument("--calibration", default=None)
    p.add_argument("--zref", default=None, help="mu0,sigma0 for the z-test")
    p.add_argument("--bins", type=int, default=embedio.DEFAULT_BINS)
    p.add_argument("--format", choices=[f.value for f in embedio.FileFormat], default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None)

    return parser


def _cmd_calibrate(args) -> int:
    domain = _resolve_domain(args.domain, args.vmin, args.vmax)
    cal = calibrate(args.n, domain, trials=args.trials, seed=_resolve_seed(args.seed))
    save_calibration(cal, args.out)
    print(f"calibration written to {args.out}", file=sys.stderr)
    return EXIT_OK


def _load_vectors(path, fmt):
    fmt = embedio.FileFormat(fmt) if fmt else None
    return embedio.load_collection(path, format=fmt)


def _cmd_compare(args) -> int:
    left = _load_vectors(args.a, args.format)
    right = _load_vectors(args.b, args.format)
    if len(left) != len(right):
        raise DiemKitError(f"files hold {len(left)} and {len(right)} vectors; counts must match")
    metric = _METRIC_FLAGS[args.metric]
    cal = None
    if metric is MetricKind.DIEM:
        if args.calibration is None:
            raise _UsageError("--metric diem requires --calibration")
        cal = load_calibration(args.calibration)
    lines = []
    for a, b in zip(left.matrix, right.matrix):
        if metric is MetricKind.COSINE_UNSIGNED:
            v = cosine_similarity(a, b, CosineConvention.UNSIGNED)
        elif metric is MetricKind.COSINE_SIGNED:
            v = cosine_similarity(a, b, CosineConvention.SIGNED)
        elif metric is MetricKind.EUCLIDEAN:
            v = euclidean_distance(a, b)
        elif metric is MetricKind.NORMALIZED_EUCLIDEAN:
            v = normalized_euclidean_distance(a, b)
        elif metric is MetricKind.MANHATTAN:
            v = manhattan_distance(a, b)
        else:
            v = diem_value(a, b, cal)
        lines.append(_real(v))
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _sampling_for(dist: str, domain: DomainSpec):
    if dist == "uniform":
        return Uniform()
    if dist == "gaussian":
        return default_gaussian(domain)
    return UnitSphere()


_SWEEP_HEADER = "dim,count,mean,std,median,q1,q3,whisker_low,whisker_high,outlier_count"


def _cmd_sweep(args) -> int:
    domain = _resolve_domain(args.domain, args.vmin, args.vmax)
    config = simulation.SweepConfig(
        metric=_METRIC_FLAGS[args.metric],
        domain=domain,
        sampling=_sampling_for(args.dist, domain),
        dims=_parse_dims(args.dims),
        trials_per_dim=args.trials,
        seed=_resolve_seed(args.seed),
    )
    result = simulation.run_sweep(config, calibration_trials=args.calibration_trials,
                                  max_workers=args.threads)
    rows = [_SWEEP_HEADER]
    for dim in config.dims:
        s = result.per_dim[dim]
        rows.append(",".join([
            str(dim), str(s.count), _real(s.mean), _real(s.std), _real(s.median),
            _real(s.q1), _real(s.q3), _real(s.whisker_low), _real(s.whisker_high),
            str(len(s.outliers)),
        ]))
    _emit(args.out, "\n".join(rows) + "\n")
    return EXIT_OK


def _cmd_normality(args) -> int:
    domain = _resolve_domain(args.domain, args.vmin, args.vmax)
    results = simulation.normality_transition(domain, dims=_parse_dims(args.dims),
                                              trials=args.trials, alpha=args.alpha,
                                              seed=_resolve_seed(args.seed))
    rows = ["dim,ks_stat,p_value,rejected"]
    for dim in sorted(results):
        r = results[dim]
        rows.append(f"{dim},{_real(r.statistic)},{_real(r.p_value)},"
                    f"{'true' if r.rejected else 'false'}")
    _emit(args.out, "\n".join(rows) + "\n")
    return EXIT_OK


def _cmd_embeddings(args) -> int:
    inputs = args.input
    metric = MetricKind.DIEM if args.metric == "diem" else MetricKind.COSINE_UNSIGNED
    cal = None
    if metric is MetricKind.DIEM:
        if args.calibration is None:
            raise _UsageError("--metric diem requires --calibration")
        cal = load_calibration(args.calibration)
    zref = None
    if args.zref is not None:
        parts = args.zref.split(",")
        if len(parts) != 2:
            raise _UsageError(f"--zref must be 'mu0,sigma0', got {args.zref!r}")
        try:
            zref = (float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise _UsageError(f"--zref must be numeric, got {args.zref!r}") from exc

    if args.mode == "pairwise":
        if len(inputs) != 2:
            raise _UsageError("pairwise mode needs exactly two --input files")
        left = _load_vectors(inputs[0], args.format)
        right = _load_vectors(inputs[1], args.format)
        report = embedio.compare_pairwise(left, right, metric, cal=cal, bins=args.bins,
                                          z_reference=zref)
    else:
        if len(inputs) != 1:
            raise _UsageError("allpairs mode needs exactly one --input file")
        collection = _load_vectors(inputs[0], args.format)
        report = embedio.compare_all_pairs(collection, metric, cal=cal,
                                           z_reference=zref, bins=args.bins,
                                           max_workers=args.threads)
    _emit(args.out, embedio.format_report(report))
    return EXIT_OK


_COMMANDS = {
    "calibrate": _cmd_calibrate,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
    "normality": _cmd_normality,
    "embeddings": _cmd_embeddings,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DiemKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # anything unplanned
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
