"""Command-line toolkit: score, synth, bench, eval.

score   ingest a matrix, run one detector, write the ranked score table
synth   generate a labeled synthetic dataset (matrix + labels + spec echo)
bench   run detectors over synthesized or loaded datasets, write PR curves,
        per-seed and aggregated F summaries, and CPU timings
eval    re-evaluate saved rankings: PR against labels and/or top-N overlap

Every artifact embeds the resolved configuration (including the seed) in a
``# config:`` header; re-running the same command reproduces every artifact
byte for byte except the timing files, which record measurements.

Exit codes: 0 success, 2 parameter/usage error, 3 invalid input data,
4 internal contract violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from kns import io as kio
from kns.baselines import run_lof, run_psd, run_rpgs
from kns.datagen import (
    SyntheticSpec,
    generate,
    outlier_ids_from_labels,
    read_labels,
    write_dataset,
)
from kns.detector import DetectorParams, ScoreReport, run_kns
from kns.errors import (
    InternalContractError,
    InvalidDataError,
    KnsError,
    ParameterError,
)
from kns.evaluation import (
    EvalReport,
    benchmark,
    pr_curve,
    precision_recall_at,
    top_n_overlap,
)
from kns.presets import PRESETS, SUITE_PRESET, Preset, get_preset, suite_rows

ALGOS = ("kns", "psd", "lof", "rpgs")

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_INVALID_DATA = 3
EXIT_INTERNAL = 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=Path("kns-out"),
                        help="output directory (default: ./kns-out)")
    parser.add_argument("--threads", type=int, default=None,
                        help="upper bound on internal parallelism; the current "
                             "kernels are single-threaded, so this is recorded "
                             "in the config and otherwise inert")


def _add_detector_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--algo", choices=ALGOS, default="kns")
    parser.add_argument("--preset", choices=sorted(PRESETS),
                        help="named parameter preset; explicit flags override it")
    parser.add_argument("--k", type=int, help="neighbor count for kns")
    parser.add_argument("--scn", type=int, help="sections per dimension")
    parser.add_argument("--alpha", type=int, default=5, help="projection passes")
    parser.add_argument("--dst", type=int, help="psd occupancy gate")
    parser.add_argument("--knn", type=int, help="lof neighbor count")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kns", description="Section-based outlier detection toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="rank the points of one matrix")
    p_score.add_argument("--input", type=Path, required=True)
    p_score.add_argument("--format", choices=kio.FORMATS, default="delimited")
    p_score.add_argument("--top", type=int, default=20,
                         help="rows flagged and echoed to stdout")
    p_score.add_argument("--labels", type=Path,
                         help="labels file; adds precision/recall/F at --top")
    _add_detector_flags(p_score)
    _add_common(p_score)

    p_synth = sub.add_parser("synth", help="generate a labeled synthetic dataset")
    p_synth.add_argument("--preset", choices=sorted(PRESETS),
                         help="dataset shape preset (points and dimensions)")
    p_synth.add_argument("--n", type=int, help="number of points")
    p_synth.add_argument("--dims", type=int, help="number of dimensions")
    p_synth.add_argument("--clusters", type=int, default=5)
    p_synth.add_argument("--outliers", type=int, default=10)
    p_synth.add_argument("--mu-lo", type=float, default=20.0)
    p_synth.add_argument("--mu-hi", type=float, default=80.0)
    p_synth.add_argument("--sigma-lo", type=float, default=10.0)
    p_synth.add_argument("--sigma-hi", type=float, default=20.0)
    p_synth.add_argument("--outlier-lo", type=float, default=20.0)
    p_synth.add_argument("--outlier-hi", type=float, default=100.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--name", default="dataset")
    _add_common(p_synth)

    p_bench = sub.add_parser("bench", help="benchmark detectors on datasets")
    p_bench.add_argument("--preset", choices=sorted(PRESETS) + [SUITE_PRESET],
                         help="dataset preset or the full sweep")
    p_bench.add_argument("--include-xl", action="store_true",
                         help="include the 10000-dimension row in the sweep")
    p_bench.add_argument("--input", type=Path, help="benchmark a saved matrix")
    p_bench.add_argument("--labels", type=Path, help="labels for --input")
    p_bench.add_argument("--algos", default="kns,psd,lof",
                         help="comma-separated subset of kns,psd,lof,rpgs")
    p_bench.add_argument("--seeds", default="1,2,3,4,5",
                         help="comma-separated seeds, one benchmark run each")
    p_bench.add_argument("--alpha", type=int, default=5)
    p_bench.add_argument("--k", type=int)
    p_bench.add_argument("--scn", type=int)
    p_bench.add_argument("--dst", type=int)
    p_bench.add_argument("--knn", type=int)
    _add_common(p_bench)

    p_eval = sub.add_parser("eval", help="evaluate saved rankings")
    p_eval.add_argument("--rankings", type=Path, nargs="+", required=True)
    p_eval.add_argument("--labels", type=Path)
    p_eval.add_argument("--top", type=int, default=20)
    _add_common(p_eval)
    return parser


# --------------------------------------------------------------------------
# parameter resolution


def _resolve_detector(args, n_dims: int | None = None) -> tuple[DetectorParams, int]:
    """Fold preset and explicit flags into detector params and a LOF knn."""
    preset: Preset | None = get_preset(args.preset) if args.preset else None
    algo = args.algo
    if preset is not None:
        k = args.k if args.k is not None else preset.kns_k
        scn = args.scn if args.scn is not None else (
            preset.psd_scn if algo == "psd" else preset.kns_scn
        )
        dst = args.dst if args.dst is not None else preset.psd_dst
        knn = args.knn if args.knn is not None else preset.lof_knn
    else:
        k = args.k if args.k is not None else 5
        scn = args.scn if args.scn is not None else 25
        dst = args.dst
        knn = args.knn if args.knn is not None else 10
    params = DetectorParams(k=k, scn=scn, alpha=args.alpha, seed=args.seed, dst=dst)
    return params, knn


def _score_with(algo: str, data: np.ndarray, params: DetectorParams, knn: int) -> ScoreReport:
    if algo == "kns":
        return run_kns(data, params)
    if algo == "psd":
        return run_psd(data, params)
    if algo == "lof":
        return run_lof(data, knn)
    if algo == "rpgs":
        return run_rpgs(data, params.scn)
    raise ParameterError(f"unknown algorithm {algo!r}")


def _parse_seeds(raw: str) -> list[int]:
    seeds = [int(s) for s in raw.split(",") if s.strip() != ""]
    if not seeds:
        raise ParameterError("at least one seed is required")
    return seeds


def _parse_algos(raw: str) -> list[str]:
    algos = [a.strip() for a in raw.split(",") if a.strip()]
    for a in algos:
        if a not in ALGOS:
            raise ParameterError(f"unknown algorithm {a!r}; choose from {ALGOS}")
    if not algos:
        raise ParameterError("at least one algorithm is required")
    return algos


# --------------------------------------------------------------------------
# commands


def cmd_score(args) -> int:
    data = kio.ingest_matrix(args.input, args.format)
    params, knn = _resolve_detector(args)
    config = {
        "command": "score",
        "input": str(args.input),
        "format": args.format,
        "algo": args.algo,
        "top": args.top,
        "threads": args.threads,
        "knn": knn,
        **asdict(params),
    }
    print(json.dumps(config, sort_keys=True))
    report = _score_with(args.algo, data, params, knn)
    top = min(args.top, report.n)
    out = kio.write_scores(args.out / f"scores_{args.algo}.csv", report, top, config)
    print(f"wrote {out}")
    print("rank,point_id,si")
    for rank, pid in enumerate(report.top_ids(top).tolist(), start=1):
        print(f"{rank},{pid},{kio.fmt(report.si[pid - 1])}")
    if args.labels:
        truth = outlier_ids_from_labels(read_labels(args.labels))
        if truth.size == 0:
            raise InvalidDataError(f"{args.labels}: no outlier labels")
        p, r, f = precision_recall_at(report, truth, top)
        print(f"precision@{top}={kio.fmt(p)} recall@{top}={kio.fmt(r)} f@{top}={kio.fmt(f)}")
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.preset:
        preset = get_preset(args.preset)
        n, dims = preset.n_points, preset.n_dims
    elif args.n is not None and args.dims is not None:
        n, dims = args.n, args.dims
    else:
        raise ParameterError("synth needs --preset or both --n and --dims")
    spec = SyntheticSpec(
        n_points=n,
        n_dims=dims,
        n_clusters=args.clusters,
        n_outliers=args.outliers,
        mu_range=(args.mu_lo, args.mu_hi),
        sigma_range=(args.sigma_lo, args.sigma_hi),
        outlier_range=(args.outlier_lo, args.outlier_hi),
        seed=args.seed,
    )
    dataset = generate(spec)
    paths = write_dataset(dataset, args.out, args.name)
    print(json.dumps(asdict(spec), sort_keys=True))
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def _bench_scorers(preset: Preset | None, algos: list[str], seed: int, args) -> dict:
    if preset is not None:
        kns_params = preset.kns_params(seed, alpha=args.alpha)
        psd_params = preset.psd_params(seed, alpha=args.alpha)
        knn = preset.lof_knn
        rpgs_scn = preset.kns_scn
    else:
        base, knn = _resolve_detector(
            argparse.Namespace(
                preset=None, algo="kns", k=args.k, scn=args.scn,
                dst=args.dst, knn=args.knn, alpha=args.alpha, seed=seed,
            )
        )
        kns_params = base
        psd_params = DetectorParams(
            k=base.k, scn=base.scn, alpha=base.alpha, seed=seed, dst=args.dst
        )
        rpgs_scn = base.scn
    if args.k is not None:
        kns_params = DetectorParams(**{**asdict(kns_params), "k": args.k})
        psd_params = DetectorParams(**{**asdict(psd_params), "k": args.k})
    if args.scn is not None:
        kns_params = DetectorParams(**{**asdict(kns_params), "scn": args.scn})
    if args.dst is not None:
        psd_params = DetectorParams(**{**asdict(psd_params), "dst": args.dst})
    if args.knn is not None:
        knn = args.knn

    scorers = {}
    for algo in algos:
        if algo == "kns":
            scorers[algo] = lambda X, p=kns_params: run_kns(X, p)
        elif algo == "psd":
            scorers[algo] = lambda X, p=psd_params: run_psd(X, p)
        elif algo == "lof":
            scorers[algo] = lambda X, kn=knn: run_lof(X, kn)
        elif algo == "rpgs":
            scorers[algo] = lambda X, s=rpgs_scn: run_rpgs(X, s)
    meta = {
        "kns": asdict(kns_params),
        "psd": asdict(psd_params),
        "lof": {"knn": knn},
        "rpgs": {"scn": rpgs_scn},
    }
    return {"scorers": scorers, "meta": {a: meta[a] for a in algos}}


def cmd_bench(args) -> int:
    seeds = _parse_seeds(args.seeds)
    algos = _parse_algos(args.algos)
    outdir: Path = args.out
    outdir.mkdir(parents=True, exist_ok=True)

    if args.input is not None:
        if args.labels is None:
            raise ParameterError("bench --input requires --labels")
        jobs = [("custom", None)]
    elif args.preset == SUITE_PRESET:
        jobs = [(p.name, p) for p in suite_rows(include_xl=args.include_xl)]
    elif args.preset:
        jobs = [(args.preset, get_preset(args.preset))]
    else:
        raise ParameterError("bench needs --preset or --input with --labels")

    config = {
        "command": "bench",
        "datasets": [name for name, _ in jobs],
        "algos": algos,
        "seeds": seeds,
        "alpha": args.alpha,
        "threads": args.threads,
        "input": str(args.input) if args.input else None,
    }
    (outdir / "resolved_config.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n"
    )
    print(json.dumps(config, sort_keys=True))

    f_rows: list[tuple] = []
    timing_rows: list[tuple] = []
    reports: list[tuple[str, int, EvalReport]] = []
    for name, preset in jobs:
        for seed in seeds:
            if preset is None:
                data = kio.ingest_matrix(args.input)
                labels = read_labels(args.labels)
                if len(labels) != data.shape[0]:
                    raise InvalidDataError("labels length does not match matrix rows")
                from kns.datagen import LabeledDataset  # local import, plain reuse

                dataset = LabeledDataset(
                    data=data,
                    labels=labels,
                    spec=SyntheticSpec(
                        n_points=data.shape[0], n_dims=data.shape[1], seed=seed
                    ),
                    cluster_mus=np.empty((0, data.shape[1])),
                    cluster_sigmas=np.empty((0, data.shape[1])),
                    escaped_fraction=0.0,
                )
                built = _bench_scorers(None, algos, seed, args)
            else:
                dataset = generate(preset.synthetic_spec(seed))
                built = _bench_scorers(preset, algos, seed, args)
            report = benchmark(dataset, built["scorers"])
            reports.append((name, seed, report))
            for algo, result in report.results.items():
                timing_rows.append((name, seed, algo, result.cpu_seconds))
                if result.error is not None:
                    print(f"{name} seed={seed} {algo}: FAILED: {result.error}")
                    continue
                curve = result.curve
                if curve is None:
                    continue
                f_rows.append(
                    (name, dataset.spec.n_points, dataset.spec.n_dims, algo,
                     seed, curve.best_f)
                )
                kio.write_pr_table(
                    outdir / f"pr_{name}_seed{seed}_{algo}.csv",
                    curve.recalls, curve.precisions,
                    {**config, "dataset": name, "seed": seed, "algo": algo,
                     "params": built["meta"][algo], "best_f": curve.best_f,
                     "best_cutoff": curve.best_cutoff},
                )
                print(f"{name} seed={seed} {algo}: best_f={kio.fmt(curve.best_f)}")

    kio.write_delimited(
        outdir / "f_summary.csv",
        ["dataset", "n_points", "n_dims", "algo", "seed", "best_f"],
        f_rows, config,
    )
    agg: dict[tuple[str, str], list[float]] = {}
    dims_of: dict[str, tuple[int, int]] = {}
    for name, n_points, n_dims, algo, _seed, best_f in f_rows:
        agg.setdefault((name, algo), []).append(best_f)
        dims_of[name] = (n_points, n_dims)
    kio.write_delimited(
        outdir / "f_aggregate.csv",
        ["dataset", "n_points", "n_dims", "algo", "mean_f", "min_f", "max_f"],
        [
            (name, dims_of[name][0], dims_of[name][1], algo,
             float(np.mean(fs)), float(np.min(fs)), float(np.max(fs)))
            for (name, algo), fs in sorted(agg.items())
        ],
        config,
    )
    kio.write_delimited(
        outdir / "timings.csv",
        ["dataset", "seed", "algo", "cpu_seconds"],
        timing_rows,
    )
    _write_bench_report(outdir / "report.txt", config, reports)
    print(f"wrote {outdir}/f_summary.csv, f_aggregate.csv, timings.csv, report.txt")
    return EXIT_OK


def _write_bench_report(path: Path, config: dict, reports) -> None:
    lines = ["benchmark report", "=" * 40, json.dumps(config, sort_keys=True), ""]
    for name, seed, report in reports:
        lines.append(f"dataset {name} seed {seed} "
                     f"(n={report.fingerprint['n_points']}, m={report.fingerprint['n_dims']})")
        times = {}
        for algo, result in report.results.items():
            if result.error is not None:
                lines.append(f"  {algo}: FAILED: {result.error}")
                continue
            times[algo] = result.cpu_seconds
            best = result.curve.best_f if result.curve else float("nan")
            final = result.curve.final_precision if result.curve else float("nan")
            lines.append(
                f"  {algo}: best_f={best:.4f} final_precision={final:.4f} "
                f"cpu={result.cpu_seconds:.3f}s"
            )
        if "kns" in times:
            for other in ("psd", "lof"):
                if other in times and times[other] > 0:
                    lines.append(
                        f"  cpu ratio kns/{other} = {times['kns'] / times[other]:.2f}"
                    )
        lines.append("")
    path.write_text("\n".join(lines) + "\n")


def cmd_eval(args) -> int:
    rankings = {}
    for path in args.rankings:
        ranking, config = kio.read_ranking(path)
        name = Path(path).stem
        rankings[name] = (ranking, config)
    if args.labels is None and len(rankings) < 2:
        raise ParameterError("eval needs --labels or at least two rankings")
    outdir: Path = args.out
    outdir.mkdir(parents=True, exist_ok=True)
    config = {
        "command": "eval",
        "rankings": [str(p) for p in args.rankings],
        "top": args.top,
        "labels": str(args.labels) if args.labels else None,
    }
    print(json.dumps(config, sort_keys=True))

    if args.labels is not None:
        truth = outlier_ids_from_labels(read_labels(args.labels))
        if truth.size == 0:
            raise InvalidDataError(f"{args.labels}: no outlier labels")
        for name, (ranking, _) in rankings.items():
            curve = pr_curve(ranking, truth)
            kio.write_pr_table(
                outdir / f"pr_{name}.csv", curve.recalls, curve.precisions,
                {**config, "ranking": name, "best_f": curve.best_f,
                 "best_cutoff": curve.best_cutoff},
            )
            print(f"{name}: best_f={kio.fmt(curve.best_f)} "
                  f"final_precision={kio.fmt(curve.final_precision)}")

    if len(rankings) >= 2:
        reports = {
            name: ScoreReport(
                si=np.zeros(len(ranking)),
                ranking=np.asarray(ranking, dtype=np.int64),
            )
            for name, (ranking, _) in rankings.items()
        }
        overlap = top_n_overlap(reports, args.top)
        rows = [(a, b, count) for (a, b), count in overlap.pairwise.items()]
        kio.write_delimited(
            outdir / f"overlap_top{args.top}.csv",
            ["ranking_a", "ranking_b", "overlap"], rows, config,
        )
        for a, b, count in rows:
            print(f"overlap top-{args.top} {a} ~ {b}: {count}")
        print(f"common to all: {','.join(map(str, overlap.common)) or '(none)'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "score": cmd_score,
        "synth": cmd_synth,
        "bench": cmd_bench,
        "eval": cmd_eval,
    }
    try:
        return handlers[args.command](args)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except InvalidDataError as exc:
        print(f"invalid data: {exc}", file=sys.stderr)
        return EXIT_INVALID_DATA
    except InternalContractError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except KnsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER


if __name__ == "__main__":
    sys.exit(main())
