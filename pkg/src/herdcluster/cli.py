"""Command-line front end.

Subcommands: describe, correlate, cluster, evaluate, pipeline.
Exit codes: 0 success, 2 validation error, 3 numerical failure.

`--input` accepts a CSV path or one of the bundled datasets:
`builtin:scores` (the grader-score table) and `builtin:synthetic`
(the moment-matched synthetic measurement table).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, data
from .clustering import KMeansConfig, elbow_scan, kmeans_fit, order_clusters
from .dataset import describe_all, load_table
from .errors import NumericalError, ValidationError
from .inference import one_way_anova, tukey_hsd
from .pipeline import PRESETS, PipelineConfig, run_pipeline
from .stats import correlation_matrix, select_features, zscore

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _resolve_input(raw: str) -> Path:
    if raw == "builtin:scores":
        return data.scores_path()
    if raw == "builtin:synthetic":
        return data.synthetic_path()
    path = Path(raw)
    if not path.exists():
        raise ValidationError(f"input file not found: {raw}")
    return path


def _split_keys(raw: str | None) -> tuple[str, ...]:
    if not raw:
        return ()
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def _parse_k_range(raw: str) -> tuple[int, int]:
    try:
        lo, hi = (int(part) for part in raw.split(":"))
    except ValueError:
        raise ValidationError(
            f"--k-range must look like LO:HI, got {raw!r}"
        ) from None
    return lo, hi


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_describe(args) -> int:
    table = load_table(_resolve_input(args.input))
    rows = [d.as_dict() for d in describe_all(table)]
    if args.format == "json":
        _write_or_print(json.dumps(rows, indent=2, sort_keys=True) + "\n", args.out)
    else:
        import io

        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
        _write_or_print(buf.getvalue(), args.out)
    return 0


def cmd_correlate(args) -> int:
    table = load_table(_resolve_input(args.input))
    keys = [k for k in table.keys if table.column(k).std() > 0.0]
    corr = correlation_matrix(table, keys)
    if args.out:
        if args.format == "json":
            corr.to_json(args.out)
        else:
            corr.to_csv(args.out)
    else:
        if args.format == "json":
            sys.stdout.write(json.dumps(corr.as_dict(), indent=2, sort_keys=True) + "\n")
        else:
            writer = csv.writer(sys.stdout)
            writer.writerow(["key", *corr.keys])
            for i, key in enumerate(corr.keys):
                writer.writerow([key, *(f"{v:.4f}" for v in corr.r[i])])
    return 0


def cmd_cluster(args) -> int:
    table = load_table(_resolve_input(args.input))
    keys = [k for k in table.keys if table.column(k).std() > 0.0]
    corr = correlation_matrix(table, keys)
    selection = select_features(
        corr, args.target, args.features, _split_keys(args.exclude) + (args.target,)
    )
    z = zscore(table, selection.selected)
    cfg = KMeansConfig(k=args.k or 1, seed=args.seed)
    if args.k is None:
        lo, hi = _parse_k_range(args.k_range)
        elbow = elbow_scan(z, (lo, min(hi, table.n_animals)), cfg)
        if elbow.knee is None:
            raise ValidationError(
                "no knee detected in the distortion curve; pass --k"
            )
        cfg = replace(cfg, k=elbow.knee)
    model = order_clusters(kmeans_fit(z, cfg))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model.centroids_to_csv(out / "centroids.csv")
    model.to_json(out / "model.json")
    with open(out / "labels.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["animal_id", "cluster"])
        for animal, label in zip(table.animal_ids, model.labels):
            writer.writerow([animal, int(label)])
    print(f"k={model.k} inertia={model.inertia:.6f} features={','.join(selection.selected)}")
    return 0


def cmd_evaluate(args) -> int:
    table = load_table(_resolve_input(args.input))
    labels_path = Path(args.labels)
    if not labels_path.exists():
        raise ValidationError(f"labels file not found: {args.labels}")
    with open(labels_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "animal_id" not in reader.fieldnames \
                or "cluster" not in reader.fieldnames:
            raise ValidationError("labels CSV needs animal_id,cluster columns")
        by_animal = {row["animal_id"]: int(row["cluster"]) for row in reader}
    try:
        labels = np.array([by_animal[a] for a in table.animal_ids])
    except KeyError as exc:
        raise ValidationError(f"labels missing animal {exc.args[0]}") from None

    values = table.column(args.target)
    anova = one_way_anova(values, labels)
    doc = {"anova": anova.as_dict()}
    print(
        f"ANOVA {args.target}: F({anova.df_between},{anova.df_within})"
        f"={anova.f_stat:.4f} p={anova.p_value:.6f}"
        + (" [degenerate]" if anova.degenerate else "")
    )
    if not anova.degenerate:
        tukey = tukey_hsd(values, labels, args.alpha)
        doc["tukey"] = tukey.as_dict()
        print(tukey.to_text())
    if args.out:
        Path(args.out).write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def cmd_pipeline(args) -> int:
    overrides = dict(
        feature_count=args.features,
        k=args.k,
        k_range=_parse_k_range(args.k_range),
        seed=args.seed,
        alpha=args.alpha,
        output_dir=args.out,
        emit_charts=args.charts,
    )
    input_path = _resolve_input(args.input)
    if args.preset:
        if args.target or args.exclude:
            raise ValidationError("--preset replaces --target/--exclude")
        cfg = PipelineConfig.from_preset(args.preset, str(input_path), **overrides)
    else:
        if not args.target:
            raise ValidationError("either --preset or --target is required")
        cfg = PipelineConfig(
            input_path=str(input_path),
            target=args.target,
            exclude=_split_keys(args.exclude) + (args.target,),
            **overrides,
        )
    report = run_pipeline(cfg)
    doc = report.document
    print(
        f"k={doc['k']} features={','.join(doc['selection']['selected'])} "
        f"report={Path(cfg.output_dir) / 'report.json'}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="herdcluster",
        description="Clustering and statistical analysis of herd measurement tables.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("--input", required=True,
                       help="CSV path, builtin:scores or builtin:synthetic")

    p = sub.add_parser("describe", help="descriptive statistics per column")
    add_input(p)
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("correlate", help="Pearson correlation matrix")
    add_input(p)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("cluster", help="feature selection + k-means")
    add_input(p)
    p.add_argument("--target", required=True)
    p.add_argument("--features", type=int, default=3)
    p.add_argument("--exclude", help="comma-separated keys to exclude")
    p.add_argument("--k", type=int)
    p.add_argument("--k-range", default="1:10")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="ANOVA + Tukey HSD for given labels")
    add_input(p)
    p.add_argument("--labels", required=True, help="labels.csv from cluster/pipeline")
    p.add_argument("--target", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="also write JSON results here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="full analysis chain")
    add_input(p)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--target")
    p.add_argument("--features", type=int, default=3)
    p.add_argument("--exclude", help="comma-separated keys to exclude")
    p.add_argument("--k", type=int, help="override the elbow-detected k")
    p.add_argument("--k-range", default="1:10")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", default="out")
    p.add_argument("--charts", action="store_true", help="emit SVG charts")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
