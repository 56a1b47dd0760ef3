"""Batch pipeline: describe -> correlate -> select -> standardize ->
elbow -> cluster -> order -> evaluate, with all artifacts written to an
output directory."""

from __future__ import annotations

import csv
import datetime
import json
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .clustering import KMeansConfig, elbow_scan, kmeans_fit, order_clusters
from .charts import emit_boxplot_svg, emit_elbow_svg, emit_scatter_svg
from .dataset import HerdTable, canonical_key, describe_all, load_table
from .errors import DegenerateInputError, ValidationError
from .inference import one_way_anova, tukey_hsd
from .stats import correlation_matrix, label_correlation, select_features, zscore

#: The two measurement-selection configurations used for the published
#: analysis: dorsum-view features against body weight, and the
#: structure-score set. Both exclude productivity metrics and the raw
#: grader columns from the candidate pool.
PRESETS = {
    "dorsum": {
        "target": "BW",
        "exclude": ("BW", "FW", "DMI", "RFI", "ADG", "SC", "LEA",
                    "S1", "S2", "S3", "SS"),
    },
    "structure": {
        "target": "SS",
        "exclude": ("SS", "S1", "S2", "S3", "FW", "DMI", "RFI", "ADG",
                    "SC", "LEA"),
    },
}


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str
    target: str
    feature_count: int = 3
    exclude: tuple[str, ...] = ()
    k: int | None = None
    k_range: tuple[int, int] = (1, 10)
    seed: int = 0
    alpha: float = 0.05
    n_restarts: int = 10
    output_dir: str = "out"
    emit_charts: bool = False

    def as_dict(self) -> dict:
        return {
            "input_path": str(self.input_path),
            "target": self.target,
            "feature_count": self.feature_count,
            "exclude": sorted(self.exclude),
            "k": self.k,
            "k_range": list(self.k_range),
            "seed": self.seed,
            "alpha": self.alpha,
            "n_restarts": self.n_restarts,
            "output_dir": str(self.output_dir),
            "emit_charts": self.emit_charts,
        }

    @classmethod
    def from_preset(cls, name: str, input_path, **overrides) -> "PipelineConfig":
        try:
            preset = PRESETS[name]
        except KeyError:
            raise ValidationError(
                f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
            ) from None
        merged = {"target": preset["target"], "exclude": tuple(preset["exclude"])}
        merged.update(overrides)
        return cls(input_path=input_path, **merged)


@dataclass(frozen=True)
class RunReport:
    """Self-contained pipeline result; numerically reproducible from the
    echoed config and seed (only the timestamp varies between runs)."""

    document: dict
    artifacts: tuple[str, ...]

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.document, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _correlation_keys(table: HerdTable) -> list[str]:
    """Columns usable in the correlation matrix (non-constant)."""
    return [k for k in table.keys if table.column(k).std() > 0.0]


def _write_labels_csv(path, table: HerdTable, labels) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["animal_id", "cluster"])
        for animal, label in zip(table.animal_ids, labels):
            writer.writerow([animal, int(label)])


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    """Execute the full analysis chain and write report.json, labels.csv,
    centroids.csv (and charts when requested) under cfg.output_dir."""
    table = load_table(cfg.input_path)
    target = canonical_key(cfg.target)
    if target not in table.columns:
        raise ValidationError(f"target column {target} not in input")

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    stats_block = [d.as_dict() for d in describe_all(table)]
    corr_keys = _correlation_keys(table)
    corr = correlation_matrix(table, corr_keys)
    selection = select_features(corr, target, cfg.feature_count, cfg.exclude)
    z = zscore(table, selection.selected)

    n = table.n_animals
    lo, hi = cfg.k_range
    hi = min(hi, n)
    kcfg = KMeansConfig(k=max(lo, 1), seed=cfg.seed, n_restarts=cfg.n_restarts)
    elbow = elbow_scan(z, (lo, hi), kcfg)

    if cfg.k is not None:
        k = cfg.k
        if not 1 <= k <= n:
            raise ValidationError(f"k override {k} outside [1, {n}]")
    elif elbow.knee is not None:
        k = elbow.knee
    else:
        raise ValidationError(
            "no knee detected in the distortion curve; pass an explicit k"
        )

    model = order_clusters(kmeans_fit(z, replace(kcfg, k=k)))

    label_corr = {}
    if model.k > 1:
        for key in corr_keys:
            try:
                label_corr[key] = label_correlation(model.labels, table, key)
            except DegenerateInputError:
                continue

    evaluation = {}
    if model.k >= 2:
        anova = one_way_anova(table.column(target), model.labels)
        evaluation[target] = {"anova": anova.as_dict()}
        if not anova.degenerate:
            evaluation[target]["tukey"] = tukey_hsd(
                table.column(target), model.labels, cfg.alpha
            ).as_dict()

    artifacts = []

    def _artifact(name: str) -> Path:
        artifacts.append(name)
        return out / name

    model.centroids_to_csv(_artifact("centroids.csv"))
    _write_labels_csv(_artifact("labels.csv"), table, model.labels)
    model.to_json(_artifact("model.json"))
    corr.to_csv(_artifact("correlation.csv"))

    if cfg.emit_charts:
        emit_elbow_svg(elbow, _artifact("elbow.svg"))
        emit_scatter_svg(model, z, _artifact("scatter.svg"))
        emit_boxplot_svg(
            table.column(target), model.labels, target, _artifact("boxplot.svg")
        )

    document = {
        "tool_version": __version__,
        "config": cfg.as_dict(),
        "descriptive_stats": stats_block,
        "correlation": corr.as_dict(),
        "selection": selection.as_dict(),
        "elbow": elbow.as_dict(),
        "k": k,
        "model": model.as_dict(),
        "label_correlation": label_corr,
        "evaluation": evaluation,
        "artifacts": sorted(artifacts) + ["report.json"],
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    report = RunReport(document=document, artifacts=tuple(sorted(artifacts)))
    report.to_json(out / "report.json")
    return report
