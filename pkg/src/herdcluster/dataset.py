"""Animal-measurement tables: ingestion, validation and summary statistics.

A herd table is rectangular (animals x measurement columns). Measurement
keys are canonicalized to uppercase; the grader-score columns S1..S3
always produce a derived SS column (their per-animal mean).
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError

GRADER_KEYS = ("S1", "S2", "S3")
DERIVED_SCORE_KEY = "SS"

#: Measurement identifiers used by the bundled datasets. User-defined
#: uppercase alphanumeric keys are equally valid.
KNOWN_KEYS = frozenset(
    {
        "BW", "CH", "WH", "RH", "SL", "SVH", "SA", "CW", "DL", "DA",
        "FW", "DMI", "RFI", "ADG", "SC", "LEA",
        "S1", "S2", "S3", "SS",
    }
)

_KEY_RE = re.compile(r"^[A-Z0-9_]+$")


def canonical_key(name: str) -> str:
    """Uppercase a column name and reject anything non-alphanumeric."""
    key = name.strip().upper()
    if not _KEY_RE.match(key):
        raise ValidationError(f"invalid measurement key: {name!r}")
    return key


@dataclass(frozen=True)
class HerdTable:
    """Validated rectangular dataset: one row per animal, one numeric
    column per measurement key. Immutable after construction."""

    animal_ids: tuple[str, ...]
    columns: Mapping[str, np.ndarray]
    provenance: Mapping[str, str]  # supplied | averaged-from-replicates | derived

    def __post_init__(self):
        ids = self.animal_ids
        if len(ids) == 0:
            raise ValidationError("table has no animals")
        if len(set(ids)) != len(ids):
            dupes = sorted({a for a in ids if ids.count(a) > 1})
            raise ValidationError(f"duplicate animal_id: {', '.join(dupes)}")
        if not self.columns:
            raise ValidationError("table has no measurement columns")
        cols = {}
        for key, values in self.columns.items():
            arr = np.asarray(values, dtype=float)
            if arr.shape != (len(ids),):
                raise ValidationError(
                    f"column {key} has {arr.size} values for {len(ids)} animals"
                )
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"column {key} contains non-finite values")
            arr.flags.writeable = False
            cols[key] = arr
        object.__setattr__(self, "columns", MappingProxyType(cols))
        prov = dict(self.provenance)
        for key in cols:
            prov.setdefault(key, "supplied")
        object.__setattr__(self, "provenance", MappingProxyType(prov))

    @property
    def n_animals(self) -> int:
        return len(self.animal_ids)

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(self.columns)

    def column(self, key) -> np.ndarray:
        key = canonical_key(key)
        try:
            return self.columns[key]
        except KeyError:
            raise ValidationError(f"unknown measurement key: {key}") from None

    def matrix(self, keys: Sequence[str]) -> np.ndarray:
        """Animals x len(keys) matrix in the given key order."""
        return np.column_stack([self.column(k) for k in keys])


@dataclass(frozen=True)
class ReplicateRow:
    animal_id: str
    key: str
    value: float
    source: str = ""


@dataclass(frozen=True)
class ReplicateTable:
    """Long-format replicate measurements, multiple rows per (animal, key)."""

    rows: tuple[ReplicateRow, ...]

    @classmethod
    def from_csv(cls, path) -> "ReplicateTable":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise ValidationError(f"{path}: empty file")
            expected = ["animal_id", "key", "value", "source"]
            if [h.strip().lower() for h in header] != expected:
                raise ValidationError(
                    f"{path}: replicate CSV header must be {','.join(expected)}"
                )
            rows = []
            for lineno, rec in enumerate(reader, start=2):
                if not rec or all(not c.strip() for c in rec):
                    continue
                if len(rec) != 4:
                    raise ValidationError(f"{path}:{lineno}: expected 4 fields")
                animal, key, raw, source = (c.strip() for c in rec)
                rows.append(
                    ReplicateRow(animal, canonical_key(key),
                                 _parse_cell(raw, path, lineno, key), source)
                )
        return cls(tuple(rows))


@dataclass(frozen=True)
class DescriptiveStats:
    """One row of a descriptive-statistics table."""

    key: str
    mean: float
    std: float
    min: float
    q25: float
    q50: float
    q75: float
    max: float

    def as_dict(self) -> dict:
        return {
            "key": self.key, "mean": self.mean, "std": self.std,
            "min": self.min, "q25": self.q25, "q50": self.q50,
            "q75": self.q75, "max": self.max,
        }


@dataclass(frozen=True)
class ScoreSummary:
    """Per-animal grader scores with their mean and spread."""

    animal_id: str
    scores: tuple[float, ...]
    mean: float
    std: float


def _parse_cell(raw: str, path, lineno: int, colname: str) -> float:
    raw = raw.strip()
    if raw == "":
        raise ValidationError(f"{path}:{lineno}: missing value in column {colname}")
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(
            f"{path}:{lineno}: non-numeric value {raw!r} in column {colname}"
        ) from None
    if not math.isfinite(value):
        raise ValidationError(
            f"{path}:{lineno}: non-finite value in column {colname}"
        )
    return value


def _derive_ss(columns: dict, provenance: dict) -> None:
    """Add SS = mean(S1..S3) when all grader columns are present."""
    if all(k in columns for k in GRADER_KEYS):
        if DERIVED_SCORE_KEY in columns:
            raise ValidationError(
                "SS may not be supplied directly when S1..S3 are present"
            )
        stacked = np.vstack([columns[k] for k in GRADER_KEYS])
        columns[DERIVED_SCORE_KEY] = stacked.mean(axis=0)
        provenance[DERIVED_SCORE_KEY] = "derived"


def load_table(path, schema: Iterable[str] | None = None) -> HerdTable:
    """Read a wide-format CSV (header row, first column = animal id) into a
    validated HerdTable. When `schema` is given, those keys must all be
    present; extra columns are kept as user-defined keys either way."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValidationError(f"{path}: empty file")
        if len(header) < 2:
            raise ValidationError(f"{path}: need an id column plus measurements")
        keys = [canonical_key(name) for name in header[1:]]
        seen = set()
        for key in keys:
            if key in seen:
                raise ValidationError(f"{path}: duplicate column name {key}")
            seen.add(key)

        animal_ids: list[str] = []
        data: list[list[float]] = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise ValidationError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}"
                )
            animal = rec[0].strip()
            if not animal:
                raise ValidationError(f"{path}:{lineno}: empty animal id")
            animal_ids.append(animal)
            data.append(
                [_parse_cell(raw, path, lineno, keys[i])
                 for i, raw in enumerate(rec[1:])]
            )

    if not animal_ids:
        raise ValidationError(f"{path}: no data rows")
    if len(set(animal_ids)) != len(animal_ids):
        dupes = sorted({a for a in animal_ids if animal_ids.count(a) > 1})
        raise ValidationError(f"{path}: duplicate animal_id: {', '.join(dupes)}")

    arr = np.array(data, dtype=float)
    columns = {key: arr[:, i] for i, key in enumerate(keys)}
    provenance = {key: "supplied" for key in keys}
    _derive_ss(columns, provenance)

    if schema is not None:
        wanted = {canonical_key(k) for k in schema}
        missing = sorted(wanted - set(columns))
        if missing:
            raise ValidationError(f"{path}: missing columns: {', '.join(missing)}")

    return HerdTable(tuple(animal_ids), columns, provenance)


def collapse_replicates(reps: ReplicateTable) -> HerdTable:
    """Collapse a long-format replicate table by arithmetic mean per
    (animal, key) group. Every animal must carry the same key set."""
    if not reps.rows:
        raise ValidationError("replicate table is empty")

    groups: dict[str, dict[str, list[float]]] = {}
    for row in reps.rows:
        groups.setdefault(row.animal_id, {}).setdefault(row.key, []).append(row.value)

    animal_ids = list(groups)
    key_sets = {animal: frozenset(cols) for animal, cols in groups.items()}
    reference = key_sets[animal_ids[0]]
    for animal, ks in key_sets.items():
        if ks != reference:
            raise ValidationError(
                f"animal {animal} covers keys {sorted(ks)}, "
                f"expected {sorted(reference)}"
            )

    keys = sorted(reference)
    columns = {
        key: np.array([float(np.mean(groups[a][key])) for a in animal_ids])
        for key in keys
    }
    provenance = {key: "averaged-from-replicates" for key in keys}
    _derive_ss(columns, provenance)
    return HerdTable(tuple(animal_ids), columns, provenance)


def aggregate_scores(table: HerdTable) -> list[ScoreSummary]:
    """Per-animal mean and sample std across the three grader columns."""
    for key in GRADER_KEYS:
        if key not in table.columns:
            raise ValidationError(f"missing grader column {key}")
    stacked = np.vstack([table.columns[k] for k in GRADER_KEYS])  # 3 x n
    means = stacked.mean(axis=0)
    stds = stacked.std(axis=0, ddof=1)
    return [
        ScoreSummary(animal, tuple(stacked[:, i]), float(means[i]), float(stds[i]))
        for i, animal in enumerate(table.animal_ids)
    ]


def describe(table: HerdTable, key) -> DescriptiveStats:
    """Summary statistics for one column: sample std (n-1 denominator),
    quantiles by linear interpolation between closest ranks."""
    x = table.column(key)
    std = 0.0 if x.size == 1 else float(np.std(x, ddof=1))
    q25, q50, q75 = np.quantile(x, [0.25, 0.5, 0.75])  # linear interpolation
    return DescriptiveStats(
        key=canonical_key(key),
        mean=float(np.mean(x)),
        std=std,
        min=float(np.min(x)),
        q25=float(q25),
        q50=float(q50),
        q75=float(q75),
        max=float(np.max(x)),
    )


def describe_all(table: HerdTable) -> list[DescriptiveStats]:
    return [describe(table, key) for key in table.keys]
