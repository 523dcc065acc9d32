"""Dataset catalogs (manifests) and per-frame score tables.

A manifest is a JSON document ``{"metadata": {...}, "records": [...]}``
where each record has ``path``, ``label`` ("real"/"fake"), ``video_id``,
``frame_idx``, ``source_tag`` and an optional ``seed``. Record paths are
stored relative to the manifest file when possible so artifact trees can
be compared byte-for-byte across output directories.

A score table is a CSV with header ``video_id,frame_idx,score`` keyed by
(video_id, frame_idx).
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InvalidParameterError, ManifestIntegrityError

__all__ = ["Label", "SampleRecord", "Manifest", "ScoreTable"]


class Label(str, Enum):
    REAL = "real"
    FAKE = "fake"

    @classmethod
    def parse(cls, value) -> "Label":
        if isinstance(value, Label):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ManifestIntegrityError(f"unknown label {value!r}") from None


@dataclass(frozen=True)
class SampleRecord:
    path: str
    label: Label
    video_id: str
    frame_idx: int
    source_tag: str = ""
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "label", Label.parse(self.label))
        if self.frame_idx < 0:
            raise ManifestIntegrityError(
                f"frame_idx must be >= 0, got {self.frame_idx}"
            )

    @property
    def key(self) -> tuple[str, int]:
        return (self.video_id, self.frame_idx)

    def to_dict(self) -> dict:
        doc = {
            "path": self.path,
            "label": self.label.value,
            "video_id": self.video_id,
            "frame_idx": self.frame_idx,
            "source_tag": self.source_tag,
        }
        if self.seed is not None:
            doc["seed"] = self.seed
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "SampleRecord":
        try:
            return cls(
                path=doc["path"],
                label=Label.parse(doc["label"]),
                video_id=doc["video_id"],
                frame_idx=int(doc["frame_idx"]),
                source_tag=doc.get("source_tag", ""),
                seed=doc.get("seed"),
            )
        except KeyError as exc:
            raise ManifestIntegrityError(f"record missing field {exc}") from None


@dataclass(frozen=True)
class Manifest:
    """An ordered collection of sample records plus generator metadata.

    (video_id, frame_idx) keys must be unique. Emptiness and existence of
    the referenced files are checked by :meth:`validate`, not at
    construction, so intermediate (e.g. not-yet-mixed) manifests may be
    empty.
    """

    records: tuple[SampleRecord, ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        seen: set[tuple[str, int]] = set()
        for rec in records:
            if rec.key in seen:
                raise ManifestIntegrityError(
                    f"duplicate (video_id, frame_idx) key {rec.key}"
                )
            seen.add(rec.key)

    def __len__(self) -> int:
        return len(self.records)

    def count(self, label: Label) -> int:
        return sum(1 for r in self.records if r.label is label)

    def video_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for rec in self.records:
            seen.setdefault(rec.video_id, None)
        return list(seen)

    def validate(self, check_files: bool = True) -> None:
        """Enforce the full catalog invariants: nonempty, files present."""
        if not self.records:
            raise ManifestIntegrityError("manifest has no records")
        if check_files:
            missing = [r.path for r in self.records if not os.path.exists(r.path)]
            if missing:
                raise ManifestIntegrityError(
                    f"{len(missing)} referenced files missing, first: {missing[0]}"
                )

    def to_json(self) -> str:
        doc = {
            "metadata": self.metadata,
            "records": [r.to_dict() for r in self.records],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def save(self, path: str | Path) -> None:
        """Write JSON with record paths relative to the manifest directory
        where possible (keeps artifact trees relocatable and comparable)."""
        path = Path(path)
        base = path.resolve().parent
        records = []
        for rec in self.records:
            p = Path(rec.path)
            if p.is_absolute():
                try:
                    rel = p.resolve().relative_to(base)
                    rec = replace(rec, path=rel.as_posix())
                except ValueError:
                    pass
            records.append(rec)
        manifest = Manifest(tuple(records), self.metadata)
        path.write_text(manifest.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, resolve_paths: bool = True) -> "Manifest":
        path = Path(path)
        doc = json.loads(path.read_text(encoding="utf-8"))
        if "records" not in doc:
            raise ManifestIntegrityError(f"{path}: missing 'records'")
        records = []
        base = path.resolve().parent
        for entry in doc["records"]:
            rec = SampleRecord.from_dict(entry)
            if resolve_paths and not Path(rec.path).is_absolute():
                rec = replace(rec, path=str(base / rec.path))
            records.append(rec)
        return cls(tuple(records), dict(doc.get("metadata", {})))


class ScoreTable:
    """Finite per-frame scores keyed by (video_id, frame_idx)."""

    __slots__ = ("entries",)

    def __init__(self, entries: Mapping[tuple[str, int], float] | Iterable = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        table: dict[tuple[str, int], float] = {}
        for (video_id, frame_idx), value in items:
            value = float(value)
            if not math.isfinite(value):
                raise InvalidParameterError(
                    f"score for ({video_id}, {frame_idx}) is not finite"
                )
            table[(str(video_id), int(frame_idx))] = value
        self.entries = table

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, key: tuple[str, int]) -> float:
        return self.entries[key]

    def keys(self):
        return self.entries.keys()

    def items(self):
        return self.entries.items()

    def save_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["video_id", "frame_idx", "score"])
            for (video_id, frame_idx), value in sorted(self.entries.items()):
                writer.writerow([video_id, frame_idx, repr(value)])

    @classmethod
    def load_csv(cls, path: str | Path) -> "ScoreTable":
        entries = {}
        with open(path, "r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["video_id", "frame_idx", "score"]:
                raise InvalidParameterError(
                    f"{path}: expected header video_id,frame_idx,score"
                )
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 3:
                    raise InvalidParameterError(f"{path}:{lineno}: malformed row {row}")
                entries[(row[0], int(row[1]))] = float(row[2])
        return cls(entries)
