"""Dataset manifests: which files make up a dataset and how to read them.

A manifest is a JSON object::

    {
      "name": "fintabnet",
      "kind": "fintabnet",            # or "icdar" / "canonical"
      "annotations": ["train.jsonl"], # XML files for icdar
      "words": "words.json",          # optional
      "page_heights": "heights.json", # icdar only: {doc_id: {page: height}}
      "corrections": "overlay.json",  # optional
      "splits": {"competition/*": "test", "practice/*": "val"},
      "default_split": "test"
    }

Relative paths resolve against the manifest's directory.  For icdar the
words file maps document id to ``{page: [words]}``; for fintabnet it maps
table id to ``[words]``.  Split patterns are matched (fnmatch) against the
annotation path as written in the manifest; FinTabNet records carry their
own split, which wins.
"""

from __future__ import annotations

import fnmatch
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import IngestError, ManifestError
from ..model import SPLITS, TableAnnotation
from .canonical import read_canonical
from .corrections import ManualCorrection, load_overlay
from .failures import IngestFailure
from .fintabnet import parse_fintabnet_lines
from .icdar import parse_icdar_xml
from .words import parse_words

log = logging.getLogger(__name__)

KINDS = ("icdar", "fintabnet", "canonical")


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    kind: str
    annotations: tuple[str, ...]
    base_dir: Path = Path(".")
    words: str | None = None
    page_heights: str | None = None
    corrections: str | None = None
    splits: dict[str, str] = field(default_factory=dict)
    default_split: str = "test"

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def split_for(self, annotation: str) -> str:
        for pattern, split in self.splits.items():
            if fnmatch.fnmatch(annotation, pattern):
                return split
        return self.default_split


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from None
    return manifest_from_dict(data, path.parent)


def manifest_from_dict(data: dict[str, Any], base_dir: Path) -> DatasetManifest:
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise ManifestError(f"manifest kind must be one of {KINDS}, got {kind!r}")
    annotations = data.get("annotations")
    if isinstance(annotations, str):
        annotations = [annotations]
    if not annotations or not all(isinstance(a, str) for a in annotations):
        raise ManifestError("manifest needs a non-empty 'annotations' list")
    splits = data.get("splits", {}) or {}
    default_split = data.get("default_split", "test")
    for split in [*splits.values(), default_split]:
        if split not in SPLITS:
            raise ManifestError(f"unknown split {split!r}; expected one of {SPLITS}")
    if kind == "icdar" and not data.get("page_heights"):
        raise ManifestError("icdar manifests need 'page_heights'")
    manifest = DatasetManifest(
        name=str(data.get("name") or kind),
        kind=kind,
        annotations=tuple(annotations),
        base_dir=base_dir,
        words=data.get("words"),
        page_heights=data.get("page_heights"),
        corrections=data.get("corrections"),
        splits=dict(splits),
        default_split=default_split,
    )
    for p in [*manifest.annotations, manifest.words, manifest.page_heights, manifest.corrections]:
        if p is not None and not manifest.resolve(p).exists():
            raise ManifestError(f"manifest path does not exist: {p}")
    return manifest


def _read_json(path: Path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def icdar_document_id(path: str) -> str:
    stem = Path(path).stem
    return stem[: -len("-str")] if stem.endswith("-str") else stem


def load_dataset(
    manifest: DatasetManifest, jobs: int = 1
) -> tuple[list[TableAnnotation], list[IngestFailure]]:
    """Read every annotation file; unreadable records are reported, not fatal."""
    tables: list[TableAnnotation] = []
    failures: list[IngestFailure] = []

    if manifest.kind == "canonical":
        for ann in manifest.annotations:
            tables.extend(read_canonical(manifest.resolve(ann)))
        return tables, failures

    words_data = _read_json(manifest.resolve(manifest.words)) if manifest.words else None

    if manifest.kind == "fintabnet":
        words_by_id = None
        if isinstance(words_data, dict):
            words_by_id = {str(k): parse_words(v) for k, v in words_data.items()}
        lines = []
        for ann in manifest.annotations:
            with open(manifest.resolve(ann), encoding="utf-8") as f:
                lines.extend((ann, i, line) for i, line in enumerate(f))
        tables, failures = parse_fintabnet_lines(lines, words_by_id, jobs=jobs)
        return tables, failures

    heights_data = _read_json(manifest.resolve(manifest.page_heights))
    for ann in manifest.annotations:
        doc_id = icdar_document_id(ann)
        heights = {int(k): float(v) for k, v in heights_data.get(doc_id, {}).items()}
        doc_words = None
        if isinstance(words_data, dict) and doc_id in words_data:
            doc_words = {int(k): parse_words(v) for k, v in words_data[doc_id].items()}
        data = manifest.resolve(ann).read_bytes()
        try:
            parsed = parse_icdar_xml(
                data,
                heights,
                doc_words,
                document_id=doc_id,
                split=manifest.split_for(ann),
                failures=failures,
            )
        except IngestError as exc:
            log.warning("skipping unreadable document %s: %s", ann, exc)
            failures.append(IngestFailure(ann, exc.reason, str(exc)))
            continue
        tables.extend(parsed)
    return tables, failures


def load_corrections(manifest: DatasetManifest) -> list[ManualCorrection]:
    if not manifest.corrections:
        return []
    return load_overlay(manifest.resolve(manifest.corrections))

