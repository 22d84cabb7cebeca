"""Corpus loading: documents, the master title list and ground-truth annotations."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .exceptions import ConfigError, DataIntegrityError

logger = logging.getLogger(__name__)

YEAR_MIN = 1200
YEAR_MAX = 2100

_YEAR_TOKEN = re.compile(r"(?<![0-9])[0-9]{4}(?![0-9])")
_WS = re.compile(r"\s+")


def valid_year(year: int | None) -> bool:
    return year is not None and YEAR_MIN <= year <= YEAR_MAX


def last_year(text: str) -> int | None:
    """Last standalone 4-digit number in ``text`` that is a plausible year."""
    for tok in reversed(_YEAR_TOKEN.findall(text)):
        if valid_year(int(tok)):
            return int(tok)
    return None


@dataclass(frozen=True)
class Document:
    doc_id: str
    source_path: str
    title_hint: str
    year: int | None
    body: str


@dataclass(frozen=True)
class MasterEntry:
    node_id: int
    canonical_title: str
    year: int | None
    tokens: frozenset = field(compare=False, repr=False)


class MasterList:
    """Ordered key space of act titles.

    Entry order is file order and is significant: the hybrid matcher scans it
    front to back and breaks ties by position.
    """

    def __init__(self, titles: Iterable[str] = ()):
        entries = []
        seen: dict[str, int] = {}
        for i, raw in enumerate(titles):
            title = canonical_title(raw)
            if title in seen:
                raise DataIntegrityError(f"duplicate master title {title!r} (entries {seen[title]} and {i})")
            seen[title] = i
            entries.append(MasterEntry(i, title, last_year(title), frozenset(title.split())))
        self.entries: tuple[MasterEntry, ...] = tuple(entries)
        self._by_title = seen
        self._index: dict[str, list[int]] | None = None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> MasterEntry:
        return self.entries[i]

    def __repr__(self) -> str:
        return f"MasterList(n={len(self)})"

    @property
    def titles(self) -> list[str]:
        return [e.canonical_title for e in self.entries]

    @property
    def index(self) -> dict[str, list[int]]:
        """token -> ascending list of node ids containing it."""
        if self._index is None:
            idx: dict[str, list[int]] = {}
            for e in self.entries:
                for tok in e.tokens:
                    idx.setdefault(tok, []).append(e.node_id)
            self._index = idx
        return self._index

    def find(self, title: str) -> MasterEntry | None:
        i = self._by_title.get(title)
        return None if i is None else self.entries[i]


def canonical_title(raw: str) -> str:
    return _WS.sub(" ", raw.lower()).strip()


@dataclass(frozen=True)
class AnnotationSet:
    doc_id: str
    true_entities: tuple[tuple[str, str], ...]
    true_relations: tuple[tuple[str, str], ...]
    miss_causes: tuple[tuple[str, str], ...] = ()

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "entities": [{"surface": s, "canonical": c} for s, c in self.true_entities],
            "relations": [{"type": t, "target": c} for t, c in self.true_relations],
            "misses": [{"canonical": c, "cause": k} for c, k in self.miss_causes],
        }


MISS_CAUSES = ("typo", "rule")


def infer_metadata(filename: str) -> tuple[str, int | None]:
    """Title hint and year from a corpus filename.

    >>> infer_metadata("Married_Women_Property_Protection_Act_1860.txt")
    ('married women property protection act 1860', 1860)
    """
    stem = Path(filename).name
    if "." in stem:
        stem = stem.rsplit(".", 1)[0]
    hint = canonical_title(re.sub(r"[_\-]+", " ", stem))
    return hint, last_year(hint)


def _read_text(path: Path) -> str:
    return path.read_bytes().decode("utf-8", errors="replace")


def _read_manifest(path: Path) -> dict[str, tuple[str, int | None]]:
    """Map relative path -> (doc_id, year)."""
    out = {}
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ConfigError(f"{path}:{lineno}: expected doc_id<TAB>path<TAB>year")
        doc_id, rel, year = (p.strip() for p in parts)
        yr = int(year) if year.isdigit() else None
        if yr is not None and not valid_year(yr):
            raise DataIntegrityError(f"{path}:{lineno}: year {yr} out of range")
        out[str(Path(rel))] = (doc_id, yr)
    return out


def load_corpus(directory, manifest=None) -> list[Document]:
    """Load every ``*.txt`` under ``directory`` in lexicographic path order.

    Unreadable or empty files are skipped with a warning. A manifest, when
    given, supplies doc ids and years and restricts loading to listed files.
    """
    root = Path(directory)
    if not root.is_dir():
        raise ConfigError(f"corpus directory not found: {root}")
    meta = _read_manifest(Path(manifest)) if manifest else None
    docs = []
    seen_ids: set[str] = set()
    for path in sorted(root.rglob("*.txt"), key=lambda p: p.relative_to(root).as_posix()):
        rel = path.relative_to(root).as_posix()
        if meta is not None and rel not in meta:
            continue
        try:
            body = _read_text(path)
        except OSError as exc:
            logger.warning("skipping unreadable file %s: %s", path, exc)
            continue
        if not body.strip():
            logger.warning("skipping empty file %s", path)
            continue
        hint, year = infer_metadata(path.name)
        doc_id = rel.rsplit(".", 1)[0]
        if meta is not None:
            doc_id, year = meta[rel]
        if doc_id in seen_ids:
            raise DataIntegrityError(f"duplicate doc_id {doc_id!r}")
        seen_ids.add(doc_id)
        docs.append(Document(doc_id, str(path), hint, year, body))
    return docs


def load_master_list(path) -> MasterList:
    """Read one title per line; blank lines are skipped.

    Duplicate titles are fatal and reported with the 1-based line number.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"master list not found: {path}")
    titles = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        title = canonical_title(line)
        if not title:
            continue
        if title in seen:
            raise DataIntegrityError(
                f"{path}:{lineno}: duplicate master title {title!r} (first seen on line {seen[title]})"
            )
        seen[title] = lineno
        titles.append(title)
    return MasterList(titles)


def _parse_annotation(obj: dict, master: MasterList | None, source: str) -> AnnotationSet:
    try:
        ann = AnnotationSet(
            doc_id=obj["doc_id"],
            true_entities=tuple((e["surface"], canonical_title(e["canonical"])) for e in obj.get("entities", [])),
            true_relations=tuple((r["type"], canonical_title(r["target"])) for r in obj.get("relations", [])),
            miss_causes=tuple((canonical_title(m["canonical"]), m["cause"]) for m in obj.get("misses", [])),
        )
    except (KeyError, TypeError) as exc:
        raise DataIntegrityError(f"{source}: malformed annotation ({exc})") from exc
    for _, cause in ann.miss_causes:
        if cause not in MISS_CAUSES:
            raise DataIntegrityError(f"{source}: unknown miss cause {cause!r}")
    if master is not None:
        titles = [c for _, c in ann.true_entities] + [c for _, c in ann.true_relations] + [c for c, _ in ann.miss_causes]
        for t in titles:
            if master.find(t) is None:
                raise DataIntegrityError(f"{source}: annotation references unknown title {t!r}")
    return ann


def load_annotations(path, master: MasterList | None = None) -> dict[str, AnnotationSet]:
    """Load ``*.json`` annotation files from a directory (or a single file).

    A file may hold one annotation object or a list of them.
    """
    path = Path(path)
    files = sorted(path.glob("*.json")) if path.is_dir() else [path]
    if not path.exists():
        raise ConfigError(f"annotations not found: {path}")
    out: dict[str, AnnotationSet] = {}
    for f in files:
        try:
            data = json.loads(_read_text(f))
        except ValueError as exc:
            raise DataIntegrityError(f"{f}: invalid JSON ({exc})") from exc
        for obj in data if isinstance(data, list) else [data]:
            ann = _parse_annotation(obj, master, str(f))
            if ann.doc_id in out:
                raise DataIntegrityError(f"{f}: duplicate annotation for {ann.doc_id!r}")
            out[ann.doc_id] = ann
    return out
