"""Deterministic annotated corpus for end-to-end checks.

Twelve documents spread over the five drafting eras, each with exactly
``ENTITIES_PER_DOC`` act mentions. Raw text carries the noise the
canonicalizer is built for: mixed case, punctuation, margin notes, misspelt
keywords and a few OCR-damaged act names. Year typos can be injected at a
given rate; each is recorded in the annotations as a typo miss.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .canonicalize import CanonConfig, canonicalize_string
from .corpus import AnnotationSet, MasterList

ENTITIES_PER_DOC = 25

MASTER_TITLES = sorted("""
adoption act 1955
bankruptcy act 1892
bankruptcy act 1908
companies act 1955
companies act 1993
companies amendment act 1980
contracts enforcement act 1956
copyright act 1994
crimes act 1908
crimes act 1961
customs ordinance 1841
destitute persons ordinance 1846
education act 1877
education act 1989
english laws act 1858
fair trading act 1986
fencing act 1908
harbours act 1878
income tax act 2007
judicature act 1908
justices of the peace act 1882
land act 1924
land act 1948
land transfer act 1885
land transfer act 1952
land transfer amendment act 1963
magistrates courts act 1893
married women property protection act 1860
married womens property act 1884
municipal corporations act 1876
native lands act 1865
police offences act 1884
police offences act 1908
property law act 1952
public reserves ordinance 1842
public works act 1876
public works act 1928
sale of goods act 1908
shipping and seamen act 1877
social security act 1964
social security act 2018
statute of frauds act 1677
summary proceedings act 1957
trade marks act 1953
trade marks act 2002
trade marks amendment act 2005
trade marks amendment act 2011
trustee act 1956
unit titles act 1972
wills act 1837
""".strip().splitlines())

DOCUMENTS = (
    "public reserves ordinance 1842",
    "married women property protection act 1860",
    "land transfer act 1885",
    "police offences act 1908",
    "land act 1924",
    "land act 1948",
    "land transfer act 1952",
    "companies act 1955",
    "companies act 1993",
    "trade marks act 2002",
    "trade marks amendment act 2011",
    "social security act 2018",
)

# OCR damage to act names; each stays within a few edits of its own title only
DAMAGED_NAMES = {
    "married women property protection act 1860": "Married Vomen's Property-Protectio Act 1860",
    "justices of the peace act 1882": "Justiccs of the Peaee Act 1882",
    "municipal corporations act 1876": "Municipal Corporatlons Act 1876",
    "shipping and seamen act 1877": "Shipping and Seamcn Aot 1877",
    "contracts enforcement act 1956": "Contracts Enforcememt Act 1956",
    "summary proceedings act 1957": "Summary Proceedlngs Act 1957",
}

FILLER = (
    "The Governor-General may, by Order in Council, make regulations for all or any of the following purposes.",
    "Nothing in this Aot shall affect any proceedings commenced before the commencement of this Act.",
    "Every person who contravenes this section commits an offence.",
    "This section applies notwithstanding anything to the contrary in any other enactment.",
    "All fees payable under this Act shall be paid into the Public Account.",
)

MARGIN_NOTES = ("Short Title", "Short tit1e", "SHORT  TITLE")

_DIGIT_TYPOS = {"1": "l", "0": "o", "5": "s"}


def _year(title: str) -> int:
    return int(title.rsplit(" ", 1)[1])


def _display(title: str) -> str:
    """Title-case rendering of a canonical title, with "of"/"and" kept lower."""
    words = title.split()
    return " ".join(w if w in ("of", "and", "the") or w.isdigit() else w.capitalize() for w in words)


@dataclass
class _Clause:
    kind: str  # TIT, CIT, AMD, PRP, FRP
    target: str
    template: str  # raw text with {name} for the act name and {year}
    typo: bool = False

    def render(self, damaged: bool) -> tuple[str, str]:
        """Raw clause text and the canonical surface of its act mention."""
        name = DAMAGED_NAMES[self.target] if damaged and self.target in DAMAGED_NAMES else _display(self.target)
        stem, year = name.rsplit(" ", 1)
        if self.typo:
            i = next(i for i, ch in enumerate(year) if ch in _DIGIT_TYPOS)
            year = year[:i] + _DIGIT_TYPOS[year[i]] + year[i + 1 :]
        mention = f"{stem} {year}"
        return self.template.format(name=mention), mention


@dataclass
class GoldenDocument:
    title: str
    body: str
    annotation: AnnotationSet
    clauses: list = field(default_factory=list, repr=False)

    @property
    def filename(self) -> str:
        return "_".join(w.capitalize() for w in self.title.split()) + ".txt"

    @property
    def doc_id(self) -> str:
        return self.filename[:-4]


def _title_clause(title: str) -> _Clause:
    y = _year(title)
    if y < 1850:
        return _Clause("TIT", title, "1. This Ordinance may be cited as the {name}.")
    if y < 1900:
        return _Clause("TIT", title, "1 The Short Title of this Act shall be the “{name}.”")
    if y < 2000:
        return _Clause("TIT", title, "1. Short title\u2014This Act may be cited as the {name}.")
    return _Clause("TIT", title, "1 Title\nThis Act is the {name}.")


def _citation_templates(year: int) -> list[str]:
    t = [
        "({n}) In this Act, the term has the same meaning as within the meaning of section {s} of the {{name}}.",
        "({n}) Nothing in this section limits the operation of the {{name}}.",
        "({n}) For the purposes of the {{name}}, every such order shall be deemed valid.",
    ]
    if year < 1850:
        t.append("({n}) An Ordinance to extend certain provisions of the {{name}}.")
    elif 1900 <= year < 1950:
        t.append("({n}) An Act to amend and consolidate the law relating to the matters of the {{name}}.")
    elif 1950 <= year < 2000:
        t.append("({n}) The word has the same meaning as in section {s} of the {{name}}.")
    return t


def _plan(title: str, rng: np.random.Generator) -> list[_Clause]:
    y = _year(title)
    others = [t for t in MASTER_TITLES if t != title]
    older = [t for t in others if _year(t) <= y]
    newer = [t for t in others if _year(t) > y]
    clauses = [_title_clause(title)]
    n_amd = 5 if newer else 0
    n_prp = 3 if newer else 0
    n_frp = 3
    n_cit = ENTITIES_PER_DOC - 1 - n_amd - n_prp - n_frp
    cit_templates = _citation_templates(y)
    for i in range(n_cit):
        tpl = cit_templates[i % len(cit_templates)].format(n=i + 1, s=int(rng.integers(2, 60)))
        clauses.append(_Clause("CIT", str(rng.choice(older)), tpl))
    for _ in range(n_amd):
        s, m = int(rng.integers(2, 90)), int(rng.integers(2, 40))
        clauses.append(_Clause("AMD", str(rng.choice(newer)), f"Section {s}: amended, by section {m} of the {{name}}."))
    for _ in range(n_prp):
        s, m = int(rng.integers(2, 90)), int(rng.integers(2, 40))
        clauses.append(_Clause("PRP", str(rng.choice(newer)), f"Section {s} repealed by section {m} of the {{name}}."))
    order = [0] + [1 + int(i) for i in rng.permutation(len(clauses) - 1)]
    clauses = [clauses[i] for i in order]
    # the repeal schedule closes the document: its loose context must not reach other clauses
    for _ in range(n_frp):
        target = str(rng.choice(older))
        clauses.append(_Clause("FRP", target, f"{_year(target)}, No. {int(rng.integers(1, 60))}.\u2014The {{name}}."))
    return clauses


def _render(title: str, clauses: list[_Clause], rng, cfg) -> tuple[str, list[tuple[str, str]]]:
    lines, entities = [], []
    schedule_open = False
    for i, c in enumerate(clauses):
        damaged = c.target in DAMAGED_NAMES and c.kind != "TIT" and rng.random() < 0.5
        text, mention = c.render(damaged)
        if c.kind == "FRP" and not schedule_open:
            lines.append("SCHEDULE\nActs repealed")
            schedule_open = True
        if c.kind != "FRP" and i > 0 and rng.random() < 0.3:
            lines.append(str(rng.choice(FILLER)))
        if c.kind != "FRP" and i > 0 and rng.random() < 0.15:
            lines.append(str(rng.choice(MARGIN_NOTES)))
        lines.append(text)
        entities.append((canonicalize_string(mention, cfg), c.target))
    return "\n".join(lines) + "\n", entities


def generate_golden(seed: int = 0, typo_rate: float = 0.0) -> tuple[MasterList, list[GoldenDocument]]:
    """Build the master list and annotated documents.

    ``typo_rate`` picks ``round(rate * total)`` mentions uniformly over the
    whole corpus and damages one digit of each year.
    """
    rng = np.random.default_rng(seed)
    cfg = CanonConfig.default()
    plans = [_plan(t, rng) for t in DOCUMENTS]
    total = sum(len(p) for p in plans)
    n_typos = int(math.floor(typo_rate * total + 0.5))
    if n_typos:
        picks = np.random.default_rng([seed, 1]).choice(total, size=n_typos, replace=False)
        flat = [c for p in plans for c in p]
        for i in sorted(picks.tolist()):
            flat[i].typo = True
    docs = []
    for title, clauses in zip(DOCUMENTS, plans):
        body, entities = _render(title, clauses, np.random.default_rng([seed, 2, DOCUMENTS.index(title)]), cfg)
        ann = AnnotationSet(
            doc_id="",
            true_entities=tuple(entities),
            true_relations=tuple((c.kind, c.target) for c in clauses),
            miss_causes=tuple((c.target, "typo") for c in clauses if c.typo),
        )
        doc = GoldenDocument(title, body, ann, clauses)
        doc.annotation = AnnotationSet(doc.doc_id, ann.true_entities, ann.true_relations, ann.miss_causes)
        docs.append(doc)
    return MasterList(MASTER_TITLES), docs


def write_golden(out_dir, seed: int = 0, typo_rate: float = 0.0) -> Path:
    """Write ``docs/``, ``annotations/`` and ``master.txt`` under ``out_dir``."""
    out = Path(out_dir)
    master, docs = generate_golden(seed, typo_rate)
    (out / "docs").mkdir(parents=True, exist_ok=True)
    (out / "annotations").mkdir(parents=True, exist_ok=True)
    (out / "master.txt").write_text("\n".join(master.titles) + "\n", encoding="utf-8")
    for d in docs:
        (out / "docs" / d.filename).write_text(d.body, encoding="utf-8")
        (out / "annotations" / f"{d.doc_id}.json").write_text(
            json.dumps(d.annotation.to_json(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return out


def bundled_golden_dir() -> Path:
    return Path(__file__).with_name("data") / "golden"
