"""Rule-based act-name recognition and relation classification.

Rules are written in a small template language: literal words plus six
placeholders (``[keyword]``, ``[act name]``, ``[year]``, ``[date]``,
``[any phrase]``, ``[any number]``). Entity templates are grouped into
period strata keyed by the citing document's year; relation rules classify
each recognised act name by the text immediately to its left.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import YEAR_MAX, YEAR_MIN, valid_year
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

PLACEHOLDERS = ("keyword", "act name", "year", "date", "any phrase", "any number")
ACT_HEADS = ("act", "ordinance")
# longest act title we accept, counted in tokens including the head word
MAX_ACT_TOKENS = 12
# how far back a relation rule may look for its context
CONTEXT_WINDOW = 300

_PLACEHOLDER = re.compile(r"\[([^\]]*)\]")
_MONTHS = r"(?:jan|feb|mar|apr|may|jun|jul|aug|sep|sept|oct|nov|dec)[a-z]*"
_NUMBER = r"\d[0-9a-z()]*(?: \d[0-9a-z()]*)*"
_WORD_START = r"(?<![^\W_])"
_WORD_END = r"(?![^\W_])"


class RelationType(str, Enum):
    TIT = "TIT"
    CIT = "CIT"
    AMD = "AMD"
    PRP = "PRP"
    FRP = "FRP"


@dataclass(frozen=True)
class Template:
    pattern: str
    rule_id: str
    regex: re.Pattern = field(compare=False, repr=False, default=None)


@dataclass(frozen=True)
class Stratum:
    year_lo: int
    year_hi: int
    keywords: tuple[str, ...]
    entity_templates: tuple[Template, ...]
    name: str = ""

    def covers(self, year: int) -> bool:
        return self.year_lo <= year <= self.year_hi


@dataclass(frozen=True)
class RelationRule:
    rtype: RelationType
    pattern: str
    rule_id: str
    regex: re.Pattern = field(compare=False, repr=False, default=None)


@dataclass(frozen=True)
class RuleSet:
    strata: tuple[Stratum, ...]
    relation_rules: tuple[RelationRule, ...]
    shared_templates: tuple[Template, ...] = ()

    def templates_for(self, year: int | None) -> list[Template]:
        out: list[Template] = []
        for s in self.strata:
            if year is None or s.covers(year):
                out.extend(s.entity_templates)
        out.extend(self.shared_templates)
        return out


@dataclass(frozen=True)
class EntityMention:
    doc_id: str
    surface: str
    span: tuple[int, int]
    year: int | None
    rule_id: str


@dataclass(frozen=True)
class RelationMention:
    doc_id: str
    rtype: RelationType
    target: EntityMention
    event_year: int | None
    rule_id: str


def _tokenize_pattern(pattern: str, rule_id: str) -> list[tuple[str, str]]:
    """Split a template into ('lit', word) and ('ph', placeholder) items."""
    items = []
    pos = 0
    for m in _PLACEHOLDER.finditer(pattern):
        for word in pattern[pos : m.start()].split():
            items.append(("lit", word.lower()))
        name = " ".join(m.group(1).lower().split())
        if name not in PLACEHOLDERS:
            raise ConfigError(f"rule {rule_id!r}: unknown placeholder [{m.group(1)}]")
        items.append(("ph", name))
        pos = m.end()
    for word in pattern[pos:].split():
        items.append(("lit", word.lower()))
    return items


def _act_name_regex() -> str:
    # name tokens may not themselves be head words, so the capture stops at the nearest one
    head = "(?:" + "|".join(ACT_HEADS) + ")"
    return rf"\(*(?P<act>(?:(?!{head}(?:[\s)]|$))\S+ ){{1,{MAX_ACT_TOKENS - 1}}}{head})(?=[\s)]|$)"


def _compile_template(pattern: str, rule_id: str, keywords=()) -> re.Pattern:
    items = _tokenize_pattern(pattern, rule_id)
    n_act = sum(1 for kind, v in items if kind == "ph" and v == "act name")
    if n_act != 1:
        raise ConfigError(f"rule {rule_id!r}: template needs exactly one [act name], found {n_act}")
    kw = "|".join(re.escape(k) for k in sorted(keywords, key=lambda s: (-len(s), s)))
    parts: list[str] = []
    glue_next = False  # the previous piece already ends with its own separator
    seen_act = False
    for idx, (kind, value) in enumerate(items):
        if kind == "lit":
            piece = re.escape(value)
        elif value == "keyword":
            if not kw:
                raise ConfigError(f"rule {rule_id!r}: [keyword] used but the stratum has no keywords")
            piece = f"(?:{kw})"
        elif value == "act name":
            piece = _act_name_regex()
            seen_act = True
        elif value == "year":
            name = "year" if seen_act and items[idx - 1] == ("ph", "act name") else None
            piece = rf"(?P<{name}>\d{{4}})" if name else r"\d{4}"
        elif value == "date":
            adjacent = seen_act and items[idx - 1] == ("ph", "act name")
            year = r"(?P<year>\d{4})" if adjacent else r"\d{4}"
            piece = rf"(?P<dm>(?:\d{{1,2}} )?{_MONTHS} )?{year}" if adjacent else rf"(?:(?:\d{{1,2}} )?{_MONTHS} )?{year}"
        elif value == "any number":
            piece = _NUMBER
        else:  # any phrase, possibly empty, carries its own trailing space
            piece = r"(?:\S+ )*?"
        if parts and not glue_next:
            parts.append(" ")
        parts.append(piece)
        glue_next = kind == "ph" and value == "any phrase"
    return re.compile(_WORD_START + "".join(parts) + _WORD_END)


def _compile_relation_prefix(pattern: str, rule_id: str) -> re.Pattern:
    """Regex matching the left context of an [act name], anchored at its start."""
    items = _tokenize_pattern(pattern, rule_id)
    idx = [i for i, it in enumerate(items) if it == ("ph", "act name")]
    if len(idx) != 1:
        raise ConfigError(f"relation rule {rule_id!r}: needs exactly one [act name]")
    tail = items[idx[0] + 1 :]
    if any(it not in (("ph", "year"), ("ph", "date")) for it in tail):
        raise ConfigError(f"relation rule {rule_id!r}: [act name] must end the pattern (optionally with [year])")
    prefix = items[: idx[0]]
    if not prefix:
        raise ConfigError(f"relation rule {rule_id!r}: empty context")
    for kind, v in prefix:
        if kind == "ph" and v == "keyword":
            raise ConfigError(f"relation rule {rule_id!r}: [keyword] is not allowed in relation rules")
    pieces = []
    glue = False
    for kind, v in prefix:
        if kind == "lit":
            piece = re.escape(v)
        elif v == "any number":
            piece = _NUMBER
        elif v in ("year",):
            piece = r"\d{4}"
        elif v == "date":
            piece = rf"(?:(?:\d{{1,2}} )?{_MONTHS} )?\d{{4}}"
        else:
            piece = r"(?:\S+ )*?"
        if pieces and not glue:
            pieces.append(" ")
        pieces.append(piece)
        glue = kind == "ph" and v == "any phrase"
    sep = "" if glue else " "
    return re.compile(_WORD_START + "".join(pieces) + sep + r"\(*\Z")


def _check_strata(strata: list[Stratum]) -> None:
    ordered = sorted(strata, key=lambda s: s.year_lo)
    for s in ordered:
        if s.year_lo >= s.year_hi:
            raise ConfigError(f"stratum {s.name or s.year_lo}: year_lo must be < year_hi")
        if not s.entity_templates:
            raise ConfigError(f"stratum {s.name or s.year_lo}: no entity templates")
    for a, b in zip(ordered, ordered[1:]):
        if b.year_lo <= a.year_hi:
            raise ConfigError(f"strata {a.name or a.year_lo} and {b.name or b.year_lo} overlap")
        if b.year_lo != a.year_hi + 1:
            raise ConfigError(f"gap between strata ending {a.year_hi} and starting {b.year_lo}")
    if ordered and (ordered[0].year_lo > YEAR_MIN or ordered[-1].year_hi < YEAR_MAX):
        raise ConfigError(f"strata must cover [{YEAR_MIN}, {YEAR_MAX}]")


def rules_from_dict(raw: dict) -> RuleSet:
    strata = []
    for i, s in enumerate(raw.get("strata", [])):
        name = s.get("name", f"stratum{i}")
        keywords = tuple(" ".join(k.lower().split()) for k in s.get("keywords", []))
        templates = tuple(
            Template(t["pattern"], t["id"], _compile_template(t["pattern"], t["id"], keywords))
            for t in s.get("templates", [])
        )
        strata.append(Stratum(int(s["year_lo"]), int(s["year_hi"]), keywords, templates, name))
    if not strata:
        raise ConfigError("rules define no strata")
    _check_strata(strata)
    shared = tuple(
        Template(t["pattern"], t["id"], _compile_template(t["pattern"], t["id"]))
        for t in raw.get("shared_templates", [])
    )
    relations = []
    for r in raw.get("relation_rules", []):
        try:
            rtype = RelationType(r["type"])
        except ValueError:
            raise ConfigError(f"relation rule {r.get('id')!r}: unknown type {r['type']!r}") from None
        relations.append(RelationRule(rtype, r["pattern"], r["id"], _compile_relation_prefix(r["pattern"], r["id"])))
    ids = [t.rule_id for s in strata for t in s.entity_templates] + [t.rule_id for t in shared] + [r.rule_id for r in relations]
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        raise ConfigError(f"duplicate rule ids: {sorted(dupes)}")
    if not relations:
        logger.warning("rule set has no relation rules; relation extraction is disabled")
    return RuleSet(tuple(strata), tuple(relations), shared)


def compile_rules(rules_file=None) -> RuleSet:
    """Load and validate a JSON rules file (the bundled defaults when omitted)."""
    path = Path(rules_file) if rules_file else Path(__file__).with_name("data") / "default_rules.json"
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read rules file {path}: {exc}") from exc
    return rules_from_dict(raw)


def extract_entities(ct, doc_year: int | None, rules: RuleSet, doc_id: str | None = None) -> list[EntityMention]:
    """Find act-name mentions in canonical text, sorted by position.

    ``ct`` is a CanonicalText or a plain string. Templates may overlap, so
    every start position is tried; exact (surface, span) repeats collapse to
    the first rule in file order.
    """
    text = ct if isinstance(ct, str) else ct.text
    doc_id = doc_id if doc_id is not None else getattr(ct, "doc_id", "")
    found: dict[tuple[str, tuple[int, int]], EntityMention] = {}
    for order, tpl in enumerate(rules.templates_for(doc_year)):
        pos = 0
        while True:
            m = tpl.regex.search(text, pos)
            if m is None:
                break
            pos = m.start() + 1
            start = m.start("act")
            end = m.end("act")
            year = None
            ygroup = m.groupdict().get("year")
            if ygroup is not None:
                year = int(ygroup)
                if not m.groupdict().get("dm"):
                    end = m.end("year")
            if year is not None and not valid_year(year):
                continue
            surface = text[start:end]
            key = (surface, (start, end))
            if key not in found:
                found[key] = (order, EntityMention(doc_id, surface, (start, end), year, tpl.rule_id))
    mentions = sorted(found.values(), key=lambda om: (om[1].span, om[0]))
    return [m for _, m in mentions]


def extract_relations(ct, mentions: list[EntityMention], rules: RuleSet) -> list[RelationMention]:
    """Classify each mention by the first relation rule whose context matches.

    Mentions no rule claims are plain citations.
    """
    if not rules.relation_rules:
        return []
    text = ct if isinstance(ct, str) else ct.text
    out = []
    for mention in mentions:
        start = mention.span[0]
        left = text[max(0, start - CONTEXT_WINDOW) : start]
        rtype, rule_id = RelationType.CIT, "default-cit"
        for rule in rules.relation_rules:
            if rule.regex.search(left):
                rtype, rule_id = rule.rtype, rule.rule_id
                break
        event_year = mention.year if rtype in (RelationType.AMD, RelationType.PRP) else None
        out.append(RelationMention(mention.doc_id, rtype, mention, event_year, rule_id))
    return out


class RuleExtractor(TransformerMixin, BaseEstimator):
    """Transformer from canonical texts to (mentions, relations) pairs.

    ``transform`` accepts CanonicalText objects, plain strings, or
    ``(text, year)`` tuples; a missing year applies every stratum.
    """

    def __init__(self, rules=None):
        self.rules = rules

    def fit(self, X=None, y=None):
        self.rules_ = self.rules if isinstance(self.rules, RuleSet) else compile_rules(self.rules)
        return self

    def transform(self, X):
        if not hasattr(self, "rules_"):
            self.fit()
        out = []
        for x in X:
            year = None
            if isinstance(x, tuple):
                x, year = x
            mentions = extract_entities(x, year, self.rules_)
            out.append((mentions, extract_relations(x, mentions, self.rules_)))
        return out
