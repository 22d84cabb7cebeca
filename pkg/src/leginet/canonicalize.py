"""OCR text canonicalization.

Five steps run in a fixed order: lowercase, special-character removal,
fuzzy margin-phrase removal, keyword typo repair, whitespace collapse.
Parentheses always survive because act titles use them.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import Document
from .exceptions import ConfigError
from .match import edit_distance

STEPS = ("lowercase", "special_chars", "margin_phrases", "keyword_fixes", "whitespace")

# Quote marks are joined out rather than spaced: OCR puts them inside words.
DEFAULT_ELIDE = "'\"`‘’“”"

_MAX_PASSES = 32

_WS = re.compile(r"\s+")
_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class MarginPhrase:
    phrase: str
    max_edit: int
    keep_before: tuple[str, ...] = ()
    keep_after: tuple[str, ...] = ()


@dataclass(frozen=True)
class CanonConfig:
    """Canonicalization settings.

    ``special_chars=None`` means every character that is not alphanumeric,
    whitespace or a parenthesis. Characters in ``elide_chars`` are deleted
    outright; other special characters become a space.
    """

    special_chars: str | None = None
    elide_chars: str = DEFAULT_ELIDE
    margin_phrases: tuple[MarginPhrase, ...] = ()
    keyword_fixes: dict = field(default_factory=dict)

    def __post_init__(self):
        chars = (self.special_chars or "") + self.elide_chars
        if "(" in chars or ")" in chars:
            raise ConfigError("parentheses may not be configured as special characters")
        for mp in self.margin_phrases:
            if mp.max_edit < 0:
                raise ConfigError(f"negative edit threshold for margin phrase {mp.phrase!r}")

    def is_special(self, ch: str) -> bool:
        if ch in "()":
            return False
        if ch in self.elide_chars:
            return True
        if self.special_chars is None:
            return not (ch.isalnum() or ch.isspace())
        return ch in self.special_chars

    @classmethod
    def from_json(cls, path) -> "CanonConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read canonicalization config {path}: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "CanonConfig":
        phrases = []
        for mp in raw.get("margin_phrases", []):
            phrase = _WS.sub(" ", mp["phrase"].lower()).strip()
            phrases.append(
                MarginPhrase(
                    phrase,
                    # one edit per word unless stated
                    int(mp.get("max_edit", len(phrase.split()))),
                    tuple(mp.get("keep_before", ())),
                    tuple(mp.get("keep_after", ())),
                )
            )
        fixes = {}
        for target, variants in raw.get("keyword_fixes", {}).items():
            for v in variants:
                fixes[v.lower()] = target.lower()
        return cls(
            special_chars=raw.get("special_chars"),
            elide_chars=raw.get("elide_chars", DEFAULT_ELIDE),
            margin_phrases=tuple(phrases),
            keyword_fixes=fixes,
        )

    @classmethod
    def default(cls) -> "CanonConfig":
        return cls.from_json(Path(__file__).with_name("data") / "canon_config.json")


@dataclass(frozen=True)
class CanonicalText:
    doc_id: str
    text: str
    applied_steps: tuple[str, ...] = STEPS


def strip_special_chars(text: str, cfg: CanonConfig) -> str:
    out = []
    for ch in text:
        if not cfg.is_special(ch):
            out.append(ch)
        elif ch not in cfg.elide_chars:
            out.append(" ")
    return "".join(out)


def strip_margin_phrases(text: str, phrases, max_edit: int | None = None) -> str:
    """Delete token windows within ``max_edit`` edits of any margin phrase.

    ``phrases`` holds plain strings (all using ``max_edit``) or
    :class:`MarginPhrase` objects carrying their own threshold and protected
    contexts. Windows are whole-token runs; at each token position the longest
    qualifying window wins, scanning left to right without overlap. A deleted
    window takes one preceding whitespace character with it.

    >>> strip_margin_phrases("short tltle example", ["short title"], 1)
    ' example'
    """
    margins = []
    for p in phrases:
        if isinstance(p, MarginPhrase):
            margins.append(p)
        else:
            if max_edit is None or max_edit < 0:
                raise ValueError("max_edit must be a non-negative integer")
            margins.append(MarginPhrase(_WS.sub(" ", p).strip(), max_edit))
    if not margins or not text:
        return text
    toks = [(m.start(), m.end(), m.group()) for m in _TOKEN.finditer(text)]
    cuts = []
    i = 0
    while i < len(toks):
        hit = _longest_window(toks, i, margins)
        if hit is None:
            i += 1
            continue
        j = hit
        start, end = toks[i][0], toks[j][1]
        if start > 0 and text[start - 1].isspace():
            start -= 1
        cuts.append((start, end))
        i = j + 1
    if not cuts:
        return text
    out, pos = [], 0
    for a, b in cuts:
        out.append(text[pos:a])
        pos = b
    out.append(text[pos:])
    return "".join(out)


def _longest_window(toks, i, margins):
    """Index of the last token of the longest matching window starting at i."""
    best = None
    best_len = -1
    for margin in margins:
        n_words = len(margin.phrase.split())
        lo = max(1, n_words - 1)
        hi = min(len(toks) - i, n_words + 1)
        for width in range(hi, lo - 1, -1):
            j = i + width - 1
            window = " ".join(t[2] for t in toks[i : j + 1])
            if abs(len(window) - len(margin.phrase)) > margin.max_edit:
                continue
            if edit_distance(window, margin.phrase) > margin.max_edit:
                continue
            if i > 0 and toks[i - 1][2] in margin.keep_before:
                continue
            if j + 1 < len(toks) and toks[j + 1][2] in margin.keep_after:
                continue
            size = toks[j][1] - toks[i][0]
            if size > best_len:
                best, best_len = j, size
            break
    return best


def fix_keyword_typos(text: str, fixes: dict) -> str:
    """Replace whole-word misspellings of keywords.

    A word boundary here is anything that is not a letter or digit, so
    ``enact`` is untouched while ``(aot`` is repaired.
    """
    if not fixes:
        return text
    alts = "|".join(re.escape(k) for k in sorted(fixes, key=lambda s: (-len(s), s)))
    pattern = re.compile(rf"(?<![^\W_])({alts})(?![^\W_])")
    return pattern.sub(lambda m: fixes[m.group(1)], text)


def collapse_whitespace(text: str) -> str:
    return _WS.sub(" ", text).strip()


def canonicalize_string(text: str, cfg: CanonConfig) -> str:
    text = text.lower()
    text = strip_special_chars(text, cfg)
    # margin removal can splice tokens into new matches; iterate to a fixed point
    for _ in range(_MAX_PASSES):
        nxt = strip_margin_phrases(text, cfg.margin_phrases)
        nxt = fix_keyword_typos(nxt, cfg.keyword_fixes)
        if collapse_whitespace(nxt) == collapse_whitespace(text):
            break
        text = nxt
    return collapse_whitespace(text)


def canonicalize_text(doc: Document, cfg: CanonConfig | None = None) -> CanonicalText:
    cfg = cfg or CanonConfig.default()
    return CanonicalText(doc.doc_id, canonicalize_string(doc.body, cfg), STEPS)


class TextCanonicalizer(TransformerMixin, BaseEstimator):
    """Stateless transformer mapping raw strings or Documents to canonical text."""

    def __init__(self, config=None):
        self.config = config

    def fit(self, X=None, y=None):
        cfg = self.config
        if cfg is None:
            cfg = CanonConfig.default()
        elif isinstance(cfg, dict):
            cfg = CanonConfig.from_dict(cfg)
        elif isinstance(cfg, (str, Path)):
            cfg = CanonConfig.from_json(cfg)
        self.config_ = cfg
        return self

    def transform(self, X):
        if not hasattr(self, "config_"):
            self.fit()
        out = []
        for x in X:
            if isinstance(x, Document):
                out.append(canonicalize_text(x, self.config_))
            else:
                out.append(canonicalize_string(str(x), self.config_))
        return out
