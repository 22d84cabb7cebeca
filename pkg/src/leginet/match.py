"""Approximate string matching of act titles against a master list.

The hybrid matcher scans the master list in order, scoring each line by
token Jaccard similarity and Levenshtein distance, and stops at the first
line that is either an exact hit or reaches ``jaccard_exit`` (by default a
line with exactly the query's token set). Among the scanned prefix it prefers the closest line by edit
distance when that is within ``edit_threshold``, and otherwise falls back to
the line with the highest Jaccard score.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from numba import njit
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

logger = logging.getLogger(__name__)

METHODS = ("exact_edit", "jaccard", "none")


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance with unit insert, delete and substitute costs."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def jaccard_similarity(a: str, b: str) -> float:
    """Intersection over union of whitespace token sets; two empty strings score 1."""
    ta, tb = set(a.split()), set(b.split())
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


def _encode(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32)


@njit(cache=True, nogil=True)
def _edit_distances(query, codes, offsets, stop):
    """Levenshtein distance from ``query`` to each of the first ``stop`` packed strings."""
    out = np.empty(stop, dtype=np.int64)
    m = query.shape[0]
    prev = np.empty(m + 1, dtype=np.int64)
    cur = np.empty(m + 1, dtype=np.int64)
    for k in range(stop):
        lo = offsets[k]
        hi = offsets[k + 1]
        for j in range(m + 1):
            prev[j] = j
        for i in range(lo, hi):
            cur[0] = i - lo + 1
            c = codes[i]
            for j in range(1, m + 1):
                best = prev[j] + 1
                if cur[j - 1] + 1 < best:
                    best = cur[j - 1] + 1
                sub = prev[j - 1] + (0 if query[j - 1] == c else 1)
                if sub < best:
                    best = sub
                cur[j] = best
            for j in range(m + 1):
                prev[j] = cur[j]
        out[k] = prev[m]
    return out


class _PackedMaster:
    """Array views of a master list for vectorised scoring."""

    def __init__(self, master):
        titles = [e.canonical_title for e in master.entries]
        encoded = [_encode(t) for t in titles]
        self.offsets = np.zeros(len(titles) + 1, dtype=np.int64)
        if titles:
            self.offsets[1:] = np.cumsum([len(e) for e in encoded])
            self.codes = np.concatenate(encoded)
        else:
            self.codes = np.zeros(0, dtype=np.uint32)
        self.n_tokens = np.array([len(e.tokens) for e in master.entries], dtype=np.float64)
        self.postings = {tok: np.asarray(ids, dtype=np.int64) for tok, ids in master.index.items()}
        self.exact = {}
        for i, t in enumerate(titles):
            self.exact.setdefault(t, i)

    def jaccard_all(self, tokens: set) -> np.ndarray:
        inter = np.zeros(len(self.n_tokens), dtype=np.float64)
        for tok in tokens:
            ids = self.postings.get(tok)
            if ids is not None:
                inter[ids] += 1.0
        union = self.n_tokens + len(tokens) - inter
        with np.errstate(invalid="ignore", divide="ignore"):
            m = np.where(union > 0, inter / np.where(union > 0, union, 1.0), 1.0)
        return m

    def edit_prefix(self, query: str, stop: int) -> np.ndarray:
        return _edit_distances(_encode(query), self.codes, self.offsets, stop)


def _packed(master) -> _PackedMaster:
    packed = getattr(master, "_packed", None)
    if packed is None:
        packed = _PackedMaster(master)
        master._packed = packed
    return packed


@dataclass(frozen=True)
class MatchConfig:
    edit_threshold: int = 5
    # 0.5 exits on sibling titles ("x amendment act 2011" vs "x act 2002")
    jaccard_exit: float = 1.0
    jaccard_floor: float = 0.0

    def __post_init__(self):
        if self.edit_threshold < 0:
            raise ValueError("edit_threshold must be >= 0")
        if not 0.0 <= self.jaccard_floor <= 1.0:
            raise ValueError("jaccard_floor must lie in [0, 1]")
        # an exit above 1 never fires and turns the scan into a full scan
        if self.jaccard_exit < self.jaccard_floor:
            raise ValueError("jaccard_exit must be >= jaccard_floor")


@dataclass(frozen=True)
class MatchResult:
    surface: str
    entry: Any  # MasterEntry or None
    method: str
    edit_dist: int
    jaccard: float
    early_exit: bool
    scanned: int = 0
    mention: Any = None

    @property
    def title(self) -> str | None:
        return None if self.entry is None else self.entry.canonical_title


def hybrid_match(surface: str, master, cfg: MatchConfig | None = None, mention=None) -> MatchResult:
    """Resolve one canonicalized mention against ``master``.

    Scores are reported for the chosen entry, or the best scores seen when
    nothing is chosen.
    """
    cfg = cfg or MatchConfig()
    if len(master) == 0:
        return MatchResult(surface, None, "none", len(surface), 0.0, False, 0, mention)
    packed = _packed(master)
    m = packed.jaccard_all(set(surface.split()))
    hits = np.flatnonzero(m >= cfg.jaccard_exit)
    stop = len(m)
    if hits.size:
        stop = int(hits[0]) + 1
    exact = packed.exact.get(surface)
    if exact is not None and exact + 1 < stop:
        stop = exact + 1
    early = bool(hits.size) or exact is not None
    n = packed.edit_prefix(surface, stop)
    m = m[:stop]
    i2 = int(np.argmin(n))
    i1 = int(np.argmax(m))
    y1, x1 = int(n[i2]), float(m[i1])
    if y1 <= cfg.edit_threshold:
        return MatchResult(surface, master[i2], "exact_edit", y1, float(m[i2]), early, stop, mention)
    if x1 > cfg.jaccard_floor:
        return MatchResult(surface, master[i1], "jaccard", int(n[i1]), x1, early, stop, mention)
    return MatchResult(surface, None, "none", y1, x1, early, stop, mention)


def edit_only_match(surface: str, master, cfg: MatchConfig | None = None) -> MatchResult:
    """Baseline: nearest title by edit distance over the whole list, within the threshold."""
    cfg = cfg or MatchConfig()
    if len(master) == 0:
        return MatchResult(surface, None, "none", len(surface), 0.0, False)
    n = _packed(master).edit_prefix(surface, len(master))
    i = int(np.argmin(n))
    if n[i] <= cfg.edit_threshold:
        return MatchResult(surface, master[i], "exact_edit", int(n[i]), 0.0, False, len(master))
    return MatchResult(surface, None, "none", int(n[i]), 0.0, False, len(master))


def jaccard_only_match(surface: str, master, cfg: MatchConfig | None = None) -> MatchResult:
    """Baseline: highest Jaccard title over the whole list, above the floor."""
    cfg = cfg or MatchConfig()
    if len(master) == 0:
        return MatchResult(surface, None, "none", len(surface), 0.0, False)
    m = _packed(master).jaccard_all(set(surface.split()))
    i = int(np.argmax(m))
    if m[i] > cfg.jaccard_floor:
        return MatchResult(surface, master[i], "jaccard", 0, float(m[i]), False, len(master))
    return MatchResult(surface, None, "none", 0, float(m[i]), False, len(master))


def summarize(results: Sequence[MatchResult]) -> dict:
    counts = Counter(r.method for r in results)
    summary = {k: counts.get(k, 0) for k in METHODS}
    summary["matched"] = summary["exact_edit"] + summary["jaccard"]
    summary["unmatched"] = summary["none"]
    return summary


def batch_match(mentions, master, cfg: MatchConfig | None = None) -> list[MatchResult]:
    """Match each mention (an EntityMention or a plain string) in order."""
    cfg = cfg or MatchConfig()
    out = []
    for mention in mentions:
        surface = mention if isinstance(mention, str) else mention.surface
        out.append(hybrid_match(surface, master, cfg, mention=None if isinstance(mention, str) else mention))
    if out:
        logger.info("matched %(matched)d of %(total)d mentions (edit %(exact_edit)d, jaccard %(jaccard)d)",
                    {**summarize(out), "total": len(out)})
    return out


class HybridMatcher(BaseEstimator):
    """Estimator wrapper: ``fit`` on master titles, ``predict`` canonical titles.

    ``predict`` returns ``None`` for mentions that resolve to nothing.
    """

    def __init__(self, edit_threshold=5, jaccard_exit=1.0, jaccard_floor=0.0):
        self.edit_threshold = edit_threshold
        self.jaccard_exit = jaccard_exit
        self.jaccard_floor = jaccard_floor

    def fit(self, X, y=None):
        from .corpus import MasterList

        self.master_ = X if isinstance(X, MasterList) else MasterList(X)
        self.config_ = MatchConfig(self.edit_threshold, self.jaccard_exit, self.jaccard_floor)
        return self

    def match(self, X) -> list[MatchResult]:
        check_is_fitted(self, "master_")
        return batch_match(X, self.master_, self.config_)

    def predict(self, X) -> list:
        return [r.title for r in self.match(X)]

    def score(self, X, y) -> float:
        """Fraction of mentions resolved to the expected title."""
        pred = self.predict(X)
        if not pred:
            return 0.0
        return sum(p == t for p, t in zip(pred, y)) / len(pred)
