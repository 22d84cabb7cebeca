"""Error components, precision and recall of the extraction framework.

alpha1 counts wrong matches. beta splits into wrong matches (beta1, the
same events as alpha1 seen as lost true entities), rule misses (beta2) and
typo misses (beta3). The three beta parts are disjoint, so they add.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DataIntegrityError

logger = logging.getLogger(__name__)

CLUSTERS = 10
CLUSTER_SIZE = 30

# letters OCR substitutes for digits; a year token containing any is a numeric typo
_DIGIT_LOOKALIKES = str.maketrans("lioszbg", "1105289")
_TOKEN4 = re.compile(r"(?<![^\W_])[0-9a-z]{4}(?![^\W_])")


@dataclass(frozen=True)
class ErrorComponent:
    mean: float
    std: float | None
    n_samples: int

    @classmethod
    def from_samples(cls, samples) -> "ErrorComponent":
        x = np.asarray(list(samples), dtype=np.float64)
        if x.size == 0:
            raise ValueError("no samples to estimate from")
        std = float(x.std(ddof=1)) if x.size > 1 else None
        return cls(float(x.mean()), std, int(x.size))

    @property
    def stderr(self) -> float | None:
        return None if self.std is None else self.std / math.sqrt(self.n_samples)


ZERO = ErrorComponent(0.0, 0.0, 0)


def precision_recall(alpha: float, beta: float) -> tuple[float, float]:
    """precision = (1 - a - b) / (1 - b), recall = (1 - a - b) / (1 - a)."""
    if alpha < 0 or beta < 0 or alpha + beta >= 1:
        raise ValueError(f"need alpha, beta >= 0 and alpha + beta < 1 (got {alpha}, {beta})")
    good = 1.0 - alpha - beta
    return good / (1.0 - beta), good / (1.0 - alpha)


@dataclass(frozen=True)
class ErrorEstimates:
    alpha1: ErrorComponent
    beta1: ErrorComponent
    beta2: ErrorComponent
    beta3: ErrorComponent
    alpha: float
    beta: float

    @property
    def precision(self) -> float:
        return precision_recall(self.alpha, self.beta)[0]

    @property
    def recall(self) -> float:
        return precision_recall(self.alpha, self.beta)[1]


def combine_errors(alpha1: ErrorComponent, beta1: ErrorComponent, beta2: ErrorComponent,
                   beta3: ErrorComponent) -> ErrorEstimates:
    for name, c in (("alpha1", alpha1), ("beta1", beta1), ("beta2", beta2), ("beta3", beta3)):
        if not 0.0 <= c.mean <= 1.0:
            raise DataIntegrityError(f"{name} mean {c.mean} outside [0, 1]")
    beta = math.fsum((beta1.mean, beta2.mean, beta3.mean))
    if beta > 1.0:
        raise DataIntegrityError(f"beta components sum to {beta} > 1")
    return ErrorEstimates(alpha1, beta1, beta2, beta3, alpha1.mean, beta)


def _title(pred):
    if pred is None or isinstance(pred, str):
        return pred
    return pred.title


def estimate_match_errors(clusters) -> tuple[ErrorComponent, ErrorComponent]:
    """Wrong-match rate per cluster of (prediction, true title) pairs.

    A prediction is a MatchResult or a title string (None when unmatched);
    an unmatched found entity counts as wrong. The same component is returned
    twice: once as alpha1, once as beta1.
    """
    rates = []
    for i, cluster in enumerate(clusters):
        cluster = list(cluster)
        if not cluster:
            logger.warning("cluster %d is empty; excluded", i)
            continue
        wrong = sum(_title(p) != t for p, t in cluster)
        rates.append(wrong / len(cluster))
    comp = ErrorComponent.from_samples(rates) if rates else ZERO
    return comp, comp


def cluster_sample(pairs, n_clusters: int = CLUSTERS, size: int = CLUSTER_SIZE, seed: int = 0) -> list[list]:
    """Shuffle ``pairs`` and cut up to ``n_clusters`` clusters of ``size``.

    Fewer pairs than one cluster give a single short cluster.
    """
    pairs = list(pairs)
    if not pairs:
        return []
    perm = np.random.default_rng(seed).permutation(len(pairs))
    shuffled = [pairs[i] for i in perm]
    if len(shuffled) < size:
        return [shuffled]
    return [shuffled[i * size : (i + 1) * size] for i in range(min(n_clusters, len(shuffled) // size))]


def is_numeric_typo(surface: str) -> bool:
    """True when some 4-character token reads as a valid year once look-alike letters become digits."""
    for tok in _TOKEN4.findall(surface):
        if tok.isdigit() or not any(c.isdigit() for c in tok):
            continue
        fixed = tok.translate(_DIGIT_LOOKALIKES)
        if fixed.isdigit() and 1200 <= int(fixed) <= 2100:
            return True
    return False


@dataclass
class DocumentOutcome:
    doc_id: str
    n_true: int
    found: list = field(default_factory=list)  # (surface, canonical)
    missed: list = field(default_factory=list)  # (surface, canonical, cause)
    spurious: list = field(default_factory=list)  # extracted surfaces with no annotation


def compare_document(ann, mentions) -> DocumentOutcome:
    """Pair annotated entities with extracted mentions by surface text, as multisets."""
    available = Counter(m if isinstance(m, str) else m.surface for m in mentions)
    causes = defaultdict(list)
    for canon, cause in ann.miss_causes:
        causes[canon].append(cause)
    out = DocumentOutcome(ann.doc_id, len(ann.true_entities))
    for surface, canon in ann.true_entities:
        if available[surface] > 0:
            available[surface] -= 1
            out.found.append((surface, canon))
            continue
        if causes[canon]:
            cause = causes[canon].pop(0)
        else:
            cause = "typo" if is_numeric_typo(surface) else "rule"
        out.missed.append((surface, canon, cause))
    out.spurious = sorted((available - Counter()).elements())
    return out


def estimate_extraction_errors(docs) -> tuple[ErrorComponent, ErrorComponent]:
    """Per-document rule-miss and typo-miss rates.

    ``docs`` holds (Document, AnnotationSet, mentions) triples. Documents
    with no annotated entities carry no rate and are skipped.
    """
    rule, typo = [], []
    for _, ann, mentions in docs:
        res = compare_document(ann, mentions)
        if res.n_true == 0:
            continue
        rule.append(sum(c == "rule" for *_, c in res.missed) / res.n_true)
        typo.append(sum(c == "typo" for *_, c in res.missed) / res.n_true)
    if not rule:
        return ZERO, ZERO
    return ErrorComponent.from_samples(rule), ErrorComponent.from_samples(typo)


def matching_precision_recall(predictions, truths) -> tuple[float, float]:
    """Direct precision and recall of title predictions against known truth.

    Precision is correct over answered; recall is correct over all queries.
    """
    titles = [_title(p) for p in predictions]
    answered = sum(t is not None for t in titles)
    correct = sum(p is not None and p == t for p, t in zip(titles, truths))
    return (correct / answered if answered else 1.0), (correct / len(truths) if truths else 1.0)


@dataclass
class EvaluationReport:
    estimates: ErrorEstimates
    n_documents: int
    n_true_entities: int
    n_found: int
    n_spurious: int
    observed_precision: float
    observed_recall: float

    def as_dict(self) -> dict:
        est = self.estimates
        return {
            "components": {k: asdict(getattr(est, k)) for k in ("alpha1", "beta1", "beta2", "beta3")},
            "alpha": est.alpha,
            "beta": est.beta,
            "precision": est.precision,
            "recall": est.recall,
            "observed": {
                "documents": self.n_documents,
                "true_entities": self.n_true_entities,
                "found": self.n_found,
                "spurious": self.n_spurious,
                "precision": self.observed_precision,
                "recall": self.observed_recall,
            },
        }

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def to_csv(self, path) -> None:
        """Rows mean, std and n; one column per error component and the combined rates."""
        est = self.estimates
        comps = [est.alpha1, est.beta1, est.beta2, est.beta3]

        def fmt(v):
            return "NA" if v is None else f"{v:.4f}"

        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["measure", "alpha1", "beta1", "beta2", "beta3", "alpha", "beta", "precision", "recall"])
            w.writerow(["mean", *(fmt(c.mean) for c in comps), fmt(est.alpha), fmt(est.beta),
                        fmt(est.precision), fmt(est.recall)])
            w.writerow(["std", *(fmt(c.std) for c in comps), "", "", "", ""])
            w.writerow(["n", *(c.n_samples for c in comps), "", "", "", ""])


def evaluate(docs, annotations, mentions, matches, seed: int = 0, n_clusters: int = CLUSTERS,
             cluster_size: int = CLUSTER_SIZE) -> EvaluationReport:
    """Estimate every component over the annotated documents.

    ``mentions`` maps doc_id to extracted mentions; ``matches`` maps doc_id
    to MatchResults carrying those mentions.
    """
    triples, pairs = [], []
    n_true = n_found = n_spurious = 0
    pred_all: Counter = Counter()
    true_all: Counter = Counter()
    for doc in docs:
        ann = annotations.get(doc.doc_id)
        if ann is None:
            continue
        ms = mentions.get(doc.doc_id, [])
        triples.append((doc, ann, ms))
        res = compare_document(ann, ms)
        n_true += res.n_true
        n_found += len(res.found)
        n_spurious += len(res.spurious)
        by_surface = defaultdict(list)
        for r in matches.get(doc.doc_id, []):
            by_surface[r.surface].append(r)
        for surface, canon in res.found:
            pairs.append((by_surface[surface].pop(0) if by_surface[surface] else None, canon))
        for r in matches.get(doc.doc_id, []):
            if r.title is not None:
                pred_all[(doc.doc_id, r.title)] += 1
        for _, canon in ann.true_entities:
            true_all[(doc.doc_id, canon)] += 1
    if not triples:
        raise DataIntegrityError("no annotated documents among the inputs")
    alpha1, beta1 = estimate_match_errors(cluster_sample(pairs, n_clusters, cluster_size, seed))
    beta2, beta3 = estimate_extraction_errors(triples)
    hit = sum((pred_all & true_all).values())
    n_pred = sum(pred_all.values())
    return EvaluationReport(
        combine_errors(alpha1, beta1, beta2, beta3),
        len(triples), n_true, n_found, n_spurious,
        hit / n_pred if n_pred else 1.0,
        hit / n_true if n_true else 1.0,
    )
