import json

import pytest
from hypothesis import given, settings, strategies as st

from leginet.corpus import AnnotationSet, Document
from leginet.evaluation import (ErrorComponent, cluster_sample, combine_errors, compare_document, estimate_extraction_errors,
                                estimate_match_errors, evaluate, is_numeric_typo, matching_precision_recall,
                                precision_recall)
from leginet.exceptions import DataIntegrityError
from leginet.match import MatchResult


@pytest.mark.parametrize("a,b,p,r", [
    (0.0160, 0.0179, 0.9837, 0.9818),
    (0.0, 0.0, 1.0, 1.0),
    (0.5, 0.25, 0.25 / 0.75, 0.5),
])
def test_precision_recall_examples(a, b, p, r):
    got = precision_recall(a, b)
    assert got == (pytest.approx(p, abs=5e-5), pytest.approx(r, abs=5e-5))


def test_precision_recall_precondition():
    with pytest.raises(ValueError):
        precision_recall(0.6, 0.4)
    with pytest.raises(ValueError):
        precision_recall(-0.1, 0.0)


_rate = st.floats(0.0, 0.45, allow_nan=False)


@settings(max_examples=200)
@given(_rate, _rate, st.floats(0.001, 0.05))
def test_precision_recall_monotone(a, b, step):
    p0, r0 = precision_recall(a, b)
    assert precision_recall(a + step, b)[0] <= p0
    assert precision_recall(a, b + step)[1] <= r0
    p, r = precision_recall(a, a)
    assert p == pytest.approx(r)


def _c(mean):
    return ErrorComponent(mean, 0.0, 10)


def test_combine_examples():
    est = combine_errors(_c(0.0160), _c(0.0160), _c(0.0012), _c(0.0007))
    assert (est.alpha, est.beta) == (0.0160, pytest.approx(0.0179))
    zero = combine_errors(_c(0), _c(0), _c(0), _c(0))
    assert (zero.alpha, zero.beta, zero.precision, zero.recall) == (0, 0, 1, 1)
    assert combine_errors(_c(0), _c(0.01), _c(0.01), _c(0.01)).beta == pytest.approx(0.03)


def test_combine_rejects_bad_input():
    with pytest.raises(DataIntegrityError):
        combine_errors(_c(0), _c(0.5), _c(0.4), _c(0.3))
    with pytest.raises(DataIntegrityError):
        combine_errors(_c(1.5), _c(0), _c(0), _c(0))


@settings(max_examples=100)
@given(st.permutations([0.01, 0.002, 0.03]))
def test_combine_order_independent(parts):
    assert combine_errors(_c(0), *map(_c, parts)).beta == combine_errors(_c(0), _c(0.01), _c(0.002), _c(0.03)).beta


def _pairs(n_ok, n_bad, title="land act 1924"):
    return [(title, title)] * n_ok + [("land act 1948", title)] * n_bad


def test_match_error_examples():
    a1, b1 = estimate_match_errors([_pairs(30, 0)] * 10)
    assert (a1.mean, a1.std, a1.n_samples) == (0.0, 0.0, 10) and a1 is b1
    one, _ = estimate_match_errors([_pairs(27, 3)])
    assert one.mean == pytest.approx(0.1) and one.std is None and one.stderr is None
    mixed, _ = estimate_match_errors([_pairs(30, 0), _pairs(29, 1), [], _pairs(28, 2)])
    assert mixed.n_samples == 3 and mixed.mean == pytest.approx(1 / 30)
    # unmatched found entities count as wrong
    assert estimate_match_errors([[(None, "land act 1924")]])[0].mean == 1.0


def test_cluster_sample():
    pairs = list(range(400))
    clusters = cluster_sample(pairs, 10, 30, seed=1)
    assert len(clusters) == 10 and all(len(c) == 30 for c in clusters)
    flat = [x for c in clusters for x in c]
    assert len(set(flat)) == 300
    assert clusters == cluster_sample(pairs, 10, 30, seed=1)
    assert cluster_sample(list(range(12)), 10, 30) != [] and len(cluster_sample(list(range(12)), 10, 30)) == 1
    assert cluster_sample([], 10, 30) == []


@pytest.mark.parametrize("s,expect", [("l987", True), ("land act l987", True), ("act 19s2", True),
                                      ("land act 1987", False), ("land act", False), ("lose", False)])
def test_numeric_typo(s, expect):
    assert is_numeric_typo(s) is expect


def _ann(n, doc_id="d", misses=()):
    ents = tuple((f"act {i} 1900", f"act {i} 1900") for i in range(n))
    return AnnotationSet(doc_id, ents, tuple(("CIT", c) for _, c in ents), misses)


def test_extraction_error_examples():
    ann = _ann(20)
    found = [s for s, _ in ann.true_entities]
    assert estimate_extraction_errors([(None, ann, found)]) == (ErrorComponent(0.0, None, 1), ErrorComponent(0.0, None, 1))
    b2, b3 = estimate_extraction_errors([(None, ann, found[1:])])
    assert (b2.mean, b3.mean) == (0.05, 0.0)
    typo = AnnotationSet("t", (("act l900", "act 0 1900"),), (), ())
    b2, b3 = estimate_extraction_errors([(None, typo, [])])
    assert (b2.mean, b3.mean) == (0.0, 1.0)


def test_annotated_cause_wins_and_spurious():
    ann = _ann(2, misses=(("act 0 1900", "typo"),))
    res = compare_document(ann, ["act 1 1900", "stray act 1850", "act 1 1900"])
    assert res.missed == [("act 0 1900", "act 0 1900", "typo")]
    assert res.spurious == ["act 1 1900", "stray act 1850"]


def test_matching_precision_recall():
    assert matching_precision_recall(["a", None, "c", "x"], ["a", "b", "c", "d"]) == (2 / 3, 0.5)
    assert matching_precision_recall([], []) == (1.0, 1.0)


def _result(title, surface):
    from leginet.corpus import MasterList

    entry = MasterList([title])[0] if title else None
    return MatchResult(surface, entry, "exact_edit" if title else "none", 0, 1.0, True)


def test_evaluate_end_to_end(tmp_path):
    ann = _ann(3)
    docs = [Document("d", "", "x act 1900", 1900, "")]
    mentions = {"d": [s for s, _ in ann.true_entities]}
    matches = {"d": [_result(c, s) for s, c in ann.true_entities[:2]] + [_result("act 9 1900", "act 2 1900")]}
    rep = evaluate(docs, {"d": ann}, mentions, matches)
    assert rep.estimates.alpha == pytest.approx(1 / 3) and rep.estimates.beta == pytest.approx(1 / 3)
    assert rep.observed_precision == pytest.approx(2 / 3) and rep.n_found == 3
    rep.to_json(tmp_path / "e.json")
    rep.to_csv(tmp_path / "e.csv")
    assert json.loads((tmp_path / "e.json").read_text())["components"]["alpha1"]["n_samples"] == 1
    lines = (tmp_path / "e.csv").read_text().splitlines()
    assert [l.split(",")[0] for l in lines] == ["measure", "mean", "std", "n"]
    assert lines[2].split(",")[1] == "NA"
    with pytest.raises(DataIntegrityError):
        evaluate(docs, {}, mentions, matches)


def test_error_component_from_samples():
    c = ErrorComponent.from_samples([0.1, 0.3])
    assert c.mean == pytest.approx(0.2) and c.std == pytest.approx(0.1414213562) and c.n_samples == 2
    with pytest.raises(ValueError):
        ErrorComponent.from_samples([])
