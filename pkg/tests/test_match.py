import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from leginet.corpus import MasterList
from leginet.match import (HybridMatcher, MatchConfig, batch_match, edit_distance, edit_only_match, hybrid_match,
                           jaccard_only_match, jaccard_similarity, summarize)
from leginet.synth import ocr_corrupt, synthetic_titles


def dp_levenshtein(a, b):
    # textbook full-table oracle
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[-1][-1]


@pytest.mark.parametrize("a,b,d", [("abc", "abc", 0), ("kitten", "sitting", 3), ("", "act", 3), ("act", "", 3)])
def test_edit_distance_examples(a, b, d):
    assert edit_distance(a, b) == d


def test_edit_distance_against_dp_oracle():
    rng = np.random.default_rng(7)
    alphabet = list("abcde ")
    for _ in range(10_000):
        a = "".join(rng.choice(alphabet, int(rng.integers(0, 13))))
        b = "".join(rng.choice(alphabet, int(rng.integers(0, 13))))
        assert edit_distance(a, b) == dp_levenshtein(a, b), (a, b)


_short = st.text(alphabet="abcxyz 19", max_size=40)


@settings(max_examples=200, deadline=None)
@given(_short, _short, _short)
def test_edit_distance_is_metric(a, b, c):
    assert edit_distance(a, b) == edit_distance(b, a)
    assert (edit_distance(a, b) == 0) == (a == b)
    assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)


@pytest.mark.parametrize("a,b,j", [
    ("trade marks act 2002", "trade marks act 2002", 1.0),
    ("trade marks act 2002", "trade marks amendment act 2005", 0.5),
    ("a b", "c d", 0.0),
    ("", "", 1.0),
])
def test_jaccard_examples(a, b, j):
    assert jaccard_similarity(a, b) == j


@settings(max_examples=200, deadline=None)
@given(_short, _short)
def test_jaccard_properties(a, b):
    j = jaccard_similarity(a, b)
    assert j == jaccard_similarity(b, a) and 0.0 <= j <= 1.0
    assert (j == 1.0) == (set(a.split()) == set(b.split()))


def test_worked_example(golden_master):
    r = hybrid_match("married vomens propertyprotectio act 1860", golden_master)
    assert r.title == "married women property protection act 1860" and r.method == "exact_edit"


def test_exact_title_exits_early(golden_master):
    r = hybrid_match("land act 1924", golden_master)
    assert (r.title, r.edit_dist, r.early_exit, r.method) == ("land act 1924", 0, True, "exact_edit")
    assert r.scanned == golden_master.titles.index("land act 1924") + 1


def test_nothing_in_common():
    r = hybrid_match("zzz qqq", MasterList(["trade marks act 2002"]), MatchConfig(jaccard_floor=0.0))
    assert r.method == "none" and r.entry is None and r.jaccard == 0.0 and r.edit_dist > 5


def test_empty_master():
    r = hybrid_match("land act 1924", MasterList())
    assert r.method == "none" and r.entry is None


def test_jaccard_fallback(small_master):
    r = hybrid_match("the trade marks act", small_master)
    assert r.method == "jaccard" and r.title.startswith("trade marks")


def test_sibling_titles_not_confused(small_master):
    assert hybrid_match("trade marks amendment act 2011", small_master).title == "trade marks amendment act 2011"


def test_config_validation():
    with pytest.raises(ValueError):
        MatchConfig(edit_threshold=-1)
    with pytest.raises(ValueError):
        MatchConfig(jaccard_floor=1.5)
    with pytest.raises(ValueError):
        MatchConfig(jaccard_exit=0.2, jaccard_floor=0.3)
    MatchConfig(jaccard_exit=1.01)  # full-scan sentinel


def brute_force(surface, titles, cfg):
    # independent full scan, first index on ties; edit_distance itself is pinned to the DP oracle above
    eds = [edit_distance(surface, t) for t in titles]
    js = [jaccard_similarity(surface, t) for t in titles]
    i2 = min(range(len(titles)), key=lambda i: (eds[i], i))
    i1 = max(range(len(titles)), key=lambda i: (js[i], -i))
    if eds[i2] <= cfg.edit_threshold:
        return titles[i2], "exact_edit"
    if js[i1] > cfg.jaccard_floor:
        return titles[i1], "jaccard"
    return None, "none"


@pytest.mark.parametrize("floor", [0.0, 0.3])
def test_full_scan_equals_brute_force(floor):
    rng = np.random.default_rng(3)
    titles = synthetic_titles(250, rng)
    master = MasterList(titles)
    cfg = MatchConfig(jaccard_exit=1.01, jaccard_floor=floor)
    for i in range(60):
        q = ocr_corrupt(titles[int(rng.integers(len(titles)))], 0.15, rng) if i % 3 else "zzz " + titles[i]
        r = hybrid_match(q, master, cfg)
        assert (r.title, r.method) == brute_force(q, master.titles, cfg), q
        assert not r.early_exit or q in master.titles


def test_early_exit_soundness():
    rng = np.random.default_rng(11)
    titles = synthetic_titles(200, rng)
    master = MasterList(titles)
    for t in titles[::7]:
        r = hybrid_match(t, master)
        assert r.early_exit and r.edit_dist == 0 and r.title == t


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["land", "act", "trade", "marks", "1908", "2002", "lnad", "acts"]), max_size=6))
def test_result_invariants(words):
    master = MasterList(["land act 1908", "trade marks act 2002", "land transfer act 1908"])
    q = " ".join(words)
    r = hybrid_match(q, master)
    assert r == hybrid_match(q, master)
    assert r.edit_dist >= 0 and 0.0 <= r.jaccard <= 1.0
    if r.method == "none":
        assert r.entry is None
    if r.method == "exact_edit":
        assert r.edit_dist <= 5


def test_batch_match_summary(small_master):
    res = batch_match(["companies act 1993", "trade marks act 2002", "zzz qqq"], small_master)
    assert [r.method for r in res] == ["exact_edit", "exact_edit", "none"]
    assert summarize(res) == {"exact_edit": 2, "jaccard": 0, "none": 1, "matched": 2, "unmatched": 1}
    assert batch_match([], small_master) == []
    a, b = batch_match(["companies act 1993", "companies act 1993"], small_master)
    assert a == b


def test_baselines(small_master):
    assert edit_only_match("trade marks act 2002", small_master).title == "trade marks act 2002"
    assert edit_only_match("the trade marks act", small_master).method == "none"
    assert jaccard_only_match("zzz", small_master).method == "none"


def test_hybrid_matcher_estimator(small_master):
    m = HybridMatcher().fit(small_master.titles)
    assert m.predict(["trade marks act 2002", "zzz qqq"]) == ["trade marks act 2002", None]
    assert m.score(["trade marks act 2002"], ["trade marks act 2002"]) == 1.0
    assert m.get_params()["jaccard_exit"] == 1.0
