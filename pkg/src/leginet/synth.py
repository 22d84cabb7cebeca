"""Synthetic data: act titles, OCR-style noise and scale-free digraphs."""

from __future__ import annotations

import numpy as np

from .graph import DiGraph

SUBJECTS = sorted(set("""
adoption aliens animals apprentices arbitration arms banking bankruptcy boroughs bridges broadcasting
cattle census chinese companies conciliation contracts copyright corporations council counties courts
crimes currency customs dairy defence dental designs district divorce dogs drainage duties education
electoral estate evidence explosives factories films finance fire fisheries forests gaming gift goods
government harbour health hire hospitals housing immigration income industry insurance irrigation justice
juries labour land lands licensing liquor local magistrates marks marriage married meat medical military
mining municipal native naturalisation naval noxious nurses offices partnership patents pensions pharmacy
planning poisons police post property protection public purchase railway rent reserve rivers roads sale
seamen security sheep shipping shops social stamp statistics tariff tax telegraph telephone tenancy
theatres town trade trustee wages water weeds wills women wool works
""".split()))

# character confusions typical of OCR on older typefaces
OCR_CONFUSIONS = {
    "o": "0", "0": "o", "l": "1", "1": "l", "i": "l", "e": "c", "c": "e", "n": "m", "m": "n",
    "u": "v", "v": "u", "h": "b", "t": "f", "a": "o", "s": "5", "5": "s",
}


def synthetic_titles(n: int, rng: np.random.Generator, families: bool = True,
                     year_range=(1841, 2018)) -> list[str]:
    """``n`` distinct act titles in alphabetical order.

    With ``families`` about a third of subjects recur under other years, the
    way principal acts and their amendment acts share words.
    """
    lo, hi = year_range
    out: set[str] = set()
    while len(out) < n:
        words = list(rng.choice(SUBJECTS, int(rng.choice([1, 2, 2, 3])), replace=False))
        if rng.random() < 0.25:
            words.append("amendment")
        stem = " ".join(words)
        out.add(f"{stem} act {int(rng.integers(lo, hi + 1))}")
        if families and rng.random() < 0.3:
            for _ in range(int(rng.integers(1, 3))):
                out.add(f"{stem} act {int(rng.integers(lo, hi + 1))}")
    return sorted(out)[:n]


def ocr_corrupt(text: str, rate: float, rng: np.random.Generator) -> str:
    """Apply per-character noise at ``rate``: confusion, deletion, insertion or substitution."""
    out = []
    for ch in text:
        if rng.random() >= rate:
            out.append(ch)
            continue
        op = int(rng.integers(0, 4))
        if op == 0:
            out.append(OCR_CONFUSIONS.get(ch, chr(int(rng.integers(97, 123)))))
        elif op == 2:
            out.append(ch)
            out.append(chr(int(rng.integers(97, 123))))
        elif op == 3:
            out.append(chr(int(rng.integers(97, 123))))
    return " ".join("".join(out).split())


def scale_free_digraph(n: int, m: int = 3, seed: int | None = 0) -> DiGraph:
    """Preferential-attachment graph with every edge given a random direction.

    Each new node links to ``m`` distinct existing nodes chosen proportionally
    to degree, giving about ``m * n`` arcs and a heavy-tailed total degree.
    """
    if n <= m or m < 1:
        raise ValueError("need n > m >= 1")
    rng = np.random.default_rng(seed)
    # every endpoint appended once per incident edge, so uniform draws are degree-proportional
    pool = np.empty(2 * m * n, dtype=np.int64)
    size = 0
    src, dst = [], []
    targets = list(range(m))
    for v in range(m, n):
        for t in targets:
            src.append(v)
            dst.append(t)
        pool[size : size + m] = targets
        pool[size + m : size + 2 * m] = v
        size += 2 * m
        chosen: list[int] = []
        while len(chosen) < m:
            t = int(pool[rng.integers(size)])
            if t not in chosen:
                chosen.append(t)
        targets = chosen
    src_a, dst_a = np.asarray(src), np.asarray(dst)
    flip = rng.random(src_a.size) < 0.5
    return DiGraph(n, np.where(flip, dst_a, src_a), np.where(flip, src_a, dst_a))


def ring_lattice(n: int, k: int = 2) -> DiGraph:
    """Each node points to its ``k`` clockwise neighbours: every total degree is 2k."""
    src = np.repeat(np.arange(n), k)
    dst = (src + np.tile(np.arange(1, k + 1), n)) % n
    return DiGraph(n, src, dst)


def small_world_digraph(n: int, k: int = 4, p: float = 0.05, seed: int | None = 0) -> DiGraph:
    """Ring lattice with both directions on each link, arc targets rewired with probability ``p``."""
    rng = np.random.default_rng(seed)
    src = np.repeat(np.arange(n), 2 * k)
    offs = np.tile(np.r_[np.arange(1, k + 1), -np.arange(1, k + 1)], n)
    dst = (src + offs) % n
    rewire = rng.random(dst.size) < p
    dst = np.where(rewire, rng.integers(0, n, dst.size), dst)
    return DiGraph(n, src, dst)
