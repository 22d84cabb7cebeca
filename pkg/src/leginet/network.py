"""Typed, timestamped citation network assembled from matched mentions."""

from __future__ import annotations

import csv
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .corpus import YEAR_MAX, YEAR_MIN, canonical_title
from .exceptions import ConfigError, DataIntegrityError
from .extract import RelationType
from .graph import DiGraph
from .match import MatchConfig, hybrid_match

logger = logging.getLogger(__name__)

NODE_HEADER = ("node_id", "title", "year")
EDGE_HEADER = ("src", "dst", "type", "ts")


@dataclass(frozen=True, order=True)
class NodeRecord:
    node_id: int
    title: str
    year: int | None = None


@dataclass(frozen=True, order=True)
class EdgeRecord:
    src: int
    dst: int
    rtype: RelationType
    ts: int


class LegislationNetwork:
    """Directed multigraph of acts with typed, dated edges.

    Edges are unique on (src, dst, rtype) unless ``keep_multiedges`` is set;
    a repeated edge keeps its earliest timestamp. Self-loops are never stored.
    """

    def __init__(self, keep_multiedges: bool = False):
        self.keep_multiedges = keep_multiedges
        self._nodes: dict[int, NodeRecord] = {}
        self._edges: dict[tuple, EdgeRecord] = {}
        self._multi: list[EdgeRecord] = []
        self.stats: Counter = Counter()

    def __repr__(self):
        return f"LegislationNetwork(n_nodes={self.n_nodes}, n_edges={self.n_edges})"

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    @property
    def n_edges(self) -> int:
        return len(self._multi) if self.keep_multiedges else len(self._edges)

    @property
    def nodes(self) -> list[NodeRecord]:
        return [self._nodes[k] for k in sorted(self._nodes)]

    @property
    def edges(self) -> list[EdgeRecord]:
        items = self._multi if self.keep_multiedges else self._edges.values()
        return sorted(items, key=lambda e: (e.src, e.dst, e.rtype.value, e.ts))

    def add_node(self, node_id: int, title: str, year: int | None = None) -> NodeRecord:
        node = self._nodes.get(node_id)
        if node is None:
            node = self._nodes[node_id] = NodeRecord(int(node_id), title, year)
        elif node.year is None and year is not None:
            node = self._nodes[node_id] = NodeRecord(node.node_id, node.title, year)
        return node

    def add_edge(self, src: int, dst: int, rtype, ts: int) -> bool:
        """Insert an edge; returns False for self-loops."""
        rtype = RelationType(rtype)
        if rtype is RelationType.TIT:
            raise ValueError("TIT relations identify nodes and are not stored as edges")
        if src not in self._nodes or dst not in self._nodes:
            raise DataIntegrityError(f"edge {src}->{dst} references an unknown node")
        if not YEAR_MIN <= ts <= YEAR_MAX:
            raise DataIntegrityError(f"edge {src}->{dst} has timestamp {ts} outside [{YEAR_MIN}, {YEAR_MAX}]")
        if src == dst:
            self.stats["self_loops"] += 1
            return False
        edge = EdgeRecord(int(src), int(dst), rtype, int(ts))
        self._multi.append(edge)
        key = (edge.src, edge.dst, rtype)
        old = self._edges.get(key)
        if old is None or ts < old.ts:
            self._edges[key] = edge
        return True

    def out_adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {k: [] for k in sorted(self._nodes)}
        for e in self.edges:
            adj[e.src].append(e.dst)
        return adj

    def in_adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {k: [] for k in sorted(self._nodes)}
        for e in self.edges:
            adj[e.dst].append(e.src)
        return adj

    def titles(self) -> dict[int, str]:
        return {k: n.title for k, n in self._nodes.items()}

    def to_digraph(self) -> DiGraph:
        """Simple digraph over node ids in ascending order; edge types collapse."""
        ids = sorted(self._nodes)
        pos = {k: i for i, k in enumerate(ids)}
        edges = self.edges
        src = np.fromiter((pos[e.src] for e in edges), dtype=np.int64, count=len(edges))
        dst = np.fromiter((pos[e.dst] for e in edges), dtype=np.int64, count=len(edges))
        return DiGraph(len(ids), src, dst, np.asarray(ids, dtype=np.int64))

    def snapshot(self, end_year: int) -> "Snapshot":
        return snapshot_at(self, end_year)


@dataclass
class Snapshot:
    end_year: int
    network: LegislationNetwork = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.network.n_nodes

    @property
    def n_edges(self) -> int:
        return self.network.n_edges

    def to_digraph(self) -> DiGraph:
        return self.network.to_digraph()

    def titles(self) -> dict[int, str]:
        return self.network.titles()

    def snapshot(self, end_year: int) -> "Snapshot":
        return snapshot_at(self.network, min(end_year, self.end_year))


def snapshot_at(net: LegislationNetwork, end_year: int) -> Snapshot:
    """Nodes dated no later than ``end_year`` and edges among them dated likewise.

    Nodes without a year cannot be placed in time and are left out.
    """
    if end_year < YEAR_MIN:
        raise ValueError(f"end_year must be >= {YEAR_MIN}")
    sub = LegislationNetwork(net.keep_multiedges)
    for node in net.nodes:
        if node.year is not None and node.year <= end_year:
            sub.add_node(node.node_id, node.title, node.year)
    items = net._multi if net.keep_multiedges else net.edges
    for e in items:
        if e.ts <= end_year and e.src in sub._nodes and e.dst in sub._nodes:
            sub.add_edge(e.src, e.dst, e.rtype, e.ts)
    return Snapshot(end_year, sub)


def _resolve_source(doc, tit_entry, master, cfg):
    hint = canonical_title(doc.title_hint or "")
    entry = master.find(hint) if hint else None
    if entry is None:
        entry = tit_entry
    if entry is None and hint:
        entry = hybrid_match(hint, master, cfg).entry
    return entry


def build_network(docs, match_results, relations, master, keep_multiedges: bool = False,
                  cfg: MatchConfig | None = None) -> LegislationNetwork:
    """Fold per-document results into one network.

    ``match_results`` and ``relations`` map doc_id to lists; a relation is
    tied to its match through the mention span. The source node comes from
    the document's file title when that names a master entry exactly, then
    from its TIT relation, then from approximate matching of the file title.
    """
    net = LegislationNetwork(keep_multiedges)
    by_span = {}
    for doc_id, results in match_results.items():
        for r in results:
            if r.entry is not None and master.find(r.entry.canonical_title) is None:
                raise DataIntegrityError(f"match for {r.surface!r} references an entry outside the master list")
            if r.mention is not None:
                by_span[(doc_id, tuple(r.mention.span))] = r
    for doc in docs:
        rels = relations.get(doc.doc_id, [])
        matched = []
        tit_entry = None
        for rel in rels:
            r = by_span.get((doc.doc_id, tuple(rel.target.span)))
            if r is None or r.entry is None:
                net.stats["unmatched"] += 1
                continue
            if rel.rtype is RelationType.TIT:
                tit_entry = tit_entry or r.entry
            else:
                matched.append((rel, r.entry))
        src = _resolve_source(doc, tit_entry, master, cfg)
        if src is None:
            logger.warning("skipping %s: document title resolves to no master entry", doc.doc_id)
            net.stats["skipped_docs"] += 1
            continue
        src_year = src.year if src.year is not None else doc.year
        net.add_node(src.node_id, src.canonical_title, src_year)
        for rel, entry in matched:
            ts = rel.event_year if rel.event_year is not None else (doc.year or src_year)
            if ts is None:
                net.stats["undated"] += 1
                continue
            net.add_node(entry.node_id, entry.canonical_title, entry.year)
            net.add_edge(src.node_id, entry.node_id, rel.rtype, ts)
    logger.info("built network with %d nodes and %d edges (%d unmatched mentions, %d skipped documents)",
                net.n_nodes, net.n_edges, net.stats["unmatched"], net.stats["skipped_docs"])
    return net


def _open(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def _unwrap(net):
    return net.network if isinstance(net, Snapshot) else net


def export_network(net, out_dir, gexf: bool = False) -> list[Path]:
    """Write nodes.csv and edges.csv (plus network.gexf) into ``out_dir``."""
    net = _unwrap(net)
    out_dir = Path(out_dir)
    nodes_path, edges_path = out_dir / "nodes.csv", out_dir / "edges.csv"
    with _open(nodes_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NODE_HEADER)
        for n in net.nodes:
            fh.write(f'{n.node_id},{_quote(n.title)},{"" if n.year is None else n.year}\n')
    with _open(edges_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EDGE_HEADER)
        for e in net.edges:
            w.writerow((e.src, e.dst, e.rtype.value, e.ts))
    written = [nodes_path, edges_path]
    if gexf:
        path = out_dir / "network.gexf"
        with _open(path) as fh:
            fh.write(to_gexf(net))
        written.append(path)
    return written


def _quote(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def to_gexf(net) -> str:
    """GEXF 1.3 document with node years and edge timestamps as dynamic starts."""
    net = _unwrap(net)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<gexf xmlns="http://gexf.net/1.3" version="1.3">',
        '  <graph mode="dynamic" defaultedgetype="directed" timeformat="integer">',
        '    <attributes class="node">',
        '      <attribute id="0" title="year" type="integer"/>',
        "    </attributes>",
        '    <attributes class="edge">',
        '      <attribute id="0" title="type" type="string"/>',
        '      <attribute id="1" title="ts" type="integer"/>',
        "    </attributes>",
        "    <nodes>",
    ]
    for n in net.nodes:
        start = "" if n.year is None else f' start="{n.year}"'
        lines.append(f'      <node id="{n.node_id}" label={quoteattr(n.title)}{start}>')
        if n.year is not None:
            lines.append(f'        <attvalues><attvalue for="0" value="{n.year}"/></attvalues>')
        lines.append("      </node>")
    lines.append("    </nodes>")
    lines.append("    <edges>")
    for i, e in enumerate(net.edges):
        lines.append(f'      <edge id="{i}" source="{e.src}" target="{e.dst}" start="{e.ts}">')
        lines.append(f'        <attvalues><attvalue for="0" value="{escape(e.rtype.value)}"/>'
                     f'<attvalue for="1" value="{e.ts}"/></attvalues>')
        lines.append("      </edge>")
    lines += ["    </edges>", "  </graph>", "</gexf>", ""]
    return "\n".join(lines)


def read_network(directory, keep_multiedges: bool = False) -> LegislationNetwork:
    """Load nodes.csv and edges.csv as written by :func:`export_network`."""
    directory = Path(directory)
    net = LegislationNetwork(keep_multiedges)
    try:
        with open(directory / "nodes.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or tuple(rows[0]) != NODE_HEADER:
            raise DataIntegrityError(f"{directory / 'nodes.csv'}: bad header")
        for row in rows[1:]:
            net.add_node(int(row[0]), row[1], int(row[2]) if row[2] else None)
        with open(directory / "edges.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or tuple(rows[0]) != EDGE_HEADER:
            raise DataIntegrityError(f"{directory / 'edges.csv'}: bad header")
        for row in rows[1:]:
            net.add_edge(int(row[0]), int(row[1]), row[2], int(row[3]))
    except OSError as exc:
        raise ConfigError(f"cannot read network files in {directory}: {exc}") from exc
    except (ValueError, IndexError) as exc:
        raise DataIntegrityError(f"malformed network files in {directory}: {exc}") from exc
    return net
