from xml.etree import ElementTree

import pytest
from hypothesis import given, settings, strategies as st

from leginet.canonicalize import canonicalize_text
from leginet.corpus import Document, MasterList
from leginet.exceptions import DataIntegrityError
from leginet.extract import extract_entities, extract_relations
from leginet.match import MatchConfig, batch_match
from leginet.metrics import average_degree
from leginet.network import LegislationNetwork, build_network, export_network, read_network, snapshot_at, to_gexf

MASTER = MasterList(["companies act 1993", "land act 1948", "social security act 2018", "trade marks act 2002"])


def _build(rules, docs, master=MASTER, cfg=None, **kw):
    docs = [Document(t.replace(" ", "_"), "", t, int(t.split()[-1]) if t[-1].isdigit() else None, body)
            for t, body in docs]
    matches, relations = {}, {}
    for d in docs:
        ct = canonicalize_text(d)
        ms = extract_entities(ct, d.year, rules, d.doc_id)
        matches[d.doc_id] = batch_match(ms, master, cfg)
        relations[d.doc_id] = extract_relations(ct, ms, rules)
    return build_network(docs, matches, relations, master, cfg=cfg, **kw)


def test_single_citation(rules):
    net = _build(rules, [("trade marks act 2002", "Within the meaning of section 5 of the Companies Act 1993.")])
    assert net.n_nodes == 2
    [e] = net.edges
    ids = {n.title: n.node_id for n in net.nodes}
    assert (e.src, e.dst, e.rtype.value, e.ts) == (ids["trade marks act 2002"], ids["companies act 1993"], "CIT", 2002)


def test_self_citation_dropped(rules):
    net = _build(rules, [("trade marks act 2002", "For the purposes of the Trade Marks Act 2002, this applies.")])
    assert (net.n_nodes, net.n_edges) == (1, 0)
    assert net.stats["self_loops"] == 1


def test_two_documents_citing_one_act(rules):
    body = "Within the meaning of section 5 of the Companies Act 1993."
    net = _build(rules, [("trade marks act 2002", body), ("social security act 2018", body)])
    assert (net.n_nodes, net.n_edges) == (3, 2)
    assert average_degree(net) == pytest.approx(2 / 3)


def test_amendment_edge_dated_by_event(rules):
    net = _build(rules, [("companies act 1993", "Section 4: amended, by section 3 of the Trade Marks Act 2002.")])
    [e] = net.edges
    assert (e.rtype.value, e.ts) == ("AMD", 2002)


def test_unresolvable_document_skipped(rules, caplog):
    net = _build(rules, [("zzz qqq", "Within the meaning of section 5 of the Companies Act 1993.")],
                 master=MasterList(["companies act 1993"]))
    assert net.stats["skipped_docs"] == 1 and net.n_nodes == 0
    assert "zzz" in caplog.text


def test_unmatched_mentions_counted(rules):
    # with a zero floor the shared token "act" alone would be enough to match
    net = _build(rules, [("trade marks act 2002", "Within the meaning of section 5 of the Zzyzx Qwop Act 1901.")],
                 master=MasterList(["trade marks act 2002"]), cfg=MatchConfig(jaccard_floor=0.3))
    assert net.stats["unmatched"] == 1 and net.n_edges == 0


def _net(node_years, edges, multi=False):
    net = LegislationNetwork(multi)
    for i, y in enumerate(node_years):
        net.add_node(i, f"act {i} {y}", y)
    for s, d, t, ts in edges:
        net.add_edge(s, d, t, ts)
    return net


def test_dedup_and_multiedges():
    edges = [(1, 0, "CIT", 1870), (1, 0, "CIT", 1865), (1, 0, "AMD", 1880)]
    net = _net([1850, 1860], edges)
    assert [(e.rtype.value, e.ts) for e in net.edges] == [("AMD", 1880), ("CIT", 1865)]
    assert _net([1850, 1860], edges, multi=True).n_edges == 3


def test_edge_validation():
    net = _net([1850, 1860], [])
    with pytest.raises(DataIntegrityError):
        net.add_edge(0, 7, "CIT", 1900)
    with pytest.raises(DataIntegrityError):
        net.add_edge(0, 1, "CIT", 2200)
    with pytest.raises(ValueError):
        net.add_edge(0, 1, "TIT", 1900)


def test_snapshot_examples():
    net = _net([1850, 1860], [(1, 0, "CIT", 1860)])
    s = snapshot_at(net, 1855)
    assert (s.n_nodes, s.n_edges) == (1, 0)
    assert snapshot_at(net, 1800).n_nodes == 0
    full = net.snapshot(1860)
    assert (full.n_nodes, full.n_edges) == (2, 1)
    with pytest.raises(ValueError):
        snapshot_at(net, 1100)


def test_undated_nodes_left_out_of_snapshots():
    net = _net([1850], [])
    net.add_node(9, "mystery act", None)
    assert net.snapshot(2000).n_nodes == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1800, 2000), min_size=1, max_size=12), st.data())
def test_snapshots_monotone_and_nested(years, data):
    n = len(years)
    pairs = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1800, 2020)),
                               max_size=30))
    net = _net(years, [(s, d, "CIT", ts) for s, d, ts in pairs if s != d])
    prev_nodes = prev_edges = set()
    for y in range(1790, 2030, 15):
        snap = net.snapshot(y)
        nodes = {x.node_id for x in snap.network.nodes}
        edges = {(e.src, e.dst, e.rtype) for e in snap.network.edges}
        assert prev_nodes <= nodes and prev_edges <= edges
        assert all(e.src in nodes and e.dst in nodes for e in snap.network.edges)
        prev_nodes, prev_edges = nodes, edges


def test_export_roundtrip_and_bytes(tmp_path):
    net = _net([1850, 1860, 1900], [(1, 0, "CIT", 1860), (2, 1, "AMD", 1905)])
    net.add_node(3, 'the "quoted", act 1901', 1901)
    export_network(net, tmp_path / "a", gexf=True)
    export_network(net, tmp_path / "b", gexf=True)
    for name in ("nodes.csv", "edges.csv", "network.gexf"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    lines = (tmp_path / "a" / "nodes.csv").read_text().splitlines()
    assert lines[0] == "node_id,title,year" and lines[1] == '0,"act 0 1850",1850' and len(lines) == 5
    back = read_network(tmp_path / "a")
    assert back.nodes == net.nodes and back.edges == net.edges
    node_ids = {n.node_id for n in back.nodes}
    assert all(e.src in node_ids and e.dst in node_ids for e in back.edges)


def test_empty_export_has_headers(tmp_path):
    export_network(LegislationNetwork(), tmp_path)
    assert (tmp_path / "nodes.csv").read_text() == "node_id,title,year\n"
    assert (tmp_path / "edges.csv").read_text() == "src,dst,type,ts\n"


def test_gexf_is_well_formed():
    net = _net([1850, 1860], [(1, 0, "CIT", 1860)])
    root = ElementTree.fromstring(to_gexf(net))
    ns = {"g": "http://gexf.net/1.3"}
    assert len(root.findall(".//g:node", ns)) == 2
    [edge] = root.findall(".//g:edge", ns)
    assert (edge.get("source"), edge.get("target"), edge.get("start")) == ("1", "0", "1860")


def test_bad_header_rejected(tmp_path):
    (tmp_path / "nodes.csv").write_text("id,name\n")
    (tmp_path / "edges.csv").write_text("src,dst,type,ts\n")
    with pytest.raises(DataIntegrityError):
        read_network(tmp_path)


def test_digraph_view():
    net = _net([1850, 1860], [(1, 0, "CIT", 1860), (1, 0, "AMD", 1870)])
    g = net.to_digraph()
    assert g.n_edges == 1 and list(g.labels) == [0, 1]
    assert net.out_adjacency() == {0: [], 1: [0, 0]} and net.in_adjacency()[0] == [1, 1]
