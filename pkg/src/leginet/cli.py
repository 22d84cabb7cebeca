"""Command line entry point: one subcommand per pipeline stage.

Every stage reads the files the previous stage wrote under ``--out``:

    canonicalize  canonical/index.tsv, canonical/docs/<doc_id>.txt
    extract       mentions.csv
    match         matches.csv, match_summary.json
    build         network/nodes.csv, network/edges.csv [network/network.gexf]
    metrics       metrics.json, metrics.csv, centrality.csv, frequent_terms.csv
    robustness    robustness/{removal,removal_long,stability,stability_long}.csv
    evaluate      evaluation.json, evaluation.csv
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .canonicalize import CanonConfig, canonicalize_text
from .corpus import Document, load_annotations, load_corpus, load_master_list
from .evaluation import evaluate
from .exceptions import ConfigError, LeginetError, MissingArtifactError
from .extract import EntityMention, RelationMention, RelationType, compile_rules, extract_entities, extract_relations
from .match import MatchConfig, MatchResult, hybrid_match, summarize
from .metrics import MEASURES, centrality, frequent_terms, metrics_report
from .network import build_network, export_network, read_network
from .robustness import (RemovalPlan, edge_deletion_experiment, node_removal_experiment, write_removal_csv,
                         write_stability_csv)
from .validation import check_dir, check_file, check_fraction, check_nonneg_int, check_years, parse_list

logger = logging.getLogger("leginet")

STAGES = ("canonicalize", "extract", "match", "build", "metrics", "robustness", "evaluate")

MENTION_COLS = ["doc_id", "start", "end", "surface", "year", "rule_id", "rtype", "event_year", "relation_rule"]
MATCH_COLS = ["doc_id", "start", "end", "surface", "rtype", "event_year", "matched_title", "node_id",
              "method", "edit_dist", "jaccard", "early_exit", "scanned"]


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors (exit 1); exit 2 is reserved for bad data
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", default="leginet_out", help="artifact directory (default: leginet_out)")
    p.add_argument("--corpus", help="directory of raw *.txt documents")
    p.add_argument("--manifest", help="optional doc_id<TAB>path<TAB>year file")
    p.add_argument("--master", help="master list of act titles, one per line")
    p.add_argument("--rules", help="rules JSON (bundled defaults when omitted)")
    p.add_argument("--canon-config", help="canonicalization JSON (bundled defaults when omitted)")
    p.add_argument("--annotations", help="annotation JSON file or directory (evaluate)")
    p.add_argument("--edit-threshold", type=int, default=5)
    p.add_argument("--jaccard-exit", type=float, default=MatchConfig.jaccard_exit)
    p.add_argument("--jaccard-floor", type=float, default=0.0)
    p.add_argument("--snapshots", default="", help="comma-separated snapshot end years, ascending")
    p.add_argument("--n-random", type=int, default=50, help="random graphs per small-world sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker threads for matching and robustness")
    p.add_argument("--gexf", action="store_true", help="also write network.gexf")
    p.add_argument("--keep-multiedges", action="store_true", help="keep repeated (src, dst, type) edges")
    p.add_argument("--fractions", default="0,0.003,0.01,0.03,0.05,0.1", help="node-removal fractions")
    p.add_argument("--removal-reps", type=int, default=20)
    p.add_argument("--levels", default="0.01,0.05,0.1,0.2", help="edge-deletion fractions")
    p.add_argument("--reps", type=int, default=100, help="edge-deletion repetitions")
    p.add_argument("--top-k", type=int, default=20, help="nodes feeding the frequent-terms list")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="leginet", description="Legislation citation network toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()
    helps = {
        "canonicalize": "normalize raw OCR text",
        "extract": "find act mentions and classify relations",
        "match": "resolve mentions against the master list",
        "build": "assemble the network node and edge lists",
        "metrics": "network measures per snapshot and centralities",
        "robustness": "node-removal and edge-deletion experiments",
        "evaluate": "error components, precision and recall from annotations",
        "pipeline": "run every stage in order",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    g = sub.add_parser("make-golden", help="write the synthetic annotated corpus", description="write the synthetic annotated corpus")
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--typo-rate", type=float, default=0.0)
    return parser


# ---------------------------------------------------------------- helpers


def _need(path: Path, stage: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(path, stage)
    return path


def _require(args, attr: str, flag: str):
    value = getattr(args, attr)
    if not value:
        raise ConfigError(f"{args.command} needs {flag}")
    return value


def _match_config(args) -> MatchConfig:
    check_nonneg_int(args.edit_threshold, "--edit-threshold")
    check_fraction(args.jaccard_floor, "--jaccard-floor", closed_top=True)
    try:
        return MatchConfig(args.edit_threshold, args.jaccard_exit, args.jaccard_floor)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _opt_int(s: str):
    return int(s) if s not in ("", None) else None


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read_csv(path: Path, header) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(header):
            raise ConfigError(f"{path}: unexpected header {reader.fieldnames}")
        return list(reader)


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load_master(args):
    return load_master_list(check_file(_require(args, "master", "--master"), "master list"))


def _read_index(out: Path) -> list[Document]:
    path = _need(out / "canonical" / "index.tsv", "canonicalize")
    docs = []
    for line in path.read_text(encoding="utf-8").splitlines()[1:]:
        doc_id, year, hint, source = line.split("\t")
        docs.append(Document(doc_id, source, hint, _opt_int(year), ""))
    return docs


def _read_mentions(out: Path):
    rows = _read_csv(_need(out / "mentions.csv", "extract"), MENTION_COLS)
    mentions, relations = {}, {}
    for r in rows:
        m = EntityMention(r["doc_id"], r["surface"], (int(r["start"]), int(r["end"])), _opt_int(r["year"]), r["rule_id"])
        mentions.setdefault(m.doc_id, []).append(m)
        if r["rtype"]:
            rel = RelationMention(m.doc_id, RelationType(r["rtype"]), m, _opt_int(r["event_year"]), r["relation_rule"])
            relations.setdefault(m.doc_id, []).append(rel)
    return mentions, relations


def _read_matches(out: Path, master):
    rows = _read_csv(_need(out / "matches.csv", "match"), MATCH_COLS)
    results = {}
    for r in rows:
        entry = None
        if r["matched_title"]:
            entry = master.find(r["matched_title"])
            if entry is None:
                raise ConfigError(f"matches.csv names {r['matched_title']!r}, which is not in the master list; "
                                  "re-run the 'match' stage with this master list")
        m = EntityMention(r["doc_id"], r["surface"], (int(r["start"]), int(r["end"])), None, "")
        results.setdefault(r["doc_id"], []).append(
            MatchResult(r["surface"], entry, r["method"], int(r["edit_dist"]), float(r["jaccard"]),
                        r["early_exit"] == "1", int(r["scanned"]), m))
    return results


# ---------------------------------------------------------------- stages


def run_canonicalize(args) -> None:
    out = Path(args.out)
    corpus = check_dir(_require(args, "corpus", "--corpus"), "corpus directory")
    cfg = CanonConfig.from_json(check_file(args.canon_config, "canonicalization config")) if args.canon_config \
        else CanonConfig.default()
    docs = load_corpus(corpus, check_file(args.manifest, "manifest") if args.manifest else None)
    rows = []
    for doc in docs:
        ct = canonicalize_text(doc, cfg)
        path = out / "canonical" / "docs" / f"{doc.doc_id}.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(ct.text + "\n", encoding="utf-8")
        rows.append("\t".join([doc.doc_id, "" if doc.year is None else str(doc.year), doc.title_hint,
                               Path(doc.source_path).relative_to(corpus).as_posix()]))
    index = out / "canonical" / "index.tsv"
    index.parent.mkdir(parents=True, exist_ok=True)
    index.write_text("\n".join(["doc_id\tyear\ttitle_hint\tsource"] + rows) + "\n", encoding="utf-8")
    logger.info("canonicalized %d documents", len(docs))


def run_extract(args) -> None:
    out = Path(args.out)
    docs = _read_index(out)
    rules = compile_rules(check_file(args.rules, "rules file") if args.rules else None)
    rows = []
    for doc in docs:
        text = _need(out / "canonical" / "docs" / f"{doc.doc_id}.txt", "canonicalize").read_text(encoding="utf-8").strip()
        mentions = extract_entities(text, doc.year, rules, doc.doc_id)
        rels = {r.target.span: r for r in extract_relations(text, mentions, rules)}
        for m in mentions:
            rel = rels.get(m.span)
            rows.append([doc.doc_id, m.span[0], m.span[1], m.surface, "" if m.year is None else m.year, m.rule_id,
                         rel.rtype.value if rel else "", "" if rel is None or rel.event_year is None else rel.event_year,
                         rel.rule_id if rel else ""])
    _write_csv(out / "mentions.csv", MENTION_COLS, rows)
    logger.info("extracted %d mentions from %d documents", len(rows), len(docs))


def run_match(args) -> None:
    out = Path(args.out)
    master = _load_master(args)
    cfg = _match_config(args)
    mentions, relations = _read_mentions(out)
    rel_by_span = {(d, r.target.span): r for d, rs in relations.items() for r in rs}
    flat = [m for d in sorted(mentions) for m in mentions[d]]

    def one(m):
        return hybrid_match(m.surface, master, cfg, mention=m)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, flat))
    else:
        results = [one(m) for m in flat]
    rows = []
    for m, r in zip(flat, results):
        rel = rel_by_span.get((m.doc_id, m.span))
        rows.append([m.doc_id, m.span[0], m.span[1], m.surface, rel.rtype.value if rel else "",
                     "" if rel is None or rel.event_year is None else rel.event_year,
                     r.title or "", "" if r.entry is None else r.entry.node_id, r.method, r.edit_dist,
                     repr(r.jaccard), int(r.early_exit), r.scanned])
    _write_csv(out / "matches.csv", MATCH_COLS, rows)
    _write_json(out / "match_summary.json", {**summarize(results), "total": len(results),
                                             "config": {"edit_threshold": cfg.edit_threshold,
                                                        "jaccard_exit": cfg.jaccard_exit,
                                                        "jaccard_floor": cfg.jaccard_floor}})


def run_build(args) -> None:
    out = Path(args.out)
    master = _load_master(args)
    docs = _read_index(out)
    _, relations = _read_mentions(out)
    matches = _read_matches(out, master)
    net = build_network(docs, matches, relations, master, keep_multiedges=args.keep_multiedges,
                        cfg=_match_config(args))
    export_network(net, out / "network", gexf=args.gexf)
    _write_json(out / "network" / "build_summary.json",
                {"nodes": net.n_nodes, "edges": net.n_edges, **{k: net.stats[k] for k in sorted(net.stats)}})


def _read_net(args):
    out = Path(args.out)
    _need(out / "network" / "nodes.csv", "build")
    _need(out / "network" / "edges.csv", "build")
    return read_network(out / "network", keep_multiedges=args.keep_multiedges)


def run_metrics(args) -> None:
    out = Path(args.out)
    net = _read_net(args)
    years = check_years(parse_list(args.snapshots, "--snapshots", int))
    report = metrics_report(net, years, n_random=check_nonneg_int(args.n_random, "--n-random"), seed=args.seed)
    report.to_json(out / "metrics.json")
    report.to_csv(out / "metrics.csv")
    g = net.to_digraph()
    cents = {m: centrality(g, m) for m in MEASURES}
    titles = net.titles()
    rows = [[int(nid), titles[int(nid)], *(repr(float(cents[m].values[i])) for m in MEASURES)]
            for i, nid in enumerate(g.labels)]
    _write_csv(out / "centrality.csv", ["node_id", "title", *MEASURES], rows)
    terms = []
    if net.n_nodes:
        k = min(args.top_k, net.n_nodes)
        for m in MEASURES:
            terms += [[m, t, c] for t, c in frequent_terms(net, cents[m], k)]
    _write_csv(out / "frequent_terms.csv", ["measure", "term", "count"], terms)


def run_robustness(args) -> None:
    out = Path(args.out) / "robustness"
    net = _read_net(args)
    fractions = [check_fraction(f, "--fractions") for f in parse_list(args.fractions, "--fractions")]
    levels = [check_fraction(f, "--levels") for f in parse_list(args.levels, "--levels")]
    points = []
    try:
        for mode in ("failure", "attack"):
            plan = RemovalPlan(mode, tuple(fractions), max(1, args.removal_reps), args.seed)
            points += node_removal_experiment(net, plan, jobs=args.jobs)
        reports = edge_deletion_experiment(net, tuple(levels), max(1, args.reps), seed=args.seed, jobs=args.jobs)
    except ValueError as exc:
        raise ConfigError(f"robustness: {exc}") from None
    out.mkdir(parents=True, exist_ok=True)
    write_removal_csv(points, out / "removal.csv", out / "removal_long.csv")
    write_stability_csv(reports, out / "stability.csv", out / "stability_long.csv")


def run_evaluate(args) -> None:
    out = Path(args.out)
    master = _load_master(args)
    ann_path = _require(args, "annotations", "--annotations")
    if not Path(ann_path).exists():
        raise ConfigError(f"annotations not found: {ann_path}")
    annotations = load_annotations(ann_path, master)
    docs = _read_index(out)
    mentions, _ = _read_mentions(out)
    matches = _read_matches(out, master)
    report = evaluate(docs, annotations, mentions, matches, seed=args.seed)
    report.to_json(out / "evaluation.json")
    report.to_csv(out / "evaluation.csv")
    est = report.estimates
    logger.info("alpha %.4f beta %.4f precision %.4f recall %.4f", est.alpha, est.beta, est.precision, est.recall)


def run_pipeline(args) -> None:
    for stage in STAGES:
        if stage == "evaluate" and not args.annotations:
            logger.info("no --annotations given; skipping evaluate")
            continue
        logger.info("stage %s", stage)
        RUNNERS[stage](args)


def run_make_golden(args) -> None:
    from .golden import write_golden

    write_golden(args.out, args.seed, check_fraction(args.typo_rate, "--typo-rate"))


RUNNERS = {
    "canonicalize": run_canonicalize,
    "extract": run_extract,
    "match": run_match,
    "build": run_build,
    "metrics": run_metrics,
    "robustness": run_robustness,
    "evaluate": run_evaluate,
    "pipeline": run_pipeline,
    "make-golden": run_make_golden,
}


def _setup_logging() -> None:
    level = os.environ.get("LEGINET_LOG", "WARNING").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ConfigError(f"LEGINET_LOG must be a logging level name, got {level!r}")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True)


def main(argv=None) -> int:
    try:
        _setup_logging()
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:  # --help or a usage error
            return exc.code if isinstance(exc.code, int) else 1
        RUNNERS[args.command](args)
    except LeginetError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
