"""Command-line pipeline: ``ingest``, ``kg``, ``recommend``, ``evaluate``.

Configuration is a flat ``key = value`` file; relative paths in it are
resolved against the file's directory.  Command-line flags override file
values.  Exit status: 0 success, 1 usage/config error, 2 data/schema error,
3 internal error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from collections import Counter
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from . import corpus, embed, evaluation, kg, ranker, sentiment, textprep
from .errors import DataError, KgRecError, ParameterError

log = logging.getLogger("kgrec")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
REPORT_FORMAT = "kgrec-recommendation/1"

_PATH_KEYS = ("corpus_path", "master_nodes", "master_edges", "slave_nodes", "slave_edges",
              "alias_path", "stopword_path", "sentiment_corpus_path", "output_dir")
_LIST_KEYS = ("target_tech_ids", "exclude_tech_ids")
_EMBED_KEYS = tuple(f.name for f in fields(embed.EmbedParams))


class ConfigError(ParameterError):
    pass


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        self.stage = stage
        self.exc = exc
        super().__init__(f"{stage}: {type(exc).__name__}: {exc}")


@contextmanager
def stage(name: str):
    try:
        yield
    except KgRecError as exc:
        raise StageError(name, exc) from exc


@dataclass
class PipelineConfig:
    corpus_path: Optional[Path] = None
    master_nodes: Optional[Path] = None
    master_edges: Optional[Path] = None
    slave_nodes: Optional[Path] = None
    slave_edges: Optional[Path] = None
    alias_path: Optional[Path] = None
    stopword_path: Optional[Path] = None
    sentiment_corpus_path: Optional[Path] = None
    challenge_id: Optional[str] = None
    target_tech_ids: list[str] = field(default_factory=list)
    exclude_tech_ids: list[str] = field(default_factory=list)
    embed: embed.EmbedParams = field(default_factory=embed.EmbedParams)
    k: int = ranker.DEFAULT_K
    n: int = ranker.DEFAULT_N
    alpha: float = 1.0
    run_id: str = "run"
    output_dir: Path = Path("out")

    @property
    def seed(self) -> int:
        return self.embed.seed

    def require(self, *keys: str) -> None:
        for key in keys:
            value = getattr(self, key)
            if value in (None, "", []):
                raise ConfigError(f"missing config key {key!r}")
            if key in _PATH_KEYS and key != "output_dir" and not Path(value).exists():
                raise ConfigError(f"{key}: file not found: {value}")
        if self.k < self.n:
            raise ConfigError(f"k ({self.k}) must be >= n ({self.n})")


def _split_list(value: str) -> list[str]:
    return [v.strip() for v in value.replace(";", ",").split(",") if v.strip()]


def build_config(values: dict[str, str], base_dir: Path = Path(".")) -> PipelineConfig:
    """Turn raw string key/values into a validated :class:`PipelineConfig`."""
    cfg = PipelineConfig()
    embed_kwargs = {}
    known = {f.name for f in fields(PipelineConfig)} | set(_EMBED_KEYS) | {"seed"}
    for key, raw in values.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        raw = raw.strip()
        try:
            if key in _EMBED_KEYS:
                ftype = type(getattr(embed.EmbedParams(), key))
                embed_kwargs[key] = ftype(raw)
            elif key in _PATH_KEYS:
                path = Path(raw).expanduser()
                setattr(cfg, key, path if path.is_absolute() else base_dir / path)
            elif key in _LIST_KEYS:
                setattr(cfg, key, _split_list(raw))
            elif key in ("k", "n"):
                setattr(cfg, key, int(raw))
            elif key == "alpha":
                cfg.alpha = float(raw)
            else:
                setattr(cfg, key, raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    cfg.embed = embed.EmbedParams(**embed_kwargs)
    return cfg


def read_config_file(path: Path) -> dict[str, str]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[kgrec]\n" + path.read_text(encoding="utf-8"), source=str(path))
    except (configparser.Error, OSError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return dict(parser["kgrec"])


def _load_graphs(cfg: PipelineConfig) -> dict[str, kg.Graph]:
    graphs = {}
    aliases = kg.load_aliases(cfg.alias_path) if cfg.alias_path else None
    for role, nodes, edges in (("master", cfg.master_nodes, cfg.master_edges),
                               ("slave", cfg.slave_nodes, cfg.slave_edges)):
        if nodes is None and edges is None:
            continue
        if nodes is None or edges is None:
            raise ConfigError(f"{role} graph needs both nodes and edges files")
        graph = kg.import_graph(nodes, edges, role)
        graphs[role] = kg.align_entities(graph, aliases=aliases).freeze()
    return graphs


def _lookup_view(graphs: dict[str, kg.Graph]) -> kg.Graph:
    view = kg.Graph()
    for graph in graphs.values():
        for node in graph.nodes.values():
            view.add_node(node)
        view.edges.extend(graph.edges)
    return view.freeze()


def cmd_ingest(cfg: PipelineConfig, out=None) -> dict:
    out = out or sys.stdout
    cfg.require("corpus_path")
    with stage("corpus"):
        papers = corpus.load_papers(cfg.corpus_path)
    counts = Counter(p.source_db.value for p in papers)
    summary = {"papers": len(papers), "by_source_db": dict(sorted(counts.items())),
               "labeled": sum(p.relevant is not None for p in papers)}
    print(f"{len(papers)} papers loaded from {cfg.corpus_path}", file=out)
    for db, count in summary["by_source_db"].items():
        print(f"  {db:<15} {count}", file=out)
    return summary


def cmd_kg(cfg: PipelineConfig, out=None) -> dict:
    out = out or sys.stdout
    cfg.require("master_nodes", "master_edges")
    with stage("kg"):
        graphs = _load_graphs(cfg)
    summary = {}
    for role, graph in graphs.items():
        summary[role] = {"nodes": len(graph.nodes), "edges": len(graph.edges),
                         "labels": graph.label_counts(), "relations": graph.relation_counts()}
        print(f"{role}: {len(graph.nodes)} nodes, {len(graph.edges)} edges", file=out)
        for label, count in summary[role]["labels"].items():
            print(f"  {label:<12} {count}", file=out)
    return summary


def run_recommendation(cfg: PipelineConfig) -> dict:
    """Run the full pipeline and return the report as a JSON-ready dict."""
    cfg.require("corpus_path", "master_nodes", "master_edges", "challenge_id",
                "target_tech_ids", "exclude_tech_ids")
    with stage("textprep"):
        stoplist = textprep.load_stoplist(cfg.stopword_path)
    with stage("corpus"):
        papers = corpus.load_papers(cfg.corpus_path)
        splits = [corpus.split_abstract(p) for p in papers]
    if not papers:
        raise StageError("corpus", DataError("corpus has no papers"))
    with stage("textprep"):
        docs = []
        for s in splits:
            docs.append(textprep.preprocess(f"{s.paper_id}#p1", "p1", s.p1_text, stoplist))
            docs.append(textprep.preprocess(f"{s.paper_id}#p2", "p2", s.p2_text, stoplist))
    with stage("embed"):
        model = embed.train_pvdm(docs, cfg.embed)
    with stage("kg"):
        view = _lookup_view(_load_graphs(cfg))
        target = kg.compose_target_text(view, cfg.challenge_id, cfg.target_tech_ids)
        exclude = kg.compose_exclude_text(view, cfg.exclude_tech_ids)
    with stage("embed"):
        t_target = embed.infer_vector(
            model, textprep.preprocess("target", "target_text", target.text, stoplist).tokens)
        t_exclude = embed.infer_vector(
            model, textprep.preprocess("exclude", "exclude_text", exclude.text, stoplist).tokens)
    with stage("sentiment"):
        sent = sentiment.train_nb(
            sentiment.load_sentiment_corpus(cfg.sentiment_corpus_path, stoplist), cfg.alpha)
    with stage("ranker"):
        scores = [ranker.score_paper(model, sent, s, t_target, t_exclude, stoplist) for s in splits]
        ranked = ranker.rank(scores, cfg.k, cfg.n)
    titles = {p.id: p.title for p in papers}
    return {
        "format": REPORT_FORMAT,
        "run_id": cfg.run_id,
        "seed": cfg.seed,
        "k": cfg.k,
        "n": cfg.n,
        "embed_params": asdict(cfg.embed),
        "target": {"text": target.text, "source_node_ids": list(target.source_node_ids)},
        "exclude": {"text": exclude.text, "source_node_ids": list(exclude.source_node_ids)},
        "scores": [s.as_dict() for s in scores],
        "round1": list(ranked.round1),
        "round2": list(ranked.round2),
        "top5": list(ranked.top5),
        "titles": {pid: titles[pid] for pid in ranked.top5},
    }


def format_top_table(report: dict) -> str:
    by_id = {s["paper_id"]: s for s in report["scores"]}
    lines = [f"{'rank':>4}  {'paper_id':<12} {'sim_target':>10} {'sim_exclude':>11}  title"]
    for i, pid in enumerate(report["top5"], start=1):
        s = by_id[pid]
        lines.append(f"{i:>4}  {pid:<12} {s['sim_target']:>10.4f} {s['sim_exclude']:>11.4f}  "
                     f"{report['titles'][pid]}")
    return "\n".join(lines)


def _dump(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                    encoding="utf-8")


def cmd_recommend(cfg: PipelineConfig, out=None) -> Path:
    out = out or sys.stdout
    report = run_recommendation(cfg)
    path = Path(cfg.output_dir) / "recommendation.json"
    _dump(report, path)
    print(format_top_table(report), file=out)
    return path


def cmd_evaluate(cfg: PipelineConfig, report_paths, out=None) -> evaluation.EvalReport:
    out = out or sys.stdout
    cfg.require("corpus_path")
    if not report_paths:
        raise ConfigError("evaluate needs at least one recommendation report")
    with stage("corpus"):
        papers = corpus.load_papers(cfg.corpus_path)
    relevant = {p.id for p in papers if p.relevant}
    reports = []
    for path in report_paths:
        try:
            reports.append(json.loads(Path(path).read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read report {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise StageError("eval", DataError(f"{path}: {exc}")) from exc
    with stage("eval"):
        report = evaluation.aggregate(evaluation.runs_from_reports(reports, relevant))
    _dump(report.as_dict(), Path(cfg.output_dir) / "evaluation.json")
    print(report.table(), file=out)
    return report


def _parser() -> argparse.ArgumentParser:
    class Parser(argparse.ArgumentParser):
        def error(self, message):
            self.print_usage(sys.stderr)
            self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")

    common = Parser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value config file")
    common.add_argument("--seed", type=int, help="top-level RNG seed")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--k", type=int, help="round-one cutoff")
    common.add_argument("--n", type=int, help="number of recommended papers")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = Parser(prog="kgrec", parents=[common],
                    description="Knowledge-graph-driven paper recommendation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)
    sub.add_parser("ingest", parents=[common], help="load and validate the paper corpus")
    sub.add_parser("kg", parents=[common], help="import and align the knowledge graphs")
    sub.add_parser("recommend", parents=[common], help="run the recommendation pipeline")
    ev = sub.add_parser("evaluate", parents=[common], help="score recommendation reports")
    ev.add_argument("reports", nargs="+", type=Path)
    return parser


def _resolve_config(args) -> PipelineConfig:
    values: dict[str, str] = {}
    base = Path(".")
    if args.config is not None:
        values.update(read_config_file(args.config))
        base = args.config.parent
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = value
    if args.seed is not None:
        values["seed"] = str(args.seed)
    if args.k is not None:
        values["k"] = str(args.k)
    if args.n is not None:
        values["n"] = str(args.n)
    cfg = build_config(values, base)
    if args.out is not None:
        cfg.output_dir = args.out
    return cfg


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve_config(args)
        if args.command == "ingest":
            cmd_ingest(cfg)
        elif args.command == "kg":
            cmd_kg(cfg)
        elif args.command == "recommend":
            cmd_recommend(cfg)
        else:
            cmd_evaluate(cfg, args.reports)
    except StageError as err:
        code = EXIT_USAGE if isinstance(err.exc, ParameterError) else EXIT_DATA
        print(f"kgrec: error: {err}", file=sys.stderr)
        return code
    except ParameterError as err:
        print(f"kgrec: error: config: {err}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as err:
        print(f"kgrec: error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_DATA
    except Exception as err:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"kgrec: internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
