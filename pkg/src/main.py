"""
Command-line entry point for the emoji solidarity analytics pipeline.

Each subcommand runs one stage and leaves its outputs as files in the
output directory, where later stages pick them up:

    ingest → label → classify | emoji-stats | geo | network | diffusion

``run`` executes several stages in dependency order. Every invocation
writes ``run_manifest.json`` next to its outputs.
"""

from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from analysis.corpus import dedupe_and_filter, export_jsonl, ingest_jsonl, load_jsonl, load_stopwords
from analysis.diffusion import (
    bin_by_day,
    default_threshold,
    emit_diffusion,
    filter_threshold,
    order_by_sentiment,
)
from analysis.emojis import (
    UNICODE_DATA_VERSION,
    export_ranked_csv,
    load_sentiment,
    rank_top_k,
    total_counts_table,
)
from analysis.geo import affected_regions, load_gazetteer, partition_emojis
from analysis.labeling import (
    check_agreement,
    compute_kappa,
    consensus_lexicon,
    distant_label,
    export_labeled,
    export_lexicon,
    load_annotations,
    load_labeled,
    load_lexicon,
)
from analysis.network import (
    build_cooccurrence,
    export_graph,
    layout_force_directed,
    prune,
    subset_by_region,
    summarize,
)
from classifiers.lstm import LstmConfig, load_embeddings, save_checkpoint
from classifiers.training import (
    balance_classes,
    run_lstm_cv,
    run_lstm_split,
    train_linear_cv,
    train_linear_split,
)
from models.entities import CorpusStore, Label, LabeledCorpus, LayoutConfig, RunManifest, TweetRecord
from utils.config import PROJECT_ROOT, TOOL_VERSION, PipelineConfig, load_config
from utils.errors import (
    AgreementGateError,
    EmptyInputError,
    InputMismatchError,
    MissingArtifactError,
    NumericError,
)
from utils.io_utils import read_json, sha256_file, write_json
from utils.random_utils import set_seed


STAGES = ("ingest", "label", "classify", "emoji-stats", "geo", "network", "diffusion")

CORPUS_FILE = "corpus.jsonl"
LABELED_FILE = "labeled.jsonl"
LEXICON_FILE = "lexicon.tsv"
LABELING_SUMMARY_FILE = "labeling_summary.json"
MANIFEST_FILE = "run_manifest.json"


# ---------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------


class Pipeline:
    """
    Runs stages against one output directory.

    Holds the resolved config, the parsed options, the digests of every
    file read and per-stage timings for the run manifest.
    """

    def __init__(self, config: PipelineConfig, options: argparse.Namespace) -> None:
        self.config = config
        self.options = options
        self.out_dir = Path(config.out_dir)
        self.digests: Dict[str, str] = {}
        self.timings: Dict[str, float] = {}
        self.outputs: Dict[str, List[Path]] = {}
        self._store: Optional[CorpusStore] = None
        self._labeled: Optional[LabeledCorpus] = None

    # -- helpers -------------------------------------------------------

    def _opt(self, name: str, default=None):
        value = getattr(self.options, name, None)
        return default if value is None else value

    def _read(self, path: str | Path) -> Path:
        """Record the digest of an input file and return it as a Path."""
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Input not found: {path}")
        self.digests[str(path)] = sha256_file(path)
        return path

    def _artifact(self, name: str, stage: str) -> Path:
        path = self.out_dir / name
        if not path.exists():
            raise MissingArtifactError(str(path), stage)
        return self._read(path)

    def _data_path(self, raw: str) -> Path:
        path = Path(raw)
        if path.is_absolute() or path.exists():
            return path
        return PROJECT_ROOT / path

    def _emit(self, stage: str, path: Path) -> None:
        self.outputs.setdefault(stage, []).append(path)

    def _corpus(self) -> CorpusStore:
        if self._store is None:
            explicit = self._opt("corpus")
            if explicit:
                raw = ingest_jsonl(self._read(explicit), self.config.event, quiet=self.config.quiet)
                self._store = dedupe_and_filter(raw, exact=self._opt("dedupe_exact", False))
            else:
                path = self._artifact(CORPUS_FILE, "ingest")
                self._store = load_jsonl(path, self.config.event)
        return self._store

    def _labeled_corpus(self) -> LabeledCorpus:
        if self._labeled is None:
            path = self._artifact(LABELED_FILE, "label")
            summary_path = self.out_dir / LABELING_SUMMARY_FILE
            summary = read_json(self._read(summary_path)) if summary_path.exists() else {}
            self._labeled = load_labeled(
                path,
                event_tag=summary.get("event", self.config.event),
                dropped_conflicts=summary.get("dropped_conflicts", 0),
                dropped_unmatched=summary.get("dropped_unmatched", 0),
            )
        return self._labeled

    def _records_for(self, cls: str) -> List[TweetRecord]:
        labeled = self._labeled_corpus()
        if cls == "all":
            return labeled.solidarity + labeled.not_solidarity
        return labeled.group(Label(cls))

    def _region_subset(self, records: List[TweetRecord], region: str) -> List[TweetRecord]:
        if region == "all":
            return records
        gazetteer = load_gazetteer(self._read(self._data_path(self.config.gazetteer_path)))
        affected = affected_regions(self.config.event, self._opt("affected"))
        return subset_by_region(records, gazetteer, affected, region)

    # -- stages --------------------------------------------------------

    def ingest(self) -> None:
        source = self._opt("input")
        if not source:
            raise ValueError("The ingest stage needs --input FILE")

        raw = ingest_jsonl(self._read(source), self.config.event, quiet=self.config.quiet)
        store = dedupe_and_filter(raw, exact=self._opt("dedupe_exact", False))
        self._store = store

        corpus_path = export_jsonl(store, self.out_dir / CORPUS_FILE)
        summary_path = write_json(
            self.out_dir / "ingest_summary.json",
            {
                "event": self.config.event,
                "ingested": len(raw),
                "skipped_lines": raw.skipped_lines,
                "dedupe": "exact" if self._opt("dedupe_exact", False) else "normalized",
                "removed_retweets_or_duplicates": len(raw) - len(store),
                "records": len(store),
            },
        )
        self._emit("ingest", corpus_path)
        self._emit("ingest", summary_path)

    def label(self) -> None:
        annotations = self._opt("annotations")
        if not annotations or len(annotations) != 2:
            raise ValueError("The label stage needs --annotations A.tsv B.tsv")

        store = self._corpus()
        first = load_annotations(self._read(annotations[0]))
        second = load_annotations(self._read(annotations[1]))

        report = compute_kappa(first, second)
        self._emit("label", write_json(self.out_dir / "agreement.json", report.to_dict()))
        check_agreement(report, self.config.min_kappa)

        lexicon = consensus_lexicon(first, second)
        self._emit("label", export_lexicon(lexicon, self.out_dir / LEXICON_FILE))

        labeled = distant_label(store, lexicon, quiet=self.config.quiet)
        self._labeled = labeled
        self._emit("label", export_labeled(labeled, self.out_dir / LABELED_FILE))
        self._emit(
            "label",
            write_json(
                self.out_dir / LABELING_SUMMARY_FILE,
                {
                    "event": labeled.event_tag,
                    "solidarity": len(labeled.solidarity),
                    "not_solidarity": len(labeled.not_solidarity),
                    "total": len(labeled.solidarity) + len(labeled.not_solidarity),
                    "dropped_conflicts": labeled.dropped_conflicts,
                    "dropped_unmatched": labeled.dropped_unmatched,
                    "lexicon_size": len(lexicon),
                    "disagreements": sorted(lexicon.disagreements),
                    "agreed_unrelated": sorted(lexicon.agreed_unrelated),
                },
            ),
        )

    def classify(self) -> None:
        cfg = self.config
        lexicon = load_lexicon(self._artifact(LEXICON_FILE, "label"))
        corpus = balance_classes(self._labeled_corpus(), cfg.seed, cfg.balance)

        stops = load_stopwords(self._read(self._data_path(cfg.stopwords_path)))
        strip = sorted(lexicon.entries)
        with_emoji = self._opt("with_emojis", True)
        tag = "emoji" if with_emoji else "noemoji"
        model = self._opt("model", "svm")
        protocol = self._opt("protocol", "both")
        folds = self._opt("folds", 10)
        common = dict(stop_list=stops, strip_hashtags=strip, with_emoji=with_emoji)

        if model in ("svm", "all"):
            if protocol in ("cv", "both"):
                report = train_linear_cv(
                    corpus, cfg.features, folds, cfg.seed, threads=cfg.threads, quiet=cfg.quiet, **common
                )
                self._emit("classify", write_json(self.out_dir / f"svm_cv_{cfg.features}_{tag}.json", report.to_dict()))
            if protocol in ("split", "both"):
                report = train_linear_split(corpus, cfg.features, cfg.seed, **common)
                self._emit("classify", write_json(self.out_dir / f"svm_split_{cfg.features}_{tag}.json", report.to_dict()))

        if model in ("lstm", "all"):
            lstm_config = LstmConfig(
                hidden=cfg.lstm_hidden,
                embed_dim=cfg.lstm_embed_dim,
                epochs=cfg.lstm_epochs,
                batch=cfg.lstm_batch,
                lr=cfg.lstm_lr,
                dropout=cfg.lstm_dropout,
                pad_length=cfg.pad_length,
            )
            embeddings_path = self._opt("embeddings")
            embeddings = (
                load_embeddings(self._read(embeddings_path), dim=cfg.lstm_embed_dim)
                if embeddings_path
                else None
            )
            if embeddings is None:
                print("[⚠️ Warning] No --embeddings given; every embedding starts random.")

            if protocol in ("cv", "both"):
                report = run_lstm_cv(
                    corpus, lstm_config, folds, cfg.seed, embeddings, threads=cfg.threads, quiet=cfg.quiet, **common
                )
                self._emit("classify", write_json(self.out_dir / f"lstm_cv_{tag}.json", report.to_dict()))
            if protocol in ("split", "both"):
                params, vocab, report = run_lstm_split(
                    corpus, lstm_config, cfg.seed, embeddings, quiet=cfg.quiet, **common
                )
                self._emit("classify", write_json(self.out_dir / f"lstm_split_{tag}.json", report.to_dict()))
                self._emit("classify", save_checkpoint(params, self.out_dir / f"lstm_{tag}.bin"))
                self._emit("classify", write_json(self.out_dir / f"lstm_{tag}_vocab.json", vocab))

    def emoji_stats(self) -> None:
        labeled = self._labeled_corpus()
        distinct = self._opt("distinct_per_tweet", False)

        totals = total_counts_table(labeled, distinct, threads=self.config.threads)
        totals["event"] = labeled.event_tag
        self._emit("emoji-stats", write_json(self.out_dir / "emoji_counts.json", totals))

        tables = rank_top_k(labeled, self.config.top_k, distinct, threads=self.config.threads)
        for label, table in tables.items():
            self._emit("emoji-stats", export_ranked_csv(table, self.out_dir / f"top_emojis_{label.value}.csv"))

    def geo(self) -> None:
        labeled = self._labeled_corpus()
        gazetteer = load_gazetteer(self._read(self._data_path(self.config.gazetteer_path)))
        affected = affected_regions(self.config.event, self._opt("affected"))

        report = partition_emojis(labeled.solidarity, gazetteer, affected, quiet=self.config.quiet)
        payload = report.to_dict()
        payload["affected_countries"] = sorted(affected.countries)
        self._emit("geo", write_json(self.out_dir / "geo_partition.json", payload))

    def network(self) -> None:
        cfg = self.config
        cls, region = self._opt("cls", "solidarity"), self._opt("region", "all")
        records = self._region_subset(self._records_for(cls), region)

        graph = build_cooccurrence(records, cfg.pair_mode, threads=cfg.threads)
        graph = prune(graph, cfg.min_edge_weight, drop_isolated=cfg.min_edge_weight > 1)
        stem = self.out_dir / f"network_{cls}_{region}"

        self._emit("network", export_graph(graph, stem.with_suffix(".csv"), "edge-csv"))
        self._emit("network", export_graph(graph, stem.with_suffix(".graphml"), "graphml"))

        summary = summarize(graph, cfg.top_k)
        summary.update({"class": cls, "region": region, "pair_mode": cfg.pair_mode, "min_edge_weight": cfg.min_edge_weight})
        self._emit("network", write_json(Path(f"{stem}_summary.json"), summary))

        if not graph.nodes:
            print(f"[⚠️ Warning] No emojis in the {cls}/{region} subset; skipping the drawing.")
            return

        layout_config = LayoutConfig(iterations=self._opt("iterations", 500), seed=cfg.seed)
        layout = layout_force_directed(graph, layout_config, quiet=cfg.quiet)
        self._emit(
            "network",
            export_graph(
                graph,
                stem.with_suffix(".svg"),
                "svg",
                layout=layout,
                config=layout_config,
                title=f"{cfg.event} {cls} emoji network ({region})",
            ),
        )

    def diffusion(self) -> None:
        cfg = self.config
        cls, region = self._opt("cls", "solidarity"), self._opt("region", "all")
        records = self._region_subset(self._records_for(cls), region)
        threshold = cfg.threshold if cfg.threshold is not None else default_threshold(cfg.event)

        series = bin_by_day(
            records,
            tz_offset=cfg.tz_offset,
            threads=cfg.threads,
            subset={"event": cfg.event, "class": cls, "region": region},
        )
        series = filter_threshold(series, threshold, cfg.threshold_mode)

        sentiment_path = self._opt("sentiment")
        if sentiment_path:
            sentiment = load_sentiment(self._read(sentiment_path))
        else:
            print("[⚠️ Warning] No --sentiment file given; rows are ordered by emoji.")
            sentiment = {}
        series = order_by_sentiment(series, sentiment)

        stem = self.out_dir / f"diffusion_{cls}_{region}"
        self._emit("diffusion", emit_diffusion(series, stem.with_suffix(".csv"), "csv"))
        if series.rows and series.days:
            title = f"{cfg.event} {cls} emoji diffusion ({region}, ≥{threshold}/day)"
            self._emit("diffusion", emit_diffusion(series, stem.with_suffix(".svg"), "svg", title=title))
        else:
            print(f"[⚠️ Warning] No emoji reaches {threshold} per day; skipping the chart.")

    # -- driver --------------------------------------------------------

    def run(self, stages: Sequence[str]) -> Dict[str, List[Path]]:
        """Run stages in dependency order, timing each."""
        handlers = {
            "ingest": self.ingest,
            "label": self.label,
            "classify": self.classify,
            "emoji-stats": self.emoji_stats,
            "geo": self.geo,
            "network": self.network,
            "diffusion": self.diffusion,
        }
        for stage in sorted(set(stages), key=STAGES.index):
            print(f"\n▶️  Stage: {stage}")
            started = time.perf_counter()
            handlers[stage]()
            self.timings[stage] = round(time.perf_counter() - started, 3)
            print(f"[✅] Stage '{stage}' finished in {self.timings[stage]:.2f}s.")
        return self.outputs

    def write_manifest(self, argv: Sequence[str], stages: Sequence[str]) -> Path:
        manifest = RunManifest(
            command_line=list(argv),
            config=self.config.to_dict(),
            input_digests=dict(sorted(self.digests.items())),
            seed=self.config.seed,
            tool_version=TOOL_VERSION,
            unicode_data_version=UNICODE_DATA_VERSION,
            timings=self.timings,
            stages=list(stages),
        )
        return write_json(self.out_dir / MANIFEST_FILE, manifest.to_dict())


def run_pipeline(
    config: PipelineConfig,
    stages: Sequence[str],
    options: Optional[argparse.Namespace] = None,
    argv: Sequence[str] = (),
) -> Dict[str, List[Path]]:
    """
    Execute ``stages`` and write the run manifest.

    Args:
        config: Resolved configuration.
        stages: Stage names (any order; run in dependency order).
        options: Stage inputs and switches (paths, class, region, ...).
        argv: Command line recorded in the manifest.

    Returns:
        Output paths per stage.

    Raises:
        MissingArtifactError: If a stage's upstream output is absent.
    """
    unknown = [s for s in stages if s not in STAGES]
    if unknown:
        raise ValueError(f"Unknown stages: {unknown}; choose from {list(STAGES)}")

    set_seed(config.seed)
    pipeline = Pipeline(config, options or argparse.Namespace())
    try:
        return pipeline.run(stages)
    finally:
        pipeline.write_manifest(argv, [s for s in STAGES if s in stages])


# ---------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------


def _global_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    flags.add_argument("--seed", type=int, help="Seed for every random draw (default 42)")
    flags.add_argument("--config", help="KEY=VALUE settings file")
    flags.add_argument("--out-dir", dest="out_dir", help="Output directory (default output/)")
    flags.add_argument("--threads", type=int, help="Worker threads (default 1)")
    flags.add_argument("--event", help="Event tag: irma, paris, ...")
    flags.add_argument("--quiet", action="store_const", const=True, help="Hide progress bars")
    return flags


def _selection_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--class", dest="cls", choices=["solidarity", "not_solidarity", "all"], default="solidarity")
    flags.add_argument("--region", choices=["affected", "other", "all"], default="all")
    flags.add_argument("--affected", type=lambda s: [c for c in s.split(",") if c.strip()], help="Comma-separated country codes")
    flags.add_argument("--gazetteer", dest="gazetteer_path")
    return flags


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    selection = _selection_flags()
    dedupe = argparse.ArgumentParser(add_help=False)
    dedupe.add_argument("--dedupe-exact", dest="dedupe_exact", action="store_true",
                        help="Treat only byte-identical texts as duplicates")

    parser = argparse.ArgumentParser(
        prog="analyze",
        description="Solidarity classification and emoji analytics for crisis tweet corpora.",
        parents=[common],
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name: str, help_text: str, *parents: argparse.ArgumentParser) -> argparse.ArgumentParser:
        return commands.add_parser(name, help=help_text, parents=[common, *parents])

    def add_ingest_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", help="Raw JSONL tweet dump")

    def add_label_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--corpus", help="Raw JSONL to ingest instead of the ingest stage output")
        p.add_argument("--annotations", nargs=2, metavar=("A_TSV", "B_TSV"))
        p.add_argument("--min-kappa", dest="min_kappa", type=float, nargs="?", const=0.65,
                       help="Fail when kappa is below this value (bare flag: 0.65)")

    def add_classify_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--features", choices=["bigram", "tfidf", "tfidf+bigram"])
        emojis = p.add_mutually_exclusive_group()
        emojis.add_argument("--with-emojis", dest="with_emojis", action="store_true", default=True)
        emojis.add_argument("--no-emojis", dest="with_emojis", action="store_false")
        p.add_argument("--model", choices=["svm", "lstm", "all"], default="svm")
        p.add_argument("--protocol", choices=["cv", "split", "both"], default="both")
        p.add_argument("--folds", type=int, default=10)
        p.add_argument("--balance", choices=["undersample", "oversample", "none"])
        p.add_argument("--embeddings", help="Text word-vector file")
        p.add_argument("--stopwords", dest="stopwords_path")

    def add_stats_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--top-k", dest="top_k", type=int)
        p.add_argument("--distinct-per-tweet", dest="distinct_per_tweet", action="store_true")

    def add_network_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--pair-mode", dest="pair_mode", choices=["presence", "occurrences"])
        p.add_argument("--min-edge-weight", dest="min_edge_weight", type=int)
        p.add_argument("--iterations", type=int, default=500)

    def add_diffusion_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--threshold", type=int)
        p.add_argument("--threshold-mode", dest="threshold_mode", choices=["max-day", "all-days"])
        p.add_argument("--tz-offset", dest="tz_offset", type=float)
        p.add_argument("--sentiment", help="Emoji sentiment ranking CSV")

    add_ingest_flags(add("ingest", "Read, de-duplicate and export a tweet dump", dedupe))
    add_label_flags(add("label", "Measure agreement, build the lexicon and label tweets", dedupe))
    add_classify_flags(add("classify", "Train and evaluate the solidarity classifiers"))
    add_stats_flags(add("emoji-stats", "Count and rank emojis per class"))
    add("geo", "Split solidarity emoji counts by affected region", selection)
    add_network_flags(add("network", "Build, lay out and export the co-occurrence network", selection))
    add_diffusion_flags(add("diffusion", "Emit the emoji-by-day diffusion matrix and chart", selection))

    run = add("run", "Run several stages in one go", selection, dedupe)
    run.add_argument("--stages", nargs="+", choices=list(STAGES), default=list(STAGES))
    add_ingest_flags(run)
    add_label_flags(run)
    add_classify_flags(run)
    add_stats_flags(run)
    add_network_flags(run)
    add_diffusion_flags(run)

    return parser


_CONFIG_KEYS = (
    "seed", "out_dir", "threads", "event", "quiet", "min_kappa", "top_k", "threshold",
    "threshold_mode", "tz_offset", "pair_mode", "min_edge_weight", "features", "balance",
    "stopwords_path", "gazetteer_path",
)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run the requested stages and report.

    Returns:
        0 on success, 1 when a stage fails, 2 for usage errors.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 2

    start_time = datetime.now()
    print(f"🚀 Starting '{args.command}'\n")

    try:
        overrides = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
        config = load_config(getattr(args, "config", None), overrides)
        stages = args.stages if args.command == "run" else [args.command]

        outputs = run_pipeline(config, stages, args, argv=["analyze", *argv])
    except (
        MissingArtifactError,
        AgreementGateError,
        InputMismatchError,
        EmptyInputError,
        NumericError,
        FileNotFoundError,
        ValueError,
    ) as exc:
        print(f"❌ {args.command} failed")
        print(str(exc))
        return 1

    n_files = sum(len(paths) for paths in outputs.values())
    print(f"\n🎉 Done: {n_files:,} files in {config.out_dir}")
    print(f"⏱️  Time taken: {datetime.now() - start_time}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
