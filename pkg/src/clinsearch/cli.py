"""Command line for the whole pipeline.

Subcommands: ingest, train, index, search, serve, stats, report.
Exit codes: 0 success, 1 usage/config error, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .corpus import (
    ChecksumFormatError,
    CorpusStore,
    ingest_batch,
    join_journal_metadata,
    load_journal_file,
    verify_checksum,
)
from .embedding import TrainingConfig, save_matrix, train_skipgram
from .invindex import build_index, load_index, save_index
from .medline_xml import XmlParseError, parse_document_batch
from .ranking import Category, load_boosts
from .service import (
    DEFAULT_PAGE_SIZE,
    EmptyQueryError,
    SearchEngine,
    SearchRequest,
    load_snapshot,
)
from .textpipe import Lexicon, StopwordList, load_stopwords, text_to_tids

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_ENV_PREFIX = "CLINSEARCH_"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _batch_files(paths: list[str]) -> list[str]:
    files = []
    for path in paths:
        if os.path.isdir(path):
            files.extend(
                os.path.join(path, name)
                for name in sorted(os.listdir(path))
                if name.endswith((".xml", ".xml.gz"))
            )
        elif os.path.isfile(path):
            files.append(path)
        else:
            raise UsageError(f"batch path does not exist: {path}")
    if not files:
        raise UsageError("no batch files found")
    return files


def cmd_ingest(args) -> int:
    if not os.path.isfile(args.journals):
        raise UsageError(f"journal file does not exist: {args.journals}")
    journals = load_journal_file(args.journals)
    store = CorpusStore.open(args.store)
    store.set_journals(journals)

    parsed = kept = dropped = skipped = 0
    for path in _batch_files(args.batches):
        with open(path, "rb") as fh:
            data = fh.read()
        sidecar = f"{path}.md5"
        if os.path.isfile(sidecar):
            with open(sidecar, encoding="utf-8") as fh:
                expected = fh.read().strip()
            try:
                ok = verify_checksum(data, expected)
            except ChecksumFormatError as exc:
                raise DataError(f"{sidecar}: {exc}") from exc
            if not ok:
                raise DataError(f"checksum mismatch for {path}")
        try:
            result = parse_document_batch(data)
        except XmlParseError as exc:
            raise DataError(f"{path}: {exc}") from exc
        joined, dropped_here = join_journal_metadata(result.documents, journals)
        ingest_batch(
            store,
            batch_id=os.path.basename(path),
            docs=joined,
            checksum=hashlib.md5(data).hexdigest(),
        )
        parsed += len(result.documents)
        kept += len(joined)
        dropped += dropped_here
        skipped += result.skipped
    store.save(args.store)
    print(f"parsed={parsed} kept={kept} dropped={dropped} skipped={skipped}")
    return EXIT_OK


def _load_store(path: str) -> CorpusStore:
    try:
        return CorpusStore.load(path)
    except FileNotFoundError as exc:
        raise DataError(str(exc)) from exc


def _document_streams(store: CorpusStore, stops: StopwordList, lexicon: Lexicon):
    streams = []
    for pmid in sorted(store.documents):
        doc = store.documents[pmid]
        text = f"{doc.title} {doc.abstract}" if doc.abstract else doc.title
        streams.append(text_to_tids(text, lexicon, stops, update_lexicon=True))
    return streams


def cmd_train(args) -> int:
    store = _load_store(args.store)
    if not store.documents:
        raise DataError(f"corpus store is empty: {args.store}")
    try:
        config = TrainingConfig(
            dim=args.dim,
            window=args.window,
            epochs=args.epochs,
            negative_samples=args.negative,
            initial_learning_rate=args.learning_rate,
            min_token_count=args.min_count,
            rng_seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(f"config error: {exc}") from exc

    stops = load_stopwords(args.stopwords) if args.stopwords else StopwordList()
    lexicon = Lexicon()
    streams = _document_streams(store, stops, lexicon)
    try:
        matrix = train_skipgram(streams, config)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    for epoch, loss in enumerate(matrix.epoch_losses, start=1):
        print(f"epoch {epoch}/{config.epochs} loss={loss:.6f}")

    lexicon_out = args.lexicon_out or f"{args.out}.lexicon.tsv"
    lexicon.save(lexicon_out)
    save_matrix(matrix, args.out, lexicon=lexicon)
    if args.loss_out:
        with open(args.loss_out, "w", encoding="utf-8") as fh:
            fh.write("epoch\tloss\n")
            for epoch, loss in enumerate(matrix.epoch_losses, start=1):
                fh.write(f"{epoch}\t{loss!r}\n")
    print(f"matrix={args.out} lexicon={lexicon_out} vocab={len(matrix)}")
    return EXIT_OK


def _load_lexicon(path: str) -> Lexicon:
    try:
        return Lexicon.load(path)
    except FileNotFoundError as exc:
        raise DataError(str(exc)) from exc


def cmd_index(args) -> int:
    store = _load_store(args.store)
    lexicon = _load_lexicon(args.lexicon)
    stops = load_stopwords(args.stopwords) if args.stopwords else StopwordList()
    docs = []
    for pmid in sorted(store.documents):
        doc = store.documents[pmid]
        docs.append(
            (
                pmid,
                text_to_tids(doc.title, lexicon, stops, update_lexicon=False),
                text_to_tids(doc.abstract, lexicon, stops, update_lexicon=False),
            )
        )
    index = build_index(docs)
    save_index(index, args.out)
    print(f"index={args.out} tokens={len(index.postings)} rows={index.row_count}")
    return EXIT_OK


def _resolve(flag_value, config: dict, key: str, default=None):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    env = os.environ.get(_ENV_PREFIX + key.upper())
    if env is not None:
        return env
    return default


def _build_engine(args, config: dict | None = None) -> SearchEngine:
    config = config or {}
    paths = {}
    for key in ("store", "lexicon", "matrix", "index"):
        paths[key] = _resolve(getattr(args, key, None), config, key)
        if paths[key] is None:
            raise UsageError(f"missing required path: --{key}")
    stopword_path = _resolve(getattr(args, "stopwords", None), config, "stopwords")
    boosts_path = _resolve(getattr(args, "boosts", None), config, "boosts")
    page_size = int(
        _resolve(getattr(args, "page_size", None), config, "page_size", DEFAULT_PAGE_SIZE)
    )
    try:
        snapshot = load_snapshot(
            paths["store"], paths["lexicon"], paths["matrix"], paths["index"],
            stopword_path=stopword_path,
        )
    except (FileNotFoundError, ValueError) as exc:
        raise DataError(f"cannot load snapshot: {exc}") from exc
    boosts = None
    if boosts_path:
        try:
            boosts = load_boosts(boosts_path)
        except FileNotFoundError as exc:
            raise DataError(str(exc)) from exc
        except ValueError as exc:
            raise DataError(f"bad boost file: {exc}") from exc
    return SearchEngine(snapshot, boosts=boosts, page_size=page_size)


def _parse_tab(tab: str) -> Category:
    try:
        return Category(tab.lower())
    except ValueError:
        valid = ", ".join(c.value for c in Category)
        raise UsageError(f"unknown tab {tab!r}; valid tabs: {valid}") from None


def cmd_search(args) -> int:
    engine = _build_engine(args)
    category = _parse_tab(args.tab)
    try:
        response = engine.execute_search(
            SearchRequest(query=args.query, category=category, page=args.page)
        )
    except EmptyQueryError as exc:
        raise UsageError(str(exc)) from exc
    offset = (response.page - 1) * response.page_size
    for rank, result in enumerate(response.results, start=offset + 1):
        print(
            f"{rank}\t{result.pmid}\t{result.year}\t{result.journal_iso_abbrev}"
            f"\t{result.relevance!r}\t{result.title}"
        )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .httpapi import create_app

    config = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read config {args.config}: {exc}") from exc
    engine = _build_engine(args, config)
    webui = _resolve(args.webui, config, "webui")
    host = _resolve(args.host, config, "host", "127.0.0.1")
    port = int(_resolve(args.port, config, "port", 8000))
    app = create_app(engine, webui_dir=webui)
    print(f"serving on http://{host}:{port} (docs: {engine.snapshot.doc_count})")
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def cmd_stats(args) -> int:
    store = _load_store(args.store)
    print(f"documents\t{len(store.documents)}")
    print(f"journals\t{len(store.journal_table)}")
    print(f"batches\t{len(store.ingest_log)}")
    if args.lexicon:
        lexicon = _load_lexicon(args.lexicon)
        print(f"lexicon_tokens\t{len(lexicon)}")
        print(f"lexicon_corpus_size\t{lexicon.corpus_size}")
    if args.index:
        try:
            index = load_index(args.index)
        except (FileNotFoundError, ValueError) as exc:
            raise DataError(str(exc)) from exc
        print(f"index_tokens\t{len(index.postings)}")
        print(f"index_rows\t{index.row_count}")
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import write_report

    store = _load_store(args.store)
    lexicon = _load_lexicon(args.lexicon)
    try:
        index = load_index(args.index)
    except (FileNotFoundError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    written = write_report(store, lexicon, index, args.out_dir, loss_path=args.loss)
    for path in written:
        print(path)
    return EXIT_OK


def _add_snapshot_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--store", required=required, help="corpus store path")
    parser.add_argument("--lexicon", required=required, help="lexicon TSV path")
    parser.add_argument("--matrix", required=required, help="embedding matrix path")
    parser.add_argument("--index", required=required, help="inverted index path")
    parser.add_argument("--stopwords", help="stopword file overriding the embedded list")
    parser.add_argument("--boosts", help="boosting-factor file (defaults are built in)")
    parser.add_argument("--page-size", type=int, dest="page_size", help="results per page")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clinsearch", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="parse citation batches into the corpus store")
    p.add_argument("batches", nargs="+", help="batch XML files or directories")
    p.add_argument("--journals", required=True, help="journal metadata file")
    p.add_argument("--store", required=True, help="corpus store path (created or updated)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train token embeddings and build the lexicon")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True, help="embedding matrix output path")
    p.add_argument("--lexicon-out", dest="lexicon_out", help="lexicon output path")
    p.add_argument("--loss-out", dest="loss_out", help="per-epoch loss TSV output")
    p.add_argument("--stopwords")
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--negative", type=int, default=5)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=0.025)
    p.add_argument("--min-count", dest="min_count", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("index", help="build the inverted index")
    p.add_argument("--store", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True, help="index output path")
    p.add_argument("--stopwords")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="run one query and print tab-separated results")
    p.add_argument("query")
    p.add_argument("--tab", default=Category.REVIEWS.value, help="reviews, guidelines, or studies")
    p.add_argument("--page", type=int, default=1)
    _add_snapshot_flags(p, required=True)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("serve", help="serve the HTTP JSON API")
    p.add_argument("--config", help="JSON config file with paths and options")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--webui", help="static web UI directory to serve at /")
    _add_snapshot_flags(p, required=False)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("stats", help="print corpus/lexicon/index cardinalities")
    p.add_argument("--store", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--index")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="write the stats TSV and figures")
    p.add_argument("--store", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--loss", help="per-epoch loss TSV from train --loss-out")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # argparse --help/--version
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
