"""Corpus/index report: delimited summary plus rendered figures.

Writes a stats TSV and a set of PNG figures (publication years,
token document-frequency profile, postings-list lengths, category
counts, and optionally the training loss curve) into one directory.
"""

from __future__ import annotations

import os
from collections import Counter

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .corpus import CorpusStore
from .invindex import PostingsIndex
from .ranking import Category, categorize
from .textpipe import Lexicon


def _new_axes():
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    return fig, ax


def _save(fig, out_dir: str, name: str) -> str:
    path = os.path.join(out_dir, name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def stats_rows(
    store: CorpusStore, lexicon: Lexicon, index: PostingsIndex
) -> list[tuple[str, str]]:
    category_counts = Counter(
        categorize(doc.pub_types).value for doc in store.documents.values()
    )
    rows = [
        ("documents", str(len(store.documents))),
        ("journals", str(len(store.journal_table))),
        ("ingested_batches", str(len(store.ingest_log))),
        ("lexicon_tokens", str(len(lexicon))),
        ("lexicon_corpus_size", str(lexicon.corpus_size)),
        ("index_tokens", str(len(index.postings))),
        ("index_rows", str(index.row_count)),
    ]
    for category in Category:
        rows.append((f"category_{category.value}", str(category_counts.get(category.value, 0))))
    return rows


def write_stats_tsv(rows: list[tuple[str, str]], path: str) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("metric\tvalue\n")
        for name, value in rows:
            fh.write(f"{name}\t{value}\n")
    return path


def figure_publication_years(store: CorpusStore, out_dir: str) -> str:
    years = [doc.pub_date.year for doc in store.documents.values()]
    fig, ax = _new_axes()
    if years:
        ax.hist(years, bins=range(min(years), max(years) + 2), color="#1f77b4", alpha=0.85)
    ax.set_xlabel("publication year")
    ax.set_ylabel("documents")
    ax.set_title("Publication years")
    return _save(fig, out_dir, "publication_years.png")


def figure_doc_frequency(lexicon: Lexicon, out_dir: str) -> str:
    freqs = sorted(lexicon.doc_freq.values(), reverse=True)
    fig, ax = _new_axes()
    if freqs:
        ax.loglog(np.arange(1, len(freqs) + 1), freqs, color="#1f77b4")
    ax.set_xlabel("token rank")
    ax.set_ylabel("document frequency")
    ax.set_title("Token document-frequency profile")
    return _save(fig, out_dir, "doc_frequency.png")


def figure_postings_lengths(index: PostingsIndex, out_dir: str) -> str:
    lengths = [len(pmids) for pmids in index.postings.values()]
    fig, ax = _new_axes()
    if lengths:
        ax.hist(lengths, bins=min(50, max(lengths)), color="#2ca02c", alpha=0.85)
    ax.set_xlabel("postings-list length")
    ax.set_ylabel("tokens")
    ax.set_title("Postings-list lengths")
    return _save(fig, out_dir, "postings_lengths.png")


def figure_category_counts(store: CorpusStore, out_dir: str) -> str:
    counts = Counter(
        categorize(doc.pub_types).value for doc in store.documents.values()
    )
    labels = [c.value for c in Category]
    fig, ax = _new_axes()
    ax.bar(labels, [counts.get(label, 0) for label in labels], color="#d62728", alpha=0.85)
    ax.set_ylabel("documents")
    ax.set_title("Publication categories")
    return _save(fig, out_dir, "category_counts.png")


def figure_training_loss(loss_path: str, out_dir: str) -> str:
    epochs, losses = [], []
    with open(loss_path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("epoch"):
            raise ValueError(f"{loss_path}: expected 'epoch\\tloss' header")
        for line in fh:
            if line.strip():
                epoch, loss = line.split("\t")
                epochs.append(int(epoch))
                losses.append(float(loss))
    fig, ax = _new_axes()
    ax.plot(epochs, losses, marker="o", color="#9467bd")
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean pair loss")
    ax.set_title("Embedding training loss")
    return _save(fig, out_dir, "training_loss.png")


def write_report(
    store: CorpusStore,
    lexicon: Lexicon,
    index: PostingsIndex,
    out_dir: str,
    loss_path: str | None = None,
) -> list[str]:
    """Render the stats TSV and all figures; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = [
        write_stats_tsv(stats_rows(store, lexicon, index), os.path.join(out_dir, "corpus_stats.tsv")),
        figure_publication_years(store, out_dir),
        figure_doc_frequency(lexicon, out_dir),
        figure_postings_lengths(index, out_dir),
        figure_category_counts(store, out_dir),
    ]
    if loss_path is not None:
        written.append(figure_training_loss(loss_path, out_dir))
    return written
