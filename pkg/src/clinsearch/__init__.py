"""Clinical literature search engine.

Pipeline: ingest MEDLINE-style XML joined with journal-rank metadata,
train skip-gram token embeddings, build an inverted index, and serve
category-organized results ranked by semantic similarity, title match,
recency, and journal impact factor.
"""

__version__ = "0.1.0"
