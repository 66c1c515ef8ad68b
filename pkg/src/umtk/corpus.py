"""Text ingestion and the seeded random mirror of a frequency table.

Tokenization rule: text is lowercased, tokens are maximal runs of
alphabetic characters, and an apostrophe joins a token only when
flanked by alphabetic characters on both sides. Everything else
separates tokens.
"""

from __future__ import annotations

import re
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng
from .matrices import FrequencyMatrix

_TOKEN_RE = re.compile(r"[^\W\d_]+(?:'[^\W\d_]+)*", re.UNICODE)

_DOC_MARKER_RE = re.compile(r"^===DOC (.+?)===\s*$")


def tokenize(text: str) -> list[str]:
    """Lowercased alphabetic tokens, apostrophes kept only word-internally."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class Corpus:
    """Ordered documents, each an (id, text) pair with unique ids."""

    documents: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        ids = [doc_id for doc_id, _ in self.documents]
        if len(set(ids)) != len(ids):
            dupes = sorted({x for x in ids if ids.count(x) > 1})
            raise ValueError(f"duplicate document ids: {', '.join(dupes)}")


@dataclass
class TermDocMatrix:
    """Raw counts of the vocabulary terms (columns) per document (rows)."""

    matrix: FrequencyMatrix
    vocabulary: list[str]
    dropped_docs: list[str] = field(default_factory=list)


def read_corpus_dir(path: str | Path) -> Corpus:
    """One document per .txt file (id = file name without extension)."""
    root = Path(path)
    files = sorted(root.glob("*.txt"))
    if not files:
        raise ValueError(f"no .txt files found in {root}")
    docs = [(f.name[: -len(".txt")], f.read_text(encoding="utf-8")) for f in files]
    return Corpus(docs)


def read_corpus_file(path: str | Path) -> Corpus:
    """Documents separated by '===DOC <id>===' marker lines."""
    docs: list[tuple[str, str]] = []
    current_id: str | None = None
    current: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        m = _DOC_MARKER_RE.match(line)
        if m:
            if current_id is not None:
                docs.append((current_id, "\n".join(current)))
            current_id = m.group(1)
            current = []
        elif current_id is not None:
            current.append(line)
    if current_id is not None:
        docs.append((current_id, "\n".join(current)))
    if not docs:
        raise ValueError(f"no '===DOC id===' markers found in {path}")
    return Corpus(docs)


def build_term_doc(corpus: Corpus, top_k: int) -> TermDocMatrix:
    """Count the top_k corpus-wide most frequent terms per document.

    Vocabulary order is by descending corpus frequency, ties broken
    alphabetically. Documents containing none of the vocabulary are
    dropped (with a warning) so every row of the result is nonzero.
    """
    if top_k < 1:
        raise ValueError("top_k must be at least 1")
    if not corpus.documents:
        raise ValueError("corpus is empty")
    doc_counts: list[Counter[str]] = []
    totals: Counter[str] = Counter()
    for _, text in corpus.documents:
        counts = Counter(tokenize(text))
        doc_counts.append(counts)
        totals.update(counts)
    if not totals:
        raise ValueError("corpus contains no tokens")
    if len(totals) < top_k:
        warnings.warn(
            f"corpus has only {len(totals)} distinct terms, fewer than "
            f"top_k={top_k}; using all of them",
            stacklevel=2,
        )
    vocabulary = sorted(totals, key=lambda t: (-totals[t], t))[:top_k]
    column = {term: idx for idx, term in enumerate(vocabulary)}
    rows = []
    row_labels = []
    dropped = []
    for (doc_id, _), counts in zip(corpus.documents, doc_counts):
        row = np.zeros(len(vocabulary))
        for term, cnt in counts.items():
            if term in column:
                row[column[term]] = cnt
        if row.sum() == 0:
            dropped.append(doc_id)
        else:
            rows.append(row)
            row_labels.append(doc_id)
    if dropped:
        warnings.warn(
            f"dropped {len(dropped)} all-zero documents: {', '.join(dropped)}",
            stacklevel=2,
        )
    if not rows:
        raise ValueError("every document was empty under the vocabulary")
    matrix = FrequencyMatrix(np.array(rows), row_labels, list(vocabulary))
    return TermDocMatrix(matrix, list(vocabulary), dropped)


def random_mirror(rows: int, cols: int, seed: int) -> FrequencyMatrix:
    """Uniform [0, 1) table with the shape of a document-term matrix.

    Entries are filled row-major from the counter-based stream for
    `seed`, so the table is bit-identical across platforms and runs.
    """
    if rows < 2 or cols < 2:
        raise ValueError("mirror table needs at least 2 rows and 2 columns")
    values = rng.uniform01(rng.stream(seed, 0, rows * cols)).reshape(rows, cols)
    row_width = len(str(rows))
    col_width = len(str(cols))
    row_labels = [f"row{str(i + 1).zfill(row_width)}" for i in range(rows)]
    col_labels = [f"col{str(j + 1).zfill(col_width)}" for j in range(cols)]
    return FrequencyMatrix(values, row_labels, col_labels)
