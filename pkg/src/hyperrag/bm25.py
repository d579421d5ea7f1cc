"""Okapi BM25 over the same corpus, used as the sparse baseline.

Tokenization matches the rest of the package (normalized whitespace
tokens, stopwords kept, no stemming). The IDF uses the +1-inside-log
variant so scores are never negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .corpus import Corpus
from .errors import UnknownDocId
from .labeling import tokenize

DEFAULT_K1 = 1.5
DEFAULT_B = 0.75


@dataclass
class Bm25Index:
    doc_freq: dict[str, int]
    postings: dict[str, list[tuple[str, int]]]
    doc_len: dict[str, int]
    avg_doc_len: float
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    _tf: dict[str, dict[str, int]] = field(default_factory=dict, repr=False)

    @property
    def doc_count(self) -> int:
        return len(self.doc_len)

    def idf(self, term: str) -> float:
        n = self.doc_count
        df = self.doc_freq.get(term, 0)
        return math.log((n - df + 0.5) / (df + 0.5) + 1.0)


def bm25_build(corpus: Corpus, k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> Bm25Index:
    if len(corpus) == 0:
        raise ValueError("cannot build BM25 over an empty corpus")
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"b must lie in [0, 1], got {b}")
    doc_len: dict[str, int] = {}
    tf_by_doc: dict[str, dict[str, int]] = {}
    for doc in corpus:
        tokens = tokenize(doc.text)
        doc_len[doc.id] = len(tokens)
        counts: dict[str, int] = {}
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
        tf_by_doc[doc.id] = counts

    postings: dict[str, list[tuple[str, int]]] = {}
    for doc in corpus:
        for term, tf in tf_by_doc[doc.id].items():
            postings.setdefault(term, []).append((doc.id, tf))
    for plist in postings.values():
        plist.sort(key=lambda p: p[0])
    doc_freq = {term: len(plist) for term, plist in postings.items()}
    avg = sum(doc_len.values()) / len(doc_len)
    return Bm25Index(
        doc_freq=doc_freq,
        postings=postings,
        doc_len=doc_len,
        avg_doc_len=avg,
        k1=k1,
        b=b,
        _tf=tf_by_doc,
    )


def bm25_score(ix: Bm25Index, query_tokens: list[str], doc_id: str) -> float:
    """Okapi score of one document for the given tokens.

    sum over terms of idf * tf*(k1+1) / (tf + k1*(1 - b + b*len/avglen));
    terms absent from the document contribute zero.
    """
    if doc_id not in ix.doc_len:
        raise UnknownDocId(doc_id)
    tf_map = ix._tf[doc_id]
    length_norm = ix.k1 * (1.0 - ix.b + ix.b * ix.doc_len[doc_id] / ix.avg_doc_len)
    score = 0.0
    for term in query_tokens:
        tf = tf_map.get(term, 0)
        if tf == 0:
            continue
        score += ix.idf(term) * (tf * (ix.k1 + 1.0)) / (tf + length_norm)
    return score


def bm25_retrieve(ix: Bm25Index, query: str, k: int = 3) -> list[tuple[str, float]]:
    """Top-k (doc_id, score), score descending, doc id ascending on ties.

    Only documents containing at least one query term are scored or
    returned.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    query_tokens = tokenize(query)
    candidates: set[str] = set()
    for term in set(query_tokens):
        for doc_id, _tf in ix.postings.get(term, ()):
            candidates.add(doc_id)
    scored = [(doc_id, bm25_score(ix, query_tokens, doc_id)) for doc_id in candidates]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]
