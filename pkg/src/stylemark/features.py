"""Stylistic feature vectors and per-author TF-IDF keyword profiles.

The schema has 11 base markers plus one keyword-overlap coordinate per
candidate author, in this order:

    L(w)   mean word length / max word length
    KW(X)  fraction of author X's keyword set present in the document
    HL     hapax-type count / token count
    Punc   punctuation-token count / token count
    NP/VP/CP  chunk-phrase counts / total phrase count
    UN     unknown-tagged tokens / total phrase count
    RE     reduplication+echo tokens / total phrase count
    Dig    dialog count / sentence count
    L(d)   mean tokens per dialog / sentence count
    L(p)   mean tokens per paragraph / sentence count

Ratios are used throughout so values do not scale with document length;
any feature whose denominator is zero evaluates to 0.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .corpus import Document
from .exceptions import FeatureError, SchemaError

BASE_FEATURES_HEAD = ("L(w)",)
BASE_FEATURES_TAIL = ("HL", "Punc", "NP", "VP", "CP", "UN", "RE", "Dig", "L(d)", "L(p)")
DEFAULT_KEYWORD_SIZE = 50


def feature_schema(authors: Sequence[str]) -> tuple[str, ...]:
    """Schema for a given ordered author list: 11 base markers + KW each."""
    return (
        BASE_FEATURES_HEAD
        + tuple(f"KW({author})" for author in authors)
        + BASE_FEATURES_TAIL
    )


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    schema: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.schema):
            raise SchemaError(
                f"{len(self.values)} values for {len(self.schema)} schema entries"
            )
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("feature values must be finite")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __getitem__(self, feature: str) -> float:
        try:
            return self.values[self.schema.index(feature)]
        except ValueError:
            raise KeyError(feature) from None


@dataclass(frozen=True)
class AuthorProfile:
    """Keyword set and centroid vector for one candidate author."""

    author: str
    keywords: frozenset[str]
    keyword_capacity: int
    n_train_docs: int
    centroid: Optional[FeatureVector] = None


def _word_types(doc: Document) -> set[str]:
    return {t.surface for t in doc.tokens if not t.is_punct}


def tfidf_keywords(
    author_docs: Sequence[Document],
    all_docs: Sequence[Document],
    stopwords: Iterable[str] = (),
    k: int = DEFAULT_KEYWORD_SIZE,
) -> frozenset[str]:
    """The author's k highest tf*idf word types.

    score(t) = (total count of t in author_docs) * ln(N / df(t)) with N the
    corpus size and df counted over all_docs. Stopwords and punctuation are
    excluded; ties break lexicographically; fewer than k types are returned
    only when the vocabulary runs out.
    """
    if not author_docs:
        raise ValueError("author_docs must be non-empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    stop = set(stopwords)
    tf: Counter[str] = Counter()
    for doc in author_docs:
        tf.update(t.surface for t in doc.tokens if not t.is_punct)
    df: Counter[str] = Counter()
    for doc in all_docs:
        df.update(_word_types(doc))
    n_docs = len(all_docs)
    scored = []
    for t in tf:
        if t in stop:
            continue
        if df[t] == 0:
            raise ValueError("author_docs must be a subset of all_docs")
        scored.append((-tf[t] * math.log(n_docs / df[t]), t))
    scored.sort()
    return frozenset(t for _, t in scored[:k])


def _phrase_counts(doc: Document) -> Counter[str]:
    counts: Counter[str] = Counter()
    for token in doc.tokens:
        if token.chunk.startswith("B-"):
            counts[token.chunk[2:]] += 1
    return counts


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def extract_features(
    doc: Document,
    profiles: Sequence[AuthorProfile],
    schema: Optional[Sequence[str]] = None,
) -> FeatureVector:
    """Compute the stylistic marker vector of one document.

    The KW coordinates follow the order of ``profiles``. A ``schema``
    argument, when given, must match the one the profiles imply.
    """
    if not profiles:
        raise ValueError("at least one author profile is required")
    expected = feature_schema([p.author for p in profiles])
    if schema is not None and tuple(schema) != expected:
        raise SchemaError(
            f"requested schema {tuple(schema)} does not match profiles {expected}"
        )
    if not doc.tokens:
        raise FeatureError(f"document {doc.id!r} has no tokens")

    n_tokens = len(doc.tokens)
    words = doc.word_tokens()
    word_lens = [len(t.surface) for t in words]
    mean_over_max = _ratio(
        _ratio(sum(word_lens), len(word_lens)), max(word_lens, default=0)
    )

    types = {t.surface for t in words}
    surface_counts = Counter(t.surface for t in doc.tokens)
    hapax = sum(1 for c in surface_counts.values() if c == 1)
    n_punct = sum(1 for t in doc.tokens if t.is_punct)

    phrases = _phrase_counts(doc)
    n_phrases = sum(phrases.values())
    n_unknown = sum(1 for t in doc.tokens if t.is_unknown)
    n_redup = sum(1 for t in doc.tokens if t.is_redup_or_echo)

    n_sentences = len(doc.sentences)
    n_dialogs = len(doc.dialogs)
    dialog_lens = [end - start for start, end in doc.dialogs]
    mean_dialog_len = _ratio(sum(dialog_lens), n_dialogs)
    para_token_counts = [
        doc.sentences[p_end - 1][1] - doc.sentences[p_start][0]
        for p_start, p_end in doc.paragraphs
    ]
    mean_para_len = _ratio(sum(para_token_counts), len(para_token_counts))

    values = [mean_over_max]
    for profile in profiles:
        overlap = len(types & profile.keywords)
        values.append(_ratio(overlap, profile.keyword_capacity))
    values.extend(
        [
            _ratio(hapax, n_tokens),
            _ratio(n_punct, n_tokens),
            _ratio(phrases.get("NP", 0), n_phrases),
            _ratio(phrases.get("VP", 0), n_phrases),
            _ratio(phrases.get("CP", 0), n_phrases),
            _ratio(n_unknown, n_phrases),
            _ratio(n_redup, n_phrases),
            _ratio(n_dialogs, n_sentences),
            _ratio(mean_dialog_len, n_sentences),
            _ratio(mean_para_len, n_sentences),
        ]
    )
    return FeatureVector(tuple(values), expected)


def build_centroid(vectors: Sequence[FeatureVector]) -> FeatureVector:
    """Coordinate-wise mean of feature vectors sharing one schema."""
    if not vectors:
        raise ValueError("cannot build a centroid from no vectors")
    schema = vectors[0].schema
    for v in vectors[1:]:
        if v.schema != schema:
            raise SchemaError("centroid inputs must share one schema")
    mean = np.mean([v.values for v in vectors], axis=0)
    return FeatureVector(tuple(float(x) for x in mean), schema)


def build_profiles(
    docs: Sequence[Document],
    keyword_size: int = DEFAULT_KEYWORD_SIZE,
    stopwords: Iterable[str] = (),
) -> list[AuthorProfile]:
    """Author profiles (keywords + centroid) from labeled documents.

    Authors are ordered by sorted label, which fixes the schema. Keyword
    sets never contain stopwords; centroids are means over each author's
    documents.
    """
    by_author: dict[str, list[Document]] = {}
    for doc in docs:
        if doc.author is None:
            raise ValueError(f"document {doc.id!r} has no author label")
        by_author.setdefault(doc.author, []).append(doc)
    authors = sorted(by_author)
    stop = frozenset(stopwords)
    profiles = [
        AuthorProfile(
            author=author,
            keywords=tfidf_keywords(by_author[author], docs, stop, keyword_size),
            keyword_capacity=keyword_size,
            n_train_docs=len(by_author[author]),
        )
        for author in authors
    ]
    centroids = {
        author: build_centroid(
            [extract_features(d, profiles) for d in by_author[author]]
        )
        for author in authors
    }
    return [replace(p, centroid=centroids[p.author]) for p in profiles]


def drop_coordinate(vector: FeatureVector, feature: str) -> FeatureVector:
    """A copy of ``vector`` with one named coordinate removed."""
    if feature not in vector.schema:
        raise SchemaError(f"feature {feature!r} not in schema")
    idx = vector.schema.index(feature)
    return FeatureVector(
        vector.values[:idx] + vector.values[idx + 1 :],
        vector.schema[:idx] + vector.schema[idx + 1 :],
    )


def vectors_to_csv(
    vectors: Sequence[FeatureVector], ids: Optional[Sequence[str]] = None
) -> str:
    """CSV rendering; header is the schema (with a doc_id column if ids given)."""
    if not vectors:
        return ""
    schema = vectors[0].schema
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if ids is None:
        writer.writerow(schema)
        for v in vectors:
            writer.writerow([repr(x) for x in v.values])
    else:
        writer.writerow(("doc_id",) + schema)
        for doc_id, v in zip(ids, vectors, strict=True):
            writer.writerow([doc_id, *[repr(x) for x in v.values]])
    return buf.getvalue()


def vectors_to_json(
    vectors: Sequence[FeatureVector], ids: Optional[Sequence[str]] = None
) -> str:
    if not vectors:
        return json.dumps({"schema": [], "vectors": []})
    payload = {
        "schema": list(vectors[0].schema),
        "vectors": [
            {"values": list(v.values)}
            if ids is None
            else {"doc_id": ids[i], "values": list(v.values)}
            for i, v in enumerate(vectors)
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True)
