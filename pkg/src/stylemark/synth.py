"""Seeded synthetic corpus generation.

Generates fully annotated documents whose per-author statistics (mean
word length, punctuation-token rate, dialogs per sentence) converge to
the style knobs as documents grow. Word identities come from one shared
corpus-level vocabulary with an exponentially tilted length distribution
per author, so mean word length can be moved without handing
vocabulary-based features a free separating signal.
"""

from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from .corpus import (
    Document,
    AnnotatedToken,
    POS_ECHO,
    POS_PUNCT,
    POS_REDUP,
    POS_UNKNOWN,
    _build_document,
    segment,
)
from .exceptions import SynthSpecError

_PHRASE_POS = {"NP": "NN", "VP": "VB", "CP": "CC"}
_PHRASE_KINDS = ("NP", "VP", "CP")


@dataclass(frozen=True)
class AuthorStyle:
    """Style knobs for one synthetic author. All rates are in [0, 1]."""

    mean_word_len: float
    punct_rate: float = 0.12
    dialog_rate: float = 0.1
    sentences_per_paragraph: float = 4.0
    words_per_sentence: float = 12.0
    hapax_rate: float = 0.0
    keyword_pool: tuple[str, ...] = ()
    keyword_rate: float = 0.0
    phrase_mix: tuple[float, float, float] = (0.5, 0.3, 0.2)
    unknown_rate: float = 0.0
    redup_rate: float = 0.0

    def validate(self) -> None:
        rates = {
            "punct_rate": self.punct_rate,
            "dialog_rate": self.dialog_rate,
            "hapax_rate": self.hapax_rate,
            "keyword_rate": self.keyword_rate,
            "unknown_rate": self.unknown_rate,
            "redup_rate": self.redup_rate,
        }
        for name, value in rates.items():
            if not 0.0 <= value <= 1.0:
                raise SynthSpecError(f"{name} must be in [0,1], got {value}")
        if self.punct_rate >= 1.0:
            raise SynthSpecError("punct_rate must be < 1")
        if self.mean_word_len <= 0:
            raise SynthSpecError("mean_word_len must be positive")
        if self.sentences_per_paragraph < 1 or self.words_per_sentence < 1:
            raise SynthSpecError("paragraph and sentence lengths must be >= 1")
        source_total = self.keyword_rate + self.hapax_rate + self.unknown_rate + self.redup_rate
        if source_total > 1.0 + 1e-12:
            raise SynthSpecError(
                f"keyword+hapax+unknown+redup rates must sum to <= 1, got {source_total}"
            )
        if self.keyword_rate > 0 and not self.keyword_pool:
            raise SynthSpecError("keyword_rate > 0 requires a non-empty keyword_pool")
        if self.dialog_rate > 0 and self.punct_rate == 0:
            raise SynthSpecError(
                "dialog_rate > 0 requires punct_rate > 0 (dialogs are quote-delimited)"
            )
        if len(self.phrase_mix) != 3 or any(p < 0 for p in self.phrase_mix):
            raise SynthSpecError("phrase_mix must be three non-negative proportions")
        if sum(self.phrase_mix) <= 0:
            raise SynthSpecError("phrase_mix must not be all zero")
        for word in self.keyword_pool:
            if segment(word)[2] != [word]:
                raise SynthSpecError(
                    f"keyword_pool entry {word!r} would not survive segmentation "
                    "as a single word token"
                )


@dataclass(frozen=True)
class SynthSpec:
    """Spec for a seeded synthetic corpus: one AuthorStyle per author."""

    authors: tuple[tuple[str, AuthorStyle], ...]
    docs_per_author: int
    tokens_per_doc: int
    seed: int
    vocab_size: int = 240
    min_word_len: int = 2
    max_word_len: int = 9

    def validate(self) -> None:
        if not self.authors:
            raise SynthSpecError("at least one author is required")
        if self.docs_per_author <= 0 or self.tokens_per_doc <= 0:
            raise SynthSpecError("docs_per_author and tokens_per_doc must be positive")
        if self.vocab_size <= 0:
            raise SynthSpecError("vocab_size must be positive")
        if not 1 <= self.min_word_len <= self.max_word_len:
            raise SynthSpecError("need 1 <= min_word_len <= max_word_len")
        names = [name for name, _ in self.authors]
        if len(set(names)) != len(names):
            raise SynthSpecError("duplicate author names")
        for name, style in self.authors:
            try:
                style.validate()
            except SynthSpecError as exc:
                raise SynthSpecError(f"author {name!r}: {exc}") from exc


def synth_spec_from_dict(data: Mapping) -> SynthSpec:
    """Build a SynthSpec from parsed JSON, rejecting unknown keys."""
    data = dict(data)
    author_map = data.pop("authors", None)
    if not isinstance(author_map, dict) or not author_map:
        raise SynthSpecError("spec must contain a non-empty 'authors' object")
    style_fields = {f.name for f in fields(AuthorStyle)}
    authors = []
    for name, knobs in author_map.items():
        if not isinstance(knobs, dict):
            raise SynthSpecError(f"author {name!r} must map to an object of knobs")
        unknown = set(knobs) - style_fields
        if unknown:
            raise SynthSpecError(f"author {name!r}: unknown knob(s) {sorted(unknown)}")
        knobs = dict(knobs)
        if "keyword_pool" in knobs:
            knobs["keyword_pool"] = tuple(knobs["keyword_pool"])
        if "phrase_mix" in knobs:
            knobs["phrase_mix"] = tuple(knobs["phrase_mix"])
        authors.append((str(name), AuthorStyle(**knobs)))
    spec_fields = {f.name for f in fields(SynthSpec)} - {"authors"}
    unknown = set(data) - spec_fields
    if unknown:
        raise SynthSpecError(f"unknown spec key(s) {sorted(unknown)}")
    try:
        spec = SynthSpec(authors=tuple(authors), **data)
    except TypeError as exc:
        raise SynthSpecError(f"incomplete spec: {exc}") from exc
    spec.validate()
    return spec


def load_synth_spec(path: str | Path) -> SynthSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SynthSpecError(f"cannot parse spec file {path}: {exc}") from exc
    return synth_spec_from_dict(data)


def _tilted_length_weights(lengths: np.ndarray, target_mean: float) -> np.ndarray:
    """Exponential tilt over the length support hitting the target mean."""
    lo, hi = float(lengths.min()), float(lengths.max())
    if not lo < target_mean < hi:
        raise SynthSpecError(
            f"mean word length {target_mean:.3f} is unreachable with lengths "
            f"{int(lo)}..{int(hi)} after keyword/reduplication mixing"
        )

    def mean_at(b: float) -> float:
        w = np.exp(b * (lengths - lengths.mean()))
        return float((w * lengths).sum() / w.sum())

    low, high = -20.0, 20.0
    for _ in range(200):
        mid = 0.5 * (low + high)
        if mean_at(mid) < target_mean:
            low = mid
        else:
            high = mid
    b = 0.5 * (low + high)
    w = np.exp(b * (lengths - lengths.mean()))
    return w / w.sum()


def _build_vocab(spec: SynthSpec, rng: np.random.Generator) -> dict[int, list[str]]:
    """Shared vocabulary: equally many unique words per length class."""
    lengths = range(spec.min_word_len, spec.max_word_len + 1)
    per_length = max(1, math.ceil(spec.vocab_size / len(list(lengths))))
    vocab: dict[int, list[str]] = {}
    letters = string.ascii_lowercase
    for length in range(spec.min_word_len, spec.max_word_len + 1):
        seen: set[str] = set()
        words: list[str] = []
        while len(words) < per_length:
            word = "".join(letters[i] for i in rng.integers(0, 26, size=length))
            if word not in seen:
                seen.add(word)
                words.append(word)
        vocab[length] = words
    return vocab


def _fresh_word(rng: np.random.Generator, length: int, taken: set[str]) -> str:
    letters = string.ascii_lowercase
    while True:
        word = "".join(letters[i] for i in rng.integers(0, 26, size=length))
        if word not in taken:
            return word


class _AuthorSampler:
    """Per-author sampling state derived from one AuthorStyle."""

    def __init__(self, style: AuthorStyle, vocab: dict[int, list[str]]):
        self.style = style
        self.vocab = vocab
        self.vocab_words = {w for words in vocab.values() for w in words}
        self.lengths = np.array(sorted(vocab), dtype=float)
        pool_lens = [len(w) for w in style.keyword_pool]
        pool_mean = float(np.mean(pool_lens)) if pool_lens else 0.0
        kr, rr = style.keyword_rate, style.redup_rate
        plain = 1.0 - kr - rr
        if plain <= 0:
            raise SynthSpecError("keyword_rate + redup_rate must leave room for vocabulary words")
        # Solve the tilt so the stationary mean over all word sources hits
        # the knob: mean = kr*pool_mean + rr*mean + plain*tilt_mean.
        tilt_mean = (style.mean_word_len - kr * pool_mean - rr * style.mean_word_len) / plain
        self.length_weights = _tilted_length_weights(self.lengths, tilt_mean)
        mix = np.asarray(style.phrase_mix, dtype=float)
        self.phrase_probs = mix / mix.sum()

    def sample_length(self, rng: np.random.Generator) -> int:
        return int(rng.choice(self.lengths, p=self.length_weights))

    def vocab_word(self, rng: np.random.Generator) -> str:
        length = self.sample_length(rng)
        words = self.vocab[length]
        return words[int(rng.integers(0, len(words)))]


def _echo_mutate(word: str, rng: np.random.Generator) -> str:
    letters = string.ascii_lowercase.replace(word[0], "")
    return letters[int(rng.integers(0, len(letters)))] + word[1:]


def _generate_document(
    doc_id: str,
    author: str,
    sampler: _AuthorSampler,
    tokens_per_doc: int,
    rng: np.random.Generator,
) -> Document:
    style = sampler.style
    r = style.punct_rate
    target_words = max(1, round(tokens_per_doc * (1.0 - r)))

    # sentence = list of phrases; phrase = (kind, [(surface, pos), ...])
    paragraphs: list[list[list[tuple[str, list[tuple[str, str]]]]]] = []
    dialog_flags: list[list[Optional[tuple[int, int]]]] = []
    prev_word: Optional[str] = None
    words_emitted = 0

    while words_emitted < target_words:
        n_sentences = 1 + int(rng.poisson(max(0.0, style.sentences_per_paragraph - 1)))
        paragraph: list[list[tuple[str, list[tuple[str, str]]]]] = []
        para_dialogs: list[Optional[tuple[int, int]]] = []
        for _ in range(n_sentences):
            if words_emitted >= target_words:
                break
            sentence_target = 1 + int(rng.poisson(max(0.0, style.words_per_sentence - 1)))
            phrases: list[tuple[str, list[tuple[str, str]]]] = []
            count = 0
            while count < sentence_target:
                kind = _PHRASE_KINDS[int(rng.choice(3, p=sampler.phrase_probs))]
                length = 1 + int(rng.poisson(1.0))
                words: list[tuple[str, str]] = []
                for _ in range(length):
                    u = rng.random()
                    s = style
                    if u < s.keyword_rate:
                        surface = s.keyword_pool[int(rng.integers(0, len(s.keyword_pool)))]
                        pos = _PHRASE_POS[kind]
                    elif u < s.keyword_rate + s.hapax_rate:
                        surface = _fresh_word(rng, sampler.sample_length(rng), sampler.vocab_words)
                        pos = _PHRASE_POS[kind]
                    elif u < s.keyword_rate + s.hapax_rate + s.unknown_rate:
                        surface = _fresh_word(rng, sampler.sample_length(rng), sampler.vocab_words)
                        pos = POS_UNKNOWN
                    elif (
                        u < s.keyword_rate + s.hapax_rate + s.unknown_rate + s.redup_rate
                        and prev_word is not None
                    ):
                        if rng.random() < 0.5:
                            surface, pos = prev_word, POS_REDUP
                        else:
                            surface, pos = _echo_mutate(prev_word, rng), POS_ECHO
                    else:
                        surface = sampler.vocab_word(rng)
                        pos = _PHRASE_POS[kind]
                    words.append((surface, pos))
                    prev_word = surface
                phrases.append((kind, words))
                count += length
            words_emitted += count
            dialog: Optional[tuple[int, int]] = None
            if r > 0 and rng.random() < style.dialog_rate:
                i = int(rng.integers(0, len(phrases)))
                j = int(rng.integers(i, len(phrases)))
                dialog = (i, j)
            paragraph.append(phrases)
            para_dialogs.append(dialog)
        if paragraph:
            paragraphs.append(paragraph)
            dialog_flags.append(para_dialogs)

    # Punctuation budget: terminals and quotes are structural, commas fill
    # the remainder so the punct fraction converges to the knob.
    n_sentences_total = sum(len(p) for p in paragraphs)
    n_dialogs = sum(1 for flags in dialog_flags for d in flags if d is not None)
    structural = (n_sentences_total if r > 0 else 0) + 2 * n_dialogs
    target_punct = round(r / (1.0 - r) * words_emitted)
    n_commas = max(0, target_punct - structural)

    # Comma slots are phrase boundaries (never inside a phrase).
    slots: list[tuple[int, int, int]] = []
    for p_idx, paragraph in enumerate(paragraphs):
        for s_idx, phrases in enumerate(paragraph):
            for boundary in range(1, len(phrases)):
                slots.append((p_idx, s_idx, boundary))
    comma_counts: dict[tuple[int, int, int], int] = {}
    if slots and n_commas:
        for pick in rng.integers(0, len(slots), size=n_commas):
            comma_counts[slots[int(pick)]] = comma_counts.get(slots[int(pick)], 0) + 1

    para_texts: list[str] = []
    all_tags: list[tuple[str, str, str]] = []  # surface, pos, chunk
    for p_idx, paragraph in enumerate(paragraphs):
        sentence_texts: list[str] = []
        for s_idx, phrases in enumerate(paragraph):
            dialog = dialog_flags[p_idx][s_idx]
            parts: list[str] = []
            for ph_idx, (kind, words) in enumerate(phrases):
                if ph_idx > 0:
                    for _ in range(comma_counts.get((p_idx, s_idx, ph_idx), 0)):
                        parts.append(",")
                        all_tags.append((",", POS_PUNCT, "O"))
                if dialog is not None and ph_idx == dialog[0]:
                    parts.append('"')
                    all_tags.append(('"', POS_PUNCT, "O"))
                for w_idx, (surface, pos) in enumerate(words):
                    chunk = ("B-" if w_idx == 0 else "I-") + kind
                    parts.append(surface)
                    all_tags.append((surface, pos, chunk))
                if dialog is not None and ph_idx == dialog[1]:
                    parts.append('"')
                    all_tags.append(('"', POS_PUNCT, "O"))
            if r > 0:
                parts.append(".")
                all_tags.append((".", POS_PUNCT, "O"))
            sentence_texts.append(" ".join(parts))
        para_texts.append(" ".join(sentence_texts))
    text = "\n\n".join(para_texts) + "\n"

    para_spans, sent_spans, surfaces = segment(text)
    if [t[0] for t in all_tags] != surfaces:
        raise RuntimeError("internal error: rendered text does not re-segment to its tokens")
    tokens = tuple(AnnotatedToken(s, pos, chunk) for s, pos, chunk in all_tags)
    return _build_document(doc_id, text, tokens, sent_spans, para_spans, author)


def generate_synthetic_corpus(spec: SynthSpec) -> list[Document]:
    """Deterministically generate the corpus described by ``spec``."""
    spec.validate()
    root = np.random.SeedSequence(spec.seed)
    streams = root.spawn(1 + len(spec.authors) * spec.docs_per_author)
    vocab = _build_vocab(spec, np.random.default_rng(streams[0]))
    docs: list[Document] = []
    for a_idx, (author, style) in enumerate(spec.authors):
        sampler = _AuthorSampler(style, vocab)
        for d_idx in range(spec.docs_per_author):
            stream = streams[1 + a_idx * spec.docs_per_author + d_idx]
            rng = np.random.default_rng(stream)
            docs.append(
                _generate_document(
                    f"{author}/doc{d_idx:04d}", author, sampler,
                    spec.tokens_per_doc, rng,
                )
            )
    return docs
