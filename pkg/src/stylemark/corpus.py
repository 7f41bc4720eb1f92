"""Documents: segmentation, annotation, dialog detection, and disk I/O.

A Document is an immutable, fully segmented text unit: annotated tokens,
sentence and paragraph structure, and quote-delimited dialog spans.
Annotation normally comes from a tab-separated annotation file (one
``surface<TAB>pos<TAB>chunk`` line per token, blank line between
sentences, ``#PARA`` between paragraphs); without one, a small heuristic
annotator fills in what it can.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .exceptions import AnnotationError, CorpusError

# Half-open index range [start, end).
Span = tuple[int, int]

SENTENCE_TERMINALS = frozenset({".", "!", "?", "।"})  # incl. danda
_QUOTE_CLOSER = {'"': '"', "“": "”"}  # opener -> matching closer

CHUNK_TAGS = frozenset({"B-NP", "I-NP", "B-VP", "I-VP", "B-CP", "I-CP", "O"})

POS_PUNCT = "PUNC"
POS_UNKNOWN = "UNK"
POS_REDUP = "RDP"
POS_ECHO = "ECHO"
POS_WORD = "WORD"

ANNOTATION_EXT = ".ann"
_PARA_MARK = "#PARA"


def is_punct_surface(surface: str) -> bool:
    """True when every character is Unicode punctuation."""
    return bool(surface) and all(
        unicodedata.category(ch).startswith("P") for ch in surface
    )


@dataclass(frozen=True)
class AnnotatedToken:
    """One token with its part-of-speech and chunk tag.

    The boolean views are derived: punctuation from the surface itself,
    unknown/reduplication/echo from the pos tag (UNK, RDP, ECHO).
    """

    surface: str
    pos: str
    chunk: str

    def __post_init__(self) -> None:
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if self.chunk not in CHUNK_TAGS:
            raise ValueError(f"invalid chunk tag {self.chunk!r}")

    @property
    def is_punct(self) -> bool:
        return is_punct_surface(self.surface)

    @property
    def is_unknown(self) -> bool:
        return self.pos == POS_UNKNOWN

    @property
    def is_redup_or_echo(self) -> bool:
        return self.pos in (POS_REDUP, POS_ECHO)


def _check_partition(ranges: Sequence[Span], total: int, what: str) -> None:
    expected = 0
    for start, end in ranges:
        if start != expected or end < start:
            raise ValueError(f"{what} ranges do not partition 0..{total}")
        expected = end
    if expected != total:
        raise ValueError(f"{what} ranges do not cover 0..{total}")


@dataclass(frozen=True)
class Document:
    """Immutable segmented document.

    ``sentences`` are token-index ranges partitioning the token list,
    ``paragraphs`` are sentence-index ranges partitioning the sentence
    list, and ``dialogs`` are non-overlapping token-index ranges.
    """

    id: str
    text: str
    tokens: tuple[AnnotatedToken, ...]
    sentences: tuple[Span, ...]
    paragraphs: tuple[Span, ...]
    dialogs: tuple[Span, ...] = ()
    author: Optional[str] = None

    def __post_init__(self) -> None:
        _check_partition(self.sentences, len(self.tokens), "sentence")
        _check_partition(self.paragraphs, len(self.sentences), "paragraph")
        last_end = 0
        for start, end in self.dialogs:
            if start < last_end or end < start or end > len(self.tokens):
                raise ValueError("dialog ranges must be ordered, disjoint and in bounds")
            last_end = end
        for tok in self.tokens:
            if tok.is_punct and tok.chunk != "O":
                raise ValueError(
                    f"punctuation token {tok.surface!r} must carry chunk tag O"
                )

    @property
    def surfaces(self) -> tuple[str, ...]:
        return tuple(t.surface for t in self.tokens)

    def word_tokens(self) -> list[AnnotatedToken]:
        """Tokens that are not punctuation."""
        return [t for t in self.tokens if not t.is_punct]

    def sentence_tokens(self, index: int) -> tuple[AnnotatedToken, ...]:
        start, end = self.sentences[index]
        return self.tokens[start:end]


def _split_whitespace_chunk(chunk: str) -> list[str]:
    """Split one whitespace-delimited chunk into word and punctuation tokens.

    Punctuation is split off as separate tokens; consecutive repeats of the
    same punctuation character stay together (so an ellipsis is one token
    while ``."`` becomes two).
    """
    tokens: list[str] = []
    current: list[str] = []
    mode: Optional[str] = None  # "w" for word run, else the punct char
    for ch in chunk:
        if unicodedata.category(ch).startswith("P"):
            key = ch
        else:
            key = "w"
        if mode is not None and key != mode:
            tokens.append("".join(current))
            current = []
        current.append(ch)
        mode = key
    if current:
        tokens.append("".join(current))
    return tokens


def _is_terminal_token(surface: str) -> bool:
    return is_punct_surface(surface) and surface[0] in SENTENCE_TERMINALS


def segment(text: str) -> tuple[list[Span], list[Span], list[str]]:
    """Segment raw text into paragraphs, sentences, and token surfaces.

    Returns ``(paragraphs, sentences, tokens)`` where paragraphs are
    sentence-index ranges and sentences are token-index ranges. Tokens are
    whitespace-split with punctuation separated out; a sentence closes at
    the last of a run of terminal punctuation tokens (., !, ?, danda), and
    paragraph breaks (blank lines) or end of text close an open sentence.
    """
    paragraphs: list[Span] = []
    sentences: list[Span] = []
    tokens: list[str] = []

    blocks = [b for b in re.split(r"\n\s*\n", text) if b.strip()]
    for block in blocks:
        para_sent_start = len(sentences)
        block_tokens: list[str] = []
        for chunk in block.split():
            block_tokens.extend(_split_whitespace_chunk(chunk))
        sent_start = len(tokens)
        for i, surface in enumerate(block_tokens):
            tokens.append(surface)
            closes = _is_terminal_token(surface) and (
                i + 1 >= len(block_tokens)
                or not _is_terminal_token(block_tokens[i + 1])
            )
            if closes:
                sentences.append((sent_start, len(tokens)))
                sent_start = len(tokens)
        if sent_start < len(tokens):  # end of paragraph closes open sentence
            sentences.append((sent_start, len(tokens)))
        if len(sentences) > para_sent_start:
            paragraphs.append((para_sent_start, len(sentences)))
    return paragraphs, sentences, tokens


def _paragraph_token_span(
    sentences: Sequence[Span], paragraph: Span
) -> Span:
    first, last = paragraph
    return sentences[first][0], sentences[last - 1][1]


def _detect_dialog_spans(
    surfaces: Sequence[str],
    sentences: Sequence[Span],
    paragraphs: Sequence[Span],
) -> list[Span]:
    spans: list[Span] = []
    for paragraph in paragraphs:
        start, end = _paragraph_token_span(sentences, paragraph)
        open_start: Optional[int] = None
        closer: Optional[str] = None
        for i in range(start, end):
            surface = surfaces[i]
            if not is_punct_surface(surface):
                continue
            ch = surface[0]
            if open_start is None:
                if ch in _QUOTE_CLOSER:
                    open_start = i + 1
                    closer = _QUOTE_CLOSER[ch]
            elif ch == closer:
                spans.append((open_start, i))
                open_start = None
                closer = None
        if open_start is not None:  # unclosed quote runs to paragraph end
            spans.append((open_start, end))
    return spans


def detect_dialogs(doc: Document) -> list[Span]:
    """Token ranges of quote-delimited dialog spans, paragraph by paragraph."""
    return _detect_dialog_spans(doc.surfaces, doc.sentences, doc.paragraphs)


def heuristic_annotate(
    surfaces: Sequence[str], known_vocab: Optional[Iterable[str]] = None
) -> tuple[AnnotatedToken, ...]:
    """Annotate token surfaces without a parse.

    Punctuation is detected from the surface; a token equal to its
    predecessor is tagged RDP, one differing from its predecessor only in
    the first character is tagged ECHO, and tokens absent from
    ``known_vocab`` (when one is supplied) are tagged UNK. Everything gets
    chunk tag O.
    """
    vocab = None if known_vocab is None else set(known_vocab)
    tokens: list[AnnotatedToken] = []
    for i, surface in enumerate(surfaces):
        if is_punct_surface(surface):
            pos = POS_PUNCT
        else:
            prev = surfaces[i - 1] if i > 0 else None
            if prev is not None and surface == prev:
                pos = POS_REDUP
            elif (
                prev is not None
                and len(surface) == len(prev)
                and surface[1:] == prev[1:]
                and surface[0] != prev[0]
            ):
                pos = POS_ECHO
            elif vocab is not None and surface not in vocab:
                pos = POS_UNKNOWN
            else:
                pos = POS_WORD
        tokens.append(AnnotatedToken(surface, pos, "O"))
    return tuple(tokens)


def _parse_annotation_file(path: Path) -> list[tuple[str, str, str, int]]:
    entries: list[tuple[str, str, str, int]] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read annotation file {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise AnnotationError(f"annotation file {path} is not valid UTF-8: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.strip() == _PARA_MARK:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise AnnotationError(
                f"{path}:{lineno}: expected 'surface<TAB>pos<TAB>chunk', got {line!r}"
            )
        surface, pos, chunk = parts
        if chunk not in CHUNK_TAGS:
            raise AnnotationError(f"{path}:{lineno}: invalid chunk tag {chunk!r}")
        entries.append((surface, pos, chunk, lineno))
    return entries


def _align_annotations(
    path: Path, surfaces: Sequence[str], entries: list[tuple[str, str, str, int]]
) -> tuple[AnnotatedToken, ...]:
    tokens: list[AnnotatedToken] = []
    for i, surface in enumerate(surfaces):
        if i >= len(entries):
            missing_line = entries[-1][3] + 1 if entries else 1
            raise AnnotationError(
                f"{path}:{missing_line}: annotation ends but text has "
                f"{len(surfaces) - len(entries)} more token(s), next is {surface!r}"
            )
        ann_surface, pos, chunk, lineno = entries[i]
        if ann_surface != surface:
            raise AnnotationError(
                f"{path}:{lineno}: annotation token {ann_surface!r} does not "
                f"match text token {surface!r}"
            )
        try:
            tokens.append(AnnotatedToken(surface, pos, chunk))
        except ValueError as exc:
            raise AnnotationError(f"{path}:{lineno}: {exc}") from exc
    if len(entries) > len(surfaces):
        extra = entries[len(surfaces)]
        raise AnnotationError(
            f"{path}:{extra[3]}: annotation has {len(entries) - len(surfaces)} "
            f"extra token line(s) beyond the text, first is {extra[0]!r}"
        )
    return tuple(tokens)


def _build_document(
    doc_id: str,
    text: str,
    tokens: tuple[AnnotatedToken, ...],
    sentences: Sequence[Span],
    paragraphs: Sequence[Span],
    author: Optional[str],
) -> Document:
    dialogs = _detect_dialog_spans(
        [t.surface for t in tokens], sentences, paragraphs
    )
    return Document(
        id=doc_id,
        text=text,
        tokens=tokens,
        sentences=tuple(sentences),
        paragraphs=tuple(paragraphs),
        dialogs=tuple(dialogs),
        author=author,
    )


def document_from_text(
    text: str,
    doc_id: str = "doc",
    author: Optional[str] = None,
    known_vocab: Optional[Iterable[str]] = None,
) -> Document:
    """Build a Document from raw text using the heuristic annotator."""
    paragraphs, sentences, surfaces = segment(text)
    tokens = heuristic_annotate(surfaces, known_vocab)
    return _build_document(doc_id, text, tokens, sentences, paragraphs, author)


def load_document(
    text_path: str | Path,
    annotation_path: Optional[str | Path] = None,
    *,
    doc_id: Optional[str] = None,
    author: Optional[str] = None,
) -> Document:
    """Load and segment a UTF-8 text file, with optional annotation file.

    When an annotation file is given its token lines must align one-to-one
    with the segmented text; the first mismatching line is reported.
    """
    text_path = Path(text_path)
    try:
        text = text_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {text_path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise CorpusError(f"{text_path} is not valid UTF-8: {exc}") from exc
    paragraphs, sentences, surfaces = segment(text)
    if annotation_path is not None:
        entries = _parse_annotation_file(Path(annotation_path))
        tokens = _align_annotations(Path(annotation_path), surfaces, entries)
    else:
        tokens = heuristic_annotate(surfaces)
    return _build_document(
        doc_id or text_path.stem, text, tokens, sentences, paragraphs, author
    )


def annotations_to_string(doc: Document) -> str:
    """Serialize a document's annotations to the annotation-file format."""
    lines: list[str] = []
    for p_index, (p_start, p_end) in enumerate(doc.paragraphs):
        for s_index in range(p_start, p_end):
            t_start, t_end = doc.sentences[s_index]
            for token in doc.tokens[t_start:t_end]:
                lines.append(f"{token.surface}\t{token.pos}\t{token.chunk}")
            lines.append("")
        if p_index + 1 < len(doc.paragraphs):
            lines.append(_PARA_MARK)
    return "\n".join(lines) + ("\n" if lines else "")


def write_annotations(doc: Document, path: str | Path) -> None:
    Path(path).write_text(annotations_to_string(doc), encoding="utf-8")


def load_corpus(
    corpus_dir: str | Path, annotation_ext: str = ANNOTATION_EXT
) -> list[Document]:
    """Load a corpus laid out as one subdirectory per author.

    Every ``*.txt`` file becomes a Document labeled with its directory
    name; an annotation file sharing the basename (``.ann`` by default) is
    used when present. Ordering is lexicographic and therefore stable.
    """
    root = Path(corpus_dir)
    if not root.is_dir():
        raise CorpusError(f"corpus directory {root} does not exist")
    docs: list[Document] = []
    for author_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for text_path in sorted(author_dir.glob("*.txt")):
            ann_path = text_path.with_suffix(annotation_ext)
            docs.append(
                load_document(
                    text_path,
                    ann_path if ann_path.exists() else None,
                    doc_id=f"{author_dir.name}/{text_path.stem}",
                    author=author_dir.name,
                )
            )
    if not docs:
        raise CorpusError(f"no documents found under {root}")
    return docs
