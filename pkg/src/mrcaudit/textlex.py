"""Tokenization and sentence splitting.

Both operations are deterministic and offset-preserving so sentence indices
and token spans stay identical across runs and machines.

Tokenization rule: tokens are maximal non-whitespace runs. The normalized
form strips leading and trailing punctuation and case-folds; interior
punctuation ("27-24", "u.s") is preserved. Tokens whose normalized form is
empty stay in the surface stream but are skipped by consumers of the
normalized stream.

Sentence rule: a boundary is placed after a run of terminal punctuation
(. ! ?) plus optional closing quotes/brackets when it is followed by
whitespace and an uppercase letter or digit, unless the preceding token is a
known abbreviation. A newline always ends a sentence. Raw sentence slices
tile the input text exactly, trailing whitespace attaching to the sentence
it follows.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass


@dataclass(frozen=True)
class Token:
    surface: str
    norm: str
    start: int
    end: int


@dataclass(frozen=True)
class Sentence:
    index: int
    raw: str
    tokens: tuple[Token, ...]

    @property
    def norms(self) -> tuple[str, ...]:
        return tuple(t.norm for t in self.tokens if t.norm)


_TOKEN_RE = re.compile(r"\S+")
_STRIP_CHARS = string.punctuation + "‘’“”–—…«»¡¿"

_TERMINALS = ".!?"
_CLOSERS = "\"')]’”»"

# Lowercased token suffixes (including the period) that do not end a sentence.
ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "rev.", "gen.", "gov.", "sen.",
        "rep.", "col.", "sgt.", "lt.", "cpl.", "capt.", "jr.", "sr.", "st.",
        "mt.", "ft.", "no.", "nos.", "vs.", "etc.", "e.g.", "i.e.", "cf.",
        "approx.", "dept.", "est.", "fig.", "inc.", "ltd.", "co.", "corp.",
        "u.s.", "u.k.", "u.n.", "d.c.", "a.m.", "p.m.", "jan.", "feb.",
        "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.",
        "nov.", "dec.",
    }
)


def tokenize(text: str) -> list[Token]:
    """Split text into offset-carrying tokens. Empty text gives an empty list."""
    tokens = []
    for match in _TOKEN_RE.finditer(text):
        surface = match.group()
        norm = surface.strip(_STRIP_CHARS).casefold()
        tokens.append(Token(surface, norm, match.start(), match.end()))
    return tokens


def norms(tokens) -> list[str]:
    """The normalized stream: non-empty normalized forms in token order."""
    return [t.norm for t in tokens if t.norm]


def _ends_with_abbreviation(text: str, end: int) -> bool:
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:end].casefold() in ABBREVIATIONS


def _boundaries(text: str) -> list[int]:
    starts = []
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch == "\n":
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j < n:
                starts.append(j)
            i = j
            continue
        if ch in _TERMINALS:
            j = i + 1
            while j < n and text[j] in _TERMINALS:
                j += 1
            k = j
            while k < n and text[k] in _CLOSERS:
                k += 1
            w = k
            while w < n and text[w].isspace() and text[w] != "\n":
                w += 1
            if w < n and w > k and (text[w].isupper() or text[w].isdigit()):
                if not _ends_with_abbreviation(text, j):
                    starts.append(w)
            i = j
            continue
        i += 1
    return starts


def split_sentences(text: str) -> list[Sentence]:
    """Split a passage into sentences whose raw slices tile the text."""
    if not text:
        return []
    starts = [0] + _boundaries(text)
    sentences = []
    for idx, start in enumerate(starts):
        end = starts[idx + 1] if idx + 1 < len(starts) else len(text)
        raw = text[start:end]
        sentences.append(Sentence(idx, raw, tuple(tokenize(raw))))
    return sentences


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Character (start, end) pairs of each sentence slice in the text."""
    spans = []
    offset = 0
    for sentence in split_sentences(text):
        spans.append((offset, offset + len(sentence.raw)))
        offset += len(sentence.raw)
    return spans
