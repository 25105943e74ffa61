"""Sentence segmentation, tokenization, syllable estimation, and readability.

All functions here are pure and deterministic, so they are safe to call from
any number of concurrent tasks. The segmenter and syllable counter are
rule-based on purpose: evaluation texts are short, and a dependency-free
deterministic pipeline keeps every downstream number reproducible.

Readability formulas:
    Flesch-Kincaid grade  https://en.wikipedia.org/wiki/Flesch%E2%80%93Kincaid_readability_tests
    Flesch reading ease   same page; reported raw, NOT clamped to [0, 100]
"""

from __future__ import annotations

import os
import re
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .model import ReadabilityReport, SentenceRecord, rel_position


class UnsupportedLanguageWarning(UserWarning):
    """No hyphenation table for the requested language; English heuristic used."""


@dataclass(frozen=True)
class TokenizedSentence:
    sentence: SentenceRecord
    words: list[str]


_TERMINALS = ".!?…"
_CLOSERS = "\"'”’»)]}"
_OPENERS = "\"'“‘«([{"

# Suppress sentence breaks after these (case-insensitive, trailing dot included).
_ABBREVIATIONS = frozenset(
    ["dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "vs.", "e.g.", "i.e.", "etc."]
)

# A word is a maximal run of letters/digits/apostrophes; underscore and all
# other punctuation separate tokens. Curly apostrophes are normalized first.
_TOKEN_RE = re.compile(r"(?:[^\W_]|')+", re.UNICODE)

_VOWELS = frozenset("aeiouy")


def _word_tokens(text: str) -> list[str]:
    normalized = text.replace("’", "'").lower()
    # drop apostrophe-only runs: a token must contain a letter or digit
    return [t for t in _TOKEN_RE.findall(normalized) if any(c.isalnum() for c in t)]


def _is_boundary(text: str, end: int) -> tuple[bool, int]:
    """Decide whether the terminal run ending at `end` (exclusive) breaks a
    sentence; returns (is_break, index where the next sentence starts)."""
    j = end
    while j < len(text) and text[j] in _CLOSERS:
        j += 1
    if j >= len(text):
        return True, len(text)
    if not text[j].isspace():
        return False, end
    k = j
    while k < len(text) and text[k].isspace():
        k += 1
    if k >= len(text):
        return True, len(text)
    nxt = text[k]
    if nxt.isupper() or nxt.isdigit() or nxt in _OPENERS:
        return True, k
    return False, end


def _abbreviation_before(text: str, dot_index: int) -> bool:
    start = dot_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start : dot_index + 1].lstrip(_OPENERS).lower()
    return token in _ABBREVIATIONS


def segment(text: str, language: str = "en") -> list[SentenceRecord]:
    """Split text into sentence records.

    Breaks after [.?!…] (plus any closing quotes/brackets) when followed by
    whitespace and an uppercase letter, opening quote, or digit; a fixed
    abbreviation list suppresses false breaks. Sentence texts partition the
    non-whitespace characters of the input, so nothing is lost or duplicated.
    """
    stripped = text.strip()
    if not stripped:
        return []

    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    while i < len(stripped):
        if stripped[i] in _TERMINALS:
            run_end = i + 1
            while run_end < len(stripped) and stripped[run_end] in _TERMINALS:
                run_end += 1
            is_single_period = stripped[i] == "." and run_end == i + 1
            if is_single_period and _abbreviation_before(stripped, i):
                i = run_end
                continue
            breaks, next_start = _is_boundary(stripped, run_end)
            if breaks:
                spans.append((start, next_start))
                start = next_start
            i = run_end
        else:
            i += 1
    if start < len(stripped):
        spans.append((start, len(stripped)))

    texts = [stripped[a:b].strip() for a, b in spans]
    texts = [t for t in texts if t]
    n = len(texts)
    records = []
    for idx, sentence_text in enumerate(texts):
        words = _word_tokens(sentence_text)
        syllables = sum(count_syllables(w, language) for w in words)
        records.append(
            SentenceRecord(
                index=idx,
                text=sentence_text,
                rel_pos=rel_position(idx, n),
                word_count=len(words),
                syllable_count=syllables,
            )
        )
    return records


def tokenize(sentence: SentenceRecord) -> TokenizedSentence:
    """Lowercased word tokens of one sentence; punctuation discarded."""
    return TokenizedSentence(sentence=sentence, words=_word_tokens(sentence.text))


# --------------------------------------------------------------------------
# Syllables
# --------------------------------------------------------------------------

_pattern_cache: dict[tuple[str, str], dict[str, list[int]] | None] = {}
_warned_languages: set[str] = set()


def _parse_pattern(line: str) -> tuple[str, list[int]]:
    letters = []
    values = [0]
    for ch in line.strip():
        if ch.isdigit():
            values[-1] = int(ch)
        else:
            letters.append(ch)
            values.append(0)
    return "".join(letters), values


def load_hyphenation_table(language: str, directory: str | Path) -> dict[str, list[int]] | None:
    """Load a TeX-style hyphenation pattern file `<directory>/<language>.txt`
    (one pattern per line); returns None when the file is absent."""
    key = (str(directory), language)
    if key in _pattern_cache:
        return _pattern_cache[key]
    path = Path(directory) / f"{language}.txt"
    table: dict[str, list[int]] | None
    if not path.is_file():
        table = None
    else:
        table = {}
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("%"):
                continue
            letters, values = _parse_pattern(line)
            if letters:
                table[letters] = values
    _pattern_cache[key] = table
    return table


def _hyphenation_syllables(word: str, table: dict[str, list[int]]) -> int:
    wrapped = f".{word.lower()}."
    points = [0] * (len(wrapped) + 1)
    for i in range(len(wrapped)):
        for j in range(i + 1, len(wrapped) + 1):
            values = table.get(wrapped[i:j])
            if values is None:
                continue
            for k, v in enumerate(values):
                if v > points[i + k]:
                    points[i + k] = v
    # odd values at gaps strictly inside the word mark break opportunities
    breaks = sum(1 for p in points[2 : len(wrapped) - 1] if p % 2 == 1)
    return max(breaks + 1, 1)


def _english_syllables(word: str) -> int:
    groups = 0
    prev_vowel = False
    for ch in word:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if word.endswith("e"):
        ends_consonant_le = (
            len(word) >= 3 and word.endswith("le") and word[-3] not in _VOWELS
        )
        if not ends_consonant_le:
            groups -= 1
    return max(groups, 1)


def count_syllables(word: str, language: str = "en", pattern_dir: str | Path | None = None) -> int:
    """Estimated syllable count, always >= 1.

    English uses a vowel-group heuristic: count maximal runs of a/e/i/o/u/y,
    subtract one for a trailing silent "e" unless the word ends in
    consonant+"le", floor at 1. Other languages route through a hyphenation
    pattern table when one exists in `pattern_dir`; otherwise the English
    heuristic is applied and an UnsupportedLanguageWarning is emitted once.
    """
    if not word:
        raise ValueError("word must be non-empty")
    word = word.lower()
    if language != "en":
        if pattern_dir is None:
            pattern_dir = os.environ.get("SIMPGRID_HYPHENATION_DIR")
        if pattern_dir is not None:
            table = load_hyphenation_table(language, pattern_dir)
            if table:
                return _hyphenation_syllables(word, table)
        if language not in _warned_languages:
            _warned_languages.add(language)
            warnings.warn(
                f"no hyphenation table for language {language!r}; "
                "falling back to the English heuristic",
                UnsupportedLanguageWarning,
                stacklevel=2,
            )
    return _english_syllables(word)


# --------------------------------------------------------------------------
# Readability
# --------------------------------------------------------------------------


def readability(
    text_sentences: list[TokenizedSentence],
    source_word_count: int | None = None,
) -> ReadabilityReport:
    """Readability report over tokenized sentences.

    fk_grade = 0.39*(W/S) + 11.8*(Syl/W) - 15.59
    fre      = 206.835 - 1.015*(W/S) - 84.6*(Syl/W), reported unclamped

    Degenerate input (no sentence or no word) yields the all-zero report.
    `compression_ratio` = W / source_word_count when a source count is given.
    """
    sentence_count = len(text_sentences)
    word_count = sum(len(ts.words) for ts in text_sentences)
    syllable_count = sum(ts.sentence.syllable_count for ts in text_sentences)

    if source_word_count is None:
        compression = None
    elif source_word_count > 0:
        compression = word_count / source_word_count
    else:
        compression = 0.0

    if sentence_count == 0 or word_count == 0:
        return ReadabilityReport(
            word_count=0,
            sentence_count=sentence_count,
            avg_sentence_length=0.0,
            syllable_count=0,
            fk_grade=0.0,
            fre=0.0,
            compression_ratio=compression,
        )

    words_per_sentence = word_count / sentence_count
    syllables_per_word = syllable_count / word_count
    fk_grade = 0.39 * words_per_sentence + 11.8 * syllables_per_word - 15.59
    fre = 206.835 - 1.015 * words_per_sentence - 84.6 * syllables_per_word
    return ReadabilityReport(
        word_count=word_count,
        sentence_count=sentence_count,
        avg_sentence_length=words_per_sentence,
        syllable_count=syllable_count,
        fk_grade=fk_grade,
        fre=fre,
        compression_ratio=compression,
    )


def word_frequency(text_sentences: list[TokenizedSentence]) -> dict[str, int]:
    """Counts over lowercase tokens; the counts sum to the total word count."""
    counts: Counter[str] = Counter()
    for ts in text_sentences:
        counts.update(ts.words)
    return dict(counts)
