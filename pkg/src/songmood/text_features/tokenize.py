"""Deterministic tokenizer and rule-based English lemmatizer.

Tokens are lowercased alphabetic runs; the only punctuation kept is an
apostrophe inside a word. Lemmatization applies an exception dictionary
(which doubles as a protection list) and a small set of suffix rules,
iterated to a fixed point, so lemmatizing a lemma never changes it.
The output is approximate by design; exceptions cover the common
irregulars and false friends of the suffix rules.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

_WORD_RE = re.compile(r"[a-z]+(?:'[a-z]+)*")

# Stems ending in these doubled letters keep the double (fall, kiss, buzz).
_KEEP_DOUBLE = {"ll", "ss", "zz", "ee", "oo"}

_VOWELS = "aeiou"


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]
    lemmas: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@lru_cache(maxsize=1)
def _exceptions() -> dict[str, str]:
    text = (
        resources.files("songmood.data")
        .joinpath("lemma_exceptions.tsv")
        .read_text(encoding="utf-8")
    )
    table: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, lemma = line.split("\t")
        table[word] = lemma
    return table


def _undouble(stem: str) -> str:
    if (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and stem[-1] not in _VOWELS
        and stem[-2:] not in _KEEP_DOUBLE
    ):
        return stem[:-1]
    return stem


def _apply_suffix_rules(word: str) -> str:
    """One pass of suffix stripping; returns the word unchanged if no rule fits."""
    n = len(word)
    if word.endswith("ies") and n > 4:
        return word[:-3] + "y"
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("es") and n > 3:
        stem = word[:-2]
        if stem.endswith(("s", "x", "z", "ch", "sh", "o")):
            return stem
    if word.endswith("s") and n > 3 and not word.endswith(("ss", "us", "is", "'s")):
        return word[:-1]
    if word.endswith("ing") and n > 5:
        stem = word[:-3]
        if len(stem) >= 3:
            return _undouble(stem)
    if word.endswith("ied") and n > 4:
        return word[:-3] + "y"
    if word.endswith("ed") and n > 4 and not word.endswith("eed"):
        stem = word[:-2]
        if len(stem) >= 3:
            return _undouble(stem)
    if word.endswith("est") and n > 5:
        stem = word[:-3]
        if len(stem) >= 3:
            return _undouble(stem)
    if word.endswith("er") and n > 4:
        stem = word[:-2]
        if len(stem) >= 3:
            return _undouble(stem)
    return word


def lemmatize_word(word: str) -> str:
    """Lemmatize a single lowercase token (fixed point of the rule set)."""
    exceptions = _exceptions()
    current = word
    while True:
        if current in exceptions:
            return exceptions[current]
        reduced = _apply_suffix_rules(current)
        if reduced == current:
            return current
        # every rule strictly shortens the word, so this terminates
        current = reduced


def tokenize_lemmatize(text: str) -> TokenSequence:
    """Tokenize lyrics text into lowercase words and their lemmas."""
    tokens = tuple(_WORD_RE.findall(text.lower()))
    lemmas = tuple(lemmatize_word(t) for t in tokens)
    return TokenSequence(tokens=tokens, lemmas=lemmas)
