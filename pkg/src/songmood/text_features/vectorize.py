"""Count-based lyric vectors: TF-IDF unigrams and affect-weighted counts."""
from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from songmood.text_features.tokenize import TokenSequence


@dataclass(frozen=True)
class VocabularyModel:
    """Fitted TF-IDF vocabulary: term -> column plus smoothed idf weights."""

    term_index: dict[str, int]
    idf: np.ndarray
    n_docs: int

    @property
    def terms(self) -> list[str]:
        ordered = [""] * len(self.term_index)
        for term, j in self.term_index.items():
            ordered[j] = term
        return ordered

    def to_json_dict(self) -> dict:
        return {
            "format": "songmood-tfidf-vocabulary",
            "version": 1,
            "terms": self.terms,
            "idf": self.idf.tolist(),
            "n_docs": self.n_docs,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "VocabularyModel":
        if obj.get("format") != "songmood-tfidf-vocabulary":
            raise ValueError("not a vocabulary artifact")
        terms = obj["terms"]
        return cls(
            term_index={t: j for j, t in enumerate(terms)},
            idf=np.asarray(obj["idf"], dtype=float),
            n_docs=int(obj["n_docs"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "VocabularyModel":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def fit_tfidf(train_docs: list[TokenSequence], max_vocab: int = 20000) -> VocabularyModel:
    """Build the lemma-unigram vocabulary and idf weights from training docs.

    The vocabulary keeps the `max_vocab` terms with the highest document
    frequency (ties broken alphabetically); columns are ordered
    alphabetically. idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1.
    """
    if max_vocab < 1:
        raise ValueError("max_vocab must be >= 1")
    df: Counter[str] = Counter()
    n_docs = 0
    for doc in train_docs:
        n_docs += 1
        df.update(set(doc.lemmas))
    if not df:
        raise ValueError("no nonempty training documents")

    ranked = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))[:max_vocab]
    terms = sorted(t for t, _ in ranked)
    idf = np.array([
        math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in terms
    ])
    return VocabularyModel(
        term_index={t: j for j, t in enumerate(terms)}, idf=idf, n_docs=n_docs,
    )


def transform_tfidf(doc: TokenSequence, vm: VocabularyModel) -> np.ndarray:
    """L2-normalized tf-idf vector; all-OOV or empty docs map to zero."""
    vec = np.zeros(len(vm.term_index))
    for lemma, count in Counter(doc.lemmas).items():
        j = vm.term_index.get(lemma)
        if j is not None:
            vec[j] = count * vm.idf[j]
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


@dataclass(frozen=True)
class AffectLexicon:
    """Word -> (valence, arousal) ratings on the source 1-9 scale."""

    words: tuple[str, ...]
    valence: np.ndarray
    arousal: np.ndarray

    def __post_init__(self):
        if len(self.words) == 0:
            raise ValueError("affect lexicon is empty")
        if not (np.isfinite(self.valence).all() and np.isfinite(self.arousal).all()):
            raise ValueError("non-finite affect ratings")
        object.__setattr__(
            self, "_index", {w: j for j, w in enumerate(self.words)}
        )

    def __len__(self) -> int:
        return len(self.words)

    def word_index(self) -> dict[str, int]:
        return self._index


def load_affect_lexicon(path: str | Path | None = None) -> AffectLexicon:
    """Load a word,valence_mean,arousal_mean CSV; default is the bundled stub."""
    if path is None:
        text = (
            resources.files("songmood.data")
            .joinpath("xanew_stub.csv")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")

    rows: dict[str, tuple[float, float]] = {}
    reader = csv.DictReader(text.splitlines())
    required = {"word", "valence_mean", "arousal_mean"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise ValueError("affect lexicon needs columns word,valence_mean,arousal_mean")
    for row in reader:
        rows[row["word"]] = (float(row["valence_mean"]), float(row["arousal_mean"]))

    words = tuple(sorted(rows))
    return AffectLexicon(
        words=words,
        valence=np.array([rows[w][0] for w in words]),
        arousal=np.array([rows[w][1] for w in words]),
    )


def xanew_features(doc: TokenSequence, lex: AffectLexicon) -> tuple[np.ndarray, np.ndarray]:
    """Affect-weighted lemma counts: count(w) * rating(w) over the lexicon."""
    counts = np.zeros(len(lex))
    index = lex.word_index()
    for lemma, count in Counter(doc.lemmas).items():
        j = index.get(lemma)
        if j is not None:
            counts[j] = count
    return counts * lex.valence, counts * lex.arousal
