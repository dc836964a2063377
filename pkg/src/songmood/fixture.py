"""Synthetic fixture corpus with a known generative model.

Valence and arousal targets are linear in danceability, energy and the
lyric compound sentiment (computed by the package's own sentiment scorer
on generated lyrics) plus Gaussian noise, so pipeline recovery can be
checked against the analytic noise ceiling. The remaining audio features
are independent distractors.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from songmood.dataset import AudioFeatureVector, Corpus, SongRecord, assign_splits
from songmood.text_features import load_sentiment_lexicon, vader_sentiment
from songmood.text_features.tokenize import lemmatize_word

FIXTURE_SEED = 727
FIXTURE_SIZE = 500
NOISE_SIGMA = 0.1

VALENCE_WEIGHTS = {"danceability": 0.7, "energy": 0.6, "compound": 0.3}
AROUSAL_WEIGHTS = {"danceability": -0.4, "energy": 0.6, "compound": 0.2}
INJECTED_AUDIO_FEATURES = ("danceability", "energy")

POSITIVE_POOL = (
    "love", "happy", "joy", "wonderful", "beautiful", "great", "good",
    "sweet", "peace", "smile", "hope", "dream", "shine", "free", "magic",
    "angel", "heaven", "treasure", "gentle", "warm", "bless", "glory",
    "paradise", "bliss", "kind", "brave", "lucky", "glad", "proud", "pure",
    "calm", "rich", "true", "trust", "win", "friend", "hero", "grace",
    "charm", "delight", "merry", "jolly", "noble", "special", "sincere",
    "smart", "strong", "safe", "laughter", "sunshine",
)
NEGATIVE_POOL = (
    "sad", "pain", "hate", "fear", "dark", "broken", "lonely", "cry",
    "tears", "death", "evil", "devil", "hell", "misery", "sorrow", "grief",
    "terror", "nightmare", "anger", "angry", "bitter", "cruel", "ugly",
    "wicked", "trouble", "doom", "gloom", "despair", "torture", "torment",
    "agony", "wound", "curse", "poison", "savage", "vile", "wreck", "ruin",
    "shame", "guilt", "regret", "mourn", "weep", "rage", "panic", "dread",
    "horror", "sick", "weak", "alone",
)
NEUTRAL_POOL = (
    "the", "a", "an", "and", "or", "in", "on", "at", "by", "to", "of",
    "from", "with", "into", "through", "about", "between", "again", "then",
    "now", "here", "there", "where", "when", "while", "before", "after",
    "tonight", "today", "yesterday", "tomorrow", "morning", "evening",
    "night", "day", "week", "year", "hour", "minute", "moment", "time",
    "street", "road", "city", "town", "house", "home", "room", "door",
    "window", "wall", "floor", "ceiling", "roof", "garden", "yard", "field",
    "river", "lake", "ocean", "sea", "shore", "sand", "stone", "rock",
    "mountain", "valley", "hill", "forest", "tree", "leaf", "branch",
    "grass", "sky", "cloud", "rain", "snow", "wind", "storm", "thunder",
    "mist", "fog", "sun", "moon", "star", "light", "shadow", "color",
    "sound", "voice", "echo", "song", "verse", "chorus", "melody", "rhythm",
    "drum", "guitar", "piano", "radio", "record", "tape", "phone", "letter",
    "paper", "book", "page", "word", "line", "story", "name", "number",
    "train", "bus", "car", "wheel", "engine", "highway", "bridge", "corner",
    "station", "ticket", "suitcase", "coat", "hat", "shoe", "pocket",
    "mirror", "table", "chair", "bed", "lamp", "candle", "bottle", "glass",
    "cup", "coffee", "tea", "bread", "water", "silver", "gold", "iron",
    "copper", "cotton", "silk", "thread", "needle", "button", "bell",
    "clock", "watch", "key", "lock", "chain", "rope", "ladder", "boat",
    "harbor", "island", "map", "flag", "tower", "castle", "village",
    "market", "shop", "coin", "penny", "dollar", "hand", "finger", "arm",
    "shoulder", "head", "hair", "eye", "ear", "mouth", "bone", "skin",
    "step", "walk", "ride", "turn", "reach", "hear", "listen", "watch",
    "wait", "stay", "leave", "arrive", "return", "wander", "follow",
    "carry", "hold", "drop", "lift", "push", "pull", "open", "close",
    "speak", "whisper", "call", "answer", "ask", "tell", "say", "know",
    "think", "remember", "forget", "sleep", "wake", "stand", "sit",
)


@dataclass
class FixtureData:
    song_ids: list[str]
    audio: dict[str, AudioFeatureVector]
    lyrics: dict[str, str]
    valence: np.ndarray
    arousal: np.ndarray
    compound: np.ndarray
    valence_signal: np.ndarray   # targets minus noise
    arousal_signal: np.ndarray
    sigma: float
    seed: int

    def corpus(self, split_seed: int | None = None) -> Corpus:
        records = tuple(
            SongRecord(
                song_id=sid, artist=f"Fixture Artist {i % 40}",
                title=f"Fixture Song {i}",
                valence_target=float(self.valence[i]),
                arousal_target=float(self.arousal[i]),
            )
            for i, sid in enumerate(self.song_ids)
        )
        corpus = Corpus(records=records, audio=dict(self.audio),
                        lyrics=dict(self.lyrics))
        if split_seed is not None:
            corpus = assign_splits(corpus, seed=split_seed)
        return corpus


def _make_lyrics(rng: np.random.Generator, sentiment_level: float) -> str:
    """Compose lyric-like text whose computed compound tracks the level."""
    n_sentiment = int(rng.integers(3, 11))
    n_neutral = int(rng.integers(40, 80))
    p_pos = (1.0 + sentiment_level) / 2.0
    words = []
    for _ in range(n_sentiment):
        pool = POSITIVE_POOL if rng.random() < p_pos else NEGATIVE_POOL
        words.append(pool[rng.integers(0, len(pool))])
    for _ in range(n_neutral):
        words.append(NEUTRAL_POOL[rng.integers(0, len(NEUTRAL_POOL))])
    order = rng.permutation(len(words))
    shuffled = [words[i] for i in order]
    lines = [
        " ".join(shuffled[k:k + 7]) for k in range(0, len(shuffled), 7)
    ]
    return "\n".join(lines) + "\n"


def generate_fixture(n: int = FIXTURE_SIZE, seed: int = FIXTURE_SEED,
                     sigma: float = NOISE_SIGMA) -> FixtureData:
    rng = np.random.default_rng(seed)
    lexicon = load_sentiment_lexicon()

    song_ids = [f"fx{seed % 10000:04d}-{i:04d}" for i in range(n)]
    audio: dict[str, AudioFeatureVector] = {}
    lyrics: dict[str, str] = {}
    compound = np.zeros(n)

    for i, sid in enumerate(song_ids):
        vec = AudioFeatureVector(
            acousticness=float(rng.uniform(0, 1)),
            danceability=float(rng.uniform(0, 1)),
            energy=float(rng.uniform(0, 1)),
            instrumentalness=float(rng.uniform(0, 1)),
            liveness=float(rng.uniform(0, 1)),
            loudness=float(rng.uniform(-30, -5)),
            speechiness=float(rng.uniform(0, 1)),
            tempo=float(rng.uniform(60, 180)),
            valence=float(rng.uniform(0, 1)),
            mode=int(rng.random() < 0.6),
            key=int(rng.integers(-1, 12)),
        )
        audio[sid] = vec
        text = _make_lyrics(rng, float(rng.uniform(-1, 1)))
        lyrics[sid] = text
        compound[i] = vader_sentiment(text, lexicon).compound

    dance = np.array([audio[sid].danceability for sid in song_ids])
    energy = np.array([audio[sid].energy for sid in song_ids])

    valence_signal = (
        VALENCE_WEIGHTS["danceability"] * dance
        + VALENCE_WEIGHTS["energy"] * energy
        + VALENCE_WEIGHTS["compound"] * compound
    )
    arousal_signal = (
        AROUSAL_WEIGHTS["danceability"] * dance
        + AROUSAL_WEIGHTS["energy"] * energy
        + AROUSAL_WEIGHTS["compound"] * compound
    )
    valence = valence_signal + rng.normal(0.0, sigma, n)
    arousal = arousal_signal + rng.normal(0.0, sigma, n)

    return FixtureData(
        song_ids=song_ids, audio=audio, lyrics=lyrics,
        valence=valence, arousal=arousal, compound=compound,
        valence_signal=valence_signal, arousal_signal=arousal_signal,
        sigma=sigma, seed=seed,
    )


def fixture_affect_lexicon_rows(rng_seed: int = 11) -> list[tuple[str, float, float]]:
    """Affect lexicon covering the fixture vocabulary (lemma keys).

    Positive pool words get high valence ratings, negative ones low, and a
    slice of the neutral pool fills the lexicon out past 100 entries so
    100-component PCA on the count vectors is well-posed.
    """
    rng = np.random.default_rng(rng_seed)
    rows: dict[str, tuple[float, float]] = {}
    for word in POSITIVE_POOL:
        rows.setdefault(
            lemmatize_word(word),
            (round(float(rng.uniform(6.5, 8.7)), 2),
             round(float(rng.uniform(3.0, 7.5)), 2)),
        )
    for word in NEGATIVE_POOL:
        rows.setdefault(
            lemmatize_word(word),
            (round(float(rng.uniform(1.3, 3.5)), 2),
             round(float(rng.uniform(3.5, 8.0)), 2)),
        )
    for word in NEUTRAL_POOL[:60]:
        rows.setdefault(
            lemmatize_word(word),
            (round(float(rng.uniform(4.0, 6.0)), 2),
             round(float(rng.uniform(2.5, 5.5)), 2)),
        )
    return [(w, v, a) for w, (v, a) in sorted(rows.items())]


def write_fixture(out_dir: str | Path, data: FixtureData | None = None) -> Path:
    """Write the bundled corpus layout: CSV + lyrics dir + audio store."""
    out_dir = Path(out_dir)
    data = data or generate_fixture()
    corpus_dir = out_dir / "corpus"
    lyrics_dir = corpus_dir / "lyrics"
    lyrics_dir.mkdir(parents=True, exist_ok=True)

    with open(corpus_dir / "songs.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["song_id", "artist", "title", "valence", "arousal"])
        for i, sid in enumerate(data.song_ids):
            writer.writerow([
                sid, f"Fixture Artist {i % 40}", f"Fixture Song {i}",
                repr(float(data.valence[i])), repr(float(data.arousal[i])),
            ])

    for sid in data.song_ids:
        (lyrics_dir / f"{sid}.txt").write_text(data.lyrics[sid], encoding="utf-8")

    store = {sid: data.audio[sid].to_mapping() for sid in data.song_ids}
    (corpus_dir / "audio_features.json").write_text(
        json.dumps(store, sort_keys=True, indent=0), encoding="utf-8"
    )

    with open(corpus_dir / "affect_lexicon.csv", "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "valence_mean", "arousal_mean"])
        for word, v, a in fixture_affect_lexicon_rows():
            writer.writerow([word, v, a])

    meta = {
        "seed": data.seed,
        "sigma": data.sigma,
        "n_songs": len(data.song_ids),
        "valence_weights": VALENCE_WEIGHTS,
        "arousal_weights": AROUSAL_WEIGHTS,
        "injected_audio_features": list(INJECTED_AUDIO_FEATURES),
        "valence_signal": [repr(float(v)) for v in data.valence_signal],
        "compound": [repr(float(c)) for c in data.compound],
    }
    (corpus_dir / "meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=1), encoding="utf-8"
    )
    return corpus_dir
