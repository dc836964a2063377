"""Corpus ingestion: song metadata CSV + lyrics directory + audio store.

A corpus keeps only songs present in all three sources; records are ordered
by song_id so reloading identical inputs reproduces the corpus exactly.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

SPLITS = ("train", "validation", "test")

# Continuous features first (alphabetical), then mode, then the key
# indicators; "none" is the no-key-detected category (-1).
CONTINUOUS_AUDIO_FEATURES = (
    "acousticness", "danceability", "energy", "instrumentalness",
    "liveness", "loudness", "speechiness", "tempo", "valence",
)
UNIT_INTERVAL_FEATURES = (
    "acousticness", "danceability", "energy", "instrumentalness",
    "liveness", "speechiness", "valence",
)
PITCH_CLASS_NAMES = ("C", "Cs", "D", "Ds", "E", "F", "Fs", "G", "Gs", "A", "As", "B")
KEY_COLUMN_NAMES = ("key_none",) + tuple(f"key_{p}" for p in PITCH_CLASS_NAMES)
DUMMY_AUDIO_COLUMNS = CONTINUOUS_AUDIO_FEATURES + ("mode",) + KEY_COLUMN_NAMES

BASE_AUDIO_FEATURES = CONTINUOUS_AUDIO_FEATURES + ("mode", "key")


class IngestionError(ValueError):
    """Raised for malformed corpus inputs."""


@dataclass(frozen=True)
class SongRecord:
    song_id: str
    artist: str
    title: str
    valence_target: float
    arousal_target: float
    split: str | None = None


@dataclass(frozen=True)
class AudioFeatureVector:
    acousticness: float
    danceability: float
    energy: float
    instrumentalness: float
    liveness: float
    loudness: float
    speechiness: float
    tempo: float
    valence: float
    mode: int
    key: int

    def validate(self) -> None:
        for name in UNIT_INTERVAL_FEATURES:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v!r} outside [0, 1]")
        if not math.isfinite(self.loudness):
            raise ValueError(f"loudness={self.loudness!r} not finite")
        if not (math.isfinite(self.tempo) and self.tempo >= 0):
            raise ValueError(f"tempo={self.tempo!r} must be >= 0")
        if self.mode not in (0, 1):
            raise ValueError(f"mode={self.mode!r} must be 0 or 1")
        if not (-1 <= self.key <= 11):
            raise ValueError(f"key={self.key!r} outside -1..11")

    @classmethod
    def from_mapping(cls, obj: dict) -> "AudioFeatureVector":
        vec = cls(
            acousticness=float(obj["acousticness"]),
            danceability=float(obj["danceability"]),
            energy=float(obj["energy"]),
            instrumentalness=float(obj["instrumentalness"]),
            liveness=float(obj["liveness"]),
            loudness=float(obj["loudness"]),
            speechiness=float(obj["speechiness"]),
            tempo=float(obj["tempo"]),
            valence=float(obj["valence"]),
            mode=int(obj["mode"]),
            key=int(obj["key"]),
        )
        vec.validate()
        return vec

    def to_mapping(self) -> dict:
        return {
            "acousticness": self.acousticness,
            "danceability": self.danceability,
            "energy": self.energy,
            "instrumentalness": self.instrumentalness,
            "liveness": self.liveness,
            "loudness": self.loudness,
            "speechiness": self.speechiness,
            "tempo": self.tempo,
            "valence": self.valence,
            "mode": self.mode,
            "key": self.key,
        }


@dataclass(frozen=True)
class Corpus:
    """Immutable song corpus; records sorted by song_id."""

    records: tuple[SongRecord, ...]
    audio: dict[str, AudioFeatureVector]
    lyrics: dict[str, str]

    def __len__(self) -> int:
        return len(self.records)

    def song_ids(self) -> list[str]:
        return [r.song_id for r in self.records]

    def targets(self) -> dict[str, np.ndarray]:
        return {
            "valence": np.array([r.valence_target for r in self.records]),
            "arousal": np.array([r.arousal_target for r in self.records]),
        }

    def split_indices(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for split in SPLITS:
            out[split] = np.array(
                [i for i, r in enumerate(self.records) if r.split == split],
                dtype=int,
            )
        return out


def _read_dataset_csv(dataset_csv: Path) -> list[SongRecord]:
    required = ["song_id", "artist", "title", "valence", "arousal"]
    records: list[SongRecord] = []
    seen: set[str] = set()
    with open(dataset_csv, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != required:
            raise IngestionError(
                f"{dataset_csv}: expected header {','.join(required)}, "
                f"got {reader.fieldnames}"
            )
        for lineno, row in enumerate(reader, start=2):
            if any(row.get(c) is None for c in required):
                raise IngestionError(f"{dataset_csv}: malformed row {lineno}")
            song_id = row["song_id"].strip()
            if not song_id:
                raise IngestionError(f"{dataset_csv}: empty song_id at row {lineno}")
            if song_id in seen:
                raise IngestionError(
                    f"{dataset_csv}: duplicate song_id {song_id!r} at row {lineno}"
                )
            seen.add(song_id)
            try:
                valence = float(row["valence"])
                arousal = float(row["arousal"])
            except ValueError as exc:
                raise IngestionError(
                    f"{dataset_csv}: non-numeric target at row {lineno}: {exc}"
                ) from None
            if not (math.isfinite(valence) and math.isfinite(arousal)):
                raise IngestionError(
                    f"{dataset_csv}: non-finite target at row {lineno}"
                )
            records.append(SongRecord(
                song_id=song_id, artist=row["artist"], title=row["title"],
                valence_target=valence, arousal_target=arousal,
            ))
    return records


def _read_audio_store(audio_store: Path) -> dict[str, AudioFeatureVector]:
    raw = json.loads(Path(audio_store).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise IngestionError(f"{audio_store}: expected a JSON object keyed by song_id")
    out: dict[str, AudioFeatureVector] = {}
    for song_id, obj in raw.items():
        if obj is None:
            continue  # fetched but feature-less; excluded downstream
        try:
            out[song_id] = AudioFeatureVector.from_mapping(obj)
        except (KeyError, TypeError, ValueError) as exc:
            log.warning("audio store: dropping %s (%s)", song_id, exc)
    return out


def load_corpus(dataset_csv: str | Path, lyrics_dir: str | Path,
                audio_store: str | Path) -> Corpus:
    """Load and intersect the three corpus sources.

    Songs missing lyrics or audio (or with unreadable lyrics / invalid audio
    entries) are dropped; per-source drop counts are logged.
    """
    dataset_csv = Path(dataset_csv)
    lyrics_dir = Path(lyrics_dir)
    records = _read_dataset_csv(dataset_csv)
    audio = _read_audio_store(Path(audio_store))

    kept: list[SongRecord] = []
    lyrics: dict[str, str] = {}
    missing_lyrics = missing_audio = 0
    for rec in records:
        if rec.song_id not in audio:
            missing_audio += 1
            continue
        lyric_path = lyrics_dir / f"{rec.song_id}.txt"
        if not lyric_path.is_file():
            missing_lyrics += 1
            continue
        try:
            text = lyric_path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            log.warning("dropping %s: unreadable lyrics (%s)", rec.song_id, exc)
            missing_lyrics += 1
            continue
        lyrics[rec.song_id] = text
        kept.append(rec)

    kept.sort(key=lambda r: r.song_id)
    log.info(
        "loaded %d songs (%d in CSV; dropped %d without audio, %d without lyrics)",
        len(kept), len(records), missing_audio, missing_lyrics,
    )
    return Corpus(
        records=tuple(kept),
        audio={r.song_id: audio[r.song_id] for r in kept},
        lyrics=lyrics,
    )


def dummy_encode_audio(v: AudioFeatureVector) -> tuple[np.ndarray, tuple[str, ...]]:
    """Expand one audio vector to the 23-column dummy-coded form.

    Layout: 9 continuous features, mode, then 13 key indicators (no-key
    plus the 12 pitch classes). Exactly one key indicator is 1.
    """
    v.validate()
    values = np.zeros(len(DUMMY_AUDIO_COLUMNS))
    for i, name in enumerate(CONTINUOUS_AUDIO_FEATURES):
        values[i] = getattr(v, name)
    values[len(CONTINUOUS_AUDIO_FEATURES)] = v.mode
    key_offset = len(CONTINUOUS_AUDIO_FEATURES) + 1
    values[key_offset + (v.key + 1)] = 1.0
    return values, DUMMY_AUDIO_COLUMNS


def audio_matrix(corpus: Corpus) -> tuple[np.ndarray, tuple[str, ...]]:
    """Dummy-coded audio features for every record, in corpus order."""
    rows = [dummy_encode_audio(corpus.audio[r.song_id])[0] for r in corpus.records]
    return np.array(rows), DUMMY_AUDIO_COLUMNS


def raw_audio_matrix(corpus: Corpus) -> tuple[np.ndarray, tuple[str, ...]]:
    """The 11 raw (un-dummied) audio features per record."""
    rows = [
        [getattr(corpus.audio[r.song_id], name) for name in BASE_AUDIO_FEATURES]
        for r in corpus.records
    ]
    return np.array(rows, dtype=float), BASE_AUDIO_FEATURES


def assign_splits(corpus: Corpus, ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
                  seed: int = 0) -> Corpus:
    """Tag every record train/validation/test by a seeded uniform shuffle."""
    if len(corpus) == 0:
        raise ValueError("cannot split an empty corpus")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios {ratios} do not sum to 1")

    n = len(corpus)
    n_train = round(ratios[0] * n)
    n_val = round(ratios[1] * n)
    if n_train + n_val > n:
        n_val = n - n_train
    perm = np.random.default_rng(seed).permutation(n)

    tags = [""] * n
    for pos, idx in enumerate(perm):
        if pos < n_train:
            tags[idx] = "train"
        elif pos < n_train + n_val:
            tags[idx] = "validation"
        else:
            tags[idx] = "test"

    records = tuple(replace(r, split=tags[i]) for i, r in enumerate(corpus.records))
    return Corpus(records=records, audio=corpus.audio, lyrics=corpus.lyrics)
