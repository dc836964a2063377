"""Feature-building orchestration shared by the CLI and tests.

Turns a split-tagged corpus into the per-family feature matrices: 23
dummy-coded audio columns, 4 sentiment scores, PCA-reduced TF-IDF vectors,
and PCA-reduced affect count vectors (valence and arousal each). All
vocabulary and PCA models are fitted on the training split only.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from songmood.dataset import Corpus, audio_matrix, raw_audio_matrix
from songmood.evaluation import SELECTED_AUDIO_FEATURES
from songmood.numerics import PcaModel, fit_pca, transform_pca
from songmood.selection import (
    FeatureMatrix,
    FeatureSubset,
    fuse,
    select_significant_audio,
)
from songmood.text_features import (
    AffectLexicon,
    SentimentLexicon,
    fit_tfidf,
    tokenize_lemmatize,
    transform_tfidf,
    vader_sentiment,
    xanew_features,
)

log = logging.getLogger(__name__)

SENTIMENT_COLUMNS = ("sent_neg", "sent_neu", "sent_pos", "sent_compound")


@dataclass
class FeatureArtifacts:
    audio: FeatureMatrix          # 23 dummy-coded columns
    audio_selected: FeatureMatrix
    vader: FeatureMatrix          # 4 sentiment columns
    tfidf: FeatureMatrix          # PCA-reduced tf-idf components
    anew: FeatureMatrix           # PCA-reduced affect counts, both targets
    fused_all: FeatureMatrix      # audio + vader + tfidf
    fused_selected: FeatureMatrix
    audio_subset: FeatureSubset | tuple[str, ...]
    raw_audio: np.ndarray         # 11 base features per song
    raw_audio_names: tuple[str, ...]
    targets: dict[str, np.ndarray]
    splits: dict[str, np.ndarray]
    models: dict

    def modality_matrices(self) -> dict[str, FeatureMatrix]:
        """The three matrices the result grid trains on (selected subsets)."""
        return {
            "audio": self.audio_selected,
            "lyrics": fuse([self.vader, self.tfidf]),
            "multi": self.fused_selected,
        }

    def lyric_parts(self) -> dict[str, FeatureMatrix]:
        return {"tfidf": self.tfidf, "anew": self.anew, "vader": self.vader}


def effective_pca_k(requested: int, n_train: int, d: int) -> int:
    """Clamp the component count to what the training data can support."""
    cap = min(n_train - 1, d)
    if requested > cap:
        log.info("reducing PCA components from %d to %d", requested, cap)
    return max(1, min(requested, cap))


def _pca_block(train_rows: np.ndarray, all_rows: np.ndarray, k: int,
               prefix: str, tag: str, row_ids: tuple[str, ...]):
    k_eff = effective_pca_k(k, train_rows.shape[0], train_rows.shape[1])
    model = fit_pca(train_rows, k_eff)
    values = transform_pca(model, all_rows)
    names = tuple(f"{prefix}_pc{j + 1}" for j in range(k_eff))
    fm = FeatureMatrix(
        values=values, column_names=names,
        modality_tags=(tag,) * k_eff, row_ids=row_ids,
    )
    return fm, model


def build_features(corpus: Corpus,
                   sentiment_lexicon: SentimentLexicon,
                   affect_lexicon: AffectLexicon,
                   max_vocab: int = 20000,
                   pca_k: int = 100,
                   audio_subset: str | tuple[str, ...] = "paper",
                   alpha: float = 0.05,
                   seed: int = 0) -> FeatureArtifacts:
    """Build every feature family for a split-tagged corpus.

    audio_subset: "paper" uses the published five-feature set, "auto" runs
    the significance filter on the training split, or pass explicit base
    feature names.
    """
    splits = corpus.split_indices()
    if len(splits["train"]) == 0:
        raise ValueError("training split is empty; assign splits first")
    row_ids = tuple(corpus.song_ids())
    targets = corpus.targets()
    train_idx = splits["train"]

    audio_values, audio_cols = audio_matrix(corpus)
    audio_fm = FeatureMatrix(
        values=audio_values, column_names=audio_cols,
        modality_tags=("audio",) * len(audio_cols), row_ids=row_ids,
    )
    raw_audio, raw_names = raw_audio_matrix(corpus)

    docs = [tokenize_lemmatize(corpus.lyrics[sid]) for sid in row_ids]
    sentiments = [
        vader_sentiment(corpus.lyrics[sid], sentiment_lexicon) for sid in row_ids
    ]
    vader_fm = FeatureMatrix(
        values=np.array([[s.neg, s.neu, s.pos, s.compound] for s in sentiments]),
        column_names=SENTIMENT_COLUMNS,
        modality_tags=("sentiment",) * 4,
        row_ids=row_ids,
    )

    vocab = fit_tfidf([docs[i] for i in train_idx], max_vocab=max_vocab)
    tfidf_rows = np.array([transform_tfidf(doc, vocab) for doc in docs])
    tfidf_fm, tfidf_pca = _pca_block(
        tfidf_rows[train_idx], tfidf_rows, pca_k, "tfidf", "tfidf", row_ids,
    )

    anew_pairs = [xanew_features(doc, affect_lexicon) for doc in docs]
    anew_v = np.array([p[0] for p in anew_pairs])
    anew_a = np.array([p[1] for p in anew_pairs])
    anew_v_fm, anew_v_pca = _pca_block(
        anew_v[train_idx], anew_v, pca_k, "anew_v", "xanew", row_ids,
    )
    anew_a_fm, anew_a_pca = _pca_block(
        anew_a[train_idx], anew_a, pca_k, "anew_a", "xanew", row_ids,
    )
    anew_fm = fuse([anew_v_fm, anew_a_fm])

    fused_all = fuse([audio_fm, vader_fm, tfidf_fm])

    if audio_subset == "paper":
        subset: FeatureSubset | tuple[str, ...] = SELECTED_AUDIO_FEATURES
        audio_sel_cols = list(SELECTED_AUDIO_FEATURES)
    elif audio_subset == "auto":
        train_audio = FeatureMatrix(
            values=audio_fm.values[train_idx],
            column_names=audio_fm.column_names,
            modality_tags=audio_fm.modality_tags,
            row_ids=tuple(row_ids[i] for i in train_idx),
        )
        train_targets = {k: v[train_idx] for k, v in targets.items()}
        subset = select_significant_audio(train_audio, train_targets, alpha=alpha)
        audio_sel_cols = list(subset.columns)
    else:
        subset = tuple(audio_subset)
        audio_sel_cols = list(subset)

    audio_selected_fm = audio_fm.select_columns(audio_sel_cols)
    fused_selected = fuse([audio_selected_fm, vader_fm, tfidf_fm])

    return FeatureArtifacts(
        audio=audio_fm, audio_selected=audio_selected_fm, vader=vader_fm,
        tfidf=tfidf_fm, anew=anew_fm,
        fused_all=fused_all, fused_selected=fused_selected,
        audio_subset=subset, raw_audio=raw_audio, raw_audio_names=raw_names,
        targets=targets, splits=splits,
        models={
            "tfidf_vocabulary": vocab,
            "tfidf_pca": tfidf_pca,
            "anew_valence_pca": anew_v_pca,
            "anew_arousal_pca": anew_a_pca,
        },
    )
