"""Lyric feature extraction: tokenization, sentiment, TF-IDF, affect counts."""
from songmood.text_features.tokenize import TokenSequence, tokenize_lemmatize
from songmood.text_features.vader import (
    SentimentLexicon,
    SentimentScores,
    load_sentiment_lexicon,
    vader_sentiment,
)
from songmood.text_features.vectorize import (
    AffectLexicon,
    VocabularyModel,
    fit_tfidf,
    load_affect_lexicon,
    transform_tfidf,
    xanew_features,
)

__all__ = [
    "TokenSequence",
    "tokenize_lemmatize",
    "SentimentLexicon",
    "SentimentScores",
    "load_sentiment_lexicon",
    "vader_sentiment",
    "VocabularyModel",
    "fit_tfidf",
    "transform_tfidf",
    "AffectLexicon",
    "load_affect_lexicon",
    "xanew_features",
]
