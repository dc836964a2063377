"""Rule-based lexicon sentiment scoring (the VADER procedure).

Reimplements the published VADER heuristics: token valences from a rating
lexicon, a three-token backward window of degree modifiers and negations,
ALL-CAPS and punctuation emphasis, contrastive 'but' rescaling, a handful
of idioms, and the S/sqrt(S^2 + alpha) compound normalization.

The lexicon is a data file; boosters and negations default to the published
word lists but can be overridden by sections in the lexicon file.
"""
from __future__ import annotations

import math
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

ALPHA = 15.0            # compound normalization constant
BOOST_INCR = 0.293      # degree-adverb intensity shift
BOOST_DECR = -0.293
CAPS_INCR = 0.733       # ALL-CAPS emphasis
NEGATION_SCALAR = -0.74
EXCLAIM_INCR = 0.292    # per '!', at most 4 counted
QMARK_INCR = 0.18       # per '?' for 2-3 marks, else capped
QMARK_CAP = 0.96

DEFAULT_NEGATIONS = frozenset([
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
    "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
    "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
    "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
    "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
    "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
    "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom",
    "despite",
])

DEFAULT_BOOSTERS = {
    "absolutely": BOOST_INCR, "amazingly": BOOST_INCR, "awfully": BOOST_INCR,
    "completely": BOOST_INCR, "considerable": BOOST_INCR,
    "considerably": BOOST_INCR, "decidedly": BOOST_INCR, "deeply": BOOST_INCR,
    "effing": BOOST_INCR, "enormous": BOOST_INCR, "enormously": BOOST_INCR,
    "entirely": BOOST_INCR, "especially": BOOST_INCR, "exceptional": BOOST_INCR,
    "exceptionally": BOOST_INCR, "extreme": BOOST_INCR, "extremely": BOOST_INCR,
    "fabulously": BOOST_INCR, "flipping": BOOST_INCR, "flippin": BOOST_INCR,
    "frickin": BOOST_INCR, "fricking": BOOST_INCR, "friggin": BOOST_INCR,
    "frigging": BOOST_INCR, "fully": BOOST_INCR, "fuckin": BOOST_INCR,
    "fucking": BOOST_INCR, "greatly": BOOST_INCR, "hella": BOOST_INCR,
    "highly": BOOST_INCR, "hugely": BOOST_INCR, "incredible": BOOST_INCR,
    "incredibly": BOOST_INCR, "intensely": BOOST_INCR, "major": BOOST_INCR,
    "majorly": BOOST_INCR, "more": BOOST_INCR, "most": BOOST_INCR,
    "particularly": BOOST_INCR, "purely": BOOST_INCR, "quite": BOOST_INCR,
    "really": BOOST_INCR, "remarkably": BOOST_INCR, "so": BOOST_INCR,
    "substantially": BOOST_INCR, "thoroughly": BOOST_INCR, "total": BOOST_INCR,
    "totally": BOOST_INCR, "tremendous": BOOST_INCR, "tremendously": BOOST_INCR,
    "uber": BOOST_INCR, "unbelievably": BOOST_INCR, "unusually": BOOST_INCR,
    "utter": BOOST_INCR, "utterly": BOOST_INCR, "very": BOOST_INCR,
    "almost": BOOST_DECR, "barely": BOOST_DECR, "hardly": BOOST_DECR,
    "just enough": BOOST_DECR, "kind of": BOOST_DECR, "kinda": BOOST_DECR,
    "kindof": BOOST_DECR, "kind-of": BOOST_DECR, "less": BOOST_DECR,
    "little": BOOST_DECR, "marginal": BOOST_DECR, "marginally": BOOST_DECR,
    "occasional": BOOST_DECR, "occasionally": BOOST_DECR, "partly": BOOST_DECR,
    "scarce": BOOST_DECR, "scarcely": BOOST_DECR, "slight": BOOST_DECR,
    "slightly": BOOST_DECR, "somewhat": BOOST_DECR, "sort of": BOOST_DECR,
    "sorta": BOOST_DECR, "sortof": BOOST_DECR, "sort-of": BOOST_DECR,
}

SPECIAL_IDIOMS = {
    "the shit": 3.0, "the bomb": 3.0, "bad ass": 1.5, "badass": 1.5,
    "yeah right": -2.0, "kiss of death": -1.5, "to die for": 3.0,
}


@dataclass(frozen=True)
class SentimentScores:
    neg: float
    neu: float
    pos: float
    compound: float


@dataclass(frozen=True)
class SentimentLexicon:
    ratings: dict[str, float]
    boosters: dict[str, float]
    negations: frozenset[str]

    def __post_init__(self):
        if not self.ratings:
            raise ValueError("sentiment lexicon has no ratings")
        for word, rating in self.ratings.items():
            if not math.isfinite(rating):
                raise ValueError(f"non-finite rating for {word!r}")


def load_sentiment_lexicon(path: str | Path | None = None) -> SentimentLexicon:
    """Load a rating lexicon from TSV (word<TAB>rating, extra columns ignored).

    Optional `[boosters]` / `[negations]` sections override the built-in
    modifier lists. With no path, the bundled lexicon is used.
    """
    if path is None:
        text = (
            resources.files("songmood.data")
            .joinpath("vader_lexicon.tsv")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")

    ratings: dict[str, float] = {}
    boosters: dict[str, float] = {}
    negations: set[str] = set()
    section = "ratings"
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("# "):
            continue
        if stripped.lower() in ("[ratings]", "[boosters]", "[negations]"):
            section = stripped.lower()[1:-1]
            continue
        fields = line.split("\t")
        if section == "ratings":
            ratings[fields[0]] = float(fields[1])
        elif section == "boosters":
            boosters[fields[0]] = float(fields[1])
        else:
            negations.add(fields[0])

    return SentimentLexicon(
        ratings=ratings,
        boosters=boosters or dict(DEFAULT_BOOSTERS),
        negations=frozenset(negations) if negations else DEFAULT_NEGATIONS,
    )


def _split_words(text: str) -> list[str]:
    """Whitespace tokens with leading/trailing punctuation stripped.

    Tokens that would shrink to two characters or fewer keep their
    punctuation (emoticon-style tokens survive intact).
    """
    words = []
    for token in text.split():
        stripped = token.strip(string.punctuation)
        words.append(token if len(stripped) <= 2 else stripped)
    return words


def _mixed_caps(words: list[str]) -> bool:
    n_caps = sum(1 for w in words if w.isupper())
    return 0 < len(words) - n_caps < len(words)


def _is_negation(word: str, negations: frozenset[str]) -> bool:
    wl = word.lower()
    return wl in negations or "n't" in wl


def _booster_effect(word: str, valence: float, boosters: dict[str, float],
                    caps_emphasis: bool) -> float:
    wl = word.lower()
    if wl not in boosters:
        return 0.0
    scalar = boosters[wl]
    if valence < 0:
        scalar = -scalar
    if word.isupper() and caps_emphasis:
        scalar += CAPS_INCR if valence > 0 else -CAPS_INCR
    return scalar


def _negation_window(valence: float, words: list[str], distance: int, i: int,
                     negations: frozenset[str]) -> float:
    lower = [w.lower() for w in words]
    if distance == 0:
        if _is_negation(lower[i - 1], negations):
            valence *= NEGATION_SCALAR
    elif distance == 1:
        if lower[i - 2] == "never" and lower[i - 1] in ("so", "this"):
            valence *= 1.25
        elif lower[i - 2] == "without" and lower[i - 1] == "doubt":
            pass
        elif _is_negation(lower[i - 2], negations):
            valence *= NEGATION_SCALAR
    elif distance == 2:
        if (lower[i - 3] == "never"
                and (lower[i - 2] in ("so", "this") or lower[i - 1] in ("so", "this"))):
            valence *= 1.25
        elif (lower[i - 3] == "without"
                and (lower[i - 2] == "doubt" or lower[i - 1] == "doubt")):
            pass
        elif _is_negation(lower[i - 3], negations):
            valence *= NEGATION_SCALAR
    return valence


def _idiom_adjust(valence: float, words: list[str], i: int,
                  boosters: dict[str, float]) -> float:
    lower = [w.lower() for w in words]
    back = [
        f"{lower[i - 1]} {lower[i]}",
        f"{lower[i - 2]} {lower[i - 1]} {lower[i]}",
        f"{lower[i - 2]} {lower[i - 1]}",
        f"{lower[i - 3]} {lower[i - 2]} {lower[i - 1]}",
        f"{lower[i - 3]} {lower[i - 2]}",
    ]
    for seq in back:
        if seq in SPECIAL_IDIOMS:
            valence = SPECIAL_IDIOMS[seq]
            break
    if len(lower) - 1 > i:
        ahead = f"{lower[i]} {lower[i + 1]}"
        if ahead in SPECIAL_IDIOMS:
            valence = SPECIAL_IDIOMS[ahead]
    if len(lower) - 1 > i + 1:
        ahead2 = f"{lower[i]} {lower[i + 1]} {lower[i + 2]}"
        if ahead2 in SPECIAL_IDIOMS:
            valence = SPECIAL_IDIOMS[ahead2]
    for ngram in (back[3], back[4], back[2]):
        if ngram in boosters:
            valence += boosters[ngram]
    return valence


def _least_adjust(valence: float, words: list[str], i: int,
                  lexicon: SentimentLexicon) -> float:
    lower = [w.lower() for w in words]
    if i > 1 and lower[i - 1] not in lexicon.ratings and lower[i - 1] == "least":
        if lower[i - 2] != "at" and lower[i - 2] != "very":
            valence *= NEGATION_SCALAR
    elif i > 0 and lower[i - 1] not in lexicon.ratings and lower[i - 1] == "least":
        valence *= NEGATION_SCALAR
    return valence


def _token_valence(words: list[str], i: int, lexicon: SentimentLexicon,
                   caps_emphasis: bool) -> float:
    word = words[i]
    wl = word.lower()
    if wl not in lexicon.ratings:
        return 0.0
    valence = lexicon.ratings[wl]

    # 'no' right before a lexicon word acts as a negation, not as a token
    if (wl == "no" and i != len(words) - 1
            and words[i + 1].lower() in lexicon.ratings):
        valence = 0.0
    if ((i > 0 and words[i - 1].lower() == "no")
            or (i > 1 and words[i - 2].lower() == "no")
            or (i > 2 and words[i - 3].lower() == "no"
                and words[i - 1].lower() in ("or", "nor"))):
        valence = lexicon.ratings[wl] * NEGATION_SCALAR

    if word.isupper() and caps_emphasis:
        valence += CAPS_INCR if valence > 0 else -CAPS_INCR

    for distance in range(3):
        prev = i - (distance + 1)
        if prev < 0 or words[prev].lower() in lexicon.ratings:
            continue
        shift = _booster_effect(words[prev], valence, lexicon.boosters,
                                caps_emphasis)
        if distance == 1 and shift != 0:
            shift *= 0.95
        elif distance == 2 and shift != 0:
            shift *= 0.9
        valence += shift
        valence = _negation_window(valence, words, distance, i, lexicon.negations)
        if distance == 2:
            valence = _idiom_adjust(valence, words, i, lexicon.boosters)

    return _least_adjust(valence, words, i, lexicon)


def _contrast_rescale(words: list[str], valences: list[float]) -> list[float]:
    lower = [w.lower() for w in words]
    if "but" not in lower:
        return valences
    pivot = lower.index("but")
    return [
        v * 0.5 if k < pivot else (v * 1.5 if k > pivot else v)
        for k, v in enumerate(valences)
    ]


def _punctuation_emphasis(text: str) -> float:
    amp = min(text.count("!"), 4) * EXCLAIM_INCR
    qm = text.count("?")
    if qm > 1:
        amp += qm * QMARK_INCR if qm <= 3 else QMARK_CAP
    return amp


def vader_sentiment(text: str, lexicon: SentimentLexicon) -> SentimentScores:
    """Score one text; empty input yields all-zero scores."""
    words = _split_words(text)
    if not words:
        return SentimentScores(0.0, 0.0, 0.0, 0.0)

    caps_emphasis = _mixed_caps(words)
    valences: list[float] = []
    for i, word in enumerate(words):
        wl = word.lower()
        if wl in lexicon.boosters or (
                wl == "kind" and i + 1 < len(words)
                and words[i + 1].lower() == "of"):
            valences.append(0.0)
            continue
        valences.append(_token_valence(words, i, lexicon, caps_emphasis))
    valences = _contrast_rescale(words, valences)

    total = sum(valences)
    amp = _punctuation_emphasis(text)
    if total > 0:
        total += amp
    elif total < 0:
        total -= amp
    compound = total / math.sqrt(total * total + ALPHA)
    compound = max(-1.0, min(1.0, compound))

    # +/-1 per hit compensates for neutral tokens counting 1 each
    pos_mass = sum(v + 1.0 for v in valences if v > 0)
    neg_mass = sum(v - 1.0 for v in valences if v < 0)
    neu_count = sum(1 for v in valences if v == 0)
    if pos_mass > abs(neg_mass):
        pos_mass += amp
    elif pos_mass < abs(neg_mass):
        neg_mass -= amp
    mass = pos_mass + abs(neg_mass) + neu_count
    return SentimentScores(
        neg=abs(neg_mass / mass),
        neu=abs(neu_count / mass),
        pos=abs(pos_mass / mass),
        compound=compound,
    )
