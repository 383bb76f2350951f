"""Deterministic fitness for candidate feedback texts.

total = sc_len + sc_temp + sc_read - pen_forb, bounded to [-1, 3]:
  sc_len   length reward, min(n_sent, n_max) / n_max
  sc_temp  template bigram overlap, |ngrams(text) & ngrams(template)| / |ngrams(template)|
  sc_read  reading ease, clamp(FRE, 0, 100) / 100
  pen_forb forbidden-phrase rate, occurrences / n_words

No model in the loop: identical text, template, and config always produce the
identical breakdown.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from ..segmenter import split_sentences

# Conversational or boilerplate phrases that have no place in reviewer feedback.
FORBIDDEN_TERMS = (
    "Hi", "Hello", "Hey", "Dear Author", "To whom it may concern", "Greetings",
    "Good morning", "Good afternoon", "Good evening", "Haha", "Hehe", "Lmao",
    "OMG", "Wow", "FYI", "Cheers", "Best regards", "Sincerely", "I think",
)

LENGTH_REWARD_MODES = ("as-printed", "inverted")

_TOKEN = re.compile(r"[a-z0-9']+")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")


class FitnessError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class FitnessConfig:
    n_max: int = 5
    ngram_n: int = 2
    forbidden_terms: tuple[str, ...] = FORBIDDEN_TERMS
    length_reward: str = "as-printed"

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise FitnessError("n_max must be >= 1")
        if self.ngram_n < 1:
            raise FitnessError("ngram_n must be >= 1")
        if self.length_reward not in LENGTH_REWARD_MODES:
            raise FitnessError(
                f"length_reward must be one of {LENGTH_REWARD_MODES}, "
                f"got {self.length_reward!r}")
        if any(not t.strip() for t in self.forbidden_terms):
            raise FitnessError("forbidden terms must be non-blank")


@dataclass(frozen=True, slots=True)
class FitnessBreakdown:
    sc_len: float
    sc_temp: float
    sc_read: float
    pen_forb: float
    total: float

    def to_dict(self) -> dict:
        return {"sc_len": self.sc_len, "sc_temp": self.sc_temp,
                "sc_read": self.sc_read, "pen_forb": self.pen_forb,
                "total": self.total}


def tokens(text: str) -> list[str]:
    """Lowercased alphanumeric tokens; punctuation splits, apostrophes stay."""
    raw = _TOKEN.findall(text.lower())
    return [t for t in (w.strip("'") for w in raw) if t]


def count_syllables(word: str) -> int:
    """Maximal vowel groups (a e i o u y), minus one for a silent trailing 'e'
    (kept when the word ends in 'le'), floored at 1."""
    groups = len(_VOWEL_GROUP.findall(word))
    if word.endswith("e") and not word.endswith("le"):
        groups -= 1
    return max(1, groups)


def flesch_reading_ease(text: str) -> float:
    """206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words)."""
    words = tokens(text)
    n_sentences = max(1, len(split_sentences(text)))
    if not words:
        return 206.835  # vacuous text: no word terms to subtract
    n_syllables = sum(count_syllables(w) for w in words)
    return (206.835
            - 1.015 * (len(words) / n_sentences)
            - 84.6 * (n_syllables / len(words)))


def ngrams(words: Sequence[str], n: int) -> set[tuple[str, ...]]:
    if len(words) < n:
        return set()
    return {tuple(words[i:i + n]) for i in range(len(words) - n + 1)}


def _phrase_pattern(phrase: str) -> re.Pattern:
    # whole-phrase match: no letter/digit/apostrophe may touch either end
    return re.compile(
        r"(?<![A-Za-z0-9'])" + re.escape(phrase) + r"(?![A-Za-z0-9'])",
        re.IGNORECASE)


def count_forbidden(text: str, terms: Sequence[str]) -> int:
    return sum(len(_phrase_pattern(term).findall(text)) for term in terms)


def score_length(text: str, config: FitnessConfig) -> float:
    n_sent = max(1, len(split_sentences(text)))  # empty text still counts one
    capped = min(n_sent, config.n_max)
    if config.length_reward == "inverted":
        return (config.n_max - capped + 1) / config.n_max
    return capped / config.n_max


def score_template_overlap(text: str, template: str, config: FitnessConfig) -> float:
    template_grams = ngrams(tokens(template), config.ngram_n)
    if not template_grams:
        return 0.0
    text_grams = ngrams(tokens(text), config.ngram_n)
    return len(text_grams & template_grams) / len(template_grams)


def score_readability(text: str) -> float:
    fre = flesch_reading_ease(text)
    return min(100.0, max(0.0, fre)) / 100.0


def penalty_forbidden(text: str, config: FitnessConfig) -> float:
    n_words = len(tokens(text))
    if n_words == 0:
        return 0.0
    return min(1.0, count_forbidden(text, config.forbidden_terms) / n_words)


def fitness(text: str, template: str,
            config: FitnessConfig | None = None) -> FitnessBreakdown:
    config = config or FitnessConfig()
    sc_len = score_length(text, config)
    sc_temp = score_template_overlap(text, template, config)
    sc_read = score_readability(text)
    pen_forb = penalty_forbidden(text, config)
    return FitnessBreakdown(
        sc_len=sc_len, sc_temp=sc_temp, sc_read=sc_read, pen_forb=pen_forb,
        total=sc_len + sc_temp + sc_read - pen_forb,
    )
