"""Character and POS n-gram features over a shared sparse vocabulary.

Character n-grams: the text is whitespace-tokenized, every token is padded
with a single ``_`` on each side, and all windows of the requested orders
are emitted except windows made of pad marks only.  For ``self-defense``
and orders 1..3 this yields 12 unigrams, 13 bigrams and 12 trigrams.

POS n-grams: plain windows over the unpadded tag stream.

Counts are per *sample* (all documents pooled) and scaled either linearly
or as log2(1 + count), selectable per channel.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import ConfigError, DataError

CHAR = "char"
POS = "pos"
PAD = "_"

LINEAR = "linear"
LOG2 = "log2"


class FeatureKey(NamedTuple):
    channel: str  # CHAR or POS
    gram: tuple[str, ...]


class ScalingPolicy(NamedTuple):
    char_scale: str = LINEAR
    pos_scale: str = LINEAR


def default_policy(language: str, task: str = "gender") -> ScalingPolicy:
    """Per-language scaling defaults: log-scaled POS counts for Spanish,
    linear everywhere else.  `task` is accepted for symmetry but unused."""
    if language == "es":
        return ScalingPolicy(LINEAR, LOG2)
    if language in ("en", "it", "nl"):
        return ScalingPolicy(LINEAR, LINEAR)
    raise ConfigError(f"unsupported language {language!r}")


def _check_order(n_min: int, n_max: int) -> None:
    if not (1 <= n_min <= n_max <= 3):
        raise ConfigError(f"n-gram orders must satisfy 1 <= n_min <= n_max <= 3, got ({n_min}, {n_max})")


def char_ngrams(text: str, n_min: int = 1, n_max: int = 3) -> Counter:
    """Multiset of padded character n-grams of orders n_min..n_max."""
    _check_order(n_min, n_max)
    grams: Counter = Counter()
    for token in text.split():
        padded = PAD + token + PAD
        for n in range(n_min, n_max + 1):
            for i in range(len(padded) - n + 1):
                window = padded[i : i + n]
                if window == PAD * n:
                    continue
                grams[FeatureKey(CHAR, tuple(window))] += 1
    return grams


def pos_ngrams(stream: list[str], n_min: int = 1, n_max: int = 3) -> Counter:
    """Multiset of unpadded tag n-grams of orders n_min..n_max."""
    _check_order(n_min, n_max)
    grams: Counter = Counter()
    for n in range(n_min, n_max + 1):
        for i in range(len(stream) - n + 1):
            grams[FeatureKey(POS, tuple(stream[i : i + n]))] += 1
    return grams


@dataclass
class SparseVector:
    entries: dict[int, float]
    dimension: int


@dataclass
class Vocabulary:
    """Bijection between feature keys and column ids, ordered by channel
    then lexicographic gram so construction order never matters."""

    keys: list[FeatureKey]
    min_df: int
    index: dict[FeatureKey, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {key: col for col, key in enumerate(self.keys)}

    def __len__(self) -> int:
        return len(self.keys)

    def column(self, key: FeatureKey) -> int | None:
        return self.index.get(key)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        for key in self.keys:
            h.update(_key_line(key).encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()

    def save(self, path) -> None:
        from .corpus import open_text

        n_char = sum(1 for k in self.keys if k.channel == CHAR)
        n_pos = len(self.keys) - n_char
        with open_text(path, "wt") as fh:
            fh.write(f"styloprof-vocab-v1\tchar={n_char}\tpos={n_pos}\tmin_df={self.min_df}\n")
            for col, key in enumerate(self.keys):
                fh.write(f"{_key_line(key)}\t{col}\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        from .corpus import open_text

        with open_text(path) as fh:
            header = fh.readline().rstrip("\n").split("\t")
            if not header or header[0] != "styloprof-vocab-v1":
                raise DataError(f"{path}: not a styloprof-vocab-v1 file")
            try:
                min_df = int(dict(p.split("=", 1) for p in header[1:])["min_df"])
            except (KeyError, ValueError) as exc:
                raise DataError(f"{path}: bad vocabulary header") from exc
            keys = []
            for lineno, raw in enumerate(fh, start=2):
                parts = raw.rstrip("\n").split("\t")
                if len(parts) != 3:
                    raise DataError(f"{path}:{lineno}: expected 3 tab-separated fields")
                channel, joined, col = parts
                if channel not in (CHAR, POS):
                    raise DataError(f"{path}:{lineno}: unknown channel {channel!r}")
                if int(col) != len(keys):
                    raise DataError(f"{path}:{lineno}: columns out of order")
                keys.append(FeatureKey(channel, _split_units(joined)))
        return cls(keys=keys, min_df=min_df)


UNIT_SEP = "␟"  # printable unit-separator symbol

_ESCAPES = {"\\": "\\\\", UNIT_SEP: "\\U", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "U": UNIT_SEP, "t": "\t", "n": "\n", "r": "\r"}


def _escape_unit(unit: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in unit)


def _unescape_unit(unit: str) -> str:
    out = []
    i = 0
    while i < len(unit):
        ch = unit[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(unit) or unit[i + 1] not in _UNESCAPES:
            raise DataError(f"bad escape sequence in vocabulary unit: {unit!r}")
        out.append(_UNESCAPES[unit[i + 1]])
        i += 2
    return "".join(out)


def _key_line(key: FeatureKey) -> str:
    return f"{key.channel}\t{UNIT_SEP.join(_escape_unit(u) for u in key.gram)}"


def _split_units(joined: str) -> tuple[str, ...]:
    return tuple(_unescape_unit(u) for u in joined.split(UNIT_SEP))


def build_vocabulary(samples: Iterable[tuple[Counter, Counter]], min_df: int = 2) -> Vocabulary:
    """Vocabulary of keys occurring in at least `min_df` distinct training
    samples.  Build from training data only."""
    if min_df < 1:
        raise ConfigError(f"min_df must be >= 1, got {min_df}")
    df: Counter = Counter()
    n = 0
    for char_counts, pos_counts in samples:
        n += 1
        seen = set(char_counts)
        seen.update(pos_counts)
        df.update(seen)
    if n == 0:
        raise DataError("cannot build a vocabulary from an empty training set")
    keys = sorted(key for key, d in df.items() if d >= min_df)
    return Vocabulary(keys=keys, min_df=min_df)


def vectorize(char_counts: Counter, pos_counts: Counter, vocab: Vocabulary,
              policy: ScalingPolicy) -> SparseVector:
    """Scaled sparse vector over `vocab`; out-of-vocabulary grams dropped."""
    if len(vocab) == 0:
        raise DataError("empty vocabulary")
    entries: dict[int, float] = {}
    for counts, scale in ((char_counts, policy.char_scale), (pos_counts, policy.pos_scale)):
        for key, count in counts.items():
            col = vocab.index.get(key)
            if col is None or count == 0:
                continue
            value = float(count) if scale == LINEAR else math.log2(1.0 + count)
            entries[col] = value
    return SparseVector(entries=entries, dimension=len(vocab))
