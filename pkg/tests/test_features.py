"""Character/POS n-grams, scaling, vocabulary build and serialization."""

import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from styloprof.errors import ConfigError, DataError
from styloprof.features import (
    CHAR,
    LINEAR,
    LOG2,
    POS,
    FeatureKey,
    ScalingPolicy,
    Vocabulary,
    build_vocabulary,
    char_ngrams,
    default_policy,
    pos_ngrams,
    vectorize,
)

from oracles import ngram_reference, pos_ngram_reference

# the worked single-word example, frozen from the documented convention
SELF_DEFENSE_UNIGRAMS = list("self-defense")
SELF_DEFENSE_BIGRAMS = [
    "_s", "se", "el", "lf", "f-", "-d", "de", "ef", "fe", "en", "ns", "se", "e_",
]
SELF_DEFENSE_TRIGRAMS = [
    "_se", "sel", "elf", "lf-", "f-d", "-de", "def", "efe", "fen", "ens", "nse", "se_",
]

EXAMPLE_STREAM = [
    "REF@USERNAME", "REF@USERNAME", "N", "V", "P", "N", "F", "N", "F",
]


def as_counter(grams, channel):
    counts = Counter()
    for gram in grams:
        counts[FeatureKey(channel, tuple(gram) if channel == CHAR else gram)] += 1
    return counts


class TestCharNgrams:
    def test_self_defense_multiset(self):
        expected = Counter()
        for g in SELF_DEFENSE_UNIGRAMS + SELF_DEFENSE_BIGRAMS + SELF_DEFENSE_TRIGRAMS:
            expected[FeatureKey(CHAR, tuple(g))] += 1
        assert char_ngrams("self-defense", 1, 3) == expected

    def test_self_defense_counts_per_order(self):
        grams = char_ngrams("self-defense", 1, 3)
        by_order = Counter(len(key.gram) for key in grams.elements())
        assert by_order == {1: 12, 2: 13, 3: 12}

    def test_empty_text(self):
        assert char_ngrams("", 1, 3) == Counter()

    def test_whitespace_only(self):
        assert char_ngrams(" \t\n ", 1, 3) == Counter()

    def test_single_char_token(self):
        grams = char_ngrams("a", 1, 3)
        expected = Counter(
            {
                FeatureKey(CHAR, ("a",)): 1,
                FeatureKey(CHAR, ("_", "a")): 1,
                FeatureKey(CHAR, ("a", "_")): 1,
                FeatureKey(CHAR, ("_", "a", "_")): 1,
            }
        )
        assert grams == expected

    def test_tokens_padded_independently(self):
        # inter-word space never appears inside a gram
        grams = char_ngrams("ab cd", 2, 2)
        assert FeatureKey(CHAR, ("b", " ")) not in grams
        assert FeatureKey(CHAR, ("b", "c")) not in grams
        assert grams[FeatureKey(CHAR, ("a", "b"))] == 1
        assert grams[FeatureKey(CHAR, ("_", "c"))] == 1

    def test_order_bounds_validated(self):
        for bad in [(0, 3), (1, 4), (2, 1), (-1, 1)]:
            with pytest.raises(ConfigError):
                char_ngrams("x", *bad)

    @given(st.text(alphabet="abæ😀_- ", max_size=40))
    @settings(max_examples=300)
    def test_matches_brute_force_reference(self, text):
        got = char_ngrams(text, 1, 3)
        want = ngram_reference(text, 1, 3)
        assert {(k.channel, k.gram): v for k, v in got.items()} == want

    @given(st.text(max_size=40), st.integers(1, 3), st.integers(1, 3))
    @settings(max_examples=300)
    def test_matches_reference_any_orders(self, text, a, b):
        lo, hi = min(a, b), max(a, b)
        got = char_ngrams(text, lo, hi)
        want = ngram_reference(text, lo, hi)
        assert {(k.channel, k.gram): v for k, v in got.items()} == want

    @given(st.text(alphabet="abcdefg-xyz", min_size=1, max_size=12))
    @settings(max_examples=300)
    def test_count_conservation_single_token(self, token):
        # pad-free tokens of length L yield L unigrams, L+1 bigrams, L trigrams
        length = len(token)
        for n, expected in ((1, length), (2, length + 1), (3, length)):
            assert sum(char_ngrams(token, n, n).values()) == expected


class TestPosNgrams:
    def test_example_stream_multiset(self):
        grams = pos_ngrams(EXAMPLE_STREAM, 1, 3)
        assert sum(grams.values()) == 24
        want = pos_ngram_reference(EXAMPLE_STREAM, 1, 3)
        assert {(k.channel, k.gram): v for k, v in grams.items()} == want
        # spot checks straight from the printed list
        assert grams[FeatureKey(POS, ("REF@USERNAME", "REF@USERNAME"))] == 1
        assert grams[FeatureKey(POS, ("N", "F"))] == 2
        assert grams[FeatureKey(POS, ("F", "N", "F"))] == 1

    def test_no_padding(self):
        grams = pos_ngrams(["N", "V"], 1, 3)
        assert sum(grams.values()) == 3  # N, V, NV; no _N or V_ and no trigram
        assert all("_" not in key.gram for key in grams)

    def test_empty_stream(self):
        assert pos_ngrams([], 1, 3) == Counter()

    @given(st.lists(st.sampled_from(["N", "V", "A", "REF#LINK"]), max_size=25))
    @settings(max_examples=200)
    def test_matches_reference(self, stream):
        got = pos_ngrams(stream, 1, 3)
        want = pos_ngram_reference(stream, 1, 3)
        assert {(k.channel, k.gram): v for k, v in got.items()} == want

    @given(st.lists(st.sampled_from("NVAR"), min_size=1, max_size=25))
    @settings(max_examples=200)
    def test_window_count(self, stream):
        total = sum(max(0, len(stream) - n + 1) for n in (1, 2, 3))
        assert sum(pos_ngrams(stream, 1, 3).values()) == total


class TestScalingPolicy:
    def test_spanish_default(self):
        assert default_policy("es") == ScalingPolicy(LINEAR, LOG2)

    @pytest.mark.parametrize("language", ["en", "it", "nl"])
    def test_other_languages_all_linear(self, language):
        assert default_policy(language) == ScalingPolicy(LINEAR, LINEAR)

    def test_unknown_language(self):
        with pytest.raises(ConfigError):
            default_policy("de")

    def test_log2_scaling_exact(self):
        key = FeatureKey(POS, ("N",))
        vocab = Vocabulary(keys=[key], min_df=1)
        vec = vectorize(Counter(), Counter({key: 3}), vocab, ScalingPolicy(LINEAR, LOG2))
        assert vec.entries[0] == 2.0  # log2(1 + 3)
        vec = vectorize(Counter(), Counter({key: 1}), vocab, ScalingPolicy(LINEAR, LOG2))
        assert vec.entries[0] == 1.0

    def test_linear_scaling_identity(self):
        key = FeatureKey(CHAR, ("a",))
        vocab = Vocabulary(keys=[key], min_df=1)
        vec = vectorize(Counter({key: 7}), Counter(), vocab, ScalingPolicy(LINEAR, LINEAR))
        assert vec.entries[0] == 7.0

    def test_channels_scaled_independently(self):
        ck = FeatureKey(CHAR, ("a",))
        pk = FeatureKey(POS, ("N",))
        vocab = Vocabulary(keys=[ck, pk], min_df=1)
        vec = vectorize(Counter({ck: 3}), Counter({pk: 3}), vocab, ScalingPolicy(LINEAR, LOG2))
        assert vec.entries[vocab.column(ck)] == 3.0
        assert vec.entries[vocab.column(pk)] == 2.0


class TestVectorize:
    def make_vocab(self):
        keys = [FeatureKey(CHAR, ("a",)), FeatureKey(CHAR, ("b",)), FeatureKey(POS, ("N",))]
        return Vocabulary(keys=sorted(keys), min_df=1)

    def test_dimension_is_vocab_size(self):
        vocab = self.make_vocab()
        vec = vectorize(Counter(), Counter(), vocab, ScalingPolicy(LINEAR, LINEAR))
        assert vec.dimension == len(vocab)
        assert vec.entries == {}

    def test_oov_grams_dropped(self):
        vocab = self.make_vocab()
        oov = Counter({FeatureKey(CHAR, ("z",)): 5})
        vec = vectorize(oov, Counter(), vocab, ScalingPolicy(LINEAR, LINEAR))
        assert vec.entries == {}

    def test_empty_vocabulary_rejected(self):
        vocab = Vocabulary(keys=[], min_df=1)
        with pytest.raises(DataError):
            vectorize(Counter(), Counter(), vocab, ScalingPolicy(LINEAR, LINEAR))

    @given(
        st.dictionaries(
            st.sampled_from([FeatureKey(CHAR, ("a",)), FeatureKey(CHAR, ("b",))]),
            st.integers(1, 50),
        ),
        st.sampled_from([LINEAR, LOG2]),
    )
    @settings(max_examples=200)
    def test_monotone_in_counts(self, counts, scale):
        vocab = self.make_vocab()
        policy = ScalingPolicy(scale, scale)
        base = vectorize(Counter(counts), Counter(), vocab, policy)
        for key in counts:
            bumped = Counter(counts)
            bumped[key] += 1
            after = vectorize(bumped, Counter(), vocab, policy)
            col = vocab.column(key)
            assert after.entries[col] >= base.entries[col]

    def test_vocab_lookup_is_a_bijection(self):
        vocab = self.make_vocab()
        cols = [vocab.column(k) for k in vocab.keys]
        assert sorted(cols) == list(range(len(vocab)))
        for key in vocab.keys:
            assert vocab.keys[vocab.column(key)] == key


class TestBuildVocabulary:
    def sample(self, text, tags):
        return (char_ngrams(text), pos_ngrams(tags))

    def test_min_df_counts_distinct_samples(self):
        samples = [
            self.sample("aa aa aa", ["N"]),  # "aa" repeated within ONE sample
            self.sample("bb", ["N"]),
            self.sample("bb", ["V"]),
        ]
        vocab = build_vocabulary(samples, min_df=2)
        grams = {key.gram for key in vocab.keys}
        # "aa"-derived grams appear in one sample only, however many times
        assert ("a", "a") not in grams
        assert ("b", "b") in grams
        assert ("N",) in grams
        assert ("V",) not in grams

    def test_order_independence(self):
        rng = random.Random(5)
        samples = [self.sample(t, s) for t, s in [
            ("hola que tal", ["P", "N"]),
            ("que tal hola", ["N", "P"]),
            ("adios ya", ["V", "N", "P"]),
            ("ya hola", ["P", "P"]),
        ]]
        reference = build_vocabulary(samples, min_df=2)
        for _ in range(5):
            shuffled = samples[:]
            rng.shuffle(shuffled)
            vocab = build_vocabulary(shuffled, min_df=2)
            assert vocab.keys == reference.keys
            assert vocab.content_hash() == reference.content_hash()

    def test_keys_sorted_by_channel_then_gram(self):
        vocab = build_vocabulary([self.sample("ba", ["V", "N"])] * 2, min_df=2)
        assert vocab.keys == sorted(vocab.keys)

    def test_empty_training_set_rejected(self):
        with pytest.raises(DataError):
            build_vocabulary([])

    def test_bad_min_df_rejected(self):
        with pytest.raises(ConfigError):
            build_vocabulary([self.sample("a", ["N"])], min_df=0)

    def test_min_df_one_keeps_everything(self):
        counts = self.sample("xy", ["N"])
        vocab = build_vocabulary([counts], min_df=1)
        assert set(vocab.keys) == set(counts[0]) | set(counts[1])


NASTY_KEYS = [
    FeatureKey(CHAR, ("\t",)),
    FeatureKey(CHAR, ("\n", "a")),
    FeatureKey(CHAR, ("\r",)),
    FeatureKey(CHAR, ("\\", "n")),
    FeatureKey(CHAR, ("␟",)),
    FeatureKey(CHAR, ("a", "␟", "b")),
    FeatureKey(POS, ("REF@USERNAME", "N")),
    FeatureKey(POS, ("\\U",)),
    FeatureKey(POS, ("a\\", "u241f")),
]


class TestVocabularySerialization:
    def test_round_trip(self, tmp_path):
        vocab = build_vocabulary(
            [(char_ngrams("hola que"), pos_ngrams(["N", "V"]))] * 2, min_df=2
        )
        path = tmp_path / "vocab.tsv"
        vocab.save(path)
        loaded = Vocabulary.load(path)
        assert loaded.keys == vocab.keys
        assert loaded.min_df == vocab.min_df
        assert loaded.content_hash() == vocab.content_hash()

    def test_round_trip_hostile_units(self, tmp_path):
        vocab = Vocabulary(keys=sorted(NASTY_KEYS), min_df=1)
        path = tmp_path / "vocab.tsv"
        vocab.save(path)
        loaded = Vocabulary.load(path)
        assert loaded.keys == vocab.keys

    def test_round_trip_gzip(self, tmp_path):
        vocab = Vocabulary(keys=[FeatureKey(CHAR, ("a",))], min_df=1)
        path = tmp_path / "vocab.tsv.gz"
        vocab.save(path)
        assert Vocabulary.load(path).keys == vocab.keys

    def test_hash_tracks_content(self):
        v1 = Vocabulary(keys=[FeatureKey(CHAR, ("a",))], min_df=1)
        v2 = Vocabulary(keys=[FeatureKey(CHAR, ("b",))], min_df=1)
        assert v1.content_hash() != v2.content_hash()
        assert v1.content_hash() == Vocabulary(keys=[FeatureKey(CHAR, ("a",))], min_df=2).content_hash()

    def test_wrong_format_line_rejected(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("some-other-format\tx\n", encoding="utf-8")
        with pytest.raises(DataError, match="vocab"):
            Vocabulary.load(path)

    def test_out_of_order_columns_rejected(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text(
            "styloprof-vocab-v1\tchar=2\tpos=0\tmin_df=1\nchar\ta\t1\nchar\tb\t0\n",
            encoding="utf-8",
        )
        with pytest.raises(DataError, match="out of order"):
            Vocabulary.load(path)

    def test_bad_escape_rejected(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text(
            "styloprof-vocab-v1\tchar=1\tpos=0\tmin_df=1\nchar\t\\q\t0\n",
            encoding="utf-8",
        )
        with pytest.raises(DataError, match="escape"):
            Vocabulary.load(path)

    @given(
        raw_keys=st.lists(
            st.tuples(
                st.sampled_from([CHAR, POS]),
                st.lists(st.text(alphabet="ab\\\t\n␟U", min_size=1, max_size=3),
                         min_size=1, max_size=3).map(tuple),
            ),
            min_size=1,
            max_size=8,
        )
    )
    @settings(max_examples=100)
    def test_round_trip_fuzzed_units(self, raw_keys, tmp_path_factory):
        keys = sorted({FeatureKey(c, g) for c, g in raw_keys})
        vocab = Vocabulary(keys=keys, min_df=1)
        path = tmp_path_factory.mktemp("vocab") / "v.tsv"
        vocab.save(path)
        assert Vocabulary.load(path).keys == keys
