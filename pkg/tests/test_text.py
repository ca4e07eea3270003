"""Description generation, ablation texts, and tokenization."""

import collections

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynagrid.dynamics import DynamicsMap, TileProperty
from dynagrid.grid import BLUE, COLOR_NAMES, GREEN, GREY, ORANGE, TYPE_BOX, TYPE_KEY, ObjDesc
from dynagrid.levels import (
    GO_TO_OBJ,
    GO_TO_RED_BALL,
    PUT_NEXT_LOCAL,
    Mission,
    get_level,
    sample_instance,
)
from dynagrid.text import (
    IRRELEVANT_WORDS,
    DescriptionParseError,
    ablation_text,
    build_vocabulary,
    describe,
    descriptive_vocabulary,
    detokenize,
    instruction,
    parse_descriptions,
    tokenize,
)

DYN = DynamicsMap(
    mapping={BLUE: TileProperty.SLIPPERY, GREEN: TileProperty.STICKY},
    tile_colors={(2, 2): BLUE, (3, 3): GREEN, (4, 4): BLUE},
)
DYN3 = DynamicsMap(
    mapping={
        BLUE: TileProperty.TRAP,
        GREEN: TileProperty.MAGIC,
        ORANGE: TileProperty.FLIP_UP_DOWN,
    },
    tile_colors={(2, 2): BLUE, (3, 3): GREEN, (4, 4): ORANGE},
)


class TestDescribe:
    def test_full_mode_sentences(self):
        ds = describe(DYN, partial=False, rng_seed=1)
        assert sorted(ds.sentences) == [
            "blue tiles are slippery .",
            "green tiles are sticky .",
        ]
        assert ds.omitted == set()

    def test_partial_omits_exactly_one(self):
        ds = describe(DYN3, partial=True, rng_seed=5)
        assert len(ds.sentences) == 2
        assert len(ds.omitted) == 1
        (color, prop) = next(iter(ds.omitted))
        assert color in COLOR_NAMES and prop in {p.value for p in TileProperty}

    def test_deterministic_per_seed(self):
        assert describe(DYN, False, 42).sentences == describe(DYN, False, 42).sentences

    def test_order_varies_with_seed(self):
        orders = {tuple(describe(DYN3, False, s).sentences) for s in range(30)}
        assert len(orders) > 1

    def test_sentence_mentions_one_color_and_one_property(self):
        for s in describe(DYN3, False, 0).sentences:
            tokens = s.split()
            assert sum(t in COLOR_NAMES for t in tokens) == 1
            assert sum(t.lower() in {p.value.lower() for p in TileProperty} for t in tokens) == 1


class TestInstruction:
    def test_go_to_red_ball(self):
        assert instruction(Mission(family=GO_TO_RED_BALL)) == "go to the red ball"

    def test_go_to_obj(self):
        m = Mission(family=GO_TO_OBJ, target=ObjDesc(TYPE_KEY, GREY))
        assert instruction(m) == "go to the grey key"

    def test_put_next(self):
        m = Mission(
            family=PUT_NEXT_LOCAL,
            move=ObjDesc(TYPE_KEY, GREY),
            anchor=ObjDesc(TYPE_BOX, GREEN),
        )
        assert instruction(m) == "put the grey key next to the green box"


class TestAblations:
    def test_shuffled_preserves_multiset_breaks_pairing(self):
        true = describe(DYN, partial=False, rng_seed=9)
        shuf = ablation_text("shuffled", DYN, rng_seed=9)
        true_tokens = collections.Counter(t for s in true.sentences for t in s.split())
        shuf_tokens = collections.Counter(t for s in shuf.sentences for t in s.split())
        assert true_tokens == shuf_tokens
        assert set(shuf.sentences) != set(true.sentences)

    def test_shuffled_not_reconstructible(self):
        hits = 0
        for seed in range(20):
            shuf = ablation_text("shuffled", DYN3, rng_seed=seed)
            try:
                mapping = parse_descriptions(shuf.sentences)
            except DescriptionParseError:
                continue
            truth = {COLOR_NAMES[c]: p.value for c, p in DYN3.mapping.items()}
            if mapping == truth:
                hits += 1
        assert hits == 0

    def test_random_dictionary_size_matches_descriptive_vocabulary(self):
        assert len(IRRELEVANT_WORDS) == len(descriptive_vocabulary())

    def test_random_mode_uses_only_dictionary_words(self):
        ds = ablation_text("random", DYN3, rng_seed=3)
        assert len(ds.sentences) == 3
        for s in ds.sentences:
            assert len(s.split()) == 5
            assert all(w in IRRELEVANT_WORDS for w in s.split())

    def test_lorem_differs_across_seeds(self):
        a = ablation_text("lorem", DYN, rng_seed=1).sentences
        b = ablation_text("lorem", DYN, rng_seed=2).sentences
        assert a != b
        assert all(len(s.split()) == 5 for s in a)

    def test_lorem_words_unknown_to_vocabulary(self):
        vocab = build_vocabulary()
        for s in ablation_text("lorem", DYN3, rng_seed=4).sentences:
            assert all(i == vocab.unk_id for i in tokenize(s, vocab))

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            ablation_text("nonsense", DYN, rng_seed=0)


class TestReconstruction:
    def test_full_description_reconstructs_mapping(self):
        ds = describe(DYN3, partial=False, rng_seed=11)
        mapping = parse_descriptions(ds.sentences)
        assert mapping == {COLOR_NAMES[c]: p.value for c, p in DYN3.mapping.items()}

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 5000))
    def test_reconstruction_over_generated_instances(self, seed):
        inst = sample_instance(get_level("GoToRedBall-v2"), "test", seed)
        ds = describe(inst.dynamics, partial=False, rng_seed=seed)
        mapping = parse_descriptions(ds.sentences)
        placed = {
            COLOR_NAMES[c]: inst.dynamics.mapping[c].value
            for c in inst.dynamics.placed_colors()
        }
        assert mapping == placed

    def test_partial_mode_loses_exactly_the_omitted_pair(self):
        ds = describe(DYN3, partial=True, rng_seed=2)
        mapping = parse_descriptions(ds.sentences)
        truth = {COLOR_NAMES[c]: p.value for c, p in DYN3.mapping.items()}
        missing = {(c, p) for c, p in truth.items()} - {(c, p) for c, p in mapping.items()}
        assert {(c, p) for (c, p) in ds.omitted} == missing


class TestTokenizer:
    def test_template_sentence_five_known_ids(self):
        vocab = build_vocabulary()
        ids = tokenize("blue tiles are slippery .", vocab)
        assert len(ids) == 5
        assert all(i != vocab.unk_id for i in ids)

    def test_empty_sentence(self):
        assert tokenize("", build_vocabulary()) == []

    def test_round_trip(self):
        vocab = build_vocabulary()
        for s in ["blue tiles are slippery .", "go to the red ball", "put the grey key next to the green box"]:
            assert detokenize(tokenize(s, vocab), vocab) == s.lower()

    def test_camel_case_property_round_trips_lowercased(self):
        vocab = build_vocabulary()
        s = "green tiles are flipLeftRight ."
        assert detokenize(tokenize(s, vocab), vocab) == s.lower()

    def test_ids_dense_from_zero(self):
        vocab = build_vocabulary()
        ids = sorted(vocab.token_to_id.values())
        assert ids == list(range(len(vocab)))
        assert vocab.pad_id == 0 and vocab.unk_id == 1

    def test_save_load_round_trip(self, tmp_path):
        vocab = build_vocabulary()
        path = tmp_path / "vocab.txt"
        vocab.save(path)
        assert vocab.load(path) == vocab
