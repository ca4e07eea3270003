"""Descriptive sentences, mission instructions, ablation texts, and tokenization.

Each placed tile color is described by one template sentence
"<color> tiles are <property> ." so that a full description set is exactly
sufficient to reconstruct the episode's color-to-property mapping. Sentence
order is a fresh random permutation every episode so agents cannot key on
position instead of content.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .dynamics import DYNAMIC_PROPERTIES, DynamicsMap, PROPERTY_BY_NAME, TileProperty
from .grid import COLOR_NAMES, OBJECT_TYPE_NAMES
from .levels import GO_TO_OBJ, GO_TO_RED_BALL, PUT_NEXT_LOCAL, Mission, derive_seed

SENTENCE_TEMPLATE = "{color} tiles are {prop} ."

ABLATION_MODES = ("lorem", "random", "shuffled")
TEXT_MODES = ("descriptive",) + ABLATION_MODES

# fixed irrelevant-word dictionary for the "random" ablation; kept exactly as
# large as the descriptive vocabulary (asserted by the test suite)
IRRELEVANT_WORDS = (
    "anvil",
    "bassoon",
    "cumulus",
    "driftwood",
    "eclair",
    "fjord",
    "gondola",
    "haystack",
    "isthmus",
    "jamboree",
    "kettle",
    "lighthouse",
    "marzipan",
    "nebula",
    "obelisk",
    "paprika",
)

_LOREM_SYLLABLES = (
    "lo", "rem", "ip", "sum", "do", "lor", "sit", "am", "et", "con",
    "sec", "te", "tur", "adi", "pis", "cing", "el", "it", "sed", "ei",
    "us", "mod", "tem", "por", "in", "ci", "di", "dunt", "ut", "la",
)


class DescriptionParseError(ValueError):
    pass


@dataclass
class DescriptionSet:
    """Sentences describing (color, property) pairs for one episode.

    ``omitted`` holds pairs that are present in the episode but deliberately
    not described (partial mode); empty in full mode.
    """

    sentences: list[str]
    omitted: set[tuple[str, str]] = field(default_factory=set)


def describe_pair(color_id: int, prop: TileProperty) -> str:
    return SENTENCE_TEMPLATE.format(color=COLOR_NAMES[color_id], prop=prop.value)


def describe(dynamics: DynamicsMap, partial: bool, rng_seed: int) -> DescriptionSet:
    """One sentence per placed color; partial mode drops one uniform pair."""
    rng = random.Random(rng_seed)
    colors = dynamics.placed_colors()
    pairs = [(c, dynamics.mapping[c]) for c in colors]
    omitted: set[tuple[str, str]] = set()
    if partial and pairs:
        drop = rng.randrange(len(pairs))
        omitted = {(COLOR_NAMES[pairs[drop][0]], pairs[drop][1].value)}
        pairs = pairs[:drop] + pairs[drop + 1 :]
    sentences = [describe_pair(c, p) for c, p in pairs]
    rng.shuffle(sentences)
    return DescriptionSet(sentences=sentences, omitted=omitted)


def instruction(mission: Mission) -> str:
    if mission.family == GO_TO_RED_BALL:
        return "go to the red ball"
    if mission.family == GO_TO_OBJ:
        return f"go to the {mission.target.phrase()}"
    if mission.family == PUT_NEXT_LOCAL:
        return f"put the {mission.move.phrase()} next to the {mission.anchor.phrase()}"
    raise ValueError(f"unknown mission family {mission.family!r}")


def descriptive_vocabulary() -> list[str]:
    """Every token that can appear in a description sentence, lowercased."""
    words = {name for name in COLOR_NAMES}
    words |= {p.value.lower() for p in DYNAMIC_PROPERTIES}
    words |= {"tiles", "are", "."}
    return sorted(words)


def _lorem_word(rng: random.Random) -> str:
    return "".join(rng.choice(_LOREM_SYLLABLES) for _ in range(rng.randint(2, 4)))


def ablation_text(mode: str, dynamics: DynamicsMap, rng_seed: int) -> DescriptionSet:
    """Nonsense replacements for the true descriptions, matched in shape.

    lorem: fresh pseudo-Latin words (unbounded vocabulary); random: words from
    the fixed irrelevant dictionary; shuffled: the true tokens re-dealt across
    the sentence slots, which preserves the word multiset but breaks the
    color-to-property pairing.
    """
    if mode not in ABLATION_MODES:
        raise ValueError(f"unknown ablation mode {mode!r}")
    rng = random.Random(rng_seed)
    true_set = describe(dynamics, partial=False, rng_seed=rng_seed)
    lengths = [len(s.split()) for s in true_set.sentences]

    if mode == "lorem":
        sentences = [" ".join(_lorem_word(rng) for _ in range(n)) for n in lengths]
        return DescriptionSet(sentences=sentences)
    if mode == "random":
        sentences = [
            " ".join(rng.choice(IRRELEVANT_WORDS) for _ in range(n)) for n in lengths
        ]
        return DescriptionSet(sentences=sentences)

    tokens = [t for s in true_set.sentences for t in s.split()]
    original = set(true_set.sentences)
    for _ in range(16):
        rng.shuffle(tokens)
        rebuilt, i = [], 0
        for n in lengths:
            rebuilt.append(" ".join(tokens[i : i + n]))
            i += n
        if set(rebuilt) != original or len(original) <= 1:
            return DescriptionSet(sentences=rebuilt)
    return DescriptionSet(sentences=rebuilt)


def episode_descriptions(
    dynamics: DynamicsMap, partial: bool, text_mode: str, rng_seed: int
) -> DescriptionSet:
    """Dispatch between true descriptions and the ablation generators."""
    if text_mode == "descriptive":
        return describe(dynamics, partial=partial, rng_seed=rng_seed)
    return ablation_text(text_mode, dynamics, rng_seed)


def parse_descriptions(sentences: Iterable[str]) -> dict[str, str]:
    """Reconstruct the color-to-property mapping from template sentences.

    Raises DescriptionParseError when any sentence does not match the
    template; this is what makes shuffled-text ablations detectable.
    """
    mapping: dict[str, str] = {}
    props = {p.value.lower(): p.value for p in DYNAMIC_PROPERTIES}
    for s in sentences:
        tokens = s.split()
        if (
            len(tokens) != 5
            or tokens[1] != "tiles"
            or tokens[2] != "are"
            or tokens[4] != "."
            or tokens[0] not in COLOR_NAMES
            or tokens[3].lower() not in props
        ):
            raise DescriptionParseError(f"sentence does not match template: {s!r}")
        if tokens[0] in mapping and mapping[tokens[0]] != props[tokens[3].lower()]:
            raise DescriptionParseError(f"conflicting descriptions for {tokens[0]!r}")
        mapping[tokens[0]] = props[tokens[3].lower()]
    return mapping


PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"


@dataclass(frozen=True)
class Vocabulary:
    """Dense token-to-id map with pad and unknown specials at ids 0 and 1."""

    token_to_id: dict[str, int]

    @property
    def pad_id(self) -> int:
        return self.token_to_id[PAD_TOKEN]

    @property
    def unk_id(self) -> int:
        return self.token_to_id[UNK_TOKEN]

    def __len__(self) -> int:
        return len(self.token_to_id)

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "Vocabulary":
        ordered = [PAD_TOKEN, UNK_TOKEN] + sorted({t.lower() for t in tokens})
        return cls(token_to_id={t: i for i, t in enumerate(ordered)})

    def id_to_token(self) -> list[str]:
        out = [""] * len(self.token_to_id)
        for t, i in self.token_to_id.items():
            out[i] = t
        return out

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for token in self.id_to_token():
                fh.write(token + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            tokens = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
        return cls(token_to_id={t: i for i, t in enumerate(tokens)})


def build_vocabulary() -> Vocabulary:
    """Canonical vocabulary covering descriptions and all mission instructions."""
    corpus = set(descriptive_vocabulary())
    corpus |= {"go", "to", "the", "put", "next"}
    corpus |= set(OBJECT_TYPE_NAMES.values())
    return Vocabulary.from_tokens(corpus)


def tokenize(sentence: str, vocab: Vocabulary) -> list[int]:
    """Whitespace tokens, lowercased; unknown words map to the unk id."""
    return [vocab.token_to_id.get(tok.lower(), vocab.unk_id) for tok in sentence.split()]


def detokenize(ids: Iterable[int], vocab: Vocabulary) -> str:
    table = vocab.id_to_token()
    return " ".join(table[i] for i in ids)


def text_seed_for(level_name: str, mode: str, seed: int) -> int:
    """Per-episode seed for the description generators."""
    return derive_seed(level_name, mode, seed, "text")
