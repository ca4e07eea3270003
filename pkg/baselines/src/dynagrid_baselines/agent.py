"""Actor-critic models: one shared trunk, five fusion variants.

Architectures: image (scene only), concat, film, attention, hybrid
(attention over descriptions + FiLM on the instruction). The policy and value
heads are two-layer MLPs of hidden width 64 over the fused embedding.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from .client import N_ACTIONS, WireObservation
from .encoders import EMBED_DIM, GrowingVocab, SentenceEncoder, SymbolicCnn
from .fusion import (
    AttentionFusion,
    FilmModulation,
    HybridFusion,
    concat_fusion,
    flatten_features,
    pool_features,
)

ARCHITECTURES = ("image", "concat", "film", "attention", "hybrid")
TEXT_MODES = ("none", "descriptive", "instructive", "all", "lorem", "random", "shuffled")
MAX_TOKENS = 12
HEAD_HIDDEN = 64


def _head(in_dim: int, out_dim: int, final_gain: float = 1.0) -> nn.Sequential:
    head = nn.Sequential(
        nn.Linear(in_dim, HEAD_HIDDEN),
        nn.Tanh(),
        nn.Linear(HEAD_HIDDEN, HEAD_HIDDEN),
        nn.Tanh(),
        nn.Linear(HEAD_HIDDEN, out_dim),
    )
    # small final gain keeps the initial policy near-uniform
    nn.init.orthogonal_(head[-1].weight, gain=final_gain)
    nn.init.zeros_(head[-1].bias)
    return head


def sentences_for(obs: WireObservation, text_mode: str) -> list[str]:
    """Which text fields feed the fusion stage under each text mode."""
    if text_mode == "none":
        return []
    if text_mode == "instructive":
        return [obs.instruction]
    if text_mode == "all":
        return list(obs.descriptions) + [obs.instruction]
    # descriptive and the server-side ablation modes use the description slot
    return list(obs.descriptions)


class ActorCritic(nn.Module):
    """Policy/value over wire observations for a fixed (arch, text mode, k)."""

    def __init__(self, arch: str, text_mode: str, k_sentences: int,
                 vocab_capacity: int = 2048):
        super().__init__()
        if arch not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {arch!r}")
        if text_mode not in TEXT_MODES:
            raise ValueError(f"unknown text mode {text_mode!r}")
        if arch == "image" and text_mode != "none":
            raise ValueError("the image-only architecture takes no text")
        if arch != "image" and text_mode == "none":
            raise ValueError(f"architecture {arch!r} needs a text mode")
        if arch == "hybrid" and text_mode != "all":
            raise ValueError("the hybrid architecture needs descriptions and instruction")

        self.arch = arch
        self.text_mode = text_mode
        self.k = k_sentences
        self.vocab = GrowingVocab(vocab_capacity)
        self.scene = SymbolicCnn()
        self.text = SentenceEncoder(vocab_capacity) if arch != "image" else None

        spatial_dim = EMBED_DIM * 7 * 7
        if arch == "image":
            fused_dim = spatial_dim
        elif arch == "concat":
            # the one pooled variant: pooled scene vector ++ flat dictionary
            fused_dim = EMBED_DIM + self.k * EMBED_DIM
        elif arch == "film":
            self.film = FilmModulation(EMBED_DIM, EMBED_DIM)
            fused_dim = spatial_dim
        elif arch == "attention":
            self.attention = AttentionFusion(self.k, EMBED_DIM)
            fused_dim = spatial_dim
        else:  # hybrid: descriptions via attention, instruction via FiLM
            self.hybrid = HybridFusion(self.k - 1, EMBED_DIM, EMBED_DIM)
            fused_dim = spatial_dim

        self.policy_head = _head(fused_dim, N_ACTIONS, final_gain=0.01)
        self.value_head = _head(fused_dim, 1)

    # --- batching -----------------------------------------------------------
    def encode_batch(self, observations: list[WireObservation], device="cpu"):
        """Wire observations -> (view tensor, token tensor or None)."""
        views = torch.from_numpy(np.stack([o.grid for o in observations])).to(device)
        if self.arch == "image":
            return views, None
        token_rows = []
        for obs in observations:
            sentences = sentences_for(obs, self.text_mode)
            if len(sentences) != self.k:
                raise ValueError(
                    f"expected {self.k} text inputs, got {len(sentences)}; "
                    "was the model built for this level and text mode?"
                )
            token_rows.append(
                [self.vocab.encode(s, MAX_TOKENS) for s in sentences]
            )
        tokens = torch.tensor(token_rows, dtype=torch.long, device=device)
        return views, tokens

    # --- forward ------------------------------------------------------------
    def fuse(self, views: torch.Tensor, tokens: torch.Tensor | None) -> torch.Tensor:
        feature_map = self.scene(views)
        if self.arch == "image":
            return flatten_features(feature_map)
        embeddings = self.text(tokens)  # (B, k, dim)
        if self.arch == "concat":
            return concat_fusion(feature_map, embeddings)
        if self.arch == "film":
            # one conditioning vector for the whole text block
            return flatten_features(self.film(feature_map, embeddings.mean(dim=1)))
        if self.arch == "attention":
            return flatten_features(self.attention(feature_map, embeddings))
        # hybrid: last text input is the instruction by construction ("all")
        descriptions, instruction = embeddings[:, :-1], embeddings[:, -1]
        return flatten_features(self.hybrid(feature_map, descriptions, instruction))

    def forward(self, views: torch.Tensor, tokens: torch.Tensor | None):
        fused = self.fuse(views, tokens)
        return self.policy_head(fused), self.value_head(fused).squeeze(-1)

    @torch.no_grad()
    def act(self, observations: list[WireObservation], sample: bool = True,
            generator: torch.Generator | None = None, device="cpu"):
        views, tokens = self.encode_batch(observations, device)
        logits, values = self(views, tokens)
        dist = torch.distributions.Categorical(logits=logits)
        if sample:
            if generator is not None:
                probs = dist.probs
                actions = torch.multinomial(probs, 1, generator=generator).squeeze(-1)
            else:
                actions = dist.sample()
        else:
            actions = logits.argmax(dim=-1)
        return actions, dist.log_prob(actions), values
