"""Fusion stages combining the scene feature map with text embeddings.

Shapes follow one convention: F is (B, C, 7, 7) with C=128, a description
dictionary D is (B, k, C) holding one embedding per sentence, and single-text
embeddings are (B, C).
"""

from __future__ import annotations

import torch
from torch import nn


def pool_features(feature_map: torch.Tensor) -> torch.Tensor:
    """(B, C, H, W) -> (B, C) by spatial mean."""
    return feature_map.mean(dim=(2, 3))


def flatten_features(feature_map: torch.Tensor) -> torch.Tensor:
    """(B, C, H, W) -> (B, C*H*W); keeps per-tile positions, which the policy
    needs to steer toward things it can see."""
    return feature_map.reshape(feature_map.shape[0], -1)


def concat_fusion(feature_map: torch.Tensor, dictionary: torch.Tensor) -> torch.Tensor:
    """Pooled scene embedding concatenated with the flattened description
    dictionary: (B, C) ++ (B, k*C) -> (B, C + k*C). No spatial grounding."""
    pooled = pool_features(feature_map)
    if dictionary.shape[0] != pooled.shape[0]:
        raise ValueError("batch size mismatch between scene and text")
    return torch.cat([pooled, dictionary.reshape(dictionary.shape[0], -1)], dim=1)


class FilmModulation(nn.Module):
    """Per-channel affine modulation with parameters predicted from text.

    gamma is predicted as 1 + linear(text) with a zero-initialized layer, so a
    fresh module is exactly the identity map.
    """

    def __init__(self, channels: int = 128, text_dim: int = 128):
        super().__init__()
        self.gamma = nn.Linear(text_dim, channels)
        self.beta = nn.Linear(text_dim, channels)
        nn.init.zeros_(self.gamma.weight)
        nn.init.zeros_(self.gamma.bias)
        nn.init.zeros_(self.beta.weight)
        nn.init.zeros_(self.beta.bias)

    def forward(self, feature_map: torch.Tensor, text: torch.Tensor) -> torch.Tensor:
        if feature_map.shape[1] != self.gamma.out_features:
            raise ValueError("channel count does not match the controllers")
        gamma = 1.0 + self.gamma(text)
        beta = self.beta(text)
        return gamma[:, :, None, None] * feature_map + beta[:, :, None, None]


class AttentionFusion(nn.Module):
    """Per-tile soft assignment of description embeddings onto the scene map.

    An attention CNN maps F to a (B, k, 7, 7) tensor W, softmaxed over k at
    every tile; each tile receives the W-weighted combination of the sentence
    embeddings, spatially concatenated to F, and a final convolution brings
    the result back to scene width.
    """

    def __init__(self, k: int, channels: int = 128):
        super().__init__()
        if k < 1:
            raise ValueError("attention fusion needs at least one sentence")
        self.k = k
        self.channels = channels
        self.attention = nn.Sequential(
            nn.Conv2d(channels, channels, kernel_size=3, padding=1),
            nn.ReLU(),
            nn.Conv2d(channels, k, kernel_size=1),
        )
        self.post = nn.Sequential(
            nn.Conv2d(2 * channels, channels, kernel_size=3, padding=1),
            nn.ReLU(),
        )

    def attention_weights(self, feature_map: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.attention(feature_map), dim=1)

    def forward(
        self, feature_map: torch.Tensor, dictionary: torch.Tensor
    ) -> torch.Tensor:
        if dictionary.shape[1] != self.k:
            raise ValueError(f"expected {self.k} sentences, got {dictionary.shape[1]}")
        weights = self.attention_weights(feature_map)  # (B, k, H, W)
        # at every tile: sum_i W[:, i] * d_i
        weighted = torch.einsum("bkhw,bkc->bchw", weights, dictionary)
        return self.post(torch.cat([feature_map, weighted], dim=1))


class HybridFusion(nn.Module):
    """Attention fusion over descriptions, then FiLM conditioning on the
    instruction."""

    def __init__(self, k: int, channels: int = 128, text_dim: int = 128):
        super().__init__()
        self.attention = AttentionFusion(k, channels)
        self.film = FilmModulation(channels, text_dim)

    def forward(
        self,
        feature_map: torch.Tensor,
        dictionary: torch.Tensor,
        instruction: torch.Tensor,
    ) -> torch.Tensor:
        return self.film(self.attention(feature_map, dictionary), instruction)
