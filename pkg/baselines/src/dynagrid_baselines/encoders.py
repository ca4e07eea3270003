"""Shared perception trunk: symbolic-view CNN and recurrent sentence encoder.

Every architecture uses the same two-layer width-128 CNN over the one-hot
symbolic view and the same two-layer GRU of hidden size 128 over word
embeddings trained from scratch; only the fusion stage differs.
"""

from __future__ import annotations

import torch
from torch import nn

N_TYPES = 11
N_COLORS = 7
N_STATES = 4
OBS_CHANNELS = N_TYPES + N_COLORS + N_STATES

EMBED_DIM = 128
PAD_ID = 0
UNK_ID = 1


class GrowingVocab:
    """Word-level ids handed out on first sight, up to a fixed capacity.

    The embedding table is allocated at capacity up front; unseen words after
    that fall back to the unk id (relevant only for the lorem ablation, whose
    vocabulary grows without bound).
    """

    def __init__(self, capacity: int = 2048):
        self.capacity = capacity
        self.token_to_id: dict[str, int] = {"<pad>": PAD_ID, "<unk>": UNK_ID}

    def __len__(self) -> int:
        return len(self.token_to_id)

    def encode(self, sentence: str, length: int) -> list[int]:
        ids = []
        for token in sentence.lower().split()[:length]:
            if token not in self.token_to_id and len(self.token_to_id) < self.capacity:
                self.token_to_id[token] = len(self.token_to_id)
            ids.append(self.token_to_id.get(token, UNK_ID))
        ids += [PAD_ID] * (length - len(ids))
        return ids


def one_hot_view(view: torch.Tensor) -> torch.Tensor:
    """(B, 7, 7, 3) integer view -> (B, 22, 7, 7) float one-hot planes."""
    view = view.long()
    planes = torch.cat(
        [
            nn.functional.one_hot(view[..., 0].clamp(max=N_TYPES - 1), N_TYPES),
            nn.functional.one_hot(view[..., 1].clamp(max=N_COLORS - 1), N_COLORS),
            nn.functional.one_hot(view[..., 2].clamp(max=N_STATES - 1), N_STATES),
        ],
        dim=-1,
    )
    return planes.permute(0, 3, 1, 2).float()


class SymbolicCnn(nn.Module):
    """Two-layer width-128 backbone preserving the 7x7 spatial shape."""

    def __init__(self, width: int = EMBED_DIM):
        super().__init__()
        self.width = width
        self.net = nn.Sequential(
            nn.Conv2d(OBS_CHANNELS, width, kernel_size=3, padding=1),
            nn.ReLU(),
            nn.Conv2d(width, width, kernel_size=3, padding=1),
            nn.ReLU(),
        )

    def forward(self, view: torch.Tensor) -> torch.Tensor:
        return self.net(one_hot_view(view))


class SentenceEncoder(nn.Module):
    """Word embeddings + 2-layer GRU; one shared instance encodes every sentence."""

    def __init__(self, vocab_capacity: int = 2048, dim: int = EMBED_DIM):
        super().__init__()
        self.dim = dim
        self.embedding = nn.Embedding(vocab_capacity, dim, padding_idx=PAD_ID)
        self.gru = nn.GRU(dim, dim, num_layers=2, batch_first=True)

    def forward(self, token_ids: torch.Tensor) -> torch.Tensor:
        """(..., L) token ids -> (..., dim) final hidden state."""
        lead = token_ids.shape[:-1]
        flat = token_ids.reshape(-1, token_ids.shape[-1])
        embedded = self.embedding(flat)
        _, hidden = self.gru(embedded)
        return hidden[-1].reshape(*lead, self.dim)
