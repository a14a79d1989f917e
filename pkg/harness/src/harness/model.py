"""A small GRU encoder-decoder with dot-product attention."""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F


class Seq2Seq(nn.Module):
    def __init__(self, vocab_size: int, embedding_dim: int = 64, hidden_dim: int = 128, pad_id: int = 0):
        super().__init__()
        self.pad_id = pad_id
        self.embedding = nn.Embedding(vocab_size, embedding_dim, padding_idx=pad_id)
        self.encoder = nn.GRU(embedding_dim, hidden_dim, batch_first=True, bidirectional=True)
        self.enc_proj = nn.Linear(2 * hidden_dim, hidden_dim)
        self.decoder = nn.GRU(embedding_dim, hidden_dim, batch_first=True)
        self.combine = nn.Linear(2 * hidden_dim, hidden_dim)
        self.out = nn.Linear(hidden_dim, vocab_size)

    def encode(self, src: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        mask = src.ne(self.pad_id)
        enc_out, h = self.encoder(self.embedding(src))
        enc_out = self.enc_proj(enc_out)
        h0 = (h[0] + h[1]).unsqueeze(0)
        return enc_out, h0, mask

    def _attend(self, dec_out: torch.Tensor, enc_out: torch.Tensor, src_mask: torch.Tensor) -> torch.Tensor:
        scores = dec_out @ enc_out.transpose(1, 2)
        scores = scores.masked_fill(~src_mask.unsqueeze(1), float("-inf"))
        context = F.softmax(scores, dim=-1) @ enc_out
        return torch.tanh(self.combine(torch.cat([dec_out, context], dim=-1)))

    def forward(self, src: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        """Teacher-forced logits for every target position."""
        enc_out, h0, src_mask = self.encode(src)
        dec_out, _ = self.decoder(self.embedding(tgt_in), h0)
        return self.out(self._attend(dec_out, enc_out, src_mask))

    @torch.no_grad()
    def greedy_decode(self, src: torch.Tensor, bos_id: int, eos_id: int, max_len: int) -> list[list[int]]:
        enc_out, hidden, src_mask = self.encode(src)
        batch = src.shape[0]
        step = torch.full((batch, 1), bos_id, dtype=torch.long, device=src.device)
        finished = torch.zeros(batch, dtype=torch.bool, device=src.device)
        outputs: list[list[int]] = [[] for _ in range(batch)]
        for _ in range(max_len):
            dec_out, hidden = self.decoder(self.embedding(step), hidden)
            logits = self.out(self._attend(dec_out, enc_out, src_mask))
            step = logits[:, -1].argmax(dim=-1, keepdim=True)
            for row in range(batch):
                if not finished[row]:
                    token = int(step[row, 0])
                    if token == eos_id:
                        finished[row] = True
                    else:
                        outputs[row].append(token)
            if bool(finished.all()):
                break
        return outputs


def sequence_loss(logits: torch.Tensor, tgt_out: torch.Tensor, pad_id: int) -> torch.Tensor:
    """Mean cross-entropy over non-padding target tokens."""
    return F.cross_entropy(
        logits.reshape(-1, logits.shape[-1]), tgt_out.reshape(-1), ignore_index=pad_id
    )
