"""Manifest-backed torch dataset of normalized training tuples."""

from __future__ import annotations

import numpy as np
import torch
from torch.utils.data import Dataset

from firefront.dataset import Manifest, TupleEntry
from firefront.rasters import normalize_arrival, normalize_terrain


def tuple_to_tensors(entry: TupleEntry, root) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    tau, taubar, h = entry.load(root)
    t = torch.from_numpy(normalize_arrival(tau).values.astype(np.float32))[None]
    tb = torch.from_numpy(normalize_arrival(taubar).values.astype(np.float32))[None]
    th = torch.from_numpy(normalize_terrain(h).values.astype(np.float32))[None]
    return t, tb, th


class TupleTensorDataset(Dataset):
    """(tau, taubar, h) tuples as normalized (1, H, W) float32 tensors.

    ``preload=True`` keeps the whole split in memory, which is the right call
    for desk-scale sets; pass False to read rasters lazily per item.
    """

    def __init__(self, manifest: Manifest, split: str, root=None, preload: bool = True):
        if split not in ("train", "val"):
            raise ValueError(f"unknown split {split!r}")
        self.root = root if root is not None else manifest.root
        self.entries = [e for e in manifest.entries if e.split == split]
        if not self.entries:
            raise ValueError(f"manifest has no {split!r} entries")
        self._cache = None
        if preload:
            self._cache = [tuple_to_tensors(e, self.root) for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx: int):
        if self._cache is not None:
            return self._cache[idx]
        return tuple_to_tensors(self.entries[idx], self.root)
