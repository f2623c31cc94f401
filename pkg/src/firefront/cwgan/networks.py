"""Generator and critic networks.

The generator is a U-Net over the two conditioning channels (measurement,
terrain): dense-block stem, ``S`` down stages, a dense-block base, and ``S``
mirrored up stages whose skip connections pair each resolution with its twin.
The latent vector enters through conditional instance normalization inside
every dense block below full resolution. A sigmoid bounds outputs to [0, 1].

The critic scores (arrival, measurement, terrain) triples: dense/down stages
followed by a fully connected head to a single scalar. It takes no latent
input and uses only per-instance normalization, so batch elements never mix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import torch
import torch.nn.functional as F
from torch import nn

from firefront.cwgan.blocks import DenseBlock, DownBlock, UpBlock


@dataclass(frozen=True)
class StageSpec:
    """One Down/Up stage: resample factor p, channel factor q, and the dense
    block's (k, n)."""

    pool: int = 2
    channel_factor: int = 1
    growth: int = 8
    n_sub: int = 2


def _stages_for(resolution: int) -> int:
    # 64 -> 3 stages, 128 -> 4, ..., 512 -> 6; base feature map is 8x8.
    n = int(math.log2(resolution)) - 3
    return max(n, 2)


@dataclass
class GeneratorConfig:
    resolution: int = 512
    in_channels: int = 2
    out_channels: int = 1
    latent_dim: int = 100
    base_channels: int = 16
    dense_block: tuple[int, int] = (8, 2)  # (k, n) for the stem and base blocks
    down: tuple = ()
    up: tuple = ()

    def __post_init__(self):
        stages = _stages_for(self.resolution)
        if not self.down:
            self.down = tuple(StageSpec() for _ in range(stages))
        if not self.up:
            # Narrow the merged skip channels back down on the way up.
            self.up = tuple(StageSpec(channel_factor=2) for _ in range(stages))
        self.down = tuple(StageSpec(**s) if isinstance(s, dict) else s for s in self.down)
        self.up = tuple(StageSpec(**s) if isinstance(s, dict) else s for s in self.up)
        if len(self.down) != len(self.up):
            raise ValueError(
                f"U-Net symmetry requires equal stage counts, got "
                f"{len(self.down)} down vs {len(self.up)} up")
        scale = 1
        for s in self.down:
            scale *= s.pool
        if self.resolution % scale:
            raise ValueError(f"resolution {self.resolution} not divisible by {scale}")

    @staticmethod
    def from_dict(d: dict) -> "GeneratorConfig":
        d = dict(d)
        d["dense_block"] = tuple(d.get("dense_block", (8, 2)))
        return GeneratorConfig(**d)


@dataclass
class CriticConfig:
    resolution: int = 512
    in_channels: int = 3
    base_channels: int = 16
    dense_block: tuple[int, int] = (8, 2)
    down: tuple = ()
    fc_width: int = 128

    def __post_init__(self):
        if not self.down:
            self.down = tuple(StageSpec() for _ in range(_stages_for(self.resolution)))
        self.down = tuple(StageSpec(**s) if isinstance(s, dict) else s for s in self.down)

    @staticmethod
    def from_dict(d: dict) -> "CriticConfig":
        d = dict(d)
        d["dense_block"] = tuple(d.get("dense_block", (8, 2)))
        return CriticConfig(**d)


class Generator(nn.Module):
    def __init__(self, config: GeneratorConfig):
        super().__init__()
        self.config = config
        k0, n0 = config.dense_block
        self.stem_conv = nn.Conv2d(config.in_channels, config.base_channels, 3,
                                   padding=1, padding_mode="reflect")
        self.stem_dense = DenseBlock(config.base_channels, k0, n0, norm="none")

        channels = self.stem_dense.out_channels
        skip_channels = [channels]
        self.downs = nn.ModuleList()
        for s in config.down:
            block = DownBlock(channels, s.pool, s.channel_factor, s.growth, s.n_sub,
                              latent_dim=config.latent_dim, norm="cin")
            self.downs.append(block)
            channels = block.out_channels
            skip_channels.append(channels)

        self.base = DenseBlock(channels, k0, n0, latent_dim=config.latent_dim, norm="cin")
        channels = self.base.out_channels

        self.ups = nn.ModuleList()
        for i, s in enumerate(config.up):
            skip = skip_channels[len(config.down) - 1 - i]
            block = UpBlock(channels, skip, s.pool, s.channel_factor,
                            s.growth, s.n_sub, latent_dim=config.latent_dim, norm="cin")
            self.ups.append(block)
            channels = block.out_channels

        self.head = nn.Conv2d(channels, config.out_channels, kernel_size=1)

    def forward(self, cond: torch.Tensor, z: torch.Tensor) -> torch.Tensor:
        """Map (B, 2, H, W) conditioning and (B, latent_dim) noise to
        (B, 1, H, W) samples in [0, 1]."""
        r = self.config.resolution
        if cond.ndim != 4 or cond.shape[1:] != (self.config.in_channels, r, r):
            raise ValueError(
                f"expected conditioning of shape (B, {self.config.in_channels}, {r}, {r}), "
                f"got {tuple(cond.shape)}")
        if z.ndim != 2 or z.shape != (cond.shape[0], self.config.latent_dim):
            raise ValueError(
                f"expected latent of shape ({cond.shape[0]}, {self.config.latent_dim}), "
                f"got {tuple(z.shape)}")
        x = self.stem_dense(F.elu(self.stem_conv(cond)))
        skips = [x]
        for down in self.downs:
            x = down(x, z)
            skips.append(x)
        x = self.base(x, z)
        for i, up in enumerate(self.ups):
            x = up(x, skips[len(self.downs) - 1 - i], z)
        return torch.sigmoid(self.head(x))


class Critic(nn.Module):
    def __init__(self, config: CriticConfig):
        super().__init__()
        self.config = config
        k0, n0 = config.dense_block
        self.stem_conv = nn.Conv2d(config.in_channels, config.base_channels, 3,
                                   padding=1, padding_mode="reflect")
        self.stem_dense = DenseBlock(config.base_channels, k0, n0, norm="none")

        channels = self.stem_dense.out_channels
        size = config.resolution
        self.downs = nn.ModuleList()
        for s in config.down:
            block = DownBlock(channels, s.pool, s.channel_factor, s.growth, s.n_sub,
                              norm="instance")
            self.downs.append(block)
            channels = block.out_channels
            size //= s.pool

        self.fc1 = nn.Linear(channels * size * size, config.fc_width)
        self.fc2 = nn.Linear(config.fc_width, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Score a batch of stacked (arrival, measurement, terrain) tensors
        of shape (B, 3, H, W); returns (B,)."""
        r = self.config.resolution
        if x.ndim != 4 or x.shape[1:] != (self.config.in_channels, r, r):
            raise ValueError(
                f"expected input of shape (B, {self.config.in_channels}, {r}, {r}), "
                f"got {tuple(x.shape)}")
        h = self.stem_dense(F.elu(self.stem_conv(x)))
        for down in self.downs:
            h = down(h)
        h = F.elu(self.fc1(h.flatten(1)))
        return self.fc2(h).squeeze(1)

    def score(self, tau: torch.Tensor, taubar: torch.Tensor, h: torch.Tensor) -> torch.Tensor:
        """Score separate (B, 1, H, W) fields."""
        if not (tau.shape == taubar.shape == h.shape):
            raise ValueError(
                f"field shapes differ: {tuple(tau.shape)}, {tuple(taubar.shape)}, "
                f"{tuple(h.shape)}")
        return self.forward(torch.cat([tau, taubar, h], dim=1))
