"""Building blocks: conditional instance norm, dense blocks, down/up stages.

Dense blocks use the concatenating composition: sub-block ``i`` consumes the
concatenation of the block input and all previous sub-block outputs, and emits
``growth`` feature maps, so a block grows its channel count by
``n_sub * growth``. The generator's blocks normalize with conditional
instance normalization whose scale/shift are linear functions of the latent
vector, injecting stochasticity at every scale; the critic's blocks use plain
(unconditional) instance normalization.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn


class CondInstanceNorm(nn.Module):
    """Instance norm with latent-dependent scale and shift.

    Per channel: ``y = gamma(z) * (x - mean) / (std + eps) + beta(z)`` with
    statistics over the spatial dims of each instance. ``eps`` guards
    zero-variance (constant) channels, which collapse to ``beta(z)``.
    """

    def __init__(self, channels: int, latent_dim: int, eps: float = 1e-5):
        super().__init__()
        self.eps = eps
        self.scale = nn.Linear(latent_dim, channels)
        self.shift = nn.Linear(latent_dim, channels)
        nn.init.ones_(self.scale.bias)
        nn.init.zeros_(self.shift.bias)

    def forward(self, x: torch.Tensor, z: torch.Tensor) -> torch.Tensor:
        mean = x.mean(dim=(2, 3), keepdim=True)
        std = x.std(dim=(2, 3), keepdim=True, unbiased=False)
        gamma = self.scale(z)[:, :, None, None]
        beta = self.shift(z)[:, :, None, None]
        return gamma * (x - mean) / (std + self.eps) + beta


class _SubBlock(nn.Module):
    """norm -> ELU -> 3x3 conv, emitting ``growth`` channels."""

    def __init__(self, in_channels: int, growth: int, latent_dim=None, norm: str = "none"):
        super().__init__()
        if norm == "cin":
            if latent_dim is None:
                raise ValueError("cin normalization needs a latent_dim")
            self.norm = CondInstanceNorm(in_channels, latent_dim)
        elif norm == "instance":
            self.norm = nn.InstanceNorm2d(in_channels, affine=True)
        elif norm == "none":
            self.norm = None
        else:
            raise ValueError(f"unknown norm {norm!r}")
        self.conv = nn.Conv2d(in_channels, growth, kernel_size=3, padding=1,
                              padding_mode="reflect")

    def forward(self, x, z=None):
        if isinstance(self.norm, CondInstanceNorm):
            x = self.norm(x, z)
        elif self.norm is not None:
            x = self.norm(x)
        return self.conv(F.elu(x))


class DenseBlock(nn.Module):
    """DB(k, n): n sub-blocks of k features each, densely concatenated.

    Output channels = input channels + n * k.
    """

    def __init__(self, in_channels: int, growth: int, n_sub: int,
                 latent_dim=None, norm: str = "none"):
        super().__init__()
        if n_sub < 1:
            raise ValueError("dense block needs at least one sub-block")
        self.subs = nn.ModuleList(
            _SubBlock(in_channels + i * growth, growth, latent_dim, norm)
            for i in range(n_sub))
        self.out_channels = in_channels + n_sub * growth

    def forward(self, x, z=None):
        feats = x
        for sub in self.subs:
            feats = torch.cat([feats, sub(feats, z)], dim=1)
        return feats


class DownBlock(nn.Module):
    """Down(p, q, k, n): conv widening channels by q, ELU, p-fold average
    pooling, then a dense block."""

    def __init__(self, in_channels: int, pool: int, widen: int, growth: int,
                 n_sub: int, latent_dim=None, norm: str = "none"):
        super().__init__()
        mid = in_channels * widen
        self.conv = nn.Conv2d(in_channels, mid, kernel_size=3, padding=1,
                              padding_mode="reflect")
        self.pool = nn.AvgPool2d(pool) if pool > 1 else None
        self.dense = DenseBlock(mid, growth, n_sub, latent_dim, norm)
        self.out_channels = self.dense.out_channels

    def forward(self, x, z=None):
        x = F.elu(self.conv(x))
        if self.pool is not None:
            x = self.pool(x)
        return self.dense(x, z)


class UpBlock(nn.Module):
    """Up(p, q, k, n): p-fold bilinear refinement, skip concatenation, conv
    narrowing channels by q, ELU, then a dense block."""

    def __init__(self, in_channels: int, skip_channels: int, pool: int, narrow: int,
                 growth: int, n_sub: int, latent_dim=None, norm: str = "cin"):
        super().__init__()
        self.pool = pool
        merged = in_channels + skip_channels
        mid = max(merged // narrow, 1)
        self.conv = nn.Conv2d(merged, mid, kernel_size=3, padding=1,
                              padding_mode="reflect")
        self.dense = DenseBlock(mid, growth, n_sub, latent_dim, norm)
        self.out_channels = self.dense.out_channels

    def forward(self, x, skip, z=None):
        if self.pool > 1:
            x = F.interpolate(x, scale_factor=self.pool, mode="bilinear",
                              align_corners=False)
        x = torch.cat([x, skip], dim=1)
        x = F.elu(self.conv(x))
        return self.dense(x, z)
