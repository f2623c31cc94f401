"""Geometric augmentation of (arrival, terrain) pairs into training crops.

One shared affine transform (rotate about the source-grid center, then
translate, then center-crop) is applied to both fields so fire and terrain
move together. Arrival times are sampled nearest-neighbor so no value is ever
invented between a burned pixel and the 48 h sentinel; terrain is smooth and
sampled bilinearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from firefront.rasters import (
    ArrivalField,
    BACKGROUND_HOURS,
    GridSpec,
    TerrainField,
)

MAX_TRANSLATION_M = 500.0  # augmentation box is 1 km x 1 km


class CropOutOfBounds(ValueError):
    """The rotated/translated crop window leaves the source grid."""


class AllSentinel(ValueError):
    """Arrival field contains no burned pixels."""


@dataclass(frozen=True)
class AugmentParams:
    """Rotation in degrees, translation in meters as (east, north)."""

    rotation_deg: float
    translation_m: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (0.0 <= self.rotation_deg < 360.0):
            raise ValueError(f"rotation must lie in [0, 360), got {self.rotation_deg}")
        if max(abs(t) for t in self.translation_m) > MAX_TRANSLATION_M:
            raise ValueError(f"translation {self.translation_m} outside the 1 km box")


def sample_augment_params(rng: np.random.Generator) -> AugmentParams:
    return AugmentParams(
        rotation_deg=float(rng.uniform(0.0, 360.0)),
        translation_m=(float(rng.uniform(-MAX_TRANSLATION_M, MAX_TRANSLATION_M)),
                       float(rng.uniform(-MAX_TRANSLATION_M, MAX_TRANSLATION_M))),
    )


def zero_ignition(tau: ArrivalField) -> ArrivalField:
    """Shift burned arrival times so the earliest burned pixel reads zero.

    Sentinel pixels are untouched. Rejects fields with no burned pixels.
    """
    burned = tau.burned_mask()
    if not burned.any():
        raise AllSentinel("arrival field has no burned pixels to zero")
    shift = tau.values[burned].min()
    out = np.where(burned, tau.values - shift, BACKGROUND_HOURS)
    return ArrivalField(tau.grid, out)


def _sample_coords(src_shape, target: GridSpec, params: AugmentParams, cell_size: float):
    """Source (row, col) sampling coordinates for each output pixel."""
    rows_s, cols_s = src_shape
    rows_t, cols_t = target.shape
    cs = ((rows_s - 1) / 2.0, (cols_s - 1) / 2.0)
    co = ((rows_t - 1) / 2.0, (cols_t - 1) / 2.0)
    east, north = params.translation_m
    t_row, t_col = -north / cell_size, east / cell_size

    theta = math.radians(params.rotation_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    ii, jj = np.mgrid[0:rows_t, 0:cols_t]
    # Output pixel position relative to the source center, minus translation.
    dr = (ii - co[0]) - t_row
    dc = (jj - co[1]) - t_col
    # Inverse rotation (the forward transform rotates content by +theta).
    src_r = cos_t * dr + sin_t * dc + cs[0]
    src_c = -sin_t * dr + cos_t * dc + cs[1]
    return src_r, src_c


def augment_pair(tau: ArrivalField, terrain: TerrainField, params: AugmentParams,
                 target: GridSpec) -> tuple[ArrivalField, TerrainField]:
    """Apply the same rotate/translate/crop to an arrival-terrain pair.

    Raises :class:`CropOutOfBounds` when any output pixel would sample outside
    the source grid; callers resample the params in that case.
    """
    if tau.grid.shape != terrain.grid.shape:
        raise ValueError("arrival and terrain grids differ")
    src_r, src_c = _sample_coords(tau.grid.shape, target, params, tau.grid.cell_size)
    rows_s, cols_s = tau.grid.shape
    eps = 1e-6  # tolerate sin/cos roundoff at exact quarter turns
    if (src_r.min() < -eps or src_r.max() > rows_s - 1 + eps
            or src_c.min() < -eps or src_c.max() > cols_s - 1 + eps):
        raise CropOutOfBounds(
            f"rotation {params.rotation_deg:.1f} deg, translation {params.translation_m} m "
            f"leaves the {rows_s}x{cols_s} source")
    src_r = np.clip(src_r, 0, rows_s - 1)
    src_c = np.clip(src_c, 0, cols_s - 1)

    nearest_r = np.clip(np.rint(src_r).astype(int), 0, rows_s - 1)
    nearest_c = np.clip(np.rint(src_c).astype(int), 0, cols_s - 1)
    tau_out = tau.values[nearest_r, nearest_c]
    h_out = map_coordinates(terrain.values, [src_r, src_c], order=1, mode="nearest")
    return ArrivalField(target, tau_out), TerrainField(target, h_out)
