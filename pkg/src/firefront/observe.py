"""Approximate satellite observation operator.

Degrades a true fire-arrival-time map into the kind of measurement a sequence
of 375 m polar-orbiter overpasses would give, with the ignition-time error a
geostationary estimate introduces: coarsen with a box kernel, take a few
overpass copies with independent per-pixel dropout, collapse each overpass to
its observation time over a look-back window, min-combine, shift by the
ignition-time error, blank obstruction patches, and upsample back to the
input grid with the 48 h background everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from firefront.rasters import (
    ArrivalField,
    BACKGROUND_HOURS,
    MeasurementField,
    center_crop,
    pad_center,
    resample,
)

VIIRS_RESOLUTION_M = 375.0


class FireTooSmall(ValueError):
    """Max burned arrival too early for any observation time to be drawn."""


@dataclass
class ObsParams:
    copies: int = 4
    keep_prob: float = 0.5
    time_lower: float = 2.0          # earliest possible observation, hours
    time_margin: float = 0.1         # observation times stop short of max arrival
    window_range: tuple[float, float] = (6.0, 12.0)   # look-back window, hours
    ignition_error_range: tuple[float, float] = (0.0, 2.0)
    patch_count: int = 2
    patch_size_m: float = 3000.0
    background: float = BACKGROUND_HOURS
    coarsen_factor: Optional[int] = None  # default: ~375 m in grid cells

    def __post_init__(self):
        if self.copies < 1:
            raise ValueError("need at least one measurement copy")
        if not 0.0 <= self.keep_prob <= 1.0:
            raise ValueError(f"keep_prob must lie in [0, 1], got {self.keep_prob}")
        if self.window_range[0] > self.window_range[1] or self.window_range[0] < 0:
            raise ValueError(f"bad look-back window range {self.window_range}")
        if self.patch_count < 0:
            raise ValueError("patch_count must be >= 0")

    def factor_for(self, cell_size: float) -> int:
        if self.coarsen_factor is not None:
            return self.coarsen_factor
        return max(1, round(VIIRS_RESOLUTION_M / cell_size))


@dataclass
class ObsTrace:
    """Random draws behind one synthesized measurement, for replay/audit."""

    times: np.ndarray
    windows: np.ndarray
    ignition_error: float
    patches: list
    factor: int
    coarse_burned: np.ndarray = field(repr=False, default=None)


def sample_obs_times(max_arrival: float, rng: np.random.Generator,
                     params: ObsParams = ObsParams()) -> np.ndarray:
    """Draw ``copies`` observation times from U(2, max_arrival - 0.1), sorted."""
    lo = params.time_lower
    hi = max_arrival - params.time_margin
    if hi <= lo:
        raise FireTooSmall(
            f"max burned arrival {max_arrival:.2f} h leaves no room for "
            f"observation times above {lo} h")
    return np.sort(rng.uniform(lo, hi, size=params.copies))


def interval_mask(coarse: np.ndarray, t_obs: float, window: float,
                  background: float = BACKGROUND_HOURS) -> np.ndarray:
    """Collapse one overpass: arrivals inside (max(t-window, 0), t] read ``t_obs``.

    Everything else becomes background. Pixels still burning at the overpass
    (ignited within the look-back window) are what the sensor sees.
    """
    lo = max(t_obs - window, 0.0)
    inside = (coarse > lo) & (coarse <= t_obs)
    return np.where(inside, t_obs, background)


def combine_min(copies: list[np.ndarray]) -> np.ndarray:
    """Pixelwise minimum across overpass copies; background loses to any value."""
    if not copies:
        raise ValueError("no copies to combine")
    shape = copies[0].shape
    if any(c.shape != shape for c in copies):
        raise ValueError("copies must share one grid")
    out = copies[0]
    for c in copies[1:]:
        out = np.minimum(out, c)
    return out


def apply_observation(tau: ArrivalField, params: ObsParams, seed: int) -> MeasurementField:
    field_, _ = apply_observation_traced(tau, params, seed)
    return field_


def apply_observation_traced(tau: ArrivalField, params: ObsParams,
                             seed: int) -> tuple[MeasurementField, ObsTrace]:
    """Full operator, also returning the random draws used.

    Deterministic per (input, params, seed). Raises :class:`FireTooSmall`
    when the fire cannot be observed; dataset builders skip such tuples.
    """
    rng = np.random.default_rng(seed)
    bg = params.background
    factor = params.factor_for(tau.grid.cell_size)
    cells = tau.grid.rows // factor
    cells_c = tau.grid.cols // factor
    cropped = center_crop(tau, cells * factor, cells_c * factor)
    coarse_field = resample(cropped, cropped.grid.coarsened(factor), "block_mean")
    coarse = coarse_field.values

    burned = tau.values < BACKGROUND_HOURS
    if not burned.any():
        raise FireTooSmall("no burned pixels to observe")
    max_arrival = float(tau.values[burned].max())

    # Draw order mirrors the operator steps: per-copy retention, observation
    # times, look-back windows, ignition error, obstruction patches.
    retain = [rng.random(coarse.shape) < params.keep_prob for _ in range(params.copies)]
    times = sample_obs_times(max_arrival, rng, params)
    windows = rng.uniform(*params.window_range, size=params.copies)

    masked = []
    for j in range(params.copies):
        m = interval_mask(coarse, float(times[j]), float(windows[j]), bg)
        masked.append(np.where(retain[j], m, bg))
    combined = combine_min(masked)

    ignition_error = float(rng.uniform(*params.ignition_error_range))
    measured = combined != bg
    combined = np.where(measured, combined - ignition_error, bg)

    patch_cells = max(1, round(params.patch_size_m / (tau.grid.cell_size * factor)))
    patches = []
    for _ in range(params.patch_count):
        r0 = int(rng.integers(0, max(cells - patch_cells, 0) + 1))
        c0 = int(rng.integers(0, max(cells_c - patch_cells, 0) + 1))
        combined[r0:r0 + patch_cells, c0:c0 + patch_cells] = bg
        patches.append((r0, c0, patch_cells))

    coarse_meas = MeasurementField(coarse_field.grid, combined)
    fine = resample(coarse_meas, cropped.grid, "nearest")
    out = pad_center(fine, tau.grid, fill=bg)
    trace = ObsTrace(times=times, windows=windows, ignition_error=ignition_error,
                     patches=patches, factor=factor,
                     coarse_burned=coarse < BACKGROUND_HOURS)
    return out, trace
