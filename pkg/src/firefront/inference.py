"""Conditional ensemble sampling and perimeter extraction.

A trained generator maps one (measurement, terrain) pair plus latent draws to
an ensemble of arrival-time maps. Pixelwise mean and standard deviation over
the ensemble give the best-guess progression and its uncertainty; thresholding
the mean at a time of interest gives burned masks and geolocated perimeter
contours.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from firefront.contours import find_contours
from firefront.rasters import (
    ArrivalField,
    ARRIVAL_SCALE_HOURS,
    BACKGROUND_HOURS,
    GridSpec,
    MeasurementField,
    TerrainField,
    normalize_arrival,
    normalize_terrain,
)
from firefront.seeding import subseed

#: Pixels at or above this arrival are treated as never-burned sentinels.
SENTINEL_CUTOFF_HOURS = 47.99


@dataclass
class EnsembleResult:
    """K arrival-map samples (hours) with pixelwise population statistics."""

    grid: GridSpec
    samples: np.ndarray  # (K, H, W) float32, hours; None when not kept
    mean: ArrivalField
    std: np.ndarray      # (H, W), hours
    K: int
    seed: int


def conditioning_tensor(taubar: MeasurementField, h: TerrainField,
                        device="cpu") -> torch.Tensor:
    """Normalized (1, 2, H, W) conditioning stack."""
    tb = normalize_arrival(taubar).values.astype(np.float32)
    th = normalize_terrain(h).values.astype(np.float32)
    return torch.from_numpy(np.stack([tb, th])[None]).to(device)


def sample_ensemble(generator, taubar: MeasurementField, h: TerrainField,
                    K: int = 500, seed: int = 0, batch_size: int = 64,
                    device: str = "cpu", keep_samples: bool = True) -> EnsembleResult:
    """Draw K conditional samples and reduce them to mean/std in hours.

    Statistics use the population (1/K) convention. Deterministic per seed;
    sample order never affects the statistics.
    """
    if K < 2:
        raise ValueError(f"need K >= 2 samples for a standard deviation, got {K}")
    if taubar.grid.shape != h.grid.shape:
        raise ValueError("measurement and terrain grids differ")
    cond = conditioning_tensor(taubar, h, device)
    latent_dim = generator.config.latent_dim
    z_rng = torch.Generator(device=device)
    z_rng.manual_seed(subseed(seed, "ensemble-z"))
    # One up-front draw keeps results independent of the batching choice.
    z_all = torch.randn(K, latent_dim, device=device, generator=z_rng)

    rows, cols = taubar.grid.shape
    out = np.empty((K, rows, cols), dtype=np.float32) if keep_samples else None
    # Streaming (Chan) moments so huge ensembles need not be materialized;
    # cancellation-free even for a z-insensitive generator.
    count = 0
    mean = np.zeros((rows, cols), dtype=np.float64)
    m2 = np.zeros((rows, cols), dtype=np.float64)

    generator.eval()
    done = 0
    with torch.no_grad():
        while done < K:
            n = min(batch_size, K - done)
            z = z_all[done:done + n]
            fake = generator(cond.expand(n, -1, -1, -1), z)[:, 0]
            hours = fake.cpu().numpy().astype(np.float32) * ARRIVAL_SCALE_HOURS
            if out is not None:
                out[done:done + n] = hours
            batch = hours.astype(np.float64)
            mean_b = batch.mean(axis=0)
            m2_b = ((batch - mean_b) ** 2).sum(axis=0)
            delta = mean_b - mean
            total = count + n
            mean = mean + delta * (n / total)
            m2 = m2 + m2_b + delta**2 * (count * n / total)
            count = total
            done += n

    var = np.maximum(m2 / K, 0.0)
    return EnsembleResult(grid=taubar.grid, samples=out,
                          mean=ArrivalField(taubar.grid, np.clip(mean, 0.0, BACKGROUND_HOURS)),
                          std=np.sqrt(var), K=K, seed=seed)


@dataclass
class Perimeter:
    time_hours: float
    mask: np.ndarray             # burned-by-t pixels
    contours: list[np.ndarray]   # (N, 2) fractional (row, col) polylines


def perimeter_at(mean: ArrivalField, t: float) -> Perimeter:
    """Burned mask and contour at time ``t``.

    Burned means arrival <= t, with sentinel pixels (>= 47.99 h) always
    excluded: the sentinel encodes "not burned within the window", never a
    real arrival.
    """
    if not 0.0 <= t <= BACKGROUND_HOURS:
        raise ValueError(f"time {t} outside [0, 48] h")
    level = min(t, SENTINEL_CUTOFF_HOURS)
    mask = (mean.values <= t) & (mean.values < SENTINEL_CUTOFF_HOURS)
    contours = find_contours(mean.values, level)
    return Perimeter(time_hours=t, mask=mask, contours=contours)


def contours_to_geojson(mean: ArrivalField, times) -> dict:
    """Geolocated contour lines for each time, as a GeoJSON FeatureCollection
    with an ``hours`` property per feature."""
    features = []
    for t in times:
        for line in perimeter_at(mean, float(t)).contours:
            lat, lon = mean.grid.pixel_to_latlon(line[:, 0], line[:, 1])
            coords = np.column_stack([lon, lat]).tolist()
            features.append({
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": coords},
                "properties": {"hours": float(t)},
            })
    return {"type": "FeatureCollection", "features": features}


def write_contour_geojson(path, mean: ArrivalField, times) -> Path:
    path = Path(path)
    path.write_text(json.dumps(contours_to_geojson(mean, times)))
    return path
