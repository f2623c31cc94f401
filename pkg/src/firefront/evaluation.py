"""Perimeter agreement metrics and the terrain-influence ablation.

Predicted burned areas are compared against reference perimeters through
three areas: agreement (both burned), false negative (reference only), and
false positive (prediction only). From these, the Sorensen-Dice coefficient
SC = 2A/(2A+B+C), probability of detection POD = A/(A+B), and false alarm
ratio FAR = C/(A+C). All three are ratios of pixel counts, so cell area
cancels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from matplotlib.path import Path as MplPath

from firefront.inference import perimeter_at, sample_ensemble
from firefront.rasters import ArrivalField, GridSpec, TerrainField
from firefront.seeding import subseed

AGREEMENT_CODES = {"background": 0, "agreement": 1, "false_negative": 2, "false_positive": 3}


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class AgreementAreas:
    agreement: int       # A: burned in both
    false_negative: int  # B: burned in reference only
    false_positive: int  # C: burned in prediction only

    def __post_init__(self):
        if min(self.agreement, self.false_negative, self.false_positive) < 0:
            raise EvalError("areas must be non-negative")


@dataclass(frozen=True)
class PerimeterMetrics:
    sc: Optional[float]
    pod: Optional[float]
    far: Optional[float]


def confusion_areas(pred: np.ndarray, ref: np.ndarray) -> AgreementAreas:
    """Pixel counts of agreement / false negative / false positive."""
    pred = np.asarray(pred, dtype=bool)
    ref = np.asarray(ref, dtype=bool)
    if pred.shape != ref.shape:
        raise EvalError(f"mask shapes differ: {pred.shape} vs {ref.shape}")
    return AgreementAreas(
        agreement=int(np.logical_and(pred, ref).sum()),
        false_negative=int(np.logical_and(~pred, ref).sum()),
        false_positive=int(np.logical_and(pred, ~ref).sum()))


def sc_pod_far(areas: AgreementAreas) -> PerimeterMetrics:
    """SC/POD/FAR from the three areas; undefined ratios report None."""
    a, b, c = areas.agreement, areas.false_negative, areas.false_positive
    sc = 2 * a / (2 * a + b + c) if (2 * a + b + c) > 0 else None
    pod = a / (a + b) if (a + b) > 0 else None
    far = c / (a + c) if (a + c) > 0 else None
    return PerimeterMetrics(sc=sc, pod=pod, far=far)


def agreement_raster(pred: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Per-pixel partition into background/agreement/false-neg/false-pos."""
    pred = np.asarray(pred, dtype=bool)
    ref = np.asarray(ref, dtype=bool)
    out = np.zeros(pred.shape, dtype=np.uint8)
    out[pred & ref] = AGREEMENT_CODES["agreement"]
    out[~pred & ref] = AGREEMENT_CODES["false_negative"]
    out[pred & ~ref] = AGREEMENT_CODES["false_positive"]
    return out


# ---------------------------------------------------------------------------
# Reference perimeters
# ---------------------------------------------------------------------------

def read_perimeter_geojson(path) -> list[np.ndarray]:
    """Load polygon rings (lon, lat vertex arrays) from a GeoJSON file.

    Accepts Polygon/MultiPolygon geometries, bare or wrapped in
    Feature/FeatureCollection. Holes participate via even-odd parity.
    """
    doc = json.loads(Path(path).read_text())
    geoms = []

    def collect(node):
        t = node.get("type")
        if t == "FeatureCollection":
            for feat in node["features"]:
                collect(feat)
        elif t == "Feature":
            collect(node["geometry"])
        elif t == "Polygon":
            geoms.extend(node["coordinates"])
        elif t == "MultiPolygon":
            for poly in node["coordinates"]:
                geoms.extend(poly)
        else:
            raise EvalError(f"unsupported GeoJSON type {t!r}")

    collect(doc)
    return [np.asarray(ring, dtype=float) for ring in geoms]


def rasterize_rings(rings: list[np.ndarray], grid: GridSpec) -> np.ndarray:
    """Pixel-center containment mask with even-odd parity across rings."""
    if not rings:
        raise EvalError("no polygon rings given")
    ii, jj = np.mgrid[0:grid.rows, 0:grid.cols]
    lat, lon = grid.pixel_to_latlon(ii.ravel(), jj.ravel())
    points = np.column_stack([lon, lat])
    mask = np.zeros(grid.rows * grid.cols, dtype=bool)
    any_vertex_inside = False
    for ring in rings:
        if ring.ndim != 2 or ring.shape[1] != 2:
            raise EvalError(f"ring must be (N, 2) lon/lat, got {ring.shape}")
        any_vertex_inside |= bool(np.any(grid.contains(ring[:, 1], ring[:, 0])))
        mask ^= MplPath(ring).contains_points(points)
    mask = mask.reshape(grid.rows, grid.cols)
    if not mask.any() and not any_vertex_inside:
        raise EvalError("reference polygon lies entirely outside the domain")
    return mask


@dataclass
class FireEvaluation:
    areas: AgreementAreas
    metrics: PerimeterMetrics
    agreement: np.ndarray
    pred_mask: np.ndarray
    ref_mask: np.ndarray
    ref_time_hours: float

    def report(self) -> dict:
        return {
            "ref_time_hours": self.ref_time_hours,
            "areas": {"agreement": self.areas.agreement,
                      "false_negative": self.areas.false_negative,
                      "false_positive": self.areas.false_positive},
            "sc": self.metrics.sc,
            "pod": self.metrics.pod,
            "far": self.metrics.far,
        }


def evaluate_fire(mean: ArrivalField, ref_rings: list[np.ndarray],
                  ref_time: float) -> FireEvaluation:
    """Compare the predicted perimeter at ``ref_time`` against a reference
    polygon rasterized onto the prediction grid."""
    ref_mask = rasterize_rings(ref_rings, mean.grid)
    pred_mask = perimeter_at(mean, ref_time).mask
    areas = confusion_areas(pred_mask, ref_mask)
    return FireEvaluation(areas=areas, metrics=sc_pod_far(areas),
                          agreement=agreement_raster(pred_mask, ref_mask),
                          pred_mask=pred_mask, ref_mask=ref_mask,
                          ref_time_hours=ref_time)


# ---------------------------------------------------------------------------
# Terrain ablation
# ---------------------------------------------------------------------------

EXCLUDE_ABOVE_HOURS = 47.0


@dataclass
class AblationResult:
    bin_edges: np.ndarray
    counts: np.ndarray
    n_included: int
    n_excluded: int
    mean_diff_hours: float
    max_abs_diff_hours: float
    frac_within_half_hour: float

    def save(self, path) -> None:
        Path(path).write_text(json.dumps({
            "bin_edges": self.bin_edges.tolist(),
            "counts": self.counts.tolist(),
            "n_included": self.n_included,
            "n_excluded": self.n_excluded,
            "mean_diff_hours": self.mean_diff_hours,
            "max_abs_diff_hours": self.max_abs_diff_hours,
            "frac_within_half_hour": self.frac_within_half_hour,
        }, indent=2))


def terrain_ablation(generator, tuples, K: int = 500, seed: int = 0,
                     bins: int = 193, device: str = "cpu",
                     batch_size: int = 64) -> AblationResult:
    """Pixelwise (flat-terrain mean - true-terrain mean) over validation cases.

    For each (measurement, terrain) pair the same K latent draws condition on
    the true terrain and on a constant-zero terrain; pixels later than 47 h in
    both means are excluded as unburned. Differences pool into one histogram.
    """
    edges = np.linspace(-48.0, 48.0, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    n_inc = n_exc = 0
    total = 0.0
    max_abs = 0.0
    within = 0
    for idx, (taubar, h) in enumerate(tuples):
        flat = TerrainField(h.grid, np.zeros(h.grid.shape))
        # Same sub-seed for both conditions: paired latent draws.
        s = subseed(seed, "ablate", idx)
        kw = dict(K=K, seed=s, device=device, batch_size=batch_size, keep_samples=False)
        mean_true = sample_ensemble(generator, taubar, h, **kw).mean.values
        mean_flat = sample_ensemble(generator, taubar, flat, **kw).mean.values
        exclude = (mean_true > EXCLUDE_ABOVE_HOURS) & (mean_flat > EXCLUDE_ABOVE_HOURS)
        diff = (mean_flat - mean_true)[~exclude]
        n_exc += int(exclude.sum())
        n_inc += diff.size
        if diff.size:
            counts += np.histogram(diff, bins=edges)[0]
            total += diff.sum()
            max_abs = max(max_abs, float(np.abs(diff).max()))
            within += int((np.abs(diff) < 0.5).sum())
    return AblationResult(
        bin_edges=edges, counts=counts, n_included=n_inc, n_excluded=n_exc,
        mean_diff_hours=total / n_inc if n_inc else 0.0,
        max_abs_diff_hours=max_abs,
        frac_within_half_hour=within / n_inc if n_inc else 0.0)
