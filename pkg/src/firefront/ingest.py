"""Satellite detection ingestion.

Detections arrive as delimited text records (lat, lon, ISO-8601 UTC time,
confidence, source) regardless of which native archive produced them; this
module turns them into model inputs. Ignition time comes from the earliest
high-confidence geostationary (GOES) detection inside the domain, searched in
a growing window around the reported start. Polar-orbiter (VIIRS) detections
are binned onto a 375 m grid co-located with the domain, valued by hours since
ignition, then resampled and padded to the model grid.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from firefront.rasters import (
    BACKGROUND_HOURS,
    GridSpec,
    MeasurementField,
    pad_center,
    resample,
)

logger = logging.getLogger(__name__)

CONFIDENCE_LEVELS = ("low", "nominal", "high")
SOURCES = ("GOES", "VIIRS")
VIIRS_CELL_M = 375.0


class IngestError(ValueError):
    pass


class IgnitionNotFound(RuntimeError):
    """No qualifying GOES detection within the maximum search window."""


def parse_utc(text: str) -> datetime:
    t = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if t.tzinfo is None:
        t = t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


@dataclass(frozen=True)
class DetectionRecord:
    lat: float
    lon: float
    time: datetime
    confidence: str
    source: str
    footprint_m: float = VIIRS_CELL_M

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise IngestError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise IngestError(f"longitude {self.lon} outside [-180, 180]")
        if self.confidence not in CONFIDENCE_LEVELS:
            raise IngestError(f"confidence {self.confidence!r} not in {CONFIDENCE_LEVELS}")
        if self.source not in SOURCES:
            raise IngestError(f"source {self.source!r} not in {SOURCES}")
        if self.time.tzinfo is None:
            raise IngestError("detection times must be timezone-aware UTC")


_FIELDS = ["lat", "lon", "time", "confidence", "source", "footprint_m"]


def read_detections(path) -> list[DetectionRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(_FIELDS[:5]) - set(reader.fieldnames or ())
        if missing:
            raise IngestError(f"{path}: detection file missing columns {sorted(missing)}")
        for row in reader:
            records.append(DetectionRecord(
                lat=float(row["lat"]), lon=float(row["lon"]),
                time=parse_utc(row["time"]),
                confidence=row["confidence"].strip(),
                source=row["source"].strip(),
                footprint_m=float(row.get("footprint_m") or VIIRS_CELL_M)))
    return records


def write_detections(path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_FIELDS)
        for r in records:
            writer.writerow([f"{r.lat:.6f}", f"{r.lon:.6f}", r.time.isoformat(),
                             r.confidence, r.source, f"{r.footprint_m:g}"])


@dataclass
class DomainSpec:
    """A 12.8 km working domain centered on the fire of interest."""

    center: tuple[float, float]
    grid: GridSpec

    def __post_init__(self):
        ns, ew = self.grid.extent_m
        if abs(ns - ew) > 1e-6:
            raise IngestError(f"domain must be square, got {ns} x {ew} m")

    @staticmethod
    def centered(lat: float, lon: float, rows: int = 512,
                 cell_size: float = 25.0) -> "DomainSpec":
        return DomainSpec(center=(lat, lon),
                          grid=GridSpec.centered((lat, lon), rows, rows, cell_size))


def estimate_ignition(records, domain: DomainSpec, approx_start: datetime,
                      window_hours: float = 1.0, max_window_hours: float = 48.0,
                      growth: float = 2.0) -> datetime:
    """Earliest in-domain high-confidence GOES detection near the start time.

    The search widens the +/- window geometrically until a detection appears
    or the cap is reached.
    """
    goes = [r for r in records
            if r.source == "GOES" and r.confidence == "high"
            and bool(domain.grid.contains(r.lat, r.lon))]
    window = window_hours
    while True:
        lo = approx_start - timedelta(hours=window)
        hi = approx_start + timedelta(hours=window)
        hits = [r for r in goes if lo <= r.time <= hi]
        if hits:
            return min(h.time for h in hits)
        if window >= max_window_hours:
            raise IgnitionNotFound(
                f"no high-confidence GOES detection within +/-{max_window_hours} h "
                f"of {approx_start.isoformat()}")
        window = min(window * growth, max_window_hours)


def viirs_grid(domain: DomainSpec) -> tuple[GridSpec, int]:
    """The coarse measurement grid co-located with the domain, plus the
    fine-cells-per-coarse-cell factor."""
    factor = max(1, round(VIIRS_CELL_M / domain.grid.cell_size))
    cells = domain.grid.rows // factor
    row0 = (domain.grid.rows - cells * factor) // 2
    return domain.grid.coarsened(factor, row0, row0), factor


def grid_viirs(records, ignition: datetime, domain: DomainSpec) -> MeasurementField:
    """Bin high-confidence VIIRS detections into a measurement raster.

    Cell values are hours from ignition to detection; collisions keep the
    earliest. Detections before ignition clamp to zero (sensor/clock skew);
    detections at or past the 48 h window are dropped. Unhit cells carry the
    48 h background, and the result is upsampled and centered on the domain
    grid.
    """
    coarse_grid, factor = viirs_grid(domain)
    values = np.full(coarse_grid.shape, BACKGROUND_HOURS)
    for r in records:
        if r.source != "VIIRS" or r.confidence != "high":
            continue
        i, j = coarse_grid.latlon_to_pixel(r.lat, r.lon)
        if not (0 <= i < coarse_grid.rows and 0 <= j < coarse_grid.cols):
            continue
        hours = (r.time - ignition).total_seconds() / 3600.0
        if hours < 0.0:
            logger.warning("detection at %s precedes ignition %s; clamping to 0 h",
                           r.time.isoformat(), ignition.isoformat())
            hours = 0.0
        if hours >= BACKGROUND_HOURS:
            continue
        values[i, j] = min(values[i, j], hours)

    coarse = MeasurementField(coarse_grid, values)
    fine_grid = GridSpec(coarse_grid.rows * factor, coarse_grid.cols * factor,
                         domain.grid.cell_size, coarse_grid.origin)
    fine = resample(coarse, fine_grid, "nearest")
    return pad_center(fine, domain.grid, fill=BACKGROUND_HOURS)
