"""From raw satellite detection records to a model-ready measurement raster.

Builds a synthetic detection file (the documented CSV format), estimates the
ignition time from the earliest in-domain high-confidence geostationary
detection, then grids the polar-orbiter detections into arrival-time values
on the 375 m measurement lattice.
Run:  python demos/06_ingest_detections.py
"""

import pathlib
from datetime import datetime, timedelta, timezone

import numpy as np

from firefront.ingest import (
    DetectionRecord,
    DomainSpec,
    estimate_ignition,
    grid_viirs,
    read_detections,
    write_detections,
)
from firefront.plots import plot_raster
from firefront.rasters import BACKGROUND_HOURS

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

center = (34.24, -117.87)
start_guess = datetime(2020, 9, 6, 19, 0, tzinfo=timezone.utc)
rng = np.random.default_rng(6)

records = [
    # Geostationary detections: dense in time, coarse in space.
    DetectionRecord(center[0], center[1], start_guess + timedelta(minutes=16),
                    "high", "GOES", footprint_m=2000),
    DetectionRecord(center[0], center[1], start_guess + timedelta(minutes=21),
                    "high", "GOES", footprint_m=2000),
    DetectionRecord(center[0] + 0.01, center[1], start_guess - timedelta(minutes=10),
                    "nominal", "GOES", footprint_m=2000),
]
# Polar-orbiter overpasses: two passes, a cluster of 375 m pixels each.
for pass_hours, n_pix in ((9.5, 30), (21.0, 60)):
    for _ in range(n_pix):
        records.append(DetectionRecord(
            center[0] + float(rng.normal(0, 0.008)),
            center[1] + float(rng.normal(0, 0.010)),
            start_guess + timedelta(hours=pass_hours, minutes=float(rng.uniform(0, 6))),
            "high", "VIIRS"))

csv_path = OUT / "detections.csv"
write_detections(csv_path, records)
print(f"wrote {len(records)} detection records to {csv_path}")

domain = DomainSpec.centered(*center)
loaded = read_detections(csv_path)
ignition = estimate_ignition(loaded, domain, start_guess)
print(f"ignition estimate: {ignition.isoformat()} "
      f"(earliest in-domain high-confidence GOES detection)")

measurement = grid_viirs(loaded, ignition, domain)
n_meas = int((measurement.values != BACKGROUND_HOURS).sum())
print(f"measurement raster: {measurement.grid.rows}x{measurement.grid.cols} at "
      f"{measurement.grid.cell_size:g} m, {n_meas} measured pixels")
print(f"figure: {plot_raster(measurement, OUT / 'ingested_measurement.png')}")
