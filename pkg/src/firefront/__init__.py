"""firefront: probabilistic wildfire arrival-time reconstruction.

A desk-scale pipeline that (1) simulates plausible fire-arrival-time maps with
a fast-marching spread surrogate, (2) synthesizes satellite-like sparse
measurements, (3) trains a conditional Wasserstein GAN to sample arrival maps
conditioned on measurement and terrain, and (4) validates predicted perimeters
against reference perimeters.
"""

from firefront.rasters import (
    ArrivalField,
    BACKGROUND_HOURS,
    Field,
    GridSpec,
    MeasurementField,
    TerrainField,
    UnitField,
    canonical_grid,
    denormalize_arrival,
    desk_grid,
    normalize_arrival,
    normalize_terrain,
    pad_center,
    read_raster,
    resample,
    write_raster,
)

__version__ = "0.1.0"

__all__ = [
    "ArrivalField",
    "BACKGROUND_HOURS",
    "Field",
    "GridSpec",
    "MeasurementField",
    "TerrainField",
    "UnitField",
    "canonical_grid",
    "denormalize_arrival",
    "desk_grid",
    "normalize_arrival",
    "normalize_terrain",
    "pad_center",
    "read_raster",
    "resample",
    "write_raster",
    "__version__",
]
