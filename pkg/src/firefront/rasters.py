"""Grid and raster primitives shared by the whole pipeline.

Everything downstream operates on axis-aligned, north-up rasters described by a
:class:`GridSpec`. The canonical working grid is 512 x 512 pixels at 25 m
(a 12.8 km x 12.8 km domain); coarser desk-scale tiers keep the same physical
extent with larger cells. Geolocation uses a local equirectangular
approximation around the grid center, which is accurate to well under 0.1%
for domains of this size.

Arrival-time style rasters use hours since ignition with the background
sentinel 48.0 marking "not burned / not measured within the 48 h window".
"""

from __future__ import annotations

import dataclasses
import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EARTH_RADIUS_M = 6_371_000.0

#: Hours after ignition beyond which a pixel counts as unburned/unmeasured.
BACKGROUND_HOURS = 48.0

#: Divisor used to map arrival hours onto [0, 1].
ARRIVAL_SCALE_HOURS = 48.0

#: Divisor used to map terrain height (above its minimum) onto [0, 1].
TERRAIN_SCALE_M = 3000.0

_CONTAINER_MAGIC = b"FFRASTER1\n"


class RasterError(ValueError):
    """Invalid raster content or incompatible grids."""


# ---------------------------------------------------------------------------
# Grid geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned north-up raster grid.

    ``origin`` is the (lat, lon) of the northwest corner. Row indices increase
    southward, column indices eastward. ``cell_size`` is in meters.
    """

    rows: int
    cols: int
    cell_size: float
    origin: tuple[float, float] = (40.0, -120.0)
    north_up: bool = True

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise RasterError(f"grid dims must be positive, got {self.rows}x{self.cols}")
        if not (self.cell_size > 0 and math.isfinite(self.cell_size)):
            raise RasterError(f"cell_size must be positive, got {self.cell_size}")
        if not self.north_up:
            raise RasterError("only north-up grids are supported")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def extent_m(self) -> tuple[float, float]:
        """(north-south, east-west) size in meters."""
        return (self.rows * self.cell_size, self.cols * self.cell_size)

    # -- geolocation -------------------------------------------------------

    @property
    def _m_per_deg_lat(self) -> float:
        return EARTH_RADIUS_M * math.pi / 180.0

    @property
    def center_lat(self) -> float:
        return self.origin[0] - (self.rows * self.cell_size / 2.0) / self._m_per_deg_lat

    @property
    def _m_per_deg_lon(self) -> float:
        return EARTH_RADIUS_M * math.cos(math.radians(self.center_lat)) * math.pi / 180.0

    @property
    def center(self) -> tuple[float, float]:
        lon = self.origin[1] + (self.cols * self.cell_size / 2.0) / self._m_per_deg_lon
        return (self.center_lat, lon)

    def pixel_to_latlon(self, i, j):
        """Center coordinates of pixel (row i, col j); accepts arrays."""
        i = np.asarray(i, dtype=float)
        j = np.asarray(j, dtype=float)
        lat = self.origin[0] - (i + 0.5) * self.cell_size / self._m_per_deg_lat
        lon = self.origin[1] + (j + 0.5) * self.cell_size / self._m_per_deg_lon
        return lat, lon

    def latlon_to_pixel(self, lat, lon):
        """Pixel indices (i, j) containing the given coordinates; accepts arrays.

        Indices may fall outside [0, rows) x [0, cols); see :meth:`contains`.
        """
        lat = np.asarray(lat, dtype=float)
        lon = np.asarray(lon, dtype=float)
        i = np.floor((self.origin[0] - lat) * self._m_per_deg_lat / self.cell_size).astype(int)
        j = np.floor((lon - self.origin[1]) * self._m_per_deg_lon / self.cell_size).astype(int)
        return i, j

    def contains(self, lat, lon):
        i, j = self.latlon_to_pixel(lat, lon)
        return (i >= 0) & (i < self.rows) & (j >= 0) & (j < self.cols)

    # -- derived grids -------------------------------------------------------

    def shifted(self, row0: int, col0: int, rows: int, cols: int) -> "GridSpec":
        """Sub/super-grid with same cell size whose NW corner sits at (row0, col0)."""
        lat = self.origin[0] - row0 * self.cell_size / self._m_per_deg_lat
        lon = self.origin[1] + col0 * self.cell_size / self._m_per_deg_lon
        return GridSpec(rows, cols, self.cell_size, (lat, lon))

    def coarsened(self, factor: int, row0: int = 0, col0: int = 0) -> "GridSpec":
        rows = (self.rows - row0) // factor
        cols = (self.cols - col0) // factor
        base = self.shifted(row0, col0, rows, cols)
        return GridSpec(rows, cols, self.cell_size * factor, base.origin)

    @staticmethod
    def centered(center: tuple[float, float], rows: int, cols: int, cell_size: float) -> "GridSpec":
        """Grid of the given shape whose geometric center is ``center``."""
        m_per_deg_lat = EARTH_RADIUS_M * math.pi / 180.0
        m_per_deg_lon = EARTH_RADIUS_M * math.cos(math.radians(center[0])) * math.pi / 180.0
        lat = center[0] + (rows * cell_size / 2.0) / m_per_deg_lat
        lon = center[1] - (cols * cell_size / 2.0) / m_per_deg_lon
        return GridSpec(rows, cols, cell_size, (lat, lon))


#: Canonical 12.8 km domain: 512 x 512 at 25 m.
def canonical_grid(origin=(40.0, -120.0)) -> GridSpec:
    return GridSpec(512, 512, 25.0, origin)


def desk_grid(rows: int = 64, origin=(40.0, -120.0)) -> GridSpec:
    """Desk-scale tier: same 12.8 km extent, coarser cells (64/128/256 px)."""
    if 12800 % rows:
        raise RasterError(f"desk tier rows must divide 12800 m, got {rows}")
    return GridSpec(rows, rows, 12800.0 / rows, origin)


# ---------------------------------------------------------------------------
# Field containers
# ---------------------------------------------------------------------------

def _check_finite(values: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(values)
    if bad.any():
        raise RasterError(f"{what} has {int(bad.sum())} non-finite pixels")


@dataclass
class Field:
    """A raster: a GridSpec plus a (rows, cols) float array."""

    grid: GridSpec
    values: np.ndarray

    kind = "generic"
    units = ""

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.dtype not in (np.float32, np.float64):
            values = values.astype(float)
        self.values = values
        if self.values.shape != self.grid.shape:
            raise RasterError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}")
        self.validate()

    def validate(self) -> None:
        _check_finite(self.values, self.kind)

    def with_values(self, values: np.ndarray) -> "Field":
        return dataclasses.replace(self, values=values)


class ArrivalField(Field):
    """Fire arrival time in hours since ignition; 48 marks unburned-in-window."""

    kind = "arrival"
    units = "hours"

    def validate(self) -> None:
        _check_finite(self.values, self.kind)
        lo, hi = float(self.values.min()), float(self.values.max())
        if lo < 0.0 or hi > BACKGROUND_HOURS:
            raise RasterError(f"arrival values outside [0, 48]: range [{lo}, {hi}]")

    def burned_mask(self) -> np.ndarray:
        return self.values < BACKGROUND_HOURS


class TerrainField(Field):
    kind = "terrain"
    units = "meters"


class MeasurementField(Field):
    """Sparse measured arrival times; background pixels are exactly 48."""

    kind = "measurement"
    units = "hours"
    background = BACKGROUND_HOURS

    def validate(self) -> None:
        _check_finite(self.values, self.kind)
        measured = self.values != self.background
        vals = self.values[measured]
        if vals.size and (vals.min() <= -2.0 or vals.max() >= BACKGROUND_HOURS):
            raise RasterError(
                "measurement values must be background (48) or in (-2, 48); "
                f"got range [{vals.min()}, {vals.max()}]")

    def measured_mask(self) -> np.ndarray:
        return self.values != self.background


class UnitField(Field):
    kind = "unit"
    units = ""

    def validate(self) -> None:
        _check_finite(self.values, self.kind)
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise RasterError("unit field values must lie in [0, 1]")


_FIELD_KINDS = {cls.kind: cls for cls in (ArrivalField, TerrainField, MeasurementField, UnitField, Field)}


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def normalize_arrival(field: Field) -> UnitField:
    """Map arrival/measurement hours onto [0, 1] by dividing by 48.

    Slightly negative measurement values (ignition-time error can shift
    measurements down by up to 2 h) clamp to 0; the background sentinel maps
    to exactly 1.
    """
    _check_finite(field.values, field.kind)
    if field.values.size and (field.values.min() < -2.0 or field.values.max() > BACKGROUND_HOURS):
        raise RasterError(
            f"arrival normalization expects values in [-2, 48], got "
            f"[{field.values.min()}, {field.values.max()}]")
    u = np.clip(field.values / ARRIVAL_SCALE_HOURS, 0.0, 1.0)
    return UnitField(field.grid, u)


def denormalize_arrival(unit: UnitField, cls=ArrivalField) -> Field:
    return cls(unit.grid, np.asarray(unit.values, dtype=float) * ARRIVAL_SCALE_HOURS)


def normalize_terrain(field: TerrainField) -> UnitField:
    """Shift terrain to a zero minimum and divide by 3000 m, clamping to [0, 1]."""
    _check_finite(field.values, field.kind)
    u = (field.values - field.values.min()) / TERRAIN_SCALE_M
    return UnitField(field.grid, np.clip(u, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Resampling / padding
# ---------------------------------------------------------------------------

def block_mean(values: np.ndarray, factor: int) -> np.ndarray:
    """Average each factor x factor block (box kernel). Dims must divide."""
    r, c = values.shape
    if factor < 1 or r % factor or c % factor:
        raise RasterError(f"block_mean factor {factor} does not divide shape {values.shape}")
    return values.reshape(r // factor, factor, c // factor, factor).mean(axis=(1, 3))


def nearest_upsample(values: np.ndarray, factor: int) -> np.ndarray:
    """Replicate each value into a factor x factor block."""
    if factor < 1:
        raise RasterError(f"upsample factor must be >= 1, got {factor}")
    return np.repeat(np.repeat(values, factor, axis=0), factor, axis=1)


def resample(field: Field, target: GridSpec, mode: str) -> Field:
    """Resample a field between two grids with an integer resolution ratio.

    ``block_mean`` coarsens (e.g. 25 m -> 375 m with a 15 x 15 box kernel);
    ``nearest`` refines, replicating each coarse value so measured arrival
    values are preserved verbatim.
    """
    if mode == "block_mean":
        if field.grid.rows % target.rows or field.grid.cols % target.cols:
            raise RasterError(
                f"block_mean needs an integer ratio, got {field.grid.shape} -> {target.shape}")
        factor = field.grid.rows // target.rows
        if field.grid.cols // target.cols != factor:
            raise RasterError("block_mean requires the same ratio on both axes")
        out = block_mean(field.values, factor)
    elif mode == "nearest":
        if target.rows % field.grid.rows or target.cols % field.grid.cols:
            raise RasterError(
                f"nearest upsample needs an integer ratio, got {field.grid.shape} -> {target.shape}")
        factor = target.rows // field.grid.rows
        if target.cols // field.grid.cols != factor:
            raise RasterError("nearest upsample requires the same ratio on both axes")
        out = nearest_upsample(field.values, factor)
    else:
        raise RasterError(f"unknown resample mode {mode!r}")
    return dataclasses.replace(field, grid=target, values=out)


def center_crop(field: Field, rows: int, cols: int) -> Field:
    """Centered crop; an odd remainder leaves the extra row/col at bottom/right."""
    if rows > field.grid.rows or cols > field.grid.cols:
        raise RasterError(f"crop {rows}x{cols} exceeds grid {field.grid.shape}")
    r0 = (field.grid.rows - rows) // 2
    c0 = (field.grid.cols - cols) // 2
    grid = field.grid.shifted(r0, c0, rows, cols)
    return dataclasses.replace(field, grid=grid, values=field.values[r0:r0 + rows, c0:c0 + cols])


def pad_center(field: Field, target: GridSpec, fill: float) -> Field:
    """Center the field inside ``target``, filling the border with ``fill``.

    Odd padding remainders go to the bottom/right edges.
    """
    dr = target.rows - field.grid.rows
    dc = target.cols - field.grid.cols
    if dr < 0 or dc < 0:
        raise RasterError(f"pad target {target.shape} smaller than input {field.grid.shape}")
    top, left = dr // 2, dc // 2
    out = np.full(target.shape, fill, dtype=field.values.dtype)
    out[top:top + field.grid.rows, left:left + field.grid.cols] = field.values
    grid = field.grid.shifted(-top, -left, target.rows, target.cols)
    return dataclasses.replace(field, grid=grid, values=out)


# ---------------------------------------------------------------------------
# Container I/O
# ---------------------------------------------------------------------------

def write_raster(path, field: Field) -> None:
    """Write the single-precision binary container (JSON header + row-major data)."""
    header = {
        "rows": field.grid.rows,
        "cols": field.grid.cols,
        "cell_size": field.grid.cell_size,
        "origin": [field.grid.origin[0], field.grid.origin[1]],
        "kind": field.kind,
        "units": field.units,
    }
    data = np.ascontiguousarray(field.values, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_CONTAINER_MAGIC)
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(data.tobytes())


def read_raster(path) -> Field:
    with open(path, "rb") as fh:
        magic = fh.read(len(_CONTAINER_MAGIC))
        if magic != _CONTAINER_MAGIC:
            raise RasterError(f"{path}: not a firefront raster container")
        header = json.loads(fh.readline().decode("utf-8"))
        grid = GridSpec(header["rows"], header["cols"], header["cell_size"],
                        (header["origin"][0], header["origin"][1]))
        n = grid.rows * grid.cols
        data = np.frombuffer(fh.read(4 * n), dtype="<f4")
        if data.size != n:
            raise RasterError(f"{path}: truncated raster data")
    cls = _FIELD_KINDS.get(header["kind"], Field)
    return cls(grid, data.reshape(grid.shape).copy())


# ---------------------------------------------------------------------------
# GeoTIFF export (optional convenience for GIS viewers)
# ---------------------------------------------------------------------------

def export_geotiff(path, field: Field) -> None:
    """Write a minimal single-band float32 GeoTIFF (WGS84 geographic).

    Self-contained little-endian classic TIFF writer: one strip, no
    compression, ModelPixelScale/ModelTiepoint geo tags.
    """
    rows, cols = field.grid.shape
    data = np.ascontiguousarray(field.values, dtype="<f4").tobytes()
    scale_x = field.grid.cell_size / field.grid._m_per_deg_lon
    scale_y = field.grid.cell_size / field.grid._m_per_deg_lat
    pixel_scale = struct.pack("<3d", scale_x, scale_y, 0.0)
    # Tie raster corner (0,0) to the NW origin.
    tiepoint = struct.pack("<6d", 0.0, 0.0, 0.0, field.grid.origin[1], field.grid.origin[0], 0.0)
    # GeoKey directory: geographic model, pixel-is-area, WGS84.
    geokeys = struct.pack("<16H", 1, 1, 0, 3,
                          1024, 0, 1, 2,
                          1025, 0, 1, 1,
                          2048, 0, 1, 4326)

    entries = []  # (tag, type, count, value_or_payload, inline)
    TYPE_SHORT, TYPE_LONG, TYPE_DOUBLE = 3, 4, 12
    ifd_offset = 8
    n_entries = 13
    ifd_size = 2 + 12 * n_entries + 4
    extra_offset = ifd_offset + ifd_size
    extras = []

    def out_of_line(payload: bytes) -> int:
        nonlocal extra_offset
        off = extra_offset
        extras.append(payload)
        extra_offset += len(payload)
        return off

    scale_off = out_of_line(pixel_scale)
    tie_off = out_of_line(tiepoint)
    keys_off = out_of_line(geokeys)
    data_offset = extra_offset

    entries = [
        (256, TYPE_LONG, 1, cols),
        (257, TYPE_LONG, 1, rows),
        (258, TYPE_SHORT, 1, 32),
        (259, TYPE_SHORT, 1, 1),
        (262, TYPE_SHORT, 1, 1),
        (273, TYPE_LONG, 1, data_offset),
        (277, TYPE_SHORT, 1, 1),
        (278, TYPE_LONG, 1, rows),
        (279, TYPE_LONG, 1, len(data)),
        (339, TYPE_SHORT, 1, 3),
        (33550, TYPE_DOUBLE, 3, scale_off),
        (33922, TYPE_DOUBLE, 6, tie_off),
        (34735, TYPE_SHORT, 16, keys_off),
    ]

    with open(path, "wb") as fh:
        fh.write(struct.pack("<2sHI", b"II", 42, ifd_offset))
        fh.write(struct.pack("<H", n_entries))
        for tag, typ, count, value in entries:
            if typ == TYPE_SHORT and count == 1:
                fh.write(struct.pack("<HHIHH", tag, typ, count, value, 0))
            else:
                fh.write(struct.pack("<HHII", tag, typ, count, value))
        fh.write(struct.pack("<I", 0))
        for payload in extras:
            fh.write(payload)
        fh.write(data)
