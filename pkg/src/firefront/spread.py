"""Fast-marching fire-spread surrogate.

Produces plausible 48-hour fire-arrival-time solutions over synthetic terrain
and fuel, standing in for a full coupled atmosphere-fire model so the whole
pipeline can be trained and tested at desk scale. Spread is solved as a
shortest-travel-time problem on a grid graph: each edge costs
``distance / mean endpoint rate-of-spread``, and arrival times are the
single-source shortest times from the ignition pixel.

The default neighborhood includes knight moves (16 directions). The plain
8-neighborhood's octile metric overshoots a Euclidean cone by up to 8.24%,
which is outside our 8% accuracy budget; adding knight moves brings the
worst case down to about 2.8%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from firefront.rasters import ArrivalField, BACKGROUND_HOURS, GridSpec, TerrainField

N_FUEL_CATEGORIES = 13

#: Zero-wind, zero-slope rate of spread per fuel category, m/min. Grass models
#: (1-3) run fast, timber litter (8-10) slow, brush and slash in between.
DEFAULT_BASE_ROS = (1.4, 0.9, 1.8, 1.6, 0.8, 0.9, 0.7, 0.25, 0.5, 0.45, 0.35, 0.55, 0.7)

_MOVES_8 = tuple((di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0))
_MOVES_16 = _MOVES_8 + tuple(
    (di, dj) for di in (-2, -1, 1, 2) for dj in (-2, -1, 1, 2) if abs(di) != abs(dj)
)


class SpreadError(ValueError):
    pass


@dataclass
class FuelMap:
    """Per-pixel fuel category on the Anderson FBFM13 index (1..13)."""

    grid: GridSpec
    category: np.ndarray

    def __post_init__(self):
        self.category = np.asarray(self.category)
        if self.category.shape != self.grid.shape:
            raise SpreadError(f"fuel shape {self.category.shape} != grid {self.grid.shape}")
        if not np.issubdtype(self.category.dtype, np.integer):
            raise SpreadError("fuel categories must be integers")
        lo, hi = int(self.category.min()), int(self.category.max())
        if lo < 1 or hi > N_FUEL_CATEGORIES:
            raise SpreadError(f"fuel categories must lie in 1..13, got range [{lo}, {hi}]")


@dataclass
class SpreadConfig:
    """Knobs for one surrogate fire.

    ``wind_dir_deg`` is the direction the wind blows toward, degrees clockwise
    from north. ``unburnable`` designates categories treated as water/rock
    analogues: the fire never traverses them. ``connectivity`` is 8 or 16.
    """

    ignition: tuple[int, int]
    base_ros: tuple = DEFAULT_BASE_ROS
    wind_speed: float = 0.0
    wind_dir_deg: float = 0.0
    wind_gain: float = 0.0
    slope_gain: float = 0.0
    horizon_hours: float = BACKGROUND_HOURS
    connectivity: int = 16
    unburnable: frozenset = frozenset()
    seed: int = 0

    def __post_init__(self):
        if len(self.base_ros) != N_FUEL_CATEGORIES:
            raise SpreadError(f"base_ros needs {N_FUEL_CATEGORIES} entries")
        if min(self.base_ros) <= 0:
            raise SpreadError("base rates of spread must be strictly positive")
        if self.horizon_hours <= 0:
            raise SpreadError("horizon must be positive")
        if self.connectivity not in (8, 16):
            raise SpreadError("connectivity must be 8 or 16")
        if not self.unburnable <= set(range(1, N_FUEL_CATEGORIES + 1)):
            raise SpreadError("unburnable categories must lie in 1..13")

    @property
    def moves(self):
        return _MOVES_16 if self.connectivity == 16 else _MOVES_8


# ---------------------------------------------------------------------------
# Synthetic inputs
# ---------------------------------------------------------------------------

def _spectral_noise(rng: np.random.Generator, shape, roughness: float) -> np.ndarray:
    """Fractal noise: white spectrum shaped by k^-roughness, unit-free output."""
    rows, cols = shape
    kr = np.fft.fftfreq(rows)[:, None]
    kc = np.fft.rfftfreq(cols)[None, :]
    k = np.hypot(kr, kc)
    k[0, 0] = 1.0
    amplitude = k ** (-roughness)
    amplitude[0, 0] = 0.0
    phase = rng.uniform(0, 2 * np.pi, size=amplitude.shape)
    spectrum = amplitude * np.exp(1j * phase)
    out = np.fft.irfft2(spectrum, s=shape)
    return out


def synth_terrain(seed: int, relief: float, spec: GridSpec,
                  roughness: float = 2.0, base_height: float = 0.0) -> TerrainField:
    """Deterministic fractal terrain with max - min rescaled to ``relief`` meters."""
    if relief < 0:
        raise SpreadError(f"relief must be >= 0, got {relief}")
    rng = np.random.default_rng(seed)
    noise = _spectral_noise(rng, spec.shape, roughness)
    span = noise.max() - noise.min()
    if relief == 0 or span == 0:
        values = np.full(spec.shape, base_height)
    else:
        values = base_height + (noise - noise.min()) * (relief / span)
    return TerrainField(spec, values)


def synth_fuel(seed: int, spec: GridSpec, categories=(1, 2, 4, 6, 9),
               roughness: float = 2.5) -> FuelMap:
    """Procedural fuel blobs: smooth noise quantile-split across ``categories``."""
    if not categories:
        raise SpreadError("need at least one fuel category")
    rng = np.random.default_rng(seed)
    noise = _spectral_noise(rng, spec.shape, roughness)
    edges = np.quantile(noise, np.linspace(0, 1, len(categories) + 1)[1:-1])
    idx = np.digitize(noise, edges)
    cat = np.asarray(categories, dtype=np.int64)[idx]
    return FuelMap(spec, cat)


# ---------------------------------------------------------------------------
# Rate of spread
# ---------------------------------------------------------------------------

def rate_of_spread(category, slope, wind_alignment, config: SpreadConfig):
    """Rate of spread (m/min) toward a neighbor.

    ``slope`` is rise/run toward the neighbor (positive uphill),
    ``wind_alignment`` the cosine of the angle between the spread direction
    and the wind. Downslope and upwind give no penalty below the base rate.
    Accepts scalars or arrays.
    """
    category = np.asarray(category)
    if np.any(category < 1) or np.any(category > N_FUEL_CATEGORIES):
        raise SpreadError(f"unknown fuel category in {np.unique(category)}")
    base = np.asarray(config.base_ros)[category - 1]
    slope_factor = 1.0 + config.slope_gain * np.maximum(np.asarray(slope), 0.0)
    wind_factor = 1.0 + config.wind_gain * np.maximum(np.asarray(wind_alignment), 0.0)
    return base * slope_factor * wind_factor


def _knight_intermediates(di: int, dj: int):
    """Cells a knight move passes over (relative to the source pixel)."""
    si = 1 if di > 0 else -1
    sj = 1 if dj > 0 else -1
    if abs(dj) == 2:
        return ((0, sj), (di, sj))
    return ((si, 0), (si, dj))


def _edge_arrays(terrain: TerrainField, fuel: FuelMap, config: SpreadConfig):
    """Yield (src_flat, dst_flat, traversal_hours) per move direction."""
    rows, cols = terrain.grid.shape
    cell = terrain.grid.cell_size
    h = terrain.values
    cat = fuel.category
    flat = np.arange(rows * cols).reshape(rows, cols)
    wind_rad = math.radians(config.wind_dir_deg)
    wind_vec = (math.sin(wind_rad), math.cos(wind_rad))  # (east, north)
    burnable = ~np.isin(cat, list(config.unburnable)) if config.unburnable else None

    for di, dj in config.moves:
        run = math.hypot(di, dj) * cell
        # Move direction in map coordinates: east = dj, north = -di.
        norm = math.hypot(di, dj)
        align = (dj * wind_vec[0] - di * wind_vec[1]) / norm
        src = (slice(max(0, -di), rows - max(0, di)), slice(max(0, -dj), cols - max(0, dj)))
        dst = (slice(max(0, di), rows + min(0, di)), slice(max(0, dj), cols + min(0, dj)))
        slope = (h[dst] - h[src]) / run
        speed_src = rate_of_spread(cat[src], slope, align, config)
        speed_dst = rate_of_spread(cat[dst], slope, align, config)
        minutes = run / (0.5 * (speed_src + speed_dst))
        if burnable is None:
            keep = slice(None)
        else:
            keep = burnable[src] & burnable[dst]
            if abs(di) + abs(dj) == 3:
                # Knight moves must not leap over unburnable barriers.
                for mi, mj in _knight_intermediates(di, dj):
                    mid = (slice(max(0, -di) + mi, rows - max(0, di) + mi),
                           slice(max(0, -dj) + mj, cols - max(0, dj) + mj))
                    keep &= burnable[mid]
        yield (flat[src][keep].ravel(), flat[dst][keep].ravel(),
               (minutes[keep] / 60.0).ravel())


def simulate_arrival(terrain: TerrainField, fuel: FuelMap, config: SpreadConfig) -> ArrivalField:
    """Shortest-travel-time arrival map from the ignition pixel.

    Pixels unreachable within the horizon carry the background sentinel 48.
    """
    rows, cols = terrain.grid.shape
    if terrain.grid.shape != fuel.grid.shape:
        raise SpreadError("terrain and fuel grids differ")
    i0, j0 = config.ignition
    if not (0 <= i0 < rows and 0 <= j0 < cols):
        raise SpreadError(f"ignition {config.ignition} outside grid {terrain.grid.shape}")
    if config.unburnable and int(fuel.category[i0, j0]) in config.unburnable:
        raise SpreadError("ignition pixel is unburnable")

    srcs, dsts, hours = [], [], []
    for s, d, t in _edge_arrays(terrain, fuel, config):
        srcs.append(s)
        dsts.append(d)
        hours.append(t)
    n = rows * cols
    graph = coo_matrix(
        (np.concatenate(hours), (np.concatenate(srcs), np.concatenate(dsts))), shape=(n, n)
    ).tocsr()
    arrival = dijkstra(graph, directed=True, indices=i0 * cols + j0).reshape(rows, cols)
    arrival[~np.isfinite(arrival)] = BACKGROUND_HOURS
    arrival[arrival > config.horizon_hours] = BACKGROUND_HOURS
    return ArrivalField(terrain.grid, arrival)


def bellman_residual(arrival: ArrivalField, terrain: TerrainField, fuel: FuelMap,
                     config: SpreadConfig) -> float:
    """Max relative violation of the shortest-path fixed point over burned pixels.

    Every burned pixel's arrival must equal the min over in-neighbors of
    neighbor arrival + edge traversal time; the ignition pixel itself is the
    boundary condition.
    """
    rows, cols = arrival.grid.shape
    a = arrival.values.ravel()
    best = np.full(rows * cols, np.inf)
    for s, d, t in _edge_arrays(terrain, fuel, config):
        np.minimum.at(best, d, a[s] + t)
    burned = (a < BACKGROUND_HOURS)
    burned[config.ignition[0] * cols + config.ignition[1]] = False
    if not burned.any():
        return 0.0
    residual = np.abs(a[burned] - best[burned]) / np.maximum(a[burned], 1e-12)
    return float(residual.max())


# ---------------------------------------------------------------------------
# Random fire sampling
# ---------------------------------------------------------------------------

@dataclass
class FireRecipe:
    """Parameter ranges for sampling random surrogate fires.

    Defaults produce fires spanning roughly 2-12 km over 48 hours.
    """

    relief_range: tuple[float, float] = (100.0, 1500.0)
    roughness_range: tuple[float, float] = (1.8, 2.4)
    wind_speed_range: tuple[float, float] = (0.0, 10.0)
    wind_gain_per_mps: float = 0.18
    slope_gain_range: tuple[float, float] = (0.5, 3.0)
    ros_scale_range: tuple[float, float] = (0.7, 1.4)
    categories: tuple = (1, 2, 3, 4, 5, 6, 7, 9, 10, 12)
    ignition_jitter_frac: float = 0.08
    connectivity: int = 16

    def sample(self, seed: int, grid: GridSpec):
        """Draw (terrain, fuel, config) deterministically from ``seed``."""
        rng = np.random.default_rng(seed)
        relief = rng.uniform(*self.relief_range)
        roughness = rng.uniform(*self.roughness_range)
        terrain = synth_terrain(int(rng.integers(2**31)), relief, grid, roughness=roughness)
        n_cats = rng.integers(2, min(6, len(self.categories)) + 1)
        cats = tuple(sorted(rng.choice(self.categories, size=n_cats, replace=False)))
        fuel = synth_fuel(int(rng.integers(2**31)), grid, categories=cats)
        wind_speed = rng.uniform(*self.wind_speed_range)
        scale = rng.uniform(*self.ros_scale_range)
        jitter = self.ignition_jitter_frac
        i0 = int(rng.integers(int(grid.rows * (0.5 - jitter)), int(grid.rows * (0.5 + jitter)) + 1))
        j0 = int(rng.integers(int(grid.cols * (0.5 - jitter)), int(grid.cols * (0.5 + jitter)) + 1))
        config = SpreadConfig(
            ignition=(i0, j0),
            base_ros=tuple(r * scale for r in DEFAULT_BASE_ROS),
            wind_speed=wind_speed,
            wind_dir_deg=float(rng.uniform(0, 360)),
            wind_gain=self.wind_gain_per_mps * wind_speed,
            slope_gain=float(rng.uniform(*self.slope_gain_range)),
            connectivity=self.connectivity,
            seed=seed,
        )
        return terrain, fuel, config


def simulation_grid(crop: GridSpec) -> GridSpec:
    """Simulation grid for a given training crop: same 1200/512 margin ratio
    as the canonical setup (1200 x 1200 at 25 m for 512-pixel crops)."""
    rows = int(round(crop.rows * 1200 / 512))
    cols = int(round(crop.cols * 1200 / 512))
    return GridSpec(rows, cols, crop.cell_size, crop.origin)
