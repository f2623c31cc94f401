"""Training-tuple synthesis: surrogate fires -> augmented crops -> measurements.

Each fire yields ``augment_factor`` geometric augmentations, and each
augmentation ``meas_factor`` independent measurements, so ``n_fires`` training
fires produce ``n_fires * augment_factor * meas_factor`` (tau, taubar, h)
tuples. Validation fires are separate draws appended after the training
fires. All randomness derives from the config seed through named sub-seeds,
so rebuilding a dataset is byte-identical and individual tuples can be
replayed.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from firefront.augment import (
    CropOutOfBounds,
    augment_pair,
    sample_augment_params,
    zero_ignition,
)
from firefront.observe import ObsParams, apply_observation
from firefront.provenance import config_dict, config_hash
from firefront.rasters import (
    ArrivalField,
    BACKGROUND_HOURS,
    GridSpec,
    MeasurementField,
    TerrainField,
    read_raster,
    write_raster,
)
from firefront.seeding import rng_for, subseed
from firefront.spread import FireRecipe, simulate_arrival, simulation_grid

logger = logging.getLogger(__name__)


class DatasetError(RuntimeError):
    pass


@dataclass
class DatasetConfig:
    n_fires: int
    val_fires: int = 0
    augment_factor: int = 25
    meas_factor: int = 5
    seed: int = 0
    crop_rows: int = 512
    cell_size: float = 25.0
    origin: tuple[float, float] = (40.0, -120.0)
    recipe: FireRecipe = field(default_factory=FireRecipe)
    obs: ObsParams = field(default_factory=ObsParams)
    # Crops must contain a fire observable at all: enough burned pixels and a
    # late-enough max arrival for observation times to exist.
    min_burned_pixels: int = 16
    min_observable_arrival: float = 2.2
    max_augment_retries: int = 200

    def __post_init__(self):
        if self.n_fires < 1:
            raise ValueError("need at least one training fire")
        if self.val_fires < 0:
            raise ValueError("val_fires must be >= 0")

    @property
    def crop_grid(self) -> GridSpec:
        return GridSpec(self.crop_rows, self.crop_rows, self.cell_size, self.origin)


@dataclass
class TupleEntry:
    fire: int
    aug: int
    meas: int
    split: str
    tau: str
    taubar: str
    terrain: str
    fire_seed: int
    aug_seed: int
    obs_seed: int

    def load(self, root) -> tuple[ArrivalField, MeasurementField, TerrainField]:
        root = Path(root)
        return (read_raster(root / self.tau), read_raster(root / self.taubar),
                read_raster(root / self.terrain))


@dataclass
class Manifest:
    config_hash: str
    seed: int
    grid: dict
    entries: list[TupleEntry]
    root: Path = None

    @property
    def train_entries(self):
        return [e for e in self.entries if e.split == "train"]

    @property
    def val_entries(self):
        return [e for e in self.entries if e.split == "val"]

    def save(self, path) -> None:
        payload = {
            "config_hash": self.config_hash,
            "seed": self.seed,
            "grid": self.grid,
            "counts": {"train": len(self.train_entries), "val": len(self.val_entries)},
            "entries": [vars(e) for e in self.entries],
        }
        Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True))

    @staticmethod
    def load(path) -> "Manifest":
        path = Path(path)
        raw = json.loads(path.read_text())
        entries = [TupleEntry(**e) for e in raw["entries"]]
        return Manifest(config_hash=raw["config_hash"], seed=raw["seed"],
                        grid=raw["grid"], entries=entries, root=path.parent)


def _valid_crop(tau: ArrivalField, config: DatasetConfig) -> bool:
    burned = tau.values < BACKGROUND_HOURS
    if burned.sum() < config.min_burned_pixels:
        return False
    return float(tau.values[burned].max()) > config.min_observable_arrival


def _augment_until_valid(tau, terrain, config: DatasetConfig, fire: int, aug: int):
    crop = config.crop_grid
    for attempt in range(config.max_augment_retries):
        rng = rng_for(config.seed, "aug", fire, aug, attempt)
        params = sample_augment_params(rng)
        try:
            tau_a, h_a = augment_pair(tau, terrain, params, crop)
        except CropOutOfBounds:
            continue
        if _valid_crop(tau_a, config):
            return tau_a, h_a
    raise DatasetError(
        f"fire {fire} aug {aug}: no valid crop in {config.max_augment_retries} attempts "
        "(fire too small for the crop window?)")


def build_dataset(config: DatasetConfig, out_dir) -> Manifest:
    """Generate all tuples and write them plus a manifest under ``out_dir``.

    Re-running against an existing directory skips fires whose files are all
    present (generation is deterministic, so partial runs resume cleanly).
    """
    out = Path(out_dir)
    tuples_dir = out / "tuples"
    tuples_dir.mkdir(parents=True, exist_ok=True)
    chash = config_hash(config)
    crop = config.crop_grid
    sim_grid = simulation_grid(crop)

    entries: list[TupleEntry] = []
    total_fires = config.n_fires + config.val_fires
    for fire in range(total_fires):
        split = "train" if fire < config.n_fires else "val"
        fire_seed = subseed(config.seed, "fire", fire)
        fire_entries, fire_paths = _plan_fire(config, fire, split, fire_seed)
        entries.extend(fire_entries)
        if all((out / p).exists() for p in fire_paths):
            logger.info("fire %d: all %d files present, skipping", fire, len(fire_paths))
            continue
        try:
            _generate_fire(config, fire, fire_entries, sim_grid, fire_seed, out)
        except Exception:
            for p in fire_paths:  # partial-write cleanup
                (out / p).unlink(missing_ok=True)
            raise

    manifest = Manifest(config_hash=chash, seed=config.seed,
                        grid={"rows": crop.rows, "cols": crop.cols,
                              "cell_size": crop.cell_size,
                              "origin": list(crop.origin)},
                        entries=entries, root=out)
    manifest.save(out / "manifest.json")
    return manifest


def _plan_fire(config: DatasetConfig, fire: int, split: str, fire_seed: int):
    entries, paths = [], []
    for aug in range(config.augment_factor):
        tau_path = f"tuples/f{fire:03d}_a{aug:02d}_tau.fgr"
        h_path = f"tuples/f{fire:03d}_a{aug:02d}_h.fgr"
        paths += [tau_path, h_path]
        for meas in range(config.meas_factor):
            taubar_path = f"tuples/f{fire:03d}_a{aug:02d}_m{meas}_taubar.fgr"
            paths.append(taubar_path)
            entries.append(TupleEntry(
                fire=fire, aug=aug, meas=meas, split=split,
                tau=tau_path, taubar=taubar_path, terrain=h_path,
                fire_seed=fire_seed,
                aug_seed=subseed(config.seed, "aug", fire, aug),
                obs_seed=subseed(config.seed, "obs", fire, aug, meas)))
    return entries, paths


def _generate_fire(config: DatasetConfig, fire: int, fire_entries, sim_grid,
                   fire_seed: int, out: Path) -> None:
    terrain, fuel, spread_cfg = config.recipe.sample(fire_seed, sim_grid)
    tau_sim = zero_ignition(simulate_arrival(terrain, fuel, spread_cfg))
    by_aug = {}
    for e in fire_entries:
        by_aug.setdefault(e.aug, []).append(e)
    for aug, group in sorted(by_aug.items()):
        tau_a, h_a = _augment_until_valid(tau_sim, terrain, config, fire, aug)
        try:
            write_raster(out / group[0].tau, tau_a)
            write_raster(out / group[0].terrain, h_a)
            for e in group:
                taubar = apply_observation(tau_a, config.obs, e.obs_seed)
                write_raster(out / e.taubar, taubar)
        except OSError as exc:
            raise DatasetError(
                f"fire {fire} aug {aug}: failed writing tuple files: {exc}") from exc
