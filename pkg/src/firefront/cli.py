"""Batch command-line interface.

One subcommand per pipeline stage (synth / train / infer / ingest / eval /
ablate / plot) so stages run and resume independently. Flags mirror config
keys with precedence flag > config file > default; every artifact directory
receives a provenance record (resolved config, hash, seed, versions) that
suffices to regenerate it deterministically.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from firefront.config import ConfigError, RunConfig
from firefront.provenance import provenance_record, write_provenance


def _require(path, what: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{what} not found: {path}")
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_synth(cfg: RunConfig, args) -> int:
    from firefront.dataset import Manifest, build_dataset
    from firefront.provenance import config_hash

    section = cfg["synth"]
    out = cfg.out_path("dataset")
    manifest_path = out / "manifest.json"
    if manifest_path.exists():
        existing = Manifest.load(manifest_path)
        if existing.config_hash == config_hash(section) and \
                all((out / e.taubar).exists() for e in existing.entries):
            print(f"dataset complete: {len(existing.entries)} tuples at {out}")
            return 0
    manifest = build_dataset(section, out)
    write_provenance(out, provenance_record("synth", section, section.seed))
    print(f"wrote {len(manifest.train_entries)} train + {len(manifest.val_entries)} "
          f"val tuples to {out}")
    return 0


def _resolution_from_manifest(cfg: RunConfig, manifest) -> None:
    """Networks follow the dataset grid unless the config pinned a resolution."""
    import dataclasses

    rows = manifest.grid["rows"]
    for name in ("generator", "critic"):
        section = cfg[name]
        if "resolution" in cfg.explicit[name] or section.resolution == rows:
            continue
        kwargs = {f.name: getattr(section, f.name) for f in dataclasses.fields(section)}
        kwargs["resolution"] = rows
        # Stage counts derive from resolution unless the config spelled them out.
        if "down" not in cfg.explicit[name]:
            kwargs["down"] = ()
        if "up" in kwargs and "up" not in cfg.explicit[name]:
            kwargs["up"] = ()
        cfg.sections[name] = type(section)(**kwargs)


def cmd_train(cfg: RunConfig, args) -> int:
    from firefront.cwgan.training import train
    from firefront.dataset import Manifest

    manifest = Manifest.load(_require(Path(args.dataset) / "manifest.json", "dataset manifest"))
    _resolution_from_manifest(cfg, manifest)
    out = cfg.out_path("training")
    result = train(manifest, cfg["generator"], cfg["critic"], cfg["train"], out,
                   resume=not args.fresh)
    write_provenance(out, provenance_record(
        "train", {"train": cfg["train"], "generator": cfg["generator"],
                  "critic": cfg["critic"], "dataset_hash": manifest.config_hash},
        cfg["train"].seed))
    last = result.metrics[-1]
    print(f"trained to epoch {last['epoch']}; validation mismatch {last['val_mismatch']:.3f}; "
          f"checkpoint at {result.checkpoint_path}")
    return 0


def cmd_infer(cfg: RunConfig, args) -> int:
    from firefront.cwgan.training import load_checkpoint
    from firefront.inference import sample_ensemble, write_contour_geojson
    from firefront.rasters import Field, read_raster, write_raster

    section = cfg["infer"]
    generator, _, _ = load_checkpoint(_require(args.checkpoint, "checkpoint"))
    taubar = read_raster(_require(args.measurement, "measurement raster"))
    terrain = read_raster(_require(args.terrain, "terrain raster"))
    out = cfg.out_path("inference")
    out.mkdir(parents=True, exist_ok=True)

    result = sample_ensemble(generator, taubar, terrain, K=section.k,
                             seed=section.seed, batch_size=section.batch_size,
                             keep_samples=section.keep_samples)
    write_raster(out / "mean.fgr", result.mean)
    std = Field(result.grid, result.std)
    std.units = "hours"
    write_raster(out / "std.fgr", std)
    times = np.arange(section.contour_interval_hours, 48.0 + 1e-9,
                      section.contour_interval_hours)
    write_contour_geojson(out / "contours.geojson", result.mean, times)
    write_provenance(out, provenance_record("infer", section, section.seed))
    print(f"ensemble of {section.k} samples -> {out}/mean.fgr, std.fgr, contours.geojson")
    return 0


def cmd_ingest(cfg: RunConfig, args) -> int:
    from firefront.ingest import (
        DomainSpec,
        estimate_ignition,
        grid_viirs,
        parse_utc,
        read_detections,
    )
    from firefront.rasters import write_raster

    section = cfg["ingest"]
    records = read_detections(_require(args.records, "detection records"))
    domain = DomainSpec.centered(args.center_lat, args.center_lon,
                                 rows=section.rows, cell_size=section.cell_size)
    ignition = estimate_ignition(records, domain, parse_utc(args.start),
                                 window_hours=section.window_hours,
                                 max_window_hours=section.max_window_hours)
    measurement = grid_viirs(records, ignition, domain)
    out = cfg.out_path("ingest")
    out.mkdir(parents=True, exist_ok=True)
    write_raster(out / "measurement.fgr", measurement)
    (out / "ignition.json").write_text(json.dumps(
        {"ignition_utc": ignition.isoformat(),
         "center": [args.center_lat, args.center_lon]}, indent=2))
    write_provenance(out, provenance_record("ingest", section, cfg.seed))
    n = int((measurement.values != 48.0).sum())
    print(f"ignition estimate {ignition.isoformat()}; {n} measured pixels -> {out}")
    return 0


def cmd_eval(cfg: RunConfig, args) -> int:
    from firefront.evaluation import evaluate_fire, read_perimeter_geojson
    from firefront.rasters import Field, read_raster, write_raster

    section = cfg["evaluate"]
    ref_time = args.ref_time if args.ref_time is not None else section.ref_time_hours
    mean = read_raster(_require(args.mean, "mean arrival raster"))
    rings = read_perimeter_geojson(_require(args.perimeter, "reference perimeter"))
    result = evaluate_fire(mean, rings, ref_time)
    out = cfg.out_path("evaluation")
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(result.report(), indent=2))
    agreement = Field(mean.grid, result.agreement.astype(np.float32))
    agreement.units = "code"
    write_raster(out / "agreement.fgr", agreement)
    write_provenance(out, provenance_record("eval", section, cfg.seed))
    m = result.metrics

    def fmt(v):
        return "n/a" if v is None else f"{v:.3f}"

    print(f"SC {fmt(m.sc)}  POD {fmt(m.pod)}  FAR {fmt(m.far)} "
          f"(A={result.areas.agreement}, B={result.areas.false_negative}, "
          f"C={result.areas.false_positive}) -> {out}/report.json")
    return 0


def cmd_ablate(cfg: RunConfig, args) -> int:
    from firefront.cwgan.training import load_checkpoint
    from firefront.dataset import Manifest
    from firefront.evaluation import terrain_ablation

    section = cfg["ablate"]
    generator, _, _ = load_checkpoint(_require(args.checkpoint, "checkpoint"))
    manifest = Manifest.load(_require(Path(args.dataset) / "manifest.json", "dataset manifest"))
    entries = manifest.val_entries or manifest.train_entries
    tuples = []
    for e in entries[:section.max_tuples]:
        _, taubar, h = e.load(manifest.root)
        tuples.append((taubar, h))
    result = terrain_ablation(generator, tuples, K=section.k, seed=section.seed,
                              bins=section.bins)
    out = cfg.out_path("ablation")
    out.mkdir(parents=True, exist_ok=True)
    result.save(out / "ablation.json")
    write_provenance(out, provenance_record("ablate", section, section.seed))
    print(f"{result.n_included} pixels pooled over {len(tuples)} tuples; "
          f"{100 * result.frac_within_half_hour:.1f}% within 30 min; "
          f"mean diff {result.mean_diff_hours * 60:.2f} min -> {out}/ablation.json")
    return 0


_PLOT_KINDS = ("auto", "tuple", "raster", "mean-std", "agreement", "ablation",
               "metrics", "contour-map")


def _infer_plot_kind(path: Path) -> str:
    name = path.name.lower()
    if name == "manifest.json":
        return "tuple"
    if name.endswith(".jsonl"):
        return "metrics"
    if "ablation" in name and name.endswith(".json"):
        return "ablation"
    if name.endswith(".fgr"):
        if "agreement" in name:
            return "agreement"
        if "mean" in name:
            return "mean-std"
        return "raster"
    raise ConfigError(f"cannot infer plot kind for {path}; pass --kind")


def cmd_plot(cfg: RunConfig, args) -> int:
    from firefront import plots
    from firefront.dataset import Manifest
    from firefront.rasters import read_raster

    out = cfg.out_path("figures")
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for raw in args.artifacts:
        path = _require(raw, "artifact")
        kind = args.kind if args.kind != "auto" else _infer_plot_kind(path)
        stem = path.stem
        if kind == "tuple":
            manifest = Manifest.load(path)
            entry = manifest.entries[args.index]
            tau, taubar, h = entry.load(manifest.root)
            written.append(plots.plot_tuple(tau, taubar, h, out / f"tuple_{args.index:04d}.png"))
        elif kind == "metrics":
            metrics = [json.loads(line) for line in path.read_text().splitlines()]
            written.append(plots.plot_training_curves(metrics, out / "training_curves.png"))
        elif kind == "ablation":
            written.append(plots.plot_ablation_histogram(
                json.loads(path.read_text()), out / "ablation_histogram.png"))
        elif kind == "agreement":
            codes = read_raster(path).values.astype(int)
            written.append(plots.plot_agreement(codes, out / f"{stem}_map.png"))
        elif kind == "mean-std":
            mean = read_raster(path)
            std_path = path.with_name(path.name.replace("mean", "std"))
            if std_path.exists():
                std = read_raster(std_path).values
                written.append(plots.plot_mean_std(mean, std, out / "mean_std.png"))
            written.append(plots.plot_contour_map(mean, out / "contour_map.png"))
        elif kind == "contour-map":
            written.append(plots.plot_contour_map(read_raster(path), out / f"{stem}_contours.png"))
        elif kind == "raster":
            written.append(plots.plot_raster(read_raster(path), out / f"{stem}.png"))
        else:
            raise ConfigError(f"unknown plot kind {kind!r}")
    for p in written:
        print(f"wrote {p}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run-config file")
    p.add_argument("--out", help="output root (overrides config and FIREFRONT_OUT)")
    p.add_argument("--seed", type=int, help="global seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firefront",
        description="Probabilistic wildfire arrival-time reconstruction pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a surrogate training dataset")
    _add_common(p)
    p.add_argument("--n-fires", type=int, dest="n_fires")
    p.add_argument("--val-fires", type=int, dest="val_fires")
    p.add_argument("--augment-factor", type=int, dest="augment_factor")
    p.add_argument("--meas-factor", type=int, dest="meas_factor")
    p.add_argument("--crop-rows", type=int, dest="crop_rows")
    p.add_argument("--cell-size", type=float, dest="cell_size")

    p = sub.add_parser("train", help="train the conditional WGAN")
    _add_common(p)
    p.add_argument("--dataset", required=True, help="dataset directory (with manifest.json)")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch", type=int)
    p.add_argument("--fresh", action="store_true", help="ignore existing checkpoints")

    p = sub.add_parser("infer", help="sample a conditional ensemble")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--measurement", required=True)
    p.add_argument("--terrain", required=True)
    p.add_argument("--k", type=int)

    p = sub.add_parser("ingest", help="detections -> measurement raster")
    _add_common(p)
    p.add_argument("--records", required=True, help="detection CSV")
    p.add_argument("--center-lat", type=float, required=True)
    p.add_argument("--center-lon", type=float, required=True)
    p.add_argument("--start", required=True, help="approximate fire start (ISO-8601 UTC)")
    p.add_argument("--rows", type=int)
    p.add_argument("--cell-size", type=float, dest="cell_size")

    p = sub.add_parser("eval", help="compare a mean arrival map against a perimeter")
    _add_common(p)
    p.add_argument("--mean", required=True)
    p.add_argument("--perimeter", required=True, help="reference polygon GeoJSON")
    p.add_argument("--ref-time", type=float, dest="ref_time",
                   help="hours since ignition of the reference perimeter")

    p = sub.add_parser("ablate", help="terrain-influence histogram")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--max-tuples", type=int, dest="max_tuples")

    p = sub.add_parser("plot", help="render artifact figures")
    _add_common(p)
    p.add_argument("artifacts", nargs="+")
    p.add_argument("--kind", choices=_PLOT_KINDS, default="auto")
    p.add_argument("--index", type=int, default=0, help="tuple index for manifest plots")

    return parser


_FLAG_SECTIONS = {
    "synth": ("n_fires", "val_fires", "augment_factor", "meas_factor",
              "crop_rows", "cell_size"),
    "train": ("epochs", "batch"),
    "infer": ("k",),
    "ingest": ("rows", "cell_size"),
    "evaluate": (),
    "ablate": ("k", "max_tuples"),
}

_COMMAND_SECTION = {"synth": "synth", "train": "train", "infer": "infer",
                    "ingest": "ingest", "eval": "evaluate", "ablate": "ablate"}

_HANDLERS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "infer": cmd_infer,
    "ingest": cmd_ingest,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "plot": cmd_plot,
}


def _overrides_from_args(args) -> dict:
    overrides: dict = {"seed": getattr(args, "seed", None),
                       "out_dir": getattr(args, "out", None)}
    section = _COMMAND_SECTION.get(args.command)
    if section:
        keys = _FLAG_SECTIONS.get(section, ())
        overrides[section] = {k: getattr(args, k, None) for k in keys}
    return overrides


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(getattr(args, "config", None), _overrides_from_args(args))
        return _HANDLERS[args.command](cfg, args)
    except (ConfigError, FileNotFoundError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
