"""Quantify how much terrain conditioning changes the reconstruction.

For each validation case, the same latent draws condition the generator on
the true terrain and on a flat (all-zero) terrain; the histogram of pixelwise
mean-arrival differences shows how much information the terrain channel
carries. Uses the toy checkpoint from demo 04.
Run:  python demos/04_train_cwgan.py && python demos/08_terrain_ablation.py
"""

import json
import pathlib

from firefront.cwgan.training import load_checkpoint
from firefront.dataset import Manifest
from firefront.evaluation import terrain_ablation
from firefront.plots import plot_ablation_histogram

OUT = pathlib.Path(__file__).parent / "output"
checkpoint = OUT / "demo_training" / "checkpoint.pt"
if not checkpoint.exists():
    raise SystemExit("run demos/04_train_cwgan.py first (missing demo checkpoint)")

generator, _, _ = load_checkpoint(checkpoint)
manifest = Manifest.load(OUT / "demo_dataset" / "manifest.json")
tuples = []
for entry in manifest.val_entries[:4]:
    _, taubar, h = entry.load(manifest.root)
    tuples.append((taubar, h))

result = terrain_ablation(generator, tuples, K=16, seed=2)
print(f"pooled {result.n_included} pixels ({result.n_excluded} excluded as "
      f"unburned in both conditions)")
print(f"mean flat-minus-true difference: {result.mean_diff_hours * 60:.2f} min")
print(f"fraction within 30 min: {100 * result.frac_within_half_hour:.1f}%")

result.save(OUT / "ablation.json")
fig = plot_ablation_histogram(json.loads((OUT / "ablation.json").read_text()),
                              OUT / "ablation_histogram.png")
print(f"histogram: {fig}")
