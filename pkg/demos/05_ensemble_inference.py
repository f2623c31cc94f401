"""Sample a conditional ensemble and reduce it to mean/std arrival maps.

Uses the toy checkpoint from demo 04 (run that first). Each latent draw gives
one plausible arrival map consistent with the measurement and terrain; the
pixelwise mean is the best-guess progression and the pixelwise standard
deviation maps where the reconstruction is uncertain. Contours of the mean at
fixed intervals export as geolocated GeoJSON for GIS overlay.
Run:  python demos/04_train_cwgan.py && python demos/05_ensemble_inference.py
"""

import pathlib

from firefront.cwgan.training import load_checkpoint
from firefront.dataset import Manifest
from firefront.inference import sample_ensemble, write_contour_geojson
from firefront.plots import plot_mean_std

OUT = pathlib.Path(__file__).parent / "output"
checkpoint = OUT / "demo_training" / "checkpoint.pt"
if not checkpoint.exists():
    raise SystemExit("run demos/04_train_cwgan.py first (missing demo checkpoint)")

generator, _, payload = load_checkpoint(checkpoint)
manifest = Manifest.load(OUT / "demo_dataset" / "manifest.json")
entry = manifest.val_entries[0]
tau_true, taubar, terrain = entry.load(manifest.root)

result = sample_ensemble(generator, taubar, terrain, K=64, seed=3, batch_size=32)
print(f"ensemble of {result.K} samples from checkpoint at epoch {payload['epoch']}")
print(f"mean arrival range [{result.mean.values.min():.1f}, "
      f"{result.mean.values.max():.1f}] h; "
      f"std range [{result.std.min():.2f}, {result.std.max():.2f}] h")

print(f"maps: {plot_mean_std(result.mean, result.std, OUT / 'ensemble_mean_std.png')}")
geo = write_contour_geojson(OUT / "ensemble_contours.geojson", result.mean,
                            times=range(4, 48, 4))
print(f"contours: {geo}")
