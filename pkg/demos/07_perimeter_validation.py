"""Score a predicted fire perimeter against a reference polygon.

Compares the burned area implied by a mean arrival map at the reference time
with a geolocated reference perimeter: agreement / false-negative /
false-positive areas, then SC (Sorensen-Dice), POD (probability of
detection), and FAR (false alarm ratio).
Run:  python demos/07_perimeter_validation.py
"""

import pathlib

import numpy as np

from firefront.augment import zero_ignition
from firefront.evaluation import evaluate_fire
from firefront.inference import perimeter_at
from firefront.plots import plot_agreement
from firefront.rasters import GridSpec, center_crop
from firefront.spread import FireRecipe, simulate_arrival

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# Surrogate truth plays the fire; a perturbed copy plays the "prediction".
terrain, fuel, config = FireRecipe(ros_scale_range=(1.4, 2.0)).sample(
    seed=12, grid=GridSpec(150, 150, 200.0))
truth = zero_ignition(center_crop(simulate_arrival(terrain, fuel, config), 64, 64))
prediction = truth.with_values(np.clip(truth.values * 1.08 + 0.4, 0, 48.0))

# Reference polygon: the truth's 24 h contour, geolocated.
ref_time = 24.0
rings = []
for line in perimeter_at(truth, ref_time).contours:
    lat, lon = truth.grid.pixel_to_latlon(line[:, 0], line[:, 1])
    rings.append(np.column_stack([lon, lat]))

result = evaluate_fire(prediction, rings, ref_time)
m, a = result.metrics, result.areas
print(f"areas: agreement {a.agreement}, false-negative {a.false_negative}, "
      f"false-positive {a.false_positive} pixels")
print(f"SC {m.sc:.3f}  POD {m.pod:.3f}  FAR {m.far:.3f}")
print(f"agreement map: {plot_agreement(result.agreement, OUT / 'agreement_map.png')}")
