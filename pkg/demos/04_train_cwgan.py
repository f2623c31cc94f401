"""Train the conditional WGAN for a few epochs on a miniature dataset.

Demonstrates the training API at toy scale (tiny networks, two epochs) so it
finishes in about a minute on a laptop CPU. For a real desk-scale run, see
the acceptance suite: 625 tuples at 64 x 64 and 30 epochs are enough for the
generator to reconstruct plausible fire progressions from measurements.
Run:  python demos/04_train_cwgan.py
"""

import pathlib

from firefront.cwgan.networks import CriticConfig, GeneratorConfig, StageSpec
from firefront.cwgan.training import TrainConfig, train
from firefront.dataset import DatasetConfig, build_dataset
from firefront.observe import ObsParams
from firefront.plots import plot_training_curves
from firefront.spread import FireRecipe

OUT = pathlib.Path(__file__).parent / "output"

manifest = build_dataset(DatasetConfig(
    n_fires=2, val_fires=1, augment_factor=4, meas_factor=2, seed=42,
    crop_rows=64, cell_size=200.0,
    recipe=FireRecipe(ros_scale_range=(1.2, 2.0)), obs=ObsParams()),
    OUT / "demo_dataset")

gen_cfg = GeneratorConfig(
    resolution=64, latent_dim=16, base_channels=6, dense_block=(3, 1),
    down=tuple(StageSpec(growth=3, n_sub=1) for _ in range(3)),
    up=tuple(StageSpec(channel_factor=2, growth=3, n_sub=1) for _ in range(3)))
critic_cfg = CriticConfig(
    resolution=64, base_channels=6, dense_block=(3, 1),
    down=tuple(StageSpec(growth=3, n_sub=1) for _ in range(3)), fc_width=32)
train_cfg = TrainConfig(batch=8, epochs=2, critic_steps_per_gen=5, seed=1,
                        mismatch_z_draws=2, max_val_tuples=4, checkpoint_every=1)

result = train(manifest, gen_cfg, critic_cfg, train_cfg, OUT / "demo_training")
for m in result.metrics:
    print(f"epoch {m['epoch']}: critic objective {m['critic_objective']:7.3f}, "
          f"penalty {m['penalty']:6.3f}, grad norm {m['grad_norm']:.2f}, "
          f"val mismatch {m['val_mismatch']:.3f}")
print(f"checkpoint: {result.checkpoint_path}")
print(f"curves: {plot_training_curves(result.metrics, OUT / 'training_curves.png')}")
