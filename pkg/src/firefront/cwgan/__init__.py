from firefront.cwgan.blocks import CondInstanceNorm, DenseBlock, DownBlock, UpBlock
from firefront.cwgan.networks import Critic, CriticConfig, Generator, GeneratorConfig, StageSpec
from firefront.cwgan.losses import (
    generator_loss,
    gradient_penalty,
    sample_latent,
    wgan_objective,
)
from firefront.cwgan.data import TupleTensorDataset
from firefront.cwgan.training import TrainConfig, load_checkpoint, train

__all__ = [
    "CondInstanceNorm",
    "Critic",
    "CriticConfig",
    "DenseBlock",
    "DownBlock",
    "Generator",
    "GeneratorConfig",
    "StageSpec",
    "TrainConfig",
    "TupleTensorDataset",
    "UpBlock",
    "generator_loss",
    "gradient_penalty",
    "load_checkpoint",
    "sample_latent",
    "train",
    "wgan_objective",
]
