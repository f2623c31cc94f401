"""Adversarial training loop with checkpointing and a metrics log.

Alternates ``critic_steps_per_gen`` critic updates with one generator update.
Every epoch logs the mean critic objective, generator loss, gradient penalty,
interpolate gradient norm, and a validation mismatch: the Frobenius norm of
(true - generated) arrival maps averaged over a fixed set of latent draws and
the validation tuples.

Determinism: all per-epoch randomness (batch order, latent draws, interpolation
coefficients) is seeded from (config seed, epoch), so a resumed run reproduces
exactly what an uninterrupted run would have done.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import torch
from torch.utils.data import DataLoader

from firefront.cwgan.data import TupleTensorDataset
from firefront.cwgan.losses import (
    generator_loss,
    gradient_penalty,
    sample_latent,
    stack_tuple,
    wgan_objective,
)
from firefront.cwgan.networks import Critic, CriticConfig, Generator, GeneratorConfig
from firefront.provenance import config_dict
from firefront.seeding import subseed

logger = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class TrainConfig:
    batch: int = 16
    epochs: int = 160
    lr: float = 1e-3
    beta1: float = 0.5
    beta2: float = 0.9
    weight_decay: float = 1e-7
    critic_steps_per_gen: int = 5
    gp_lambda: float = 10.0
    seed: int = 0
    mismatch_z_draws: int = 4
    max_val_tuples: int = 64
    checkpoint_every: int = 10
    device: str = "cpu"

    def __post_init__(self):
        if min(self.batch, self.epochs, self.critic_steps_per_gen) < 1:
            raise ValueError("batch, epochs and critic_steps_per_gen must be positive")
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")


@dataclass
class TrainResult:
    generator: Generator
    critic: Critic
    metrics: list[dict] = field(default_factory=list)
    checkpoint_path: Path = None
    metrics_path: Path = None


def _adam(params, cfg: TrainConfig):
    return torch.optim.Adam(params, lr=cfg.lr, betas=(cfg.beta1, cfg.beta2),
                            weight_decay=cfg.weight_decay)


def validation_mismatch(generator: Generator, val_ds, cfg: TrainConfig,
                        z_fixed: torch.Tensor) -> float:
    """Mean Frobenius norm of (tau - g(taubar, h, z)) over tuples and z draws."""
    generator.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        n = min(len(val_ds), cfg.max_val_tuples)
        for i in range(n):
            tau, taubar, h = val_ds[i]
            cond = torch.cat([taubar, h], dim=0)[None].to(cfg.device)
            tau = tau.to(cfg.device)
            for z in z_fixed:
                fake = generator(cond, z[None])[0]
                total += torch.linalg.matrix_norm(tau[0] - fake[0]).item()
                count += 1
    generator.train()
    return total / max(count, 1)


def save_checkpoint(path, generator, critic, opt_g, opt_d, epoch: int,
                    gen_cfg, critic_cfg, train_cfg) -> None:
    torch.save({
        "epoch": epoch,
        "generator": generator.state_dict(),
        "critic": critic.state_dict(),
        "opt_g": opt_g.state_dict(),
        "opt_d": opt_d.state_dict(),
        "gen_cfg": config_dict(gen_cfg),
        "critic_cfg": config_dict(critic_cfg),
        "train_cfg": config_dict(train_cfg),
    }, path)


def load_checkpoint(path, device: str = "cpu"):
    """Rebuild (generator, critic, payload) from a checkpoint file."""
    payload = torch.load(path, map_location=device, weights_only=False)
    gen = Generator(GeneratorConfig.from_dict(payload["gen_cfg"]))
    gen.load_state_dict(payload["generator"])
    gen.to(device).eval()
    critic = Critic(CriticConfig.from_dict(payload["critic_cfg"]))
    critic.load_state_dict(payload["critic"])
    critic.to(device).eval()
    return gen, critic, payload


def train(manifest, gen_cfg: GeneratorConfig, critic_cfg: CriticConfig,
          cfg: TrainConfig, out_dir, resume: bool = True,
          datasets=None) -> TrainResult:
    """Train on a dataset manifest; artifacts land in ``out_dir``.

    Writes ``metrics.jsonl`` (one record per epoch), periodic
    ``checkpoint.pt``, and resumes from it when ``resume`` and the config
    matches. ``datasets`` may inject preloaded (train, val) datasets.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    metrics_path = out / "metrics.jsonl"
    ckpt_path = out / "checkpoint.pt"
    device = cfg.device

    if datasets is not None:
        train_ds, val_ds = datasets
    else:
        train_ds = TupleTensorDataset(manifest, "train")
        val_ds = TupleTensorDataset(manifest, "val")

    torch.manual_seed(subseed(cfg.seed, "init"))
    generator = Generator(gen_cfg).to(device)
    critic = Critic(critic_cfg).to(device)
    opt_g = _adam(generator.parameters(), cfg)
    opt_d = _adam(critic.parameters(), cfg)

    start_epoch = 1
    metrics: list[dict] = []
    if resume and ckpt_path.exists():
        payload = torch.load(ckpt_path, map_location=device, weights_only=False)
        if payload["train_cfg"] == config_dict(cfg):
            generator.load_state_dict(payload["generator"])
            critic.load_state_dict(payload["critic"])
            opt_g.load_state_dict(payload["opt_g"])
            opt_d.load_state_dict(payload["opt_d"])
            start_epoch = payload["epoch"] + 1
            if metrics_path.exists():
                metrics = [json.loads(line) for line in metrics_path.read_text().splitlines()
                           if json.loads(line)["epoch"] < start_epoch]
                metrics_path.write_text(
                    "".join(json.dumps(m) + "\n" for m in metrics))
            logger.info("resuming from epoch %d", start_epoch)
        else:
            logger.warning("checkpoint config differs; starting fresh")

    if start_epoch == 1 and metrics_path.exists():
        metrics_path.unlink()

    z_gen = torch.Generator(device=device)
    z_gen.manual_seed(subseed(cfg.seed, "val-z"))
    z_fixed = sample_latent(cfg.mismatch_z_draws, gen_cfg.latent_dim, device, z_gen)

    generator.train()
    critic.train()
    for epoch in range(start_epoch, cfg.epochs + 1):
        epoch_gen = torch.Generator()
        epoch_gen.manual_seed(subseed(cfg.seed, "shuffle", epoch))
        torch.manual_seed(subseed(cfg.seed, "epoch", epoch))
        loader = DataLoader(train_ds, batch_size=cfg.batch, shuffle=True,
                            generator=epoch_gen, drop_last=len(train_ds) >= cfg.batch,
                            num_workers=0)
        sums = {"critic_objective": 0.0, "penalty": 0.0, "grad_norm": 0.0}
        n_critic_steps = 0
        gen_losses = []
        for step, (tau, taubar, h) in enumerate(loader):
            tau, taubar, h = tau.to(device), taubar.to(device), h.to(device)
            cond = torch.cat([taubar, h], dim=1)

            # Critic update.
            z = sample_latent(tau.shape[0], gen_cfg.latent_dim, device)
            with torch.no_grad():
                fake = generator(cond, z)
            objective = wgan_objective(critic, tau, fake, cond)
            penalty, norms = gradient_penalty(
                critic, stack_tuple(tau, cond), stack_tuple(fake, cond), cfg.gp_lambda)
            loss_d = -objective + penalty
            opt_d.zero_grad(set_to_none=True)
            loss_d.backward()
            opt_d.step()
            sums["critic_objective"] += objective.item()
            sums["penalty"] += penalty.item()
            sums["grad_norm"] += norms.mean().item()
            n_critic_steps += 1

            # Generator update every critic_steps_per_gen batches.
            if (step + 1) % cfg.critic_steps_per_gen == 0:
                z = sample_latent(tau.shape[0], gen_cfg.latent_dim, device)
                fake = generator(cond, z)
                loss_g = generator_loss(critic, fake, cond)
                opt_g.zero_grad(set_to_none=True)
                loss_g.backward()
                opt_g.step()
                gen_losses.append(loss_g.item())

        record = {
            "epoch": epoch,
            "critic_objective": sums["critic_objective"] / max(n_critic_steps, 1),
            "penalty": sums["penalty"] / max(n_critic_steps, 1),
            "grad_norm": sums["grad_norm"] / max(n_critic_steps, 1),
            "gen_loss": sum(gen_losses) / max(len(gen_losses), 1),
            "val_mismatch": validation_mismatch(generator, val_ds, cfg, z_fixed),
        }
        if not all(math.isfinite(v) for v in record.values()):
            raise TrainingDiverged(f"non-finite metrics at epoch {epoch}: {record}")
        metrics.append(record)
        with open(metrics_path, "a") as fh:
            fh.write(json.dumps(record) + "\n")
        logger.info("epoch %d: %s", epoch, record)

        if epoch % cfg.checkpoint_every == 0 or epoch == cfg.epochs:
            save_checkpoint(ckpt_path, generator, critic, opt_g, opt_d, epoch,
                            gen_cfg, critic_cfg, cfg)

    generator.eval()
    critic.eval()
    return TrainResult(generator=generator, critic=critic, metrics=metrics,
                       checkpoint_path=ckpt_path, metrics_path=metrics_path)
