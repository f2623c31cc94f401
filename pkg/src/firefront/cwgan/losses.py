"""Adversarial objective and the Lipschitz gradient penalty.

The critic maximizes ``E[d(real)] - E[d(fake)]`` over data tuples and
generated tuples sharing the same conditioning; the generator minimizes it,
which for the generator reduces to maximizing the critic's score of its own
samples. The 1-Lipschitz constraint is enforced with a gradient penalty on
random interpolates between real and generated tuples, taken jointly over all
three input channels.
"""

from __future__ import annotations

import torch


def sample_latent(batch: int, latent_dim: int, device="cpu",
                  generator: torch.Generator | None = None) -> torch.Tensor:
    """Standard multivariate Gaussian latent draws, shape (batch, latent_dim)."""
    return torch.randn(batch, latent_dim, device=device, generator=generator)


def stack_tuple(tau: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
    """Concatenate an arrival channel with the (measurement, terrain) pair."""
    return torch.cat([tau, cond], dim=1)


def wgan_objective(critic, real_tau: torch.Tensor, fake_tau: torch.Tensor,
                   cond: torch.Tensor) -> torch.Tensor:
    """E[d(real tuple)] - E[d(fake tuple)] with shared conditioning."""
    return critic(stack_tuple(real_tau, cond)).mean() - critic(stack_tuple(fake_tau, cond)).mean()


def generator_loss(critic, fake_tau: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
    """The generator-dependent part of the objective: -E[d(fake tuple)]."""
    return -critic(stack_tuple(fake_tau, cond)).mean()


def gradient_penalty(critic, real: torch.Tensor, fake: torch.Tensor,
                     lam: float = 10.0,
                     generator: torch.Generator | None = None) -> tuple[torch.Tensor, torch.Tensor]:
    """Penalty ``lam * E[(||grad d(x_hat)||_2 - 1)^2]`` plus the raw norms.

    ``real`` and ``fake`` are full stacked tuples (B, C, H, W); the
    interpolation coefficient is drawn per sample and the gradient is taken
    with respect to the entire interpolated input.
    """
    if real.shape != fake.shape:
        raise ValueError(f"real {tuple(real.shape)} and fake {tuple(fake.shape)} differ")
    batch = real.shape[0]
    eps = torch.rand(batch, 1, 1, 1, device=real.device, generator=generator)
    x_hat = (eps * real + (1.0 - eps) * fake).detach().requires_grad_(True)
    scores = critic(x_hat)
    grads = torch.autograd.grad(scores.sum(), x_hat, create_graph=True)[0]
    norms = grads.flatten(1).norm(dim=1)
    return lam * ((norms - 1.0) ** 2).mean(), norms
