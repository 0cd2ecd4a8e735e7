"""Zero-drift system: plain Brownian motion, used as a Monte Carlo scaling oracle."""

import numpy as np

from large_deviation_prefactors.systems.base import DriftSystem


class FreeDiffusion(DriftSystem):
    """b(x) = 0 in any dimension. No isolated fixed points are registered."""

    def __init__(self, dim: int = 1):
        self.name = f"free-diffusion(dim={dim})"
        super().__init__(dim=dim)

    def _drift(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x)

    def _jacobian(self, x: np.ndarray) -> np.ndarray:
        return np.zeros(x.shape + (self.dim,))
