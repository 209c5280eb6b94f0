"""Draws from one-dimensional marginal densities tabulated on a fine grid."""

from __future__ import annotations

import math

import numpy as np

from .wavefunctions import ModeWavefunction, density, support, time_amplitude

MAX_COUNT = 2**22


class GridSampler:
    """Inverse-CDF sampler for a density that is piecewise constant on cells."""

    def __init__(self, x: np.ndarray, dens: np.ndarray):
        dx = x[1] - x[0]
        mass = np.clip(dens, 0.0, None) * dx
        self.total = float(mass.sum())
        self.cdf = np.concatenate([[0.0], np.cumsum(mass) / self.total])
        self.x0 = x[0] - dx / 2
        self.dx = dx

    def __call__(self, rng: np.random.Generator, size) -> np.ndarray:
        u = rng.random(size)
        i = np.clip(np.searchsorted(self.cdf, u, side="right") - 1, 0, len(self.cdf) - 2)
        lo, hi = self.cdf[i], self.cdf[i + 1]
        frac = np.where(hi > lo, (u - lo) / np.where(hi > lo, hi - lo, 1.0), 0.5)
        return self.x0 + (i + frac) * self.dx


def _count_for(span: float, feature: float, per_feature: float = 16.0) -> int:
    need = span * per_feature / feature
    return min(MAX_COUNT, 1 << max(10, math.ceil(math.log2(need))))


def frequency_sampler(f: ModeWavefunction) -> GridSampler:
    center, half, feature = support(f)
    half *= 1.25
    count = _count_for(2 * half, feature)
    x = center - half + (np.arange(count) + 0.5) * (2 * half / count)
    return GridSampler(x, density(f, x))


def time_sampler(f: ModeWavefunction, peak_time_width: float) -> GridSampler:
    """Sampler for ``|f(t)|**2``; ``peak_time_width`` is the finest time feature."""
    _, _, sigma = support(f)
    half = 10.0 / sigma + abs(getattr(f, "slope", 0.0))
    count = _count_for(2 * half, peak_time_width)
    t = -half + (np.arange(count) + 0.5) * (2 * half / count)
    return GridSampler(t, np.abs(time_amplitude(f, t)) ** 2)
