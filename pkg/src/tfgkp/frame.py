"""Collective-variable frame and the propagation of local displacements.

Collective frequencies are ``Omega_k = sum_i alpha[i, k] * omega_i`` with
``alpha`` a normalized Sylvester-Hadamard matrix, so column 0 (the carrier
``Omega_1``) is all ``+1/sqrt(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import hadamard

from .params import is_power_of_two


class UnsupportedDimension(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FrameMatrix:
    entries: np.ndarray  # entries[i, k]: photon i, collective mode k

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def orthogonality_error(self) -> float:
        a = self.entries
        return float(np.max(np.abs(a.T @ a - np.eye(self.n))))

    def to_collective(self, omegas) -> np.ndarray:
        return np.asarray(omegas) @ self.entries

    def to_local(self, collective) -> np.ndarray:
        return np.asarray(collective) @ self.entries.T


@dataclass(frozen=True)
class LocalDisplacement:
    """Shift of photon ``mode`` (1-based) by ``d_omega`` in frequency and ``d_t`` in time."""

    mode: int
    d_omega: float = 0.0
    d_t: float = 0.0


@dataclass(frozen=True)
class CollectiveDisplacement:
    """Shift of collective mode ``target`` (1-based, 1 = carrier)."""

    d_omega: float = 0.0
    d_t: float = 0.0
    target: int = 1


def build_alpha(n: int) -> FrameMatrix:
    if not is_power_of_two(n):
        raise UnsupportedDimension(f"collective frame needs n = 2^m, got {n!r}")
    # Sylvester order; first row and column are all +1
    return FrameMatrix(hadamard(n).astype(float) / math.sqrt(n))


def map_local_displacement(frame: FrameMatrix, d: LocalDisplacement) -> list[tuple[float, float]]:
    """Per collective mode ``(shift, phase_slope)`` produced by one local displacement."""
    if not 1 <= d.mode <= frame.n:
        raise IndexError(f"photon index {d.mode} outside 1..{frame.n}")
    row = frame.entries[d.mode - 1]
    return [(float(a * d.d_omega), float(a * d.d_t)) for a in row]


def map_local_displacements(frame: FrameMatrix, d_omega, d_t) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized map: arrays ``(..., n)`` of local shifts -> collective shifts and slopes."""
    return np.asarray(d_omega) @ frame.entries, np.asarray(d_t) @ frame.entries
