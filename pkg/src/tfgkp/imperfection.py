"""Imperfect preparation or measurement as a rotation of the carrier.

The measured variable is ``cos(theta) Omega_1 + sin(theta) Omega_perp`` where
``Omega_perp`` carries a Gaussian of width ``sigma`` (GKP width scale, like
``delta``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .decoding import closed_form_error
from .params import CodeParams, amplitude_sigma, width_from_intensity_std
from .wavefunctions import PlainGaussian, density, make_comb, support


@dataclass(frozen=True)
class RotationImperfection:
    theta: float
    sigma: float

    def __post_init__(self):
        if not abs(self.theta) < math.pi / 2:
            raise ValueError(f"|theta| must be < pi/2, got {self.theta!r}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True)
class RotatedPeaks:
    spacing: float
    width: float  # exact marginal width
    additive_width: float  # delta + sigma |sin theta|


def rotated_effective_params(imp: RotationImperfection, params: CodeParams) -> RotatedPeaks:
    c, s = math.cos(imp.theta), math.sin(imp.theta)
    return RotatedPeaks(
        spacing=2 * params.omega0 * c,
        width=math.hypot(params.delta * c, imp.sigma * s),
        additive_width=params.delta + imp.sigma * abs(s),
    )


def adapted_error_rates(imp: RotationImperfection, params: CodeParams) -> tuple[float, float]:
    """``(E(sigma tan/omega0), E(tan/(sigma t0)))`` for a code adapted to the new spacing."""
    t = abs(math.tan(imp.theta))
    if t == 0:
        return 0.0, 0.0
    return (
        closed_form_error(imp.sigma * t, params.omega0),
        closed_form_error(t / (imp.sigma * params.t0), 1.0),
    )


def adaptation_threshold(imp: RotationImperfection, params: CodeParams) -> float:
    return min(math.pi * imp.sigma / (2 * params.omega0), params.omega0 / (2 * imp.sigma))


def rotation_validity(imp: RotationImperfection, params: CodeParams) -> str:
    """``negligible``, ``adaptable`` or ``broken``."""
    if 1 - math.cos(imp.theta) <= (params.delta / params.omega0) ** 2:
        return "negligible"
    if abs(math.tan(imp.theta)) < adaptation_threshold(imp, params):
        return "adaptable"
    return "broken"


def cumulative_spacing_drift(theta: float, params: CodeParams) -> float:
    """Spacing change accumulated over about ``1/(2 omega0 delta)`` peaks.

    Taken with ``delta = kappa`` as a peak-count estimate; small compared to
    ``delta`` when the rotation is negligible.
    """
    return 2 * params.omega0 * (1 - math.cos(theta)) / (2 * params.omega0 * params.delta)


def rotated_marginal(
    imp: RotationImperfection, params: CodeParams, k: int = 0, count: int = 4096, perp_count: int = 1024
) -> tuple[np.ndarray, np.ndarray]:
    """Density of the measured variable, integrated over the orthogonal direction.

    The 2D density ``|comb(u)|**2 |G(v)|**2`` is evaluated on rotated
    coordinates ``u = c m - s p``, ``v = s m + c p`` and summed over ``p``.
    """
    comb = make_comb(params, k)
    g = PlainGaussian(0.0, amplitude_sigma(imp.sigma))
    c, s = math.cos(imp.theta), math.sin(imp.theta)
    _, half_u, _ = support(comb)
    half_v = support(g)[1]
    half_m = c * half_u + abs(s) * half_v
    half_p = abs(s) * half_u + c * half_v
    m = -half_m + (np.arange(count) + 0.5) * (2 * half_m / count)
    p = -half_p + (np.arange(perp_count) + 0.5) * (2 * half_p / perp_count)
    out = np.zeros(count)
    for start in range(0, count, 256):
        mm = m[start : start + 256, None]
        u = c * mm - s * p[None, :]
        v = s * mm + c * p[None, :]
        out[start : start + 256] = (density(comb, u) * density(g, v)).sum(axis=1)
    out *= 2 * half_p / perp_count
    return m, out


def _peak_model(x, amp, env, spacing, std, offset):
    idx = np.arange(-40, 41)
    centers = offset + idx * spacing
    return amp * (np.exp(-env * idx**2)[None, :] * np.exp(-((x[:, None] - centers) ** 2) / (2 * std**2))).sum(axis=1)


def fit_peaks(x: np.ndarray, dens: np.ndarray, spacing_guess: float, offset_guess: float = 0.0):
    """Fit a Gaussian-enveloped train of equal-width peaks.

    Returns ``(spacing, width)`` with the width on the GKP scale.
    """
    lo = int(np.argmax(dens))
    guess = [float(dens[lo]), 0.01, spacing_guess, spacing_guess / 20, offset_guess]
    popt, _ = curve_fit(_peak_model, x, dens, p0=guess, bounds=([0, 0, 0, 0, -np.inf], np.inf), maxfev=20000)
    return float(popt[2]), width_from_intensity_std(abs(float(popt[3])))


def measured_rotated_params(imp: RotationImperfection, params: CodeParams, count: int = 4096) -> tuple[float, float, float]:
    """``(spacing, width, grid_step)`` fitted to the numerically rotated marginal."""
    m, dens = rotated_marginal(imp, params, 0, count)
    spacing, width = fit_peaks(m, dens, 2 * params.omega0 * math.cos(imp.theta))
    return spacing, width, float(m[1] - m[0])
