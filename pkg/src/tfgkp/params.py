"""Code parameters and the width convention shared by every module.

Widths (peak width ``delta`` and the orthogonal-mode width ``sigma``) are
quoted on the GKP scale: the half-spacing ``omega0`` plays the role of
sqrt(pi) in the original GKP lattice.  A peak of width ``w`` therefore has
amplitude ``exp(-pi (x - c)**2 / (2 w**2))``, i.e. amplitude sigma
``w / sqrt(pi)`` and probability-density standard deviation
``w / sqrt(2 pi)``.  With this convention the closed-form error
``E(delta / omega0)`` refers to the same width that builds the comb.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass


class ParameterError(ValueError):
    """A parameter lies outside its allowed domain."""


def is_power_of_two(n: int) -> bool:
    return isinstance(n, int) and n >= 1 and (n & (n - 1)) == 0


def amplitude_sigma(width: float) -> float:
    """Amplitude sigma (``exp(-x**2 / (2 s**2))`` form) of a GKP-scale width."""
    return width / math.sqrt(math.pi)


def intensity_std(width: float) -> float:
    """Standard deviation of ``|psi|**2`` for a GKP-scale width."""
    return width / math.sqrt(2.0 * math.pi)


def width_from_intensity_std(std: float) -> float:
    return std * math.sqrt(2.0 * math.pi)


def param_problems(n, omega0, delta, kappa) -> list[str]:
    """Every domain violation, not just the first."""
    out = []
    if not is_power_of_two(n):
        out.append(f"n must be a power of two (n = 2^m), got {n!r}")
    if not (omega0 > 0 and math.isfinite(omega0)):
        out.append(f"omega0 must be positive and finite, got {omega0!r}")
    if not (delta > 0 and math.isfinite(delta)):
        out.append(f"delta must be positive and finite, got {delta!r}")
    elif omega0 > 0 and not delta < omega0:
        out.append(f"delta must satisfy delta < omega0, got delta={delta!r} omega0={omega0!r}")
    if not (kappa > 0 and math.isfinite(kappa)):
        out.append(f"kappa must be positive and finite, got {kappa!r}")
    elif omega0 > 0 and not kappa * omega0 < 1:
        out.append(f"kappa*omega0 must be < 1, got {kappa * omega0!r}")
    return out


@dataclass(frozen=True)
class CodeParams:
    """Parameters of an n-photon time-frequency GKP code.

    ``omega0`` is the peak half-spacing, ``delta`` the peak width and
    ``kappa`` the inverse envelope width.  ``t0 = pi / omega0``.
    """

    n: int = 1
    omega0: float = 1.0
    delta: float = 0.1
    kappa: float = 0.1

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ParameterError("; ".join(problems))
        if self.kappa * self.omega0 > 0.5:
            warnings.warn(
                f"kappa*omega0 = {self.kappa * self.omega0:.3g} > 0.5: the envelope holds few peaks",
                stacklevel=3,
            )

    def problems(self) -> list[str]:
        return param_problems(self.n, self.omega0, self.delta, self.kappa)

    @property
    def t0(self) -> float:
        return math.pi / self.omega0

    def replace(self, **changes) -> "CodeParams":
        from dataclasses import replace

        return replace(self, **changes)
