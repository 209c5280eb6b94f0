"""One-dimensional spectral wavefunctions of a single collective mode.

Four variants share one algebra:

* :class:`AnalyticComb`  - Gaussian peaks on a lattice under a Gaussian envelope
* :class:`PlainGaussian` - a single Gaussian
* :class:`DiracComb`     - the ideal (non-normalizable) lattice, or a single delta
* :class:`Sampled`       - amplitudes on a uniform :class:`Grid1D`

Analytic variants carry a tracked displacement: the represented function is
``phase * exp(-1j * slope * x) * base(x - shift)``.  A displacement
``D(x0, slope)`` modulates first (multiply by ``exp(-1j * slope * x)``) and
then shifts by ``x0``.  All objects are immutable; operations return new ones.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Union

import numpy as np

from .params import CodeParams, ParameterError, amplitude_sigma, is_power_of_two

SQRT_2PI = math.sqrt(2.0 * math.pi)

# envelope amplitude below this fraction of the max is dropped
TRUNCATION_TOL = 1e-12


class ResolutionError(ValueError):
    """A grid is too coarse or too narrow for the wavefunction sampled on it."""

    def __init__(self, message: str, min_count: int | None = None):
        super().__init__(message)
        self.min_count = min_count


class DomainError(ValueError):
    """Two wavefunctions live on incompatible domains."""


# --------------------------------------------------------------------------- variants


@lru_cache(maxsize=256)
def _comb_lattice(spacing, offset, peak_width, env_width, truncation):
    s = np.arange(-truncation - 1, truncation + 1)
    c = offset + spacing * s
    limit = truncation * spacing + abs(offset) + 1e-9 * spacing
    c = c[np.abs(c) <= limit]
    w = np.ones_like(c) if math.isinf(env_width) else np.exp(-((c / env_width) ** 2))
    gram = math.sqrt(math.pi) * peak_width * np.exp(-((c[:, None] - c[None, :]) ** 2) / (4 * peak_width**2))
    w = w / math.sqrt(float(w @ gram @ w))
    c.flags.writeable = False
    w.flags.writeable = False
    return c, w


@dataclass(frozen=True, eq=False)
class AnalyticComb:
    spacing: float
    offset: float
    peak_width: float  # amplitude sigma of each peak
    env_width: float  # envelope amplitude exp(-(x / env_width)**2); inf = flat
    truncation: int
    shift: float = 0.0
    slope: float = 0.0
    phase: complex = 1.0 + 0.0j

    @property
    def centers(self) -> np.ndarray:
        return _comb_lattice(self.spacing, self.offset, self.peak_width, self.env_width, self.truncation)[0]

    @property
    def weights(self) -> np.ndarray:
        return _comb_lattice(self.spacing, self.offset, self.peak_width, self.env_width, self.truncation)[1]

    def terms(self):
        return self.centers + self.shift, self.phase * self.weights, self.peak_width, self.slope


@dataclass(frozen=True, eq=False)
class PlainGaussian:
    center: float
    width: float  # amplitude sigma
    shift: float = 0.0
    slope: float = 0.0
    phase: complex = 1.0 + 0.0j

    def terms(self):
        norm = (math.pi * self.width**2) ** -0.25
        return (
            np.array([self.center + self.shift]),
            np.array([self.phase * norm], dtype=complex),
            self.width,
            self.slope,
        )


@dataclass(frozen=True, eq=False)
class DiracComb:
    """Delta peaks at ``offset + spacing * s + shift``; ``spacing=None`` is a single delta."""

    spacing: float | None
    offset: float = 0.0
    shift: float = 0.0
    slope: float = 0.0
    phase: complex = 1.0 + 0.0j

    def points(self, count: int = 8) -> np.ndarray:
        if self.spacing is None:
            return np.array([self.offset + self.shift])
        s = np.arange(-count, count + 1)
        return self.offset + self.shift + self.spacing * s


@dataclass(frozen=True, eq=False)
class Grid1D:
    x_min: float
    x_max: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        count = len(self.values)
        if count < 2 or not is_power_of_two(count):
            raise ResolutionError(f"grid count must be a power of two >= 2, got {count}")
        if not self.x_max > self.x_min:
            raise ValueError("grid needs x_max > x_min")

    @property
    def count(self) -> int:
        return len(self.values)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.count

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.count)

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2)) * self.dx)

    def same_axis(self, other: "Grid1D") -> bool:
        return self.count == other.count and np.isclose(self.x_min, other.x_min) and np.isclose(self.x_max, other.x_max)


@dataclass(frozen=True, eq=False)
class Sampled:
    grid: Grid1D


ModeWavefunction = Union[AnalyticComb, PlainGaussian, DiracComb, Sampled]
_GAUSSIAN_TYPES = (AnalyticComb, PlainGaussian)


# --------------------------------------------------------------------------- construction


def comb_truncation(params: CodeParams) -> int:
    """Peaks kept on each side of the origin.

    Six inverse envelope widths, which also keeps every peak whose envelope
    amplitude exceeds ``TRUNCATION_TOL``.
    """
    by_width = 6.0 / (params.kappa * 2.0 * params.omega0)
    by_tol = math.sqrt(-math.log(TRUNCATION_TOL)) / (params.kappa * 2.0 * params.omega0)
    return int(math.ceil(max(by_width, by_tol)))


def make_comb(params: CodeParams, k: int) -> AnalyticComb:
    if k not in (0, 1):
        raise ParameterError(f"logical index must be 0 or 1, got {k!r}")
    return AnalyticComb(
        spacing=2.0 * params.omega0,
        offset=k * params.omega0,
        peak_width=amplitude_sigma(params.delta),
        env_width=1.0 / params.kappa,
        truncation=comb_truncation(params),
    )


def make_ideal_comb(omega0: float, k: int) -> DiracComb:
    if k not in (0, 1):
        raise ParameterError(f"logical index must be 0 or 1, got {k!r}")
    return DiracComb(spacing=2.0 * omega0, offset=k * omega0)


# --------------------------------------------------------------------------- evaluation


def _eval_terms(p, c, sigma, slope, x):
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    order = np.argsort(p)
    p, c = p[order], c[order]
    reach = 12.0 * sigma
    step = 4096
    for start in range(0, flat.size, step):
        xs = flat[start : start + step]
        lo = np.searchsorted(p, xs.min() - reach)
        hi = np.searchsorted(p, xs.max() + reach)
        if hi > lo:
            d = xs[:, None] - p[None, lo:hi]
            out[start : start + step] = np.exp(-(d**2) / (2 * sigma**2)) @ c[lo:hi]
    out *= np.exp(-1j * slope * flat)
    return out.reshape(x.shape)


def evaluate(f: ModeWavefunction, x) -> np.ndarray:
    """Amplitude of ``f`` at points ``x``."""
    if isinstance(f, _GAUSSIAN_TYPES):
        return _eval_terms(*f.terms(), x)
    if isinstance(f, Sampled):
        g = f.grid
        re = np.interp(x, g.x, g.values.real, left=0.0, right=0.0)
        im = np.interp(x, g.x, g.values.imag, left=0.0, right=0.0)
        return re + 1j * im
    raise DomainError("ideal combs are not normalizable and cannot be evaluated pointwise")


def density(f: ModeWavefunction, x) -> np.ndarray:
    return np.abs(evaluate(f, x)) ** 2


def time_amplitude(f: ModeWavefunction, t) -> np.ndarray:
    """Closed-form Fourier transform, kernel ``exp(+1j w t) / sqrt(2 pi)``."""
    if not isinstance(f, _GAUSSIAN_TYPES):
        raise DomainError("closed-form time amplitude needs a Gaussian-sum wavefunction")
    p, c, sigma, slope = f.terms()
    t = np.asarray(t, dtype=float)
    flat = t.ravel() - slope
    out = np.empty(flat.shape, dtype=complex)
    step = 2048
    for start in range(0, flat.size, step):
        ts = flat[start : start + step]
        out[start : start + step] = np.exp(1j * np.outer(ts, p)) @ c
    out *= sigma * np.exp(-(sigma**2) * flat**2 / 2)
    return out.reshape(t.shape)


def support(f: ModeWavefunction) -> tuple[float, float, float]:
    """(center, half-extent, finest feature) a grid must resolve."""
    if isinstance(f, AnalyticComb):
        sigma = f.peak_width
        if math.isinf(f.env_width):
            raise ResolutionError("flat-envelope combs have unbounded support")
        return f.shift, 3.0 * f.env_width + 8.0 * sigma, sigma
    if isinstance(f, PlainGaussian):
        return f.center + f.shift, 8.0 * f.width, f.width
    if isinstance(f, Sampled):
        g = f.grid
        return 0.5 * (g.x_min + g.x_max), 0.5 * (g.x_max - g.x_min), g.dx * 8
    raise DomainError("ideal combs cannot be sampled")


def default_grid(f: ModeWavefunction, count: int = 2**14) -> tuple[float, float, int]:
    center, half, _ = support(f)
    half *= 4.0 / 3.0
    return center - half, center + half, count


def sample_on_grid(f: ModeWavefunction, x_min: float, x_max: float, count: int) -> Grid1D:
    if count < 2 or not is_power_of_two(count):
        raise ResolutionError(f"grid count must be a power of two >= 2, got {count}")
    if isinstance(f, Sampled) and f.grid.count == count and np.isclose(f.grid.x_min, x_min) and np.isclose(f.grid.x_max, x_max):
        return f.grid
    center, half, feature = support(f)
    tol = 1e-9 * max(1.0, abs(half))
    if x_min > center - half + tol or x_max < center + half - tol:
        raise ResolutionError(
            f"grid [{x_min}, {x_max}] does not cover [{center - half:.6g}, {center + half:.6g}]"
        )
    dx = (x_max - x_min) / count
    if not isinstance(f, Sampled) and dx > feature / 8.0 * (1 + 1e-9):
        need = 1 << math.ceil(math.log2((x_max - x_min) * 8.0 / feature))
        raise ResolutionError(
            f"grid step {dx:.3g} exceeds 1/8 of the peak width {feature:.3g}; need count >= {need}",
            min_count=need,
        )
    x = x_min + dx * np.arange(count)
    return Grid1D(x_min, x_max, evaluate(f, x))


# --------------------------------------------------------------------------- Fourier duality


def to_time_domain(g: Grid1D, t_min: float | None = None) -> Grid1D:
    """Unitary continuous Fourier transform, kernel ``exp(+1j w t) / sqrt(2 pi)``.

    The output grid has step ``2 pi / (count * dw)``; by default it is
    centred on ``t = 0``.
    """
    n, dw = g.count, g.dx
    dt = 2 * math.pi / (n * dw)
    if t_min is None:
        t_min = -(n // 2) * dt
    k = np.arange(n)
    t = t_min + dt * k
    pre = g.values * np.exp(1j * k * dw * t_min)
    out = dw / SQRT_2PI * np.exp(1j * g.x_min * t) * n * np.fft.ifft(pre)
    return Grid1D(t_min, t_min + n * dt, out)


def to_frequency_domain(g: Grid1D, w_min: float | None = None) -> Grid1D:
    """Inverse of :func:`to_time_domain` (kernel ``exp(-1j w t) / sqrt(2 pi)``)."""
    n, dt = g.count, g.dx
    dw = 2 * math.pi / (n * dt)
    if w_min is None:
        w_min = -(n // 2) * dw
    k = np.arange(n)
    w = w_min + dw * k
    pre = g.values * np.exp(-1j * k * dt * w_min)
    out = dt / SQRT_2PI * np.exp(-1j * g.x_min * w) * np.fft.fft(pre)
    return Grid1D(w_min, w_min + n * dw, out)


# --------------------------------------------------------------------------- algebra


def _gaussian_overlap(a, b) -> complex:
    pa, ca, sa, ta = a
    pb, cb, sb, tb = b
    A = 1 / (2 * sa**2) + 1 / (2 * sb**2)
    k = ta - tb
    P = pa[:, None]
    Q = pb[None, :]
    m = (P / sa**2 + Q / sb**2) / (2 * A)
    expo = -((P - Q) ** 2) / (2 * (sa**2 + sb**2)) + 1j * k * m - k**2 / (4 * A)
    return complex(np.conj(ca) @ np.exp(expo) @ cb * math.sqrt(math.pi / A))


def _dirac_overlap(a: DiracComb, b: DiracComb) -> complex:
    # per-peak average (Cesaro limit); 0 unless the two lattices coincide
    if (a.spacing is None) != (b.spacing is None):
        return 0.0j
    p0 = a.offset + a.shift
    q0 = b.offset + b.shift
    if a.spacing is None:
        if not math.isclose(p0, q0, rel_tol=0, abs_tol=1e-9):
            return 0.0j
    else:
        if not math.isclose(a.spacing, b.spacing, rel_tol=1e-12):
            return 0.0j
        r = (p0 - q0) / a.spacing
        if abs(r - round(r)) > 1e-9:
            return 0.0j
        turns = (b.slope - a.slope) * a.spacing / (2 * math.pi)
        if abs(turns - round(turns)) > 1e-9:
            return 0.0j
    return complex(np.conj(a.phase) * b.phase * cmath.exp(1j * (a.slope - b.slope) * p0))


def inner_product(a: ModeWavefunction, b: ModeWavefunction) -> complex:
    """``<a|b>``: closed form for Gaussian sums, quadrature on grids."""
    if isinstance(a, DiracComb) or isinstance(b, DiracComb):
        if isinstance(a, DiracComb) and isinstance(b, DiracComb):
            return _dirac_overlap(a, b)
        raise DomainError("cannot overlap an ideal comb with a normalizable wavefunction")
    if isinstance(a, _GAUSSIAN_TYPES) and isinstance(b, _GAUSSIAN_TYPES):
        return _gaussian_overlap(a.terms(), b.terms())
    if isinstance(a, Sampled) and isinstance(b, Sampled):
        if not a.grid.same_axis(b.grid):
            raise DomainError("sampled wavefunctions live on different grids")
        ga, gb = a.grid, b.grid
    else:
        g = a.grid if isinstance(a, Sampled) else b.grid
        ga = g if isinstance(a, Sampled) else Grid1D(g.x_min, g.x_max, evaluate(a, g.x))
        gb = g if isinstance(b, Sampled) else Grid1D(g.x_min, g.x_max, evaluate(b, g.x))
    return complex(np.vdot(ga.values, gb.values) * ga.dx)


def norm(f: ModeWavefunction) -> float:
    return math.sqrt(abs(inner_product(f, f)))


def _shift_grid(g: Grid1D, x0: float) -> Grid1D:
    k = 2 * math.pi * np.fft.fftfreq(g.count, d=g.dx)
    return replace(g, values=np.fft.ifft(np.fft.fft(g.values) * np.exp(-1j * k * x0)))


def displace_1d(f: ModeWavefunction, x0: float = 0.0, slope: float = 0.0) -> ModeWavefunction:
    """Modulate by ``exp(-1j * slope * x)``, then shift by ``x0``."""
    if isinstance(f, Sampled):
        g = f.grid
        if slope:
            g = replace(g, values=g.values * np.exp(-1j * slope * g.x))
        if x0:
            g = _shift_grid(g, x0)
        return Sampled(g)
    new_slope = f.slope + slope
    return replace(
        f,
        shift=f.shift + x0,
        slope=new_slope,
        phase=f.phase * cmath.exp(1j * new_slope * x0),
    )


def multiply_phase(f: ModeWavefunction, z: complex) -> ModeWavefunction:
    if isinstance(f, Sampled):
        return Sampled(replace(f.grid, values=f.grid.values * z))
    return replace(f, phase=f.phase * z)


def reflect(f: ModeWavefunction) -> ModeWavefunction:
    """``x -> f(-x)``."""
    if isinstance(f, PlainGaussian):
        return replace(f, center=-f.center, shift=-f.shift, slope=-f.slope)
    if isinstance(f, AnalyticComb):
        if not np.allclose(np.sort(-f.centers), f.centers):
            raise DomainError("comb lattice is not symmetric about the origin")
        return replace(f, shift=-f.shift, slope=-f.slope)
    if isinstance(f, DiracComb):
        return replace(f, offset=-f.offset, shift=-f.shift, slope=-f.slope)
    g = f.grid
    return Sampled(Grid1D(g.x_min, g.x_max, evaluate(f, -g.x)))


def peak_centers(f: ModeWavefunction) -> np.ndarray:
    """Lattice positions of the peaks, tracked shift included."""
    if isinstance(f, AnalyticComb):
        return f.centers + f.shift
    if isinstance(f, PlainGaussian):
        return np.array([f.center + f.shift])
    if isinstance(f, DiracComb):
        return f.points()
    raise DomainError("sampled wavefunctions have no tracked lattice")
