"""Noise, modular syndromes, decoding and logical error rates."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .frame import CollectiveDisplacement, LocalDisplacement
from .logical import CollectiveState, apply_displacement
from .params import CodeParams
from .sampling import frequency_sampler, time_sampler
from .wavefunctions import AnalyticComb, DiracComb, Sampled, make_comb

BATCH = 1 << 16


def closed_form_error(delta: float, omega0: float) -> float:
    """``(delta / (pi omega0)) exp(-pi omega0**2 / (4 delta**2))``."""
    if not (delta > 0 and omega0 > 0):
        raise ValueError(f"closed-form error needs delta > 0 and omega0 > 0, got {delta!r}, {omega0!r}")
    r = delta / omega0
    return r / math.pi * math.exp(-math.pi / (4 * r * r))


def centered(x, period: float):
    """Representative of ``x mod period`` in ``(-period/2, period/2]``."""
    x = np.asarray(x, dtype=float)
    out = x - period * np.ceil(x / period - 0.5)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class NoiseModel:
    """Independent Gaussian displacements of every photon, or a fixed list."""

    omega_std: float = 0.0
    time_std: float = 0.0
    fixed: tuple[LocalDisplacement, ...] | None = None

    def __post_init__(self):
        if self.omega_std < 0 or self.time_std < 0:
            raise ValueError("noise standard deviations must be >= 0")
        if self.fixed is not None and (self.omega_std or self.time_std):
            raise ValueError("use either stochastic noise or a fixed displacement list, not both")


def sample_noise(model: NoiseModel, n: int, rng: np.random.Generator) -> list[LocalDisplacement]:
    if model.fixed is not None:
        return list(model.fixed)
    dw = rng.normal(0.0, model.omega_std, n) if model.omega_std else np.zeros(n)
    dt = rng.normal(0.0, model.time_std, n) if model.time_std else np.zeros(n)
    return [LocalDisplacement(j + 1, float(a), float(b)) for j, (a, b) in enumerate(zip(dw, dt))]


@dataclass(frozen=True)
class Syndrome:
    s_omega: float
    s_time: float
    # raw carrier readings; for the exact mode these are the tracked lattice position and slope
    measured_omega: float = 0.0
    measured_time: float = 0.0
    exact: bool = True


@dataclass(frozen=True)
class CorrectionOutcome:
    applied_omega: float
    applied_time: float
    residual: str  # "I", "X", "Z" or "Y"
    true_shift_omega: float | None = None
    true_shift_time: float | None = None


def _carrier_index(c) -> int:
    if isinstance(c, (AnalyticComb, DiracComb)):
        return c.offset
    return 0.0


def extract_syndrome(state: CollectiveState, mode: str = "exact", rng: np.random.Generator | None = None) -> Syndrome:
    p = state.params
    c = state.carrier
    if mode == "exact" and isinstance(c, Sampled):
        mode = "sampled"
    if mode == "exact":
        m_w = _carrier_index(c) + c.shift
        m_t = c.slope
        return Syndrome(centered(c.shift, p.omega0), centered(c.slope, p.t0), m_w, m_t, True)
    if mode != "sampled":
        raise ValueError(f"unknown syndrome mode {mode!r}")
    if rng is None:
        raise ValueError("sampled syndrome extraction needs a seeded generator")
    if isinstance(c, DiracComb):
        raise ValueError("ideal combs cannot be sampled; use the exact mode")
    m_w = float(frequency_sampler(c)(rng, 1)[0])
    m_t = float(time_sampler(c, p.kappa)(rng, 1)[0]) if not isinstance(c, Sampled) else 0.0
    return Syndrome(centered(m_w, p.omega0), centered(m_t, p.t0), m_w, m_t, False)


def residual_label(x_err, z_err):
    x_err = np.asarray(x_err, dtype=bool)
    z_err = np.asarray(z_err, dtype=bool)
    return np.where(x_err & z_err, "Y", np.where(x_err, "X", np.where(z_err, "Z", "I")))


def _errors(k, m_w, s_w, true_t, s_t, omega0, t0):
    x_err = (np.rint((np.asarray(m_w) - s_w) / omega0).astype(np.int64) - k) & 1
    z_err = np.rint((np.asarray(true_t) - s_t) / t0).astype(np.int64) & 1
    return x_err.astype(bool), z_err.astype(bool)


def decode_and_correct(state: CollectiveState, syndrome: Syndrome):
    """Apply the collective correction and classify what is left.

    The frequency outcome is the parity of the decoded carrier reading
    against the codeword lattice; the time outcome compares the syndrome with
    the tracked slope.
    """
    p = state.params
    c = state.carrier
    k = int(round(_carrier_index(c) / p.omega0)) & 1
    true_w = getattr(c, "shift", None)
    true_t = getattr(c, "slope", 0.0)
    x_err, z_err = _errors(k, syndrome.measured_omega, syndrome.s_omega, true_t, syndrome.s_time, p.omega0, p.t0)
    corrected = apply_displacement(state, CollectiveDisplacement(-syndrome.s_omega, -syndrome.s_time))
    outcome = CorrectionOutcome(
        -syndrome.s_omega, -syndrome.s_time, str(residual_label(x_err, z_err)), true_w, true_t
    )
    return corrected, outcome


@dataclass(frozen=True)
class RegionVerdict:
    frequency: bool
    time: bool
    joint: bool


def correctable_region_check(displacements: Sequence[LocalDisplacement], n: int, params: CodeParams) -> RegionVerdict:
    sw = sum(d.d_omega for d in displacements)
    st = sum(d.d_t for d in displacements)
    rn = math.sqrt(n)
    return RegionVerdict(
        abs(sw) < rn * params.omega0 / 2,
        abs(st) < rn * params.t0 / 2,
        4 * abs(sw) * abs(st) < n * math.pi,
    )


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class ErrorRateReport:
    trials: int
    x_errors: int
    z_errors: int
    y_errors: int
    p_logical: float
    ci_low: float
    ci_high: float
    seed: int
    syndrome_mode: str
    params: dict

    @property
    def bit_flips(self) -> int:
        return self.x_errors + self.y_errors

    @property
    def bit_flip_rate(self) -> float:
        return self.bit_flips / self.trials

    def bit_flip_interval(self) -> tuple[float, float]:
        return wilson_interval(self.bit_flips, self.trials)


def monte_carlo_error_rate(
    params: CodeParams,
    sigma_g: float | None,
    model: NoiseModel,
    trials: int,
    seed: int,
    syndrome_mode: str = "exact",
    batch_size: int = BATCH,
) -> ErrorRateReport:
    """Tally decoder residuals over ``trials`` noisy codewords.

    Codewords alternate ``k = 0, 1``.  Batch ``b`` draws from
    ``default_rng([seed, b])``, so results depend only on ``seed`` and
    ``batch_size``.  Only the carrier enters the decoder, so ``sigma_g`` does
    not affect the tally.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if syndrome_mode not in ("exact", "sampled"):
        raise ValueError(f"unknown syndrome mode {syndrome_mode!r}")
    n, w0, t0 = params.n, params.omega0, params.t0
    alpha1 = np.full(n, 1.0 / math.sqrt(n))
    if model.fixed is not None:
        fixed_w = sum(d.d_omega * alpha1[d.mode - 1] for d in model.fixed)
        fixed_t = sum(d.d_t * alpha1[d.mode - 1] for d in model.fixed)
    if syndrome_mode == "sampled":
        combs = [make_comb(params, k) for k in (0, 1)]
        f_samplers = [frequency_sampler(c) for c in combs]
        t_samplers = [time_sampler(c, params.kappa) for c in combs]

    counts = {"X": 0, "Z": 0, "Y": 0}
    for b, start in enumerate(range(0, trials, batch_size)):
        m = min(batch_size, trials - start)
        rng = np.random.default_rng([seed, b])
        k = (start + np.arange(m)) & 1
        if model.fixed is not None:
            u = np.full(m, fixed_w)
            tau = np.full(m, fixed_t)
        else:
            u = rng.normal(0.0, model.omega_std, (m, n)) @ alpha1 if model.omega_std else np.zeros(m)
            tau = rng.normal(0.0, model.time_std, (m, n)) @ alpha1 if model.time_std else np.zeros(m)
        if syndrome_mode == "exact":
            m_w = k * w0 + u
            m_t = tau
        else:
            m_w = np.empty(m)
            m_t = np.empty(m)
            for kk in (0, 1):
                sel = k == kk
                m_w[sel] = f_samplers[kk](rng, int(sel.sum()))
                m_t[sel] = t_samplers[kk](rng, int(sel.sum()))
            m_w += u
            m_t += tau
        x_err, z_err = _errors(k, m_w, centered(m_w, w0), tau, centered(m_t, t0), w0, t0)
        counts["Y"] += int(np.sum(x_err & z_err))
        counts["X"] += int(np.sum(x_err & ~z_err))
        counts["Z"] += int(np.sum(z_err & ~x_err))
    bad = counts["X"] + counts["Z"] + counts["Y"]
    lo, hi = wilson_interval(bad, trials)
    return ErrorRateReport(
        trials, counts["X"], counts["Z"], counts["Y"], bad / trials, lo, hi, seed, syndrome_mode, asdict(params)
    )
