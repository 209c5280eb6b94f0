"""Codewords, logical operators, stabilizer expectations and readout.

A :class:`CollectiveState` is separable in the collective variables: one
wavefunction per collective mode, mode 0 being the carrier ``Omega_1``.  After
a photon loss the carrier is re-expressed in the reduced variable
``Omega'_1 = sum_{i != lost} omega_i / sqrt(n - 1)`` and the orthogonal modes
are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .frame import CollectiveDisplacement, FrameMatrix, LocalDisplacement, build_alpha, map_local_displacement
from .params import CodeParams, amplitude_sigma
from .sampling import frequency_sampler
from .wavefunctions import (
    DiracComb,
    ModeWavefunction,
    PlainGaussian,
    displace_1d,
    inner_product,
    make_comb,
    make_ideal_comb,
    reflect,
)


class InvalidModeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CollectiveState:
    params: CodeParams
    frame: FrameMatrix
    modes: tuple
    phase: complex = 1.0 + 0.0j
    photons_present: int | None = None
    lost_mode: int | None = None

    def __post_init__(self):
        if self.photons_present is None:
            object.__setattr__(self, "photons_present", self.frame.n)
        expected = self.frame.n if self.lost_mode is None else max(self.frame.n - 1, 1)
        if len(self.modes) != expected:
            raise ValueError(f"state holds {len(self.modes)} modes, expected {expected}")

    @property
    def n(self) -> int:
        return self.frame.n

    @property
    def carrier(self) -> ModeWavefunction:
        return self.modes[0]

    @property
    def is_ideal(self) -> bool:
        return isinstance(self.carrier, DiracComb)

    def with_mode(self, index: int, f: ModeWavefunction) -> "CollectiveState":
        modes = list(self.modes)
        modes[index] = f
        return replace(self, modes=tuple(modes))


@dataclass(frozen=True)
class LogicalOp:
    """One of X, Z, Y, Xj, Sx, Sz, Sj, Sglobal.

    ``mode`` is the 1-based photon index for Xj and Sj; ``eta`` is a single
    value for Sj and a per-photon sequence for Sglobal.
    """

    kind: str
    mode: int | None = None
    eta: Fraction | float | tuple | None = None

    def __post_init__(self):
        if self.kind not in {"X", "Z", "Y", "Xj", "Sx", "Sz", "Sj", "Sglobal"}:
            raise ValueError(f"unknown logical operator {self.kind!r}")
        if self.kind in {"Xj", "Sj"} and self.mode is None:
            raise ValueError(f"{self.kind} needs a photon index")


X = LogicalOp("X")
Z = LogicalOp("Z")
Y = LogicalOp("Y")
SX = LogicalOp("Sx")
SZ = LogicalOp("Sz")


def make_codeword(params: CodeParams, k: int, sigma_g: float | None = None, ideal: bool = False) -> CollectiveState:
    """Codeword ``|k>``: comb in the carrier, Gaussians of width ``sigma_g`` elsewhere.

    ``sigma_g`` is on the same GKP width scale as ``params.delta`` and
    defaults to ``omega0``.  ``ideal=True`` gives the delta-comb codeword with
    delta functions in the orthogonal modes.
    """
    frame = build_alpha(params.n)
    if ideal:
        carrier = make_ideal_comb(params.omega0, k)
        others = [DiracComb(None) for _ in range(params.n - 1)]
    else:
        if sigma_g is None:
            sigma_g = params.omega0
        if not sigma_g > 0:
            raise ValueError(f"sigma_g must be positive, got {sigma_g!r}")
        carrier = make_comb(params, k)
        others = [PlainGaussian(0.0, amplitude_sigma(sigma_g)) for _ in range(params.n - 1)]
    return CollectiveState(params, frame, (carrier, *others))


# --------------------------------------------------------------------------- displacements


def apply_displacement(state: CollectiveState, d: LocalDisplacement | CollectiveDisplacement) -> CollectiveState:
    if isinstance(d, CollectiveDisplacement):
        if not 1 <= d.target <= len(state.modes):
            raise ValueError(f"collective mode {d.target} outside 1..{len(state.modes)}")
        return state.with_mode(d.target - 1, displace_1d(state.modes[d.target - 1], d.d_omega, d.d_t))
    if not 1 <= d.mode <= state.n:
        raise ValueError(f"photon index {d.mode} outside 1..{state.n} (state dimension mismatch)")
    if state.lost_mode is not None:
        if d.mode == state.lost_mode:
            return state
        scale = 1.0 / math.sqrt(state.n - 1)
        return state.with_mode(0, displace_1d(state.carrier, d.d_omega * scale, d.d_t * scale))
    modes = tuple(
        displace_1d(f, shift, slope) for f, (shift, slope) in zip(state.modes, map_local_displacement(state.frame, d))
    )
    return replace(state, modes=modes)


def apply_displacements(state: CollectiveState, ds: Sequence) -> CollectiveState:
    for d in ds:
        state = apply_displacement(state, d)
    return state


# --------------------------------------------------------------------------- logical operators


def apply_logical(state: CollectiveState, op: LogicalOp) -> CollectiveState:
    p = state.params
    if op.kind == "X":
        return apply_displacement(state, CollectiveDisplacement(d_omega=p.omega0))
    if op.kind == "Z":
        return apply_displacement(state, CollectiveDisplacement(d_t=p.t0))
    if op.kind == "Y":
        # Y = i Z X, so Y|0> = -i|1> here
        out = apply_logical(apply_logical(state, X), Z)
        return replace(out, phase=out.phase * 1j)
    if op.kind == "Xj":
        if op.mode == state.lost_mode:
            raise InvalidModeError(f"photon {op.mode} was lost; Xj cannot act on it")
        # frequency translation of photon j by sqrt(n) omega0 moves the carrier by omega0
        return apply_displacement(state, LocalDisplacement(op.mode, d_omega=math.sqrt(state.n) * p.omega0))
    raise ValueError(f"{op.kind} is a stabilizer; use stabilizer_expectation")


def state_overlap(a: CollectiveState, b: CollectiveState) -> complex:
    if len(a.modes) != len(b.modes):
        raise ValueError("states have different numbers of collective modes")
    out = np.conj(a.phase) * b.phase
    for fa, fb in zip(a.modes, b.modes):
        out *= inner_product(fa, fb)
    return complex(out)


def _slope_expectation(f: ModeWavefunction, slope: float) -> complex:
    return inner_product(f, displace_1d(f, 0.0, slope))


def _present(state: CollectiveState) -> list[int]:
    return [j for j in range(1, state.n + 1) if j != state.lost_mode]


def _eta_phase(state: CollectiveState, j: int, eta) -> complex:
    p = state.params
    return complex(np.exp(-2j * float(eta) * p.omega0 * p.t0 * math.sqrt(state.n)))


def photon_stabilizer(state: CollectiveState, j: int, eta) -> complex:
    """``<exp(2i (omega_j - n_j eta_j omega0) t0 sqrt(n))>``; 1 for a lost photon."""
    p = state.params
    if j == state.lost_mode:
        return 1.0 + 0.0j
    tau = -2.0 * p.t0 * math.sqrt(state.n)
    if state.lost_mode is None:
        value = 1.0 + 0.0j
        for f, a in zip(state.modes, state.frame.entries[j - 1]):
            value *= _slope_expectation(f, tau * a)
    else:
        # post-loss photons are tracked only through the reduced carrier
        value = _slope_expectation(state.carrier, tau / math.sqrt(state.n - 1))
    return value * _eta_phase(state, j, eta)


def global_stabilizer(state: CollectiveState, etas: Sequence) -> complex:
    """Expectation of the product of all per-photon stabilizers."""
    p = state.params
    present = _present(state)
    # sum of present photon frequencies = sqrt(present) * carrier
    tau = -2.0 * p.t0 * math.sqrt(state.n) * math.sqrt(len(present))
    value = _slope_expectation(state.carrier, tau)
    for j in present:
        value *= _eta_phase(state, j, etas[j - 1])
    return value


def stabilizer_expectation(state: CollectiveState, op: LogicalOp) -> complex:
    p = state.params
    if op.kind == "Sx":
        c = state.carrier
        return inner_product(c, displace_1d(c, 2.0 * p.omega0, 0.0))
    if op.kind == "Sz":
        return _slope_expectation(state.carrier, 2.0 * p.t0)
    if op.kind == "Sj":
        return photon_stabilizer(state, op.mode, op.eta)
    if op.kind == "Sglobal":
        return global_stabilizer(state, op.eta)
    raise ValueError(f"{op.kind} is not a stabilizer")


# --------------------------------------------------------------------------- readout


def parity_of(values: np.ndarray, omega0: float) -> np.ndarray:
    """Parity of the nearest lattice integer; exact half-integers go to the even side."""
    return (np.rint(np.asarray(values) / omega0).astype(np.int64) & 1)


def logical_readout(state: CollectiveState, rng: np.random.Generator, shots: int) -> np.ndarray:
    """Frequencies ``[f0, f1]`` of the measured carrier parity."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    omega0 = state.params.omega0
    c = state.carrier
    if isinstance(c, DiracComb):
        bit = int(parity_of(c.offset + c.shift, omega0))
        return np.array([1.0 - bit, float(bit)])
    draws = frequency_sampler(c)(rng, shots)
    ones = int(parity_of(draws, omega0).sum())
    return np.array([(shots - ones) / shots, ones / shots])


def hom_coincidence(state: CollectiveState, tau) -> np.ndarray:
    """Two-photon coincidence probability versus delay ``tau``.

    ``P = (1 - Re <F(-.)| exp(-1j sqrt(2) W tau) F>) / 2`` with ``F`` the
    carrier; photon exchange flips the sign of the interfering variable.
    """
    if state.n != 2 or state.lost_mode is not None:
        raise ValueError("HOM coincidence is defined for intact two-photon states")
    f = state.carrier
    rf = reflect(f)
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.array([0.5 * (1.0 - inner_product(rf, displace_1d(f, 0.0, math.sqrt(2) * t)).real) for t in taus])
    return out if np.ndim(tau) else out[0]
