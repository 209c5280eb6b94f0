"""Photon loss: eta design, lost-mode identification and post-loss adaptation.

The per-photon stabilizer is ``S_j = exp(2i (omega_j - n_j eta_j omega0) t0 sqrt(n))``.
On an intact ideal codeword ``prod_j S_j`` has eigenvalue
``exp(-2i pi sqrt(n) sum_j eta_j)``, which is 1 when ``sqrt(n) sum_j eta_j``
is an integer.  Losing photon ``j`` removes its factor and leaves the
eigenvalue ``exp(2i pi sqrt(n) eta_j)``; distinct values identify the mode.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations

from .decoding import centered
from .logical import CollectiveState, global_stabilizer, photon_stabilizer
from .params import CodeParams, is_power_of_two
from .wavefunctions import AnalyticComb, DiracComb, displace_1d

MAX_DENOMINATOR = 16
MIN_SEPARATION = 1e-6
PHASE_TOL = 1e-9


class LossConfigError(ValueError):
    pass


class AmbiguousLossError(ValueError):
    pass


def _sqrt_int(n: int) -> int | None:
    r = math.isqrt(n)
    return r if r * r == n else None


def expected_phase(n: int, eta) -> complex:
    """Global-stabilizer eigenvalue after losing the photon with parameter ``eta``."""
    return cmath.exp(2j * math.pi * math.sqrt(n) * float(eta))


def _angle(z: complex) -> float:
    return abs(cmath.phase(z))


def _separation(a: complex, b: complex) -> float:
    return _angle(a / b)


@dataclass(frozen=True)
class LossConfig:
    n: int
    etas: tuple[Fraction, ...]
    scheme: str  # "pairwise" or "singleShot"

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise LossConfigError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if len(self.etas) != self.n:
            out.append(f"need {self.n} eta values, got {len(self.etas)}")
            return out
        r = _sqrt_int(self.n)
        if self.scheme == "pairwise":
            for j in range(self.n - 1):
                if not _times_sqrt_is_integer(self.etas[j] + self.etas[j + 1], r):
                    out.append(f"(eta_{j + 1} + eta_{j + 2}) sqrt(n) is not an integer")
            for j, e in enumerate(self.etas, 1):
                if self.n > 1 and _separation(expected_phase(self.n, e), 1) <= MIN_SEPARATION:
                    out.append(f"loss of photon {j} leaves the pair stabilizers unchanged")
        elif self.scheme == "singleShot":
            if not _times_sqrt_is_integer(sum(self.etas, Fraction(0)), r):
                out.append("sqrt(n) * sum(eta) is not an integer")
            if self.n > 1:
                phases = [expected_phase(self.n, e) for e in self.etas]
                for j, z in enumerate(phases, 1):
                    if _separation(z, 1) <= MIN_SEPARATION:
                        out.append(f"loss of photon {j} is indistinguishable from no loss")
                for (a, za), (b, zb) in combinations(enumerate(phases, 1), 2):
                    if _separation(za, zb) <= MIN_SEPARATION:
                        out.append(f"photons {a} and {b} give the same loss phase")
        else:
            out.append(f"unknown scheme {self.scheme!r}")
        return out

    def to_text(self) -> str:
        return " ".join(str(e) for e in self.etas)

    @classmethod
    def from_text(cls, text: str, scheme: str) -> "LossConfig":
        etas = tuple(Fraction(tok) for tok in text.replace(",", " ").split())
        return cls(len(etas), etas, scheme)


def _times_sqrt_is_integer(x: Fraction, r: int | None) -> bool:
    # sqrt(n) irrational for non-square n: only x = 0 qualifies
    if r is None:
        return x == 0
    return (x * r).denominator == 1


def _candidates(max_den: int = MAX_DENOMINATOR) -> list[Fraction]:
    vals = {Fraction(p, q) for q in range(1, max_den + 1) for p in range(1, q)}
    return sorted(vals)


def build_eta_config(n: int, scheme: str = "singleShot") -> LossConfig:
    """Eta vector for ``scheme`` from rationals scanned in increasing order.

    Denominators stay <= 16 except for single-shot n = 64, which needs more
    distinct phases than such rationals provide.
    """
    if not is_power_of_two(n):
        raise LossConfigError(f"n must be a power of two, got {n!r}")
    if n == 1:
        return LossConfig(1, (Fraction(0),), scheme)
    r = _sqrt_int(n)
    if scheme == "pairwise":
        for e in _candidates():
            if r is None:
                etas = tuple(e if j % 2 == 0 else -e for j in range(n))
            else:
                etas = (e,) * n
            try:
                return LossConfig(n, etas, scheme)
            except LossConfigError:
                continue
        raise LossConfigError(f"no pairwise eta configuration for n={n}")
    if scheme != "singleShot":
        raise LossConfigError(f"unknown scheme {scheme!r}")
    cands = _candidates()
    if r is None:
        # sum(eta) must vanish: use +/- pairs of distinct values
        chosen = cands[: n // 2]
        return LossConfig(n, tuple(x for e in chosen for x in (e, -e)), scheme)
    found = None
    max_den = MAX_DENOMINATOR
    # denominators <= 16 give only 48 usable residues for n = 64; widen if needed
    while found is None and max_den <= 4 * MAX_DENOMINATOR:
        found = _search_square(n, r, _candidates(max_den))
        max_den *= 2
    if found is None:
        raise LossConfigError(f"no single-shot eta configuration for n={n} within the search budget")
    return LossConfig(n, found, scheme)


def _search_square(n: int, r: int, cands: list[Fraction]):
    # distinct nonzero residues (r * eta) mod 1, taken in complementary pairs so the sum is an integer
    by_key: dict[Fraction, Fraction] = {}
    for e in cands:
        key = (e * r) % 1
        if key != 0 and key not in by_key:
            by_key[key] = e
    picked: list[Fraction] = []
    used: set[Fraction] = set()
    for key in sorted(by_key, key=by_key.get):
        partner = 1 - key
        if key in used or partner == key or partner not in by_key:
            continue
        picked += [by_key[key], by_key[partner]]
        used |= {key, partner}
        if len(picked) == n:
            return tuple(picked)
    return None


# --------------------------------------------------------------------------- loss channel


def apply_photon_loss(state: CollectiveState, j: int) -> CollectiveState:
    """Remove photon ``j`` and re-express the carrier in the reduced variable.

    ``Omega'_1 = sqrt((n-1)/n) Omega_1 - sum_{k>1} alpha[j,k] Omega_k / sqrt(n-1)``:
    the comb is rescaled by ``sqrt((n-1)/n)`` and, for Gaussian orthogonal
    modes, each peak broadens in quadrature by their contribution.
    """
    n = state.n
    if state.lost_mode is not None:
        raise ValueError("only a single photon loss is supported")
    if n < 2:
        raise ValueError("cannot lose the only photon")
    if not 1 <= j <= n:
        raise ValueError(f"photon index {j} outside 1..{n}")
    scale = math.sqrt((n - 1) / n)
    c = state.carrier
    if isinstance(c, DiracComb):
        carrier = DiracComb(c.spacing * scale, c.offset * scale, c.shift * scale, c.slope / scale, c.phase)
    elif isinstance(c, AnalyticComb):
        extra = 0.0
        for f, a in zip(state.modes[1:], state.frame.entries[j - 1, 1:]):
            extra += (a / math.sqrt(n - 1)) ** 2 * getattr(f, "width", 0.0) ** 2
        carrier = AnalyticComb(
            spacing=c.spacing * scale,
            offset=c.offset * scale,
            peak_width=math.sqrt((c.peak_width * scale) ** 2 + extra),
            env_width=c.env_width * scale,
            truncation=c.truncation,
            shift=c.shift * scale,
            slope=c.slope / scale,
            phase=c.phase,
        )
    else:
        raise ValueError("photon loss needs an analytic carrier")
    modes = (carrier, *state.modes[1 : n - 1])
    return replace(state, modes=modes, photons_present=n - 1, lost_mode=j)


@dataclass(frozen=True)
class LossSyndrome:
    phase: complex
    decoded_mode: int | None
    confidence: float  # angular distance to the runner-up hypothesis


def _correct_frequency(state: CollectiveState) -> CollectiveState:
    # remove a correctable carrier displacement before reading the loss phase
    c = state.carrier
    p = state.params
    if state.lost_mode is not None:
        return state
    return state.with_mode(0, displace_1d(c, -centered(c.shift, p.omega0), -centered(c.slope, p.t0)))


def decode_loss_phase(state: CollectiveState, config: LossConfig) -> LossSyndrome:
    if config.n != state.n:
        raise LossConfigError(f"config is for n={config.n}, state has n={state.n}")
    state = _correct_frequency(state)
    if config.scheme == "pairwise":
        return _decode_pairwise(state, config)
    z = global_stabilizer(state, config.etas)
    phase = z / abs(z) if abs(z) > 0 else 1.0 + 0.0j
    if _separation(phase, 1) <= PHASE_TOL:
        others = [_separation(phase, expected_phase(config.n, e)) for e in config.etas]
        return LossSyndrome(complex(phase), None, min(others) if others else math.pi)
    dists = sorted((_separation(phase, expected_phase(config.n, e)), j) for j, e in enumerate(config.etas, 1))
    if len(dists) > 1 and dists[1][0] <= PHASE_TOL:
        raise AmbiguousLossError(f"loss phase matches both mode {dists[0][1]} and mode {dists[1][1]}")
    runner_up = min([dists[1][0]] if len(dists) > 1 else [math.pi] + [_separation(phase, 1)])
    return LossSyndrome(complex(phase), dists[0][1], runner_up - dists[0][0])


def _decode_pairwise(state: CollectiveState, config: LossConfig) -> LossSyndrome:
    n = config.n
    flags = []
    first = 1.0 + 0.0j
    for j in range(1, n):
        z = photon_stabilizer(state, j, config.etas[j - 1]) * photon_stabilizer(state, j + 1, config.etas[j])
        z = z / abs(z) if abs(z) else 1.0 + 0.0j
        flagged = _separation(z, 1) > PHASE_TOL
        if flagged and not any(flags):
            first = z
        flags.append(flagged)
    if not any(flags):
        return LossSyndrome(1.0 + 0.0j, None, math.pi)
    # a loss of photon l flags exactly the pairs (l-1, l) and (l, l+1)
    matches = [l for l in range(1, n + 1) if flags == [l in (j, j + 1) for j in range(1, n)]]
    if not matches:
        raise AmbiguousLossError(f"pair stabilizers flagged {flags}; not a single loss")
    dists = sorted((_separation(first, expected_phase(n, config.etas[l - 1])), l) for l in matches)
    if len(dists) > 1 and dists[1][0] - dists[0][0] <= PHASE_TOL:
        raise AmbiguousLossError(f"pair phase cannot separate modes {dists[0][1]} and {dists[1][1]}")
    margin = dists[1][0] - dists[0][0] if len(dists) > 1 else _separation(first, 1)
    return LossSyndrome(complex(first), dists[0][1], margin)


# --------------------------------------------------------------------------- adaptation


@dataclass(frozen=True)
class AdaptedCode:
    """Code seen by the remaining photons.

    ``t0`` is the period for ``exp(2i W t0)`` with
    ``W = sum_{present} omega_i / sqrt(n)``; ``omega0`` the matching half-spacing
    of that variable.
    """

    photons: int
    omega0: float
    t0: float


def adapt_after_loss(params: CodeParams, n: int | None = None) -> AdaptedCode:
    n = params.n if n is None else n
    if n < 2:
        raise ValueError("adaptation needs n >= 2")
    t0 = params.t0 * n / (n - 1)
    return AdaptedCode(n - 1, math.pi / t0, t0)


def adapted_stabilizer(state: CollectiveState, code: AdaptedCode) -> complex:
    """``<exp(2i W t0')>`` on a post-loss state, ``W = sqrt((n-1)/n) Omega'_1``."""
    if state.lost_mode is None:
        raise ValueError("state has not lost a photon")
    from .logical import _slope_expectation

    n = state.n
    return _slope_expectation(state.carrier, -2.0 * code.t0 * math.sqrt((n - 1) / n))
