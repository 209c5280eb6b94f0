"""The six experiments behind the command line."""

from __future__ import annotations

import math

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig
from .decoding import NoiseModel, closed_form_error, decode_and_correct, extract_syndrome, monte_carlo_error_rate
from .frame import LocalDisplacement
from .imperfection import (
    RotationImperfection,
    adapted_error_rates,
    measured_rotated_params,
    rotated_effective_params,
    rotation_validity,
)
from .logical import apply_displacement, hom_coincidence, make_codeword
from .loss import adapt_after_loss, adapted_stabilizer, apply_photon_loss, build_eta_config, decode_loss_phase
from .report import ResultTable
from .wavefunctions import default_grid, make_comb, sample_on_grid


class ExperimentError(RuntimeError):
    def __init__(self, experiment: str, cause: Exception):
        super().__init__(f"{experiment}: {type(cause).__name__}: {cause}")
        self.cause = cause


def _codeword(cfg: ExperimentConfig, table: ResultTable) -> None:
    combs = [make_comb(cfg.params, k) for k in (0, 1)]
    x_min, x_max, count = default_grid(combs[1], cfg.grid_count)
    lo = min(x_min, default_grid(combs[0], count)[0])
    hi = max(x_max, default_grid(combs[0], count)[1])
    grids = [sample_on_grid(c, lo, hi, count) for c in combs]
    x = grids[0].x
    d0, d1 = (np.abs(g.values) ** 2 for g in grids)
    for row in zip(x, d0, d1):
        table.add(*map(float, row))


def _error_rate(cfg: ExperimentConfig, table: ResultTable) -> None:
    model = NoiseModel(cfg.noise_omega_std, cfg.noise_time_std)
    for d in cfg.scan["deltas"]:
        params = cfg.params.replace(delta=float(d))
        rep = monte_carlo_error_rate(params, cfg.sigma_g, model, cfg.trials, cfg.seed, cfg.syndrome_mode)
        lo, hi = rep.bit_flip_interval()
        table.add(float(d), rep.bit_flip_rate, lo, hi, closed_form_error(float(d), 1.0))
    table.metadata["trials"] = cfg.trials
    table.metadata["syndrome_mode"] = cfg.syndrome_mode


def _expected_residual(factor: float) -> str:
    # a local shift of factor*sqrt(n)/2 moves the carrier by factor/2 half-spacings
    return "X" if int(np.rint(factor / 2.0)) & 1 else "I"


def _scaling_scan(cfg: ExperimentConfig, table: ResultTable) -> None:
    for n in cfg.scan["ns"]:
        params = cfg.params.replace(n=n)
        for k in (0, 1):
            base = make_codeword(params, k, ideal=True)
            for mode in range(1, n + 1):
                for factor in cfg.scan["factors"]:
                    shift = factor * math.sqrt(n) / 2.0
                    state = apply_displacement(base, LocalDisplacement(mode, d_omega=shift))
                    _, outcome = decode_and_correct(state, extract_syndrome(state, "exact"))
                    expected = _expected_residual(factor)
                    table.add(n, k, mode, float(factor), shift, outcome.residual, expected, outcome.residual == expected)


def _loss_demo(cfg: ExperimentConfig, table: ResultTable) -> None:
    params = cfg.params
    config = build_eta_config(params.n, cfg.scan["scheme"])
    code = adapt_after_loss(params)
    base = make_codeword(params, 0, cfg.sigma_g)
    for j, eta in enumerate(config.etas, 1):
        lost = apply_photon_loss(base, j)
        syn = decode_loss_phase(lost, config)
        decoded = 0 if syn.decoded_mode is None else syn.decoded_mode
        adapted = adapted_stabilizer(lost, code)
        table.add(j, str(eta), syn.phase.real, syn.phase.imag, decoded, decoded == j, float(np.angle(adapted)))
    table.metadata["scheme"] = config.scheme
    table.metadata["etas"] = config.to_text()


def _rotation_scan(cfg: ExperimentConfig, table: ResultTable) -> None:
    params = cfg.params
    for theta in cfg.scan["thetas"]:
        for sigma in cfg.scan["sigmas"]:
            imp = RotationImperfection(float(theta), float(sigma))
            eff = rotated_effective_params(imp, params)
            spacing, width, _ = measured_rotated_params(imp, params)
            fe, te = adapted_error_rates(imp, params)
            table.add(
                float(theta), float(sigma), eff.spacing, eff.width, eff.additive_width,
                spacing, width, fe, te, rotation_validity(imp, params),
            )


def _hom_scan(cfg: ExperimentConfig, table: ResultTable) -> None:
    params = cfg.params
    state = make_codeword(params, cfg.scan["k"], cfg.sigma_g)
    taus = np.linspace(0.0, cfg.scan["tau_max"], cfg.scan["points"])
    probs = hom_coincidence(state, taus * params.t0)
    for t, p in zip(taus, probs):
        table.add(float(t), float(p))


EXPERIMENT_TABLES = {
    "codeword": (_codeword, ["omega_over_omega0", "density_k0", "density_k1"]),
    "error-rate": (_error_rate, ["delta_over_omega0", "mc_rate", "mc_ci_low", "mc_ci_high", "closed_form"]),
    "scaling-scan": (
        _scaling_scan,
        ["n", "k", "mode", "factor", "shift_over_omega0", "residual", "expected", "pass"],
    ),
    "loss-demo": (
        _loss_demo,
        ["lost_mode", "eta", "phase_re", "phase_im", "decoded_mode", "correct", "adapted_phase_rad"],
    ),
    "rotation-scan": (
        _rotation_scan,
        [
            "theta_rad", "sigma_over_omega0", "spacing_over_omega0", "exact_width_over_omega0",
            "additive_width_over_omega0", "measured_spacing_over_omega0", "measured_width_over_omega0",
            "freq_error", "time_error", "verdict",
        ],
    ),
    "hom-scan": (_hom_scan, ["tau_over_t0", "coincidence"]),
}


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    if cfg.seed is None:
        raise ConfigError(["seed: no seed in the config or on the command line"])
    run, columns = EXPERIMENT_TABLES[cfg.experiment]
    table = ResultTable(
        list(columns),
        metadata={
            "tfgkp_version": __version__,
            "experiment": cfg.experiment,
            "seed": cfg.seed,
            "config_hash": cfg.config_hash(),
            "omega0": cfg.omega0,
        },
    )
    try:
        run(cfg, table)
    except (ValueError, ArithmeticError) as e:
        raise ExperimentError(cfg.experiment, e) from e
    table.metadata["rows"] = len(table.rows)
    return table
