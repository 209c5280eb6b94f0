"""Experiment configuration: JSON text in, validated dataclass out.

Physical quantities in ``params`` and ``noise`` use any consistent units
(for example rad/s and s); they are divided by ``omega0`` (frequencies) or
multiplied by it (times) so that the run itself sees ``omega0 = 1``.  Values
in ``scan`` are already dimensionless.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

from .params import CodeParams, is_power_of_two, param_problems

EXPERIMENTS = ("codeword", "error-rate", "scaling-scan", "loss-demo", "rotation-scan", "hom-scan")
DEFAULT_GRID = 2**14

TOP_KEYS = {"experiment", "seed", "output", "params", "sigma_g", "noise", "trials", "syndrome_mode", "grid", "scan"}
PARAM_KEYS = {"n", "omega0", "delta", "kappa"}
NOISE_KEYS = {"omega_std", "time_std"}
GRID_KEYS = {"count"}

SCAN_DEFAULTS = {
    "codeword": {},
    "error-rate": {"deltas": None},
    "scaling-scan": {"ns": [1, 4, 16], "factors": [0.9, 1.1]},
    "loss-demo": {"scheme": "singleShot"},
    "rotation-scan": {"thetas": [0.05, 0.2, 0.5], "sigmas": [0.5, 1.0, 2.0]},
    "hom-scan": {"tau_max": 4.0, "points": 200, "k": 0},
}


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("\n".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: CodeParams  # normalized, omega0 = 1
    omega0: float  # physical value used for normalization
    sigma_g: float
    noise_omega_std: float
    noise_time_std: float
    trials: int
    syndrome_mode: str
    grid_count: int
    scan: dict = field(default_factory=dict)
    seed: int | None = None
    output: str | None = None

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("seed")
        d.pop("output")
        return d

    def config_hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _integer(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _section(doc: dict, key: str, allowed: set, problems: list) -> dict:
    sec = doc.get(key, {})
    if not isinstance(sec, dict):
        problems.append(f"{key}: expected an object")
        return {}
    for extra in sorted(set(sec) - allowed):
        problems.append(f"{key}.{extra}: unknown key")
    return sec


def _check_list(value, name, problems, pred, desc):
    if not isinstance(value, list) or not value:
        problems.append(f"scan.{name}: expected a non-empty list")
        return
    for i, v in enumerate(value):
        if not pred(v):
            problems.append(f"scan.{name}[{i}]: {desc}, got {v!r}")


def _check_scan(experiment: str, scan: dict, problems: list):
    if experiment == "error-rate":
        if scan["deltas"] is not None:
            _check_list(scan["deltas"], "deltas", problems, lambda v: _number(v) and 0 < v < 1, "need 0 < delta/omega0 < 1")
    elif experiment == "scaling-scan":
        _check_list(scan["ns"], "ns", problems, lambda v: _integer(v) and is_power_of_two(v), "n must be a power of two")
        _check_list(scan["factors"], "factors", problems, lambda v: _number(v) and v >= 0, "need factor >= 0")
    elif experiment == "loss-demo":
        if scan["scheme"] not in ("singleShot", "pairwise"):
            problems.append(f"scan.scheme: must be 'singleShot' or 'pairwise', got {scan['scheme']!r}")
    elif experiment == "rotation-scan":
        _check_list(scan["thetas"], "thetas", problems, lambda v: _number(v) and abs(v) < math.pi / 2, "need |theta| < pi/2")
        _check_list(scan["sigmas"], "sigmas", problems, lambda v: _number(v) and v > 0, "need sigma/omega0 > 0")
    elif experiment == "hom-scan":
        if not (_number(scan["tau_max"]) and scan["tau_max"] > 0):
            problems.append(f"scan.tau_max: need tau_max/t0 > 0, got {scan['tau_max']!r}")
        if not (_integer(scan["points"]) and scan["points"] >= 2):
            problems.append(f"scan.points: need an integer >= 2, got {scan['points']!r}")
        if scan["k"] not in (0, 1) or isinstance(scan["k"], bool):
            problems.append(f"scan.k: must be 0 or 1, got {scan['k']!r}")


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Parse and validate; raises :class:`ConfigError` listing every problem.

    ``experiment`` (from the command line) fills a missing ``experiment`` key
    and must agree with it when both are given.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["top level: expected an object"])
    problems: list[str] = []
    for extra in sorted(set(doc) - TOP_KEYS):
        problems.append(f"{extra}: unknown key")

    if experiment is not None:
        given = doc.setdefault("experiment", experiment)
        if given != experiment:
            problems.append(f"experiment: config says {given!r} but {experiment!r} was requested")
    experiment = doc.get("experiment")
    if experiment not in EXPERIMENTS:
        problems.append(f"experiment: must be one of {', '.join(EXPERIMENTS)}, got {experiment!r}")

    raw = _section(doc, "params", PARAM_KEYS, problems)
    n = raw.get("n", 1)
    omega0 = raw.get("omega0", 1.0)
    delta = raw.get("delta", 0.1 * omega0 if _number(omega0) else 0.1)
    kappa = raw.get("kappa", 0.1 / omega0 if _number(omega0) and omega0 > 0 else 0.1)
    for name, v in (("omega0", omega0), ("delta", delta), ("kappa", kappa)):
        if not _number(v):
            problems.append(f"params.{name}: expected a finite number, got {v!r}")
    if not _integer(n):
        problems.append(f"params.n: expected an integer, got {n!r}")
    params = None
    if not any(p.startswith("params.") for p in problems):
        issues = param_problems(n, omega0, delta, kappa)
        problems.extend(f"params: {m}" for m in issues)
        if not issues:
            params = CodeParams(n=n, omega0=1.0, delta=delta / omega0, kappa=kappa * omega0)
    if experiment == "hom-scan" and n != 2:
        problems.append(f"params.n: hom-scan needs n = 2, got {n!r}")
    if experiment == "loss-demo" and _integer(n) and n < 2:
        problems.append(f"params.n: loss-demo needs n >= 2, got {n!r}")

    sigma_g = doc.get("sigma_g", omega0 if _number(omega0) and omega0 > 0 else 1.0)
    if not (_number(sigma_g) and sigma_g > 0):
        problems.append(f"sigma_g: must be > 0, got {sigma_g!r}")

    noise = _section(doc, "noise", NOISE_KEYS, problems)
    omega_std = noise.get("omega_std", 0.0)
    time_std = noise.get("time_std", 0.0)
    for name, v in (("omega_std", omega_std), ("time_std", time_std)):
        if not (_number(v) and v >= 0):
            problems.append(f"noise.{name}: must be >= 0, got {v!r}")

    trials = doc.get("trials", 100_000)
    if not (_integer(trials) and trials >= 1):
        problems.append(f"trials: must be an integer >= 1, got {trials!r}")

    mode = doc.get("syndrome_mode", "sampled")
    if mode not in ("exact", "sampled"):
        problems.append(f"syndrome_mode: must be 'exact' or 'sampled', got {mode!r}")

    grid = _section(doc, "grid", GRID_KEYS, problems)
    count = grid.get("count", DEFAULT_GRID)
    if not (_integer(count) and is_power_of_two(count) and count >= 64):
        problems.append(f"grid.count: must be a power of two >= 64, got {count!r}")

    seed = doc.get("seed")
    if seed is not None and not (_integer(seed) and seed >= 0):
        problems.append(f"seed: must be a non-negative integer, got {seed!r}")
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        problems.append(f"output: expected a path string, got {output!r}")

    scan = {}
    if experiment in EXPERIMENTS:
        raw_scan = _section(doc, "scan", set(SCAN_DEFAULTS[experiment]), problems)
        scan = {**SCAN_DEFAULTS[experiment], **raw_scan}
        _check_scan(experiment, scan, problems)

    if problems:
        raise ConfigError(problems)
    if experiment == "error-rate" and scan["deltas"] is None:
        scan["deltas"] = [params.delta]
    return ExperimentConfig(
        experiment=experiment,
        params=params,
        omega0=float(omega0),
        sigma_g=float(sigma_g) / omega0,  # GKP width scale, like delta
        noise_omega_std=float(omega_std) / omega0,
        noise_time_std=float(time_std) * omega0,
        trials=trials,
        syndrome_mode=mode,
        grid_count=count,
        scan=scan,
        seed=seed,
        output=output,
    )
