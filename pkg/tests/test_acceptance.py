"""Acceptance checks, one per criterion.

Each check returns ``(passed, detail)`` and prints a single PASS/FAIL line.
Run directly (``python tests/test_acceptance.py``) or through pytest.
"""

import math
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.optimize import curve_fit

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tfgkp.decoding import NoiseModel, closed_form_error, correctable_region_check, decode_and_correct, extract_syndrome, monte_carlo_error_rate
from tfgkp.frame import CollectiveDisplacement, LocalDisplacement
from tfgkp.imperfection import RotationImperfection, adapted_error_rates, rotated_effective_params
from tfgkp.logical import apply_displacement, hom_coincidence, make_codeword
from tfgkp.loss import adapt_after_loss, adapted_stabilizer, apply_photon_loss, build_eta_config, decode_loss_phase
from tfgkp.params import CodeParams
from tfgkp.wavefunctions import Sampled, default_grid, displace_1d, inner_product, make_comb, sample_on_grid, to_time_domain

ROOT = Path(__file__).resolve().parent.parent


def report(tag, passed, detail, seconds, budget):
    within = seconds < budget
    ok = passed and within
    print(f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail} ({seconds:.2f} s, budget {budget:g} s)", flush=True)
    return ok


# ---------------------------------------------------------------- 1. sqrt(n) scaling


def check_scaling():
    bad = []
    for n in (1, 4, 16):
        p = CodeParams(n=n)
        for k in (0, 1):
            base = make_codeword(p, k, ideal=True)
            for j in range(1, n + 1):
                for factor, want in ((0.9, "I"), (1.1, "X")):
                    s = apply_displacement(base, LocalDisplacement(j, d_omega=factor * math.sqrt(n) * p.omega0 / 2))
                    _, out = decode_and_correct(s, extract_syndrome(s))
                    if out.residual != want:
                        bad.append((n, k, j, factor, out.residual))
    return not bad, f"n in {{1,4,16}}, all modes, 0.9 -> I and 1.1 -> X; mismatches {bad}"


# ---------------------------------------------------------------- 2. closed-form error


def tail_oracle(delta, kappa, omega0=1.0):
    """Misread probability of the finite codeword, averaged over k, by quadrature.

    Peaks of GKP-scale width ``delta`` have amplitude
    ``exp(-pi (x - c)**2 / (2 delta**2))`` under the envelope ``exp(-(kappa c)**2)``.
    """
    out = []
    for k in (0, 1):
        centers = (2 * np.arange(-400, 401) + k) * omega0
        amp = np.exp(-((kappa * centers) ** 2))
        keep = amp > 1e-12
        centers, amp = centers[keep], amp[keep]

        def dens(x):
            return np.dot(amp, np.exp(-math.pi * (x - centers) ** 2 / (2 * delta**2))) ** 2

        total = wrong = 0.0
        for m in range(int(centers.min() / omega0) - 3, int(centers.max() / omega0) + 4):
            part = quad(dens, (m - 0.5) * omega0, (m + 0.5) * omega0, epsabs=0, epsrel=1e-12, limit=200)[0]
            total += part
            if (m - k) % 2:
                wrong += part
        out.append(wrong / total)
    return 0.5 * (out[0] + out[1])


def check_error_formula(seed=20240601, trials=10**6):
    lines, ok = [], True
    for d in (0.3, 0.4, 0.5):
        p = CodeParams(n=1, omega0=1.0, delta=d, kappa=0.05)
        rep = monte_carlo_error_rate(p, None, NoiseModel(), trials, seed, "sampled")
        mc = rep.bit_flip_rate
        lo, hi = rep.bit_flip_interval()
        q = tail_oracle(d, 0.05)
        e = closed_form_error(d, 1.0)
        sig = math.sqrt(q * (1 - q) / trials)
        agree = abs(mc - q) <= 3 * sig
        # exact rate within a factor 2 of E, and the MC interval reaches that band
        factor2 = (e / 2 <= q <= 2 * e) and (lo <= 2 * e and hi >= e / 2)
        ok &= agree and factor2
        lines.append(
            f"D={d}: mc={mc:.4g} [{lo:.3g},{hi:.3g}] oracle={q:.4g} ({(mc - q) / sig:+.2f} sigma) E={e:.4g} oracle/E={q / e:.3f} mc/E={mc / e:.3f}"
        )
    return ok, "; ".join(lines)


# ---------------------------------------------------------------- 3. correctable region


def check_region():
    steps = np.arange(-50, 51) / 100.0
    bad = []
    bound_ok = True
    for n in (1, 4):
        p = CodeParams(n=n)
        for k in (0, 1):
            base = make_codeword(p, k, ideal=True)
            for a in steps:
                for b in steps:
                    s = apply_displacement(base, CollectiveDisplacement(a * p.omega0, b * p.t0))
                    _, out = decode_and_correct(s, extract_syndrome(s))
                    x = "X" if a == -0.5 else "I"
                    z = "Z" if b == -0.5 else "I"
                    want = {("I", "I"): "I", ("X", "I"): "X", ("I", "Z"): "Z", ("X", "Z"): "Y"}[(x, z)]
                    if out.residual != want:
                        bad.append((n, k, a, b, out.residual))
                    if abs(a) < 0.5 and abs(b) < 0.5:
                        # same shift spread over photon 1, in local units
                        local = [LocalDisplacement(1, a * p.omega0 * math.sqrt(n), b * p.t0 * math.sqrt(n))]
                        v = correctable_region_check(local, n, p)
                        bound_ok &= v.frequency and v.time and v.joint
        # on the axes the first failure lies just past the cell edge
        for a in (0.49, 0.5, 0.51):
            s = apply_displacement(make_codeword(p, 0, ideal=True), CollectiveDisplacement(a, 0))
            r = decode_and_correct(s, extract_syndrome(s))[1].residual
            bad += [] if r == ("X" if a > 0.5 else "I") else [(n, "axis-w", a, r)]
            s = apply_displacement(make_codeword(p, 0, ideal=True), CollectiveDisplacement(0, a * p.t0))
            r = decode_and_correct(s, extract_syndrome(s))[1].residual
            bad += [] if r == ("Z" if a > 0.5 else "I") else [(n, "axis-t", a, r)]
    corner = 4 * (p.omega0 / 2) * (p.t0 / 2)
    bound_ok &= math.isclose(corner, math.pi)
    return not bad and bound_ok, (
        f"101x101 grid, n in {{1,4}}, k in {{0,1}}: open cell all I, edge +1/2 kept, -1/2 wraps; "
        f"joint bound 4|dw||dt|<pi holds inside, equals pi at the corner; mismatches {bad[:5]}"
    )


# ---------------------------------------------------------------- 4. loss protocol


def check_loss(seed=4):
    rng = np.random.default_rng(seed)
    detail, ok = [], True
    for n in (2, 4, 16):
        p = CodeParams(n=n, delta=0.1, kappa=0.1)
        cfg = build_eta_config(n, "singleShot")
        code = adapt_after_loss(p)
        base = make_codeword(p, 0)
        hits = sum(decode_loss_phase(apply_photon_loss(base, j), cfg).decoded_mode == j for j in range(1, n + 1))
        alarms = 0
        for _ in range(1000):
            # keep the collective shift inside the correctable cell
            u = rng.uniform(-0.45, 0.45) * p.omega0 * math.sqrt(n)
            tau = rng.uniform(-0.45, 0.45) * p.t0 * math.sqrt(n)
            w = rng.dirichlet(np.ones(n))
            ds = [LocalDisplacement(j + 1, u * w[j], tau * w[j]) for j in range(n)]
            state = base
            for d in ds:
                state = apply_displacement(state, d)
            alarms += decode_loss_phase(state, cfg).decoded_mode is not None
        worst = 0.0
        for k in (0, 1):
            for j in range(1, n + 1):
                z = adapted_stabilizer(apply_photon_loss(make_codeword(p, k), j), code)
                worst = max(worst, abs(math.atan2(z.imag, z.real)))
        ok &= hits == n and alarms == 0 and worst <= 1e-12
        detail.append(f"n={n}: {hits}/{n} identified, {alarms}/1000 false alarms, max|adapted phase|={worst:.1e}")
    return ok, "; ".join(detail)


# ---------------------------------------------------------------- 5. duality and backends


def check_backends():
    p = CodeParams(omega0=1.0, delta=0.2, kappa=0.1)
    f = make_comb(p, 0)
    g = to_time_domain(sample_on_grid(f, *default_grid(f)))
    a = np.abs(g.values)
    inner = (a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:]) & (a[1:-1] > 0.05 * a.max())
    t = g.x[1:-1][inner]
    spacing_err = np.max(np.abs(np.diff(t) - p.t0))
    spacing_ok = spacing_err <= g.dx

    worst = 0.0
    for d in np.linspace(0.05, 0.5, 5):
        for kap in np.linspace(0.05, 0.3, 5):
            q = CodeParams(omega0=1.0, delta=float(d), kappa=float(kap))
            c0, c1 = make_comb(q, 0), make_comb(q, 1)
            moved = displace_1d(c0, 0.3, 0.7)
            lo, hi, _ = default_grid(c0)
            lo, hi = lo - 1, hi + 1
            count = 1 << math.ceil(math.log2((hi - lo) * 10 / c0.peak_width))
            grids = [Sampled(sample_on_grid(f_, lo, hi, count)) for f_ in (c0, c1, moved)]
            for (x, y), (gx, gy) in (((c0, c0), (0, 0)), ((c0, c1), (0, 1)), ((c0, moved), (0, 2))):
                worst = max(worst, abs(inner_product(x, y) - inner_product(grids[gx], grids[gy])))
    return spacing_ok and worst <= 1e-8, (
        f"time spacing error {spacing_err:.2e} vs step {g.dx:.2e}; max |analytic - grid| over 5x5 (D,kappa) = {worst:.1e}"
    )


# ---------------------------------------------------------------- 6. rotation


def rotated_marginal_oracle(theta, sigma, delta=0.1, kappa=0.05, dm=0.005):
    """Deposit the 2D density of (Omega_1, Omega_perp) cells into bins of the rotated variable."""
    c, s = math.cos(theta), math.sin(theta)
    su = delta / math.sqrt(2 * math.pi)  # intensity std of a peak
    sv = sigma / math.sqrt(2 * math.pi)
    u = np.arange(-11.0, 11.0, su / 12)
    cu = 2 * np.arange(-6, 7)
    du = np.exp(-2 * (kappa * cu[:, None]) ** 2 - (u[None, :] - cu[:, None]) ** 2 / (2 * su**2)).sum(axis=0)
    v = np.arange(-8 * sv, 8 * sv, sv / 12)
    dv = np.exp(-(v**2) / (2 * sv**2))
    edges = np.arange(-12.0, 12.0 + dm, dm)
    hist = np.zeros(len(edges) - 1)
    for i0 in range(0, len(u), 2000):
        m = c * u[i0 : i0 + 2000, None] + s * v[None, :]
        w = du[i0 : i0 + 2000, None] * dv[None, :]
        hist += np.histogram(m.ravel(), bins=edges, weights=w.ravel())[0]
    return 0.5 * (edges[1:] + edges[:-1]), hist, dm


def _train(x, amp, env, spacing, std):
    idx = np.arange(-5, 6)
    return amp * (np.exp(-env * idx**2)[None, :] * np.exp(-((x[:, None] - idx * spacing) ** 2) / (2 * std**2))).sum(axis=1)


def check_rotation():
    p = CodeParams(omega0=1.0, delta=0.1, kappa=0.05)
    lines, ok = [], True
    for theta in (0.05, 0.2, 0.5):
        for sigma in (0.5, 1.0, 2.0):
            x, h, step = rotated_marginal_oracle(theta, sigma)
            window = np.abs(x) < 4.5 * 2 * math.cos(theta)
            eff = rotated_effective_params(RotationImperfection(theta, sigma), p)
            guess = [h.max(), 0.01, eff.spacing * 1.01, eff.width / 2.5]
            popt, _ = curve_fit(_train, x[window], h[window], p0=guess, maxfev=20000)
            spacing = popt[2]
            width = abs(popt[3]) * math.sqrt(2 * math.pi)
            good = abs(spacing - eff.spacing) <= step and abs(width / eff.width - 1) <= 0.05
            ok &= good
            lines.append(f"t={theta},s={sigma}: dspacing={spacing - eff.spacing:+.1e} width {width / eff.width - 1:+.2%}")
    sigmas = np.geomspace(0.25, 4.0, 97)
    for theta in (0.05, 0.2, 0.5):
        worst = [max(adapted_error_rates(RotationImperfection(theta, s), p)) for s in sigmas]
        i = int(np.argmin(worst))
        interior = 0 < i < len(sigmas) - 1
        ok &= interior
        lines.append(f"t={theta}: argmin sigma={sigmas[i]:.3f} ({'interior' if interior else 'edge'})")
    return ok, "; ".join(lines)


# ---------------------------------------------------------------- 7. HOM


def hom_oracle(delta, kappa, taus, omega0=1.0, sigma_g=1.0):
    """Coincidence probability from the two-photon amplitude on an (omega_1, omega_2) grid.

    The comb sits in the difference variable (w1 - w2)/sqrt(2), a Gaussian of
    GKP-scale width ``sigma_g`` in the sum.  After the beamsplitter,
    ``P = (1 - Re sum psi*(w1,w2) psi(w2,w1) exp(i (w1 - w2) tau)) / 2``;
    the double sum is reduced along diagonals of constant ``w1 - w2``.
    """
    sa = delta / math.sqrt(math.pi)
    sg = sigma_g / math.sqrt(math.pi)
    centers = 2 * np.arange(-60, 61) * omega0
    amp = np.exp(-((kappa * centers) ** 2))
    keep = amp > 1e-10
    centers, amp = centers[keep], amp[keep]
    reach = (centers.max() + 8 * sa + 8 * sg) / math.sqrt(2)
    h = sa / 5
    w = np.arange(-reach, reach + h, h)

    def comb(x):
        out = np.zeros_like(x)
        for c, a in zip(centers, amp):
            out += a * np.exp(-((x - c) ** 2) / (2 * sa**2))
        return out

    diag = np.zeros(2 * len(w) - 1)
    norm = 0.0
    for i0 in range(0, len(w), 256):
        w1 = w[i0 : i0 + 256, None]
        d = (w1 - w[None, :]) / math.sqrt(2)
        ssum = (w1 + w[None, :]) / math.sqrt(2)
        psi = comb(d) * np.exp(-(ssum**2) / (2 * sg**2))
        swapped = comb(-d) * np.exp(-(ssum**2) / (2 * sg**2))
        norm += np.sum(psi**2)
        idx = (np.arange(i0, i0 + psi.shape[0])[:, None] - np.arange(len(w))[None, :]) + len(w) - 1
        diag += np.bincount(idx.ravel(), weights=(psi * swapped).ravel(), minlength=len(diag))
    lag = (np.arange(len(diag)) - (len(w) - 1)) * h
    overlap = np.array([np.sum(diag * np.cos(lag * t)) for t in taus]) / norm
    return 0.5 * (1 - overlap)


def _dips(taus, probs):
    inner = (probs[1:-1] < probs[:-2]) & (probs[1:-1] <= probs[2:]) & (probs[1:-1] < 0.25)
    return taus[1:-1][inner]


def check_hom():
    p = CodeParams(n=2, omega0=1.0, delta=0.2, kappa=0.1)
    state = make_codeword(p, 0)
    taus = np.linspace(0, 4 * p.t0, 200)
    step = taus[1] - taus[0]
    lib = hom_coincidence(state, taus)
    ref = hom_oracle(0.2, 0.1, taus)
    p0 = abs(lib[0])
    tail = abs(hom_coincidence(state, 4 * p.t0) - 0.5)
    d_lib, d_ref = _dips(taus, lib), _dips(taus, ref)
    theory = np.arange(1, len(d_lib) + 1) * math.pi / (math.sqrt(2) * p.omega0)
    same = len(d_lib) == len(d_ref) and len(d_lib) >= 4
    match = same and np.all(np.abs(d_lib - d_ref) <= step) and np.all(np.abs(d_lib - theory) <= step)
    curve = np.max(np.abs(lib - ref))
    ok = p0 <= 1e-9 and tail <= 1e-3 and match
    return ok, (
        f"P(0)={p0:.1e}, |P(4 T0) - 1/2|={tail:.1e}, dips at {np.round(d_lib / (math.pi / math.sqrt(2)), 3).tolist()} "
        f"x pi/(sqrt2 w0) vs 2D oracle {np.round(d_ref / (math.pi / math.sqrt(2)), 3).tolist()}, max curve gap {curve:.1e}"
    )


# ---------------------------------------------------------------- 8. determinism


def check_determinism():
    runs = {
        "codeword": [],
        "error-rate": ["--seed", "3"],
        "scaling-scan": [],
        "loss-demo": [],
        "rotation-scan": [],
        "hom-scan": [],
    }
    env = dict(os.environ, PYTHONPATH=str(ROOT / "src") + os.pathsep + os.environ.get("PYTHONPATH", ""))
    differing = []
    with tempfile.TemporaryDirectory() as tmp:
        for exp, extra in runs.items():
            outs = []
            for r in range(2):
                out = Path(tmp) / f"{exp}-{r}.csv"
                cfg = ROOT / "configs" / f"{exp}.json"
                if exp == "error-rate":
                    cfg = Path(tmp) / "er.json"
                    cfg.write_text('{"experiment": "error-rate", "trials": 200000, "params": {"delta": 0.4, "kappa": 0.05}, "scan": {"deltas": [0.3, 0.4, 0.5]}}')
                cmd = [sys.executable, "-m", "tfgkp.cli", exp, "--config", str(cfg), "--out", str(out), *extra]
                subprocess.run(cmd, check=True, env=env)
                outs.append(out.read_bytes())
            if outs[0] != outs[1]:
                differing.append(exp)
    return not differing, f"6 experiments run twice through the CLI; differing outputs: {differing}"


CRITERIA = [
    ("C1 sqrt(n) scaling", check_scaling, 1),
    ("C2 closed-form error", check_error_formula, 120),
    ("C3 correctable region", check_region, 10),
    ("C4 loss protocol", check_loss, 10),
    ("C5 duality and backends", check_backends, 30),
    ("C6 rotation imperfection", check_rotation, 60),
    ("C7 HOM", check_hom, 60),
    ("C8 determinism", check_determinism, 600),
]


def run(tag, fn, budget):
    start = time.perf_counter()
    passed, detail = fn()
    return report(tag, passed, detail, time.perf_counter() - start, budget)


def _pytest_case(index, capsys):
    tag, fn, budget = CRITERIA[index]
    with capsys.disabled():
        print()
        assert run(tag, fn, budget)


def test_c1_scaling(capsys):
    _pytest_case(0, capsys)


def test_c2_error_formula(capsys):
    _pytest_case(1, capsys)


def test_c3_region(capsys):
    _pytest_case(2, capsys)


def test_c4_loss(capsys):
    _pytest_case(3, capsys)


def test_c5_backends(capsys):
    _pytest_case(4, capsys)


def test_c6_rotation(capsys):
    _pytest_case(5, capsys)


def test_c7_hom(capsys):
    _pytest_case(6, capsys)


def test_c8_determinism(capsys):
    _pytest_case(7, capsys)


if __name__ == "__main__":
    results = [run(*c) for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
