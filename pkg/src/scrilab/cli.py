"""Command-line interface: verification suites and simulation runs.

Subcommands: spectra, linearize-check, tensor-ledger, wave, transport,
maxwell, bondi, verify.  Outputs are deterministic CSV/JSON; report-style
subcommands also render PNG figures next to the delimited files unless
--no-plots is given.  Exit codes: 0 pass, 1 check failure, 2 config error,
3 runtime error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import bondi as bondi_mod
from . import chart, figures, gr_ops, maxwell as maxwell_mod, tensors
from .config import ENV_PREFIX, load_config
from .errors import ConfigError, ScrilabError, SolverError
from .io_utils import write_csv, write_json
from .profiles import conforming_profile, sin_x1_profile
from .scri_solver import (CharGrid, damped_wave_solve, decay_fit,
                          energy_diagnostic, fit_probe_exponent,
                          interpolation_inequality_constant, transport_solve,
                          qbar_coefficients)

BLOCK_LABELS = ["00", "01", "0s_e", "0s_o", "11", "1s_e", "1s_o",
                "trace", "tf_p", "tf_q"]


def _bump(center=-1.8, width=0.35):
    def fn(a):
        z = (a - center) / width
        out = np.zeros_like(a)
        m = np.abs(z) < 1.0
        out[m] = np.exp(1.0 - 1.0 / (1.0 - z[m] ** 2))
        return out
    return fn


def _zero10(a):
    return np.zeros((a.size, tensors.DIM))


# ---------------------------------------------------------------- spectra

def run_spectra(cfg, outdir, plots=True):
    pair = cfg.pair()
    A7 = tensors.matrix_A7(pair)
    A10 = tensors.build_A(pair)
    report = {
        "parameters": {"gammaC": cfg.gammaC, "gammaU": cfg.gammaU,
                       "mass": cfg.mass},
        "A": A7.tolist(),
        "A_CU_block": tensors.cy_block(A10).tolist(),
        "eigenvalues": tensors.canonical_eigenvalues(pair),
        "eigenvalues_numeric": sorted(float(x.real)
                                      for x in tensors.spectrum(A10)),
        "duality_residual": tensors.duality_residual(pair),
    }
    path = write_json(os.path.join(outdir, "spectra.json"), report)
    arts = [path]
    if plots:
        arts.append(figures.eigenvalue_figure(
            os.path.join(outdir, "spectra.png"), report["eigenvalues"],
            title=f"block spectrum (gC={cfg.gammaC}, gU={cfg.gammaU})"))
    return report, arts


# ---------------------------------------------------------- linearize-check

def run_linearize_check(cfg, outdir, plots=True):
    pair = cfg.pair()
    rho_I = 1e-3
    point = chart.CompactPoint(0.8, math.sqrt(rho_I), theta=1.1, mass=cfg.mass)
    A_raw = gr_ops.extract_A(point, cfg.mass, None, pair, subtract_baseline=False)
    A_closed = tensors.build_A(pair)
    errA = np.abs(A_raw - A_closed)

    h = sin_x1_profile(slot=4, epsilon=cfg.epsilon)
    h.mass = cfg.mass
    B_num = gr_ops.extract_B(point, cfg.mass, h, pair)
    B_closed = tensors.build_B(h, point)
    scale = np.abs(B_closed).max()
    errB = np.abs(B_num - B_closed).max() / scale if scale > 0 else 0.0

    report = {
        "point": {"rho0": point.rho0, "rho_I": point.rho_I, "theta": point.theta,
                  "mass": cfg.mass},
        "extracted_A": A_raw.tolist(),
        "closed_A": A_closed.tolist(),
        "max_block_error": float(errA.max()),
        "B_profile": "sin_x1",
        "B_entry_closed": float(B_closed[4, 0]),
        "B_entry_extracted": float(B_num[4, 0]),
        "B_relative_error": float(errB),
    }
    path = write_json(os.path.join(outdir, "linearize_check.json"), report)
    arts = [path]
    if plots:
        arts.append(figures.matrix_error_figure(
            os.path.join(outdir, "linearize_check.png"), errA,
            title="|extracted A - closed A|"))
    return report, arts


# ------------------------------------------------------------ tensor-ledger

def _christoffel_table(mass, h):
    """(name, indices, leading(point, d1), stated remainder order in rho_I).

    Components are unweighted, spherical slots in the orthonormal frame via
    theta-representatives; d1 is the profile's x1-derivative 10-vector.
    """
    def zero(pt, d1):
        return 0.0

    def m_over_r2(sign):
        def lead(pt, d1):
            return sign * 0.5 * mass / pt.r ** 2
        return lead

    def half_r(sign, with_h=0.0):
        def lead(pt, d1):
            base = sign * 0.5 * (pt.r - 2.0 * mass)
            if with_h:
                base += with_h * 0.5 * pt.r * (d1[7] + d1[8])
            return base
        return lead

    def gamma111(pt, d1):
        return 0.5 * d1[4] / pt.r

    def sphere(pt, d1):
        return -pt.r ** 2 / math.tan(pt.theta)

    T, P = 2, 3  # theta-hat, phi-hat index slots
    return [
        ("G_000", (0, 0, 0), zero, 1.0),
        ("G_001", (0, 0, 1), zero, 1.0),
        ("G_100", (1, 0, 0), m_over_r2(-1.0), 1.0),
        ("G_101", (1, 0, 1), zero, 1.0),
        ("G_t00", (T, 0, 0), zero, 0.0),
        ("G_t01", (T, 0, 1), zero, 0.0),
        ("G_00t", (0, 0, T), zero, 0.0),
        ("G_011", (0, 1, 1), m_over_r2(1.0), 1.0),
        ("G_10t", (1, 0, T), zero, 0.0),
        ("G_111", (1, 1, 1), gamma111, 1.0),
        ("G_t0t", (T, 0, T), half_r(1.0), -1.0),
        ("G_t11", (T, 1, 1), zero, 0.0),
        ("G_01t", (0, 1, T), zero, 0.0),
        ("G_0tt", (0, T, T), half_r(-1.0), -1.0),
        ("G_11t", (1, 1, T), zero, 0.0),
        ("G_1tt", (1, T, T), half_r(1.0, with_h=-1.0), -1.0),
        ("G_t1t", (T, 1, T), half_r(-1.0, with_h=1.0), -1.0),
        ("G_tpp", (T, P, P), sphere, -2.0),
    ]


def _frame_first(cs):
    """First-kind symbols with phi-indices moved to the orthonormal frame
    (theta indices are already frame-aligned)."""
    st = math.sin(cs.point.theta)
    f = np.array([1.0, 1.0, 1.0, 1.0 / st])
    return cs.first * f[:, None, None] * f[None, :, None] * f[None, None, :]


def run_tensor_ledger(cfg, outdir, plots=True):
    mass = cfg.mass
    h = conforming_profile(ell0=cfg.ell0, ellI=cfg.ellI, epsilon=cfg.epsilon)
    h.mass = mass
    ellI = cfg.ellI
    rho0 = 0.8
    theta = 1.1
    rhoIs = np.geomspace(3e-6, 3e-3, 10)
    table = _christoffel_table(mass, h)

    # remainder-order units: entries state rho_I-orders offset by ellI
    samples = {name: [] for name, *_ in table}
    for rhoI in rhoIs:
        pt = chart.CompactPoint(rho0, math.sqrt(rhoI), theta=theta, mass=mass)
        cs = gr_ops.christoffel(pt, mass, h)
        first = _frame_first(cs)
        d1 = h.split_d1(pt)
        for name, idx, lead, order in table:
            samples[name].append(first[idx] - lead(pt, d1))

    rows = []
    slopes, required, names = [], [], []
    logr = np.log(rhoIs)
    for name, idx, lead, order in table:
        rem = np.array(samples[name])
        stated = order + ellI
        if np.abs(rem).max() < 1e-13:
            slope = math.inf
            ok = True
        else:
            fit = decay_fit(rem, logr)
            slope = fit.exponent
            ok = slope > stated - 0.1
        rows.append((name, slope, stated, int(ok)))
        names.append(name)
        slopes.append(slope if math.isfinite(slope) else stated + 2.0)
        required.append(stated - 0.1)

    # curvature leading terms at small rho_I
    pt = chart.CompactPoint(rho0, math.sqrt(1e-5), theta=theta, mass=mass)
    cur = gr_ops.curvature(pt, mass, h)
    Rw = cur.riemann_weighted()
    d2 = h.split_d1d1(pt)
    targ1 = (d2[7] + d2[8]) / pt.r
    targ2 = 0.5 * (d2[7] + d2[8]) / pt.r
    rel1 = abs(Rw[0, 2, 1, 2] - targ1) / abs(targ1)
    rel2 = abs(Rw[2, 1, 1, 2] - targ2) / abs(targ2)
    rows.append(("R_0t1t", rel1, 0.10, int(rel1 < 0.10)))
    rows.append(("R_t11t", rel2, 0.10, int(rel2 < 0.10)))

    # Schwarzschild Ricci over a sample of the domain
    ric_max = 0.0
    for r0 in np.linspace(0.2, 0.95, 10):
        for xi in np.linspace(0.05, 0.9 * chart.xI_bound(mass), 10):
            p = chart.CompactPoint(r0, xi, theta=theta, mass=mass)
            ric_max = max(ric_max, float(np.abs(
                gr_ops.curvature(p, mass, None).ricci_weighted()).max()))
    rows.append(("ricci_schwarzschild_max", ric_max, 1e-9, int(ric_max <= 1e-9)))

    path = write_csv(os.path.join(outdir, "tensor_ledger.csv"),
                     ["entry", "value", "threshold", "passed"], rows)
    arts = [path]
    if plots:
        arts.append(figures.slope_figure(
            os.path.join(outdir, "tensor_ledger.png"), names, slopes, required))
    all_ok = all(r[3] for r in rows)
    return {"rows": rows, "all_passed": all_ok}, arts


# ------------------------------------------------------------------- wave

def run_wave(cfg, outdir, plots=True, gamma=None):
    grid = cfg.char_grid()
    gam = cfg.gamma() if gamma is None else gamma
    bump = _bump()
    res = damped_wave_solve(grid, mass=cfg.mass, gamma=gam,
                            data_u=lambda a: np.zeros_like(a), data_v=bump,
                            probe_a=cfg.probe_a, include_subleading=True)
    fit = fit_probe_exponent(res, window=cfg.fit_window)
    rows = [(float(np.exp(b)), float(res.sup_series[j, 0]), float(res.energy[j]),
             float(res.probe_series[j, 0, 0]))
            for j, b in enumerate(grid.b)]
    csv_path = write_csv(os.path.join(outdir, "wave_series.csv"),
                         ["rho_I", "sup", "energy", "probe_u"], rows)
    report = {
        "gamma": gam, "mass": cfg.mass, "damping": cfg.damping,
        "grid": {"n_a": grid.n_a, "n_b": grid.n_b, "delta": grid.delta},
        "fit": {"exponent": fit.exponent, "window": list(fit.window),
                "residual": fit.residual, "half_width": fit.half_width,
                "rejected": fit.rejected},
        "expected_exponent": gam,
    }
    json_path = write_json(os.path.join(outdir, "wave_fit.json"), report)
    arts = [csv_path, json_path]
    if plots:
        arts.append(figures.decay_figure(
            os.path.join(outdir, "wave_decay.png"), np.exp(grid.b),
            res.probe_series[:, 0, :], fits=[fit], labels=["probe u"],
            title=f"damped wave, gamma={gam}"))
    return report, arts


# --------------------------------------------------------------- transport

def run_transport(cfg, outdir, plots=True):
    pair = cfg.pair()
    grid = cfg.char_grid()
    A = tensors.build_A(pair)
    bump = _bump()

    def data_v(a):
        out = np.zeros((a.size, tensors.DIM))
        for j in range(tensors.DIM):
            out[:, j] = (0.5 + 0.1 * j) * bump(a)
        return out

    res = transport_solve(grid, A=A, data_u=_zero10, data_v=data_v,
                          probe_a=cfg.probe_a)
    pred = tensors.predicted_exponents(A)
    fits = [fit_probe_exponent(res, 0, c, window=cfg.fit_window)
            for c in range(tensors.DIM)]
    rows = [(float(np.exp(b)),) + tuple(float(x) for x in res.sup_series[j])
            + (float(res.energy[j]),) for j, b in enumerate(grid.b)]
    csv_path = write_csv(os.path.join(outdir, "transport_series.csv"),
                         ["rho_I"] + [f"sup_{lbl}" for lbl in BLOCK_LABELS]
                         + ["energy"], rows)
    blocks = []
    for c, f in enumerate(fits):
        blocks.append({"block": BLOCK_LABELS[c], "fitted": f.exponent,
                       "predicted": float(pred[c]), "residual": f.residual,
                       "within_5pct": bool(abs(f.exponent - pred[c])
                                           <= 0.05 * max(abs(pred[c]), 1e-2))})
    report = {"gammaC": cfg.gammaC, "gammaU": cfg.gammaU, "blocks": blocks,
              "all_within": all(b["within_5pct"] for b in blocks)}
    json_path = write_json(os.path.join(outdir, "transport_fits.json"), report)
    arts = [csv_path, json_path]
    if plots:
        arts.append(figures.decay_figure(
            os.path.join(outdir, "transport_decay.png"), np.exp(grid.b),
            res.probe_series[:, 0, :], fits=fits, labels=BLOCK_LABELS,
            title="transport block decay"))
    return report, arts


# ----------------------------------------------------------------- maxwell

def run_maxwell(cfg, outdir, plots=True):
    pair = cfg.pair()
    grid = cfg.char_grid()
    u0, v0 = maxwell_mod.gauge_compatible_data(grid, pair)
    gauge_run = maxwell_mod.maxwell_evolve(grid, pair, u0, v0,
                                           probe_a=cfg.probe_a)
    deep = CharGrid(b_min=min(grid.b_min, -26.0), b_max=grid.b_max,
                    n_b=max(grid.n_b, 2600), a_min=grid.a_core[0],
                    a_max=grid.a_max, lam=grid.lam)
    decay_run, fits = maxwell_mod.maxwell_decay_exponents(
        deep, pair, window=(2e-11, 2e-9))
    rows = [(float(np.exp(b)), float(gauge_run.gauge_series[j]))
            + tuple(float(x) for x in gauge_run.transport.sup_series[j])
            for j, b in enumerate(grid.b)]
    csv_path = write_csv(os.path.join(outdir, "maxwell_series.csv"),
                         ["rho_I", "gauge_residual", "sup_w0", "sup_w1",
                          "sup_we", "sup_wo"], rows)
    expected = [pair.gammaC, -pair.gammaU, 0.0, 0.0]
    report = {
        "gauge_relative_residual": gauge_run.gauge_relative,
        "S": maxwell_mod.maxwell_S3(pair).tolist(),
        "duality_residual": maxwell_mod.maxwell_duality_residual(pair),
        "exponents": [{"block": lbl, "fitted": f.exponent, "expected": e,
                       "within": bool(abs(f.exponent - e) <= 0.05)}
                      for lbl, f, e in zip(("w0", "w1", "we", "wo"),
                                           fits, expected)],
    }
    json_path = write_json(os.path.join(outdir, "maxwell_report.json"), report)
    arts = [csv_path, json_path]
    if plots:
        arts.append(figures.decay_figure(
            os.path.join(outdir, "maxwell_decay.png"), np.exp(deep.b),
            decay_run.transport.probe_series[:, 0, :], fits=fits,
            labels=["w0", "w1", "we", "wo"], title="Maxwell block decay"))
    return report, arts


# ------------------------------------------------------------------- bondi

def run_bondi(cfg, outdir, plots=True):
    pair = cfg.pair()
    grid = cfg.char_grid()
    bump = _bump(center=-1.7, width=0.5)
    eps = cfg.epsilon

    def data_v(a):
        out = np.zeros((a.size, tensors.DIM))
        out[:, 8] = eps * np.exp(-a) * bump(a) * 0.8
        out[:, 9] = eps * np.exp(-a) * bump(a) * 0.5
        out[:, 0] = eps * 0.2 * bump(a)
        return out

    pres = bondi_mod.picard_iterate(grid, pair, _zero10, data_v,
                                    n_iter=cfg.iterations,
                                    probe_a=cfg.probe_a)
    limits = bondi_mod.extract_leading(grid, pres.transport.history)
    record = bondi_mod.bondi_mass(limits, cfg.mass, pair.gammaU)
    check = bondi_mod.mass_loss_check(record)
    rows = list(zip(record.u_ret.tolist(), record.mass.tolist(),
                    record.news_flux.tolist(), record.residual.tolist()))
    csv_path = write_csv(os.path.join(outdir, "mass_record.csv"),
                         ["u", "M_B", "news_flux", "residual"], rows)
    rem = {k: (None if f is None else
               {"exponent": f.exponent, "residual": f.residual})
           for k, f in limits.remainder_exponents.items()}
    report = {
        "iterations": pres.iterations,
        "update_norms": pres.update_norms,
        "cy_limit_max": limits.cy_limit_max,
        "remainder_fits": rem,
        "mass_loss": check,
        "mass_nonincreasing": bool(np.all(np.diff(record.mass) <= 1e-12)),
    }
    json_path = write_json(os.path.join(outdir, "scri_limits.json"), report)
    arts = [csv_path, json_path]
    if plots:
        arts.append(figures.mass_figure(
            os.path.join(outdir, "bondi_mass.png"), record))
    return report, arts


# ------------------------------------------------------------------ verify

def run_verify(cfg, outdir, plots=False):
    checks = []
    rng = np.random.default_rng(cfg.seed)

    def add(name, value, tol, passed=None, mode="le"):
        if passed is None:
            passed = value <= tol if mode == "le" else value >= tol
        checks.append({"name": name, "value": float(value),
                       "tolerance": float(tol), "passed": bool(passed)})
        return passed

    pair = cfg.pair()

    # 1. matrix ledger
    A = tensors.build_A(pair)
    expected = tensors._spread(tensors.matrix_A7(pair))
    add("A_equals_closed_form", float(np.abs(A - expected).max()), 0.0,
        np.array_equal(A, expected))
    piC = tensors.pi_c_block(pair)
    evC = np.sort(np.real(tensors.spectrum(piC)))
    add("piC_spectrum", float(np.abs(
        evC - np.sort([2 * pair.gammaC, pair.gammaC, pair.gammaC])).max()), 1e-12)
    comp = tensors.pi_c_complement_block(pair)
    evU = np.sort(np.real(tensors.spectrum(comp)))
    add("complement_spectrum", float(np.abs(
        evU - np.sort([-pair.gammaU, -2 * pair.gammaU, -pair.gammaU, 0.0])).max()),
        1e-12)
    worst = 0.0
    for _ in range(100):
        gC = rng.uniform(0.05, 0.95)
        gU = -rng.uniform(0.01, min(gC * 0.999, 0.95))
        worst = max(worst, tensors.duality_residual(tensors.ModPair(gC, gU)))
    add("duality_residual_100", worst, 1e-12)

    # 2. projections and trace reversal
    u = rng.standard_normal(tensors.DIM)
    total = sum(tensors.project(w, u)
                for w in ("C", "Upsilon", "slashed0", "oneone"))
    add("projections_complete", float(np.abs(total - u).max()), 0.0,
        np.array_equal(total, u))
    G = tensors.trace_reversal_matrix()
    add("trace_reversal_involution", float(np.abs(G @ G - np.eye(10)).max()), 0.0,
        np.array_equal(G @ G, np.eye(10)))

    # 3. commutator identity
    worst = 0.0
    for n in (1, 2, 3, 4):
        L = rng.standard_normal((4, 4))
        Xs = [rng.standard_normal((4, 4)) for _ in range(n)]
        lhs, rhs = tensors.comm_expand(L, Xs)
        scale = max(np.abs(lhs).max(), 1.0)
        worst = max(worst, float(np.abs(lhs - rhs).max() / scale))
    add("commutator_expansion", worst, 1e-12)

    # 4. transport convergence order
    a0 = 0.37
    errs = []
    for nb in (150, 300):
        g = CharGrid(-6.0, -0.7, nb, a_min=-2.5, a_max=0.0)

        def phi(a):
            return np.exp(-0.5 * ((a + 1.2) / 0.4) ** 2)

        def dphi(a):
            return -(a + 1.2) / 0.16 * phi(a)

        r = transport_solve(
            g, A=np.array([[a0]]),
            data_u=lambda a: np.exp(a0 * g.b_max) * phi(a),
            data_v=lambda a: np.exp(a0 * g.b_max) * (dphi(a) - a0 * phi(a)))
        errs.append(np.abs(r.u[:, 0] - np.exp(a0 * g.b_min) * phi(g.a_core)).max())
    ratio = errs[0] / errs[1]
    add("transport_order2_ratio", ratio, 0.0, 3.5 <= ratio <= 4.5)

    # 5. wave exponent (quick)
    g = CharGrid(b_min=-14.0, b_max=-1.6, n_b=1100, a_min=-2.5, a_max=0.0)
    res = damped_wave_solve(g, mass=cfg.mass, gamma=pair.gammaC,
                            data_u=lambda a: np.zeros_like(a),
                            data_v=_bump(), probe_a=(-0.3,))
    fit = fit_probe_exponent(res, window=(2e-6, 2e-4))
    add("wave_exponent_error", abs(fit.exponent - pair.gammaC), 0.05)

    # 6. maxwell gauge + duality
    gm = CharGrid(b_min=-9.0, b_max=-0.8, n_b=700, a_min=-3.5, a_max=0.0)
    u0, v0 = maxwell_mod.gauge_compatible_data(gm, pair)
    mres = maxwell_mod.maxwell_evolve(gm, pair, u0, v0)
    add("maxwell_gauge_residual", mres.gauge_relative, 1e-6)
    add("maxwell_duality", maxwell_mod.maxwell_duality_residual(pair), 1e-12)

    # 7. bondi mass-loss (quick)
    gb = CharGrid(b_min=-10.0, b_max=-0.8, n_b=700, a_min=-3.0, a_max=0.0)
    bump = _bump(center=-1.7, width=0.5)

    def data_v(a):
        out = np.zeros((a.size, tensors.DIM))
        out[:, 8] = 0.05 * np.exp(-a) * bump(a) * 0.8
        out[:, 9] = 0.05 * np.exp(-a) * bump(a) * 0.5
        return out

    pres = bondi_mod.picard_iterate(gb, pair, _zero10, data_v, n_iter=6)
    limits = bondi_mod.extract_leading(gb, pres.transport.history)
    record = bondi_mod.bondi_mass(limits, cfg.mass, pair.gammaU)
    check = bondi_mod.mass_loss_check(record)
    add("bondi_mass_loss_residual", check["relative_residual"], 0.02)
    add("bondi_mass_nonincreasing", 0.0, 0.5,
        bool(np.all(np.diff(record.mass) <= 1e-12)))

    # 8. interpolation inequality on Fourier modes
    n = 128
    x = np.arange(n) * (2 * math.pi / n)
    worstC = 0.0
    for k in (1, 3, 9):
        worstC = max(worstC, interpolation_inequality_constant(
            np.cos(k * x), 0, 1, 2))
    add("interpolation_fourier_C", worstC, 1.0 + 1e-9)

    # 9. multiplier positivity
    coeffs = qbar_coefficients(**cfg.multiplier)
    add("qbar_positivity", -min(coeffs), 0.0, all(c > 0 for c in coeffs))

    # 10. linearization entry (quick)
    pt = chart.CompactPoint(0.8, math.sqrt(1e-3), theta=1.1, mass=cfg.mass)
    A_raw = gr_ops.extract_A(pt, cfg.mass, None, pair, subtract_baseline=False)
    add("linearize_A_entry_00", abs(A_raw[0, 0] - 2 * pair.gammaC), 1e-6)

    # 11. background curvature
    ric = float(np.abs(gr_ops.curvature(pt, cfg.mass, None).ricci_weighted()).max())
    add("schwarzschild_ricci", ric, 1e-9)

    all_passed = all(c["passed"] for c in checks)
    report = {"checks": checks, "all_passed": all_passed,
              "parameters": {"gammaC": cfg.gammaC, "gammaU": cfg.gammaU,
                             "mass": cfg.mass, "seed": cfg.seed}}
    path = write_json(os.path.join(outdir, "verify.json"), report)
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{status}] {c['name']}: value={c['value']:.3e} "
              f"tol={c['tolerance']:.3e}")
    return report, [path]


RUNNERS = {
    "spectra": run_spectra,
    "linearize-check": run_linearize_check,
    "tensor-ledger": run_tensor_ledger,
    "wave": run_wave,
    "transport": run_transport,
    "maxwell": run_maxwell,
    "bondi": run_bondi,
    "verify": run_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="scrilab",
        description="Numerical laboratory for constraint-damped evolution "
                    "near null infinity.")
    parser.add_argument("subcommand", choices=sorted(RUNNERS))
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", default=None,
                        help=f"output directory (env {ENV_PREFIX}OUT)")
    parser.add_argument("--deterministic", action="store_true",
                        help="force deterministic reductions and outputs")
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (env {ENV_PREFIX}THREADS); "
                             "deterministic runs are serial")
    plot = parser.add_mutually_exclusive_group()
    plot.add_argument("--plots", dest="plots", action="store_true",
                      default=None)
    plot.add_argument("--no-plots", dest="plots", action="store_false")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    outdir = args.out or os.environ.get(ENV_PREFIX + "OUT") or "out"
    threads = args.threads if args.threads is not None else \
        int(os.environ.get(ENV_PREFIX + "THREADS", "1"))
    try:
        cfg = load_config(args.config,
                          overrides={"deterministic": True}
                          if args.deterministic else None)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if cfg.deterministic:
        threads = 1
    del threads  # solvers are serial; the flag is accepted for forward compat
    plots = args.plots
    if plots is None:
        plots = args.subcommand != "verify"
    os.makedirs(outdir, exist_ok=True)
    try:
        report, artifacts = RUNNERS[args.subcommand](cfg, outdir, plots=plots)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverError,) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    except ScrilabError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    for art in artifacts:
        print(f"wrote {art}")
    failed = False
    if isinstance(report, dict):
        if report.get("all_passed") is False or report.get("all_within") is False:
            failed = True
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
