"""Acceptance criteria, one test each, run at their stated tolerances.

Each test records a one-line outcome; the summary hook in conftest prints
them as ``criterion N: PASS|FAIL  detail`` after the run.
"""
import math
import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from conftest import ACCEPTANCE
from ep_blowup import cli, criterion, dynamics, sweep, verification
from ep_blowup.dynamics import BLOWUP, MARGINAL, SMOOTH, TWO_PI, InitialDatum
from ep_blowup.profiles import GaussianPulse, radial_grid

SEED = 20240601


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _random_fg(seed, n):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        F0, G0 = rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 0.24)
        if (F0, G0) != (0.0, 0.0):
            out.append((float(F0), float(G0)))
    return out


def test_01_period():
    t0 = time.perf_counter()
    errs = [abs(dynamics.measure_period(F0, G0).period - TWO_PI) for F0, G0 in _random_fg(SEED, 200)]
    dt = time.perf_counter() - t0
    record(1, max(errs) < 1e-6 and dt < 30,
           f"200 data, max |T - 2pi| = {max(errs):.2e} (< 1e-6), {dt:.1f} s (< 30 s)")


def test_02_conservation():
    data = verification.sample_data(SEED + 2, 100)
    checks = [verification.check_conservation(d, periods=10) for d in data]
    c4 = max(c.C4_drift for c in checks)
    rg = max(c.r4M2_drift for c in checks)
    record(2, c4 < 1e-8 and rg < 1e-8,
           f"100 data over 10 periods, drift C4 {c4:.2e}, r^4(1-4G) {rg:.2e} (< 1e-8)")


def test_03_radon():
    errs = [verification.check_radon(d) for d in verification.sample_data(SEED + 3, 500)]
    record(3, max(errs) < 1e-6, f"500 data, max Riccati vs p/q error {max(errs):.2e} (< 1e-6)")


@pytest.fixture(scope="module")
def criterion4_runs():
    t0 = time.perf_counter()
    data = verification.sample_data(SEED + 4, 10_000)
    runs = [verification.check_closed_form(d) for d in data]
    return runs, time.perf_counter() - t0


def test_04_criterion_vs_oracle(criterion4_runs):
    runs, dt = criterion4_runs
    kept = [r for r in runs if abs(r.q_star_closed) > 1e-3]
    agree = sum(r.closed_kind == r.oracle_kind for r in kept) / len(kept)
    smooth_err = max((r.q_error for r in kept if r.oracle_kind == SMOOTH), default=0.0)
    record(4, agree >= 0.999 and smooth_err < 1e-6 and dt < 300,
           f"{len(kept)} of 10000 data with |q*| > 1e-3, agreement {agree:.4%} (>= 99.9%), "
           f"Smooth q sup-error {smooth_err:.2e} (< 1e-6), {dt:.0f} s (< 300 s)")


@pytest.fixture(scope="module")
def harmonic_grid():
    u = sweep.cell_centers(-2.0, 2.0, 40)
    v = sweep.cell_centers(-2.0, 0.95, 40)
    cells = [(a, b) for a in u for b in v]
    verdicts = [criterion.classify(InitialDatum(0, 0, a, b)) for a, b in cells]
    return cells, verdicts


def test_05_harmonic(harmonic_grid):
    rng = np.random.default_rng(SEED + 5)
    pairs = [(a, b) for a, b in rng.uniform(-1.5, 1.5, (300, 2)) if b < 1.0][:200]
    err = max(verification.check_harmonic(a, b) for a, b in pairs)
    cells, verdicts = harmonic_grid
    wrong = 0
    for (u0, v0), v in zip(cells, verdicts):
        s = u0 * u0 + 2 * v0 - 1
        expect = SMOOTH if s < 0 else BLOWUP
        if v.kind != MARGINAL and v.kind != expect:
            wrong += 1
        # oracle side of the boundary as well
        if abs(s) > 1e-3 and dynamics.oracle_classify(InitialDatum(0, 0, u0, v0)).kind != expect:
            wrong += 1
    record(5, err < 1e-9 and wrong == 0,
           f"q vs exact sup-error {err:.2e} (< 1e-9); {len(cells)} grid cells, "
           f"{wrong} off the boundary u0^2 + 2 v0 = 1")


@pytest.fixture(scope="module")
def gaussian_scans():
    t0 = time.perf_counter()
    scans = {a: sweep.scan_radial(GaussianPulse(a), radial_grid(6.0, 0.05))
             for a in (0.05, 0.1, 0.2, 0.24)}
    return scans, time.perf_counter() - t0


def test_06_gaussian(gaussian_scans):
    scans, dt = gaussian_scans
    verdicts = {a: s.global_verdict for a, s in scans.items()}
    ok = all(v == SMOOTH for v in verdicts.values()) and dt < 60
    record(6, ok, f"global verdicts {verdicts}, {dt:.1f} s (< 60 s)")


def test_07_blowup_time_bound(criterion4_runs, harmonic_grid, gaussian_scans):
    times = [r.t_star for r in criterion4_runs[0] if r.oracle_kind == BLOWUP]
    times += [v.t_star for v in harmonic_grid[1] if v.kind == BLOWUP]
    for s in gaussian_scans[0].values():
        times += [t for t, v in zip(s.t_star, s.verdict) if v == BLOWUP]
    bad = [t for t in times if not (0 < t < TWO_PI)]
    record(7, times and not bad,
           f"{len(times)} BlowUp verdicts, {len(bad)} with t* outside (0, 2pi)")


def test_08_small_data():
    data = verification.sample_small(SEED + 8, 1000, radius=0.05)
    kinds = [criterion.classify(d, with_time=False).kind for d in data]
    n = sum(k == SMOOTH for k in kinds)
    record(8, n == 1000, f"{n} of 1000 data with sup-norm <= 0.05 classify Smooth")


def test_09_sabatini():
    iso = [d for d in range(1, 11) if criterion.sabatini_isochronous(d)[1]]
    record(9, iso == [1, 4], f"isochronous dimensions in 1..10: {iso}")


def _eta_blows_up(dV, dE):
    # 1/n along a one-dimensional characteristic obeys eta'' = 1 - eta
    eta0 = 1.0 / (1.0 - dE)

    def hit(t, y):
        return y[0]
    hit.terminal, hit.direction = True, -1
    sol = solve_ivp(lambda t, y: [y[1], 1.0 - y[0]], (0, TWO_PI), [eta0, dV * eta0],
                    method="DOP853", rtol=1e-11, atol=1e-12, max_step=0.01, events=hit)
    return sol.t_events[0].size > 0


def test_10_d1_criterion():
    dVs = sweep.cell_centers(-2.0, 2.0, 50)
    dEs = sweep.cell_centers(-2.0, 0.9, 50)
    sign_miss = oracle_miss = 0
    for a in dVs:
        for b in dEs:
            s = a * a + 2 * b - 1
            expect = SMOOTH if s < 0 else BLOWUP
            sign_miss += criterion.criterion_d1(a, b) != expect
            if abs(s) > 1e-6:
                oracle_miss += (BLOWUP if _eta_blows_up(a, b) else SMOOTH) != expect
    record(10, sign_miss == 0 and oracle_miss == 0,
           f"50x50 grid: {sign_miss} cells off the sign rule, "
           f"{oracle_miss} off the integrated one-dimensional flow")


def test_11_zero_field():
    req = sweep.ScanRequest("zero-field", (-2, 2), (-2, 2), 100, method="oracle")
    res = sweep.scan_plane(req, with_time=False)
    agree = total = 0
    for i, F0 in enumerate(res.x):
        for j, div in enumerate(res.y):
            oracle = res.verdict[i, j]
            zf = criterion.criterion_zero_field(F0, div)
            if oracle == MARGINAL or abs(zf.margin) <= dynamics.DEFAULT_MARGIN:
                continue
            total += 1
            agree += zf.verdict == oracle
    frac = agree / total
    # the F0 = 0 column on the same divV0 cells
    h = res.y[1] - res.y[0]
    col = [dynamics.oracle_classify(sweep.plane_datum("zero-field", 0.0, y)).kind for y in res.y]
    smooth = res.y[[k == SMOOTH for k in col]]
    edge = max(abs(smooth.min() + 1), abs(smooth.max() - 1))
    record(11, frac >= 0.999 and edge <= h,
           f"{total} non-marginal cells, agreement {frac:.4%} (>= 99.9%); "
           f"F0 = 0 frontier off |divV0| = 1 by {edge:.3f} (cell {h:.3f})")


def test_12_figure1_frontier():
    led = verification.frontier_ledger(resolution=200)
    populated = all(led.get(k) is not None for k in
                    ("slope", "intercept", "oracle_selects", "summary"))
    ok = populated and led["max_residual_cells"] <= 1.0
    record(12, ok, f"slope {led['slope']:.4f}, intercept {led['intercept']:.4f}, "
                   f"residual {led['max_residual_cells']:.2f} cells (<= 1), "
                   f"oracle selects the {led['oracle_selects']} line")


def test_13_determinism(tmp_path):
    outs = {}
    for w in (1, 4):
        rep = tmp_path / f"verify{w}.txt"
        grid = tmp_path / f"scan{w}.csv"
        assert cli.run(["verify", "--seed", "11", "--cases", "60", "--frontier-resolution", "24",
                        "--workers", str(w), "--out", str(rep)]) == 0
        assert cli.run(["scan", "--plane", "zero-field", "--x", "-2:2:24", "--y", "-2:2:24",
                        "--method", "both", "--workers", str(w), "--out", str(grid)]) == 0
        outs[w] = [p.read_bytes() for p in (rep, rep.with_name(rep.name + ".json"), grid,
                                            grid.with_name(grid.name + ".summary.json"))]
    same = outs[1] == outs[4]
    record(13, same, "verify and scan outputs byte-identical across 1 and 4 workers"
           if same else "outputs differ between 1 and 4 workers")
