"""Acceptance criteria, one check per criterion.

Each ``check_*`` returns ``(passed, detail)``.  Under pytest the verdicts are
printed as one PASS/FAIL line per criterion at the end of the module; running
this file directly prints the same lines.
"""
import contextlib
import csv
import io
import math
import time

import numpy as np
import pytest

from seeded_pdc import cli
from seeded_pdc.core import (
    PdcParams,
    Region,
    gamma_report,
    output_moments,
    thresholds,
)
from seeded_pdc.detection import LossModel, gamma_with_loss
from seeded_pdc.fockspace import block_unitary, joint_pmf, thermal_tail_cutoff
from seeded_pdc.gaussian import build_covariance, ppt_check
from seeded_pdc.multimode import MultimodeParams, multimode_moments, multimode_witness
from seeded_pdc.reports import simulate

FIELDS = ("n1", "n2", "var1", "var2", "cov12", "varH")

GRID_MU = np.linspace(0, 3, 50)
GRID_MUK = np.linspace(0, 1, 25)

# nesting: each region implies all weaker ones
IMPLIED = {
    Region.SEPARABLE: set(),
    Region.ENTANGLED_ONLY: {"entangled"},
    Region.ENTANGLED_SUBSHOT: {"entangled", "subshot"},
    Region.ENTANGLED_SUBSHOT_NEGATIVE: {"entangled", "subshot", "negative"},
}


def grid_points():
    for mu1 in GRID_MU:
        for mu2 in GRID_MU:
            for muk in GRID_MUK:
                p = PdcParams(mu1, mu2, muk)
                if not p.is_origin:
                    yield p


def check_twin_beam():
    worst = 0.0
    for muk in np.linspace(0.1, 2.0, 20):
        rep = gamma_report(PdcParams(0, 0, muk))
        worst = max(worst, *(abs(g - 1.0) for g in rep.as_tuple()))
    return worst <= 1e-12, f"max |gamma - 1| = {worst:.2e} over 20 gains"


def check_hierarchy():
    order_viol = nest_viol = 0
    gap_err = 0.0
    for p in grid_points():
        rep = gamma_report(p)
        gc, gn, ge = rep.as_tuple()
        tol = 1e-12
        if not (ge >= gc - tol and gc >= gn - tol):
            order_viol += 1
        flags = {name for name, g in (("entangled", ge), ("subshot", gc), ("negative", gn))
                 if g > 1e-12}
        if flags != IMPLIED[rep.region]:
            nest_viol += 1
        gap = (p.mu1 - p.mu2) ** 2 / (2 * p.muk * (1 + p.mu1 + p.mu2) + p.mu1 + p.mu2)
        gap_err = max(gap_err, abs(ge - gc - gap), abs(gc - gn - gap))
    ok = order_viol == 0 and nest_viol == 0 and gap_err <= 1e-12
    return ok, (f"ordering violations {order_viol}, nesting violations {nest_viol}, "
                f"max gap error {gap_err:.2e}")


def check_threshold_collapse():
    spread = 0.0
    for mu in np.linspace(0, 3, 20):
        t = thresholds(mu, mu)
        spread = max(spread, max(t.muk_n, t.muk_c, t.muk_e) - min(t.muk_n, t.muk_c, t.muk_e))
    strict_fail = 0
    for mu1 in GRID_MU:
        for mu2 in GRID_MU:
            if mu1 != mu2:
                t = thresholds(mu1, mu2)
                strict_fail += not (t.muk_n > t.muk_c > t.muk_e)
    ok = spread <= 1e-12 and strict_fail == 0
    return ok, f"equal-seed spread {spread:.2e}, strict ordering failures {strict_fail}"


def check_loss_rescaling():
    rng = np.random.default_rng(2024)
    draws = np.column_stack([rng.uniform(0, 3, 1000), rng.uniform(0, 3, 1000),
                             rng.uniform(0, 2, 1000), rng.uniform(0, 1, 1000)])
    err = 0.0
    region_changes = 0
    for mu1, mu2, muk, tau in draws:
        p = PdcParams(mu1, mu2, muk)
        base = gamma_report(p)
        lossy = gamma_with_loss(p, LossModel(tau))
        err = max(err, *(abs(a - tau * b) for a, b in zip(lossy.as_tuple(), base.as_tuple())))
        for t in (0.1, 0.5, 0.9, 1.0):
            region_changes += gamma_with_loss(p, LossModel(t)).region is not base.region
    ok = err <= 1e-12 and region_changes == 0
    return ok, f"max rescaling error {err:.2e}, region changes {region_changes}"


def check_gaussian_oracle():
    mismatches = checked = 0
    for p in grid_points():
        ge = gamma_report(p).gamma_e
        if abs(ge) < 1e-9:
            continue
        checked += 1
        mismatches += ppt_check(build_covariance(p)).entangled != (ge > 0)
    nu_err = 0.0
    for muk in np.linspace(0.1, 2.0, 20):
        expected = 0.5 * (math.sqrt(muk + 1) - math.sqrt(muk)) ** 2
        nu_err = max(nu_err, abs(ppt_check(build_covariance(PdcParams(0, 0, muk))).nu_minus
                                 - expected))
    ok = mismatches == 0 and nu_err <= 1e-10
    return ok, f"{mismatches} PPT mismatches in {checked} points, twin-beam nu_minus error {nu_err:.2e}"


def fock_points():
    corners = [(0, 0, 0.5), (1.5, 1.5, 0.5), (1.5, 0, 0.5), (0, 1.5, 0.25), (0.7, 0.7, 0.01)]
    rng = np.random.default_rng(6)
    rand = np.column_stack([rng.uniform(0, 1.5, 10), rng.uniform(0, 1.5, 10),
                            rng.uniform(0, 0.5, 10)])
    return [PdcParams(*c) for c in corners] + [PdcParams(*row) for row in rand]


def check_fock_oracle():
    t0 = time.perf_counter()
    moment_err = trace = unitarity = 0.0
    for p in fock_points():
        pmf = joint_pmf(p)
        trace = max(trace, pmf.trace_defect)
        fock, exact = pmf.moments(), output_moments(p)
        for f in FIELDS:
            a, b = getattr(fock, f), getattr(exact, f)
            moment_err = max(moment_err, abs(a - b) / max(abs(b), 1e-300) if b else abs(a))
        # columns for every input photon number carrying more than 1e-13 of the mass
        cols = max(thermal_tail_cutoff(p.mu1, 1e-13), thermal_tail_cutoff(p.mu2, 1e-13), 2)
        depth = int(math.ceil(2 * cols * math.exp(2 * p.r))) + 16
        for d in (0, 1, -1, cols // 2, -(cols // 2)):
            blk = block_unitary(p.r, p.phi, d, depth, tol=1.0, interior=cols)
            unitarity = max(unitarity, blk.unitarity_defect())
    elapsed = time.perf_counter() - t0
    ok = moment_err <= 1e-6 and trace < 1e-8 and unitarity < 1e-8 and elapsed < 60
    return ok, (f"moment rel error {moment_err:.2e}, trace defect {trace:.2e}, "
                f"unitarity defect {unitarity:.2e}, {elapsed:.1f} s")


def check_monte_carlo():
    p = PdcParams(2, 0, 1)
    lines = []
    ok = True
    for tau in (1.0, 0.5):
        hits = {"gamma_c": 0, "gamma_e": 0, "difference": 0}
        for seed in range(20):
            s, _, _ = simulate(p, tau, 100000, seed)
            target = s["analytic"]
            hits["gamma_c"] += abs(s["gamma_c"] - target["gamma_c"]) <= 3 * s["stderr_c"]
            hits["gamma_e"] += abs(s["gamma_e"] - target["gamma_e"]) <= 3 * s["stderr_e"]
            hits["difference"] += (abs(s["mean_difference"] - target["mean_difference"])
                                   <= 3 * s["stderr_difference"])
        ok &= all(h >= 19 for h in hits.values())
        lines.append(f"tau={tau}: " + ", ".join(f"{k} {v}/20" for k, v in hits.items()))
    return ok, "; ".join(lines)


def check_multimode():
    rng = np.random.default_rng(8)
    drift = 0.0
    for mu1, mu2, muk in rng.uniform(0, 3, size=(200, 3)):
        p = PdcParams(mu1, mu2, muk)
        ge = gamma_report(p).gamma_e
        for n in (1, 2, 10, 100):
            m = multimode_moments(MultimodeParams.homogeneous(n, p))
            drift = max(drift, abs(multimode_witness(m, n).margin - ge))
    disagree = 0
    for p in grid_points():
        if p.mu1 == p.mu2:
            continue
        m = multimode_moments(MultimodeParams.homogeneous(10, p))
        disagree += multimode_witness(m, 10).violated != multimode_witness(m, 1).violated
    ok = drift <= 1e-12 and disagree >= 1
    return ok, f"max margin drift {drift:.2e}, naive witness disagrees at {disagree} points"


def scan_csv(*args):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main(["scan", "--mu1", "0:3:0.1", "--mu2", "0:3:0.1", *args])
    assert code == 0
    return {(r["mu1"], r["mu2"]): r for r in csv.DictReader(io.StringIO(buf.getvalue()))}


def check_figures():
    keys = ("gamma_c", "gamma_n", "gamma_e")
    low, high = scan_csv("--muk", "0.3"), scan_csv("--muk", "1")
    order_fail = sum(
        float(high[k][g]) < float(low[k][g]) for k in low for g in keys
    )
    full, half = low, scan_csv("--muk", "0.3", "--tau", "0.5")
    scale_err = max(
        abs(float(half[k][g]) - 0.5 * float(full[k][g])) for k in full for g in keys
    )
    ok = order_fail == 0 and scale_err <= 1e-11 and len(low) == 31 * 31
    return ok, (f"{len(low)} grid points, surface ordering failures {order_fail}, "
                f"max |gamma(0.5) - gamma(1)/2| {scale_err:.1e}")


CRITERIA = {
    1: ("twin-beam maximality", check_twin_beam),
    2: ("hierarchy and nesting", check_hierarchy),
    3: ("threshold collapse", check_threshold_collapse),
    4: ("loss rescaling", check_loss_rescaling),
    5: ("Gaussian oracle agreement", check_gaussian_oracle),
    6: ("Fock oracle agreement", check_fock_oracle),
    7: ("Monte Carlo consistency", check_monte_carlo),
    8: ("multimode reduction", check_multimode),
    9: ("figure data", check_figures),
}

_results = {}


@pytest.fixture(scope="module", autouse=True)
def report(request):
    yield
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    if tr is None:
        return
    tr.write_line("")
    for n in sorted(_results):
        ok, detail = _results[n]
        tr.write_line(f"criterion {n} ({CRITERIA[n][0]}): {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, detail = CRITERIA[number][1]()
    _results[number] = (ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for n, (name, fn) in CRITERIA.items():
        ok, detail = fn()
        print(f"criterion {n} ({name}): {'PASS' if ok else 'FAIL'} - {detail}")
