"""Plain-dict summaries behind each command-line subcommand.

Every number in these dicts comes straight from a library call; the command
line layer only formats and writes them.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict

import numpy as np

from .core import (
    BOUNDARY_TOL,
    PdcParams,
    Region,
    classify_gammas,
    gamma_report,
    gammas_from_moments,
    output_moments,
    thresholds,
)
from .detection import (
    CountRecord,
    LossModel,
    estimate_gammas,
    gamma_with_loss,
    lossy_moments,
    thin_counts,
)
from .fockspace import joint_pmf, sample_counts
from .gaussian import build_covariance, ppt_check
from .multimode import (
    MultimodeParams,
    multimode_moments,
    multimode_snl_violation,
    multimode_witness,
)

MOMENT_FIELDS = ("n1", "n2", "var1", "var2", "cov12", "varH")


def _params(p: PdcParams) -> dict:
    return {"mu1": p.mu1, "mu2": p.mu2, "muk": p.muk, "phi": p.phi}


def analytic_report(p: PdcParams, tau: float = 1.0):
    if p.is_origin:
        return gamma_report(p)
    if tau == 1.0:
        return gamma_report(p)
    return gamma_with_loss(p, LossModel(tau))


def gamma_summary(p: PdcParams, tau: float = 1.0) -> dict:
    rep = analytic_report(p, tau)
    th = thresholds(p.mu1, p.mu2)
    return {
        "command": "gamma",
        "inputs": {**_params(p), "tau": tau},
        "gamma_c": rep.gamma_c,
        "gamma_n": rep.gamma_n,
        "gamma_e": rep.gamma_e,
        "region": str(rep.region),
        "thresholds": asdict(th),
    }


def thresholds_summary(mu1: float, mu2: float) -> dict:
    return {"command": "thresholds", "inputs": {"mu1": mu1, "mu2": mu2}, **asdict(thresholds(mu1, mu2))}


def scan_rows(mu1s, mu2s, muks, tau: float = 1.0, n_modes: int = 1):
    """Yield ``(mu1, mu2, muk, gamma_c, gamma_n, gamma_e, region)`` in lexicographic order.

    For ``n_modes > 1`` the negativity column is ``None`` and the entanglement
    column is the multimode witness margin.
    """
    loss = LossModel(tau)
    for mu1, mu2, muk in itertools.product(mu1s, mu2s, muks):
        p = PdcParams(mu1, mu2, muk)
        if p.is_origin:
            yield (mu1, mu2, muk, None, None, None, Region.UNDEFINED)
            continue
        if n_modes == 1:
            rep = analytic_report(p, tau)
            yield (mu1, mu2, muk, rep.gamma_c, rep.gamma_n, rep.gamma_e, rep.region)
            continue
        m = lossy_moments(multimode_moments(MultimodeParams.homogeneous(n_modes, p)), loss)
        gc, gn, ge = gammas_from_moments(m, n_modes)
        yield (mu1, mu2, muk, gc, gn, ge, classify_gammas(gc, gn, ge))


def simulate(p: PdcParams, tau: float, trials: int, seed: int, n_modes: int = 1,
             n_boot: int = 200, workers: int = 1):
    """Sample, thin and estimate; returns ``(summary, k, l)``."""
    if n_modes == 1:
        k, l = sample_counts(p, trials, seed, workers=workers)
    else:
        k, l = sample_counts(p, trials * n_modes, seed, workers=workers)
        k = k.reshape(trials, n_modes).sum(axis=1)
        l = l.reshape(trials, n_modes).sum(axis=1)
    k, l = thin_counts(k, l, LossModel(tau), seed)
    rec = CountRecord.from_counts(k, l)
    est = estimate_gammas(rec, n_modes=n_modes, n_boot=n_boot, seed=seed)
    mom = rec.moments()
    if p.is_origin:
        target = (None, None, None, Region.UNDEFINED)
    else:
        mm = lossy_moments(multimode_moments(MultimodeParams.homogeneous(n_modes, p)),
                           LossModel(tau))
        gc, gn, ge = gammas_from_moments(mm, n_modes)
        target = (gc, gn, ge, classify_gammas(gc, gn, ge))
    summary = {
        "command": "simulate",
        "inputs": {**_params(p), "tau": tau, "n_modes": n_modes},
        "trials": int(trials),
        "seed": int(seed),
        "gamma_c": est.gamma_c,
        "gamma_n": est.gamma_n,
        "gamma_e": est.gamma_e,
        "stderr_c": est.stderr_c,
        "stderr_n": est.stderr_n,
        "stderr_e": est.stderr_e,
        "region": str(est.region),
        "mean_n1": mom.n1,
        "mean_n2": mom.n2,
        "mean_difference": mom.n1 - mom.n2,
        "stderr_difference": math.sqrt(mom.varH / rec.trials),
        "analytic": {
            "gamma_c": target[0],
            "gamma_n": target[1],
            "gamma_e": target[2],
            "region": str(target[3]),
            "mean_difference": tau * n_modes * (p.mu1 - p.mu2),
        },
    }
    return summary, k, l


def _close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * abs(a) + 1e-12


def oracle_summary(p: PdcParams, cutoff=None, moment_rtol: float = 1e-6,
                   gamma_tol: float = 1e-6) -> dict:
    """Analytic model against the Fock and Gaussian oracles."""
    analytic = output_moments(p)
    pmf = joint_pmf(p, cutoff)
    fock = pmf.moments()
    moment_ok = all(
        _close(getattr(analytic, f), getattr(fock, f), moment_rtol) for f in MOMENT_FIELDS
    )
    rep = gamma_report(p)
    fock_g = gammas_from_moments(fock)
    if rep.gamma_c is None:
        gamma_ok = all(g is None for g in fock_g)
    else:
        gamma_ok = all(abs(a - b) <= gamma_tol for a, b in zip(rep.as_tuple(), fock_g))
    ppt = ppt_check(build_covariance(p))
    entangled_by_gamma = rep.gamma_e is not None and rep.gamma_e > BOUNDARY_TOL
    return {
        "command": "oracle",
        "inputs": {**_params(p), "cutoff": pmf.cutoff},
        "analytic_moments": {f: getattr(analytic, f) for f in MOMENT_FIELDS},
        "fock_moments": {f: getattr(fock, f) for f in MOMENT_FIELDS},
        "moment_deltas": {f: getattr(fock, f) - getattr(analytic, f) for f in MOMENT_FIELDS},
        "gamma_c": rep.gamma_c,
        "gamma_n": rep.gamma_n,
        "gamma_e": rep.gamma_e,
        "region": str(rep.region),
        "fock_gamma_c": fock_g[0],
        "fock_gamma_n": fock_g[1],
        "fock_gamma_e": fock_g[2],
        "trace_defect": pmf.trace_defect,
        "nu_minus": ppt.nu_minus,
        "ppt_entangled": ppt.entangled,
        "gamma_e_entangled": entangled_by_gamma,
        "checks": {
            "moments": moment_ok,
            "gammas": gamma_ok,
            "ppt_agrees": ppt.entangled == entangled_by_gamma,
        },
        "passed": moment_ok and gamma_ok and ppt.entangled == entangled_by_gamma,
    }


def multimode_summary(n_modes: int, p: PdcParams, tau: float = 1.0) -> dict:
    loss = LossModel(tau)
    mp = MultimodeParams.homogeneous(n_modes, p)
    m = lossy_moments(multimode_moments(mp), loss)
    wit = multimode_witness(m, n_modes)
    naive = multimode_witness(m, 1)
    single = multimode_witness(lossy_moments(output_moments(p), loss), 1)
    snl = multimode_snl_violation(mp, loss)
    invariant = (
        wit.margin is None and single.margin is None
        or wit.margin is not None and single.margin is not None
        and abs(wit.margin - single.margin) <= 1e-12
    )
    return {
        "command": "multimode",
        "inputs": {**_params(p), "tau": tau, "n_modes": n_modes},
        "witness_margin": wit.margin,
        "entangled": wit.violated,
        "single_pair_margin": single.margin,
        "n_invariant": bool(invariant),
        "naive_margin": naive.margin,
        "naive_entangled": naive.violated,
        "snl_margin": snl.margin,
        "snl_violated": snl.violated,
    }


def events_table(k: np.ndarray, l: np.ndarray):
    return zip(k.tolist(), l.tolist())
