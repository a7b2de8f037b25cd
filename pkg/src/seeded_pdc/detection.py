"""Lossy photodetection: moment maps, Bernoulli thinning and estimators."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import (
    GammaReport,
    PdcParams,
    Region,
    TwoModeMoments,
    classify_gammas,
    gammas_from_moments,
    output_moments,
)
from .errors import InsufficientData, UndefinedPointError

DEFAULT_BOOTSTRAP = 200


@dataclass(frozen=True)
class LossModel:
    """Equal transmission ``tau`` on both arms (propagation times efficiency)."""

    tau: float = 1.0
    # additive Poisson background per arm; kept for configuration, not used in tests
    dark_mean: float = 0.0

    def __post_init__(self):
        tau = float(self.tau)
        if not 0.0 <= tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {tau!r}")
        if self.dark_mean < 0.0:
            raise ValueError("dark_mean must be non-negative")
        object.__setattr__(self, "tau", tau)


def lossy_moments(m: TwoModeMoments, loss: LossModel) -> TwoModeMoments:
    """Moments after independent binomial thinning of each arm.

    ``<N> = tau <n>``, ``<N^2> = tau^2 <n^2> + tau (1 - tau) <n>`` and
    ``<N1 N2> = tau^2 <n1 n2>``.
    """
    t = loss.tau
    if t == 1.0:
        return m
    shot = t * (1.0 - t)
    return TwoModeMoments(
        n1=t * m.n1,
        n2=t * m.n2,
        var1=t * t * m.var1 + shot * m.n1,
        var2=t * t * m.var2 + shot * m.n2,
        cov12=t * t * m.cov12,
        varH=t * t * m.varH + shot * (m.n1 + m.n2),
    )


def gamma_with_loss(p: PdcParams, loss: LossModel) -> GammaReport:
    if p.is_origin:
        raise UndefinedPointError("gamma parameters are undefined at mu1 = mu2 = muk = 0")
    gc, gn, ge = gammas_from_moments(lossy_moments(output_moments(p), loss))
    return GammaReport(gc, gn, ge, classify_gammas(gc, gn, ge))


def thin_counts(k, l, loss: LossModel, seed: int):
    """Let every photon survive independently with probability ``tau``."""
    k = np.asarray(k, dtype=np.int64)
    l = np.asarray(l, dtype=np.int64)
    if loss.tau == 1.0 and loss.dark_mean == 0.0:
        return k.copy(), l.copy()
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(0x7A55,)))
    k_out = rng.binomial(k, loss.tau)
    l_out = rng.binomial(l, loss.tau)
    if loss.dark_mean > 0.0:
        k_out = k_out + rng.poisson(loss.dark_mean, size=k_out.shape)
        l_out = l_out + rng.poisson(loss.dark_mean, size=l_out.shape)
    return k_out.astype(np.int64), l_out.astype(np.int64)


@dataclass
class CountRecord:
    """Integer accumulators over detection events ``(k, l)``.

    Besides the five power sums the record keeps the joint histogram of events,
    which is what the bootstrap resamples.  Merging is exact and order-free.
    """

    trials: int = 0
    sum_k: int = 0
    sum_l: int = 0
    sum_kk: int = 0
    sum_ll: int = 0
    sum_kl: int = 0
    histogram: Counter = field(default_factory=Counter)

    @classmethod
    def from_counts(cls, k, l) -> "CountRecord":
        k = np.asarray(k, dtype=np.int64)
        l = np.asarray(l, dtype=np.int64)
        if k.shape != l.shape:
            raise ValueError("k and l must have the same shape")
        pairs, counts = np.unique(np.stack([k.ravel(), l.ravel()], axis=1), axis=0,
                                  return_counts=True)
        hist = Counter({(int(a), int(b)): int(c) for (a, b), c in zip(pairs, counts)})
        return cls._from_histogram(hist)

    @classmethod
    def _from_histogram(cls, hist: Counter) -> "CountRecord":
        rec = cls(histogram=hist)
        for (a, b), c in hist.items():
            rec.trials += c
            rec.sum_k += c * a
            rec.sum_l += c * b
            rec.sum_kk += c * a * a
            rec.sum_ll += c * b * b
            rec.sum_kl += c * a * b
        return rec

    def merge(self, other: "CountRecord") -> "CountRecord":
        return CountRecord._from_histogram(self.histogram + other.histogram)

    def __add__(self, other):
        return self.merge(other)

    def is_consistent(self) -> bool:
        if self.trials == 0:
            return self.sum_kk == self.sum_ll == 0
        # Cauchy-Schwarz on the integer sums
        return (
            self.trials * self.sum_kk >= self.sum_k ** 2
            and self.trials * self.sum_ll >= self.sum_l ** 2
            and sum(self.histogram.values()) == self.trials
        )

    def moments(self) -> TwoModeMoments:
        """Sample means and unbiased (``n - 1``) variances and covariance."""
        t = self.trials
        if t < 2:
            raise InsufficientData(f"need at least 2 events, got {t}")
        sum_h = self.sum_k - self.sum_l
        sum_hh = self.sum_kk + self.sum_ll - 2 * self.sum_kl
        # numerators kept as exact integers before the single division
        den = t * (t - 1)
        return TwoModeMoments(
            n1=self.sum_k / t,
            n2=self.sum_l / t,
            var1=(t * self.sum_kk - self.sum_k ** 2) / den,
            var2=(t * self.sum_ll - self.sum_l ** 2) / den,
            cov12=(t * self.sum_kl - self.sum_k * self.sum_l) / den,
            varH=(t * sum_hh - sum_h ** 2) / den,
        )


def _weighted_gammas(a, b, w, n_modes):
    """Gamma estimates for many weightings ``w`` (rows) of the same cells."""
    t = w.sum(axis=1)
    s_k, s_l = w @ a, w @ b
    h = a - b
    s_h, s_hh = w @ h, w @ (h * h)
    total = (s_k + s_l) / t
    diff = (s_k - s_l) / t
    var_h = (s_hh - s_h ** 2 / t) / (t - 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        gc = 1.0 - var_h / total
        gn = 1.0 - (var_h + diff ** 2) / total
        ge = 1.0 - (var_h - diff ** 2 / n_modes) / total
    return gc, gn, ge


def estimate_gammas(rec: CountRecord, n_modes: int = 1, n_boot: int = DEFAULT_BOOTSTRAP,
                    seed: int = 0) -> GammaReport:
    """Plug-in gamma estimates with bootstrap standard errors.

    Standard errors come from ``n_boot`` multinomial resamples of the event
    histogram.  For ``n_modes > 1`` the negativity estimate is not defined and
    is reported as ``None``.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if rec.trials < 2:
        raise InsufficientData(f"need at least 2 events, got {rec.trials}")
    gc, gn, ge = gammas_from_moments(rec.moments(), n_modes)
    if gc is None:
        return GammaReport(None, None, None, Region.UNDEFINED)

    cells = list(rec.histogram.items())
    a = np.array([kl[0] for kl, _ in cells], dtype=float)
    b = np.array([kl[1] for kl, _ in cells], dtype=float)
    freq = np.array([c for _, c in cells], dtype=float) / rec.trials
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(0xB007,)))
    w = rng.multinomial(rec.trials, freq, size=n_boot).astype(float)
    bc, bn, be = _weighted_gammas(a, b, w, n_modes)

    def spread(x):
        x = x[np.isfinite(x)]
        return float(np.std(x, ddof=1)) if len(x) > 1 else math.nan

    return GammaReport(
        gc, gn, ge, classify_gammas(gc, gn, ge),
        stderr_c=spread(bc),
        stderr_n=spread(bn) if gn is not None else None,
        stderr_e=spread(be),
    )
