"""Exact truncated Fock-space treatment of the two-mode squeezer.

The squeezer ``exp(r (e^{i phi} a1^dag a2^dag - e^{-i phi} a1 a2))`` commutes
with ``n1 - n2``, so it acts independently on each subspace of fixed photon
number difference ``d``.  With basis ``|m + d, m>`` (``d >= 0``) or
``|m, m - d>`` (``d < 0``) the generator is tridiagonal with couplings
``sqrt((m + |d| + 1)(m + 1))``.  A real symmetric eigendecomposition of that
tridiagonal matrix gives each block exactly; thermal seeds are diagonal in the
Fock basis so the output photon distribution only needs block columns.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .core import PdcParams, TwoModeMoments
from .errors import TruncationError

DEFAULT_TRACE_EPS = 1e-8
# tail mass allowed per arm when choosing a cutoff automatically
DEFAULT_TAIL = 1e-13
MAX_BLOCK_DEPTH = 8192
SAMPLE_CHUNK = 1 << 16


@dataclass(frozen=True)
class BlockUnitary:
    """``M x M`` leading corner of the squeezer restricted to difference ``d``.

    Row/column ``m`` is ``|m + d, m>`` for ``d >= 0`` and ``|m, m + |d|>``
    otherwise.  The output of input column ``j`` reaches up to roughly
    ``exp(2 r) j``, so only the leading ``interior`` columns are guaranteed
    (near-)unitary inside the corner.
    """

    d: int
    M: int
    matrix: np.ndarray
    interior: int

    def column_norms(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.matrix) ** 2, axis=0))

    def unitarity_defect(self, columns=None) -> float:
        cols = self.interior if columns is None else columns
        u = self.matrix[:, :cols]
        return float(np.max(np.abs(u.conj().T @ u - np.eye(cols))))


@dataclass(frozen=True)
class JointPhotonPmf:
    """Output joint photon-number distribution truncated to ``k, l < cutoff``."""

    probs: np.ndarray
    trace_defect: float

    @property
    def cutoff(self) -> int:
        return self.probs.shape[0]

    def marginals(self):
        return self.probs.sum(axis=1), self.probs.sum(axis=0)

    def moments(self) -> TwoModeMoments:
        """Moments of the (renormalized) truncated distribution."""
        p = self.probs / self.probs.sum()
        k = np.arange(self.cutoff, dtype=float)
        pk, pl = p.sum(axis=1), p.sum(axis=0)
        n1, n2 = k @ pk, k @ pl
        var1 = (k - n1) ** 2 @ pk
        var2 = (k - n2) ** 2 @ pl
        cov12 = (k - n1) @ p @ (k - n2)
        diff = k[:, None] - k[None, :]
        varH = np.sum((diff - (n1 - n2)) ** 2 * p)
        return TwoModeMoments(n1, n2, var1, var2, cov12, float(varH))


def _couplings(d: int, depth: int) -> np.ndarray:
    m = np.arange(depth - 1, dtype=float)
    return np.sqrt((m + abs(d) + 1.0) * (m + 1.0))


@lru_cache(maxsize=256)
def _block_spectrum(d: int, depth: int):
    """Eigenpairs of the real tridiagonal coupling matrix for one block."""
    w, v = eigh_tridiagonal(np.zeros(depth), _couplings(d, depth))
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def _block(r: float, phi: float, d: int, rows: int, cols: int, depth: int) -> np.ndarray:
    """``rows x cols`` corner of the block exponential computed at ``depth``.

    The generator is ``r D E (-i T) E^* D^*`` with ``T`` the real coupling
    matrix and ``D E = diag(exp(i m (phi + pi/2)))``.
    """
    if r == 0.0:
        return np.eye(rows, cols, dtype=complex)
    w, v = _block_spectrum(d, depth)
    core = (v[:rows] * np.exp(-1j * r * w)) @ v[:cols].T
    m = np.arange(max(rows, cols))
    ph = np.exp(1j * m * (phi + 0.5 * math.pi))
    return ph[:rows, None] * core * ph[None, :cols].conj()


def _block_probs(r: float, d: int, rows: int, cols: int, depth: int) -> np.ndarray:
    """``|<out|U|in>|^2`` for one block; the pump phase drops out."""
    if r == 0.0:
        return np.eye(rows, cols)
    w, v = _block_spectrum(d, depth)
    amp = (v[:rows] * np.exp(-1j * r * w)) @ v[:cols].T
    return amp.real ** 2 + amp.imag ** 2


def default_interior(r: float, M: int) -> int:
    """Leading columns of an ``M``-deep corner whose output stays inside it.

    Squeezing stretches photon numbers by up to ``exp(2 r)``; the extra factor
    of 4 leaves room for the spread of each column.
    """
    return max(1, min(M // 2, int(M * math.exp(-2.0 * r) / 4.0)))


def block_unitary(r: float, phi: float, d: int, M: int, tol: float = 1e-8,
                  interior: int | None = None) -> BlockUnitary:
    """Leading ``M x M`` corner of the squeezer block for difference ``d``.

    The exponential is evaluated at twice the requested depth so that the
    returned corner is not distorted by the truncation edge.  Raises
    ``TruncationError`` when the leading ``interior`` columns (default
    ``default_interior(r, M)``) lose more than ``tol`` of unitarity inside the
    corner.
    """
    if r < 0.0 or not math.isfinite(r):
        raise ValueError(f"r must be finite and non-negative, got {r!r}")
    if M < 2:
        raise ValueError("block depth M must be at least 2")
    u = _block(float(r), float(phi), int(d), M, M, 2 * M)
    if interior is None:
        interior = default_interior(r, M)
    block = BlockUnitary(int(d), int(M), u, int(interior))
    defect = block.unitarity_defect()
    if defect > tol:
        raise TruncationError(
            f"block d={d} at depth {M} has unitarity defect {defect:.3g} > {tol:g}",
            trace_defect=defect,
        )
    return block


def thermal_pmf(mu: float, size: int) -> np.ndarray:
    """``mu^n / (1 + mu)^(n+1)`` for ``n < size``."""
    n = np.arange(size)
    if mu == 0.0:
        out = np.zeros(size)
        out[0] = 1.0
        return out
    q = mu / (1.0 + mu)
    return np.exp(n * math.log(q)) / (1.0 + mu)


def thermal_tail_cutoff(mu: float, tail: float) -> int:
    """Smallest ``D`` with ``P(n >= D) = (mu / (1 + mu))^D < tail``."""
    if mu == 0.0:
        return 1
    q = mu / (1.0 + mu)
    return int(math.floor(math.log(tail) / math.log(q))) + 1


def auto_cutoff(p: PdcParams, tail: float = DEFAULT_TAIL) -> int:
    """Per-mode cutoff such that both output marginals have tail mass < ``tail``.

    The output arms are thermal with means ``n_j >= mu_j``, so this bound also
    covers the input seeds.
    """
    gain = p.muk * (1.0 + p.mu1 + p.mu2)
    return max(2, thermal_tail_cutoff(p.mu1 + gain, tail), thermal_tail_cutoff(p.mu2 + gain, tail))


def joint_pmf(p: PdcParams, cutoff: int | None = None, eps: float = DEFAULT_TRACE_EPS,
              workers: int = 1) -> JointPhotonPmf:
    """Exact output distribution ``P(k, l)`` for ``k, l < cutoff``.

    ``P(k, l) = sum p1(n) p2(m) |<k, l|U|n, m>|^2`` over inputs in the same
    difference block.  Raises ``TruncationError`` if the retained mass falls
    short of one by more than ``eps``.
    """
    C = auto_cutoff(p) if cutoff is None else int(cutoff)
    if C < 1:
        raise ValueError("cutoff must be positive")
    p1, p2 = thermal_pmf(p.mu1, C), thermal_pmf(p.mu2, C)
    r = p.r
    probs = np.zeros((C, C))

    def fill(d):
        n = C - abs(d)
        idx = np.arange(n)
        w = p1[idx + d] * p2[idx] if d >= 0 else p1[idx] * p2[idx - d]
        if not np.any(w):
            return d, None
        probs_d = _block_probs(r, d, n, n, 2 * n + 16)
        return d, probs_d @ w

    ds = range(-(C - 1), C)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(fill, ds))
    else:
        results = [fill(d) for d in ds]
    for d, out in results:
        if out is None:
            continue
        idx = np.arange(len(out))
        if d >= 0:
            probs[idx + d, idx] = out
        else:
            probs[idx, idx - d] = out

    defect = float(1.0 - probs.sum())
    if defect > eps:
        raise TruncationError(
            f"trace defect {defect:.3g} exceeds {eps:g} at cutoff {C}", trace_defect=defect
        )
    return JointPhotonPmf(probs, max(defect, 0.0))


class _BlockSampler:
    """Inverse-CDF tables for output draws within each difference block."""

    def __init__(self, r: float, eps: float = 1e-12):
        self.r = r
        self.eps = eps
        self._cdfs = {}

    def cdf(self, d: int, col_max: int) -> np.ndarray:
        tab = self._cdfs.get(d)
        if tab is not None and tab.shape[1] > col_max:
            return tab
        cols = max(col_max + 1, 8 if tab is None else 2 * tab.shape[1])
        rows = 2 * cols + 16
        while True:
            if 2 * rows > MAX_BLOCK_DEPTH:
                raise TruncationError(
                    f"sampled input column {col_max} in block d={d} needs depth beyond "
                    f"{MAX_BLOCK_DEPTH}"
                )
            probs = _block_probs(self.r, d, rows, cols, 2 * rows)
            cum = np.cumsum(probs, axis=0)
            missing = 1.0 - cum[-1]
            if np.all(missing < self.eps):
                break
            rows *= 2
        # leftover mass beyond the table is assigned to its last row
        cum[-1] = 1.0
        self._cdfs[d] = cum
        return cum

    def draw(self, n: np.ndarray, m: np.ndarray, u: np.ndarray):
        k = n.copy()
        l = m.copy()
        if self.r == 0.0:
            return k, l
        d = n - m
        j = np.minimum(n, m)
        for dv in np.unique(d):
            sel = np.flatnonzero(d == dv)
            js = j[sel]
            cum = self.cdf(int(dv), int(js.max()))
            for jv in np.unique(js):
                hit = sel[js == jv]
                i = np.searchsorted(cum[:, jv], u[hit], side="right")
                i = np.minimum(i, cum.shape[0] - 1)
                if dv >= 0:
                    k[hit], l[hit] = i + dv, i
                else:
                    k[hit], l[hit] = i, i - dv
        return k, l


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(chunk,)))


def _draw_thermal(rng, mu: float, size: int) -> np.ndarray:
    if mu == 0.0:
        return np.zeros(size, dtype=np.int64)
    return rng.geometric(1.0 / (1.0 + mu), size=size).astype(np.int64) - 1


def sample_counts(p: PdcParams, trials: int, seed: int, workers: int = 1,
                  return_inputs: bool = False):
    """Exact ancestral samples of output photon-number pairs.

    Inputs are drawn from the thermal seeds, then the output is drawn from the
    block column of the input.  Trials are split into fixed chunks, each with a
    generator spawned from ``(seed, chunk index)``, so the result does not depend
    on ``workers``.  Returns ``(k, l)`` int64 arrays, plus ``(n, m)`` inputs when
    ``return_inputs`` is set.
    """
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sampler = _BlockSampler(p.r)
    bounds = list(range(0, trials, SAMPLE_CHUNK)) + [trials]
    chunks = list(enumerate(zip(bounds[:-1], bounds[1:])))

    def draw_inputs(item):
        c, (lo, hi) = item
        rng = _chunk_rng(seed, c)
        size = hi - lo
        n = _draw_thermal(rng, p.mu1, size)
        m = _draw_thermal(rng, p.mu2, size)
        return n, m, rng.random(size)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            drawn = list(ex.map(draw_inputs, chunks))
    else:
        drawn = [draw_inputs(c) for c in chunks]
    n = np.concatenate([x[0] for x in drawn])
    m = np.concatenate([x[1] for x in drawn])
    u = np.concatenate([x[2] for x in drawn])
    # the CDF cache is filled serially; table contents depend only on (r, d)
    k, l = sampler.draw(n, m, u)
    if return_inputs:
        return k, l, n, m
    return k, l
