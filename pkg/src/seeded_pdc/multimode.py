"""Many independent downconverted pairs detected as two bucket arms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import BOUNDARY_TOL, PdcParams, TwoModeMoments, gamma_n, output_moments
from .detection import lossy_moments
from .errors import NotApplicable


@dataclass(frozen=True)
class MultimodeParams:
    """``n_modes`` pairs, either all equal to ``per_mode`` or listed in ``pairs``."""

    n_modes: int
    per_mode: Optional[PdcParams] = None
    pairs: Optional[tuple] = None

    def __post_init__(self):
        if self.pairs is not None:
            pairs = tuple(self.pairs)
            if not pairs or not all(isinstance(q, PdcParams) for q in pairs):
                raise ValueError("pairs must be a non-empty sequence of PdcParams")
            if self.n_modes != len(pairs):
                raise ValueError("n_modes must equal the number of listed pairs")
            object.__setattr__(self, "pairs", pairs)
        elif self.per_mode is None:
            raise ValueError("give either per_mode or pairs")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError(f"n_modes must be a positive integer, got {self.n_modes!r}")

    @classmethod
    def homogeneous(cls, n_modes: int, p: PdcParams) -> "MultimodeParams":
        return cls(int(n_modes), per_mode=p)

    @classmethod
    def heterogeneous(cls, pairs: Sequence[PdcParams]) -> "MultimodeParams":
        pairs = tuple(pairs)
        return cls(len(pairs), pairs=pairs)

    @property
    def is_homogeneous(self) -> bool:
        if self.pairs is None:
            return True
        first = self.pairs[0]
        return all(
            (q.mu1, q.mu2, q.muk) == (first.mu1, first.mu2, first.muk) for q in self.pairs
        )

    def iter_pairs(self):
        if self.pairs is not None:
            return iter(self.pairs)
        return iter((self.per_mode,) * self.n_modes)


@dataclass(frozen=True)
class WitnessResult:
    """Verdict of a nonclassicality inequality and its normalized margin.

    ``margin > 0`` means the inequality is violated; ``margin`` is ``None`` when
    both arms are empty.
    """

    violated: bool
    margin: Optional[float]

    @property
    def entangled(self) -> bool:
        return self.violated


def multimode_moments(mp: MultimodeParams) -> TwoModeMoments:
    """Arm totals; pairs are mutually independent so all second moments add."""
    if mp.pairs is None:
        one = output_moments(mp.per_mode)
        n = mp.n_modes
        return TwoModeMoments(
            n * one.n1, n * one.n2, n * one.var1, n * one.var2, n * one.cov12, n * one.varH
        )
    acc = [0.0] * 6
    for q in mp.pairs:
        m = output_moments(q)
        for i, v in enumerate((m.n1, m.n2, m.var1, m.var2, m.cov12, m.varH)):
            acc[i] += v
    return TwoModeMoments(*acc)


def _verdict(margin, tol):
    if margin is None:
        return WitnessResult(False, None)
    return WitnessResult(margin > tol, margin)


def multimode_snl_violation(mp: MultimodeParams, loss=None,
                            tol: float = BOUNDARY_TOL) -> WitnessResult:
    """Summed shot-noise test; margin is ``-sum(dH_i^2 - n1_i - n2_i) / sum(n1_i + n2_i)``.

    ``loss`` (a ``LossModel``) thins every pair equally before the test.
    """
    m = multimode_moments(mp)
    if loss is not None:
        m = lossy_moments(m, loss)
    total = m.n1 + m.n2
    margin = None if total <= 0.0 else 1.0 - m.varH / total
    return _verdict(margin, tol)


def multimode_witness(m: TwoModeMoments, n_modes: int,
                      tol: float = BOUNDARY_TOL) -> WitnessResult:
    """Intensity entanglement witness for ``n_modes`` identical pairs.

    Entangled when ``<dH^2> - (<n1> - <n2>)^2 / n_modes < <n1> + <n2>``.  The
    witness is only valid for homogeneous multimode states.
    """
    if int(n_modes) != n_modes or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes!r}")
    total = m.n1 + m.n2
    if total <= 0.0:
        return WitnessResult(False, None)
    margin = 1.0 - (m.varH - (m.n1 - m.n2) ** 2 / n_modes) / total
    return _verdict(margin, tol)


def multimode_negativity(mp: MultimodeParams) -> float:
    """Negativity parameter; only a single pair has one."""
    if mp.n_modes != 1:
        raise NotApplicable("the negativity parameter has no multimode form")
    return gamma_n(next(mp.iter_pairs()))
