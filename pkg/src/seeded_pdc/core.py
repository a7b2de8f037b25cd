"""Closed-form moments and nonclassicality parameters of thermally seeded PDC.

The two output modes of a parametric amplifier seeded by independent thermal
fields with mean photon numbers ``mu1``, ``mu2`` are each thermal with mean
``mu_j + muk (1 + mu1 + mu2)``.  Three dimensionless parameters quantify how
far the pair is from classical behaviour:

* ``gamma_c``: sub-shot-noise reduction of the difference photocurrent,
* ``gamma_n``: the two-mode negative P-function criterion,
* ``gamma_e``: the intensity form of the PPT entanglement condition.

Each is positive exactly when the corresponding nonclassicality is present and
equals 1 for the vacuum-seeded twin beam.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import UndefinedPointError

#: Values of a gamma parameter within this distance of zero count as classical.
BOUNDARY_TOL = 1e-12

TWO_PI = 2.0 * math.pi


def _check_nonneg(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise ValueError(f"{name} must be finite and non-negative, got {value!r}")
    return value


@dataclass(frozen=True)
class PdcParams:
    """Operating point of the seeded downconverter.

    ``mu1``/``mu2`` are the mean photon numbers of the thermal seeds, ``muk``
    the spontaneous-emission mean photon number ``sinh(r)**2`` and ``phi`` the
    pump phase (normalized to ``[0, 2*pi)``).
    """

    mu1: float
    mu2: float
    muk: float
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mu1", _check_nonneg("mu1", self.mu1))
        object.__setattr__(self, "mu2", _check_nonneg("mu2", self.mu2))
        object.__setattr__(self, "muk", _check_nonneg("muk", self.muk))
        phi = float(self.phi)
        if not math.isfinite(phi):
            raise ValueError(f"phi must be finite, got {phi!r}")
        phi = math.fmod(phi, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "phi", phi)

    @property
    def r(self) -> float:
        """Squeezing magnitude, ``arcsinh(sqrt(muk))``."""
        return math.asinh(math.sqrt(self.muk))

    @property
    def alpha(self) -> float:
        return math.sqrt(1.0 + self.muk)

    @property
    def beta(self) -> float:
        return math.sqrt(self.muk)

    @property
    def is_origin(self) -> bool:
        return self.mu1 == 0.0 and self.mu2 == 0.0 and self.muk == 0.0

    def swapped(self) -> "PdcParams":
        return PdcParams(self.mu2, self.mu1, self.muk, self.phi)


@dataclass(frozen=True)
class TwoModeMoments:
    """First and second moments of the photon numbers of the two arms."""

    n1: float
    n2: float
    var1: float
    var2: float
    cov12: float
    varH: float

    @property
    def total(self) -> float:
        return self.n1 + self.n2

    @property
    def difference(self) -> float:
        return self.n1 - self.n2

    @property
    def second_moments(self):
        """Raw moments ``(<n1^2>, <n2^2>, <n1 n2>)``."""
        return (
            self.var1 + self.n1 * self.n1,
            self.var2 + self.n2 * self.n2,
            self.cov12 + self.n1 * self.n2,
        )


class Region(str, enum.Enum):
    """Nested nonclassicality regions; each implies the ones listed before it."""

    SEPARABLE = "Separable"
    ENTANGLED_ONLY = "EntangledOnly"
    ENTANGLED_SUBSHOT = "EntangledSubshot"
    ENTANGLED_SUBSHOT_NEGATIVE = "EntangledSubshotNegative"
    UNDEFINED = "Undefined"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class GammaReport:
    """The three gamma parameters plus the region they imply.

    Parameters are ``None`` where undefined (the vacuum origin, or ``gamma_n``
    for multimode records).  ``stderr_*`` are filled only by estimators.
    """

    gamma_c: Optional[float]
    gamma_n: Optional[float]
    gamma_e: Optional[float]
    region: Region
    stderr_c: Optional[float] = None
    stderr_n: Optional[float] = None
    stderr_e: Optional[float] = None
    extra: dict = field(default_factory=dict, compare=False)

    def as_tuple(self):
        return (self.gamma_c, self.gamma_n, self.gamma_e)


@dataclass(frozen=True)
class Thresholds:
    """Critical ``muk`` above which each kind of nonclassicality appears."""

    muk_n: float
    muk_c: float
    muk_e: float


def output_moments(p: PdcParams) -> TwoModeMoments:
    """Photon-number moments of the two output arms."""
    mu1, mu2, muk = p.mu1, p.mu2, p.muk
    gain_photons = muk * (1.0 + mu1 + mu2)
    n1 = mu1 + gain_photons
    n2 = mu2 + gain_photons
    var1 = n1 * (n1 + 1.0)
    var2 = n2 * (n2 + 1.0)
    # independent of the gain: pairs are created together, H only sees the seeds
    varH = mu1 * (1.0 + mu1) + mu2 * (1.0 + mu2)
    cov12 = 0.5 * (var1 + var2 - varH)
    return TwoModeMoments(n1, n2, var1, var2, cov12, varH)


def _denominator(p: PdcParams) -> float:
    if p.is_origin:
        raise UndefinedPointError("gamma parameters are undefined at mu1 = mu2 = muk = 0")
    return 2.0 * p.muk * (1.0 + p.mu1 + p.mu2) + p.mu1 + p.mu2


def gamma_c(p: PdcParams) -> float:
    """Sub-shot-noise parameter ``1 - <dH^2> / (<n1> + <n2>)``."""
    den = _denominator(p)
    pairs = 2.0 * p.muk * (1.0 + p.mu1 + p.mu2)
    return (pairs - p.mu1 ** 2 - p.mu2 ** 2) / den


def gamma_n(p: PdcParams) -> float:
    """Negativity parameter built on the negative P-function criterion."""
    den = _denominator(p)
    num = p.muk * (1.0 + p.mu1 + p.mu2) - p.mu1 ** 2 - p.mu2 ** 2 + p.mu1 * p.mu2
    return 2.0 * num / den


def gamma_e(p: PdcParams) -> float:
    """Entanglement parameter; positive iff the state violates PPT."""
    den = _denominator(p)
    return 2.0 * (p.muk * (1.0 + p.mu1 + p.mu2) - p.mu1 * p.mu2) / den


def thresholds(mu1: float, mu2: float) -> Thresholds:
    mu1 = _check_nonneg("mu1", mu1)
    mu2 = _check_nonneg("mu2", mu2)
    s = 1.0 + mu1 + mu2
    return Thresholds(
        muk_n=(mu1 * mu1 + mu2 * mu2 - mu1 * mu2) / s,
        muk_c=(mu1 * mu1 + mu2 * mu2) / (2.0 * s),
        muk_e=mu1 * mu2 / s,
    )


def classify_gammas(gc, gn, ge, tol: float = BOUNDARY_TOL) -> Region:
    """Map a gamma triple to the nested region it lies in.

    A parameter counts as violating only when it exceeds ``tol``.  ``gn`` may be
    ``None`` (negativity not defined), in which case the deepest reachable
    region is ``EntangledSubshot``.
    """
    if gc is None or ge is None:
        return Region.UNDEFINED
    if ge <= tol:
        return Region.SEPARABLE
    if gc <= tol:
        return Region.ENTANGLED_ONLY
    if gn is None or gn <= tol:
        return Region.ENTANGLED_SUBSHOT
    return Region.ENTANGLED_SUBSHOT_NEGATIVE


def classify_region(p: PdcParams) -> Region:
    if p.is_origin:
        return Region.UNDEFINED
    return classify_gammas(gamma_c(p), gamma_n(p), gamma_e(p))


def gamma_report(p: PdcParams) -> GammaReport:
    """All three parameters and the region; ``Undefined`` with nulls at the origin."""
    if p.is_origin:
        return GammaReport(None, None, None, Region.UNDEFINED)
    gc, gn, ge = gamma_c(p), gamma_n(p), gamma_e(p)
    return GammaReport(gc, gn, ge, classify_gammas(gc, gn, ge))


def gammas_from_moments(m: TwoModeMoments, n_modes: int = 1):
    """Gamma triple from measured moments, or ``None`` entries when undefined.

    With ``n_modes > 1`` the entanglement term uses the multimode witness
    (difference squared divided by the number of modes) and the negativity
    parameter is not defined, so ``gamma_n`` is returned as ``None``.
    """
    total = m.n1 + m.n2
    if total <= 0.0:
        return None, None, None
    diff2 = (m.n1 - m.n2) ** 2
    gc = 1.0 - m.varH / total
    gn = 1.0 - (m.varH + diff2) / total if n_modes == 1 else None
    ge = 1.0 - (m.varH - diff2 / n_modes) / total
    return gc, gn, ge
