"""Covariance-matrix description of the PDC output and the PPT test.

Conventions: hbar = 1, quadratures ordered ``(x1, p1, x2, p2)`` with
``x = (a + a^dag)/sqrt(2)``, so the vacuum covariance is ``I/2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PdcParams
from .errors import NumericalFailure

VACUUM_VARIANCE = 0.5

OMEGA = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)

# momentum reversal on mode 2 implements partial transposition
PARTIAL_TRANSPOSE = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class CovarianceMatrix:
    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.shape != (4, 4):
            raise ValueError(f"expected a 4x4 covariance matrix, got shape {sigma.shape}")
        if np.max(np.abs(sigma - sigma.T)) > 1e-12:
            raise ValueError("covariance matrix is not symmetric")
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    def is_bona_fide(self, tol: float = 1e-10) -> bool:
        """Uncertainty condition ``sigma + i Omega / 2 >= 0``."""
        herm = self.sigma + 0.5j * OMEGA
        return bool(np.linalg.eigvalsh(herm).min() >= -tol)

    def mean_photons(self):
        """Per-mode mean photon numbers ``(s_xx + s_pp - 1) / 2``."""
        s = self.sigma
        return (
            0.5 * (s[0, 0] + s[1, 1] - 1.0),
            0.5 * (s[2, 2] + s[3, 3] - 1.0),
        )


@dataclass(frozen=True)
class PptReport:
    nu_minus: float
    entangled: bool


def squeezing_symplectic(r: float, phi: float) -> np.ndarray:
    """Symplectic matrix of ``A_j = cosh(r) a_j + exp(i phi) sinh(r) a_j'^dag``."""
    c, s = np.cosh(r), np.sinh(r)
    rot = np.array([[np.cos(phi), np.sin(phi)], [np.sin(phi), -np.cos(phi)]])
    eye = np.eye(2)
    return np.block([[c * eye, s * rot], [s * rot, c * eye]])


def build_covariance(p: PdcParams) -> CovarianceMatrix:
    sigma_in = np.diag(
        [p.mu1 + 0.5, p.mu1 + 0.5, p.mu2 + 0.5, p.mu2 + 0.5]
    )
    S = squeezing_symplectic(p.r, p.phi)
    sigma = S @ sigma_in @ S.T
    return CovarianceMatrix(0.5 * (sigma + sigma.T))


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Sorted symplectic eigenvalues, the moduli of the spectrum of ``i Omega sigma``."""
    ev = np.linalg.eigvals(1j * OMEGA @ np.asarray(sigma, dtype=float))
    if not np.all(np.isfinite(ev)):
        raise NumericalFailure("non-finite eigenvalues in symplectic spectrum")
    # the spectrum of i*Omega*sigma is real and comes in +/- pairs
    if np.max(np.abs(ev.imag)) > 1e-9 * max(1.0, np.max(np.abs(ev))):
        raise NumericalFailure("symplectic spectrum is not real; sigma is not positive definite")
    vals = np.sort(np.real(ev))
    pos = vals[len(vals) // 2:]
    neg = -vals[: len(vals) // 2][::-1]
    if np.max(np.abs(pos - neg)) > 1e-8 * max(1.0, pos.max()):
        raise NumericalFailure("symplectic spectrum is not paired")
    return 0.5 * (pos + neg)


def ppt_check(cm: CovarianceMatrix, tol: float = 1e-12) -> PptReport:
    """Smallest partially transposed symplectic eigenvalue and the PPT verdict."""
    sigma_pt = PARTIAL_TRANSPOSE @ cm.sigma @ PARTIAL_TRANSPOSE
    nu = symplectic_eigenvalues(sigma_pt)
    nu_minus = float(nu[0])
    if nu_minus <= 0.0:
        raise NumericalFailure(f"non-positive symplectic eigenvalue {nu_minus!r}")
    return PptReport(nu_minus=nu_minus, entangled=nu_minus < VACUUM_VARIANCE - tol)
