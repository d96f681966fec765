"""Truncated photon-number-basis backend for one and two bosonic modes.

Dense complex amplitude arrays indexed by photon number. This backend is
exact up to the cutoff and serves as the numerical oracle for the
coherent-branch backend at small amplitude.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "TruncationWarning",
    "FockVec",
    "FockMat",
    "default_cutoff",
    "coherent_fock",
    "kerr_evolve",
    "split_with_vacuum",
    "reduced_density_a",
    "total_number_distribution",
]


class TruncationWarning(UserWarning):
    """Photon-number cutoff too small for the requested leakage tolerance."""


@dataclass(frozen=True)
class FockVec:
    """Single-mode state: amps[n] is the amplitude of |n>."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("FockVec needs a nonempty 1-d amplitude array")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("non-finite amplitudes")
        object.__setattr__(self, "amps", amps)

    @property
    def cutoff(self) -> int:
        return self.amps.size - 1

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass(frozen=True)
class FockMat:
    """Two-mode state: amps[n_a, n_b] is the amplitude of |n_a, n_b>."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if amps.ndim != 2 or amps.size == 0:
            raise ValueError("FockMat needs a nonempty 2-d amplitude array")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("non-finite amplitudes")
        object.__setattr__(self, "amps", amps)

    @property
    def cutoffs(self) -> tuple[int, int]:
        return (self.amps.shape[0] - 1, self.amps.shape[1] - 1)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


def default_cutoff(beta: complex) -> int:
    """Cutoff keeping the Poisson tail of |beta> below ~1e-12 for |beta|^2 <= 16."""
    nbar = abs(beta) ** 2
    return math.ceil(nbar + 10.0 * math.sqrt(max(nbar, 1.0)) + 20.0)


def coherent_fock(beta: complex, cutoff: int, leakage_tol: float = 1e-9) -> FockVec:
    """Expand the coherent state |beta> in number states up to `cutoff`.

    amps[n] = exp(-|beta|^2/2) beta^n / sqrt(n!), built by the stable
    recurrence amps[n] = amps[n-1] * beta / sqrt(n). Warns if the truncated
    tail exceeds `leakage_tol`.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[0] = math.exp(-0.5 * abs(beta) ** 2)
    for n in range(1, cutoff + 1):
        amps[n] = amps[n - 1] * beta / math.sqrt(n)
    state = FockVec(amps)
    leakage = 1.0 - state.norm_sq
    if leakage > leakage_tol:
        warnings.warn(
            f"cutoff {cutoff} leaves truncation leakage {leakage:.3e} "
            f"> {leakage_tol:.1e} for |beta|={abs(beta):.3g}",
            TruncationWarning,
            stacklevel=2,
        )
    return state


def kerr_evolve(state: FockVec, tau: float) -> FockVec:
    """Apply exp(-i tau N(N-1)) for a dimensionless time tau."""
    if not math.isfinite(tau):
        raise ValueError("tau must be finite")
    n = np.arange(state.amps.size)
    return FockVec(state.amps * np.exp(-1j * tau * n * (n - 1)))


def _binom_sqrt_row(n: int) -> np.ndarray:
    """sqrt(C(n, k)) / 2^(n/2) for k = 0..n, via log-factorials."""
    k = np.arange(n + 1)
    logw = 0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) - 0.5 * n * math.log(2.0)
    return np.exp(logw)


def split_with_vacuum(state: FockVec) -> FockMat:
    """Mix the state with a vacuum mode on a 50/50 beamsplitter.

    |n>|0> -> 2^(-n/2) sum_k sqrt(C(n,k)) |k>|n-k>, the convention in which
    |beta>|0> -> |beta/sqrt(2)>|beta/sqrt(2)>.
    """
    d = state.amps.size
    out = np.zeros((d, d), dtype=np.complex128)
    for n in range(d):
        w = _binom_sqrt_row(n)
        k = np.arange(n + 1)
        out[k, n - k] += state.amps[n] * w
    return FockMat(out)


def reduced_density_a(state: FockMat) -> np.ndarray:
    """Trace out the second mode: rho_A[n, m] = sum_k A[n,k] conj(A[m,k]) / norm^2."""
    norm_sq = state.norm_sq
    if norm_sq <= 0.0:
        raise ValueError("zero-norm state has no reduced density matrix")
    rho = state.amps @ state.amps.conj().T / norm_sq
    return rho


def total_number_distribution(state: FockMat) -> np.ndarray:
    """P[N] = sum over n_a + n_b = N of |amps|^2, normalized."""
    norm_sq = state.norm_sq
    if norm_sq <= 0.0:
        raise ValueError("zero-norm state")
    prob = np.abs(state.amps) ** 2
    da, db = prob.shape
    out = np.zeros(da + db - 1)
    for n in range(da):
        out[n : n + db] += prob[n]
    return out / norm_sq
