"""Coherent-state-superposition backend.

States are finite superpositions of products of coherent states, stored as a
complex coefficient vector (one entry per branch) plus a (branch, mode)
matrix of coherent amplitudes. Kerr evolution is supported at the fractional
revival times tau = pi/M, where the branch expansion is exact; linear optics
and photon-number projections act branch-by-branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import fock

__all__ = [
    "CssState",
    "RevivalCoeffs",
    "overlap_coherent",
    "branch_gram",
    "fq_closed",
    "fq_dft",
    "inner",
    "fidelity",
    "mean_photon_number",
    "coherent_number_amp",
    "number_amp_table",
]

# norm^2 values in [-NEG_NORM_SLACK, 0) are rounding noise and clamp to 0
NEG_NORM_SLACK = 1e-10


def overlap_coherent(g: complex, d: complex) -> complex:
    """<g|d> = exp(-|g|^2/2 - |d|^2/2 + conj(g) d) for coherent states."""
    return np.exp(-0.5 * abs(g) ** 2 - 0.5 * abs(d) ** 2 + np.conj(g) * d)


def branch_gram(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise products of coherent overlaps over all modes.

    a, b are (branches, modes) amplitude matrices; returns the matrix
    G[p, q] = prod_m <a[p, m] | b[q, m]>.
    """
    ea = np.sum(np.abs(a) ** 2, axis=1)
    eb = np.sum(np.abs(b) ** 2, axis=1)
    return np.exp(a.conj() @ b.T - 0.5 * ea[:, None] - 0.5 * eb[None, :])


@dataclass(frozen=True)
class RevivalCoeffs:
    """Fourier coefficients of the Kerr revival expansion at tau = pi/M."""

    M: int
    parity: str  # "odd" | "even"
    f: np.ndarray


def fq_closed(M: int) -> RevivalCoeffs:
    """Closed-form revival coefficients; all have magnitude 1/sqrt(M).

    Odd M:  f_q = i^K / sqrt(M) * exp(i pi q(q+1)/M) * exp(-i pi K(K+1)/M),
    with K = (M-1)/2. Even M: f_q = exp(i pi q^2/M) exp(-i pi/4) / sqrt(M).
    The i^K factor fixes the global phase so the expansion reproduces
    exp(-i pi n(n-1)/M) exactly (see fq_dft).
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    q = np.arange(M)
    if M % 2:
        K = (M - 1) // 2
        f = (1j**K) * np.exp(1j * np.pi * (q * (q + 1) - K * (K + 1)) / M) / math.sqrt(M)
        parity = "odd"
    else:
        f = np.exp(1j * np.pi * q**2 / M - 0.25j * np.pi) / math.sqrt(M)
        parity = "even"
    return RevivalCoeffs(M=M, parity=parity, f=f)


def fq_dft(M: int) -> RevivalCoeffs:
    """Revival coefficients by DFT inversion; brute-force oracle for fq_closed.

    Solves phi(n) = sum_q f_q exp(-2 pi i q n / M) with phi(n) the Kerr phase
    sequence, exp(-i pi n(n-1)/M) for odd M and exp(-i pi n^2/M) for even M.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    n = np.arange(M)
    if M % 2:
        phi = np.exp(-1j * np.pi * n * (n - 1) / M)
        parity = "odd"
    else:
        phi = np.exp(-1j * np.pi * n**2 / M)
        parity = "even"
    q = np.arange(M)
    f = (phi[None, :] * np.exp(2j * np.pi * np.outer(q, n) / M)).sum(axis=1) / M
    return RevivalCoeffs(M=M, parity=parity, f=f)


def coherent_number_amp(gamma: np.ndarray, n: int) -> np.ndarray:
    """<n|gamma> = exp(-|gamma|^2/2) gamma^n / sqrt(n!), elementwise."""
    gamma = np.asarray(gamma, dtype=np.complex128)
    vac = np.exp(-0.5 * np.abs(gamma) ** 2)
    if n == 0:
        return vac.astype(np.complex128)
    out = np.zeros_like(gamma)
    nz = gamma != 0
    out[nz] = np.exp(n * np.log(gamma[nz]) - 0.5 * gammaln(n + 1))
    return out * vac


def number_amp_table(gamma: np.ndarray, n_max: int) -> np.ndarray:
    """<n|gamma> for n = 0..n_max as a (branches, n_max+1) table."""
    gamma = np.asarray(gamma, dtype=np.complex128)
    table = np.empty((gamma.size, n_max + 1), dtype=np.complex128)
    table[:, 0] = np.exp(-0.5 * np.abs(gamma) ** 2)
    if n_max > 0:
        steps = gamma[:, None] / np.sqrt(np.arange(1, n_max + 1))[None, :]
        table[:, 1:] = table[:, :1] * np.cumprod(steps, axis=1)
    return table


def mode_photon_cutoff(gamma: np.ndarray) -> int:
    """Per-mode photon cutoff keeping the Poisson tail below ~1e-10."""
    g = float(np.max(np.abs(gamma))) if np.asarray(gamma).size else 0.0
    return math.ceil(g**2 + 8.0 * g + 10.0)


@dataclass(frozen=True)
class CssState:
    """Superposition of products of coherent states.

    coeffs: (branches,) complex weights.
    amps:   (branches, modes) coherent amplitudes.
    A zero-mode state is a pure scalar, the sum of its coefficients.
    """

    coeffs: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.ascontiguousarray(self.coeffs, dtype=np.complex128))
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if amps.ndim != 2:
            raise ValueError("amps must be a (branches, modes) matrix")
        if amps.shape[0] != coeffs.size:
            raise ValueError("coefficient/branch count mismatch")
        if coeffs.size and not (
            np.all(np.isfinite(coeffs.view(np.float64)))
            and np.all(np.isfinite(amps.view(np.float64)))
        ):
            raise ValueError("non-finite branch data")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "amps", amps)

    # -- constructors ------------------------------------------------------

    @classmethod
    def coherent(cls, amplitudes) -> "CssState":
        """Single product branch |g_0>|g_1>... with unit coefficient."""
        amps = np.atleast_1d(np.asarray(amplitudes, dtype=np.complex128))
        return cls(np.ones(1, dtype=np.complex128), amps[None, :])

    @classmethod
    def vacuum(cls, n_modes: int) -> "CssState":
        return cls.coherent(np.zeros(n_modes, dtype=np.complex128))

    @classmethod
    def superposition(cls, coeffs, amplitude_rows) -> "CssState":
        """One branch per row of `amplitude_rows`, weighted by `coeffs`."""
        amps = np.atleast_2d(np.asarray(amplitude_rows, dtype=np.complex128))
        return cls(np.asarray(coeffs, dtype=np.complex128), amps)

    # -- basics ------------------------------------------------------------

    @property
    def mode_count(self) -> int:
        return self.amps.shape[1]

    @property
    def branch_count(self) -> int:
        return self.amps.shape[0]

    @property
    def norm_sq(self) -> float:
        val = inner(self, self).real
        if val < -NEG_NORM_SLACK:
            raise ValueError(f"norm^2 = {val:.3e} below numerical slack")
        return max(val, 0.0)

    def normalized(self) -> "CssState":
        norm_sq = self.norm_sq
        if norm_sq <= 0.0:
            raise ValueError("cannot normalize a zero state")
        return CssState(self.coeffs / math.sqrt(norm_sq), self.amps)

    def _check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.mode_count:
            raise IndexError(f"mode {mode} out of range for {self.mode_count} modes")

    # -- evolution and linear optics --------------------------------------

    def kerr_fractional(self, mode: int, M: int) -> "CssState":
        """Kerr evolution over tau = pi/M on one mode, via the revival expansion.

        Each branch splits into M branches. For odd M the amplitude picks up
        exp(-2 pi i q/M); for even M it picks up exp(i pi (1-2q)/M).
        """
        self._check_mode(mode)
        rc = fq_closed(M)
        q = np.arange(M)
        if M % 2:
            rot = np.exp(-2j * np.pi * q / M)
        else:
            rot = np.exp(1j * np.pi * (1 - 2 * q) / M)
        coeffs = (self.coeffs[:, None] * rc.f[None, :]).ravel()
        amps = np.repeat(self.amps, M, axis=0)
        amps[:, mode] *= np.tile(rot, self.branch_count)
        return CssState(coeffs, amps)

    def beamsplitter(self, i: int, j: int) -> "CssState":
        """50/50 beamsplitter: (g_i, g_j) -> ((g_i+g_j)/sqrt2, (g_i-g_j)/sqrt2)."""
        self._check_mode(i)
        self._check_mode(j)
        if i == j:
            raise IndexError("beamsplitter needs two distinct modes")
        amps = self.amps.copy()
        gi, gj = amps[:, i].copy(), amps[:, j].copy()
        amps[:, i] = (gi + gj) / math.sqrt(2.0)
        amps[:, j] = (gi - gj) / math.sqrt(2.0)
        return CssState(self.coeffs, amps)

    def phase_shift(self, mode: int, phi: float) -> "CssState":
        """g_mode -> g_mode * exp(i phi); branch coefficients unchanged."""
        self._check_mode(mode)
        amps = self.amps.copy()
        amps[:, mode] *= np.exp(1j * phi)
        return CssState(self.coeffs, amps)

    def with_vacuum_mode(self) -> "CssState":
        """Append a fresh mode prepared in vacuum."""
        zeros = np.zeros((self.branch_count, 1), dtype=np.complex128)
        return CssState(self.coeffs, np.hstack([self.amps, zeros]))

    # -- measurement -------------------------------------------------------

    def project_number(self, mode: int, n: int) -> "CssState":
        """Project |n><n| on one mode and remove it (unnormalized output).

        The outcome probability is norm_sq(output) / norm_sq(input).
        """
        self._check_mode(mode)
        if n < 0:
            raise ValueError("photon number must be >= 0")
        factor = coherent_number_amp(self.amps[:, mode], n)
        amps = np.delete(self.amps, mode, axis=1)
        return CssState(self.coeffs * factor, amps)

    # -- conversion and cleanup -------------------------------------------

    def to_fock(self, cutoffs, leakage_tol: float = 1e-9) -> np.ndarray:
        """Dense number-basis amplitudes; bridge to the Fock oracle (<= 2 modes)."""
        if self.mode_count > 2:
            raise ValueError("Fock bridge supports at most 2 modes")
        if self.mode_count == 0:
            raise ValueError("zero-mode state has no Fock expansion")
        cut = np.atleast_1d(np.asarray(cutoffs, dtype=int))
        if cut.size != self.mode_count:
            raise ValueError("one cutoff per mode required")
        if self.mode_count == 1:
            out = np.zeros(cut[0] + 1, dtype=np.complex128)
            for c, row in zip(self.coeffs, self.amps):
                out += c * fock.coherent_fock(row[0], cut[0], leakage_tol).amps
            return out
        out = np.zeros((cut[0] + 1, cut[1] + 1), dtype=np.complex128)
        for c, row in zip(self.coeffs, self.amps):
            va = fock.coherent_fock(row[0], cut[0], leakage_tol).amps
            vb = fock.coherent_fock(row[1], cut[1], leakage_tol).amps
            out += c * np.outer(va, vb)
        return out

    def prune(self, tol: float = 0.0) -> "CssState":
        """Merge duplicate branches and drop branches with |coeff| < tol.

        Amplitude rows agreeing within 1e-12 componentwise are merged by
        adding coefficients.
        """
        if tol < 0.0:
            raise ValueError("tol must be >= 0")
        coeffs: list[complex] = []
        rows: list[np.ndarray] = []
        for c, row in zip(self.coeffs, self.amps):
            for k, kept in enumerate(rows):
                if np.all(np.abs(kept - row) <= 1e-12):
                    coeffs[k] += c
                    break
            else:
                coeffs.append(c)
                rows.append(row)
        keep = [k for k, c in enumerate(coeffs) if abs(c) >= tol and c != 0]
        if not keep:
            return CssState(
                np.zeros(0, dtype=np.complex128),
                np.zeros((0, self.mode_count), dtype=np.complex128),
            )
        return CssState(
            np.array([coeffs[k] for k in keep]),
            np.array([rows[k] for k in keep]),
        )


def inner(x: CssState, y: CssState) -> complex:
    """<x|y> via pairwise coherent overlaps."""
    if x.mode_count != y.mode_count:
        raise ValueError("mode-count mismatch")
    if x.branch_count == 0 or y.branch_count == 0:
        return 0.0 + 0.0j
    gram = branch_gram(x.amps, y.amps)
    return complex(x.coeffs.conj() @ gram @ y.coeffs)


def fidelity(x: CssState, y: CssState) -> float:
    """|<x|y>|^2 / (norm^2(x) norm^2(y))."""
    nx, ny = x.norm_sq, y.norm_sq
    if nx <= 0.0 or ny <= 0.0:
        raise ValueError("fidelity undefined for zero-norm states")
    return abs(inner(x, y)) ** 2 / (nx * ny)


def mean_photon_number(state: CssState) -> float:
    """<sum_m a_m^dag a_m> for a (not necessarily normalized) state."""
    norm_sq = state.norm_sq
    if norm_sq <= 0.0:
        raise ValueError("zero-norm state")
    gram = branch_gram(state.amps, state.amps)
    cross = state.amps.conj() @ state.amps.T  # sum_m conj(g_pm) g_qm
    val = state.coeffs.conj() @ (gram * cross) @ state.coeffs
    return float(val.real) / norm_sq
