"""Probabilistic teleportation of M-dimensional coherent-state superpositions.

Even M only. Alice dilutes the input state and her half of the entangled
resource into L = M/2 copies each, phase-shifts, combines pairwise on 50/50
beamsplitters, and photon-counts all M output modes. A run succeeds when
exactly one mode stays dark; Bob then applies a photon-number-conditioned
rotation. Both Monte-Carlo trials and exact event probabilities (by
inclusion-exclusion over dark-mode sets) are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .css import (
    CssState,
    branch_gram,
    fidelity,
    fq_closed,
    mode_photon_cutoff,
    number_amp_table,
)

__all__ = [
    "TeleportConfig",
    "Success",
    "Failure",
    "TrialOutcome",
    "ProtocolStats",
    "ChainSampler",
    "prepare_joint",
    "dilute",
    "alice_network",
    "sample_counts",
    "classify",
    "correction_shift",
    "bob_correct",
    "residual_target",
    "ideal_target",
    "exact_event_probabilities",
    "run_trial",
    "run_trials",
]

RNG_SCHEME = "numpy PCG64, per-trial SeedSequence([seed, trial_index])"

RESIDUAL_MASS_TOL = 1e-9


@dataclass(frozen=True)
class TeleportConfig:
    """Protocol parameters.

    Q holds the M input-state coefficients; n_cap overrides the per-mode
    photon cutoff when set; h_only restricts success accounting to dark
    H-modes (dark G-modes then count as failures).
    """

    M: int
    alpha: complex
    Q: np.ndarray
    seed: int = 0
    trials: int = 0
    n_cap: int | None = None
    h_only: bool = False

    def __post_init__(self):
        if self.M < 2 or self.M % 2:
            raise ValueError("M must be an even integer >= 2")
        q = np.atleast_1d(np.asarray(self.Q, dtype=np.complex128))
        if q.size != self.M:
            raise ValueError("Q must have length M")
        if not np.any(q):
            raise ValueError("Q must not be all zero")
        object.__setattr__(self, "Q", q)

    @property
    def L(self) -> int:
        return self.M // 2


@dataclass(frozen=True)
class Success:
    empty_mode: int  # index into the measured modes (0..L-1 = G, L..M-1 = H)
    kind: str  # "G" | "H"
    m: int  # index within its kind
    n_tot: int


@dataclass(frozen=True)
class Failure:
    reason: str  # "no_empty_mode" | "multiple_empty_modes"


@dataclass(frozen=True)
class TrialOutcome:
    counts: np.ndarray
    classification: Success | Failure
    bob_state: CssState | None
    fidelity_vs_ideal: float | None
    fidelity_vs_residual_target: float | None


@dataclass(frozen=True)
class ProtocolStats:
    trials: int
    successes: int
    g_successes: int
    h_successes: int
    success_probability: float
    success_stderr: float
    mean_fidelity_vs_ideal: float
    mean_fidelity_vs_residual_target: float
    exact_success_probability: float | None = None
    exact_success_probability_h_only: float | None = None
    rng_scheme: str = RNG_SCHEME


def _branch_amps(alpha: complex, M: int) -> np.ndarray:
    q = np.arange(M)
    return alpha * np.exp(-2j * np.pi * q / M)


def ideal_target(cfg: TeleportConfig) -> CssState:
    """Normalized input state sum_q Q_q |alpha exp(-2 pi i q/M)>."""
    state = CssState.superposition(cfg.Q, _branch_amps(cfg.alpha, cfg.M)[:, None])
    return state.normalized()


def entangled_resource(cfg: TeleportConfig) -> CssState:
    """Two-mode even-M resource sum_q f_q |gamma_q>|gamma_q>; exactly normalized."""
    gam = _branch_amps(cfg.alpha, cfg.M)
    return CssState.superposition(fq_closed(cfg.M).f, np.stack([gam, gam], axis=1))


def prepare_joint(cfg: TeleportConfig) -> CssState:
    """Joint state on modes (C, A, B): input state on C, resource on (A, B)."""
    c_state = ideal_target(cfg)
    ab = entangled_resource(cfg)
    nb, na = c_state.branch_count, ab.branch_count
    coeffs = (c_state.coeffs[:, None] * ab.coeffs[None, :]).ravel()
    amps = np.hstack(
        [
            np.repeat(c_state.amps, na, axis=0),
            np.tile(ab.amps, (nb, 1)),
        ]
    )
    return CssState(coeffs, amps)


def dilute(state: CssState, mode: int, L: int) -> CssState:
    """Replace one mode with L modes carrying gamma/sqrt(L) each.

    Equivalent to a balanced beamsplitter tree fed with vacuum; preserves the
    total mean photon number per branch.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if not 0 <= mode < state.mode_count:
        raise IndexError("invalid mode")
    g = state.amps[:, mode] / math.sqrt(L)
    copies = np.repeat(g[:, None], L, axis=1)
    amps = np.hstack([state.amps[:, :mode], copies, state.amps[:, mode + 1 :]])
    return CssState(state.coeffs, amps)


def alice_network(state: CssState, cfg: TeleportConfig) -> CssState:
    """Dilution, phase shifts, and pairwise 50/50 mixing of Alice's modes.

    Input modes (C, A, B); output modes (G_0..G_{L-1}, H_0..H_{L-1}, B) with
    per-branch amplitudes
    G_k = alpha [exp(-2 pi i q/M) - exp(-2 pi i (p+k)/M)] / sqrt(2L),
    H_k = alpha [exp(-2 pi i q/M) + exp(-2 pi i (p+k)/M)] / sqrt(2L).
    The k-dependent phase lands on the diluted input-state copies; that is
    the sign convention under which the mixed outputs take the form above.
    """
    L = cfg.L
    state = dilute(state, 0, L)  # C_0..C_{L-1}, A, B
    state = dilute(state, L, L)  # C_0..C_{L-1}, A_0..A_{L-1}, B
    for k in range(L):
        state = state.phase_shift(k, -2.0 * np.pi * k / cfg.M)
    for k in range(L):
        # A_k slot (index L+k) becomes H_k = (A+C)/sqrt2,
        # C_k slot (index k) becomes G_k = (A-C)/sqrt2.
        state = state.beamsplitter(L + k, k)
    return state


class ChainSampler:
    """Photon-count sampler over all modes but the last of a fixed state.

    Projections only rescale branch coefficients, so the per-mode overlap
    Grams and number-amplitude tables depend on the state's amplitudes alone
    and are precomputed once; repeated trials then cost one small matrix
    product per measured mode.
    """

    def __init__(self, state: CssState, n_cap: int | None = None):
        if state.mode_count < 1:
            raise ValueError("sampler needs at least Bob's mode")
        self.state = state
        self.n_measured = state.mode_count - 1
        self.tables: list[np.ndarray] = []
        self.kernels: list[np.ndarray] = []  # G_rest[b,c] conj(T[b,n]) T[c,n], flattened over (b,c)
        self.full_grams: list[np.ndarray] = []
        b = state.branch_count
        for step in range(self.n_measured):
            g = state.amps[:, step]
            rest = state.amps[:, step + 1 :]
            gram_rest = branch_gram(rest, rest)
            cap = n_cap if n_cap is not None else mode_photon_cutoff(g)
            table = number_amp_table(g, cap)
            kernel = gram_rest[:, :, None] * (table.conj()[:, None, :] * table[None, :, :])
            self.tables.append(table)
            self.kernels.append(kernel.reshape(b * b, cap + 1))
            self.full_grams.append(gram_rest * branch_gram(g[:, None], g[:, None]))

    def sample(self, rng: np.random.Generator) -> tuple[np.ndarray, CssState]:
        """One draw from the exact joint law; returns (counts, Bob's state).

        Bob's single-mode state is unnormalized; its norm^2 equals the joint
        outcome probability.
        """
        coeffs = self.state.coeffs
        counts = np.zeros(self.n_measured, dtype=int)
        for step in range(self.n_measured):
            weight = np.outer(coeffs.conj(), coeffs)
            probs = (weight.ravel() @ self.kernels[step]).real
            norm_sq = float((weight * self.full_grams[step]).sum().real)
            covered = float(probs.sum())
            if norm_sq > 0 and (norm_sq - covered) / norm_sq > RESIDUAL_MASS_TOL:
                cap = self.kernels[step].shape[1] - 1
                raise RuntimeError(
                    f"photon cutoff {cap} leaves conditional mass "
                    f"{(norm_sq - covered) / norm_sq:.3e}; raise n_cap"
                )
            probs = np.clip(probs, 0.0, None)
            cdf = np.cumsum(probs)
            n = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
            counts[step] = n
            coeffs = coeffs * self.tables[step][:, n]
        return counts, CssState(coeffs, self.state.amps[:, self.n_measured :])


def sample_counts(
    state: CssState, rng: np.random.Generator, n_cap: int | None = None
) -> tuple[np.ndarray, CssState]:
    """Photon-count all modes but the last, sampling the exact joint law.

    Chain rule: mode by mode, the conditional distribution P(n | previous
    outcomes) comes from number projections; the returned single-mode state
    is Bob's unnormalized conditional state.
    """
    return ChainSampler(state, n_cap).sample(rng)


def classify(counts: np.ndarray, L: int) -> Success | Failure:
    """Success iff exactly one measured mode is dark."""
    zeros = np.flatnonzero(np.asarray(counts) == 0)
    if zeros.size == 0:
        return Failure("no_empty_mode")
    if zeros.size > 1:
        return Failure("multiple_empty_modes")
    idx = int(zeros[0])
    kind = "G" if idx < L else "H"
    m = idx if idx < L else idx - L
    return Success(empty_mode=idx, kind=kind, m=m, n_tot=int(np.sum(counts)))


def correction_shift(outcome: Success, M: int) -> int:
    """Branch-index shift s with p = q + s (mod M) surviving the dark mode.

    Dark H_m selects p + m = q + L, so s = L - m; dark G_m selects
    p + m = q, so s = -m.
    """
    L = M // 2
    if outcome.kind == "H":
        return (L - outcome.m) % M
    return (-outcome.m) % M


def bob_correct(bob: CssState, shift: int, M: int) -> CssState:
    """Rotate Bob's mode by exp(-2 pi i shift/M) per photon.

    For a dark H_m this is the correction exp(-2 pi i N (L-m)/M); it lines the
    input coefficients up with their matching branch states.
    """
    return bob.phase_shift(0, -2.0 * np.pi * shift / M)


def residual_target(cfg: TeleportConfig, outcome: Success) -> CssState:
    """Exact large-alpha form of Bob's corrected state (normalized).

    sum_q exp(i pi (q-s)^2 / M) exp(-2 pi i q N_tot / M) Q_q |gamma_q>, with
    s the selection shift of the dark mode. Differs from the ideal target by
    the photon-number-dependent phases that only a nonunitary phase operation
    could remove at finite alpha.
    """
    s = correction_shift(outcome, cfg.M)
    q = np.arange(cfg.M)
    phases = np.exp(1j * np.pi * (q - s) ** 2 / cfg.M - 2j * np.pi * q * outcome.n_tot / cfg.M)
    state = CssState.superposition(phases * cfg.Q, _branch_amps(cfg.alpha, cfg.M)[:, None])
    return state.normalized()


def run_trial(
    network_state: CssState | ChainSampler,
    cfg: TeleportConfig,
    rng: np.random.Generator,
    ideal: CssState | None = None,
) -> TrialOutcome:
    """One sampled protocol round, including Bob's correction and fidelities."""
    if isinstance(network_state, ChainSampler):
        counts, bob = network_state.sample(rng)
    else:
        counts, bob = sample_counts(network_state, rng, cfg.n_cap)
    outcome = classify(counts, cfg.L)
    if isinstance(outcome, Failure):
        return TrialOutcome(counts, outcome, None, None, None)
    corrected = bob_correct(bob, correction_shift(outcome, cfg.M), cfg.M)
    if ideal is None:
        ideal = ideal_target(cfg)
    f_ideal = fidelity(corrected, ideal)
    f_resid = fidelity(corrected, residual_target(cfg, outcome))
    return TrialOutcome(counts, outcome, corrected, f_ideal, f_resid)


def _zero_projection_probs(state: CssState) -> np.ndarray:
    """P(all modes in S dark) for every subset S of the measured modes.

    Index: bitmask over modes 0..M-1 (mode B, the last one, is never
    measured). Entry 0 is the state norm^2.
    """
    n_meas = state.mode_count - 1
    coeffs = state.coeffs
    b = state.branch_count
    # per-mode overlap and vacuum-projection factors
    overlaps = []
    vacs = []
    for mode in range(n_meas):
        g = state.amps[:, mode]
        overlaps.append(branch_gram(g[:, None], g[:, None]))
        v = np.exp(-0.5 * np.abs(g) ** 2)
        vacs.append(np.outer(v, v))
    g_b = state.amps[:, n_meas]
    base = branch_gram(g_b[:, None], g_b[:, None]) * np.outer(coeffs.conj(), coeffs)
    probs = np.empty(1 << n_meas)
    for mask in range(1 << n_meas):
        prod = base.copy()
        for mode in range(n_meas):
            prod *= vacs[mode] if (mask >> mode) & 1 else overlaps[mode]
        probs[mask] = max(prod.sum().real, 0.0)
    return probs


def exact_event_probabilities(state: CssState, L: int) -> dict:
    """Exact dark-mode event probabilities by inclusion-exclusion.

    Requires the measured-mode count M = 2L to be <= 8 (2^M subsets). Returns
    the probability of exactly one dark mode overall, restricted to H-modes,
    and of the all-dark event.
    """
    n_meas = state.mode_count - 1
    if n_meas > 8:
        raise ValueError("exact event probabilities limited to M <= 8 measured modes")
    if n_meas != 2 * L:
        raise ValueError("measured-mode count must equal 2L")
    z = _zero_projection_probs(state)
    norm_sq = z[0]
    p_one = 0.0
    p_one_h = 0.0
    for i in range(n_meas):
        # P(mode i dark, all others bright) over supersets containing i
        rest = [j for j in range(n_meas) if j != i]
        p_i = 0.0
        for sub in range(1 << (n_meas - 1)):
            mask = 1 << i
            bits = 0
            for pos, j in enumerate(rest):
                if (sub >> pos) & 1:
                    mask |= 1 << j
                    bits += 1
            p_i += (-1.0) ** bits * z[mask]
        p_i = max(p_i, 0.0)
        p_one += p_i
        if i >= L:
            p_one_h += p_i
    return {
        "p_success": p_one / norm_sq,
        "p_success_h_only": p_one_h / norm_sq,
        "p_all_dark": z[(1 << n_meas) - 1] / norm_sq,
    }


def run_trials(cfg: TeleportConfig) -> ProtocolStats:
    """Monte-Carlo protocol statistics, deterministic given the seed.

    Each trial draws from an independent generator seeded by
    SeedSequence([seed, trial_index]), so trials are order-independent and
    parallelizable. Exact success probabilities are attached for M <= 8.
    """
    network = alice_network(prepare_joint(cfg), cfg)
    sampler = ChainSampler(network, cfg.n_cap)
    ideal = ideal_target(cfg)
    M = cfg.M

    # Bob's branch amplitudes never change across trials, the correction only
    # rotates them by a shift-dependent phase, and the residual target depends
    # on N_tot only through N_tot mod M. Precompute every Gram block so a
    # trial reduces to a few small matrix products.
    gram_bob = branch_gram(network.amps[:, M:], network.amps[:, M:])
    target_amps = _branch_amps(cfg.alpha, M)[:, None]
    cross = []  # per shift: gram between rotated Bob branches and target branches
    resid_coeffs = np.empty((M, M, M), dtype=np.complex128)  # [shift, n_tot % M, q]
    q = np.arange(M)
    for s in range(M):
        rotated = network.amps[:, M:] * np.exp(-2j * np.pi * s / M)
        cross.append(branch_gram(rotated, target_amps))
        for r in range(M):
            tgt = CssState.superposition(
                np.exp(1j * np.pi * (q - s) ** 2 / M - 2j * np.pi * q * r / M) * cfg.Q,
                target_amps,
            ).normalized()
            resid_coeffs[s, r] = tgt.coeffs

    n_succ = 0
    n_g = 0
    n_h = 0
    fid_ideal: list[float] = []
    fid_resid: list[float] = []
    for t in range(cfg.trials):
        rng = np.random.default_rng([cfg.seed, t])
        counts, bob = sampler.sample(rng)
        outcome = classify(counts, cfg.L)
        if isinstance(outcome, Failure):
            continue
        if outcome.kind == "G":
            n_g += 1
            if cfg.h_only:
                continue
        else:
            n_h += 1
        n_succ += 1
        s = correction_shift(outcome, M)
        w = bob.coeffs
        norm_sq = (w.conj() @ gram_bob @ w).real
        proj = w.conj() @ cross[s]
        fid_ideal.append(float(abs(proj @ ideal.coeffs) ** 2 / norm_sq))
        fid_resid.append(float(abs(proj @ resid_coeffs[s, outcome.n_tot % M]) ** 2 / norm_sq))
    p = n_succ / cfg.trials if cfg.trials else 0.0
    stderr = math.sqrt(p * (1.0 - p) / cfg.trials) if cfg.trials else 0.0
    exact = exact_h = None
    if cfg.M <= 8:
        probs = exact_event_probabilities(network, cfg.L)
        exact = float(probs["p_success"])
        exact_h = float(probs["p_success_h_only"])
    return ProtocolStats(
        trials=cfg.trials,
        successes=n_succ,
        g_successes=n_g,
        h_successes=n_h,
        success_probability=p,
        success_stderr=stderr,
        mean_fidelity_vs_ideal=math.fsum(fid_ideal) / len(fid_ideal) if fid_ideal else float("nan"),
        mean_fidelity_vs_residual_target=(
            math.fsum(fid_resid) / len(fid_resid) if fid_resid else float("nan")
        ),
        exact_success_probability=exact,
        exact_success_probability_h_only=exact_h,
    )
