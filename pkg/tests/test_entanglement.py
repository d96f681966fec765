import math

import numpy as np
import pytest

from mecs import fock
from mecs.css import CssState, fidelity, fq_closed
from mecs.entanglement import (
    Partition,
    entropy_from_eigenvalues,
    entropy_sweep,
    fock_spectrum,
    generate_ecs,
    gram_spectrum,
)


def two_branch_eigenvalues(alpha_sq):
    """Closed form for the M=2 state: (1 +- sqrt(1-(1-s^2)^2))/2, s=exp(-2|a|^2)."""
    s = math.exp(-2.0 * alpha_sq)
    plus = (1.0 + math.sqrt(1.0 - (1.0 - s * s) ** 2)) / 2.0
    return plus, 1.0 - plus


# -- state generation -----------------------------------------------------------


@pytest.mark.parametrize("M", [2, 3, 4, 5, 8])
def test_generate_ecs_matches_analytic_branches(M):
    beta = 1.4 * np.exp(0.3j)
    state = generate_ecs(M, beta)
    if M % 2:
        alpha = beta / math.sqrt(2.0)
    else:
        alpha = beta * np.exp(1j * math.pi / M) / math.sqrt(2.0)
    gam = alpha * np.exp(-2j * np.pi * np.arange(M) / M)
    analytic = CssState.superposition(fq_closed(M).f, np.stack([gam, gam], axis=1))
    assert fidelity(state, analytic) >= 1 - 1e-12
    assert abs(state.norm_sq - 1.0) < 1e-10


def test_generate_ecs_vacuum_input():
    state = generate_ecs(4, 0.0)
    assert gram_spectrum(state).entropy_ebits < 1e-12
    assert abs(state.norm_sq - 1.0) < 1e-10


def test_generate_ecs_equal_magnitude_coefficients():
    state = generate_ecs(3, 0.9 + 0.2j)
    assert np.max(np.abs(np.abs(state.coeffs) - 1 / math.sqrt(3))) < 1e-12


# -- Gram spectrum ----------------------------------------------------------------


def test_gram_spectrum_product_state():
    spec = gram_spectrum(CssState.coherent([1.0, -2.0j]))
    assert spec.eigenvalues[0] == pytest.approx(1.0)
    assert spec.entropy_ebits == pytest.approx(0.0, abs=1e-12)


def test_gram_spectrum_two_branch_closed_form():
    spec = gram_spectrum(generate_ecs(2, math.sqrt(2.0)))  # alpha = 1
    plus, minus = two_branch_eigenvalues(1.0)
    assert abs(spec.eigenvalues[0] - plus) < 1e-10
    assert abs(spec.eigenvalues[1] - minus) < 1e-10
    expected_entropy = -(plus * math.log2(plus) + minus * math.log2(minus))
    assert abs(spec.entropy_ebits - expected_entropy) < 1e-10
    assert abs(spec.entropy_ebits - 0.97372) < 1e-3


def test_gram_spectrum_maximal_at_large_amplitude():
    # alpha/M = 4 makes the branches orthogonal to machine precision
    spec = gram_spectrum(generate_ecs(4, 16.0 * math.sqrt(2.0)))
    assert abs(spec.entropy_ebits - 2.0) < 1e-3


def test_gram_spectrum_rejects_zero_state():
    with pytest.raises(ValueError):
        gram_spectrum(CssState(np.zeros(1), np.zeros((1, 2))))


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((0,), (0, 1))
    part = Partition((0,), (1,))
    with pytest.raises(ValueError):
        part.validate(3)


# -- Fock spectrum ------------------------------------------------------------------


def test_fock_spectrum_product_state():
    mat = fock.FockMat(np.outer(fock.coherent_fock(0.9, 30).amps, fock.coherent_fock(0.4, 30).amps))
    assert fock_spectrum(mat).entropy_ebits < 1e-10


def test_fock_spectrum_bell_like():
    amps = np.zeros((2, 2))
    amps[0, 0] = amps[1, 1] = 1 / math.sqrt(2.0)
    assert fock_spectrum(fock.FockMat(amps)).entropy_ebits == pytest.approx(1.0)


@pytest.mark.parametrize("M,beta_sq", [(3, 2.0), (2, 1.0), (5, 4.0), (8, 9.0)])
def test_gram_and_fock_spectra_agree(M, beta_sq):
    beta = math.sqrt(beta_sq)
    cutoff = fock.default_cutoff(beta)
    mat = fock.split_with_vacuum(fock.kerr_evolve(fock.coherent_fock(beta, cutoff), math.pi / M))
    fock_spec = fock_spectrum(mat)
    gram_spec = gram_spectrum(generate_ecs(M, beta))
    n = min(M, fock_spec.eigenvalues.size)
    assert np.max(np.abs(gram_spec.eigenvalues[:n] - fock_spec.eigenvalues[:n])) < 1e-6
    assert abs(gram_spec.entropy_ebits - fock_spec.entropy_ebits) < 1e-6


# -- sweep and limits -----------------------------------------------------------------


def test_entropy_sweep_rows():
    rows = entropy_sweep([1.0], [2, 3, 4])
    assert [r["M"] for r in rows] == [2, 3, 4]
    assert rows[0]["entropy_ebits"] == pytest.approx(0.9737, abs=1e-3)
    for r in rows:
        assert r["tau_over_pi"] == pytest.approx(1.0 / r["M"])
        assert r["log2M_reference"] == pytest.approx(math.log2(r["M"]))
        assert r["entropy_ebits"] <= r["log2M_reference"] + 1e-9


def test_entropy_dimension_bound():
    for M in (2, 5, 9, 16):
        spec = gram_spectrum(generate_ecs(M, 2.5))
        assert spec.entropy_ebits <= math.log2(M) + 1e-9


@pytest.mark.parametrize("M", [2, 3, 4, 6])
def test_entropy_asymptote(M):
    spec = gram_spectrum(generate_ecs(M, 4 * M * math.sqrt(2.0)))
    assert abs(spec.entropy_ebits - math.log2(M)) < 0.01


def test_entropy_small_amplitude_vanishes():
    spec = gram_spectrum(generate_ecs(5, math.sqrt(1e-4)))
    assert spec.entropy_ebits < 1e-3


def test_entropy_large_m_fixed_amplitude_decays():
    spec = gram_spectrum(generate_ecs(100, math.sqrt(2.0)))  # |alpha|^2 = 1
    assert spec.entropy_ebits < 0.1


def test_entropy_interior_maximum_at_alpha_sq_ten():
    rows = entropy_sweep([10.0], range(2, 41))
    ent = [r["entropy_ebits"] for r in rows]
    best = int(np.argmax(ent))
    assert 0 < best < len(ent) - 1


# -- eigenvalue hygiene ---------------------------------------------------------------


def test_eigenvalue_clipping():
    eigs, entropy = entropy_from_eigenvalues(np.array([1.0, -5e-10, 0.0]))
    assert eigs[-1] == 0.0
    assert entropy == 0.0


def test_eigenvalue_clipping_rejects_large_negative():
    with pytest.raises(ValueError):
        entropy_from_eigenvalues(np.array([1.0, -1e-6]))
