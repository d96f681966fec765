"""Multi-dimensional entangled coherent states: generation, entanglement,
and probabilistic teleportation."""

__version__ = "0.1.0"

from .css import CssState, RevivalCoeffs, fidelity, fq_closed, fq_dft, inner, overlap_coherent
from .entanglement import Partition, SpectrumResult, entropy_sweep, fock_spectrum, generate_ecs, gram_spectrum
from .fock import FockMat, FockVec, coherent_fock, kerr_evolve, split_with_vacuum
from .teleport import ProtocolStats, TeleportConfig, run_trials

__all__ = [
    "__version__",
    "CssState",
    "RevivalCoeffs",
    "FockVec",
    "FockMat",
    "Partition",
    "SpectrumResult",
    "TeleportConfig",
    "ProtocolStats",
    "coherent_fock",
    "kerr_evolve",
    "split_with_vacuum",
    "overlap_coherent",
    "inner",
    "fidelity",
    "fq_closed",
    "fq_dft",
    "generate_ecs",
    "gram_spectrum",
    "fock_spectrum",
    "entropy_sweep",
    "run_trials",
]
