"""Sampled-subspace diagonalization pipeline: integral-file parsing,
determinant-space Hamiltonians, and self-consistent configuration recovery."""

from .fcidump import FciData, ParseError, parse_fcidump, write_fcidump
from .hamiltonian import (
    Determinant,
    all_determinants,
    excitation_degree,
    hartree_fock_determinant,
    project_and_diagonalize,
    slater_condon,
)
from .recovery import (
    RecoveryConfig,
    RecoveryReport,
    noisy_sampler,
    recover_configuration,
    self_consistent_recovery,
    weight_w,
)
from .toys import hubbard_dimer_energy, hubbard_dimer_fcidump, random_fcidump

__all__ = [name for name in dir() if not name.startswith("_")]
