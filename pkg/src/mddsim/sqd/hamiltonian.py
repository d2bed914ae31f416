"""Determinant-space Hamiltonian matrix elements and subspace diagonalization.

A determinant is a pair of bitmasks over spatial orbitals (bit p set means
orbital p occupied in that spin sector). The fermionic ordering places all
alpha spin orbitals before all beta spin orbitals, each sector ordered by
orbital index, so excitation parities factorize per sector.

Matrix elements follow the excitation-degree rules for the Hamiltonian

    H = sum_{pr,s} h_pr a+_{ps} a_{rs}
      + 1/2 sum_{prqs,st} (pr|qs) a+_{ps} a+_{qt} a_{st'} a_{rs'}

with (pr|qs) the chemists'-notation two-electron integrals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fcidump import FciData

MAX_DENSE_DIM = 4000


@dataclass(frozen=True)
class Determinant:
    """Electron configuration as per-sector orbital bitmasks."""

    alpha: int
    beta: int

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("occupation masks must be nonnegative")

    def occupations(self, norb: int) -> np.ndarray:
        """Spin-orbital occupation vector, alpha block then beta block."""
        bits = [(self.alpha >> p) & 1 for p in range(norb)]
        bits += [(self.beta >> p) & 1 for p in range(norb)]
        return np.array(bits, dtype=float)


def _occ_list(mask: int) -> list[int]:
    out = []
    p = 0
    while mask >> p:
        if (mask >> p) & 1:
            out.append(p)
        p += 1
    return out


def _parity_between(mask: int, a: int, b: int) -> int:
    """(-1)^(number of occupied orbitals strictly between a and b)."""
    lo, hi = (a, b) if a < b else (b, a)
    window = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
    return -1 if bin(mask & window).count("1") % 2 else 1


def excitation_degree(det_i: Determinant, det_j: Determinant) -> int:
    return (bin(det_i.alpha ^ det_j.alpha).count("1")
            + bin(det_i.beta ^ det_j.beta).count("1")) // 2


def hartree_fock_determinant(norb: int, n_alpha: int, n_beta: int) -> Determinant:
    return Determinant((1 << n_alpha) - 1, (1 << n_beta) - 1)


def all_determinants(norb: int, n_alpha: int, n_beta: int) -> list[Determinant]:
    """The full configuration space at fixed per-sector electron counts."""
    from itertools import combinations

    def masks(count):
        return [sum(1 << p for p in combo) for combo in combinations(range(norb), count)]

    return [Determinant(a, b) for a in masks(n_alpha) for b in masks(n_beta)]


def _diagonal_element(det: Determinant, fci: FciData) -> float:
    h, eri = fci.h, fci.eri
    alpha, beta = _occ_list(det.alpha), _occ_list(det.beta)
    energy = sum(h[p, p] for p in alpha) + sum(h[p, p] for p in beta)
    for occ in (alpha, beta):
        for idx, p in enumerate(occ):
            for q in occ[idx + 1:]:
                energy += eri[p, p, q, q] - eri[p, q, q, p]
    for p in alpha:
        for q in beta:
            energy += eri[p, p, q, q]
    return float(energy)


def _single_element(hole: int, part: int, same: list[int], other: list[int],
                    sign: int, fci: FciData) -> float:
    h, eri = fci.h, fci.eri
    value = h[hole, part]
    for r in same:
        value += eri[hole, part, r, r] - eri[hole, r, r, part]
    for r in other:
        value += eri[hole, part, r, r]
    return float(sign * value)


def _single_excitation(mask_from: int, mask_to: int) -> tuple[int, int, int]:
    """(hole, particle, parity) for a one-orbital difference within a sector."""
    diff = mask_from ^ mask_to
    hole = (diff & mask_from).bit_length() - 1
    part = (diff & mask_to).bit_length() - 1
    return hole, part, _parity_between(mask_from, hole, part)


def _double_same_sector(mask_from: int, mask_to: int, fci: FciData) -> float:
    diff = mask_from ^ mask_to
    holes = _occ_list(diff & mask_from)
    parts = _occ_list(diff & mask_to)
    (m, n), (p, q) = holes, parts  # each ascending
    # apply the excitation as two sequential singles to track the parity
    sign = _parity_between(mask_from, m, p)
    intermediate = (mask_from & ~(1 << m)) | (1 << p)
    sign *= _parity_between(intermediate, n, q)
    value = fci.eri[m, p, n, q] - fci.eri[m, q, n, p]
    return float(sign * value)


def slater_condon(det_i: Determinant, det_j: Determinant, fci: FciData) -> float:
    """Hamiltonian matrix element <det_i| H |det_j> in Hartree.

    Zero for excitation degree above two; Hermitian by construction since the
    integral tables are real-symmetric.
    """
    d_alpha = bin(det_i.alpha ^ det_j.alpha).count("1") // 2
    d_beta = bin(det_i.beta ^ det_j.beta).count("1") // 2
    degree = d_alpha + d_beta
    if degree > 2:
        return 0.0
    if degree == 0:
        return _diagonal_element(det_j, fci)
    if degree == 1:
        if d_alpha == 1:
            hole, part, sign = _single_excitation(det_j.alpha, det_i.alpha)
            same = _occ_list(det_j.alpha & det_i.alpha)
            other = _occ_list(det_j.beta)
        else:
            hole, part, sign = _single_excitation(det_j.beta, det_i.beta)
            same = _occ_list(det_j.beta & det_i.beta)
            other = _occ_list(det_j.alpha)
        return _single_element(hole, part, same, other, sign, fci)
    if d_alpha == 2:
        return _double_same_sector(det_j.alpha, det_i.alpha, fci)
    if d_beta == 2:
        return _double_same_sector(det_j.beta, det_i.beta, fci)
    hole_a, part_a, sign_a = _single_excitation(det_j.alpha, det_i.alpha)
    hole_b, part_b, sign_b = _single_excitation(det_j.beta, det_i.beta)
    return float(sign_a * sign_b * fci.eri[hole_a, part_a, hole_b, part_b])


def project_and_diagonalize(dets: list[Determinant], fci: FciData) -> tuple[float, np.ndarray]:
    """Ground eigenpair of the Hamiltonian projected on the given subspace.

    Returns the lowest eigenvalue including the core energy and the
    normalized ground eigenvector in the determinant basis. Enlarging the
    subspace can only lower the returned energy (variational).
    """
    if not dets:
        raise ValueError("subspace is empty")
    if len(set(dets)) != len(dets):
        raise ValueError("determinants must be distinct")
    dim = len(dets)
    if dim > MAX_DENSE_DIM:
        raise ValueError(f"subspace dimension {dim} exceeds dense limit {MAX_DENSE_DIM}")
    matrix = np.zeros((dim, dim))
    for a in range(dim):
        matrix[a, a] = slater_condon(dets[a], dets[a], fci)
        for b in range(a + 1, dim):
            element = slater_condon(dets[a], dets[b], fci)
            matrix[a, b] = matrix[b, a] = element
    vals, vecs = np.linalg.eigh(matrix)
    return float(vals[0] + fci.core_energy), vecs[:, 0]
