"""Self-consistent configuration recovery over noisy bitstring samples.

Samples are boolean arrays of length 2*norb, alpha orbitals first, then beta.
A sample whose per-sector electron count differs from the target is corrupted;
instead of discarding it, bits are flipped probabilistically toward the
current average occupancy estimate until the counts are restored, and the
occupancy itself is refined over batched subspace diagonalizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fcidump import FciData
from .hamiltonian import Determinant, project_and_diagonalize

_RECOVER_SALT = 10_007


def weight_w(y: float, h: float, delta: float = 0.01) -> float:
    """Piecewise-linear flip weight: delta/h * y up to the filling factor h,
    then rising linearly to 1 at y = 1. Continuous, monotone, and anchored at
    w(0) = 0, w(h) = delta, w(1) = 1."""
    if not 0.0 < h < 1.0:
        raise ValueError(f"filling factor must lie in (0, 1), got {h}")
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"deviation must lie in [0, 1], got {y}")
    if y <= h:
        return delta / h * y
    return delta + (1.0 - delta) * (y - h) / (1.0 - h)


def recover_configuration(bits: np.ndarray, occupancy: np.ndarray, n_target: int,
                          rng: np.random.Generator, h: float | None = None,
                          delta: float = 0.01) -> np.ndarray:
    """Restore the electron count of one spin sector by weighted bit flips.

    When the sector holds too few electrons only 0 -> 1 flips occur, and vice
    versa; flip candidates are drawn sequentially without replacement with
    probability proportional to w(|bit - occupancy|). A sample that already
    matches the target is returned unchanged.
    """
    bits = np.asarray(bits, dtype=np.uint8).copy()
    occupancy = np.asarray(occupancy, dtype=float)
    if bits.shape != occupancy.shape:
        raise ValueError("bit string and occupancy vector lengths differ")
    m = bits.size
    if n_target > m or n_target < 0:
        raise ValueError(f"cannot place {n_target} electrons in {m} orbitals")
    count = int(bits.sum())
    if count == n_target:
        return bits
    fill = n_target / m if h is None else h
    if count < n_target:
        candidates = np.flatnonzero(bits == 0)
        new_value = 1
    else:
        candidates = np.flatnonzero(bits == 1)
        new_value = 0
    weights = np.array([weight_w(abs(float(bits[i]) - occupancy[i]), fill, delta)
                        for i in candidates])
    for _ in range(abs(count - n_target)):
        total = weights.sum()
        if total <= 0.0:
            probs = np.full(len(candidates), 1.0 / len(candidates))
        else:
            probs = weights / total
        pick = rng.choice(len(candidates), p=probs)
        bits[candidates[pick]] = new_value
        candidates = np.delete(candidates, pick)
        weights = np.delete(weights, pick)
    return bits


@dataclass(frozen=True)
class RecoveryConfig:
    iterations: int = 5
    num_batches: int = 10
    samples_per_batch: int = 300
    delta: float = 0.01
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.iterations, self.num_batches, self.samples_per_batch) < 1:
            raise ValueError("iterations, batches and batch size must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"smoothness must lie in (0, 1), got {self.delta}")


@dataclass
class RecoveryReport:
    """Per-iteration energies, occupancy estimates, and pool sizes."""

    status: str
    energies: list[list[float]] = field(default_factory=list)
    occupancies: list[np.ndarray] = field(default_factory=list)
    pool_sizes: list[int] = field(default_factory=list)

    @property
    def mean_energies(self) -> list[float]:
        return [float(np.mean(batch)) for batch in self.energies]

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "energies": [[float(e) for e in batch] for batch in self.energies],
            "occupancies": [occ.tolist() for occ in self.occupancies],
            "pool_sizes": list(self.pool_sizes),
            "mean_energies": self.mean_energies,
        }


def _split_sample(bits: np.ndarray, norb: int) -> Determinant:
    alpha = sum(1 << p for p in range(norb) if bits[p])
    beta = sum(1 << p for p in range(norb) if bits[norb + p])
    return Determinant(alpha, beta)


def _valid_mask(samples: np.ndarray, fci: FciData) -> np.ndarray:
    norb = fci.norb
    alpha_counts = samples[:, :norb].sum(axis=1)
    beta_counts = samples[:, norb:].sum(axis=1)
    return (alpha_counts == fci.n_alpha) & (beta_counts == fci.n_beta)


def _batch_energy_and_occupancy(pool: np.ndarray, fci: FciData, size: int,
                                rng: np.random.Generator) -> tuple[float, np.ndarray]:
    replace = pool.shape[0] < size
    idx = rng.choice(pool.shape[0], size=size, replace=replace)
    batch = pool[idx]
    dets = list({_split_sample(row, fci.norb) for row in batch})
    dets.sort(key=lambda d: (d.alpha, d.beta))
    energy, ground = project_and_diagonalize(dets, fci)
    occupancy = np.zeros(fci.num_spin_orbitals)
    for amplitude, det in zip(ground, dets):
        occupancy += (amplitude**2) * det.occupations(fci.norb)
    return energy, occupancy


def self_consistent_recovery(samples: np.ndarray, fci: FciData,
                             config: RecoveryConfig) -> RecoveryReport:
    """Iterative feedback loop over noisy samples.

    Iteration 0 keeps only the symmetry-preserving samples, splits them into
    batches, diagonalizes each batch subspace, and averages the batch
    occupancies. Every later iteration re-corrects the invalid samples with
    the current occupancy, merges them with the valid pool, and repeats.
    Originally valid samples are never discarded. Fully deterministic for a
    fixed seed; batches use derived seeds so they may run in any order.
    """
    samples = np.asarray(samples, dtype=np.uint8)
    if samples.ndim != 2 or samples.shape[1] != fci.num_spin_orbitals:
        raise ValueError("samples must be a (count, 2*norb) bit array")
    if samples.shape[0] == 0:
        raise ValueError("sample set is empty")
    valid = samples[_valid_mask(samples, fci)]
    invalid = samples[~_valid_mask(samples, fci)]
    if valid.shape[0] == 0:
        return RecoveryReport(status="no-valid-configurations")

    norb = fci.norb
    report = RecoveryReport(status="ok")
    occupancy = None
    for iteration in range(config.iterations):
        if iteration == 0 or invalid.shape[0] == 0:
            pool = valid
        else:
            recovered = np.empty_like(invalid)
            # salt separates the correction stream from the batch streams
            rng_rec = np.random.default_rng((config.seed, iteration, _RECOVER_SALT))
            for row_idx, row in enumerate(invalid):
                fixed_a = recover_configuration(row[:norb], occupancy[:norb],
                                                fci.n_alpha, rng_rec, delta=config.delta)
                fixed_b = recover_configuration(row[norb:], occupancy[norb:],
                                                fci.n_beta, rng_rec, delta=config.delta)
                recovered[row_idx, :norb] = fixed_a
                recovered[row_idx, norb:] = fixed_b
            pool = np.concatenate([valid, recovered], axis=0)
        report.pool_sizes.append(pool.shape[0])
        energies = []
        occ_sum = np.zeros(fci.num_spin_orbitals)
        for batch_idx in range(config.num_batches):
            rng_batch = np.random.default_rng((config.seed, iteration, batch_idx))
            energy, occ = _batch_energy_and_occupancy(pool, fci, config.samples_per_batch, rng_batch)
            energies.append(energy)
            occ_sum += occ
        occupancy = occ_sum / config.num_batches
        report.energies.append(energies)
        report.occupancies.append(occupancy)
    return report


def noisy_sampler(ground: np.ndarray, dets: list[Determinant], fci_or_norb,
                  flip_rate: float, shots: int, seed: int) -> np.ndarray:
    """Draw configurations proportionally to squared amplitudes, then flip
    each bit independently with the given rate. Stand-in for hardware
    readout of an eigenstate."""
    if not 0.0 <= flip_rate < 1.0:
        raise ValueError(f"flip rate must lie in [0, 1), got {flip_rate}")
    norb = fci_or_norb.norb if isinstance(fci_or_norb, FciData) else int(fci_or_norb)
    ground = np.asarray(ground, dtype=float)
    probs = ground**2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(dets), size=shots, p=probs)
    bits = np.stack([dets[k].occupations(norb) for k in picks]).astype(np.uint8)
    flips = rng.random(bits.shape) < flip_rate
    return bits ^ flips.astype(np.uint8)
