"""Shared test oracles, kept deliberately independent of the library paths
they are used to check."""

import math

import numpy as np

from mddsim.noise import NoiseParams, combined_channel


def naive_reduced(rho: np.ndarray, num_qubits: int, keep: list[int]) -> np.ndarray:
    """Partial trace by explicit index summation over a nested loop.

    Bit 0 of a basis index is the most significant (qubit 0 leftmost).
    """
    keep = sorted(keep)
    traced = [q for q in range(num_qubits) if q not in keep]
    dk = 2 ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)

    def full_index(keep_bits: int, traced_bits: int) -> int:
        idx = 0
        for pos, q in enumerate(keep):
            bit = (keep_bits >> (len(keep) - 1 - pos)) & 1
            idx |= bit << (num_qubits - 1 - q)
        for pos, q in enumerate(traced):
            bit = (traced_bits >> (len(traced) - 1 - pos)) & 1
            idx |= bit << (num_qubits - 1 - q)
        return idx

    for a in range(dk):
        for b in range(dk):
            for c in range(2 ** len(traced)):
                out[a, b] += rho[full_index(a, c), full_index(b, c)]
    return out


def channel_from_p_gamma(p: float, gamma_p: float):
    """Combined channel with a prescribed damping probability and dephasing
    factor, built through the public time-parameterized constructor."""
    s = math.sqrt(1.0 - p)
    t1 = math.inf if s == 1.0 else -1.0 / (2.0 * math.log(s))
    tp = math.inf if gamma_p == 1.0 else -1.0 / math.log(gamma_p)
    inv_t2 = (0.0 if math.isinf(tp) else 1.0 / tp) + 1.0 / (2.0 * t1)
    t2 = math.inf if inv_t2 == 0.0 else 1.0 / inv_t2
    return combined_channel(NoiseParams(t1=t1, t2=t2), t=1.0)


def purify(sigma: np.ndarray) -> np.ndarray:
    """Two-qubit purification of a single-qubit state, system on qubit 0."""
    vals, vecs = np.linalg.eigh(sigma)
    vals = np.maximum(vals, 0.0)
    psi = np.zeros(4, dtype=complex)
    for k in range(2):
        # |psi> = sum_k sqrt(l_k) |v_k>_sys |k>_env
        psi += math.sqrt(vals[k]) * np.kron(vecs[:, k], np.eye(2)[k])
    return psi / np.linalg.norm(psi)


def random_single_qubit_density(rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    m = z @ z.conj().T
    return m / np.trace(m)


def fock_space_hamiltonian(fci) -> np.ndarray:
    """Dense 2^M x 2^M second-quantized operator built from sparse ladder
    matrices; site 0 is the most significant bit, alpha block first."""
    import scipy.sparse as sp

    m = fci.num_spin_orbitals
    z = sp.csr_matrix(np.diag([1.0, -1.0]))
    raise_op = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))
    eye = sp.identity(2, format="csr")

    def create(site):
        ops = [z] * site + [raise_op] + [eye] * (m - 1 - site)
        out = ops[0]
        for op in ops[1:]:
            out = sp.kron(out, op, format="csr")
        return out

    a_dag = [create(site) for site in range(m)]
    a = [op.T for op in a_dag]
    total = sp.csr_matrix((2**m, 2**m))
    norb = fci.norb
    for p in range(norb):
        for r in range(norb):
            if fci.h[p, r] == 0.0:
                continue
            for spin in (0, 1):
                total = total + fci.h[p, r] * (a_dag[p + spin * norb] @ a[r + spin * norb])
    for p in range(norb):
        for r in range(norb):
            for q in range(norb):
                for s in range(norb):
                    v = fci.eri[p, r, q, s]
                    if v == 0.0:
                        continue
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            total = total + 0.5 * v * (a_dag[p + s1 * norb] @ a_dag[q + s2 * norb]
                                                       @ a[s + s2 * norb] @ a[r + s1 * norb])
    return total.toarray()


def fock_index(det, norb: int) -> int:
    m = 2 * norb
    idx = 0
    for p in range(norb):
        if (det.alpha >> p) & 1:
            idx |= 1 << (m - 1 - p)
        if (det.beta >> p) & 1:
            idx |= 1 << (m - 1 - (norb + p))
    return idx
