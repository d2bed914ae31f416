"""Dense complex linear algebra for small multi-qubit systems.

States are immutable after construction and validated on construction.
Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
computational-basis index: for two qubits, index 1 is |01> (qubit 0 in |0>,
qubit 1 in |1>).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

ATOL = 1e-12
MAX_PURE_QUBITS = 12
MAX_MIXED_QUBITS = 10


def _num_qubits(dim: int) -> int:
    n = int(round(math.log2(dim)))
    if n < 1 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.flags.writeable = False
    return out


class PureState:
    """Normalized state vector of ``num_qubits`` qubits (1 <= N <= 12)."""

    __slots__ = ("amplitudes", "num_qubits")

    def __init__(self, amplitudes) -> None:
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        n = _num_qubits(amps.size)
        if n > MAX_PURE_QUBITS:
            raise ValueError(f"pure states support at most {MAX_PURE_QUBITS} qubits, got {n}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state vector norm {norm!r} deviates from 1 beyond {ATOL}")
        object.__setattr__(self, "amplitudes", _freeze(amps))
        object.__setattr__(self, "num_qubits", n)

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    @classmethod
    def computational(cls, bits: str) -> "PureState":
        """Basis state from a bit string, e.g. ``"01"`` -> |01>."""
        n = len(bits)
        amps = np.zeros(2**n, dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix (N <= 10 qubits)."""

    __slots__ = ("entries", "num_qubits")

    def __init__(self, entries) -> None:
        mat = np.asarray(entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        n = _num_qubits(mat.shape[0])
        if n > MAX_MIXED_QUBITS:
            raise ValueError(f"density matrices support at most {MAX_MIXED_QUBITS} qubits, got {n}")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL:
            raise ValueError("density matrix is not Hermitian within 1e-12")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > ATOL:
            raise ValueError(f"density matrix trace {tr!r} deviates from 1 beyond {ATOL}")
        if np.min(np.linalg.eigvalsh(mat)) < -1e-10:
            raise ValueError("density matrix has an eigenvalue below -1e-10")
        object.__setattr__(self, "entries", _freeze(mat))
        object.__setattr__(self, "num_qubits", n)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class BlochVector:
    """Expectation triple (<X>, <Y>, <Z>) of a single-qubit state."""

    rx: float
    ry: float
    rz: float

    def __post_init__(self) -> None:
        if self.r > 1.0 + ATOL:
            raise ValueError(f"Bloch vector norm {self.r!r} exceeds 1")

    @property
    def r(self) -> float:
        return math.sqrt(self.rx**2 + self.ry**2 + self.rz**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.rx, self.ry, self.rz])


class SingleQubitUnitary:
    """A 2x2 unitary, optionally tagged with the (theta, phi) rotation angles
    used to construct it from measured expectation values."""

    __slots__ = ("matrix", "theta", "phi")

    def __init__(self, matrix, theta: float | None = None, phi: float | None = None) -> None:
        mat = np.asarray(matrix, dtype=complex)
        if mat.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {mat.shape}")
        if np.max(np.abs(mat.conj().T @ mat - ID2)) > ATOL:
            raise ValueError("matrix is not unitary within 1e-12")
        object.__setattr__(self, "matrix", _freeze(mat))
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    def __setattr__(self, name, value):
        raise AttributeError("SingleQubitUnitary is immutable")

    def dagger(self) -> "SingleQubitUnitary":
        return SingleQubitUnitary(self.matrix.conj().T)


def _as_matrix(state: PureState | DensityMatrix | np.ndarray) -> tuple[np.ndarray, int]:
    if isinstance(state, PureState):
        rho = np.outer(state.amplitudes, state.amplitudes.conj())
        return rho, state.num_qubits
    if isinstance(state, DensityMatrix):
        return state.entries, state.num_qubits
    mat = np.asarray(state, dtype=complex)
    return mat, _num_qubits(mat.shape[0])


def reduced_density(state: PureState | DensityMatrix, qubits) -> DensityMatrix:
    """Partial trace onto the given qubit subset.

    The complement of ``qubits`` is traced out; the reduced system keeps the
    ascending qubit order regardless of the order given.
    """
    keep = sorted(set(int(q) for q in qubits))
    if len(keep) != len(list(qubits)):
        raise ValueError("qubit indices must be distinct")
    rho, n = _as_matrix(state)
    if not keep:
        raise ValueError("must keep at least one qubit")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"qubit indices {keep} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    tensor = rho.reshape([2] * (2 * n))
    dims_left = n
    for q in sorted(traced, reverse=True):
        tensor = np.trace(tensor, axis1=q, axis2=q + dims_left)
        dims_left -= 1
    d = 2 ** len(keep)
    return DensityMatrix(tensor.reshape(d, d))


def bloch_vector(rho: DensityMatrix) -> BlochVector:
    """Pauli expectations of a single-qubit density matrix."""
    if rho.num_qubits != 1:
        raise ValueError("bloch_vector requires a single-qubit density matrix")
    m = rho.entries
    return BlochVector(
        rx=float(np.trace(m @ PAULI_X).real),
        ry=float(np.trace(m @ PAULI_Y).real),
        rz=float(np.trace(m @ PAULI_Z).real),
    )


def density_from_bloch(b: BlochVector) -> DensityMatrix:
    """Inverse of :func:`bloch_vector`: rho = (I + r . sigma) / 2."""
    mat = 0.5 * (ID2 + b.rx * PAULI_X + b.ry * PAULI_Y + b.rz * PAULI_Z)
    return DensityMatrix(mat)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    # Hermitian eigendecomposition with eigenvalue clamping at 0.
    vals, vecs = np.linalg.eigh(mat)
    return (vecs * np.sqrt(np.maximum(vals, 0.0))) @ vecs.conj().T


def fidelity(x: DensityMatrix, y: DensityMatrix) -> float:
    """Uhlmann fidelity F(X, Y) = (Tr sqrt(sqrt(X) Y sqrt(X)))^2 in [0, 1]."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    sx = _psd_sqrt(x.entries)
    inner = _psd_sqrt(sx @ y.entries @ sx)
    val = float(np.trace(inner).real) ** 2
    return min(max(val, 0.0), 1.0)


def entanglement_fidelity(psi: PureState, channel_output: DensityMatrix) -> float:
    """Overlap <psi| rho |psi> of a pure input with its image under a channel.

    This is the brute-force definition evaluated in the full 2^N-dimensional
    space; closed-form shortcuts are tested against it.
    """
    if psi.dim != channel_output.dim:
        raise ValueError(f"dimension mismatch: {psi.dim} vs {channel_output.dim}")
    amps = psi.amplitudes
    return float((amps.conj() @ channel_output.entries @ amps).real)


def haar_random_state(n: int, seed) -> PureState:
    """Haar-random pure state via a normalized standard complex Gaussian vector."""
    if not 1 <= n <= MAX_PURE_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_PURE_QUBITS}], got {n}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return PureState(z / np.linalg.norm(z))


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Gaussian."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def embed_operator(op: np.ndarray, targets, num_qubits: int) -> np.ndarray:
    """Promote an operator on ``targets`` to the full 2^N space.

    ``targets`` lists the qubits the operator acts on, in the tensor order of
    ``op`` (first target is the leftmost factor of ``op``).
    """
    targets = [int(q) for q in targets]
    k = len(targets)
    op = np.asarray(op, dtype=complex)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} target qubits")
    if len(set(targets)) != k:
        raise ValueError("target qubits must be distinct")
    if any(q < 0 or q >= num_qubits for q in targets):
        raise ValueError(f"target qubits {targets} out of range for {num_qubits} qubits")
    rest = [q for q in range(num_qubits) if q not in targets]
    full = np.kron(op, np.eye(2 ** len(rest), dtype=complex))
    # full acts on qubit order targets + rest; permute back to 0..N-1.
    order = targets + rest
    perm = np.argsort(order)  # position of original qubit q in the permuted order
    tensor = full.reshape([2] * (2 * num_qubits))
    tensor = tensor.transpose(list(perm) + [p + num_qubits for p in perm])
    return np.ascontiguousarray(tensor.reshape(2**num_qubits, 2**num_qubits))


def apply_matrix(op: np.ndarray, rho: np.ndarray, targets, num_qubits: int) -> np.ndarray:
    """Return M rho M^dag with M acting on ``targets`` (raw ndarray path)."""
    full = embed_operator(op, targets, num_qubits)
    return full @ rho @ full.conj().T


def apply_unitary(u: np.ndarray, state: PureState | DensityMatrix, targets) -> DensityMatrix:
    """Conjugate a state by a unitary acting on the given qubits."""
    rho, n = _as_matrix(state)
    return DensityMatrix(apply_matrix(u, rho, targets, n))
