"""Decoherence machinery: the combined relaxation + dephasing Kraus channel,
Lindblad generators, and filter-function dephasing under colored noise.

Scalar conventions used throughout (durations in microseconds):

    s       = exp(-t / (2 T1))   amplitude survival factor
    p       = 1 - s^2            excitation decay probability
    gamma_p = exp(-t / Tp)       pure-dephasing factor, 1/Tp = 1/T2 - 1/(2 T1)
    a, b    = (1 +- s) / 2
    alpha, beta = (1 +- gamma_p) / 2

With these, the channel maps rho to
[[rho00 + p rho11, e^{-t/T2} rho01], [e^{-t/T2} rho10, (1-p) rho11]],
so the off-diagonal factor factorizes as s * gamma_p = e^{-t/T2} and the
ground state |0><0| is an exact fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .states import (
    ATOL,
    DensityMatrix,
    ID2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    PureState,
    _as_matrix,
    apply_matrix,
    embed_operator,
)

LOWERING = 0.5 * (PAULI_X + 1j * PAULI_Y)  # |0><1|


class QuadratureError(RuntimeError):
    """Raised when the spectral integral fails to converge."""


@dataclass(frozen=True)
class NoiseParams:
    """Relaxation time T1 and total dephasing time T2, both in microseconds.

    Infinite values are allowed and describe a noiseless direction.
    """

    t1: float
    t2: float

    def __post_init__(self) -> None:
        if not self.t1 > 0:
            raise ValueError(f"T1 must be positive, got {self.t1}")
        if not 0 < self.t2 <= 2 * self.t1:
            raise ValueError(f"T2 must satisfy 0 < T2 <= 2*T1, got T2={self.t2}, T1={self.t1}")

    @property
    def tp(self) -> float:
        """Pure-dephasing time: 1/Tp = 1/T2 - 1/(2 T1)."""
        rate = 1.0 / self.t2 - 1.0 / (2.0 * self.t1)
        return math.inf if rate <= 0 else 1.0 / rate


NOISELESS = NoiseParams(t1=math.inf, t2=math.inf)


@dataclass(frozen=True)
class KrausChannel:
    """A single-qubit channel given by its Kraus operators.

    Channels built by :func:`combined_channel` and
    :func:`dephasing_channel_from_chi` also carry the scalar decomposition
    (s, p, gamma_p, a, b, alpha, beta) used by the closed-form fidelity
    expressions; ad-hoc channels leave ``scalars`` as None.
    """

    operators: tuple
    scalars: dict | None = None

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(m, dtype=complex) for m in self.operators)
        dim = ops[0].shape[0]
        total = sum(m.conj().T @ m for m in ops)
        if np.max(np.abs(total - np.eye(dim))) > ATOL:
            raise ValueError("Kraus operators do not satisfy completeness within 1e-12")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Sum_k M_k rho M_k^dag on a raw matrix of matching dimension."""
        out = np.zeros_like(rho, dtype=complex)
        for m in self.operators:
            out += m @ rho @ m.conj().T
        return out


def _channel_from_scalars(s: float, gamma_p: float) -> KrausChannel:
    p = 1.0 - s * s
    a = (1.0 + s) / 2.0
    b = (1.0 - s) / 2.0
    alpha = (1.0 + gamma_p) / 2.0
    beta = (1.0 - gamma_p) / 2.0
    k_ad1 = a * ID2 + b * PAULI_Z       # diag(1, s)
    k_ad2 = math.sqrt(p) * LOWERING
    m11 = math.sqrt(alpha) * k_ad1
    m12 = math.sqrt(alpha) * k_ad2
    m21 = math.sqrt(beta) * (b * ID2 + a * PAULI_Z)   # diag(1, -s) scaled
    m22 = math.sqrt(beta) * k_ad2
    scalars = {"s": s, "p": p, "gamma_p": gamma_p, "a": a, "b": b, "alpha": alpha, "beta": beta}
    return KrausChannel(operators=(m11, m12, m21, m22), scalars=scalars)


def combined_channel(params: NoiseParams, t: float) -> KrausChannel:
    """Simultaneous amplitude damping and dephasing over a duration t >= 0."""
    if t < 0:
        raise ValueError(f"duration must be nonnegative, got {t}")
    s = math.exp(-t / (2.0 * params.t1))
    gamma_p = math.exp(-t / params.tp)
    return _channel_from_scalars(s, gamma_p)


def dephasing_channel_from_chi(chi: float) -> KrausChannel:
    """Pure phase damping that multiplies off-diagonals by exp(-chi)."""
    if chi < 0:
        raise ValueError(f"chi must be nonnegative, got {chi}")
    return _channel_from_scalars(s=1.0, gamma_p=math.exp(-chi))


def apply_local(channel: KrausChannel, state: PureState | DensityMatrix, qubit: int) -> DensityMatrix:
    """Apply a single-qubit channel to one qubit of a larger state."""
    rho, n = _as_matrix(state)
    return DensityMatrix(_apply_local_raw(channel, rho, qubit, n))


def _apply_local_raw(channel: KrausChannel, rho: np.ndarray, qubit: int, num_qubits: int) -> np.ndarray:
    if not 0 <= qubit < num_qubits:
        raise ValueError(f"qubit {qubit} out of range for {num_qubits} qubits")
    out = np.zeros_like(rho, dtype=complex)
    for m in channel.operators:
        out += apply_matrix(m, rho, [qubit], num_qubits)
    return out


@dataclass(frozen=True)
class JumpOperator:
    """A Lindblad jump operator with its rate (1/us) and target qubits."""

    matrix: np.ndarray
    rate: float
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rate < 0:
            raise ValueError(f"jump rate must be nonnegative, got {self.rate}")
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))


def relaxation_dephasing_jumps(params: NoiseParams, qubit: int = 0) -> list[JumpOperator]:
    """Jump operators generating :func:`combined_channel` as a semigroup.

    The dephasing jump Z enters with rate 1/(2 Tp): a Z jump at rate G decays
    coherences as exp(-2 G t), so G = 1/(2 Tp) reproduces the channel factor
    exp(-t/Tp).
    """
    g1 = 0.0 if math.isinf(params.t1) else 1.0 / params.t1
    tp = params.tp
    g2 = 0.0 if math.isinf(tp) else 1.0 / (2.0 * tp)
    return [
        JumpOperator(LOWERING, g1, (qubit,)),
        JumpOperator(PAULI_Z, g2, (qubit,)),
    ]


def lindblad_derivative(rho: DensityMatrix | np.ndarray, hamiltonian: np.ndarray | None,
                        jumps: list[JumpOperator]) -> np.ndarray:
    """Right-hand side of the master equation:

    drho/dt = -i [H, rho] + sum_k G_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2)
    """
    mat, n = _as_matrix(rho)
    dim = mat.shape[0]
    out = np.zeros_like(mat, dtype=complex)
    if hamiltonian is not None:
        h = np.asarray(hamiltonian, dtype=complex)
        if h.shape != mat.shape:
            raise ValueError(f"Hamiltonian shape {h.shape} does not match state {mat.shape}")
        out += -1j * (h @ mat - mat @ h)
    for jump in jumps:
        full = embed_operator(jump.matrix, jump.qubits, n) if jump.matrix.shape[0] != dim \
            else np.asarray(jump.matrix, dtype=complex)
        ll = full.conj().T @ full
        out += jump.rate * (full @ mat @ full.conj().T - 0.5 * (ll @ mat + mat @ ll))
    return out


@dataclass(frozen=True)
class SpectralDensity:
    """Noise spectrum with Gaussian cutoff at omega_c (1/us).

    kind "ohmic":      S(w) = w   * exp(-(w/omega_c)^2)
    kind "one_over_f": S(w) = 1/w * exp(-(w/omega_c)^2)
    """

    kind: str
    omega_c: float

    def __post_init__(self) -> None:
        if self.kind not in ("ohmic", "one_over_f"):
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        if not self.omega_c > 0:
            raise ValueError(f"cutoff frequency must be positive, got {self.omega_c}")

    def value(self, omega: float) -> float:
        env = math.exp(-((omega / self.omega_c) ** 2))
        if self.kind == "ohmic":
            return omega * env
        return env / omega


def filter_function(pulse_times, t: float, omega: float) -> float:
    """Squared spectral weight |sum of sign-switch phasors|^2 of a pi-pulse train.

    For n pulses at times t_j strictly inside (0, t):

        F(w t) = |1 + (-1)^(n+1) e^{i w t} + 2 sum_j (-1)^j e^{i w t_j}|^2

    With no pulses this reduces to 4 sin^2(w t / 2), and F(0) = 0 for every
    pulse configuration.
    """
    times = [float(tj) for tj in pulse_times]
    if any(times[i] >= times[i + 1] for i in range(len(times) - 1)):
        raise ValueError("pulse times must be strictly increasing")
    if times and (times[0] <= 0 or times[-1] >= t):
        raise ValueError("pulse times must lie strictly inside (0, t)")
    n = len(times)
    total = 1.0 + (-1.0) ** (n + 1) * np.exp(1j * omega * t)
    for j, tj in enumerate(times, start=1):
        total += 2.0 * (-1.0) ** j * np.exp(1j * omega * tj)
    return float(abs(total) ** 2)


def chi_integral(spectrum: SpectralDensity, pulse_times, t: float,
                 abs_tol: float = 1e-10, max_subdivisions: int = 1600) -> float:
    """Dephasing exponent chi(t) = (2/pi) * int_0^inf [S(w)/w] F(w t) dw.

    The integral is truncated at 10 * omega_c, where the Gaussian cutoff makes
    the tail negligible, and the w -> 0 endpoint is evaluated at its analytic
    limit (the integrand vanishes there for the Ohmic spectrum and stays
    finite for 1/f because F grows at least quadratically in w).
    """
    if t <= 0:
        raise ValueError(f"duration must be positive, got {t}")
    times = list(pulse_times)
    w_floor = 1e-9 / t

    def integrand(w: float) -> float:
        w = max(w, w_floor)  # analytic limit: F ~ w^2 or faster cancels S/w singularities
        return spectrum.value(w) / w * filter_function(times, t, w)

    upper = 10.0 * spectrum.omega_c
    result, abserr, info = integrate.quad(
        integrand, 0.0, upper, epsabs=abs_tol, epsrel=1e-10,
        limit=max_subdivisions, full_output=True,
    )[:3]
    if abserr > max(1e-7, 1e-5 * abs(result)):
        raise QuadratureError(
            f"chi integral did not converge: estimate {result!r}, error {abserr!r}, "
            f"{info['last']} subdivisions used of {max_subdivisions}"
        )
    return max(float((2.0 / math.pi) * result), 0.0)
