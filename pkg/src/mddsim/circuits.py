"""Time-sliced circuits with explicit idle intervals, pulse-insertion passes,
noisy simulation, and a serialized transform scenario with long idles.

A circuit is an ordered list of slices. Gates fire instantaneously at the
start of their slice; every qubit without a gate in a slice is idle for the
slice duration and decoheres under the combined channel. Pulse insertions are
zero-duration slices, so inserting a sequence never changes the total
duration.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from .noise import NoiseParams, _apply_local_raw, combined_channel
from .sequences import build_schedule, measure_expectations
from .states import (
    DensityMatrix,
    PAULI_X,
    PAULI_Y,
    PureState,
    _as_matrix,
    apply_matrix,
    embed_operator,
)

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

_TIME_EPS = 1e-9
MAX_SIM_QUBITS = 10


@dataclass(frozen=True)
class Gate:
    """A named unitary on an ordered tuple of qubits."""

    name: str
    qubits: tuple[int, ...]
    matrix: np.ndarray
    param: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (2 ** len(self.qubits),) * 2:
            raise ValueError(f"gate matrix shape {mat.shape} does not match {len(self.qubits)} qubits")
        object.__setattr__(self, "matrix", mat)

    def to_dict(self) -> dict:
        out: dict = {"name": self.name, "qubits": list(self.qubits)}
        if self.name == "cp":
            out["param"] = self.param
        elif self.name == "custom":
            out["matrix"] = [[[float(v.real), float(v.imag)] for v in row] for row in self.matrix]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Gate":
        name = data["name"]
        qubits = tuple(data["qubits"])
        if name == "h":
            return h_gate(*qubits)
        if name == "x":
            return x_gate(*qubits)
        if name == "y":
            return y_gate(*qubits)
        if name == "cp":
            return cp_gate(float(data["param"]), *qubits)
        if name == "custom":
            mat = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
            return custom_gate(mat, qubits)
        raise ValueError(f"unknown gate name {name!r}")


def h_gate(q: int) -> Gate:
    return Gate("h", (q,), _H)


def x_gate(q: int) -> Gate:
    return Gate("x", (q,), PAULI_X)


def y_gate(q: int) -> Gate:
    return Gate("y", (q,), PAULI_Y)


def cp_gate(lam: float, control: int, target: int) -> Gate:
    mat = np.diag([1.0, 1.0, 1.0, cmath.exp(1j * lam)]).astype(complex)
    return Gate("cp", (control, target), mat, param=float(lam))


def custom_gate(matrix, qubits) -> Gate:
    return Gate("custom", tuple(qubits), matrix)


def _pulse_gate(matrix: np.ndarray, qubit: int) -> Gate:
    if np.array_equal(matrix, PAULI_X):
        return x_gate(qubit)
    if np.array_equal(matrix, PAULI_Y):
        return y_gate(qubit)
    return custom_gate(matrix, (qubit,))


@dataclass(frozen=True)
class Slice:
    """One time slice: gates firing at its start, then ``duration`` of idling
    for every qubit without a gate.

    ``shielded`` lists qubits occupied by a gate for the whole slice they were
    split out of; they take no idle noise and are not considered idle. It only
    appears on tail fragments produced by pulse insertion.
    """

    duration: float
    gates: tuple[Gate, ...] = ()
    shielded: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.duration < 0:
            raise ValueError(f"slice duration must be nonnegative, got {self.duration}")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "shielded", tuple(int(q) for q in self.shielded))
        touched: set[int] = set()
        for gate in self.gates:
            if touched & set(gate.qubits):
                raise ValueError("gate qubit sets within a slice must be disjoint")
            touched |= set(gate.qubits)

    def occupied(self) -> set[int]:
        out = set(self.shielded)
        for gate in self.gates:
            out |= set(gate.qubits)
        return out

    def touches(self, qubit: int) -> bool:
        return qubit in self.occupied()


@dataclass(frozen=True)
class ScheduledCircuit:
    num_qubits: int
    slices: tuple[Slice, ...]

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        object.__setattr__(self, "slices", tuple(self.slices))
        for sl in self.slices:
            for gate in sl.gates:
                if any(q < 0 or q >= self.num_qubits for q in gate.qubits):
                    raise ValueError(f"gate qubits {gate.qubits} out of range")

    @property
    def total_duration(self) -> float:
        return float(sum(sl.duration for sl in self.slices))

    def to_dict(self) -> dict:
        out = []
        for sl in self.slices:
            entry: dict = {"duration": sl.duration, "gates": [g.to_dict() for g in sl.gates]}
            if sl.shielded:
                entry["shielded"] = list(sl.shielded)
            out.append(entry)
        return {"num_qubits": self.num_qubits, "slices": out}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ScheduledCircuit":
        slices = tuple(
            Slice(float(s["duration"]),
                  tuple(Gate.from_dict(g) for g in s.get("gates", ())),
                  tuple(s.get("shielded", ())))
            for s in data["slices"]
        )
        return cls(int(data["num_qubits"]), slices)

    @classmethod
    def from_json(cls, text: str) -> "ScheduledCircuit":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class IdleInterval:
    qubit: int
    start: float
    duration: float


def identify_idle(circuit: ScheduledCircuit, threshold: float) -> list[IdleInterval]:
    """Maximal contiguous gate-free runs per qubit longer than ``threshold``.

    The run before a qubit's first gate is skipped: under as-late-as-possible
    scheduling a qubit rests in its ground state, a fixed point of the noise,
    until first touched. Trailing runs before readout are included.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    intervals = []
    for q in range(circuit.num_qubits):
        if not any(sl.touches(q) for sl in circuit.slices):
            continue
        seen_gate = False
        run_start, run_length = 0.0, 0.0
        now = 0.0
        for sl in circuit.slices:
            if sl.touches(q):
                if seen_gate and run_length > threshold:
                    intervals.append(IdleInterval(q, run_start, run_length))
                seen_gate = True
                run_start, run_length = now + sl.duration, 0.0
            else:
                run_length += sl.duration
            now += sl.duration
        if seen_gate and run_length > threshold:
            intervals.append(IdleInterval(q, run_start, run_length))
    intervals.sort(key=lambda iv: (iv.start, iv.qubit))
    return intervals


def _simulate_raw(circuit: ScheduledCircuit, noise: NoiseParams,
                  initial: PureState | DensityMatrix | None,
                  until_time: float | None = None) -> np.ndarray:
    n = circuit.num_qubits
    if n > MAX_SIM_QUBITS:
        raise ValueError(f"density-matrix simulation supports at most {MAX_SIM_QUBITS} qubits")
    if initial is None:
        rho = np.zeros((2**n, 2**n), dtype=complex)
        rho[0, 0] = 1.0
    else:
        rho, n_init = _as_matrix(initial)
        if n_init != n:
            raise ValueError("initial state size does not match the circuit")
        rho = rho.copy()
    now = 0.0
    for sl in circuit.slices:
        if until_time is not None and now + sl.duration > until_time + _TIME_EPS:
            break
        for gate in sl.gates:
            rho = apply_matrix(gate.matrix, rho, gate.qubits, n)
        if sl.duration > 0:
            channel = combined_channel(noise, sl.duration)
            busy = sl.occupied()
            for q in range(n):
                if q not in busy:
                    rho = _apply_local_raw(channel, rho, q, n)
        now += sl.duration
    return rho


def simulate(circuit: ScheduledCircuit, noise: NoiseParams,
             initial: PureState | DensityMatrix | None = None) -> DensityMatrix:
    """Deterministic slice-by-slice evolution: ideal gates, then the combined
    channel for the slice duration on every idle qubit."""
    return DensityMatrix(_simulate_raw(circuit, noise, initial))


def circuit_unitary(circuit: ScheduledCircuit) -> np.ndarray:
    """Product of all gate unitaries, ignoring noise and durations."""
    n = circuit.num_qubits
    total = np.eye(2**n, dtype=complex)
    for sl in circuit.slices:
        for gate in sl.gates:
            total = embed_operator(gate.matrix, gate.qubits, n) @ total
    return total


def _insert_pulse(slices: list[Slice], when: float, gate: Gate) -> None:
    pulse = Slice(0.0, (gate,))
    now = 0.0
    for i, sl in enumerate(slices):
        end = now + sl.duration
        if when > end - _TIME_EPS:
            now = end
            continue
        if when > now + _TIME_EPS:
            # gates fire at the original slice start and occupy their qubits
            # for the whole slice, so the tail fragment shields them
            head = Slice(when - now, sl.gates, sl.shielded)
            tail = Slice(end - when, (), tuple(sorted(sl.occupied())))
            slices[i:i + 1] = [head, pulse, tail]
        else:
            slices.insert(i, pulse)
        return
    slices.append(pulse)


def insert_dd(circuit: ScheduledCircuit, strategy: str, noise: NoiseParams,
              threshold: float, shots: int | None = None,
              seed: int | None = None) -> ScheduledCircuit:
    """Insert the chosen sequence into every idle interval above threshold.

    Intervals are processed in start-time order. For the measurement-driven
    strategy the Pauli expectations come from simulating the circuit built so
    far up to the interval start (exact, or binomially sampled when ``shots``
    is given), mirroring the iterated measure-compute-insert workflow.
    """
    strategy = strategy.lower()
    if strategy == "none":
        return circuit
    if strategy not in ("mdd", "mdd+xx"):
        build_schedule(strategy, 1.0)  # reject unknown names before touching the circuit
    intervals = identify_idle(circuit, threshold)
    slices = list(circuit.slices)
    rng = np.random.default_rng(seed) if shots is not None else None
    for iv in intervals:
        exp = None
        if strategy in ("mdd", "mdd+xx"):
            prefix = ScheduledCircuit(circuit.num_qubits, tuple(slices))
            rho = _simulate_raw(prefix, noise, None, until_time=iv.start)
            exp = measure_expectations(DensityMatrix(rho), iv.qubit, shots=shots, rng=rng)
        schedule = build_schedule(strategy, iv.duration, exp)
        for offset, pulse in schedule.pulses:
            _insert_pulse(slices, iv.start + offset, _pulse_gate(pulse.matrix, iv.qubit))
    return ScheduledCircuit(circuit.num_qubits, tuple(slices))


def sample_counts(rho: DensityMatrix, shots: int, seed) -> dict[str, int]:
    """Seeded categorical sampling from the computational-basis diagonal."""
    if shots < 1:
        raise ValueError("shots must be positive")
    probs = np.maximum(np.diagonal(rho.entries).real, 0.0)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs)
    n = rho.num_qubits
    return {format(idx, f"0{n}b"): int(count) for idx, count in enumerate(draws) if count}


def success_probability(samples: dict[str, int], target: str) -> float:
    """Percentage of shots that returned the target bit string."""
    total = sum(samples.values())
    if total <= 0:
        raise ValueError("sample counts are empty")
    return 100.0 * samples.get(target, 0) / total


@dataclass(frozen=True)
class GateDurations:
    """Slice durations (us) for the serialized transform scenario."""

    h: float = 2.0
    cp: float = 4.0
    swap: float = 6.0
    prep: float = 2.0

    def __post_init__(self) -> None:
        if min(self.h, self.cp, self.swap, self.prep) <= 0:
            raise ValueError("gate durations must be positive")


def qft_circuit(n: int, durations: GateDurations = GateDurations()) -> ScheduledCircuit:
    """Fully serialized transform circuit: one gate per slice, so early
    qubits accumulate idle time while later ones are processed.

    The gate network is the textbook ladder of Hadamards and controlled
    phases, closed by explicit swaps, so the total unitary is exactly the
    discrete Fourier matrix F[x, y] = exp(2 pi i x y / 2^n) / 2^(n/2).

    Construction works up to the simulation limit; density-matrix simulation
    stays desk-friendly up to about six qubits.
    """
    if not 2 <= n <= MAX_SIM_QUBITS:
        raise ValueError(f"scenario supports 2..{MAX_SIM_QUBITS} qubits, got {n}")
    slices = []
    for j in range(n):
        slices.append(Slice(durations.h, (h_gate(j),)))
        for k in range(j + 1, n):
            slices.append(Slice(durations.cp, (cp_gate(math.pi / 2 ** (k - j), k, j),)))
    for j in range(n // 2):
        slices.append(Slice(durations.swap, (custom_gate(_SWAP, (j, n - 1 - j)),)))
    return ScheduledCircuit(n, tuple(slices))


def alternating_target(n: int) -> str:
    return "".join("01"[i % 2] for i in range(n))


def qft_success_scenario(n: int, durations: GateDurations = GateDurations()) -> tuple[ScheduledCircuit, str]:
    """Transform scenario with a deterministic ideal outcome.

    Two parallel preparation slices (Hadamards, then single-qubit phases)
    place the transform preimage of the alternating target string on the
    all-zeros input; the serialized transform then maps it to the target with
    ideal success probability 100%.
    """
    target = alternating_target(n)
    y = int(target, 2)
    core = qft_circuit(n, durations)
    prep_h = Slice(durations.prep, tuple(h_gate(q) for q in range(n)))
    phases = []
    for k in range(n):
        theta = -2.0 * math.pi * y / 2 ** (k + 1)
        phases.append(custom_gate(np.diag([1.0, cmath.exp(1j * theta)]), (k,)))
    prep_p = Slice(durations.prep, tuple(phases))
    return ScheduledCircuit(n, (prep_h, prep_p) + core.slices), target


def qft_success_probability(n: int, noise: NoiseParams, strategy: str,
                            threshold: float = 0.24, shots: int = 100_000,
                            seed: int = 0, measure_shots: int | None = None,
                            durations: GateDurations = GateDurations()) -> float:
    """End-to-end success probability of the transform scenario under noise,
    with the chosen sequence inserted into qualifying idle intervals."""
    circuit, target = qft_success_scenario(n, durations)
    dressed = insert_dd(circuit, strategy, noise, threshold,
                        shots=measure_shots, seed=seed)
    rho = simulate(dressed, noise)
    counts = sample_counts(rho, shots, seed=seed + 1)
    return success_probability(counts, target)
