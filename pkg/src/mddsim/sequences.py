"""Pulse-schedule builders and the stroboscopic evolution engine.

All pulses are ideal and instantaneous; free evolution between pulses is the
combined relaxation/dephasing channel. Canonical sequence names are the
strings ``none | mdd | xx | xy4 | udd<n> | qdd<n> | mdd+xx``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .noise import NoiseParams, _apply_local_raw, combined_channel
from .states import (
    DensityMatrix,
    ID2,
    PAULI_X,
    PAULI_Y,
    PureState,
    SingleQubitUnitary,
    _as_matrix,
    apply_matrix,
    bloch_vector,
    reduced_density,
)

_KIND_RE = re.compile(r"^(udd|qdd)(\d+)$")


def rot_y(angle: float) -> np.ndarray:
    """exp(-i angle Y / 2)."""
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rot_z(angle: float) -> np.ndarray:
    """exp(-i angle Z / 2)."""
    return np.array([[np.exp(-1j * angle / 2.0), 0], [0, np.exp(1j * angle / 2.0)]], dtype=complex)


@dataclass(frozen=True)
class PauliExpectations:
    """Measured or exact Pauli expectations of a single qubit.

    ``shots`` is None for exact expectations; otherwise each component came
    from binomial sampling with that many shots, which allows the norm to
    overshoot 1 by statistical fluctuation.
    """

    ex: float
    ey: float
    ez: float
    shots: int | None = None

    def __post_init__(self) -> None:
        slack = 1e-12 if self.shots is None else 3.0 / math.sqrt(self.shots)
        if self.ex**2 + self.ey**2 + self.ez**2 > 1.0 + slack:
            raise ValueError("expectation vector norm exceeds 1 beyond statistical slack")

    @property
    def r(self) -> float:
        return math.sqrt(self.ex**2 + self.ey**2 + self.ez**2)


def measure_expectations(state: PureState | DensityMatrix, qubit: int,
                         shots: int | None = None,
                         rng: np.random.Generator | None = None) -> PauliExpectations:
    """Pauli expectations of one qubit, exact or shot-sampled.

    Shot mode draws each Pauli outcome from a binomial with ``shots`` trials,
    mirroring separate measurement circuits per observable.
    """
    b = bloch_vector(reduced_density(state, [qubit]))
    if shots is None:
        return PauliExpectations(b.rx, b.ry, b.rz, shots=None)
    if rng is None:
        raise ValueError("shot-sampled expectations require an rng")
    est = []
    for mean in (b.rx, b.ry, b.rz):
        p_up = min(max((1.0 + mean) / 2.0, 0.0), 1.0)
        ups = rng.binomial(shots, p_up)
        est.append(2.0 * ups / shots - 1.0)
    return PauliExpectations(*est, shots=shots)


def mdd_unitary(exp: PauliExpectations) -> SingleQubitUnitary:
    """Rotation that diagonalizes the measured state, largest eigenvalue first.

    U = Ry(-theta) Rz(-phi) with theta = arccos(<Z>/r) and phi the
    quadrant-correct arctangent of (<Y>, <X>). Applied as U rho U^dag this
    sends the Bloch vector to (0, 0, r). For r = 0 every unitary acts alike,
    so the identity is returned.
    """
    r = exp.r
    if r < 1e-15:
        return SingleQubitUnitary(ID2, theta=0.0, phi=0.0)
    z = min(max(exp.ez / r, -1.0), 1.0)  # clamp shot-noise overshoot
    theta = math.acos(z)
    # a z-rotation acts trivially on a z-aligned state, so ignore the azimuth
    # of pure roundoff transverse components
    phi = 0.0 if math.hypot(exp.ex, exp.ey) < 1e-12 else math.atan2(exp.ey, exp.ex)
    return SingleQubitUnitary(rot_y(-theta) @ rot_z(-phi), theta=theta, phi=phi)


def udd_times(n: int, t: float) -> np.ndarray:
    """Nonuniform pulse times t * sin^2(a pi / (2n+2)), a = 1..n.

    The list is strictly increasing inside (0, t) and symmetric:
    t_a + t_{n+1-a} = t.
    """
    if n < 1:
        raise ValueError(f"pulse count must be at least 1, got {n}")
    if t <= 0:
        raise ValueError(f"duration must be positive, got {t}")
    a = np.arange(1, n + 1)
    return t * np.sin(a * np.pi / (2 * n + 2)) ** 2


def qdd_times(n: int, t: float) -> list[tuple[float, str]]:
    """Nested pulse times: outer Y pulses at the order-n nonuniform times and
    n inner X pulses in every gap, including the gaps before the first and
    after the last Y pulse.

    Returns (time, axis) pairs sorted by time, axis in {"x", "y"}.
    """
    if n < 2 or n % 2 != 0:
        raise ValueError(f"order must be an even integer >= 2, got {n}")
    outer = udd_times(n, t)
    events = [(float(ty), "y") for ty in outer]
    bounds = [0.0] + [float(ty) for ty in outer] + [t]
    frac = np.sin(np.arange(1, n + 1) * np.pi / (2 * n + 2)) ** 2
    for g0, g1 in zip(bounds[:-1], bounds[1:]):
        events.extend((g0 + (g1 - g0) * float(f), "x") for f in frac)
    events.sort(key=lambda e: e[0])
    return events


@dataclass(frozen=True)
class PulseSchedule:
    """An ordered list of (time, unitary) pulses over a total duration."""

    total_time: float
    pulses: tuple
    kind: str

    def __post_init__(self) -> None:
        if self.total_time < 0:
            raise ValueError("total time must be nonnegative")
        times = [tm for tm, _ in self.pulses]
        if any(times[i] > times[i + 1] for i in range(len(times) - 1)):
            raise ValueError("pulse times must be non-decreasing")
        if times and (times[0] < 0 or times[-1] > self.total_time):
            raise ValueError("pulse times must lie in [0, total_time]")
        object.__setattr__(self, "pulses", tuple(self.pulses))


_X_GATE = SingleQubitUnitary(PAULI_X)
_Y_GATE = SingleQubitUnitary(PAULI_Y)


def build_schedule(kind: str, t: float, exp: PauliExpectations | None = None) -> PulseSchedule:
    """Construct the pulse schedule for a canonical sequence name.

    The measurement-driven kinds (``mdd``, ``mdd+xx``) require Pauli
    expectations of the target qubit at the interval start.
    """
    kind = kind.lower()
    if kind == "none":
        return PulseSchedule(t, (), kind)
    if kind == "xx":
        return PulseSchedule(t, ((0.25 * t, _X_GATE), (0.75 * t, _X_GATE)), kind)
    if kind == "xy4":
        pulses = ((0.0, _Y_GATE), (0.25 * t, _X_GATE), (0.5 * t, _Y_GATE), (0.75 * t, _X_GATE))
        return PulseSchedule(t, pulses, kind)
    if kind in ("mdd", "mdd+xx"):
        if exp is None:
            raise ValueError(f"sequence {kind!r} requires Pauli expectations")
        u = mdd_unitary(exp)
        inner = ((0.25 * t, _X_GATE), (0.75 * t, _X_GATE)) if kind == "mdd+xx" else ()
        return PulseSchedule(t, ((0.0, u), *inner, (t, u.dagger())), kind)
    m = _KIND_RE.match(kind)
    if m is None:
        raise ValueError(f"unknown sequence kind {kind!r}")
    n = int(m.group(2))
    if m.group(1) == "udd":
        if n < 2 or n % 2 != 0:
            raise ValueError(f"udd order must be an even integer >= 2 for a closed sequence, got {n}")
        pulses = tuple((float(tj), _Y_GATE) for tj in udd_times(n, t))
        return PulseSchedule(t, pulses, kind)
    gates = {"x": _X_GATE, "y": _Y_GATE}
    pulses = tuple((tm, gates[axis]) for tm, axis in qdd_times(n, t))
    return PulseSchedule(t, pulses, kind)


def flip_times(schedule: PulseSchedule) -> list[float]:
    """Times of the pulses strictly inside (0, t): the sign switches seen by a
    pure-dephasing filter. Boundary conjugation pulses do not switch signs."""
    return [tm for tm, _ in schedule.pulses if 0.0 < tm < schedule.total_time]


def toggling_frames(schedule: PulseSchedule) -> list[SingleQubitUnitary]:
    """Cumulative control unitaries U_a = g_a ... g_1, one per pulse."""
    frames = []
    acc = ID2
    for _, gate in schedule.pulses:
        acc = gate.matrix @ acc
        frames.append(SingleQubitUnitary(acc))
    return frames


def frame_durations(schedule: PulseSchedule) -> list[tuple[np.ndarray, float]]:
    """(frame, duration) pairs: the cumulative control unitary in effect over
    each inter-pulse gap, starting from the identity frame before any pulse."""
    t = schedule.total_time
    events = list(schedule.pulses)
    out = []
    acc = ID2
    prev = 0.0
    idx = 0
    while idx < len(events):
        tm = events[idx][0]
        if tm > prev:
            out.append((acc, tm - prev))
            prev = tm
        while idx < len(events) and events[idx][0] == tm:
            acc = events[idx][1].matrix @ acc
            idx += 1
    if t > prev or not out:
        out.append((acc, t - prev))
    return out


def evolve_with_schedule(state: PureState | DensityMatrix, schedule: PulseSchedule,
                         params: NoiseParams, qubit: int) -> DensityMatrix:
    """Interleave free-evolution channels over each gap with instantaneous
    pulse conjugations on the target qubit.

    An empty schedule is exactly the bare channel over the total duration.
    """
    rho, n = _as_matrix(state)
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    prev = 0.0
    for tm, gate in schedule.pulses:
        if tm > prev:
            rho = _apply_local_raw(combined_channel(params, tm - prev), rho, qubit, n)
            prev = tm
        rho = apply_matrix(gate.matrix, rho, [qubit], n)
    if schedule.total_time > prev:
        rho = _apply_local_raw(combined_channel(params, schedule.total_time - prev), rho, qubit, n)
    return DensityMatrix(rho)
