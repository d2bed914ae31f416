"""Closed-form fidelity functionals, optimality verifiers, decay-rate
formulas, and the two-qubit crosstalk ansatz optimizer.

The central object is the quadratic fidelity

    f(r_z) = alpha (a + b r_z)^2 + beta (b + a r_z)^2 + (p/4) (r^2 - r_z^2)

for a single noisy qubit with Bloch norm r whose rotated state has
z-component r_z. Its maximum over [-r, r] sits at r_z = r for every channel
in the family, which is what the measurement-driven sequence achieves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import optimize

from .noise import KrausChannel, NoiseParams, combined_channel
from .sequences import (
    PauliExpectations,
    PulseSchedule,
    build_schedule,
    evolve_with_schedule,
    frame_durations,
    measure_expectations,
    mdd_unitary,
)
from .states import (
    DensityMatrix,
    PureState,
    SingleQubitUnitary,
    bloch_vector,
    entanglement_fidelity,
    reduced_density,
)


class FeasibilityError(ValueError):
    """Raised when ansatz coefficients violate the positivity polytope."""


def _unitary_matrix(u) -> np.ndarray:
    if isinstance(u, SingleQubitUnitary):
        return u.matrix
    return np.asarray(u, dtype=complex)


def _plain(value):
    """Recursively convert numpy containers to plain Python for JSON."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def local_entanglement_fidelity(sigma: DensityMatrix, channel: KrausChannel, u) -> float:
    """Closed form sum_jk |Tr(M_jk U sigma U^dag)|^2.

    Equals the full-space entanglement fidelity of the conjugated channel on
    any purification of ``sigma``; the equivalence is what the tests probe.
    """
    if sigma.num_qubits != 1:
        raise ValueError("local fidelity requires a single-qubit reduced state")
    um = _unitary_matrix(u)
    rotated = um @ sigma.entries @ um.conj().T
    total = 0.0
    for m in channel.operators:
        total += abs(np.trace(m @ rotated)) ** 2
    return float(total)


@dataclass(frozen=True)
class QuadraticFidelity:
    """The fidelity quadratic f(r_z) for one channel and one Bloch norm r."""

    r: float
    s: float
    p: float
    gamma_p: float
    a: float
    b: float
    alpha: float
    beta: float

    @classmethod
    def from_channel(cls, channel: KrausChannel, r: float) -> "QuadraticFidelity":
        if channel.scalars is None:
            raise ValueError("channel carries no scalar decomposition")
        if not 0.0 <= r <= 1.0 + 1e-12:
            raise ValueError(f"Bloch norm must be in [0, 1], got {r}")
        sc = channel.scalars
        return cls(r=min(r, 1.0), s=sc["s"], p=sc["p"], gamma_p=sc["gamma_p"],
                   a=sc["a"], b=sc["b"], alpha=sc["alpha"], beta=sc["beta"])

    def __call__(self, r_z: float) -> float:
        return (self.alpha * (self.a + self.b * r_z) ** 2
                + self.beta * (self.b + self.a * r_z) ** 2
                + 0.25 * self.p * (self.r**2 - r_z**2))

    def second_derivative(self) -> float:
        return self.s * (self.s - self.gamma_p)

    def extreme_point(self) -> float | None:
        f2 = self.second_derivative()
        if f2 == 0.0:
            return None
        return -2.0 * self.a * self.b / f2

    def case(self) -> str:
        f2 = self.second_derivative()
        if f2 > 0:
            return "C1"
        if f2 < 0:
            return "C2"
        return "C3"

    def argmax(self) -> float:
        # Maximum over [-r, r] is at r_z = r in all three curvature cases
        # (degenerate pure dephasing s = 0 also peaks at -r).
        return self.r


def quadratic_f(r_z: float, r: float, channel: KrausChannel) -> float:
    """Evaluate the closed-form fidelity quadratic at a given z-component."""
    if abs(r_z) > r + 1e-12:
        raise ValueError(f"|r_z| = {abs(r_z)} exceeds the Bloch norm {r}")
    return QuadraticFidelity.from_channel(channel, r)(r_z)


def classify_case(channel: KrausChannel) -> str:
    """Curvature class of the fidelity quadratic: C1 convex, C2 concave, C3 linear."""
    return QuadraticFidelity.from_channel(channel, 1.0).case()


def _haar_batch(count: int, rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    z = (rng.standard_normal((count, dim, dim))
         + 1j * rng.standard_normal((count, dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def _batched_fidelities(sigma: np.ndarray, channel: KrausChannel, unitaries: np.ndarray) -> np.ndarray:
    rotated = unitaries @ sigma @ unitaries.conj().transpose(0, 2, 1)
    vals = np.zeros(unitaries.shape[0])
    for m in channel.operators:
        vals += np.abs(np.einsum("ij,bji->b", m, rotated)) ** 2
    return vals


@dataclass
class LemmaReport:
    """Outcome of a random-unitary search against the diagonalizing pair."""

    claim_id: str
    margin: float
    worst_case: dict
    seed: int
    trials: int
    mdd_value: float
    best_competitor: float
    violations: int

    def to_dict(self) -> dict:
        return _plain(self.__dict__)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def lemma_check(sigma: DensityMatrix, params: NoiseParams, t: float,
                trials: int, seed: int) -> LemmaReport:
    """Verify that the diagonalizing conjugation pair beats ``trials``
    Haar-random conjugation pairs for the given channel duration."""
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    channel = combined_channel(params, t)
    b = bloch_vector(sigma)
    u_d = mdd_unitary(PauliExpectations(b.rx, b.ry, b.rz))
    mdd_value = local_entanglement_fidelity(sigma, channel, u_d)
    rng = np.random.default_rng(seed)
    vals = _batched_fidelities(sigma.entries, channel, _haar_batch(trials, rng))
    best = float(np.max(vals))
    violations = int(np.sum(vals > mdd_value + 1e-10))
    worst = {"competitor_value": best, "bloch": [b.rx, b.ry, b.rz], "duration": t}
    return LemmaReport(claim_id="lemma-max-entanglement-fidelity",
                       margin=float(mdd_value - best), worst_case=worst, seed=seed,
                       trials=trials, mdd_value=float(mdd_value),
                       best_competitor=best, violations=violations)


def dd_entanglement_fidelity(psi: PureState, kind: str, params: NoiseParams, t: float,
                             qubit: int = 0, shots: int | None = None,
                             rng: np.random.Generator | None = None) -> float:
    """Entanglement fidelity of a named sequence applied to one noisy qubit.

    Measurement-driven kinds take their expectations from the state itself,
    exactly by default or shot-sampled when ``shots`` is given.
    """
    exp = None
    if kind.lower() in ("mdd", "mdd+xx"):
        exp = measure_expectations(psi, qubit, shots=shots, rng=rng)
    schedule = build_schedule(kind, t, exp)
    out = evolve_with_schedule(psi, schedule, params, qubit)
    return entanglement_fidelity(psi, out)


def _loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    mask = (np.asarray(x) > 0) & (np.asarray(y) > 0)
    if np.sum(mask) < 2:
        return math.nan
    return float(np.polyfit(np.log(np.asarray(x)[mask]), np.log(np.asarray(y)[mask]), 1)[0])


@dataclass
class GapReport:
    """Pointwise fidelity gap between the measurement-driven sequence and a
    pulse sequence, with a quadratic envelope fit on any crossings."""

    claim_id: str
    margin: float
    worst_case: dict
    seed: int | None
    t_grid: list = field(default_factory=list)
    mdd_fidelity: list = field(default_factory=list)
    competitor_fidelity: list = field(default_factory=list)
    gap: list = field(default_factory=list)
    envelope_slope: float | None = None

    def to_dict(self) -> dict:
        return _plain(self.__dict__)

    def passed(self, tol: float = 1e-10, min_slope: float = 1.8) -> bool:
        if self.margin >= -tol:
            return True
        return self.envelope_slope is not None and self.envelope_slope >= min_slope


def first_order_gap(psi: PureState, kind: str, params: NoiseParams, t_grid,
                    qubit: int = 0, seed: int | None = None) -> GapReport:
    """Gap F_mdd(t) - F_seq(t) over a small-time grid (t <= T2/50).

    Any negative excursions are fit against t on log-log axes; a slope of at
    least ~2 certifies they sit under a quadratic envelope.
    """
    t_grid = [float(t) for t in t_grid]
    if max(t_grid) > params.t2 / 50.0:
        raise ValueError(f"grid extends beyond the small-time regime T2/50 = {params.t2 / 50.0}")
    mdd_vals, seq_vals = [], []
    for t in t_grid:
        mdd_vals.append(dd_entanglement_fidelity(psi, "mdd", params, t, qubit))
        seq_vals.append(dd_entanglement_fidelity(psi, kind, params, t, qubit))
    gaps = [m - s for m, s in zip(mdd_vals, seq_vals)]
    worst_idx = int(np.argmin(gaps))
    negs = [(t, -g) for t, g in zip(t_grid, gaps) if g < 0]
    slope = None
    if negs:
        slope = _loglog_slope(np.array([t for t, _ in negs]), np.array([v for _, v in negs]))
    return GapReport(claim_id=f"first-order-gap-{kind}",
                     margin=float(min(gaps)),
                     worst_case={"t": t_grid[worst_idx], "gap": gaps[worst_idx], "kind": kind},
                     seed=seed, t_grid=t_grid, mdd_fidelity=mdd_vals,
                     competitor_fidelity=seq_vals, gap=gaps, envelope_slope=slope)


def toggled_frame_average(psi: PureState, schedule: PulseSchedule, params: NoiseParams,
                          qubit: int = 0) -> float:
    """Duration-weighted average of conjugated-channel fidelities over the
    cumulative control frames: the first-order surrogate for the pulsed
    channel. For uniform pulse spacing this is the plain mean over frames."""
    sigma = reduced_density(psi, [qubit])
    channel = combined_channel(params, schedule.total_time)
    total = 0.0
    for frame, duration in frame_durations(schedule):
        if duration <= 0:
            continue
        total += (duration / schedule.total_time) * local_entanglement_fidelity(sigma, channel, frame)
    return total


def first_order_residual(psi: PureState, kind: str, params: NoiseParams, t_grid,
                         qubit: int = 0) -> tuple[np.ndarray, float]:
    """Residual between the simulated pulsed fidelity and its first-order
    frame average, with its log-log slope in t (expected >= 2)."""
    residuals = []
    for t in t_grid:
        schedule = build_schedule(kind, float(t))
        simulated = entanglement_fidelity(psi, evolve_with_schedule(psi, schedule, params, qubit))
        residuals.append(abs(simulated - toggled_frame_average(psi, schedule, params, qubit)))
    residuals = np.array(residuals)
    return residuals, _loglog_slope(np.asarray(t_grid, dtype=float), residuals)


def gate_error_delta(r: float, delta: float, channel: KrausChannel) -> float:
    """Leading-order fidelity loss when the aligning rotation is tilted by a
    small angle delta, so the aligned z-component becomes r cos(delta):

        (r delta^2 / 4) [ (1 - 2r) p + 2r (1 - gamma_p s) ]
    """
    if not 0.0 <= r <= 1.0 + 1e-12:
        raise ValueError(f"Bloch norm must be in [0, 1], got {r}")
    sc = channel.scalars
    if sc is None:
        raise ValueError("channel carries no scalar decomposition")
    return (r * delta**2 / 4.0) * ((1.0 - 2.0 * r) * sc["p"]
                                   + 2.0 * r * (1.0 - sc["gamma_p"] * sc["s"]))


def mixed_state_bounds(sigma_d: DensityMatrix, channel: KrausChannel) -> tuple[float, float]:
    """Upper and lower bounds on the entanglement fidelity of the aligned
    sequence for a mixed input with diagonalized subsystem ``sigma_d``.

    upper = Tr(sigma_d E(sigma_d)) + 2 sqrt(det sigma_d det E(sigma_d))
    lower = sum_jk |Tr(M_jk sigma_d)|^2
    """
    mat = sigma_d.entries
    if np.max(np.abs(mat - np.diag(np.diagonal(mat)))) > 1e-12:
        raise ValueError("subsystem state must be diagonal")
    if mat[0, 0].real < mat[1, 1].real - 1e-12:
        raise ValueError("diagonal entries must be in descending order")
    out = channel.apply(mat)
    upper = float(np.trace(mat @ out).real
                  + 2.0 * math.sqrt(max(np.linalg.det(mat).real, 0.0)
                                    * max(np.linalg.det(out).real, 0.0)))
    lower = 0.0
    for m in channel.operators:
        lower += abs(np.trace(m @ mat)) ** 2
    return upper, float(lower)


@dataclass(frozen=True)
class DecayRates:
    """Relaxation and dephasing jump rates, plus an optional crosstalk rate."""

    gamma1: float
    gamma2: float
    gamma_zz: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma1 < 0 or self.gamma2 < 0 or self.gamma_zz < 0:
            raise ValueError("decay rates must be nonnegative")

    @classmethod
    def from_noise(cls, params: NoiseParams, gamma_zz: float = 0.0) -> "DecayRates":
        """Rates whose generator reproduces the combined channel: the Z jump
        carries 1/(2 Tp) because a Z jump at rate G dephases as exp(-2 G t)."""
        g1 = 0.0 if math.isinf(params.t1) else 1.0 / params.t1
        tp = params.tp
        g2 = 0.0 if math.isinf(tp) else 1.0 / (2.0 * tp)
        return cls(gamma1=g1, gamma2=g2, gamma_zz=gamma_zz)


def decay_rate_quadratic(r: float, r_z: float, rates: DecayRates) -> float:
    """Fidelity decay rate as a quadratic in the aligned z-component:

    G1 [ (1 - r_z)/2 - (r^2 - r_z^2)/4 ] + G2 (1 - r_z^2)
    """
    return (rates.gamma1 * (0.5 * (1.0 - r_z) - 0.25 * (r**2 - r_z**2))
            + rates.gamma2 * (1.0 - r_z**2))


def decay_rate(sigma: DensityMatrix, u, rates: DecayRates) -> float:
    """Initial decay rate |dF/dt| of the conjugated channel, via the variance
    of the jump operators in the rotated state."""
    if sigma.num_qubits != 1:
        raise ValueError("decay rate requires a single-qubit reduced state")
    um = _unitary_matrix(u)
    rotated = bloch_vector(DensityMatrix(um @ sigma.entries @ um.conj().T))
    r = bloch_vector(sigma).r
    return decay_rate_quadratic(r, rotated.rz, rates)


@dataclass(frozen=True)
class AnsatzCoefficients:
    """Diagonal two-qubit ansatz coefficients (c1, c2, c3)."""

    c1: float
    c2: float
    c3: float

    def margins(self) -> tuple[float, float, float, float]:
        """Slack of the four positivity constraints 1 +- c1 +- c2 +- c3 > 0."""
        return (1.0 + self.c1 + self.c2 + self.c3,
                1.0 + self.c1 - self.c2 - self.c3,
                1.0 - self.c1 + self.c2 - self.c3,
                1.0 - self.c1 - self.c2 + self.c3)

    def is_feasible(self, tol: float = 0.0) -> bool:
        return all(m > tol for m in self.margins())

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])


@dataclass(frozen=True)
class TwoQubitRates:
    """Per-qubit decay rates plus the shared ZZ crosstalk rate."""

    qubit_i: DecayRates
    qubit_j: DecayRates
    gamma_zz: float

    def __post_init__(self) -> None:
        if self.gamma_zz < 0:
            raise ValueError("crosstalk rate must be nonnegative")


def two_qubit_decay_rate(c: AnsatzCoefficients, r_i: float, r_j: float,
                         rates: TwoQubitRates) -> float:
    """Decay rate of the diagonal two-qubit ansatz: two single-qubit
    quadratics in (c1, c2) plus the crosstalk term G_zz (1 - c3^2).

    Boundary points of the positivity polytope are accepted; points outside
    it raise :class:`FeasibilityError`.
    """
    if min(c.margins()) < -1e-12:
        raise FeasibilityError(f"coefficients {c} violate positivity: margins {c.margins()}")
    return (decay_rate_quadratic(r_i, c.c1, rates.qubit_i)
            + decay_rate_quadratic(r_j, c.c2, rates.qubit_j)
            + rates.gamma_zz * (1.0 - c.c3**2))


def c3_section_feasible(c3) -> bool:
    """Exact feasibility of the polytope section at fixed c3, by sign
    elimination over the rationals.

    Adding the second and third constraints gives 2 - 2 c3 > 0, adding the
    first and fourth gives 2 + 2 c3 > 0, so c3 must lie strictly inside
    (-1, 1); conversely (c1, c2) = (0, 0) witnesses any such section. Pinning
    c3 = 1 forces both c1 > c2 and c2 > c1, an exact contradiction.
    """
    c3 = Fraction(c3)
    return Fraction(-1) < c3 < Fraction(1)


_RATE_EPS = 1e-9


def _rate_terms(r: float, rates: DecayRates, c: np.ndarray) -> np.ndarray:
    return rates.gamma1 * (0.5 * (1.0 - c) - 0.25 * (r**2 - c**2)) + rates.gamma2 * (1.0 - c**2)


def grid_minimum_two_qubit(r_i: float, r_j: float, rates: TwoQubitRates,
                           points: int = 201) -> tuple[AnsatzCoefficients, float]:
    """Dense-grid minimum of the two-qubit decay rate over the closed
    positivity polytope: the enumerative certificate the optimizer is held to."""
    axis = np.linspace(-1.0, 1.0, points)
    f1 = _rate_terms(r_i, rates.qubit_i, axis)
    f2 = _rate_terms(r_j, rates.qubit_j, axis)
    fz = rates.gamma_zz * (1.0 - axis**2)
    c2g, c3g = np.meshgrid(axis, axis, indexing="ij")
    best_val = math.inf
    best = None
    for i1, c1 in enumerate(axis):
        feasible = ((1.0 + c1 + c2g + c3g >= 0.0) & (1.0 + c1 - c2g - c3g >= 0.0)
                    & (1.0 - c1 + c2g - c3g >= 0.0) & (1.0 - c1 - c2g + c3g >= 0.0))
        if not feasible.any():
            continue
        vals = f1[i1] + f2[:, None] + fz[None, :]
        vals = np.where(feasible, vals, math.inf)
        idx = np.unravel_index(np.argmin(vals), vals.shape)
        if vals[idx] < best_val:
            best_val = float(vals[idx])
            best = AnsatzCoefficients(float(c1), float(axis[idx[0]]), float(axis[idx[1]]))
    return best, best_val


def optimize_two_qubit_mdd(r_i: float, r_j: float, rates: TwoQubitRates,
                           starts: int = 20, seed: int = 0) -> tuple[AnsatzCoefficients, float]:
    """Minimize the two-qubit decay rate over the positivity polytope.

    Multi-start constrained minimization (SLSQP over the four linear
    constraints, relaxed to >= 1e-9); for pure inputs the boundary point
    (1, 1, 1) is the exact optimum with rate zero and is returned directly.
    """
    if r_i >= 1.0 - 1e-12 and r_j >= 1.0 - 1e-12:
        return AnsatzCoefficients(1.0, 1.0, 1.0), 0.0

    signs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)

    def objective(c: np.ndarray) -> float:
        return (float(_rate_terms(r_i, rates.qubit_i, c[0]))
                + float(_rate_terms(r_j, rates.qubit_j, c[1]))
                + rates.gamma_zz * (1.0 - c[2]**2))

    def gradient(c: np.ndarray) -> np.ndarray:
        gi, gj = rates.qubit_i, rates.qubit_j
        return np.array([
            gi.gamma1 * (-0.5 + 0.5 * c[0]) - 2.0 * gi.gamma2 * c[0],
            gj.gamma1 * (-0.5 + 0.5 * c[1]) - 2.0 * gj.gamma2 * c[1],
            -2.0 * rates.gamma_zz * c[2],
        ])

    constraints = [{"type": "ineq", "fun": lambda c, k=k: 1.0 + signs[k] @ c - _RATE_EPS}
                   for k in range(4)]
    rng = np.random.default_rng(seed)
    best_c, best_val = None, math.inf
    attempts = [np.zeros(3)]
    draws = 0
    while len(attempts) < starts and draws < 100 * starts:
        draws += 1
        cand = rng.uniform(-1.0, 1.0, size=3)
        if np.all(1.0 + signs @ cand > _RATE_EPS):
            attempts.append(cand)
    for x0 in attempts:
        res = optimize.minimize(objective, x0, jac=gradient, method="SLSQP",
                                constraints=constraints, bounds=[(-1.0, 1.0)] * 3,
                                options={"maxiter": 400, "ftol": 1e-14})
        if res.x is None:
            continue
        cand = np.clip(res.x, -1.0, 1.0)
        if np.all(1.0 + signs @ cand >= -1e-12):
            val = objective(cand)
            if val < best_val:
                best_val, best_c = val, cand
    coeffs = AnsatzCoefficients(*[float(v) for v in best_c])
    return coeffs, float(best_val)


def multi_dd_fidelity(psi: PureState, qubits, kinds, times, params: NoiseParams) -> float:
    """Entanglement fidelity after applying one sequence per noisy qubit,
    sequentially in list order; measurement-driven kinds read the state as it
    stands at their interval start."""
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise ValueError("noisy qubits must be distinct")
    if not len(qubits) == len(kinds) == len(times):
        raise ValueError("qubits, kinds and times must have equal lengths")
    state: PureState | DensityMatrix = psi
    for qubit, kind, t in zip(qubits, kinds, times):
        exp = None
        if kind.lower() in ("mdd", "mdd+xx"):
            exp = measure_expectations(state, qubit)
        schedule = build_schedule(kind, float(t), exp)
        state = evolve_with_schedule(state, schedule, params, qubit)
    return entanglement_fidelity(psi, state)


def multi_subsystem_bound_check(psi: PureState, qubits, kinds, times,
                                params: NoiseParams, scales=None) -> GapReport:
    """Compare all-aligned sequences against a per-qubit pulse assignment
    while the interval durations are scaled down geometrically; crossings
    must vanish quadratically with the scale."""
    if scales is None:
        scales = [2.0**-k for k in range(8)]
    scales = sorted(float(s) for s in scales)
    mdd_vals, seq_vals = [], []
    for scale in scales:
        scaled = [scale * float(t) for t in times]
        mdd_vals.append(multi_dd_fidelity(psi, qubits, ["mdd"] * len(qubits), scaled, params))
        seq_vals.append(multi_dd_fidelity(psi, qubits, kinds, scaled, params))
    gaps = [m - s for m, s in zip(mdd_vals, seq_vals)]
    worst_idx = int(np.argmin(gaps))
    negs = [(s, -g) for s, g in zip(scales, gaps) if g < 0]
    slope = None
    if negs:
        slope = _loglog_slope(np.array([s for s, _ in negs]), np.array([v for _, v in negs]))
    return GapReport(claim_id="multi-subsystem-gap",
                     margin=float(min(gaps)),
                     worst_case={"scale": scales[worst_idx], "gap": gaps[worst_idx],
                                 "kinds": list(kinds)},
                     seed=None, t_grid=scales, mdd_fidelity=mdd_vals,
                     competitor_fidelity=seq_vals, gap=gaps, envelope_slope=slope)
