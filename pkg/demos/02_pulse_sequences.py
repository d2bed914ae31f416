"""Building pulse schedules and evolving a noisy qubit through them.

Compares the fidelity decay of a four-qubit random state with one noisy qubit
under every built-in sequence, including the measurement-driven one that
aligns the qubit's reduced state with the decay-free direction.
"""

import numpy as np

from mddsim import (
    NoiseParams,
    build_schedule,
    dd_entanglement_fidelity,
    haar_random_state,
    measure_expectations,
    toggling_frames,
)

params = NoiseParams(t1=250.0, t2=170.0)
psi = haar_random_state(4, seed=7)

print("schedule layouts over a 1 us interval:")
exp = measure_expectations(psi, 0)
for kind in ("xx", "xy4", "udd8", "qdd2", "mdd", "mdd+xx"):
    schedule = build_schedule(kind, 1.0, exp)
    times = ", ".join(f"{tm:.3f}" for tm, _ in schedule.pulses)
    print(f"  {kind:7s} {len(schedule.pulses):2d} pulses at [{times}]")

print("\ncumulative control frames of the four-pulse sequence (X*Y*X*Y ~ identity):")
for k, frame in enumerate(toggling_frames(build_schedule("xy4", 1.0)), start=1):
    flat = " ".join(f"{v:+.2f}" for v in frame.matrix.round(2).flatten())
    print(f"  U_{k}: [{flat}]")

print("\nmeasured expectations of the noisy qubit (exact vs 1e4 shots):")
rng = np.random.default_rng(0)
shot = measure_expectations(psi, 0, shots=10_000, rng=rng)
print(f"  exact ({exp.ex:+.4f}, {exp.ey:+.4f}, {exp.ez:+.4f})")
print(f"  shots ({shot.ex:+.4f}, {shot.ey:+.4f}, {shot.ez:+.4f})")

print("\nentanglement fidelity vs idle duration (noisy qubit 0):")
kinds = ("none", "xx", "xy4", "udd8", "qdd2", "mdd")
header = "    t/us " + "".join(f"{k:>9s}" for k in kinds)
print(header)
for t in (50, 150, 400, 1000):
    row = [dd_entanglement_fidelity(psi, k, params, float(t)) for k in kinds]
    print(f"  {t:6d} " + "".join(f"{v:9.4f}" for v in row))
print("\nthe aligned sequence stays on top at every duration.")
