"""Simulated wave solutions follow the predicted characteristic function."""

import math

import numpy as np

from levywave import LevyExponent, RngStream, RotatedLattice, simulate_wave

lattice = RotatedLattice.covering(0.25, 2.0, 1.0)
for alpha in (1.0, 1.5, 2.0):
    e = LevyExponent.isotropic(1, alpha, 0.5)
    u = simulate_wave(e, lattice, RngStream(7, 0), replicas=5000).at(2.0, 1.0)[:, 0]
    for xi in (0.5, 1.0, 2.0):
        c = np.cos(xi * u)
        predicted = math.exp(-4.0 * float(e(xi / 2)))
        z = (c.mean() - predicted) / (c.std(ddof=1) / math.sqrt(len(c)))
        print(f"alpha={alpha} xi={xi}: empirical {c.mean():.4f} predicted {predicted:.4f} z={z:+.2f}")
