"""Equilibrium measures and the capacity dimension of a square."""

import numpy as np

from levywave import (GaugeFunction, GridSet, LevyExponent, capacity, capacity_from_kernel,
                      dimension_by_capacity)

print("two points:", capacity_from_kernel(np.array([[2.0, 1.0], [1.0, 2.0]])).capacity)

square = GridSet([[1, 2, 1, 2]], 1 / 8)
g = GaugeFunction(LevyExponent.isotropic(1, 2.0, 1.0))
res = capacity(square, g)
print(f"square: capacity {res.capacity:.4f} after {res.iterations} iterations, gap {res.gap:.1e}")

segment = GridSet([[1, 2, 1, 1]], 1 / 16)
print(f"segment capacity dimension {dimension_by_capacity(segment, g).value:.3f} (expect 0.5)")
