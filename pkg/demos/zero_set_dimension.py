"""Box-counting dimension of the zero set for Gaussian and stable noise."""

import numpy as np

from levywave import (LevyExponent, RngStream, RotatedLattice, box_counting_dimension,
                      detect_zeros, lattice_epsilon, simulate_wave)

M = 1024
lattice = RotatedLattice.window(2.0 / M, 0.0, 0.0, M)
for alpha, target in ((2.0, 1.5), (1.5, 4 / 3)):
    e = LevyExponent.isotropic(1, alpha)
    eps = lattice_epsilon(e, lattice)
    slopes = []
    for k in range(3):
        zeros = detect_zeros(simulate_wave(e, lattice, RngStream(11, k)), eps, t_min=0.25)
        slopes.append(box_counting_dimension(zeros).slope)
    print(f"alpha={alpha}: slopes {np.round(slopes, 3).tolist()}, mean {np.mean(slopes):.3f}, "
          f"predicted {target:.3f}")
