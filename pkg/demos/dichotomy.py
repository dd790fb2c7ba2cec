"""Hit frequencies of small balls: zeros for d=1, none for d=5."""

import numpy as np

from levywave import DichotomyCase, LevyExponent, RotatedLattice, dichotomy_sweep

lattice = RotatedLattice.window(2.0 / 64, 0.0, 0.0, 64)
eps = [0.2 / 2**k for k in range(6)]
cases = [DichotomyCase(LevyExponent.isotropic(d, 2.0), lattice, eps, 0.25, f"d={d}")
         for d in (1, 5)]
for row in dichotomy_sweep(cases, 200, seed=3):
    print(f"{row.name}: {row.verdict.value}, {row.profile}, "
          f"hits {np.round(row.hit_freq, 3).tolist()}")
