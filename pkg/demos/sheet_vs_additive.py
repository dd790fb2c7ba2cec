"""Densities at zero of the sheet and of the additive field."""

import numpy as np
from scipy import stats

from levywave import (GaugeFunction, LevyExponent, RngStream, gauge_eval, simulate_additive,
                      simulate_sheet)

e = LevyExponent.isotropic(1, 2.0, 0.5)
g = GaugeFunction(e)
sheet = simulate_sheet(e, (1, 1), (1.0, 1.0), RngStream(5, 0), replicas=50000)
additive = simulate_additive(e, [np.array([0.0, 1.0])] * 2, RngStream(5, 1), replicas=50000)
for name, values, area in (("sheet", sheet((1.0, 1.0)), 1.0), ("additive", additive((1.0, 1.0)), 2.0)):
    kde = float(stats.gaussian_kde(values[:, 0])(0.0)[0])
    print(f"{name}: density at 0 {kde:.4f}, gauge value {gauge_eval(g, area):.4f}")
