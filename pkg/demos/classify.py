"""Which noises give a wave solution with zeros, and how large is the zero set."""

from levywave import GaugeFunction, LevyExponent, dimension_formula, upper_index, zero_criterion

noises = {
    "Gaussian, d=1": LevyExponent.isotropic(1, 2.0),
    "Cauchy, d=1": LevyExponent.isotropic(1, 1.0),
    "stable 1.5, d=2": LevyExponent.isotropic(2, 1.5),
    "Gaussian, d=5": LevyExponent.isotropic(5, 2.0),
    "components (1, 2)": LevyExponent.components([1.0, 2.0]),
    "components (1, 1)": LevyExponent.components([1.0, 1.0]),
}

print(f"{'noise':20s} {'index':>6s} {'verdict':>12s} {'dimension':>10s}")
for name, e in noises.items():
    g = GaugeFunction(e)
    verdict = zero_criterion(g)
    dim = f"{dimension_formula(g):10.3f}" if verdict.value == "ZerosExist" else f"{'-':>10s}"
    print(f"{name:20s} {upper_index(g):6.3f} {verdict.value:>12s} {dim}")
