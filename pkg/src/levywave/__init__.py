"""Zero sets of the linear stochastic wave equation driven by Lévy noise.

The solution of the 1+1 dimensional wave equation with additive symmetric
Lévy noise is half the noise mass of a backward light cone.  This package
simulates it exactly on a rotated lattice, estimates its zero sets, and
evaluates the gauge-function criteria and capacities that govern them.
"""

from .exponents import (
    COMPONENTS,
    ISOTROPIC,
    QUADRATIC,
    GaugeFunction,
    IndexUnresolved,
    LevyExponent,
    QuadratureError,
    ScalingWitness,
    Verdict,
    dimension_formula,
    exponent_from_json,
    gauge_eval,
    psi_eval,
    scaling_witness,
    upper_index,
    zero_criterion,
)
from .fields import (
    AdditiveField,
    NoiseField,
    PerturbedField,
    RotatedLattice,
    SheetField,
    SolutionField,
    dump_solution,
    load_solution,
    perturbed_field,
    sample_apex,
    simulate_additive,
    simulate_noise,
    simulate_sheet,
    simulate_wave,
    solve_wave,
)
from .levelset import (
    DichotomyCase,
    DimensionEstimate,
    EmptyZeroSet,
    ZeroSetSample,
    box_counting_dimension,
    detect_zeros,
    dichotomy_sweep,
    lattice_epsilon,
    small_ball_probability,
)
from .potential import (
    EMPTY_SET,
    CapacityResult,
    DiscreteMeasure,
    GridSet,
    capacity,
    capacity_from_kernel,
    capacity_positive,
    dimension_by_capacity,
    energy,
    kernel_matrix,
    minimize_on_simplex,
    q_energy,
    sym_diff_area,
)
from .sampling import (
    Box,
    HalfBox,
    IsoLevyNoise,
    RngStream,
    SimpleFunction,
    integrate_simple,
    sample_increment,
    sample_positive_stable,
    sample_stable_1d,
    simple_function,
)

__version__ = "0.1.0"
