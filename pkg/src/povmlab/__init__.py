"""Finite-dimensional POVMs, their dual representations, and sequential composition."""

from .duality import (
    DensityDistribution,
    PredualMap,
    StatisticalMap,
    VnMap,
    barycenter,
    check_comma_square_dm,
    check_comma_square_ef,
    check_naturality_vn,
    density_to_state,
    dm_map,
    is_star_homomorphism,
    povm_from_statistical,
    povm_to_vn_map,
    predual_to_vn,
    state_to_density,
    statistical_map,
    vn_map_to_povm,
    vn_to_predual,
)
from .effects import (
    FiniteBoolean,
    HilbertEffects,
    UnitInterval,
    check_effect_algebra_axioms,
    check_module_axioms,
    check_morphism,
)
from .operators import (
    classify,
    conjugate_by_isometry,
    operator_norm,
    psd_sqrt,
    spectral_decompose,
    trace,
)
from .povm import (
    POVM,
    OperatorDensity,
    check_mu_continuous,
    integrate_along,
    is_pvm,
    module_morphism_to_povm,
    repair_normalization,
    rn_derivative,
    variation,
)
from .sequential import IndexedPOVMFamily, evaluate_composite, sequential_compose
from .spaces import (
    AtomMap,
    BoundedFunction,
    Distribution,
    FiniteMeasurableSpace,
    FiniteMeasure,
    IntegrableFunction,
    KleisliMap,
    MeasureMorphism,
    check_measure_morphism,
    integrate,
    kleisli_extension,
    l1_action,
    linfty_action,
    pushforward_measure,
)
from .spin import build_grid, direction_povm, run_spin_experiment, spin_component_povm
from .tolerance import Tolerance

__version__ = "0.1.0"
