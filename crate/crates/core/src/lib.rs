//! Numerics for intrinsic graphs in Heisenberg groups: the horizontal
//! perimeter of a graph, its first and second variation, synthesis of
//! entire stationary graphs from characteristic initial data, rigidity
//! verdicts for such graphs, and calibration certificates of minimality.
//!
//! The ambient group is R^{2n+1} with its twisted product; graphs are taken
//! over the vertical hyperplane {x_1 = 0} and described by a height function
//! on base coordinates (eta, v, tau). All quadrature, differencing, and
//! root-finding utilities used by the higher layers are exposed so callers
//! can reproduce every reported number from first principles.

pub mod calibration;
pub mod characteristics;
pub mod diff;
pub mod domain;
pub mod error;
pub mod field;
pub mod graph;
pub mod heisenberg;
pub mod quad;
pub mod variation;

pub use calibration::{
    abs_phi_closed, calibrate_verdict, divx_residual, lattice_avoiding, lipschitz_phi_from_beta,
    mollified_profile_sweep, tgraph_normal, tgraph_poly_height, weak_divergence_residual,
    CalibrationReport, CalibrationThresholds, HorizontalSection, LipschitzGraph,
    LipschitzProfile, SingularSet,
};
pub use characteristics::{
    shifted_parabola_inverse, Admissibility, BurgersResidual, CharacteristicChart, DomainVerdict,
    InitialData,
};
pub use diff::{central_directional, central_partial, observed_order, one_sided_partial, Side};
pub use domain::BoxDomain;
pub use error::{Error, Result};
pub use field::{bump3, bump_battery, ClosedField, GridField, PlateauCutoff, ScalarField, TestFunction};
pub use graph::{
    classical_lift_residual, scherk_psi, GraphFunction, Membership, AREA_NORMALIZATION,
    DEFAULT_GRID_STEP,
};
pub use heisenberg::{
    frame_coeffs, frame_slots, frame_vector, BasePoint, FrameSlot, HPoint, HorizontalVector,
};
pub use quad::{integrate, integrate_line, QuadratureSpec};
pub use variation::{
    bernstein_verdict, bernstein_verdict_with, dgn_witness, first_variation, lorentzian_moments,
    one_d_form, perturbed_area, product_test_function, reduced_form, second_variation,
    second_variation_stationary, standard_battery, stationarity_precheck, transported_witness,
    variation_report, witness_lhs_limit, witness_rhs_limit, witness_sweep, BernsteinOptions,
    BernsteinVerdict, Profile1D, ReducedWeights, VariationReport, WeightMode, WitnessProfile,
    WitnessReport, PLANE_DERIV_TOL, STATIONARITY_TOL,
};
