//! Stress-energy, dominant energy condition and regular-hyperbolicity
//! analysis for Lagrangian field theories of maps whose Lagrangian depends on
//! the strain invariants `σ_j`.
//!
//! Everything operates on pointwise data: a [`FieldJet`] bundles the base
//! metric, the target metric, the Jacobian of the map and a scalar.

pub mod cases;
pub mod dec;
pub mod error;
pub mod hyperbolicity;
pub mod linalg;
pub mod models;
pub mod sampling;
pub mod stress;
pub mod symbol;
pub mod tensor;
pub mod verify;

pub use dec::{check_dec, check_sufficient_conditions, DecReport, ProbeBox, SufficientConditions};
pub use error::{Error, Result};
pub use hyperbolicity::{
    classify, definiteness, find_time_function, hyperbolic_direction_test, observer_margin,
    real_root_count, symbol_det_poly, ClassificationReport, Definiteness, DirectionVerdict, Poly,
    RootCount, SearchConfig, SturmChain, Verdict,
};
pub use linalg::{Matrix, Vector};
pub use models::{CustomLagrangian, LagrangianModel, ModelEval, ModelSpec};
pub use stress::{stress_energy, stress_energy_fd, stress_energy_sigma, StressEnergy};
pub use symbol::{
    canonical_stress_linearized, canonical_stress_noether, contract_symbol, energy_density,
    principal_symbol_fd, skyrme_symbol, z_tensor, CanonicalStress, PrincipalSymbol, ZTensor,
};
pub use tensor::{
    adapted_frame, causal_character, newton_sigma_oracle, pullback_metric, strain_invariants,
    AdaptedFrame, AdaptedJet, BaseMetric, CausalCharacter, FieldJet, FrameKind, StrainData,
    TargetMetric,
};
