//! Executable reproductions: Skyrme regimes, the negative-energy
//! counterexample, fluid examples and stress-tensor equivalences.

pub mod counterexample;
pub mod equivalence;
pub mod fluid;
pub mod skyrme;

pub use counterexample::{negative_energy_counterexample, NegativeEnergyCounterexample};
pub use equivalence::{stress_equivalence, StressEquivalence};
pub use fluid::{
    fluid_causality_check, power_law, tachyonic_fluid_demo, FluidCausality, TachyonicFluidReport,
};
pub use skyrme::{
    skyrme_predict, skyrme_predict_jet, skyrme_verify_grid, GridReport, SkyrmePrediction,
    SkyrmeRegime,
};
