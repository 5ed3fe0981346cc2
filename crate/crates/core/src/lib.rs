//! Exact simulation of one-dimensional Rydberg-blockaded chains under
//! bichromatic delta-kick driving, with the observables and spectral
//! analysis needed to identify a discrete time quasi-crystal.
//!
//! The chain is split into a left and a right region with Rabi frequencies
//! `Ω_L`, `Ω_R`; each region receives its own train of instantaneous
//! `exp(-i θ n̂)` kicks with period `T_L` resp. `T_R`. With both ratios set
//! to the golden ratio the staggered order parameter responds at the mixed
//! half-integer combinations of the two drive frequencies instead of at a
//! single subharmonic, an oscillation with no period at all.
//!
//! Pipeline: [`basis`] enumerates the constrained space, [`model`] builds
//! the Hamiltonian and kick schedule, [`propagator`] evolves state vectors
//! exactly segment by segment, [`observables`] measures, [`spectral`]
//! transforms and labels, and [`sweep`] maps out phase diagrams.

pub mod basis;
pub mod error;
mod krylov;
pub mod model;
pub mod observables;
pub mod propagator;
pub mod spectral;
pub mod state;
pub mod sweep;

pub use basis::{named_state, ConstrainedBasis, NamedState, Region, SiteConfiguration};
pub use error::{Error, Result};
pub use model::{
    kick_phases, ChainParameters, KickEvent, KickSchedule, SparseHamiltonian, GOLDEN_RATIO,
};
pub use observables::{
    basis_overlaps, entanglement_entropy, fidelity, observe, site_densities,
    staggered_magnetization, Convention, ObservableRecord,
};
pub use propagator::{
    apply_kick, decompose, run, Engine, ObservableSet, Simulator, SpectralDecomposition, Trajectory,
};
pub use spectral::{
    component_lifetime, detect_peaks, fourier_spectrum, label_peaks, DecayClass, LabeledPeak,
    LifetimeFit, Peak, PeakLabel, Spectrum, WindowKind,
};
pub use state::StateVector;
pub use sweep::{
    classify_dtqc, frequency_scan, run_phase_diagram, size_scan, FrequencyScanRow, GridSpec,
    PeakMeasure, PhaseCell, ScalingFit, SizeScan, SizeScanPoint, SweepObservable,
};
