//! Optically driven bosonic exciton coupled to a leaky-cavity quasimode.
//!
//! The exciton is a single harmonic mode, pumped by a classical
//! continuous-wave field and damped through a bath whose coupling has a
//! Lorentzian line shape. The model is linear, so a coherent initial state
//! stays coherent and every quantity follows from a handful of
//! time-dependent coefficients:
//!
//! * [`model`] – closed forms for u, w, A, B, u_j, v_j and the bath kernel;
//! * [`observables`] – population, evolved cat states, decoherence factor;
//! * [`oracle`] – discretized-bath and memory-kernel integrators used to
//!   check the closed forms;
//! * [`harness`] – scenario configs, figure and sweep tables, CSV output.
//!
//! Energies are in meV, times in fs (see [`units`]).

mod laplace;

pub mod harness;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod params;
pub mod units;

pub use model::EvolutionCoefficients;
pub use observables::{CatSpec, DecoherenceReport};
pub use oracle::BathGrid;
pub use params::{ComplexRate, SystemParams};
