//! Numerical laboratory for the energy of the Dirac sea under an
//! exponentially switched linear electric potential, in 1+1 dimensions and
//! natural units.
//!
//! Each occupied negative-energy mode is evolved three independent ways:
//!
//! * [`exact`] — the closed-form solution, with the amplitudes expressed
//!   through the confluent hypergeometric function of [`specfun`];
//! * [`perturb`] — the expansion of the final energy to second order in the
//!   potential amplitude, with every assembled expression checked against
//!   its closed form;
//! * [`oracle`] — brute force: adaptive Runge-Kutta integration of the
//!   equations of motion, sharing no code with the closed form.
//!
//! [`vacuum`] integrates the per-mode energy shifts over the momentum
//! half-line and reports the change of sea energy per unit length, which
//! comes out strictly negative: the switched field extracts energy from the
//! filled sea.

pub mod exact;
pub mod modes;
pub mod oracle;
pub mod perturb;
pub mod specfun;
pub mod vacuum;

pub use exact::{evolve_exact, free_evolve, ModeState};
pub use modes::{mode_energy, mode_norm, ModeIndex, PhysParams, Sign};
pub use oracle::{evolve_ode, quad_semi_infinite, OdeRun};
pub use perturb::{delta_eps, pair_sum, EnergyBreakdown};
pub use vacuum::{vacuum_density_direct, vacuum_density_pert, MomentumGrid, Route};
