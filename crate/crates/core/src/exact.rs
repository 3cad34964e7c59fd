//! Closed-form time evolution of one mode under the exponentially switched
//! linear potential V(z, t) = -z·c·α·(1-θ(t))·e^{-ct}.
//!
//! For t ≤ 0 the two momentum-space amplitudes are confluent hypergeometric
//! functions of the dimensionless scale R(t) = (2α/c)e^{-ct}; for t ≥ 0 the
//! potential is off and the state rotates freely. The field-free limit
//! α = 0 (R ≡ 0) is handled explicitly because the kinematic phase R^{iλμ}
//! degenerates there.

use num_complex::Complex64;
use thiserror::Error;

use crate::modes::{free_spinor, ModeIndex, PhysParams, Sign};
use crate::specfun::{self, KummerParams, SpecFunError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error(transparent)]
    Series(#[from] SpecFunError),
    #[error("closed-form evolution is defined for t <= 0, got t = {0}")]
    Domain(f64),
}

/// Dimensionless switch profile: R(t) = (2α/c)e^{-ct} and the momentum
/// shift A(t) = cR(t)/2 = αe^{-ct}. For t ≥ 0 the potential is off, but
/// A(0) = α still parametrises the phase of the final state.
pub fn switch_profile(params: &PhysParams, t: f64) -> (f64, f64) {
    let decay = (-params.cdecay * t).exp();
    let r = 2.0 * params.alpha / params.cdecay * decay;
    let a = params.alpha * decay;
    (r, a)
}

/// Heaviside step with θ(0) = 1.
fn theta(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// The external potential; identically zero for t ≥ 0.
pub fn potential(params: &PhysParams, z: f64, t: f64) -> f64 {
    -z * params.cdecay * params.alpha * (1.0 - theta(t)) * (-params.cdecay * t).exp()
}

/// The electric field -∂V/∂z.
pub fn field(params: &PhysParams, t: f64) -> f64 {
    params.cdecay * params.alpha * (1.0 - theta(t)) * (-params.cdecay * t).exp()
}

/// The constants of the closed-form solution for one mode, plus the switch
/// profile at the evaluation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactCoeffs {
    /// J = (i/c)(λE - p).
    pub j: Complex64,
    /// K = 1 + 2iλE/c.
    pub k: Complex64,
    /// μ = E/c.
    pub mu: f64,
    /// η = e^{-iλμ·ln(2α/c)} / sqrt(4E(E-λp)); real when α = 0.
    pub eta: Complex64,
    /// R(t).
    pub r: f64,
    /// A(t) = cR(t)/2.
    pub a: f64,
}

impl ExactCoeffs {
    pub fn new(mode: &ModeIndex, params: &PhysParams, t: f64) -> Self {
        let e = mode.energy(params);
        let lam = mode.lambda.as_f64();
        let c = params.cdecay;
        let (r, a) = switch_profile(params, t);
        let eta_mag = (4.0 * e * (e - lam * mode.p)).recip().sqrt();
        let eta = if params.alpha == 0.0 {
            Complex64::new(eta_mag, 0.0)
        } else {
            Complex64::from_polar(eta_mag, -lam * (e / c) * (2.0 * params.alpha / c).ln())
        };
        Self {
            j: Complex64::new(0.0, (lam * e - mode.p) / c),
            k: Complex64::new(1.0, 2.0 * lam * e / c),
            mu: e / c,
            eta,
            r,
            a,
        }
    }
}

/// Time-evolved amplitudes of one mode. The wave function per unit length is
/// η·(C, D)·e^{i(p - A(t))z}, and |η|²(|C|² + |D|²) = 1 at all times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub c: Complex64,
    pub d: Complex64,
    pub t: f64,
    /// p - A(t); the plane-wave momentum of the state.
    pub shifted_momentum: f64,
    pub eta: Complex64,
}

/// Spinor coefficients shared by the exact and asymptotic forms:
/// (m - p + λE, m + p - λE).
fn bare_amplitudes(mode: &ModeIndex, params: &PhysParams) -> (f64, f64) {
    let e = mode.energy(params);
    let lam = mode.lambda.as_f64();
    (
        params.m - mode.p + lam * e,
        params.m + mode.p - lam * e,
    )
}

/// Closed-form state at time t ≤ 0.
pub fn evolve_exact(
    mode: &ModeIndex,
    params: &PhysParams,
    t: f64,
) -> Result<ModeState, ExactError> {
    if t > 0.0 {
        return Err(ExactError::Domain(t));
    }
    if params.alpha == 0.0 {
        return Ok(asymptotic_state(mode, params, t));
    }

    let co = ExactCoeffs::new(mode, params, t);
    let z = Complex64::new(0.0, co.r);
    let kp = KummerParams::new(co.j, co.k, z).with_tol(params.series_tol);
    let phi = specfun::kummer_phi(&kp)?;
    let phi_prime = specfun::kummer_phi_prime(&kp)?;

    let lam = mode.lambda.as_f64();
    // e^{-iR/2} R^{iλμ}, a pure phase since ln R is real.
    let prefactor = Complex64::from_polar(1.0, -co.r / 2.0 + lam * co.mu * co.r.ln());
    let (up, lo) = bare_amplitudes(mode, params);
    let drive = params.cdecay * co.r * phi_prime;

    Ok(ModeState {
        c: prefactor * (up * phi + drive),
        d: prefactor * (lo * phi - drive),
        t,
        shifted_momentum: mode.p - co.a,
        eta: co.eta,
    })
}

/// The t → -∞ form of the solution: Φ → 1 and the amplitudes reduce to the
/// free spinor with the phase e^{iλμ·ln(2α/c)}e^{-iλEt}. Used to seed the
/// ODE oracle and to measure the convergence of the closed form as R → 0.
pub fn asymptotic_state(mode: &ModeIndex, params: &PhysParams, t: f64) -> ModeState {
    let e = mode.energy(params);
    let lam = mode.lambda.as_f64();
    let co = ExactCoeffs::new(mode, params, t);
    let log_phase = if params.alpha == 0.0 {
        0.0
    } else {
        lam * co.mu * (2.0 * params.alpha / params.cdecay).ln()
    };
    let phase = Complex64::from_polar(1.0, log_phase - lam * e * t);
    let (up, lo) = bare_amplitudes(mode, params);
    ModeState {
        c: phase * up,
        d: phase * lo,
        t,
        shifted_momentum: mode.p - co.a,
        eta: co.eta,
    }
}

/// Free evolution for t ≥ 0 of a state produced by [`evolve_exact`] at
/// t = 0: the spinor is decomposed on the free basis at the shifted momentum
/// k = p - α, each branch advances by its phase e^{∓iE(k)t}, and the state is
/// recomposed. Continuous at t = 0 and energy-conserving by construction.
pub fn free_evolve(state0: &ModeState, params: &PhysParams, t: f64) -> ModeState {
    assert!(t >= 0.0, "free evolution is defined for t >= 0, got {t}");
    let k = state0.shifted_momentum;
    let e_k = k.hypot(params.m);
    let spinor = crate::modes::Spinor2::new(state0.c, state0.d);
    let u_plus = free_spinor(&ModeIndex::new(Sign::Plus, k), params);
    let u_minus = free_spinor(&ModeIndex::new(Sign::Minus, k), params);
    let a_plus = u_plus.inner(&spinor) * Complex64::from_polar(1.0, -e_k * t);
    let a_minus = u_minus.inner(&spinor) * Complex64::from_polar(1.0, e_k * t);
    ModeState {
        c: a_plus * u_plus.upper + a_minus * u_minus.upper,
        d: a_plus * u_plus.lower + a_minus * u_minus.lower,
        t,
        shifted_momentum: k,
        eta: state0.eta,
    }
}

/// Normalised distance between two states of the same mode,
/// |η|·sqrt(|ΔC|² + |ΔD|²).
pub fn state_distance(a: &ModeState, b: &ModeState) -> f64 {
    let eta = a.eta.norm();
    eta * ((a.c - b.c).norm_sqr() + (a.d - b.d).norm_sqr()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{mode_energy, mode_norm};

    fn reference() -> PhysParams {
        PhysParams::default()
    }

    #[test]
    fn switch_profile_values() {
        let params = reference();
        let (r, a) = switch_profile(&params, -40.0);
        assert!((r - 0.02 * (-40.0f64).exp()).abs() <= 1e-30);
        assert!(r > 0.0 && r < 1e-18);
        assert!(a < 0.0 && a.abs() < 1e-18);

        let (r0, a0) = switch_profile(&params, 0.0);
        assert!((r0 - 0.02).abs() <= 1e-17);
        assert!((a0 + 0.01).abs() <= 1e-17);

        let free = PhysParams::new(1.0, 0.0, -1.0).unwrap();
        assert_eq!(switch_profile(&free, -3.0), (0.0, 0.0));
    }

    #[test]
    fn potential_switches_off_at_zero() {
        let params = reference();
        for z in [-2.0, 0.0, 1.0, 5.0] {
            assert_eq!(potential(&params, z, 0.0), 0.0);
            assert_eq!(potential(&params, z, 3.0), 0.0);
        }
        // Direct evaluation at z = 1, t = -1: -z·c·α·e^{-ct} = -0.01·e^{-1}.
        let v = potential(&params, 1.0, -1.0);
        assert!((v + 0.01 * (-1.0f64).exp()).abs() <= 1e-17, "V = {v}");

        let free = PhysParams::new(1.0, 0.0, -1.0).unwrap();
        assert_eq!(potential(&free, 1.0, -1.0), 0.0);
    }

    #[test]
    fn field_is_minus_gradient_of_potential() {
        let params = reference();
        let (z, t, h) = (1.3, -0.8, 1e-6);
        let grad = (potential(&params, z + h, t) - potential(&params, z - h, t)) / (2.0 * h);
        assert!((field(&params, t) + grad).abs() <= 1e-10);
    }

    #[test]
    fn rejects_positive_time() {
        let params = reference();
        let mode = ModeIndex::new(Sign::Minus, 1.0);
        assert!(matches!(
            evolve_exact(&mode, &params, 0.1),
            Err(ExactError::Domain(_))
        ));
    }

    #[test]
    fn norm_is_conserved_on_grid() {
        for &alpha in &[-0.01, -0.1, -0.5] {
            let params = PhysParams::new(1.0, alpha, -1.0).unwrap();
            for lambda in [Sign::Plus, Sign::Minus] {
                for p in [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0] {
                    let mode = ModeIndex::new(lambda, p);
                    for t in [-5.0, -1.0, 0.0] {
                        let state = evolve_exact(&mode, &params, t).unwrap();
                        let n = mode_norm(&state);
                        assert!(
                            (n - 1.0).abs() <= 1e-9,
                            "alpha={alpha} lambda={lambda:?} p={p} t={t}: norm={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn energy_matches_second_order_value() {
        // (λ=-1, p=1, m=1, c=-1, α=-0.01) at t=0. The second-order value is
        // -√2 - 0.01/√2 - 4e-4/(2√2·9); the remainder is third order in α.
        let params = reference();
        let mode = ModeIndex::new(Sign::Minus, 1.0);
        let state = evolve_exact(&mode, &params, 0.0).unwrap();
        let eps = mode_energy(&state, &params);
        let e = 2.0f64.sqrt();
        let second_order = -e - 0.01 / e - 4e-4 / (2.0 * e * 9.0);
        assert!(
            (eps - second_order).abs() <= 3e-6,
            "eps = {eps}, second order = {second_order}"
        );
    }

    #[test]
    fn shifted_momentum_bookkeeping() {
        let params = reference();
        let mode = ModeIndex::new(Sign::Minus, 2.0);
        for t in [-10.0, -2.0, 0.0] {
            let state = evolve_exact(&mode, &params, t).unwrap();
            let expected = mode.p - params.alpha * (-params.cdecay * t).exp();
            assert_eq!(state.shifted_momentum, expected);
        }
    }

    #[test]
    fn matches_asymptotic_form_in_the_far_past() {
        let params = reference();
        let mode = ModeIndex::new(Sign::Minus, 1.0);
        // t such that R = 1e-6: R = 0.02 e^t.
        let t = (1e-6f64 / 0.02).ln();
        let exact = evolve_exact(&mode, &params, t).unwrap();
        let asym = asymptotic_state(&mode, &params, t);
        assert!(state_distance(&exact, &asym) <= 1e-5);
    }

    #[test]
    fn asymptotic_state_is_free_spinor_up_to_phase() {
        let params = reference();
        for lambda in [Sign::Plus, Sign::Minus] {
            for p in [-2.0, -0.5, 0.0, 1.0, 3.0] {
                let mode = ModeIndex::new(lambda, p);
                let state = asymptotic_state(&mode, &params, -17.3);
                let psi = crate::modes::Spinor2::new(state.eta * state.c, state.eta * state.d);
                let u = free_spinor(&mode, &params);
                // Colinearity: |<u, psi>| = ||psi|| (both unit up to norm).
                let overlap = u.inner(&psi).norm();
                assert!(
                    (overlap - psi.norm_sq().sqrt()).abs() <= 1e-12,
                    "lambda={lambda:?} p={p}"
                );
                assert!((psi.norm_sq() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn finite_difference_satisfies_equation_of_motion() {
        // Richardson check: the centred time derivative of (C, D) obeys
        // i(dC/dt, dD/dt) = (p - A)(D, C) + m(C, -D) with O(h²) error.
        let params = PhysParams::new(1.0, -0.1, -1.0).unwrap();
        let mode = ModeIndex::new(Sign::Minus, 0.5);
        let t0 = -1.4;
        let i = Complex64::new(0.0, 1.0);

        let defect = |h: f64| -> f64 {
            let plus = evolve_exact(&mode, &params, t0 + h).unwrap();
            let minus = evolve_exact(&mode, &params, t0 - h).unwrap();
            let mid = evolve_exact(&mode, &params, t0).unwrap();
            let dc = (plus.c - minus.c) / (2.0 * h);
            let dd = (plus.d - minus.d) / (2.0 * h);
            let k = mid.shifted_momentum;
            let rc = i * dc - (k * mid.d + params.m * mid.c);
            let rd = i * dd - (k * mid.c - params.m * mid.d);
            (rc.norm_sqr() + rd.norm_sqr()).sqrt()
        };

        let d1 = defect(1e-3);
        let d2 = defect(5e-4);
        assert!(d1 <= 1e-5, "defect at h=1e-3: {d1}");
        let ratio = d1 / d2;
        assert!(
            (3.0..5.0).contains(&ratio),
            "expected O(h^2) convergence, ratio = {ratio}"
        );
    }

    #[test]
    fn free_evolution_is_continuous_and_conserving() {
        let params = reference();
        let mode = ModeIndex::new(Sign::Minus, 1.0);
        let state0 = evolve_exact(&mode, &params, 0.0).unwrap();

        let at0 = free_evolve(&state0, &params, 0.0);
        assert!((at0.c - state0.c).norm() <= 1e-14);
        assert!((at0.d - state0.d).norm() <= 1e-14);

        let e0 = mode_energy(&state0, &params);
        for t in [1.0, 5.0] {
            let state = free_evolve(&state0, &params, t);
            let e = mode_energy(&state, &params);
            assert!((e - e0).abs() <= 1e-12, "t = {t}: {e} vs {e0}");
            assert!((mode_norm(&state) - mode_norm(&state0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn field_free_evolution_is_a_pure_phase() {
        let params = PhysParams::new(1.0, 0.0, -1.0).unwrap();
        let mode = ModeIndex::new(Sign::Minus, 1.5);
        let e = mode.energy(&params);
        let state0 = evolve_exact(&mode, &params, 0.0).unwrap();
        let t = 2.0;
        let state = free_evolve(&state0, &params, t);
        // λ = -1 branch advances by e^{+iEt}.
        let phase = Complex64::from_polar(1.0, e * t);
        assert!((state.c - phase * state0.c).norm() <= 1e-12);
        assert!((state.d - phase * state0.d).norm() <= 1e-12);
    }
}
