//! Free-field mode structure: physical configuration, mode labels, spinors,
//! and the kinetic-energy functional of a single momentum mode.
//!
//! All mode quantities are per unit box length; the 1/√L normalisation is
//! dropped throughout and extensive results are reported as densities.

use num_complex::Complex64;
use thiserror::Error;

use crate::exact::ModeState;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("mass must be positive and finite, got {0}")]
    Mass(f64),
    #[error("switch rate must be negative and finite, got {0}")]
    SwitchRate(f64),
    #[error("alpha and the switch rate must not have opposite signs (alpha = {alpha}, c = {cdecay})")]
    SignMismatch { alpha: f64, cdecay: f64 },
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
}

/// Physical configuration in natural units: mass `m`, potential amplitude
/// `alpha`, switch rate `cdecay` (both negative in the regime of interest),
/// plus the numerical tolerances shared by the series and the ODE oracle.
///
/// `alpha / cdecay >= 0` is required so that the hypergeometric argument
/// scale R(t) = (2α/c)e^{-ct} is nonnegative and its logarithm real; the
/// field-free case `alpha = 0` is allowed and short-circuits to free
/// evolution everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub m: f64,
    pub alpha: f64,
    pub cdecay: f64,
    pub series_tol: f64,
    pub ode_tol: f64,
}

impl PhysParams {
    pub fn new(m: f64, alpha: f64, cdecay: f64) -> Result<Self, ParamError> {
        let p = Self {
            m,
            alpha,
            cdecay,
            series_tol: 1e-13,
            ode_tol: 1e-12,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_series_tol(mut self, tol: f64) -> Result<Self, ParamError> {
        self.series_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_ode_tol(mut self, tol: f64) -> Result<Self, ParamError> {
        self.ode_tol = tol;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), ParamError> {
        if self.m <= 0.0 || !self.m.is_finite() {
            return Err(ParamError::Mass(self.m));
        }
        if self.cdecay >= 0.0 || !self.cdecay.is_finite() {
            return Err(ParamError::SwitchRate(self.cdecay));
        }
        if !self.alpha.is_finite() || self.alpha * self.cdecay < 0.0 {
            return Err(ParamError::SignMismatch {
                alpha: self.alpha,
                cdecay: self.cdecay,
            });
        }
        if self.series_tol <= 0.0 || !self.series_tol.is_finite() {
            return Err(ParamError::Tolerance(self.series_tol));
        }
        if self.ode_tol <= 0.0 || !self.ode_tol.is_finite() {
            return Err(ParamError::Tolerance(self.ode_tol));
        }
        Ok(())
    }
}

impl Default for PhysParams {
    /// The reference regime used throughout: m = 1, alpha = -0.01, c = -1.
    fn default() -> Self {
        PhysParams::new(1.0, -0.01, -1.0).expect("reference parameters are valid")
    }
}

/// Sign of the mode energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i32(v: i32) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// One plane-wave mode: energy sign λ and momentum p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIndex {
    pub lambda: Sign,
    pub p: f64,
}

impl ModeIndex {
    pub fn new(lambda: Sign, p: f64) -> Self {
        Self { lambda, p }
    }

    /// E = +sqrt(p² + m²).
    pub fn energy(&self, params: &PhysParams) -> f64 {
        self.p.hypot(params.m)
    }
}

/// Two-component spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor2 {
    pub upper: Complex64,
    pub lower: Complex64,
}

impl Spinor2 {
    pub fn new(upper: Complex64, lower: Complex64) -> Self {
        Self { upper, lower }
    }

    pub fn norm_sq(&self) -> f64 {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }

    /// Hermitian inner product ⟨self, other⟩.
    pub fn inner(&self, other: &Spinor2) -> Complex64 {
        self.upper.conj() * other.upper + self.lower.conj() * other.lower
    }
}

/// Unit-norm free spinor of a mode.
///
/// For λ = +1 this is the textbook form N·(1, p/(E+m)). For λ = -1 the
/// literal form divides by (m - E), which is a 0/0 at p = 0, so the
/// algebraically equivalent pair
/// (sqrt((E-m)/(2E)), -sign(p)·sqrt((E+m)/(2E))) is used instead, with the
/// convention sign(0) = +1. Basis-vector phase is a gauge choice; only the
/// rank-1 projectors are physical.
pub fn free_spinor(mode: &ModeIndex, params: &PhysParams) -> Spinor2 {
    let e = mode.energy(params);
    let m = params.m;
    let p = mode.p;
    match mode.lambda {
        Sign::Plus => Spinor2::new(
            Complex64::new(((e + m) / (2.0 * e)).sqrt(), 0.0),
            Complex64::new(p / (2.0 * e * (e + m)).sqrt(), 0.0),
        ),
        Sign::Minus => {
            let sgn = if p < 0.0 { -1.0 } else { 1.0 };
            Spinor2::new(
                Complex64::new(((e - m) / (2.0 * e)).sqrt(), 0.0),
                Complex64::new(-sgn * ((e + m) / (2.0 * e)).sqrt(), 0.0),
            )
        }
    }
}

/// Kinetic-term expectation of an evolved mode state,
/// |η|²·[(p - A(t))·2Re(C*·D) + m·(|C|² - |D|²)].
///
/// This equals the total energy whenever the potential vanishes (the
/// asymptotic past and every t ≥ 0); at intermediate times the linear
/// potential has no finite expectation over infinite volume and only the
/// kinetic term is reported.
pub fn mode_energy(state: &ModeState, params: &PhysParams) -> f64 {
    let eta_sq = state.eta.norm_sqr();
    let cross = 2.0 * (state.c.conj() * state.d).re;
    eta_sq
        * (state.shifted_momentum * cross + params.m * (state.c.norm_sqr() - state.d.norm_sqr()))
}

/// |η|²·(|C|² + |D|²); equal to 1 for every state produced by the exact or
/// oracle evolutions.
pub fn mode_norm(state: &ModeState) -> f64 {
    state.eta.norm_sqr() * (state.c.norm_sqr() + state.d.norm_sqr())
}
