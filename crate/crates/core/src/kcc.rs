//! Two-time measurement statistics in an arbitrary projective basis and the
//! Kolmogorov-consistency violation obtained by marginalizing over the earlier
//! outcome.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::dynamics::{Propagator, QubitState};
use crate::error::{Error, Result};
use crate::operator::Operator2;
use crate::profile::RateProfile;

/// Basis {|u1⟩, |u2⟩} with |u1⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    theta: f64,
    phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    U1,
    U2,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::U1, Outcome::U2];

    pub fn other(self) -> Self {
        match self {
            Outcome::U1 => Outcome::U2,
            Outcome::U2 => Outcome::U1,
        }
    }

    /// Eigenvalue ±1 of the observable |u1⟩⟨u1| − |u2⟩⟨u2|.
    pub fn sign(self) -> f64 {
        match self {
            Outcome::U1 => 1.0,
            Outcome::U2 => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Outcome::U1 => 0,
            Outcome::U2 => 1,
        }
    }
}

impl MeasurementBasis {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("basis angle theta must lie in [0, pi], got {theta}")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain("basis angle phi must be finite".into()));
        }
        let phi = if theta == 0.0 || theta == PI { 0.0 } else { phi.rem_euclid(TAU) };
        Ok(Self { theta, phi })
    }

    /// Eigenbasis of σx, {|+⟩, |−⟩}.
    pub fn x_basis() -> Self {
        Self { theta: PI / 2.0, phi: 0.0 }
    }

    /// Computational basis {|0⟩, |1⟩}.
    pub fn z_basis() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Post-measurement state |u⟩⟨u|.
    pub fn post_measurement(&self, outcome: Outcome) -> QubitState {
        let s = outcome.sign();
        QubitState::unchecked(
            0.5 * (1.0 + s * self.theta.cos()),
            Complex64::from_polar(0.5 * s * self.theta.sin(), -self.phi),
        )
    }

    pub fn projector(&self, outcome: Outcome) -> Operator2 {
        self.post_measurement(outcome).to_operator()
    }
}

/// p_{u1} = 1/2 + (a − 1/2)cos θ + sin θ Re[e^{iφ} c], p_{u2} = 1 − p_{u1}.
pub fn single_time_prob(state: &QubitState, basis: &MeasurementBasis, outcome: Outcome) -> f64 {
    let p1 = 0.5
        + (state.a - 0.5) * basis.theta.cos()
        + basis.theta.sin() * (Complex64::from_polar(1.0, basis.phi) * state.c).re;
    match outcome {
        Outcome::U1 => p1,
        Outcome::U2 => 1.0 - p1,
    }
}

fn check_times(t1: f64, t2: f64, horizon: f64) -> Result<()> {
    if !(0.0 <= t1 && t1 <= t2) {
        return Err(Error::Domain(format!("measurement times must satisfy 0 <= t1 <= t2, got ({t1}, {t2})")));
    }
    if t2 > horizon * (1.0 + 1e-12) {
        return Err(Error::Range { t: t2, horizon });
    }
    Ok(())
}

/// Probability of `outcome2` at t2 given `outcome1` was observed at t1.
pub fn conditional_prob(
    prop: &Propagator,
    basis: &MeasurementBasis,
    outcome1: Outcome,
    t1: f64,
    t2: f64,
    outcome2: Outcome,
) -> Result<f64> {
    check_times(t1, t2, prop.profile.horizon())?;
    let evolved = prop.state(&basis.post_measurement(outcome1), t1, t2)?;
    Ok(single_time_prob(&evolved, basis, outcome2))
}

/// Sequential joint probabilities p(x1 at t1) p(x2 at t2 | x1), indexed [x1][x2].
pub fn joint_probabilities(
    prop: &Propagator,
    initial: &QubitState,
    basis: &MeasurementBasis,
    t1: f64,
    t2: f64,
) -> Result<[[f64; 2]; 2]> {
    check_times(t1, t2, prop.profile.horizon())?;
    let rho1 = prop.state(initial, 0.0, t1)?;
    let mut out = [[0.0; 2]; 2];
    for x1 in Outcome::ALL {
        let p1 = single_time_prob(&rho1, basis, x1);
        let evolved = prop.state(&basis.post_measurement(x1), t1, t2)?;
        for x2 in Outcome::ALL {
            out[x1.index()][x2.index()] = p1 * single_time_prob(&evolved, basis, x2);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolResult {
    pub viol: f64,
    /// Population contribution.
    pub p_term: f64,
    /// Coherence contribution.
    pub c_term: f64,
    /// |sin(ω0 t1) sin(ω0 (t2 − t1))|, only for the |+⟩ / σx setup.
    pub s_factor: Option<f64>,
    pub m_t2: Option<f64>,
    pub n_t2: Option<f64>,
}

/// Violation for outcome u1; see [`kcc_violation_for`].
pub fn kcc_violation(
    prop: &Propagator,
    initial: &QubitState,
    basis: &MeasurementBasis,
    t1: f64,
    t2: f64,
) -> Result<ViolResult> {
    kcc_violation_for(prop, initial, basis, t1, t2, Outcome::U1)
}

/// |p_x(t2) − Σ_i p_i(t1) p_x(t2 | i)| split into population and coherence parts.
pub fn kcc_violation_for(
    prop: &Propagator,
    initial: &QubitState,
    basis: &MeasurementBasis,
    t1: f64,
    t2: f64,
    outcome: Outcome,
) -> Result<ViolResult> {
    check_times(t1, t2, prop.profile.horizon())?;
    let rho1 = prop.state(initial, 0.0, t1)?;
    let rho2 = prop.state(&rho1, t1, t2)?;
    let rotation = Complex64::from_polar(1.0, basis.phi);
    let (cos_t, sin_t) = (basis.theta.cos(), basis.theta.sin());
    let mut p_term = rho2.a - 0.5;
    let mut c_term = (rotation * rho2.c).re;
    let mut mixture = 0.0;
    for i in Outcome::ALL {
        let p_i = single_time_prob(&rho1, basis, i);
        let evolved = prop.state(&basis.post_measurement(i), t1, t2)?;
        p_term -= p_i * (evolved.a - 0.5);
        c_term -= p_i * (rotation * evolved.c).re;
        mixture += p_i * single_time_prob(&evolved, basis, outcome);
    }
    let s = outcome.sign();
    Ok(ViolResult {
        viol: (single_time_prob(&rho2, basis, outcome) - mixture).abs(),
        p_term: s * cos_t * p_term,
        c_term: s * sin_t * c_term,
        s_factor: None,
        m_t2: None,
        n_t2: None,
    })
}

/// S(t1, t2) = |sin(ω0 t1) sin(ω0 (t2 − t1))|.
pub fn sine_factor(omega0: f64, t1: f64, t2: f64) -> f64 {
    ((omega0 * t1).sin() * (omega0 * (t2 - t1)).sin()).abs()
}

/// viol = ½ e^{−G(0,t2)/2} S for initial |+⟩ measured in the σx basis.
pub fn kcc_violation_closed_form(t1: f64, t2: f64, profile: &RateProfile, omega0: f64) -> Result<ViolResult> {
    check_times(t1, t2, profile.horizon())?;
    let i = profile.integrals_at(t2)?;
    let signed = (omega0 * t1).sin() * (omega0 * (t2 - t1)).sin();
    let c_term = -0.5 * (-0.5 * i.g).exp() * signed;
    Ok(ViolResult {
        viol: c_term.abs(),
        p_term: 0.0,
        c_term,
        s_factor: Some(signed.abs()),
        m_t2: Some(i.m),
        n_t2: Some(i.n),
    })
}

/// ½ e^{−(M − N)/2}, not clipped when N > M.
pub fn viol_upper_bound(profile: &RateProfile, t2: f64) -> Result<f64> {
    let i = profile.integrals_at(t2)?;
    Ok(0.5 * (-0.5 * (i.m - i.n)).exp())
}
