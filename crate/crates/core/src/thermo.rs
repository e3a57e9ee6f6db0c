//! Entropy, mutual information, Fano factor, heat and entropy production of
//! the qubit, and their closed-form links to the consistency violation.

use crate::dynamics::{bloch_radius, QubitState, STATE_TOLERANCE};
use crate::error::{Error, Result};
use crate::kcc::{kcc_violation_closed_form, sine_factor};
use crate::profile::{RateProfile, Rates};

/// Smallest |S| accepted when dividing by the sine factor.
pub const SINE_THRESHOLD: f64 = 1e-6;

/// f(p) = −p ln p − (1 − p) ln(1 − p), with 0 ln 0 = 0.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    term(p) + term(1.0 - p)
}

fn physical_radius(state: &QubitState) -> Result<f64> {
    let r = bloch_radius(state);
    if !(r <= 1.0 + STATE_TOLERANCE) {
        return Err(Error::Unphysical(format!("Bloch radius {r} exceeds one")));
    }
    Ok(r.min(1.0))
}

/// S(ρ) = f((1 + r)/2) in nats.
pub fn von_neumann_entropy(state: &QubitState) -> Result<f64> {
    Ok(binary_entropy(0.5 * (1.0 + physical_radius(state)?)))
}

/// System–reservoir mutual information for an initially pure system state,
/// which equals the system entropy.
pub fn mutual_information(state: &QubitState) -> Result<f64> {
    von_neumann_entropy(state)
}

fn checked_sine(omega0: f64, t1: f64, t2: f64) -> Result<f64> {
    let s = sine_factor(omega0, t1, t2);
    if s < SINE_THRESHOLD {
        return Err(Error::Conditioning { s_factor: s, threshold: SINE_THRESHOLD });
    }
    Ok(s)
}

/// I = f[(1 + √((2a − 1)² + 4 viol²/S²))/2].
pub fn mi_from_viol(viol: f64, a_t2: f64, t1: f64, t2: f64, omega0: f64) -> Result<f64> {
    let s = checked_sine(omega0, t1, t2)?;
    let radicand = (2.0 * a_t2 - 1.0).powi(2) + 4.0 * (viol / s).powi(2);
    if radicand > 1.0 + 1e-9 {
        return Err(Error::InconsistentInputs(format!("Bloch radius squared {radicand} exceeds one")));
    }
    Ok(binary_entropy(0.5 * (1.0 + radicand.min(1.0).sqrt())))
}

/// Balanced populations: I = f[(1 + 2 viol/S)/2].
pub fn mi_balanced(viol: f64, s_factor: f64) -> Result<f64> {
    if s_factor < SINE_THRESHOLD {
        return Err(Error::Conditioning { s_factor, threshold: SINE_THRESHOLD });
    }
    let x = 2.0 * viol / s_factor;
    if x > 1.0 + 1e-9 {
        return Err(Error::InconsistentInputs(format!("2 viol/S = {x} exceeds one")));
    }
    Ok(binary_entropy(0.5 * (1.0 + x.min(1.0))))
}

/// Second-order expansion ln 2 − 2 (viol/S)² of [`mi_balanced`].
pub fn mi_balanced_small_viol(viol: f64, s_factor: f64) -> f64 {
    std::f64::consts::LN_2 - 2.0 * (viol / s_factor).powi(2)
}

/// F = 1 − p₊ = ½ − Re c for a σx measurement.
pub fn fano_factor(state: &QubitState) -> f64 {
    0.5 - state.c.re
}

/// F(t2) = ½ − (viol/S) cos(ω0 t2).
pub fn fano_from_viol(viol: f64, t1: f64, t2: f64, omega0: f64) -> Result<f64> {
    let s = checked_sine(omega0, t1, t2)?;
    Ok(0.5 - viol / s * (omega0 * t2).cos())
}

/// Q(t2) = ω0[e^{−G}(½ + ∫₀^{t2} e^{G}Γ) − ½] for a(0) = ½.
pub fn heat(t2: f64, profile: &RateProfile, omega0: f64) -> Result<f64> {
    let g = profile.integrals_at(t2)?.g;
    let pumped = profile.pumped_integral(0.0, t2)?;
    Ok(omega0 * ((-g).exp() * (0.5 + pumped) - 0.5))
}

/// Tr[ρ H] for H = (ω0/2)σz.
pub fn energy(state: &QubitState, omega0: f64) -> f64 {
    omega0 * (state.a - 0.5)
}

/// Q = ω0[(2 viol/S)²(½ + ∫₀^{t2} e^{G}Γ) − ½].
pub fn heat_viol_identity(viol: f64, t1: f64, t2: f64, profile: &RateProfile, omega0: f64) -> Result<f64> {
    let s = checked_sine(omega0, t1, t2)?;
    let pumped = profile.pumped_integral(0.0, t2)?;
    Ok(omega0 * ((2.0 * viol / s).powi(2) * (0.5 + pumped) - 0.5))
}

/// viol = (S/2)√(1 + 2Q/ω0) when Γ ≡ 0.
pub fn pure_decay_witness(q: f64, s_factor: f64, omega0: f64) -> f64 {
    0.5 * s_factor * (1.0 + 2.0 * q / omega0).max(0.0).sqrt()
}

/// viol = (S/2)√(1 − 2Q/ω0) when γ̃ ≡ 0.
pub fn pure_excitation_witness(q: f64, s_factor: f64, omega0: f64) -> f64 {
    0.5 * s_factor * (1.0 - 2.0 * q / omega0).max(0.0).sqrt()
}

/// (S/2)√(1 − Q/ω0), an alternative normalization of [`pure_excitation_witness`]
/// that does not invert the heat exactly.
pub fn pure_excitation_witness_unit_heat(q: f64, s_factor: f64, omega0: f64) -> f64 {
    0.5 * s_factor * (1.0 - q / omega0).max(0.0).sqrt()
}

/// Time derivatives (ȧ, Re[c* ċ]) for H = (ω0/2)σz.
pub fn state_derivatives(state: &QubitState, rates: &Rates) -> (f64, f64) {
    let a_dot = rates.big_gamma - rates.lambda * state.a;
    (a_dot, -0.5 * rates.lambda * state.c.norm_sqr())
}

/// dS/dt = −[(a − ½)ȧ + Re(c* ċ)]/r' · ln[(½ + r')/(½ − r')], r' = r/2.
pub fn entropy_rate(state: &QubitState, rates: &Rates) -> Result<f64> {
    let r = physical_radius(state)?;
    let r_app = 0.5 * r;
    if r_app >= 0.5 - 1e-12 {
        return Err(Error::SingularLog { radius: r });
    }
    let (a_dot, re_cc) = state_derivatives(state, rates);
    let numerator = (state.a - 0.5) * a_dot + re_cc;
    if r_app < 1e-12 {
        return Ok(-4.0 * numerator);
    }
    let log = ((0.5 + r_app) / (0.5 - r_app)).ln();
    Ok(-numerator / r_app * log)
}

/// Spohn rate σ = dS/dt − β ω0 ȧ relative to the Gibbs state of (ω0/2)σz.
pub fn entropy_production(state: &QubitState, rates: &Rates, beta: f64, omega0: f64) -> Result<f64> {
    let (a_dot, _) = state_derivatives(state, rates);
    Ok(entropy_rate(state, rates)? - beta * omega0 * a_dot)
}

/// σ at time t for the |+⟩ preparation, evolved in closed form.
pub fn entropy_production_rate(t: f64, profile: &RateProfile, beta: f64, omega0: f64) -> Result<f64> {
    let state = crate::dynamics::propagate_closed_form(&QubitState::plus(), omega0, 0.0, t, profile)?;
    entropy_production(&state, &profile.rates_at(t)?, beta, omega0)
}

/// σ ≈ 2λ viol²/S² − β ω0 ȧ.
pub fn entropy_production_from_viol(viol: f64, s_factor: f64, lambda: f64, a_dot: f64, beta: f64, omega0: f64) -> Result<f64> {
    if s_factor < SINE_THRESHOLD {
        return Err(Error::Conditioning { s_factor, threshold: SINE_THRESHOLD });
    }
    Ok(2.0 * lambda * (viol / s_factor).powi(2) - beta * omega0 * a_dot)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaApprox {
    pub approx: f64,
    pub exact: f64,
    pub deviation: f64,
}

/// Small-coherence approximation at t2 for the |+⟩ preparation, with the exact value.
pub fn entropy_production_approx(t1: f64, t2: f64, profile: &RateProfile, beta: f64, omega0: f64) -> Result<SigmaApprox> {
    let s = checked_sine(omega0, t1, t2)?;
    let viol = kcc_violation_closed_form(t1, t2, profile, omega0)?.viol;
    let state = crate::dynamics::propagate_closed_form(&QubitState::plus(), omega0, 0.0, t2, profile)?;
    let rates = profile.rates_at(t2)?;
    let (a_dot, _) = state_derivatives(&state, &rates);
    let approx = entropy_production_from_viol(viol, s, rates.lambda, a_dot, beta, omega0)?;
    let exact = entropy_production(&state, &rates, beta, omega0)?;
    Ok(SigmaApprox { approx, exact, deviation: approx - exact })
}

/// viol ≈ (S/√2)√(σ/λ) in the ȧ ≈ 0 regime.
pub fn sigma_witness(sigma: f64, lambda: f64, s_factor: f64) -> f64 {
    s_factor / 2f64.sqrt() * (sigma / lambda).max(0.0).sqrt()
}

/// (S/√2)√(Q/λ), the same form with the heat in the radical.
pub fn sigma_witness_heat_variant(q: f64, lambda: f64, s_factor: f64) -> f64 {
    s_factor / 2f64.sqrt() * (q / lambda).max(0.0).sqrt()
}

/// One row of the thermodynamic time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoSnapshot {
    pub t: f64,
    pub s_vn: f64,
    pub i_sr: f64,
    pub f_x: f64,
    pub q: f64,
    pub sigma: f64,
    pub sigma_approx: f64,
}

/// Snapshot at `t` for the |+⟩ preparation; entries that are undefined
/// (unphysical state, pure state, vanishing sine factor) are NaN.
pub fn thermo_snapshot(t1: f64, t: f64, profile: &RateProfile, beta: f64, omega0: f64) -> Result<ThermoSnapshot> {
    let state = crate::dynamics::propagate_closed_form(&QubitState::plus(), omega0, 0.0, t, profile)?;
    let rates = profile.rates_at(t)?;
    let s_vn = von_neumann_entropy(&state).unwrap_or(f64::NAN);
    let sigma = entropy_production(&state, &rates, beta, omega0).unwrap_or(f64::NAN);
    let sigma_approx = if t >= t1 {
        let viol = kcc_violation_closed_form(t1, t, profile, omega0)?.viol;
        let (a_dot, _) = state_derivatives(&state, &rates);
        entropy_production_from_viol(viol, sine_factor(omega0, t1, t), rates.lambda, a_dot, beta, omega0).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    Ok(ThermoSnapshot {
        t,
        s_vn,
        i_sr: s_vn,
        f_x: fano_factor(&state),
        q: energy(&state, omega0) - energy(&QubitState::plus(), omega0),
        sigma,
        sigma_approx,
    })
}
