//! Divisibility-based (RHP) and distinguishability-based (BLP)
//! non-Markovianity measures and their links to the consistency violation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::QubitState;
use crate::error::{Error, Result};
use crate::kcc::{kcc_violation_closed_form, sine_factor};
use crate::profile::RateProfile;

/// ∫₀ᵀ λ⁻, the negative area of the total rate.
pub fn rhp_measure(profile: &RateProfile, t: f64) -> Result<f64> {
    Ok(profile.integrals_at(t)?.n)
}

/// ∫₀ᵀ (Γ⁻ + γ̃⁻), summing the negative parts channel by channel.
pub fn rhp_channel_measure(profile: &RateProfile, t: f64) -> Result<f64> {
    Ok(profile.integrals_at(t)?.channel_negative)
}

/// (½ e^{−M/2} e^{N/2} S, viol from the closed form).
pub fn viol_rhp_identity(t1: f64, t2: f64, profile: &RateProfile, omega0: f64) -> Result<(f64, f64)> {
    let direct = kcc_violation_closed_form(t1, t2, profile, omega0)?;
    let i = profile.integrals_at(t2)?;
    let rebuilt = 0.5 * (-0.5 * i.m).exp() * (0.5 * rhp_measure(profile, t2)?).exp() * sine_factor(omega0, t1, t2);
    Ok((rebuilt, direct.viol))
}

/// Half the trace norm of ρ1 − ρ2.
pub fn trace_distance(s1: &QubitState, s2: &QubitState) -> f64 {
    ((s1.a - s2.a).powi(2) + (s1.c - s2.c).norm_sqr()).sqrt()
}

/// Orthogonal pure pair cos(δ/2)|0⟩ + e^{iζ} sin(δ/2)|1⟩ and its complement.
pub fn orthogonal_pair(delta: f64, zeta: f64) -> (QubitState, QubitState) {
    let (cos2, sin2) = ((0.5 * delta).cos().powi(2), (0.5 * delta).sin().powi(2));
    let c = Complex64::from_polar(0.5 * delta.sin(), -zeta);
    (QubitState::unchecked(cos2, c), QubitState::unchecked(sin2, -c))
}

/// D(t) = √(e^{−G} sin²δ + e^{−2G} cos²δ) for the evolved orthogonal pair.
pub fn pair_trace_distance(g: f64, delta: f64) -> f64 {
    let e = (-g).exp();
    (e * delta.sin().powi(2) + e * e * delta.cos().powi(2)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlpReport {
    pub n_blp: f64,
    pub n1_tilde: f64,
    pub n2_tilde: f64,
    pub a_plus: f64,
    /// max over the δ grid of ∫ max(dD/dt, 0), from finite differences.
    pub n_grid: f64,
    /// δ attaining `n_grid`.
    pub delta_grid: f64,
    pub viol: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Uniform δ grid with `n` points on [0, π].
pub fn delta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| PI * k as f64 / (n.max(2) - 1) as f64).collect()
}

/// Analytic Ñ1, Ñ2 and their maximum, with a direct δ-grid check.
pub fn blp_measure(profile: &RateProfile, t: f64, deltas: &[f64]) -> Result<BlpReport> {
    let i = profile.integrals_at(t)?;
    let (n_grid, delta_grid) = blp_grid_search(profile, t, deltas)?;
    Ok(BlpReport {
        n_blp: i.n1_tilde.max(i.n2_tilde),
        n1_tilde: i.n1_tilde,
        n2_tilde: i.n2_tilde,
        a_plus: i.a_plus,
        n_grid,
        delta_grid,
        viol: f64::NAN,
        lower: f64::NAN,
        upper: f64::NAN,
    })
}

/// Integrates the positive part of dD/dt on the profile grid for each δ.
pub fn blp_grid_search(profile: &RateProfile, t: f64, deltas: &[f64]) -> Result<(f64, f64)> {
    profile.integrals_at(t)?;
    let cum = profile.cumulative();
    let mut nodes: Vec<(f64, f64)> = profile.t.iter().zip(cum).filter(|(&s, _)| s < t).map(|(&s, c)| (s, c.g)).collect();
    nodes.push((t, profile.integrals_at(t)?.g));
    let mut best = (0.0, 0.0);
    for &delta in deltas {
        let d: Vec<f64> = nodes.iter().map(|&(_, g)| pair_trace_distance(g, delta)).collect();
        let backflow: f64 = d.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum();
        if backflow > best.0 {
            best = (backflow, delta);
        }
    }
    Ok(best)
}

/// Sandwich (S/2)(1 − A⁺/2 + N_BLP/2) ≤ viol ≤ (S/2)(1 − A⁺/2 + 2 N_BLP).
pub fn blp_viol_sandwich(t1: f64, t2: f64, profile: &RateProfile, omega0: f64) -> Result<BlpReport> {
    let i = profile.integrals_at(t2)?;
    let viol = kcc_violation_closed_form(t1, t2, profile, omega0)?.viol;
    let s = sine_factor(omega0, t1, t2);
    let n_blp = i.n1_tilde.max(i.n2_tilde);
    let base = 1.0 - 0.5 * i.a_plus;
    let lower = 0.5 * s * (base + 0.5 * n_blp);
    let upper = 0.5 * s * (base + 2.0 * n_blp);
    const TOL: f64 = 1e-9;
    if !(lower <= viol + TOL && viol <= upper + TOL) {
        return Err(Error::Invariant(format!("BLP sandwich failed: {lower} <= {viol} <= {upper}")));
    }
    Ok(BlpReport {
        n_blp,
        n1_tilde: i.n1_tilde,
        n2_tilde: i.n2_tilde,
        a_plus: i.a_plus,
        n_grid: f64::NAN,
        delta_grid: f64::NAN,
        viol,
        lower,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{propagate_closed_form, Propagator};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rhp_examples() {
        let pos = RateProfile::from_channels(10.0, 100, |_| (0.2, 0.1)).unwrap();
        assert_eq!(rhp_measure(&pos, 10.0).unwrap(), 0.0);
        let sine = RateProfile::from_channels(2.0 * PI, 4000, |t| (t.sin(), 0.0)).unwrap();
        assert_abs_diff_eq!(rhp_measure(&sine, 2.0 * PI).unwrap(), 2.0, epsilon = 1e-6);
        let (r, d) = viol_rhp_identity(1.0, 2.0, &pos, 1.0).unwrap();
        assert_abs_diff_eq!(r, d, epsilon = 1e-15);
    }

    #[test]
    fn channels_can_differ_from_total() {
        // Γ < 0 while λ = Γ + γ̃ > 0
        let p = RateProfile::from_channels(5.0, 50, |_| (-0.1, 0.3)).unwrap();
        assert_eq!(rhp_measure(&p, 5.0).unwrap(), 0.0);
        assert_abs_diff_eq!(rhp_channel_measure(&p, 5.0).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn trace_distance_examples() {
        let s = QubitState::new(0.3, Complex64::new(0.1, 0.2)).unwrap();
        assert_eq!(trace_distance(&s, &s), 0.0);
        let one = QubitState::unchecked(0.0, Complex64::new(0.0, 0.0));
        assert_eq!(trace_distance(&QubitState::ground(), &one), 1.0);
    }

    #[test]
    fn evolved_pair_matches_closed_distance() {
        let p = RateProfile::from_channels(20.0, 2000, |t| (0.3 * (0.5 * t).sin(), 0.05)).unwrap();
        let prop = Propagator::diagonal(&p);
        for delta in [0.0, 0.4, PI / 2.0, 2.5] {
            let (a, b) = orthogonal_pair(delta, 0.7);
            for t in [1.0, 9.3, 20.0] {
                let d = trace_distance(&prop.state(&a, 0.0, t).unwrap(), &prop.state(&b, 0.0, t).unwrap());
                let g = p.integrals_at(t).unwrap().g;
                assert_abs_diff_eq!(d, pair_trace_distance(g, delta), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn backflow_only_when_rate_negative() {
        let p = RateProfile::from_channels(20.0, 2000, |t| (0.3 * (0.5 * t).sin() + 0.05, 0.0)).unwrap();
        let (a, b) = orthogonal_pair(1.0, 0.0);
        let d: Vec<f64> = p
            .t
            .iter()
            .map(|&t| {
                let x = propagate_closed_form(&a, 1.0, 0.0, t, &p).unwrap();
                let y = propagate_closed_form(&b, 1.0, 0.0, t, &p).unwrap();
                trace_distance(&x, &y)
            })
            .collect();
        for k in 1..d.len() - 1 {
            let lam = p.lambda[k];
            if lam.abs() > 1e-3 {
                assert_eq!(d[k + 1] - d[k - 1] > 0.0, lam < 0.0, "t = {}", p.t[k]);
            }
        }
    }

    #[test]
    fn markovian_blp_is_zero() {
        let p = RateProfile::from_channels(10.0, 1000, |t| (0.1 + 0.05 * t.sin(), 0.1)).unwrap();
        let r = blp_measure(&p, 10.0, &delta_grid(61)).unwrap();
        assert_eq!(r.n_blp, 0.0);
        assert_eq!(r.n_grid, 0.0);
        let s = blp_viol_sandwich(1.0, 4.0, &p, 1.0).unwrap();
        assert_abs_diff_eq!(s.lower, s.upper, epsilon = 1e-15);
        assert_abs_diff_eq!(s.viol, s.lower, epsilon = 1e-14);
    }

    #[test]
    fn weak_lobe_selects_second_integral() {
        // small G throughout so e^{−G} > 1/4 and δ = 0 is optimal
        let p = RateProfile::from_channels(10.0, 2000, |t| (0.1 * (0.8 * t).sin() + 0.02, 0.0)).unwrap();
        let r = blp_measure(&p, 10.0, &delta_grid(61)).unwrap();
        assert!(r.n2_tilde > r.n1_tilde);
        assert_eq!(r.n_blp, r.n2_tilde);
        assert_eq!(r.delta_grid, 0.0);
        assert_abs_diff_eq!(r.n_grid, r.n2_tilde, epsilon = 1e-6);
    }

    #[test]
    fn strong_damping_selects_first_integral() {
        let p = RateProfile::from_channels(15.0, 3000, |t| (0.2 - 0.3 * (t - 6.0).tanh(), 0.0)).unwrap();
        assert!(p.cumulative().iter().skip(1000).all(|c| (-c.g).exp() < 0.25));
        let r = blp_measure(&p, 15.0, &delta_grid(61)).unwrap();
        assert!(r.n1_tilde > r.n2_tilde);
        assert_abs_diff_eq!(r.delta_grid, PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.n_grid, r.n1_tilde, epsilon = 1e-6);
    }

    #[test]
    fn zero_sine_collapses_sandwich() {
        let p = RateProfile::from_channels(10.0, 1000, |t| (0.3 * t.sin(), 0.0)).unwrap();
        let s = blp_viol_sandwich(PI, 8.0, &p, 1.0).unwrap();
        assert!(s.lower.abs() < 1e-15 && s.upper.abs() < 1e-15 && s.viol < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn sandwich_holds_when_g_nonnegative(amp in 0.0f64..0.5, w in 0.2f64..2.0, off in 0.0f64..0.3, t1 in 0.0f64..20.0, frac in 0.0f64..1.0) {
            let p = RateProfile::from_channels(20.0, 2000, |t| (amp * (w * t).sin() + off + 0.6 * amp, 0.0)).unwrap();
            prop_assume!(p.cumulative().iter().all(|c| c.g >= 0.0));
            let t2 = t1 + frac * (20.0 - t1);
            let s = blp_viol_sandwich(t1, t2, &p, 1.0).unwrap();
            prop_assert!(s.lower <= s.upper + 1e-15);
            prop_assert!(s.n1_tilde >= 0.5 * s.n2_tilde - 1e-12);
            let (r, d) = viol_rhp_identity(t1, t2, &p, 1.0).unwrap();
            prop_assert!((r - d).abs() < 1e-12);
            prop_assert!(rhp_measure(&p, t2).unwrap() >= rhp_measure(&p, t1).unwrap());
        }
    }
}
