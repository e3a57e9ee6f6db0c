//! Qubit state and its propagation under the time-local master equation
//!
//! dρ/dt = −i[H, ρ] + Γ(t) L_{σ−}[ρ] + γ̃(t) L_{σ+}[ρ],  σ− = |0⟩⟨1|,
//!
//! either in closed form (H = (ω0/2)σz) or with fixed-step RK4.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::operator::Operator2;
use crate::profile::RateProfile;

/// Tolerance of the positivity condition |c|² ≤ a(1 − a).
pub const STATE_TOLERANCE: f64 = 1e-9;
/// Eigenvalue threshold used while integrating.
pub const POSITIVITY_THRESHOLD: f64 = 1e-6;

/// Density matrix [[a, c], [c*, 1 − a]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub a: f64,
    pub c: Complex64,
}

impl QubitState {
    pub fn new(a: f64, c: Complex64) -> Result<Self> {
        let s = Self { a, c };
        if !a.is_finite() || !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Unphysical("non-finite state entries".into()));
        }
        if !s.is_physical(STATE_TOLERANCE) {
            return Err(Error::Unphysical(format!("a = {a}, |c| = {} is not a density matrix", c.norm())));
        }
        Ok(s)
    }

    /// A propagated state that may have left the physical region.
    pub fn unchecked(a: f64, c: Complex64) -> Self {
        Self { a, c }
    }

    /// |+⟩ = (|0⟩ + |1⟩)/√2.
    pub fn plus() -> Self {
        Self { a: 0.5, c: Complex64::new(0.5, 0.0) }
    }

    /// |0⟩.
    pub fn ground() -> Self {
        Self { a: 1.0, c: Complex64::new(0.0, 0.0) }
    }

    pub fn maximally_mixed() -> Self {
        Self { a: 0.5, c: Complex64::new(0.0, 0.0) }
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.a >= -tol && self.a <= 1.0 + tol && self.c.norm_sqr() <= self.a * (1.0 - self.a) + tol
    }

    /// Smaller eigenvalue (1 − r)/2.
    pub fn min_eigenvalue(&self) -> f64 {
        0.5 * (1.0 - bloch_radius(self))
    }

    pub fn purity(&self) -> f64 {
        self.a * self.a + (1.0 - self.a) * (1.0 - self.a) + 2.0 * self.c.norm_sqr()
    }

    pub fn to_operator(&self) -> Operator2 {
        Operator2 {
            x00: Complex64::new(self.a, 0.0),
            x01: self.c,
            x10: self.c.conj(),
            trace: Complex64::new(1.0, 0.0),
        }
    }

    /// Reads a Hermitian unit-trace operator back as a state.
    pub fn from_operator(op: &Operator2) -> Self {
        Self { a: op.x00.re, c: op.x01 }
    }
}

/// r = √((2a − 1)² + 4|c|²); eigenvalues of ρ are (1 ± r)/2.
pub fn bloch_radius(state: &QubitState) -> f64 {
    ((2.0 * state.a - 1.0).powi(2) + 4.0 * state.c.norm_sqr()).sqrt()
}

/// H = (ω0/2)σz + Ωσx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian {
    pub omega0: f64,
    pub big_omega: f64,
}

impl Hamiltonian {
    pub fn new(omega0: f64, big_omega: f64) -> Self {
        Self { omega0, big_omega }
    }

    pub fn sigma_z(omega0: f64) -> Self {
        Self { omega0, big_omega: 0.0 }
    }

    pub fn is_diagonal(&self) -> bool {
        self.big_omega == 0.0
    }
}

impl Default for Hamiltonian {
    fn default() -> Self {
        Self::sigma_z(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PositivityMode {
    /// Abort on the first positivity violation.
    #[default]
    Strict,
    /// Record the first violation and continue.
    Permissive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub step: f64,
    pub positivity: PositivityMode,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { step: 1e-3, positivity: PositivityMode::Strict }
    }
}

impl OdeOptions {
    pub fn permissive(step: f64) -> Self {
        Self { step, positivity: PositivityMode::Permissive }
    }
}

/// Propagated state and the time positivity was first lost, if it was.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagated {
    pub state: QubitState,
    pub first_violation: Option<f64>,
}

fn check_order(t0: f64, t1: f64) -> Result<()> {
    if !(t0 <= t1) {
        return Err(Error::Domain(format!("propagation needs t0 <= t1, got {t0} > {t1}")));
    }
    Ok(())
}

/// Exact solution for H = (ω0/2)σz applied to an arbitrary operator.
pub fn propagate_operator_closed_form(
    op: &Operator2,
    omega0: f64,
    t0: f64,
    t1: f64,
    profile: &RateProfile,
) -> Result<Operator2> {
    check_order(t0, t1)?;
    let g = profile.g_between(t0, t1)?;
    let pumped = profile.pumped_integral(t0, t1)?;
    let decay = (-g).exp();
    let half = (-0.5 * g).exp();
    let delta = t1 - t0;
    let phase = Complex64::from_polar(half, -omega0 * delta);
    Ok(Operator2 {
        x00: (op.x00 + op.trace * pumped) * decay,
        x01: op.x01 * phase,
        x10: op.x10 * phase.conj(),
        trace: op.trace,
    })
}

/// a(t1) = e^{−G}(a(t0) + ∫e^{G(t0,s)}Γ ds), c(t1) = c(t0) e^{−iω0Δ} e^{−G/2}.
pub fn propagate_closed_form(state0: &QubitState, omega0: f64, t0: f64, t1: f64, profile: &RateProfile) -> Result<QubitState> {
    let op = propagate_operator_closed_form(&state0.to_operator(), omega0, t0, t1, profile)?;
    Ok(QubitState::from_operator(&op))
}

fn lindblad_rhs(x: &Operator2, h: &Hamiltonian, big_gamma: f64, gamma_tilde: f64) -> Operator2 {
    let i = Complex64::i();
    let om = h.big_omega;
    let w0 = h.omega0;
    let lambda = big_gamma + gamma_tilde;
    let x11 = x.x11();
    Operator2 {
        x00: -i * om * (x.x10 - x.x01) + x11 * big_gamma - x.x00 * gamma_tilde,
        x01: -i * (x.x01 * w0 + (x11 - x.x00) * om) - x.x01 * (0.5 * lambda),
        x10: -i * (-x.x10 * w0 + (x.x00 - x11) * om) - x.x10 * (0.5 * lambda),
        trace: Complex64::new(0.0, 0.0),
    }
}

fn min_eigenvalue_hermitian(x: &Operator2) -> f64 {
    let tr = x.trace.re;
    let diff = 2.0 * x.x00.re - tr;
    0.5 * (tr - (diff * diff + 4.0 * x.x01.norm_sqr()).sqrt())
}

struct OdeRun {
    op: Operator2,
    first_violation: Option<f64>,
}

fn integrate<F>(
    op0: &Operator2,
    h: &Hamiltonian,
    t0: f64,
    t1: f64,
    profile: &RateProfile,
    options: &OdeOptions,
    mut observe: F,
) -> Result<OdeRun>
where
    F: FnMut(f64, &Operator2),
{
    check_order(t0, t1)?;
    if !(options.step > 0.0) {
        return Err(Error::Domain(format!("ODE step must be positive, got {}", options.step)));
    }
    profile.rates_at(t0)?;
    profile.rates_at(t1)?;
    let span = t1 - t0;
    let n = ((span / options.step) - 1e-9).ceil().max(0.0) as usize;
    let mut x = *op0;
    observe(t0, &x);
    if n == 0 {
        return Ok(OdeRun { op: x, first_violation: None });
    }
    let dt = span / n as f64;
    let check_positivity = op0.is_hermitian(1e-12);
    let mut first_violation = None;
    let rhs = |t: f64, x: &Operator2| {
        let (big_gamma, gamma_tilde) = profile.channels_unchecked(t);
        lindblad_rhs(x, h, big_gamma, gamma_tilde)
    };
    for k in 0..n {
        let t = t0 + k as f64 * dt;
        let k1 = rhs(t, &x);
        let k2 = rhs(t + 0.5 * dt, &x.axpy(0.5 * dt, &k1));
        let k3 = rhs(t + 0.5 * dt, &x.axpy(0.5 * dt, &k2));
        let k4 = rhs(t + dt, &x.axpy(dt, &k3));
        let sum = Operator2 {
            x00: k1.x00 + (k2.x00 + k3.x00) * 2.0 + k4.x00,
            x01: k1.x01 + (k2.x01 + k3.x01) * 2.0 + k4.x01,
            x10: k1.x10 + (k2.x10 + k3.x10) * 2.0 + k4.x10,
            trace: Complex64::new(0.0, 0.0),
        };
        x = x.axpy(dt / 6.0, &sum);
        let t_next = if k + 1 == n { t1 } else { t0 + (k + 1) as f64 * dt };
        if check_positivity && first_violation.is_none() {
            let ev = min_eigenvalue_hermitian(&x);
            if ev < -POSITIVITY_THRESHOLD {
                if options.positivity == PositivityMode::Strict {
                    return Err(Error::Positivity { t: t_next, min_eigenvalue: ev });
                }
                first_violation = Some(t_next);
            }
        }
        observe(t_next, &x);
    }
    Ok(OdeRun { op: x, first_violation })
}

/// Fixed-step RK4 with linearly interpolated rates.
pub fn propagate_ode(
    state0: &QubitState,
    h: &Hamiltonian,
    t0: f64,
    t1: f64,
    profile: &RateProfile,
    options: &OdeOptions,
) -> Result<Propagated> {
    let run = integrate(&state0.to_operator(), h, t0, t1, profile, options, |_, _| {})?;
    Ok(Propagated { state: QubitState::from_operator(&run.op), first_violation: run.first_violation })
}

/// RK4 propagation of a general (possibly non-Hermitian) operator.
pub fn propagate_operator_ode(
    op: &Operator2,
    h: &Hamiltonian,
    t0: f64,
    t1: f64,
    profile: &RateProfile,
    options: &OdeOptions,
) -> Result<Operator2> {
    Ok(integrate(op, h, t0, t1, profile, options, |_, _| {})?.op)
}

/// Chooses the closed form for a diagonal Hamiltonian and RK4 otherwise.
#[derive(Debug, Clone, Copy)]
pub struct Propagator<'a> {
    pub profile: &'a RateProfile,
    pub hamiltonian: Hamiltonian,
    pub options: OdeOptions,
    /// Use RK4 even when the closed form applies.
    pub force_ode: bool,
}

impl<'a> Propagator<'a> {
    pub fn new(profile: &'a RateProfile, hamiltonian: Hamiltonian, options: OdeOptions) -> Self {
        Self { profile, hamiltonian, options, force_ode: false }
    }

    /// RK4 for every Hamiltonian, including the diagonal one.
    pub fn ode(profile: &'a RateProfile, hamiltonian: Hamiltonian, options: OdeOptions) -> Self {
        Self { profile, hamiltonian, options, force_ode: true }
    }

    fn closed_form(&self) -> bool {
        self.hamiltonian.is_diagonal() && !self.force_ode
    }

    /// Closed-form propagator for H = (ω0/2)σz with ω0 = 1.
    pub fn diagonal(profile: &'a RateProfile) -> Self {
        Self::new(profile, Hamiltonian::default(), OdeOptions::default())
    }

    pub fn propagate(&self, state: &QubitState, t0: f64, t1: f64) -> Result<Propagated> {
        if self.closed_form() {
            let s = propagate_closed_form(state, self.hamiltonian.omega0, t0, t1, self.profile)?;
            Ok(Propagated { state: s, first_violation: None })
        } else {
            propagate_ode(state, &self.hamiltonian, t0, t1, self.profile, &self.options)
        }
    }

    pub fn state(&self, state: &QubitState, t0: f64, t1: f64) -> Result<QubitState> {
        Ok(self.propagate(state, t0, t1)?.state)
    }

    /// Applies the dynamical map Λ_{t0→t1} to an arbitrary operator.
    pub fn propagate_operator(&self, op: &Operator2, t0: f64, t1: f64) -> Result<Operator2> {
        if self.closed_form() {
            propagate_operator_closed_form(op, self.hamiltonian.omega0, t0, t1, self.profile)
        } else {
            propagate_operator_ode(op, &self.hamiltonian, t0, t1, self.profile, &self.options)
        }
    }

    /// States at every ODE step (or at each profile node for the closed form).
    pub fn trajectory(&self, state: &QubitState, t0: f64, t1: f64) -> Result<Vec<(f64, QubitState)>> {
        if self.closed_form() {
            let mut out = vec![(t0, *state)];
            for &t in self.profile.t.iter().filter(|&&t| t > t0 && t < t1) {
                out.push((t, propagate_closed_form(state, self.hamiltonian.omega0, t0, t, self.profile)?));
            }
            if t1 > t0 {
                out.push((t1, propagate_closed_form(state, self.hamiltonian.omega0, t0, t1, self.profile)?));
            }
            Ok(out)
        } else {
            let mut out = Vec::new();
            integrate(&state.to_operator(), &self.hamiltonian, t0, t1, self.profile, &self.options, |t, x| {
                out.push((t, QubitState::from_operator(x)))
            })?;
            Ok(out)
        }
    }
}

/// CSV with columns `t,a,re_c,im_c,r`.
pub fn trajectory_csv(points: &[(f64, QubitState)]) -> String {
    let mut out = String::from("t,a,re_c,im_c,r\n");
    for (t, s) in points {
        let row = [*t, s.a, s.c.re, s.c.im, bloch_radius(s)];
        let fields: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn constant(big_gamma: f64, gamma_tilde: f64) -> RateProfile {
        RateProfile::from_channels(30.0, 3000, |_| (big_gamma, gamma_tilde)).unwrap()
    }

    #[test]
    fn state_validation() {
        assert!(QubitState::new(0.5, Complex64::new(0.5, 0.0)).is_ok());
        assert!(QubitState::new(1.2, Complex64::new(0.0, 0.0)).is_err());
        assert!(QubitState::new(0.5, Complex64::new(0.6, 0.0)).is_err());
        assert!(!QubitState::unchecked(-3.0, Complex64::new(0.0, 0.0)).is_physical(1e-9));
    }

    #[test]
    fn bloch_radius_examples() {
        assert_eq!(bloch_radius(&QubitState::maximally_mixed()), 0.0);
        assert_eq!(bloch_radius(&QubitState::ground()), 1.0);
        assert_abs_diff_eq!(bloch_radius(&QubitState::plus()), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_identity_and_precession() {
        let p = constant(0.0, 0.0);
        let s = QubitState::new(0.3, Complex64::new(0.1, -0.2)).unwrap();
        assert_eq!(propagate_closed_form(&s, 1.0, 4.0, 4.0, &p).unwrap(), s);
        let e = propagate_closed_form(&s, 1.0, 1.0, 3.5, &p).unwrap();
        assert_abs_diff_eq!(e.a, 0.3, epsilon = 1e-15);
        let expect = s.c * Complex64::from_polar(1.0, -2.5);
        assert_abs_diff_eq!((e.c - expect).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn closed_form_constant_rates() {
        // λ = 0.2, Γ = 0.1
        let p = constant(0.1, 0.1);
        let e = propagate_closed_form(&QubitState::plus(), 1.0, 0.0, 5.0, &p).unwrap();
        assert_abs_diff_eq!(e.a, 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(e.c.norm(), 0.5 * (-0.5f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn closed_form_range_error() {
        let p = constant(0.1, 0.1);
        assert!(matches!(
            propagate_closed_form(&QubitState::plus(), 1.0, 0.0, 31.0, &p),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn ode_relaxation_matches_exponential() {
        let p = constant(0.0, 0.3);
        let r = propagate_ode(&QubitState::ground(), &Hamiltonian::default(), 0.0, 10.0, &p, &OdeOptions::default()).unwrap();
        assert_abs_diff_eq!(r.state.a, (-3.0f64).exp(), epsilon = 1e-12);
        assert!(r.first_violation.is_none());
    }

    #[test]
    fn ode_unitary_conserves_purity() {
        let p = constant(0.0, 0.0);
        let h = Hamiltonian::new(1.0, 0.7);
        let s = QubitState::new(0.8, Complex64::new(0.2, 0.3)).unwrap();
        let r = propagate_ode(&s, &h, 0.0, 30.0, &p, &OdeOptions::default()).unwrap();
        assert_abs_diff_eq!(r.state.purity(), s.purity(), epsilon = 1e-8);
    }

    #[test]
    fn ode_matches_closed_form_for_varying_rates() {
        let p = RateProfile::from_channels(30.0, 3000, |t| (0.2 * (0.7 * t).sin() + 0.05, 0.1 + 0.05 * t.cos())).unwrap();
        let s = QubitState::plus();
        let h = Hamiltonian::default();
        let mut run = Vec::new();
        integrate(&s.to_operator(), &h, 0.0, 30.0, &p, &OdeOptions::default(), |t, x| run.push((t, *x))).unwrap();
        for (t, x) in run.iter().step_by(997) {
            let cf = propagate_closed_form(&s, 1.0, 0.0, *t, &p).unwrap();
            assert!((cf.a - x.x00.re).abs() + (cf.c - x.x01).norm() < 1e-9);
        }
    }

    #[test]
    fn strict_mode_reports_first_violation() {
        // γ̃ < 0 pumps population above one
        let p = constant(0.0, -0.5);
        let h = Hamiltonian::new(1.0, 0.1);
        let err = propagate_ode(&QubitState::ground(), &h, 0.0, 5.0, &p, &OdeOptions::default()).unwrap_err();
        let Error::Positivity { t, .. } = err else { panic!("expected positivity error") };
        assert!(t > 0.0 && t < 0.1);
        let ok = propagate_ode(&QubitState::ground(), &h, 0.0, 5.0, &p, &OdeOptions::permissive(1e-3)).unwrap();
        assert_eq!(ok.first_violation, Some(t));
    }

    #[test]
    fn operator_maps_agree() {
        let p = RateProfile::from_channels(10.0, 1000, |t| (0.3 * t.sin(), 0.2)).unwrap();
        let op = Operator2 {
            x00: Complex64::new(0.3, 0.2),
            x01: Complex64::new(-0.1, 0.4),
            x10: Complex64::new(0.25, 0.0),
            trace: Complex64::new(0.5, -0.5),
        };
        let a = propagate_operator_closed_form(&op, 1.0, 2.0, 9.0, &p).unwrap();
        let b = propagate_operator_ode(&op, &Hamiltonian::default(), 2.0, 9.0, &p, &OdeOptions::default()).unwrap();
        assert!((a.x00 - b.x00).norm() + (a.x01 - b.x01).norm() + (a.x10 - b.x10).norm() < 1e-10);
        assert_eq!(a.trace, op.trace);
    }

    #[test]
    fn trajectory_csv_layout() {
        let p = constant(0.1, 0.1);
        let pr = Propagator::new(&p, Hamiltonian::new(1.0, 0.5), OdeOptions { step: 0.5, ..Default::default() });
        let tr = pr.trajectory(&QubitState::plus(), 0.0, 2.0).unwrap();
        assert_eq!(tr.len(), 5);
        let csv = trajectory_csv(&tr);
        assert!(csv.starts_with("t,a,re_c,im_c,r\n"));
        assert_eq!(csv.lines().count(), 6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn coherence_modulus_independent_of_frequency(w0 in 0.1f64..5.0, t in 0.0f64..30.0, a in 0.0f64..1.0) {
            let p = RateProfile::from_channels(30.0, 300, |t| (0.1 * t.cos(), 0.05)).unwrap();
            let s = QubitState::unchecked(a, Complex64::new(0.2, 0.1));
            let x = propagate_closed_form(&s, w0, 0.0, t, &p).unwrap();
            let y = propagate_closed_form(&s, 1.0, 0.0, t, &p).unwrap();
            prop_assert!((x.c.norm() - y.c.norm()).abs() < 1e-14);
            prop_assert!((x.a - y.a).abs() < 1e-14);
        }

        #[test]
        fn dissipative_markov_dynamics_stays_physical(g in 0.0f64..1.0, gt in 0.0f64..1.0, om in -1.0f64..1.0, a in 0.0f64..1.0, phi in 0.0f64..std::f64::consts::TAU) {
            let p = RateProfile::from_channels(5.0, 50, |_| (g, gt)).unwrap();
            let c = Complex64::from_polar((a * (1.0 - a)).sqrt(), phi);
            let s = QubitState::new(a, c).unwrap();
            let r = propagate_ode(&s, &Hamiltonian::new(1.0, om), 0.0, 5.0, &p, &OdeOptions { step: 1e-2, ..Default::default() }).unwrap();
            prop_assert!(r.state.is_physical(1e-8));
        }
    }
}
