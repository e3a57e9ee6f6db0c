//! Two-time Kirkwood–Dirac quasi-distribution and Leggett–Garg correlators.

use num_complex::Complex64;

use crate::dynamics::{Propagator, QubitState};
use crate::error::{Error, Result};
use crate::kcc::{conditional_prob, kcc_violation_closed_form, single_time_prob, MeasurementBasis, Outcome};
use crate::profile::RateProfile;

/// Quasi-distribution KD(b, a) = Tr[P_b Λ_{t1→t2}(P_a ρ(t1))], indexed `[b][a]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdTable {
    pub entries: [[Complex64; 2]; 2],
    /// p_a(t1) p(b | a), indexed `[b][a]`.
    pub classical: [[f64; 2]; 2],
    pub p_t1: [f64; 2],
    pub p_t2: [f64; 2],
}

impl KdTable {
    /// ℐ(a, b) = KD(b, a) − p_a(t1) p(b | a), indexed `[b][a]`.
    pub fn interference(&self) -> [[Complex64; 2]; 2] {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for b in 0..2 {
            for a in 0..2 {
                out[b][a] = self.entries[b][a] - self.classical[b][a];
            }
        }
        out
    }

    pub fn max_abs_interference(&self) -> f64 {
        self.interference().iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn kd_distribution(
    prop: &Propagator,
    initial: &QubitState,
    basis: &MeasurementBasis,
    t1: f64,
    t2: f64,
) -> Result<KdTable> {
    if !(0.0 <= t1 && t1 <= t2) {
        return Err(Error::Domain(format!("need 0 <= t1 <= t2, got ({t1}, {t2})")));
    }
    let rho1 = prop.state(initial, 0.0, t1)?;
    let rho2 = prop.state(&rho1, t1, t2)?;
    let rho1_op = rho1.to_operator();
    let mut table = KdTable {
        entries: [[Complex64::new(0.0, 0.0); 2]; 2],
        classical: [[0.0; 2]; 2],
        p_t1: [0.0; 2],
        p_t2: [0.0; 2],
    };
    for a in Outcome::ALL {
        let pa = basis.projector(a);
        let evolved = prop.propagate_operator(&pa.mul(&rho1_op), t1, t2)?;
        let p_a = single_time_prob(&rho1, basis, a);
        table.p_t1[a.index()] = p_a;
        for b in Outcome::ALL {
            table.entries[b.index()][a.index()] = basis.projector(b).trace_with(&evolved);
            table.classical[b.index()][a.index()] = p_a * conditional_prob(prop, basis, a, t1, t2, b)?;
        }
    }
    for b in Outcome::ALL {
        table.p_t2[b.index()] = single_time_prob(&rho2, basis, b);
    }
    Ok(table)
}

/// viol_b = |Σ_a ℐ(a, b)|.
pub fn kd_kcc_identity(table: &KdTable, outcome_b: Outcome) -> f64 {
    table.interference()[outcome_b.index()].iter().sum::<Complex64>().norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgiReport {
    pub c01: f64,
    pub c12: f64,
    pub c02: f64,
    pub k3: f64,
    /// C01 + C12 − C01·C12.
    pub f_factor: f64,
    /// C01·C12 − C02.
    pub f_product: f64,
    pub viol: f64,
    pub decomposition_residual: f64,
    /// K3 exceeds the macrorealist bound of one.
    pub violates_macrorealism: bool,
}

impl LgiReport {
    pub fn from_correlators(c01: f64, c12: f64, c02: f64, viol: f64) -> Self {
        let k3 = c01 + c12 - c02;
        let mut r = Self {
            c01,
            c12,
            c02,
            k3,
            f_factor: c01 + c12 - c01 * c12,
            f_product: c01 * c12 - c02,
            viol,
            decomposition_residual: 0.0,
            violates_macrorealism: k3 > 1.0,
        };
        r.decomposition_residual = k3_decomposition(&r);
        r
    }
}

/// Closed-form σx correlators for the |+⟩ preparation.
pub fn lgi_correlators(t1: f64, t2: f64, profile: &RateProfile, omega0: f64) -> Result<LgiReport> {
    let g1 = profile.integrals_at(t1)?.g;
    let g2 = profile.integrals_at(t2)?.g;
    let c01 = (-0.5 * g1).exp() * (omega0 * t1).cos();
    let c12 = (-0.5 * (g2 - g1)).exp() * (omega0 * (t2 - t1)).cos();
    let c02 = (-0.5 * g2).exp() * (omega0 * t2).cos();
    let viol = kcc_violation_closed_form(t1, t2, profile, omega0)?.viol;
    Ok(LgiReport::from_correlators(c01, c12, c02, viol))
}

/// C(ti, tj) = Σ q_i q_j p(q_i) p(q_j | q_i) from sequential σx measurements.
pub fn sequential_correlator(prop: &Propagator, initial: &QubitState, ti: f64, tj: f64) -> Result<f64> {
    let basis = MeasurementBasis::x_basis();
    let rho_i = prop.state(initial, 0.0, ti)?;
    let mut c = 0.0;
    for qi in Outcome::ALL {
        let p = single_time_prob(&rho_i, &basis, qi);
        for qj in Outcome::ALL {
            c += qi.sign() * qj.sign() * p * conditional_prob(prop, &basis, qi, ti, tj, qj)?;
        }
    }
    Ok(c)
}

/// (C01, C12, C02) from probability trees.
pub fn sequential_correlators(prop: &Propagator, t1: f64, t2: f64) -> Result<(f64, f64, f64)> {
    let init = QubitState::plus();
    Ok((
        sequential_correlator(prop, &init, 0.0, t1)?,
        sequential_correlator(prop, &init, t1, t2)?,
        sequential_correlator(prop, &init, 0.0, t2)?,
    ))
}

/// |K3 − 𝓕 − sgn(C01 C12 − C02) · 2 viol| with 𝓕 = C01 + C12 − C01 C12.
pub fn k3_decomposition(report: &LgiReport) -> f64 {
    let sign = if report.f_product >= 0.0 { 1.0 } else { -1.0 };
    (report.k3 - report.f_factor - sign * 2.0 * report.viol).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Hamiltonian, OdeOptions};
    use crate::kcc::kcc_violation_for;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn varying() -> RateProfile {
        RateProfile::from_channels(30.0, 3000, |t| (0.15 * (0.4 * t).cos() + 0.05, 0.08 + 0.03 * (1.3 * t).sin())).unwrap()
    }

    #[test]
    fn equal_times_give_diagonal_table() {
        let p = varying();
        let prop = Propagator::diagonal(&p);
        let b = MeasurementBasis::new(1.1, 0.4).unwrap();
        let init = QubitState::new(0.3, Complex64::new(0.2, 0.1)).unwrap();
        let t = kd_distribution(&prop, &init, &b, 6.0, 6.0).unwrap();
        assert!(t.entries[0][1].norm() < 1e-15 && t.entries[1][0].norm() < 1e-15);
        for a in 0..2 {
            assert_abs_diff_eq!(t.entries[a][a].re, t.p_t1[a], epsilon = 1e-15);
            assert!(t.entries[a][a].im.abs() < 1e-15);
        }
    }

    #[test]
    fn commuting_case_has_no_interference() {
        let p = varying();
        let prop = Propagator::diagonal(&p);
        let init = QubitState::new(0.3, Complex64::new(0.2, 0.1)).unwrap();
        let t = kd_distribution(&prop, &init, &MeasurementBasis::z_basis(), 4.0, 21.0).unwrap();
        assert!(t.max_abs_interference() < 1e-12);
    }

    #[test]
    fn interference_reproduces_violation() {
        let p = varying();
        let prop = Propagator::diagonal(&p);
        let t = kd_distribution(&prop, &QubitState::plus(), &MeasurementBasis::x_basis(), 15.0, 30.0).unwrap();
        let v = kcc_violation_closed_form(15.0, 30.0, &p, 1.0).unwrap().viol;
        assert_abs_diff_eq!(kd_kcc_identity(&t, Outcome::U1), v, epsilon = 1e-12);
        assert_abs_diff_eq!(kd_kcc_identity(&t, Outcome::U2), v, epsilon = 1e-12);
    }

    #[test]
    fn lgi_pure_precession_examples() {
        let zero = RateProfile::from_channels(10.0, 100, |_| (0.0, 0.0)).unwrap();
        let r = lgi_correlators(PI / 2.0, PI, &zero, 1.0).unwrap();
        assert!(r.c01.abs() < 1e-15 && r.c12.abs() < 1e-15);
        assert_abs_diff_eq!(r.c02, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.k3, 1.0, epsilon = 1e-15);
        let r = lgi_correlators(PI / 3.0, 2.0 * PI / 3.0, &zero, 1.0).unwrap();
        assert_abs_diff_eq!(r.k3, 1.5, epsilon = 1e-12);
        assert!(r.violates_macrorealism);
        assert!(r.decomposition_residual < 1e-12);
    }

    #[test]
    fn sequential_trees_match_closed_forms() {
        let p = varying();
        let prop = Propagator::diagonal(&p);
        let (c01, c12, c02) = sequential_correlators(&prop, 15.0, 30.0).unwrap();
        let r = lgi_correlators(15.0, 30.0, &p, 1.0).unwrap();
        assert_abs_diff_eq!(c01, r.c01, epsilon = 1e-12);
        assert_abs_diff_eq!(c12, r.c12, epsilon = 1e-12);
        assert_abs_diff_eq!(c02, r.c02, epsilon = 1e-12);
    }

    #[test]
    fn consistency_forces_factorized_k3() {
        let r = LgiReport::from_correlators(0.3, -0.4, 0.3 * -0.4, 0.0);
        assert_abs_diff_eq!(r.k3, r.f_factor, epsilon = 1e-15);
        assert!(r.k3 <= 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn kd_marginals(t1 in 0.0f64..30.0, frac in 0.0f64..1.0, theta in 0.0f64..PI, phi in 0.0f64..std::f64::consts::TAU, om in 0.0f64..0.8) {
            let p = varying();
            let prop = Propagator::new(&p, Hamiltonian::new(1.0, om), OdeOptions::permissive(1e-2));
            let t2 = t1 + frac * (30.0 - t1);
            let basis = MeasurementBasis::new(theta, phi).unwrap();
            let init = QubitState::plus();
            let t = kd_distribution(&prop, &init, &basis, t1, t2).unwrap();
            let mut total = Complex64::new(0.0, 0.0);
            for b in 0..2 {
                let row: Complex64 = t.entries[b].iter().sum();
                prop_assert!((row - t.p_t2[b]).norm() < 1e-10);
            }
            for a in 0..2 {
                let col = t.entries[0][a] + t.entries[1][a];
                prop_assert!((col - t.p_t1[a]).norm() < 1e-10);
                total += col;
            }
            prop_assert!((total - 1.0).norm() < 1e-12);
            let v = kcc_violation_for(&prop, &init, &basis, t1, t2, Outcome::U1).unwrap().viol;
            prop_assert!((kd_kcc_identity(&t, Outcome::U1) - v).abs() < 1e-10);
        }

        #[test]
        fn k3_decomposition_exact(t1 in 0.0f64..30.0, frac in 0.0f64..1.0) {
            let p = varying();
            let t2 = t1 + frac * (30.0 - t1);
            let r = lgi_correlators(t1, t2, &p, 1.0).unwrap();
            prop_assert!(r.decomposition_residual < 1e-12);
            let factorizes = (r.c02 - r.c01 * r.c12).abs() < 1e-10;
            prop_assert_eq!(factorizes, (t1.sin() * (t2 - t1).sin()).abs() < 1e-10 / (-0.5 * p.integrals_at(t2).unwrap().g).exp());
        }
    }
}
