//! Tabulated decay rates on a uniform time grid with cumulative integrals.
//!
//! Rates are treated as the piecewise-linear interpolant of the samples, and
//! every cumulative quantity is the exact integral of that interpolant. The
//! positive and negative parts of λ are split at the zero crossings of the
//! interpolant, so M − N = G holds to rounding.

use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::quadrature::GaussLegendre;

/// Instantaneous rates at a time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub gamma: f64,
    pub gamma_tilde: f64,
    pub big_gamma: f64,
    pub lambda: f64,
}

/// Cumulative integrals from 0 to a time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Integrals {
    /// ∫λ
    pub g: f64,
    /// ∫λ⁺
    pub m: f64,
    /// ∫λ⁻
    pub n: f64,
    /// ∫λ⁺ e^{−G/2}
    pub a_plus: f64,
    /// ½∫λ⁻ e^{−G/2}
    pub n1_tilde: f64,
    /// ∫λ⁻ e^{−G}
    pub n2_tilde: f64,
    /// ∫(Γ⁻ + γ̃⁻), the per-channel negative area
    pub channel_negative: f64,
}

#[derive(Debug, Clone)]
pub struct RateProfile {
    horizon: f64,
    dt: f64,
    pub t: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_tilde: Vec<f64>,
    pub big_gamma: Vec<f64>,
    pub lambda: Vec<f64>,
    cumulative: Vec<Integrals>,
}

impl RateProfile {
    /// Profile from γ and γ̃ samples on a uniform grid over [0, horizon].
    pub fn from_samples(horizon: f64, gamma: Vec<f64>, gamma_tilde: Vec<f64>) -> Result<Self> {
        if gamma.len() != gamma_tilde.len() {
            return Err(Error::InconsistentInputs(format!(
                "rate sample lengths differ ({} vs {})",
                gamma.len(),
                gamma_tilde.len()
            )));
        }
        if gamma.len() < 3 {
            return Err(Error::Domain("a rate profile needs at least 2 grid steps".into()));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        if gamma.iter().chain(&gamma_tilde).any(|v| !v.is_finite()) {
            return Err(Error::Domain("rate samples must be finite".into()));
        }
        let n_steps = gamma.len() - 1;
        let dt = horizon / n_steps as f64;
        let t = (0..=n_steps).map(|k| k as f64 * dt).collect();
        let big_gamma: Vec<f64> = gamma.iter().zip(&gamma_tilde).map(|(g, gt)| 2.0 * g - gt).collect();
        let lambda: Vec<f64> = big_gamma.iter().zip(&gamma_tilde).map(|(g, gt)| g + gt).collect();
        let mut profile = Self { horizon, dt, t, gamma, gamma_tilde, big_gamma, lambda, cumulative: Vec::new() };
        let mut acc = Integrals::default();
        profile.cumulative.push(acc);
        for k in 0..n_steps {
            acc = profile.advance(acc, k, 0.0, dt);
            profile.cumulative.push(acc);
        }
        Ok(profile)
    }

    /// Profile from channel rates `f(t) = (Γ, γ̃)` sampled on the grid, bypassing the bath.
    pub fn from_channels<F>(horizon: f64, n_steps: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64),
    {
        if n_steps < 2 {
            return Err(Error::Domain(format!("need at least 2 grid steps, got {n_steps}")));
        }
        let dt = horizon / n_steps as f64;
        let (gamma, gamma_tilde) = (0..=n_steps)
            .map(|k| {
                let (big, gt) = f(k as f64 * dt);
                (0.5 * (big + gt), gt)
            })
            .unzip();
        Self::from_samples(horizon, gamma, gamma_tilde)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.t.len() - 1
    }

    /// Cumulative integrals at each grid node.
    pub fn cumulative(&self) -> &[Integrals] {
        &self.cumulative
    }

    fn check(&self, t: f64) -> Result<()> {
        let slack = 1e-9 * self.horizon;
        if !(t >= -slack && t <= self.horizon + slack) {
            return Err(Error::Range { t, horizon: self.horizon });
        }
        Ok(())
    }

    // Cell index and offset within the cell.
    fn locate(&self, t: f64) -> (usize, f64) {
        let t = t.clamp(0.0, self.horizon);
        let k = ((t / self.dt).floor() as usize).min(self.n_steps() - 1);
        (k, (t - self.t[k]).max(0.0))
    }

    fn lerp(v: &[f64], k: usize, frac: f64) -> f64 {
        v[k] + (v[k + 1] - v[k]) * frac
    }

    /// Linearly interpolated rates.
    pub fn rates_at(&self, t: f64) -> Result<Rates> {
        self.check(t)?;
        let (k, off) = self.locate(t);
        let frac = off / self.dt;
        Ok(Rates {
            gamma: Self::lerp(&self.gamma, k, frac),
            gamma_tilde: Self::lerp(&self.gamma_tilde, k, frac),
            big_gamma: Self::lerp(&self.big_gamma, k, frac),
            lambda: Self::lerp(&self.lambda, k, frac),
        })
    }

    /// Channel rates (Γ, γ̃) without range checking; used inside integrators.
    pub(crate) fn channels_unchecked(&self, t: f64) -> (f64, f64) {
        let (k, off) = self.locate(t);
        let frac = off / self.dt;
        (Self::lerp(&self.big_gamma, k, frac), Self::lerp(&self.gamma_tilde, k, frac))
    }

    /// Exact cumulative integrals from 0 to `t`.
    pub fn integrals_at(&self, t: f64) -> Result<Integrals> {
        self.check(t)?;
        let (k, off) = self.locate(t);
        Ok(self.advance(self.cumulative[k], k, 0.0, off))
    }

    /// G(t0, t1) = ∫_{t0}^{t1} λ.
    pub fn g_between(&self, t0: f64, t1: f64) -> Result<f64> {
        Ok(self.integrals_at(t1)?.g - self.integrals_at(t0)?.g)
    }

    /// ∫_{t0}^{t1} e^{G(t0,s)} Γ(s) ds.
    pub fn pumped_integral(&self, t0: f64, t1: f64) -> Result<f64> {
        self.check(t0)?;
        self.check(t1)?;
        if t1 < t0 {
            return Err(Error::Domain(format!("need t0 <= t1, got {t0} > {t1}")));
        }
        static GL8: OnceLock<GaussLegendre> = OnceLock::new();
        let gl = GL8.get_or_init(|| GaussLegendre::new(8));
        let (mut k, mut off) = self.locate(t0);
        let (k1, off1) = self.locate(t1);
        let mut g_acc = 0.0;
        let mut total = 0.0;
        while k < k1 || (k == k1 && off < off1) {
            let end = if k < k1 { self.dt } else { off1 };
            let l0 = self.lambda[k] + (self.lambda[k + 1] - self.lambda[k]) * off / self.dt;
            let slope_l = (self.lambda[k + 1] - self.lambda[k]) / self.dt;
            let slope_b = (self.big_gamma[k + 1] - self.big_gamma[k]) / self.dt;
            let b0 = self.big_gamma[k] + slope_b * off;
            let len = end - off;
            for (u, w) in gl.on(0.0, len) {
                let g = g_acc + l0 * u + 0.5 * slope_l * u * u;
                total += w * g.exp() * (b0 + slope_b * u);
            }
            g_acc += l0 * len + 0.5 * slope_l * len * len;
            k += 1;
            off = 0.0;
            if k > k1 {
                break;
            }
        }
        Ok(total)
    }

    // Integrates cell k over the offset range [u0, u1] starting from `acc`.
    fn advance(&self, mut acc: Integrals, k: usize, u0: f64, u1: f64) -> Integrals {
        if u1 <= u0 {
            return acc;
        }
        let h = self.dt;
        let at = |v: &[f64], u: f64| v[k] + (v[k + 1] - v[k]) * u / h;
        let l0 = at(&self.lambda, u0);
        let l1 = at(&self.lambda, u1);
        for (a, b, la, lb) in split_at_zero(u0, u1, l0, l1) {
            let area = 0.5 * (la + lb) * (b - a);
            let g_start = acc.g;
            let g_end = g_start + area;
            if area > 0.0 || (area == 0.0 && la + lb >= 0.0) {
                acc.m += area;
                // ∫λ e^{−G/2} = 2(e^{−G_s/2} − e^{−G_e/2})
                acc.a_plus += -2.0 * (-0.5 * g_start).exp() * (-0.5 * area).exp_m1();
            } else {
                acc.n -= area;
                acc.n1_tilde += (-0.5 * g_start).exp() * (-0.5 * area).exp_m1();
                acc.n2_tilde += (-g_start).exp() * (-area).exp_m1();
            }
            acc.g = g_end;
        }
        for v in [&self.big_gamma, &self.gamma_tilde] {
            let (c0, c1) = (at(v, u0), at(v, u1));
            for (a, b, ca, cb) in split_at_zero(u0, u1, c0, c1) {
                let area = 0.5 * (ca + cb) * (b - a);
                if area < 0.0 {
                    acc.channel_negative -= area;
                }
            }
        }
        acc
    }

    /// CSV with one row per grid node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,gamma,gamma_tilde,Gamma,lambda,G,M,N,A_plus\n");
        for k in 0..self.t.len() {
            let c = &self.cumulative[k];
            let row = [
                self.t[k],
                self.gamma[k],
                self.gamma_tilde[k],
                self.big_gamma[k],
                self.lambda[k],
                c.g,
                c.m,
                c.n,
                c.a_plus,
            ];
            let fields: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }
}

// Splits the linear segment (a, va) → (b, vb) at its zero crossing.
fn split_at_zero(a: f64, b: f64, va: f64, vb: f64) -> Vec<(f64, f64, f64, f64)> {
    if (va > 0.0 && vb < 0.0) || (va < 0.0 && vb > 0.0) {
        let z = a + (b - a) * va / (va - vb);
        vec![(a, z, va, 0.0), (z, b, 0.0, vb)]
    } else {
        vec![(a, b, va, vb)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn lambda_profile<F: Fn(f64) -> f64>(horizon: f64, n: usize, f: F) -> RateProfile {
        RateProfile::from_channels(horizon, n, |t| (f(t), 0.0)).unwrap()
    }

    #[test]
    fn constant_positive_rate() {
        let p = lambda_profile(30.0, 300, |_| 0.3);
        let i = p.integrals_at(30.0).unwrap();
        assert_abs_diff_eq!(i.m, 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(i.g, 9.0, epsilon = 1e-12);
        assert_eq!(i.n, 0.0);
        assert_abs_diff_eq!(i.a_plus, 2.0 * (1.0 - (-4.5f64).exp()), epsilon = 1e-12);
    }

    #[test]
    fn sine_rate_has_equal_lobes() {
        let p = lambda_profile(2.0 * PI, 3000, f64::sin);
        let i = p.integrals_at(2.0 * PI).unwrap();
        assert_abs_diff_eq!(i.m, 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(i.n, 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(i.g, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(i.channel_negative, i.n, epsilon = 1e-12);
    }

    #[test]
    fn zero_at_origin_and_partial_cells() {
        let p = lambda_profile(1.0, 10, |t| 1.0 - 2.0 * t);
        let z = p.integrals_at(0.0).unwrap();
        assert_eq!(z, Integrals::default());
        // exact integral of the linear rate, crossing zero at t = 1/2 inside the grid
        let i = p.integrals_at(0.73).unwrap();
        assert_abs_diff_eq!(i.g, 0.73 - 0.73 * 0.73, epsilon = 1e-14);
        assert_abs_diff_eq!(i.m, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(i.n, 0.23 * 0.23, epsilon = 1e-14);
    }

    #[test]
    fn range_errors_beyond_horizon() {
        let p = lambda_profile(1.0, 10, |_| 1.0);
        assert!(matches!(p.integrals_at(1.5), Err(Error::Range { .. })));
        assert!(matches!(p.rates_at(-0.5), Err(Error::Range { .. })));
        assert!(p.pumped_integral(0.0, 2.0).is_err());
    }

    #[test]
    fn exponential_weighted_integrals_match_quadrature() {
        let f = |t: f64| 0.4 * (1.3 * t).cos() + 0.1;
        let p = lambda_profile(10.0, 1000, f);
        // brute force on the interpolant with a fine midpoint rule
        let n = 400_000;
        let h = 10.0 / n as f64;
        let (mut g, mut ap, mut n1, mut n2) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..n {
            let t = (k as f64 + 0.5) * h;
            let l = p.rates_at(t).unwrap().lambda;
            let gm = g + 0.5 * l * h;
            ap += l.max(0.0) * (-gm / 2.0).exp() * h;
            n1 += 0.5 * (-l).max(0.0) * (-gm / 2.0).exp() * h;
            n2 += (-l).max(0.0) * (-gm).exp() * h;
            g += l * h;
        }
        let i = p.integrals_at(10.0).unwrap();
        assert_abs_diff_eq!(i.a_plus, ap, epsilon = 1e-6);
        assert_abs_diff_eq!(i.n1_tilde, n1, epsilon = 1e-6);
        assert_abs_diff_eq!(i.n2_tilde, n2, epsilon = 1e-6);
    }

    #[test]
    fn pumped_integral_constant_rates() {
        // λ = 0.2, Γ = 0.1: ∫ e^{0.2 s} 0.1 ds = 0.5 (e^{0.2 Δ} − 1)
        let p = RateProfile::from_channels(10.0, 100, |_| (0.1, 0.1)).unwrap();
        let v = p.pumped_integral(1.234, 6.0).unwrap();
        assert_abs_diff_eq!(v, 0.5 * (0.2f64 * (6.0 - 1.234)).exp_m1(), epsilon = 1e-13);
        assert_eq!(p.pumped_integral(3.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = lambda_profile(1.0, 4, |_| 1.0);
        let csv = p.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,gamma,gamma_tilde,Gamma,lambda,G,M,N,A_plus");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[5].split(',').count(), 9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn cumulative_invariants(a in -2.0f64..2.0, b in -2.0f64..2.0, w in 0.1f64..5.0, c in -1.0f64..1.0) {
            let p = RateProfile::from_channels(5.0, 200, |t| (a * (w * t).sin() + c, b * (0.5 * t).cos())).unwrap();
            let cum = p.cumulative();
            prop_assert_eq!(cum[0], Integrals::default());
            let mut g_nonneg = true;
            for k in 1..cum.len() {
                let (x, y) = (cum[k - 1], cum[k]);
                prop_assert!((y.m - y.n - y.g).abs() < 1e-12);
                prop_assert!(y.m >= x.m && y.n >= x.n && y.a_plus >= x.a_plus);
                prop_assert!(y.n1_tilde >= x.n1_tilde && y.n2_tilde >= x.n2_tilde);
                // G is piecewise quadratic; its cell minimum sits where λ turns positive.
                let (l0, l1) = (p.lambda[k - 1], p.lambda[k]);
                let g_min = if l0 < 0.0 && l1 > 0.0 { x.g - l0 * l0 * p.dt / (2.0 * (l1 - l0)) } else { y.g.min(x.g) };
                g_nonneg &= g_min >= 0.0;
                if g_nonneg {
                    prop_assert!(y.n1_tilde >= 0.5 * y.n2_tilde - 1e-9);
                }
            }
        }
    }
}
