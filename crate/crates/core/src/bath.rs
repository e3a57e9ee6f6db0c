//! Bosonic bath: spectral density, thermal occupation and the time-dependent
//! decay rates obtained by integrating over the bath frequencies.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::profile::RateProfile;
use crate::quadrature::{AdaptiveGaussKronrod, GaussLegendre};

/// Spectral density and temperature of the bath, in units where ω0 = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub s: f64,
    pub alpha: f64,
    pub omega_c: f64,
    pub beta: f64,
    pub epsilon: f64,
}

impl BathParams {
    pub fn new(s: f64, alpha: f64, omega_c: f64, beta: f64, epsilon: f64) -> Result<Self> {
        let p = Self { s, alpha, omega_c, beta, epsilon };
        p.validate()?;
        Ok(p)
    }

    /// Super-Ohmic bath with s = 1.5, α = 0.5, temperature 300 and a resonant qubit.
    pub fn figure_one(omega_c: f64) -> Self {
        Self { s: 1.5, alpha: 0.5, omega_c, beta: 1.0 / 300.0, epsilon: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::Domain(msg.to_string())) };
        check(self.s.is_finite() && self.s > 1.0, "spectral exponent s must exceed 1")?;
        check(self.alpha.is_finite() && self.alpha > 0.0, "coupling alpha must be positive")?;
        check(self.omega_c.is_finite() && self.omega_c > 0.0, "cutoff omega_c must be positive")?;
        check(self.beta.is_finite() && self.beta > 0.0, "inverse temperature beta must be positive")?;
        check(self.epsilon.is_finite() && self.epsilon > 0.0, "transition frequency epsilon must be positive")
    }

    /// Upper truncation of the frequency integral.
    pub fn omega_max(&self) -> f64 {
        self.epsilon + 40.0 * self.omega_c
    }

    fn density(&self, omega: f64) -> f64 {
        self.alpha * omega.powf(self.s) * (-omega / self.omega_c).exp()
    }

    // J(ω)n(ω), finite as ω → 0 because s > 1.
    fn thermal_density(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        self.alpha * omega.powf(self.s) * (-omega / self.omega_c).exp() / (self.beta * omega).exp_m1()
    }
}

/// J(ω) = α ω^s e^{−ω/ωc}.
pub fn spectral_density(omega: f64, p: &BathParams) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("spectral density needs omega >= 0, got {omega}")));
    }
    Ok(p.density(omega))
}

/// Bose–Einstein occupation 1/(e^{βω} − 1).
pub fn thermal_occupation(omega: f64, beta: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("thermal occupation needs omega > 0, got {omega}")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("thermal occupation needs beta > 0, got {beta}")));
    }
    Ok(1.0 / (beta * omega).exp_m1())
}

/// sin(x t)/x with the removable singularity filled by its Taylor series.
pub fn sinc_kernel(x: f64, t: f64) -> f64 {
    let z = x * t;
    if z.abs() < 1e-4 {
        let z2 = z * z;
        t * (1.0 - z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        z.sin() / x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub gamma: f64,
    pub gamma_tilde: f64,
    pub error_estimate: f64,
}

/// Absolute tolerance of [`decay_rates`].
pub const RATE_TOLERANCE: f64 = 1e-9;

/// γ(t) and γ̃(t) by adaptive Gauss–Kronrod integration over [0, ω_max].
pub fn decay_rates(t: f64, p: &BathParams) -> Result<DecayRates> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("decay rates need t >= 0, got {t}")));
    }
    p.validate()?;
    if t == 0.0 {
        return Ok(DecayRates { gamma: 0.0, gamma_tilde: 0.0, error_estimate: 0.0 });
    }
    let w_max = p.omega_max();
    let width = (p.omega_c / 4.0).min(PI / t);
    let mut breaks = Vec::new();
    for (lo, hi) in [(0.0, p.epsilon), (p.epsilon, w_max)] {
        let n = ((hi - lo) / width).ceil().max(1.0) as usize;
        for k in 0..n {
            breaks.push(lo + (hi - lo) * k as f64 / n as f64);
        }
    }
    breaks.push(w_max);
    let scale = 1.0 / (2.0 * PI);
    let integrand = |w: f64| {
        let k = sinc_kernel(w - p.epsilon, t) * scale;
        [p.density(w) * k, 2.0 * p.thermal_density(w) * k]
    };
    let est = AdaptiveGaussKronrod::new(RATE_TOLERANCE).integrate(integrand, &breaks)?;
    Ok(DecayRates {
        gamma: est.value[0],
        gamma_tilde: est.value[1],
        error_estimate: est.error[0].max(est.error[1]),
    })
}

/// Fixed composite Gauss–Legendre discretization of the frequency integrals.
///
/// Each node stores the weights of γ and γ̃ already divided by ω − ε so that
/// the rates at any time reduce to sums of `sin((ω_j − ε) t)`.
#[derive(Debug, Clone)]
pub struct FrequencyTable {
    pub detuning: Vec<f64>,
    pub gamma_weight: Vec<f64>,
    pub gamma_tilde_weight: Vec<f64>,
}

impl FrequencyTable {
    /// Builds the table resolving oscillations up to time `horizon`.
    pub fn new(p: &BathParams, horizon: f64) -> Result<Self> {
        p.validate()?;
        let h = (p.omega_c / 2.0).min(10.0 / horizon.max(1e-3));
        let gl = GaussLegendre::new(20);
        let mut panels = Vec::new();
        let w_max = p.omega_max();
        for (lo, hi) in [(0.0, p.epsilon), (p.epsilon, w_max)] {
            let n = ((hi - lo) / h).ceil().max(1.0) as usize;
            for k in 0..n {
                panels.push((lo + (hi - lo) * k as f64 / n as f64, lo + (hi - lo) * (k + 1) as f64 / n as f64));
            }
        }
        // Grade the first panel geometrically toward the ω^{s−1} endpoint.
        let (first_lo, first_hi) = panels.remove(0);
        let mut b = first_hi;
        let mut graded = Vec::new();
        while b > 1e-14 * first_hi.max(1.0) {
            graded.push((b / 4.0, b));
            b /= 4.0;
        }
        graded.push((first_lo, b));
        panels.extend(graded);

        let scale = 1.0 / (2.0 * PI);
        let mut table = Self { detuning: Vec::new(), gamma_weight: Vec::new(), gamma_tilde_weight: Vec::new() };
        for (lo, hi) in panels {
            for (w, wt) in gl.on(lo, hi) {
                let x = w - p.epsilon;
                table.detuning.push(x);
                table.gamma_weight.push(wt * scale * p.density(w) / x);
                table.gamma_tilde_weight.push(2.0 * wt * scale * p.thermal_density(w) / x);
            }
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.detuning.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detuning.is_empty()
    }

    /// Rates at a single time.
    pub fn rates_at(&self, t: f64) -> (f64, f64) {
        let mut g = 0.0;
        let mut gt = 0.0;
        for j in 0..self.len() {
            let s = (self.detuning[j] * t).sin();
            g += self.gamma_weight[j] * s;
            gt += self.gamma_tilde_weight[j] * s;
        }
        (g, gt)
    }

    /// Rates on the uniform grid t_k = k·dt, k = 0..=n_steps.
    pub fn rates_on_grid(&self, dt: f64, n_steps: usize) -> (Vec<f64>, Vec<f64>) {
        const RESEED: usize = 32;
        let m = self.len();
        let (step_sin, step_cos): (Vec<f64>, Vec<f64>) =
            self.detuning.iter().map(|&x| (x * dt).sin_cos()).unzip();
        let mut sin = vec![0.0; m];
        let mut cos = vec![1.0; m];
        let mut gamma = vec![0.0; n_steps + 1];
        let mut gamma_tilde = vec![0.0; n_steps + 1];
        for k in 1..=n_steps {
            if k % RESEED == 0 {
                let t = k as f64 * dt;
                for j in 0..m {
                    let (s, c) = (self.detuning[j] * t).sin_cos();
                    sin[j] = s;
                    cos[j] = c;
                }
            } else {
                for j in 0..m {
                    let s = sin[j] * step_cos[j] + cos[j] * step_sin[j];
                    let c = cos[j] * step_cos[j] - sin[j] * step_sin[j];
                    sin[j] = s;
                    cos[j] = c;
                }
            }
            let mut g = 0.0;
            let mut gt = 0.0;
            for j in 0..m {
                g += self.gamma_weight[j] * sin[j];
                gt += self.gamma_tilde_weight[j] * sin[j];
            }
            gamma[k] = g;
            gamma_tilde[k] = gt;
        }
        (gamma, gamma_tilde)
    }
}

/// Tabulates the rates on a uniform grid over [0, horizon] and integrates them.
pub fn build_rate_profile(p: &BathParams, horizon: f64, n_steps: usize) -> Result<RateProfile> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    if n_steps < 2 {
        return Err(Error::Domain(format!("need at least 2 grid steps, got {n_steps}")));
    }
    let table = FrequencyTable::new(p, horizon)?;
    let (gamma, gamma_tilde) = table.rates_on_grid(horizon / n_steps as f64, n_steps);
    RateProfile::from_samples(horizon, gamma, gamma_tilde)
}
