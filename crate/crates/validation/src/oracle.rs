//! Brute-force reference values computed without the reductions used in `kcc-core`.

use std::f64::consts::PI;

use kcc_core::bath::BathParams;
use kcc_core::quadrature::GaussLegendre;
use rayon::prelude::*;

/// Cutoffs past which the exponential tail of J is below double precision.
const TAIL_CUTOFFS: f64 = 45.0;

struct FrequencyNodes {
    detuning: Vec<f64>,
    j: Vec<f64>,
    jn: Vec<f64>,
}

fn frequency_nodes(p: &BathParams, max_lag: f64) -> FrequencyNodes {
    let rule = GaussLegendre::new(24);
    let width = (p.omega_c / 4.0).min(8.0 / max_lag.max(1e-3));
    let upper = p.epsilon + TAIL_CUTOFFS * p.omega_c;
    let j = |w: f64| p.alpha * w.powf(p.s) * (-w / p.omega_c).exp();
    let n = |w: f64| 1.0 / (p.beta * w).exp_m1();
    let mut out = FrequencyNodes { detuning: Vec::new(), j: Vec::new(), jn: Vec::new() };
    let mut push = |w: f64, weight: f64| {
        out.detuning.push(w - p.epsilon);
        out.j.push(weight * j(w));
        out.jn.push(weight * j(w) * n(w));
    };
    // ω = u² on the first panel removes the √ω behaviour of J·n at the origin.
    for (u, wu) in rule.on(0.0, width.sqrt()) {
        push(u * u, 2.0 * u * wu);
    }
    let panels = ((upper - width) / width).ceil() as usize;
    let h = (upper - width) / panels as f64;
    for k in 0..panels {
        let lo = width + k as f64 * h;
        for (w, ww) in rule.on(lo, lo + h) {
            push(w, ww);
        }
    }
    out
}

/// (γ, γ̃) from the original double integral
/// ∫₀^∞ dω/2π J(ω) ∫₀ᵗ cos[(ω − ε)(t − s)] ds, evaluated as a
/// tensor-product Gauss–Legendre sum over the lag τ = t − s and ω.
pub fn double_integral_rates(t: f64, p: &BathParams) -> (f64, f64) {
    if t == 0.0 {
        return (0.0, 0.0);
    }
    let freq = frequency_nodes(p, t);
    let rule = GaussLegendre::new(16);
    let lag_width = 0.25f64.min(0.5 / p.omega_c);
    let panels = (t / lag_width).ceil() as usize;
    let h = t / panels as f64;
    let lags: Vec<(f64, f64)> = (0..panels)
        .flat_map(|k| rule.on(k as f64 * h, (k + 1) as f64 * h).collect::<Vec<_>>())
        .collect();
    let (g, gt) = lags
        .par_iter()
        .map(|&(tau, wt)| {
            let mut c = 0.0;
            let mut ct = 0.0;
            for i in 0..freq.detuning.len() {
                let k = (freq.detuning[i] * tau).cos();
                c += freq.j[i] * k;
                ct += freq.jn[i] * k;
            }
            (wt * c, wt * ct)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    (g / (2.0 * PI), 2.0 * gt / (2.0 * PI))
}

/// Central difference of `f` at `t` with step `h`.
pub fn central_difference(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_gives_zero_rates() {
        assert_eq!(double_integral_rates(0.0, &BathParams::figure_one(1.0)), (0.0, 0.0));
    }

    #[test]
    fn short_time_rates_grow_linearly() {
        // γ(t) ≈ t ∫ J/2π for small t.
        let p = BathParams::figure_one(1.0);
        let t = 1e-4;
        let (g, _) = double_integral_rates(t, &p);
        // ∫ J = α Γ(5/2) ωc^{5/2} with Γ(5/2) = 3√π/4.
        let total = p.alpha * 0.75 * PI.sqrt() * p.omega_c.powf(2.5) / (2.0 * PI);
        assert!((g / t - total).abs() < 1e-6 * total);
    }

    #[test]
    fn central_difference_is_exact_on_quadratics() {
        let d = central_difference(|x| 3.0 * x * x + x, 2.0, 0.1);
        assert!((d - 13.0).abs() < 1e-12);
    }
}
