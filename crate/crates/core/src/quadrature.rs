//! Quadrature primitives: an adaptive Gauss–Kronrod integrator for vector-valued
//! integrands and Gauss–Legendre rules of arbitrary order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights at the odd Kronrod nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of a single 15-point panel evaluation for an `N`-component integrand.
#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

impl<const N: usize> Panel<N> {
    fn worst(&self) -> f64 {
        self.error.iter().cloned().fold(0.0, f64::max)
    }
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.worst() == other.worst()
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.worst().total_cmp(&other.worst())
    }
}

fn gk15<const N: usize, F>(f: &F, a: f64, b: f64) -> Panel<N>
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    let mut samples = [[0.0; N]; 15];
    samples[14] = fc;
    for k in 0..N {
        kronrod[k] = WGK[7] * fc[k];
        gauss[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[2 * j] = f1;
        samples[2 * j + 1] = f2;
        for k in 0..N {
            kronrod[k] += WGK[j] * (f1[k] + f2[k]);
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * (f1[k] + f2[k]);
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for k in 0..N {
        let mean = 0.5 * kronrod[k];
        let mut resasc = WGK[7] * (fc[k] - mean).abs();
        for j in 0..7 {
            resasc += WGK[j] * ((samples[2 * j][k] - mean).abs() + (samples[2 * j + 1][k] - mean).abs());
        }
        resasc *= half.abs();
        let raw = ((kronrod[k] - gauss[k]) * half).abs();
        // QUADPACK error scaling
        error[k] = if resasc != 0.0 && raw != 0.0 {
            resasc * (200.0 * raw / resasc).powf(1.5).min(1.0)
        } else {
            raw
        };
        value[k] = kronrod[k] * half;
    }
    Panel { a, b, value, error }
}

/// Adaptive global-error Gauss–Kronrod integration of a vector-valued function.
///
/// `breakpoints` must be strictly increasing and define the initial partition.
/// Panels are bisected in order of largest estimated error until the summed
/// error of every component is at most `tolerance`.
#[derive(Debug, Clone)]
pub struct AdaptiveGaussKronrod {
    pub tolerance: f64,
    pub max_panels: usize,
}

/// Integral value together with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
}

impl AdaptiveGaussKronrod {
    pub fn new(tolerance: f64) -> Self {
        Self { tolerance, max_panels: 200_000 }
    }

    pub fn integrate<const N: usize, F>(&self, f: F, breakpoints: &[f64]) -> Result<Estimate<N>>
    where
        F: Fn(f64) -> [f64; N],
    {
        let mut heap: BinaryHeap<Panel<N>> = breakpoints
            .windows(2)
            .map(|w| gk15(&f, w[0], w[1]))
            .collect();
        loop {
            let mut value = [0.0; N];
            let mut error = [0.0; N];
            for p in heap.iter() {
                for k in 0..N {
                    value[k] += p.value[k];
                    error[k] += p.error[k];
                }
            }
            let worst = error.iter().cloned().fold(0.0, f64::max);
            if worst <= self.tolerance {
                return Ok(Estimate { value, error });
            }
            if heap.len() >= self.max_panels {
                return Err(Error::Quadrature { estimate: worst, tolerance: self.tolerance });
            }
            // Refine the largest contributors in one sweep to avoid re-summing per bisection.
            let batch = (heap.len() / 8).max(1);
            for _ in 0..batch {
                let Some(p) = heap.pop() else { break };
                if p.worst() == 0.0 {
                    heap.push(p);
                    break;
                }
                let mid = 0.5 * (p.a + p.b);
                if mid <= p.a || mid >= p.b {
                    // Interval exhausted at machine precision.
                    return Err(Error::Quadrature { estimate: worst, tolerance: self.tolerance });
                }
                heap.push(gk15(&f, p.a, mid));
                heap.push(gk15(&f, mid, p.b));
            }
        }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes an `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Maps the rule onto [a, b], yielding (node, weight) pairs.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (c + h * x, h * w))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gk_integrates_polynomials_and_oscillations() {
        let q = AdaptiveGaussKronrod::new(1e-13);
        let r = q.integrate(|x| [x.powi(5), x.sin()], &[0.0, 2.0]).unwrap();
        assert_abs_diff_eq!(r.value[0], 64.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.value[1], 1.0 - 2f64.cos(), epsilon = 1e-13);
    }

    #[test]
    fn gk_handles_sqrt_endpoint() {
        let q = AdaptiveGaussKronrod::new(1e-11);
        let r = q.integrate(|x| [x.sqrt()], &[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(r.value[0], 2.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn gk_reports_failure_when_budget_exhausted() {
        let q = AdaptiveGaussKronrod { tolerance: 1e-15, max_panels: 4 };
        let err = q.integrate(|x| [(50.0 * x).sin() * x.sqrt()], &[0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in [1, 4, 7, 20] {
            let gl = GaussLegendre::new(n);
            let deg = 2 * n - 1;
            let sum: f64 = gl.on(0.0, 1.0).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert_abs_diff_eq!(sum, 1.0 / (deg as f64 + 1.0), epsilon = 1e-14);
            let wsum: f64 = gl.weights.iter().sum();
            assert_abs_diff_eq!(wsum, 2.0, epsilon = 1e-14);
        }
    }
}
