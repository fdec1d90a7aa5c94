use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Adaptive 15-point Gauss-Kronrod integration with global bisection of the
/// worst subinterval. Stops once the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { abs_tol: 1e-10, rel_tol: 0.0, max_intervals: 2000 }
    }
}

/// Integrate `f` over `[lo, hi]`; `hi` may be `f64::INFINITY`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, abs_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    Quadrature { abs_tol, ..Quadrature::default() }.integrate(f, lo, hi)
}

// Kronrod abscissae (descending) and weights; the Gauss 7-point rule uses the
// odd-indexed abscissae.
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

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (v1, v2) = (f(centre - dx), f(centre + dx));
        f1[j] = v1;
        f2[j] = v2;
        res_k += WGK[j] * (v1 + v2);
        res_abs += WGK[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (v1 + v2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

impl Quadrature {
    pub fn new(abs_tol: f64) -> Self {
        Quadrature { abs_tol, ..Quadrature::default() }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn integrate<F>(&self, f: F, lo: f64, hi: f64) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> f64,
    {
        if hi == f64::INFINITY && lo.is_finite() {
            // x = lo + u / (1 - u), dx = du / (1 - u)^2
            let g = |u: f64| {
                let w = 1.0 - u;
                let v = f(lo + u / w);
                if v == 0.0 {
                    0.0
                } else {
                    v / (w * w)
                }
            };
            return self.integrate_partitioned(g, &[0.0, 1.0]);
        }
        self.integrate_partitioned(f, &[lo, hi])
    }

    /// Integrate over `[points[0], points[last]]`, starting from the given
    /// partition. Useful when the integrand's mass is concentrated in a
    /// known region of a wide interval.
    pub fn integrate_partitioned<F>(&self, f: F, points: &[f64]) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> f64,
    {
        if !(self.abs_tol > 0.0) || self.rel_tol < 0.0 {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("integration limits must be finite (upper may be +inf)"));
        }
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("integration partition must be non-decreasing"));
        }

        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            if w[1] > w[0] {
                heap.push(kronrod15(&f, w[0], w[1]));
                evaluations += 15;
            }
        }
        if heap.is_empty() {
            return Ok(QuadratureResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 1 });
        }

        loop {
            let value: f64 = heap.iter().map(|s| s.value).sum();
            let error: f64 = heap.iter().map(|s| s.error).sum();
            if !value.is_finite() {
                return Err(Error::domain("integrand produced a non-finite value"));
            }
            if error <= self.abs_tol.max(self.rel_tol * value.abs()) {
                return Ok(QuadratureResult { value, abs_error_estimate: error, evaluations });
            }
            if heap.len() >= self.max_intervals {
                return Err(Error::Convergence { what: "adaptive quadrature", iterations: heap.len() });
            }
            let worst = heap.pop().expect("non-empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                return Err(Error::Convergence { what: "adaptive quadrature", iterations: heap.len() });
            }
            heap.push(kronrod15(&f, worst.a, mid));
            heap.push(kronrod15(&f, mid, worst.b));
            evaluations += 30;
        }
    }
}
