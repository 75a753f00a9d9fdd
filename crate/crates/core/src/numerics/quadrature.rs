//! Globally adaptive Gauss-Kronrod (7/15) quadrature for real, complex and
//! small complex-vector integrands, plus a tensorized 2D variant.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Values that the adaptive rules can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    /// Norm used for error control.
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Fixed-size vector of complex values, so several integrals sharing one
/// expensive integrand can be driven by a single adaptive pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec<const N: usize>(pub [Complex64; N]);

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for CVec<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul<f64> for CVec<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl<const N: usize> QuadValue for CVec<N> {
    fn zero() -> Self {
        CVec([Complex64::new(0.0, 0.0); N])
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Tolerances and limits for the adaptive rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Half-width of Gaussian-weighted integration windows, in units of sigma.
    pub window_sigmas: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
            window_sigmas: 8.0,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(crate::Error::InvalidParameter(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if !(self.window_sigmas >= 6.0) {
            return Err(crate::Error::InvalidParameter(
                "integration window must be at least 6 sigma".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(crate::Error::InvalidParameter(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// Returned when the subdivision budget runs out before the tolerance is met.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotConverged<T> {
    pub best: Estimate<T>,
    pub requested: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod = kronrod + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    let err = (kronrod - gauss).magnitude();
    // floor at rounding level so smooth integrands can terminate
    let floor = 50.0 * f64::EPSILON * kronrod.magnitude();
    (kronrod, err.max(floor))
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate_1d<T, F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>, NotConverged<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let mut intervals: Vec<(f64, f64, T, f64)> = Vec::with_capacity(64);
    let (v, e) = gk15(&mut f, a, b);
    intervals.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let (total, err) = intervals
            .iter()
            .fold((T::zero(), 0.0), |(s, e), iv| (s + iv.2, e + iv.3));
        let requested = spec.target(total.magnitude());
        if err <= requested {
            return Ok(Estimate {
                value: total,
                error: err,
                evaluations,
            });
        }
        if intervals.len() >= spec.max_subdivisions {
            return Err(NotConverged {
                best: Estimate {
                    value: total,
                    error: err,
                    evaluations,
                },
                requested,
            });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Tensorized adaptive integral over `[ax, bx] x [ay, by]`: an adaptive outer
/// rule in `x` whose integrand is an adaptive inner rule in `y`.
///
/// The inner rule runs with a tolerance tightened by the outer interval width
/// so inner errors do not dominate the reported total. An inner failure is
/// folded into the error estimate of the outer result.
pub fn integrate_2d<T, F>(
    f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    spec: &QuadratureSpec,
) -> Result<Estimate<T>, NotConverged<T>>
where
    T: QuadValue,
    F: Fn(f64, f64) -> T,
{
    let inner_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / (bx - ax).abs().max(1.0),
        rel_tol: spec.rel_tol * 0.1,
        ..*spec
    };
    let mut inner_err = 0.0f64;
    let mut inner_evals = 0usize;
    let mut inner_failed = false;
    let outer = integrate_1d(
        |x| match integrate_1d(|y| f(x, y), ay, by, &inner_spec) {
            Ok(est) => {
                inner_err = inner_err.max(est.error);
                inner_evals += est.evaluations;
                est.value
            }
            Err(nc) => {
                inner_failed = true;
                inner_err = inner_err.max(nc.best.error);
                inner_evals += nc.best.evaluations;
                nc.best.value
            }
        },
        ax,
        bx,
        spec,
    );
    let widen = |mut est: Estimate<T>| {
        est.error += inner_err * (bx - ax).abs();
        est.evaluations = inner_evals;
        est
    };
    match outer {
        Ok(est) => {
            let est = widen(est);
            let requested = spec.target(est.value.magnitude());
            if inner_failed && est.error > requested {
                Err(NotConverged { best: est, requested })
            } else {
                Ok(est)
            }
        }
        Err(nc) => Err(NotConverged {
            best: widen(nc.best),
            requested: nc.requested,
        }),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
