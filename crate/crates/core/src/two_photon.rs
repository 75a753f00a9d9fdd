//! Two-photon scattering of a Gaussian wavepacket pair: directional
//! probabilities with their plane-wave/bound-state split, the blockade ratio
//! `P21`, and the joint spectra.
//!
//! Amplitudes are normalized so that a channel probability is its
//! multiplicity times `int dp1 dp2 |a(p1, p2)|^2`, with multiplicities
//! 1 (RR), 2 (RL) and 1 (LL):
//!
//! ```text
//! a_RR = a(p1) a(p2) t(p1) t(p2) + B(p1, p2)
//! a_RL = a(p1) a(p2) t(p1) r(p2) + B(p1, p2)
//! a_LL = a(p1) a(p2) r(p1) r(p2) + B(p1, p2)
//! ```
//!
//! `B` is the bound-state amplitude
//! `(i/4) sum_j [1/(p1 + i g_j) + 1/(p2 + i g_j)] I_j(p1 + p2)` with
//! `I_j(P) = int dk a(k) a(P - k) C_j(k, P - k)`. In the joint spectra the RL
//! amplitude carries the factor 2, so `P_RL = (1/2) int F_RL`.
//!
//! The outer integrals run over the total momentum `P` and the relative one
//! `q = (p1 - p2)/2`. `B` only decays like `1/q`, so its square is integrated
//! over `q` in closed form, while the interference with the Gaussian
//! plane-wave part is integrated numerically over the packet support.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{spectral_constants, two_photon_coeffs, SpectralConstants};
use crate::numerics::{integrate_1d, CVec, QuadratureSpec};
use crate::params::SystemParams;
use crate::single_photon::{transmission_reflection, SinglePhotonAmplitudes, Wavepacket};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerances of the inner `I_j` integral.
pub const INNER_ABS_TOL: f64 = 1e-9;
pub const INNER_REL_TOL: f64 = 1e-7;

/// Evaluates the bound-state amplitude `B(p1, p2)` for one system and packet.
#[derive(Debug, Clone, Copy)]
pub struct BoundStateKernel {
    pub params: SystemParams,
    pub consts: SpectralConstants,
    pub wp: Wavepacket,
    /// Binding constants with a vanishing real part only occur when their
    /// coefficient vanishes identically (decoupled level 3); such terms are
    /// dropped.
    active: [bool; 2],
    inner: QuadratureSpec,
}

impl BoundStateKernel {
    pub fn new(params: &SystemParams, wp: &Wavepacket, spec: &QuadratureSpec) -> Result<Self> {
        params.validate()?;
        spec.validate()?;
        let consts = spectral_constants(params);
        // surfaces a degenerate root pair before any integration starts
        two_photon_coeffs(params, &consts, wp.omega0, wp.omega0)?;
        let g = consts.gammas();
        let scale = g[0].norm() + g[1].norm();
        Ok(Self {
            params: *params,
            consts,
            wp: *wp,
            active: g.map(|g| g.re > 1e-12 * scale),
            inner: QuadratureSpec {
                abs_tol: INNER_ABS_TOL.max(spec.abs_tol),
                rel_tol: INNER_REL_TOL.max(spec.rel_tol),
                ..*spec
            },
        })
    }

    pub fn active_terms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..2).filter(|&j| self.active[j])
    }

    pub fn is_trivial(&self) -> bool {
        self.params.gamma_wg == 0.0
    }

    /// `I_j(P) = int dk a(k) a(P - k) C_j(k, P - k)` for `j = 1, 2`.
    pub fn pair_integrals(&self, total: f64) -> Result<[Complex64; 2]> {
        if self.is_trivial() {
            return Ok([ZERO; 2]);
        }
        let half = 0.5 * total;
        let w = self.inner.window_sigmas * self.wp.sigma;
        let est = integrate_1d(
            |k: f64| {
                let weight = self.wp.amplitude(k) * self.wp.amplitude(total - k);
                match two_photon_coeffs(&self.params, &self.consts, k, total - k) {
                    Ok(c) => CVec([0, 1].map(|j| {
                        if self.active[j] {
                            weight * c.as_array()[j]
                        } else {
                            ZERO
                        }
                    })),
                    Err(_) => CVec([Complex64::new(f64::NAN, 0.0); 2]),
                }
            },
            half - w,
            half + w,
            &self.inner,
        )
        .map_err(|nc| Error::NoConvergence {
            what: "bound-state pair integral",
            estimate: nc.best.value.0[0].norm() + nc.best.value.0[1].norm(),
            achieved: nc.best.error,
            requested: nc.requested,
        })?;
        Ok(est.value.0)
    }

    /// `B(p1, p2)` given precomputed `I_j(p1 + p2)`.
    pub fn b_tilde_from(&self, pair: &[Complex64; 2], p1: f64, p2: f64) -> Complex64 {
        let g = self.consts.gammas();
        let mut sum = ZERO;
        for j in self.active_terms() {
            sum += pair[j] * (1.0 / (p1 + I * g[j]) + 1.0 / (p2 + I * g[j]));
        }
        0.25 * I * sum
    }

    pub fn b_tilde(&self, p1: f64, p2: f64) -> Result<Complex64> {
        let pair = self.pair_integrals(p1 + p2)?;
        Ok(self.b_tilde_from(&pair, p1, p2))
    }

    /// `int dq |B(P/2 + q, P/2 - q)|^2` over the whole line.
    pub fn bound_norm_density(&self, pair: &[Complex64; 2]) -> f64 {
        let g = self.consts.gammas();
        let mut sum = ZERO;
        for j in self.active_terms() {
            for l in self.active_terms() {
                sum += pair[j] * pair[l].conj() / (g[j] + g[l].conj());
            }
        }
        0.25 * PI * sum.re
    }
}

/// Standalone `B(k1, k2)`.
pub fn b_tilde(
    params: &SystemParams,
    wp: &Wavepacket,
    k1: f64,
    k2: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    BoundStateKernel::new(params, wp, spec)?.b_tilde(k1, k2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelProbability {
    pub total: f64,
    pub plane_wave: f64,
    /// Bound-state term plus its interference with the plane-wave term.
    pub bound_state: f64,
}

impl ChannelProbability {
    fn new(plane_wave: f64, bound_state: f64) -> Self {
        Self {
            total: plane_wave + bound_state,
            plane_wave,
            bound_state,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhotonReport {
    pub rr: ChannelProbability,
    pub rl: ChannelProbability,
    pub ll: ChannelProbability,
    pub loss2: f64,
    /// `P_RR / T^2`.
    pub p21: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub quad_err: f64,
}

/// Plane-wave amplitudes of the three channels, without the packet factor.
fn plane_wave_factors(a1: SinglePhotonAmplitudes, a2: SinglePhotonAmplitudes) -> [Complex64; 3] {
    [a1.t * a2.t, a1.t * a2.r, a1.r * a2.r]
}

pub fn two_photon_probabilities(
    params: &SystemParams,
    wp: &Wavepacket,
    spec: &QuadratureSpec,
) -> Result<TwoPhotonReport> {
    let kernel = BoundStateKernel::new(params, wp, spec)?;
    let single = transmission_reflection(params, wp, spec)?;
    let (t, r) = (single.transmission, single.reflection);
    let pw = [t * t, 2.0 * t * r, r * r];
    let mut quad_err = 3.0 * single.quad_err;

    let mut bs = [0.0; 3];
    if !kernel.is_trivial() {
        let w = spec.window_sigmas * wp.sigma;
        let centre = 2.0 * wp.omega0;
        let gammas = kernel.consts.gammas();
        let inner_spec = kernel.inner;

        // returns the interference integrands of the three channels and the
        // closed-form |B|^2 density at total momentum P
        let density = |total: f64| -> Result<CVec<4>> {
            let pair = kernel.pair_integrals(total)?;
            let half = 0.5 * total;
            let inner = integrate_1d(
                |q: f64| {
                    let (p1, p2) = (half + q, half - q);
                    let env = wp.amplitude(p1) * wp.amplitude(p2);
                    let f = plane_wave_factors(
                        SinglePhotonAmplitudes::at(params, p1),
                        SinglePhotonAmplitudes::at(params, p2),
                    );
                    let mut out = [ZERO; 6];
                    for j in kernel.active_terms() {
                        let lor = 1.0 / (p1 + I * gammas[j]) + 1.0 / (p2 + I * gammas[j]);
                        for c in 0..3 {
                            out[3 * j + c] = env * f[c].conj() * lor;
                        }
                    }
                    CVec(out)
                },
                -w,
                w,
                &inner_spec,
            )
            .map_err(|nc| Error::NoConvergence {
                what: "two-photon interference integral",
                estimate: nc.best.value.0[0].norm(),
                achieved: nc.best.error,
                requested: nc.requested,
            })?;
            let v = inner.value.0;
            let cross = |c: usize| 0.25 * I * (pair[0] * v[c] + pair[1] * v[3 + c]);
            Ok(CVec([
                cross(0),
                cross(1),
                cross(2),
                Complex64::new(kernel.bound_norm_density(&pair), 0.0),
            ]))
        };

        let mut failure = None;
        let outer = integrate_1d(
            |total: f64| match density(total) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    CVec([ZERO; 4])
                }
            },
            centre - 2.0 * w,
            centre + 2.0 * w,
            spec,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let outer = outer.map_err(|nc| Error::NoConvergence {
            what: "two-photon outer integral",
            estimate: nc.best.value.0[3].re,
            achieved: nc.best.error,
            requested: nc.requested,
        })?;
        let v = outer.value.0;
        let bound = v[3].re;
        let mult = [1.0, 2.0, 1.0];
        for c in 0..3 {
            bs[c] = mult[c] * (2.0 * v[c].re + bound);
        }
        quad_err += 4.0 * outer.error;
    }

    let rr = ChannelProbability::new(pw[0], bs[0]);
    let rl = ChannelProbability::new(pw[1], bs[1]);
    let ll = ChannelProbability::new(pw[2], bs[2]);
    Ok(TwoPhotonReport {
        rr,
        rl,
        ll,
        loss2: 1.0 - rr.total - rl.total - ll.total,
        p21: if t > 0.0 { rr.total / (t * t) } else { f64::NAN },
        transmission: t,
        reflection: r,
        quad_err,
    })
}

/// Two-photon output amplitudes sampled on a square frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonOutput {
    pub omega: Vec<f64>,
    /// Row-major `[i * n + j]` for `(omega[i], omega[j])`.
    pub plane_wave_rr: Vec<Complex64>,
    pub plane_wave_rl: Vec<Complex64>,
    pub plane_wave_ll: Vec<Complex64>,
    /// `B`, shared by every channel.
    pub bound_state: Vec<Complex64>,
}

/// Joint (`f`) and uncorrelated (`g`) spectra, row-major like the output.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectra {
    pub omega: Vec<f64>,
    pub f_rr: Vec<f64>,
    pub f_rl: Vec<f64>,
    pub f_ll: Vec<f64>,
    pub g_rr: Vec<f64>,
    pub g_rl: Vec<f64>,
    pub g_ll: Vec<f64>,
}

/// `n` equally spaced frequencies over `omega0 +- half_width_sigmas * sigma`.
pub fn spectrum_grid(wp: &Wavepacket, half_width_sigmas: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = wp.window(half_width_sigmas);
    if n == 1 {
        return vec![wp.omega0];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

impl TwoPhotonOutput {
    pub fn on_grid(
        params: &SystemParams,
        wp: &Wavepacket,
        omega: &[f64],
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::InvalidParameter("frequency grid is empty".into()));
        }
        let kernel = BoundStateKernel::new(params, wp, spec)?;
        let n = omega.len();
        let amps: Vec<SinglePhotonAmplitudes> = omega
            .iter()
            .map(|&w| SinglePhotonAmplitudes::at(params, w))
            .collect();
        let env: Vec<f64> = omega.iter().map(|&w| wp.amplitude(w)).collect();

        let bound_state: Vec<Complex64> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                if j < i {
                    return Ok(ZERO);
                }
                kernel.b_tilde(omega[i], omega[j])
            })
            .collect::<Result<_>>()?;
        let mut bound_state = bound_state;
        for i in 0..n {
            for j in 0..i {
                bound_state[i * n + j] = bound_state[j * n + i];
            }
        }

        let mut out = Self {
            omega: omega.to_vec(),
            plane_wave_rr: vec![ZERO; n * n],
            plane_wave_rl: vec![ZERO; n * n],
            plane_wave_ll: vec![ZERO; n * n],
            bound_state,
        };
        for i in 0..n {
            for j in 0..n {
                let e = env[i] * env[j];
                let f = plane_wave_factors(amps[i], amps[j]);
                out.plane_wave_rr[i * n + j] = e * f[0];
                out.plane_wave_rl[i * n + j] = e * f[1];
                out.plane_wave_ll[i * n + j] = e * f[2];
            }
        }
        Ok(out)
    }

    pub fn spectra(&self) -> JointSpectra {
        let f = |pw: &[Complex64], scale: f64| -> Vec<f64> {
            pw.iter()
                .zip(&self.bound_state)
                .map(|(a, b)| scale * (a + b).norm_sqr())
                .collect()
        };
        let g =
            |pw: &[Complex64], scale: f64| -> Vec<f64> { pw.iter().map(|a| scale * a.norm_sqr()).collect() };
        JointSpectra {
            omega: self.omega.clone(),
            f_rr: f(&self.plane_wave_rr, 1.0),
            f_rl: f(&self.plane_wave_rl, 4.0),
            f_ll: f(&self.plane_wave_ll, 1.0),
            g_rr: g(&self.plane_wave_rr, 1.0),
            g_rl: g(&self.plane_wave_rl, 4.0),
            g_ll: g(&self.plane_wave_ll, 1.0),
        }
    }
}

pub fn joint_spectra(
    params: &SystemParams,
    wp: &Wavepacket,
    omega: &[f64],
    spec: &QuadratureSpec,
) -> Result<JointSpectra> {
    Ok(TwoPhotonOutput::on_grid(params, wp, omega, spec)?.spectra())
}
