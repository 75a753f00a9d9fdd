//! Scattering of a weak coherent wavepacket: transmitted photon-number
//! statistics and the second-order correlation of the transmitted field.
//!
//! Number statistics expand the input over the Fock sectors `m = 0..3` with
//! Poisson weights and use the lossless channel probabilities of the one-,
//! two- and three-photon engines. Events in which a photon is lost, and the
//! sectors `m >= 4`, are not assigned to any count and make up `loss_mass`.
//! Because only `n <= 3` is resolved, the reference distribution is the
//! Poisson law restricted to `n <= 3` and renormalized, with its parameter
//! chosen so that its mean equals the detected mean; an uncoupled emitter
//! gives ratios of exactly one.
//!
//! `g2(tau)` keeps the one- and two-photon sectors only:
//!
//! ```text
//! g2(tau) = |2 A(0) A(tau) + pi sum_j M_j exp(-g_j tau)|^2 / |2 A(0) A(tau)|^2
//! A(tau)  = int dk a(k) t(k) exp(-i k tau)
//! M_j     = int dk1 dk2 a(k1) a(k2) C_j(k1, k2)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::{integrate_1d, sweep, CVec, QmcSpec, QuadratureSpec};
use crate::params::SystemParams;
use crate::single_photon::{transmission_reflection, transmitted_overlap, Wavepacket};
use crate::three_photon::three_photon_probabilities;
use crate::two_photon::{two_photon_probabilities, BoundStateKernel};
use crate::{Error, Result};

/// Largest resolved photon number.
pub const MAX_PHOTONS: usize = 3;

/// Poisson weight of the unresolved sectors above which results are flagged.
pub const TRUNCATION_WARNING: f64 = 0.02;

/// Denominators of `g2` below this are reported as undefined.
pub const G2_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumberStats {
    pub nbar_in: f64,
    /// Probability of detecting exactly `n` transmitted photons with none lost.
    pub p: [f64; MAX_PHOTONS + 1],
    pub loss_mass: f64,
    /// Mean of the detected distribution.
    pub nbar_out: f64,
    /// Parameter of the truncated Poisson reference with mean `nbar_out`.
    pub poisson_mean: f64,
    pub ratio: [f64; MAX_PHOTONS + 1],
    /// Input weight of the sectors `m > 3`.
    pub truncated_weight: f64,
    /// Monte-Carlo standard error of `p[3]`, the noisiest entry.
    pub mc_err: f64,
}

impl NumberStats {
    pub fn truncation_warning(&self) -> bool {
        self.truncated_weight > TRUNCATION_WARNING
    }
}

fn poisson_weights(mean: f64) -> [f64; MAX_PHOTONS + 1] {
    let mut w = [0.0; MAX_PHOTONS + 1];
    let mut term = (-mean).exp();
    for (n, slot) in w.iter_mut().enumerate() {
        if n > 0 {
            term *= mean / n as f64;
        }
        *slot = term;
    }
    w
}

fn truncated_poisson(mean: f64) -> [f64; MAX_PHOTONS + 1] {
    let w = poisson_weights(mean);
    let s: f64 = w.iter().sum();
    w.map(|x| x / s)
}

fn truncated_mean(mu: f64) -> f64 {
    truncated_poisson(mu)
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// Parameter `mu` of the truncated Poisson law with the given mean.
fn matched_poisson_parameter(mean: f64) -> f64 {
    if !(mean > 0.0) {
        return 0.0;
    }
    if mean >= MAX_PHOTONS as f64 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while truncated_mean(hi) < mean {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if truncated_mean(mid) < mean {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Combines sector probabilities `q[m][n]` (exactly `n` transmitted out of
/// `m`, nothing lost) into the detected statistics.
pub fn combine_sectors(nbar: f64, q: &[[f64; MAX_PHOTONS + 1]; MAX_PHOTONS + 1], mc_err: f64) -> NumberStats {
    let w = poisson_weights(nbar);
    let mut p = [0.0; MAX_PHOTONS + 1];
    for m in 0..=MAX_PHOTONS {
        for n in 0..=m {
            p[n] += w[m] * q[m][n];
        }
    }
    let detected: f64 = p.iter().sum();
    let nbar_out = p.iter().enumerate().map(|(n, x)| n as f64 * x).sum::<f64>() / detected;
    let mu = matched_poisson_parameter(nbar_out);
    let reference = truncated_poisson(mu);
    NumberStats {
        nbar_in: nbar,
        p,
        loss_mass: 1.0 - detected,
        nbar_out,
        poisson_mean: mu,
        ratio: std::array::from_fn(|n| p[n] / detected / reference[n]),
        truncated_weight: 1.0 - w.iter().sum::<f64>(),
        mc_err: w[3] * mc_err,
    }
}

pub fn number_statistics(
    params: &SystemParams,
    wp: &Wavepacket,
    nbar: f64,
    quad: &QuadratureSpec,
    qmc: &QmcSpec,
) -> Result<NumberStats> {
    if !(nbar > 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mean photon number must be positive, got {nbar}"
        )));
    }
    let one = transmission_reflection(params, wp, quad)?;
    let two = two_photon_probabilities(params, wp, quad)?;
    let three = three_photon_probabilities(params, wp, quad, qmc)?;
    let q = [
        [1.0, 0.0, 0.0, 0.0],
        [one.reflection, one.transmission, 0.0, 0.0],
        [two.ll.total, two.rl.total, two.rr.total, 0.0],
        [three.lll.total, three.rll.total, three.rrl.total, three.rrr.total],
    ];
    let mc = three.channels().iter().map(|c| c.stderr).fold(0.0, f64::max);
    Ok(combine_sectors(nbar, &q, mc))
}

/// Precomputed pieces of `g2(tau)` for one system and packet.
#[derive(Debug, Clone)]
pub struct G2Engine {
    params: SystemParams,
    wp: Wavepacket,
    gammas: [Complex64; 2],
    /// `M_j`, zero for inactive terms.
    moments: [Complex64; 2],
    /// `A(0)`.
    a0: Complex64,
    quad: QuadratureSpec,
}

impl G2Engine {
    pub fn new(params: &SystemParams, wp: &Wavepacket, quad: &QuadratureSpec) -> Result<Self> {
        let kernel = BoundStateKernel::new(params, wp, quad)?;
        let mut moments = [Complex64::new(0.0, 0.0); 2];
        if !kernel.is_trivial() {
            let w = quad.window_sigmas * wp.sigma;
            let centre = 2.0 * wp.omega0;
            let mut failure = None;
            let est = integrate_1d(
                |total: f64| match kernel.pair_integrals(total) {
                    Ok(v) => CVec(v),
                    Err(e) => {
                        failure.get_or_insert(e);
                        CVec([Complex64::new(0.0, 0.0); 2])
                    }
                },
                centre - 2.0 * w,
                centre + 2.0 * w,
                quad,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let est = est.map_err(|nc| Error::NoConvergence {
                what: "bound-state moments",
                estimate: nc.best.value.0[0].norm(),
                achieved: nc.best.error,
                requested: nc.requested,
            })?;
            for j in kernel.active_terms() {
                moments[j] = est.value.0[j];
            }
        }
        let (a0, _) = transmitted_overlap(params, wp, 0.0, quad)?;
        Ok(Self {
            params: *params,
            wp: *wp,
            gammas: kernel.consts.gammas(),
            moments,
            a0,
            quad: *quad,
        })
    }

    pub fn moments(&self) -> [Complex64; 2] {
        self.moments
    }

    /// Bound-state amplitude `pi sum_j M_j exp(-g_j tau)`.
    pub fn bound_amplitude(&self, tau: f64) -> Complex64 {
        (0..2)
            .filter(|&j| self.moments[j] != Complex64::new(0.0, 0.0))
            .map(|j| PI * self.moments[j] * (-self.gammas[j] * tau).exp())
            .sum()
    }

    /// Plane-wave amplitude `2 A(0) A(tau)`.
    pub fn plane_amplitude(&self, tau: f64) -> Result<Complex64> {
        let (a, _) = transmitted_overlap(&self.params, &self.wp, tau, &self.quad)?;
        Ok(2.0 * self.a0 * a)
    }

    /// `None` where the denominator vanishes.
    pub fn g2(&self, tau: f64) -> Result<Option<f64>> {
        let plane = self.plane_amplitude(tau)?;
        let den = plane.norm_sqr();
        if den < G2_FLOOR {
            return Ok(None);
        }
        Ok(Some((plane + self.bound_amplitude(tau)).norm_sqr() / den))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2Curve {
    pub tau: Vec<f64>,
    pub g2: Vec<Option<f64>>,
}

/// `0..10` in 201 steps with log-spaced points down to `1e-3` near zero.
pub fn default_tau_grid() -> Vec<f64> {
    let mut tau: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    tau.extend((0..12).map(|i| 1e-3 * 10f64.powf(i as f64 / 8.0)));
    tau.sort_by(f64::total_cmp);
    tau.dedup();
    tau
}

pub fn g2(params: &SystemParams, wp: &Wavepacket, tau: &[f64], quad: &QuadratureSpec) -> Result<G2Curve> {
    let engine = G2Engine::new(params, wp, quad)?;
    let values = sweep(tau, |&t| engine.g2(t));
    Ok(G2Curve {
        tau: tau.to_vec(),
        g2: values.into_iter().collect::<Result<_>>()?,
    })
}

pub fn g2_zero(params: &SystemParams, wp: &Wavepacket, quad: &QuadratureSpec) -> Result<Option<f64>> {
    G2Engine::new(params, wp, quad)?.g2(0.0)
}

/// `log10 g2(0)` over a Purcell-by-Rabi grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2Map {
    pub omega: Vec<f64>,
    pub purcell: Vec<f64>,
    /// Row-major `[i * omega.len() + j]` for `(purcell[i], omega[j])`;
    /// `None` where the cell failed or `g2(0)` is undefined.
    pub log10_g2: Vec<Option<f64>>,
}

impl G2Map {
    pub fn at(&self, i_purcell: usize, j_omega: usize) -> Option<f64> {
        self.log10_g2[i_purcell * self.omega.len() + j_omega]
    }
}

pub fn g2_zero_map(
    template: &SystemParams,
    wp: &Wavepacket,
    omega: &[f64],
    purcell: &[f64],
    quad: &QuadratureSpec,
) -> G2Map {
    let cells: Vec<(f64, f64)> = purcell
        .iter()
        .flat_map(|&pf| omega.iter().map(move |&om| (pf, om)))
        .collect();
    let values = sweep(&cells, |&(pf, om)| {
        let p = template.with_coupling(pf, om)?;
        g2_zero(&p, wp, quad)
    });
    G2Map {
        omega: omega.to_vec(),
        purcell: purcell.to_vec(),
        log10_g2: values
            .into_iter()
            .map(|v| v.ok().flatten().filter(|g| *g > 0.0).map(f64::log10))
            .collect(),
    }
}
