//! Three-photon scattering: momentum-space bound-state kernels, channel
//! amplitudes and the probabilities `P_RRR .. P_LLL`, `P31`.
//!
//! With the same reduction as for two photons, a channel whose photons leave
//! in directions `s1 s2 s3` (each `t` or `r`) has the amplitude
//!
//! ```text
//! a(p) = prod_i a(p_i) s_i(p_i)                        independent photons
//!      + sum_i a(p_i) s_i(p_i) B(p_j, p_k)              one photon + pair
//!      + A3(p)                                          three-photon bound state
//! ```
//!
//! and its probability is `m int d^3p |a|^2` with multiplicities 1, 3, 3, 1
//! for RRR, RRL, RLL, LLL (the reflected photons carry the last momenta).
//! `A3` is the transform of the ordered-exponential bound state,
//!
//! ```text
//! A3(p) = (1/8) (2 pi)^(-1/2) sum_{perm} sum_terms
//!         int dk a(k) f(k) I_j(P - k) / ((b - i p_s1) (a - i (P - k - p_s3)))
//! ```
//!
//! where each `D` term is `f(k1) C_j(k2, k3)` with binding constants
//! `(a, b)` for the outer and inner gaps, and `I_j` is the pair integral
//! shared with the two-photon amplitude.
//!
//! For the N kind the emitter can hold two excitations. If the first photon
//! leaves while all three are inside, the |4> population then decays on its
//! own, which the four `D` terms cannot represent. Its contribution is
//!
//! ```text
//! A4(p) = G / (48 (2 pi)^2) J(P) sum_{a != c} g4(P - p_a) g23(p_c)
//! ```
//!
//! with `g4(z) = 1 / (z - eps4 + i (G4 + G) / 2)`, `g23(z) = (W / 2) / rho(z)`
//! and `J(P)` the packet-weighted amplitude of that free decay (see
//! [`transient_source`]). The time-bin lattice in the integration tests
//! reproduces `A3 + A4` for both kinds.
//!
//! The plane-wave part integrates to `T^3, 3 T^2 R, 3 T R^2, R^3` exactly; the
//! remainder is integrated by quasi-Monte-Carlo with a mixture of Gaussian
//! and Cauchy proposals matched to the packet and to the Lorentzian binding
//! profiles (balance-heuristic weights).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::coeffs::{leading_factors, SpectralConstants, ThreePhotonCoeffs, TwoPhotonCoeffs};
use crate::numerics::{gauss_legendre, qmc_integrate_vec, QmcEstimate, QmcSpec, QuadratureSpec};
use crate::params::{AtomKind, SystemParams};
use crate::single_photon::{transmission_reflection, SinglePhotonAmplitudes, Wavepacket};
use crate::two_photon::BoundStateKernel;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Momentum-space two-photon bound state at total momentum `P = p1 + p2`,
/// stripped of the `delta(E - P)` factor: `i sum_j C_j [1/(p1 + i g_j) + 1/(p2 + i g_j)]`.
pub fn momentum_space_bs2(consts: &SpectralConstants, c: &TwoPhotonCoeffs, p1: f64, p2: f64) -> Complex64 {
    let g = consts.gammas();
    let c = c.as_array();
    (0..2)
        .map(|j| I * c[j] * (1.0 / (p1 + I * g[j]) + 1.0 / (p2 + I * g[j])))
        .sum()
}

/// Momentum-space three-photon bound state for incoming `k` and outgoing
/// `p` with equal totals, stripped of `(2 pi)^(-1/2) delta(E - P)`.
pub fn momentum_space_bs3(
    consts: &SpectralConstants,
    d: &ThreePhotonCoeffs,
    k: [f64; 3],
    p: [f64; 3],
) -> Complex64 {
    let [g1, g2] = consts.gammas();
    let pair = k[1] + k[2];
    // (coefficient, outer-gap constant, inner-gap constant)
    let terms = [(d.d1, g1, g1), (d.d2, g2, g2), (d.d3, g1, g2), (d.d4, g2, g1)];
    PERMUTATIONS
        .iter()
        .map(|s| {
            terms
                .iter()
                .map(|&(dc, a, b)| dc / ((b - I * p[s[0]]) * (a - I * (pair - p[s[2]]))))
                .sum::<Complex64>()
        })
        .sum()
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Complex functions of a total momentum on a uniform grid, with cubic
/// interpolation and zero outside the grid.
#[derive(Debug, Clone)]
pub struct GridTable<const N: usize> {
    lo: f64,
    step: f64,
    values: Vec<[Complex64; N]>,
}

/// `I_j(K)` for both binding constants.
pub type PairTable = GridTable<2>;

impl PairTable {
    pub fn build(kernel: &BoundStateKernel, lo: f64, hi: f64, points: usize) -> Result<Self> {
        Self::tabulate(lo, hi, points, |k| kernel.pair_integrals(k))
    }
}

impl<const N: usize> GridTable<N> {
    pub fn tabulate<F>(lo: f64, hi: f64, points: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<[Complex64; N]> + Sync,
    {
        let step = (hi - lo) / (points - 1) as f64;
        let values = (0..points)
            .into_par_iter()
            .map(|i| f(lo + step * i as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lo, step, values })
    }

    fn empty() -> Self {
        Self {
            lo: 0.0,
            step: 1.0,
            values: vec![[ZERO; N]; 4],
        }
    }

    pub fn eval(&self, total: f64) -> [Complex64; N] {
        let x = (total - self.lo) / self.step;
        let n = self.values.len();
        if !(x >= 0.0 && x <= (n - 1) as f64) {
            return [ZERO; N];
        }
        let i = (x.floor() as usize).clamp(1, n - 3);
        let t = x - i as f64;
        // four-point Lagrange weights on nodes i-1 .. i+2
        let w = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
        let mut out = [ZERO; N];
        for (m, wm) in w.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(&self.values[i - 1 + m]) {
                *o += *wm * v;
            }
        }
        out
    }
}

type Mat2 = [[Complex64; 2]; 2];

/// `(z - H1)^-1` on the singly excited block `{|2>, |3>}`.
fn single_resolvent(p: &SystemParams, z: Complex64) -> Mat2 {
    let a = z - p.eps2 + I * 0.5 * (p.gamma2 + p.gamma_wg);
    let b = z - p.eps3 + I * 0.5 * p.gamma3;
    let w = Complex64::new(0.5 * p.omega_rabi, 0.0);
    let det = a * b - w * w;
    [[b / det, w / det], [w / det, a / det]]
}

fn column2(m: &Mat2) -> [Complex64; 2] {
    [m[0][0], m[1][0]]
}

/// Level 4 can only be reached through a driven, coupled level 3.
fn has_transient(p: &SystemParams) -> bool {
    p.kind == AtomKind::N4LS && p.gamma_wg > 0.0 && p.omega_rabi > 0.0
}

/// `(z - eps4 + i (G4 + G) / 2)^-1`.
fn doubly_excited_propagator(p: &SystemParams, z: Complex64) -> Complex64 {
    1.0 / (z - p.eps4 + I * 0.5 * (p.gamma4 + p.gamma_wg))
}

/// Amplitude, per plane-wave triple `k`, of the |4> population left behind by
/// the first emission that is not carried along by the incoming photons.
/// Zero for the Lambda kind.
pub fn transient_source(p: &SystemParams, k: [f64; 3]) -> Complex64 {
    if !has_transient(p) {
        return ZERO;
    }
    let g = p.gamma_wg;
    let h4 = p.eps4 - I * 0.5 * (p.gamma4 + p.gamma_wg);
    let real = |x: f64| Complex64::new(x, 0.0);
    let mut sum = ZERO;
    for (i, j, l) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
        let gj = column2(&single_resolvent(p, real(k[j])));
        let gl = column2(&single_resolvent(p, real(k[l])));
        let tj = 1.0 - I * g * gj[0];
        let tl = 1.0 - I * g * gl[0];
        let s = [gj[0] + gl[0], gj[1] + gl[1]];
        let pair = doubly_excited_propagator(p, real(k[j] + k[l]));
        // singly excited transient after the first emission, remaining photon i
        let h = [
            s[0] - tl * gj[0] - tj * gl[0],
            s[1] - I * g * pair * s[1] - tl * gj[1] - tj * gl[1],
        ];
        // -<3|(k_i - h4 + H1)^-1 h>
        let r = single_resolvent(p, h4 - k[i]);
        let driven = r[1][0] * h[0] + r[1][1] * h[1];
        sum += pair * s[1]
            - tl * doubly_excited_propagator(p, real(k[i] + k[j])) * gj[1]
            - tj * doubly_excited_propagator(p, real(k[i] + k[l])) * gl[1]
            + driven;
    }
    g * sum
}

/// Output channels in the order RRR, RRL, RLL, LLL.
pub const CHANNELS: [&str; 4] = ["RRR", "RRL", "RLL", "LLL"];
const MULTIPLICITY: [f64; 4] = [1.0, 3.0, 3.0, 1.0];

/// Channel amplitudes at one outgoing momentum triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePhotonAmplitude {
    pub plane_wave: [Complex64; 4],
    /// One photon independent, the other two bound.
    pub pair_bound: [Complex64; 4],
    /// Three-photon bound state; identical in every channel.
    pub triple_bound: Complex64,
}

impl ThreePhotonAmplitude {
    pub fn total(&self, channel: usize) -> Complex64 {
        self.plane_wave[channel] + self.pair_bound[channel] + self.triple_bound
    }
}

/// Precomputed pieces for evaluating channel amplitudes.
#[derive(Debug, Clone)]
pub struct ThreePhotonEngine {
    pub kernel: BoundStateKernel,
    table: PairTable,
    /// `J(P)`; empty unless level 4 takes part.
    transient: Option<GridTable<1>>,
    /// Nodes for the single-photon momentum of the triple bound state, with
    /// `w a(k) f_term(k)` folded in.
    nodes: Vec<f64>,
    weighted: Vec<[Complex64; 4]>,
}

impl ThreePhotonEngine {
    pub fn new(params: &SystemParams, wp: &Wavepacket, spec: &QuadratureSpec) -> Result<Self> {
        let kernel = BoundStateKernel::new(params, wp, spec)?;
        let w = spec.window_sigmas * wp.sigma;
        let centre = 2.0 * wp.omega0;
        let table = if kernel.is_trivial() {
            PairTable::empty()
        } else {
            PairTable::build(&kernel, centre - 2.0 * w, centre + 2.0 * w, 1601)?
        };
        let transient = if has_transient(params) {
            Some(transient_table(params, wp, w)?)
        } else {
            None
        };
        let (x, wts) = gauss_legendre(96);
        let half = 8.0 * wp.sigma;
        let mut nodes = Vec::with_capacity(x.len());
        let mut weighted = Vec::with_capacity(x.len());
        for (xi, wi) in x.iter().zip(&wts) {
            let k = wp.omega0 + half * xi;
            nodes.push(k);
            if kernel.is_trivial() {
                weighted.push([ZERO; 4]);
                continue;
            }
            let f = leading_factors(params, &kernel.consts, k)?;
            let s = half * wi * wp.amplitude(k);
            weighted.push([s * f.f1, s * f.f2, s * f.f3, s * f.f4]);
        }
        Ok(Self {
            kernel,
            table,
            transient,
            nodes,
            weighted,
        })
    }

    pub fn b_tilde(&self, p1: f64, p2: f64) -> Complex64 {
        self.kernel.b_tilde_from(&self.table.eval(p1 + p2), p1, p2)
    }

    fn triple_bound(&self, p: [f64; 3]) -> Complex64 {
        if self.kernel.is_trivial() {
            return ZERO;
        }
        let [g1, g2] = self.kernel.consts.gammas();
        let total = p[0] + p[1] + p[2];
        let pair: Vec<[Complex64; 2]> = self.nodes.iter().map(|k| self.table.eval(total - k)).collect();
        // outer-gap sums for each candidate last momentum: terms 1, 3 share
        // g1 and C1, terms 2, 4 share g2 and C2
        let mut outer = [[ZERO; 4]; 3];
        for (slot, &last) in p.iter().enumerate() {
            let mut acc = [ZERO; 4];
            for ((k, wf), ij) in self.nodes.iter().zip(&self.weighted).zip(&pair) {
                let gap = total - k - last;
                let d1 = ij[0] / (g1 - I * gap);
                let d2 = ij[1] / (g2 - I * gap);
                acc[0] += wf[0] * d1;
                acc[1] += wf[1] * d2;
                acc[2] += wf[2] * d1;
                acc[3] += wf[3] * d2;
            }
            outer[slot] = acc;
        }
        let mut sum = ZERO;
        for s in PERMUTATIONS {
            let o = outer[s[2]];
            let first = p[s[0]];
            sum += (o[0] + o[3]) / (g1 - I * first) + (o[1] + o[2]) / (g2 - I * first);
        }
        sum / (8.0 * (2.0 * PI).sqrt()) + self.doubly_excited(p, total)
    }

    fn doubly_excited(&self, p: [f64; 3], total: f64) -> Complex64 {
        let Some(table) = &self.transient else {
            return ZERO;
        };
        let params = &self.kernel.params;
        let first: [Complex64; 3] =
            p.map(|x| doubly_excited_propagator(params, Complex64::new(total - x, 0.0)));
        let last: [Complex64; 3] = p.map(|x| single_resolvent(params, Complex64::new(x, 0.0))[0][1]);
        let mut s = ZERO;
        for a in 0..3 {
            for c in 0..3 {
                if a != c {
                    s += first[a] * last[c];
                }
            }
        }
        params.gamma_wg * table.eval(total)[0] * s / (48.0 * (2.0 * PI).powi(2))
    }

    pub fn amplitude(&self, p: [f64; 3]) -> ThreePhotonAmplitude {
        let wp = &self.kernel.wp;
        let env = p.map(|x| wp.amplitude(x));
        let amps = p.map(|x| SinglePhotonAmplitudes::at(&self.kernel.params, x));
        let others = [(1, 2), (0, 2), (0, 1)];
        let bound: [Complex64; 3] = std::array::from_fn(|i| {
            let (j, k) = others[i];
            self.b_tilde(p[j], p[k])
        });
        let mut plane_wave = [ZERO; 4];
        let mut pair_bound = [ZERO; 4];
        for c in 0..4 {
            // the first 3 - c photons are transmitted
            let s: [Complex64; 3] = std::array::from_fn(|i| if i < 3 - c { amps[i].t } else { amps[i].r });
            plane_wave[c] = env[0] * env[1] * env[2] * s[0] * s[1] * s[2];
            pair_bound[c] = (0..3).map(|i| env[i] * s[i] * bound[i]).sum();
        }
        ThreePhotonAmplitude {
            plane_wave,
            pair_bound,
            triple_bound: self.triple_bound(p),
        }
    }
}

/// `J(P) = int d^3k a(k1) a(k2) a(k3) delta(P - k1 - k2 - k3) transient_source(k)`
/// on a grid around `3 omega0`.
fn transient_table(params: &SystemParams, wp: &Wavepacket, window: f64) -> Result<GridTable<1>> {
    let (x, wts) = gauss_legendre(TRANSIENT_NODES);
    let half = 8.0 * wp.sigma;
    let nodes: Vec<(f64, f64)> = x
        .iter()
        .zip(&wts)
        .map(|(xi, wi)| {
            let k = wp.omega0 + half * xi;
            (k, half * wi * wp.amplitude(k))
        })
        .collect();
    let centre = 3.0 * wp.omega0;
    let reach = 3f64.sqrt() * window;
    GridTable::tabulate(centre - reach, centre + reach, 1201, |total| {
        let mut acc = ZERO;
        for &(k2, w2) in &nodes {
            for &(k3, w3) in &nodes {
                let k1 = total - k2 - k3;
                let a1 = wp.amplitude(k1);
                if a1 == 0.0 {
                    continue;
                }
                acc += w2 * w3 * a1 * transient_source(params, [k1, k2, k3]);
            }
        }
        Ok([acc])
    })
}

const TRANSIENT_NODES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeChannel {
    pub total: f64,
    pub plane_wave: f64,
    pub bound_state: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreePhotonReport {
    pub rrr: ThreeChannel,
    pub rrl: ThreeChannel,
    pub rll: ThreeChannel,
    pub lll: ThreeChannel,
    /// `P_RRR / T^3`.
    pub p31: f64,
    /// Standard error of `P_RRR`.
    pub mc_err: f64,
    pub transmission: f64,
    pub reflection: f64,
}

impl ThreePhotonReport {
    pub fn channels(&self) -> [ThreeChannel; 4] {
        [self.rrr, self.rrl, self.rll, self.lll]
    }
}

/// Proposal mixture for the bound-state remainder.
struct Proposal {
    omega0: f64,
    sigma: f64,
    /// `(centre, width)` of the Lorentzian profiles `1/(p + i g)`.
    lorentz: [(f64, f64); 2],
    normal: Normal,
}

const COMPONENTS: usize = 3;
const SHARE: [f64; COMPONENTS] = [0.25, 0.35, 0.40];

fn gauss(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
}

fn cauchy(x: f64, centre: f64, width: f64) -> f64 {
    let z = (x - centre) / width;
    1.0 / (PI * width * (1.0 + z * z))
}

fn cauchy_quantile(u: f64, centre: f64, width: f64) -> f64 {
    centre + width * (PI * (u - 0.5)).tan()
}

fn pick(u: f64, n: usize) -> usize {
    ((u * n as f64) as usize).min(n - 1)
}

impl Proposal {
    fn new(kernel: &BoundStateKernel) -> Self {
        let g = kernel.consts.gammas();
        let scale = kernel.wp.sigma.max(1e-300);
        Self {
            omega0: kernel.wp.omega0,
            sigma: kernel.wp.sigma,
            lorentz: g.map(|g| (g.im, g.re.max(scale))),
            normal: Normal::new(0.0, 1.0).expect("unit normal"),
        }
    }

    fn z(&self, u: f64) -> f64 {
        self.normal.inverse_cdf(u.clamp(1e-300, 1.0 - 1e-16))
    }

    /// Draws from component `c` using six uniforms.
    fn sample(&self, c: usize, u: &[f64]) -> [f64; 3] {
        let (w0, s) = (self.omega0, self.sigma);
        match c {
            0 => [
                w0 + s * self.z(u[0]),
                w0 + s * self.z(u[1]),
                w0 + s * self.z(u[2]),
            ],
            1 => {
                let single = pick(u[3], 3);
                let (l, sign) = (pick(u[4], 2), if u[5] < 0.5 { 1.0 } else { -1.0 });
                let (centre, width) = self.lorentz[l];
                let ps = w0 + s * self.z(u[0]);
                let total = 2.0 * w0 + std::f64::consts::SQRT_2 * s * self.z(u[1]);
                let q = cauchy_quantile(u[2], sign * (centre - w0), width);
                let mut p = [0.0; 3];
                let (j, k) = OTHERS[single];
                p[single] = ps;
                p[j] = 0.5 * total + q;
                p[k] = 0.5 * total - q;
                p
            }
            _ => {
                let order = PERMUTATIONS[pick(u[3], 6)];
                let (l, m) = (pick(u[4], 2), pick(u[5], 2));
                let total = 3.0 * w0 + 3f64.sqrt() * s * self.z(u[0]);
                let first = cauchy_quantile(u[1], self.lorentz[l].0, self.lorentz[l].1);
                let last = cauchy_quantile(u[2], 2.0 * w0 - self.lorentz[m].0, self.lorentz[m].1);
                let mut p = [0.0; 3];
                p[order[0]] = first;
                p[order[2]] = last;
                p[order[1]] = total - first - last;
                p
            }
        }
    }

    fn density(&self, p: [f64; 3]) -> f64 {
        let (w0, s) = (self.omega0, self.sigma);
        let g = [gauss(p[0], w0, s), gauss(p[1], w0, s), gauss(p[2], w0, s)];
        let product = g[0] * g[1] * g[2];

        let mut pair = 0.0;
        for single in 0..3 {
            let (j, k) = OTHERS[single];
            let total = p[j] + p[k];
            let q = 0.5 * (p[j] - p[k]);
            let mut rel = 0.0;
            for &(centre, width) in &self.lorentz {
                rel += cauchy(q, centre - w0, width) + cauchy(q, w0 - centre, width);
            }
            pair += g[single] * gauss(total, 2.0 * w0, std::f64::consts::SQRT_2 * s) * rel / 4.0;
        }
        pair /= 3.0;

        let total = p[0] + p[1] + p[2];
        let mut triple = 0.0;
        for order in PERMUTATIONS {
            let mut first = 0.0;
            let mut last = 0.0;
            for &(centre, width) in &self.lorentz {
                first += cauchy(p[order[0]], centre, width);
                last += cauchy(p[order[2]], 2.0 * w0 - centre, width);
            }
            triple += first * last / 4.0;
        }
        triple *= gauss(total, 3.0 * w0, 3f64.sqrt() * s) / 6.0;

        SHARE[0] * product + SHARE[1] * pair + SHARE[2] * triple
    }
}

const OTHERS: [(usize, usize); 3] = [(1, 2), (0, 2), (0, 1)];

/// Channel probabilities. The plane-wave part is exact; the bound-state
/// remainder is estimated by randomized quasi-Monte-Carlo.
pub fn three_photon_probabilities(
    params: &SystemParams,
    wp: &Wavepacket,
    quad: &QuadratureSpec,
    qmc: &QmcSpec,
) -> Result<ThreePhotonReport> {
    qmc.validate()?;
    let engine = ThreePhotonEngine::new(params, wp, quad)?;
    let single = transmission_reflection(params, wp, quad)?;
    let (t, r) = (single.transmission, single.reflection);
    let plane = [t.powi(3), 3.0 * t * t * r, 3.0 * t * r * r, r.powi(3)];

    let mut bound = [0.0; 4];
    let mut var = [0.0; 4];
    if !engine.kernel.is_trivial() {
        let proposal = Proposal::new(&engine.kernel);
        for c in 0..COMPONENTS {
            let spec = QmcSpec {
                budget: ((qmc.budget as f64 * SHARE[c]) as usize).max(qmc.shifts * 64),
                seed: qmc
                    .seed
                    .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(c as u64 + 1)),
                ..*qmc
            };
            let est: [QmcEstimate; 4] = qmc_integrate_vec(
                6,
                |u| {
                    let p = proposal.sample(c, u);
                    let q = proposal.density(p);
                    if !(q > 0.0) || p.iter().any(|x| !x.is_finite()) {
                        return [0.0; 4];
                    }
                    let a = engine.amplitude(p);
                    std::array::from_fn(|ch| {
                        let v = MULTIPLICITY[ch]
                            * (a.total(ch).norm_sqr() - a.plane_wave[ch].norm_sqr())
                            * SHARE[c]
                            / q;
                        if v.is_finite() {
                            v
                        } else {
                            0.0
                        }
                    })
                },
                &spec,
            );
            for ch in 0..4 {
                bound[ch] += est[ch].value;
                var[ch] += est[ch].stderr.powi(2);
            }
        }
    }
    if bound.iter().any(|b| !b.is_finite()) {
        return Err(Error::NoConvergence {
            what: "three-photon bound-state integral",
            estimate: bound[0],
            achieved: f64::INFINITY,
            requested: 0.0,
        });
    }
    let ch: [ThreeChannel; 4] = std::array::from_fn(|i| ThreeChannel {
        total: plane[i] + bound[i],
        plane_wave: plane[i],
        bound_state: bound[i],
        stderr: var[i].sqrt() + single.quad_err,
    });
    Ok(ThreePhotonReport {
        rrr: ch[0],
        rrl: ch[1],
        rll: ch[2],
        lll: ch[3],
        p31: if t > 0.0 {
            ch[0].total / t.powi(3)
        } else {
            f64::NAN
        },
        mc_err: ch[0].stderr,
        transmission: t,
        reflection: r,
    })
}
