//! Time-bin collision model of the chiral even mode.
//!
//! The waveguide is cut into bins of width `dt`; at step `n` the emitter
//! exchanges excitations with bin `n` only, through the exact propagator of
//! the few-state block touched by that bin. Non-guided losses enter as
//! imaginary level energies, so the surviving amplitude is the no-loss
//! branch. The output is Fourier transformed back to momentum space.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use wqed::numerics::QuadratureSpec;
use wqed::single_photon::tbar;
use wqed::three_photon::ThreePhotonEngine;
use wqed::two_photon::BoundStateKernel;
use wqed::{AtomKind, SystemParams, Wavepacket};

type C = Complex64;

#[derive(Debug, Clone, Copy)]
pub struct Lattice {
    pub params: SystemParams,
    pub sigma: f64,
    pub omega0: f64,
    pub bins: usize,
    pub dt: f64,
    /// Arrival time of the packet centre.
    pub t0: f64,
}

/// Output of one run, both sectors in momentum space on the FFT grid.
pub struct EvenModeOutput {
    pub momenta: Vec<f64>,
    /// `E1(p)`.
    pub single: Vec<C>,
    /// `E2(p1, p2)`, row-major.
    pub pair: Vec<C>,
}

fn mat_mul(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `exp(-i h dt)` by scaling and squaring of a Taylor series.
fn propagator(h: &[Vec<C>], dt: f64) -> Vec<Vec<C>> {
    let n = h.len();
    let norm: f64 = h.iter().flatten().map(|z| z.norm()).sum::<f64>() * dt;
    let squarings = (norm.max(1e-300).log2().ceil() as i32 + 4).max(0);
    let scale = dt / 2f64.powi(squarings);
    let a: Vec<Vec<C>> = h
        .iter()
        .map(|r| r.iter().map(|z| -C::i() * z * scale).collect())
        .collect();
    let mut result: Vec<Vec<C>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        C::new(1.0, 0.0)
                    } else {
                        C::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    let mut term = result.clone();
    for k in 1..30 {
        term = mat_mul(&term, &a);
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

fn apply(m: &[Vec<C>], v: &mut [C]) {
    let out: Vec<C> = m
        .iter()
        .map(|r| r.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
        .collect();
    v.copy_from_slice(&out);
}

impl Lattice {
    fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    /// Input photon profile in arrival time.
    fn profile(&self, t: f64) -> C {
        let s = self.sigma;
        let tau = t - self.t0;
        C::from_polar(
            (2.0 * s * s / PI).powf(0.25) * (-s * s * tau * tau).exp(),
            -self.omega0 * tau,
        )
    }

    fn blocks(&self) -> (Vec<Vec<C>>, Vec<Vec<C>>) {
        let p = &self.params;
        let g = (p.gamma_wg / self.dt).sqrt();
        let z = C::new(0.0, 0.0);
        let e2 = C::new(p.eps2, -0.5 * p.gamma2);
        let e3 = C::new(p.eps3, -0.5 * p.gamma3);
        let e4 = C::new(p.eps4, -0.5 * p.gamma4);
        let w = C::new(0.5 * p.omega_rabi, 0.0);
        let gc = C::new(g, 0.0);
        // photon in the active bin, atom in |2>, atom in |3>
        let single = vec![vec![z, gc, z], vec![gc, e2, w], vec![z, w, e3]];
        // both photons in the active bin, |2> + photon, |3> + photon, |4>
        let g4 = if p.kind == AtomKind::N4LS { gc } else { z };
        let s2 = C::new(2f64.sqrt() * g, 0.0);
        let pair = vec![
            vec![z, s2, z, z],
            vec![s2, e2, w, z],
            vec![z, w, e3, g4],
            vec![z, z, g4, if p.kind == AtomKind::N4LS { e4 } else { z }],
        ];
        (propagator(&single, self.dt), propagator(&pair, self.dt))
    }

    fn single_sector(&self, ma: &[Vec<C>]) -> Vec<C> {
        let n = self.bins;
        let mut field: Vec<C> = (0..n)
            .map(|i| self.profile(self.time(i)) * self.dt.sqrt())
            .collect();
        let mut atom = [C::new(0.0, 0.0); 2];
        for i in 0..n {
            let mut v = [field[i], atom[0], atom[1]];
            apply(ma, &mut v);
            field[i] = v[0];
            atom = [v[1], v[2]];
        }
        field.iter().map(|c| c / self.dt.sqrt()).collect()
    }

    fn pair_sector(&self, ma: &[Vec<C>], mb: &[Vec<C>]) -> Vec<C> {
        let n = self.bins;
        let dt = self.dt;
        let phi: Vec<C> = (0..n).map(|i| self.profile(self.time(i))).collect();
        // lattice coefficients, symmetric; the diagonal holds |2_n>
        let mut c = vec![C::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                c[i * n + j] = if i == j {
                    phi[i] * phi[i] * dt
                } else {
                    2f64.sqrt() * phi[i] * phi[j] * dt
                };
            }
        }
        let mut a2 = vec![C::new(0.0, 0.0); n];
        let mut a3 = vec![C::new(0.0, 0.0); n];
        let mut a4 = C::new(0.0, 0.0);
        for step in 0..n {
            for s in 0..n {
                if s == step {
                    continue;
                }
                let mut v = [c[step * n + s], a2[s], a3[s]];
                apply(ma, &mut v);
                c[step * n + s] = v[0];
                c[s * n + step] = v[0];
                a2[s] = v[1];
                a3[s] = v[2];
            }
            let mut v = [c[step * n + step], a2[step], a3[step], a4];
            apply(mb, &mut v);
            c[step * n + step] = v[0];
            a2[step] = v[1];
            a3[step] = v[2];
            a4 = v[3];
        }
        for i in 0..n {
            for j in 0..n {
                c[i * n + j] /= if i == j { dt } else { 2f64.sqrt() * dt };
            }
        }
        c
    }

    fn momenta(&self) -> Vec<f64> {
        let n = self.bins as i64;
        let span = self.bins as f64 * self.dt;
        (0..n)
            .map(|m| {
                let m = if m < n / 2 { m } else { m - n };
                2.0 * PI * m as f64 / span
            })
            .collect()
    }

    pub fn run(&self) -> EvenModeOutput {
        let (ma, mb) = self.blocks();
        let n = self.bins;
        let momenta = self.momenta();
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(n);
        let phase: Vec<C> = momenta
            .iter()
            .map(|&p| C::from_polar(self.dt / (2.0 * PI).sqrt(), -p * self.t0))
            .collect();

        let mut single = self.single_sector(&ma);
        fft.process(&mut single);
        for (z, ph) in single.iter_mut().zip(&phase) {
            *z *= ph;
        }

        let mut pair = self.pair_sector(&ma, &mb);
        for row in pair.chunks_mut(n) {
            fft.process(row);
        }
        let mut col = vec![C::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = pair[i * n + j];
            }
            fft.process(&mut col);
            for i in 0..n {
                pair[i * n + j] = col[i] * phase[i] * phase[j];
            }
        }
        EvenModeOutput {
            momenta,
            single,
            pair,
        }
    }
}

/// Relative L2 errors of the single-photon, bound-state and full RR
/// amplitudes over the packet support.
pub struct Comparison {
    pub single: f64,
    pub bound: f64,
    pub rr: f64,
}

pub fn compare_with_closed_form(
    params: SystemParams,
    sigma: f64,
    omega0: f64,
    bins: usize,
    span: f64,
) -> Comparison {
    let lattice = Lattice {
        params,
        sigma,
        omega0,
        bins,
        dt: span / bins as f64,
        t0: 6.0 / sigma.min(1.0),
    };
    let out = lattice.run();
    let wp = Wavepacket::new(sigma, omega0).unwrap();
    let kernel = BoundStateKernel::new(&params, &wp, &QuadratureSpec::new(1e-11, 1e-10)).unwrap();
    let idx: Vec<usize> = (0..bins)
        .filter(|&i| (out.momenta[i] - omega0).abs() <= 4.0 * sigma)
        .collect();
    let n = bins;

    let (mut e1, mut n1) = (0.0, 0.0);
    for &i in &idx {
        let p = out.momenta[i];
        let exact = wp.amplitude(p) * tbar(&params, p);
        e1 += (out.single[i] - exact).norm_sqr();
        n1 += exact.norm_sqr();
    }

    let (mut eb, mut nb, mut er, mut nr) = (0.0, 0.0, 0.0, 0.0);
    for &i in &idx {
        for &j in &idx {
            let (p1, p2) = (out.momenta[i], out.momenta[j]);
            let (a1, a2) = (wp.amplitude(p1), wp.amplitude(p2));
            let (t1, t2) = (tbar(&params, p1), tbar(&params, p2));
            let b = kernel.b_tilde(p1, p2).unwrap();
            let lattice_bound = 0.25 * (out.pair[i * n + j] - a1 * a2 * t1 * t2);
            eb += (lattice_bound - b).norm_sqr();
            nb += b.norm_sqr();
            let lattice_rr = 0.25
                * (out.pair[i * n + j]
                    + out.single[i] * a2
                    + a1 * out.single[j]
                    + Complex64::new(a1 * a2, 0.0));
            let exact_rr = a1 * a2 * 0.25 * (t1 + 1.0) * (t2 + 1.0) + b;
            er += (lattice_rr - exact_rr).norm_sqr();
            nr += exact_rr.norm_sqr();
        }
    }
    Comparison {
        single: (e1 / n1).sqrt(),
        bound: (eb / nb).sqrt(),
        rr: (er / nr).sqrt(),
    }
}

/// Index of the sorted pair `s <= u`.
fn pair_index(s: usize, u: usize) -> usize {
    let (s, u) = if s <= u { (s, u) } else { (u, s) };
    u * (u + 1) / 2 + s
}

/// Index of the sorted triple `i <= j <= k`.
fn triple_index(a: usize, b: usize, c: usize) -> usize {
    let mut v = [a, b, c];
    v.sort_unstable();
    let [i, j, k] = v;
    k * (k + 1) * (k + 2) / 6 + j * (j + 1) / 2 + i
}

/// `sqrt(3! / prod n_i!)` for the occupations of a sorted triple.
fn fock_weight(i: usize, j: usize, k: usize) -> f64 {
    if i == j && j == k {
        1.0
    } else if i == j || j == k {
        3f64.sqrt()
    } else {
        6f64.sqrt()
    }
}

impl Lattice {
    fn triple_block(&self) -> Vec<Vec<C>> {
        let p = &self.params;
        let g = (p.gamma_wg / self.dt).sqrt();
        let z = C::new(0.0, 0.0);
        let n4 = p.kind == AtomKind::N4LS;
        let e2 = C::new(p.eps2, -0.5 * p.gamma2);
        let e3 = C::new(p.eps3, -0.5 * p.gamma3);
        let e4 = if n4 { C::new(p.eps4, -0.5 * p.gamma4) } else { z };
        let w = C::new(0.5 * p.omega_rabi, 0.0);
        let s3 = C::new(3f64.sqrt() * g, 0.0);
        let s2 = if n4 { C::new(2f64.sqrt() * g, 0.0) } else { z };
        // three photons in the active bin, |2> + two, |3> + two, |4> + one
        let h = vec![
            vec![z, s3, z, z],
            vec![s3, e2, w, z],
            vec![z, w, e3, s2],
            vec![z, z, s2, e4],
        ];
        propagator(&h, self.dt)
    }

    /// Three-photon even-mode output `E3(p)` at the requested momenta.
    pub fn triple(&self, points: &[[f64; 3]]) -> Vec<C> {
        let (ma, mb) = self.blocks();
        let mc = self.triple_block();
        let n = self.bins;
        let dt = self.dt;
        let phi: Vec<C> = (0..n).map(|i| self.profile(self.time(i))).collect();
        let scale = dt.powf(1.5);
        let mut c3 = vec![C::new(0.0, 0.0); n * (n + 1) * (n + 2) / 6];
        for k in 0..n {
            for j in 0..=k {
                for i in 0..=j {
                    c3[triple_index(i, j, k)] = fock_weight(i, j, k) * phi[i] * phi[j] * phi[k] * scale;
                }
            }
        }
        let mut a2 = vec![C::new(0.0, 0.0); n * (n + 1) / 2];
        let mut a3 = a2.clone();
        let mut a4 = vec![C::new(0.0, 0.0); n];
        for step in 0..n {
            for u in 0..n {
                if u == step {
                    continue;
                }
                for s in 0..=u {
                    if s == step {
                        continue;
                    }
                    let (ti, pi) = (triple_index(step, s, u), pair_index(s, u));
                    let mut v = [c3[ti], a2[pi], a3[pi]];
                    apply(&ma, &mut v);
                    c3[ti] = v[0];
                    a2[pi] = v[1];
                    a3[pi] = v[2];
                }
            }
            for s in 0..n {
                if s == step {
                    continue;
                }
                let (ti, pi) = (triple_index(step, step, s), pair_index(step, s));
                let mut v = [c3[ti], a2[pi], a3[pi], a4[s]];
                apply(&mb, &mut v);
                c3[ti] = v[0];
                a2[pi] = v[1];
                a3[pi] = v[2];
                a4[s] = v[3];
            }
            let (ti, pi) = (triple_index(step, step, step), pair_index(step, step));
            let mut v = [c3[ti], a2[pi], a3[pi], a4[step]];
            apply(&mc, &mut v);
            c3[ti] = v[0];
            a2[pi] = v[1];
            a3[pi] = v[2];
            a4[step] = v[3];
        }
        let pre = (dt / (2.0 * PI).sqrt()).powi(3);
        points
            .iter()
            .map(|p| {
                let waves: Vec<Vec<C>> = p
                    .iter()
                    .map(|&q| {
                        (0..n)
                            .map(|i| C::from_polar(1.0, q * (self.time(i) - self.t0)))
                            .collect()
                    })
                    .collect();
                let mut sum = C::new(0.0, 0.0);
                for k in 0..n {
                    for j in 0..=k {
                        for i in 0..=j {
                            let psi = c3[triple_index(i, j, k)] / (fock_weight(i, j, k) * scale);
                            let mut ph = C::new(0.0, 0.0);
                            let mut seen: Vec<[usize; 3]> = Vec::with_capacity(6);
                            for perm in [[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
                                if seen.contains(&perm) {
                                    continue;
                                }
                                seen.push(perm);
                                ph += waves[0][perm[0]] * waves[1][perm[1]] * waves[2][perm[2]];
                            }
                            sum += psi * ph;
                        }
                    }
                }
                sum * pre
            })
            .collect()
    }
}

/// Relative L2 error of the three-photon bound-state amplitude on a fixed set
/// of momentum triples around the packet centre.
pub fn compare_triple_with_closed_form(
    params: SystemParams,
    sigma: f64,
    omega0: f64,
    bins: usize,
    span: f64,
) -> f64 {
    let lattice = Lattice {
        params,
        sigma,
        omega0,
        bins,
        dt: span / bins as f64,
        t0: 6.0 / sigma.min(1.0),
    };
    let offsets = [
        [0.0, 0.0, 0.0],
        [0.4, -0.7, 1.0],
        [-1.1, -0.1, 0.3],
        [1.2, 0.9, -0.6],
        [-0.3, 0.5, 0.2],
        [0.8, 0.8, -1.3],
        [-0.9, 1.4, 0.1],
    ];
    let points: Vec<[f64; 3]> = offsets.iter().map(|o| o.map(|x| omega0 + sigma * x)).collect();
    let e3 = lattice.triple(&points);
    let wp = Wavepacket::new(sigma, omega0).unwrap();
    let engine = ThreePhotonEngine::new(&params, &wp, &QuadratureSpec::new(1e-11, 1e-10)).unwrap();
    let (mut err, mut norm) = (0.0, 0.0);
    for (p, e) in points.iter().zip(&e3) {
        let a = p.map(|x| wp.amplitude(x));
        let t = p.map(|x| tbar(&params, x));
        let mut known = Complex64::new(a[0] * a[1] * a[2], 0.0) * t[0] * t[1] * t[2];
        for (i, (j, k)) in [(0, (1, 2)), (1, (0, 2)), (2, (0, 1))] {
            known += 4.0 * a[i] * t[i] * engine.b_tilde(p[j], p[k]);
        }
        let exact = engine.amplitude(*p).triple_bound;
        err += ((e - known) / 8.0 - exact).norm_sqr();
        norm += exact.norm_sqr();
    }
    (err / norm).sqrt()
}
