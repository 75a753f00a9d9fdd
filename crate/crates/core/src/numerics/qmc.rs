//! Randomly shifted rank-1 lattice (Kronecker) quasi-Monte-Carlo.
//!
//! The budget is split across independent Cranley-Patterson shifts drawn from
//! a seeded ChaCha stream; the spread of the per-shift means gives the
//! standard error. Each shift is summed in fixed-size chunks whose partial
//! sums are reduced in index order, so results depend only on
//! `(seed, budget)` and not on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sequence {
    /// Additive recurrence with generalized golden-ratio generators.
    Kronecker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmcSpec {
    pub budget: usize,
    pub seed: u64,
    pub shifts: usize,
    pub sequence: Sequence,
}

impl Default for QmcSpec {
    fn default() -> Self {
        Self {
            budget: 1_000_000,
            seed: 2012,
            shifts: 16,
            sequence: Sequence::Kronecker,
        }
    }
}

impl QmcSpec {
    pub fn with_budget(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.budget < 1000 {
            return Err(crate::Error::InvalidParameter(
                "QMC budget must be at least 1000 points".into(),
            ));
        }
        if self.shifts < 2 || self.shifts > self.budget {
            return Err(crate::Error::InvalidParameter(
                "QMC needs at least two random shifts".into(),
            ));
        }
        Ok(())
    }

    fn points_per_shift(&self) -> usize {
        (self.budget / self.shifts).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QmcEstimate {
    pub value: f64,
    pub stderr: f64,
}

/// Generators `phi_d^-(i+1)` where `phi_d` solves `x^(d+1) = x + 1`.
fn generators(dim: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    (1..=dim).map(|i| phi.powi(-(i as i32))).collect()
}

/// Integrates `f` over the unit cube of dimension `dim`, returning one
/// estimate per output component.
pub fn qmc_integrate_vec<const M: usize, F>(dim: usize, f: F, spec: &QmcSpec) -> [QmcEstimate; M]
where
    F: Fn(&[f64]) -> [f64; M] + Sync,
{
    let gens = generators(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shifts: Vec<Vec<f64>> = (0..spec.shifts)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let n = spec.points_per_shift();
    let n_chunks = n.div_ceil(CHUNK);

    let means: Vec<[f64; M]> = shifts
        .iter()
        .map(|shift| {
            let partial: Vec<[f64; M]> = (0..n_chunks)
                .into_par_iter()
                .map(|c| {
                    let mut acc = [0.0; M];
                    let mut u = vec![0.0; dim];
                    for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                        for d in 0..dim {
                            u[d] = (shift[d] + (i as f64 + 1.0) * gens[d]).fract();
                        }
                        let v = f(&u);
                        for m in 0..M {
                            acc[m] += v[m];
                        }
                    }
                    acc
                })
                .collect();
            let mut total = [0.0; M];
            for p in partial {
                for m in 0..M {
                    total[m] += p[m];
                }
            }
            total.map(|t| t / n as f64)
        })
        .collect();

    let r = means.len() as f64;
    std::array::from_fn(|m| {
        let mean = means.iter().map(|v| v[m]).sum::<f64>() / r;
        let var = means.iter().map(|v| (v[m] - mean).powi(2)).sum::<f64>() / (r - 1.0);
        QmcEstimate {
            value: mean,
            stderr: (var / r).sqrt(),
        }
    })
}

/// Scalar integral of `f` over an axis-aligned box.
pub fn qmc_integrate<F>(bounds: &[(f64, f64)], f: F, spec: &QmcSpec) -> QmcEstimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let volume: f64 = bounds.iter().map(|(a, b)| b - a).product();
    let [est] = qmc_integrate_vec(
        bounds.len(),
        |u| {
            let x: Vec<f64> = u.iter().zip(bounds).map(|(u, (a, b))| a + (b - a) * u).collect();
            [f(&x)]
        },
        spec,
    );
    QmcEstimate {
        value: est.value * volume,
        stderr: est.stderr * volume,
    }
}
