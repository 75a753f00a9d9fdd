//! Binding constants and bound-state coefficients of the two- and
//! three-photon scattering eigenstates.
//!
//! The two-photon bound state is `sum_j C_j exp(-gamma_j |x2 - x1|)`; the
//! three-photon one carries four coefficients `D_1..D_4`. Both are closed
//! form in the single-photon quantities and the roots `lambda_{1,2}` of
//! `l^2 - (G' + i delta) l + omega^2 / 4 = 0`.
//!
//! `c gamma_j` are `i` times the complex single-excitation energies of the
//! dressed |2>,|3> manifold, so `gamma_1 = lambda_2 + gamma3/2 + i(eps2 - delta)`
//! and `gamma_2 = lambda_1 + gamma3/2 + i(eps2 - delta)`. `C_j` pairs with
//! `gamma_j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::{AtomKind, SystemParams};
use crate::single_photon::{rho, tbar};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative root separation below which the coefficient system is treated as
/// singular.
const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    pub gamma1: Complex64,
    pub gamma2_bs: Complex64,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub xi: f64,
    pub eta: f64,
    pub chi: f64,
    pub gamma_prime: f64,
}

impl SpectralConstants {
    pub fn gammas(&self) -> [Complex64; 2] {
        [self.gamma1, self.gamma2_bs]
    }

    fn lambda_gap(&self) -> Result<Complex64> {
        let gap = self.lambda1 - self.lambda2;
        let scale = self
            .lambda1
            .norm()
            .max(self.lambda2.norm())
            .max(f64::MIN_POSITIVE);
        if gap.norm() <= DEGENERACY_TOL * scale {
            return Err(Error::DegenerateRoots { gap: gap.norm() });
        }
        Ok(gap)
    }
}

pub fn spectral_constants(p: &SystemParams) -> SpectralConstants {
    let gp = 0.5 * (p.gamma_wg + p.gamma2 - p.gamma3);
    let delta = p.delta_ctrl;
    let chi = delta * delta + p.omega_rabi * p.omega_rabi - gp * gp;
    let cross = 2.0 * delta * gp;
    let root = chi.hypot(cross);
    // root -+ chi in whichever form avoids cancellation
    let (minus, plus) = if chi >= 0.0 {
        let plus = root + chi;
        (if plus > 0.0 { cross * cross / plus } else { 0.0 }, plus)
    } else {
        let minus = root - chi;
        (minus, if minus > 0.0 { cross * cross / minus } else { 0.0 })
    };
    let xi = std::f64::consts::SQRT_2 / 4.0 * minus.sqrt();
    let eta_mag = std::f64::consts::SQRT_2 / 4.0 * plus.sqrt();
    // xi * eta = delta * G' / 4 fixes the branch when delta != 0
    let eta = if cross < 0.0 { -eta_mag } else { eta_mag };

    let half_re = 0.25 * (p.gamma_wg + p.gamma2 + p.gamma3);
    let lambda_re = 0.25 * (p.gamma_wg + p.gamma2 - p.gamma3);
    SpectralConstants {
        gamma1: Complex64::new(half_re - xi, p.eps2 - 0.5 * delta - eta),
        gamma2_bs: Complex64::new(half_re + xi, p.eps2 - 0.5 * delta + eta),
        lambda1: Complex64::new(lambda_re + xi, 0.5 * delta + eta),
        lambda2: Complex64::new(lambda_re - xi, 0.5 * delta - eta),
        xi,
        eta,
        chi,
        gamma_prime: gp,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhotonCoeffs {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl TwoPhotonCoeffs {
    pub fn as_array(&self) -> [Complex64; 2] {
        [self.c1, self.c2]
    }
}

/// `alpha(k1, k2) = -(tbar1 - 1)(tbar2 - 1) / 2 pi`.
pub fn alpha_pair(tb1: Complex64, tb2: Complex64) -> Complex64 {
    -(tb1 - 1.0) * (tb2 - 1.0) / (2.0 * PI)
}

/// `nu(k1, k2)`: the level-4 factor of the N-type coefficients.
pub fn nu(p: &SystemParams, energy: f64) -> Complex64 {
    let d = p.eps4 - energy;
    Complex64::new(d, -0.5 * (p.gamma4 - p.gamma_wg)) / Complex64::new(d, -0.5 * (p.gamma4 + p.gamma_wg))
}

fn beta_pair(p: &SystemParams, k1: f64, k2: f64, tb1: Complex64, tb2: Complex64) -> Complex64 {
    let pre = p.gamma_wg * p.omega_rabi * p.omega_rabi / (16.0 * PI);
    if pre == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let shift = match p.kind {
        AtomKind::Lambda3LS => Complex64::new(1.0, 0.0),
        AtomKind::N4LS => nu(p, k1 + k2),
    };
    pre * ((tb1 - shift) / rho(p, k2) + (tb2 - shift) / rho(p, k1))
}

pub fn two_photon_coeffs(
    p: &SystemParams,
    consts: &SpectralConstants,
    k1: f64,
    k2: f64,
) -> Result<TwoPhotonCoeffs> {
    if p.gamma_wg == 0.0 {
        return Ok(TwoPhotonCoeffs {
            c1: Complex64::new(0.0, 0.0),
            c2: Complex64::new(0.0, 0.0),
        });
    }
    let gap = consts.lambda_gap()?;
    let (tb1, tb2) = (tbar(p, k1), tbar(p, k2));
    let alpha = alpha_pair(tb1, tb2);
    let beta = beta_pair(p, k1, k2, tb1, tb2);
    Ok(TwoPhotonCoeffs {
        c1: (beta - alpha * consts.lambda2) / gap,
        c2: (alpha * consts.lambda1 - beta) / gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreePhotonCoeffs {
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
    pub d4: Complex64,
}

/// The single-momentum prefactors multiplying `C_j(k2, k3)` in `D_1..D_4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingFactors {
    pub f1: Complex64,
    pub f2: Complex64,
    pub f3: Complex64,
    pub f4: Complex64,
}

/// `mu_{1,2}(k)` of the N-type three-photon coefficients.
pub fn mu(p: &SystemParams, consts: &SpectralConstants, k: f64) -> [Complex64; 2] {
    consts.gammas().map(|g| {
        let base = Complex64::new(p.eps4 - k, -0.5 * p.gamma4) + I * g;
        (base + I * 0.5 * p.gamma_wg) / (base - I * 0.5 * p.gamma_wg)
    })
}

pub fn leading_factors(p: &SystemParams, consts: &SpectralConstants, k: f64) -> Result<LeadingFactors> {
    let gap = consts.lambda_gap()?;
    let tb = tbar(p, k);
    let norm = 1.0 / (2.0 * PI).sqrt();
    let alpha13 = -2.0 * (tb - 1.0) * norm;
    let drive = if p.gamma_wg * p.omega_rabi == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        p.gamma_wg * p.omega_rabi * p.omega_rabi / (4.0 * rho(p, k))
    };
    let (s1, s2) = match p.kind {
        AtomKind::Lambda3LS => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        AtomKind::N4LS => {
            let [m1, m2] = mu(p, consts, k);
            (m1, m2)
        }
    };
    let beta13 = norm * (drive - (tb - s1) * consts.lambda1);
    let beta24 = norm * (drive - (tb - s2) * consts.lambda2);
    let alpha24 = alpha13;
    Ok(LeadingFactors {
        f1: (beta13 - alpha13 * consts.lambda2) / gap,
        f2: (alpha24 * consts.lambda1 - beta24) / gap,
        f3: (alpha13 * consts.lambda1 - beta13) / gap,
        f4: (beta24 - alpha24 * consts.lambda2) / gap,
    })
}

/// `beta_13(k) - beta_24(k)`, exposed for the structural checks.
pub fn beta13_minus_beta24(p: &SystemParams, consts: &SpectralConstants, k: f64) -> Complex64 {
    let tb = tbar(p, k);
    let (s1, s2) = match p.kind {
        AtomKind::Lambda3LS => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        AtomKind::N4LS => {
            let [m1, m2] = mu(p, consts, k);
            (m1, m2)
        }
    };
    ((tb - s2) * consts.lambda2 - (tb - s1) * consts.lambda1) / (2.0 * PI).sqrt()
}

pub fn three_photon_coeffs(
    p: &SystemParams,
    consts: &SpectralConstants,
    k1: f64,
    k2: f64,
    k3: f64,
) -> Result<ThreePhotonCoeffs> {
    let c = two_photon_coeffs(p, consts, k2, k3)?;
    if p.gamma_wg == 0.0 {
        let z = Complex64::new(0.0, 0.0);
        return Ok(ThreePhotonCoeffs {
            d1: z,
            d2: z,
            d3: z,
            d4: z,
        });
    }
    let f = leading_factors(p, consts, k1)?;
    Ok(ThreePhotonCoeffs {
        d1: f.f1 * c.c1,
        d2: f.f2 * c.c2,
        d3: f.f3 * c.c1,
        d4: f.f4 * c.c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single_photon::SinglePhotonAmplitudes;
    use proptest::prelude::*;

    fn preset(kind: AtomKind, purcell: f64, omega: f64) -> SystemParams {
        SystemParams::preset(kind, purcell, omega).unwrap()
    }

    #[test]
    fn two_level_binding_constants() {
        let p = preset(AtomKind::Lambda3LS, 9.0, 0.0);
        let c = spectral_constants(&p);
        assert!((c.gamma2_bs - Complex64::new(5.0, 0.0)).norm() < 1e-14);
        assert!(c.gamma1.norm() < 1e-14);
        assert!((c.xi - 2.5).abs() < 1e-14 && c.eta == 0.0);
        assert_eq!(c.chi, -25.0);
    }

    #[test]
    fn driven_binding_constants_are_normalizable() {
        let c = spectral_constants(&preset(AtomKind::N4LS, 9.0, 1.6));
        assert!(c.gamma1.re > 0.0 && c.gamma2_bs.re > 0.0);
    }

    #[test]
    fn gammas_are_poles_of_the_transmission() {
        // rho(k) vanishes at k = -i gamma_j
        for p in [
            preset(AtomKind::Lambda3LS, 9.0, 1.6),
            preset(AtomKind::Lambda3LS, 0.4, 2.5),
            SystemParams::new(AtomKind::N4LS, 1.0, 0.8, 0.3, 1.0, 3.0, 1.2, 0.9, 0.0).unwrap(),
            SystemParams::new(AtomKind::N4LS, 1.0, 0.8, 0.3, 1.0, 3.0, 1.2, -0.9, 0.0).unwrap(),
        ] {
            let c = spectral_constants(&p);
            for g in c.gammas() {
                let k = -I * g;
                let x = k - p.eps2;
                let r = (x + p.delta_ctrl + I * 0.5 * p.gamma3) * (x + I * 0.5 * (p.gamma2 + p.gamma_wg))
                    - 0.25 * p.omega_rabi * p.omega_rabi;
                assert!(r.norm() < 1e-12, "{p:?} {g}");
            }
        }
    }

    #[test]
    fn gamma_sum_identity() {
        let p = SystemParams::new(AtomKind::N4LS, 1.0, 1.3, 0.4, 1.0, 6.0, 2.2, 0.6, 0.0).unwrap();
        let c = spectral_constants(&p);
        let expected = Complex64::new(
            0.5 * (p.gamma_wg + p.gamma2 + p.gamma3),
            2.0 * p.eps2 - p.delta_ctrl,
        );
        assert!((c.gamma1 + c.gamma2_bs - expected).norm() < 1e-12);
    }

    #[test]
    fn tiny_detuning_is_continuous() {
        let at = |d: f64| {
            spectral_constants(
                &SystemParams::new(AtomKind::N4LS, 1.0, 1.0, 0.0, 1.0, 9.0, 1.6, d, 0.0).unwrap(),
            )
        };
        let a = at(0.0);
        let b = at(1e-20);
        assert!((a.xi - b.xi).abs() < 1e-12);
        assert!((a.eta - b.eta).abs() < 1e-12);
    }

    #[test]
    fn closure_and_reflection_identity() {
        for kind in [AtomKind::Lambda3LS, AtomKind::N4LS] {
            let p = preset(kind, 9.0, 1.6);
            let c = spectral_constants(&p);
            for (k1, k2) in [(0.0, 0.0), (0.3, -0.7), (2.0, 5.0)] {
                let cc = two_photon_coeffs(&p, &c, k1, k2).unwrap();
                let r1 = SinglePhotonAmplitudes::at(&p, k1).r;
                let r2 = SinglePhotonAmplitudes::at(&p, k2).r;
                assert!((PI * (cc.c1 + cc.c2) + 2.0 * r1 * r2).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn decoupled_coefficients_vanish() {
        let p = preset(AtomKind::N4LS, 0.0, 1.6);
        let c = spectral_constants(&p);
        let cc = two_photon_coeffs(&p, &c, 0.2, 0.1).unwrap();
        assert_eq!(cc.c1, Complex64::new(0.0, 0.0));
        assert_eq!(cc.c2, Complex64::new(0.0, 0.0));
        let d = three_photon_coeffs(&p, &c, 0.2, 0.1, -0.3).unwrap();
        assert_eq!(d.d1.norm() + d.d2.norm() + d.d3.norm() + d.d4.norm(), 0.0);
    }

    #[test]
    fn n_kind_approaches_lambda_when_level_four_is_far() {
        let lam = SystemParams::new(AtomKind::Lambda3LS, 1.0, 1.0, 0.0, 9.0, 9.0, 1.6, 0.0, 1e8).unwrap();
        let n = lam.with_kind(AtomKind::N4LS);
        let c = spectral_constants(&lam);
        for (k1, k2, k3) in [(0.0, 0.0, 0.0), (0.4, -0.2, 1.0)] {
            let a = two_photon_coeffs(&lam, &c, k1, k2).unwrap();
            let b = two_photon_coeffs(&n, &c, k1, k2).unwrap();
            assert!((a.c1 - b.c1).norm() < 1e-6 * a.c1.norm().max(0.1));
            assert!((a.c2 - b.c2).norm() < 1e-6 * a.c2.norm().max(0.1));
            let da = three_photon_coeffs(&lam, &c, k1, k2, k3).unwrap();
            let db = three_photon_coeffs(&n, &c, k1, k2, k3).unwrap();
            for (x, y) in [(da.d1, db.d1), (da.d2, db.d2), (da.d3, db.d3), (da.d4, db.d4)] {
                assert!((x - y).norm() < 1e-6 * x.norm().max(0.1), "{x} {y}");
            }
        }
    }

    #[test]
    fn lambda_beta_difference() {
        let p = preset(AtomKind::Lambda3LS, 9.0, 1.6);
        let c = spectral_constants(&p);
        for k in [-1.0, 0.0, 0.37] {
            let lhs = beta13_minus_beta24(&p, &c, k);
            let rhs = (tbar(&p, k) - 1.0) * (c.lambda2 - c.lambda1) / (2.0 * PI).sqrt();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn d_coefficients_are_proportional_to_c() {
        let p = preset(AtomKind::N4LS, 9.0, 1.6);
        let c = spectral_constants(&p);
        let d = three_photon_coeffs(&p, &c, 0.1, 0.2, 0.3).unwrap();
        let cc = two_photon_coeffs(&p, &c, 0.2, 0.3).unwrap();
        let f = leading_factors(&p, &c, 0.1).unwrap();
        assert!((d.d1 - f.f1 * cc.c1).norm() < 1e-15);
        assert!((d.d4 - f.f4 * cc.c2).norm() < 1e-15);
        // f1 + f3 = alpha13, f2 + f4 = alpha24
        let alpha13 = -2.0 * (tbar(&p, 0.1) - 1.0) / (2.0 * PI).sqrt();
        assert!((f.f1 + f.f3 - alpha13).norm() < 1e-13);
        assert!((f.f2 + f.f4 - alpha13).norm() < 1e-13);
    }

    #[test]
    fn degenerate_roots_are_reported() {
        // chi = 0 with delta = 0 merges the roots
        let p = SystemParams::new(AtomKind::Lambda3LS, 1.0, 1.0, 0.0, 1.0, 3.0, 2.0, 0.0, 0.0).unwrap();
        let c = spectral_constants(&p);
        assert!(matches!(
            two_photon_coeffs(&p, &c, 0.0, 0.0),
            Err(Error::DegenerateRoots { .. })
        ));
        let nudged = SystemParams {
            omega_rabi: 2.0 + 1e-9,
            ..p
        };
        let c = spectral_constants(&nudged);
        assert!(two_photon_coeffs(&nudged, &c, 0.0, 0.0).is_ok());
    }

    fn arb_params() -> impl Strategy<Value = SystemParams> {
        (
            prop_oneof![Just(AtomKind::Lambda3LS), Just(AtomKind::N4LS)],
            0.0..2.0f64,
            0.0..1.0f64,
            0.0..2.0f64,
            0.05..30.0f64,
            0.01..4.0f64,
            -2.0..2.0f64,
            -1.0..1.0f64,
        )
            .prop_map(|(kind, g2, g3, g4, g, om, d, d43)| {
                SystemParams::new(kind, 1.0, g2, g3, g4, g, om, d, d43).unwrap()
            })
    }

    proptest! {
        #[test]
        fn closure_holds(p in arb_params(), k1 in -10.0..10.0f64, k2 in -10.0..10.0f64) {
            let c = spectral_constants(&p);
            let cc = two_photon_coeffs(&p, &c, k1, k2).unwrap();
            let alpha = alpha_pair(tbar(&p, k1), tbar(&p, k2));
            prop_assert!((cc.c1 + cc.c2 - alpha).norm() <= 1e-12 * alpha.norm().max(1.0));
        }

        #[test]
        fn symmetric_in_momenta(p in arb_params(), k1 in -10.0..10.0f64, k2 in -10.0..10.0f64) {
            let c = spectral_constants(&p);
            let a = two_photon_coeffs(&p, &c, k1, k2).unwrap();
            let b = two_photon_coeffs(&p, &c, k2, k1).unwrap();
            prop_assert!((a.c1 - b.c1).norm() <= 1e-12 * a.c1.norm().max(1.0));
            prop_assert!((a.c2 - b.c2).norm() <= 1e-12 * a.c2.norm().max(1.0));
        }

        #[test]
        fn binding_constants_positive(p in arb_params()) {
            let c = spectral_constants(&p);
            prop_assert!(c.gamma1.re > 0.0 && c.gamma2_bs.re > 0.0);
            prop_assert!(c.xi >= 0.0);
        }
    }
}
