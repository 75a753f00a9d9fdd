//! Single-photon transport: transmission coefficient of the even mode and
//! wavepacket-averaged transmission/reflection (EIT lineshapes).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::{integrate_1d, CVec, QuadratureSpec};
use crate::params::SystemParams;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gaussian spectral amplitude `(2 pi s^2)^(-1/4) exp(-(w - w0)^2 / (4 s^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavepacket {
    pub sigma: f64,
    pub omega0: f64,
}

impl Wavepacket {
    pub fn new(sigma: f64, omega0: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wavepacket width must be positive, got {sigma}"
            )));
        }
        if !omega0.is_finite() {
            return Err(Error::InvalidParameter("wavepacket centre must be finite".into()));
        }
        Ok(Self { sigma, omega0 })
    }

    pub fn amplitude(&self, omega: f64) -> f64 {
        let d = omega - self.omega0;
        (2.0 * std::f64::consts::PI * self.sigma * self.sigma).powf(-0.25)
            * (-d * d / (4.0 * self.sigma * self.sigma)).exp()
    }

    /// Integration window `omega0 +- n sigma`.
    pub fn window(&self, n_sigma: f64) -> (f64, f64) {
        (
            self.omega0 - n_sigma * self.sigma,
            self.omega0 + n_sigma * self.sigma,
        )
    }

    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            sigma: self.sigma * factor,
            omega0: self.omega0 * factor,
        }
    }
}

/// `rho_k`: the common denominator of the even-mode transmission.
pub fn rho(p: &SystemParams, k: f64) -> Complex64 {
    let x = k - p.eps2;
    let level3 = Complex64::new(x + p.delta_ctrl, 0.5 * p.gamma3);
    let level2 = Complex64::new(x, 0.5 * (p.gamma2 + p.gamma_wg));
    level3 * level2 - 0.25 * p.omega_rabi * p.omega_rabi
}

/// Even-mode transmission coefficient `tbar_k`.
pub fn tbar(p: &SystemParams, k: f64) -> Complex64 {
    if p.gamma_wg == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let x = k - p.eps2;
    let lossy = Complex64::new(x, 0.5 * (p.gamma2 - p.gamma_wg));
    let total = Complex64::new(x, 0.5 * (p.gamma2 + p.gamma_wg));
    if p.omega_rabi == 0.0 {
        // level 3 is disconnected; its factor cancels
        return lossy / total;
    }
    let level3 = Complex64::new(x + p.delta_ctrl, 0.5 * p.gamma3);
    let omega2 = 0.25 * p.omega_rabi * p.omega_rabi;
    (level3 * lossy - omega2) / (level3 * total - omega2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePhotonAmplitudes {
    pub tbar: Complex64,
    pub t: Complex64,
    pub r: Complex64,
}

impl SinglePhotonAmplitudes {
    pub fn at(p: &SystemParams, k: f64) -> Self {
        Self::from_tbar(tbar(p, k))
    }

    pub fn from_tbar(tbar: Complex64) -> Self {
        Self {
            tbar,
            t: 0.5 * (tbar + 1.0),
            r: 0.5 * (tbar - 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleTransport {
    pub transmission: f64,
    pub reflection: f64,
    pub loss: f64,
    pub quad_err: f64,
}

/// Wavepacket-averaged `T = int a^2 |t|^2` and `R = int a^2 |r|^2`.
pub fn transmission_reflection(
    p: &SystemParams,
    wp: &Wavepacket,
    spec: &QuadratureSpec,
) -> Result<SingleTransport> {
    spec.validate()?;
    let (lo, hi) = wp.window(spec.window_sigmas);
    let integrand = |k: f64| {
        let a2 = wp.amplitude(k).powi(2);
        let amp = SinglePhotonAmplitudes::at(p, k);
        CVec([
            Complex64::new(a2 * amp.t.norm_sqr(), 0.0),
            Complex64::new(a2 * amp.r.norm_sqr(), 0.0),
        ])
    };
    let est = integrate_1d(integrand, lo, hi, spec).map_err(|nc| Error::NoConvergence {
        what: "single-photon transport",
        estimate: nc.best.value.0[0].re,
        achieved: nc.best.error,
        requested: nc.requested,
    })?;
    let t = est.value.0[0].re;
    let r = est.value.0[1].re;
    Ok(SingleTransport {
        transmission: t,
        reflection: r,
        loss: 1.0 - t - r,
        quad_err: est.error,
    })
}

/// `int a(k) t_k exp(-i k tau) dk`: the transmitted one-photon amplitude at
/// delay `tau` (up to a constant phase).
pub fn transmitted_overlap(
    p: &SystemParams,
    wp: &Wavepacket,
    tau: f64,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    let (lo, hi) = wp.window(spec.window_sigmas);
    integrate_1d(
        |k: f64| wp.amplitude(k) * SinglePhotonAmplitudes::at(p, k).t * (-I * k * tau).exp(),
        lo,
        hi,
        spec,
    )
    .map(|e| (e.value, e.error))
    .map_err(|nc| Error::NoConvergence {
        what: "transmitted overlap",
        estimate: nc.best.value.norm(),
        achieved: nc.best.error,
        requested: nc.requested,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_paper_defaults, AtomKind};

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn eit_transparency_on_resonance() {
        let p = SystemParams::preset(AtomKind::Lambda3LS, 9.0, 1.6).unwrap();
        assert_eq!(tbar(&p, 0.0), Complex64::new(1.0, 0.0));
        let p = SystemParams::preset(AtomKind::Lambda3LS, 3.3, 1.6).unwrap();
        assert_eq!(tbar(&p, 0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn two_level_limit_on_resonance() {
        let p = SystemParams::preset(AtomKind::Lambda3LS, 9.0, 0.0).unwrap();
        let tb = tbar(&p, 0.0);
        assert!((tb - Complex64::new(-0.8, 0.0)).norm() < 1e-15);
        let amp = SinglePhotonAmplitudes::from_tbar(tb);
        assert_eq!(amp.t - amp.r, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn lossless_modulus_one() {
        let p = SystemParams::preset(AtomKind::N4LS, 9.0, 1.6).unwrap().lossless();
        for k in [-30.0, -2.0, -0.1, 0.0, 0.3, 4.0, 100.0] {
            assert!((tbar(&p, k).norm() - 1.0).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn probability_bound() {
        let p = SystemParams::new(AtomKind::N4LS, 1.0, 0.7, 0.2, 1.0, 5.0, 1.1, 0.4, 0.0).unwrap();
        for i in -200..=200 {
            let a = SinglePhotonAmplitudes::at(&p, i as f64 * 0.05);
            assert!(a.t.norm_sqr() + a.r.norm_sqr() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn rho_values() {
        let p = SystemParams::preset(AtomKind::Lambda3LS, 9.0, 1.6).unwrap();
        assert!((rho(&p, 0.0) - Complex64::new(-0.64, 0.0)).norm() < 1e-15);
        let p0 = SystemParams::preset(AtomKind::Lambda3LS, 9.0, 0.0).unwrap();
        assert_eq!(rho(&p0, 0.0), Complex64::new(0.0, 0.0));
        let big = rho(&p, 1e6);
        assert!((big / 1e12 - 1.0).norm() < 1e-5);
    }

    #[test]
    fn two_level_transport_narrow_packet() {
        let (p, wp) = make_paper_defaults(AtomKind::Lambda3LS, 9.0, 0.0, 1e-3, 0.0).unwrap();
        let tr = transmission_reflection(&p, &wp, &spec()).unwrap();
        assert!((tr.transmission - 0.01).abs() < 1e-3);
        assert!((tr.reflection - 0.81).abs() < 1e-3);
        assert!((tr.loss - 0.18).abs() < 1e-3);
    }

    #[test]
    fn decoupled_transport() {
        let (p, wp) = make_paper_defaults(AtomKind::N4LS, 0.0, 1.6, 0.3, 0.7).unwrap();
        let tr = transmission_reflection(&p, &wp, &spec()).unwrap();
        assert!((tr.transmission - 1.0).abs() < 1e-10);
        assert!(tr.reflection.abs() < 1e-12);
        assert!(tr.loss.abs() < 1e-10);
    }

    #[test]
    fn eit_window_narrow_packet() {
        let (p, wp) = make_paper_defaults(AtomKind::N4LS, 9.0, 1.6, 0.01, 0.0).unwrap();
        let tr = transmission_reflection(&p, &wp, &spec()).unwrap();
        assert!(tr.transmission > 0.98);
        assert!(tr.reflection < 0.02);
    }

    #[test]
    fn lossless_conserves_probability() {
        let (p, wp) = make_paper_defaults(AtomKind::Lambda3LS, 9.0, 1.6, 0.2, 0.3).unwrap();
        let tr = transmission_reflection(&p.lossless(), &wp, &spec()).unwrap();
        assert!((tr.transmission + tr.reflection - 1.0).abs() < 1e-6);
    }

    #[test]
    fn detuning_mirror_symmetry_without_drive() {
        let p = SystemParams::preset(AtomKind::Lambda3LS, 9.0, 0.0).unwrap();
        let a = transmission_reflection(&p, &Wavepacket::new(0.5, 1.3).unwrap(), &spec()).unwrap();
        let b = transmission_reflection(&p, &Wavepacket::new(0.5, -1.3).unwrap(), &spec()).unwrap();
        assert!((a.transmission - b.transmission).abs() < 1e-10);
        assert!((a.reflection - b.reflection).abs() < 1e-10);
    }

    #[test]
    fn reflection_grows_with_purcell() {
        let rs: Vec<f64> = [1.0, 3.0, 9.0, 27.0]
            .iter()
            .map(|&pf| {
                let (p, wp) = make_paper_defaults(AtomKind::Lambda3LS, pf, 0.0, 0.2, 0.0).unwrap();
                transmission_reflection(&p, &wp, &spec()).unwrap().reflection
            })
            .collect();
        assert!(rs.windows(2).all(|w| w[1] > w[0]), "{rs:?}");
    }
}
