//! Browser bindings for three quick computations: the single-photon
//! transmission spectrum, two-photon channel probabilities and the
//! transmitted `g2(tau)`.
//!
//! Results are flat `Float64Array`s; each function documents its row
//! layout. Missing values are `NaN`.

use wasm_bindgen::prelude::*;
use wqed::coherent_stats::g2;
use wqed::numerics::QuadratureSpec;
use wqed::single_photon::transmission_reflection;
use wqed::two_photon::two_photon_probabilities;
use wqed::{make_paper_defaults, AtomKind, SystemParams, Wavepacket};

fn system(
    kind: &str,
    purcell: f64,
    omega_rabi: f64,
    sigma: f64,
    delta_omega: f64,
) -> Result<(SystemParams, Wavepacket), String> {
    let kind: AtomKind = kind.parse().map_err(|e: wqed::Error| e.to_string())?;
    make_paper_defaults(kind, purcell, omega_rabi, sigma, delta_omega).map_err(|e| e.to_string())
}

fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, String> {
    if n == 0 || n > 2000 || !(lo.is_finite() && hi.is_finite()) {
        return Err(format!("grid needs finite ends and 1..=2000 points, got {n}"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

/// Rows of `[delta_omega, T, R, loss]` for `n` detunings in `[lo, hi]`.
pub fn spectrum(
    kind: &str,
    purcell: f64,
    omega_rabi: f64,
    sigma: f64,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let quad = QuadratureSpec::default();
    let mut out = Vec::with_capacity(4 * n);
    for d in grid(lo, hi, n)? {
        let (p, wp) = system(kind, purcell, omega_rabi, sigma, d)?;
        let s = transmission_reflection(&p, &wp, &quad).map_err(|e| e.to_string())?;
        out.extend([d, s.transmission, s.reflection, s.loss]);
    }
    Ok(out)
}

/// `[T, P_RR, P_RL, P_LL, loss2, P21]` at one detuning.
pub fn two_photon(
    kind: &str,
    purcell: f64,
    omega_rabi: f64,
    sigma: f64,
    delta_omega: f64,
) -> Result<Vec<f64>, String> {
    let (p, wp) = system(kind, purcell, omega_rabi, sigma, delta_omega)?;
    let r = two_photon_probabilities(&p, &wp, &QuadratureSpec::default()).map_err(|e| e.to_string())?;
    Ok(vec![
        r.transmission,
        r.rr.total,
        r.rl.total,
        r.ll.total,
        r.loss2,
        r.p21,
    ])
}

/// Rows of `[tau, g2]` for `n` delays in `[0, tau_max]`.
pub fn correlation(
    kind: &str,
    purcell: f64,
    omega_rabi: f64,
    sigma: f64,
    tau_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let (p, wp) = system(kind, purcell, omega_rabi, sigma, 0.0)?;
    let tau = grid(0.0, tau_max, n)?;
    let curve = g2(&p, &wp, &tau, &QuadratureSpec::default()).map_err(|e| e.to_string())?;
    Ok(curve
        .tau
        .iter()
        .zip(&curve.g2)
        .flat_map(|(&t, g)| [t, g.unwrap_or(f64::NAN)])
        .collect())
}

#[wasm_bindgen(js_name = spectrum)]
pub fn spectrum_js(
    kind: &str,
    purcell: f64,
    omega_rabi: f64,
    sigma: f64,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    spectrum(kind, purcell, omega_rabi, sigma, lo, hi, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = twoPhoton)]
pub fn two_photon_js(
    kind: &str,
    purcell: f64,
    omega_rabi: f64,
    sigma: f64,
    delta_omega: f64,
) -> Result<Vec<f64>, JsError> {
    two_photon(kind, purcell, omega_rabi, sigma, delta_omega).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = correlation)]
pub fn correlation_js(
    kind: &str,
    purcell: f64,
    omega_rabi: f64,
    sigma: f64,
    tau_max: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    correlation(kind, purcell, omega_rabi, sigma, tau_max, n).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_rows() {
        let s = spectrum("lambda", 9.0, 1.6, 0.01, -1.0, 1.0, 3).unwrap();
        assert_eq!(s.len(), 12);
        assert_eq!(s[4], 0.0);
        assert!(s[5] > 0.98);
        for row in s.chunks(4) {
            assert!((row[1] + row[2] + row[3] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_photon_directions() {
        let n = two_photon("n", 9.0, 1.6, 0.2, 0.0).unwrap();
        let l = two_photon("lambda", 9.0, 1.6, 0.2, 0.0).unwrap();
        assert!(n[5] < 0.9 && l[5] > 1.05);
        assert!((n[1] / (n[0] * n[0]) - n[5]).abs() < 1e-12);
    }

    #[test]
    fn correlation_starts_at_zero_delay() {
        let c = correlation("n", 9.0, 1.6, 0.2, 5.0, 6).unwrap();
        assert_eq!(c.len(), 12);
        assert_eq!(c[0], 0.0);
        assert!(c[1] > 0.0 && c[1] < 1.0);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(spectrum("x", 9.0, 1.6, 0.2, 0.0, 1.0, 2).is_err());
        assert!(spectrum("n", 9.0, 1.6, -0.2, 0.0, 1.0, 2).is_err());
        assert!(correlation("n", 9.0, 1.6, 0.2, 5.0, 0).is_err());
    }
}
