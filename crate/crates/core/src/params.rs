//! Physical parameters and unit conventions.
//!
//! Frequencies are measured as detunings from the |1>-|2> transition
//! (`eps2 = 0`) and the group velocity is 1, so momentum and frequency share
//! units, as do position and time. The nominal loss rate of level 2
//! (`rate_unit`) is the frequency unit of every figure-style preset.

use serde::{Deserialize, Serialize};

use crate::single_photon::Wavepacket;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomKind {
    /// Driven Lambda-type three-level system.
    Lambda3LS,
    /// N-type four-level system; |3>-|4> also couples to the waveguide.
    N4LS,
}

impl std::str::FromStr for AtomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lambda" | "l" | "3ls" | "lambda3ls" | "λ" => Ok(AtomKind::Lambda3LS),
            "n" | "4ls" | "n4ls" => Ok(AtomKind::N4LS),
            other => Err(Error::InvalidParameter(format!("unknown atom kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for AtomKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AtomKind::Lambda3LS => "lambda",
            AtomKind::N4LS => "n",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub kind: AtomKind,
    /// Nominal loss rate of level 2; the frequency unit.
    pub rate_unit: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Ignored for `Lambda3LS`.
    pub gamma4: f64,
    /// Decay rate into the waveguide.
    pub gamma_wg: f64,
    /// `gamma_wg / rate_unit`, kept for reporting.
    pub purcell: f64,
    pub omega_rabi: f64,
    pub delta_ctrl: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
}

impl SystemParams {
    /// General constructor. `delta43` is the mismatch between the |3>-|4>
    /// and |1>-|2> transition frequencies.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: AtomKind,
        rate_unit: f64,
        gamma2: f64,
        gamma3: f64,
        gamma4: f64,
        gamma_wg: f64,
        omega_rabi: f64,
        delta_ctrl: f64,
        delta43: f64,
    ) -> Result<Self> {
        let eps2 = 0.0;
        let eps3 = eps2 - delta_ctrl;
        let p = Self {
            kind,
            rate_unit,
            gamma2,
            gamma3,
            gamma4,
            gamma_wg,
            purcell: gamma_wg / rate_unit,
            omega_rabi,
            delta_ctrl,
            eps2,
            eps3,
            // in the rotating frame the doubly excited level sits at
            // eps3 + (omega43 - omega21)
            eps4: eps3 + delta43,
        };
        p.validate()?;
        Ok(p)
    }

    /// Figure presets: `gamma2 = gamma4 = 1`, `gamma3 = 0`, `delta = 0`,
    /// `omega43 = omega21`, `gamma_wg = purcell`.
    pub fn preset(kind: AtomKind, purcell: f64, omega_rabi: f64) -> Result<Self> {
        if !(purcell >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "purcell factor must be non-negative, got {purcell}"
            )));
        }
        Self::new(kind, 1.0, 1.0, 0.0, 1.0, purcell, omega_rabi, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let finite = [
            self.rate_unit,
            self.gamma2,
            self.gamma3,
            self.gamma4,
            self.gamma_wg,
            self.omega_rabi,
            self.delta_ctrl,
            self.eps4,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return bad("parameters must be finite".into());
        }
        if !(self.rate_unit > 0.0) {
            return bad(format!("rate unit must be positive, got {}", self.rate_unit));
        }
        for (name, v) in [
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("gamma4", self.gamma4),
            ("gamma_wg", self.gamma_wg),
            ("omega_rabi", self.omega_rabi),
        ] {
            if v < 0.0 {
                return bad(format!("{name} must be non-negative, got {v}"));
            }
        }
        if self.eps3 != self.eps2 - self.delta_ctrl {
            return bad("eps3 must equal eps2 - delta_ctrl".into());
        }
        if (self.purcell - self.gamma_wg / self.rate_unit).abs()
            > 4.0 * f64::EPSILON * self.purcell.abs().max(1.0)
        {
            return bad("purcell is inconsistent with gamma_wg / rate_unit".into());
        }
        Ok(())
    }

    pub fn with_kind(mut self, kind: AtomKind) -> Self {
        self.kind = kind;
        self
    }

    /// Same system at another Purcell factor and Rabi frequency.
    pub fn with_coupling(&self, purcell: f64, omega_rabi: f64) -> Result<Self> {
        let p = Self {
            gamma_wg: purcell * self.rate_unit,
            purcell,
            omega_rabi,
            ..*self
        };
        p.validate()?;
        Ok(p)
    }

    /// Same system with every non-guided loss switched off.
    pub fn lossless(mut self) -> Self {
        self.gamma2 = 0.0;
        self.gamma3 = 0.0;
        self.gamma4 = 0.0;
        self
    }

    /// Multiplies every rate and energy by `factor`.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            rate_unit: self.rate_unit * factor,
            gamma2: self.gamma2 * factor,
            gamma3: self.gamma3 * factor,
            gamma4: self.gamma4 * factor,
            gamma_wg: self.gamma_wg * factor,
            omega_rabi: self.omega_rabi * factor,
            delta_ctrl: self.delta_ctrl * factor,
            eps2: self.eps2 * factor,
            eps3: self.eps3 * factor,
            eps4: self.eps4 * factor,
            ..*self
        }
    }
}

/// System and wavepacket for the figure presets, with the packet centred
/// `delta_omega` away from the |1>-|2> resonance.
pub fn make_paper_defaults(
    kind: AtomKind,
    purcell: f64,
    omega_rabi: f64,
    sigma: f64,
    delta_omega: f64,
) -> Result<(SystemParams, Wavepacket)> {
    let params = SystemParams::preset(kind, purcell, omega_rabi)?;
    let wp = Wavepacket::new(sigma, params.eps2 + delta_omega)?;
    Ok((params, wp))
}
