//! Flat `key = value` run configuration, sweep ranges and numerics settings.

use serde::{Deserialize, Serialize};
use wqed::numerics::{QmcSpec, QuadratureSpec};
use wqed::{AtomKind, SystemParams, Wavepacket};

use crate::error::CliError;

/// Physical inputs of one run. Defaults are the figure preset
/// `P = 9, Omega = 1.6, sigma = 0.2` on resonance with the N-type emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub kind: AtomKind,
    pub purcell: f64,
    pub omega_rabi: f64,
    pub sigma: f64,
    pub delta_omega: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub delta_ctrl: f64,
    pub delta43: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kind: AtomKind::N4LS,
            purcell: 9.0,
            omega_rabi: 1.6,
            sigma: 0.2,
            delta_omega: 0.0,
            gamma3: 0.0,
            gamma4: 1.0,
            delta_ctrl: 0.0,
            delta43: 0.0,
        }
    }
}

/// Keys that take a number and can be swept.
pub const NUMERIC_KEYS: [&str; 8] = [
    "purcell",
    "omega_rabi",
    "sigma",
    "delta_omega",
    "gamma3",
    "gamma4",
    "delta_ctrl",
    "delta43",
];

pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

fn parse_number(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Param(format!("{key}: '{value}' is not a finite number")))
}

impl RunConfig {
    pub fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "purcell" => &mut self.purcell,
            "omega_rabi" => &mut self.omega_rabi,
            "sigma" => &mut self.sigma,
            "delta_omega" => &mut self.delta_omega,
            "gamma3" => &mut self.gamma3,
            "gamma4" => &mut self.gamma4,
            "delta_ctrl" => &mut self.delta_ctrl,
            "delta43" => &mut self.delta43,
            _ => return None,
        })
    }

    pub fn set_number(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        match self.slot(key) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(CliError::Param(format!("'{key}' is not a numeric parameter"))),
        }
    }

    /// System and wavepacket, with the level-2 loss rate as the unit.
    pub fn system(&self) -> Result<(SystemParams, Wavepacket), CliError> {
        if !(self.purcell >= 0.0) {
            return Err(CliError::Param(format!(
                "purcell factor must be non-negative, got {}",
                self.purcell
            )));
        }
        let params = SystemParams::new(
            self.kind,
            1.0,
            1.0,
            self.gamma3,
            self.gamma4,
            self.purcell,
            self.omega_rabi,
            self.delta_ctrl,
            self.delta43,
        )?;
        let wp = Wavepacket::new(self.sigma, params.eps2 + self.delta_omega)?;
        Ok((params, wp))
    }
}

/// Tolerances, QMC budget and thread count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub budget: usize,
    pub seed: u64,
    /// 0 lets the thread pool pick.
    pub workers: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        let m = QmcSpec::default();
        Self {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            budget: m.budget,
            seed: m.seed,
            workers: 0,
        }
    }
}

impl Numerics {
    pub fn quadrature(&self) -> Result<QuadratureSpec, CliError> {
        let q = QuadratureSpec::new(self.abs_tol, self.rel_tol);
        q.validate()?;
        Ok(q)
    }

    pub fn qmc(&self) -> Result<QmcSpec, CliError> {
        let m = QmcSpec::with_budget(self.budget, self.seed);
        m.validate()?;
        Ok(m)
    }
}

/// Everything a config file can set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Settings {
    pub run: RunConfig,
    pub numerics: Numerics,
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = normalize_key(key);
        let int = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Param(format!("{key}: '{v}' is not a non-negative integer")))
        };
        match key.as_str() {
            "kind" => self.run.kind = value.parse()?,
            "abs_tol" => self.numerics.abs_tol = parse_number(&key, value)?,
            "rel_tol" => self.numerics.rel_tol = parse_number(&key, value)?,
            "budget" => self.numerics.budget = int(value)? as usize,
            "seed" => self.numerics.seed = int(value)?,
            "workers" => self.numerics.workers = int(value)? as usize,
            k if NUMERIC_KEYS.contains(&k) => {
                let v = parse_number(k, value)?;
                self.run.set_number(k, v)?;
            }
            other => return Err(CliError::Param(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a config text: one `key = value` per line, `#` starts a
    /// comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Param(format!("config line {}: expected key = value", i + 1)))?;
            self.set(key, value)
                .map_err(|e| CliError::Param(format!("config line {}: {}", i + 1, e.message())))?;
        }
        Ok(())
    }
}

/// `lo:hi:n`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Range {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::Param(format!("'{text}' is not a range lo:hi:n"));
        let parts: Vec<&str> = text.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(bad());
        };
        let lo = lo.trim().parse::<f64>().map_err(|_| bad())?;
        let hi = hi.trim().parse::<f64>().map_err(|_| bad())?;
        let n = n.trim().parse::<usize>().map_err(|_| bad())?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        Ok(Self { lo, hi, n })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

/// `var=lo:hi:n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub var: String,
    pub range: Range,
}

impl Sweep {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let (var, range) = text
            .split_once('=')
            .ok_or_else(|| CliError::Param(format!("'{text}' is not a sweep var=lo:hi:n")))?;
        let var = normalize_key(var);
        if !NUMERIC_KEYS.contains(&var.as_str()) {
            return Err(CliError::Param(format!(
                "cannot sweep '{var}'; choose one of {}",
                NUMERIC_KEYS.join(", ")
            )));
        }
        Ok(Self {
            var,
            range: Range::parse(range)?,
        })
    }

    /// The sweep points as full configurations.
    pub fn points(&self, base: &RunConfig) -> Vec<(f64, RunConfig)> {
        self.range
            .values()
            .into_iter()
            .map(|v| {
                let mut c = *base;
                // the variable was validated in `parse`
                let _ = c.set_number(&self.var, v);
                (v, c)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let mut s = Settings::default();
        s.apply_text(
            "# preset\nkind = lambda\npurcell = 3.3\nomega-rabi=0.8  # inline\n\nsigma = 0.01\nbudget = 5000\n",
        )
        .unwrap();
        assert_eq!(s.run.kind, AtomKind::Lambda3LS);
        assert_eq!(s.run.purcell, 3.3);
        assert_eq!(s.run.omega_rabi, 0.8);
        assert_eq!(s.run.sigma, 0.01);
        assert_eq!(s.numerics.budget, 5000);
        assert_eq!(s.run.delta_omega, 0.0);
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        let mut s = Settings::default();
        assert!(s.apply_text("colour = red").is_err());
        assert!(s.apply_text("purcell = lots").is_err());
        assert!(s.apply_text("kind = x").is_err());
        assert!(s.apply_text("purcell").is_err());
        assert!(s.apply_text("sigma = inf").is_err());
    }

    #[test]
    fn ranges() {
        let r = Range::parse("-3:3:7").unwrap();
        assert_eq!(r.values(), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(Range::parse("0.5:9:1").unwrap().values(), vec![0.5]);
        assert!(Range::parse("0:1").is_err());
        assert!(Range::parse("0:1:0").is_err());
        assert!(Range::parse("a:1:3").is_err());
    }

    #[test]
    fn sweeps() {
        let s = Sweep::parse("delta-omega=-1:1:3").unwrap();
        assert_eq!(s.var, "delta_omega");
        let pts = s.points(&RunConfig::default());
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].1.delta_omega, -1.0);
        assert_eq!(pts[2].1.purcell, 9.0);
        assert!(Sweep::parse("kind=0:1:2").is_err());
        assert!(Sweep::parse("purcell").is_err());
    }

    #[test]
    fn builds_the_system() {
        let (p, wp) = RunConfig::default().system().unwrap();
        assert_eq!(p.gamma_wg, 9.0);
        assert_eq!(wp.sigma, 0.2);
        let bad = RunConfig {
            sigma: -1.0,
            ..RunConfig::default()
        };
        assert!(bad.system().is_err());
    }
}
