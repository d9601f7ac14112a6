//! Numerical tolerance constants.
//!
//! The defaults are used unless a different set is installed with
//! [`Tolerances::install`]. The CLI installs the set parsed from the
//! `TPC_TOL_OVERRIDE` environment variable before running any command.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const TOL_HERM: f64 = 1e-10;
pub const TOL_TRACE: f64 = 1e-10;
pub const TOL_PSD: f64 = 1e-9;
pub const TOL_RECON: f64 = 1e-9;
/// Relative to the largest eigenvalue.
pub const RANK_TOL: f64 = 1e-10;
pub const CERT_TOL: f64 = 1e-8;
pub const ADV_MIN: f64 = 1e-9;

pub const OVERRIDE_ENV: &str = "TPC_TOL_OVERRIDE";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub recon: f64,
    pub rank: f64,
    pub cert: f64,
    pub adv_min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: TOL_HERM,
            trace: TOL_TRACE,
            psd: TOL_PSD,
            recon: TOL_RECON,
            rank: RANK_TOL,
            cert: CERT_TOL,
            adv_min: ADV_MIN,
        }
    }
}

static INSTALLED: OnceLock<Tolerances> = OnceLock::new();

/// The tolerance set in effect for this process.
pub fn tol() -> &'static Tolerances {
    INSTALLED.get_or_init(Tolerances::default)
}

impl Tolerances {
    pub const NAMES: [&'static str; 7] = [
        "TOL_HERM",
        "TOL_TRACE",
        "TOL_PSD",
        "TOL_RECON",
        "RANK_TOL",
        "CERT_TOL",
        "ADV_MIN",
    ];

    /// Installs `self` as the process-wide set. Fails if a set was already
    /// installed or read with different values.
    pub fn install(self) -> Result<()> {
        let current = INSTALLED.get_or_init(|| self);
        if *current == self {
            Ok(())
        } else {
            Err(Error::invalid("tolerances already fixed for this process"))
        }
    }

    /// Parses a comma-separated `NAME=value` list on top of the defaults.
    pub fn with_overrides(spec: &str) -> Result<Self> {
        let mut t = Self::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("tolerance override `{item}` is not NAME=value")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("tolerance `{name}` has non-numeric value `{value}`")))?;
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(format!("tolerance `{name}` must be finite and nonnegative")));
            }
            *t.slot_mut(name.trim())? = value;
        }
        Ok(t)
    }

    pub fn from_env() -> Result<Self> {
        match std::env::var(OVERRIDE_ENV) {
            Ok(spec) => Self::with_overrides(&spec),
            Err(_) => Ok(Self::default()),
        }
    }

    fn slot_mut(&mut self, name: &str) -> Result<&mut f64> {
        Ok(match name {
            "TOL_HERM" => &mut self.herm,
            "TOL_TRACE" => &mut self.trace,
            "TOL_PSD" => &mut self.psd,
            "TOL_RECON" => &mut self.recon,
            "RANK_TOL" => &mut self.rank,
            "CERT_TOL" => &mut self.cert,
            "ADV_MIN" => &mut self.adv_min,
            other => return Err(Error::invalid(format!("unknown tolerance `{other}`"))),
        })
    }

    pub fn entries(&self) -> [(&'static str, f64); 7] {
        [
            ("TOL_HERM", self.herm),
            ("TOL_TRACE", self.trace),
            ("TOL_PSD", self.psd),
            ("TOL_RECON", self.recon),
            ("RANK_TOL", self.rank),
            ("CERT_TOL", self.cert),
            ("ADV_MIN", self.adv_min),
        ]
    }

    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let mut t = Self::default();
        for (name, value) in entries {
            *t.slot_mut(name)? = value;
        }
        Ok(t)
    }
}

impl fmt::Display for Tolerances {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries()
            .iter()
            .map(|(n, v)| format!("{n}={v:e}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply_on_top_of_defaults() {
        let t = Tolerances::with_overrides("CERT_TOL=1e-6, ADV_MIN=0").unwrap();
        assert_eq!(t.cert, 1e-6);
        assert_eq!(t.adv_min, 0.0);
        assert_eq!(t.herm, TOL_HERM);
    }

    #[test]
    fn bad_overrides_rejected() {
        assert!(Tolerances::with_overrides("FOO=1").is_err());
        assert!(Tolerances::with_overrides("CERT_TOL").is_err());
        assert!(Tolerances::with_overrides("CERT_TOL=abc").is_err());
        assert!(Tolerances::with_overrides("CERT_TOL=-1").is_err());
    }

    #[test]
    fn entries_round_trip() {
        let t = Tolerances::with_overrides("TOL_PSD=3e-7").unwrap();
        assert_eq!(Tolerances::from_entries(t.entries()).unwrap(), t);
    }
}
