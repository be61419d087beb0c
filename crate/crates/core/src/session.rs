//! Run configuration, convention resolution and the persisted conventions
//! record shared by every command.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::conventions::{Conventions, Sign};
use crate::curve::FramedCurve;
use crate::energy::free_energy_direct;
use crate::error::{Error, Result};
use crate::hodge::conjecture_rhs;
use crate::psi::calibrate_psirec;
use crate::recursion::{calibrate_sign_kernel, checksum, CorrStore, DiskCache, WindowPolicy};

/// Largest genus accepted without raising the cap.
pub const G_MAX_CAP: u32 = 6;

/// Highest Ψ index used when calibrating the shift-recursion sign.
pub const PSIREC_CALIBRATION_N: usize = 10;

const CONVENTIONS_FILE: &str = "conventions.json";
const CONVENTIONS_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub sign_kernel: Option<Sign>,
    pub sign_psirec: Option<Sign>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub framings: Vec<i64>,
    pub g_max: u32,
    pub h_max: u32,
    pub window_margin: i64,
    pub cache_dir: Option<PathBuf>,
    pub overrides: Overrides,
    pub g_cap: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            framings: vec![1, 2, 3],
            g_max: 3,
            h_max: 6,
            window_margin: 0,
            cache_dir: None,
            overrides: Overrides::default(),
            g_cap: G_MAX_CAP,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.framings.is_empty() {
            return Err(Error::Parse("no framings given".into()));
        }
        if let Some(&f) = self.framings.iter().find(|&&f| f < 1) {
            return Err(Error::InvalidFraming(f));
        }
        if self.g_max > self.g_cap {
            return Err(Error::InvalidGenus(self.g_max.into()));
        }
        if self.window_margin < 0 {
            return Err(Error::Parse(format!(
                "negative window margin {}",
                self.window_margin
            )));
        }
        Ok(())
    }

    pub fn policy(&self) -> WindowPolicy {
        WindowPolicy {
            margin: self.window_margin,
            ..WindowPolicy::default()
        }
    }
}

/// Calibrated conventions as stored in a cache directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionsRecord {
    pub format_version: u32,
    pub conventions: Conventions,
    /// `F^(2) / rhs(2)` under `conventions`.
    pub epsilon: Option<Sign>,
    pub calibrated_on: Vec<i64>,
    pub checksum: String,
}

#[derive(Serialize)]
struct RecordBody<'a> {
    conventions: &'a Conventions,
    epsilon: &'a Option<Sign>,
    calibrated_on: &'a [i64],
}

impl ConventionsRecord {
    fn new(conventions: Conventions, epsilon: Option<Sign>, calibrated_on: Vec<i64>) -> Self {
        let checksum = checksum(&RecordBody {
            conventions: &conventions,
            epsilon: &epsilon,
            calibrated_on: &calibrated_on,
        });
        ConventionsRecord {
            format_version: CONVENTIONS_VERSION,
            conventions,
            epsilon,
            calibrated_on,
            checksum,
        }
    }

    fn is_valid(&self) -> bool {
        self.format_version == CONVENTIONS_VERSION
            && self.checksum
                == checksum(&RecordBody {
                    conventions: &self.conventions,
                    epsilon: &self.epsilon,
                    calibrated_on: &self.calibrated_on,
                })
    }

    pub fn load(dir: &Path) -> Option<Self> {
        let text = fs::read_to_string(dir.join(CONVENTIONS_FILE)).ok()?;
        let rec: ConventionsRecord = serde_json::from_str(&text).ok()?;
        rec.is_valid().then_some(rec)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        fs::write(dir.join(CONVENTIONS_FILE), text).map_err(|e| Error::Cache(e.to_string()))
    }
}

/// Resolved conventions plus the correlator store built on them.
pub struct Session {
    pub config: RunConfig,
    pub conventions: Conventions,
    pub epsilon: Option<Sign>,
    /// Conventions produced by calibration, before any override.
    pub calibrated: Conventions,
    pub store: CorrStore,
}

/// `σ_K` from the low correlators and `σ_Ψrec` from the Ψ̂ forms, both over
/// every framing in `framings`.
pub fn calibrate(framings: &[i64], policy: WindowPolicy) -> Result<Conventions> {
    let mut psirec = None;
    for &f in framings {
        let s = calibrate_psirec(f, PSIREC_CALIBRATION_N)?;
        match psirec {
            Some(prev) if prev != s => {
                return Err(Error::Calibration(format!(
                    "shift-recursion sign differs between framings ({prev} vs {s} at f={f})"
                )))
            }
            _ => psirec = Some(s),
        }
    }
    let psirec = psirec.expect("nonempty framings");
    let kernel = calibrate_sign_kernel(framings, policy, psirec)?;
    Ok(Conventions::new(kernel.sign, psirec))
}

fn epsilon_of(store: &CorrStore, f: i64) -> Result<Option<Sign>> {
    let c = FramedCurve::new(f)?;
    let ratio = free_energy_direct(store, &c, 2)? / conjecture_rhs(2);
    Ok(Sign::of(&ratio).filter(|_| num_traits::Signed::abs(&ratio) == num_traits::One::one()))
}

impl Session {
    /// Reuses the cache directory's conventions record when present and
    /// valid, otherwise calibrates and persists one. Overrides apply on top
    /// and are never persisted.
    pub fn open(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let policy = config.policy();
        let cache = config.cache_dir.as_ref().map(DiskCache::new).transpose()?;
        let record = config
            .cache_dir
            .as_deref()
            .and_then(ConventionsRecord::load);
        let (calibrated, stored_eps) = match &record {
            Some(r) => (r.conventions, r.epsilon),
            None => (calibrate(&config.framings, policy)?, None),
        };
        let conventions = Conventions::new(
            config
                .overrides
                .sign_kernel
                .unwrap_or(calibrated.sign_kernel),
            config
                .overrides
                .sign_psirec
                .unwrap_or(calibrated.sign_psirec),
        );
        let store = CorrStore::new(conventions, policy, cache);
        let epsilon = if conventions == calibrated && stored_eps.is_some() {
            stored_eps
        } else {
            epsilon_of(&store, config.framings[0])?
        };
        if record.is_none() {
            if let Some(dir) = &config.cache_dir {
                let eps = if conventions == calibrated {
                    epsilon
                } else {
                    None
                };
                ConventionsRecord::new(calibrated, eps, config.framings.clone()).save(dir)?;
            }
        }
        Ok(Session {
            config,
            conventions,
            epsilon,
            calibrated,
            store,
        })
    }

    /// `conventions: σ_K=…, σ_Ψrec=…, ε=…`
    pub fn conventions_line(&self) -> String {
        let eps = self
            .epsilon
            .map_or("undetermined".to_string(), |e| e.to_string());
        format!("conventions: {}, ε={eps}", self.conventions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            framings: vec![],
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let deep = RunConfig {
            g_max: 7,
            ..RunConfig::default()
        };
        assert!(deep.validate().is_err());
        let zero = RunConfig {
            framings: vec![1, 0],
            ..RunConfig::default()
        };
        assert_eq!(zero.validate(), Err(Error::InvalidFraming(0)));
    }

    #[test]
    fn record_round_trip_and_tamper() {
        let dir = tempfile::tempdir().unwrap();
        let rec = ConventionsRecord::new(
            Conventions::new(Sign::Minus, Sign::Plus),
            Some(Sign::Minus),
            vec![1],
        );
        rec.save(dir.path()).unwrap();
        assert_eq!(ConventionsRecord::load(dir.path()), Some(rec));
        let path = dir.path().join(CONVENTIONS_FILE);
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replacen("-1", "1", 1)).unwrap();
        assert_eq!(ConventionsRecord::load(dir.path()), None);
    }
}
