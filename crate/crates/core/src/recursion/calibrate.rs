use super::golden;
use super::store::{CorrStore, WindowPolicy};
use crate::conventions::{Conventions, Sign};
use crate::curve::FramedCurve;
use crate::error::{Error, Result};

/// Outcome of fixing the kernel orientation against `W^(0,3)` and `W^(1,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelCalibration {
    pub sign: Sign,
    pub framings: Vec<i64>,
}

/// Computes `W^(0,3)` and `W^(1,1)` with `σ_K = +1` at every framing. Both
/// depend linearly on `σ_K`, so they must all match the closed forms, or all
/// match after negation; anything else is an error.
pub fn calibrate_sign_kernel(
    framings: &[i64],
    policy: WindowPolicy,
    sign_psirec: Sign,
) -> Result<KernelCalibration> {
    let store = CorrStore::new(Conventions::new(Sign::Plus, sign_psirec), policy, None);
    let mut outcomes = Vec::new();
    for &f in framings {
        let c = FramedCurve::new(f)?;
        for (g, h) in [(0, 3), (1, 1)] {
            let w = store.correlator(&c, g, h)?;
            let gold = golden::golden(g, h, f).expect("golden exists");
            let outcome = if *w == gold {
                Some(Sign::Plus)
            } else if w.neg() == gold {
                Some(Sign::Minus)
            } else {
                None
            };
            outcomes.push(((f, g, h), outcome, w));
        }
    }
    let first = outcomes.first().and_then(|o| o.1);
    match first {
        Some(sign) if outcomes.iter().all(|o| o.1 == Some(sign)) => Ok(KernelCalibration {
            sign,
            framings: framings.to_vec(),
        }),
        _ => {
            let detail: Vec<String> = outcomes
                .iter()
                .map(|((f, g, h), o, w)| {
                    let tag = match o {
                        Some(Sign::Plus) => "matches".to_string(),
                        Some(Sign::Minus) => "matches negated".to_string(),
                        None => format!("matches neither ({w})"),
                    };
                    format!("f={f} W({g},{h}) {tag}")
                })
                .collect();
            Err(Error::Calibration(detail.join("; ")))
        }
    }
}
