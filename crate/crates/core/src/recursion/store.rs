use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use super::cache::DiskCache;
use super::corrdiff::{is_stable, moduli_dimension, CorrDiff};
use super::local::LocalData;
use super::step::{assemble_integrand, residue_and_peel, StepStats};
use crate::conventions::Conventions;
use crate::curve::FramedCurve;
use crate::error::{Error, Result};
use crate::psi::PsiTable;

/// Initial window `6g + 2h + 8 + margin`, widened by `step` up to `retries`
/// times when a needed coefficient falls outside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowPolicy {
    pub margin: i64,
    pub step: i64,
    pub retries: u32,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy {
            margin: 0,
            step: 4,
            retries: 2,
        }
    }
}

impl WindowPolicy {
    pub fn initial(&self, g: u32, h: u32) -> i64 {
        6 * g as i64 + 2 * h as i64 + 8 + self.margin
    }

    pub fn widened(&self, extra: i64) -> WindowPolicy {
        WindowPolicy {
            margin: self.margin + extra,
            ..*self
        }
    }
}

type Key = (i64, u32, u32);

/// Compute-once map of correlators for one set of conventions.
///
/// Entries are append-only: concurrent callers may compute the same entry,
/// and the first insertion wins (all results are equal by determinism).
pub struct CorrStore {
    conventions: Conventions,
    policy: WindowPolicy,
    cache: Option<DiskCache>,
    table: Mutex<HashMap<Key, Arc<CorrDiff>>>,
    locals: Mutex<HashMap<(i64, i64), Arc<LocalData>>>,
    psi: Mutex<HashMap<i64, Arc<PsiTable>>>,
    stats: Mutex<HashMap<Key, StepStats>>,
    cache_rejects: AtomicUsize,
}

impl CorrStore {
    pub fn new(conventions: Conventions, policy: WindowPolicy, cache: Option<DiskCache>) -> Self {
        CorrStore {
            conventions,
            policy,
            cache,
            table: Mutex::new(HashMap::new()),
            locals: Mutex::new(HashMap::new()),
            psi: Mutex::new(HashMap::new()),
            stats: Mutex::new(HashMap::new()),
            cache_rejects: AtomicUsize::new(0),
        }
    }

    pub fn conventions(&self) -> Conventions {
        self.conventions
    }

    pub fn policy(&self) -> WindowPolicy {
        self.policy
    }

    /// Cache files that were found but rejected (and recomputed).
    pub fn cache_rejects(&self) -> usize {
        self.cache_rejects.load(Ordering::Relaxed)
    }

    /// Step counters for every correlator computed (not loaded) by this store.
    pub fn step_stats(&self) -> HashMap<(i64, u32, u32), StepStats> {
        self.stats.lock().expect("poisoned").clone()
    }

    /// Correlators currently held in memory, sorted by `(f, g, h)`.
    pub fn computed(&self) -> Vec<Arc<CorrDiff>> {
        let t = self.table.lock().expect("poisoned");
        let mut v: Vec<_> = t.values().cloned().collect();
        v.sort_by_key(|w| (w.f, w.g, w.h));
        v
    }

    /// Ψ̂ table for framing `f` holding at least `Ψ̂_0..Ψ̂_n_max`.
    pub fn psi_table(&self, f: i64, n_max: usize) -> Result<Arc<PsiTable>> {
        if let Some(t) = self.psi.lock().expect("poisoned").get(&f) {
            if t.n_max() >= n_max {
                return Ok(t.clone());
            }
        }
        let t = Arc::new(PsiTable::new(f, n_max)?);
        let mut m = self.psi.lock().expect("poisoned");
        let e = m.entry(f).or_insert_with(|| t.clone());
        if e.n_max() < n_max {
            *e = t;
        }
        Ok(e.clone())
    }

    fn local(&self, c: &FramedCurve, window: i64) -> Result<Arc<LocalData>> {
        let key = (c.framing(), window);
        if let Some(l) = self.locals.lock().expect("poisoned").get(&key) {
            return Ok(l.clone());
        }
        let l = Arc::new(LocalData::new(c, window, self.conventions.sign_kernel)?);
        Ok(self
            .locals
            .lock()
            .expect("poisoned")
            .entry(key)
            .or_insert(l)
            .clone())
    }

    /// `W^(g,h)` at framing `c`, memoized in memory and on disk.
    pub fn correlator(&self, c: &FramedCurve, g: u32, h: u32) -> Result<Arc<CorrDiff>> {
        if !is_stable(g, h) {
            return Err(Error::UnstableCorrelator {
                g: g.into(),
                h: h.into(),
            });
        }
        let key = (c.framing(), g, h);
        if let Some(w) = self.table.lock().expect("poisoned").get(&key) {
            return Ok(w.clone());
        }
        let loaded = match &self.cache {
            Some(cache) => match cache.load(c.framing(), g, h, self.conventions) {
                Ok(w) => w,
                Err(_) => {
                    self.cache_rejects.fetch_add(1, Ordering::Relaxed);
                    None
                }
            },
            None => None,
        };
        let w = match loaded {
            Some(w) => w,
            None => {
                let w = self.compute_with_retry(c, g, h)?;
                if let Some(cache) = &self.cache {
                    cache.store(&w, self.conventions)?;
                }
                w
            }
        };
        let mut t = self.table.lock().expect("poisoned");
        Ok(t.entry(key).or_insert_with(|| Arc::new(w)).clone())
    }

    fn compute_with_retry(&self, c: &FramedCurve, g: u32, h: u32) -> Result<CorrDiff> {
        let base = self.policy.initial(g, h);
        let mut last = None;
        for attempt in 0..=self.policy.retries {
            let window = base + self.policy.step * attempt as i64;
            match self.compute_at_window(c, g, h, window) {
                Err(e @ Error::WindowTooSmall { .. }) => last = Some(e),
                other => return other,
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// One recursion step for `W^(g,h)` at an explicit window, taking lower
    /// correlators from the store. Bypasses the memo for the result itself.
    pub fn compute_at_window(
        &self,
        c: &FramedCurve,
        g: u32,
        h: u32,
        window: i64,
    ) -> Result<CorrDiff> {
        if !is_stable(g, h) {
            return Err(Error::UnstableCorrelator {
                g: g.into(),
                h: h.into(),
            });
        }
        let lower = |g1: u32, h1: u32| self.correlator(c, g1, h1);
        let integrand = assemble_integrand(&lower, g, h)?;
        let psi = self.psi_table(c.framing(), moduli_dimension(g, h) as usize + 2)?;
        let local = self.local(c, window)?;
        let (w, stats) = residue_and_peel(&integrand, &local, &psi, c.framing())?;
        self.stats
            .lock()
            .expect("poisoned")
            .insert((c.framing(), g, h), stats);
        Ok(w)
    }
}
