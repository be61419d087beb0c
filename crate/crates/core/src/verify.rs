//! The verification suite: every exact check the engine can make about
//! itself, plus two reports on printed values that disagree with it.
//!
//! Checks decide the exit status. Reports never do.

use std::collections::BTreeMap;
use std::fmt::Display;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, rat_int, Poly, Rational};
use crate::conventions::{Conventions, Sign};
use crate::curve::FramedCurve;
use crate::energy::{
    framing_independent, global_epsilon, residue_theta_psi, theta_series, EnergyReport,
};
use crate::error::Error;
use crate::hodge::{hodge_extract, lambda_top_coefficient, lambda_triple};
use crate::psi::{calibrate_psirec, displayed_base_case, PsiTable};
use crate::recursion::golden::{self, matching_w12_readings};
use crate::recursion::{moduli_dimension, CorrDiff};
use crate::session::{Session, PSIREC_CALIBRATION_N};

/// Largest Ψ index in the θ-residue table.
pub const THETA_TABLE_N: usize = 8;
/// Genus range of the top λ-coefficient check.
pub const LAMBDA_G_RANGE: std::ops::RangeInclusive<u32> = 2..=6;
/// Extra window used by the truncation-stability probes.
pub const STABILITY_EXTRA: i64 = 4;
const INVOLUTION_WINDOW: i64 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational; never affects the outcome.
    Report,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub params: String,
    pub expected: String,
    pub actual: String,
    pub status: Status,
}

impl CheckRecord {
    fn check(
        name: &str,
        params: String,
        expected: impl Display,
        actual: impl Display,
        pass: bool,
    ) -> Self {
        CheckRecord {
            name: name.into(),
            params,
            expected: expected.to_string(),
            actual: actual.to_string(),
            status: if pass { Status::Pass } else { Status::Fail },
        }
    }

    fn report(name: &str, params: String, expected: impl Display, actual: impl Display) -> Self {
        CheckRecord {
            status: Status::Report,
            ..CheckRecord::check(name, params, expected, actual, true)
        }
    }

    fn error(name: &str, params: String, expected: impl Display, err: impl Display) -> Self {
        CheckRecord::check(name, params, expected, format!("error: {err}"), false)
    }

    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Report => "NOTE",
        };
        format!(
            "[{tag}] {} ({}) expected {} got {}",
            self.name, self.params, self.expected, self.actual
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub conventions: Conventions,
    pub epsilon: Option<Sign>,
    pub conventions_line: String,
    pub records: Vec<CheckRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub reports: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReportJson {
    pub conventions: Conventions,
    pub epsilon: Option<Sign>,
    pub conventions_line: String,
    pub records: Vec<CheckRecord>,
    pub summary: VerifySummary,
    pub all_pass: bool,
}

impl VerifyReport {
    pub fn summary(&self) -> VerifySummary {
        let count = |s| self.records.iter().filter(|r| r.status == s).count();
        let passed = count(Status::Pass);
        let failed = count(Status::Fail);
        VerifySummary {
            checks: passed + failed,
            passed,
            failed,
            reports: count(Status::Report),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary().failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn by_name<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a CheckRecord> {
        self.records.iter().filter(move |r| r.name == name)
    }

    pub fn to_json(&self) -> VerifyReportJson {
        VerifyReportJson {
            conventions: self.conventions,
            epsilon: self.epsilon,
            conventions_line: self.conventions_line.clone(),
            records: self.records.clone(),
            summary: self.summary(),
            all_pass: self.all_pass(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.conventions_line);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.line());
            out.push('\n');
        }
        let s = self.summary();
        out.push_str(&format!(
            "{} checks: {} passed, {} failed; {} reports\n",
            s.checks, s.passed, s.failed, s.reports
        ));
        out
    }
}

fn fp(f: i64) -> String {
    format!("f={f}")
}

fn fgh(f: i64, g: u32, h: u32) -> String {
    format!("f={f} g={g} h={h}")
}

fn ff1(f: i64) -> Rational {
    rat_int(f * (f + 1))
}

/// The `(g, h)` pairs whose correlators the suite needs.
pub fn probe_set(g_max: u32) -> Vec<(u32, u32)> {
    let mut v = vec![(0, 3), (0, 4), (1, 1), (1, 2)];
    v.extend((2..=g_max).map(|g| (g, 1)));
    v
}

/// Runs the whole suite for the session's framings, up to its `g_max`.
pub fn run_verify(session: &Session) -> VerifyReport {
    let framings = &session.config.framings;
    let g_max = session.config.g_max;
    let store = &session.store;
    let curves: Vec<FramedCurve> = framings
        .iter()
        .filter_map(|&f| FramedCurve::new(f).ok())
        .collect();

    // fill the store concurrently; failures resurface in the checks below
    std::thread::scope(|scope| {
        for c in &curves {
            scope.spawn(move || {
                for (g, h) in probe_set(g_max) {
                    let _ = store.correlator(c, g, h);
                }
            });
        }
    });

    let mut records = Vec::new();
    records.push(CheckRecord::check(
        "calibration",
        format!("framings={}", join(framings)),
        session.calibrated,
        session.conventions,
        session.calibrated == session.conventions,
    ));
    for c in &curves {
        shift_recursion(session, c, &mut records);
        involution(c, &mut records);
        display_reports(c, &mut records);
    }
    for c in &curves {
        goldens(session, c, &mut records);
    }
    for c in &curves {
        theta_residues(c, &mut records);
    }
    lambda_coefficients(&mut records);
    for c in &curves {
        stability_and_peel(session, c, g_max, &mut records);
    }
    energy_and_brackets(session, &curves, g_max, &mut records);

    VerifyReport {
        conventions: session.conventions,
        epsilon: session.epsilon,
        conventions_line: session.conventions_line(),
        records,
    }
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn shift_recursion(session: &Session, c: &FramedCurve, out: &mut Vec<CheckRecord>) {
    let name = "psi-shift-recursion";
    let params = format!("{} n<={PSIREC_CALIBRATION_N}", fp(c.framing()));
    let used = session.conventions.sign_psirec;
    out.push(match calibrate_psirec(c.framing(), PSIREC_CALIBRATION_N) {
        Ok(s) => CheckRecord::check(
            name,
            params,
            format!("σ_Ψrec={s}"),
            format!("σ_Ψrec={used}"),
            s == used,
        ),
        Err(e) => CheckRecord::error(name, params, "a single consistent sign", e),
    });
}

fn involution(c: &FramedCurve, out: &mut Vec<CheckRecord>) {
    let name = "involution";
    let params = format!("{} window={INVOLUTION_WINDOW}", fp(c.framing()));
    let expected = "x∘s = x, s∘s = id, s'(0) = -1";
    out.push(
        match c
            .conjugate_series(INVOLUTION_WINDOW)
            .and_then(|s| s.verify(c))
        {
            Ok(()) => CheckRecord::check(name, params, expected, "holds", true),
            Err(e) => CheckRecord::error(name, params, expected, e),
        },
    );
}

fn display_reports(c: &FramedCurve, out: &mut Vec<CheckRecord>) {
    let f = c.framing();
    out.push(CheckRecord::report(
        "x-star-display",
        format!("{} printed f^f/(-1-f)^(-1-f) vs x(y*)", fp(f)),
        format_rational(&c.x_star_displayed()),
        format_rational(c.x_star()),
    ));
    let psi0 = PsiTable::new(f, 0).map(|t| t.form(0).scalar_z.to_string());
    out.push(CheckRecord::report(
        "psi0-base-display",
        format!("{} printed base case vs Ψ̂_0 in z", fp(f)),
        displayed_base_case(f),
        psi0.unwrap_or_else(|e| format!("error: {e}")),
    ));
}

fn compare(
    name: &str,
    params: String,
    gold: &CorrDiff,
    got: std::result::Result<&CorrDiff, &Error>,
) -> CheckRecord {
    match got {
        Ok(w) => CheckRecord::check(name, params, gold, w, w == gold),
        Err(e) => CheckRecord::error(name, params, gold, e),
    }
}

fn goldens(session: &Session, c: &FramedCurve, out: &mut Vec<CheckRecord>) {
    let f = c.framing();
    for (g, h) in [(0, 3), (0, 4), (1, 1), (2, 1)] {
        let gold = golden::golden(g, h, f).expect("golden exists");
        let w = session.store.correlator(c, g, h);
        out.push(compare("golden", fgh(f, g, h), &gold, w.as_deref()));
    }
    let name = "golden-w12-reading";
    let params = fgh(f, 1, 2);
    let expected = "at least one reading";
    out.push(match session.store.correlator(c, 1, 2) {
        Ok(w) => {
            let m = matching_w12_readings(&w);
            let names: Vec<String> = m.iter().map(|r| r.name()).collect();
            let actual = if names.is_empty() {
                format!("none ({w})")
            } else {
                names.join(",")
            };
            CheckRecord::check(name, params, expected, actual, !m.is_empty())
        }
        Err(e) => CheckRecord::error(name, params, expected, e),
    });
}

fn theta_residues(c: &FramedCurve, out: &mut Vec<CheckRecord>) {
    let f = c.framing();
    let psi = match PsiTable::new(f, THETA_TABLE_N) {
        Ok(p) => p,
        Err(e) => {
            out.push(CheckRecord::error("theta-residue", fp(f), "Ψ table", e));
            return;
        }
    };
    let mut all_cancel = true;
    for n in 0..=THETA_TABLE_N {
        let params = format!("{} n={n}", fp(f));
        match residue_theta_psi(c, &psi, n) {
            Ok(r) if n == 1 => {
                let mag = ff1(f).recip();
                out.push(CheckRecord::check(
                    "theta-residue",
                    params.clone(),
                    format!("±{}", format_rational(&mag)),
                    format_rational(&r),
                    r.abs() == mag,
                ));
                let sign = Sign::of(&r).map_or("0".to_string(), |s| s.to_string());
                out.push(CheckRecord::report(
                    "theta-residue-sign",
                    params,
                    "audited sign",
                    sign,
                ));
            }
            Ok(r) => out.push(CheckRecord::check(
                "theta-residue",
                params,
                "0",
                format_rational(&r),
                r.is_zero(),
            )),
            Err(e) => {
                all_cancel = false;
                out.push(CheckRecord::error(
                    "theta-residue",
                    params,
                    "rational residue",
                    e,
                ));
            }
        }
    }
    let log_present = theta_series(c, 2 * THETA_TABLE_N as i64 + 3).map(|t| !t.is_rational());
    out.push(CheckRecord::check(
        "log-cancellation",
        format!("{} n<={THETA_TABLE_N}", fp(f)),
        "ℓ present in θ, absent from every residue",
        match &log_present {
            Ok(p) => format!("ℓ in θ: {p}; residues rational: {all_cancel}"),
            Err(e) => format!("error: {e}"),
        },
        all_cancel && log_present == Ok(true),
    ));
}

fn lambda_coefficients(out: &mut Vec<CheckRecord>) {
    for g in LAMBDA_G_RANGE {
        let sign = if g % 2 == 1 { 1 } else { -1 };
        let expected = Poly::from_ints(&[0, sign, sign]);
        let params = format!("g={g} (coefficient in f)");
        out.push(match lambda_top_coefficient(g) {
            Ok(p) => CheckRecord::check(
                "lambda-top-coefficient",
                params,
                &expected,
                &p,
                p == expected,
            ),
            Err(e) => CheckRecord::error("lambda-top-coefficient", params, &expected, e),
        });
    }
}

fn support_bound(w: &CorrDiff) -> (bool, String) {
    let dim = moduli_dimension(w.g, w.h);
    let max_sum = w
        .coeffs
        .keys()
        .map(|k| k.iter().sum::<usize>() as i64)
        .max()
        .unwrap_or(0);
    let mut ok = max_sum <= dim;
    let mut detail = format!("max Σn = {max_sum}");
    if w.h == 1 && w.g >= 2 {
        let lo = w.coeffs.keys().map(|k| k[0]).min().unwrap_or(1);
        let hi = w.coeffs.keys().map(|k| k[0]).max().unwrap_or(1);
        ok &= lo >= 1 && hi as i64 <= 3 * w.g as i64 - 2;
        detail = format!("{detail}, n in [{lo},{hi}]");
    }
    (ok, detail)
}

fn stability_and_peel(session: &Session, c: &FramedCurve, g_max: u32, out: &mut Vec<CheckRecord>) {
    let f = c.framing();
    let store = &session.store;
    for (g, h) in probe_set(g_max) {
        let params = fgh(f, g, h);
        let base = match store.correlator(c, g, h) {
            Ok(w) => w,
            Err(e) => {
                out.push(CheckRecord::error(
                    "truncation-stability",
                    params,
                    "a correlator",
                    e,
                ));
                continue;
            }
        };
        let window = store.policy().initial(g, h) + STABILITY_EXTRA;
        let wide = store.compute_at_window(c, g, h, window);
        out.push(CheckRecord::check(
            "truncation-stability",
            format!("{params} window+{STABILITY_EXTRA}"),
            "identical coefficients",
            match &wide {
                Ok(w) if *w == *base => "identical".to_string(),
                Ok(w) => w.to_string(),
                Err(e) => format!("error: {e}"),
            },
            matches!(&wide, Ok(w) if *w == *base),
        ));
        let stats = store.step_stats().get(&(f, g, h)).cloned();
        out.push(CheckRecord::check(
            "peel-remainder",
            params.clone(),
            "zero remainder on every peel",
            match &stats {
                Some(s) => format!("{} peels, {} atoms, remainder 0", s.peels, s.atoms),
                None => "no step recorded".to_string(),
            },
            stats.is_some_and(|s| s.peels > 0),
        ));
        let (ok, detail) = support_bound(&base);
        out.push(CheckRecord::check(
            "support-bound",
            params,
            format!("Σn <= {}", moduli_dimension(g, h)),
            detail,
            ok,
        ));
    }
}

fn energy_and_brackets(
    session: &Session,
    curves: &[FramedCurve],
    g_max: u32,
    out: &mut Vec<CheckRecord>,
) {
    let store = &session.store;
    let mut rows = Vec::new();
    let mut dilatons: BTreeMap<u32, Vec<Rational>> = BTreeMap::new();
    for g in 2..=g_max {
        for c in curves {
            let f = c.framing();
            let params = format!("g={g} f={f}");
            match EnergyReport::compute(store, c, g) {
                Ok(r) => {
                    out.push(CheckRecord::check(
                        "free-energy-magnitude",
                        params.clone(),
                        format!("±{}", format_rational(&r.rhs.abs())),
                        format_rational(&r.f_direct),
                        r.magnitude_matches(),
                    ));
                    out.push(CheckRecord::check(
                        "free-energy-paths",
                        params.clone(),
                        format!("shortcut {}", format_rational(&r.f_shortcut)),
                        format!("direct {}", format_rational(&r.f_direct)),
                        r.paths_agree(),
                    ));
                    rows.push(r);
                }
                Err(e) => out.push(CheckRecord::error(
                    "free-energy-magnitude",
                    params.clone(),
                    "a value",
                    e,
                )),
            }
            match store.correlator(c, g, 1).and_then(|w| hodge_extract(&w)) {
                Ok(t) => dilatons.entry(g).or_default().push(t.normalized_dilaton()),
                Err(e) => out.push(CheckRecord::error(
                    "bracket-dilaton",
                    params,
                    "a bracket",
                    e,
                )),
            }
        }
    }
    if g_max >= 2 {
        let eps = global_epsilon(&rows);
        let show = |s: Option<Sign>| s.map_or("none".to_string(), |s| s.to_string());
        out.push(CheckRecord::check(
            "free-energy-epsilon",
            format!("g=2..{g_max}"),
            format!("one ε for all rows (session ε={})", show(session.epsilon)),
            show(eps),
            eps.is_some() && eps == session.epsilon,
        ));
        out.push(CheckRecord::check(
            "free-energy-framing-independence",
            format!("g=2..{g_max}"),
            "F identical across f",
            framing_independent(&rows),
            framing_independent(&rows),
        ));
    }
    for (g, vals) in dilatons {
        let target = rat_int(2 * g as i64 - 2) * lambda_triple(g);
        let same = vals.windows(2).all(|w| w[0] == w[1]);
        let mag = vals.first().is_some_and(|v| v.abs() == target);
        out.push(CheckRecord::check(
            "bracket-dilaton",
            format!("g={g} bracket[1]/(f(f+1))"),
            format!("f-independent, ±{}", format_rational(&target)),
            vals.iter()
                .map(format_rational)
                .collect::<Vec<_>>()
                .join(","),
            same && mag,
        ));
    }
}
