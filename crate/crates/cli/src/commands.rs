use std::fmt::Write as _;

use num_traits::Signed;
use serde::Serialize;

use c3tr::arith::{format_rational, rat_int};
use c3tr::conventions::{Conventions, Sign};
use c3tr::curve::FramedCurve;
use c3tr::energy::{framing_independent, global_epsilon, EnergyReport, EnergyReportJson};
use c3tr::hodge::{hodge_extract, lambda_triple, HodgeTableJson};
use c3tr::recursion::CorrDiffJson;
use c3tr::session::{RunConfig, Session};
use c3tr::verify::run_verify;
use c3tr::{Error, Result};

/// Rendered output and whether every check it carries passed.
pub struct Outcome {
    pub body: String,
    pub pass: bool,
    pub cache_rejects: usize,
}

#[derive(Serialize)]
struct ConventionsJson {
    sign_kernel: Sign,
    sign_psirec: Sign,
    epsilon: Option<Sign>,
    line: String,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    conventions: ConventionsJson,
    #[serde(flatten)]
    body: T,
}

fn conventions_json(s: &Session) -> ConventionsJson {
    let c: Conventions = s.conventions;
    ConventionsJson {
        sign_kernel: c.sign_kernel,
        sign_psirec: c.sign_psirec,
        epsilon: s.epsilon,
        line: s.conventions_line(),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn curves(config: &RunConfig) -> Result<Vec<FramedCurve>> {
    config
        .framings
        .iter()
        .map(|&f| FramedCurve::new(f))
        .collect()
}

/// Runs `job` for every framing concurrently and returns results in framing order.
fn per_framing<T: Send>(curves: &[FramedCurve], job: impl Fn(&FramedCurve) -> T + Sync) -> Vec<T> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = curves.iter().map(|c| scope.spawn(|| job(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn outcome(session: &Session, body: String, pass: bool) -> Outcome {
    Outcome {
        body,
        pass,
        cache_rejects: session.store.cache_rejects(),
    }
}

#[derive(Serialize)]
struct CorrelatorOut {
    correlators: Vec<CorrDiffJson>,
}

pub fn correlator(mut config: RunConfig, g: u32, h: u32, text: bool) -> Result<Outcome> {
    // fail fast, before any calibration work
    if !c3tr::recursion::is_stable(g, h) {
        return Err(Error::UnstableCorrelator {
            g: g.into(),
            h: h.into(),
        });
    }
    if g > config.g_cap {
        return Err(Error::InvalidGenus(g.into()));
    }
    if h > config.h_max {
        return Err(Error::OutOfRange(format!(
            "h={h} exceeds h_max={}",
            config.h_max
        )));
    }
    config.g_max = config.g_max.min(config.g_cap);
    let session = Session::open(config)?;
    let cs = curves(&session.config)?;
    let results = per_framing(&cs, |c| session.store.correlator(c, g, h));
    let mut ws = Vec::new();
    for r in results {
        ws.push(r?);
    }
    let body = if text {
        let mut s = format!("{}\n", session.conventions_line());
        for w in &ws {
            writeln!(s, "{w}").unwrap();
        }
        s
    } else {
        to_json(&Envelope {
            conventions: conventions_json(&session),
            body: CorrelatorOut {
                correlators: ws.iter().map(|w| w.to_json(session.conventions)).collect(),
            },
        })
    };
    Ok(outcome(&session, body, true))
}

#[derive(Serialize)]
struct EnergyRowJson {
    g: u32,
    f: i64,
    report: Option<EnergyReportJson>,
    error: Option<String>,
    pass: bool,
}

#[derive(Serialize)]
struct GenusSummaryJson {
    g: u32,
    framing_independent: bool,
}

#[derive(Serialize)]
struct FreeEnergyOut {
    rows: Vec<EnergyRowJson>,
    genera: Vec<GenusSummaryJson>,
    global_epsilon: Option<Sign>,
    all_pass: bool,
}

pub fn free_energy(config: RunConfig, text: bool) -> Result<Outcome> {
    if config.g_max < 2 {
        return Err(Error::InvalidGenus(config.g_max.into()));
    }
    let session = Session::open(config)?;
    let cs = curves(&session.config)?;
    let g_max = session.config.g_max;
    let per_f = per_framing(&cs, |c| {
        (2..=g_max)
            .map(|g| (g, c.framing(), EnergyReport::compute(&session.store, c, g)))
            .collect::<Vec<_>>()
    });
    let mut cells: Vec<_> = per_f.into_iter().flatten().collect();
    cells.sort_by_key(|(g, f, _)| (*g, *f));
    let ok: Vec<EnergyReport> = cells
        .iter()
        .filter_map(|(_, _, r)| r.as_ref().ok().cloned())
        .collect();
    let eps = global_epsilon(&ok);
    let genera: Vec<GenusSummaryJson> = (2..=g_max)
        .map(|g| {
            let rows: Vec<_> = ok.iter().filter(|r| r.g == g).cloned().collect();
            GenusSummaryJson {
                g,
                framing_independent: framing_independent(&rows),
            }
        })
        .collect();
    let independent = |g: u32| genera.iter().any(|s| s.g == g && s.framing_independent);
    let rows: Vec<EnergyRowJson> = cells
        .iter()
        .map(|(g, f, r)| match r {
            Ok(r) => EnergyRowJson {
                g: *g,
                f: *f,
                pass: r.paths_agree() && r.magnitude_matches() && independent(*g),
                report: Some(r.to_json()),
                error: None,
            },
            Err(e) => EnergyRowJson {
                g: *g,
                f: *f,
                report: None,
                error: Some(e.to_string()),
                pass: false,
            },
        })
        .collect();
    let all_pass = rows.iter().all(|r| r.pass) && eps.is_some();
    let body = if text {
        let mut s = format!("{}\n", session.conventions_line());
        for r in &rows {
            match &r.report {
                Some(j) => writeln!(
                    s,
                    "g={} f={} F_direct={} F_shortcut={} |F|={} rhs={} ε={} {}",
                    r.g,
                    r.f,
                    j.f_direct,
                    j.f_shortcut,
                    j.abs_f,
                    j.rhs,
                    j.sign_epsilon.map_or("none".into(), |e| e.to_string()),
                    if r.pass { "PASS" } else { "FAIL" }
                ),
                None => writeln!(
                    s,
                    "g={} f={} error: {} FAIL",
                    r.g,
                    r.f,
                    r.error.as_deref().unwrap_or("")
                ),
            }
            .unwrap();
        }
        for gs in &genera {
            writeln!(
                s,
                "g={} framing-independent={}",
                gs.g, gs.framing_independent
            )
            .unwrap();
        }
        writeln!(
            s,
            "global ε={}",
            eps.map_or("none".into(), |e| e.to_string())
        )
        .unwrap();
        s
    } else {
        to_json(&Envelope {
            conventions: conventions_json(&session),
            body: FreeEnergyOut {
                rows,
                genera,
                global_epsilon: eps,
                all_pass,
            },
        })
    };
    Ok(outcome(&session, body, all_pass))
}

pub fn verify(config: RunConfig, text: bool) -> Result<Outcome> {
    let session = Session::open(config)?;
    let report = run_verify(&session);
    let body = if text {
        report.to_text()
    } else {
        to_json(&report.to_json())
    };
    Ok(outcome(&session, body, report.all_pass()))
}

#[derive(Serialize)]
struct HodgeOut {
    g: u32,
    tables: Vec<HodgeTableJson>,
    /// `bracket[1]/(f(f+1))` equal across framings.
    dilaton_framing_independent: bool,
    /// `|bracket[1]/(f(f+1))| = (2g-2) λ-triple`, for `g >= 2`.
    dilaton_matches: Option<bool>,
}

pub fn hodge(config: RunConfig, g: u32, text: bool) -> Result<Outcome> {
    if g < 1 || g > config.g_cap {
        return Err(Error::InvalidGenus(g.into()));
    }
    let session = Session::open(config)?;
    let cs = curves(&session.config)?;
    let results = per_framing(&cs, |c| {
        session
            .store
            .correlator(c, g, 1)
            .and_then(|w| hodge_extract(&w))
    });
    let mut tables = Vec::new();
    for r in results {
        tables.push(r?);
    }
    let same = tables
        .windows(2)
        .all(|w| w[0].normalized_dilaton() == w[1].normalized_dilaton());
    let matches = (g >= 2).then(|| {
        let target = rat_int(2 * g as i64 - 2) * lambda_triple(g);
        tables
            .iter()
            .all(|t| t.normalized_dilaton().abs() == target)
    });
    let pass = same && matches.unwrap_or(true);
    let body = if text {
        let mut s = format!("{}\n", session.conventions_line());
        for t in &tables {
            write!(s, "g={} f={}:", t.g, t.f).unwrap();
            for (n, c) in &t.bracket {
                write!(s, " bracket[{n}]={}", format_rational(c)).unwrap();
            }
            writeln!(
                s,
                " bracket[1]/(f(f+1))={}",
                format_rational(&t.normalized_dilaton())
            )
            .unwrap();
        }
        writeln!(s, "framing-independent={same}").unwrap();
        if let Some(m) = matches {
            let target = rat_int(2 * g as i64 - 2) * lambda_triple(g);
            writeln!(s, "matches ±{}: {m}", format_rational(&target)).unwrap();
        }
        s
    } else {
        to_json(&Envelope {
            conventions: conventions_json(&session),
            body: HodgeOut {
                g,
                tables: tables
                    .iter()
                    .map(|t| t.to_json(session.conventions))
                    .collect(),
                dilaton_framing_independent: same,
                dilaton_matches: matches,
            },
        })
    };
    Ok(outcome(&session, body, pass))
}
