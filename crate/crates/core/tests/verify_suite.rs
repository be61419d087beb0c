use c3tr::conventions::Sign;
use c3tr::session::{ConventionsRecord, Overrides, RunConfig, Session};
use c3tr::verify::{run_verify, Status};

fn config(framings: Vec<i64>, g_max: u32) -> RunConfig {
    RunConfig {
        framings,
        g_max,
        ..RunConfig::default()
    }
}

#[test]
fn default_conventions_pass_everything() {
    let session = Session::open(config(vec![1, 2], 3)).unwrap();
    let report = run_verify(&session);
    println!("{}", report.to_text());
    assert!(
        report.all_pass(),
        "{:#?}",
        report.failures().collect::<Vec<_>>()
    );
    assert_eq!(
        session.conventions_line(),
        "conventions: σ_K=-1, σ_Ψrec=+1, ε=-1"
    );
    assert!(report
        .by_name("x-star-display")
        .all(|r| r.status == Status::Report));
    assert!(report.by_name("golden").count() == 8);
}

#[test]
fn wrong_kernel_sign_fails_goldens() {
    let mut cfg = config(vec![1], 2);
    cfg.overrides = Overrides {
        sign_kernel: Some(Sign::Plus),
        sign_psirec: None,
    };
    let session = Session::open(cfg).unwrap();
    let report = run_verify(&session);
    assert!(!report.all_pass());
    let w03 = report
        .by_name("golden")
        .find(|r| r.params.contains("g=0 h=3"))
        .unwrap();
    assert_eq!(w03.status, Status::Fail);
}

#[test]
fn conventions_are_persisted_once() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(vec![1], 2);
    cfg.cache_dir = Some(dir.path().to_path_buf());
    let first = Session::open(cfg.clone()).unwrap();
    let rec = ConventionsRecord::load(dir.path()).unwrap();
    assert_eq!(rec.conventions, first.conventions);
    assert_eq!(rec.epsilon, Some(Sign::Minus));

    // an override is applied on top of, not written into, the record
    cfg.overrides.sign_kernel = Some(Sign::Plus);
    let second = Session::open(cfg).unwrap();
    assert_eq!(second.conventions.sign_kernel, Sign::Plus);
    assert_eq!(second.calibrated, first.conventions);
    assert_eq!(ConventionsRecord::load(dir.path()).unwrap(), rec);
}
