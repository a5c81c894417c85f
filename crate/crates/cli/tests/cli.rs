use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const PRICES: &str = "\
ticker,date,close
AAA,2024-01-02,10
AAA,2024-01-03,10.5
AAA,2024-01-05,11
BBB,2024-01-02,20
BBB,2024-01-04,21
BBB,2024-01-05,20.5
";

fn mscorr(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mscorr"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn clean_and_returns() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), PRICES).unwrap();
    ok(&mscorr(&["clean", "--prices", "p.csv", "--out-dir", "c"], dir.path()));
    let panel = fs::read_to_string(dir.path().join("c/panel.csv")).unwrap();
    assert_eq!(
        panel,
        "date,AAA,BBB\n2024-01-02,10,20\n2024-01-03,10.5,20\n2024-01-04,10.5,21\n2024-01-05,11,20.5\n"
    );
    let mask = fs::read_to_string(dir.path().join("c/fill_mask.csv")).unwrap();
    assert_eq!(mask.lines().nth(3), Some("2024-01-04,1,0"));
    ok(&mscorr(&["returns", "--panel", "c/panel.csv", "--out", "r.csv"], dir.path()));
    let r = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(r.lines().count(), 4);
    assert!(dir.path().join("r.means.csv").exists());

    // three returns are far too short for horizons up to 19
    let out = mscorr(&["scaling", "--returns", "r.csv", "--out", "s.csv"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn staged_pipeline_from_synthetic_market() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&mscorr(
        &[
            "synth", "--set", "kind=coupled", "--set", "stocks=12", "--set", "days=512", "--set", "seed=4",
            "--out", "ret.csv", "--caps-out", "caps.csv",
        ],
        d,
    ));
    ok(&mscorr(
        &["scaling", "--returns", "ret.csv", "--tau-range", "1..10", "--q-grid", "0.2:0.2:1.0", "--out", "scaling.csv"],
        d,
    ));
    let scaling = fs::read_to_string(d.join("scaling.csv")).unwrap();
    assert!(scaling.starts_with("ticker,A_hat,B_hat,fit_rss,zeta_0.2,"));
    assert_eq!(scaling.lines().count(), 13);

    ok(&mscorr(&["xcorr", "--returns", "ret.csv", "--significance-mode", "all", "--out-dir", "x"], d));
    ok(&mscorr(
        &["associate", "--scaling", "scaling.csv", "--rho-bar", "x/rho_bar.csv", "--caps", "caps.csv", "--out-dir", "a"],
        d,
    ));
    let kv = fs::read_to_string(d.join("a/report.kv")).unwrap();
    assert!(kv.contains("capitalization_block=available"));
    assert!(kv.contains("kendall_B_rho_bar.pvalue="));

    ok(&mscorr(&["surrogate", "--returns", "ret.csv", "--kind", "shuffle", "--seed", "2", "--out", "sh.csv"], d));
    let meta = fs::read_to_string(d.join("sh.meta.txt")).unwrap();
    assert!(meta.contains("seed=2"));
    ok(&mscorr(&["surrogate", "--returns", "ret.csv", "--kind", "gaussianize", "--out", "g.csv"], d));
}

#[test]
fn run_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("run.cfg"),
        "# small coupled market\nsynth.kind = coupled\nsynth.stocks = 10\nsynth.days = 400\nseed = 5\noutput = raw\n",
    )
    .unwrap();
    ok(&mscorr(&["run", "--config", "run.cfg"], d));
    ok(&mscorr(&["run", "--config", "run.cfg", "--mode", "shuffled", "--output", "shuf"], d));
    for f in ["manifest.txt", "report.kv", "scatter_B.csv", "rho.csv"] {
        assert!(d.join("raw").join(f).exists(), "{}", f);
    }
    assert!(d.join("shuf/surrogate.txt").exists());
    let out = mscorr(&["compare", "raw/report.kv", "shuf/report.kv"], d);
    ok(&out);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().next().unwrap().starts_with("statistic,"));
    assert!(csv.contains("kendall_B_rho_bar,"));

    // same config, same bytes
    ok(&mscorr(&["run", "--config", "run.cfg", "--output", "raw2"], d));
    for f in ["manifest.txt", "report.kv", "rho.csv", "scaling.csv"] {
        assert_eq!(fs::read(d.join("raw").join(f)).unwrap(), fs::read(d.join("raw2").join(f)).unwrap());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // missing input file
    assert_eq!(mscorr(&["clean", "--prices", "nope.csv"], d).status.code(), Some(1));
    // malformed row
    fs::write(d.join("bad.csv"), "AAA,2024-01-02,10\nAAA,not-a-date,11\n").unwrap();
    assert_eq!(mscorr(&["clean", "--prices", "bad.csv"], d).status.code(), Some(1));
    // unknown config key
    fs::write(d.join("bad.cfg"), "colour = blue\n").unwrap();
    assert_eq!(mscorr(&["run", "--config", "bad.cfg"], d).status.code(), Some(2));
    // no input source
    assert_eq!(mscorr(&["run"], d).status.code(), Some(2));
    // k out of range
    fs::write(d.join("p.csv"), PRICES).unwrap();
    assert_eq!(mscorr(&["clean", "--prices", "p.csv", "--k", "1.5"], d).status.code(), Some(2));
}
