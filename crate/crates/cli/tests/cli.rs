//! End-to-end checks of the command-line surface: exit codes, output
//! formats, and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rdtoeplitz"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const BASE_CONFIG: &str = "\
sys.m = 2
sys.a = 3
sys.b = 1
bc.kind = neumann
region.l = 1,2
reaction.builtin_q = 1
lyapunov.p_m = 2
lyapunov.theta = auto
mesh.x = 1.0
mesh.n_cells = 64
time.t_final = 0.5
time.dt = auto
time.sample_every = 8
seed = 42
";

#[test]
fn spectrum_parabolic_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["spectrum", "-m", "2", "-a", "3", "-b", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PARABOLIC"), "{text}");
    assert!(text.contains("4.000000000000"), "{text}");
    assert!(text.contains("2.000000000000"), "{text}");
}

#[test]
fn spectrum_non_parabolic_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["spectrum", "-m", "9", "-a", "1", "-b", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("NOT PARABOLIC"));
}

#[test]
fn spectrum_invalid_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["spectrum", "-m", "1", "-a", "3", "-b", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(dir.path(), &["spectrum", "-m", "2", "-a", "0", "-b", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn regions_enumerates_and_audits() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["regions", "-m", "2", "--u0", "2,1", "--beta", "1,0"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    let first = text.lines().next().unwrap();
    assert!(first.contains("L={1,2} Z={}"), "{first}");
    assert!(first.contains("inside"), "{first}");
    assert!(first.contains("compatible"), "{first}");
    // data (2,1) is inside only the all-plus cone
    let inside_count = text.lines().filter(|l| l.contains(" inside")).count();
    assert_eq!(inside_count, 1, "{text}");
}

#[test]
fn certify_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "certify", "-m", "2", "-a", "3", "-b", "1", "-p", "2", "-o", "cert.txt",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let cert = std::fs::read_to_string(dir.path().join("cert.txt")).unwrap();
    assert!(cert.contains("theta = 1.102500000000"), "{cert}");
    assert!(cert.contains("result = SATISFIED"), "{cert}");

    // non-parabolic input is a validation error
    let out = run_in(
        dir.path(),
        &["certify", "-m", "9", "-a", "1", "-b", "1", "-p", "2"],
    );
    assert_eq!(out.status.code(), Some(2));

    // degree below two is a validation error
    let out = run_in(
        dir.path(),
        &["certify", "-m", "2", "-a", "3", "-b", "1", "-p", "1"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_produces_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.conf"), BASE_CONFIG).unwrap();
    let out = run_in(dir.path(), &["simulate", "-c", "run.conf", "-o", "a.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out2 = run_in(dir.path(), &["simulate", "-c", "run.conf", "-o", "b.csv"]);
    assert_eq!(out2.status.code(), Some(0));
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "identical config + seed must be byte-identical");

    let text = String::from_utf8(a).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, "t,L,Z,supnorm,minw_1,minw_2,mass_1,mass_2");
    // the functional column is finite, nonnegative, and nonincreasing for
    // this dissipative configuration
    let mut prev = f64::INFINITY;
    for line in text.lines().skip(1) {
        let l: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(l.is_finite() && l >= 0.0);
        assert!(l <= prev + 1e-10, "functional rose from {prev} to {l}");
        prev = l;
    }
}

#[test]
fn simulate_rejects_out_of_region_data() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{BASE_CONFIG}init.w = -1,1\n");
    std::fs::write(dir.path().join("bad.conf"), config).unwrap();
    let out = run_in(dir.path(), &["simulate", "-c", "bad.conf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("region membership failed"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn simulate_reports_blow_up_with_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    // quadratic self-amplifying reaction: violates the dissipation
    // inequality, blows up at t = 1 with unit data
    std::fs::write(dir.path().join("react.txt"), "1 1.0 2 0\n2 1.0 0 2\n").unwrap();
    let config = "\
sys.m = 2
sys.a = 3
sys.b = 1
bc.kind = neumann
reaction.file = react.txt
lyapunov.p_m = 2
lyapunov.theta = auto
mesh.x = 1.0
mesh.n_cells = 64
time.t_final = 2.5
init.w = 1,1
seed = 1
";
    std::fs::write(dir.path().join("blow.conf"), config).unwrap();
    let out = run_in(
        dir.path(),
        &["simulate", "-c", "blow.conf", "-o", "blow.csv"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("BLOW-UP"), "{text}");
    let t_max: f64 = text
        .lines()
        .find(|l| l.contains("T_max"))
        .and_then(|l| l.split('=').nth(1))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(t_max < 2.0, "T_max = {t_max}");
}

#[test]
fn simulate_rejects_unknown_keys_and_bad_theta() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{BASE_CONFIG}mystery.key = 1\n");
    std::fs::write(dir.path().join("unknown.conf"), config).unwrap();
    let out = run_in(dir.path(), &["simulate", "-c", "unknown.conf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key"), "{}", stderr(&out));

    // explicit weights that fail the condition exit 1
    let config = BASE_CONFIG.replace("lyapunov.theta = auto", "lyapunov.theta = 1.0");
    std::fs::write(dir.path().join("badtheta.conf"), config).unwrap();
    let out = run_in(dir.path(), &["simulate", "-c", "badtheta.conf"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}
