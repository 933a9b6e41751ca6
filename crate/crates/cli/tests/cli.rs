use std::path::{Path, PathBuf};
use std::process::Command;

use cfinsler_cli::config::{Command as Sub, Constants, Format, Ref, RunConfig};
use cfinsler_cli::execute;
use cfinsler_cli::report::RunReport;
use cfinsler_core::equivalence::Verdict;
use cfinsler_core::geometry::DomainDescriptor;
use cfinsler_core::metric_spec::MetricDescriptor;

fn ball(n: usize) -> DomainDescriptor {
    DomainDescriptor::Ball { dimension: n, radius: 1.0, center: None }
}

fn seeded(domain: DomainDescriptor) -> RunConfig {
    let mut c = RunConfig::minimal(domain);
    c.seed = Some(11);
    c.samples = 60;
    c
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cfinsler"))
}

fn write_config(dir: &Path, name: &str, cfg: &RunConfig) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, toml::to_string(cfg).unwrap()).unwrap();
    p
}

#[test]
fn ball_bergman_curvature_is_constant() {
    let report = execute(Sub::Curvature, &seeded(ball(2)), Path::new(".")).unwrap();
    let t = report.table("curvature").unwrap();
    for (sec, ric) in t.column("sec").unwrap().iter().zip(t.column("ric").unwrap()) {
        assert!((sec + 2.0 / 3.0).abs() < 1e-8, "{sec}");
        assert!((ric + 1.0).abs() < 1e-8);
    }
    for hsc in t.column("hsc").unwrap() {
        assert!((hsc + 4.0 / 3.0).abs() < 1e-6, "{hsc}");
    }
    assert_eq!(report.check("bracket").unwrap().verdict, Verdict::Pass);
    assert_eq!(report.exit_code(), 0);
}

#[test]
fn flat_metric_has_zero_curvature() {
    let mut cfg = seeded(ball(2));
    cfg.metric = Some(Ref::Inline(MetricDescriptor::Flat {}));
    let report = execute(Sub::Curvature, &cfg, Path::new(".")).unwrap();
    let t = report.table("curvature").unwrap();
    for name in ["sec", "ric", "scal", "hsc"] {
        assert!(t.column(name).unwrap().iter().all(|x| x.abs() < 1e-12), "{name}");
    }
    assert!(report.checks.is_empty());
}

#[test]
fn oversized_mixing_constant_is_a_precondition_violation() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = seeded(ball(2));
    cfg.checks = Some(vec!["sandwich".into()]);
    cfg.constants = Constants::Supplied { k: 0.8, a: 4.0 / 3.0, b: 4.0 / 3.0, c1: 4.0 / 3.0 };
    cfg.c = Some(1.0);
    let path = write_config(dir.path(), "run.toml", &cfg);
    let out = bin().arg("verify").arg("--config").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let report: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    let check = report.check("sandwich").unwrap();
    assert_eq!(check.verdict, Verdict::PreconditionViolation);
    assert!(check.message.contains("T6.4 window"), "{}", check.message);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = seeded(DomainDescriptor::Polydisk { radii: vec![1.0, 0.8] });
    cfg.checks = Some(vec!["T6.4".into(), "T6.5".into()]);
    let path = write_config(dir.path(), "run.toml", &cfg);
    let run = |fmt: &str| bin().args(["verify", "--format", fmt, "--config"]).arg(&path).output().unwrap();
    for fmt in ["records", "delimited"] {
        let (a, b) = (run(fmt), run(fmt));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{fmt}");
        assert_eq!(a.status.code(), b.status.code());
    }
    let other = bin().args(["verify", "--seed", "12", "--config"]).arg(&path).output().unwrap();
    assert_ne!(other.stdout, run("records").stdout);
}

#[test]
fn homogeneous_domains_squeeze_to_one() {
    for d in [ball(3), DomainDescriptor::ComplexEllipsoid { semiaxes: vec![1.0, 2.0] }] {
        let report = execute(Sub::Squeeze, &seeded(d), Path::new(".")).unwrap();
        let lower = report.table("squeezing").unwrap().column("lower").unwrap();
        assert!(lower.iter().all(|s| (s - 1.0).abs() < 1e-9), "{lower:?}");
        assert_eq!(report.exit_code(), 0);
    }
}

#[test]
fn polydisk_kobayashi_intervals_are_tight() {
    let report = execute(Sub::Kobayashi, &seeded(DomainDescriptor::Polydisk { radii: vec![1.0, 2.0] }), Path::new(".")).unwrap();
    let t = report.table("kobayashi").unwrap();
    assert!(t.column("width").unwrap().iter().all(|w| *w < 1e-6));
    assert_eq!(report.exit_code(), 0);
}

#[test]
fn reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = seeded(ball(2));
    cfg.output.path = Some(dir.path().join("out.json"));
    let path = write_config(dir.path(), "run.toml", &cfg);
    let status = bin().arg("squeeze").arg("--config").arg(&path).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("out.json")).unwrap();
    let report: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.render(Format::Records).unwrap(), text);
    assert_eq!(report.command, "squeeze");
}

#[test]
fn domain_files_are_resolved_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("disk.toml"), "kind = \"ball\"\ndimension = 1\nradius = 1.0\n").unwrap();
    let mut cfg = seeded(ball(1));
    cfg.domain = Ref::Path("disk.toml".into());
    let path = write_config(dir.path(), "run.toml", &cfg);
    let out = bin().arg("curvature").arg("--config").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.config.domain, Ref::Inline(ball(1)));
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "seed = 1\nsampels = 3\n[domain]\nkind = \"ball\"\ndimension = 2\nradius = 1.0\n").unwrap();
    let out = bin().arg("curvature").arg("--config").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampels"));
}

#[test]
fn missing_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "run.toml", &RunConfig::minimal(ball(2)));
    let out = bin().arg("squeeze").arg("--config").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    let ok = bin().args(["squeeze", "--seed", "3", "--config"]).arg(&path).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn config_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "env.toml", &seeded(ball(1)));
    let out = bin()
        .current_dir(std::env::temp_dir())
        .env("CFINSLER_CONFIG_DIR", dir.path())
        .args(["squeeze", "--config", "env.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

// The upper sandwich constant collapses to 1 on the ball, so the default suite
// reports a failure there rather than a clean pass.
#[test]
fn default_suite_on_the_ball() {
    let report = execute(Sub::Verify, &seeded(ball(2)), Path::new(".")).unwrap();
    for c in &report.checks {
        let expected = if c.name == "sandwich" { Verdict::Fail } else { Verdict::Pass };
        assert_eq!(c.verdict, expected, "{} {}", c.name, c.message);
    }
    assert_eq!(report.checks.len(), 10);
    assert_eq!(report.exit_code(), 1);
}

#[test]
fn checks_filter_by_name_or_tag() {
    let mut cfg = seeded(ball(2));
    cfg.checks = Some(vec!["t4.1".into(), "distance".into()]);
    let report = execute(Sub::Verify, &cfg, Path::new(".")).unwrap();
    let names: Vec<_> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["polarization", "pinching", "distance"]);
    cfg.checks = Some(vec!["nothing".into()]);
    assert!(execute(Sub::Verify, &cfg, Path::new(".")).is_err());
}

#[test]
fn shipped_examples_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        let (cfg, _) = cfinsler_cli::config::load_config(&p).unwrap();
        assert_eq!(cfg.version, cfinsler_cli::config::SCHEMA_VERSION);
        assert!(cfg.seed.is_some(), "{}", p.display());
    }
}
