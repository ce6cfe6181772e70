use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn vtheat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vtheat"))
        .args(args)
        .env_remove("VTHEAT_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn eval_at_origin_matches_closed_form() {
    // density s: u(0, 1) = 1 / (2 pi)
    let o = vtheat(&["eval", "--r", "0", "--t", "1"]);
    assert!(o.status.success());
    let u = field(&stdout(&o), "u");
    assert!((u * 2.0 * PI - 1.0).abs() < 1e-9, "{u}");
}

#[test]
fn eval_reports_underflow_with_finite_log() {
    let o = vtheat(&[
        "eval",
        "--r",
        "100",
        "--theta",
        "3.141592653589793",
        "--t",
        "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("u = underflow"), "{text}");
    let ln = field(&text, "ln_u");
    assert!(ln < -2400.0 && ln.is_finite());
}

#[test]
fn weber_closed_forms() {
    // D_{-1}(0) = sqrt(pi / 2), D_{-2}(0) = 1
    let a = field(
        &stdout(&vtheat(&["weber", "--nu", "-1", "--z", "0"])),
        "value",
    );
    assert!((a - (PI / 2.0).sqrt()).abs() < 1e-12);
    let b = field(
        &stdout(&vtheat(&["weber", "--nu", "-2", "--z", "0"])),
        "value",
    );
    assert!((b - 1.0).abs() < 1e-12);
    let neg = vtheat(&["weber", "--nu", "-1.5", "--z", "-9"]);
    assert!(neg.status.success());
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.cfg",
        "measure.alpha = 0.3\ngeometry.theta0 = 1.25\nsweep.steps = 7\nrecover.radii = [1, 3]\n",
    );
    let first = stdout(&vtheat(&["--config", &cfg, "--dump-config"]));
    assert!(first.contains("measure.alpha = 0.3"));
    let again = write(dir.path(), "b.cfg", &first);
    let second = stdout(&vtheat(&["--config", &again, "--dump-config"]));
    assert_eq!(first, second);
}

#[test]
fn validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        write(dir.path(), "unknown.cfg", "eval.colour = 3\n"),
        write(dir.path(), "dup.cfg", "measure.a0 = 1\nmeasure.a0 = 2\n"),
        write(dir.path(), "deg.cfg", "geometry.theta0 = 90deg\n"),
        write(dir.path(), "nan.cfg", "measure.a0 = nan\n"),
        write(dir.path(), "alpha.cfg", "measure.alpha = -1\n"),
    ];
    for cfg in &cases {
        let o = vtheat(&["--config", cfg, "eval", "--r", "1", "--t", "1"]);
        assert_eq!(o.status.code(), Some(1), "{cfg}: {o:?}");
        assert!(!o.stderr.is_empty());
    }
    for args in [
        vec!["eval", "--r", "-1", "--t", "1"],
        vec!["eval", "--r", "1", "--t", "0"],
        vec!["weber", "--nu", "0.5", "--z", "1"],
        vec!["weber", "--nu", "-1", "--z", "1", "--method", "guess"],
        vec!["--config", "/nonexistent/vtheat.cfg", "sweep"],
        vec!["frobnicate"],
    ] {
        assert_eq!(vtheat(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn sweep_and_audit_need_a_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.cfg",
        "measure.kind = atoms\nmeasure.atoms = [[1, 1]]\n",
    );
    for cmd in ["sweep", "audit"] {
        assert_eq!(vtheat(&["--config", &cfg, cmd]).status.code(), Some(1));
    }
}

#[test]
fn sweep_is_deterministic_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", "sweep.delta = 0.4\nsweep.steps = 6\n");
    let run = |jobs: &str| {
        let o = vtheat(&["--config", &cfg, "--jobs", jobs, "sweep"]);
        assert!(o.status.success());
        o.stdout
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    assert_eq!(one, run("3"));
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("r,ln_u_quad,ln_u_asym,ratio,quad_error_flag\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn tsv_output_goes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.tsv");
    let cfg = write(
        dir.path(),
        "t.cfg",
        &format!("output.format = tsv\noutput.path = {}\n", out.display()),
    );
    let o = vtheat(&["--config", &cfg, "sweep"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("r\tln_u_quad\t"));
}

#[test]
fn audit_passes_on_model_and_fails_off_model() {
    let o = vtheat(&["audit"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(stdout(&o).contains("# verdict PASS"));

    let dir = tempfile::tempdir().unwrap();
    let csv = write(
        dir.path(),
        "off.csv",
        "r,ln_u_quad,ln_u_asym,ratio,quad_error_flag\n10,1,0,1,0\n20,-3,0,1,0\n40,7,0,1,0\n80,-2,0,1,0\n",
    );
    let o = vtheat(&["audit", "--input", &csv]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("# verdict FAIL"));
}

#[test]
fn recover_reports_exponent_for_power_law() {
    let dir = tempfile::tempdir().unwrap();
    // density 2s, so n(s) = s^2
    let cfg = write(dir.path(), "r.cfg", "measure.a0 = 2\nmeasure.alpha = 1\n");
    let o = vtheat(&["--config", &cfg, "recover"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("alpha_hat=")).unwrap();
    let alpha: f64 = line.rsplit('=').next().unwrap().parse().unwrap();
    assert!((alpha - 2.0).abs() < 1e-6, "{line}");
    assert!(text.contains("\nr,extrapolated_mass,diagnostic\n"));
}

#[test]
fn recover_on_zero_measure_skips_the_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "z.cfg", "measure.a0 = 0\n");
    let o = vtheat(&["--config", &cfg, "recover"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("fit skipped"));
    assert!(text.contains("absolute_error=0.0000000000000000e0"));
}

#[test]
fn recover_on_atoms_finds_the_step_heights() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.cfg",
        "measure.kind = atoms\nmeasure.atoms = [[1, 2], [3, 0.5]]\n",
    );
    let text = stdout(&vtheat(&["--config", &cfg, "recover"]));
    let block: Vec<&str> = text
        .split("r,extrapolated_mass,diagnostic\n")
        .nth(1)
        .unwrap()
        .lines()
        .take_while(|l| !l.starts_with('#'))
        .collect();
    let masses: Vec<f64> = block
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for (m, want) in masses.iter().zip([2.0, 2.5, 2.5]) {
        assert!((m - want).abs() < 1e-5, "{m} vs {want}");
    }
}

#[test]
fn selftest_passes_and_detects_mutations() {
    let o = vtheat(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    for m in ["wrong-constant", "linear-accumulation"] {
        let o = vtheat(&["selftest", "--inject", m]);
        assert_eq!(o.status.code(), Some(2), "{m}");
        assert!(stdout(&o).contains("FAIL"));
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(vtheat(&["--help"]).status.code(), Some(0));
    assert_eq!(vtheat(&["eval", "--help"]).status.code(), Some(0));
}
