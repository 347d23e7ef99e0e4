use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn splitdg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitdg")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn sorted_lines(path: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_to_string(path).unwrap().lines().map(String::from).collect();
    v.sort();
    v
}

const GL_CONSERVATIVE: &str = "mode = \"spectrum\"\nn = 5\nk = 8\ntheta = 0\nalpha = [0.0, 0.5, 1.0]\nspeed = \"bump\"\n";

#[test]
fn spectrum_mode_writes_one_csv_per_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "gl.toml", GL_CONSERVATIVE);
    let out = dir.path().join("out");
    let r = splitdg(&["run", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let stdout = String::from_utf8(r.stdout).unwrap();
    assert!(stdout.contains("alpha1: ") && stdout.lines().any(|l| l.starts_with("alpha1:") && l.contains("stable=true")));
    assert!(stdout.lines().any(|l| l.starts_with("alpha0:") && l.contains("stable=false")));
    for a in ["0", "0.5", "1"] {
        let text = fs::read_to_string(out.join(format!("spectrum_alpha{a}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("re,im,re_scaled,im_scaled"));
        assert_eq!(lines.clone().count(), 8 * 6);
        for field in lines.next().unwrap().split(',') {
            let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
            assert!(!field.contains(','));
        }
    }
    let svg = fs::read_to_string(out.join("spectrum.svg")).unwrap();
    for i in 0..3 {
        assert!(svg.contains(&format!("class=\"marker s{i}\"")));
    }
    assert!(!svg.contains("class=\"marker s3\""));
    assert!(svg.contains("scaled by"));
}

#[test]
fn constant_speed_spectra_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "const.toml",
        "n = 5\nk = 20\nalpha = [0.0, 0.5, 1.0]\nspeed = \"constant\"\nspeed_value = 1.0\nsvg = false\n",
    );
    let out = dir.path().join("out");
    assert_eq!(splitdg(&["run", &cfg, "--out-dir", out.to_str().unwrap()]).status.code(), Some(0));
    let reference = sorted_lines(&out.join("spectrum_alpha0.csv"));
    assert_eq!(sorted_lines(&out.join("spectrum_alpha0.5.csv")), reference);
    assert_eq!(sorted_lines(&out.join("spectrum_alpha1.csv")), reference);
    assert!(!out.join("spectrum.svg").exists());
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "m.toml",
        "mode = \"march\"\nk = 6\nn = 4\nalpha = 0.5\nt_final = 0.5\ninitial = \"random\"\n",
    );
    let mut files = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let r = splitdg(&["run", &cfg, "--out-dir", out.to_str().unwrap(), "--seed", "42"]);
        assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
        files.push(
            ["energy.csv", "state.csv", "energy.svg"]
                .map(|f| fs::read(out.join(f)).unwrap()),
        );
    }
    assert_eq!(files[0], files[1]);
    let energy = String::from_utf8(files[0][0].clone()).unwrap();
    assert!(energy.starts_with("t,E_a,E_inv_a,E_L2,bound_rhs\n"));
    assert!(String::from_utf8(files[0][1].clone()).unwrap().starts_with("x,u\n"));

    // a different seed changes the random initial state
    let out = dir.path().join("c");
    splitdg(&["run", &cfg, "--out-dir", out.to_str().unwrap(), "--seed", "43"]);
    assert_ne!(fs::read(out.join("state.csv")).unwrap(), files[0][1]);
}

#[test]
fn sweep_writes_one_row_per_case() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "family = [\"gauss-lobatto\", \"gauss\"]\nn = 5\nk = 20\ntheta = [0, 1]\nalpha = [0.0, 1.0]\n",
    );
    let out = dir.path().join("out");
    let r = splitdg(&["sweep", &cfg, "--out-dir", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,n,k,theta,alpha,max_re,stable,gamma");
    assert_eq!(lines.len(), 1 + 8);
    let stable: Vec<&str> = lines[1..].iter().filter(|l| l.contains(",true,")).copied().collect();
    assert_eq!(stable.len(), 2, "{text}");
    assert!(stable.iter().all(|l| l.starts_with("gl,")));
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "n = 5\nalpha = 2.0\n");
    let r = splitdg(&["run", &bad]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("alpha"));

    let unknown = write(dir.path(), "unknown.toml", "n = 5\nwidth = 3\n");
    let r = splitdg(&["run", &unknown]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 2"));

    let poly = write(dir.path(), "poly.toml", "speed = \"poly\"\nspeed_coeffs = [0.5, -1.0]\n");
    assert_eq!(splitdg(&["run", &poly]).status.code(), Some(1));

    let cfl = write(dir.path(), "cfl.toml", "mode = \"march\"\ndt = 0.5\nt_final = 1.0\n");
    let r = splitdg(&["run", &cfl]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("CFL"));

    assert_eq!(splitdg(&["run", "/nonexistent/x.toml"]).status.code(), Some(1));
    assert_eq!(splitdg(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn violated_bound_exits_with_two() {
    // Gauss nodes, α = 1 on the conservative equation: the envelope is flat
    // while the operator has growing modes.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.toml",
        "mode = \"march\"\nfamily = \"gauss\"\nk = 10\nalpha = 1.0\nt_final = 2.0\ninitial = \"random\"\nsvg = false\n",
    );
    let out = dir.path().join("out");
    let r = splitdg(&["run", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stdout));
    assert!(out.join("energy.csv").exists());
}

#[test]
fn verify_suite_passes_and_filters() {
    let r = splitdg(&["verify"]);
    let stdout = String::from_utf8(r.stdout).unwrap();
    assert_eq!(r.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("0 failed"));
    assert!(!stdout.contains("FAIL"));

    let r = splitdg(&["verify", "--filter", "sbp"]);
    let stdout = String::from_utf8(r.stdout).unwrap();
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout.starts_with("sbp-identity"));
    assert!(stdout.contains("1 checks"));

    assert_eq!(splitdg(&["verify", "--filter", "no-such-check"]).status.code(), Some(2));
}
