use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dislosim_core::analytic::StraightDislocation;
use dislosim_core::continuum::snapshot::GridSnapshot;
use dislosim_core::tensor::IsotropicElasticity;
use dislosim_core::{PeriodicCell, Vec3};

const SLIP: &str = r#"
[scenario]
name = "slip-plane"

[geometry]
lengths = [16.0, 16.0, 2.0]
resolution = [16, 16, 8]

[material]
lambda = 1.5
mu = 1.0

[mobility]
C = 1.0
gamma = 2.0

[loading.mean_stress]
t13 = 0.05

[slip]
burgers = [1.0, 0.0, 0.0]
normal = [0.0, 0.0, 1.0]

[initial]
shape = "disc"
center = [8.0, 8.0, 0.0]
radius = 4.0

[run]
dt = 0.5
t_end = 4.0
snapshot_every = 2
"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("case.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn dislosim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dislosim")).args(args).output().unwrap()
}

fn run(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    dislosim(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn grids(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "grid"))
        .collect();
    v.sort();
    v
}

#[test]
fn slip_plane_run_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SLIP);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let o = run(&cfg, d, &[]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let csv = std::fs::read(a.join("timeseries.csv")).unwrap();
    assert_eq!(csv, std::fs::read(b.join("timeseries.csv")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("t,psi,dissipation,max_div_residual,total_dislocation_weight\n"));
    assert_eq!(text.lines().count(), 1 + 9);
    let ga = grids(&a);
    assert_eq!(ga.len(), 5);
    for (x, y) in ga.iter().zip(grids(&b)) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn unloaded_empty_slip_plane_never_changes() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SLIP.replace("t13 = 0.05", "").replace("[initial]\nshape = \"disc\"\ncenter = [8.0, 8.0, 0.0]\nradius = 4.0\n", "");
    assert!(!text.contains("[initial]"));
    let cfg = write_config(tmp.path(), &text);
    let o = run(&cfg, tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = grids(tmp.path());
    assert_eq!(g.len(), 5);
    let first = std::fs::read(&g[0]).unwrap();
    for p in &g[1..] {
        assert_eq!(std::fs::read(p).unwrap(), first);
    }
}

#[test]
fn max_steps_truncates_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SLIP);
    let o = run(&cfg, tmp.path(), &["--max-steps", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(tmp.path().join("timeseries.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
}

#[test]
fn field_sample_snapshots_reload_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
[scenario]
name = "field-sample"

[geometry]
lengths = [4.0, 4.0, 1.0]
resolution = [8, 8, 8]

[material]
lambda = 1.5
mu = 1.0

[analytic]
b1 = 1.0
b3 = 0.5
"#,
    );
    let o = dislosim(&["field-sample", cfg.to_str().unwrap(), "--output-dir", tmp.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["stress.grid", "displacement.grid"] {
        let path = tmp.path().join(name);
        let bytes = std::fs::read(&path).unwrap();
        let snap = GridSnapshot::read(&path).unwrap();
        let mut again = Vec::new();
        snap.write_to(&mut again).unwrap();
        assert_eq!(again, bytes);
    }
    // spot-check one node against the library
    let cell = PeriodicCell::new([4.0, 4.0, 1.0], [8, 8, 8]).unwrap();
    let d = StraightDislocation::new(1.0, 0.5, IsotropicElasticity::new(1.5, 1.0).unwrap()).unwrap();
    let snap = GridSnapshot::read(&tmp.path().join("stress.grid")).unwrap();
    let idx = cell.index(3, 5, 2);
    let h = cell.spacing();
    let x = cell.position(idx) - Vec3::new(2.0 + 0.5 * h[0], 2.0 + 0.5 * h[1], 0.0);
    let t = d.stress(&x).unwrap().components();
    assert_eq!(&snap.data[6 * idx..6 * idx + 6], &t[..]);
}

#[test]
fn validate_reports_estimates() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SLIP);
    let o = dislosim(&["validate", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.starts_with("ok"), "{s}");
    assert!(s.contains("stable dt"), "{s}");
    assert!(s.contains("memory estimate"), "{s}");
}

fn expect_config_error(text: &str, needles: &[&str]) {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), text);
    let o = dislosim(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    for n in needles {
        assert!(stderr(&o).contains(n), "missing {n:?} in {}", stderr(&o));
    }
}

#[test]
fn validate_rejects_bad_configs() {
    expect_config_error(&SLIP.replace("[16, 16, 8]", "[16, 15, 8]"), &["line 7", "even"]);
    expect_config_error(&SLIP.replace("burgers = [1.0, 0.0, 0.0]", "burgers = [1.0, 0.0, 0.2]"), &["slip plane", "b·g"]);
    expect_config_error(&SLIP.replace("gamma = 2.0", "gamma = 2.0\ngama = 1.0"), &["line 16", "gama"]);
    expect_config_error(&SLIP.replace("\"slip-plane\"", "\"slip-planes\""), &["line 3", "slip-plane"]);
    expect_config_error(&SLIP.replace("dt = 0.5", "dt = -0.5"), &["run.dt"]);
    expect_config_error(&SLIP.replace("\"slip-plane\"", "\"relaxation\""), &["mean_stress"]);
}

#[test]
fn step_above_stability_limit_is_a_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SLIP.replace("dt = 0.5", "dt = 50.0").replace("t_end = 4.0", "t_end = 100.0"));
    let o = run(&cfg, tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("numerical failure"), "{}", stderr(&o));
}

#[test]
fn off_plane_curves_are_an_invariant_violation() {
    let tmp = tempfile::tempdir().unwrap();
    // a loop in the x3 = 0 plane checked against the plane with normal e2
    std::fs::write(
        tmp.path().join("loop.txt"),
        "burgers 1 0 0\n1 1 0\n-1 1 0\n-1 -1 0\n1 -1 0\n",
    )
    .unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
[scenario]
name = "curve-glide"

[mobility]
C = 1.0
gamma = 1.0

[slip]
burgers = [1.0, 0.0, 0.0]
normal = [0.0, 1.0, 0.0]

[curve]
file = "loop.txt"

[run]
dt = 0.01
t_end = 0.02
"#,
    );
    let o = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("> 1e-10"), "{}", stderr(&o));
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn verify_analytic_table_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&example("verify_analytic.toml"), tmp.path(), &["--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = std::fs::read_to_string(tmp.path().join("verify_analytic.csv")).unwrap();
    assert!(table.starts_with("check,value,tolerance,status\n"));
    assert_eq!(table.lines().filter(|l| l.ends_with(",PASS")).count(), 18);
}

#[test]
fn loop_shrink_tracks_exact_radius() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&example("loop_shrink.toml"), tmp.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(tmp.path().join("loop_shrink.csv")).unwrap();
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - 0.5).abs() < 1e-12);
    assert!(last[3] <= 5e-3);
}

#[test]
fn classical_compare_writes_both_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&example("classical_compare.toml"), tmp.path(), &["--max-steps", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(tmp.path().join("classical_compare.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x1,x2,x3,eps_p_new,eps_p_classical"));
    // one plane of 32×32 nodes at t = 0 and at the final step
    assert_eq!(lines.count(), 2 * 32 * 32);
}

#[test]
fn every_example_config_validates() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let o = dislosim(&["validate", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", p.display(), stderr(&o));
        n += 1;
    }
    assert_eq!(n, 7);
}
