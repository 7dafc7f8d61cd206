use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mr_hetero::simulation::{generate_replicate, SimConfig};
use sha2::{Digest, Sha256};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mr-hetero"));
    c.env_remove("MR_HETERO_THREADS").env("SOURCE_DATE_EPOCH", "0");
    c
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_preset_data(dir: &Path, preset: &str) -> PathBuf {
    let mut cfg = SimConfig::preset(preset).unwrap();
    cfg.n_individuals = 5_000;
    let rep = generate_replicate(&cfg, 0).unwrap();
    let path = dir.join(format!("{preset}.tsv"));
    rep.data.write_tsv(&path).unwrap();
    path
}

fn analyze(data: &Path, d: usize, method: &str, out: &Path) -> Output {
    run(bin().args([
        "analyze",
        "--data",
        data.to_str().unwrap(),
        "--exposures",
        &d.to_string(),
        "--method",
        method,
        "--presso-sims",
        "200",
        "--bootstrap",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]))
}

#[test]
fn analyze_all_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_preset_data(tmp.path(), "uni10");
    let out = tmp.path().join("out");
    let o = analyze(&data, 1, "all", &out);
    assert!(o.status.success(), "{}", stderr(&o));

    let est = fs::read_to_string(out.join("estimates.csv")).unwrap();
    let mut lines = est.lines();
    assert_eq!(lines.next().unwrap(), "method,exposure,theta,se,p_value,n_snps");
    let methods: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    for m in ["full", "standard", "sanderson", "presso", "gcq", "radial", "weighted_median"] {
        assert!(methods.contains(&m), "missing {m} in {methods:?}");
    }

    let outl = fs::read_to_string(out.join("outliers.csv")).unwrap();
    assert!(outl.starts_with("method,snp_id,statistic,p_value,flagged\n"));
    // 5 detectors x 100 SNPs
    assert_eq!(outl.lines().count(), 1 + 5 * 100);

    let radial = fs::read_to_string(out.join("radial.csv")).unwrap();
    assert!(radial.starts_with("snp,z_stat,precision,q_i,flagged\n"));
    assert_eq!(radial.lines().count(), 101);

    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("command = analyze"));
    assert!(manifest.contains("timestamp = 0"));
    assert!(manifest.contains("gcq: lambda = "));
    assert!(manifest.contains("presso global test"));
    for f in ["estimates.csv", "outliers.csv", "radial.csv"] {
        let digest = hex::encode(Sha256::digest(fs::read(out.join(f)).unwrap()));
        assert!(manifest.contains(&format!("sha256:{digest}  {f}")), "{f}");
    }
    let input = hex::encode(Sha256::digest(fs::read(&data).unwrap()));
    assert!(manifest.contains(&input));
}

#[test]
fn analyze_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_preset_data(tmp.path(), "uni10");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(analyze(&data, 1, "all", &a).status.success());
    assert!(analyze(&data, 1, "all", &b).status.success());
    for f in ["estimates.csv", "outliers.csv", "radial.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn analyze_multivariable_skips_univariable_methods() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_preset_data(tmp.path(), "multi10");
    let out = tmp.path().join("out");
    let o = analyze(&data, 3, "all", &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let est = fs::read_to_string(out.join("estimates.csv")).unwrap();
    assert_eq!(est.lines().filter(|l| l.starts_with("gcq,")).count(), 3);
    assert!(!out.join("radial.csv").exists());
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("radial and median skipped"));
}

#[test]
fn input_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.tsv");
    fs::write(
        &bad,
        "snp\tbeta_x_1\tse_x_1\tbeta_y\tse_y\nrs1\t0.1\t0.01\t0.1\t0.02\nrs2\t0.2\t-0.01\t0.2\t0.02\n",
    )
    .unwrap();
    let o = analyze(&bad, 1, "gcq", &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NonPositiveSE"), "{}", stderr(&o));

    let o = analyze(&tmp.path().join("absent.tsv"), 1, "gcq", &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Io"));

    let o = run(bin().args(["analyze", "--method", "nonsense"]));
    assert_eq!(o.status.code(), Some(2));

    let o = run(bin().args(["simulate", "--preset", "uni7", "--out"]).arg(tmp.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("InvalidConfig"), "{}", stderr(&o));
}

#[test]
fn numerical_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("collinear.tsv");
    let mut s = String::from("snp\tbeta_x_1\tbeta_x_2\tse_x_1\tse_x_2\tbeta_y\tse_y\n");
    for i in 1..=10 {
        let b = 0.01 * i as f64;
        s += &format!("rs{i}\t{b}\t{}\t0.01\t0.01\t{b}\t0.02\n", 2.0 * b);
    }
    fs::write(&path, s).unwrap();
    let o = analyze(&path, 2, "full", &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("RankDeficient"));
}

fn simulate(out: &Path, threads: Option<&str>, env_threads: Option<&str>) -> Output {
    let mut c = bin();
    c.args(["simulate", "--preset", "uni10", "--runs", "12", "--individuals", "4000", "--seed", "11"])
        .arg("--out")
        .arg(out);
    if let Some(t) = threads {
        c.args(["--threads", t]);
    }
    if let Some(t) = env_threads {
        c.env("MR_HETERO_THREADS", t);
    }
    run(&mut c)
}

#[test]
fn simulate_output_independent_of_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let one = tmp.path().join("one");
    let eight = tmp.path().join("eight");
    let env = tmp.path().join("env");
    assert!(simulate(&one, Some("1"), None).status.success());
    assert!(simulate(&eight, Some("8"), None).status.success());
    assert!(simulate(&env, None, Some("3")).status.success());
    let a = fs::read(one.join("uni10.csv")).unwrap();
    assert_eq!(a, fs::read(eight.join("uni10.csv")).unwrap());
    assert_eq!(a, fs::read(env.join("uni10.csv")).unwrap());

    let csv = String::from_utf8(a).unwrap();
    assert!(csv.starts_with("measure,full_model,standard,sanderson,presso,radial,gcq,median\n"));
    let manifest = fs::read_to_string(one.join("manifest.txt")).unwrap();
    assert!(manifest.contains("n_runs = 12"));
    assert!(manifest.contains("seed = 11"));
}

#[test]
fn simulate_from_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("setting.cfg");
    fs::write(
        &cfg,
        "# small custom run\npreset = uni5\nname = tiny\nn_runs = 4\nn_individuals = 3000\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = run(bin()
        .args(["simulate", "--methods", "gcq,standard", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out));
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("tiny.csv")).unwrap();
    assert!(csv.starts_with("measure,gcq,standard\n"));
    assert!(csv.contains("runs_ok,4,4\n"));
}

#[test]
fn quick_caps_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(bin()
        .args(["simulate", "--preset", "multi5", "--quick", "--out"])
        .arg(tmp.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = fs::read_to_string(tmp.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("quick = true"));
    assert!(manifest.contains("n_individuals = 5000"));
}
