use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_optomech");

const SMALL: &str = r#"
name = "small"
observables = ["mean_n", "g2", "g3", "g32", "c2", "p_n"]

[params]
nu_m = 10.0
g = 2.5
eps_c = 0.01
gamma = 0.1
gamma_m = 0.01
temperature = 1e-6
delta = 1.0

[truncation]
n_cav = 3
n_mech = 5
auto_converge = false

[sweep]
axis = "delta"
start = 0.5
stop = 2.5
points = 9

[output]
path = "out/small.csv"
"#;

fn optomech(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_csv_next_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let elsewhere = tempfile::tempdir().unwrap();
    let out = optomech(&["run", &cfg], elsewhere.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(dir.path().join("out/small.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis,value_units,mean_n,g2,g3,g32,c2,p0,p1,p2,p3,residual,n_cav,n_mech,converged"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.starts_with("delta,") && r.ends_with(",3,5,true")));

    let again = optomech(&["run", &cfg, "--out", "-"], elsewhere.path());
    assert_eq!(String::from_utf8(again.stdout).unwrap(), csv);
}

#[test]
fn unconverged_points_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("auto_converge = false", "auto_converge = true\nrel_tol = 1e-12\nmax_dim = 24");
    let cfg = write_config(dir.path(), "tight.toml", &text);
    let out = optomech(&["run", &cfg, "--out", "-"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().skip(1).all(|r| r.ends_with(",false")));
}

#[test]
fn bad_configs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_config(dir.path(), "typo.toml", &SMALL.replace("gamma_m", "gama_m"));
    let out = optomech(&["check", &typo], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let backwards = write_config(dir.path(), "backwards.toml", &SMALL.replace("stop = 2.5", "stop = 0.1"));
    assert_eq!(optomech(&["run", &backwards], dir.path()).status.code(), Some(1));
    assert_eq!(optomech(&["check", "missing.toml"], dir.path()).status.code(), Some(1));
}

#[test]
fn check_accepts_every_recipe() {
    let recipes = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes");
    let mut seen = 0;
    for entry in fs::read_dir(&recipes).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = optomech(&["check", path.to_str().unwrap()], &recipes);
            assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
            seen += 1;
        }
    }
    assert!(seen >= 10);
}

#[test]
fn peaks_lists_local_maxima() {
    let dir = tempfile::tempdir().unwrap();
    let header = "axis,value_units,mean_n,g2,g3,g32,c2,p0,p1,p2,p3,residual,n_cav,n_mech,converged";
    let mut csv = format!("{header}\n");
    for (x, y) in [(0.5, 1.0), (0.6, 3.0), (0.7, 2.0), (0.8, 2.5), (0.9, 0.5)] {
        csv.push_str(&format!("g,{x},,{y},,,,,,,,,4,8,true\n"));
    }
    fs::write(dir.path().join("t.csv"), csv).unwrap();
    let out = optomech(&["peaks", "t.csv", "--column", "g2"], dir.path());
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "value_units,g2\n6.00000000000e-1,3.00000000000e0\n8.00000000000e-1,2.50000000000e0\n"
    );
    let bad = optomech(&["peaks", "t.csv", "--column", "nope"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}
