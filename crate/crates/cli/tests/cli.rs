use std::path::Path;
use std::process::{Command, Output};

fn quditsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quditsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn simulate_to(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "simulate",
        "--code",
        "color666",
        "--decoder",
        "gcc",
        "--dim",
        "3",
        "--distances",
        "5,7",
        "--p-start",
        "0.05",
        "--p-end",
        "0.09",
        "--p-steps",
        "3",
        "--trials",
        "60",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    quditsim(&args)
}

#[test]
fn simulate_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rates.csv");
    let run = simulate_to(&out, &[]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "code,decoder,dim,distance,p,trials,failures,rate,ci_low,ci_high,seed");
    assert_eq!(lines.len(), 7);
    let keys: Vec<(usize, f64)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[3].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(keys, sorted);
}

#[test]
fn reruns_and_worker_counts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, workers) in ["1", "1", "4", "8"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}.csv"));
        assert!(simulate_to(&out, &["--workers", workers]).status.success());
        files.push(std::fs::read(&out).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("rates.csv");
    std::fs::write(
        &cfg,
        "code = \"surface\"\ndecoder = \"mwpm\"\ndistances = [5]\np_start = 0.1\np_end = 0.1\ntrials = 7\n",
    )
    .unwrap();
    let run = quditsim(&["simulate", "--config", cfg.to_str().unwrap(), "--trials", "12", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("surface,mwpm,2,5,0.1,12,"));
}

#[test]
fn incompatible_decoder_is_a_usage_error() {
    let run = quditsim(&[
        "simulate", "--code", "surface", "--decoder", "gcc", "--distances", "5", "--p-start", "0.1", "--p-end", "0.1",
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("gcc"));
    let bad_flag = quditsim(&["simulate", "--no-such-flag"]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

fn synthetic_csv(dir: &Path, distances: &[(usize, f64)]) -> std::path::PathBuf {
    // r = slope (p - 0.1) + 0.3 evaluated exactly on the grid
    let mut text = String::from("code,decoder,dim,distance,p,trials,failures,rate,ci_low,ci_high,seed\n");
    for &(d, slope) in distances {
        for i in 0..9 {
            let p = 0.09 + 0.0025 * i as f64;
            let failures = ((slope * (p - 0.1) + 0.3) * 100_000.0).round() as u64;
            text += &format!("surface,hdrg,2,{d},{p:.4},100000,{failures},0,0,0,1\n");
        }
    }
    let path = dir.join("synthetic.csv");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn threshold_of_synthetic_lines() {
    let dir = tempfile::tempdir().unwrap();
    let input = synthetic_csv(dir.path(), &[(11, 10.0), (13, 20.0)]);
    let out = dir.path().join("t.json");
    let run = quditsim(&["threshold", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((json["p_thresh"].as_f64().unwrap() - 0.1).abs() < 1e-9);
    assert_eq!(json["d_pair"], serde_json::json!([11, 13]));
    assert!(json["stderr"].as_f64().unwrap() >= 0.0);
    assert_eq!(json["fit_window"].as_array().unwrap().len(), 2);
    // idempotent
    let again = quditsim(&["threshold", "--input", input.to_str().unwrap()]);
    let json2: serde_json::Value = serde_json::from_slice(&again.stdout).unwrap();
    assert_eq!(json, json2);
}

#[test]
fn threshold_needs_two_distances() {
    let dir = tempfile::tempdir().unwrap();
    let input = synthetic_csv(dir.path(), &[(11, 10.0)]);
    let run = quditsim(&["threshold", "--input", input.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    let run = quditsim(&["threshold", "--input", input.to_str().unwrap(), "--distances", "11,15"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("15"));
}

#[test]
fn malformed_header_names_the_column() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(&input, "code,decoder,dim,dist,p,trials,failures,rate,ci_low,ci_high,seed\n").unwrap();
    let run = quditsim(&["threshold", "--input", input.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("distance"));
}

#[test]
fn fit_plateau_recovers_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.csv");
    let mut text = String::from("dim,p_thresh\n");
    for d in [2.0f64, 3.0, 5.0, 10.0, 25.0, 100.0] {
        text += &format!("{d},{:.17}\n", 0.155 + 0.12 / (0.5 - d));
    }
    std::fs::write(&input, text).unwrap();
    let run = quditsim(&["fit-plateau", "--input", input.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let json: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert!((json["T_plateau"].as_f64().unwrap() - 0.155).abs() < 1e-6);
    assert!((json["alpha"].as_f64().unwrap() + 0.12).abs() < 1e-6);
    assert!((json["beta"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn fit_plateau_rejects_two_points() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.csv");
    std::fs::write(&input, "dim,p_thresh\n2,0.09\n3,0.1\n").unwrap();
    assert_eq!(quditsim(&["fit-plateau", "--input", input.to_str().unwrap()]).status.code(), Some(1));
}
