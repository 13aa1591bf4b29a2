use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nested-isac")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn beam_pattern_header_and_range() {
    let o = cli(&["beam-pattern", "--n1", "2", "--n2", "3", "--samples", "9"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta,gain");
    assert_eq!(lines.len(), 10);
    assert!(lines[1].starts_with("-2,") && lines[9].starts_with("2,"));
    assert_eq!(lines[5], "0,1");
}

#[test]
fn beam_metrics_formats() {
    let json = cli(&["beam-metrics", "--n1", "32", "--n2", "32", "--json"]);
    assert!(json.status.success());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["regime"], "large_n2");
    assert_eq!(v["n_ap"], 17);
    let csv = cli(&["beam-metrics", "--n1", "8", "--n2", "8", "--csv"]);
    assert!(stdout(&csv).starts_with("key,value\n"));
}

#[test]
fn simulate_doa_columns() {
    let o = cli(&["simulate-doa", "--geometry", "nested:2,2", "--sources=-10,20", "--trials", "2", "--snapshots", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "trial,source_idx,true_deg,est_deg");
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn simulate_rate_columns() {
    let o = cli(&["simulate-rate", "--geometry", "ula:8", "--ues", "3", "--trials", "2", "--channel", "los"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "trial,ue,angle_deg,sinr,rate");
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["beam-metrics", "--n1", "x", "--n2", "2"]).status.code(), Some(2));
    assert_eq!(cli(&["simulate-doa", "--geometry", "hex:3", "--sources", "1"]).status.code(), Some(2));
    // A single antenna has no first minimum to find.
    assert_eq!(cli(&["beam-metrics", "--n1", "0", "--n2", "1"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "experiment = fig3_n1_sweep\ntrials = 0\n").unwrap();
    let o = cli(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));
    assert_eq!(cli(&["sweep", "--config", "/definitely/missing.cfg"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("f5.cfg");
    let out = dir.path().join("f5.csv");
    let svg = dir.path().join("f5.svg");
    std::fs::write(&cfg, "experiment = fig5_sensing_first\nm = 8,12\ntrials = 2\nsnapshots = 100\n").unwrap();
    let o = cli(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--plot", svg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("m,arch,mean_rate,rmse_deg"));
    assert!(text.contains("# crossing_predicted_m=12"));
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}
