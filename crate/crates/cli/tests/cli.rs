use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_streamvis"));
    c.env_remove("STREAMVIS_WORKERS");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("streamvis-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn generate(dir: &Path, communities: &str, size: &str) -> PathBuf {
    let graph = dir.join("graph.txt");
    ok(bin()
        .args(["generate", "--communities", communities, "--size", size, "--inter-edges", "1", "--out"])
        .arg(&graph)
        .output()
        .unwrap());
    graph
}

#[test]
fn run_on_two_cliques() {
    let dir = scratch("run");
    let graph = generate(&dir, "2", "10");
    let (svg, report, tsv) = (dir.join("out.svg"), dir.join("report.json"), dir.join("nodes.tsv"));
    let stdout = ok(bin()
        .arg("run")
        .arg(&graph)
        .args(["--workers", "2", "--svg"])
        .arg(&svg)
        .arg("--report")
        .arg(&report)
        .arg("--nodes-tsv")
        .arg(&tsv)
        .output()
        .unwrap());
    assert!(stdout.contains("supernodes"));

    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["supernodes"], 2);
    assert!(r["modularity"].as_f64().unwrap() >= 0.3);
    let times = &r["times"];
    let total = times["total_ms"].as_f64().unwrap();
    let sum: f64 = ["parse_ms", "detect_ms", "sizes_ms", "contract_ms", "metrics_ms", "layout_ms", "color_ms", "export_ms"]
        .iter()
        .map(|k| times[*k].as_f64().unwrap())
        .sum();
    assert!(sum <= total * 1.0001 && sum >= 0.95 * total - 0.5, "stages {sum} vs total {total}");

    let text = std::fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("circle")).count(), 2);
    assert_eq!(std::fs::read_to_string(&tsv).unwrap().lines().count(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn full_colored_mode() {
    let dir = scratch("full");
    let graph = generate(&dir, "3", "5");
    let svg = dir.join("full.svg");
    ok(bin()
        .arg("run")
        .arg(&graph)
        .args(["--mode", "full-colored", "--iterations", "50", "--no-edges", "--svg"])
        .arg(&svg)
        .output()
        .unwrap());
    let text = std::fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("circle")).count(), 15);
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("line")).count(), 0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn ablation_tables() {
    let dir = scratch("ablate");
    let graph = generate(&dir, "6", "8");
    let table = ok(bin()
        .arg("ablate")
        .arg(&graph)
        .args(["--axis", "hashes", "--values", "1,2,3,4", "--iterations", "20"])
        .output()
        .unwrap());
    let rows: Vec<Vec<&str>> = table.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 4);
    let sn: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    let max = sn.iter().cloned().fold(f64::MIN, f64::max);
    let min = sn.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max <= 1.05 * min);

    let exports = dir.join("svgs");
    let out = dir.join("threshold.tsv");
    ok(bin()
        .arg("ablate")
        .arg(&graph)
        .args(["--axis", "threshold", "--values", "1,3,5", "--iterations", "20", "--out"])
        .arg(&out)
        .arg("--export-dir")
        .arg(&exports)
        .output()
        .unwrap());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 4);
    for v in [1, 3, 5] {
        assert!(exports.join(format!("threshold-{v}.svg")).exists());
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bench_prints_speedup() {
    let dir = scratch("bench");
    let graph = generate(&dir, "4", "8");
    let out = ok(bin()
        .arg("bench")
        .arg(&graph)
        .args(["--full-iterations", "20", "--workers", "1"])
        .output()
        .unwrap());
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].ends_with("speedup"));
    let speedup: f64 = lines[1].rsplit('\t').next().unwrap().parse().unwrap();
    assert!(speedup > 0.0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn failures_exit_nonzero() {
    let dir = scratch("fail");
    let out = bin().args(["run", "/nonexistent/edges.txt"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse"));

    let empty = dir.join("empty.txt");
    std::fs::write(&empty, "# nothing here\n").unwrap();
    let out = bin().arg("run").arg(&empty).arg("--svg").arg(dir.join("x.svg")).output().unwrap();
    assert!(!out.status.success());
    assert!(!dir.join("x.svg").exists());

    let graph = generate(&dir, "2", "4");
    for bad in [["--rounds", "0"], ["--threshold-base", "0"], ["--workers", "0"]] {
        let out = bin().arg("run").arg(&graph).args(bad).output().unwrap();
        assert!(!out.status.success(), "{bad:?} accepted");
    }
    let out = bin().arg("run").arg(&graph).args(["--palette", "#000000,#ffffff"]).output().unwrap();
    assert!(!out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn workers_from_environment() {
    let dir = scratch("env");
    let graph = generate(&dir, "2", "6");
    let report = dir.join("r.json");
    ok(bin()
        .env("STREAMVIS_WORKERS", "3")
        .arg("run")
        .arg(&graph)
        .arg("--svg")
        .arg(dir.join("o.svg"))
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap());
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["workers"], 3);
    std::fs::remove_dir_all(&dir).ok();
}
