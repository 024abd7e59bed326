use std::path::Path;
use std::process::{Command, Output};

fn lcgate(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcgate")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = lcgate(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn small_net(dir: &Path, name: &str, seed: &str) {
    ok(dir, &["generate", "--n", "200", "--k", "8", "--c", "0.4", "--samples", "20000", "--seed", seed, "--out", name]);
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = ok(dir.path(), &["generate", "--n", "50", "--k", "4", "--samples", "10000", "--seed", "1", "--out", "a.json"]);
    ok(dir.path(), &["generate", "--n", "50", "--k", "4", "--samples", "10000", "--seed", "1", "--out", "b.json"]);
    assert!(a.starts_with("generate ok seed=1 n=50 "));
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("a.json.stats.json"), read("b.json.stats.json"));
    ok(dir.path(), &["generate", "--n", "50", "--k", "4", "--samples", "10000", "--seed", "2", "--out", "c.json"]);
    assert_ne!(read("a.json"), read("c.json"));
}

#[test]
fn unreachable_calibration_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        lcgate(dir.path(), &["generate", "--n", "300", "--k", "4", "--c", "0.9", "--samples", "20000", "--seed", "1", "--out", "x.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("calibration"));
    assert!(!dir.path().join("x.json").exists());
}

#[test]
fn gun_gate_eval_render_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_net(d, "net.json", "5");
    let gun = |net: &str, near: &str, period: &str, out: &str| {
        let s = ok(
            d,
            &[
                "train-gun",
                "--net",
                net,
                "--near",
                near,
                "--target",
                "0.5,0.6",
                "--period",
                period,
                "--budget",
                "20",
                "--period-budget",
                "2000",
                "--seed",
                "1",
                "--out",
                out,
                "--trace",
                &format!("{out}.csv"),
            ],
        );
        s.split_whitespace().find_map(|kv| kv.strip_prefix("input_node=")).unwrap().to_string()
    };
    let a = gun("net.json", "0.3,0.3", "2", "g1.json");
    let b = gun("g1.json", "0.7,0.3", "3", "g2.json");
    let trace = std::fs::read_to_string(d.join("g1.json.csv")).unwrap();
    assert!(trace.starts_with("attempt,accepted,fitness,period\n"));
    let gate = format!(
        r#"{{"strategy":"common","guns":[{{"input_node":{a},"target":[0.5,0.6],"period":2}},{{"input_node":{b},"target":[0.5,0.6],"period":3}}],
        "truth_table":{{"10":[false],"01":[false],"11":[true]}}}}"#
    );
    std::fs::write(d.join("and.json"), gate).unwrap();

    let e1 =
        ok(d, &["eval", "--net", "g2.json", "--gate", "and.json", "--trials", "5", "--seed", "9", "--out", "r1.json", "--csv", "r1.csv"]);
    ok(d, &["eval", "--net", "g2.json", "--gate", "and.json", "--trials", "5", "--seed", "9", "--out", "r2.json"]);
    assert!(e1.contains("trials=15"));
    assert_eq!(std::fs::read(d.join("r1.json")).unwrap(), std::fs::read(d.join("r2.json")).unwrap());
    assert!(std::fs::read_to_string(d.join("r1.csv")).unwrap().starts_with("pattern,trials,wrong_output,wrong_period,no_rest,E\n"));

    let zero = lcgate(d, &["eval", "--net", "g2.json", "--gate", "and.json", "--trials", "0", "--seed", "1", "--out", "z.json"]);
    assert!(!zero.status.success());

    for out in ["t1.json", "t2.json"] {
        ok(
            d,
            &[
                "train-gate",
                "--net",
                "g2.json",
                "--gate",
                "and.json",
                "--budget",
                "30",
                "--eval-every",
                "15",
                "--trials",
                "2",
                "--seed",
                "4",
                "--out",
                out,
                "--trace",
                &format!("{out}.csv"),
                "--journal",
                &format!("{out}.j"),
            ],
        );
    }
    for ext in ["", ".csv", ".j"] {
        let f = |n: &str| std::fs::read(d.join(format!("{n}{ext}"))).unwrap();
        assert_eq!(f("t1.json"), f("t2.json"), "train-gate output {ext} differs");
    }

    let t = ok(d, &["trajectory", "--net", "t1.json", "--gate", "and.json", "--pattern", "11", "--out", "traj.txt", "--layout", "lay.txt"]);
    let period: usize = t.split_whitespace().find_map(|kv| kv.strip_prefix("period=")).unwrap().parse().unwrap();
    let r = ok(d, &["render", "--net", "t1.json", "--trajectory", "traj.txt", "--layout", "lay.txt", "--size", "32", "--out", "frames"]);
    assert!(r.contains(&format!("frames={period}")));
    let ppm =
        std::fs::read_dir(d.join("frames")).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "ppm")).count();
    assert_eq!(ppm, period);
}
