use std::path::Path;
use std::process::{Command, Output};

use editwar::output::csv_reader;

fn editwar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_editwar")).args(args).output().unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn rows(path: &str) -> Vec<csv::StringRecord> {
    let text = std::fs::read(path).unwrap();
    csv_reader(text.as_slice()).records().map(Result::unwrap).collect()
}

fn header_lines(path: &str) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

const SPEC: &str = r#"
seed = 11
horizon = 31536000

[[editors]]
id = "vet"
prior_edits = 100

[[editors]]
id = "newbie"

[[reverts]]
article = "Page"
time = 5000
reverter = "vet"
reverted = "newbie"

[[reverts]]
article = "Page"
time = 9000
reverter = "newbie"
reverted = "vet"

[[cohorts]]
cohort = "HumanHuman"
pairs = 4
events_per_pair = 5
mean_gap_seconds = 3600.0
"#;

#[test]
fn simulate_writes_three_files_with_headers() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "run");
    let o = editwar(&["simulate", "--out", &out, "--set", "n_agents=40", "--set", "seed=3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trajectory.csv", "windows.csv", "summary.csv"] {
        let path = format!("{out}/{f}");
        let h = header_lines(&path);
        assert!(h[0].starts_with("# editwar "), "{h:?}");
        assert!(h.iter().any(|l| l == "# seed=3"), "{f}: {h:?}");
    }
    assert_eq!(rows(&format!("{out}/summary.csv")).len(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "x");
    // Bad input: out-of-range parameter, unknown key, missing file, bad flag.
    assert_eq!(editwar(&["simulate", "--out", &out, "--set", "eps=2"]).status.code(), Some(1));
    assert_eq!(editwar(&["simulate", "--out", &out, "--set", "nope=1"]).status.code(), Some(1));
    assert_eq!(
        editwar(&["detect-reverts", "--in", "/nonexistent.csv", "--out", &out]).status.code(),
        Some(1)
    );
    assert_eq!(editwar(&["motifs", "--bogus"]).status.code(), Some(1));
    assert_eq!(editwar(&["--help"]).status.code(), Some(0));
    // Runtime failure: output under a regular file.
    let blocker = p(dir.path(), "file");
    std::fs::write(&blocker, "x").unwrap();
    let o = editwar(&["simulate", "--out", &format!("{blocker}/sub"), "--set", "n_agents=10"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn synthetic_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("spec.toml"), SPEC).unwrap();
    let ok = |args: &[&str]| {
        let o = editwar(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    };
    ok(&[
        "gen-synthetic",
        "--spec",
        &p(d, "spec.toml"),
        "--out",
        &p(d, "revs.csv"),
        "--planted",
        &p(d, "planted.csv"),
    ]);
    ok(&["detect-reverts", "--in", &p(d, "revs.csv"), "--out", &p(d, "reverts.csv")]);

    // Every planted revert is detected with the planted roles.
    let reverts = rows(&p(d, "reverts.csv"));
    assert_eq!(reverts.len(), 2 + 4 * 5);
    let page: Vec<_> = reverts.iter().filter(|r| &r[0] == "Page").collect();
    assert_eq!(page.len(), 2);
    assert_eq!((&page[0][1], &page[0][2], &page[0][3]), ("5000", "vet", "newbie"));
    assert_eq!((&page[1][2], &page[1][3]), ("newbie", "vet"));

    ok(&[
        "motifs",
        "--reverts",
        &p(d, "reverts.csv"),
        "--revisions",
        &p(d, "revs.csv"),
        "--shuffles",
        "50",
        "--out",
        &p(d, "motifs.csv"),
    ]);
    let motifs = rows(&p(d, "motifs.csv"));
    assert_eq!(motifs.len(), 6);
    let revenge = motifs.iter().find(|r| &r[0] == "Revenge").unwrap();
    assert!(revenge[1].parse::<u64>().unwrap() >= 1);
    let h = header_lines(&p(d, "motifs.csv"));
    assert!(h.iter().any(|l| l == "# n_shuffles=50"), "{h:?}");

    ok(&["cohorts", "--reverts", &p(d, "reverts.csv"), "--revisions", &p(d, "revs.csv"), "--out", &p(d, "coh")]);
    let cohorts = rows(&format!("{}/cohorts.csv", p(d, "coh")));
    let hh = cohorts.iter().find(|r| &r[0] == "HumanHuman").unwrap();
    assert_eq!(&hh[1], "5", "4 stream pairs plus vet/newbie");
    assert_eq!(rows(&format!("{}/reverted_fraction.csv", p(d, "coh"))).len(), 4);
    assert_eq!(rows(&format!("{}/structure.csv", p(d, "coh"))).len(), 3);
}

#[test]
fn jsonl_input_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let csv = "article_id,rev_index,timestamp,editor_id,is_bot,digest\n\
               a,0,1,x,0,aa\na,1,2,y,0,bb\na,2,3,x,0,aa\n";
    let jsonl = [
        r#"{"article_id":"a","rev_index":0,"timestamp":1,"editor_id":"x","is_bot":false,"digest":"aa"}"#,
        r#"{"article_id":"a","rev_index":1,"timestamp":2,"editor_id":"y","is_bot":false,"digest":"bb"}"#,
        r#"{"article_id":"a","rev_index":2,"timestamp":3,"editor_id":"x","is_bot":false,"digest":"aa"}"#,
    ]
    .join("\n");
    std::fs::write(d.join("r.csv"), csv).unwrap();
    std::fs::write(d.join("r.jsonl"), jsonl).unwrap();
    assert!(editwar(&["detect-reverts", "--in", &p(d, "r.csv"), "--out", &p(d, "a.csv")]).status.success());
    let o = editwar(&["detect-reverts", "--in", &p(d, "r.jsonl"), "--format", "jsonl", "--out", &p(d, "b.csv")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&p(d, "a.csv")), rows(&p(d, "b.csv")));
    assert_eq!(rows(&p(d, "a.csv")).len(), 1);
}

#[test]
fn sweep_writes_records_and_phase_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "sw");
    let o = editwar(&[
        "sweep",
        "--axis1",
        "eps_a=0.1,0.5",
        "--axis2",
        "renewal_p=0,0.02",
        "--replicates",
        "3",
        "--out",
        &out,
        "--set",
        "n_agents=20",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&format!("{out}/sweep_records.csv")).len(), 12);
    assert_eq!(rows(&format!("{out}/phase_diagram.csv")).len(), 4);
}
