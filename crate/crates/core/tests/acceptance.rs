//! Acceptance harness. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use editwar::cohort::{build_pair_histories, pace_and_persistence, Cohort};
use editwar::motifs::{analyze_motifs, AnalysisOptions, MotifClass};
use editwar::opinion::{pairwise_interact, InteractionParams, Opinion};
use editwar::revisions::detect::{AllIntermediate, LatestOnly};
use editwar::revisions::synthetic::{Background, Burst, CohortStream, EditorSpec};
use editwar::revisions::{detect_all, generate_synthetic_log, Attribution, RevertEvent, RevisionRecord, SyntheticSpec};
use editwar::sim::{time_to_consensus, PhaseLabel, SimConfig};
use editwar::stats::{median, spearman};
use editwar::sweep::{run_sweep, GridSpec};

const DAY: u64 = 86_400;
const YEAR: u64 = 365 * DAY;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn seeds(base: u64, n: u64) -> Vec<u64> {
    (base..base + n).collect()
}

fn conservation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst_sum, mut worst_contraction, mut interacted) = (0.0f64, 0.0f64, 0u32);
    for _ in 0..1_000_000 {
        let p = InteractionParams {
            eps: rng.random_range(0.0..=1.0),
            mu: rng.random_range(0.01..=0.5),
            ..InteractionParams::default()
        };
        let (a, b) = (rng.random::<f64>(), rng.random::<f64>());
        let (x, y, hit) = pairwise_interact(Opinion::new(a).unwrap(), Opinion::new(b).unwrap(), &p);
        let (x, y) = (x.value(), y.value());
        worst_sum = worst_sum.max(((x + y) - (a + b)).abs());
        if hit {
            interacted += 1;
            let expect = (1.0 - 2.0 * p.mu) * (a - b).abs();
            worst_contraction = worst_contraction.max(((x - y).abs() - expect).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_sum <= 1e-12 && worst_contraction <= 1e-12 && secs < 10.0,
        format!(
            "max sum error {worst_sum:.2e}, max contraction error {worst_contraction:.2e} over {interacted} interactions, {secs:.2} s"
        ),
    )
}

fn consensus_regime() -> Outcome {
    let cfg = SimConfig {
        n_agents: 100,
        params: InteractionParams {
            eps: 1.0,
            mu: 0.5,
            ..InteractionParams::default()
        },
        article_q: 0.0,
        renewal_p: 0.0,
        max_steps: Some(100_000),
        ..SimConfig::default()
    };
    let stats = time_to_consensus(&cfg, &seeds(1, 100)).unwrap();
    let worst = stats
        .runs
        .iter()
        .map(|r| (r.final_mean - r.initial_mean).abs())
        .fold(0.0, f64::max);
    outcome(
        stats.converged == 100 && worst <= 1e-6,
        format!(
            "{}/100 converged within 1e5 steps (median {:?}), max |final mean - initial mean| {worst:.2e}",
            stats.converged, stats.median
        ),
    )
}

fn fragmentation_regime() -> Outcome {
    let cfg = SimConfig {
        n_agents: 1000,
        params: InteractionParams {
            eps: 0.1,
            ..InteractionParams::default()
        },
        article_q: 0.0,
        ..SimConfig::default()
    };
    let stats = time_to_consensus(&cfg, &seeds(1, 100)).unwrap();
    let counts: Vec<f64> = stats.runs.iter().map(|r| r.final_cluster_count as f64).collect();
    let multi = counts.iter().filter(|&&c| c >= 2.0).count();
    let med = median(&counts).unwrap();
    outcome(
        multi >= 95 && (med - 5.0).abs() <= 1.0,
        format!("{multi}/100 runs with >= 2 clusters, median cluster count {med}"),
    )
}

fn article_mediated() -> Outcome {
    let base = SimConfig {
        n_agents: 100,
        params: InteractionParams {
            eps: 0.1,
            eps_a: 0.4,
            ..InteractionParams::default()
        },
        article_q: 0.5,
        max_steps: Some(10_000_000),
        ..SimConfig::default()
    };
    let with = time_to_consensus(&base, &seeds(1, 100)).unwrap();
    let control = SimConfig {
        article_q: 0.0,
        ..base.clone()
    };
    let without = time_to_consensus(&control, &seeds(1, 100)).unwrap();
    outcome(
        with.converged >= 90 && without.converged == 0,
        format!(
            "q=0.5: {}/100 converged within 1e7 steps (median {:?}); q=0 control: {}/100",
            with.converged, with.median, without.converged
        ),
    )
}

fn renewal_conflict() -> Outcome {
    let start = Instant::now();
    let spec = GridSpec::eps_a_by_renewal(SimConfig::default(), 30);
    let records = run_sweep(&spec, 0).unwrap();
    let failed = records.iter().filter(|r| r.fail_reason.is_some()).count();

    let mut cells: BTreeMap<(usize, usize), Vec<&editwar::sweep::SweepRecord>> = BTreeMap::new();
    for r in &records {
        cells.entry((r.i1, r.i2)).or_default().push(r);
    }
    let majority = |cell: &[&editwar::sweep::SweepRecord], phase: PhaseLabel| {
        cell.iter().filter(|r| r.phase == Some(phase)).count() * 2 > cell.len()
    };
    let n1 = spec.axis1.values.len();
    let n2 = spec.axis2.values.len();
    let consensus_corner = &cells[&(n1 - 1, 0)];
    let war_corner = &cells[&(0, n2 - 1)];
    let count = |cell: &[&editwar::sweep::SweepRecord], phase| cell.iter().filter(|r| r.phase == Some(phase)).count();

    let (mut p, mut edits) = (Vec::new(), Vec::new());
    for ((_, i2), cell) in &cells {
        let e: Vec<f64> = cell.iter().map(|r| r.total_edits as f64).collect();
        p.push(spec.axis2.values[*i2].parse::<f64>().unwrap());
        edits.push(median(&e).unwrap());
    }
    let s = spearman(&p, &edits).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failed == 0
            && majority(consensus_corner, PhaseLabel::Consensus)
            && majority(war_corner, PhaseLabel::War)
            && s.rho > 0.0
            && s.p_positive < 0.05,
        format!(
            "(eps_a=0.5, P=0) Consensus {}/30; (eps_a=0.05, P=0.02) War {}/30; median total_edits vs P rho {:.3} p {:.2e}; {failed} failed runs; {secs:.0} s",
            count(consensus_corner, PhaseLabel::Consensus),
            count(war_corner, PhaseLabel::War),
            s.rho,
            s.p_positive
        ),
    )
}

fn extremist_effect() -> Outcome {
    // Calibrated setting; see the README for why it differs from the defaults.
    let base = SimConfig {
        n_agents: 100,
        params: InteractionParams {
            eps: 0.2,
            eps_a: 0.7,
            ..InteractionParams::default()
        },
        article_q: 0.1,
        renewal_p: 0.0,
        extremist_z: 0.1,
        extremist_band: 0.05,
        max_steps: Some(1_000_000),
        ..SimConfig::default()
    };
    let seeds = seeds(1000, 100);
    let with = time_to_consensus(&base, &seeds).unwrap();
    let without = time_to_consensus(
        &SimConfig {
            extremist_z: 0.0,
            ..base.clone()
        },
        &seeds,
    )
    .unwrap();
    println!("  paired table (seed, ttc with z=0.1, ttc with z=0):");
    let mut faster = 0;
    for (a, b) in with.runs.iter().zip(&without.runs) {
        let show = |t: Option<u64>| t.map_or("none".to_string(), |t| t.to_string());
        println!("    {} {} {}", a.seed, show(a.time_to_consensus), show(b.time_to_consensus));
        if a.time_to_consensus.unwrap_or(u64::MAX) <= b.time_to_consensus.unwrap_or(u64::MAX) {
            faster += 1;
        }
    }
    // Non-converged runs rank last.
    let med = |s: &editwar::sim::ConsensusStats| {
        let t: Vec<f64> = s
            .runs
            .iter()
            .map(|r| r.time_to_consensus.map_or(f64::INFINITY, |t| t as f64))
            .collect();
        median(&t).unwrap()
    };
    let (mw, mo) = (med(&with), med(&without));
    outcome(
        mw <= mo,
        format!(
            "eps=0.2 eps_a=0.7 q=0.1 z=0.1: median ttc {mw} with vs {mo} without over 100 paired seeds ({faster} seeds no slower; converged {}/{})",
            with.converged, without.converged
        ),
    )
}

/// Quadratic reference detector.
fn brute_force(revs: &[RevisionRecord], all: bool) -> Vec<RevertEvent> {
    let mut out = Vec::new();
    let mut articles: Vec<&str> = Vec::new();
    for r in revs {
        if !articles.contains(&r.article_id.as_str()) {
            articles.push(&r.article_id);
        }
    }
    for art in articles {
        let l: Vec<&RevisionRecord> = revs.iter().filter(|r| r.article_id == art).collect();
        for k in 0..l.len() {
            let Some(j) = (0..k).rev().find(|&j| l[j].digest == l[k].digest) else { continue };
            if j + 1 >= k {
                continue;
            }
            let mut blamed: Vec<&str> = Vec::new();
            if all {
                for r in &l[j + 1..k] {
                    if !blamed.contains(&r.editor_id.as_str()) {
                        blamed.push(&r.editor_id);
                    }
                }
            } else {
                blamed.push(&l[k - 1].editor_id);
            }
            for who in blamed {
                out.push(RevertEvent {
                    article_id: art.to_string(),
                    time: l[k].timestamp,
                    reverter: l[k].editor_id.clone(),
                    reverted: who.to_string(),
                    restored_rev: l[j].rev_index,
                    reverting_rev: l[k].rev_index,
                    depth: (k - j - 1) as u64,
                    self_revert: l[k].editor_id == who,
                });
            }
        }
    }
    out
}

fn random_log(rng: &mut ChaCha8Rng) -> Vec<RevisionRecord> {
    let n = rng.random_range(0..=200);
    let n_articles = rng.random_range(1..=4);
    let n_digests = rng.random_range(1..=12);
    let n_editors = rng.random_range(1..=6);
    let mut next_rev = vec![0u64; n_articles];
    let mut clock = vec![0u64; n_articles];
    (0..n)
        .map(|_| {
            let a = rng.random_range(0..n_articles);
            let rev = next_rev[a];
            next_rev[a] += 1;
            clock[a] += rng.random_range(0..5);
            RevisionRecord {
                article_id: format!("art{a}"),
                rev_index: rev,
                timestamp: clock[a],
                editor_id: format!("e{}", rng.random_range(0..n_editors)),
                is_bot: false,
                digest: format!("{:08x}", rng.random_range(0..n_digests)),
            }
        })
        .collect()
}

fn canonical(mut v: Vec<RevertEvent>) -> Vec<RevertEvent> {
    v.sort_by(|a, b| {
        (&a.article_id, a.reverting_rev, &a.reverted).cmp(&(&b.article_id, b.reverting_rev, &b.reverted))
    });
    v
}

fn revert_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    let mut events = 0;
    for _ in 0..1000 {
        let log = random_log(&mut rng);
        for (attr, all) in [(&LatestOnly as &dyn Attribution, false), (&AllIntermediate, true)] {
            let got = canonical(detect_all(&log, attr).unwrap());
            let want = canonical(brute_force(&log, all));
            events += want.len();
            if got != want {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("1000 logs x 2 attribution rules, {events} oracle events, {mismatches} mismatching logs"),
    )
}

fn editor(id: &str) -> EditorSpec {
    EditorSpec {
        id: id.into(),
        ..EditorSpec::default()
    }
}

fn detect(spec: &SyntheticSpec) -> (Vec<RevisionRecord>, Vec<RevertEvent>) {
    let log = generate_synthetic_log(spec).unwrap();
    let events = detect_all(&log.revisions, &LatestOnly).unwrap();
    (log.revisions, events)
}

fn poisson_spec(seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        seed,
        horizon: YEAR,
        background: Some(Background {
            articles: 1,
            editors: 20,
            bot_fraction: 0.0,
            events_per_article: 200,
            filler_per_article: 0,
        }),
        ..SyntheticSpec::default()
    }
}

fn motif_recovery() -> Outcome {
    let opts = AnalysisOptions::default();
    let mut planted_ok = true;
    let mut parts = Vec::new();
    for (i, (class, names)) in [
        (MotifClass::SerialAttack, vec!["sa-a", "sa-b"]),
        (MotifClass::Revenge, vec!["rv-a", "rv-b"]),
        (MotifClass::ThirdPartyDefense, vec!["tp-a", "tp-b", "tp-c"]),
    ]
    .into_iter()
    .enumerate()
    {
        let mut spec = poisson_spec(100 + i as u64);
        spec.editors = names.iter().map(|n| editor(n)).collect();
        spec.bursts = vec![Burst {
            article: "article-0".into(),
            class: class.as_str().into(),
            start: YEAR / 2,
            repeats: 20,
            spacing: 600,
            editors: names.iter().map(|n| n.to_string()).collect(),
        }];
        let (revs, events) = detect(&spec);
        let report = analyze_motifs(&events, &revs, &opts).unwrap();
        let z = report.row(class).z.z;
        planted_ok &= z.is_some_and(|z| z > 3.0);
        parts.push(format!("{class} z={}", z.map_or("none".into(), |z| format!("{z:.1}"))));
    }

    let mut calm = 0;
    let mut worst = 0.0f64;
    for log in 0..100 {
        let (revs, events) = detect(&poisson_spec(10_000 + log));
        let report = analyze_motifs(&events, &revs, &opts).unwrap();
        let max_abs = report
            .rows
            .iter()
            .map(|r| r.z.z.map_or(0.0, f64::abs))
            .fold(0.0, f64::max);
        worst = worst.max(max_abs);
        if max_abs < 3.0 {
            calm += 1;
        }
    }
    outcome(
        planted_ok && calm >= 95,
        format!(
            "planted bursts: {}; Poisson logs with |z| < 3 for all classes: {calm}/100 (largest |z| {worst:.2})",
            parts.join(", ")
        ),
    )
}

fn cohort_metrics() -> Outcome {
    let stream = |cohort: &str, mean_days: f64| CohortStream {
        cohort: cohort.into(),
        pairs: 200,
        events_per_pair: 10,
        mean_gap_seconds: mean_days * DAY as f64,
        experience_bias: None,
        prior_edits_max: 50,
        start_max: None,
    };
    let spec = SyntheticSpec {
        seed: 31,
        horizon: 10 * YEAR,
        cohorts: vec![stream("BotBot", 30.0), stream("HumanHuman", 1.0)],
        ..SyntheticSpec::default()
    };
    let (revs, events) = detect(&spec);
    let histories = build_pair_histories(&events, &revs).unwrap();
    let summaries = pace_and_persistence(&histories);
    let get = |c: Cohort| summaries.iter().find(|s| s.cohort == c).unwrap();
    let (bb, hh) = (get(Cohort::BotBot), get(Cohort::HumanHuman));
    let ratio = bb.median_gap.unwrap() / hh.median_gap.unwrap();
    let lifetimes = (bb.median_lifetime.unwrap(), hh.median_lifetime.unwrap());
    outcome(
        (ratio / 30.0 - 1.0).abs() <= 0.2 && lifetimes.0 > lifetimes.1 && bb.n_events >= 200 && hh.n_events >= 200,
        format!(
            "gap-median ratio {ratio:.2} (target 30 +-20%), median lifetime BotBot {:.0} s vs HumanHuman {:.0} s, events {} / {}",
            lifetimes.0, lifetimes.1, bb.n_events, hh.n_events
        ),
    )
}

const SYNTH_TOML: &str = r#"
seed = 5
horizon = 31536000

[[editors]]
id = "alice"
prior_edits = 40

[[editors]]
id = "bob"

[background]
articles = 3
editors = 12
bot_fraction = 0.25
events_per_article = 60
filler_per_article = 20

[[cohorts]]
cohort = "BotBot"
pairs = 5
events_per_pair = 6
mean_gap_seconds = 2592000.0
prior_edits_max = 20

[[bursts]]
article = "article-0"
class = "Revenge"
start = 15000000
repeats = 3
spacing = 300
editors = ["alice", "bob"]
"#;

fn editwar(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_editwar")).args(args).output().unwrap()
}

/// Runs every subcommand into `dir`, returning each output file's bytes.
fn cli_pass(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let d = |name: &str| dir.join(name).to_string_lossy().into_owned();
    std::fs::write(dir.join("spec.toml"), SYNTH_TOML).unwrap();
    let steps: Vec<Vec<String>> = vec![
        vec!["simulate".into(), "--out".into(), d("sim"), "--set".into(), "seed=9".into()],
        vec![
            "sweep".into(),
            "--axis1".into(),
            "eps_a=0.1,0.4".into(),
            "--axis2".into(),
            "renewal_p=0,0.01".into(),
            "--replicates".into(),
            "2".into(),
            "--out".into(),
            d("sweep"),
            "--set".into(),
            "n_agents=30".into(),
        ],
        vec!["gen-synthetic".into(), "--spec".into(), d("spec.toml"), "--out".into(), d("revisions.csv")],
        vec![
            "detect-reverts".into(),
            "--in".into(),
            d("revisions.csv"),
            "--out".into(),
            d("reverts.csv"),
            "--network".into(),
            d("network.graphml"),
        ],
        vec![
            "motifs".into(),
            "--reverts".into(),
            d("reverts.csv"),
            "--revisions".into(),
            d("revisions.csv"),
            "--shuffles".into(),
            "100".into(),
            "--seed".into(),
            "3".into(),
            "--out".into(),
            d("motifs.csv"),
        ],
        vec![
            "cohorts".into(),
            "--reverts".into(),
            d("reverts.csv"),
            "--revisions".into(),
            d("revisions.csv"),
            "--out".into(),
            d("cohorts"),
        ],
    ];
    for args in &steps {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = editwar(&refs);
        if !out.status.success() {
            return Err(format!("{} failed: {}", args[0], String::from_utf8_lossy(&out.stderr)));
        }
    }
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(p) = stack.pop() {
        for entry in std::fs::read_dir(&p).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    Ok(files)
}

fn determinism() -> Outcome {
    // Same directory both times: headers record input paths.
    let dir = tempfile::tempdir().unwrap();
    let first = cli_pass(dir.path());
    let second = cli_pass(dir.path());
    let (fa, fb) = match (first, second) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e),
    };
    let differing: Vec<&String> = fa.keys().filter(|k| fa.get(*k) != fb.get(*k)).collect();
    outcome(
        fa.len() == fb.len() && differing.is_empty() && fa.len() >= 10,
        format!("{} output files from 6 subcommands compared, differing: {differing:?}", fa.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("conservation and contraction", conservation),
        ("consensus regime", consensus_regime),
        ("fragmentation regime", fragmentation_regime),
        ("article-mediated consensus", article_mediated),
        ("renewal conflict", renewal_conflict),
        ("extremist effect", extremist_effect),
        ("revert-detection oracle", revert_oracle),
        ("motif recovery", motif_recovery),
        ("cohort metrics", cohort_metrics),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
