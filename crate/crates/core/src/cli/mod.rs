//! Command-line front end.
//!
//! Exit status: 0 on success, 1 for bad input (arguments, configuration,
//! unreadable or malformed input files), 2 for runtime failures such as
//! unwritable outputs.

pub mod config;

use std::ffi::OsString;
use std::fmt::Display;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cohort::{
    build_pair_histories, pace_and_persistence, reverted_fraction, structure_absence_check, write_cohort_report,
    write_reverted_fraction, write_structure,
};
use crate::error::Error;
use crate::motifs::enumerate::pairing_registry;
use crate::motifs::null::null_registry;
use crate::motifs::{analyze_motifs, write_motif_report, AnalysisOptions, MotifOptions, DEFAULT_WINDOW};
use crate::output::{write_atomic, CsvHeader};
use crate::revisions::detect::registry as attribution_registry;
use crate::revisions::synthetic::PlantedRevert;
use crate::revisions::{
    build_revert_network, detect_all, generate_synthetic_log, parse_revisions, read_reverts, write_reverts,
    write_revisions, RevisionRecord, SyntheticSpec,
};
use crate::sim::export::{write_summaries, write_trajectory, write_windows};
use crate::sweep::{aggregate_phase_diagram, run_sweep, write_aggregate, write_records, Axis, GridSpec};

pub use config::load_config;

#[derive(Debug, Parser)]
#[command(name = "editwar", version, about = "Edit-war simulation and revert-log analysis")]
pub struct Cli {
    /// Progress messages on stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    /// Suppress input warnings.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write trajectory, window and summary CSVs.
    Simulate(SimulateArgs),
    /// Run a two-axis parameter sweep and its phase diagram.
    Sweep(SweepArgs),
    /// Detect identity reverts in a revision log.
    DetectReverts(DetectArgs),
    /// Count revert motifs against a shuffled null model.
    Motifs(MotifArgs),
    /// Compare bot and human reverting pairs.
    Cohorts(CohortArgs),
    /// Generate a synthetic revision log from a TOML spec.
    GenSynthetic(GenArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `key = value` parameter file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Parameter override `key=value`; repeatable, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `name=v1,v2,...`
    #[arg(long)]
    pub axis1: String,
    /// `name=v1,v2,...`
    #[arg(long)]
    pub axis2: String,
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// `csv` or `jsonl`.
    #[arg(long, default_value = "csv")]
    pub format: String,
    /// `latest` or `all`.
    #[arg(long, default_value = "latest")]
    pub attribution: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the revert network as GraphML.
    #[arg(long)]
    pub network: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MotifArgs {
    #[arg(long)]
    pub reverts: PathBuf,
    #[arg(long)]
    pub revisions: PathBuf,
    #[arg(long, default_value = "csv")]
    pub revisions_format: String,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: u64,
    #[arg(long, default_value_t = 1000)]
    pub shuffles: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// `article-shuffle` or `global-shuffle`.
    #[arg(long, default_value = "article-shuffle")]
    pub null: String,
    /// `all-pairs` or `consecutive`.
    #[arg(long, default_value = "all-pairs")]
    pub pairing: String,
    /// Pair events across articles.
    #[arg(long)]
    pub cross_article: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CohortArgs {
    #[arg(long)]
    pub reverts: PathBuf,
    #[arg(long)]
    pub revisions: PathBuf,
    #[arg(long, default_value = "csv")]
    pub revisions_format: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the planted revert schedule.
    #[arg(long)]
    pub planted: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn input_err(path: &Path, e: impl Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn open_input(path: &Path) -> CliResult<BufReader<std::fs::File>> {
    std::fs::File::open(path).map(BufReader::new).map_err(|e| input_err(path, e))
}

fn write_output<F>(path: &Path, fill: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> crate::Result<()>,
{
    write_atomic(path, |w| fill(w)).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

struct Ctx {
    verbose: bool,
    quiet: bool,
}

impl Ctx {
    fn progress(&self, msg: impl Display) {
        if self.verbose {
            eprintln!("{msg}");
        }
    }

    fn warn(&self, msg: impl Display) {
        if !self.quiet {
            eprintln!("warning: {msg}");
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    let ctx = Ctx {
        verbose: cli.verbose,
        quiet: cli.quiet,
    };
    match &cli.command {
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
        Command::DetectReverts(a) => detect(&ctx, a),
        Command::Motifs(a) => motifs(&ctx, a),
        Command::Cohorts(a) => cohorts(&ctx, a),
        Command::GenSynthetic(a) => gen_synthetic(&ctx, a),
    }
}

fn load(path: Option<&Path>, set: &[String]) -> CliResult<crate::sim::SimConfig> {
    load_config(path, set).map_err(|e| match (e, path) {
        (Error::Io(io), Some(p)) => input_err(p, io),
        (e, _) => e.into(),
    })
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> CliResult<()> {
    let cfg = load(a.config.as_deref(), &a.set)?;
    ctx.progress(format!("simulating N={} seed={}", cfg.n_agents, cfg.seed));
    let (traj, summary) = crate::sim::run(&cfg)?;
    let header = CsvHeader::new("simulate").params(cfg.resolved_pairs());
    write_output(&a.out.join("trajectory.csv"), |w| write_trajectory(w, &header, &traj))?;
    write_output(&a.out.join("windows.csv"), |w| write_windows(w, &header, &traj))?;
    write_output(&a.out.join("summary.csv"), |w| {
        write_summaries(w, &header, &[(cfg.clone(), summary.clone())])
    })?;
    ctx.progress(format!("phase {} after {} steps", summary.phase, summary.steps_run));
    Ok(())
}

fn sweep(ctx: &Ctx, a: &SweepArgs) -> CliResult<()> {
    let base = load(a.config.as_deref(), &a.set)?;
    let spec = GridSpec {
        axis1: Axis::parse(&a.axis1)?,
        axis2: Axis::parse(&a.axis2)?,
        seed_base: base.seed,
        base,
        replicates: a.replicates,
    };
    ctx.progress(format!(
        "sweeping {} x {} cells, {} replicates",
        spec.axis1.values.len(),
        spec.axis2.values.len(),
        spec.replicates
    ));
    let records = run_sweep(&spec, a.workers)?;
    for r in records.iter().filter(|r| r.fail_reason.is_some()) {
        ctx.warn(format!(
            "run {}={} {}={} replicate {} failed: {}",
            spec.axis1.name,
            r.axis1_value,
            spec.axis2.name,
            r.axis2_value,
            r.replicate,
            r.fail_reason.as_deref().unwrap_or("")
        ));
    }
    let header = CsvHeader::new("sweep")
        .params(spec.base.resolved_pairs())
        .param("axis1", format!("{}={}", spec.axis1.name, spec.axis1.values.join(",")))
        .param("axis2", format!("{}={}", spec.axis2.name, spec.axis2.values.join(",")))
        .param("replicates", spec.replicates)
        .param("seed_base", spec.seed_base);
    write_output(&a.out.join("sweep_records.csv"), |w| write_records(w, &header, &spec, &records))?;
    let cells = aggregate_phase_diagram(&records).map_err(|e| Failure::Runtime(e.to_string()))?;
    write_output(&a.out.join("phase_diagram.csv"), |w| write_aggregate(w, &header, &spec, &cells))?;
    Ok(())
}

fn read_revisions(ctx: &Ctx, path: &Path, format: &str) -> CliResult<Vec<RevisionRecord>> {
    let mut input = open_input(path)?;
    let (records, warnings) = parse_revisions(&mut input, format).map_err(|e| match e {
        Error::Io(io) => input_err(path, io),
        e => e.into(),
    })?;
    for w in &warnings {
        ctx.warn(format!("{}: {w}", path.display()));
    }
    Ok(records)
}

fn read_revert_file(path: &Path) -> CliResult<Vec<crate::revisions::RevertEvent>> {
    read_reverts(open_input(path)?).map_err(|e| input_err(path, e))
}

fn detect(ctx: &Ctx, a: &DetectArgs) -> CliResult<()> {
    let attribution = attribution_registry().get(&a.attribution)?;
    let records = read_revisions(ctx, &a.input, &a.format)?;
    let events = detect_all(&records, attribution.as_ref())?;
    ctx.progress(format!("{} revisions, {} revert events", records.len(), events.len()));
    let header = CsvHeader::new("detect-reverts")
        .param("input", a.input.display())
        .param("format", &a.format)
        .param("attribution", attribution.name())
        .param("seed", "none")
        .param("revisions", records.len())
        .param("events", events.len());
    write_output(&a.out, |w| write_reverts(w, &header, &events))?;
    if let Some(p) = &a.network {
        let net = build_revert_network(&events, &records);
        ctx.progress(format!("network: {} nodes, {} triangles", net.nodes.len(), net.triangle_count()));
        write_output(p, |w| net.write_graphml(w))?;
    }
    Ok(())
}

fn motifs(ctx: &Ctx, a: &MotifArgs) -> CliResult<()> {
    let opts = AnalysisOptions {
        motif: MotifOptions {
            window: a.window,
            cross_article: a.cross_article,
            pairing: pairing_registry().get(&a.pairing)?,
        },
        n_shuffles: a.shuffles,
        seed: a.seed,
        null_model: null_registry().get(&a.null)?,
    };
    if a.shuffles < 2 {
        return Err(Failure::Input("--shuffles must be at least 2".into()));
    }
    let events = read_revert_file(&a.reverts)?;
    let revisions = read_revisions(ctx, &a.revisions, &a.revisions_format)?;
    ctx.progress(format!("{} events, {} shuffles", events.len(), a.shuffles));
    let report = analyze_motifs(&events, &revisions, &opts)?;
    for who in &report.missing_editors {
        ctx.warn(format!("editor `{who}` absent from revision log; experience 0"));
    }
    let header = CsvHeader::new("motifs")
        .param("reverts", a.reverts.display())
        .param("revisions", a.revisions.display());
    write_output(&a.out, |w| write_motif_report(w, &header, &report))
}

fn cohorts(ctx: &Ctx, a: &CohortArgs) -> CliResult<()> {
    let events = read_revert_file(&a.reverts)?;
    let revisions = read_revisions(ctx, &a.revisions, &a.revisions_format)?;
    let histories = build_pair_histories(&events, &revisions)?;
    ctx.progress(format!("{} pairs", histories.len()));
    let header = CsvHeader::new("cohorts")
        .param("reverts", a.reverts.display())
        .param("revisions", a.revisions.display())
        .param("seed", "none");
    let summary = pace_and_persistence(&histories);
    let table = reverted_fraction(&revisions, &events)?;
    let structure = structure_absence_check(&histories, &revisions);
    write_output(&a.out.join("cohorts.csv"), |w| write_cohort_report(w, &header, &summary))?;
    write_output(&a.out.join("reverted_fraction.csv"), |w| write_reverted_fraction(w, &header, &table))?;
    write_output(&a.out.join("structure.csv"), |w| write_structure(w, &header, &structure))?;
    Ok(())
}

fn write_planted<W: Write>(out: W, header: &CsvHeader, planted: &[PlantedRevert]) -> crate::Result<()> {
    let mut w = header.writer(out)?;
    w.write_record(["article_id", "time", "reverter", "reverted"])?;
    for p in planted {
        w.write_record([p.article.as_str(), &p.time.to_string(), &p.reverter, &p.reverted])?;
    }
    w.flush()?;
    Ok(())
}

fn gen_synthetic(ctx: &Ctx, a: &GenArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.spec).map_err(|e| input_err(&a.spec, e))?;
    let mut spec = SyntheticSpec::from_toml(&text)?;
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    let log = generate_synthetic_log(&spec)?;
    ctx.progress(format!(
        "{} revisions, {} planted reverts",
        log.revisions.len(),
        log.planted.len()
    ));
    let header = CsvHeader::new("gen-synthetic")
        .param("spec", a.spec.display())
        .param("seed", spec.seed)
        .param("horizon", spec.horizon);
    write_output(&a.out, |w| write_revisions(w, &header, &log.revisions))?;
    if let Some(p) = &a.planted {
        write_output(p, |w| write_planted(w, &header, &log.planted))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_subcommand() {
        for args in [
            vec!["editwar", "simulate", "--out", "d", "--set", "eps=0.3", "--set", "n_agents=10"],
            vec!["editwar", "sweep", "--axis1", "eps_a=0.1,0.2", "--axis2", "renewal_p=0", "--out", "d"],
            vec!["editwar", "detect-reverts", "--in", "f", "--format", "jsonl", "--attribution", "all", "--out", "o"],
            vec!["editwar", "motifs", "--reverts", "r", "--revisions", "v", "--window", "60", "--shuffles", "5", "--seed", "3", "--out", "o"],
            vec!["editwar", "cohorts", "--reverts", "r", "--revisions", "v", "--out", "d"],
            vec!["editwar", "gen-synthetic", "--spec", "s", "--out", "o", "--seed", "9"],
        ] {
            assert!(Cli::try_parse_from(&args).is_ok(), "{args:?}");
        }
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_cli(["editwar", "frobnicate"]), 1);
        assert_eq!(run_cli(["editwar", "simulate"]), 1);
        assert_eq!(run_cli(["editwar", "--help"]), 0);
    }

    #[test]
    fn missing_input_exits_one() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.csv");
        let code = run_cli([
            "editwar",
            "detect-reverts",
            "--in",
            "/nonexistent/revs.csv",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 1);
        assert!(!out.exists());
    }

    #[test]
    fn bad_override_exits_one() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        assert_eq!(run_cli(["editwar", "-q", "simulate", "--out", d, "--set", "eps=1.5"]), 1);
        assert_eq!(run_cli(["editwar", "-q", "simulate", "--out", d, "--set", "nope=1"]), 1);
    }
}
