//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input/flags or I/O failure, 2 when the
//! data admit no analysis (tied totals, consensus collapse).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use itemfair_core::groups::compare_groups;
use itemfair_core::irtgen::GenerateError;
use itemfair_core::{
    classify_region, generate, item_total_correlation, normalize, CohortSpec, ConsensusConfig,
    ConsensusError, CutoffRule, FitError, GroupError, IrtItem, ThetaDistribution,
};
use serde::Deserialize;
use thiserror::Error;

use crate::csv_format::{parse_score_csv, write_score_csv, CsvError};
use crate::report::{groups_to_json, groups_to_text, Report};
use crate::svg::render_plane;

#[derive(Debug, Parser)]
#[command(
    name = "itemfair",
    version,
    about = "Identify unfair test items from score matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit item lines, eliminate unfair items and write reports.
    Analyze(AnalyzeArgs),
    /// Draw a synthetic exam from 3PL item parameters.
    Generate(GenerateArgs),
    /// Compare item distances across groups that sat the same test.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Mad,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotArg {
    Svg,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaArg {
    Uniform,
    Normal,
}

#[derive(Debug, Args)]
pub struct CutoffArgs {
    #[arg(long, value_enum, default_value = "mad")]
    pub cutoff_rule: RuleArg,
    #[arg(long, default_value_t = 0.2)]
    pub fixed_cutoff: f64,
    #[arg(long, default_value_t = 3.0)]
    pub mad_multiplier: f64,
    #[arg(long, default_value_t = 0.1)]
    pub cutoff_floor: f64,
    /// Defaults to the number of items.
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

impl CutoffArgs {
    fn config(&self) -> Result<ConsensusConfig, CliError> {
        let cfg = ConsensusConfig {
            cutoff_rule: match self.cutoff_rule {
                RuleArg::Mad => CutoffRule::MadScaled,
                RuleArg::Fixed => CutoffRule::Fixed,
            },
            mad_multiplier: self.mad_multiplier,
            cutoff_floor: self.cutoff_floor,
            fixed_cutoff: self.fixed_cutoff,
            max_iterations: self.max_iterations,
        };
        cfg.validate().map_err(CliError::Consensus)?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Score CSV.
    pub input: PathBuf,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "svg")]
    pub plot: PlotArg,
    /// Format of the summary printed to stdout.
    #[arg(long, value_enum, default_value = "text")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// JSON array of `{"a", "b", "c", "cap"}` objects (`cap` defaults to 1).
    #[arg(long)]
    pub items: PathBuf,
    #[arg(long)]
    pub examinees: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    pub theta: ThetaArg,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub theta_low: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub theta_high: f64,
    /// Output CSV; the truth record goes next to it as `<stem>.truth.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// `LABEL=PATH`, once per group.
    #[arg(long = "group", required = true)]
    pub groups: Vec<String>,
    #[command(flatten)]
    pub cutoff: CutoffArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: FormatArg,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: CsvError },
    #[error("{path}: malformed item spec: {message}")]
    ItemSpec { path: PathBuf, message: String },
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Consensus(ConsensusError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn is_degenerate(e: &ConsensusError) -> bool {
    matches!(
        e,
        ConsensusError::Fit(FitError::DegenerateCohort) | ConsensusError::Collapse { .. }
    )
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Consensus(e) if is_degenerate(e) => 2,
            CliError::Group(GroupError::Consensus { source, .. }) if is_degenerate(source) => 2,
            _ => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn load_scores(path: &Path) -> Result<itemfair_core::ScoreMatrix, CliError> {
    parse_score_csv(&read(path)?).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Files written by `analyze`, in write order.
pub fn analyze(args: &AnalyzeArgs) -> Result<(Report, Vec<PathBuf>), CliError> {
    let cfg = args.cutoff.config()?;
    let raw = load_scores(&args.input)?;
    let report = Report::build(&raw, &cfg).map_err(CliError::Consensus)?;
    create_dir(&args.out_dir)?;
    let mut written = Vec::new();
    let mut emit = |name: String, contents: &str| -> Result<(), CliError> {
        let path = args.out_dir.join(name);
        write(&path, contents)?;
        written.push(path);
        Ok(())
    };
    emit("report.json".into(), &report.to_json())?;
    emit("report.txt".into(), &report.to_text())?;

    if args.plot == PlotArg::Svg {
        let nm = normalize(&raw);
        for it in &report.iterations {
            let columns: Vec<usize> = it
                .points
                .iter()
                .map(|p| {
                    nm.item_index(&p.item_id)
                        .expect("report item ids come from the input")
                })
                .collect();
            let totals = nm.subset_totals(&columns);
            let regions: Vec<_> = it
                .points
                .iter()
                .zip(&columns)
                .map(|(p, &i)| {
                    classify_region(p, item_total_correlation(&nm.column(i), &totals), it.d_f)
                })
                .collect();
            emit(
                format!("plane_iter{}.svg", it.index),
                &render_plane(&it.points, &regions, it.d_f),
            )?;
        }
        let mut points = Vec::new();
        let mut regions = Vec::new();
        for c in &report.classic {
            let point = report
                .iterations
                .iter()
                .rev()
                .find_map(|it| it.points.iter().find(|p| p.item_id == c.id))
                .expect("every item is fitted in the first round");
            points.push(point.clone());
            regions.push(c.region);
        }
        let final_d_f = report
            .iterations
            .last()
            .map_or(cfg.cutoff_floor, |it| it.d_f);
        emit(
            "plane_final.svg".into(),
            &render_plane(&points, &regions, final_d_f),
        )?;
    }
    Ok((report, written))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ItemSpecFile {
    List(Vec<IrtItem>),
    Wrapped { items: Vec<IrtItem> },
}

fn truth_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scores".into());
    out.with_file_name(format!("{stem}.truth.json"))
}

/// Returns the CSV path and the truth sidecar path.
pub fn generate_exam(args: &GenerateArgs) -> Result<(PathBuf, PathBuf), CliError> {
    let text = read(&args.items)?;
    let spec: ItemSpecFile = serde_json::from_str(&text).map_err(|e| CliError::ItemSpec {
        path: args.items.clone(),
        message: e.to_string(),
    })?;
    let items = match spec {
        ItemSpecFile::List(items) | ItemSpecFile::Wrapped { items } => items,
    };
    if args.examinees == 0 {
        return Err(CliError::Usage("--examinees must be at least 2".into()));
    }
    let cohort = CohortSpec {
        n_examinees: args.examinees,
        theta_low: args.theta_low,
        theta_high: args.theta_high,
        distribution: match args.theta {
            ThetaArg::Uniform => ThetaDistribution::Uniform,
            ThetaArg::Normal => ThetaDistribution::Normal,
        },
        seed: args.seed,
    };
    let exam = generate(&items, &cohort)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write(&args.out, &write_score_csv(&exam.matrix))?;
    let truth = truth_path(&args.out);
    let mut json = serde_json::to_string_pretty(&exam.truth).expect("truth serializes");
    json.push('\n');
    write(&truth, &json)?;
    Ok((args.out.clone(), truth))
}

pub fn compare(args: &CompareArgs) -> Result<itemfair_core::GroupComparison, CliError> {
    let cfg = args.cutoff.config()?;
    let groups = args
        .groups
        .iter()
        .map(|spec| {
            let (label, path) = spec
                .split_once('=')
                .filter(|(l, p)| !l.is_empty() && !p.is_empty())
                .ok_or_else(|| {
                    CliError::Usage(format!("--group expects LABEL=PATH, got `{spec}`"))
                })?;
            Ok((label.to_string(), normalize(&load_scores(Path::new(path))?)))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let cmp = compare_groups(&groups, &cfg)?;
    create_dir(&args.out_dir)?;
    write(&args.out_dir.join("groups.json"), &groups_to_json(&cmp))?;
    write(&args.out_dir.join("groups.txt"), &groups_to_text(&cmp))?;
    Ok(cmp)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let out = |stdout: &mut dyn Write, s: &str| {
        // A closed stdout does not invalidate artifacts already on disk.
        let _ = stdout.write_all(s.as_bytes());
    };
    match &cli.command {
        Command::Analyze(args) => {
            let (report, _) = analyze(args)?;
            match args.format {
                FormatArg::Json => out(stdout, &report.to_json()),
                FormatArg::Text => out(stdout, &report.to_text()),
            }
        }
        Command::Generate(args) => {
            let (csv, truth) = generate_exam(args)?;
            out(
                stdout,
                &format!("wrote {} and {}\n", csv.display(), truth.display()),
            );
        }
        Command::Compare(args) => {
            let cmp = compare(args)?;
            match args.format {
                FormatArg::Json => out(stdout, &groups_to_json(&cmp)),
                FormatArg::Text => out(stdout, &groups_to_text(&cmp)),
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
