//! Command implementations behind the `mrenyi` binary.
//!
//! Each `cmd_*` function takes parsed arguments and a writer for standard
//! output, so the commands can be driven from tests without a subprocess.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mrenyi::eval::{
    generate_madelon_like, load_csv, run_benchmark, BenchmarkConfig, Classifier, Dataset,
    FeatureRole, FoldPolicy, LabelColumn, MadelonConfig, SelectionMode,
};
use mrenyi::kernel::SigmaRule;
use mrenyi::selection::{
    feature_gram, label_gram, select, Criterion, SelectionConfig, SelectionTrace,
};
use mrenyi::spectral::{
    gram_entropy, joint_entropy, multivariate_mi, total_correlation, SubsetEntropies,
};
use mrenyi::Order;

/// Environment variable that caps the worker thread count.
pub const THREADS_ENV: &str = "MRENYI_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "mrenyi",
    version,
    about = "Matrix-based Rényi entropy estimation and feature selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy, joint entropy, MI with the label, II, CI and TC of chosen columns.
    Estimate(EstimateArgs),
    /// Greedy feature selection; writes a JSON trace.
    Select(SelectArgs),
    /// Selection plus cross-validated accuracy for every prefix length.
    Benchmark(BenchmarkArgs),
    /// Generate a MADELON-style dataset as CSV plus a roles sidecar.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaRuleArg {
    Fixed,
    Silverman,
    RangeFraction,
    MedianFraction,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Label column, by name or zero-based index (negative counts from the end).
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub label: LabelColumn,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// Entropy order α.
    #[arg(long, default_value_t = 1.01)]
    pub alpha: f64,
    /// Fixed RBF kernel size (with --sigma-rule fixed).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value_t = SigmaRuleArg::Fixed)]
    pub sigma_rule: SigmaRuleArg,
    /// Fraction used by the range-fraction and median-fraction rules.
    #[arg(long, default_value_t = 0.1)]
    pub sigma_fraction: f64,
    /// Skip standardizing continuous columns before fixed-σ kernels.
    #[arg(long)]
    pub no_standardize: bool,
}

impl KernelArgs {
    pub fn rule(&self) -> Result<SigmaRule<f64>> {
        let rule = match self.sigma_rule {
            SigmaRuleArg::Fixed => SigmaRule::Fixed(self.sigma),
            SigmaRuleArg::Silverman => SigmaRule::Silverman,
            SigmaRuleArg::RangeFraction => SigmaRule::RangeFraction(self.sigma_fraction),
            SigmaRuleArg::MedianFraction => SigmaRule::MedianFraction(self.sigma_fraction),
        };
        match rule {
            SigmaRule::Fixed(s) if !(s > 0.0 && s.is_finite()) => {
                bail!("--sigma must be positive, got {s}")
            }
            SigmaRule::RangeFraction(f) | SigmaRule::MedianFraction(f) if !(f > 0.0 && f < 1.0) => {
                bail!("--sigma-fraction must lie in (0, 1), got {f}")
            }
            _ => Ok(rule),
        }
    }

    pub fn order(&self) -> Result<Order> {
        Order::new(self.alpha).with_context(|| format!("invalid --alpha {}", self.alpha))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SelectionArgs {
    /// Equal-width bins for the discrete criteria.
    #[arg(long, default_value_t = 5)]
    pub bins: usize,
    /// MIFS redundancy weight β.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Memory for resident Gram matrices, in bytes (suffixes K, M, G allowed).
    #[arg(long, value_parser = parse_bytes, default_value = "2G")]
    pub mem_budget: u64,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Comma-separated feature names or indices; all features when omitted.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// One of mim, mifs, fou, mrmr, jmi, cmim, matrix-mi.
    #[arg(long, default_value = "matrix-mi")]
    pub method: String,
    /// Number of features to select.
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    MadelonDesk,
    MadelonPaper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Once,
    PerFold,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    /// CSV input; use --preset instead to benchmark generated data.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub label: LabelColumn,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Comma-separated criteria; all seven when omitted.
    #[arg(long = "method", value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Largest feature count to evaluate (default: min(10, d)).
    #[arg(long)]
    pub k: Option<usize>,
    /// auto, loo, or a fold count.
    #[arg(long, default_value = "auto")]
    pub folds: String,
    /// knn<k> or linsvm (default: knn3 for presets, linsvm for CSV data).
    #[arg(long)]
    pub classifier: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Once)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report path; a TSV is written next to it. Standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = Preset::MadelonDesk)]
    pub preset: Preset,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub informative: Option<usize>,
    #[arg(long)]
    pub combinations: Option<usize>,
    #[arg(long)]
    pub probes: Option<usize>,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub noise_scale: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV path; roles go to `<stem>.roles.json` beside it.
    #[arg(long)]
    pub output: PathBuf,
}

/// Parses `1024`, `64K`, `512M`, `2G` (binary multiples).
pub fn parse_bytes(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    let (digits, shift) = match s.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&s[..s.len() - 1], 10),
        Some('M') => (&s[..s.len() - 1], 20),
        Some('G') => (&s[..s.len() - 1], 30),
        _ => (s, 0),
    };
    let base: u64 = digits
        .parse()
        .map_err(|_| format!("not a byte count: {s:?}"))?;
    base.checked_mul(1u64 << shift)
        .ok_or_else(|| format!("byte count overflows: {s:?}"))
}

/// Parses a criterion name with the shared kernel and MIFS settings.
pub fn parse_criterion(name: &str, kernel: &KernelArgs, beta: f64) -> Result<Criterion> {
    Ok(match name.trim().to_ascii_lowercase().as_str() {
        "mim" => Criterion::Mim,
        "mifs" => Criterion::mifs(beta)?,
        "fou" => Criterion::Fou,
        "mrmr" => Criterion::Mrmr,
        "jmi" => Criterion::Jmi,
        "cmim" => Criterion::Cmim,
        "matrix-mi" | "matrixmi" | "ours" => Criterion::matrix_mi(kernel.alpha, kernel.rule()?)?,
        other => {
            bail!("unknown method {other:?}; expected mim, mifs, fou, mrmr, jmi, cmim or matrix-mi")
        }
    })
}

fn selection_config(args: &SelectionArgs, kernel: &KernelArgs) -> Result<SelectionConfig> {
    if args.bins == 0 {
        bail!("--bins must be at least 1");
    }
    Ok(SelectionConfig {
        bins: args.bins,
        standardize: !kernel.no_standardize,
        memory_budget: args.mem_budget,
        ..SelectionConfig::default()
    })
}

fn load(data: &DataArgs, bins: usize) -> Result<Dataset> {
    let dataset = load_csv(&data.data, &data.label)
        .with_context(|| format!("loading {}", data.data.display()))?;
    Ok(dataset.reflag(bins))
}

fn resolve_column(dataset: &Dataset, key: &str) -> Result<usize> {
    if let Some(j) = dataset.feature_index(key) {
        return Ok(j);
    }
    match key.parse::<usize>() {
        Ok(j) if j < dataset.n_features() => Ok(j),
        _ => bail!("no feature named {key:?} (d = {})", dataset.n_features()),
    }
}

/// Writes pretty JSON plus a newline to `path` or, when absent, to `stdout`.
fn emit_json<T: Serialize>(value: &T, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => {
            let mut f = BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            );
            writeln!(f, "{text}")?;
            f.flush()?;
        }
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ColumnEntropy {
    pub column: String,
    pub bits: f64,
}

#[derive(Debug, Serialize)]
pub struct EstimateReport {
    pub dataset: String,
    pub alpha: f64,
    pub sigma: SigmaRule<f64>,
    pub columns: Vec<String>,
    pub entropies: Vec<ColumnEntropy>,
    pub label_entropy: f64,
    pub joint_entropy: f64,
    /// `I_α(label; {columns})`.
    pub multivariate_mi: f64,
    /// Present for exactly two columns.
    pub mutual_information: Option<f64>,
    /// Present for two or more columns.
    pub interaction_information: Option<f64>,
    pub co_information: Option<f64>,
    pub total_correlation: f64,
}

pub fn cmd_estimate(args: &EstimateArgs, stdout: &mut dyn Write) -> Result<EstimateReport> {
    let order = args.kernel.order()?;
    let rule = args.kernel.rule()?;
    let dataset = load(&args.data, mrenyi::discrete::DEFAULT_BINS)?;
    let indices: Vec<usize> = if args.columns.is_empty() {
        (0..dataset.n_features()).collect()
    } else {
        args.columns
            .iter()
            .map(|c| resolve_column(&dataset, c))
            .collect::<Result<_>>()?
    };
    let k = indices.len();
    if k > mrenyi::spectral::MAX_SUBSET_VARIABLES {
        bail!(
            "II/CI enumerate 2^k subsets; at most {} columns, got {k}",
            mrenyi::spectral::MAX_SUBSET_VARIABLES
        );
    }
    let grams = indices
        .iter()
        .map(|&j| feature_gram::<f64>(&dataset, j, rule, !args.kernel.no_standardize))
        .collect::<mrenyi::Result<Vec<_>>>()?;
    let refs: Vec<_> = grams.iter().collect();
    let label = label_gram::<f64>(dataset.labels())?;

    let entropies = indices
        .iter()
        .zip(&grams)
        .map(|(&j, g)| {
            Ok(ColumnEntropy {
                column: dataset.feature_names()[j].clone(),
                bits: gram_entropy(g, order)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (ii, ci) = if k >= 2 {
        let subsets = SubsetEntropies::compute(&refs, order)?;
        (
            Some(subsets.interaction_information()),
            Some(subsets.co_information()),
        )
    } else {
        (None, None)
    };
    let report = EstimateReport {
        dataset: dataset.name().to_string(),
        alpha: args.kernel.alpha,
        sigma: rule,
        columns: indices
            .iter()
            .map(|&j| dataset.feature_names()[j].clone())
            .collect(),
        entropies,
        label_entropy: gram_entropy(&label, order)?,
        joint_entropy: joint_entropy(&refs, order)?.bits,
        multivariate_mi: multivariate_mi(&label, &refs, order)?.bits,
        mutual_information: if k == 2 { ii } else { None },
        interaction_information: ii,
        co_information: ci,
        total_correlation: total_correlation(&refs, order)?.bits,
    };
    emit_json(&report, args.output.as_deref(), stdout)?;
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct SelectReport {
    pub dataset: String,
    pub selected_names: Vec<String>,
    pub trace: SelectionTrace,
}

pub fn cmd_select(args: &SelectArgs, stdout: &mut dyn Write) -> Result<SelectReport> {
    let criterion = parse_criterion(&args.method, &args.kernel, args.selection.beta)?;
    let config = selection_config(&args.selection, &args.kernel)?;
    let dataset = load(&args.data, config.bins)?;
    let d = dataset.n_features();
    if args.k == 0 || args.k > d {
        bail!(
            "--k {} is out of range: the dataset has d = {d} features",
            args.k
        );
    }
    let trace = select(criterion, &dataset, args.k, &config)?;
    let report = SelectReport {
        dataset: dataset.name().to_string(),
        selected_names: trace
            .selected
            .iter()
            .map(|&j| dataset.feature_names()[j].clone())
            .collect(),
        trace,
    };
    emit_json(&report, args.output.as_deref(), stdout)?;
    Ok(report)
}

fn preset_config(preset: Preset, seed: u64) -> MadelonConfig {
    match preset {
        Preset::MadelonDesk => MadelonConfig::desk(seed),
        Preset::MadelonPaper => MadelonConfig::paper(seed),
    }
}

pub fn cmd_benchmark(args: &BenchmarkArgs, stdout: &mut dyn Write) -> Result<mrenyi::EvalReport> {
    let methods: Vec<Criterion> = if args.methods.is_empty() {
        vec!["mifs", "fou", "mim", "mrmr", "jmi", "cmim", "matrix-mi"]
            .into_iter()
            .map(|m| parse_criterion(m, &args.kernel, args.selection.beta))
            .collect::<Result<_>>()?
    } else {
        args.methods
            .iter()
            .map(|m| parse_criterion(m, &args.kernel, args.selection.beta))
            .collect::<Result<_>>()?
    };
    let selection = selection_config(&args.selection, &args.kernel)?;
    let folds: FoldPolicy = args.folds.parse().context("invalid --folds")?;
    let classifier: Classifier = match (&args.classifier, args.preset) {
        (Some(c), _) => c.parse().context("invalid --classifier")?,
        (None, Some(_)) => Classifier::knn3(),
        (None, None) => Classifier::linear_svm(),
    };
    let dataset = match (&args.data, args.preset) {
        (Some(path), _) => load(
            &DataArgs {
                data: path.clone(),
                label: args.label.clone(),
            },
            selection.bins,
        )?,
        (None, Some(p)) => generate_madelon_like(&preset_config(p, args.seed))?.dataset,
        (None, None) => bail!("give --data or --preset"),
    };
    let max_features = args.k.unwrap_or_else(|| dataset.n_features().min(10));
    if max_features == 0 || max_features > dataset.n_features() {
        bail!(
            "--k {max_features} is out of range: the dataset has d = {} features",
            dataset.n_features()
        );
    }
    let config = BenchmarkConfig {
        max_features,
        classifier,
        folds,
        mode: match args.mode {
            ModeArg::Once => SelectionMode::Once,
            ModeArg::PerFold => SelectionMode::PerFold,
        },
        selection,
        seed: args.seed,
    };
    let report = run_benchmark(&dataset, &methods, &config)?;
    emit_json(&report, args.output.as_deref(), stdout)?;
    if let Some(path) = &args.output {
        let tsv = path.with_extension("tsv");
        let mut f = BufWriter::new(
            File::create(&tsv).with_context(|| format!("creating {}", tsv.display()))?,
        );
        report.write_tsv(&mut f)?;
        f.flush()?;
    }
    Ok(report)
}

#[derive(Debug, Serialize)]
struct RolesFile<'a> {
    config: &'a MadelonConfig,
    columns: Vec<ColumnRole<'a>>,
}

#[derive(Debug, Serialize)]
struct ColumnRole<'a> {
    name: &'a str,
    role: FeatureRole,
}

/// Path of the roles sidecar for a CSV path.
pub fn roles_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned());
    csv.with_file_name(format!("{stem}.roles.json"))
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(PathBuf, PathBuf)> {
    let mut config = preset_config(args.preset, args.seed);
    config.samples = args.samples.unwrap_or(config.samples);
    config.informative = args.informative.unwrap_or(config.informative);
    config.combinations = args.combinations.unwrap_or(config.combinations);
    config.probes = args.probes.unwrap_or(config.probes);
    config.noise_scale = args.noise_scale.unwrap_or(config.noise_scale);
    config.clusters = args.clusters.or(config.clusters);
    let data = generate_madelon_like(&config)?;

    let csv = args.output.clone();
    let file = File::create(&csv).with_context(|| format!("creating {}", csv.display()))?;
    data.dataset.write_csv(BufWriter::new(file))?;
    let roles = RolesFile {
        config: &config,
        columns: data
            .dataset
            .feature_names()
            .iter()
            .zip(&data.roles)
            .map(|(name, &role)| ColumnRole { name, role })
            .collect(),
    };
    let sidecar = roles_path(&csv);
    emit_json(&roles, Some(&sidecar), &mut std::io::sink())?;
    Ok((csv, sidecar))
}

/// Applies the thread-count override, if set.
pub fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .parse()
            .with_context(|| format!("{THREADS_ENV} must be a positive integer"))?;
        if threads == 0 {
            bail!("{THREADS_ENV} must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, stdout).map(|_| ()),
        Command::Select(a) => cmd_select(a, stdout).map(|_| ()),
        Command::Benchmark(a) => cmd_benchmark(a, stdout).map(|_| ()),
        Command::Synth(a) => {
            let (csv, roles) = cmd_synth(a)?;
            log::info!("wrote {} and {}", csv.display(), roles.display());
            Ok(())
        }
    }
}
