use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use csisense::error::{Error, Result, StageExt};
use csisense::features::{FeatureRow, WindowConfig};
use csisense::harness::{
    self, feature_table, feature_tables, prefix_selections, split_dataset, Antennas, CaseSpec,
    Report, ReportFormat,
};
use csisense::io::{load_dataset, save_dataset};
use csisense::models::{Classifier, ModelKind, TrainConfig};
use csisense::preprocess::{preprocess, real_to_csi};
use csisense::synth::{generate_corpus, CorpusConfig};
use csisense::types::{parse_antenna_list, Dataset, Experiment};

#[derive(Parser)]
#[command(
    name = "csisense",
    version,
    about = "Moving-object classification from massive-MIMO CSI"
)]
struct Cli {
    /// Overrides every seed given on the command line or in config files.
    #[arg(long, env = "CSISENSE_SEED", global = true)]
    seed_override: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset from a corpus configuration.
    Generate {
        /// Corpus configuration (JSON); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump the preprocessed amplitude and phase tensors.
    Preprocess {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        amplitude_out: PathBuf,
        #[arg(long)]
        phase_out: PathBuf,
    },
    /// Export feature rows of the experiments in a case.
    Features {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        case: u8,
        #[arg(long, default_value = "all")]
        antennas: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one model on a case's training split and save it.
    Train {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a saved model on the test split it was trained against.
    Eval {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        model_file: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Extract features, train and evaluate end to end.
    Run {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "both")]
        model: ModelSelection,
        /// Consecutive seeds to evaluate, starting at --seed.
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Report format; inferred from the report extension by default.
        #[arg(long)]
        format: Option<String>,
    },
    /// Accuracy against the number of antennas.
    Ablate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "both")]
        model: ModelSelection,
        #[arg(long, value_delimiter = ',', required = true)]
        antenna_counts: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    case: u8,
    /// 1-based antenna indices such as `1,2,3`, or `all`.
    #[arg(long, default_value = "all")]
    antennas: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Training hyperparameters (JSON).
    #[arg(long)]
    train_config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Svm,
    Nn,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Svm => ModelKind::Svm,
            ModelArg::Nn => ModelKind::Nn,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelSelection {
    Svm,
    Nn,
    Both,
}

impl ModelSelection {
    fn kinds(self) -> Vec<ModelKind> {
        match self {
            ModelSelection::Svm => vec![ModelKind::Svm],
            ModelSelection::Nn => vec![ModelKind::Nn],
            ModelSelection::Both => ModelKind::ALL.to_vec(),
        }
    }
}

struct Context {
    seed_override: Option<u64>,
}

impl Context {
    fn seed(&self, given: u64) -> u64 {
        self.seed_override.unwrap_or(given)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn report_format(path: Option<&Path>, explicit: Option<&str>) -> Result<ReportFormat> {
    match (explicit, path) {
        (Some(f), _) => f.parse(),
        (None, Some(p)) => Ok(ReportFormat::from_path(p)),
        (None, None) => Ok(ReportFormat::Text),
    }
}

struct Prepared {
    dataset: Dataset,
    spec: CaseSpec,
    antennas: Antennas,
    seed: u64,
    train: TrainConfig,
}

fn prepare(ctx: &Context, args: &RunArgs) -> Result<Prepared> {
    let spec = CaseSpec::case(args.case).stage("case")?;
    let antennas = parse_antenna_list(&args.antennas).stage("antennas")?;
    let train = match &args.train_config {
        Some(p) => read_json(p).stage("train config")?,
        None => TrainConfig::default(),
    };
    let dataset = load_dataset(&args.input).stage("load")?;
    dataset.check_consistent().stage("load")?;
    Ok(Prepared {
        dataset,
        spec,
        antennas,
        seed: ctx.seed(args.seed),
        train,
    })
}

fn full_window() -> WindowConfig {
    WindowConfig::with_dims(harness::MAX_FEATURE_DIMS.0, harness::MAX_FEATURE_DIMS.1)
}

fn generate(ctx: &Context, config: Option<&Path>, out: &Path) -> Result<()> {
    let mut cfg: CorpusConfig = match config {
        Some(p) => read_json(p).stage("config")?,
        None => CorpusConfig::default(),
    };
    cfg.gen.seed = ctx.seed(cfg.gen.seed);
    let d = generate_corpus(&cfg).stage("generate")?;
    save_dataset(&d, out).stage("save")?;
    eprintln!("wrote {} experiments to {}", d.len(), out.display());
    Ok(())
}

fn dump_preprocessed(input: &Path, amp_out: &Path, phase_out: &Path) -> Result<()> {
    let d = load_dataset(input).stage("load")?;
    let mut amps = Vec::with_capacity(d.len());
    let mut phases = Vec::with_capacity(d.len());
    for e in &d.experiments {
        let pre = preprocess(&e.csi)?;
        let wrap = |csi| Experiment {
            csi,
            label: e.label,
            scenario: e.scenario,
            seed: e.seed,
        };
        amps.push(wrap(
            real_to_csi(pre.amplitude.values(), &pre.timestamps).stage("dump")?,
        ));
        phases.push(wrap(
            real_to_csi(pre.phase.values(), &pre.timestamps).stage("dump")?,
        ));
    }
    save_dataset(&Dataset::new(amps), amp_out).stage("save")?;
    save_dataset(&Dataset::new(phases), phase_out).stage("save")?;
    Ok(())
}

fn export_features(input: &Path, case: u8, antennas: &str, out: &Path) -> Result<()> {
    let spec = CaseSpec::case(case).stage("case")?;
    let antennas = parse_antenna_list(antennas).stage("antennas")?;
    let d = load_dataset(input).stage("load")?;
    let kept: Vec<Experiment> = d
        .experiments
        .into_iter()
        .filter(|e| spec.label_of(e.label).is_some())
        .collect();
    let t = feature_tables(kept.into_iter().map(Ok), &[antennas], &spec.window_config())?.remove(0);
    let rows: Vec<FeatureRow> = t
        .rows
        .rows()
        .into_iter()
        .zip(t.events.iter().zip(&t.scenarios))
        .map(|(x, (&event, &scenario))| FeatureRow {
            event,
            label: spec.label_of(event).expect("filtered"),
            scenario,
            x: x.to_vec(),
        })
        .collect();
    fs::write(out, serde_json::to_string_pretty(&rows)? + "\n")?;
    Ok(())
}

/// Train split and test split matrices for a prepared run.
fn split_matrices(p: &Prepared) -> Result<[(ndarray::Array2<f64>, Vec<u8>); 2]> {
    let t = feature_table(&p.dataset, &p.antennas, &full_window())?;
    let x = t.project(p.spec.feature_dims)?;
    let split_seed = csisense::synth::derive_seed(p.seed, 0);
    let split = split_dataset(&p.dataset, &p.spec, split_seed).stage("split")?;
    let take = |idx: &[usize]| {
        let y = idx
            .iter()
            .map(|&i| p.spec.label_of(t.events[i]).expect("case event"))
            .collect();
        (x.select(ndarray::Axis(0), idx), y)
    };
    Ok([take(&split.train), take(&split.test)])
}

fn train(ctx: &Context, args: &RunArgs, kind: ModelKind, out: &Path) -> Result<()> {
    let p = prepare(ctx, args)?;
    let [(x, y), _] = split_matrices(&p)?;
    let cfg = TrainConfig {
        seed: csisense::synth::derive_seed(p.seed, 1),
        ..p.train.clone()
    };
    let model = Classifier::train(kind, &x, &y, &cfg).stage("train")?;
    model.save(out).stage("save")?;
    eprintln!(
        "trained {kind} on {} experiments, saved to {}",
        x.nrows(),
        out.display()
    );
    Ok(())
}

fn eval(ctx: &Context, args: &RunArgs, model_file: &Path, report: Option<&Path>) -> Result<()> {
    let p = prepare(ctx, args)?;
    let model = Classifier::load(model_file).stage("load model")?;
    let [(x_train, _), (x, y)] = split_matrices(&p)?;
    let pred = model.predict_batch(&x).stage("evaluate")?;
    let confusion = harness::confusion_matrix(&y, &pred).stage("evaluate")?;
    let rr = harness::RunReport {
        case: p.spec.id,
        scenario: None,
        model: model.kind(),
        antennas: p
            .antennas
            .as_ref()
            .map(|a| a.iter().map(|i| i + 1).collect()),
        rf_chains: p.antennas.as_ref().map_or(
            p.dataset
                .experiments
                .first()
                .map_or(0, |e| e.csi.rf_chains()),
            Vec::len,
        ),
        seed: p.seed,
        train_size: x_train.nrows(),
        test_size: x.nrows(),
        accuracy: harness::accuracy(&confusion),
        confusion,
    };
    let format = report_format(report, None)?;
    write_output(report, &rr.render(format)?)
}

fn run(
    ctx: &Context,
    args: &RunArgs,
    kinds: &[ModelKind],
    seeds: usize,
    report: Option<&Path>,
    format: Option<&str>,
) -> Result<()> {
    let format = report_format(report, format)?;
    let p = prepare(ctx, args)?;
    if seeds == 0 {
        return Err(Error::Argument("--seeds must be positive".into()));
    }
    let t = feature_table(&p.dataset, &p.antennas, &full_window())?;
    let runs = harness::run_seeds_on_features(&t, &p.spec, kinds, p.seed, seeds, &p.train)?;
    let r = Report::new(runs)?;
    write_output(report, &r.render(format)?)
}

fn ablate(
    ctx: &Context,
    args: &RunArgs,
    kinds: &[ModelKind],
    counts: &[usize],
    seeds: usize,
    report: Option<&Path>,
    format: Option<&str>,
) -> Result<()> {
    let format = report_format(report, format)?;
    let p = prepare(ctx, args)?;
    if seeds == 0 {
        return Err(Error::Argument("--seeds must be positive".into()));
    }
    let m = p
        .dataset
        .experiments
        .first()
        .map_or(0, |e| e.csi.rf_chains());
    if let Some(&k) = counts.iter().find(|&&k| k == 0 || k > m) {
        return Err(
            Error::Argument(format!("antenna count {k} outside 1..={m}")).in_stage("antennas"),
        );
    }
    let tables = feature_tables(
        p.dataset.experiments.iter().cloned().map(Ok),
        &prefix_selections(counts),
        &full_window(),
    )?;
    let mut runs = Vec::new();
    for t in &tables {
        runs.extend(harness::run_seeds_on_features(
            t, &p.spec, kinds, p.seed, seeds, &p.train,
        )?);
    }
    write_output(report, &Report::new(runs)?.render(format)?)
}

fn dispatch(cli: Cli) -> Result<()> {
    let ctx = Context {
        seed_override: cli.seed_override,
    };
    match cli.command {
        Command::Generate { config, out } => generate(&ctx, config.as_deref(), &out),
        Command::Preprocess {
            input,
            amplitude_out,
            phase_out,
        } => dump_preprocessed(&input, &amplitude_out, &phase_out),
        Command::Features {
            input,
            case,
            antennas,
            out,
        } => export_features(&input, case, &antennas, &out),
        Command::Train {
            run: args,
            model,
            out,
        } => train(&ctx, &args, model.into(), &out),
        Command::Eval {
            run: args,
            model_file,
            report,
        } => eval(&ctx, &args, &model_file, report.as_deref()),
        Command::Run {
            run: args,
            model,
            seeds,
            report,
            format,
        } => run(
            &ctx,
            &args,
            &model.kinds(),
            seeds,
            report.as_deref(),
            format.as_deref(),
        ),
        Command::Ablate {
            run: args,
            model,
            antenna_counts,
            seeds,
            report,
            format,
        } => ablate(
            &ctx,
            &args,
            &model.kinds(),
            &antenna_counts,
            seeds,
            report.as_deref(),
            format.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
