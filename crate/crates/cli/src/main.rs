use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use augbias::io::{self, report, Artifact, RunManifest};
use augbias::metrics::{confusion_rates, evaluate, ConfusionCurves, MetricCurves, Selector};
use augbias::pipeline::run_pipeline;
use augbias::policy::{baseline_remove_augmentation, build_policy, AugPolicy};
use augbias::sim::{class_embeddings, class_taxonomy, intervention_experiment, sweep, SimConfig};
use augbias::taxonomy::{confusion_report, CategoryThresholds, ReportConfig};
use augbias::{metrics, AnnotationSet, LabelMode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "augbias", version, about = "Measure and correct class-level augmentation bias")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Inputs {
    /// Prediction log (JSON Lines).
    #[arg(long)]
    log: PathBuf,
    /// Original labels (JSON Lines).
    #[arg(long)]
    labels: PathBuf,
    /// Multi-label sets (JSON Lines).
    #[arg(long)]
    multilabels: Option<PathBuf>,
    /// Training counts (TSV).
    #[arg(long)]
    counts: Option<PathBuf>,
    /// Accept unknown fields in JSON Lines inputs.
    #[arg(long)]
    lax: bool,
}

impl Inputs {
    fn load(&self) -> Result<(augbias::PredictionLog, AnnotationSet)> {
        let log = io::parse_prediction_log(&self.log, self.lax)?;
        let ann = io::parse_annotations(&self.labels, self.multilabels.as_deref(), self.counts.as_deref(), self.lax)?;
        Ok((log, ann))
    }

    fn stamp(&self, mut m: RunManifest) -> Result<RunManifest> {
        m = m.with_input("log", &self.log)?.with_input("labels", &self.labels)?;
        if let Some(p) = &self.multilabels {
            m = m.with_input("multilabels", p)?;
        }
        if let Some(p) = &self.counts {
            m = m.with_input("counts", p)?;
        }
        Ok(m)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Original,
    Real,
}

impl From<Mode> for LabelMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Original => LabelMode::Original,
            Mode::Real => LabelMode::Multilabel,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Remove,
}

#[derive(Subcommand)]
enum Command {
    /// Per-class accuracy, FP and FN curves.
    Evaluate {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Confusion-rate curves of every confused class pair.
    Confusions {
        #[command(flatten)]
        inputs: Inputs,
        /// Keep only pairs whose confusion grows at least this much.
        #[arg(long, default_value_t = 0.025)]
        min_delta_cr: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score and categorise the confusions of the most affected classes.
    Categorize {
        /// Output of `evaluate`.
        #[arg(long)]
        metrics: PathBuf,
        /// Output of `confusions`.
        #[arg(long)]
        confusions: PathBuf,
        /// Original labels (JSON Lines).
        #[arg(long)]
        labels: PathBuf,
        /// Multi-label sets, needed for the overlap scores.
        #[arg(long)]
        multilabels: Option<PathBuf>,
        /// Child-parent hypernym edges (TSV).
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        /// Word vectors (TSV).
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Ignore unknown fields in the label files.
        #[arg(long)]
        lax: bool,
        /// Co-occurrence threshold on C_kl.
        #[arg(long, default_value_t = 0.3)]
        t_c: f64,
        /// Co-occurrence threshold on IoU.
        #[arg(long, default_value_t = 0.15)]
        t_iou: f64,
        /// Wu-Palmer threshold for fine-grained pairs.
        #[arg(long, default_value_t = 0.8)]
        t_wn: f64,
        /// Embedding similarity threshold for fine-grained pairs.
        #[arg(long, default_value_t = 0.35)]
        t_emb: f64,
        /// Affected classes: accuracy drop above this (original labels).
        #[arg(long, default_value_t = 0.05)]
        min_drop: f64,
        /// Affected classes: accuracy drop above this (multi-label).
        #[arg(long, default_value_t = 0.04)]
        min_drop_real: f64,
        #[arg(long, default_value_t = 0.025)]
        min_delta_cr: f64,
        /// Leave out classes below this taxonomy node.
        #[arg(long)]
        exclude_subtree: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a class-conditional augmentation policy.
    Policy {
        /// Output of `evaluate`.
        #[arg(long)]
        metrics: PathBuf,
        /// Number of classes to intervene on.
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, value_enum, default_value = "original")]
        mode: Mode,
        /// Build a baseline instead of the FP + FN policy.
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a simulator sweep and write its logs and annotations.
    Simulate {
        /// TOML or JSON simulator config; the canonical scenario if omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compare uniform, removal-baseline and FP + FN policies in the simulator.
    Intervene {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Use this policy instead of building one from the sweep.
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render any output artifact as markdown.
    Report {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate, analyse, build a policy and intervene in one go.
    Pipeline {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn load_config(path: Option<&Path>) -> Result<SimConfig> {
    let Some(path) = path else {
        return Ok(SimConfig::canonical());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => SimConfig::from_json(&text)?,
        _ => SimConfig::from_toml(&text)?,
    };
    Ok(cfg)
}

fn stamp_config(m: RunManifest, path: Option<&Path>) -> Result<RunManifest> {
    match path {
        Some(p) => Ok(m.with_input("config", p)?),
        None => Ok(m),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate { inputs, out } => {
            let (log, ann) = inputs.load()?;
            let curves = evaluate(&log, &ann)?;
            let m = inputs.stamp(RunManifest::new("evaluate", &json!({}))?)?;
            io::write_artifact(&out, &Artifact::new("metrics", m, &curves))?;
        }
        Command::Confusions {
            inputs,
            min_delta_cr,
            out,
        } => {
            let (log, ann) = inputs.load()?;
            let conf = confusion_rates(&log, &ann)?.filtered(min_delta_cr);
            let m = inputs.stamp(RunManifest::new("confusions", &json!({ "min_delta_cr": min_delta_cr }))?)?;
            io::write_artifact(&out, &Artifact::new("confusions", m, &conf))?;
        }
        Command::Categorize {
            metrics: metrics_path,
            confusions,
            labels,
            multilabels,
            taxonomy,
            embeddings,
            lax,
            t_c,
            t_iou,
            t_wn,
            t_emb,
            min_drop,
            min_drop_real,
            min_delta_cr,
            exclude_subtree,
            out,
        } => {
            let curves: MetricCurves = io::read_artifact(&metrics_path, "metrics")?.data;
            let conf: ConfusionCurves = io::read_artifact(&confusions, "confusions")?.data;
            let ann = io::parse_annotations(&labels, multilabels.as_deref(), None, lax)?;
            let tree = taxonomy.as_deref().map(io::parse_taxonomy).transpose()?;
            let table = embeddings.as_deref().map(io::parse_embeddings).transpose()?;
            let config = ReportConfig {
                affected_original: Selector::MinDrop(min_drop),
                affected_real: Selector::MinDrop(min_drop_real),
                exclude_subtree,
                min_delta_cr,
                thresholds: CategoryThresholds {
                    t_c,
                    t_iou,
                    t_wn,
                    t_emb,
                },
            };
            let rep = confusion_report(&conf, &curves, &ann, tree.as_ref(), table.as_ref(), &config)?;
            let mut m = RunManifest::new("categorize", &config)?
                .with_input("metrics", &metrics_path)?
                .with_input("confusions", &confusions)?
                .with_input("labels", &labels)?;
            for (name, p) in [("multilabels", &multilabels), ("taxonomy", &taxonomy), ("embeddings", &embeddings)] {
                if let Some(p) = p {
                    m = m.with_input(name, p)?;
                }
            }
            io::write_artifact(&out, &Artifact::new("confusion_report", m, &rep))?;
        }
        Command::Policy {
            metrics: metrics_path,
            m,
            mode,
            baseline,
            out,
        } => {
            let curves: MetricCurves = io::read_artifact(&metrics_path, "metrics")?.data;
            let mode = LabelMode::from(mode);
            let policy: AugPolicy = match baseline {
                None => build_policy(&curves, m, mode)?,
                Some(Baseline::Remove) => {
                    let affected = metrics::affected_classes(&curves, Selector::TopN(m), mode)?;
                    let default = curves
                        .strongest()
                        .context("metric curves have an empty strength grid")?;
                    baseline_remove_augmentation(&affected, default)
                }
            };
            let params = json!({ "m": m, "mode": mode, "baseline": baseline.map(|_| "remove") });
            let manifest = RunManifest::new("policy", &params)?.with_input("metrics", &metrics_path)?;
            io::write_artifact(&out, &Artifact::new("policy", manifest, &policy))?;
        }
        Command::Simulate { config, out_dir } => {
            let cfg = load_config(config.as_deref())?;
            fs::create_dir_all(&out_dir)?;
            let out = sweep(&cfg)?;
            let dir = |n: &str| out_dir.join(n);
            io::write_file(&dir("predictions.jsonl"), |w| io::write_prediction_log(&out.log, w))?;
            io::write_file(&dir("labels.jsonl"), |w| io::write_original_labels(&out.annotations, w))?;
            io::write_file(&dir("multilabels.jsonl"), |w| io::write_multilabel(&out.annotations, w))?;
            if let Some(counts) = out.annotations.train_counts() {
                io::write_file(&dir("train_counts.tsv"), |w| io::write_counts(counts, w))?;
            }
            io::write_file(&dir("taxonomy.tsv"), |w| io::write_taxonomy(&class_taxonomy(&cfg)?, w))?;
            io::write_file(&dir("embeddings.tsv"), |w| io::write_embeddings(&class_embeddings(&cfg)?, w))?;
            let m = stamp_config(RunManifest::new("simulate", &cfg)?, config.as_deref())?;
            io::write_artifact(&dir("manifest.json"), &Artifact::new("manifest", m, json!({ "seeds": cfg.seeds, "root_seed": cfg.root_seed })))?;
        }
        Command::Intervene { config, policy, out } => {
            let cfg = load_config(config.as_deref())?;
            let explicit: Option<AugPolicy> = policy
                .as_deref()
                .map(|p| io::read_artifact::<AugPolicy>(p, "policy").map(|a| a.data))
                .transpose()?;
            let sw = sweep(&cfg)?;
            let table = intervention_experiment(&cfg, &sw, explicit.as_ref())?;
            let mut m = stamp_config(RunManifest::new("intervene", &cfg)?, config.as_deref())?;
            if let Some(p) = &policy {
                m = m.with_input("policy", p)?;
            }
            io::write_artifact(&out, &Artifact::new("intervention", m, &table))?;
        }
        Command::Report { input, out } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| augbias::Error::Input(format!("{}: not JSON: {e}", input.display())))?;
            let md = report::render_artifact(&value)?;
            match out {
                Some(p) => fs::write(p, md)?,
                None => print!("{md}"),
            }
        }
        Command::Pipeline { config, out_dir } => {
            let cfg = load_config(config.as_deref())?;
            let res = run_pipeline(&cfg, &ReportConfig::default(), &out_dir)?;
            let iv = &res.intervention;
            for r in &iv.rows {
                println!(
                    "{:<20} affected {:>6.2}  overall {:>6.2}",
                    r.name,
                    100.0 * r.affected,
                    100.0 * r.overall
                );
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<augbias::Error>() {
        return if e.is_validation() { 1 } else { 2 };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 1;
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
