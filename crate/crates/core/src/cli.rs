use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use gnnbench::config::{apply_transform, RunConfig, TransformConfig, DEFAULT_OUT};
use gnnbench::features::{extract, FeatureSet};
use gnnbench::generator::generate;
use gnnbench::harness::{render_report, run_benchmark, write_report};
use gnnbench::io::{load_dataset, save_dataset};
use gnnbench::model::{gradient_check, toy_dataset, ModelKind, ModelSpec};
use gnnbench::Error;

pub const FEATURES_FILE: &str = "features.json";
pub const CONFIG_FILE: &str = "config.json";

/// Max relative gradient error accepted by `gradcheck`.
const GRADCHECK_TOLERANCE: f64 = 1e-4;
const GRADCHECK_TOLERANCE_SGC: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "gnnbench", version, about = "Synthetic attributed graphs and node-classification benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract class and graph features from a dataset directory.
    Extract {
        dataset: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a dataset directory.
    Generate(GenArgs),
    /// Apply α/β/γ transforms to a features.json.
    Transform {
        features: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Replace attribute-class correlations by their global mean.
        #[arg(long)]
        uniform_attributes: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark sweep and write report.csv and plotdata/.
    Bench(GenArgs),
    /// Print the aggregate rows of a report.csv.
    Report { report: PathBuf },
    /// Check analytic gradients of every classifier against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long)]
    attrs: Option<usize>,
    #[arg(long)]
    classes: Option<usize>,
    /// powerlaw, powerlaw:<exponent> or uniform
    #[arg(long)]
    degree_model: Option<String>,
    /// bernoulli, gaussian or gaussian:<sigma>
    #[arg(long)]
    attr_model: Option<String>,
    /// Comma-separated list of mlp, sgc, gcn.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelKind>>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GenArgs {
    /// Config file (if any) with flags layered on top.
    fn into_config(self) -> anyhow::Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = self.preset {
            c.preset = Some(p);
            c.features = None;
            c.params = None;
        }
        macro_rules! layer {
            ($($field:ident),*) => {$(if self.$field.is_some() { c.$field = self.$field; })*};
        }
        layer!(seed, nodes, edges, attrs, classes, degree_model, attr_model, models, workers, out);
        macro_rules! layer_transform {
            ($($field:ident),*) => {$(if self.$field.is_some() { c.transform.$field = self.$field; })*};
        }
        layer_transform!(alpha, beta, gamma);
        if let Some(s) = self.seed {
            c.protocol.master_seed = s;
        }
        Ok(c)
    }
}

fn print_effective(value: &serde_json::Value) {
    println!("effective configuration:");
    println!("{}", serde_json::to_string_pretty(value).expect("json"));
}

fn thread_pool(workers: usize) -> anyhow::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.into(),
        source: e,
    })?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Extract { dataset, out } => {
            let out = out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
            print_effective(&json!({"command": "extract", "dataset": dataset, "out": out}));
            let data = load_dataset(&dataset)?;
            let features = extract(&data)?;
            create_dir(&out)?;
            features.save(&out.join(FEATURES_FILE))?;
            println!("wrote {}", out.join(FEATURES_FILE).display());
        }
        Command::Transform {
            features,
            alpha,
            beta,
            gamma,
            uniform_attributes,
            out,
        } => {
            let out = out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
            let t = TransformConfig {
                alpha,
                beta,
                gamma,
                uniform_attributes,
            };
            print_effective(&json!({
                "command": "transform",
                "features": features,
                "transform": t,
                "out": out,
            }));
            let input = FeatureSet::load(&features)?;
            let output = apply_transform(&input, &t)?;
            create_dir(&out)?;
            let target = out.join(FEATURES_FILE);
            output.save(&target)?;
            println!("wrote {}", target.display());
        }
        Command::Generate(args) => {
            let config = args.into_config()?.resolved()?;
            print_effective(&serde_json::to_value(&config)?);
            let params = config.gen_params()?;
            let out = config.out_dir();
            let pool = thread_pool(config.workers())?;
            let dataset = pool.install(|| generate(&params))?;
            save_dataset(&dataset, &out)?;
            println!(
                "wrote {} ({} nodes, {} edges, {} attributes, {} classes)",
                out.display(),
                dataset.node_count(),
                dataset.graph.edge_count(),
                dataset.attributes.attr_count(),
                dataset.labels.class_count()
            );
        }
        Command::Bench(args) => {
            let config = args.into_config()?.resolved()?;
            print_effective(&serde_json::to_value(&config)?);
            let Some(axis) = config.sweep()? else {
                return Err(Error::Invalid("bench needs a `sweep` in the config".into()).into());
            };
            let base = config.gen_params()?;
            let out = config.out_dir();
            create_dir(&out)?;
            fs::write(out.join(CONFIG_FILE), config.to_json()).map_err(|e| Error::Io {
                path: out.join(CONFIG_FILE),
                source: e,
            })?;
            let grids = config.grids();
            let pool = thread_pool(config.workers())?;
            let report = pool.install(|| run_benchmark(&base, &axis, &grids, &config.protocol))?;
            for path in write_report(&report, &out)? {
                println!("wrote {}", path.display());
            }
            let failures: usize = report.aggregates.iter().map(|a| a.failures).sum();
            if failures > 0 {
                log::warn!("{failures} runs failed; see the error column");
            }
        }
        Command::Report { report } => {
            print_effective(&json!({"command": "report", "report": report}));
            print!("{}", render_report(&report)?);
        }
        Command::Gradcheck { seed } => {
            print_effective(&json!({"command": "gradcheck", "seed": seed}));
            let data = toy_dataset(seed);
            let mut failed = Vec::new();
            for kind in ModelKind::ALL {
                let mut spec = ModelSpec::new(kind);
                spec.hidden_size = 5;
                spec.seed = seed;
                let err = gradient_check(&spec, &data);
                let tol = if kind == ModelKind::Sgc {
                    GRADCHECK_TOLERANCE_SGC
                } else {
                    GRADCHECK_TOLERANCE
                };
                let verdict = if err <= tol { "ok" } else { "FAIL" };
                println!("{kind}\tmax_rel_error={err:.3e}\ttolerance={tol:e}\t{verdict}");
                if err > tol {
                    failed.push(kind.to_string());
                }
            }
            if !failed.is_empty() {
                bail!("gradient check failed for {}", failed.join(", "));
            }
        }
    }
    Ok(())
}

/// Exit code of a failed run: 1 for invalid input, 2 for runtime failures.
fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_validation() => 1,
        _ => 2,
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
