//! `iif` — fit the iterative feature-selection pipeline on a CSV matrix,
//! generate synthetic benchmark data, or sweep a difficulty grid.
//!
//! Exit codes: 0 success, 1 input/output or parse failure, 2 pipeline
//! failure (degenerate data, invalid parameters, non-convergence). Every
//! failure prints a single machine-readable JSON line to stderr:
//! `{"kind":"io"|"parse"|"pipeline","message":"..."}`.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use iif::datagen::{gen_linear, gen_nonlinear, mu_power_sweep, ManifoldParams, SyntheticSpec};
use iif::io::{
    load_features, load_labels, load_matrix, save_features, save_labels, save_matrix, DataMatrix,
    LoadOptions,
};
use iif::metrics::{accuracy, ari, feature_metrics};
use iif::pipeline::{ifpca_init, run, PipelineConfig, Variant};
use iif::report::{metrics_block, InputEcho, RunReport, Timings};
use iif::seeds;
use iif::{Error, Result};

#[derive(Parser)]
#[command(
    name = "iif",
    version,
    about = "Iterative feature selection and clustering for wide matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a CSV matrix (rows = observations, columns = features).
    Fit(FitArgs),
    /// Write a synthetic benchmark instance to a directory.
    Synth(SynthArgs),
    /// Run a difficulty grid x repetitions x variants sweep to a CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Linear embedding of the selected features.
    Pca,
    /// Graph-Laplacian embedding of the selected features.
    Lap,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Pca => Variant::Pca,
            VariantArg::Lap => Variant::Lap,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Setting {
    /// Two Gaussian classes separated on a sparse set of features.
    Linear,
    /// Two interleaved noisy arcs observed through a sparse linear map.
    Nonlinear,
    /// Two classes with power-law decaying per-feature contrasts.
    MuPower,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::Linear => "linear",
            Setting::Nonlinear => "nonlinear",
            Setting::MuPower => "mu-power",
        })
    }
}

#[derive(Args)]
struct FitArgs {
    /// CSV/TSV matrix to cluster.
    #[arg(long)]
    input: PathBuf,
    /// Number of clusters.
    #[arg(long)]
    k: usize,
    /// Embedding used inside the iterations.
    #[arg(long, value_enum)]
    variant: VariantArg,
    /// Ground-truth labels (one per line) for scoring the fit.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Ground-truth influential features (1-based, one per line).
    #[arg(long)]
    true_features: Option<PathBuf>,
    /// Apply x -> ln(1+x) elementwise at load time.
    #[arg(long)]
    log1p: bool,
    /// Treat the file as features x observations and swap on load.
    #[arg(long)]
    transpose: bool,
    /// RNG seed; fixing it makes the whole run reproducible.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration cap.
    #[arg(long, default_value_t = 10)]
    max_iter: usize,
    /// Stop once the selection change ratio falls to this value.
    #[arg(long, default_value_t = 0.10)]
    stop_ratio: f64,
    /// Reliability-floor constant in (0, 1].
    #[arg(long, default_value_t = 0.6)]
    c: f64,
    /// Write the JSON run report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the selected features (1-based, one per line).
    #[arg(long)]
    features_out: Option<PathBuf>,
    /// Also write the cluster labels (1-based, one per line).
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Which generative family to draw from.
    #[arg(long, value_enum)]
    setting: Setting,
    /// Directory for x.csv, true_labels.txt, true_features.txt, spec.json.
    #[arg(long)]
    out: PathBuf,
    /// Weak-feature contrast (linear and nonlinear settings only).
    #[arg(long)]
    tau_w: Option<f64>,
    /// Power-law exponent (mu-power setting only; default 1.0).
    #[arg(long)]
    a: Option<f64>,
    /// Observations.
    #[arg(long)]
    n: Option<usize>,
    /// Features.
    #[arg(long)]
    p: Option<usize>,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepVariant {
    /// Full pipeline with the graph-Laplacian embedding.
    Lap,
    /// Full pipeline with the linear embedding.
    Pca,
    /// Initialization only, no iterations (baseline).
    Init,
}

impl fmt::Display for SweepVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariant::Lap => "lap",
            SweepVariant::Pca => "pca",
            SweepVariant::Init => "init",
        })
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Which generative family to sweep.
    #[arg(long, value_enum)]
    setting: Setting,
    /// Grid values, comma-separated. Meaning depends on the setting:
    /// weak contrast tau_w (linear), feature count p (nonlinear),
    /// power-law exponent a (mu-power).
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    /// Independent repetitions per grid value.
    #[arg(long)]
    reps: usize,
    /// Comma-separated subset of lap,pca,init.
    #[arg(long, value_delimiter = ',', required = true)]
    variants: Vec<SweepVariant>,
    /// Output CSV path (long format, one row per grid x rep x variant).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to the available cores.
    #[arg(long, env = "IIF_JOBS")]
    jobs: Option<usize>,
    /// Base RNG seed; per-cell seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(args) => cmd_fit(&args),
        Command::Synth(args) => cmd_synth(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = classify(&e);
            let line = serde_json::json!({ "kind": kind, "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::from(code)
        }
    }
}

/// Map an error to its stderr kind tag and process exit code.
fn classify(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Io(_) | Error::Csv(_) => ("io", 1),
        Error::Parse { .. } | Error::Json(_) => ("parse", 1),
        _ => ("pipeline", 2),
    }
}

fn cmd_fit(args: &FitArgs) -> Result<()> {
    let t_start = Instant::now();
    let options = LoadOptions {
        delimiter: None,
        has_header: None,
        log1p: args.log1p,
        transpose: args.transpose,
    };
    let matrix = load_matrix(&args.input, &options)?;
    let load_seconds = t_start.elapsed().as_secs_f64();

    let true_labels = match &args.labels {
        Some(path) => {
            let (labels, _n_classes) = load_labels(path)?;
            if labels.len() != matrix.n() {
                return Err(Error::Shape(format!(
                    "label file has {} lines but the matrix has {} rows",
                    labels.len(),
                    matrix.n()
                )));
            }
            Some(labels)
        }
        None => None,
    };
    let true_features = match &args.true_features {
        Some(path) => {
            let indices = load_features(path)?;
            if let Some(&j) = indices.iter().find(|&&j| j >= matrix.p()) {
                return Err(Error::Shape(format!(
                    "true-features entry {} exceeds the column count {}",
                    j + 1,
                    matrix.p()
                )));
            }
            Some(indices)
        }
        None => None,
    };

    let config = PipelineConfig {
        variant: args.variant.into(),
        max_iter: args.max_iter,
        stop_ratio: args.stop_ratio,
        c: args.c,
        seed: args.seed,
        ..PipelineConfig::default()
    };
    let t_fit = Instant::now();
    let result = run(&matrix.values, args.k, &config)?;
    let fit_seconds = t_fit.elapsed().as_secs_f64();

    let metrics = metrics_block(
        &result,
        true_labels.as_deref(),
        true_features.as_deref(),
        matrix.p(),
    )?;

    if let Some(path) = &args.labels_out {
        save_labels(&result.labels, path)?;
    }
    if let Some(path) = &args.features_out {
        let names = matrix.named_cols.then_some(matrix.col_ids.as_slice());
        save_features(&result.features.indices, names, path)?;
    }

    let input = InputEcho {
        path: args.input.display().to_string(),
        n: matrix.n(),
        p: matrix.p(),
        log1p: args.log1p,
        transpose: args.transpose,
    };
    let timings = Timings {
        load_seconds,
        fit_seconds,
        total_seconds: t_start.elapsed().as_secs_f64(),
    };
    let report = RunReport::new(input, args.k, config, &result, metrics, timings);
    let json = report.to_json()?;
    match &args.out {
        Some(path) => std::fs::write(path, json)?,
        None => print!("{json}"),
    }
    Ok(())
}

/// Echo written next to generated data so a run can be reproduced exactly.
#[derive(Serialize)]
struct SynthEcho<'a> {
    setting: String,
    spec: &'a SyntheticSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let mut spec = match args.setting {
        Setting::Linear => SyntheticSpec::default(),
        Setting::Nonlinear => SyntheticSpec::nonlinear_default(),
        Setting::MuPower => SyntheticSpec::mu_power_default(),
    };
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(p) = args.p {
        spec.p = p;
    }
    spec.seed = args.seed;

    if args.setting == Setting::MuPower && args.tau_w.is_some() {
        return Err(Error::Domain(
            "--tau-w does not apply to the mu-power setting; its contrasts \
             follow the power law set by --a"
                .into(),
        ));
    }
    if args.setting != Setting::MuPower && args.a.is_some() {
        return Err(Error::Domain(format!(
            "--a only applies to the mu-power setting, not {}",
            args.setting
        )));
    }
    if let Some(tau_w) = args.tau_w {
        spec.tau_w = tau_w;
    }

    let mut a_echo = None;
    let instance = match args.setting {
        Setting::Linear => gen_linear(&spec)?,
        Setting::Nonlinear => gen_nonlinear(&spec, &ManifoldParams::default())?,
        Setting::MuPower => {
            let a = args.a.unwrap_or(1.0);
            a_echo = Some(a);
            mu_power_sweep(&spec, a)?
        }
    };

    std::fs::create_dir_all(&args.out)?;
    let true_features = instance.true_features();
    let matrix = DataMatrix::from_values(instance.x);
    save_matrix(&matrix, &args.out.join("x.csv"))?;
    save_labels(&instance.true_labels, &args.out.join("true_labels.txt"))?;
    save_features(&true_features, None, &args.out.join("true_features.txt"))?;
    let echo = SynthEcho {
        setting: args.setting.to_string(),
        spec: &spec,
        a: a_echo,
    };
    let mut echo_json = serde_json::to_string_pretty(&echo)?;
    echo_json.push('\n');
    std::fs::write(args.out.join("spec.json"), echo_json)?;
    Ok(())
}

/// One output row of `iif sweep`. Field order defines the CSV columns;
/// `None` serializes as an empty cell.
#[derive(Serialize)]
struct SweepRow {
    setting: String,
    grid_value: f64,
    rep: usize,
    seed: u64,
    variant: String,
    accuracy: Option<f64>,
    ari: Option<f64>,
    fdr: Option<f64>,
    tpr: Option<f64>,
    fpr: Option<f64>,
    tdr: Option<f64>,
    n_selected: Option<usize>,
    iters: Option<usize>,
    seconds: Option<f64>,
    error: Option<String>,
}

impl SweepRow {
    fn empty(setting: &Setting, grid_value: f64, rep: usize, seed: u64, variant: &str) -> Self {
        Self {
            setting: setting.to_string(),
            grid_value,
            rep,
            seed,
            variant: variant.to_owned(),
            accuracy: None,
            ari: None,
            fdr: None,
            tpr: None,
            fpr: None,
            tdr: None,
            n_selected: None,
            iters: None,
            seconds: None,
            error: None,
        }
    }
}

/// Flatten an error message onto one line so it stays a single CSV cell.
fn one_line(message: String) -> String {
    message.replace('\n', "; ")
}

/// Build the per-cell generator spec for one grid value.
fn sweep_spec(setting: &Setting, grid_value: f64, seed: u64) -> Result<(SyntheticSpec, f64)> {
    let mut a = 1.0;
    let mut spec = match setting {
        Setting::Linear => {
            let mut s = SyntheticSpec::default();
            s.tau_w = grid_value;
            s
        }
        Setting::Nonlinear => {
            let mut s = SyntheticSpec::nonlinear_default();
            if grid_value < 1.0 || grid_value.fract() != 0.0 {
                return Err(Error::Domain(format!(
                    "nonlinear grid values are feature counts; got {grid_value}"
                )));
            }
            s.p = grid_value as usize;
            s
        }
        Setting::MuPower => {
            a = grid_value;
            SyntheticSpec::mu_power_default()
        }
    };
    spec.seed = seed;
    Ok((spec, a))
}

/// Clusters assumed by every sweep setting (all generators are 2-class).
const SWEEP_K: usize = 2;

fn run_cell(
    setting: &Setting,
    grid_idx: usize,
    grid_value: f64,
    rep: usize,
    reps: usize,
    base_seed: u64,
    variants: &[SweepVariant],
) -> Vec<SweepRow> {
    let cell = (grid_idx * reps + rep) as u64;
    let instance_seed = seeds::derive(base_seed, seeds::stream::INSTANCE, cell);
    let pipeline_seed = seeds::derive(base_seed, seeds::stream::PIPELINE, cell);

    let generated = sweep_spec(setting, grid_value, instance_seed).and_then(|(spec, a)| {
        match setting {
            Setting::Linear => gen_linear(&spec),
            Setting::Nonlinear => gen_nonlinear(&spec, &ManifoldParams::default()),
            Setting::MuPower => mu_power_sweep(&spec, a),
        }
    });
    let instance = match generated {
        Ok(inst) => inst,
        Err(e) => {
            // The whole cell is unusable; emit one error row per variant.
            return variants
                .iter()
                .map(|v| {
                    let mut row = SweepRow::empty(
                        setting,
                        grid_value,
                        rep,
                        instance_seed,
                        &v.to_string(),
                    );
                    row.error = Some(one_line(e.to_string()));
                    row
                })
                .collect();
        }
    };

    let truth = instance.true_features();
    let p = instance.x.ncols();
    variants
        .iter()
        .map(|v| {
            let mut row =
                SweepRow::empty(setting, grid_value, rep, instance_seed, &v.to_string());
            let config = PipelineConfig {
                variant: match v {
                    SweepVariant::Pca | SweepVariant::Init => Variant::Pca,
                    SweepVariant::Lap => Variant::Lap,
                },
                seed: pipeline_seed,
                ..PipelineConfig::default()
            };
            let t = Instant::now();
            let fitted = match v {
                SweepVariant::Init => ifpca_init(&instance.x, SWEEP_K, &config)
                    .map(|(state, _)| (state.labels, state.features.indices, 0)),
                SweepVariant::Lap | SweepVariant::Pca => run(&instance.x, SWEEP_K, &config)
                    .map(|r| (r.labels, r.features.indices, r.trace.len())),
            };
            row.seconds = Some(t.elapsed().as_secs_f64());
            match fitted.and_then(|(labels, selected, iters)| {
                let acc = accuracy(&labels, &instance.true_labels)?;
                let ari_val = ari(&labels, &instance.true_labels)?;
                let feats = feature_metrics(&selected, &truth, p)?;
                Ok((acc, ari_val, feats, selected.len(), iters))
            }) {
                Ok((acc, ari_val, feats, n_selected, iters)) => {
                    row.accuracy = Some(acc);
                    row.ari = Some(ari_val);
                    row.fdr = Some(feats.fdr);
                    row.tpr = feats.tpr;
                    row.fpr = feats.fpr;
                    row.tdr = Some(feats.tdr);
                    row.n_selected = Some(n_selected);
                    row.iters = Some(iters);
                }
                Err(e) => row.error = Some(one_line(e.to_string())),
            }
            row
        })
        .collect()
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    if args.reps == 0 {
        return Err(Error::Domain("--reps must be at least 1".into()));
    }
    if args.variants.is_empty() {
        return Err(Error::Domain("--variants must not be empty".into()));
    }
    let jobs = match args.jobs {
        Some(0) => return Err(Error::Domain("--jobs must be at least 1".into())),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |c| c.get()),
    };

    let cells: Vec<(usize, f64, usize)> = args
        .grid
        .iter()
        .enumerate()
        .flat_map(|(gi, &gv)| (0..args.reps).map(move |rep| (gi, gv, rep)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Domain(format!("could not start {jobs} worker threads: {e}")))?;
    // Ordered collect keeps the output rows in (grid, rep, variant) order
    // no matter which worker finishes first.
    let rows: Vec<Vec<SweepRow>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(gi, gv, rep)| {
                run_cell(
                    &args.setting,
                    gi,
                    gv,
                    rep,
                    args.reps,
                    args.seed,
                    &args.variants,
                )
            })
            .collect()
    });

    let mut writer = csv::Writer::from_path(&args.out)?;
    for row in rows.into_iter().flatten() {
        writer.serialize(row)?;
    }
    writer.flush().map_err(Error::Io)?;
    Ok(())
}
