use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rcqec_analysis::{worker_count, FitOptions, RunConfig};
use rcqec_cli::{fit_record, run, summary_csv, threshold_summary, write_outputs};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "rcqec", version = rcqec_cli::VERSION, about = "Threshold experiments for random circuit codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Depolarizing code-capacity decoding on open-boundary codes.
    CodeCapacity {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
        /// marginal or minweight
        #[arg(long)]
        decoder: Option<String>,
    },
    /// Entropy density of distilled ancilla blocks.
    Entropy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        qs: Option<Vec<usize>>,
    },
    /// Mutual information of encoded EPR pairs after repeated error correction.
    MutualInfo {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Spacetime erasure decoding of the full error-correction circuit.
    Spacetime {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
        #[arg(long)]
        ec_rounds: Option<usize>,
        /// state or code
        #[arg(long)]
        rows: Option<String>,
    },
    /// Fit the scaling ansatz to a stored record.
    Fit {
        record: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 2)]
        window: Option<Vec<f64>>,
        #[arg(long, default_value_t = 2.0)]
        truncation_factor: f64,
        #[arg(long, default_value = "out/fit")]
        out_dir: PathBuf,
    },
    /// Table of (rate, p_c, σ, p_hashing) over run directories.
    ThresholdSummary {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "out/summary")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    #[arg(long)]
    batches: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 2)]
    window: Option<Vec<f64>>,
    #[arg(long)]
    truncation_factor: Option<f64>,
}

fn grid(lo: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| ((lo + step * i as f64) * 1e6).round() / 1e6).collect()
}

fn defaults(experiment: &str) -> Value {
    let third = 1.0 / 3.0;
    match experiment {
        "code-capacity" => json!({"n": 50, "rate": 0.25, "depths": [4, 5], "p_grid": grid(0.06, 0.02, 8),
            "trials": 1000, "decoder": "minweight"}),
        "entropy" => json!({"n": 51, "rate": third, "d": 6, "qs": [2, 4, 6], "p_grid": grid(0.005, 0.005, 8),
            "trials": 200}),
        "mutual-info" => json!({"n": 51, "rate": third, "depths": [2, 4], "rounds": 10,
            "p_grid": grid(0.005, 0.005, 8), "trials": 300}),
        _ => json!({"n": 51, "rate": third, "depths": [2, 4], "ec_rounds": 3,
            "p_grid": grid(0.005, 0.005, 8), "trials": 2000}),
    }
}

fn build_config(experiment: &str, common: &Common, extra: Vec<(&str, Option<Value>)>) -> Result<RunConfig> {
    let mut obj: Map<String, Value> = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            match serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))? {
                Value::Object(m) => m,
                _ => bail!("{} is not a JSON object", path.display()),
            }
        }
        None => {
            let mut m = defaults(experiment).as_object().cloned().unwrap_or_default();
            m.insert("seed".into(), json!(1));
            m
        }
    };
    match obj.get("experiment") {
        Some(Value::String(e)) if e != experiment => bail!("config is for {e}, not {experiment}"),
        _ => {
            obj.insert("experiment".into(), json!(experiment));
        }
    }
    let mut set = |key: &str, v: Option<Value>| {
        if let Some(v) = v {
            obj.insert(key.to_string(), v);
        }
    };
    set("seed", common.seed.map(|v| json!(v)));
    set("trials", common.trials.map(|v| json!(v)));
    set("n", common.n.map(|v| json!(v)));
    set("rate", common.rate.map(|v| json!(v)));
    set("p_grid", common.p_grid.as_ref().map(|v| json!(v)));
    set("batches", common.batches.map(|v| json!(v)));
    for (k, v) in extra {
        set(k, v);
    }
    if common.window.is_some() || common.truncation_factor.is_some() {
        let fit = obj.entry("fit").or_insert_with(|| json!({}));
        if let Some(w) = &common.window {
            fit["window"] = json!(w);
        }
        if let Some(t) = common.truncation_factor {
            fit["truncation_factor"] = json!(t);
        }
    }
    Ok(RunConfig::from_json(&Value::Object(obj).to_string())?)
}

fn run_experiment_command(experiment: &str, common: Common, extra: Vec<(&str, Option<Value>)>) -> Result<()> {
    let cfg = build_config(experiment, &common, extra)?;
    let out_dir = common.out_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(experiment));
    let out = run(&cfg, &out_dir, worker_count())?;
    for pt in &out.record.points {
        println!("size {:>2}  p {:<8} estimate {:.6} ± {:.6}  ({} trials)", pt.size, pt.p, pt.estimate, pt.stderr, pt.trials);
    }
    match &out.fit {
        Some(f) => println!(
            "fit: p_c = {:.6} ± {:.6}, λ = {:.4}, window {:?}",
            f.p_c,
            f.sigma_p_c.unwrap_or(f64::NAN),
            f.lambda,
            f.window
        ),
        None => println!("no fit: {}", out.manifest.fit_skipped.as_deref().unwrap_or("")),
    }
    println!("wrote {}", out_dir.display());
    Ok(())
}

fn window(w: Option<Vec<f64>>) -> Option<[f64; 2]> {
    w.map(|w| [w[0], w[1]])
}

fn main_inner() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::CodeCapacity { common, depths, decoder } => run_experiment_command(
            "code-capacity",
            common,
            vec![("depths", depths.map(|v| json!(v))), ("decoder", decoder.map(|v| json!(v)))],
        ),
        Command::Entropy { common, d, qs } => run_experiment_command(
            "entropy",
            common,
            vec![("d", d.map(|v| json!(v))), ("qs", qs.map(|v| json!(v)))],
        ),
        Command::MutualInfo { common, depths, rounds } => run_experiment_command(
            "mutual-info",
            common,
            vec![("depths", depths.map(|v| json!(v))), ("rounds", rounds.map(|v| json!(v)))],
        ),
        Command::Spacetime { common, depths, ec_rounds, rows } => run_experiment_command(
            "spacetime",
            common,
            vec![
                ("depths", depths.map(|v| json!(v))),
                ("ec_rounds", ec_rounds.map(|v| json!(v))),
                ("rows", rows.map(|v| json!(v))),
            ],
        ),
        Command::Fit { record, window: w, truncation_factor, out_dir } => {
            let options = FitOptions { window: window(w), truncation_factor };
            let fit = fit_record(&record, &options, &out_dir)?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
            Ok(())
        }
        Command::ThresholdSummary { runs, out_dir } => {
            let table = summary_csv(&threshold_summary(&runs)?);
            write_outputs(&out_dir, &[("threshold-summary.csv", table.clone().into_bytes())])?;
            print!("{table}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
