//! Command-line orchestration: parameter grids, worker pool, persistence and
//! plot emission.
//!
//! Precedence for every knob is flags, then the `--config` key=value file,
//! then built-in defaults; `HRHG_SEED` is the fallback seed source.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{estimate_rate, ring_parity_violation, TrialBatch, TrialConfig};
use crate::fit::{fit_threshold, FitPoint, SweepAxis, ThresholdEstimate};
use crate::inner::InnerVariant;
use crate::lattice::{build_lattice, BoundaryConvention, SignConvention};
use crate::mux::plan_mux;
use crate::outer::WeightMode;

/// Exit status mapping: flag errors 2, invariant breaches 3, other errors 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => 3,
        _ => 1,
    }
}

#[derive(Parser, Debug)]
#[command(name = "hrhg", version, about = "Hybrid GKP / squeezed-state lattice memory simulator")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate the logical failure rate at a single parameter point.
    Simulate(GridArgs),
    /// Estimate failure rates over a parameter grid.
    Sweep(GridArgs),
    /// Sweep one noise axis, fit the crossing and emit plots.
    Threshold(GridArgs),
    /// Ring parity-violation probabilities for 1-4 squeezed neighbors.
    Weights(WeightsArgs),
    /// Multiplexed source bank requirements.
    Mux(MuxArgs),
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Code distances, comma separated.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    /// Swap-out probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    p0: Vec<f64>,
    /// Squeezing values in dB, comma separated; `inf` selects the
    /// infinite-squeezing mode.
    #[arg(long = "delta-db", value_delimiter = ',')]
    delta_db: Vec<String>,
    /// Inner decoder: standard | algorithm2.
    #[arg(long)]
    inner: Option<String>,
    /// Matching weights: uniform | analog.
    #[arg(long)]
    weights: Option<String>,
    /// Trials per grid cell.
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed; falls back to HRHG_SEED, then 1.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value configuration file supplying defaults for the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct WeightsArgs {
    /// Ring sizes to estimate, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    m: Vec<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct MuxArgs {
    /// Per-device heralding probability.
    #[arg(long = "p-gbs")]
    p_gbs: f64,
    /// Target swap-out probability.
    #[arg(long)]
    p0: f64,
    /// Also print the plan as JSON.
    #[arg(long)]
    json: bool,
}

/// Resolved grid specification.
#[derive(Debug, Clone)]
struct ExperimentSpec {
    ds: Vec<usize>,
    p0s: Vec<f64>,
    deltas: Vec<f64>,
    inner: InnerVariant,
    weights: WeightMode,
    trials: u64,
    seed: u64,
    workers: usize,
    out: PathBuf,
}

fn parse_delta_db(tok: &str) -> Result<f64> {
    if tok.eq_ignore_ascii_case("inf") {
        return Ok(0.0);
    }
    let db: f64 = tok
        .parse()
        .map_err(|_| Error::Config(format!("bad delta-db value `{tok}`")))?;
    Ok(crate::delta_from_db(db))
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected key=value",
                path.display(),
                ln + 1
            )));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn env_seed() -> Option<u64> {
    std::env::var("HRHG_SEED").ok().and_then(|s| s.parse().ok())
}

impl GridArgs {
    fn resolve(&self) -> Result<ExperimentSpec> {
        let cfg = match &self.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let from_cfg = |key: &str| cfg.get(key).cloned();
        let list_or = |flag: &Vec<String>, key: &str| -> Vec<String> {
            if !flag.is_empty() {
                flag.clone()
            } else {
                from_cfg(key)
                    .map(|v| v.split(',').map(|s| s.trim().to_string()).collect())
                    .unwrap_or_default()
            }
        };

        let ds: Vec<usize> = if !self.d.is_empty() {
            self.d.clone()
        } else {
            from_cfg("d")
                .map(|v| -> Result<Vec<usize>> {
                    v.split(',')
                        .map(|s| {
                            s.trim()
                                .parse()
                                .map_err(|_| Error::Config(format!("bad d `{s}`")))
                        })
                        .collect()
                })
                .transpose()?
                .unwrap_or_else(|| vec![3])
        };
        let p0s: Vec<f64> = if !self.p0.is_empty() {
            self.p0.clone()
        } else {
            from_cfg("p0")
                .map(|v| -> Result<Vec<f64>> {
                    v.split(',')
                        .map(|s| {
                            s.trim()
                                .parse()
                                .map_err(|_| Error::Config(format!("bad p0 `{s}`")))
                        })
                        .collect()
                })
                .transpose()?
                .unwrap_or_else(|| vec![0.0])
        };
        let delta_tokens = list_or(&self.delta_db, "delta_db");
        let deltas: Vec<f64> = if delta_tokens.is_empty() {
            vec![crate::delta_from_db(12.0)]
        } else {
            delta_tokens
                .iter()
                .map(|t| parse_delta_db(t))
                .collect::<Result<_>>()?
        };
        let inner = InnerVariant::parse(
            &self
                .inner
                .clone()
                .or_else(|| from_cfg("inner"))
                .unwrap_or_else(|| "standard".into()),
        )?;
        let weights = WeightMode::parse(
            &self
                .weights
                .clone()
                .or_else(|| from_cfg("weights"))
                .unwrap_or_else(|| "analog".into()),
        )?;
        let trials = match self.trials {
            Some(t) => t,
            None => from_cfg("trials")
                .map(|v| {
                    v.parse()
                        .map_err(|_| Error::Config(format!("bad trials `{v}`")))
                })
                .transpose()?
                .unwrap_or(5000),
        };
        let seed = self
            .seed
            .or_else(|| {
                from_cfg("seed").and_then(|v| v.parse().ok())
            })
            .or_else(env_seed)
            .unwrap_or(1);
        let workers = match self.workers {
            Some(w) => w,
            None => from_cfg("workers")
                .and_then(|v| v.parse().ok())
                .unwrap_or_else(|| {
                    std::thread::available_parallelism()
                        .map(|n| n.get())
                        .unwrap_or(1)
                }),
        };
        let out = self
            .out
            .clone()
            .or_else(|| from_cfg("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("hrhg-out"));
        Ok(ExperimentSpec {
            ds,
            p0s,
            deltas,
            inner,
            weights,
            trials,
            seed,
            workers,
            out,
        })
    }
}

pub const CSV_HEADER: &str = "d,p0,delta_db,inner,weights,trials,failures,p_fail,stderr,master_seed";

fn csv_row(b: &TrialBatch) -> String {
    let db = match b.delta_db {
        Some(v) => format!("{v}"),
        None => "inf".to_string(),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        b.d, b.p0, db, b.inner, b.weights, b.trials, b.failures, b.p_fail, b.stderr, b.master_seed
    )
}

fn run_grid(spec: &ExperimentSpec) -> Result<Vec<TrialBatch>> {
    let mut batches = Vec::new();
    for &d in &spec.ds {
        let lattice = build_lattice(d, BoundaryConvention::PeriodicTransverse, SignConvention::AllPlus)?;
        for &p0 in &spec.p0s {
            for &delta in &spec.deltas {
                let mut cfg = TrialConfig::new(d, delta, p0);
                cfg.inner = spec.inner;
                cfg.weights = spec.weights;
                cfg.master_seed = spec.seed;
                let batch = estimate_rate(&lattice, &cfg, spec.trials, spec.workers)?;
                println!("{}", csv_row(&batch));
                batches.push(batch);
            }
        }
    }
    Ok(batches)
}

#[derive(Serialize)]
struct RunDocument<'a> {
    /// Wall-clock stamp; excluded from determinism comparisons.
    timestamp_unix_ms: u128,
    batches: &'a [TrialBatch],
}

#[derive(Serialize, Clone)]
struct FitRecord {
    fixed_axis: &'static str,
    fixed_value: f64,
    inner: &'static str,
    weights: &'static str,
    estimate: ThresholdEstimate,
}

fn write_outputs(spec: &ExperimentSpec, batches: &[TrialBatch]) -> Result<()> {
    fs::create_dir_all(&spec.out)?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for b in batches {
        csv.push_str(&csv_row(b));
        csv.push('\n');
    }
    fs::write(spec.out.join("results.csv"), csv)?;
    let doc = RunDocument {
        timestamp_unix_ms: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
        batches,
    };
    fs::write(
        spec.out.join("results.json"),
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    Ok(())
}

fn append_fit_record(out: &Path, record: &FitRecord) -> Result<Vec<FitRecord>> {
    // fits.json keeps every fit of the output directory; region plots read
    // it back.
    let path = out.join("fits.json");
    let mut records: Vec<serde_json::Value> = match fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text).unwrap_or_default(),
        Err(_) => Vec::new(),
    };
    records.push(serde_json::to_value(record).map_err(|e| Error::Config(e.to_string()))?);
    fs::write(
        &path,
        serde_json::to_string_pretty(&records).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    // Re-extract the region boundary from everything on disk.
    let parsed: Vec<FitRecord> = records
        .iter()
        .filter_map(|v| {
            let fixed_axis = match v.get("fixed_axis")?.as_str()? {
                "p0" => "p0",
                "delta_db" => "delta_db",
                _ => return None,
            };
            Some(FitRecord {
                fixed_axis,
                fixed_value: v.get("fixed_value")?.as_f64()?,
                inner: "standard",
                weights: "analog",
                estimate: serde_json::from_value(v.get("estimate")?.clone()).ok()?,
            })
        })
        .collect();
    Ok(parsed)
}

fn run_threshold(spec: &ExperimentSpec) -> Result<()> {
    // Exactly one axis must carry the sweep.
    let axis = match (spec.deltas.len() > 1, spec.p0s.len() > 1) {
        (true, false) => SweepAxis::DeltaDb,
        (false, true) => SweepAxis::P0,
        _ => {
            return Err(Error::Config(
                "threshold needs a sweep on exactly one of delta-db or p0".into(),
            ))
        }
    };
    let batches = run_grid(spec)?;
    write_outputs(spec, &batches)?;
    let points: Vec<FitPoint> = batches
        .iter()
        .map(|b| FitPoint::from_batch(axis, b))
        .collect();
    let est = fit_threshold(axis, &points, 200, spec.seed)?;
    println!(
        "crossing {} = {:.4} (95% CI {:.4}..{:.4}, nu {:.2})",
        est.axis.token(),
        est.x_c,
        est.ci_low,
        est.ci_high,
        est.nu
    );
    let (fixed_axis, fixed_value): (&'static str, f64) = match axis {
        SweepAxis::DeltaDb => ("p0", spec.p0s[0]),
        SweepAxis::P0 => (
            "delta_db",
            if spec.deltas[0] > 0.0 {
                crate::db_from_delta(spec.deltas[0])
            } else {
                f64::INFINITY
            },
        ),
    };
    let record = FitRecord {
        fixed_axis,
        fixed_value,
        inner: spec.inner.token(),
        weights: spec.weights.token(),
        estimate: est.clone(),
    };
    let all = append_fit_record(&spec.out, &record)?;

    let x_label = match axis {
        SweepAxis::DeltaDb => "squeezing (dB)",
        SweepAxis::P0 => "swap-out probability p0",
    };
    let tag = format!(
        "{}_{}{}",
        axis.token(),
        fixed_axis,
        format!("{fixed_value:.4}").replace('.', "p")
    );
    fs::write(
        spec.out.join(format!("threshold_{tag}.svg")),
        crate::plot::threshold_plot(&points, Some(&est), x_label),
    )?;

    // Correctable-region figure from every fit available in the directory.
    let mut boundary: Vec<(f64, f64)> = Vec::new();
    for r in &all {
        match (r.fixed_axis, r.estimate.axis) {
            ("p0", SweepAxis::DeltaDb) => boundary.push((r.estimate.x_c, r.fixed_value)),
            ("delta_db", SweepAxis::P0) => {
                if r.fixed_value.is_finite() {
                    boundary.push((r.fixed_value, r.estimate.x_c));
                }
            }
            _ => {}
        }
    }
    fs::write(
        spec.out.join("region.svg"),
        crate::plot::region_plot(&boundary),
    )?;
    Ok(())
}

fn run_weights(args: &WeightsArgs) -> Result<()> {
    let seed = args.seed.or_else(env_seed).unwrap_or(1);
    println!("{:>2} {:>12} {:>12}", "m", "violation", "stderr");
    for &m in &args.m {
        let p = ring_parity_violation(m, args.trials, seed)?;
        let se = (p * (1.0 - p) / args.trials as f64).sqrt();
        println!("{m:>2} {p:>12.6} {se:>12.6}");
    }
    Ok(())
}

fn run_mux(args: &MuxArgs) -> Result<()> {
    let plan = plan_mux(args.p_gbs, args.p0)?;
    let mut table = String::new();
    let _ = writeln!(table, "{:<22} {:>12}", "per-device heralding", plan.p_gbs);
    let _ = writeln!(table, "{:<22} {:>12}", "target swap-out", plan.p0);
    let _ = writeln!(table, "{:<22} {:>12}", "devices", plan.n_gbs);
    let _ = writeln!(table, "{:<22} {:>12}", "switch-tree depth", plan.depth);
    let _ = writeln!(table, "{:<22} {:>12}", "switches", plan.switches);
    print!("{table}");
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&plan).map_err(|e| Error::Config(e.to_string()))?
        );
    }
    Ok(())
}

/// Entry point for the thin binary; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Simulate(args) => (|| {
            let spec = args.resolve()?;
            if spec.ds.len() > 1 || spec.p0s.len() > 1 || spec.deltas.len() > 1 {
                return Err(Error::Config(
                    "simulate takes a single parameter point; use sweep for grids".into(),
                ));
            }
            let batches = run_grid(&spec)?;
            write_outputs(&spec, &batches)
        })(),
        Command::Sweep(args) => (|| {
            let spec = args.resolve()?;
            let batches = run_grid(&spec)?;
            write_outputs(&spec, &batches)
        })(),
        Command::Threshold(args) => args.resolve().and_then(|spec| run_threshold(&spec)),
        Command::Weights(args) => run_weights(args),
        Command::Mux(args) => run_mux(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_row_shape() {
        let cfg = TrialConfig::new(3, crate::delta_from_db(13.0), 0.0);
        let lattice = build_lattice(
            3,
            BoundaryConvention::PeriodicTransverse,
            SignConvention::AllPlus,
        )
        .unwrap();
        let b = estimate_rate(&lattice, &cfg, 10, 2).unwrap();
        let row = csv_row(&b);
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("3,0,13,standard,analog,10,"));
    }

    #[test]
    fn infinite_squeezing_token() {
        let cfg = TrialConfig::new(2, 0.0, 0.2);
        let lattice = build_lattice(
            2,
            BoundaryConvention::PeriodicTransverse,
            SignConvention::AllPlus,
        )
        .unwrap();
        let b = estimate_rate(&lattice, &cfg, 5, 1).unwrap();
        assert!(csv_row(&b).contains(",inf,"));
        assert!(parse_delta_db("inf").unwrap() == 0.0);
        assert!(parse_delta_db("nonsense").is_err());
    }

    #[test]
    fn config_file_parsing_and_precedence() {
        let dir = std::env::temp_dir().join(format!("hrhg-cli-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg_path = dir.join("run.conf");
        fs::write(&cfg_path, "# comment\ntrials = 42\nseed = 9\ninner = algorithm2\n").unwrap();
        let args = GridArgs {
            d: vec![],
            p0: vec![],
            delta_db: vec![],
            inner: None,
            weights: None,
            trials: None,
            seed: Some(123),
            workers: Some(1),
            out: Some(dir.clone()),
            config: Some(cfg_path),
        };
        let spec = args.resolve().unwrap();
        assert_eq!(spec.trials, 42);
        assert_eq!(spec.seed, 123, "flag overrides config");
        assert_eq!(spec.inner, InnerVariant::Algorithm2);
        assert_eq!(spec.ds, vec![3]);
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn bad_config_line_is_rejected() {
        let dir = std::env::temp_dir().join(format!("hrhg-cli-bad-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg_path = dir.join("run.conf");
        fs::write(&cfg_path, "not a key value line\n").unwrap();
        assert!(read_config(&cfg_path).is_err());
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Invariant("x".into())), 3);
        assert_eq!(exit_code(&Error::Config("x".into())), 1);
    }
}
