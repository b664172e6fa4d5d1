//! The `dfa` command-line tool.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::config::{self, parse_range, parse_scales, RunConfig};
use crate::error::DfaError;
use crate::estimators::{
    default_scales, estimate, estimate_hurst, Estimator, GappedSeries, HurstFit, WindowPolicy,
};
use crate::expectation::{
    asymptotic_lambda, default_expected_scales, expected_f2, model_correction, model_variance,
};
use crate::generators::{add_polynomial_trend, block_gap_mask, rng_for, simulate, BlockMaskSpec};
use crate::io::{self, InputError};
use crate::mc::{run_ensemble, EnsembleConfig, MASK_STREAM};
use crate::models::CorrelationModel;
use crate::weights::{
    asymptotic_coefficients, asymptotic_weight_f64, closed_form_g, weight_function,
};

const DEFAULT_ORDER: usize = 2;
const DEFAULT_BLOCK_LENGTH: f64 = 12.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Numeric(#[from] DfaError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "dfa",
    version,
    about = "Detrended fluctuation analysis with exact expectations and gap-tolerant estimators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// JSON configuration file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Grid {
    /// Detrending order m
    #[arg(long)]
    pub order: Option<usize>,
    /// Scales: `8,16,32`, `4..64`, `log:4:342:30` or `pow2:4:4096`
    #[arg(long)]
    pub scales: Option<String>,
}

fn model_arg(s: &str) -> Result<CorrelationModel, String> {
    CorrelationModel::parse(s).map_err(|e| e.to_string())
}

fn range_arg(s: &str) -> Result<(usize, usize), String> {
    parse_range(s).map_err(|e| e.to_string())
}

fn coeffs_arg(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad coefficient '{c}'"))
        })
        .collect()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fluctuation function and Hurst exponent of a series
    Analyze {
        /// Input series, one value per line (`-` for stdin); empty or NA = missing
        input: PathBuf,
        #[command(flatten)]
        grid: Grid,
        /// standard, f_hat or f_tilde (default: standard for complete input, f_hat otherwise)
        #[arg(long)]
        estimator: Option<Estimator>,
        /// Regression range `lo:hi` for the Hurst exponent
        #[arg(long, value_parser = range_arg)]
        fit_range: Option<(usize, usize)>,
        /// Availability mask, one 1/0 per line, combined with missing input values
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Drop windows without any present value
        #[arg(long)]
        skip_empty_windows: bool,
        /// Write the Hurst fit as JSON to this file
        #[arg(long)]
        hurst_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact expected squared fluctuation function of a model
    Expected {
        /// Model, e.g. `fgn,hurst=0.7` or `{"kind":"ou","tau":20}`
        #[arg(long, value_parser = model_arg)]
        model: Option<CorrelationModel>,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-size correction K²(s) and the corrected expectation
    Bias {
        /// Model, as for `expected`
        #[arg(long, value_parser = model_arg)]
        model: Option<CorrelationModel>,
        /// Hurst exponent of the applied correction (default: the model's)
        #[arg(long)]
        correction_hurst: Option<f64>,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        common: Common,
    },
    /// Weight function G(j, s) and its asymptotic coefficients
    Weights {
        #[command(flatten)]
        grid: Grid,
        /// Print the exact asymptotic coefficients as JSON instead
        #[arg(long)]
        coefficients: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a synthetic series
    Simulate {
        /// Model, as for `expected`
        #[arg(long, value_parser = model_arg)]
        model: Option<CorrelationModel>,
        /// Series length
        #[arg(long)]
        n: Option<usize>,
        /// Base seed; with the replicate index it fixes the series
        #[arg(long)]
        seed: Option<u64>,
        /// Replicate index
        #[arg(long)]
        replicate: Option<u64>,
        /// Polynomial trend coefficients c0,c1,... added at t = 1..n
        #[arg(long, value_parser = coeffs_arg)]
        trend: Option<Vec<f64>>,
        /// Mark values missing according to this mask file
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Fraction of values removed in random blocks
        #[arg(long)]
        gap_fraction: Option<f64>,
        /// Mean length of the missing blocks
        #[arg(long)]
        block_length: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo ensemble of gap-free and gap-tolerant estimates
    Mc {
        /// Model, as for `expected`
        #[arg(long, value_parser = model_arg)]
        model: Option<CorrelationModel>,
        /// Series length
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        grid: Grid,
        /// Number of replicates
        #[arg(long)]
        ensemble: Option<usize>,
        /// Base seed; replicate r uses stream r
        #[arg(long)]
        seed: Option<u64>,
        /// Gap-tolerant estimators to run, comma separated
        #[arg(long, value_delimiter = ',')]
        estimator: Option<Vec<Estimator>>,
        #[arg(long, value_parser = range_arg)]
        fit_range: Option<(usize, usize)>,
        /// Fixed availability mask applied to every replicate
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Fraction of values removed in random blocks (one mask for the whole ensemble)
        #[arg(long)]
        gap_fraction: Option<f64>,
        /// Mean length of the missing blocks
        #[arg(long)]
        block_length: Option<f64>,
        #[arg(long)]
        skip_empty_windows: bool,
        /// Write per-replicate Hurst estimates as CSV to this file
        #[arg(long)]
        hurst_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dfa: {e}");
            e.exit_code()
        }
    }
}

fn load_config(common: &Common) -> CliResult<RunConfig> {
    let Some(path) = &common.config else {
        return Ok(RunConfig::default());
    };
    if !path.exists() {
        return Err(CliError::Io(format!("{}: no such file", path.display())));
    }
    config::load(Some(path)).map_err(CliError::Usage)
}

fn grid_flags(grid: &Grid) -> RunConfig {
    RunConfig {
        order: grid.order,
        scales: grid.scales.clone(),
        ..Default::default()
    }
}

fn policy(skip_empty: bool) -> Option<WindowPolicy> {
    skip_empty.then_some(WindowPolicy::SkipEmpty)
}

fn scales_or(cfg: &RunConfig, default: impl FnOnce() -> Vec<usize>) -> CliResult<Vec<usize>> {
    let scales = match &cfg.scales {
        Some(text) => parse_scales(text).map_err(|e| CliError::Usage(e.to_string()))?,
        None => default(),
    };
    if scales.is_empty() {
        return Err(CliError::Usage(
            "no usable scales; pass --scales or a longer series".into(),
        ));
    }
    Ok(scales)
}

fn require_model(cfg: &RunConfig) -> CliResult<CorrelationModel> {
    cfg.model
        .clone()
        .ok_or_else(|| CliError::Usage("a model is required (--model)".into()))
}

fn write_json(common: &Common, value: &serde_json::Value) -> CliResult<()> {
    let mut w = io::output(common.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn open_out(common: &Common, cfg: &RunConfig) -> CliResult<Box<dyn Write>> {
    let mut w = io::output(common.out.as_deref())?;
    io::write_header(&mut w, &cfg.header_lines())?;
    Ok(w)
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze {
            input,
            grid,
            estimator,
            fit_range,
            mask,
            skip_empty_windows,
            hurst_out,
            common,
        } => {
            let flags = RunConfig {
                estimator: estimator.map(|e| vec![e]),
                fit_range,
                mask,
                window_policy: policy(skip_empty_windows),
                ..grid_flags(&grid)
            };
            let cfg = load_config(&common)?.merged(flags);
            analyze(&input, &cfg, &common, hurst_out.as_deref())
        }
        Command::Expected {
            model,
            grid,
            common,
        } => {
            let cfg = load_config(&common)?.merged(RunConfig {
                model,
                ..grid_flags(&grid)
            });
            expected(&cfg, &common)
        }
        Command::Bias {
            model,
            correction_hurst,
            grid,
            common,
        } => {
            let cfg = load_config(&common)?.merged(RunConfig {
                model,
                correction_hurst,
                ..grid_flags(&grid)
            });
            bias(&cfg, &common)
        }
        Command::Weights {
            grid,
            coefficients,
            common,
        } => {
            let cfg = load_config(&common)?.merged(grid_flags(&grid));
            weights(&cfg, coefficients, &common)
        }
        Command::Simulate {
            model,
            n,
            seed,
            replicate,
            trend,
            mask,
            gap_fraction,
            block_length,
            common,
        } => {
            let flags = RunConfig {
                model,
                n,
                seed,
                replicate,
                trend,
                mask,
                gap_fraction,
                block_length,
                ..Default::default()
            };
            let cfg = load_config(&common)?.merged(flags);
            simulate_cmd(&cfg, &common)
        }
        Command::Mc {
            model,
            n,
            grid,
            ensemble,
            seed,
            estimator,
            fit_range,
            mask,
            gap_fraction,
            block_length,
            skip_empty_windows,
            hurst_out,
            common,
        } => {
            let flags = RunConfig {
                model,
                n,
                ensemble,
                seed,
                estimator,
                fit_range,
                mask,
                gap_fraction,
                block_length,
                window_policy: policy(skip_empty_windows),
                ..grid_flags(&grid)
            };
            let cfg = load_config(&common)?.merged(flags);
            mc(&cfg, &common, hurst_out.as_deref())
        }
    }
}

fn analyze(
    input: &Path,
    cfg: &RunConfig,
    common: &Common,
    hurst_out: Option<&Path>,
) -> CliResult<()> {
    let raw = io::read_series(input)?;
    if raw.is_empty() {
        return Err(CliError::Io(format!("{}: no values", input.display())));
    }
    let mut gs = GappedSeries::from_options(&raw)?;
    if let Some(path) = &cfg.mask {
        let mask = io::read_mask(path)?;
        if mask.len() != gs.len() {
            return Err(DfaError::DimensionMismatch {
                expected: gs.len(),
                got: mask.len(),
            }
            .into());
        }
        let combined = gs.mask().iter().zip(&mask).map(|(a, b)| *a && *b).collect();
        gs = GappedSeries::new(gs.values().to_vec(), combined)?;
    }
    let order = cfg.order.unwrap_or(DEFAULT_ORDER);
    let scales = scales_or(cfg, || default_scales(gs.len(), order))?;
    let estimator = match cfg.estimator.as_deref() {
        Some([e]) => *e,
        Some(_) => return Err(CliError::Usage("analyze takes a single estimator".into())),
        None if gs.is_complete() => Estimator::Standard,
        None => Estimator::FHat,
    };
    let curve = estimate(
        &gs,
        estimator,
        order,
        &scales,
        cfg.window_policy.unwrap_or_default(),
    )?;
    let fit: Option<HurstFit> = estimate_hurst(&curve, cfg.fit_range).ok();

    if let Some(path) = hurst_out {
        let mut w = io::output(Some(path))?;
        serde_json::to_writer_pretty(
            &mut w,
            &json!({ "estimator": estimator, "order": order, "fit": fit }),
        )
        .map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
    }
    match common.format {
        Format::Json => write_json(
            common,
            &json!({ "curve": curve, "fit": fit, "missing_fraction": gs.missing_fraction() }),
        ),
        Format::Csv => {
            let mut header = cfg.header_lines();
            header.push(format!("estimator: {estimator}"));
            header.push(format!("missing_fraction: {}", gs.missing_fraction()));
            if let Some(fit) = &fit {
                header.push(format!(
                    "hurst: {} (fit range {}..{}, {} points)",
                    fit.hurst, fit.fit_range.0, fit.fit_range.1, fit.n_points
                ));
            }
            let mut w = io::output(common.out.as_deref())?;
            io::write_curve(&mut w, &curve, &header)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn expected(cfg: &RunConfig, common: &Common) -> CliResult<()> {
    let model = require_model(cfg)?;
    let order = cfg.order.unwrap_or(DEFAULT_ORDER);
    let scales = scales_or(cfg, || default_expected_scales(order))?;
    let curve = crate::expectation::ExpectedCurve::compute(&model, order, &scales)?;
    let lambda = model
        .hurst()
        .map(|h| asymptotic_lambda(order, h))
        .transpose()?;
    let variance = model_variance(&model);
    let rows: Vec<(usize, f64, Option<f64>, Option<f64>)> = curve
        .scales
        .iter()
        .zip(&curve.ef2)
        .map(|(&s, &e)| {
            let ls = lambda.map(|l| variance * l.power_law(s));
            (s, e, ls.map(|ls| e / ls), ls)
        })
        .collect();
    match common.format {
        Format::Json => write_json(
            common,
            &json!({
                "order": order,
                "model": model,
                "lambda": lambda.map(|l| l.lambda),
                "rows": rows.iter().map(|(s, e, k2, ls)| json!({"s": s, "EF2": e, "K2": k2, "lambda_s2H": ls})).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut w = open_out(
                common,
                &RunConfig {
                    model: Some(model),
                    order: Some(order),
                    ..cfg.clone()
                },
            )?;
            writeln!(w, "s,EF2,K2,lambda_s2H")?;
            for (s, e, k2, ls) in rows {
                writeln!(w, "{s},{e},{},{}", io::opt(k2), io::opt(ls))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn correction_model(hurst: f64) -> CorrelationModel {
    if hurst < 1.0 {
        CorrelationModel::fgn(hurst)
    } else {
        CorrelationModel::fbm(hurst)
    }
}

fn bias(cfg: &RunConfig, common: &Common) -> CliResult<()> {
    let model = require_model(cfg)?;
    let hurst = model.hurst().ok_or_else(|| {
        CliError::Usage("bias needs a model with a Hurst exponent (white, fgn or fbm)".into())
    })?;
    let order = cfg.order.unwrap_or(DEFAULT_ORDER);
    let corr_hurst = cfg.correction_hurst.unwrap_or(hurst);
    let corr = correction_model(corr_hurst);
    let scales = scales_or(cfg, || default_expected_scales(order))?;
    let lambda = asymptotic_lambda(order, hurst)?;
    let variance = model_variance(&model);
    let mut rows = Vec::with_capacity(scales.len());
    for &s in &scales {
        let e = expected_f2(&model, order, s)?;
        let k2 = model_correction(&corr, order, s)?;
        let ls = variance * lambda.power_law(s);
        let modified = crate::expectation::modified_f2(e, k2)?;
        rows.push((s, e, k2, ls, k2.sqrt(), modified, modified / ls - 1.0));
    }
    match common.format {
        Format::Json => write_json(
            common,
            &json!({
                "order": order,
                "model": model,
                "correction_hurst": corr_hurst,
                "rows": rows.iter().map(|r| json!({"s": r.0, "EF2": r.1, "K2": r.2, "lambda_s2H": r.3, "K": r.4, "F2_mod": r.5, "rel_deviation": r.6})).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut w = open_out(
                common,
                &RunConfig {
                    model: Some(model),
                    order: Some(order),
                    correction_hurst: Some(corr_hurst),
                    ..cfg.clone()
                },
            )?;
            writeln!(w, "s,EF2,K2,lambda_s2H,K,F2_mod,rel_deviation")?;
            for (s, e, k2, ls, k, m, d) in rows {
                writeln!(w, "{s},{e},{k2},{ls},{k},{m},{d}")?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn weights(cfg: &RunConfig, coefficients: bool, common: &Common) -> CliResult<()> {
    let order = cfg.order.unwrap_or(DEFAULT_ORDER);
    if coefficients {
        return write_json(common, &asymptotic_coefficients(order)?.to_json());
    }
    let scales = scales_or(cfg, || vec![(order + 2).max(10)])?;
    let d = asymptotic_coefficients(order).ok().map(|c| c.d_f64());
    let mut rows = Vec::new();
    for &s in &scales {
        let g = weight_function(order, s)?;
        for (j, &v) in g.values().iter().enumerate() {
            let closed = (1..=2)
                .contains(&order)
                .then(|| closed_form_g(order, j, s))
                .transpose()?;
            let asym = d.as_ref().map(|d| asymptotic_weight_f64(d, j, s));
            rows.push((s, j, v, closed, asym));
        }
    }
    match common.format {
        Format::Json => write_json(
            common,
            &json!({
                "order": order,
                "rows": rows.iter().map(|r| json!({"s": r.0, "j": r.1, "G": r.2, "G_closed_form": r.3, "G_asymptotic": r.4})).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut w = open_out(
                common,
                &RunConfig {
                    order: Some(order),
                    ..cfg.clone()
                },
            )?;
            writeln!(w, "s,j,G,G_closed_form,G_asymptotic")?;
            for (s, j, g, c, a) in rows {
                writeln!(w, "{s},{j},{g},{},{}", io::opt(c), io::opt(a))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

/// The mask a command uses: a file, a synthetic block mask, or none.
fn resolve_mask(cfg: &RunConfig, n: usize, seed: u64) -> CliResult<Option<Vec<bool>>> {
    match (&cfg.mask, cfg.gap_fraction) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "pass either --mask or --gap-fraction, not both".into(),
        )),
        (Some(path), None) => {
            let mask = io::read_mask(path)?;
            if mask.len() != n {
                return Err(DfaError::DimensionMismatch {
                    expected: n,
                    got: mask.len(),
                }
                .into());
            }
            Ok(Some(mask))
        }
        (None, Some(f)) => {
            let spec = BlockMaskSpec {
                gap_fraction: f,
                mean_block_length: cfg.block_length.unwrap_or(DEFAULT_BLOCK_LENGTH),
            };
            Ok(Some(block_gap_mask(
                n,
                &spec,
                &mut rng_for(seed, MASK_STREAM),
            )?))
        }
        (None, None) => Ok(None),
    }
}

fn simulate_cmd(cfg: &RunConfig, common: &Common) -> CliResult<()> {
    let model = require_model(cfg)?;
    let n = cfg
        .n
        .ok_or_else(|| CliError::Usage("a length is required (--n)".into()))?;
    if n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    let seed = cfg.seed.unwrap_or(0);
    let mut x = simulate(&model, n, &mut rng_for(seed, cfg.replicate.unwrap_or(0)))?;
    if let Some(c) = &cfg.trend {
        add_polynomial_trend(&mut x, c);
    }
    let mask = resolve_mask(cfg, n, seed)?;
    match common.format {
        Format::Json => write_json(
            common,
            &json!({
                "model": model,
                "seed": seed,
                "values": x.iter().enumerate().map(|(i, v)| mask.as_ref().is_none_or(|m| m[i]).then_some(*v)).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut w = io::output(common.out.as_deref())?;
            let header = RunConfig {
                model: Some(model),
                n: Some(n),
                seed: Some(seed),
                ..cfg.clone()
            }
            .header_lines();
            io::write_series(&mut w, &x, mask.as_deref(), &header)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn mc(cfg: &RunConfig, common: &Common, hurst_out: Option<&Path>) -> CliResult<()> {
    let model = require_model(cfg)?;
    let n = cfg.n.unwrap_or(1368);
    let order = cfg.order.unwrap_or(DEFAULT_ORDER);
    let seed = cfg.seed.unwrap_or(0);
    let scales = scales_or(cfg, || default_scales(n, order))?;
    let mask = resolve_mask(cfg, n, seed)?;
    let estimators = match (&cfg.estimator, &mask) {
        (Some(e), _) => e.clone(),
        (None, Some(_)) => vec![Estimator::FHat, Estimator::FTilde],
        (None, None) => vec![Estimator::Standard],
    };
    let ec = EnsembleConfig {
        model: model.clone(),
        n,
        order,
        scales,
        ensemble: cfg.ensemble.unwrap_or(500),
        seed,
        mask,
        estimators,
        fit_range: cfg.fit_range,
        policy: cfg.window_policy.unwrap_or_default(),
    };
    let res = run_ensemble(&ec)?;
    if let Some(path) = hurst_out {
        let mut w = io::output(Some(path))?;
        let names: Vec<String> = res
            .summaries
            .iter()
            .map(|s| s.estimator.to_string())
            .collect();
        writeln!(w, "replicate,{}", names.join(","))?;
        for r in 0..res.ensemble {
            let vals: Vec<String> = res.summaries.iter().map(|s| io::opt(s.hurst[r])).collect();
            writeln!(w, "{r},{}", vals.join(","))?;
        }
        w.flush()?;
    }
    match common.format {
        Format::Json => write_json(
            common,
            &serde_json::to_value(&res).map_err(|e| CliError::Io(e.to_string()))?,
        ),
        Format::Csv => {
            let mut header = RunConfig {
                model: Some(model),
                n: Some(n),
                order: Some(order),
                seed: Some(seed),
                ..cfg.clone()
            }
            .header_lines();
            header.push(format!("missing_fraction: {}", res.missing_fraction));
            let mut w = io::output(common.out.as_deref())?;
            io::write_header(&mut w, &header)?;
            writeln!(w, "estimator,scale,mean_F2,se_F2,q05_F,q95_F,n_defined")?;
            for s in &res.summaries {
                for (i, &scale) in res.scales.iter().enumerate() {
                    writeln!(
                        w,
                        "{},{scale},{},{},{},{},{}",
                        s.estimator,
                        io::opt(Some(s.mean_f2[i])),
                        io::opt(Some(s.se_f2[i])),
                        io::opt(Some(s.q05_f[i])),
                        io::opt(Some(s.q95_f[i])),
                        s.n_defined[i]
                    )?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}
