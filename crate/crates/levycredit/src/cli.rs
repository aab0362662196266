//! Command-line surface: calibration, default-probability reports, term
//! structures, pricing, Monte Carlo validation and the maturity sweep.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::calibration::{calibrate, CalibrationResult, CalibrationSettings, EquitySeries};
use crate::error::Error;
use crate::io::{
    join_params, load_equity_series, percent_2dp, IssuerConfig, MeasureChoice, ReportDocument,
    ReportRow, Window,
};
use crate::mc::{mc_default_probability, mc_equity_value, simulate_increments};
use crate::metrics::{
    default_probability, dense_horizons, term_structure, Measure, MeasureTag,
};
use crate::models::{ModelKind, ModelParams};
use crate::pricing::{distance_input, equity_value, DebtSpec, SeriesControl};

#[derive(Parser)]
#[command(
    name = "levycredit",
    version,
    about = "Structural credit risk under pure-jump Levy dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Calibrate model parameters from an observed equity series
    Calibrate(CalibrateArgs),
    /// Default probabilities for given horizons
    Pd(PdArgs),
    /// Dense horizon/distance/probability table
    TermStructure(TermStructureArgs),
    /// Price equity for explicit model parameters
    Price(PriceArgs),
    /// Closed forms against the Monte Carlo oracle
    McValidate(McValidateArgs),
    /// Recalibrate across debt maturities (parameter-stability sweep)
    SweepMaturity(SweepMaturityArgs),
}

/// Model selection plus its parameters.
#[derive(Args, Debug)]
struct ModelFlags {
    /// merton | neggamma | negig | symvg
    #[arg(long)]
    model: ModelKind,
    /// Diffusion or VG scale parameter σ
    #[arg(long)]
    sigma: Option<f64>,
    /// NegGamma rate or NegIG shape λ
    #[arg(long)]
    lambda: Option<f64>,
    /// NegGamma shape ρ
    #[arg(long)]
    rho: Option<f64>,
    /// NegIG mean μ
    #[arg(long)]
    mu: Option<f64>,
    /// VG clock variance ν
    #[arg(long)]
    nu: Option<f64>,
}

impl ModelFlags {
    fn build(&self) -> crate::Result<ModelParams> {
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| Error::domain(format!("--{name} is required for {}", self.model)))
        };
        match self.model {
            ModelKind::Merton => ModelParams::merton(need("sigma", self.sigma)?),
            ModelKind::NegGamma => {
                ModelParams::neg_gamma(need("lambda", self.lambda)?, need("rho", self.rho)?)
            }
            ModelKind::NegIg => {
                ModelParams::neg_ig(need("lambda", self.lambda)?, need("mu", self.mu)?)
            }
            ModelKind::SymVg => {
                ModelParams::sym_vg(need("sigma", self.sigma)?, need("nu", self.nu)?)
            }
        }
    }
}

#[derive(Args)]
struct CalibrateArgs {
    /// Issuer TOML config; replaces the explicit flags below
    #[arg(long, conflicts_with_all = ["model", "equity_csv", "k", "t", "r"])]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
    /// Equity series CSV (date,value with header)
    #[arg(long)]
    equity_csv: Option<PathBuf>,
    /// Debt face value K
    #[arg(long)]
    k: Option<f64>,
    /// Debt maturity T in years
    #[arg(long)]
    t: Option<f64>,
    /// Risk-free rate r
    #[arg(long)]
    r: Option<f64>,
    /// 1y | 2y | all | FROM:TO
    #[arg(long, default_value = "1y")]
    window: Window,
    /// Sup-norm parameter tolerance of the fixed point
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// Series truncation for the symVG pricer
    #[arg(long, default_value_t = 15)]
    nmax: u32,
    /// Write the parameters JSON here as well as to stdout
    #[arg(long)]
    params_out: Option<PathBuf>,
    /// Write the implied-asset series CSV here
    #[arg(long)]
    assets_out: Option<PathBuf>,
}

#[derive(Args)]
struct PdArgs {
    /// Issuer TOML config: calibrate first, then report
    #[arg(long, conflicts_with_all = ["va", "k", "r", "horizons"])]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: Option<ModelFlagsOpt>,
    /// Asset value V_A
    #[arg(long)]
    va: Option<f64>,
    /// Debt face value K
    #[arg(long)]
    k: Option<f64>,
    /// Risk-free rate r
    #[arg(long)]
    r: Option<f64>,
    /// Horizons in years, comma separated
    #[arg(long, value_delimiter = ',')]
    horizons: Vec<f64>,
    /// risk-neutral | actual | both
    #[arg(long, default_value = "risk-neutral")]
    measure: MeasureChoice,
    /// Actual drift r̄ (required when the actual measure is requested
    /// without a config)
    #[arg(long)]
    rbar: Option<f64>,
    /// Series truncation for the symVG pricer
    #[arg(long, default_value_t = 15)]
    nmax: u32,
    /// Write the report CSV here (stdout shows the readable table)
    #[arg(long)]
    out: Option<PathBuf>,
}

// like ModelFlags but fully optional so `pd --config` needs no model flags
#[derive(Args, Debug)]
struct ModelFlagsOpt {
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
}

impl ModelFlagsOpt {
    fn build(&self) -> crate::Result<ModelParams> {
        let model = self
            .model
            .ok_or_else(|| Error::domain("--model is required without --config"))?;
        ModelFlags {
            model,
            sigma: self.sigma,
            lambda: self.lambda,
            rho: self.rho,
            mu: self.mu,
            nu: self.nu,
        }
        .build()
    }
}

#[derive(Args)]
struct TermStructureArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long)]
    va: f64,
    #[arg(long)]
    k: f64,
    #[arg(long)]
    r: f64,
    /// Report under the actual measure with this drift instead of r
    #[arg(long)]
    rbar: Option<f64>,
    /// Largest horizon of the dense grid, in years
    #[arg(long, default_value_t = 10.0)]
    max_t: f64,
    #[arg(long, default_value_t = 40)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PriceArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long)]
    va: f64,
    #[arg(long)]
    k: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 15)]
    nmax: u32,
}

#[derive(Args)]
struct McValidateArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long)]
    va: f64,
    #[arg(long)]
    k: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 1_000_000)]
    paths: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 15)]
    nmax: u32,
}

#[derive(Args)]
struct SweepMaturityArgs {
    /// Issuer TOML config naming the equity series and models
    #[arg(long)]
    config: PathBuf,
    /// Maturities to recalibrate at (defaults to the config's list)
    #[arg(long, value_delimiter = ',')]
    maturities: Vec<f64>,
    #[arg(long, default_value_t = 15)]
    nmax: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Run the CLI against explicit argv and streams; returns the exit status
/// (0 success, 2 input error, 3 non-convergence).
pub fn run_command<O: Write, E: Write>(argv: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            emit_error(err, "usage", &e.to_string());
            return 2;
        }
    };
    let result = match cli.command {
        Cmd::Calibrate(args) => cmd_calibrate(args, out),
        Cmd::Pd(args) => cmd_pd(args, out),
        Cmd::TermStructure(args) => cmd_term_structure(args, out),
        Cmd::Price(args) => cmd_price(args, out),
        Cmd::McValidate(args) => cmd_mc_validate(args, out),
        Cmd::SweepMaturity(args) => cmd_sweep(args, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let (slug, code) = match &e {
                Error::NotConverged(_) => ("not-converged", 3),
                _ => (error_slug(&e), 2),
            };
            emit_error(err, slug, &e.to_string());
            code
        }
    }
}

fn error_slug(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Overflow(_) => "overflow",
        Error::PoleProximity { .. } => "pole-proximity",
        Error::QuadratureNonConvergence { .. } => "quadrature",
        Error::NoSolution(_) => "no-solution",
        Error::NonPositiveKurtosis(_) => "nonpositive-kurtosis",
        Error::DegenerateSeries => "degenerate-series",
        Error::NotConverged(_) => "not-converged",
        Error::Parse { .. } => "parse",
        Error::NonPositivePrice { .. } => "nonpositive-price",
        Error::NonMonotoneDates(_) => "nonmonotone-dates",
        Error::TooShort { .. } => "too-short",
        Error::Io(_) => "io",
    }
}

fn emit_error<E: Write>(err: &mut E, slug: &str, message: &str) {
    let payload = serde_json::json!({ "error": slug, "message": message });
    let _ = writeln!(err, "{payload}");
}

fn write_or_stdout<O: Write>(
    out: &mut O,
    path: &Option<PathBuf>,
    content: &str,
) -> crate::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => write!(out, "{content}")?,
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct CalibrationReport<'a> {
    ticker: &'a str,
    maturity: f64,
    results: Vec<ModelCalibration>,
}

#[derive(serde::Serialize)]
struct ModelCalibration {
    model: ModelKind,
    params: ModelParams,
    iterations: usize,
    converged: bool,
    actual_drift: Option<f64>,
    implied_asset_last: f64,
    implied_asset_mean: f64,
    warnings: Vec<String>,
}

fn summarize(model: ModelKind, r: &CalibrationResult) -> ModelCalibration {
    let n = r.implied_assets.len().max(1) as f64;
    ModelCalibration {
        model,
        params: r.params,
        iterations: r.iterations,
        converged: r.converged,
        actual_drift: r.actual_drift,
        implied_asset_last: *r.implied_assets.last().unwrap_or(&f64::NAN),
        implied_asset_mean: r.implied_assets.iter().sum::<f64>() / n,
        warnings: r.warnings.clone(),
    }
}

fn cmd_calibrate<O: Write>(args: CalibrateArgs, out: &mut O) -> crate::Result<()> {
    let settings = CalibrationSettings {
        tolerance: args.tolerance,
        max_iter: args.max_iter,
        ..Default::default()
    };
    let ctrl = SeriesControl { n_max: args.nmax, ..Default::default() };

    let (ticker, models, series) = match &args.config {
        Some(path) => {
            let cfg = IssuerConfig::from_toml_file(path)?;
            let debt =
                DebtSpec::new(cfg.debt_face_value, cfg.maturities[0], cfg.risk_free_rate)?;
            let series = load_equity_series(&cfg.equity_csv, cfg.window, debt)?;
            (cfg.ticker.clone(), cfg.models.clone(), series)
        }
        None => {
            let model = args.model.ok_or_else(|| Error::domain("--model or --config required"))?;
            let csv = args
                .equity_csv
                .as_ref()
                .ok_or_else(|| Error::domain("--equity-csv required without --config"))?;
            let debt = DebtSpec::new(
                args.k.ok_or_else(|| Error::domain("--k required without --config"))?,
                args.t.ok_or_else(|| Error::domain("--t required without --config"))?,
                args.r.ok_or_else(|| Error::domain("--r required without --config"))?,
            )?;
            let series = load_equity_series(csv, args.window, debt)?;
            (
                csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                vec![model],
                series,
            )
        }
    };

    let mut results = Vec::new();
    let mut failure: Option<Error> = None;
    for model in &models {
        match calibrate(*model, &series, &settings, &ctrl) {
            Ok(r) => {
                write_assets(&args.assets_out, *model, models.len() > 1, &series, &r)?;
                results.push(summarize(*model, &r));
            }
            Err(Error::NotConverged(r)) => {
                results.push(summarize(*model, &r));
                failure.get_or_insert(Error::NotConverged(r));
            }
            Err(e) => return Err(e),
        }
    }
    let report = CalibrationReport {
        ticker: &ticker,
        maturity: series.debt.maturity,
        results,
    };
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    writeln!(out, "{json}")?;
    if let Some(path) = &args.params_out {
        std::fs::write(path, &json)?;
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn write_assets(
    target: &Option<PathBuf>,
    model: ModelKind,
    multi: bool,
    series: &EquitySeries,
    result: &CalibrationResult,
) -> crate::Result<()> {
    let Some(base) = target else { return Ok(()) };
    let path = if multi {
        let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let ext = base.extension().map(|s| s.to_string_lossy().into_owned());
        let name = match ext {
            Some(ext) => format!("{stem}_{model}.{ext}"),
            None => format!("{stem}_{model}"),
        };
        base.with_file_name(name)
    } else {
        base.clone()
    };
    let mut body = String::from("date,implied_asset\n");
    for ((date, _), asset) in series.observations().iter().zip(&result.implied_assets) {
        body.push_str(&format!("{date},{asset:.6}\n"));
    }
    std::fs::write(path, body)?;
    Ok(())
}

fn measure_tags(
    choice: MeasureChoice,
    r: f64,
    rbar: Option<f64>,
) -> crate::Result<Vec<MeasureTag>> {
    let mut tags = Vec::new();
    if choice.wants(Measure::RiskNeutral) {
        tags.push(MeasureTag::risk_neutral(r));
    }
    if choice.wants(Measure::Actual) {
        let rbar = rbar.ok_or_else(|| {
            Error::domain("actual measure requested but no actual drift available (--rbar)")
        })?;
        tags.push(MeasureTag::actual(rbar));
    }
    Ok(tags)
}

fn pd_rows(
    ticker: &str,
    params: &ModelParams,
    v_a: f64,
    face: f64,
    horizons: &[f64],
    tags: &[MeasureTag],
    iterations: u64,
    converged: bool,
    warnings: &str,
) -> crate::Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for tag in tags {
        for report in term_structure(params, v_a, face, *tag, horizons)? {
            rows.push(ReportRow {
                ticker: ticker.to_string(),
                model: params.kind(),
                horizon: report.horizon,
                measure: tag.measure,
                rate: tag.rate,
                params: join_params(&params.as_vec()),
                implied_asset: v_a,
                distance: report.distance,
                probability: report.probability,
                probability_pct: percent_2dp(report.probability),
                iterations,
                converged,
                warnings: warnings.to_string(),
            });
        }
    }
    Ok(rows)
}

fn print_rows<O: Write>(out: &mut O, rows: &[ReportRow]) -> crate::Result<()> {
    for r in rows {
        writeln!(
            out,
            "{} model={} T={:.4} measure={} rate={:.6} va={:.4} distance={:.6} probability={:.6} ({})",
            r.ticker,
            r.model,
            r.horizon,
            r.measure,
            r.rate,
            r.implied_asset,
            r.distance,
            r.probability,
            r.probability_pct
        )?;
    }
    Ok(())
}

fn cmd_pd<O: Write>(args: PdArgs, out: &mut O) -> crate::Result<()> {
    let ctrl = SeriesControl { n_max: args.nmax, ..Default::default() };
    let mut rows = Vec::new();
    match &args.config {
        Some(path) => {
            let cfg = IssuerConfig::from_toml_file(path)?;
            let debt =
                DebtSpec::new(cfg.debt_face_value, cfg.maturities[0], cfg.risk_free_rate)?;
            let series = load_equity_series(&cfg.equity_csv, cfg.window, debt)?;
            for model in &cfg.models {
                let result = calibrate(*model, &series, &CalibrationSettings::default(), &ctrl)?;
                let tags = measure_tags(cfg.measure, cfg.risk_free_rate, result.actual_drift)?;
                let v_a = *result.implied_assets.last().expect("non-empty series");
                rows.extend(pd_rows(
                    &cfg.ticker,
                    &result.params,
                    v_a,
                    cfg.debt_face_value,
                    &cfg.maturities,
                    &tags,
                    result.iterations as u64,
                    result.converged,
                    &result.warnings.join("; "),
                )?);
            }
        }
        None => {
            let params = args
                .model
                .as_ref()
                .ok_or_else(|| Error::domain("--model or --config required"))?
                .build()?;
            let v_a = args.va.ok_or_else(|| Error::domain("--va required without --config"))?;
            let face = args.k.ok_or_else(|| Error::domain("--k required without --config"))?;
            let r = args.r.ok_or_else(|| Error::domain("--r required without --config"))?;
            if args.horizons.is_empty() {
                return Err(Error::domain("--horizons required without --config"));
            }
            let tags = measure_tags(args.measure, r, args.rbar)?;
            rows.extend(pd_rows("-", &params, v_a, face, &args.horizons, &tags, 0, true, "")?);
        }
    }
    print_rows(out, &rows)?;
    if let Some(path) = &args.out {
        let mut buf = Vec::new();
        ReportDocument { rows }.to_csv(&mut buf)?;
        std::fs::write(path, buf)?;
    }
    Ok(())
}

fn cmd_term_structure<O: Write>(args: TermStructureArgs, out: &mut O) -> crate::Result<()> {
    let params = args.model.build()?;
    let tag = match args.rbar {
        Some(rbar) => MeasureTag::actual(rbar),
        None => MeasureTag::risk_neutral(args.r),
    };
    let horizons = dense_horizons(args.max_t, args.points);
    let reports = term_structure(&params, args.va, args.k, tag, &horizons)?;
    let mut body = String::from("horizon,distance,probability,probability_pct\n");
    for r in &reports {
        body.push_str(&format!(
            "{:.6},{:.12e},{:.12e},{}\n",
            r.horizon,
            r.distance,
            r.probability,
            percent_2dp(r.probability)
        ));
    }
    write_or_stdout(out, &args.out, &body)
}

fn cmd_price<O: Write>(args: PriceArgs, out: &mut O) -> crate::Result<()> {
    let params = args.model.build()?;
    let debt = DebtSpec::new(args.k, args.t, args.r)?;
    let ctrl = SeriesControl { n_max: args.nmax, ..Default::default() };
    let price = equity_value(&params, args.va, &debt, &ctrl)?;
    writeln!(out, "{price:.3}")?;
    Ok(())
}

fn cmd_mc_validate<O: Write>(args: McValidateArgs, out: &mut O) -> crate::Result<()> {
    let params = args.model.build()?;
    let debt = DebtSpec::new(args.k, args.t, args.r)?;
    let ctrl = SeriesControl { n_max: args.nmax, ..Default::default() };

    let closed_price = equity_value(&params, args.va, &debt, &ctrl)?;
    let mc_price = mc_equity_value(&params, args.va, &debt, args.paths, args.seed);
    let k = distance_input(&params, args.va, &debt, args.r);
    let closed_pd = default_probability(&params, k, args.t);
    let mc_pd = mc_default_probability(&params, args.va, &debt, args.r, args.paths, args.seed);

    // pathwise martingale check: mean of e^{ωT + X_T}
    let omega = params.martingale_adjustment();
    let increments = simulate_increments(&params, args.t, args.paths, args.seed.wrapping_add(1));
    let growth: Vec<f64> = increments.iter().map(|x| (omega * args.t + x).exp()).collect();
    let n = growth.len() as f64;
    let mean = growth.iter().sum::<f64>() / n;
    let var = growth.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n;
    let mart_se = (var / n).sqrt();

    let z = |closed: f64, est: f64, se: f64| if se > 0.0 { (est - closed) / se } else { 0.0 };
    writeln!(out, "paths={} seed={}", args.paths, args.seed)?;
    writeln!(out, "quantity,closed_form,monte_carlo,std_error,z_score")?;
    writeln!(
        out,
        "equity,{:.6},{:.6},{:.6},{:.3}",
        closed_price,
        mc_price.estimate,
        mc_price.std_error,
        z(closed_price, mc_price.estimate, mc_price.std_error)
    )?;
    writeln!(
        out,
        "default_probability,{:.8},{:.8},{:.8},{:.3}",
        closed_pd,
        mc_pd.estimate,
        mc_pd.std_error,
        z(closed_pd, mc_pd.estimate, mc_pd.std_error)
    )?;
    writeln!(out, "martingale_mean,1.0,{mean:.8},{mart_se:.8},{:.3}", z(1.0, mean, mart_se))?;
    Ok(())
}

fn cmd_sweep<O: Write>(args: SweepMaturityArgs, out: &mut O) -> crate::Result<()> {
    let cfg = IssuerConfig::from_toml_file(&args.config)?;
    let maturities = if args.maturities.is_empty() { cfg.maturities.clone() } else { args.maturities.clone() };
    let ctrl = SeriesControl { n_max: args.nmax, ..Default::default() };
    let mut body = String::from("ticker,model,maturity,params,iterations,converged,actual_drift\n");
    for model in &cfg.models {
        for &t in &maturities {
            let debt = DebtSpec::new(cfg.debt_face_value, t, cfg.risk_free_rate)?;
            let series = load_equity_series(&cfg.equity_csv, cfg.window, debt)?;
            let (result, converged) =
                match calibrate(*model, &series, &CalibrationSettings::default(), &ctrl) {
                    Ok(r) => (r, true),
                    Err(Error::NotConverged(r)) => (*r, false),
                    Err(e) => return Err(e),
                };
            body.push_str(&format!(
                "{},{},{:.4},{},{},{},{}\n",
                cfg.ticker,
                model,
                t,
                join_params(&result.params.as_vec()),
                result.iterations,
                converged,
                result.actual_drift.map(|d| format!("{d:.8}")).unwrap_or_default(),
            ));
        }
    }
    write_or_stdout(out, &args.out, &body)
}
