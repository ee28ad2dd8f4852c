use std::path::PathBuf;

use clap::{Args, ValueEnum};
use stablecap::mc::{empirical_allocation, empirical_tce, ks_distance, SampleMatrix, Z99};
use stablecap::risk::{allocate, tce_h, tce_quadrature, tce_series, TceEval};
use stablecap::stable::{
    pdf_asymptotic, pdf_cf_quadrature, pdf_contour, pdf_eval, pdf_series_power, pdf_series_small_alpha, pdf_zolotarev, sample,
};
use stablecap::{SpectralMeasure, StableParams};

use crate::config::PortfolioConfig;
use crate::error::CliError;
use crate::output::{Cell, Table};

const SERIES_TERMS: usize = 400;

#[derive(Debug, Clone, Args)]
pub struct StableArgs {
    /// Tail index in (0, 2]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Skewness in [-1, 1]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Scale
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Location
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
}

impl StableArgs {
    pub fn params(&self) -> Result<StableParams, CliError> {
        Ok(StableParams::new(self.alpha, self.beta, self.sigma, self.mu)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PdfMethodArg {
    Auto,
    Contour,
    Series,
    Asymptotic,
    Integral,
    Quadrature,
}

#[derive(Debug, Clone, Args)]
pub struct PdfArgs {
    #[command(flatten)]
    pub stable: StableArgs,
    /// Evaluation points, comma separated or repeated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,
    /// Evenly spaced grid START:STOP:COUNT
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t = PdfMethodArg::Auto)]
    pub method: PdfMethodArg,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("grid must be START:STOP:COUNT, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

pub fn pdf(args: &PdfArgs) -> Result<Table, CliError> {
    let p = args.stable.params()?;
    let mut xs = args.x.clone();
    if let Some(g) = &args.grid {
        xs.extend(parse_grid(g)?);
    }
    if xs.is_empty() {
        return Err(CliError::Input("no evaluation points: give --x or --grid".into()));
    }
    let mut table = Table::new(["x", "pdf", "method", "converged"]);
    for x in xs {
        let (value, method, converged) = match args.method {
            PdfMethodArg::Auto => {
                let e = pdf_eval(&p, x)?;
                (e.value, e.method.name(), e.converged)
            }
            forced => {
                let (e, name) = match forced {
                    PdfMethodArg::Contour => (pdf_contour(&p, x)?, "contour"),
                    PdfMethodArg::Series if p.alpha() > 1.0 => (pdf_series_power(&p, x, SERIES_TERMS)?, "series"),
                    PdfMethodArg::Series => (pdf_series_small_alpha(&p, x, SERIES_TERMS)?, "series"),
                    PdfMethodArg::Asymptotic => (pdf_asymptotic(&p, x, SERIES_TERMS)?, "asymptotic"),
                    PdfMethodArg::Integral => (pdf_zolotarev(&p, x)?, "integral"),
                    _ => (pdf_cf_quadrature(&p, x)?, "quadrature"),
                };
                (e.value, name, e.converged)
            }
        };
        if !value.is_finite() {
            return Err(CliError::Numerical(format!("density at x = {x} is not finite")));
        }
        table.push(vec![Cell::Num(x), Cell::Num(value), Cell::Text(method.into()), Cell::Bool(converged)]);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TceMethodArg {
    H,
    Series,
    Quadrature,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct TceArgs {
    #[command(flatten)]
    pub stable: StableArgs,
    /// Prudence levels, comma separated or repeated
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub q: Vec<f64>,
    #[arg(long, value_enum, default_value_t = TceMethodArg::H)]
    pub method: TceMethodArg,
    /// Monte Carlo sample size
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn tce(args: &TceArgs) -> Result<Table, CliError> {
    let p = args.stable.params()?;
    for &q in &args.q {
        if !(q > 0.0 && q < 1.0) {
            return Err(CliError::Input(format!("q must lie in (0, 1), got {q}")));
        }
    }
    if args.method == TceMethodArg::Mc {
        let mut table = Table::new(["q", "var", "tce", "method", "std_error"]);
        let xs = sample(&p, args.seed, args.trials);
        for &q in &args.q {
            let var = stablecap::risk::var(&p, q)?;
            let e = empirical_tce(&xs, q)?;
            table.push(vec![Cell::Num(q), Cell::Num(var), Cell::Num(e.value), Cell::Text("mc".into()), Cell::Num(e.std_error)]);
        }
        return Ok(table);
    }
    let mut table = Table::new(["q", "var", "tce", "method"]);
    for &q in &args.q {
        let t: TceEval = match args.method {
            TceMethodArg::H => tce_h(&p, q)?,
            TceMethodArg::Series => tce_series(&p, q, SERIES_TERMS)?,
            _ => tce_quadrature(&p, q)?,
        };
        if !t.converged || !t.value.is_finite() {
            return Err(CliError::Numerical(format!(
                "{} evaluation did not converge at q = {q} (estimated error {:e})",
                t.method.name(),
                t.error
            )));
        }
        table.push(vec![Cell::Num(q), Cell::Num(t.var), Cell::Num(t.value), Cell::Text(t.method.name().into())]);
    }
    Ok(table)
}

#[derive(Debug, Clone, Args)]
pub struct AllocateArgs {
    /// Portfolio configuration (JSON)
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    /// Check every allocation against a Monte Carlo estimate with this many trials
    #[arg(long)]
    pub verify_mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn approximation(cfg: &PortfolioConfig) -> Result<(SpectralMeasure, Vec<f64>), CliError> {
    Ok(cfg.model()?.build_stable_approximation()?)
}

fn shifted_draws(m: &SpectralMeasure, means: &[f64], seed: u64, trials: usize) -> Vec<Vec<f64>> {
    let mut rows = m.sample_vector(seed, trials);
    for r in &mut rows {
        for (x, mean) in r.iter_mut().zip(means) {
            *x += mean;
        }
    }
    rows
}

/// The report table, plus a verification failure message if any line fell
/// outside its Monte Carlo interval.
pub fn allocate_cmd(args: &AllocateArgs) -> Result<(Table, Option<String>), CliError> {
    let cfg = PortfolioConfig::load(&args.config)?;
    let names = cfg.names();
    let (m, means) = approximation(&cfg)?;
    let report = allocate(&m, &means, args.q)?;
    let mut headers = vec!["name", "kappa", "expected_value", "allocation", "q", "var", "tce", "additivity_residual"];
    let mc = match args.verify_mc {
        Some(trials) => {
            headers.extend(["mc_allocation", "mc_std_error", "mc_within_ci"]);
            let rows = shifted_draws(&m, &means, args.seed, trials);
            let matrix = SampleMatrix::from_rows(rows, Some(args.seed)).map_err(CliError::from)?;
            Some(empirical_allocation(&matrix, args.q)?)
        }
        None => None,
    };
    let mut table = Table::new(headers);
    let mut failed = Vec::new();
    for line in &report.per_line {
        let mut row = vec![
            Cell::Text(names[line.index].clone()),
            Cell::Num(line.kappa),
            Cell::Num(line.expected_value),
            Cell::Num(line.allocation),
            Cell::Num(report.q),
            Cell::Num(report.var_value),
            Cell::Num(report.tce_value),
            Cell::Num(report.additivity_residual),
        ];
        if let Some(mc) = &mc {
            let e = mc.lines[line.index];
            let ok = e.covers(line.allocation, Z99);
            if !ok {
                failed.push(names[line.index].clone());
            }
            row.extend([Cell::Num(e.value), Cell::Num(e.std_error), Cell::Bool(ok)]);
        }
        table.push(row);
    }
    let failure = (!failed.is_empty()).then(|| format!("allocation outside the 99% Monte Carlo interval for: {}", failed.join(", ")));
    Ok((table, failure))
}

#[derive(Debug, Clone, Args)]
pub struct GcltArgs {
    /// Portfolio configuration (JSON); policies_per_line is replaced by each n
    #[arg(long)]
    pub config: PathBuf,
    /// Ascending policy counts
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub n_list: Vec<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn gclt_check(args: &GcltArgs) -> Result<Table, CliError> {
    let cfg = PortfolioConfig::load(&args.config)?;
    if args.n_list.is_empty() || args.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Input("n-list must be non-empty and strictly ascending".into()));
    }
    if args.trials == 0 {
        return Err(CliError::Input("trials must be at least 1".into()));
    }
    let base = cfg.model()?;
    let alpha = base.alpha();
    let mut table = Table::new(["n", "ks_distance", "tail_ratio", "tail_ratio_limit"]);
    for &n in &args.n_list {
        let model = base.with_policies(n)?;
        let (m, means) = model.build_stable_approximation()?;
        let total_mean: f64 = means.iter().sum();
        let law = m.project(&vec![1.0; m.dim()])?;
        let law = law.with_mu(law.mu() + total_mean)?;
        let sums: Vec<f64> = model.simulate_finite_n(args.seed, args.trials, false).iter().map(|r| r.iter().sum()).collect();
        let ks = ks_distance(&sums, &law);
        table.push(vec![Cell::Int(n), Cell::Num(ks), Cell::Num(tail_ratio(&sums, total_mean)), Cell::Num(2f64.powf(-alpha))]);
    }
    Ok(table)
}

/// P(S - m > 2x)/P(S - m > x) at the empirical 0.99 quantile x of S - m.
fn tail_ratio(sums: &[f64], center: f64) -> f64 {
    let mut c: Vec<f64> = sums.iter().map(|s| s - center).collect();
    let k = ((0.99 * c.len() as f64) as usize).min(c.len() - 1);
    let (_, &mut x, _) = c.select_nth_unstable_by(k, f64::total_cmp);
    if !(x > 0.0) {
        return f64::NAN;
    }
    let above = |t: f64| c.iter().filter(|&&v| v > t).count() as f64;
    let base = above(x);
    if base == 0.0 {
        f64::NAN
    } else {
        above(2.0 * x) / base
    }
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    /// Portfolio configuration (JSON); sample its stable approximation
    #[arg(long, conflicts_with_all = ["alpha", "beta", "sigma", "mu"])]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn sample_cmd(args: &SampleArgs) -> Result<Table, CliError> {
    if args.trials == 0 {
        return Err(CliError::Input("trials must be at least 1".into()));
    }
    let (names, rows) = match (&args.config, args.alpha) {
        (Some(path), _) => {
            let cfg = PortfolioConfig::load(path)?;
            let (m, means) = approximation(&cfg)?;
            (cfg.names(), shifted_draws(&m, &means, args.seed, args.trials))
        }
        (None, Some(alpha)) => {
            let p = StableParams::new(alpha, args.beta.unwrap_or(0.0), args.sigma.unwrap_or(1.0), args.mu.unwrap_or(0.0))?;
            (vec!["x".to_string()], sample(&p, args.seed, args.trials).into_iter().map(|x| vec![x]).collect())
        }
        (None, None) => return Err(CliError::Input("give --config or --alpha".into())),
    };
    let mut table = Table::new(names.into_iter().chain(["sum".to_string()]));
    for r in rows {
        // left-to-right so that re-adding the printed columns reproduces it
        let sum = r.iter().fold(0.0, |acc, x| acc + x);
        table.push(r.into_iter().chain([sum]).map(Cell::Exact).collect());
    }
    Ok(table)
}
