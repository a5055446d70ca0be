use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use rug::Rational;
use serde_json::{json, Value};

use borel_qmt::asymptotics::{detect_gevrey_order, fit_growth_with, RICHARDSON_DEPTH};
use borel_qmt::config::{parse_beta_grid, Grid, OutputFormat, RunConfig};
use borel_qmt::error::{Error, Result};
use borel_qmt::figures::{generate, num, Dataset, FigureId, SCHEMA};
use borel_qmt::golden::CoefficientTable;
use borel_qmt::model::{Model, ModelSeries, Quantity};
use borel_qmt::oracle::{qmt_finite_difference, reference_values, SpectralProblem};
use borel_qmt::pade::{auto_pade_with, find_poles, pade_approx_with, PadeApproximant, PadeMode, PadeOptions};
use borel_qmt::pipeline::{beta_star, default_spec, oracle_all, oracle_value, Resummation};
use borel_qmt::resum::{BorelPade, BorelSpec, Prescription, ResumOptions};
use borel_qmt::series::PowerSeries;

mod verify;

#[derive(Parser, Debug)]
#[command(name = "borel-qmt", version, about = "Perturbation series, Borel-Pade resummation and diagonalization oracles for anharmonic oscillators")]
struct Cli {
    /// TOML run configuration; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact-rational perturbative coefficients.
    Coeffs(CoeffsArgs),
    /// Padé approximant of a series: coefficients or pole scatter.
    Pade(PadeArgs),
    /// Borel-Padé resummation at one coupling, or `resum sweep` over k or λ.
    Resum(ResumArgs),
    /// Large-order growth-law fit.
    Fit(FitArgs),
    /// Exact diagonalization: energy and optionally the quantum metric.
    Diag(DiagArgs),
    /// Regenerate the dataset behind a figure.
    Figure(FigureArgs),
    /// Golden tables and property checks with a pass/fail report.
    Verify(VerifyArgs),
    /// Diagonalization values over a (k, λ) grid.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct ModelArgs {
    /// quartic, sextic, ddim (with --dim) or ddim<d>; `-n<N>` suffix selects a state.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    state: Option<u32>,
    #[arg(long)]
    dim: Option<u32>,
}

impl ModelArgs {
    fn resolve(&self, base: Model) -> Result<Model> {
        let mut model = match self.model.as_deref() {
            Some("ddim") | Some("radial") => Model::radial(self.dim.unwrap_or(3))?,
            Some(name) => name.parse()?,
            None => match self.dim {
                Some(d) => Model::radial(d)?,
                None => base,
            },
        };
        if let (Some(d), Some(_)) = (self.dim, self.model.as_deref()) {
            if matches!(model.family, borel_qmt::model::Family::Radial(_)) {
                model = Model::radial(d)?.with_state(model.state);
            }
        }
        if let Some(n) = self.state {
            model = model.with_state(n);
        }
        Ok(model)
    }
}

#[derive(Args, Debug, Clone, Default)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum What {
    Energy,
    Qmt,
    All,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Highest order n.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum, default_value = "all")]
    what: What,
    /// Write the tabulated reference tables (sextic, ddim3..6) into this directory.
    #[arg(long, conflicts_with = "out")]
    tables: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Report {
    Poles,
    Coeffs,
}

#[derive(Args, Debug)]
struct PadeArgs {
    /// Series JSON as written by `coeffs --format json --what energy` or the library.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Observable when the series comes from --model.
    #[arg(long, default_value = "E")]
    quantity: String,
    /// Truncation order m (defaults to the full series).
    #[arg(long)]
    order: Option<usize>,
    /// Explicit orders `P/Q`; default is the near-diagonal choice for m.
    #[arg(long)]
    pq: Option<String>,
    /// Continue the Borel transform instead of the series itself.
    #[arg(long)]
    borel: bool,
    #[arg(long, default_value = "1")]
    alpha: String,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Exact rational arithmetic (only without --borel).
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value = "poles")]
    report: Report,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct ResumArgs {
    #[command(subcommand)]
    sweep: Option<ResumCommand>,
    #[command(flatten)]
    point: ResumPoint,
}

#[derive(Subcommand, Debug)]
enum ResumCommand {
    /// Resummed values in physical units over a k or λ range, with the exact curve.
    Sweep(ResumSweep),
}

#[derive(Args, Debug, Clone)]
struct ResumCommon {
    /// Series JSON; otherwise the series of --model / --quantity.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "E")]
    quantity: String,
    /// Gevrey order of the Borel-Leroy transform (`auto` follows the model).
    #[arg(long, default_value = "auto")]
    alpha: String,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    prescription: Option<String>,
    /// Truncation order m.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args, Debug)]
struct ResumPoint {
    #[command(flatten)]
    common: ResumCommon,
    /// Coupling z of the bare series.
    #[arg(long)]
    at: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Param {
    K,
    Lambda,
}

#[derive(Args, Debug)]
struct ResumSweep {
    #[command(flatten)]
    common: ResumCommon,
    #[arg(long, value_enum, default_value = "k")]
    param: Param,
    /// `lo:hi:step` or a comma list for the swept parameter.
    #[arg(long)]
    range: Option<Grid>,
    /// Value of the fixed parameter.
    #[arg(long)]
    fixed: Option<f64>,
    /// Skip the diagonalization column.
    #[arg(long)]
    no_exact: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "E")]
    quantity: String,
    #[arg(long)]
    order: Option<usize>,
    /// `auto`, `1` or `2`.
    #[arg(long, default_value = "auto")]
    alpha: String,
    #[arg(long, default_value_t = RICHARDSON_DEPTH)]
    depth: usize,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DiagArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    basis: Option<usize>,
    /// Also compute the quantum metric.
    #[arg(long)]
    qmt: bool,
    /// Finite-difference step for an independent metric estimate.
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// fig2a, fig2b, fig3, fig4, fig5, fig5x, fig6 or fig7.
    id: String,
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated truncation orders.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<usize>>,
    #[arg(long)]
    k: Option<Grid>,
    #[arg(long)]
    lambda: Option<Grid>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    k_ref: Option<f64>,
    #[arg(long)]
    beta_grid: Option<String>,
    #[arg(long)]
    basis: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
    /// Write `<id>.<format>` into this directory.
    #[arg(long, conflicts_with = "out")]
    dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run only checks whose name starts with one of these (e.g. `sextic`, `ddim4`, `quartic`, `properties`).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Directory with replacement `sextic.csv` / `ddim<d>.csv` tables.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    k: Option<Grid>,
    #[arg(long)]
    lambda: Option<Grid>,
    #[arg(long)]
    basis: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::Precondition(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let base = match &cli.config {
        Some(path) => RunConfig::default().load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Coeffs(a) => coeffs(a, &base),
        Command::Pade(a) => pade(a, &base),
        Command::Resum(a) => match a.sweep {
            Some(ResumCommand::Sweep(s)) => resum_sweep(s, &base),
            None => resum_point(a.point, &base),
        },
        Command::Fit(a) => fit(a, &base),
        Command::Diag(a) => diag(a, &base),
        Command::Figure(a) => figure(a, &base),
        Command::Verify(a) => verify::run(&a.only, a.fixtures.as_deref()),
        Command::Sweep(a) => sweep(a, &base),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text)?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn format_of(o: &OutputArgs, base: &RunConfig) -> OutputFormat {
    o.format.map(Into::into).unwrap_or(base.format)
}

fn load_series(path: &Path) -> Result<PowerSeries> {
    PowerSeries::from_json_str(&fs::read_to_string(path)?)
}

/// Series from `--in` or from the model's own expansion.
fn series_source(input: Option<&Path>, model: Model, quantity: &str, order: Option<usize>, base: &RunConfig) -> Result<PowerSeries> {
    match input {
        Some(p) => load_series(p),
        None => {
            let q: Quantity = quantity.parse()?;
            let m = order.unwrap_or(base.max_order());
            Ok(model.series(m)?.get(q).clone())
        }
    }
}

fn parse_alpha(text: &str) -> Result<Rational> {
    let r: Rational = text
        .parse()
        .map_err(|_| Error::Parse(format!("α must be a positive rational, got {text:?}")))?;
    if r <= 0 {
        return Err(Error::Parse(format!("α must be positive, got {text}")));
    }
    Ok(r)
}

fn coeffs(a: CoeffsArgs, base: &RunConfig) -> Result<bool> {
    if let Some(dir) = a.tables {
        let n = a.order.unwrap_or(10);
        fs::create_dir_all(&dir)?;
        for model in borel_qmt::golden::TableModel::all() {
            let table = CoefficientTable::compute(model, n)?;
            fs::write(dir.join(format!("{}.csv", model.file_stem())), table.to_csv())?;
        }
        return Ok(true);
    }
    let model = a.model.resolve(base.model)?;
    let m = a.order.unwrap_or(10);
    if m == 0 {
        return Err(Error::Precondition("--order must be at least 1".into()));
    }
    let series = model.series(m)?;
    let quantities: Vec<Quantity> = match a.what {
        What::Energy => vec![Quantity::Energy],
        What::Qmt => Quantity::METRIC.to_vec(),
        What::All => Quantity::ALL.to_vec(),
    };
    let text = match format_of(&a.output, base) {
        OutputFormat::Csv => coeff_csv(&series, &quantities, m),
        OutputFormat::Json => {
            if quantities.len() == 1 {
                // A single series keeps the library's series schema so it can be fed back via --in.
                let mut s = series.get(quantities[0]).to_json_string();
                s.push('\n');
                s
            } else {
                let entries: serde_json::Map<String, Value> = quantities
                    .iter()
                    .map(|q| (q.name().to_string(), serde_json::to_value(series.get(*q).to_json()).expect("series JSON")))
                    .collect();
                pretty(&json!({"schema": SCHEMA, "model": model.to_string(), "order": m, "series": entries}))
            }
        }
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(true)
}

fn coeff_csv(series: &ModelSeries, quantities: &[Quantity], m: usize) -> String {
    let column = |q: &Quantity| match q {
        Quantity::Energy => "a",
        Quantity::G11 => "c11",
        Quantity::G12 => "c12",
        Quantity::G22 => "c22",
    };
    let mut out = String::from("n");
    for q in quantities {
        out.push(',');
        out.push_str(column(q));
    }
    out.push('\n');
    for n in 0..=m {
        out.push_str(&n.to_string());
        for q in quantities {
            out.push(',');
            out.push_str(&series.get(*q).coeff(n).to_text());
        }
        out.push('\n');
    }
    out
}

fn pade(a: PadeArgs, base: &RunConfig) -> Result<bool> {
    let model = a.model.resolve(base.model)?;
    let series = series_source(a.input.as_deref(), model, &a.quantity, a.order, base)?;
    let m = a.order.unwrap_or(series.order()).min(series.order());
    let approx: PadeApproximant = if a.borel {
        if a.exact {
            return Err(Error::Precondition("--exact cannot be combined with --borel".into()));
        }
        let spec = BorelSpec::new(parse_alpha(&a.alpha)?, a.beta, Prescription::PrincipalValue)?;
        BorelPade::from_series(&series, &spec, m, &ResumOptions::default())?.pade
    } else {
        let s = series.truncate(m).to_coupling();
        let opts = PadeOptions {
            mode: if a.exact { PadeMode::Exact } else { PadeMode::Float },
            prec: 256,
        };
        match &a.pq {
            Some(pq) => {
                let (p, q) = pq
                    .split_once('/')
                    .and_then(|(p, q)| Some((p.trim().parse().ok()?, q.trim().parse().ok()?)))
                    .ok_or_else(|| Error::Parse(format!("--pq must be P/Q, got {pq:?}")))?;
                pade_approx_with(&s, p, q, opts)?
            }
            None => auto_pade_with(&s, opts)?,
        }
    };
    let format = format_of(&a.output, base);
    let text = match (a.report, format) {
        (Report::Poles, OutputFormat::Csv) => find_poles(&approx)?.to_csv(),
        (Report::Poles, OutputFormat::Json) => {
            let report = find_poles(&approx)?;
            let poles: Vec<Value> = report
                .poles
                .iter()
                .map(|p| json!({"re": p.location.real().to_f64(), "im": p.location.imag().to_f64(), "class": p.class.to_string()}))
                .collect();
            pretty(&json!({"schema": SCHEMA, "orders": approx.orders(), "poles": poles}))
        }
        (Report::Coeffs, fmt) => {
            let num_c: Vec<String> = approx.numerator().iter().map(|c| c.to_text()).collect();
            let den_c: Vec<String> = approx.denominator().iter().map(|c| c.to_text()).collect();
            if fmt == OutputFormat::Json {
                pretty(&json!({"schema": SCHEMA, "orders": approx.orders(), "numerator": num_c, "denominator": den_c}))
            } else {
                let mut out = String::from("i,numerator,denominator\n");
                for i in 0..num_c.len().max(den_c.len()) {
                    let cell = |v: &Vec<String>| v.get(i).cloned().unwrap_or_default();
                    out.push_str(&format!("{i},{},{}\n", cell(&num_c), cell(&den_c)));
                }
                out
            }
        }
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(true)
}

struct ResumSetup {
    model: Model,
    series: PowerSeries,
    spec: BorelSpec,
    m: usize,
}

fn resum_setup(c: &ResumCommon, base: &RunConfig, beta_fallback: Option<f64>) -> Result<ResumSetup> {
    let model = c.model.resolve(base.model)?;
    let series = series_source(c.input.as_deref(), model, &c.quantity, c.order, base)?;
    let m = c.order.unwrap_or(series.order());
    let prescription = match &c.prescription {
        Some(p) => p.parse()?,
        None => base.prescription,
    };
    let beta = c.beta.or(base.beta).or(beta_fallback).unwrap_or(1.0);
    let spec = if c.alpha == "auto" {
        default_spec(&model, beta, prescription)?
    } else {
        BorelSpec::new(parse_alpha(&c.alpha)?, beta, prescription)?
    };
    Ok(ResumSetup { model, series, spec, m })
}

fn resum_point(p: ResumPoint, base: &RunConfig) -> Result<bool> {
    let c = p.common;
    let z = p.at.ok_or_else(|| Error::Precondition("resum needs --at z".into()))?;
    let s = resum_setup(&c, base, None)?;
    let opts = ResumOptions::default();
    let borel = BorelPade::from_series(&s.series, &s.spec, s.m, &opts)?;
    let r = borel.sum(z, &opts)?;
    let doc = json!({
        "schema": SCHEMA,
        "z": z,
        "order": s.m,
        "alpha": s.spec.alpha.to_string(),
        "beta": s.spec.beta,
        "prescription": s.spec.prescription.to_string(),
        "value": r.to_f64(),
        "value_text": r.real().to_string_radix(10, Some(40)),
        "imag": r.ambiguity().to_f64(),
        "error_estimate": r.error_estimate.to_f64(),
        "diagnostics": r.diagnostics,
    });
    emit(None, &pretty(&doc))?;
    Ok(true)
}

fn resum_sweep(a: ResumSweep, base: &RunConfig) -> Result<bool> {
    let c = &a.common;
    let model = c.model.resolve(base.model)?;
    let quantity: Quantity = c.quantity.parse()?;
    let grid = match (&a.range, a.param) {
        (Some(g), _) => g.clone(),
        (None, Param::K) => base.k.clone(),
        (None, Param::Lambda) => base.lambda.clone(),
    };
    if grid.is_empty() {
        return Err(Error::Precondition("sweep range is empty".into()));
    }
    let fixed = a.fixed.unwrap_or(match a.param {
        Param::K => base.lambda.values()[0],
        Param::Lambda => base.k.values()[0],
    });
    let points: Vec<(f64, f64)> = grid
        .values()
        .iter()
        .map(|&x| match a.param {
            Param::K => (x, fixed),
            Param::Lambda => (fixed, x),
        })
        .collect();

    // Gevrey-2 models without an explicit β use the β* minimizing the error at the reference point.
    let mut beta_fallback = None;
    if c.beta.is_none() && base.beta.is_none() && c.alpha == "auto" && model.gevrey_alpha() > 1 {
        let series = series_source(c.input.as_deref(), model, &c.quantity, c.order, base)?;
        let m = c.order.unwrap_or(series.order());
        let lambda = points[0].1;
        let exact = oracle_value(model, quantity, base.k_ref, lambda, base.basis)?;
        let ms = ModelSeries {
            energy: series.clone(),
            g11: series.clone(),
            g12: series.clone(),
            g22: series,
        };
        let search = beta_star(model, &ms, quantity, m, base.k_ref, lambda, exact, base.beta_grid, &ResumOptions::default())?;
        beta_fallback = Some(search.beta_star);
    }
    let s = resum_setup(c, base, beta_fallback)?;
    let ms = ModelSeries {
        energy: s.series.clone(),
        g11: s.series.clone(),
        g12: s.series.clone(),
        g22: s.series.clone(),
    };
    let opts = ResumOptions::default();
    let r = Resummation::new(s.model, &ms, quantity, &s.spec, s.m, &opts)?;
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .map(|&(k, l)| {
            let v = r.at(k, l);
            let mut row = vec![num(k), num(l)];
            match v {
                Ok(p) => row.extend([num(p.value), num(p.error_estimate), num(p.ambiguity)]),
                Err(_) => row.extend([num(f64::NAN), num(f64::NAN), num(f64::NAN)]),
            }
            if !a.no_exact {
                row.push(num(oracle_value(s.model, quantity, k, l, base.basis).unwrap_or(f64::NAN)));
            }
            row
        })
        .collect();
    let mut cols = vec!["k", "lambda", "value", "error_estimate", "ambiguity"];
    if !a.no_exact {
        cols.push("exact");
    }
    let mut ds = Dataset::new("resum-sweep", &cols)
        .meta("model", s.model.to_string())
        .meta("quantity", quantity.name())
        .meta("order", s.m.to_string())
        .meta("alpha", s.spec.alpha.to_string())
        .meta("beta", num(s.spec.beta))
        .meta("prescription", s.spec.prescription.to_string());
    ds.rows = rows;
    write_dataset(&ds, format_of(&a.output, base), a.output.out.as_deref())?;
    Ok(true)
}

fn write_dataset(ds: &Dataset, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => ds.to_csv(),
        OutputFormat::Json => pretty(&ds.to_json()),
    };
    emit(out, &text)
}

fn fit(a: FitArgs, base: &RunConfig) -> Result<bool> {
    let model = a.model.resolve(base.model)?;
    let series = series_source(a.input.as_deref(), model, &a.quantity, a.order, base)?;
    let series = match a.order {
        Some(m) if m < series.order() => series.truncate(m),
        _ => series,
    };
    let alpha = match a.alpha.as_str() {
        "auto" => detect_gevrey_order(&series)?,
        "1" => 1,
        "2" => 2,
        other => return Err(Error::Parse(format!("--alpha must be auto, 1 or 2, got {other:?}"))),
    };
    let f = fit_growth_with(&series, alpha, a.depth)?;
    let doc = json!({
        "schema": SCHEMA,
        "order": series.order(),
        "depth": a.depth,
        "alpha_mode": a.alpha,
        "fit": f.summary(),
    });
    emit(a.out.as_deref(), &pretty(&doc))?;
    Ok(true)
}

fn diag(a: DiagArgs, base: &RunConfig) -> Result<bool> {
    let model = a.model.resolve(base.model)?;
    let k = a.k.unwrap_or(base.k.values()[0]);
    let lambda = a.lambda.unwrap_or(base.lambda.values()[0]);
    let problem = match a.basis.or(base.basis) {
        Some(s) => SpectralProblem::new(model, k, lambda, s)?,
        None => SpectralProblem::with_default_basis(model, k, lambda)?,
    };
    let values = reference_values(&problem)?;
    let mut doc = json!({
        "schema": SCHEMA,
        "model": model.to_string(),
        "k": k,
        "lambda": lambda,
        "basis": values.basis_size,
        "energy": values.energy,
        "convergence": values.convergence,
    });
    if a.qmt {
        doc["qmt"] = json!(values.metric);
        if let Some(h) = a.fd_step {
            doc["qmt_finite_difference"] = json!(qmt_finite_difference(&problem, h)?);
        }
    }
    emit(a.out.as_deref(), &pretty(&doc))?;
    Ok(true)
}

fn figure(a: FigureArgs, base: &RunConfig) -> Result<bool> {
    let id: FigureId = a.id.parse()?;
    let mut cfg = id.default_config();
    if a.model.model.is_some() || a.model.dim.is_some() || a.model.state.is_some() {
        cfg.model = a.model.resolve(cfg.model)?;
    }
    if let Some(o) = a.orders {
        cfg.orders = o;
    }
    if let Some(k) = a.k {
        cfg.k = k;
    }
    if let Some(l) = a.lambda {
        cfg.lambda = l;
    }
    if a.beta.is_some() {
        cfg.beta = a.beta;
    } else if base.beta.is_some() {
        cfg.beta = base.beta;
    }
    if let Some(k) = a.k_ref {
        cfg.k_ref = k;
    }
    if let Some(g) = &a.beta_grid {
        cfg.beta_grid = parse_beta_grid(g)?;
    }
    if let Some(b) = a.basis.or(base.basis) {
        cfg.basis = Some(b);
    }
    cfg.validate()?;
    let format = format_of(&a.output, base);
    let ds = generate(id, &cfg)?;
    let out = match (a.dir.or_else(|| base.dir.clone()), a.output.out) {
        (_, Some(o)) => Some(o),
        (Some(dir), None) => Some(dir.join(format!("{}.{}", id.name(), format))),
        (None, None) => None,
    };
    write_dataset(&ds, format, out.as_deref())?;
    Ok(true)
}

fn sweep(a: SweepArgs, base: &RunConfig) -> Result<bool> {
    let model = a.model.resolve(base.model)?;
    let ks = a.k.unwrap_or_else(|| base.k.clone());
    let ls = a.lambda.unwrap_or_else(|| base.lambda.clone());
    if ks.is_empty() || ls.is_empty() {
        return Err(Error::Precondition("parameter grids must be non-empty".into()));
    }
    let basis = a.basis.or(base.basis);
    let points: Vec<(f64, f64)> = ls.values().iter().flat_map(|&l| ks.values().iter().map(move |&k| (k, l))).collect();
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .map(|&(k, l)| {
            let v = oracle_all(model, k, l, basis).unwrap_or([f64::NAN; 4]);
            let mut row = vec![num(k), num(l)];
            row.extend(v.iter().map(|x| num(*x)));
            row
        })
        .collect();
    let mut ds = Dataset::new("oracle-sweep", &["k", "lambda", "E", "g11", "g12", "g22"])
        .meta("description", "exact diagonalization in a harmonic-oscillator basis: energy and quantum metric")
        .meta("model", model.to_string())
        .meta("basis", basis.map(|b| b.to_string()).unwrap_or_else(|| "default".into()));
    ds.rows = rows;
    write_dataset(&ds, format_of(&a.output, base), a.output.out.as_deref())?;
    Ok(true)
}
