//! Command-line front end. Exit codes: 0 success, 1 configuration or I/O
//! error, 2 solver did not converge.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{fit_tail, green_table, hardy_constant, solve_decay_exponent, TailFit};
use crate::error::{Error, Result};
use crate::grid::{integrate, radial_profile, Field, Grid2D};
use crate::model::{
    rescale_physical, s_plus, ChargeMeasure, ModelParams, PhysicalSetup, Potential,
};
use crate::operators::SpectralPlan;
use crate::solver::{continuation_sweep, minimize, InitialGuess, SolveConfig, SolveReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tfdw", version, about = "Screening of a point charge in a 2D Dirac layer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the energy and write report.json, profile.csv and field dumps.
    Solve(SolveArgs),
    /// Solve along a parameter path with warm starts and write sweep.csv.
    Sweep(SweepArgs),
    /// Tail fit, decay-exponent prediction and optional Green's function table.
    Analyze(AnalyzeArgs),
    /// Print the Hardy threshold a_c.
    Hardy,
    /// Tabulate the Green's function of a(-Δ)^{1/2} + c as `r,G`.
    Green(GreenArgs),
}

/// Flags that override fields of the JSON configuration.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Box side length.
    #[arg(long = "L")]
    pub box_length: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub rho_bar: Option<f64>,
    /// `v0` or a path to a JSON charge list.
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub residual_tol: Option<f64>,
    #[arg(long)]
    pub energy_stall_tol: Option<f64>,
    #[arg(long)]
    pub coarse_levels: Option<usize>,
    /// `default`, `zero`, `scaled:<c>` or a path to a field dump.
    #[arg(long)]
    pub init: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write fields as `x,y,value` CSV.
    #[arg(long)]
    pub field_csv: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    A,
    B,
    RhoBar,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated parameter values, solved in order.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub values: Vec<f64>,
    /// Worker threads; values are split into this many contiguous warm-started chains.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// report.json written by `solve`.
    pub report: PathBuf,
    #[arg(long)]
    pub tail_min: Option<f64>,
    #[arg(long)]
    pub tail_max: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Green's function parameters, e.g. `a=1,c=1`.
    #[arg(long)]
    pub green: Option<String>,
    /// Print a_c.
    #[arg(long)]
    pub hardy: bool,
    /// Output directory; defaults to the report's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub r_min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub r_max: f64,
    #[arg(long, default_value_t = 121)]
    pub count: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub box_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub rho_bar: f64,
}

/// Solver settings as written in the configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub step_size: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub sigma: f64,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub energy_stall_tol: f64,
    pub stall_window: usize,
    /// `None` picks enough levels to start from a 128² grid.
    pub coarse_levels: Option<usize>,
    /// Same syntax as `--init`.
    pub init: String,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolveConfig::default();
        Self {
            step_size: d.step_size,
            max_step: d.max_step,
            min_step: d.min_step,
            sigma: d.sigma,
            max_iters: d.max_iters,
            residual_tol: d.residual_tol,
            energy_stall_tol: d.energy_stall_tol,
            stall_window: d.stall_window,
            coarse_levels: None,
            init: "default".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub field_csv: bool,
    /// Radial bins for profile.csv; `None` uses `n/4`.
    pub profile_bins: Option<usize>,
    /// Tail-fit window; `None` uses `(L/20, L/4)`.
    pub tail_window: Option<(f64, f64)>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("."),
            field_csv: false,
            profile_bins: None,
            tail_window: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_grid")]
    pub grid: GridConfig,
    /// Dimensionless parameters; ignored when `physical` is present.
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub physical: Option<PhysicalSetup>,
    #[serde(default = "default_potential")]
    pub potential: String,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub outputs: OutputConfig,
}

fn default_grid() -> GridConfig {
    GridConfig {
        n: 512,
        box_length: 400.0,
    }
}

fn default_potential() -> String {
    "v0".into()
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
            model: None,
            physical: None,
            potential: default_potential(),
            solver: SolverSection::default(),
            outputs: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(o: &Overrides) -> Result<Self> {
        let mut cfg = match &o.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?
            }
            None => RunConfig::default(),
        };
        cfg.apply(o);
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(n) = o.n {
            self.grid.n = n;
        }
        if let Some(l) = o.box_length {
            self.grid.box_length = l;
        }
        if o.a.is_some() || o.b.is_some() || o.rho_bar.is_some() {
            let m = self.model.get_or_insert(ModelConfig {
                a: f64::NAN,
                b: f64::NAN,
                rho_bar: 0.0,
            });
            if let Some(a) = o.a {
                m.a = a;
            }
            if let Some(b) = o.b {
                m.b = b;
            }
            if let Some(r) = o.rho_bar {
                m.rho_bar = r;
            }
            self.physical = None;
        }
        if let Some(p) = &o.potential {
            self.potential = p.clone();
        }
        let s = &mut self.solver;
        if let Some(v) = o.tau {
            s.step_size = v;
            s.max_step = s.max_step.max(v);
        }
        if let Some(v) = o.sigma {
            s.sigma = v;
        }
        if let Some(v) = o.max_iters {
            s.max_iters = v;
        }
        if let Some(v) = o.residual_tol {
            s.residual_tol = v;
        }
        if let Some(v) = o.energy_stall_tol {
            s.energy_stall_tol = v;
        }
        if let Some(v) = o.coarse_levels {
            s.coarse_levels = Some(v);
        }
        if let Some(v) = &o.init {
            s.init = v.clone();
        }
        if let Some(d) = &o.out {
            self.outputs.dir = d.clone();
        }
        if o.field_csv {
            self.outputs.field_csv = true;
        }
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.grid.n, self.grid.box_length)
    }

    /// Mapped parameters and the density sign.
    pub fn params(&self) -> Result<(ModelParams, f64)> {
        if let Some(p) = &self.physical {
            let r = rescale_physical(p)?;
            return Ok((r.params, r.sign));
        }
        let m = self
            .model
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("model parameters a and b are required".into()))?;
        ModelParams::from_signed(m.a, m.b, m.rho_bar)
    }

    pub fn potential(&self) -> Result<Potential> {
        if self.potential == "v0" {
            return Ok(Potential::V0);
        }
        Ok(Potential::Charges(ChargeMeasure::from_json_file(Path::new(&self.potential))?))
    }

    pub fn solve_config(&self, grid: &Grid2D) -> Result<SolveConfig> {
        let s = &self.solver;
        let cfg = SolveConfig {
            step_size: s.step_size,
            max_step: s.max_step,
            min_step: s.min_step,
            sigma: s.sigma,
            max_iters: s.max_iters,
            residual_tol: s.residual_tol,
            energy_stall_tol: s.energy_stall_tol,
            stall_window: s.stall_window,
            coarse_levels: s.coarse_levels.unwrap_or_else(|| auto_levels(grid.n())),
            init: parse_init(&s.init, grid)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn tail_window(&self) -> (f64, f64) {
        let l = self.grid.box_length;
        self.outputs.tail_window.unwrap_or((l / 20.0, l / 4.0))
    }

    pub fn profile_bins(&self) -> usize {
        self.outputs.profile_bins.unwrap_or((self.grid.n / 4).max(32))
    }
}

fn auto_levels(n: usize) -> usize {
    let mut levels = 0;
    while n >> (levels + 1) >= 128 {
        levels += 1;
    }
    levels
}

fn parse_init(spec: &str, grid: &Grid2D) -> Result<InitialGuess> {
    Ok(match spec {
        "default" => InitialGuess::Default,
        "zero" => InitialGuess::Zero,
        s if s.starts_with("scaled:") => {
            let c = s["scaled:".len()..]
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad initial scale in {s:?}")))?;
            InitialGuess::ScaledNegV(c)
        }
        path => {
            let f = Field::read_binary(Path::new(path))?;
            grid.ensure_same(f.grid())?;
            InitialGuess::Provided(f)
        }
    })
}

/// Compact JSON with every float printed to 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

pub fn to_json_string(v: &impl Serialize) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    v.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    fs::write(path, to_json_string(v)?).map_err(|e| Error::io(path, e))
}

/// `∫ S₊(u)`, the charge stored in reports and recomputed by `analyze`.
pub fn charge_of(u: &Field, ubar: f64) -> f64 {
    integrate(&u.map(|x| s_plus(x, ubar)))
}

fn tail_fit_of(rho: &Field, bins: usize, window: (f64, f64)) -> Result<TailFit> {
    fit_tail(&radial_profile(rho, bins)?, window)
}

fn report_json(cfg: &RunConfig, params: &ModelParams, sign: f64, r: &SolveReport, fit: Option<&TailFit>) -> Value {
    json!({
        "grid": cfg.grid,
        "params": params,
        "density_sign": sign,
        "potential": cfg.potential,
        "solver": cfg.solver,
        "energy": r.breakdown,
        "residual_l2": r.residual_l2,
        "iterations": r.iterations,
        "l1_charge": r.l1_charge,
        "converged": r.converged,
        "stop_reason": r.stop_reason,
        "tail_fit": fit,
        "files": {"u": "u.bin", "rho": "rho.bin", "profile": "profile.csv", "energy_history": "energy.csv"},
    })
}

pub fn cmd_solve(o: &Overrides) -> Result<i32> {
    let cfg = RunConfig::load(o)?;
    let grid = cfg.grid()?;
    let (params, sign) = cfg.params()?;
    let potential = cfg.potential()?;
    let solve_cfg = cfg.solve_config(&grid)?;
    let v = potential.sample(grid)?.scaled(sign);
    let plan = SpectralPlan::new(grid);
    let report = minimize(&params, &v, &plan, &solve_cfg)?;

    let dir = &cfg.outputs.dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rho = report.rho.scaled(sign);
    report.u.write_binary(&dir.join("u.bin"))?;
    rho.write_binary(&dir.join("rho.bin"))?;
    if cfg.outputs.field_csv {
        report.u.write_csv(&dir.join("u.csv"))?;
        rho.write_csv(&dir.join("rho.csv"))?;
    }
    let profile = radial_profile(&report.rho, cfg.profile_bins())?;
    profile.write_csv(&dir.join("profile.csv"), "rho_mean")?;
    let history: String = std::iter::once("iteration,energy\n".to_string())
        .chain(
            report
                .energy_history
                .iter()
                .enumerate()
                .map(|(k, e)| format!("{k},{e:.16e}\n")),
        )
        .collect();
    let hist_path = dir.join("energy.csv");
    fs::write(&hist_path, history).map_err(|e| Error::io(&hist_path, e))?;
    let fit = fit_tail(&profile, cfg.tail_window()).ok();
    write_json(&dir.join("report.json"), &report_json(&cfg, &params, sign, &report, fit.as_ref()))?;

    println!(
        "l1_charge {:.6e}  energy {:.6e}  residual {:.3e}  iterations {}  {:?}",
        report.l1_charge, report.breakdown.total, report.residual_l2, report.iterations, report.stop_reason
    );
    Ok(if report.converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

struct SweepRow {
    value: f64,
    l1_charge: f64,
    energy: f64,
    tail_exponent: f64,
    converged: bool,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    if args.values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one value".into()));
    }
    if args.jobs == 0 {
        return Err(Error::InvalidConfig("--jobs must be >= 1".into()));
    }
    let cfg = RunConfig::load(&args.overrides)?;
    let grid = cfg.grid()?;
    let (base, base_sign) = cfg.params()?;
    let base_signed_rho = base_sign * base.rho_bar;
    let potential = cfg.potential()?;
    let solve_cfg = cfg.solve_config(&grid)?;

    let mut params_list = Vec::with_capacity(args.values.len());
    let mut sign = base_sign;
    for (k, &value) in args.values.iter().enumerate() {
        let (a, b, rho) = match args.axis {
            Axis::A => (value, base.b, base_signed_rho),
            Axis::B => (base.a, value, base_signed_rho),
            Axis::RhoBar => (base.a, base.b, value),
        };
        let (p, s) = ModelParams::from_signed(a, b, rho)?;
        if k > 0 && s != sign {
            return Err(Error::InvalidConfig(
                "rho_bar values in one sweep must share a sign".into(),
            ));
        }
        sign = s;
        params_list.push(p);
    }
    let v = potential.sample(grid)?.scaled(sign);

    let chunk = args.values.len().div_ceil(args.jobs);
    let chains: Vec<Result<Vec<Result<SolveReport>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = params_list
            .chunks(chunk)
            .map(|ps| {
                let v = &v;
                let solve_cfg = &solve_cfg;
                scope.spawn(move || {
                    let plan = SpectralPlan::new(grid);
                    continuation_sweep(ps, v, &plan, solve_cfg)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });

    let window = cfg.tail_window();
    let bins = cfg.profile_bins();
    let mut rows = Vec::with_capacity(args.values.len());
    let results = chains.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten();
    for (value, res) in args.values.iter().zip(results) {
        match res {
            Ok(r) => rows.push(SweepRow {
                value: *value,
                l1_charge: r.l1_charge,
                energy: r.breakdown.total,
                tail_exponent: tail_fit_of(&r.rho, bins, window).map_or(f64::NAN, |f| f.exponent),
                converged: r.converged,
            }),
            Err(e) => {
                eprintln!("value {value}: {e}");
                rows.push(SweepRow {
                    value: *value,
                    l1_charge: f64::NAN,
                    energy: f64::NAN,
                    tail_exponent: f64::NAN,
                    converged: false,
                });
            }
        }
    }

    let dir = &cfg.outputs.dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| Error::format(&path, e.to_string()))?;
    let csv_err = |e: csv::Error| Error::format(&path, e.to_string());
    w.write_record(["value", "l1_charge", "energy", "tail_exponent", "converged"])
        .map_err(csv_err)?;
    for r in &rows {
        w.write_record(&[
            format!("{:.16e}", r.value),
            format!("{:.16e}", r.l1_charge),
            format!("{:.16e}", r.energy),
            format!("{:.16e}", r.tail_exponent),
            r.converged.to_string(),
        ])
        .map_err(csv_err)?;
        println!(
            "{:>10}  l1_charge {:.6e}  energy {:.6e}  converged {}",
            r.value, r.l1_charge, r.energy, r.converged
        );
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(if rows.iter().any(|r| r.converged) {
        EXIT_OK
    } else {
        EXIT_NO_CONVERGENCE
    })
}

fn parse_green(spec: &str) -> Result<(f64, f64)> {
    let (mut a, mut c) = (None, None);
    for part in spec.split(',') {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("expected key=value in {spec:?}")))?;
        let val: f64 = val
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad number in {spec:?}")))?;
        match key.trim() {
            "a" => a = Some(val),
            "c" => c = Some(val),
            k => return Err(Error::InvalidConfig(format!("unknown green parameter {k:?}"))),
        }
    }
    match (a, c) {
        (Some(a), Some(c)) => Ok((a, c)),
        _ => Err(Error::InvalidConfig(format!("green needs both a and c, got {spec:?}"))),
    }
}

fn write_green_csv(path: &Path, table: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let csv_err = |e: csv::Error| Error::format(path, e.to_string());
    w.write_record(["r", "G"]).map_err(csv_err)?;
    for (r, g) in table {
        w.write_record(&[format!("{r:.16e}"), format!("{g:.16e}")])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Deserialize)]
struct StoredReport {
    grid: GridConfig,
    params: ModelParams,
    l1_charge: f64,
    files: StoredFiles,
}

#[derive(Debug, Deserialize)]
struct StoredFiles {
    u: String,
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.report).map_err(|e| Error::io(&args.report, e))?;
    let stored: StoredReport =
        serde_json::from_str(&text).map_err(|e| Error::format(&args.report, e.to_string()))?;
    let base = args.report.parent().unwrap_or(Path::new("."));
    let u = Field::read_binary(&base.join(&stored.files.u))?;
    let p = stored.params;
    p.validate()?;
    let ub = p.ubar();
    let l1 = charge_of(&u, ub);
    let rho = u.map(|x| (x + ub) * (x + ub));

    let l = stored.grid.box_length;
    let window = (args.tail_min.unwrap_or(l / 20.0), args.tail_max.unwrap_or(l / 4.0));
    let bins = args.bins.unwrap_or((stored.grid.n / 4).max(32));
    let fit = tail_fit_of(&rho, bins, window);
    let prediction = solve_decay_exponent(p.a, p.b, l1);
    let difference = match (&fit, &prediction) {
        (Ok(f), Ok(d)) => Some(f.exponent - d.rho_exponent),
        _ => None,
    };

    let out = args.out.clone().unwrap_or_else(|| base.to_path_buf());
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let mut green = Value::Null;
    if let Some(spec) = &args.green {
        let (a, c) = parse_green(spec)?;
        let scale = a / c;
        let table = green_table(a, c, 1e-3 * scale, 1e3 * scale, 121)?;
        let path = out.join("green.csv");
        write_green_csv(&path, &table)?;
        green = json!({"a": a, "c": c, "file": "green.csv"});
    }
    let ac = hardy_constant();
    if args.hardy {
        println!("{ac:.10}");
    }
    let doc = json!({
        "l1_charge": l1,
        "l1_charge_reported": stored.l1_charge,
        "l1_roundtrip_exact": l1.to_bits() == stored.l1_charge.to_bits(),
        "tail_fit": fit.as_ref().ok(),
        "tail_fit_error": fit.as_ref().err().map(|e| e.to_string()),
        "predicted": prediction.as_ref().ok(),
        "prediction_error": prediction.as_ref().err().map(|e| e.to_string()),
        "fitted_minus_predicted": difference,
        "hardy_constant": ac,
        "green": green,
    });
    write_json(&out.join("analysis.json"), &doc)?;
    if let Ok(f) = &fit {
        println!("fitted exponent {:.4} (prefactor {:.4})", f.exponent, f.prefactor);
    }
    match &prediction {
        Ok(d) => println!("predicted exponent {:.4}", d.rho_exponent),
        Err(e) => println!("no prediction: {e}"),
    }
    Ok(EXIT_OK)
}

pub fn cmd_green(args: &GreenArgs) -> Result<i32> {
    let table = green_table(args.a, args.c, args.r_min, args.r_max, args.count)?;
    match &args.out {
        Some(path) => write_green_csv(path, &table)?,
        None => {
            println!("r,G");
            for (r, g) in table {
                println!("{r:.16e},{g:.16e}");
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let res = match &cli.command {
        Command::Solve(a) => cmd_solve(&a.overrides),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Hardy => {
            println!("{:.10}", hardy_constant());
            Ok(EXIT_OK)
        }
        Command::Green(a) => cmd_green(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
