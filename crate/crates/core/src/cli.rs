//! Command-line front end: argument parsing, config merging, command
//! dispatch and JSON/CSV output.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::causal::{classify_covector, classify_vector, covector_forms, legendre_map, vector_forms, QuadraticForms};
use crate::energy::{energy_matrices, swec_check, Mat3, SwecReport};
use crate::error::QeiError;
use crate::fresnel::{fresnel_eval, in_hyperbolicity_cone, BiMetric, FresnelContext};
use crate::negative_energy::{
    field_mismatch, field_strength_at, field_strength_origin, n_particle_energy, packet_norm_sq, rho_origin,
    single_packet_energy, FieldMethod, WavePacketSpec,
};
use crate::observer_norm::{aleph_uc, NormMode, NormalizationResult};
use crate::qei::{qei_bound, qei_bound_pipeline, Normalization, QeiBoundResult, SmearingFunction};
use crate::tensor::{Covec4, Vec4};
use crate::verify::{self, Suite, VerifyReport};

#[derive(Parser, Debug)]
#[command(name = "qei", version, about = "Causal structure, energy conditions and QEI bounds for linear electrodynamics in a uniaxial crystal")]
pub struct Cli {
    /// JSON run configuration; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Crystal parameter ξ ≥ 0
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    /// Worldline rapidity α
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Worldline angle β (radians)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Normalization: sr | uc | <aleph>
    #[arg(long, global = true, value_parser = parse_norm)]
    pub norm: Option<Normalization>,
    /// Smearing function: gaussian:sigma=S | file:PATH
    #[arg(long, global = true, value_parser = parse_smearing)]
    pub g: Option<SmearingSpec>,
    /// Quadrature nodes per axis
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Classify a vector or covector against the two cones
    Classify {
        #[arg(long, value_parser = parse_four, allow_hyphen_values = true, conflicts_with = "covector", required_unless_present = "covector")]
        vector: Option<[f64; 4]>,
        #[arg(long, value_parser = parse_four, allow_hyphen_values = true)]
        covector: Option<[f64; 4]>,
        /// Relative tolerance for the null tests
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Fresnel polynomial, its factorization and the Legendre map at a covector
    Fresnel {
        #[arg(long, value_parser = parse_four, allow_hyphen_values = true)]
        covector: [f64; 4],
    },
    /// Strong weak energy condition along the (α, β) worldline
    Swec,
    /// QEI bound along the (α, β) worldline
    QeiBound {
        /// Also evaluate the Fourier pipeline
        #[arg(long)]
        pipeline: bool,
    },
    /// Intrinsic normalization ℵ_UC
    Normalization {
        #[arg(long, value_enum, default_value = "both")]
        mode: NormArg,
    },
    /// Interluminal wave-packet counterexample
    Counterexample {
        #[arg(long, default_value_t = 1.0)]
        tau0: f64,
        /// Width of the Gaussian time smearing around τ = 0
        #[arg(long, default_value_t = 0.02)]
        sigma: f64,
        /// Largest particle number reported
        #[arg(long, default_value_t = 10)]
        particles: u32,
    },
    /// Run oracle suites; exit 1 on any failed check
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Numeric,
    Series,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SuiteArg {
    All,
    Fresnel,
    Residues,
    AppendixA,
    Swec,
    Qei,
    Counterexample,
    Normalization,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Fresnel => Suite::Fresnel,
            SuiteArg::Residues => Suite::Residues,
            SuiteArg::AppendixA => Suite::AppendixA,
            SuiteArg::Swec => Suite::Swec,
            SuiteArg::Qei => Suite::Qei,
            SuiteArg::Counterexample => Suite::Counterexample,
            SuiteArg::Normalization => Suite::Normalization,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmearingSpec {
    Gaussian { sigma: f64 },
    File { path: PathBuf },
}

impl SmearingSpec {
    pub fn resolve(&self) -> Result<SmearingFunction, CliError> {
        match self {
            SmearingSpec::Gaussian { sigma } => Ok(SmearingFunction::gaussian(*sigma)?),
            SmearingSpec::File { path } => read_sampled(path),
        }
    }
}

/// Effective run parameters after merging defaults, config file and flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub xi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub norm: Normalization,
    pub g: SmearingSpec,
    pub nodes: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            xi: 0.0,
            alpha: 0.0,
            beta: 0.0,
            norm: Normalization::Sr,
            g: SmearingSpec::Gaussian { sigma: 1.0 },
            nodes: crate::negative_energy::DEFAULT_NODES,
            format: OutputFormat::Json,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.xi.is_finite() && self.xi >= 0.0 && self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(CliError::Usage(format!(
                "need finite xi >= 0, alpha and beta; got xi = {}, alpha = {}, beta = {}",
                self.xi, self.alpha, self.beta
            )));
        }
        if self.nodes < 2 {
            return Err(CliError::Usage("--nodes must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Qei(QeiError),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Qei(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl From<QeiError> for CliError {
    fn from(e: QeiError) -> Self {
        CliError::Qei(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Qei(e) => e.exit_code(),
        }
    }
}

fn parse_four(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err("components must be finite".into());
    }
    v.try_into().map_err(|v: Vec<f64>| format!("expected 4 comma-separated components, got {}", v.len()))
}

fn parse_norm(s: &str) -> Result<Normalization, String> {
    match s.to_ascii_lowercase().as_str() {
        "sr" => Ok(Normalization::Sr),
        "uc" => Ok(Normalization::Uc),
        other => match other.parse::<f64>() {
            Ok(a) if a > 0.0 && a.is_finite() => Ok(Normalization::Explicit(a)),
            _ => Err(format!("expected sr, uc or a positive number, got {s:?}")),
        },
    }
}

fn parse_smearing(s: &str) -> Result<SmearingSpec, String> {
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(SmearingSpec::File { path: PathBuf::from(path) });
    }
    if let Some(rest) = s.strip_prefix("gaussian:") {
        if let Some(v) = rest.strip_prefix("sigma=") {
            return match v.parse::<f64>() {
                Ok(sigma) if sigma > 0.0 && sigma.is_finite() => Ok(SmearingSpec::Gaussian { sigma }),
                _ => Err(format!("sigma must be a positive number, got {v:?}")),
            };
        }
    }
    Err(format!("expected gaussian:sigma=S or file:PATH, got {s:?}"))
}

/// Two-column CSV `(tau, g)` on a uniform grid; a non-numeric first row is
/// taken as a header.
pub fn read_sampled(path: &Path) -> Result<SmearingFunction, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let (mut taus, mut gs) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if rec.len() != 2 {
            return Err(CliError::Usage(format!("{}: row {} must have two columns", path.display(), i + 1)));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(t), Ok(g)) => {
                taus.push(t);
                gs.push(g);
            }
            _ if i == 0 => continue,
            _ => return Err(CliError::Usage(format!("{}: row {} is not numeric", path.display(), i + 1))),
        }
    }
    if taus.len() < 2 {
        return Err(CliError::Usage(format!("{}: need at least two samples", path.display())));
    }
    let h = taus[1] - taus[0];
    for w in taus.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1e-300) {
            return Err(CliError::Usage(format!("{}: tau grid is not uniform", path.display())));
        }
    }
    Ok(SmearingFunction::sampled(h, taus[0], gs)?)
}

/// Defaults, then the config file, then explicit flags.
pub fn merge_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = cli.xi {
        cfg.xi = v;
    }
    if let Some(v) = cli.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = cli.beta {
        cfg.beta = v;
    }
    if let Some(v) = cli.norm {
        cfg.norm = v;
    }
    if let Some(v) = &cli.g {
        cfg.g = v.clone();
    }
    if let Some(v) = cli.nodes {
        cfg.nodes = v;
    }
    if let Some(v) = cli.format {
        cfg.format = v;
    }
    if let Some(v) = &cli.out {
        cfg.out = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub command: String,
    pub config: RunConfig,
    pub result: T,
}

/// Fixed CSV layout of a result.
pub trait CsvRows {
    fn header() -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResult {
    pub target: String,
    pub components: [f64; 4],
    pub class: String,
    pub quadratic_forms: QuadraticForms,
    pub tolerance: f64,
}

impl CsvRows for ClassifyResult {
    fn header() -> Vec<&'static str> {
        vec!["target", "c0", "c1", "c2", "c3", "class", "eta", "zeta", "tolerance"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        let mut r = vec![self.target.clone()];
        r.extend(self.components.iter().map(|x| num(*x)));
        r.extend([self.class.clone(), num(self.quadratic_forms.eta), num(self.quadratic_forms.zeta), num(self.tolerance)]);
        vec![r]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FresnelResult {
    pub covector: [f64; 4],
    pub g: f64,
    pub eta_inv_kk: f64,
    pub zeta_inv_kk: f64,
    pub factorization_residual: f64,
    pub in_hyperbolicity_cone: bool,
    /// Legendre image `(1/4𝒢)∂𝒢`, absent on the Fresnel null set.
    pub legendre: Option<[f64; 4]>,
}

impl CsvRows for FresnelResult {
    fn header() -> Vec<&'static str> {
        vec!["k0", "k1", "k2", "k3", "G", "eta_inv_kk", "zeta_inv_kk", "factorization_residual", "in_cone"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        let mut r: Vec<String> = self.covector.iter().map(|x| num(*x)).collect();
        r.extend([
            num(self.g),
            num(self.eta_inv_kk),
            num(self.zeta_inv_kk),
            num(self.factorization_residual),
            self.in_hyperbolicity_cone.to_string(),
        ]);
        vec![r]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwecResult {
    pub verdict: SwecReport,
    pub x1: Mat3,
    pub x2: Mat3,
    pub residual: f64,
}

impl CsvRows for SwecResult {
    fn header() -> Vec<&'static str> {
        vec!["holds", "boundary", "min_eig_x1", "min_eig_x2", "closed_form", "tolerance"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        let v = &self.verdict;
        vec![vec![
            v.holds.to_string(),
            v.boundary.to_string(),
            num(v.eigenvalues_x1[0]),
            num(v.eigenvalues_x2[0]),
            v.closed_form.to_string(),
            num(v.tolerance),
        ]]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QeiCommandResult {
    pub bound: QeiBoundResult,
    pub pipeline: Option<f64>,
}

impl CsvRows for QeiCommandResult {
    fn header() -> Vec<&'static str> {
        let mut h = QeiBoundResult::CSV_HEADER.to_vec();
        h.push("pipeline_bound");
        h
    }
    fn rows(&self) -> Vec<Vec<String>> {
        let mut r: Vec<String> = self.bound.csv_row().iter().map(|x| num(*x)).collect();
        r.push(self.pipeline.map(num).unwrap_or_default());
        vec![r]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationCommandResult {
    pub numeric: Option<NormalizationResult>,
    pub series: Option<NormalizationResult>,
}

impl CsvRows for NormalizationCommandResult {
    fn header() -> Vec<&'static str> {
        vec!["mode", "aleph", "residual"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        [("numeric", &self.numeric), ("series", &self.series)]
            .into_iter()
            .filter_map(|(m, r)| {
                r.as_ref()
                    .map(|r| vec![m.to_string(), num(r.aleph), r.residual.map(num).unwrap_or_default()])
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleResult {
    pub spec: WavePacketSpec,
    /// Real parts of `F(0)` in the order (01, 02, 03, 23, 31, 12).
    pub f_closed_form: [f64; 6],
    pub f_quadrature: [f64; 6],
    pub f_mismatch: f64,
    pub rho0: f64,
    /// `4(1 − ξ²sinh²α sin²β)τ₀⁻⁴`
    pub rho0_printed: f64,
    pub packet_norm_sq: f64,
    pub smearing_sigma: f64,
    pub single_packet_energy: f64,
    /// Smeared energy in `Ψ^{⊗n}` for `n = 1, 2, …`.
    pub n_particle_energy: Vec<f64>,
}

impl CsvRows for CounterexampleResult {
    fn header() -> Vec<&'static str> {
        vec!["n", "energy"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.n_particle_energy
            .iter()
            .enumerate()
            .map(|(i, e)| vec![(i + 1).to_string(), num(*e)])
            .collect()
    }
}

impl CsvRows for VerifyReport {
    fn header() -> Vec<&'static str> {
        vec!["suite", "name", "value", "tolerance", "passed"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    c.suite.clone(),
                    c.name.clone(),
                    c.value.map(num).unwrap_or_else(|| c.error.clone().unwrap_or_default()),
                    num(c.tolerance),
                    c.passed.to_string(),
                ]
            })
            .collect()
    }
}

fn emit<T: Serialize + CsvRows>(cfg: &RunConfig, command: &str, result: T) -> Result<(), CliError> {
    let report = Report { command: command.into(), config: cfg.clone(), result };
    let mut buf: Vec<u8> = Vec::new();
    match cfg.format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut buf, &report).map_err(|e| CliError::Io(e.to_string()))?;
            buf.push(b'\n');
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(T::header()).map_err(|e| CliError::Io(e.to_string()))?;
            for r in report.result.rows() {
                w.write_record(&r).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    match &cfg.out {
        Some(p) => std::fs::write(p, &buf).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(&buf).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn class_name<T: Serialize>(c: &T) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// Runs one parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = merge_config(cli)?;
    let (xi, alpha, beta) = (cfg.xi, cfg.alpha, cfg.beta);
    match &cli.command {
        Command::Classify { vector, covector, tol } => {
            let ctx = FresnelContext::uniaxial(xi)?;
            let result = match (vector, covector) {
                (Some(v), None) => {
                    let z = Vec4(*v);
                    ClassifyResult {
                        target: "vector".into(),
                        components: *v,
                        class: class_name(&classify_vector(&ctx, &z, *tol)?),
                        quadratic_forms: vector_forms(xi, &z),
                        tolerance: *tol,
                    }
                }
                (None, Some(k)) => {
                    let kc = Covec4(*k);
                    ClassifyResult {
                        target: "covector".into(),
                        components: *k,
                        class: class_name(&classify_covector(&ctx, &kc, *tol)?),
                        quadratic_forms: covector_forms(&BiMetric::uniaxial(xi), &kc),
                        tolerance: *tol,
                    }
                }
                _ => return Err(CliError::Usage("give exactly one of --vector, --covector".into())),
            };
            emit(&cfg, "classify", result)?;
        }
        Command::Fresnel { covector } => {
            let ctx = FresnelContext::uniaxial(xi)?;
            let bm = BiMetric::uniaxial(xi);
            let k = Covec4(*covector);
            let g = fresnel_eval(&ctx, &k);
            let (e, z) = (bm.eta(&k), bm.zeta(&k));
            let result = FresnelResult {
                covector: *covector,
                g,
                eta_inv_kk: e,
                zeta_inv_kk: z,
                factorization_residual: (g - e * z).abs(),
                in_hyperbolicity_cone: in_hyperbolicity_cone(&ctx, &k),
                legendre: legendre_map(&ctx, &k).ok().map(|v| v.0),
            };
            emit(&cfg, "fresnel", result)?;
        }
        Command::Swec => {
            let m = energy_matrices(xi, alpha, beta)?;
            let result = SwecResult { verdict: swec_check(xi, alpha, beta, None)?, x1: m.x1, x2: m.x2, residual: m.residual };
            emit(&cfg, "swec", result)?;
        }
        Command::QeiBound { pipeline } => {
            let g = cfg.g.resolve()?;
            let bound = qei_bound(xi, alpha, beta, cfg.norm, &g)?;
            let pipeline = if *pipeline { Some(qei_bound_pipeline(xi, alpha, beta, bound.aleph, &g)?) } else { None };
            emit(&cfg, "qei-bound", QeiCommandResult { bound, pipeline })?;
        }
        Command::Normalization { mode } => {
            let want = |m: NormArg| *mode == m || *mode == NormArg::Both;
            let result = NormalizationCommandResult {
                numeric: if want(NormArg::Numeric) { Some(aleph_uc(xi, alpha, beta, NormMode::Numeric)?) } else { None },
                series: if want(NormArg::Series) { Some(aleph_uc(xi, alpha, beta, NormMode::Series)?) } else { None },
            };
            emit(&cfg, "normalization", result)?;
        }
        Command::Counterexample { tau0, sigma, particles } => {
            if !(*sigma > 0.0) || *particles == 0 {
                return Err(CliError::Usage("need --sigma > 0 and --particles >= 1".into()));
            }
            let spec = WavePacketSpec::new(*tau0, alpha, beta, xi)?;
            let quad = spec.default_quadrature(cfg.nodes);
            let closed = field_strength_origin(&spec, FieldMethod::ClosedForm);
            let quadf = field_strength_at(&spec, &[0.0; 4], &quad);
            let s = (alpha.sinh() * beta.sin()).powi(2);
            let smear = SmearingFunction::Gaussian { sigma: *sigma, center: 0.0 };
            let single = single_packet_energy(&spec, &smear, &quad)?;
            let result = CounterexampleResult {
                spec,
                f_closed_form: closed.0.map(|z| z.re),
                f_quadrature: quadf.0.map(|z| z.re),
                f_mismatch: field_mismatch(&quadf, &closed),
                rho0: rho_origin(&spec, FieldMethod::ClosedForm)?,
                rho0_printed: 4.0 * (1.0 - xi * xi * s) / tau0.powi(4),
                packet_norm_sq: packet_norm_sq(&spec, &quad),
                smearing_sigma: *sigma,
                single_packet_energy: single,
                n_particle_energy: (1..=*particles)
                    .map(|n| n_particle_energy(single, n))
                    .collect::<Result<_, _>>()?,
            };
            emit(&cfg, "counterexample", result)?;
        }
        Command::Verify { suite, seed } => {
            let report = verify::run((*suite).into(), *seed);
            let ok = report.passed;
            for c in &report.checks {
                let value = c.value.map(|v| format!("{v:.3e}")).unwrap_or_else(|| c.error.clone().unwrap_or_default());
                eprintln!(
                    "[{}] {}/{}: {} (tol {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.suite,
                    c.name,
                    value,
                    c.tolerance
                );
            }
            emit(&cfg, "verify", report)?;
            return Ok(if ok { 0 } else { 1 });
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("qei").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_four("1,-2,3.5,0").unwrap(), [1.0, -2.0, 3.5, 0.0]);
        assert!(parse_four("1,2,3").is_err());
        assert!(parse_four("1,2,x,4").is_err());
        assert_eq!(parse_norm("UC").unwrap(), Normalization::Uc);
        assert_eq!(parse_norm("1.5").unwrap(), Normalization::Explicit(1.5));
        assert!(parse_norm("-1").is_err());
        assert_eq!(parse_smearing("gaussian:sigma=2").unwrap(), SmearingSpec::Gaussian { sigma: 2.0 });
        assert!(parse_smearing("gaussian:width=2").is_err());
        assert_eq!(parse_smearing("file:g.csv").unwrap(), SmearingSpec::File { path: "g.csv".into() });
    }

    #[test]
    fn flags_override_config() {
        let dir = std::env::temp_dir().join(format!("qei-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("cfg.json");
        std::fs::write(&p, r#"{"xi": 0.5, "alpha": 0.3, "norm": "uc"}"#).unwrap();
        let cli = parse(&["swec", "--config", p.to_str().unwrap(), "--alpha", "-0.7"]);
        let cfg = merge_config(&cli).unwrap();
        assert_eq!((cfg.xi, cfg.alpha, cfg.beta), (0.5, -0.7, 0.0));
        assert_eq!(cfg.norm, Normalization::Uc);
        assert_eq!(cfg.nodes, 48);
        let cli = parse(&["swec", "--xi", "-1"]);
        assert_eq!(merge_config(&cli).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn sampled_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("qei-cli-g-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("g.csv");
        let mut text = String::from("tau,g\n");
        let h = 1.0 / 64.0;
        for j in 0..=1024 {
            let t = -8.0 + j as f64 * h;
            let g = if j == 0 || j == 1024 { 0.0 } else { (-0.5 * t * t).exp() };
            text.push_str(&format!("{t},{g}\n"));
        }
        std::fs::write(&p, text).unwrap();
        let g = read_sampled(&p).unwrap();
        let want = 3.0 * std::f64::consts::PI.sqrt() / 4.0;
        assert!((crate::qei::gpp_norm_sq(&g).unwrap() - want).abs() < 1e-6 * want);
        std::fs::write(&p, "0,0\n0.1,1\n0.3,0\n").unwrap();
        assert!(matches!(read_sampled(&p), Err(CliError::Usage(_))));
    }

    #[test]
    fn report_round_trip() {
        let cfg = RunConfig { xi: 0.7, alpha: -0.2, norm: Normalization::Explicit(1.1), ..RunConfig::default() };
        let g = SmearingFunction::gaussian(1.0).unwrap();
        let bound = qei_bound(0.7, -0.2, 0.0, cfg.norm, &g).unwrap();
        let report = Report { command: "qei-bound".into(), config: cfg, result: QeiCommandResult { bound, pipeline: None } };
        let s = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<Report<QeiCommandResult>>(&s).unwrap(), report);
    }

    #[test]
    fn usage_errors() {
        assert!(Cli::try_parse_from(["qei", "classify"]).is_err());
        assert!(Cli::try_parse_from(["qei", "classify", "--vector", "1,0,0,0", "--covector", "1,0,0,0"]).is_err());
        assert!(Cli::try_parse_from(["qei", "verify", "--suite", "nope"]).is_err());
        let cli = parse(&["classify", "--xi", "1", "--vector", "-1,0,0,0"]);
        assert!(matches!(cli.command, Command::Classify { vector: Some([-1.0, 0.0, 0.0, 0.0]), .. }));
    }
}
