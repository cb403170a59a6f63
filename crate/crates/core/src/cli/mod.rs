//! Config-driven command-line runner.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or config error,
//! 3 numeric failure. Errors go to standard error as one JSON object.

pub mod config;
pub mod verify;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

pub use config::{parse_config, ConfigError, Job, ProfileSpec, RunConfig, SweepParam, SweepSpec};

use crate::closedform::{harmonic_wavefunction, solitonic_delta, SolitonicClosedForm};
use crate::discrete::{self, Grid};
use crate::error::Error;
use crate::model::{CoefficientField, MetricData, ModelParams};
use crate::profiles::{Family, Profile};
use crate::spectra::{self, OracleMode, ReportOptions, SpectralReport, SymmetricTridiagonal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Io { path: PathBuf, source: io::Error },
    Model(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Io { .. } => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Usage(m) => json!({ "error": "usage", "message": m }),
            CliError::Config(c) => json!({
                "error": "config",
                "kind": c.kind,
                "line": c.line,
                "key": c.key,
                "message": c.message,
            }),
            CliError::Io { path, source } => json!({
                "error": "io",
                "path": path.display().to_string(),
                "message": source.to_string(),
            }),
            CliError::Model(e) => json!({ "error": e.kind(), "message": e.to_string() }),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `output.dir`; the current directory when both are absent.
    pub out: Option<PathBuf>,
    pub dump_matrix: bool,
    /// Run the nonsymmetric solver even on large grids.
    pub oracle: bool,
    pub quiet: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerificationFailed,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => EXIT_OK,
            Outcome::VerificationFailed => EXIT_VERIFY,
        }
    }
}

/// Fixed 17-significant-digit formatting.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

struct Csv {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Csv {
    fn create(dir: &Path, name: &str, header: &[String]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        let mut csv = Csv { path, out: BufWriter::new(file) };
        csv.row(header)?;
        Ok(csv)
    }

    fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        writeln!(self.out, "{}", fields.join(","))
            .map_err(|source| CliError::Io { path: self.path.clone(), source })
    }

    fn finish(mut self) -> Result<PathBuf, CliError> {
        self.out.flush().map_err(|source| CliError::Io { path: self.path.clone(), source })?;
        Ok(self.path)
    }
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn write_coefficients(dir: &Path, profile: &Profile, params: &ModelParams, grid: &Grid) -> Result<PathBuf, CliError> {
    let field = CoefficientField::sample(profile, params, grid)?;
    let rho = discrete::sample_rho_tilde(profile, params, grid)?;
    let header = strings(&["x", "a", "b", "c1", "c2", "veff", "rho_tilde", "zeta_plus"]);
    let mut csv = Csv::create(dir, "coefficients.csv", &header)?;
    for i in 0..grid.n {
        csv.row(&[
            field.x[i],
            field.a[i],
            field.b[i],
            field.c1[i],
            field.c2[i],
            field.veff[i],
            rho[i],
            rho[i] * rho[i],
        ]
        .map(fmt_f64))?;
    }
    csv.finish()
}

fn write_metric(dir: &Path, profile: &Profile, params: &ModelParams, grid: &Grid) -> Result<(PathBuf, f64), CliError> {
    let m = MetricData::sample(profile, params, grid)?;
    let mut header = strings(&["x", "w", "rho_tilde", "zeta_plus", "zeta"]);
    if m.jones_rho.is_some() {
        header.push("jones_rho".into());
    }
    let mut csv = Csv::create(dir, "metric.csv", &header)?;
    for i in 0..m.x.len() {
        let mut row = vec![m.x[i], m.w[i], m.rho_tilde[i], m.zeta_plus[i], m.zeta[i]];
        if let Some(j) = &m.jones_rho {
            row.push(j[i]);
        }
        csv.row(&row.into_iter().map(fmt_f64).collect::<Vec<_>>())?;
    }
    Ok((csv.finish()?, m.consistency_error()))
}

fn dump_matrices(dir: &Path, profile: &Profile, params: &ModelParams, grid: &Grid) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    for (name, op) in [
        ("h_hermitian.txt", discrete::build_h_tilde(profile, params, grid)?),
        ("h_nonhermitian.txt", discrete::build_non_hermitian(profile, params, grid)?),
    ] {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        let mut out = BufWriter::new(file);
        op.write_triplets(&mut out)
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io { path: path.clone(), source })?;
        paths.push(path);
    }
    Ok(paths)
}

/// Unnormalized analytic eigenfunction of level `n`, if the family has one.
pub fn analytic_wavefunction(profile: &Profile, params: &ModelParams, n: usize, x: f64) -> Option<crate::Result<f64>> {
    match profile.family() {
        Family::Harmonic => Some(harmonic_wavefunction(params, n, x)),
        Family::Solitonic { q, kappa } => {
            Some(SolitonicClosedForm::for_params(q, kappa, params).and_then(|c| c.wavefunction(n, x)))
        }
        _ => None,
    }
}

fn write_spectrum(dir: &Path, report: &SpectralReport) -> Result<Vec<PathBuf>, CliError> {
    let header = strings(&["n", "E_numeric", "E_closed_form", "abs_err", "rel_err", "max_im"]);
    let mut csv = Csv::create(dir, "spectrum.csv", &header)?;
    for level in &report.levels {
        let max_im = report
            .oracle
            .as_ref()
            .and_then(|o| o.eigenvalues.get(level.n))
            .map(|z| z.im.abs());
        csv.row(&[
            level.n.to_string(),
            fmt_f64(level.numeric),
            fmt_opt(level.closed_form),
            fmt_opt(level.abs_err),
            fmt_opt(level.rel_err),
            fmt_opt(max_im),
        ])?;
    }
    let mut paths = vec![csv.finish()?];

    let k = report.chi.len();
    let mut header = vec!["x".to_string()];
    header.extend((0..k).map(|i| format!("chi_{i}")));
    header.extend((0..k).map(|i| format!("phi_{i}")));
    let mut csv = Csv::create(dir, "wavefunctions.csv", &header)?;
    for (i, x) in report.grid.nodes().enumerate() {
        let mut row = vec![fmt_f64(x)];
        row.extend(report.chi.iter().map(|c| fmt_f64(c[i])));
        row.extend(report.phi.iter().map(|p| fmt_f64(p[i])));
        csv.row(&row)?;
    }
    paths.push(csv.finish()?);
    Ok(paths)
}

fn write_closed_form(dir: &Path, profile: &Profile, params: &ModelParams, grid: &Grid, k: usize) -> Result<Option<PathBuf>, CliError> {
    if analytic_wavefunction(profile, params, 0, 0.0).is_none() {
        return Ok(None);
    }
    let mut csv = Csv::create(dir, "closedform.csv", &strings(&["n", "E_n", "checksum"]))?;
    for n in 0..k {
        let energy = spectra::closed_form_energy(profile, params, n).expect("family has a closed form")?;
        let mut checksum = 0.0;
        for x in grid.nodes() {
            checksum += analytic_wavefunction(profile, params, n, x).expect("family has a closed form")?;
        }
        csv.row(&[n.to_string(), fmt_f64(energy), fmt_f64(checksum * grid.h())])?;
    }
    Ok(Some(csv.finish()?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub e0: f64,
    pub max_im: f64,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
}

/// One sweep point: lowest level of `h̃` on `grid`, oracle reality on the
/// clipped 200-node grid, and `Δ`, `λ` for the solitonic family.
pub fn sweep_point(spec: &ProfileSpec, params: &ModelParams, grid: &Grid) -> crate::Result<(f64, f64, Option<f64>, Option<f64>)> {
    let profile = spec.build()?;
    let small = discrete::build_h_tilde(&profile, params, grid)?;
    let e0 = spectra::lowest_eigenvalues(&SymmetricTridiagonal::from_band(&small.matrix)?, 1)?[0];
    let (lo, hi) = profile.oracle_domain();
    let coarse = Grid::new(lo.max(grid.x_min), hi.min(grid.x_max), spectra::ORACLE_NODES)?;
    let big = discrete::build_non_hermitian(&profile, params, &coarse)?;
    let eig = spectra::eig_band_nonsymmetric(&big.matrix, &spectra::QrOptions::default())?;
    let (delta, lambda) = match profile.family() {
        Family::Solitonic { q, kappa } => {
            let (a, b) = params.reduced();
            let lambda = SolitonicClosedForm::for_params(q, kappa, params).ok().map(|c| c.lambda);
            (Some(solitonic_delta(kappa, a, b)), lambda)
        }
        _ => (None, None),
    };
    Ok((e0, spectra::max_imaginary(&eig), delta, lambda))
}

pub fn run_sweep(config: &RunConfig, spec: &SweepSpec) -> crate::Result<Vec<SweepPoint>> {
    spec.values()
        .par_iter()
        .map(|&value| {
            let p = config.params;
            let (params, profile_spec) = match spec.param {
                SweepParam::Omega => (ModelParams::new(value, p.alpha, p.beta)?, config.profile_spec.clone()),
                SweepParam::Alpha => (ModelParams::new(p.omega, value, p.beta)?, config.profile_spec.clone()),
                SweepParam::Beta => (ModelParams::new(p.omega, p.alpha, value)?, config.profile_spec.clone()),
                other => (
                    p,
                    config
                        .profile_spec
                        .with(other, value)
                        .ok_or_else(|| Error::invalid("sweep.param", "not a parameter of this profile"))?,
                ),
            };
            let (e0, max_im, delta, lambda) = sweep_point(&profile_spec, &params, &config.grid)?;
            Ok(SweepPoint { value, e0, max_im, delta, lambda })
        })
        .collect()
}

fn say(opts: &RunOptions, line: impl AsRef<str>) {
    if !opts.quiet {
        println!("{}", line.as_ref());
    }
}

/// Executes the configured job and writes its artifacts.
pub fn run(config: &RunConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let dir = opts
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    let (profile, params, grid) = (&config.profile, &config.params, &config.grid);

    if opts.dump_matrix && config.job != Job::Sweep {
        for p in dump_matrices(&dir, profile, params, grid)? {
            say(opts, format!("wrote {}", p.display()));
        }
    }

    match config.job {
        Job::Veff => {
            let p = write_coefficients(&dir, profile, params, grid)?;
            say(opts, format!("wrote {}", p.display()));
        }
        Job::Metric => {
            let p = write_coefficients(&dir, profile, params, grid)?;
            say(opts, format!("wrote {}", p.display()));
            let (p, consistency) = write_metric(&dir, profile, params, grid)?;
            say(opts, format!("wrote {}", p.display()));
            say(opts, format!("max |rho_tilde * w - 1| = {consistency:.3e}"));
        }
        Job::Spectrum => {
            let k = config.k.expect("validated");
            let oracle = if opts.oracle { OracleMode::Force } else { OracleMode::Auto };
            let report = spectra::make_report(
                profile,
                params,
                grid,
                &ReportOptions { k, oracle, ..ReportOptions::default() },
            )?;
            for p in write_spectrum(&dir, &report)? {
                say(opts, format!("wrote {}", p.display()));
            }
            if let Some(p) = write_closed_form(&dir, profile, params, grid, k)? {
                say(opts, format!("wrote {}", p.display()));
            }
            for level in &report.levels {
                say(
                    opts,
                    format!(
                        "E_{} = {:.10}{}",
                        level.n,
                        level.numeric,
                        level.rel_err.map(|r| format!("  (rel err {r:.2e})")).unwrap_or_default()
                    ),
                );
            }
            if let Some(o) = &report.oracle {
                say(opts, format!("oracle: max|Im E| = {:.3e}, |H|_inf = {:.3e}", o.max_imag, o.norm_inf));
            }
            if report.phi_overflow {
                say(opts, "warning: phi = chi / rho_tilde overflows on this grid");
            }
            if !report.clusters.is_empty() {
                say(opts, format!("clustered levels: {:?}", report.clusters));
            }
        }
        Job::Verify => {
            let k = config.k.expect("validated");
            let report = verify::verify(profile, params, grid, k)?;
            let path = dir.join("verify.json");
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            fs::write(&path, text + "\n").map_err(|source| CliError::Io { path: path.clone(), source })?;
            for c in &report.checks {
                say(opts, c.summary_line());
            }
            say(opts, format!("wrote {}", path.display()));
            if !report.passed {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Job::Sweep => {
            let spec = config.sweep.as_ref().expect("validated");
            let points = run_sweep(config, spec)?;
            let header = strings(&[spec.param.name(), "E0", "max_im", "delta", "lambda"]);
            let mut csv = Csv::create(&dir, "sweep.csv", &header)?;
            for p in &points {
                csv.row(&[fmt_f64(p.value), fmt_f64(p.e0), fmt_f64(p.max_im), fmt_opt(p.delta), fmt_opt(p.lambda)])?;
            }
            let path = csv.finish()?;
            say(opts, format!("wrote {}", path.display()));
        }
    }
    Ok(Outcome::Success)
}

/// Reads, parses and runs; returns the process exit code after reporting
/// any error on standard error.
pub fn run_from_path(path: &Path, opts: &RunOptions) -> i32 {
    let result = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))
        .and_then(|text| parse_config(&text).map_err(CliError::from))
        .and_then(|config| run(&config, opts));
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
