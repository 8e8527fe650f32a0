//! Command-line front end: argument parsing, configuration resolution and the
//! verification suites behind each subcommand.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bicoherent::{
    bicoherent_pair, series_eigen_residual, series_roi_probe, series_vs_closed, weak_resolution_identity, Mapping,
};
use crate::dho::{
    self, dho_algebra_check, hamiltonian_identity_check, ratio_constraint, solve_ratio_constraint, vacuum_feasibility,
    DhoParams,
};
use crate::exec::Exec;
use crate::gauss::{random_poly_gauss, relative_distance, PolyGauss, QuadExponent};
use crate::gll::{
    biorthogonality_matrix, build_gll, closed_form_phi_0l, closed_form_phi_n0, closed_form_psi_0l, closed_form_psi_n0,
    eigen_residuals, expand_in_family, generate_family, metric_ops_check, phi_gram_matrix, riesz_diagnostic,
    standard_vacuum, vacuum_check, FamilyTable, GllParams, MetricOperators, MAX_FAMILY_INDEX,
};
use crate::poly::Poly2;
use crate::quadrature::{QuadratureGrid4D, MAX_NODES, MIN_NODES};
use crate::report::{csv_field, write_atomic, Check, Report};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const IO: i32 = 1;
    pub const CHECK_FAILED: i32 = 2;
    pub const CONFIG: i32 = 3;
}

#[derive(Parser, Debug)]
#[command(name = "pseudoboson", version, about = "Verification suites for two-mode pseudo-bosonic models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Commutators, biorthogonal families, eigenvalues and metric operators.
    GllVerify(RunArgs),
    /// Closed-form bicoherent states and their truncated-series counterparts.
    GllCoherent(RunArgs),
    /// Weak resolution of the identity by 4-D quadrature.
    GllRoi(RunArgs),
    /// Damped oscillator algebra, vacuum and Hamiltonian identities.
    DhoCheck(RunArgs),
    /// Seeded random sweep of the damped-oscillator vacuum obstruction.
    DhoSweep(RunArgs),
    /// The undeformed (k1 = k2 = 0) pipeline end to end.
    SllBaseline(RunArgs),
    /// Run the command named in the `--config` file.
    Run(RunArgs),
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// JSON file with `command`, `params`, `output`, `format`; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Add `wall_time_ms` to the report (makes it non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Disable data-parallel execution.
    #[arg(long)]
    pub sequential: bool,
    /// Suppress the per-check summary on stderr.
    #[arg(long, short)]
    pub quiet: bool,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    GllVerify,
    GllCoherent,
    GllRoi,
    DhoCheck,
    DhoSweep,
    SllBaseline,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GllVerify => "gll-verify",
            Command::GllCoherent => "gll-coherent",
            Command::GllRoi => "gll-roi",
            Command::DhoCheck => "dho-check",
            Command::DhoSweep => "dho-sweep",
            Command::SllBaseline => "sll-baseline",
        }
    }

    /// Parameters read by the command, with their defaults. `delta` has no
    /// default: when absent it is solved from the ratio constraint.
    fn defaults(self) -> Value {
        match self {
            Command::GllVerify => json!({"k1": 0.2, "k2": -0.3, "nmax": 6, "lmax": 6, "seed": 1}),
            Command::GllCoherent => json!({"k1": 0.1, "k2": 0.0, "z": [0.5, 0.0], "zp": [0.0, 0.0], "nmax": 16}),
            Command::GllRoi => {
                json!({"k1": 0.2, "k2": -0.2, "nodes": 24, "scale": 1.0, "tol": 1e-3, "seed": 1, "n": 5})
            }
            Command::DhoCheck => json!({"m": 1.0, "gamma": 1.0, "k": 1.0, "Gamma": [1.0, 0.0], "seed": 1}),
            Command::DhoSweep => json!({"n": 1000, "seed": 7}),
            Command::SllBaseline => json!({"nmax": 6, "lmax": 6, "nodes": 16, "tol": 1e-4}),
        }
    }

    fn allows(self, key: &str) -> bool {
        (self == Command::DhoCheck && key == "delta") || self.defaults().get(key).is_some()
    }
}

/// All tunable parameters. Shared by the flag parser and the JSON config.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Deformation of the y direction, |k1| < 1/2.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    /// Deformation of the x direction, |k2| < 1/2.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmax: Option<usize>,
    /// Eigenvalue of A, as `re,im` or `a+bi`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Complex64>,
    /// Eigenvalue of A'.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zp: Option<Complex64>,
    /// Gauss-Hermite nodes per axis.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Oscillator mass.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Damping coefficient.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Spring constant.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[arg(long = "Gamma", allow_hyphen_values = true, value_parser = parse_complex)]
    #[serde(rename = "Gamma", default, skip_serializing_if = "Option::is_none")]
    pub big_gamma: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Complex64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Number of random draws.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

/// Accepts `re,im` or anything `Complex64::from_str` parses (`1.5`, `-2i`, `0.5+1i`).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let value = if let Some((re, im)) = s.split_once(',') {
        let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Complex64::new(p(re)?, p(im)?)
    } else {
        s.trim().parse::<Complex64>().map_err(|e| format!("{s:?}: {e}"))?
    };
    Ok(value)
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// A fully resolved run: every parameter the command reads is present.
/// Serialized verbatim as the report's config echo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub params: Params,
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn cfg_err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

/// Merges defaults, file values and flags (in increasing precedence), then
/// validates every range before anything is computed.
pub fn resolve(command: Command, file: &Params, flags: &Params, format: Format) -> Result<RunConfig, ConfigError> {
    let mut merged = object(command.defaults());
    for layer in [file, flags] {
        let layer = object(serde_json::to_value(layer).expect("params serialize"));
        for (key, value) in layer {
            if !command.allows(&key) {
                return Err(cfg_err(format!("parameter '{key}' is not used by {}", command.name())));
            }
            merged.insert(key, value);
        }
    }
    let params: Params = serde_json::from_value(Value::Object(merged)).map_err(|e| cfg_err(e.to_string()))?;
    validate(command, &params)?;
    Ok(RunConfig { command, params, format })
}

fn need<T: Copy>(v: Option<T>) -> T {
    v.expect("resolved parameters are complete")
}

fn validate(command: Command, p: &Params) -> Result<(), ConfigError> {
    let finite = |name: &str, v: Option<f64>| match v {
        Some(x) if !x.is_finite() => Err(cfg_err(format!("{name} must be finite"))),
        _ => Ok(()),
    };
    for (name, v) in
        [("k1", p.k1), ("k2", p.k2), ("scale", p.scale), ("m", p.m), ("gamma", p.gamma), ("k", p.k), ("tol", p.tol)]
    {
        finite(name, v)?;
    }
    for (name, v) in [("z", p.z), ("zp", p.zp), ("Gamma", p.big_gamma), ("delta", p.delta)] {
        if v.is_some_and(|c| !c.is_finite()) {
            return Err(cfg_err(format!("{name} must be finite")));
        }
    }
    for (name, v) in [("k1", p.k1), ("k2", p.k2)] {
        if v.is_some_and(|k| k.abs() >= 0.5) {
            return Err(cfg_err(format!("{name} must satisfy |{name}| < 1/2")));
        }
    }
    for (name, v) in [("nmax", p.nmax), ("lmax", p.lmax)] {
        if v.is_some_and(|n| n > MAX_FAMILY_INDEX) {
            return Err(cfg_err(format!("{name} must be at most {MAX_FAMILY_INDEX}")));
        }
    }
    if p.nodes.is_some_and(|n| !(MIN_NODES..=MAX_NODES).contains(&n)) {
        return Err(cfg_err(format!("nodes must be in {MIN_NODES}..={MAX_NODES}")));
    }
    if p.scale.is_some_and(|s| s <= 0.0) {
        return Err(cfg_err("scale must be positive"));
    }
    if p.tol.is_some_and(|t| t <= 0.0) {
        return Err(cfg_err("tol must be positive"));
    }
    let max_n = if command == Command::GllRoi { 100 } else { 1_000_000 };
    if p.n.is_some_and(|n| n == 0 || n > max_n) {
        return Err(cfg_err(format!("n must be in 1..={max_n}")));
    }
    if command == Command::DhoCheck {
        let (m, g, k, big) = (need(p.m), need(p.gamma), need(p.k), need(p.big_gamma));
        if m <= 0.0 || k <= 0.0 || g < 0.0 {
            return Err(cfg_err("need m > 0, k > 0, gamma >= 0"));
        }
        if k < g * g / (4.0 * m) {
            return Err(cfg_err("overdamped: need k >= gamma^2/(4m)"));
        }
        if big.norm() == 0.0 {
            return Err(cfg_err("Gamma must be nonzero"));
        }
        if let Some(delta) = p.delta {
            DhoParams::new(m, g, k, big, delta).map_err(|e| cfg_err(e.to_string()))?;
        }
    }
    Ok(())
}

/// Report plus an optional CSV table (Gram matrix, sweep cases, or checks).
pub struct Outcome {
    pub report: Report,
    pub csv: String,
}

pub fn run(config: &RunConfig, exec: Exec) -> Outcome {
    let echo = serde_json::to_value(config).expect("config serializes");
    let mut report = Report::new(config.command.name(), echo);
    let mut csv = None;
    let p = &config.params;
    let result = match config.command {
        Command::GllVerify => gll_verify(p, exec, &mut report, &mut csv),
        Command::GllCoherent => gll_coherent(p, exec, &mut report),
        Command::GllRoi => gll_roi(p, exec, &mut report),
        Command::DhoCheck => dho_check(p, &mut report),
        Command::DhoSweep => dho_sweep(p, exec, &mut report, &mut csv),
        Command::SllBaseline => sll_baseline(p, exec, &mut report, &mut csv),
    };
    if let Err(e) = result {
        report.push(Check::error("run", "computation completed", &e));
    }
    let csv = csv.unwrap_or_else(|| report.checks_csv());
    Outcome { report, csv }
}

const SAMPLE_COUNT: usize = 10;

/// Samples that stay integrable under every metric multiplier for |k| < 1/2.
fn metric_samples(seed: u64) -> crate::Result<Vec<PolyGauss>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..SAMPLE_COUNT).map(|_| random_poly_gauss(&mut rng, 4, QuadExponent::gaussian(1.0, 1.0))).collect()
}

fn closed_form_residual(table: &FamilyTable) -> crate::Result<f64> {
    let p = &table.params;
    let mut worst: f64 = 0.0;
    for n in 0..=table.nmax {
        worst = worst.max(relative_distance(table.phi(n, 0), &closed_form_phi_n0(p, n)?)?);
        worst = worst.max(relative_distance(table.psi(n, 0), &closed_form_psi_n0(p, n)?)?);
    }
    for l in 0..=table.lmax {
        worst = worst.max(relative_distance(table.phi(0, l), &closed_form_phi_0l(p, l)?)?);
        worst = worst.max(relative_distance(table.psi(0, l), &closed_form_psi_0l(p, l)?)?);
    }
    Ok(worst)
}

/// Largest leftover when `xᵐyⁿφ₀₀`, `m + n ≤ d`, is expanded in the family.
fn completeness_residual(table: &FamilyTable, d: usize) -> crate::Result<f64> {
    let mut worst: f64 = 0.0;
    for m in 0..=d as u32 {
        for n in 0..=(d as u32 - m) {
            let (_, leftover) = expand_in_family(table, &Poly2::monomial(m, n, Complex64::new(1.0, 0.0)))?;
            worst = worst.max(leftover);
        }
    }
    Ok(worst)
}

fn gll_verify(p: &Params, exec: Exec, report: &mut Report, csv: &mut Option<String>) -> crate::Result<()> {
    let params = GllParams::new(need(p.k1), need(p.k2))?;
    let (nmax, lmax) = (need(p.nmax), need(p.lmax));
    let ops = build_gll(&params)?;
    let table = ops.commutation_table();
    report.push(Check::bound(
        "commutators",
        "[A,B] = [A',B'] = 1, cross-mode pairs vanish",
        table.max_residual(),
        1e-14,
    ));
    let sharp = ops.sharp_commutation_table();
    report.push(Check::info(
        "adjoint cross commutators",
        "cross-mode pairs involving adjoints",
        Some(sharp.max_residual()),
        "nonzero unless k1 = k2 = 0",
    ));
    report.set_data("commutators", &sharp.entries);

    let vac = vacuum_check(&params)?;
    report.push(Check::bound(
        "vacuum annihilation",
        "A phi00 = A' phi00 = 0, B^dag Psi00 = B'^dag Psi00 = 0",
        vac.max_annihilation_residual(),
        1e-12,
    ));
    report.push(Check::bound("vacuum overlap", "<Psi00, phi00> = 1", (vac.overlap - 1.0).norm(), 1e-12));

    let fam = generate_family(&params, nmax, lmax, exec)?;
    report.push(Check::bound(
        "closed forms",
        "phi_{n,0}, phi_{0,l}, Psi_{n,0}, Psi_{0,l} as (x +- iy)^n times the vacuum",
        closed_form_residual(&fam)?,
        1e-10,
    ));
    let gram = biorthogonality_matrix(&fam, exec)?;
    report.push(Check::bound(
        "biorthogonality",
        "<Psi_{n,l}, phi_{m,k}> = delta_{nm} delta_{lk}",
        gram.max_kronecker_residual(),
        1e-10,
    ));
    *csv = Some(gram.to_csv());
    let eig = eigen_residuals(&fam, exec)?;
    report.push(Check::bound(
        "eigenvalues",
        "h' phi = (n - 1/2) phi, h phi = (l - 1/2) phi and adjoints on Psi",
        eig.max(),
        1e-10,
    ));

    let standard = generate_family(&GllParams::sll(), nmax, lmax, exec)?;
    let metric = metric_ops_check(&params, &fam, &standard, &metric_samples(need(p.seed))?, exec)?;
    report.push(Check::bound(
        "metric reproduction",
        "phi = T_phi phi0 and Psi = T_Psi phi0",
        metric.t_phi_reproduction.max(metric.t_psi_reproduction),
        1e-10,
    ));
    report.push(Check::bound("family exchange", "S_phi Psi = phi and S_Psi phi = Psi", metric.s_maps_families, 1e-10));
    report.push(Check::bound(
        "metric inverse",
        "S_Psi S_phi = S_phi S_Psi = 1 on samples",
        metric.s_inverse_pair,
        1e-10,
    ));
    report.push(Check::bound(
        "ladder intertwining",
        "B'^n T_phi = T_phi (A0'^dag)^n and analogues",
        metric.ladder_intertwining,
        1e-10,
    ));
    report.push(Check::bound(
        "number intertwining",
        "S_Psi N_j = N_j^dag S_Psi and N_j S_phi = S_phi N_j^dag",
        metric.number_intertwining,
        1e-10,
    ));
    report.set_data("metric", &metric);

    let degree = 6.min(nmax).min(lmax);
    report.push(
        Check::bound(
            "finite completeness",
            "x^m y^n phi00 is a finite combination of phi_{i,j}",
            completeness_residual(&fam, degree)?,
            1e-10,
        )
        .with_detail(format!("m + n <= {degree}")),
    );

    let riesz = riesz_diagnostic(&fam, exec)?;
    report.push(Check::info(
        "riesz diagnostic",
        "r_{n,l} = |phi_{n,l}| |Psi_{n,l}|",
        Some(riesz.sup),
        riesz.verdict.to_string(),
    ));
    report.set_data("riesz", &riesz);
    report.set_data("params", params);
    report.set_data("gram_max_residual", gram.max_kronecker_residual());
    report.set_data("eigen_max_residual", eig.max());
    Ok(())
}

fn gll_coherent(p: &Params, exec: Exec, report: &mut Report) -> crate::Result<()> {
    let params = GllParams::new(need(p.k1), need(p.k2))?;
    let (z, zp, n) = (need(p.z), need(p.zp), need(p.nmax));
    let check = bicoherent_pair(&params, z, zp)?.check()?;
    report.push(Check::bound(
        "bicoherent eigenvalues",
        "A phi~ = z phi~, A' phi~ = z' phi~, B^dag Psi~ = z Psi~, B'^dag Psi~ = z' Psi~",
        check.max_eigen_residual(),
        1e-10,
    ));
    report.push(Check::bound("bicoherent overlap", "<Psi~, phi~> = 1", (check.overlap - 1.0).norm(), 1e-10));

    let fam = generate_family(&params, n, n, exec)?;
    let mut comparisons = Vec::new();
    for mapping in Mapping::ALL {
        let c = series_vs_closed(&fam, z, zp, n, mapping)?;
        let name = match mapping {
            Mapping::Natural => "series vs closed form (z1 = z', z2 = z)",
            Mapping::Swapped => "series vs closed form (z1 = z, z2 = z')",
        };
        report.push(Check::info(
            name,
            "truncated series state against phi~",
            Some(c.phase_aligned),
            format!("raw {:e}, projective {:e}", c.raw, c.projective),
        ));
        comparisons.push(c);
    }
    let (z1, z2) = Mapping::Natural.labels(z, zp);
    let series_residual = series_eigen_residual(&fam, z1, z2, n)?;
    report.push(Check::info(
        "series eigen residual",
        "A' s = z1 s, A s = z2 s for the truncated series",
        Some(series_residual),
        format!("truncation {n}"),
    ));
    report.set_data("params", params);
    report.set_data("z", z);
    report.set_data("zp", zp);
    report.set_data("eigen_residuals", &check);
    report.set_data("overlap", check.overlap);
    report.set_data("series", &comparisons);
    Ok(())
}

/// Degree-≤2 polynomial times the standard vacuum.
fn roi_pairs(seed: u64, n: usize) -> crate::Result<Vec<(PolyGauss, PolyGauss)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = *standard_vacuum().exponent();
    (0..n).map(|_| Ok((random_poly_gauss(&mut rng, 2, e)?, random_poly_gauss(&mut rng, 2, e)?))).collect()
}

fn roi_checks(
    params: &GllParams,
    pairs: &[(PolyGauss, PolyGauss)],
    grid: &QuadratureGrid4D,
    tol: f64,
    exec: Exec,
    report: &mut Report,
) -> Vec<Value> {
    let mut data = Vec::new();
    for (i, (f, g)) in pairs.iter().enumerate() {
        let name = format!("resolution of identity #{i}");
        let tag = "(1/pi^2) int <f, phi~><Psi~, g> = <f, g>";
        match weak_resolution_identity(params, f, g, grid, tol, exec) {
            Ok(r) => {
                report.push(Check::bound(&name, tag, r.abs_err, tol * (1.0 + r.target.norm())));
                data.push(serde_json::to_value(&r).expect("roi result serializes"));
            }
            Err(e) => {
                report.push(Check::error(&name, tag, &e));
                data.push(json!({ "error": e.to_string() }));
            }
        }
    }
    data
}

fn gll_roi(p: &Params, exec: Exec, report: &mut Report) -> crate::Result<()> {
    let params = GllParams::new(need(p.k1), need(p.k2))?;
    let grid = QuadratureGrid4D::new(need(p.nodes), need(p.scale))?;
    let pairs = roi_pairs(need(p.seed), need(p.n))?;
    let data = roi_checks(&params, &pairs, &grid, need(p.tol), exec, report);
    report.set_data("params", params);
    report.set_data("roi", data);
    Ok(())
}

fn dho_check(p: &Params, report: &mut Report) -> crate::Result<()> {
    let (m, g, k, big) = (need(p.m), need(p.gamma), need(p.k), need(p.big_gamma));
    let delta = match p.delta {
        Some(d) => d,
        None => {
            let w = Complex64::new(((k - g * g / (4.0 * m)) / m).max(0.0).sqrt(), g / (2.0 * m));
            solve_ratio_constraint(w, big, 1.0)?
        }
    };
    let params = DhoParams::new(m, g, k, big, delta)?;
    let algebra = dho_algebra_check(&params)?;
    report.push(Check::bound(
        "commutators",
        "[a+,b+] = [a-,b-] = 1, [x+,p+] = [x-,p-] = i, cross pairs vanish",
        algebra.max_commutator_residual(),
        1e-14,
    ));
    report.push(Check::bound("conjugation", "b+ = a-^dag and b- = a+^dag", algebra.conjugation_residual, 1e-14));
    report.push(Check::bound("compatibility", "x+^dag = x- and p+^dag = p-", algebra.compatibility_residual, 1e-14));
    let ratio = ratio_constraint(&params)?;
    let d = dho::build_dho(&params)?.derived;
    let mut data = json!({
        "params": params,
        "delta_solved": p.delta.is_none(),
        "Omega": d.omega,
        "omega_plus": d.omega_plus,
        "omega_minus": d.omega_minus,
        "commutator_residual_max": algebra.max_commutator_residual(),
        "conjugation_ok": algebra.conjugation_residual <= 1e-14,
        "ratio_residual": ratio.residual,
    });
    if ratio.holds {
        let vac = vacuum_feasibility(&params)?;
        report.push(Check::flag(
            "vacuum obstruction",
            "the formal vacuum is not square integrable",
            !vac.normalizable,
            format!("re1 = {:e}, re2 = {:e}", vac.re1, vac.re2),
        ));
        report.push(Check::bound("formal annihilation", "a+ phi00 = a- phi00 = 0", vac.annihilation_residual, 1e-12));
        let map = data.as_object_mut().expect("object");
        map.insert("re1".into(), json!(vac.re1));
        map.insert("re2".into(), json!(vac.re2));
        map.insert("normalizable".into(), json!(vac.normalizable));
    } else {
        report.push(Check::info(
            "ratio constraint",
            "omega+/omega- = -(delta/conj delta)(Gamma/conj Gamma)",
            Some(ratio.residual),
            "not satisfied: no common formal vacuum exists",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(need(p.seed));
    let samples: Vec<PolyGauss> = (0..dho::HAMILTONIAN_SAMPLES).map(|_| dho::random_sample(&mut rng, 3)).collect();
    let h = hamiltonian_identity_check(&params, &samples)?;
    report.push(Check::bound("hamiltonian identity", "sum w N + (w+ + w-)/2 = sum (p^2 + w^2 x^2)/2", h, 1e-10));
    data.as_object_mut().expect("object").insert("hamiltonian_residual_max".into(), json!(h));
    if let Value::Object(map) = data {
        for (key, value) in map {
            report.set_data(&key, value);
        }
    }
    Ok(())
}

fn dho_sweep(p: &Params, exec: Exec, report: &mut Report, csv: &mut Option<String>) -> crate::Result<()> {
    let (n, seed) = (need(p.n), need(p.seed));
    let s = dho::dho_sweep(n, seed, exec)?;
    report.push(Check::flag(
        "vacuum obstruction",
        "the formal vacuum is never square integrable",
        s.normalizable_count == 0,
        format!("normalizable=false in {}/{} draws", n - s.normalizable_count, n),
    ));
    report.push(Check::bound("formal annihilation", "a+ phi00 = a- phi00 = 0", s.max_annihilation_residual, 1e-12));
    report.push(Check::bound("commutators", "pseudo-bosonic and canonical tables", s.max_commutator_residual, 1e-14));
    report.push(Check::bound(
        "ratio constraint",
        "solved delta satisfies the phase condition",
        s.max_ratio_residual,
        1e-12,
    ));
    report.push(Check::bound(
        "hamiltonian identity",
        "sum w N + (w+ + w-)/2 = sum (p^2 + w^2 x^2)/2",
        s.max_hamiltonian_residual,
        1e-10,
    ));
    report.set_data("seed", seed);
    report.set_data("samples", n);
    report.set_data("normalizable_count", s.normalizable_count);
    report.set_data("max_annihilation_residual", s.max_annihilation_residual);
    report.set_data("max_commutator_residual", s.max_commutator_residual);
    report.set_data("max_ratio_residual", s.max_ratio_residual);
    report.set_data("max_hamiltonian_residual", s.max_hamiltonian_residual);
    report.set_data("min_re_product", s.min_re_product);

    let mut out = String::from("index,m,gamma,k,Gamma,delta,re1,re2,normalizable,annihilation,hamiltonian\n");
    let c = |z: Complex64| format!("{:e}{:+e}j", z.re, z.im);
    for case in &s.cases {
        let q = &case.params;
        out.push_str(&format!(
            "{},{:e},{:e},{:e},{},{},{:e},{:e},{},{:e},{:e}\n",
            case.index,
            q.m,
            q.gamma_damp,
            q.k,
            csv_field(&c(q.big_gamma)),
            csv_field(&c(q.delta)),
            case.re1,
            case.re2,
            case.normalizable,
            case.annihilation_residual,
            case.hamiltonian_residual
        ));
    }
    *csv = Some(out);
    Ok(())
}

fn sll_baseline(p: &Params, exec: Exec, report: &mut Report, csv: &mut Option<String>) -> crate::Result<()> {
    let params = GllParams::sll();
    let (nmax, lmax) = (need(p.nmax), need(p.lmax));
    let ops = build_gll(&params)?;
    report.push(Check::bound(
        "commutators",
        "full two-mode table including adjoints",
        ops.sharp_commutation_table().max_residual(),
        1e-14,
    ));
    let fam = generate_family(&params, nmax, lmax, exec)?;
    let mut same: f64 = 0.0;
    for (n, l) in fam.labels() {
        same = same.max(relative_distance(fam.psi(n, l), fam.phi(n, l))?);
    }
    report.push(Check::bound("families coincide", "phi_{n,l} = Psi_{n,l}", same, 1e-14));
    let gram = phi_gram_matrix(&fam, exec)?;
    report.push(Check::bound(
        "orthonormality",
        "<phi_{n,l}, phi_{m,k}> = delta delta",
        gram.max_kronecker_residual(),
        1e-10,
    ));
    *csv = Some(gram.to_csv());
    let bi = biorthogonality_matrix(&fam, exec)?;
    report.push(Check::bound(
        "biorthogonality",
        "<Psi_{n,l}, phi_{m,k}> = delta delta",
        bi.max_kronecker_residual(),
        1e-10,
    ));
    let eig = eigen_residuals(&fam, exec)?;
    report.push(Check::bound("eigenvalues", "h' phi = (n - 1/2) phi, h phi = (l - 1/2) phi", eig.max(), 1e-10));
    let metric = MetricOperators::new(&params)?;
    let identity = [metric.t_phi, metric.t_psi, metric.s_phi, metric.s_psi].iter().all(|m| m.is_identity(0.0));
    report.push(Check::flag("identity metrics", "T_phi = T_Psi = S_phi = S_Psi = 1", identity, "exact"));
    let riesz = riesz_diagnostic(&fam, exec)?;
    let r_dev = riesz.diagonal.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    report.push(Check::bound("unit norm products", "r_{n,n} = 1", r_dev, 1e-10).with_detail(riesz.verdict.to_string()));

    let tol = need(p.tol);
    let grid = QuadratureGrid4D::new(need(p.nodes), 1.0)?;
    let v = standard_vacuum();
    let lin = v.mul_poly(&(&Poly2::one() + &Poly2::x()))?;
    let quad = v.mul_poly(
        &(&Poly2::monomial(0, 2, Complex64::new(1.0, 0.0)) + &Poly2::monomial(0, 1, Complex64::new(0.0, 1.0))),
    )?;
    let pairs = vec![(v.clone(), v.clone()), (v.clone(), v.mul_poly(&Poly2::x())?), (lin.clone(), quad.clone())];
    let roi = roi_checks(&params, &pairs, &grid, tol, exec, report);

    let truncation = nmax.min(lmax);
    let probe = series_roi_probe(&fam, &lin, &quad, truncation, &grid, exec)?;
    report.push(Check::info(
        "series resolution of identity",
        "series-state pairing against <f, g>",
        Some(probe.abs_err),
        format!("truncation {truncation}"),
    ));
    report.set_data("riesz", &riesz);
    report.set_data("roi", roi);
    report.set_data("series_roi", &probe);
    Ok(())
}

/// Builds the resolved configuration from parsed arguments.
pub fn configure(cmd: &CliCommand) -> Result<(RunConfig, &RunArgs, Option<PathBuf>), ConfigError> {
    let (fixed, args) = match cmd {
        CliCommand::GllVerify(a) => (Some(Command::GllVerify), a),
        CliCommand::GllCoherent(a) => (Some(Command::GllCoherent), a),
        CliCommand::GllRoi(a) => (Some(Command::GllRoi), a),
        CliCommand::DhoCheck(a) => (Some(Command::DhoCheck), a),
        CliCommand::DhoSweep(a) => (Some(Command::DhoSweep), a),
        CliCommand::SllBaseline(a) => (Some(Command::SllBaseline), a),
        CliCommand::Run(a) => (None, a),
    };
    let file = match &args.config {
        Some(path) => read_config(path)?,
        None => FileConfig::default(),
    };
    let command = match (fixed, file.command) {
        (Some(c), Some(f)) if c != f => {
            return Err(cfg_err(format!("config file is for {}, not {}", f.name(), c.name())));
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(cfg_err("`run` needs a config file naming a command")),
    };
    let format = args.format.or(file.format).unwrap_or_default();
    let output = args.output.clone().or(file.output);
    if format == Format::Both && output.is_none() {
        return Err(cfg_err("--format both needs --output"));
    }
    let config = resolve(command, &file.params, &args.params, format)?;
    Ok((config, args, output))
}

fn read_config(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| cfg_err(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn write_outputs(outcome: &Outcome, format: Format, output: Option<&Path>) -> std::io::Result<()> {
    let json = outcome.report.to_json();
    match format {
        Format::Json => emit(output, &json),
        Format::Csv => emit(output, &outcome.csv),
        Format::Both => {
            let base = output.expect("checked during configuration");
            emit(Some(&base.with_extension("json")), &json)?;
            emit(Some(&base.with_extension("csv")), &outcome.csv)
        }
    }
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::CONFIG } else { exit::PASS };
        }
    };
    let (config, args, output) = match configure(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return exit::CONFIG;
        }
    };
    let exec = if args.sequential { Exec::Sequential } else { Exec::Parallel };
    let start = Instant::now();
    let mut outcome = run(&config, exec);
    if args.timing {
        outcome.report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    if !args.quiet {
        for c in &outcome.report.checks {
            let residual = c.residual.map(|r| format!(" {r:.3e}")).unwrap_or_default();
            eprintln!("{:<4} {}{residual}", c.status.as_str(), c.name);
        }
    }
    if let Err(e) = write_outputs(&outcome, config.format, output.as_deref()) {
        eprintln!("error writing report: {e}");
        return exit::IO;
    }
    if outcome.report.ok() {
        exit::PASS
    } else {
        exit::CHECK_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(v: Value) -> Params {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn complex_flag_syntax() {
        assert_eq!(parse_complex("0.5,-1").unwrap(), Complex64::new(0.5, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("-0.3").unwrap(), Complex64::new(-0.3, 0.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn flags_override_file_and_defaults_fill_in() {
        let file = params(json!({"k1": 0.1, "nmax": 3}));
        let flags = params(json!({"k1": -0.2}));
        let c = resolve(Command::GllVerify, &file, &flags, Format::Json).unwrap();
        assert_eq!(c.params.k1, Some(-0.2));
        assert_eq!(c.params.nmax, Some(3));
        assert_eq!(c.params.lmax, Some(6));
        assert_eq!(c.params.nodes, None);
    }

    #[test]
    fn rejects_unknown_and_unused_keys() {
        let e = serde_json::from_value::<FileConfig>(json!({"params": {"kk": 1}}));
        assert!(e.is_err());
        let e = serde_json::from_value::<FileConfig>(json!({"colour": 1}));
        assert!(e.is_err());
        let flags = params(json!({"nodes": 8}));
        assert!(resolve(Command::DhoSweep, &Params::default(), &flags, Format::Json).is_err());
    }

    #[test]
    fn range_validation() {
        let bad = [
            (Command::GllVerify, json!({"k1": 0.5})),
            (Command::GllVerify, json!({"nmax": 25})),
            (Command::GllRoi, json!({"nodes": 7})),
            (Command::GllRoi, json!({"tol": 0.0})),
            (Command::DhoCheck, json!({"gamma": 3.0})),
            (Command::DhoCheck, json!({"delta": [2.0, 0.0]})),
            (Command::DhoSweep, json!({"n": 0})),
        ];
        for (cmd, v) in bad {
            assert!(resolve(cmd, &Params::default(), &params(v.clone()), Format::Json).is_err(), "{v}");
        }
    }

    #[test]
    fn echo_round_trips_through_file_config() {
        let c = resolve(Command::DhoCheck, &Params::default(), &Params::default(), Format::Csv).unwrap();
        let echo = serde_json::to_value(&c).unwrap();
        let file: FileConfig = serde_json::from_value(echo).unwrap();
        let again = resolve(file.command.unwrap(), &file.params, &Params::default(), file.format.unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn exit_codes_for_usage_errors() {
        assert_eq!(main_with_args(["pseudoboson", "no-such-command"]), exit::CONFIG);
        assert_eq!(main_with_args(["pseudoboson", "gll-verify", "--k1", "0.7"]), exit::CONFIG);
        assert_eq!(main_with_args(["pseudoboson", "run"]), exit::CONFIG);
    }
}
