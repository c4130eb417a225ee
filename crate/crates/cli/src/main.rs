//! Command-line surface: energies, basin scans, criterion checks,
//! threshold constants, and CSV grid scans.
//!
//! Conventions shared by every subcommand: machine-readable results go
//! to stdout (JSON, or CSV written to --out), diagnostics and one-line
//! summaries go to stderr, and every output file gets a manifest
//! sidecar recording the command, parameters, seed, tool version, and
//! timestamp. Exit codes: 0 success/PASS, 1 criterion FAIL, 2 input
//! parse error, 3 flag or precondition error, 4 inapplicable.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use altchain::criteria::CriteriaError;
use altchain::numerics::NumericsError;
use altchain::potentials::PotentialError;
use altchain::{
    basin_scan, check_mass_ratio_window, check_riesz_coefficients,
    check_sufficient_convexity_at_scale, combined_transform, composite_f, decompose, energy,
    fourier_condition, mass_ratio_window, riesz_threshold_exponent, spectrum_values,
    stability_spectrum, window_threshold_exponent, ChainError, Configuration, CriterionReport,
    PotentialTriple, Tolerance, Verdict,
};

#[derive(Parser)]
#[command(name = "altchain", version, about = "Alternating two-species chain toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-particle energy of a configuration under a pair-potential table.
    Energy(EnergyArgs),
    /// Seeded descent from random perturbations of the equidistant chain.
    Minimize(MinimizeArgs),
    /// Crystallization criterion checks with JSON verdicts.
    Check(CheckArgs),
    /// Threshold constants of the power-law family.
    Constants(ConstantsArgs),
    /// Grid scans emitted as two-column CSV plot data.
    Scan(ScanArgs),
}

#[derive(Args)]
struct TolArgs {
    /// Absolute tolerance: certified-remainder target and verdict margin.
    #[arg(long, default_value_t = 1e-10)]
    abs_tol: f64,
    /// Relative tolerance for iterative refinement.
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
    /// Iteration budget for root finding and descent.
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
}

impl TolArgs {
    fn tolerance(&self) -> Result<Tolerance<f64>, Failure> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_iter == 0 {
            return Err(Failure::Precondition(
                "tolerances must be positive and the iteration budget nonzero".into(),
            ));
        }
        Ok(Tolerance {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_iter: self.max_iter,
        })
    }

    fn parameters(&self) -> Value {
        json!({ "abs_tol": self.abs_tol, "rel_tol": self.rel_tol, "max_iter": self.max_iter })
    }
}

#[derive(Args)]
struct TripleArgs {
    /// JSON file holding the three pair components f12, f11, f22.
    #[arg(long, value_name = "FILE", conflicts_with = "p")]
    triple: Option<PathBuf>,
    /// Power-law exponent; alone it selects the sign-neutral table
    /// f12 = r^-p, f11 = f22 = -r^-p.
    #[arg(long)]
    p: Option<f64>,
    /// Coupling strength; with --p it selects f12 = m r^-p,
    /// f11 = -r^-p, f22 = -m^2 r^-p.
    #[arg(long, requires = "p")]
    m: Option<f64>,
    /// Flip the sign of every component before anything else runs.
    #[arg(long)]
    negate: bool,
}

impl TripleArgs {
    fn build(&self) -> Result<PotentialTriple<f64>, Failure> {
        let triple = match (&self.triple, self.p) {
            (Some(path), _) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Failure::Parse(format!("cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str::<PotentialTriple<f64>>(&text)
                    .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?
            }
            (None, Some(p)) => match self.m {
                Some(m) => PotentialTriple::power_law(p, m)?,
                None => PotentialTriple::riesz(p)?,
            },
            (None, None) => {
                return Err(Failure::Precondition(
                    "a potential table is required: pass --triple FILE or --p P [--m M]".into(),
                ))
            }
        };
        triple.validate()?;
        Ok(if self.negate { triple.negate() } else { triple })
    }

    fn parameters(&self) -> Value {
        match (&self.triple, self.p) {
            (Some(path), _) => json!({ "triple": path.display().to_string(), "negate": self.negate }),
            _ => json!({ "p": self.p, "m": self.m, "negate": self.negate }),
        }
    }

    /// Compact tag for CSV column headers, e.g. "p=3;m=1" or "triple=t.json".
    fn label(&self) -> String {
        let mut tag = match (&self.triple, self.p, self.m) {
            (Some(path), _, _) => format!("triple={}", path.display()),
            (None, Some(p), Some(m)) => format!("p={p};m={m}"),
            (None, Some(p), None) => format!("p={p}"),
            (None, None, _) => String::new(),
        };
        if self.negate {
            tag.push_str(";negate");
        }
        tag.replace(',', ";")
    }
}

#[derive(Args)]
struct EnergyArgs {
    /// JSON file with the configuration {"N": .., "rho": .., "gaps": [..]}.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    #[command(flatten)]
    triple: TripleArgs,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
struct MinimizeArgs {
    #[command(flatten)]
    triple: TripleArgs,
    /// Particle count per period (even).
    #[arg(long)]
    n: usize,
    /// Density N / period.
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative gap perturbation amplitude, in [0, 1).
    #[arg(long, default_value_t = 0.3)]
    perturbation: f64,
    /// Per-trial CSV output path; a manifest sidecar lands next to it.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    /// Convex-decomposition grid check of the composite gap function.
    Thm2,
    /// Sign of the leading alternating-sum coefficient.
    Riesz,
    /// Mass-ratio window for the non-neutral power-law table.
    Corollary,
    /// Nonnegativity of the combined cosine transform.
    Fourier,
    /// Second-order response of the equidistant chain.
    Stability,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    criterion: CriterionArg,
    #[command(flatten)]
    triple: TripleArgs,
    /// Density fixing the grid scale for the convexity check (default scale 1).
    #[arg(long)]
    rho: Option<f64>,
    /// Spacing for the stability spectrum.
    #[arg(long, default_value_t = 1.0)]
    ell: f64,
    /// Transform grid upper end; the grid is uniform on [0, k-max].
    #[arg(long, default_value_t = 10.0)]
    k_max: f64,
    /// Grid size for the transform and spectrum checks.
    #[arg(long, default_value_t = 256)]
    points: usize,
    /// Number of leading coefficients for the alternating-sum check.
    #[arg(long, default_value_t = 200)]
    terms: usize,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichConstant {
    /// Exponent where the leading alternating-sum coefficient vanishes.
    P0,
    /// Exponent where the mass-ratio window opens.
    P1,
    /// The window itself; requires --p above p1.
    Mwindow,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, value_enum)]
    which: WhichConstant,
    /// Power-law exponent for --which mwindow.
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    /// Composite gap function of the convex decomposition.
    #[value(name = "F")]
    F,
    /// Second-order response spectrum on q in [0, pi].
    Spectrum,
    /// Combined cosine transform on k in [0, k-max].
    Fourier,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[command(flatten)]
    triple: TripleArgs,
    /// Gap grid lower end for --quantity F.
    #[arg(long, default_value_t = 0.5)]
    r_min: f64,
    /// Gap grid upper end for --quantity F.
    #[arg(long, default_value_t = 5.0)]
    r_max: f64,
    /// Spacing for --quantity spectrum.
    #[arg(long, default_value_t = 1.0)]
    ell: f64,
    /// Grid upper end for --quantity fourier.
    #[arg(long, default_value_t = 10.0)]
    k_max: f64,
    #[arg(long, default_value_t = 256)]
    points: usize,
    /// CSV output path; a manifest sidecar lands next to it.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    tol: TolArgs,
}

/// Failure classes carrying the exit code; criterion FAIL is a verdict,
/// not a failure, and is mapped where reports are printed.
enum Failure {
    Parse(String),
    Precondition(String),
    Inapplicable(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Inapplicable(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Precondition(m) | Failure::Inapplicable(m) => m,
        }
    }
}

impl From<ChainError<f64>> for Failure {
    fn from(e: ChainError<f64>) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<PotentialError<f64>> for Failure {
    fn from(e: PotentialError<f64>) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<NumericsError<f64>> for Failure {
    fn from(e: NumericsError<f64>) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<CriteriaError<f64>> for Failure {
    fn from(e: CriteriaError<f64>) -> Self {
        match e {
            CriteriaError::NotIntegrable(what) => {
                Failure::Inapplicable(format!("{what} is not absolutely integrable"))
            }
            other => Failure::Precondition(other.to_string()),
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    parameters: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    tool_version: String,
    timestamp: String,
}

impl RunManifest {
    fn new(command: &str, parameters: Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.into(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    /// Writes `<out>.manifest.json` next to the output file it describes.
    fn write_beside(&self, out: &Path) -> Result<(), Failure> {
        let mut name = out.as_os_str().to_os_string();
        name.push(".manifest.json");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&name, text + "\n").map_err(|e| {
            Failure::Precondition(format!("cannot write {}: {e}", PathBuf::from(&name).display()))
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let run = match cli.command {
        Command::Energy(a) => cmd_energy(a),
        Command::Minimize(a) => cmd_minimize(a),
        Command::Check(a) => cmd_check(a),
        Command::Constants(a) => cmd_constants(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match run {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serializes")
    );
}

#[derive(Deserialize)]
struct ConfigFile {
    #[serde(rename = "N")]
    n: usize,
    rho: f64,
    gaps: Vec<f64>,
}

/// Two-stage read so that file-format trouble and domain trouble exit
/// differently: unreadable or malformed JSON is a parse failure, while
/// well-formed input violating the chain preconditions (odd N, a gap
/// at or below zero, sum mismatch) is a precondition failure.
fn read_config(path: &Path) -> Result<Configuration<f64>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))?;
    let raw: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    Ok(Configuration::new(raw.n, raw.rho, raw.gaps)?)
}

fn cmd_energy(a: EnergyArgs) -> Result<ExitCode, Failure> {
    let tol = a.tol.tolerance()?;
    let config = read_config(&a.config)?;
    let triple = a.triple.build()?;
    let report = energy(&config, &triple, &tol)?;
    print_json(&report);
    Ok(ExitCode::SUCCESS)
}

fn cmd_minimize(a: MinimizeArgs) -> Result<ExitCode, Failure> {
    let tol = a.tol.tolerance()?;
    let triple = a.triple.build()?;
    let results = basin_scan(a.n, a.rho, &triple, a.trials, a.seed, a.perturbation, &tol)?;

    let mut csv = String::from("trial,converged,final_energy,distance_to_equidistant,iterations\n");
    for (i, r) in results.iter().enumerate() {
        csv.push_str(&format!(
            "{i},{},{},{},{}\n",
            r.converged, r.final_energy, r.distance_to_equidistant, r.iterations
        ));
    }
    fs::write(&a.out, csv)
        .map_err(|e| Failure::Precondition(format!("cannot write {}: {e}", a.out.display())))?;

    let mut parameters = a.triple.parameters();
    let extra = json!({
        "n": a.n, "rho": a.rho, "trials": a.trials,
        "perturbation": a.perturbation, "out": a.out.display().to_string(),
    });
    merge(&mut parameters, extra);
    merge(&mut parameters, a.tol.parameters());
    RunManifest::new("minimize", parameters, Some(a.seed)).write_beside(&a.out)?;

    let threshold = 1e-6;
    let settled = results
        .iter()
        .filter(|r| r.converged && r.distance_to_equidistant <= threshold)
        .count();
    let reference = energy(&Configuration::equidistant(a.n, a.rho)?, &triple, &tol)?;
    let best = results
        .iter()
        .map(|r| r.final_energy)
        .fold(f64::INFINITY, f64::min);
    print_json(&json!({
        "trials": a.trials,
        "fraction_converged": settled as f64 / a.trials as f64,
        "distance_threshold": threshold,
        "min_final_energy": best,
        "equidistant_energy": reference.energy,
    }));
    Ok(ExitCode::SUCCESS)
}

/// Uniform grid over [lo, hi], both ends included.
fn uniform_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, Failure> {
    if points < 2 {
        return Err(Failure::Precondition(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Failure::Precondition(format!(
            "grid bounds must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect())
}

fn report_exit(report: &CriterionReport) -> ExitCode {
    let line = serde_json::to_value(report).expect("report serializes");
    eprintln!(
        "{}: {}",
        line["criterion"].as_str().unwrap_or("?"),
        line["verdict"].as_str().unwrap_or("?")
    );
    print_json(report);
    match report.verdict {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
        Verdict::Inapplicable => ExitCode::from(4),
    }
}

fn cmd_check(a: CheckArgs) -> Result<ExitCode, Failure> {
    let tol = a.tol.tolerance()?;
    let report = match a.criterion {
        CriterionArg::Thm2 => {
            let triple = a.triple.build()?;
            let scale = match a.rho {
                Some(rho) if rho > 0.0 && rho.is_finite() => 1.0 / rho,
                Some(rho) => {
                    return Err(Failure::Precondition(format!(
                        "density must be finite and positive, got {rho}"
                    )))
                }
                None => 1.0,
            };
            check_sufficient_convexity_at_scale(&triple, scale, &tol)?
        }
        CriterionArg::Riesz => {
            let p = a.triple.p.ok_or_else(|| {
                Failure::Precondition("--criterion riesz needs --p".into())
            })?;
            check_riesz_coefficients(p, a.terms, &tol)?
        }
        CriterionArg::Corollary => {
            let (p, m) = match (a.triple.p, a.triple.m) {
                (Some(p), Some(m)) => (p, m),
                _ => {
                    return Err(Failure::Precondition(
                        "--criterion corollary needs --p and --m".into(),
                    ))
                }
            };
            check_mass_ratio_window(p, m)?
        }
        CriterionArg::Fourier => {
            let triple = a.triple.build()?;
            let grid = uniform_grid(0.0, a.k_max, a.points)?;
            fourier_condition(&triple, &grid, &tol)?
        }
        CriterionArg::Stability => {
            let triple = a.triple.build()?;
            if !(a.ell > 0.0) || !a.ell.is_finite() {
                return Err(Failure::Precondition(format!(
                    "spacing must be finite and positive, got {}",
                    a.ell
                )));
            }
            let grid = uniform_grid(0.0, std::f64::consts::PI, a.points)?;
            stability_spectrum(&triple, a.ell, &grid, &tol)?
        }
    };
    Ok(report_exit(&report))
}

fn cmd_constants(a: ConstantsArgs) -> Result<ExitCode, Failure> {
    let tol = a.tol.tolerance()?;
    let out = match a.which {
        WhichConstant::P0 => {
            json!({ "which": "p0", "value": riesz_threshold_exponent(&tol)?, "abs_tol": tol.abs_tol })
        }
        WhichConstant::P1 => {
            json!({ "which": "p1", "value": window_threshold_exponent(&tol)?, "abs_tol": tol.abs_tol })
        }
        WhichConstant::Mwindow => {
            let p = a
                .p
                .ok_or_else(|| Failure::Precondition("--which mwindow needs --p".into()))?;
            let (lo, hi) = mass_ratio_window(p)?;
            json!({ "which": "mwindow", "p": p, "window": [lo, hi], "abs_tol": tol.abs_tol })
        }
    };
    print_json(&out);
    Ok(ExitCode::SUCCESS)
}

fn cmd_scan(a: ScanArgs) -> Result<ExitCode, Failure> {
    let tol = a.tol.tolerance()?;
    let triple = a.triple.build()?;
    let tag = a.triple.label();
    let (header, rows): (String, Vec<(f64, f64)>) = match a.quantity {
        Quantity::F => {
            if !(a.r_min > 0.0) {
                return Err(Failure::Precondition(format!(
                    "gap grid must start above 0, got {}",
                    a.r_min
                )));
            }
            let decomp = decompose(&triple).map_err(|e| match e {
                PotentialError::NoConvexSplit(what) => Failure::Inapplicable(format!(
                    "composite gap function undefined: no convex split ({what})"
                )),
                other => Failure::from(other),
            })?;
            let grid = uniform_grid(a.r_min, a.r_max, a.points)?;
            let mut rows = Vec::with_capacity(grid.len());
            for r in grid {
                rows.push((r, composite_f(&decomp, r)?));
            }
            (format!("r,F[{tag}]"), rows)
        }
        Quantity::Spectrum => {
            if !(a.ell > 0.0) || !a.ell.is_finite() {
                return Err(Failure::Precondition(format!(
                    "spacing must be finite and positive, got {}",
                    a.ell
                )));
            }
            let grid = uniform_grid(0.0, std::f64::consts::PI, a.points)?;
            let values = spectrum_values(&triple, a.ell, &grid, &tol)?;
            (
                format!("q,S[ell={};{tag}]", a.ell),
                grid.into_iter().zip(values).collect(),
            )
        }
        Quantity::Fourier => {
            let grid = uniform_grid(0.0, a.k_max, a.points)?;
            let mut rows = Vec::with_capacity(grid.len());
            for k in grid {
                rows.push((k, combined_transform(&triple, k, &tol)?));
            }
            (format!("k,h[{tag}]"), rows)
        }
    };

    let mut csv = String::with_capacity(rows.len() * 24 + header.len() + 1);
    csv.push_str(&header);
    csv.push('\n');
    for (x, y) in &rows {
        csv.push_str(&format!("{x},{y}\n"));
    }
    let mut file = fs::File::create(&a.out)
        .map_err(|e| Failure::Precondition(format!("cannot write {}: {e}", a.out.display())))?;
    file.write_all(csv.as_bytes())
        .map_err(|e| Failure::Precondition(format!("cannot write {}: {e}", a.out.display())))?;

    let mut parameters = a.triple.parameters();
    let grid_params = match a.quantity {
        Quantity::F => json!({ "quantity": "F", "r_min": a.r_min, "r_max": a.r_max, "points": a.points }),
        Quantity::Spectrum => json!({ "quantity": "spectrum", "ell": a.ell, "points": a.points }),
        Quantity::Fourier => json!({ "quantity": "fourier", "k_max": a.k_max, "points": a.points }),
    };
    merge(&mut parameters, grid_params);
    merge(&mut parameters, a.tol.parameters());
    merge(&mut parameters, json!({ "out": a.out.display().to_string() }));
    RunManifest::new("scan", parameters, None).write_beside(&a.out)?;

    eprintln!("wrote {} rows to {}", rows.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

/// Shallow-merges `extra`'s keys into `base` (both must be objects).
fn merge(base: &mut Value, extra: Value) {
    if let (Value::Object(b), Value::Object(e)) = (base, extra) {
        b.extend(e);
    }
}
