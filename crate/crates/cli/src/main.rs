//! `grscat`: JSON-driven command-line front end for the scattering
//! toolkit.  Every command loads UTF-8 JSON inputs, dispatches to the core
//! library, prints a human-readable check table on stderr and emits a
//! deterministic machine-readable report (or series/colligation payload)
//! on stdout or `--out`.  Exit codes: 0 all checks pass, 1 a mathematical
//! check failed, 2 input or usage error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use gr_scattering_core::agler::{
    agler_factors, augmented_decomposition_residual, cdp_residual, dbr_kernels, dbr_mixed_form,
    scattering_decomposition_residual,
};
use gr_scattering_core::colligation::{
    classify_minimality, transfer_coefficients, ColligationJson, GRColligation,
};
use gr_scattering_core::error::CoreError;
use gr_scattering_core::kernels::{overlap_basis, KernelFactor};
use gr_scattering_core::lattice::{IndexBox, MultiIndex, Sublattice};
use gr_scattering_core::laurent::{LaurentMatrixSeries, SeriesJson};
use gr_scattering_core::matrix::CVec;
use gr_scattering_core::realization::{build_u0, realize_scc, redheffer_close, verify_compatibility};
use gr_scattering_core::scattering::{
    energy_balance, impulse_response, schaffer_apply, simulate_backward, simulate_forward,
    upper_ghost_boundary, ScatteringVector, TrajectoryWindow,
};

#[derive(Parser)]
#[command(name = "grscat", version, about = "Multidimensional scattering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural residuals of a colligation file.
    Validate {
        path: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the transfer-function coefficients as series JSON.
    Transfer {
        path: PathBuf,
        #[arg(long, default_value_t = 4)]
        degree: i64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the augmented Agler identity, the kernel CDP and the
    /// scattering-space decomposition on a box.
    AglerVerify {
        path: PathBuf,
        /// Verification box, one `lo..hi` range per axis.
        #[arg(long = "box", value_name = "LO..HI,...", allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, value_enum, default_value_t = OmegaArg::Balanced)]
        omega: OmegaArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a colligation against the minimality taxonomy and
    /// cross-check the overlap-space characterization.
    Classify {
        path: PathBuf,
        /// Witness-search window, one `lo..hi` range per axis.
        #[arg(long = "cert-window", value_name = "LO..HI,...", allow_hyphen_values = true)]
        cert_window: Option<String>,
        #[arg(long = "cert-depth", default_value_t = 6)]
        cert_depth: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the realization problem for a decomposition-system file; with
    /// `--load`, close the Redheffer loop against a load colligation.
    Realize {
        path: PathBuf,
        #[arg(long)]
        load: Option<PathBuf>,
        /// Compatibility-check box, one `lo..hi` range per axis.
        #[arg(long = "box", value_name = "LO..HI,...", allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run lattice simulations: sweeps, impulse response, Schaffer checks.
    Simulate {
        path: PathBuf,
        #[arg(long, value_enum)]
        mode: SimMode,
        /// Scenario JSON for the forward/backward sweeps.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        degree: i64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OmegaArg {
    Quadrant,
    Balanced,
    Full,
    Empty,
}

impl OmegaArg {
    fn sublattice(self) -> Sublattice {
        match self {
            OmegaArg::Quadrant => Sublattice::Quadrant,
            OmegaArg::Balanced => Sublattice::Balanced,
            OmegaArg::Full => Sublattice::Full,
            OmegaArg::Empty => Sublattice::Empty,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SimMode {
    Forward,
    Backward,
    Impulse,
    SchafferCheck,
}

/// A failure routed to an exit code: input/usage errors exit 2,
/// mathematical failures exit 1.
enum Failure {
    Input(String),
    Math(String),
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::DimensionMismatch { .. }
            | CoreError::ShapeMismatch { .. }
            | CoreError::InvalidArgument(_)
            | CoreError::MissingBoundaryData { .. } => Failure::Input(err.to_string()),
            _ => Failure::Math(err.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    threshold: f64,
    pass: bool,
}

impl Check {
    fn new(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    /// A boolean assertion encoded as a `{0, 1}` residual.
    fn flag(name: &str, ok: bool) -> Self {
        Check::new(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }
}

#[derive(Serialize)]
struct BoxJson {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl BoxJson {
    fn from_box(b: &IndexBox) -> Self {
        BoxJson {
            lo: b.lo().to_vec(),
            hi: b.hi().to_vec(),
        }
    }
}

#[derive(Serialize)]
struct Report {
    command: String,
    inputs: Vec<InputDigest>,
    results: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    safe_window: Option<BoxJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    details: serde_json::Value,
}

impl Report {
    fn new(command: &str, inputs: Vec<InputDigest>) -> Self {
        Report {
            command: command.to_string(),
            inputs,
            results: Vec::new(),
            safe_window: None,
            seed: None,
            details: serde_json::Value::Null,
        }
    }

    fn pass(&self) -> bool {
        self.results.iter().all(|c| c.pass)
    }

    /// Print the human-readable table on stderr and the JSON document on
    /// stdout or `out`, then map the verdict to an exit code.
    fn finish(&self, out: Option<&Path>) -> CliResult<()> {
        for check in &self.results {
            eprintln!(
                "{:<40} {:>12.3e} <= {:>8.1e}  {}",
                check.name,
                check.value,
                check.threshold,
                if check.pass { "pass" } else { "FAIL" }
            );
        }
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        write_output(out, &text)?;
        if self.pass() {
            Ok(())
        } else {
            Err(Failure::Math("one or more checks failed".into()))
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<(T, InputDigest)> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes).map_err(|e| {
        Failure::Input(format!(
            "malformed JSON in {} at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let digest = Sha256::digest(&bytes);
    let sha256: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok((
        value,
        InputDigest {
            path: path.display().to_string(),
            sha256,
        },
    ))
}

/// Load a colligation and fail (exit 1) unless it validates.
fn load_colligation(path: &Path, tol: f64) -> CliResult<(GRColligation, InputDigest)> {
    let (json, digest): (ColligationJson, _) = read_json(path)?;
    let col = GRColligation::from_json(&json)?;
    let report = col.validate();
    if !report.pass(tol) {
        return Err(Failure::Math(format!(
            "{} is not a valid unitary GR colligation (worst residual {:.3e})",
            path.display(),
            report.max_residual()
        )));
    }
    Ok((col, digest))
}

/// Parse a box spec `lo..hi,lo..hi,...` with one range per axis.
fn parse_box(spec: &str) -> CliResult<IndexBox> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in spec.split(',') {
        let (a, b) = part
            .split_once("..")
            .ok_or_else(|| Failure::Input(format!("bad box range '{part}', expected lo..hi")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| Failure::Input(format!("bad box bound '{s}'")))
        };
        lo.push(parse(a)?);
        hi.push(parse(b)?);
    }
    Ok(IndexBox::new(lo, hi)?)
}

fn box_or_default(spec: Option<&str>, d: usize, radius: i64) -> CliResult<IndexBox> {
    let window = match spec {
        Some(s) => parse_box(s)?,
        None => IndexBox::centered(d, radius),
    };
    if window.dim() != d {
        return Err(Failure::Input(format!(
            "box has {} axes but the colligation has d = {d}",
            window.dim()
        )));
    }
    Ok(window)
}

/// Decomposition-system wire schema: transfer coefficients plus one
/// factor symbol per axis, each stored as series JSON.
#[derive(serde::Deserialize, Serialize)]
struct SystemJson {
    out_dim: usize,
    in_dim: usize,
    transfer: SeriesJson,
    factors: Vec<SeriesJson>,
}

fn factor_from_series(series: &SeriesJson) -> CliResult<KernelFactor> {
    let parsed = LaurentMatrixSeries::from_json(series)?;
    let mut factor = KernelFactor::zero(series.d, series.shape[0], series.shape[1]);
    for n in parsed.support() {
        factor.set(n.clone(), parsed.coeff(n));
    }
    Ok(factor)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate { path, tol, out } => cmd_validate(&path, tol, out.as_deref()),
        Command::Transfer {
            path,
            degree,
            tol,
            out,
        } => cmd_transfer(&path, degree, tol, out.as_deref()),
        Command::AglerVerify {
            path,
            window,
            omega,
            tol,
            out,
        } => cmd_agler_verify(&path, window.as_deref(), omega, tol, out.as_deref()),
        Command::Classify {
            path,
            cert_window,
            cert_depth,
            tol,
            out,
        } => cmd_classify(&path, cert_window.as_deref(), cert_depth, tol, out.as_deref()),
        Command::Realize {
            path,
            load,
            window,
            tol,
            out,
        } => cmd_realize(&path, load.as_deref(), window.as_deref(), tol, out.as_deref()),
        Command::Simulate {
            path,
            mode,
            scenario,
            degree,
            trials,
            seed,
            tol,
            out,
        } => cmd_simulate(
            &path,
            mode,
            scenario.as_deref(),
            degree,
            trials,
            seed,
            tol,
            out.as_deref(),
        ),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_validate(path: &Path, tol: f64, out: Option<&Path>) -> CliResult<()> {
    let (json, digest): (ColligationJson, _) = read_json(path)?;
    let col = GRColligation::from_json(&json)?;
    let v = col.validate();
    let mut report = Report::new("validate", vec![digest]);
    report.results = vec![
        Check::new("projection idempotency", v.projection_idempotent, tol),
        Check::new("projection self-adjointness", v.projection_hermitian, tol),
        Check::new("projection mutual orthogonality", v.projection_mutual, tol),
        Check::new("projection partition of identity", v.projection_sum, tol),
        Check::new("connecting matrix unitarity", v.unitarity, tol),
    ];
    report.finish(out)
}

fn cmd_transfer(path: &Path, degree: i64, tol: f64, out: Option<&Path>) -> CliResult<()> {
    let (col, _) = load_colligation(path, tol)?;
    let series = transfer_coefficients(&col, degree);
    eprintln!(
        "transfer coefficients to total degree {degree}: {} nonzero terms",
        series.support().count()
    );
    let text = serde_json::to_string_pretty(&series.to_json()).expect("series serializes");
    write_output(out, &text)
}

fn cmd_agler_verify(
    path: &Path,
    window_spec: Option<&str>,
    omega: OmegaArg,
    tol: f64,
    out: Option<&Path>,
) -> CliResult<()> {
    let (col, digest) = load_colligation(path, tol)?;
    let window = box_or_default(window_spec, col.dim(), 2)?;
    let mut report = Report::new("agler-verify", vec![digest]);
    report.safe_window = Some(BoxJson::from_box(&window));
    report
        .results
        .push(Check::new("colligation validation", col.validate().max_residual(), tol));
    report.results.push(Check::new(
        "augmented Agler identity",
        augmented_decomposition_residual(&col, &window)?,
        tol,
    ));
    report.results.push(Check::new(
        "kernel cocycle-defect-propagation",
        cdp_residual(&col, &window)?,
        tol,
    ));
    match omega {
        OmegaArg::Balanced => {
            report.results.push(Check::new(
                "scattering-space decomposition (balanced)",
                scattering_decomposition_residual(&col, &window)?,
                tol,
            ));
        }
        other => {
            // The cross-section decomposition is specific to the balanced
            // half-space; other sublattices get the structural dBR check.
            let kernels = dbr_kernels(&col, other.sublattice(), &window)?;
            let mixed = dbr_mixed_form(&col, other.sublattice(), &window)?;
            report.results.push(Check::new(
                "dBR scattering kernel vs mixed form",
                kernels.scattering.max_deviation(&mixed)?,
                tol,
            ));
        }
    }
    report.finish(out)
}

fn cmd_classify(
    path: &Path,
    cert_window_spec: Option<&str>,
    cert_depth: usize,
    tol: f64,
    out: Option<&Path>,
) -> CliResult<()> {
    let (col, digest) = load_colligation(path, tol)?;
    let cert_window = box_or_default(cert_window_spec, col.dim(), 2)?;
    let class = classify_minimality(&col, &cert_window, cert_depth)?;

    // Overlap cross-check: zero unshifted/shifted overlap must agree with
    // the strict/shifted-strict Krylov booleans.
    let factors = agler_factors(&col, col.state_dim() as i64 + 2);
    let unshifted = overlap_basis(&factors, false)?.dim();
    let shifted = overlap_basis(&factors, true)?.dim();

    let mut report = Report::new("classify", vec![digest]);
    report.safe_window = Some(BoxJson::from_box(&cert_window));
    report.results = vec![
        Check::flag("closely connected iff cc_dim full", class.closely_connected == (class.cc_dim == class.state_dim)),
        Check::flag(
            "overlap cross-check (unshifted vs scc)",
            (unshifted == 0) == class.strictly_closely_connected,
        ),
        Check::flag(
            "overlap cross-check (shifted vs sscc)",
            (shifted == 0) == class.shifted_strictly_closely_connected,
        ),
    ];
    if let Some(witness) = &class.scattering_witness {
        let residual = gr_scattering_core::colligation::witness_residual(
            &col,
            witness,
            cert_depth * 2,
        )?;
        report
            .results
            .push(Check::new("scattering witness residual", residual, 1e-8));
    }
    report.details = serde_json::json!({
        "state_dim": class.state_dim,
        "cc_dim": class.cc_dim,
        "scc_dim": class.scc_dim,
        "sscc_dim": class.sscc_dim,
        "closely_connected": class.closely_connected,
        "strictly_closely_connected": class.strictly_closely_connected,
        "shifted_strictly_closely_connected": class.shifted_strictly_closely_connected,
        "overlap_dim_unshifted": unshifted,
        "overlap_dim_shifted": shifted,
        "scattering_minimal_on_window": class.scattering_defect_dim == 0,
        "scattering_defect_dim": class.scattering_defect_dim,
        "cert_depth": class.cert_depth,
    });
    report.finish(out)
}

fn cmd_realize(
    path: &Path,
    load: Option<&Path>,
    window_spec: Option<&str>,
    tol: f64,
    out: Option<&Path>,
) -> CliResult<()> {
    let (system, mut digests): (SystemJson, _) = {
        let (s, d) = read_json::<SystemJson>(path)?;
        (s, vec![d])
    };
    let transfer = LaurentMatrixSeries::from_json(&system.transfer)?;
    let factors = system
        .factors
        .iter()
        .map(factor_from_series)
        .collect::<CliResult<Vec<_>>>()?;
    let window = box_or_default(window_spec, transfer.dim(), 2)?;

    let col = match load {
        None => realize_scc(&factors, &transfer, system.out_dim, system.in_dim)?,
        Some(load_path) => {
            let (load_json, load_digest): (ColligationJson, _) = read_json(load_path)?;
            digests.push(load_digest);
            let load_col = GRColligation::from_json(&load_json)?;
            let u0 = build_u0(&factors, &transfer, system.out_dim, system.in_dim)?;
            redheffer_close(&u0, &load_col)?
        }
    };

    let compat = verify_compatibility(&col, &factors, &transfer, &window)?;
    let mut report = Report::new("realize", digests);
    report.safe_window = Some(BoxJson::from_box(&window));
    report.results = vec![
        Check::new("realized colligation validation", col.validate().max_residual(), tol),
        Check::new("transfer compatibility", compat.transfer_residual, tol),
    ];
    for (k, res) in compat.kernel_residuals.iter().enumerate() {
        report
            .results
            .push(Check::new(&format!("factor kernel {k} compatibility"), *res, tol));
    }
    report.details = serde_json::json!({
        "colligation": col.to_json(),
        "state_dim": col.state_dim(),
    });
    report.finish(out)
}

#[derive(serde::Deserialize)]
struct SiteVectorJson {
    site: Vec<i64>,
    /// Complex entries as `[re, im]` pairs.
    vector: Vec<[f64; 2]>,
}

#[derive(serde::Deserialize)]
struct ScenarioJson {
    lo: Vec<i64>,
    hi: Vec<i64>,
    #[serde(default)]
    inputs: Vec<SiteVectorJson>,
    #[serde(default)]
    outputs: Vec<SiteVectorJson>,
    /// One list of state vectors per axis: lower faces for the forward
    /// sweep, upper ghost faces for the backward sweep.
    boundary: Vec<Vec<SiteVectorJson>>,
}

fn site_map(entries: &[SiteVectorJson]) -> BTreeMap<MultiIndex, CVec> {
    entries
        .iter()
        .map(|e| {
            (
                MultiIndex(e.site.clone()),
                CVec::from_iterator(
                    e.vector.len(),
                    e.vector.iter().map(|[re, im]| Complex64::new(*re, *im)),
                ),
            )
        })
        .collect()
}

fn trajectory_json(traj: &TrajectoryWindow) -> serde_json::Value {
    let dump = |data: &BTreeMap<MultiIndex, CVec>| -> Vec<serde_json::Value> {
        data.iter()
            .map(|(n, v)| {
                serde_json::json!({
                    "site": n.0.clone(),
                    "vector": v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                })
            })
            .collect()
    };
    serde_json::json!({
        "lo": traj.window.lo().to_vec(),
        "hi": traj.window.hi().to_vec(),
        "states": dump(&traj.states),
        "inputs": dump(&traj.inputs),
        "outputs": dump(&traj.outputs),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &Path,
    mode: SimMode,
    scenario: Option<&Path>,
    degree: i64,
    trials: usize,
    seed: u64,
    tol: f64,
    out: Option<&Path>,
) -> CliResult<()> {
    let (col, digest) = load_colligation(path, 1e-10)?;
    match mode {
        SimMode::Impulse => {
            let series = impulse_response(&col, degree)?;
            let direct = transfer_coefficients(&col, degree);
            let mut report = Report::new("simulate impulse", vec![digest]);
            report.results = vec![Check::new(
                "impulse response vs transfer coefficients",
                series.max_deviation(&direct)?,
                tol,
            )];
            report.details = serde_json::json!({ "series": series.to_json() });
            report.finish(out)
        }
        SimMode::Forward | SimMode::Backward => {
            let scenario_path = scenario.ok_or_else(|| {
                Failure::Input("forward/backward simulation requires --scenario".into())
            })?;
            let (scn, scn_digest): (ScenarioJson, _) = read_json(scenario_path)?;
            let window = IndexBox::new(scn.lo.clone(), scn.hi.clone())?;
            let boundary: Vec<BTreeMap<MultiIndex, CVec>> =
                scn.boundary.iter().map(|face| site_map(face)).collect();
            let traj = match mode {
                SimMode::Forward => {
                    simulate_forward(&col, &window, &site_map(&scn.inputs), &boundary)?
                }
                _ => simulate_backward(&col, &window, &site_map(&scn.outputs), &boundary)?,
            };
            let mut report = Report::new(
                match mode {
                    SimMode::Forward => "simulate forward",
                    _ => "simulate backward",
                },
                vec![digest, scn_digest],
            );
            report.safe_window = Some(BoxJson::from_box(&window));
            report.results = vec![Check::new(
                "sitewise energy balance",
                energy_balance(&col, &traj),
                tol,
            )];
            let mut details = trajectory_json(&traj);
            if matches!(mode, SimMode::Forward) {
                let ghost = upper_ghost_boundary(&col, &traj);
                details["ghost_boundary"] = serde_json::json!(ghost
                    .iter()
                    .map(|face| face
                        .iter()
                        .map(|(n, v)| serde_json::json!({
                            "site": n.0.clone(),
                            "vector": v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                        }))
                        .collect::<Vec<_>>())
                    .collect::<Vec<_>>());
            }
            report.details = details;
            report.finish(out)
        }
        SimMode::SchafferCheck => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst_iso = 0.0f64;
            let mut worst_comm = 0.0f64;
            for _ in 0..trials {
                let vec = random_scattering_vector(&mut rng, &col);
                let norm = vec.norm_sq();
                for k in 0..col.dim() {
                    let moved = schaffer_apply(&col, k, &vec)?;
                    worst_iso = worst_iso.max((moved.norm_sq() - norm).abs() / norm.max(1.0));
                }
                for k in 0..col.dim() {
                    for j in k + 1..col.dim() {
                        let kj = schaffer_apply(&col, k, &schaffer_apply(&col, j, &vec)?)?;
                        let jk = schaffer_apply(&col, j, &schaffer_apply(&col, k, &vec)?)?;
                        worst_comm = worst_comm.max(kj.max_deviation(&jk));
                    }
                }
            }
            let mut report = Report::new("simulate schaffer-check", vec![digest]);
            report.seed = Some(seed);
            report.results = vec![
                Check::new("Schaffer evolution isometry", worst_iso, tol),
                Check::new("Schaffer evolution commutation", worst_comm, tol),
            ];
            report.finish(out)
        }
    }
}

fn random_scattering_vector<R: Rng>(rng: &mut R, col: &GRColligation) -> ScatteringVector {
    let d = col.dim();
    let mut vec = ScatteringVector::default();
    let random_cvec = |rng: &mut R, len: usize| {
        CVec::from_iterator(
            len,
            (0..len).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)),
        )
    };
    for _ in 0..4 {
        let mut site: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        let total: i64 = site.iter().sum();
        site[0] -= total + 1 + rng.gen_range(0..2);
        vec.e_star
            .insert(MultiIndex(site), random_cvec(rng, col.out_dim()));

        let mut site: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        let total: i64 = site.iter().sum();
        site[0] -= total;
        vec.xi
            .insert(MultiIndex(site), random_cvec(rng, col.state_dim()));

        let mut site: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        let total: i64 = site.iter().sum();
        site[0] += -total + rng.gen_range(0..3);
        vec.e.insert(MultiIndex(site), random_cvec(rng, col.in_dim()));
    }
    vec
}
