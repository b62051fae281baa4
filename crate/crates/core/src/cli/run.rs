use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::config::{Mode, RunConfig};
use super::selftest::{selftest, SelftestCase};
use super::{CliError, EXIT_OK, EXIT_VERDICT};
use crate::backward_solver::{recover_source, BackwardProblem};
use crate::forward_solver::{
    solve_forward, CompatibilityReport, ForwardProblem, ForwardSolution, SolutionField, SpatialFn,
};
use crate::fractional_ops::DNMultiOrder;
use crate::special_functions::gamma;
use crate::spectral_basis::{BasisId, SpectralCoeffs};
use crate::verification::{
    boundary_residual, heat_oracle, initial_check_horizon, initial_residual, oracle_agreement, pde_residual,
    OracleAgreement, ResidualReport,
};

/// Grid times of the short run behind the initial residual.
const INITIAL_CHECK_NT: usize = 64;

/// Contents of report.json.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub mode: Mode,
    pub config: RunConfig,
    pub pass: bool,
    pub wall_clock_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_estimate: Option<f64>,
    pub compatibility: BTreeMap<String, CompatibilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleAgreement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roundtrip_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_amplification: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut_modes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selftest: Option<Vec<SelftestCase>>,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(config: &RunConfig) -> Self {
        Self {
            mode: config.mode,
            config: config.clone(),
            pass: true,
            wall_clock_s: 0.0,
            tail_estimate: None,
            compatibility: BTreeMap::new(),
            residuals: None,
            oracle: None,
            roundtrip_l2: None,
            psi_l2: None,
            max_amplification: None,
            cut_modes: None,
            selftest: None,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: u8,
}

/// Options that are not part of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory that relative csv paths are resolved against.
    pub base_dir: std::path::PathBuf,
    pub allow_incompatible: bool,
}

/// Runs the pipeline, prints diagnostics to stderr and returns the exit code.
pub fn run(config: &RunConfig, options: &RunOptions) -> u8 {
    match execute(config, options) {
        Ok(outcome) => {
            if !outcome.report.pass {
                eprintln!("dnspectral: verdict failed; see {}", config.output_dir.join("report.json").display());
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("dnspectral: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(config: &RunConfig, options: &RunOptions) -> Result<Outcome, CliError> {
    let violations = config.violations();
    if !violations.is_empty() {
        return Err(CliError::Invalid(violations));
    }
    let start = Instant::now();
    let mut report = Report::new(config);
    match config.mode {
        Mode::Selftest => {
            let cases = selftest();
            for c in &cases {
                println!("{} {} ({:.3} s) {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.seconds, c.detail);
            }
            report.pass = cases.iter().all(|c| c.pass);
            report.selftest = Some(cases);
        }
        Mode::Forward => forward(config, options, &mut report)?,
        Mode::Verify => verify(config, options, &mut report)?,
        Mode::Backward => backward(config, options, &mut report)?,
    }
    report.wall_clock_s = start.elapsed().as_secs_f64();
    if config.mode != Mode::Selftest {
        let path = config.output_dir.join("report.json");
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(&path, text + "\n").map_err(|source| CliError::Io { path, source })?;
    }
    let exit_code = match config.mode {
        Mode::Verify | Mode::Selftest if !report.pass => EXIT_VERDICT,
        _ => EXIT_OK,
    };
    Ok(Outcome { report, exit_code })
}

struct Inputs {
    phi: SpatialFn,
    psi: Option<SpatialFn>,
    f: Option<SpatialFn>,
}

fn inputs(config: &RunConfig, base: &Path) -> Result<Inputs, CliError> {
    let resolve = |d: &Option<super::FunctionDescriptor>| d.as_ref().map(|d| d.resolve(base)).transpose();
    let phi = resolve(&config.phi_spec)?.unwrap_or_else(|| std::sync::Arc::new(|_| 0.0));
    Ok(Inputs { phi, psi: resolve(&config.psi_spec)?, f: resolve(&config.f_spec)? })
}

fn prepare_output(config: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|source| CliError::Io { path: config.output_dir.clone(), source })
}

fn forward_problem(config: &RunConfig, options: &RunOptions, inputs: &Inputs, nt: usize) -> ForwardProblem {
    let mut p = ForwardProblem::new(config.alpha0, config.alpha1, config.horizon, inputs.phi.clone())
        .with_modes(config.n_modes)
        .with_grid(config.nx, nt);
    if let Some(f) = &inputs.f {
        p = p.with_source(f.clone());
    }
    p.allow_incompatible = options.allow_incompatible;
    p
}

fn classical(config: &RunConfig) -> bool {
    config.alpha0 == 1.0 && config.alpha1 == 1.0
}

fn compare_with_heat(config: &RunConfig, inputs: &Inputs, field: &SolutionField) -> Result<OracleAgreement, CliError> {
    let f = inputs.f.as_ref().map(|f| f.as_ref() as &dyn Fn(f64) -> f64);
    let oracle = heat_oracle(inputs.phi.as_ref(), f, config.horizon, field.nx(), field.nt())?;
    Ok(oracle_agreement(field, &oracle, config.tolerances.oracle)?)
}

fn record_forward(report: &mut Report, sol: &ForwardSolution) {
    report.tail_estimate = Some(sol.tail_estimate);
    report.compatibility.insert("phi".into(), sol.compatibility.clone());
    report.warnings.extend(sol.warnings.iter().cloned());
}

fn forward(config: &RunConfig, options: &RunOptions, report: &mut Report) -> Result<(), CliError> {
    let inputs = inputs(config, &options.base_dir)?;
    let sol = solve_forward(&forward_problem(config, options, &inputs, config.nt))?;
    record_forward(report, &sol);
    if classical(config) {
        let agreement = compare_with_heat(config, &inputs, &sol.field)?;
        report.pass = agreement.pass;
        report.oracle = Some(agreement);
    }
    prepare_output(config)?;
    write_field(&config.output_dir, &sol.field, 1)?;
    let u_t = sol.u_coeffs.last().expect("nt >= 1");
    write_coeffs(&config.output_dir, &sol.phi_coeffs, None, &sol.f_coeffs, u_t, None)
}

fn verify(config: &RunConfig, options: &RunOptions, report: &mut Report) -> Result<(), CliError> {
    let inputs = inputs(config, &options.base_dir)?;
    let stride = config.tolerances.verify_steps.div_ceil(config.nt);
    let steps = stride * config.nt;
    let sol = solve_forward(&forward_problem(config, options, &inputs, steps))?;
    record_forward(report, &sol);
    let order = DNMultiOrder::pair(config.alpha0, config.alpha1)?;
    let f_sync = inputs.f.as_ref().map(|f| f.as_ref() as &(dyn Fn(f64) -> f64 + Sync));
    let pde = pde_residual(&sol.field, f_sync, &order, steps)?;
    let boundary = boundary_residual(&sol.field);
    let mut short = forward_problem(config, options, &inputs, INITIAL_CHECK_NT);
    short.horizon = initial_check_horizon(config.alpha0, config.alpha1, INITIAL_CHECK_NT);
    let initial = initial_residual(&solve_forward(&short)?.field, inputs.phi.as_ref())?;
    let max_abs_f = inputs.f.as_ref().map_or(0.0, |f| sol.field.x_grid.iter().map(|&x| f(x).abs()).fold(0.0, f64::max));
    let residuals = ResidualReport::new(&sol.field, &pde, boundary, &initial, max_abs_f, config.tolerances.residual());
    report.pass = residuals.verdicts.all();
    report.residuals = Some(residuals);
    if classical(config) {
        let agreement = compare_with_heat(config, &inputs, &sol.field)?;
        report.pass &= agreement.pass;
        report.oracle = Some(agreement);
    }
    prepare_output(config)?;
    write_field(&config.output_dir, &sol.field, stride)?;
    let u_t = sol.u_coeffs.last().expect("nt >= 1");
    write_coeffs(&config.output_dir, &sol.phi_coeffs, None, &sol.f_coeffs, u_t, None)
}

fn backward(config: &RunConfig, options: &RunOptions, report: &mut Report) -> Result<(), CliError> {
    let inputs = inputs(config, &options.base_dir)?;
    let psi = inputs.psi.clone().expect("validated: psi present in backward mode");
    let mut p = BackwardProblem::new(config.alpha0, config.alpha1, config.horizon, inputs.phi.clone(), psi)
        .with_modes(config.n_modes)
        .with_grid(config.nx, config.nt);
    if let Some(c) = config.cutoff_amplification {
        p = p.with_cutoff(c);
    }
    p.allow_incompatible = options.allow_incompatible;
    let rec = recover_source(&p)?;
    let r = &rec.report;
    report.compatibility.insert("phi".into(), r.phi_compatibility.clone());
    report.compatibility.insert("psi".into(), r.psi_compatibility.clone());
    report.warnings.extend(r.warnings.iter().cloned());
    report.roundtrip_l2 = Some(r.roundtrip_l2);
    report.psi_l2 = Some(r.psi_l2);
    report.cut_modes = Some(r.cut_modes.clone());
    report.max_amplification = Some(rec.amplification.iter().copied().fold(0.0, f64::max));
    report.pass = r.roundtrip_l2 <= config.tolerances.roundtrip * r.psi_l2.max(1.0);
    prepare_output(config)?;
    write_field(&config.output_dir, &rec.u_field, 1)?;
    // The root mode is amplified by Gamma(a0 + a1) / T^rho.
    let rho = config.alpha0 + config.alpha1 - 1.0;
    let root_amp = gamma(config.alpha0 + config.alpha1)? / config.horizon.powf(rho);
    let mut amp = vec![root_amp];
    amp.extend(&rec.amplification);
    write_coeffs(
        &config.output_dir,
        &rec.phi_coeffs,
        Some(&rec.psi_coeffs),
        &rec.f_coeffs,
        &rec.u_final_coeffs,
        Some(&amp),
    )
}

fn create(dir: &Path, name: &str) -> Result<(BufWriter<File>, std::path::PathBuf), CliError> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok((BufWriter::new(file), path))
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// u.csv: every `stride`-th grid time, rows sorted by (t, x).
fn write_field(dir: &Path, field: &SolutionField, stride: usize) -> Result<(), CliError> {
    let (mut w, path) = create(dir, "u.csv")?;
    let err = io(&path);
    writeln!(w, "t,x,u,weighted_u").map_err(&err)?;
    for i in (stride - 1..field.nt()).step_by(stride) {
        let t = field.t_grid[i];
        for (j, x) in field.x_grid.iter().enumerate() {
            writeln!(w, "{t:e},{x:e},{:e},{:e}", field.values[i][j], field.weighted[i][j]).map_err(&err)?;
        }
    }
    w.flush().map_err(&err)
}

fn write_coeffs(
    dir: &Path,
    phi: &SpectralCoeffs,
    psi: Option<&SpectralCoeffs>,
    f: &SpectralCoeffs,
    u_t: &SpectralCoeffs,
    amplification: Option<&[f64]>,
) -> Result<(), CliError> {
    let (mut w, path) = create(dir, "coeffs.csv")?;
    let err = io(&path);
    writeln!(w, "family,k,phi,psi,f,u_at_T,amplification").map_err(&err)?;
    for id in SpectralCoeffs::ids(phi.n()) {
        let family = match id {
            BasisId::Root => "root",
            BasisId::Cosine(_) => "cosine",
            BasisId::Sine(_) => "sine",
        };
        let psi_cell = psi.map(|c| format!("{:e}", c.get(id))).unwrap_or_default();
        let amp_cell = amplification.map(|a| format!("{:e}", a[id.k()])).unwrap_or_default();
        writeln!(w, "{family},{},{:e},{psi_cell},{:e},{:e},{amp_cell}", id.k(), phi.get(id), f.get(id), u_t.get(id))
            .map_err(&err)?;
    }
    w.flush().map_err(&err)
}
