use std::path::PathBuf;

use ising_core::chi::{chi_n, chi_n_reduced, ChiTerm, DEFAULT_BUDGET};
use ising_core::correlation::{correlation_contour, CorrelationResult};
use ising_core::formfactor::correlation_ff;
use ising_core::fredholm::fredholm_correlation;
use ising_core::hull::{
    active_vectors, hull_distance, lemma1_randomized_verify, ratio_monotonicity_check, HullCertificate,
    TorusConfiguration, DEFAULT_MAX_ITER,
};
use ising_core::identities::{identity_battery, Tolerances};
use ising_core::nickel::{density_table, enumerate_with, is_nickel_with};
use ising_core::quadrature::ContourGrid;
use ising_core::scan::{divergence_indicator, ray_scan, ScanPolicy};
use ising_core::spectral::{self, magnetization, GammaBranch};
use ising_core::SpectralPoint;
use num_complex::Complex64;
use serde_json::json;

use crate::config::{parse_complex_list, Format, KvFile, RunConfig};
use crate::error::CliError;
use crate::output::{num, write_csv, write_json, NumericRecord};
use crate::{ChiRouteArg, CorrMethod};

/// Largest node count accepted for the 8-dimensional tensor route.
const MAX_M_HIGH_ORDER: usize = 16;

fn json_only(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.output_format == Some(Format::Csv) {
        return Err(CliError::Input("this command writes JSON only".into()));
    }
    Ok(())
}

fn emit(cfg: &RunConfig, value: &impl serde::Serialize) -> Result<(), CliError> {
    json_only(cfg)?;
    write_json(value, cfg.output_path.as_deref())
}

pub fn gamma(cfg: &RunConfig, s: Complex64, z: Complex64) -> Result<(), CliError> {
    let sp = SpectralPoint::new(s)?;
    let g = spectral::gamma(z, &sp)?;
    let branch = match g.branch {
        GammaBranch::Principal => json!("principal"),
        GammaBranch::Reflected => json!("reflected"),
        GammaBranch::Degenerate { plus, minus } => json!({
            "degenerate": { "plus_re": plus.re, "plus_im": plus.im, "minus_re": minus.re, "minus_im": minus.im }
        }),
    };
    let rec = NumericRecord::new(g.value, 0.0, "closed_form")
        .complex_param("s", s)
        .complex_param("z", z)
        .extra("branch", branch)
        .extra("branch_flag", g.branch_flag());
    emit(cfg, &rec)
}

pub fn mag(cfg: &RunConfig, s: Complex64) -> Result<(), CliError> {
    let sp = SpectralPoint::new(s)?;
    let rec = NumericRecord::new(magnetization(&sp), 0.0, "closed_form")
        .complex_param("s", s)
        .extra("k_re", sp.k().re)
        .extra("k_im", sp.k().im);
    emit(cfg, &rec)
}

fn chi_record(t: &ChiTerm, s: Complex64, budget: u64) -> NumericRecord {
    let method = match t.route {
        ising_core::chi::ChiRoute::Tensor => "chi_tensor",
        ising_core::chi::ChiRoute::ResidueReduced => "chi_residue_reduced",
    };
    NumericRecord::new(t.value, t.err_est, method)
        .param("n", t.n)
        .complex_param("s", s)
        .param("r", t.r)
        .param("m", t.m)
        .param("budget", budget)
}

pub fn chi(
    cfg: &RunConfig,
    n: usize,
    s: Complex64,
    r: Option<f64>,
    budget: Option<u64>,
    route: ChiRouteArg,
) -> Result<(), CliError> {
    let sp = SpectralPoint::new(s)?;
    let m = cfg.grid_m;
    if route == ChiRouteArg::Tensor && n >= 4 {
        if budget.is_none() {
            return Err(CliError::Input(format!("n = {n} on the tensor route needs an explicit --budget")));
        }
        if m > MAX_M_HIGH_ORDER {
            return Err(CliError::Input(format!(
                "n = {n} on the tensor route needs --m <= {MAX_M_HIGH_ORDER}, got {m}"
            )));
        }
    }
    let budget = budget.unwrap_or(DEFAULT_BUDGET);
    let grid = match r {
        Some(r) => ContourGrid::new(r, m)?.certify(&sp)?,
        None => ContourGrid::select(&sp, cfg.grid_safety, m)?,
    };
    let term = match route {
        ChiRouteArg::Tensor => chi_n(n, &sp, &grid, budget)?,
        ChiRouteArg::Reduced => chi_n_reduced(n, &sp, &grid, budget)?,
    };
    let safety = if r.is_some() { None } else { Some(cfg.grid_safety) };
    emit(cfg, &chi_record(&term, s, budget).param("safety", safety))
}

fn corr_record(r: &CorrelationResult) -> NumericRecord {
    let terms: Vec<[f64; 2]> = r.terms.iter().map(|t| [t.re, t.im]).collect();
    NumericRecord::new(r.value, r.err_est, r.method.as_str())
        .param("M", r.lattice_m)
        .param("N", r.lattice_n)
        .complex_param("s", r.s)
        .param("nodes", r.nodes)
        .extra("terms", terms)
}

pub fn corr(
    cfg: &RunConfig,
    method: CorrMethod,
    lattice_m: i64,
    lattice_n: i64,
    s: Complex64,
    nmax: Option<usize>,
    budget: Option<u64>,
) -> Result<(), CliError> {
    let sp = SpectralPoint::new(s)?;
    let m = cfg.grid_m;
    let result = match method {
        CorrMethod::Formfactor => correlation_ff(lattice_m, lattice_n, &sp, nmax.unwrap_or(2), m)?,
        CorrMethod::Fredholm => {
            if nmax.is_some() {
                return Err(CliError::Input("--nmax does not apply to the Fredholm route".into()));
            }
            fredholm_correlation(lattice_m, lattice_n, &sp, m)?
        }
        CorrMethod::Contour => {
            let grid = ContourGrid::select(&sp, cfg.grid_safety, m)?;
            correlation_contour(lattice_m, lattice_n, &sp, nmax.unwrap_or(1), &grid, budget.unwrap_or(DEFAULT_BUDGET))?
        }
    };
    emit(cfg, &corr_record(&result))
}

pub fn nickel_list(cfg: &RunConfig, n: usize, allow_repeats: bool) -> Result<(), CliError> {
    let pts = enumerate_with(n, allow_repeats);
    if cfg.output_format == Some(Format::Json) {
        return write_json(&pts, cfg.output_path.as_deref());
    }
    let rows: Vec<Vec<Option<String>>> = pts
        .iter()
        .map(|p| {
            let a1 = p.points[0].arg();
            let a2 = p.points.last().map_or(a1, |z| z.arg());
            vec![
                Some(n.to_string()),
                Some(p.witness.0.to_string()),
                Some(p.witness.1.to_string()),
                num(p.re_value),
                num(a1),
                num(a2),
            ]
        })
        .collect();
    write_csv(&["n", "j", "k", "re_value", "angle1", "angle2"], &rows, cfg.output_path.as_deref())
}

pub fn nickel_check(cfg: &RunConfig, s0: Complex64, n: usize, tol: f64, allow_repeats: bool) -> Result<(), CliError> {
    let c = is_nickel_with(s0, n, tol, allow_repeats)?;
    let rec = NumericRecord::new(Complex64::new(c.distance, 0.0), 0.0, "nickel_distance")
        .complex_param("s0", s0)
        .param("n", n)
        .param("tol", tol)
        .param("allow_repeats", allow_repeats)
        .extra("is_nickel", c.is_nickel)
        .extra("witness", c.witness);
    emit(cfg, &rec)
}

pub fn nickel_density(cfg: &RunConfig, n_list: &[usize]) -> Result<(), CliError> {
    let rows = density_table(n_list);
    if cfg.output_format == Some(Format::Json) {
        return write_json(&rows, cfg.output_path.as_deref());
    }
    let cells: Vec<Vec<Option<String>>> = rows
        .iter()
        .map(|r| vec![Some(r.n.to_string()), Some(r.count.to_string()), num(r.max_gap)])
        .collect();
    write_csv(&["n", "count", "max_gap"], &cells, cfg.output_path.as_deref())
}

fn certificate_record(cert: &HullCertificate) -> NumericRecord {
    match cert {
        HullCertificate::Containment { residual, .. } => NumericRecord::new(Complex64::new(0.0, 0.0), *residual, "hull_min_norm"),
        HullCertificate::Separation { margin, distance, .. } => {
            NumericRecord::new(Complex64::new(*distance, 0.0), distance - margin, "hull_min_norm")
        }
        HullCertificate::Indeterminate { distance, gap, .. } => {
            NumericRecord::new(Complex64::new(*distance, 0.0), *gap, "hull_min_norm")
        }
    }
    .extra("certificate", cert)
}

pub fn hull_check(cfg: &RunConfig, mut kv: KvFile) -> Result<(), CliError> {
    let mut list = |key: &str| -> Result<Vec<Complex64>, CliError> {
        let (line, v) = kv
            .take(key)
            .ok_or_else(|| CliError::Input(format!("configuration file needs '{key}'")))?;
        parse_complex_list(&v).map_err(|e| CliError::Input(format!("line {line}: {key}: {e}")))
    };
    let x0 = list("x0")?;
    let y0 = list("y0")?;
    let s0 = list("s0")?;
    kv.ensure_empty()?;
    if s0.len() != 1 {
        return Err(CliError::Input("s0 must be a single complex number".into()));
    }
    let tc = TorusConfiguration::new(x0, y0, s0[0], cfg.tol_active)?;
    let vectors = active_vectors(&tc)?;
    let cert = hull_distance(&vectors.vectors, cfg.tol_hull, DEFAULT_MAX_ITER)?;
    let indeterminate = matches!(cert, HullCertificate::Indeterminate { .. });
    let rec = certificate_record(&cert)
        .param("n", tc.n)
        .param("tol_hull", cfg.tol_hull)
        .param("tol_active", cfg.tol_active)
        .extra("configuration", &tc)
        .extra("labels", &vectors.labels)
        .extra("vectors", &vectors.vectors);
    emit(cfg, &rec)?;
    if indeterminate {
        return Err(CliError::Convergence("hull certificate is indeterminate".into()));
    }
    Ok(())
}

pub fn hull_random_verify(cfg: &RunConfig, n: usize, trials: usize) -> Result<(), CliError> {
    let report = lemma1_randomized_verify(n, trials, cfg.seed, cfg.tol_hull, cfg.tol_active)?;
    let passed = report.passed(1e-9, 1e-12) && report.indeterminate == 0;
    let rec = NumericRecord::new(Complex64::new(report.min_margin, 0.0), 0.0, "lemma1_randomized")
        .param("n", n)
        .param("trials", trials)
        .param("seed", cfg.seed)
        .param("tol_hull", cfg.tol_hull)
        .param("tol_active", cfg.tol_active)
        .extra("passed", passed)
        .extra("report", &report);
    emit(cfg, &rec)?;
    if !passed {
        return Err(CliError::Convergence(format!(
            "randomized verification failed: {} separations of {trials}, {} of {} witnesses contained, {} indeterminate",
            report.separations,
            report.witness_containments,
            report.witnesses.len(),
            report.indeterminate
        )));
    }
    Ok(())
}

pub fn hull_ratio(cfg: &RunConfig, s0_re: f64, samples: usize) -> Result<(), CliError> {
    let report = ratio_monotonicity_check(s0_re, samples)?;
    let rec = NumericRecord::new(Complex64::new(0.0, 0.0), 0.0, "ratio_monotonicity")
        .param("s0_re", s0_re)
        .param("samples", samples)
        .extra("report", &report);
    emit(cfg, &rec)?;
    if !report.monotone {
        return Err(CliError::Convergence("ratio is not strictly monotone on the sampled level set".into()));
    }
    Ok(())
}

pub struct ScanArgs {
    pub n: usize,
    pub phis: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub m_start: Option<usize>,
    pub budget: Option<u64>,
    pub rel_tol: Option<f64>,
    pub indicator_out: Option<PathBuf>,
}

pub fn scan(cfg: &RunConfig, args: ScanArgs) -> Result<(), CliError> {
    if args.n != 2 {
        return Err(CliError::Input(format!("the scan supports n = 2 only, got {}", args.n)));
    }
    if cfg.output_format == Some(Format::Json) {
        return Err(CliError::Input("the scan writes CSV only".into()));
    }
    let defaults = ScanPolicy::default();
    let policy = ScanPolicy {
        safety: cfg.grid_safety,
        m_start: args.m_start.unwrap_or(defaults.m_start),
        budget: args.budget.unwrap_or(defaults.budget),
        rel_tol: args.rel_tol.unwrap_or(defaults.rel_tol),
        ..defaults
    };
    let rows = ray_scan(&args.phis, &args.epsilons, &policy)?;
    let cells: Vec<Vec<Option<String>>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.phi),
                num(r.epsilon),
                r.value.and_then(|v| num(v.re)),
                r.value.and_then(|v| num(v.im)),
                r.err_est.and_then(num),
                r.r_used.and_then(num),
                r.m_used.map(|m| m.to_string()),
                Some(r.status.as_str().to_string()),
            ]
        })
        .collect();
    write_csv(
        &["phi", "epsilon", "re_chi", "im_chi", "err_est", "r_used", "m_used", "status"],
        &cells,
        cfg.output_path.as_deref(),
    )?;
    if let Some(path) = args.indicator_out {
        let mut out = Vec::new();
        for &phi in &args.phis {
            for &eps in &args.epsilons {
                out.push(match divergence_indicator(phi, eps, &policy) {
                    Ok(i) => vec![num(phi), num(eps), num(i.value), num(i.err_est), Some(i.m_used.to_string()), Some("ok".into())],
                    Err(ising_core::Error::BudgetExceeded { .. }) => {
                        vec![num(phi), num(eps), None, None, None, Some("BudgetExceeded".into())]
                    }
                    Err(_) => vec![num(phi), num(eps), None, None, None, Some("NoValidRadius".into())],
                });
            }
        }
        write_csv(&["phi", "epsilon", "indicator", "err_est", "m_used", "status"], &out, Some(&path))?;
    }
    Ok(())
}

pub fn identities(cfg: &RunConfig, trials: usize) -> Result<(), CliError> {
    let tol = match cfg.tol_identity {
        Some(t) => Tolerances {
            algebraic: t,
            pfaffian: t,
            odd_determinant: t,
            residue_real: t,
            residue_complex: t,
        },
        None => Tolerances::default(),
    };
    let report = identity_battery(trials, cfg.seed, &tol)?;
    let records: Vec<NumericRecord> = report
        .checks
        .iter()
        .map(|c| {
            NumericRecord::new(Complex64::new(c.max_residual, 0.0), 0.0, &format!("identity:{}", c.name))
                .complex_param("s", c.s)
                .param("samples", c.samples)
                .param("tolerance", c.tolerance)
                .extra("passed", c.passed)
        })
        .collect();
    let passed = report.passed();
    emit(cfg, &json!({ "seed": cfg.seed, "trials": trials, "passed": passed, "checks": records }))?;
    if !passed {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} at s = {} (max residual {:e} vs {:e})", c.name, c.s, c.max_residual, c.tolerance))
            .collect();
        return Err(CliError::Convergence(format!("identity violations: {}", failed.join("; "))));
    }
    Ok(())
}
