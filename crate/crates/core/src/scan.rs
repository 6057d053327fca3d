//! `χ^(2)` along rays `s = (1 + ε) e^{iφ}` approaching the unit circle.
//!
//! Each value uses the residue-reduced two-dimensional integral with the
//! node count doubled until the coarse/fine difference is below a relative
//! tolerance or the evaluation budget is spent.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::chi::{chi_n_reduced, ChiTerm};
use crate::error::{Error, Result};
use crate::quadrature::{select_radius, tensor_cost, ContourGrid};
use crate::spectral::SpectralPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPolicy {
    pub safety: f64,
    pub m_start: usize,
    /// Maximum integrand evaluations for a single value.
    pub budget: u64,
    pub rel_tol: f64,
    /// Relative tolerance of the values entering the divergence indicator.
    pub indicator_rel_tol: f64,
}

impl Default for ScanPolicy {
    fn default() -> Self {
        ScanPolicy {
            safety: 0.5,
            m_start: 64,
            budget: 1 << 31,
            rel_tol: 1e-4,
            indicator_rel_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanStatus {
    #[serde(rename = "ok")]
    Ok,
    NoValidRadius,
    BudgetExceeded,
}

impl ScanStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScanStatus::Ok => "ok",
            ScanStatus::NoValidRadius => "NoValidRadius",
            ScanStatus::BudgetExceeded => "BudgetExceeded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub phi: f64,
    pub epsilon: f64,
    pub value: Option<Complex64>,
    pub err_est: Option<f64>,
    pub r_used: Option<f64>,
    pub m_used: Option<usize>,
    pub status: ScanStatus,
}

/// Outcome of an adaptive evaluation: the accepted term, or the last
/// attempted node count when the budget ran out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Adaptive {
    Converged(ChiTerm),
    Exhausted { r: f64, m: usize },
}

/// Doubles `m` from `m_start` until `err_est < rel_tol·|value|`.
pub fn chi2_adaptive(sp: &SpectralPoint, safety: f64, m_start: usize, budget: u64, rel_tol: f64) -> Result<Adaptive> {
    let cert = select_radius(sp, safety)?;
    let mut m = m_start.max(8);
    m += m % 2;
    let mut last_m = m;
    while tensor_cost(&[m, m]) <= budget as u128 {
        let grid = ContourGrid::from_certificate(cert, m, sp)?;
        let term = chi_n_reduced(2, sp, &grid, budget)?;
        if term.err_est < rel_tol * term.value.norm() {
            return Ok(Adaptive::Converged(term));
        }
        last_m = m;
        m *= 2;
    }
    Ok(Adaptive::Exhausted { r: cert.r, m: last_m })
}

fn scan_ray(phi: f64, epsilons: &[f64], policy: &ScanPolicy) -> Vec<ScanRow> {
    let mut m_start = policy.m_start;
    epsilons
        .iter()
        .map(|&epsilon| {
            let mut row = ScanRow {
                phi,
                epsilon,
                value: None,
                err_est: None,
                r_used: None,
                m_used: None,
                status: ScanStatus::Ok,
            };
            let sp = match SpectralPoint::on_ray(phi, epsilon) {
                Ok(sp) => sp,
                Err(_) => {
                    row.status = ScanStatus::NoValidRadius;
                    return row;
                }
            };
            match chi2_adaptive(&sp, policy.safety, m_start, policy.budget, policy.rel_tol) {
                Ok(Adaptive::Converged(term)) => {
                    m_start = term.m;
                    row.value = Some(term.value);
                    row.err_est = Some(term.err_est);
                    row.r_used = Some(term.r);
                    row.m_used = Some(term.m);
                }
                Ok(Adaptive::Exhausted { r, m }) => {
                    row.status = ScanStatus::BudgetExceeded;
                    row.r_used = Some(r);
                    row.m_used = Some(m);
                }
                Err(Error::BudgetExceeded { .. }) => row.status = ScanStatus::BudgetExceeded,
                Err(_) => row.status = ScanStatus::NoValidRadius,
            }
            row
        })
        .collect()
}

/// Rows ordered by `phi`, then by `epsilon`, as given. Each ray reuses the
/// previous node count as its starting point, so `m_used` never decreases
/// down the ladder.
pub fn ray_scan(phis: &[f64], epsilons: &[f64], policy: &ScanPolicy) -> Result<Vec<ScanRow>> {
    if epsilons.iter().any(|&e| !(e > 0.0 && e <= 0.5)) {
        return Err(Error::InvalidInput("epsilons must lie in (0, 0.5]".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("epsilons must be strictly decreasing".into()));
    }
    if phis.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("angles must be finite".into()));
    }
    let rows: Vec<Vec<ScanRow>> = phis.par_iter().map(|&phi| scan_ray(phi, epsilons, policy)).collect();
    Ok(rows.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Indicator {
    pub phi: f64,
    pub epsilon: f64,
    /// `|Re(v(φ+h) - 2v(φ) + v(φ-h))| / h²` with `h = ε`.
    pub value: f64,
    /// Error bound propagated from the three values.
    pub err_est: f64,
    pub m_used: usize,
}

/// Centered second difference of `Re χ^(2)` in `φ` at fixed `ε`.
pub fn divergence_indicator(phi: f64, epsilon: f64, policy: &ScanPolicy) -> Result<Indicator> {
    let h = epsilon;
    let mut vals = [Complex64::new(0.0, 0.0); 3];
    let mut errs = [0.0; 3];
    let mut m_used = 0;
    for (k, offset) in [-h, 0.0, h].iter().enumerate() {
        let sp = SpectralPoint::on_ray(phi + offset, epsilon)?;
        match chi2_adaptive(&sp, policy.safety, policy.m_start, policy.budget, policy.indicator_rel_tol)? {
            Adaptive::Converged(t) => {
                vals[k] = t.value;
                errs[k] = t.err_est;
                m_used = m_used.max(t.m);
            }
            Adaptive::Exhausted { m, .. } => {
                return Err(Error::BudgetExceeded {
                    required: tensor_cost(&[2 * m, 2 * m]),
                    budget: policy.budget,
                })
            }
        }
    }
    let second = vals[0] - 2.0 * vals[1] + vals[2];
    Ok(Indicator {
        phi,
        epsilon,
        value: second.re.abs() / (h * h),
        err_est: (errs[0] + 2.0 * errs[1] + errs[2]) / (h * h),
        m_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_ladders() {
        let p = ScanPolicy::default();
        assert!(ray_scan(&[0.3], &[0.1, 0.2], &p).is_err());
        assert!(ray_scan(&[0.3], &[0.6], &p).is_err());
        assert!(ray_scan(&[0.3], &[0.0], &p).is_err());
    }

    #[test]
    fn rows_are_ordered_and_node_counts_monotone() {
        let p = ScanPolicy::default();
        let rows = ray_scan(&[PI / 4.0, 1.0], &[0.3, 0.1], &p).unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.phi, r.epsilon)).collect();
        assert_eq!(keys, vec![(PI / 4.0, 0.3), (PI / 4.0, 0.1), (1.0, 0.3), (1.0, 0.1)]);
        for pair in rows.chunks(2) {
            assert!(pair.iter().all(|r| r.status == ScanStatus::Ok));
            assert!(pair[1].m_used >= pair[0].m_used);
            let (v, e) = (pair[1].value.unwrap(), pair[1].err_est.unwrap());
            assert!(e < 1e-4 * v.norm());
        }
    }

    #[test]
    fn conjugate_rays_give_conjugate_values() {
        let p = ScanPolicy::default();
        let rows = ray_scan(&[0.9, -0.9], &[0.2], &p).unwrap();
        let (a, b) = (rows[0].value.unwrap(), rows[1].value.unwrap());
        let tol = rows[0].err_est.unwrap() + rows[1].err_est.unwrap();
        assert!((a - b.conj()).norm() <= tol.max(1e-12 * a.norm()));
    }

    #[test]
    fn tiny_budget_is_flagged_without_value() {
        let p = ScanPolicy {
            budget: 10_000,
            ..ScanPolicy::default()
        };
        let rows = ray_scan(&[PI / 4.0], &[0.01], &p).unwrap();
        assert_eq!(rows[0].status, ScanStatus::BudgetExceeded);
        assert!(rows[0].value.is_none());
    }
}
