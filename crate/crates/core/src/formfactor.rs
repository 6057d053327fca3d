//! θ-space form-factor expansion of the correlation function,
//!
//! ```text
//! <σ00 σMN> = M² (1 + Σ_n T_n(M, N)),
//! T_n = 1/(2n)! (2π)^{-2n} ∫…∫ ∏_{j<k} h(θ_j, θ_k)² ∏_j e^{iMθ_j - Nγ(e^{iθ_j})} / sinh γ(e^{iθ_j}) dθ_j
//! ```
//!
//! for `N >= 0`, with all angles over `(-π, π)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::correlation::{CorrelationResult, Method};
use crate::error::{Error, Result};
use crate::quadrature::tensor_trapezoid;
use crate::spectral::{gamma_value, hker_from_gammas, magnetization, SpectralPoint};

pub const DEFAULT_NODES: usize = 64;
pub const MAX_ORDER: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormFactorTerm {
    pub order: usize,
    pub lattice_m: i64,
    pub lattice_n: i64,
    pub value: Complex64,
    pub m_nodes: usize,
    pub err_est: f64,
}

/// Uniform periodic grid `θ_a = -π + 2πa/m` with `γ_a = γ(e^{iθ_a})`.
pub(crate) struct ThetaGrid {
    pub theta: Vec<f64>,
    pub gamma: Vec<Complex64>,
}

impl ThetaGrid {
    pub(crate) fn new(m: usize, sp: &SpectralPoint) -> Self {
        let theta: Vec<f64> = (0..m).map(|a| -PI + 2.0 * PI * a as f64 / m as f64).collect();
        let gamma = theta
            .iter()
            .map(|&t| gamma_value(Complex64::from_polar(1.0, t), sp))
            .collect();
        ThetaGrid { theta, gamma }
    }
}

/// The order-`n` term `T_n(M, N)` by a `2n`-dimensional periodic trapezoid rule.
///
/// The integrand apart from `e^{iMΣθ}` is even under `θ → -θ` and the grid
/// is symmetric, so the phase is replaced by `cos(MΣθ)`.
pub fn formfactor_term(
    lattice_m: i64,
    lattice_n: i64,
    sp: &SpectralPoint,
    order: usize,
    m_nodes: usize,
) -> Result<FormFactorTerm> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            supported: "1 or 2",
        });
    }
    if lattice_n < 0 {
        return Err(Error::InvalidInput(format!(
            "the form-factor representation needs N >= 0, got {lattice_n}"
        )));
    }
    if m_nodes < 8 || !m_nodes.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("node count must be even and >= 8, got {m_nodes}")));
    }
    let m = m_nodes;
    let grid = ThetaGrid::new(m, sp);
    let weight: Vec<Complex64> = grid
        .gamma
        .iter()
        .map(|&g| (-(lattice_n as f64) * g).exp() / g.sinh())
        .collect();
    let mut h2 = vec![Complex64::new(0.0, 0.0); m * m];
    for a in 0..m {
        for b in 0..m {
            let h = hker_from_gammas(grid.theta[a], grid.theta[b], grid.gamma[a], grid.gamma[b]);
            h2[a * m + b] = h * h;
        }
    }
    // Σθ = -2nπ + 2πΣa/m, so cos(MΣθ) depends only on Σa mod m.
    let phase: Vec<f64> = (0..m)
        .map(|u| {
            let k = (lattice_m.rem_euclid(m as i64) as usize * u) % m;
            let k = k.min(m - k);
            (2.0 * PI * k as f64 / m as f64).cos()
        })
        .collect();
    let dims = vec![m; 2 * order];
    let means = if order == 1 {
        tensor_trapezoid(&dims, |i| {
            h2[i[0] * m + i[1]] * weight[i[0]] * weight[i[1]] * phase[(i[0] + i[1]) % m]
        })
    } else {
        tensor_trapezoid(&dims, |i| {
            let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
            h2[a * m + b]
                * h2[a * m + c]
                * h2[a * m + d]
                * h2[b * m + c]
                * h2[b * m + d]
                * h2[c * m + d]
                * (weight[a] * weight[b] * weight[c] * weight[d])
                * phase[(a + b + c + d) % m]
        })
    };
    let norm: f64 = (1..=2 * order).map(|k| k as f64).product();
    Ok(FormFactorTerm {
        order,
        lattice_m,
        lattice_n,
        value: means.full / norm,
        m_nodes: m,
        err_est: means.err_est() / norm,
    })
}

/// `M² (1 + Σ_{n=1}^{n_max} T_n)`; negative lattice indices are folded by evenness.
///
/// `err_est` is the magnitude of the last included term.
pub fn correlation_ff(
    lattice_m: i64,
    lattice_n: i64,
    sp: &SpectralPoint,
    n_max: usize,
    m_nodes: usize,
) -> Result<CorrelationResult> {
    if n_max > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: n_max,
            supported: "n_max in 0..=2",
        });
    }
    let mut terms = vec![Complex64::new(1.0, 0.0)];
    for order in 1..=n_max {
        terms.push(formfactor_term(lattice_m.abs(), lattice_n.abs(), sp, order, m_nodes)?.value);
    }
    let mag = magnetization(sp);
    let sum: Complex64 = terms.iter().sum();
    Ok(CorrelationResult {
        lattice_m,
        lattice_n,
        s: sp.s(),
        value: mag * mag * sum,
        err_est: terms.last().map(|t| t.norm()).unwrap_or(0.0),
        method: Method::FormFactor,
        nodes: m_nodes,
        terms,
    })
}
