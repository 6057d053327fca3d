use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    FormFactor,
    Fredholm,
    Contour,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::FormFactor => "formfactor",
            Method::Fredholm => "fredholm",
            Method::Contour => "contour",
        }
    }
}

/// A value of `<σ00 σMN>` tagged with the route that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub lattice_m: i64,
    pub lattice_n: i64,
    pub s: Complex64,
    pub value: Complex64,
    pub err_est: f64,
    pub method: Method,
    /// Node count per dimension (quadrature) or matrix size (Nyström).
    pub nodes: usize,
    /// Expansion terms `1, T_1, T_2, …` before the `M^2` prefactor, when the route has them.
    pub terms: Vec<Complex64>,
}

/// `M² (1 + Σ_{n=1}^{n_max} I_{2n}(M, N))` with `I_p` the per-site contour
/// integral of [`crate::chi::corr_integral`] at `p` variables per family.
/// Negative lattice indices are folded by evenness.
///
/// `err_est` is the magnitude of the last included term plus the quadrature
/// estimates of all terms.
pub fn correlation_contour(
    lattice_m: i64,
    lattice_n: i64,
    sp: &crate::SpectralPoint,
    n_max: usize,
    grid: &crate::quadrature::ContourGrid,
    budget: u64,
) -> crate::Result<CorrelationResult> {
    let mut terms = vec![Complex64::new(1.0, 0.0)];
    let mut quad_err = 0.0;
    for n in 1..=n_max {
        let q = crate::chi::corr_integral(
            lattice_m.unsigned_abs() as u32,
            lattice_n.unsigned_abs() as u32,
            sp,
            2 * n,
            grid,
            budget,
        )?;
        quad_err += q.err_est;
        terms.push(q.value);
    }
    let mag = crate::spectral::magnetization(sp);
    let sum: Complex64 = terms.iter().sum();
    let trunc = if n_max > 0 { terms[n_max].norm() } else { 0.0 };
    Ok(CorrelationResult {
        lattice_m,
        lattice_n,
        s: sp.s(),
        value: mag * mag * sum,
        err_est: trunc + quad_err,
        method: Method::Contour,
        nodes: grid.m(),
        terms,
    })
}
