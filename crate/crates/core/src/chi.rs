//! The susceptibility integrals `χ^(n)` and the per-site contour integrals
//! of the correlation function.
//!
//! `χ^(n)` (for even `n`) is
//!
//! ```text
//! (1/n!) (2πi)^{-2n} ∮…∮ (∏x⁻¹ + ∏y⁻¹) / ((1 - ∏x)(1 - ∏y))
//!        · ∏_{j<k} (x_j - x_k)/(x_j x_k - 1) · (y_j - y_k)/(y_j y_k - 1)
//!        · ∏_j dx_j dy_j / D(x_j, y_j; s)
//! ```
//!
//! with every variable on the certified circle `C_r`. [`chi_n`] evaluates it
//! as a `2n`-dimensional tensor trapezoid. [`chi_n_reduced`] first performs
//! the `y`-integrations exactly by residues at `y_j = e^{-γ(x_j)}`, leaving
//! an `n`-dimensional integral; the two routes are independent checks of
//! each other.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{
    circle_integral, circle_node, pairwise_sum, tensor_cost, tensor_trapezoid, ContourGrid,
    PairwiseSum, QuadratureResult,
};
use crate::spectral::{big_d, gamma_value, magnetization, SpectralPoint};

/// Default cap on integrand evaluations for a single tensor quadrature.
pub const DEFAULT_BUDGET: u64 = 1 << 31;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_budget(dims: &[usize], budget: u64) -> Result<()> {
    let required = tensor_cost(dims);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiRoute {
    /// Full `2n`-fold tensor trapezoid.
    Tensor,
    /// `y`-variables integrated by residues; `n`-fold trapezoid in `x`.
    ResidueReduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiTerm {
    pub n: usize,
    pub value: Complex64,
    pub err_est: f64,
    pub r: f64,
    pub m: usize,
    pub route: ChiRoute,
}

fn check_even_order(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::UnsupportedOrder {
            order: n,
            supported: "even n >= 2",
        });
    }
    Ok(())
}

/// Pointwise integrand of `χ^(n)` (without the measure), written with
/// `(x_j - x_k)/(x_j x_k - 1)` pair factors.
pub fn chi_integrand(x: &[Complex64], y: &[Complex64], sp: &SpectralPoint) -> Complex64 {
    let n = x.len();
    let px: Complex64 = x.iter().product();
    let py: Complex64 = y.iter().product();
    let mut v = (px.inv() + py.inv()) / ((ONE - px) * (ONE - py));
    for j in 0..n {
        for k in (j + 1)..n {
            v *= (x[j] - x[k]) / (x[j] * x[k] - ONE) * (y[j] - y[k]) / (y[j] * y[k] - ONE);
        }
        v /= big_d(x[j], y[j], sp);
    }
    v
}

/// The same integrand assembled from the factors `F(x) F(y) ∏F_jk(x) F_jk(y) ∏G_j Δ(x, y)`
/// with `F_jk = 1/(1 - x_j x_k)` and `Δ = (∏x⁻¹ + ∏y⁻¹) ∏_{j<k}(x_j - x_k)(y_j - y_k)`.
pub fn chi_integrand_product_form(x: &[Complex64], y: &[Complex64], sp: &SpectralPoint) -> Complex64 {
    let n = x.len();
    let px: Complex64 = x.iter().product();
    let py: Complex64 = y.iter().product();
    let f = (ONE - px).inv() * (ONE - py).inv();
    let mut fjk = ONE;
    let mut vandermonde = ONE;
    for j in 0..n {
        for k in (j + 1)..n {
            fjk *= (ONE - x[j] * x[k]).inv() * (ONE - y[j] * y[k]).inv();
            vandermonde *= (x[j] - x[k]) * (y[j] - y[k]);
        }
    }
    let g: Complex64 = (0..n).map(|j| big_d(x[j], y[j], sp).inv()).product();
    let delta = (px.inv() + py.inv()) * vandermonde;
    f * fjk * g * delta
}

/// `χ^(n)` as a `2n`-dimensional tensor trapezoid on the grid.
pub fn chi_n(n: usize, sp: &SpectralPoint, grid: &ContourGrid, budget: u64) -> Result<ChiTerm> {
    check_even_order(n)?;
    grid.ensure_valid(sp)?;
    let m = grid.m();
    let dims = vec![m; 2 * n];
    check_budget(&dims, budget)?;

    let x = grid.nodes();
    let r = grid.r();
    let mut inv_d = vec![ZERO; m * m];
    let mut pair = vec![ZERO; m * m];
    for a in 0..m {
        for b in 0..m {
            inv_d[a * m + b] = big_d(x[a], x[b], sp).inv();
            pair[a * m + b] = (x[a] - x[b]) / (x[a] * x[b] - ONE);
        }
    }
    let rn = r.powi(n as i32);
    let prod: Vec<Complex64> = (0..m).map(|u| circle_node(rn, u, m)).collect();
    // (X + Y)/((1 - X)(1 - Y)): the prefactor times the measure ∏x ∏y.
    let mut coupling = vec![ZERO; m * m];
    for u in 0..m {
        for v in 0..m {
            coupling[u * m + v] = (prod[u] + prod[v]) / ((ONE - prod[u]) * (ONE - prod[v]));
        }
    }

    let means = if n == 2 {
        tensor_trapezoid(&dims, |idx| {
            let (a1, a2, b1, b2) = (idx[0], idx[1], idx[2], idx[3]);
            let u = (a1 + a2) % m;
            let v = (b1 + b2) % m;
            coupling[u * m + v]
                * pair[a1 * m + a2]
                * pair[b1 * m + b2]
                * inv_d[a1 * m + b1]
                * inv_d[a2 * m + b2]
        })
    } else {
        tensor_trapezoid(&dims, |idx| {
            let (a, b) = idx.split_at(n);
            let u = a.iter().sum::<usize>() % m;
            let v = b.iter().sum::<usize>() % m;
            let mut val = coupling[u * m + v];
            for j in 0..n {
                for k in (j + 1)..n {
                    val *= pair[a[j] * m + a[k]] * pair[b[j] * m + b[k]];
                }
                val *= inv_d[a[j] * m + b[j]];
            }
            val
        })
    };
    let norm = factorial(n);
    Ok(ChiTerm {
        n,
        value: means.full / norm,
        err_est: means.err_est() / norm,
        r,
        m,
        route: ChiRoute::Tensor,
    })
}

/// Per-node data for the residue-reduced integrand: `x`, `e = e^{-γ(x)}`
/// and `q = e / sinh γ(x)`.
struct ReducedNodes {
    x: Vec<Complex64>,
    e: Vec<Complex64>,
    q: Vec<Complex64>,
}

impl ReducedNodes {
    fn new(grid: &ContourGrid, sp: &SpectralPoint) -> Self {
        let x = grid.nodes().to_vec();
        let (e, q) = x
            .iter()
            .map(|&xa| {
                let g = gamma_value(xa, sp);
                let e = (-g).exp();
                (e, e / g.sinh())
            })
            .unzip();
        ReducedNodes { x, e, q }
    }
}

/// `χ^(n)` with the `y`-integrals done by residues.
///
/// The two prefactor terms `∏x⁻¹` and `∏y⁻¹` contribute equally by the
/// `x ↔ y` symmetry of the rest of the integrand, and with only the `∏x⁻¹`
/// term left each `y_j` has a single pole inside `C_r`, at `e^{-γ(x_j)}`:
///
/// ```text
/// χ^(n) = (2/n!) (2πi)^{-n} ∮…∮ 1/(∏x (1 - ∏x)) ∏_{j<k} (x_j - x_k)/(x_j x_k - 1)
///         · ∏_j e_j / sinh γ_j · 1/(1 - ∏e) · ∏_{j<k} (e_j - e_k)/(e_j e_k - 1) dx
/// ```
pub fn chi_n_reduced(n: usize, sp: &SpectralPoint, grid: &ContourGrid, budget: u64) -> Result<ChiTerm> {
    check_even_order(n)?;
    grid.ensure_valid(sp)?;
    let dims = vec![grid.m(); n];
    check_budget(&dims, budget)?;
    let nodes = ReducedNodes::new(grid, sp);
    let (full, half) = if n == 2 {
        reduced_pair_sums(&nodes)
    } else {
        let means = reduced_generic(n, &nodes, grid.r());
        (means.0, means.1)
    };
    let norm = 2.0 / factorial(n);
    Ok(ChiTerm {
        n,
        value: full * norm,
        err_est: (full - half).norm() * norm,
        r: grid.r(),
        m: grid.m(),
        route: ChiRoute::ResidueReduced,
    })
}

/// Full and coarse means of the reduced `n = 2` integrand
/// `q1 q2 (x1 - x2)(e1 - e2) / ((1 - x1 x2)^2 (1 - e1 e2)^2)`, using its
/// symmetry in `(1, 2)` and the vanishing diagonal.
fn reduced_pair_sums(nodes: &ReducedNodes) -> (Complex64, Complex64) {
    let m = nodes.x.len();
    let (x, e, q) = (&nodes.x, &nodes.e, &nodes.q);
    let tiles: Vec<(Complex64, Complex64)> = (0..m)
        .into_par_iter()
        .map(|a1| {
            let mut full = PairwiseSum::new();
            let mut half = PairwiseSum::new();
            let (x1, e1, q1) = (x[a1], e[a1], q[a1]);
            for a2 in (a1 + 1)..m {
                let big_x = ONE - x1 * x[a2];
                let big_e = ONE - e1 * e[a2];
                let den = big_x * big_e;
                let v = q1 * q[a2] * (x1 - x[a2]) * (e1 - e[a2]) / (den * den);
                full.add(v);
                if a1 % 2 == 0 && a2 % 2 == 0 {
                    half.add(v);
                }
            }
            (full.total(), half.total())
        })
        .collect();
    let (f, h): (Vec<Complex64>, Vec<Complex64>) = tiles.into_iter().unzip();
    let mf = m as f64;
    let mh = (m / 2) as f64;
    (2.0 * pairwise_sum(&f) / (mf * mf), 2.0 * pairwise_sum(&h) / (mh * mh))
}

fn reduced_generic(n: usize, nodes: &ReducedNodes, r: f64) -> (Complex64, Complex64) {
    let m = nodes.x.len();
    let (x, e, q) = (&nodes.x, &nodes.e, &nodes.q);
    let mut pair = vec![ZERO; m * m];
    for a in 0..m {
        for b in 0..m {
            pair[a * m + b] = (x[a] - x[b]) / (x[a] * x[b] - ONE) * (e[a] - e[b]) / (e[a] * e[b] - ONE);
        }
    }
    let rn = r.powi(n as i32);
    let inv_one_minus_prod: Vec<Complex64> =
        (0..m).map(|u| (ONE - circle_node(rn, u, m)).inv()).collect();
    let means = tensor_trapezoid(&vec![m; n], |a| {
        let u = a.iter().sum::<usize>() % m;
        let mut val = inv_one_minus_prod[u];
        let mut prod_e = ONE;
        for j in 0..n {
            for k in (j + 1)..n {
                val *= pair[a[j] * m + a[k]];
            }
            val *= q[a[j]];
            prod_e *= e[a[j]];
        }
        val / (ONE - prod_e)
    });
    (means.full, means.half)
}

#[cfg(test)]
pub(crate) fn chi_n_reduced_generic(n: usize, sp: &SpectralPoint, grid: &ContourGrid) -> Complex64 {
    let nodes = ReducedNodes::new(grid, sp);
    reduced_generic(n, &nodes, grid.r()).0 * 2.0 / factorial(n)
}

/// Node counts and safety used to assemble the susceptibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPolicy {
    pub safety: f64,
    /// Nodes per circle for `χ^(2)`.
    pub m: usize,
    /// Nodes per circle for `χ^(4)` and beyond.
    pub m_high: usize,
    pub budget: u64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            safety: 0.5,
            m: 96,
            m_high: 12,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SusceptibilitySum {
    pub n_max: usize,
    pub value: Complex64,
    pub magnetization: Complex64,
    pub terms: Vec<ChiTerm>,
}

/// Truncation of `β⁻¹χ = 1 - M² + 2M² Σ_{j=1}^{n_max} χ^(2j)`.
pub fn susceptibility(sp: &SpectralPoint, n_max: usize, policy: &GridPolicy) -> Result<SusceptibilitySum> {
    let mag = magnetization(sp);
    let mag2 = mag * mag;
    let mut terms = Vec::with_capacity(n_max);
    if n_max > 0 {
        let cert = crate::quadrature::select_radius(sp, policy.safety)?;
        for j in 1..=n_max {
            let n = 2 * j;
            let m = if n == 2 { policy.m } else { policy.m_high };
            let grid = ContourGrid::from_certificate(cert, m, sp)?;
            terms.push(chi_n(n, sp, &grid, policy.budget)?);
        }
    }
    let sum: Complex64 = terms.iter().map(|t| t.value).sum();
    Ok(SusceptibilitySum {
        n_max,
        value: ONE - mag2 + 2.0 * mag2 * sum,
        magnetization: mag,
        terms,
    })
}

/// `(2πi)^{-1} ∮ y^{N-1} / D(x, y; s) dy` on the grid, compared against
/// `e^{-Nγ(x)} / sinh γ(x)`. Returns `(quadrature, closed form, |difference|)`.
pub fn residue_identity(
    x: Complex64,
    lattice_n: u32,
    sp: &SpectralPoint,
    grid: &ContourGrid,
) -> Result<(Complex64, Complex64, f64)> {
    grid.ensure_valid(sp)?;
    if (x.norm() - grid.r()).abs() > 1e-9 * grid.r() {
        return Err(Error::InvalidInput(format!(
            "x = {x} is not on the contour |x| = {}",
            grid.r()
        )));
    }
    let q = circle_integral(
        |y| y[0].powi(lattice_n as i32 - 1) / big_d(x, y[0], sp),
        &[grid],
    );
    let g = gamma_value(x, sp);
    let exact = (-(lattice_n as f64) * g).exp() / g.sinh();
    Ok((q.value, exact, (q.value - exact).norm()))
}

pub fn residue_identity_check(x: Complex64, lattice_n: u32, sp: &SpectralPoint, grid: &ContourGrid) -> Result<f64> {
    residue_identity(x, lattice_n, sp, grid).map(|t| t.2)
}

fn pair_factor_a(z: &[Complex64], idx: &[usize], m: usize, table: &[Complex64]) -> Complex64 {
    let mut v = ONE;
    for j in 0..idx.len() {
        for k in (j + 1)..idx.len() {
            v *= table[idx[j] * m + idx[k]];
        }
    }
    let _ = z;
    v
}

struct CorrTables {
    m: usize,
    inv_d: Vec<Complex64>,
    /// `(x_a - x_b)/(1 - x_a x_b)`.
    pair: Vec<Complex64>,
}

impl CorrTables {
    fn new(grid: &ContourGrid, sp: &SpectralPoint) -> Self {
        let m = grid.m();
        let x = grid.nodes();
        let mut inv_d = vec![ZERO; m * m];
        let mut pair = vec![ZERO; m * m];
        for a in 0..m {
            for b in 0..m {
                inv_d[a * m + b] = big_d(x[a], x[b], sp).inv();
                pair[a * m + b] = (x[a] - x[b]) / (ONE - x[a] * x[b]);
            }
        }
        CorrTables { m, inv_d, pair }
    }

    /// Integrand of the per-site integral without the `∏x^M y^N` factor,
    /// times the measure `∏ x ∏ y` (which cancels `dx/x dy/y`).
    #[inline]
    fn base(&self, a: &[usize], b: &[usize]) -> Complex64 {
        let m = self.m;
        let mut v = pair_factor_a(&[], a, m, &self.pair) * pair_factor_a(&[], b, m, &self.pair);
        for j in 0..a.len() {
            v *= self.inv_d[a[j] * m + b[j]];
        }
        v
    }
}

/// Per-site contour integral with `vars` variables in each family:
///
/// ```text
/// (1/vars!) (2πi)^{-2·vars} ∮…∮ ∏_{j<k} (y_j - y_k)/(1 - y_j y_k) · (x_j - x_k)/(1 - x_j x_k)
///           · ∏_j x_j^M y_j^N / D(x_j, y_j; s) · ∏_j dx_j/x_j · dy_j/y_j
/// ```
///
/// With `vars = 2n` this is the order-`n` term of the θ-space form-factor
/// expansion of `<σ00 σMN>/M²` (see [`crate::formfactor::formfactor_term`]).
pub fn corr_integral(
    lattice_m: u32,
    lattice_n: u32,
    sp: &SpectralPoint,
    vars: usize,
    grid: &ContourGrid,
    budget: u64,
) -> Result<QuadratureResult> {
    if vars == 0 {
        return Err(Error::UnsupportedOrder {
            order: vars,
            supported: "at least one variable per family",
        });
    }
    grid.ensure_valid(sp)?;
    let m = grid.m();
    let dims = vec![m; 2 * vars];
    check_budget(&dims, budget)?;
    let tables = CorrTables::new(grid, sp);
    let rp = grid.r().powi(vars as i32);
    let x_pow: Vec<Complex64> = (0..m)
        .map(|u| circle_node(rp.powi(lattice_m as i32), u * lattice_m as usize, m))
        .collect();
    let y_pow: Vec<Complex64> = (0..m)
        .map(|v| circle_node(rp.powi(lattice_n as i32), v * lattice_n as usize, m))
        .collect();
    let means = tensor_trapezoid(&dims, |idx| {
        let (a, b) = idx.split_at(vars);
        let u = a.iter().sum::<usize>() % m;
        let v = b.iter().sum::<usize>() % m;
        x_pow[u] * y_pow[v] * tables.base(a, b)
    });
    let norm = factorial(vars);
    Ok(QuadratureResult {
        value: means.full / norm,
        err_est: means.err_est() / norm,
        m_used: m,
        r_used: grid.r(),
    })
}

/// Per-site integrals for every `0 <= M, N <= window`, from one pass that
/// bins the integrand by `(Σa mod m, Σb mod m)`: on the grid, `∏x` and
/// `∏y` depend on the node indices only through those sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrWindow {
    pub vars: usize,
    pub window: usize,
    pub r: f64,
    pub m: usize,
    bins_full: Vec<Complex64>,
    bins_half: Vec<Complex64>,
    values: Vec<Complex64>,
    err: Vec<f64>,
}

fn binned_sums(tables: &CorrTables, vars: usize, step: usize) -> Vec<Complex64> {
    let m = tables.m;
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|u| {
            let mut acc: Vec<PairwiseSum> = vec![PairwiseSum::new(); m];
            if u % step != 0 {
                return vec![ZERO; m];
            }
            let mut a = vec![0usize; vars];
            let mut b = vec![0usize; vars];
            // a_1..a_{vars-1} free, a_vars fixed by the bin.
            loop {
                let partial: usize = a[..vars - 1].iter().sum();
                a[vars - 1] = (u + vars * m - partial % m) % m;
                b.iter_mut().for_each(|v| *v = 0);
                loop {
                    let v = b.iter().sum::<usize>() % m;
                    acc[v].add(tables.base(&a, &b));
                    if !advance(&mut b, m, step) {
                        break;
                    }
                }
                if !advance(&mut a[..vars - 1], m, step) {
                    break;
                }
            }
            acc.iter().map(|p| p.total()).collect()
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Odometer increment with stride; returns false after wrapping to all zeros.
fn advance(idx: &mut [usize], m: usize, step: usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += step;
        if idx[k] < m {
            return true;
        }
        idx[k] = 0;
    }
    false
}

impl CorrWindow {
    pub fn value(&self, lattice_m: usize, lattice_n: usize) -> Complex64 {
        self.values[lattice_m * (self.window + 1) + lattice_n]
    }

    pub fn err_est(&self, lattice_m: usize, lattice_n: usize) -> f64 {
        self.err[lattice_m * (self.window + 1) + lattice_n]
    }

    fn products(&self) -> Vec<Complex64> {
        let rp = self.r.powi(self.vars as i32);
        (0..self.m).map(|u| circle_node(rp, u, self.m)).collect()
    }

    fn contract(&self, bins: &[Complex64], count: f64, weight: impl Fn(usize, usize) -> Complex64) -> Complex64 {
        let m = self.m;
        let terms: Vec<Complex64> = (0..m * m).map(|i| bins[i] * weight(i / m, i % m)).collect();
        pairwise_sum(&terms) / (count * factorial(self.vars))
    }

    /// The integral with `∏x^M y^N` replaced by `2(∏x + ∏y)/((1 - ∏x)(1 - ∏y))`,
    /// i.e. the lattice sum over all `(M, N) != (0, 0)` done in closed form.
    pub fn replaced_factor_integral(&self) -> Complex64 {
        let p = self.products();
        let count = (self.m as f64).powi(2 * self.vars as i32);
        self.contract(&self.bins_full, count, |u, v| {
            2.0 * (p[u] + p[v]) / ((ONE - p[u]) * (ONE - p[v]))
        })
    }
}

pub fn corr_window(
    sp: &SpectralPoint,
    vars: usize,
    window: usize,
    grid: &ContourGrid,
    budget: u64,
) -> Result<CorrWindow> {
    if vars == 0 {
        return Err(Error::UnsupportedOrder {
            order: vars,
            supported: "at least one variable per family",
        });
    }
    grid.ensure_valid(sp)?;
    let m = grid.m();
    check_budget(&vec![m; 2 * vars], budget)?;
    let tables = CorrTables::new(grid, sp);
    let bins_full = binned_sums(&tables, vars, 1);
    let bins_half = binned_sums(&tables, vars, 2);
    let mut out = CorrWindow {
        vars,
        window,
        r: grid.r(),
        m,
        bins_full,
        bins_half,
        values: Vec::new(),
        err: Vec::new(),
    };
    let p = out.products();
    let full_count = (m as f64).powi(2 * vars as i32);
    let half_count = ((m / 2) as f64).powi(2 * vars as i32);
    for lm in 0..=window {
        for ln in 0..=window {
            let w = |u: usize, v: usize| p[u].powi(lm as i32) * p[v].powi(ln as i32);
            let full = out.contract(&out.bins_full, full_count, w);
            let half = out.contract(&out.bins_half, half_count, w);
            out.values.push(full);
            out.err.push((full - half).norm());
        }
    }
    Ok(out)
}

/// Weight of site `(M, N)` in `Σ_{(M,N)≠(0,0)} = 4Σ_{M,N≥0} - 2Σ_{M=0,N≥0} - 2Σ_{N=0,M≥0}`.
pub fn lattice_weight(lattice_m: usize, lattice_n: usize) -> f64 {
    4.0 - if lattice_m == 0 { 2.0 } else { 0.0 } - if lattice_n == 0 { 2.0 } else { 0.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSumCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub relative: f64,
}

/// Weighted window sum of per-site integrals against the replaced-factor integral.
pub fn lattice_sum_check(sp: &SpectralPoint, vars: usize, window: usize, grid: &ContourGrid) -> Result<LatticeSumCheck> {
    if !(sp.is_physical() && sp.s().re >= 1.5) {
        return Err(Error::InvalidInput(format!(
            "lattice sum check needs real s >= 1.5, got {}",
            sp.s()
        )));
    }
    let win = corr_window(sp, vars, window, grid, DEFAULT_BUDGET)?;
    Ok(lattice_sum_from_window(&win))
}

pub fn lattice_sum_from_window(win: &CorrWindow) -> LatticeSumCheck {
    let mut terms = Vec::with_capacity((win.window + 1).pow(2));
    for lm in 0..=win.window {
        for ln in 0..=win.window {
            terms.push(lattice_weight(lm, ln) * win.value(lm, ln));
        }
    }
    let lhs = pairwise_sum(&terms);
    let rhs = win.replaced_factor_integral();
    let residual = (lhs - rhs).norm();
    LatticeSumCheck {
        lhs,
        rhs,
        residual,
        relative: residual / rhs.norm(),
    }
}
