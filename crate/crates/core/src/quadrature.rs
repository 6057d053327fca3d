//! Periodic trapezoid quadrature on circles `|z| = r` and on products of
//! circles.
//!
//! Every reduction here runs in a fixed order: the outermost tensor index
//! is tiled across rayon workers, each tile is summed with a
//! [`PairwiseSum`], and tile totals are merged by [`pairwise_sum`] in index
//! order. Results are therefore bit-identical for any thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{gamma_value, SpectralPoint};

/// Points used to locate `min Re γ` on the unit circle and to verify a radius.
pub const RADIUS_PROBE_POINTS: usize = 512;
/// Retries of [`select_radius`] after the first attempt.
pub const RADIUS_RETRIES: usize = 8;
/// Largest tensor rank accepted by [`tensor_trapezoid`].
pub const MAX_DIMS: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Node `r e^{2πi a/m}`, built so that node `m - a` is the exact conjugate of node `a`.
pub fn circle_node(r: f64, a: usize, m: usize) -> Complex64 {
    let a = a % m;
    if 2 * a == m {
        Complex64::new(-r, 0.0)
    } else if 2 * a < m {
        let t = 2.0 * PI * a as f64 / m as f64;
        Complex64::new(r * t.cos(), r * t.sin())
    } else {
        circle_node(r, m - a, m).conj()
    }
}

/// Certificate that `Re γ(x) > ln(1/r)` on the probed points of `|x| = r`,
/// so that for `x` on the contour the pole `e^{-γ(x)}` of `1/D(x, ·)` lies
/// inside the circle and `e^{γ(x)}` outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusCertificate {
    pub s: Complex64,
    pub r: f64,
    pub log_inv_r: f64,
    /// `min Re γ` on the unit circle (probe grid).
    pub min_re_gamma_unit: f64,
    /// `min_x Re γ(x) - ln(1/r)` over the probe points on `|x| = r`.
    pub margin: f64,
    pub safety: f64,
    pub attempts: usize,
}

/// Minimum of `Re γ` over `points` equispaced nodes of `|z| = radius`.
pub fn min_re_gamma_on_circle(sp: &SpectralPoint, radius: f64, points: usize) -> f64 {
    (0..points)
        .map(|a| gamma_value(circle_node(radius, a, points), sp).re)
        .fold(f64::INFINITY, f64::min)
}

fn radius_margin(sp: &SpectralPoint, r: f64, extra_nodes: usize) -> f64 {
    let mut margin = min_re_gamma_on_circle(sp, r, RADIUS_PROBE_POINTS);
    if extra_nodes > 0 && !RADIUS_PROBE_POINTS.is_multiple_of(extra_nodes) {
        margin = margin.min(min_re_gamma_on_circle(sp, r, extra_nodes));
    }
    margin - (1.0 / r).ln()
}

/// Picks `r < 1` with `ln(1/r) = safety · min Re γ(|z|=1)`, verified on
/// `|x| = r` and halving the gap on failure.
pub fn select_radius(sp: &SpectralPoint, safety: f64) -> Result<RadiusCertificate> {
    if !(safety > 0.0 && safety < 1.0) {
        return Err(Error::InvalidInput(format!(
            "safety must lie in (0, 1), got {safety}"
        )));
    }
    let g0 = min_re_gamma_on_circle(sp, 1.0, RADIUS_PROBE_POINTS);
    let mut gap = safety * g0;
    let mut last_margin = f64::NAN;
    for attempt in 0..=RADIUS_RETRIES {
        let r = (-gap).exp();
        if r < 1.0 && r > 0.0 {
            let margin = radius_margin(sp, r, 0);
            if margin > 0.0 {
                return Ok(RadiusCertificate {
                    s: sp.s(),
                    r,
                    log_inv_r: gap,
                    min_re_gamma_unit: g0,
                    margin,
                    safety,
                    attempts: attempt + 1,
                });
            }
            last_margin = margin;
        }
        gap *= 0.5;
    }
    Err(Error::NoValidRadius {
        s: sp.s(),
        attempts: RADIUS_RETRIES + 1,
        last_margin,
    })
}

/// Discretized circle `C_r` with `m` equispaced nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourGrid {
    r: f64,
    nodes: Vec<Complex64>,
    certificate: Option<RadiusCertificate>,
}

impl ContourGrid {
    pub fn new(r: f64, m: usize) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidInput(format!("radius must lie in (0, 1), got {r}")));
        }
        if m < 8 || !m.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "node count must be even and >= 8, got {m}"
            )));
        }
        Ok(ContourGrid {
            r,
            nodes: (0..m).map(|a| circle_node(r, a, m)).collect(),
            certificate: None,
        })
    }

    /// Grid on a radius chosen by [`select_radius`].
    pub fn select(sp: &SpectralPoint, safety: f64, m: usize) -> Result<Self> {
        let cert = select_radius(sp, safety)?;
        Self::from_certificate(cert, m, sp)
    }

    pub fn from_certificate(cert: RadiusCertificate, m: usize, sp: &SpectralPoint) -> Result<Self> {
        let mut grid = Self::new(cert.r, m)?;
        let margin = radius_margin(sp, cert.r, m);
        if cert.s != sp.s() || margin <= 0.0 {
            return Err(Error::InvalidGrid {
                s: sp.s(),
                reason: format!("certificate does not hold on {m} nodes (margin {margin:e})"),
            });
        }
        grid.certificate = Some(RadiusCertificate { margin, ..cert });
        Ok(grid)
    }

    /// Attaches a certificate for `sp` after verifying the radius directly.
    pub fn certify(mut self, sp: &SpectralPoint) -> Result<Self> {
        self.ensure_valid(sp)?;
        let margin = radius_margin(sp, self.r, self.m());
        self.certificate = Some(RadiusCertificate {
            s: sp.s(),
            r: self.r,
            log_inv_r: (1.0 / self.r).ln(),
            min_re_gamma_unit: min_re_gamma_on_circle(sp, 1.0, RADIUS_PROBE_POINTS),
            margin,
            safety: f64::NAN,
            attempts: 0,
        });
        Ok(self)
    }

    /// Checks the pole-separation condition for `sp` on this radius.
    pub fn ensure_valid(&self, sp: &SpectralPoint) -> Result<()> {
        if let Some(cert) = &self.certificate {
            if cert.s == sp.s() && cert.margin > 0.0 {
                return Ok(());
            }
        }
        let margin = radius_margin(sp, self.r, self.m());
        if margin > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidGrid {
                s: sp.s(),
                reason: format!("min Re γ - ln(1/r) = {margin:e} on r = {}", self.r),
            })
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn certificate(&self) -> Option<&RadiusCertificate> {
        self.certificate.as_ref()
    }

    /// Same radius and certificate with a different node count.
    pub fn with_nodes(&self, m: usize) -> Result<Self> {
        match self.certificate {
            Some(cert) => Self::from_certificate(cert, m, &SpectralPoint::new(cert.s)?),
            None => Self::new(self.r, m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// `|I_m - I_{m/2}|` with the coarse rule on every other node.
    pub err_est: f64,
    pub m_used: usize,
    pub r_used: f64,
}

/// Deterministic streaming pairwise summation.
///
/// Terms are summed sequentially in blocks of [`PairwiseSum::BLOCK`]; block
/// totals are merged as a binary counter, which fixes the tree shape by the
/// number of terms alone.
#[derive(Debug, Clone, Default)]
pub struct PairwiseSum {
    levels: Vec<Option<Complex64>>,
    block: Complex64,
    count: usize,
}

impl PairwiseSum {
    pub const BLOCK: usize = 32;

    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.block += v;
        self.count += 1;
        if self.count == Self::BLOCK {
            let b = std::mem::replace(&mut self.block, ZERO);
            self.count = 0;
            self.push(b);
        }
    }

    fn push(&mut self, v: Complex64) {
        let mut carry = v;
        for slot in self.levels.iter_mut() {
            match slot.take() {
                None => {
                    *slot = Some(carry);
                    return;
                }
                Some(older) => carry = older + carry,
            }
        }
        self.levels.push(Some(carry));
    }

    pub fn total(&self) -> Complex64 {
        let mut acc = self.block;
        for v in self.levels.iter().flatten() {
            acc = *v + acc;
        }
        acc
    }
}

/// Recursive halving sum of a slice.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => ZERO,
        1 => values[0],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Means of a leaf function over the full index grid and over the coarse
/// grid of even indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorMeans {
    pub full: Complex64,
    pub half: Complex64,
}

impl TensorMeans {
    pub fn err_est(&self) -> f64 {
        (self.full - self.half).norm()
    }
}

/// Total number of leaf evaluations of a [`tensor_trapezoid`] call.
pub fn tensor_cost(dims: &[usize]) -> u128 {
    let full: u128 = dims.iter().map(|&m| m as u128).product();
    let half: u128 = dims.iter().map(|&m| (m / 2) as u128).product();
    full + half
}

/// Mean of `leaf(idx)` over the index box `dims` (each extent even), and
/// over the sub-box of even indices.
pub fn tensor_trapezoid<F>(dims: &[usize], leaf: F) -> TensorMeans
where
    F: Fn(&[usize]) -> Complex64 + Sync,
{
    assert!(!dims.is_empty() && dims.len() <= MAX_DIMS, "rank must be 1..={MAX_DIMS}");
    assert!(dims.iter().all(|&m| m >= 2 && m % 2 == 0), "extents must be even");
    let full_count: f64 = dims.iter().map(|&m| m as f64).product();
    let half_count: f64 = dims.iter().map(|&m| (m / 2) as f64).product();
    TensorMeans {
        full: strided_sum(dims, 1, &leaf) / full_count,
        half: strided_sum(dims, 2, &leaf) / half_count,
    }
}

fn strided_sum<F>(dims: &[usize], step: usize, leaf: &F) -> Complex64
where
    F: Fn(&[usize]) -> Complex64 + Sync,
{
    let d = dims.len();
    let outer: Vec<usize> = (0..dims[0]).step_by(step).collect();
    let tiles: Vec<Complex64> = outer
        .par_iter()
        .map(|&i0| {
            let mut idx = [0usize; MAX_DIMS];
            idx[0] = i0;
            let mut acc = PairwiseSum::new();
            loop {
                acc.add(leaf(&idx[..d]));
                let mut k = d - 1;
                loop {
                    if k == 0 {
                        return acc.total();
                    }
                    idx[k] += step;
                    if idx[k] < dims[k] {
                        break;
                    }
                    idx[k] = 0;
                    k -= 1;
                }
            }
        })
        .collect();
    pairwise_sum(&tiles)
}

/// Tensor trapezoid value of `(2πi)^{-d} ∮…∮ f(z_1,…,z_d) dz_1…dz_d`
/// over the given circles: `(1/m) Σ_a f(z_a) z_a` in each variable.
pub fn circle_integral<F>(f: F, grids: &[&ContourGrid]) -> QuadratureResult
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let d = grids.len();
    let dims: Vec<usize> = grids.iter().map(|g| g.m()).collect();
    let means = tensor_trapezoid(&dims, |idx| {
        let mut z = [ZERO; MAX_DIMS];
        let mut measure = Complex64::new(1.0, 0.0);
        for k in 0..d {
            z[k] = grids[k].nodes[idx[k]];
            measure *= z[k];
        }
        f(&z[..d]) * measure
    });
    QuadratureResult {
        value: means.full,
        err_est: means.err_est(),
        m_used: dims.iter().copied().max().unwrap_or(0),
        r_used: grids.first().map_or(f64::NAN, |g| g.r()),
    }
}
