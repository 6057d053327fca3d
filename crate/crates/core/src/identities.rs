//! Randomized battery of the algebraic identities the integral
//! representations rest on.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chi::residue_identity;
use crate::error::Result;
use crate::linalg::determinant;
use crate::quadrature::{circle_node, ContourGrid};
use crate::spectral::{
    big_d, factorization_residual, gamma_value, h_difference_form, h_sum_form, hker, SpectralPoint,
};

/// Samples closer than this to a cancellation point of either form of `h`
/// are skipped in the dual-form comparison.
pub const H_DUAL_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub s: Complex64,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &str, s: Complex64, residuals: &[f64], tolerance: f64) -> Self {
        let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
        IdentityCheck {
            name: name.to_string(),
            s,
            samples: residuals.len(),
            max_residual,
            tolerance,
            passed: residuals.iter().all(|r| r.is_finite()) && max_residual < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative tolerance of the pointwise algebraic identities.
    pub algebraic: f64,
    pub pfaffian: f64,
    pub odd_determinant: f64,
    pub residue_real: f64,
    pub residue_complex: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: 1e-11,
            pfaffian: 1e-10,
            odd_determinant: 1e-12,
            residue_real: 1e-10,
            residue_complex: 1e-8,
        }
    }
}

pub fn battery_points() -> Vec<Complex64> {
    vec![Complex64::new(2.0, 0.0), Complex64::new(1.5, 0.0), Complex64::new(3.0, 0.5)]
}

/// Random point with `|z| ∈ [1/2, 2]` and uniform argument.
fn annulus_point(rng: &mut ChaCha8Rng) -> Complex64 {
    let radius = 2.0_f64.powf(rng.gen_range(-1.0..1.0));
    Complex64::from_polar(radius, rng.gen_range(-PI..PI))
}

fn angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-PI..PI)
}

/// `y D(x,y) = -(y - e^{-γ(x)})(y - e^{γ(x)})/2`, relative to the size of the expanded terms.
pub fn factorization_samples(sp: &SpectralPoint, trials: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..trials)
        .map(|_| {
            let (x, y) = (annulus_point(rng), annulus_point(rng));
            let w = sp.cosh_argument(x);
            let scale = (y * w).norm() + 0.5 * y.norm_sqr() + 0.5;
            factorization_residual(x, y, sp) / scale
        })
        .collect()
}

/// Sum form against difference form of `h`.
pub fn h_dual_samples(sp: &SpectralPoint, trials: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(trials);
    while out.len() < trials {
        let (t1, t2) = (angle(rng), angle(rng));
        if (0.5 * (t1 + t2)).sin().abs() < H_DUAL_EXCLUSION || (0.5 * (t1 - t2)).sin().abs() < H_DUAL_EXCLUSION {
            continue;
        }
        let g1 = gamma_value(Complex64::from_polar(1.0, t1), sp);
        let g2 = gamma_value(Complex64::from_polar(1.0, t2), sp);
        let a = h_sum_form(t1, t2, g1, g2);
        let b = h_difference_form(t1, t2, g1, g2);
        out.push((a - b).norm() / a.norm().max(b.norm()));
    }
    out
}

pub fn gamma_inversion_samples(sp: &SpectralPoint, trials: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..trials)
        .map(|_| {
            let z = annulus_point(rng);
            let a = gamma_value(z, sp);
            let b = gamma_value(z.inv(), sp);
            (a - b).norm() / a.norm()
        })
        .collect()
}

/// `D(x,y) = D(y,x) = D(1/x,y) = D(x,1/y)`.
pub fn d_symmetry_samples(sp: &SpectralPoint, trials: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..trials)
        .map(|_| {
            let (x, y) = (annulus_point(rng), annulus_point(rng));
            let d = big_d(x, y, sp);
            let scale = (sp.s() + sp.s().inv()).norm() + 0.5 * (x + x.inv()).norm() + 0.5 * (y + y.inv()).norm();
            [big_d(y, x, sp), big_d(x.inv(), y, sp), big_d(x, y.inv(), sp)]
                .iter()
                .map(|v| (v - d).norm() / scale)
                .fold(0.0, f64::max)
        })
        .collect()
}

fn h_matrix(theta: &[f64], sp: &SpectralPoint) -> Vec<Complex64> {
    let n = theta.len();
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            a[j * n + k] = hker(theta[j], theta[k], sp);
        }
    }
    a
}

/// `det(h(θ_j, θ_k))_{4x4} = ∏_{j<k} h(θ_j, θ_k)²`, relative.
pub fn pfaffian_samples(sp: &SpectralPoint, trials: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..trials)
        .map(|_| {
            let theta: Vec<f64> = (0..4).map(|_| angle(rng)).collect();
            let a = h_matrix(&theta, sp);
            let det = determinant(&a, 4);
            let mut prod = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                for k in (j + 1)..4 {
                    prod *= a[j * 4 + k] * a[j * 4 + k];
                }
            }
            (det - prod).norm() / prod.norm()
        })
        .collect()
}

/// `det(h(θ_j, θ_k))_{3x3}`, scaled by the cube of the largest entry when that exceeds one.
pub fn odd_determinant_samples(sp: &SpectralPoint, trials: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..trials)
        .map(|_| {
            let theta: Vec<f64> = (0..3).map(|_| angle(rng)).collect();
            let a = h_matrix(&theta, sp);
            let scale = a.iter().map(|v| v.norm()).fold(1.0, f64::max).powi(3);
            determinant(&a, 3).norm() / scale
        })
        .collect()
}

/// Residue identity on `C_r` with `m` nodes at `points` equispaced `x` and `N = 0..=n_max`.
pub fn residue_samples(sp: &SpectralPoint, m: usize, points: usize, n_max: u32) -> Result<Vec<f64>> {
    let grid = ContourGrid::select(sp, 0.5, m)?;
    let mut out = Vec::new();
    for a in 0..points {
        let x = circle_node(grid.r(), a, points);
        for n in 0..=n_max {
            out.push(residue_identity(x, n, sp, &grid)?.2);
        }
    }
    Ok(out)
}

pub fn identity_battery(trials: usize, seed: u64, tol: &Tolerances) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for s in battery_points() {
        let sp = SpectralPoint::new(s)?;
        checks.push(IdentityCheck::new("factorization", s, &factorization_samples(&sp, trials, &mut rng), tol.algebraic));
        checks.push(IdentityCheck::new("h_dual_form", s, &h_dual_samples(&sp, trials, &mut rng), tol.algebraic));
        checks.push(IdentityCheck::new("gamma_inversion", s, &gamma_inversion_samples(&sp, trials, &mut rng), tol.algebraic));
        checks.push(IdentityCheck::new("d_symmetry", s, &d_symmetry_samples(&sp, trials, &mut rng), tol.algebraic));
    }
    let sp2 = SpectralPoint::real(2.0)?;
    let det_trials = trials.min(100).max(1);
    checks.push(IdentityCheck::new("pfaffian_4x4", sp2.s(), &pfaffian_samples(&sp2, det_trials, &mut rng), tol.pfaffian));
    checks.push(IdentityCheck::new(
        "odd_determinant_3x3",
        sp2.s(),
        &odd_determinant_samples(&sp2, det_trials, &mut rng),
        tol.odd_determinant,
    ));
    checks.push(IdentityCheck::new("residue", sp2.s(), &residue_samples(&sp2, 256, 16, 5)?, tol.residue_real));
    let spc = SpectralPoint::new(Complex64::new(2.0, 1.0))?;
    checks.push(IdentityCheck::new("residue", spc.s(), &residue_samples(&spc, 256, 16, 5)?, tol.residue_complex));
    Ok(IdentityReport { seed, checks })
}
