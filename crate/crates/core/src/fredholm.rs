//! Nyström evaluation of `<σ00 σMN> = M² det(I + g_MN)` with kernel
//! `g_MN(θ1, θ2) = e^{iMθ1 - Nγ(e^{iθ1})} h(θ1, θ2)` acting on `L²(-π, π)`
//! with weight `1/(2π sinh γ(e^{iθ}))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::correlation::{CorrelationResult, Method};
use crate::error::{Error, Result};
use crate::formfactor::ThetaGrid;
use crate::linalg::{lu_log_det, LogDet};
use crate::spectral::{hker_from_gammas, magnetization, SpectralPoint};

pub const MIN_NODES: usize = 32;
pub const PIVOT_FLOOR: f64 = 1e-13;
pub const SINH_FLOOR: f64 = 1e-6;

/// Discretized operator `A_ij = g_MN(θ_i, θ_j) w_j` on the uniform periodic grid.
#[derive(Debug, Clone)]
pub struct NystromSystem {
    pub m: usize,
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row-major `m x m`.
    pub matrix: Vec<Complex64>,
}

impl NystromSystem {
    pub fn new(lattice_m: i64, lattice_n: i64, sp: &SpectralPoint, m: usize) -> Result<Self> {
        let grid = ThetaGrid::new(m, sp);
        let sinh: Vec<f64> = grid.gamma.iter().map(|g| g.sinh().re).collect();
        let min_sinh = sinh.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min_sinh >= SINH_FLOOR) {
            return Err(Error::NearCriticality { min_sinh });
        }
        let dtheta = 2.0 * PI / m as f64;
        let weights: Vec<f64> = sinh.iter().map(|s| dtheta / (2.0 * PI * s)).collect();
        let matrix: Vec<Complex64> = (0..m)
            .into_par_iter()
            .flat_map_iter(|i| {
                let (ti, gi) = (grid.theta[i], grid.gamma[i]);
                let row_factor = (Complex64::new(0.0, lattice_m as f64 * ti) - lattice_n as f64 * gi).exp();
                let (theta, gamma, weights) = (&grid.theta, &grid.gamma, &weights);
                (0..m).map(move |j| row_factor * hker_from_gammas(ti, theta[j], gi, gamma[j]) * weights[j])
            })
            .collect();
        Ok(NystromSystem {
            m,
            theta: grid.theta,
            weights,
            matrix,
        })
    }

    /// `log det(I + A)`.
    pub fn log_det(&self) -> LogDet {
        let mut work = self.matrix.clone();
        for i in 0..self.m {
            work[i * self.m + i] += 1.0;
        }
        lu_log_det(&mut work, self.m)
    }
}

fn det_at(lattice_m: i64, lattice_n: i64, sp: &SpectralPoint, m: usize) -> Result<Complex64> {
    let sys = NystromSystem::new(lattice_m, lattice_n, sp, m)?;
    let d = sys.log_det();
    if d.min_pivot < PIVOT_FLOOR {
        return Err(Error::IllConditioned { m, pivot: d.min_pivot });
    }
    Ok(d.value())
}

/// `M² det(I + A)` on `m` nodes, with `err_est` from the `m/2`-node system.
pub fn fredholm_correlation(lattice_m: i64, lattice_n: i64, sp: &SpectralPoint, m: usize) -> Result<CorrelationResult> {
    if !sp.is_physical() {
        return Err(Error::InvalidInput(format!(
            "the Fredholm route needs real s > 1, got {}",
            sp.s()
        )));
    }
    if lattice_n < 0 {
        return Err(Error::InvalidInput(format!(
            "the Fredholm representation needs N >= 0, got {lattice_n}"
        )));
    }
    if m < MIN_NODES || !m.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "node count must be even and >= {MIN_NODES}, got {m}"
        )));
    }
    let fine = det_at(lattice_m, lattice_n, sp, m)?;
    let coarse = det_at(lattice_m, lattice_n, sp, m / 2)?;
    let mag = magnetization(sp);
    let mag2 = mag * mag;
    Ok(CorrelationResult {
        lattice_m,
        lattice_n,
        s: sp.s(),
        value: mag2 * fine,
        err_est: (mag2 * (fine - coarse)).norm(),
        method: Method::Fredholm,
        nodes: m,
        terms: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formfactor::formfactor_term;

    fn sp2() -> SpectralPoint {
        SpectralPoint::real(2.0).unwrap()
    }

    #[test]
    fn weights_are_positive_and_diagonal_vanishes() {
        let sys = NystromSystem::new(1, 1, &sp2(), 64).unwrap();
        assert!(sys.weights.iter().all(|&w| w > 0.0 && w.is_finite()));
        for i in 0..64 {
            assert_eq!(sys.matrix[i * 64 + i], Complex64::new(0.0, 0.0));
        }
        assert!(sys.matrix.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }

    #[test]
    fn second_order_trace_term_matches_first_form_factor_term() {
        // det(I + A) = 1 - tr(A²)/2 + O(A⁴) since tr A = 0 and odd orders vanish.
        let sp = sp2();
        let m = 64;
        let sys = NystromSystem::new(2, 1, &sp, m).unwrap();
        let mut tr2 = Complex64::new(0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                tr2 += sys.matrix[i * m + j] * sys.matrix[j * m + i];
            }
        }
        let t1 = formfactor_term(2, 1, &sp, 1, m).unwrap().value;
        assert!((-0.5 * tr2 - t1).norm() < 1e-12 * t1.norm());
    }

    #[test]
    fn diagonal_value_is_one() {
        let r = fredholm_correlation(0, 0, &sp2(), 128).unwrap();
        assert!((r.value - 1.0).norm() < 1e-8, "{}", r.value);
    }

    #[test]
    fn far_sites_decouple() {
        let sp = sp2();
        let r = fredholm_correlation(40, 40, &sp, 64).unwrap();
        let mag = magnetization(&sp);
        assert!((r.value - mag * mag).norm() < 1e-10 * (mag * mag).norm());
    }

    #[test]
    fn even_in_m() {
        let sp = sp2();
        let a = fredholm_correlation(3, 1, &sp, 64).unwrap().value;
        let b = fredholm_correlation(-3, 1, &sp, 64).unwrap().value;
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn rejects_invalid_input() {
        let sp = sp2();
        assert!(fredholm_correlation(0, 0, &sp, 16).is_err());
        assert!(fredholm_correlation(0, -1, &sp, 64).is_err());
        let complex = SpectralPoint::new(Complex64::new(2.0, 0.5)).unwrap();
        assert!(fredholm_correlation(0, 0, &complex, 64).is_err());
    }

    #[test]
    fn near_critical_weights_are_reported() {
        let sp = SpectralPoint::real(1.0 + 1e-7).unwrap();
        assert!(matches!(
            fredholm_correlation(0, 0, &sp, 64),
            Err(Error::NearCriticality { .. })
        ));
    }
}
