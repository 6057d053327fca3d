//! Small dense linear algebra: complex LU determinants and real solves.

use num_complex::Complex64;

/// Determinant stored as `exp(log_abs) * exp(i * phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub phase: f64,
    /// Smallest pivot magnitude met during elimination.
    pub min_pivot: f64,
}

impl LogDet {
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.log_abs.exp(), self.phase)
    }
}

/// LU with partial pivoting on a row-major `n x n` matrix, consumed in place.
///
/// A zero pivot yields `log_abs = -inf`.
pub fn lu_log_det(a: &mut [Complex64], n: usize) -> LogDet {
    assert_eq!(a.len(), n * n);
    let mut log_abs = 0.0;
    let mut phase = 0.0;
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let (piv_row, piv_mag) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        min_pivot = min_pivot.min(piv_mag);
        if piv_mag == 0.0 {
            return LogDet {
                log_abs: f64::NEG_INFINITY,
                phase: 0.0,
                min_pivot: 0.0,
            };
        }
        if piv_row != col {
            for c in 0..n {
                a.swap(piv_row * n + c, col * n + c);
            }
            phase += std::f64::consts::PI;
        }
        let pivot = a[col * n + col];
        log_abs += piv_mag.ln();
        phase += pivot.arg();
        let inv = pivot.inv();
        for r in (col + 1)..n {
            let factor = a[r * n + col] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (upper, lower) = a.split_at_mut(r * n);
            let pivot_row = &upper[col * n..col * n + n];
            let row = &mut lower[..n];
            for c in (col + 1)..n {
                row[c] -= factor * pivot_row[c];
            }
        }
    }
    LogDet {
        log_abs,
        phase: phase.rem_euclid(2.0 * std::f64::consts::PI),
        min_pivot,
    }
}

pub fn determinant(a: &[Complex64], n: usize) -> Complex64 {
    let mut work = a.to_vec();
    let d = lu_log_det(&mut work, n);
    if d.log_abs == f64::NEG_INFINITY {
        Complex64::new(0.0, 0.0)
    } else {
        d.value()
    }
}

/// Solves the real system `a x = b` (row-major, `n x n`) by Gaussian
/// elimination with partial pivoting. Returns `None` if a pivot falls
/// below `pivot_tol` times the largest entry.
pub fn solve_real(a: &[f64], b: &[f64], n: usize, pivot_tol: f64) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(1e-300);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap();
        if m[piv * n + col].abs() <= pivot_tol * scale {
            return None;
        }
        if piv != col {
            for c in 0..n {
                m.swap(piv * n + c, col * n + c);
            }
            x.swap(piv, col);
        }
        let p = m[col * n + col];
        for r in (col + 1)..n {
            let f = m[r * n + col] / p;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r * n + c] -= f * m[col * n + c];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for c in (col + 1)..n {
            acc -= m[col * n + c] * x[c];
        }
        x[col] = acc / m[col * n + col];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn determinant_of_small_matrices() {
        let a = [c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)];
        let expected = c(3.0, 0.0) - c(2.0, 1.0) * c(0.0, -1.0);
        assert!((determinant(&a, 2) - expected).norm() < 1e-14);

        let perm = [
            c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
        ];
        assert!((determinant(&perm, 3) - c(1.0, 0.0)).norm() < 1e-15);
        let swap = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        assert!((determinant(&swap, 2) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn log_det_survives_large_scales() {
        let n = 300;
        let mut a = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            a[i * n + i] = c(10.0, 0.0);
        }
        let d = lu_log_det(&mut a, n);
        assert!((d.log_abs - n as f64 * 10.0_f64.ln()).abs() < 1e-9);
        assert!(d.phase.abs() < 1e-12 || (d.phase - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn real_solve_roundtrip_and_singular_detection() {
        let a = [4.0, 1.0, 2.0, 1.0, 3.0, 0.0, 2.0, 0.0, 5.0];
        let x = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..3).map(|i| (0..3).map(|j| a[i * 3 + j] * x[j]).sum()).collect();
        let got = solve_real(&a, &b, 3, 1e-14).unwrap();
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-13);
        }
        let sing = [1.0, 2.0, 2.0, 4.0];
        assert!(solve_real(&sing, &[1.0, 2.0], 2, 1e-12).is_none());
    }
}
