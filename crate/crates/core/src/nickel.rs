//! Nickel points: `s⁰` on the unit circle whose real part is the average
//! of the real parts of two `n`th roots of unity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEDUP_TOL: f64 = 1e-12;
pub const ON_CIRCLE_TOL: f64 = 1e-9;

/// `cos(2πj/n)` and `sin(2πj/n)`, exact at multiples of a quarter and a sixth turn.
pub fn root_of_unity(j: usize, n: usize) -> Complex64 {
    let j = j % n;
    if (4 * j).is_multiple_of(n) {
        return match 4 * j / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let t = 2.0 * PI * j as f64 / n as f64;
    let (s, c) = t.sin_cos();
    if (6 * j).is_multiple_of(n) {
        let half_sqrt3 = 0.75_f64.sqrt();
        let re = if c > 0.0 { 0.5 } else { -0.5 };
        let im = if s > 0.0 { half_sqrt3 } else { -half_sqrt3 };
        return Complex64::new(re, im);
    }
    Complex64::new(c, s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NickelPoint {
    pub n: usize,
    /// Smallest root-index pair `(j, k)`, `j <= k`, realizing `re_value`.
    pub witness: (usize, usize),
    pub re_value: f64,
    /// Upper point first; a single point when `re_value = ±1`.
    pub points: Vec<Complex64>,
}

impl NickelPoint {
    fn from_re(n: usize, witness: (usize, usize), re_value: f64) -> Self {
        let points = if re_value.abs() >= 1.0 {
            vec![Complex64::new(re_value.signum(), 0.0)]
        } else {
            let im = (1.0 - re_value * re_value).sqrt();
            vec![Complex64::new(re_value, im), Complex64::new(re_value, -im)]
        };
        NickelPoint {
            n,
            witness,
            re_value,
            points,
        }
    }

    /// Angle of the upper point in `[0, π]`.
    pub fn angle(&self) -> f64 {
        self.points[0].arg().abs()
    }
}

fn pair_re(j: usize, k: usize, n: usize) -> f64 {
    0.5 * (root_of_unity(j, n).re + root_of_unity(k, n).re)
}

/// Distinct real parts `(cos(2πj/n) + cos(2πk/n))/2` with witnesses, sorted by
/// decreasing value (increasing angle).
pub fn nickel_re_values(n: usize, allow_repeats: bool) -> Vec<(f64, (usize, usize))> {
    let mut all = Vec::new();
    for j in 0..n {
        for k in j..n {
            if k == j && !allow_repeats {
                continue;
            }
            all.push((pair_re(j, k, n), (j, k)));
        }
    }
    all.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut groups: Vec<Vec<(f64, (usize, usize))>> = Vec::new();
    for item in all {
        match groups.last_mut() {
            Some(g) if (g[0].0 - item.0).abs() <= DEDUP_TOL => g.push(item),
            _ => groups.push(vec![item]),
        }
    }
    groups
        .into_iter()
        .map(|g| *g.iter().min_by_key(|e| e.1).unwrap())
        .collect()
}

/// Nickel points of order `n`, including pairs of a root with itself.
pub fn enumerate(n: usize) -> Vec<NickelPoint> {
    enumerate_with(n, true)
}

pub fn enumerate_with(n: usize, allow_repeats: bool) -> Vec<NickelPoint> {
    if n == 0 {
        return Vec::new();
    }
    nickel_re_values(n, allow_repeats)
        .into_iter()
        .map(|(re, w)| NickelPoint::from_re(n, w, re))
        .collect()
}

/// All points of [`enumerate`] sorted by angle in `[0, 2π)`.
pub fn points(n: usize, allow_repeats: bool) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = enumerate_with(n, allow_repeats)
        .into_iter()
        .flat_map(|p| p.points)
        .collect();
    pts.sort_by(|a, b| a.arg().rem_euclid(2.0 * PI).total_cmp(&b.arg().rem_euclid(2.0 * PI)));
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NickelCheck {
    pub is_nickel: bool,
    pub witness: (usize, usize),
    /// `min |Re s⁰ - (cos(2πj/n) + cos(2πk/n))/2|` over pairs.
    pub distance: f64,
}

pub fn is_nickel(s0: Complex64, n: usize, tol: f64) -> Result<NickelCheck> {
    is_nickel_with(s0, n, tol, true)
}

pub fn is_nickel_with(s0: Complex64, n: usize, tol: f64, allow_repeats: bool) -> Result<NickelCheck> {
    let deviation = (s0.norm() - 1.0).abs();
    if !(deviation < ON_CIRCLE_TOL) {
        return Err(Error::OffCircle { s0, deviation });
    }
    if n == 0 {
        return Err(Error::InvalidInput("order n must be positive".into()));
    }
    let (re, witness) = nickel_re_values(n, allow_repeats)
        .into_iter()
        .min_by(|a, b| (a.0 - s0.re).abs().total_cmp(&(b.0 - s0.re).abs()))
        .ok_or_else(|| Error::InvalidInput(format!("no root pairs for n = {n} without repeats")))?;
    let distance = (re - s0.re).abs();
    Ok(NickelCheck {
        is_nickel: distance <= tol,
        witness,
        distance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub n: usize,
    pub count: usize,
    /// Largest angular gap between circularly consecutive points.
    pub max_gap: f64,
}

pub fn density_table(n_list: &[usize]) -> Vec<DensityRow> {
    n_list
        .iter()
        .map(|&n| {
            let angles: Vec<f64> = points(n, true)
                .iter()
                .map(|p| p.arg().rem_euclid(2.0 * PI))
                .collect();
            let max_gap = if angles.is_empty() {
                2.0 * PI
            } else {
                let wrap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
                angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max)
            };
            DensityRow {
                n,
                count: angles.len(),
                max_gap,
            }
        })
        .collect()
}
