//! Exact-formula primitives of the low-temperature Ising representation.
//!
//! Everything here is a pure function of its arguments. The spectral
//! parameter is `s = sinh 2βJ`; the elliptic modulus `k = s^{-2}` and the
//! magnetization `(1 - k^2)^{1/8}` are derived from it. The function
//! `γ(z)` is the branch of `arccosh(s + 1/s - (z + 1/z)/2)` with
//! nonnegative real part, which is real and positive on `|z| = 1` when `s`
//! is real and larger than one.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Guard of both denominators of the kernel `h`: the sum form is used only
/// when `|sinh((γ1 + γ2)/2)|` is below this value and `|sin((θ1 + θ2)/2)|`
/// is not.
pub const H_SWITCH_THRESHOLD: f64 = 1e-3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The complex parameter `s` together with its derived modulus `k = s^{-2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPoint {
    s: Complex64,
    k: Complex64,
    #[serde(skip)]
    s_plus_inv: Complex64,
}

impl SpectralPoint {
    pub fn new(s: Complex64) -> Result<Self> {
        let modulus = s.norm();
        if !(modulus > 1.0) || !modulus.is_finite() {
            return Err(Error::PhaseViolation { modulus });
        }
        let inv = s.inv();
        Ok(SpectralPoint {
            s,
            k: inv * inv,
            s_plus_inv: s + inv,
        })
    }

    pub fn real(s: f64) -> Result<Self> {
        Self::new(Complex64::new(s, 0.0))
    }

    /// Point at distance `epsilon` outside the unit circle on the ray at angle `phi`.
    pub fn on_ray(phi: f64, epsilon: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(1.0 + epsilon, phi))
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }

    /// True when `s` lies on the physical real line `s > 1`.
    pub fn is_physical(&self) -> bool {
        self.s.im == 0.0 && self.s.re > 1.0
    }

    /// `s + 1/s - (z + 1/z)/2`, the value of `cosh γ(z)`.
    #[inline]
    pub fn cosh_argument(&self, z: Complex64) -> Complex64 {
        self.s_plus_inv - 0.5 * (z + z.inv())
    }
}

/// How the returned `γ` relates to the principal arccosh continuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GammaBranch {
    /// The principal continuation already had `Re γ >= 0`.
    Principal,
    /// The principal continuation was negated to enforce `Re γ >= 0`.
    Reflected,
    /// The cosh argument sits on the real cut `[-1, 1]`: both `±γ` have zero real part.
    Degenerate { plus: Complex64, minus: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaValue {
    pub value: Complex64,
    pub branch: GammaBranch,
}

impl GammaValue {
    /// Whether `Re γ >= 0` had to be enforced by negation.
    pub fn branch_flag(&self) -> bool {
        matches!(self.branch, GammaBranch::Reflected)
    }
}

/// `arccosh(w)` continued with factor-wise principal square roots.
#[inline]
fn arccosh_continuation(w: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    (w + (w - one).sqrt() * (w + one).sqrt()).ln()
}

/// `γ(z)` with `Re γ >= 0`; the hot-path variant of [`gamma`].
#[inline]
pub fn gamma_value(z: Complex64, sp: &SpectralPoint) -> Complex64 {
    let g = arccosh_continuation(sp.cosh_argument(z));
    if g.re < 0.0 {
        -g
    } else {
        g
    }
}

pub fn gamma(z: Complex64, sp: &SpectralPoint) -> Result<GammaValue> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidInput("gamma(z) requires z != 0".into()));
    }
    let w = sp.cosh_argument(z);
    let g = arccosh_continuation(w);
    let branch = if w.im == 0.0 && w.re.abs() <= 1.0 {
        GammaBranch::Degenerate { plus: g, minus: -g }
    } else if g.re < 0.0 {
        GammaBranch::Reflected
    } else {
        GammaBranch::Principal
    };
    let value = if g.re < 0.0 { -g } else { g };
    Ok(GammaValue { value, branch })
}

/// Like [`gamma`] but a degenerate branch is an error.
pub fn gamma_checked(z: Complex64, sp: &SpectralPoint) -> Result<GammaValue> {
    let g = gamma(z, sp)?;
    if let GammaBranch::Degenerate { plus, minus } = g.branch {
        return Err(Error::DegenerateBranch {
            w: sp.cosh_argument(z),
            plus,
            minus,
        });
    }
    Ok(g)
}

/// `D(x, y; s) = s + 1/s - (x + 1/x)/2 - (y + 1/y)/2`.
#[inline]
pub fn big_d(x: Complex64, y: Complex64, sp: &SpectralPoint) -> Complex64 {
    sp.cosh_argument(x) - 0.5 * (y + y.inv())
}

/// Spontaneous magnetization `(1 - k^2)^{1/8}` on the principal branch.
pub fn magnetization(sp: &SpectralPoint) -> Complex64 {
    let k2 = sp.k * sp.k;
    (Complex64::new(1.0, 0.0) - k2).powf(0.125)
}

/// `sinh((γ1 - γ2)/2) / sin((θ1 + θ2)/2)`.
#[inline]
pub fn h_sum_form(t1: f64, t2: f64, g1: Complex64, g2: Complex64) -> Complex64 {
    (0.5 * (g1 - g2)).sinh() / (0.5 * (t1 + t2)).sin()
}

/// `sin((θ1 - θ2)/2) / sinh((γ1 + γ2)/2)`.
#[inline]
pub fn h_difference_form(t1: f64, t2: f64, g1: Complex64, g2: Complex64) -> Complex64 {
    (0.5 * (t1 - t2)).sin() / (0.5 * (g1 + g2)).sinh()
}

/// Kernel `h` from precomputed `γ(e^{iθ1})`, `γ(e^{iθ2})`.
///
/// The difference form is free of cancellation while `Re(γ1 + γ2)` stays
/// away from zero, which holds off criticality, so it is the default. The
/// sum form's numerator cancels whenever `θ1 + θ2` is near a multiple of
/// `2π`, not only at the removable singularity itself.
#[inline]
pub fn hker_from_gammas(t1: f64, t2: f64, g1: Complex64, g2: Complex64) -> Complex64 {
    let den = (0.5 * (g1 + g2)).sinh();
    if den.norm() < H_SWITCH_THRESHOLD && (0.5 * (t1 + t2)).sin().abs() >= H_SWITCH_THRESHOLD {
        h_sum_form(t1, t2, g1, g2)
    } else {
        (0.5 * (t1 - t2)).sin() / den
    }
}

pub fn hker(t1: f64, t2: f64, sp: &SpectralPoint) -> Complex64 {
    let g1 = gamma_value((I * t1).exp(), sp);
    let g2 = gamma_value((I * t2).exp(), sp);
    hker_from_gammas(t1, t2, g1, g2)
}

/// `|y D(x,y;s) + (y - e^{-γ(x)})(y - e^{γ(x)})/2|`.
pub fn factorization_residual(x: Complex64, y: Complex64, sp: &SpectralPoint) -> f64 {
    let g = gamma_value(x, sp);
    let lhs = y * big_d(x, y, sp);
    let rhs = -0.5 * (y - (-g).exp()) * (y - g.exp());
    (lhs - rhs).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Solves `cosh(g) = target` for `g > 0` by bisection.
    fn arccosh_bisection(target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 50.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.cosh() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn gamma_matches_bisection_oracle() {
        let sp = SpectralPoint::real(2.0).unwrap();
        let g1 = gamma(c(1.0, 0.0), &sp).unwrap();
        let oracle = arccosh_bisection(1.5);
        assert!((oracle - 0.9624236501).abs() < 1e-10);
        assert!((g1.value - c(oracle, 0.0)).norm() < 1e-14);
        assert_eq!(g1.branch, GammaBranch::Principal);

        let gm1 = gamma(c(-1.0, 0.0), &sp).unwrap();
        let oracle = arccosh_bisection(3.5);
        assert!((oracle - 1.9248473).abs() < 1e-6);
        assert!((gm1.value - c(oracle, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn gamma_is_real_positive_and_symmetric_on_unit_circle() {
        let sp = SpectralPoint::real(2.0).unwrap();
        for a in 0..128 {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * a as f64 / 128.0);
            let g = gamma_value(z, &sp);
            assert!(g.re > 0.0 && g.im.abs() < 1e-15, "{g}");
            assert!((g - gamma_value(z.conj(), &sp)).norm() < 1e-14);
            assert!((g - gamma_value(z.inv(), &sp)).norm() < 1e-14);
        }
    }

    #[test]
    fn gamma_reports_degenerate_branch_on_the_cut() {
        // s = 2, z = e^{iθ} with cos θ = 2: not on the circle, but real z = 2 + sqrt(3)
        // makes (z + 1/z)/2 = 2, so w = 0.5 is on the cut.
        let sp = SpectralPoint::real(2.0).unwrap();
        let z = c(2.0 + 3.0_f64.sqrt(), 0.0);
        let w = sp.cosh_argument(z);
        assert!(w.im == 0.0 && (w.re - 0.5).abs() < 1e-12);
        let g = gamma(z, &sp).unwrap();
        assert!(matches!(g.branch, GammaBranch::Degenerate { .. }));
        assert!(gamma_checked(z, &sp).is_err());
        assert!(gamma(c(0.0, 0.0), &sp).is_err());
    }

    #[test]
    fn gamma_cosh_roundtrip_for_complex_s() {
        let sp = SpectralPoint::new(c(3.0, 0.5)).unwrap();
        for a in 0..64 {
            let z = Complex64::from_polar(0.9 + 0.1 * (a % 7) as f64 / 7.0, 0.37 * a as f64);
            let g = gamma_value(z, &sp);
            assert!(g.re >= 0.0);
            let w = sp.cosh_argument(z);
            assert!((g.cosh() - w).norm() < 1e-12 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn big_d_direct_values_and_symmetries() {
        let sp = SpectralPoint::real(2.0).unwrap();
        assert!((big_d(c(1.0, 0.0), c(1.0, 0.0), &sp) - c(0.5, 0.0)).norm() < 1e-15);
        let (x, y) = (c(0.3, -0.8), c(-1.1, 0.4));
        let d = big_d(x, y, &sp);
        assert!((d - big_d(y, x, &sp)).norm() < 1e-14);
        assert!((d - big_d(x.inv(), y, &sp)).norm() < 1e-14);
        assert!((d - big_d(x, y.inv(), &sp)).norm() < 1e-14);
        let root = (-gamma_value(c(1.0, 0.0), &sp)).exp();
        assert!(big_d(c(1.0, 0.0), root, &sp).norm() < 1e-12);
    }

    #[test]
    fn magnetization_values() {
        let sp = SpectralPoint::real(2.0).unwrap();
        let m = magnetization(&sp);
        assert!(m.im.abs() < 1e-16);
        assert!((m.re.powi(8) - 15.0 / 16.0).abs() < 1e-14);
        assert!((m.re - 0.99196).abs() < 1e-4);
        let far = SpectralPoint::real(1e200).unwrap();
        assert_eq!(magnetization(&far), c(1.0, 0.0));
        let near = SpectralPoint::real(1.0 + 1e-9).unwrap();
        assert!(magnetization(&near).re < 0.1);
        assert!(SpectralPoint::real(1.0).is_err());
        assert!(SpectralPoint::new(c(0.3, 0.9)).is_err());
    }

    #[test]
    fn hker_edge_cases() {
        let sp = SpectralPoint::real(2.0).unwrap();
        assert_eq!(hker(0.7, 0.7, &sp), c(0.0, 0.0));
        let t = 1.1;
        let h = hker(t, -t, &sp);
        assert!(h.is_finite());
        let expected = t.sin() / gamma_value(Complex64::from_polar(1.0, t), &sp).sinh();
        assert!((h - expected).norm() < 1e-14);
        assert!((hker(0.4, -0.9, &sp) + hker(-0.9, 0.4, &sp)).norm() < 1e-15);

        let (t1, t2) = (std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_6);
        let g1 = gamma_value(Complex64::from_polar(1.0, t1), &sp);
        let g2 = gamma_value(Complex64::from_polar(1.0, t2), &sp);
        let a = h_sum_form(t1, t2, g1, g2);
        let b = h_difference_form(t1, t2, g1, g2);
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn factorization_holds_at_sample_points() {
        for s in [c(2.0, 0.0), c(1.5, 0.0), c(3.0, 0.5)] {
            let sp = SpectralPoint::new(s).unwrap();
            for a in 0..50 {
                let x = Complex64::from_polar(0.9 + 0.002 * a as f64, 0.13 * a as f64);
                let y = Complex64::from_polar(0.5 + 0.03 * a as f64, -0.71 * a as f64);
                assert!(factorization_residual(x, y, &sp) < 1e-12 * (1.0 + y.norm_sqr()));
            }
        }
    }
}
