//! Convex-hull certificates for the vector systems attached to a singular
//! configuration `(x⁰, y⁰, s⁰) ∈ Tⁿ × Tⁿ × T`.
//!
//! Each singular factor of the integrand contributes one vector of `R^{2n}`:
//! `X` and `Y` for `∏x = 1` and `∏y = 1`, `X_jk` and `Y_jk` for
//! `x_j x_k = 1` and `y_j y_k = 1`, and `Z_j = (Im x_j at j, Im y_j at n + j)`
//! for `Re x_j + Re y_j = 2 Re s⁰`. A certificate either exhibits convex
//! coefficients reaching the origin or a direction `u` with
//! `min_i <u, V_i> = δ > 0`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::solve_real;
use crate::nickel::{nickel_re_values, root_of_unity};

pub const DEFAULT_TOL_ACTIVE: f64 = 1e-9;
pub const DEFAULT_TOL_HULL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const MODULUS_TOL: f64 = 1e-12;
/// Minimum distance of `Re s⁰` from every Nickel real part in random trials.
pub const NICKEL_CLEARANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusConfiguration {
    pub n: usize,
    pub x0: Vec<Complex64>,
    pub y0: Vec<Complex64>,
    pub s0: Complex64,
    pub tol_active: f64,
}

impl TorusConfiguration {
    pub fn new(x0: Vec<Complex64>, y0: Vec<Complex64>, s0: Complex64, tol_active: f64) -> Result<Self> {
        if x0.is_empty() || x0.len() != y0.len() {
            return Err(Error::InvalidInput(format!(
                "x0 and y0 must be nonempty and of equal length, got {} and {}",
                x0.len(),
                y0.len()
            )));
        }
        if !(tol_active > 0.0) {
            return Err(Error::InvalidInput(format!("tol_active must be positive, got {tol_active}")));
        }
        for z in x0.iter().chain(y0.iter()).chain(std::iter::once(&s0)) {
            if (z.norm() - 1.0).abs() > MODULUS_TOL {
                return Err(Error::InvalidInput(format!("{z} is not on the unit circle")));
            }
        }
        Ok(TorusConfiguration {
            n: x0.len(),
            x0,
            y0,
            s0,
            tol_active,
        })
    }

    /// The configuration with `Im s⁰ >= 0`, conjugating everything if needed.
    pub fn normalized(&self) -> Self {
        if self.s0.im >= 0.0 {
            return self.clone();
        }
        TorusConfiguration {
            n: self.n,
            x0: self.x0.iter().map(|z| z.conj()).collect(),
            y0: self.y0.iter().map(|z| z.conj()).collect(),
            s0: self.s0.conj(),
            tol_active: self.tol_active,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActiveFactors {
    pub fx: bool,
    pub fy: bool,
    pub fjk_x: Vec<(usize, usize)>,
    pub fjk_y: Vec<(usize, usize)>,
    pub g: Vec<usize>,
}

impl ActiveFactors {
    pub fn is_empty(&self) -> bool {
        !self.fx && !self.fy && self.fjk_x.is_empty() && self.fjk_y.is_empty() && self.g.is_empty()
    }
}

pub fn active_factors(cfg: &TorusConfiguration) -> ActiveFactors {
    let tol = cfg.tol_active;
    let one = Complex64::new(1.0, 0.0);
    let near_one = |z: Complex64| (z - one).norm() <= tol;
    let pairs = |v: &[Complex64]| {
        let mut out = Vec::new();
        for j in 0..v.len() {
            for k in (j + 1)..v.len() {
                if near_one(v[j] * v[k]) {
                    out.push((j, k));
                }
            }
        }
        out
    };
    ActiveFactors {
        fx: near_one(cfg.x0.iter().product()),
        fy: near_one(cfg.y0.iter().product()),
        fjk_x: pairs(&cfg.x0),
        fjk_y: pairs(&cfg.y0),
        g: (0..cfg.n)
            .filter(|&j| (cfg.x0[j].re + cfg.y0[j].re - 2.0 * cfg.s0.re).abs() <= tol)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VectorLabel {
    X,
    Y,
    Xjk(usize, usize),
    Yjk(usize, usize),
    Z(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullVectors {
    pub dim: usize,
    pub labels: Vec<VectorLabel>,
    pub vectors: Vec<Vec<f64>>,
}

impl HullVectors {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// The vectors of the active factors, after mapping to `Im s⁰ >= 0`.
pub fn active_vectors(cfg: &TorusConfiguration) -> Result<HullVectors> {
    let cfg = cfg.normalized();
    let n = cfg.n;
    let flags = active_factors(&cfg);
    if flags.is_empty() {
        return Err(Error::EmptyActiveSet);
    }
    let mut labels = Vec::new();
    let mut vectors = Vec::new();
    let mut push = |label, v: Vec<f64>| {
        labels.push(label);
        vectors.push(v);
    };
    let unit = |idx: &[usize]| {
        let mut v = vec![0.0; 2 * n];
        idx.iter().for_each(|&i| v[i] = 1.0);
        v
    };
    if flags.fx {
        push(VectorLabel::X, unit(&(0..n).collect::<Vec<_>>()));
    }
    if flags.fy {
        push(VectorLabel::Y, unit(&(n..2 * n).collect::<Vec<_>>()));
    }
    for &(j, k) in &flags.fjk_x {
        push(VectorLabel::Xjk(j, k), unit(&[j, k]));
    }
    for &(j, k) in &flags.fjk_y {
        push(VectorLabel::Yjk(j, k), unit(&[n + j, n + k]));
    }
    for &j in &flags.g {
        let mut v = vec![0.0; 2 * n];
        v[j] = cfg.x0[j].im;
        v[n + j] = cfg.y0[j].im;
        push(VectorLabel::Z(j), v);
    }
    Ok(HullVectors {
        dim: 2 * n,
        labels,
        vectors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HullCertificate {
    /// `Σ c_i V_i ≈ 0` with `c_i >= 0`, `Σ c_i = 1`; `residual = |Σ c_i V_i|`.
    Containment { coefficients: Vec<f64>, residual: f64 },
    /// `margin = min_i <direction, V_i>` with `|direction| = 1`; `distance` is
    /// the norm of the computed min-norm point.
    Separation { direction: Vec<f64>, margin: f64, distance: f64 },
    /// Neither certificate could be verified within the iteration budget.
    Indeterminate { distance: f64, gap: f64, iterations: usize },
}

impl HullCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            HullCertificate::Containment { .. } => "containment",
            HullCertificate::Separation { .. } => "separation",
            HullCertificate::Indeterminate { .. } => "indeterminate",
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(vectors: &[Vec<f64>], support: &[usize], weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; vectors[0].len()];
    for (&i, &w) in support.iter().zip(weights) {
        for (o, v) in out.iter_mut().zip(&vectors[i]) {
            *o += w * v;
        }
    }
    out
}

/// Point of minimum norm in the affine hull of the support.
fn affine_minimizer(vectors: &[Vec<f64>], support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    let size = k + 1;
    let mut a = vec![0.0; size * size];
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[r * size + c] = dot(&vectors[i], &vectors[j]);
        }
        a[r * size + k] = 1.0;
        a[k * size + r] = 1.0;
    }
    let mut b = vec![0.0; size];
    b[k] = 1.0;
    solve_real(&a, &b, size, 1e-14).map(|mut x| {
        x.truncate(k);
        x
    })
}

/// Minimum-norm point of the convex hull by Wolfe's method, turned into a
/// self-verified certificate.
pub fn hull_distance(vectors: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<HullCertificate> {
    if vectors.is_empty() {
        return Err(Error::EmptyActiveSet);
    }
    let norms: Vec<f64> = vectors.iter().map(|v| dot(v, v)).collect();
    let start = (0..vectors.len()).min_by(|&a, &b| norms[a].total_cmp(&norms[b])).unwrap();
    let mut support = vec![start];
    let mut lambda = vec![1.0];
    let mut x = vectors[start].clone();
    let mut iterations = 0;
    let mut gap = f64::INFINITY;
    let mut converged = false;

    'major: while iterations < max_iter {
        iterations += 1;
        let xx = dot(&x, &x);
        let (j, xp) = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (i, dot(&x, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        gap = xx - xp;
        if gap <= tol || xx <= tol * tol || support.contains(&j) {
            converged = true;
            break;
        }
        support.push(j);
        lambda.push(0.0);
        loop {
            iterations += 1;
            if iterations > max_iter {
                break 'major;
            }
            let mu = match affine_minimizer(vectors, &support) {
                Some(mu) => mu,
                None => break 'major,
            };
            if mu.iter().all(|&m| m > 1e-15) {
                lambda = mu;
                x = combine(vectors, &support, &lambda);
                break;
            }
            let theta = lambda
                .iter()
                .zip(&mu)
                .filter(|(_, &m)| m <= 1e-15)
                .map(|(&l, &m)| if l - m > 0.0 { l / (l - m) } else { 0.0 })
                .fold(1.0_f64, f64::min);
            for (l, &m) in lambda.iter_mut().zip(&mu) {
                *l = (1.0 - theta) * *l + theta * m;
            }
            let keep: Vec<bool> = lambda.iter().map(|&l| l > 1e-15).collect();
            support = support.iter().zip(&keep).filter(|(_, &k)| k).map(|(&i, _)| i).collect();
            lambda = lambda.iter().zip(&keep).filter(|(_, &k)| k).map(|(&l, _)| l).collect();
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            x = combine(vectors, &support, &lambda);
        }
    }

    let distance = dot(&x, &x).sqrt();
    if converged && distance <= tol {
        let mut coefficients = vec![0.0; vectors.len()];
        for (&i, &l) in support.iter().zip(&lambda) {
            coefficients[i] = l.max(0.0);
        }
        let total: f64 = coefficients.iter().sum();
        coefficients.iter_mut().for_each(|c| *c /= total);
        let all: Vec<usize> = (0..vectors.len()).collect();
        let point = combine(vectors, &all, &coefficients);
        let residual = dot(&point, &point).sqrt();
        if residual <= tol {
            return Ok(HullCertificate::Containment { coefficients, residual });
        }
    } else if converged {
        let direction: Vec<f64> = x.iter().map(|v| v / distance).collect();
        let margin = vectors
            .iter()
            .map(|v| dot(&direction, v))
            .fold(f64::INFINITY, f64::min);
        if margin > 0.0 {
            return Ok(HullCertificate::Separation {
                direction,
                margin,
                distance,
            });
        }
    }
    Ok(HullCertificate::Indeterminate {
        distance,
        gap,
        iterations,
    })
}

/// `δ = d - ε`: perturbing every vertex by at most `ε` lowers the norm of any
/// normalized nonnegative combination by at most `ε`.
pub fn lemma2_margin(distance: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    if epsilon >= distance {
        return Err(Error::NoPositiveMargin { epsilon, distance });
    }
    Ok(distance - epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Sample {
    pub samples: usize,
    pub violations: usize,
    /// Smallest observed `|Σ c_j U_j| / Σ c_j`.
    pub min_ratio: f64,
    pub delta: f64,
}

/// Checks `|Σ c_j U_j| >= δ Σ c_j` for random `|U_j - V_j| <= ε` and `c >= 0`.
pub fn lemma2_sampled_check(
    vectors: &[Vec<f64>],
    distance: f64,
    epsilon: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<Lemma2Sample> {
    let delta = lemma2_margin(distance, epsilon)?;
    let dim = vectors[0].len();
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..samples {
        let mut sum = vec![0.0; dim];
        let mut total = 0.0;
        for v in vectors {
            let mut dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = dot(&dir, &dir).sqrt().max(1e-300);
            let radius = epsilon * rng.gen::<f64>();
            dir.iter_mut().for_each(|d| *d *= radius / norm);
            let c: f64 = rng.gen();
            total += c;
            for ((s, vi), di) in sum.iter_mut().zip(v).zip(&dir) {
                *s += c * (vi + di);
            }
        }
        let ratio = dot(&sum, &sum).sqrt() / total;
        min_ratio = min_ratio.min(ratio);
        if ratio < delta {
            violations += 1;
        }
    }
    Ok(Lemma2Sample {
        samples,
        violations,
        min_ratio,
        delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    /// Random subset of `G_j` factors.
    RandomG,
    /// `∏x = 1` with every `G_j` active.
    XAllG,
    /// `∏x = ∏y = 1` with every `G_j` active.
    XYAllG,
    /// `x_j x_k = 1` on disjoint pairs plus random `G_j`.
    PairsG,
    /// [`Pattern::XAllG`] with the roles of `x` and `y` exchanged.
    YAllG,
    /// [`Pattern::PairsG`] with the roles of `x` and `y` exchanged.
    YPairsG,
}

const PATTERNS: [Pattern; 6] = [
    Pattern::RandomG,
    Pattern::XAllG,
    Pattern::XYAllG,
    Pattern::PairsG,
    Pattern::YAllG,
    Pattern::YPairsG,
];

fn unit(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Random `s⁰ = e^{iφ}`, `φ ∈ [0, π]`, with `Re s⁰` clear of every Nickel value.
fn random_non_nickel_s0(n: usize, rng: &mut ChaCha8Rng) -> Complex64 {
    let values: Vec<f64> = nickel_re_values(n, true).into_iter().map(|v| v.0).collect();
    loop {
        let s0 = unit(rng.gen_range(0.0..std::f64::consts::PI));
        if values.iter().all(|v| (v - s0.re).abs() >= NICKEL_CLEARANCE) {
            return s0;
        }
    }
}

/// Unit `y` with `Re y = target`, random sign of `Im y`.
fn partner(target: f64, rng: &mut ChaCha8Rng) -> Option<Complex64> {
    if target.abs() > 1.0 {
        return None;
    }
    let im = (1.0 - target * target).sqrt();
    Some(Complex64::new(target, if rng.gen::<bool>() { im } else { -im }))
}

/// A random `x` whose partner level `2c - Re x` is reachable.
fn compatible(c: f64, rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let x = unit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        if (2.0 * c - x.re).abs() <= 1.0 {
            return x;
        }
    }
}

/// Attempts one configuration of the given pattern; `None` means retry.
fn build_pattern(pattern: Pattern, n: usize, s0: Complex64, rng: &mut ChaCha8Rng) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
    let c = s0.re;
    let tau = std::f64::consts::PI;
    let random_unit = |rng: &mut ChaCha8Rng| unit(rng.gen_range(-tau..tau));
    match pattern {
        Pattern::RandomG => {
            let mut x = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            let forced = rng.gen_range(0..n);
            for j in 0..n {
                if j == forced || rng.gen::<bool>() {
                    let xj = compatible(c, rng);
                    y.push(partner(2.0 * c - xj.re, rng)?);
                    x.push(xj);
                } else {
                    x.push(random_unit(rng));
                    y.push(random_unit(rng));
                }
            }
            Some((x, y))
        }
        Pattern::XAllG | Pattern::YAllG => {
            let mut x: Vec<Complex64> = (0..n - 1).map(|_| compatible(c, rng)).collect();
            let prod: Complex64 = x.iter().product();
            x.push(prod.conj());
            let y = x
                .iter()
                .map(|xj| partner(2.0 * c - xj.re, rng))
                .collect::<Option<Vec<_>>>()?;
            Some(if pattern == Pattern::XAllG { (x, y) } else { (y, x) })
        }
        Pattern::XYAllG => build_xy_all_g(n, c, rng),
        Pattern::PairsG | Pattern::YPairsG => {
            let mut x: Vec<Complex64> = (0..n).map(|_| random_unit(rng)).collect();
            let mut y: Vec<Complex64> = (0..n).map(|_| random_unit(rng)).collect();
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let pairs = rng.gen_range(1..=n / 2);
            for p in 0..pairs {
                let (j, k) = (order[2 * p], order[2 * p + 1]);
                x[j] = compatible(c, rng);
                x[k] = x[j].conj();
                for idx in [j, k] {
                    if rng.gen::<bool>() {
                        y[idx] = partner(2.0 * c - x[idx].re, rng)?;
                    }
                }
            }
            Some(if pattern == Pattern::PairsG { (x, y) } else { (y, x) })
        }
    }
}

/// `∏x = ∏y = 1` and `Re x_j + Re y_j = 2c` for all `j`: all but the first and
/// last pairs are random on the level set, the last closes both products,
/// and the angle of `x_1` is tuned so the last pair lands on the level set.
fn build_xy_all_g(n: usize, c: f64, rng: &mut ChaCha8Rng) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
    let mut x: Vec<Complex64> = (0..n).map(|_| compatible(c, rng)).collect();
    let mut y: Vec<Complex64> = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    for xj in &x {
        let yj = partner(2.0 * c - xj.re, rng)?;
        signs.push(yj.im.signum());
        y.push(yj);
    }
    let lo = (2.0 * c - 1.0).max(-1.0).acos();
    let hi = (2.0 * c + 1.0).min(1.0).acos();
    // θ1 ∈ ±[hi, lo] keeps |2c - cos θ1| <= 1.
    let side = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let residual = |t: f64, x: &mut Vec<Complex64>, y: &mut Vec<Complex64>| {
        x[0] = unit(side * t);
        let target = (2.0 * c - x[0].re).clamp(-1.0, 1.0);
        y[0] = Complex64::new(target, signs[0] * (1.0 - target * target).sqrt());
        let px: Complex64 = x[..n - 1].iter().product();
        let py: Complex64 = y[..n - 1].iter().product();
        x[n - 1] = px.conj();
        y[n - 1] = py.conj();
        x[n - 1].re + y[n - 1].re - 2.0 * c
    };
    let steps = 512;
    let grid: Vec<f64> = (0..=steps).map(|i| hi + (lo - hi) * i as f64 / steps as f64).collect();
    let mut prev = residual(grid[0], &mut x, &mut y);
    for w in grid.windows(2) {
        let next = residual(w[1], &mut x, &mut y);
        if prev.signum() != next.signum() {
            let (mut a, mut b, mut fa) = (w[0], w[1], prev);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = residual(mid, &mut x, &mut y);
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
                if b - a < 1e-16 {
                    break;
                }
            }
            let f = residual(0.5 * (a + b), &mut x, &mut y);
            return if f.abs() < 1e-12 { Some((x, y)) } else { None };
        }
        prev = next;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub pattern: Pattern,
    pub configuration: TorusConfiguration,
    pub labels: Vec<VectorLabel>,
    pub certificate: HullCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessOutcome {
    pub name: String,
    pub labels: Vec<VectorLabel>,
    pub certificate: HullCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub separations: usize,
    pub containments: usize,
    pub indeterminate: usize,
    pub min_margin: f64,
    pub witness_containments: usize,
    pub max_witness_residual: f64,
    /// Random trials that did not separate, with full configurations.
    pub failures: Vec<TrialOutcome>,
    pub witnesses: Vec<WitnessOutcome>,
}

impl Lemma1Report {
    pub fn passed(&self, min_margin: f64, max_residual: f64) -> bool {
        self.separations == self.trials
            && self.min_margin > min_margin
            && self.witness_containments == self.witnesses.len()
            && self.max_witness_residual < max_residual
    }
}

/// One random non-Nickel configuration with a nonempty active set.
pub fn random_configuration(n: usize, seed: u64, trial: usize, tol_active: f64) -> (Pattern, TorusConfiguration) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    loop {
        let s0 = random_non_nickel_s0(n, &mut rng);
        let pattern = PATTERNS[rng.gen_range(0..PATTERNS.len())];
        if let Some((x, y)) = build_pattern(pattern, n, s0, &mut rng) {
            if let Ok(cfg) = TorusConfiguration::new(x, y, s0, tol_active) {
                if !active_factors(&cfg).is_empty() {
                    return (pattern, cfg);
                }
            }
        }
    }
}

/// Configurations with `s⁰` a Nickel point for which the hull contains the origin.
pub fn nickel_witnesses(n: usize, tol_active: f64) -> Vec<(String, TorusConfiguration)> {
    let roots: Vec<Complex64> = (0..n).map(|j| root_of_unity(j, n)).collect();
    let lower: Vec<Complex64> = roots.iter().copied().filter(|r| r.im < 0.0).collect();
    let s0_for = |re: f64| Complex64::new(re, (1.0 - re * re).max(0.0).sqrt());
    let mut out = Vec::new();
    let mut add = |name: String, x: Complex64, y: Complex64| {
        let s0 = s0_for(0.5 * (x.re + y.re));
        if let Ok(cfg) = TorusConfiguration::new(vec![x; n], vec![y; n], s0, tol_active) {
            out.push((name, cfg));
        }
    };
    for &a in &lower {
        for &b in &lower {
            add(format!("equal roots x={a}, y={b}"), a, b);
        }
    }
    for &a in &lower {
        for y in [1.0, -1.0] {
            add(format!("x={a}, y={y}"), a, Complex64::new(y, 0.0));
        }
    }
    // Real roots with y = ±1: every Z_j vanishes.
    for &a in roots.iter().filter(|r| r.im == 0.0) {
        for y in [1.0, -1.0] {
            add(format!("x={a}, y={y} (zero Z vectors)"), a, Complex64::new(y, 0.0));
        }
    }
    out
}

/// `{X, Z_1..Z_4}` with `α_j = -1`, `β_j = 0`: `X + Σ Z_j = 0`.
pub fn explicit_n4_witness() -> Vec<Vec<f64>> {
    let mut vs = vec![vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]];
    for j in 0..4 {
        let mut z = vec![0.0; 8];
        z[j] = -1.0;
        vs.push(z);
    }
    vs
}

pub fn lemma1_randomized_verify(n: usize, trials: usize, seed: u64, tol_hull: f64, tol_active: f64) -> Result<Lemma1Report> {
    if !(n == 2 || n == 4) {
        return Err(Error::UnsupportedOrder {
            order: n,
            supported: "n in {2, 4}",
        });
    }
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (pattern, configuration) = random_configuration(n, seed, trial, tol_active);
            let vectors = active_vectors(&configuration).expect("nonempty by construction");
            let certificate = hull_distance(&vectors.vectors, tol_hull, DEFAULT_MAX_ITER)
                .expect("nonempty by construction");
            TrialOutcome {
                trial,
                pattern,
                configuration,
                labels: vectors.labels,
                certificate,
            }
        })
        .collect();

    let mut witnesses = Vec::new();
    for (name, cfg) in nickel_witnesses(n, tol_active) {
        let vectors = active_vectors(&cfg)?;
        let certificate = hull_distance(&vectors.vectors, tol_hull, DEFAULT_MAX_ITER)?;
        witnesses.push(WitnessOutcome {
            name,
            labels: vectors.labels,
            certificate,
        });
    }
    if n == 4 {
        let vs = explicit_n4_witness();
        witnesses.push(WitnessOutcome {
            name: "explicit {X, Z_1..Z_4}".into(),
            labels: vec![
                VectorLabel::X,
                VectorLabel::Z(0),
                VectorLabel::Z(1),
                VectorLabel::Z(2),
                VectorLabel::Z(3),
            ],
            certificate: hull_distance(&vs, tol_hull, DEFAULT_MAX_ITER)?,
        });
    }

    let mut report = Lemma1Report {
        n,
        trials,
        seed,
        separations: 0,
        containments: 0,
        indeterminate: 0,
        min_margin: f64::INFINITY,
        witness_containments: 0,
        max_witness_residual: 0.0,
        failures: Vec::new(),
        witnesses,
    };
    for o in outcomes {
        match &o.certificate {
            HullCertificate::Separation { margin, .. } => {
                report.separations += 1;
                report.min_margin = report.min_margin.min(*margin);
            }
            HullCertificate::Containment { .. } => {
                report.containments += 1;
                report.failures.push(o);
            }
            HullCertificate::Indeterminate { .. } => {
                report.indeterminate += 1;
                report.failures.push(o);
            }
        }
    }
    for w in &report.witnesses {
        match &w.certificate {
            HullCertificate::Containment { residual, .. } => {
                report.witness_containments += 1;
                report.max_witness_residual = report.max_witness_residual.max(*residual);
            }
            HullCertificate::Indeterminate { .. } => report.indeterminate += 1,
            HullCertificate::Separation { .. } => {}
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Decreasing,
    Increasing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub s0_re: f64,
    pub direction: Direction,
    pub theta: Vec<f64>,
    pub ratio: Vec<f64>,
    pub monotone: bool,
}

/// Tabulates `sin θ / sin φ` on the level set `cos θ + cos φ = 2 s0_re` with
/// `θ, φ ∈ (-π, 0)`, sampled at interior points in increasing `θ`.
pub fn ratio_monotonicity_check(s0_re: f64, samples: usize) -> Result<RatioReport> {
    if s0_re == 0.0 || !s0_re.is_finite() {
        return Err(Error::InvalidInput(format!("s0_re must be nonzero, got {s0_re}")));
    }
    if s0_re.abs() >= 1.0 {
        return Err(Error::EmptyLevelSet { target: 2.0 * s0_re });
    }
    if samples < 2 {
        return Err(Error::InvalidInput("at least two samples are needed".into()));
    }
    let c2 = 2.0 * s0_re;
    let lo = (c2 - 1.0).max(-1.0);
    let hi = (c2 + 1.0).min(1.0);
    // cos is increasing on (-π, 0), so cos θ ∈ (lo, hi) ⇔ θ ∈ (-acos lo, -acos hi).
    let (t0, t1) = (-lo.acos(), -hi.acos());
    let theta: Vec<f64> = (0..samples)
        .map(|i| t0 + (t1 - t0) * (i as f64 + 0.5) / samples as f64)
        .collect();
    let ratio: Vec<f64> = theta
        .iter()
        .map(|&t| {
            let phi = -(c2 - t.cos()).clamp(-1.0, 1.0).acos();
            t.sin() / phi.sin()
        })
        .collect();
    let direction = if s0_re > 0.0 {
        Direction::Decreasing
    } else {
        Direction::Increasing
    };
    let monotone = ratio.windows(2).all(|w| match direction {
        Direction::Decreasing => w[1] < w[0],
        Direction::Increasing => w[1] > w[0],
    });
    Ok(RatioReport {
        s0_re,
        direction,
        theta,
        ratio,
        monotone,
    })
}
