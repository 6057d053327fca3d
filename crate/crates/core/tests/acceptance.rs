//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p ising-core --test acceptance`. The run reports
//! and exits zero; set `ACCEPTANCE_STRICT=1` to exit nonzero on any FAIL.
//! Criterion 10 is exploratory and prints REVIEW on a miss.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ising_core::chi::{chi_n, chi_n_reduced, corr_window, lattice_sum_from_window, DEFAULT_BUDGET};
use ising_core::formfactor::{correlation_ff, formfactor_term};
use ising_core::fredholm::fredholm_correlation;
use ising_core::hull::{
    active_vectors, hull_distance, lemma1_randomized_verify, lemma2_sampled_check, random_configuration,
    HullCertificate, DEFAULT_MAX_ITER, DEFAULT_TOL_ACTIVE, DEFAULT_TOL_HULL,
};
use ising_core::linalg::determinant;
use ising_core::identities::{
    d_symmetry_samples, factorization_samples, gamma_inversion_samples, h_dual_samples, residue_samples,
};
use ising_core::nickel::{enumerate, points};
use ising_core::quadrature::{circle_node, select_radius, ContourGrid};
use ising_core::scan::{divergence_indicator, ray_scan, ScanPolicy, ScanStatus};
use ising_core::spectral::{big_d, gamma_value, hker, magnetization};
use ising_core::SpectralPoint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Pass,
    Fail,
    Review,
}

struct Outcome {
    status: Status,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            status: Status::Pass,
            details: Vec::new(),
        }
    }

    /// Records a hard sub-check.
    fn check(&mut self, ok: bool, msg: String) {
        if !ok {
            self.status = Status::Fail;
        }
        self.details.push(format!("{} {msg}", if ok { "ok  " } else { "FAIL" }));
    }

    /// Records an exploratory sub-check.
    fn explore(&mut self, ok: bool, msg: String) {
        if !ok && self.status == Status::Pass {
            self.status = Status::Review;
        }
        self.details.push(format!("{} {msg}", if ok { "ok  " } else { "REVIEW" }));
    }

    fn note(&mut self, msg: String) {
        self.details.push(format!("     {msg}"));
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sp(re: f64, im: f64) -> SpectralPoint {
    SpectralPoint::new(c(re, im)).expect("physical test point")
}

fn max(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max)
}

/// Determinant by explicit permutation sum.
fn leibniz_det(a: &[Complex64], n: usize) -> Complex64 {
    fn perms(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for k in 0..n {
            if !prefix.contains(&k) {
                prefix.push(k);
                perms(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut all = Vec::new();
    perms(&mut Vec::new(), n, &mut all);
    all.iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (0..n).map(|i| a[i * n + p[i]]).product::<Complex64>() * sign
        })
        .sum()
}

fn crit1() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 1000;
    for (re, im) in [(2.0, 0.0), (1.5, 0.0), (3.0, 0.5)] {
        let p = sp(re, im);
        for (name, v) in [
            ("factorization", factorization_samples(&p, trials, &mut rng)),
            ("h dual form", h_dual_samples(&p, trials, &mut rng)),
            ("gamma(z) = gamma(1/z)", gamma_inversion_samples(&p, trials, &mut rng)),
            ("D symmetries", d_symmetry_samples(&p, trials, &mut rng)),
        ] {
            let m = max(&v);
            out.check(
                v.len() == trials && m < 1e-11,
                format!("s={}: {name} max rel residual {m:.2e} over {} samples (< 1e-11)", c(re, im), v.len()),
            );
        }
    }
    out
}

fn crit2() -> Outcome {
    let mut out = Outcome::new();
    let p = sp(2.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst4, mut worst_pf, mut worst3, mut worst3_lib) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut misses = Vec::new();
    for _ in 0..100 {
        let theta: Vec<f64> = (0..4).map(|_| rng.gen_range(-PI..PI)).collect();
        let a: Vec<Complex64> = (0..16).map(|i| hker(theta[i / 4], theta[i % 4], &p)).collect();
        let det = determinant(&a, 4);
        let mut prod = c(1.0, 0.0);
        for j in 0..4 {
            for k in (j + 1)..4 {
                prod *= a[j * 4 + k] * a[j * 4 + k];
            }
        }
        let rel = (det - prod).norm() / prod.norm();
        worst4 = worst4.max(rel);
        // Independent route: det of an antisymmetric 4x4 is the square of its Pfaffian.
        let terms = [a[1] * a[11], -a[2] * a[7], a[3] * a[6]];
        let pf: Complex64 = terms.iter().sum();
        worst_pf = worst_pf.max((pf * pf - prod).norm() / prod.norm());
        if rel >= 1e-10 {
            // Relative perturbation of Pf² from rounding each entry to f64.
            let floor = 2.0 * f64::EPSILON * terms.iter().map(|t| t.norm()).sum::<f64>() / pf.norm();
            let sep = (0..4)
                .flat_map(|j| (j + 1..4).map(move |k| (j, k)))
                .map(|(j, k)| (theta[j] - theta[k]).abs())
                .fold(f64::INFINITY, f64::min);
            misses.push(format!("rel {rel:.2e}, entry-rounding floor {floor:.2e}, min angle gap {sep:.3}"));
        }

        let t3: Vec<f64> = (0..3).map(|_| rng.gen_range(-PI..PI)).collect();
        let b: Vec<Complex64> = (0..9).map(|i| hker(t3[i / 3], t3[i % 3], &p)).collect();
        let scale = b.iter().map(|v| v.norm()).fold(1.0, f64::max).powi(3);
        worst3 = worst3.max(leibniz_det(&b, 3).norm() / scale);
        worst3_lib = worst3_lib.max(determinant(&b, 3).norm() / scale);
    }
    out.check(worst4 < 1e-10, format!("4x4 det vs prod h^2: max rel residual {worst4:.2e} (< 1e-10)"));
    for m in &misses {
        out.note(m.clone());
    }
    out.note(format!("Pfaffian route: max rel |Pf^2 - prod h^2| {worst_pf:.2e}"));
    out.check(
        worst3 < 1e-12 && worst3_lib < 1e-12,
        format!("3x3 det: max scaled |det| {worst3_lib:.2e} (LU), {worst3:.2e} (permutation sum) (< 1e-12)"),
    );
    out
}

fn crit3() -> Outcome {
    let mut out = Outcome::new();
    let p = sp(2.0, 0.0);
    match residue_samples(&p, 256, 16, 5) {
        Ok(v) => {
            let m = max(&v);
            out.check(v.len() == 96 && m < 1e-10, format!("16 x on C_r, N=0..5, m=256: max residual {m:.2e} (< 1e-10)"));
        }
        Err(e) => out.check(false, format!("residue samples: {e}")),
    }
    // x = 1, N = 0: (1/2πi)∮ dy/(y D(1, y)) on |y| = 3/4 against 2/√5.
    let m = 256;
    let sum: Complex64 = (0..m)
        .map(|a| {
            let y = circle_node(0.75, a, m);
            y.inv() / big_d(c(1.0, 0.0), y, &p) * y
        })
        .sum();
    let quad = sum / m as f64;
    let exact = 2.0 / 5.0_f64.sqrt();
    let closed = gamma_value(c(1.0, 0.0), &p).sinh().inv();
    out.check(
        (quad - exact).norm() < 1e-10 && (closed - exact).norm() < 1e-14,
        format!(
            "x=1, N=0: quadrature {:.15} closed form {:.15} vs 2/sqrt5 {exact:.15}",
            quad.re, closed.re
        ),
    );
    out
}

fn crit4() -> Outcome {
    let mut out = Outcome::new();
    let p = sp(2.0, 0.0);
    let mag2 = magnetization(&p).powi(2);
    for (lm, ln) in [(0, 0), (1, 0), (1, 1), (2, 1)] {
        let fr = fredholm_correlation(lm, ln, &p, 256);
        let ff = correlation_ff(lm, ln, &p, 2, 64);
        match (fr, ff) {
            (Ok(fr), Ok(ff)) => {
                let diff = (fr.value - ff.value).norm();
                let tol = (mag2 * ff.terms[2]).norm().max(1e-6);
                out.check(
                    diff <= tol,
                    format!(
                        "(M,N)=({lm},{ln}): fredholm {:.12} formfactor {:.12} |diff| {diff:.2e} <= {tol:.2e}",
                        fr.value.re, ff.value.re
                    ),
                );
                if (lm, ln) == (0, 0) {
                    let dev = (fr.value - 1.0).norm();
                    out.check(dev < 1e-8, format!("fredholm(0,0) - 1 = {dev:.2e} (< 1e-8)"));
                }
            }
            (a, b) => out.check(false, format!("({lm},{ln}) evaluation error: {:?} {:?}", a.err(), b.err())),
        }
    }
    out
}

fn crit5() -> Outcome {
    let mut out = Outcome::new();
    let p = sp(2.0, 0.0);
    let mut run = || -> ising_core::Result<()> {
        let cert_a = select_radius(&p, 0.5)?;
        let cert_b = select_radius(&p, 0.3)?;
        let ga = ContourGrid::from_certificate(cert_a, 96, &p)?;
        let gb = ContourGrid::from_certificate(cert_b, 96, &p)?;
        let a = chi_n(2, &p, &ga, DEFAULT_BUDGET)?;
        let b = chi_n(2, &p, &gb, DEFAULT_BUDGET)?;
        let a2 = chi_n(2, &p, &ga.with_nodes(192)?, DEFAULT_BUDGET)?;
        let reduced = chi_n_reduced(2, &p, &ga.with_nodes(1024)?, DEFAULT_BUDGET)?;
        out.note(format!("chi2(s=2) = {:.15e} (r={:.4}, m=96)", a.value.re, a.r));
        out.check(a.value.im.abs() < 1e-9, format!("|Im chi2| = {:.2e} (< 1e-9)", a.value.im.abs()));
        let dr = (a.value - b.value).norm();
        out.check(dr < 1e-8, format!("radii {:.4} vs {:.4}: |diff| {dr:.2e} (< 1e-8)", a.r, b.r));
        let dm = (a.value - a2.value).norm();
        out.check(dm < 1e-8, format!("m=96 -> 192: |change| {dm:.2e} (< 1e-8)"));
        let dred = (a.value - reduced.value).norm();
        out.check(dred < 1e-8, format!("residue-reduced route (m=1024): |diff| {dred:.2e} (< 1e-8)"));
        Ok(())
    };
    if let Err(e) = run() {
        out.check(false, format!("evaluation error: {e}"));
    }
    out
}

fn crit6() -> Outcome {
    let mut out = Outcome::new();
    let p = sp(2.0, 0.0);
    let run = |out: &mut Outcome| -> ising_core::Result<()> {
        let cert = select_radius(&p, 0.5)?;
        let g1 = ContourGrid::from_certificate(cert, 128, &p)?;
        let w1 = corr_window(&p, 1, 20, &g1, DEFAULT_BUDGET)?;
        let r1 = lattice_sum_from_window(&w1);
        out.check(
            r1.relative < 1e-6,
            format!(
                "one variable per family, W=20: window sum {:.12e} replaced {:.12e} rel {:.2e} (< 1e-6)",
                r1.lhs.re, r1.rhs.re, r1.relative
            ),
        );
        let g2 = ContourGrid::from_certificate(cert, 64, &p)?;
        let w2 = corr_window(&p, 2, 20, &g2, DEFAULT_BUDGET)?;
        let r2 = lattice_sum_from_window(&w2);
        out.check(
            r2.relative < 1e-6,
            format!("two variables per family, W=20: rel {:.2e} (< 1e-6)", r2.relative),
        );
        let chi2 = chi_n(2, &p, &ContourGrid::from_certificate(cert, 96, &p)?, DEFAULT_BUDGET)?;
        let d = (r2.rhs - 2.0 * chi2.value).norm() / (2.0 * chi2.value).norm();
        out.check(d < 1e-8, format!("replaced-factor integral vs 2 chi2: rel {d:.2e} (< 1e-8)"));
        // Normalization pinned at (M, N) = (0, 0) against the θ-space first term.
        let t1 = formfactor_term(0, 0, &p, 1, 64)?;
        let d00 = (w2.value(0, 0) - t1.value).norm() / t1.value.norm();
        out.check(d00 < 1e-8, format!("(0,0) calibration against theta-space T1: rel {d00:.2e} (< 1e-8)"));
        Ok(())
    };
    if let Err(e) = run(&mut out) {
        out.check(false, format!("evaluation error: {e}"));
    }
    out
}

fn contains(set: &[Complex64], z: Complex64) -> bool {
    set.iter().any(|w| (w - z).norm() < 1e-12)
}

fn crit7() -> Outcome {
    let mut out = Outcome::new();
    let p2 = points(2, true);
    let axis = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
    out.check(
        p2.len() == 4 && axis.iter().all(|&z| contains(&p2, z)),
        format!("n=2: {} points {:?}", p2.len(), p2),
    );
    for (n, expect) in [(4, 8), (6, 16)] {
        let k = points(n, true).len();
        out.check(k == expect, format!("n={n}: {k} points (expect {expect})"));
    }
    for n in [2, 4, 6] {
        let big = points(2 * n, true);
        let sub = enumerate(n).iter().flat_map(|q| q.points.clone()).all(|z| contains(&big, z));
        out.check(sub, format!("enumerate({n}) is a subset of enumerate({})", 2 * n));
    }
    let missing: Vec<usize> = (2..=12)
        .step_by(2)
        .filter(|&n| {
            let pts = points(n, true);
            !axis.iter().all(|&z| contains(&pts, z))
        })
        .collect();
    out.check(missing.is_empty(), format!("+-1, +-i present for every even n <= 12 (missing for {missing:?})"));
    out
}

fn crit8() -> Outcome {
    let mut out = Outcome::new();
    for n in [2, 4] {
        match lemma1_randomized_verify(n, 1000, 17, DEFAULT_TOL_HULL, DEFAULT_TOL_ACTIVE) {
            Ok(r) => {
                out.check(
                    r.separations == 1000 && r.min_margin > 1e-9,
                    format!(
                        "n={n}: {}/1000 separations, min margin {:.3e} (> 1e-9)",
                        r.separations, r.min_margin
                    ),
                );
                out.check(
                    !r.witnesses.is_empty()
                        && r.witness_containments == r.witnesses.len()
                        && r.max_witness_residual < 1e-12,
                    format!(
                        "n={n}: {}/{} Nickel witnesses contained, max residual {:.2e} (< 1e-12)",
                        r.witness_containments,
                        r.witnesses.len(),
                        r.max_witness_residual
                    ),
                );
                out.check(r.indeterminate == 0, format!("n={n}: {} indeterminate", r.indeterminate));
                if n == 4 {
                    let explicit = r.witnesses.iter().find(|w| w.name.starts_with("explicit"));
                    let ok = matches!(explicit.map(|w| &w.certificate),
                        Some(HullCertificate::Containment { coefficients, .. })
                            if coefficients.iter().all(|&x| (x - 0.2).abs() < 1e-12));
                    out.check(ok, "n=4 explicit {X, Z_1..Z_4} witness has c = 1/5 each".into());
                }
            }
            Err(e) => out.check(false, format!("n={n}: {e}")),
        }
    }
    out
}

fn crit9() -> Outcome {
    let mut out = Outcome::new();
    let mut certs = Vec::new();
    let mut trial = 0;
    while certs.len() < 20 && trial < 1000 {
        let n = if trial % 2 == 0 { 2 } else { 4 };
        let (_, cfg) = random_configuration(n, 99, trial, DEFAULT_TOL_ACTIVE);
        trial += 1;
        let vs = active_vectors(&cfg).expect("nonempty active set");
        if let Ok(HullCertificate::Separation { margin, .. }) = hull_distance(&vs.vectors, DEFAULT_TOL_HULL, DEFAULT_MAX_ITER) {
            certs.push((vs.vectors, margin));
        }
    }
    out.check(certs.len() == 20, format!("{} separation certificates collected", certs.len()));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut lib_violations = 0;
    let mut own_violations = 0;
    let mut worst = f64::INFINITY;
    for (vectors, d) in &certs {
        let eps = d / 2.0;
        match lemma2_sampled_check(vectors, *d, eps, 100, &mut rng) {
            Ok(s) => lib_violations += s.violations,
            Err(e) => out.check(false, format!("sampled check: {e}")),
        }
        // Independent sampler: perturbations in the ε-ball, c_j ~ U(0,1).
        let dim = vectors[0].len();
        for _ in 0..100 {
            let mut sum = vec![0.0; dim];
            let mut total = 0.0;
            for v in vectors {
                let u: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                let rad = eps * rng.gen::<f64>();
                let cj: f64 = rng.gen();
                total += cj;
                for k in 0..dim {
                    sum[k] += cj * (v[k] + u[k] * rad / norm);
                }
            }
            let lhs = sum.iter().map(|x| x * x).sum::<f64>().sqrt();
            worst = worst.min(lhs / ((d - eps) * total));
            if lhs < (d - eps) * total {
                own_violations += 1;
            }
        }
    }
    out.check(lib_violations == 0, format!("library sampler: {lib_violations} violations in 2000 samples"));
    out.check(
        own_violations == 0,
        format!("independent sampler: {own_violations} violations, min |sum c U| / ((d-eps) sum c) = {worst:.4}"),
    );
    out
}

fn crit10() -> Outcome {
    let mut out = Outcome::new();
    let policy = ScanPolicy::default();
    let eps = [1e-1, 1e-2, 1e-3];
    let rows = match ray_scan(&[PI / 4.0, PI / 2.0], &eps, &policy) {
        Ok(r) => r,
        Err(e) => {
            out.check(false, format!("scan error: {e}"));
            return out;
        }
    };
    for r in &rows {
        out.note(format!(
            "phi={:.4} eps={:.0e} value={:?} m={:?} status={}",
            r.phi,
            r.epsilon,
            r.value,
            r.m_used,
            r.status.as_str()
        ));
    }
    let flagged = rows
        .iter()
        .all(|r| (r.status == ScanStatus::Ok) == r.value.is_some());
    out.explore(flagged, "every row carries a value with status ok or an explicit flag".into());
    let quarter: Vec<_> = rows.iter().filter(|r| r.phi == PI / 4.0).collect();
    for (k, w) in quarter.windows(2).enumerate() {
        let last = k + 2 == quarter.len();
        match (w[0].value, w[1].value) {
            (Some(a), Some(b)) => {
                let rel = (b - a).norm() / b.norm();
                let msg = format!("phi=pi/4 eps {:.0e} -> {:.0e}: relative change {rel:.3}", w[0].epsilon, w[1].epsilon);
                if last {
                    out.explore(rel < 0.1, format!("{msg} (< 0.1)"));
                } else {
                    out.note(msg);
                }
            }
            _ => out.explore(false, format!("phi=pi/4 eps={:.0e}: no value", w[1].epsilon)),
        }
    }
    let mut ind = Vec::new();
    for &e in &eps {
        match divergence_indicator(PI / 2.0, e, &policy) {
            Ok(i) => {
                out.note(format!("phi=pi/2 eps={e:.0e}: indicator {:.6e} +- {:.1e} (m={})", i.value, i.err_est, i.m_used));
                ind.push(Some(i));
            }
            Err(err) => {
                out.note(format!("phi=pi/2 eps={e:.0e}: {err}"));
                ind.push(None);
            }
        }
    }
    let increasing = ind.windows(2).all(|w| match (w[0], w[1]) {
        (Some(a), Some(b)) => b.value - b.err_est > a.value + a.err_est,
        _ => false,
    });
    out.explore(increasing, "phi=pi/2 divergence indicator strictly increases down the ladder".into());
    out
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("identity battery", Duration::from_secs(5), crit1),
        ("antisymmetric determinant identity", Duration::from_secs(1), crit2),
        ("residue identity", Duration::from_secs(1), crit3),
        ("cross-method correlation", Duration::from_secs(120), crit4),
        ("chi2 stability", Duration::from_secs(180), crit5),
        ("lattice-sum equivalence", Duration::from_secs(180), crit6),
        ("Nickel enumeration", Duration::from_secs(1), crit7),
        ("separation of non-Nickel configurations", Duration::from_secs(30), crit8),
        ("perturbed separation margin", Duration::from_secs(5), crit9),
        ("boundary scan smoke test", Duration::from_secs(300), crit10),
    ];
    let mut failed = 0;
    let mut review = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        if !in_time {
            outcome.details.push(format!("FAIL runtime {:.1}s exceeds {}s", elapsed.as_secs_f64(), limit.as_secs()));
            outcome.status = Status::Fail;
        }
        let label = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Review => {
                review += 1;
                "REVIEW"
            }
        };
        println!("{label} [{}] {name} ({:.2}s, limit {}s)", i + 1, elapsed.as_secs_f64(), limit.as_secs());
        for d in &outcome.details {
            println!("       {d}");
        }
    }
    println!(
        "acceptance: {} pass, {failed} fail, {review} review",
        criteria.len() - failed - review
    );
    let strict = std::env::var_os("ACCEPTANCE_STRICT").is_some();
    if failed > 0 && strict {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
