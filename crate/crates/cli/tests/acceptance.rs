//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! `cargo test -p polyconc-cli --test acceptance -- 3 4` runs a subset.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use polyconc::checkers::{check_nsv_tail, check_product_smallball, check_restricted_mass, poly_stats};
use polyconc::gauss::{check_cor28_mc, gaussian_sample, smallball_scan, QuadForm, Sampler};
use polyconc::body::{ChainConfig, ConvexBody};
use polyconc::isoperim::{cheeger_profile, poincare_gap, pushforward_grid, three_set_check, three_set_exact, ThreeSets};
use polyconc::par::rng_for;
use polyconc::poly::{real_roots, IntervalUnion, MultiPoly, UniPoly};
use polyconc::samples::Moments;
use polyconc::search::{default_trunc, degree2_control, degree3_divergence, worst_ratio_search, Family, SearchSpace};
use polyconc::weights::{Weight, WeightKind};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erf;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Largest d=2 search value from criterion 3, reused as the control bound in 4.
static D2_BOUND: std::sync::OnceLock<f64> = std::sync::OnceLock::new();

fn c1_weight_oracles() -> Verdict {
    let mut worst = (0.0, "", 0);
    let mut bad = 0;
    let mut count = 0;
    for i in 0..500u64 {
        let (_, _, cases) = weight_oracle_cases(1, i, 1_000_000);
        for c in cases {
            count += 1;
            let e = c.rel();
            if !(e <= 1e-6) {
                bad += 1;
            }
            if e > worst.0 || e.is_nan() {
                worst = (e, c.label, i);
            }
        }
    }
    verdict(
        bad == 0,
        format!("{count} integrals over 500 instances, {bad} above 1e-6, worst {:.2e} ({} #{})", worst.0, worst.1, worst.2),
    )
}

/// Distinct roots on the grid `k/32` in `[-4, 4]`, multiplicities summing
/// to at most 6. Products of at most six such numbers fit in 53 bits, so the
/// expanded coefficients are exact and the polynomial really has these roots.
fn dyadic_factored(rng: &mut impl Rng) -> Vec<(f64, u32)> {
    loop {
        let d = rng.random_range(1..=6u32);
        let mut left = d;
        let mut roots = Vec::new();
        while left > 0 {
            let m = rng.random_range(1..=left.min(3));
            roots.push((rng.random_range(-128..=128i32) as f64 / 32.0, m));
            left -= m;
        }
        roots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if roots.windows(2).all(|p| p[1].0 > p[0].0) {
            return roots;
        }
    }
}

fn recovered(roots: &[(f64, u32)], f: &UniPoly, tol: f64) -> bool {
    let Ok(got) = real_roots(f, -10.0, 10.0, tol) else { return false };
    let got: Vec<(f64, u32)> = got.iter().collect();
    got.len() == roots.len() && roots.iter().zip(&got).all(|((r, m), (g, k))| (r - g).abs() <= tol && m == k)
}

fn c2_root_recovery() -> Verdict {
    let tol = 1e-10;
    let mut rng = rng_for(2, 0);
    let mut bad = 0;
    let mut inexact = 0;
    for _ in 0..1000 {
        let roots = dyadic_factored(&mut rng);
        let f = expand(&roots);
        if roots.iter().any(|&(r, _)| f.eval(r) != 0.0) {
            inexact += 1;
        }
        if !recovered(&roots, &f, tol) {
            bad += 1;
        }
    }
    // continuous roots: the rounded coefficients move clustered roots by more
    // than tol, so this count is informational
    let mut rng = rng_for(2, 1);
    let mut cont_bad = 0;
    for _ in 0..1000 {
        let roots = random_factored(&mut rng, 10.0 * tol);
        if !recovered(&roots, &expand(&roots), tol) {
            cont_bad += 1;
        }
    }
    verdict(
        bad == 0 && inexact == 0,
        format!(
            "exact-coefficient instances: {bad}/1000 missed ({inexact} not exact); \
             continuous roots with rounded coefficients: {cont_bad}/1000 missed (informational)"
        ),
    )
}

fn c3_degree2_search() -> Verdict {
    let space = SearchSpace::new(2, Family::ExpCanonical);
    let mut best = Vec::new();
    let mut infinite = 0;
    let mut all_finite = true;
    for seed in 0..5 {
        let res = worst_ratio_search(&space, 10_000, seed).expect("valid space");
        all_finite &= res.witness.is_some() && res.best_ratio.is_finite();
        infinite += res.infinite.len();
        best.push(res.best_ratio);
    }
    let hi = best.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = best.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = (hi - lo) / hi;
    let _ = D2_BOUND.set(hi);
    verdict(
        all_finite && spread <= 0.1 && infinite == 0,
        format!("best ratios {best:.6?}, spread {:.2}%, infinite-flagged {infinite}", 100.0 * spread),
    )
}

fn c4_divergence() -> Verdict {
    let a = [10.0, 100.0, 1000.0];
    let trunc = default_trunc(&a);
    let d3 = degree3_divergence(&a, trunc).expect("valid table");
    let d2 = degree2_control(&a, trunc).expect("valid table");
    let r: Vec<f64> = d3.iter().map(|row| row.witness_ratio).collect();
    let c: Vec<f64> = d2.iter().map(|row| row.witness_ratio).collect();
    let bound = *D2_BOUND.get_or_init(|| {
        worst_ratio_search(&SearchSpace::new(2, Family::ExpCanonical), 1000, 0).expect("valid space").best_ratio
    });
    let increasing = r.windows(2).all(|p| p[0] < p[1]);
    let growth = r[2] > 5.0 * r[0];
    let control = c.iter().all(|&x| x <= 2.0 * bound);
    verdict(
        increasing && growth && control,
        format!("degree 3 {r:.4?} (x{:.1}), degree 2 control {c:.4?} vs 2 x {bound:.4}", r[2] / r[0]),
    )
}

fn c5_invariance() -> Verdict {
    let mut rng = rng_for(5, 0);
    let mut worst: f64 = 0.0;
    let mut flag_mismatch = 0;
    let mut shifted_infinite = 0;
    let mut with_root = 0;
    for _ in 0..200 {
        let w = random_weight(&mut rng);
        let f = random_poly(&mut rng, &w, 6);
        let eps = f.eval(interior_point(&mut rng, &w)).abs().max(1e-3);
        let can = w.canonicalize();
        let g = can.map.pull_back(&f);
        let a = check_product_smallball(&f, &w, eps, 0.0).unwrap();
        let b = check_product_smallball(&g, &can.weight, eps, 0.0).unwrap();
        if a.ratio.infinite != b.ratio.infinite {
            flag_mismatch += 1;
        } else if a.ratio.is_finite() && a.witness_ratio() > 0.0 {
            worst = worst.max((a.witness_ratio() - b.witness_ratio()).abs() / a.witness_ratio());
        }
        let roots = real_roots(&f, w.lo(), w.hi(), 1e-12).unwrap();
        if roots.iter().any(|(t, _)| t > w.lo() && t < w.hi()) {
            with_root += 1;
            let r = rng.random_range(-3.0..3.0);
            if check_product_smallball(&f, &w, eps, r).unwrap().ratio.infinite {
                shifted_infinite += 1;
            }
        }
    }
    verdict(
        worst <= 1e-9 && flag_mismatch == 0 && shifted_infinite == 0,
        format!(
            "max relative change under canonicalize {worst:.2e}, flag mismatches {flag_mismatch}; \
             r-shifted with a root inside: {shifted_infinite}/{with_root} infinite"
        ),
    )
}

fn c6_tail_norms_and_mass() -> Verdict {
    let mut rng = rng_for(6, 0);
    let (mut nsv_bad, mut lyap_bad, mut mass_bad) = (0, 0, 0);
    let mut nsv_max: f64 = 0.0;
    let mut n = 0;
    while n < 1000 {
        let w = random_weight(&mut rng);
        if matches!(w.kind(), WeightKind::AffinePower { .. }) {
            continue;
        }
        n += 1;
        let f = random_poly(&mut rng, &w, 6);
        let t = rng.random_range(1.0..5.0);
        let rep = check_nsv_tail(&f, &w, t).unwrap();
        nsv_max = nsv_max.max(rep.witness_ratio());
        if rep.ratio.infinite || rep.witness_ratio() > 1.0 {
            nsv_bad += 1;
        }
        let st = poly_stats(&f, &w).unwrap();
        // ‖f‖₀ carries the 1e-8 refinement tolerance of its log quadrature
        if !(st.norm0 <= st.norm1 * (1.0 + 1e-7) && st.norm1 <= st.norm2 * (1.0 + 1e-12)) {
            lyap_bad += 1;
        }
        let full = IntervalUnion::from_closed(&[(w.lo(), w.hi())]).unwrap();
        if check_restricted_mass(&f, &w, &full).unwrap().witness_ratio() != 1.0 {
            mass_bad += 1;
        }
    }
    verdict(
        nsv_bad + lyap_bad + mass_bad == 0,
        format!("tail ratio > 1: {nsv_bad} (max {nsv_max:.3e}); ordering violated: {lyap_bad}; full-domain mass ratio != 1: {mass_bad}"),
    )
}

fn c7_quadform_stats() -> Verdict {
    let n = 1_000_000;
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for k in 0..100u64 {
        let mut rng = rng_for(7, k);
        let dim = rng.random_range(1..=8);
        let mut a = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            for j in i..dim {
                a[i][j] = rng.random_range(-1.0..1.0);
                a[j][i] = a[i][j];
            }
        }
        let b = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let q = QuadForm::new(&a, b, rng.random_range(-1.0..1.0)).unwrap();
        let (mean, var) = q.stats();
        let vals: Vec<f64> = gaussian_sample(dim, n, 700 + k).unwrap().rows().map(|x| q.eval(x)).collect();
        let m: Moments = vals.iter().copied().collect();
        let mu4 = vals.iter().map(|v| (v - m.mean()).powi(4)).sum::<f64>() / n as f64;
        let var_se = ((mu4 - m.variance().powi(2)).max(0.0) / n as f64).sqrt();
        let z = ((m.mean() - mean) / m.stderr()).abs().max(((m.variance() - var) / var_se).abs());
        worst = worst.max(z);
        if z > 4.0 {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("100 forms, {bad} beyond 4 stderr, largest deviation {worst:.2} stderr"))
}

fn c8_smallball_shape() -> Verdict {
    let s_list = [0.5, 0.1, 0.01];
    let chi1 = ChiSquared::new(1.0).unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for expr in ["x1", "x1^2 - 1", "x1*x2"] {
        let f = MultiPoly::parse(expr, None).unwrap();
        let scan = smallball_scan(&f, &s_list, 1_000_000, 8).unwrap();
        ok &= scan.rows.iter().all(|r| r.ratio > 0.0);
        let mut zs = Vec::new();
        for r in &scan.rows {
            let exact = match expr {
                "x1" => Some(erf(r.s / 2f64.sqrt())),
                // |Z² − 1| ≤ √2 s
                "x1^2 - 1" => {
                    let h = 2f64.sqrt() * r.s;
                    Some(chi1.cdf(1.0 + h) - chi1.cdf((1.0 - h).max(0.0)))
                }
                _ => None,
            };
            if let Some(p) = exact {
                let z = (r.estimate.value - p).abs() / r.estimate.stderr;
                ok &= z <= 3.0;
                zs.push(z);
            }
        }
        lines.push(format!("{expr}: min ratio {:.3}, oracle z {zs:.2?}", scan.min_ratio));
    }
    verdict(ok, lines.join("; "))
}

fn c9_mean_smallball_scaling() -> Verdict {
    let f = MultiPoly::parse("x1*x2 + 0.5*x1^2 - x3 + 0.3", Some(3)).unwrap();
    let q = QuadForm::from_poly(&f).unwrap();
    let eps = 0.2;
    let n = 200_000;
    let body = ConvexBody::cube(vec![-1.0; 3], vec![1.0; 3]).unwrap();
    let samplers = [("gaussian", Sampler::Gaussian), ("uniform box", Sampler::Uniform { body, chain: None })];
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, sampler) in &samplers {
        let base = check_cor28_mc(&q, sampler, eps, n, 9).unwrap();
        for lambda in [0.1, 10.0] {
            let scaled = check_cor28_mc(&q.scaled(lambda), sampler, lambda * eps, n, 9).unwrap();
            let se = (base.extras["ratio_stderr"].powi(2) + scaled.extras["ratio_stderr"].powi(2)).sqrt();
            let diff = (base.witness_ratio() - scaled.witness_ratio()).abs();
            ok &= diff <= 3.0 * se;
            lines.push(format!("{name} x{lambda}: |Δ| {diff:.2e} vs 3σ {:.2e}", 3.0 * se));
        }
    }
    verdict(ok, lines.join("; "))
}

fn c10_three_set() -> Verdict {
    let w = Weight::uniform(0.0, 1.0).unwrap();
    let sets = ThreeSets::half_lines(0.25, 0.75).unwrap();
    let exact = three_set_exact(&UniPoly::new(vec![0.0, 1.0]), &w, &sets).unwrap();
    let body = ConvexBody::cube(vec![0.0], vec![1.0]).unwrap();
    let f = MultiPoly::parse("x1", Some(1)).unwrap();
    let mc = three_set_check(&body, &f, &sets, 1_000_000, &ChainConfig::for_dim(1, 10)).unwrap();
    let se = mc.extras["ratio_stderr"];
    let z = (mc.witness_ratio() - 0.25).abs() / se;
    verdict(
        exact.witness_ratio() == 0.25 && z <= 3.0,
        format!("exact {}, sampled {:.5} ± {se:.1e} ({z:.2} stderr)", exact.witness_ratio(), mc.witness_ratio()),
    )
}

fn c11_poincare() -> Verdict {
    let id = UniPoly::new(vec![0.0, 1.0]);
    let w = Weight::uniform(0.0, 1.0).unwrap();
    let fine = poincare_gap(&pushforward_grid(&id, &w, 10_000).unwrap()).unwrap().lambda1;
    let coarse = poincare_gap(&pushforward_grid(&id, &w, 5_000).unwrap()).unwrap().lambda1;
    let pi2 = std::f64::consts::PI.powi(2);
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    let rel = (fine / pi2 - 1.0).abs();
    let agree = (fine - coarse).abs() / fine;
    verdict(
        rel <= 1e-2 && agree <= 1e-3,
        format!("λ₁ = {fine:.8} (π² off by {rel:.1e}); M/2 gives {coarse:.8}, gap {agree:.1e}; extrapolated {extrapolated:.8}"),
    )
}

fn c12_cheeger() -> Verdict {
    let id = UniPoly::new(vec![0.0, 1.0]);
    let uni = Weight::uniform(0.0, 1.0).unwrap();
    let g = pushforward_grid(&id, &uni, 2000).unwrap();
    let u = cheeger_profile(&g, poly_stats(&id, &uni).unwrap().alpha).unwrap();
    let exp = Weight::exponential();
    let g = pushforward_grid(&id, &exp, 4000).unwrap();
    let e = cheeger_profile(&g, poly_stats(&id, &exp).unwrap().alpha).unwrap();
    let target = 2.0 / std::f64::consts::E;
    let u_err = (u.half_line_inf - 1.0).abs();
    let e_err = (e.half_line_inf / target - 1.0).abs();
    verdict(
        u_err <= 0.02 && (u.half_line_at - 0.5).abs() <= 0.02 && e_err <= 0.02,
        format!(
            "uniform inf {:.5} at y = {:.4}; exponential inf {:.5} vs 2/e = {target:.5} ({:.1e})",
            u.half_line_inf, u.half_line_at, e.half_line_inf, e_err
        ),
    )
}

fn c13_determinism() -> Verdict {
    let runs: [&[&str]; 7] = [
        &["check", "--ineq", "product-smallball", "--poly-roots", "0,1", "--weight", "exp", "--eps", "0.05"],
        &["search", "--budget", "50", "--seed", "3"],
        &["smallball", "--poly", "x1*x2 - x3", "--n", "50000"],
        &["tail", "--poly", "x1^2 + x2", "--n", "50000"],
        &["isoperimetry", "--poly", "x1*x2", "--body", "ball", "--n", "20000", "--sets", "-0.2,0.2"],
        &["divergence", "--a", "10,100,1000"],
        &["profile", "--max-d", "2", "--max-n", "1", "--budget", "10"],
    ];
    let results = |args: &[&str]| -> Option<String> {
        let out = Command::new(env!("CARGO_BIN_EXE_polyconc")).args(args).output().ok()?;
        if !out.status.success() {
            return None;
        }
        let env: polyconc_cli::ReportEnvelope = serde_json::from_slice(&out.stdout).ok()?;
        Some(env.results_json())
    };
    let mut bad = Vec::new();
    for args in runs {
        match (results(args), results(args)) {
            (Some(a), Some(b)) if a == b => {}
            _ => bad.push(args[0]),
        }
    }
    verdict(bad.is_empty(), format!("7 commands run twice, differing or failing: {bad:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 13] = [
        ("weight integrals vs trapezoid oracle", c1_weight_oracles),
        ("root recovery", c2_root_recovery),
        ("degree-2 exponential search", c3_degree2_search),
        ("degree-3 divergence", c4_divergence),
        ("canonicalize invariance and shifted checks", c5_invariance),
        ("tail, norm ordering and full-domain mass", c6_tail_norms_and_mass),
        ("quadratic form moments vs sampling", c7_quadform_stats),
        ("Gaussian small-ball shape", c8_smallball_shape),
        ("mean small-ball joint scaling", c9_mean_smallball_scaling),
        ("three-set exact vs sampled", c10_three_set),
        ("Poincaré spectral gap", c11_poincare),
        ("Cheeger profile", c12_cheeger),
        ("determinism", c13_determinism),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let secs = start.elapsed().as_secs_f64();
        failed += usize::from(!v.pass);
        println!("{} [{id:>2}] {name} ({secs:.1} s): {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
