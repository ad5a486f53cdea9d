//! Structural invariants as property tests over random instances.

mod common;

use common::*;
use polyconc::checkers::{check_nsv_tail, check_product_smallball, norm0, poly_stats};
use polyconc::isoperim::{exact_pushforward_cdf, GridDist};
use polyconc::par::rng_for;
use polyconc::poly::{sign_partition, Interval, IntervalUnion, UniPoly};
use polyconc::weights::{Weight, WeightKind};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// Samples inside `iv`, restricted to a finite window.
fn points_in(rng: &mut impl Rng, iv: &Interval, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (iv.lo.max(lo), iv.hi.min(hi));
    if !(a < b) {
        return Vec::new();
    }
    (0..n).map(|_| rng.random_range(a..b)).filter(|&t| iv.contains(t)).collect()
}

/// One of the two log-concave families the tail bound covers.
fn exp_or_power(rng: &mut impl Rng) -> Weight {
    loop {
        let w = random_weight(rng);
        if !matches!(w.kind(), WeightKind::AffinePower { .. }) {
            return w;
        }
    }
}

/// Polynomial with every real root outside `[lo, hi]` (complex pairs and
/// real roots beyond the ends).
fn rootless(rng: &mut impl Rng, w: &Weight) -> UniPoly {
    let mut f = UniPoly::constant(rng.random_range(0.5..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 });
    for _ in 0..rng.random_range(1..=3) {
        let factor = match rng.random_range(0..3) {
            0 => {
                let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(0.1..2.0));
                UniPoly::new(vec![a * a + b * b, -2.0 * a, 1.0])
            }
            1 => UniPoly::new(vec![-(w.lo() - rng.random_range(0.01..2.0)), 1.0]),
            _ if w.hi().is_finite() => UniPoly::new(vec![-(w.hi() + rng.random_range(0.01..2.0)), 1.0]),
            _ => UniPoly::new(vec![1.0, 0.0, 1.0]),
        };
        f = &f * &factor;
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        rng_seed: RngSeed::Fixed(20_261_015),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn sign_partition_conditions_hold(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let w = random_weight(&mut rng);
        let f = random_poly(&mut rng, &w, 6);
        let eps = rng.random_range(0.01..2.0);
        let (lo, hi) = (w.lo(), working_hi(&w));
        let sp = sign_partition(&f, eps, lo, w.hi()).unwrap();
        let groups: [(&IntervalUnion, &dyn Fn(f64) -> bool); 3] = [
            (&sp.pos, &|v| v >= eps),
            (&sp.neg, &|v| v <= -eps),
            (&sp.mid, &|v| v.abs() < eps),
        ];
        for (set, cond) in groups {
            for iv in set.intervals() {
                for t in points_in(&mut rng, iv, lo, hi, 100) {
                    let v = f.eval(t);
                    // Horner's rounding error may straddle the level
                    let slack = 16.0 * (f.degree() as f64 + 1.0) * f64::EPSILON * abs_horner(&f, t);
                    prop_assert!(cond(v) || cond(v + slack) || cond(v - slack), "t = {t}, f = {v}, eps = {eps}");
                }
            }
        }
    }

    #[test]
    fn restriction_agrees_with_direct_evaluation(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 1);
        let dim = rng.random_range(1..=5);
        let f = random_multi(&mut rng, dim, 6);
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g = f.restrict_to_segment(&x, &y).unwrap();
        let on_segment = |t: f64| -> Vec<f64> { x.iter().zip(&y).map(|(a, b)| a + t * (b - a)).collect() };
        // interpolation error is uniform on the segment, so it is measured
        // against the size of f along the whole segment
        let size = (0..=64).map(|i| abs_eval(&f, &on_segment(i as f64 / 64.0))).fold(0.0, f64::max);
        for _ in 0..50 {
            let t = rng.random_range(0.0..=1.0);
            let direct = f.eval(&on_segment(t));
            prop_assert!((g.eval(t) - direct).abs() <= 1e-10 * size.max(1e-300), "t = {t}");
        }
    }

    #[test]
    fn taylor_bound_holds(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 2);
        let dim = rng.random_range(1..=4);
        let f = random_multi(&mut rng, dim, 4);
        prop_assume!(f.degree() >= 1);
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let bound: f64 = (1..=f.degree())
            .map(|m| f.dm_norm_at(m, &x).unwrap() * dist.powi(m as i32) / factorial(m))
            .sum();
        let diff = (f.eval(&y) - f.eval(&x)).abs();
        // equality is attained by linear polynomials along the gradient
        let rounding = 1e-12 * (abs_eval(&f, &x) + abs_eval(&f, &y) + bound);
        prop_assert!(diff <= bound + rounding, "{diff} > {bound}");
    }

    #[test]
    fn derivative_matches_finite_differences(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 3);
        let d = rng.random_range(1..=12);
        let f = UniPoly::new((0..=d).map(|_| rng.random_range(-2.0..2.0)).collect());
        let df = f.derivative();
        for _ in 0..20 {
            let t: f64 = rng.random_range(-2.0..2.0);
            let h = 1e-3 * t.abs().max(1.0);
            // fourth-order central stencil
            let fd = (8.0 * (f.eval(t + h) - f.eval(t - h)) - (f.eval(t + 2.0 * h) - f.eval(t - 2.0 * h))) / (12.0 * h);
            let scale = abs_horner(&df, t);
            prop_assert!((fd - df.eval(t)).abs() <= 1e-6 * scale, "t = {t}: {fd} vs {}", df.eval(t));
        }
    }

    #[test]
    fn absolute_integral_dominates_signed(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 4);
        let w = random_weight(&mut rng);
        let f = random_poly(&mut rng, &w, 6);
        let r = rng.random_range(-5.0..5.0);
        let abs = w.integrate_abs_poly(&f, r).unwrap();
        let signed = (w.integrate_poly(&f) - r * w.moment(0)).abs();
        prop_assert!(signed <= abs * (1.0 + 1e-12) + 1e-300, "{signed} > {abs}");
    }

    #[test]
    fn canonicalize_preserves_product_smallball(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 5);
        let w = random_weight(&mut rng);
        let f = random_poly(&mut rng, &w, 6);
        let eps = f.eval(interior_point(&mut rng, &w)).abs().max(1e-3);
        let r = rng.random_range(-1.0..1.0);
        let can = w.canonicalize();
        let g = can.map.pull_back(&f);
        let a = check_product_smallball(&f, &w, eps, r).unwrap();
        let b = check_product_smallball(&g, &can.weight, eps, r).unwrap();
        prop_assert_eq!(a.ratio.infinite, b.ratio.infinite);
        if a.ratio.is_finite() {
            // both the input and its pull-back carry coefficient rounding
            let wobble = ulp_sensitivity(&f, |h| check_product_smallball(h, &w, eps, r).unwrap().witness_ratio())
                + ulp_sensitivity(&g, |h| check_product_smallball(h, &can.weight, eps, r).unwrap().witness_ratio());
            let tol = 1e-9 * a.witness_ratio() + 10.0 * wobble;
            prop_assert!((a.witness_ratio() - b.witness_ratio()).abs() <= tol,
                "{} vs {}", a.witness_ratio(), b.witness_ratio());
        }
    }

    #[test]
    fn lyapunov_ordering(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 6);
        let w = random_weight(&mut rng);
        let f = random_poly(&mut rng, &w, 6);
        let st = poly_stats(&f, &w).unwrap();
        // ‖f‖₀ carries the 1e-8 refinement tolerance of the log quadrature
        prop_assert!(st.norm0 <= st.norm1 * (1.0 + 1e-7), "{} > {}", st.norm0, st.norm1);
        prop_assert!(st.norm1 <= st.norm2 * (1.0 + 1e-12), "{} > {}", st.norm1, st.norm2);
    }

    #[test]
    fn nsv_tail_ratio_at_most_one(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 7);
        let w = exp_or_power(&mut rng);
        let f = random_poly(&mut rng, &w, 6);
        let t = rng.random_range(1.0..5.0);
        let rep = check_nsv_tail(&f, &w, t).unwrap();
        prop_assert!(rep.ratio.is_finite() && rep.witness_ratio() <= 1.0, "{rep:?}");
    }

    #[test]
    fn rootless_product_smallball_vanishes(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 8);
        let w = random_weight(&mut rng);
        let f = rootless(&mut rng, &w);
        let eps = rng.random_range(1e-3..3.0);
        let rep = check_product_smallball(&f, &w, eps, rng.random_range(-1.0..1.0)).unwrap();
        prop_assert_eq!(rep.lhs, 0.0);
    }

    #[test]
    fn product_smallball_joint_scaling(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 9);
        let w = random_weight(&mut rng);
        let f = random_poly(&mut rng, &w, 6);
        let eps = f.eval(interior_point(&mut rng, &w)).abs().max(1e-3);
        let r = rng.random_range(-1.0..1.0);
        let lambda = [0.01, 0.5, 3.0, 100.0][rng.random_range(0..4)];
        let a = check_product_smallball(&f, &w, eps, r).unwrap();
        let b = check_product_smallball(&f.scale(lambda), &w, lambda * eps, lambda * r).unwrap();
        prop_assert_eq!(a.ratio.infinite, b.ratio.infinite);
        if a.ratio.is_finite() {
            let wobble = ulp_sensitivity(&f, |g| check_product_smallball(g, &w, eps, r).unwrap().witness_ratio());
            let tol = 1e-10 * a.witness_ratio() + 10.0 * wobble;
            prop_assert!((a.witness_ratio() - b.witness_ratio()).abs() <= tol,
                "{} vs {}", a.witness_ratio(), b.witness_ratio());
        }
    }

    #[test]
    fn pushforward_cdf_is_monotone(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 10);
        let w = random_weight(&mut rng);
        let f = random_poly(&mut rng, &w, 5);
        // probabilities are sums of interval masses, each exact up to rounding
        let mut ys: Vec<f64> = (0..40).map(|_| f.eval(interior_point(&mut rng, &w))).collect();
        ys.sort_by(f64::total_cmp);
        let vals: Vec<f64> = ys.iter().map(|&y| exact_pushforward_cdf(&f, &w, y).unwrap()).collect();
        for p in vals.windows(2) {
            prop_assert!(p[0] <= p[1] + 1e-10, "{} > {}", p[0], p[1]);
        }
        let span = (ys[ys.len() - 1] - ys[0]).max(1e-12);
        for &y in &ys {
            let jump = exact_pushforward_cdf(&f, &w, y + 1e-9 * span).unwrap() - exact_pushforward_cdf(&f, &w, y).unwrap();
            prop_assert!((-1e-10..1e-3).contains(&jump), "jump {jump} at {y}");
        }
    }

    #[test]
    fn gap_sums_dominate_set_product(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 11);
        let m = 400;
        let mut acc = 0.0;
        let mut cdf = vec![0.0];
        for _ in 0..m {
            acc += rng.random_range(0.05..1.0);
            cdf.push(acc);
        }
        let grid: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        let g = GridDist::new(grid, cdf.iter().map(|c| c / acc).collect()).unwrap();
        // alternate closed pieces and open gaps across [−∞, ∞]
        let mut cuts: Vec<f64> = (0..2 * rng.random_range(1..=4)).map(|_| rng.random_range(0.0..1.0)).collect();
        cuts.sort_by(f64::total_cmp);
        let mut ends = vec![f64::NEG_INFINITY];
        ends.extend(&cuts);
        ends.push(f64::INFINITY);
        let (mut j1, mut j3, mut gaps) = (Vec::new(), Vec::new(), Vec::new());
        let mut label_one = rng.random::<bool>();
        for (i, p) in ends.chunks(2).enumerate() {
            let iv = Interval { lo: p[0], hi: p[1], lo_closed: p[0].is_finite(), hi_closed: p[1].is_finite() };
            if label_one { j1.push(iv) } else { j3.push(iv) }
            if i + 1 < ends.len() / 2 {
                gaps.push((p[1], ends[2 * i + 2]));
                label_one = !label_one || rng.random::<bool>();
            }
        }
        prop_assume!(!j1.is_empty() && !j3.is_empty());
        let mu = |ivs: Vec<Interval>| g.measure(&IntervalUnion::new(ivs).unwrap());
        let lhs: f64 = gaps
            .iter()
            .map(|&(a, b)| {
                let left = Interval { lo: f64::NEG_INFINITY, hi: a, lo_closed: false, hi_closed: true };
                let right = Interval { lo: b, hi: f64::INFINITY, lo_closed: true, hi_closed: false };
                mu(vec![left]) * mu(vec![right])
            })
            .sum();
        let rhs = mu(j1) * mu(j3);
        prop_assert!(lhs >= rhs * (1.0 - 1e-12), "{lhs} < {rhs}");
    }
}

#[test]
fn exp_affine_moments_stay_accurate_to_k24() {
    let mut rng = rng_for(77, 0);
    for _ in 0..20 {
        let lo = rng.random_range(-2.0..2.0);
        let len = rng.random_range(0.2..4.0);
        let c1 = rng.random_range(-3.0..3.0);
        let w = Weight::exp_affine(rng.random_range(-1.0..1.0), c1, lo, lo + len).unwrap();
        for k in 0..=24 {
            let tk = |t: f64| t.powi(k);
            let oracle = trapezoid(|t| tk(t) * w.density(t), lo, lo + len, 1_000_000);
            let scale = trapezoid(|t| tk(t).abs() * w.density(t), lo, lo + len, 1_000_000);
            assert!(rel_err(w.moment(k as usize), oracle, scale) < 1e-8, "k = {k} on {w:?}");
        }
    }
}

#[test]
fn norm0_of_rootless_poly_matches_log_quadrature() {
    let w = Weight::uniform(0.0, 1.0).unwrap();
    let f = UniPoly::new(vec![2.0, 1.0, 1.0]);
    let oracle = trapezoid(|t| f.eval(t).ln(), 0.0, 1.0, 1_000_000).exp();
    assert!(rel_err(norm0(&f, &w).unwrap(), oracle, oracle) < 1e-9);
}
