//! Acceptance suite: one test (and one printed verdict line) per criterion.
//! Criterion 9 (artifact replay) lives in the CLI crate, next to the binary
//! it exercises.

use gauss_ot::evolution::{
    evolution_mass_1d, evolution_mass_mc, jacobian_interp_bound, random_intervals,
    reverse_evolution_mass_1d, step3_chain, Density1d, DensityPair,
};
use gauss_ot::glue::build_monge_map;
use gauss_ot::measures::{common_mass_split, DiscreteMeasure};
use gauss_ot::ot::{
    check_cyclical_monotonicity_exhaustive, duality_gap, solve_kantorovich, CostKind,
    TransportPlan,
};
use gauss_ot::rays::build_gamma_prime;
use gauss_ot::wiener::{dimension_ladder, DensitySpec};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn verdict(number: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance criterion {number} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number} ({name}) failed: {detail}");
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, d: usize, uniform: bool) -> DiscreteMeasure {
    let pts = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect();
    let ws = if uniform {
        vec![1.0; n]
    } else {
        (0..n).map(|_| rng.gen_range(0.1..1.0)).collect()
    };
    DiscreteMeasure::probability(pts, ws).unwrap()
}

/// Brute-force assignment oracle over all n! permutations (uniform weights,
/// equal cardinality) — independent of the simplex solver.
fn permutation_oracle(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cost: CostKind) -> f64 {
    let n = mu.len();
    (0..n)
        .permutations(n)
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(i, &j)| cost.eval(mu.point(i), nu.point(j)) / n as f64)
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn criterion_1_duality_certification() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst_gap = 0.0f64;
    let mut oracle_checked = 0usize;
    for case in 0..200 {
        let small = case % 3 == 0;
        let (n, k) = if small {
            let n = rng.gen_range(2..=7);
            (n, n)
        } else {
            (rng.gen_range(2..=50), rng.gen_range(2..=50))
        };
        let d = rng.gen_range(1..=8);
        let cost = if case % 2 == 0 { CostKind::Euclidean } else { CostKind::SqEuclidean };
        let mu = random_cloud(&mut rng, n, d, small);
        let nu = random_cloud(&mut rng, k, d, small);
        let (plan, duals) = solve_kantorovich(&mu, &nu, cost).unwrap();
        let gap = duality_gap(&plan, &duals);
        assert!(gap.feasible, "infeasible duals on case {case}");
        let rel = gap.gap.abs() / (1.0 + plan.cost.abs());
        worst_gap = worst_gap.max(rel);
        assert!(rel <= 1e-9, "case {case}: relative gap {rel}");
        if small {
            let oracle = permutation_oracle(&mu, &nu, cost);
            assert!(
                (plan.cost - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()),
                "case {case}: solver {} vs oracle {}",
                plan.cost,
                oracle
            );
            oracle_checked += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "duality certification",
        elapsed.as_secs() <= 60,
        &format!(
            "200 instances, worst relative gap {worst_gap:.2e}, {oracle_checked} oracle \
             agreements, {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_2_cyclical_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let mut tuples = 0usize;
    for case in 0..20 {
        let n = rng.gen_range(3..=12);
        let k = rng.gen_range(3..=12);
        let d = rng.gen_range(1..=4);
        let mu = random_cloud(&mut rng, n, d, false);
        let nu = random_cloud(&mut rng, k, d, false);
        let (plan, _) = solve_kantorovich(&mu, &nu, CostKind::Euclidean).unwrap();
        let report = check_cyclical_monotonicity_exhaustive(&plan, 3);
        assert_eq!(report.violations, 0, "case {case}: {:?}", report.worst_tuple);
        tuples += report.tuples_checked;
    }

    // crossing plan on the square: (0,0)->(1,1), (1,0)->(0,1) costs 2√2 > 2
    let mu: DiscreteMeasure =
        DiscreteMeasure::probability(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![0.5, 0.5])
            .unwrap();
    let nu: DiscreteMeasure =
        DiscreteMeasure::probability(vec![vec![1.0, 1.0], vec![0.0, 1.0]], vec![0.5, 0.5])
            .unwrap();
    let crossing = TransportPlan {
        pairs: vec![(0, 0, 0.5), (1, 1, 0.5)],
        cost: 2f64.sqrt(),
        source: mu,
        target: nu,
        cost_kind: CostKind::Euclidean,
    };
    let flagged = check_cyclical_monotonicity_exhaustive(&crossing, 3);
    verdict(
        2,
        "cyclical monotonicity",
        flagged.violations > 0,
        &format!("{tuples} tuples clean on optimal plans; crossing counterexample flagged"),
    );
}

#[test]
fn criterion_3_ray_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut worst_cost_diff = 0.0f64;
    for case in 0..50 {
        let d = rng.gen_range(1..=4);
        let n = rng.gen_range(3..=10);
        // collinear family: both marginals on one line, all mass moving the
        // same way
        let dir: Vec<f64> = {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-3);
            v.into_iter().map(|c| c / norm).collect()
        };
        let base: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let at = |s: f64| -> Vec<f64> {
            base.iter().zip(&dir).map(|(b, u)| b + s * u).collect()
        };
        let mut s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        s.sort_by(f64::total_cmp);
        let t: Vec<f64> = s.iter().map(|&si| si + rng.gen_range(0.5..1.5)).collect();
        let mu = DiscreteMeasure::probability(
            s.iter().map(|&si| at(si)).collect(),
            vec![1.0; n],
        )
        .unwrap();
        let nu = DiscreteMeasure::probability(
            t.iter().map(|&ti| at(ti)).collect(),
            vec![1.0; n],
        )
        .unwrap();
        let (plan, _) = solve_kantorovich(&mu, &nu, CostKind::Euclidean).unwrap();
        let res = build_monge_map(&mu, &nu, &plan, 3).unwrap();

        // interior points lie in exactly one ray
        for &p in &res.decomposition.interior {
            let owners = res
                .decomposition
                .rays
                .iter()
                .filter(|r| r.point_ids.contains(&p))
                .count();
            assert_eq!(owners, 1, "case {case}: interior point {p} in {owners} rays");
        }
        // closure is idempotent
        let again =
            build_gamma_prime(&res.support.points, &res.gamma_prime, 3);
        assert_eq!(again, res.gamma_prime, "case {case}: closure not idempotent");
        // glued cost matches the Kantorovich optimum
        let diff = (res.map.cost - plan.cost).abs();
        assert!(diff <= 1e-9 * (1.0 + plan.cost), "case {case}: cost diff {diff}");
        worst_cost_diff = worst_cost_diff.max(diff);
    }

    // hand-checked chain 0 -> 2 -> 4
    let mu: DiscreteMeasure =
        DiscreteMeasure::probability(vec![vec![0.0], vec![2.0]], vec![0.5, 0.5]).unwrap();
    let nu: DiscreteMeasure =
        DiscreteMeasure::probability(vec![vec![2.0], vec![4.0]], vec![0.5, 0.5]).unwrap();
    let (plan, _) = solve_kantorovich(&mu, &nu, CostKind::Euclidean).unwrap();
    let res = build_monge_map(&mu, &nu, &plan, 3).unwrap();
    let coord = |ids: &std::collections::BTreeSet<usize>| -> Vec<f64> {
        ids.iter().map(|&i| res.decomposition.points[i][0]).collect()
    };
    let chain_ok = coord(&res.decomposition.initial_points) == vec![0.0]
        && coord(&res.decomposition.final_points) == vec![4.0];
    verdict(
        3,
        "ray pipeline",
        chain_ok,
        &format!(
            "50 collinear instances partitioned and reglued (worst cost diff \
             {worst_cost_diff:.2e}); chain endpoints a = {{0}}, b = {{4}}"
        ),
    );
}

#[test]
fn criterion_4_jacobian_and_step3() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    let ts = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let mut violations = 0usize;
    for _ in 0..10_000 {
        let dim = rng.gen_range(1..=16);
        let eig: Vec<f64> =
            (0..dim).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
        for &t in &ts {
            let (_, _, holds) = jacobian_interp_bound(&eig, t).unwrap();
            if !holds {
                violations += 1;
            }
        }
    }
    let mut worst_chain = 0.0f64;
    for pair in [
        DensityPair::new(Density1d::SineTilt { a: 0.5 }, Density1d::GaussScale { s: 1.0 }),
        DensityPair::new(
            Density1d::Interval { a: -1.0, b: 1.0 },
            Density1d::Interval { a: 0.0, b: 2.0 },
        ),
    ] {
        let rep = step3_chain(&pair, &ts).unwrap();
        worst_chain = worst_chain.max(rep.max_rel_violation);
    }
    let elapsed = start.elapsed();
    verdict(
        4,
        "Jacobian concavity and pointwise chain",
        violations == 0 && worst_chain <= 1e-9 && elapsed.as_secs() <= 10,
        &format!(
            "90000 bound evaluations, {violations} violations; chain residual \
             {worst_chain:.2e}; {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_5_evolution_estimate() {
    let start = Instant::now();
    let ts = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let pairs = [
        DensityPair::new(Density1d::One, Density1d::Interval { a: -1.0, b: 1.0 }),
        DensityPair::new(
            Density1d::Interval { a: -1.0, b: 1.0 },
            Density1d::Interval { a: 0.0, b: 2.0 },
        ),
        DensityPair::new(Density1d::SineTilt { a: 0.5 }, Density1d::GaussScale { s: 1.0 }),
        DensityPair::new(Density1d::Rational, Density1d::One),
        DensityPair::new(Density1d::GaussScale { s: 0.5 }, Density1d::SineTilt { a: 0.3 }),
    ];
    let mut detail = String::new();
    let mut all_pass = true;
    for (k, pair) in pairs.iter().enumerate() {
        let intervals = random_intervals(-4.0, 4.0, 50, 5000 + k as u64);
        let fwd = evolution_mass_1d(pair, &ts, &intervals).unwrap();
        let rev = reverse_evolution_mass_1d(pair, &ts, &intervals).unwrap();
        all_pass &= fwd.passes(0.02) && rev.passes(0.02);
        detail.push_str(&format!(
            "pair {k}: C {:.4}/{:.4} vs 1/M {:.4}; ",
            fwd.c_hat, rev.c_hat, fwd.bound
        ));
    }
    let elapsed = start.elapsed();
    verdict(
        5,
        "evolution estimate (1D quadrature)",
        all_pass && elapsed.as_secs() <= 120,
        &format!("{detail}{elapsed:.2?}"),
    );
}

#[test]
fn criterion_6_dimension_free_constant() {
    let f1 = [Density1d::Interval { a: -1.5, b: 1.5 }, Density1d::SineTilt { a: 0.4 }];
    let f2 = [Density1d::One, Density1d::One];
    let mut rng = ChaCha8Rng::seed_from_u64(6006);
    let mut detail = String::new();
    let mut all_pass = true;
    for d in [2usize, 3, 4] {
        let boxes: Vec<Vec<(f64, f64)>> = (0..6)
            .map(|_| {
                (0..d)
                    .map(|j| {
                        let hw = if j < 2 { 1.2 } else { 2.0 };
                        let c = rng.gen_range(-0.4..0.4);
                        (c - hw, c + hw)
                    })
                    .collect()
            })
            .collect();
        let rep =
            evolution_mass_mc(&f1, &f2, d, &[0.25, 0.5, 0.75], &boxes, 100_000, 600 + d as u64)
                .unwrap();
        all_pass &= rep.passes(0.05);
        let worst = rep
            .entries
            .iter()
            .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .unwrap();
        detail.push_str(&format!(
            "d={d}: C {:.3} (3sigma +-{:.3}) vs 1/M {:.3}; ",
            rep.c_hat,
            3.0 * (worst.gamma_se / worst.mu_est
                + worst.gamma_est * worst.mu_se / (worst.mu_est * worst.mu_est)),
            rep.bound
        ));
    }
    verdict(6, "dimension-free constant (Monte Carlo)", all_pass, &detail);
}

#[test]
fn criterion_7_ladder_convergence() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut all_pass = true;
    for seed in 0..5u64 {
        // m = 1: opposite half-lines
        let mu1 = DensitySpec {
            rho: Box::new(|x: &[f64]| if x[0] > 0.0 { 2.0 } else { 0.0 }),
            bound: 2.0,
        };
        let nu1 = DensitySpec {
            rho: Box::new(|x: &[f64]| if x[0] <= 0.0 { 2.0 } else { 0.0 }),
            bound: 2.0,
        };
        let r1 = dimension_ladder(&mu1, &nu1, 1, &[1, 2, 4, 8], 4_000, 64, 2, 7000 + seed)
            .unwrap();
        // m = 2: opposite quadrants
        let mu2 = DensitySpec {
            rho: Box::new(|x: &[f64]| if x[0] > 0.0 && x[1] > 0.0 { 4.0 } else { 0.0 }),
            bound: 4.0,
        };
        let nu2 = DensitySpec {
            rho: Box::new(|x: &[f64]| if x[0] <= 0.0 && x[1] <= 0.0 { 4.0 } else { 0.0 }),
            bound: 4.0,
        };
        let r2 = dimension_ladder(&mu2, &nu2, 2, &[1, 2, 3, 6], 4_000, 64, 4, 7100 + seed)
            .unwrap();
        all_pass &= r1.monotone && r1.saturated && r2.monotone && r2.saturated;
        if seed == 0 {
            let costs = |r: &gauss_ot::wiener::LadderReport| {
                r.entries.iter().map(|e| format!("{:.4}", e.cost)).collect::<Vec<_>>().join(" ")
            };
            detail.push_str(&format!("m=1 costs [{}]; m=2 costs [{}]; ", costs(&r1), costs(&r2)));
        }
    }
    let elapsed = start.elapsed();
    verdict(
        7,
        "ladder convergence and saturation",
        all_pass && elapsed.as_secs() <= 300,
        &format!("{detail}5 seeds, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_8_common_mass_fixing() {
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let d = rng.gen_range(1..=4);
        let pool: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect();
        // both measures draw atoms from the pool, so exact overlaps occur
        let pick = |rng: &mut ChaCha8Rng| -> DiscreteMeasure {
            let count = rng.gen_range(4..=8);
            let pts: Vec<Vec<f64>> =
                (0..count).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
            let ws: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..1.0)).collect();
            // merge duplicate picks so atoms stay distinct
            let mut merged: std::collections::BTreeMap<Vec<u64>, (Vec<f64>, f64)> =
                Default::default();
            for (p, w) in pts.into_iter().zip(ws) {
                let key: Vec<u64> = p.iter().map(|c| c.to_bits()).collect();
                merged.entry(key).or_insert_with(|| (p, 0.0)).1 += w;
            }
            let (points, weights) = merged.into_values().unzip();
            DiscreteMeasure::probability(points, weights).unwrap()
        };
        let mu = pick(&mut rng);
        let nu = pick(&mut rng);
        let (common, mu_rem, nu_rem) = common_mass_split(&mu, &nu).unwrap();
        let unconstrained = solve_kantorovich(&mu, &nu, CostKind::Euclidean).unwrap().0.cost;
        let constrained = if mu_rem.is_empty() {
            0.0
        } else {
            solve_kantorovich(&mu_rem, &nu_rem, CostKind::Euclidean).unwrap().0.cost
        };
        let diff = (constrained - unconstrained).abs();
        assert!(
            diff <= 1e-9 * (1.0 + unconstrained),
            "case {case}: fixed-common-mass cost {constrained} vs optimum {unconstrained} \
             (common mass {})",
            common.total_mass()
        );
        worst = worst.max(diff);
    }
    verdict(
        8,
        "common-mass fixing",
        true,
        &format!("20 overlapping instances, worst cost difference {worst:.2e}"),
    );
}
