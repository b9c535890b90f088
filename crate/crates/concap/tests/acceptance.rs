//! Acceptance suite: one test per acceptance criterion, each emitting a
//! single pass/fail line with the measured deviation.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see
//! the lines; the assertions enforce the same tolerances either way.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use concap::bie::{self, SolverOptions};
use concap::cli::tables::gap_pattern_deviation;
use concap::cli::{self, ExperimentConfig};
use concap::geometry::{
    hyp_distance, ConstraintKind, ConstraintSpec, Constellation, EuclideanCircle, HyperbolicDisk,
};
use concap::optim::{
    adjacent_distances, multistart, OptimizationProblem, OptimizeOptions,
};
use concap::specialfn::{ellip_k, hyp_disk_capacity, mu};

fn report(criterion: u32, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} ({detail})");
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn euclidean_ring(m: usize) -> Vec<EuclideanCircle> {
    (0..m)
        .map(|j| EuclideanCircle {
            center: Complex64::from_polar(0.5, TAU * j as f64 / m as f64),
            radius: 0.1,
        })
        .collect()
}

fn disk_problem(radii: Vec<f64>, r_max: f64) -> OptimizationProblem {
    OptimizationProblem::new(
        radii,
        ConstraintSpec::new(ConstraintKind::DiskCenters, r_max).unwrap(),
    )
    .unwrap()
}

fn interval_problem(radii: Vec<f64>, r_max: f64) -> OptimizationProblem {
    OptimizationProblem::new(
        radii,
        ConstraintSpec::new(ConstraintKind::IntervalCenters, r_max).unwrap(),
    )
    .unwrap()
}

#[test]
fn criterion_1_single_disk_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut max_dev = 0.0f64;
    for _ in 0..20 {
        let center = Complex64::from_polar(0.8 * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
        let radius = 0.1 + 1.4 * rng.gen::<f64>();
        let c = Constellation::new(vec![HyperbolicDisk::new(center, radius).unwrap()]).unwrap();
        let cap = bie::capacity(&c, 256).unwrap().cap;
        let exact = hyp_disk_capacity(radius).unwrap();
        max_dev = max_dev.max((cap - exact).abs());
    }
    report(1, max_dev <= 1e-8, &format!("20 random disks, max |cap - closed form| = {max_dev:.2e}"));
}

#[test]
fn criterion_2_ring_reference_capacities() {
    let references = [
        (5, 9.47487674904924),
        (6, 10.0486182568334),
        (7, 10.4636668610180),
        (8, 10.7735173309461),
    ];
    let mut max_dev = 0.0f64;
    for (m, reference) in references {
        let cap = bie::capacity_circles(&euclidean_ring(m), 1024, &SolverOptions::default())
            .unwrap()
            .cap;
        max_dev = max_dev.max((cap - reference).abs());
    }
    report(2, max_dev <= 1e-9, &format!("m = 5..8 at n = 1024, max deviation = {max_dev:.2e}"));
}

#[test]
fn criterion_3_six_equal_disks_maximization() {
    let problem = disk_problem(vec![0.2; 6], 0.75);
    let runs = multistart(&problem, 5, 7, &OptimizeOptions::default()).unwrap();
    let best = &runs[0];

    let cap_dev = (best.cap - 13.7574).abs();
    let modulus_dev = best
        .centers
        .iter()
        .map(|z| (z.norm() - 0.75).abs())
        .fold(0.0f64, f64::max);
    let gaps = adjacent_distances(&best.centers, ConstraintKind::DiskCenters).unwrap();
    let gap_dev = gaps.iter().map(|g| (g - 2.6161).abs()).fold(0.0f64, f64::max);

    let ok = cap_dev <= 1e-3 && modulus_dev <= 1e-4 && gap_dev <= 2e-3;
    report(
        3,
        ok,
        &format!(
            "5 starts: cap {:.6} (dev {cap_dev:.1e}), max | |z|-0.75 | = {modulus_dev:.1e}, \
             max gap dev = {gap_dev:.1e}",
            best.cap
        ),
    );
}

#[test]
fn criterion_4_one_large_disk_maximization() {
    let problem = disk_problem(vec![0.8, 0.2, 0.2, 0.2, 0.2, 0.2], 0.75);
    let runs = multistart(&problem, 3, 11, &OptimizeOptions::default()).unwrap();
    let best = &runs[0];

    let cap_dev = (best.cap - 16.6416).abs();
    let gaps = adjacent_distances(&best.centers, ConstraintKind::DiskCenters).unwrap();
    let reference = [2.9128, 2.4504, 2.4363, 2.4363, 2.4504, 2.9128];
    let gap_dev = gap_pattern_deviation(&gaps, &reference, ConstraintKind::DiskCenters);

    let ok = cap_dev <= 2e-3 && gap_dev <= 5e-3;
    report(
        4,
        ok,
        &format!("cap {:.6} (dev {cap_dev:.1e}), distance pattern dev = {gap_dev:.1e}", best.cap),
    );
}

#[test]
fn criterion_5_two_enlarged_disks_local_maxima() {
    let problem = disk_problem(vec![0.4, 0.4, 0.2, 0.2, 0.2, 0.2], 0.75);
    let runs = multistart(&problem, 20, 7, &OptimizeOptions::default()).unwrap();

    // cluster the raw run capacities finely enough to tell the two nearby
    // levels (3e-4 apart) from each other
    let mut caps: Vec<f64> = runs.iter().map(|r| r.cap).collect();
    caps.sort_by(|a, b| b.total_cmp(a));
    let mut levels: Vec<f64> = Vec::new();
    for c in caps {
        if levels.last().map_or(true, |l| (l - c).abs() > 1.5e-4) {
            levels.push(c);
        }
    }

    let references = [15.4245, 15.4263, 15.4266];
    let matched = references
        .iter()
        .filter(|&&r| levels.iter().any(|l| (l - r).abs() <= 2e-3))
        .count();
    let distinct_hits: Vec<f64> = levels
        .iter()
        .copied()
        .filter(|l| references.iter().any(|r| (l - r).abs() <= 2e-3))
        .collect();

    let ok = matched == 3 && distinct_hits.len() >= 3;
    report(
        5,
        ok,
        &format!("20 starts: found levels {levels:?}, {matched}/3 references matched"),
    );
}

#[test]
fn criterion_6_interval_constraint_maximization() {
    // all radii equal
    let problem_a = interval_problem(vec![0.2; 5], 0.75);
    let runs_a = multistart(&problem_a, 6, 7, &OptimizeOptions::default()).unwrap();
    let best_a = &runs_a[0];
    let cap_dev_a = (best_a.cap - 8.0200).abs();
    let gaps_a = adjacent_distances(&best_a.centers, ConstraintKind::IntervalCenters).unwrap();
    let ref_a = [0.9467, 0.9992, 0.99920, 0.9467];
    let gap_dev_a = gap_pattern_deviation(&gaps_a, &ref_a, ConstraintKind::IntervalCenters);

    // one disk enlarged; the global maximum parks it at an interval end
    let problem_b = interval_problem(vec![0.4, 0.2, 0.2, 0.2, 0.2], 0.75);
    let runs_b = multistart(&problem_b, 8, 7, &OptimizeOptions::default()).unwrap();
    let best_b = &runs_b[0];
    let cap_dev_b = (best_b.cap - 8.7506).abs();
    let gaps_b = adjacent_distances(&best_b.centers, ConstraintKind::IntervalCenters).unwrap();
    let ref_b = [1.2166, 0.9160, 0.90604, 0.8532];
    let gap_dev_b = gap_pattern_deviation(&gaps_b, &ref_b, ConstraintKind::IntervalCenters);

    let ok = cap_dev_a <= 1e-3 && gap_dev_a <= 5e-3 && cap_dev_b <= 1e-3 && gap_dev_b <= 5e-3;
    report(
        6,
        ok,
        &format!(
            "case A cap {:.5} (dev {cap_dev_a:.1e}, gaps {gap_dev_a:.1e}); \
             case B cap {:.5} (dev {cap_dev_b:.1e}, gaps {gap_dev_b:.1e})",
            best_a.cap, best_b.cap
        ),
    );
}

#[test]
fn criterion_7_special_function_suite() {
    let mu_fix = (mu(std::f64::consts::FRAC_1_SQRT_2).unwrap() - PI / 2.0).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut identity_dev = 0.0f64;
    for _ in 0..100 {
        let r = 0.001 + 0.998 * rng.gen::<f64>();
        let rp = (1.0 - r * r).sqrt();
        identity_dev = identity_dev
            .max((mu(r).unwrap() * mu(rp).unwrap() - PI * PI / 4.0).abs());
    }

    // independent quadrature oracle: composite Simpson on the smooth form
    let quad_k = |r: f64| {
        let f = |theta: f64| 1.0 / (1.0 - (r * theta.sin()).powi(2)).sqrt();
        let n = 20_000;
        let h = PI / 2.0 / n as f64;
        let mut acc = f(0.0) + f(PI / 2.0);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        acc * h / 3.0
    };
    let mut k_dev = 0.0f64;
    for i in 1..20 {
        let r = i as f64 / 20.0;
        k_dev = k_dev.max((ellip_k(r).unwrap() - quad_k(r)).abs());
    }

    let ok = mu_fix <= 1e-13 && identity_dev <= 1e-12 && k_dev <= 1e-12;
    report(
        7,
        ok,
        &format!(
            "mu fixed point dev {mu_fix:.1e}, identity dev {identity_dev:.1e}, \
             K quadrature dev {k_dev:.1e}"
        ),
    );
}

#[test]
fn criterion_8_property_suite() {
    // subadditivity and max lower bound on random constellations
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut bound_slack = 0.0f64;
    let mut built = 0;
    while built < 50 {
        let m = rng.gen_range(2..=4);
        let disks: Option<Vec<HyperbolicDisk>> = (0..m)
            .map(|_| {
                let center =
                    Complex64::from_polar(0.7 * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
                let radius = 0.1 + 0.4 * rng.gen::<f64>();
                HyperbolicDisk::new(center, radius).ok()
            })
            .collect();
        let Some(disks) = disks else { continue };
        let separated = disks.iter().enumerate().all(|(i, a)| {
            disks.iter().skip(i + 1).all(|b| {
                hyp_distance(a.center, b.center).map_or(false, |d| d > a.radius + b.radius + 0.05)
            })
        });
        if !separated {
            continue;
        }
        let c = Constellation::new(disks.clone()).unwrap();
        let cap = bie::capacity(&c, 256).unwrap().cap;
        let singles: Vec<f64> =
            disks.iter().map(|d| hyp_disk_capacity(d.radius).unwrap()).collect();
        let sum: f64 = singles.iter().sum();
        let max = singles.iter().fold(0.0f64, |a, &b| a.max(b));
        bound_slack = bound_slack.max(cap - sum).max(max - cap);
        built += 1;
    }
    let subadditive_ok = bound_slack <= 1e-8;

    // rotational invariance
    let base = vec![
        HyperbolicDisk::new(Complex64::new(0.3, 0.1), 0.3).unwrap(),
        HyperbolicDisk::new(Complex64::new(-0.4, 0.25), 0.4).unwrap(),
    ];
    let rot = Complex64::from_polar(1.0, 1.234);
    let rotated: Vec<_> = base
        .iter()
        .map(|d| HyperbolicDisk::new(rot * d.center, d.radius).unwrap())
        .collect();
    let c1 = bie::capacity(&Constellation::new(base).unwrap(), 128).unwrap().cap;
    let c2 = bie::capacity(&Constellation::new(rotated).unwrap(), 128).unwrap().cap;
    let rotation_dev = (c1 - c2).abs();

    // equal contributions and spread on the symmetric ring
    let ring6 = bie::capacity_circles(&euclidean_ring(6), 256, &SolverOptions::default()).unwrap();
    let b_dev = ring6.b.iter().map(|b| (b - ring6.b[0]).abs()).fold(0.0f64, f64::max);
    let spread = ring6.diagnostics.h_spread;

    // alpha independence
    let mut o1 = SolverOptions::default();
    o1.alpha = Some(Complex64::new(0.0, 0.0));
    let mut o2 = SolverOptions::default();
    o2.alpha = Some(Complex64::new(-0.2, 0.15));
    let ca = bie::capacity_circles(&euclidean_ring(5), 128, &o1).unwrap().cap;
    let cb = bie::capacity_circles(&euclidean_ring(5), 128, &o2).unwrap().cap;
    let alpha_dev = (ca - cb).abs();

    // exponential self-convergence on the five-disk ring; the n grid keeps a
    // fixed parity (multiples of 8) because the trapezoidal error of this
    // symmetric geometry advances in parity pairs
    let reference =
        bie::capacity_circles(&euclidean_ring(5), 1024, &SolverOptions::default()).unwrap().cap;
    let mut errors = Vec::new();
    for n in [16, 24, 32] {
        let cap = bie::capacity_circles(&euclidean_ring(5), n, &SolverOptions::default())
            .unwrap()
            .cap;
        errors.push((cap - reference).abs());
    }
    // a second geometry without that symmetry, resolvable over a longer grid
    let near = vec![EuclideanCircle { center: Complex64::new(0.65, 0.0), radius: 0.25 }];
    let near_ref = bie::capacity_circles(&near, 512, &SolverOptions::default()).unwrap().cap;
    let mut near_errors = Vec::new();
    for n in [16, 24, 32, 48] {
        let cap = bie::capacity_circles(&near, n, &SolverOptions::default()).unwrap().cap;
        near_errors.push((cap - near_ref).abs());
    }
    let geometric = |e: &[f64]| e.windows(2).all(|w| w[1] < 0.5 * w[0] || w[1] < 1e-13);
    let slope_ok = geometric(&errors) && geometric(&near_errors);

    let ok = subadditive_ok
        && rotation_dev <= 1e-9
        && b_dev <= 1e-8
        && spread <= 1e-8
        && alpha_dev <= 1e-9
        && slope_ok;
    report(
        8,
        ok,
        &format!(
            "bound slack {bound_slack:.1e}, rotation {rotation_dev:.1e}, b_k spread {b_dev:.1e}, \
             h spread {spread:.1e}, alpha dev {alpha_dev:.1e}, \
             convergence errors {errors:?} and {near_errors:?}"
        ),
    );
}

#[test]
fn criterion_9_condensation() {
    let mut cfg = ExperimentConfig::default();
    cfg.condense = Some(concap::cli::config::CondenseConfig {
        m: 6,
        ring_radius: 0.75,
        r_min: 0.1,
        r_max: 1.2,
        points: Some(23),
    });
    let rows = cli::run_condense(&cfg, Some(128)).unwrap();
    assert_eq!(rows.len(), 23);

    let area_ok = rows.iter().all(|r| r.area_single > r.area_m_disks);
    let sign_changes = rows
        .windows(2)
        .filter(|w| {
            let d0 = w[0].perimeter_m_disks - w[0].perimeter_single;
            let d1 = w[1].perimeter_m_disks - w[1].perimeter_single;
            d0.signum() != d1.signum()
        })
        .count();

    let ok = area_ok && sign_changes == 1;
    report(
        9,
        ok,
        &format!(
            "single-disk area dominates on all 23 rows: {area_ok}; \
             perimeter sign changes: {sign_changes}"
        ),
    );
}
