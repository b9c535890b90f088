//! Command-line front end: experiment configs in TOML, machine-readable
//! results as JSON records or CSV series, and canned reference-table runs.

pub mod config;
pub mod tables;

use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bie::{self, SolverOptions};
use crate::geometry::{
    hyp_area, hyp_distance, hyp_perimeter, min_separation_angle, Constellation, HyperbolicDisk,
};
use crate::optim::{
    adjacent_distances, capacity_levels, multistart, OptimizationProblem, OptimizeOptions,
};
use crate::specialfn::{condense_radius, hyp_disk_capacity};
use crate::{Error, Result};

pub use config::ExperimentConfig;

/// Artifact version and run time attached to every record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub timestamp: String,
}

impl Provenance {
    fn now() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

/// A completed run: the echoed config, the command outputs, and provenance.
/// Re-running the echoed config reproduces the capacity values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config: ExperimentConfig,
    pub outputs: serde_json::Value,
    pub provenance: Provenance,
}

impl ResultRecord {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("serialization failed: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("record parse error: {e}")))
    }
}

/// Writes atomically: the content lands in a sibling temp file first and is
/// moved into place with a rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn complex_pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

/// Capacity of the configured constellation.
pub fn run_capacity(cfg: &ExperimentConfig, n_override: Option<usize>) -> Result<ResultRecord> {
    let constellation = cfg.constellation()?;
    let n = n_override.unwrap_or_else(|| cfg.solver_n(256));
    let opts = SolverOptions { gmres_tol: cfg.gmres_tol(), ..SolverOptions::default() };
    let result = bie::capacity_with_options(&constellation, n, &opts)?;

    let centers: Vec<Complex64> = constellation.disks().iter().map(|d| d.center).collect();
    let m = centers.len();
    let distances: Vec<f64> = if m > 1 {
        (0..m)
            .map(|i| hyp_distance(centers[i], centers[(i + 1) % m]))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut cfg_echo = cfg.clone();
    if let Some(n_over) = n_override {
        cfg_echo.solver.get_or_insert_with(|| config::SolverConfig { n: None, gmres_tol: None }).n =
            Some(n_over);
    }
    Ok(ResultRecord {
        config: cfg_echo,
        outputs: json!({
            "capacity": result.cap,
            "a": result.a,
            "b": result.b,
            "c_const": result.c_const,
            "centers": complex_pairs(&centers),
            "distances": distances,
            "diagnostics": result.diagnostics,
        }),
        provenance: Provenance::now(),
    })
}

/// Seeded multistart maximization over the configured constraint.
pub fn run_maximize(
    cfg: &ExperimentConfig,
    seed_override: Option<u64>,
    starts_override: Option<usize>,
    n_override: Option<usize>,
) -> Result<ResultRecord> {
    let constraint = cfg.constraint_spec()?;
    if cfg.disks.is_empty() {
        return Err(Error::Config("config defines no disks (radii are taken from them)".into()));
    }
    let radii: Vec<f64> = cfg.disks.iter().map(|d| d.radius).collect();
    let opt_cfg = cfg.optimizer.clone().unwrap_or(config::OptimizerConfig {
        seed: None,
        starts: None,
        tol: None,
        n_solver: None,
        n_polish: None,
        symmetry_pin: false,
    });
    let seed = seed_override.or(opt_cfg.seed).unwrap_or(7);
    let starts = starts_override.or(opt_cfg.starts).unwrap_or(5);

    let mut problem = OptimizationProblem::new(radii, constraint)?;
    problem.symmetry_pin = opt_cfg.symmetry_pin;
    if let Some(n) = n_override.or(opt_cfg.n_solver) {
        problem.n_solver = n;
    }
    let mut opts = OptimizeOptions::default();
    if let Some(tol) = opt_cfg.tol {
        opts.mu_min = tol;
    }
    if let Some(n) = opt_cfg.n_polish {
        opts.n_polish = n;
    }

    let runs = multistart(&problem, starts, seed, &opts)?;
    let levels = capacity_levels(&runs, 1e-3);
    let best = &runs[0];
    let gaps = adjacent_distances(&best.centers, constraint.kind)?;

    let mut cfg_echo = cfg.clone();
    {
        let oc = cfg_echo.optimizer.get_or_insert_with(|| config::OptimizerConfig {
            seed: None,
            starts: None,
            tol: None,
            n_solver: None,
            n_polish: None,
            symmetry_pin: false,
        });
        oc.seed = Some(seed);
        oc.starts = Some(starts);
    }
    Ok(ResultRecord {
        config: cfg_echo,
        outputs: json!({
            "capacity": best.cap,
            "centers": complex_pairs(&best.centers),
            "distances": gaps,
            "center_moduli": best.centers.iter().map(|z| z.norm()).collect::<Vec<_>>(),
            "converged": best.converged,
            "projected_gradient": best.projected_gradient,
            "evaluations": best.evaluations,
            "one_sided_fallbacks": best.one_sided_fallbacks,
            "run_capacities": runs.iter().map(|r| r.cap).collect::<Vec<_>>(),
            "levels": levels,
        }),
        provenance: Provenance::now(),
    })
}

/// One row of a two-disk sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// Sweep parameter: theta (angular) or x (linear).
    pub parameter: f64,
    pub capacity: Option<f64>,
    /// 2 x single-disk capacity; cap stays below it on feasible rows.
    pub upper_bound: f64,
    /// Single-disk capacity, the limiting reference level.
    pub single_disk_capacity: f64,
    pub feasible: bool,
}

/// Capacity of two equal disks versus their angular or linear separation.
pub fn run_sweep(cfg: &ExperimentConfig, n_override: Option<usize>) -> Result<Vec<SweepRow>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
    let n = n_override.unwrap_or_else(|| cfg.solver_n(128));
    let r = sweep.radius;
    if r <= 0.0 {
        return Err(Error::Config(format!("sweep.radius must be positive, got {r}")));
    }
    let points = sweep.points.unwrap_or(101);
    let single = hyp_disk_capacity(r)?;
    let upper = 2.0 * single;

    let mut rows = Vec::with_capacity(points);
    match sweep.kind.as_str() {
        "angular" => {
            let rc = sweep
                .r_center
                .ok_or_else(|| Error::Config("angular sweep needs sweep.r_center".into()))?;
            // disks centered at rc e^{+-i theta} touch at theta_min; the open
            // feasible range is (theta_min, pi - theta_min)
            let theta_min = min_separation_angle(rc, r)?;
            for i in 0..points {
                let frac = (i + 1) as f64 / (points + 1) as f64;
                let theta = theta_min + (PI - 2.0 * theta_min) * frac;
                let centers = [
                    Complex64::from_polar(rc, theta),
                    Complex64::from_polar(rc, -theta),
                ];
                rows.push(sweep_row(theta, &centers, r, n, single, upper));
            }
        }
        "linear" => {
            let x_max = sweep
                .x_max
                .ok_or_else(|| Error::Config("linear sweep needs sweep.x_max".into()))?;
            // disks at +-x touch at x = th(r/2)
            let x_min = (r / 2.0).tanh();
            if x_max <= x_min || x_max >= 1.0 {
                return Err(Error::Config(format!(
                    "linear sweep needs th(r/2) < x_max < 1, got {x_max}"
                )));
            }
            for i in 0..points {
                let frac = (i + 1) as f64 / (points + 1) as f64;
                let x = x_min + (x_max - x_min) * frac;
                let centers = [Complex64::new(x, 0.0), Complex64::new(-x, 0.0)];
                rows.push(sweep_row(x, &centers, r, n, single, upper));
            }
        }
        other => {
            return Err(Error::Config(format!(
                "sweep.kind must be \"angular\" or \"linear\", got \"{other}\""
            )))
        }
    }
    Ok(rows)
}

fn sweep_row(
    parameter: f64,
    centers: &[Complex64; 2],
    r: f64,
    n: usize,
    single: f64,
    upper: f64,
) -> SweepRow {
    let cap = HyperbolicDisk::new(centers[0], r)
        .and_then(|d1| Ok((d1, HyperbolicDisk::new(centers[1], r)?)))
        .and_then(|(d1, d2)| Constellation::new(vec![d1, d2]))
        .and_then(|c| bie::capacity(&c, n))
        .map(|res| res.cap);
    match cap {
        Ok(c) => SweepRow {
            parameter,
            capacity: Some(c),
            upper_bound: upper,
            single_disk_capacity: single,
            feasible: true,
        },
        Err(_) => SweepRow {
            parameter,
            capacity: None,
            upper_bound: upper,
            single_disk_capacity: single,
            feasible: false,
        },
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("parameter,capacity,upper_bound,single_disk_capacity,feasible\n");
    for r in rows {
        let cap = r.capacity.map_or(String::new(), |c| format!("{c:.15e}"));
        out.push_str(&format!(
            "{:.15e},{},{:.15e},{:.15e},{}\n",
            r.parameter, cap, r.upper_bound, r.single_disk_capacity, r.feasible
        ));
    }
    out
}

/// One row of a condensation series.
#[derive(Debug, Clone, Serialize)]
pub struct CondenseRow {
    /// Common hyperbolic radius of the m ring disks.
    pub r: f64,
    pub capacity: f64,
    /// Hyperbolic radius of the single centered disk of equal capacity.
    pub condensed_radius: f64,
    pub area_m_disks: f64,
    pub perimeter_m_disks: f64,
    pub area_single: f64,
    pub perimeter_single: f64,
}

/// Condenses the m-disk ring into one equal-capacity disk and compares
/// hyperbolic areas and perimeters across a radius grid.
pub fn run_condense(cfg: &ExperimentConfig, n_override: Option<usize>) -> Result<Vec<CondenseRow>> {
    let cc = cfg
        .condense
        .as_ref()
        .ok_or_else(|| Error::Config("missing [condense] section".into()))?;
    if cc.m < 2 {
        return Err(Error::Config("condense.m must be at least 2".into()));
    }
    if !(cc.r_min > 0.0 && cc.r_max > cc.r_min) {
        return Err(Error::Config("condense needs 0 < r_min < r_max".into()));
    }
    let n = n_override.unwrap_or_else(|| cfg.solver_n(128));
    let points = cc.points.unwrap_or(23);
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let r = cc.r_min + (cc.r_max - cc.r_min) * i as f64 / (points - 1).max(1) as f64;
        let disks = (0..cc.m)
            .map(|j| {
                let c = Complex64::from_polar(cc.ring_radius, TAU * j as f64 / cc.m as f64);
                HyperbolicDisk::new(c, r)
            })
            .collect::<Result<Vec<_>>>()?;
        let constellation = Constellation::new(disks)?;
        let cap = bie::capacity(&constellation, n)?.cap;
        let big = condense_radius(cap)?;
        rows.push(CondenseRow {
            r,
            capacity: cap,
            condensed_radius: big,
            area_m_disks: cc.m as f64 * hyp_area(r),
            perimeter_m_disks: cc.m as f64 * hyp_perimeter(r),
            area_single: hyp_area(big),
            perimeter_single: hyp_perimeter(big),
        });
    }
    Ok(rows)
}

pub fn condense_csv(rows: &[CondenseRow]) -> String {
    let mut out = String::from(
        "r,capacity,condensed_radius,area_m_disks,perimeter_m_disks,area_single,perimeter_single\n",
    );
    for row in rows {
        out.push_str(&format!(
            "{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}\n",
            row.r,
            row.capacity,
            row.condensed_radius,
            row.area_m_disks,
            row.perimeter_m_disks,
            row.area_single,
            row.perimeter_single
        ));
    }
    out
}

/// Helper shared by tables and tests: Euclidean ring circles of the first
/// reference experiment.
pub fn euclidean_ring(m: usize) -> Vec<crate::geometry::EuclideanCircle> {
    (0..m)
        .map(|j| crate::geometry::EuclideanCircle {
            center: Complex64::from_polar(0.5, TAU * j as f64 / m as f64),
            radius: 0.1,
        })
        .collect()
}

/// Convenience: disk ring constellation used by the condensation experiment
/// and the hyperbolic maximization references.
pub fn hyperbolic_ring(m: usize, ring_radius: f64, r: f64) -> Result<Constellation> {
    let disks = (0..m)
        .map(|j| {
            let c = Complex64::from_polar(ring_radius, TAU * j as f64 / m as f64);
            HyperbolicDisk::new(c, r)
        })
        .collect::<Result<Vec<_>>>()?;
    Constellation::new(disks)
}

pub use tables::{run_table, TableReport};
