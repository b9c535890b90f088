//! Canned reference experiments: each table id runs a fixed experiment and
//! compares the results against the embedded reference data.
//!
//! Table 1 is a plain capacity evaluation of the m-disk Euclidean ring;
//! tables 2-4 are seeded multistart maximizations of six disks with centers
//! constrained to |z| <= 0.75; tables 5-7 constrain five disks to the
//! interval [-0.75, 0.75]. Tables with several rows per radius set document
//! distinct local maxima; the comparison matches each reference row to the
//! closest capacity level found by the multistart.

use serde::Serialize;

use crate::bie::{self, SolverOptions};
use crate::geometry::{ConstraintKind, ConstraintSpec};
use crate::optim::{adjacent_distances, multistart, OptimizationProblem, OptimizeOptions};
use crate::{Error, Result};

const TABLE1: &str = include_str!("../../data/table1.csv");
const TABLE2: &str = include_str!("../../data/table2.csv");
const TABLE3: &str = include_str!("../../data/table3.csv");
const TABLE4: &str = include_str!("../../data/table4.csv");
const TABLE5: &str = include_str!("../../data/table5.csv");
const TABLE6: &str = include_str!("../../data/table6.csv");
const TABLE7: &str = include_str!("../../data/table7.csv");

/// Absolute tolerance on reproduced capacities (tables 2-7).
pub const CAPACITY_TOL: f64 = 2e-3;
/// Absolute tolerance on reproduced center distances.
pub const DISTANCE_TOL: f64 = 5e-3;
/// Absolute tolerance for the exactly-reproducible table 1.
pub const TABLE1_TOL: f64 = 1e-9;

/// One reference row of a maximization table.
#[derive(Debug, Clone)]
struct RefRow {
    case: String,
    radii: Vec<f64>,
    capacity: f64,
    gaps: Vec<f64>,
}

fn parse_rows(data: &str) -> Vec<RefRow> {
    data.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty() && !l.starts_with("case"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            RefRow {
                case: f[0].to_string(),
                radii: f[1].split_whitespace().map(|v| v.parse().unwrap()).collect(),
                capacity: f[2].parse().unwrap(),
                gaps: f[3..].iter().map(|v| v.parse().unwrap()).collect(),
            }
        })
        .collect()
}

/// Comparison of one reference row against the computed result.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub case: String,
    pub reference_capacity: f64,
    pub computed_capacity: Option<f64>,
    pub capacity_deviation: Option<f64>,
    pub reference_gaps: Vec<f64>,
    pub computed_gaps: Vec<f64>,
    pub max_gap_deviation: Option<f64>,
    pub passed: bool,
}

/// Full outcome of one table run.
#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub table_id: u8,
    pub rows: Vec<TableRow>,
    pub passed: bool,
}

/// Options threaded through from the CLI.
#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    pub seed: u64,
    /// Multistart count per radius set; `None` uses the per-table default.
    pub starts: Option<usize>,
    /// Search fidelity override.
    pub n_solver: Option<usize>,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self { seed: 7, starts: None, n_solver: None }
    }
}

pub fn run_table(table_id: u8, opts: &TableOptions) -> Result<TableReport> {
    match table_id {
        1 => run_table1(opts),
        2 => run_maximization_table(2, TABLE2, ConstraintKind::DiskCenters, 6, opts),
        3 => run_maximization_table(3, TABLE3, ConstraintKind::DiskCenters, 24, opts),
        4 => run_maximization_table(4, TABLE4, ConstraintKind::DiskCenters, 24, opts),
        5 => run_maximization_table(5, TABLE5, ConstraintKind::IntervalCenters, 12, opts),
        6 => run_maximization_table(6, TABLE6, ConstraintKind::IntervalCenters, 30, opts),
        7 => run_maximization_table(7, TABLE7, ConstraintKind::IntervalCenters, 30, opts),
        other => Err(Error::InvalidArgument(format!("table id must be 1..=7, got {other}"))),
    }
}

fn run_table1(opts: &TableOptions) -> Result<TableReport> {
    let n = opts.n_solver.unwrap_or(1024);
    let mut rows = Vec::new();
    for line in TABLE1.lines().filter(|l| !l.starts_with('#') && !l.starts_with('m') && !l.is_empty())
    {
        let fields: Vec<&str> = line.split(',').collect();
        let m: usize = fields[0].parse().unwrap();
        let reference: f64 = fields[1].parse().unwrap();
        let circles = super::euclidean_ring(m);
        let cap = bie::capacity_circles(&circles, n, &SolverOptions::default())?.cap;
        let dev = (cap - reference).abs();
        rows.push(TableRow {
            case: format!("m={m}"),
            reference_capacity: reference,
            computed_capacity: Some(cap),
            capacity_deviation: Some(dev),
            reference_gaps: vec![],
            computed_gaps: vec![],
            max_gap_deviation: None,
            passed: dev <= TABLE1_TOL,
        });
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(TableReport { table_id: 1, rows, passed })
}

fn run_maximization_table(
    table_id: u8,
    data: &str,
    kind: ConstraintKind,
    default_starts: usize,
    opts: &TableOptions,
) -> Result<TableReport> {
    let refs = parse_rows(data);
    let starts = opts.starts.unwrap_or(default_starts);
    let mut rows = Vec::new();

    // group reference rows by their radius multiset; one multistart per group
    let mut groups: Vec<(Vec<f64>, Vec<&RefRow>)> = Vec::new();
    for row in &refs {
        match groups.iter_mut().find(|(radii, _)| radii == &row.radii) {
            Some((_, members)) => members.push(row),
            None => groups.push((row.radii.clone(), vec![row])),
        }
    }

    for (radii, members) in groups {
        let constraint = ConstraintSpec::new(kind, 0.75)?;
        let mut problem = OptimizationProblem::new(radii, constraint)?;
        if let Some(n) = opts.n_solver {
            problem.n_solver = n;
        }
        let runs = multistart(&problem, starts, opts.seed, &OptimizeOptions::default())?;
        for reference in members {
            // the run whose capacity lands closest to this reference level
            let best = runs
                .iter()
                .min_by(|a, b| {
                    (a.cap - reference.capacity)
                        .abs()
                        .total_cmp(&(b.cap - reference.capacity).abs())
                })
                .expect("multistart returns at least one run");
            let gaps = adjacent_distances(&best.centers, kind)?;
            let cap_dev = (best.cap - reference.capacity).abs();
            let gap_dev = gap_pattern_deviation(&gaps, &reference.gaps, kind);
            rows.push(TableRow {
                case: reference.case.clone(),
                reference_capacity: reference.capacity,
                computed_capacity: Some(best.cap),
                capacity_deviation: Some(cap_dev),
                reference_gaps: reference.gaps.clone(),
                computed_gaps: gaps,
                max_gap_deviation: Some(gap_dev),
                passed: cap_dev <= CAPACITY_TOL && gap_dev <= DISTANCE_TOL,
            });
        }
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(TableReport { table_id, rows, passed })
}

/// Max absolute deviation of the computed gap sequence from the reference
/// one, minimized over the symmetries that leave a configuration unchanged:
/// cyclic rotations and reversal for the disk constraint, reversal for the
/// interval constraint.
pub fn gap_pattern_deviation(computed: &[f64], reference: &[f64], kind: ConstraintKind) -> f64 {
    if computed.len() != reference.len() {
        return f64::INFINITY;
    }
    let max_dev = |seq: &[f64]| {
        seq.iter()
            .zip(reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    };
    let mut best = f64::INFINITY;
    match kind {
        ConstraintKind::DiskCenters => {
            let m = computed.len();
            for rev in [false, true] {
                let mut seq = computed.to_vec();
                if rev {
                    seq.reverse();
                }
                for shift in 0..m {
                    let rotated: Vec<f64> = (0..m).map(|i| seq[(i + shift) % m]).collect();
                    best = best.min(max_dev(&rotated));
                }
            }
        }
        ConstraintKind::IntervalCenters => {
            best = max_dev(computed);
            let mut rev = computed.to_vec();
            rev.reverse();
            best = best.min(max_dev(&rev));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_data_parses() {
        for (data, rows, gaps) in [
            (TABLE2, 3, 6),
            (TABLE3, 6, 6),
            (TABLE4, 6, 6),
            (TABLE5, 4, 4),
            (TABLE6, 6, 4),
            (TABLE7, 5, 4),
        ] {
            let parsed = parse_rows(data);
            assert_eq!(parsed.len(), rows);
            for r in &parsed {
                assert_eq!(r.gaps.len(), gaps);
                assert!(r.capacity > 0.0);
                assert!(!r.radii.is_empty());
            }
        }
    }

    #[test]
    fn gap_deviation_handles_symmetries() {
        let reference = [1.0, 2.0, 3.0, 4.0];
        // rotated by two
        let rotated = [3.0, 4.0, 1.0, 2.0];
        assert_eq!(
            gap_pattern_deviation(&rotated, &reference, ConstraintKind::DiskCenters),
            0.0
        );
        // reversed for the interval kind
        let reversed = [4.0, 3.0, 2.0, 1.0];
        assert_eq!(
            gap_pattern_deviation(&reversed, &reference, ConstraintKind::IntervalCenters),
            0.0
        );
        assert!(gap_pattern_deviation(&[1.0], &reference, ConstraintKind::DiskCenters)
            .is_infinite());
    }

    #[test]
    fn invalid_table_id_rejected() {
        assert!(run_table(0, &TableOptions::default()).is_err());
        assert!(run_table(8, &TableOptions::default()).is_err());
    }
}
