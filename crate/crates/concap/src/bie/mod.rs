//! The capacity engine: parameterize the m+1 boundary circles, discretize the
//! generalized-Neumann-kernel integral equation by the Nystrom method with the
//! trapezoidal rule, solve the m integral equations with GMRES, and assemble
//! the small linear system that yields the capacity and the per-disk
//! contributions.
//!
//! Orientation conventions: the unit circle is parameterized counterclockwise
//! as e^{it}; every inner circle clockwise as c_j + r_j e^{-it}. Each
//! component uses n equispaced nodes 2 pi i / n; integrals over the whole
//! boundary carry the trapezoidal weight 2 pi / n per node. The Cauchy
//! singularity of the M kernel on the diagonal blocks is split off as a
//! cotangent kernel and integrated with the alternate-point (Wittich)
//! trapezoidal rule, which is exact on trigonometric polynomials of degree
//! below n/2.

mod gmres;

pub use gmres::{gmres, GmresResult};

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::geometry::{Constellation, EuclideanCircle};
use crate::{Error, Result};

/// Default relative GMRES tolerance; matches the accuracy regime of the
/// 14-digit reference capacities.
pub const DEFAULT_GMRES_TOL: f64 = 1e-14;

/// Sampled parameterization of all m+1 boundary circles.
#[derive(Debug, Clone)]
pub struct DiscretizedBoundary {
    /// Points per boundary component (even, >= 16).
    pub n: usize,
    /// Number of inner circles.
    pub m: usize,
    /// Boundary points, component 0 first, n points each.
    pub eta: Vec<Complex64>,
    /// First parameter derivative of eta.
    pub etap: Vec<Complex64>,
    /// Second parameter derivative of eta.
    pub etapp: Vec<Complex64>,
    /// Component index (0..=m) of each node.
    pub component_of: Vec<usize>,
    /// The n parameter values 2 pi i / n shared by all components.
    pub nodes: Vec<f64>,
    /// Auxiliary interior point of the domain.
    pub alpha: Complex64,
    /// The inner circles, in disk order.
    pub circles: Vec<EuclideanCircle>,
}

/// Solver knobs for a capacity computation.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub gmres_tol: f64,
    /// Iteration cap; defaults to the full system dimension.
    pub max_iterations: Option<usize>,
    /// Override for the auxiliary point; chosen automatically when absent.
    pub alpha: Option<Complex64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { gmres_tol: DEFAULT_GMRES_TOL, max_iterations: None, alpha: None }
    }
}

/// Per-disk outcome of one integral-equation solve.
#[derive(Debug, Clone)]
pub struct IntegralEquationSolution {
    /// Boundary samples of the solution density mu_k.
    pub density: Vec<f64>,
    /// Per-component means of the piecewise-constant h_k, length m+1.
    pub h_means: Vec<f64>,
    /// Largest intra-component spread of h_k; the primary discretization
    /// quality diagnostic.
    pub h_spread: f64,
    pub gmres_iterations: usize,
    pub gmres_residual: f64,
}

/// Convergence and quality diagnostics of a capacity computation.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SolverDiagnostics {
    pub n: usize,
    pub gmres_iterations: Vec<usize>,
    pub gmres_residuals: Vec<f64>,
    /// Max intra-component spread of any h_k.
    pub h_spread: f64,
    /// Set when the spread exceeds 1e-6, signalling near-singular geometry.
    pub near_singular: bool,
}

/// Total capacity with per-disk contributions and solver diagnostics.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub cap: f64,
    /// Solution of the (m+1) x (m+1) system; cap = 2 pi sum(a).
    pub a: Vec<f64>,
    /// Per-disk contributions b_k = 2 pi a_k.
    pub b: Vec<f64>,
    /// The auxiliary unknown of the linear system, kept as a diagnostic.
    pub c_const: f64,
    pub diagnostics: SolverDiagnostics,
}

/// Discretizes the boundary of the constellation's complement domain.
pub fn parameterize(c: &Constellation, n: usize) -> Result<DiscretizedBoundary> {
    discretize_circles(&c.euclidean_circles(), n, None)
}

/// Discretizes directly from Euclidean circles (used when the geometry is
/// specified in Euclidean terms, e.g. the ring reference tables).
pub fn discretize_circles(
    circles: &[EuclideanCircle],
    n: usize,
    alpha: Option<Complex64>,
) -> Result<DiscretizedBoundary> {
    if n < 16 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("n must be even and >= 16, got {n}")));
    }
    if circles.is_empty() {
        return Err(Error::InvalidArgument("need at least one inner circle".into()));
    }
    for (i, ci) in circles.iter().enumerate() {
        if ci.radius <= 0.0 {
            return Err(Error::Domain(format!("circle {i} has nonpositive radius")));
        }
        if ci.center.norm() + ci.radius >= 1.0 {
            return Err(Error::Overlap(format!("circle {i} touches or crosses the unit circle")));
        }
        for (j, cj) in circles.iter().enumerate().skip(i + 1) {
            if (ci.center - cj.center).norm() <= ci.radius + cj.radius {
                return Err(Error::Overlap(format!("circles {i} and {j} intersect or touch")));
            }
        }
    }

    let m = circles.len();
    let nodes: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let total = (m + 1) * n;
    let mut eta = Vec::with_capacity(total);
    let mut etap = Vec::with_capacity(total);
    let mut etapp = Vec::with_capacity(total);
    let mut component_of = Vec::with_capacity(total);

    for &t in &nodes {
        let e = Complex64::from_polar(1.0, t);
        eta.push(e);
        etap.push(Complex64::i() * e);
        etapp.push(-e);
        component_of.push(0);
    }
    for (j, c) in circles.iter().enumerate() {
        for &t in &nodes {
            let e = Complex64::from_polar(1.0, -t);
            eta.push(c.center + c.radius * e);
            etap.push(-Complex64::i() * c.radius * e);
            etapp.push(-c.radius * e);
            component_of.push(j + 1);
        }
    }

    let alpha = match alpha {
        Some(a) => {
            if !point_in_domain(a, circles) {
                return Err(Error::InvalidArgument(format!(
                    "auxiliary point {a} does not lie in the domain"
                )));
            }
            a
        }
        None => choose_alpha(circles)?,
    };

    Ok(DiscretizedBoundary { n, m, eta, etap, etapp, component_of, nodes, alpha, circles: circles.to_vec() })
}

fn point_in_domain(p: Complex64, circles: &[EuclideanCircle]) -> bool {
    p.norm() < 1.0 && circles.iter().all(|c| (p - c.center).norm() > c.radius)
}

/// Picks the auxiliary point alpha: the origin when it lies in the domain,
/// otherwise a point stepped away from the disk covering the origin by half
/// the minimal gap.
fn choose_alpha(circles: &[EuclideanCircle]) -> Result<Complex64> {
    let origin = Complex64::new(0.0, 0.0);
    if point_in_domain(origin, circles) {
        return Ok(origin);
    }
    let covering = circles
        .iter()
        .position(|c| (origin - c.center).norm() <= c.radius)
        .expect("origin not in domain implies a covering disk");
    let c = circles[covering];
    // half the minimal gap between this circle and the other boundary pieces
    let mut gap = 1.0 - (c.center.norm() + c.radius);
    for (j, other) in circles.iter().enumerate() {
        if j != covering {
            gap = gap.min((c.center - other.center).norm() - c.radius - other.radius);
        }
    }
    let delta = 0.5 * gap;
    let base = if c.center.norm() > 0.0 { c.center / c.center.norm() } else { Complex64::new(1.0, 0.0) };
    for dir in [-base, base, Complex64::i() * base, -Complex64::i() * base] {
        let candidate = c.center + dir * (c.radius + delta);
        if point_in_domain(candidate, circles) {
            return Ok(candidate);
        }
    }
    Err(Error::Overlap("no admissible auxiliary point found; geometry too tight".into()))
}

/// The generalized Neumann kernel N(s,t) between two nodes, including the
/// diagonal limit (1/pi) Im(eta''/(2 eta') - A'/A).
pub fn neumann_kernel(s: usize, t: usize, db: &DiscretizedBoundary) -> f64 {
    kernel_value(s, t, db).im / PI
}

/// The companion kernel M(s,t) off the diagonal; on the diagonal this returns
/// the continuous part M1(t,t) (the cotangent singularity is handled by the
/// quadrature rule, not the kernel value).
pub fn m_kernel(s: usize, t: usize, db: &DiscretizedBoundary) -> f64 {
    kernel_value(s, t, db).re / PI
}

fn kernel_value(s: usize, t: usize, db: &DiscretizedBoundary) -> Complex64 {
    if s == t {
        let a = db.eta[t] - db.alpha;
        db.etapp[t] / (2.0 * db.etap[t]) - db.etap[t] / a
    } else {
        let a_s = db.eta[s] - db.alpha;
        let a_t = db.eta[t] - db.alpha;
        a_s / a_t * db.etap[t] / (db.eta[t] - db.eta[s])
    }
}

/// Nystrom matrices of the two integral operators with quadrature weights
/// folded in: `nw` applies N, `mw` applies M (Wittich rule on the singular
/// diagonal blocks).
#[derive(Debug, Clone)]
pub struct KernelMatrices {
    pub nw: DMatrix<f64>,
    pub mw: DMatrix<f64>,
}

impl KernelMatrices {
    pub fn build(db: &DiscretizedBoundary) -> Self {
        let total = db.eta.len();
        let n = db.n;
        let h = 2.0 * PI / n as f64;
        let mut nw = DMatrix::zeros(total, total);
        let mut mw = DMatrix::zeros(total, total);

        // b(t) = eta'(t) / A(t), reused across rows
        let b: Vec<Complex64> =
            (0..total).map(|t| db.etap[t] / (db.eta[t] - db.alpha)).collect();
        let a: Vec<Complex64> = (0..total).map(|s| db.eta[s] - db.alpha).collect();

        for t in 0..total {
            let ct = db.component_of[t];
            let tt = db.nodes[t % n];
            for s in 0..total {
                let w = if s == t {
                    db.etapp[t] / (2.0 * db.etap[t]) - b[t]
                } else {
                    a[s] * b[t] / (db.eta[t] - db.eta[s])
                };
                nw[(s, t)] = h * w.im / PI;
                if db.component_of[s] == ct {
                    // continuous part M1 = M + cot((s-t)/2)/(2 pi), plus the
                    // alternate-point rule for the cotangent itself
                    let ts = db.nodes[s % n];
                    let m1 = if s == t {
                        w.re / PI
                    } else {
                        w.re / PI + 1.0 / ((ts - tt) / 2.0).tan() / (2.0 * PI)
                    };
                    let mut entry = h * m1;
                    if (s % n).abs_diff(t % n) % 2 == 1 {
                        entry -= 2.0 / n as f64 / ((ts - tt) / 2.0).tan();
                    }
                    mw[(s, t)] = entry;
                } else {
                    mw[(s, t)] = h * w.re / PI;
                }
            }
        }
        Self { nw, mw }
    }

    pub fn apply_n(&self, f: &DVector<f64>) -> DVector<f64> {
        &self.nw * f
    }

    pub fn apply_m(&self, f: &DVector<f64>) -> DVector<f64> {
        &self.mw * f
    }
}

/// Applies the M operator to boundary samples; convenience wrapper that
/// builds the Nystrom matrices for one application.
pub fn apply_m(f: &[f64], db: &DiscretizedBoundary) -> Vec<f64> {
    let mats = KernelMatrices::build(db);
    mats.apply_m(&DVector::from_column_slice(f)).as_slice().to_vec()
}

/// Solves the k-th integral equation (k in 1..=m) and returns the
/// per-component means of the piecewise-constant output h_k.
pub fn solve_ie(
    k: usize,
    db: &DiscretizedBoundary,
    mats: &KernelMatrices,
    opts: &SolverOptions,
) -> Result<IntegralEquationSolution> {
    if k == 0 || k > db.m {
        return Err(Error::InvalidArgument(format!("disk index {k} out of range 1..={}", db.m)));
    }
    let total = db.eta.len();
    let z_k = db.circles[k - 1].center;
    let gamma = DVector::from_fn(total, |i, _| (db.eta[i] - z_k).norm().ln());

    let rhs = -mats.apply_m(&gamma);
    let maxit = opts.max_iterations.unwrap_or(total);
    let sol = gmres(|v| v - mats.apply_n(v), &rhs, opts.gmres_tol, maxit)?;

    let h = (mats.apply_m(&sol.x) - (&gamma - mats.apply_n(&gamma))) / 2.0;
    let mut h_means = vec![0.0; db.m + 1];
    let mut spread = 0.0f64;
    for comp in 0..=db.m {
        let (mut lo, mut hi, mut sum, mut cnt) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for i in 0..total {
            if db.component_of[i] == comp {
                let v = h[i];
                lo = lo.min(v);
                hi = hi.max(v);
                sum += v;
                cnt += 1;
            }
        }
        h_means[comp] = sum / cnt as f64;
        spread = spread.max(hi - lo);
    }

    Ok(IntegralEquationSolution {
        density: sol.x.as_slice().to_vec(),
        h_means,
        h_spread: spread,
        gmres_iterations: sol.iterations,
        gmres_residual: sol.residual,
    })
}

/// Capacity of the condenser formed by the unit disk and the constellation.
pub fn capacity(c: &Constellation, n: usize) -> Result<CapacityResult> {
    capacity_with_options(c, n, &SolverOptions::default())
}

pub fn capacity_with_options(
    c: &Constellation,
    n: usize,
    opts: &SolverOptions,
) -> Result<CapacityResult> {
    let db = discretize_circles(&c.euclidean_circles(), n, opts.alpha)?;
    capacity_of_boundary(&db, opts)
}

/// Capacity from Euclidean circles directly.
pub fn capacity_circles(
    circles: &[EuclideanCircle],
    n: usize,
    opts: &SolverOptions,
) -> Result<CapacityResult> {
    let db = discretize_circles(circles, n, opts.alpha)?;
    capacity_of_boundary(&db, opts)
}

fn capacity_of_boundary(db: &DiscretizedBoundary, opts: &SolverOptions) -> Result<CapacityResult> {
    let m = db.m;
    let mats = KernelMatrices::build(db);

    let mut h_cols = Vec::with_capacity(m);
    let mut iterations = Vec::with_capacity(m);
    let mut residuals = Vec::with_capacity(m);
    let mut h_spread = 0.0f64;
    for k in 1..=m {
        let sol = solve_ie(k, db, &mats, opts)?;
        h_spread = h_spread.max(sol.h_spread);
        iterations.push(sol.gmres_iterations);
        residuals.push(sol.gmres_residual);
        h_cols.push(sol.h_means);
    }

    // rows [h_{j,1} ... h_{j,m} 1], rhs [0, 1, ..., 1]
    let mut sys = DMatrix::zeros(m + 1, m + 1);
    for (k, col) in h_cols.iter().enumerate() {
        for j in 0..=m {
            sys[(j, k)] = col[j];
        }
    }
    for j in 0..=m {
        sys[(j, m)] = 1.0;
    }
    let rhs = DVector::from_fn(m + 1, |j, _| if j == 0 { 0.0 } else { 1.0 });
    let sol = sys
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("capacity system has no unique solution".into()))?;

    let a: Vec<f64> = sol.as_slice()[..m].to_vec();
    let b: Vec<f64> = a.iter().map(|&v| 2.0 * PI * v).collect();
    let cap = b.iter().sum();
    Ok(CapacityResult {
        cap,
        a,
        b,
        c_const: sol[m],
        diagnostics: SolverDiagnostics {
            n: db.n,
            gmres_iterations: iterations,
            gmres_residuals: residuals,
            h_spread,
            near_singular: h_spread > 1e-6,
        },
    })
}
