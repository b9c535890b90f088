//! Constrained maximization of the condenser capacity over disk centers with
//! fixed hyperbolic radii.
//!
//! The algorithm is a log-barrier interior method: the inequality constraints
//! (pairwise separation, center containment) enter through a barrier term
//! -mu sum(log g_i); each barrier subproblem is minimized with BFGS on
//! central-difference gradients and a strictly feasible backtracking line
//! search; mu is reduced by a factor of 10 down to 1e-6. Capacity is
//! evaluated at a cheap discretization during the search and re-evaluated at
//! a finer one for the reported value.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bie;
use crate::geometry::{hyp_distance, ConstraintKind, ConstraintSpec, Constellation, HyperbolicDisk};
use crate::{Error, Result};

/// Minimal pairwise clearance (in hyperbolic distance) kept between disks so
/// the integral equation stays well-conditioned near tangency.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// Fixed radii plus the constraint geometry of one maximization problem.
#[derive(Debug, Clone)]
pub struct OptimizationProblem {
    /// Hyperbolic radii of the m disks.
    pub radii: Vec<f64>,
    pub constraint: ConstraintSpec,
    /// Fix center 1 to the positive real axis (disk constraint only) to
    /// quotient the rotational symmetry of the argmax set.
    pub symmetry_pin: bool,
    /// Discretization size per capacity evaluation during the search.
    pub n_solver: usize,
}

impl OptimizationProblem {
    /// Validates the radii and probes the feasible set with rejection
    /// sampling before accepting the problem.
    pub fn new(radii: Vec<f64>, constraint: ConstraintSpec) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidArgument("need at least one disk".into()));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::Domain(format!("radii must be positive, got {r}")));
        }
        let problem = Self { radii, constraint, symmetry_pin: false, n_solver: 64 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        random_start(&problem, &mut rng)?; // feasibility probe
        Ok(problem)
    }

    fn dim(&self) -> usize {
        match self.constraint.kind {
            ConstraintKind::DiskCenters => 2 * self.radii.len(),
            ConstraintKind::IntervalCenters => self.radii.len(),
        }
    }

    fn unpack(&self, x: &[f64]) -> Vec<Complex64> {
        match self.constraint.kind {
            ConstraintKind::DiskCenters => {
                x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
            }
            ConstraintKind::IntervalCenters => {
                x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
            }
        }
    }

    fn pack(&self, centers: &[Complex64]) -> Vec<f64> {
        match self.constraint.kind {
            ConstraintKind::DiskCenters => {
                centers.iter().flat_map(|z| [z.re, z.im]).collect()
            }
            ConstraintKind::IntervalCenters => centers.iter().map(|z| z.re).collect(),
        }
    }

    /// Index of the coordinate held at zero by the symmetry pin, if any.
    fn frozen_coordinate(&self) -> Option<usize> {
        if self.symmetry_pin && self.constraint.kind == ConstraintKind::DiskCenters {
            Some(1) // imaginary part of center 1
        } else {
            None
        }
    }

    /// Inequality constraints g(x) >= 0: pairwise clearance beyond the
    /// margin, then containment per the constraint kind.
    fn constraints(&self, x: &[f64]) -> Vec<f64> {
        let zs = self.unpack(x);
        let m = zs.len();
        let mut g = Vec::with_capacity(m * (m + 3) / 2);
        for i in 0..m {
            for j in i + 1..m {
                let rho = hyp_distance(zs[i], zs[j]).unwrap_or(-10.0);
                g.push(rho - self.radii[i] - self.radii[j] - DEFAULT_MARGIN);
            }
        }
        for z in &zs {
            match self.constraint.kind {
                ConstraintKind::DiskCenters => g.push(self.constraint.r_max - z.norm()),
                ConstraintKind::IntervalCenters => {
                    g.push(self.constraint.r_max - z.re);
                    g.push(z.re + self.constraint.r_max);
                }
            }
        }
        g
    }
}

/// One accepted step of the search.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub iteration: usize,
    pub centers: Vec<Complex64>,
    /// Best capacity seen up to this step (search fidelity).
    pub cap: f64,
    /// Max constraint violation of the iterate (0 while strictly feasible).
    pub violation: f64,
}

/// Outcome of one maximization run.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub centers: Vec<Complex64>,
    /// Capacity of the final configuration at the polish fidelity.
    pub cap: f64,
    pub trace: Vec<TraceEntry>,
    /// Total capacity-solver calls.
    pub evaluations: usize,
    /// True when the KKT stationarity proxy and feasibility both hold.
    pub converged: bool,
    /// Norm of the constraint-projected capacity gradient at the end.
    pub projected_gradient: f64,
    /// Gradient stencil points that fell back to one-sided differences.
    pub one_sided_fallbacks: usize,
}

/// Tunable knobs of the barrier method; the defaults reproduce the reference
/// experiments.
#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub mu0: f64,
    /// Outer (interior-point) tolerance; the barrier loop stops here.
    pub mu_min: f64,
    pub max_inner_iterations: usize,
    /// Central-difference step for the capacity gradient.
    pub grad_step: f64,
    /// Threshold on the projected-gradient norm in the convergence check.
    pub kkt_tol: f64,
    /// Discretization size of the final reported capacity and the check.
    pub n_polish: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            mu0: 0.1,
            mu_min: 1e-6,
            max_inner_iterations: 60,
            grad_step: 1e-5,
            kkt_tol: 1e-4,
            n_polish: 256,
        }
    }
}

/// Capacity of the configuration at the problem's search fidelity.
pub fn objective(centers: &[Complex64], problem: &OptimizationProblem) -> Result<f64> {
    capacity_of(centers, problem, problem.n_solver)
}

fn capacity_of(centers: &[Complex64], problem: &OptimizationProblem, n: usize) -> Result<f64> {
    let disks = centers
        .iter()
        .zip(&problem.radii)
        .map(|(&z, &r)| HyperbolicDisk::new(z, r))
        .collect::<Result<Vec<_>>>()?;
    let c = Constellation::new(disks)?;
    Ok(bie::capacity(&c, n)?.cap)
}

/// Central-difference gradient of the capacity with respect to the packed
/// center coordinates; falls back to a one-sided difference at stencil points
/// where the perturbed configuration cannot be evaluated. Returns the
/// gradient, the evaluation count and the number of one-sided fallbacks.
pub fn numerical_gradient(
    centers: &[Complex64],
    problem: &OptimizationProblem,
    h: f64,
) -> Result<(Vec<f64>, usize, usize)> {
    let x = problem.pack(centers);
    let f0 = objective(centers, problem)?;
    let mut evals = 1;
    let mut fallbacks = 0;
    let mut grad = vec![0.0; x.len()];
    for i in 0..x.len() {
        if problem.frozen_coordinate() == Some(i) {
            continue;
        }
        let mut xp = x.clone();
        xp[i] += h;
        let mut xm = x.clone();
        xm[i] -= h;
        let fp = objective(&problem.unpack(&xp), problem);
        let fm = objective(&problem.unpack(&xm), problem);
        evals += 2;
        grad[i] = match (fp, fm) {
            (Ok(fp), Ok(fm)) => (fp - fm) / (2.0 * h),
            (Ok(fp), Err(_)) => {
                fallbacks += 1;
                (fp - f0) / h
            }
            (Err(_), Ok(fm)) => {
                fallbacks += 1;
                (f0 - fm) / h
            }
            (Err(_), Err(e)) => return Err(e),
        };
    }
    Ok((grad, evals, fallbacks))
}

/// Draws a constraint-respecting random start by rejection sampling; errors
/// after 200 attempts.
pub fn random_start(problem: &OptimizationProblem, rng: &mut ChaCha8Rng) -> Result<Vec<Complex64>> {
    let m = problem.radii.len();
    let r_max = problem.constraint.r_max;
    for _ in 0..200 {
        let zs: Vec<Complex64> = (0..m)
            .map(|_| match problem.constraint.kind {
                ConstraintKind::DiskCenters => {
                    let r = r_max * rng.gen::<f64>().sqrt();
                    Complex64::from_polar(r, TAU * rng.gen::<f64>())
                }
                ConstraintKind::IntervalCenters => {
                    Complex64::new(-r_max + 2.0 * r_max * rng.gen::<f64>(), 0.0)
                }
            })
            .collect();
        let ok = (0..m).all(|i| {
            (i + 1..m).all(|j| {
                hyp_distance(zs[i], zs[j]).map_or(false, |rho| {
                    rho > problem.radii[i] + problem.radii[j] + 1e-3
                })
            })
        });
        if ok {
            return Ok(zs);
        }
    }
    Err(Error::Infeasible(format!(
        "no disjoint placement of {m} disks found in 200 attempts"
    )))
}

struct BarrierState<'a> {
    problem: &'a OptimizationProblem,
    opts: OptimizeOptions,
    evaluations: usize,
    one_sided: usize,
    trace: Vec<TraceEntry>,
    best_cap: f64,
    iteration: usize,
}

impl<'a> BarrierState<'a> {
    fn cap(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        objective(&self.problem.unpack(x), self.problem)
    }

    /// Gradient of phi = -cap - mu sum(log g): the capacity part numerically,
    /// the barrier part from a numerical constraint Jacobian.
    fn phi_gradient(&mut self, x: &[f64], g: &[f64], mu: f64) -> Result<DVector<f64>> {
        let (gcap, evals, fb) =
            numerical_gradient(&self.problem.unpack(x), self.problem, self.opts.grad_step)?;
        self.evaluations += evals;
        self.one_sided += fb;
        let jac = self.constraint_jacobian(x);
        let mut grad = DVector::from_iterator(gcap.len(), gcap.iter().map(|v| -v));
        for (i, &gi) in g.iter().enumerate() {
            for k in 0..grad.len() {
                grad[k] -= mu * jac[(i, k)] / gi;
            }
        }
        if let Some(f) = self.problem.frozen_coordinate() {
            grad[f] = 0.0;
        }
        Ok(grad)
    }

    fn constraint_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let h = 1e-7;
        let g0 = self.problem.constraints(x);
        let mut jac = DMatrix::zeros(g0.len(), x.len());
        for k in 0..x.len() {
            let mut xp = x.to_vec();
            xp[k] += h;
            let mut xm = x.to_vec();
            xm[k] -= h;
            let gp = self.problem.constraints(&xp);
            let gm = self.problem.constraints(&xm);
            for i in 0..g0.len() {
                jac[(i, k)] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        jac
    }

    fn record(&mut self, x: &[f64], cap: f64) {
        self.best_cap = self.best_cap.max(cap);
        let g = self.problem.constraints(x);
        let violation = g.iter().fold(0.0f64, |acc, &gi| acc.max(-gi - DEFAULT_MARGIN)).max(0.0);
        self.iteration += 1;
        self.trace.push(TraceEntry {
            iteration: self.iteration,
            centers: self.problem.unpack(x),
            cap: self.best_cap,
            violation,
        });
    }
}

/// Local maximization from a feasible start.
pub fn maximize(
    start: &[Complex64],
    problem: &OptimizationProblem,
    opts: &OptimizeOptions,
) -> Result<OptimizationResult> {
    if start.len() != problem.radii.len() {
        return Err(Error::InvalidArgument(format!(
            "start has {} centers for {} radii",
            start.len(),
            problem.radii.len()
        )));
    }
    let mut start = start.to_vec();
    if problem.frozen_coordinate().is_some() {
        // rotate the configuration so center 1 sits on the positive real axis
        let phase = Complex64::from_polar(1.0, -start[0].arg());
        for z in &mut start {
            *z *= phase;
        }
    }
    let mut x = problem.pack(&start);
    {
        let g = problem.constraints(&x);
        if g.iter().any(|&gi| gi <= 0.0) {
            return Err(Error::Infeasible("start violates the constraints".into()));
        }
    }

    let mut state = BarrierState {
        problem,
        opts: *opts,
        evaluations: 0,
        one_sided: 0,
        trace: Vec::new(),
        best_cap: f64::NEG_INFINITY,
        iteration: 0,
    };
    let cap0 = state.cap(&x)?;
    state.record(&x, cap0);

    let dim = problem.dim();
    let mut mu = opts.mu0;
    while mu >= opts.mu_min * 0.999 {
        let mut hinv = DMatrix::<f64>::identity(dim, dim);
        let mut g = problem.constraints(&x);
        let mut grad = state.phi_gradient(&x, &g, mu)?;
        let capx = state.cap(&x)?;
        let mut phi = -capx - mu * g.iter().map(|gi| gi.ln()).sum::<f64>();

        for _ in 0..opts.max_inner_iterations {
            if grad.norm() <= (1e-5f64).max(0.1 * mu) {
                break;
            }
            let p = -&hinv * &grad;
            // strictly feasible backtracking with an Armijo condition on phi
            let mut a = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let xn: Vec<f64> = x.iter().zip(p.iter()).map(|(xi, pi)| xi + a * pi).collect();
                let gn = problem.constraints(&xn);
                let inside = problem.unpack(&xn).iter().all(|z| z.norm() < 0.999);
                if gn.iter().all(|&gi| gi > 0.0) && inside {
                    if let Ok(capn) = state.cap(&xn) {
                        let phin = -capn - mu * gn.iter().map(|gi| gi.ln()).sum::<f64>();
                        if phin <= phi + 1e-4 * a * grad.dot(&p) {
                            accepted = Some((xn, gn, capn, phin));
                            break;
                        }
                    }
                }
                a *= 0.5;
            }
            let Some((xn, gn, capn, phin)) = accepted else { break };
            let progress = phi - phin;
            let gradn = state.phi_gradient(&xn, &gn, mu)?;
            let s = DVector::from_iterator(dim, xn.iter().zip(&x).map(|(a, b)| a - b));
            let y = &gradn - &grad;
            let sy = s.dot(&y);
            if sy > 1e-12 {
                let rho = 1.0 / sy;
                let id = DMatrix::<f64>::identity(dim, dim);
                let left = &id - rho * &s * y.transpose();
                hinv = &left * hinv * left.transpose() + rho * &s * s.transpose();
            }
            x = xn;
            g = gn;
            grad = gradn;
            phi = phin;
            state.record(&x, capn);
            if progress.abs() < 1e-11 {
                break; // stalled at the numerical-gradient noise floor
            }
        }
        mu /= 10.0;
    }

    finish_run(state, problem, opts, x)
}

fn finish_run(
    state: BarrierState<'_>,
    problem: &OptimizationProblem,
    opts: &OptimizeOptions,
    x: Vec<f64>,
) -> Result<OptimizationResult> {
    let mut centers = problem.unpack(&x);
    if problem.frozen_coordinate().is_some() && centers[0].re < 0.0 {
        for z in &mut centers {
            *z = -*z;
        }
    }
    let cap = capacity_of(&centers, problem, opts.n_polish)?;

    let g = problem.constraints(&x);
    let violation = g.iter().fold(0.0f64, |acc, &gi| acc.max(-gi - DEFAULT_MARGIN)).max(0.0);

    // KKT stationarity proxy at the polish fidelity: fit -grad(cap) by a
    // nonnegative combination of the active constraint gradients and measure
    // the residual.
    let polish_problem =
        OptimizationProblem { n_solver: opts.n_polish, ..problem.clone() };
    let (gcap, _, _) = numerical_gradient(&centers, &polish_problem, opts.grad_step)?;
    let mut gradf = DVector::from_vec(gcap);
    if let Some(f) = problem.frozen_coordinate() {
        gradf[f] = 0.0;
    }
    let jac = {
        let st = BarrierState {
            problem,
            opts: *opts,
            evaluations: 0,
            one_sided: 0,
            trace: Vec::new(),
            best_cap: 0.0,
            iteration: 0,
        };
        st.constraint_jacobian(&x)
    };
    let active: Vec<usize> =
        (0..g.len()).filter(|&i| g[i] <= 1e-4).collect();
    let projected = nonneg_ls_residual(&gradf, &jac, &active);

    let converged = projected <= opts.kkt_tol && violation <= 1e-9;
    Ok(OptimizationResult {
        centers,
        cap,
        trace: state.trace,
        evaluations: state.evaluations,
        converged,
        projected_gradient: projected,
        one_sided_fallbacks: state.one_sided,
    })
}

/// Residual of min over lambda >= 0 of ||grad_f + sum lambda_i grad g_i||,
/// solved by least squares with iterative removal of negative multipliers.
fn nonneg_ls_residual(gradf: &DVector<f64>, jac: &DMatrix<f64>, active: &[usize]) -> f64 {
    let mut set: Vec<usize> = active.to_vec();
    loop {
        if set.is_empty() {
            return gradf.norm();
        }
        let cols = DMatrix::from_fn(gradf.len(), set.len(), |r, c| jac[(set[c], r)]);
        let svd = cols.clone().svd(true, true);
        let lambda = match svd.solve(&(-gradf), 1e-12) {
            Ok(l) => l,
            Err(_) => return gradf.norm(),
        };
        if let Some(worst) = (0..set.len())
            .filter(|&i| lambda[i] < -1e-10)
            .min_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
        {
            set.remove(worst);
            continue;
        }
        return (gradf + cols * lambda).norm();
    }
}

/// Runs `k` independent maximizations from seeded random starts; results are
/// sorted by capacity, best first. Distinct local maxima can be closer than
/// any fixed tolerance, so all runs are returned; use [`capacity_levels`] to
/// collapse them.
pub fn multistart(
    problem: &OptimizationProblem,
    k: usize,
    seed: u64,
    opts: &OptimizeOptions,
) -> Result<Vec<OptimizationResult>> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one start".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::with_capacity(k);
    for _ in 0..k {
        let start = random_start(problem, &mut rng)?;
        results.push(maximize(&start, problem, opts)?);
    }
    results.sort_by(|a, b| b.cap.total_cmp(&a.cap));
    Ok(results)
}

/// Collapses sorted run capacities to distinct levels: capacities within
/// `tol` of a level representative are merged into it. Returned descending.
pub fn capacity_levels(results: &[OptimizationResult], tol: f64) -> Vec<f64> {
    let mut caps: Vec<f64> = results.iter().map(|r| r.cap).collect();
    caps.sort_by(|a, b| b.total_cmp(a));
    let mut levels: Vec<f64> = Vec::new();
    for c in caps {
        if levels.last().map_or(true, |l| (l - c).abs() > tol) {
            levels.push(c);
        }
    }
    levels
}

/// Hyperbolic distances between consecutive centers: cyclically in angular
/// order for the disk constraint, left to right for the interval constraint.
pub fn adjacent_distances(centers: &[Complex64], kind: ConstraintKind) -> Result<Vec<f64>> {
    let mut ordered = centers.to_vec();
    match kind {
        ConstraintKind::DiskCenters => {
            ordered.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
            (0..ordered.len())
                .map(|i| hyp_distance(ordered[i], ordered[(i + 1) % ordered.len()]))
                .collect()
        }
        ConstraintKind::IntervalCenters => {
            ordered.sort_by(|a, b| a.re.total_cmp(&b.re));
            ordered.windows(2).map(|w| hyp_distance(w[0], w[1])).collect()
        }
    }
}
