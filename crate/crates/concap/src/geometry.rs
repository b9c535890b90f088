//! Hyperbolic geometry primitives on the Poincare disk: distances, disk
//! conversions, overlap tests, areas/perimeters and constraint geometry.

use num_complex::Complex64;

use crate::{Error, Result};

/// Geodesic disk in the unit disk, given by hyperbolic center and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicDisk {
    pub center: Complex64,
    /// Hyperbolic radius, > 0.
    pub radius: f64,
}

/// Circle in the plane; the discretization-level representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanCircle {
    pub center: Complex64,
    pub radius: f64,
}

/// Ordered list of pairwise disjoint hyperbolic disks inside the unit disk.
#[derive(Debug, Clone)]
pub struct Constellation {
    disks: Vec<HyperbolicDisk>,
}

/// Which set the disk centers are constrained to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Centers inside the closed Euclidean disk |z| <= R.
    DiskCenters,
    /// Centers on the real segment [-R, R].
    IntervalCenters,
}

/// Center-containment constraint with radius `R` in (0,1).
///
/// `whole_disk` switches to the stricter variant where the whole Euclidean
/// realization of each disk must fit inside |z| <= R; the default constrains
/// only the centers.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintSpec {
    pub kind: ConstraintKind,
    pub r_max: f64,
    pub whole_disk: bool,
}

impl ConstraintSpec {
    pub fn new(kind: ConstraintKind, r_max: f64) -> Result<Self> {
        if !(0.0 < r_max && r_max < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "constraint radius must be in (0,1), got {r_max}"
            )));
        }
        Ok(Self { kind, r_max, whole_disk: false })
    }
}

impl HyperbolicDisk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if center.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "hyperbolic disk center must lie in the unit disk, got |c| = {}",
                center.norm()
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("hyperbolic radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }
}

impl Constellation {
    /// Builds a constellation, requiring strict pairwise disjointness.
    pub fn new(disks: Vec<HyperbolicDisk>) -> Result<Self> {
        if disks.is_empty() {
            return Err(Error::InvalidArgument("constellation needs at least one disk".into()));
        }
        for i in 0..disks.len() {
            for j in i + 1..disks.len() {
                if !disks_disjoint(&disks[i], &disks[j]) {
                    return Err(Error::Overlap(format!("disks {i} and {j} overlap or touch")));
                }
            }
        }
        Ok(Self { disks })
    }

    pub fn disks(&self) -> &[HyperbolicDisk] {
        &self.disks
    }

    /// Number of disks.
    pub fn m(&self) -> usize {
        self.disks.len()
    }

    /// Euclidean realizations of all disks.
    pub fn euclidean_circles(&self) -> Vec<EuclideanCircle> {
        self.disks.iter().map(hyp_to_euclidean).collect()
    }
}

/// Hyperbolic distance between two points of the unit disk,
/// rho = 2 arsh( |a-b| / sqrt((1-|a|^2)(1-|b|^2)) ).
pub fn hyp_distance(a: Complex64, b: Complex64) -> Result<f64> {
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if na >= 1.0 || nb >= 1.0 {
        return Err(Error::Domain("points must lie strictly inside the unit disk".into()));
    }
    Ok(2.0 * ((a - b).norm() / ((1.0 - na) * (1.0 - nb)).sqrt()).asinh())
}

/// Euclidean realization of a hyperbolic disk.
///
/// With t = th(radius/2) and x the hyperbolic center, the Euclidean center and
/// radius are y = x(1-t^2)/(1-|x|^2 t^2) and r = (1-|x|^2)t/(1-|x|^2 t^2).
pub fn hyp_to_euclidean(d: &HyperbolicDisk) -> EuclideanCircle {
    let t = (d.radius / 2.0).tanh();
    let xx = d.center.norm_sqr();
    let den = 1.0 - xx * t * t;
    EuclideanCircle {
        center: d.center * (1.0 - t * t) / den,
        radius: (1.0 - xx) * t / den,
    }
}

/// Hyperbolic disk whose Euclidean realization is the given circle.
///
/// The circle meets the diameter through its center at signed distances
/// |y| -+ r from the origin; converting both to hyperbolic coordinates along
/// that geodesic gives the hyperbolic center and radius in closed form.
pub fn euclidean_to_hyp(c: &EuclideanCircle) -> Result<HyperbolicDisk> {
    if c.radius <= 0.0 {
        return Err(Error::Domain(format!("circle radius must be positive, got {}", c.radius)));
    }
    let d = c.center.norm();
    if d + c.radius >= 1.0 {
        return Err(Error::Domain(
            "circle must lie strictly inside the unit circle".into(),
        ));
    }
    let near = d - c.radius;
    let far = d + c.radius;
    // signed hyperbolic coordinates of the two diameter endpoints
    let lam_near = 2.0 * near.atanh();
    let lam_far = 2.0 * far.atanh();
    let center_coord = ((lam_near + lam_far) / 4.0).tanh();
    let radius = (lam_far - lam_near) / 2.0;
    let dir = if d == 0.0 { Complex64::new(1.0, 0.0) } else { c.center / d };
    HyperbolicDisk::new(dir * center_coord, radius)
}

/// Hyperbolic area of a disk of hyperbolic radius r: 4 pi sh^2(r/2).
pub fn hyp_area(r: f64) -> f64 {
    let s = (r / 2.0).sinh();
    4.0 * std::f64::consts::PI * s * s
}

/// Hyperbolic perimeter of a disk of hyperbolic radius r: 2 pi sh(r).
pub fn hyp_perimeter(r: f64) -> f64 {
    2.0 * std::f64::consts::PI * r.sinh()
}

/// Smallest half-angle theta such that disks of hyperbolic radius r centered at
/// R e^{+-i theta} are disjoint: theta_min = arcsin((1-R^2) sh(r) / (2R)).
/// At theta = theta_min the two disks are tangent.
pub fn min_separation_angle(r_center: f64, r: f64) -> Result<f64> {
    let arg = (1.0 - r_center * r_center) * r.sinh() / (2.0 * r_center);
    if !(0.0..=1.0).contains(&arg) {
        return Err(Error::Infeasible(format!(
            "disks of radius {r} cannot be separated on |z| = {r_center} (arcsin argument {arg})"
        )));
    }
    Ok(arg.asin())
}

/// Strict geodesic-ball disjointness; tangent disks count as overlapping.
pub fn disks_disjoint(d1: &HyperbolicDisk, d2: &HyperbolicDisk) -> bool {
    match hyp_distance(d1.center, d2.center) {
        Ok(rho) => rho > d1.radius + d2.radius,
        Err(_) => false,
    }
}

/// Closed containment check of the constellation's centers per the spec kind.
/// A one-ulp-scale slack keeps centers placed exactly on the boundary (e.g.
/// via polar construction) inside the closed set despite rounding.
pub fn satisfies_constraint(c: &Constellation, spec: &ConstraintSpec) -> bool {
    let bound = spec.r_max + 1e-12;
    c.disks().iter().all(|d| {
        let within = if spec.whole_disk {
            let e = hyp_to_euclidean(d);
            e.center.norm() + e.radius <= bound
        } else {
            d.center.norm() <= bound
        };
        match spec.kind {
            ConstraintKind::DiskCenters => within,
            ConstraintKind::IntervalCenters => within && d.center.im == 0.0,
        }
    })
}
