//! Closed-form reference capacities and the special functions behind them:
//! the complete elliptic integral K, the Grotzsch modulus mu, and exact
//! disk/annulus/segment capacities. This is the oracle layer every solver
//! result is validated against.

use std::f64::consts::PI;

use crate::{Error, Result};

/// A capacity value obtained from a closed form, tagged with its source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactCapacity {
    pub value: f64,
    pub source: &'static str,
}

/// Complete elliptic integral of the first kind in the modulus convention,
/// K(r) = integral of 1/sqrt((1-t^2)(1-r^2 t^2)) over [0,1].
///
/// Computed as pi / (2 AGM(1, sqrt(1-r^2))). The hypergeometric series
/// K(r) = (pi/2) 2F1(1/2, 1/2; 1; r^2) identifies the same function but is
/// not used computationally; the AGM iteration converges quadratically.
pub fn ellip_k(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("elliptic modulus must be in [0,1), got {r}")));
    }
    Ok(PI / (2.0 * agm(1.0, (1.0 - r * r).sqrt())))
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..40 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= 1e-17 * an {
            return an;
        }
        a = an;
        b = bn;
    }
    0.5 * (a + b)
}

/// The decreasing homeomorphism mu(r) = (pi/2) K(r') / K(r) with
/// r' = sqrt(1 - r^2), the modulus of the Grotzsch ring.
///
/// For r > 1/sqrt(2) the identity mu(r) mu(r') = pi^2/4 is used so that the
/// directly evaluated branch always has r <= r', avoiding cancellation in
/// 1 - r^2 near r = 1.
pub fn mu(r: f64) -> Result<f64> {
    if !(0.0 < r && r < 1.0) {
        return Err(Error::Domain(format!("mu argument must be in (0,1), got {r}")));
    }
    if r < 1e-7 {
        // below this, 1 - r^2 rounds to 1; the classical asymptotic
        // mu(r) ~ log(4/r) is accurate to O(r^2 log(1/r)) < 1e-12 here
        return Ok((4.0 / r).ln());
    }
    if r * r <= 0.5 {
        let rp = (1.0 - r * r).sqrt();
        Ok(PI / 2.0 * ellip_k(rp)? / ellip_k(r)?)
    } else {
        let rp = (1.0 - r * r).sqrt();
        Ok(PI * PI / (4.0 * mu(rp)?))
    }
}

/// Capacity of the Grotzsch condenser (B^2, [0, r]): 2 pi / mu(r).
pub fn grotzsch_capacity(r: f64) -> Result<f64> {
    Ok(2.0 * PI / mu(r)?)
}

/// Capacity of the annulus condenser with radii 0 < a < b: 2 pi / log(b/a).
pub fn annulus_capacity(a: f64, b: f64) -> Result<f64> {
    if a <= 0.0 || a >= b {
        return Err(Error::Domain(format!("annulus radii need 0 < a < b, got a = {a}, b = {b}")));
    }
    Ok(2.0 * PI / (b / a).ln())
}

/// Capacity of a hyperbolic disk of radius R at any center (Mobius invariance):
/// 2 pi / log(1 / th(R/2)).
pub fn hyp_disk_capacity(r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("hyperbolic radius must be positive, got {r}")));
    }
    Ok(2.0 * PI / (1.0 / (r / 2.0).tanh()).ln())
}

/// Capacity of a single hyperbolic segment of length l: 2 pi / mu(th(l/2)).
pub fn segment_capacity(l: f64) -> Result<f64> {
    if l <= 0.0 {
        return Err(Error::Domain(format!("segment length must be positive, got {l}")));
    }
    Ok(2.0 * PI / mu((l / 2.0).tanh())?)
}

/// Capacity of five radial segments of length l merged at the origin:
/// 10 pi / mu(th^5(l/2)).
pub fn star_capacity_5(l: f64) -> Result<f64> {
    if l <= 0.0 {
        return Err(Error::Domain(format!("segment length must be positive, got {l}")));
    }
    Ok(10.0 * PI / mu((l / 2.0).tanh().powi(5))?)
}

/// Hyperbolic radius of the single centered disk with the given capacity,
/// R = 2 arth(e^{-2 pi / c}); inverse of [`hyp_disk_capacity`].
pub fn condense_radius(c: f64) -> Result<f64> {
    if c <= 0.0 {
        return Err(Error::Domain(format!("capacity must be positive, got {c}")));
    }
    Ok(2.0 * (-2.0 * PI / c).exp().atanh())
}

impl ExactCapacity {
    pub fn hyp_disk(r: f64) -> Result<Self> {
        Ok(Self { value: hyp_disk_capacity(r)?, source: "hyperbolic disk closed form" })
    }

    pub fn annulus(a: f64, b: f64) -> Result<Self> {
        Ok(Self { value: annulus_capacity(a, b)?, source: "annulus closed form" })
    }

    pub fn segment(l: f64) -> Result<Self> {
        Ok(Self { value: segment_capacity(l)?, source: "hyperbolic segment closed form" })
    }
}
