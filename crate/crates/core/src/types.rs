//! Signature-aware vector algebra on three-space.
//!
//! The ambient metric is `diag(1, 1, epsilon)`: Euclidean for `epsilon = +1`,
//! Lorentz-Minkowski for `epsilon = -1` with `z` as the time coordinate.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on `<x,x> / |x|^2` below which a vector counts as null.
pub const NULL_TOLERANCE: f64 = 1e-12;

/// Ambient metric selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Euclidean,
    Lorentzian,
}

impl Signature {
    /// Weight of the `z * z` term in the metric.
    pub fn epsilon(self) -> f64 {
        match self {
            Signature::Euclidean => 1.0,
            Signature::Lorentzian => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Signature::Euclidean => "euclidean",
            Signature::Lorentzian => "lorentzian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const E1: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const E2: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_zero(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Euclidean squared length regardless of signature.
    pub fn norm2(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn max_abs_diff(self, o: Vec3) -> f64 {
        (self.x - o.x).abs().max((self.y - o.y).abs()).max((self.z - o.z).abs())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self * v.x, self * v.y, self * v.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        k * self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    Spacelike,
    Timelike,
    Null,
    Zero,
}

/// `x . y` with the `z` term weighted by the signature.
pub fn inner(sig: Signature, x: Vec3, y: Vec3) -> f64 {
    x.x * y.x + x.y * y.y + sig.epsilon() * x.z * y.z
}

pub fn causal_character(sig: Signature, x: Vec3) -> CausalClass {
    if x.is_zero() {
        return CausalClass::Zero;
    }
    let q = inner(sig, x, x);
    if q.abs() <= NULL_TOLERANCE * x.norm2() {
        CausalClass::Null
    } else if q > 0.0 {
        CausalClass::Spacelike
    } else {
        CausalClass::Timelike
    }
}

/// Rescales `x` so that `|<x,x>| = 1`. Input that is already unit up to the
/// rounding of `<x,x>` is returned unchanged, which keeps the map idempotent
/// for near-null vectors.
pub fn normalize(sig: Signature, x: Vec3) -> Result<Vec3> {
    match causal_character(sig, x) {
        CausalClass::Null | CausalClass::Zero => Err(Error::NullOrZeroVector),
        _ => {
            let q = self_product_accurate(sig, x).abs();
            if (q - 1.0).abs() <= 16.0 * f64::EPSILON * x.norm2().max(1.0) {
                Ok(x)
            } else {
                Ok((1.0 / q.sqrt()) * x)
            }
        }
    }
}

/// `<x,x>` with error-free products and compensated summation.
fn self_product_accurate(sig: Signature, x: Vec3) -> f64 {
    let terms = [(x.x, x.x), (x.y, x.y), (sig.epsilon() * x.z, x.z)];
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for (a, b) in terms {
        let p = a * b;
        let perr = a.mul_add(b, -p);
        let t = sum + p;
        let serr = if sum.abs() >= p.abs() {
            (sum - t) + p
        } else {
            (p - t) + sum
        };
        sum = t;
        comp += perr + serr;
    }
    sum + comp
}

/// Future pointing timelike vectors have positive time component.
pub fn is_future_pointing(x: Vec3) -> bool {
    x.z > 0.0
}

/// Lorentz angle between two timelike vectors of equal time orientation
/// (hyperbolic branch) or two spacelike vectors spanning a spacelike plane
/// (circular branch, result in `[0, pi/2]`).
pub fn lorentz_angle(sig: Signature, x: Vec3, y: Vec3) -> Result<f64> {
    if sig != Signature::Lorentzian {
        return Err(Error::InvalidCausalPair);
    }
    let cx = causal_character(sig, x);
    let cy = causal_character(sig, y);
    let scale = inner(sig, x, x).abs().sqrt() * inner(sig, y, y).abs().sqrt();
    let ratio = inner(sig, x, y).abs() / scale;
    match (cx, cy) {
        (CausalClass::Timelike, CausalClass::Timelike) if is_future_pointing(x) == is_future_pointing(y) => {
            // reverse Cauchy-Schwarz guarantees ratio >= 1 up to rounding
            Ok(ratio.max(1.0).acosh())
        }
        (CausalClass::Spacelike, CausalClass::Spacelike) => {
            if span_is_spacelike(x, y)? {
                Ok(ratio.min(1.0).acos())
            } else {
                Err(Error::InvalidCausalPair)
            }
        }
        _ => Err(Error::InvalidCausalPair),
    }
}

/// True iff the Lorentzian Gram matrix of `x, y` is positive definite.
pub fn span_is_spacelike(x: Vec3, y: Vec3) -> Result<bool> {
    let c = x.cross(y);
    if c.norm2() <= 1e-24 * x.norm2().max(1e-300) * y.norm2().max(1e-300) {
        return Err(Error::DegenerateSpan);
    }
    let sig = Signature::Lorentzian;
    let gxx = inner(sig, x, x);
    let gyy = inner(sig, y, y);
    let gxy = inner(sig, x, y);
    Ok(gxx > 0.0 && gxx * gyy - gxy * gxy > 0.0)
}
