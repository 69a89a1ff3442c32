//! One-variable profile curves with analytic first and second derivatives.

use serde::{Deserialize, Serialize};

use super::implicit::ImplicitRelation;

/// `(value, first derivative, second derivative)`.
pub type Triple = (f64, f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    /// `amp * ln cos(omega * xi + phase)` on the principal branch of the cosine.
    LogCos { amp: f64, omega: f64, phase: f64 },
    /// `amp * ln |cos(omega * xi + phase)|` on the principal cell.
    LogAbsCos { amp: f64, omega: f64, phase: f64 },
    /// `amp * ln cosh(omega * xi + phase)`.
    LogCosh { amp: f64, omega: f64, phase: f64 },
    /// `amp * atan(k * sqrt(exp(r * xi) - m))`.
    ArctanSqrtExp { amp: f64, k: f64, r: f64, m: f64 },
    /// `amp * asinh(q0 * exp(r * xi))`.
    AsinhExp { amp: f64, q0: f64, r: f64 },
    /// `amp * ln(1 + k * exp(r * xi))`.
    LogOnePlusExp { amp: f64, k: f64, r: f64 },
    /// `h(xi)` defined by an implicit relation `G(theta(h)) = xi`.
    Implicit(ImplicitRelation),
}

/// Margin kept from the walls of the log/sqrt domains.
const WALL: f64 = 1e-9;

impl Profile {
    pub fn in_domain(&self, xi: f64) -> bool {
        match self {
            Profile::LogCos { omega, phase, .. } | Profile::LogAbsCos { omega, phase, .. } => {
                (omega * xi + phase).abs() < std::f64::consts::FRAC_PI_2 - WALL
            }
            Profile::LogCosh { .. } | Profile::AsinhExp { .. } => xi.is_finite(),
            Profile::ArctanSqrtExp { r, m, .. } => (r * xi).exp() - m > WALL,
            Profile::LogOnePlusExp { k, r, .. } => 1.0 + k * (r * xi).exp() > WALL,
            Profile::Implicit(rel) => rel.in_range(xi),
        }
    }

    /// Value and derivatives; `None` outside the domain.
    pub fn eval(&self, xi: f64) -> Option<Triple> {
        if !self.in_domain(xi) {
            return None;
        }
        Some(match *self {
            Profile::LogCos { amp, omega, phase } | Profile::LogAbsCos { amp, omega, phase } => {
                let th = omega * xi + phase;
                let (c, tn) = (th.cos(), th.tan());
                (amp * c.abs().ln(), -amp * omega * tn, -amp * omega * omega / (c * c))
            }
            Profile::LogCosh { amp, omega, phase } => {
                let th = omega * xi + phase;
                let t = th.tanh();
                (amp * ln_cosh(th), amp * omega * t, amp * omega * omega * (1.0 - t * t))
            }
            Profile::ArctanSqrtExp { amp, k, r, m } => {
                let e = (r * xi).exp();
                let s = (e - m).sqrt();
                let g = k * s;
                let g1 = k * r * e / (2.0 * s);
                let g2 = k * r * r * e * (0.5 * e - m) / (2.0 * s * s * s);
                let d = 1.0 + g * g;
                (
                    amp * g.atan(),
                    amp * g1 / d,
                    amp * (g2 * d - 2.0 * g * g1 * g1) / (d * d),
                )
            }
            Profile::AsinhExp { amp, q0, r } => {
                let q = q0 * (r * xi).exp();
                let d = 1.0 + q * q;
                (
                    amp * q.asinh(),
                    amp * r * q / d.sqrt(),
                    amp * r * r * q / (d * d.sqrt()),
                )
            }
            Profile::LogOnePlusExp { amp, k, r } => {
                let q = k * (r * xi).exp();
                let d = 1.0 + q;
                (amp * d.ln(), amp * r * q / d, amp * r * r * q / (d * d))
            }
            Profile::Implicit(ref rel) => rel.eval(xi).ok()?,
        })
    }
}

/// `ln cosh x` without overflow for large `|x|`.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}
