//! Profiles defined through a monotone relation
//! `G(theta) = p * theta + q * ln D(theta) + offset = xi` with
//! `D = da * C(theta) + db * S(theta)`, `(C, S)` circular or hyperbolic and
//! `theta = scale * h + phase`.

use serde::{Deserialize, Serialize};

use super::profile::Triple;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Circular,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitRelation {
    pub trig: Trig,
    pub p: f64,
    pub q: f64,
    pub da: f64,
    pub db: f64,
    pub offset: f64,
    pub scale: f64,
    pub phase: f64,
    /// Monotone bracket in `theta`.
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub increasing: bool,
}

const HYPERBOLIC_CAP: f64 = 8.0;
const SCAN_STEPS: usize = 4000;

impl ImplicitRelation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(trig: Trig, p: f64, q: f64, da: f64, db: f64, offset: f64, scale: f64, phase: f64) -> Result<Self> {
        Self::anchored(trig, p, q, da, db, offset, scale, phase, None)
    }

    /// As [`ImplicitRelation::new`], with the monotone bracket grown around `anchor`.
    #[allow(clippy::too_many_arguments)]
    pub fn anchored(
        trig: Trig,
        p: f64,
        q: f64,
        da: f64,
        db: f64,
        offset: f64,
        scale: f64,
        phase: f64,
        anchor: Option<f64>,
    ) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::InvalidConstant(format!("implicit scale {scale}")));
        }
        let mut rel = ImplicitRelation {
            trig,
            p,
            q,
            da,
            db,
            offset,
            scale,
            phase,
            theta_lo: 0.0,
            theta_hi: 0.0,
            increasing: true,
        };
        let anchor = match anchor {
            Some(th) if rel.d(th) > 0.0 => th,
            Some(_) => return Err(Error::NonMonotoneRelation),
            None => rel.anchor()?,
        };
        let g1 = rel.dg(anchor);
        if !(g1.is_finite() && g1 != 0.0) {
            return Err(Error::NonMonotoneRelation);
        }
        rel.increasing = g1 > 0.0;
        let (lo_cap, hi_cap) = match trig {
            Trig::Circular => (anchor - std::f64::consts::PI, anchor + std::f64::consts::PI),
            Trig::Hyperbolic => (anchor.min(0.0) - HYPERBOLIC_CAP, anchor.max(0.0) + HYPERBOLIC_CAP),
        };
        rel.theta_hi = rel.extend(anchor, hi_cap);
        rel.theta_lo = rel.extend(anchor, lo_cap);
        if rel.theta_hi - rel.theta_lo <= 0.0 {
            return Err(Error::NonMonotoneRelation);
        }
        Ok(rel)
    }

    fn cs(&self, th: f64) -> (f64, f64) {
        match self.trig {
            Trig::Circular => (th.cos(), th.sin()),
            Trig::Hyperbolic => (th.cosh(), th.sinh()),
        }
    }

    pub fn d(&self, th: f64) -> f64 {
        let (c, s) = self.cs(th);
        self.da * c + self.db * s
    }

    fn d1(&self, th: f64) -> f64 {
        let (c, s) = self.cs(th);
        match self.trig {
            Trig::Circular => -self.da * s + self.db * c,
            Trig::Hyperbolic => self.da * s + self.db * c,
        }
    }

    pub fn g(&self, th: f64) -> f64 {
        self.p * th + self.q * self.d(th).ln() + self.offset
    }

    pub fn dg(&self, th: f64) -> f64 {
        self.p + self.q * self.d1(th) / self.d(th)
    }

    pub fn d2g(&self, th: f64) -> f64 {
        let (d, d1) = (self.d(th), self.d1(th));
        let d2 = match self.trig {
            Trig::Circular => -d,
            Trig::Hyperbolic => d,
        };
        self.q * (d2 * d - d1 * d1) / (d * d)
    }

    /// `theta = 0` when admissible, otherwise the maximum of `D` on a coarse scan.
    fn anchor(&self) -> Result<f64> {
        if self.d(0.0) > 0.0 {
            return Ok(0.0);
        }
        let cap = match self.trig {
            Trig::Circular => std::f64::consts::PI,
            Trig::Hyperbolic => HYPERBOLIC_CAP,
        };
        let best = (0..=SCAN_STEPS)
            .map(|i| -cap + 2.0 * cap * i as f64 / SCAN_STEPS as f64)
            .map(|th| (th, self.d(th)))
            .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        if best.1 > 0.0 {
            Ok(best.0)
        } else {
            Err(Error::NonMonotoneRelation)
        }
    }

    fn admissible(&self, th: f64) -> bool {
        let d = self.d(th);
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        let g1 = self.dg(th);
        g1.is_finite() && g1 != 0.0 && (g1 > 0.0) == self.increasing
    }

    /// Walks from `anchor` toward `cap` while admissible and bisects the exit point.
    fn extend(&self, anchor: f64, cap: f64) -> f64 {
        let step = (cap - anchor) / SCAN_STEPS as f64;
        let mut good = anchor;
        for i in 1..=SCAN_STEPS {
            let th = anchor + step * i as f64;
            if !self.admissible(th) {
                let mut bad = th;
                for _ in 0..200 {
                    let mid = 0.5 * (good + bad);
                    if mid == good || mid == bad {
                        break;
                    }
                    if self.admissible(mid) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                // stay a hair inside so that ln D stays finite
                return good - 1e-12 * step.signum() * (1.0 + good.abs());
            }
            good = th;
        }
        good
    }

    /// Range of `xi` covered by the bracket, in increasing order.
    pub fn range(&self) -> (f64, f64) {
        let (a, b) = (self.g(self.theta_lo), self.g(self.theta_hi));
        (a.min(b), a.max(b))
    }

    pub fn in_range(&self, xi: f64) -> bool {
        let (lo, hi) = self.range();
        xi > lo && xi < hi
    }

    /// Solves `G(theta) = xi` by bisection on the monotone bracket.
    pub fn theta_of(&self, xi: f64) -> Result<f64> {
        if !self.in_range(xi) {
            return Err(Error::OutOfBracket(xi));
        }
        let (mut lo, mut hi) = (self.theta_lo, self.theta_hi);
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let below = self.g(mid) < xi;
            if below == self.increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (glo, ghi) = ((self.g(lo) - xi).abs(), (self.g(hi) - xi).abs());
        Ok(if glo <= ghi { lo } else { hi })
    }

    pub fn h_of_theta(&self, th: f64) -> f64 {
        (th - self.phase) / self.scale
    }

    /// `(h, dh/dxi, d2h/dxi2)`.
    pub fn eval(&self, xi: f64) -> Result<Triple> {
        let th = self.theta_of(xi)?;
        let (g1, g2) = (self.dg(th), self.d2g(th));
        Ok((
            self.h_of_theta(th),
            1.0 / (self.scale * g1),
            -g2 / (self.scale * g1 * g1 * g1),
        ))
    }
}
