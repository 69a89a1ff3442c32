//! Low-degree polynomials in up to three variables with exact partial derivatives.

use rand::Rng;

use crate::error::{Error, Result};
use crate::types::Vec3;

pub const MAX_DEGREE: usize = 4;

/// Sparse polynomial in `(x, y, z)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly3 {
    terms: Vec<([u8; 3], f64)>,
}

impl Poly3 {
    pub fn new(terms: Vec<([u8; 3], f64)>) -> Result<Self> {
        for (e, _) in &terms {
            let deg = e.iter().map(|&k| k as usize).sum::<usize>();
            if deg > MAX_DEGREE {
                return Err(Error::DegreeTooHigh(deg));
            }
        }
        Ok(Poly3 { terms })
    }

    pub fn constant(c: f64) -> Self {
        Poly3 {
            terms: vec![([0, 0, 0], c)],
        }
    }

    pub fn zero() -> Self {
        Poly3 { terms: Vec::new() }
    }

    /// Dense random polynomial of total degree `<= degree` with coefficients in `[-scale, scale]`.
    pub fn random<R: Rng>(rng: &mut R, degree: usize, scale: f64) -> Self {
        let degree = degree.min(MAX_DEGREE);
        let mut terms = Vec::new();
        for i in 0..=degree {
            for j in 0..=(degree - i) {
                for k in 0..=(degree - i - j) {
                    terms.push(([i as u8, j as u8, k as u8], rng.gen_range(-scale..=scale)));
                }
            }
        }
        Poly3 { terms }
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        self.terms.iter().map(|(e, c)| c * monomial(e, p)).sum()
    }

    /// Partial derivative along coordinate `axis` (0, 1 or 2).
    pub fn partial(&self, axis: usize) -> Poly3 {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[axis] > 0)
            .map(|(e, c)| {
                let mut d = *e;
                d[axis] -= 1;
                (d, c * e[axis] as f64)
            })
            .collect();
        Poly3 { terms }
    }

    pub fn gradient(&self, p: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|a| self.partial(a).eval(p))
    }
}

fn monomial(e: &[u8; 3], p: [f64; 3]) -> f64 {
    p[0].powi(e[0] as i32) * p[1].powi(e[1] as i32) * p[2].powi(e[2] as i32)
}

/// Vector field whose three components are polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    comps: [Poly3; 3],
    // Jacobian rows: partials of each component
    jac: [[Poly3; 3]; 3],
}

impl PolyVectorField {
    pub fn new(comps: [Poly3; 3]) -> Self {
        let jac = [0, 1, 2].map(|i| [0, 1, 2].map(|j| comps[i].partial(j)));
        PolyVectorField { comps, jac }
    }

    pub fn constant(v: Vec3) -> Self {
        PolyVectorField::new([Poly3::constant(v.x), Poly3::constant(v.y), Poly3::constant(v.z)])
    }

    pub fn random<R: Rng>(rng: &mut R, degree: usize, scale: f64) -> Self {
        PolyVectorField::new([0, 1, 2].map(|_| Poly3::random(rng, degree, scale)))
    }

    /// Multiplies every component by the scalar polynomial `f`; the product must stay within the degree cap.
    pub fn scaled_by(&self, f: &Poly3) -> Result<Self> {
        Ok(PolyVectorField::new([
            multiply(&self.comps[0], f)?,
            multiply(&self.comps[1], f)?,
            multiply(&self.comps[2], f)?,
        ]))
    }

    pub fn eval(&self, p: Vec3) -> Vec3 {
        let a = p.to_array();
        Vec3::new(self.comps[0].eval(a), self.comps[1].eval(a), self.comps[2].eval(a))
    }

    /// Flat directional derivative `(dY) X` of this field along `dir` at `p`.
    pub fn directional(&self, p: Vec3, dir: Vec3) -> Vec3 {
        let a = p.to_array();
        let d = dir.to_array();
        let row = |i: usize| (0..3).map(|j| self.jac[i][j].eval(a) * d[j]).sum::<f64>();
        Vec3::new(row(0), row(1), row(2))
    }

    pub fn component(&self, i: usize) -> &Poly3 {
        &self.comps[i]
    }
}

fn multiply(a: &Poly3, b: &Poly3) -> Result<Poly3> {
    let mut terms = Vec::with_capacity(a.terms.len() * b.terms.len());
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            terms.push(([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb));
        }
    }
    Poly3::new(terms)
}
