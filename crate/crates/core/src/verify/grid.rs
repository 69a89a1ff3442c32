use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RESOLUTION: usize = 50;
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Tensor grid over `[s0, s1] x [t0, t1]`, pulled in by `margin` times the span
/// on every side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub bbox: [f64; 4],
    pub n: usize,
    pub m: usize,
    pub margin: f64,
}

impl GridSpec {
    pub fn new(bbox: [f64; 4], n: usize, m: usize, margin: f64) -> Result<Self> {
        if n < 2 || m < 2 {
            return Err(Error::InvalidGrid(format!("resolution {n}x{m} is below 2x2")));
        }
        if !(bbox.iter().all(|x| x.is_finite()) && bbox[0] < bbox[1] && bbox[2] < bbox[3]) {
            return Err(Error::InvalidGrid(format!("bad box {bbox:?}")));
        }
        if !(0.0..0.5).contains(&margin) {
            return Err(Error::InvalidGrid(format!("margin {margin} outside [0, 0.5)")));
        }
        Ok(GridSpec { bbox, n, m, margin })
    }

    /// Default 50x50 grid with a 5% margin.
    pub fn for_box(bbox: [f64; 4]) -> Result<Self> {
        Self::new(bbox, DEFAULT_RESOLUTION, DEFAULT_RESOLUTION, DEFAULT_MARGIN)
    }

    pub fn with_resolution(self, n: usize, m: usize) -> Result<Self> {
        Self::new(self.bbox, n, m, self.margin)
    }

    pub fn len(&self) -> usize {
        self.n * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn s(&self, i: usize) -> f64 {
        let [s0, s1, _, _] = self.bbox;
        let span = s1 - s0;
        let lo = s0 + self.margin * span;
        lo + (1.0 - 2.0 * self.margin) * span * i as f64 / (self.n - 1) as f64
    }

    pub fn t(&self, j: usize) -> f64 {
        let [_, _, t0, t1] = self.bbox;
        let span = t1 - t0;
        let lo = t0 + self.margin * span;
        lo + (1.0 - 2.0 * self.margin) * span * j as f64 / (self.m - 1) as f64
    }

    /// Point `k` in lexicographic `(s, t)` order.
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.s(k / self.m), self.t(k % self.m))
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_and_validation() {
        let g = GridSpec::new([0.0, 1.0, -1.0, 1.0], 3, 2, 0.0).unwrap();
        assert_eq!(
            g.points(),
            vec![
                (0.0, -1.0),
                (0.0, 1.0),
                (0.5, -1.0),
                (0.5, 1.0),
                (1.0, -1.0),
                (1.0, 1.0)
            ]
        );
        let g = GridSpec::for_box([0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!((g.s(0) - 0.05).abs() < 1e-15 && (g.t(49) - 0.95).abs() < 1e-15);
        assert!(GridSpec::new([0.0, 1.0, 0.0, 1.0], 1, 5, 0.0).is_err());
        assert!(GridSpec::new([1.0, 0.0, 0.0, 1.0], 5, 5, 0.0).is_err());
    }
}
