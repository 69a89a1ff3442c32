use super::report::{ArgMax, Check, ResidualReport, Tolerances};
use crate::catalog::constraint_coefficients;
use crate::connection::ConnectionKind;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::poly::{Poly3, MAX_DEGREE};
use crate::surface::{
    config_label, displayed_pde, jet, minimality_residual_from_jet, DerivativeMode, DirectionVector, GraphAxis,
    PolyField,
};
use crate::types::Signature;

pub const PLANARITY_TOL: f64 = 1e-9;

/// Coefficient lattice of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub step: f64,
    /// Number of lattice steps on each side of zero.
    pub half_width: usize,
    pub samples: usize,
}

impl Default for Lattice {
    /// Step 0.2 up to magnitude 2 (21 values per coefficient), 7 samples.
    fn default() -> Self {
        Lattice {
            step: 0.2,
            half_width: 10,
            samples: 7,
        }
    }
}

/// Ansatz field `u = k * other + f(free)` with `f` of the given nonlinear
/// coefficients; `k` solves the linear constraint of `v`.
pub fn ansatz_field(axis: GraphAxis, v: &DirectionVector, nonlinear: &[f64]) -> Result<PolyField> {
    let (p, q, r) = constraint_coefficients(axis, v.vec());
    // the profile runs along the chart variable not fixed by the constraint
    let (slot_free, slot_fixed, k) = if q.abs() > 1e-12 {
        (0usize, 1usize, r / q)
    } else if p.abs() > 1e-12 {
        (1, 0, r / p)
    } else {
        return Err(Error::InvalidDirectionPattern(format!(
            "{:?} gives no constraint for {}",
            v.vec(),
            axis.label()
        )));
    };
    let mono = |slot: usize, d: u8| {
        let mut e = [0u8; 3];
        e[slot] = d;
        e
    };
    let mut terms = vec![(mono(slot_fixed, 1), k), (mono(slot_free, 1), 0.3)];
    for (i, &c) in nonlinear.iter().enumerate() {
        terms.push((mono(slot_free, i as u8 + 2), c));
    }
    Ok(PolyField::new(Poly3::new(terms)?))
}

fn sample_points(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let x = if n == 1 {
                0.0
            } else {
                -0.9 + 1.8 * k as f64 / (n - 1) as f64
            };
            (x, 0.25 - 0.5 * x)
        })
        .collect()
}

/// Brute-force search over a coefficient lattice for fields that satisfy the
/// linear constraint by construction. Only the field with vanishing nonlinear
/// coefficients may have a vanishing minimality residual at every sample.
pub fn planarity_sweep(
    kind: ConnectionKind,
    sig: Signature,
    axis: GraphAxis,
    v: &DirectionVector,
    degree: usize,
    lattice: Lattice,
    exec: Execution,
) -> Result<ResidualReport> {
    if kind != ConnectionKind::SemiSymNonMetric || displayed_pde(axis, kind, sig).is_none() {
        return Err(Error::UnsupportedConfiguration(config_label(axis, kind, sig)));
    }
    if degree > MAX_DEGREE {
        return Err(Error::DegreeTooHigh(degree));
    }
    let slots = degree.saturating_sub(1);
    let width = 2 * lattice.half_width + 1;
    let count = width.pow(slots as u32);
    let samples = sample_points(lattice.samples);

    let results = exec.map_range(count, |idx| -> Result<(bool, f64, (f64, f64))> {
        let mut rest = idx;
        let mut coefs = Vec::with_capacity(slots);
        let mut linear = true;
        for _ in 0..slots {
            let digit = (rest % width) as i64 - lattice.half_width as i64;
            rest /= width;
            linear &= digit == 0;
            coefs.push(digit as f64 * lattice.step);
        }
        let field = ansatz_field(axis, v, &coefs)?;
        let mut worst = ArgMax::default();
        for &(s, t) in &samples {
            let (j, _) = jet(&field, s, t, DerivativeMode::PreferAnalytic)?;
            worst.push(minimality_residual_from_jet(axis, kind, sig, &j)?.abs(), (s, t));
        }
        Ok((linear, worst.value, worst.at.unwrap_or((0.0, 0.0))))
    });

    let mut linear_worst = ArgMax::default();
    let mut nonlinear_min = f64::INFINITY;
    let mut nonlinear_passing = 0usize;
    for r in results {
        let (linear, worst, at) = r?;
        if linear {
            linear_worst.push(worst, at);
        } else {
            nonlinear_min = nonlinear_min.min(worst);
            if worst <= PLANARITY_TOL {
                nonlinear_passing += 1;
            }
        }
    }

    let mut rep = ResidualReport::new(
        format!("planarity/{}", sig.label()),
        config_label(axis, kind, sig),
        Tolerances {
            minimality: PLANARITY_TOL,
            constraint: 0.0,
        },
    );
    rep.max_residual = linear_worst.value;
    rep.argmax = linear_worst.at.map(|(s, t)| [s, t]);
    rep.evaluated = count * samples.len();
    rep.checks
        .push(Check::at_most("linear_field", linear_worst.value, PLANARITY_TOL));
    rep.checks.push(
        Check::at_most("nonlinear_passing", nonlinear_passing as f64, 0.0).with_note(format!(
            "{} lattice fields, smallest nonlinear worst-case residual {nonlinear_min:e}",
            count
        )),
    );
    Ok(rep.finish())
}
