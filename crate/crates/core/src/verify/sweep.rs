use std::time::Instant;

use super::grid::GridSpec;
use super::report::{ArgMax, Check, ResidualReport, SignLedger, Tolerances};
use crate::catalog::{PrintedSign, SolutionFamily};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::surface::{
    self, config_label, constraint_residual_from_jet, minimality_residual_from_jet, normal_from_jet, DerivativeMode,
    Jet, DEGENERATE_RADICAND,
};
use crate::types::{span_is_spacelike, Signature};

pub const ANALYTIC_TOL: f64 = 1e-6;
pub const FINITE_DIFFERENCE_TOL: f64 = 1e-4;
pub const CONSTRAINT_TOL: f64 = 1e-10;
pub const MAX_SKIPPED_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub exec: Execution,
    pub mode: DerivativeMode,
    /// Overrides the mode's default minimality tolerance.
    pub tol: Option<f64>,
    pub constraint_tol: f64,
    /// Records wall-clock time; off by default so reports are reproducible.
    pub timing: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            exec: Execution::default(),
            mode: DerivativeMode::PreferAnalytic,
            tol: None,
            constraint_tol: CONSTRAINT_TOL,
            timing: false,
        }
    }
}

impl SweepOptions {
    pub fn minimality_tol(&self) -> f64 {
        self.tol.unwrap_or(match self.mode {
            DerivativeMode::PreferAnalytic => ANALYTIC_TOL,
            DerivativeMode::FiniteDifference => FINITE_DIFFERENCE_TOL,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct PointEval {
    minimality: f64,
    scaled: f64,
    constraint: Option<f64>,
    radicand: f64,
    span_spacelike: Option<bool>,
}

fn eval_point(fam: &SolutionFamily, mode: DerivativeMode, s: f64, t: f64) -> Option<PointEval> {
    if !fam.domain(s, t) {
        return None;
    }
    let j: Jet = match mode {
        DerivativeMode::PreferAnalytic => fam.jet(s, t).ok()?,
        DerivativeMode::FiniteDifference => surface::jet(fam, s, t, mode).ok()?.0,
    };
    let r = minimality_residual_from_jet(fam.axis, fam.kind, fam.sig, &j).ok()?;
    let (_, radicand) = fam.axis.normal_parts(fam.sig, j.us, j.ut);
    let constraint = fam.v.map(|v| constraint_residual_from_jet(fam.axis, v.vec(), &j).abs());
    let span_spacelike = match (fam.sig, fam.v) {
        (Signature::Lorentzian, Some(v)) => Some(
            normal_from_jet(fam.axis, fam.sig, &j)
                .ok()
                .and_then(|n| span_is_spacelike(n, v.vec()).ok())
                .unwrap_or(false),
        ),
        _ => None,
    };
    Some(PointEval {
        minimality: r.abs(),
        scaled: r.abs() / (1.0 + j.derivative_magnitude()),
        constraint,
        radicand,
        span_spacelike,
    })
}

fn printed_label(p: PrintedSign) -> &'static str {
    match p {
        PrintedSign::Plus => "plus",
        PrintedSign::PlusMinus => "plus-minus",
        PrintedSign::NotApplicable => "not-applicable",
    }
}

/// Minimality and constraint residuals of a family over the in-domain grid points.
pub fn sweep_residual(fam: &SolutionFamily, grid: &GridSpec, opts: &SweepOptions) -> Result<ResidualReport> {
    let start = Instant::now();
    let pts = grid.points();
    let evals = opts.exec.map(&pts, |&(s, t)| eval_point(fam, opts.mode, s, t));

    let (mut raw, mut scaled, mut cons) = (ArgMax::default(), ArgMax::default(), ArgMax::default());
    let (mut evaluated, mut degenerate, mut span_bad) = (0usize, 0usize, 0usize);
    let mut min_radicand = f64::INFINITY;
    for (&p, e) in pts.iter().zip(&evals) {
        let Some(e) = e else { continue };
        evaluated += 1;
        raw.push(e.minimality, p);
        scaled.push(e.scaled, p);
        if let Some(c) = e.constraint {
            cons.push(c, p);
        }
        if fam.sig == Signature::Lorentzian {
            min_radicand = min_radicand.min(e.radicand);
            if e.radicand.is_nan() || e.radicand <= DEGENERATE_RADICAND {
                degenerate += 1;
            }
        }
        if e.span_spacelike == Some(false) {
            span_bad += 1;
        }
    }
    if evaluated == 0 {
        return Err(Error::EmptyGrid);
    }
    let skipped = pts.len() - evaluated;
    let tol = opts.minimality_tol();

    let mut rep = ResidualReport::new(
        fam.subject(),
        config_label(fam.axis, fam.kind, fam.sig),
        Tolerances {
            minimality: tol,
            constraint: opts.constraint_tol,
        },
    );
    rep.grid = Some(*grid);
    rep.max_residual = raw.value;
    rep.argmax = raw.at.map(|(s, t)| [s, t]);
    rep.sigma_branch = Some(fam.sigma);
    rep.paper_sign_agrees = fam.meta.paper_sign_agrees;
    rep.sign_ledger = Some(SignLedger {
        printed_sign: printed_label(fam.meta.printed_sign).to_string(),
        printed_form_agrees: fam.meta.printed_form_agrees,
        note: fam.meta.note.clone(),
    });
    rep.evaluated = evaluated;
    rep.skipped = skipped;

    rep.checks.push(Check::at_most("minimality", raw.value, tol));
    rep.checks.push(
        Check::at_most("minimality_scaled", scaled.value, tol)
            .advisory()
            .with_note("residual / (1 + derivative magnitude)"),
    );
    if fam.v.is_some() {
        rep.checks
            .push(Check::at_most("constraint", cons.value, opts.constraint_tol));
    }
    rep.checks.push(Check::at_most(
        "skipped_fraction",
        skipped as f64 / pts.len() as f64,
        MAX_SKIPPED_FRACTION,
    ));
    if fam.sig == Signature::Lorentzian {
        rep.checks.push(
            Check::at_most("timelike_radicand", degenerate as f64, 0.0)
                .advisory()
                .with_note(format!(
                    "points with radicand <= {DEGENERATE_RADICAND:e}; min radicand {min_radicand:e}"
                )),
        );
        if fam.v.is_some() {
            rep.checks.push(
                Check::at_most("span_spacelike", span_bad as f64, 0.0)
                    .advisory()
                    .with_note("points where n and v fail to span a spacelike plane"),
            );
        }
    }
    if !fam.meta.paper_sign_agrees {
        rep.warnings.push(format!(
            "printed sign disagrees with resolved branch sigma = {}",
            fam.sigma
        ));
    }
    if !fam.meta.printed_form_agrees {
        rep.warnings
            .push(format!("printed closed form corrected: {}", fam.meta.note));
    }
    if opts.timing {
        rep.duration_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_family, TheoremId};

    #[test]
    fn thm4_case1_passes() {
        let fam = default_family(TheoremId::Thm4, 1).unwrap();
        let rep = sweep_residual(&fam, &GridSpec::for_box(fam.bbox).unwrap(), &SweepOptions::default()).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
        assert!(rep.max_residual <= 1e-6);
        assert!(rep.paper_sign_agrees);
    }

    #[test]
    fn empty_grid() {
        let fam = default_family(TheoremId::Thm1, 1).unwrap();
        let fam = fam.with_box([10.0, 11.0, 10.0, 11.0]).unwrap();
        let grid = GridSpec::for_box(fam.bbox).unwrap();
        assert_eq!(
            sweep_residual(&fam, &grid, &SweepOptions::default()),
            Err(Error::EmptyGrid)
        );
    }

    #[test]
    fn parallel_equals_sequential() {
        let fam = default_family(TheoremId::Thm2, 5).unwrap();
        let grid = GridSpec::for_box(fam.bbox).unwrap();
        let seq = SweepOptions {
            exec: Execution::Sequential,
            ..SweepOptions::default()
        };
        let par = SweepOptions {
            exec: Execution::Parallel,
            ..SweepOptions::default()
        };
        assert_eq!(sweep_residual(&fam, &grid, &seq), sweep_residual(&fam, &grid, &par));
    }
}
