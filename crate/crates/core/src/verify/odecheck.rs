use super::grid::GridSpec;
use super::report::{Check, ResidualReport, Tolerances};
use super::sweep::{sweep_residual, SweepOptions};
use crate::catalog::profile::Profile;
use crate::catalog::{default_family, subject_id, SolutionFamily, Term, TheoremId};
use crate::error::{Error, Result};
use crate::ode::{
    closed_form_for, compare, first_integral_residual, observed_order, ode_for_family, rk4_integrate, EquationId,
    ReducedOde,
};

pub const ROUND_TRIP_TOL: f64 = 1e-6;
pub const ROUND_TRIP_STEP: f64 = 1e-3;
pub const ORDER_STEP: f64 = 0.05;
pub const FIRST_INTEGRAL_TOL: f64 = 1e-8;
pub const IMPLICIT_PDE_TOL: f64 = 1e-5;

/// A reduced equation checked against the closed form of a catalog case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripCase {
    pub id: EquationId,
    pub theorem: TheoremId,
    pub case: u8,
    pub xi0: f64,
}

impl RoundTripCase {
    pub fn subject(&self) -> String {
        format!("ode/{}/{}", self.id, subject_id(self.theorem, self.case))
    }
}

/// Every reduced equation paired with a closed form.
pub fn round_trip_cases() -> Vec<RoundTripCase> {
    use EquationId::*;
    use TheoremId::*;
    let c = |id, theorem, case, xi0| RoundTripCase { id, theorem, case, xi0 };
    vec![
        c(E8, Thm1, 1, -0.5),
        c(E8, Thm1, 2, -0.5),
        c(E10, Thm1, 3, -0.5),
        c(E11, Thm1, 3, -0.5),
        c(E15, Thm2, 2, -0.5),
        c(E16, Thm2, 3, 0.0),
        c(E19, Thm2, 4, -0.5),
        c(E21, Thm2, 5, -0.2),
        c(E22, Thm2, 5, -0.2),
        c(E31, Thm4, 1, -0.5),
        c(E31, Thm4, 2, -0.5),
        c(E33, Thm4, 3, -0.5),
        c(E34, Thm4, 3, -0.5),
        c(E37, Thm5, 2, -0.5),
        c(E38, Thm5, 3, -0.5),
        c(E39, Thm5, 3, -0.5),
        c(E40, Thm5, 4, -0.5),
        c(E41, Thm5, 4, -0.5),
        c(E40, Thm5, 5, -0.5),
        c(E42, Thm5, 5, -0.5),
        c(E40, Thm5, 6, -0.5),
        c(E43, Thm5, 6, -0.5),
        c(E44, Thm5, 6, -0.5),
    ]
}

fn curved_term(fam: &SolutionFamily) -> Result<&Term> {
    fam.shape
        .terms
        .first()
        .ok_or_else(|| Error::UnsupportedConfiguration(format!("{} has no curved term", fam.subject())))
}

/// `(f, f')` of the family's curved term with `f = linear * xi + sign * P(xi)`.
fn term_state(fam: &SolutionFamily, term: &Term, xi: f64) -> Result<(f64, f64)> {
    let (p, p1, _) = term.profile.eval(xi).ok_or(Error::OutOfBracket(xi))?;
    let sg = if term.signed { fam.sigma } else { 1.0 };
    Ok((term.linear * xi + sg * p, term.linear + sg * p1))
}

/// The case's equation with the family's parameters, and the family.
pub fn case_equation(rc: &RoundTripCase) -> Result<(ReducedOde, SolutionFamily)> {
    let fam = default_family(rc.theorem, rc.case)?;
    let base = ode_for_family(&fam)
        .ok_or_else(|| Error::UnsupportedConfiguration(format!("{} has no reduced equation", fam.subject())))?;
    let mut ode = ReducedOde::new(rc.id, base.a, base.b, base.c)?;
    if rc.id.is_first_order() {
        match &curved_term(&fam)?.profile {
            Profile::Implicit(rel) => ode = ode.with_lambda(rel.phase),
            _ => {
                return Err(Error::UnsupportedConfiguration(format!(
                    "{} is not implicit",
                    fam.subject()
                )))
            }
        }
    }
    Ok((ode, fam))
}

/// RK4 from the family's state at `xi0` over a unit distance, compared with
/// the fitted closed form and with the family itself; plus the observed order.
pub fn ode_round_trip(rc: &RoundTripCase) -> Result<ResidualReport> {
    let (ode, fam) = case_equation(rc)?;
    let term = curved_term(&fam)?;
    let (u0, w0) = term_state(&fam, term, rc.xi0)?;
    let init = (rc.xi0, u0, w0);
    let x_end = rc.xi0 + 1.0;
    let traj = rk4_integrate(&ode, init, x_end, ROUND_TRIP_STEP).map_err(|f| f.error)?;
    let cf = closed_form_for(&ode, init)?
        .ok_or_else(|| Error::InvalidOdeParameters(format!("{}: no closed form through the family state", rc.id)))?;
    let rt = compare(&traj, &cf);
    let end = traj.last();
    let family_err = (term_state(&fam, term, end.t)?.0 - end.u).abs();
    let (order, errs) = observed_order(&ode, init, x_end, ORDER_STEP)?;

    let mut rep = ResidualReport::new(
        rc.subject(),
        format!("{} a={} b={} c={} lambda={}", rc.id, ode.a, ode.b, ode.c, ode.lambda),
        Tolerances {
            minimality: ROUND_TRIP_TOL,
            constraint: 0.0,
        },
    );
    rep.max_residual = rt.endpoint_error;
    rep.argmax = Some([end.t, end.u]);
    rep.sigma_branch = Some(fam.sigma);
    rep.paper_sign_agrees = fam.meta.paper_sign_agrees;
    rep.evaluated = traj.samples.len();
    rep.checks
        .push(Check::at_most("endpoint_error", rt.endpoint_error, ROUND_TRIP_TOL));
    rep.checks
        .push(Check::at_most("family_endpoint_error", family_err, ROUND_TRIP_TOL));
    rep.checks.push(
        Check::at_most("convergence_order", (order - 4.0).abs(), 0.5).with_note(format!(
            "order {order:.4}; endpoint errors {errs:?} at steps 0.05, 0.025, 0.0125"
        )),
    );
    Ok(rep.finish())
}

/// Implicit families: the first-integral relation along 100 points of the
/// evaluator's range, and the family's PDE residual on the default grid.
pub fn implicit_check(theorem: TheoremId, case: u8) -> Result<ResidualReport> {
    let id = match theorem {
        TheoremId::Thm2 => EquationId::E22,
        _ => EquationId::E44,
    };
    let (ode, fam) = case_equation(&RoundTripCase {
        id,
        theorem,
        case,
        xi0: 0.0,
    })?;
    let term = curved_term(&fam)?;
    let Profile::Implicit(rel) = &term.profile else {
        return Err(Error::UnsupportedConfiguration(format!(
            "{} is not implicit",
            fam.subject()
        )));
    };
    let [s0, s1, t0, t1] = fam.bbox;
    let xis = [(s0, t0), (s0, t1), (s1, t0), (s1, t1)].map(|(s, t)| term.dir.0 * s + term.dir.1 * t);
    let (blo, bhi) = xis
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (rlo, rhi) = rel.range();
    let (lo, hi) = (blo.max(rlo), bhi.min(rhi));
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::EmptyGrid);
    }
    let inset = 0.02 * (hi - lo);
    let mut worst = 0.0f64;
    let mut at = lo;
    for k in 0..100 {
        let xi = lo + inset + (hi - lo - 2.0 * inset) * k as f64 / 99.0;
        let (h, w) = term_state(&fam, term, xi)?;
        let r = first_integral_residual(&ode, rel.phase, h, w)?.abs();
        if r > worst {
            worst = r;
            at = xi;
        }
    }
    let sweep = sweep_residual(&fam, &GridSpec::for_box(fam.bbox)?, &SweepOptions::default())?;

    let mut rep = ResidualReport::new(
        format!("implicit/{}", fam.subject()),
        format!("{} with lambda = {}", id, rel.phase),
        Tolerances {
            minimality: IMPLICIT_PDE_TOL,
            constraint: 0.0,
        },
    );
    rep.max_residual = worst;
    rep.argmax = Some([at, 0.0]);
    rep.sigma_branch = Some(fam.sigma);
    rep.paper_sign_agrees = fam.meta.paper_sign_agrees;
    rep.evaluated = 100 + sweep.evaluated;
    rep.skipped = sweep.skipped;
    rep.checks
        .push(Check::at_most("first_integral", worst, FIRST_INTEGRAL_TOL));
    rep.checks
        .push(Check::at_most("pde_residual", sweep.max_residual, IMPLICIT_PDE_TOL));
    Ok(rep.finish())
}
