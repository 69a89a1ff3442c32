use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{Check, ResidualReport, Tolerances};
use crate::connection::{metricity_defect, one_form, torsion, ConnectionKind};
use crate::poly::PolyVectorField;
use crate::types::{Signature, Vec3};

pub const IDENTITY_TOL: f64 = 1e-9;
pub const WITNESS_TOL: f64 = 1e-12;

/// Torsion shape and metricity of the connections on random polynomial
/// vector fields, plus the metricity defect of `D` at `(e1, e1, e3)`.
pub fn connection_identities(trials: usize, seed: u64) -> ResidualReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut tors, mut metric) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let x = PolyVectorField::random(&mut rng, 2, 1.0);
        let y = PolyVectorField::random(&mut rng, 2, 1.0);
        let z = PolyVectorField::random(&mut rng, 2, 1.0);
        let p = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        for sig in [Signature::Euclidean, Signature::Lorentzian] {
            for kind in ConnectionKind::ALL {
                let (xv, yv) = (x.eval(p), y.eval(p));
                let expected = match kind {
                    ConnectionKind::LeviCivita => Vec3::ZERO,
                    _ => one_form(kind, sig, yv) * xv - one_form(kind, sig, xv) * yv,
                };
                tors = tors.max(torsion(kind, sig, &x, &y, p).max_abs_diff(expected));
                if kind != ConnectionKind::SemiSymNonMetric {
                    metric = metric.max(metricity_defect(kind, sig, &x, &y, &z, p).abs());
                }
            }
        }
    }
    let e = |v| PolyVectorField::constant(v);
    let mut witness = 0.0f64;
    for sig in [Signature::Euclidean, Signature::Lorentzian] {
        let d = metricity_defect(
            ConnectionKind::SemiSymNonMetric,
            sig,
            &e(Vec3::E1),
            &e(Vec3::E1),
            &e(Vec3::E3),
            Vec3::ZERO,
        );
        witness = witness.max((d + 1.0).abs());
    }
    let mut rep = ResidualReport::new(
        "connection/identities",
        "all kinds / both signatures",
        Tolerances {
            minimality: IDENTITY_TOL,
            constraint: 0.0,
        },
    );
    rep.max_residual = tors.max(metric);
    rep.evaluated = trials;
    rep.checks.push(Check::at_most("torsion", tors, IDENTITY_TOL));
    rep.checks.push(Check::at_most("metricity", metric, IDENTITY_TOL));
    rep.checks
        .push(Check::at_most("non_metric_witness", witness, WITNESS_TOL).with_note("|defect(e1, e1, e3) + 1|"));
    rep.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold() {
        let rep = connection_identities(100, 5);
        assert!(rep.pass, "{}", rep.to_json());
    }
}
