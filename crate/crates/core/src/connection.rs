//! The flat Levi-Civita connection and its two semi-symmetric deformations.
//!
//! Both deformations use the 1-form `pi(Y) = <Y, e3>`:
//!
//! * metric:     `nabla_X Y = D^L_X Y + pi(Y) X - <X, Y> e3`
//! * non-metric: `D_X Y     = D^L_X Y + pi(Y) X`
//!
//! For the metric connection `pi` and `<X, Y>` use the ambient signature. The
//! non-metric connection pairs with `e3` Euclidean-wise in both signatures, the
//! only reading that yields `D_{e3} e3 = e3` in Lorentz-Minkowski space.

use serde::{Deserialize, Serialize};

use crate::poly::PolyVectorField;
use crate::types::{inner, Signature, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConnectionKind {
    LeviCivita,
    SemiSymMetric,
    SemiSymNonMetric,
}

impl ConnectionKind {
    pub const ALL: [ConnectionKind; 3] = [
        ConnectionKind::LeviCivita,
        ConnectionKind::SemiSymMetric,
        ConnectionKind::SemiSymNonMetric,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ConnectionKind::LeviCivita => "levi-civita",
            ConnectionKind::SemiSymMetric => "semi-symmetric-metric",
            ConnectionKind::SemiSymNonMetric => "semi-symmetric-non-metric",
        }
    }

    /// Signature used by the 1-form `pi` for this connection.
    pub fn pairing_signature(self, sig: Signature) -> Signature {
        match self {
            ConnectionKind::SemiSymNonMetric => Signature::Euclidean,
            _ => sig,
        }
    }

    pub fn pairing_note(self) -> &'static str {
        match self {
            ConnectionKind::SemiSymNonMetric => {
                "non-metric 1-form paired with e3 in the Euclidean product so that D_e3 e3 = e3"
            }
            _ => "1-form paired with e3 in the ambient product",
        }
    }
}

/// `pi(Y) = <Y, e3>` in the kind's pairing signature.
pub fn one_form(kind: ConnectionKind, sig: Signature, y: Vec3) -> f64 {
    inner(kind.pairing_signature(sig), y, Vec3::E3)
}

/// Tensorial part of `nabla_X Y - D^L_X Y` at a point, for vectors `X` and `Y`.
pub fn correction(kind: ConnectionKind, sig: Signature, x: Vec3, y: Vec3) -> Vec3 {
    match kind {
        ConnectionKind::LeviCivita => Vec3::ZERO,
        ConnectionKind::SemiSymMetric => one_form(kind, sig, y) * x - inner(sig, x, y) * Vec3::E3,
        ConnectionKind::SemiSymNonMetric => one_form(kind, sig, y) * x,
    }
}

pub fn covariant_derivative(
    kind: ConnectionKind,
    sig: Signature,
    x: &PolyVectorField,
    y: &PolyVectorField,
    p: Vec3,
) -> Vec3 {
    let xv = x.eval(p);
    y.directional(p, xv) + correction(kind, sig, xv, y.eval(p))
}

/// `nabla_X Y - nabla_Y X - [X, Y]` with the bracket taken from exact derivatives.
pub fn torsion(kind: ConnectionKind, sig: Signature, x: &PolyVectorField, y: &PolyVectorField, p: Vec3) -> Vec3 {
    let (xv, yv) = (x.eval(p), y.eval(p));
    let bracket = y.directional(p, xv) - x.directional(p, yv);
    covariant_derivative(kind, sig, x, y, p) - covariant_derivative(kind, sig, y, x, p) - bracket
}

/// `X<Y,Z> - <nabla_X Y, Z> - <Y, nabla_X Z>` at `p`.
pub fn metricity_defect(
    kind: ConnectionKind,
    sig: Signature,
    x: &PolyVectorField,
    y: &PolyVectorField,
    z: &PolyVectorField,
    p: Vec3,
) -> f64 {
    let xv = x.eval(p);
    let (yv, zv) = (y.eval(p), z.eval(p));
    let x_of_yz = inner(sig, y.directional(p, xv), zv) + inner(sig, yv, z.directional(p, xv));
    x_of_yz
        - inner(sig, covariant_derivative(kind, sig, x, y, p), zv)
        - inner(sig, yv, covariant_derivative(kind, sig, x, z, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const E: Signature = Signature::Euclidean;
    const L: Signature = Signature::Lorentzian;

    fn c(v: Vec3) -> PolyVectorField {
        PolyVectorField::constant(v)
    }

    #[test]
    fn derivative_tables() {
        let p = Vec3::new(0.3, -1.2, 2.0);
        use ConnectionKind::*;
        let d = |k, s, a, b| covariant_derivative(k, s, &c(a), &c(b), p);
        assert_eq!(d(SemiSymMetric, E, Vec3::E1, Vec3::E1), Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(d(SemiSymMetric, E, Vec3::E1, Vec3::E3), Vec3::E1);
        assert_eq!(d(SemiSymMetric, E, Vec3::E2, Vec3::E2), -Vec3::E3);
        assert_eq!(d(SemiSymMetric, E, Vec3::E2, Vec3::E3), Vec3::E2);
        assert_eq!(d(SemiSymNonMetric, E, Vec3::E3, Vec3::E3), Vec3::E3);
        assert_eq!(d(SemiSymNonMetric, E, Vec3::E1, Vec3::E3), Vec3::E1);
        assert_eq!(d(SemiSymMetric, L, Vec3::E1, Vec3::E3), -Vec3::E1);
        assert_eq!(d(SemiSymMetric, L, Vec3::E1, Vec3::E1), -Vec3::E3);
        assert_eq!(d(SemiSymMetric, L, Vec3::E2, Vec3::E3), -Vec3::E2);
        assert_eq!(d(SemiSymNonMetric, L, Vec3::E3, Vec3::E3), Vec3::E3);
        assert_eq!(d(SemiSymNonMetric, L, Vec3::E2, Vec3::E3), Vec3::E2);
        // entries absent from the tables vanish
        assert_eq!(d(SemiSymMetric, E, Vec3::E3, Vec3::E3), Vec3::ZERO);
        assert_eq!(d(SemiSymNonMetric, E, Vec3::E3, Vec3::E1), Vec3::ZERO);
    }

    #[test]
    fn torsion_examples() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        let (x, y) = (c(Vec3::E1), c(Vec3::E3));
        for s in [E, L] {
            assert_eq!(torsion(ConnectionKind::LeviCivita, s, &x, &y, p), Vec3::ZERO);
        }
        assert_eq!(torsion(ConnectionKind::SemiSymMetric, E, &x, &y, p), Vec3::E1);
        assert_eq!(torsion(ConnectionKind::SemiSymNonMetric, E, &x, &y, p), Vec3::E1);
    }

    #[test]
    fn metricity_examples() {
        let p = Vec3::new(0.1, 0.2, 0.3);
        let (e1, e3) = (c(Vec3::E1), c(Vec3::E3));
        assert_eq!(
            metricity_defect(ConnectionKind::SemiSymNonMetric, E, &e1, &e1, &e3, p),
            -1.0
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v = [0, 1, 2].map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen()));
            let d = metricity_defect(ConnectionKind::SemiSymMetric, E, &c(v[0]), &c(v[1]), &c(v[2]), p);
            assert!(d.abs() < 1e-14);
        }
    }

    fn random_setup(rng: &mut ChaCha8Rng) -> (PolyVectorField, PolyVectorField, PolyVectorField, Vec3) {
        let f = |rng: &mut ChaCha8Rng| PolyVectorField::random(rng, 2, 1.0);
        let (x, y, z) = (f(rng), f(rng), f(rng));
        let p = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        (x, y, z, p)
    }

    #[test]
    fn semi_symmetry_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let (x, y, _, p) = random_setup(&mut rng);
            for s in [E, L] {
                for k in [ConnectionKind::SemiSymMetric, ConnectionKind::SemiSymNonMetric] {
                    let (xv, yv) = (x.eval(p), y.eval(p));
                    let expect = one_form(k, s, yv) * xv - one_form(k, s, xv) * yv;
                    assert!(torsion(k, s, &x, &y, p).max_abs_diff(expect) <= 1e-9);
                }
                assert!(torsion(ConnectionKind::LeviCivita, s, &x, &y, p).max_abs_diff(Vec3::ZERO) <= 1e-9);
            }
        }
    }

    #[test]
    fn metric_kinds_are_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let (x, y, z, p) = random_setup(&mut rng);
            for s in [E, L] {
                for k in [ConnectionKind::LeviCivita, ConnectionKind::SemiSymMetric] {
                    assert!(metricity_defect(k, s, &x, &y, &z, p).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn torsion_is_tensorial() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let x = PolyVectorField::random(&mut rng, 2, 1.0);
            let y = PolyVectorField::random(&mut rng, 2, 1.0);
            let f = Poly3::random(&mut rng, 2, 1.0);
            let p = Vec3::new(rng.gen(), rng.gen(), rng.gen());
            let fx = x.scaled_by(&f).unwrap();
            let fy = y.scaled_by(&f).unwrap();
            let fp = f.eval(p.to_array());
            for s in [E, L] {
                for k in ConnectionKind::ALL {
                    let base = torsion(k, s, &x, &y, p);
                    assert!(torsion(k, s, &fx, &y, p).max_abs_diff(fp * base) <= 1e-9);
                    assert!(torsion(k, s, &x, &fy, p).max_abs_diff(fp * base) <= 1e-9);
                }
            }
        }
    }
}
