//! Graph surfaces over coordinate planes: normals, orthonormal frames, mean
//! curvature through an arbitrary ambient connection, and the displayed
//! minimality and constraint residual operators.

use serde::{Deserialize, Serialize};

use crate::connection::{correction, ConnectionKind};
use crate::error::{Error, Result};
use crate::poly::Poly3;
use crate::types::{causal_character, inner, span_is_spacelike, CausalClass, Signature, Vec3};

/// Radicands at or below this value make the tangent plane degenerate.
pub const DEGENERATE_RADICAND: f64 = 1e-10;

/// Which coordinate is the graph of the other two. The chart coordinates
/// `(s, t)` are `(x, y)`, `(x, z)` and `(y, z)` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphAxis {
    ZofXY,
    YofXZ,
    XofYZ,
}

impl GraphAxis {
    pub const ALL: [GraphAxis; 3] = [GraphAxis::ZofXY, GraphAxis::YofXZ, GraphAxis::XofYZ];

    pub fn label(self) -> &'static str {
        match self {
            GraphAxis::ZofXY => "z=u(x,y)",
            GraphAxis::YofXZ => "y=u(x,z)",
            GraphAxis::XofYZ => "x=u(y,z)",
        }
    }

    /// Places the graph value into its ambient slot.
    pub fn embed(self, s: f64, t: f64, u: f64) -> Vec3 {
        match self {
            GraphAxis::ZofXY => Vec3::new(s, t, u),
            GraphAxis::YofXZ => Vec3::new(s, u, t),
            GraphAxis::XofYZ => Vec3::new(u, s, t),
        }
    }

    /// Coordinate tangent vectors `r_s`, `r_t`.
    pub fn tangents(self, us: f64, ut: f64) -> (Vec3, Vec3) {
        match self {
            GraphAxis::ZofXY => (Vec3::new(1.0, 0.0, us), Vec3::new(0.0, 1.0, ut)),
            GraphAxis::YofXZ => (Vec3::new(1.0, us, 0.0), Vec3::new(0.0, ut, 1.0)),
            GraphAxis::XofYZ => (Vec3::new(us, 1.0, 0.0), Vec3::new(ut, 0.0, 1.0)),
        }
    }

    fn second(self, w: f64) -> Vec3 {
        self.embed(0.0, 0.0, w)
    }

    /// Unnormalized normal `N` and radicand `R` with `n = N / sqrt(R)`.
    pub fn normal_parts(self, sig: Signature, us: f64, ut: f64) -> (Vec3, f64) {
        use GraphAxis::*;
        match (self, sig) {
            (ZofXY, Signature::Euclidean) => (Vec3::new(-us, -ut, 1.0), 1.0 + us * us + ut * ut),
            (YofXZ, Signature::Euclidean) => (Vec3::new(us, -1.0, ut), 1.0 + us * us + ut * ut),
            (XofYZ, Signature::Euclidean) => (Vec3::new(1.0, -us, -ut), 1.0 + us * us + ut * ut),
            (ZofXY, Signature::Lorentzian) => (Vec3::new(-us, -ut, -1.0), -1.0 + us * us + ut * ut),
            (YofXZ, Signature::Lorentzian) => (Vec3::new(us, -1.0, -ut), 1.0 + us * us - ut * ut),
            (XofYZ, Signature::Lorentzian) => (Vec3::new(1.0, -us, ut), 1.0 + us * us - ut * ut),
        }
    }
}

/// Value and first/second partials of a graph function at one chart point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet {
    pub u: f64,
    pub us: f64,
    pub ut: f64,
    pub uss: f64,
    pub ust: f64,
    pub utt: f64,
}

impl Jet {
    /// Largest absolute first or second derivative, used to scale tolerances.
    pub fn derivative_magnitude(&self) -> f64 {
        [self.us, self.ut, self.uss, self.ust, self.utt]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// A twice-differentiable function of the chart coordinates.
pub trait ScalarField: Send + Sync {
    fn value(&self, s: f64, t: f64) -> f64;

    fn in_domain(&self, _s: f64, _t: f64) -> bool {
        true
    }

    fn gradient(&self, _s: f64, _t: f64) -> Option<(f64, f64)> {
        None
    }

    /// `(u_ss, u_st, u_tt)`.
    fn hessian(&self, _s: f64, _t: f64) -> Option<[f64; 3]> {
        None
    }

    /// Base step for central differences; scaled by `max(1, |s|, |t|)`.
    fn fd_step(&self) -> f64 {
        1e-4
    }
}

/// How derivatives are obtained when building a [`Jet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeMode {
    /// Analytic when the field provides them, central differences otherwise.
    PreferAnalytic,
    FiniteDifference,
}

/// Origin of the derivatives in a [`Jet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetSource {
    Analytic,
    FiniteDifference,
}

pub fn jet(field: &dyn ScalarField, s: f64, t: f64, mode: DerivativeMode) -> Result<(Jet, JetSource)> {
    if !field.in_domain(s, t) {
        return Err(Error::OutOfDomain(s, t));
    }
    let u = field.value(s, t);
    if mode == DerivativeMode::PreferAnalytic {
        if let (Some((us, ut)), Some([uss, ust, utt])) = (field.gradient(s, t), field.hessian(s, t)) {
            return Ok((
                Jet {
                    u,
                    us,
                    ut,
                    uss,
                    ust,
                    utt,
                },
                JetSource::Analytic,
            ));
        }
    }
    let h = field.fd_step() * 1f64.max(s.abs()).max(t.abs());
    let stencil = [
        (h, 0.0),
        (-h, 0.0),
        (0.0, h),
        (0.0, -h),
        (h, h),
        (h, -h),
        (-h, h),
        (-h, -h),
    ];
    if stencil.iter().any(|&(ds, dt)| !field.in_domain(s + ds, t + dt)) {
        return Err(Error::MissingHessian);
    }
    let f = |ds: f64, dt: f64| field.value(s + ds, t + dt);
    let (fpp, fmm) = (f(h, 0.0), f(-h, 0.0));
    let (fqp, fqm) = (f(0.0, h), f(0.0, -h));
    let us = (fpp - fmm) / (2.0 * h);
    let ut = (fqp - fqm) / (2.0 * h);
    let uss = (fpp - 2.0 * u + fmm) / (h * h);
    let utt = (fqp - 2.0 * u + fqm) / (h * h);
    let ust = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
    Ok((
        Jet {
            u,
            us,
            ut,
            uss,
            ust,
            utt,
        },
        JetSource::FiniteDifference,
    ))
}

/// Polynomial field in the chart coordinates (only the `x`, `y` slots of the polynomial are used).
#[derive(Debug, Clone)]
pub struct PolyField {
    p: Poly3,
    ds: Poly3,
    dt: Poly3,
    dss: Poly3,
    dst: Poly3,
    dtt: Poly3,
}

impl PolyField {
    pub fn new(p: Poly3) -> Self {
        let ds = p.partial(0);
        let dt = p.partial(1);
        PolyField {
            dss: ds.partial(0),
            dst: ds.partial(1),
            dtt: dt.partial(1),
            p,
            ds,
            dt,
        }
    }

    pub fn poly(&self) -> &Poly3 {
        &self.p
    }
}

impl ScalarField for PolyField {
    fn value(&self, s: f64, t: f64) -> f64 {
        self.p.eval([s, t, 0.0])
    }
    fn gradient(&self, s: f64, t: f64) -> Option<(f64, f64)> {
        Some((self.ds.eval([s, t, 0.0]), self.dt.eval([s, t, 0.0])))
    }
    fn hessian(&self, s: f64, t: f64) -> Option<[f64; 3]> {
        let a = [s, t, 0.0];
        Some([self.dss.eval(a), self.dst.eval(a), self.dtt.eval(a)])
    }
}

/// Field given by a value closure only; derivatives come from central differences.
pub struct FnField<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Send + Sync> ScalarField for FnField<F> {
    fn value(&self, s: f64, t: f64) -> f64 {
        (self.0)(s, t)
    }
}

/// Unit direction vector `v`, spacelike in the Lorentzian case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionVector {
    v: Vec3,
    sig: Signature,
}

impl DirectionVector {
    pub fn new(sig: Signature, v: Vec3) -> Result<Self> {
        let q = inner(sig, v, v);
        if (q.abs() - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitDirection(q));
        }
        if sig == Signature::Lorentzian && causal_character(sig, v) != CausalClass::Spacelike {
            return Err(Error::WrongCausalCharacter(format!("{v:?} is not spacelike")));
        }
        Ok(DirectionVector { v, sig })
    }

    pub fn vec(&self) -> Vec3 {
        self.v
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }
}

/// A graph surface in a chosen ambient signature.
#[derive(Clone, Copy)]
pub struct GraphSurface<'a> {
    pub axis: GraphAxis,
    pub sig: Signature,
    pub field: &'a dyn ScalarField,
    pub mode: DerivativeMode,
}

/// Orthonormal tangent frame with `eps_i = <f_i, f_i>` and the coefficients of
/// each `f_i` in the coordinate basis `(r_s, r_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub f1: Vec3,
    pub f2: Vec3,
    pub eps: [f64; 2],
    pub coeffs: [[f64; 2]; 2],
}

impl<'a> GraphSurface<'a> {
    pub fn new(axis: GraphAxis, sig: Signature, field: &'a dyn ScalarField) -> Self {
        GraphSurface {
            axis,
            sig,
            field,
            mode: DerivativeMode::PreferAnalytic,
        }
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn jet(&self, s: f64, t: f64) -> Result<Jet> {
        jet(self.field, s, t, self.mode).map(|(j, _)| j)
    }

    pub fn position(&self, s: f64, t: f64) -> Result<Vec3> {
        if !self.field.in_domain(s, t) {
            return Err(Error::OutOfDomain(s, t));
        }
        Ok(self.axis.embed(s, t, self.field.value(s, t)))
    }

    pub fn radicand(&self, s: f64, t: f64) -> Result<f64> {
        let j = self.jet(s, t)?;
        Ok(self.axis.normal_parts(self.sig, j.us, j.ut).1)
    }

    pub fn unit_normal(&self, s: f64, t: f64) -> Result<Vec3> {
        let j = self.jet(s, t)?;
        normal_from_jet(self.axis, self.sig, &j)
    }

    pub fn tangent_frame(&self, s: f64, t: f64) -> Result<Frame> {
        let j = self.jet(s, t)?;
        frame_from_jet(self.axis, self.sig, &j)
    }

    /// Signed mean curvature `<H, n> / <n, n>` through the connection `kind`.
    pub fn mean_curvature(&self, kind: ConnectionKind, s: f64, t: f64) -> Result<f64> {
        let j = self.jet(s, t)?;
        mean_curvature_from_jet(self.axis, self.sig, kind, &j)
    }

    pub fn minimality_residual(&self, kind: ConnectionKind, s: f64, t: f64) -> Result<f64> {
        let j = self.jet(s, t)?;
        minimality_residual_from_jet(self.axis, kind, self.sig, &j)
    }

    pub fn constraint_residual(&self, v: &DirectionVector, s: f64, t: f64) -> Result<f64> {
        let j = self.jet(s, t)?;
        Ok(constraint_residual_from_jet(self.axis, v.vec(), &j))
    }

    /// `2H - alpha <n, v> / <r, v>` for the connection `kind`.
    pub fn singular_minimality_residual(
        &self,
        kind: ConnectionKind,
        v: &DirectionVector,
        alpha: f64,
        s: f64,
        t: f64,
    ) -> Result<SingularResidual> {
        if alpha == 0.0 {
            return Err(Error::AlphaZero);
        }
        let j = self.jet(s, t)?;
        let r = self.axis.embed(s, t, j.u);
        let rv = inner(self.sig, r, v.vec());
        if rv.abs() <= 1e-12 * (1.0 + r.norm2().sqrt()) {
            return Err(Error::PositionOrthogonalToV);
        }
        let n = normal_from_jet(self.axis, self.sig, &j)?;
        let h = mean_curvature_from_jet(self.axis, self.sig, kind, &j)?;
        let span_warning = self.sig == Signature::Lorentzian && !span_is_spacelike(n, v.vec()).unwrap_or(false);
        Ok(SingularResidual {
            value: 2.0 * h - alpha * inner(self.sig, n, v.vec()) / rv,
            span_warning,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularResidual {
    pub value: f64,
    /// Lorentzian only: `n` and `v` fail to span a spacelike plane.
    pub span_warning: bool,
}

pub fn normal_from_jet(axis: GraphAxis, sig: Signature, j: &Jet) -> Result<Vec3> {
    let (n, r) = axis.normal_parts(sig, j.us, j.ut);
    if r <= DEGENERATE_RADICAND {
        return Err(Error::DegenerateTangentPlane { radicand: r });
    }
    Ok((1.0 / r.sqrt()) * n)
}

/// Gram-Schmidt on the coordinate tangents in the ambient product. A null
/// `r_s` is swapped for the best-conditioned of `r_t`, `r_s + r_t`, `r_s - r_t`.
pub fn frame_from_jet(axis: GraphAxis, sig: Signature, j: &Jet) -> Result<Frame> {
    // the radicand check also rules out a degenerate induced metric
    normal_from_jet(axis, sig, j)?;
    let (rs, rt) = axis.tangents(j.us, j.ut);
    let candidates: [([f64; 2], Vec3); 4] = [
        ([1.0, 0.0], rs),
        ([0.0, 1.0], rt),
        ([1.0, 1.0], rs + rt),
        ([1.0, -1.0], rs - rt),
    ];
    let quality = |v: Vec3| inner(sig, v, v).abs() / v.norm2();
    let (mut c1, mut a) = candidates[0];
    if quality(a) < 1e-3 {
        for &(c, v) in &candidates[1..] {
            if quality(v) > quality(a) {
                c1 = c;
                a = v;
            }
        }
    }
    // second vector: whichever coordinate tangent is not parallel to a
    let (c2raw, b) = if c1 == [0.0, 1.0] {
        ([1.0, 0.0], rs)
    } else {
        ([0.0, 1.0], rt)
    };
    let aa = inner(sig, a, a);
    let proj = inner(sig, b, a) / aa;
    let w = b - proj * a;
    let ww = inner(sig, w, w);
    if aa.abs() <= DEGENERATE_RADICAND || ww.abs() <= DEGENERATE_RADICAND * w.norm2().max(1.0) {
        return Err(Error::DegenerateTangentPlane { radicand: ww });
    }
    let (na, nw) = (aa.abs().sqrt(), ww.abs().sqrt());
    let f1 = (1.0 / na) * a;
    let f2 = (1.0 / nw) * w;
    let k1 = [c1[0] / na, c1[1] / na];
    let k2 = [(c2raw[0] - proj * c1[0]) / nw, (c2raw[1] - proj * c1[1]) / nw];
    Ok(Frame {
        f1,
        f2,
        eps: [aa.signum(), ww.signum()],
        coeffs: [k1, k2],
    })
}

pub fn mean_curvature_from_jet(axis: GraphAxis, sig: Signature, kind: ConnectionKind, j: &Jet) -> Result<f64> {
    let n = normal_from_jet(axis, sig, j)?;
    let frame = frame_from_jet(axis, sig, j)?;
    let (rs, rt) = axis.tangents(j.us, j.ut);
    let r = [rs, rt];
    let second = [
        [axis.second(j.uss), axis.second(j.ust)],
        [axis.second(j.ust), axis.second(j.utt)],
    ];
    // normal component of nabla_{r_k} r_l
    let mut b = [[0.0; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            b[k][l] = inner(sig, second[k][l] + correction(kind, sig, r[k], r[l]), n);
        }
    }
    let nn = inner(sig, n, n);
    let mut sum = 0.0;
    for i in 0..2 {
        let c = frame.coeffs[i];
        let h_ii = (0..2)
            .flat_map(|k| (0..2).map(move |l| (k, l)))
            .map(|(k, l)| c[k] * c[l] * b[k][l])
            .sum::<f64>();
        sum += frame.eps[i] * h_ii / nn;
    }
    Ok(0.5 * sum)
}

/// A displayed minimality equation and its frozen sign relative to `2 H W^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplayedPde {
    pub label: &'static str,
    /// `residual = sigma * 2 H W^3`.
    pub sigma: f64,
}

/// Table of `(axis, kind, signature)` triples that have a displayed minimality
/// equation. Signs were calibrated once against the frame computation.
pub fn displayed_pde(axis: GraphAxis, kind: ConnectionKind, sig: Signature) -> Option<DisplayedPde> {
    use ConnectionKind::*;
    use GraphAxis::*;
    use Signature::*;
    let (label, sigma) = match (axis, kind, sig) {
        (ZofXY, SemiSymMetric, Euclidean) => ("metric minimality", 1.0),
        (YofXZ, SemiSymMetric, Euclidean) => ("metric minimality", -1.0),
        (XofYZ, SemiSymMetric, Euclidean) => ("metric minimality, x and y swapped", 1.0),
        (ZofXY, SemiSymNonMetric, Euclidean) => ("non-metric minimality", 1.0),
        (ZofXY, SemiSymMetric, Lorentzian) => ("metric minimality", -1.0),
        (YofXZ, SemiSymMetric, Lorentzian) => ("metric minimality", 1.0),
        (XofYZ, SemiSymMetric, Lorentzian) => ("metric minimality, x and y swapped", -1.0),
        (ZofXY, SemiSymNonMetric, Lorentzian) => ("non-metric minimality", -1.0),
        (ZofXY, LeviCivita, Euclidean) => ("minimal graph", 1.0),
        (YofXZ, LeviCivita, Euclidean) => ("minimal graph", -1.0),
        (XofYZ, LeviCivita, Euclidean) => ("minimal graph", 1.0),
        (ZofXY, LeviCivita, Lorentzian) => ("minimal graph", -1.0),
        (YofXZ, LeviCivita, Lorentzian) => ("minimal graph", 1.0),
        (XofYZ, LeviCivita, Lorentzian) => ("minimal graph", -1.0),
        (YofXZ | XofYZ, SemiSymNonMetric, _) => return None,
    };
    Some(DisplayedPde { label, sigma })
}

pub fn config_label(axis: GraphAxis, kind: ConnectionKind, sig: Signature) -> String {
    format!("{} / {} / {}", axis.label(), kind.label(), sig.label())
}

/// Left-hand side of the displayed minimality equation for the configuration.
pub fn minimality_residual_from_jet(axis: GraphAxis, kind: ConnectionKind, sig: Signature, j: &Jet) -> Result<f64> {
    if displayed_pde(axis, kind, sig).is_none() {
        return Err(Error::UnsupportedConfiguration(config_label(axis, kind, sig)));
    }
    let Jet {
        us, ut, uss, ust, utt, ..
    } = *j;
    let (_, r) = axis.normal_parts(sig, us, ut);
    let (principal, extra) = match (axis, sig) {
        (GraphAxis::ZofXY, Signature::Euclidean) => (
            (1.0 + ut * ut) * uss - 2.0 * us * ut * ust + (1.0 + us * us) * utt,
            -2.0 * r,
        ),
        (_, Signature::Euclidean) => (
            (1.0 + ut * ut) * uss - 2.0 * us * ut * ust + (1.0 + us * us) * utt,
            2.0 * r * ut,
        ),
        (GraphAxis::ZofXY, Signature::Lorentzian) => (
            (1.0 - ut * ut) * uss + 2.0 * us * ut * ust + (1.0 - us * us) * utt,
            2.0 * r,
        ),
        (_, Signature::Lorentzian) => (
            (ut * ut - 1.0) * uss - 2.0 * us * ut * ust + (1.0 + us * us) * utt,
            -2.0 * r * ut,
        ),
    };
    Ok(match kind {
        ConnectionKind::SemiSymMetric => principal + extra,
        _ => principal,
    })
}

/// `2 H W^3` from the frame computation; the explicit fallback for
/// configurations without a displayed equation.
pub fn frame_residual_from_jet(axis: GraphAxis, kind: ConnectionKind, sig: Signature, j: &Jet) -> Result<f64> {
    let h = mean_curvature_from_jet(axis, sig, kind, j)?;
    Ok(2.0 * h * weight(axis, sig, j))
}

/// `W^3` with `W = sqrt(|radicand|)`.
pub fn weight(axis: GraphAxis, sig: Signature, j: &Jet) -> f64 {
    let (_, r) = axis.normal_parts(sig, j.us, j.ut);
    r.abs().powf(1.5)
}

/// Axis-appropriate linear constraint; zero iff `<n, v> = 0`.
pub fn constraint_residual_from_jet(axis: GraphAxis, v: Vec3, j: &Jet) -> f64 {
    let Vec3 { x: a, y: b, z: c } = v;
    match axis {
        GraphAxis::ZofXY => a * j.us + b * j.ut - c,
        GraphAxis::YofXZ => a * j.us + c * j.ut - b,
        GraphAxis::XofYZ => b * j.us + c * j.ut - a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const E: Signature = Signature::Euclidean;
    const L: Signature = Signature::Lorentzian;

    fn poly(terms: Vec<([u8; 3], f64)>) -> PolyField {
        PolyField::new(Poly3::new(terms).unwrap())
    }

    #[test]
    fn normal_examples() {
        let c = poly(vec![([0, 0, 0], 5.0)]);
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &c);
        assert_eq!(s.unit_normal(0.3, 0.7).unwrap(), Vec3::E3);

        let x = poly(vec![([1, 0, 0], 1.0)]);
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &x);
        let k = 1.0 / 2f64.sqrt();
        assert!(s.unit_normal(0.0, 0.0).unwrap().max_abs_diff(Vec3::new(-k, 0.0, k)) < 1e-15);

        let x2 = poly(vec![([1, 0, 0], 2.0)]);
        let s = GraphSurface::new(GraphAxis::ZofXY, L, &x2);
        let k = 1.0 / 3f64.sqrt();
        assert!(
            s.unit_normal(0.0, 0.0)
                .unwrap()
                .max_abs_diff(Vec3::new(-2.0 * k, 0.0, -k))
                < 1e-15
        );

        // horizontal plane in Minkowski space is spacelike: no unit spacelike normal
        let s = GraphSurface::new(GraphAxis::ZofXY, L, &c);
        assert!(matches!(
            s.unit_normal(0.0, 0.0),
            Err(Error::DegenerateTangentPlane { .. })
        ));
    }

    #[test]
    fn frame_examples() {
        let zero = poly(vec![]);
        let f = GraphSurface::new(GraphAxis::ZofXY, E, &zero)
            .tangent_frame(0.2, 0.1)
            .unwrap();
        assert_eq!((f.f1, f.f2), (Vec3::E1, Vec3::E2));

        let f = GraphSurface::new(GraphAxis::YofXZ, L, &zero)
            .tangent_frame(0.0, 0.0)
            .unwrap();
        assert_eq!(f.eps, [1.0, -1.0]);

        let x = poly(vec![([1, 0, 0], 1.0)]);
        let f = GraphSurface::new(GraphAxis::ZofXY, E, &x)
            .tangent_frame(0.0, 0.0)
            .unwrap();
        let k = 1.0 / 2f64.sqrt();
        assert!(f.f1.max_abs_diff(Vec3::new(k, 0.0, k)) < 1e-15);
        assert!(f.f2.max_abs_diff(Vec3::E2) < 1e-15);
    }

    #[test]
    fn frame_survives_null_coordinate_tangent() {
        // y = z on the Lorentzian chart makes r_z = (0, 1, 1) null and r_x spacelike;
        // y = x + z makes r_x = (1, 1, 0) spacelike and r_z null as well.
        let f = poly(vec![([0, 1, 0], 1.0), ([1, 0, 0], 0.5)]);
        let surf = GraphSurface::new(GraphAxis::YofXZ, L, &f);
        let fr = surf.tangent_frame(0.0, 0.0).unwrap();
        let n = surf.unit_normal(0.0, 0.0).unwrap();
        assert!((inner(L, fr.f1, fr.f2)).abs() < 1e-12);
        assert!((inner(L, fr.f1, n)).abs() < 1e-12 && (inner(L, fr.f2, n)).abs() < 1e-12);
        let mut eps = fr.eps;
        eps.sort_by(f64::total_cmp);
        assert_eq!(eps, [-1.0, 1.0]);

        // r_x = (1, 1, 0)... choose u = z + x so r_x = (1, 1, 0) and r_z = (0, 1, 1) (null)
        let g = poly(vec![([0, 1, 0], 1.0), ([1, 0, 0], 1.0)]);
        let surf = GraphSurface::new(GraphAxis::XofYZ, L, &g);
        // x = u(y, z) = y + z: r_y = (1, 1, 0), r_z = (1, 0, 1) which is null
        let fr = surf.tangent_frame(0.0, 0.0).unwrap();
        assert!((inner(L, fr.f1, fr.f1).abs() - 1.0).abs() < 1e-12);
        assert!((inner(L, fr.f2, fr.f2).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_curvature_examples() {
        let bowl = poly(vec![([2, 0, 0], 0.5), ([0, 2, 0], 0.5)]);
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &bowl);
        assert!((s.mean_curvature(ConnectionKind::LeviCivita, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-14);

        let zero = poly(vec![]);
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &zero);
        assert!((s.mean_curvature(ConnectionKind::SemiSymMetric, 0.4, -0.3).unwrap() + 1.0).abs() < 1e-14);

        let plane = poly(vec![([1, 0, 0], 0.3), ([0, 1, 0], -0.7), ([0, 0, 0], 2.0)]);
        for axis in GraphAxis::ALL {
            let s = GraphSurface::new(axis, E, &plane);
            assert!(s.mean_curvature(ConnectionKind::LeviCivita, 0.1, 0.2).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn residual_examples() {
        let zero = poly(vec![]);
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &zero);
        assert_eq!(
            s.minimality_residual(ConnectionKind::SemiSymMetric, 0.5, 0.5).unwrap(),
            -2.0
        );
        let y = GraphSurface::new(GraphAxis::YofXZ, E, &zero);
        assert!(matches!(
            y.minimality_residual(ConnectionKind::SemiSymNonMetric, 0.0, 0.0),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn scherk_is_levi_civita_minimal() {
        let lam = 1.3;
        let scherk = FnField(move |x: f64, y: f64| ((lam * x).cos() / (lam * y).cos()).abs().ln() / lam);
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &scherk);
        for &(x, y) in &[(0.1, 0.2), (-0.5, 0.3), (0.7, -0.6)] {
            let r = s.minimality_residual(ConnectionKind::LeviCivita, x, y).unwrap();
            assert!(r.abs() < 1e-6, "{r}");
        }
    }

    #[test]
    fn constraint_examples() {
        let x = poly(vec![([1, 0, 0], 1.0)]);
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &x);
        let v = DirectionVector::new(E, Vec3::E2).unwrap();
        assert_eq!(s.constraint_residual(&v, 0.3, 0.3).unwrap(), 0.0);
        let v = DirectionVector::new(E, Vec3::E1).unwrap();
        assert_eq!(s.constraint_residual(&v, 0.3, 0.3).unwrap(), 1.0);
    }

    #[test]
    fn direction_vector_validation() {
        assert!(matches!(
            DirectionVector::new(E, Vec3::new(1.0, 1.0, 0.0)),
            Err(Error::NonUnitDirection(_))
        ));
        assert!(matches!(
            DirectionVector::new(L, Vec3::E3),
            Err(Error::WrongCausalCharacter(_))
        ));
        assert!(DirectionVector::new(L, Vec3::new(0.0, 2f64.sqrt(), 1.0)).is_ok());
    }

    #[test]
    fn singular_minimality_examples() {
        let one = poly(vec![([0, 0, 0], 1.0)]);
        let two = poly(vec![([0, 0, 0], 2.0)]);
        let v = DirectionVector::new(E, Vec3::E3).unwrap();
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &one);
        let r = s
            .singular_minimality_residual(ConnectionKind::LeviCivita, &v, 1.0, 0.3, -0.2)
            .unwrap();
        assert!((r.value + 1.0).abs() < 1e-15);
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &two);
        let r = s
            .singular_minimality_residual(ConnectionKind::LeviCivita, &v, 1.0, 0.3, -0.2)
            .unwrap();
        assert!((r.value + 0.5).abs() < 1e-15);
        assert_eq!(
            s.singular_minimality_residual(ConnectionKind::LeviCivita, &v, 0.0, 0.3, -0.2),
            Err(Error::AlphaZero)
        );
        let zero = poly(vec![]);
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &zero);
        assert_eq!(
            s.singular_minimality_residual(ConnectionKind::LeviCivita, &v, 1.0, 0.3, -0.2),
            Err(Error::PositionOrthogonalToV)
        );
        // plane containing v: both terms vanish for any alpha
        let tilted = poly(vec![([0, 1, 0], 0.5), ([0, 0, 0], 1.0)]);
        let v1 = DirectionVector::new(E, Vec3::E1).unwrap();
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &tilted);
        for alpha in [-3.0, 0.5, 7.0] {
            let r = s
                .singular_minimality_residual(ConnectionKind::LeviCivita, &v1, alpha, 0.4, 0.2)
                .unwrap();
            assert!(r.value.abs() < 1e-14);
        }
    }

    #[test]
    fn singular_residual_is_affine_in_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = PolyField::new(Poly3::random(&mut rng, 3, 0.5));
        let v = DirectionVector::new(E, Vec3::new(0.6, 0.0, 0.8)).unwrap();
        let s = GraphSurface::new(GraphAxis::ZofXY, E, &f);
        let (x, y) = (0.3, 0.4);
        let j = s.jet(x, y).unwrap();
        let n = s.unit_normal(x, y).unwrap();
        let r = s.position(x, y).unwrap();
        let slope = -inner(E, n, v.vec()) / inner(E, r, v.vec());
        let _ = j;
        let k = ConnectionKind::SemiSymMetric;
        let r1 = s.singular_minimality_residual(k, &v, 1.0, x, y).unwrap().value;
        let r2 = s.singular_minimality_residual(k, &v, 3.0, x, y).unwrap().value;
        assert!(((r2 - r1) / 2.0 - slope).abs() < 1e-12);
    }

    #[test]
    fn displayed_equations_match_frame_curvature() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut checked = 0;
        for _ in 0..40 {
            let f = PolyField::new(Poly3::random(&mut rng, 3, 0.8));
            let (s, t) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let j = f.jet_at(s, t);
            for axis in GraphAxis::ALL {
                for sig in [E, L] {
                    for kind in ConnectionKind::ALL {
                        let Some(d) = displayed_pde(axis, kind, sig) else {
                            continue;
                        };
                        let Ok(frame) = frame_residual_from_jet(axis, kind, sig, &j) else {
                            continue;
                        };
                        let lhs = minimality_residual_from_jet(axis, kind, sig, &j).unwrap();
                        assert!(
                            (lhs - d.sigma * frame).abs() <= 1e-9 * (1.0 + lhs.abs()),
                            "{}: {lhs} vs {}",
                            config_label(axis, kind, sig),
                            d.sigma * frame
                        );
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 300);
    }

    impl PolyField {
        fn jet_at(&self, s: f64, t: f64) -> Jet {
            jet(self, s, t, DerivativeMode::PreferAnalytic).unwrap().0
        }
    }

    #[test]
    fn finite_differences_track_analytic_jets() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let f = PolyField::new(Poly3::random(&mut rng, 3, 1.0));
            let (s, t) = (rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9));
            let (a, _) = jet(&f, s, t, DerivativeMode::PreferAnalytic).unwrap();
            let (d, src) = jet(&f, s, t, DerivativeMode::FiniteDifference).unwrap();
            assert_eq!(src, JetSource::FiniteDifference);
            assert!((a.us - d.us).abs() < 1e-6 && (a.ut - d.ut).abs() < 1e-6);
            assert!((a.uss - d.uss).abs() < 1e-4 && (a.ust - d.ust).abs() < 1e-4 && (a.utt - d.utt).abs() < 1e-4);
        }
    }
}
