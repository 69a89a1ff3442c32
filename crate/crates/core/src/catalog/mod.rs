//! Closed-form and implicit solution families for every classified case, with
//! the sign branch fixed by probing the minimality equation.

pub mod implicit;
pub mod profile;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::connection::ConnectionKind;
use crate::error::{Error, Result};
use crate::surface::{
    constraint_residual_from_jet, minimality_residual_from_jet, DirectionVector, GraphAxis, Jet, ScalarField,
};
use crate::types::{Signature, Vec3};
use implicit::{ImplicitRelation, Trig};
use profile::Profile;

/// Probe acceptance for minimality, scaled by `1 + derivative magnitude`.
pub const PROBE_MINIMALITY_TOL: f64 = 1e-6;
pub const PROBE_CONSTRAINT_TOL: f64 = 1e-10;
const ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    Thm6,
    Prop1,
    Prop2,
    #[serde(rename = "scherk")]
    ScherkLC,
    #[serde(rename = "affine-scherk")]
    AffineScherkLC,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::Thm1,
        TheoremId::Thm2,
        TheoremId::Thm3,
        TheoremId::Thm4,
        TheoremId::Thm5,
        TheoremId::Thm6,
        TheoremId::Prop1,
        TheoremId::Prop2,
        TheoremId::ScherkLC,
        TheoremId::AffineScherkLC,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TheoremId::Thm1 => "thm1",
            TheoremId::Thm2 => "thm2",
            TheoremId::Thm3 => "thm3",
            TheoremId::Thm4 => "thm4",
            TheoremId::Thm5 => "thm5",
            TheoremId::Thm6 => "thm6",
            TheoremId::Prop1 => "prop1",
            TheoremId::Prop2 => "prop2",
            TheoremId::ScherkLC => "scherk",
            TheoremId::AffineScherkLC => "affine-scherk",
        }
    }

    pub fn cases(self) -> std::ops::RangeInclusive<u8> {
        match self {
            TheoremId::Thm1 | TheoremId::Thm4 => 1..=3,
            TheoremId::Thm2 => 1..=5,
            TheoremId::Thm5 => 1..=6,
            _ => 1..=1,
        }
    }

    pub fn signature(self) -> Signature {
        match self {
            TheoremId::Thm4 | TheoremId::Thm5 | TheoremId::Thm6 | TheoremId::Prop2 => Signature::Lorentzian,
            _ => Signature::Euclidean,
        }
    }

    pub fn kind(self) -> ConnectionKind {
        match self {
            TheoremId::Thm1 | TheoremId::Thm2 | TheoremId::Thm4 | TheoremId::Thm5 => ConnectionKind::SemiSymMetric,
            TheoremId::Thm3 | TheoremId::Thm6 => ConnectionKind::SemiSymNonMetric,
            _ => ConnectionKind::LeviCivita,
        }
    }

    pub fn axis(self) -> GraphAxis {
        match self {
            TheoremId::Thm2 | TheoremId::Thm5 | TheoremId::Prop2 => GraphAxis::YofXZ,
            _ => GraphAxis::ZofXY,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::InvalidConstant(format!("unknown theorem id '{s}'")))
    }
}

/// Named real constants: `lambda1`..`lambda10`, plus `mu` and `offset` for planes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Constants(pub BTreeMap<String, f64>);

impl Constants {
    pub fn new() -> Self {
        Constants::default()
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.get(&format!("lambda{i}"), 0.0)
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    fn validate(&self) -> Result<()> {
        for (k, v) in &self.0 {
            let known = k == "mu"
                || k == "offset"
                || k.strip_prefix("lambda")
                    .and_then(|n| n.parse::<u8>().ok())
                    .is_some_and(|n| (1..=10).contains(&n));
            if !known {
                return Err(Error::InvalidConstant(format!("unknown constant '{k}'")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidConstant(format!("{k} is not finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrintedSign {
    Plus,
    PlusMinus,
    /// No free sign in the printed statement (planes, implicit relations, controls).
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMeta {
    pub printed_sign: PrintedSign,
    pub paper_sign_agrees: bool,
    /// False when the printed closed form had to be corrected to satisfy the equation.
    pub printed_form_agrees: bool,
    pub note: String,
    /// Largest scaled probe residual of the accepted branch.
    pub probe_residual: f64,
}

/// `linear * xi + sign * profile(xi)` with `xi = dir.0 * s + dir.1 * t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub dir: (f64, f64),
    pub linear: f64,
    /// Whether the family-wide branch sign multiplies the profile.
    pub signed: bool,
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub terms: Vec<Term>,
}

/// Options beyond the theorem's own constants.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FamilyOptions {
    /// `[s0, s1, t0, t1]`; replaces the default box.
    pub bbox: Option<[f64; 4]>,
    /// Refuse to correct a printed form that fails the probe.
    pub strict_printed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFamily {
    pub theorem: TheoremId,
    pub case: u8,
    pub sig: Signature,
    pub axis: GraphAxis,
    pub kind: ConnectionKind,
    pub v: Option<DirectionVector>,
    pub constants: Constants,
    pub sigma: f64,
    pub meta: FamilyMeta,
    pub bbox: [f64; 4],
    pub shape: Shape,
}

/// JSON form of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub theorem: TheoremId,
    pub case: u8,
    pub sig: Signature,
    pub axis: GraphAxis,
    pub kind: ConnectionKind,
    pub v: Option<Vec3>,
    pub constants: Constants,
    pub sigma: f64,
    pub domain_box: [f64; 4],
    pub printed_sign: PrintedSign,
    pub paper_sign_agrees: bool,
    pub printed_form_agrees: bool,
    pub note: String,
}

impl SolutionFamily {
    pub fn subject(&self) -> String {
        subject_id(self.theorem, self.case)
    }

    pub fn is_implicit(&self) -> bool {
        self.shape
            .terms
            .iter()
            .any(|t| matches!(t.profile, Profile::Implicit(_)))
    }

    pub fn implicit_relation(&self) -> Option<(&Term, &ImplicitRelation)> {
        self.shape.terms.iter().find_map(|t| match &t.profile {
            Profile::Implicit(r) => Some((t, r)),
            _ => None,
        })
    }

    pub fn is_plane(&self) -> bool {
        self.shape.terms.is_empty()
    }

    pub fn in_box(&self, s: f64, t: f64) -> bool {
        let [s0, s1, t0, t1] = self.bbox;
        s >= s0 && s <= s1 && t >= t0 && t <= t1
    }

    pub fn domain(&self, s: f64, t: f64) -> bool {
        self.in_box(s, t)
            && self
                .shape
                .terms
                .iter()
                .all(|term| term.profile.in_domain(term.dir.0 * s + term.dir.1 * t))
    }

    /// Full jet from the analytic derivatives of every term.
    pub fn jet(&self, s: f64, t: f64) -> Result<Jet> {
        if !self.domain(s, t) {
            return Err(Error::OutOfDomain(s, t));
        }
        let sh = &self.shape;
        let mut j = Jet {
            u: sh.alpha * s + sh.beta * t + sh.gamma,
            us: sh.alpha,
            ut: sh.beta,
            ..Jet::default()
        };
        for term in &sh.terms {
            let (p, q) = term.dir;
            let xi = p * s + q * t;
            let (f, f1, f2) = term.profile.eval(xi).ok_or(Error::OutOfDomain(s, t))?;
            let sg = if term.signed { self.sigma } else { 1.0 };
            let d1 = term.linear + sg * f1;
            let d2 = sg * f2;
            j.u += term.linear * xi + sg * f;
            j.us += p * d1;
            j.ut += q * d1;
            j.uss += p * p * d2;
            j.ust += p * q * d2;
            j.utt += q * q * d2;
        }
        Ok(j)
    }

    pub fn eval(&self, s: f64, t: f64) -> Result<f64> {
        self.jet(s, t).map(|j| j.u)
    }

    pub fn grad(&self, s: f64, t: f64) -> Result<(f64, f64)> {
        self.jet(s, t).map(|j| (j.us, j.ut))
    }

    /// Value of the implicit unknown `h` at a chart point.
    pub fn implicit_eval(&self, s: f64, t: f64) -> Result<f64> {
        let (term, rel) = self
            .implicit_relation()
            .ok_or_else(|| Error::UnsupportedConfiguration(format!("{} is not implicit", self.subject())))?;
        let xi = term.dir.0 * s + term.dir.1 * t;
        if !self.in_box(s, t) {
            return Err(Error::OutOfDomain(s, t));
        }
        rel.eval(xi).map(|(h, _, _)| h)
    }

    /// Direction in the chart along which the family is affine, when it has one.
    pub fn ruling_direction(&self) -> Option<(f64, f64)> {
        match self.shape.terms.as_slice() {
            [] => Some((1.0, 0.0)),
            [term] => {
                let (p, q) = term.dir;
                let n = (p * p + q * q).sqrt();
                Some((-q / n, p / n))
            }
            _ => None,
        }
    }

    pub fn minimality_residual(&self, s: f64, t: f64) -> Result<f64> {
        let j = self.jet(s, t)?;
        minimality_residual_from_jet(self.axis, self.kind, self.sig, &j)
    }

    pub fn constraint_residual(&self, s: f64, t: f64) -> Result<Option<f64>> {
        let j = self.jet(s, t)?;
        Ok(self.v.map(|v| constraint_residual_from_jet(self.axis, v.vec(), &j)))
    }

    pub fn with_box(&self, bbox: [f64; 4]) -> Result<Self> {
        validate_box(bbox)?;
        let mut f = self.clone();
        f.bbox = bbox;
        Ok(f)
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        FamilyDescriptor {
            theorem: self.theorem,
            case: self.case,
            sig: self.sig,
            axis: self.axis,
            kind: self.kind,
            v: self.v.map(|v| v.vec()),
            constants: self.constants.clone(),
            sigma: self.sigma,
            domain_box: self.bbox,
            printed_sign: self.meta.printed_sign,
            paper_sign_agrees: self.meta.paper_sign_agrees,
            printed_form_agrees: self.meta.printed_form_agrees,
            note: self.meta.note.clone(),
        }
    }

    pub fn from_descriptor(d: &FamilyDescriptor) -> Result<Self> {
        let v = d.v.unwrap_or(Vec3::ZERO);
        let opts = FamilyOptions {
            bbox: Some(d.domain_box),
            strict_printed: false,
        };
        make_family_with(d.theorem, d.case, d.sig, v, &d.constants, &opts)
    }
}

impl ScalarField for SolutionFamily {
    fn value(&self, s: f64, t: f64) -> f64 {
        self.eval(s, t).unwrap_or(f64::NAN)
    }
    fn in_domain(&self, s: f64, t: f64) -> bool {
        self.domain(s, t)
    }
    fn gradient(&self, s: f64, t: f64) -> Option<(f64, f64)> {
        self.grad(s, t).ok()
    }
    fn hessian(&self, s: f64, t: f64) -> Option<[f64; 3]> {
        self.jet(s, t).ok().map(|j| [j.uss, j.ust, j.utt])
    }
}

pub fn subject_id(theorem: TheoremId, case: u8) -> String {
    format!("{}/case{}", theorem.label(), case)
}

/// Parses `thm2/case5` (or `thm2/5`).
pub fn parse_subject(s: &str) -> Result<(TheoremId, u8)> {
    let (t, c) = s
        .split_once('/')
        .ok_or_else(|| Error::InvalidConstant(format!("subject '{s}' is not of the form thmN/caseK")))?;
    let theorem: TheoremId = t.parse()?;
    let case: u8 = c
        .trim_start_matches("case")
        .parse()
        .map_err(|_| Error::InvalidConstant(format!("bad case in '{s}'")))?;
    if !theorem.cases().contains(&case) {
        return Err(Error::InvalidConstant(format!("{theorem} has no case {case}")));
    }
    Ok((theorem, case))
}

/// Every theorem case, in report order.
pub fn all_subjects() -> Vec<(TheoremId, u8)> {
    TheoremId::ALL
        .into_iter()
        .flat_map(|t| t.cases().map(move |c| (t, c)))
        .collect()
}

fn validate_box(b: [f64; 4]) -> Result<()> {
    if b.iter().all(|x| x.is_finite()) && b[0] < b[1] && b[2] < b[3] {
        Ok(())
    } else {
        Err(Error::InvalidGrid(format!("bad box {b:?}")))
    }
}

/// Canonical direction vector and constants used by the suite for each case.
pub fn default_parameters(theorem: TheoremId, case: u8) -> (Vec3, Constants) {
    use TheoremId::*;
    let s2 = 2f64.sqrt();
    let c = Constants::new();
    match (theorem, case) {
        (Thm1, 1) => (Vec3::new(0.0, 0.6, 0.8), c),
        (Thm1, 2) => (Vec3::new(0.6, 0.0, 0.8), c),
        (Thm1, _) => (Vec3::new(0.48, 0.6, 0.64), c),
        (Thm2, 1) => (Vec3::E3, c),
        (Thm2, 2) => (Vec3::new(0.0, 0.6, 0.8), c),
        (Thm2, 3) => (Vec3::new(0.6, 0.8, 0.0), c.with("lambda2", 1.0)),
        (Thm2, 4) => (Vec3::new(0.6, 0.0, 0.8), c.with("lambda4", 0.5)),
        (Thm2, _) => (Vec3::new(0.48, 0.6, 0.64), c),
        (Thm3, _) => (Vec3::new(0.0, 0.6, 0.8), c.with("offset", 0.5)),
        (Thm4, 1) => (Vec3::new(0.0, s2, 1.0), c),
        (Thm4, 2) => (Vec3::new(s2, 0.0, 1.0), c),
        (Thm4, _) => (Vec3::new(1.0, 1.0, 1.0), c.with("lambda5", 0.5)),
        (Thm5, 1) => (Vec3::new(0.6, 0.8, 0.0), c.with("offset", 0.25)),
        (Thm5, 2) => (Vec3::new(0.0, s2, 1.0), c),
        (Thm5, 3) => (Vec3::new(0.6, 0.8, 0.0), c.with("lambda3", 0.5)),
        (Thm5, 4) => (Vec3::new(s2, 0.0, 1.0), c.with("lambda5", 0.5)),
        (Thm5, 5) => (Vec3::new(0.5, 1.0, 0.5), c.with("lambda7", 0.25)),
        (Thm5, _) => (Vec3::new(0.8, 0.72f64.sqrt(), 0.6), c),
        (Thm6, _) => (Vec3::new(0.0, s2, 1.0), c.with("mu", 1.0)),
        (Prop1, _) => (Vec3::new(0.6, 0.0, 0.8), c.with("mu", 0.3)),
        (Prop2, _) => (Vec3::E1, c.with("mu", 0.4)),
        (ScherkLC, _) => (Vec3::ZERO, c.with("lambda1", 1.0)),
        (AffineScherkLC, _) => (Vec3::ZERO, c.with("lambda1", 1.0).with("lambda2", 0.5)),
    }
}

fn default_box(theorem: TheoremId, case: u8, lambda1: f64) -> [f64; 4] {
    use TheoremId::*;
    match (theorem, case) {
        (Thm2, 3) => [-1.0, 1.0, -0.2, 1.0],
        (Thm2, 4) => [-0.5, 0.5, 0.0, 1.0],
        (Thm2, 5) => [-0.3, 0.3, 0.2, 1.2],
        (Thm5, 6) => [-0.2, 0.2, -0.35, -0.1],
        (ScherkLC, _) => {
            let w = 0.9 * std::f64::consts::FRAC_PI_2 / lambda1.abs();
            [-w, w, -w, w]
        }
        (AffineScherkLC, _) => {
            let w = 0.8 * std::f64::consts::FRAC_PI_2 / lambda1.abs();
            [-w, w, -0.6 * w, 0.6 * w]
        }
        _ => [-1.0, 1.0, -1.0, 1.0],
    }
}

/// The case's canonical family.
pub fn default_family(theorem: TheoremId, case: u8) -> Result<SolutionFamily> {
    let (v, c) = default_parameters(theorem, case);
    make_family(theorem, case, theorem.signature(), v, &c)
}

pub fn make_family(
    theorem: TheoremId,
    case: u8,
    sig: Signature,
    v: Vec3,
    constants: &Constants,
) -> Result<SolutionFamily> {
    make_family_with(theorem, case, sig, v, constants, &FamilyOptions::default())
}

fn pattern(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidDirectionPattern(what.to_string()))
    }
}

fn nonzero(x: f64, name: &str) -> Result<f64> {
    if x.abs() > ZERO {
        Ok(x)
    } else {
        Err(Error::InvalidConstant(format!("{name} must be nonzero")))
    }
}

struct Draft {
    shape: Shape,
    printed: PrintedSign,
    note: String,
    /// Replacement tried when the printed shape fails the probe.
    corrected: Option<(Shape, String)>,
}

fn single(
    alpha: f64,
    beta: f64,
    gamma: f64,
    dir: (f64, f64),
    linear: f64,
    profile: Profile,
    printed: PrintedSign,
) -> Draft {
    Draft {
        shape: Shape {
            alpha,
            beta,
            gamma,
            terms: vec![Term {
                dir,
                linear,
                signed: true,
                profile,
            }],
        },
        printed,
        note: String::new(),
        corrected: None,
    }
}

fn plane_draft(axis: GraphAxis, v: Vec3, offset: f64, mu: f64) -> Result<Draft> {
    let (p, q, r) = constraint_coefficients(axis, v);
    let n2 = p * p + q * q;
    if n2 <= ZERO {
        return Err(Error::InvalidDirectionPattern(format!(
            "v is normal to the chart plane of {}",
            axis.label()
        )));
    }
    Ok(Draft {
        shape: Shape {
            alpha: r * p / n2 - mu * q,
            beta: r * q / n2 + mu * p,
            gamma: offset,
            terms: Vec::new(),
        },
        printed: PrintedSign::NotApplicable,
        note: String::new(),
        corrected: None,
    })
}

/// `(p, q, r)` with the axis constraint `p u_s + q u_t = r`.
pub fn constraint_coefficients(axis: GraphAxis, v: Vec3) -> (f64, f64, f64) {
    match axis {
        GraphAxis::ZofXY => (v.x, v.y, v.z),
        GraphAxis::YofXZ => (v.x, v.z, v.y),
        GraphAxis::XofYZ => (v.y, v.z, v.x),
    }
}

/// Plane graph containing the direction `v`. `mu` moves the gradient along
/// the chart direction orthogonal to the constraint; the suite uses 0 unless
/// the causal character requires otherwise.
pub fn plane_family(
    sig: Signature,
    axis: GraphAxis,
    kind: ConnectionKind,
    v: Vec3,
    offset: f64,
    mu: f64,
) -> Result<SolutionFamily> {
    let dv = DirectionVector::new(sig, v)?;
    let draft = plane_draft(axis, v, offset, mu)?;
    let theorem = match (sig, kind) {
        (Signature::Euclidean, ConnectionKind::SemiSymNonMetric) => TheoremId::Thm3,
        (Signature::Lorentzian, ConnectionKind::SemiSymNonMetric) => TheoremId::Thm6,
        (Signature::Euclidean, _) => TheoremId::Prop1,
        (Signature::Lorentzian, _) => TheoremId::Prop2,
    };
    let constants = Constants::new().with("offset", offset).with("mu", mu);
    finish(
        theorem,
        1,
        sig,
        axis,
        kind,
        Some(dv),
        constants,
        draft,
        [-1.0, 1.0, -1.0, 1.0],
        false,
    )
}

pub fn make_family_with(
    theorem: TheoremId,
    case: u8,
    sig: Signature,
    v: Vec3,
    constants: &Constants,
    opts: &FamilyOptions,
) -> Result<SolutionFamily> {
    use TheoremId::*;
    if !theorem.cases().contains(&case) {
        return Err(Error::InvalidConstant(format!("{theorem} has no case {case}")));
    }
    if sig != theorem.signature() {
        return Err(Error::UnsupportedConfiguration(format!(
            "{theorem} is stated in {} space",
            theorem.signature().label()
        )));
    }
    constants.validate()?;
    let axis = theorem.axis();
    let kind = theorem.kind();
    let controls = matches!(theorem, ScherkLC | AffineScherkLC);
    let dv = if controls {
        None
    } else {
        Some(DirectionVector::new(sig, v)?)
    };
    let l = |i: usize| constants.lambda(i);
    let Vec3 { x: a, y: b, z: c } = v;
    let (aa, bb, cc) = (a.abs() > ZERO, b.abs() > ZERO, c.abs() > ZERO);
    let plus = PrintedSign::Plus;
    let pm = PrintedSign::PlusMinus;
    let offset = constants.get("offset", 0.0);
    let mu = constants.get("mu", 0.0);

    let draft = match (theorem, case) {
        (Thm1, 1) | (Thm4, 1) => {
            pattern(!aa && bb, "case requires a = 0, b != 0")?;
            let profile = log_profile(sig, 1.0 / (2.0 * b * b), 2.0 * b, l(1));
            single(0.0, c / b, l(2), (1.0, 0.0), 0.0, profile, plus)
        }
        (Thm1, 2) | (Thm4, 2) => {
            pattern(aa && !bb, "case requires a != 0, b = 0")?;
            let profile = log_profile(sig, 1.0 / (2.0 * a * a), 2.0 * a, l(3));
            single(c / a, 0.0, l(4), (0.0, 1.0), 0.0, profile, plus)
        }
        (Thm1, _) | (Thm4, _) => {
            pattern(aa && bb, "case requires ab != 0")?;
            let s2 = a * a + b * b;
            let amp = match sig {
                Signature::Euclidean => -1.0 / (2.0 * s2),
                Signature::Lorentzian => {
                    nonzero(l(5), "lambda5")?;
                    1.0 / (2.0 * s2)
                }
            };
            let profile = log_profile(sig, amp, -2.0 * a.abs(), l(5));
            single(c / a, 0.0, l(6), (-b / a, 1.0), b * c / s2, profile, plus)
        }
        (Thm2, 1) => {
            pattern(!aa && !bb, "case requires v = (0, 0, +-1)")?;
            plane_draft(axis, v, offset, mu)?
        }
        (Thm2, 2) | (Thm5, 2) => {
            pattern(!aa && bb && cc, "case requires a = 0, bc != 0")?;
            let profile = log_profile(sig, 1.0 / (2.0 * b * c), 2.0 * b, l(1));
            single(0.0, b / c, l(2), (1.0, 0.0), 0.0, profile, plus)
        }
        (Thm2, 3) => {
            pattern(aa && !cc, "case requires a != 0, c = 0")?;
            let l2 = nonzero(l(2), "lambda2")?;
            let profile = Profile::ArctanSqrtExp {
                amp: 1.0 / (2.0 * a.abs()),
                k: 1.0 / (a * l2).abs(),
                r: 4.0,
                m: a * a,
            };
            single(b / a, 0.0, l(3), (0.0, 1.0), 0.0, profile, pm)
        }
        (Thm2, 4) => {
            pattern(aa && !bb && cc, "case requires b = 0, ac != 0")?;
            let l4 = nonzero(l(4), "lambda4")?;
            let profile = Profile::ArctanSqrtExp {
                amp: 1.0 / (2.0 * a.abs()),
                k: 1.0 / l4.abs(),
                r: 4.0 * a * a,
                m: l4 * l4,
            };
            single(0.0, 0.0, l(5), (-c / a, 1.0), 0.0, profile, pm)
        }
        (Thm2, _) => {
            pattern(aa && cc, "case requires ac != 0")?;
            let (abs_a, bc) = (a.abs(), b * c);
            let printed_k = 1.0 / (2.0 * abs_a * (a * a + c * c) * (a * a + bc * bc));
            let k = (a * a + c * c) / (2.0 * abs_a * (a * a + bc * bc));
            let build = |k: f64| -> Result<Draft> {
                let rel =
                    ImplicitRelation::new(Trig::Circular, k * bc, -k * abs_a, bc, -abs_a, l(7), 2.0 * abs_a, l(6))?;
                Ok(single(
                    b / a,
                    0.0,
                    0.0,
                    (-c / a, 1.0),
                    0.0,
                    Profile::Implicit(rel),
                    PrintedSign::NotApplicable,
                ))
            };
            let mut d = build(printed_k)?;
            if !opts.strict_printed {
                let fixed = build(k)?;
                d.corrected = Some((
                    fixed.shape,
                    "printed prefactor 1/(2|a|(a^2+c^2)(a^2+b^2c^2)) fails the equation; \
                     prefactor (a^2+c^2)/(2|a|(a^2+b^2c^2)) from integrating the first integral is used"
                        .to_string(),
                ));
            }
            d
        }
        (Thm5, 1) => {
            pattern(aa && !cc, "case requires a != 0, c = 0")?;
            plane_draft(axis, v, offset, mu)?
        }
        (Thm5, 3) => {
            pattern(aa && !cc, "case requires a != 0, c = 0")?;
            let l3 = nonzero(l(3), "lambda3")?;
            let profile = Profile::AsinhExp {
                amp: 1.0 / (2.0 * a.abs()),
                q0: l3,
                r: 2.0,
            };
            single(b / a, 0.0, l(4), (0.0, 1.0), 0.0, profile, pm)
        }
        (Thm5, 4) => {
            pattern(aa && !bb && cc, "case requires b = 0, ac != 0")?;
            let l5 = nonzero(l(5), "lambda5")?;
            let profile = Profile::AsinhExp {
                amp: 1.0 / (2.0 * a.abs()),
                q0: l5.abs(),
                r: 2.0 * a * a,
            };
            single(0.0, 0.0, l(6), (-c / a, 1.0), 0.0, profile, pm)
        }
        (Thm5, 5) => {
            pattern(
                cc && (b.abs() - 1.0).abs() <= ZERO && (a.abs() - c.abs()).abs() <= ZERO,
                "case requires b = +-1, a = +-c, c != 0",
            )?;
            let l7 = nonzero(l(7), "lambda7")?;
            let profile = Profile::LogOnePlusExp {
                amp: 1.0 / (4.0 * c),
                k: 2.0 * l7,
                r: 2.0 * (1.0 + c * c),
            };
            single(b / a, 0.0, l(8), (-c / a, 1.0), 0.0, profile, pm)
        }
        (Thm5, _) => {
            pattern(aa && bb && cc, "case requires abc != 0")?;
            let (abs_a, bc) = (a.abs(), b * c);
            let den = 2.0 * abs_a * (bc * bc - a * a);
            if den.abs() <= ZERO {
                return Err(Error::InvalidConstant("relation requires b^2c^2 != a^2".into()));
            }
            let k = (c * c - a * a) / den;
            let rel = ImplicitRelation::new(
                Trig::Hyperbolic,
                k * bc,
                k * abs_a,
                bc,
                -abs_a,
                l(10),
                2.0 * abs_a,
                l(9),
            )?;
            single(
                b / a,
                0.0,
                0.0,
                (-c / a, 1.0),
                0.0,
                Profile::Implicit(rel),
                PrintedSign::NotApplicable,
            )
        }
        (Thm3, _) | (Thm6, _) | (Prop1, _) | (Prop2, _) => plane_draft(axis, v, offset, mu)?,
        (ScherkLC, _) => {
            let lam = nonzero(l(1), "lambda1")?;
            let t = |dir, amp, omega| Term {
                dir,
                linear: 0.0,
                signed: false,
                profile: Profile::LogAbsCos { amp, omega, phase: 0.0 },
            };
            Draft {
                shape: Shape {
                    alpha: 0.0,
                    beta: 0.0,
                    gamma: 0.0,
                    terms: vec![t((1.0, 0.0), 1.0 / lam, lam), t((0.0, 1.0), -1.0 / lam, lam)],
                },
                printed: PrintedSign::NotApplicable,
                note: String::new(),
                corrected: None,
            }
        }
        (AffineScherkLC, _) => {
            let lam = nonzero(l(1), "lambda1")?;
            let m = l(2);
            let t = |dir, amp, omega| Term {
                dir,
                linear: 0.0,
                signed: false,
                profile: Profile::LogAbsCos { amp, omega, phase: 0.0 },
            };
            Draft {
                shape: Shape {
                    alpha: 0.0,
                    beta: 0.0,
                    gamma: 0.0,
                    terms: vec![
                        t((1.0, 0.0), 1.0 / lam, lam * (1.0 + m * m).sqrt()),
                        t((m, 1.0), -1.0 / lam, lam),
                    ],
                },
                printed: PrintedSign::NotApplicable,
                note: String::new(),
                corrected: None,
            }
        }
    };
    let bbox = opts.bbox.unwrap_or_else(|| default_box(theorem, case, l(1)));
    validate_box(bbox)?;
    finish(
        theorem,
        case,
        sig,
        axis,
        kind,
        dv,
        constants.clone(),
        draft,
        bbox,
        opts.strict_printed,
    )
}

fn log_profile(sig: Signature, amp: f64, omega: f64, phase: f64) -> Profile {
    match sig {
        Signature::Euclidean => Profile::LogCos { amp, omega, phase },
        Signature::Lorentzian => Profile::LogCosh { amp, omega, phase },
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    theorem: TheoremId,
    case: u8,
    sig: Signature,
    axis: GraphAxis,
    kind: ConnectionKind,
    v: Option<DirectionVector>,
    constants: Constants,
    draft: Draft,
    bbox: [f64; 4],
    strict: bool,
) -> Result<SolutionFamily> {
    let subject = subject_id(theorem, case);
    let mut fam = SolutionFamily {
        theorem,
        case,
        sig,
        axis,
        kind,
        v,
        constants,
        sigma: 1.0,
        meta: FamilyMeta {
            printed_sign: draft.printed,
            paper_sign_agrees: true,
            printed_form_agrees: true,
            note: draft.note,
            probe_residual: 0.0,
        },
        bbox,
        shape: draft.shape,
    };
    match resolve_sigma(&mut fam) {
        Ok(()) => Ok(fam),
        Err(Error::NoBranchSatisfiesPde { best, .. }) => match draft.corrected {
            Some((shape, note)) if !strict => {
                fam.shape = shape;
                resolve_sigma(&mut fam)?;
                fam.meta.printed_form_agrees = false;
                fam.meta.note = format!("{note} (printed form best probe residual {best:.3e})");
                Ok(fam)
            }
            _ => Err(Error::NoBranchSatisfiesPde { subject, best }),
        },
        Err(e) => Err(e),
    }
}

/// Deterministic 5x5 probe lattice inset 10% into the box.
pub fn probe_points(bbox: [f64; 4]) -> Vec<(f64, f64)> {
    let [s0, s1, t0, t1] = bbox;
    let (ds, dt) = (s1 - s0, t1 - t0);
    let mut pts = Vec::with_capacity(25);
    for i in 0..5 {
        for j in 0..5 {
            let fs = 0.1 + 0.8 * i as f64 / 4.0;
            let ft = 0.1 + 0.8 * j as f64 / 4.0;
            pts.push((s0 + fs * ds, t0 + ft * dt));
        }
    }
    pts
}

/// Largest scaled probe residual (minimality and constraint combined against
/// their tolerances), or `None` when no probe point lies in the domain.
fn probe(fam: &SolutionFamily) -> Result<Option<f64>> {
    let mut worst: Option<f64> = None;
    for (s, t) in probe_points(fam.bbox) {
        if !fam.domain(s, t) {
            continue;
        }
        let j = fam.jet(s, t)?;
        let scale = 1.0 + j.derivative_magnitude();
        let m = minimality_residual_from_jet(fam.axis, fam.kind, fam.sig, &j)?.abs() / (PROBE_MINIMALITY_TOL * scale);
        let c = fam
            .v
            .map(|v| constraint_residual_from_jet(fam.axis, v.vec(), &j).abs() / (PROBE_CONSTRAINT_TOL * scale))
            .unwrap_or(0.0);
        let r = if m.is_nan() || c.is_nan() {
            f64::INFINITY
        } else {
            m.max(c)
        };
        worst = Some(worst.map_or(r, |w: f64| w.max(r)));
    }
    Ok(worst)
}

fn resolve_sigma(fam: &mut SolutionFamily) -> Result<()> {
    let signed = fam.shape.terms.iter().any(|t| t.signed);
    let branches: &[f64] = if signed { &[1.0, -1.0] } else { &[1.0] };
    let mut best = f64::INFINITY;
    for &sg in branches {
        fam.sigma = sg;
        let worst = probe(fam)?.ok_or(Error::EmptyGrid)?;
        if worst <= 1.0 {
            fam.meta.probe_residual = worst;
            fam.meta.paper_sign_agrees = match fam.meta.printed_sign {
                PrintedSign::Plus => sg > 0.0,
                _ => true,
            };
            return Ok(());
        }
        best = best.min(worst);
    }
    Err(Error::NoBranchSatisfiesPde {
        subject: fam.subject(),
        best,
    })
}
