//! Witnesses against strong semisimplicity.
//!
//! From a rationally outgoing certificate `(x, u, λ, S, F)` we build
//! McNaughton functions `f, g` with `Zf = F` and `Zg = S`; on `X` their zero
//! sets agree, yet `f` is not dominated by any multiple of `g`. The pullback
//! turns a 1-tangent of `η(X)` into a certificate for `X`.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{build_c_simplex, CSimplexSpec, ExactFrame, NumericFrame, Simplex};
use crate::mcnaughton::{extend_from_vertices, DominanceCheck, ZMap};
use crate::rational::{format_rational, rational_vec, rationalize, Point, Rational};
use crate::report::{Check, Report};
use crate::tangents::{
    check_rationally_outgoing, detect_k_tangent, faces_meet_x_equally, geometric_checks,
    tangent_simplex_search, ClosedSet, PointSequence, SimplexTester, TangentCertificate,
    DEFAULT_TOL,
};
use crate::triangulation::{
    cube_triangulation, subdivide_with_subpolyhedron, Polyhedron, SimplicialComplex,
};

/// Default number of multiples tried by `refute_ideal_membership`.
pub const DEFAULT_M_MAX: u64 = 64;
/// `‖A·w‖` at or below this counts as zero.
pub const ZERO_IMAGE_TOL: f64 = 1e-9;
/// `‖A·w‖` at or above this counts as nonzero.
pub const NONZERO_IMAGE_TOL: f64 = 1e-6;
/// Denominator bound when rationalizing numeric directions.
pub const RATIONALIZE_DEN: u64 = 1_000_000;

/// McNaughton functions `f` (vanishing exactly on `F`) and `g` (vanishing
/// exactly on `S`) over a shared regular triangulation of the cube.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessPair {
    pub carrier: SimplicialComplex,
    pub f: ZMap,
    pub g: ZMap,
    pub cert: TangentCertificate,
}

fn indicator_values(carrier: &SimplicialComplex, zero_on: &Simplex) -> Vec<Point> {
    let t = SimplexTester::new(zero_on);
    carrier
        .vertices()
        .iter()
        .map(|v| Point::from_ints(&[if t.contains(v) { 0 } else { 1 }]))
        .collect()
}

pub fn build_witness(cert: &TangentCertificate, n: usize) -> Result<WitnessPair> {
    if cert.dim() != n {
        return Err(Error::MalformedCertificate(format!(
            "certificate lives in dimension {}, not {n}",
            cert.dim()
        )));
    }
    let failed: Vec<String> = geometric_checks(cert)?
        .into_iter()
        .filter(|c| !c.passed)
        .map(|c| format!("({}) {}: {}", c.name, c.anchor, c.detail))
        .collect();
    if !failed.is_empty() {
        return Err(Error::Precondition(failed.join("; ")));
    }
    if cert.f == cert.s {
        return Err(Error::Precondition(
            "F = S: the zero sets of f and g would coincide".into(),
        ));
    }
    let inside = |s: &Simplex| s.vertices().iter().all(Point::in_unit_cube);
    if !inside(&cert.s) || !inside(&cert.f) {
        return Err(Error::Precondition(
            "certificate geometry lies outside the unit cube".into(),
        ));
    }
    let cube = cube_triangulation(n);
    let with_s = subdivide_with_subpolyhedron(&cube, &Polyhedron::from_simplex(cert.s.clone()))?;
    let carrier = subdivide_with_subpolyhedron(&with_s, &Polyhedron::from_simplex(cert.f.clone()))?;
    let f = extend_from_vertices(carrier.clone(), indicator_values(&carrier, &cert.f))?;
    let g = extend_from_vertices(carrier.clone(), indicator_values(&carrier, &cert.s))?;
    let pair = WitnessPair {
        carrier,
        f,
        g,
        cert: cert.clone(),
    };
    pair.verify_zero_sets()?;
    Ok(pair)
}

impl WitnessPair {
    /// Exact re-verification of `Zf = F` and `Zg = S`.
    pub fn verify_zero_sets(&self) -> Result<()> {
        if !self
            .f
            .zero_set()
            .same_set(&Polyhedron::from_simplex(self.cert.f.clone()))
        {
            return Err(Error::Inconsistent("zero set of f differs from F".into()));
        }
        if !self
            .g
            .zero_set()
            .same_set(&Polyhedron::from_simplex(self.cert.s.clone()))
        {
            return Err(Error::Inconsistent("zero set of g differs from S".into()));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    carrier: SimplicialComplex,
    f: BTreeMap<usize, Point>,
    g: BTreeMap<usize, Point>,
    cert: TangentCertificate,
}

impl Serialize for WitnessPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawPair {
            carrier: self.carrier.clone(),
            f: self.f.values().iter().cloned().enumerate().collect(),
            g: self.g.values().iter().cloned().enumerate().collect(),
            cert: self.cert.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WitnessPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawPair::deserialize(d)?;
        let n = raw.carrier.vertices().len();
        if raw.f.len() != n || raw.g.len() != n || raw.f.keys().chain(raw.g.keys()).any(|&k| k >= n)
        {
            return Err(D::Error::custom(format!(
                "f and g need one value for each of the {n} carrier vertices"
            )));
        }
        let f = extend_from_vertices(raw.carrier.clone(), raw.f.into_values().collect())
            .map_err(D::Error::custom)?;
        let g = extend_from_vertices(raw.carrier.clone(), raw.g.into_values().collect())
            .map_err(D::Error::custom)?;
        if !f.is_mcnaughton() || !g.is_mcnaughton() {
            return Err(D::Error::custom("f and g must take values in [0,1]"));
        }
        Ok(WitnessPair {
            carrier: raw.carrier,
            f,
            g,
            cert: raw.cert,
        })
    }
}

/// `X ∩ Z₁ = X ∩ Z₂` for two zero sets given as polyhedra and as pointwise
/// predicates.
fn same_trace(
    x: &ClosedSet,
    z1: &Polyhedron,
    in1: impl Fn(&Point) -> Result<bool>,
    z2: &Polyhedron,
    in2: impl Fn(&Point) -> Result<bool>,
) -> Result<std::result::Result<(), String>> {
    if let Some(q) = x.polyhedral_part() {
        let a = q.intersect(z1)?;
        let b = q.intersect(z2)?;
        if !a.same_set(&b) {
            return Ok(Err(format!("polyhedral part: {a:?} versus {b:?}")));
        }
    }
    for p in x.isolated_points() {
        let (a, b) = (in1(p)?, in2(p)?);
        if a != b {
            return Ok(Err(format!("point {p}: {a} versus {b}")));
        }
    }
    Ok(Ok(()))
}

fn trace_check(name: &str, anchor: &str, r: std::result::Result<(), String>) -> Check {
    match r {
        Ok(()) => Check::new(name, anchor, true, "equal"),
        Err(why) => Check::new(name, anchor, false, why),
    }
}

/// The chain `X∩Zf = X∩F = X∩S = X∩Zg`; the verdict is the end-to-end
/// equality `X∩Zf = X∩Zg`.
pub fn verify_crux(pair: &WitnessPair, x: &ClosedSet) -> Result<Report> {
    if x.dim() != pair.f.domain_dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.f.domain_dim(),
            got: x.dim(),
        });
    }
    let zf = pair.f.zero_set();
    let zg = pair.g.zero_set();
    let fpoly = Polyhedron::from_simplex(pair.cert.f.clone());
    let spoly = Polyhedron::from_simplex(pair.cert.s.clone());
    let ft = SimplexTester::new(&pair.cert.f);
    let st = SimplexTester::new(&pair.cert.s);
    let f_zero = |p: &Point| pair.f.vanishes_at(p);
    let g_zero = |p: &Point| pair.g.vanishes_at(p);

    let first = same_trace(x, &zf, f_zero, &fpoly, |p| Ok(ft.contains(p)))?;
    let middle = faces_meet_x_equally(&pair.cert.s, &pair.cert.f, x)?;
    let last = same_trace(x, &spoly, |p| Ok(st.contains(p)), &zg, g_zero)?;
    let direct = same_trace(x, &zf, f_zero, &zg, g_zero)?;
    let verdict = direct.is_ok();
    let checks = vec![
        trace_check("zf-f", "X ∩ Zf = X ∩ F", first),
        trace_check("f-s", "X ∩ F = X ∩ S", middle),
        trace_check("s-zg", "X ∩ S = X ∩ Zg", last),
        trace_check("zf-zg", "X ∩ Zf = X ∩ Zg", direct),
    ];
    let mut report = Report::from_checks(checks);
    if report.verdict != verdict {
        report.verdict = verdict;
        report.summary = format!(
            "{} (verdict from X ∩ Zf = X ∩ Zg)\n{}",
            if verdict { "PASS" } else { "FAIL" },
            report.summary
        );
    }
    Ok(report)
}

/// One refuted multiple: `f(p) > m·g(p)` at `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refutation {
    pub m: u64,
    pub witness: Point,
    #[serde(with = "crate::rational::rational_str")]
    pub f: Rational,
    #[serde(with = "crate::rational::rational_str")]
    pub g: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefutationReport {
    pub m_max: u64,
    pub refutations: Vec<Refutation>,
    /// Multiples for which `f ≤ m·g` held on X.
    pub unrefuted: Vec<u64>,
    pub refuted_up_to_m_max: bool,
    pub summary: String,
}

/// Try `f ≤ m·g` on `X` for `m = 1..=m_max`, recording a violating point
/// for every refuted multiple.
pub fn refute_ideal_membership(
    pair: &WitnessPair,
    x: &ClosedSet,
    m_max: u64,
) -> Result<RefutationReport> {
    let check = DominanceCheck::new(&pair.f, &pair.g, x)?;
    let mut refutations = Vec::new();
    let mut unrefuted = Vec::new();
    for m in 1..=m_max {
        match check.violation(m) {
            Some((p, f, g)) => refutations.push(Refutation {
                m,
                witness: p.clone(),
                f: f.clone(),
                g: g.clone(),
            }),
            None => unrefuted.push(m),
        }
    }
    let all = unrefuted.is_empty() && m_max > 0;
    let summary = if all {
        format!("refuted up to m_max = {m_max}: f exceeds m·g on X for every m ≤ {m_max}")
    } else {
        format!("not refuted for m in {unrefuted:?}")
    };
    Ok(RefutationReport {
        m_max,
        refutations,
        unrefuted,
        refuted_up_to_m_max: all,
        summary,
    })
}

/// Outcome of pulling a 1-tangent of `η(X)` back to `X`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PullbackResult {
    /// Limit of the preimage sequence.
    pub z: Point,
    pub k: usize,
    /// Numeric directions `w_1, …, w_k`.
    pub frame: NumericFrame,
    /// `‖A·w_j‖` for every level.
    pub image_norms: Vec<f64>,
    /// The carrier cell `T` holding most of the tail.
    #[serde(rename = "T")]
    pub cell: Simplex,
    #[serde(rename = "A", serialize_with = "ser_int_matrix")]
    pub a: Vec<Vec<BigInt>>,
    #[serde(serialize_with = "ser_int_vec")]
    pub b: Vec<BigInt>,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_frame: Option<ExactFrame>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_rational"
    )]
    pub kappa: Option<Rational>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_rational_vec"
    )]
    pub lambda: Option<Vec<Rational>>,
    /// `η(C_{z,w,λ}) ⊆ conv(x, x+εu)`, exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_in_segment: Option<bool>,
    /// Largest distance of an image vertex from the segment, numerically.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<TangentCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Report>,
    pub note: String,
}

fn ser_int_matrix<S: Serializer>(m: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m
        .iter()
        .map(|r| r.iter().map(BigInt::to_string).collect())
        .collect();
    rows.serialize(s)
}

fn ser_int_vec<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    let items: Vec<String> = v.iter().map(BigInt::to_string).collect();
    items.serialize(s)
}

fn ser_opt_rational<S: Serializer>(
    q: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    q.as_ref().map(format_rational).serialize(s)
}

fn ser_opt_rational_vec<S: Serializer>(
    v: &Option<Vec<Rational>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => rational_vec::serialize(v, s),
        None => s.serialize_none(),
    }
}

/// Inputs of `pullback_tangent`.
#[derive(Clone, Debug)]
pub struct PullbackInput<'a> {
    pub eta: &'a ZMap,
    pub x_set: &'a ClosedSet,
    /// A sequence in `X` whose image is the tangent sequence in `η(X)`.
    pub seq: &'a PointSequence,
    /// Direction `u` of the 1-tangent of `η(X)` at `x`.
    pub u: &'a Point,
    pub eps: &'a Rational,
    pub x: &'a Point,
}

fn on_segment(p: &Point, x: &Point, end: &Point) -> bool {
    if p == x {
        return true;
    }
    Simplex::new(vec![x.clone(), end.clone()]).is_ok_and(|s| s.contains(p))
}

/// Check `conv(x, x+εu) ∩ η(X) = {x}` on the representation of `X`.
fn check_isolated_segment(eta: &ZMap, x_set: &ClosedSet, x: &Point, end: &Point) -> Result<()> {
    let seg = Polyhedron::from_simplex(Simplex::new(vec![x.clone(), end.clone()])?);
    if let Some(q) = x_set.polyhedral_part() {
        let over_seg = eta.preimage_polyhedron(&seg)?.intersect(q)?;
        let over_x = eta
            .preimage_polyhedron(&Polyhedron::from_simplex(Simplex::point(x.clone())))?
            .intersect(q)?;
        if !over_seg.same_set(&over_x) {
            return Err(Error::Precondition(
                "the image of the polyhedral part of X meets conv(x, x+εu) outside x".into(),
            ));
        }
    }
    for p in x_set.isolated_points() {
        let y = eta.evaluate(p).map_err(|_| {
            Error::Precondition(format!("point {p} of X is outside the domain of η"))
        })?;
        if &y != x && on_segment(&y, x, end) {
            return Err(Error::Precondition(format!(
                "η({p}) = {y} lies on conv(x, x+εu)"
            )));
        }
    }
    Ok(())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Rational approximation of a numeric direction, scaled so its largest
/// coordinate has absolute value 1.
fn rationalize_direction(w: &[f64]) -> Point {
    let scale = w.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    Point::new(
        w.iter()
            .map(|c| rationalize(c / scale, RATIONALIZE_DEN))
            .collect(),
    )
}

/// Gram–Schmidt over the rationals, without normalization.
fn exact_gram_schmidt(ws: &[Point]) -> Option<Vec<Point>> {
    let mut out: Vec<Point> = Vec::new();
    for w in ws {
        let mut v = w.clone();
        for u in &out {
            let c = v.dot(u) / u.dot(u);
            v = v.add_scaled(&-c, u);
        }
        if v.is_zero() {
            return None;
        }
        out.push(v);
    }
    Some(out)
}

/// Smallest face of `t` containing every point of `pts`.
fn smallest_face_containing(t: &Simplex, pts: &[Point]) -> Result<Simplex> {
    let mut support = vec![false; t.vertices().len()];
    for p in pts {
        let w = t
            .barycentric(p)?
            .ok_or_else(|| Error::NotInSimplex(p.clone()))?;
        for (s, wi) in support.iter_mut().zip(&w) {
            *s |= wi.is_positive();
        }
    }
    Ok(t.face_where(|i| support[i]))
}

/// Lift the 1-tangent `u` of `η(X)` at `x` to a `k`-tangent of `X` and, when
/// the numeric frame rationalizes, to a verified certificate.
pub fn pullback_tangent(input: &PullbackInput<'_>) -> Result<PullbackResult> {
    let PullbackInput {
        eta,
        x_set,
        seq,
        u,
        eps,
        x,
    } = *input;
    let n = eta.domain_dim();
    let m = eta.codomain_dim();
    if x.dim() != m || u.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: if x.dim() != m { x.dim() } else { u.dim() },
        });
    }
    if seq.dim() != n || x_set.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if seq.dim() != n {
                seq.dim()
            } else {
                x_set.dim()
            },
        });
    }
    if !eps.is_positive() || u.is_zero() {
        return Err(Error::Precondition(
            "ε must be positive and u nonzero".into(),
        ));
    }
    let z = seq.limit().clone();
    if &eta.evaluate(&z)? != x {
        return Err(Error::Precondition(format!(
            "η maps the sequence limit {z} to {}, not to x",
            eta.evaluate(&z)?
        )));
    }
    let members: HashSet<&Point> = x_set.isolated_points().collect();
    let in_x = |p: &Point| {
        members.contains(p) || x_set.polyhedral_part().is_some_and(|q| q.contains_point(p))
    };
    if let Some(p) = seq.points().iter().chain([&z]).find(|p| !in_x(p)) {
        return Err(Error::Precondition(format!(
            "sequence point {p} is not in X"
        )));
    }
    let images: Vec<Point> = seq
        .points()
        .iter()
        .map(|p| eta.evaluate(p))
        .collect::<Result<_>>()?;
    if images.iter().any(|y| y == x) {
        return Err(Error::Precondition(
            "η collapses sequence points onto x, so η(X) has no 1-tangent sequence here".into(),
        ));
    }
    let end = x.add_scaled(eps, u);
    check_isolated_segment(eta, x_set, x, &end)?;

    // Step 1: make η⁻¹(x) and η⁻¹(conv(x, x+εu)) unions of faces
    let targets = Polyhedron::new(
        m,
        vec![
            Simplex::point(x.clone()),
            Simplex::new(vec![x.clone(), end.clone()])?,
        ],
    )?;
    let refined = eta.subdivide_for_preimage(&targets)?;
    let carrier = refined.carrier();
    let start = seq.points().len() - (seq.points().len() / 4).max(4).min(seq.points().len());
    let mut counts = vec![0usize; carrier.len()];
    for p in &seq.points()[start..] {
        if let Some(i) = refined.locate(p) {
            counts[i] += 1;
        }
    }
    let (best, &count) = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .ok_or_else(|| Error::Precondition("empty carrier".into()))?;
    let t = carrier.cell(best);
    let t_test = SimplexTester::new(&t);
    if count < 3 || !t_test.contains(&z) {
        return Err(Error::Precondition(
            "no carrier cell captures enough preimage points".into(),
        ));
    }
    let piece = refined.pieces()[best].clone();
    let in_t: Vec<Point> = seq
        .points()
        .iter()
        .filter(|p| t_test.contains(p))
        .cloned()
        .collect();
    let sub = PointSequence::new(in_t, z.clone())?;

    // Step 2: residual levels until A·w_k ≠ 0
    let mut k = 0;
    let mut frame = NumericFrame::empty();
    let mut image_norms = Vec::new();
    for level in 1..=n {
        let est = detect_k_tangent(&sub, level, DEFAULT_TOL)?;
        let w = est.frame.vectors[level - 1].clone();
        let norm = piece
            .linear_f64(&w)
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt();
        frame = est.frame;
        image_norms.push(norm);
        if norm <= ZERO_IMAGE_TOL {
            continue;
        }
        if norm < NONZERO_IMAGE_TOL {
            return Err(Error::Inconsistent(format!(
                "‖A·w_{level}‖ = {norm:e} is neither zero nor clearly nonzero"
            )));
        }
        k = level;
        break;
    }
    if k == 0 {
        return Err(Error::Inconsistent(format!(
            "A·w_j = 0 for every j ≤ n = {n}; the residual scheme cannot end below n"
        )));
    }
    if k == n {
        return Err(Error::Inconsistent(format!(
            "k = n = {n}: a tangent of X cannot have full degree"
        )));
    }

    // Step 3: c = lim ‖η(z_i) − η(z)‖ / ‖residual‖
    let prefix = &frame.vectors[..k - 1];
    let tail_start = sub.points().len() - (sub.points().len() / 4).max(4).min(sub.points().len());
    let ratios: Vec<f64> = sub.points()[tail_start..]
        .iter()
        .filter_map(|p| {
            let d = p.sub(&z).to_f64();
            let mut r = d.clone();
            for w in prefix {
                let c: f64 = r.iter().zip(w).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(w).for_each(|(a, b)| *a -= c * b);
            }
            let rn = r.iter().map(|c| c * c).sum::<f64>().sqrt();
            let img = eta.evaluate(p).ok()?.sub(x).to_f64();
            let inorm = img.iter().map(|c| c * c).sum::<f64>().sqrt();
            (rn > 0.0).then(|| inorm / rn)
        })
        .collect();
    let c = if ratios.is_empty() {
        f64::NAN
    } else {
        median(ratios)
    };

    let mut result = PullbackResult {
        z: z.clone(),
        k,
        frame: frame.clone(),
        image_norms,
        cell: t.clone(),
        a: piece.matrix.clone(),
        b: piece.offset.clone(),
        c,
        exact_frame: None,
        kappa: None,
        lambda: None,
        image_in_segment: None,
        image_deviation: None,
        certificate: None,
        report: None,
        note: String::new(),
    };

    let rational: Vec<Point> = frame
        .vectors
        .iter()
        .map(|w| rationalize_direction(w))
        .collect();
    let Some(ws) = exact_gram_schmidt(&rational) else {
        result.note = "rationalized directions are linearly dependent".into();
        return Ok(result);
    };
    for (j, w) in ws[..k - 1].iter().enumerate() {
        if !piece.apply_linear(w).is_zero() {
            result.note = format!("rationalized w_{} is not in the kernel of A", j + 1);
            return Ok(result);
        }
    }
    let aw = piece.apply_linear(&ws[k - 1]);
    let kappa = parallel_factor(&aw, u);
    let Some(kappa) = kappa.filter(|q| q.is_positive()) else {
        result.note = format!("A·w_{k} = {aw} is not a positive multiple of u");
        return Ok(result);
    };
    let exact = ExactFrame::new(ws)?;
    result.exact_frame = Some(exact.clone());
    result.kappa = Some(kappa.clone());

    let found = match tangent_simplex_search(&Polyhedron::from_simplex(t.clone()), &z, &exact) {
        Ok(found) => found,
        Err(e) => {
            result.note = format!("no C-simplex in T: {e}");
            return Ok(result);
        }
    };
    let mut lambda = found.spec.lengths.clone();
    let cap = eps / &kappa;
    if cap < lambda[k - 1] {
        lambda[k - 1] = cap;
    }
    let spec = CSimplexSpec::new(z.clone(), exact.clone(), lambda.clone())?;
    let chain = spec.chain_vertices();
    let c_simplex = build_c_simplex(&spec)?;
    result.lambda = Some(lambda.clone());

    let mut deviation = 0.0f64;
    let mut exact_ok = true;
    let seg_dir = end.sub(x).to_f64();
    let seg_len2: f64 = seg_dir.iter().map(|c| c * c).sum();
    for v in &chain {
        let y = refined.evaluate(v)?;
        exact_ok &= on_segment(&y, x, &end);
        let d = y.sub(x).to_f64();
        let s =
            (d.iter().zip(&seg_dir).map(|(a, b)| a * b).sum::<f64>() / seg_len2).clamp(0.0, 1.0);
        let off = d
            .iter()
            .zip(&seg_dir)
            .map(|(a, b)| (a - s * b).powi(2))
            .sum::<f64>()
            .sqrt();
        deviation = deviation.max(off);
    }
    result.image_in_segment = Some(exact_ok);
    result.image_deviation = Some(deviation);

    let s = smallest_face_containing(&t, &chain)?;
    let s_verts_over_x: Vec<bool> = s
        .vertices()
        .iter()
        .map(|v| refined.evaluate(v).map(|y| &y == x))
        .collect::<Result<_>>()?;
    if !s_verts_over_x.iter().any(|&b| b) {
        result.note = "no vertex of S maps to x".into();
        return Ok(result);
    }
    let f = s.face_where(|i| s_verts_over_x[i]);
    let cert = TangentCertificate {
        x: z.clone(),
        frame: exact,
        lambda,
        s,
        f,
    };
    let report = check_rationally_outgoing(&cert, x_set, None, DEFAULT_TOL)?;
    debug_assert!(cert.s.contains_simplex(&c_simplex) || !report.verdict);
    if report.verdict && exact_ok {
        result.note = "certificate verified".into();
        result.certificate = Some(cert);
    } else {
        result.note = "derived certificate failed verification".into();
    }
    result.report = Some(report);
    Ok(result)
}

/// `κ` with `a = κ·u`, if it exists.
fn parallel_factor(a: &Point, u: &Point) -> Option<Rational> {
    let j = u.coords().iter().position(|c| !c.is_zero())?;
    let kappa = &a[j] / &u[j];
    (u.scale(&kappa) == *a).then_some(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::tangents::MonomialGenerator;

    fn cusp_sequence(to: u64) -> PointSequence {
        let g = MonomialGenerator {
            exponents: vec![1, 2],
            coefficients: None,
            from: 2,
            to,
            step: 1,
        };
        PointSequence::from_generator(g, Point::from_ints(&[0, 0])).unwrap()
    }

    fn cusp_set(to: u64) -> ClosedSet {
        ClosedSet::new(
            None,
            vec![cusp_sequence(to)],
            vec![Point::from_ints(&[0, 0])],
        )
        .unwrap()
    }

    fn cusp_cert() -> TangentCertificate {
        TangentCertificate {
            x: Point::from_ints(&[0, 0]),
            frame: ExactFrame::new(vec![Point::from_ints(&[1, 0])]).unwrap(),
            lambda: vec![ratio(1, 2)],
            s: Simplex::new(vec![
                Point::from_ints(&[0, 0]),
                Point::from_ratios(&[(1, 2), (0, 1)]),
            ])
            .unwrap(),
            f: Simplex::point(Point::from_ints(&[0, 0])),
        }
    }

    #[test]
    fn cusp_witness_zero_sets() {
        let pair = build_witness(&cusp_cert(), 2).unwrap();
        assert!(pair
            .f
            .zero_set()
            .same_set(&Polyhedron::from_simplex(cusp_cert().f)));
        assert!(pair
            .g
            .zero_set()
            .same_set(&Polyhedron::from_simplex(cusp_cert().s)));
        assert!(pair.carrier.is_regular());
    }

    #[test]
    fn witness_rejects_f_equal_s() {
        let mut cert = cusp_cert();
        cert.f = cert.s.clone();
        assert!(matches!(
            build_witness(&cert, 2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn crux_and_refutation_on_the_cusp() {
        let pair = build_witness(&cusp_cert(), 2).unwrap();
        let x = cusp_set(300);
        assert!(verify_crux(&pair, &x).unwrap().verdict);
        let report = refute_ideal_membership(&pair, &x, 16).unwrap();
        assert!(report.refuted_up_to_m_max, "{}", report.summary);
        // a point refuting m refutes every smaller multiple
        for r in &report.refutations {
            let f = pair.f.evaluate_scalar(&r.witness).unwrap();
            let g = pair.g.evaluate_scalar(&r.witness).unwrap();
            assert!(f > Rational::from_integer(r.m.into()) * g);
        }
        let bad = x.with_point(Point::from_ratios(&[(1, 4), (0, 1)])).unwrap();
        assert!(!verify_crux(&pair, &bad).unwrap().verdict);
    }

    #[test]
    fn self_dominance_is_not_refuted() {
        let pair = build_witness(&cusp_cert(), 2).unwrap();
        let same = WitnessPair {
            g: pair.f.clone(),
            ..pair
        };
        let report = refute_ideal_membership(&same, &cusp_set(50), 1).unwrap();
        assert!(!report.refuted_up_to_m_max);
        assert_eq!(report.unrefuted, vec![1]);
    }

    #[test]
    fn identity_pullback_recovers_the_cusp_tangent() {
        let x_set = cusp_set(2000);
        let eta = ZMap::identity(cube_triangulation(2)).unwrap();
        let seq = cusp_sequence(2000);
        let origin = Point::from_ints(&[0, 0]);
        let input = PullbackInput {
            eta: &eta,
            x_set: &x_set,
            seq: &seq,
            u: &Point::from_ints(&[1, 0]),
            eps: &ratio(1, 2),
            x: &origin,
        };
        let r = pullback_tangent(&input).unwrap();
        assert_eq!(r.k, 1);
        let cert = r.certificate.expect("certificate");
        assert_eq!(cert.s, cusp_cert().s);
        assert_eq!(cert.f, cusp_cert().f);
    }

    #[test]
    fn constant_map_fails_the_precondition() {
        let x_set = cusp_set(100);
        let eta = ZMap::constant(cube_triangulation(2), Point::from_ints(&[0, 0])).unwrap();
        let seq = cusp_sequence(100);
        let origin = Point::from_ints(&[0, 0]);
        let input = PullbackInput {
            eta: &eta,
            x_set: &x_set,
            seq: &seq,
            u: &Point::from_ints(&[1, 0]),
            eps: &ratio(1, 2),
            x: &origin,
        };
        assert!(matches!(
            pullback_tangent(&input),
            Err(Error::Precondition(_))
        ));
    }
}
