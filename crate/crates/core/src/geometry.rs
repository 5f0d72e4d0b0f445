//! Simplex primitives over exact rationals.
//!
//! Everything here is a pure function of immutable values. Simplexes keep
//! their vertices in lexicographic order, so two simplexes with the same
//! vertex set compare equal and faces can be identified syntactically.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::{rational_vec, to_f64, Point, Rational};

/// An affine function `p ↦ coeffs·p + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineFn {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl AffineFn {
    pub fn eval(&self, p: &Point) -> Rational {
        self.coeffs
            .iter()
            .zip(p.coords())
            .fold(self.constant.clone(), |acc, (a, x)| acc + a * x)
    }
}

/// Equalities cut out the affine hull; `facets[i] ≥ 0` is the closed
/// half-space bounded by the facet opposite vertex `i`.
#[derive(Clone, Debug)]
pub struct HalfspaceRep {
    pub equalities: Vec<AffineFn>,
    pub facets: Vec<AffineFn>,
}

impl HalfspaceRep {
    pub fn all(&self) -> impl Iterator<Item = &AffineFn> {
        self.equalities.iter().chain(self.facets.iter())
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.equalities.iter().all(|e| e.eval(p).is_zero())
            && self.facets.iter().all(|f| !f.eval(p).is_negative())
    }
}

/// Whether some point satisfies every `e = 0` and every `f > 0` (strict)
/// or `f ≥ 0`, decided exactly by Fourier–Motzkin elimination.
pub fn feasible(equalities: &[AffineFn], inequalities: &[(AffineFn, bool)]) -> bool {
    // rows are [coeffs..., constant]
    let row = |f: &AffineFn| -> Vec<Rational> {
        f.coeffs
            .iter()
            .cloned()
            .chain([f.constant.clone()])
            .collect()
    };
    let mut eqs: Vec<Vec<Rational>> = equalities.iter().map(row).collect();
    let mut ineqs: Vec<(Vec<Rational>, bool)> = inequalities
        .iter()
        .map(|(f, strict)| (row(f), *strict))
        .collect();
    let Some(n) = eqs
        .first()
        .or(ineqs.first().map(|(r, _)| r))
        .map(|r| r.len() - 1)
    else {
        return true;
    };
    // eliminate x_j through an equality with a nonzero coefficient on it
    let substitute = |target: &mut Vec<Rational>, pivot: &[Rational], j: usize| {
        if target[j].is_zero() {
            return;
        }
        let factor = &target[j] / &pivot[j];
        for (t, p) in target.iter_mut().zip(pivot) {
            *t -= &factor * p;
        }
    };
    while let Some(e) = eqs.pop() {
        let Some(j) = (0..n).find(|&j| !e[j].is_zero()) else {
            if e[n].is_zero() {
                continue;
            }
            return false;
        };
        for other in eqs.iter_mut() {
            substitute(other, &e, j);
        }
        for (other, _) in ineqs.iter_mut() {
            substitute(other, &e, j);
        }
    }
    let normalize = |(mut r, strict): (Vec<Rational>, bool)| -> (Vec<Rational>, bool) {
        if let Some(lead) = r.iter().find(|x| !x.is_zero()).map(Signed::abs) {
            for x in r.iter_mut() {
                *x /= &lead;
            }
        }
        (r, strict)
    };
    let mut ineqs: Vec<(Vec<Rational>, bool)> = ineqs.into_iter().map(normalize).collect();
    ineqs.sort();
    ineqs.dedup();
    for j in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in ineqs {
            match crate::rational::sign(&c.0[j]) {
                1 => pos.push(c),
                -1 => neg.push(c),
                _ => rest.push(c),
            }
        }
        for (p, ps) in &pos {
            for (q, qs) in &neg {
                let (a, b) = (-&q[j], p[j].clone());
                let combined: Vec<Rational> =
                    p.iter().zip(q).map(|(x, y)| x * &a + y * &b).collect();
                rest.push(normalize((combined, *ps || *qs)));
            }
        }
        rest.sort();
        rest.dedup();
        ineqs = rest;
    }
    ineqs.iter().all(|(r, strict)| {
        if *strict {
            r[n].is_positive()
        } else {
            !r[n].is_negative()
        }
    })
}

/// Axis-aligned bounding box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBox {
    pub lo: Point,
    pub hi: Point,
}

impl BBox {
    pub fn of<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for p in it {
            for i in 0..p.dim() {
                if p[i] < lo[i] {
                    lo[i] = p[i].clone();
                }
                if p[i] > hi[i] {
                    hi[i] = p[i].clone();
                }
            }
        }
        Some(BBox { lo, hi })
    }

    pub fn overlaps(&self, other: &BBox) -> bool {
        (0..self.lo.dim()).all(|i| self.lo[i] <= other.hi[i] && other.lo[i] <= self.hi[i])
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..p.dim()).all(|i| self.lo[i] <= p[i] && p[i] <= self.hi[i])
    }
}

/// Coordinates of `aff S` relative to its vertices, precomputed once.
#[derive(Clone, Debug)]
pub struct Chart {
    origin: Point,
    directions: Vec<Point>,
    pivot_rows: Vec<usize>,
    inv: Matrix,
}

impl Chart {
    pub(crate) fn new(vertices: &[Point]) -> Chart {
        let origin = vertices[0].clone();
        let directions: Vec<Point> = vertices[1..].iter().map(|v| v.sub(&origin)).collect();
        let m = directions.len();
        let n = origin.dim();
        let mut pivot_rows = Vec::with_capacity(m);
        let mut picked: Matrix = Vec::new();
        for r in 0..n {
            if pivot_rows.len() == m {
                break;
            }
            let row: Vec<Rational> = directions.iter().map(|d| d[r].clone()).collect();
            picked.push(row);
            if linalg::rank(&picked) > pivot_rows.len() {
                pivot_rows.push(r);
            } else {
                picked.pop();
            }
        }
        let inv = if m == 0 {
            Vec::new()
        } else {
            linalg::inverse(&picked).expect("independent directions")
        };
        Chart {
            origin,
            directions,
            pivot_rows,
            inv,
        }
    }

    /// Affine (barycentric) coordinates of `p`, or `None` off the affine hull.
    pub fn coordinates(&self, p: &Point) -> Option<Vec<Rational>> {
        let d = p.sub(&self.origin);
        let rhs: Vec<Rational> = self.pivot_rows.iter().map(|&r| d[r].clone()).collect();
        let t = linalg::mat_vec(&self.inv, &rhs);
        for r in 0..d.dim() {
            let v = self
                .directions
                .iter()
                .zip(&t)
                .fold(Rational::zero(), |acc, (dir, tj)| acc + &dir[r] * tj);
            if v != d[r] {
                return None;
            }
        }
        let mut out = Vec::with_capacity(t.len() + 1);
        out.push(t.iter().fold(Rational::one(), |acc, x| acc - x));
        out.extend(t);
        Some(out)
    }

    /// Double-precision copy for fast rejection tests.
    pub fn to_f64(&self) -> FloatChart {
        FloatChart {
            origin: self.origin.to_f64(),
            pivot_rows: self.pivot_rows.clone(),
            inv: self
                .inv
                .iter()
                .map(|r| r.iter().map(to_f64).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FloatChart {
    origin: Vec<f64>,
    pivot_rows: Vec<usize>,
    inv: Vec<Vec<f64>>,
}

impl FloatChart {
    /// Smallest approximate barycentric coordinate (ignores the off-hull test).
    pub fn min_coordinate(&self, p: &[f64]) -> f64 {
        let rhs: Vec<f64> = self
            .pivot_rows
            .iter()
            .map(|&r| p[r] - self.origin[r])
            .collect();
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        for row in &self.inv {
            let t: f64 = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
            sum += t;
            min = min.min(t);
        }
        min.min(1.0 - sum)
    }
}

/// A rational simplex `conv(v_0, …, v_m)` with lexicographically sorted
/// vertices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSimplex")]
pub struct Simplex {
    vertices: Vec<Point>,
}

#[derive(Deserialize)]
struct RawSimplex {
    vertices: Vec<Point>,
}

impl TryFrom<RawSimplex> for Simplex {
    type Error = Error;
    fn try_from(raw: RawSimplex) -> Result<Simplex> {
        Simplex::new(raw.vertices)
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conv(")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Simplex {
    pub fn new(mut vertices: Vec<Point>) -> Result<Simplex> {
        let Some(first) = vertices.first() else {
            return Err(Error::Degenerate);
        };
        let n = first.dim();
        if n == 0 {
            return Err(Error::Parse("points must have dimension at least 1".into()));
        }
        if let Some(bad) = vertices.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.dim(),
            });
        }
        vertices.sort();
        let diffs: Matrix = vertices[1..]
            .iter()
            .map(|v| v.sub(&vertices[0]).0)
            .collect();
        if vertices.len() > n + 1 || linalg::rank(&diffs) != vertices.len() - 1 {
            return Err(Error::Degenerate);
        }
        Ok(Simplex { vertices })
    }

    pub fn point(p: Point) -> Simplex {
        Simplex { vertices: vec![p] }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Simplex dimension `m`.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn chart(&self) -> Chart {
        Chart::new(&self.vertices)
    }

    fn check_dim(&self, p: &Point) -> Result<()> {
        if p.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: p.dim(),
            });
        }
        Ok(())
    }

    /// Affine coordinates of `p` in `aff S`, possibly negative.
    pub fn affine_coordinates(&self, p: &Point) -> Result<Option<Vec<Rational>>> {
        self.check_dim(p)?;
        Ok(self.chart().coordinates(p))
    }

    /// Barycentric coordinates of `p`, or `None` when `p ∉ S`.
    pub fn barycentric(&self, p: &Point) -> Result<Option<Vec<Rational>>> {
        Ok(self
            .affine_coordinates(p)?
            .filter(|t| t.iter().all(|x| !x.is_negative())))
    }

    pub fn contains(&self, p: &Point) -> bool {
        matches!(self.barycentric(p), Ok(Some(_)))
    }

    pub fn contains_simplex(&self, other: &Simplex) -> bool {
        let chart = self.chart();
        other.vertices.iter().all(|v| {
            v.dim() == self.ambient_dim()
                && chart
                    .coordinates(v)
                    .is_some_and(|t| t.iter().all(|x| !x.is_negative()))
        })
    }

    /// The face spanned by the vertices carrying positive barycentric weight.
    pub fn smallest_containing_face(&self, p: &Point) -> Result<Simplex> {
        let t = self
            .barycentric(p)?
            .ok_or_else(|| Error::NotInSimplex(p.clone()))?;
        Ok(self.face_where(|i| t[i].is_positive()))
    }

    pub fn relint_contains(&self, p: &Point) -> Result<bool> {
        Ok(self
            .barycentric(p)?
            .is_some_and(|t| t.iter().all(Signed::is_positive)))
    }

    /// Face on the vertices whose index satisfies `keep` (must be nonempty).
    pub fn face_where(&self, keep: impl Fn(usize) -> bool) -> Simplex {
        Simplex {
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, v)| v.clone())
                .collect(),
        }
    }

    /// All nonempty faces, including `S` itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let k = self.vertices.len();
        (1u32..(1 << k))
            .map(|mask| self.face_where(|i| mask & (1 << i) != 0))
            .collect()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.vertices
            .iter()
            .all(|v| other.vertices.binary_search(v).is_ok())
    }

    pub fn barycenter(&self) -> Point {
        let k = Rational::from_integer(BigInt::from(self.vertices.len()));
        let sum = self.vertices[1..]
            .iter()
            .fold(self.vertices[0].clone(), |acc, v| acc.add(v));
        sum.scale(&k.recip())
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(&self.vertices).expect("nonempty")
    }

    /// Integer matrix whose rows are `den(v_i)·(v_i, 1)`.
    pub fn homogeneous_matrix(&self) -> Vec<Vec<BigInt>> {
        self.vertices.iter().map(Point::homogeneous).collect()
    }

    /// Nonzero elementary divisors of the homogeneous vertex matrix.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        linalg::smith_normal_form(&self.homogeneous_matrix()).diag
    }

    /// Regular iff the homogeneous vertex vectors extend to a basis of
    /// `Z^{n+1}`, i.e. all elementary divisors equal 1.
    pub fn is_regular(&self) -> bool {
        self.elementary_divisors().iter().all(One::is_one)
    }

    /// Half-space description of `S` inside `R^n`.
    pub fn halfspaces(&self) -> HalfspaceRep {
        let n = self.ambient_dim();
        let m = self.dim();
        let origin = &self.vertices[0];
        let mut columns: Vec<Point> = self.vertices[1..].iter().map(|v| v.sub(origin)).collect();
        for j in 0..n {
            if columns.len() == n {
                break;
            }
            let mut e = Point::zeros(n);
            e[j] = Rational::one();
            columns.push(e);
            let rows: Matrix = columns.iter().map(|c| c.0.clone()).collect();
            if linalg::rank(&rows) < columns.len() {
                columns.pop();
            }
        }
        // basis matrix with the columns above; its inverse maps p - v_0 to coordinates
        let b: Matrix = (0..n)
            .map(|r| columns.iter().map(|c| c[r].clone()).collect())
            .collect();
        let binv = linalg::inverse(&b).expect("completed basis");
        let affine = |row: &Vec<Rational>| AffineFn {
            coeffs: row.clone(),
            constant: -row
                .iter()
                .zip(origin.coords())
                .fold(Rational::zero(), |acc, (a, x)| acc + a * x),
        };
        let coords: Vec<AffineFn> = binv.iter().map(affine).collect();
        let equalities = coords[m..].to_vec();
        let mut facets = Vec::with_capacity(m + 1);
        if m > 0 {
            let mut first = AffineFn {
                coeffs: vec![Rational::zero(); n],
                constant: Rational::one(),
            };
            for c in &coords[..m] {
                for (a, b) in first.coeffs.iter_mut().zip(&c.coeffs) {
                    *a -= b;
                }
                first.constant -= &c.constant;
            }
            facets.push(first);
            facets.extend(coords[..m].iter().cloned());
        }
        HalfspaceRep { equalities, facets }
    }

    /// `vol(inner) / vol(self)` for a same-dimensional `inner ⊆ aff self`.
    pub fn relative_volume(&self, inner: &Simplex) -> Option<Rational> {
        if inner.dim() != self.dim() {
            return None;
        }
        let chart = self.chart();
        let rows: Option<Matrix> = inner
            .vertices
            .iter()
            .map(|v| chart.coordinates(v))
            .collect();
        Some(linalg::determinant(&rows?).abs())
    }
}

/// `den` of a rational point.
pub fn den(v: &Point) -> BigInt {
    v.den()
}

/// Ordered pairwise-orthogonal nonzero rational directions.
///
/// Exact frames are not normalized: unit vectors generally need irrational
/// coordinates, and every construction here is invariant under rescaling a
/// direction together with its length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct ExactFrame {
    vectors: Vec<Point>,
}

impl TryFrom<Vec<Point>> for ExactFrame {
    type Error = Error;
    fn try_from(v: Vec<Point>) -> Result<ExactFrame> {
        ExactFrame::new(v)
    }
}

impl From<ExactFrame> for Vec<Point> {
    fn from(f: ExactFrame) -> Vec<Point> {
        f.vectors
    }
}

impl ExactFrame {
    pub fn new(vectors: Vec<Point>) -> Result<ExactFrame> {
        let Some(first) = vectors.first() else {
            return Err(Error::DegenerateFrame("empty frame".into()));
        };
        let n = first.dim();
        if vectors.len() > n {
            return Err(Error::DegenerateFrame(format!(
                "{} vectors in dimension {n}",
                vectors.len()
            )));
        }
        for (i, u) in vectors.iter().enumerate() {
            if u.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: u.dim(),
                });
            }
            if u.is_zero() {
                return Err(Error::DegenerateFrame(format!("u_{} is zero", i + 1)));
            }
            for (j, w) in vectors[..i].iter().enumerate() {
                if !u.dot(w).is_zero() {
                    return Err(Error::DegenerateFrame(format!(
                        "u_{} and u_{} are not orthogonal",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(ExactFrame { vectors })
    }

    pub fn vectors(&self) -> &[Point] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    /// The initial segment `u(l)`.
    pub fn prefix(&self, l: usize) -> ExactFrame {
        ExactFrame {
            vectors: self.vectors[..l].to_vec(),
        }
    }

    /// Unit vectors in double precision.
    pub fn to_numeric(&self) -> NumericFrame {
        let vectors = self
            .vectors
            .iter()
            .map(|u| {
                let v = u.to_f64();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / norm).collect()
            })
            .collect();
        NumericFrame {
            vectors,
            tolerance: NumericFrame::DEFAULT_TOLERANCE,
        }
    }
}

/// Unit vectors in double precision, orthonormal within `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericFrame {
    pub vectors: Vec<Vec<f64>>,
    pub tolerance: f64,
}

impl NumericFrame {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    pub fn new(vectors: Vec<Vec<f64>>, tolerance: f64) -> Result<NumericFrame> {
        let frame = NumericFrame { vectors, tolerance };
        let err = frame.orthonormality_error();
        if err > tolerance {
            return Err(Error::DegenerateFrame(format!(
                "not orthonormal (error {err:e})"
            )));
        }
        Ok(frame)
    }

    pub fn empty() -> NumericFrame {
        NumericFrame {
            vectors: Vec::new(),
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, w) in self.vectors.iter().enumerate().skip(i) {
                let d: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }
}

/// Parameters of `C_{x,u,λ} = conv(x, x+λ₁u₁, …, x+λ₁u₁+⋯+λ_k u_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CSimplexSpec {
    pub apex: Point,
    pub frame: ExactFrame,
    #[serde(with = "rational_vec")]
    pub lengths: Vec<Rational>,
}

impl CSimplexSpec {
    pub fn new(apex: Point, frame: ExactFrame, lengths: Vec<Rational>) -> Result<CSimplexSpec> {
        if lengths.len() != frame.len() {
            return Err(Error::DegenerateFrame(format!(
                "{} lengths for {} directions",
                lengths.len(),
                frame.len()
            )));
        }
        if apex.dim() != frame.dim() {
            return Err(Error::DimensionMismatch {
                expected: frame.dim(),
                got: apex.dim(),
            });
        }
        if lengths.iter().any(|l| !l.is_positive()) {
            return Err(Error::DegenerateFrame("lengths must be positive".into()));
        }
        Ok(CSimplexSpec {
            apex,
            frame,
            lengths,
        })
    }

    /// Vertices in chain order `x, x+λ₁u₁, …`.
    pub fn chain_vertices(&self) -> Vec<Point> {
        let mut out = vec![self.apex.clone()];
        let mut z = self.apex.clone();
        for (u, l) in self.frame.vectors().iter().zip(&self.lengths) {
            z = z.add_scaled(l, u);
            out.push(z.clone());
        }
        out
    }

    pub fn prefix(&self, l: usize) -> CSimplexSpec {
        CSimplexSpec {
            apex: self.apex.clone(),
            frame: self.frame.prefix(l),
            lengths: self.lengths[..l].to_vec(),
        }
    }
}

pub fn build_c_simplex(spec: &CSimplexSpec) -> Result<Simplex> {
    Simplex::new(spec.chain_vertices()).map_err(|e| match e {
        Error::Degenerate => {
            Error::DegenerateFrame("C-simplex vertices are affinely dependent".into())
        }
        other => other,
    })
}

/// A common `(x,u)`-simplex inside both inputs.
///
/// Membership in `C_{x,u,λ}` of `x + Σ s_j u_j` is the chain condition
/// `1 ≥ s₁/λ₁ ≥ s₂/λ₂ ≥ … ≥ s_k/λ_k ≥ 0`; the recurrence keeps every vertex
/// of the result inside both chains.
pub fn intersect_c_simplexes(a: &CSimplexSpec, b: &CSimplexSpec) -> Result<CSimplexSpec> {
    if a.apex != b.apex || a.frame != b.frame {
        return Err(Error::MismatchedSpecs);
    }
    let (la, lb) = (&a.lengths, &b.lengths);
    let mut eps: Vec<Rational> = Vec::with_capacity(la.len());
    for j in 0..la.len() {
        let floor = la[j].clone().min(lb[j].clone());
        let next = if j == 0 {
            floor
        } else {
            let prev = &eps[j - 1];
            let via_a = prev * &la[j] / &la[j - 1];
            let via_b = prev * &lb[j] / &lb[j - 1];
            floor.min(via_a).min(via_b)
        };
        eps.push(next);
    }
    let out = CSimplexSpec::new(a.apex.clone(), a.frame.clone(), eps)?;
    let sa = build_c_simplex(a)?;
    let sb = build_c_simplex(b)?;
    for v in out.chain_vertices() {
        if !sa.contains(&v) || !sb.contains(&v) {
            return Err(Error::Inconsistent(format!(
                "intersection vertex {v} escapes an input C-simplex"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn pt(c: &[(i64, i64)]) -> Point {
        Point::from_ratios(c)
    }

    fn simplex(vs: &[&[(i64, i64)]]) -> Simplex {
        Simplex::new(vs.iter().map(|c| pt(c)).collect()).unwrap()
    }

    fn unit_triangle() -> Simplex {
        simplex(&[&[(0, 1), (0, 1)], &[(1, 1), (0, 1)], &[(1, 1), (1, 1)]])
    }

    #[test]
    fn feasibility_by_elimination() {
        let f = |coeffs: &[i64], constant: i64| AffineFn {
            coeffs: coeffs.iter().map(|&c| int(c)).collect(),
            constant: int(constant),
        };
        // x ≥ 0, y ≥ 0, x + y ≤ 1
        let triangle = vec![
            (f(&[1, 0], 0), false),
            (f(&[0, 1], 0), false),
            (f(&[-1, -1], 1), false),
        ];
        assert!(feasible(&[], &triangle));
        let mut touching = triangle.clone();
        touching.push((f(&[1, 1], -1), false));
        assert!(feasible(&[], &touching));
        let mut strict = triangle.clone();
        strict.push((f(&[1, 1], -1), true));
        assert!(!feasible(&[], &strict));
        assert!(feasible(&[f(&[1, -1], 0)], &triangle));
        assert!(!feasible(&[f(&[1, 1], -2)], &triangle));
        assert!(!feasible(&[f(&[0, 0], 1)], &[]));
    }

    #[test]
    fn barycentric_examples() {
        let seg = simplex(&[&[(0, 1)], &[(1, 1)]]);
        assert_eq!(
            seg.barycentric(&pt(&[(1, 2)])).unwrap(),
            Some(vec![ratio(1, 2), ratio(1, 2)])
        );
        assert_eq!(seg.barycentric(&pt(&[(2, 1)])).unwrap(), None);
        let tri = unit_triangle();
        assert_eq!(
            tri.barycentric(&pt(&[(1, 1), (0, 1)])).unwrap(),
            Some(vec![int(0), int(1), int(0)])
        );
        assert!(matches!(
            tri.barycentric(&pt(&[(1, 1)])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn off_hull_points_are_rejected() {
        let seg = simplex(&[&[(0, 1), (0, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(seg.barycentric(&pt(&[(1, 2), (1, 100)])).unwrap(), None);
        assert!(!seg.relint_contains(&pt(&[(1, 2), (1, 100)])).unwrap());
    }

    #[test]
    fn smallest_face_examples() {
        let tri = unit_triangle();
        let v0 = pt(&[(0, 1), (0, 1)]);
        assert_eq!(
            tri.smallest_containing_face(&v0).unwrap(),
            Simplex::point(v0)
        );
        assert_eq!(
            tri.smallest_containing_face(&tri.barycenter()).unwrap(),
            tri
        );
        let edge = simplex(&[&[(0, 1), (0, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(
            tri.smallest_containing_face(&pt(&[(1, 2), (0, 1)]))
                .unwrap(),
            edge
        );
        assert!(tri
            .smallest_containing_face(&pt(&[(2, 1), (0, 1)]))
            .is_err());
    }

    #[test]
    fn relint_examples() {
        let seg = simplex(&[&[(0, 1)], &[(1, 1)]]);
        assert!(seg.relint_contains(&pt(&[(1, 2)])).unwrap());
        assert!(!seg.relint_contains(&pt(&[(0, 1)])).unwrap());
    }

    #[test]
    fn regularity_examples() {
        assert!(unit_triangle().is_regular());
        let bad = simplex(&[&[(0, 1), (0, 1)], &[(1, 1), (0, 1)], &[(1, 1), (2, 1)]]);
        assert!(!bad.is_regular());
        assert_eq!(bad.elementary_divisors().last().unwrap(), &BigInt::from(2));
        assert!(Simplex::point(pt(&[(1, 2), (1, 2)])).is_regular());
        // gcd of 2x2 minors of (1,0,3),(0,1,2) is 1
        assert!(simplex(&[&[(1, 3), (0, 1)], &[(0, 1), (1, 2)]]).is_regular());
    }

    #[test]
    fn degenerate_vertices_rejected() {
        let r = Simplex::new(vec![
            Point::from_ints(&[0, 0]),
            Point::from_ints(&[1, 1]),
            Point::from_ints(&[2, 2]),
        ]);
        assert!(matches!(r, Err(Error::Degenerate)));
        let r = Simplex::new(vec![Point::from_ints(&[0, 0]), Point::from_ints(&[0, 0])]);
        assert!(matches!(r, Err(Error::Degenerate)));
    }

    #[test]
    fn halfspaces_describe_the_simplex() {
        let seg = simplex(&[&[(0, 1), (0, 1)], &[(1, 2), (0, 1)]]);
        let rep = seg.halfspaces();
        assert_eq!(rep.equalities.len(), 1);
        assert_eq!(rep.facets.len(), 2);
        let inside = pt(&[(1, 4), (0, 1)]);
        assert!(rep.equalities.iter().all(|e| e.eval(&inside).is_zero()));
        assert!(rep.facets.iter().all(|f| !f.eval(&inside).is_negative()));
        let beyond = pt(&[(3, 4), (0, 1)]);
        assert!(rep.facets.iter().any(|f| f.eval(&beyond).is_negative()));
        // facet i vanishes on the vertices other than i
        for (i, f) in rep.facets.iter().enumerate() {
            for (j, v) in seg.vertices().iter().enumerate() {
                assert_eq!(f.eval(v), if i == j { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn c_simplex_examples() {
        let frame =
            ExactFrame::new(vec![Point::from_ints(&[1, 0]), Point::from_ints(&[0, 1])]).unwrap();
        let spec = CSimplexSpec::new(
            Point::from_ints(&[0, 0]),
            frame.clone(),
            vec![ratio(1, 2), ratio(1, 3)],
        )
        .unwrap();
        let s = build_c_simplex(&spec).unwrap();
        assert_eq!(
            s,
            simplex(&[&[(0, 1), (0, 1)], &[(1, 2), (0, 1)], &[(1, 2), (1, 3)]])
        );
        let one =
            CSimplexSpec::new(Point::from_ints(&[0, 0]), frame.prefix(1), vec![int(1)]).unwrap();
        assert_eq!(
            build_c_simplex(&one).unwrap(),
            simplex(&[&[(0, 1), (0, 1)], &[(1, 1), (0, 1)]])
        );
        assert!(build_c_simplex(&spec.prefix(1)).unwrap().is_face_of(&s));
    }

    #[test]
    fn frame_validation() {
        assert!(
            ExactFrame::new(vec![Point::from_ints(&[1, 1]), Point::from_ints(&[1, 0])]).is_err()
        );
        assert!(ExactFrame::new(vec![Point::from_ints(&[0, 0])]).is_err());
        assert!(ExactFrame::new(vec![Point::from_ints(&[1]), Point::from_ints(&[1])]).is_err());
        assert!(CSimplexSpec::new(
            Point::from_ints(&[0, 0]),
            ExactFrame::new(vec![Point::from_ints(&[1, 0])]).unwrap(),
            vec![int(0)]
        )
        .is_err());
    }

    #[test]
    fn intersect_examples() {
        let frame =
            ExactFrame::new(vec![Point::from_ints(&[1, 0]), Point::from_ints(&[0, 1])]).unwrap();
        let x = Point::from_ints(&[0, 0]);
        let a = CSimplexSpec::new(x.clone(), frame.clone(), vec![int(1), int(1)]).unwrap();
        let b = CSimplexSpec::new(x.clone(), frame.clone(), vec![ratio(1, 2), int(2)]).unwrap();
        let e = intersect_c_simplexes(&a, &b).unwrap();
        assert_eq!(e.lengths, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(intersect_c_simplexes(&a, &a).unwrap(), a);
        let f1 = frame.prefix(1);
        let s1 = CSimplexSpec::new(x.clone(), f1.clone(), vec![int(1)]).unwrap();
        let s2 = CSimplexSpec::new(x.clone(), f1, vec![ratio(1, 3)]).unwrap();
        assert_eq!(
            intersect_c_simplexes(&s1, &s2).unwrap().lengths,
            vec![ratio(1, 3)]
        );
        let moved =
            CSimplexSpec::new(Point::from_ints(&[1, 0]), frame, vec![int(1), int(1)]).unwrap();
        assert!(matches!(
            intersect_c_simplexes(&a, &moved),
            Err(Error::MismatchedSpecs)
        ));
    }

    #[test]
    fn relative_volume_halves() {
        let tri = unit_triangle();
        let half = simplex(&[&[(0, 1), (0, 1)], &[(1, 1), (0, 1)], &[(1, 1), (1, 2)]]);
        assert_eq!(tri.relative_volume(&half), Some(ratio(1, 2)));
    }
}
