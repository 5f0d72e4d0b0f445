//! Z-maps over regular complexes and McNaughton functions.
//!
//! A `ZMap` is stored in vertex form: a regular carrier plus one value per
//! carrier vertex. The integer affine piece of every maximal cell is derived
//! at construction and checked to have integer coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{BBox, Chart, Simplex};
use crate::linalg;
use crate::mesh::Mesh;
use crate::rational::{from_f64, Point, Rational};
use crate::tangents::ClosedSet;
use crate::triangulation::{self, blowup_budget, Polyhedron, SimplicialComplex};

/// `p ↦ matrix·p + offset` with integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub matrix: Vec<Vec<BigInt>>,
    pub offset: Vec<BigInt>,
}

impl Piece {
    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            self.matrix
                .iter()
                .zip(&self.offset)
                .map(|(row, b)| {
                    row.iter()
                        .zip(p.coords())
                        .fold(Rational::from_integer(b.clone()), |acc, (a, x)| {
                            acc + Rational::from_integer(a.clone()) * x
                        })
                })
                .collect(),
        )
    }

    /// `matrix · w` in floating point.
    pub fn linear_f64(&self, w: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(w)
                    .map(|(a, x)| a.to_f64().unwrap_or(f64::NAN) * x)
                    .sum()
            })
            .collect()
    }

    pub fn apply_linear(&self, w: &Point) -> Point {
        Point::new(
            self.matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(w.coords())
                        .fold(Rational::zero(), |acc, (a, x)| {
                            acc + Rational::from_integer(a.clone()) * x
                        })
                })
                .collect(),
        )
    }
}

#[derive(Clone)]
pub struct ZMap {
    carrier: SimplicialComplex,
    values: Vec<Point>,
    codim: usize,
    pieces: Vec<Piece>,
    charts: Vec<Chart>,
    boxes: Vec<BBox>,
}

impl std::fmt::Debug for ZMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZMap")
            .field("carrier", &self.carrier)
            .field("values", &self.values)
            .finish()
    }
}

impl PartialEq for ZMap {
    fn eq(&self, other: &ZMap) -> bool {
        self.carrier == other.carrier && self.values == other.values
    }
}

/// The unique map that is linear on every cell of `carrier` and takes
/// `values[i]` at `carrier.vertices()[i]`.
pub fn extend_from_vertices(carrier: SimplicialComplex, values: Vec<Point>) -> Result<ZMap> {
    if values.len() != carrier.vertices().len() {
        return Err(Error::Inconsistent(format!(
            "{} values for {} carrier vertices",
            values.len(),
            carrier.vertices().len()
        )));
    }
    let codim = values.first().map_or(0, Point::dim);
    if codim == 0 {
        return Err(Error::Parse(
            "values must be points of dimension at least 1".into(),
        ));
    }
    if let Some(bad) = values.iter().find(|v| v.dim() != codim) {
        return Err(Error::DimensionMismatch {
            expected: codim,
            got: bad.dim(),
        });
    }
    for (v, y) in carrier.vertices().iter().zip(&values) {
        if !v.den().is_multiple_of(&y.den()) {
            return Err(Error::Divisibility {
                vertex: v.clone(),
                value: y.clone(),
            });
        }
    }
    let mut pieces = Vec::with_capacity(carrier.len());
    let mut charts = Vec::with_capacity(carrier.len());
    let mut boxes = Vec::with_capacity(carrier.len());
    for ids in carrier.cell_indices() {
        let cell = carrier.simplex_of(ids);
        let vals: Vec<&Point> = ids.iter().map(|&i| &values[i]).collect();
        pieces.push(integer_piece(&cell, &vals)?);
        charts.push(cell.chart());
        boxes.push(cell.bbox());
    }
    Ok(ZMap {
        carrier,
        values,
        codim,
        pieces,
        charts,
        boxes,
    })
}

/// Integer affine map agreeing with `vals` on the vertices of a regular cell.
fn integer_piece(cell: &Simplex, vals: &[&Point]) -> Result<Piece> {
    let rows = cell.homogeneous_matrix();
    let snf = linalg::smith_normal_form(&rows);
    if !snf.is_unimodular_part() || snf.rank() != rows.len() {
        return Err(Error::NonRegularCarrier(cell.to_string()));
    }
    let n = cell.ambient_dim();
    let m = vals[0].dim();
    // V = (V^{-1})^{-1} is an integer matrix
    let vinv: Vec<Vec<Rational>> = snf
        .v_inv
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let v: Vec<Vec<BigInt>> = linalg::inverse(&vinv)
        .expect("unimodular")
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
        .collect();
    // targets y_i = den(v_i)·f(v_i) are integer vectors by divisibility
    let targets: Vec<Vec<BigInt>> = cell
        .vertices()
        .iter()
        .zip(vals)
        .map(|(p, y)| {
            let d = Rational::from_integer(p.den());
            y.coords().iter().map(|c| (c * &d).to_integer()).collect()
        })
        .collect();
    // M = [Yᵀ·Uᵀ | 0] · Vᵀ, so that M·w_i = y_i for the homogeneous rows w_i
    let d1 = rows.len();
    let mut left = vec![vec![BigInt::zero(); n + 1]; m];
    for (r, row) in left.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate().take(d1) {
            *entry = (0..d1).fold(BigInt::zero(), |acc, i| acc + &targets[i][r] * &snf.u[c][i]);
        }
    }
    let vt: Vec<Vec<BigInt>> = (0..n + 1)
        .map(|i| (0..n + 1).map(|j| v[j][i].clone()).collect())
        .collect();
    let full = linalg::int_mat_mul(&left, &vt);
    let piece = Piece {
        matrix: full.iter().map(|r| r[..n].to_vec()).collect(),
        offset: full.iter().map(|r| r[n].clone()).collect(),
    };
    for (p, y) in cell.vertices().iter().zip(vals) {
        if &piece.apply(p) != *y {
            return Err(Error::NonIntegralPiece(cell.to_string()));
        }
    }
    Ok(piece)
}

impl ZMap {
    /// Build from a function evaluated at every carrier vertex.
    pub fn from_fn(carrier: SimplicialComplex, f: impl Fn(&Point) -> Point) -> Result<ZMap> {
        let values = carrier.vertices().iter().map(f).collect();
        extend_from_vertices(carrier, values)
    }

    /// Identity map on a regular complex.
    pub fn identity(carrier: SimplicialComplex) -> Result<ZMap> {
        ZMap::from_fn(carrier, Point::clone)
    }

    /// Linear projection onto the listed coordinates.
    pub fn projection(carrier: SimplicialComplex, coords: &[usize]) -> Result<ZMap> {
        ZMap::from_fn(carrier, |p| {
            Point::new(coords.iter().map(|&i| p[i].clone()).collect())
        })
    }

    pub fn constant(carrier: SimplicialComplex, value: Point) -> Result<ZMap> {
        ZMap::from_fn(carrier, |_| value.clone())
    }

    pub fn carrier(&self) -> &SimplicialComplex {
        &self.carrier
    }

    pub fn values(&self) -> &[Point] {
        &self.values
    }

    pub fn domain_dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn codomain_dim(&self) -> usize {
        self.codim
    }

    /// Affine pieces, one per maximal carrier cell.
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Index of a maximal cell containing `p`.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        if p.dim() != self.domain_dim() {
            return None;
        }
        (0..self.pieces.len()).find(|&i| {
            self.boxes[i].contains(p)
                && self.charts[i]
                    .coordinates(p)
                    .is_some_and(|t| t.iter().all(|x| !x.is_negative()))
        })
    }

    pub fn evaluate(&self, p: &Point) -> Result<Point> {
        if p.dim() != self.domain_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.domain_dim(),
                got: p.dim(),
            });
        }
        let i = self
            .locate(p)
            .ok_or_else(|| Error::OutsideComplex(p.clone()))?;
        Ok(self.pieces[i].apply(p))
    }

    /// Numeric evaluation; the cell is selected exactly from the binary
    /// value of the input.
    pub fn evaluate_f64(&self, p: &[f64]) -> Result<Vec<f64>> {
        let exact = Point::new(p.iter().map(|&x| from_f64(x)).collect::<Result<_>>()?);
        Ok(self.evaluate(&exact)?.to_f64())
    }

    /// Scalar value of a map with one-dimensional codomain.
    pub fn evaluate_scalar(&self, p: &Point) -> Result<Rational> {
        Ok(self.evaluate(p)?.0.swap_remove(0))
    }

    pub fn is_mcnaughton(&self) -> bool {
        self.codim == 1
            && self
                .values
                .iter()
                .all(|v| !v[0].is_negative() && v[0] <= Rational::one())
    }

    /// The maximal-ideal predicate: `f` lies in the ideal of functions
    /// vanishing at `x`.
    pub fn vanishes_at(&self, x: &Point) -> Result<bool> {
        Ok(self.evaluate(x)?.is_zero())
    }

    pub(crate) fn to_mesh(&self, budget: u64) -> Mesh {
        let mut m = self.carrier.to_mesh(self.codim, budget);
        let values = &self.values;
        let carrier = &self.carrier;
        m.set_attrs(self.codim, |p, _| {
            Ok(values[carrier.vertex_index(p).expect("carrier vertex")]
                .0
                .clone())
        })
        .expect("infallible");
        m
    }

    pub(crate) fn from_mesh(m: &Mesh) -> Result<ZMap> {
        let (carrier, ids) = SimplicialComplex::from_mesh(m);
        let values = ids
            .iter()
            .map(|&id| Point::new(m.attrs(id).to_vec()))
            .collect();
        extend_from_vertices(carrier, values)
    }

    /// Same map over a regular subdivision in which every generator of `q`
    /// is a union of faces.
    pub fn subdivide_with(&self, q: &Polyhedron) -> Result<ZMap> {
        let mut m = self.to_mesh(blowup_budget());
        triangulation::cut_to_polyhedron(&mut m, q)?;
        m.regularize()?;
        ZMap::from_mesh(&m)
    }

    /// Same map over a regular subdivision in which `η⁻¹(r)` is a union of
    /// faces.
    pub fn subdivide_for_preimage(&self, r: &Polyhedron) -> Result<ZMap> {
        let mut m = self.to_mesh(blowup_budget());
        self.cut_for_preimage(&mut m, r)?;
        m.regularize()?;
        ZMap::from_mesh(&m)
    }

    fn cut_for_preimage(&self, m: &mut Mesh, r: &Polyhedron) -> Result<()> {
        if r.dim() != self.codim {
            return Err(Error::DimensionMismatch {
                expected: self.codim,
                got: r.dim(),
            });
        }
        for g in r.generators() {
            for psi in g.halfspaces().all() {
                m.cut(|_, a| psi.eval(&Point::new(a.to_vec())), None)?;
            }
        }
        Ok(())
    }

    /// `η⁻¹(r)` as a rational polyhedron.
    pub fn preimage_polyhedron(&self, r: &Polyhedron) -> Result<Polyhedron> {
        let mut m = self.to_mesh(u64::MAX);
        self.cut_for_preimage(&mut m, r)?;
        let mut faces = std::collections::BTreeSet::new();
        for g in r.generators() {
            for f in m.faces_with_vertices(|v| g.contains(&Point::new(m.attrs(v).to_vec()))) {
                faces.insert(f);
            }
        }
        let generators = crate::mesh::maximal_sets(faces)
            .iter()
            .map(|f| m.cell_simplex(f))
            .collect();
        Polyhedron::new(self.domain_dim(), generators)
    }

    /// `f⁻¹(0)` as a rational polyhedron.
    pub fn zero_set(&self) -> Polyhedron {
        let mut m = self.to_mesh(u64::MAX);
        for j in 0..self.codim {
            m.cut(|_, a| a[j].clone(), None).expect("unbounded budget");
        }
        let generators = m
            .faces_with_vertices(|v| m.attrs(v).iter().all(Zero::is_zero))
            .iter()
            .map(|f| m.cell_simplex(f))
            .collect();
        Polyhedron::new(self.domain_dim(), generators).expect("same dimension")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MvOp {
    #[serde(rename = "oplus")]
    Oplus,
    #[serde(rename = "neg")]
    Neg,
    #[serde(rename = "and")]
    And,
    #[serde(rename = "or")]
    Or,
}

impl std::str::FromStr for MvOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<MvOp> {
        match s {
            "oplus" | "⊕" => Ok(MvOp::Oplus),
            "neg" | "¬" => Ok(MvOp::Neg),
            "and" | "∧" | "min" => Ok(MvOp::And),
            "or" | "∨" | "max" => Ok(MvOp::Or),
            other => Err(Error::Parse(format!("unknown operation {other:?}"))),
        }
    }
}

impl MvOp {
    pub fn apply(self, a: &Rational, b: &Rational) -> Rational {
        match self {
            MvOp::Oplus => (a + b).min(Rational::one()),
            MvOp::Neg => Rational::one() - a,
            MvOp::And => a.min(b).clone(),
            MvOp::Or => a.max(b).clone(),
        }
    }
}

/// Pointwise MV-algebra operation, re-expressed over a common regular
/// refinement of both carriers.
pub fn mv_combine(op: MvOp, f: &ZMap, g: Option<&ZMap>) -> Result<ZMap> {
    if !f.is_mcnaughton() {
        return Err(Error::Precondition(
            "first argument is not a McNaughton function".into(),
        ));
    }
    if op == MvOp::Neg {
        let values = f
            .values
            .iter()
            .map(|v| Point::new(vec![Rational::one() - &v[0]]))
            .collect();
        return extend_from_vertices(f.carrier.clone(), values);
    }
    let g =
        g.ok_or_else(|| Error::Precondition("binary operation needs a second function".into()))?;
    if !g.is_mcnaughton() {
        return Err(Error::Precondition(
            "second argument is not a McNaughton function".into(),
        ));
    }
    let mut m = common_refinement(f, g, blowup_budget())?;
    match op {
        MvOp::Oplus => m.cut(|_, a| &a[0] + &a[1] - Rational::one(), None)?,
        _ => m.cut(|_, a| &a[0] - &a[1], None)?,
    }
    m.regularize()?;
    m.set_attrs(1, |_, a| Ok(vec![op.apply(&a[0], &a[1])]))?;
    ZMap::from_mesh(&m)
}

/// Mesh over `|f| = |g|` on whose cells both maps are linear; attributes
/// are `(f, g)`.
fn common_refinement(f: &ZMap, g: &ZMap, budget: u64) -> Result<Mesh> {
    if f.domain_dim() != g.domain_dim() {
        return Err(Error::DomainMismatch(format!(
            "dimensions {} and {}",
            f.domain_dim(),
            g.domain_dim()
        )));
    }
    let mut m = f.to_mesh(budget);
    triangulation::refine_mesh_to_pieces(&mut m, &g.carrier)?;
    for cell in g.carrier.cells() {
        if !m.covered_fraction(&cell).is_one() {
            return Err(Error::DomainMismatch(format!(
                "cell {cell} of the second carrier is not covered"
            )));
        }
    }
    m.set_attrs(2, |p, a| Ok(vec![a[0].clone(), g.evaluate_scalar(p)?]))?;
    Ok(m)
}

/// Precomputed data for testing `f ≤ m·g` on a closed set for many `m`.
pub struct DominanceCheck {
    points: Vec<(Point, Rational, Rational)>,
}

impl DominanceCheck {
    pub fn new(f: &ZMap, g: &ZMap, x: &ClosedSet) -> Result<DominanceCheck> {
        if f.codomain_dim() != 1 || g.codomain_dim() != 1 {
            return Err(Error::Precondition(
                "dominance needs scalar functions".into(),
            ));
        }
        let mut points = Vec::new();
        if let Some(q) = x.polyhedral_part() {
            if !q.is_empty() {
                let mut m = common_refinement(f, g, blowup_budget())?;
                triangulation::cut_to_polyhedron(&mut m, q).map_err(|e| match e {
                    Error::NotContained(g) => {
                        Error::DomainMismatch(format!("X leaves the domain at {g}"))
                    }
                    other => other,
                })?;
                let mut seen = std::collections::BTreeSet::new();
                for g in q.generators() {
                    for face in m.faces_with_vertices(|v| g.contains(m.point(v))) {
                        seen.extend(face);
                    }
                }
                let mut verts: Vec<usize> = seen.into_iter().collect();
                verts.sort_by(|a, b| m.point(*a).cmp(m.point(*b)));
                for v in verts {
                    let a = m.attrs(v);
                    points.push((m.point(v).clone(), a[0].clone(), a[1].clone()));
                }
            }
        }
        for p in x.isolated_points() {
            let fv = f.evaluate_scalar(p).map_err(|_| {
                Error::DomainMismatch(format!("point {p} of X is outside the domain"))
            })?;
            let gv = g.evaluate_scalar(p).map_err(|_| {
                Error::DomainMismatch(format!("point {p} of X is outside the domain"))
            })?;
            points.push((p.clone(), fv, gv));
        }
        Ok(DominanceCheck { points })
    }

    /// First point of X with `f(p) > m·g(p)`, if any.
    pub fn violation(&self, m: u64) -> Option<&(Point, Rational, Rational)> {
        let m = Rational::from_integer(BigInt::from(m));
        self.points.iter().find(|(_, f, g)| f > &(&m * g))
    }
}

/// `f(p) ≤ m·g(p)` for all `p ∈ X`; on failure returns a violating point.
pub fn leq_scalar_multiple(
    f: &ZMap,
    g: &ZMap,
    m: u64,
    x: &ClosedSet,
) -> Result<(bool, Option<Point>)> {
    if m == 0 {
        return Err(Error::Precondition("m must be a positive integer".into()));
    }
    let check = DominanceCheck::new(f, g, x)?;
    Ok(match check.violation(m) {
        Some((p, _, _)) => (false, Some(p.clone())),
        None => (true, None),
    })
}

#[derive(Serialize, Deserialize)]
struct RawZMap {
    carrier: SimplicialComplex,
    values: BTreeMap<usize, Point>,
}

impl Serialize for ZMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawZMap {
            carrier: self.carrier.clone(),
            values: self.values.iter().cloned().enumerate().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawZMap::deserialize(d)?;
        let n = raw.carrier.vertices().len();
        if raw.values.len() != n || raw.values.keys().any(|&k| k >= n) {
            return Err(serde::de::Error::custom(format!(
                "expected one value for each of the {n} carrier vertices"
            )));
        }
        extend_from_vertices(raw.carrier, raw.values.into_values().collect())
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::triangulation::cube_triangulation;

    fn p1(a: i64, b: i64) -> Point {
        Point::new(vec![ratio(a, b)])
    }

    fn hat() -> ZMap {
        let cells = vec![
            Simplex::new(vec![p1(0, 1), p1(1, 2)]).unwrap(),
            Simplex::new(vec![p1(1, 2), p1(1, 1)]).unwrap(),
        ];
        let k = SimplicialComplex::new(cells).unwrap();
        extend_from_vertices(k, vec![p1(0, 1), p1(1, 2), p1(0, 1)]).unwrap()
    }

    #[test]
    fn hat_pieces_are_integral() {
        let f = hat();
        let slopes: Vec<(BigInt, BigInt)> = f
            .pieces()
            .iter()
            .map(|p| (p.matrix[0][0].clone(), p.offset[0].clone()))
            .collect();
        assert_eq!(slopes, vec![(1.into(), 0.into()), ((-1).into(), 1.into())]);
        assert_eq!(f.evaluate_scalar(&p1(1, 4)).unwrap(), ratio(1, 4));
        assert_eq!(f.evaluate_scalar(&p1(1, 1)).unwrap(), int(0));
        assert!(matches!(
            f.evaluate(&p1(2, 1)),
            Err(Error::OutsideComplex(_))
        ));
    }

    #[test]
    fn divisibility_is_enforced() {
        let k = SimplicialComplex::new(vec![
            Simplex::new(vec![p1(0, 1), p1(1, 2)]).unwrap(),
            Simplex::new(vec![p1(1, 2), p1(1, 1)]).unwrap(),
        ])
        .unwrap();
        let err = extend_from_vertices(k, vec![p1(0, 1), p1(1, 3), p1(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::Divisibility { .. }));
    }

    #[test]
    fn non_regular_carrier_is_rejected() {
        let s = Simplex::new(vec![
            Point::from_ints(&[0, 0]),
            Point::from_ints(&[1, 0]),
            Point::from_ints(&[1, 2]),
        ])
        .unwrap();
        let k = SimplicialComplex::new(vec![s]).unwrap();
        let zero = Point::from_ints(&[0]);
        assert!(matches!(
            extend_from_vertices(k, vec![zero.clone(), zero.clone(), zero]),
            Err(Error::NonRegularCarrier(_))
        ));
    }

    #[test]
    fn hat_zero_set_and_preimages() {
        let f = hat();
        let z = f.zero_set();
        let expected =
            Polyhedron::new(1, vec![Simplex::point(p1(0, 1)), Simplex::point(p1(1, 1))]).unwrap();
        assert!(z.same_set(&expected));
        let pre0 = f
            .preimage_polyhedron(&Polyhedron::from_simplex(Simplex::point(p1(0, 1))))
            .unwrap();
        assert!(pre0.same_set(&expected));
        // the hat peaks at 1/2, so only the apex reaches [1/2, 1]
        let upper = Polyhedron::from_simplex(Simplex::new(vec![p1(1, 2), p1(1, 1)]).unwrap());
        let apex = f.preimage_polyhedron(&upper).unwrap();
        assert!(apex.same_set(&Polyhedron::from_simplex(Simplex::point(p1(1, 2)))));
        let quarter = Polyhedron::from_simplex(Simplex::new(vec![p1(1, 4), p1(1, 1)]).unwrap());
        let band = f.preimage_polyhedron(&quarter).unwrap();
        let mid = Polyhedron::from_simplex(Simplex::new(vec![p1(1, 4), p1(3, 4)]).unwrap());
        assert!(band.same_set(&mid));
    }

    #[test]
    fn constant_one_has_empty_zero_set() {
        let k = cube_triangulation(2);
        let one = ZMap::constant(k, Point::from_ints(&[1])).unwrap();
        assert!(one.zero_set().is_empty());
    }

    #[test]
    fn hat_oplus_hat() {
        let f = hat();
        let h = mv_combine(MvOp::Oplus, &f, Some(&f)).unwrap();
        assert_eq!(h.evaluate_scalar(&p1(1, 4)).unwrap(), ratio(1, 2));
        assert_eq!(h.evaluate_scalar(&p1(1, 2)).unwrap(), int(1));
        assert_eq!(h.evaluate_scalar(&p1(3, 8)).unwrap(), ratio(3, 4));
        let neg = mv_combine(MvOp::Neg, &f, None).unwrap();
        let one = mv_combine(MvOp::Oplus, &f, Some(&neg)).unwrap();
        assert!(one.values().iter().all(|v| v[0] == int(1)));
    }

    #[test]
    fn dominance_on_an_interval() {
        let f = hat();
        let zero = ZMap::constant(f.carrier().clone(), p1(0, 1)).unwrap();
        let x = ClosedSet::from_polyhedron(Polyhedron::from_simplex(
            Simplex::new(vec![p1(0, 1), p1(1, 1)]).unwrap(),
        ));
        let (ok, witness) = leq_scalar_multiple(&f, &zero, 3, &x).unwrap();
        assert!(!ok);
        assert_eq!(witness, Some(p1(1, 2)));
        assert_eq!(leq_scalar_multiple(&f, &f, 1, &x).unwrap(), (true, None));
    }

    #[test]
    fn zmap_json_round_trip() {
        let f = hat();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"values\":{\"0\":[\"0\"],\"1\":[\"1/2\"],\"2\":[\"0\"]}"));
        let back: ZMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }
}
