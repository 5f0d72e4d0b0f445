//! Rational simplicial complexes and rational polyhedra.
//!
//! Complexes are stored canonically: vertices in lexicographic order and
//! maximal cells as sorted vertex-index lists. Lower-dimensional faces are
//! implied. All refinements are built from stellar blow-ups, so every output
//! is a subdivision of its input.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{feasible, AffineFn, BBox, HalfspaceRep, Simplex};
use crate::mesh::{self, Mesh};
use crate::rational::{lcm, to_f64, Point, Rational};

pub const DEFAULT_BLOWUP_BUDGET: u64 = 1_000_000;
pub const BUDGET_ENV: &str = "MVTANGENT_BLOWUP_BUDGET";

/// Blow-up budget, overridable through `MVTANGENT_BLOWUP_BUDGET`.
pub fn blowup_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BLOWUP_BUDGET)
}

#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    dim: usize,
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
}

impl std::fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.cells()).finish()
    }
}

impl SimplicialComplex {
    /// Build a complex from cells (faces may be listed too); rejects
    /// collections where two cells meet outside a common face.
    pub fn new(cells: Vec<Simplex>) -> Result<SimplicialComplex> {
        validate_complex(&cells)?;
        Ok(Self::from_cells_unchecked(cells))
    }

    pub(crate) fn from_cells_unchecked(cells: Vec<Simplex>) -> SimplicialComplex {
        let dim = cells.first().map_or(0, Simplex::ambient_dim);
        let vertices: Vec<Point> = cells
            .iter()
            .flat_map(|c| c.vertices().iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let ids: BTreeSet<Vec<usize>> = cells
            .iter()
            .map(|c| {
                c.vertices()
                    .iter()
                    .map(|v| vertices.binary_search(v).unwrap())
                    .collect()
            })
            .collect();
        SimplicialComplex {
            dim,
            vertices,
            cells: mesh::maximal_sets(ids),
        }
    }

    /// Canonical complex of a mesh, plus the mesh id of every vertex.
    pub(crate) fn from_mesh(m: &Mesh) -> (SimplicialComplex, Vec<usize>) {
        let used: BTreeSet<usize> = m.cells().flat_map(|(_, c)| c.iter().copied()).collect();
        let mut order: Vec<usize> = used.into_iter().collect();
        order.sort_by(|a, b| m.point(*a).cmp(m.point(*b)));
        let vertices: Vec<Point> = order.iter().map(|&id| m.point(id).clone()).collect();
        let mut rank = vec![usize::MAX; m.vertex_count()];
        for (i, &id) in order.iter().enumerate() {
            rank[id] = i;
        }
        let mut cells: Vec<Vec<usize>> = m
            .cells()
            .map(|(_, c)| {
                let mut ids: Vec<usize> = c.iter().map(|&v| rank[v]).collect();
                ids.sort_unstable();
                ids
            })
            .collect();
        cells.sort();
        (
            SimplicialComplex {
                dim: m.dim(),
                vertices,
                cells,
            },
            order,
        )
    }

    pub(crate) fn to_mesh(&self, width: usize, budget: u64) -> Mesh {
        let mut m = Mesh::new(self.dim, width, budget);
        for v in &self.vertices {
            m.add_vertex(v.clone(), Vec::new());
        }
        for c in &self.cells {
            m.add_cell(c.clone());
        }
        m
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex_index(&self, p: &Point) -> Option<usize> {
        self.vertices.binary_search(p).ok()
    }

    /// Maximal cells as sorted vertex-index lists.
    pub fn cell_indices(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> Simplex {
        self.simplex_of(&self.cells[i])
    }

    pub fn simplex_of(&self, ids: &[usize]) -> Simplex {
        Simplex::new(ids.iter().map(|&v| self.vertices[v].clone()).collect())
            .expect("cells of a complex are simplexes")
    }

    pub fn cells(&self) -> Vec<Simplex> {
        self.cells.iter().map(|c| self.simplex_of(c)).collect()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Every face of every cell.
    pub fn faces(&self) -> Vec<Simplex> {
        let mut ids: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &self.cells {
            for mask in 1u64..(1 << c.len()) {
                ids.insert(
                    c.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v)
                        .collect(),
                );
            }
        }
        ids.iter().map(|f| self.simplex_of(f)).collect()
    }

    pub fn is_regular(&self) -> bool {
        self.cells().iter().all(Simplex::is_regular)
    }

    /// First non-regular maximal cell, in lexicographic order.
    pub fn first_non_regular(&self) -> Option<Simplex> {
        let mut bad: Vec<Simplex> = self
            .cells()
            .into_iter()
            .filter(|c| !c.is_regular())
            .collect();
        bad.sort();
        bad.into_iter().next()
    }

    /// A cell containing `p`, with the barycentric weights of `p`.
    pub fn locate(&self, p: &Point) -> Option<(usize, Vec<Rational>)> {
        if p.dim() != self.dim {
            return None;
        }
        self.cells.iter().enumerate().find_map(|(i, c)| {
            let s = self.simplex_of(c);
            if !s.bbox().contains(p) {
                return None;
            }
            s.barycentric(p).ok().flatten().map(|t| (i, t))
        })
    }

    pub fn support_contains(&self, p: &Point) -> bool {
        self.locate(p).is_some()
    }

    /// The face of the complex whose relative interior contains `p`.
    pub fn carrier_face(&self, p: &Point) -> Option<Simplex> {
        let (i, _) = self.locate(p)?;
        self.cell(i).smallest_containing_face(p).ok()
    }

    /// Maximal faces contained in `q`.
    pub fn faces_in(&self, q: &Polyhedron) -> Vec<Simplex> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        for g in q.generators() {
            let inside: Vec<bool> = self.vertices.iter().map(|v| g.contains(v)).collect();
            for c in &self.cells {
                let f: Vec<usize> = c.iter().copied().filter(|&v| inside[v]).collect();
                if !f.is_empty() {
                    found.insert(f);
                }
            }
        }
        mesh::maximal_sets(found)
            .iter()
            .map(|f| self.simplex_of(f))
            .collect()
    }

    pub fn bbox(&self) -> Option<BBox> {
        BBox::of(self.vertices.iter())
    }

    /// The support `|K|` as a polyhedron.
    pub fn support(&self) -> Polyhedron {
        Polyhedron {
            dim: self.dim,
            generators: self.cells(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawComplex {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default)]
    vertices: Vec<Point>,
    cells: Vec<Simplex>,
}

impl Serialize for SimplicialComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawComplex {
            dim: Some(self.dim),
            vertices: self.vertices.clone(),
            cells: self.cells(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimplicialComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawComplex::deserialize(d)?;
        if raw.cells.is_empty() {
            return Err(serde::de::Error::custom(
                "a complex needs at least one cell",
            ));
        }
        let k = SimplicialComplex::new(raw.cells).map_err(serde::de::Error::custom)?;
        if raw.dim.is_some_and(|n| n != k.dim) {
            return Err(serde::de::Error::custom(
                "declared dimension does not match the cells",
            ));
        }
        Ok(k)
    }
}

/// Check that cells pairwise meet in a common face (possibly empty).
pub fn validate_complex(cells: &[Simplex]) -> Result<()> {
    let Some(first) = cells.first() else {
        return Ok(());
    };
    let n = first.ambient_dim();
    if let Some(bad) = cells.iter().find(|c| c.ambient_dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.ambient_dim(),
        });
    }
    let mut ids: BTreeMap<&Point, usize> = BTreeMap::new();
    for c in cells {
        for v in c.vertices() {
            let next = ids.len();
            ids.entry(v).or_insert(next);
        }
    }
    let mut approx: Vec<Vec<f64>> = vec![Vec::new(); ids.len()];
    for (v, &i) in &ids {
        approx[i] = v.to_f64();
    }
    let cells: Vec<Cell> = cells.iter().map(|c| Cell::new(c, &ids)).collect();
    // sweep along the first coordinate
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&i, &j| cells[i].lo[0].total_cmp(&cells[j].lo[0]));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if cells[j].lo[0] > cells[i].hi[0] {
                break;
            }
            if cells[i].boxes_meet(&cells[j]) && !meet_in_common_face(&cells[i], &cells[j], &approx)
            {
                return Err(Error::NotCommonFace {
                    first: cells[i].simplex.to_string(),
                    second: cells[j].simplex.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Entries of `v` when all are below 2^48 in absolute value, so that sums
/// of a few products stay within `i128`.
fn small(v: Vec<BigInt>) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| i64::try_from(x).ok().filter(|x| x.unsigned_abs() < 1 << 48))
        .collect()
}

/// A simplex with vertex ids, its half-space description and a slightly
/// enlarged floating-point bounding box.
struct Cell<'a> {
    simplex: &'a Simplex,
    ids: Vec<usize>,
    rep: HalfspaceRep,
    approx: Vec<(Vec<f64>, f64)>,
    /// Facets with integer coefficients and vertices as
    /// `den(v)·(v, 1)`, when these fit in machine integers.
    int_facets: Option<Vec<Vec<i64>>>,
    int_vertices: Option<Vec<Vec<i64>>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl<'a> Cell<'a> {
    fn new(simplex: &'a Simplex, ids: &BTreeMap<&Point, usize>) -> Cell<'a> {
        let rep = simplex.halfspaces();
        let approx = rep
            .facets
            .iter()
            .map(|f| (f.coeffs.iter().map(to_f64).collect(), to_f64(&f.constant)))
            .collect();
        let rep_facets_small = |rep: &HalfspaceRep| -> Option<Vec<Vec<i64>>> {
            rep.facets
                .iter()
                .map(|f| {
                    let den = f
                        .coeffs
                        .iter()
                        .chain([&f.constant])
                        .fold(BigInt::one(), |d, c| lcm(&d, c.denom()));
                    small(
                        f.coeffs
                            .iter()
                            .chain([&f.constant])
                            .map(|c| c.numer() * (&den / c.denom()))
                            .collect(),
                    )
                })
                .collect()
        };
        let bb = simplex.bbox();
        let widen = |x: f64, dir: f64| x + dir * (x.abs() * 1e-9 + 1e-300);
        Cell {
            simplex,
            ids: simplex.vertices().iter().map(|v| ids[v]).collect(),
            approx,
            int_facets: rep_facets_small(&rep),
            int_vertices: simplex
                .vertices()
                .iter()
                .map(|v| small(v.homogeneous()))
                .collect(),
            rep,
            lo: bb
                .lo
                .coords()
                .iter()
                .map(|x| widen(to_f64(x), -1.0))
                .collect(),
            hi: bb
                .hi
                .coords()
                .iter()
                .map(|x| widen(to_f64(x), 1.0))
                .collect(),
        }
    }

    fn boxes_meet(&self, other: &Cell) -> bool {
        (0..self.lo.len()).all(|i| self.lo[i] <= other.hi[i] && other.lo[i] <= self.hi[i])
    }

    /// Bit `i` is set when vertex `i` of `self` is a vertex of `other`.
    fn mask_of(&self, other: &Cell) -> u64 {
        self.ids
            .iter()
            .enumerate()
            .filter(|(_, v)| other.ids.contains(v))
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// Some facet of `self` opposite a vertex outside `other` has every
    /// vertex of `other` outside `self` strictly below it.
    fn separates(&self, other: &Cell, mine: u64, theirs: u64, approx: &[Vec<f64>]) -> bool {
        (0..self.approx.len()).any(|i| {
            mine & 1 << i == 0
                && other.ids.iter().enumerate().all(|(j, &v)| {
                    theirs & 1 << j != 0
                        || self
                            .facet_sign(i, v, approx)
                            .unwrap_or_else(|| self.exact_facet_sign(i, other, j))
                            == Ordering::Less
                })
        })
    }

    /// Sign of facet `i` at vertex `j` of `other`.
    fn exact_facet_sign(&self, i: usize, other: &Cell, j: usize) -> Ordering {
        if let (Some(f), Some(v)) = (&self.int_facets, &other.int_vertices) {
            let value: i128 = f[i]
                .iter()
                .zip(&v[j])
                .map(|(&a, &b)| i128::from(a) * i128::from(b))
                .sum();
            return value.cmp(&0);
        }
        self.rep.facets[i]
            .eval(&other.simplex.vertices()[j])
            .cmp(&Rational::zero())
    }

    /// Sign of facet `i` at vertex `v` from floating point, when it is
    /// unambiguous.
    fn facet_sign(&self, i: usize, v: usize, approx: &[Vec<f64>]) -> Option<Ordering> {
        let (coeffs, constant) = &self.approx[i];
        let x = &approx[v];
        let value = coeffs
            .iter()
            .zip(x)
            .fold(*constant, |acc, (a, b)| acc + a * b);
        let scale = coeffs
            .iter()
            .zip(x)
            .fold(constant.abs(), |acc, (a, b)| acc + (a * b).abs());
        if value < -1e-9 * scale {
            Some(Ordering::Less)
        } else if value > 1e-9 * scale {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

fn meet_in_common_face(a: &Cell, b: &Cell, approx: &[Vec<f64>]) -> bool {
    if a.ids.len() <= 64 && b.ids.len() <= 64 {
        let (in_b, in_a) = (a.mask_of(b), b.mask_of(a));
        if a.separates(b, in_b, in_a, approx) || b.separates(a, in_a, in_b, approx) {
            return true;
        }
    }
    let common: Vec<usize> = a
        .ids
        .iter()
        .copied()
        .filter(|v| b.ids.contains(v))
        .collect();
    if common.len() == a.ids.len() || common.len() == b.ids.len() {
        return true;
    }
    let general = a.ids.len() > 64
        || b.ids.len() > 64
        || !a.rep.equalities.is_empty()
        || !b.rep.equalities.is_empty();
    if general && (separated(a, b, &common, approx) || separated(b, a, &common, approx)) {
        return true;
    }
    if split_by_centroids(a, b, &common, approx) {
        return true;
    }
    if split_through_common(a, b, &common, approx) {
        return true;
    }
    if common.is_empty() && split_by_axis(a, b, approx) {
        return true;
    }
    // look for a point of a ∩ b with positive weight on a vertex of `a`
    // outside `common`
    let (ra, rb) = (&a.rep, &b.rep);
    let n = a.simplex.ambient_dim();
    let mut weight = AffineFn {
        coeffs: vec![Rational::zero(); n],
        constant: Rational::zero(),
    };
    if ra.facets.is_empty() {
        weight.constant = Rational::one();
    }
    for (f, v) in ra.facets.iter().zip(&a.ids) {
        if !common.contains(v) {
            for (w, c) in weight.coeffs.iter_mut().zip(&f.coeffs) {
                *w += c;
            }
            weight.constant += &f.constant;
        }
    }
    let equalities: Vec<AffineFn> = ra
        .equalities
        .iter()
        .chain(&rb.equalities)
        .cloned()
        .collect();
    let mut inequalities: Vec<(AffineFn, bool)> = ra
        .facets
        .iter()
        .chain(&rb.facets)
        .map(|f| (f.clone(), false))
        .collect();
    inequalities.push((weight, true));
    !feasible(&equalities, &inequalities)
}

/// The hyperplane through `conv(common)` normal to the difference of the
/// centroids, projected off the directions of `common`. When it puts the
/// other vertices of `a` and `b` strictly on opposite sides, `a ∩ b` lies in
/// `conv(common)`.
/// A hyperplane through the common face with the remaining vertices of `a`
/// strictly on one side and those of `b` strictly on the other. The
/// candidates are spanned by the common face and rays towards remaining
/// vertices; if none separates strictly, the sum of the weakly separating
/// ones is tried. Full-dimensional cells only.
fn split_through_common(a: &Cell, b: &Cell, common: &[usize], approx: &[Vec<f64>]) -> bool {
    let n = a.simplex.ambient_dim();
    if common.is_empty() || a.ids.len() != n + 1 || b.ids.len() != n + 1 {
        return false;
    }
    let rest = |c: &Cell| -> Vec<usize> {
        c.ids
            .iter()
            .copied()
            .filter(|v| !common.contains(v))
            .collect()
    };
    let (rest_a, rest_b) = (rest(a), rest(b));
    let rays: Vec<usize> = rest_a.iter().chain(&rest_b).copied().collect();
    let origin = &approx[common[0]];
    let offset =
        |v: usize| -> Vec<f64> { approx[v].iter().zip(origin).map(|(x, o)| x - o).collect() };
    // +1 or -1 when clearly on that side, 0 when too close to call
    let side = |normal: &[f64], v: usize| -> i8 {
        let value: f64 = normal.iter().zip(offset(v)).map(|(w, d)| w * d).sum();
        let scale: f64 = normal
            .iter()
            .zip(&approx[v])
            .zip(origin)
            .map(|((w, x), o)| w.abs() * (x.abs() + o.abs()))
            .sum();
        if value > 1e-9 * scale {
            1
        } else if value < -1e-9 * scale {
            -1
        } else {
            0
        }
    };
    let face: Vec<Vec<f64>> = common[1..].iter().map(|&v| offset(v)).collect();
    let mut weak: Vec<(Vec<usize>, bool)> = Vec::new();
    let mut total = vec![0.0; n];
    for chosen in subsets(rays.len(), n - common.len()) {
        let chosen: Vec<usize> = chosen.into_iter().map(|i| rays[i]).collect();
        let rows: Vec<Vec<f64>> = face
            .iter()
            .cloned()
            .chain(chosen.iter().map(|&v| offset(v)))
            .collect();
        let size = rows.iter().flatten().fold(0.0, |m: f64, x| m.max(x.abs()));
        let Some(normal) = null_vector(rows, &(1e-12 * size)) else {
            continue;
        };
        let sa: Vec<i8> = rest_a.iter().map(|&v| side(&normal, v)).collect();
        let sb: Vec<i8> = rest_b.iter().map(|&v| side(&normal, v)).collect();
        if sa.iter().chain(&sb).all(|&s| s == 0) {
            continue;
        }
        for flip in [false, true] {
            let sign = if flip { -1 } else { 1 };
            if sa.iter().all(|&s| s * sign > 0) && sb.iter().all(|&s| s * sign < 0) {
                if exact_split(a, b, common, &[(chosen.clone(), flip)]) {
                    return true;
                }
            } else if sa.iter().all(|&s| s * sign >= 0) && sb.iter().all(|&s| s * sign <= 0) {
                let size = normal.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
                for (t, x) in total.iter_mut().zip(&normal) {
                    *t += x / size * f64::from(sign);
                }
                weak.push((chosen.clone(), flip));
            }
        }
    }
    weak.len() > 1
        && rest_a.iter().all(|&v| side(&total, v) > 0)
        && rest_b.iter().all(|&v| side(&total, v) < 0)
        && exact_split(a, b, common, &weak)
}

/// Exact check of the normal `Σ ±w/|w|∞` built from the given choices of
/// rays, `true` marking a flipped sign.
fn exact_split(a: &Cell, b: &Cell, common: &[usize], choices: &[(Vec<usize>, bool)]) -> bool {
    let point = |id: usize| -> &Point {
        match a.ids.iter().position(|&v| v == id) {
            Some(i) => &a.simplex.vertices()[i],
            None => &b.simplex.vertices()[b
                .ids
                .iter()
                .position(|&v| v == id)
                .expect("vertex of a or b")],
        }
    };
    let origin = point(common[0]);
    let face: Vec<Vec<Rational>> = common[1..]
        .iter()
        .map(|&v| point(v).sub(origin).coords().to_vec())
        .collect();
    let mut normal = Point::zeros(origin.dim());
    for (chosen, flip) in choices {
        let rows = face
            .iter()
            .cloned()
            .chain(
                chosen
                    .iter()
                    .map(|&v| point(v).sub(origin).coords().to_vec()),
            )
            .collect();
        let Some(w) = null_vector(rows, &Rational::zero()) else {
            continue;
        };
        let size = w.iter().map(Signed::abs).max().expect("nonempty");
        let weight = if *flip { -size.recip() } else { size.recip() };
        normal = normal.add_scaled(&weight, &Point::new(w));
    }
    let side = |c: &Cell| -> Vec<Rational> {
        c.ids
            .iter()
            .zip(c.simplex.vertices())
            .filter(|(v, _)| !common.contains(v))
            .map(|(_, p)| normal.dot(&p.sub(origin)))
            .collect()
    };
    side(a).iter().all(Signed::is_positive) && side(b).iter().all(Signed::is_negative)
}

/// A nonzero vector orthogonal to `rows`, when they have rank one less than
/// their length. Pivots of absolute value at most `negligible` count as zero.
fn null_vector<T: Clone + Signed + PartialOrd>(
    mut rows: Vec<Vec<T>>,
    negligible: &T,
) -> Option<Vec<T>> {
    let n = rows.len() + 1;
    let mut pivots = Vec::new();
    for c in 0..n {
        let r = pivots.len();
        if r == rows.len() {
            break;
        }
        let p = (r..rows.len()).max_by(|&i, &j| {
            rows[i][c]
                .abs()
                .partial_cmp(&rows[j][c].abs())
                .unwrap_or(Ordering::Equal)
        })?;
        if rows[p][c].abs() <= *negligible {
            continue;
        }
        rows.swap(r, p);
        let inv = T::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..n {
                    let t = rows[r][j].clone() * f.clone();
                    rows[i][j] = rows[i][j].clone() - t;
                }
            }
        }
        pivots.push(c);
    }
    if pivots.len() != rows.len() {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut x = vec![T::zero(); n];
    x[free] = T::one();
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = -rows[i][free].clone();
    }
    Some(x)
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn split_by_centroids(a: &Cell, b: &Cell, common: &[usize], approx: &[Vec<f64>]) -> bool {
    if !split_by_centroids_approx(a, b, common, approx) {
        return false;
    }
    let centroid = |c: &Cell| c.simplex.barycenter();
    let mut normal = centroid(a).sub(&centroid(b));
    let point = |id: usize| {
        a.simplex.vertices()[a.ids.iter().position(|&v| v == id).expect("common vertex")].clone()
    };
    let origin = match common.first() {
        Some(&c) => point(c),
        None => centroid(a)
            .add(&centroid(b))
            .scale(&Rational::new(1.into(), 2.into())),
    };
    let mut basis: Vec<Point> = Vec::new();
    for &c in common.iter().skip(1) {
        let mut d = point(c).sub(&origin);
        for e in &basis {
            d = d.add_scaled(&-(d.dot(e) / e.dot(e)), e);
        }
        if !d.coords().iter().all(Zero::is_zero) {
            basis.push(d);
        }
    }
    for e in &basis {
        normal = normal.add_scaled(&-(normal.dot(e) / e.dot(e)), e);
    }
    let side = |c: &Cell| -> Vec<Rational> {
        c.ids
            .iter()
            .zip(c.simplex.vertices())
            .filter(|(v, _)| !common.contains(v))
            .map(|(_, p)| normal.dot(&p.sub(&origin)))
            .collect()
    };
    side(a).iter().all(Signed::is_positive) && side(b).iter().all(Signed::is_negative)
}

/// Floating-point version of `split_by_centroids`; false only when some
/// vertex is clearly on the wrong side.
fn split_by_centroids_approx(a: &Cell, b: &Cell, common: &[usize], approx: &[Vec<f64>]) -> bool {
    let n = a.lo.len();
    let centroid = |c: &Cell| -> Vec<f64> {
        (0..n)
            .map(|k| c.ids.iter().map(|&v| approx[v][k]).sum::<f64>() / c.ids.len() as f64)
            .collect()
    };
    let (ca, cb) = (centroid(a), centroid(b));
    let mut normal: Vec<f64> = (0..n).map(|k| ca[k] - cb[k]).collect();
    let origin: Vec<f64> = match common.first() {
        Some(&c) => approx[c].clone(),
        None => (0..n).map(|k| (ca[k] + cb[k]) / 2.0).collect(),
    };
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for &c in common.iter().skip(1) {
        let mut d: Vec<f64> = (0..n).map(|k| approx[c][k] - origin[k]).collect();
        for e in &basis {
            let t = dot(&d, e) / dot(e, e);
            d.iter_mut().zip(e).for_each(|(x, y)| *x -= t * y);
        }
        if dot(&d, &d) > 0.0 {
            basis.push(d);
        }
    }
    for e in &basis {
        let t = dot(&normal, e) / dot(e, e);
        normal.iter_mut().zip(e).for_each(|(x, y)| *x -= t * y);
    }
    let scale = dot(&normal, &normal).sqrt();
    let clearly_wrong = |c: &Cell, sign: f64| {
        c.ids.iter().filter(|v| !common.contains(v)).any(|&v| {
            let d: Vec<f64> = (0..n).map(|k| approx[v][k] - origin[k]).collect();
            sign * dot(&normal, &d) < -1e-6 * scale * dot(&d, &d).sqrt()
        })
    };
    !clearly_wrong(a, 1.0) && !clearly_wrong(b, -1.0)
}

/// Disjointness by a separating direction: an affine-hull normal of either
/// simplex, or in 3-space the cross product of an edge of each (facet
/// normals are covered by [`Cell::separates`]). The most promising
/// direction is picked in floating point; a clear gap is accepted as is,
/// a narrow one is checked exactly.
fn split_by_axis<'c>(a: &'c Cell, b: &'c Cell, approx: &[Vec<f64>]) -> bool {
    enum Axis<'r> {
        Normal(&'r AffineFn),
        Cross(usize, usize, usize, usize),
    }
    // relative gap between the projections, in floating point
    let gap = |axis: &[f64]| -> Option<f64> {
        let project = |ids: &[usize]| {
            ids.iter().fold(
                (f64::INFINITY, f64::NEG_INFINITY, 0.0),
                |(lo, hi, scale), &v| {
                    let (x, s) = axis
                        .iter()
                        .zip(&approx[v])
                        .fold((0.0, 0.0), |(x, s), (p, q)| (x + p * q, s + (p * q).abs()));
                    (lo.min(x), hi.max(x), f64::max(scale, s))
                },
            )
        };
        let ((alo, ahi, sa), (blo, bhi, sb)) = (project(&a.ids), project(&b.ids));
        let scale = sa.max(sb);
        (scale > 0.0).then(|| (blo - ahi).max(alo - bhi) / scale)
    };
    let mut best: Option<(f64, Axis<'c>)> = None;
    let mut consider = |g: Option<f64>, axis: Axis<'c>| {
        if let Some(g) = g {
            if best.as_ref().map_or(true, |(h, _)| g > *h) {
                best = Some((g, axis));
            }
        }
    };
    for f in a.rep.equalities.iter().chain(&b.rep.equalities) {
        consider(
            gap(&f.coeffs.iter().map(to_f64).collect::<Vec<_>>()),
            Axis::Normal(f),
        );
    }
    if a.lo.len() == 3 {
        let edge = |c: &Cell, i: usize, j: usize| -> [f64; 3] {
            let (p, q) = (&approx[c.ids[i]], &approx[c.ids[j]]);
            [q[0] - p[0], q[1] - p[1], q[2] - p[2]]
        };
        for i in 0..a.ids.len() {
            for j in i + 1..a.ids.len() {
                let u = edge(a, i, j);
                for k in 0..b.ids.len() {
                    for l in k + 1..b.ids.len() {
                        let v = edge(b, k, l);
                        let w = [
                            u[1] * v[2] - u[2] * v[1],
                            u[2] * v[0] - u[0] * v[2],
                            u[0] * v[1] - u[1] * v[0],
                        ];
                        consider(gap(&w), Axis::Cross(i, j, k, l));
                    }
                }
            }
        }
    }
    let Some((gap, axis)) = best else {
        return false;
    };
    if gap <= 0.0 {
        return false;
    }
    // the floating-point axis is itself a valid direction; rounding in the
    // projections stays far below this margin
    if gap > 1e-9 {
        return true;
    }
    let axis = match axis {
        Axis::Normal(f) => Point::new(f.coeffs.clone()),
        Axis::Cross(i, j, k, l) => {
            let (va, vb) = (a.simplex.vertices(), b.simplex.vertices());
            let (u, v) = (va[j].sub(&va[i]), vb[l].sub(&vb[k]));
            Point::new(vec![
                &u[1] * &v[2] - &u[2] * &v[1],
                &u[2] * &v[0] - &u[0] * &v[2],
                &u[0] * &v[1] - &u[1] * &v[0],
            ])
        }
    };
    let values =
        |c: &Cell| -> Vec<Rational> { c.simplex.vertices().iter().map(|p| axis.dot(p)).collect() };
    let (va, vb) = (values(a), values(b));
    let (amax, amin) = (
        va.iter().max().expect("vertex"),
        va.iter().min().expect("vertex"),
    );
    let (bmax, bmin) = (
        vb.iter().max().expect("vertex"),
        vb.iter().min().expect("vertex"),
    );
    amax < bmin || bmax < amin
}

/// A facet hyperplane of `a` opposite a vertex outside `common`, with every
/// vertex of `b` outside `common` strictly beyond it, forces
/// `a ∩ b ⊆ conv(common)`.
fn separated(a: &Cell, b: &Cell, common: &[usize], approx: &[Vec<f64>]) -> bool {
    let rest: Vec<(usize, &Point)> = b
        .ids
        .iter()
        .zip(b.simplex.vertices())
        .filter(|(v, _)| !common.contains(v))
        .map(|(&v, p)| (v, p))
        .collect();
    let mut unsure = Vec::new();
    for i in (0..a.approx.len()).filter(|&i| !common.contains(&a.ids[i])) {
        let signs: Vec<Option<Ordering>> = rest
            .iter()
            .map(|&(v, _)| a.facet_sign(i, v, approx))
            .collect();
        if signs.iter().all(|s| *s == Some(Ordering::Less)) {
            return true;
        }
        if signs
            .iter()
            .all(|s| s.map_or(true, |o| o == Ordering::Less))
        {
            unsure.push(i);
        }
    }
    unsure.into_iter().any(|i| {
        rest.iter()
            .all(|(_, p)| a.rep.facets[i].eval(p).is_negative())
    }) || a.rep.equalities.iter().any(|e| {
        let values: Vec<Rational> = rest.iter().map(|(_, p)| e.eval(p)).collect();
        values.iter().all(Signed::is_negative) || values.iter().all(Signed::is_positive)
    })
}

/// True when `fine` is a subdivision of `coarse`: same support and every
/// cell of `fine` lies in a cell of `coarse`.
pub fn is_subdivision(fine: &SimplicialComplex, coarse: &SimplicialComplex) -> bool {
    if fine.dim() != coarse.dim() {
        return false;
    }
    let coarse_cells = coarse.cells();
    let boxes: Vec<BBox> = coarse_cells.iter().map(Simplex::bbox).collect();
    let inside = fine.cells().iter().all(|c| {
        let bb = c.bbox();
        coarse_cells
            .iter()
            .zip(&boxes)
            .any(|(k, kb)| kb.overlaps(&bb) && k.contains_simplex(c))
    });
    if !inside {
        return false;
    }
    let m = fine.to_mesh(0, 0);
    coarse_cells.iter().all(|k| m.covered_fraction(k).is_one())
}

/// Stellar blow-up of `k` at `p ∈ |k|`.
pub fn stellar_blowup(k: &SimplicialComplex, p: &Point) -> Result<SimplicialComplex> {
    if p.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: p.dim(),
        });
    }
    let mut m = k.to_mesh(0, blowup_budget());
    m.blowup_at(p)?;
    Ok(SimplicialComplex::from_mesh(&m).0)
}

/// Regular subdivision obtained by iterated stellar blow-ups.
pub fn regularize(k: &SimplicialComplex) -> Result<SimplicialComplex> {
    regularize_with_budget(k, blowup_budget())
}

pub fn regularize_with_budget(k: &SimplicialComplex, budget: u64) -> Result<SimplicialComplex> {
    let mut m = k.to_mesh(0, budget);
    m.regularize()?;
    Ok(SimplicialComplex::from_mesh(&m).0)
}

/// Cut `m` so that every generator of `q` is a union of faces; errors when
/// a generator leaves the support.
pub(crate) fn cut_to_polyhedron(m: &mut Mesh, q: &Polyhedron) -> Result<()> {
    for g in q.generators() {
        if g.ambient_dim() != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                got: g.ambient_dim(),
            });
        }
        m.cut_by_simplex(g, true)?;
        if !m.covered_fraction(g).is_one() {
            return Err(Error::NotContained(g.to_string()));
        }
    }
    Ok(())
}

/// Regular subdivision `Δ` of `k` in which `q` is the union of the faces of
/// `Δ` it contains.
pub fn subdivide_with_subpolyhedron(
    k: &SimplicialComplex,
    q: &Polyhedron,
) -> Result<SimplicialComplex> {
    let mut m = k.to_mesh(0, blowup_budget());
    cut_to_polyhedron(&mut m, q)?;
    m.regularize()?;
    for g in q.generators() {
        if !m.covered_fraction(g).is_one() {
            return Err(Error::Inconsistent(format!(
                "generator {g} is not a union of faces after subdivision"
            )));
        }
    }
    Ok(SimplicialComplex::from_mesh(&m).0)
}

/// Regular subdivision of `k` refining the cells of `pieces`, i.e. every
/// cell of the output lies in a cell of `pieces`. Requires `|k| ⊆ |pieces|`.
pub fn refine_to_pieces(
    k: &SimplicialComplex,
    pieces: &SimplicialComplex,
) -> Result<SimplicialComplex> {
    let mut m = k.to_mesh(0, blowup_budget());
    refine_mesh_to_pieces(&mut m, pieces)?;
    m.regularize()?;
    Ok(SimplicialComplex::from_mesh(&m).0)
}

pub(crate) fn refine_mesh_to_pieces(m: &mut Mesh, pieces: &SimplicialComplex) -> Result<()> {
    let region = m.bbox();
    let cells = pieces.cells();
    for c in &cells {
        if region.as_ref().is_some_and(|r| r.overlaps(&c.bbox())) {
            m.cut_by_simplex(c, true)?;
        }
    }
    let boxes: Vec<BBox> = cells.iter().map(Simplex::bbox).collect();
    for (_, cell) in m.cells() {
        let s = m.cell_simplex(cell);
        let bb = s.bbox();
        if !cells
            .iter()
            .zip(&boxes)
            .any(|(c, cb)| cb.overlaps(&bb) && c.contains_simplex(&s))
        {
            return Err(Error::DomainMismatch(format!(
                "cell {s} is not covered by the domain"
            )));
        }
    }
    Ok(())
}

/// Kuhn triangulation of `[0,1]^n` into `n!` unimodular simplexes.
pub fn cube_triangulation(n: usize) -> SimplicialComplex {
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &perms {
            for i in (0..n).filter(|i| !p.contains(i)) {
                next.push([p.clone(), vec![i]].concat());
            }
        }
        perms = next;
    }
    let cells = perms
        .into_iter()
        .map(|perm| {
            let mut v = Point::zeros(n);
            let mut vs = vec![v.clone()];
            for i in perm {
                v[i] = Rational::one();
                vs.push(v.clone());
            }
            Simplex::new(vs).expect("Kuhn simplex")
        })
        .collect();
    SimplicialComplex::from_cells_unchecked(cells)
}

/// A rational polyhedron given as a finite union of rational simplexes.
#[derive(Clone, PartialEq, Eq)]
pub struct Polyhedron {
    dim: usize,
    generators: Vec<Simplex>,
}

impl std::fmt::Debug for Polyhedron {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "∅ ⊆ R^{}", self.dim);
        }
        f.debug_list().entries(&self.generators).finish()
    }
}

impl Polyhedron {
    pub fn new(dim: usize, generators: Vec<Simplex>) -> Result<Polyhedron> {
        if let Some(bad) = generators.iter().find(|g| g.ambient_dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.ambient_dim(),
            });
        }
        Ok(Polyhedron { dim, generators })
    }

    pub fn from_simplex(s: Simplex) -> Polyhedron {
        Polyhedron {
            dim: s.ambient_dim(),
            generators: vec![s],
        }
    }

    pub fn empty(dim: usize) -> Polyhedron {
        Polyhedron {
            dim,
            generators: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Simplex] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.generators.iter().any(|g| g.contains(p))
    }

    /// Exact test of `s ⊆ self`.
    pub fn contains_simplex(&self, s: &Simplex) -> bool {
        if s.ambient_dim() != self.dim {
            return false;
        }
        if self.generators.iter().any(|g| g.contains_simplex(s)) {
            return true;
        }
        let bb = s.bbox();
        let relevant: Vec<&Simplex> = self
            .generators
            .iter()
            .filter(|g| g.bbox().overlaps(&bb))
            .collect();
        uncovered(s, &relevant).is_empty()
    }

    pub fn contains(&self, other: &Polyhedron) -> bool {
        other.generators.iter().all(|g| self.contains_simplex(g))
    }

    pub fn same_set(&self, other: &Polyhedron) -> bool {
        self.dim == other.dim && self.contains(other) && other.contains(self)
    }

    /// `s ∩ self` as a union of simplexes.
    pub fn intersect_simplex(&self, s: &Simplex) -> Vec<Simplex> {
        let bb = s.bbox();
        let relevant: Vec<&Simplex> = self
            .generators
            .iter()
            .filter(|g| g.bbox().overlaps(&bb))
            .collect();
        if relevant.is_empty() {
            return Vec::new();
        }
        let mut m = Mesh::from_simplexes(self.dim, [s], u64::MAX);
        for g in &relevant {
            m.cut_by_simplex(g, true).expect("unbounded budget");
        }
        let mut found: BTreeSet<Simplex> = BTreeSet::new();
        for g in &relevant {
            for f in m.faces_with_vertices(|v| g.contains(m.point(v))) {
                found.insert(m.cell_simplex(&f));
            }
        }
        drop_faces(found)
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut found: BTreeSet<Simplex> = BTreeSet::new();
        for g in &self.generators {
            found.extend(other.intersect_simplex(g));
        }
        Ok(Polyhedron {
            dim: self.dim,
            generators: drop_faces(found),
        })
    }
}

/// Pieces of `s` left after removing each generator in turn. A piece that
/// survives has a dense subset outside every generator, so `s ⊆ ∪ gens`
/// exactly when nothing survives.
fn uncovered(s: &Simplex, gens: &[&Simplex]) -> Vec<Simplex> {
    let mut pending = vec![s.clone()];
    for g in gens {
        let rep = g.halfspaces();
        let gb = g.bbox();
        let mut next = Vec::new();
        for p in pending {
            // g only removes something if it has an open subset of p
            let thin = rep
                .equalities
                .iter()
                .any(|e| p.vertices().iter().any(|v| !e.eval(v).is_zero()));
            if thin || !p.bbox().overlaps(&gb) {
                next.push(p);
            } else {
                next.extend(outside(p, &rep.facets));
            }
        }
        pending = next;
        if pending.is_empty() {
            break;
        }
    }
    pending
}

/// Closed cells triangulating `p` minus the intersection of `{f ≥ 0}`.
fn outside(p: Simplex, facets: &[AffineFn]) -> Vec<Simplex> {
    let mut out = Vec::new();
    let mut inside = vec![p];
    for f in facets {
        let mut kept = Vec::new();
        for c in inside {
            let signs: Vec<Ordering> = c
                .vertices()
                .iter()
                .map(|v| f.eval(v).cmp(&Rational::zero()))
                .collect();
            if signs.iter().all(|&o| o != Ordering::Less) {
                kept.push(c);
            } else if signs.iter().all(|&o| o != Ordering::Greater) {
                out.push(c);
            } else {
                let mut m = Mesh::from_simplexes(c.ambient_dim(), [&c], u64::MAX);
                m.cut_affine(f, None).expect("unbounded budget");
                for (_, cell) in m.cells() {
                    let piece = m.cell_simplex(cell);
                    if cell.iter().all(|&v| !f.eval(m.point(v)).is_negative()) {
                        kept.push(piece);
                    } else {
                        out.push(piece);
                    }
                }
            }
        }
        inside = kept;
    }
    out
}

/// Remove simplexes that are contained in another one of the list.
fn drop_faces(set: BTreeSet<Simplex>) -> Vec<Simplex> {
    let all: Vec<Simplex> = set.into_iter().collect();
    all.iter()
        .filter(|s| !all.iter().any(|t| t != *s && t.contains_simplex(s)))
        .cloned()
        .collect()
}

#[derive(Serialize, Deserialize)]
struct RawPolyhedron {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    generators: Vec<Simplex>,
    #[serde(default)]
    empty: bool,
}

impl Serialize for Polyhedron {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawPolyhedron {
            dim: Some(self.dim),
            generators: self.generators.clone(),
            empty: self.is_empty(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyhedron {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPolyhedron::deserialize(d)?;
        let dim = match (raw.dim, raw.generators.first()) {
            (Some(n), _) => n,
            (None, Some(g)) => g.ambient_dim(),
            (None, None) => {
                return Err(serde::de::Error::custom(
                    "an empty polyhedron needs \"dim\"",
                ))
            }
        };
        if raw.empty != raw.generators.is_empty() {
            return Err(serde::de::Error::custom(
                "\"empty\" disagrees with the generator list",
            ));
        }
        Polyhedron::new(dim, raw.generators).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn pt(c: &[i64]) -> Point {
        Point::from_ints(c)
    }

    fn simplex(vs: &[&[i64]]) -> Simplex {
        Simplex::new(vs.iter().map(|v| pt(v)).collect()).unwrap()
    }

    fn triangle_complex() -> SimplicialComplex {
        SimplicialComplex::new(vec![simplex(&[&[0, 0], &[1, 0], &[1, 2]])]).unwrap()
    }

    #[test]
    fn regularize_blows_up_at_lattice_point() {
        let k = triangle_complex();
        assert!(!k.is_regular());
        let r = regularize(&k).unwrap();
        assert!(r.is_regular());
        assert!(r.vertex_index(&pt(&[1, 1])).is_some());
        assert!(is_subdivision(&r, &k));
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn regular_input_is_unchanged() {
        let k = cube_triangulation(2);
        assert_eq!(regularize(&k).unwrap(), k);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let k = SimplicialComplex::new(vec![simplex(&[&[0, 0], &[1, 0], &[1, 7]])]).unwrap();
        assert!(matches!(
            regularize_with_budget(&k, 1),
            Err(Error::BudgetExhausted(1))
        ));
    }

    #[test]
    fn crossing_cells_are_rejected() {
        let a = simplex(&[&[0, 0], &[2, 0], &[0, 2]]);
        let b = simplex(&[&[1, 1], &[3, 1], &[1, 3]]);
        assert!(matches!(
            SimplicialComplex::new(vec![a, b]),
            Err(Error::NotCommonFace { .. })
        ));
        // two triangles on opposite sides of a shared edge
        let c = simplex(&[&[0, 0], &[1, 0], &[0, 1]]);
        let d = simplex(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(SimplicialComplex::new(vec![c.clone(), d]).is_ok());
        // overlapping triangles sharing an edge
        let e = simplex(&[&[1, 0], &[0, 1], &[0, 0]]);
        let f = Simplex::new(vec![
            pt(&[1, 0]),
            pt(&[0, 1]),
            Point::from_ratios(&[(1, 5), (1, 5)]),
        ])
        .unwrap();
        assert!(SimplicialComplex::new(vec![e, f]).is_err());
        // a segment poking through a triangle's interior
        let seg = Simplex::new(vec![Point::from_ratios(&[(1, 4), (1, 4)]), pt(&[2, 2])]).unwrap();
        assert!(SimplicialComplex::new(vec![c, seg]).is_err());
    }

    #[test]
    fn tetrahedra_meeting_badly_are_rejected() {
        let ok = |cells: Vec<Simplex>| validate_complex(&cells).is_ok();
        let base = simplex(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]);
        // only a vertex in common
        let tip = simplex(&[&[2, 0, 0], &[4, 0, 0], &[4, 2, 0], &[4, 0, 2]]);
        assert!(ok(vec![base.clone(), tip]));
        // a common vertex and overlapping interiors
        let through = simplex(&[&[0, 0, 0], &[1, 1, 1], &[3, 1, 0], &[1, 3, 0]]);
        assert!(!ok(vec![base.clone(), through]));
        // disjoint and skew
        let x = simplex(&[&[0, 0, 0], &[4, 0, 0], &[2, 1, 1], &[2, -1, 1]]);
        let y = simplex(&[&[2, 0, 2], &[2, 0, 6], &[1, 2, 4], &[3, 2, 4]]);
        assert!(ok(vec![x.clone(), y]));
        // the same pair pushed into each other: crossing edges
        let z = simplex(&[&[2, -3, 0], &[2, 3, 0], &[1, 0, 3], &[3, 0, 3]]);
        assert!(!ok(vec![x, z]));
        // a segment through a triangle in space
        let tri = simplex(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0]]);
        let seg = simplex(&[&[0, 0, 0], &[2, 0, 0]]);
        let pierce = Simplex::new(vec![
            Point::from_ratios(&[(1, 2), (1, 2), (-1, 1)]),
            Point::from_ratios(&[(1, 2), (1, 2), (1, 1)]),
        ])
        .unwrap();
        assert!(ok(vec![tri.clone(), seg]));
        assert!(!ok(vec![tri, pierce]));
        // one common vertex, with an edge of each on a common line
        let cell = |vs: &[[(i64, i64); 3]]| {
            Simplex::new(vs.iter().map(|v| Point::from_ratios(v)).collect()).unwrap()
        };
        let a = cell(&[
            [(0, 1), (0, 1), (0, 1)],
            [(0, 1), (0, 1), (1, 1)],
            [(1, 4), (1, 4), (1, 2)],
            [(2, 5), (1, 5), (3, 5)],
        ]);
        let b = cell(&[
            [(0, 1), (1, 5), (2, 5)],
            [(1, 4), (1, 4), (1, 2)],
            [(1, 3), (1, 3), (1, 3)],
            [(1, 2), (1, 2), (1, 2)],
        ]);
        assert!(ok(vec![a, b]));
    }

    #[test]
    fn null_vectors_and_subsets() {
        let rows = vec![
            vec![ratio(1, 1), ratio(0, 1), ratio(1, 1)],
            vec![ratio(0, 1), ratio(2, 1), ratio(2, 1)],
        ];
        let w = null_vector(rows.clone(), &Rational::zero()).unwrap();
        for r in &rows {
            assert!(r
                .iter()
                .zip(&w)
                .map(|(a, b)| a * b)
                .sum::<Rational>()
                .is_zero());
        }
        assert!(null_vector(vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]], &1e-12).is_none());
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
    }

    #[test]
    fn stellar_blowup_on_an_edge() {
        let k = cube_triangulation(2);
        let p = Point::new(vec![ratio(1, 2), ratio(1, 2)]);
        let b = stellar_blowup(&k, &p).unwrap();
        assert_eq!(b.len(), 4);
        assert!(is_subdivision(&b, &k));
        assert!(!is_subdivision(&k, &b));
        assert!(matches!(
            stellar_blowup(&k, &pt(&[2, 0])),
            Err(Error::OutsideComplex(_))
        ));
    }

    #[test]
    fn subdivision_with_a_segment() {
        let k = cube_triangulation(2);
        let seg = Simplex::new(vec![pt(&[0, 0]), Point::from_ratios(&[(1, 1), (1, 3)])]).unwrap();
        let q = Polyhedron::from_simplex(seg.clone());
        let d = subdivide_with_subpolyhedron(&k, &q).unwrap();
        assert!(d.is_regular());
        assert!(is_subdivision(&d, &k));
        let faces = d.faces_in(&q);
        let union = Polyhedron::new(2, faces).unwrap();
        assert!(union.same_set(&q));
        let outside =
            Polyhedron::from_simplex(Simplex::new(vec![pt(&[0, 0]), pt(&[2, 1])]).unwrap());
        assert!(matches!(
            subdivide_with_subpolyhedron(&k, &outside),
            Err(Error::NotContained(_))
        ));
    }

    #[test]
    fn polyhedron_containment_needs_the_union() {
        let lower = simplex(&[&[0, 0], &[1, 0], &[1, 1]]);
        let upper = simplex(&[&[0, 0], &[0, 1], &[1, 1]]);
        let square = Polyhedron::new(2, vec![lower.clone(), upper]).unwrap();
        let middle = Simplex::new(vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        assert!(square.contains_simplex(&middle));
        assert!(!Polyhedron::from_simplex(lower.clone()).contains_simplex(&middle));
        let meet = Polyhedron::from_simplex(middle)
            .intersect(&Polyhedron::from_simplex(lower))
            .unwrap();
        let expected = Polyhedron::from_simplex(
            Simplex::new(vec![
                pt(&[0, 0]),
                pt(&[1, 0]),
                Point::from_ratios(&[(1, 2), (1, 2)]),
            ])
            .unwrap(),
        );
        assert!(meet.same_set(&expected));
    }

    #[test]
    fn cube_triangulation_is_unimodular() {
        for n in 1..=3 {
            let k = cube_triangulation(n);
            assert!(k.is_regular());
            assert_eq!(k.len(), (1..=n).product::<usize>());
        }
    }

    #[test]
    fn complex_json_round_trip() {
        let k = regularize(&triangle_complex()).unwrap();
        let text = serde_json::to_string(&k).unwrap();
        let back: SimplicialComplex = serde_json::from_str(&text).unwrap();
        assert_eq!(back, k);
        let q: Polyhedron =
            serde_json::from_str(r#"{"dim": 2, "generators": [], "empty": true}"#).unwrap();
        assert!(q.is_empty());
    }
}
