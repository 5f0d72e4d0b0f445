//! Mutable working triangulation.
//!
//! A `Mesh` stores maximal cells as sorted vertex-id lists, plus per-vertex
//! attribute vectors that are interpolated linearly whenever a vertex is
//! created by a blow-up. Every refinement here is a sequence of stellar
//! blow-ups, so the result is always a subdivision of the input.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{AffineFn, BBox, Chart, Simplex};
use crate::linalg;
use crate::rational::{Point, Rational};

/// Multiples of the SNF witness scanned when picking a blow-up point.
const MAX_MULTIPLES: u64 = 256;

pub(crate) struct Mesh {
    dim: usize,
    points: Vec<Point>,
    attrs: Vec<Vec<Rational>>,
    width: usize,
    index: HashMap<Point, usize>,
    cells: Vec<Option<Vec<usize>>>,
    incident: Vec<Vec<usize>>,
    blowups: u64,
    budget: u64,
}

impl Mesh {
    pub fn new(dim: usize, width: usize, budget: u64) -> Mesh {
        Mesh {
            dim,
            points: Vec::new(),
            attrs: Vec::new(),
            width,
            index: HashMap::new(),
            cells: Vec::new(),
            incident: Vec::new(),
            blowups: 0,
            budget,
        }
    }

    pub fn from_simplexes<'a>(
        dim: usize,
        cells: impl IntoIterator<Item = &'a Simplex>,
        budget: u64,
    ) -> Mesh {
        let mut mesh = Mesh::new(dim, 0, budget);
        for s in cells {
            let ids: Vec<usize> = s
                .vertices()
                .iter()
                .map(|v| mesh.add_vertex(v.clone(), Vec::new()))
                .collect();
            mesh.insert_cell(ids);
        }
        mesh
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, id: usize) -> &Point {
        &self.points[id]
    }

    pub fn attrs(&self, id: usize) -> &[Rational] {
        &self.attrs[id]
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    /// Replace all vertex attributes; `f` sees the point and old attributes.
    pub fn set_attrs(
        &mut self,
        width: usize,
        mut f: impl FnMut(&Point, &[Rational]) -> Result<Vec<Rational>>,
    ) -> Result<()> {
        for id in 0..self.points.len() {
            let new = f(&self.points[id], &self.attrs[id])?;
            debug_assert_eq!(new.len(), width);
            self.attrs[id] = new;
        }
        self.width = width;
        Ok(())
    }

    pub fn add_vertex(&mut self, p: Point, attrs: Vec<Rational>) -> usize {
        if let Some(&id) = self.index.get(&p) {
            return id;
        }
        let id = self.points.len();
        self.index.insert(p.clone(), id);
        self.points.push(p);
        self.attrs.push(if attrs.is_empty() {
            vec![Rational::zero(); self.width]
        } else {
            attrs
        });
        self.incident.push(Vec::new());
        id
    }

    pub fn vertex_id(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn add_cell(&mut self, ids: Vec<usize>) -> usize {
        self.insert_cell(ids)
    }

    pub fn bbox(&self) -> Option<BBox> {
        let used: BTreeSet<usize> = self.cells().flat_map(|(_, c)| c.iter().copied()).collect();
        BBox::of(used.iter().map(|&v| &self.points[v]))
    }

    fn insert_cell(&mut self, mut ids: Vec<usize>) -> usize {
        ids.sort_unstable();
        let cid = self.cells.len();
        for &v in &ids {
            self.incident[v].push(cid);
        }
        self.cells.push(Some(ids));
        cid
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|c| (i, c)))
    }

    pub fn cell_simplex(&self, ids: &[usize]) -> Simplex {
        Simplex::new(ids.iter().map(|&v| self.points[v].clone()).collect())
            .expect("mesh cells are simplexes")
    }

    pub fn cell_bbox(&self, ids: &[usize]) -> BBox {
        BBox::of(ids.iter().map(|&v| &self.points[v])).expect("nonempty cell")
    }

    /// Live cells containing every vertex of `face`.
    fn star(&self, face: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = self.incident[face[0]]
            .iter()
            .copied()
            .filter(|&cid| {
                self.cells[cid]
                    .as_ref()
                    .is_some_and(|c| face.iter().all(|v| c.binary_search(v).is_ok()))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Stellar subdivision at `Σ w_i · v_i` for the face `{v_i}`; weights
    /// must be positive and sum to 1. Returns the id of the new vertex.
    pub fn blowup(&mut self, face: &[(usize, Rational)]) -> Result<usize> {
        if face.len() == 1 {
            return Ok(face[0].0);
        }
        if self.blowups >= self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        self.blowups += 1;
        let mut p = Point::zeros(self.dim);
        let mut attrs = vec![Rational::zero(); self.width];
        for (v, w) in face {
            p = p.add_scaled(w, &self.points[*v]);
            for (a, b) in attrs.iter_mut().zip(&self.attrs[*v]) {
                *a += w * b;
            }
        }
        let mut ids: Vec<usize> = face.iter().map(|(v, _)| *v).collect();
        ids.sort_unstable();
        let star = self.star(&ids);
        let new = self.add_vertex(p, attrs);
        for cid in star {
            let cell = self.cells[cid].take().expect("live cell");
            for &v in &ids {
                let mut replaced: Vec<usize> = cell.iter().copied().filter(|&w| w != v).collect();
                replaced.push(new);
                self.insert_cell(replaced);
            }
        }
        Ok(new)
    }

    /// Subdivide until no edge has endpoints with strictly opposite signs
    /// of `phi`. `phi` must be affine on every cell touched. With `region`,
    /// only cells whose bounding box meets it are considered.
    pub fn cut(
        &mut self,
        phi: impl Fn(&Point, &[Rational]) -> Rational,
        region: Option<&BBox>,
    ) -> Result<()> {
        self.cut_on(
            phi,
            |m, cell| region.map_or(true, |r| m.cell_bbox(cell).overlaps(r)),
            &[],
        )
    }

    /// As `cut`, over the cells passing `relevant` and restricted to edges
    /// lying in the common zero set of `on`.
    fn cut_on(
        &mut self,
        phi: impl Fn(&Point, &[Rational]) -> Rational,
        relevant: impl Fn(&Mesh, &[usize]) -> bool,
        on: &[AffineFn],
    ) -> Result<()> {
        let mut values: HashMap<usize, Rational> = HashMap::new();
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        let live: Vec<Vec<usize>> = self.cells().map(|(_, c)| c.clone()).collect();
        for cell in live {
            if !relevant(self, &cell) {
                continue;
            }
            let cell: Vec<usize> = cell
                .into_iter()
                .filter(|&v| on.iter().all(|e| e.eval(&self.points[v]).is_zero()))
                .collect();
            for &v in &cell {
                values
                    .entry(v)
                    .or_insert_with(|| phi(&self.points[v], &self.attrs[v]));
            }
            for (i, &a) in cell.iter().enumerate() {
                for &b in &cell[i + 1..] {
                    if values[&a].is_positive() && values[&b].is_negative()
                        || values[&a].is_negative() && values[&b].is_positive()
                    {
                        edges.insert((a, b));
                    }
                }
            }
        }
        for (a, b) in edges {
            let (va, vb) = (&values[&a], &values[&b]);
            let t = va / (va - vb);
            self.blowup(&[(a, Rational::one() - &t), (b, t)])?;
        }
        Ok(())
    }

    pub fn cut_affine(&mut self, f: &AffineFn, region: Option<&BBox>) -> Result<()> {
        self.cut(|p, _| f.eval(p), region)
    }

    /// Cut by the half-space description of `s`, so that afterwards `s` is a
    /// union of (faces of) cells. Each equality only cuts inside the zero set
    /// of the earlier ones, and facets only inside the affine hull of `s`.
    pub fn cut_by_simplex(&mut self, s: &Simplex, localize: bool) -> Result<()> {
        let rep = s.halfspaces();
        let region = s.bbox();
        let relevant = |m: &Mesh, cell: &[usize]| {
            if !localize {
                return true;
            }
            if !m.cell_bbox(cell).overlaps(&region) {
                return false;
            }
            let all = |f: &AffineFn, sign: fn(&Rational) -> bool| {
                cell.iter().all(|&v| sign(&f.eval(&m.points[v])))
            };
            // a cell only touching a facet hyperplane meets `s` inside that
            // facet, which the cells on the other side already cover
            !rep.facets.iter().any(|f| all(f, |x| !x.is_positive()))
                && !rep
                    .equalities
                    .iter()
                    .any(|e| all(e, Rational::is_negative) || all(e, Rational::is_positive))
        };
        if localize {
            for v in s.vertices() {
                match self.blowup_at(v) {
                    Ok(_) | Err(Error::OutsideComplex(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        for (i, e) in rep.equalities.iter().enumerate() {
            self.cut_on(|p, _| e.eval(p), relevant, &rep.equalities[..i])?;
        }
        for f in &rep.facets {
            self.cut_on(|p, _| f.eval(p), relevant, &rep.equalities)?;
        }
        Ok(())
    }

    /// A cell containing `p` and the barycentric weights of `p` on it.
    pub fn locate(&self, p: &Point) -> Option<(usize, Vec<Rational>)> {
        for (cid, cell) in self.cells() {
            if !self.cell_bbox(cell).contains(p) {
                continue;
            }
            let pts: Vec<Point> = cell.iter().map(|&v| self.points[v].clone()).collect();
            let chart = Chart::new(&pts);
            if let Some(t) = chart.coordinates(p) {
                if t.iter().all(|x| !x.is_negative()) {
                    return Some((cid, t));
                }
            }
        }
        None
    }

    /// Stellar blow-up at an arbitrary point of the mesh.
    pub fn blowup_at(&mut self, p: &Point) -> Result<usize> {
        if let Some(id) = self.vertex_id(p) {
            return Ok(id);
        }
        let (cid, t) = self
            .locate(p)
            .ok_or_else(|| Error::OutsideComplex(p.clone()))?;
        let cell = self.cells[cid].clone().expect("live");
        let face: Vec<(usize, Rational)> = cell
            .into_iter()
            .zip(t)
            .filter(|(_, w)| w.is_positive())
            .collect();
        self.blowup(&face)
    }

    /// Maximal faces whose vertices all satisfy `keep`.
    pub fn faces_with_vertices(&self, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        for (_, cell) in self.cells() {
            let face: Vec<usize> = cell.iter().copied().filter(|&v| keep(v)).collect();
            if !face.is_empty() {
                found.insert(face);
            }
        }
        maximal_sets(found)
    }

    fn homogeneous(&self, id: usize) -> Vec<BigInt> {
        self.points[id].homogeneous()
    }

    fn cell_is_regular(&self, cell: &[usize]) -> bool {
        let rows: Vec<Vec<BigInt>> = cell.iter().map(|&v| self.homogeneous(v)).collect();
        linalg::smith_normal_form(&rows).is_unimodular_part()
    }

    /// Blow-up data for a non-regular cell: a nonzero lattice point of the
    /// half-open parallelepiped spanned by the homogeneous vertex vectors,
    /// taken from the multiples of an SNF witness. Least coefficient sum
    /// wins, then least last coordinate.
    fn desingularizing_point(&self, cell: &[usize]) -> Vec<(usize, Rational)> {
        let rows: Vec<Vec<BigInt>> = cell.iter().map(|&v| self.homogeneous(v)).collect();
        let snf = linalg::smith_normal_form(&rows);
        let j = snf
            .diag
            .iter()
            .rposition(|d| !d.is_one())
            .expect("non-regular cell");
        let order = &snf.diag[j];
        let witness: Vec<Rational> = snf.v_inv[j]
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect();
        // witness = Σ c_i w_i over the rationals
        let system: Vec<Vec<Rational>> = (0..witness.len())
            .map(|r| {
                rows.iter()
                    .map(|w| Rational::from_integer(w[r].clone()))
                    .collect()
            })
            .collect();
        let coeffs = linalg::solve(&system, &witness).expect("witness lies in the rational span");
        let dens: Vec<Rational> = rows
            .iter()
            .map(|w| Rational::from_integer(w.last().unwrap().clone()))
            .collect();
        let limit = u64::try_from(order - BigInt::one())
            .unwrap_or(u64::MAX)
            .min(MAX_MULTIPLES);
        let mut best: Option<(Rational, Rational, Vec<Rational>)> = None;
        for k in 1..=limit {
            let k = Rational::from_integer(BigInt::from(k));
            let frac: Vec<Rational> = coeffs
                .iter()
                .map(|c| {
                    let x = c * &k;
                    &x - x.floor()
                })
                .collect();
            if frac.iter().all(Zero::is_zero) {
                continue;
            }
            let height = frac
                .iter()
                .zip(&dens)
                .fold(Rational::zero(), |acc, (a, d)| acc + a * d);
            let mass: Rational = frac.iter().sum();
            if best
                .as_ref()
                .map_or(true, |(m, h, _)| (&mass, &height) < (m, h))
            {
                best = Some((mass, height, frac));
            }
        }
        let (_, height, frac) = best.expect("nontrivial witness");
        cell.iter()
            .zip(frac.iter().zip(&dens))
            .filter(|(_, (a, _))| a.is_positive())
            .map(|(&v, (a, d))| (v, a * d / &height))
            .collect()
    }

    /// Iterated stellar blow-ups until every cell is regular. The offending
    /// cell handled first is the lexicographically least one.
    pub fn regularize(&mut self) -> Result<()> {
        let mut pending: BTreeMap<Vec<Point>, usize> = BTreeMap::new();
        let key = |mesh: &Mesh, cell: &[usize]| -> Vec<Point> {
            let mut pts: Vec<Point> = cell.iter().map(|&v| mesh.points[v].clone()).collect();
            pts.sort();
            pts
        };
        for (cid, cell) in self.cells() {
            if !self.cell_is_regular(cell) {
                pending.insert(key(self, cell), cid);
            }
        }
        while let Some((_, cid)) = pending.pop_first() {
            let Some(cell) = self.cells[cid].clone() else {
                continue;
            };
            let face = self.desingularizing_point(&cell);
            let before = self.cells.len();
            self.blowup(&face)?;
            for new in before..self.cells.len() {
                if let Some(c) = self.cells[new].clone() {
                    if !self.cell_is_regular(&c) {
                        pending.insert(key(self, &c), new);
                    }
                }
            }
        }
        Ok(())
    }

    /// Relative volume of the union of `dim(s)`-dimensional faces lying in
    /// `s`, as a fraction of `vol(s)`.
    pub fn covered_fraction(&self, s: &Simplex) -> Rational {
        let chart = s.chart();
        let d = s.dim();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let inside: Vec<bool> = (0..self.points.len())
            .map(|v| {
                chart
                    .coordinates(&self.points[v])
                    .is_some_and(|t| t.iter().all(|x| !x.is_negative()))
            })
            .collect();
        let mut total = Rational::zero();
        for (_, cell) in self.cells() {
            let verts: Vec<usize> = cell.iter().copied().filter(|&v| inside[v]).collect();
            if verts.len() < d + 1 {
                continue;
            }
            for combo in combinations(&verts, d + 1) {
                if !seen.insert(combo.clone()) {
                    continue;
                }
                let rows: Option<Vec<Vec<Rational>>> = combo
                    .iter()
                    .map(|&v| chart.coordinates(&self.points[v]))
                    .collect();
                if let Some(rows) = rows {
                    total += linalg::determinant(&rows).abs();
                }
            }
        }
        total
    }
}

pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            current.push(items[i]);
            rec(items, k, i + 1, current, out);
            current.pop();
        }
    }
    rec(items, k, 0, &mut current, &mut out);
    out
}

/// Drop every set that is a subset of another one.
pub(crate) fn maximal_sets(sets: BTreeSet<Vec<usize>>) -> Vec<Vec<usize>> {
    let mut by_size: Vec<Vec<usize>> = sets.into_iter().collect();
    by_size.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for s in by_size {
        if !kept
            .iter()
            .any(|k| s.iter().all(|v| k.binary_search(v).is_ok()))
        {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}
