//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls into the library's linear algebra.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use mvtangent::geometry::Simplex;
use mvtangent::mcnaughton::{extend_from_vertices, ZMap};
use mvtangent::tangents::{MonomialGenerator, PointSequence};
use mvtangent::triangulation::{
    cube_triangulation, regularize, stellar_blowup, Polyhedron, SimplicialComplex,
};
use mvtangent::{Point, Rational};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn pt(c: &[i64]) -> Point {
    Point::from_ints(c)
}

/// Random rational in `[0,1]` with denominator at most `max_den`.
pub fn rand_unit(rng: &mut impl Rng, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    q(rng.gen_range(0..=d), d)
}

pub fn rand_point(rng: &mut impl Rng, n: usize, max_den: i64) -> Point {
    Point::new((0..n).map(|_| rand_unit(rng, max_den)).collect())
}

/// Homogeneous integer rows `den(v)·(v, 1)`.
pub fn homogeneous_rows(vs: &[Point]) -> Vec<Vec<BigInt>> {
    vs.iter()
        .map(|v| {
            let den = v
                .coords()
                .iter()
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let mut row: Vec<BigInt> = v
                .coords()
                .iter()
                .map(|c| c.numer() * (&den / c.denom()))
                .collect();
            row.push(den);
            row
        })
        .collect()
}

/// Fraction-free (Bareiss) determinant.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A set of integer rows extends to a lattice basis iff the gcd of its
/// maximal minors is 1.
pub fn oracle_regular(vs: &[Point]) -> bool {
    let rows = homogeneous_rows(vs);
    let (r, c) = (rows.len(), rows[0].len());
    let mut g = BigInt::zero();
    for cols in choose(c, r) {
        let minor: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|row| cols.iter().map(|&j| row[j].clone()).collect())
            .collect();
        g = g.gcd(&bareiss_det(minor));
        if g.is_one() {
            return true;
        }
    }
    g.is_one()
}

/// Unique solution of `a·x = b` over the rationals, or `None`.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a[0].len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() < cols || m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Barycentric coordinates of `p` in `conv(vs)`, by direct elimination.
pub fn oracle_barycentric(vs: &[Point], p: &Point) -> Option<Vec<Rational>> {
    let n = p.dim();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| vs.iter().map(|v| v.coords()[i].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); vs.len()]);
    let mut b: Vec<Rational> = p.coords().to_vec();
    b.push(Rational::one());
    solve_unique(&a, &b)
}

pub fn oracle_contains(vs: &[Point], p: &Point) -> bool {
    oracle_barycentric(vs, p).is_some_and(|w| w.iter().all(|x| !x.is_negative()))
}

/// Determinant by Gaussian elimination over the rationals.
pub fn rational_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            m.swap(k, p);
            det = -det;
        }
        det *= &m[k][k];
        for i in k + 1..n {
            let f = &m[i][k] / &m[k][k];
            for j in k..n {
                let t = &m[k][j] * &f;
                m[i][j] -= t;
            }
        }
    }
    det
}

/// `n!·vol` of a full-dimensional simplex.
pub fn scaled_volume(vs: &[Point]) -> Rational {
    let rows = vs[1..]
        .iter()
        .map(|v| {
            v.coords()
                .iter()
                .zip(vs[0].coords())
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    rational_det(rows).abs()
}

/// `|fine| = |coarse|` for full-dimensional complexes whose cells have
/// pairwise disjoint interiors: every cell of `fine` lies in a cell of
/// `coarse`, and the total volumes agree. `None` when a cell is not
/// full-dimensional.
pub fn oracle_same_support(fine: &SimplicialComplex, coarse: &SimplicialComplex) -> Option<bool> {
    let n = coarse.dim();
    let (fine, coarse) = (fine.cells(), coarse.cells());
    if fine
        .iter()
        .chain(&coarse)
        .any(|c| c.vertices().len() != n + 1)
    {
        return None;
    }
    let boxes: Vec<_> = coarse.iter().map(Simplex::bbox).collect();
    let inside = fine.iter().all(|c| {
        let bb = c.bbox();
        coarse.iter().zip(&boxes).any(|(k, kb)| {
            kb.overlaps(&bb)
                && c.vertices()
                    .iter()
                    .all(|v| oracle_contains(k.vertices(), v))
        })
    });
    let total = |cells: &[Simplex]| {
        cells
            .iter()
            .map(|c| scaled_volume(c.vertices()))
            .fold(Rational::zero(), |a, b| a + b)
    };
    Some(inside && total(&fine) == total(&coarse))
}

/// Random simplex of dimension `d` in `[0,1]^n`.
pub fn rand_simplex(rng: &mut impl Rng, n: usize, d: usize, max_den: i64) -> Simplex {
    loop {
        let vs: Vec<Point> = (0..=d).map(|_| rand_point(rng, n, max_den)).collect();
        if let Ok(s) = Simplex::new(vs) {
            if s.dim() == d {
                return s;
            }
        }
    }
}

/// Random point of `s` with small barycentric denominators.
pub fn rand_point_in(rng: &mut impl Rng, s: &Simplex, max_den: i64) -> Point {
    let weights: Vec<i64> = (0..s.vertices().len())
        .map(|_| rng.gen_range(0..=max_den))
        .collect();
    let total: i64 = weights.iter().sum::<i64>().max(1);
    let mut p = Point::zeros(s.ambient_dim());
    for (w, v) in weights.iter().zip(s.vertices()) {
        p = p.add_scaled(&q(*w, total), v);
    }
    if weights.iter().all(|&w| w == 0) {
        s.vertices()[0].clone()
    } else {
        p
    }
}

/// A random rational complex: either one random full-dimensional simplex,
/// or the standard cube triangulation after a few random stellar blow-ups.
pub fn rand_complex(rng: &mut impl Rng, n: usize, max_den: i64) -> SimplicialComplex {
    if rng.gen_bool(0.5) {
        SimplicialComplex::new(vec![rand_simplex(rng, n, n, max_den)]).unwrap()
    } else {
        let mut k = cube_triangulation(n);
        for _ in 0..rng.gen_range(1..=2) {
            let cell = k.cell(rng.gen_range(0..k.len()));
            let p = rand_point_in(rng, &cell, max_den.min(4));
            k = stellar_blowup(&k, &p).unwrap();
        }
        k
    }
}

/// Points of `s` on the grids `(1/e)·Z^n`, `e ≤ max_den`.
pub fn grid_points_in(s: &Simplex, max_den: i64) -> Vec<Point> {
    let n = s.ambient_dim();
    let bb = s.bbox();
    let mut out: Vec<Point> = Vec::new();
    for e in 1..=max_den {
        let lo: Vec<i64> = (0..n)
            .map(|i| {
                (bb.lo[i].clone() * Rational::from_integer(e.into()))
                    .ceil()
                    .to_integer()
                    .try_into()
                    .unwrap()
            })
            .collect();
        let hi: Vec<i64> = (0..n)
            .map(|i| {
                (bb.hi[i].clone() * Rational::from_integer(e.into()))
                    .floor()
                    .to_integer()
                    .try_into()
                    .unwrap()
            })
            .collect();
        let mut idx = lo.clone();
        'grid: loop {
            let p = Point::new(idx.iter().map(|&a| q(a, e)).collect());
            if !out.contains(&p) && oracle_contains(s.vertices(), &p) {
                out.push(p);
            }
            for i in 0..n {
                if idx[i] < hi[i] {
                    idx[i] += 1;
                    continue 'grid;
                }
                idx[i] = lo[i];
            }
            break;
        }
    }
    out
}

/// Random subpolyhedron of the support of `k`: one or two simplexes, each
/// inside a cell, with vertices on grids of denominator at most `max_den`.
pub fn rand_subpolyhedron(rng: &mut impl Rng, k: &SimplicialComplex, max_den: i64) -> Polyhedron {
    let n = k.dim();
    let mut gens = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let cell = k.cell(rng.gen_range(0..k.len()));
        let grid = grid_points_in(&cell, max_den);
        let d = rng.gen_range(0..=cell.dim());
        for _ in 0..20 {
            let vs: Vec<Point> = grid.choose_multiple(rng, d + 1).cloned().collect();
            if let Ok(s) = Simplex::new(vs) {
                if s.dim() == d {
                    gens.push(s);
                    break;
                }
            }
        }
    }
    if gens.is_empty() {
        gens.push(Simplex::point(k.vertices()[0].clone()));
    }
    Polyhedron::new(n, gens).unwrap()
}

/// Admissible vertex values in `[0,1]^m`: `a/e` with `e | den(v)`.
pub fn rand_values(rng: &mut impl Rng, k: &SimplicialComplex, m: usize) -> Vec<Point> {
    k.vertices()
        .iter()
        .map(|v| {
            let d: i64 = v.den().try_into().unwrap();
            let divisors: Vec<i64> = (1..=d).filter(|e| d % e == 0).collect();
            Point::new(
                (0..m)
                    .map(|_| {
                        let e = *divisors.choose(rng).unwrap();
                        q(rng.gen_range(0..=e), e)
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Random McNaughton function (or Z-map into `[0,1]^m`) on a random
/// regular complex.
pub fn rand_zmap(rng: &mut impl Rng, n: usize, m: usize, max_den: i64) -> ZMap {
    let k = regularize(&rand_complex(rng, n, max_den)).unwrap();
    let values = rand_values(rng, &k, m);
    extend_from_vertices(k, values).unwrap()
}

pub fn cusp_sequence(to: u64) -> PointSequence {
    let g = MonomialGenerator {
        exponents: vec![1, 2],
        coefficients: None,
        from: 2,
        to,
        step: 1,
    };
    PointSequence::from_generator(g, pt(&[0, 0])).unwrap()
}

pub fn twisted_sequence(to: u64) -> PointSequence {
    let g = MonomialGenerator {
        exponents: vec![2, 4, 1],
        coefficients: None,
        from: 2,
        to,
        step: 1,
    };
    PointSequence::from_generator(g, pt(&[0, 0, 0])).unwrap()
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(s, t)| (s - t).abs()))
        .fold(0.0, f64::max)
}
