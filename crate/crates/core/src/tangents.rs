//! Iterated-residual tangents, C-simplexes inside polyhedra, and the
//! rationally outgoing certificate check.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{
    build_c_simplex, BBox, CSimplexSpec, Chart, ExactFrame, NumericFrame, Simplex,
};
use crate::rational::{rational_vec, Point, Rational};
use crate::report::{Check, Report};
use crate::triangulation::Polyhedron;

/// Default tolerance for tangent detection and frame matching.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Residuals shorter than this fraction of `‖x_i − x‖` count as zero.
pub const RESIDUAL_EPS: f64 = 1e-12;

/// Closed-form sequence `x_i = limit + (c_j / i^{e_j})_j` for
/// `i = from, from+step, …, ≤ to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialGenerator {
    pub exponents: Vec<u32>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "opt_rational_vec"
    )]
    pub coefficients: Option<Vec<Rational>>,
    pub from: u64,
    pub to: u64,
    #[serde(default = "one_u64")]
    pub step: u64,
}

fn one_u64() -> u64 {
    1
}

mod opt_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &Option<Vec<Rational>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => rational_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Vec<Rational>>, D::Error> {
        let raw: Option<Vec<crate::rational::Q>> = Option::deserialize(d)?;
        Ok(raw.map(|v| v.into_iter().map(|q| q.0).collect()))
    }
}

impl MonomialGenerator {
    pub fn points(&self, limit: &Point) -> Result<Vec<Point>> {
        let n = limit.dim();
        if self.exponents.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.exponents.len(),
            });
        }
        if let Some(c) = &self.coefficients {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.len(),
                });
            }
        }
        if self.from == 0 || self.step == 0 || self.to < self.from {
            return Err(Error::InvalidSequence(
                "generator needs 1 ≤ from ≤ to and step ≥ 1".into(),
            ));
        }
        let mut out = Vec::new();
        let mut i = self.from;
        while i <= self.to {
            let coords = (0..n)
                .map(|j| {
                    let c = self
                        .coefficients
                        .as_ref()
                        .map_or_else(Rational::one, |c| c[j].clone());
                    let den = BigInt::from(i).pow(self.exponents[j]);
                    &limit[j] + c / Rational::from_integer(den)
                })
                .collect();
            out.push(Point::new(coords));
            i += self.step;
        }
        Ok(out)
    }
}

/// A finite sample of a sequence converging to `limit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSequence {
    points: Vec<Point>,
    limit: Point,
    generator: Option<MonomialGenerator>,
}

impl PointSequence {
    pub fn new(points: Vec<Point>, limit: Point) -> Result<PointSequence> {
        let seq = PointSequence {
            points,
            limit,
            generator: None,
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn from_generator(generator: MonomialGenerator, limit: Point) -> Result<PointSequence> {
        let points = generator.points(&limit)?;
        let seq = PointSequence {
            points,
            limit,
            generator: Some(generator),
        };
        seq.validate()?;
        Ok(seq)
    }

    fn validate(&self) -> Result<()> {
        let n = self.limit.dim();
        if n == 0 {
            return Err(Error::InvalidSequence(
                "limit must have dimension at least 1".into(),
            ));
        }
        if self.points.is_empty() {
            return Err(Error::InvalidSequence("sequence has no points".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.dim(),
                });
            }
            if p == &self.limit {
                return Err(Error::InvalidSequence(format!(
                    "point {i} equals the limit"
                )));
            }
        }
        let tail = &self.points[tail_start(self.points.len())..];
        let dist = |p: &Point| {
            let d = p.sub(&self.limit);
            d.dot(&d)
        };
        for (i, w) in tail.windows(2).enumerate() {
            if dist(&w[1]) > dist(&w[0]) {
                return Err(Error::InvalidSequence(format!(
                    "distance to the limit increases in the tail at index {}",
                    tail_start(self.points.len()) + i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn limit(&self) -> &Point {
        &self.limit
    }

    pub fn dim(&self) -> usize {
        self.limit.dim()
    }

    pub fn generator(&self) -> Option<&MonomialGenerator> {
        self.generator.as_ref()
    }

    /// Terms with index `≡ offset (mod stride)`.
    pub fn subsequence(&self, stride: usize, offset: usize) -> Result<PointSequence> {
        let points = self
            .points
            .iter()
            .skip(offset)
            .step_by(stride.max(1))
            .cloned()
            .collect();
        PointSequence::new(points, self.limit.clone())
    }

    /// Image under a map applied pointwise.
    pub fn map(&self, f: impl Fn(&Point) -> Result<Point>) -> Result<PointSequence> {
        let points = self.points.iter().map(&f).collect::<Result<Vec<_>>>()?;
        PointSequence::new(points, f(&self.limit)?)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Point>>,
    limit: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<MonomialGenerator>,
}

impl Serialize for PointSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = match &self.generator {
            Some(g) => RawSequence {
                points: None,
                limit: self.limit.clone(),
                generator: Some(g.clone()),
            },
            None => RawSequence {
                points: Some(self.points.clone()),
                limit: self.limit.clone(),
                generator: None,
            },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSequence::deserialize(d)?;
        let seq = match (raw.points, raw.generator) {
            (Some(points), None) => PointSequence::new(points, raw.limit),
            (None, Some(g)) => PointSequence::from_generator(g, raw.limit),
            _ => {
                return Err(serde::de::Error::custom(
                    "a sequence needs exactly one of \"points\" or \"generator\"",
                ))
            }
        };
        seq.map_err(serde::de::Error::custom)
    }
}

/// `X = polyhedral_part ∪ sample points ∪ declared_limits`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedSet {
    polyhedral_part: Option<Polyhedron>,
    samples: Vec<PointSequence>,
    declared_limits: Vec<Point>,
}

impl ClosedSet {
    pub fn new(
        polyhedral_part: Option<Polyhedron>,
        samples: Vec<PointSequence>,
        declared_limits: Vec<Point>,
    ) -> Result<ClosedSet> {
        let n = polyhedral_part
            .as_ref()
            .map(Polyhedron::dim)
            .or_else(|| samples.first().map(PointSequence::dim))
            .or_else(|| declared_limits.first().map(Point::dim))
            .ok_or_else(|| Error::Parse("closed set is empty".into()))?;
        for d in samples
            .iter()
            .map(PointSequence::dim)
            .chain(declared_limits.iter().map(Point::dim))
        {
            if d != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: d,
                });
            }
        }
        let set = ClosedSet {
            polyhedral_part,
            samples,
            declared_limits,
        };
        for s in &set.samples {
            if !set.contains_point(s.limit()) {
                return Err(Error::InvalidSequence(format!(
                    "limit {} is not a point of the set",
                    s.limit()
                )));
            }
        }
        Ok(set)
    }

    pub fn from_polyhedron(q: Polyhedron) -> ClosedSet {
        ClosedSet {
            polyhedral_part: Some(q),
            samples: Vec::new(),
            declared_limits: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.polyhedral_part
            .as_ref()
            .map(Polyhedron::dim)
            .or_else(|| self.samples.first().map(PointSequence::dim))
            .or_else(|| self.declared_limits.first().map(Point::dim))
            .unwrap_or(0)
    }

    pub fn polyhedral_part(&self) -> Option<&Polyhedron> {
        self.polyhedral_part.as_ref()
    }

    pub fn samples(&self) -> &[PointSequence] {
        &self.samples
    }

    pub fn declared_limits(&self) -> &[Point] {
        &self.declared_limits
    }

    /// Every sample point and declared limit, in storage order.
    pub fn isolated_points(&self) -> impl Iterator<Item = &Point> {
        self.samples
            .iter()
            .flat_map(|s| s.points.iter())
            .chain(self.declared_limits.iter())
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.polyhedral_part
            .as_ref()
            .is_some_and(|q| q.contains_point(p))
            || self.declared_limits.contains(p)
            || self.samples.iter().any(|s| s.points.contains(p))
    }

    /// `X ∪ {p}`.
    pub fn with_point(&self, p: Point) -> Result<ClosedSet> {
        let mut limits = self.declared_limits.clone();
        limits.push(p);
        ClosedSet::new(self.polyhedral_part.clone(), self.samples.clone(), limits)
    }

    pub fn in_unit_cube(&self) -> bool {
        self.isolated_points().all(Point::in_unit_cube)
            && self
                .polyhedral_part
                .iter()
                .flat_map(|q| q.generators())
                .all(|g| g.vertices().iter().all(Point::in_unit_cube))
    }
}

#[derive(Deserialize)]
struct RawClosedSet {
    #[serde(default)]
    polyhedral_part: Option<Polyhedron>,
    #[serde(default)]
    samples: Vec<PointSequence>,
    #[serde(default)]
    declared_limits: Vec<Point>,
}

impl<'de> Deserialize<'de> for ClosedSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawClosedSet::deserialize(d)?;
        ClosedSet::new(raw.polyhedral_part, raw.samples, raw.declared_limits)
            .map_err(serde::de::Error::custom)
    }
}

fn tail_start(len: usize) -> usize {
    let tail = (len / 4).max(4).min(len);
    len - tail
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `v` minus its orthogonal projection onto the span of `frame`.
fn project_out(v: &[f64], frame: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for u in frame {
        let c = dot(&r, u);
        for (a, b) in r.iter_mut().zip(u) {
            *a -= c * b;
        }
    }
    r
}

/// Normalized residual of `x_i − x` after projecting out `prefix`.
pub fn residual_direction(x: &Point, xi: &Point, prefix: &NumericFrame) -> Result<Vec<f64>> {
    if x.dim() != xi.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: xi.dim(),
        });
    }
    residual_of(&xi.sub(x).to_f64(), prefix).map_err(|_| Error::ZeroResidual { index: 0 })
}

fn residual_of(d: &[f64], prefix: &NumericFrame) -> std::result::Result<Vec<f64>, ()> {
    let base = norm(d);
    if base == 0.0 {
        return Err(());
    }
    let r = project_out(d, &prefix.vectors);
    let len = norm(&r);
    if len <= RESIDUAL_EPS * base {
        return Err(());
    }
    Ok(r.into_iter().map(|c| c / len).collect())
}

/// Per-level convergence data.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LevelDiagnostics {
    pub level: usize,
    pub tail_len: usize,
    /// Largest distance of a tail direction from the estimate.
    pub spread: f64,
    /// Disagreement of the limits extrapolated from the two tail halves.
    pub extrapolation_gap: f64,
    /// Residual norms at the start and end of the tail.
    pub residual_norms: (f64, f64),
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TangentEstimate {
    pub frame: NumericFrame,
    pub levels: Vec<LevelDiagnostics>,
    pub converged: bool,
    pub tolerance: f64,
}

/// Limit of `ys` as `ts → 0`, by a least-squares quadratic fit in `t`.
/// Falls back to the mean when the abscissae do not spread.
fn extrapolate(ts: &[f64], ys: &[Vec<f64>]) -> Vec<f64> {
    let dim = ys[0].len();
    let mean = |ys: &[Vec<f64>]| -> Vec<f64> {
        (0..dim)
            .map(|j| ys.iter().map(|y| y[j]).sum::<f64>() / ys.len() as f64)
            .collect()
    };
    let (lo, hi) = ts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| {
            (a.min(t), b.max(t))
        });
    if ts.len() < 3 || !(hi > 0.0) || (hi - lo) <= 1e-12 * hi {
        return mean(ys);
    }
    // centered variable keeps the normal equations well conditioned
    let c = (hi + lo) / 2.0;
    let h = (hi - lo) / 2.0;
    let taus: Vec<f64> = ts.iter().map(|t| (t - c) / h).collect();
    let at0 = -c / h;
    let mut g = [[0.0f64; 3]; 3];
    for &t in &taus {
        let basis = [1.0, t, t * t];
        for a in 0..3 {
            for b in 0..3 {
                g[a][b] += basis[a] * basis[b];
            }
        }
    }
    let Some(ginv) = invert3(&g) else {
        return mean(ys);
    };
    (0..dim)
        .map(|j| {
            let mut rhs = [0.0f64; 3];
            for (t, y) in taus.iter().zip(ys) {
                rhs[0] += y[j];
                rhs[1] += t * y[j];
                rhs[2] += t * t * y[j];
            }
            let coef: Vec<f64> = (0..3)
                .map(|a| (0..3).map(|b| ginv[a][b] * rhs[b]).sum())
                .collect();
            coef[0] + coef[1] * at0 + coef[2] * at0 * at0
        })
        .collect()
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 {
        return None;
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            out[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    Some(out)
}

/// Estimate the first `k` iterated residual limits of `seq`.
///
/// Each level's limit is extrapolated to `‖x_i − x‖ → 0` from the last
/// quarter of the sequence; the level counts as converged when the two
/// halves of that tail extrapolate to limits within `tol` of each other.
pub fn detect_k_tangent(seq: &PointSequence, k: usize, tol: f64) -> Result<TangentEstimate> {
    let n = seq.dim();
    if k == 0 || k > n {
        return Err(Error::Precondition(format!(
            "degree must satisfy 1 ≤ k ≤ {n}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let diffs: Vec<Vec<f64>> = seq
        .points
        .iter()
        .map(|p| p.sub(&seq.limit).to_f64())
        .collect();
    let start = tail_start(diffs.len());
    let ts: Vec<f64> = diffs[start..].iter().map(|d| norm(d)).collect();
    let mut frame: Vec<Vec<f64>> = Vec::new();
    let mut levels = Vec::new();
    for level in 1..=k {
        let prefix = NumericFrame {
            vectors: frame.clone(),
            tolerance: NumericFrame::DEFAULT_TOLERANCE,
        };
        let mut dirs = Vec::with_capacity(diffs.len() - start);
        let mut norms = Vec::with_capacity(diffs.len() - start);
        for (i, d) in diffs.iter().enumerate() {
            let dir = residual_of(d, &prefix).map_err(|_| Error::ZeroResidual { index: i })?;
            if i >= start {
                norms.push(norm(&project_out(d, &frame)));
                dirs.push(dir);
            }
        }
        let estimate = extrapolate(&ts, &dirs);
        let half = dirs.len() / 2;
        let gap = if half >= 3 {
            let a = extrapolate(&ts[..half], &dirs[..half]);
            let b = extrapolate(&ts[half..], &dirs[half..]);
            a.iter()
                .zip(&b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        } else {
            dirs.iter()
                .flat_map(|d| d.iter().zip(&estimate).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max)
        };
        let mut u = project_out(&estimate, &frame);
        let len = norm(&u);
        if len == 0.0 || !len.is_finite() {
            return Err(Error::Inconsistent(format!(
                "level {level} direction collapsed onto the previous levels"
            )));
        }
        u.iter_mut().for_each(|c| *c /= len);
        let spread = dirs
            .iter()
            .map(|d| {
                d.iter()
                    .zip(&u)
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        levels.push(LevelDiagnostics {
            level,
            tail_len: dirs.len(),
            spread,
            extrapolation_gap: gap,
            residual_norms: (norms[0], *norms.last().unwrap()),
            converged: gap < tol,
        });
        frame.push(u);
    }
    let converged = levels.iter().all(|l| l.converged);
    Ok(TangentEstimate {
        frame: NumericFrame {
            vectors: frame,
            tolerance: NumericFrame::DEFAULT_TOLERANCE,
        },
        levels,
        converged,
        tolerance: tol,
    })
}

/// Largest `ε ≥ 0` with `z + ε·u ∈ S`, given that `z ∈ S` and `u` is
/// parallel to `aff S`.
fn ratio_test(s: &Simplex, z: &Point, u: &Point) -> Option<Rational> {
    let rep = s.halfspaces();
    let mut best: Option<Rational> = None;
    for f in &rep.facets {
        let slope = f
            .coeffs
            .iter()
            .zip(u.coords())
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
        if slope.is_negative() {
            let bound = f.eval(z) / -slope;
            best = Some(match best {
                Some(b) if b <= bound => b,
                _ => bound,
            });
        }
    }
    best
}

fn parallel_to_hull(s: &Simplex, u: &Point) -> bool {
    s.halfspaces().equalities.iter().all(|e| {
        e.coeffs
            .iter()
            .zip(u.coords())
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            .is_zero()
    })
}

/// Output of the constructive C-simplex search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentSimplex {
    pub spec: CSimplexSpec,
    /// The generator of `P` containing the C-simplex.
    pub generator: Simplex,
    /// Exact largest step at each level, before halving.
    pub steps: Vec<Rational>,
}

/// Find `λ` with `C_{x,u,λ} ⊆ P`, walking the chain `z_0 = x`,
/// `z_l = z_{l−1} + λ_l u_l` and taking half of the largest feasible step
/// inside one generator at every level.
pub fn tangent_simplex_search(
    p: &Polyhedron,
    x: &Point,
    frame: &ExactFrame,
) -> Result<TangentSimplex> {
    if x.dim() != p.dim() || frame.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: if x.dim() != p.dim() {
                x.dim()
            } else {
                frame.dim()
            },
        });
    }
    let mut reasons = Vec::new();
    let two = Rational::from_integer(2.into());
    'generators: for (gi, s) in p.generators().iter().enumerate() {
        if !s.contains(x) {
            continue;
        }
        if let Some(j) = frame.vectors().iter().position(|u| !parallel_to_hull(s, u)) {
            reasons.push(format!(
                "generator {gi}: x + span(u) leaves aff S at u_{}",
                j + 1
            ));
            continue;
        }
        let mut z = x.clone();
        let mut lengths = Vec::with_capacity(frame.len());
        let mut steps = Vec::with_capacity(frame.len());
        for (l, u) in frame.vectors().iter().enumerate() {
            let eps = ratio_test(s, &z, u).unwrap_or_else(Rational::zero);
            if !eps.is_positive() {
                reasons.push(format!(
                    "generator {gi}: no positive step along u_{} at level {}",
                    l + 1,
                    l + 1
                ));
                continue 'generators;
            }
            let lambda = &eps / &two;
            z = z.add_scaled(&lambda, u);
            lengths.push(lambda);
            steps.push(eps);
        }
        let spec = CSimplexSpec::new(x.clone(), frame.clone(), lengths)?;
        let c = build_c_simplex(&spec)?;
        if !p.contains_simplex(&c) {
            return Err(Error::Inconsistent(format!(
                "constructed {c} escapes the polyhedron"
            )));
        }
        return Ok(TangentSimplex {
            spec,
            generator: s.clone(),
            steps,
        });
    }
    if reasons.is_empty() {
        reasons.push("x lies in no generator".into());
    }
    Err(Error::NoAdmissibleGenerator(reasons.join("; ")))
}

pub fn tangent_simplex_in_polyhedron(
    p: &Polyhedron,
    x: &Point,
    frame: &ExactFrame,
) -> Result<CSimplexSpec> {
    Ok(tangent_simplex_search(p, x, frame)?.spec)
}

/// Data of a rationally outgoing tangent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentCertificate {
    pub x: Point,
    pub frame: ExactFrame,
    #[serde(with = "rational_vec")]
    pub lambda: Vec<Rational>,
    #[serde(rename = "S")]
    pub s: Simplex,
    #[serde(rename = "F")]
    pub f: Simplex,
}

impl TangentCertificate {
    pub fn degree(&self) -> usize {
        self.frame.len()
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn c_spec(&self) -> Result<CSimplexSpec> {
        CSimplexSpec::new(self.x.clone(), self.frame.clone(), self.lambda.clone())
    }

    pub fn c_simplex(&self) -> Result<Simplex> {
        build_c_simplex(&self.c_spec()?)
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.dim();
        let bad = [self.frame.dim(), self.s.ambient_dim(), self.f.ambient_dim()]
            .into_iter()
            .find(|&d| d != n);
        if let Some(d) = bad {
            return Err(Error::MalformedCertificate(format!(
                "dimension {d} does not match x in dimension {n}"
            )));
        }
        if self.lambda.len() != self.frame.len() {
            return Err(Error::MalformedCertificate(format!(
                "{} lengths for {} directions",
                self.lambda.len(),
                self.frame.len()
            )));
        }
        if self.lambda.iter().any(|l| !l.is_positive()) {
            return Err(Error::MalformedCertificate(
                "lengths must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Membership tester with a cached chart.
pub(crate) struct SimplexTester {
    chart: Chart,
    bbox: BBox,
}

impl SimplexTester {
    pub fn new(s: &Simplex) -> SimplexTester {
        SimplexTester {
            chart: s.chart(),
            bbox: s.bbox(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.bbox.contains(p)
            && self
                .chart
                .coordinates(p)
                .is_some_and(|t| t.iter().all(|x| !x.is_negative()))
    }
}

/// `F ∩ X = S ∩ X`, or the first point of `X` in `S` but not in `F`.
pub(crate) fn faces_meet_x_equally(
    s: &Simplex,
    f: &Simplex,
    x: &ClosedSet,
) -> Result<std::result::Result<(), String>> {
    if let Some(q) = x.polyhedral_part() {
        let sx = q.intersect(&Polyhedron::from_simplex(s.clone()))?;
        let fx = q.intersect(&Polyhedron::from_simplex(f.clone()))?;
        if !sx.same_set(&fx) {
            return Ok(Err(format!(
                "polyhedral part meets S in {sx:?} but F in {fx:?}"
            )));
        }
    }
    let st = SimplexTester::new(s);
    let ft = SimplexTester::new(f);
    for p in x.isolated_points() {
        if st.contains(p) && !ft.contains(p) {
            return Ok(Err(format!("point {p} of X lies in S but not in F")));
        }
    }
    Ok(Ok(()))
}

/// Conditions (a)–(c), which do not involve `X`.
pub fn geometric_checks(cert: &TangentCertificate) -> Result<Vec<Check>> {
    cert.check_shape()?;
    let n = cert.dim();
    let k = cert.degree();
    let mut checks = Vec::new();
    let face = cert.f.is_face_of(&cert.s);
    let a_ok = face && k < n;
    let a_detail = match (face, k < n) {
        (true, true) => format!(
            "S has {} rational vertices, F is a face, k = {k} < n = {n}",
            cert.s.vertices().len()
        ),
        (false, _) => format!("F = {} is not a face of S = {}", cert.f, cert.s),
        (true, false) => format!("degree k = {k} is not below n = {n}"),
    };
    checks.push(Check::new(
        "a",
        "S rational, F a face of S, k < n",
        a_ok,
        a_detail,
    ));

    let c = cert.c_simplex();
    let (b_ok, b_detail, c_ok, c_detail) = match &c {
        Ok(c) => {
            let inside = cert.s.contains_simplex(c);
            let in_f = cert.f.contains_simplex(c);
            (
                inside,
                if inside {
                    format!("{c} ⊆ S")
                } else {
                    format!("{c} ⊄ S")
                },
                !in_f,
                if in_f {
                    format!("{c} ⊆ F")
                } else {
                    format!("{c} ⊄ F")
                },
            )
        }
        Err(e) => (false, e.to_string(), false, e.to_string()),
    };
    checks.push(Check::new("b", "C_{x,u,λ} ⊆ S", b_ok, b_detail));
    checks.push(Check::new("c", "C_{x,u,λ} ⊄ F", c_ok, c_detail));

    Ok(checks)
}

/// Verify a certificate against `X`: conditions (a)–(d) are exact and form
/// the verdict; with a sequence, (e) compares the detected tangent with the
/// certificate frame and is advisory.
pub fn check_rationally_outgoing(
    cert: &TangentCertificate,
    x: &ClosedSet,
    seq: Option<&PointSequence>,
    tol: f64,
) -> Result<Report> {
    let n = cert.dim();
    if x.dim() != n {
        return Err(Error::MalformedCertificate(format!(
            "X lives in dimension {}, the certificate in {n}",
            x.dim()
        )));
    }
    let k = cert.degree();
    let mut checks = geometric_checks(cert)?;

    let d = faces_meet_x_equally(&cert.s, &cert.f, x)?;
    let d_detail = match &d {
        Ok(()) => "S ∩ X ⊆ F on the polyhedral part, samples and declared limits".to_string(),
        Err(why) => why.clone(),
    };
    checks.push(Check::new("d", "F ∩ X = S ∩ X", d.is_ok(), d_detail));

    if let Some(seq) = seq {
        let (ok, detail) = match detect_k_tangent(seq, k, tol) {
            Ok(est) => {
                let exact = cert.frame.to_numeric();
                let err = est
                    .frame
                    .vectors
                    .iter()
                    .zip(&exact.vectors)
                    .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                    .fold(0.0, f64::max);
                let limit_ok = &seq.limit == &cert.x;
                (
                    limit_ok && est.converged && err <= tol,
                    format!(
                        "detected frame {:?} differs by {err:.3e} (tolerance {tol:e}); converged: {}; limit matches x: {limit_ok}",
                        est.frame.vectors, est.converged
                    ),
                )
            }
            Err(e) => (false, e.to_string()),
        };
        checks.push(Check::advisory(
            "e",
            "u is the k-tangent of the sequence",
            ok,
            detail,
        ));
    }
    Ok(Report::from_checks(checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

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
    fn residual_examples() {
        let x = Point::from_ints(&[0, 0]);
        let half = Point::from_ratios(&[(1, 2), (0, 1)]);
        assert_eq!(
            residual_direction(&x, &half, &NumericFrame::empty()).unwrap(),
            vec![1.0, 0.0]
        );
        let e1 = NumericFrame::new(vec![vec![1.0, 0.0]], 1e-9).unwrap();
        let diag = Point::from_ratios(&[(1, 2), (1, 2)]);
        assert_eq!(residual_direction(&x, &diag, &e1).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(
            residual_direction(&x, &half, &e1),
            Err(Error::ZeroResidual { .. })
        ));
    }

    #[test]
    fn cusp_tangent_is_horizontal() {
        let est = detect_k_tangent(&cusp_sequence(10_000), 1, 1e-6).unwrap();
        assert!(est.converged);
        let u = &est.frame.vectors[0];
        assert!((u[0] - 1.0).abs() < 1e-6 && u[1].abs() < 1e-6, "{u:?}");
    }

    #[test]
    fn sequences_reject_the_limit() {
        let x = Point::from_ints(&[0, 0]);
        assert!(PointSequence::new(vec![Point::from_ints(&[1, 0]), x.clone()], x).is_err());
    }

    #[test]
    fn ratio_test_examples() {
        let tri = Simplex::new(vec![
            Point::from_ints(&[0, 0]),
            Point::from_ints(&[1, 0]),
            Point::from_ints(&[1, 1]),
        ])
        .unwrap();
        let p = Polyhedron::from_simplex(tri);
        let x = Point::from_ints(&[0, 0]);
        let one = ExactFrame::new(vec![Point::from_ints(&[1, 0])]).unwrap();
        assert_eq!(
            tangent_simplex_in_polyhedron(&p, &x, &one).unwrap().lengths,
            vec![ratio(1, 2)]
        );
        let two =
            ExactFrame::new(vec![Point::from_ints(&[1, 0]), Point::from_ints(&[0, 1])]).unwrap();
        assert_eq!(
            tangent_simplex_in_polyhedron(&p, &x, &two).unwrap().lengths,
            vec![ratio(1, 2), ratio(1, 4)]
        );
        let up = ExactFrame::new(vec![Point::from_ints(&[0, 1])]).unwrap();
        assert!(matches!(
            tangent_simplex_in_polyhedron(&p, &x, &up),
            Err(Error::NoAdmissibleGenerator(_))
        ));
    }

    #[test]
    fn relative_interior_start() {
        let tri = Simplex::new(vec![
            Point::from_ints(&[0, 0]),
            Point::from_ints(&[4, 0]),
            Point::from_ints(&[0, 4]),
        ])
        .unwrap();
        let p = Polyhedron::from_simplex(tri);
        let x = Point::from_ints(&[1, 1]);
        let frame =
            ExactFrame::new(vec![Point::from_ints(&[1, 0]), Point::from_ints(&[0, 1])]).unwrap();
        let found = tangent_simplex_search(&p, &x, &frame).unwrap();
        assert_eq!(found.steps, vec![int(2), ratio(1, 1)]);
        assert_eq!(found.spec.lengths, vec![int(1), ratio(1, 2)]);
    }

    #[test]
    fn cusp_certificate_passes_and_controls_fail() {
        let x = cusp_set(200);
        let cert = cusp_cert();
        let report = check_rationally_outgoing(&cert, &x, Some(&cusp_sequence(200)), 1e-3).unwrap();
        assert!(report.verdict, "{}", report.summary);
        let mut same = cert.clone();
        same.f = same.s.clone();
        let r = check_rationally_outgoing(&same, &x, None, 1e-6).unwrap();
        assert!(!r.verdict && !r.passed("c"));
        let augmented = x.with_point(Point::from_ratios(&[(1, 4), (0, 1)])).unwrap();
        let r = check_rationally_outgoing(&cert, &augmented, None, 1e-6).unwrap();
        assert!(!r.verdict && !r.passed("d"));
    }

    #[test]
    fn closed_set_json_round_trip() {
        let x = cusp_set(50);
        let text = serde_json::to_string(&x).unwrap();
        assert!(text.contains("\"generator\""));
        let back: ClosedSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
    }
}
