//! Planar exact geometry: rational vectors, centrally symmetric convex
//! polygons, polar duality, gauge norms and quadratic/affine forms in `(x, y)`.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::{int, rat_to_f64, Rational};
use crate::serde_rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vec2 {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y: Rational,
}

impl Vec2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Vec2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Vec2::new(int(x), int(y))
    }

    pub fn zero() -> Self {
        Vec2::new(Rational::zero(), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn dot(&self, o: &Vec2) -> Rational {
        &self.x * &o.x + &self.y * &o.y
    }

    /// z-component of the planar cross product.
    pub fn cross(&self, o: &Vec2) -> Rational {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn scale(&self, r: &Rational) -> Vec2 {
        Vec2::new(&self.x * r, &self.y * r)
    }

    /// Clockwise quarter turn `(x, y) ↦ (y, −x)`.
    pub fn rot_cw(&self) -> Vec2 {
        Vec2::new(self.y.clone(), -self.x.clone())
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [rat_to_f64(&self.x), rat_to_f64(&self.y)]
    }

    /// 0 for directions with polar angle in `[0, π)`, 1 for `[π, 2π)`.
    fn half_plane(&self) -> u8 {
        if self.y.is_positive() || (self.y.is_zero() && self.x.is_positive()) {
            0
        } else {
            1
        }
    }

    /// Orders nonzero vectors by polar angle in `[0, 2π)`.
    pub fn angle_cmp(&self, o: &Vec2) -> Ordering {
        self.half_plane()
            .cmp(&o.half_plane())
            .then_with(|| o.cross(self).cmp(&Rational::zero()))
    }
}

impl<'a> Add<&'a Vec2> for &'a Vec2 {
    type Output = Vec2;
    fn add(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a Vec2> for &'a Vec2 {
    type Output = Vec2;
    fn sub(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        &self + &o
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        &self - &o
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x.clone(), -self.y.clone())
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        -&self
    }
}

/// Signed area of a closed polygonal loop; positive when counterclockwise.
pub fn shoelace_area(vertices: &[Vec2]) -> Rational {
    let n = vertices.len();
    let mut twice = Rational::zero();
    for k in 0..n {
        twice += vertices[k].cross(&vertices[(k + 1) % n]);
    }
    twice / int(2)
}

/// A strictly convex, centrally symmetric polygon in canonical form:
/// counterclockwise, starting at the vertex of least polar angle in `[0, 2π)`.
///
/// With that ordering, two polygons are equal exactly when their vertex lists
/// are equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Validates a vertex list and rotates it into canonical order.
    pub fn from_vertices(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidPolygon(format!(
                "expected an even number (>= 4) of vertices, got {n}"
            )));
        }
        let half = n / 2;
        for k in 0..half {
            if vertices[k + half] != -&vertices[k] {
                return Err(Error::InvalidPolygon(
                    "polygon is not centrally symmetric".into(),
                ));
            }
        }
        for k in 0..n {
            let a = &vertices[k];
            let b = &vertices[(k + 1) % n];
            let c = &vertices[(k + 2) % n];
            if !(b - a).cross(&(c - b)).is_positive() {
                return Err(Error::InvalidPolygon(
                    "polygon is not strictly convex and counterclockwise".into(),
                ));
            }
        }
        let start = (0..n)
            .min_by(|&i, &j| vertices[i].angle_cmp(&vertices[j]))
            .expect("nonempty");
        let mut vertices = vertices;
        vertices.rotate_left(start);
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Number of vertices, `2N`.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn half_count(&self) -> usize {
        self.vertices.len() / 2
    }

    pub fn vertex(&self, k: usize) -> &Vec2 {
        &self.vertices[k % self.vertices.len()]
    }

    /// Edge `k` runs from vertex `k` to vertex `k + 1`.
    pub fn edge(&self, k: usize) -> (&Vec2, &Vec2) {
        (self.vertex(k), self.vertex(k + 1))
    }

    pub fn area(&self) -> Rational {
        shoelace_area(&self.vertices)
    }

    /// Vertex of the polar dual associated with edge `k`: the solution of
    /// `a·v_k = a·v_{k+1} = 1`.
    pub fn dual_vertex(&self, k: usize) -> Vec2 {
        let (u, v) = self.edge(k);
        let det = u.cross(v);
        Vec2::new((&v.y - &u.y) / &det, (&u.x - &v.x) / &det)
    }

    /// Dual vertices indexed by edge (not in canonical order).
    pub fn dual_vertices(&self) -> Vec<Vec2> {
        (0..self.len()).map(|k| self.dual_vertex(k)).collect()
    }

    pub fn scaled(&self, r: &Rational) -> ConvexPolygon {
        assert!(r.is_positive());
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| v.scale(r)).collect(),
        }
    }
}

/// Canonical convex hull of a point set that is symmetric under negation
/// (or is made so when `symmetrize` is set).
///
/// Interior points and points in the relative interior of hull edges are
/// dropped.
pub fn symmetric_hull(points: &[Vec2], symmetrize: bool) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::DegenerateHull);
    }
    let mut pts: Vec<Vec2> = points.to_vec();
    if symmetrize {
        pts.extend(points.iter().map(|p| -p));
    } else {
        let set: std::collections::HashSet<&Vec2> = points.iter().collect();
        if points.iter().any(|p| !set.contains(&-p)) {
            return Err(Error::NotSymmetric);
        }
    }
    pts.sort_by(|a, b| a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateHull);
    }
    // Andrew's monotone chain, strict turns only.
    let turn = |o: &Vec2, a: &Vec2, b: &Vec2| (a - o).cross(&(b - o));
    let mut lower: Vec<Vec2> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateHull);
    }
    ConvexPolygon::from_vertices(lower)
}

/// Polar dual `{a : a·y ≤ 1 for all y in p}`.
pub fn polar_dual(p: &ConvexPolygon) -> ConvexPolygon {
    ConvexPolygon::from_vertices(p.dual_vertices()).expect("dual of a valid polygon is valid")
}

/// Minkowski gauge `min{t ≥ 0 : v ∈ tQ}`, evaluated as the largest support
/// value over the dual vertices.
pub fn gauge_norm(p: &ConvexPolygon, v: &Vec2) -> Rational {
    p.dual_vertices()
        .iter()
        .map(|a| a.dot(v))
        .max()
        .map(|m| if m.is_negative() { Rational::zero() } else { m })
        .expect("polygon has vertices")
}

/// Precomputed gauge evaluator for repeated queries.
#[derive(Clone, Debug)]
pub struct Gauge {
    duals: Vec<Vec2>,
}

impl Gauge {
    pub fn new(p: &ConvexPolygon) -> Self {
        Gauge {
            duals: p.dual_vertices(),
        }
    }

    pub fn norm(&self, v: &Vec2) -> Rational {
        self.duals
            .iter()
            .map(|a| a.dot(v))
            .max()
            .map(|m| if m.is_negative() { Rational::zero() } else { m })
            .expect("polygon has vertices")
    }

    pub fn duals(&self) -> &[Vec2] {
        &self.duals
    }
}

/// `a1·x² + a2·xy + a3·y² + b1·x + b2·y + c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadratic2 {
    #[serde(with = "serde_rational")]
    pub a1: Rational,
    #[serde(with = "serde_rational")]
    pub a2: Rational,
    #[serde(with = "serde_rational")]
    pub a3: Rational,
    #[serde(with = "serde_rational")]
    pub b1: Rational,
    #[serde(with = "serde_rational")]
    pub b2: Rational,
    #[serde(with = "serde_rational")]
    pub c: Rational,
}

impl Quadratic2 {
    pub fn zero() -> Self {
        let z = Rational::zero;
        Quadratic2 {
            a1: z(),
            a2: z(),
            a3: z(),
            b1: z(),
            b2: z(),
            c: z(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Quadratic2 { c, ..Self::zero() }
    }

    pub fn eval(&self, p: &Vec2) -> Rational {
        let (x, y) = (&p.x, &p.y);
        &self.a1 * x * x + &self.a2 * x * y + &self.a3 * y * y + &self.b1 * x + &self.b2 * y + &self.c
    }

    /// Homogenized value `q2(x,y) + (b·(x,y))·t + c·t²`, which equals
    /// `t²·self(x/t, y/t)` for `t > 0`.
    pub fn eval_homogeneous(&self, x: &Rational, y: &Rational, t: &Rational) -> Rational {
        &self.a1 * x * x
            + &self.a2 * x * y
            + &self.a3 * y * y
            + (&self.b1 * x + &self.b2 * y) * t
            + &self.c * t * t
    }

    pub fn coefficients(&self) -> [&Rational; 6] {
        [&self.a1, &self.a2, &self.a3, &self.b1, &self.b2, &self.c]
    }

    pub fn scale(&self, r: &Rational) -> Quadratic2 {
        Quadratic2 {
            a1: &self.a1 * r,
            a2: &self.a2 * r,
            a3: &self.a3 * r,
            b1: &self.b1 * r,
            b2: &self.b2 * r,
            c: &self.c * r,
        }
    }

    pub fn to_f64(&self) -> [f64; 6] {
        self.coefficients().map(rat_to_f64)
    }
}

impl Add for &Quadratic2 {
    type Output = Quadratic2;
    fn add(self, o: &Quadratic2) -> Quadratic2 {
        Quadratic2 {
            a1: &self.a1 + &o.a1,
            a2: &self.a2 + &o.a2,
            a3: &self.a3 + &o.a3,
            b1: &self.b1 + &o.b1,
            b2: &self.b2 + &o.b2,
            c: &self.c + &o.c,
        }
    }
}

/// Affine function `cx·x + cy·y + c0` on the plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub cx: Rational,
    pub cy: Rational,
    pub c0: Rational,
}

impl Affine {
    pub fn constant(c0: Rational) -> Self {
        Affine {
            cx: Rational::zero(),
            cy: Rational::zero(),
            c0,
        }
    }

    pub fn x() -> Self {
        Affine {
            cx: Rational::one(),
            cy: Rational::zero(),
            c0: Rational::zero(),
        }
    }

    pub fn y() -> Self {
        Affine {
            cx: Rational::zero(),
            cy: Rational::one(),
            c0: Rational::zero(),
        }
    }

    pub fn eval(&self, p: &Vec2) -> Rational {
        &self.cx * &p.x + &self.cy * &p.y + &self.c0
    }

    /// `t · self(x/t, y/t)`.
    pub fn eval_homogeneous(&self, x: &Rational, y: &Rational, t: &Rational) -> Rational {
        &self.cx * x + &self.cy * y + &self.c0 * t
    }

    pub fn scale(&self, r: &Rational) -> Affine {
        Affine {
            cx: &self.cx * r,
            cy: &self.cy * r,
            c0: &self.c0 * r,
        }
    }

    pub fn plus(&self, o: &Affine) -> Affine {
        Affine {
            cx: &self.cx + &o.cx,
            cy: &self.cy + &o.cy,
            c0: &self.c0 + &o.c0,
        }
    }

    pub fn minus(&self, o: &Affine) -> Affine {
        self.plus(&o.scale(&int(-1)))
    }

    /// Product of two affine functions as a quadratic.
    pub fn times(&self, o: &Affine) -> Quadratic2 {
        Quadratic2 {
            a1: &self.cx * &o.cx,
            a2: &self.cx * &o.cy + &self.cy * &o.cx,
            a3: &self.cy * &o.cy,
            b1: &self.cx * &o.c0 + &self.c0 * &o.cx,
            b2: &self.cy * &o.c0 + &self.c0 * &o.cy,
            c: &self.c0 * &o.c0,
        }
    }
}

impl Mul<&Rational> for &Affine {
    type Output = Affine;
    fn mul(self, r: &Rational) -> Affine {
        self.scale(r)
    }
}

/// A planar point whose coordinates are affine functions of `(x, y)`.
#[derive(Clone, Debug)]
pub struct AffinePoint {
    pub x: Affine,
    pub y: Affine,
}

impl AffinePoint {
    pub fn constant(v: &Vec2) -> Self {
        AffinePoint {
            x: Affine::constant(v.x.clone()),
            y: Affine::constant(v.y.clone()),
        }
    }

    /// `self + coeff · dir`, with `coeff` affine and `dir` fixed.
    pub fn plus_along(&self, coeff: &Affine, dir: &Vec2) -> Self {
        AffinePoint {
            x: self.x.plus(&coeff.scale(&dir.x)),
            y: self.y.plus(&coeff.scale(&dir.y)),
        }
    }

    pub fn cross(&self, o: &AffinePoint) -> Quadratic2 {
        let xy = self.x.times(&o.y);
        let yx = self.y.times(&o.x).scale(&int(-1));
        &xy + &yx
    }

    pub fn eval(&self, p: &Vec2) -> Vec2 {
        Vec2::new(self.x.eval(p), self.y.eval(p))
    }
}

/// Exact integral of a quadratic over a simple polygon, by a signed fan of
/// triangles and the edge-midpoint rule (exact for degree ≤ 2).
pub fn integrate_quadratic_over_polygon(q: &Quadratic2, poly: &[Vec2]) -> Rational {
    let n = poly.len();
    if n < 3 {
        return Rational::zero();
    }
    let mut apex = Vec2::zero();
    for v in poly {
        apex = &apex + v;
    }
    let apex = apex.scale(&(Rational::one() / int(n as i64)));
    let half = Rational::new(1.into(), 2.into());
    let mut total = Rational::zero();
    for k in 0..n {
        let a = &poly[k];
        let b = &poly[(k + 1) % n];
        let area = (a - &apex).cross(&(b - &apex)) * &half;
        if area.is_zero() {
            continue;
        }
        let mid = |u: &Vec2, v: &Vec2| (u + v).scale(&half);
        let s = q.eval(&mid(&apex, a)) + q.eval(&mid(a, b)) + q.eval(&mid(b, &apex));
        total += area * s / int(3);
    }
    total
}

/// Clips a polygon (any orientation) against a counterclockwise convex
/// polygon, exactly.
pub fn clip_convex(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    let mut output = subject.to_vec();
    let m = clip.len();
    for k in 0..m {
        if output.is_empty() {
            break;
        }
        let a = &clip[k];
        let b = &clip[(k + 1) % m];
        let edge = b - a;
        let side = |p: &Vec2| edge.cross(&(p - a));
        let input = std::mem::take(&mut output);
        let n = input.len();
        for i in 0..n {
            let cur = &input[i];
            let prev = &input[(i + n - 1) % n];
            let sc = side(cur);
            let sp = side(prev);
            let cur_in = !sc.is_negative();
            let prev_in = !sp.is_negative();
            if cur_in {
                if !prev_in {
                    output.push(intersect(prev, cur, &sp, &sc));
                }
                output.push(cur.clone());
            } else if prev_in {
                output.push(intersect(prev, cur, &sp, &sc));
            }
        }
    }
    output.dedup();
    if output.len() > 1 && output.first() == output.last() {
        output.pop();
    }
    output
}

fn intersect(p: &Vec2, q: &Vec2, sp: &Rational, sq: &Rational) -> Vec2 {
    let t = sp / (sp - sq);
    p + &(q - p).scale(&t)
}

/// Point-in-convex-polygon (closed) for a counterclockwise vertex list.
pub fn convex_contains(poly: &[Vec2], p: &Vec2) -> bool {
    let n = poly.len();
    (0..n).all(|k| {
        let a = &poly[k];
        let b = &poly[(k + 1) % n];
        !(b - a).cross(&(p - a)).is_negative()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;
    use proptest::prelude::*;

    fn v(x: i64, y: i64) -> Vec2 {
        Vec2::from_ints(x, y)
    }

    fn square() -> ConvexPolygon {
        symmetric_hull(&[v(1, 0), v(-1, 0), v(0, 1), v(0, -1)], false).unwrap()
    }

    fn hexagon() -> ConvexPolygon {
        symmetric_hull(&[v(1, 0), v(0, 1), v(1, 1)], true).unwrap()
    }

    #[test]
    fn hull_examples() {
        assert_eq!(square().vertices(), &[v(1, 0), v(0, 1), v(-1, 0), v(0, -1)]);
        assert_eq!(
            hexagon().vertices(),
            &[v(1, 0), v(1, 1), v(0, 1), v(-1, 0), v(-1, -1), v(0, -1)]
        );
        assert!(matches!(
            symmetric_hull(&[v(2, 0), v(-2, 0), v(1, 0)], true),
            Err(Error::DegenerateHull)
        ));
        assert!(matches!(
            symmetric_hull(&[v(1, 0), v(0, 1)], false),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let pts = [v(2, 0), v(0, 2), v(1, 1), v(1, 0), v(0, 0)];
        let h = symmetric_hull(&pts, true).unwrap();
        assert_eq!(h.vertices(), &[v(2, 0), v(0, 2), v(-2, 0), v(0, -2)]);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(polar_dual(&square()).vertices(), &[v(1, 1), v(-1, 1), v(-1, -1), v(1, -1)]);
        assert_eq!(
            polar_dual(&hexagon()).vertices(),
            &[v(1, 0), v(0, 1), v(-1, 1), v(-1, 0), v(0, -1), v(1, -1)]
        );
        assert_eq!(polar_dual(&polar_dual(&hexagon())), hexagon());
    }

    #[test]
    fn gauge_examples() {
        assert_eq!(gauge_norm(&square(), &v(3, 4)), int(7));
        assert_eq!(gauge_norm(&hexagon(), &v(1, 1)), int(1));
        assert_eq!(gauge_norm(&hexagon(), &Vec2::zero()), int(0));
    }

    #[test]
    fn shoelace_examples() {
        let sq = [v(0, 0), v(1, 0), v(1, 1), v(0, 1)];
        assert_eq!(shoelace_area(&sq), int(1));
        let mut cw = sq.to_vec();
        cw.reverse();
        assert_eq!(shoelace_area(&cw), int(-1));
        assert_eq!(shoelace_area(&[v(0, 0), v(4, 0), v(0, 3)]), int(6));
    }

    #[test]
    fn integration_examples() {
        let unit = [v(0, 0), v(1, 0), v(1, 1), v(0, 1)];
        assert_eq!(integrate_quadratic_over_polygon(&Quadratic2::constant(int(1)), &unit), int(1));
        let x2 = Quadratic2 { a1: int(1), ..Quadratic2::zero() };
        assert_eq!(integrate_quadratic_over_polygon(&x2, &unit), rat(1, 3));
        let xy = Quadratic2 { a2: int(1), ..Quadratic2::zero() };
        assert_eq!(integrate_quadratic_over_polygon(&xy, &[v(0, 0), v(1, 0), v(0, 1)]), rat(1, 24));
    }

    #[test]
    fn clipping() {
        let sq = [v(0, 0), v(2, 0), v(2, 2), v(0, 2)];
        let tri = [v(1, -1), v(3, 1), v(1, 1)];
        let out = clip_convex(&tri, &sq);
        assert_eq!(shoelace_area(&out), int(1));
        let far = [v(5, 5), v(6, 5), v(6, 6)];
        assert!(clip_convex(&far, &sq).is_empty());
    }

    fn small_polygon() -> impl Strategy<Value = ConvexPolygon> {
        prop::collection::vec((-6i64..=6, -6i64..=6), 2..7).prop_filter_map("degenerate", |pts| {
            let pts: Vec<Vec2> = pts.into_iter().map(|(x, y)| v(x, y)).collect();
            symmetric_hull(&pts, true).ok()
        })
    }

    proptest! {
        #[test]
        fn gauge_is_a_norm(p in small_polygon(), a in (-20i64..20, -20i64..20), b in (-20i64..20, -20i64..20), r in (-9i64..9, 1i64..5)) {
            let u = v(a.0, a.1);
            let w = v(b.0, b.1);
            let r = rat(r.0, r.1);
            let g = Gauge::new(&p);
            prop_assert!(g.norm(&(&u + &w)) <= g.norm(&u) + g.norm(&w));
            prop_assert_eq!(g.norm(&-&u), g.norm(&u));
            prop_assert_eq!(g.norm(&u.scale(&r)), r.abs() * g.norm(&u));
            prop_assert_eq!(g.norm(&u), gauge_norm(&p, &u));
        }

        #[test]
        fn dual_is_involution(p in small_polygon()) {
            prop_assert_eq!(polar_dual(&polar_dual(&p)), p);
        }

        #[test]
        fn shoelace_translation_and_reversal(pts in prop::collection::vec((-9i64..9, -9i64..9), 3..8), t in (-9i64..9, -9i64..9)) {
            let loop_: Vec<Vec2> = pts.iter().map(|&(x, y)| v(x, y)).collect();
            let shift = v(t.0, t.1);
            let moved: Vec<Vec2> = loop_.iter().map(|p| p + &shift).collect();
            prop_assert_eq!(shoelace_area(&moved), shoelace_area(&loop_));
            let mut rev = loop_.clone();
            rev.reverse();
            prop_assert_eq!(shoelace_area(&rev), -shoelace_area(&loop_));
        }
    }
}
