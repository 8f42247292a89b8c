//! The isoperimetrix of a polygonal norm, the quadrilateral atlas of its unit
//! ball, and the balayage function `A` (the largest area a unit-length path to
//! a given endpoint can sweep against its chord).
//!
//! Indices are 0-based here. Side `k` of the isoperimetrix is parallel to
//! vertex `k` of the norm ball `L`, and edge `k` of `L` joins vertex `k` to
//! vertex `k + 1`.

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{
    convex_contains, shoelace_area, Affine, AffinePoint, ConvexPolygon, Gauge, Quadratic2, Vec2,
};
use crate::numbers::{int, rat, rat_to_string, Rational};

#[derive(Clone, Debug)]
pub struct IsoSide {
    /// Unit-norm direction; equal to the matching vertex of `L`.
    pub direction: Vec2,
    pub length: Rational,
    /// Arclength position of the side's start, in `[0, 1)`.
    pub offset: Rational,
}

/// Unit-perimeter isoperimetrix.
#[derive(Clone, Debug)]
pub struct Isoperimetrix {
    pub polygon: ConvexPolygon,
    pub sides: Vec<IsoSide>,
    /// `start[k]` is the vertex where side `k` begins.
    pub starts: Vec<Vec2>,
}

impl Isoperimetrix {
    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn side(&self, k: usize) -> &IsoSide {
        &self.sides[k % self.sides.len()]
    }

    /// Enclosed area, which is also `A(0)`.
    pub fn area(&self) -> Rational {
        self.polygon.area()
    }
}

pub fn build_isoperimetrix(l: &ConvexPolygon) -> Isoperimetrix {
    let n = l.len();
    let duals = l.dual_vertices();
    let mut raw_lengths = Vec::with_capacity(n);
    for k in 0..n {
        let side = (&duals[k] - &duals[(k + n - 1) % n]).rot_cw();
        let v = l.vertex(k);
        let lambda = side.dot(v) / v.dot(v);
        debug_assert!(side == v.scale(&lambda) && lambda.is_positive());
        raw_lengths.push(lambda);
    }
    let perimeter: Rational = raw_lengths.iter().sum();
    let inv = Rational::one() / &perimeter;
    let starts: Vec<Vec2> = (0..n)
        .map(|k| duals[(k + n - 1) % n].rot_cw().scale(&inv))
        .collect();
    let polygon = ConvexPolygon::from_vertices(starts.clone()).expect("isoperimetrix is a valid polygon");
    let origin_side = starts
        .iter()
        .position(|s| s == polygon.vertex(0))
        .expect("canonical start is a side start");
    let mut sides: Vec<IsoSide> = (0..n)
        .map(|k| IsoSide {
            direction: l.vertex(k).clone(),
            length: &raw_lengths[k] * &inv,
            offset: Rational::zero(),
        })
        .collect();
    let mut acc = Rational::zero();
    for step in 0..n {
        let k = (origin_side + step) % n;
        sides[k].offset = acc.clone();
        acc += &sides[k].length;
    }
    Isoperimetrix {
        polygon,
        sides,
        starts,
    }
}

/// One directed segment of a planar path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub direction: Vec2,
    pub length: Rational,
}

/// A polygonal path from the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathShape {
    pub segments: Vec<Segment>,
    pub total: Rational,
    pub endpoint: Vec2,
    /// Signed area between the path and the chord back to the origin.
    pub balayage: Rational,
}

impl PathShape {
    /// Builds a path, dropping zero-length segments.
    pub fn new(segments: Vec<Segment>) -> Self {
        let segments: Vec<Segment> = segments.into_iter().filter(|s| !s.length.is_zero()).collect();
        let vertices = path_vertices(&segments);
        let total = segments.iter().map(|s| s.length.clone()).sum();
        let endpoint = vertices.last().cloned().unwrap_or_else(Vec2::zero);
        let balayage = shoelace_area(&vertices);
        PathShape {
            segments,
            total,
            endpoint,
            balayage,
        }
    }

    pub fn vertices(&self) -> Vec<Vec2> {
        path_vertices(&self.segments)
    }

    /// The same shape traversed in reverse order, which negates the area.
    pub fn reversed_order(&self) -> PathShape {
        let mut segs = self.segments.clone();
        segs.reverse();
        PathShape::new(segs)
    }

    pub fn scaled(&self, r: &Rational) -> PathShape {
        PathShape::new(
            self.segments
                .iter()
                .map(|s| Segment {
                    direction: s.direction.clone(),
                    length: &s.length * r,
                })
                .collect(),
        )
    }
}

fn path_vertices(segments: &[Segment]) -> Vec<Vec2> {
    let mut out = vec![Vec2::zero()];
    let mut cur = Vec2::zero();
    for s in segments {
        cur = &cur + &s.direction.scale(&s.length);
        out.push(cur.clone());
    }
    out
}

/// Nondegenerate panel footprint `Q_ij`: endpoints of trace paths that start
/// inside side `i` and end inside side `j` of a scaled isoperimetrix.
#[derive(Clone, Debug)]
pub struct Quad {
    pub i: usize,
    pub j: usize,
    /// Number of distinct directions in the trace paths (3 or more).
    pub sides: usize,
    /// Counterclockwise corners.
    pub vertices: Vec<Vec2>,
    /// Balayage `A` restricted to this quad.
    pub poly: Quadratic2,
    /// Length run along side `i`.
    pub alpha: Affine,
    /// Scale of the isoperimetrix copy.
    pub scale: Affine,
    /// Length run along side `j`.
    pub beta: Affine,
    /// The quad is `{p : f(p) ≥ 0 for every f}`.
    pub bounds: [Affine; 4],
    pub a_max: Rational,
}

impl Quad {
    pub fn contains(&self, p: &Vec2) -> bool {
        self.bounds.iter().all(|f| !f.eval(p).is_negative())
    }

    pub fn id(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    /// Indices of the sides strictly between `i` and `j`.
    pub fn middle(&self, n: usize) -> Vec<usize> {
        middle_sides(self.i, self.j, n)
    }

    /// Trace path of the quad at `p` (no containment check).
    pub fn trace(&self, iso: &Isoperimetrix, p: &Vec2) -> PathShape {
        let s = self.scale.eval(p);
        let mut segs = vec![Segment {
            direction: iso.side(self.i).direction.clone(),
            length: self.alpha.eval(p),
        }];
        for m in middle_sides(self.i, self.j, iso.len()) {
            segs.push(Segment {
                direction: iso.side(m).direction.clone(),
                length: &s * &iso.side(m).length,
            });
        }
        segs.push(Segment {
            direction: iso.side(self.j).direction.clone(),
            length: self.beta.eval(p),
        });
        PathShape::new(segs)
    }
}

fn middle_sides(i: usize, j: usize, n: usize) -> Vec<usize> {
    let gap = (j + n - i) % n;
    (1..gap).map(|d| (i + d) % n).collect()
}

/// Edge `k` of `L`. The points over it are reached by beeline families.
#[derive(Clone, Debug)]
pub struct SideEdge {
    pub k: usize,
    pub start: Vec2,
    pub end: Vec2,
    /// `cross(start, end)`; the balayage at parameter `a` is `a(1−a)·cross/2`.
    pub cross: Rational,
}

impl SideEdge {
    /// Balayage at `start + a·(end − start)`.
    pub fn balayage_at(&self, a: &Rational) -> Rational {
        a * (Rational::one() - a) * &self.cross / int(2)
    }

    /// Largest balayage on the edge, at its midpoint.
    pub fn peak(&self) -> Rational {
        &self.cross / int(8)
    }

    /// Edge parameter of a point on the edge line.
    pub fn parameter(&self, p: &Vec2) -> Rational {
        let d = &self.end - &self.start;
        (p - &self.start).dot(&d) / d.dot(&d)
    }

    /// Coordinates `(b₁, b₂)` with `p = b₁·start + b₂·end`, as affine forms.
    pub fn barycentric_forms(&self) -> (Affine, Affine) {
        let (u, v) = (&self.start, &self.end);
        let det = &self.cross;
        let b1 = Affine {
            cx: &v.y / det,
            cy: -(&v.x / det),
            c0: Rational::zero(),
        };
        let b2 = Affine {
            cx: -(&u.y / det),
            cy: &u.x / det,
            c0: Rational::zero(),
        };
        (b1, b2)
    }
}

/// Degenerate panel `Q_kk`: the segment `{−r·v_k : 0 ≤ r < length}` of
/// endpoints reached by a one-parameter family of trace paths.
#[derive(Clone, Debug)]
pub struct SlideSegment {
    pub k: usize,
    pub direction: Vec2,
    pub length: Rational,
}

#[derive(Clone, Debug)]
pub struct PanelAtlas {
    pub l: ConvexPolygon,
    pub gauge: Gauge,
    pub iso: Isoperimetrix,
    /// Sorted by `(i, j)`.
    pub quads: Vec<Quad>,
    pub edges: Vec<SideEdge>,
    pub slides: Vec<SlideSegment>,
    pub a_max: Rational,
}

/// Inverse of a 3×3 rational matrix, if invertible.
fn inverse3(m: &[[Rational; 3]; 3]) -> Option<[[Rational; 3]; 3]> {
    let c = |r: usize, k: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (k1, k2) = ((k + 1) % 3, (k + 2) % 3);
        &m[r1][k1] * &m[r2][k2] - &m[r1][k2] * &m[r2][k1]
    };
    let det = &m[0][0] * c(0, 0) + &m[0][1] * c(0, 1) + &m[0][2] * c(0, 2);
    if det.is_zero() {
        return None;
    }
    let mut inv: [[Rational; 3]; 3] = Default::default();
    for (r, row) in inv.iter_mut().enumerate() {
        for (k, e) in row.iter_mut().enumerate() {
            *e = c(k, r) / &det;
        }
    }
    Some(inv)
}

fn build_quad(iso: &Isoperimetrix, i: usize, j: usize) -> Result<Quad> {
    let n = iso.len();
    let (ui, li) = (&iso.side(i).direction, &iso.side(i).length);
    let (uj, lj) = (&iso.side(j).direction, &iso.side(j).length);
    let middle = middle_sides(i, j, n);
    let m_len: Rational = middle.iter().map(|&m| iso.side(m).length.clone()).sum();
    let mut w = Vec2::zero();
    for &m in &middle {
        w = &w + &iso.side(m).direction.scale(&iso.side(m).length);
    }

    // α + s·M + β = 1 and α·u_i + s·W + β·u_j = p
    let mat = [
        [Rational::one(), m_len.clone(), Rational::one()],
        [ui.x.clone(), w.x.clone(), uj.x.clone()],
        [ui.y.clone(), w.y.clone(), uj.y.clone()],
    ];
    let inv = inverse3(&mat)
        .ok_or_else(|| Error::AtlasInconsistency(format!("singular trace system for quad ({i}, {j})")))?;
    let unknown = |k: usize| Affine {
        cx: inv[k][1].clone(),
        cy: inv[k][2].clone(),
        c0: inv[k][0].clone(),
    };
    let (alpha, scale, beta) = (unknown(0), unknown(1), unknown(2));

    let mut pts = vec![AffinePoint::constant(&Vec2::zero())];
    let mut cur = pts[0].plus_along(&alpha, ui);
    pts.push(cur.clone());
    for &m in &middle {
        cur = cur.plus_along(&scale.scale(&iso.side(m).length), &iso.side(m).direction);
        pts.push(cur.clone());
    }
    cur = cur.plus_along(&beta, uj);
    if cur.x != Affine::x() || cur.y != Affine::y() {
        return Err(Error::AtlasInconsistency(format!("trace path of quad ({i}, {j}) misses its endpoint")));
    }
    pts.push(cur);
    let mut twice = Quadratic2::zero();
    for k in 0..pts.len() - 1 {
        twice = &twice + &pts[k].cross(&pts[k + 1]);
    }
    let poly = twice.scale(&rat(1, 2));

    let corner = |a1: &Rational, a2: &Rational| {
        let num = &(&ui.scale(a1) + &w) + &uj.scale(a2);
        num.scale(&(Rational::one() / (a1 + &m_len + a2)))
    };
    let zero = Rational::zero();
    let mut vertices = vec![
        corner(&zero, &zero),
        corner(li, &zero),
        corner(li, lj),
        corner(&zero, lj),
    ];
    let area = shoelace_area(&vertices);
    if area.is_zero() {
        return Err(Error::AtlasInconsistency(format!("quad ({i}, {j}) has zero area")));
    }
    if area.is_negative() {
        vertices.reverse();
    }

    let bounds = [
        alpha.clone(),
        beta.clone(),
        scale.scale(li).minus(&alpha),
        scale.scale(lj).minus(&beta),
    ];
    let quad = Quad {
        i,
        j,
        sides: middle.len() + 2,
        vertices,
        poly,
        alpha,
        scale,
        beta,
        bounds,
        a_max: Rational::zero(),
    };
    verify_quad(iso, &quad, &m_len, &w)?;
    let a_max = quadratic_max_on_convex(&quad.poly, &quad.vertices);
    Ok(Quad { a_max, ..quad })
}

/// Rebuilds trace paths directly from interior side parameters and checks the
/// composed quadratic and the affine solution against them.
fn verify_quad(iso: &Isoperimetrix, q: &Quad, m_len: &Rational, w: &Vec2) -> Result<()> {
    let li = &iso.side(q.i).length;
    let lj = &iso.side(q.j).length;
    let samples = [(rat(1, 3), rat(1, 2)), (rat(1, 2), rat(1, 5)), (rat(2, 3), rat(3, 4)), (rat(1, 7), rat(5, 6))];
    for (f1, f2) in samples {
        let a1 = li * &f1;
        let a2 = lj * &f2;
        let s = Rational::one() / (&a1 + m_len + &a2);
        let alpha = &s * &a1;
        let beta = &s * &a2;
        let mut segs = vec![Segment {
            direction: iso.side(q.i).direction.clone(),
            length: alpha.clone(),
        }];
        for m in middle_sides(q.i, q.j, iso.len()) {
            segs.push(Segment {
                direction: iso.side(m).direction.clone(),
                length: &s * &iso.side(m).length,
            });
        }
        segs.push(Segment {
            direction: iso.side(q.j).direction.clone(),
            length: beta.clone(),
        });
        let path = PathShape::new(segs);
        let p = &path.endpoint;
        let expected = &(&iso.side(q.i).direction.scale(&alpha) + &w.scale(&s)) + &iso.side(q.j).direction.scale(&beta);
        let ok = path.total == Rational::one()
            && *p == expected
            && q.poly.eval(p) == path.balayage
            && q.alpha.eval(p) == alpha
            && q.beta.eval(p) == beta
            && q.scale.eval(p) == s
            && q.contains(p)
            && convex_contains(&q.vertices, p);
        if !ok {
            return Err(Error::AtlasInconsistency(format!(
                "quad ({}, {}) fails verification at side parameters ({f1}, {f2})",
                q.i, q.j
            )));
        }
    }
    Ok(())
}

/// Maximum of a quadratic over a convex polygon, exactly.
pub fn quadratic_max_on_convex(q: &Quadratic2, poly: &[Vec2]) -> Rational {
    let mut best: Option<Rational> = None;
    let mut consider = |v: Rational| {
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    };
    let n = poly.len();
    for k in 0..n {
        let a = &poly[k];
        let b = &poly[(k + 1) % n];
        let f0 = q.eval(a);
        let f1 = q.eval(b);
        let fh = q.eval(&(a + b).scale(&rat(1, 2)));
        // f(t) = c2 t² + c1 t + f0 along a → b
        let c2 = int(2) * (&f1 + &f0 - int(2) * &fh);
        let c1 = &f1 - &f0 - &c2;
        if c2.is_negative() {
            let t = -&c1 / (int(2) * &c2);
            if t.is_positive() && t < Rational::one() {
                consider(q.eval(&(a + &(b - a).scale(&t))));
            }
        }
        consider(f0);
    }
    let det = int(4) * &q.a1 * &q.a3 - &q.a2 * &q.a2;
    if !det.is_zero() {
        // 2a1 x + a2 y = −b1, a2 x + 2a3 y = −b2
        let x = (-&q.b1 * int(2) * &q.a3 + &q.a2 * &q.b2) / &det;
        let y = (-&q.b2 * int(2) * &q.a1 + &q.a2 * &q.b1) / &det;
        let c = Vec2::new(x, y);
        if convex_contains(poly, &c) {
            consider(q.eval(&c));
        }
    }
    best.unwrap_or_else(Rational::zero)
}

pub fn build_atlas(l: &ConvexPolygon) -> Result<PanelAtlas> {
    let iso = build_isoperimetrix(l);
    let n = l.len();
    let mut quads = Vec::with_capacity(n * (n - 2));
    for i in 0..n {
        for j in 0..n {
            if j == i || j == (i + 1) % n {
                continue;
            }
            quads.push(build_quad(&iso, i, j)?);
        }
    }
    let edges: Vec<SideEdge> = (0..n)
        .map(|k| {
            let (a, b) = l.edge(k);
            SideEdge {
                k,
                start: a.clone(),
                end: b.clone(),
                cross: a.cross(b),
            }
        })
        .collect();
    let slides = (0..n)
        .map(|k| {
            let lk = &iso.side(k).length;
            SlideSegment {
                k,
                direction: -l.vertex(k),
                length: lk / (Rational::one() - lk),
            }
        })
        .collect();
    let a_max = quads
        .iter()
        .map(|q| q.a_max.clone())
        .chain(edges.iter().map(|e| e.peak()))
        .max()
        .expect("atlas is nonempty");
    Ok(PanelAtlas {
        l: l.clone(),
        gauge: Gauge::new(l),
        iso,
        quads,
        edges,
        slides,
        a_max,
    })
}

fn show(p: &Vec2) -> String {
    format!("({}, {})", rat_to_string(&p.x), rat_to_string(&p.y))
}

impl PanelAtlas {
    pub fn vertex_count(&self) -> usize {
        self.l.len()
    }

    pub fn norm(&self, p: &Vec2) -> Rational {
        self.gauge.norm(p)
    }

    pub fn quad(&self, i: usize, j: usize) -> Option<&Quad> {
        self.quads.iter().find(|q| q.i == i && q.j == j)
    }

    /// Index of the first quad (in `(i, j)` order) containing `p`.
    pub fn locate(&self, p: &Vec2) -> Option<usize> {
        self.quads.iter().position(|q| q.contains(p))
    }

    fn require_in_q(&self, p: &Vec2) -> Result<()> {
        if self.norm(p) > Rational::one() {
            Err(Error::OutsideQ(show(p)))
        } else {
            Ok(())
        }
    }

    /// `A(p)` and the id of a quad containing `p`.
    pub fn balayage(&self, p: &Vec2) -> Result<(Rational, (usize, usize))> {
        self.require_in_q(p)?;
        let q = self
            .locate(p)
            .map(|k| &self.quads[k])
            .ok_or_else(|| Error::AtlasInconsistency(format!("no quad contains {}", show(p))))?;
        Ok((q.poly.eval(p), q.id()))
    }

    pub fn balayage_value(&self, p: &Vec2) -> Result<Rational> {
        self.balayage(p).map(|(v, _)| v)
    }

    /// Positively oriented trace path to `p`.
    pub fn trace_shape(&self, p: &Vec2) -> Result<PathShape> {
        self.require_in_q(p)?;
        let k = self
            .locate(p)
            .ok_or_else(|| Error::AtlasInconsistency(format!("no quad contains {}", show(p))))?;
        Ok(self.quads[k].trace(&self.iso, p))
    }

    /// Height of the radius-`n` sphere over `p`: `n²·A(p/n)`.
    pub fn height(&self, n: &Rational, p: &Vec2) -> Result<Rational> {
        if n.is_negative() || self.norm(p) > *n {
            return Err(Error::OutsideBall(show(p), rat_to_string(n)));
        }
        if n.is_zero() {
            return Ok(Rational::zero());
        }
        let q = &self.quads[self
            .locate(&p.scale(&(Rational::one() / n)))
            .ok_or_else(|| Error::AtlasInconsistency(format!("no quad contains {}", show(p))))?];
        Ok(q.poly.eval_homogeneous(&p.x, &p.y, n))
    }

    /// Index of a vertex of `L` equal to `p`.
    pub fn vertex_index(&self, p: &Vec2) -> Option<usize> {
        self.l.vertices().iter().position(|v| v == p)
    }

    /// Slide segment index `k` with `p = −r·v_k`, `0 ≤ r < ℓ_k/(1−ℓ_k)`.
    /// The origin lies on every segment; the first is reported.
    pub fn slide_index(&self, p: &Vec2) -> Option<usize> {
        self.slides.iter().position(|s| {
            let d = &s.direction;
            if !d.cross(p).is_zero() {
                return false;
            }
            let r = d.dot(p) / d.dot(d);
            !r.is_negative() && r < s.length
        })
    }

    /// Membership of a footprint point in the nonuniqueness locus: a slide
    /// segment, or the boundary of `Q` minus the vertices.
    pub fn in_nonuniqueness_locus(&self, p: &Vec2) -> Result<bool> {
        let g = self.norm(p);
        if g > Rational::one() {
            return Err(Error::OutsideQ(show(p)));
        }
        if g == Rational::one() {
            return Ok(self.vertex_index(p).is_none());
        }
        Ok(self.slide_index(p).is_some())
    }

    /// Edge of `L` whose closed cone contains direction `p ≠ 0`.
    pub fn edge_sector(&self, p: &Vec2) -> usize {
        self.edges
            .iter()
            .position(|e| !e.start.cross(p).is_negative() && !p.cross(&e.end).is_negative())
            .expect("edge cones cover the plane")
    }

    pub fn to_json(&self) -> Value {
        let v = |p: &Vec2| json!([rat_to_string(&p.x), rat_to_string(&p.y)]);
        let r = rat_to_string;
        json!({
            "L": self.l.vertices().iter().map(v).collect::<Vec<_>>(),
            "isoperimetrix": {
                "vertices": self.iso.polygon.vertices().iter().map(v).collect::<Vec<_>>(),
                "sides": self.iso.sides.iter().enumerate().map(|(k, s)| json!({
                    "index": k + 1,
                    "direction": v(&s.direction),
                    "length": r(&s.length),
                    "offset": r(&s.offset),
                })).collect::<Vec<_>>(),
            },
            "quads": self.quads.iter().map(|q| json!({
                "i": q.i + 1,
                "j": q.j + 1,
                "sides": q.sides,
                "vertices": q.vertices.iter().map(v).collect::<Vec<_>>(),
                "coefficients": q.poly.coefficients().iter().map(|c| r(c)).collect::<Vec<_>>(),
                "max": r(&q.a_max),
            })).collect::<Vec<_>>(),
            "slide_segments": self.slides.iter().map(|s| json!({
                "index": s.k + 1,
                "direction": v(&s.direction),
                "length": r(&s.length),
            })).collect::<Vec<_>>(),
            "A_max": r(&self.a_max),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::symmetric_hull;

    fn v(x: i64, y: i64) -> Vec2 {
        Vec2::from_ints(x, y)
    }

    fn vr(x: Rational, y: Rational) -> Vec2 {
        Vec2::new(x, y)
    }

    pub(crate) fn square() -> PanelAtlas {
        build_atlas(&symmetric_hull(&[v(1, 0), v(0, 1)], true).unwrap()).unwrap()
    }

    fn hexagon() -> PanelAtlas {
        build_atlas(&symmetric_hull(&[v(1, 0), v(0, 1), v(1, 1)], true).unwrap()).unwrap()
    }

    #[test]
    fn square_isoperimetrix() {
        let a = square();
        let q = rat(1, 8);
        let m = -q.clone();
        assert_eq!(
            a.iso.polygon.vertices(),
            &[vr(q.clone(), q.clone()), vr(m.clone(), q.clone()), vr(m.clone(), m.clone()), vr(q.clone(), m)]
        );
        for (k, s) in a.iso.sides.iter().enumerate() {
            assert_eq!(s.length, rat(1, 4));
            assert_eq!(&s.direction, a.l.vertex(k));
        }
        assert_eq!(a.iso.sides[2].offset, int(0));
        assert_eq!(a.iso.sides[1].offset, rat(3, 4));
    }

    #[test]
    fn hexagon_isoperimetrix_has_unit_perimeter() {
        let a = hexagon();
        assert_eq!(a.iso.len(), 6);
        let total: Rational = a.iso.sides.iter().map(|s| s.length.clone()).sum();
        assert_eq!(total, int(1));
    }

    #[test]
    fn quad_counts() {
        assert_eq!(square().quads.len(), 8);
        assert_eq!(hexagon().quads.len(), 24);
    }

    #[test]
    fn balayage_examples() {
        let a = square();
        assert_eq!(a.balayage_value(&v(0, 0)).unwrap(), rat(1, 16));
        assert_eq!(a.balayage_value(&v(1, 0)).unwrap(), int(0));
        assert_eq!(a.balayage_value(&vr(rat(1, 2), rat(1, 2))).unwrap(), rat(1, 8));
        assert!(matches!(a.balayage(&v(1, 1)), Err(Error::OutsideQ(_))));
        assert_eq!(a.a_max, rat(1, 8));
    }

    #[test]
    fn trace_shapes() {
        let a = square();
        let half = rat(1, 2);
        let s = a.trace_shape(&vr(half.clone(), half.clone())).unwrap();
        let dirs: Vec<Vec2> = s.segments.iter().map(|s| s.direction.clone()).collect();
        assert_eq!(dirs, vec![v(1, 0), v(0, 1)]);
        assert_eq!(s.balayage, rat(1, 8));

        let s = a.trace_shape(&v(0, 0)).unwrap();
        assert_eq!(s.segments.len(), 4);
        assert!(s.segments.iter().all(|g| g.length == rat(1, 4)));
        assert_eq!(s.balayage, rat(1, 16));

        let s = a.trace_shape(&vr(rat(2, 3), int(0))).unwrap();
        let dirs: Vec<Vec2> = s.segments.iter().map(|s| s.direction.clone()).collect();
        assert_eq!(dirs, vec![v(0, -1), v(1, 0), v(0, 1)]);
        assert_eq!(s.total, int(1));
        assert_eq!(s.balayage, a.balayage_value(&vr(rat(2, 3), int(0))).unwrap());
    }

    #[test]
    fn heights() {
        let a = square();
        assert_eq!(a.height(&int(4), &v(0, 0)).unwrap(), int(1));
        assert_eq!(a.height(&int(1), &v(1, 0)).unwrap(), int(0));
        let expected = int(256) * a.balayage_value(&vr(rat(1, 4), rat(1, 4))).unwrap();
        assert_eq!(a.height(&int(16), &v(4, 4)).unwrap(), expected);
        assert_eq!(a.height(&int(4), &v(2, 2)).unwrap(), int(2));
        assert!(a.height(&int(1), &v(2, 0)).is_err());
    }

    #[test]
    fn nonuniqueness_locus() {
        let a = square();
        assert!(a.in_nonuniqueness_locus(&vr(rat(-1, 4), int(0))).unwrap());
        assert!(!a.in_nonuniqueness_locus(&v(1, 0)).unwrap());
        assert!(a.in_nonuniqueness_locus(&vr(rat(1, 2), rat(1, 2))).unwrap());
        assert!(a.in_nonuniqueness_locus(&v(0, 0)).unwrap());
        assert!(!a.in_nonuniqueness_locus(&vr(rat(-1, 3), int(0))).unwrap());
        assert_eq!(a.slides[0].length, rat(1, 3));
    }

    #[test]
    fn quads_vanish_only_at_vertices() {
        for a in [square(), hexagon()] {
            for vert in a.l.vertices() {
                assert_eq!(a.balayage_value(vert).unwrap(), int(0));
            }
            for q in &a.quads {
                let c = q.vertices.iter().fold(Vec2::zero(), |s, p| &s + p).scale(&rat(1, 4));
                assert!(q.poly.eval(&c).is_positive());
            }
        }
    }
}
