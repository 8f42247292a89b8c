//! Exact Carnot-Carathéodory distance from the origin, ball membership and
//! geodesic classification for rational points of the Heisenberg group.

use std::cmp::Ordering;
use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::atlas::{PanelAtlas, PathShape, Segment};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::numbers::{int, rat_to_string, solve_quadratic_positive, AlgebraicScalar, Rational};
use crate::serde_rational;

/// A point `(x, y, z)` in exponential coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CCPoint {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y: Rational,
    #[serde(with = "serde_rational")]
    pub z: Rational,
}

impl CCPoint {
    pub fn new(x: Rational, y: Rational, z: Rational) -> Self {
        CCPoint { x, y, z }
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        CCPoint::new(int(x), int(y), int(z))
    }

    /// Point with doubled height `w = 2z`.
    pub fn from_doubled(x: i64, y: i64, w: i64) -> Self {
        CCPoint::new(int(x), int(y), Rational::new(w.into(), 2.into()))
    }

    pub fn planar(&self) -> Vec2 {
        Vec2::new(self.x.clone(), self.y.clone())
    }

    pub fn is_origin(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    /// `δ_t(x, y, z) = (tx, ty, t²z)`.
    pub fn dilate(&self, t: &Rational) -> CCPoint {
        CCPoint::new(&self.x * t, &self.y * t, &self.z * t * t)
    }

    pub fn neg(&self) -> CCPoint {
        CCPoint::new(-self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    pub fn reflect_z(&self) -> CCPoint {
        CCPoint::new(self.x.clone(), self.y.clone(), -self.z.clone())
    }
}

impl fmt::Display for CCPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", rat_to_string(&self.x), rat_to_string(&self.y), rat_to_string(&self.z))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallRelation {
    Inside,
    OnSphere,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeodesicKind {
    UniqueTrace,
    TraceSegmentFamily,
    BeelineFamily,
    VertexRay,
}

impl fmt::Display for GeodesicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct GeodesicFamily {
    pub kind: GeodesicKind,
    /// Unit-length path whose lift, dilated by `scale`, ends at the query.
    pub representative: PathShape,
    pub scale: AlgebraicScalar,
    /// For beeline families: the range of enclosed areas over the family,
    /// on the unit sphere.
    pub area_range: Option<(Rational, Rational)>,
    /// Panel of the representative, for trace families.
    pub quad: Option<(usize, usize)>,
}

/// Endpoint of the admissible lift of `shape` dilated by `t`.
pub fn lift_endpoint(shape: &PathShape, t: &Rational) -> CCPoint {
    CCPoint::new(
        &shape.endpoint.x * t,
        &shape.endpoint.y * t,
        &shape.balayage * t * t,
    )
}

/// `sign(c0·t + rest)` for an algebraic `t`.
fn sign_affine(rest: Rational, c0: &Rational, t: &AlgebraicScalar) -> Ordering {
    t.mul_rational(c0).add_rational(&rest).signum()
}

/// Exact CC distance from the origin.
pub fn cc_distance(atlas: &PanelAtlas, p: &CCPoint) -> Result<AlgebraicScalar> {
    if p.is_origin() {
        return Ok(AlgebraicScalar::zero());
    }
    let q = p.planar();
    let z = p.z.abs();
    let g = atlas.norm(&q);
    let mut found: Vec<AlgebraicScalar> = Vec::new();

    if g.is_positive() && z <= atlas.height(&g, &q)? {
        found.push(AlgebraicScalar::from_rational(g.clone()));
    }
    let q2 = |poly: &crate::geometry::Quadratic2| {
        &poly.a1 * &q.x * &q.x + &poly.a2 * &q.x * &q.y + &poly.a3 * &q.y * &q.y
    };
    for quad in &atlas.quads {
        let poly = &quad.poly;
        let lin = &poly.b1 * &q.x + &poly.b2 * &q.y;
        for t in solve_quadratic_positive(&poly.c, &lin, &(q2(poly) - &z)) {
            let inside = quad.bounds.iter().all(|f| {
                sign_affine(&f.cx * &q.x + &f.cy * &q.y, &f.c0, &t) != Ordering::Less
            });
            if inside {
                found.push(t);
            }
        }
    }
    let first = found
        .first()
        .cloned()
        .ok_or_else(|| Error::ConsistencyError(format!("no sphere point found for {p}")))?;
    if let Some(other) = found.iter().find(|t| **t != first) {
        return Err(Error::ConsistencyError(format!(
            "distinct distances {first} and {other} for {p}"
        )));
    }
    Ok(first)
}

/// Compares `d_CC(p)` with `r` using only rational height tests.
pub fn ball_compare(atlas: &PanelAtlas, p: &CCPoint, r: &Rational) -> BallRelation {
    if r.is_zero() {
        return if p.is_origin() {
            BallRelation::OnSphere
        } else {
            BallRelation::Outside
        };
    }
    let q = p.planar();
    let g = atlas.norm(&q);
    if g > *r {
        return BallRelation::Outside;
    }
    let h = atlas.height(r, &q).expect("footprint is inside the ball");
    let z = p.z.abs();
    match (z.cmp(&h), g == *r) {
        (Ordering::Greater, _) => BallRelation::Outside,
        (_, true) | (Ordering::Equal, false) => BallRelation::OnSphere,
        (Ordering::Less, false) => BallRelation::Inside,
    }
}

/// Vertex index `k` with `q` a positive multiple of `v_k`.
fn vertex_ray(atlas: &PanelAtlas, q: &Vec2) -> Option<usize> {
    atlas
        .l
        .vertices()
        .iter()
        .position(|v| v.cross(q).is_zero() && v.dot(q).is_positive())
}

/// Slide segment `k` whose open-ended segment contains the footprint of `p`,
/// decided by a single ball comparison.
fn slide_family(atlas: &PanelAtlas, p: &CCPoint) -> Option<usize> {
    let q = p.planar();
    for s in &atlas.slides {
        let d = &s.direction;
        if !d.cross(&q).is_zero() || !d.dot(&q).is_positive() {
            continue;
        }
        // foot = q/dist lies on the segment iff dist > r·(1 − ℓ)/ℓ
        let r = d.dot(&q) / d.dot(d);
        let lk = &atlas.iso.side(s.k).length;
        let threshold = r * (Rational::one() - lk) / lk;
        if ball_compare(atlas, p, &threshold) == BallRelation::Outside {
            return Some(s.k);
        }
    }
    None
}

fn classify(atlas: &PanelAtlas, p: &CCPoint) -> GeodesicKind {
    let q = p.planar();
    if q.is_zero() {
        return GeodesicKind::TraceSegmentFamily;
    }
    let g = atlas.norm(&q);
    if ball_compare(atlas, p, &g) == BallRelation::OnSphere {
        if vertex_ray(atlas, &q).is_some() {
            GeodesicKind::VertexRay
        } else {
            GeodesicKind::BeelineFamily
        }
    } else if slide_family(atlas, p).is_some() {
        GeodesicKind::TraceSegmentFamily
    } else {
        GeodesicKind::UniqueTrace
    }
}

/// Uniqueness of the geodesic from the origin to `p ≠ 0`.
pub fn is_cc_unique(atlas: &PanelAtlas, p: &CCPoint) -> bool {
    matches!(
        classify(atlas, p),
        GeodesicKind::UniqueTrace | GeodesicKind::VertexRay
    )
}

/// Bits of precision for representatives at irrational distances.
const APPROX_BITS: u32 = 96;

/// Geodesic family and a representative unit-length path for `p ≠ 0`.
pub fn geodesics(atlas: &PanelAtlas, p: &CCPoint) -> Result<GeodesicFamily> {
    if p.is_origin() {
        return Err(Error::OutOfRange("the origin has no geodesic family".into()));
    }
    let kind = classify(atlas, p);
    let d = cc_distance(atlas, p)?;
    let q = p.planar();
    let flip = p.z.is_negative();
    match kind {
        GeodesicKind::VertexRay => {
            let k = vertex_ray(atlas, &q).expect("classified as vertex ray");
            let representative = PathShape::new(vec![Segment {
                direction: atlas.l.vertex(k).clone(),
                length: Rational::one(),
            }]);
            Ok(GeodesicFamily {
                kind,
                representative,
                scale: d,
                area_range: None,
                quad: None,
            })
        }
        GeodesicKind::BeelineFamily => {
            let g = atlas.norm(&q);
            let foot = q.scale(&(Rational::one() / &g));
            let k = atlas.edge_sector(&foot);
            let edge = &atlas.edges[k];
            let a = edge.parameter(&foot);
            let peak = edge.balayage_at(&a);
            let area = &p.z / (&g * &g);
            // s·v_k, a·v_{k+1}, (1 − a − s)·v_k sweeps a·c·(s − (1 − a)/2)
            let one_minus_a = Rational::one() - &a;
            let s = &area / (&a * &edge.cross) + &one_minus_a / int(2);
            let representative = PathShape::new(vec![
                Segment {
                    direction: edge.start.clone(),
                    length: s.clone(),
                },
                Segment {
                    direction: edge.end.clone(),
                    length: a.clone(),
                },
                Segment {
                    direction: edge.start.clone(),
                    length: one_minus_a - s,
                },
            ]);
            Ok(GeodesicFamily {
                kind,
                representative,
                scale: d,
                area_range: Some((-peak.clone(), peak)),
                quad: None,
            })
        }
        GeodesicKind::UniqueTrace | GeodesicKind::TraceSegmentFamily => {
            let g = atlas.norm(&q);
            let approx = match d.to_rational() {
                Some(r) => r,
                None => d.approximate(APPROX_BITS).max(g),
            };
            let foot = q.scale(&(Rational::one() / &approx));
            let k = atlas
                .locate(&foot)
                .ok_or_else(|| Error::ConsistencyError(format!("footprint of {p} is not in any panel")))?;
            let quad = &atlas.quads[k];
            let shape = quad.trace(&atlas.iso, &foot);
            let representative = if flip { shape.reversed_order() } else { shape };
            Ok(GeodesicFamily {
                kind,
                representative,
                scale: d,
                area_range: None,
                quad: Some(quad.id()),
            })
        }
    }
}
