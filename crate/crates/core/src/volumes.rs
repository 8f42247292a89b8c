//! Exact volumes of dilation cones over parts of the unit sphere.
//!
//! Over a panel `Q_ij` the sphere is the graph of the quadratic `A`, and the
//! cone `{δ_s(x, y, A(x, y)) : 0 ≤ s ≤ 1}` has Jacobian
//! `s³·(2A − x·A_x − y·A_y)`. Integrating out `s` leaves
//! `¼·∫∫ (b₁x + b₂y + 2c)`. Over edge `k` of `L` the sphere is vertical and
//! its cone is `{(p, z) : |z| ≤ g(p)²·A(p/g(p))}` over the triangle
//! `(0, v_k, v_{k+1})`, where the integrand `2·g²·A(p/g) = c·b₁·b₂` is
//! quadratic in the barycentric coordinates `b₁, b₂` of `p`.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::atlas::{PanelAtlas, Quad, SideEdge};
use crate::error::{Error, Result};
use crate::geometry::{clip_convex, integrate_quadratic_over_polygon, Quadratic2, Vec2};
use crate::numbers::{int, rat, rat_to_string, Rational};

/// Which parts of the sphere a sector volume includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignSelection {
    /// Panels with `z > 0`.
    pub plus: bool,
    /// Panels with `z < 0`.
    pub minus: bool,
    /// Side panels over the edges of `L`.
    pub side: bool,
}

impl SignSelection {
    pub const ALL: SignSelection = SignSelection {
        plus: true,
        minus: true,
        side: true,
    };
    pub const BOTH: SignSelection = SignSelection {
        plus: true,
        minus: true,
        side: false,
    };
    pub const SIDE: SignSelection = SignSelection {
        plus: false,
        minus: false,
        side: true,
    };

    fn panel_multiplicity(self) -> i64 {
        self.plus as i64 + self.minus as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeReport {
    pub total: Rational,
    pub regular: Rational,
    pub unstable: Rational,
    /// One sign only; both signs contribute equally.
    pub per_quad: BTreeMap<(usize, usize), Rational>,
    pub per_side: BTreeMap<usize, Rational>,
}

impl VolumeReport {
    /// Share of the ball reached by unique geodesics.
    pub fn unique_fraction(&self) -> Rational {
        &self.regular / &self.total
    }

    /// Both-sign volume of panels whose trace paths use `sides` directions.
    pub fn by_combinatorics(&self, atlas: &PanelAtlas, sides: usize) -> Rational {
        let one_sign: Rational = atlas
            .quads
            .iter()
            .filter(|q| q.sides == sides)
            .map(|q| self.per_quad[&q.id()].clone())
            .sum();
        one_sign * int(2)
    }

    pub fn to_json(&self) -> Value {
        let r = rat_to_string;
        json!({
            "V": r(&self.total),
            "V_reg": r(&self.regular),
            "V_uns": r(&self.unstable),
            "unique_fraction": r(&self.unique_fraction()),
            "per_quad": self.per_quad.iter().map(|((i, j), v)| json!({
                "i": i + 1, "j": j + 1, "volume": r(v),
            })).collect::<Vec<_>>(),
            "per_side": self.per_side.iter().map(|(k, v)| json!({
                "k": k + 1, "volume": r(v),
            })).collect::<Vec<_>>(),
        })
    }
}

/// `¼(b₁x + b₂y + 2c)`, the cone integrand over a panel.
fn panel_integrand(q: &Quad) -> Quadratic2 {
    Quadratic2 {
        b1: &q.poly.b1 / int(4),
        b2: &q.poly.b2 / int(4),
        c: &q.poly.c / int(2),
        ..Quadratic2::zero()
    }
}

/// `c·b₁·b₂`, the cone integrand over the sector of a side panel.
fn side_integrand(e: &SideEdge) -> Quadratic2 {
    let (b1, b2) = e.barycentric_forms();
    b1.times(&b2).scale(&e.cross)
}

/// Volume of the cone over the `z > 0` panel of quad `(i, j)`.
pub fn panel_cone_volume(atlas: &PanelAtlas, i: usize, j: usize) -> Result<Rational> {
    let q = atlas
        .quad(i, j)
        .ok_or_else(|| Error::OutOfRange(format!("({}, {}) is not a nondegenerate quad", i + 1, j + 1)))?;
    Ok(integrate_quadratic_over_polygon(&panel_integrand(q), &q.vertices))
}

/// Volume of the cone over side panel `k`.
pub fn side_panel_cone_volume(atlas: &PanelAtlas, k: usize) -> Result<Rational> {
    let e = atlas
        .edges
        .get(k)
        .ok_or_else(|| Error::OutOfRange(format!("side {} does not exist", k + 1)))?;
    let tri = [Vec2::zero(), e.start.clone(), e.end.clone()];
    Ok(integrate_quadratic_over_polygon(&side_integrand(e), &tri))
}

pub fn ball_volumes(atlas: &PanelAtlas) -> VolumeReport {
    let per_quad: BTreeMap<(usize, usize), Rational> = atlas
        .quads
        .iter()
        .map(|q| (q.id(), integrate_quadratic_over_polygon(&panel_integrand(q), &q.vertices)))
        .collect();
    let per_side: BTreeMap<usize, Rational> = (0..atlas.edges.len())
        .map(|k| (k, side_panel_cone_volume(atlas, k).expect("edge exists")))
        .collect();
    let regular: Rational = per_quad.values().sum::<Rational>() * int(2);
    let unstable: Rational = per_side.values().sum();
    VolumeReport {
        total: &regular + &unstable,
        regular,
        unstable,
        per_quad,
        per_side,
    }
}

/// Part of segment `[a, b]` inside a counterclockwise convex polygon.
fn clip_segment(a: &Vec2, b: &Vec2, poly: &[Vec2]) -> Option<(Vec2, Vec2)> {
    let (mut t0, mut t1) = (Rational::zero(), Rational::one());
    let d = b - a;
    let n = poly.len();
    for k in 0..n {
        let p = &poly[k];
        let e = &poly[(k + 1) % n] - p;
        // inside iff e × (a + t·d − p) ≥ 0
        let f0 = e.cross(&(a - p));
        let f1 = e.cross(&d);
        if f1.is_zero() {
            if f0.is_negative() {
                return None;
            }
        } else {
            let t = -&f0 / &f1;
            if f1.is_positive() {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    if t0 >= t1 {
        return None;
    }
    Some((a + &d.scale(&t0), a + &d.scale(&t1)))
}

/// Volume of the cone over the part of the sphere whose footprint lies in
/// `region`, a convex polygon inside `Q` (vertices counterclockwise).
///
/// Additive over regions that meet only along boundaries.
pub fn sector_cone_volume(atlas: &PanelAtlas, region: &[Vec2], signs: SignSelection) -> Result<Rational> {
    if region.len() < 3 {
        return Ok(Rational::zero());
    }
    if region.iter().any(|p| atlas.norm(p) > Rational::one()) {
        return Err(Error::RegionOutsideQ);
    }
    let mut total = Rational::zero();
    let mult = signs.panel_multiplicity();
    if mult > 0 {
        for q in &atlas.quads {
            let piece = clip_convex(&q.vertices, region);
            if piece.len() >= 3 {
                total += integrate_quadratic_over_polygon(&panel_integrand(q), &piece) * int(mult);
            }
        }
    }
    if signs.side {
        for e in &atlas.edges {
            if let Some((a, b)) = clip_segment(&e.start, &e.end, region) {
                let tri = [Vec2::zero(), a, b];
                total += integrate_quadratic_over_polygon(&side_integrand(e), &tri);
            }
        }
    }
    Ok(total)
}

/// `Q ∩ cone(from, to)`: the footprint sector swept counterclockwise from
/// direction `from` to direction `to` (angle below π).
pub fn sector_region(atlas: &PanelAtlas, from: &Vec2, to: &Vec2) -> Vec<Vec2> {
    let far = |d: &Vec2| d.scale(&(int(4) / atlas.norm(d)));
    let wedge = [Vec2::zero(), far(from), far(to)];
    let mut out = clip_convex(atlas.l.vertices(), &wedge);
    // canonical CCW order for the clip result
    if crate::geometry::shoelace_area(&out).is_negative() {
        out.reverse();
    }
    out
}

/// Ray directions of the symmetric sector partition: every vertex of `L`
/// and every edge midpoint, counterclockwise from vertex 0.
pub fn symmetric_partition_rays(atlas: &PanelAtlas) -> Vec<Vec2> {
    let mut rays = Vec::new();
    for e in &atlas.edges {
        rays.push(e.start.clone());
        rays.push((&e.start + &e.end).scale(&rat(1, 2)));
    }
    rays
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::build_atlas;
    use crate::geometry::symmetric_hull;

    fn square() -> PanelAtlas {
        build_atlas(&symmetric_hull(&[Vec2::from_ints(1, 0), Vec2::from_ints(0, 1)], true).unwrap()).unwrap()
    }

    fn hexagon() -> PanelAtlas {
        let pts = [Vec2::from_ints(1, 0), Vec2::from_ints(0, 1), Vec2::from_ints(1, 1)];
        build_atlas(&symmetric_hull(&pts, true).unwrap()).unwrap()
    }

    #[test]
    fn square_volumes() {
        let a = square();
        let r = ball_volumes(&a);
        assert_eq!(r.total, rat(31, 72));
        assert_eq!(r.regular, rat(19, 72));
        assert_eq!(r.unstable, rat(1, 6));
        assert_eq!(r.unique_fraction(), rat(19, 31));
        assert_eq!(r.by_combinatorics(&a, 4), rat(13, 216));
        assert_eq!(r.by_combinatorics(&a, 3), rat(11, 54));
        for k in 0..4 {
            assert_eq!(side_panel_cone_volume(&a, k).unwrap(), rat(1, 24));
        }
    }

    #[test]
    fn entries_positive_and_symmetric() {
        for a in [square(), hexagon()] {
            let r = ball_volumes(&a);
            let n = a.vertex_count();
            for ((i, j), v) in &r.per_quad {
                assert!(v.is_positive());
                assert_eq!(v, &r.per_quad[&((i + n / 2) % n, (j + n / 2) % n)]);
            }
            assert!(r.per_side.values().all(|v| v.is_positive()));
            assert_eq!(r.total, &r.regular + &r.unstable);
        }
    }

    #[test]
    fn sector_volumes() {
        let a = square();
        let q = a.l.vertices().to_vec();
        assert_eq!(sector_cone_volume(&a, &q, SignSelection::ALL).unwrap(), rat(31, 72));
        let quarter = [Vec2::zero(), Vec2::from_ints(1, 0), Vec2::from_ints(0, 1)];
        assert_eq!(sector_cone_volume(&a, &quarter, SignSelection::ALL).unwrap(), rat(31, 288));
        assert_eq!(sector_cone_volume(&a, &[], SignSelection::ALL).unwrap(), int(0));
        let big = [Vec2::zero(), Vec2::from_ints(2, 0), Vec2::from_ints(0, 2)];
        assert!(matches!(sector_cone_volume(&a, &big, SignSelection::ALL), Err(Error::RegionOutsideQ)));
    }

    #[test]
    fn partition_is_additive() {
        for a in [square(), hexagon()] {
            let rays = symmetric_partition_rays(&a);
            let total: Rational = (0..rays.len())
                .map(|k| {
                    let region = sector_region(&a, &rays[k], &rays[(k + 1) % rays.len()]);
                    sector_cone_volume(&a, &region, SignSelection::ALL).unwrap()
                })
                .sum();
            assert_eq!(total, ball_volumes(&a).total);
        }
    }

    #[test]
    fn dilation_scales_by_fourth_power() {
        let a = square();
        let t = rat(3, 2);
        let scaled = build_atlas(&a.l.scaled(&t)).unwrap();
        let t4 = &t * &t * &t * &t;
        assert_eq!(ball_volumes(&scaled).total, ball_volumes(&a).total * t4);
    }
}
