//! Lattice point counts in CC balls, annuli and word spheres, computed one
//! `(x, y)` column at a time.
//!
//! Over a column, the radius-`R` ball is the height window `|z| ≤ H_R(x, y)`
//! and lattice heights are `w/2` with `w ≡ x·y (mod 2)`. The atlas is
//! rescaled to integer coefficients once, so every column costs a handful of
//! `i128` operations.

use num::{Integer, One, Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::atlas::PanelAtlas;
use crate::error::{Error, Result};
use crate::geometry::{Affine, Vec2};
use crate::lattice::{parity_check, WordBall};
use crate::numbers::{int, rat_to_f64, rat_to_string, Rational};
use crate::par::Execution;
use crate::volumes::{ball_volumes, sector_cone_volume, sector_region, symmetric_partition_rays, SignSelection};

/// Footprint region for counts: everything, or the half-open planar cone
/// swept counterclockwise from `from` (included) to `to` (excluded).
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Region {
    Full,
    Sector { from: Vec2, to: Vec2 },
}

impl Region {
    /// Membership of an integer column. The origin column belongs to the
    /// sector containing direction `(1, 0)`.
    pub fn contains(&self, x: i64, y: i64) -> bool {
        IntRegion::new(self).contains(x as i128, y as i128)
    }

    /// Exact cone volume over this region, with the given parts of the sphere.
    pub fn cone_volume(&self, atlas: &PanelAtlas, signs: SignSelection) -> Result<Rational> {
        match self {
            Region::Full => sector_cone_volume(atlas, atlas.l.vertices(), signs),
            Region::Sector { from, to } => sector_cone_volume(atlas, &sector_region(atlas, from, to), signs),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Region::Full => "full".into(),
            Region::Sector { from, to } => format!(
                "sector [({}, {}), ({}, {}))",
                rat_to_string(&from.x),
                rat_to_string(&from.y),
                rat_to_string(&to.x),
                rat_to_string(&to.y)
            ),
        }
    }
}

/// [`Region`] with integer ray directions.
#[derive(Clone, Copy, Debug)]
enum IntRegion {
    Full,
    Sector { from: (i128, i128), to: (i128, i128) },
}

impl IntRegion {
    fn new(r: &Region) -> Self {
        match r {
            Region::Full => IntRegion::Full,
            Region::Sector { from, to } => IntRegion::Sector {
                from: pair(from),
                to: pair(to),
            },
        }
    }

    fn contains(&self, x: i128, y: i128) -> bool {
        let IntRegion::Sector { from, to } = *self else { return true };
        let (x, y) = if x == 0 && y == 0 { (1, 0) } else { (x, y) };
        let c_from = from.0 * y - from.1 * x;
        let c_to = to.0 * y - to.1 * x;
        // the ray opposite to `from` has zero cross product too
        c_from >= 0 && c_to < 0 && !(c_from == 0 && from.0 * x + from.1 * y < 0)
    }
}

/// The symmetric sector partition: rays through every vertex of `L` and every
/// edge midpoint (8 sectors for the square).
pub fn symmetric_partition(atlas: &PanelAtlas) -> Vec<Region> {
    let rays = symmetric_partition_rays(atlas);
    (0..rays.len())
        .map(|k| Region::Sector {
            from: rays[k].clone(),
            to: rays[(k + 1) % rays.len()].clone(),
        })
        .collect()
}

/// `(numerators, common denominator)` of a list of rationals.
fn common_scale(values: &[&Rational]) -> (Vec<i128>, i128) {
    let mut den = num::BigInt::one();
    for v in values {
        den = den.lcm(v.denom());
    }
    let nums = values
        .iter()
        .map(|v| {
            (v.numer() * (&den / v.denom()))
                .to_i128()
                .expect("atlas coefficient fits in i128")
        })
        .collect();
    (nums, den.to_i128().expect("denominator fits in i128"))
}

/// `fx·x + fy·y + f0·t`, scaled to integers (sign-preserving).
#[derive(Clone, Copy, Debug)]
struct IntForm {
    fx: i128,
    fy: i128,
    f0: i128,
}

impl IntForm {
    fn from_affine(a: &Affine) -> Self {
        let (n, _) = common_scale(&[&a.cx, &a.cy, &a.c0]);
        IntForm {
            fx: n[0],
            fy: n[1],
            f0: n[2],
        }
    }

    fn eval(&self, x: i128, y: i128, t: i128) -> i128 {
        self.fx * x + self.fy * y + self.f0 * t
    }
}

#[derive(Clone, Debug)]
struct IntQuad {
    bounds: [IntForm; 4],
    /// `a1, a2, a3, b1, b2, c` over `den`.
    coef: [i128; 6],
    den: i128,
}

#[derive(Clone, Debug)]
struct IntEdge {
    /// Direction cone `cross(start, q) ≥ 0`, `cross(q, end) ≥ 0`.
    start: (i128, i128),
    end: (i128, i128),
    /// Barycentric forms over their denominators, and `cross` over its own.
    b1: (i128, i128, i128),
    b2: (i128, i128, i128),
    cross: (i128, i128),
}

/// Integer-rescaled atlas for fast column queries at integer radii.
#[derive(Clone, Debug)]
pub struct ColumnCounter {
    quads: Vec<IntQuad>,
    /// Dual vertices `(nx, ny, den)`: the gauge is `max (nx·x + ny·y)/den`.
    duals: Vec<(i128, i128, i128)>,
    edges: Vec<IntEdge>,
    /// `|x| ≤ span.0·R`, `|y| ≤ span.1·R` on the radius-`R` ball.
    span: (Rational, Rational),
}

fn pair(v: &Vec2) -> (i128, i128) {
    let (n, _) = common_scale(&[&v.x, &v.y]);
    (n[0], n[1])
}

impl ColumnCounter {
    pub fn new(atlas: &PanelAtlas) -> Self {
        let quads = atlas
            .quads
            .iter()
            .map(|q| {
                let (coef, den) = common_scale(&q.poly.coefficients());
                IntQuad {
                    bounds: [
                        IntForm::from_affine(&q.bounds[0]),
                        IntForm::from_affine(&q.bounds[1]),
                        IntForm::from_affine(&q.bounds[2]),
                        IntForm::from_affine(&q.bounds[3]),
                    ],
                    coef: [coef[0], coef[1], coef[2], coef[3], coef[4], coef[5]],
                    den,
                }
            })
            .collect();
        let duals = atlas
            .gauge
            .duals()
            .iter()
            .map(|a| {
                let (n, d) = common_scale(&[&a.x, &a.y]);
                (n[0], n[1], d)
            })
            .collect();
        let edges = atlas
            .edges
            .iter()
            .map(|e| {
                let (f1, f2) = e.barycentric_forms();
                let (n1, d1) = common_scale(&[&f1.cx, &f1.cy]);
                let (n2, d2) = common_scale(&[&f2.cx, &f2.cy]);
                let (c, dc) = common_scale(&[&e.cross]);
                IntEdge {
                    start: pair(&e.start),
                    end: pair(&e.end),
                    b1: (n1[0], n1[1], d1),
                    b2: (n2[0], n2[1], d2),
                    cross: (c[0], dc),
                }
            })
            .collect();
        let span_x = atlas.l.vertices().iter().map(|v| v.x.abs()).max().expect("nonempty");
        let span_y = atlas.l.vertices().iter().map(|v| v.y.abs()).max().expect("nonempty");
        ColumnCounter {
            quads,
            duals,
            edges,
            span: (span_x, span_y),
        }
    }

    /// Whether the gauge of `(x, y)` is at most `r`, and whether it equals `r`.
    fn gauge_vs(&self, x: i128, y: i128, r: i128) -> Option<bool> {
        let mut equal = false;
        for &(nx, ny, d) in &self.duals {
            let v = nx * x + ny * y;
            if v > r * d {
                return None;
            }
            equal |= v == r * d;
        }
        Some(equal)
    }

    /// `⌊2·H_r(x, y)⌋`, or `None` when the column misses the radius-`r` ball.
    pub fn window(&self, x: i64, y: i64, r: i64) -> Option<i128> {
        let (x, y, r) = (x as i128, y as i128, r as i128);
        self.gauge_vs(x, y, r)?;
        if r == 0 {
            return Some(0);
        }
        let q = self
            .quads
            .iter()
            .find(|q| q.bounds.iter().all(|f| f.eval(x, y, r) >= 0))
            .expect("quads cover the ball");
        let c = &q.coef;
        let k = c[0] * x * x + c[1] * x * y + c[2] * y * y + (c[3] * x + c[4] * y) * r + c[5] * r * r;
        Some((2 * k).div_euclid(q.den))
    }

    /// `⌊2·H_g(x, y)⌋` at `g` the gauge of `(x, y)`: the height of the side
    /// panel part of the column.
    pub fn side_window(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        if x == 0 && y == 0 {
            return 0;
        }
        let e = self
            .edges
            .iter()
            .find(|e| e.start.0 * y - e.start.1 * x >= 0 && x * e.end.1 - y * e.end.0 >= 0)
            .expect("edge cones cover the plane");
        let b1 = e.b1.0 * x + e.b1.1 * y;
        let b2 = e.b2.0 * x + e.b2.1 * y;
        (b1 * b2 * e.cross.0).div_euclid(e.b1.2 * e.b2.2 * e.cross.1)
    }

    fn x_range(&self, r: i64) -> std::ops::Range<i64> {
        let m = (&self.span.0 * int(r)).floor().to_integer().to_i64().expect("fits");
        -m..m + 1
    }

    fn y_bound(&self, r: i64) -> i64 {
        (&self.span.1 * int(r)).floor().to_integer().to_i64().expect("fits")
    }
}

/// `#{w ≡ parity (mod 2) : |w| ≤ T}` given `m = ⌊T⌋ ≥ 0`.
fn parity_count(m: i128, parity: i64) -> u64 {
    let c = if parity.rem_euclid(2) == 0 {
        2 * m.div_euclid(2) + 1
    } else {
        2 * (m + 1).div_euclid(2)
    };
    c as u64
}

/// Lattice counts split by the part of the sphere the points project to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CategoryCounts {
    pub plus: u64,
    pub minus: u64,
    pub side: u64,
}

impl CategoryCounts {
    pub fn total(&self) -> u64 {
        self.plus + self.minus + self.side
    }

    pub fn select(&self, s: SignSelection) -> u64 {
        s.plus as u64 * self.plus + s.minus as u64 * self.minus + s.side as u64 * self.side
    }

    fn add(self, o: CategoryCounts) -> CategoryCounts {
        CategoryCounts {
            plus: self.plus + o.plus,
            minus: self.minus + o.minus,
            side: self.side + o.side,
        }
    }

    fn sub(self, o: CategoryCounts) -> CategoryCounts {
        CategoryCounts {
            plus: self.plus - o.plus,
            minus: self.minus - o.minus,
            side: self.side - o.side,
        }
    }
}

/// Which columns enter a count.
#[derive(Clone, Copy, Debug)]
enum ColumnParity {
    Any,
    /// Only columns with `x + y ≡ n (mod 2)`.
    Matching(i64),
}

impl ColumnCounter {
    /// Lattice points with `d_CC ≤ r` over the region, by category.
    fn ball_categories(&self, r: i64, region: &Region, cols: ColumnParity, exec: Execution) -> CategoryCounts {
        if r < 0 {
            return CategoryCounts::default();
        }
        let yb = self.y_bound(r);
        let region = IntRegion::new(region);
        let per_x: Vec<CategoryCounts> = exec.map_range(self.x_range(r), |x| {
            let mut acc = CategoryCounts::default();
            for y in -yb..=yb {
                if let ColumnParity::Matching(n) = cols {
                    if !parity_check(crate::lattice::HeisPoint::new(x, y, 0), n) {
                        continue;
                    }
                }
                if !region.contains(x as i128, y as i128) {
                    continue;
                }
                let Some(top) = self.window(x, y, r) else { continue };
                let parity = (x * y).rem_euclid(2);
                let all = parity_count(top, parity);
                let side = parity_count(self.side_window(x, y).min(top), parity);
                let half = (all - side) / 2;
                acc = acc.add(CategoryCounts {
                    plus: half,
                    minus: half,
                    side,
                });
            }
            acc
        });
        per_x.into_iter().fold(CategoryCounts::default(), CategoryCounts::add)
    }
}

/// `#{p ∈ H(ℤ) : d_CC(p) ≤ n}` over a region.
pub fn ball_count(counter: &ColumnCounter, n: i64, region: &Region, exec: Execution) -> u64 {
    counter.ball_categories(n, region, ColumnParity::Any, exec).total()
}

/// `#{p ∈ H(ℤ) : n − 1 < d_CC(p) ≤ n}` over a region.
pub fn annulus_count(counter: &ColumnCounter, n: i64, region: &Region, exec: Execution) -> u64 {
    ball_count(counter, n, region, exec) - ball_count(counter, n - 1, region, exec)
}

/// Standard-generator word sphere `S_n` over a region, by category, from the
/// word-length formula: `|p| = n` iff `x + y ≡ n` and `n − 2 < d_CC(p) ≤ n`.
pub fn std_sphere_categories(counter: &ColumnCounter, n: i64, region: &Region, exec: Execution) -> CategoryCounts {
    let cols = ColumnParity::Matching(n);
    let outer = counter.ball_categories(n, region, cols, exec);
    let inner = counter.ball_categories(n - 2, region, cols, exec);
    outer.sub(inner)
}

pub fn std_sphere_count(counter: &ColumnCounter, n: i64, region: &Region, exec: Execution) -> u64 {
    std_sphere_categories(counter, n, region, exec).total()
}

/// `#(S_n ∩ region)` from a breadth-first ball.
pub fn ball_sphere_count(ball: &WordBall, n: u32, region: &Region) -> Result<u64> {
    if n > ball.radius {
        return Err(Error::OutOfRange(format!("sphere {n} is beyond the ball radius {}", ball.radius)));
    }
    Ok(ball
        .iter()
        .filter(|(p, l)| *l == n && region.contains(p.x, p.y))
        .count() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Annulus,
    Sphere,
    Ball,
}

impl CountMode {
    pub fn name(self) -> &'static str {
        match self {
            CountMode::Annulus => "annulus",
            CountMode::Sphere => "sphere",
            CountMode::Ball => "ball",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusRow {
    pub n: i64,
    pub count: u64,
    pub prediction: Rational,
    pub ratio: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct CensusTable {
    pub mode: CountMode,
    pub region: String,
    /// Exact cone volume of the region.
    pub cone_volume: Rational,
    pub rows: Vec<CensusRow>,
}

impl CensusTable {
    pub fn to_csv(&self, seed: u64) -> String {
        let mut out = format!("# seed={seed} mode={} region={}\n", self.mode.name(), self.region);
        out.push_str("n,count,prediction,ratio,residual\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.9},{:.3}\n",
                r.n,
                r.count,
                rat_to_string(&r.prediction),
                r.ratio,
                r.residual
            ));
        }
        out
    }

    pub fn to_json(&self, seed: u64) -> Value {
        json!({
            "seed": seed,
            "mode": self.mode.name(),
            "region": self.region,
            "cone_volume": rat_to_string(&self.cone_volume),
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "count": r.count,
                "prediction": rat_to_string(&r.prediction),
                "ratio": r.ratio,
                "residual": r.residual,
                "residual_over_n2": r.residual / (r.n as f64 * r.n as f64),
                "count_over_n3": r.count as f64 / (r.n as f64).powi(3),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Counts for each `n` against a prediction: `4·vol·n³` for annuli and
/// `vol·n⁴` for balls. Sphere mode counts the standard-generator word sphere
/// and predicts it by the exact annulus count at the same `n`, so no leading
/// constant is assumed.
pub fn convergence_table(
    mode: CountMode,
    atlas: &PanelAtlas,
    ns: &[i64],
    region: &Region,
    exec: Execution,
) -> Result<CensusTable> {
    let counter = ColumnCounter::new(atlas);
    let vol = region.cone_volume(atlas, SignSelection::ALL)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let (count, prediction) = match mode {
                CountMode::Annulus => (annulus_count(&counter, n, region, exec), &vol * int(4 * n * n * n)),
                CountMode::Sphere => (
                    std_sphere_count(&counter, n, region, exec),
                    int(annulus_count(&counter, n, region, exec) as i64),
                ),
                CountMode::Ball => (ball_count(&counter, n, region, exec), &vol * int(n * n) * int(n * n)),
            };
            let p = rat_to_f64(&prediction);
            CensusRow {
                n,
                count,
                ratio: count as f64 / p,
                residual: count as f64 - p,
                prediction,
            }
        })
        .collect();
    Ok(CensusTable {
        mode,
        region: region.describe(),
        cone_volume: vol,
        rows,
    })
}

/// Per-sector comparison of word-sphere shares with cone-measure shares.
#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub n: i64,
    pub sphere_size: u64,
    pub sectors: Vec<SectorShare>,
    /// `max |count share − volume share|` over sectors.
    pub max_deviation: f64,
    /// `#S_n / n³`.
    pub leading_constant: f64,
}

#[derive(Clone, Debug)]
pub struct SectorShare {
    pub region: Region,
    pub count: u64,
    pub share: f64,
    pub volume_share: Rational,
}

/// Standard-generator sphere shares over a sector partition, from the
/// word-length formula.
pub fn measure_report(atlas: &PanelAtlas, n: i64, sectors: &[Region], exec: Execution) -> Result<MeasureReport> {
    let counter = ColumnCounter::new(atlas);
    sector_shares(atlas, n, sectors, |r| Ok(std_sphere_count(&counter, n, r, exec)))
}

/// Sphere shares over a sector partition for any generating set, from a
/// breadth-first ball of radius at least `n`.
pub fn measure_report_from_ball(atlas: &PanelAtlas, ball: &WordBall, n: u32, sectors: &[Region]) -> Result<MeasureReport> {
    sector_shares(atlas, n as i64, sectors, |r| ball_sphere_count(ball, n, r))
}

fn sector_shares(
    atlas: &PanelAtlas,
    n: i64,
    sectors: &[Region],
    count: impl Fn(&Region) -> Result<u64>,
) -> Result<MeasureReport> {
    let total_vol = ball_volumes(atlas).total;
    let mut shares = Vec::with_capacity(sectors.len());
    let mut size = 0u64;
    for region in sectors {
        let c = count(region)?;
        size += c;
        let vs = region.cone_volume(atlas, SignSelection::ALL)? / &total_vol;
        shares.push(SectorShare {
            region: region.clone(),
            count: c,
            share: 0.0,
            volume_share: vs,
        });
    }
    let mut max_deviation = 0.0f64;
    for s in &mut shares {
        s.share = s.count as f64 / size.max(1) as f64;
        max_deviation = max_deviation.max((s.share - rat_to_f64(&s.volume_share)).abs());
    }
    Ok(MeasureReport {
        n,
        sphere_size: size,
        sectors: shares,
        max_deviation,
        leading_constant: size as f64 / (n as f64).powi(3),
    })
}

/// Sphere-mode table for any generating set, from a breadth-first ball.
pub fn sphere_table_from_ball(atlas: &PanelAtlas, ball: &WordBall, ns: &[i64], region: &Region, exec: Execution) -> Result<CensusTable> {
    let counter = ColumnCounter::new(atlas);
    let rows = ns
        .iter()
        .map(|&n| {
            let count = ball_sphere_count(ball, u32::try_from(n).map_err(|_| Error::OutOfRange(format!("n = {n}")))?, region)?;
            let prediction = int(annulus_count(&counter, n, region, exec) as i64);
            let p = rat_to_f64(&prediction);
            Ok(CensusRow {
                n,
                count,
                ratio: count as f64 / p,
                residual: count as f64 - p,
                prediction,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CensusTable {
        mode: CountMode::Sphere,
        region: region.describe(),
        cone_volume: region.cone_volume(atlas, SignSelection::ALL)?,
        rows,
    })
}

/// Sectors between consecutive vertex rays of `L` (`2N` sectors).
pub fn vertex_partition(atlas: &PanelAtlas) -> Vec<Region> {
    let v = atlas.l.vertices();
    (0..v.len())
        .map(|k| Region::Sector {
            from: v[k].clone(),
            to: v[(k + 1) % v.len()].clone(),
        })
        .collect()
}

impl MeasureReport {
    pub fn to_json(&self, seed: u64) -> Value {
        json!({
            "seed": seed,
            "n": self.n,
            "sphere_size": self.sphere_size,
            "leading_constant": self.leading_constant,
            "max_deviation": self.max_deviation,
            "sectors": self.sectors.iter().map(|s| json!({
                "region": s.region.describe(),
                "count": s.count,
                "share": s.share,
                "volume_share": rat_to_string(&s.volume_share),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_csv(&self, seed: u64) -> String {
        let mut out = format!("# seed={seed} n={} sphere_size={}\n", self.n, self.sphere_size);
        out.push_str("sector,count,share,volume_share,deviation\n");
        for (k, s) in self.sectors.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{:.9},{},{:.9}\n",
                k + 1,
                s.count,
                s.share,
                rat_to_string(&s.volume_share),
                s.share - rat_to_f64(&s.volume_share)
            ));
        }
        out
    }
}

/// Fits `C = max |residual|/n²` over rows.
pub fn fit_residual_constant(rows: &[CensusRow]) -> f64 {
    rows.iter()
        .map(|r| r.residual.abs() / (r.n as f64 * r.n as f64))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{bfs_ball, word_length_std, GenSet, HeisPoint, DEFAULT_MEM_BUDGET};
    use crate::metric::{ball_compare, BallRelation};

    fn exec() -> Execution {
        Execution::available()
    }

    #[test]
    fn small_annulus() {
        let g = GenSet::standard();
        let c = ColumnCounter::new(g.atlas());
        assert_eq!(annulus_count(&c, 1, &Region::Full, exec()), 4);
        assert_eq!(ball_count(&c, 0, &Region::Full, exec()), 1);
    }

    #[test]
    fn columns_match_point_by_point() {
        for g in [GenSet::standard(), GenSet::hexagonal()] {
            let atlas = g.atlas();
            let c = ColumnCounter::new(atlas);
            for n in 0..=8i64 {
                let mut brute = 0u64;
                let span = 2 * n + 1;
                for x in -span..=span {
                    for y in -span..=span {
                        let wmax = (4.0 * rat_to_f64(&atlas.a_max) * (n * n) as f64) as i64 + 2;
                        for w in -wmax..=wmax {
                            let p = HeisPoint::new(x, y, w);
                            if p.is_valid() && ball_compare(atlas, &p.to_cc(), &int(n)) != BallRelation::Outside {
                                brute += 1;
                            }
                        }
                    }
                }
                assert_eq!(ball_count(&c, n, &Region::Full, exec()), brute, "n = {n}");
            }
        }
    }

    #[test]
    fn sphere_formula_matches_bfs() {
        let g = GenSet::standard();
        let c = ColumnCounter::new(g.atlas());
        let b = bfs_ball(&g, 12, DEFAULT_MEM_BUDGET, exec()).unwrap();
        for n in 0..=12 {
            assert_eq!(std_sphere_count(&c, n, &Region::Full, exec()), b.sphere_sizes[n as usize]);
        }
        for region in symmetric_partition(g.atlas()) {
            assert_eq!(
                std_sphere_count(&c, 12, &region, exec()),
                ball_sphere_count(&b, 12, &region).unwrap()
            );
        }
        // every member of the sphere passes the parity test
        for p in b.sphere(12) {
            assert!(parity_check(p, 12));
            assert_eq!(word_length_std(p, g.atlas()), 12);
        }
    }

    #[test]
    fn partition_is_additive() {
        for g in [GenSet::standard(), GenSet::hexagonal()] {
            let c = ColumnCounter::new(g.atlas());
            let parts = symmetric_partition(g.atlas());
            for n in [5i64, 9] {
                let full = annulus_count(&c, n, &Region::Full, exec());
                let sum: u64 = parts.iter().map(|r| annulus_count(&c, n, r, exec())).sum();
                assert_eq!(sum, full);
            }
        }
    }

    #[test]
    fn side_categories_match_classification() {
        let g = GenSet::standard();
        let atlas = g.atlas();
        let c = ColumnCounter::new(atlas);
        let n = 6;
        let cats = c.ball_categories(n, &Region::Full, ColumnParity::Any, exec());
        let mut side = 0;
        let mut plus = 0;
        for x in -n..=n {
            for y in -n..=n {
                for w in -80..=80 {
                    let p = HeisPoint::new(x, y, w);
                    if !p.is_valid() || ball_compare(atlas, &p.to_cc(), &int(n)) == BallRelation::Outside {
                        continue;
                    }
                    let gauge = atlas.norm(&p.planar());
                    if ball_compare(atlas, &p.to_cc(), &gauge) != BallRelation::Outside {
                        side += 1;
                    } else if w > 0 {
                        plus += 1;
                    }
                }
            }
        }
        assert_eq!(cats.side, side);
        assert_eq!(cats.plus, plus);
        assert_eq!(cats.minus, plus);
    }

    #[test]
    fn ball_based_reports_match_closed_form() {
        let g = GenSet::standard();
        let b = bfs_ball(&g, 10, DEFAULT_MEM_BUDGET, exec()).unwrap();
        let sectors = symmetric_partition(g.atlas());
        let closed = measure_report(g.atlas(), 10, &sectors, exec()).unwrap();
        let from_ball = measure_report_from_ball(g.atlas(), &b, 10, &sectors).unwrap();
        assert_eq!(closed.sphere_size, from_ball.sphere_size);
        assert_eq!(closed.max_deviation, from_ball.max_deviation);
        let ns = [3, 7, 10];
        let t1 = convergence_table(CountMode::Sphere, g.atlas(), &ns, &Region::Full, exec()).unwrap();
        let t2 = sphere_table_from_ball(g.atlas(), &b, &ns, &Region::Full, exec()).unwrap();
        assert_eq!(t1.to_csv(1), t2.to_csv(1));
        assert!(sphere_table_from_ball(g.atlas(), &b, &[11], &Region::Full, exec()).is_err());
        assert_eq!(vertex_partition(g.atlas()).len(), 4);
    }

    #[test]
    fn side_sector_share_approaches_three_over_thirty_one() {
        let g = GenSet::standard();
        let atlas = g.atlas();
        let c = ColumnCounter::new(atlas);
        let e = &atlas.edges[0];
        let cone = Region::Sector {
            from: e.start.clone(),
            to: e.end.clone(),
        };
        let n = 200;
        let side = std_sphere_categories(&c, n, &cone, exec()).select(SignSelection::SIDE);
        let all = std_sphere_count(&c, n, &Region::Full, exec());
        let share = side as f64 / all as f64;
        assert!((share - 3.0 / 31.0).abs() < 0.005, "{share}");
        let quarter = std_sphere_count(&c, n, &cone, exec()) as f64 / all as f64;
        // boundary rays go to one side only, an O(1/n) effect
        assert!((quarter - 0.25).abs() < 2.0 / n as f64, "{quarter}");
    }

    #[test]
    fn ball_table_has_exact_predictions() {
        let g = GenSet::standard();
        let t = convergence_table(CountMode::Ball, g.atlas(), &[4, 8], &Region::Full, exec()).unwrap();
        assert_eq!(t.rows[0].prediction, crate::numbers::rat(31, 72) * int(256));
        assert!(t.to_csv(0).starts_with("# seed=0"));
        assert!(t.to_csv(0).lines().nth(1) == Some("n,count,prediction,ratio,residual"));
    }
}
