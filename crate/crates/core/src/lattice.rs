//! The integer Heisenberg group, generating sets, and breadth-first word
//! balls.
//!
//! Points are stored as `(x, y, w)` with `w = 2z`, so every lattice point has
//! integer coordinates and `w ≡ x·y (mod 2)`.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::atlas::{build_atlas, PanelAtlas};
use crate::error::{Error, Result};
use crate::geometry::{symmetric_hull, Vec2};
use crate::metric::{ball_compare, cc_distance, BallRelation, CCPoint};
use crate::numbers::{int, rat, rat_to_f64, AlgebraicScalar, Rational};
use crate::par::Execution;
use crate::volumes::ball_volumes;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HeisPoint {
    pub x: i64,
    pub y: i64,
    /// Twice the height.
    pub w: i64,
}

impl HeisPoint {
    pub const IDENTITY: HeisPoint = HeisPoint { x: 0, y: 0, w: 0 };

    pub fn new(x: i64, y: i64, w: i64) -> Self {
        HeisPoint { x, y, w }
    }

    pub fn is_valid(&self) -> bool {
        (self.w - self.x * self.y).rem_euclid(2) == 0
    }

    pub fn to_cc(&self) -> CCPoint {
        CCPoint::from_doubled(self.x, self.y, self.w)
    }

    pub fn planar(&self) -> Vec2 {
        Vec2::from_ints(self.x, self.y)
    }
}

impl fmt::Display for HeisPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, w={})", self.x, self.y, self.w)
    }
}

/// Group law `(x+x', y+y', w+w'+xy'−yx')`.
pub fn mul(a: HeisPoint, b: HeisPoint) -> HeisPoint {
    HeisPoint {
        x: a.x + b.x,
        y: a.y + b.y,
        w: a.w + b.w + a.x * b.y - a.y * b.x,
    }
}

pub fn inv(a: HeisPoint) -> HeisPoint {
    HeisPoint {
        x: -a.x,
        y: -a.y,
        w: -a.w,
    }
}

/// `x + y + n` is even.
pub fn parity_check(p: HeisPoint, n: i64) -> bool {
    (p.x + p.y + n).rem_euclid(2) == 0
}

#[derive(Deserialize)]
struct GenSetFile {
    generators: Vec<[i64; 3]>,
    #[serde(default)]
    symmetrize: bool,
}

/// A finite symmetric generating set, in a fixed order.
#[derive(Clone, Debug)]
pub struct GenSet {
    elements: Vec<HeisPoint>,
    atlas: PanelAtlas,
    /// Largest CC norm of a generator.
    pub max_cc_norm: AlgebraicScalar,
    /// Largest generator height `z = w/2`.
    pub max_height: Rational,
}

impl GenSet {
    /// Validates `points` and, with `symmetrize`, appends the missing inverses
    /// after the given elements.
    pub fn new(points: &[HeisPoint], symmetrize: bool) -> Result<Self> {
        let mut elements: Vec<HeisPoint> = Vec::new();
        for &p in points {
            if !p.is_valid() {
                return Err(Error::InvalidGenerator(format!("{p} violates w ≡ x·y (mod 2)")));
            }
            if p == HeisPoint::IDENTITY {
                return Err(Error::InvalidGenerator("the identity is not a generator".into()));
            }
            if !elements.contains(&p) {
                elements.push(p);
            }
        }
        if symmetrize {
            for p in elements.clone() {
                if !elements.contains(&inv(p)) {
                    elements.push(inv(p));
                }
            }
        } else if elements.iter().any(|p| !elements.contains(&inv(*p))) {
            return Err(Error::NotSymmetric);
        }
        let projections: Vec<Vec2> = elements
            .iter()
            .filter(|p| p.x != 0 || p.y != 0)
            .map(|p| p.planar())
            .collect();
        if projections.is_empty() {
            return Err(Error::DegenerateHull);
        }
        let hull = symmetric_hull(&projections, false)?;
        let atlas = build_atlas(&hull)?;
        let mut max_cc_norm = AlgebraicScalar::zero();
        for p in &elements {
            let d = cc_distance(&atlas, &p.to_cc())?;
            if d > max_cc_norm {
                max_cc_norm = d;
            }
        }
        let max_height = elements
            .iter()
            .map(|p| rat(p.w, 2))
            .max()
            .expect("nonempty");
        Ok(GenSet {
            elements,
            atlas,
            max_cc_norm,
            max_height,
        })
    }

    /// `±e₁, ±e₂`.
    pub fn standard() -> Self {
        GenSet::new(&[HeisPoint::new(1, 0, 0), HeisPoint::new(0, 1, 0)], true).expect("valid")
    }

    /// `±e₁, ±e₂, ±e₁e₂`, whose projections span a hexagon.
    pub fn hexagonal() -> Self {
        GenSet::new(
            &[HeisPoint::new(1, 0, 0), HeisPoint::new(0, 1, 0), HeisPoint::new(1, 1, 1)],
            true,
        )
        .expect("valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GenSetFile = serde_json::from_str(text)?;
        let pts: Vec<HeisPoint> = file.generators.iter().map(|g| HeisPoint::new(g[0], g[1], g[2])).collect();
        GenSet::new(&pts, file.symmetrize)
    }

    pub fn elements(&self) -> &[HeisPoint] {
        &self.elements
    }

    pub fn atlas(&self) -> &PanelAtlas {
        &self.atlas
    }

    /// Whether these are exactly the standard generators `±e₁, ±e₂`.
    pub fn is_standard(&self) -> bool {
        let mut e = self.elements.clone();
        e.sort();
        e == vec![
            HeisPoint::new(-1, 0, 0),
            HeisPoint::new(0, -1, 0),
            HeisPoint::new(0, 1, 0),
            HeisPoint::new(1, 0, 0),
        ]
    }

    /// Predicted `|B_n|` from the limit-ball volume, `V·n⁴`.
    pub fn predicted_ball_size(&self, n: u32) -> f64 {
        let v = rat_to_f64(&ball_volumes(&self.atlas).total);
        v * (n as f64).powi(4)
    }
}

/// Approximate heap bytes per stored ball element (hash entry, control byte,
/// load-factor slack and frontier copies).
pub const BYTES_PER_ENTRY: u64 = 64;

pub const DEFAULT_MEM_BUDGET: u64 = 4 << 30;

/// Word lengths of every element of length at most `radius`.
#[derive(Clone, Debug)]
pub struct WordBall {
    pub radius: u32,
    pub gens: Vec<HeisPoint>,
    table: FxHashMap<HeisPoint, u32>,
    /// `sphere_sizes[k] = |S_k|`.
    pub sphere_sizes: Vec<u64>,
}

pub fn estimate_ball_bytes(gens: &GenSet, n: u32) -> u64 {
    let entries = gens.predicted_ball_size(n.max(1)) + 1.0;
    (entries * BYTES_PER_ENTRY as f64).ceil() as u64
}

/// Breadth-first census of the ball of radius `n`.
///
/// Each level is expanded from a read-only table, then sorted and
/// deduplicated before insertion, so the result is independent of the
/// schedule.
pub fn bfs_ball(gens: &GenSet, n: u32, mem_budget: u64, exec: Execution) -> Result<WordBall> {
    let estimate = estimate_ball_bytes(gens, n);
    if estimate > mem_budget {
        return Err(Error::MemoryBudgetExceeded {
            estimate,
            budget: mem_budget,
        });
    }
    let g = gens.elements().to_vec();
    let mut table: FxHashMap<HeisPoint, u32> = FxHashMap::default();
    table.reserve((gens.predicted_ball_size(n) * 1.05) as usize + 16);
    table.insert(HeisPoint::IDENTITY, 0);
    let mut frontier = vec![HeisPoint::IDENTITY];
    let mut sphere_sizes = vec![1u64];
    for k in 1..=n {
        let chunks: Vec<&[HeisPoint]> = frontier.chunks(4096).collect();
        let parts: Vec<Vec<HeisPoint>> = exec.map(&chunks, |chunk| {
            let mut out = Vec::with_capacity(chunk.len() * 2);
            for &p in chunk.iter() {
                for &s in &g {
                    let q = mul(p, s);
                    if !table.contains_key(&q) {
                        out.push(q);
                    }
                }
            }
            out
        });
        let mut next: Vec<HeisPoint> = parts.into_iter().flatten().collect();
        next.sort_unstable();
        next.dedup();
        for &q in &next {
            table.insert(q, k);
        }
        sphere_sizes.push(next.len() as u64);
        frontier = next;
    }
    Ok(WordBall {
        radius: n,
        gens: g,
        table,
        sphere_sizes,
    })
}

impl WordBall {
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn length(&self, p: HeisPoint) -> Option<u32> {
        self.table.get(&p).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (HeisPoint, u32)> + '_ {
        self.table.iter().map(|(p, l)| (*p, *l))
    }

    /// Elements sorted by `(x, y, w)`.
    pub fn sorted(&self) -> Vec<(HeisPoint, u32)> {
        let mut v: Vec<(HeisPoint, u32)> = self.iter().collect();
        v.sort_unstable();
        v
    }

    pub fn sphere(&self, k: u32) -> Vec<HeisPoint> {
        let mut v: Vec<HeisPoint> = self.iter().filter(|(_, l)| *l == k).map(|(p, _)| p).collect();
        v.sort_unstable();
        v
    }

    fn require(&self, p: HeisPoint) -> Result<u32> {
        self.length(p)
            .ok_or_else(|| Error::OutOfRange(format!("{p} is outside the ball of radius {}", self.radius)))
    }

    /// Binary dump: magic `HZWB`, version, radius, count, then sorted
    /// little-endian records `(x, y, w, length)`.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"HZWB")?;
        out.write_all(&1u32.to_le_bytes())?;
        out.write_all(&self.radius.to_le_bytes())?;
        out.write_all(&(self.table.len() as u64).to_le_bytes())?;
        for (p, l) in self.sorted() {
            out.write_all(&p.x.to_le_bytes())?;
            out.write_all(&p.y.to_le_bytes())?;
            out.write_all(&p.w.to_le_bytes())?;
            out.write_all(&l.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump written by [`WordBall::write_to`]. The generator list is
    /// not part of the format and must be supplied.
    pub fn read_from<R: Read>(mut input: R, gens: &GenSet) -> Result<Self> {
        let bad = |m: &str| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string()));
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != b"HZWB" {
            return Err(bad("not a word-ball dump"));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b4)?;
        if u32::from_le_bytes(b4) != 1 {
            return Err(bad("unsupported dump version"));
        }
        input.read_exact(&mut b4)?;
        let radius = u32::from_le_bytes(b4);
        input.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8);
        let mut table = FxHashMap::default();
        let mut sphere_sizes = vec![0u64; radius as usize + 1];
        for _ in 0..count {
            let mut c = [0i64; 3];
            for v in &mut c {
                input.read_exact(&mut b8)?;
                *v = i64::from_le_bytes(b8);
            }
            input.read_exact(&mut b4)?;
            let l = u32::from_le_bytes(b4);
            if l > radius {
                return Err(bad("record longer than the radius"));
            }
            sphere_sizes[l as usize] += 1;
            table.insert(HeisPoint::new(c[0], c[1], c[2]), l);
        }
        Ok(WordBall {
            radius,
            gens: gens.elements().to_vec(),
            table,
            sphere_sizes,
        })
    }
}

/// Word length for the standard generators: the least `n ≡ x + y (mod 2)`
/// with `d_CC(p) ≤ n`, found by exact ball comparisons.
pub fn word_length_std(p: HeisPoint, atlas: &PanelAtlas) -> i64 {
    let cc = p.to_cc();
    let base = p.x.abs() + p.y.abs();
    let fits = |m: i64| ball_compare(atlas, &cc, &int(base + 2 * m)) != BallRelation::Outside;
    if fits(0) {
        return base;
    }
    let mut hi = 1i64;
    while !fits(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // fits(lo) is false (or lo == 0, already checked), fits(hi) is true
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    base + 2 * hi
}

/// Bracket `[lo, hi]` of width below `1/8` around `d_CC(p)`.
pub fn bracket_distance(atlas: &PanelAtlas, p: &CCPoint, hint: &Rational) -> (Rational, Rational) {
    let mut lo = atlas.norm(&p.planar());
    let mut hi = hint.max(&lo).clone() + int(1);
    while ball_compare(atlas, p, &hi) == BallRelation::Outside {
        lo = hi.clone();
        hi = &hi * int(2);
    }
    let width = rat(1, 8);
    while &hi - &lo >= width {
        let mid = (&lo + &hi) / int(2);
        if ball_compare(atlas, p, &mid) == BallRelation::Outside {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Extreme values of `|p|_S − d_CC(p)` over a ball.
#[derive(Clone, Debug)]
pub struct GapScan {
    /// Bracket of the largest gap, and a point attaining it.
    pub max_gap: (Rational, Rational),
    pub argmax: HeisPoint,
    /// Bracket of the smallest gap, and a point attaining it.
    pub min_gap: (Rational, Rational),
    pub argmin: HeisPoint,
}

/// Scans every element of the ball. Gaps are bracketed to width below `1/8`
/// by bisection on the radius.
pub fn krat_gap_scan(ball: &WordBall, atlas: &PanelAtlas, exec: Execution) -> GapScan {
    let points = ball.sorted();
    let brackets: Vec<(Rational, Rational)> = exec.map(&points, |(p, l)| {
        let len = int(*l as i64);
        let (lo, hi) = bracket_distance(atlas, &p.to_cc(), &len);
        (&len - hi, len - lo)
    });
    let mid = |b: &(Rational, Rational)| &b.0 + &b.1;
    let mut imax = 0;
    let mut imin = 0;
    for k in 1..points.len() {
        if mid(&brackets[k]) > mid(&brackets[imax]) {
            imax = k;
        }
        if mid(&brackets[k]) < mid(&brackets[imin]) {
            imin = k;
        }
    }
    GapScan {
        max_gap: brackets[imax].clone(),
        argmax: points[imax].0,
        min_gap: brackets[imin].clone(),
        argmin: points[imin].0,
    }
}

/// `G*(p) = {v : |v| + |v⁻¹p| = |p|}`, found by walking geodesic edges
/// backwards from `p`.
pub fn geodesic_point_set(ball: &WordBall, p: HeisPoint) -> Result<BTreeSet<HeisPoint>> {
    let top = ball.require(p)?;
    let mut all: BTreeSet<HeisPoint> = BTreeSet::new();
    all.insert(p);
    let mut level: FxHashSet<HeisPoint> = FxHashSet::default();
    level.insert(p);
    for k in (0..top).rev() {
        let mut below = FxHashSet::default();
        for &u in &level {
            for &g in &ball.gens {
                let v = mul(u, inv(g));
                if ball.length(v) == Some(k) {
                    below.insert(v);
                }
            }
        }
        all.extend(below.iter().copied());
        level = below;
    }
    Ok(all)
}

/// Vertices of the lexicographically least geodesic word for `p`, from the
/// identity to `p`.
pub fn canonical_geodesic(ball: &WordBall, p: HeisPoint) -> Result<Vec<HeisPoint>> {
    let set = geodesic_point_set(ball, p)?;
    let top = ball.require(p)?;
    let mut path = vec![HeisPoint::IDENTITY];
    let mut cur = HeisPoint::IDENTITY;
    for k in 1..=top {
        cur = ball
            .gens
            .iter()
            .map(|&g| mul(cur, g))
            .find(|q| ball.length(*q) == Some(k) && set.contains(q))
            .expect("a geodesic continues through G*(p)");
        path.push(cur);
    }
    Ok(path)
}

/// Largest word distance from a point of `G*(p)` to the canonical geodesic.
/// A lower bound for the Hausdorff diameter of the set of geodesics.
pub fn spread(ball: &WordBall, p: HeisPoint) -> Result<u32> {
    let set = geodesic_point_set(ball, p)?;
    let path = canonical_geodesic(ball, p)?;
    let mut worst = 0u32;
    for &v in &set {
        let vi = inv(v);
        let d = path
            .iter()
            .filter_map(|&c| ball.length(mul(vi, c)))
            .min()
            .expect("v lies within |p| of the identity");
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(x: i64, y: i64, w: i64) -> HeisPoint {
        HeisPoint::new(x, y, w)
    }

    fn std_ball(n: u32) -> WordBall {
        bfs_ball(&GenSet::standard(), n, DEFAULT_MEM_BUDGET, Execution::available()).unwrap()
    }

    #[test]
    fn group_law_examples() {
        assert_eq!(mul(hp(1, 0, 0), hp(0, 1, 0)), hp(1, 1, 1));
        let (a, b) = (hp(1, 0, 0), hp(0, 1, 0));
        let comm = mul(mul(mul(a, b), inv(a)), inv(b));
        assert_eq!(comm, hp(0, 0, 2));
        assert_eq!(mul(hp(3, -2, 4), inv(hp(3, -2, 4))), HeisPoint::IDENTITY);
        assert_eq!(inv(hp(1, 1, 1)), hp(-1, -1, -1));
        assert_eq!(inv(hp(4, 0, 6)), hp(-4, 0, -6));
        assert_eq!(inv(HeisPoint::IDENTITY), HeisPoint::IDENTITY);
    }

    #[test]
    fn parity_examples() {
        assert!(parity_check(hp(4, 0, 6), 6));
        assert!(!parity_check(hp(1, 0, 0), 2));
        assert!(parity_check(hp(0, 0, 2), 4));
    }

    #[test]
    fn bfs_examples() {
        let b = std_ball(4);
        assert_eq!(b.sphere_sizes[1], 4);
        assert_eq!(b.sphere_sizes[2], 12);
        assert_eq!(b.length(hp(0, 0, 2)), Some(4));
        assert_eq!(b.length(HeisPoint::IDENTITY), Some(0));
    }

    #[test]
    fn bfs_is_independent_of_execution() {
        let g = GenSet::hexagonal();
        let s = bfs_ball(&g, 6, DEFAULT_MEM_BUDGET, Execution::Sequential).unwrap();
        let p = bfs_ball(&g, 6, DEFAULT_MEM_BUDGET, Execution::Parallel).unwrap();
        assert_eq!(s.sorted(), p.sorted());
        assert_eq!(s.sphere_sizes, p.sphere_sizes);
    }

    #[test]
    fn memory_budget_is_enforced() {
        let r = bfs_ball(&GenSet::standard(), 200, 1 << 20, Execution::available());
        assert!(matches!(r, Err(Error::MemoryBudgetExceeded { .. })));
    }

    #[test]
    fn word_length_examples() {
        let a = GenSet::standard();
        let atlas = a.atlas();
        assert_eq!(word_length_std(hp(4, 0, 6), atlas), 6);
        assert_eq!(word_length_std(hp(0, 0, 2), atlas), 4);
        assert_eq!(word_length_std(hp(2, 2, 4), atlas), 4);
        assert_eq!(word_length_std(HeisPoint::IDENTITY, atlas), 0);
    }

    #[test]
    fn word_length_matches_bfs_on_small_ball() {
        let g = GenSet::standard();
        let b = std_ball(8);
        for (p, l) in b.iter() {
            assert_eq!(word_length_std(p, g.atlas()), l as i64, "{p}");
        }
    }

    #[test]
    fn geodesic_sets() {
        let b = std_ball(8);
        let set = geodesic_point_set(&b, hp(8, 0, 0)).unwrap();
        let expected: BTreeSet<HeisPoint> = (0..=8).map(|k| hp(k, 0, 0)).collect();
        assert_eq!(set, expected);
        let set = geodesic_point_set(&b, hp(0, 0, 2)).unwrap();
        assert!(set.contains(&hp(1, 0, 0)) && set.contains(&hp(0, 1, 0)));
        let set = geodesic_point_set(&b, HeisPoint::IDENTITY).unwrap();
        assert_eq!(set.len(), 1);
        assert!(geodesic_point_set(&b, hp(20, 0, 0)).is_err());
    }

    #[test]
    fn geodesic_set_matches_definition() {
        let b = std_ball(6);
        for p in [hp(2, 2, 0), hp(0, 0, 2), hp(3, 1, 1), hp(-2, 1, 4)] {
            let top = b.length(p).unwrap();
            let brute: BTreeSet<HeisPoint> = b
                .iter()
                .filter(|(v, l)| {
                    *l <= top && b.length(mul(inv(*v), p)).is_some_and(|r| l + r == top)
                })
                .map(|(v, _)| v)
                .collect();
            assert_eq!(geodesic_point_set(&b, p).unwrap(), brute, "{p}");
        }
    }

    #[test]
    fn spread_examples() {
        let b = std_ball(8);
        assert_eq!(spread(&b, hp(8, 0, 0)).unwrap(), 0);
        assert!(spread(&b, hp(2, 2, 0)).unwrap() >= 1);
        // (k, k, 0) is a lattice point only for even k
        let s: Vec<u32> = [2, 4].iter().map(|&k| spread(&b, hp(k, k, 0)).unwrap()).collect();
        assert!(s[1] > s[0], "{s:?}");
    }

    #[test]
    fn dump_round_trip() {
        let g = GenSet::standard();
        let b = std_ball(5);
        let mut buf = Vec::new();
        b.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"HZWB");
        assert_eq!(buf.len(), 4 + 4 + 4 + 8 + b.len() * 28);
        let back = WordBall::read_from(&buf[..], &g).unwrap();
        assert_eq!(back.sorted(), b.sorted());
        assert_eq!(back.sphere_sizes, b.sphere_sizes);
    }

    #[test]
    fn genset_validation() {
        assert!(matches!(GenSet::new(&[hp(1, 1, 0)], true), Err(Error::InvalidGenerator(_))));
        assert!(matches!(GenSet::new(&[hp(0, 0, 0)], true), Err(Error::InvalidGenerator(_))));
        assert!(matches!(GenSet::new(&[hp(1, 0, 0), hp(0, 1, 0)], false), Err(Error::NotSymmetric)));
        assert!(matches!(GenSet::new(&[hp(2, 0, 0), hp(1, 0, 0)], true), Err(Error::DegenerateHull)));
        let g = GenSet::from_json(r#"{"generators": [[1,0,0],[0,1,0],[1,1,1]], "symmetrize": true}"#).unwrap();
        assert_eq!(g.elements().len(), 6);
        assert_eq!(g.atlas().quads.len(), 24);
        assert!(GenSet::standard().is_standard());
        assert_eq!(GenSet::standard().max_cc_norm, AlgebraicScalar::from_rational(int(1)));
    }
}
