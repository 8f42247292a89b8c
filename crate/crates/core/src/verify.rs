//! Invariant suites shared by the test harness and `heiscc verify`.
//!
//! Every check reports how many cases it examined and how many failed, so a
//! caller can print one line per check and decide on an exit status.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::atlas::{build_atlas, PanelAtlas};
use crate::counting::{annulus_count, ball_count, symmetric_partition, ColumnCounter, Region};
use crate::error::Result;
use crate::geometry::{gauge_norm, polar_dual, shoelace_area, symmetric_hull, ConvexPolygon, Vec2};
use crate::lattice::{bfs_ball, mul, parity_check, spread, word_length_std, GenSet, HeisPoint, WordBall};
use crate::mesh::sphere_mesh;
use crate::metric::{ball_compare, cc_distance, BallRelation, CCPoint};
use crate::monte_carlo::random_footprint;
use crate::numbers::{int, rat, Rational};
use crate::par::Execution;
use crate::volumes::{ball_volumes, panel_cone_volume};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    /// First failing case, if any.
    pub detail: String,
    /// Whether a failure should fail the suite. Checks outside the scope of
    /// the result they test are reported for information only.
    pub required: bool,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome {
            name,
            cases: 0,
            failures: 0,
            detail: String::new(),
            required: true,
        }
    }

    fn optional(mut self) -> Self {
        self.required = false;
        self
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.failures == 0 {
                self.detail = what();
            }
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed(),
            "cases": self.cases,
            "failures": self.failures,
            "detail": self.detail,
            "required": self.required,
        })
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random centrally symmetric polygon with at most 12 vertices, the hull of
/// a few small integer points and their negatives.
pub fn random_symmetric_polygon<R: Rng>(rng: &mut R) -> ConvexPolygon {
    loop {
        let k = rng.gen_range(2..=6);
        let pts: Vec<Vec2> = (0..k)
            .map(|_| Vec2::from_ints(rng.gen_range(-5..=5), rng.gen_range(-5..=5)))
            .collect();
        if let Ok(p) = symmetric_hull(&pts, true) {
            if p.half_count() <= 6 {
                return p;
            }
        }
    }
}

/// A random centrally symmetric `2n`-gon with small integer vertices, for
/// `2 ≤ n ≤ 8`.
pub fn random_polygon_with_half_count<R: Rng>(rng: &mut R, n: usize) -> ConvexPolygon {
    // primitive directions in the upper half-plane, by angle
    const DIRECTIONS: [(i64, i64); 12] = [
        (1, 0),
        (4, 1),
        (2, 1),
        (3, 2),
        (1, 1),
        (2, 3),
        (1, 2),
        (0, 1),
        (-1, 2),
        (-1, 1),
        (-2, 1),
        (-3, 1),
    ];
    loop {
        let mut picks: Vec<usize> = (0..DIRECTIONS.len()).collect();
        for k in 0..n {
            let j = rng.gen_range(k..picks.len());
            picks.swap(k, j);
        }
        let pts: Vec<Vec2> = picks[..n]
            .iter()
            .map(|&k| {
                let r = rng.gen_range(3..=4);
                Vec2::from_ints(r * DIRECTIONS[k].0, r * DIRECTIONS[k].1)
            })
            .collect();
        if let Ok(p) = symmetric_hull(&pts, true) {
            if p.half_count() == n {
                return p;
            }
        }
    }
}

fn random_rational<R: Rng>(rng: &mut R, span: i64, den: i64) -> Rational {
    rat(rng.gen_range(-span * den..=span * den), den)
}

/// `4N² − 4N` quads for random symmetric 2N-gons, cycling `N` over 2..=6.
pub fn check_quad_counts(trials: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("quad count 4N²−4N");
    let mut r = rng(seed);
    for t in 0..trials {
        let n = 2 + t % 5;
        let l = random_polygon_with_half_count(&mut r, n);
        let got = build_atlas(&l).map(|a| a.quads.len());
        out.record(got.as_ref().ok() == Some(&(4 * n * n - 4 * n)), || {
            format!("{:?} gave {got:?}", l.vertices())
        });
    }
    out
}

/// Polar duality is an involution, on `L` and on random polygons.
pub fn check_dual_involution(l: &ConvexPolygon, trials: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("polar dual involution");
    let mut r = rng(seed);
    let mut polys = vec![l.clone()];
    polys.extend((0..trials).map(|_| random_symmetric_polygon(&mut r)));
    for p in polys {
        out.record(polar_dual(&polar_dual(&p)) == p, || format!("{:?}", p.vertices()));
    }
    out
}

/// Gauge norm axioms and shoelace translation/reversal behavior.
pub fn check_planar_geometry(l: &ConvexPolygon, trials: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("gauge norm and shoelace");
    let mut r = rng(seed);
    for _ in 0..trials {
        let u = Vec2::new(random_rational(&mut r, 3, 7), random_rational(&mut r, 3, 7));
        let v = Vec2::new(random_rational(&mut r, 3, 7), random_rational(&mut r, 3, 7));
        let t = random_rational(&mut r, 2, 5);
        let g = |w: &Vec2| gauge_norm(l, w);
        let ok = g(&(&u + &v)) <= g(&u) + g(&v) && g(&-&u) == g(&u) && g(&u.scale(&t)) == t.abs() * g(&u);
        out.record(ok, || format!("u = {u:?}, v = {v:?}, t = {t}"));
        let moved: Vec<Vec2> = l.vertices().iter().map(|p| p + &u).collect();
        let mut reversed = l.vertices().to_vec();
        reversed.reverse();
        let area = shoelace_area(l.vertices());
        out.record(shoelace_area(&moved) == area && shoelace_area(&reversed) == -&area, || {
            format!("translation by {u:?}")
        });
    }
    out
}

/// Edge-adjacent quads agree at 5 points of every shared boundary, and quads
/// touching `∂Q` agree with the edge balayage there.
pub fn check_boundary_continuity(atlas: &PanelAtlas) -> CheckOutcome {
    let mut out = CheckOutcome::new("atlas boundary continuity");
    for q in &atlas.quads {
        let n = q.vertices.len();
        for k in 0..n {
            let (a, b) = (&q.vertices[k], &q.vertices[(k + 1) % n]);
            for s in 1..=5 {
                let p = a + &(b - a).scale(&rat(s, 6));
                let here = q.poly.eval(&p);
                for o in atlas.quads.iter().filter(|o| o.contains(&p)) {
                    let there = o.poly.eval(&p);
                    out.record(there == here, || {
                        format!("quads {:?} and {:?} differ at {p:?}", q.id(), o.id())
                    });
                }
                if atlas.norm(&p).is_one() {
                    let e = &atlas.edges[atlas.edge_sector(&p)];
                    let edge_value = e.balayage_at(&e.parameter(&p));
                    out.record(edge_value == here, || format!("quad {:?} leaves ∂Q at {p:?}", q.id()));
                }
            }
        }
    }
    out
}

/// `A(p) = A(−p)` at random rational points, `A = 0` at the vertices of `L`
/// and `A > 0` inside `Q`.
pub fn check_balayage_symmetry(atlas: &PanelAtlas, trials: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("central symmetry and positivity of A");
    let mut r = rng(seed);
    for _ in 0..trials {
        let p = random_footprint(atlas, &mut r, 97);
        let a = atlas.balayage_value(&p);
        let b = atlas.balayage_value(&-&p);
        let interior = atlas.norm(&p) < Rational::one();
        let positive = !interior || a.as_ref().is_ok_and(|v| v.is_positive());
        out.record(a.is_ok() && a.as_ref().ok() == b.as_ref().ok() && positive, || {
            format!("p = {p:?}: {a:?} vs {b:?}")
        });
    }
    for v in atlas.l.vertices() {
        out.record(atlas.balayage_value(v).is_ok_and(|a| a.is_zero()), || format!("A({v:?}) ≠ 0"));
    }
    out
}

fn random_cc_point<R: Rng>(atlas: &PanelAtlas, rng: &mut R) -> CCPoint {
    let p = random_footprint(atlas, rng, 17).scale(&rat(rng.gen_range(1..=7), 2));
    let z = random_rational(rng, 4, 11);
    CCPoint::new(p.x, p.y, z)
}

/// Dilation, symmetry, monotonicity in `|z|`, and agreement between
/// `ball_compare` and `cc_distance`.
pub fn check_metric(atlas: &PanelAtlas, trials: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("CC distance invariants");
    let mut r = rng(seed);
    for _ in 0..trials {
        let p = random_cc_point(atlas, &mut r);
        let t = rat(r.gen_range(1..=9), r.gen_range(1..=4));
        let Ok(d) = cc_distance(atlas, &p) else {
            out.record(false, || format!("no distance at {p}"));
            continue;
        };
        let scaled = cc_distance(atlas, &p.dilate(&t)).ok();
        out.record(scaled == Some(d.mul_rational(&t)), || format!("dilation by {t} at {p}"));
        let sym = [p.neg(), p.reflect_z()].map(|q| cc_distance(atlas, &q).ok());
        out.record(sym.iter().all(|s| s.as_ref() == Some(&d)), || format!("symmetry at {p}"));
        let higher = CCPoint::new(p.x.clone(), p.y.clone(), &p.z + p.z.signum() * rat(1, 3));
        out.record(
            cc_distance(atlas, &higher).is_ok_and(|h| h >= d),
            || format!("monotonicity in z at {p}"),
        );
        let radius = d.approximate(64) + rat(r.gen_range(-8..=8), 64);
        let rel = ball_compare(atlas, &p, &radius);
        let expected = match d.cmp_rational(&radius) {
            std::cmp::Ordering::Less => BallRelation::Inside,
            std::cmp::Ordering::Equal => BallRelation::OnSphere,
            std::cmp::Ordering::Greater => BallRelation::Outside,
        };
        out.record(rel == expected, || format!("ball_compare({p}, {radius})"));
    }
    out
}

/// Exact additivity, central symmetry, and `t⁴` scaling of the cone volumes.
pub fn check_volumes(atlas: &PanelAtlas) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("cone volume identities");
    let rep = ball_volumes(atlas);
    let quads: Rational = rep.per_quad.values().sum();
    let sides: Rational = rep.per_side.values().sum();
    out.record(&quads * int(2) == rep.regular, || "panels do not sum to the regular part".into());
    out.record(sides == rep.unstable, || "side panels do not sum to the unstable part".into());
    out.record(&rep.regular + &rep.unstable == rep.total, || "parts do not sum to the total".into());
    let n = atlas.l.half_count();
    for q in &atlas.quads {
        let v = panel_cone_volume(atlas, (q.i + n) % (2 * n), (q.j + n) % (2 * n))?;
        out.record(v == rep.per_quad[&q.id()], || format!("quad {:?} differs from its antipode", q.id()));
    }
    for t in [rat(2, 1), rat(1, 3)] {
        let scaled = ball_volumes(&build_atlas(&atlas.l.scaled(&t))?).total;
        let t2 = &t * &t;
        out.record(scaled == &rep.total * &t2 * &t2, || format!("scaling by {t}"));
    }
    let partition = symmetric_partition(atlas);
    let sum: Rational = partition
        .iter()
        .map(|r| r.cone_volume(atlas, crate::volumes::SignSelection::ALL))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    out.record(sum == rep.total, || "sector volumes do not sum to the total".into());
    Ok(out)
}

/// Table invariants of a word ball: triangle inequality along generators,
/// a predecessor for every nonidentity element, and the identity at zero.
pub fn check_bfs_table(ball: &WordBall) -> CheckOutcome {
    let mut out = CheckOutcome::new("BFS triangle inequality");
    out.record(ball.length(HeisPoint::IDENTITY) == Some(0), || "identity not at length 0".into());
    for (p, k) in ball.iter() {
        let mut has_predecessor = k == 0;
        for &g in &ball.gens {
            match ball.length(mul(p, g)) {
                Some(j) => {
                    has_predecessor |= j + 1 == k;
                    out.record(j <= k + 1 && k <= j + 1, || format!("{p} · {g}"));
                }
                None => out.record(k == ball.radius, || format!("{p} · {g} missing")),
            }
        }
        out.record(has_predecessor, || format!("{p} has no predecessor"));
    }
    out
}

/// Standard generators: every element of `S_k` has `x + y + k` even.
pub fn check_sphere_parity(ball: &WordBall) -> CheckOutcome {
    let mut out = CheckOutcome::new("sphere parity");
    for (p, k) in ball.iter() {
        out.record(parity_check(p, k as i64), || format!("{p} at length {k}"));
    }
    out
}

/// Word length is nondecreasing in `z ≥ 0` along each column of the ball.
/// This holds for the standard generators; with `±(1, 1, 1)` added,
/// `|(2, 2, 0)| = 3 > |(2, 2, 1)| = 2`.
pub fn check_height_monotonicity(ball: &WordBall) -> CheckOutcome {
    let mut out = CheckOutcome::new("height monotonicity");
    let mut columns: BTreeMap<(i64, i64), BTreeMap<i64, u32>> = BTreeMap::new();
    for (p, k) in ball.iter() {
        if p.w >= 0 {
            columns.entry((p.x, p.y)).or_default().insert(p.w, k);
        }
    }
    for ((x, y), col) in columns {
        let start = (x * y).rem_euclid(2);
        let top = *col.keys().next_back().expect("nonempty");
        let mut prev = 0u32;
        let mut w = start;
        while w <= top {
            match col.get(&w) {
                Some(&k) => {
                    out.record(k >= prev, || format!("({x}, {y}, {w}) drops to {k}"));
                    prev = k;
                }
                None => out.record(false, || format!("({x}, {y}, {w}) leaves the ball below a member")),
            }
            w += 2;
        }
    }
    out
}

/// The word-length formula against the ball, and `0 ≤ |p| − d_CC(p) < 2`.
pub fn check_word_length_formula(ball: &WordBall, atlas: &PanelAtlas, exec: Execution) -> CheckOutcome {
    let mut out = CheckOutcome::new("word-length formula = BFS");
    let entries = ball.sorted();
    let results = exec.map(&entries, |&(p, k)| {
        let formula = word_length_std(p, atlas) == k as i64;
        let cc = p.to_cc();
        let within = ball_compare(atlas, &cc, &int(k as i64)) != BallRelation::Outside
            && ball_compare(atlas, &cc, &int(k as i64 - 2)) == BallRelation::Outside;
        (formula, within)
    });
    for ((p, k), (formula, within)) in entries.iter().zip(results) {
        out.record(formula, || format!("formula differs at {p} (BFS {k})"));
        out.record(within, || format!("|p| − d_CC(p) out of [0, 2) at {p}"));
    }
    out
}

/// Powers of generators that project to vertices of `L` with zero height
/// have a unique geodesic point set.
pub fn check_vertex_ray_spread(ball: &WordBall, atlas: &PanelAtlas) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("spread on vertex rays");
    for &g in &ball.gens {
        if g.w != 0 || atlas.vertex_index(&g.planar()).is_none() {
            continue;
        }
        let mut p = HeisPoint::IDENTITY;
        for _ in 0..ball.radius {
            p = mul(p, g);
            out.record(spread(ball, p)? == 0, || format!("spread({p}) > 0"));
        }
    }
    Ok(out)
}

/// Column counts against point-by-point tests for `n ≤ max_n`, and sector
/// additivity of annulus counts.
pub fn check_counting(atlas: &PanelAtlas, max_n: i64, exec: Execution) -> CheckOutcome {
    let mut out = CheckOutcome::new("column counts");
    let counter = ColumnCounter::new(atlas);
    let span = atlas
        .l
        .vertices()
        .iter()
        .flat_map(|v| [v.x.abs(), v.y.abs()])
        .max()
        .expect("nonempty");
    for n in 0..=max_n {
        let reach = (&span * int(n)).floor().to_integer();
        let reach: i64 = reach.try_into().expect("small");
        let wmax = (&atlas.a_max * int(4 * n * n)).ceil().to_integer();
        let wmax: i64 = wmax.try_into().expect("small");
        let mut brute = 0u64;
        for x in -reach..=reach {
            for y in -reach..=reach {
                for w in -wmax..=wmax {
                    let p = HeisPoint::new(x, y, w);
                    if p.is_valid() && ball_compare(atlas, &p.to_cc(), &int(n)) != BallRelation::Outside {
                        brute += 1;
                    }
                }
            }
        }
        let columns = ball_count(&counter, n, &Region::Full, exec);
        out.record(columns == brute, || format!("n = {n}: columns {columns}, points {brute}"));
    }
    for n in [max_n, 2 * max_n + 1] {
        let full = annulus_count(&counter, n, &Region::Full, exec);
        let parts: u64 = symmetric_partition(atlas)
            .iter()
            .map(|r| annulus_count(&counter, n, r, exec))
            .sum();
        out.record(parts == full, || format!("n = {n}: sectors sum to {parts}, full {full}"));
    }
    out
}

pub fn check_mesh_symmetry(atlas: &PanelAtlas) -> CheckOutcome {
    let mut out = CheckOutcome::new("mesh z-symmetry");
    for k in [1, 3] {
        out.record(sphere_mesh(atlas, k).is_z_symmetric(), || format!("{k} subdivisions"));
    }
    out
}

/// Every suite for a generating set and a BFS radius.
pub fn verify_all(gens: &GenSet, radius: u32, seed: u64, mem_budget: u64, exec: Execution) -> Result<Vec<CheckOutcome>> {
    let atlas = gens.atlas();
    let ball = bfs_ball(gens, radius, mem_budget, exec)?;
    let mut out = vec![
        check_dual_involution(&atlas.l, 50, seed),
        check_planar_geometry(&atlas.l, 200, seed),
        check_quad_counts(30, seed),
        check_boundary_continuity(atlas),
        check_balayage_symmetry(atlas, 100, seed),
        check_metric(atlas, 200, seed),
        check_volumes(atlas)?,
        check_counting(atlas, 8, exec),
        check_mesh_symmetry(atlas),
        check_bfs_table(&ball),
        check_vertex_ray_spread(&ball, atlas)?,
    ];
    if gens.is_standard() {
        out.push(check_height_monotonicity(&ball));
        out.push(check_sphere_parity(&ball));
        out.push(check_word_length_formula(&ball, atlas, exec));
    } else {
        out.push(check_height_monotonicity(&ball).optional());
    }
    Ok(out)
}
