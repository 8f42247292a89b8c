//! Seeded Monte Carlo oracles: hit-or-miss cone volumes, and random unit-length
//! paths for checking that trace paths maximize balayage.
//!
//! Samples are split into a fixed number of shards. Shard `k` draws from the
//! ChaCha stream `k` of the master seed, so estimates do not depend on the
//! thread count.

use num::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atlas::{PanelAtlas, Quad, SideEdge};
use crate::geometry::{shoelace_area, Vec2};
use crate::numbers::{rat, rat_to_f64, Rational};
use crate::par::Execution;

pub const SHARDS: u64 = 16;

fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    /// One standard deviation of the estimator.
    pub std_error: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn relative_error(&self, exact: f64) -> f64 {
        ((self.value - exact) / exact).abs()
    }
}

/// Axis-aligned box and membership test of a cone.
struct ConeSampler<F> {
    lo: [f64; 3],
    hi: [f64; 3],
    member: F,
}

impl<F: Fn(f64, f64, f64) -> bool + Sync + Send> ConeSampler<F> {
    fn estimate(&self, samples: u64, seed: u64, exec: Execution) -> Estimate {
        let shards: Vec<u64> = (0..SHARDS).collect();
        let per = samples / SHARDS;
        let hits: u64 = exec
            .map(&shards, |&k| {
                let mut rng = shard_rng(seed, k);
                let mut h = 0u64;
                for _ in 0..per {
                    let x = rng.gen_range(self.lo[0]..self.hi[0]);
                    let y = rng.gen_range(self.lo[1]..self.hi[1]);
                    let z = rng.gen_range(self.lo[2]..self.hi[2]);
                    if (self.member)(x, y, z) {
                        h += 1;
                    }
                }
                h
            })
            .into_iter()
            .sum();
        let n = per * SHARDS;
        let box_vol: f64 = (0..3).map(|k| self.hi[k] - self.lo[k]).product();
        let f = hits as f64 / n as f64;
        Estimate {
            value: f * box_vol,
            std_error: (f * (1.0 - f) / n as f64).sqrt() * box_vol,
            samples: n,
        }
    }
}

fn bbox(points: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [0.0f64, 0.0];
    let mut hi = [0.0f64, 0.0];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Monte Carlo estimate of the cone volume over the `z > 0` panel of `quad`.
pub fn panel_volume_estimate(quad: &Quad, samples: u64, seed: u64, exec: Execution) -> Estimate {
    let corners: Vec<[f64; 2]> = quad.vertices.iter().map(|v| v.to_f64()).collect();
    let (lo, hi) = bbox(&corners);
    let [a1, a2, a3, b1, b2, c] = quad.poly.to_f64();
    let bounds: Vec<[f64; 3]> = quad
        .bounds
        .iter()
        .map(|f| [rat_to_f64(&f.cx), rat_to_f64(&f.cy), rat_to_f64(&f.c0)])
        .collect();
    let sampler = ConeSampler {
        lo: [lo[0], lo[1], 0.0],
        hi: [hi[0], hi[1], rat_to_f64(&quad.a_max)],
        member: move |x: f64, y: f64, z: f64| {
            // (x, y, z) = δ_s(p, A(p)) with p ∈ quad, s ∈ (0, 1]:
            // c s² + (b1 x + b2 y) s + q2(x, y) − z = 0
            let qa = c;
            let qb = b1 * x + b2 * y;
            let qc = a1 * x * x + a2 * x * y + a3 * y * y - z;
            let roots: [f64; 2] = if qa == 0.0 {
                [-qc / qb, f64::NAN]
            } else {
                let disc = qb * qb - 4.0 * qa * qc;
                if disc < 0.0 {
                    return false;
                }
                let r = disc.sqrt();
                [(-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa)]
            };
            roots.iter().any(|&s| {
                s > 0.0 && s <= 1.0 && bounds.iter().all(|f| f[0] * x + f[1] * y + f[2] * s >= 0.0)
            })
        },
    };
    sampler.estimate(samples, seed, exec)
}

/// Monte Carlo estimate of the cone volume over side panel `edge`.
pub fn side_volume_estimate(edge: &SideEdge, samples: u64, seed: u64, exec: Execution) -> Estimate {
    let pts = [[0.0, 0.0], edge.start.to_f64(), edge.end.to_f64()];
    let (lo, hi) = bbox(&pts);
    let (f1, f2) = edge.barycentric_forms();
    let f1 = [rat_to_f64(&f1.cx), rat_to_f64(&f1.cy)];
    let f2 = [rat_to_f64(&f2.cx), rat_to_f64(&f2.cy)];
    let c = rat_to_f64(&edge.cross);
    let peak = rat_to_f64(&edge.peak());
    let sampler = ConeSampler {
        lo: [lo[0], lo[1], -peak],
        hi: [hi[0], hi[1], peak],
        member: move |x: f64, y: f64, z: f64| {
            let b1 = f1[0] * x + f1[1] * y;
            let b2 = f2[0] * x + f2[1] * y;
            b1 >= 0.0 && b2 >= 0.0 && b1 + b2 <= 1.0 && z.abs() <= 0.5 * c * b1 * b2
        },
    };
    sampler.estimate(samples, seed, exec)
}

/// A random rational point of `Q` with denominator `den`.
pub fn random_footprint<R: Rng>(atlas: &PanelAtlas, rng: &mut R, den: i64) -> Vec2 {
    let lo = atlas
        .l
        .vertices()
        .iter()
        .flat_map(|v| [v.x.clone(), v.y.clone()])
        .map(|r| r.abs())
        .max()
        .expect("nonempty");
    let bound = (rat_to_f64(&lo) * den as f64).ceil() as i64;
    loop {
        let p = Vec2::new(rat(rng.gen_range(-bound..=bound), den), rat(rng.gen_range(-bound..=bound), den));
        if atlas.norm(&p) <= Rational::one() {
            return p;
        }
    }
}

fn polyline_length(atlas: &PanelAtlas, pts: &[Vec2]) -> Rational {
    pts.windows(2).map(|w| atlas.norm(&(&w[1] - &w[0]))).sum()
}

/// Random polygonal path `0 → … → p` of norm length at most one.
///
/// Even draws are random waypoint paths pulled toward the chord until they are
/// short enough; odd draws perturb the trace path to `p`.
pub fn random_path_to<R: Rng>(atlas: &PanelAtlas, p: &Vec2, rng: &mut R, draw: usize) -> Vec<Vec2> {
    let den = 256;
    let jitter = |rng: &mut R, scale: i64| rat(rng.gen_range(-scale..=scale), den);
    let base: Vec<Vec2> = if draw.is_multiple_of(2) {
        let m = rng.gen_range(1..=6);
        let mut pts = vec![Vec2::zero()];
        for k in 1..=m {
            let on_chord = p.scale(&rat(k as i64, m as i64 + 1));
            pts.push(&on_chord + &Vec2::new(jitter(rng, den), jitter(rng, den)));
        }
        pts.push(p.clone());
        pts
    } else {
        let trace = atlas.trace_shape(p).expect("p in Q").vertices();
        let mut pts = trace.clone();
        let last = pts.len() - 1;
        for v in pts.iter_mut().take(last).skip(1) {
            *v = &*v + &Vec2::new(jitter(rng, 8), jitter(rng, 8));
        }
        pts
    };
    // Pull interior vertices toward the chord until the length fits.
    let m = base.len() - 1;
    let mut lambda = Rational::one();
    loop {
        let pts: Vec<Vec2> = base
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let chord = p.scale(&rat(k as i64, m as i64));
                &chord + &(v - &chord).scale(&lambda)
            })
            .collect();
        if polyline_length(atlas, &pts) <= Rational::one() {
            return pad_to_unit_length(atlas, pts);
        }
        lambda /= Rational::from_integer(2.into());
    }
}

/// Appends a zero-area out-and-back spike so the path has length exactly one.
fn pad_to_unit_length(atlas: &PanelAtlas, mut pts: Vec<Vec2>) -> Vec<Vec2> {
    let slack = Rational::one() - polyline_length(atlas, &pts);
    if slack.is_positive() {
        let end = pts.last().cloned().expect("nonempty");
        let tip = &end + &atlas.l.vertex(0).scale(&(slack / Rational::from_integer(2.into())));
        pts.push(tip);
        pts.push(end);
    }
    pts
}

/// Balayage of a polyline from the origin: area against the closing chord.
pub fn polyline_balayage(pts: &[Vec2]) -> Rational {
    shoelace_area(pts)
}

/// `(endpoint, sampled balayage, A(endpoint))`.
pub type Violation = (Vec2, Rational, Rational);

/// Outcome of the balayage-maximality experiment.
#[derive(Clone, Debug)]
pub struct DidoReport {
    pub endpoints: usize,
    pub paths: usize,
    /// Every sampled path beating `A(p)`.
    pub violations: Vec<Violation>,
    /// Smallest observed gap `A(p) − balayage`.
    pub min_gap: Rational,
}

/// Samples `endpoints × paths_per_endpoint` unit-length paths and compares
/// their balayage exactly with `A(endpoint)`.
pub fn dido_experiment(
    atlas: &PanelAtlas,
    endpoints: usize,
    paths_per_endpoint: usize,
    seed: u64,
    exec: Execution,
) -> DidoReport {
    let ids: Vec<u64> = (0..endpoints as u64).collect();
    let results: Vec<(Vec<Violation>, Rational)> = exec.map(&ids, |&e| {
        let mut rng = shard_rng(seed, e);
        let p = random_footprint(atlas, &mut rng, 64);
        let a = atlas.balayage_value(&p).expect("p in Q");
        let mut bad = Vec::new();
        let mut gap: Option<Rational> = None;
        for draw in 0..paths_per_endpoint {
            let path = random_path_to(atlas, &p, &mut rng, draw);
            debug_assert_eq!(polyline_length(atlas, &path), Rational::one());
            let b = polyline_balayage(&path);
            let d = &a - &b;
            if d.is_negative() {
                bad.push((p.clone(), b.clone(), a.clone()));
            }
            if gap.as_ref().is_none_or(|g| d < *g) {
                gap = Some(d);
            }
        }
        (bad, gap.unwrap_or_else(|| a.clone()))
    });
    let mut violations = Vec::new();
    let mut min_gap: Option<Rational> = None;
    for (bad, gap) in results {
        violations.extend(bad);
        if min_gap.as_ref().is_none_or(|g| gap < *g) {
            min_gap = Some(gap);
        }
    }
    DidoReport {
        endpoints,
        paths: endpoints * paths_per_endpoint,
        violations,
        min_gap: min_gap.unwrap_or_else(|| Rational::from_integer(0.into())),
    }
}
