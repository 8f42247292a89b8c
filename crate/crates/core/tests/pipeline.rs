//! Cross-module checks through the public API.

use heiscc_core::counting::{convergence_table, fit_residual_constant, CountMode, Region};
use heiscc_core::lattice::{bfs_ball, GenSet, WordBall, DEFAULT_MEM_BUDGET};
use heiscc_core::monte_carlo::{panel_volume_estimate, side_volume_estimate};
use heiscc_core::numbers::{rat, rat_to_f64};
use heiscc_core::par::Execution;
use heiscc_core::volumes::{ball_volumes, panel_cone_volume, side_panel_cone_volume};

fn exec() -> Execution {
    Execution::available()
}

#[test]
fn hexagon_volumes_match_sampling() {
    let g = GenSet::hexagonal();
    let atlas = g.atlas();
    let v = ball_volumes(atlas);
    assert_eq!(&v.regular + &v.unstable, v.total);
    assert_eq!(v.total, rat(103, 120));
    for (k, q) in atlas.quads.iter().enumerate() {
        let exact = rat_to_f64(&panel_cone_volume(atlas, q.i, q.j).unwrap());
        let est = panel_volume_estimate(q, 320_000, 40 + k as u64, exec());
        assert!((est.value - exact).abs() < 5.0 * est.std_error, "quad {:?}: {exact} vs {est:?}", q.id());
    }
    for e in &atlas.edges {
        let exact = rat_to_f64(&side_panel_cone_volume(atlas, e.k).unwrap());
        let est = side_volume_estimate(e, 320_000, 90 + e.k as u64, exec());
        assert!((est.value - exact).abs() < 5.0 * est.std_error, "side {}: {exact} vs {est:?}", e.k);
    }
}

#[test]
fn ball_dump_round_trip() {
    let g = GenSet::hexagonal();
    let ball = bfs_ball(&g, 7, DEFAULT_MEM_BUDGET, exec()).unwrap();
    let mut buf = Vec::new();
    ball.write_to(&mut buf).unwrap();
    let back = WordBall::read_from(buf.as_slice(), &g).unwrap();
    assert_eq!(back.sorted(), ball.sorted());
    assert_eq!(back.sphere_sizes, ball.sphere_sizes);
    assert!(WordBall::read_from(&buf[..10], &g).is_err());
}

#[test]
fn ball_counts_approach_volume() {
    let g = GenSet::standard();
    let t = convergence_table(CountMode::Ball, g.atlas(), &[50, 100, 200], &Region::Full, exec()).unwrap();
    let ratios: Vec<f64> = t.rows.iter().map(|r| r.ratio).collect();
    assert!(ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()), "{ratios:?}");
    assert!((ratios[2] - 1.0).abs() < 0.02, "{ratios:?}");
}

#[test]
fn annulus_residuals_are_quadratic() {
    let g = GenSet::standard();
    let ns: Vec<i64> = (50..=400).step_by(50).collect();
    let t = convergence_table(CountMode::Annulus, g.atlas(), &ns, &Region::Full, exec()).unwrap();
    let c = fit_residual_constant(&t.rows);
    // residual/n² settles near -1.58 for the square
    assert!(c > 1.4 && c < 1.6, "{c}");
    let scaled: Vec<f64> = t.rows.iter().map(|r| r.residual / (r.n * r.n) as f64).collect();
    assert!(scaled.windows(2).all(|w| w[1] < w[0] && w[1] < 0.0), "{scaled:?}");
}

#[test]
fn word_spheres_match_annuli() {
    let g = GenSet::standard();
    let t = convergence_table(CountMode::Sphere, g.atlas(), &[25, 50, 100, 200], &Region::Full, exec()).unwrap();
    let gaps: Vec<f64> = t.rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[3] < 0.02, "{gaps:?}");
}
