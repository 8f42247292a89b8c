//! `heiscc`: command-line driver for the polygonal CC toolkit.
//!
//! Every subcommand reads a generating-set file (`--gens`), whose third
//! coordinate is the doubled height `w = 2z`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use heiscc_core::counting::{
    convergence_table, measure_report, measure_report_from_ball, sphere_table_from_ball, symmetric_partition,
    vertex_partition, CensusTable, CountMode, MeasureReport, Region,
};
use heiscc_core::lattice::{bfs_ball, estimate_ball_bytes, word_length_std, GenSet, HeisPoint, DEFAULT_MEM_BUDGET};
use heiscc_core::mesh::sphere_mesh;
use heiscc_core::metric::{cc_distance, geodesics, CCPoint};
use heiscc_core::numbers::{rat_to_string, Rational};
use heiscc_core::par::Execution;
use heiscc_core::verify::verify_all;
use heiscc_core::volumes::ball_volumes;
use heiscc_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
    Obj,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Annulus,
    Sphere,
    Ball,
}

#[derive(Parser, Debug)]
#[command(name = "heiscc", version, about = "Exact polygonal CC metrics on the Heisenberg group")]
struct Cli {
    /// Generating-set JSON: {"generators": [[x, y, w], ...], "symmetrize": bool}, w = 2z.
    #[arg(long, global = true)]
    gens: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Byte budget for breadth-first balls.
    #[arg(long, global = true, env = "HEISCC_MEM_BUDGET")]
    mem_budget: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Unit-ball atlas, isoperimetrix and exact volumes.
    Shape {
        /// Unit-sphere mesh with this many subdivisions per panel.
        #[arg(long)]
        mesh: Option<usize>,
        /// Where to write the OBJ mesh (stdout with --format obj).
        #[arg(long)]
        obj: Option<PathBuf>,
    },
    /// CC distance and geodesic family of (x, y, w/2).
    #[command(allow_negative_numbers = true)]
    Dist { x: i64, y: i64, w: i64 },
    /// Breadth-first word ball and sphere sizes.
    Bfs {
        #[arg(long)]
        radius: u32,
        /// Binary dump of the ball.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lattice counts against volume predictions.
    Count {
        #[arg(long, value_enum, default_value = "annulus")]
        mode: Mode,
        #[arg(long)]
        n_max: i64,
        #[arg(long, default_value_t = 1)]
        step: i64,
    },
    /// Word-sphere sector shares against cone-measure shares.
    Measure {
        #[arg(long)]
        n: u32,
        /// 2N (vertex rays) or 4N (vertex and edge-midpoint rays) for a 2N-gon.
        #[arg(long)]
        sectors: Option<usize>,
    },
    /// Invariant suites; exits 1 when a required check fails.
    Verify {
        #[arg(long, default_value_t = 16)]
        radius: u32,
    },
}

enum Failure {
    Core(Error),
    Usage(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Run {
    gens: GenSet,
    format: Format,
    seed: u64,
    budget: u64,
    exec: Execution,
}

impl Run {
    fn emit(&self, json: Value, csv: impl FnOnce() -> String, text: impl FnOnce() -> String) -> Outcome {
        let out = match self.format {
            Format::Json => serde_json::to_string_pretty(&json).expect("serializable") + "\n",
            Format::Csv => csv(),
            Format::Text | Format::Obj => text(),
        };
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(out.as_bytes())?;
        Ok(())
    }
}

fn r(v: &Rational) -> String {
    rat_to_string(v)
}

fn shape(run: &Run, mesh: Option<usize>, obj: Option<PathBuf>) -> Outcome {
    let atlas = run.gens.atlas();
    if run.format == Format::Obj {
        let m = sphere_mesh(atlas, mesh.unwrap_or(4));
        m.write_obj(BufWriter::new(std::io::stdout().lock()), run.seed)?;
        return Ok(());
    }
    if let Some(k) = mesh {
        let path = obj.ok_or_else(|| Failure::Usage("--mesh needs --obj PATH unless --format obj".into()))?;
        sphere_mesh(atlas, k).write_obj(BufWriter::new(File::create(path)?), run.seed)?;
    }
    let vols = ball_volumes(atlas);
    let three = vols.by_combinatorics(atlas, 3);
    let four = vols.by_combinatorics(atlas, 4);
    let json = json!({
        "seed": run.seed,
        "atlas": atlas.to_json(),
        "volumes": vols.to_json(),
        "three_sided": r(&three),
        "four_sided": r(&four),
    });
    run.emit(
        json,
        || {
            let mut s = format!("# seed={}\ni,j,sides,volume\n", run.seed);
            for q in &atlas.quads {
                s += &format!("{},{},{},{}\n", q.i + 1, q.j + 1, q.sides, r(&vols.per_quad[&q.id()]));
            }
            s
        },
        || {
            let verts: Vec<String> = atlas
                .l
                .vertices()
                .iter()
                .map(|v| format!("({}, {})", r(&v.x), r(&v.y)))
                .collect();
            let mut s = format!("seed: {}\n", run.seed);
            s += &format!("unit ball vertices: {}\n", verts.join(" "));
            s += &format!("panels: {}\n", atlas.quads.len());
            s += &format!("largest height: {}\n", r(&atlas.a_max));
            s += &format!("V = {}\nV_reg = {}\nV_uns = {}\n", r(&vols.total), r(&vols.regular), r(&vols.unstable));
            s += &format!("3-sided panels: {}\n4-sided panels: {}\n", r(&three), r(&four));
            s += &format!("unique-geodesic probability: {}\n", r(&vols.unique_fraction()));
            s
        },
    )
}

fn dist(run: &Run, x: i64, y: i64, w: i64) -> Outcome {
    let atlas = run.gens.atlas();
    let p = CCPoint::from_doubled(x, y, w);
    let d = cc_distance(atlas, &p)?;
    let family = geodesics(atlas, &p)?;
    let word = (run.gens.is_standard() && HeisPoint::new(x, y, w).is_valid())
        .then(|| word_length_std(HeisPoint::new(x, y, w), atlas));
    let segments: Vec<Value> = family
        .representative
        .segments
        .iter()
        .map(|s| json!({"direction": [r(&s.direction.x), r(&s.direction.y)], "length": r(&s.length)}))
        .collect();
    let json = json!({
        "seed": run.seed,
        "point": {"x": x, "y": y, "w": w},
        "distance": d.to_string(),
        "distance_f64": d.to_f64(),
        "kind": family.kind.to_string(),
        "scale": family.scale.to_string(),
        "representative": segments,
        "quad": family.quad.map(|(i, j)| [i + 1, j + 1]),
        "area_range": family.area_range.as_ref().map(|(a, b)| [r(a), r(b)]),
        "word_length": word,
    });
    run.emit(
        json,
        || {
            format!(
                "# seed={}\nx,y,w,distance,distance_f64,kind\n{x},{y},{w},{d},{:.17e},{}\n",
                run.seed,
                d.to_f64(),
                family.kind
            )
        },
        || {
            let mut s = format!("seed: {}\npoint: {p}\ndistance: {d} ≈ {:.12}\nfamily: {}\n", run.seed, d.to_f64(), family.kind);
            s += "representative:";
            for seg in &family.representative.segments {
                s += &format!(" {}·({}, {})", r(&seg.length), r(&seg.direction.x), r(&seg.direction.y));
            }
            s += &format!("\nscale: {}\n", family.scale);
            if let Some((i, j)) = family.quad {
                s += &format!("panel: ({}, {})\n", i + 1, j + 1);
            }
            if let Some((a, b)) = &family.area_range {
                s += &format!("area range: [{}, {}]\n", r(a), r(b));
            }
            if let Some(n) = word {
                s += &format!("word length: {n}\n");
            }
            s
        },
    )
}

fn bfs(run: &Run, radius: u32, out: Option<PathBuf>) -> Outcome {
    let ball = bfs_ball(&run.gens, radius, run.budget, run.exec)?;
    if let Some(path) = out {
        ball.write_to(BufWriter::new(File::create(path)?))?;
    }
    let mut cumulative = 0u64;
    let rows: Vec<(u32, u64, u64, f64)> = ball
        .sphere_sizes
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            cumulative += s;
            (k as u32, s, cumulative, run.gens.predicted_ball_size(k as u32))
        })
        .collect();
    let json = json!({
        "seed": run.seed,
        "radius": radius,
        "size": ball.len(),
        "memory_estimate": estimate_ball_bytes(&run.gens, radius),
        "rows": rows.iter().map(|(k, s, b, p)| json!({"k": k, "sphere": s, "ball": b, "predicted_ball": p})).collect::<Vec<_>>(),
    });
    run.emit(
        json,
        || {
            let mut s = format!("# seed={}\nk,sphere,ball,predicted_ball\n", run.seed);
            for (k, sp, b, p) in &rows {
                s += &format!("{k},{sp},{b},{p:.3}\n");
            }
            s
        },
        || {
            let mut s = format!("seed: {}\n{:>5} {:>12} {:>14} {:>16}\n", run.seed, "k", "|S_k|", "|B_k|", "V·k⁴");
            for (k, sp, b, p) in &rows {
                s += &format!("{k:>5} {sp:>12} {b:>14} {p:>16.1}\n");
            }
            s
        },
    )
}

fn table_text(t: &CensusTable, seed: u64) -> String {
    let mut s = format!(
        "seed: {seed}\nmode: {}\nregion: {}\ncone volume: {}\n{:>6} {:>14} {:>18} {:>12} {:>14} {:>12}\n",
        t.mode.name(),
        t.region,
        r(&t.cone_volume),
        "n",
        "count",
        "prediction",
        "ratio",
        "residual",
        "residual/n²"
    );
    for row in &t.rows {
        s += &format!(
            "{:>6} {:>14} {:>18.1} {:>12.8} {:>14.1} {:>12.6}\n",
            row.n,
            row.count,
            heiscc_core::numbers::rat_to_f64(&row.prediction),
            row.ratio,
            row.residual,
            row.residual / (row.n * row.n) as f64
        );
    }
    s
}

fn count(run: &Run, mode: Mode, n_max: i64, step: i64) -> Outcome {
    if n_max < 1 || step < 1 {
        return Err(Failure::Usage("--n-max and --step must be positive".into()));
    }
    let ns: Vec<i64> = (1..=n_max / step).map(|k| k * step).collect();
    let atlas = run.gens.atlas();
    let table = match mode {
        Mode::Annulus => convergence_table(CountMode::Annulus, atlas, &ns, &Region::Full, run.exec)?,
        Mode::Ball => convergence_table(CountMode::Ball, atlas, &ns, &Region::Full, run.exec)?,
        Mode::Sphere if run.gens.is_standard() => {
            convergence_table(CountMode::Sphere, atlas, &ns, &Region::Full, run.exec)?
        }
        Mode::Sphere => {
            let ball = bfs_ball(&run.gens, n_max as u32, run.budget, run.exec)?;
            sphere_table_from_ball(atlas, &ball, &ns, &Region::Full, run.exec)?
        }
    };
    run.emit(table.to_json(run.seed), || table.to_csv(run.seed), || table_text(&table, run.seed))
}

fn measure_text(m: &MeasureReport, seed: u64) -> String {
    let mut s = format!(
        "seed: {seed}\nn: {}\n|S_n|: {}\n|S_n|/n³: {:.6}\nmax deviation: {:.8}\n",
        m.n, m.sphere_size, m.leading_constant, m.max_deviation
    );
    for (k, sec) in m.sectors.iter().enumerate() {
        s += &format!(
            "sector {:>2}: count {:>10}  share {:.8}  cone share {} ≈ {:.8}\n",
            k + 1,
            sec.count,
            sec.share,
            r(&sec.volume_share),
            heiscc_core::numbers::rat_to_f64(&sec.volume_share)
        );
    }
    s
}

fn measure(run: &Run, n: u32, sectors: Option<usize>) -> Outcome {
    let atlas = run.gens.atlas();
    let corners = atlas.l.len();
    let parts = match sectors.unwrap_or(2 * corners) {
        k if k == corners => vertex_partition(atlas),
        k if k == 2 * corners => symmetric_partition(atlas),
        k => {
            return Err(Failure::Usage(format!(
                "--sectors must be {corners} or {} for this generating set, got {k}",
                2 * corners
            )))
        }
    };
    let report = if run.gens.is_standard() {
        measure_report(atlas, n as i64, &parts, run.exec)?
    } else {
        let ball = bfs_ball(&run.gens, n, run.budget, run.exec)?;
        measure_report_from_ball(atlas, &ball, n, &parts)?
    };
    run.emit(report.to_json(run.seed), || report.to_csv(run.seed), || measure_text(&report, run.seed))
}

fn verify(run: &Run, radius: u32) -> Outcome {
    let checks = verify_all(&run.gens, radius, run.seed, run.budget, run.exec)?;
    let passed = checks.iter().all(|c| c.passed() || !c.required);
    let json = json!({
        "seed": run.seed,
        "radius": radius,
        "passed": passed,
        "checks": checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
    });
    let status = |c: &heiscc_core::verify::CheckOutcome| match (c.passed(), c.required) {
        (true, _) => "PASS",
        (false, true) => "FAIL",
        (false, false) => "INFO",
    };
    run.emit(
        json,
        || {
            let mut s = format!("# seed={} radius={radius}\ncheck,status,cases,failures\n", run.seed);
            for c in &checks {
                s += &format!("{},{},{},{}\n", c.name, status(c), c.cases, c.failures);
            }
            s
        },
        || {
            let mut s = format!("seed: {}\nradius: {radius}\n", run.seed);
            for c in &checks {
                s += &format!("{} {} ({} cases", status(c), c.name, c.cases);
                if c.failures > 0 {
                    s += &format!(", {} failures; first: {}", c.failures, c.detail);
                }
                s += ")\n";
            }
            s += if passed { "PASS\n" } else { "FAIL\n" };
            s
        },
    )?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MemoryBudgetExceeded { .. } => 3,
        Error::AtlasInconsistency(_) | Error::ConsistencyError(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = match cli.threads {
        Some(0) => {
            eprintln!("heiscc: --threads must be at least 1");
            return ExitCode::from(2);
        }
        Some(1) => Execution::Sequential,
        Some(k) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
                eprintln!("heiscc: {e}");
                return ExitCode::from(1);
            }
            Execution::available()
        }
        None => Execution::available(),
    };
    let Some(path) = cli.gens.as_ref() else {
        eprintln!("heiscc: --gens PATH is required");
        return ExitCode::from(2);
    };
    let gens = match std::fs::read_to_string(path).map_err(Error::from).and_then(|t| GenSet::from_json(&t)) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("heiscc: {}: {e}", path.display());
            return ExitCode::from(exit_code(&e));
        }
    };
    let run = Run {
        gens,
        format: cli.format,
        seed: cli.seed,
        budget: cli.mem_budget.unwrap_or(DEFAULT_MEM_BUDGET),
        exec,
    };
    if run.format == Format::Obj && !matches!(cli.command, Command::Shape { .. }) {
        eprintln!("heiscc: --format obj is only available for `shape`");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Shape { mesh, obj } => shape(&run, mesh, obj),
        Command::Dist { x, y, w } => dist(&run, x, y, w),
        Command::Bfs { radius, out } => bfs(&run, radius, out),
        Command::Count { mode, n_max, step } => count(&run, mode, n_max, step),
        Command::Measure { n, sectors } => measure(&run, n, sectors),
        Command::Verify { radius } => verify(&run, radius),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("heiscc: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Usage(m)) => {
            eprintln!("heiscc: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Checks) => ExitCode::from(1),
    }
}
