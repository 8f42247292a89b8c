//! Triangle mesh of the unit CC sphere: the graphs `z = ±A` over every quad,
//! and the vertical side panels over the edges of `L` between the parabolas
//! `z = ±A`.
//!
//! Vertices are exact rationals, deduplicated exactly, and rounded only when
//! written out.

use std::collections::HashMap;
use std::io::Write;

use num::One;

use crate::atlas::PanelAtlas;
use crate::error::Result;
use crate::geometry::Vec2;
use crate::numbers::{int, rat, rat_to_f64, Rational};

#[derive(Clone, Debug, Default)]
pub struct Mesh {
    pub vertices: Vec<[Rational; 3]>,
    /// Named face groups; faces index into `vertices`.
    pub groups: Vec<(String, Vec<[usize; 3]>)>,
    index: HashMap<[Rational; 3], usize>,
}

impl Mesh {
    fn vertex(&mut self, p: [Rational; 3]) -> usize {
        if let Some(&k) = self.index.get(&p) {
            return k;
        }
        let k = self.vertices.len();
        self.index.insert(p.clone(), k);
        self.vertices.push(p);
        k
    }

    /// Adds a grid of `rows × cols` vertices as triangle pairs; triangles that
    /// collapse after deduplication are dropped.
    fn grid(&mut self, name: String, points: Vec<Vec<[Rational; 3]>>, flip: bool) {
        let ids: Vec<Vec<usize>> = points
            .into_iter()
            .map(|row| row.into_iter().map(|p| self.vertex(p)).collect())
            .collect();
        let mut faces = Vec::new();
        for r in 0..ids.len() - 1 {
            for c in 0..ids[r].len() - 1 {
                let (a, b, d, e) = (ids[r][c], ids[r][c + 1], ids[r + 1][c + 1], ids[r + 1][c]);
                for mut t in [[a, b, d], [a, d, e]] {
                    if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                        continue;
                    }
                    if flip {
                        t.swap(1, 2);
                    }
                    faces.push(t);
                }
            }
        }
        self.groups.push((name, faces));
    }

    pub fn face_count(&self) -> usize {
        self.groups.iter().map(|g| g.1.len()).sum()
    }

    /// Wavefront OBJ with 17 significant digits per coordinate.
    pub fn write_obj<W: Write>(&self, mut out: W, seed: u64) -> Result<()> {
        writeln!(out, "# heiscc unit sphere seed={seed}")?;
        for v in &self.vertices {
            writeln!(
                out,
                "v {:.16e} {:.16e} {:.16e}",
                rat_to_f64(&v[0]),
                rat_to_f64(&v[1]),
                rat_to_f64(&v[2])
            )?;
        }
        for (name, faces) in &self.groups {
            writeln!(out, "g {name}")?;
            for f in faces {
                writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
            }
        }
        Ok(())
    }

    /// Whether reflecting `z` maps the vertex set onto itself.
    pub fn is_z_symmetric(&self) -> bool {
        self.vertices
            .iter()
            .all(|[x, y, z]| self.index.contains_key(&[x.clone(), y.clone(), -z]))
    }
}

fn bilinear(c: &[Vec2; 4], u: &Rational, v: &Rational) -> Vec2 {
    let one = Rational::one();
    let bottom = &c[0].scale(&(&one - u)) + &c[1].scale(u);
    let top = &c[3].scale(&(&one - u)) + &c[2].scale(u);
    &bottom.scale(&(&one - v)) + &top.scale(v)
}

/// Mesh with a `k × k` grid per panel and side panels split into
/// `max(k, 2)` strips each way.
pub fn sphere_mesh(atlas: &PanelAtlas, subdivisions: usize) -> Mesh {
    let k = subdivisions.max(1);
    let mut mesh = Mesh::default();
    for q in &atlas.quads {
        let v = &q.vertices;
        let corners = [v[0].clone(), v[1].clone(), v[2].clone(), v[v.len() - 1].clone()];
        for (sign, tag) in [(int(1), "plus"), (int(-1), "minus")] {
            let points = (0..=k)
                .map(|r| {
                    (0..=k)
                        .map(|c| {
                            let p = bilinear(&corners, &rat(c as i64, k as i64), &rat(r as i64, k as i64));
                            let z = &sign * q.poly.eval(&p);
                            [p.x, p.y, z]
                        })
                        .collect()
                })
                .collect();
            mesh.grid(format!("panel_{}_{}_{}", q.i + 1, q.j + 1, tag), points, tag == "minus");
        }
    }
    let m = k.max(2) as i64;
    for e in &atlas.edges {
        let d = &e.end - &e.start;
        let points = (0..=m)
            .map(|r| {
                let h = int(2 * r - m) / int(m);
                (0..=m)
                    .map(|c| {
                        let a = rat(c, m);
                        let p = &e.start + &d.scale(&a);
                        let z = &h * e.balayage_at(&a);
                        [p.x, p.y, z]
                    })
                    .collect()
            })
            .collect();
        mesh.grid(format!("side_{}", e.k + 1), points, false);
    }
    mesh
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GenSet;

    #[test]
    fn square_structure() {
        let g = GenSet::standard();
        let m = sphere_mesh(g.atlas(), 1);
        let panels = m.groups.iter().filter(|g| g.0.starts_with("panel_")).count();
        let sides = m.groups.iter().filter(|g| g.0.starts_with("side_")).count();
        assert_eq!((panels, sides), (16, 4));
        assert!(m.is_z_symmetric());
        let hex = sphere_mesh(GenSet::hexagonal().atlas(), 3);
        let plus = hex.groups.iter().filter(|g| g.0.ends_with("_plus")).count();
        assert_eq!(plus, 24);
        assert!(hex.is_z_symmetric());
    }

    #[test]
    fn obj_output() {
        let g = GenSet::standard();
        let m = sphere_mesh(g.atlas(), 2);
        let mut buf = Vec::new();
        m.write_obj(&mut buf, 9).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# heiscc unit sphere seed=9"));
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), m.vertices.len());
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), m.face_count());
        assert!(text.contains("\ng side_1\n"));
    }
}
