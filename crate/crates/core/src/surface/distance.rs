// Copyright 2026 The mmsurf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use rayon::prelude::*;

use super::mesh::{dot, sub, TriangleMesh};
use crate::error::{Error, Result};
use crate::Vec3;

/// Squared distance from `p` to the triangle `abc`.
pub fn point_triangle_distance2(p: Vec3, [a, b, c]: [Vec3; 3]) -> f64 {
    let closest = closest_point(p, a, b, c);
    let d = sub(p, closest);
    dot(d, d)
}

fn lerp(a: Vec3, d: Vec3, t: f64) -> Vec3 {
    [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]]
}

// Region tests over the triangle's Voronoi features.
fn closest_point(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return lerp(a, ab, d1 / (d1 - d3));
    }
    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return lerp(a, ac, d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return lerp(b, sub(c, b), (d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    [
        a[0] + ab[0] * v + ac[0] * w,
        a[1] + ab[1] * v + ac[1] * w,
        a[2] + ab[2] * v + ac[2] * w,
    ]
}

/// Uniform bucket grid over a mesh for nearest-triangle queries.
pub struct TriangleLocator<'a> {
    mesh: &'a TriangleMesh,
    origin: Vec3,
    cell: f64,
    dims: [usize; 3],
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl<'a> TriangleLocator<'a> {
    pub fn new(mesh: &'a TriangleMesh) -> Result<Self> {
        if mesh.is_empty() {
            return Err(Error::Domain("distance query against an empty mesh".into()));
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for tri in &mesh.triangles {
            for &v in tri {
                let p = mesh.vertices[v as usize];
                for a in 0..3 {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
        }
        let extent: Vec3 = std::array::from_fn(|a| (hi[a] - lo[a]).max(1e-9));
        let volume = extent[0] * extent[1] * extent[2];
        let target = (mesh.triangles.len() as f64 / 2.0).max(1.0);
        let cell = (volume / target).cbrt().max(extent.iter().cloned().fold(0.0, f64::max) / 256.0);
        let dims: [usize; 3] = std::array::from_fn(|a| ((extent[a] / cell).floor() as usize + 1).min(1024));
        let n_cells = dims[0] * dims[1] * dims[2];
        let locate = |p: f64, a: usize| (((p - lo[a]) / cell).floor().max(0.0) as usize).min(dims[a] - 1);

        let ranges: Vec<[[usize; 2]; 3]> = (0..mesh.triangles.len())
            .map(|t| {
                let c = mesh.corners(t);
                std::array::from_fn(|a| {
                    let min = c.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
                    let max = c.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
                    [locate(min, a), locate(max, a)]
                })
            })
            .collect();
        let mut counts = vec![0u32; n_cells + 1];
        let for_cells = |r: &[[usize; 2]; 3], f: &mut dyn FnMut(usize)| {
            for k in r[2][0]..=r[2][1] {
                for j in r[1][0]..=r[1][1] {
                    for i in r[0][0]..=r[0][1] {
                        f(i + dims[0] * (j + dims[1] * k));
                    }
                }
            }
        };
        for r in &ranges {
            for_cells(r, &mut |c| counts[c + 1] += 1);
        }
        for c in 0..n_cells {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; counts[n_cells] as usize];
        for (t, r) in ranges.iter().enumerate() {
            for_cells(r, &mut |c| {
                items[fill[c] as usize] = t as u32;
                fill[c] += 1;
            });
        }
        Ok(Self {
            mesh,
            origin: lo,
            cell,
            dims,
            starts: counts,
            items,
        })
    }

    /// Distance from `p` to the nearest point on the mesh.
    pub fn distance(&self, p: Vec3) -> f64 {
        let home: [isize; 3] = std::array::from_fn(|a| {
            let c = ((p[a] - self.origin[a]) / self.cell).floor();
            c.clamp(0.0, (self.dims[a] - 1) as f64) as isize
        });
        let max_ring = *self.dims.iter().max().expect("three axes") as isize;
        let mut best = f64::INFINITY;
        let mut near: Vec<(f64, usize)> = Vec::new();
        for ring in 0..=max_ring {
            let lo: [isize; 3] = std::array::from_fn(|a| (home[a] - ring).max(0));
            let hi: [isize; 3] = std::array::from_fn(|a| (home[a] + ring).min(self.dims[a] as isize - 1));
            // Visit this ring's occupied cells nearest first so the running
            // best prunes the rest.
            near.clear();
            for k in lo[2]..=hi[2] {
                for j in lo[1]..=hi[1] {
                    let face = (k - home[2]).abs() == ring || (j - home[1]).abs() == ring;
                    let step = if face { 1 } else { (2 * ring).max(1) as usize };
                    for i in (home[0] - ring..=home[0] + ring).step_by(step) {
                        if i < lo[0] || i > hi[0] {
                            continue;
                        }
                        let id = i as usize + self.dims[0] * (j as usize + self.dims[1] * k as usize);
                        if self.starts[id] == self.starts[id + 1] {
                            continue;
                        }
                        let gap = self.cell_gap2(p, [i, j, k]);
                        if gap < best {
                            near.push((gap, id));
                        }
                    }
                }
            }
            near.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(gap, id) in &near {
                if gap >= best {
                    break;
                }
                for &t in &self.items[self.starts[id] as usize..self.starts[id + 1] as usize] {
                    best = best.min(point_triangle_distance2(p, self.mesh.corners(t as usize)));
                }
            }
            // Unvisited cells lie beyond one of the block's unclipped faces.
            let mut bound = f64::INFINITY;
            for a in 0..3 {
                if home[a] - ring > 0 {
                    bound = bound.min(p[a] - (self.origin[a] + (home[a] - ring) as f64 * self.cell));
                }
                if home[a] + ring < self.dims[a] as isize - 1 {
                    bound = bound.min(self.origin[a] + (home[a] + ring + 1) as f64 * self.cell - p[a]);
                }
            }
            if bound.is_infinite() || best <= bound * bound {
                break;
            }
        }
        best.sqrt()
    }

    /// Squared distance from `p` to the box of cell `c`.
    fn cell_gap2(&self, p: Vec3, c: [isize; 3]) -> f64 {
        let mut d2 = 0.0;
        for a in 0..3 {
            let lo = self.origin[a] + c[a] as f64 * self.cell;
            let d = (lo - p[a]).max(p[a] - lo - self.cell).max(0.0);
            d2 += d * d;
        }
        d2
    }
}

/// Points used to represent a mesh in distance estimates: every vertex
/// referenced by a triangle plus every triangle centroid.
pub fn sample_points(mesh: &TriangleMesh) -> Vec<Vec3> {
    let mut used = vec![false; mesh.vertices.len()];
    for tri in &mesh.triangles {
        for &v in tri {
            used[v as usize] = true;
        }
    }
    let mut pts: Vec<Vec3> = mesh
        .vertices
        .iter()
        .zip(&used)
        .filter(|(_, &u)| u)
        .map(|(v, _)| *v)
        .collect();
    pts.extend((0..mesh.triangles.len()).map(|t| {
        let [a, b, c] = mesh.corners(t);
        std::array::from_fn(|k| (a[k] + b[k] + c[k]) / 3.0)
    }));
    pts
}

fn one_sided(from: &TriangleMesh, to: &TriangleLocator<'_>) -> f64 {
    sample_points(from)
        .par_iter()
        .map(|&p| to.distance(p))
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff estimate between two meshes, sampled at vertices and
/// triangle centroids of each side against the exact triangles of the other.
pub fn mesh_distance(a: &TriangleMesh, b: &TriangleMesh) -> Result<f64> {
    let la = TriangleLocator::new(a)?;
    let lb = TriangleLocator::new(b)?;
    Ok(one_sided(a, &lb).max(one_sided(b, &la)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_regions() {
        let tri = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert_eq!(point_triangle_distance2([0.2, 0.2, 2.0], tri), 4.0);
        assert_eq!(point_triangle_distance2([-1.0, -1.0, 0.0], tri), 2.0);
        assert_eq!(point_triangle_distance2([0.5, -2.0, 0.0], tri), 4.0);
        assert!((point_triangle_distance2([1.0, 1.0, 0.0], tri) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_is_rejected() {
        let empty = TriangleMesh::default();
        assert!(matches!(mesh_distance(&empty, &empty), Err(Error::Domain(_))));
    }

    #[test]
    fn locator_matches_brute_force() {
        let mesh = TriangleMesh {
            vertices: (0..30)
                .map(|i| {
                    let f = i as f64;
                    [(f * 0.7).sin() * 3.0, (f * 1.3).cos() * 2.0, f * 0.1]
                })
                .collect(),
            triangles: (0..28).map(|i| [i, i + 1, i + 2]).collect(),
        };
        let loc = TriangleLocator::new(&mesh).unwrap();
        for q in 0..50 {
            let f = q as f64;
            let p = [(f * 0.37).cos() * 6.0, (f * 0.91).sin() * 5.0, f * 0.08 - 1.0];
            let brute = (0..mesh.triangles.len())
                .map(|t| point_triangle_distance2(p, mesh.corners(t)))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            assert_eq!(loc.distance(p), brute);
        }
    }
}
