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

use super::mesh::TriangleMesh;
use crate::Vec3;

/// Point-in-solid test for a closed mesh by counting crossings of a ray
/// cast along +x. Triangles are bucketed by their yz footprint.
pub struct InsideTester<'a> {
    mesh: &'a TriangleMesh,
    lo: [f64; 2],
    cell: [f64; 2],
    dims: [usize; 2],
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl<'a> InsideTester<'a> {
    pub fn new(mesh: &'a TriangleMesh) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &mesh.vertices {
            for a in 0..2 {
                lo[a] = lo[a].min(v[a + 1]);
                hi[a] = hi[a].max(v[a + 1]);
            }
        }
        if mesh.vertices.is_empty() {
            lo = [0.0; 2];
            hi = [1.0; 2];
        }
        let side = ((mesh.triangles.len() as f64).sqrt().ceil() as usize).clamp(1, 512);
        let dims = [side, side];
        let cell: [f64; 2] = std::array::from_fn(|a| ((hi[a] - lo[a]) / side as f64).max(1e-12));
        let locate = |x: f64, a: usize| (((x - lo[a]) / cell[a]).floor().max(0.0) as usize).min(dims[a] - 1);
        let ranges: Vec<[[usize; 2]; 2]> = (0..mesh.triangles.len())
            .map(|t| {
                let c = mesh.corners(t);
                std::array::from_fn(|a| {
                    let min = c.iter().map(|p| p[a + 1]).fold(f64::INFINITY, f64::min);
                    let max = c.iter().map(|p| p[a + 1]).fold(f64::NEG_INFINITY, f64::max);
                    [locate(min, a), locate(max, a)]
                })
            })
            .collect();
        let n_cells = dims[0] * dims[1];
        let mut starts = vec![0u32; n_cells + 1];
        for r in &ranges {
            for j in r[1][0]..=r[1][1] {
                for i in r[0][0]..=r[0][1] {
                    starts[i + dims[0] * j + 1] += 1;
                }
            }
        }
        for c in 0..n_cells {
            starts[c + 1] += starts[c];
        }
        let mut fill = starts.clone();
        let mut items = vec![0u32; starts[n_cells] as usize];
        for (t, r) in ranges.iter().enumerate() {
            for j in r[1][0]..=r[1][1] {
                for i in r[0][0]..=r[0][1] {
                    let c = i + dims[0] * j;
                    items[fill[c] as usize] = t as u32;
                    fill[c] += 1;
                }
            }
        }
        Self {
            mesh,
            lo,
            cell,
            dims,
            starts,
            items,
        }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        if self.mesh.is_empty() {
            return false;
        }
        let (y, z) = (p[1], p[2]);
        let fy = (y - self.lo[0]) / self.cell[0];
        let fz = (z - self.lo[1]) / self.cell[1];
        if fy < 0.0 || fz < 0.0 || fy >= (self.dims[0] + 1) as f64 || fz >= (self.dims[1] + 1) as f64 {
            return false;
        }
        let i = (fy as usize).min(self.dims[0] - 1);
        let j = (fz as usize).min(self.dims[1] - 1);
        let c = i + self.dims[0] * j;
        let mut crossings = 0usize;
        for &t in &self.items[self.starts[c] as usize..self.starts[c + 1] as usize] {
            let [a, b, d] = self.mesh.corners(t as usize);
            // Signed areas in the yz plane. Exact zeros are resolved by
            // nudging the query point to (y + ε, z + ε²), which keeps shared
            // edges and vertices counted exactly once.
            let side = |u: Vec3, v: Vec3| {
                let w = (v[1] - u[1]) * (z - u[2]) - (v[2] - u[2]) * (y - u[1]);
                let up = if w != 0.0 {
                    w > 0.0
                } else if v[2] != u[2] {
                    v[2] < u[2]
                } else {
                    v[1] > u[1]
                };
                (w, up)
            };
            let ((w0, s0), (w1, s1), (w2, s2)) = (side(b, d), side(d, a), side(a, b));
            if !(s0 == s1 && s1 == s2) {
                continue;
            }
            let total = w0 + w1 + w2;
            if total == 0.0 {
                continue;
            }
            let x = (w0 * a[0] + w1 * b[0] + w2 * d[0]) / total;
            if x > p[0] {
                crossings += 1;
            }
        }
        crossings % 2 == 1
    }
}
