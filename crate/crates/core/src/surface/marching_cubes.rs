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

use std::collections::HashMap;

use super::mesh::TriangleMesh;
use crate::grid::ScalarGrid3;
use crate::Vec3;

/// Interpolation parameters this close to an edge end land on the node.
pub(crate) const SNAP: f64 = 1e-6;

/// Cube faces as corner lists, counter-clockwise seen from outside the
/// cube. Corner `c` sits at offset `(c & 1, (c >> 1) & 1, (c >> 2) & 1)`.
const FACES: [[usize; 4]; 6] = [
    [0, 4, 6, 2],
    [1, 3, 7, 5],
    [0, 1, 5, 4],
    [2, 6, 7, 3],
    [0, 2, 3, 1],
    [4, 5, 7, 6],
];

const NONE: usize = usize::MAX;

/// Local id of the cube edge joining two adjacent corners.
fn edge_slot(a: usize, b: usize) -> usize {
    a.min(b) * 3 + (a ^ b).trailing_zeros() as usize
}

/// Walks one square (cube face or slice cell) with corners in
/// counter-clockwise order and reports oriented segments as pairs of
/// square-edge indices `(from, to)`, where edge `k` joins corners `k` and
/// `k + 1`. Segments run from a below-to-above crossing to an
/// above-to-below crossing. Saddles use the asymptotic decider.
pub(crate) fn square_segments(w: [f64; 4], below: [bool; 4], mut emit: impl FnMut(usize, usize)) {
    let exits: Vec<usize> = (0..4).filter(|&k| below[k] && !below[(k + 1) % 4]).collect();
    match exits.len() {
        0 => {}
        1 => {
            let entry = (0..4)
                .find(|&k| !below[k] && below[(k + 1) % 4])
                .expect("one exit implies one entry");
            emit(exits[0], entry);
        }
        _ => {
            let (p, q, r, s) = if below[0] {
                (w[0], w[2], w[1], w[3])
            } else {
                (w[1], w[3], w[0], w[2])
            };
            let joined = p * q > r * s;
            for &k in &exits {
                let to = if joined { (k + 1) % 4 } else { (k + 3) % 4 };
                emit(k, to);
            }
        }
    }
}

struct VertexTable<'a> {
    grid: &'a ScalarGrid3,
    level: f64,
    ids: HashMap<u64, u32>,
    mesh: TriangleMesh,
}

impl VertexTable<'_> {
    /// Vertex on the grid edge from `node` one step along `axis`.
    fn edge_vertex(&mut self, node: usize, axis: usize) -> (u64, u32) {
        let spec = &self.grid.spec;
        let stride = [1, spec.counts[0], spec.counts[0] * spec.counts[1]][axis];
        let lo = self.grid.values[node];
        let hi = self.grid.values[node + stride];
        let t = (self.level - lo) / (hi - lo);
        let (key, pos) = if t <= SNAP {
            ((node as u64) * 4 + 3, self.node_pos(node))
        } else if t >= 1.0 - SNAP {
            ((node + stride) as u64 * 4 + 3, self.node_pos(node + stride))
        } else {
            let mut p = self.node_pos(node);
            p[axis] += t * spec.spacing[axis];
            ((node as u64) * 4 + axis as u64, p)
        };
        let next = self.mesh.vertices.len() as u32;
        let id = *self.ids.entry(key).or_insert(next);
        if id == next {
            self.mesh.vertices.push(pos);
        }
        (key, id)
    }

    fn node_pos(&self, node: usize) -> Vec3 {
        let [i, j, k] = self.grid.spec.coords(node);
        self.grid.spec.node(i, j, k)
    }
}

/// Triangulated level set `{ρ = level}` of a grid field, enclosing the
/// region where `ρ < level` with outward-facing triangles.
///
/// Each cube's surface patch is assembled from the contour segments on its
/// six faces, so neighbouring cubes agree on every shared face and the mesh
/// has no cracks. Vertices on shared grid edges are merged.
pub fn marching_cubes(grid: &ScalarGrid3, level: f64) -> TriangleMesh {
    let spec = grid.spec;
    let [nx, ny, nz] = spec.counts;
    let mut table = VertexTable {
        grid,
        level,
        ids: HashMap::new(),
        mesh: TriangleMesh::default(),
    };
    if !level.is_finite() {
        return table.mesh;
    }
    let offsets: [usize; 8] = std::array::from_fn(|c| spec.index(c & 1, (c >> 1) & 1, (c >> 2) & 1));
    let mut keys = Vec::with_capacity(12);
    let mut ids = Vec::with_capacity(12);
    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let base = spec.index(i, j, k);
                let v: [f64; 8] = std::array::from_fn(|c| grid.values[base + offsets[c]]);
                let below: [bool; 8] = std::array::from_fn(|c| v[c] < level);
                let n_below = below.iter().filter(|&&b| b).count();
                if n_below == 0 || n_below == 8 {
                    continue;
                }
                let mut next = [NONE; 24];
                for face in &FACES {
                    let w = face.map(|c| v[c] - level);
                    let b = face.map(|c| below[c]);
                    square_segments(w, b, |from, to| {
                        let e_from = edge_slot(face[from], face[(from + 1) % 4]);
                        let e_to = edge_slot(face[to], face[(to + 1) % 4]);
                        next[e_from] = e_to;
                    });
                }
                let mut seen = [false; 24];
                for start in 0..24 {
                    if next[start] == NONE || seen[start] {
                        continue;
                    }
                    keys.clear();
                    ids.clear();
                    let mut e = start;
                    while !seen[e] {
                        seen[e] = true;
                        let corner = e / 3;
                        let node = base + offsets[corner];
                        let (key, id) = table.edge_vertex(node, e % 3);
                        keys.push(key);
                        ids.push(id);
                        e = next[e];
                    }
                    let first = (0..keys.len()).min_by_key(|&m| keys[m]).expect("loop has vertices");
                    let n = ids.len();
                    for m in 1..n.saturating_sub(1) {
                        let tri = [ids[first], ids[(first + m) % n], ids[(first + m + 1) % n]];
                        if tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2] {
                            table.mesh.triangles.push([tri[0], tri[2], tri[1]]);
                        }
                    }
                }
            }
        }
    }
    table.mesh
}
