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

use std::collections::{BTreeMap, HashMap};

use super::marching_cubes::{square_segments, SNAP};
use crate::error::{Error, Result};
use crate::grid::ScalarGrid3;
use crate::Axis;

/// One contour curve in slice-plane coordinates `(u, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    /// A closed polyline's last point connects back to its first; the first
    /// point is not repeated in `points`.
    pub closed: bool,
}

/// Level-set curves of a planar slice through a grid field. The in-plane
/// axes are `axis.plane()`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourSet {
    pub axis: Axis,
    pub coordinate: f64,
    pub level: f64,
    pub polylines: Vec<Polyline>,
}

impl ContourSet {
    pub fn point_count(&self) -> usize {
        self.polylines.iter().map(|p| p.points.len()).sum()
    }

    /// CSV with header `polyline_id,u,v`. Closed polylines repeat their
    /// first point at the end.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("polyline_id,u,v\n");
        for (id, line) in self.polylines.iter().enumerate() {
            let tail = if line.closed { line.points.first() } else { None };
            for p in line.points.iter().chain(tail) {
                out.push_str(&format!("{id},{},{}\n", p[0], p[1]));
            }
        }
        out
    }
}

/// Counts, origin, spacing and values (u fastest) of a sampled plane.
type Plane = ([usize; 2], [f64; 2], [f64; 2], Vec<f64>);

/// Field values on the plane `axis = coordinate`, linearly interpolated
/// between the two enclosing node layers.
fn slice_plane(grid: &ScalarGrid3, axis: Axis, coordinate: f64) -> Result<Plane> {
    let spec = &grid.spec;
    let a = axis.index();
    let (u, v) = axis.plane();
    let (u, v) = (u.index(), v.index());
    let n = spec.counts[a];
    let f = (coordinate - spec.origin[a]) / spec.spacing[a];
    let tol = 1e-9;
    if !f.is_finite() || f < -tol || f > (n - 1) as f64 + tol {
        return Err(Error::Domain(format!(
            "slice {axis}={coordinate} lies outside the grid [{}, {}]",
            spec.origin[a],
            spec.upper()[a]
        )));
    }
    let f = f.clamp(0.0, (n - 1) as f64);
    let k0 = (f.floor() as usize).min(n - 2);
    let frac = f - k0 as f64;
    let (nu, nv) = (spec.counts[u], spec.counts[v]);
    let mut values = Vec::with_capacity(nu * nv);
    let mut idx = [0usize; 3];
    for jv in 0..nv {
        for iu in 0..nu {
            idx[u] = iu;
            idx[v] = jv;
            idx[a] = k0;
            let lo = grid.get(idx[0], idx[1], idx[2]);
            let value = if frac == 0.0 {
                lo
            } else {
                idx[a] = k0 + 1;
                let hi = grid.get(idx[0], idx[1], idx[2]);
                lo + frac * (hi - lo)
            };
            values.push(value);
        }
    }
    Ok((
        [nu, nv],
        [spec.origin[u], spec.origin[v]],
        [spec.spacing[u], spec.spacing[v]],
        values,
    ))
}

/// Marching-squares contours of the slice `axis = coordinate` at `level`,
/// chained into polylines. Open polylines (ending on the slice border) come
/// first, then closed ones.
pub fn slice_contours(grid: &ScalarGrid3, axis: Axis, coordinate: f64, level: f64) -> Result<ContourSet> {
    let ([nu, nv], origin, spacing, values) = slice_plane(grid, axis, coordinate)?;
    let node = |i: usize, j: usize| i + nu * j;
    let pos = |n: usize| [origin[0] + (n % nu) as f64 * spacing[0], origin[1] + (n / nu) as f64 * spacing[1]];

    let mut points: HashMap<u64, [f64; 2]> = HashMap::new();
    let mut vertex = |from: usize, dir: usize| -> u64 {
        let to = from + if dir == 0 { 1 } else { nu };
        let t = (level - values[from]) / (values[to] - values[from]);
        let (key, p) = if t <= SNAP {
            (from as u64 * 3 + 2, pos(from))
        } else if t >= 1.0 - SNAP {
            (to as u64 * 3 + 2, pos(to))
        } else {
            let mut p = pos(from);
            p[dir] += t * spacing[dir];
            (from as u64 * 3 + dir as u64, p)
        };
        points.entry(key).or_insert(p);
        key
    };

    let mut next: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut incoming: HashMap<u64, usize> = HashMap::new();
    if level.is_finite() {
        for j in 0..nv - 1 {
            for i in 0..nu - 1 {
                let corners = [node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)];
                let w = corners.map(|c| values[c] - level);
                let below = corners.map(|c| values[c] < level);
                // Square edge k as (lower node, direction).
                let edges = [
                    (corners[0], 0),
                    (corners[1], 1),
                    (corners[3], 0),
                    (corners[0], 1),
                ];
                let mut segs = Vec::new();
                square_segments(w, below, |from, to| segs.push((edges[from], edges[to])));
                for ((fa, fd), (ta, td)) in segs {
                    let a = vertex(fa, fd);
                    let b = vertex(ta, td);
                    if a != b {
                        next.entry(a).or_default().push(b);
                        *incoming.entry(b).or_insert(0) += 1;
                    }
                }
            }
        }
    }

    let mut polylines = Vec::new();
    let starts: Vec<u64> = next
        .keys()
        .copied()
        .filter(|k| !incoming.contains_key(k))
        .collect();
    let follow = |start: u64, next: &mut BTreeMap<u64, Vec<u64>>| -> Polyline {
        let mut keys = vec![start];
        let mut cur = start;
        while let Some(list) = next.get_mut(&cur) {
            let n = list.remove(0);
            if list.is_empty() {
                next.remove(&cur);
            }
            cur = n;
            if cur == start {
                break;
            }
            keys.push(cur);
        }
        let closed = cur == start && keys.len() > 2;
        Polyline {
            points: keys.iter().map(|k| points[k]).collect(),
            closed,
        }
    };
    for s in starts {
        while next.contains_key(&s) {
            polylines.push(follow(s, &mut next));
        }
    }
    while let Some(&s) = next.keys().next() {
        polylines.push(follow(s, &mut next));
    }
    polylines.retain(|p| p.points.len() >= 2);
    Ok(ContourSet {
        axis,
        coordinate,
        level,
        polylines,
    })
}
