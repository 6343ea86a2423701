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

//! Uniform Cartesian grids, sphere-union voxel masks and the initial solvent
//! density.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::molecule::{Aabb, Molecule};
use crate::Vec3;

/// Node `(i, j, k)` sits at `origin + (i·h_x, j·h_y, k·h_z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub origin: Vec3,
    pub spacing: Vec3,
    pub counts: [usize; 3],
}

impl GridSpec {
    pub fn new(origin: Vec3, spacing: Vec3, counts: [usize; 3]) -> Result<Self> {
        if spacing.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::Domain(format!("spacing must be positive, got {spacing:?}")));
        }
        if counts.iter().any(|&n| n < 2) {
            return Err(Error::Domain(format!("need at least 2 nodes per axis, got {counts:?}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Domain("grid origin is not finite".into()));
        }
        Ok(Self {
            origin,
            spacing,
            counts,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index, x fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.counts[0] * (j + self.counts[1] * k)
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        [
            self.origin[0] + i as f64 * self.spacing[0],
            self.origin[1] + j as f64 * self.spacing[1],
            self.origin[2] + k as f64 * self.spacing[2],
        ]
    }

    /// Inverse of [`GridSpec::index`].
    #[inline]
    pub fn coords(&self, index: usize) -> [usize; 3] {
        let nx = self.counts[0];
        let ny = self.counts[1];
        [index % nx, (index / nx) % ny, index / (nx * ny)]
    }

    /// Coordinate of the last node along each axis.
    pub fn upper(&self) -> Vec3 {
        let [nx, ny, nz] = self.counts;
        self.node(nx - 1, ny - 1, nz - 1)
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing[0].min(self.spacing[1]).min(self.spacing[2])
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing[0].max(self.spacing[1]).max(self.spacing[2])
    }

    /// Volume of the cell owned by one node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    /// True when the node lies on one of the six domain faces.
    #[inline]
    pub fn on_boundary(&self, i: usize, j: usize, k: usize) -> bool {
        let [nx, ny, nz] = self.counts;
        i == 0 || j == 0 || k == 0 || i + 1 == nx || j + 1 == ny || k + 1 == nz
    }
}

/// How finely to sample a box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Resolution {
    /// Node count per axis; spacing follows as extent / (count − 1).
    Counts([usize; 3]),
    /// Target spacing; the node count is rounded up so the grid covers the box.
    Spacing(f64),
}

pub fn build_grid(bbox: &Aabb, resolution: Resolution) -> Result<GridSpec> {
    let ext = bbox.extent();
    if ext.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::Domain(format!("degenerate box with extent {ext:?}")));
    }
    match resolution {
        Resolution::Counts(counts) => {
            if counts.iter().any(|&n| n < 2) {
                return Err(Error::Domain(format!(
                    "need at least 2 nodes per axis, got {counts:?}"
                )));
            }
            let spacing = [
                ext[0] / (counts[0] - 1) as f64,
                ext[1] / (counts[1] - 1) as f64,
                ext[2] / (counts[2] - 1) as f64,
            ];
            GridSpec::new(bbox.min, spacing, counts)
        }
        Resolution::Spacing(h) => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Domain(format!("spacing must be positive, got {h}")));
            }
            let count = |e: f64| ((e / h - 1e-9).ceil() as usize + 1).max(2);
            GridSpec::new(bbox.min, [h; 3], [count(ext[0]), count(ext[1]), count(ext[2])])
        }
    }
}

/// Dense node-centered scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid3 {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarGrid3 {
    pub fn filled(spec: GridSpec, value: f64) -> Self {
        Self {
            spec,
            values: vec![value; spec.len()],
        }
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                spec.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at node {pos}")));
        }
        Ok(Self { spec, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(spec: GridSpec, f: impl Fn(Vec3) -> f64 + Sync) -> Self {
        let mut values = vec![0.0; spec.len()];
        let plane = spec.counts[0] * spec.counts[1];
        values
            .par_chunks_mut(plane)
            .enumerate()
            .for_each(|(k, slab)| {
                for (n, v) in slab.iter_mut().enumerate() {
                    let i = n % spec.counts[0];
                    let j = n / spec.counts[0];
                    *v = f(spec.node(i, j, k));
                }
            });
        Self { spec, values }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.spec.index(i, j, k)]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Trilinear interpolation; points outside the grid are clamped onto it.
    pub fn sample(&self, p: Vec3) -> f64 {
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let n = self.spec.counts[a];
            let u = ((p[a] - self.spec.origin[a]) / self.spec.spacing[a]).clamp(0.0, (n - 1) as f64);
            let i = (u.floor() as usize).min(n - 2);
            base[a] = i;
            frac[a] = u - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..8 {
            let d = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
            let mut w = 1.0;
            for a in 0..3 {
                w *= if d[a] == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            acc += w * self.get(base[0] + d[0], base[1] + d[1], base[2] + d[2]);
        }
        acc
    }
}

/// One flag per node; `true` means inside the sphere union.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelMask {
    pub spec: GridSpec,
    pub bits: Vec<bool>,
}

impl VoxelMask {
    pub fn count_inside(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.bits[self.spec.index(i, j, k)]
    }
}

#[inline]
fn sphere_contains(node: Vec3, center: Vec3, reach: f64) -> bool {
    let dx = node[0] - center[0];
    let dy = node[1] - center[1];
    let dz = node[2] - center[2];
    dx * dx + dy * dy + dz * dz <= reach * reach
}

/// Atoms bucketed into cubic cells no smaller than the largest reach.
struct AtomBins {
    origin: Vec3,
    side: f64,
    dims: [usize; 3],
    start: Vec<usize>,
    members: Vec<usize>,
}

impl AtomBins {
    fn new(molecule: &Molecule, offset: f64) -> Option<Self> {
        let reach = molecule.max_radius()? + offset;
        let side = reach * (1.0 + 1e-9) + 1e-12;
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for atom in &molecule.atoms {
            for a in 0..3 {
                lo[a] = lo[a].min(atom.center[a]);
                hi[a] = hi[a].max(atom.center[a]);
            }
        }
        let dims = [0, 1, 2].map(|a| ((hi[a] - lo[a]) / side).floor() as usize + 1);
        let cell_of = |c: Vec3| {
            let ix = [0, 1, 2].map(|a| (((c[a] - lo[a]) / side).floor() as usize).min(dims[a] - 1));
            ix[0] + dims[0] * (ix[1] + dims[1] * ix[2])
        };
        let ncell = dims[0] * dims[1] * dims[2];
        let mut start = vec![0usize; ncell + 1];
        let cells: Vec<usize> = molecule.atoms.iter().map(|a| cell_of(a.center)).collect();
        for &c in &cells {
            start[c + 1] += 1;
        }
        for c in 0..ncell {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut members = vec![0usize; cells.len()];
        for (atom, &c) in cells.iter().enumerate() {
            members[fill[c]] = atom;
            fill[c] += 1;
        }
        Some(Self {
            origin: lo,
            side,
            dims,
            start,
            members,
        })
    }

    /// Calls `visit` with every atom in the 27 cells around `p`; stops early
    /// when `visit` returns true.
    fn any_near(&self, p: Vec3, mut visit: impl FnMut(usize) -> bool) -> bool {
        let mut range = [(0usize, 0usize); 3];
        for a in 0..3 {
            let c = ((p[a] - self.origin[a]) / self.side).floor();
            let lo = c - 1.0;
            let hi = c + 1.0;
            if hi < 0.0 || lo > (self.dims[a] - 1) as f64 {
                return false;
            }
            range[a] = (lo.max(0.0) as usize, (hi as usize).min(self.dims[a] - 1));
        }
        for cz in range[2].0..=range[2].1 {
            for cy in range[1].0..=range[1].1 {
                for cx in range[0].0..=range[0].1 {
                    let cell = cx + self.dims[0] * (cy + self.dims[1] * cz);
                    for &atom in &self.members[self.start[cell]..self.start[cell + 1]] {
                        if visit(atom) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Marks every node within `radius + radius_offset` of some atom center
/// (closed balls). Offset 0 gives the van der Waals volume, offset `r_p` the
/// solvent-accessible volume.
pub fn rasterize_spheres(molecule: &Molecule, radius_offset: f64, spec: &GridSpec) -> Result<VoxelMask> {
    if !(radius_offset >= 0.0 && radius_offset.is_finite()) {
        return Err(Error::Domain(format!(
            "radius offset must be >= 0, got {radius_offset}"
        )));
    }
    let mut bits = vec![false; spec.len()];
    let Some(bins) = AtomBins::new(molecule, radius_offset) else {
        return Ok(VoxelMask { spec: *spec, bits });
    };
    let atoms = &molecule.atoms;
    let plane = spec.counts[0] * spec.counts[1];
    bits.par_chunks_mut(plane).enumerate().for_each(|(k, slab)| {
        for (n, bit) in slab.iter_mut().enumerate() {
            let p = spec.node(n % spec.counts[0], n / spec.counts[0], k);
            *bit = bins.any_near(p, |i| {
                sphere_contains(p, atoms[i].center, atoms[i].radius + radius_offset)
            });
        }
    });
    Ok(VoxelMask { spec: *spec, bits })
}

/// Zero inside the solvent-accessible union, `rho0` everywhere else.
pub fn init_density(spec: &GridSpec, sas_mask: &VoxelMask, rho0: f64) -> Result<ScalarGrid3> {
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(Error::Domain(format!("bulk density must be positive, got {rho0}")));
    }
    if sas_mask.spec != *spec {
        return Err(Error::Shape("mask and grid specs differ".into()));
    }
    let values = sas_mask
        .bits
        .iter()
        .map(|&inside| if inside { 0.0 } else { rho0 })
        .collect();
    Ok(ScalarGrid3 {
        spec: *spec,
        values,
    })
}

/// Zeroes the density on every node of the excluded (van der Waals) volume.
pub fn clamp_excluded(mut density: ScalarGrid3, vdw_mask: &VoxelMask) -> Result<ScalarGrid3> {
    if vdw_mask.spec != density.spec {
        return Err(Error::Shape("mask and density specs differ".into()));
    }
    density
        .values
        .iter_mut()
        .zip(&vdw_mask.bits)
        .filter(|(_, &inside)| inside)
        .for_each(|(v, _)| *v = 0.0);
    Ok(density)
}

const DUMP_MAGIC: &str = "MMSGRID1";

/// Writes the raw grid dump: one text header line
/// `MMSGRID1 nx ny nz ox oy oz hx hy hz`, then little-endian f64 values in
/// x-fastest order.
pub fn write_grid_dump<W: Write>(grid: &ScalarGrid3, mut out: W) -> Result<()> {
    let s = &grid.spec;
    writeln!(
        out,
        "{DUMP_MAGIC} {} {} {} {} {} {} {} {} {}",
        s.counts[0],
        s.counts[1],
        s.counts[2],
        s.origin[0],
        s.origin[1],
        s.origin[2],
        s.spacing[0],
        s.spacing[1],
        s.spacing[2]
    )?;
    let mut buf = Vec::with_capacity(grid.values.len() * 8);
    for v in &grid.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_grid_dump<R: BufRead>(mut input: R) -> Result<ScalarGrid3> {
    let mut header = String::new();
    input.read_line(&mut header)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&DUMP_MAGIC) || fields.len() != 10 {
        return Err(Error::Parse {
            line: 1,
            message: "not an MMSGRID1 header".into(),
        });
    }
    let int = |t: &str| {
        t.parse::<usize>().map_err(|_| Error::Parse {
            line: 1,
            message: format!("bad count {t:?}"),
        })
    };
    let real = |t: &str| {
        t.parse::<f64>().map_err(|_| Error::Parse {
            line: 1,
            message: format!("bad number {t:?}"),
        })
    };
    let counts = [int(fields[1])?, int(fields[2])?, int(fields[3])?];
    let origin = [real(fields[4])?, real(fields[5])?, real(fields[6])?];
    let spacing = [real(fields[7])?, real(fields[8])?, real(fields[9])?];
    let spec = GridSpec::new(origin, spacing, counts)?;
    let mut bytes = vec![0u8; spec.len() * 8];
    input.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    ScalarGrid3::from_values(spec, values)
}
