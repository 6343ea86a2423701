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

//! Browser bindings for the surface pipeline: kernel shapes, the radial
//! density around one atom, and density slices with their contours.

use mmsurf::fd::radial_solve;
use mmsurf::grid::{clamp_excluded, ScalarGrid3};
use mmsurf::lsek::{kernel_weights, KernelParams};
use mmsurf::molecule::{parse_xyzr, Atom, Molecule};
use mmsurf::pipeline::{kernel_for, level_context, prepare, Config, GridSize};
use mmsurf::surface::{resolve_level, slice_contours, SurfaceKind, SurfaceRequest};
use mmsurf::Axis;
use wasm_bindgen::prelude::*;

const CYCLOHEXANE: &str = include_str!("../../../data/cyclohexane.xyzr");

fn js(e: mmsurf::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn builtin(name: &str) -> mmsurf::Result<Molecule> {
    match name {
        "cyclohexane" => parse_xyzr(CYCLOHEXANE),
        "atom" => Ok(Molecule::new("atom", vec![Atom::new([0.0; 3], 1.7)])),
        other => Err(mmsurf::Error::Config(format!("unknown molecule {other:?}"))),
    }
}

/// Kernel weights at unit spacing after `time` grid-time units.
pub fn kernel_taps(time: f64, half_width: usize) -> mmsurf::Result<Vec<f64>> {
    let params = KernelParams {
        half_width,
        ..KernelParams::standard(1.0, 1.0, time)
    };
    Ok(kernel_weights(&params)?.taps().to_vec())
}

#[wasm_bindgen]
pub fn kernel_curve(time: f64, half_width: usize) -> Result<Vec<f64>, JsError> {
    kernel_taps(time, half_width).map_err(js)
}

/// Interleaved `r, ρ` pairs of the radial profile around one atom, with
/// bulk density 100 and `spread` in Å².
pub fn radial_pairs(atom_radius: f64, probe_radius: f64, spread: f64) -> mmsurf::Result<Vec<f64>> {
    let r_max = atom_radius + probe_radius + 4.0 * (2.0 * spread).sqrt() + 2.0;
    let profile = radial_solve(atom_radius, probe_radius, 100.0, spread, 0.01, r_max)?;
    Ok(profile
        .radii
        .iter()
        .zip(&profile.values)
        .flat_map(|(&r, &v)| [r, v])
        .collect())
}

#[wasm_bindgen]
pub fn radial_curve(atom_radius: f64, probe_radius: f64, spread: f64) -> Result<Vec<f64>, JsError> {
    radial_pairs(atom_radius, probe_radius, spread).map_err(js)
}

fn parse_axis(axis: &str) -> mmsurf::Result<Axis> {
    axis.parse()
}

/// An evolved density held for repeated slicing.
#[wasm_bindgen]
pub struct SliceView {
    density: ScalarGrid3,
    ses_level: f64,
    midway_level: f64,
}

impl SliceView {
    pub fn build(molecule: &str, points: usize, time: f64) -> mmsurf::Result<Self> {
        let mol = builtin(molecule)?;
        let config = Config {
            grid: GridSize::Points(points),
            time,
            ..Config::default()
        };
        let prep = prepare(&mol, &config)?;
        // The untimed path: there is no clock on the browser target.
        let kernel = kernel_for(&prep.spec, &config, prep.rate, time)?;
        let density = clamp_excluded(kernel.apply(&prep.initial, config.rho0)?, &prep.vdw)?;
        let ctx = level_context(&prep, &config);
        Ok(Self {
            density,
            ses_level: resolve_level(&SurfaceRequest::new(SurfaceKind::Ses), &ctx)?,
            midway_level: resolve_level(&SurfaceRequest::new(SurfaceKind::Midway), &ctx)?,
        })
    }

    pub fn raster(&self, axis: &str, coordinate: f64, width: usize) -> mmsurf::Result<Vec<f64>> {
        let axis = parse_axis(axis)?;
        let (u, v) = axis.plane();
        let spec = self.density.spec;
        let (lo, hi) = (spec.origin, spec.upper());
        let step = |a: Axis, i: usize| {
            lo[a.index()] + (hi[a.index()] - lo[a.index()]) * i as f64 / (width.max(2) - 1) as f64
        };
        let mut out = Vec::with_capacity(width * width);
        for j in 0..width {
            for i in 0..width {
                let mut p = [0.0; 3];
                p[axis.index()] = coordinate;
                p[u.index()] = step(u, i);
                p[v.index()] = step(v, j);
                out.push(self.density.sample(p));
            }
        }
        Ok(out)
    }

    /// Contour points as `u, v` pairs; polylines are separated by a NaN pair.
    pub fn contour_points(&self, axis: &str, coordinate: f64, level: f64) -> mmsurf::Result<Vec<f64>> {
        let set = slice_contours(&self.density, parse_axis(axis)?, coordinate, level)?;
        let mut out = Vec::with_capacity(2 * set.point_count() + 2 * set.polylines.len());
        for line in &set.polylines {
            for p in &line.points {
                out.extend_from_slice(p);
            }
            if line.closed {
                out.extend_from_slice(&line.points[0]);
            }
            out.extend_from_slice(&[f64::NAN, f64::NAN]);
        }
        Ok(out)
    }
}

#[wasm_bindgen]
impl SliceView {
    #[wasm_bindgen(constructor)]
    pub fn new(molecule: &str, points: usize, time: f64) -> Result<SliceView, JsError> {
        Self::build(molecule, points, time).map_err(js)
    }

    /// `[x0, y0, z0, x1, y1, z1]` of the grid box in Å.
    pub fn bounds(&self) -> Vec<f64> {
        let spec = self.density.spec;
        spec.origin.into_iter().chain(spec.upper()).collect()
    }

    pub fn spacing(&self) -> f64 {
        self.density.spec.spacing[0]
    }

    #[wasm_bindgen(getter)]
    pub fn ses_level(&self) -> f64 {
        self.ses_level
    }

    #[wasm_bindgen(getter)]
    pub fn midway_level(&self) -> f64 {
        self.midway_level
    }

    /// Density sampled on a `width × width` raster across the slice plane,
    /// rows along the second in-plane axis.
    pub fn field(&self, axis: &str, coordinate: f64, width: usize) -> Result<Vec<f64>, JsError> {
        self.raster(axis, coordinate, width).map_err(js)
    }

    pub fn contours(&self, axis: &str, coordinate: f64, level: f64) -> Result<Vec<f64>, JsError> {
        self.contour_points(axis, coordinate, level).map_err(js)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_curve_is_symmetric_and_normalized() {
        let taps = kernel_taps(12.0, 32).unwrap();
        assert_eq!(taps.len(), 65);
        assert_eq!(taps[0], taps[64]);
        assert!((taps.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn radial_curve_rises_to_bulk() {
        let pairs = radial_pairs(1.7, 1.5, 0.5).unwrap();
        assert_eq!(pairs[0], 1.7);
        let values: Vec<f64> = pairs.chunks(2).map(|p| p[1]).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*values.last().unwrap(), 100.0);
    }

    #[test]
    fn slice_view_contours_the_molecule() {
        let view = SliceView::build("cyclohexane", 64, 12.0).unwrap();
        let raster = view.raster("x", 0.6, 32).unwrap();
        assert_eq!(raster.len(), 32 * 32);
        let pts = view.contour_points("x", 0.6, view.ses_level).unwrap();
        assert!(pts.len() > 8);
        assert!(pts.chunks(2).all(|p| p[0].is_nan() == p[1].is_nan()));
        assert!(view.midway_level > view.ses_level);
        assert!(SliceView::build("benzene", 64, 12.0).is_err());
    }
}
