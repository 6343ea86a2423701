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

//! Explicit finite-difference solver for `∂ρ/∂t = ∇·D(r)∇ρ`.
//!
//! This is the slow reference path; the single-step kernel is checked against
//! it.

mod radial;

pub use radial::{radial_solve, RadialProfile, RadialSolver};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarGrid3, VoxelMask};

/// Safety factor applied to the explicit stability bound by default.
pub const DEFAULT_CFL_FRACTION: f64 = 0.9;

/// Per-node diffusion rate (Å² per time unit).
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl DiffusionField {
    pub fn uniform(spec: GridSpec, rate: f64) -> Result<Self> {
        Self::from_values(spec, vec![rate; spec.len()])
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Shape(format!(
                "{} rates for a grid of {} nodes",
                values.len(),
                spec.len()
            )));
        }
        if values.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::Domain("diffusion rates must be finite and >= 0".into()));
        }
        Ok(Self { spec, values })
    }

    /// `0` inside the excluded volume, `bulk` elsewhere.
    pub fn from_mask(excluded: &VoxelMask, bulk: f64) -> Result<Self> {
        let values = excluded
            .bits
            .iter()
            .map(|&inside| if inside { 0.0 } else { bulk })
            .collect();
        Self::from_values(excluded.spec, values)
    }

    pub fn max_rate(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Largest stable explicit step, `min(h)² / (6·max D)`.
pub fn cfl_bound(spec: &GridSpec, max_rate: f64) -> f64 {
    let h = spec.min_spacing();
    if max_rate > 0.0 {
        h * h / (6.0 * max_rate)
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdParams {
    pub dt: f64,
    pub steps: usize,
}

impl FdParams {
    /// Uniform steps covering exactly `t`, each at most `fraction` of the
    /// stability bound.
    pub fn for_time(t: f64, spec: &GridSpec, max_rate: f64, fraction: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("time must be >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(Self { dt: 0.0, steps: 0 });
        }
        let bound = cfl_bound(spec, max_rate);
        if bound.is_infinite() {
            return Ok(Self { dt: t, steps: 1 });
        }
        let steps = (t / (fraction * bound)).ceil().max(1.0) as usize;
        Ok(Self {
            dt: t / steps as f64,
            steps,
        })
    }
}

/// How the nodes on a pair of opposite domain faces behave.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FaceCondition {
    /// Boundary nodes keep whatever value they hold (Dirichlet data).
    Fixed,
    /// No flux crosses the face; boundary nodes evolve with their interior
    /// neighbors only.
    ZeroFlux,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Boundary {
    pub faces: [FaceCondition; 3],
}

impl Boundary {
    pub const FIXED: Boundary = Boundary {
        faces: [FaceCondition::Fixed; 3],
    };
    pub const INSULATED: Boundary = Boundary {
        faces: [FaceCondition::ZeroFlux; 3],
    };
}

/// Face diffusivity: harmonic mean, so a face touching a zero-rate node
/// carries no flux.
#[inline]
fn face_rate(a: f64, b: f64) -> f64 {
    if a == b {
        a
    } else if a == 0.0 || b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

fn check_inputs(density: &ScalarGrid3, dfield: &DiffusionField, dt: f64) -> Result<()> {
    if density.spec != dfield.spec {
        return Err(Error::Shape("density and diffusion field specs differ".into()));
    }
    let bound = cfl_bound(&density.spec, dfield.max_rate());
    if !(dt >= 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::Stability { dt, bound });
    }
    Ok(())
}

/// One forward-Euler step with the given face conditions.
pub fn fd_step_with(
    density: &ScalarGrid3,
    dfield: &DiffusionField,
    dt: f64,
    boundary: &Boundary,
) -> Result<ScalarGrid3> {
    check_inputs(density, dfield, dt)?;
    let mut out = vec![0.0; density.values.len()];
    step_into(&density.values, &mut out, &density.spec, &dfield.values, dt, boundary);
    Ok(ScalarGrid3 {
        spec: density.spec,
        values: out,
    })
}

/// One forward-Euler step with every face node held at `boundary_value`.
pub fn fd_step(
    density: &ScalarGrid3,
    dfield: &DiffusionField,
    dt: f64,
    boundary_value: f64,
) -> Result<ScalarGrid3> {
    let mut held = density.clone();
    set_faces(&mut held, boundary_value);
    fd_step_with(&held, dfield, dt, &Boundary::FIXED)
}

fn set_faces(grid: &mut ScalarGrid3, value: f64) {
    let spec = grid.spec;
    let [nx, ny, nz] = spec.counts;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                if spec.on_boundary(i, j, k) {
                    grid.values[spec.index(i, j, k)] = value;
                }
            }
        }
    }
}

fn step_into(
    src: &[f64],
    dst: &mut [f64],
    spec: &GridSpec,
    rate: &[f64],
    dt: f64,
    boundary: &Boundary,
) {
    let [nx, ny, _] = spec.counts;
    let inv_h2 = spec.spacing.map(|h| 1.0 / (h * h));
    let strides = [1, nx, nx * ny];
    let fixed = boundary.faces.map(|f| f == FaceCondition::Fixed);
    let plane = nx * ny;
    dst.par_chunks_mut(plane).enumerate().for_each(|(k, out)| {
        for j in 0..ny {
            for i in 0..nx {
                let c = i + nx * (j + ny * k);
                let pos = [i, j, k];
                let held = (0..3).any(|a| fixed[a] && (pos[a] == 0 || pos[a] + 1 == spec.counts[a]));
                let v = src[c];
                if held {
                    out[c - plane * k] = v;
                    continue;
                }
                let dc = rate[c];
                let mut acc = 0.0;
                for a in 0..3 {
                    let mut axis = 0.0;
                    if pos[a] > 0 {
                        let nb = c - strides[a];
                        axis += face_rate(dc, rate[nb]) * (src[nb] - v);
                    }
                    if pos[a] + 1 < spec.counts[a] {
                        let nb = c + strides[a];
                        axis += face_rate(dc, rate[nb]) * (src[nb] - v);
                    }
                    acc += axis * inv_h2[a];
                }
                out[c - plane * k] = v + dt * acc;
            }
        }
    });
}

/// Runs `params.steps` steps; the last one is shortened so the total elapsed
/// time is exactly `t`.
pub fn fd_solve_with(
    density0: &ScalarGrid3,
    dfield: &DiffusionField,
    t: f64,
    params: &FdParams,
    boundary: &Boundary,
) -> Result<ScalarGrid3> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(density0.clone());
    }
    let FdParams { dt, steps } = *params;
    let covered = dt * steps as f64;
    if steps == 0 || covered < t * (1.0 - 1e-12) || dt * (steps - 1) as f64 >= t {
        return Err(Error::Config(format!(
            "{steps} steps of {dt} do not cover t = {t} with only the last step shortened"
        )));
    }
    check_inputs(density0, dfield, dt)?;
    let mut a = density0.values.clone();
    let mut b = vec![0.0; a.len()];
    for step in 0..steps {
        let this_dt = if step + 1 == steps {
            t - dt * (steps - 1) as f64
        } else {
            dt
        };
        step_into(&a, &mut b, &density0.spec, &dfield.values, this_dt, boundary);
        std::mem::swap(&mut a, &mut b);
    }
    Ok(ScalarGrid3 {
        spec: density0.spec,
        values: a,
    })
}

/// Solves to time `t` with every face node held at `boundary_value`.
pub fn fd_solve(
    density0: &ScalarGrid3,
    dfield: &DiffusionField,
    t: f64,
    params: &FdParams,
    boundary_value: f64,
) -> Result<ScalarGrid3> {
    if t == 0.0 {
        return Ok(density0.clone());
    }
    let mut held = density0.clone();
    set_faces(&mut held, boundary_value);
    fd_solve_with(&held, dfield, t, params, &Boundary::FIXED)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, h: f64) -> GridSpec {
        GridSpec::new([0.0; 3], [h; 3], [n; 3]).unwrap()
    }

    #[test]
    fn uniform_field_is_steady() {
        let s = spec(8, 0.1);
        let rho = ScalarGrid3::filled(s, 100.0);
        let d = DiffusionField::uniform(s, 1.0).unwrap();
        let dt = 0.9 * cfl_bound(&s, 1.0);
        let out = fd_step(&rho, &d, dt, 100.0).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn cfl_violation_reported() {
        let s = spec(5, 0.1);
        let rho = ScalarGrid3::filled(s, 1.0);
        let d = DiffusionField::uniform(s, 1.0).unwrap();
        let bound = cfl_bound(&s, 1.0);
        match fd_step(&rho, &d, 1.5 * bound, 1.0) {
            Err(Error::Stability { bound: b, .. }) => assert!((b - bound).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_rate_region_stays_empty() {
        let s = spec(12, 0.2);
        let inside = |i: usize, j: usize, k: usize| (3..9).contains(&i) && (3..9).contains(&j) && (3..9).contains(&k);
        let mut rho = ScalarGrid3::filled(s, 50.0);
        let mut rate = vec![1.0; s.len()];
        for k in 0..12 {
            for j in 0..12 {
                for i in 0..12 {
                    if inside(i, j, k) {
                        rho.values[s.index(i, j, k)] = 0.0;
                        rate[s.index(i, j, k)] = 0.0;
                    }
                }
            }
        }
        let d = DiffusionField::from_values(s, rate).unwrap();
        let params = FdParams::for_time(3.0, &s, 1.0, 0.9).unwrap();
        let out = fd_solve(&rho, &d, 3.0, &params, 100.0).unwrap();
        for k in 0..12 {
            for j in 0..12 {
                for i in 0..12 {
                    if inside(i, j, k) {
                        assert_eq!(out.get(i, j, k), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let s = spec(4, 0.5);
        let rho = ScalarGrid3::from_fn(s, |p| p[0] + p[1]);
        let d = DiffusionField::uniform(s, 1.0).unwrap();
        let params = FdParams::for_time(0.0, &s, 1.0, 0.9).unwrap();
        assert_eq!(fd_solve(&rho, &d, 0.0, &params, 7.0).unwrap(), rho);
    }

    #[test]
    fn step_count_must_cover_time() {
        let s = spec(4, 0.5);
        let rho = ScalarGrid3::filled(s, 1.0);
        let d = DiffusionField::uniform(s, 1.0).unwrap();
        let short = FdParams { dt: 0.01, steps: 3 };
        assert!(matches!(fd_solve(&rho, &d, 1.0, &short, 1.0), Err(Error::Config(_))));
        let ok = FdParams { dt: 0.03, steps: 4 };
        assert!(fd_solve(&rho, &d, 0.1, &ok, 1.0).is_ok());
    }

    #[test]
    fn insulated_box_conserves_mass() {
        let s = GridSpec::new([0.0; 3], [0.1, 0.15, 0.2], [10, 9, 8]).unwrap();
        let rho = ScalarGrid3::from_fn(s, |p| (3.0 * p[0]).sin().abs() * 10.0 + p[2]);
        let d = DiffusionField::from_values(
            s,
            (0..s.len()).map(|n| if n % 7 == 0 { 0.0 } else { 1.0 + (n % 3) as f64 }).collect(),
        )
        .unwrap();
        let dt = 0.9 * cfl_bound(&s, d.max_rate());
        let mut cur = rho.clone();
        let total = |g: &ScalarGrid3| g.values.iter().sum::<f64>() * s.cell_volume();
        let m0 = total(&cur);
        for _ in 0..25 {
            let next = fd_step_with(&cur, &d, dt, &Boundary::INSULATED).unwrap();
            assert!(((total(&next) - total(&cur)) / m0).abs() < 1e-10);
            cur = next;
        }
    }
}
