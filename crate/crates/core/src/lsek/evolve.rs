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

//! Separable single-step evolution on a grid.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::kernel::{kernel_weights, KernelParams, KernelWeights};
use crate::error::{Error, Result};
use crate::grid::ScalarGrid3;
use crate::Axis;

/// Column block length for the z sweep; keeps the 2M+1 input rows in cache.
const Z_BLOCK: usize = 256;

/// `out_i = Σ_{l=−M}^{M} w_l · in_{i−l}` with `pad` standing in for samples
/// beyond either end.
pub fn evolve_line(samples: &[f64], weights: &KernelWeights, pad: f64) -> Vec<f64> {
    let mut out = vec![0.0; samples.len()];
    let mut buf = Vec::new();
    convolve_line(samples, &mut out, weights.taps(), pad, &mut buf);
    out
}

/// Every output element accumulates taps in ascending order, whichever axis
/// is being swept; the x, y and z paths stay bit-identical to `evolve_line`.
fn convolve_line(src: &[f64], dst: &mut [f64], taps: &[f64], pad: f64, buf: &mut Vec<f64>) {
    let m = taps.len() / 2;
    let n = src.len();
    buf.clear();
    buf.resize(n + 2 * m, pad);
    buf[m..m + n].copy_from_slice(src);
    dst.fill(0.0);
    // symmetric taps: Σ_l w_l in_{i−l} = Σ_s taps[s] · buf[i + s]
    for (s, &w) in taps.iter().enumerate() {
        let window = &buf[s..s + n];
        for (o, &v) in dst.iter_mut().zip(window) {
            *o += w * v;
        }
    }
}

fn sweep_x(src: &[f64], dst: &mut [f64], counts: [usize; 3], taps: &[f64], pad: f64) {
    let nx = counts[0];
    dst.par_chunks_mut(nx)
        .zip(src.par_chunks(nx))
        .for_each_init(Vec::new, |buf, (out, line)| {
            convolve_line(line, out, taps, pad, buf)
        });
}

fn sweep_y(src: &[f64], dst: &mut [f64], counts: [usize; 3], taps: &[f64], pad: f64) {
    let [nx, ny, _] = counts;
    let m = (taps.len() / 2) as isize;
    dst.par_chunks_mut(nx * ny)
        .zip(src.par_chunks(nx * ny))
        .for_each(|(out, slab)| {
            for j in 0..ny {
                let row = &mut out[j * nx..(j + 1) * nx];
                row.fill(0.0);
                for (s, &w) in taps.iter().enumerate() {
                    let jj = j as isize + s as isize - m;
                    if jj < 0 || jj >= ny as isize {
                        let c = w * pad;
                        row.iter_mut().for_each(|o| *o += c);
                    } else {
                        let jj = jj as usize;
                        let src_row = &slab[jj * nx..(jj + 1) * nx];
                        for (o, &v) in row.iter_mut().zip(src_row) {
                            *o += w * v;
                        }
                    }
                }
            }
        });
}

/// Raw pointer shared across workers that write disjoint index sets.
#[derive(Clone, Copy)]
struct SharedOut(*mut f64);
unsafe impl Send for SharedOut {}
unsafe impl Sync for SharedOut {}

fn sweep_z(src: &[f64], dst: &mut [f64], counts: [usize; 3], taps: &[f64], pad: f64) {
    let [nx, ny, nz] = counts;
    let plane = nx * ny;
    let m = (taps.len() / 2) as isize;
    let out = SharedOut(dst.as_mut_ptr());
    let blocks = plane.div_ceil(Z_BLOCK);
    (0..blocks).into_par_iter().for_each_init(
        || vec![0.0; Z_BLOCK],
        |acc, b| {
            let start = b * Z_BLOCK;
            let len = Z_BLOCK.min(plane - start);
            let acc = &mut acc[..len];
            for k in 0..nz {
                acc.fill(0.0);
                for (s, &w) in taps.iter().enumerate() {
                    let kk = k as isize + s as isize - m;
                    if kk < 0 || kk >= nz as isize {
                        let c = w * pad;
                        acc.iter_mut().for_each(|o| *o += c);
                    } else {
                        let base = kk as usize * plane + start;
                        for (o, &v) in acc.iter_mut().zip(&src[base..base + len]) {
                            *o += w * v;
                        }
                    }
                }
                let base = k * plane + start;
                // SAFETY: block `b` owns columns [start, start+len) of every
                // plane; no other worker touches these indices, and `dst`
                // outlives the parallel loop.
                unsafe {
                    let p = out;
                    std::ptr::copy_nonoverlapping(acc.as_ptr(), p.0.add(base), len);
                }
            }
        },
    );
}

fn sweep(axis: Axis, src: &[f64], dst: &mut [f64], counts: [usize; 3], taps: &[f64], pad: f64) {
    match axis {
        Axis::X => sweep_x(src, dst, counts, taps, pad),
        Axis::Y => sweep_y(src, dst, counts, taps, pad),
        Axis::Z => sweep_z(src, dst, counts, taps, pad),
    }
}

/// Precomputed per-axis stencils for repeated single-step evolution.
#[derive(Clone, Debug)]
pub struct SeparableKernel {
    weights: [KernelWeights; 3],
    spacing: [f64; 3],
}

impl SeparableKernel {
    pub fn new(params: &[KernelParams; 3]) -> Result<Self> {
        let reference = &params[0];
        for p in &params[1..] {
            if p.diffusion != reference.diffusion || p.time != reference.time {
                return Err(Error::Config(
                    "all axes must share the same diffusion rate and time".into(),
                ));
            }
        }
        Ok(Self {
            weights: [
                kernel_weights(&params[0])?,
                kernel_weights(&params[1])?,
                kernel_weights(&params[2])?,
            ],
            spacing: [params[0].spacing, params[1].spacing, params[2].spacing],
        })
    }

    pub fn weights(&self, axis: Axis) -> &KernelWeights {
        &self.weights[axis.index()]
    }

    /// Largest per-axis `‖w‖₁`.
    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.l1_norm()).fold(0.0, f64::max)
    }

    fn check(&self, density: &ScalarGrid3) -> Result<()> {
        for a in 0..3 {
            let h = density.spec.spacing[a];
            if (self.spacing[a] - h).abs() > 1e-9 * h {
                return Err(Error::Config(format!(
                    "kernel spacing {} differs from grid spacing {h} on axis {a}",
                    self.spacing[a]
                )));
            }
        }
        Ok(())
    }

    /// Sweeps x, then y, then z.
    pub fn apply(&self, density: &ScalarGrid3, pad: f64) -> Result<ScalarGrid3> {
        self.apply_ordered(density, pad, [Axis::X, Axis::Y, Axis::Z])
    }

    pub fn apply_ordered(&self, density: &ScalarGrid3, pad: f64, order: [Axis; 3]) -> Result<ScalarGrid3> {
        self.run(density, pad, order, |_, sweep| sweep())
    }

    /// Like [`SeparableKernel::apply_ordered`], also returning the wall time of
    /// each sweep in `order`.
    pub fn apply_timed(
        &self,
        density: &ScalarGrid3,
        pad: f64,
        order: [Axis; 3],
    ) -> Result<(ScalarGrid3, [Duration; 3])> {
        let mut times = [Duration::ZERO; 3];
        let grid = self.run(density, pad, order, |slot, sweep| {
            let start = Instant::now();
            sweep();
            times[slot] = start.elapsed();
        })?;
        Ok((grid, times))
    }

    /// Runs the three sweeps, each through `wrap` so callers can time them
    /// (the clock is unavailable on some targets).
    fn run(
        &self,
        density: &ScalarGrid3,
        pad: f64,
        order: [Axis; 3],
        mut wrap: impl FnMut(usize, &mut dyn FnMut()),
    ) -> Result<ScalarGrid3> {
        self.check(density)?;
        let counts = density.spec.counts;
        let mut a = density.values.clone();
        let mut b = vec![0.0; a.len()];
        for (slot, axis) in order.into_iter().enumerate() {
            wrap(slot, &mut || sweep(axis, &a, &mut b, counts, self.weights[axis.index()].taps(), pad));
            std::mem::swap(&mut a, &mut b);
        }
        Ok(ScalarGrid3 {
            spec: density.spec,
            values: a,
        })
    }
}

/// Advances `density` from time 0 to `params[_].time` in one separable sweep.
pub fn evolve_3d(density: &ScalarGrid3, params: &[KernelParams; 3], pad: f64) -> Result<ScalarGrid3> {
    SeparableKernel::new(params)?.apply(density, pad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn zero_line_stays_zero() {
        let w = KernelWeights::from_half(&[0.5, 0.2, 0.05]);
        assert!(evolve_line(&[0.0; 9], &w, 0.0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_direct_sum() {
        let w = KernelWeights::from_half(&[0.4, 0.2, 0.1]);
        let x = [1.0, 2.0, -1.0, 0.5, 3.0];
        let out = evolve_line(&x, &w, 7.0);
        for (i, &o) in out.iter().enumerate() {
            let mut expect = 0.0;
            for l in -2isize..=2 {
                let j = i as isize - l;
                let v = if !(0..5).contains(&j) { 7.0 } else { x[j as usize] };
                expect += w.get(l) * v;
            }
            assert!((o - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn sweeps_match_line_evolution_bitwise() {
        let spec = GridSpec::new([0.0; 3], [0.3, 0.4, 0.5], [7, 6, 9]).unwrap();
        let field = ScalarGrid3::from_fn(spec, |p| (p[0] * 1.3).sin() + p[1] * p[2] - 0.2 * p[2]);
        let kernel = SeparableKernel::new(&[
            KernelParams { half_width: 4, ..KernelParams::standard(0.3, 0.01, 1.0) },
            KernelParams { half_width: 3, ..KernelParams::standard(0.4, 0.01, 1.0) },
            KernelParams { half_width: 5, ..KernelParams::standard(0.5, 0.01, 1.0) },
        ])
        .unwrap();
        let pad = 2.5;
        let got = kernel.apply(&field, pad).unwrap();

        let [nx, ny, nz] = spec.counts;
        let mut v = field.values.clone();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let w = kernel.weights(axis);
            let mut next = v.clone();
            let (len, count) = match axis {
                Axis::X => (nx, ny * nz),
                Axis::Y => (ny, nx * nz),
                Axis::Z => (nz, nx * ny),
            };
            for line in 0..count {
                let idx = |t: usize| match axis {
                    Axis::X => t + nx * line,
                    Axis::Y => (line % nx) + nx * (t + ny * (line / nx)),
                    Axis::Z => line + nx * ny * t,
                };
                let samples: Vec<f64> = (0..len).map(|t| v[idx(t)]).collect();
                for (t, o) in evolve_line(&samples, w, pad).into_iter().enumerate() {
                    next[idx(t)] = o;
                }
            }
            v = next;
        }
        assert_eq!(got.values, v);
    }

    #[test]
    fn spacing_mismatch_rejected() {
        let spec = GridSpec::new([0.0; 3], [0.3; 3], [4; 3]).unwrap();
        let field = ScalarGrid3::filled(spec, 1.0);
        let p = KernelParams::standard(0.3, 1.0, 1.0);
        let q = KernelParams::standard(0.31, 1.0, 1.0);
        assert!(matches!(evolve_3d(&field, &[p, p, q], 1.0), Err(Error::Config(_))));
        let r = KernelParams { time: 2.0, ..p };
        assert!(matches!(evolve_3d(&field, &[p, p, r], 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn zero_field_stays_zero() {
        let spec = GridSpec::new([0.0; 3], [0.5; 3], [10; 3]).unwrap();
        let field = ScalarGrid3::filled(spec, 0.0);
        let p = KernelParams::standard(0.5, 1.0, 3.0);
        let out = evolve_3d(&field, &[p; 3], 0.0).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));
    }
}
