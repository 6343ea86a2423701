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

//! Single-step timing and scaling measurements.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarGrid3};
use crate::lsek::{KernelParams, SeparableKernel, DEFAULT_SIGMA_RATIO};
use crate::Axis;

const BENCH_SPACING: f64 = 0.1;
const BENCH_TIME: f64 = 12.0;

/// Fastest of several single-step runs on an `n³` grid.
#[derive(Clone, Copy, Debug)]
pub struct StepTiming {
    pub n: usize,
    pub half_width: usize,
    /// x, y and z sweep times of the fastest run.
    pub sweeps: [Duration; 3],
    pub total: Duration,
}

impl StepTiming {
    pub fn nodes(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn nodes_per_second(&self) -> f64 {
        self.nodes() as f64 / self.total.as_secs_f64().max(1e-12)
    }
}

/// Bulk density with an empty ball in the middle, as after initialization.
fn bench_field(n: usize) -> Result<ScalarGrid3> {
    let spec = GridSpec::new([0.0; 3], [BENCH_SPACING; 3], [n; 3])?;
    let c = (n - 1) as f64 * BENCH_SPACING / 2.0;
    let r2 = (c / 2.0).powi(2);
    Ok(ScalarGrid3::from_fn(spec, |p| {
        let d2 = (p[0] - c).powi(2) + (p[1] - c).powi(2) + (p[2] - c).powi(2);
        if d2 <= r2 {
            0.0
        } else {
            100.0
        }
    }))
}

pub fn time_step(n: usize, half_width: usize, hermite_degree: usize, repeats: usize) -> Result<StepTiming> {
    if n < 2 {
        return Err(Error::Config(format!("benchmark grid needs at least 2 points per axis, got {n}")));
    }
    if repeats == 0 {
        return Err(Error::Config("benchmark needs at least one repeat".into()));
    }
    let params = KernelParams {
        hermite_degree,
        half_width,
        sigma: DEFAULT_SIGMA_RATIO * BENCH_SPACING,
        spacing: BENCH_SPACING,
        diffusion: BENCH_SPACING * BENCH_SPACING,
        time: BENCH_TIME,
    };
    let kernel = SeparableKernel::new(&[params; 3])?;
    let field = bench_field(n)?;
    let mut best: Option<StepTiming> = None;
    for _ in 0..repeats {
        let (_, sweeps) = kernel.apply_timed(&field, 100.0, Axis::ALL)?;
        let total = sweeps.iter().sum();
        if best.is_none_or(|b| total < b.total) {
            best = Some(StepTiming {
                n,
                half_width,
                sweeps,
                total,
            });
        }
    }
    Ok(best.expect("at least one repeat"))
}

/// Two timings and the ratio of their totals (`large / small`).
#[derive(Clone, Copy, Debug)]
pub struct Scaling {
    pub small: StepTiming,
    pub large: StepTiming,
    pub ratio: f64,
}

fn scaling(small: StepTiming, large: StepTiming) -> Scaling {
    Scaling {
        ratio: large.total.as_secs_f64() / small.total.as_secs_f64().max(1e-12),
        small,
        large,
    }
}

/// `n³` against `(2n)³` at a fixed stencil; linear cost gives a ratio of 8.
pub fn size_scaling(n: usize, half_width: usize, hermite_degree: usize, repeats: usize) -> Result<Scaling> {
    let small = time_step(n, half_width, hermite_degree, repeats)?;
    let large = time_step(2 * n, half_width, hermite_degree, repeats)?;
    Ok(scaling(small, large))
}

/// Half-width `m` against `2m` on the same grid; the sweeps cost about
/// twice as much.
pub fn stencil_scaling(n: usize, half_width: usize, hermite_degree: usize, repeats: usize) -> Result<Scaling> {
    let small = time_step(n, half_width, hermite_degree, repeats)?;
    let large = time_step(n, 2 * half_width, hermite_degree, repeats)?;
    Ok(scaling(small, large))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_size_is_config_error() {
        assert!(matches!(time_step(0, 32, 88, 1), Err(Error::Config(_))));
        assert!(matches!(time_step(8, 32, 88, 0), Err(Error::Config(_))));
    }

    #[test]
    fn small_run() {
        let t = time_step(12, 4, 88, 2).unwrap();
        assert_eq!(t.nodes(), 1728);
        assert!(t.nodes_per_second() > 0.0);
    }
}
