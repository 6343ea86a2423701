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

//! Solver outputs against closed-form and independently computed references.

use mmsurf::fd::{
    fd_solve_with, radial_solve, Boundary, DiffusionField, FaceCondition, FdParams, DEFAULT_CFL_FRACTION,
};
use mmsurf::grid::{GridSpec, ScalarGrid3};
use mmsurf::lsek::{evolve_3d, evolve_line, kernel_weights, KernelParams, SeparableKernel};
use mmsurf::molecule::{Atom, Molecule};
use mmsurf::pipeline::{evolve, prepare, Config, GridSize, Solver, TimeUnit};
use mmsurf::Axis;
use statrs::function::erf::erfc;

fn line(n: usize, x0: f64, h: f64) -> Vec<f64> {
    (0..n).map(|i| x0 + i as f64 * h).collect()
}

#[test]
fn diffused_gaussian_line() {
    // Variance 4 grows to 4 + 2t = 10; amplitude scales by sqrt(4/10).
    let (h, m) = (0.1, 200);
    let w = kernel_weights(&KernelParams {
        half_width: m,
        ..KernelParams::standard(h, 1.0, 3.0)
    })
    .unwrap();
    let xs = line(801, -40.0, h);
    let f: Vec<f64> = xs.iter().map(|x| (-x * x / 8.0).exp()).collect();
    let g = evolve_line(&f, &w, 0.0);
    for i in m..xs.len() - m {
        let exact = 0.4f64.sqrt() * (-xs[i] * xs[i] / 20.0).exp();
        assert!((g[i] - exact).abs() < 1e-8, "x = {}: {} vs {exact}", xs[i], g[i]);
    }
}

#[test]
fn constant_line_error_bounded_by_kernel_mass() {
    for t in [0.0, 1.0, 12.0, 50.0] {
        let w = kernel_weights(&KernelParams::standard(0.1, 1.0, t)).unwrap();
        let c = 100.0;
        let out = evolve_line(&vec![c; 50], &w, c);
        let bound = (w.sum() - 1.0).abs() * c + 1e-12;
        assert!(out.iter().all(|v| (v - c).abs() <= bound), "t = {t}");
    }
}

#[test]
fn step_profile_after_long_time() {
    // Nodes sit at half-integer offsets so the jump falls between samples.
    let (h, m, t) = (0.02, 1960, 12.0);
    let w = kernel_weights(&KernelParams {
        half_width: m,
        ..KernelParams::standard(h, 1.0, t)
    })
    .unwrap();
    let n = 2 * m + 1000;
    let xs = line(n, -((n - 1) as f64) * h / 2.0, h);
    let f: Vec<f64> = xs.iter().map(|&x| if x < 0.0 { 0.0 } else { 100.0 }).collect();
    let g = evolve_line(&f, &w, 50.0);
    for i in m..n - m {
        let exact = 50.0 * erfc(-xs[i] / (2.0 * t.sqrt()));
        assert!((g[i] - exact).abs() < 1e-6 * 100.0, "x = {}", xs[i]);
    }
}

fn gaussian_3d(half: f64, h: f64) -> ScalarGrid3 {
    let n = (2.0 * half / h).round() as usize + 1;
    let spec = GridSpec::new([-half; 3], [h; 3], [n; 3]).unwrap();
    ScalarGrid3::from_fn(spec, |p| (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 8.0).exp())
}

#[test]
fn diffused_gaussian_volume() {
    let (h, m) = (0.25, 84);
    let g0 = gaussian_3d(23.0, h);
    let params = [KernelParams {
        half_width: m,
        ..KernelParams::standard(h, 1.0, 3.0)
    }; 3];
    let g = evolve_3d(&g0, &params, 0.0).unwrap();
    let spec = g.spec;
    let amp = 0.4f64.powf(1.5);
    let mut worst = 0.0f64;
    for k in m..spec.counts[2] - m {
        for j in m..spec.counts[1] - m {
            for i in m..spec.counts[0] - m {
                let p = spec.node(i, j, k);
                let exact = amp * (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 20.0).exp();
                worst = worst.max((g.get(i, j, k) - exact).abs());
            }
        }
    }
    assert!(worst < 1e-7, "max error {worst}");
}

#[test]
fn axis_order_commutes() {
    let g0 = gaussian_3d(3.0, 0.2);
    let spec = g0.spec;
    let g0 = ScalarGrid3::from_fn(spec, |p| 100.0 * (1.0 - (-(p[0] * p[0] + 0.5 * p[1] * p[1]) / 2.0).exp()) + p[2]);
    let kernel = SeparableKernel::new(&[KernelParams::standard(0.2, 0.04, 12.0); 3]).unwrap();
    // A nonzero pad feeds one sweep's boundary term into the next, so
    // exact commutation only holds for a zero far field.
    let a = kernel.apply_ordered(&g0, 0.0, [Axis::X, Axis::Y, Axis::Z]).unwrap();
    let b = kernel.apply_ordered(&g0, 0.0, [Axis::Z, Axis::Y, Axis::X]).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0), "{x} vs {y}");
    }
}

/// A line along x embedded in a 3D grid that is insulated along y and z.
fn slab(n: usize, h: f64, x0: f64, f: impl Fn(f64) -> f64 + Sync) -> (ScalarGrid3, Boundary) {
    let spec = GridSpec::new([x0, 0.0, 0.0], [h; 3], [n, 3, 3]).unwrap();
    let boundary = Boundary {
        faces: [FaceCondition::Fixed, FaceCondition::ZeroFlux, FaceCondition::ZeroFlux],
    };
    (ScalarGrid3::from_fn(spec, |p| f(p[0])), boundary)
}

#[test]
fn finite_difference_step_profile() {
    let (h, t, n) = (0.1, 12.0, 800);
    let x0 = -((n - 1) as f64) * h / 2.0;
    let (g0, boundary) = slab(n, h, x0, |x| if x < 0.0 { 0.0 } else { 100.0 });
    let d = DiffusionField::uniform(g0.spec, 1.0).unwrap();
    let params = FdParams::for_time(t, &g0.spec, 1.0, DEFAULT_CFL_FRACTION).unwrap();
    let g = fd_solve_with(&g0, &d, t, &params, &boundary).unwrap();
    for i in 0..n {
        let x = x0 + i as f64 * h;
        let exact = 50.0 * erfc(-x / (2.0 * t.sqrt()));
        for j in 0..3 {
            assert!((g.get(i, j, 1) - exact).abs() < 1e-3 * 100.0, "x = {x}");
        }
    }
}

#[test]
fn finite_difference_gaussian() {
    let (h, t, n) = (0.1, 3.0, 601);
    let (g0, boundary) = slab(n, h, -30.0, |x| (-x * x / 8.0).exp());
    let d = DiffusionField::uniform(g0.spec, 1.0).unwrap();
    let params = FdParams::for_time(t, &g0.spec, 1.0, DEFAULT_CFL_FRACTION).unwrap();
    let g = fd_solve_with(&g0, &d, t, &params, &boundary).unwrap();
    for i in 0..n {
        let x = -30.0 + i as f64 * h;
        let exact = 0.4f64.sqrt() * (-x * x / 20.0).exp();
        assert!((g.get(i, 1, 1) - exact).abs() < 1e-3 * 0.4f64.sqrt());
    }
}

#[test]
fn radial_profile_matches_volume_solver() {
    // Spread 0.2 Å², the amount applied by twelve grid-time units at
    // h ≈ 0.13 Å.
    let spread = 0.2;
    let mol = Molecule::new("one", vec![Atom::new([0.0; 3], 1.7)]);
    let config = Config {
        grid: GridSize::Spacing(0.1),
        margin: Some(3.0),
        time_unit: TimeUnit::Angstrom,
        time: spread,
        ..Config::default()
    };
    let prep = prepare(&mol, &config).unwrap();
    let volume = evolve(&prep, &config, Solver::Fd, spread).unwrap().density;
    let radial = radial_solve(1.7, 1.5, 100.0, spread, 0.002, 6.0).unwrap().value_at(2.45);

    // Spherical mean over a Fibonacci lattice of directions.
    let n = 400;
    let mean = (0..n)
        .map(|k| {
            let z = -1.0 + (2 * k + 1) as f64 / n as f64;
            let phi = k as f64 * 2.399_963_229_728_653;
            let s = (1.0 - z * z).sqrt();
            volume.sample([2.45 * s * phi.cos(), 2.45 * s * phi.sin(), 2.45 * z])
        })
        .sum::<f64>()
        / n as f64;
    assert!((mean - radial).abs() / radial < 0.02, "radial {radial}, volume {mean}");
}
