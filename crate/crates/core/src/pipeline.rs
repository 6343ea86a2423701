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

//! End-to-end surface generation: molecule → grid → initial density →
//! diffusion → isovalue → mesh.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fd::{fd_solve, DiffusionField, FdParams, DEFAULT_CFL_FRACTION};
use crate::grid::{clamp_excluded, init_density, rasterize_spheres, GridSpec, ScalarGrid3, VoxelMask};
use crate::lsek::{
    KernelParams, SeparableKernel, DEFAULT_HALF_WIDTH, DEFAULT_HERMITE_DEGREE, DEFAULT_SIGMA_RATIO,
};
use crate::molecule::Molecule;
use crate::surface::{
    marching_cubes, resolve_level, InsideTester, LevelContext, SurfaceKind, SurfaceRequest, TriangleMesh,
};
use crate::{Axis, Vec3};

/// How the `time` parameter is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeUnit {
    /// Diffusion coefficient of one squared grid spacing per unit time, so
    /// the amount of smoothing is fixed in grid cells whatever the spacing.
    Grid,
    /// Diffusion coefficient of 1 Å² per unit time.
    Angstrom,
}

impl std::str::FromStr for TimeUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "grid" => Ok(Self::Grid),
            "angstrom" | "a" => Ok(Self::Angstrom),
            other => Err(Error::Config(format!("unknown time unit '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Lsek,
    Fd,
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lsek" => Ok(Self::Lsek),
            "fd" => Ok(Self::Fd),
            other => Err(Error::Config(format!("unknown solver '{other}'"))),
        }
    }
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Lsek => "lsek",
            Self::Fd => "fd",
        })
    }
}

/// Cubic grid resolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridSize {
    /// Points per axis.
    Points(usize),
    /// Node spacing in Å.
    Spacing(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub rho0: f64,
    pub probe_radius: f64,
    pub time: f64,
    pub time_unit: TimeUnit,
    pub grid: GridSize,
    /// Domain padding around the atoms in Å; automatic when `None`.
    pub margin: Option<f64>,
    pub hermite_degree: usize,
    pub half_width: usize,
    pub sigma_ratio: f64,
    pub surface: SurfaceRequest,
    /// Atom radius used for midway calibration; most common radius if unset.
    pub representative_radius: Option<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            rho0: 100.0,
            probe_radius: 1.5,
            time: 12.0,
            time_unit: TimeUnit::Grid,
            grid: GridSize::Points(200),
            margin: None,
            hermite_degree: DEFAULT_HERMITE_DEGREE,
            half_width: DEFAULT_HALF_WIDTH,
            sigma_ratio: DEFAULT_SIGMA_RATIO,
            surface: SurfaceRequest::new(SurfaceKind::Ses),
            representative_radius: None,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return bad(format!("rho0 must be positive, got {}", self.rho0));
        }
        if !(self.probe_radius >= 0.0 && self.probe_radius.is_finite()) {
            return bad(format!("probe radius must be >= 0, got {}", self.probe_radius));
        }
        if !(self.time >= 0.0 && self.time.is_finite()) {
            return bad(format!("time must be >= 0, got {}", self.time));
        }
        match self.grid {
            GridSize::Points(n) if n < 2 => return bad(format!("grid needs at least 2 points per axis, got {n}")),
            GridSize::Spacing(h) if !(h > 0.0 && h.is_finite()) => {
                return bad(format!("spacing must be positive, got {h}"))
            }
            _ => {}
        }
        if let Some(m) = self.margin {
            if !(m >= 0.0 && m.is_finite()) {
                return bad(format!("margin must be >= 0, got {m}"));
            }
        }
        if let Some(r) = self.representative_radius {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("representative radius must be positive, got {r}"));
            }
        }
        KernelParams {
            hermite_degree: self.hermite_degree,
            half_width: self.half_width,
            sigma: self.sigma_ratio,
            spacing: 1.0,
            diffusion: 1.0,
            time: self.time,
        }
        .validate()
    }

    /// Diffusion coefficient in Å² per unit time on a grid of spacing `h`.
    pub fn rate(&self, h: f64) -> f64 {
        match self.time_unit {
            TimeUnit::Grid => h * h,
            TimeUnit::Angstrom => 1.0,
        }
    }

    /// Kernel window width after evolution, in Å.
    pub fn spread_width(&self, h: f64) -> f64 {
        let s = self.sigma_ratio * h;
        (s * s + 2.0 * self.rate(h) * self.time).sqrt()
    }

    /// Automatic padding: probe radius, four window widths and 2 Å.
    pub fn auto_margin(&self, h: f64) -> f64 {
        self.probe_radius + 4.0 * self.spread_width(h) + 2.0
    }
}

/// Cubic grid around the molecule. With a point count the spacing depends
/// on the automatic margin, which depends on the spacing; the fixed point is
/// found by iteration.
pub fn plan_grid(molecule: &Molecule, config: &Config) -> Result<GridSpec> {
    config.validate()?;
    let (center, span) = if molecule.is_empty() {
        ([0.0; 3], 0.0)
    } else {
        let b = crate::molecule::bounding_box(molecule, 0.0)?;
        let e = b.extent();
        (b.center(), e[0].max(e[1]).max(e[2]))
    };
    let margin = |h: f64| config.margin.unwrap_or_else(|| config.auto_margin(h));
    let (h, n) = match config.grid {
        GridSize::Spacing(h) => {
            let side = span + 2.0 * margin(h);
            let n = ((side / h - 1e-9).ceil() as usize + 1).max(2);
            (h, n)
        }
        GridSize::Points(n) => {
            let cells = (n - 1) as f64;
            let mut h = (span + 2.0 * margin(0.0)).max(1e-3) / cells;
            let mut converged = false;
            for _ in 0..1000 {
                let next = (span + 2.0 * margin(h)) / cells;
                if !next.is_finite() || next > 1e6 {
                    break;
                }
                let done = (next - h).abs() <= 1e-14 * next;
                h = next;
                if done {
                    converged = true;
                    break;
                }
            }
            if !converged || !(h > 0.0) {
                return Err(Error::Config(format!(
                    "{n} points per axis cannot hold the padding required by the kernel window; use more points or --margin"
                )));
            }
            (h, n)
        }
    };
    let half = (n - 1) as f64 * h / 2.0;
    GridSpec::new(center.map(|c| c - half), [h; 3], [n; 3])
}

/// Masks and initial density for one run.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub molecule: Molecule,
    pub spec: GridSpec,
    pub vdw: VoxelMask,
    pub sas: VoxelMask,
    pub initial: ScalarGrid3,
    /// Diffusion coefficient in Å² per unit time.
    pub rate: f64,
}

pub fn prepare(molecule: &Molecule, config: &Config) -> Result<Prepared> {
    let spec = plan_grid(molecule, config)?;
    let vdw = rasterize_spheres(molecule, 0.0, &spec)?;
    let sas = rasterize_spheres(molecule, config.probe_radius, &spec)?;
    let initial = init_density(&spec, &sas, config.rho0)?;
    Ok(Prepared {
        molecule: molecule.clone(),
        rate: config.rate(spec.min_spacing()),
        spec,
        vdw,
        sas,
        initial,
    })
}

/// Evolved field plus solver diagnostics.
#[derive(Clone, Debug)]
pub struct Evolved {
    pub density: ScalarGrid3,
    pub solver: Solver,
    /// Product of the per-axis kernel L1 norms (single-step solver).
    pub kernel_l1: Option<f64>,
    /// Time steps taken (finite-difference solver).
    pub steps: Option<usize>,
    /// Wall time of the x, y and z sweeps (single-step solver).
    pub sweep_times: Option<[Duration; 3]>,
}

pub fn kernel_for(spec: &GridSpec, config: &Config, rate: f64, time: f64) -> Result<SeparableKernel> {
    let params: [KernelParams; 3] = std::array::from_fn(|a| KernelParams {
        hermite_degree: config.hermite_degree,
        half_width: config.half_width,
        sigma: config.sigma_ratio * spec.spacing[a],
        spacing: spec.spacing[a],
        diffusion: rate,
        time,
    });
    SeparableKernel::new(&params)
}

/// Diffuses the initial density to `time` (in the configured unit). The
/// single-step result is clamped to zero inside the atoms; the
/// finite-difference solver blocks flux into them and holds the domain
/// faces at the bulk density.
pub fn evolve(prep: &Prepared, config: &Config, solver: Solver, time: f64) -> Result<Evolved> {
    match solver {
        Solver::Lsek => {
            let kernel = kernel_for(&prep.spec, config, prep.rate, time)?;
            let (raw, times) = kernel.apply_timed(&prep.initial, config.rho0, Axis::ALL)?;
            Ok(Evolved {
                density: clamp_excluded(raw, &prep.vdw)?,
                solver,
                kernel_l1: Some(kernel.l1_norm()),
                steps: None,
                sweep_times: Some(times),
            })
        }
        Solver::Fd => {
            let dfield = DiffusionField::from_mask(&prep.vdw, prep.rate)?;
            let params = FdParams::for_time(time, &prep.spec, prep.rate, DEFAULT_CFL_FRACTION)?;
            let density = fd_solve(&prep.initial, &dfield, time, &params, config.rho0)?;
            Ok(Evolved {
                density,
                solver,
                kernel_l1: None,
                steps: Some(params.steps),
                sweep_times: None,
            })
        }
    }
}

pub fn level_context(prep: &Prepared, config: &Config) -> LevelContext {
    LevelContext {
        rho0: config.rho0,
        probe_radius: config.probe_radius,
        spread: prep.rate * config.time,
        atom_radius: config
            .representative_radius
            .or_else(|| prep.molecule.most_common_radius()),
    }
}

/// Resolves the requested isovalue and extracts the surface. Solvent
/// accessible surfaces come from the initial field, all others from the
/// evolved one.
pub fn extract(prep: &Prepared, evolved: &ScalarGrid3, config: &Config) -> Result<(f64, TriangleMesh)> {
    let level = resolve_level(&config.surface, &level_context(prep, config))?;
    let field = if config.surface.kind == SurfaceKind::Sas {
        &prep.initial
    } else {
        evolved
    };
    Ok((level, marching_cubes(field, level)))
}

/// Stage timings of a surface run.
#[derive(Clone, Copy, Debug, Default)]
pub struct Timings {
    pub grid: Duration,
    pub evolve: Duration,
    pub extract: Duration,
}

/// Everything produced by [`run_surface`].
#[derive(Clone, Debug)]
pub struct SurfaceRun {
    pub prepared: Prepared,
    pub evolved: Evolved,
    pub level: f64,
    pub mesh: TriangleMesh,
    pub timings: Timings,
}

pub fn run_surface(molecule: &Molecule, config: &Config, solver: Solver) -> Result<SurfaceRun> {
    let start = Instant::now();
    let prepared = prepare(molecule, config)?;
    let grid = start.elapsed();
    let start = Instant::now();
    let evolved = evolve(&prepared, config, solver, config.time)?;
    let evolve_time = start.elapsed();
    let start = Instant::now();
    let (level, mesh) = extract(&prepared, &evolved.density, config)?;
    Ok(SurfaceRun {
        prepared,
        evolved,
        level,
        mesh,
        timings: Timings {
            grid,
            evolve: evolve_time,
            extract: start.elapsed(),
        },
    })
}

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::Config("worker count must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Distance from `p` to the nearest sphere surface of the molecule
/// (negative inside a sphere).
fn sphere_gap(molecule: &Molecule, p: Vec3) -> f64 {
    molecule
        .atoms
        .iter()
        .map(|a| {
            let d = [p[0] - a.center[0], p[1] - a.center[1], p[2] - a.center[2]];
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() - a.radius
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest node-wise difference between two fields over interior nodes
/// lying between `0.5 h` and `3 h` outside the van der Waals spheres.
pub fn band_difference(prep: &Prepared, a: &ScalarGrid3, b: &ScalarGrid3) -> Result<f64> {
    if a.spec != prep.spec || b.spec != prep.spec {
        return Err(Error::Shape("fields do not match the prepared grid".into()));
    }
    let h = prep.spec.min_spacing();
    let spec = prep.spec;
    Ok((0..spec.len())
        .into_par_iter()
        .map(|idx| {
            let [i, j, k] = spec.coords(idx);
            if spec.on_boundary(i, j, k) || prep.vdw.bits[idx] {
                return 0.0;
            }
            let gap = sphere_gap(&prep.molecule, spec.node(i, j, k));
            if (0.5 * h..=3.0 * h).contains(&gap) {
                (a.values[idx] - b.values[idx]).abs()
            } else {
                0.0
            }
        })
        .reduce(|| 0.0, f64::max))
}

/// Box enclosing the solvent-accessible spheres.
pub fn sas_box(molecule: &Molecule, probe_radius: f64) -> Result<crate::molecule::Aabb> {
    crate::molecule::bounding_box(molecule, probe_radius)
}

/// Counts sample points breaking `vdW ⊂ SES ⊂ SAS`: inside the inner mesh
/// but not the outer one, or inside the outer mesh but outside every
/// probe-inflated sphere.
pub fn nesting_violations(
    points: &[Vec3],
    inner: &TriangleMesh,
    outer: &TriangleMesh,
    molecule: &Molecule,
    probe_radius: f64,
) -> usize {
    let inner = InsideTester::new(inner);
    let outer = InsideTester::new(outer);
    points
        .par_iter()
        .filter(|&&p| {
            let a = inner.contains(p);
            let b = outer.contains(p);
            (a && !b) || (b && sphere_gap(molecule, p) > probe_radius)
        })
        .count()
}
