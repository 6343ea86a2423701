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

//! Command-line front end.
//!
//! ```text
//! mmsurf surface --input mol.xyzr --grid 200 --surface ses --out-mesh ses.obj
//! mmsurf compare --input mol.xyzr
//! mmsurf bench --size 100
//! ```
//!
//! Exit codes: 0 success, 1 failed comparison, 2 configuration error,
//! 3 unreadable or malformed input, 4 numerical failure.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::bench;
use crate::error::Error;
use crate::grid::write_grid_dump;
use crate::lsek::{DEFAULT_HALF_WIDTH, DEFAULT_HERMITE_DEGREE};
use crate::molecule::{InputFormat, Molecule};
use crate::pipeline::{self, Config, GridSize, Solver, TimeUnit};
use crate::surface::{mesh_distance, slice_contours, ContourSet, SurfaceKind, TriangleMesh};
use crate::Axis;

#[derive(Parser, Debug)]
#[command(name = "mmsurf", version, about = "Molecular surfaces from a diffused solvent density")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a surface and write the requested artifacts.
    Surface(RunArgs),
    /// Run the single-step and finite-difference solvers on the same input
    /// and compare their surfaces.
    Compare(CompareArgs),
    /// Time the single-step evolution and its scaling.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    /// Molecule file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// xyzr, pqr or xyz (default: from the file extension, else xyzr).
    #[arg(long)]
    format: Option<String>,
    /// Points per axis of the cubic grid.
    #[arg(long, conflicts_with = "spacing")]
    grid: Option<usize>,
    /// Grid spacing in Å.
    #[arg(long)]
    spacing: Option<f64>,
    /// Padding around the atoms in Å (default: automatic).
    #[arg(long)]
    margin: Option<f64>,
    /// Bulk solvent density.
    #[arg(long)]
    rho0: Option<f64>,
    /// Probe radius in Å.
    #[arg(long)]
    probe: Option<f64>,
    /// Diffusion time.
    #[arg(long)]
    time: Option<f64>,
    /// grid (one squared spacing per unit time) or angstrom (1 Å² per unit time).
    #[arg(long)]
    time_unit: Option<String>,
    /// lsek or fd.
    #[arg(long)]
    solver: Option<String>,
    /// Highest Hermite degree of the kernel series (even).
    #[arg(long)]
    mh: Option<usize>,
    /// Kernel half-width in grid points.
    #[arg(long)]
    stencil: Option<usize>,
    /// Kernel width over grid spacing.
    #[arg(long)]
    sigma_ratio: Option<f64>,
    /// vdw, sas, ses, midway or custom.
    #[arg(long)]
    surface: Option<String>,
    /// Isovalue for custom surfaces; overrides the ses default.
    #[arg(long)]
    level: Option<f64>,
    /// Isovalue standing in for zero density on vdw surfaces.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Atom radius for midway calibration (default: most common radius).
    #[arg(long)]
    atom_radius: Option<f64>,
    /// Write the mesh as OBJ.
    #[arg(long)]
    out_mesh: Option<PathBuf>,
    /// Slice plane as axis=coordinate, e.g. x=0.6 (repeatable).
    #[arg(long = "slice")]
    slices: Vec<String>,
    /// Write slice contours as CSV.
    #[arg(long)]
    out_contours: Option<PathBuf>,
    /// Write the evolved density as a raw grid dump.
    #[arg(long)]
    out_grid: Option<PathBuf>,
    /// Write the x-axis kernel weights as CSV.
    #[arg(long)]
    out_kernel: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CompareArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Diffusion time for the finite-difference solver (default: --time).
    #[arg(long)]
    fd_time: Option<f64>,
    /// Largest accepted surface distance in grid spacings.
    #[arg(long, default_value_t = 1.5)]
    bound: f64,
}

#[derive(Args, Debug, Clone)]
struct BenchArgs {
    /// Points per axis of the smaller grid; the larger has twice as many.
    #[arg(long, default_value_t = 100)]
    size: usize,
    /// Kernel half-width; the stencil comparison doubles it.
    #[arg(long, default_value_t = DEFAULT_HALF_WIDTH)]
    stencil: usize,
    #[arg(long, default_value_t = DEFAULT_HERMITE_DEGREE)]
    mh: usize,
    /// Runs per measurement; the fastest is kept.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long)]
    workers: Option<usize>,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Parse { .. } | Error::Validation { .. } | Error::UnknownElement(_) | Error::Io(_) => 3,
            Error::Numeric { .. } | Error::Stability { .. } | Error::Shape(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (including the program name) and runs the command. Reports
/// go to `out`, diagnostics to `err`; returns the process exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Surface(a) => cmd_surface(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "mmsurf: {}", f.message);
            f.code
        }
    }
}

fn read_config_file(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_failure(format!("cannot read config {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| config_failure(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        pairs.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| config_failure(format!("invalid value {value:?} for {key}")))
}

/// Fills every flag not given on the command line from the config file.
fn merge_config(args: &mut RunArgs) -> CliResult<()> {
    let Some(path) = args.config.clone() else {
        return Ok(());
    };
    let mut file_slices = Vec::new();
    let mut seen: HashMap<String, ()> = HashMap::new();
    for (key, value) in read_config_file(&path)? {
        let v = value.as_str();
        if key != "slice" && seen.insert(key.clone(), ()).is_some() {
            return Err(config_failure(format!("{}: duplicate key {key}", path.display())));
        }
        macro_rules! fill {
            ($field:ident) => {
                if args.$field.is_none() {
                    args.$field = Some(parse_value(&key, v)?);
                }
            };
        }
        match key.as_str() {
            "input" => fill!(input),
            "format" => fill!(format),
            "grid" => {
                if args.spacing.is_none() {
                    fill!(grid)
                }
            }
            "spacing" => {
                if args.grid.is_none() {
                    fill!(spacing)
                }
            }
            "margin" => fill!(margin),
            "rho0" => fill!(rho0),
            "probe" => fill!(probe),
            "time" => fill!(time),
            "time-unit" => fill!(time_unit),
            "solver" => fill!(solver),
            "mh" => fill!(mh),
            "stencil" => fill!(stencil),
            "sigma-ratio" => fill!(sigma_ratio),
            "surface" => fill!(surface),
            "level" => fill!(level),
            "epsilon" => fill!(epsilon),
            "atom-radius" => fill!(atom_radius),
            "out-mesh" => fill!(out_mesh),
            "out-contours" => fill!(out_contours),
            "out-grid" => fill!(out_grid),
            "out-kernel" => fill!(out_kernel),
            "workers" => fill!(workers),
            "slice" => file_slices.push(value.clone()),
            other => return Err(config_failure(format!("{}: unknown key {other}", path.display()))),
        }
    }
    if args.slices.is_empty() {
        args.slices = file_slices;
    }
    Ok(())
}

fn build_config(args: &RunArgs) -> CliResult<Config> {
    let d = Config::default();
    let mut surface = crate::surface::SurfaceRequest::new(match &args.surface {
        Some(s) => s.parse::<SurfaceKind>()?,
        None => d.surface.kind,
    });
    surface.level = args.level;
    surface.epsilon = args.epsilon;
    let grid = match (args.grid, args.spacing) {
        (_, Some(h)) => GridSize::Spacing(h),
        (Some(n), None) => GridSize::Points(n),
        (None, None) => d.grid,
    };
    let config = Config {
        rho0: args.rho0.unwrap_or(d.rho0),
        probe_radius: args.probe.unwrap_or(d.probe_radius),
        time: args.time.unwrap_or(d.time),
        time_unit: match &args.time_unit {
            Some(s) => s.parse::<TimeUnit>()?,
            None => d.time_unit,
        },
        grid,
        margin: args.margin,
        hermite_degree: args.mh.unwrap_or(d.hermite_degree),
        half_width: args.stencil.unwrap_or(d.half_width),
        sigma_ratio: args.sigma_ratio.unwrap_or(d.sigma_ratio),
        surface,
        representative_radius: args.atom_radius,
    };
    config.validate()?;
    Ok(config)
}

fn load_molecule(args: &RunArgs) -> CliResult<Molecule> {
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| config_failure("--input is required"))?;
    let format = match &args.format {
        Some(f) => f.parse::<InputFormat>()?,
        None => match path.extension().and_then(|e| e.to_str()) {
            Some(ext) => ext.parse::<InputFormat>().unwrap_or(InputFormat::Xyzr),
            None => InputFormat::Xyzr,
        },
    };
    Molecule::read_path(path, format).map_err(|e| {
        let f = Failure::from(e);
        Failure {
            code: f.code,
            message: format!("{}: {}", path.display(), f.message),
        }
    })
}

fn parse_slice(spec: &str) -> CliResult<(Axis, f64)> {
    let (axis, coord) = spec
        .split_once('=')
        .ok_or_else(|| config_failure(format!("slice {spec:?} must look like x=0.6")))?;
    Ok((axis.parse::<Axis>()?, parse_value("slice", coord.trim())?))
}

/// Writes through a temporary sibling file and renames it into place, so a
/// failed run never leaves a truncated artifact.
fn write_atomic(path: &Path, fill: impl FnOnce(&mut Vec<u8>) -> crate::error::Result<()>) -> CliResult<()> {
    let mut buf = Vec::new();
    fill(&mut buf)?;
    let name = path
        .file_name()
        .ok_or_else(|| config_failure(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = std::fs::write(&tmp, &buf).and_then(|_| std::fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(Failure {
            code: 3,
            message: format!("cannot write {}: {e}", path.display()),
        });
    }
    Ok(())
}

fn contour_path(base: &Path, set: &ContourSet, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    base.with_file_name(format!("{stem}_{}{}.{ext}", set.axis, set.coordinate))
}

fn secs(d: std::time::Duration) -> String {
    format!("{:.3}", d.as_secs_f64())
}

fn cmd_surface(mut args: RunArgs, out: &mut dyn Write) -> CliResult<i32> {
    merge_config(&mut args)?;
    let config = build_config(&args)?;
    let solver = match &args.solver {
        Some(s) => s.parse::<Solver>()?,
        None => Solver::Lsek,
    };
    let slices = args.slices.iter().map(|s| parse_slice(s)).collect::<CliResult<Vec<_>>>()?;
    let started = Instant::now();
    let molecule = load_molecule(&args)?;
    let workers = args.workers;
    let (run, contours) = pipeline::with_workers(workers, || -> CliResult<_> {
        let run = pipeline::run_surface(&molecule, &config, solver)?;
        let field = if config.surface.kind == SurfaceKind::Sas {
            &run.prepared.initial
        } else {
            &run.evolved.density
        };
        let contours = slices
            .iter()
            .map(|&(axis, c)| slice_contours(field, axis, c, run.level))
            .collect::<crate::error::Result<Vec<_>>>()?;
        Ok((run, contours))
    })??;

    let write_start = Instant::now();
    if let Some(path) = &args.out_mesh {
        write_atomic(path, |buf| run.mesh.write_obj(buf))?;
    }
    if let Some(base) = &args.out_contours {
        for set in &contours {
            write_atomic(&contour_path(base, set, contours.len() > 1), |buf| {
                buf.extend_from_slice(set.to_csv().as_bytes());
                Ok(())
            })?;
        }
    }
    if let Some(path) = &args.out_grid {
        write_atomic(path, |buf| write_grid_dump(&run.evolved.density, buf))?;
    }
    if let Some(path) = &args.out_kernel {
        let kernel = pipeline::kernel_for(&run.prepared.spec, &config, run.prepared.rate, config.time)?;
        write_atomic(path, |buf| {
            buf.extend_from_slice(kernel.weights(Axis::X).to_csv().as_bytes());
            Ok(())
        })?;
    }
    let t_write = write_start.elapsed();

    let spec = &run.prepared.spec;
    let l1 = run
        .evolved
        .kernel_l1
        .map(|v| format!("{v:.12}"))
        .unwrap_or_else(|| "none".into());
    let steps = run.evolved.steps.map(|s| s.to_string()).unwrap_or_else(|| "1".into());
    let contour_points: usize = contours.iter().map(|c| c.point_count()).sum();
    let _ = writeln!(
        out,
        "solver={solver} atoms={} nodes={} grid={} spacing={:.6} steps={steps} kernel_l1={l1} surface={} level={} vertices={} triangles={} closed={} slices={} contour_points={contour_points} t_grid={} t_evolve={} t_extract={} t_write={} t_total={}",
        molecule.len(),
        spec.len(),
        spec.counts[0],
        spec.spacing[0],
        config.surface.kind,
        run.level,
        run.mesh.vertices.len(),
        run.mesh.triangles.len(),
        run.mesh.is_closed(),
        contours.len(),
        secs(run.timings.grid),
        secs(run.timings.evolve),
        secs(run.timings.extract),
        secs(t_write),
        secs(started.elapsed()),
    );
    Ok(0)
}

/// Surface distance, treating two empty meshes as identical and one empty
/// mesh as infinitely far.
fn surface_gap(a: &TriangleMesh, b: &TriangleMesh) -> crate::error::Result<f64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Ok(0.0),
        (false, false) => mesh_distance(a, b),
        _ => Ok(f64::INFINITY),
    }
}

fn cmd_compare(mut args: CompareArgs, out: &mut dyn Write) -> CliResult<i32> {
    merge_config(&mut args.run)?;
    let config = build_config(&args.run)?;
    if !(args.bound > 0.0) {
        return Err(config_failure(format!("bound must be positive, got {}", args.bound)));
    }
    let fd_time = args.fd_time.unwrap_or(config.time);
    if !(fd_time >= 0.0 && fd_time.is_finite()) {
        return Err(config_failure(format!("fd time must be >= 0, got {fd_time}")));
    }
    let molecule = load_molecule(&args.run)?;
    let report = pipeline::with_workers(args.run.workers, || -> CliResult<_> {
        let prep = pipeline::prepare(&molecule, &config)?;
        let t0 = Instant::now();
        let lsek = pipeline::evolve(&prep, &config, Solver::Lsek, config.time)?;
        let t_lsek = t0.elapsed();
        let t0 = Instant::now();
        let fd = pipeline::evolve(&prep, &config, Solver::Fd, fd_time)?;
        let t_fd = t0.elapsed();
        let (level, mesh_a) = pipeline::extract(&prep, &lsek.density, &config)?;
        let (_, mesh_b) = pipeline::extract(&prep, &fd.density, &config)?;
        let band = pipeline::band_difference(&prep, &lsek.density, &fd.density)?;
        let gap = surface_gap(&mesh_a, &mesh_b)?;
        Ok((prep.spec, level, band, gap, t_lsek, t_fd, fd.steps.unwrap_or(0)))
    })??;
    let (spec, level, band, gap, t_lsek, t_fd, steps) = report;
    let h = spec.min_spacing();
    let bound = args.bound * h;
    let pass = gap <= bound;
    let _ = writeln!(
        out,
        "atoms={} nodes={} spacing={h:.6} surface={} level={level} time={} fd_time={fd_time} fd_steps={steps} band_max_diff={band:.6e} mesh_distance={gap:.6} mesh_distance_h={:.4} bound={bound:.6} result={} t_lsek={} t_fd={}",
        molecule.len(),
        spec.len(),
        config.surface.kind,
        config.time,
        gap / h,
        if pass { "pass" } else { "fail" },
        secs(t_lsek),
        secs(t_fd),
    );
    Ok(if pass { 0 } else { 1 })
}

fn cmd_bench(args: BenchArgs, out: &mut dyn Write) -> CliResult<i32> {
    if args.size < 2 {
        return Err(config_failure(format!("benchmark size must be at least 2, got {}", args.size)));
    }
    let (size, stencil) = pipeline::with_workers(args.workers, || -> CliResult<_> {
        let size = bench::size_scaling(args.size, args.stencil, args.mh, args.repeats)?;
        let stencil = bench::stencil_scaling(args.size, args.stencil, args.mh, args.repeats)?;
        Ok((size, stencil))
    })??;
    for t in [size.small, size.large, stencil.large] {
        let _ = writeln!(
            out,
            "bench n={} stencil={} nodes={} sweep_x={} sweep_y={} sweep_z={} step={} nodes_per_s={:.4e}",
            t.n,
            t.half_width,
            t.nodes(),
            secs(t.sweeps[0]),
            secs(t.sweeps[1]),
            secs(t.sweeps[2]),
            secs(t.total),
            t.nodes_per_second(),
        );
    }
    let _ = writeln!(
        out,
        "scaling size_ratio={:.3} expected=8 stencil_ratio={:.3} expected=2",
        size.ratio, stencil.ratio
    );
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(list: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = std::iter::once("mmsurf").chain(list.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn missing_input_file() {
        let (code, _, err) = run_args(&["surface", "--input", "/nonexistent/mol.xyzr"]);
        assert_eq!(code, 3);
        assert!(err.contains("/nonexistent/mol.xyzr"));
    }

    #[test]
    fn bad_flag_values() {
        assert_eq!(run_args(&["surface", "--input", "x", "--rho0", "-1"]).0, 2);
        assert_eq!(run_args(&["surface", "--input", "x", "--surface", "blob"]).0, 2);
        assert_eq!(run_args(&["surface", "--grid", "10", "--spacing", "0.1"]).0, 2);
        assert_eq!(run_args(&["bench", "--size", "0"]).0, 2);
        assert_eq!(run_args(&["surface"]).0, 2);
    }

    #[test]
    fn slice_syntax() {
        assert_eq!(parse_slice("x=0.6").unwrap(), (Axis::X, 0.6));
        assert_eq!(parse_slice("Z = -1").unwrap(), (Axis::Z, -1.0));
        assert_eq!(parse_slice("q=1").unwrap_err().code, 2);
        assert_eq!(parse_slice("x0.6").unwrap_err().code, 2);
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# experiment\nrho0 = 50\nprobe=1.4\nslice = x=0.6\nsigma_ratio=3\n").unwrap();
        let mut args = RunArgs {
            config: Some(path.clone()),
            probe: Some(1.2),
            ..RunArgs::default()
        };
        merge_config(&mut args).unwrap();
        let config = build_config(&args).unwrap();
        assert_eq!(config.rho0, 50.0);
        assert_eq!(config.probe_radius, 1.2);
        assert_eq!(config.sigma_ratio, 3.0);
        assert_eq!(args.slices, vec!["x=0.6".to_string()]);

        std::fs::write(&path, "colour=blue\n").unwrap();
        let mut args = RunArgs {
            config: Some(path),
            ..RunArgs::default()
        };
        assert_eq!(merge_config(&mut args).unwrap_err().code, 2);
    }

    #[test]
    fn atomic_write_leaves_nothing_on_failure() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.obj");
        let r = write_atomic(&path, |_| Err(Error::Numeric { term: 3, message: "boom".into() }));
        assert_eq!(r.unwrap_err().code, 4);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
        write_atomic(&path, |b| {
            b.extend_from_slice(b"v 0 0 0\n");
            Ok(())
        })
        .unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "v 0 0 0\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
