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

//! End-to-end runs of the `mmsurf` binary.

use std::collections::HashMap;
use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};

use mmsurf::grid::read_grid_dump;

fn mmsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmsurf")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn fields(line: &str) -> HashMap<String, String> {
    line.split_whitespace()
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap_or_else(|| panic!("not key=value: {kv}"));
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn single_atom(dir: &Path) -> String {
    let path = dir.join("atom.xyzr");
    fs::write(&path, "# one carbon\n0 0 0 1.7\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn missing_input_exits_with_parse_code() {
    let out = mmsurf(&["surface", "--input", "/nonexistent/molecule.xyzr"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/molecule.xyzr"));
}

#[test]
fn malformed_input_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.xyzr");
    fs::write(&path, "0 0 zero 1.7\n").unwrap();
    let out = mmsurf(&["surface", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_configuration_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let input = single_atom(dir.path());
    assert_eq!(mmsurf(&["surface", "--input", &input, "--rho0", "-1"]).status.code(), Some(2));
    assert_eq!(mmsurf(&["surface", "--input", &input, "--surface", "blob"]).status.code(), Some(2));
    assert_eq!(mmsurf(&["surface", "--input", &input, "--grid", "50", "--spacing", "0.1"]).status.code(), Some(2));
}

#[test]
fn vdw_sphere_run_writes_mesh_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let input = single_atom(dir.path());
    let mesh = dir.path().join("atom.obj");
    let out = mmsurf(&[
        "surface", "--input", &input, "--grid", "64", "--surface", "vdw", "--epsilon", "0.1",
        "--out-mesh", mesh.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fields(stdout(&out).lines().last().unwrap());
    for key in ["nodes", "kernel_l1", "level", "vertices", "triangles", "t_evolve", "t_total"] {
        assert!(summary.contains_key(key), "missing {key}");
    }
    assert_eq!(summary["closed"], "true");
    assert_eq!(summary["level"].parse::<f64>().unwrap(), 0.1);
    let spacing: f64 = summary["spacing"].parse().unwrap();

    let obj = fs::read_to_string(&mesh).unwrap();
    let mut radii = Vec::new();
    for line in obj.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let v: Vec<f64> = it.map(|x| x.parse().unwrap()).collect();
                radii.push((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
            }
            Some("f") => assert_eq!(it.count(), 3),
            _ => panic!("unexpected record {line}"),
        }
    }
    assert_eq!(radii.len().to_string(), summary["vertices"]);
    assert!(radii.iter().all(|r| (r - 1.7).abs() < 1.5 * spacing));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let input = single_atom(dir.path());
    let run = |workers: &str| {
        let mesh = dir.path().join(format!("w{workers}.obj"));
        let grid = dir.path().join(format!("w{workers}.grid"));
        let out = mmsurf(&[
            "surface", "--input", &input, "--grid", "64", "--workers", workers, "--slice", "z=0.3",
            "--out-mesh", mesh.to_str().unwrap(), "--out-grid", grid.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        (fs::read(mesh).unwrap(), fs::read(grid).unwrap())
    };
    let serial = run("1");
    assert_eq!(serial, run("2"));
    assert_eq!(serial, run("8"));
}

#[test]
fn grid_dump_and_contours_are_readable() {
    let dir = tempfile::tempdir().unwrap();
    let input = single_atom(dir.path());
    let grid = dir.path().join("density.grid");
    let csv = dir.path().join("slices.csv");
    let out = mmsurf(&[
        "surface", "--input", &input, "--grid", "64", "--slice", "x=0.6", "--slice", "y=0",
        "--out-grid", grid.to_str().unwrap(), "--out-contours", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dump = read_grid_dump(BufReader::new(fs::File::open(&grid).unwrap())).unwrap();
    assert_eq!(dump.spec.counts, [64; 3]);
    assert!(dump.values.iter().all(|v| v.is_finite()));
    for name in ["slices_x0.6.csv", "slices_y0.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().next(), Some("polyline_id,u,v"));
        assert!(text.lines().count() > 10, "{name}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = single_atom(dir.path());
    let config = dir.path().join("run.conf");
    fs::write(&config, format!("input = {input}\ngrid = 64\nsurface = sas\n")).unwrap();
    let out = mmsurf(&["surface", "--config", config.to_str().unwrap(), "--surface", "vdw"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fields(stdout(&out).lines().last().unwrap());
    assert_eq!(summary["surface"], "vdw");
    assert_eq!(summary["grid"], "64");

    fs::write(&config, "grid = 64\ncolour = blue\n").unwrap();
    let out = mmsurf(&["surface", "--input", &input, "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_passes_on_an_empty_molecule() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.xyzr");
    fs::write(&path, "# nothing here\n").unwrap();
    let out = mmsurf(&["compare", "--input", path.to_str().unwrap(), "--grid", "24", "--margin", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fields(stdout(&out).lines().last().unwrap());
    assert_eq!(report["result"], "pass");
    assert_eq!(report["mesh_distance"].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn compare_fails_when_times_differ() {
    let dir = tempfile::tempdir().unwrap();
    let input = single_atom(dir.path());
    // The midway surface moves with time; the single-atom SES does not.
    let agree = mmsurf(&["compare", "--input", &input, "--grid", "64", "--surface", "midway"]);
    assert_eq!(agree.status.code(), Some(0), "{}", stdout(&agree));
    let skewed = mmsurf(&["compare", "--input", &input, "--grid", "64", "--surface", "midway", "--fd-time", "30"]);
    assert_eq!(skewed.status.code(), Some(1), "{}", stdout(&skewed));
    let report = fields(stdout(&skewed).lines().last().unwrap());
    assert_eq!(report["result"], "fail");
    assert!(report["mesh_distance"].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn bench_rejects_zero_size() {
    assert_eq!(mmsurf(&["bench", "--size", "0"]).status.code(), Some(2));
}
