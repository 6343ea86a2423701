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

//! Isosurfaces, slice contours and mesh measurements.

mod contour;
mod distance;
mod inside;
mod level;
mod marching_cubes;
mod mesh;

pub use contour::{slice_contours, ContourSet, Polyline};
pub use distance::{mesh_distance, point_triangle_distance2, sample_points, TriangleLocator};
pub use inside::InsideTester;
pub use level::{
    radial_level, resolve_level, LevelContext, SurfaceKind, SurfaceRequest, SES_LEVEL_FRACTION,
    VDW_EPSILON_FRACTION,
};
pub use marching_cubes::marching_cubes;
pub use mesh::TriangleMesh;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, ScalarGrid3};
    use crate::Axis;

    fn radial(h: f64, half: f64) -> ScalarGrid3 {
        let n = (2.0 * half / h).round() as usize + 1;
        let spec = GridSpec::new([-half; 3], [h; 3], [n; 3]).unwrap();
        ScalarGrid3::from_fn(spec, |p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
    }

    #[test]
    fn identical_meshes_have_zero_distance() {
        let mesh = marching_cubes(&radial(0.2, 3.0), 2.0);
        assert!(mesh_distance(&mesh, &mesh).unwrap() < 1e-12);
    }

    #[test]
    fn concentric_spheres() {
        let g = radial(0.1, 3.0);
        let d = mesh_distance(&marching_cubes(&g, 2.0), &marching_cubes(&g, 2.5)).unwrap();
        assert!((d - 0.5).abs() / 0.5 < 0.02, "distance {d}");
    }

    #[test]
    fn slice_agrees_with_mesh() {
        let h = 0.1;
        let g = radial(h, 3.0);
        let mesh = marching_cubes(&g, 2.0);
        let locator = TriangleLocator::new(&mesh).unwrap();
        for axis in Axis::ALL {
            let set = slice_contours(&g, axis, 0.6, 2.0).unwrap();
            let (u, v) = axis.plane();
            for line in &set.polylines {
                for p in &line.points {
                    let mut q = [0.0; 3];
                    q[axis.index()] = 0.6;
                    q[u.index()] = p[0];
                    q[v.index()] = p[1];
                    assert!(locator.distance(q) < h);
                }
            }
        }
    }

    #[test]
    fn higher_level_encloses_more() {
        // Density rising away from a centre, as around a molecule.
        let g = radial(0.1, 3.0);
        let levels = [0.5, 1.0, 1.7, 2.4];
        let vols: Vec<f64> = levels
            .iter()
            .map(|&l| marching_cubes(&g, l).volume().unwrap())
            .collect();
        assert!(vols.windows(2).all(|w| w[0] <= w[1]), "{vols:?}");
    }
}
