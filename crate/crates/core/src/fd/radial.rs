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

use crate::error::{Error, Result};

/// Density as a function of distance from an isolated atom's center.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    /// Linear interpolation, clamped to the sampled range.
    pub fn value_at(&self, r: f64) -> f64 {
        let first = self.radii[0];
        let last = *self.radii.last().expect("profile is never empty");
        if r <= first {
            return self.values[0];
        }
        if r >= last {
            return *self.values.last().expect("profile is never empty");
        }
        let dr = self.radii[1] - self.radii[0];
        let i = (((r - first) / dr).floor() as usize).min(self.radii.len() - 2);
        let f = (r - self.radii[i]) / dr;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Finite-volume solver for the spherically symmetric problem around one
/// atom: zero flux through the atomic surface, bulk density at `r_max`, and
/// an empty solvent-accessible shell at `t = 0`.
#[derive(Clone, Debug)]
pub struct RadialSolver {
    atom_radius: f64,
    probe_radius: f64,
    rho0: f64,
    dr: f64,
    r_max: f64,
    dt: Option<f64>,
}

impl RadialSolver {
    pub fn new(atom_radius: f64, probe_radius: f64, rho0: f64, dr: f64, r_max: f64) -> Self {
        Self {
            atom_radius,
            probe_radius,
            rho0,
            dr,
            r_max,
            dt: None,
        }
    }

    /// Overrides the automatically chosen time step. Only stability is
    /// checked; steps above the ordering bound may break monotonicity.
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    fn radii(&self) -> Vec<f64> {
        let n = ((self.r_max - self.atom_radius) / self.dr).ceil() as usize;
        (0..=n).map(|i| self.atom_radius + i as f64 * self.dr).collect()
    }

    /// Face conductances `r_f² / dr` and control volumes for each node.
    fn geometry(&self, radii: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let half = self.dr / 2.0;
        let faces = radii[..radii.len() - 1]
            .iter()
            .map(|r| (r + half).powi(2) / self.dr)
            .collect();
        let volumes = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let inner = if i == 0 { r } else { r - half };
                ((r + half).powi(3) - inner.powi(3)) / 3.0
            })
            .collect();
        (faces, volumes)
    }

    fn stability_bound(faces: &[f64], volumes: &[f64]) -> f64 {
        let mut bound = f64::INFINITY;
        for i in 0..faces.len() {
            let out = faces[i] + if i > 0 { faces[i - 1] } else { 0.0 };
            bound = bound.min(volumes[i] / out);
        }
        bound
    }

    /// Largest step for which neighbouring differences keep their sign, so a
    /// non-decreasing profile stays non-decreasing. Tighter than stability at
    /// the half-volume wall cell.
    fn ordering_bound(faces: &[f64], volumes: &[f64]) -> f64 {
        let mut bound = f64::INFINITY;
        for i in 0..faces.len() {
            let outer = if i + 1 < faces.len() { 1.0 / volumes[i + 1] } else { 0.0 };
            bound = bound.min(1.0 / (faces[i] * (1.0 / volumes[i] + outer)));
        }
        bound
    }

    fn validate(&self, t: f64) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        positive("atom radius", self.atom_radius)?;
        positive("bulk density", self.rho0)?;
        positive("dr", self.dr)?;
        if !(self.probe_radius >= 0.0 && self.probe_radius.is_finite()) {
            return Err(Error::Domain(format!(
                "probe radius must be >= 0, got {}",
                self.probe_radius
            )));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be >= 0, got {t}")));
        }
        let needed = self.atom_radius + self.probe_radius + 4.0 * (2.0 * t).sqrt();
        if !(self.r_max > needed) {
            return Err(Error::Domain(format!(
                "r_max = {} must exceed {needed} (SAS radius plus four diffusion lengths)",
                self.r_max
            )));
        }
        Ok(())
    }

    pub fn solve(&self, t: f64) -> Result<RadialProfile> {
        self.solve_observed(t, |_, _| {})
    }

    /// Solves to `t`, calling `observe(time, values)` after every step.
    pub fn solve_observed(&self, t: f64, mut observe: impl FnMut(f64, &[f64])) -> Result<RadialProfile> {
        self.validate(t)?;
        let radii = self.radii();
        let sas = self.atom_radius + self.probe_radius;
        let mut values: Vec<f64> = radii
            .iter()
            .map(|&r| if r <= sas { 0.0 } else { self.rho0 })
            .collect();
        let (faces, volumes) = self.geometry(&radii);
        let bound = Self::stability_bound(&faces, &volumes);
        let dt_max = match self.dt {
            Some(dt) if !(dt > 0.0) || dt > bound => return Err(Error::Stability { dt, bound }),
            Some(dt) => dt,
            None => 0.9 * bound.min(Self::ordering_bound(&faces, &volumes)),
        };
        if t > 0.0 {
            let steps = (t / dt_max).ceil() as usize;
            let dt = t / steps as f64;
            let last = values.len() - 1;
            let mut next = values.clone();
            for step in 0..steps {
                for i in 0..last {
                    let mut flux = faces[i] * (values[i + 1] - values[i]);
                    if i > 0 {
                        flux -= faces[i - 1] * (values[i] - values[i - 1]);
                    }
                    next[i] = values[i] + dt * flux / volumes[i];
                }
                next[last] = self.rho0;
                std::mem::swap(&mut values, &mut next);
                observe((step + 1) as f64 * dt, &values);
            }
        }
        Ok(RadialProfile { radii, values })
    }
}

/// Radial density profile at time `t`; see [`RadialSolver`].
pub fn radial_solve(
    atom_radius: f64,
    probe_radius: f64,
    rho0: f64,
    t: f64,
    dr: f64,
    r_max: f64,
) -> Result<RadialProfile> {
    RadialSolver::new(atom_radius, probe_radius, rho0, dr, r_max).solve(t)
}
