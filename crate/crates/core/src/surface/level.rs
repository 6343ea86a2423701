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
use crate::fd::RadialSolver;

/// Default solvent-excluded isovalue as a fraction of the bulk density.
pub const SES_LEVEL_FRACTION: f64 = 4e-4;
/// Default van der Waals isovalue as a fraction of the bulk density.
pub const VDW_EPSILON_FRACTION: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    Vdw,
    Sas,
    Ses,
    Midway,
    Custom,
}

impl std::str::FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vdw" => Ok(Self::Vdw),
            "sas" => Ok(Self::Sas),
            "ses" => Ok(Self::Ses),
            "midway" => Ok(Self::Midway),
            "custom" => Ok(Self::Custom),
            other => Err(Error::Config(format!("unknown surface kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Vdw => "vdw",
            Self::Sas => "sas",
            Self::Ses => "ses",
            Self::Midway => "midway",
            Self::Custom => "custom",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceRequest {
    pub kind: SurfaceKind,
    /// Explicit isovalue; required for `Custom`, overrides the `Ses` default.
    pub level: Option<f64>,
    /// Small positive isovalue standing in for ρ = 0; defaults to
    /// `VDW_EPSILON_FRACTION · rho0`.
    pub epsilon: Option<f64>,
}

impl SurfaceRequest {
    pub fn new(kind: SurfaceKind) -> Self {
        Self {
            kind,
            level: None,
            epsilon: None,
        }
    }
}

/// Physical setting needed to turn a request into an isovalue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelContext {
    pub rho0: f64,
    pub probe_radius: f64,
    /// Diffusion coefficient times elapsed time, in Å².
    pub spread: f64,
    /// Radius used to calibrate the midway level; `None` for an empty molecule.
    pub atom_radius: Option<f64>,
}

/// Density of an isolated atom's profile at `r`, from the radial solver.
pub fn radial_level(ctx: &LevelContext, r: f64) -> Result<f64> {
    let a = ctx
        .atom_radius
        .ok_or_else(|| Error::Domain("midway level needs at least one atom".into()))?;
    let dr = if ctx.spread > 1.0 { 0.02 } else { 0.005 };
    let r_max = a + ctx.probe_radius + 4.0 * (2.0 * ctx.spread).sqrt() + 2.0;
    let profile = RadialSolver::new(a, ctx.probe_radius, ctx.rho0, dr, r_max).solve(ctx.spread)?;
    Ok(profile.value_at(r))
}

/// Isovalue for a surface request. `Sas` returns half the bulk density and
/// is meant for the initial, unevolved field.
pub fn resolve_level(req: &SurfaceRequest, ctx: &LevelContext) -> Result<f64> {
    let level = match req.kind {
        SurfaceKind::Vdw => {
            let eps = req.epsilon.unwrap_or(VDW_EPSILON_FRACTION * ctx.rho0);
            if !(eps > 0.0) {
                return Err(Error::Config(format!("epsilon must be positive, got {eps}")));
            }
            eps
        }
        SurfaceKind::Sas => ctx.rho0 / 2.0,
        SurfaceKind::Ses => req.level.unwrap_or(SES_LEVEL_FRACTION * ctx.rho0),
        SurfaceKind::Midway => {
            let a = ctx
                .atom_radius
                .ok_or_else(|| Error::Domain("midway level needs at least one atom".into()))?;
            radial_level(ctx, a + ctx.probe_radius / 2.0)?
        }
        SurfaceKind::Custom => req
            .level
            .ok_or_else(|| Error::Config("custom surface requires --level".into()))?,
    };
    if !level.is_finite() {
        return Err(Error::Numeric {
            term: 0,
            message: format!("isovalue {level} is not finite"),
        });
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> LevelContext {
        LevelContext {
            rho0: 100.0,
            probe_radius: 1.5,
            spread: 0.2,
            atom_radius: Some(1.7),
        }
    }

    #[test]
    fn defaults() {
        let c = ctx();
        let ses = resolve_level(&SurfaceRequest::new(SurfaceKind::Ses), &c).unwrap();
        assert!((ses - 0.04).abs() < 1e-15);
        let vdw = SurfaceRequest {
            epsilon: Some(0.1),
            ..SurfaceRequest::new(SurfaceKind::Vdw)
        };
        assert_eq!(resolve_level(&vdw, &c).unwrap(), 0.1);
        assert_eq!(resolve_level(&SurfaceRequest::new(SurfaceKind::Sas), &c).unwrap(), 50.0);
    }

    #[test]
    fn custom_needs_level() {
        let c = ctx();
        assert!(matches!(
            resolve_level(&SurfaceRequest::new(SurfaceKind::Custom), &c),
            Err(Error::Config(_))
        ));
        let req = SurfaceRequest {
            level: Some(7.5),
            ..SurfaceRequest::new(SurfaceKind::Custom)
        };
        assert_eq!(resolve_level(&req, &c).unwrap(), 7.5);
    }

    #[test]
    fn midway_between_surfaces() {
        let c = ctx();
        let mid = resolve_level(&SurfaceRequest::new(SurfaceKind::Midway), &c).unwrap();
        assert!(mid > 0.0 && mid < 100.0);
        let empty = LevelContext { atom_radius: None, ..c };
        assert!(matches!(
            resolve_level(&SurfaceRequest::new(SurfaceKind::Midway), &empty),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn parse_kind() {
        assert_eq!("SES".parse::<SurfaceKind>().unwrap(), SurfaceKind::Ses);
        assert!("blob".parse::<SurfaceKind>().is_err());
    }
}
