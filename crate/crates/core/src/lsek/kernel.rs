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

use std::fmt::Write as _;

use super::hermite::hermite_h_sequence;
use crate::error::{Error, Result};

/// Window ratio σ/h used with the default Hermite degree and stencil.
pub const DEFAULT_SIGMA_RATIO: f64 = 3.05;
pub const DEFAULT_HERMITE_DEGREE: usize = 88;
pub const DEFAULT_HALF_WIDTH: usize = 32;

/// Configuration of the one-dimensional evolution kernel along one axis.
///
/// Lengths are in Å; `diffusion · time` must be in Å² so that
/// `σ_t² = σ² + 2·D·t` is a squared length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    /// Highest Hermite polynomial degree `M_h`; must be even.
    pub hermite_degree: usize,
    /// Stencil half width `M`; the stencil has `2M + 1` taps.
    pub half_width: usize,
    /// Window parameter σ.
    pub sigma: f64,
    /// Grid spacing h.
    pub spacing: f64,
    pub diffusion: f64,
    pub time: f64,
}

impl KernelParams {
    /// `M_h = 88`, `M = 32`, `σ = 3.05 h`.
    pub fn standard(spacing: f64, diffusion: f64, time: f64) -> Self {
        Self {
            hermite_degree: DEFAULT_HERMITE_DEGREE,
            half_width: DEFAULT_HALF_WIDTH,
            sigma: DEFAULT_SIGMA_RATIO * spacing,
            spacing,
            diffusion,
            time,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hermite_degree == 0 || !self.hermite_degree.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "hermite degree must be even and positive, got {}",
                self.hermite_degree
            )));
        }
        if self.half_width == 0 {
            return Err(Error::Config("stencil half width must be positive".into()));
        }
        for (name, v) in [("sigma", self.sigma), ("spacing", self.spacing)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("diffusion", self.diffusion), ("time", self.time)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Time-broadened window width `√(σ² + 2·D·t)` for constant `D`.
pub fn sigma_t(params: &KernelParams) -> f64 {
    (params.sigma * params.sigma + 2.0 * params.diffusion * params.time).sqrt()
}

/// Stencil weights `K(l·h, t)` for `l = −M..=M`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelWeights {
    half_width: usize,
    /// `taps[m]` is the weight at offset `l = m − M`.
    taps: Vec<f64>,
}

impl KernelWeights {
    /// Builds weights from the non-negative half `[w_0, w_1, …, w_M]`.
    pub fn from_half(half: &[f64]) -> Self {
        assert!(!half.is_empty(), "need at least the center tap");
        let m = half.len() - 1;
        let mut taps = Vec::with_capacity(2 * m + 1);
        taps.extend(half.iter().rev());
        taps.extend(&half[1..]);
        Self { half_width: m, taps }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Weight at signed offset `l`; zero outside the stencil.
    pub fn get(&self, l: isize) -> f64 {
        let m = self.half_width as isize;
        if l.abs() > m {
            0.0
        } else {
            self.taps[(l + m) as usize]
        }
    }

    /// All `2M + 1` taps, from `l = −M` to `l = M`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn sum(&self) -> f64 {
        // pair symmetric taps so the result does not depend on traversal direction
        let m = self.half_width;
        let mut s = self.taps[m];
        for l in 1..=m {
            s += self.taps[m + l] + self.taps[m - l];
        }
        s
    }

    /// `‖w‖₁`; bounds the overshoot of the evolved field beyond its input range.
    pub fn l1_norm(&self) -> f64 {
        let m = self.half_width;
        let mut s = self.taps[m].abs();
        for l in 1..=m {
            s += self.taps[m + l].abs() + self.taps[m - l].abs();
        }
        s
    }

    /// `l,weight` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,weight\n");
        let m = self.half_width as isize;
        for (i, w) in self.taps.iter().enumerate() {
            let _ = writeln!(out, "{},{w:e}", i as isize - m);
        }
        out
    }
}

/// Evaluates the local spectral evolution kernel on the stencil.
///
/// `K(x,t) = (h/σ) Σ_{n=0}^{M_h/2} c_n h_{2n}(x / (√2 σ_t))` with
/// `c_n = (−1/4)ⁿ (σ/σ_t)^{2n+1} / (√(2π) n!)`. The coefficients come from
/// `c_{n+1} = c_n · (−1/4) (σ/σ_t)² / (n+1)` so no factorial is ever formed.
pub fn kernel_weights(params: &KernelParams) -> Result<KernelWeights> {
    params.validate()?;
    let st = sigma_t(params);
    let ratio = params.sigma / st;
    let step = -0.25 * ratio * ratio;
    let c0 = ratio / (2.0 * std::f64::consts::PI).sqrt();
    let prefactor = params.spacing / params.sigma;
    let terms = params.hermite_degree / 2;

    let mut half = Vec::with_capacity(params.half_width + 1);
    for l in 0..=params.half_width {
        let u = l as f64 * params.spacing / (std::f64::consts::SQRT_2 * st);
        let h = hermite_h_sequence(params.hermite_degree, u)?;
        let mut c = c0;
        let mut acc = 0.0;
        for n in 0..=terms {
            let term = c * h[2 * n];
            if !term.is_finite() {
                return Err(Error::Numeric {
                    term: n,
                    message: format!("non-finite series term at offset {l}"),
                });
            }
            acc += term;
            c *= step / (n + 1) as f64;
        }
        let w = prefactor * acc;
        if !w.is_finite() {
            return Err(Error::Numeric {
                term: terms,
                message: format!("non-finite weight at offset {l}"),
            });
        }
        half.push(w);
    }
    Ok(KernelWeights::from_half(&half))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(h: f64, t: f64) -> KernelParams {
        KernelParams::standard(h, 1.0, t)
    }

    #[test]
    fn sigma_t_examples() {
        let p = KernelParams {
            sigma: 1.525,
            ..params(0.5, 0.0)
        };
        assert_eq!(sigma_t(&p), 1.525);
        let p = KernelParams { time: 12.0, ..p };
        assert!((sigma_t(&p) - 26.325625f64.sqrt()).abs() < 1e-14);
        assert!((sigma_t(&p) - 5.130850).abs() < 1e-6);
        let p = params(10.0 / 199.0, 12.0);
        assert!((sigma_t(&p) - 4.9013764).abs() < 1e-6);
    }

    #[test]
    fn standard_stencil_has_65_taps() {
        let w = kernel_weights(&params(0.1, 1.0)).unwrap();
        assert_eq!(w.taps().len(), 65);
        assert_eq!(w.half_width(), 32);
    }

    #[test]
    fn weights_are_exactly_even() {
        for (h, t) in [(0.05, 0.0), (0.5, 12.0), (0.1, 3.3)] {
            let w = kernel_weights(&params(h, t)).unwrap();
            for l in 1..=32 {
                assert_eq!(w.get(l), w.get(-l));
            }
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn matches_high_precision_reference() {
        // direct 50-digit evaluation with explicit factorials and Hermite polynomials
        let cases = [
            (0.0, 0, 0.98733650355576138114),
            (0.0, 1, 0.01237344315464445912),
            (0.0, 5, 0.0070565699365409944967),
            (0.0, 20, -3.1100015567157985053e-7),
            (12.0, 0, 0.040716875991909993466),
            (12.0, 1, 0.040505360229893186474),
            (12.0, 5, 0.035745854940953992236),
            (12.0, 20, 0.0050698402929885737215),
            (12.0, 32, 0.0001965790411939773644),
        ];
        for (t, l, reference) in cases {
            let w = kernel_weights(&params(0.5, t)).unwrap();
            let got = w.get(l);
            assert!(
                (got - reference).abs() < 1e-13,
                "t={t} l={l}: {got} vs {reference}"
            );
        }
    }

    #[test]
    fn zero_time_kernel_sums_to_one() {
        for h in [0.05, 0.1, 0.5] {
            let w = kernel_weights(&params(h, 0.0)).unwrap();
            assert!((w.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn l1_norm_at_least_sum() {
        let w = kernel_weights(&params(0.5, 0.0)).unwrap();
        assert!(w.l1_norm() >= w.sum());
        assert!(w.l1_norm() > 1.0);
    }

    #[test]
    fn invalid_params_rejected() {
        let p = KernelParams {
            hermite_degree: 87,
            ..params(0.5, 1.0)
        };
        assert!(matches!(kernel_weights(&p), Err(Error::Config(_))));
        let p = KernelParams {
            half_width: 0,
            ..params(0.5, 1.0)
        };
        assert!(kernel_weights(&p).is_err());
        let p = KernelParams {
            time: -1.0,
            ..params(0.5, 1.0)
        };
        assert!(kernel_weights(&p).is_err());
    }

    #[test]
    fn csv_export() {
        let w = KernelWeights::from_half(&[0.5, 0.25]);
        let csv = w.to_csv();
        assert_eq!(csv.lines().next(), Some("l,weight"));
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("-1,"));
    }
}
