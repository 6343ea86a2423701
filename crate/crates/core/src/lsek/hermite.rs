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

/// Hermite functions `h_n(x) = exp(-x²) H_n(x)` for `n = 0..=n_max`.
///
/// Evaluated with the damped three-term recurrence
/// `h_{n+1} = 2x·h_n − 2n·h_{n−1}`, which stays finite for `n_max ≤ 128` and
/// `|x| ≤ 12` where the polynomial alone would overflow once multiplied by
/// a factorial-sized coefficient.
pub fn hermite_h_sequence(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("hermite argument must be finite, got {x}")));
    }
    let mut h = Vec::with_capacity(n_max + 1);
    h.push((-x * x).exp());
    if n_max >= 1 {
        h.push(2.0 * x * h[0]);
    }
    for n in 1..n_max {
        let next = 2.0 * x * h[n] - 2.0 * n as f64 * h[n - 1];
        h.push(next);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        let h = hermite_h_sequence(4, 0.0).unwrap();
        assert_eq!(h, vec![1.0, 0.0, -2.0, 0.0, 12.0]);
    }

    #[test]
    fn first_order_closed_form() {
        let h = hermite_h_sequence(1, 1.0).unwrap();
        assert!((h[1] - 0.7357588823428847).abs() < 1e-15);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn degree_88_matches_high_precision_reference() {
        // exp(-x²)·H_88(x) at x = 7.4, evaluated with 60-digit arithmetic.
        let reference = 4.119955347660589165207238e67;
        let h = hermite_h_sequence(88, 7.4).unwrap();
        assert!(((h[88] - reference) / reference).abs() < 1e-10);
    }

    #[test]
    fn finite_over_supported_range() {
        for i in 0..=240 {
            let x = -12.0 + 0.1 * i as f64;
            assert!(hermite_h_sequence(128, x).unwrap().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn parity() {
        let a = hermite_h_sequence(20, 1.3).unwrap();
        let b = hermite_h_sequence(20, -1.3).unwrap();
        for (n, (p, q)) in a.iter().zip(&b).enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(*p, sign * q);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(hermite_h_sequence(3, f64::NAN).is_err());
        assert!(hermite_h_sequence(3, f64::INFINITY).is_err());
    }
}
