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

//! Local spectral evolution kernel: Hermite-series weights and the separable
//! one-step evolution they drive.

mod evolve;
mod hermite;
mod kernel;

pub use evolve::{evolve_3d, evolve_line, SeparableKernel};
pub use hermite::hermite_h_sequence;
pub use kernel::{
    kernel_weights, sigma_t, KernelParams, KernelWeights, DEFAULT_HALF_WIDTH,
    DEFAULT_HERMITE_DEGREE, DEFAULT_SIGMA_RATIO,
};
