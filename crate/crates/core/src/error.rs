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

use thiserror::Error;

/// Errors produced anywhere in the surface pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Well-formed input that violates a domain rule (e.g. a non-positive radius).
    #[error("line {line}: {message}")]
    Validation { line: usize, message: String },

    #[error("no radius known for element {0:?}")]
    UnknownElement(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A non-finite value appeared while evaluating a series.
    #[error("numeric error at term {term}: {message}")]
    Numeric { term: usize, message: String },

    #[error("time step {dt} exceeds the explicit stability bound {bound}")]
    Stability { dt: f64, bound: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
