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

//! Molecular input: atoms with radii, XYZR/PQR/XYZ readers and domain boxes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::Vec3;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub center: Vec3,
    /// Van der Waals radius in Å.
    pub radius: f64,
    pub element: Option<String>,
}

impl Atom {
    pub fn new(center: Vec3, radius: f64) -> Self {
        Self {
            center,
            radius,
            element: None,
        }
    }

    pub fn with_element(mut self, element: impl Into<String>) -> Self {
        self.element = Some(element.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Molecule {
    pub name: String,
    pub atoms: Vec<Atom>,
}

impl Molecule {
    pub fn new(name: impl Into<String>, atoms: Vec<Atom>) -> Self {
        Self {
            name: name.into(),
            atoms,
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Largest atomic radius, or `None` for an empty molecule.
    pub fn max_radius(&self) -> Option<f64> {
        self.atoms.iter().map(|a| a.radius).reduce(f64::max)
    }

    /// The radius shared by the most atoms. Ties go to the smaller radius.
    pub fn most_common_radius(&self) -> Option<f64> {
        let mut counts: Vec<(f64, usize)> = Vec::new();
        for atom in &self.atoms {
            match counts.iter_mut().find(|(r, _)| *r == atom.radius) {
                Some((_, n)) => *n += 1,
                None => counts.push((atom.radius, 1)),
            }
        }
        counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.total_cmp(&a.0)))
            .map(|(r, _)| r)
    }

    /// Reads a molecule from disk, picking the reader by `format`.
    pub fn read_path(path: &Path, format: InputFormat) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut molecule = match format {
            InputFormat::Xyzr => parse_xyzr(&text)?,
            InputFormat::Pqr => parse_pqr(&text)?,
            InputFormat::Xyz => parse_xyz(&text, &RadiusTable::default())?,
        };
        molecule.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(molecule)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Xyzr,
    Pqr,
    /// Element symbol plus coordinates; radii come from [`RadiusTable::default`].
    Xyz,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xyzr" => Ok(Self::Xyzr),
            "pqr" => Ok(Self::Pqr),
            "xyz" => Ok(Self::Xyz),
            other => Err(Error::Config(format!("unknown input format {other:?}"))),
        }
    }
}

/// Element symbol to radius (Å). Lookups ignore case.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusTable {
    radii: HashMap<String, f64>,
}

impl RadiusTable {
    pub fn empty() -> Self {
        Self {
            radii: HashMap::new(),
        }
    }

    pub fn insert(&mut self, symbol: &str, radius: f64) -> Result<()> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!(
                "radius for {symbol:?} must be positive, got {radius}"
            )));
        }
        self.radii.insert(symbol.to_ascii_uppercase(), radius);
        Ok(())
    }

    pub fn get(&self, symbol: &str) -> Option<f64> {
        self.radii.get(&symbol.to_ascii_uppercase()).copied()
    }
}

impl Default for RadiusTable {
    /// Bondi-style radii; carbon and hydrogen are 1.7 and 1.2 Å.
    fn default() -> Self {
        let mut table = Self::empty();
        for (symbol, radius) in [
            ("H", 1.2),
            ("C", 1.7),
            ("N", 1.55),
            ("O", 1.52),
            ("F", 1.47),
            ("P", 1.8),
            ("S", 1.8),
            ("CL", 1.75),
        ] {
            table.insert(symbol, radius).expect("static radii are positive");
        }
        table
    }
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn extent(&self) -> Vec3 {
        [
            self.max[0] - self.min[0],
            self.max[1] - self.min[1],
            self.max[2] - self.min[2],
        ]
    }

    pub fn center(&self) -> Vec3 {
        [
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
            0.5 * (self.min[2] + self.max[2]),
        ]
    }

    /// Grows the box about its center until every side equals the longest one.
    pub fn cubified(&self) -> Aabb {
        let ext = self.extent();
        let side = ext[0].max(ext[1]).max(ext[2]);
        let c = self.center();
        Aabb {
            min: [c[0] - side / 2.0, c[1] - side / 2.0, c[2] - side / 2.0],
            max: [c[0] + side / 2.0, c[1] + side / 2.0, c[2] + side / 2.0],
        }
    }
}

fn parse_number(token: &str, line: usize, what: &str) -> Result<f64> {
    token.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} {token:?}"),
    })
}

fn check_atom(center: Vec3, radius: f64, line: usize) -> Result<()> {
    if center.iter().any(|c| !c.is_finite()) {
        return Err(Error::Validation {
            line,
            message: "atom center is not finite".into(),
        });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Validation {
            line,
            message: format!("radius must be positive, got {radius}"),
        });
    }
    Ok(())
}

/// Parses `x y z r` lines. `#` comments and blank lines are skipped; extra
/// trailing columns (as written by some tools) are ignored.
pub fn parse_xyzr(text: &str) -> Result<Molecule> {
    let mut atoms = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() < 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields (x y z r), found {}", tokens.len()),
            });
        }
        let x = parse_number(tokens[0], line, "x coordinate")?;
        let y = parse_number(tokens[1], line, "y coordinate")?;
        let z = parse_number(tokens[2], line, "z coordinate")?;
        let r = parse_number(tokens[3], line, "radius")?;
        check_atom([x, y, z], r, line)?;
        atoms.push(Atom::new([x, y, z], r));
    }
    Ok(Molecule::new("", atoms))
}

/// Parses the ATOM/HETATM records of a whitespace-delimited PQR file. The last
/// two fields are charge and radius; the three before them are coordinates.
pub fn parse_pqr(text: &str) -> Result<Molecule> {
    let mut atoms = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first() {
            Some(&"ATOM") | Some(&"HETATM") => {}
            _ => continue,
        }
        if tokens.len() < 6 {
            return Err(Error::Parse {
                line,
                message: format!("atom record has {} fields, need at least 6", tokens.len()),
            });
        }
        let n = tokens.len();
        let x = parse_number(tokens[n - 5], line, "x coordinate")?;
        let y = parse_number(tokens[n - 4], line, "y coordinate")?;
        let z = parse_number(tokens[n - 3], line, "z coordinate")?;
        // charge is validated but not kept
        parse_number(tokens[n - 2], line, "charge")?;
        let r = parse_number(tokens[n - 1], line, "radius")?;
        check_atom([x, y, z], r, line)?;
        let mut atom = Atom::new([x, y, z], r);
        if let Some(element) = tokens
            .get(2)
            .filter(|_| n > 6)
            .and_then(|name| name.chars().find(|c| c.is_ascii_alphabetic()))
        {
            atom.element = Some(element.to_string());
        }
        atoms.push(atom);
    }
    Ok(Molecule::new("", atoms))
}

/// Parses `symbol x y z` lines and looks radii up in `table`. A leading
/// atom-count line and title line in standard XYZ files are tolerated.
pub fn parse_xyz(text: &str, table: &RadiusTable) -> Result<Molecule> {
    let mut symbols = Vec::new();
    let mut centers = Vec::new();
    let mut lines = Vec::new();
    let mut body: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .collect();
    if body
        .first()
        .is_some_and(|(_, l)| l.parse::<usize>().is_ok())
    {
        body.drain(..body.len().min(2));
    }
    for (line, trimmed) in body {
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() < 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields (symbol x y z), found {}", tokens.len()),
            });
        }
        let x = parse_number(tokens[1], line, "x coordinate")?;
        let y = parse_number(tokens[2], line, "y coordinate")?;
        let z = parse_number(tokens[3], line, "z coordinate")?;
        symbols.push(tokens[0]);
        centers.push([x, y, z]);
        lines.push(line);
    }
    let radii = assign_radii(&symbols, table)?;
    let mut atoms = Vec::with_capacity(radii.len());
    for (((center, radius), symbol), line) in centers.into_iter().zip(radii).zip(symbols).zip(lines)
    {
        check_atom(center, radius, line)?;
        atoms.push(Atom::new(center, radius).with_element(symbol));
    }
    Ok(Molecule::new("", atoms))
}

pub fn assign_radii<S: AsRef<str>>(symbols: &[S], table: &RadiusTable) -> Result<Vec<f64>> {
    symbols
        .iter()
        .map(|s| {
            table
                .get(s.as_ref())
                .ok_or_else(|| Error::UnknownElement(s.as_ref().to_string()))
        })
        .collect()
}

/// Box enclosing every atomic sphere, grown by `margin` on each side.
pub fn bounding_box(molecule: &Molecule, margin: f64) -> Result<Aabb> {
    if molecule.is_empty() {
        return Err(Error::Domain("bounding box of an empty molecule".into()));
    }
    if !(margin >= 0.0) {
        return Err(Error::Domain(format!("margin must be >= 0, got {margin}")));
    }
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    for atom in &molecule.atoms {
        for a in 0..3 {
            min[a] = min[a].min(atom.center[a] - atom.radius);
            max[a] = max[a].max(atom.center[a] + atom.radius);
        }
    }
    for a in 0..3 {
        min[a] -= margin;
        max[a] += margin;
    }
    Ok(Aabb { min, max })
}

/// Serializes as XYZR using shortest round-trip float formatting.
pub fn write_xyzr(molecule: &Molecule) -> String {
    let mut out = String::new();
    if !molecule.name.is_empty() {
        let _ = writeln!(out, "# {}", molecule.name);
    }
    for atom in &molecule.atoms {
        let [x, y, z] = atom.center;
        let _ = writeln!(out, "{x} {y} {z} {}", atom.radius);
    }
    out
}
