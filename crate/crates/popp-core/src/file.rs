//! The declarative structure-file format (TOML): dimension, horizontal
//! fields as polynomial strings, optional completion hints, maps, points
//! and grids.

use serde::{Deserialize, Serialize};

use crate::builtin;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::maps::PolyMap;
use crate::parse::parse_poly;
use crate::poly::Poly;
use crate::structure::SrStructure;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FileSchema {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    variables: Option<Vec<String>>,
    fields: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    completion: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    maps: Vec<MapSchema>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MapSchema {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    forward: Vec<String>,
    inverse: Vec<String>,
}

/// A parsed and validated structure file.
#[derive(Debug, Clone)]
pub struct StructureFile {
    pub structure: SrStructure,
    pub completion: Vec<VectorField>,
    pub maps: Vec<PolyMap>,
    pub points: Vec<Vec<f64>>,
    pub grid: Option<GridSpec>,
}

impl StructureFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let schema: FileSchema = toml::from_str(text)
            .map_err(|e| Error::InvalidStructure(format!("TOML parse error: {e}")))?;
        let n = schema.dimension;
        if let Some(names) = &schema.variables {
            if names.len() != n {
                return Err(Error::InvalidStructure(format!(
                    "{} variable names for dimension {n}",
                    names.len()
                )));
            }
            // A custom name that shadows a default name at a different
            // index would make canonical output ambiguous.
            for (i, name) in names.iter().enumerate() {
                let default_index = if n <= 4 {
                    ["x", "y", "z", "w"].iter().position(|d| d == name)
                } else {
                    None
                }
                .or_else(|| {
                    name.strip_prefix('x')
                        .and_then(|rest| rest.parse::<usize>().ok())
                        .and_then(|j| (1..=n).contains(&j).then(|| j - 1))
                });
                if let Some(d) = default_index {
                    if d != i {
                        return Err(Error::InvalidStructure(format!(
                            "variable name `{name}` collides with the builtin name of axis {}",
                            d + 1
                        )));
                    }
                }
            }
        }
        let names = schema.variables.as_deref();
        let parse_field = |components: &[String], what: &str, index: usize| -> Result<VectorField> {
            if components.len() != n {
                return Err(Error::InvalidStructure(format!(
                    "{what} {index}: expected {n} components, found {}",
                    components.len()
                )));
            }
            let polys = components
                .iter()
                .enumerate()
                .map(|(j, src)| {
                    parse_poly(src, n, names).map_err(|e| {
                        Error::InvalidStructure(format!("{what} {index}, component {j}: {e}"))
                    })
                })
                .collect::<Result<Vec<Poly>>>()?;
            VectorField::new(polys)
        };

        let horizontal = schema
            .fields
            .iter()
            .enumerate()
            .map(|(i, c)| parse_field(c, "field", i))
            .collect::<Result<Vec<_>>>()?;
        let mut structure = SrStructure::new(
            schema.name.clone().unwrap_or_else(|| "unnamed".into()),
            horizontal,
        )?;
        if let Some(names) = schema.variables.clone() {
            structure = structure.with_var_names(names)?;
        }

        let completion = schema
            .completion
            .as_deref()
            .unwrap_or_default()
            .iter()
            .enumerate()
            .map(|(i, c)| parse_field(c, "completion field", i))
            .collect::<Result<Vec<_>>>()?;

        let maps = schema
            .maps
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let parse_side = |side: &[String], what: &str| -> Result<Vec<Poly>> {
                    if side.len() != n {
                        return Err(Error::InvalidMap(format!(
                            "map {i}: {what} needs {n} components, found {}",
                            side.len()
                        )));
                    }
                    side.iter()
                        .enumerate()
                        .map(|(j, src)| {
                            parse_poly(src, n, names).map_err(|e| {
                                Error::InvalidMap(format!("map {i}, {what} component {j}: {e}"))
                            })
                        })
                        .collect()
                };
                PolyMap::new(
                    m.name.clone().unwrap_or_else(|| format!("map-{i}")),
                    parse_side(&m.forward, "forward")?,
                    parse_side(&m.inverse, "inverse")?,
                )
            })
            .collect::<Result<Vec<_>>>()?;

        let points = schema.points.clone().unwrap_or_default();
        for (i, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::InvalidStructure(format!(
                    "point {i} has {} coordinates, expected {n}",
                    p.len()
                )));
            }
        }
        let grid = schema
            .grid
            .as_deref()
            .map(|g| GridSpec::parse(g, n))
            .transpose()?;

        Ok(StructureFile {
            structure,
            completion,
            maps,
            points,
            grid,
        })
    }

    /// A builtin structure packaged like a parsed file, including its maps.
    pub fn builtin(name: &str) -> Result<Self> {
        Ok(StructureFile {
            structure: builtin::structure(name)?,
            completion: Vec::new(),
            maps: builtin::maps(name)?,
            points: Vec::new(),
            grid: None,
        })
    }

    /// Canonical serialization: polynomials are re-emitted in canonical
    /// form, so parsing the output reproduces this value exactly.
    pub fn to_toml_string(&self) -> String {
        let field_strings = |f: &VectorField| -> Vec<String> {
            f.components().iter().map(|p| p.to_string()).collect()
        };
        let schema = FileSchema {
            name: Some(self.structure.name().to_string()),
            dimension: self.structure.nvars(),
            variables: self.structure.var_names().map(|v| v.to_vec()),
            fields: self
                .structure
                .horizontal_fields()
                .iter()
                .map(field_strings)
                .collect(),
            completion: if self.completion.is_empty() {
                None
            } else {
                Some(self.completion.iter().map(field_strings).collect())
            },
            points: if self.points.is_empty() {
                None
            } else {
                Some(self.points.clone())
            },
            grid: self.grid.as_ref().map(GridSpec::to_spec_string),
            maps: self
                .maps
                .iter()
                .map(|m| MapSchema {
                    name: Some(m.name().to_string()),
                    forward: m.forward().iter().map(|p| p.to_string()).collect(),
                    inverse: m.inverse().iter().map(|p| p.to_string()).collect(),
                })
                .collect(),
        };
        toml::to_string(&schema).expect("structure file serializes")
    }
}

/// An axis-aligned evaluation grid, `start:stop:count` per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<(f64, f64, usize)>,
}

impl GridSpec {
    pub fn parse(spec: &str, expected_dim: usize) -> Result<Self> {
        let axes = spec
            .split(',')
            .map(|axis| {
                let parts: Vec<&str> = axis.split(':').collect();
                if parts.len() != 3 {
                    return Err(Error::InvalidStructure(format!(
                        "grid axis `{axis}` is not start:stop:count"
                    )));
                }
                let start: f64 = parts[0]
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidStructure(format!("bad grid start `{}`", parts[0])))?;
                let stop: f64 = parts[1]
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidStructure(format!("bad grid stop `{}`", parts[1])))?;
                let count: usize = parts[2]
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidStructure(format!("bad grid count `{}`", parts[2])))?;
                if count == 0 {
                    return Err(Error::InvalidStructure("grid count must be positive".into()));
                }
                Ok((start, stop, count))
            })
            .collect::<Result<Vec<_>>>()?;
        if axes.len() != expected_dim {
            return Err(Error::InvalidStructure(format!(
                "grid has {} axes, structure has dimension {expected_dim}",
                axes.len()
            )));
        }
        Ok(GridSpec { axes })
    }

    pub fn to_spec_string(&self) -> String {
        self.axes
            .iter()
            .map(|(a, b, c)| format!("{a}:{b}:{c}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// All grid points, last axis varying fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for &(start, stop, count) in &self.axes {
            let axis: Vec<f64> = (0..count)
                .map(|i| {
                    if count == 1 {
                        start
                    } else {
                        start + (stop - start) * i as f64 / (count - 1) as f64
                    }
                })
                .collect();
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        points
    }
}
