//! Sub-Riemannian structures: a rank-k distribution on R^n presented by k
//! polynomial vector fields declared orthonormal.

use crate::error::{Error, Result};
use crate::field::VectorField;

#[derive(Debug, Clone, PartialEq)]
pub struct SrStructure {
    name: String,
    nvars: usize,
    horizontal: Vec<VectorField>,
    var_names: Option<Vec<String>>,
}

impl SrStructure {
    /// Build and validate: needs n >= 3 and 1 <= k < n. Pointwise linear
    /// independence of the fields is checked wherever a point is queried.
    pub fn new(name: impl Into<String>, horizontal: Vec<VectorField>) -> Result<Self> {
        let name = name.into();
        let k = horizontal.len();
        let nvars = horizontal
            .first()
            .map(VectorField::nvars)
            .ok_or_else(|| Error::InvalidStructure("no horizontal fields given".into()))?;
        if nvars < 3 {
            return Err(Error::InvalidStructure(format!(
                "dimension must be at least 3, got {nvars}"
            )));
        }
        if k >= nvars {
            return Err(Error::InvalidStructure(format!(
                "rank {k} must be strictly less than dimension {nvars}"
            )));
        }
        for f in &horizontal {
            if f.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: f.nvars(),
                });
            }
        }
        Ok(SrStructure {
            name,
            nvars,
            horizontal,
            var_names: None,
        })
    }

    pub fn with_var_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: names.len(),
            });
        }
        self.var_names = Some(names);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Rank of the distribution.
    pub fn rank(&self) -> usize {
        self.horizontal.len()
    }

    /// The declared-orthonormal horizontal frame.
    pub fn horizontal_fields(&self) -> &[VectorField] {
        &self.horizontal
    }

    pub fn var_names(&self) -> Option<&[String]> {
        self.var_names.as_deref()
    }

    pub fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        if point.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinitePoint);
        }
        Ok(())
    }
}
