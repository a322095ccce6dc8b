//! Polynomial vector fields on R^n and their exact Lie calculus.

use nalgebra::DVector;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::poly::{rationalize_point, Poly, DEFAULT_TERM_CAP};

/// A vector field with one polynomial per coordinate direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    nvars: usize,
    components: Vec<Poly>,
}

impl VectorField {
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let nvars = components.len();
        for c in &components {
            if c.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: c.nvars(),
                });
            }
        }
        Ok(VectorField { nvars, components })
    }

    pub fn zero(nvars: usize) -> Self {
        VectorField {
            nvars,
            components: vec![Poly::zero(nvars); nvars],
        }
    }

    /// The coordinate field in direction `index`.
    pub fn coordinate(nvars: usize, index: usize) -> Result<Self> {
        if index >= nvars {
            return Err(Error::VariableOutOfRange { index, nvars });
        }
        let mut f = VectorField::zero(nvars);
        f.components[index] = Poly::from_int(nvars, 1);
        Ok(f)
    }

    pub fn constant(values: &[f64]) -> Result<Self> {
        let q = rationalize_point(values)?;
        let nvars = q.len();
        Ok(VectorField {
            nvars,
            components: q
                .into_iter()
                .map(|c| Poly::constant(nvars, c))
                .collect(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    fn check_nvars(&self, other: &VectorField) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.check_nvars(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(VectorField {
            nvars: self.nvars,
            components,
        })
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.check_nvars(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(VectorField {
            nvars: self.nvars,
            components,
        })
    }

    pub fn neg(&self) -> VectorField {
        VectorField {
            nvars: self.nvars,
            components: self.components.iter().map(Poly::neg).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> VectorField {
        VectorField {
            nvars: self.nvars,
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Multiply by a scalar polynomial: `f * X`.
    pub fn mul_poly(&self, f: &Poly) -> Result<VectorField> {
        let components = self
            .components
            .iter()
            .map(|p| p.mul(f))
            .collect::<Result<_>>()?;
        Ok(VectorField {
            nvars: self.nvars,
            components,
        })
    }

    /// Exact directional derivative `X(f) = sum_j X^j d_j f`.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        if f.nvars() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: f.nvars(),
            });
        }
        let mut acc = Poly::zero(self.nvars);
        for (j, xj) in self.components.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            acc = acc.add(&xj.mul(&f.partial(j)?)?)?;
        }
        Ok(acc)
    }

    /// Exact Lie bracket, `[X, Y]^i = sum_j (X^j d_j Y^i - Y^j d_j X^i)`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        self.bracket_capped(other, DEFAULT_TERM_CAP)
    }

    pub fn bracket_capped(&self, other: &VectorField, cap: usize) -> Result<VectorField> {
        self.check_nvars(other)?;
        let mut components = Vec::with_capacity(self.nvars);
        for i in 0..self.nvars {
            let mut acc = Poly::zero(self.nvars);
            for j in 0..self.nvars {
                let a = &self.components[j];
                let b = &other.components[j];
                if !a.is_zero() {
                    acc = acc.add(&a.mul_capped(&other.components[i].partial(j)?, cap)?)?;
                }
                if !b.is_zero() {
                    acc = acc.sub(&b.mul_capped(&self.components[i].partial(j)?, cap)?)?;
                }
            }
            components.push(acc);
        }
        Ok(VectorField {
            nvars: self.nvars,
            components,
        })
    }

    /// Exact value at a rational point.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<Vec<BigRational>> {
        self.components
            .iter()
            .map(|p| p.eval_rational(point))
            .collect()
    }

    /// Value at an already-rationalized point, rounded to floats. Lets
    /// callers rationalize a point once and evaluate many fields at it.
    pub fn eval_floats(&self, point: &[BigRational]) -> Result<DVector<f64>> {
        let vals = self
            .components
            .iter()
            .map(|p| p.eval_prepared(point))
            .collect::<Result<Vec<f64>>>()?;
        Ok(DVector::from_vec(vals))
    }

    /// Value at a floating-point point (rationalized once for all
    /// components, evaluated exactly, rounded at the end).
    pub fn eval(&self, point: &[f64]) -> Result<DVector<f64>> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let q = rationalize_point(point)?;
        self.eval_floats(&q)
    }
}

impl std::fmt::Display for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
