//! Polynomial diffeomorphisms: pushforward of vector fields and empirical
//! verification that candidate isometries preserve the structure and the
//! Popp volume.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::flag::AdaptedFrame;
use crate::linalg::min_norm_solve;
use crate::poly::{Poly, DEFAULT_TERM_CAP};
use crate::popp::{adapted_constants, gram_matrices, popp_density_coordinates};
use crate::structure::SrStructure;

/// A polynomial diffeomorphism of R^n with a polynomial inverse. Restricting
/// to polynomial inverses keeps pushforwards exact; affine maps and
/// unipotent group translations in exponential coordinates all qualify.
#[derive(Debug, Clone)]
pub struct PolyMap {
    name: String,
    forward: Vec<Poly>,
    inverse: Vec<Poly>,
}

impl PolyMap {
    /// Validates that `forward(inverse(x)) = x`, exactly as polynomial
    /// composition when it stays under the term cap, otherwise numerically
    /// at 50 deterministic sample points.
    pub fn new(name: impl Into<String>, forward: Vec<Poly>, inverse: Vec<Poly>) -> Result<Self> {
        let name = name.into();
        let n = forward.len();
        if n == 0 || inverse.len() != n {
            return Err(Error::InvalidMap(format!(
                "map `{name}`: forward has {n} components, inverse has {}",
                inverse.len()
            )));
        }
        for p in forward.iter().chain(&inverse) {
            if p.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.nvars(),
                });
            }
        }
        let map = PolyMap {
            name,
            forward,
            inverse,
        };
        map.check_inverse()?;
        Ok(map)
    }

    fn check_inverse(&self) -> Result<()> {
        let n = self.dim();
        let mut exact_ok = true;
        for (i, f) in self.forward.iter().enumerate() {
            match f.compose_capped(&self.inverse, DEFAULT_TERM_CAP) {
                Ok(composed) => {
                    if composed != Poly::var(n, i)? {
                        return Err(Error::InvalidMap(format!(
                            "map `{}`: forward(inverse) != identity in component {i}",
                            self.name
                        )));
                    }
                }
                Err(Error::TermCapExceeded { .. }) => {
                    exact_ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if exact_ok {
            return Ok(());
        }
        // Composition too large to expand: sample instead.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..50 {
            let q: Vec<f64> = (0..n).map(|_| next()).collect();
            let mid: Vec<f64> = self
                .inverse
                .iter()
                .map(|p| p.eval(&q))
                .collect::<Result<_>>()?;
            for (i, f) in self.forward.iter().enumerate() {
                let back = f.eval(&mid)?;
                if (back - q[i]).abs() > 1e-10 * (1.0 + q[i].abs()) {
                    return Err(Error::InvalidMap(format!(
                        "map `{}`: forward(inverse) deviates from identity at sampled points",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[Poly] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Poly] {
        &self.inverse
    }

    /// The inverse diffeomorphism.
    pub fn inverted(&self) -> PolyMap {
        PolyMap {
            name: format!("{}^-1", self.name),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn apply(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.forward.iter().map(|p| p.eval(point)).collect()
    }

    /// Jacobian of the forward map as a matrix of polynomials.
    pub fn jacobian(&self) -> Result<Vec<Vec<Poly>>> {
        self.forward
            .iter()
            .map(|f| (0..self.dim()).map(|j| f.partial(j)).collect())
            .collect()
    }

    /// Jacobian determinant of the forward map, evaluated at `point`.
    pub fn jacobian_det(&self, point: &[f64]) -> Result<f64> {
        let n = self.dim();
        let jac = self.jacobian()?;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (i, row) in jac.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                m[(i, j)] = p.eval(point)?;
            }
        }
        Ok(m.determinant())
    }
}

/// Exact pushforward of a polynomial field: the Jacobian is applied to the
/// field and the result is pulled back through the inverse, so the output
/// is again a polynomial field in the target coordinates.
pub fn pushforward_field(map: &PolyMap, field: &VectorField) -> Result<VectorField> {
    let n = map.dim();
    if field.nvars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: field.nvars(),
        });
    }
    let jac = map.jacobian()?;
    let mut components = Vec::with_capacity(n);
    for row in &jac {
        let mut acc = Poly::zero(n);
        for (j, entry) in row.iter().enumerate() {
            if entry.is_zero() || field.component(j).is_zero() {
                continue;
            }
            acc = acc.add(&entry.mul(field.component(j))?)?;
        }
        components.push(acc.compose(map.inverse())?);
    }
    VectorField::new(components)
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryPointCheck {
    pub point: Vec<f64>,
    /// Largest relative residual of a pushed horizontal field against the
    /// span of the horizontal fields at the image point.
    pub span_residual: f64,
    /// Gram matrix of the pushed fields in the orthonormal frame at the
    /// image point (row-major).
    pub gram: Vec<Vec<f64>>,
    /// Largest entrywise deviation of that Gram matrix from the identity.
    pub gram_deviation: f64,
    pub distribution_preserved: bool,
    pub metric_preserved: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryReport {
    pub map: String,
    pub checks: Vec<IsometryPointCheck>,
    pub max_span_residual: f64,
    pub max_gram_deviation: f64,
    pub pass: bool,
}

/// Check whether `map` is an isometry of `s` on the sample: (i) pushed
/// horizontal fields stay in the distribution at the image point, and
/// (ii) their Gram matrix in the orthonormal frame there is the identity.
pub fn is_isometry(
    map: &PolyMap,
    s: &SrStructure,
    sample: &[Vec<f64>],
    tol: f64,
) -> Result<IsometryReport> {
    let k = s.rank();
    let pushed: Vec<VectorField> = s
        .horizontal_fields()
        .iter()
        .map(|f| pushforward_field(map, f))
        .collect::<Result<_>>()?;
    let mut checks = Vec::with_capacity(sample.len());
    let mut max_span_residual: f64 = 0.0;
    let mut max_gram_deviation: f64 = 0.0;
    for q in sample {
        s.check_point(q)?;
        let image = map.apply(q)?;
        let h_cols: Vec<DVector<f64>> = s
            .horizontal_fields()
            .iter()
            .map(|f| f.eval(&image))
            .collect::<Result<_>>()?;
        let h = DMatrix::from_columns(&h_cols);
        let mut coeff = DMatrix::<f64>::zeros(k, k);
        let mut span_residual: f64 = 0.0;
        for (j, pf) in pushed.iter().enumerate() {
            let v = pf.eval(&image)?;
            let (alpha, residual) = min_norm_solve(&h, &v, 1e-13)?;
            span_residual = span_residual.max(residual / v.norm().max(1.0));
            coeff.set_column(j, &alpha);
        }
        // The horizontal frame is orthonormal, so inner products of pushed
        // fields are Euclidean products of their coefficient vectors.
        let gram = coeff.transpose() * &coeff;
        let mut gram_deviation: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                gram_deviation = gram_deviation.max((gram[(i, j)] - target).abs());
            }
        }
        let check = IsometryPointCheck {
            point: q.clone(),
            span_residual,
            gram: (0..k)
                .map(|i| (0..k).map(|j| gram[(i, j)]).collect())
                .collect(),
            gram_deviation,
            distribution_preserved: span_residual < tol,
            metric_preserved: gram_deviation < tol,
        };
        max_span_residual = max_span_residual.max(span_residual);
        max_gram_deviation = max_gram_deviation.max(gram_deviation);
        checks.push(check);
    }
    let pass = checks
        .iter()
        .all(|c| c.distribution_preserved && c.metric_preserved);
    Ok(IsometryReport {
        map: map.name().to_string(),
        checks,
        max_span_residual,
        max_gram_deviation,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumePointCheck {
    pub point: Vec<f64>,
    /// Coordinate Popp density at the point.
    pub density: f64,
    /// Pulled-back density: density at the image times |det D(map)|.
    pub pulled_back: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport {
    pub map: String,
    pub checks: Vec<VolumePointCheck>,
    pub max_rel_error: f64,
    pub pass: bool,
}

/// Pullback test for the Popp volume: at each sample point, the density at
/// the image point times the Jacobian determinant must equal the density at
/// the point itself.
pub fn check_volume_preserving(
    map: &PolyMap,
    s: &SrStructure,
    sample: &[Vec<f64>],
    tol: f64,
) -> Result<VolumeReport> {
    check_volume_preserving_weighted(map, s, None, sample, tol)
}

/// Same pullback test for a rescaled volume `f * P` given by a positive
/// polynomial weight against the Popp density. Used to probe that volumes
/// other than Popp's fail invariance under isometries.
pub fn check_volume_preserving_weighted(
    map: &PolyMap,
    s: &SrStructure,
    weight: Option<&Poly>,
    sample: &[Vec<f64>],
    tol: f64,
) -> Result<VolumeReport> {
    let mut checks = Vec::with_capacity(sample.len());
    let mut max_rel_error: f64 = 0.0;
    for q in sample {
        s.check_point(q)?;
        let image = map.apply(q)?;
        let density_here = coordinate_density(s, q)?;
        let density_image = coordinate_density(s, &image)?;
        let (w_here, w_image) = match weight {
            Some(f) => (f.eval(q)?, f.eval(&image)?),
            None => (1.0, 1.0),
        };
        let density = density_here * w_here;
        let pulled_back = density_image * w_image * map.jacobian_det(q)?.abs();
        let rel_error = (pulled_back - density).abs() / density.abs().max(f64::MIN_POSITIVE);
        max_rel_error = max_rel_error.max(rel_error);
        checks.push(VolumePointCheck {
            point: q.clone(),
            density,
            pulled_back,
            rel_error,
        });
    }
    Ok(VolumeReport {
        map: map.name().to_string(),
        checks,
        max_rel_error,
        pass: max_rel_error < tol,
    })
}

fn coordinate_density(s: &SrStructure, q: &[f64]) -> Result<f64> {
    let frame = AdaptedFrame::build(s, q, crate::flag::DEFAULT_RANK_TOL)?;
    let constants = adapted_constants(&frame, q)?;
    let grams = gram_matrices(&constants, frame.tol())?;
    popp_density_coordinates(&frame, &grams, q)
}
