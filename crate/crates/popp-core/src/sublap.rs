//! The canonical sub-Laplacian: full-frame structure constants, horizontal
//! gradient, divergences of the frame fields with respect to the Popp
//! volume, the first-order coefficients, and a quadrature check of the
//! integration-by-parts identity.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::flag::AdaptedFrame;
use crate::linalg::pairwise_sum;
use crate::poly::{rational_to_f64, Poly};
use crate::popp::{adapted_constants, gram_matrices, popp_density_adapted, FrameSolver, GramData};
use crate::structure::SrStructure;

/// Default finite-difference step; it is rescaled by `1 + |q|` at use.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Relative agreement required between the Richardson-extrapolated
/// derivative at step h and at step h/2 before a result is trusted without
/// a warning.
const FD_AGREEMENT_TOL: f64 = 1e-6;

/// Structure constants and sub-Laplacian coefficients of a frame at a point.
#[derive(Debug, Clone)]
pub struct SublaplacianData {
    pub point: Vec<f64>,
    /// `c[i][j][l]`: coefficient of frame field l in the bracket of frame
    /// fields i and j; antisymmetric in (i, j).
    pub structure_constants: Vec<Vec<Vec<f64>>>,
    /// Popp divergence of the first k frame fields.
    pub divergences: Vec<f64>,
    /// First-order coefficients of the sub-Laplacian; equal to the
    /// divergences of the horizontal frame fields.
    pub first_order: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Caches the exact pairwise brackets of the frame fields so repeated
/// pointwise evaluation (finite differences, grids) does not redo symbolic
/// work.
pub struct SublapContext<'a> {
    frame: &'a AdaptedFrame,
    /// Upper triangle i < j of the exact brackets of frame fields.
    brackets: Vec<Vec<VectorField>>,
}

impl<'a> SublapContext<'a> {
    pub fn new(frame: &'a AdaptedFrame) -> Result<Self> {
        let n = frame.nvars();
        let fields = frame.fields();
        let mut brackets = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n.saturating_sub(i + 1));
            for j in (i + 1)..n {
                row.push(fields[i].field.bracket(&fields[j].field)?);
            }
            brackets.push(row);
        }
        Ok(SublapContext { frame, brackets })
    }

    pub fn frame(&self) -> &AdaptedFrame {
        self.frame
    }

    fn bracket(&self, i: usize, j: usize) -> Option<&VectorField> {
        if i < j {
            Some(&self.brackets[i][j - i - 1])
        } else if j < i {
            Some(&self.brackets[j][i - j - 1])
        } else {
            None
        }
    }

    /// Full structure-constant tensor of the frame at a point.
    pub fn structure_constants(&self, point: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        let n = self.frame.nvars();
        let solver = FrameSolver::new(self.frame, point)?;
        let q = crate::poly::rationalize_point(point)?;
        let mut c = vec![vec![vec![0.0; n]; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.bracket(i, j).unwrap().eval_floats(&q)?;
                let a = solver.solve(&v)?;
                for l in 0..n {
                    c[i][j][l] = a[l];
                    c[j][i][l] = -a[l];
                }
            }
        }
        Ok(c)
    }

    /// `sum_l c^l_{il}` at a point, the trace part of the divergence formula.
    fn trace_constant(&self, solver: &FrameSolver, point: &[f64], i: usize) -> Result<f64> {
        let q = crate::poly::rationalize_point(point)?;
        let mut sum = 0.0;
        for l in 0..self.frame.nvars() {
            if l == i {
                continue;
            }
            let v = self.bracket(i.min(l), i.max(l)).unwrap().eval_floats(&q)?;
            let a = solver.solve(&v)?;
            sum += if i < l { a[l] } else { -a[l] };
        }
        Ok(sum)
    }

    fn grams_at(&self, point: &[f64]) -> Result<GramData> {
        let constants = adapted_constants(self.frame, point)?;
        gram_matrices(&constants, self.frame.tol())
    }

    /// Central difference of the level Gram matrices along `q + t v`.
    fn gram_difference(
        &self,
        q: &[f64],
        v: &[f64],
        t: f64,
    ) -> Result<Vec<DMatrix<f64>>> {
        let shift = |sign: f64| -> Vec<f64> {
            q.iter()
                .zip(v)
                .map(|(qi, vi)| qi + sign * t * vi)
                .collect()
        };
        let plus = self.grams_at(&shift(1.0)).map_err(|e| proximity(q, e))?;
        let minus = self.grams_at(&shift(-1.0)).map_err(|e| proximity(q, e))?;
        Ok(plus
            .matrices()
            .iter()
            .zip(minus.matrices())
            .skip(1) // level 1 is constant
            .map(|(p, m)| (p - m) / (2.0 * t))
            .collect())
    }

    /// Divergence of frame field `i` with respect to the Popp volume, and
    /// an accuracy warning when the finite-difference derivative of the
    /// Gram matrices has not converged.
    pub fn divergence(&self, point: &[f64], i: usize, h: f64) -> Result<(f64, Option<String>)> {
        let grams = self.grams_at(point)?;
        let solver = FrameSolver::new(self.frame, point)?;
        self.divergence_with(&grams, &solver, point, i, h)
    }

    fn divergence_with(
        &self,
        grams: &GramData,
        solver: &FrameSolver,
        point: &[f64],
        i: usize,
        h: f64,
    ) -> Result<(f64, Option<String>)> {
        let n = self.frame.nvars();
        if i >= n {
            return Err(Error::VariableOutOfRange { index: i, nvars: n });
        }
        let c_sum = self.trace_constant(solver, point, i)?;

        let mut trace_term = 0.0;
        let mut warning = None;
        // Levels above 1 with a nonempty Gram block contribute a trace term.
        if grams.matrices().iter().skip(1).any(|m| m.nrows() > 0) {
            let v = self.frame.fields()[i].field.eval(point)?;
            let norm_q = point.iter().map(|x| x * x).sum::<f64>().sqrt();
            let t = h * (1.0 + norm_q);
            let d_h = self.gram_difference(point, v.as_slice(), t)?;
            let d_h2 = self.gram_difference(point, v.as_slice(), t / 2.0)?;
            let d_h4 = self.gram_difference(point, v.as_slice(), t / 4.0)?;
            let inverses: Vec<DMatrix<f64>> = grams
                .matrices()
                .iter()
                .skip(1)
                .map(|m| {
                    if m.nrows() == 0 {
                        Ok(m.clone())
                    } else {
                        m.clone().try_inverse().ok_or_else(|| {
                            Error::ResidualCheckFailed(
                                "positive-definite Gram matrix failed to invert".into(),
                            )
                        })
                    }
                })
                .collect::<Result<_>>()?;
            let trace_sum = |d: &[DMatrix<f64>]| -> f64 {
                inverses
                    .iter()
                    .zip(d)
                    .map(|(inv, der)| (inv * der).trace())
                    .sum()
            };
            // One Richardson level at step t, cross-checked at step t/2.
            let richardson =
                |coarse: &[DMatrix<f64>], fine: &[DMatrix<f64>]| -> Vec<DMatrix<f64>> {
                    coarse
                        .iter()
                        .zip(fine)
                        .map(|(c, f)| (f * 4.0 - c) / 3.0)
                        .collect()
                };
            let r1 = richardson(&d_h, &d_h2);
            let r2 = richardson(&d_h2, &d_h4);
            let t1 = trace_sum(&r1);
            let t2 = trace_sum(&r2);
            if (t1 - t2).abs() > FD_AGREEMENT_TOL * t2.abs().max(1.0) {
                warning = Some(format!(
                    "divergence of frame field {i} at {point:?}: finite-difference \
                     derivative not converged ({t1:.6e} vs {t2:.6e})"
                ));
            }
            trace_term = t1;
        }
        Ok((-(0.5 * trace_term + c_sum), warning))
    }

    /// First-order sub-Laplacian coefficients, divergences, and the full
    /// structure-constant tensor.
    pub fn coefficients(&self, point: &[f64], h: f64) -> Result<SublaplacianData> {
        let k = self.frame.rank();
        let grams = self.grams_at(point)?;
        let solver = FrameSolver::new(self.frame, point)?;
        let mut divergences = Vec::with_capacity(k);
        let mut warnings = Vec::new();
        for i in 0..k {
            let (d, warning) = self.divergence_with(&grams, &solver, point, i, h)?;
            divergences.push(d);
            warnings.extend(warning);
        }
        Ok(SublaplacianData {
            point: point.to_vec(),
            structure_constants: self.structure_constants(point)?,
            first_order: divergences.clone(),
            divergences,
            warnings,
        })
    }

    /// First-order coefficients only, skipping the full tensor.
    fn first_order(&self, point: &[f64], h: f64) -> Result<Vec<f64>> {
        let k = self.frame.rank();
        let grams = self.grams_at(point)?;
        let solver = FrameSolver::new(self.frame, point)?;
        (0..k)
            .map(|i| {
                self.divergence_with(&grams, &solver, point, i, h)
                    .map(|(d, _)| d)
            })
            .collect()
    }
}

fn proximity(q: &[f64], e: Error) -> Error {
    match e {
        e @ Error::NonFinitePoint | e @ Error::DimensionMismatch { .. } => e,
        other => Error::SingularProximity {
            point: q.to_vec(),
            detail: other.to_string(),
        },
    }
}

/// Structure constants of the frame at a point.
pub fn structure_constants(frame: &AdaptedFrame, point: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    SublapContext::new(frame)?.structure_constants(point)
}

/// Horizontal gradient components `(X_1(f)(q), ..., X_k(f)(q))`, exact up to
/// the final rounding.
pub fn gradient(s: &SrStructure, f: &Poly, point: &[f64]) -> Result<Vec<f64>> {
    s.check_point(point)?;
    s.horizontal_fields()
        .iter()
        .map(|x| x.apply(f)?.eval(point))
        .collect()
}

/// Popp divergence of frame field `i` at a point, by central differences of
/// the level Gram matrices with one Richardson level.
pub fn frame_divergence(
    frame: &AdaptedFrame,
    point: &[f64],
    i: usize,
    h: f64,
) -> Result<(f64, Option<String>)> {
    SublapContext::new(frame)?.divergence(point, i, h)
}

/// All first-order data of the canonical sub-Laplacian at a point.
pub fn sublaplacian_coeffs(frame: &AdaptedFrame, point: &[f64], h: f64) -> Result<SublaplacianData> {
    SublapContext::new(frame)?.coefficients(point, h)
}

/// Apply the canonical sub-Laplacian to a polynomial at a point: the
/// second-order part is exact, the first-order coefficients come from the
/// divergence formula.
pub fn apply_sublaplacian(frame: &AdaptedFrame, f: &Poly, point: &[f64], h: f64) -> Result<f64> {
    let ctx = SublapContext::new(frame)?;
    let coeffs = ctx.first_order(point, h)?;
    let mut acc = 0.0;
    for (i, x) in frame.horizontal_fields().enumerate() {
        let xf = x.apply(f)?;
        acc += x.apply(&xf)?.eval(point)? + coeffs[i] * xf.eval(point)?;
    }
    Ok(acc)
}

/// Divergence with respect to a rescaled volume `f * mu`:
/// `div' X = div X + X(log f)`. The caller supplies `X(log f)(q)`.
pub fn mu_divergence_shift(base_divergence: f64, logf_derivative: f64) -> f64 {
    base_divergence + logf_derivative
}

/// Check the integration-by-parts identity on a box: returns the midpoint
/// quadratures of `f (Delta g)` and `-<grad f, grad g>` against the Popp
/// coordinate density. For functions vanishing to sufficient order at the
/// boundary the two agree up to quadrature error.
pub fn symmetry_check(
    frame: &AdaptedFrame,
    f: &Poly,
    g: &Poly,
    region: &[(f64, f64)],
    grid: &[usize],
) -> Result<(f64, f64)> {
    let n = frame.nvars();
    if region.len() != n || grid.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: region.len().min(grid.len()),
        });
    }
    if grid.iter().any(|&g| g == 0) {
        return Err(Error::InvalidStructure("grid counts must be positive".into()));
    }
    let ctx = SublapContext::new(frame)?;
    let k = frame.rank();
    let horizontal: Vec<&VectorField> = frame.horizontal_fields().collect();
    let mut xf = Vec::with_capacity(k);
    let mut xg = Vec::with_capacity(k);
    let mut xxg = Vec::with_capacity(k);
    for x in &horizontal {
        let df = x.apply(f)?;
        let dg = x.apply(g)?;
        xxg.push(x.apply(&dg)?);
        xf.push(df);
        xg.push(dg);
    }

    // Midpoint nodes as exact rationals: keeps high-degree integrand
    // evaluation fast when the box bounds are dyadic.
    let mut cell = BigRational::from_integer(BigInt::from(1));
    let mut axis_nodes: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    for (d, &(lo, hi)) in region.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidStructure(format!(
                "invalid region on axis {d}: [{lo}, {hi}]"
            )));
        }
        let lo_r = BigRational::from_float(lo).ok_or(Error::NonFinitePoint)?;
        let hi_r = BigRational::from_float(hi).ok_or(Error::NonFinitePoint)?;
        let width = &hi_r - &lo_r;
        let count = grid[d];
        cell *= &width / BigRational::from_integer(BigInt::from(count as i64));
        let mut nodes = Vec::with_capacity(count);
        for i in 0..count {
            let frac = BigRational::new(
                BigInt::from(2 * i as i64 + 1),
                BigInt::from(2 * count as i64),
            );
            nodes.push(&lo_r + &width * frac);
        }
        axis_nodes.push(nodes);
    }
    let cell_volume = rational_to_f64(&cell);

    let total: usize = grid.iter().product();
    let terms: Vec<(f64, f64)> = (0..total)
        .into_par_iter()
        .map(|flat| -> Result<(f64, f64)> {
            let mut idx = flat;
            let mut node_r = Vec::with_capacity(n);
            for d in 0..n {
                node_r.push(axis_nodes[d][idx % grid[d]].clone());
                idx /= grid[d];
            }
            let node_f: Vec<f64> = node_r.iter().map(rational_to_f64).collect();

            let singular = |e: Error| Error::SingularRegion(e.to_string());
            let grams = ctx.grams_at(&node_f).map_err(singular)?;
            let solver = FrameSolver::new(frame, &node_f).map_err(singular)?;
            let coeffs = (0..k)
                .map(|i| {
                    ctx.divergence_with(&grams, &solver, &node_f, i, DEFAULT_FD_STEP)
                        .map(|(d, _)| d)
                })
                .collect::<Result<Vec<f64>>>()
                .map_err(singular)?;
            let density =
                popp_density_adapted(&grams) / solver.matrix().determinant().abs();
            if !density.is_finite() {
                return Err(Error::SingularRegion(format!(
                    "density not finite at {node_f:?}"
                )));
            }

            let fv = f.eval_prepared(&node_r)?;
            let mut delta_g = 0.0;
            let mut grad_pair = 0.0;
            for i in 0..k {
                let dgi = xg[i].eval_prepared(&node_r)?;
                delta_g += xxg[i].eval_prepared(&node_r)? + coeffs[i] * dgi;
                grad_pair += xf[i].eval_prepared(&node_r)? * dgi;
            }
            Ok((fv * delta_g * density, -grad_pair * density))
        })
        .collect::<Result<Vec<_>>>()?;

    let lhs: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let rhs: Vec<f64> = terms.iter().map(|t| t.1).collect();
    Ok((
        pairwise_sum(&lhs) * cell_volume,
        pairwise_sum(&rhs) * cell_volume,
    ))
}
