//! Per-point report assembly: growth vector, Gram determinants, densities,
//! sub-Laplacian coefficients and warnings in one record.

use serde::Serialize;

use crate::error::Result;
use crate::field::VectorField;
use crate::flag::{hausdorff_dimension, AdaptedFrame, FrameSource};
use crate::popp::{
    adapted_constants, gram_matrices, oracle_gram_deviation, popp_density_adapted,
    popp_density_coordinates,
};
use crate::structure::SrStructure;
use crate::sublap::sublaplacian_coeffs;

#[derive(Debug, Clone, Serialize)]
pub struct SublaplacianReport {
    /// First-order coefficients of the canonical sub-Laplacian in the
    /// horizontal frame.
    pub first_order: Vec<f64>,
    /// Popp divergences of the horizontal frame fields (equal to the
    /// first-order coefficients).
    pub divergences: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoppReport {
    pub point: Vec<f64>,
    pub growth_vector: Vec<usize>,
    pub flag_dims: Vec<usize>,
    pub step: usize,
    pub hausdorff_dimension: usize,
    /// Frame fields as bracket words or supplied completions, in order.
    pub frame: Vec<String>,
    /// Determinants of the level Gram matrices, level 1 first.
    pub gram_determinants: Vec<f64>,
    pub popp_density_adapted: f64,
    pub popp_density_coordinates: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sublaplacian: Option<SublaplacianReport>,
    /// Maximum relative deviation between the min-norm oracle Gram matrices
    /// and the inverse level Gram matrices, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_deviation: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub tol: f64,
    pub fd_step: f64,
    /// Run the min-norm oracle cross-validation.
    pub oracle: bool,
    /// Compute sub-Laplacian coefficients; failures become warnings unless
    /// `require_sublaplacian` is set.
    pub with_sublaplacian: bool,
    pub require_sublaplacian: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            tol: crate::flag::DEFAULT_RANK_TOL,
            fd_step: crate::sublap::DEFAULT_FD_STEP,
            oracle: false,
            with_sublaplacian: true,
            require_sublaplacian: false,
        }
    }
}

/// Compute the full per-point record. With completion fields the frame is
/// `horizontal ++ completion`; otherwise the deterministic greedy frame is
/// used.
pub fn popp_report(
    s: &SrStructure,
    completion: Option<&[VectorField]>,
    point: &[f64],
    opts: &ReportOptions,
) -> Result<PoppReport> {
    let frame = match completion {
        Some(c) if !c.is_empty() => AdaptedFrame::with_completion(s, point, c, opts.tol)?,
        _ => AdaptedFrame::build(s, point, opts.tol)?,
    };
    let mut warnings = Vec::new();
    let dims = frame.flag_dims().to_vec();
    for level in 2..=dims.len() {
        if dims[level - 1] == dims[level - 2] {
            warnings.push(format!(
                "flag level {level} adds no directions at this point; the structure is not \
                 equiregular near it and densities are stratum-pointwise values"
            ));
        }
    }

    let constants = adapted_constants(&frame, point)?;
    let grams = gram_matrices(&constants, opts.tol)?;
    let adapted = popp_density_adapted(&grams);
    let coordinates = popp_density_coordinates(&frame, &grams, point)?;

    let sublaplacian = if opts.with_sublaplacian {
        match sublaplacian_coeffs(&frame, point, opts.fd_step) {
            Ok(data) => {
                warnings.extend(data.warnings.iter().cloned());
                Some(SublaplacianReport {
                    first_order: data.first_order,
                    divergences: data.divergences,
                })
            }
            Err(e) if !opts.require_sublaplacian => {
                warnings.push(format!("sub-Laplacian coefficients unavailable: {e}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let oracle_deviation = if opts.oracle {
        Some(oracle_gram_deviation(&frame, point)?)
    } else {
        None
    };

    Ok(PoppReport {
        point: point.to_vec(),
        growth_vector: dims.clone(),
        hausdorff_dimension: hausdorff_dimension(&dims),
        step: dims.len(),
        flag_dims: dims,
        frame: frame
            .fields()
            .iter()
            .map(|fv| match &fv.source {
                FrameSource::Word(indices) => crate::flag::BracketWord {
                    indices: indices.clone(),
                    field: fv.field.clone(),
                }
                .display(),
                FrameSource::Supplied(label) => label.clone(),
            })
            .collect(),
        gram_determinants: grams.determinants().to_vec(),
        popp_density_adapted: adapted,
        popp_density_coordinates: coordinates,
        sublaplacian,
        oracle_deviation,
        warnings,
    })
}
