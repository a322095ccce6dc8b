//! Popp's volume density: adapted structure constants, the level Gram
//! matrices built from them, the density in the adapted and coordinate
//! gauges, and an independent minimum-norm oracle for cross-validation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::flag::{AdaptedFrame, MAX_FRAME_CONDITION};
use crate::linalg::{condition_number, min_norm_solve};
use crate::structure::SrStructure;

/// Adapted structure constants at a point: for each level j >= 2 and each
/// frame slot l of that level, the coefficient of the frame field `X_l` in
/// the class of the bracket word `[X_{i1}, ..., [X_{i_{j-1}}, X_{ij}]]`
/// modulo the previous level, for every tuple `(i_1, ..., i_j)` over the
/// horizontal indices in lexicographic order.
#[derive(Debug, Clone)]
pub struct AdaptedConstants {
    point: Vec<f64>,
    rank: usize,
    flag_dims: Vec<usize>,
    levels: Vec<LevelConstants>,
}

#[derive(Debug, Clone)]
pub struct LevelConstants {
    pub level: usize,
    /// `b[l][t]`: coefficient for the l-th slot of this level and the t-th
    /// tuple (lexicographic rank in {1..k}^level).
    pub b: Vec<Vec<f64>>,
}

impl AdaptedConstants {
    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn flag_dims(&self) -> &[usize] {
        &self.flag_dims
    }

    /// Constants of level `j` (2-based levels; `j <= step`).
    pub fn level(&self, j: usize) -> &LevelConstants {
        &self.levels[j - 2]
    }

    pub fn levels(&self) -> &[LevelConstants] {
        &self.levels
    }
}

pub(crate) struct FrameSolver {
    qr: nalgebra::ColPivQR<f64, nalgebra::Dyn, nalgebra::Dyn>,
    matrix: DMatrix<f64>,
    residual_tol: f64,
}

impl FrameSolver {
    pub(crate) fn new(frame: &AdaptedFrame, point: &[f64]) -> Result<Self> {
        let matrix = frame.value_matrix(point)?;
        let cond = condition_number(&matrix);
        if !cond.is_finite() || cond > MAX_FRAME_CONDITION {
            return Err(Error::NearSingularFrame {
                point: point.to_vec(),
                condition: cond,
            });
        }
        Ok(FrameSolver {
            qr: matrix.clone().col_piv_qr(),
            matrix,
            residual_tol: frame.tol(),
        })
    }

    pub(crate) fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Coefficients of `v` in the frame, with residual verification.
    pub(crate) fn solve(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        let x = self.qr.solve(v).ok_or_else(|| {
            Error::ResidualCheckFailed("frame solve failed (singular matrix)".into())
        })?;
        let residual = (&self.matrix * &x - v).norm();
        let scale = v.norm().max(1.0);
        if residual > self.residual_tol * scale {
            return Err(Error::ResidualCheckFailed(format!(
                "frame solve residual {residual:.3e} exceeds {:.3e}",
                self.residual_tol * scale
            )));
        }
        Ok(x)
    }
}

/// Compute the adapted structure constants of `frame` at `point` by solving
/// the frame system for every bracket word value. Word values must lie in
/// their flag level: components above it signal a frame that is not adapted
/// at this point.
pub fn adapted_constants(frame: &AdaptedFrame, point: &[f64]) -> Result<AdaptedConstants> {
    let n = frame.nvars();
    let solver = FrameSolver::new(frame, point)?;
    let q = crate::poly::rationalize_point(point)?;
    let mut levels = Vec::with_capacity(frame.step().saturating_sub(1));
    for j in 2..=frame.step() {
        let range = frame.level_range(j);
        let words = frame.bracket_words(j);
        let mut b = vec![vec![0.0; words.len()]; range.len()];
        for (t, w) in words.iter().enumerate() {
            let v = w.field.eval_floats(&q)?;
            let a = solver.solve(&v)?;
            let scale = a.amax().max(1.0);
            for l in range.end..n {
                if a[l].abs() > frame.tol() * scale {
                    return Err(Error::ResidualCheckFailed(format!(
                        "bracket word {} leaks {:.3e} outside level {j} at {point:?}",
                        w.display(),
                        a[l]
                    )));
                }
            }
            for (local, l) in range.clone().enumerate() {
                b[local][t] = a[l];
            }
        }
        levels.push(LevelConstants { level: j, b });
    }
    Ok(AdaptedConstants {
        point: point.to_vec(),
        rank: frame.rank(),
        flag_dims: frame.flag_dims().to_vec(),
        levels,
    })
}

/// Per-level Gram matrices of the adapted constants and their determinants.
/// Level 1 is the k-by-k identity.
#[derive(Debug, Clone)]
pub struct GramData {
    point: Vec<f64>,
    matrices: Vec<DMatrix<f64>>,
    determinants: Vec<f64>,
}

impl GramData {
    pub fn point(&self) -> &[f64] {
        &self.point
    }

    /// Gram matrix of level `j` (1-based).
    pub fn matrix(&self, j: usize) -> &DMatrix<f64> {
        &self.matrices[j - 1]
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    pub fn determinants(&self) -> &[f64] {
        &self.determinants
    }

    pub fn step(&self) -> usize {
        self.matrices.len()
    }
}

/// Assemble the level Gram matrices: entry (h, l) sums `b^h b^l` over all
/// ordered horizontal index tuples. Positive definiteness is verified; its
/// failure after a successful growth-vector computation is an internal
/// inconsistency.
pub fn gram_matrices(constants: &AdaptedConstants, rank_tol: f64) -> Result<GramData> {
    let k = constants.rank();
    let mut matrices = vec![DMatrix::<f64>::identity(k, k)];
    let mut determinants = vec![1.0];
    for lc in constants.levels() {
        let d = lc.b.len();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for h in 0..d {
            for l in h..d {
                let s: f64 = lc.b[h]
                    .iter()
                    .zip(&lc.b[l])
                    .map(|(x, y)| x * y)
                    .sum();
                m[(h, l)] = s;
                m[(l, h)] = s;
            }
        }
        let det = if d == 0 {
            1.0
        } else {
            let eig = m.clone().symmetric_eigen();
            let max = eig.eigenvalues.amax();
            let min = eig.eigenvalues.min();
            if min <= 0.0 || min < rank_tol * max {
                return Err(Error::NotPositiveDefinite {
                    level: lc.level,
                    min_eigenvalue: min,
                });
            }
            eig.eigenvalues.iter().product()
        };
        matrices.push(m);
        determinants.push(det);
    }
    Ok(GramData {
        point: constants.point().to_vec(),
        matrices,
        determinants,
    })
}

/// Popp density relative to the coframe dual to the adapted frame:
/// `(prod_j det B_j)^(-1/2)`.
pub fn popp_density_adapted(grams: &GramData) -> f64 {
    let prod: f64 = grams.determinants().iter().product();
    1.0 / prod.sqrt()
}

/// Popp density against Lebesgue measure at `point`: the adapted-gauge
/// density divided by |det M| where M holds the frame values. Reported
/// unsigned; independent of the choice of adapted completion.
pub fn popp_density_coordinates(
    frame: &AdaptedFrame,
    grams: &GramData,
    point: &[f64],
) -> Result<f64> {
    let m = frame.value_matrix(point)?;
    let cond = condition_number(&m);
    if !cond.is_finite() || cond > MAX_FRAME_CONDITION {
        return Err(Error::NearSingularFrame {
            point: point.to_vec(),
            condition: cond,
        });
    }
    Ok(popp_density_adapted(grams) / m.determinant().abs())
}

/// Independent oracle: the induced norm of a level-j class is the minimum
/// Euclidean norm over tuple coefficient vectors mapping onto it. Computed
/// by least squares / pseudoinverse, not through the Gram determinant
/// formula.
///
/// `target` is a tangent vector at `point` whose class in level j is
/// measured; its frame components below level j are irrelevant and
/// components above level j must vanish.
pub fn quotient_norm_oracle(
    frame: &AdaptedFrame,
    point: &[f64],
    level: usize,
    target: &DVector<f64>,
) -> Result<f64> {
    if level < 2 || level > frame.step() {
        return Err(Error::InvalidStructure(format!(
            "oracle level must be between 2 and the step {}, got {level}",
            frame.step()
        )));
    }
    let n = frame.nvars();
    if target.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.len(),
        });
    }
    let constants = adapted_constants(frame, point)?;
    let solver = FrameSolver::new(frame, point)?;
    let c = solver.solve(target)?;
    let scale = c.amax().max(1.0);
    let range = frame.level_range(level);
    for l in range.end..n {
        if c[l].abs() > frame.tol() * scale {
            return Err(Error::TargetOutsideLevel {
                level,
                residual: c[l].abs(),
            });
        }
    }
    let class: DVector<f64> = DVector::from_iterator(range.len(), range.clone().map(|l| c[l]));

    let lc = constants.level(level);
    let tuples = lc.b.first().map_or(0, Vec::len);
    // Rows: one linear condition per frame slot of the level; the unknown
    // is the tuple coefficient vector.
    let a = DMatrix::from_fn(range.len(), tuples, |row, col| lc.b[row][col]);
    let (solution, residual) = min_norm_solve(&a, &class, frame.tol())?;
    if residual > frame.tol() * class.norm().max(1.0) {
        return Err(Error::TargetOutsideLevel {
            level,
            residual,
        });
    }
    Ok(solution.norm())
}

/// Cross-validate the Gram formula against the oracle: rebuild the Gram
/// matrix of the level-j frame classes from oracle norms (by polarization)
/// and compare it entrywise with the inverse of the assembled level Gram
/// matrix. Returns the maximum relative deviation over all levels.
pub fn oracle_gram_deviation(frame: &AdaptedFrame, point: &[f64]) -> Result<f64> {
    let constants = adapted_constants(frame, point)?;
    let grams = gram_matrices(&constants, frame.tol())?;
    let m = frame.value_matrix(point)?;
    let mut worst: f64 = 0.0;
    for j in 2..=frame.step() {
        let range = frame.level_range(j);
        let d = range.len();
        if d == 0 {
            continue;
        }
        let binv = grams
            .matrix(j)
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::ResidualCheckFailed(format!("level-{j} Gram not invertible")))?;
        for l in 0..d {
            for h in 0..=l {
                let u = m.column(range.start + l).into_owned();
                let v = m.column(range.start + h).into_owned();
                let inner = if l == h {
                    let norm = quotient_norm_oracle(frame, point, j, &u)?;
                    norm * norm
                } else {
                    let plus = quotient_norm_oracle(frame, point, j, &(&u + &v))?;
                    let minus = quotient_norm_oracle(frame, point, j, &(&u - &v))?;
                    (plus * plus - minus * minus) / 4.0
                };
                let expected = binv[(l, h)];
                let dev = (inner - expected).abs() / (1.0 + expected.abs());
                worst = worst.max(dev);
            }
        }
    }
    Ok(worst)
}

/// Squared Hilbert-Schmidt norm of the bracket pairing on a corank-one
/// structure with transversal field `x0`: the sum over horizontal pairs of
/// the squared `x0`-component of their bracket in the frame
/// `(X_1, ..., X_k, x0)`. Vanishing means the structure is not bracket
/// generating at step 2 and is rejected.
pub fn contact_invariant(
    s: &SrStructure,
    x0: &VectorField,
    point: &[f64],
    tol: f64,
) -> Result<f64> {
    let n = s.nvars();
    let k = s.rank();
    if n != k + 1 {
        return Err(Error::NotCorankOne { rank: k, dim: n });
    }
    s.check_point(point)?;
    if x0.nvars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.nvars(),
        });
    }
    let mut columns: Vec<DVector<f64>> = s
        .horizontal_fields()
        .iter()
        .map(|f| f.eval(point))
        .collect::<Result<_>>()?;
    columns.push(x0.eval(point)?);
    let m = DMatrix::from_columns(&columns);
    let cond = condition_number(&m);
    if !cond.is_finite() || cond > MAX_FRAME_CONDITION {
        return Err(Error::NearSingularFrame {
            point: point.to_vec(),
            condition: cond,
        });
    }
    let qr = m.clone().col_piv_qr();
    let mut sum = 0.0;
    let fields = s.horizontal_fields();
    for i in 0..k {
        for j in (i + 1)..k {
            let br = fields[i].bracket(&fields[j])?;
            let v = br.eval(point)?;
            let a = qr.solve(&v).ok_or_else(|| {
                Error::ResidualCheckFailed("frame solve failed in contact invariant".into())
            })?;
            let residual = (&m * &a - &v).norm();
            if residual > tol * v.norm().max(1.0) {
                return Err(Error::ResidualCheckFailed(format!(
                    "contact frame solve residual {residual:.3e}"
                )));
            }
            // Pairs (i, j) and (j, i) contribute equally.
            sum += 2.0 * a[k] * a[k];
        }
    }
    if sum <= tol {
        return Err(Error::DegenerateBrackets {
            point: point.to_vec(),
        });
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::flag::DEFAULT_RANK_TOL;

    const SQRT2_INV: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn dz(n: usize) -> VectorField {
        VectorField::coordinate(n, n - 1).unwrap()
    }

    #[test]
    fn heisenberg_constants_and_density() {
        let s = builtin::structure("heisenberg").unwrap();
        let q = [0.3, -0.7, 1.1];
        let frame =
            AdaptedFrame::with_completion(&s, &q, &[dz(3)], DEFAULT_RANK_TOL).unwrap();
        let constants = adapted_constants(&frame, &q).unwrap();
        // Tuples (1,1), (1,2), (2,1), (2,2): b = (0, 1, -1, 0).
        let b = &constants.level(2).b[0];
        assert_eq!(b.len(), 4);
        assert!((b[0]).abs() < 1e-12 && (b[3]).abs() < 1e-12);
        assert!((b[1] - 1.0).abs() < 1e-12);
        assert!((b[2] + 1.0).abs() < 1e-12);

        let grams = gram_matrices(&constants, DEFAULT_RANK_TOL).unwrap();
        assert!((grams.determinants()[1] - 2.0).abs() < 1e-12);
        assert!((popp_density_adapted(&grams) - SQRT2_INV).abs() < 1e-12);
        let coord = popp_density_coordinates(&frame, &grams, &q).unwrap();
        assert!((coord - SQRT2_INV).abs() < 1e-12);
    }

    #[test]
    fn martinet_constants_both_completions() {
        let s = builtin::structure("martinet").unwrap();
        let y = 0.8;
        let q = [0.2, y, -0.4];

        // Greedy frame: third field is [X1, X2] itself, so b = (0, 1, -1, 0).
        let greedy = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
        let constants = adapted_constants(&greedy, &q).unwrap();
        let b = &constants.level(2).b[0];
        assert!((b[1] - 1.0).abs() < 1e-12 && (b[2] + 1.0).abs() < 1e-12);
        let grams = gram_matrices(&constants, DEFAULT_RANK_TOL).unwrap();
        assert!((grams.determinants()[1] - 2.0).abs() < 1e-12);

        // dz completion: b = (0, -2y, 2y, 0), so the level-2 Gram is 8y^2.
        let zc = AdaptedFrame::with_completion(&s, &q, &[dz(3)], DEFAULT_RANK_TOL).unwrap();
        let constants = adapted_constants(&zc, &q).unwrap();
        let b = &constants.level(2).b[0];
        assert!((b[1] + 2.0 * y).abs() < 1e-12 && (b[2] - 2.0 * y).abs() < 1e-12);
        let grams_z = gram_matrices(&constants, DEFAULT_RANK_TOL).unwrap();
        assert!((grams_z.determinants()[1] - 8.0 * y * y).abs() < 1e-12);
        let adapted = popp_density_adapted(&grams_z);
        let expected = 1.0 / (2.0 * std::f64::consts::SQRT_2 * y.abs());
        assert!((adapted - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn martinet_coordinate_density_frame_independent() {
        let s = builtin::structure("martinet").unwrap();
        for y in [0.3, 0.8, -1.4] {
            let q = [0.1, y, 0.5];
            let greedy = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
            let zc = AdaptedFrame::with_completion(&s, &q, &[dz(3)], DEFAULT_RANK_TOL).unwrap();
            let d1 = {
                let c = adapted_constants(&greedy, &q).unwrap();
                let g = gram_matrices(&c, DEFAULT_RANK_TOL).unwrap();
                popp_density_coordinates(&greedy, &g, &q).unwrap()
            };
            let d2 = {
                let c = adapted_constants(&zc, &q).unwrap();
                let g = gram_matrices(&c, DEFAULT_RANK_TOL).unwrap();
                popp_density_coordinates(&zc, &g, &q).unwrap()
            };
            let expected = 1.0 / (2.0 * std::f64::consts::SQRT_2 * y.abs());
            assert!((d1 - expected).abs() / expected < 1e-12);
            assert!((d1 - d2).abs() / d1 < 1e-12);
        }
    }

    #[test]
    fn engel_gram_determinants() {
        let s = builtin::structure("engel").unwrap();
        let q = [0.0; 4];
        let frame = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
        let constants = adapted_constants(&frame, &q).unwrap();
        let grams = gram_matrices(&constants, DEFAULT_RANK_TOL).unwrap();
        assert!((grams.determinants()[1] - 2.0).abs() < 1e-12);
        assert!((grams.determinants()[2] - 2.0).abs() < 1e-12);
        assert!((popp_density_adapted(&grams) - 0.5).abs() < 1e-12);
        let coord = popp_density_coordinates(&frame, &grams, &q).unwrap();
        assert!((coord - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_hand_values() {
        let heis = builtin::structure("heisenberg").unwrap();
        let q = [0.0, 0.0, 0.0];
        let frame =
            AdaptedFrame::with_completion(&heis, &q, &[dz(3)], DEFAULT_RANK_TOL).unwrap();
        let target = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
        let norm = quotient_norm_oracle(&frame, &q, 2, &target).unwrap();
        assert!((norm - SQRT2_INV).abs() < 1e-12);

        let mart = builtin::structure("martinet").unwrap();
        for y in [0.25, 1.0, 2.0] {
            let q = [0.0, y, 0.0];
            let frame =
                AdaptedFrame::with_completion(&mart, &q, &[dz(3)], DEFAULT_RANK_TOL).unwrap();
            let norm = quotient_norm_oracle(&frame, &q, 2, &target).unwrap();
            let expected = 1.0 / (2.0 * std::f64::consts::SQRT_2 * y);
            assert!((norm - expected).abs() / expected < 1e-12);
        }
    }

    #[test]
    fn oracle_rejects_target_outside_level() {
        let s = builtin::structure("engel").unwrap();
        let q = [0.0; 4];
        let frame = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
        // dw is a level-3 direction; as a level-2 target it must be refused.
        let target = DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            quotient_norm_oracle(&frame, &q, 2, &target),
            Err(Error::TargetOutsideLevel { .. })
        ));
    }

    #[test]
    fn oracle_gram_duality_on_builtins() {
        for name in ["heisenberg", "martinet", "engel", "carnot-k3"] {
            let s = builtin::structure(name).unwrap();
            let mut q: Vec<f64> = (0..s.nvars()).map(|i| 0.3 + 0.1 * i as f64).collect();
            q[1] = 0.9; // keep Martinet clear of its singular plane
            let frame = AdaptedFrame::build(&s, &q, DEFAULT_RANK_TOL).unwrap();
            let dev = oracle_gram_deviation(&frame, &q).unwrap();
            assert!(dev < 1e-9, "{name}: oracle deviation {dev:.3e}");
        }
    }

    #[test]
    fn contact_invariant_values() {
        let heis = builtin::structure("heisenberg").unwrap();
        let v = contact_invariant(&heis, &dz(3), &[0.4, 0.2, -0.5], DEFAULT_RANK_TOL).unwrap();
        assert!((v - 2.0).abs() < 1e-12);

        let mart = builtin::structure("martinet").unwrap();
        let y = 0.7;
        let v = contact_invariant(&mart, &dz(3), &[0.0, y, 0.0], DEFAULT_RANK_TOL).unwrap();
        assert!((v - 8.0 * y * y).abs() < 1e-12);

        // Involutive horizontal fields: the invariant vanishes and the
        // structure is rejected.
        let flat = SrStructure::new(
            "flat",
            vec![
                VectorField::coordinate(3, 0).unwrap(),
                VectorField::coordinate(3, 1).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(
            contact_invariant(&flat, &dz(3), &[0.0; 3], DEFAULT_RANK_TOL),
            Err(Error::DegenerateBrackets { .. })
        ));
    }

    #[test]
    fn contact_requires_corank_one() {
        let s = builtin::structure("engel").unwrap();
        assert!(matches!(
            contact_invariant(&s, &dz(4), &[0.0; 4], DEFAULT_RANK_TOL),
            Err(Error::NotCorankOne { .. })
        ));
    }
}
