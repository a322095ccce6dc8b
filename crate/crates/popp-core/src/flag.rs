//! The flag of a distribution at a point: growth vector, adapted frames
//! built from iterated bracket words, equiregularity diagnostics and the
//! Hausdorff dimension.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::linalg::{condition_number, numerical_rank};
use crate::poly::Monomial;
use crate::structure::SrStructure;

/// Default relative singular-value threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Frames whose value matrix is worse conditioned than this are rejected;
/// downstream densities would be meaningless there.
pub const MAX_FRAME_CONDITION: f64 = 1e12;

/// Cap on bracket length while searching for the flag. Growth can stall for
/// several levels before resuming (the stall length is unbounded over all
/// polynomial structures), so this is a safety net on top of the exact
/// saturation certificate below.
pub const MAX_FLAG_LEVEL: usize = 32;

/// A right-nested bracket word `[X_{i1}, [X_{i2}, ..., [X_{i_{j-1}}, X_{ij}]]]`
/// of the horizontal fields, together with its exact realization.
#[derive(Debug, Clone)]
pub struct BracketWord {
    /// 0-based indices into the horizontal frame.
    pub indices: Vec<usize>,
    pub field: VectorField,
}

impl BracketWord {
    /// Human-readable form with 1-based indices, e.g. `[X1,[X1,X2]]`.
    pub fn display(&self) -> String {
        fn nest(indices: &[usize]) -> String {
            match indices {
                [i] => format!("X{}", i + 1),
                [i, rest @ ..] => format!("[X{},{}]", i + 1, nest(rest)),
                [] => String::new(),
            }
        }
        nest(&self.indices)
    }
}

/// All bracket words of the horizontal fields, level by level, in
/// (length, lexicographic) order. Level j holds k^j words.
#[derive(Debug, Clone)]
pub struct WordTable {
    levels: Vec<Vec<BracketWord>>,
}

impl WordTable {
    pub fn new(horizontal: &[VectorField]) -> Self {
        let level1 = horizontal
            .iter()
            .enumerate()
            .map(|(i, f)| BracketWord {
                indices: vec![i],
                field: f.clone(),
            })
            .collect();
        WordTable {
            levels: vec![level1],
        }
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }

    /// Words of length `level` (1-based), extending the table on demand.
    pub fn level(&mut self, level: usize) -> Result<&[BracketWord]> {
        while self.levels.len() < level {
            let horizontal: Vec<VectorField> = self.levels[0]
                .iter()
                .map(|w| w.field.clone())
                .collect();
            let prev = self.levels.last().unwrap();
            let mut next = Vec::with_capacity(horizontal.len() * prev.len());
            for (i, x) in horizontal.iter().enumerate() {
                for w in prev {
                    let mut indices = Vec::with_capacity(w.indices.len() + 1);
                    indices.push(i);
                    indices.extend_from_slice(&w.indices);
                    next.push(BracketWord {
                        indices,
                        field: x.bracket(&w.field)?,
                    });
                }
            }
            self.levels.push(next);
        }
        Ok(&self.levels[level - 1])
    }

    /// Words of an already-built level; panics if the level was never built.
    pub fn built_level(&self, level: usize) -> &[BracketWord] {
        &self.levels[level - 1]
    }
}

/// Exact linear span of vector fields over the rationals, used as a
/// saturation certificate: once a whole level adds nothing to the span of
/// fields, no later level can, and the search may stop.
#[derive(Default)]
struct ExactSpan {
    // Reduced vectors keyed by (component, monomial); each has a distinct
    // leading key.
    basis: Vec<BTreeMap<(usize, Monomial), BigRational>>,
}

impl ExactSpan {
    /// Insert a field; returns true if it enlarged the span.
    fn insert(&mut self, f: &VectorField) -> bool {
        let mut vec: BTreeMap<(usize, Monomial), BigRational> = BTreeMap::new();
        for (comp, p) in f.components().iter().enumerate() {
            for (m, c) in p.terms() {
                vec.insert((comp, m.clone()), c.clone());
            }
        }
        for b in &self.basis {
            let pivot = b.keys().next().expect("basis vectors are nonzero");
            if let Some(c) = vec.get(pivot).cloned() {
                let factor = &c / &b[pivot];
                for (key, val) in b {
                    let entry = vec.entry(key.clone()).or_insert_with(BigRational::zero);
                    *entry -= &factor * val;
                    if entry.is_zero() {
                        vec.remove(key);
                    }
                }
            }
        }
        if vec.is_empty() {
            return false;
        }
        // Keep basis ordered by leading key so reduction stays triangular.
        let pos = self
            .basis
            .partition_point(|b| b.keys().next() < vec.keys().next());
        self.basis.insert(pos, vec);
        true
    }
}

/// Growth vector `(k_1, ..., k_m)` of the distribution at a point: `k_i` is
/// the numerical rank of the values of all bracket words of length <= i.
pub fn growth_vector(s: &SrStructure, point: &[f64], tol: f64) -> Result<Vec<usize>> {
    let mut words = WordTable::new(s.horizontal_fields());
    let (dims, _) = flag_scan(s, point, tol, &mut words)?;
    Ok(dims)
}

/// Shared scan behind `growth_vector` and the greedy frame: per-level ranks
/// plus the level at which the flag reached full dimension.
fn flag_scan(
    s: &SrStructure,
    point: &[f64],
    tol: f64,
    words: &mut WordTable,
) -> Result<(Vec<usize>, usize)> {
    s.check_point(point)?;
    let n = s.nvars();
    let k = s.rank();

    let mut columns: Vec<DVector<f64>> = Vec::new();
    let mut span = ExactSpan::default();
    for w in words.level(1)? {
        columns.push(w.field.eval(point)?);
        span.insert(&w.field);
    }
    let mat = DMatrix::from_columns(&columns);
    let rank1 = numerical_rank(&mat, tol);
    if rank1 < k {
        return Err(Error::RankDeficientHorizontal {
            point: point.to_vec(),
            rank: rank1,
        });
    }
    let mut dims = vec![k];
    if k == n {
        // Unreachable for valid structures (k < n), but harmless.
        return Ok((dims, 1));
    }

    let mut level = 1;
    loop {
        level += 1;
        if level > MAX_FLAG_LEVEL {
            return Err(Error::NotBracketGenerating {
                point: point.to_vec(),
                stalled_rank: *dims.last().unwrap(),
            });
        }
        let mut span_grew = false;
        for w in words.level(level)? {
            columns.push(w.field.eval(point)?);
            if span.insert(&w.field) {
                span_grew = true;
            }
        }
        let mat = DMatrix::from_columns(&columns);
        let rank = numerical_rank(&mat, tol).max(*dims.last().unwrap());
        dims.push(rank);
        if rank == n {
            return Ok((dims, level));
        }
        if !span_grew {
            // No bracket word of any greater length can leave the exact
            // span of the current ones, so the pointwise rank is final.
            return Err(Error::NotBracketGenerating {
                point: point.to_vec(),
                stalled_rank: rank,
            });
        }
    }
}

/// Where a frame vector came from.
#[derive(Debug, Clone)]
pub enum FrameSource {
    /// A right-nested bracket word of the horizontal fields (0-based indices).
    Word(Vec<usize>),
    /// A user-supplied completion field.
    Supplied(String),
}

#[derive(Debug, Clone)]
pub struct FrameVector {
    pub source: FrameSource,
    pub field: VectorField,
}

/// A frame of n global polynomial fields that is adapted to the flag at the
/// basepoint (and hence on a neighborhood of it): the first `k_i` fields
/// span the level-i subspace there. The first k fields are always the
/// horizontal frame in order.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    nvars: usize,
    rank: usize,
    basepoint: Vec<f64>,
    flag_dims: Vec<usize>,
    fields: Vec<FrameVector>,
    tol: f64,
    words: WordTable,
}

impl AdaptedFrame {
    /// Deterministic greedy construction: bracket words are enumerated in
    /// (length, lexicographic) order and kept whenever their value at the
    /// basepoint increases the numerical rank of the kept set.
    pub fn build(s: &SrStructure, point: &[f64], tol: f64) -> Result<Self> {
        let n = s.nvars();
        let k = s.rank();
        let mut words = WordTable::new(s.horizontal_fields());
        let (dims, step) = flag_scan(s, point, tol, &mut words)?;

        let mut kept: Vec<FrameVector> = Vec::with_capacity(n);
        let mut columns: Vec<DVector<f64>> = Vec::with_capacity(n);
        for w in words.level(1)? {
            kept.push(FrameVector {
                source: FrameSource::Word(w.indices.clone()),
                field: w.field.clone(),
            });
            columns.push(w.field.eval(point)?);
        }
        let mut greedy_dims = vec![k];
        for level in 2..=step {
            for w in words.level(level)? {
                if kept.len() == n {
                    break;
                }
                let v = w.field.eval(point)?;
                columns.push(v);
                let mat = DMatrix::from_columns(&columns);
                if numerical_rank(&mat, tol) > kept.len() {
                    kept.push(FrameVector {
                        source: FrameSource::Word(w.indices.clone()),
                        field: w.field.clone(),
                    });
                } else {
                    columns.pop();
                }
            }
            greedy_dims.push(kept.len());
        }
        if greedy_dims != dims {
            return Err(Error::ResidualCheckFailed(format!(
                "greedy frame selection found levels {greedy_dims:?} but the growth vector is {dims:?}"
            )));
        }

        let frame = AdaptedFrame {
            nvars: n,
            rank: k,
            basepoint: point.to_vec(),
            flag_dims: dims,
            fields: kept,
            tol,
            words,
        };
        frame.check_condition(point)?;
        Ok(frame)
    }

    /// Build a frame from user-supplied completion fields instead of greedy
    /// bracket words. The ordered list `horizontal ++ completion` must be
    /// adapted at the basepoint: for each level i, its first k_i values must
    /// be independent and lie in the level-i subspace.
    pub fn with_completion(
        s: &SrStructure,
        point: &[f64],
        completion: &[VectorField],
        tol: f64,
    ) -> Result<Self> {
        let n = s.nvars();
        let k = s.rank();
        if k + completion.len() != n {
            return Err(Error::NotAdapted {
                point: point.to_vec(),
                detail: format!(
                    "completion has {} fields, expected {}",
                    completion.len(),
                    n - k
                ),
            });
        }
        for f in completion {
            if f.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.nvars(),
                });
            }
        }
        let mut words = WordTable::new(s.horizontal_fields());
        let (dims, step) = flag_scan(s, point, tol, &mut words)?;

        let mut fields: Vec<FrameVector> = s
            .horizontal_fields()
            .iter()
            .enumerate()
            .map(|(i, f)| FrameVector {
                source: FrameSource::Word(vec![i]),
                field: f.clone(),
            })
            .collect();
        for (j, f) in completion.iter().enumerate() {
            fields.push(FrameVector {
                source: FrameSource::Supplied(format!("completion[{j}]")),
                field: f.clone(),
            });
        }

        // Word values spanning each level of the flag.
        let mut word_columns: Vec<DVector<f64>> = Vec::new();
        let frame_values: Vec<DVector<f64>> = fields
            .iter()
            .map(|fv| fv.field.eval(point))
            .collect::<Result<_>>()?;
        for level in 1..=step {
            for w in words.level(level)? {
                word_columns.push(w.field.eval(point)?);
            }
            let ki = dims[level - 1];
            let head: Vec<DVector<f64>> = frame_values[..ki].to_vec();
            if numerical_rank(&DMatrix::from_columns(&head), tol) < ki {
                return Err(Error::NotAdapted {
                    point: point.to_vec(),
                    detail: format!("first {ki} frame fields are dependent at level {level}"),
                });
            }
            let mut augmented = word_columns.clone();
            augmented.extend(head);
            if numerical_rank(&DMatrix::from_columns(&augmented), tol) > ki {
                return Err(Error::NotAdapted {
                    point: point.to_vec(),
                    detail: format!(
                        "frame fields up to position {ki} leave the level-{level} subspace"
                    ),
                });
            }
        }

        let frame = AdaptedFrame {
            nvars: n,
            rank: k,
            basepoint: point.to_vec(),
            flag_dims: dims,
            fields,
            tol,
            words,
        };
        frame.check_condition(point)?;
        Ok(frame)
    }

    fn check_condition(&self, point: &[f64]) -> Result<()> {
        let m = self.value_matrix(point)?;
        let cond = condition_number(&m);
        if !cond.is_finite() || cond > MAX_FRAME_CONDITION {
            return Err(Error::NearSingularFrame {
                point: point.to_vec(),
                condition: cond,
            });
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Rank of the underlying distribution.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn flag_dims(&self) -> &[usize] {
        &self.flag_dims
    }

    /// Step of the structure at the basepoint.
    pub fn step(&self) -> usize {
        self.flag_dims.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn fields(&self) -> &[FrameVector] {
        &self.fields
    }

    pub fn horizontal_fields(&self) -> impl Iterator<Item = &VectorField> {
        self.fields[..self.rank].iter().map(|fv| &fv.field)
    }

    /// Number of fields at flag level `j` (1-based).
    pub fn level_size(&self, j: usize) -> usize {
        let lo = if j >= 2 { self.flag_dims[j - 2] } else { 0 };
        self.flag_dims[j - 1] - lo
    }

    /// Range of frame positions occupied by level `j` (1-based, half-open).
    pub fn level_range(&self, j: usize) -> std::ops::Range<usize> {
        let lo = if j >= 2 { self.flag_dims[j - 2] } else { 0 };
        lo..self.flag_dims[j - 1]
    }

    /// The n-by-n matrix whose columns are the frame values at `point`.
    pub fn value_matrix(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        let q = crate::poly::rationalize_point(point)?;
        let columns: Vec<DVector<f64>> = self
            .fields
            .iter()
            .map(|fv| fv.field.eval_floats(&q))
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_columns(&columns))
    }

    /// Bracket words of the given length. Levels up to the step at the
    /// basepoint are precomputed at construction time.
    pub fn bracket_words(&self, level: usize) -> &[BracketWord] {
        debug_assert!(level <= self.flag_dims.len());
        self.words.built_level(level)
    }
}

/// Hausdorff dimension from flag dimensions: `Q = sum_i i * (k_i - k_{i-1})`.
pub fn hausdorff_dimension(flag_dims: &[usize]) -> usize {
    let mut prev = 0;
    let mut q = 0;
    for (i, &ki) in flag_dims.iter().enumerate() {
        q += (i + 1) * (ki - prev);
        prev = ki;
    }
    q
}

#[derive(Debug, Clone, Serialize)]
pub struct Stratum {
    pub growth_vector: Vec<usize>,
    pub point_indices: Vec<usize>,
}

/// Outcome of sampling the growth vector over a point set. Per-point
/// failures are recorded, not raised.
#[derive(Debug, Clone, Serialize)]
pub struct EquiregularityReport {
    pub strata: Vec<Stratum>,
    pub failures: Vec<(usize, String)>,
    pub equiregular: bool,
}

pub fn check_equiregular(s: &SrStructure, sample: &[Vec<f64>], tol: f64) -> EquiregularityReport {
    let mut strata: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut failures = Vec::new();
    for (i, point) in sample.iter().enumerate() {
        match growth_vector(s, point, tol) {
            Ok(g) => strata.entry(g).or_default().push(i),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    let equiregular = strata.len() == 1 && failures.is_empty();
    EquiregularityReport {
        strata: strata
            .into_iter()
            .map(|(growth_vector, point_indices)| Stratum {
                growth_vector,
                point_indices,
            })
            .collect(),
        failures,
        equiregular,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn heis() -> SrStructure {
        builtin::structure("heisenberg").unwrap()
    }

    fn martinet() -> SrStructure {
        builtin::structure("martinet").unwrap()
    }

    fn engel() -> SrStructure {
        builtin::structure("engel").unwrap()
    }

    #[test]
    fn martinet_growth_off_and_on_the_plane() {
        assert_eq!(
            growth_vector(&martinet(), &[0.0, 1.0, 0.0], DEFAULT_RANK_TOL).unwrap(),
            vec![2, 3]
        );
        assert_eq!(
            growth_vector(&martinet(), &[0.0, 0.0, 0.0], DEFAULT_RANK_TOL).unwrap(),
            vec![2, 2, 3]
        );
    }

    #[test]
    fn heisenberg_growth_everywhere() {
        for q in [[0.0, 0.0, 0.0], [1.0, -2.0, 3.0], [0.3, 0.1, -0.7]] {
            assert_eq!(
                growth_vector(&heis(), &q, DEFAULT_RANK_TOL).unwrap(),
                vec![2, 3]
            );
        }
    }

    #[test]
    fn involutive_structure_is_rejected() {
        // Two commuting fields never span R^3.
        let s = SrStructure::new(
            "involutive",
            vec![
                VectorField::coordinate(3, 0).unwrap(),
                VectorField::coordinate(3, 1).unwrap(),
            ],
        )
        .unwrap();
        match growth_vector(&s, &[0.0, 0.0, 0.0], DEFAULT_RANK_TOL) {
            Err(Error::NotBracketGenerating { stalled_rank, .. }) => {
                assert_eq!(stalled_rank, 2)
            }
            other => panic!("expected NotBracketGenerating, got {other:?}"),
        }
    }

    #[test]
    fn rank_deficient_horizontal_detected() {
        let s = SrStructure::new(
            "degenerate",
            vec![
                VectorField::coordinate(3, 0).unwrap(),
                VectorField::coordinate(3, 0).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(
            growth_vector(&s, &[0.0; 3], DEFAULT_RANK_TOL),
            Err(Error::RankDeficientHorizontal { .. })
        ));
    }

    fn word_sources(frame: &AdaptedFrame) -> Vec<Vec<usize>> {
        frame
            .fields()
            .iter()
            .map(|fv| match &fv.source {
                FrameSource::Word(w) => w.clone(),
                FrameSource::Supplied(_) => panic!("expected bracket word"),
            })
            .collect()
    }

    #[test]
    fn martinet_greedy_frame() {
        let frame = AdaptedFrame::build(&martinet(), &[0.0, 1.0, 0.0], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(frame.flag_dims(), &[2, 3]);
        assert_eq!(word_sources(&frame), vec![vec![0], vec![1], vec![0, 1]]);
    }

    #[test]
    fn martinet_frame_on_singular_plane() {
        // At y = 0 level 2 adds nothing; the greedy frame picks the
        // length-3 word [X2,[X1,X2]].
        let frame = AdaptedFrame::build(&martinet(), &[0.0, 0.0, 0.0], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(frame.flag_dims(), &[2, 2, 3]);
        assert_eq!(
            word_sources(&frame),
            vec![vec![0], vec![1], vec![1, 0, 1]]
        );
    }

    #[test]
    fn heisenberg_greedy_frame() {
        let frame = AdaptedFrame::build(&heis(), &[0.0, 0.0, 0.0], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(frame.flag_dims(), &[2, 3]);
        assert_eq!(word_sources(&frame), vec![vec![0], vec![1], vec![0, 1]]);
    }

    #[test]
    fn engel_greedy_frame() {
        let frame = AdaptedFrame::build(&engel(), &[0.0; 4], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(frame.flag_dims(), &[2, 3, 4]);
        assert_eq!(
            word_sources(&frame),
            vec![vec![0], vec![1], vec![0, 1], vec![0, 0, 1]]
        );
        assert_eq!(frame.fields()[3].field, VectorField::coordinate(4, 3).unwrap());
    }

    #[test]
    fn frame_determinism() {
        let a = AdaptedFrame::build(&engel(), &[0.2, -0.4, 0.8, 0.1], DEFAULT_RANK_TOL).unwrap();
        let b = AdaptedFrame::build(&engel(), &[0.2, -0.4, 0.8, 0.1], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(word_sources(&a), word_sources(&b));
    }

    #[test]
    fn frame_value_matrix_invertible() {
        let frame = AdaptedFrame::build(&martinet(), &[0.0, 0.5, 0.0], DEFAULT_RANK_TOL).unwrap();
        let m = frame.value_matrix(&[0.0, 0.5, 0.0]).unwrap();
        assert!(m.determinant().abs() > 1e-9);
        // First two columns are the horizontal field values.
        assert_eq!(m.column(0).as_slice(), &[1.0, 0.0, 0.25]);
        assert_eq!(m.column(1).as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn completion_frame_accepts_adapted_and_rejects_others() {
        let dz = VectorField::coordinate(3, 2).unwrap();
        let frame =
            AdaptedFrame::with_completion(&martinet(), &[0.0, 1.0, 0.0], &[dz], DEFAULT_RANK_TOL)
                .unwrap();
        assert_eq!(frame.flag_dims(), &[2, 3]);

        // A completion inside the distribution is not transversal.
        let bad = VectorField::coordinate(3, 1).unwrap();
        assert!(matches!(
            AdaptedFrame::with_completion(&martinet(), &[0.0, 1.0, 0.0], &[bad], DEFAULT_RANK_TOL),
            Err(Error::NotAdapted { .. })
        ));
    }

    #[test]
    fn completion_respects_levels() {
        // On Engel, dw lies in level 3, not level 2, so listing it as the
        // level-2 completion field is not adapted.
        let dz = VectorField::coordinate(4, 2).unwrap();
        let dw = VectorField::coordinate(4, 3).unwrap();
        assert!(AdaptedFrame::with_completion(
            &engel(),
            &[0.0; 4],
            &[dz.clone(), dw.clone()],
            DEFAULT_RANK_TOL
        )
        .is_ok());
        assert!(matches!(
            AdaptedFrame::with_completion(&engel(), &[0.0; 4], &[dw, dz], DEFAULT_RANK_TOL),
            Err(Error::NotAdapted { .. })
        ));
    }

    #[test]
    fn hausdorff_dimension_formula() {
        assert_eq!(hausdorff_dimension(&[2, 3]), 4);
        assert_eq!(hausdorff_dimension(&[2, 3, 4]), 7);
        assert_eq!(hausdorff_dimension(&[3, 6]), 9);
        // Step-2 case (k, n): k + 2(n - k).
        assert_eq!(hausdorff_dimension(&[5, 9]), 5 + 2 * 4);
    }

    #[test]
    fn equiregularity_grid_reports() {
        let mut grid = Vec::new();
        for x in [-1.0, 0.0, 1.0] {
            for y in [-1.0, 0.0, 1.0] {
                for z in [-1.0, 0.0, 1.0] {
                    grid.push(vec![x, y, z]);
                }
            }
        }
        let heis_report = check_equiregular(&heis(), &grid, DEFAULT_RANK_TOL);
        assert!(heis_report.equiregular);
        assert_eq!(heis_report.strata.len(), 1);
        assert_eq!(heis_report.strata[0].growth_vector, vec![2, 3]);

        let mart_report = check_equiregular(&martinet(), &grid, DEFAULT_RANK_TOL);
        assert!(!mart_report.equiregular);
        assert_eq!(mart_report.strata.len(), 2);
        assert_eq!(mart_report.strata[0].growth_vector, vec![2, 2, 3]);
        assert_eq!(mart_report.strata[1].growth_vector, vec![2, 3]);
        // Nine grid points sit on y = 0.
        assert_eq!(mart_report.strata[0].point_indices.len(), 9);
    }

    #[test]
    fn tolerance_stability_on_builtins() {
        for tol in [1e-12, 1e-9, 1e-6] {
            assert_eq!(
                growth_vector(&martinet(), &[0.4, 0.1, -0.2], tol).unwrap(),
                vec![2, 3]
            );
            assert_eq!(
                growth_vector(&heis(), &[0.7, -0.3, 0.9], tol).unwrap(),
                vec![2, 3]
            );
            assert_eq!(
                growth_vector(&engel(), &[0.5, 0.5, 0.5, 0.5], tol).unwrap(),
                vec![2, 3, 4]
            );
        }
    }
}
