//! Problem instances, pooling designs and noiseless test outcomes.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::bits::{BitMatrix, BitVec};
use crate::error::{check_dim, param, Result};
use crate::rng::GtRng;

/// Outcome vectors (length `T`) and item estimates (length `n`) are plain bit
/// vectors.
pub type ResultVector = BitVec;

/// Ground truth: which of the `n` items are defective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    n: usize,
    defectives: Vec<usize>,
}

impl ProblemInstance {
    /// Duplicates are merged; every index must be below `n`.
    pub fn new(n: usize, defectives: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n == 0 {
            return Err(param("item count n must be positive"));
        }
        let set: BTreeSet<usize> = defectives.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&j| j >= n) {
            return Err(param(alloc::format!(
                "defective index {bad} outside [0, {n})"
            )));
        }
        Ok(ProblemInstance {
            n,
            defectives: set.into_iter().collect(),
        })
    }

    /// A defective set drawn uniformly among all `d`-subsets of `[0, n)`
    /// (Floyd's sampling with [`GtRng::below`]).
    pub fn random(n: usize, d: usize, seed: u64) -> Result<Self> {
        if d > n {
            return Err(param(alloc::format!("d = {d} exceeds n = {n}")));
        }
        let mut rng = GtRng::new(seed);
        let mut chosen = BTreeSet::new();
        for j in (n - d)..n {
            let t = rng.below(j + 1);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        ProblemInstance::new(n, chosen)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.defectives.len()
    }

    /// Sorted defective indices.
    pub fn defectives(&self) -> &[usize] {
        &self.defectives
    }

    pub fn is_defective(&self, j: usize) -> bool {
        self.defectives.binary_search(&j).is_ok()
    }

    /// The input vector x.
    pub fn indicator(&self) -> BitVec {
        BitVec::from_indices(self.n, self.defectives.iter().copied())
    }
}

/// Design-level knowledge: the defective-count bound `D`, the error exponent
/// `delta` (target error `n^-delta`) and the seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    pub max_defectives: usize,
    pub delta: f64,
    pub seed: u64,
}

impl DesignParams {
    pub fn new(max_defectives: usize, delta: f64, seed: u64) -> Result<Self> {
        if max_defectives < 1 {
            return Err(param("D must be at least 1"));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(param("delta must be positive"));
        }
        Ok(DesignParams {
            max_defectives,
            delta,
            seed,
        })
    }

    pub fn target_error(&self, n: usize) -> f64 {
        libm::pow(n as f64, -self.delta)
    }
}

/// How a matrix was generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Design {
    /// i.i.d. entries equal to one with probability `p`.
    Bernoulli { p: f64 },
    /// Each row marks the items hit by `g` uniform draws with replacement.
    CouponCollector { g: usize },
    /// Supplied by hand or read from a file without generation metadata.
    Explicit,
}

/// Pooling design entries for the column-matching and LP decoders: `p = 1/D`,
/// or `1/2` when `D = 1`.
pub fn design_probability(max_defectives: usize) -> f64 {
    if max_defectives <= 1 {
        0.5
    } else {
        1.0 / max_defectives as f64
    }
}

/// `T × n` binary pooling matrix, stored both row- and column-packed.
#[derive(Clone, PartialEq)]
pub struct TestMatrix {
    by_row: BitMatrix,
    by_col: BitMatrix,
    design: Design,
}

impl core::fmt::Debug for TestMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "TestMatrix({:?}) ", self.design)?;
        core::fmt::Debug::fmt(&self.by_row, f)
    }
}

impl TestMatrix {
    pub fn from_bit_matrix(by_row: BitMatrix, design: Design) -> Self {
        let by_col = by_row.transpose();
        TestMatrix {
            by_row,
            by_col,
            design,
        }
    }

    /// Rows given as 0/1 slices of equal length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let t = rows.len();
        if t == 0 {
            return Err(param("matrix needs at least one row"));
        }
        let n = rows[0].as_ref().len();
        let mut m = BitMatrix::zeros(t, n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            check_dim("matrix row length", n, r.len())?;
            for (j, &v) in r.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => return Err(param("matrix entries must be 0 or 1")),
                }
            }
        }
        Ok(TestMatrix::from_bit_matrix(m, Design::Explicit))
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        TestMatrix::from_bit_matrix(m, Design::Explicit)
    }

    /// Number of tests `T`.
    pub fn rows(&self) -> usize {
        self.by_row.rows()
    }

    /// Number of items `n`.
    pub fn cols(&self) -> usize {
        self.by_row.cols()
    }

    pub fn design(&self) -> Design {
        self.design
    }

    pub fn get(&self, test: usize, item: usize) -> bool {
        self.by_row.get(test, item)
    }

    pub fn row(&self, test: usize) -> BitVec {
        self.by_row.row(test)
    }

    /// Items pooled in `test`.
    pub fn row_support(&self, test: usize) -> impl Iterator<Item = usize> + '_ {
        self.by_row.row_ones(test)
    }

    /// Tests containing `item`, as a length-`T` vector.
    pub fn column(&self, item: usize) -> BitVec {
        self.by_col.row(item)
    }

    pub fn column_support(&self, item: usize) -> impl Iterator<Item = usize> + '_ {
        self.by_col.row_ones(item)
    }

    pub fn column_weight(&self, item: usize) -> usize {
        self.by_col.row_count_ones(item)
    }

    pub fn row_weight(&self, test: usize) -> usize {
        self.by_row.row_count_ones(test)
    }

    pub fn row_major(&self) -> &BitMatrix {
        &self.by_row
    }

    pub fn column_major(&self) -> &BitMatrix {
        &self.by_col
    }

    /// Reorders items: column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        check_dim("permutation length", self.cols(), perm.len())?;
        let mut m = BitMatrix::zeros(self.rows(), self.cols());
        for (new_j, &old_j) in perm.iter().enumerate() {
            for i in self.column_support(old_j) {
                m.set(i, new_j, true);
            }
        }
        Ok(TestMatrix::from_bit_matrix(m, self.design))
    }
}

fn check_shape(tests: usize, items: usize) -> Result<()> {
    if tests < 1 {
        return Err(param("test count T must be at least 1"));
    }
    if items < 1 {
        return Err(param("item count n must be at least 1"));
    }
    Ok(())
}

/// i.i.d. Bernoulli(`p`) design. Entries are drawn row by row, left to right.
pub fn gen_bernoulli_matrix(tests: usize, items: usize, p: f64, seed: u64) -> Result<TestMatrix> {
    check_shape(tests, items)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(param(alloc::format!("Bernoulli p = {p} outside (0, 1)")));
    }
    let mut rng = GtRng::new(seed);
    let mut m = BitMatrix::zeros(tests, items);
    for i in 0..tests {
        for j in 0..items {
            if rng.bernoulli(p) {
                m.set(i, j, true);
            }
        }
    }
    Ok(TestMatrix::from_bit_matrix(m, Design::Bernoulli { p }))
}

/// Coupon-collector design: each row is the set of items hit by `g` uniform
/// draws with replacement.
pub fn gen_coco_matrix(tests: usize, items: usize, g: usize, seed: u64) -> Result<TestMatrix> {
    check_shape(tests, items)?;
    if g < 1 {
        return Err(param("group sampling parameter g must be at least 1"));
    }
    let mut rng = GtRng::new(seed);
    let mut m = BitMatrix::zeros(tests, items);
    for i in 0..tests {
        for _ in 0..g {
            m.set(i, rng.below(items), true);
        }
    }
    Ok(TestMatrix::from_bit_matrix(m, Design::CouponCollector { g }))
}

/// Group size `round(1 / ln(n / (n - D)))`, at least 1.
pub fn coco_group_size(n: usize, max_defectives: usize) -> Result<usize> {
    if max_defectives < 1 || max_defectives >= n {
        return Err(param(alloc::format!(
            "coupon-collector group size needs 1 <= D < n (D = {max_defectives}, n = {n})"
        )));
    }
    let g = 1.0 / libm::log(n as f64 / (n - max_defectives) as f64);
    Ok((libm::round(g) as usize).max(1))
}

/// `y_i = 1` iff test `i` pools at least one defective.
pub fn noiseless_outcomes(m: &TestMatrix, inst: &ProblemInstance) -> Result<ResultVector> {
    check_dim("instance item count", m.cols(), inst.n())?;
    let mut y = BitVec::zeros(m.rows());
    for &j in inst.defectives() {
        y.or_assign(&m.column(j));
    }
    Ok(y)
}
