//! Exact rational linear algebra over degree-indexed bases.
//!
//! Matrices are stored column-sparse; elimination is reduced row echelon with
//! a fixed pivot order (leftmost nonzero column, first available row), so
//! every solve and kernel basis is reproducible across runs and platforms.

use crate::error::{Error, Result};
use crate::scalar::{is_zero, Scalar};
use num::{One, Zero};
use std::collections::BTreeMap;

/// Sparse coordinate vector: (index, coefficient) sorted by index, no zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

pub fn sparse_from_dense(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !is_zero(c))
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

pub fn dense_from_sparse(v: &SparseVec, len: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); len];
    for (i, c) in v {
        out[*i] = c.clone();
    }
    out
}

pub fn sparse_add(a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut map: BTreeMap<usize, Scalar> = a.iter().cloned().collect();
    for (i, c) in b {
        let e = map.entry(*i).or_insert_with(Scalar::zero);
        *e += c;
    }
    map.into_iter().filter(|(_, c)| !is_zero(c)).collect()
}

pub fn sparse_scale(a: &SparseVec, s: &Scalar) -> SparseVec {
    if is_zero(s) {
        return Vec::new();
    }
    a.iter().map(|(i, c)| (*i, c * s)).collect()
}

/// A matrix over Q with explicit row/column counts and sparse columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<SparseVec>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m.data[i].push((i, Scalar::one()));
        }
        m
    }

    pub fn from_columns(rows: usize, cols: Vec<SparseVec>) -> Self {
        for c in &cols {
            debug_assert!(c.iter().all(|(i, v)| *i < rows && !is_zero(v)));
        }
        QMatrix {
            rows,
            cols: cols.len(),
            data: cols,
        }
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut cols = vec![Vec::new(); c];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.iter().enumerate() {
                if !is_zero(v) {
                    cols[j].push((i, v.clone()));
                }
            }
        }
        QMatrix::from_columns(r, cols)
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.data[j]
    }

    pub fn set_col(&mut self, j: usize, v: SparseVec) {
        debug_assert!(v.iter().all(|(i, c)| *i < self.rows && !is_zero(c)));
        self.data[j] = v;
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.data[j]
            .iter()
            .find(|(r, _)| *r == i)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    pub fn apply(&self, x: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (j, c) in x {
            for (i, m) in &self.data[*j] {
                let e = acc.entry(*i).or_insert_with(Scalar::zero);
                *e += m * c;
            }
        }
        acc.into_iter().filter(|(_, c)| !is_zero(c)).collect()
    }

    pub fn apply_dense(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![Scalar::zero(); self.rows];
        for (j, xj) in x.iter().enumerate() {
            if is_zero(xj) {
                continue;
            }
            for (i, m) in &self.data[j] {
                out[*i] += m * xj;
            }
        }
        out
    }

    /// self ∘ other (apply other first).
    pub fn compose(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let cols = (0..other.cols).map(|j| self.apply(other.col(j))).collect();
        QMatrix::from_columns(self.rows, cols)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut cols = vec![Vec::new(); self.rows];
        for j in 0..self.cols {
            for (i, c) in &self.data[j] {
                cols[*i].push((j, c.clone()));
            }
        }
        QMatrix::from_columns(self.cols, cols)
    }

    pub fn rank(&self) -> usize {
        Echelon::new(self).rank()
    }
}

/// Reduced row echelon form of a matrix together with the row-operation
/// record, supporting repeated solves and kernel extraction.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    /// Nonzero rows of the RREF, dense.
    r: Vec<Vec<Scalar>>,
    /// Rows of E with E·M = R, including rows past the rank (used for
    /// consistency checks when solving).
    e: Vec<Vec<Scalar>>,
    /// Pivot column of each of the first `rank` rows; strictly increasing.
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(m: &QMatrix) -> Self {
        let rows = m.rows;
        let cols = m.cols;
        // Dense working copy of [M | I].
        let mut a: Vec<Vec<Scalar>> = (0..rows)
            .map(|i| {
                let mut row = vec![Scalar::zero(); cols];
                for j in 0..cols {
                    for (r, c) in m.col(j) {
                        if *r == i {
                            row[j] = c.clone();
                        }
                    }
                }
                row
            })
            .collect();
        let mut e: Vec<Vec<Scalar>> = (0..rows)
            .map(|i| {
                let mut row = vec![Scalar::zero(); rows];
                row[i] = Scalar::one();
                row
            })
            .collect();

        let mut pivots = Vec::new();
        let mut next_row = 0usize;
        for col in 0..cols {
            // first row at or below next_row with a nonzero entry in col
            let Some(p) = (next_row..rows).find(|&i| !is_zero(&a[i][col])) else {
                continue;
            };
            a.swap(next_row, p);
            e.swap(next_row, p);
            let inv = a[next_row][col].recip();
            for x in a[next_row].iter_mut() {
                *x *= &inv;
            }
            for x in e[next_row].iter_mut() {
                *x *= &inv;
            }
            for i in 0..rows {
                if i != next_row && !is_zero(&a[i][col]) {
                    let f = a[i][col].clone();
                    for j in 0..cols {
                        let t = &a[next_row][j] * &f;
                        a[i][j] -= t;
                    }
                    for j in 0..e[i].len() {
                        let t = &e[next_row][j] * &f;
                        e[i][j] -= t;
                    }
                }
            }
            pivots.push(col);
            next_row += 1;
            if next_row == rows {
                break;
            }
        }
        a.truncate(next_row);
        Echelon {
            cols,
            r: a,
            e,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Solve M x = b. Returns the canonical minimal-support solution (free
    /// variables zero) or None when inconsistent.
    pub fn solve(&self, b: &SparseVec) -> Option<Vec<Scalar>> {
        let rows = self.e.first().map(|r| r.len()).unwrap_or(0);
        let bd = dense_from_sparse(b, rows);
        let rank = self.rank();
        // consistency: rows of E past the rank must annihilate b
        for i in rank..rows {
            let mut acc = Scalar::zero();
            for (j, c) in self.e[i].iter().enumerate() {
                if !is_zero(c) {
                    acc += c * &bd[j];
                }
            }
            if !is_zero(&acc) {
                return None;
            }
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &pc) in self.pivots.iter().enumerate() {
            let mut acc = Scalar::zero();
            for (j, c) in self.e[row].iter().enumerate() {
                if !is_zero(c) {
                    acc += c * &bd[j];
                }
            }
            x[pc] = acc;
        }
        Some(x)
    }

    pub fn in_image(&self, b: &SparseVec) -> bool {
        self.solve(b).is_some()
    }

    /// Basis of ker M, one vector per free column, in ascending column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let pivot_set: std::collections::BTreeSet<usize> = self.pivots.iter().cloned().collect();
        let mut out = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (row, &pc) in self.pivots.iter().enumerate() {
                let c = &self.r[row][free];
                if !is_zero(c) {
                    v[pc] = -c.clone();
                }
            }
            out.push(v);
        }
        out
    }
}

/// Growing row space with fast membership tests; rows are kept forward-
/// reduced and sorted by pivot, so adding a vector is one reduction pass.
#[derive(Clone, Debug)]
pub struct IncrementalSpan {
    dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl IncrementalSpan {
    pub fn new(dim: usize) -> Self {
        IncrementalSpan {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &SparseVec) -> Vec<Scalar> {
        let mut x = dense_from_sparse(v, self.dim);
        for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
            if !is_zero(&x[p]) {
                let f = x[p].clone();
                for (k, r) in row.iter().enumerate() {
                    if !is_zero(r) {
                        let t = r * &f;
                        x[k] -= t;
                    }
                }
            }
        }
        x
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).iter().all(is_zero)
    }

    /// Add a vector; returns true when it enlarged the span.
    pub fn try_add(&mut self, v: &SparseVec) -> bool {
        let mut x = self.reduce(v);
        let Some(p) = x.iter().position(|c| !is_zero(c)) else {
            return false;
        };
        let inv = x[p].recip();
        for c in x.iter_mut() {
            *c *= &inv;
        }
        let at = self
            .pivots
            .iter()
            .position(|&q| q > p)
            .unwrap_or(self.pivots.len());
        self.rows.insert(at, x);
        self.pivots.insert(at, p);
        true
    }
}

/// Deterministic solve of M x = b (reduced row echelon, fixed pivot order).
pub fn solve(m: &QMatrix, b: &SparseVec) -> Result<Option<Vec<Scalar>>> {
    if let Some((i, _)) = b.iter().find(|(i, _)| *i >= m.rows) {
        return Err(Error::Dimension(format!(
            "right-hand side touches row {} of a {}-row matrix",
            i, m.rows
        )));
    }
    Ok(Echelon::new(m).solve(b))
}

/// A degree-respecting linear map between graded vector spaces with a fixed
/// degree shift; columns are indexed by the source basis per degree.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub source: GradedVectorSpace,
    pub target: GradedVectorSpace,
    pub shift: i32,
    blocks: BTreeMap<i32, QMatrix>,
}

impl LinearMap {
    pub fn new(
        source: GradedVectorSpace,
        target: GradedVectorSpace,
        shift: i32,
        blocks: BTreeMap<i32, QMatrix>,
    ) -> Result<Self> {
        for (d, m) in &blocks {
            let sc = source.dim_in(*d);
            let tr = target.dim_in(d + shift);
            if m.cols != sc || m.rows != tr {
                return Err(Error::Dimension(format!(
                    "block at degree {} is {}x{}, expected {}x{}",
                    d, m.rows, m.cols, tr, sc
                )));
            }
        }
        Ok(LinearMap {
            source,
            target,
            shift,
            blocks,
        })
    }

    pub fn zero(source: GradedVectorSpace, target: GradedVectorSpace, shift: i32) -> Self {
        LinearMap {
            source,
            target,
            shift,
            blocks: BTreeMap::new(),
        }
    }

    pub fn block(&self, degree: i32) -> QMatrix {
        self.blocks.get(&degree).cloned().unwrap_or_else(|| {
            QMatrix::zero(
                self.target.dim_in(degree + self.shift),
                self.source.dim_in(degree),
            )
        })
    }

    /// self ∘ other; shifts add.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if other.target != self.source {
            return Err(Error::Dimension(
                "composition: target/source spaces differ".into(),
            ));
        }
        let shift = self.shift + other.shift;
        let mut blocks = BTreeMap::new();
        for d in other.source.degrees() {
            let m = self.block(d + other.shift).compose(&other.block(d));
            if !m.is_zero_matrix() {
                blocks.insert(d, m);
            }
        }
        LinearMap::new(other.source.clone(), self.target.clone(), shift, blocks)
    }
}

/// dim ker(d_out at `degree`) − rank(d_in into `degree`).
///
/// `d_in` maps degree `degree − d_in.shift`... callers pass the two maps of a
/// two-step complex; the composite is checked to vanish on the inspected
/// degree before any rank is taken.
pub fn homology_dims(d_in: &LinearMap, d_out: &LinearMap, degree: i32) -> Result<usize> {
    let src_deg = degree - d_in.shift;
    let into = d_in.block(src_deg);
    let out = d_out.block(degree);
    if out.cols != into.rows {
        return Err(Error::Dimension(format!(
            "blocks around degree {} do not line up: {} vs {}",
            degree, out.cols, into.rows
        )));
    }
    let comp = out.compose(&into);
    if !comp.is_zero_matrix() {
        return Err(Error::NotAComplex(format!(
            "composite through degree {} is nonzero",
            degree
        )));
    }
    let kernel = out.cols - out.rank();
    let image = into.rank();
    Ok(kernel - image)
}

/// Kernel/image/homology data at one degree of a two-step complex
/// `· --d_in--> V --d_out--> ·`, with deterministic representatives.
pub struct HomologyAt {
    pub dim_space: usize,
    pub cycle_basis: Vec<Vec<Scalar>>,
    /// Representatives of a homology basis (cycles, dense coordinates).
    pub reps: Vec<Vec<Scalar>>,
    /// Echelon of [boundary basis | reps] used to reduce cycles.
    reducer: Echelon,
    boundary_rank: usize,
}

impl HomologyAt {
    pub fn new(d_in: &QMatrix, d_out: &QMatrix) -> Result<HomologyAt> {
        if d_out.cols != d_in.rows {
            return Err(Error::Dimension(format!(
                "two-step complex blocks do not line up: {} vs {}",
                d_out.cols, d_in.rows
            )));
        }
        if !d_out.compose(d_in).is_zero_matrix() {
            return Err(Error::NotAComplex("d_out ∘ d_in ≠ 0".into()));
        }
        let n = d_in.rows;
        let cycle_basis = Echelon::new(d_out).kernel_basis();
        // boundary space basis: independent columns of d_in, in column order
        let mut span = IncrementalSpan::new(n);
        let mut bcols: Vec<SparseVec> = Vec::new();
        for j in 0..d_in.cols {
            if span.try_add(d_in.col(j)) {
                bcols.push(d_in.col(j).clone());
            }
        }
        let boundary_rank = bcols.len();
        // homology reps: kernel vectors that enlarge the boundary span
        let mut reps: Vec<Vec<Scalar>> = Vec::new();
        for z in &cycle_basis {
            if span.try_add(&sparse_from_dense(z)) {
                reps.push(z.clone());
            }
        }
        let mut cols: Vec<SparseVec> = bcols;
        for r in &reps {
            cols.push(sparse_from_dense(r));
        }
        let reducer = Echelon::new(&QMatrix::from_columns(n, cols));
        Ok(HomologyAt {
            dim_space: n,
            cycle_basis,
            reps,
            reducer,
            boundary_rank,
        })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Express a cycle's class in the chosen homology basis. None when the
    /// vector is not in cycles + boundaries (i.e. not a cycle).
    pub fn reduce(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        let sol = self.reducer.solve(v)?;
        Some(sol[self.boundary_rank..].to_vec())
    }

    pub fn is_boundary(&self, v: &SparseVec) -> Option<bool> {
        self.reduce(v).map(|h| h.iter().all(is_zero))
    }
}

/// Finite named basis per integer degree. Generators are kept sorted by
/// (degree, name), so truncation to degrees ≤ n is an index prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVectorSpace {
    gens: Vec<Generator>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
}

impl GradedVectorSpace {
    pub fn new(gens: Vec<(String, i32)>) -> Result<Self> {
        let mut gens: Vec<Generator> = gens
            .into_iter()
            .map(|(name, degree)| Generator { name, degree })
            .collect();
        gens.sort_by(|a, b| (a.degree, &a.name).cmp(&(b.degree, &b.name)));
        for w in gens.windows(2) {
            if w[0].name == w[1].name {
                return Err(Error::Degree(format!(
                    "duplicate generator name {}",
                    w[0].name
                )));
            }
        }
        Ok(GradedVectorSpace { gens })
    }

    pub fn empty() -> Self {
        GradedVectorSpace { gens: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gen(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn degree_of(&self, i: usize) -> i32 {
        self.gens[i].degree
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn dim_in(&self, degree: i32) -> usize {
        self.gens.iter().filter(|g| g.degree == degree).count()
    }

    /// Indices of the generators in one degree (contiguous).
    pub fn indices_in(&self, degree: i32) -> std::ops::Range<usize> {
        let start = self.gens.iter().position(|g| g.degree == degree);
        match start {
            None => 0..0,
            Some(s) => {
                let e = self.gens[s..]
                    .iter()
                    .position(|g| g.degree != degree)
                    .map(|k| s + k)
                    .unwrap_or(self.gens.len());
                s..e
            }
        }
    }

    pub fn degrees(&self) -> Vec<i32> {
        let mut ds: Vec<i32> = self.gens.iter().map(|g| g.degree).collect();
        ds.dedup();
        ds
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.gens.first().map(|g| g.degree)
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.gens.last().map(|g| g.degree)
    }

    /// Subspace of generators in degrees ≤ n; indices are stable (prefix).
    pub fn truncate(&self, n: i32) -> GradedVectorSpace {
        GradedVectorSpace {
            gens: self
                .gens
                .iter()
                .take_while(|g| g.degree <= n)
                .cloned()
                .collect(),
        }
    }

    /// True when no two consecutive degrees both carry generators.
    pub fn is_sparse(&self) -> bool {
        let ds = self.degrees();
        ds.windows(2).all(|w| w[1] - w[0] >= 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn m(rows: &[&[i64]]) -> QMatrix {
        let dense: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| qi(x)).collect())
            .collect();
        QMatrix::from_dense(&dense)
    }

    #[test]
    fn solve_identity_and_zero() {
        let id = QMatrix::identity(1);
        let x = solve(&id, &vec![(0, q(3, 2))]).unwrap().unwrap();
        assert_eq!(x, vec![q(3, 2)]);

        let z = QMatrix::zero(2, 3);
        let x = solve(&z, &Vec::new()).unwrap().unwrap();
        assert_eq!(x, vec![qi(0), qi(0), qi(0)]);
        assert!(solve(&z, &vec![(0, qi(1))]).unwrap().is_none());
    }

    #[test]
    fn solve_is_exact_and_minimal_support() {
        let a = m(&[&[2, 4, 0], &[1, 2, 1]]);
        let b = vec![(0, qi(2)), (1, qi(2))];
        let x = solve(&a, &b).unwrap().unwrap();
        // pivot columns are 0 and 2; free column 1 stays zero
        assert_eq!(x, vec![qi(1), qi(0), qi(1)]);
        assert_eq!(a.apply(&sparse_from_dense(&x)), b);
    }

    #[test]
    fn kernel_and_rank_nullity() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let e = Echelon::new(&a);
        assert_eq!(e.rank(), 1);
        let k = e.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.apply_dense(v).iter().all(is_zero));
        }
    }

    #[test]
    fn dimension_mismatch_reported() {
        let a = m(&[&[1]]);
        assert!(matches!(
            solve(&a, &vec![(5, qi(1))]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn homology_of_two_step_complex() {
        // 0 -> Q^2 with zero differentials: H = 2
        let v = GradedVectorSpace::new(vec![("a".into(), 1), ("b".into(), 1)]).unwrap();
        let zero_in = LinearMap::zero(v.clone(), v.clone(), -1);
        let zero_out = LinearMap::zero(v.clone(), v.clone(), -1);
        assert_eq!(homology_dims(&zero_in, &zero_out, 1).unwrap(), 2);
    }

    #[test]
    fn homology_at_with_reps() {
        // d_in = [1;0] into Q^2, d_out = 0: H dim 1, rep = e2 direction
        let d_in = m(&[&[1], &[0]]);
        let d_out = QMatrix::zero(0, 2);
        let h = HomologyAt::new(&d_in, &d_out).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.is_boundary(&vec![(0, qi(5))]), Some(true));
        assert_eq!(h.is_boundary(&vec![(1, qi(1))]), Some(false));
        let c = h.reduce(&vec![(0, qi(2)), (1, qi(3))]).unwrap();
        assert_eq!(c.len(), 1);
        assert!(!is_zero(&c[0]));
    }

    #[test]
    fn random_rank_nullity_sparse() {
        // deterministic pseudo-random sparse matrices up to 40x40
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..8 {
            let rows = 5 + (next() % 36) as usize;
            let cols = 5 + (next() % 36) as usize;
            let mut colsv: Vec<SparseVec> = Vec::new();
            for _ in 0..cols {
                let mut cvec: Vec<(usize, Scalar)> = Vec::new();
                for i in 0..rows {
                    if next() % 5 == 0 {
                        let num = (next() % 7) as i64 - 3;
                        if num != 0 {
                            cvec.push((i, qi(num)));
                        }
                    }
                }
                colsv.push(cvec);
            }
            let mat = QMatrix::from_columns(rows, colsv);
            let e = Echelon::new(&mat);
            assert_eq!(
                e.rank() + e.kernel_basis().len(),
                cols,
                "rank-nullity failed on trial {}",
                trial
            );
        }
    }

    #[test]
    fn graded_space_truncation_is_prefix() {
        let v = GradedVectorSpace::new(vec![
            ("x2".into(), 3),
            ("x1".into(), 1),
            ("x3".into(), 5),
        ])
        .unwrap();
        assert_eq!(v.gen(0).name, "x1");
        let t = v.truncate(3);
        assert_eq!(t.len(), 2);
        assert_eq!(t.gen(1).name, "x2");
        assert!(v.is_sparse());
        let w = GradedVectorSpace::new(vec![("a".into(), 2), ("b".into(), 3)]).unwrap();
        assert!(!w.is_sparse());
    }
}
