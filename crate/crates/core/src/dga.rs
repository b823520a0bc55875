//! Quasi-free (co)chain algebras (P(V), d), truncations, minimality and
//! sparseness predicates, finite-type table algebras for map targets, and
//! validated morphisms with composition and quasi-isomorphism tests in a
//! certified degree range.
//!
//! Every algebra value carries its cutoff D; results are certified only in
//! degrees ≤ D and operations that would leave the window fail loudly
//! instead of returning uncertified answers.

use crate::error::{Error, Result};
use crate::exactlin::{GradedVectorSpace, HomologyAt, QMatrix, SparseVec};
use crate::freealg::{AlgebraElement, Direction, Flavor, FreeAlgebra, Label, Monomial, Operad};
use crate::scalar::{is_zero, qi, sign_pow, Scalar};
use num::Zero;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Coordinate vector in the degreewise basis of a table algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cv {
    pub degree: i32,
    pub v: SparseVec,
}

impl Cv {
    pub fn zero(degree: i32) -> Cv {
        Cv {
            degree,
            v: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_empty()
    }

    pub fn add(&self, other: &Cv) -> Result<Cv> {
        if !self.is_zero() && !other.is_zero() && self.degree != other.degree {
            return Err(Error::Degree(format!(
                "adding coordinate vectors of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(Cv {
            degree: if self.is_zero() { other.degree } else { self.degree },
            v: crate::exactlin::sparse_add(&self.v, &other.v),
        })
    }

    pub fn sub(&self, other: &Cv) -> Result<Cv> {
        self.add(&other.scale(&qi(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Cv {
        Cv {
            degree: self.degree,
            v: crate::exactlin::sparse_scale(&self.v, s),
        }
    }
}

/// A (co)chain algebra presented by an explicit finite basis per degree with
/// structure constants: the differential as per-degree matrices and the
/// binary product as sparse tables. Quasi-free algebras tabulate into this
/// form; non-quasi-free targets of maps are given directly in it.
pub struct TableAlgebra {
    pub operad: Operad,
    pub direction: Direction,
    pub unitary: bool,
    pub cutoff: i32,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
    /// d[q] : degree q → degree q + shift.
    d: Vec<QMatrix>,
    prod: Mutex<HashMap<(i32, i32), Arc<Vec<SparseVec>>>>,
    /// Filled for tabulated quasi-free algebras; used to compute products
    /// lazily. User-supplied tables store every product eagerly instead.
    free_origin: Option<FreeAlgebra>,
    homology: Mutex<HashMap<i32, Arc<HomologyAt>>>,
}

impl TableAlgebra {
    pub fn shift(&self) -> i32 {
        self.direction.shift()
    }

    pub fn dim(&self, degree: i32) -> usize {
        if degree < 0 || degree > self.cutoff {
            0
        } else {
            self.dims[degree as usize]
        }
    }

    pub fn label(&self, degree: i32, i: usize) -> &str {
        &self.labels[degree as usize][i]
    }

    pub fn labels_in(&self, degree: i32) -> &[String] {
        &self.labels[degree as usize]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Differential matrix out of one degree.
    pub fn d_matrix(&self, degree: i32) -> QMatrix {
        if degree < 0 || degree > self.cutoff {
            return QMatrix::zero(self.dim(degree + self.shift()), 0);
        }
        self.d[degree as usize].clone()
    }

    pub fn d_cv(&self, x: &Cv) -> Cv {
        let m = self.d_matrix(x.degree);
        Cv {
            degree: x.degree + self.shift(),
            v: m.apply(&x.v),
        }
    }

    fn product_table(&self, da: i32, db: i32) -> Result<Arc<Vec<SparseVec>>> {
        if da + db > self.cutoff {
            return Err(Error::Cutoff {
                degree: da + db,
                cutoff: self.cutoff,
            });
        }
        let mut guard = self.prod.lock().unwrap();
        if let Some(t) = guard.get(&(da, db)) {
            return Ok(t.clone());
        }
        let Some(free) = &self.free_origin else {
            // absent products in a user table mean zero
            let t = Arc::new(vec![Vec::new(); self.dim(da) * self.dim(db)]);
            guard.insert((da, db), t.clone());
            return Ok(t);
        };
        let ba = free.basis_of_degree(da);
        let bb = free.basis_of_degree(db);
        let mut table = Vec::with_capacity(ba.len() * bb.len());
        for ea in &ba {
            for eb in &bb {
                let p = free.multiply(&ea.elem, &eb.elem)?;
                let coords = if p.is_zero() {
                    Vec::new()
                } else {
                    crate::exactlin::sparse_from_dense(&free.express(&p)?)
                };
                table.push(coords);
            }
        }
        let t = Arc::new(table);
        guard.insert((da, db), t.clone());
        Ok(t)
    }

    /// Structure-map product of two basis vectors, exact.
    pub fn mul_basis(&self, da: i32, i: usize, db: i32, j: usize) -> Result<Cv> {
        let t = self.product_table(da, db)?;
        Ok(Cv {
            degree: da + db,
            v: t[i * self.dim(db) + j].clone(),
        })
    }

    pub fn mul_cv(&self, a: &Cv, b: &Cv) -> Result<Cv> {
        let mut out = Cv::zero(a.degree + b.degree);
        for (i, ca) in &a.v {
            for (j, cb) in &b.v {
                let p = self.mul_basis(a.degree, *i, b.degree, *j)?;
                out = out.add(&p.scale(&(ca * cb)))?;
            }
        }
        Ok(out)
    }

    /// n-restricted product: the true product when it stays in degrees ≤ n,
    /// zero otherwise.
    pub fn mul_cv_restricted(&self, a: &Cv, b: &Cv, level: i32) -> Result<Cv> {
        if a.degree + b.degree > level {
            return Ok(Cv::zero(a.degree + b.degree));
        }
        self.mul_cv(a, b)
    }

    pub fn unit_cv(&self) -> Result<Cv> {
        if !self.unitary {
            return Err(Error::Flavor("reduced algebra has no unit".into()));
        }
        Ok(Cv {
            degree: 0,
            v: vec![(0, qi(1))],
        })
    }

    /// Homology workspace at one degree (certified for degree ≤ cutoff − 1).
    pub fn homology_at(&self, degree: i32) -> Result<Arc<HomologyAt>> {
        if degree < 0 || degree > self.cutoff - 1 {
            return Err(Error::Cutoff {
                degree,
                cutoff: self.cutoff,
            });
        }
        {
            let guard = self.homology.lock().unwrap();
            if let Some(h) = guard.get(&degree) {
                return Ok(h.clone());
            }
        }
        let d_in = self.d_matrix(degree - self.shift());
        let d_out = self.d_matrix(degree);
        let h = Arc::new(HomologyAt::new(&d_in, &d_out)?);
        let mut guard = self.homology.lock().unwrap();
        Ok(guard.entry(degree).or_insert_with(|| h).clone())
    }

    pub fn betti(&self, degree: i32) -> Result<usize> {
        Ok(self.homology_at(degree)?.dim())
    }

    pub fn format_cv(&self, x: &Cv) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in &x.v {
            let lbl = self.label(x.degree, *i);
            if parts.is_empty() {
                parts.push(format!("{} {}", crate::scalar::fmt_q(c), lbl));
            } else if c < &Scalar::zero() {
                parts.push(format!("- {} {}", crate::scalar::fmt_q(&-c.clone()), lbl));
            } else {
                parts.push(format!("+ {} {}", crate::scalar::fmt_q(c), lbl));
            }
        }
        parts.join(" ")
    }

    pub fn labelled_terms(&self, x: &Cv) -> Vec<(String, Scalar)> {
        x.v.iter()
            .map(|(i, c)| (self.label(x.degree, *i).to_string(), c.clone()))
            .collect()
    }

    /// Build a user-supplied table algebra and validate d² = 0, the Leibniz
    /// rule and the flavor's symmetry laws within the certified window.
    pub fn from_tables(
        operad: Operad,
        direction: Direction,
        unitary: bool,
        cutoff: i32,
        labels: Vec<Vec<String>>,
        d: Vec<QMatrix>,
        products: HashMap<(i32, i32), Vec<SparseVec>>,
    ) -> Result<TableAlgebra> {
        let dims: Vec<usize> = labels.iter().map(|l| l.len()).collect();
        if labels.len() != (cutoff + 1) as usize || d.len() != labels.len() {
            return Err(Error::Dimension(
                "table algebra needs one basis list and one differential block per degree ≤ cutoff"
                    .into(),
            ));
        }
        if unitary && dims[0] != 1 {
            return Err(Error::Flavor("unitary table needs exactly the unit in degree 0".into()));
        }
        if !unitary && dims[0] != 0 {
            return Err(Error::Connectivity("reduced table must be trivial in degree 0".into()));
        }
        let mut products = products;
        if unitary {
            // fill in the unit law so user tables only list reduced products
            for q in 0..=cutoff {
                let dq = dims[q as usize];
                products
                    .entry((0, q))
                    .or_insert_with(|| (0..dq).map(|j| vec![(j, qi(1))]).collect());
                products
                    .entry((q, 0))
                    .or_insert_with(|| (0..dq).map(|i| vec![(i, qi(1))]).collect());
            }
        }
        let ta = TableAlgebra {
            operad,
            direction,
            unitary,
            cutoff,
            dims,
            labels,
            d,
            prod: Mutex::new(
                products
                    .into_iter()
                    .map(|(k, v)| (k, Arc::new(v)))
                    .collect(),
            ),
            free_origin: None,
            homology: Mutex::new(HashMap::new()),
        };
        ta.validate()?;
        Ok(ta)
    }

    fn validate(&self) -> Result<()> {
        let shift = self.shift();
        for q in 0..=self.cutoff {
            let m = self.d_matrix(q);
            if m.cols != self.dim(q) || m.rows != self.dim(q + shift) {
                return Err(Error::Dimension(format!(
                    "differential block at degree {} has the wrong shape",
                    q
                )));
            }
            // d² = 0 where both blocks are inside the window
            if q + shift >= 0 && q + shift <= self.cutoff && q + 2 * shift >= 0 {
                let m2 = self.d_matrix(q + shift).compose(&m);
                if !m2.is_zero_matrix() {
                    return Err(Error::NotAComplex(format!("at table degree {}", q)));
                }
            }
        }
        // Leibniz + symmetry on basis pairs within the window
        for da in 0..=self.cutoff {
            for db in 0..=(self.cutoff - da) {
                for i in 0..self.dim(da) {
                    for j in 0..self.dim(db) {
                        let a = Cv {
                            degree: da,
                            v: vec![(i, qi(1))],
                        };
                        let b = Cv {
                            degree: db,
                            v: vec![(j, qi(1))],
                        };
                        let ab = self.mul_basis(da, i, db, j)?;
                        if da + db + shift <= self.cutoff && da + db + shift >= 0 {
                            let lhs = self.d_cv(&ab);
                            let mut rhs = Cv::zero(da + db + shift);
                            if da + shift >= 0 {
                                rhs = rhs.add(&self.mul_cv(&self.d_cv(&a), &b)?)?;
                            }
                            if db + shift >= 0 {
                                rhs = rhs
                                    .add(&self.mul_cv(&a, &self.d_cv(&b))?.scale(&sign_pow(da as i64)))?;
                            }
                            if lhs != rhs {
                                return Err(Error::NotAComplex(format!(
                                    "Leibniz fails on basis ({},{})x({},{})",
                                    da, i, db, j
                                )));
                            }
                        }
                        match self.operad {
                            Operad::Com => {
                                let ba = self.mul_basis(db, j, da, i)?;
                                if ab != ba.scale(&crate::scalar::koszul(da, db)) {
                                    return Err(Error::Flavor(format!(
                                        "commutativity fails on ({},{})x({},{})",
                                        da, i, db, j
                                    )));
                                }
                            }
                            Operad::Lie => {
                                let ba = self.mul_basis(db, j, da, i)?;
                                if !ab
                                    .add(&ba.scale(&crate::scalar::koszul(da, db)))?
                                    .is_zero()
                                {
                                    return Err(Error::Flavor(format!(
                                        "antisymmetry fails on ({},{})x({},{})",
                                        da, i, db, j
                                    )));
                                }
                            }
                            Operad::Assoc => {}
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for TableAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "TableAlgebra({:?} {:?}, cutoff {}, dims {:?})",
            self.operad, self.direction, self.cutoff, self.dims
        )
    }
}

/// Quasi-free (co)chain algebra (P(V), d) with a certified cutoff.
#[derive(Clone)]
pub struct QuasiFreeAlgebra {
    pub alg: FreeAlgebra,
    diff: Vec<AlgebraElement>,
    pub cutoff: i32,
    table: Arc<OnceLock<Arc<TableAlgebra>>>,
}

impl PartialEq for QuasiFreeAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.diff == other.diff && self.cutoff == other.cutoff
    }
}
impl Eq for QuasiFreeAlgebra {}

impl std::fmt::Debug for QuasiFreeAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "QuasiFreeAlgebra({}, {} gens, cutoff {})",
            self.alg.flavor,
            self.alg.space.len(),
            self.cutoff
        )
    }
}

impl QuasiFreeAlgebra {
    /// Build and validate. The differential is a generator assignment with
    /// shift −1 (chain) or +1 (cochain); omitted values mean zero.
    pub fn new(
        flavor: Flavor,
        space: GradedVectorSpace,
        diff: Vec<AlgebraElement>,
        cutoff: i32,
    ) -> Result<QuasiFreeAlgebra> {
        match (flavor.operad, flavor.direction) {
            (Operad::Com, Direction::Chain) => {
                return Err(Error::Flavor(
                    "commutative algebras are supported in the cochain direction only".into(),
                ))
            }
            (Operad::Lie, Direction::Cochain) => {
                return Err(Error::Flavor(
                    "Lie algebras are supported in the chain direction only".into(),
                ))
            }
            _ => {}
        }
        let min_allowed = match flavor.direction {
            Direction::Chain => 1,
            Direction::Cochain => 2,
        };
        if let Some(min) = space.min_degree() {
            if min < min_allowed {
                return Err(Error::Connectivity(format!(
                    "1-connected {} algebras need generators in degrees ≥ {}, found {}",
                    flavor, min_allowed, min
                )));
            }
        }
        if let Some(max) = space.max_degree() {
            if max > cutoff {
                return Err(Error::Cutoff {
                    degree: max,
                    cutoff,
                });
            }
        }
        if diff.len() != space.len() {
            return Err(Error::Dimension(format!(
                "differential assigns {} of {} generators",
                diff.len(),
                space.len()
            )));
        }
        let alg = FreeAlgebra::new(flavor, space)?;
        let shift = flavor.direction.shift();
        for (i, dv) in diff.iter().enumerate() {
            if dv.is_zero() {
                continue;
            }
            if dv.degree != alg.space.degree_of(i) + shift {
                return Err(Error::Degree(format!(
                    "d({}) has degree {}, expected {}",
                    alg.space.gen(i).name,
                    dv.degree,
                    alg.space.degree_of(i) + shift
                )));
            }
        }
        let a = QuasiFreeAlgebra {
            alg,
            diff,
            cutoff,
            table: Arc::new(OnceLock::new()),
        };
        // d² = 0, exactly, on every generator whose square lands inside the
        // certified window (cochain constructions may truncate differentials
        // of top-degree generators).
        for i in 0..a.alg.space.len() {
            let deg = a.alg.space.degree_of(i);
            let certifiable = match flavor.direction {
                Direction::Chain => true,
                Direction::Cochain => deg + 2 <= cutoff,
            };
            if !certifiable {
                continue;
            }
            let ddv = a.d_elem(&a.d_gen(i)?)?;
            if !ddv.is_zero() {
                return Err(Error::NotAComplex(format!(
                    "d²({}) ≠ 0",
                    a.alg.space.gen(i).name
                )));
            }
        }
        Ok(a)
    }

    pub fn shift(&self) -> i32 {
        self.alg.flavor.direction.shift()
    }

    pub fn d_gen(&self, i: usize) -> Result<AlgebraElement> {
        Ok(self.diff[i].clone())
    }

    pub fn diff_values(&self) -> &[AlgebraElement] {
        &self.diff
    }

    pub fn d_elem(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.alg.extend_as_derivation(&self.diff, self.shift(), x)
    }

    pub fn top_generator_degree(&self) -> Option<i32> {
        self.alg.space.max_degree()
    }

    /// Minimal iff every generator's differential is decomposable.
    pub fn is_minimal(&self) -> bool {
        self.diff.iter().all(|d| d.is_decomposable())
    }

    /// No two consecutive degrees both carry generators.
    pub fn is_sparsely_generated(&self) -> bool {
        self.alg.space.is_sparse()
    }

    /// Subalgebra on generators of degree ≤ n. Fails when the differential
    /// does not restrict.
    pub fn truncate(&self, n: i32) -> Result<QuasiFreeAlgebra> {
        let sub = self.alg.space.truncate(n);
        let kept = sub.len();
        let diffs: Vec<AlgebraElement> = self.diff[..kept].to_vec();
        for (i, dv) in diffs.iter().enumerate() {
            for (m, _) in dv.terms() {
                let Monomial::Word(w) = m else {
                    return Err(Error::Flavor("quasi-free differentials use words".into()));
                };
                if w.iter().any(|g| *g as usize >= kept) {
                    return Err(Error::NotClosed(format!(
                        "d({}) involves generators above degree {}",
                        self.alg.space.gen(i).name,
                        n
                    )));
                }
            }
        }
        QuasiFreeAlgebra::new(self.alg.flavor, sub, diffs, self.cutoff)
    }

    /// Subalgebra on the first `k` generators in canonical order. Valid
    /// whenever their differentials only involve those generators, which
    /// holds for chain algebras and minimal cochain algebras since every
    /// differential lives in strictly lower generator degrees.
    pub fn truncate_to_len(&self, k: usize) -> Result<QuasiFreeAlgebra> {
        let gens: Vec<(String, i32)> = self
            .alg
            .space
            .gens()
            .iter()
            .take(k)
            .map(|g| (g.name.clone(), g.degree))
            .collect();
        let sub = GradedVectorSpace::new(gens)?;
        let diffs: Vec<AlgebraElement> = self.diff[..k].to_vec();
        for (i, dv) in diffs.iter().enumerate() {
            for (m, _) in dv.terms() {
                if let Monomial::Word(w) = m {
                    if w.iter().any(|g| *g as usize >= k) {
                        return Err(Error::NotClosed(format!(
                            "d({}) involves generators outside the prefix",
                            self.alg.space.gen(i).name
                        )));
                    }
                }
            }
        }
        QuasiFreeAlgebra::new(self.alg.flavor, sub, diffs, self.cutoff)
    }

    /// True when `other` is the truncation of `self` to `other`'s top degree.
    pub fn extends(&self, other: &QuasiFreeAlgebra) -> bool {
        let n = other.top_generator_degree().unwrap_or(0);
        match self.truncate(n) {
            Ok(t) => &t == other,
            Err(_) => false,
        }
    }

    /// Tabulate bases, differential matrices and (lazily) products for all
    /// degrees ≤ cutoff.
    pub fn tabulate(&self) -> Result<Arc<TableAlgebra>> {
        if let Some(t) = self.table.get() {
            return Ok(t.clone());
        }
        let cutoff = self.cutoff;
        let mut dims = Vec::new();
        let mut labels = Vec::new();
        for q in 0..=cutoff {
            let basis = self.alg.basis_of_degree(q);
            dims.push(basis.len());
            labels.push(
                basis
                    .iter()
                    .map(|b| b.label.display(&self.alg.space))
                    .collect::<Vec<String>>(),
            );
        }
        let shift = self.shift();
        let mut d = Vec::new();
        for q in 0..=cutoff {
            let basis = self.alg.basis_of_degree(q);
            let rows = if q + shift < 0 || q + shift > cutoff {
                0
            } else {
                dims[(q + shift) as usize]
            };
            let mut cols: Vec<SparseVec> = Vec::with_capacity(basis.len());
            for b in &basis {
                let db = self.d_elem(&b.elem)?;
                if db.is_zero() || rows == 0 {
                    cols.push(Vec::new());
                } else {
                    cols.push(crate::exactlin::sparse_from_dense(&self.alg.express(&db)?));
                }
            }
            d.push(QMatrix::from_columns(rows, cols));
        }
        let ta = Arc::new(TableAlgebra {
            operad: self.alg.flavor.operad,
            direction: self.alg.flavor.direction,
            unitary: self.alg.flavor.is_unitary(),
            cutoff,
            dims,
            labels,
            d,
            prod: Mutex::new(HashMap::new()),
            free_origin: Some(self.alg.clone()),
            homology: Mutex::new(HashMap::new()),
        });
        let _ = self.table.set(ta.clone());
        Ok(ta)
    }

    /// Exact Betti numbers per degree in lo..=hi; requires hi ≤ cutoff − 1
    /// (one degree of slack for boundary ranks).
    pub fn homology_in_range(&self, lo: i32, hi: i32) -> Result<Vec<usize>> {
        if hi > self.cutoff - 1 {
            return Err(Error::Cutoff {
                degree: hi,
                cutoff: self.cutoff,
            });
        }
        let t = self.tabulate()?;
        (lo..=hi).map(|q| t.betti(q)).collect()
    }

    pub fn express_cv(&self, x: &AlgebraElement) -> Result<Cv> {
        Ok(Cv {
            degree: x.degree,
            v: crate::exactlin::sparse_from_dense(&self.alg.express(x)?),
        })
    }

    pub fn from_cv(&self, x: &Cv) -> Result<AlgebraElement> {
        self.alg.from_coords(x.degree, &x.v)
    }
}

/// Where a morphism lands: a quasi-free algebra or a plain table algebra.
#[derive(Clone, Debug)]
pub enum Target {
    Free(QuasiFreeAlgebra),
    Table(Arc<TableAlgebra>),
}

impl Target {
    pub fn table(&self) -> Result<Arc<TableAlgebra>> {
        match self {
            Target::Free(a) => a.tabulate(),
            Target::Table(t) => Ok(t.clone()),
        }
    }

    pub fn cutoff(&self) -> i32 {
        match self {
            Target::Free(a) => a.cutoff,
            Target::Table(t) => t.cutoff,
        }
    }

    pub fn same_as(&self, other: &Target) -> bool {
        match (self, other) {
            (Target::Free(a), Target::Free(b)) => a == b,
            (Target::Table(a), Target::Table(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// Generator-assignment morphism between (co)chain algebras; the chain-map
/// condition f∘d = d∘f is checked exactly on every generator at construction.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub source: QuasiFreeAlgebra,
    pub target: Target,
    images: Vec<Cv>,
}

impl Morphism {
    pub fn new(source: QuasiFreeAlgebra, target: Target, images: Vec<Cv>) -> Result<Morphism> {
        let ttab = target.table()?;
        if images.len() != source.alg.space.len() {
            return Err(Error::Dimension(format!(
                "morphism assigns {} of {} generators",
                images.len(),
                source.alg.space.len()
            )));
        }
        match &target {
            Target::Free(b) => {
                if b.alg.flavor.operad != source.alg.flavor.operad
                    || b.alg.flavor.direction != source.alg.flavor.direction
                {
                    return Err(Error::Flavor(format!(
                        "morphism from {} into {}",
                        source.alg.flavor, b.alg.flavor
                    )));
                }
                if b.cutoff != source.cutoff {
                    return Err(Error::Cutoff {
                        degree: source.cutoff,
                        cutoff: b.cutoff,
                    });
                }
            }
            Target::Table(t) => {
                if t.operad != source.alg.flavor.operad || t.direction != source.alg.flavor.direction
                {
                    return Err(Error::Flavor(
                        "morphism target table is of a different flavor".into(),
                    ));
                }
            }
        }
        for (i, img) in images.iter().enumerate() {
            let want = source.alg.space.degree_of(i);
            if !img.is_zero() && img.degree != want {
                return Err(Error::Degree(format!(
                    "image of {} has degree {}, expected {}",
                    source.alg.space.gen(i).name,
                    img.degree,
                    want
                )));
            }
            if img.v.iter().any(|(k, _)| *k >= ttab.dim(want)) {
                return Err(Error::Dimension(format!(
                    "image of {} uses coordinates outside the target basis",
                    source.alg.space.gen(i).name
                )));
            }
        }
        let f = Morphism {
            source,
            target,
            images,
        };
        // chain-map condition on generators; differentials of top-degree
        // generators may land beyond the certified window (truncated
        // cochain constructions) and are skipped there
        for i in 0..f.source.alg.space.len() {
            let deg = f.source.alg.space.degree_of(i);
            if deg + f.source.shift() > ttab.cutoff.min(f.source.cutoff) {
                continue;
            }
            let v = f.source.alg.generator(i);
            let lhs = f.apply_cv(&f.source.d_elem(&v)?)?;
            let rhs = ttab.d_cv(&f.images[i]);
            let rhs = Cv {
                degree: f.source.alg.space.degree_of(i) + f.source.shift(),
                ..rhs
            };
            if lhs.v != rhs.v {
                return Err(Error::Degree(format!(
                    "chain-map condition fails on generator {}: f(dv) = {} but d(f v) = {}",
                    f.source.alg.space.gen(i).name,
                    ttab.format_cv(&lhs),
                    ttab.format_cv(&rhs)
                )));
            }
        }
        Ok(f)
    }

    pub fn from_elements(
        source: QuasiFreeAlgebra,
        target: QuasiFreeAlgebra,
        images: Vec<AlgebraElement>,
    ) -> Result<Morphism> {
        let cvs = images
            .iter()
            .map(|x| target.express_cv(x))
            .collect::<Result<Vec<Cv>>>()?;
        Morphism::new(source, Target::Free(target), cvs)
    }

    pub fn identity(a: &QuasiFreeAlgebra) -> Result<Morphism> {
        let images = (0..a.alg.space.len())
            .map(|i| a.express_cv(&a.alg.generator(i)))
            .collect::<Result<Vec<Cv>>>()?;
        Morphism::new(a.clone(), Target::Free(a.clone()), images)
    }

    pub fn image_cv(&self, i: usize) -> &Cv {
        &self.images[i]
    }

    pub fn images(&self) -> &[Cv] {
        &self.images
    }

    /// Image of a generator as an element of a quasi-free target.
    pub fn image_elem(&self, i: usize) -> Result<AlgebraElement> {
        match &self.target {
            Target::Free(b) => b.from_cv(&self.images[i]),
            Target::Table(_) => Err(Error::Flavor(
                "table-algebra images have no word form".into(),
            )),
        }
    }

    fn eval_label_cv(&self, ttab: &TableAlgebra, label: &Label) -> Result<Cv> {
        match label {
            Label::Unit => ttab.unit_cv(),
            Label::Gen(i) => Ok(self.images[*i].clone()),
            Label::Word(w) => {
                let mut it = w.iter();
                let first = *it.next().expect("nonempty word");
                let mut acc = self.images[first].clone();
                for &i in it {
                    acc = ttab.mul_cv(&acc, &self.images[i])?;
                }
                Ok(acc)
            }
            Label::Bracket(l, r) => {
                let a = self.eval_label_cv(ttab, l)?;
                let b = self.eval_label_cv(ttab, r)?;
                ttab.mul_cv(&a, &b)
            }
        }
    }

    /// Apply to any source element, exactly.
    pub fn apply_cv(&self, x: &AlgebraElement) -> Result<Cv> {
        let ttab = self.target.table()?;
        if x.is_zero() {
            return Ok(Cv::zero(x.degree));
        }
        if x.degree > ttab.cutoff {
            return Err(Error::Cutoff {
                degree: x.degree,
                cutoff: ttab.cutoff,
            });
        }
        let data = self.source.alg.degree_data(x.degree);
        let coords = self.source.alg.express(x)?;
        let mut out = Cv::zero(x.degree);
        for (b, c) in data.basis.iter().zip(coords.iter()) {
            if is_zero(c) {
                continue;
            }
            let img = self.eval_label_cv(&ttab, &b.label)?;
            out = out.add(&img.scale(c))?;
        }
        Ok(out)
    }

    pub fn apply_elem(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        match &self.target {
            Target::Free(b) => b.from_cv(&self.apply_cv(x)?),
            Target::Table(_) => Err(Error::Flavor(
                "table-algebra images have no word form".into(),
            )),
        }
    }

    /// outer ∘ inner, by substitution. The inner target must be the outer
    /// source (a quasi-free algebra).
    pub fn compose(outer: &Morphism, inner: &Morphism) -> Result<Morphism> {
        let Target::Free(mid) = &inner.target else {
            return Err(Error::Flavor(
                "composition through a table algebra is not defined".into(),
            ));
        };
        if mid != &outer.source {
            return Err(Error::Precondition(
                "composition: middle algebras differ".into(),
            ));
        }
        let mut images = Vec::with_capacity(inner.images.len());
        for i in 0..inner.images.len() {
            let x = inner.image_elem(i)?;
            images.push(outer.apply_cv(&x)?);
        }
        Morphism::new(inner.source.clone(), outer.target.clone(), images)
    }

    /// Restriction to the truncation of the source at degree n.
    pub fn restrict(&self, n: i32) -> Result<Morphism> {
        let sub = self.source.truncate(n)?;
        let kept = sub.alg.space.len();
        Morphism::new(sub, self.target.clone(), self.images[..kept].to_vec())
    }

    /// Matrix of the induced linear map on the degree-q components.
    pub fn matrix_at(&self, q: i32) -> Result<QMatrix> {
        let ttab = self.target.table()?;
        let basis = self.source.alg.basis_of_degree(q);
        let mut cols = Vec::with_capacity(basis.len());
        for b in &basis {
            cols.push(self.apply_cv(&b.elem)?.v);
        }
        Ok(QMatrix::from_columns(ttab.dim(q), cols))
    }

    /// Chain-level equality (images of all generators agree).
    pub fn equal(&self, other: &Morphism) -> bool {
        self.source == other.source
            && self.target.same_as(&other.target)
            && self.images == other.images
    }

    /// Does the induced map on homology have full rank in every degree of
    /// lo..=hi?
    pub fn is_quasi_iso_in_range(&self, lo: i32, hi: i32) -> Result<bool> {
        let stab = self.source.tabulate()?;
        let ttab = self.target.table()?;
        if hi > stab.cutoff - 1 || hi > ttab.cutoff - 1 {
            return Err(Error::Cutoff {
                degree: hi,
                cutoff: stab.cutoff.min(ttab.cutoff),
            });
        }
        for q in lo..=hi {
            let hs = stab.homology_at(q)?;
            let ht = ttab.homology_at(q)?;
            if hs.dim() != ht.dim() {
                return Ok(false);
            }
            let mut cols: Vec<SparseVec> = Vec::new();
            for rep in &hs.reps {
                let x = self.source.alg.from_coords(q, &crate::exactlin::sparse_from_dense(rep))?;
                let img = self.apply_cv(&x)?;
                let Some(h) = ht.reduce(&img.v) else {
                    return Err(Error::BugClass(
                        "image of a cycle failed to reduce in homology".into(),
                    ));
                };
                cols.push(crate::exactlin::sparse_from_dense(&h));
            }
            let m = QMatrix::from_columns(ht.dim(), cols);
            if m.rank() != hs.dim() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Induced map on homology at one degree, as a matrix in the chosen
    /// representative bases.
    pub fn homology_action(&self, q: i32) -> Result<QMatrix> {
        let stab = self.source.tabulate()?;
        let ttab = self.target.table()?;
        let hs = stab.homology_at(q)?;
        let ht = ttab.homology_at(q)?;
        let mut cols: Vec<SparseVec> = Vec::new();
        for rep in &hs.reps {
            let x = self
                .source
                .alg
                .from_coords(q, &crate::exactlin::sparse_from_dense(rep))?;
            let img = self.apply_cv(&x)?;
            let h = ht.reduce(&img.v).ok_or_else(|| {
                Error::BugClass("image of a cycle failed to reduce in homology".into())
            })?;
            cols.push(crate::exactlin::sparse_from_dense(&h));
        }
        Ok(QMatrix::from_columns(ht.dim(), cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::scalar::q;

    #[test]
    fn cp2_model_is_minimal_and_sparse() {
        let a = models::cp_lie_model(2, 8).unwrap();
        assert!(a.is_minimal());
        assert!(a.is_sparsely_generated());
    }

    #[test]
    fn d_squared_rejected() {
        // d v = u with |v| = |u| + 1 and d u = w would break d²; simplest:
        // dv = u, du = something nonzero is impossible by degrees here, so
        // check the linear-part case instead: dv = u is fine, d² = 0; a true
        // violation needs dd(v) ≠ 0.
        let space = GradedVectorSpace::new(vec![
            ("a".into(), 1),
            ("b".into(), 2),
            ("c".into(), 3),
        ])
        .unwrap();
        let alg = FreeAlgebra::new(Flavor::lie_chain(), space.clone()).unwrap();
        let a = alg.generator_by_name("a").unwrap();
        let b = alg.generator_by_name("b").unwrap();
        // d c = b, d b = a: then d²c = a ≠ 0
        let diff = vec![AlgebraElement::zero(0), a.clone(), b.clone()];
        let r = QuasiFreeAlgebra::new(Flavor::lie_chain(), space, diff, 6);
        assert!(matches!(r, Err(Error::NotAComplex(_))));
    }

    #[test]
    fn truncation_of_cp_infinity_gives_cp2() {
        let big = models::cp_lie_model(4, 9).unwrap();
        let t3 = big.truncate(3).unwrap();
        let cp2 = models::cp_lie_model(2, 9).unwrap();
        assert_eq!(t3, cp2);
        // no generators in degree 4: truncating at 4 changes nothing
        assert_eq!(big.truncate(4).unwrap(), t3);
        // truncation is idempotent
        assert_eq!(t3.truncate(3).unwrap(), t3);
        // large n returns the algebra itself
        assert_eq!(big.truncate(9).unwrap(), big);
    }

    #[test]
    fn cochain_truncation_requires_closure() {
        // Λ(u, v) with dv = u³: truncating at 4 keeps u only; d u = 0 so fine.
        let a = models::cp2_sullivan(8).unwrap();
        let t = a.truncate(4).unwrap();
        assert_eq!(t.alg.space.len(), 1);
        // engineered non-closed case: dv = w (linear) with |w| = |v|+1 kept out
        let space =
            GradedVectorSpace::new(vec![("v".into(), 2), ("w".into(), 3)]).unwrap();
        let alg = FreeAlgebra::new(Flavor::sullivan(), space.clone()).unwrap();
        let w = alg.generator_by_name("w").unwrap();
        let a2 =
            QuasiFreeAlgebra::new(Flavor::sullivan(), space, vec![w, AlgebraElement::zero(0)], 8)
                .unwrap();
        assert!(!a2.is_minimal());
        assert!(matches!(a2.truncate(2), Err(Error::NotClosed(_))));
    }

    #[test]
    fn cp2_betti_numbers() {
        // H of the CP² chain Lie model: classes of x1 (degree 1) and of the
        // Whitehead bracket [x1,x2] (degree 4); zero elsewhere through 6.
        let a = models::cp_lie_model(2, 8).unwrap();
        let h = a.homology_in_range(1, 6).unwrap();
        assert_eq!(h, vec![1, 0, 0, 1, 0, 0]);
    }

    #[test]
    fn free_lie_on_one_odd_generator_homology() {
        let a = models::sphere_lie(1, 6).unwrap();
        let h = a.homology_in_range(1, 3).unwrap();
        assert_eq!(h, vec![1, 1, 0]);
    }

    #[test]
    fn homology_range_needs_slack() {
        let a = models::cp_lie_model(2, 6).unwrap();
        assert!(matches!(
            a.homology_in_range(1, 6),
            Err(Error::Cutoff { .. })
        ));
    }

    #[test]
    fn lambda_map_composition_and_quasi_iso() {
        let a = models::cp_lie_model(2, 8).unwrap();
        let f = models::lambda_endo(&a, &q(2, 1)).unwrap();
        let g = models::lambda_endo(&a, &q(3, 1)).unwrap();
        let fg = Morphism::compose(&f, &g).unwrap();
        let both = models::lambda_endo(&a, &q(6, 1)).unwrap();
        assert!(fg.equal(&both));
        let id = Morphism::identity(&a).unwrap();
        let fid = Morphism::compose(&f, &id).unwrap();
        assert!(fid.equal(&f));
        assert!(f.is_quasi_iso_in_range(1, 6).unwrap());
        let zero = models::lambda_endo(&a, &q(0, 1)).unwrap();
        assert!(!zero.is_quasi_iso_in_range(1, 1).unwrap(), "λ=0 kills H¹");
    }

    #[test]
    fn chain_condition_rejects_bad_assignment() {
        let a = models::cp_lie_model(2, 8).unwrap();
        let x1 = a.alg.generator_by_name("x1").unwrap();
        let x2 = a.alg.generator_by_name("x2").unwrap();
        // x1 ↦ 2x1 but x2 ↦ 3x2 violates f(dx2) = d f(x2)
        let r = Morphism::from_elements(
            a.clone(),
            a.clone(),
            vec![x1.scale(&qi(2)), x2.scale(&qi(3))],
        );
        assert!(r.is_err());
    }

    #[test]
    fn morphism_restriction() {
        let big = models::cp_lie_model(3, 9).unwrap();
        let f = models::lambda_endo(&big, &q(2, 1)).unwrap();
        let r = f.restrict(3).unwrap();
        assert_eq!(r.source.alg.space.len(), 2);
        let x2 = big.alg.generator_by_name("x2").unwrap();
        assert_eq!(
            r.apply_cv(&x2).unwrap(),
            f.apply_cv(&x2).unwrap()
        );
    }

    #[test]
    fn tabulated_product_matches_free_product() {
        let a = models::cp_lie_model(2, 6).unwrap();
        let t = a.tabulate().unwrap();
        // [x1, x2] in coordinates
        let x1 = a.express_cv(&a.alg.generator_by_name("x1").unwrap()).unwrap();
        let x2 = a.express_cv(&a.alg.generator_by_name("x2").unwrap()).unwrap();
        let br = t.mul_cv(&x1, &x2).unwrap();
        let direct = a
            .express_cv(
                &a.alg
                    .multiply(
                        &a.alg.generator_by_name("x1").unwrap(),
                        &a.alg.generator_by_name("x2").unwrap(),
                    )
                    .unwrap(),
            )
            .unwrap();
        assert_eq!(br, direct);
        // restricted product dies past the level
        let r = t.mul_cv_restricted(&x1, &x2, 3).unwrap();
        assert!(r.is_zero());
    }
}
