//! Normal forms, degreewise bases, products and brackets for free graded
//! algebras over the commutative, Lie and associative operads.
//!
//! A free graded Lie algebra is realized inside the tensor algebra through
//! the embedding [a,b] = a⊗b − (−1)^{|a||b|} b⊗a, and its degreewise bases
//! are obtained by spanning iterated brackets and reducing by rank. Classical
//! Hall/Lyndon bases are not used: with odd generators [x,x] ≠ 0 and the
//! embedding plus exact rank reduction is simpler to trust.
//!
//! Sign convention fixed here and shared by every other module: exchanging
//! homogeneous letters a, b costs (−1)^{|a||b|}, and a degree-s derivation
//! passing a letter a costs (−1)^{s|a|}.

use crate::error::{Error, Result};
use crate::exactlin::{Echelon, GradedVectorSpace, QMatrix, SparseVec};
use crate::scalar::{is_zero, koszul, qi, sign_pow, Scalar};
use num::Zero;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operad {
    Com,
    Lie,
    Assoc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Chain,
    Cochain,
}

impl Direction {
    /// Degree of the differential: −1 on chains, +1 on cochains.
    pub fn shift(self) -> i32 {
        match self {
            Direction::Chain => -1,
            Direction::Cochain => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unitality {
    Unitary,
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Flavor {
    pub operad: Operad,
    pub direction: Direction,
    pub unitality: Unitality,
}

impl Flavor {
    pub fn new(operad: Operad, direction: Direction, unitality: Unitality) -> Result<Flavor> {
        if operad == Operad::Lie && unitality == Unitality::Unitary {
            return Err(Error::Flavor("a Lie algebra is always reduced".into()));
        }
        Ok(Flavor {
            operad,
            direction,
            unitality,
        })
    }

    pub fn lie_chain() -> Flavor {
        Flavor {
            operad: Operad::Lie,
            direction: Direction::Chain,
            unitality: Unitality::Reduced,
        }
    }

    pub fn sullivan() -> Flavor {
        Flavor {
            operad: Operad::Com,
            direction: Direction::Cochain,
            unitality: Unitality::Unitary,
        }
    }

    pub fn is_unitary(&self) -> bool {
        self.unitality == Unitality::Unitary
    }
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let op = match self.operad {
            Operad::Com => "com",
            Operad::Lie => "lie",
            Operad::Assoc => "assoc",
        };
        let dir = match self.direction {
            Direction::Chain => "chain",
            Direction::Cochain => "cochain",
        };
        let un = match self.unitality {
            Unitality::Unitary => "unitary",
            Unitality::Reduced => "reduced",
        };
        write!(f, "{} {} {}", op, dir, un)
    }
}

/// A normal-form monomial. `Word` entries are indices into the generator
/// space: sorted (with multiplicity rules) for Com, arbitrary tensor words
/// for Assoc and for Lie elements embedded in the tensor algebra. The empty
/// word is the unit of a unitary algebra. `Basis` refers to one basis vector
/// of a finitely presented (table) algebra.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Monomial {
    Word(Vec<u32>),
    Basis { degree: i32, index: u32 },
}

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial::Word(Vec::new())
    }

    pub fn gen(i: usize) -> Monomial {
        Monomial::Word(vec![i as u32])
    }

    pub fn word_len(&self) -> usize {
        match self {
            Monomial::Word(w) => w.len(),
            Monomial::Basis { .. } => 1,
        }
    }
}

/// Exact-rational linear combination of monomials, homogeneous of one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub degree: i32,
    terms: BTreeMap<Monomial, Scalar>,
}

impl AlgebraElement {
    pub fn zero(degree: i32) -> Self {
        AlgebraElement {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(m: Monomial, c: Scalar, degree: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !is_zero(&c) {
            terms.insert(m, c);
        }
        AlgebraElement { degree, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if is_zero(&c) {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Scalar::zero);
        *e += c;
        // drop cancelled entries eagerly to keep the normal form canonical
        self.terms.retain(|_, v| !is_zero(v));
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if !self.is_zero() && !other.is_zero() && self.degree != other.degree {
            return Err(Error::Degree(format!(
                "adding degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.scale(&qi(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> AlgebraElement {
        if is_zero(s) {
            return AlgebraElement::zero(self.degree);
        }
        AlgebraElement {
            degree: self.degree,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// Minimal word length over the stored monomials; None when zero.
    pub fn min_word_len(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.word_len()).min()
    }

    /// True when every monomial has word length ≥ 2 (no linear or constant
    /// part) — the shape a minimal differential must take.
    pub fn is_decomposable(&self) -> bool {
        self.terms.keys().all(|m| m.word_len() >= 2)
    }
}

/// How a basis element of a free algebra is built from generators; used to
/// evaluate morphisms and to print Lie elements as bracket expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    Unit,
    Gen(usize),
    /// Product of generators, in normal-form order (Com/Assoc).
    Word(Vec<usize>),
    Bracket(Box<Label>, Box<Label>),
}

impl Label {
    pub fn display(&self, space: &GradedVectorSpace) -> String {
        match self {
            Label::Unit => "1".to_string(),
            Label::Gen(i) => space.gen(*i).name.clone(),
            Label::Word(w) => w
                .iter()
                .map(|i| space.gen(*i).name.clone())
                .collect::<Vec<_>>()
                .join("*"),
            Label::Bracket(l, r) => {
                format!("[{},{}]", l.display(space), r.display(space))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BasisElem {
    pub label: Label,
    pub elem: AlgebraElement,
}

/// Per-degree data: the word basis of the ambient free graded algebra, the
/// chosen basis of the algebra itself (equal to the word basis except for
/// Lie, where it is a rank-reduced set of bracket expressions), and an
/// echelon form for expressing elements in that basis.
pub struct DegreeData {
    pub words: Vec<Monomial>,
    pub windex: HashMap<Monomial, usize>,
    pub basis: Vec<BasisElem>,
    expr: Option<Echelon>,
}

impl DegreeData {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Free graded algebra of one flavor on a graded generator space.
#[derive(Clone)]
pub struct FreeAlgebra {
    pub flavor: Flavor,
    pub space: GradedVectorSpace,
    cache: Arc<Mutex<HashMap<i32, Arc<DegreeData>>>>,
}

impl PartialEq for FreeAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.flavor == other.flavor && self.space == other.space
    }
}
impl Eq for FreeAlgebra {}

impl std::fmt::Debug for FreeAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FreeAlgebra({}, {} gens)", self.flavor, self.space.len())
    }
}

impl FreeAlgebra {
    pub fn new(flavor: Flavor, space: GradedVectorSpace) -> Result<FreeAlgebra> {
        if let Some(min) = space.min_degree() {
            if min < 1 {
                return Err(Error::Connectivity(format!(
                    "generators must sit in positive degrees, found degree {}",
                    min
                )));
            }
        }
        Ok(FreeAlgebra {
            flavor,
            space,
            cache: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    pub fn generator(&self, i: usize) -> AlgebraElement {
        AlgebraElement::single(Monomial::gen(i), qi(1), self.space.degree_of(i))
    }

    pub fn generator_by_name(&self, name: &str) -> Option<AlgebraElement> {
        self.space.index_of(name).map(|i| self.generator(i))
    }

    pub fn one(&self) -> Result<AlgebraElement> {
        if !self.flavor.is_unitary() {
            return Err(Error::Flavor("reduced algebra has no unit".into()));
        }
        Ok(AlgebraElement::single(Monomial::unit(), qi(1), 0))
    }

    pub fn word_degree(&self, w: &[u32]) -> i32 {
        w.iter().map(|i| self.space.degree_of(*i as usize)).sum()
    }

    #[allow(dead_code)]
    fn monomial_degree(&self, m: &Monomial) -> i32 {
        match m {
            Monomial::Word(w) => self.word_degree(w),
            Monomial::Basis { degree, .. } => *degree,
        }
    }

    /// Koszul normal form of a commutative word: sort by generator index,
    /// tracking the sign; an odd generator squared kills the word.
    fn com_normalize(&self, word: &[u32]) -> Option<(Vec<u32>, Scalar)> {
        let mut w = word.to_vec();
        let mut sign = qi(1);
        for i in 1..w.len() {
            let mut j = i;
            while j > 0 && w[j - 1] > w[j] {
                let da = self.space.degree_of(w[j - 1] as usize);
                let db = self.space.degree_of(w[j] as usize);
                sign *= koszul(da, db);
                w.swap(j - 1, j);
                j -= 1;
            }
        }
        for p in w.windows(2) {
            if p[0] == p[1] && self.space.degree_of(p[0] as usize) % 2 != 0 {
                return None;
            }
        }
        Some((w, sign))
    }

    /// Raw graded product of the underlying free graded algebra: commutative
    /// normal-form product for Com, concatenation for Assoc and for the
    /// tensor algebra carrying a Lie flavor. Not the bracket.
    pub fn raw_mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        let degree = a.degree + b.degree;
        let mut out = AlgebraElement::zero(degree);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let (Monomial::Word(wa), Monomial::Word(wb)) = (ma, mb) else {
                    return Err(Error::Flavor(
                        "products of table basis elements need the table".into(),
                    ));
                };
                if (wa.is_empty() || wb.is_empty()) && !self.flavor.is_unitary() {
                    return Err(Error::Flavor("empty word in a reduced algebra".into()));
                }
                let mut cat: Vec<u32> = wa.clone();
                cat.extend_from_slice(wb);
                match self.flavor.operad {
                    Operad::Com => {
                        if let Some((w, s)) = self.com_normalize(&cat) {
                            out.add_term(Monomial::Word(w), ca * cb * s);
                        }
                    }
                    Operad::Assoc | Operad::Lie => {
                        out.add_term(Monomial::Word(cat), ca * cb);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Flavor product: graded-commutative product, tensor concatenation, or
    /// the Lie bracket [a,b] = a⊗b − (−1)^{|a||b|} b⊗a.
    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        match self.flavor.operad {
            Operad::Com | Operad::Assoc => self.raw_mul(a, b),
            Operad::Lie => {
                let ab = self.raw_mul(a, b)?;
                let ba = self.raw_mul(b, a)?;
                ab.sub(&ba.scale(&koszul(a.degree, b.degree)))
            }
        }
    }

    /// All normal-form words of one degree, in canonical order.
    fn enumerate_words(&self, degree: i32) -> Vec<Monomial> {
        let mut out = Vec::new();
        if degree == 0 {
            if self.flavor.is_unitary() {
                out.push(Monomial::unit());
            }
            return out;
        }
        if degree < 0 {
            return out;
        }
        let n = self.space.len();
        match self.flavor.operad {
            Operad::Com => {
                // nondecreasing index words, odd generators at most once
                fn rec(
                    alg: &FreeAlgebra,
                    start: usize,
                    remaining: i32,
                    acc: &mut Vec<u32>,
                    out: &mut Vec<Monomial>,
                ) {
                    if remaining == 0 {
                        if !acc.is_empty() {
                            out.push(Monomial::Word(acc.clone()));
                        }
                        return;
                    }
                    for i in start..alg.space.len() {
                        let d = alg.space.degree_of(i);
                        if d > remaining {
                            continue;
                        }
                        if d % 2 != 0 && acc.last() == Some(&(i as u32)) {
                            continue;
                        }
                        acc.push(i as u32);
                        rec(alg, i, remaining - d, acc, out);
                        acc.pop();
                    }
                }
                let mut acc = Vec::new();
                rec(self, 0, degree, &mut acc, &mut out);
            }
            Operad::Assoc | Operad::Lie => {
                fn rec(
                    alg: &FreeAlgebra,
                    remaining: i32,
                    acc: &mut Vec<u32>,
                    out: &mut Vec<Monomial>,
                ) {
                    if remaining == 0 {
                        if !acc.is_empty() {
                            out.push(Monomial::Word(acc.clone()));
                        }
                        return;
                    }
                    for i in 0..alg.space.len() {
                        let d = alg.space.degree_of(i);
                        if d > remaining {
                            continue;
                        }
                        acc.push(i as u32);
                        rec(alg, remaining - d, acc, out);
                        acc.pop();
                    }
                }
                let mut acc = Vec::new();
                rec(self, degree, &mut acc, &mut out);
                let _ = n;
            }
        }
        out.sort();
        out
    }

    fn word_coords(&self, x: &AlgebraElement, windex: &HashMap<Monomial, usize>) -> Result<SparseVec> {
        let mut v: SparseVec = Vec::new();
        for (m, c) in &x.terms {
            let Some(&i) = windex.get(m) else {
                return Err(Error::Degree(format!(
                    "monomial of unexpected degree while coordinatizing degree {}",
                    x.degree
                )));
            };
            v.push((i, c.clone()));
        }
        v.sort_by_key(|(i, _)| *i);
        Ok(v)
    }

    fn build_degree(&self, degree: i32) -> Arc<DegreeData> {
        let words = self.enumerate_words(degree);
        let windex: HashMap<Monomial, usize> = words
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        match self.flavor.operad {
            Operad::Com | Operad::Assoc => {
                let basis = words
                    .iter()
                    .map(|m| {
                        let Monomial::Word(w) = m else { unreachable!() };
                        let label = if w.is_empty() {
                            Label::Unit
                        } else if w.len() == 1 {
                            Label::Gen(w[0] as usize)
                        } else {
                            Label::Word(w.iter().map(|i| *i as usize).collect())
                        };
                        BasisElem {
                            label,
                            elem: AlgebraElement::single(m.clone(), qi(1), degree),
                        }
                    })
                    .collect();
                Arc::new(DegreeData {
                    words,
                    windex,
                    basis,
                    expr: None,
                })
            }
            Operad::Lie => {
                let basis = self.lie_basis(degree, &windex);
                let cols: Vec<SparseVec> = basis
                    .iter()
                    .map(|b| self.word_coords(&b.elem, &windex).expect("basis coords"))
                    .collect();
                let expr = Echelon::new(&QMatrix::from_columns(words.len(), cols));
                Arc::new(DegreeData {
                    words,
                    windex,
                    basis,
                    expr: Some(expr),
                })
            }
        }
    }

    /// Candidates for the Lie basis in one degree: generators of that degree,
    /// then brackets [u, w] of basis elements of lower degrees, rank-reduced
    /// in order.
    fn lie_basis(&self, degree: i32, windex: &HashMap<Monomial, usize>) -> Vec<BasisElem> {
        let mut out: Vec<BasisElem> = Vec::new();
        if degree < 1 {
            return out;
        }
        let nwords = windex.len();
        if nwords == 0 {
            return out;
        }
        let mut span = crate::exactlin::IncrementalSpan::new(nwords);
        let mut try_add = |cand: BasisElem, this: &FreeAlgebra| {
            if cand.elem.is_zero() {
                return;
            }
            let coords = this.word_coords(&cand.elem, windex).expect("lie coords");
            if span.try_add(&coords) {
                out.push(cand);
            }
        };
        for i in self.space.indices_in(degree) {
            try_add(
                BasisElem {
                    label: Label::Gen(i),
                    elem: self.generator(i),
                },
                self,
            );
        }
        for p in 1..=(degree / 2) {
            let q = degree - p;
            let lower_p = self.degree_data(p);
            let lower_q = self.degree_data(q);
            for (iu, u) in lower_p.basis.iter().enumerate() {
                for (iw, w) in lower_q.basis.iter().enumerate() {
                    if p == q && iu > iw {
                        continue;
                    }
                    let elem = self.multiply(&u.elem, &w.elem).expect("bracket");
                    try_add(
                        BasisElem {
                            label: Label::Bracket(
                                Box::new(u.label.clone()),
                                Box::new(w.label.clone()),
                            ),
                            elem,
                        },
                        self,
                    );
                }
            }
        }
        out
    }

    pub fn degree_data(&self, degree: i32) -> Arc<DegreeData> {
        {
            let cache = self.cache.lock().unwrap();
            if let Some(d) = cache.get(&degree) {
                return d.clone();
            }
        }
        let built = self.build_degree(degree);
        let mut cache = self.cache.lock().unwrap();
        cache.entry(degree).or_insert_with(|| built).clone()
    }

    /// Linearly independent spanning set of the degree-d component, in a
    /// deterministic order.
    pub fn basis_of_degree(&self, degree: i32) -> Vec<BasisElem> {
        if degree < 0 {
            return Vec::new();
        }
        self.degree_data(degree).basis.clone()
    }

    pub fn dim_of_degree(&self, degree: i32) -> usize {
        if degree < 0 {
            0
        } else {
            self.degree_data(degree).dim()
        }
    }

    /// Coordinates of x in the basis of its degree. Errors when x is not in
    /// the algebra (e.g. a tensor element outside the Lie subspace).
    pub fn express(&self, x: &AlgebraElement) -> Result<Vec<Scalar>> {
        let data = self.degree_data(x.degree);
        let coords = self.word_coords(x, &data.windex)?;
        match &data.expr {
            None => {
                let mut out = vec![Scalar::zero(); data.basis.len()];
                for (i, c) in coords {
                    out[i] = c;
                }
                Ok(out)
            }
            Some(e) => e.solve(&coords).ok_or_else(|| {
                Error::Flavor(format!(
                    "element of degree {} is not in the Lie subspace",
                    x.degree
                ))
            }),
        }
    }

    /// Rebuild an element from coordinates in the degreewise basis.
    pub fn from_coords(&self, degree: i32, coords: &SparseVec) -> Result<AlgebraElement> {
        let data = self.degree_data(degree);
        let mut out = AlgebraElement::zero(degree);
        for (i, c) in coords {
            let Some(b) = data.basis.get(*i) else {
                return Err(Error::Dimension(format!(
                    "coordinate {} out of range in degree {} (dim {})",
                    i,
                    degree,
                    data.basis.len()
                )));
            };
            out = out.add(&b.elem.scale(c))?;
        }
        Ok(out)
    }

    /// Evaluate a basis label on generator images inside a target algebra.
    pub fn eval_label(
        target: &FreeAlgebra,
        images: &[AlgebraElement],
        label: &Label,
    ) -> Result<AlgebraElement> {
        match label {
            Label::Unit => target.one(),
            Label::Gen(i) => Ok(images[*i].clone()),
            Label::Word(w) => {
                let mut it = w.iter();
                let first = *it.next().expect("nonempty word");
                let mut acc = images[first].clone();
                for &i in it {
                    acc = target.multiply(&acc, &images[i])?;
                }
                Ok(acc)
            }
            Label::Bracket(l, r) => {
                let a = Self::eval_label(target, images, l)?;
                let b = Self::eval_label(target, images, r)?;
                target.multiply(&a, &b)
            }
        }
    }

    /// The unique flavor-respecting algebra-map image of x under a
    /// degree-preserving generator assignment into `target`.
    pub fn extend_as_morphism(
        &self,
        target: &FreeAlgebra,
        images: &[AlgebraElement],
        x: &AlgebraElement,
    ) -> Result<AlgebraElement> {
        if images.len() != self.space.len() {
            return Err(Error::Dimension(format!(
                "assignment covers {} of {} generators",
                images.len(),
                self.space.len()
            )));
        }
        for (i, img) in images.iter().enumerate() {
            if !img.is_zero() && img.degree != self.space.degree_of(i) {
                return Err(Error::Degree(format!(
                    "image of {} has degree {}, expected {}",
                    self.space.gen(i).name,
                    img.degree,
                    self.space.degree_of(i)
                )));
            }
        }
        if self.flavor.operad != target.flavor.operad {
            return Err(Error::Flavor(
                "morphisms must stay within one operad".into(),
            ));
        }
        if x.is_zero() {
            return Ok(AlgebraElement::zero(x.degree));
        }
        // Evaluate by decomposing x in the degreewise basis and mapping each
        // basis label; correct for all flavors, including tensor-embedded Lie.
        let data = self.degree_data(x.degree);
        let coords = self.express(x)?;
        let mut out = AlgebraElement::zero(x.degree);
        for (b, c) in data.basis.iter().zip(coords.iter()) {
            if is_zero(c) {
                continue;
            }
            let img = Self::eval_label(target, images, &b.label)?;
            out = out.add(&img.scale(c))?;
        }
        Ok(out)
    }

    /// The unique degree-s derivation extending a generator assignment,
    /// applied to x. Values live in this same algebra.
    pub fn extend_as_derivation(
        &self,
        values: &[AlgebraElement],
        shift: i32,
        x: &AlgebraElement,
    ) -> Result<AlgebraElement> {
        if values.len() != self.space.len() {
            return Err(Error::Dimension(format!(
                "derivation assigns {} of {} generators",
                values.len(),
                self.space.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_zero() && v.degree != self.space.degree_of(i) + shift {
                return Err(Error::Shift(format!(
                    "value on {} has degree {}, expected shift {}",
                    self.space.gen(i).name,
                    v.degree,
                    shift
                )));
            }
        }
        let mut out = AlgebraElement::zero(x.degree + shift);
        for (m, c) in &x.terms {
            let Monomial::Word(w) = m else {
                return Err(Error::Flavor("derivation needs word monomials".into()));
            };
            let mut prefix_deg = 0i32;
            for (pos, &gi) in w.iter().enumerate() {
                let value = &values[gi as usize];
                if !value.is_zero() {
                    let sign = sign_pow((shift as i64) * (prefix_deg as i64));
                    let mut piece = value.scale(&(c * sign));
                    if pos > 0 {
                        let pre = AlgebraElement::single(
                            Monomial::Word(w[..pos].to_vec()),
                            qi(1),
                            prefix_deg,
                        );
                        piece = self.raw_mul(&pre, &piece)?;
                    }
                    if pos + 1 < w.len() {
                        let sdeg = self.word_degree(&w[pos + 1..]);
                        let suf = AlgebraElement::single(
                            Monomial::Word(w[pos + 1..].to_vec()),
                            qi(1),
                            sdeg,
                        );
                        piece = self.raw_mul(&piece, &suf)?;
                    }
                    out = out.add(&piece)?;
                }
                prefix_deg += self.space.degree_of(gi as usize);
            }
        }
        Ok(out)
    }

    /// Printable canonical form: coordinates in the degreewise basis with
    /// bracket/word labels. Parseable by the algebra-file grammar.
    pub fn format_element(&self, x: &AlgebraElement) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let data = self.degree_data(x.degree);
        let coords = match self.express(x) {
            Ok(c) => c,
            Err(_) => return "<unrepresentable>".to_string(),
        };
        let mut parts: Vec<String> = Vec::new();
        for (b, c) in data.basis.iter().zip(coords.iter()) {
            if is_zero(c) {
                continue;
            }
            let lbl = b.label.display(&self.space);
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
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn space(gens: &[(&str, i32)]) -> GradedVectorSpace {
        GradedVectorSpace::new(gens.iter().map(|(n, d)| (n.to_string(), *d)).collect()).unwrap()
    }

    fn com_alg(gens: &[(&str, i32)]) -> FreeAlgebra {
        FreeAlgebra::new(Flavor::sullivan(), space(gens)).unwrap()
    }

    fn lie_alg(gens: &[(&str, i32)]) -> FreeAlgebra {
        FreeAlgebra::new(Flavor::lie_chain(), space(gens)).unwrap()
    }

    #[test]
    fn com_squares() {
        let a = com_alg(&[("u", 2), ("v", 5)]);
        let u = a.generator_by_name("u").unwrap();
        let v = a.generator_by_name("v").unwrap();
        let uu = a.multiply(&u, &u).unwrap();
        assert!(!uu.is_zero());
        let vv = a.multiply(&v, &v).unwrap();
        assert!(vv.is_zero(), "odd square must vanish");
        // commutativity sign: u v = v u for |u| even
        let uv = a.multiply(&u, &v).unwrap();
        let vu = a.multiply(&v, &u).unwrap();
        assert_eq!(uv, vu);
    }

    #[test]
    fn com_odd_odd_anticommute() {
        let a = com_alg(&[("p", 3), ("s", 5)]);
        let p = a.generator_by_name("p").unwrap();
        let s = a.generator_by_name("s").unwrap();
        let ps = a.multiply(&p, &s).unwrap();
        let sp = a.multiply(&s, &p).unwrap();
        assert_eq!(ps, sp.scale(&qi(-1)));
    }

    #[test]
    fn lie_self_bracket_of_odd_generator() {
        let a = lie_alg(&[("x1", 1)]);
        let x = a.generator_by_name("x1").unwrap();
        let xx = a.multiply(&x, &x).unwrap();
        // [x,x] = 2 x⊗x
        let mut expected = AlgebraElement::zero(2);
        expected.add_term(Monomial::Word(vec![0, 0]), qi(2));
        assert_eq!(xx, expected);
        // [x,[x,x]] = 0 by the graded Jacobi identity
        let triple = a.multiply(&x, &xx).unwrap();
        assert!(triple.is_zero());
    }

    #[test]
    fn lie_dims_single_odd_generator() {
        let a = lie_alg(&[("x1", 1)]);
        assert_eq!(a.dim_of_degree(1), 1);
        assert_eq!(a.dim_of_degree(2), 1);
        assert_eq!(a.dim_of_degree(3), 0);
    }

    #[test]
    fn lie_dims_cp2_generators() {
        let a = lie_alg(&[("x1", 1), ("x2", 3)]);
        assert_eq!(a.dim_of_degree(3), 1, "degree 3 is spanned by x2");
        assert_eq!(a.dim_of_degree(4), 1, "degree 4 is spanned by [x1,x2]");
    }

    /// Independent dimension oracle: the graded Poincaré–Birkhoff–Witt
    /// factorization of the tensor-algebra series. Solves for free Lie
    /// dimensions degree by degree using only power-series arithmetic.
    fn free_lie_dims_series(gen_degrees: &[i32], up_to: usize) -> Vec<usize> {
        // T(t) = 1/(1 − Σ t^{d_i}) truncated
        let n = up_to + 1;
        let mut g = vec![0i64; n];
        for &d in gen_degrees {
            if (d as usize) < n {
                g[d as usize] += 1;
            }
        }
        let mut t = vec![0i64; n];
        t[0] = 1;
        for k in 1..n {
            let mut acc = 0i64;
            for j in 1..=k {
                acc += g[j] * t[k - j];
            }
            t[k] = acc;
        }
        // peel off factors (1+t^d)^{a_d} (odd d) and (1−t^d)^{−b_d} (even d)
        let mut s = t;
        let mut dims = vec![0usize; n];
        for d in 1..n {
            let c = s[d];
            assert!(c >= 0);
            dims[d] = c as usize;
            if c == 0 {
                continue;
            }
            if d % 2 == 1 {
                // divide by (1+t^d)^c
                for _ in 0..c {
                    let mut out = vec![0i64; n];
                    for k in 0..n {
                        let prev = if k >= d { out[k - d] } else { 0 };
                        out[k] = s[k] - prev;
                    }
                    s = out;
                }
            } else {
                // multiply by (1−t^d)^c
                for _ in 0..c {
                    let mut out = vec![0i64; n];
                    for k in 0..n {
                        let prev = if k >= d { s[k - d] } else { 0 };
                        out[k] = s[k] - prev;
                    }
                    s = out;
                }
            }
        }
        dims
    }

    #[test]
    fn lie_dims_match_series_oracle() {
        for gens in [vec![1], vec![1, 3], vec![1, 3, 5], vec![2], vec![2, 2], vec![1, 1]] {
            let named: Vec<(String, i32)> = gens
                .iter()
                .enumerate()
                .map(|(i, d)| (format!("g{}", i), *d))
                .collect();
            let a = FreeAlgebra::new(
                Flavor::lie_chain(),
                GradedVectorSpace::new(named).unwrap(),
            )
            .unwrap();
            let oracle = free_lie_dims_series(&gens, 8);
            for d in 1..=8 {
                assert_eq!(
                    a.dim_of_degree(d as i32),
                    oracle[d],
                    "free Lie on {:?} at degree {}",
                    gens,
                    d
                );
            }
        }
    }

    #[test]
    fn lie_antisymmetry_and_jacobi_random() {
        let a = lie_alg(&[("x1", 1), ("x2", 3), ("y", 2)]);
        // pseudo-random homogeneous elements from the degreewise bases
        let mut state: u64 = 42;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let pick = |deg: i32, next: &mut dyn FnMut() -> u64| {
            let basis = a.basis_of_degree(deg);
            let mut x = AlgebraElement::zero(deg);
            for b in &basis {
                let c = (next() % 5) as i64 - 2;
                if c != 0 {
                    x = x.add(&b.elem.scale(&qi(c))).unwrap();
                }
            }
            x
        };
        for _ in 0..10 {
            let da = 1 + (next() % 3) as i32;
            let db = 1 + (next() % 3) as i32;
            let dc = 1 + (next() % 2) as i32;
            let x = pick(da, &mut next);
            let y = pick(db, &mut next);
            let z = pick(dc, &mut next);
            // antisymmetry
            let xy = a.multiply(&x, &y).unwrap();
            let yx = a.multiply(&y, &x).unwrap();
            assert!(xy.add(&yx.scale(&koszul(da, db))).unwrap().is_zero());
            // graded Jacobi: [x,[y,z]] = [[x,y],z] + (−1)^{|x||y|}[y,[x,z]]
            let lhs = a.multiply(&x, &a.multiply(&y, &z).unwrap()).unwrap();
            let rhs1 = a.multiply(&a.multiply(&x, &y).unwrap(), &z).unwrap();
            let rhs2 = a
                .multiply(&y, &a.multiply(&x, &z).unwrap())
                .unwrap()
                .scale(&koszul(da, db));
            assert_eq!(lhs, rhs1.add(&rhs2).unwrap());
        }
    }

    #[test]
    fn com_basis_of_degree() {
        let a = com_alg(&[("u", 2)]);
        let b4 = a.basis_of_degree(4);
        assert_eq!(b4.len(), 1);
        assert_eq!(b4[0].label.display(&a.space), "u*u");
        assert_eq!(a.dim_of_degree(0), 1, "unitary algebra has the unit");
        assert_eq!(a.dim_of_degree(3), 0);
    }

    #[test]
    fn morphism_extension_binomial() {
        // u ↦ u + w in even degree 2: u² ↦ u² + 2uw + w²
        let a = com_alg(&[("u", 2), ("w", 2)]);
        let u = a.generator_by_name("u").unwrap();
        let w = a.generator_by_name("w").unwrap();
        let img = u.add(&w).unwrap();
        let images = vec![img, w.clone()];
        let uu = a.multiply(&u, &u).unwrap();
        let out = a.extend_as_morphism(&a, &images, &uu).unwrap();
        let uw = a.multiply(&u, &w).unwrap();
        let ww = a.multiply(&w, &w).unwrap();
        let expected = a
            .multiply(&u, &u)
            .unwrap()
            .add(&uw.scale(&qi(2)))
            .unwrap()
            .add(&ww)
            .unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn morphism_extension_lie_square() {
        // x1 ↦ λ x1 sends [x1,x1] to λ² [x1,x1]
        let a = lie_alg(&[("x1", 1)]);
        let x = a.generator_by_name("x1").unwrap();
        let lam = q(3, 2);
        let images = vec![x.scale(&lam)];
        let xx = a.multiply(&x, &x).unwrap();
        let out = a.extend_as_morphism(&a, &images, &xx).unwrap();
        assert_eq!(out, xx.scale(&(&lam * &lam)));
    }

    #[test]
    fn derivation_leibniz_on_cp2_model() {
        // d: x1 ↦ 0, x2 ↦ ½[x1,x1]; then d[x1,x2] = −½[x1,[x1,x1]] = 0
        let a = lie_alg(&[("x1", 1), ("x2", 3)]);
        let x1 = a.generator_by_name("x1").unwrap();
        let x2 = a.generator_by_name("x2").unwrap();
        let dx2 = a.multiply(&x1, &x1).unwrap().scale(&q(1, 2));
        let values = vec![AlgebraElement::zero(0), dx2];
        let x1x2 = a.multiply(&x1, &x2).unwrap();
        let out = a.extend_as_derivation(&values, -1, &x1x2).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn derivation_zero_assignment() {
        let a = com_alg(&[("u", 2)]);
        let uu = a
            .multiply(
                &a.generator_by_name("u").unwrap(),
                &a.generator_by_name("u").unwrap(),
            )
            .unwrap();
        let out = a
            .extend_as_derivation(&vec![AlgebraElement::zero(0)], 1, &uu)
            .unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn derivation_satisfies_leibniz_randomly() {
        let a = com_alg(&[("u", 2), ("w", 3)]);
        let u = a.generator_by_name("u").unwrap();
        let w = a.generator_by_name("w").unwrap();
        // derivation of degree 1: u ↦ w, w ↦ 0
        let values = vec![w.clone(), AlgebraElement::zero(4)];
        let th = |x: &AlgebraElement| a.extend_as_derivation(&values, 1, x).unwrap();
        for (x, dx) in [(u.clone(), 2), (w.clone(), 3)] {
            for (y, dy) in [(u.clone(), 2), (w.clone(), 3)] {
                let xy = a.multiply(&x, &y).unwrap();
                let lhs = th(&xy);
                let rhs = a
                    .multiply(&th(&x), &y)
                    .unwrap()
                    .add(&a.multiply(&x, &th(&y)).unwrap().scale(&sign_pow(dx)))
                    .unwrap();
                assert_eq!(lhs, rhs, "Leibniz on degrees {} {}", dx, dy);
            }
        }
    }

    #[test]
    fn extension_is_multiplicative_randomly() {
        let a = lie_alg(&[("x1", 1), ("x2", 3)]);
        let x1 = a.generator_by_name("x1").unwrap();
        let x2 = a.generator_by_name("x2").unwrap();
        let images = vec![x1.scale(&qi(2)), x2.add(&AlgebraElement::zero(3)).unwrap()];
        let f = |x: &AlgebraElement| a.extend_as_morphism(&a, &images, x).unwrap();
        for p in [&x1, &x2] {
            for r in [&x1, &x2] {
                let br = a.multiply(p, r).unwrap();
                assert_eq!(f(&br), a.multiply(&f(p), &f(r)).unwrap());
            }
        }
    }

    #[test]
    fn basis_cardinality_stable_under_renaming() {
        let a = lie_alg(&[("x1", 1), ("x2", 3)]);
        let b = lie_alg(&[("zz", 1), ("aa", 3)]);
        for d in 1..=7 {
            assert_eq!(a.dim_of_degree(d), b.dim_of_degree(d));
        }
    }

    #[test]
    fn format_and_identity_assignment() {
        let a = lie_alg(&[("x1", 1), ("x2", 3)]);
        let x1 = a.generator_by_name("x1").unwrap();
        let xx = a.multiply(&x1, &x1).unwrap().scale(&q(1, 2));
        assert_eq!(a.format_element(&xx), "1/2 [x1,x1]");
        let ids: Vec<AlgebraElement> = (0..2).map(|i| a.generator(i)).collect();
        let out = a.extend_as_morphism(&a, &ids, &xx).unwrap();
        assert_eq!(out, xx);
    }
}
