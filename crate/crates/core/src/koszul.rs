//! Koszul-duality functors for the Lie/Com pair and the classical bar/cobar
//! pair for Assoc: Chevalley–Eilenberg cochains of a chain Lie algebra,
//! the Quillen construction on the dual of a cochain algebra, functorial
//! action on morphisms and homotopies, degree-bounded minimalization, and
//! the finite-generation test.
//!
//! Sign conventions, fixed once here and validated by exact d² = 0 checks:
//! the coalgebra differential on the suspended side is D₁(sx) = −s(dx) and
//! D₂(sy ∧ sz) = (−1)^{|y|} s[y,z]; dualization pairs ⟨dφ, c⟩ =
//! −(−1)^{|φ|}⟨φ, Dc⟩ with ⟨φψ, u∧v⟩ = (−1)^{|ψ||u|}φ(u)ψ(v) + (sym).
//! Unwinding these for structure constants gives the formulas below.

use crate::dga::{Cv, Morphism, QuasiFreeAlgebra, TableAlgebra, Target};
use crate::error::{Error, Result};
use crate::exactlin::{Echelon, GradedVectorSpace, QMatrix, SparseVec};
use crate::freealg::{
    AlgebraElement, Direction, Flavor, FreeAlgebra, Monomial, Operad, Unitality,
};
use crate::homotopy::Homotopy;
use crate::scalar::{is_zero, q, sign_pow, Scalar};
use num::Zero;
use std::sync::Arc;

/// The representable Koszul-dual pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualityPair {
    /// Chevalley–Eilenberg cochains: chain Lie → cochain commutative.
    LieToCom,
    /// Quillen construction: cochain commutative → chain Lie.
    ComToLie,
    /// Cobar-dual of the bar construction: chain associative → cochain associative.
    AssocChainToCochain,
    /// chain side of the bar-cobar pair: cochain associative → chain associative.
    AssocCochainToChain,
}

/// Result of the cochains-of functor: the quasi-free cochain algebra, plus
/// the provenance of each generator as a basis vector of the source.
pub struct CochainsOf {
    pub algebra: QuasiFreeAlgebra,
    /// For output generator i: the (degree, index) of the source basis
    /// vector it is dual to (after suspension).
    pub gen_origin: Vec<(i32, usize)>,
    pub source: Arc<TableAlgebra>,
}

/// Result of the Quillen-side functor: the quasi-free chain algebra, plus
/// the provenance of each generator as a reduced basis vector of the source.
pub struct QuillenOf {
    pub algebra: QuasiFreeAlgebra,
    pub gen_origin: Vec<(i32, usize)>,
    pub source: Arc<TableAlgebra>,
}

fn gen_name(prefix: char, degree: i32, k: usize) -> String {
    format!("{}{}_{:02}", prefix, degree, k)
}

/// Chevalley–Eilenberg cochain algebra of a chain Lie algebra (or the
/// cobar-dual construction of a chain associative algebra): the free graded
/// (co)commutative/associative algebra on the degreewise dual of the
/// suspension, with differential d₁ + d₂ dual to d and the bracket/product.
///
/// Generators are complete for degrees ≤ D+1 when the input is certified to
/// degree D; the output is certified there.
pub fn ce_cochains(input: &Target) -> Result<CochainsOf> {
    let src = input.table()?;
    if src.direction != Direction::Chain {
        return Err(Error::Flavor("cochains-of consumes chain algebras".into()));
    }
    let out_operad = match src.operad {
        Operad::Lie => Operad::Com,
        Operad::Assoc => Operad::Assoc,
        Operad::Com => {
            return Err(Error::Flavor(
                "the commutative operad sits on the cochain side of this pair".into(),
            ))
        }
    };
    if src.unitary {
        return Err(Error::Connectivity(
            "cochains-of consumes reduced (connected) chain algebras".into(),
        ));
    }
    let d_src = src.cutoff;
    let mut names: Vec<(String, i32)> = Vec::new();
    let mut origins: Vec<((i32, usize), String)> = Vec::new();
    for q in 1..=d_src {
        for k in 0..src.dim(q) {
            let name = gen_name('c', q + 1, k);
            names.push((name.clone(), q + 1));
            origins.push(((q, k), name));
        }
    }
    let space = GradedVectorSpace::new(names)?;
    let flavor = Flavor::new(
        out_operad,
        Direction::Cochain,
        if out_operad == Operad::Com {
            Unitality::Unitary
        } else {
            Unitality::Reduced
        },
    )?;
    let alg = FreeAlgebra::new(flavor, space.clone())?;
    let gen_of = |qdeg: i32, k: usize| -> usize {
        alg.space
            .index_of(&gen_name('c', qdeg + 1, k))
            .expect("generator exists")
    };
    let mut diff: Vec<AlgebraElement> = Vec::new();
    for gi in 0..alg.space.len() {
        let name = &alg.space.gen(gi).name;
        let (qa, ka) = origins
            .iter()
            .find(|(_, n)| n == name)
            .map(|(o, _)| *o)
            .expect("origin recorded");
        let na = qa;
        let wdeg = na + 1;
        let mut dv = AlgebraElement::zero(wdeg + 1);
        // d₁: dual of the source differential. ⟨d₁ w_a, s x_b⟩ with
        // d x_b ∋ δ x_a gives d₁ w_a = (−1)^{|w_a|} Σ δ w_b over |x_b| = |x_a|+1.
        if na + 1 <= d_src {
            let m = src.d_matrix(na + 1); // degree na+1 → na
            for b in 0..src.dim(na + 1) {
                let delta = m.entry(ka, b);
                if !is_zero(&delta) {
                    let wb = gen_of(na + 1, b);
                    dv.add_term(Monomial::gen(wb), sign_pow((wdeg) as i64) * delta);
                }
            }
        }
        // d₂: dual of the bracket/product.
        match out_operad {
            Operad::Com => {
                // over unordered pairs b ≤ c with |x_b| + |x_c| = |x_a|
                for nb in 1..na {
                    let nc = na - nb;
                    if nb > nc {
                        continue;
                    }
                    for b in 0..src.dim(nb) {
                        let c_range = 0..src.dim(nc);
                        for c in c_range {
                            if nb == nc && b > c {
                                continue;
                            }
                            let prod = src.mul_basis(nb, b, nc, c)?;
                            let kappa = prod
                                .v
                                .iter()
                                .find(|(i, _)| *i == ka)
                                .map(|(_, s)| s.clone())
                                .unwrap_or_else(Scalar::zero);
                            if is_zero(&kappa) {
                                continue;
                            }
                            let lam = if nb == nc && b == c {
                                // ⟨w², sx∧sx⟩ = 2
                                -q(1, 2) * sign_pow((na + 1 + nb) as i64) * kappa
                            } else {
                                -sign_pow((na + 1 + nb) as i64)
                                    * sign_pow(((nb + 1) as i64) * ((nc + 1) as i64))
                                    * kappa
                            };
                            let wb = alg.generator(gen_of(nb, b));
                            let wc = alg.generator(gen_of(nc, c));
                            let m = alg.multiply(&wb, &wc)?;
                            dv = dv.add(&m.scale(&lam))?;
                        }
                    }
                }
            }
            Operad::Assoc => {
                // over ordered pairs (b, c)
                for nb in 1..na {
                    let nc = na - nb;
                    for b in 0..src.dim(nb) {
                        for c in 0..src.dim(nc) {
                            let prod = src.mul_basis(nb, b, nc, c)?;
                            let kappa = prod
                                .v
                                .iter()
                                .find(|(i, _)| *i == ka)
                                .map(|(_, s)| s.clone())
                                .unwrap_or_else(Scalar::zero);
                            if is_zero(&kappa) {
                                continue;
                            }
                            let lam = -sign_pow((na + 1 + nb) as i64)
                                * sign_pow(((nb + 1) as i64) * ((nc + 1) as i64))
                                * kappa;
                            let wb = alg.generator(gen_of(nb, b));
                            let wc = alg.generator(gen_of(nc, c));
                            let m = alg.multiply(&wb, &wc)?;
                            dv = dv.add(&m.scale(&lam))?;
                        }
                    }
                }
            }
            Operad::Lie => unreachable!(),
        }
        diff.push(dv);
    }
    let algebra = QuasiFreeAlgebra::new(flavor, space, diff, d_src + 1)?;
    let gen_origin = (0..algebra.alg.space.len())
        .map(|i| {
            let name = &algebra.alg.space.gen(i).name;
            origins
                .iter()
                .find(|(_, n)| n == name)
                .map(|(o, _)| *o)
                .expect("origin recorded")
        })
        .collect();
    Ok(CochainsOf {
        algebra,
        gen_origin,
        source: src,
    })
}

/// Quillen construction on the dual of a connected cochain algebra: the free
/// Lie (or associative) chain algebra on the desuspended reduced dual, with
/// differential d₁ + d₂ dual to the differential and the product.
///
/// Certified to degree D−1 for an input certified to degree D.
pub fn quillen_construction(input: &Target) -> Result<QuillenOf> {
    let src = input.table()?;
    if src.direction != Direction::Cochain {
        return Err(Error::Flavor(
            "the Quillen construction consumes cochain algebras".into(),
        ));
    }
    let out_operad = match src.operad {
        Operad::Com => Operad::Lie,
        Operad::Assoc => Operad::Assoc,
        Operad::Lie => {
            return Err(Error::Flavor(
                "the Lie operad sits on the chain side of this pair".into(),
            ))
        }
    };
    // 1-connected: the reduced part must start in degrees ≥ 2
    if src.dim(1) != 0 {
        return Err(Error::Connectivity(
            "the Quillen construction needs a 1-connected input".into(),
        ));
    }
    let d_src = src.cutoff;
    let mut names: Vec<(String, i32)> = Vec::new();
    let mut origins: Vec<((i32, usize), String)> = Vec::new();
    for p in 2..=d_src {
        for k in 0..src.dim(p) {
            let name = gen_name('y', p - 1, k);
            names.push((name.clone(), p - 1));
            origins.push(((p, k), name));
        }
    }
    let space = GradedVectorSpace::new(names)?;
    let flavor = Flavor::new(out_operad, Direction::Chain, Unitality::Reduced)?;
    let alg = FreeAlgebra::new(flavor, space.clone())?;
    let gen_of = |pdeg: i32, k: usize| -> usize {
        alg.space
            .index_of(&gen_name('y', pdeg - 1, k))
            .expect("generator exists")
    };
    let mut diff: Vec<AlgebraElement> = Vec::new();
    for gi in 0..alg.space.len() {
        let name = &alg.space.gen(gi).name;
        let (pe, ke) = origins
            .iter()
            .find(|(_, n)| n == name)
            .map(|(o, _)| *o)
            .expect("origin recorded");
        let ydeg = pe - 1;
        let mut dv = AlgebraElement::zero(ydeg - 1);
        // d₁(y_e) = (−1)^{|e|} Σ_b ⟨e in d x_b⟩ y_b over |x_b| = |e| − 1
        if pe - 1 >= 2 {
            let m = src.d_matrix(pe - 1); // degree pe−1 → pe
            for b in 0..src.dim(pe - 1) {
                let delta = m.entry(ke, b);
                if !is_zero(&delta) {
                    let yb = gen_of(pe - 1, b);
                    dv.add_term(Monomial::gen(yb), sign_pow(pe as i64) * delta);
                }
            }
        }
        // d₂(y_e): dual of the product, over ordered pairs (a, b):
        // coefficient (−1)^{|a| + |a||b|} ⟨e in x_a·x_b⟩, with a global ½ and
        // brackets for Lie, concatenation and no ½ for Assoc.
        for pa in 2..pe - 1 {
            let pb = pe - pa;
            if pb < 2 {
                continue;
            }
            for a in 0..src.dim(pa) {
                for b in 0..src.dim(pb) {
                    let prod = src.mul_basis(pa, a, pb, b)?;
                    let p_coeff = prod
                        .v
                        .iter()
                        .find(|(i, _)| *i == ke)
                        .map(|(_, s)| s.clone())
                        .unwrap_or_else(Scalar::zero);
                    if is_zero(&p_coeff) {
                        continue;
                    }
                    let sgn = sign_pow((pa as i64) + (pa as i64) * (pb as i64));
                    let ya = alg.generator(gen_of(pa, a));
                    let yb = alg.generator(gen_of(pb, b));
                    let m = alg.multiply(&ya, &yb)?;
                    let lam = match out_operad {
                        Operad::Lie => q(1, 2) * sgn * p_coeff,
                        Operad::Assoc => sgn * p_coeff,
                        Operad::Com => unreachable!(),
                    };
                    dv = dv.add(&m.scale(&lam))?;
                }
            }
        }
        diff.push(dv);
    }
    let algebra = QuasiFreeAlgebra::new(flavor, space, diff, d_src - 1)?;
    let gen_origin = (0..algebra.alg.space.len())
        .map(|i| {
            let name = &algebra.alg.space.gen(i).name;
            origins
                .iter()
                .find(|(_, n)| n == name)
                .map(|(o, _)| *o)
                .expect("origin recorded")
        })
        .collect();
    Ok(QuillenOf {
        algebra,
        gen_origin,
        source: src,
    })
}

/// Contravariant action of the cochains functor: for f: a → a', the image of
/// the generator dual to s z is Σ ⟨z in f(y)⟩ · (generator dual to s y).
pub fn ce_on_morphism(
    f: &Morphism,
    ce_src: &CochainsOf,
    ce_tgt: &CochainsOf,
) -> Result<Morphism> {
    // f: a → a'; result: C(a') → C(a)
    let mut images: Vec<Cv> = Vec::new();
    let mut mats: std::collections::HashMap<i32, QMatrix> = std::collections::HashMap::new();
    for gi in 0..ce_tgt.algebra.alg.space.len() {
        let (qdeg, k) = ce_tgt.gen_origin[gi];
        let m = match mats.entry(qdeg) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(f.matrix_at(qdeg)?),
        };
        let mut v: SparseVec = Vec::new();
        for (j, origin) in ce_src.gen_origin.iter().enumerate() {
            if origin.0 != qdeg {
                continue;
            }
            let c = m.entry(k, origin.1);
            if !is_zero(&c) {
                // generator j of ce_src corresponds to a single basis word;
                // its coordinate index in the tabulated degree is found below
                v.push((j, c));
            }
        }
        // translate generator indices to coordinates in the tabulated basis
        let deg = qdeg + 1;
        let mut cv = Cv::zero(deg);
        for (j, c) in v {
            let gen_elem = ce_src.algebra.alg.generator(j);
            let coords = ce_src.algebra.express_cv(&gen_elem)?;
            cv = cv.add(&coords.scale(&c))?;
        }
        images.push(cv);
    }
    Morphism::new(
        ce_tgt.algebra.clone(),
        Target::Free(ce_src.algebra.clone()),
        images,
    )
}

/// Contravariant action of the Quillen functor: for f: A → A', the image of
/// the generator dual to s⁻¹e is Σ ⟨e in f(x)⟩ · (generator dual to s⁻¹x).
pub fn quillen_on_morphism(
    f: &Morphism,
    q_src: &QuillenOf,
    q_tgt: &QuillenOf,
) -> Result<Morphism> {
    // f: A → A'; result: L(A') → L(A)
    let mut images: Vec<Cv> = Vec::new();
    let mut mats: std::collections::HashMap<i32, QMatrix> = std::collections::HashMap::new();
    for gi in 0..q_tgt.algebra.alg.space.len() {
        let (pdeg, k) = q_tgt.gen_origin[gi];
        let m = match mats.entry(pdeg) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(f.matrix_at(pdeg)?),
        };
        let deg = pdeg - 1;
        let mut cv = Cv::zero(deg);
        for (j, origin) in q_src.gen_origin.iter().enumerate() {
            if origin.0 != pdeg {
                continue;
            }
            let c = m.entry(k, origin.1);
            if !is_zero(&c) {
                let gen_elem = q_src.algebra.alg.generator(j);
                let coords = q_src.algebra.express_cv(&gen_elem)?;
                cv = cv.add(&coords.scale(&c))?;
            }
        }
        images.push(cv);
    }
    Morphism::new(
        q_tgt.algebra.clone(),
        Target::Free(q_src.algebra.clone()),
        images,
    )
}

/// Transport a homotopy h between f, g: a → a' through the cochains functor.
///
/// The t^i-components of the image homotopy are forced: they are the duals
/// of the α_i of h (the suspension carries no dt past anything there). The
/// dt-components are gauge; they are solved degreewise from the recursion
/// −(i+1)α_{i+1} = dβ_i + β_i d, which must admit a solution because the
/// functor image is one. This sidesteps the dualization sign conventions
/// entirely and every result is re-verified.
pub fn ce_on_homotopy(
    h: &Homotopy,
    f_img: &Morphism,
    ce_src: &CochainsOf,
    ce_tgt: &CochainsOf,
) -> Result<Homotopy> {
    let max_i = h.max_beta_index() + 1;
    // forced alpha duals per output generator: A_i(w_z) = Σ_y ⟨z ∈ α_i(y)⟩ w_y
    let mut alphas: Vec<Vec<Cv>> = Vec::new();
    for gi in 0..ce_tgt.algebra.alg.space.len() {
        let (qdeg, k) = ce_tgt.gen_origin[gi];
        let mut fam: Vec<Cv> = Vec::new();
        for i in 1..=max_i {
            let mut cv = Cv::zero(qdeg + 1);
            for (j, origin) in ce_src.gen_origin.iter().enumerate() {
                if origin.0 != qdeg {
                    continue;
                }
                let y = h.source.alg.basis_of_degree(origin.0)[origin.1].elem.clone();
                let hy = h.eval(&y)?;
                let c = hy
                    .tt_at(i)
                    .v
                    .iter()
                    .find(|(t, _)| *t == k)
                    .map(|(_, s)| s.clone())
                    .unwrap_or_else(Scalar::zero);
                if !is_zero(&c) {
                    let gen_elem = ce_src.algebra.alg.generator(j);
                    let coords = ce_src.algebra.express_cv(&gen_elem)?;
                    cv = cv.add(&coords.scale(&c))?;
                }
            }
            fam.push(cv);
        }
        while fam.last().map(Cv::is_zero).unwrap_or(false) {
            fam.pop();
        }
        alphas.push(fam);
    }
    homotopy_with_forced_alphas(f_img, alphas)
}

/// Transport a homotopy h between f, g: A → A' through the Quillen functor;
/// same construction as the cochains side.
pub fn quillen_on_homotopy(
    h: &Homotopy,
    f_img: &Morphism,
    q_src: &QuillenOf,
    q_tgt: &QuillenOf,
) -> Result<Homotopy> {
    let max_i = h.max_beta_index() + 1;
    let mut alphas: Vec<Vec<Cv>> = Vec::new();
    for gi in 0..q_tgt.algebra.alg.space.len() {
        let (pdeg, k) = q_tgt.gen_origin[gi];
        let mut fam: Vec<Cv> = Vec::new();
        for i in 1..=max_i {
            let mut cv = Cv::zero(pdeg - 1);
            for (j, origin) in q_src.gen_origin.iter().enumerate() {
                if origin.0 != pdeg {
                    continue;
                }
                let x = h.source.alg.basis_of_degree(origin.0)[origin.1].elem.clone();
                let hx = h.eval(&x)?;
                let c = hx
                    .tt_at(i)
                    .v
                    .iter()
                    .find(|(t, _)| *t == k)
                    .map(|(_, s)| s.clone())
                    .unwrap_or_else(Scalar::zero);
                if !is_zero(&c) {
                    let gen_elem = q_src.algebra.alg.generator(j);
                    let coords = q_src.algebra.express_cv(&gen_elem)?;
                    cv = cv.add(&coords.scale(&c))?;
                }
            }
            fam.push(cv);
        }
        while fam.last().map(Cv::is_zero).unwrap_or(false) {
            fam.pop();
        }
        alphas.push(fam);
    }
    homotopy_with_forced_alphas(f_img, alphas)
}

/// Build a homotopy with base α_0 and a prescribed family of higher α on
/// generators, solving for compatible β degree by degree. Fails only when
/// the prescribed family is not realizable, which for functor transports
/// would contradict the homotopy-preservation lemmas.
fn homotopy_with_forced_alphas(base: &Morphism, alphas: Vec<Vec<Cv>>) -> Result<Homotopy> {
    use crate::homotopy::generator_order;
    let source = &base.source;
    let table = base.target.table()?;
    let n = source.alg.space.len();
    if alphas.len() != n {
        return Err(Error::Dimension("alpha family length mismatch".into()));
    }
    let order = generator_order(source)?;
    let shift = source.shift();
    let window = source.cutoff.min(table.cutoff);
    let mut betas: Vec<Vec<Cv>> = vec![Vec::new(); n];
    let mut stored_alphas: Vec<Vec<Cv>> = vec![Vec::new(); n];
    for &g in &order {
        let deg = source.alg.space.degree_of(g);
        if deg + shift > window {
            // edge generator: no certifiable data beyond α_0
            continue;
        }
        let partial = Homotopy::from_parts_unchecked(base, betas.clone(), stored_alphas.clone())?;
        let dv = source.d_gen(g)?;
        let hdv = partial.eval(&dv)?;
        let bound = hdv.dt.len().max(alphas[g].len());
        let sv = sign_pow(deg as i64);
        let mut fam: Vec<Cv> = Vec::new();
        for i in 0..bound {
            // (b)-condition: (−1)^{|v|}(i+1)A_{i+1}(v) + d C_i(v) = [h(dv)]_{t^i dt}
            let a_next = alphas[g].get(i).cloned().unwrap_or(Cv::zero(deg));
            let mut rhs = hdv
                .dt_at(i, &table)
                .sub(&a_next.scale(&(sv.clone() * crate::scalar::qi((i + 1) as i64))))?;
            rhs.degree = deg;
            // the unknown C_i(v) sits one degree against the differential
            let solve_deg = deg - shift;
            let mat = table.d_matrix(solve_deg);
            let e = Echelon::new(&mat);
            let sol = e.solve(&rhs.v).ok_or_else(|| {
                Error::BugClass(format!(
                    "homotopy transport: no compatible dt-component at generator {} index {}",
                    source.alg.space.gen(g).name,
                    i
                ))
            })?;
            let c_i = Cv {
                degree: solve_deg,
                v: crate::exactlin::sparse_from_dense(&sol),
            };
            fam.push(c_i.scale(&sv));
        }
        while fam.last().map(Cv::is_zero).unwrap_or(false) {
            fam.pop();
        }
        betas[g] = fam;
        stored_alphas[g] = alphas[g].clone();
    }
    let out = Homotopy::new(base, betas)?;
    Ok(out)
}

/// Minimal model by iterated cancellation of contractible generator pairs
/// (v, w) with dv = w + (decomposables): substitute w ↦ dv, transport the
/// differential, and project the pair away. Returns the minimal algebra, the
/// projection A → M and a strict section M → A with p∘s = id.
pub struct MinimalModel {
    pub minimal: QuasiFreeAlgebra,
    pub projection: Morphism,
    pub section: Morphism,
}

fn linear_part(x: &AlgebraElement) -> Vec<(usize, Scalar)> {
    x.terms()
        .filter_map(|(m, c)| match m {
            Monomial::Word(w) if w.len() == 1 => Some((w[0] as usize, c.clone())),
            _ => None,
        })
        .collect()
}

/// Invert a degree-preserving generator assignment of a free algebra whose
/// extension is bijective degreewise.
fn invert_assignment(
    alg: &FreeAlgebra,
    images: &[AlgebraElement],
) -> Result<Vec<AlgebraElement>> {
    let mut out: Vec<AlgebraElement> = Vec::new();
    let mut mats: std::collections::HashMap<i32, Echelon> = std::collections::HashMap::new();
    for i in 0..alg.space.len() {
        let deg = alg.space.degree_of(i);
        if !mats.contains_key(&deg) {
            let basis = alg.basis_of_degree(deg);
            let mut cols: Vec<SparseVec> = Vec::new();
            for b in &basis {
                let img = alg.extend_as_morphism(alg, images, &b.elem)?;
                cols.push(crate::exactlin::sparse_from_dense(&alg.express(&img)?));
            }
            mats.insert(deg, Echelon::new(&QMatrix::from_columns(basis.len(), cols)));
        }
        let e = &mats[&deg];
        let target = crate::exactlin::sparse_from_dense(&alg.express(&alg.generator(i))?);
        let sol = e.solve(&target).ok_or_else(|| {
            Error::Precondition("generator substitution is not invertible".into())
        })?;
        out.push(alg.from_coords(deg, &crate::exactlin::sparse_from_dense(&sol))?);
    }
    Ok(out)
}

pub fn minimalize(a: &QuasiFreeAlgebra) -> Result<MinimalModel> {
    let mut current = a.clone();
    let mut projection = Morphism::identity(a)?;
    loop {
        // lowest-index generator with a linear differential term
        let mut pair: Option<(usize, usize, Scalar)> = None;
        'scan: for v in 0..current.alg.space.len() {
            let lin = linear_part(&current.d_gen(v)?);
            if let Some((w, lam)) = lin.first() {
                pair = Some((v, *w, lam.clone()));
                break 'scan;
            }
        }
        let Some((v, w, lam)) = pair else { break };
        let n = current.alg.space.len();
        // substitution Φ: w ↦ dv, everything else fixed; invertible since
        // the w-coefficient of dv is lam ≠ 0
        debug_assert!(!is_zero(&lam));
        let phi: Vec<AlgebraElement> = (0..n)
            .map(|g| {
                if g == w {
                    current.d_gen(v).expect("dv")
                } else {
                    current.alg.generator(g)
                }
            })
            .collect();
        let psi = invert_assignment(&current.alg, &phi)?;
        // transported differential d* g = ψ(d(Φ g)), then kill {v, w}
        let keep: Vec<usize> = (0..n).filter(|g| *g != v && *g != w).collect();
        let new_space = GradedVectorSpace::new(
            keep.iter()
                .map(|&g| {
                    let gg = current.alg.space.gen(g);
                    (gg.name.clone(), gg.degree)
                })
                .collect(),
        )?;
        let new_alg = FreeAlgebra::new(current.alg.flavor, new_space.clone())?;
        // kill-assignment from the old algebra onto the new one
        let kill: Vec<AlgebraElement> = (0..n)
            .map(|g| {
                if g == v || g == w {
                    AlgebraElement::zero(current.alg.space.degree_of(g))
                } else {
                    let name = &current.alg.space.gen(g).name;
                    let ni = new_alg.space.index_of(name).expect("kept generator");
                    new_alg.generator(ni)
                }
            })
            .collect();
        let mut new_diff: Vec<AlgebraElement> = Vec::new();
        for &g in &keep {
            let dphi = current.d_elem(&phi[g])?;
            let dstar = current
                .alg
                .extend_as_morphism(&current.alg, &psi, &dphi)?;
            let dnew = current
                .alg
                .extend_as_morphism(&new_alg, &kill, &dstar)?;
            new_diff.push(dnew);
        }
        let next = QuasiFreeAlgebra::new(
            current.alg.flavor,
            new_space,
            new_diff,
            current.cutoff,
        )?;
        // step projection: g ↦ kill(ψ(g))
        let mut step_images: Vec<Cv> = Vec::new();
        for g in 0..n {
            let pg = current
                .alg
                .extend_as_morphism(&new_alg, &kill, &psi[g])?;
            step_images.push(next.express_cv(&pg)?);
        }
        let step = Morphism::new(current.clone(), Target::Free(next.clone()), step_images)?;
        projection = Morphism::compose(&step, &projection)?;
        current = next;
    }
    // strict section of the projection, degree by degree on generators
    let minimal = current;
    let section = build_section(&projection, &minimal, a)?;
    Ok(MinimalModel {
        minimal,
        projection,
        section,
    })
}

/// Solve for a chain section s: M → A of a surjective quasi-isomorphism
/// p: A → M from a minimal M: for each generator v of M, find b with
/// d b = s(dv) and p(b) = v as one stacked linear system.
fn build_section(
    p: &Morphism,
    minimal: &QuasiFreeAlgebra,
    ambient: &QuasiFreeAlgebra,
) -> Result<Morphism> {
    let atab = ambient.tabulate()?;
    let mtab = minimal.tabulate()?;
    let shift = ambient.shift();
    let mut images: Vec<Cv> = Vec::new();
    for i in 0..minimal.alg.space.len() {
        let deg = minimal.alg.space.degree_of(i);
        // partial section on the generators so far
        let partial = Morphism::new(
            minimal.truncate_to_len(i)?,
            Target::Free(ambient.clone()),
            images.clone(),
        )?;
        let dv = minimal.d_gen(i)?;
        let rhs_top = partial.apply_cv(&dv)?;
        // stacked system: [d_A; matrix of p at deg] b = [s(dv); v]
        let d_block = atab.d_matrix(deg);
        let p_block = p.matrix_at(deg)?;
        let rows = d_block.rows + p_block.rows;
        let mut cols: Vec<SparseVec> = Vec::new();
        for j in 0..atab.dim(deg) {
            let mut col: SparseVec = d_block.col(j).clone();
            for (r, c) in p_block.col(j) {
                col.push((d_block.rows + r, c.clone()));
            }
            cols.push(col);
        }
        let stacked = QMatrix::from_columns(rows, cols);
        let mut rhs: SparseVec = rhs_top.v.clone();
        let v_cv = mtab_coords_of_generator(minimal, i)?;
        for (r, c) in &v_cv.v {
            rhs.push((d_block.rows + r, c.clone()));
        }
        let sol = Echelon::new(&stacked).solve(&rhs).ok_or_else(|| {
            Error::BugClass(
                "a minimal generator has no strict-section preimage; the projection is not a surjective quasi-isomorphism".into(),
            )
        })?;
        images.push(Cv {
            degree: deg,
            v: crate::exactlin::sparse_from_dense(&sol),
        });
        let _ = (shift, &mtab);
    }
    let s = Morphism::new(minimal.clone(), Target::Free(ambient.clone()), images)?;
    // p ∘ s = id exactly
    let ps = Morphism::compose(p, &s)?;
    if !ps.equal(&Morphism::identity(minimal)?) {
        return Err(Error::BugClass("section fails p∘s = id".into()));
    }
    Ok(s)
}

fn mtab_coords_of_generator(m: &QuasiFreeAlgebra, i: usize) -> Result<Cv> {
    m.express_cv(&m.alg.generator(i))
}

/// Outcome of the finite-generation test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiniteGeneration {
    /// H is finite dimensional as far as the window shows; carries the
    /// generator count of the minimal Quillen model and the reduced Betti sum.
    Finite {
        generators: usize,
        reduced_betti_sum: usize,
    },
    /// H persists to the top of the certified window; witness degree given.
    Infinite { witness_degree: i32 },
    Unknown(String),
}

/// Is the cohomology of a 1-connected cochain algebra finite dimensional —
/// equivalently, is the minimal model of its Quillen construction finitely
/// generated? Decided within the certified window: vanishing of H on the
/// top two certifiable degrees counts as finite, persistence as infinite.
pub fn check_finite_generation(input: &Target) -> Result<FiniteGeneration> {
    let src = input.table()?;
    if src.direction != Direction::Cochain {
        return Err(Error::Flavor("finite generation test is for cochain algebras".into()));
    }
    let window = src.cutoff - 1;
    if window < 4 {
        return Ok(FiniteGeneration::Unknown(
            "cutoff too small to see past the fundamental classes".into(),
        ));
    }
    let mut top: Option<i32> = None;
    let mut betti_sum = 0usize;
    for qd in 1..=window {
        let b = src.betti(qd)?;
        if b > 0 {
            top = Some(qd);
            betti_sum += b;
        }
    }
    match top {
        None => Ok(FiniteGeneration::Finite {
            generators: 0,
            reduced_betti_sum: 0,
        }),
        Some(t) if t >= window - 1 => Ok(FiniteGeneration::Infinite { witness_degree: t }),
        Some(_) => {
            let ql = quillen_construction(input)?;
            let mm = minimalize(&ql.algebra)?;
            let generators = mm.minimal.alg.space.len();
            Ok(FiniteGeneration::Finite {
                generators,
                reduced_betti_sum: betti_sum,
            })
        }
    }
}
