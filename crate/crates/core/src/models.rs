//! Standard fixtures: chain Lie models of complex projective spaces, small
//! Sullivan algebras, sphere models, and the cohomology ring of CP² as a
//! table algebra. These are the recurring examples of the whole crate.

use crate::dga::{Morphism, QuasiFreeAlgebra, TableAlgebra};
use crate::error::Result;
use crate::exactlin::{GradedVectorSpace, QMatrix, SparseVec};
use crate::freealg::{AlgebraElement, Direction, Flavor, FreeAlgebra, Operad};
use crate::scalar::{q, qi, Scalar};
use std::collections::HashMap;

/// Chain Lie algebra L(x1,…,xm) with |xk| = 2k−1 and
/// d x_k = ½ Σ_{i+j=k} [x_i, x_j]; the minimal model of the k-th projective
/// space truncation tower.
pub fn cp_lie_model(m: usize, cutoff: i32) -> Result<QuasiFreeAlgebra> {
    let gens: Vec<(String, i32)> = (1..=m)
        .map(|k| (format!("x{}", k), (2 * k - 1) as i32))
        .collect();
    let space = GradedVectorSpace::new(gens)?;
    let alg = FreeAlgebra::new(Flavor::lie_chain(), space.clone())?;
    let mut diff = Vec::new();
    for k in 1..=m {
        let mut dv = AlgebraElement::zero((2 * k - 1) as i32 - 1);
        for i in 1..k {
            let j = k - i;
            let xi = alg.generator(i - 1);
            let xj = alg.generator(j - 1);
            let br = alg.multiply(&xi, &xj)?;
            dv = dv.add(&br.scale(&q(1, 2)))?;
        }
        diff.push(dv);
    }
    QuasiFreeAlgebra::new(Flavor::lie_chain(), space, diff, cutoff)
}

/// All projective-space generators that fit under the cutoff.
pub fn cp_infinity_model(cutoff: i32) -> Result<QuasiFreeAlgebra> {
    let m = ((cutoff + 1) / 2).max(1) as usize;
    cp_lie_model(m, cutoff)
}

/// Minimal Sullivan algebra of CP²: Λ(u, v), |u| = 2, |v| = 5, dv = u³.
pub fn cp2_sullivan(cutoff: i32) -> Result<QuasiFreeAlgebra> {
    let space = GradedVectorSpace::new(vec![("u".into(), 2), ("v".into(), 5)])?;
    let alg = FreeAlgebra::new(Flavor::sullivan(), space.clone())?;
    let u = alg.generator_by_name("u").unwrap();
    let uu = alg.multiply(&u, &u)?;
    let u3 = alg.multiply(&uu, &u)?;
    QuasiFreeAlgebra::new(
        Flavor::sullivan(),
        space,
        vec![AlgebraElement::zero(3), u3],
        cutoff,
    )
}

/// Polynomial algebra Λ(u), |u| = 2, d = 0: the Sullivan model of the
/// Eilenberg–MacLane space K(Q,2).
pub fn kq2_sullivan(cutoff: i32) -> Result<QuasiFreeAlgebra> {
    let space = GradedVectorSpace::new(vec![("u".into(), 2)])?;
    QuasiFreeAlgebra::new(
        Flavor::sullivan(),
        space,
        vec![AlgebraElement::zero(3)],
        cutoff,
    )
}

/// Free chain Lie algebra on one generator of degree k with zero
/// differential: the minimal model of the (k+1)-sphere.
pub fn sphere_lie(k: i32, cutoff: i32) -> Result<QuasiFreeAlgebra> {
    let space = GradedVectorSpace::new(vec![(format!("x{}", k), k)])?;
    QuasiFreeAlgebra::new(
        Flavor::lie_chain(),
        space,
        vec![AlgebraElement::zero(k - 1)],
        cutoff,
    )
}

/// The abelian chain Lie algebra on one generator of degree 1, as a table:
/// basis {x}, zero differential, zero bracket. Its Chevalley–Eilenberg
/// cochains are Λ(u) with |u| = 2, the model of K(Q,2).
pub fn abelian_lie_table(cutoff: i32) -> Result<TableAlgebra> {
    assert!(cutoff >= 2);
    let n = (cutoff + 1) as usize;
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); n];
    labels[1] = vec!["x".into()];
    let mut d: Vec<QMatrix> = Vec::new();
    for q in 0..n {
        let rows = if q >= 1 { labels[q - 1].len() } else { 0 };
        d.push(QMatrix::zero(rows, labels[q].len()));
    }
    let mut products: HashMap<(i32, i32), Vec<SparseVec>> = HashMap::new();
    products.insert((1, 1), vec![Vec::new()]);
    TableAlgebra::from_tables(
        Operad::Lie,
        Direction::Chain,
        false,
        cutoff,
        labels,
        d,
        products,
    )
}

/// λ-weighted endomorphism of a projective-space Lie model:
/// x_k ↦ λ^k x_k. For λ = 1 this is the identity.
pub fn lambda_endo(a: &QuasiFreeAlgebra, lambda: &Scalar) -> Result<Morphism> {
    let mut images = Vec::new();
    for i in 0..a.alg.space.len() {
        let deg = a.alg.space.degree_of(i);
        let k = ((deg + 1) / 2) as u32;
        let mut pow = qi(1);
        for _ in 0..k {
            pow *= lambda;
        }
        images.push(a.alg.generator(i).scale(&pow));
    }
    Morphism::from_elements(a.clone(), a.clone(), images)
}

/// λ-weighted endomorphism of the CP² Sullivan model: u ↦ λu, v ↦ λ³v.
pub fn lambda_endo_sullivan(a: &QuasiFreeAlgebra, lambda: &Scalar) -> Result<Morphism> {
    let u = a.alg.generator_by_name("u").unwrap();
    let v = a.alg.generator_by_name("v").unwrap();
    let l3 = lambda * lambda * lambda;
    Morphism::from_elements(a.clone(), a.clone(), vec![u.scale(lambda), v.scale(&l3)])
}

/// H^*(CP²; Q) as a finite commutative cochain table algebra: basis 1, u, u²
/// with u³ = 0 and zero differential.
pub fn cp2_cohomology_table(cutoff: i32) -> Result<TableAlgebra> {
    assert!(cutoff >= 4);
    let n = (cutoff + 1) as usize;
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); n];
    labels[0] = vec!["1".into()];
    labels[2] = vec!["u".into()];
    labels[4] = vec!["u*u".into()];
    let mut d: Vec<QMatrix> = Vec::new();
    for q in 0..n {
        let next = q + 1;
        let rows = if next < n { labels[next].len() } else { 0 };
        d.push(QMatrix::zero(rows, labels[q].len()));
    }
    let mut products: HashMap<(i32, i32), Vec<SparseVec>> = HashMap::new();
    products.insert((2, 2), vec![vec![(0, qi(1))]]);
    products.insert((2, 4), vec![Vec::new()]);
    products.insert((4, 2), vec![Vec::new()]);
    products.insert((4, 4), vec![Vec::new()]);
    TableAlgebra::from_tables(
        Operad::Com,
        Direction::Cochain,
        true,
        cutoff,
        labels,
        d,
        products,
    )
}
