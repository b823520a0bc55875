//! Homotopies of algebra maps h = Σ(α_i t^i + β_i t^i dt), their
//! verification, obstruction-theoretic extension of maps and homotopies up
//! the truncation tower, the three-valued homotopy decision, and extension
//! of isomorphisms.
//!
//! A homotopy into B is an algebra map A → B⊗Λ(t,dt). It is stored by its
//! base morphism α_0 and the β_i on generators; all higher α_i are derived
//! through −(i+1)α_{i+1} = dβ_i + β_i d and every stored homotopy re-derives
//! and re-checks that identity exactly.

use crate::dga::{Cv, Morphism, QuasiFreeAlgebra, TableAlgebra, Target};
use crate::error::{Error, Obstruction, Result};
use crate::exactlin::Echelon;
use crate::freealg::{AlgebraElement, Direction, Label, Monomial};
use crate::scalar::{is_zero, qi, sign_pow, Scalar};
use std::sync::Arc;

/// Element of B ⊗ Λ(t,dt), homogeneous of one total degree, written as
/// Σ tt[i]⊗t^i + Σ dt[i]⊗t^i dt with coefficients in the table algebra B.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub degree: i32,
    pub tt: Vec<Cv>,
    pub dt: Vec<Cv>,
}

impl Interval {
    pub fn zero(degree: i32) -> Interval {
        Interval {
            degree,
            tt: Vec::new(),
            dt: Vec::new(),
        }
    }

    pub fn from_cv(x: Cv) -> Interval {
        Interval {
            degree: x.degree,
            tt: vec![x],
            dt: Vec::new(),
        }
    }

    fn dt_degree(&self, table: &TableAlgebra) -> i32 {
        // a dt-coefficient c satisfies |c| + |dt| = degree with |dt| = shift
        self.degree - table.shift()
    }

    pub fn tt_at(&self, i: usize) -> Cv {
        self.tt.get(i).cloned().unwrap_or(Cv::zero(self.degree))
    }

    pub fn dt_at(&self, i: usize, table: &TableAlgebra) -> Cv {
        self.dt
            .get(i)
            .cloned()
            .unwrap_or(Cv::zero(self.dt_degree(table)))
    }

    pub fn trim(mut self) -> Interval {
        while self.tt.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.tt.pop();
        }
        while self.dt.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.dt.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.tt.iter().all(Cv::is_zero) && self.dt.iter().all(Cv::is_zero)
    }

    pub fn add(&self, other: &Interval) -> Result<Interval> {
        if !self.is_zero() && !other.is_zero() && self.degree != other.degree {
            return Err(Error::Degree(format!(
                "adding interval elements of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut tt = Vec::new();
        for i in 0..self.tt.len().max(other.tt.len()) {
            let a = self.tt.get(i).cloned().unwrap_or(Cv::zero(degree));
            let b = other.tt.get(i).cloned().unwrap_or(Cv::zero(degree));
            tt.push(a.add(&b)?);
        }
        let mut dt = Vec::new();
        for i in 0..self.dt.len().max(other.dt.len()) {
            let za = self.dt.get(i).cloned();
            let zb = other.dt.get(i).cloned();
            let v = match (za, zb) {
                (Some(a), Some(b)) => a.add(&b)?,
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => unreachable!(),
            };
            dt.push(v);
        }
        Ok(Interval { degree, tt, dt }.trim())
    }

    pub fn scale(&self, s: &Scalar) -> Interval {
        Interval {
            degree: self.degree,
            tt: self.tt.iter().map(|c| c.scale(s)).collect(),
            dt: self.dt.iter().map(|c| c.scale(s)).collect(),
        }
        .trim()
    }

    /// Product in B⊗Λ(t,dt): t is even, dt is odd and squares to zero;
    /// moving dt past a coefficient b costs (−1)^{|b|}.
    pub fn mul(&self, other: &Interval, table: &TableAlgebra) -> Result<Interval> {
        let degree = self.degree + other.degree;
        let mut out = Interval::zero(degree);
        let mut tt: Vec<Cv> = Vec::new();
        let mut dt: Vec<Cv> = Vec::new();
        let ensure_tt = |tt: &mut Vec<Cv>, k: usize| {
            while tt.len() <= k {
                tt.push(Cv::zero(degree));
            }
        };
        let dt_deg = degree - table.shift();
        let ensure_dt = |dt: &mut Vec<Cv>, k: usize| {
            while dt.len() <= k {
                dt.push(Cv::zero(dt_deg));
            }
        };
        for (i, a) in self.tt.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.tt.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = table.mul_cv(a, b)?;
                ensure_tt(&mut tt, i + j);
                tt[i + j] = tt[i + j].add(&p)?;
            }
            for (j, e) in other.dt.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let p = table.mul_cv(a, e)?;
                ensure_dt(&mut dt, i + j);
                dt[i + j] = dt[i + j].add(&p)?;
            }
        }
        for (i, c) in self.dt.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, b) in other.tt.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = table.mul_cv(c, b)?.scale(&sign_pow(other.degree as i64));
                ensure_dt(&mut dt, i + j);
                dt[i + j] = dt[i + j].add(&p)?;
            }
            // dt·dt = 0
        }
        out.tt = tt;
        out.dt = dt;
        Ok(out.trim())
    }

    /// Differential: d(b⊗t^i) = db⊗t^i + (−1)^{|b|} i·b⊗t^{i−1}dt and
    /// d(c⊗t^i dt) = dc⊗t^i dt.
    pub fn d(&self, table: &TableAlgebra) -> Result<Interval> {
        let degree = self.degree + table.shift();
        let mut tt: Vec<Cv> = self
            .tt
            .iter()
            .map(|c| table.d_cv(c))
            .map(|mut c| {
                c.degree = degree;
                c
            })
            .collect();
        while tt.last().map(|c| c.is_zero()).unwrap_or(false) {
            tt.pop();
        }
        let dt_deg = degree - table.shift(); // = self.degree
        let mut dt: Vec<Cv> = Vec::new();
        for i in 0..self.tt.len().saturating_sub(1) {
            let a = &self.tt[i + 1];
            let mut term = a.scale(&(sign_pow(self.degree as i64) * qi((i + 1) as i64)));
            term.degree = dt_deg;
            while dt.len() <= i {
                dt.push(Cv::zero(dt_deg));
            }
            dt[i] = dt[i].add(&term)?;
        }
        for (i, c) in self.dt.iter().enumerate() {
            let mut t = table.d_cv(c);
            t.degree = dt_deg;
            while dt.len() <= i {
                dt.push(Cv::zero(dt_deg));
            }
            dt[i] = dt[i].add(&t)?;
        }
        Ok(Interval { degree, tt, dt }.trim())
    }

    pub fn ev0(&self) -> Cv {
        self.tt_at(0)
    }

    pub fn ev1(&self) -> Result<Cv> {
        let mut out = Cv::zero(self.degree);
        for c in &self.tt {
            out = out.add(c)?;
        }
        Ok(out)
    }
}

/// Processing order of generators such that every differential only involves
/// generators that come earlier. Ascending degree works for chain algebras
/// and for minimal cochain algebras; general cochain algebras get a
/// topological sort of the dependency graph.
pub fn generator_order(a: &QuasiFreeAlgebra) -> Result<Vec<usize>> {
    let n = a.alg.space.len();
    let mut deps: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let dv = a.d_gen(i)?;
        let mut d = Vec::new();
        for (m, _) in dv.terms() {
            if let Monomial::Word(w) = m {
                for g in w {
                    if !d.contains(&(*g as usize)) {
                        d.push(*g as usize);
                    }
                }
            }
        }
        deps.push(d);
    }
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    loop {
        let before = order.len();
        for i in 0..n {
            if !done[i] && deps[i].iter().all(|&j| done[j]) {
                done[i] = true;
                order.push(i);
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        if order.len() == before {
            return Err(Error::Degree(
                "differential dependency graph has a cycle".into(),
            ));
        }
    }
}

/// Homotopy h: A → B⊗Λ(t,dt) in normal form: the base morphism α_0 plus the
/// β_i on generators; α_{i≥1} are derived and stored for verification.
#[derive(Clone)]
pub struct Homotopy {
    pub source: QuasiFreeAlgebra,
    pub target: Target,
    table: Arc<TableAlgebra>,
    alpha0: Vec<Cv>,
    /// betas[g][i] = β_i(v_g), in the convention of the recursion
    /// −(i+1)α_{i+1} = dβ_i + β_i d.
    betas: Vec<Vec<Cv>>,
    /// alphas[g][i] = α_{i+1}(v_g), derived.
    alphas: Vec<Vec<Cv>>,
    order: Vec<usize>,
    gen_values: Vec<Interval>,
    /// Generators whose differential leaves the certified window: their α
    /// cannot be derived and their chain condition cannot be checked. The
    /// data on them rides along unverified, mirroring how quasi-free
    /// algebras carry truncated top-degree differentials.
    edge: Vec<bool>,
}

impl std::fmt::Debug for Homotopy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Homotopy({} gens, max beta index {})",
            self.source.alg.space.len(),
            self.betas.iter().map(|b| b.len()).max().unwrap_or(0)
        )
    }
}

impl Homotopy {
    /// Assemble from a base morphism and per-generator β families. β entries
    /// are coordinate vectors in the target; betas[g][i] must have the degree
    /// of v_g − shift (one above for chains, one below for cochains).
    pub fn new(base: &Morphism, betas: Vec<Vec<Cv>>) -> Result<Homotopy> {
        let source = base.source.clone();
        let target = base.target.clone();
        let table = target.table()?;
        let n = source.alg.space.len();
        if betas.len() != n {
            return Err(Error::Dimension(format!(
                "β data covers {} of {} generators",
                betas.len(),
                n
            )));
        }
        let shift = source.shift();
        for (g, bg) in betas.iter().enumerate() {
            let want = source.alg.space.degree_of(g) - shift;
            for b in bg {
                if !b.is_zero() && b.degree != want {
                    return Err(Error::Degree(format!(
                        "β on {} has degree {}, expected {}",
                        source.alg.space.gen(g).name,
                        b.degree,
                        want
                    )));
                }
            }
        }
        let order = generator_order(&source)?;
        let mut h = Homotopy {
            source,
            target,
            table,
            alpha0: base.images().to_vec(),
            betas,
            alphas: vec![Vec::new(); n],
            order,
            gen_values: vec![Interval::zero(0); n],
            edge: vec![false; n],
        };
        h.derive()?;
        Ok(h)
    }

    /// Constant homotopy at a morphism.
    pub fn constant(base: &Morphism) -> Result<Homotopy> {
        let n = base.source.alg.space.len();
        Homotopy::new(base, vec![Vec::new(); n])
    }

    /// Raw constructor that stores the given α and β families without
    /// re-deriving the recursion; verify() will report any inconsistency.
    pub fn from_parts_unchecked(
        base: &Morphism,
        betas: Vec<Vec<Cv>>,
        alphas: Vec<Vec<Cv>>,
    ) -> Result<Homotopy> {
        let source = base.source.clone();
        let target = base.target.clone();
        let table = target.table()?;
        let order = generator_order(&source)?;
        let n = source.alg.space.len();
        let shift = source.shift();
        let cutoff = source.cutoff.min(table.cutoff);
        let edge = (0..n)
            .map(|g| source.alg.space.degree_of(g) + shift > cutoff)
            .collect();
        let mut h = Homotopy {
            source,
            target,
            table,
            alpha0: base.images().to_vec(),
            betas,
            alphas,
            order,
            gen_values: vec![Interval::zero(0); n],
            edge,
        };
        h.refresh_gen_values()?;
        Ok(h)
    }

    fn beta_component(&self, g: usize, i: usize) -> Cv {
        let shift = self.source.shift();
        let want = self.source.alg.space.degree_of(g) - shift;
        self.betas[g]
            .get(i)
            .cloned()
            .unwrap_or(Cv::zero(want))
    }

    /// Interval value on one generator, from the stored α/β families. The
    /// stored β is in the recursion convention; the t^i dt-component of h(v)
    /// is (−1)^{|v|} β_i(v).
    fn gen_interval(&self, g: usize) -> Result<Interval> {
        let deg = self.source.alg.space.degree_of(g);
        let mut tt = vec![self.alpha0[g].clone()];
        for a in &self.alphas[g] {
            tt.push(a.clone());
        }
        let sg = sign_pow(deg as i64);
        let dt = self
            .betas[g]
            .iter()
            .map(|b| b.scale(&sg))
            .collect();
        Ok(Interval { degree: deg, tt, dt }.trim())
    }

    fn refresh_gen_values(&mut self) -> Result<()> {
        for g in 0..self.source.alg.space.len() {
            self.gen_values[g] = self.gen_interval(g)?;
        }
        Ok(())
    }

    /// Derive all α_{i≥1} from the recursion, in dependency order. A
    /// generator whose differential leaves the certified window is marked
    /// as an edge generator and keeps α_{i≥1} = 0.
    fn derive(&mut self) -> Result<()> {
        let order = self.order.clone();
        let window = self.source.cutoff.min(self.table.cutoff);
        for &g in &order {
            let deg = self.source.alg.space.degree_of(g);
            if deg + self.source.shift() > window {
                self.edge[g] = true;
                self.gen_values[g] = self.gen_interval(g)?;
                continue;
            }
            let dv = self.source.d_gen(g)?;
            let hdv = self.eval_partial(&dv)?;
            let bound = self.betas[g].len().max(hdv.dt.len());
            let mut alphas: Vec<Cv> = Vec::new();
            let sdv = sign_pow(dv.degree as i64);
            for i in 0..bound {
                // β_i(dv) = (−1)^{|dv|}·[h(dv)]_{t^i dt}
                let beta_on_dv = hdv.dt_at(i, &self.table).scale(&sdv);
                let dbeta = self.table.d_cv(&self.beta_component(g, i));
                let mut a = dbeta
                    .add(&beta_on_dv)?
                    .scale(&(-qi(1) / qi((i + 1) as i64)));
                a.degree = deg;
                alphas.push(a);
            }
            while alphas.last().map(Cv::is_zero).unwrap_or(false) {
                alphas.pop();
            }
            self.alphas[g] = alphas;
            self.gen_values[g] = self.gen_interval(g)?;
        }
        Ok(())
    }

    fn eval_label(&self, label: &Label) -> Result<Interval> {
        match label {
            Label::Unit => Ok(Interval::from_cv(self.table.unit_cv()?)),
            Label::Gen(i) => Ok(self.gen_values[*i].clone()),
            Label::Word(w) => {
                let mut it = w.iter();
                let first = *it.next().expect("nonempty word");
                let mut acc = self.gen_values[first].clone();
                for &i in it {
                    acc = acc.mul(&self.gen_values[i], &self.table)?;
                }
                Ok(acc)
            }
            Label::Bracket(l, r) => {
                let a = self.eval_label(l)?;
                let b = self.eval_label(r)?;
                // the table product of a Lie algebra is already the bracket
                a.mul(&b, &self.table)
            }
        }
    }

    fn eval_partial(&self, x: &AlgebraElement) -> Result<Interval> {
        if x.is_zero() {
            return Ok(Interval::zero(x.degree));
        }
        let data = self.source.alg.degree_data(x.degree);
        let coords = self.source.alg.express(x)?;
        let mut out = Interval::zero(x.degree);
        for (b, c) in data.basis.iter().zip(coords.iter()) {
            if is_zero(c) {
                continue;
            }
            out = out.add(&self.eval_label(&b.label)?.scale(c))?;
        }
        Ok(out)
    }

    /// The multiplicative evaluation of h on any source element.
    pub fn eval(&self, x: &AlgebraElement) -> Result<Interval> {
        self.eval_partial(x)
    }

    /// β_i applied to an arbitrary element, in the recursion convention:
    /// β_i(x) = (−1)^{|x|}·[h(x)]_{t^i dt}.
    pub fn beta_on(&self, x: &AlgebraElement, i: usize) -> Result<Cv> {
        let hx = self.eval(x)?;
        Ok(hx.dt_at(i, &self.table).scale(&sign_pow(x.degree as i64)))
    }

    pub fn max_beta_index(&self) -> usize {
        self.betas.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    pub fn beta(&self, g: usize, i: usize) -> Cv {
        self.beta_component(g, i)
    }

    pub fn alpha(&self, g: usize, i: usize) -> Cv {
        if i == 0 {
            return self.alpha0[g].clone();
        }
        self.alphas[g]
            .get(i - 1)
            .cloned()
            .unwrap_or(Cv::zero(self.source.alg.space.degree_of(g)))
    }

    /// (f, g) = (ev_0 ∘ h, ev_1 ∘ h), both validated as morphisms.
    pub fn endpoints(&self) -> Result<(Morphism, Morphism)> {
        let f = Morphism::new(
            self.source.clone(),
            self.target.clone(),
            self.alpha0.clone(),
        )
        .map_err(|e| Error::MalformedHomotopy {
            generator: "ev_0".into(),
            detail: e.to_string(),
        })?;
        let mut images = Vec::new();
        for g in 0..self.source.alg.space.len() {
            images.push(self.gen_values[g].ev1()?);
        }
        let gmor = Morphism::new(self.source.clone(), self.target.clone(), images).map_err(|e| {
            Error::MalformedHomotopy {
                generator: "ev_1".into(),
                detail: e.to_string(),
            }
        })?;
        Ok((f, gmor))
    }

    /// Full check that h is a chain algebra map: on every generator,
    /// d(h v) = h(d v) exactly, the stored α satisfy the recursion, and α_0
    /// is a chain map. Returns the failing generators with details.
    pub fn verify(&self) -> VerifyReport {
        let mut failures = Vec::new();
        for g in 0..self.source.alg.space.len() {
            if self.edge[g] {
                continue;
            }
            let name = self.source.alg.space.gen(g).name.clone();
            let check = || -> Result<Option<String>> {
                let dv = self.source.d_gen(g)?;
                let hv = self.gen_values[g].clone();
                let lhs = hv.d(&self.table)?;
                let rhs = self.eval(&dv)?;
                if lhs != rhs {
                    return Ok(Some("d(h v) ≠ h(d v)".into()));
                }
                // recursion identity on stored data
                let hdv = self.eval(&dv)?;
                let sdv = sign_pow(dv.degree as i64);
                let bound = self.betas[g].len().max(hdv.dt.len()).max(self.alphas[g].len());
                for i in 0..bound {
                    let beta_on_dv = hdv.dt_at(i, &self.table).scale(&sdv);
                    let dbeta = self.table.d_cv(&self.beta_component(g, i));
                    let mut rhs = dbeta.add(&beta_on_dv)?.scale(&qi(-1));
                    rhs.degree = self.source.alg.space.degree_of(g);
                    let lhs = self.alpha(g, i + 1).scale(&qi((i + 1) as i64));
                    if lhs.v != rhs.v {
                        return Ok(Some(format!(
                            "recursion −({})α_{} = dβ_{} + β_{}d fails",
                            i + 1,
                            i + 1,
                            i,
                            i
                        )));
                    }
                }
                Ok(None)
            };
            match check() {
                Ok(None) => {}
                Ok(Some(detail)) => failures.push((name, detail)),
                Err(e) => failures.push((name, e.to_string())),
            }
        }
        VerifyReport { failures }
    }

    /// Restriction to the truncation of the source at degree n.
    pub fn restrict(&self, n: i32) -> Result<Homotopy> {
        let sub = self.source.truncate(n)?;
        let kept = sub.alg.space.len();
        let base = Morphism::new(sub, self.target.clone(), self.alpha0[..kept].to_vec())?;
        Homotopy::new(&base, self.betas[..kept].to_vec())
    }

    /// Mutates one β coefficient without re-deriving; testing hook for
    /// verification failure paths.
    pub fn corrupt_beta_for_tests(&mut self, g: usize, i: usize, delta: &Scalar) {
        while self.betas[g].len() <= i {
            let want = self.source.alg.space.degree_of(g) - self.source.shift();
            self.betas[g].push(Cv::zero(want));
        }
        let want = self.betas[g][i].degree;
        let bump = Cv {
            degree: want,
            v: vec![(0, delta.clone())],
        };
        self.betas[g][i] = self.betas[g][i].add(&bump).unwrap();
        let _ = self.refresh_gen_values();
    }

    /// Degreewise span check: do all α and β values on generators of the
    /// truncation A_n stay inside the subspace spanned by A_n's basis?
    pub fn lands_in_truncation(&self, n: i32) -> Result<bool> {
        let Target::Free(b) = &self.target else {
            return Err(Error::Precondition(
                "truncation containment needs a quasi-free target".into(),
            ));
        };
        let kept = b.alg.space.truncate(n).len();
        for g in 0..self.source.alg.space.len() {
            let iv = &self.gen_values[g];
            for c in iv.tt.iter().chain(iv.dt.iter()) {
                if c.is_zero() {
                    continue;
                }
                let data = b.alg.degree_data(c.degree);
                for (i, _) in &c.v {
                    if label_max_gen(&data.basis[*i].label).map(|m| m >= kept).unwrap_or(false) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

fn label_max_gen(label: &Label) -> Option<usize> {
    match label {
        Label::Unit => None,
        Label::Gen(i) => Some(*i),
        Label::Word(w) => w.iter().cloned().max(),
        Label::Bracket(l, r) => match (label_max_gen(l), label_max_gen(r)) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (Some(a), None) => Some(a),
            (None, b) => b,
        },
    }
}

pub struct VerifyReport {
    pub failures: Vec<(String, String)>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Per-generator record of an extension step: the solve's kernel dimension
/// reports the "+ ker d" freedom in the chosen representative.
#[derive(Debug, Clone)]
pub struct ExtensionStep {
    pub generator: String,
    pub degree: i32,
    pub kernel_dim: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ExtensionReport {
    pub steps: Vec<ExtensionStep>,
}

fn solve_in_target(
    table: &TableAlgebra,
    rhs: &Cv,
    z_degree: i32,
) -> Result<(Option<Cv>, usize)> {
    let m = table.d_matrix(z_degree);
    let e = Echelon::new(&m);
    let kernel_dim = m.cols - e.rank();
    match e.solve(&rhs.v) {
        None => Ok((None, kernel_dim)),
        Some(x) => Ok((
            Some(Cv {
                degree: z_degree,
                v: crate::exactlin::sparse_from_dense(&x),
            }),
            kernel_dim,
        )),
    }
}

fn obstruction_error(
    table: &TableAlgebra,
    generator: &str,
    cocycle: &Cv,
) -> Error {
    let homology_dim = table.betti(cocycle.degree).unwrap_or(0);
    Error::Obstruction(Box::new(Obstruction {
        generator: generator.to_string(),
        degree: cocycle.degree,
        cocycle: table.labelled_terms(cocycle),
        homology_dim,
    }))
}

/// Extend a homotopy on a truncation to a larger truncation with prescribed
/// endpoint extensions, one generator at a time: for each new generator v,
/// solve d z = g(v) − f(v) + Σ β_i(dv)/(i+1) and set β_0(v) = z.
pub fn extend_homotopy(
    h: &Homotopy,
    f_next: &Morphism,
    g_next: &Morphism,
) -> Result<(Homotopy, ExtensionReport)> {
    if !f_next.source.eq(&g_next.source) {
        return Err(Error::Precondition(
            "endpoint extensions live on different algebras".into(),
        ));
    }
    if !f_next.target.same_as(&g_next.target) || !f_next.target.same_as(&h.target) {
        return Err(Error::Precondition("targets differ".into()));
    }
    let big = &f_next.source;
    if !big.extends(&h.source) {
        return Err(Error::Precondition(
            "the homotopy's source is not a truncation of the extension source".into(),
        ));
    }
    if big.alg.flavor.direction == Direction::Cochain && !big.is_minimal() {
        return Err(Error::Precondition(
            "cochain homotopy extension needs a minimal source".into(),
        ));
    }
    let old = h.source.alg.space.len();
    let (f_old, g_old) = h.endpoints()?;
    for g in 0..old {
        if f_next.image_cv(g) != f_old.image_cv(g) {
            return Err(Error::Precondition(format!(
                "f does not restrict to ev_0 of the homotopy at generator {}",
                big.alg.space.gen(g).name
            )));
        }
        if g_next.image_cv(g) != g_old.image_cv(g) {
            return Err(Error::Precondition(format!(
                "g does not restrict to ev_1 of the homotopy at generator {}",
                big.alg.space.gen(g).name
            )));
        }
    }
    let table = h.target.table()?;
    let shift = big.shift();
    let mut betas = h.betas.clone();
    let mut report = ExtensionReport::default();
    // working copy extended one generator at a time
    let mut work = {
        let base = Morphism::new(
            big.clone(),
            h.target.clone(),
            f_next.images().to_vec(),
        )?;
        let mut bs = betas.clone();
        bs.resize(big.alg.space.len(), Vec::new());
        Homotopy::new(&base, bs)?
    };
    for g in old..big.alg.space.len() {
        let name = big.alg.space.gen(g).name.clone();
        let vdeg = big.alg.space.degree_of(g);
        let dv = big.d_gen(g)?;
        let mut cocycle = g_next.image_cv(g).sub(f_next.image_cv(g))?;
        cocycle.degree = vdeg;
        let hdv = work.eval(&dv)?;
        let sdv = sign_pow(dv.degree as i64);
        for i in 0..hdv.dt.len() {
            let beta_on_dv = hdv.dt_at(i, &table).scale(&sdv);
            let mut t = beta_on_dv.scale(&(qi(1) / qi((i + 1) as i64)));
            t.degree = vdeg;
            cocycle = cocycle.add(&t)?;
        }
        // the cocycle must be closed when the hypotheses hold
        let dc = table.d_cv(&cocycle);
        if !dc.is_zero() {
            return Err(Error::BugClass(format!(
                "obstruction for {} is not closed",
                name
            )));
        }
        let (z, kernel_dim) = solve_in_target(&table, &cocycle, vdeg - shift)?;
        let Some(z) = z else {
            return Err(obstruction_error(&table, &name, &cocycle));
        };
        report.steps.push(ExtensionStep {
            generator: name,
            degree: vdeg,
            kernel_dim,
        });
        // β_0(v) = −z makes ev_1 come out at g: with dz = g−f+Σβ_i(dv)/(i+1)
        // the endpoint identity reads ev_1(v) = f(v) − dβ_0(v) − Σβ_i(dv)/(i+1)
        betas.push(vec![z.scale(&qi(-1))]);
        // rebuild the working homotopy including the new generator
        let partial_base = Morphism::new(
            big.clone(),
            h.target.clone(),
            f_next.images().to_vec(),
        )?;
        let mut bs = betas.clone();
        bs.resize(big.alg.space.len(), Vec::new());
        work = Homotopy::new(&partial_base, bs)?;
    }
    let base = Morphism::new(big.clone(), h.target.clone(), f_next.images().to_vec())?;
    let out = Homotopy::new(&base, betas)?;
    let (_, g_derived) = out.endpoints()?;
    for g in 0..big.alg.space.len() {
        if g_derived.image_cv(g).v != g_next.image_cv(g).v {
            return Err(Error::BugClass(format!(
                "extended homotopy does not end at the requested map at generator {}",
                big.alg.space.gen(g).name
            )));
        }
    }
    Ok((out, report))
}

/// Extend a morphism along a truncation inclusion: for each new generator v
/// solve d b = f(d v). The target and its homology hypotheses decide
/// solvability; failures carry the exact obstruction cocycle.
pub fn extend_map(f: &Morphism, bigger: &QuasiFreeAlgebra) -> Result<(Morphism, ExtensionReport)> {
    if !bigger.extends(&f.source) {
        return Err(Error::Precondition(
            "extension source does not extend the morphism's source".into(),
        ));
    }
    if bigger.alg.flavor.direction == Direction::Cochain && !bigger.is_minimal() {
        return Err(Error::Precondition(
            "cochain map extension needs a minimal source".into(),
        ));
    }
    let table = f.target.table()?;
    let mut images = f.images().to_vec();
    let mut report = ExtensionReport::default();
    for g in f.source.alg.space.len()..bigger.alg.space.len() {
        let name = bigger.alg.space.gen(g).name.clone();
        let vdeg = bigger.alg.space.degree_of(g);
        let dv = bigger.d_gen(g)?;
        // partial morphism on the subalgebra generated so far
        let partial = Morphism::new(
            bigger.truncate_to_len(g)?,
            f.target.clone(),
            images.clone(),
        )?;
        let mut rhs = partial.apply_cv(&dv)?;
        rhs.degree = vdeg + bigger.shift();
        let dc = table.d_cv(&rhs);
        if !dc.is_zero() {
            return Err(Error::BugClass(format!(
                "f(dv) is not closed at generator {}",
                name
            )));
        }
        let (b, kernel_dim) = solve_in_target(&table, &rhs, vdeg)?;
        let Some(b) = b else {
            return Err(obstruction_error(&table, &name, &rhs));
        };
        report.steps.push(ExtensionStep {
            generator: name,
            degree: vdeg,
            kernel_dim,
        });
        images.push(b);
    }
    let out = Morphism::new(bigger.clone(), f.target.clone(), images)?;
    Ok((out, report))
}

/// Three-valued homotopy decision with certificate.
#[derive(Debug)]
pub enum Decision {
    Homotopic(Box<Homotopy>),
    Distinct(String),
    Unknown(String),
}

#[derive(Debug, Clone, Default)]
pub struct HomotopicOptions {
    /// Claimed concentration degree of H(target); inferred within the
    /// certified window when absent, and checked when present.
    pub concentration: Option<i32>,
}

/// Decide whether two maps are homotopic. Sound in all three branches:
/// a certificate for yes, a homology invariant for no, and an explicit
/// Unknown when the greedy obstruction run leaves the decidable regime.
pub fn homotopic(f: &Morphism, g: &Morphism, opts: &HomotopicOptions) -> Result<Decision> {
    if f.source != g.source {
        return Err(Error::Precondition("sources differ".into()));
    }
    if !f.target.same_as(&g.target) {
        return Err(Error::Precondition("targets differ".into()));
    }
    if !f.source.is_minimal() {
        return Err(Error::Precondition(
            "homotopy decision needs a minimal source".into(),
        ));
    }
    let table = f.target.table()?;
    let window = table.cutoff - 1;
    // homology concentration of the target within the certified window
    let mut top_nonzero: Option<i32> = None;
    for q in 0..=window {
        if table.betti(q)? > 0 {
            top_nonzero = Some(q);
        }
    }
    if let Some(n) = opts.concentration {
        if let Some(t) = top_nonzero {
            if t > n {
                return Err(Error::Hypothesis(format!(
                    "H(target) is nonzero in degree {} > claimed concentration {}",
                    t, n
                )));
            }
        }
    }
    if f.images() == g.images() {
        return Ok(Decision::Homotopic(Box::new(Homotopy::constant(f)?)));
    }
    // induced maps on homology are homotopy invariants
    let swindow = (f.source.cutoff - 1).min(window);
    for q in 0..=swindow {
        let mf = f.homology_action(q)?;
        let mg = g.homology_action(q)?;
        if mf != mg {
            return Ok(Decision::Distinct(format!(
                "H^{} invariant differs",
                q
            )));
        }
    }
    // greedy certificate construction from the bottom generator degree up
    let order = generator_order(&f.source)?;
    let shift = f.source.shift();
    let bottom = f.source.alg.space.min_degree();
    let mut betas: Vec<Vec<Cv>> = vec![Vec::new(); f.source.alg.space.len()];
    let mut work = Homotopy::new(f, betas.clone())?;
    for &gidx in &order {
        let name = f.source.alg.space.gen(gidx).name.clone();
        let vdeg = f.source.alg.space.degree_of(gidx);
        let dv = f.source.d_gen(gidx)?;
        let mut cocycle = g.image_cv(gidx).sub(f.image_cv(gidx))?;
        cocycle.degree = vdeg;
        let hdv = work.eval(&dv)?;
        let sdv = sign_pow(dv.degree as i64);
        for i in 0..hdv.dt.len() {
            let mut t = hdv
                .dt_at(i, &table)
                .scale(&(sdv.clone() / qi((i + 1) as i64)));
            t.degree = vdeg;
            cocycle = cocycle.add(&t)?;
        }
        if !table.d_cv(&cocycle).is_zero() {
            return Err(Error::BugClass(format!(
                "homotopy obstruction for {} is not closed",
                name
            )));
        }
        let (z, _) = solve_in_target(&table, &cocycle, vdeg - shift)?;
        match z {
            Some(z) => {
                betas[gidx] = vec![z.scale(&qi(-1))];
                work = Homotopy::new(f, betas.clone())?;
            }
            None => {
                let hdim = if vdeg <= window { table.betti(vdeg)? } else { 0 };
                if Some(vdeg) == bottom {
                    return Ok(Decision::Distinct(format!(
                        "bottom-degree invariant differs at generator {} (class in H^{})",
                        name, vdeg
                    )));
                }
                if vdeg > window {
                    return Ok(Decision::Unknown(format!(
                        "obstruction at generator {} in degree {} beyond the certified window",
                        name, vdeg
                    )));
                }
                if hdim == 0 {
                    return Err(Error::BugClass(format!(
                        "unsolvable obstruction at {} although H^{} = 0",
                        name, vdeg
                    )));
                }
                return Ok(Decision::Unknown(format!(
                    "obstruction at generator {} meets H^{} of dimension {}; earlier choices may resolve it",
                    name, vdeg, hdim
                )));
            }
        }
    }
    let (e0, e1) = work.endpoints()?;
    if !e0.equal(f) || e1.images() != g.images() {
        return Err(Error::BugClass(
            "constructed homotopy has wrong endpoints".into(),
        ));
    }
    let report = work.verify();
    if !report.ok() {
        return Err(Error::BugClass(format!(
            "constructed homotopy fails verification at {}",
            report.failures[0].0
        )));
    }
    Ok(Decision::Homotopic(Box::new(work)))
}

/// Invert an isomorphism of quasi-free algebras by solving the generator
/// equations degreewise; errors when any degree block is not bijective.
pub fn invert_morphism(f: &Morphism) -> Result<Morphism> {
    let Target::Free(b) = &f.target else {
        return Err(Error::Precondition(
            "only morphisms into quasi-free algebras can be inverted".into(),
        ));
    };
    let mut images = Vec::new();
    for i in 0..b.alg.space.len() {
        let m = b.alg.space.degree_of(i);
        let mat = f.matrix_at(m)?;
        if mat.rows != mat.cols {
            return Err(Error::Precondition(format!(
                "degree-{} components have different dimensions",
                m
            )));
        }
        let e = Echelon::new(&mat);
        if e.rank() != mat.cols {
            return Err(Error::Precondition(format!(
                "not an isomorphism: degree-{} block is singular",
                m
            )));
        }
        let w = b.express_cv(&b.alg.generator(i))?;
        let x = e.solve(&w.v).ok_or_else(|| {
            Error::Precondition(format!("generator {} has no preimage", b.alg.space.gen(i).name))
        })?;
        images.push(Cv {
            degree: m,
            v: crate::exactlin::sparse_from_dense(&x),
        });
    }
    let g = Morphism::new(b.clone(), Target::Free(f.source.clone()), images)?;
    // two-sided check on generators
    let gf = Morphism::compose(&g, f)?;
    let fg = Morphism::compose(f, &g)?;
    let id_a = Morphism::identity(&f.source)?;
    let id_b = Morphism::identity(b)?;
    if !gf.equal(&id_a) || !fg.equal(&id_b) {
        return Err(Error::Precondition(
            "inverse candidate fails the two-sided identity check".into(),
        ));
    }
    Ok(g)
}

/// Inclusion of a truncation into a larger quasi-free algebra.
pub fn inclusion(small: &QuasiFreeAlgebra, big: &QuasiFreeAlgebra) -> Result<Morphism> {
    if !big.extends(small) {
        return Err(Error::Precondition(
            "inclusion needs a truncation pair".into(),
        ));
    }
    let images = (0..small.alg.space.len())
        .map(|i| big.express_cv(&big.alg.generator(i)))
        .collect::<Result<Vec<Cv>>>()?;
    Morphism::new(small.clone(), Target::Free(big.clone()), images)
}

/// Extend an automorphism of A_n to an automorphism of A_{n+k}, with its
/// inverse as a witness. Under the concentration hypotheses every extension
/// of an isomorphism is an isomorphism; a failed inversion here is a
/// contradiction, not a user error.
pub fn extend_iso(f: &Morphism, bigger: &QuasiFreeAlgebra) -> Result<(Morphism, Morphism)> {
    let Target::Free(tgt) = &f.target else {
        return Err(Error::Precondition("extension needs a quasi-free target".into()));
    };
    if tgt != &f.source {
        return Err(Error::Precondition(
            "isomorphism extension expects an endomorphism".into(),
        ));
    }
    invert_morphism(f).map_err(|e| {
        Error::Precondition(format!("input is not an isomorphism: {}", e))
    })?;
    let incl = inclusion(&f.source, bigger)?;
    let f_into_big = Morphism::compose(&incl, f)?;
    let (ext, _) = extend_map(&f_into_big, bigger)?;
    let inv = invert_morphism(&ext)
        .map_err(|e| Error::BugClass(format!("extension of an isomorphism failed to invert: {}", e)))?;
    Ok((ext, inv))
}

/// The sparseness gate for identifying homotopy classes of self-maps of a
/// truncation with classes in the ambient algebra: chain algebras need
/// sparse generation, cochain algebras minimality.
pub fn selfmap_identification_allowed(a: &QuasiFreeAlgebra) -> Result<()> {
    match a.alg.flavor.direction {
        Direction::Cochain => {
            if a.is_minimal() {
                Ok(())
            } else {
                Err(Error::Precondition(
                    "cochain self-map identification needs a minimal algebra".into(),
                ))
            }
        }
        Direction::Chain => {
            if a.is_sparsely_generated() {
                Ok(())
            } else {
                let ds = a.alg.space.degrees();
                let bad = ds
                    .windows(2)
                    .find(|w| w[1] - w[0] < 2)
                    .map(|w| (w[0], w[1]))
                    .unwrap_or((0, 0));
                Err(Error::Precondition(format!(
                    "chain self-map identification needs sparse generation; generators in consecutive degrees {} and {}",
                    bad.0, bad.1
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::scalar::q;

    #[test]
    fn constant_homotopy_is_valid() {
        let a = models::cp_lie_model(2, 8).unwrap();
        let f = models::lambda_endo(&a, &q(2, 1)).unwrap();
        let h = Homotopy::constant(&f).unwrap();
        assert!(h.verify().ok());
        let (e0, e1) = h.endpoints().unwrap();
        assert!(e0.equal(&f));
        assert!(e1.equal(&f));
    }

    #[test]
    fn sullivan_loop_homotopy_has_equal_endpoints() {
        // Λ(u,v), dv = u³, f = id, β_0(v) = u²: dβ_0(v) = 0 and β_0(dv) = 0,
        // so all higher α vanish and both endpoints are the identity.
        let a = models::cp2_sullivan(8).unwrap();
        let id = Morphism::identity(&a).unwrap();
        let u = a.alg.generator_by_name("u").unwrap();
        let uu = a.alg.multiply(&u, &u).unwrap();
        let uu_cv = a.express_cv(&uu).unwrap();
        let betas = vec![Vec::new(), vec![uu_cv]];
        let h = Homotopy::new(&id, betas).unwrap();
        assert!(h.verify().ok());
        let (e0, e1) = h.endpoints().unwrap();
        assert!(e0.equal(&id));
        assert!(e1.equal(&id));
    }

    #[test]
    fn random_betas_always_assemble_to_homotopies() {
        // arbitrary β families over a valid base morphism define a homotopy
        let a = models::cp_lie_model(3, 9).unwrap();
        let f = models::lambda_endo(&a, &q(1, 2)).unwrap();
        let t = a.tabulate().unwrap();
        let mut state: u64 = 7;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..12 {
            let mut betas: Vec<Vec<Cv>> = Vec::new();
            for g in 0..a.alg.space.len() {
                let want = a.alg.space.degree_of(g) + 1;
                let dim = t.dim(want);
                let mut family = Vec::new();
                for _ in 0..(next() % 3) {
                    let mut v: Vec<(usize, Scalar)> = Vec::new();
                    for k in 0..dim {
                        let c = (next() % 5) as i64 - 2;
                        if c != 0 {
                            v.push((k, qi(c)));
                        }
                    }
                    family.push(Cv { degree: want, v });
                }
                betas.push(family);
            }
            let h = Homotopy::new(&f, betas).unwrap();
            let rep = h.verify();
            assert!(
                rep.ok(),
                "trial {}: homotopy failed verification at {:?}",
                trial,
                rep.failures.first()
            );
            let (e0, e1) = h.endpoints().unwrap();
            assert!(e0.equal(&f));
            // recursion identity spot check for the stored data
            for g in 0..a.alg.space.len() {
                let dv = a.d_gen(g).unwrap();
                for i in 0..h.max_beta_index() + 1 {
                    let lhs = h.alpha(g, i + 1).scale(&qi(-((i + 1) as i64)));
                    let rhs = t
                        .d_cv(&h.beta(g, i))
                        .add(&h.beta_on(&dv, i).unwrap())
                        .unwrap();
                    assert_eq!(lhs.v, rhs.v, "recursion at gen {} index {}", g, i);
                }
            }
            let _ = e1;
        }
    }

    #[test]
    fn corrupting_a_beta_breaks_verification() {
        // Corrupt β_0(x3) in a direction that is not d-closed (index 0 of
        // degree 6 is [x1,x3] with d[x1,x3] ≠ 0); perturbing by a cycle
        // would just produce another valid homotopy.
        let a = models::cp_lie_model(3, 9).unwrap();
        let f = models::lambda_endo(&a, &q(2, 1)).unwrap();
        let h = Homotopy::constant(&f).unwrap();
        assert!(h.verify().ok());
        let mut bad = h.clone();
        bad.corrupt_beta_for_tests(2, 0, &qi(1));
        let rep = bad.verify();
        assert!(!rep.ok());
        assert_eq!(rep.failures[0].0, "x3", "violated generator is named");
    }

    #[test]
    fn extend_map_forces_lambda_square() {
        // x1 ↦ λx1 on A_1 extends uniquely to x2 ↦ λ²x2 on A_3
        let a3 = models::cp_lie_model(2, 8).unwrap();
        let a1 = a3.truncate(1).unwrap();
        let lam = q(5, 3);
        let f1 = Morphism::from_elements(
            a1.clone(),
            a3.clone(),
            vec![a3.alg.generator_by_name("x1").unwrap().scale(&lam)],
        )
        .unwrap();
        let (f3, report) = extend_map(&f1, &a3).unwrap();
        let expected = models::lambda_endo(&a3, &lam).unwrap();
        assert!(f3.equal(&expected));
        assert_eq!(report.steps.len(), 1);
        assert_eq!(report.steps[0].kernel_dim, 0, "the solve is unique");
    }

    #[test]
    fn extend_map_into_bigger_model_reports_freedom() {
        // a λ-map of the CP² model into the CP³ model extends with
        // x3 ↦ λ³x3 + ker d; the canonical solve picks λ³x3 on the nose
        let b = models::cp_lie_model(3, 9).unwrap();
        let a2 = b.truncate(4).unwrap();
        let lam = qi(2);
        let f = Morphism::from_elements(
            a2.clone(),
            b.clone(),
            vec![
                b.alg.generator_by_name("x1").unwrap().scale(&lam),
                b.alg.generator_by_name("x2").unwrap().scale(&(&lam * &lam)),
            ],
        )
        .unwrap();
        let (ext, report) = extend_map(&f, &b).unwrap();
        let expected = models::lambda_endo(&b, &lam).unwrap();
        assert!(ext.equal(&expected), "minimal-support choice is λ³x3");
        let step = &report.steps[0];
        assert_eq!(step.generator, "x3");
        assert_eq!(step.kernel_dim, 1, "one-dimensional cycle freedom");
    }

    #[test]
    fn extension_obstruction_carries_exact_cocycle() {
        // A = L(v) with |v| = 2, B = L(y) with |y| = 2: H_2(B) = Q ≠ 0 and
        // the homotopy extension between 2y and 3y meets it head on.
        let a = {
            let space =
                crate::exactlin::GradedVectorSpace::new(vec![("v".into(), 2)]).unwrap();
            QuasiFreeAlgebra::new(
                crate::freealg::Flavor::lie_chain(),
                space,
                vec![AlgebraElement::zero(1)],
                6,
            )
            .unwrap()
        };
        let b = models::sphere_lie(2, 6).unwrap();
        let y = b.alg.generator_by_name("x2").unwrap();
        let f = Morphism::from_elements(a.clone(), b.clone(), vec![y.scale(&qi(2))]).unwrap();
        let g = Morphism::from_elements(a.clone(), b.clone(), vec![y.scale(&qi(3))]).unwrap();
        let a1 = a.truncate(1).unwrap();
        let triv = Homotopy::constant(&f.restrict(1).unwrap()).unwrap();
        assert_eq!(a1.alg.space.len(), 0);
        let err = extend_homotopy(&triv, &f, &g).unwrap_err();
        match err {
            Error::Obstruction(ob) => {
                assert_eq!(ob.generator, "v");
                assert_eq!(ob.degree, 2);
                assert_eq!(ob.cocycle, vec![("x2".to_string(), qi(1))]);
                assert_eq!(ob.homology_dim, 1, "the cocycle is honestly nonbounding");
            }
            other => panic!("expected obstruction, got {:?}", other),
        }
    }

    #[test]
    fn extend_homotopy_restricts_back() {
        // extend the constant homotopy at f|A_3 to endpoints (f, f) on A_5
        let a = models::cp_lie_model(3, 9).unwrap();
        let f = models::lambda_endo(&a, &qi(3)).unwrap();
        let f3 = f.restrict(3).unwrap();
        let h3 = Homotopy::constant(&f3).unwrap();
        let (h5, _) = extend_homotopy(&h3, &f, &f).unwrap();
        assert!(h5.verify().ok());
        let (e0, e1) = h5.endpoints().unwrap();
        assert!(e0.equal(&f) && e1.equal(&f));
        // coefficientwise restriction
        let r = h5.restrict(3).unwrap();
        for g in 0..2 {
            assert_eq!(r.beta(g, 0), h3.beta(g, 0));
            assert_eq!(r.alpha(g, 0), h3.alpha(g, 0));
        }
    }

    #[test]
    fn homotopic_distinguishes_lambda_classes() {
        let a = models::cp_lie_model(2, 8).unwrap();
        let f = models::lambda_endo(&a, &qi(2)).unwrap();
        let g = models::lambda_endo(&a, &qi(3)).unwrap();
        match homotopic(&f, &g, &HomotopicOptions::default()).unwrap() {
            Decision::Distinct(reason) => {
                assert!(reason.contains("H^1"), "reason was {}", reason)
            }
            other => panic!("expected distinct, got {:?}", other),
        }
        match homotopic(&f, &f, &HomotopicOptions::default()).unwrap() {
            Decision::Homotopic(h) => assert!(h.verify().ok()),
            other => panic!("expected homotopic, got {:?}", other),
        }
    }

    #[test]
    fn homotopic_finds_certificate_across_kernel_choices() {
        // maps A_5(CP³ model) → CP² model with x3 sent to different cycles
        // are homotopic; the certificate needs a genuine β on x3.
        let b = models::cp_lie_model(2, 9).unwrap();
        let a = models::cp_lie_model(3, 9).unwrap();
        let x1 = b.alg.generator_by_name("x1").unwrap();
        let x2 = b.alg.generator_by_name("x2").unwrap();
        let w = b
            .alg
            .multiply(&x1, &b.alg.multiply(&x1, &x2).unwrap())
            .unwrap();
        let mk = |c: i64| {
            Morphism::from_elements(
                a.clone(),
                b.clone(),
                vec![
                    AlgebraElement::zero(1),
                    AlgebraElement::zero(3),
                    w.scale(&qi(c)),
                ],
            )
            .unwrap()
        };
        let f = mk(1);
        let g = mk(4);
        match homotopic(&f, &g, &HomotopicOptions::default()).unwrap() {
            Decision::Homotopic(h) => {
                assert!(h.verify().ok());
                assert!(!h.beta(2, 0).is_zero(), "x3 carries the correction");
            }
            other => panic!("expected homotopic, got {:?}", other),
        }
    }

    #[test]
    fn extend_iso_produces_inverse_witness() {
        let b = models::cp_lie_model(3, 9).unwrap();
        let a2 = b.truncate(4).unwrap();
        let f = models::lambda_endo(&a2, &qi(2)).unwrap();
        let (ext, inv) = extend_iso(&f, &b).unwrap();
        let both = Morphism::compose(&inv, &ext).unwrap();
        assert!(both.equal(&Morphism::identity(&b).unwrap()));
        // λ = 0 is not an isomorphism
        let zero = models::lambda_endo(&a2, &qi(0)).unwrap();
        assert!(matches!(
            extend_iso(&zero, &b),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sparseness_gate() {
        let a = models::cp_lie_model(3, 9).unwrap();
        assert!(selfmap_identification_allowed(&a).is_ok());
        let space = crate::exactlin::GradedVectorSpace::new(vec![
            ("a".into(), 2),
            ("b".into(), 3),
        ])
        .unwrap();
        let bad = QuasiFreeAlgebra::new(
            crate::freealg::Flavor::lie_chain(),
            space,
            vec![AlgebraElement::zero(1), AlgebraElement::zero(2)],
            6,
        )
        .unwrap();
        let err = selfmap_identification_allowed(&bad).unwrap_err();
        assert!(err.to_string().contains("2 and 3"), "diagnostic names the degrees");
    }

    #[test]
    fn homotopies_between_truncation_selfmaps_stay_inside() {
        // CP^∞ fixture: maps A_3 → A (ambient) produced by the engine keep
        // all their data inside A_3⊗Λ(t,dt)
        let ambient = models::cp_lie_model(4, 9).unwrap();
        let a3 = ambient.truncate(3).unwrap();
        let incl = inclusion(&a3, &ambient).unwrap();
        let lam2 = models::lambda_endo(&a3, &qi(2)).unwrap();
        let f = Morphism::compose(&incl, &lam2).unwrap();
        let g = Morphism::compose(&incl, &lam2).unwrap();
        match homotopic(&f, &g, &HomotopicOptions::default()).unwrap() {
            Decision::Homotopic(h) => {
                assert!(h.lands_in_truncation(3).unwrap());
            }
            other => panic!("expected homotopic, got {:?}", other),
        }
    }
}
