//! Finite-dimensional commutative local algebras over GF(p), algebra
//! surjections, and the fiber product `R = S ×_k T`.
//!
//! An algebra is a k-basis together with the regular representation: one
//! `d × d` matrix per basis element whose column `j` is the product
//! `a_i · a_j`. The maximal ideal is positional: every basis element except
//! the unit spans it, and construction checks that those elements are
//! nilpotent.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField, Subspace};

/// An element stored as its coefficient vector in the algebra basis.
pub type Element = Vec<u32>;

/// How an algebra was presented; kept for reports, witnesses and digests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Presentation {
    /// `k[vars] / (relations)` with monomial relations as exponent vectors.
    Monomial {
        vars: Vec<String>,
        relations: Vec<Vec<u32>>,
    },
    /// An explicit multiplication table.
    Table,
    /// A fiber product of two presented algebras.
    Fiber {
        left: Box<Presentation>,
        right: Box<Presentation>,
    },
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Presentation::Monomial { vars, relations } => {
                let rels: Vec<String> = relations
                    .iter()
                    .map(|e| monomial_label(vars, e))
                    .collect();
                write!(f, "k[{}]/({})", vars.join(","), rels.join(","))
            }
            Presentation::Table => write!(f, "table"),
            Presentation::Fiber { left, right } => write!(f, "({left}) x_k ({right})"),
        }
    }
}

/// A named algebra generator lying in the maximal ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub element: Element,
}

fn monomial_label(vars: &[String], exps: &[u32]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// A commutative local k-algebra of finite dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLocalAlgebra {
    field: PrimeField,
    labels: Vec<String>,
    unit: usize,
    mult: Vec<Matrix>,
    max_ideal: Subspace,
    max_positions: Vec<usize>,
    generators: Vec<Generator>,
    presentation: Presentation,
}

impl FiniteLocalAlgebra {
    /// `k[vars]/(relations)` for a monomial ideal containing a power of every
    /// variable. Relations are exponent vectors indexed like `vars`.
    pub fn monomial_quotient(
        field: PrimeField,
        vars: &[&str],
        relations: &[Vec<u32>],
    ) -> Result<Self> {
        let n = vars.len();
        let mut seen = std::collections::HashSet::new();
        for v in vars {
            if !seen.insert(*v) {
                return Err(Error::Argument(format!("duplicate variable `{v}`")));
            }
        }
        for r in relations {
            if r.len() != n {
                return Err(Error::Argument(format!(
                    "relation has {} exponents for {n} variables",
                    r.len()
                )));
            }
            if r.iter().all(|&e| e == 0) {
                return Err(Error::Argument(
                    "the relation 1 would make the algebra zero".into(),
                ));
            }
        }
        // smallest pure power of each variable in the ideal
        let mut bound = vec![u32::MAX; n];
        for r in relations {
            let support: Vec<usize> = (0..n).filter(|&i| r[i] > 0).collect();
            if let [i] = support[..] {
                bound[i] = bound[i].min(r[i]);
            }
        }
        if let Some(i) = bound.iter().position(|&b| b == u32::MAX) {
            return Err(Error::InfiniteDimension(vars[i].to_string()));
        }
        let divides = |r: &[u32], m: &[u32]| r.iter().zip(m).all(|(a, b)| a <= b);
        let in_ideal = |m: &[u32]| relations.iter().any(|r| divides(r, m));

        // enumerate standard monomials inside the box given by the bounds
        let mut basis: Vec<Vec<u32>> = Vec::new();
        let mut cur = vec![0u32; n];
        loop {
            if !in_ideal(&cur) {
                basis.push(cur.clone());
            }
            let mut k = 0;
            loop {
                if k == n {
                    break;
                }
                cur[k] += 1;
                if cur[k] < bound[k] {
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        basis.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let d = basis.len();
        let index: HashMap<Vec<u32>, usize> =
            basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut mult = Vec::with_capacity(d);
        for a in &basis {
            let mut m = Matrix::zeros(field, d, d);
            for (j, b) in basis.iter().enumerate() {
                let prod: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&l) = index.get(&prod) {
                    m.set(l, j, 1);
                }
            }
            mult.push(m);
        }
        let var_names: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        let labels = basis.iter().map(|m| monomial_label(&var_names, m)).collect();
        let generators = (0..n)
            .filter_map(|v| {
                let mut e = vec![0u32; n];
                e[v] = 1;
                index.get(&e).map(|&i| {
                    let mut el = vec![0u32; d];
                    el[i] = 1;
                    Generator {
                        name: vars[v].to_string(),
                        element: el,
                    }
                })
            })
            .collect();
        let max_positions: Vec<usize> = (1..d).collect();
        Ok(FiniteLocalAlgebra {
            field,
            labels,
            unit: 0,
            max_ideal: Subspace::coordinate(field, d, &max_positions),
            max_positions,
            mult,
            generators,
            presentation: Presentation::Monomial {
                vars: var_names,
                relations: relations.to_vec(),
            },
        })
    }

    /// An algebra from an explicit multiplication table: `mult[i]` is the
    /// matrix of multiplication by basis element `i`. All basis elements
    /// other than `unit` span the maximal ideal; every invariant is checked.
    pub fn from_table(
        field: PrimeField,
        labels: Vec<String>,
        unit: usize,
        mult: Vec<Matrix>,
    ) -> Result<Self> {
        let d = labels.len();
        if unit >= d || mult.len() != d {
            return Err(Error::Argument("malformed multiplication table".into()));
        }
        for m in &mult {
            if m.field() != field {
                return Err(Error::ModulusMismatch(field.modulus(), m.field().modulus()));
            }
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch("multiplication table".into()));
            }
        }
        let max_positions: Vec<usize> = (0..d).filter(|&i| i != unit).collect();
        let mut alg = FiniteLocalAlgebra {
            field,
            labels,
            unit,
            max_ideal: Subspace::coordinate(field, d, &max_positions),
            max_positions,
            mult,
            generators: Vec::new(),
            presentation: Presentation::Table,
        };
        alg.validate()?;
        alg.generators = alg.ideal_generators_from_basis();
        Ok(alg)
    }

    /// Basis elements of the maximal ideal that are independent modulo its
    /// square; by Nakayama they generate the maximal ideal.
    fn ideal_generators_from_basis(&self) -> Vec<Generator> {
        let d = self.dim();
        let sq = self.max_ideal_power(2);
        let mut acc = sq.basis().clone();
        let mut gens = Vec::new();
        for &i in &self.max_positions {
            let e = self.basis_element(i);
            let trial = acc.vstack(&Matrix::from_row_vecs(self.field, d, std::slice::from_ref(&e))).unwrap();
            if trial.rank() > acc.rank() {
                acc = trial;
                gens.push(Generator {
                    name: self.labels[i].clone(),
                    element: e,
                });
            }
        }
        gens
    }

    /// Checks every structural invariant: commutativity, associativity,
    /// unit, ideal closure, codimension one and nilpotence of the maximal
    /// ideal.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let f = self.field;
        let c = |i: usize, j: usize, l: usize| self.mult[i].get(l, j);
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    if c(i, j, l) != c(j, i, l) {
                        return Err(Error::Invariant(format!(
                            "not commutative: a{i}*a{j} != a{j}*a{i}"
                        )));
                    }
                }
            }
        }
        // (a_i a_j) a_k = a_i (a_j a_k)
        for i in 0..d {
            for j in 0..d {
                let ij = self.mult[i].column(j);
                let left = self.mult_matrix(&ij);
                let right = self.mult[i].mul(&self.mult[j]).expect("square");
                if left != right {
                    return Err(Error::Invariant(format!(
                        "not associative on basis elements {i}, {j}"
                    )));
                }
            }
        }
        if self.mult[self.unit] != Matrix::identity(f, d) {
            return Err(Error::Invariant("unit does not act as identity".into()));
        }
        if self.max_ideal.dim() + 1 != d {
            return Err(Error::Invariant("maximal ideal must have codimension 1".into()));
        }
        for &i in &self.max_positions {
            for j in 0..d {
                if self.mult[j].get(self.unit, i) != 0 {
                    return Err(Error::Invariant(format!(
                        "maximal ideal not closed under multiplication by a{j}"
                    )));
                }
            }
            // nilpotent: L^d = 0
            let mut pw = self.mult[i].clone();
            for _ in 1..d {
                pw = pw.mul(&self.mult[i]).expect("square");
            }
            if !pw.is_zero() {
                return Err(Error::Invariant(format!(
                    "basis element {} of the maximal ideal is not nilpotent",
                    self.labels[i]
                )));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    /// Matrix of multiplication by basis element `i`.
    pub fn mult_basis(&self, i: usize) -> &Matrix {
        &self.mult[i]
    }

    pub fn mult_tables(&self) -> &[Matrix] {
        &self.mult
    }

    /// Structure constant `c[i][j][l]` with `a_i a_j = Σ_l c[i][j][l] a_l`.
    pub fn structure_constant(&self, i: usize, j: usize, l: usize) -> u32 {
        self.mult[i].get(l, j)
    }

    pub fn max_ideal(&self) -> &Subspace {
        &self.max_ideal
    }

    /// Basis positions spanning the maximal ideal.
    pub fn max_positions(&self) -> &[usize] {
        &self.max_positions
    }

    /// Named generators of the maximal ideal (as an ideal).
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Embedding dimension: the number of ideal generators.
    pub fn embedding_dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, name: &str) -> Option<&Element> {
        self.generators
            .iter()
            .find(|g| g.name == name)
            .map(|g| &g.element)
    }

    pub fn zero(&self) -> Element {
        vec![0; self.dim()]
    }

    pub fn one(&self) -> Element {
        self.basis_element(self.unit)
    }

    pub fn basis_element(&self, i: usize) -> Element {
        let mut e = self.zero();
        e[i] = 1;
        e
    }

    pub fn scalar(&self, c: u32) -> Element {
        let mut e = self.zero();
        e[self.unit] = c % self.field.modulus();
        e
    }

    /// Multiplication operator `L_a` of an arbitrary element.
    pub fn mult_matrix(&self, a: &[u32]) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(self.field, d, d);
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                m.add_scaled(c, &self.mult[i]);
            }
        }
        m
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Element {
        self.mult_matrix(a).mul_vec(b)
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Element {
        a.iter().zip(b).map(|(&x, &y)| self.field.add(x, y)).collect()
    }

    pub fn scale(&self, c: u32, a: &[u32]) -> Element {
        a.iter().map(|&x| self.field.mul(c, x)).collect()
    }

    pub fn pow(&self, a: &[u32], e: u32) -> Element {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Image in the residue field (the coefficient of the unit).
    pub fn residue(&self, a: &[u32]) -> u32 {
        a[self.unit]
    }

    pub fn is_unit(&self, a: &[u32]) -> bool {
        self.residue(a) != 0
    }

    pub fn is_zero_element(&self, a: &[u32]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// True iff `L_a` is injective. On an artinian local algebra this holds
    /// exactly for units.
    pub fn is_nzd(&self, a: &[u32]) -> bool {
        self.mult_matrix(a).rank() == self.dim()
    }

    /// The subspace `𝔪^k` (with `𝔪^0 = A`).
    pub fn max_ideal_power(&self, k: u32) -> Subspace {
        if k == 0 {
            return Subspace::full(self.field, self.dim());
        }
        let mut cur = self.max_ideal.clone();
        for _ in 1..k {
            let mut vecs = Vec::new();
            for &i in &self.max_positions {
                for r in 0..cur.dim() {
                    vecs.push(self.mult[i].mul_vec(cur.vector(r)));
                }
            }
            cur = Subspace::span(self.field, self.dim(), &vecs);
        }
        cur
    }

    /// Smallest `k` with `𝔪^k = 0`.
    pub fn loewy_length(&self) -> u32 {
        let mut k = 0;
        while self.max_ideal_power(k).dim() > 0 {
            k += 1;
        }
        k
    }

    /// Depth of an artinian local ring: always 0.
    pub fn depth(&self) -> usize {
        0
    }

    /// Artinian rings are zero-dimensional, hence never discrete valuation
    /// rings.
    pub fn is_dvr(&self) -> bool {
        false
    }

    /// Whether the algebra is a field (maximal ideal zero).
    pub fn is_field(&self) -> bool {
        self.dim() == 1
    }
}

impl fmt::Display for FiniteLocalAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {} (dim {})", self.presentation, self.field, self.dim())
    }
}

/// A surjective unital algebra homomorphism given by its k-linear matrix
/// (`dim target × dim source`).
#[derive(Debug, Clone)]
pub struct AlgebraSurjection {
    source: Arc<FiniteLocalAlgebra>,
    target: Arc<FiniteLocalAlgebra>,
    matrix: Matrix,
}

impl AlgebraSurjection {
    pub fn new(
        source: Arc<FiniteLocalAlgebra>,
        target: Arc<FiniteLocalAlgebra>,
        matrix: Matrix,
    ) -> Result<Self> {
        if source.field() != target.field() {
            return Err(Error::ModulusMismatch(
                source.field().modulus(),
                target.field().modulus(),
            ));
        }
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::DimensionMismatch("surjection matrix".into()));
        }
        let s = AlgebraSurjection {
            source,
            target,
            matrix,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix.mul_vec(&self.source.one()) != self.target.one() {
            return Err(Error::Invariant("surjection is not unital".into()));
        }
        for i in 0..self.source.dim() {
            for j in 0..self.source.dim() {
                let ab = self.source.mult_basis(i).column(j);
                let lhs = self.matrix.mul_vec(&ab);
                let rhs = self
                    .target
                    .mul(&self.matrix.column(i), &self.matrix.column(j));
                if lhs != rhs {
                    return Err(Error::Invariant(format!(
                        "surjection not multiplicative on basis pair ({i}, {j})"
                    )));
                }
            }
        }
        if self.matrix.rank() != self.target.dim() {
            return Err(Error::Invariant("map is not surjective".into()));
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<FiniteLocalAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteLocalAlgebra> {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, a: &[u32]) -> Element {
        self.matrix.mul_vec(a)
    }

    pub fn kernel(&self) -> Subspace {
        self.matrix.kernel()
    }

    /// A k-linear section: for each target basis element, one preimage.
    pub fn section(&self) -> Vec<Element> {
        (0..self.target.dim())
            .map(|l| {
                self.matrix
                    .solve(&self.target.basis_element(l))
                    .expect("surjective")
            })
            .collect()
    }
}

/// The fiber product `R = S ×_k T` with its projections and the ideals
/// `I = ker(η_T) = 𝔪 × 0` and `J = ker(η_S) = 0 × 𝔫`.
///
/// The basis of `R` is the unit, then the maximal-ideal basis of `S`, then
/// that of `T`.
#[derive(Debug, Clone)]
pub struct FiberProductData {
    pub r: Arc<FiniteLocalAlgebra>,
    pub s: Arc<FiniteLocalAlgebra>,
    pub t: Arc<FiniteLocalAlgebra>,
    pub eta_s: AlgebraSurjection,
    pub eta_t: AlgebraSurjection,
    pub ideal_i: Subspace,
    pub ideal_j: Subspace,
}

impl FiberProductData {
    /// Positions in `R` of the basis of `I ≅ 𝔪`.
    pub fn i_positions(&self) -> Vec<usize> {
        (1..self.s.dim()).collect()
    }

    /// Positions in `R` of the basis of `J ≅ 𝔫`.
    pub fn j_positions(&self) -> Vec<usize> {
        (self.s.dim()..self.r.dim()).collect()
    }

    /// The element `(s, t)` of `R`; fails unless `s` and `t` agree mod the
    /// maximal ideals.
    pub fn pair(&self, s: &[u32], t: &[u32]) -> Result<Element> {
        if self.s.residue(s) != self.t.residue(t) {
            return Err(Error::Argument(
                "components have different residues".into(),
            ));
        }
        let mut e = vec![0u32; self.r.dim()];
        e[0] = self.s.residue(s);
        let sm = self.s.max_positions();
        for (k, &i) in sm.iter().enumerate() {
            e[1 + k] = s[i];
        }
        let tm = self.t.max_positions();
        for (k, &i) in tm.iter().enumerate() {
            e[1 + sm.len() + k] = t[i];
        }
        Ok(e)
    }

    /// Splits an element of `R` into its components `(s, t)`.
    pub fn components(&self, r: &[u32]) -> (Element, Element) {
        (self.eta_s.apply(r), self.eta_t.apply(r))
    }

    /// Checks the fiber-product invariants.
    pub fn validate(&self) -> Result<()> {
        let r = &self.r;
        if r.dim() != 1 + self.s.max_ideal().dim() + self.t.max_ideal().dim() {
            return Err(Error::Invariant("dim R != 1 + dim m + dim n".into()));
        }
        if self.ideal_i != self.eta_t.kernel().echelon() {
            return Err(Error::Invariant("I != ker(eta_T)".into()));
        }
        if self.ideal_j != self.eta_s.kernel().echelon() {
            return Err(Error::Invariant("J != ker(eta_S)".into()));
        }
        for a in 0..self.ideal_i.dim() {
            for b in 0..self.ideal_j.dim() {
                let prod = r.mul(self.ideal_i.vector(a), self.ideal_j.vector(b));
                if !r.is_zero_element(&prod) {
                    return Err(Error::Invariant("I*J != 0".into()));
                }
            }
        }
        let (meet, join) = self.ideal_i.meet_join(&self.ideal_j)?;
        if meet.dim() != 0 || join != r.max_ideal().echelon() {
            return Err(Error::Invariant("I + J is not a direct sum equal to m x n".into()));
        }
        // π_S ∘ η_S = π_T ∘ η_T
        for i in 0..r.dim() {
            let e = r.basis_element(i);
            if self.s.residue(&self.eta_s.apply(&e)) != self.t.residue(&self.eta_t.apply(&e)) {
                return Err(Error::Invariant("pullback square does not commute".into()));
            }
        }
        Ok(())
    }
}

/// Builds `R = S ×_k T`. Generator names of `T` that clash with names of
/// `S` receive a trailing prime.
pub fn fiber_product(
    s: Arc<FiniteLocalAlgebra>,
    t: Arc<FiniteLocalAlgebra>,
) -> Result<FiberProductData> {
    if s.field() != t.field() {
        return Err(Error::Argument(format!(
            "characteristic mismatch: {} vs {}",
            s.field(),
            t.field()
        )));
    }
    if s.is_field() || t.is_field() {
        return Err(Error::SettingViolation(
            "both factors must have a nonzero maximal ideal".into(),
        ));
    }
    let f = s.field();
    let sm = s.max_positions().to_vec();
    let tm = t.max_positions().to_vec();
    let d = 1 + sm.len() + tm.len();

    // components of each basis element of R
    let mut comps: Vec<(Element, Element)> = Vec::with_capacity(d);
    comps.push((s.one(), t.one()));
    for &i in &sm {
        comps.push((s.basis_element(i), t.zero()));
    }
    for &i in &tm {
        comps.push((s.zero(), t.basis_element(i)));
    }
    let embed = |a: &[u32], b: &[u32]| -> Element {
        let mut e = vec![0u32; d];
        e[0] = s.residue(a);
        for (k, &i) in sm.iter().enumerate() {
            e[1 + k] = a[i];
        }
        for (k, &i) in tm.iter().enumerate() {
            e[1 + sm.len() + k] = b[i];
        }
        e
    };
    let mut mult = Vec::with_capacity(d);
    for (ua, ub) in &comps {
        let mut m = Matrix::zeros(f, d, d);
        for (j, (va, vb)) in comps.iter().enumerate() {
            let prod = embed(&s.mul(ua, va), &t.mul(ub, vb));
            for (l, &c) in prod.iter().enumerate() {
                if c != 0 {
                    m.set(l, j, c);
                }
            }
        }
        mult.push(m);
    }
    let mut labels = vec!["1".to_string()];
    let s_labels: Vec<String> = sm.iter().map(|&i| s.labels()[i].clone()).collect();
    labels.extend(s_labels.iter().cloned());
    for &i in &tm {
        let l = t.labels()[i].clone();
        labels.push(if s_labels.contains(&l) { format!("{l}'") } else { l });
    }
    let mut generators = Vec::new();
    for g in s.generators() {
        generators.push(Generator {
            name: g.name.clone(),
            element: embed(&g.element, &t.zero()),
        });
    }
    let s_names: Vec<String> = s.generators().iter().map(|g| g.name.clone()).collect();
    for g in t.generators() {
        let name = if s_names.contains(&g.name) {
            format!("{}'", g.name)
        } else {
            g.name.clone()
        };
        generators.push(Generator {
            name,
            element: embed(&s.zero(), &g.element),
        });
    }
    let max_positions: Vec<usize> = (1..d).collect();
    let r = Arc::new(FiniteLocalAlgebra {
        field: f,
        labels,
        unit: 0,
        max_ideal: Subspace::coordinate(f, d, &max_positions),
        max_positions,
        mult,
        generators,
        presentation: Presentation::Fiber {
            left: Box::new(s.presentation().clone()),
            right: Box::new(t.presentation().clone()),
        },
    });

    let mut eta_s = Matrix::zeros(f, s.dim(), d);
    let mut eta_t = Matrix::zeros(f, t.dim(), d);
    eta_s.set(s.unit_index(), 0, 1);
    eta_t.set(t.unit_index(), 0, 1);
    for (k, &i) in sm.iter().enumerate() {
        eta_s.set(i, 1 + k, 1);
    }
    for (k, &i) in tm.iter().enumerate() {
        eta_t.set(i, 1 + sm.len() + k, 1);
    }
    let i_pos: Vec<usize> = (1..1 + sm.len()).collect();
    let j_pos: Vec<usize> = (1 + sm.len()..d).collect();
    Ok(FiberProductData {
        eta_s: AlgebraSurjection::new(r.clone(), s.clone(), eta_s)?,
        eta_t: AlgebraSurjection::new(r.clone(), t.clone(), eta_t)?,
        ideal_i: Subspace::coordinate(f, d, &i_pos),
        ideal_j: Subspace::coordinate(f, d, &j_pos),
        r,
        s,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    fn trunc(var: &str, e: u32) -> Arc<FiniteLocalAlgebra> {
        Arc::new(FiniteLocalAlgebra::monomial_quotient(gf5(), &[var], &[vec![e]]).unwrap())
    }

    fn square_zero_yz() -> Arc<FiniteLocalAlgebra> {
        Arc::new(
            FiniteLocalAlgebra::monomial_quotient(
                gf5(),
                &["y", "z"],
                &[vec![2, 0], vec![1, 1], vec![0, 2]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn dual_numbers() {
        let a = trunc("x", 2);
        a.validate().unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(a.labels(), &["1", "x"]);
        let x = a.generator("x").unwrap();
        assert!(a.is_zero_element(&a.mul(x, x)));
    }

    #[test]
    fn square_zero_algebra() {
        let a = square_zero_yz();
        a.validate().unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.max_ideal().dim(), 2);
        assert_eq!(a.max_ideal_power(2).dim(), 0);
        assert_eq!(a.embedding_dim(), 2);
    }

    #[test]
    fn truncated_cubic() {
        let a = trunc("x", 3);
        a.validate().unwrap();
        assert_eq!(a.dim(), 3);
        let x = a.generator("x").unwrap().clone();
        let x2 = a.mul(&x, &x);
        assert_eq!(x2, a.basis_element(2));
        assert!(a.is_zero_element(&a.mul(&x, &x2)));
        assert_eq!(a.loewy_length(), 3);
    }

    #[test]
    fn missing_variable_power_is_infinite() {
        let r = FiniteLocalAlgebra::monomial_quotient(gf5(), &["x", "y"], &[vec![2, 0], vec![1, 1]]);
        assert_eq!(r, Err(Error::InfiniteDimension("y".into())));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert_eq!(PrimeField::new(6), Err(Error::NotPrime(6)));
    }

    #[test]
    fn fiber_of_dual_numbers_matches_monomial_presentation() {
        let s = trunc("x", 2);
        let t = trunc("y", 2);
        let fp = fiber_product(s, t).unwrap();
        fp.validate().unwrap();
        fp.r.validate().unwrap();
        let direct = FiniteLocalAlgebra::monomial_quotient(
            gf5(),
            &["x", "y"],
            &[vec![2, 0], vec![1, 1], vec![0, 2]],
        )
        .unwrap();
        assert_eq!(fp.r.dim(), 3);
        assert_eq!(fp.r.mult_tables(), direct.mult_tables());
        assert_eq!(fp.r.labels(), direct.labels());
    }

    #[test]
    fn fiber_of_same_ring_renames_generators() {
        let s = trunc("x", 2);
        let fp = fiber_product(s.clone(), s).unwrap();
        let names: Vec<&str> = fp.r.generators().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["x", "x'"]);
    }

    #[test]
    fn fiber_dimension_count() {
        let fp = fiber_product(trunc("x", 3), square_zero_yz()).unwrap();
        fp.validate().unwrap();
        assert_eq!(fp.r.dim(), 5);
        assert_eq!(fp.ideal_i.dim(), 2);
        assert_eq!(fp.ideal_j.dim(), 2);
        for v in 0..fp.ideal_j.dim() {
            assert!(fp.r.is_zero_element(&fp.eta_s.apply(fp.ideal_j.vector(v))));
        }
        for v in 0..fp.ideal_i.dim() {
            assert!(fp.r.is_zero_element(&fp.eta_t.apply(fp.ideal_i.vector(v))));
        }
    }

    #[test]
    fn fiber_requires_nonfield_factors() {
        let k = Arc::new(FiniteLocalAlgebra::monomial_quotient(gf5(), &["x"], &[vec![1]]).unwrap());
        assert!(k.is_field());
        assert!(matches!(
            fiber_product(k, trunc("y", 2)),
            Err(Error::SettingViolation(_))
        ));
        let other = Arc::new(
            FiniteLocalAlgebra::monomial_quotient(PrimeField::new(7).unwrap(), &["y"], &[vec![2]])
                .unwrap(),
        );
        assert!(matches!(
            fiber_product(trunc("x", 2), other),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn nzd_basics() {
        let a = trunc("x", 2);
        assert!(a.is_nzd(&a.one()));
        assert!(!a.is_nzd(a.generator("x").unwrap()));
        assert!(a.is_nzd(&[3, 4]));
        assert_eq!(a.depth(), 0);
        assert!(!a.is_dvr());
    }

    #[test]
    fn table_algebra_roundtrip_and_rejection() {
        let a = trunc("x", 3);
        let b = FiniteLocalAlgebra::from_table(
            a.field(),
            a.labels().to_vec(),
            0,
            a.mult_tables().to_vec(),
        )
        .unwrap();
        assert_eq!(b.embedding_dim(), 1);
        // k[x]/(x^2 - 1) is not local: x is a unit, so "x" is not nilpotent
        let f = gf5();
        let one = Matrix::identity(f, 2);
        let x = Matrix::from_rows(f, &[[0, 1], [1, 0]]).unwrap();
        let bad = FiniteLocalAlgebra::from_table(f, vec!["1".into(), "x".into()], 0, vec![one, x]);
        assert!(matches!(bad, Err(Error::Invariant(_))));
    }
}
