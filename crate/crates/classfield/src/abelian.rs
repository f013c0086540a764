//! Finitely generated abelian groups in Smith normal form and homomorphisms
//! between them.
//!
//! Coordinates: an element of `ℤ/f₁ ⊕ … ⊕ ℤ/f_k ⊕ ℤ^r` is a vector of length
//! `k + r`, torsion coordinates first, each reduced to its least
//! non-negative residue.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{integer_kernel, smith_decompose, solve_integer, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("invariant factor {0} is smaller than 2")]
    FactorTooSmall(i64),
    #[error("invariant factors {0} and {1} do not form a divisibility chain")]
    NotDivisibilityChain(i64, i64),
    #[error("matrix is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    Shape { rows: usize, cols: usize, want_rows: usize, want_cols: usize },
    #[error("generator {column} of order {order} is not sent to an element of matching order")]
    NotWellDefined { column: usize, order: i64 },
    #[error("cannot compose: codomain of the inner map differs from the domain of the outer map")]
    Incomposable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGroup")]
pub struct FgAbGroup {
    free_rank: usize,
    invariant_factors: Vec<i64>,
}

#[derive(Deserialize)]
struct RawGroup {
    free_rank: usize,
    invariant_factors: Vec<i64>,
}

impl TryFrom<RawGroup> for FgAbGroup {
    type Error = AbelianError;
    fn try_from(r: RawGroup) -> Result<Self, AbelianError> {
        FgAbGroup::new(r.free_rank, r.invariant_factors)
    }
}

impl FgAbGroup {
    pub fn new(free_rank: usize, invariant_factors: Vec<i64>) -> Result<Self, AbelianError> {
        for &f in &invariant_factors {
            if f < 2 {
                return Err(AbelianError::FactorTooSmall(f));
            }
        }
        for w in invariant_factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(AbelianError::NotDivisibilityChain(w[0], w[1]));
            }
        }
        Ok(FgAbGroup { free_rank, invariant_factors })
    }

    pub fn trivial() -> Self {
        FgAbGroup { free_rank: 0, invariant_factors: vec![] }
    }

    pub fn integers() -> Self {
        FgAbGroup { free_rank: 1, invariant_factors: vec![] }
    }

    /// `ℤ/n`, with `n = 0` meaning `ℤ` and `n = 1` the trivial group.
    pub fn cyclic(n: i64) -> Self {
        match n.abs() {
            0 => Self::integers(),
            1 => Self::trivial(),
            m => FgAbGroup { free_rank: 0, invariant_factors: vec![m] },
        }
    }

    /// Normal form of an arbitrary direct sum of cyclic groups `ℤ/n_i` (0 meaning ℤ).
    pub fn from_cyclic_orders(orders: &[i64]) -> Self {
        let rel = IntMatrix::diagonal(orders.len(), orders.len(), orders);
        Presentation::cokernel(&rel).group
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[i64] {
        &self.invariant_factors
    }

    pub fn torsion_len(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn ngens(&self) -> usize {
        self.invariant_factors.len() + self.free_rank
    }

    /// Order of the `i`-th canonical generator; 0 for free generators.
    pub fn generator_order(&self, i: usize) -> i64 {
        self.invariant_factors.get(i).copied().unwrap_or(0)
    }

    pub fn order(&self) -> Order {
        if self.free_rank > 0 {
            Order::Infinite
        } else {
            Order::Finite(self.invariant_factors.iter().map(|&f| f as u64).product())
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.ngens() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_cyclic(&self) -> bool {
        self.ngens() <= 1
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.ngens()]
    }

    pub fn generator(&self, i: usize) -> Vec<i64> {
        let mut v = self.zero();
        v[i] = 1;
        self.normalize(&mut v);
        v
    }

    pub fn normalize(&self, x: &mut [i64]) {
        debug_assert_eq!(x.len(), self.ngens());
        for (xi, &f) in x.iter_mut().zip(&self.invariant_factors) {
            *xi = xi.rem_euclid(f);
        }
    }

    pub fn reduced(&self, mut x: Vec<i64>) -> Vec<i64> {
        self.normalize(&mut x);
        x
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.reduced(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.reduced(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &[i64]) -> Vec<i64> {
        self.reduced(a.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, k: i64, a: &[i64]) -> Vec<i64> {
        self.reduced(a.iter().map(|x| k * x).collect())
    }

    pub fn is_zero(&self, a: &[i64]) -> bool {
        self.reduced(a.to_vec()).iter().all(|&x| x == 0)
    }

    /// Order of an element; `None` when it has infinite order.
    pub fn element_order(&self, a: &[i64]) -> Option<i64> {
        let a = self.reduced(a.to_vec());
        if a[self.torsion_len()..].iter().any(|&x| x != 0) {
            return None;
        }
        let mut ord = 1i64;
        for (x, &f) in a.iter().zip(&self.invariant_factors) {
            let o = f / gcd(*x, f);
            ord = lcm(ord, o);
        }
        Some(ord)
    }

    /// Every element of a finite group in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        assert!(self.is_finite(), "cannot enumerate an infinite group");
        let mut out = vec![vec![]];
        for &f in &self.invariant_factors {
            let mut next = Vec::with_capacity(out.len() * f as usize);
            for prefix in &out {
                for k in 0..f {
                    let mut v = prefix.clone();
                    v.push(k);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Matrix whose columns generate the relation lattice in `ℤ^ngens`.
    pub fn relation_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.ngens(), self.torsion_len());
        for (i, &f) in self.invariant_factors.iter().enumerate() {
            m[(i, i)] = f;
        }
        m
    }

    /// Subgroup generated by the given elements, as a group with an embedding.
    pub fn subgroup(&self, gens: &[Vec<i64>]) -> SubgroupEmbedding {
        let k = gens.len();
        let s = IntMatrix::from_columns(gens, self.ngens());
        let big = s.hconcat(&self.relation_matrix());
        let rels: Vec<Vec<i64>> = integer_kernel(&big).into_iter().map(|v| v[..k].to_vec()).collect();
        let pres = Presentation::cokernel(&IntMatrix::from_columns(&rels, k));
        let emb_cols: Vec<Vec<i64>> =
            (0..pres.group.ngens()).map(|j| self.reduced(s.mul_vec(&pres.section.column(j)))).collect();
        let matrix = IntMatrix::from_columns(&emb_cols, self.ngens());
        SubgroupEmbedding {
            embedding: AbHom::new(pres.group.clone(), self.clone(), matrix).expect("embedding well-defined"),
            group: pres.group,
        }
    }

    /// Quotient by the subgroup generated by `gens`.
    pub fn quotient(&self, gens: &[Vec<i64>]) -> QuotientMap {
        let rel = IntMatrix::from_columns(gens, self.ngens()).hconcat(&self.relation_matrix());
        let pres = Presentation::cokernel(&rel);
        let projection =
            AbHom::new(self.clone(), pres.group.clone(), pres.projection.clone()).expect("projection well-defined");
        QuotientMap { group: pres.group, projection, section: pres.section }
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> (FgAbGroup, AbHom, AbHom) {
        let orders: Vec<i64> = (0..self.ngens())
            .map(|i| self.generator_order(i))
            .chain((0..other.ngens()).map(|i| other.generator_order(i)))
            .collect();
        let rel = IntMatrix::diagonal(orders.len(), orders.len(), &orders);
        let pres = Presentation::cokernel(&rel);
        let n = self.ngens();
        let left_cols: Vec<Vec<i64>> = (0..n).map(|j| pres.project(&unit(orders.len(), j))).collect();
        let right_cols: Vec<Vec<i64>> = (0..other.ngens()).map(|j| pres.project(&unit(orders.len(), n + j))).collect();
        let g = pres.group;
        let l = AbHom::new(self.clone(), g.clone(), IntMatrix::from_columns(&left_cols, g.ngens())).unwrap();
        let r = AbHom::new(other.clone(), g.clone(), IntMatrix::from_columns(&right_cols, g.ngens())).unwrap();
        (g, l, r)
    }
}

/// `A ⊕ B` in normal form with both injections and both projections.
#[derive(Clone, Debug)]
pub struct Biproduct {
    pub group: FgAbGroup,
    pub inj: [AbHom; 2],
    pub proj: [AbHom; 2],
}

impl Biproduct {
    pub fn new(a: &FgAbGroup, b: &FgAbGroup) -> Biproduct {
        let orders: Vec<i64> =
            (0..a.ngens()).map(|i| a.generator_order(i)).chain((0..b.ngens()).map(|i| b.generator_order(i))).collect();
        let pres = Presentation::cokernel(&IntMatrix::diagonal(orders.len(), orders.len(), &orders));
        let g = pres.group.clone();
        let n = a.ngens();
        let inj_cols = |range: std::ops::Range<usize>| -> Vec<Vec<i64>> {
            range.map(|j| pres.project(&unit(orders.len(), j))).collect()
        };
        let proj_cols = |rows: std::ops::Range<usize>| -> Vec<Vec<i64>> {
            (0..g.ngens()).map(|k| rows.clone().map(|i| pres.section[(i, k)]).collect()).collect()
        };
        let i1 = AbHom::new(a.clone(), g.clone(), IntMatrix::from_columns(&inj_cols(0..n), g.ngens())).unwrap();
        let i2 =
            AbHom::new(b.clone(), g.clone(), IntMatrix::from_columns(&inj_cols(n..orders.len()), g.ngens())).unwrap();
        let p1 = AbHom::new(g.clone(), a.clone(), IntMatrix::from_columns(&proj_cols(0..n), a.ngens())).unwrap();
        let p2 =
            AbHom::new(g.clone(), b.clone(), IntMatrix::from_columns(&proj_cols(n..orders.len()), b.ngens())).unwrap();
        Biproduct { group: g, inj: [i1, i2], proj: [p1, p2] }
    }

    /// `f ⊕ g` between two biproducts.
    pub fn block(source: &Biproduct, target: &Biproduct, f: &AbHom, g: &AbHom) -> AbHom {
        let left = source.proj[0].then(f).then(&target.inj[0]);
        let right = source.proj[1].then(g).then(&target.inj[1]);
        left.add(&right)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|n| format!("Z/{n}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// `ℤ^n / span(columns of relations)` brought to normal form.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub group: FgAbGroup,
    /// `ngens(group) × n`; maps old coordinates to normal-form coordinates.
    pub projection: IntMatrix,
    /// `n × ngens(group)`; column `j` lifts the `j`-th normal-form generator.
    pub section: IntMatrix,
}

impl Presentation {
    pub fn cokernel(relations: &IntMatrix) -> Presentation {
        let n = relations.rows();
        let s = smith_decompose(relations);
        let mut torsion = Vec::new();
        let mut free = Vec::new();
        for i in 0..n {
            let d = s.diagonal.get(i).copied().unwrap_or(0);
            match d {
                0 => free.push(i),
                1 => {}
                _ => torsion.push((i, d)),
            }
        }
        let group = FgAbGroup { free_rank: free.len(), invariant_factors: torsion.iter().map(|&(_, d)| d).collect() };
        let kept: Vec<usize> = torsion.iter().map(|&(i, _)| i).chain(free.iter().copied()).collect();
        let mut projection = IntMatrix::zeros(kept.len(), n);
        let mut section = IntMatrix::zeros(n, kept.len());
        for (r, &i) in kept.iter().enumerate() {
            let f = group.generator_order(r);
            for j in 0..n {
                let v = s.left[(i, j)];
                projection[(r, j)] = if f > 0 { v.rem_euclid(f) } else { v };
                section[(j, r)] = s.left_inv[(j, i)];
            }
        }
        Presentation { group, projection, section }
    }

    pub fn project(&self, x: &[i64]) -> Vec<i64> {
        self.group.reduced(self.projection.mul_vec(x))
    }
}

#[derive(Clone, Debug)]
pub struct SubgroupEmbedding {
    pub group: FgAbGroup,
    pub embedding: AbHom,
}

impl SubgroupEmbedding {
    /// Coordinates in the subgroup of an element of the ambient group, if it lies in the subgroup.
    pub fn pull(&self, x: &[i64]) -> Option<Vec<i64>> {
        self.embedding.preimage(x)
    }
}

#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub group: FgAbGroup,
    pub projection: AbHom,
    /// Columns lift the quotient generators back to the ambient group.
    pub section: IntMatrix,
}

impl QuotientMap {
    pub fn project(&self, x: &[i64]) -> Vec<i64> {
        self.projection.apply(x)
    }

    pub fn lift(&self, y: &[i64]) -> Vec<i64> {
        self.projection.domain().reduced(self.section.mul_vec(y))
    }
}

/// Homomorphism given by a matrix acting on canonical generators: column `j`
/// is the image of the `j`-th domain generator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AbHom {
    domain: FgAbGroup,
    codomain: FgAbGroup,
    matrix: IntMatrix,
}

impl fmt::Debug for AbHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbHom({} -> {}, {:?})", self.domain, self.codomain, self.matrix)
    }
}

impl AbHom {
    pub fn new(domain: FgAbGroup, codomain: FgAbGroup, mut matrix: IntMatrix) -> Result<AbHom, AbelianError> {
        // a row list cannot carry the width of a matrix with no rows
        if matrix.rows() == 0 && codomain.ngens() == 0 {
            matrix = IntMatrix::zeros(0, domain.ngens());
        }
        if matrix.rows() != codomain.ngens() || matrix.cols() != domain.ngens() {
            return Err(AbelianError::Shape {
                rows: matrix.rows(),
                cols: matrix.cols(),
                want_rows: codomain.ngens(),
                want_cols: domain.ngens(),
            });
        }
        for i in 0..codomain.torsion_len() {
            let f = codomain.generator_order(i);
            for j in 0..domain.ngens() {
                matrix[(i, j)] = matrix[(i, j)].rem_euclid(f);
            }
        }
        for j in 0..domain.ngens() {
            let o = domain.generator_order(j);
            if o == 0 {
                continue;
            }
            let col: Vec<i64> = matrix.column(j).iter().map(|x| x * o).collect();
            if !codomain.is_zero(&col) {
                return Err(AbelianError::NotWellDefined { column: j, order: o });
            }
        }
        Ok(AbHom { domain, codomain, matrix })
    }

    pub fn from_images(domain: FgAbGroup, codomain: FgAbGroup, images: &[Vec<i64>]) -> Result<AbHom, AbelianError> {
        let m = IntMatrix::from_columns(images, codomain.ngens());
        AbHom::new(domain, codomain, m)
    }

    pub fn identity(g: &FgAbGroup) -> AbHom {
        AbHom { domain: g.clone(), codomain: g.clone(), matrix: IntMatrix::identity(g.ngens()) }
    }

    pub fn zero(domain: &FgAbGroup, codomain: &FgAbGroup) -> AbHom {
        AbHom {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: IntMatrix::zeros(codomain.ngens(), domain.ngens()),
        }
    }

    /// Multiplication by `k` on a group.
    pub fn scalar(g: &FgAbGroup, k: i64) -> AbHom {
        let m = IntMatrix::diagonal(g.ngens(), g.ngens(), &vec![k; g.ngens()]);
        AbHom::new(g.clone(), g.clone(), m).expect("scalar maps are well-defined")
    }

    pub fn domain(&self) -> &FgAbGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &FgAbGroup {
        &self.codomain
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.codomain.reduced(self.matrix.mul_vec(x))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AbHom) -> Result<AbHom, AbelianError> {
        if inner.codomain != self.domain {
            return Err(AbelianError::Incomposable);
        }
        AbHom::new(inner.domain.clone(), self.codomain.clone(), self.matrix.mul(&inner.matrix))
    }

    pub fn then(&self, outer: &AbHom) -> AbHom {
        outer.compose(self).expect("composable maps")
    }

    pub fn add(&self, other: &AbHom) -> AbHom {
        assert!(self.domain == other.domain && self.codomain == other.codomain);
        let mut m = self.matrix.clone();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                m[(i, j)] += other.matrix[(i, j)];
            }
        }
        AbHom::new(self.domain.clone(), self.codomain.clone(), m).unwrap()
    }

    pub fn scaled(&self, k: i64) -> AbHom {
        let mut m = self.matrix.clone();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                m[(i, j)] *= k;
            }
        }
        AbHom::new(self.domain.clone(), self.codomain.clone(), m).unwrap()
    }

    pub fn sub(&self, other: &AbHom) -> AbHom {
        self.add(&other.scaled(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn kernel(&self) -> SubgroupEmbedding {
        let n = self.domain.ngens();
        let big = self.matrix.hconcat(&self.codomain.relation_matrix());
        let gens: Vec<Vec<i64>> =
            integer_kernel(&big).into_iter().map(|v| self.domain.reduced(v[..n].to_vec())).collect();
        self.domain.subgroup(&gens)
    }

    pub fn image(&self) -> SubgroupEmbedding {
        let cols: Vec<Vec<i64>> = (0..self.domain.ngens()).map(|j| self.matrix.column(j)).collect();
        self.codomain.subgroup(&cols)
    }

    pub fn cokernel(&self) -> QuotientMap {
        let cols: Vec<Vec<i64>> = (0..self.domain.ngens()).map(|j| self.matrix.column(j)).collect();
        self.codomain.quotient(&cols)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().group.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().group.is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Some `x` with `self(x) = y`, if `y` lies in the image.
    pub fn preimage(&self, y: &[i64]) -> Option<Vec<i64>> {
        let n = self.domain.ngens();
        let big = self.matrix.hconcat(&self.codomain.relation_matrix());
        let sol = solve_integer(&big, y)?;
        Some(self.domain.reduced(sol[..n].to_vec()))
    }

    /// The map induced on quotients `domain/… → codomain/…`. Returns `None` when
    /// the kernel of `from` is not sent into the kernel of `to`.
    pub fn induced(&self, from: &QuotientMap, to: &QuotientMap) -> Option<AbHom> {
        let k = from.projection.kernel();
        for j in 0..k.group.ngens() {
            let x = k.embedding.apply(&k.group.generator(j));
            if !to.group.is_zero(&to.project(&self.apply(&x))) {
                return None;
            }
        }
        let cols: Vec<Vec<i64>> =
            (0..from.group.ngens()).map(|j| to.project(&self.apply(&from.section.column(j)))).collect();
        AbHom::from_images(from.group.clone(), to.group.clone(), &cols).ok()
    }

    /// Restriction to a subgroup given by an embedding, landing in a subgroup of the codomain.
    pub fn restricted(&self, source: &SubgroupEmbedding, target: &SubgroupEmbedding) -> Option<AbHom> {
        let cols: Option<Vec<Vec<i64>>> = (0..source.group.ngens())
            .map(|j| {
                let x = source.embedding.apply(&source.group.generator(j));
                target.pull(&self.apply(&x))
            })
            .collect();
        AbHom::from_images(source.group.clone(), target.group.clone(), &cols?).ok()
    }
}

#[derive(Serialize, Deserialize)]
struct RawHom {
    domain: FgAbGroup,
    codomain: FgAbGroup,
    matrix: Vec<Vec<i64>>,
}

impl Serialize for AbHom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawHom { domain: self.domain.clone(), codomain: self.codomain.clone(), matrix: self.matrix.to_rows() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AbHom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawHom::deserialize(d)?;
        let m = IntMatrix::from_rows(raw.matrix, raw.domain.ngens())
            .ok_or_else(|| serde::de::Error::custom("matrix rows do not match the domain rank"))?;
        AbHom::new(raw.domain, raw.codomain, m).map_err(serde::de::Error::custom)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd(a, b) * b).abs()
    }
}
