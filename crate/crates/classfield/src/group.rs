//! Finite groups as dense Cayley tables, subgroups, transversals, double
//! cosets, normal cores and abelian quotients.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{FgAbGroup, Presentation};
use crate::matrix::IntMatrix;

pub type Elem = usize;

/// Dense tables are kept below this order.
pub const MAX_ORDER: usize = 2048;

static NEXT_GROUP_TAG: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("empty Cayley table")]
    Empty,
    #[error("Cayley table row {row} has length {len}, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("entry {value} at ({row},{col}) is out of range")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("element 0 is not an identity: 0*{0} or {0}*0 differs from {0}")]
    IdentityNotZero(usize),
    #[error("element {0} has no two-sided inverse")]
    NoInverse(usize),
    #[error("associativity fails for ({0},{1},{2})")]
    NotAssociative(usize, usize, usize),
    #[error("generator {index} is not a permutation of 0..{degree}")]
    NotAPermutation { index: usize, degree: usize },
    #[error("group order exceeds {MAX_ORDER}")]
    TooLarge,
    #[error("subgroup elements {0:?} are not closed under the group law")]
    NotASubgroup(Vec<usize>),
    #[error("element {0} is not in the group")]
    UnknownElement(usize),
    #[error("subgroups belong to different parent groups")]
    CrossParent,
    #[error("transversal does not hit every coset exactly once")]
    InvalidTransversal,
    #[error("representatives do not partition the group into double cosets: {0}")]
    InvalidReps(String),
    #[error("{0:?} is not normal in the given subgroup")]
    NotNormal(Vec<usize>),
    #[error("quotient by {0:?} is not abelian")]
    NotCoabelian(Vec<usize>),
}

#[derive(Clone)]
pub struct FiniteGroup {
    tag: u64,
    order: usize,
    table: Vec<u32>,
    inverse: Vec<Elem>,
    name: Option<String>,
    perms: Option<Vec<Vec<u32>>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name.as_deref().unwrap_or("?"), self.order)
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    pub fn from_cayley_table(rows: &[Vec<usize>]) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if n > MAX_ORDER {
            return Err(GroupError::TooLarge);
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(GroupError::NotSquare { row: i, len: r.len(), order: n });
            }
            for (j, &v) in r.iter().enumerate() {
                if v >= n {
                    return Err(GroupError::EntryOutOfRange { row: i, col: j, value: v });
                }
                table.push(v as u32);
            }
        }
        let at = |a: usize, b: usize| table[a * n + b] as usize;
        for x in 0..n {
            if at(0, x) != x || at(x, 0) != x {
                return Err(GroupError::IdentityNotZero(x));
            }
        }
        let inverse = (0..n)
            .map(|x| (0..n).find(|&y| at(x, y) == 0 && at(y, x) == 0).ok_or(GroupError::NoInverse(x)))
            .collect::<Result<Vec<_>, _>>()?;
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup::raw(n, table, inverse))
    }

    fn raw(order: usize, table: Vec<u32>, inverse: Vec<Elem>) -> Self {
        FiniteGroup {
            tag: NEXT_GROUP_TAG.fetch_add(1, AtomicOrdering::Relaxed),
            order,
            table,
            inverse,
            name: None,
            perms: None,
        }
    }

    /// Builds the group from a trusted multiplication on `0..n` with identity 0.
    pub(crate) fn from_fn(n: usize, mul: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(mul(a, b) as u32);
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| table[a * n + b] == 0).expect("group has inverses");
        }
        FiniteGroup::raw(n, table, inverse)
    }

    /// Group generated by permutations of `0..degree`, with `x^(ab) = (x^a)^b`.
    /// Elements are listed identity first, then in breadth-first order over the generators.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>]) -> Result<Self, GroupError> {
        for (i, g) in gens.iter().enumerate() {
            let mut seen = vec![false; degree];
            let ok = g.len() == degree && g.iter().all(|&x| x < degree && !std::mem::replace(&mut seen[x], true));
            if !ok {
                return Err(GroupError::NotAPermutation { index: i, degree });
            }
        }
        let gens: Vec<Vec<u32>> = gens.iter().map(|g| g.iter().map(|&x| x as u32).collect()).collect();
        let compose = |a: &[u32], b: &[u32]| -> Vec<u32> { a.iter().map(|&x| b[x as usize]).collect() };
        let id: Vec<u32> = (0..degree as u32).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let p = compose(&elems[i], g);
                if !index.contains_key(&p) {
                    if elems.len() >= MAX_ORDER {
                        return Err(GroupError::TooLarge);
                    }
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let n = elems.len();
        let mut g = FiniteGroup::from_fn(n, |a, b| index[&compose(&elems[a], &elems[b])]);
        g.perms = Some(elems);
        Ok(g)
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let nb = b.order;
        let mut g = FiniteGroup::from_fn(a.order * nb, |x, y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb));
        if let (Some(x), Some(y)) = (&a.name, &b.name) {
            g.name = Some(format!("{x}x{y}"));
        }
        g
    }

    pub(crate) fn tag(&self) -> u64 {
        self.tag
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn permutation(&self, g: Elem) -> Option<Vec<usize>> {
        self.perms.as_ref().map(|p| p[g].iter().map(|&x| x as usize).collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order
    }

    pub fn identity(&self) -> Elem {
        0
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverse[a]
    }

    pub fn pow(&self, a: Elem, k: i64) -> Elem {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut out = 0;
        for _ in 0..k.unsigned_abs() {
            out = self.mul(out, base);
        }
        out
    }

    pub fn product(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(0, |acc, x| self.mul(acc, x))
    }

    /// `g h g⁻¹`.
    pub fn conj(&self, g: Elem, h: Elem) -> Elem {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn element_order(&self, a: Elem) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn cayley_table(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|a| (0..self.order).map(|b| self.mul(a, b)).collect()).collect()
    }

    fn check(&self, g: Elem) -> Result<(), GroupError> {
        if g < self.order {
            Ok(())
        } else {
            Err(GroupError::UnknownElement(g))
        }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_sorted(self, (0..self.order).collect())
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self, vec![0])
    }

    pub fn subgroup_from_elements(&self, elems: &[Elem]) -> Result<Subgroup, GroupError> {
        for &e in elems {
            self.check(e)?;
        }
        let set: BTreeSet<Elem> = elems.iter().copied().collect();
        let closed = set.contains(&0)
            && set.iter().all(|&a| set.contains(&self.inv(a)) && set.iter().all(|&b| set.contains(&self.mul(a, b))));
        if !closed {
            return Err(GroupError::NotASubgroup(set.into_iter().collect()));
        }
        Ok(Subgroup::from_sorted(self, set.into_iter().collect()))
    }

    pub fn generate(&self, gens: &[Elem]) -> Result<Subgroup, GroupError> {
        for &g in gens {
            self.check(g)?;
        }
        let mut mask = vec![false; self.order];
        mask[0] = true;
        let mut elems = vec![0];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        Ok(Subgroup { parent: self.tag, elements: elems, mask })
    }

    /// A small generating set of `h`, chosen greedily in ascending element order.
    pub fn generating_set(&self, h: &Subgroup) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut span = self.trivial_subgroup();
        for &x in h.elements() {
            if !span.contains(x) {
                gens.push(x);
                span = self.generate(&gens).unwrap();
                if span.order() == h.order() {
                    break;
                }
            }
        }
        gens
    }

    pub fn cyclic_subgroup(&self, g: Elem) -> Subgroup {
        self.generate(&[g]).expect("element in range")
    }

    pub fn join(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let gens: Vec<Elem> = a.elements.iter().chain(&b.elements).copied().collect();
        self.generate(&gens).unwrap()
    }

    /// All subgroups, sorted by order and then by element list.
    pub fn all_subgroups(&self) -> Vec<Subgroup> {
        let mut found: BTreeSet<Vec<Elem>> = BTreeSet::new();
        let cyclic: Vec<Subgroup> = {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for g in self.elements() {
                let c = self.cyclic_subgroup(g);
                if seen.insert(c.elements.clone()) {
                    out.push(c);
                }
            }
            out
        };
        let mut frontier: Vec<Subgroup> = cyclic.clone();
        for c in &cyclic {
            found.insert(c.elements.clone());
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for c in &cyclic {
                    if c.is_subgroup_of(s) {
                        continue;
                    }
                    let j = self.join(s, c);
                    if found.insert(j.elements.clone()) {
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        let mut all: Vec<Subgroup> = found.into_iter().map(|e| Subgroup::from_sorted(self, e)).collect();
        all.sort();
        all
    }

    pub fn center(&self) -> Subgroup {
        let elems = self.elements().filter(|&z| self.elements().all(|g| self.mul(z, g) == self.mul(g, z))).collect();
        Subgroup::from_sorted(self, elems)
    }

    pub fn commutator_subgroup(&self, h: &Subgroup) -> Subgroup {
        let mut gens = BTreeSet::new();
        for &a in &h.elements {
            for &b in &h.elements {
                gens.insert(self.commutator(a, b));
            }
        }
        self.generate(&gens.into_iter().collect::<Vec<_>>()).unwrap()
    }

    /// `^gH = g H g⁻¹`.
    pub fn conjugate(&self, g: Elem, h: &Subgroup) -> Subgroup {
        let mut e: Vec<Elem> = h.elements.iter().map(|&x| self.conj(g, x)).collect();
        e.sort_unstable();
        Subgroup::from_sorted(self, e)
    }

    /// `H^g = g⁻¹ H g`.
    pub fn conjugate_right(&self, h: &Subgroup, g: Elem) -> Subgroup {
        self.conjugate(self.inv(g), h)
    }

    pub fn intersection(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let e = a.elements.iter().copied().filter(|&x| b.contains(x)).collect();
        Subgroup::from_sorted(self, e)
    }

    /// The set `A·B`, as a subgroup if it is one.
    pub fn product_set(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup, GroupError> {
        let mut set = BTreeSet::new();
        for &x in &a.elements {
            for &y in &b.elements {
                set.insert(self.mul(x, y));
            }
        }
        self.subgroup_from_elements(&set.into_iter().collect::<Vec<_>>())
    }

    pub fn is_normal_in(&self, n: &Subgroup, h: &Subgroup) -> bool {
        n.is_subgroup_of(h) && h.elements.iter().all(|&g| n.elements.iter().all(|&x| n.contains(self.conj(g, x))))
    }

    pub fn is_normal(&self, n: &Subgroup) -> bool {
        self.is_normal_in(n, &self.whole())
    }

    pub fn normal_core(&self, h: &Subgroup) -> Subgroup {
        let t = right_transversal(self, h);
        let mut core = h.clone();
        for &g in t.reps() {
            core = self.intersection(&core, &self.conjugate_right(h, g));
        }
        core
    }

    /// Abelian quotient `H/N` with explicit images of the elements of `H`.
    pub fn abelian_quotient(&self, h: &Subgroup, n: &Subgroup) -> Result<AbelianQuotient, GroupError> {
        if !self.is_normal_in(n, h) {
            return Err(GroupError::NotNormal(n.elements.clone()));
        }
        for &a in &h.elements {
            for &b in &h.elements {
                if !n.contains(self.commutator(a, b)) {
                    return Err(GroupError::NotCoabelian(n.elements.clone()));
                }
            }
        }
        // coset label = least element of xN
        let label = |x: Elem| n.elements.iter().map(|&y| self.mul(x, y)).min().unwrap();
        let mut gens: Vec<Elem> = Vec::new();
        let mut reached: BTreeSet<Elem> = BTreeSet::from([0]);
        for &x in &h.elements {
            if reached.contains(&label(x)) {
                continue;
            }
            gens.push(x);
            let mut queue: Vec<Elem> = reached.iter().copied().collect();
            while let Some(c) = queue.pop() {
                for &g in &gens {
                    let d = label(self.mul(c, g));
                    if reached.insert(d) {
                        queue.push(d);
                    }
                }
            }
        }
        let s = gens.len();
        let mut word: HashMap<Elem, Vec<i64>> = HashMap::from([(0, vec![0; s])]);
        let mut order = vec![0];
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for (j, &g) in gens.iter().enumerate() {
                let d = label(self.mul(c, g));
                if !word.contains_key(&d) {
                    let mut w = word[&c].clone();
                    w[j] += 1;
                    word.insert(d, w);
                    order.push(d);
                }
            }
            i += 1;
        }
        let mut rels = Vec::new();
        for &c in &order {
            for (j, &g) in gens.iter().enumerate() {
                let d = label(self.mul(c, g));
                let mut r = word[&c].clone();
                r[j] += 1;
                for (x, y) in r.iter_mut().zip(&word[&d]) {
                    *x -= y;
                }
                if r.iter().any(|&x| x != 0) {
                    rels.push(r);
                }
            }
        }
        let pres = Presentation::cokernel(&IntMatrix::from_columns(&rels, s));
        let mut images = vec![None; self.order];
        for &x in &h.elements {
            images[x] = Some(pres.project(&word[&label(x)]));
        }
        let group = pres.group.clone();
        let lifts = (0..group.ngens())
            .map(|j| {
                h.elements
                    .iter()
                    .copied()
                    .find(|&x| images[x].as_ref() == Some(&group.generator(j)))
                    .expect("every generator has a preimage")
            })
            .collect();
        Ok(AbelianQuotient { group, images, kernel: n.clone(), domain: h.clone(), lifts })
    }

    pub fn abelianization(&self) -> AbelianQuotient {
        let g = self.whole();
        let c = self.commutator_subgroup(&g);
        self.abelian_quotient(&g, &c).expect("commutator quotient is abelian")
    }
}

/// The projection `H → H/N` for an abelian quotient, with canonical coordinates.
#[derive(Clone, Debug)]
pub struct AbelianQuotient {
    pub group: FgAbGroup,
    images: Vec<Option<Vec<i64>>>,
    pub kernel: Subgroup,
    pub domain: Subgroup,
    lifts: Vec<Elem>,
}

impl AbelianQuotient {
    /// Image of an element of the domain subgroup.
    pub fn image(&self, x: Elem) -> &[i64] {
        self.images[x].as_deref().expect("element lies in the domain subgroup")
    }

    pub fn try_image(&self, x: Elem) -> Option<&[i64]> {
        self.images.get(x).and_then(|v| v.as_deref())
    }

    /// An element of the domain mapping to the `j`-th generator.
    pub fn generator_lift(&self, j: usize) -> Elem {
        self.lifts[j]
    }

    /// Some element of the domain mapping to `y`.
    pub fn lift(&self, y: &[i64]) -> Elem {
        let y = self.group.reduced(y.to_vec());
        self.domain
            .elements()
            .iter()
            .copied()
            .find(|&x| self.images[x].as_deref() == Some(&y[..]))
            .expect("projection is surjective")
    }
}

#[derive(Clone)]
pub struct Subgroup {
    parent: u64,
    elements: Vec<Elem>,
    mask: Vec<bool>,
}

impl Subgroup {
    fn from_sorted(g: &FiniteGroup, elements: Vec<Elem>) -> Subgroup {
        let mut mask = vec![false; g.order];
        for &e in &elements {
            mask[e] = true;
        }
        Subgroup { parent: g.tag, elements, mask }
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn index_in(&self, over: &Subgroup) -> usize {
        over.order() / self.order()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn belongs_to(&self, g: &FiniteGroup) -> bool {
        self.parent == g.tag
    }

    /// Set equality, refusing to compare subgroups of different parents.
    pub fn same_as(&self, other: &Subgroup) -> Result<bool, GroupError> {
        if self.parent != other.parent {
            return Err(GroupError::CrossParent);
        }
        Ok(self.elements == other.elements)
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parent.hash(state);
        self.elements.hash(state);
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.elements.len(), &self.elements, self.parent).cmp(&(other.elements.len(), &other.elements, other.parent))
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.elements)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// Coset representatives. For the right side `G = ⊔ H·t`, for the left side `G = ⊔ t·H`.
#[derive(Debug, Clone)]
pub struct Transversal {
    ambient: Subgroup,
    subgroup: Subgroup,
    side: Side,
    reps: Vec<Elem>,
    coset_of: Vec<usize>,
}

fn coset_labels(g: &FiniteGroup, ambient: &Subgroup, h: &Subgroup, side: Side) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; g.order()];
    let mut count = 0;
    for &x in ambient.elements() {
        if label[x] != usize::MAX {
            continue;
        }
        for &y in h.elements() {
            let z = match side {
                Side::Right => g.mul(y, x),
                Side::Left => g.mul(x, y),
            };
            label[z] = count;
        }
        count += 1;
    }
    (label, count)
}

/// Right transversal with the least element of each coset, cosets in ascending order of that element.
pub fn right_transversal(g: &FiniteGroup, h: &Subgroup) -> Transversal {
    transversal_in(g, &g.whole(), h, Side::Right)
}

pub fn left_transversal(g: &FiniteGroup, h: &Subgroup) -> Transversal {
    transversal_in(g, &g.whole(), h, Side::Left)
}

/// Canonical transversal of `h` inside `ambient`.
pub fn transversal_in(g: &FiniteGroup, ambient: &Subgroup, h: &Subgroup, side: Side) -> Transversal {
    let (label, count) = coset_labels(g, ambient, h, side);
    let mut reps = vec![usize::MAX; count];
    for &x in ambient.elements() {
        if reps[label[x]] == usize::MAX {
            reps[label[x]] = x;
        }
    }
    Transversal { ambient: ambient.clone(), subgroup: h.clone(), side, reps, coset_of: label }
}

/// A random transversal of `h` in `ambient`; with `unitary` the identity represents `h` itself.
/// Representatives are listed in the canonical coset order.
pub fn random_transversal<R: Rng>(
    g: &FiniteGroup,
    ambient: &Subgroup,
    h: &Subgroup,
    side: Side,
    unitary: bool,
    rng: &mut R,
) -> Transversal {
    let base = transversal_in(g, ambient, h, side);
    let reps = base
        .reps
        .iter()
        .map(|&t| {
            if unitary && h.contains(t) {
                return 0;
            }
            let k = h.elements()[rng.gen_range(0..h.order())];
            match side {
                Side::Right => g.mul(k, t),
                Side::Left => g.mul(t, k),
            }
        })
        .collect();
    Transversal { reps, ..base }
}

impl Transversal {
    pub fn from_reps(
        g: &FiniteGroup,
        ambient: &Subgroup,
        h: &Subgroup,
        side: Side,
        reps: Vec<Elem>,
    ) -> Result<Self, GroupError> {
        if !h.is_subgroup_of(ambient) {
            return Err(GroupError::InvalidTransversal);
        }
        let (label, count) = coset_labels(g, ambient, h, side);
        if reps.len() != count || reps.iter().any(|&r| !ambient.contains(r)) {
            return Err(GroupError::InvalidTransversal);
        }
        let mut hit = vec![false; count];
        for &r in &reps {
            if std::mem::replace(&mut hit[label[r]], true) {
                return Err(GroupError::InvalidTransversal);
            }
        }
        // coset_of must index into reps, not into canonical coset order
        let mut pos = vec![0; count];
        for (i, &r) in reps.iter().enumerate() {
            pos[label[r]] = i;
        }
        let coset_of = label.iter().map(|&l| if l == usize::MAX { l } else { pos[l] }).collect();
        Ok(Transversal { ambient: ambient.clone(), subgroup: h.clone(), side, reps, coset_of })
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn ambient(&self) -> &Subgroup {
        &self.ambient
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn reps(&self) -> &[Elem] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn is_unitary(&self) -> bool {
        self.reps.contains(&0)
    }

    /// Index into `reps` of the representative of the coset containing `x`.
    pub fn coset_index(&self, x: Elem) -> usize {
        self.coset_of[x]
    }

    pub fn rep_of(&self, x: Elem) -> Elem {
        self.reps[self.coset_of[x]]
    }

    /// The T-remover: the subgroup part of `g`, i.e. `g = κ·t` (right) or `g = t·κ` (left).
    pub fn remover(&self, g: &FiniteGroup, x: Elem) -> Elem {
        let t = self.rep_of(x);
        match self.side {
            Side::Right => g.mul(x, g.inv(t)),
            Side::Left => g.mul(g.inv(t), x),
        }
    }

    /// The T-permutation of `x` as a map on indices into `reps`.
    /// Right: `t·x = κ(t·x)·σ(t)`; left: `x·t = σ(t)·κ(x·t)`.
    pub fn permutation(&self, g: &FiniteGroup, x: Elem) -> Vec<usize> {
        self.reps
            .iter()
            .map(|&t| match self.side {
                Side::Right => self.coset_of[g.mul(t, x)],
                Side::Left => self.coset_of[g.mul(x, t)],
            })
            .collect()
    }

    /// Checks that this is a transversal of its subgroup in `g`.
    pub fn validate(&self, g: &FiniteGroup) -> Result<(), GroupError> {
        Transversal::from_reps(g, &self.ambient, &self.subgroup, self.side, self.reps.clone()).map(|_| ())
    }
}

/// `(a ∘ b)(i) = a(b(i))` on index permutations.
pub fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

/// Representatives of `U\\G/V`, each the least element of its double coset.
pub fn double_coset_reps(g: &FiniteGroup, u: &Subgroup, v: &Subgroup) -> Vec<Elem> {
    double_coset_reps_in(g, &g.whole(), u, v)
}

/// Representatives of `U\\K/V` for `U, V ≤ K`.
pub fn double_coset_reps_in(g: &FiniteGroup, ambient: &Subgroup, u: &Subgroup, v: &Subgroup) -> Vec<Elem> {
    let mut covered = vec![false; g.order()];
    let mut reps = Vec::new();
    for &x in ambient.elements() {
        if covered[x] {
            continue;
        }
        reps.push(x);
        for &a in u.elements() {
            let ax = g.mul(a, x);
            for &b in v.elements() {
                covered[g.mul(ax, b)] = true;
            }
        }
    }
    reps
}

pub fn validate_double_coset_reps(
    g: &FiniteGroup,
    u: &Subgroup,
    v: &Subgroup,
    reps: &[Elem],
) -> Result<(), GroupError> {
    validate_double_coset_reps_in(g, &g.whole(), u, v, reps)
}

pub fn validate_double_coset_reps_in(
    g: &FiniteGroup,
    ambient: &Subgroup,
    u: &Subgroup,
    v: &Subgroup,
    reps: &[Elem],
) -> Result<(), GroupError> {
    if !u.is_subgroup_of(ambient) || !v.is_subgroup_of(ambient) {
        return Err(GroupError::InvalidReps("subgroups do not lie in the ambient group".into()));
    }
    let mut owner = vec![usize::MAX; g.order()];
    for (i, &r) in reps.iter().enumerate() {
        if !ambient.contains(r) {
            return Err(GroupError::InvalidReps(format!("element {r} is outside the ambient group")));
        }
        for &a in u.elements() {
            let ar = g.mul(a, r);
            for &b in v.elements() {
                let y = g.mul(ar, b);
                if owner[y] != usize::MAX && owner[y] != i {
                    return Err(GroupError::InvalidReps(format!(
                        "representatives {} and {} share a double coset",
                        reps[owner[y]], r
                    )));
                }
                owner[y] = i;
            }
        }
    }
    if let Some(&x) = ambient.elements().iter().find(|&&x| owner[x] == usize::MAX) {
        return Err(GroupError::InvalidReps(format!("element {x} is not covered")));
    }
    Ok(())
}

/// Lifts per-representative transversals of `U^ρ ∩ V` in `V` to the right transversal `{ρ·t}` of `U` in `G`.
pub fn lift_double_coset_transversal(
    g: &FiniteGroup,
    u: &Subgroup,
    v: &Subgroup,
    reps: &[Elem],
    per_rep: &[Transversal],
) -> Result<Transversal, GroupError> {
    validate_double_coset_reps(g, u, v, reps)?;
    if per_rep.len() != reps.len() {
        return Err(GroupError::InvalidReps("one transversal per representative is required".into()));
    }
    let mut lifted = Vec::new();
    for (&rho, t) in reps.iter().zip(per_rep) {
        let w = g.intersection(&g.conjugate_right(u, rho), v);
        if t.side() != Side::Right || t.subgroup() != &w || t.ambient() != v {
            return Err(GroupError::InvalidReps(format!("transversal for {rho} is not one of U^ρ∩V in V")));
        }
        t.validate(g)?;
        lifted.extend(t.reps().iter().map(|&x| g.mul(rho, x)));
    }
    Transversal::from_reps(g, &g.whole(), u, Side::Right, lifted)
}

/// Canonical per-representative transversals for [`lift_double_coset_transversal`].
pub fn double_coset_inner_transversals(g: &FiniteGroup, u: &Subgroup, v: &Subgroup, reps: &[Elem]) -> Vec<Transversal> {
    reps.iter()
        .map(|&rho| {
            let w = g.intersection(&g.conjugate_right(u, rho), v);
            transversal_in(g, v, &w, Side::Right)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Table { cayley_table: Vec<Vec<usize>> },
    Permutations { degree: usize, perm_generators: Vec<Vec<usize>> },
    Named { catalog: String },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        match self {
            GroupSpec::Table { cayley_table } => FiniteGroup::from_cayley_table(cayley_table),
            GroupSpec::Permutations { degree, perm_generators } => {
                FiniteGroup::from_permutations(*degree, perm_generators)
            }
            GroupSpec::Named { catalog } => crate::catalog::by_name(catalog)
                .ok_or_else(|| GroupError::InvalidReps(format!("unknown catalog group {catalog}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubgroupSpec {
    Elements { elements: Vec<usize> },
    Generators { generators: Vec<usize> },
}

impl SubgroupSpec {
    pub fn build(&self, g: &FiniteGroup) -> Result<Subgroup, GroupError> {
        match self {
            SubgroupSpec::Elements { elements } => g.subgroup_from_elements(elements),
            SubgroupSpec::Generators { generators } => g.generate(generators),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 2, 0], vec![1, 0, 2]]).unwrap()
    }

    fn c4() -> (FiniteGroup, Elem) {
        let g = FiniteGroup::from_permutations(4, &[vec![1, 2, 3, 0]]).unwrap();
        (g, 1)
    }

    #[test]
    fn s3_basics() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.all_subgroups().len(), 6);
    }

    #[test]
    fn table_validation_errors() {
        assert_eq!(FiniteGroup::from_cayley_table(&[vec![0, 1], vec![1, 1]]), Err(GroupError::NoInverse(1)));
        assert!(matches!(FiniteGroup::from_cayley_table(&[vec![0, 1], vec![1]]), Err(GroupError::NotSquare { .. })));
        // loop that is not associative: identity 0, latin square of order 5
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_cayley_table(&t), Err(GroupError::NotAssociative(..))));
    }

    #[test]
    fn c4_transversal_remover_permutation() {
        let (g, x) = c4();
        let x2 = g.mul(x, x);
        let x3 = g.mul(x2, x);
        let h = g.cyclic_subgroup(x2);
        let t = right_transversal(&g, &h);
        assert_eq!(t.reps(), &[0, x]);
        assert_eq!(t.remover(&g, x3), x2);
        let sigma = t.permutation(&g, x);
        assert_eq!(sigma, vec![1, 0]);
        assert_eq!(t.permutation(&g, 0), vec![0, 1]);
        for &r in t.reps() {
            assert_eq!(t.remover(&g, r), 0);
        }
    }

    #[test]
    fn full_subgroup_transversal() {
        let g = s3();
        let t = right_transversal(&g, &g.whole());
        assert_eq!(t.reps(), &[0]);
    }

    #[test]
    fn double_cosets_in_s3() {
        let g = s3();
        let transposition = (0..6).find(|&x| g.element_order(x) == 2).unwrap();
        let u = g.cyclic_subgroup(transposition);
        let r = double_coset_reps(&g, &u, &u);
        assert_eq!(r.len(), 2);
        assert!(validate_double_coset_reps(&g, &u, &u, &r).is_ok());
        assert!(validate_double_coset_reps(&g, &u, &u, &[0]).is_err());
        assert_eq!(double_coset_reps(&g, &g.whole(), &u), vec![0]);
    }

    #[test]
    fn lifted_transversals() {
        let g = s3();
        let a3 = g.commutator_subgroup(&g.whole());
        let transposition = (0..6).find(|&x| g.element_order(x) == 2).unwrap();
        let v = g.cyclic_subgroup(transposition);
        let r = double_coset_reps(&g, &a3, &v);
        let inner = double_coset_inner_transversals(&g, &a3, &v, &r);
        let t = lift_double_coset_transversal(&g, &a3, &v, &r, &inner).unwrap();
        assert_eq!(t.len(), 2);
        assert!(lift_double_coset_transversal(&g, &a3, &v, &[0, transposition, 1], &inner).is_err());
    }

    #[test]
    fn cores() {
        let g = s3();
        let transposition = (0..6).find(|&x| g.element_order(x) == 2).unwrap();
        let u = g.cyclic_subgroup(transposition);
        assert_eq!(g.normal_core(&u).order(), 1);
        let a3 = g.commutator_subgroup(&g.whole());
        assert_eq!(g.normal_core(&a3), a3);
        assert_eq!(g.normal_core(&g.whole()), g.whole());
    }

    #[test]
    fn abelianizations() {
        assert_eq!(s3().abelianization().group, FgAbGroup::cyclic(2));
        let q8 = catalog::by_name("Q8").unwrap();
        assert_eq!(q8.abelianization().group, FgAbGroup::new(0, vec![2, 2]).unwrap());
        let (c4, _) = c4();
        let ab = c4.abelianization();
        assert_eq!(ab.group, FgAbGroup::cyclic(4));
    }

    #[test]
    fn cross_parent_comparison_errors() {
        let a = s3();
        let b = s3();
        assert_eq!(a.whole().same_as(&b.whole()), Err(GroupError::CrossParent));
        assert_eq!(a.whole().same_as(&a.whole()), Ok(true));
    }

    #[test]
    fn group_spec_parsing() {
        let spec: GroupSpec = serde_json::from_str(r#"{"degree":3,"perm_generators":[[1,2,0],[1,0,2]]}"#).unwrap();
        assert_eq!(spec.build().unwrap().order(), 6);
        let spec: GroupSpec = serde_json::from_str(r#"{"cayley_table":[[0,1],[1,0]]}"#).unwrap();
        let g = spec.build().unwrap();
        let s: SubgroupSpec = serde_json::from_str(r#"{"generators":[1]}"#).unwrap();
        assert_eq!(s.build(&g).unwrap().order(), 2);
    }
}
