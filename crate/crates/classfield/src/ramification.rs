//! Abstract ramification over a finite model `d: G → ℤ/m` with distinguished generator `ω = 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbHom, FgAbGroup};
use crate::group::{Elem, FiniteGroup, GroupError, GroupSpec, Subgroup};
use crate::mackey::{MackeyError, RicFunctor};
use crate::report::Report;
use crate::system::SubgroupSystem;
use crate::transfer::AbelianizationSystem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RamificationError {
    #[error("invalid ramification datum: {0}")]
    InvalidDatum(String),
    #[error("{0} is not a subgroup of {1}")]
    NotContained(String, String),
    #[error("d vanishes on the subgroup modulo the horizon: f = {f}, m = {modulus}")]
    InertiaTrivialHorizon { f: i64, modulus: i64 },
    #[error("extension is ramified: I_U has order {inner}, I_H has order {outer}")]
    NotUnramified { outer: usize, inner: usize },
    #[error("{0} is not normal in the ambient subgroup")]
    NotNormal(String),
    #[error("element {0} has d_H = 0 and is not a Frobenius candidate")]
    NotFrobeniusCandidate(Elem),
    #[error("finite model too shallow: f = {found} but the P-part of the multiplicity is {expected}")]
    DepthInsufficient { expected: i64, found: i64 },
    #[error("coset of {0} contains no Frobenius lift in the finite model")]
    NoLiftInModel(Elem),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
}

// ---------------------------------------------------------------- arithmetic

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> BTreeSet<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// `(P(n), P′(n))`.
pub fn p_parts(n: u64, primes: &BTreeSet<u64>) -> (u64, u64) {
    assert!(n >= 1, "p_parts needs a positive integer");
    factorize(n).into_iter().fold(
        (1, 1),
        |(a, b), (p, e)| {
            if primes.contains(&p) {
                (a * p.pow(e), b)
            } else {
                (a, b * p.pow(e))
            }
        },
    )
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `nΩ ≤ ℤ/m` together with its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PowerSubgroup {
    pub generator: i64,
    pub index: i64,
    pub index_divides_n: bool,
    /// The index equals the part of `P(n)` visible modulo `m`.
    pub p_part_law: bool,
}

pub fn power_subgroup(modulus: i64, n: u64, primes: &BTreeSet<u64>) -> PowerSubgroup {
    assert!(modulus >= 1 && n >= 1);
    let index = gcd(n as i64, modulus);
    let (pn, _) = p_parts(n, primes);
    PowerSubgroup {
        generator: (n as i64).rem_euclid(modulus),
        index,
        index_divides_n: n as i64 % index == 0,
        p_part_law: index == gcd(pn as i64, modulus),
    }
}

/// `∏ p^{n(p)}` with exponents in `ℕ ∪ {∞}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupernaturalNumber {
    finite: BTreeMap<u64, u32>,
    infinite: BTreeSet<u64>,
}

impl SupernaturalNumber {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_u64(n: u64) -> Self {
        SupernaturalNumber { finite: factorize(n).into_iter().collect(), infinite: BTreeSet::new() }
    }

    pub fn prime_power_infinite(p: u64) -> Self {
        SupernaturalNumber { finite: BTreeMap::new(), infinite: [p].into() }
    }

    /// Exponent of `p`; `None` means `∞`.
    pub fn exponent(&self, p: u64) -> Option<u32> {
        if self.infinite.contains(&p) {
            None
        } else {
            Some(self.finite.get(&p).copied().unwrap_or(0))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.infinite.is_empty()
    }

    pub fn value(&self) -> Option<u64> {
        self.is_finite().then(|| self.finite.iter().map(|(p, &e)| p.pow(e)).product())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let infinite: BTreeSet<u64> = self.infinite.union(&other.infinite).copied().collect();
        let mut finite = self.finite.clone();
        for (&p, &e) in &other.finite {
            *finite.entry(p).or_insert(0) += e;
        }
        finite.retain(|p, e| *e > 0 && !infinite.contains(p));
        SupernaturalNumber { finite, infinite }
    }

    pub fn divides(&self, other: &Self) -> bool {
        let primes = self.finite.keys().chain(&self.infinite);
        primes.into_iter().all(|&p| match (self.exponent(p), other.exponent(p)) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        })
    }

    /// Restriction to the primes in `primes`.
    pub fn p_part(&self, primes: &BTreeSet<u64>) -> Self {
        SupernaturalNumber {
            finite: self.finite.iter().filter(|(p, _)| primes.contains(p)).map(|(&p, &e)| (p, e)).collect(),
            infinite: self.infinite.intersection(primes).copied().collect(),
        }
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut primes: Vec<(u64, Option<u32>)> = self.finite.iter().map(|(&p, &e)| (p, Some(e))).collect();
        primes.extend(self.infinite.iter().map(|&p| (p, None)));
        primes.sort();
        if primes.is_empty() {
            return write!(f, "1");
        }
        for (k, (p, e)) in primes.iter().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            match e {
                None => write!(f, "{p}^∞")?,
                Some(1) => write!(f, "{p}")?,
                Some(e) => write!(f, "{p}^{e}")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- the datum

#[derive(Debug, Clone)]
pub struct RamificationDatum {
    group: Arc<FiniteGroup>,
    modulus: i64,
    d: Vec<i64>,
    primes: BTreeSet<u64>,
    kernel: Subgroup,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RamificationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    pub modulus: i64,
    pub d: Vec<i64>,
    #[serde(rename = "primes_P", default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
}

/// `d_H: H → ℤ/(m/f_H)`, defined when the horizon exceeds one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalDegree {
    pub f: i64,
    pub horizon: i64,
}

impl LocalDegree {
    pub fn apply(&self, datum: &RamificationDatum, x: Elem) -> i64 {
        datum.d(x) / self.f
    }
}

impl RamificationDatum {
    /// `primes` defaults to the primes of `|G|·m`.
    pub fn new(
        group: Arc<FiniteGroup>,
        modulus: i64,
        d: Vec<i64>,
        primes: Option<BTreeSet<u64>>,
    ) -> Result<Self, RamificationError> {
        let bad = |s: String| Err(RamificationError::InvalidDatum(s));
        if modulus < 1 {
            return bad(format!("modulus {modulus} must be positive"));
        }
        if d.len() != group.order() {
            return bad(format!("{} images for a group of order {}", d.len(), group.order()));
        }
        let d: Vec<i64> = d.into_iter().map(|x| x.rem_euclid(modulus)).collect();
        for a in group.elements() {
            for b in group.elements() {
                if d[group.mul(a, b)] != (d[a] + d[b]) % modulus {
                    return bad(format!("d is not a homomorphism at ({a}, {b})"));
                }
            }
        }
        if d.iter().fold(modulus, |g, &x| gcd(g, x)) != 1 {
            return bad("d is not surjective".into());
        }
        let needed: BTreeSet<u64> =
            prime_divisors(group.order() as u64).union(&prime_divisors(modulus as u64)).copied().collect();
        let primes = match primes {
            None => needed,
            Some(p) => {
                if let Some(q) = p.iter().find(|&&q| factorize(q) != vec![(q, 1)]) {
                    return bad(format!("{q} is not a prime"));
                }
                if let Some(q) = needed.iter().find(|q| !p.contains(q)) {
                    return bad(format!("P must contain {q}"));
                }
                p
            }
        };
        let kernel_elems: Vec<Elem> = group.elements().filter(|&x| d[x] == 0).collect();
        let kernel = group.subgroup_from_elements(&kernel_elems)?;
        Ok(RamificationDatum { group, modulus, d, primes, kernel })
    }

    pub fn from_spec(group: Arc<FiniteGroup>, spec: &RamificationSpec) -> Result<Self, RamificationError> {
        let primes = spec.primes.as_ref().map(|p| p.iter().copied().collect());
        RamificationDatum::new(group, spec.modulus, spec.d.clone(), primes)
    }

    pub fn to_spec(&self) -> RamificationSpec {
        RamificationSpec {
            group: None,
            modulus: self.modulus,
            d: self.d.clone(),
            primes: Some(self.primes.iter().copied().collect()),
        }
    }

    /// `d` injective onto `ℤ/|G|`, for `G` cyclic with generator `generator`.
    pub fn cyclic_identity(group: Arc<FiniteGroup>, generator: Elem) -> Result<Self, RamificationError> {
        let n = group.order();
        let mut d = vec![0; n];
        let mut x = 0;
        for k in 0..n {
            d[x] = k as i64;
            x = group.mul(x, generator);
        }
        if x != 0 || d.iter().filter(|&&v| v == 0).count() != 1 {
            return Err(RamificationError::InvalidDatum(format!("{generator} does not generate the group")));
        }
        RamificationDatum::new(group, n as i64, d, None)
    }

    /// Every surjection `G → ℤ/m`, in lexicographic order of the image table.
    pub fn all_surjections(group: Arc<FiniteGroup>, modulus: i64) -> Vec<RamificationDatum> {
        let ab = group.abelianization();
        let orders: Vec<i64> = (0..ab.group.ngens()).map(|j| ab.group.generator_order(j)).collect();
        // admissible image of each generator: o·c ≡ 0 mod m
        let choices: Vec<Vec<i64>> =
            orders.iter().map(|&o| (0..modulus).filter(|c| (o * c).rem_euclid(modulus) == 0).collect()).collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; choices.len()];
        loop {
            let c: Vec<i64> = idx.iter().zip(&choices).map(|(&i, ch)| ch[i]).collect();
            let d: Vec<i64> = group
                .elements()
                .map(|x| ab.image(x).iter().zip(&c).map(|(a, b)| a * b).sum::<i64>().rem_euclid(modulus))
                .collect();
            if let Ok(r) = RamificationDatum::new(group.clone(), modulus, d, None) {
                out.push(r);
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        out.sort_by(|a, b| a.d.cmp(&b.d));
        out.dedup_by(|a, b| a.d == b.d);
        out
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn primes(&self) -> &BTreeSet<u64> {
        &self.primes
    }

    /// Least non-negative representative of `d(x)`.
    pub fn d(&self, x: Elem) -> i64 {
        self.d[x]
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    /// `Ω = ℤ/m`.
    pub fn omega(&self) -> FgAbGroup {
        FgAbGroup::cyclic(self.modulus)
    }

    /// `I_H = H ∩ ker d`.
    pub fn inertia(&self, h: &Subgroup) -> Subgroup {
        self.group.intersection(h, &self.kernel)
    }

    /// `f_H = [ℤ/m : d(H)]`.
    pub fn f(&self, h: &Subgroup) -> i64 {
        h.elements().iter().fold(self.modulus, |g, &x| gcd(g, self.d[x]))
    }

    /// `(e_{H|K}, f_{H|K})`.
    pub fn degrees(&self, h: &Subgroup, k: &Subgroup) -> Result<(usize, i64), RamificationError> {
        self.require_sub(k, h)?;
        let e = self.inertia(h).order() / self.inertia(k).order();
        Ok((e, self.f(k) / self.f(h)))
    }

    pub fn is_unramified(&self, h: &Subgroup, k: &Subgroup) -> Result<bool, RamificationError> {
        Ok(self.degrees(h, k)?.0 == 1)
    }

    pub fn is_totally_ramified(&self, h: &Subgroup, k: &Subgroup) -> Result<bool, RamificationError> {
        Ok(self.degrees(h, k)?.1 == 1)
    }

    fn require_sub(&self, k: &Subgroup, h: &Subgroup) -> Result<(), RamificationError> {
        if !k.is_subgroup_of(h) {
            return Err(RamificationError::NotContained(fmt_sub(k), fmt_sub(h)));
        }
        Ok(())
    }

    pub fn local_degree(&self, h: &Subgroup) -> Result<LocalDegree, RamificationError> {
        let f = self.f(h);
        let horizon = self.modulus / f;
        if horizon <= 1 {
            return Err(RamificationError::InertiaTrivialHorizon { f, modulus: self.modulus });
        }
        Ok(LocalDegree { f, horizon })
    }

    /// `d_H(x)` for `x ∈ H`.
    pub fn d_h(&self, h: &Subgroup, x: Elem) -> Result<i64, RamificationError> {
        Ok(self.local_degree(h)?.apply(self, x))
    }

    fn check_unramified_normal(&self, h: &Subgroup, u: &Subgroup) -> Result<(), RamificationError> {
        self.require_sub(u, h)?;
        if !self.group.is_normal_in(u, h) {
            return Err(RamificationError::NotNormal(fmt_sub(u)));
        }
        let (outer, inner) = (self.inertia(h).order(), self.inertia(u).order());
        if outer != inner {
            return Err(RamificationError::NotUnramified { outer, inner });
        }
        Ok(())
    }

    /// `φ_{H|U}`: the coset of an element with `d_H = 1`.
    pub fn frobenius_element(&self, h: &Subgroup, u: &Subgroup) -> Result<FrobeniusElement, RamificationError> {
        self.check_unramified_normal(h, u)?;
        let ld = self.local_degree(h)?;
        let rep =
            h.elements().iter().copied().find(|&x| ld.apply(self, x) == 1).expect("d_H is surjective onto its horizon");
        let mut coset: Vec<Elem> = u.elements().iter().map(|&y| self.group.mul(rep, y)).collect();
        coset.sort_unstable();
        let rep = coset[0];
        Ok(FrobeniusElement { rep, coset, order: h.order() / u.order() })
    }

    /// `Σ = ⟨h⟩·I_U` with verdicts for the three Frobenius-group axioms.
    pub fn frobenius_group(
        &self,
        x: Elem,
        h: &Subgroup,
        u: &Subgroup,
        certify: bool,
    ) -> Result<FrobeniusGroup, RamificationError> {
        self.require_sub(u, h)?;
        if !h.contains(x) {
            return Err(RamificationError::NotContained(format!("{{{x}}}"), fmt_sub(h)));
        }
        let ld = self.local_degree(h)?;
        let mult = ld.apply(self, x);
        if mult == 0 {
            return Err(RamificationError::NotFrobeniusCandidate(x));
        }
        let (p_mult, p_prime) = p_parts(mult as u64, &self.primes);
        let g = &self.group;
        let i_u = self.inertia(u);
        let sigma = g.join(&g.cyclic_subgroup(x), &i_u);
        let mut report = Report::new();
        report.record("contains_h", (!sigma.contains(x)).then(|| format!("h={x}")));
        let f_rel = self.f(&sigma) / self.f(h);
        if f_rel != p_mult as i64 {
            return Err(RamificationError::DepthInsufficient { expected: p_mult as i64, found: f_rel });
        }
        report.pass("degree");
        let i_sigma = self.inertia(&sigma);
        report.record(
            "inertia",
            (i_sigma != i_u).then(|| format!("|I_Σ| = {}, |I_U| = {}", i_sigma.order(), i_u.order())),
        );
        let product = g.product_set(&g.cyclic_subgroup(x), &i_u).ok();
        report.record("product", (product.as_ref() != Some(&sigma)).then(|| "⟨h⟩·I_U is not a subgroup".to_string()));
        let mut unique = None;
        if certify {
            let others: Vec<Subgroup> = g
                .all_subgroups()
                .into_iter()
                .filter(|s| {
                    s.is_subgroup_of(h)
                        && s.contains(x)
                        && self.f(s) / self.f(h) == p_mult as i64
                        && self.inertia(s) == i_u
                })
                .collect();
            let ok = others.len() == 1 && others[0] == sigma;
            report.record("unique", (!ok).then(|| format!("{} subgroups satisfy the axioms", others.len())));
            unique = Some(ok);
        }
        Ok(FrobeniusGroup {
            sigma,
            multiplicity: mult,
            p_part: p_mult as i64,
            p_prime_part: p_prime as i64,
            unique,
            report,
        })
    }

    /// Elements of the left coset `target·U` with `d_H ≠ 0`.
    pub fn frobenius_lifts(&self, h: &Subgroup, u: &Subgroup, target: Elem) -> Result<Vec<Elem>, RamificationError> {
        self.require_sub(u, h)?;
        if !h.contains(target) {
            return Err(RamificationError::NotContained(format!("{{{target}}}"), fmt_sub(h)));
        }
        let ld = self.local_degree(h)?;
        let mut lifts: Vec<Elem> =
            u.elements().iter().map(|&y| self.group.mul(target, y)).filter(|&x| ld.apply(self, x) != 0).collect();
        lifts.sort_unstable();
        if lifts.is_empty() {
            return Err(RamificationError::NoLiftInModel(target));
        }
        Ok(lifts)
    }

    /// `{I_H}` as an abelianization system.
    pub fn inertia_system(&self, system: Arc<SubgroupSystem>) -> Result<AbelianizationSystem, Report> {
        let assignment = system.base().iter().map(|h| self.inertia(h)).collect();
        AbelianizationSystem::new(system, assignment)
    }
}

fn fmt_sub(h: &Subgroup) -> String {
    format!("{:?}", h.elements())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusElement {
    /// Least element of the coset.
    pub rep: Elem,
    pub coset: Vec<Elem>,
    /// Order of `H/U`, which `φ` generates.
    pub order: usize,
}

#[derive(Debug, Clone)]
pub struct FrobeniusGroup {
    pub sigma: Subgroup,
    pub multiplicity: i64,
    pub p_part: i64,
    pub p_prime_part: i64,
    pub unique: Option<bool>,
    pub report: Report,
}

/// `Ω_d`: value `Ω` everywhere, `res = ×e`, `ind = ×f`, `con = id`.
pub fn omega_functor(
    d: &RamificationDatum,
    system: Arc<SubgroupSystem>,
    omega: &FgAbGroup,
) -> Result<RicFunctor, MackeyError> {
    let n = system.len();
    let s = system.clone();
    let deg = |h, i| d.degrees(s.subgroup(h), s.subgroup(i)).map_err(|e| MackeyError::Structure(e.to_string()));
    RicFunctor::build(
        system,
        vec![omega.clone(); n],
        |h, i| Ok(AbHom::scalar(omega, deg(h, i)?.0 as i64)),
        |h, i| Ok(AbHom::scalar(omega, deg(h, i)?.1)),
        |_, _| Ok(AbHom::identity(omega)),
    )
}
