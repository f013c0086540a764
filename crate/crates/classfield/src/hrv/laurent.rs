//! Truncated iterated Laurent series `F_p((T₁))…((T_n))` over a box of exponents.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rlo::RloVec;
use super::HrvError;

/// Exponent bounds `lo[i] ≤ μ_i ≤ hi[i]`; `T₁` is coordinate 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    pub fn symmetric(rank: usize, radius: i64) -> Window {
        Window { lo: vec![-radius; rank], hi: vec![radius; rank] }
    }

    pub fn contains(&self, e: &RloVec) -> bool {
        e.len() == self.lo.len() && e.0.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x <= h)
    }

    /// Every exponent of the box, in increasing order.
    pub fn points(&self) -> Vec<RloVec> {
        let mut out = vec![RloVec(Vec::new())];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            out = out.into_iter().flat_map(|v| (*l..=*h).map(move |x| v.extend_outer(x))).collect();
        }
        out.sort();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentField {
    pub p: u64,
    pub rank: usize,
    pub window: Window,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl LaurentField {
    /// `rank = 0` gives the prime field itself.
    pub fn new(p: u64, rank: usize, window: Window) -> Result<Self, HrvError> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(HrvError::InvalidField(format!("{p} is not a supported prime")));
        }
        if window.lo.len() != rank || window.hi.len() != rank {
            return Err(HrvError::InvalidField(format!("window has the wrong length for rank {rank}")));
        }
        if let Some(i) = (0..rank).find(|&i| window.lo[i] > window.hi[i]) {
            return Err(HrvError::InvalidField(format!("empty window in variable T{}", i + 1)));
        }
        Ok(LaurentField { p, rank, window })
    }

    pub fn symmetric(p: u64, rank: usize, radius: i64) -> Result<Self, HrvError> {
        LaurentField::new(p, rank, Window::symmetric(rank, radius))
    }

    /// `F_p((T₁))…((T_{n-1}))`, the residue field of the outer order.
    pub fn residue_field(&self) -> Result<LaurentField, HrvError> {
        if self.rank == 0 {
            return Err(HrvError::InvalidField("the prime field has no residue field".into()));
        }
        let r = self.rank - 1;
        LaurentField::new(self.p, r, Window { lo: self.window.lo[..r].to_vec(), hi: self.window.hi[..r].to_vec() })
    }

    /// The first `r` variables.
    pub fn truncated(&self, r: usize) -> Result<LaurentField, HrvError> {
        let mut f = self.clone();
        while f.rank > r {
            f = f.residue_field()?;
        }
        Ok(f)
    }

    fn reduce(&self, c: i64) -> u64 {
        c.rem_euclid(self.p as i64) as u64
    }

    fn inv_coeff(&self, a: u64) -> u64 {
        let (mut base, mut e, mut acc) = (a % self.p, self.p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }
}

/// A finite sum `Σ a_μ T^μ` with `μ` in the window. `exact` is false once a term has been
/// dropped by truncation somewhere in the element's history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentElement {
    field: LaurentField,
    support: BTreeMap<RloVec, u64>,
    exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exp: Vec<i64>,
    pub coeff: i64,
}

/// JSON form of an element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub p: u64,
    pub rank: usize,
    pub window: Window,
    pub support: Vec<Term>,
    #[serde(default = "default_exact")]
    pub exact: bool,
}

fn default_exact() -> bool {
    true
}

impl LaurentElement {
    pub fn zero(field: &LaurentField) -> Self {
        LaurentElement { field: field.clone(), support: BTreeMap::new(), exact: true }
    }

    pub fn from_terms(field: &LaurentField, terms: impl IntoIterator<Item = (RloVec, i64)>) -> Result<Self, HrvError> {
        let mut x = LaurentElement::zero(field);
        for (e, c) in terms {
            if !field.window.contains(&e) {
                return Err(HrvError::WindowOverflow(e));
            }
            let entry = x.support.entry(e).or_insert(0);
            *entry = (*entry + field.reduce(c)) % field.p;
        }
        x.support.retain(|_, c| *c != 0);
        Ok(x)
    }

    pub fn monomial(field: &LaurentField, exp: RloVec, coeff: i64) -> Result<Self, HrvError> {
        LaurentElement::from_terms(field, [(exp, coeff)])
    }

    pub fn one(field: &LaurentField) -> Result<Self, HrvError> {
        LaurentElement::monomial(field, RloVec::zero(field.rank), 1)
    }

    /// `T_{i+1}`.
    pub fn variable(field: &LaurentField, i: usize) -> Result<Self, HrvError> {
        LaurentElement::monomial(field, RloVec::unit(field.rank, i), 1)
    }

    pub fn from_spec(spec: &ElementSpec) -> Result<Self, HrvError> {
        let field = LaurentField::new(spec.p, spec.rank, spec.window.clone())?;
        let mut x = LaurentElement::from_terms(&field, spec.support.iter().map(|t| (RloVec(t.exp.clone()), t.coeff)))?;
        x.exact = spec.exact;
        Ok(x)
    }

    pub fn to_spec(&self) -> ElementSpec {
        ElementSpec {
            p: self.field.p,
            rank: self.field.rank,
            window: self.field.window.clone(),
            support: self.support.iter().map(|(e, &c)| Term { exp: e.0.clone(), coeff: c as i64 }).collect(),
            exact: self.exact,
        }
    }

    pub fn field(&self) -> &LaurentField {
        &self.field
    }

    pub fn support(&self) -> &BTreeMap<RloVec, u64> {
        &self.support
    }

    pub fn coeff(&self, e: &RloVec) -> u64 {
        self.support.get(e).copied().unwrap_or(0)
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.support.len() == 1
    }

    /// The RLO-minimal term.
    pub fn leading(&self) -> Option<(&RloVec, u64)> {
        self.support.iter().next().map(|(e, &c)| (e, c))
    }

    /// Order in the outermost variable.
    pub fn outer_order(&self) -> Option<i64> {
        self.support.keys().filter_map(|e| e.last()).min()
    }

    fn same_field(&self, other: &Self) -> Result<(), HrvError> {
        if self.field != other.field {
            return Err(HrvError::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, HrvError> {
        self.same_field(other)?;
        let p = self.field.p;
        let mut support = self.support.clone();
        for (e, &c) in &other.support {
            let entry = support.entry(e.clone()).or_insert(0);
            *entry = (*entry + c) % p;
        }
        support.retain(|_, c| *c != 0);
        Ok(LaurentElement { field: self.field.clone(), support, exact: self.exact && other.exact })
    }

    pub fn neg(&self) -> Self {
        let p = self.field.p;
        let support = self.support.iter().map(|(e, &c)| (e.clone(), (p - c) % p)).collect();
        LaurentElement { field: self.field.clone(), support, exact: self.exact }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, HrvError> {
        self.add(&other.neg())
    }

    /// Product truncated to the window.
    pub fn mul(&self, other: &Self) -> Result<Self, HrvError> {
        self.same_field(other)?;
        let p = self.field.p;
        let mut support: BTreeMap<RloVec, u64> = BTreeMap::new();
        let mut exact = self.exact && other.exact;
        for (a, &x) in &self.support {
            for (b, &y) in &other.support {
                let e = a + b;
                if !self.field.window.contains(&e) {
                    exact = false;
                    continue;
                }
                let entry = support.entry(e).or_insert(0);
                *entry = (*entry + x * y) % p;
            }
        }
        support.retain(|_, c| *c != 0);
        Ok(LaurentElement { field: self.field.clone(), support, exact })
    }

    /// Multiplication by `T^e`.
    pub fn shift(&self, e: &RloVec) -> Self {
        let mut exact = self.exact;
        let support = self
            .support
            .iter()
            .filter_map(|(a, &c)| {
                let s = a + e;
                if self.field.window.contains(&s) {
                    Some((s, c))
                } else {
                    exact = false;
                    None
                }
            })
            .collect();
        LaurentElement { field: self.field.clone(), support, exact }
    }

    /// Long division in increasing order over the window; exact only for monomials.
    pub fn inv(&self) -> Result<Self, HrvError> {
        let (mu, a) = self.leading().ok_or(HrvError::ZeroInverse)?;
        let mu = mu.clone();
        let f = &self.field;
        let p = f.p;
        let a_inv = f.inv_coeff(a);
        let start = -&mu;
        let mut y: BTreeMap<RloVec, u64> = BTreeMap::new();
        let mut exact = self.exact && self.is_monomial() && f.window.contains(&start);
        for nu in f.window.points().into_iter().filter(|nu| *nu >= start) {
            let kappa = &nu + &mu;
            let mut s = u64::from(kappa.0.iter().all(|&k| k == 0));
            for (alpha, &c) in self.support.iter().skip(1) {
                let idx = &kappa - alpha;
                if let Some(&yv) = y.get(&idx) {
                    s = (s + p - c * yv % p) % p;
                }
            }
            let coeff = a_inv * s % p;
            if coeff != 0 {
                y.insert(nu, coeff);
            }
        }
        if !f.window.contains(&start) {
            exact = false;
        }
        Ok(LaurentElement { field: f.clone(), support: y, exact })
    }

    pub fn pow(&self, k: i64) -> Result<Self, HrvError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = LaurentElement::one(&self.field)?;
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// `q`: coefficients at outer exponent zero, as an element of the residue field.
    pub fn residue(&self) -> Result<LaurentElement, HrvError> {
        if self.outer_order().is_some_and(|w| w < 0) {
            return Err(HrvError::NotIntegral);
        }
        let rf = self.field.residue_field()?;
        let support = self.support.iter().filter(|(e, _)| e.last() == Some(0)).map(|(e, &c)| (e.inner(), c)).collect();
        Ok(LaurentElement { field: rf, support, exact: self.exact })
    }

    /// Embeds a residue-field element at outer exponent zero of `field`.
    pub fn lift(residue: &LaurentElement, field: &LaurentField) -> Result<LaurentElement, HrvError> {
        if field.residue_field()? != residue.field {
            return Err(HrvError::FieldMismatch);
        }
        if !field.window.contains(&RloVec::zero(field.rank)) {
            return Err(HrvError::WindowOverflow(RloVec::zero(field.rank)));
        }
        let support = residue.support.iter().map(|(e, &c)| (e.extend_outer(0), c)).collect();
        Ok(LaurentElement { field: field.clone(), support, exact: residue.exact })
    }

    /// Between 1 and `max_terms` random terms with exponents in `[lo/2, hi/2]`, so that
    /// products of two samples stay in the window.
    pub fn random<R: Rng>(field: &LaurentField, rng: &mut R, max_terms: usize) -> LaurentElement {
        let w = &field.window;
        let room: i64 = (0..field.rank).map(|i| w.hi[i] / 2 - w.lo[i] / 2 + 1).product();
        let terms = rng.gen_range(1..=max_terms.max(1)).min(room as usize);
        let mut x = LaurentElement::zero(field);
        while x.support.len() < terms {
            let e = RloVec((0..field.rank).map(|i| rng.gen_range(w.lo[i] / 2..=w.hi[i] / 2)).collect());
            let c = rng.gen_range(1..field.p);
            x.support.insert(e, c);
        }
        x
    }
}
