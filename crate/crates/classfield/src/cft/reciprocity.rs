//! Fesenko–Neukirch data `(C, v)` over a ramification datum, and the reciprocity maps
//! `Υ: Π_𝔎 → Ĥ⁰_ℰ(C)`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use super::representation::{
    induction_representation, tautological_cft, validate_rep_morphism, InductionRepresentation, RepMorphism,
    Tautological,
};
use super::spectrum::{PairId, Spectrum};
use super::tate::tate_h0;
use super::valuation::{validate_valuation, ValuationFamily};
use super::CftError;
use crate::abelian::{AbHom, FgAbGroup, Order, SubgroupEmbedding};
use crate::group::{Elem, Subgroup};
use crate::mackey::RicFunctor;
use crate::ramification::{RamificationDatum, RamificationError};
use crate::report::Report;
use crate::system::SubId;
use crate::transfer::AbelianizationSystem;

/// `Υ_{(H,U)}: (H/U)^ab → Ĥ⁰(C)(H, U)` with its certificates.
#[derive(Debug, Clone, Serialize)]
pub struct ReciprocityTable {
    pub pair: (SubId, SubId),
    pub source: FgAbGroup,
    /// Elements of `H` mapping to the generators of the source.
    pub source_lifts: Vec<Elem>,
    pub target: FgAbGroup,
    /// Lifts of the target generators to `C(H)`.
    pub target_lifts: Vec<Vec<i64>>,
    pub map: AbHom,
    pub is_iso: bool,
    pub lift_independent: bool,
    pub prime_independent: bool,
    pub multiplicative: bool,
}

/// `Υ̃_{(H,U)}(h)` together with the Frobenius group it was computed on.
#[derive(Debug, Clone)]
pub struct TildeValue {
    pub sigma: Subgroup,
    pub multiplicity: i64,
    pub value: Vec<i64>,
    pub prime_independent: bool,
}

/// `Υ` as a morphism of representations with one table per pair.
#[derive(Debug, Clone)]
pub struct ReciprocityMorphism {
    pub morphism: RepMorphism,
    pub tables: Vec<ReciprocityTable>,
    pub report: Report,
}

/// A valuation family over a ramification datum, on a spectrum of the functor's system.
#[derive(Debug)]
pub struct ReciprocityData {
    pub valuation: ValuationFamily,
    pub datum: RamificationDatum,
    pub spectrum: Arc<Spectrum>,
    pub tautological: Tautological,
    pub induction: InductionRepresentation,
    fnd: OnceLock<Report>,
}

impl ReciprocityData {
    pub fn new(
        valuation: ValuationFamily,
        datum: RamificationDatum,
        spectrum: Arc<Spectrum>,
    ) -> Result<Self, CftError> {
        let s = spectrum.system().clone();
        if valuation.functor.system().base() != s.base() {
            return Err(CftError::Structure("valuation and spectrum live on different subgroup systems".into()));
        }
        if **datum.group() != *s.group() {
            return Err(CftError::Structure("ramification datum lives on a different group".into()));
        }
        let tautological = tautological_cft(spectrum.clone(), &AbelianizationSystem::commutators(s))?;
        let induction = induction_representation(&valuation.functor, spectrum.clone())?;
        Ok(ReciprocityData { valuation, datum, spectrum, tautological, induction, fnd: OnceLock::new() })
    }

    pub fn functor(&self) -> &Arc<RicFunctor> {
        &self.valuation.functor
    }

    fn sub(&self, h: SubId) -> &Subgroup {
        self.spectrum.system().subgroup(h)
    }

    fn is_unramified(&self, p: PairId) -> bool {
        let (h, u) = self.spectrum.pair(p);
        self.datum.inertia(self.sub(h)) == self.datum.inertia(self.sub(u))
    }

    fn kernel(&self, h: SubId) -> SubgroupEmbedding {
        self.valuation.component(h).kernel()
    }

    /// Conditions (i)–(iii) on every unramified pair of the spectrum, plus the valuation axioms.
    pub fn validate_urfnd(&self) -> Report {
        let mut report = Report::new();
        report.extend(validate_valuation(&self.valuation, &self.datum));
        let s = self.spectrum.system();
        let c = self.functor();
        let v = &self.valuation;
        let omega = v.omega_generator();
        let pairs: Vec<PairId> = self.spectrum.ids().filter(|&p| self.is_unramified(p)).collect();
        let label = |p: PairId| self.spectrum.label(p);

        let norm_index = pairs.iter().find_map(|&p| {
            let (h, u) = self.spectrum.pair(p);
            let n = s.index(h, u) as i64;
            let im = v.component(h).image();
            let mut gens = Vec::new();
            for j in 0..c.value(u).ngens() {
                let y = v.omega.scale(n, &v.component(u).apply(&c.value(u).generator(j)));
                match im.pull(&y) {
                    Some(x) => gens.push(x),
                    None => return Some(format!("[H:U]·Im(v_U) ⊄ Im(v_H) at {}", label(p))),
                }
            }
            let q = im.group.quotient(&gens);
            if q.group.order() != Order::Finite(n as u64) {
                return Some(format!("order {} ≠ {n} at {}", q.group.order(), label(p)));
            }
            let w = match im.pull(&omega) {
                Some(w) => q.project(&w),
                None => return Some(format!("ω ∉ Im(v_H) at {}", label(p))),
            };
            (q.group.element_order(&w) != Some(n)).then(|| format!("ω̄ does not generate at {}", label(p)))
        });
        report.record("urfnd.norm_index", norm_index);

        let kernels = pairs.iter().find_map(|&p| {
            let (h, u) = self.spectrum.pair(p);
            let onto = c.ind(h, u).restricted(&self.kernel(u), &self.kernel(h)).is_some_and(|m| m.is_surjective());
            (!onto).then(|| format!("ind: ker v_U → ker v_H is not onto at {}", label(p)))
        });
        report.record("urfnd.kernel_induction", kernels);

        let bound = pairs.iter().find_map(|&p| {
            let (h, u) = self.spectrum.pair(p);
            let n = s.index(h, u) as u64;
            match tate_h0(c, h, u).map(|q| q.group.order()) {
                Ok(Order::Finite(k)) if k <= n => None,
                Ok(o) => Some(format!("|Ĥ⁰| = {o} > {n} at {}", label(p))),
                Err(e) => Some(e.to_string()),
            }
        });
        report.record("urfnd.h0_bound", bound);
        report
    }

    /// The defining conditions: urFND plus exactness of
    /// `1 → ker v_U → ker v_V → ker v_V → ker v_U → 1` on unramified pairs `(U, V)`.
    pub fn validate_fnd(&self) -> Report {
        self.fnd
            .get_or_init(|| {
                let mut report = self.validate_urfnd();
                let exact = self.spectrum.ids().filter(|&p| self.is_unramified(p)).find_map(|p| {
                    let (u, v) = self.spectrum.pair(p);
                    (u != v).then(|| self.kernel_sequence_witness(u, v)).flatten()
                });
                report.record("fnd.exact", exact);
                report
            })
            .clone()
    }

    fn frobenius_con(&self, u: SubId, v: SubId) -> Result<AbHom, CftError> {
        let phi = self.datum.frobenius_element(self.sub(u), self.sub(v))?;
        let c = self.functor();
        Ok(c.con(phi.rep, v).sub(&AbHom::identity(c.value(v))))
    }

    fn kernel_sequence_witness(&self, u: SubId, v: SubId) -> Option<String> {
        let c = self.functor();
        let s = self.spectrum.system();
        let at = format!("U={} V={}", s.label(u), s.label(v));
        let (ku, kv) = (self.kernel(u), self.kernel(v));
        let delta = match self.frobenius_con(u, v) {
            Ok(m) => m,
            Err(e) => return Some(format!("{e} at {at}")),
        };
        let (Some(res), Some(dk), Some(ind)) = (
            c.try_res(u, v).and_then(|m| m.restricted(&ku, &kv)),
            delta.restricted(&kv, &kv),
            c.try_ind(u, v).and_then(|m| m.restricted(&kv, &ku)),
        ) else {
            return Some(format!("maps do not preserve kernels of v at {at}"));
        };
        if !res.is_injective() {
            return Some(format!("res not injective at {at}"));
        }
        if !same_subgroup(&dk.kernel(), &res.image()) {
            return Some(format!("ker(con_φ - 1) ≠ im(res) at {at}"));
        }
        if !same_subgroup(&ind.kernel(), &dk.image()) {
            return Some(format!("ker(ind) ≠ im(con_φ - 1) at {at}"));
        }
        (!ind.is_surjective()).then(|| format!("ind not onto at {at}"))
    }

    /// Sufficient conditions: the class field axiom order on unramified pairs and exactness of
    /// `C(U) → C(V) → C(V) → C(U)` at the two middle terms.
    pub fn fesenko_criterion(&self) -> Report {
        let mut report = Report::new();
        let c = self.functor();
        let s = self.spectrum.system();
        let pairs: Vec<PairId> = self.spectrum.ids().filter(|&p| self.is_unramified(p)).collect();
        let axiom = pairs.iter().find_map(|&p| {
            let (h, u) = self.spectrum.pair(p);
            let ok = tate_h0(c, h, u).is_ok_and(|q| q.group.order() == Order::Finite(s.index(h, u) as u64));
            (!ok).then(|| format!("|Ĥ⁰| ≠ [H:U] at {}", self.spectrum.label(p)))
        });
        report.record("fesenko.class_field_axiom", axiom);
        let exact = pairs.iter().find_map(|&p| {
            let (u, v) = self.spectrum.pair(p);
            if u == v {
                return None;
            }
            let at = self.spectrum.label(p);
            let delta = match self.frobenius_con(u, v) {
                Ok(m) => m,
                Err(e) => return Some(format!("{e} at {at}")),
            };
            let (Some(res), Some(ind)) = (c.try_res(u, v), c.try_ind(u, v)) else {
                return Some(format!("missing edge at {at}"));
            };
            if !same_subgroup(&delta.kernel(), &res.image()) {
                return Some(format!("ker(con_φ - 1) ≠ im(res) at {at}"));
            }
            (!same_subgroup(&ind.kernel(), &delta.image())).then(|| format!("ker(ind) ≠ im(con_φ - 1) at {at}"))
        });
        report.record("fesenko.exact", exact);
        report
    }

    fn trivial_table(&self, p: PairId) -> ReciprocityTable {
        let source = self.tautological.quotients[p].group.clone();
        let target = self.induction.quotients[p].group.clone();
        ReciprocityTable {
            pair: self.spectrum.pair(p),
            map: AbHom::zero(&source, &target),
            is_iso: source.is_trivial() && target.is_trivial(),
            source,
            source_lifts: Vec::new(),
            target,
            target_lifts: Vec::new(),
            lift_independent: true,
            prime_independent: true,
            multiplicative: true,
        }
    }

    fn target_lifts(&self, p: PairId) -> Vec<Vec<i64>> {
        let q = &self.induction.quotients[p];
        (0..q.group.ngens()).map(|j| q.lift(&q.group.generator(j))).collect()
    }

    /// `φ^k ↦ π_H^k mod ind C(U)` on an unramified pair.
    pub fn unramified_upsilon(&self, p: PairId) -> Result<ReciprocityTable, CftError> {
        let (h, u) = self.spectrum.pair(p);
        let s = self.spectrum.system();
        let g = s.group();
        if !self.is_unramified(p) {
            return Err(CftError::NotUrFnd(format!("{} is ramified", self.spectrum.label(p))));
        }
        if h == u {
            return Ok(self.trivial_table(p));
        }
        let (hs, us) = (self.sub(h), self.sub(u));
        let phi = self.datum.frobenius_element(hs, us)?;
        let pi = self
            .valuation
            .prime_element(h)
            .ok_or_else(|| CftError::NotUrFnd(format!("no prime element in C(H={})", s.label(h))))?;
        let target = &self.induction.quotients[p];
        let source = &self.tautological.quotients[p];
        let n = phi.order;
        // exponent k with x ∈ φ^k U
        let exponent = |x: Elem| -> usize {
            let mut y = 0;
            for k in 0..n {
                if us.contains(g.mul(g.inv(y), x)) {
                    return k;
                }
                y = g.mul(y, phi.rep);
            }
            unreachable!("φ generates H/U")
        };
        let pi_bar = target.project(&pi);
        let value = |x: Elem| target.group.scale(exponent(x) as i64, &pi_bar);
        let lifts: Vec<Elem> = (0..source.group.ngens()).map(|j| source.generator_lift(j)).collect();
        let images: Vec<Vec<i64>> = lifts.iter().map(|&x| value(x)).collect();
        let map = AbHom::from_images(source.group.clone(), target.group.clone(), &images)?;
        let lift_independent = hs.elements().iter().all(|&x| map.apply(source.image(x)) == value(x));
        let ker = self.kernel(h);
        let prime_independent = (0..ker.group.ngens())
            .all(|j| target.group.is_zero(&target.project(&ker.embedding.apply(&ker.group.generator(j)))));
        Ok(ReciprocityTable {
            pair: (h, u),
            source: source.group.clone(),
            source_lifts: lifts,
            target: target.group.clone(),
            target_lifts: self.target_lifts(p),
            is_iso: map.is_isomorphism(),
            map,
            lift_independent,
            prime_independent,
            multiplicative: true,
        })
    }

    /// `ind_{H,Σ}(π_Σ^{P′(mult d_H(h))}) mod ind_{H,U} C(U)` for `h ∈ Frob_H`.
    pub fn upsilon_tilde(&self, x: Elem, p: PairId) -> Result<TildeValue, CftError> {
        let (h, u) = self.spectrum.pair(p);
        let s = self.spectrum.system();
        let fg = self.datum.frobenius_group(x, self.sub(h), self.sub(u), false)?;
        if let Some(bad) = fg.report.first_failure() {
            return Err(CftError::FrobeniusAxioms(format!(
                "{}: {}",
                bad.name,
                bad.witness.clone().unwrap_or_default()
            )));
        }
        let sigma = s.id_of(&fg.sigma).ok_or_else(|| {
            CftError::NotMackeyCover(format!("Frobenius group {:?} is not in the system", fg.sigma.elements()))
        })?;
        let ind = self
            .functor()
            .try_ind(h, sigma)
            .ok_or_else(|| CftError::NotMackeyCover(format!("Σ={} is not in 𝔖_i(H={})", s.label(sigma), s.label(h))))?;
        let pi = self
            .valuation
            .prime_element(sigma)
            .ok_or_else(|| CftError::NotFnd(format!("no prime element in C(Σ={})", s.label(sigma))))?;
        let target = &self.induction.quotients[p];
        let cs = self.functor().value(sigma);
        let value = target.project(&ind.apply(&cs.scale(fg.p_prime_part, &pi)));
        let ker = self.kernel(sigma);
        let prime_independent = (0..ker.group.ngens()).all(|j| {
            let k = ker.embedding.apply(&ker.group.generator(j));
            target.group.is_zero(&target.project(&ind.apply(&k)))
        });
        Ok(TildeValue { sigma: fg.sigma, multiplicity: fg.multiplicity, value, prime_independent })
    }

    /// `Υ̃` on every Frobenius element of `H` that the finite model represents faithfully.
    fn tilde_table(&self, p: PairId) -> Result<BTreeMap<Elem, TildeValue>, CftError> {
        let h = self.spectrum.pair(p).0;
        let mut out = BTreeMap::new();
        for &x in self.sub(h).elements() {
            match self.upsilon_tilde(x, p) {
                Ok(t) => {
                    out.insert(x, t);
                }
                Err(CftError::Ramification(
                    RamificationError::NotFrobeniusCandidate(_)
                    | RamificationError::DepthInsufficient { .. }
                    | RamificationError::InertiaTrivialHorizon { .. },
                )) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// `Υ_{(H,U)}` from Frobenius lifts, refusing data that failed FND validation unless forced.
    pub fn upsilon(&self, p: PairId, force: bool) -> Result<ReciprocityTable, CftError> {
        if !force {
            let fnd = self.validate_fnd();
            if let Some(bad) = fnd.first_failure() {
                return Err(CftError::NotFnd(format!("{}: {}", bad.name, bad.witness.clone().unwrap_or_default())));
            }
        }
        let (h, u) = self.spectrum.pair(p);
        if h == u {
            return Ok(self.trivial_table(p));
        }
        let g = self.spectrum.system().group();
        let (hs, us) = (self.sub(h), self.sub(u));
        let source = &self.tautological.quotients[p];
        let target = &self.induction.quotients[p];
        let tilde = self.tilde_table(p)?;
        let coset = |x: Elem| us.elements().iter().map(|&y| g.mul(x, y)).min().unwrap();

        // Υ′ on cosets of U, from every represented lift
        let mut upsilon_prime: BTreeMap<Elem, Vec<i64>> = BTreeMap::new();
        let mut lift_independent = true;
        for (&x, t) in &tilde {
            match upsilon_prime.get(&coset(x)) {
                Some(v) if *v != t.value => lift_independent = false,
                Some(_) => {}
                None => {
                    upsilon_prime.insert(coset(x), t.value.clone());
                }
            }
        }
        upsilon_prime.entry(coset(0)).or_insert_with(|| target.group.zero());

        let mut lifts = Vec::with_capacity(source.group.ngens());
        let mut images = Vec::with_capacity(source.group.ngens());
        for j in 0..source.group.ngens() {
            let want = source.group.generator(j);
            let x = hs
                .elements()
                .iter()
                .copied()
                .find(|&x| source.image(x) == want.as_slice() && upsilon_prime.contains_key(&coset(x)))
                .ok_or(RamificationError::NoLiftInModel(source.generator_lift(j)))?;
            lifts.push(x);
            images.push(upsilon_prime[&coset(x)].clone());
        }
        let map = AbHom::from_images(source.group.clone(), target.group.clone(), &images)?;
        // Υ′ factors through (H/U)^ab on every represented coset
        lift_independent &= hs
            .elements()
            .iter()
            .all(|&x| upsilon_prime.get(&coset(x)).is_none_or(|v| *v == map.apply(source.image(x))));

        let horizon = self.datum.local_degree(hs).map(|l| l.horizon).unwrap_or(1);
        let mut multiplicative = true;
        'm: for (&a, ta) in &tilde {
            for (&b, tb) in &tilde {
                if ta.multiplicity + tb.multiplicity >= horizon {
                    continue;
                }
                let Some(tab) = tilde.get(&g.mul(a, b)) else { continue };
                if tab.value != target.group.add(&ta.value, &tb.value) {
                    multiplicative = false;
                    break 'm;
                }
            }
        }
        let prime_independent = tilde.values().all(|t| t.prime_independent);
        Ok(ReciprocityTable {
            pair: (h, u),
            source: source.group.clone(),
            source_lifts: lifts,
            target: target.group.clone(),
            target_lifts: self.target_lifts(p),
            is_iso: map.is_isomorphism(),
            map,
            lift_independent,
            prime_independent,
            multiplicative,
        })
    }

    /// `Υ` on every pair, validated as a morphism `Π_𝔎 → Ĥ⁰_ℰ(C)`.
    pub fn upsilon_morphism(&self, force: bool) -> Result<ReciprocityMorphism, CftError> {
        let mut report = Report::new();
        if force {
            report.extend_prefixed("certificate", self.validate_fnd());
        }
        let tables = self.spectrum.ids().map(|p| self.upsilon(p, force)).collect::<Result<Vec<_>, _>>()?;
        let morphism = RepMorphism::new(
            self.tautological.representation.clone(),
            self.induction.representation.clone(),
            tables.iter().map(|t| t.map.clone()).collect(),
        )?;
        report.extend_prefixed("upsilon", validate_rep_morphism(&morphism));
        let flag = |name: &str, ok: &dyn Fn(&ReciprocityTable) -> bool| {
            tables.iter().find(|t| !ok(t)).map(|t| format!("{name} fails at ({}, {})", t.pair.0, t.pair.1))
        };
        report.record("upsilon.lift_independent", flag("lift independence", &|t| t.lift_independent));
        report.record("upsilon.prime_independent", flag("prime independence", &|t| t.prime_independent));
        report.record("upsilon.multiplicative", flag("multiplicativity", &|t| t.multiplicative));
        let mut agree = None;
        for p in self.spectrum.ids().filter(|&p| self.is_unramified(p)) {
            match self.unramified_upsilon(p) {
                Ok(t) if t.map == tables[p].map => {}
                Ok(_) => {
                    agree = Some(format!("tables differ at {}", self.spectrum.label(p)));
                    break;
                }
                Err(e) => {
                    agree = Some(format!("{e} at {}", self.spectrum.label(p)));
                    break;
                }
            }
        }
        report.record("upsilon.unramified_agreement", agree);
        Ok(ReciprocityMorphism { morphism, tables, report })
    }
}

/// Equality of two subgroups of the same ambient group.
pub(crate) fn same_subgroup(a: &SubgroupEmbedding, b: &SubgroupEmbedding) -> bool {
    let inside = |x: &SubgroupEmbedding, y: &SubgroupEmbedding| {
        (0..x.group.ngens()).all(|j| y.pull(&x.embedding.apply(&x.group.generator(j))).is_some())
    };
    inside(a, b) && inside(b, a)
}
